//! Bi-affine iterated function systems on the unit square.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contractivity::lipschitz_bound;
use crate::geometry::{BiAffineMap, Quad, Vec2};

pub const UNIT_CENTER: Vec2 = Vec2::new(0.5, 0.5);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IfsError {
    #[error("an IFS needs at least two maps, got {0}")]
    TooFewMaps(usize),
    #[error("map {0} has a non-finite corner")]
    NonFinite(usize),
    #[error("point set is empty")]
    EmptySet,
    #[error("symbol {symbol} is outside 1..={n_maps}")]
    InvalidSymbol { symbol: u16, n_maps: usize },
    #[error("could not parse address: {0}")]
    ParseAddress(String),
    #[error("sample count {n} must exceed burn-in {burn_in}")]
    BurnIn { n: usize, burn_in: usize },
}

/// Control points of the four-map construction: `o` is the shared centre,
/// `q, r, s, t` sit on the bottom, right, top and left sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shorthand {
    #[serde(rename = "O")]
    pub o: Vec2,
    #[serde(rename = "Q")]
    pub q: Vec2,
    #[serde(rename = "R")]
    pub r: Vec2,
    #[serde(rename = "S")]
    pub s: Vec2,
    #[serde(rename = "T")]
    pub t: Vec2,
}

impl Shorthand {
    /// Side midpoints with centre `o`.
    pub fn with_center(o: Vec2) -> Self {
        Shorthand {
            o,
            q: Vec2::new(0.5, 0.0),
            r: Vec2::new(1.0, 0.5),
            s: Vec2::new(0.5, 1.0),
            t: Vec2::new(0.0, 0.5),
        }
    }

    pub fn centered() -> Self {
        Shorthand::with_center(UNIT_CENTER)
    }

    /// Corner correspondence: `f1: (A,B,C,D) -> (A,Q,O,T)`, `f2 -> (Q,B,R,O)`,
    /// `f3 -> (O,R,C,S)`, `f4 -> (T,O,S,D)`. Each `f_i` fixes the square
    /// corner its image contains, and neighbouring images share a side.
    pub fn quads(&self) -> [Quad; 4] {
        let [a, b, c, d] = Quad::UNIT.corners();
        let Shorthand { o, q, r, s, t } = *self;
        [
            Quad::new(a, q, o, t),
            Quad::new(q, b, r, o),
            Quad::new(o, r, c, s),
            Quad::new(t, o, s, d),
        ]
    }
}

/// An ordered list of at least two bi-affine maps given by corner quads.
#[derive(Debug, Clone, PartialEq)]
pub struct IfsSpec {
    quads: Vec<Quad>,
    maps: Vec<BiAffineMap>,
    shorthand: Option<Shorthand>,
    factor: Option<f64>,
}

impl IfsSpec {
    pub fn new(quads: Vec<Quad>) -> Result<Self, IfsError> {
        if quads.len() < 2 {
            return Err(IfsError::TooFewMaps(quads.len()));
        }
        if let Some(i) = quads.iter().position(|q| !q.is_finite()) {
            return Err(IfsError::NonFinite(i));
        }
        let maps = quads.iter().map(Quad::map).collect();
        let s = quads.iter().map(lipschitz_bound).fold(0f64, f64::max);
        Ok(IfsSpec {
            quads,
            maps,
            shorthand: None,
            factor: (s < 1.0).then_some(s),
        })
    }

    pub fn quads(&self) -> &[Quad] {
        &self.quads
    }

    pub fn maps(&self) -> &[BiAffineMap] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn shorthand(&self) -> Option<&Shorthand> {
        self.shorthand.as_ref()
    }

    /// Map for a 1-based symbol.
    pub fn map(&self, symbol: u16) -> &BiAffineMap {
        &self.maps[symbol as usize - 1]
    }

    /// Largest per-map Lipschitz bound, if every map is a contraction.
    pub fn contraction_factor(&self) -> Option<f64> {
        self.factor
    }
}

pub fn expand_shorthand(sh: Shorthand) -> IfsSpec {
    let mut spec = IfsSpec::new(sh.quads().to_vec()).expect("four finite quads");
    spec.shorthand = Some(sh);
    spec
}

/// A finite address `i0 i1 … i(k−1)` with 1-based symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Address(Vec<u16>);

impl Address {
    pub fn new(symbols: Vec<u16>, n_maps: usize) -> Result<Self, IfsError> {
        if let Some(&symbol) = symbols.iter().find(|&&s| s == 0 || s as usize > n_maps) {
            return Err(IfsError::InvalidSymbol { symbol, n_maps });
        }
        Ok(Address(symbols))
    }

    /// `symbol` repeated `depth` times.
    pub fn constant(symbol: u16, depth: usize) -> Self {
        Address(vec![symbol; depth])
    }

    pub(crate) fn from_raw(symbols: Vec<u16>) -> Self {
        Address(symbols)
    }

    pub fn symbols(&self) -> &[u16] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The inverse shift `n·σ`.
    pub fn prepend(&self, n: u16) -> Address {
        let mut s = Vec::with_capacity(self.0.len() + 1);
        s.push(n);
        s.extend_from_slice(&self.0);
        Address(s)
    }

    /// The shift `S(n·σ) = σ`.
    pub fn shift(&self) -> Address {
        Address(self.0.get(1..).unwrap_or_default().to_vec())
    }

    pub fn truncate(&self, k: usize) -> Address {
        Address(self.0[..k.min(self.0.len())].to_vec())
    }

    pub fn push(&mut self, symbol: u16) {
        self.0.push(symbol);
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Address {
    type Err = IfsError;

    /// Whitespace-separated symbols, or a run of single digits.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = if s.contains(char::is_whitespace) {
            s.split_whitespace().collect()
        } else {
            s.split("").filter(|p| !p.is_empty()).collect()
        };
        parts
            .iter()
            .map(|p| {
                p.parse::<u16>()
                    .map_err(|e| IfsError::ParseAddress(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Address)
    }
}

/// A finite, nonempty list of points.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointSet(Vec<Vec2>);

impl PointSet {
    pub fn new(points: Vec<Vec2>) -> Result<Self, IfsError> {
        if points.is_empty() {
            return Err(IfsError::EmptySet);
        }
        Ok(PointSet(points))
    }

    pub fn singleton(p: Vec2) -> Self {
        PointSet(vec![p])
    }

    /// Regular `n × n` grid over the closed unit square.
    pub fn unit_grid(n: usize) -> Self {
        let n = n.max(2);
        let step = 1.0 / (n - 1) as f64;
        PointSet(
            (0..n)
                .flat_map(|j| (0..n).map(move |i| Vec2::new(i as f64 * step, j as f64 * step)))
                .collect(),
        )
    }

    pub fn points(&self) -> &[Vec2] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_points(self) -> Vec<Vec2> {
        self.0
    }

    /// One `x,y` line per point, six decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.0.len() * 18);
        for p in &self.0 {
            out.push_str(&format!("{:.6},{:.6}\n", p.x, p.y));
        }
        out
    }
}

/// `F(B)`: images of every point under every map, map-major.
pub fn apply_set(spec: &IfsSpec, set: &PointSet) -> Result<PointSet, IfsError> {
    if set.is_empty() {
        return Err(IfsError::EmptySet);
    }
    let pts = spec
        .maps()
        .iter()
        .flat_map(|f| set.points().iter().map(move |&p| f.eval(p)))
        .collect::<Vec<_>>();
    Ok(PointSet(pts))
}

fn apply_par(spec: &IfsSpec, pts: &[Vec2]) -> Vec<Vec2> {
    let mut out = Vec::with_capacity(pts.len() * spec.len());
    for f in spec.maps() {
        let imgs: Vec<Vec2> = pts.par_iter().map(|&p| f.eval(p)).collect();
        out.extend(imgs);
    }
    out
}

fn stride_subsample(pts: Vec<Vec2>, cap: usize) -> Vec<Vec2> {
    if pts.len() <= cap {
        return pts;
    }
    let stride = pts.len().div_ceil(cap);
    pts.into_iter().step_by(stride).collect()
}

/// `F^k(B)`, stride-subsampled to at most `cap` points after each step.
pub fn iterate(spec: &IfsSpec, set: &PointSet, k: usize, cap: usize) -> Result<PointSet, IfsError> {
    if set.is_empty() {
        return Err(IfsError::EmptySet);
    }
    let cap = cap.max(1);
    let mut pts = stride_subsample(set.points().to_vec(), cap);
    for _ in 0..k {
        pts = stride_subsample(apply_par(spec, &pts), cap);
    }
    Ok(PointSet(pts))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChaosGame {
    pub points: PointSet,
    /// False when some map is not certified contractive; the points may not
    /// approximate an attractor.
    pub certified: bool,
}

/// Random iteration from the centre of the square with uniformly chosen maps.
pub fn chaos_game(spec: &IfsSpec, n: usize, seed: u64, burn_in: usize) -> Result<ChaosGame, IfsError> {
    if n <= burn_in {
        return Err(IfsError::BurnIn { n, burn_in });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = UNIT_CENTER;
    let mut pts = Vec::with_capacity(n - burn_in);
    for i in 0..n {
        x = spec.maps()[rng.random_range(0..spec.len())].eval(x);
        if i >= burn_in {
            pts.push(x);
        }
    }
    Ok(ChaosGame {
        points: PointSet(pts),
        certified: spec.contraction_factor().is_some(),
    })
}

/// `f_{i0} ∘ f_{i1} ∘ … ∘ f_{i(k−1)}(x0)` and the bound `√2·s^k` on its
/// distance from the coding-map limit (infinite when uncertified).
pub fn coding_point(spec: &IfsSpec, addr: &Address, x0: Vec2) -> (Vec2, f64) {
    let p = addr.symbols().iter().rev().fold(x0, |x, &s| spec.map(s).eval(x));
    let err = match spec.contraction_factor() {
        Some(s) => SQRT_2 * s.powi(addr.depth() as i32),
        None => f64::INFINITY,
    };
    (p, err)
}

/// Uniform bucket grid for nearest-neighbour distance queries.
struct NearestGrid<'a> {
    pts: &'a [Vec2],
    origin: Vec2,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl<'a> NearestGrid<'a> {
    fn new(pts: &'a [Vec2]) -> Self {
        let (mut lo, mut hi) = (pts[0], pts[0]);
        for p in pts {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let extent = (hi.x - lo.x).max(hi.y - lo.y);
        let g = ((pts.len() as f64).sqrt().ceil() as usize).clamp(1, 2048);
        let cell = if extent > 0.0 { extent / g as f64 } else { 1.0 };
        let nx = ((hi.x - lo.x) / cell) as usize + 1;
        let ny = ((hi.y - lo.y) / cell) as usize + 1;
        let mut buckets = vec![Vec::new(); nx * ny];
        let mut grid = NearestGrid {
            pts,
            origin: lo,
            cell,
            nx,
            ny,
            buckets: Vec::new(),
        };
        for (i, &p) in pts.iter().enumerate() {
            let (cx, cy) = grid.cell_of(p);
            buckets[cy * nx + cx].push(i as u32);
        }
        grid.buckets = buckets;
        grid
    }

    fn cell_of(&self, p: Vec2) -> (usize, usize) {
        let fx = ((p.x - self.origin.x) / self.cell).floor();
        let fy = ((p.y - self.origin.y) / self.cell).floor();
        (
            (fx.max(0.0) as usize).min(self.nx - 1),
            (fy.max(0.0) as usize).min(self.ny - 1),
        )
    }

    fn nearest_dist(&self, p: Vec2) -> f64 {
        let (cx, cy) = self.cell_of(p);
        let mut best = f64::INFINITY;
        let max_ring = self.nx.max(self.ny);
        for ring in 0..=max_ring {
            let (x0, x1) = (cx.saturating_sub(ring), (cx + ring).min(self.nx - 1));
            let (y0, y1) = (cy.saturating_sub(ring), (cy + ring).min(self.ny - 1));
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let on_ring = x + ring == cx || x == cx + ring || y + ring == cy || y == cy + ring;
                    if !on_ring {
                        continue;
                    }
                    for &i in &self.buckets[y * self.nx + x] {
                        best = best.min(self.pts[i as usize].dist(p));
                    }
                }
            }
            // Cells outside this ring are at least ring·cell away from the
            // projection of p onto the grid box, hence from p.
            if best <= ring as f64 * self.cell {
                break;
            }
        }
        best
    }
}

/// `sup_{a∈A} inf_{b∈B} |a − b|`.
pub fn directed_hausdorff(a: &PointSet, b: &PointSet) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let grid = NearestGrid::new(b.points());
    a.points()
        .par_iter()
        .map(|&p| grid.nearest_dist(p))
        .reduce(|| 0.0, f64::max)
}

/// Symmetric discrete Hausdorff distance.
pub fn hausdorff(a: &PointSet, b: &PointSet) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}
