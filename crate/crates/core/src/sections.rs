//! Masks, itineraries and the nested partitions they induce.
//!
//! A mask assigns every point of the attractor to one map whose image
//! contains it; iterating the inverse of the assigned map yields the
//! point's itinerary, an address that the coding map sends back to the
//! point. The top mask gives priority to lower map indices.

use std::collections::BTreeSet;
use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{invert_on_quad, GeometryError, Quad, Vec2};
use crate::ifs::{coding_point, Address, IfsSpec, UNIT_CENTER};

/// Boundary tolerance for region membership and edge overlap.
pub const EPS_EDGE: f64 = 1e-9;
/// Tolerance handed to the quad inversion inside itineraries.
pub const INVERT_TOL: f64 = 1e-8;
/// Largest allowed distance between an inverted iterate and the square.
pub const MAX_CLAMP: f64 = 1e-7;
/// Deepest partition stored as explicit polygons.
pub const MAX_PARTITION_DEPTH: usize = 8;
/// Boundary samples per side of the unit square when drawing cells.
pub const SIDE_SAMPLES: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SectionError {
    #[error("point {0} is outside the unit square")]
    OutsideSquare(Vec2),
    #[error("point {0} is in no mask region")]
    NoRegion(Vec2),
    #[error("inverting map {symbol} at step {step} failed: {source}")]
    InversionFailed {
        symbol: u16,
        step: usize,
        source: GeometryError,
    },
    #[error("inverse iterate drifted {0:e} outside the square")]
    ClampDrift(f64),
    #[error("partition depth {depth} exceeds the cap of {cap}")]
    DepthCap { depth: usize, cap: usize },
}

// ---------------------------------------------------------------------------
// Polygon helpers

fn seg_dist(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sq();
    let t = if len2 > 0.0 {
        ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    p.dist(a + ab * t)
}

fn edges(poly: &[Vec2]) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
    poly.iter().copied().zip(poly.iter().copied().cycle().skip(1))
}

/// Closed containment with an `eps` band around the boundary.
pub fn polygon_contains(poly: &[Vec2], p: Vec2, eps: f64) -> bool {
    let mut inside = false;
    for (a, b) in edges(poly) {
        if seg_dist(p, a, b) <= eps {
            return true;
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Signed shoelace area (positive for counter-clockwise).
pub fn polygon_area(poly: &[Vec2]) -> f64 {
    0.5 * edges(poly).map(|(a, b)| a.cross(b)).sum::<f64>()
}

pub fn polygon_centroid(poly: &[Vec2]) -> Vec2 {
    let a = polygon_area(poly);
    if a.abs() < 1e-300 {
        return poly.iter().fold(Vec2::ZERO, |s, &p| s + p) * (1.0 / poly.len() as f64);
    }
    let mut c = Vec2::ZERO;
    for (p, q) in edges(poly) {
        c += (p + q) * p.cross(q);
    }
    c * (1.0 / (6.0 * a))
}

pub fn polygon_diameter(poly: &[Vec2]) -> f64 {
    let mut d = 0f64;
    for (i, &p) in poly.iter().enumerate() {
        for &q in &poly[i + 1..] {
            d = d.max(p.dist(q));
        }
    }
    d
}

/// Length along which two segments coincide, or 0 if they are not collinear.
fn collinear_overlap(a: (Vec2, Vec2), b: (Vec2, Vec2), tol: f64) -> f64 {
    let dir = a.1 - a.0;
    let len = dir.norm();
    if len <= tol || (b.1 - b.0).norm() <= tol {
        return 0.0;
    }
    let u = dir * (1.0 / len);
    let off = |p: Vec2| (p - a.0).cross(u).abs();
    if off(b.0) > tol || off(b.1) > tol {
        return 0.0;
    }
    let (t0, t1) = ((b.0 - a.0).dot(u), (b.1 - a.0).dot(u));
    (t0.max(t1).min(len) - t0.min(t1).max(0.0)).max(0.0)
}

fn unit_boundary(samples: usize) -> Vec<Vec2> {
    let [a, b, c, d] = Quad::UNIT.corners();
    let mut out = Vec::with_capacity(4 * samples);
    for (p, q) in [(a, b), (b, c), (c, d), (d, a)] {
        for k in 0..samples {
            out.push(p.lerp(q, k as f64 / samples as f64));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Masks and itineraries

/// First-match-wins assignment over the closed image quadrilaterals
/// `f_1(□), …, f_N(□)`; region `i` is `f_i(□)` minus earlier images.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    regions: Vec<[Vec2; 4]>,
    pub eps_edge: f64,
}

impl Mask {
    pub fn regions(&self) -> &[[Vec2; 4]] {
        &self.regions
    }

    /// 1-based region index of `x`.
    pub fn region_of(&self, x: Vec2) -> Option<u16> {
        self.regions
            .iter()
            .position(|r| polygon_contains(r, x, self.eps_edge))
            .map(|i| i as u16 + 1)
    }

    /// Number of closed image quads containing `x`; more than one means `x`
    /// lies on a boundary between regions.
    pub fn multiplicity(&self, x: Vec2, eps: f64) -> usize {
        self.regions
            .iter()
            .filter(|r| polygon_contains(*r, x, eps))
            .count()
    }
}

pub fn top_mask(spec: &IfsSpec) -> Mask {
    Mask {
        regions: spec.quads().iter().map(Quad::corners).collect(),
        eps_edge: EPS_EDGE,
    }
}

fn in_unit(x: Vec2, eps: f64) -> bool {
    (-eps..=1.0 + eps).contains(&x.x) && (-eps..=1.0 + eps).contains(&x.y)
}

/// One step of the mask dynamics: region symbol and `f_i^{-1}(x)` clamped to □.
fn mask_step(spec: &IfsSpec, mask: &Mask, x: Vec2, step: usize) -> Result<(u16, Vec2), SectionError> {
    let symbol = mask.region_of(x).ok_or(SectionError::NoRegion(x))?;
    let y = invert_on_quad(spec.map(symbol), x, INVERT_TOL)
        .map_err(|source| SectionError::InversionFailed { symbol, step, source })?;
    let clamped = y.clamp_unit();
    let drift = clamped.dist(y);
    if drift >= MAX_CLAMP {
        return Err(SectionError::ClampDrift(drift));
    }
    Ok((symbol, clamped))
}

/// First `n` symbols of the itinerary of `x`: `i_k` is the region of
/// `T^k(x)`, where `T = f_i^{-1}` on region `i`.
pub fn itinerary(spec: &IfsSpec, mask: &Mask, x: Vec2, n: usize) -> Result<Address, SectionError> {
    if !x.is_finite() || !in_unit(x, mask.eps_edge) {
        return Err(SectionError::OutsideSquare(x));
    }
    let mut x = x.clamp_unit();
    let mut out = Vec::with_capacity(n);
    for step in 0..n {
        let (s, next) = mask_step(spec, mask, x, step)?;
        out.push(s);
        x = next;
    }
    Ok(Address::from_raw(out))
}

/// Dump line `x y : i0 i1 … i(n−1)`.
pub fn itinerary_line(x: Vec2, addr: &Address) -> String {
    format!("{:.9} {:.9} : {}", x.x, x.y, addr)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionReport {
    pub samples: usize,
    pub depth: usize,
    pub max_deviation: f64,
    /// `√2·s^depth + tol`; infinite when the IFS is not certified.
    pub bound: f64,
    pub inversion_failures: usize,
    /// No contraction factor is available, so the bound says nothing.
    pub inconclusive: bool,
    pub passed: bool,
}

/// `|π(τ(x)|_n) − x| ≤ √2·s^n + tol` over the samples.
pub fn verify_section(spec: &IfsSpec, mask: &Mask, samples: &[Vec2], n: usize, tol: f64) -> SectionReport {
    let s = spec.contraction_factor();
    let results: Vec<Option<f64>> = samples
        .par_iter()
        .map(|&x| {
            itinerary(spec, mask, x, n)
                .ok()
                .map(|addr| coding_point(spec, &addr, UNIT_CENTER).0.dist(x))
        })
        .collect();
    let inversion_failures = results.iter().filter(|r| r.is_none()).count();
    let max_deviation = results.iter().flatten().fold(0f64, |m, &d| m.max(d));
    let bound = s.map_or(f64::INFINITY, |s| SQRT_2 * s.powi(n as i32) + tol);
    SectionReport {
        samples: samples.len(),
        depth: n,
        max_deviation,
        bound,
        inversion_failures,
        inconclusive: s.is_none(),
        passed: s.is_some() && inversion_failures == 0 && max_deviation <= bound,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftReport {
    pub samples: usize,
    pub agreed: usize,
    /// Samples lying on a boundary between mask regions (within `tol`).
    pub boundary_samples: usize,
    /// Disagreements whose orbit touched a region boundary.
    pub boundary_mismatches: usize,
    /// Disagreements away from every boundary.
    pub mismatches: usize,
    pub inversion_failures: usize,
    pub passed: bool,
}

/// Checks `S(τ(x)) = τ(f_{i0}^{-1}(x))` symbol by symbol at depth `n`.
pub fn verify_shift_invariance(
    spec: &IfsSpec,
    mask: &Mask,
    samples: &[Vec2],
    n: usize,
    tol: f64,
) -> ShiftReport {
    #[derive(Clone, Copy)]
    enum Outcome {
        Agree,
        BoundaryMismatch,
        Mismatch,
        Failed,
    }
    let band = tol.max(mask.eps_edge);
    let per_sample: Vec<(Outcome, bool)> = samples
        .par_iter()
        .map(|&x| {
            let on_boundary = mask.multiplicity(x, band) > 1;
            if n <= 1 {
                return (Outcome::Agree, on_boundary);
            }
            let Ok(sigma) = itinerary(spec, mask, x, n) else {
                return (Outcome::Failed, on_boundary);
            };
            let first = sigma.symbols()[0];
            let Ok(y) = invert_on_quad(spec.map(first), x, INVERT_TOL) else {
                return (Outcome::Failed, on_boundary);
            };
            let Ok(tail) = itinerary(spec, mask, y.clamp_unit(), n - 1) else {
                return (Outcome::Failed, on_boundary);
            };
            if tail == sigma.shift() {
                return (Outcome::Agree, on_boundary);
            }
            // Walk the orbit and see whether it grazed a boundary.
            let mut z = x;
            let mut grazed = false;
            for step in 0..n {
                grazed |= mask.multiplicity(z, band) > 1;
                match mask_step(spec, mask, z, step) {
                    Ok((_, next)) => z = next,
                    Err(_) => break,
                }
            }
            (
                if grazed {
                    Outcome::BoundaryMismatch
                } else {
                    Outcome::Mismatch
                },
                on_boundary,
            )
        })
        .collect();
    let count = |pred: fn(&Outcome) -> bool| per_sample.iter().filter(|(o, _)| pred(o)).count();
    let mismatches = count(|o| matches!(o, Outcome::Mismatch));
    let inversion_failures = count(|o| matches!(o, Outcome::Failed));
    ShiftReport {
        samples: samples.len(),
        agreed: count(|o| matches!(o, Outcome::Agree)),
        boundary_samples: per_sample.iter().filter(|(_, b)| *b).count(),
        boundary_mismatches: count(|o| matches!(o, Outcome::BoundaryMismatch)),
        mismatches,
        inversion_failures,
        passed: mismatches == 0 && inversion_failures == 0,
    }
}

// ---------------------------------------------------------------------------
// Nested partitions

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub address: Address,
    /// `f_σ` applied to boundary samples of the unit square, counter-clockwise
    /// for orientation-preserving maps.
    pub polygon: Vec<Vec2>,
}

/// Level-`n` cells `P_σ = f_σ(□)` in lexicographic address order.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub level: usize,
    pub n_maps: usize,
    pub cells: Vec<Cell>,
    /// Cell areas sum to one, every cell has positive area and stays in □.
    pub tiles: bool,
    /// Every cell's centroid and vertices lie in its parent cell.
    pub nested: bool,
    /// Largest cell diameter.
    pub mesh: f64,
}

impl Partition {
    pub fn parent_index(&self, i: usize) -> usize {
        i / self.n_maps
    }
}

/// Is `p` in `f_σ(□)`? Peels the maps off one at a time by inversion.
fn in_cell(spec: &IfsSpec, addr: &Address, p: Vec2, tol: f64) -> bool {
    let mut z = p;
    for &s in addr.symbols() {
        match invert_on_quad(spec.map(s), z, tol) {
            Ok(w) => z = w,
            Err(_) => return false,
        }
    }
    in_unit(z, tol)
}

pub fn build_partition(spec: &IfsSpec, n: usize) -> Result<Partition, SectionError> {
    let n_maps = spec.len();
    let too_many = (n_maps as f64).powi(n as i32) > 4f64.powi(MAX_PARTITION_DEPTH as i32);
    if n > MAX_PARTITION_DEPTH || too_many {
        return Err(SectionError::DepthCap {
            depth: n,
            cap: MAX_PARTITION_DEPTH,
        });
    }
    let mut cells = vec![Cell {
        address: Address::default(),
        polygon: unit_boundary(SIDE_SAMPLES),
    }];
    let mut parents = Vec::new();
    // P_{jτ} = f_j(P_τ); iterating j outermost keeps lexicographic order.
    for _ in 0..n {
        let next = spec
            .maps()
            .iter()
            .enumerate()
            .flat_map(|(j, f)| {
                cells.iter().map(move |c| Cell {
                    address: c.address.prepend(j as u16 + 1),
                    polygon: c.polygon.iter().map(|&p| f.eval(p)).collect(),
                })
            })
            .collect();
        parents = std::mem::replace(&mut cells, next);
    }

    let area: f64 = cells.iter().map(|c| polygon_area(&c.polygon)).sum();
    let tiles = (area - 1.0).abs() <= 1e-9
        && cells
            .iter()
            .all(|c| polygon_area(&c.polygon) > 0.0 && c.polygon.iter().all(|&p| in_unit(p, EPS_EDGE)));
    let nested = n == 0
        || cells.par_iter().enumerate().all(|(i, c)| {
            let parent = &parents[i / n_maps];
            debug_assert_eq!(parent.address, c.address.truncate(n - 1));
            let probe = std::iter::once(polygon_centroid(&c.polygon)).chain(c.polygon.iter().copied());
            probe.into_iter().all(|p| in_cell(spec, &parent.address, p, 1e-7))
        });
    let mesh = cells
        .par_iter()
        .map(|c| polygon_diameter(&c.polygon))
        .reduce(|| 0.0, f64::max);
    Ok(Partition {
        level: n,
        n_maps,
        cells,
        tiles,
        nested,
        mesh,
    })
}

/// Undirected graph on partition cells (indexed as in `Partition::cells`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    pub n_vertices: usize,
    /// Sorted pairs `(i, j)` with `i < j`.
    pub edges: BTreeSet<(usize, usize)>,
}

impl DualGraph {
    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| match (a == v, b == v) {
                (true, _) => Some(b),
                (_, true) => Some(a),
                _ => None,
            })
            .collect()
    }
}

/// Cells are joined when their boundaries share a segment longer than
/// `EPS_EDGE`; touching at a corner does not count.
pub fn dual_graph(p: &Partition) -> DualGraph {
    let cells = &p.cells;
    let bbox: Vec<(Vec2, Vec2)> = cells
        .iter()
        .map(|c| {
            c.polygon.iter().fold(
                (
                    Vec2::new(f64::INFINITY, f64::INFINITY),
                    Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
                ),
                |(lo, hi), &q| {
                    (
                        Vec2::new(lo.x.min(q.x), lo.y.min(q.y)),
                        Vec2::new(hi.x.max(q.x), hi.y.max(q.y)),
                    )
                },
            )
        })
        .collect();
    // Bucket cells by bounding box to avoid the all-pairs scan.
    let g = ((cells.len() as f64).sqrt().ceil() as usize).max(1);
    let bucket = |v: f64| ((v.clamp(0.0, 1.0) * g as f64) as usize).min(g - 1);
    let mut grid = vec![Vec::<usize>::new(); g * g];
    for (i, (lo, hi)) in bbox.iter().enumerate() {
        for by in bucket(lo.y - EPS_EDGE)..=bucket(hi.y + EPS_EDGE) {
            for bx in bucket(lo.x - EPS_EDGE)..=bucket(hi.x + EPS_EDGE) {
                grid[by * g + bx].push(i);
            }
        }
    }
    let mut candidates = BTreeSet::new();
    for b in &grid {
        for (k, &i) in b.iter().enumerate() {
            for &j in &b[k + 1..] {
                let (a, c) = (bbox[i], bbox[j]);
                let overlap = a.0.x <= c.1.x + EPS_EDGE
                    && c.0.x <= a.1.x + EPS_EDGE
                    && a.0.y <= c.1.y + EPS_EDGE
                    && c.0.y <= a.1.y + EPS_EDGE;
                if overlap {
                    candidates.insert((i.min(j), i.max(j)));
                }
            }
        }
    }
    let candidates: Vec<(usize, usize)> = candidates.into_iter().collect();
    let edges = candidates
        .into_par_iter()
        .filter(|&(i, j)| {
            let shared: f64 = edges(&cells[i].polygon)
                .flat_map(|e| edges(&cells[j].polygon).map(move |f| collinear_overlap(e, f, EPS_EDGE)))
                .sum();
            shared > EPS_EDGE
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    DualGraph {
        n_vertices: cells.len(),
        edges,
    }
}

/// Grid position of a cell of the four-map square system: symbol 1, 2, 3, 4
/// selects the lower-left, lower-right, upper-right, upper-left quadrant.
pub fn grid_position(addr: &Address) -> (usize, usize) {
    addr.symbols().iter().fold((0, 0), |(col, row), &s| {
        let (dx, dy) = match s {
            1 => (0, 0),
            2 => (1, 0),
            3 => (1, 1),
            _ => (0, 1),
        };
        (2 * col + dx, 2 * row + dy)
    })
}

/// True iff the address-to-grid-position map is an isomorphism from the
/// dual graph onto the `2^n × 2^n` grid graph.
pub fn matches_grid(p: &Partition, g: &DualGraph) -> bool {
    if p.n_maps != 4 {
        return false;
    }
    let side = 1usize << p.level;
    let pos: Vec<(usize, usize)> = p.cells.iter().map(|c| grid_position(&c.address)).collect();
    let distinct: BTreeSet<_> = pos.iter().collect();
    if distinct.len() != side * side {
        return false;
    }
    let expected = 2 * side * (side - 1);
    g.edges.len() == expected
        && g.edges.iter().all(|&(i, j)| {
            let (a, b) = (pos[i], pos[j]);
            a.0.abs_diff(b.0) + a.1.abs_diff(b.1) == 1
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{expand_shorthand, Shorthand};

    fn centered() -> IfsSpec {
        expand_shorthand(Shorthand::centered())
    }

    #[test]
    fn top_mask_first_match() {
        let spec = centered();
        let m = top_mask(&spec);
        assert_eq!(m.region_of(Vec2::new(0.5, 0.5)), Some(1));
        assert_eq!(m.region_of(Vec2::new(0.75, 0.25)), Some(2));
        assert_eq!(m.region_of(Vec2::new(0.75, 0.5)), Some(2));
        assert_eq!(m.region_of(Vec2::new(0.5, 0.75)), Some(3));
        assert_eq!(m.region_of(Vec2::new(0.25, 0.75)), Some(4));
        assert_eq!(m.region_of(Vec2::new(1.0, 1.0)), Some(3));
        assert_eq!(m.region_of(Vec2::new(0.0, 1.0)), Some(4));
        for j in 0..=100 {
            for i in 0..=100 {
                let x = Vec2::new(i as f64 / 100.0, j as f64 / 100.0);
                assert!(m.region_of(x).is_some(), "{x}");
            }
        }
    }

    #[test]
    fn itineraries() {
        let spec = centered();
        let m = top_mask(&spec);
        let it = |x, y, n| itinerary(&spec, &m, Vec2::new(x, y), n).unwrap().to_string();
        assert_eq!(it(0.25, 0.25, 6), "1 1 3 3 3 3");
        assert_eq!(it(0.0, 0.0, 5), "1 1 1 1 1");
        assert_eq!(it(1.0, 1.0, 5), "3 3 3 3 3");
        assert!(matches!(
            itinerary(&spec, &m, Vec2::new(1.5, 0.5), 3),
            Err(SectionError::OutsideSquare(_))
        ));
    }

    #[test]
    fn dump_line_format() {
        let addr: Address = "1 1 3".parse().unwrap();
        assert_eq!(
            itinerary_line(Vec2::new(0.25, 0.25), &addr),
            "0.250000000 0.250000000 : 1 1 3"
        );
    }

    #[test]
    fn section_zero_depth() {
        let spec = centered();
        let r = verify_section(
            &spec,
            &top_mask(&spec),
            &[Vec2::new(0.1, 0.9), Vec2::ZERO],
            0,
            0.0,
        );
        assert!(r.passed);
        assert!(r.max_deviation <= SQRT_2);
    }

    #[test]
    fn uncertified_section_is_inconclusive() {
        let spec = IfsSpec::new(vec![Quad::UNIT, Quad::UNIT]).unwrap();
        let r = verify_section(&spec, &top_mask(&spec), &[Vec2::new(0.3, 0.3)], 4, 1e-9);
        assert!(r.inconclusive);
        assert!(!r.passed);
    }

    #[test]
    fn boundary_sample_is_flagged() {
        let spec = centered();
        let m = top_mask(&spec);
        let r = verify_shift_invariance(&spec, &m, &[Vec2::new(0.5, 0.25)], 10, 1e-9);
        assert_eq!(r.boundary_samples, 1);
        assert!(r.passed);
        let vacuous = verify_shift_invariance(&spec, &m, &[Vec2::new(0.3, 0.3)], 1, 1e-9);
        assert!(vacuous.passed);
    }

    #[test]
    fn level_one_partition() {
        let p = build_partition(&centered(), 1).unwrap();
        assert_eq!(p.cells.len(), 4);
        assert!(p.tiles && p.nested);
        assert!((p.mesh - SQRT_2 / 2.0).abs() < 1e-15);
        let g = dual_graph(&p);
        // 4-cycle 1-2-3-4
        let e: Vec<_> = g.edges.iter().copied().collect();
        assert_eq!(e, vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert!(matches_grid(&p, &g));
    }

    #[test]
    fn depth_cap() {
        assert!(matches!(
            build_partition(&centered(), 9),
            Err(SectionError::DepthCap { .. })
        ));
    }

    #[test]
    fn polygon_helpers() {
        let sq = Quad::UNIT.corners();
        assert_eq!(polygon_area(&sq), 1.0);
        assert_eq!(polygon_centroid(&sq), Vec2::new(0.5, 0.5));
        assert!(polygon_contains(&sq, Vec2::new(1.0, 0.5), 0.0));
        assert!(!polygon_contains(&sq, Vec2::new(1.0 + 1e-6, 0.5), 1e-9));
        let a = (Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0));
        assert!(
            (collinear_overlap(a, (Vec2::new(0.5, 0.0), Vec2::new(2.0, 0.0)), 1e-12) - 0.5).abs() < 1e-15
        );
        assert_eq!(
            collinear_overlap(a, (Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0)), 1e-12),
            0.0
        );
    }
}
