//! Algebra and geometry of a single bi-affine map `f(x, y) = a + b·x + c·y + d·x·y`.
//!
//! A non-degenerate map folds the plane along its *folding line* (the zero set
//! of the Jacobian determinant) and sends that line onto the *folding
//! parabola*. Images of horizontal and vertical lines are tangents of that
//! parabola, which gives a second, purely geometric route to `f(p)`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance for every parallelism / degeneracy test.
pub const PARALLEL_EPS: f64 = 1e-10;

/// Absolute tolerance used to decide that a point lies on the folding line.
pub const ON_LINE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("map is degenerate ({0})")]
    DegenerateMap(DegeneracyClass),
    #[error("point is not on the folding line")]
    NotOnFoldingLine,
    #[error("point lies on the folding line; the two tangents coincide")]
    OnFoldingLine,
    #[error("parabola is degenerate")]
    DegenerateParabola,
    #[error("target lies outside the image of the unit square")]
    OutsideImage,
    #[error("inversion is numerically ill-conditioned")]
    IllConditioned,
}

/// A point or vector in the plane. Serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// Determinant of the 2×2 matrix with columns `self` and `o`.
    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Clamp both coordinates into `[0, 1]`.
    #[inline]
    pub fn clamp_unit(self) -> Vec2 {
        Vec2::new(self.x.clamp(0.0, 1.0), self.y.clamp(0.0, 1.0))
    }

    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        self + (o - self) * t
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.9}, {:.9})", self.x, self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Vec2::new(x, y)
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

fn parallel(u: Vec2, v: Vec2, eps: f64) -> bool {
    u.cross(v).abs() <= eps * u.norm() * v.norm()
}

/// Which way, if any, a bi-affine map fails to be non-degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DegeneracyClass {
    /// `d = 0`.
    Affine,
    /// `d ≠ 0` and both `b` and `c` are parallel to `d`: the range is a line.
    LineRange,
    /// `d ≠ 0` and exactly one of `b`, `c` is parallel to `d`: the folding
    /// line collapses to a point.
    PointFold,
    NonDegenerate,
}

impl fmt::Display for DegeneracyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DegeneracyClass::Affine => "affine",
            DegeneracyClass::LineRange => "line-range",
            DegeneracyClass::PointFold => "point-fold",
            DegeneracyClass::NonDegenerate => "non-degenerate",
        };
        f.write_str(s)
    }
}

/// The line `alpha·x + beta·y = gamma`, scaled so that `max(|alpha|, |beta|) = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Line {
    /// Returns `None` when `(alpha, beta)` vanishes or any input is not finite.
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Option<Line> {
        let m = alpha.abs().max(beta.abs());
        if m == 0.0 || !m.is_finite() || !gamma.is_finite() {
            return None;
        }
        Some(Line {
            alpha: alpha / m,
            beta: beta / m,
            gamma: gamma / m,
        })
    }

    /// The line through `p` with direction `dir`.
    pub fn through(p: Vec2, dir: Vec2) -> Option<Line> {
        let (alpha, beta) = (-dir.y, dir.x);
        Line::new(alpha, beta, alpha * p.x + beta * p.y)
    }

    pub fn horizontal(y: f64) -> Line {
        Line {
            alpha: 0.0,
            beta: 1.0,
            gamma: y,
        }
    }

    pub fn vertical(x: f64) -> Line {
        Line {
            alpha: 1.0,
            beta: 0.0,
            gamma: x,
        }
    }

    pub fn normal(&self) -> Vec2 {
        Vec2::new(self.alpha, self.beta)
    }

    pub fn direction(&self) -> Vec2 {
        Vec2::new(self.beta, -self.alpha)
    }

    /// `alpha·x + beta·y − gamma`.
    pub fn residual(&self, p: Vec2) -> f64 {
        self.alpha * p.x + self.beta * p.y - self.gamma
    }

    pub fn distance(&self, p: Vec2) -> f64 {
        self.residual(p).abs() / self.normal().norm()
    }

    pub fn reflect(&self, p: Vec2) -> Vec2 {
        let n = self.normal();
        p - n * (2.0 * self.residual(p) / n.norm_sq())
    }

    pub fn intersect(&self, o: &Line) -> Option<Vec2> {
        let det = self.alpha * o.beta - o.alpha * self.beta;
        if det.abs() <= PARALLEL_EPS {
            return None;
        }
        Some(Vec2::new(
            (self.gamma * o.beta - o.gamma * self.beta) / det,
            (self.alpha * o.gamma - o.alpha * self.gamma) / det,
        ))
    }

    /// Same point set, regardless of the sign of the coefficients.
    pub fn approx_eq(&self, o: &Line, tol: f64) -> bool {
        let same = (self.alpha - o.alpha).abs() <= tol
            && (self.beta - o.beta).abs() <= tol
            && (self.gamma - o.gamma).abs() <= tol;
        let flipped = (self.alpha + o.alpha).abs() <= tol
            && (self.beta + o.beta).abs() <= tol
            && (self.gamma + o.gamma).abs() <= tol;
        same || flipped
    }

    /// Graph parametrization `origin + t·dir`: over `x` when `|beta| ≥ |alpha|`,
    /// otherwise over `y`.
    pub fn graph_parametrization(&self) -> (Vec2, Vec2) {
        if self.beta.abs() >= self.alpha.abs() {
            (
                Vec2::new(0.0, self.gamma / self.beta),
                Vec2::new(1.0, -self.alpha / self.beta),
            )
        } else {
            (
                Vec2::new(self.gamma / self.alpha, 0.0),
                Vec2::new(-self.beta / self.alpha, 1.0),
            )
        }
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.9}·x + {:.9}·y = {:.9}", self.alpha, self.beta, self.gamma)
    }
}

/// Parametric curve `r(t) = u + v·t + w·t²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parabola {
    pub u: Vec2,
    pub v: Vec2,
    pub w: Vec2,
}

impl Parabola {
    pub fn new(u: Vec2, v: Vec2, w: Vec2) -> Self {
        Parabola { u, v, w }
    }

    pub fn point(&self, t: f64) -> Vec2 {
        self.u + self.v * t + self.w * (t * t)
    }

    pub fn derivative(&self, t: f64) -> Vec2 {
        self.v + self.w * (2.0 * t)
    }

    /// A line (`w = 0`) or a doubled-back ray (`v ∥ w`).
    pub fn is_degenerate(&self, eps: f64) -> bool {
        self.w == Vec2::ZERO || parallel(self.v, self.w, eps)
    }

    pub fn tangent(&self, t: f64) -> Option<Line> {
        Line::through(self.point(t), self.derivative(t))
    }

    /// Coefficients `(A, B, C)` of `A·t² + B·t + C = 0`, the parameters at
    /// which the curve meets `line`.
    pub fn line_quadratic(&self, line: &Line) -> (f64, f64, f64) {
        let n = line.normal();
        (n.dot(self.w), n.dot(self.v), n.dot(self.u) - line.gamma)
    }

    /// Parameter of the vertex (where the tangent is perpendicular to the axis).
    pub fn vertex_parameter(&self) -> f64 {
        -self.v.dot(self.w) / (2.0 * self.w.norm_sq())
    }
}

/// Four corner images `p0..p3` of `(0,0), (1,0), (1,1), (0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quad {
    pub p0: Vec2,
    pub p1: Vec2,
    pub p2: Vec2,
    pub p3: Vec2,
}

impl Quad {
    pub const UNIT: Quad = Quad {
        p0: Vec2::new(0.0, 0.0),
        p1: Vec2::new(1.0, 0.0),
        p2: Vec2::new(1.0, 1.0),
        p3: Vec2::new(0.0, 1.0),
    };

    pub fn new(p0: Vec2, p1: Vec2, p2: Vec2, p3: Vec2) -> Self {
        Quad { p0, p1, p2, p3 }
    }

    pub fn corners(&self) -> [Vec2; 4] {
        [self.p0, self.p1, self.p2, self.p3]
    }

    pub fn from_corners(c: [Vec2; 4]) -> Self {
        Quad::new(c[0], c[1], c[2], c[3])
    }

    pub fn is_finite(&self) -> bool {
        self.corners().iter().all(|p| p.is_finite())
    }

    pub fn map(&self) -> BiAffineMap {
        biaffine_from_quad(self)
    }

    /// Cyclic relabelling `p_i -> p_{i+k}`; the map is precomposed with a
    /// rotation of the unit square.
    pub fn rotated(&self, k: usize) -> Quad {
        let c = self.corners();
        Quad::new(c[k % 4], c[(k + 1) % 4], c[(k + 2) % 4], c[(k + 3) % 4])
    }
}

/// `f(x, y) = a + b·x + c·y + d·x·y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiAffineMap {
    pub a: Vec2,
    pub b: Vec2,
    pub c: Vec2,
    pub d: Vec2,
}

/// Determinants `(|b d|, |d c|, |c b|)`: the folding line is
/// `|b d|·x + |d c|·y = |c b|` and the Jacobian is that line's residual.
fn fold_dets(f: &BiAffineMap) -> (f64, f64, f64) {
    (f.b.cross(f.d), f.d.cross(f.c), f.c.cross(f.b))
}

impl BiAffineMap {
    pub const IDENTITY: BiAffineMap = BiAffineMap {
        a: Vec2::new(0.0, 0.0),
        b: Vec2::new(1.0, 0.0),
        c: Vec2::new(0.0, 1.0),
        d: Vec2::new(0.0, 0.0),
    };

    pub fn new(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> Self {
        BiAffineMap { a, b, c, d }
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    #[inline]
    pub fn eval(&self, p: Vec2) -> Vec2 {
        evaluate(self, p)
    }

    /// Jacobian determinant at `p`.
    pub fn jacobian_det(&self, p: Vec2) -> f64 {
        (self.b + self.d * p.y).cross(self.c + self.d * p.x)
    }

    /// Image of the parametrized line `origin + t·dir`.
    pub fn image_of_param_line(&self, origin: Vec2, dir: Vec2) -> Parabola {
        let (o, e) = (origin, dir);
        Parabola {
            u: self.eval(o),
            v: self.b * e.x + self.c * e.y + self.d * (o.x * e.y + o.y * e.x),
            w: self.d * (e.x * e.y),
        }
    }

    pub fn corner_images(&self) -> Quad {
        Quad::new(
            self.a,
            self.a + self.b,
            self.a + self.b + self.c + self.d,
            self.a + self.c,
        )
    }
}

pub fn biaffine_from_quad(q: &Quad) -> BiAffineMap {
    BiAffineMap {
        a: q.p0,
        b: q.p1 - q.p0,
        c: q.p3 - q.p0,
        d: q.p2 + q.p0 - q.p1 - q.p3,
    }
}

#[inline]
pub fn evaluate(f: &BiAffineMap, p: Vec2) -> Vec2 {
    f.a + f.b * p.x + f.c * p.y + f.d * (p.x * p.y)
}

pub fn classify(f: &BiAffineMap, eps: f64) -> DegeneracyClass {
    let scale = 1f64.max(f.b.norm()).max(f.c.norm());
    if f.d.norm() <= eps * scale {
        return DegeneracyClass::Affine;
    }
    match (parallel(f.b, f.d, eps), parallel(f.c, f.d, eps)) {
        (true, true) => DegeneracyClass::LineRange,
        (false, false) => DegeneracyClass::NonDegenerate,
        _ => DegeneracyClass::PointFold,
    }
}

fn require_non_degenerate(f: &BiAffineMap) -> Result<(), GeometryError> {
    match classify(f, PARALLEL_EPS) {
        DegeneracyClass::NonDegenerate => Ok(()),
        other => Err(GeometryError::DegenerateMap(other)),
    }
}

pub fn folding_line(f: &BiAffineMap) -> Result<Line, GeometryError> {
    require_non_degenerate(f)?;
    let (bd, dc, cb) = fold_dets(f);
    Line::new(bd, dc, cb).ok_or(GeometryError::DegenerateMap(DegeneracyClass::LineRange))
}

/// The point identified with `p` by the fold: `f(p) = f(fold_point(p))`.
pub fn fold_point(f: &BiAffineMap, p: Vec2) -> Result<Vec2, GeometryError> {
    require_non_degenerate(f)?;
    let (bd, dc, cb) = fold_dets(f);
    Ok(Vec2::new((cb - dc * p.y) / bd, (cb - bd * p.x) / dc))
}

/// Image of the folding line, parametrized by the `x` coordinate along it.
pub fn folding_parabola(f: &BiAffineMap) -> Result<Parabola, GeometryError> {
    require_non_degenerate(f)?;
    let (bd, dc, cb) = fold_dets(f);
    // L_f is a graph over x because |d c| ≠ 0.
    Ok(f.image_of_param_line(Vec2::new(0.0, cb / dc), Vec2::new(1.0, -bd / dc)))
}

/// Image of an arbitrary line, using [`Line::graph_parametrization`].
pub fn line_image(f: &BiAffineMap, line: &Line) -> Parabola {
    let (o, e) = line.graph_parametrization();
    f.image_of_param_line(o, e)
}

/// Tangent of the folding parabola at `f(on_fold)`, with direction `c + d·x`.
pub fn tangent_at(f: &BiAffineMap, on_fold: Vec2) -> Result<Line, GeometryError> {
    let lf = folding_line(f)?;
    if lf.residual(on_fold).abs() > ON_LINE_TOL * (1.0 + on_fold.norm()) {
        return Err(GeometryError::NotOnFoldingLine);
    }
    Line::through(f.eval(on_fold), f.c + f.d * on_fold.x).ok_or(GeometryError::IllConditioned)
}

/// `f(p)` as the intersection of the tangents at the folding-line points
/// straight above/below and left/right of `p`.
pub fn image_via_tangents(f: &BiAffineMap, p: Vec2) -> Result<Vec2, GeometryError> {
    let lf = folding_line(f)?;
    if lf.distance(p) <= PARALLEL_EPS * (1.0 + p.norm()) {
        return Err(GeometryError::OnFoldingLine);
    }
    let (bd, dc, cb) = fold_dets(f);
    let above = Vec2::new(p.x, (cb - bd * p.x) / dc);
    let beside = Vec2::new((cb - dc * p.y) / bd, p.y);
    let ta = tangent_at(f, above)?;
    let tb = tangent_at(f, beside)?;
    ta.intersect(&tb).ok_or(GeometryError::OnFoldingLine)
}

/// Centre and radius of the circle through three points.
pub fn circumcircle(p: Vec2, q: Vec2, r: Vec2) -> Option<(Vec2, f64)> {
    let (b, c) = (q - p, r - p);
    let den = 2.0 * b.cross(c);
    if den.abs() <= PARALLEL_EPS * b.norm_sq().max(c.norm_sq()) {
        return None;
    }
    let (bb, cc) = (b.norm_sq(), c.norm_sq());
    let off = Vec2::new(c.y * bb - b.y * cc, b.x * cc - c.x * bb) * (1.0 / den);
    Some((p + off, off.norm()))
}

/// Focus and directrix by Lambert's theorem: the circumcircle of any triangle
/// cut out by three tangents passes through the focus.
pub fn focus_directrix(par: &Parabola) -> Result<(Vec2, Line), GeometryError> {
    if par.is_degenerate(PARALLEL_EPS) {
        return Err(GeometryError::DegenerateParabola);
    }
    let t0 = par.vertex_parameter();
    let scale = par.derivative(t0).norm() / par.w.norm();
    let tangents = [-1.0, 0.0, 1.0, 2.0].map(|k| par.tangent(t0 + scale * k));
    let [Some(t0l), Some(t1l), Some(t2l), Some(t3l)] = tangents else {
        return Err(GeometryError::DegenerateParabola);
    };
    let tl = [t0l, t1l, t2l, t3l];
    let vertex = |i: usize, j: usize| tl[i].intersect(&tl[j]).ok_or(GeometryError::DegenerateParabola);
    let circle = |i: usize, j: usize, k: usize| -> Result<(Vec2, f64), GeometryError> {
        circumcircle(vertex(i, j)?, vertex(j, k)?, vertex(i, k)?).ok_or(GeometryError::DegenerateParabola)
    };
    // Triangles {0,1,2}, {0,1,3}, {0,2,3}; each pair shares two tangents and
    // hence one vertex. Two circles through that vertex meet again at the
    // mirror image across the line of centres, which is the focus.
    let circles = [circle(0, 1, 2)?.0, circle(0, 1, 3)?.0, circle(0, 2, 3)?.0];
    let pairs = [
        ((0, 1), vertex(0, 1)?),
        ((0, 2), vertex(0, 2)?),
        ((1, 2), vertex(0, 3)?),
    ];
    let mut focus = Vec2::ZERO;
    for ((i, j), shared) in pairs {
        let centres =
            Line::through(circles[i], circles[j] - circles[i]).ok_or(GeometryError::DegenerateParabola)?;
        focus += centres.reflect(shared);
    }
    let focus = focus * (1.0 / 3.0);
    let (d1, d2) = (tl[0].reflect(focus), tl[2].reflect(focus));
    let directrix = Line::through(d1, d2 - d1).ok_or(GeometryError::DegenerateParabola)?;
    Ok((focus, directrix))
}

/// Zero set of the Jacobian, when it is a genuine line.
fn jacobian_line(f: &BiAffineMap) -> Option<Line> {
    let (bd, dc, cb) = fold_dets(f);
    let scale = f.b.norm().max(f.c.norm()) * f.d.norm();
    if bd.abs().max(dc.abs()) <= PARALLEL_EPS * scale {
        return None;
    }
    Line::new(bd, dc, cb)
}

/// True iff the Jacobian does not change sign on the open unit square. For a
/// non-degenerate map that is exactly "the folding line misses the interior".
/// Affine maps are proper by convention; line-range maps never are.
pub fn is_proper(f: &BiAffineMap) -> bool {
    match classify(f, PARALLEL_EPS) {
        DegeneracyClass::Affine => true,
        DegeneracyClass::LineRange => false,
        DegeneracyClass::PointFold | DegeneracyClass::NonDegenerate => {
            let Some(line) = jacobian_line(f) else {
                return false;
            };
            let tol = PARALLEL_EPS * (1.0 + line.gamma.abs());
            let signs = Quad::UNIT.corners().map(|p| line.residual(p));
            let pos = signs.iter().any(|&s| s > tol);
            let neg = signs.iter().any(|&s| s < -tol);
            !(pos && neg)
        }
    }
}

/// Numerically stable real roots of `a·t² + b·t + c = 0`.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let mut disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        if disc >= -1e-12 * (b * b + (4.0 * a * c).abs()) {
            disc = 0.0;
        } else {
            return Vec::new();
        }
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    [q / a, c / q].into_iter().filter(|r| r.is_finite()).collect()
}

/// Pre-image in the unit square of `target` under a proper map.
pub fn invert_on_quad(f: &BiAffineMap, target: Vec2, tol: f64) -> Result<Vec2, GeometryError> {
    let q = target - f.a;
    let (a_x, a_y) = (f.d.cross(f.b), f.d.cross(f.c));
    let mut candidates = Vec::with_capacity(2);
    if a_x.abs() >= a_y.abs() {
        // cross(q − c·y, b + d·y) = 0
        let roots = quadratic_roots(a_y, q.cross(f.d) - f.c.cross(f.b), q.cross(f.b));
        for y in roots {
            let col = f.b + f.d * y;
            if col.norm_sq() > 0.0 {
                candidates.push(Vec2::new((q - f.c * y).dot(col) / col.norm_sq(), y));
            }
        }
    } else {
        // cross(q − b·x, c + d·x) = 0
        let roots = quadratic_roots(a_x, q.cross(f.d) - f.b.cross(f.c), q.cross(f.c));
        for x in roots {
            let col = f.c + f.d * x;
            if col.norm_sq() > 0.0 {
                candidates.push(Vec2::new(x, (q - f.b * x).dot(col) / col.norm_sq()));
            }
        }
    }
    if candidates.is_empty() {
        // Affine fallback: drop the bilinear term.
        let det = f.b.cross(f.c);
        if det.abs() <= PARALLEL_EPS * f.b.norm() * f.c.norm() {
            return Err(GeometryError::IllConditioned);
        }
        let p = Vec2::new(q.cross(f.c) / det, f.b.cross(q) / det);
        if (f.eval(p) - target).norm() > tol {
            return Err(GeometryError::IllConditioned);
        }
        candidates.push(p);
    }
    let inside = |p: &Vec2| (-tol..=1.0 + tol).contains(&p.x) && (-tol..=1.0 + tol).contains(&p.y);
    let best = candidates
        .into_iter()
        .map(|p| newton_polish(f, p, target))
        .filter(inside)
        .map(|p| (p, (f.eval(p) - target).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(GeometryError::OutsideImage)?;
    if best.1 > tol {
        return Err(GeometryError::IllConditioned);
    }
    Ok(best.0)
}

fn newton_polish(f: &BiAffineMap, mut p: Vec2, target: Vec2) -> Vec2 {
    for _ in 0..2 {
        let r = f.eval(p) - target;
        let (jx, jy) = (f.b + f.d * p.y, f.c + f.d * p.x);
        let det = jx.cross(jy);
        if det.abs() <= PARALLEL_EPS * jx.norm() * jy.norm() {
            break;
        }
        let step = Vec2::new(r.cross(jy) / det, jx.cross(r) / det);
        let next = p - step;
        if (f.eval(next) - target).norm() >= r.norm() {
            break;
        }
        p = next;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_map() -> BiAffineMap {
        BiAffineMap::new(
            Vec2::new(0.0, -1.0),
            Vec2::new(-1.0, 0.0),
            Vec2::new(0.0, -1.0),
            Vec2::new(1.0, 1.0),
        )
    }

    fn close(a: Vec2, b: Vec2, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn identity_quad() {
        let f = biaffine_from_quad(&Quad::UNIT);
        assert_eq!(f, BiAffineMap::IDENTITY);
        assert_eq!(f.eval(Vec2::new(0.3, 0.7)), Vec2::new(0.3, 0.7));
    }

    #[test]
    fn perturbed_quad_bilinear_term() {
        let q = Quad::new(
            Vec2::new(0.0, 0.0),
            Vec2::new(0.5, 0.0),
            Vec2::new(0.55, 0.5),
            Vec2::new(0.0, 0.5),
        );
        let f = q.map();
        assert!(close(f.d, Vec2::new(0.05, 0.0), 1e-15));
        for (corner, p) in Quad::UNIT.corners().iter().zip(q.corners()) {
            assert_eq!(f.eval(*corner), p);
        }
    }

    #[test]
    fn evaluate_on_doubled_parabola() {
        let f = worked_map();
        for t in [-2.0, -0.5, 0.0, 1.0, 3.0] {
            let got = f.eval(Vec2::new(t, t + 1.0));
            assert!(close(got, Vec2::new(t * t, t * t - 2.0), 1e-12));
        }
        assert_eq!(f.eval(Vec2::ZERO), f.a);
    }

    #[test]
    fn classification_table() {
        let z = Vec2::ZERO;
        let aff = BiAffineMap::new(z, Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), z);
        assert_eq!(classify(&aff, PARALLEL_EPS), DegeneracyClass::Affine);
        let line = BiAffineMap::new(z, Vec2::new(1.0, 1.0), Vec2::new(2.0, 2.0), Vec2::new(1.0, 1.0));
        assert_eq!(classify(&line, PARALLEL_EPS), DegeneracyClass::LineRange);
        let point = BiAffineMap::new(z, Vec2::new(2.0, 2.0), Vec2::new(0.0, 1.0), Vec2::new(1.0, 1.0));
        assert_eq!(classify(&point, PARALLEL_EPS), DegeneracyClass::PointFold);
        assert_eq!(
            classify(&worked_map(), PARALLEL_EPS),
            DegeneracyClass::NonDegenerate
        );
    }

    #[test]
    fn folding_line_is_antidiagonal() {
        let l = folding_line(&worked_map()).unwrap();
        let expected = Line::new(1.0, 1.0, 1.0).unwrap();
        assert!(l.approx_eq(&expected, 1e-15), "{l}");
        assert_eq!(
            folding_line(&BiAffineMap::IDENTITY),
            Err(GeometryError::DegenerateMap(DegeneracyClass::Affine))
        );
    }

    #[test]
    fn fold_of_origin() {
        let f = worked_map();
        let p = fold_point(&f, Vec2::ZERO).unwrap();
        assert!(close(p, Vec2::new(1.0, 1.0), 1e-15));
        assert!(close(f.eval(p), Vec2::new(0.0, -1.0), 1e-15));
        let on = Vec2::new(0.3, 0.7);
        assert!(close(fold_point(&f, on).unwrap(), on, 1e-15));
    }

    #[test]
    fn point_fold_is_rejected() {
        let z = Vec2::ZERO;
        let point = BiAffineMap::new(z, Vec2::new(2.0, 2.0), Vec2::new(0.0, 1.0), Vec2::new(1.0, 1.0));
        assert_eq!(
            fold_point(&point, Vec2::ZERO),
            Err(GeometryError::DegenerateMap(DegeneracyClass::PointFold))
        );
    }

    #[test]
    fn line_image_of_diagonal_shift_doubles_back() {
        let f = worked_map();
        let l = Line::new(-1.0, 1.0, 1.0).unwrap();
        let p = line_image(&f, &l);
        assert!(p.is_degenerate(PARALLEL_EPS));
        for t in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            assert!(close(p.point(t), Vec2::new(t * t, t * t - 2.0), 1e-12));
        }
        assert_eq!(line_image(&f, &Line::horizontal(0.4)).w, Vec2::ZERO);
        assert_eq!(line_image(&f, &Line::vertical(-3.0)).w, Vec2::ZERO);
    }

    #[test]
    fn folding_parabola_is_image_of_folding_line() {
        let f = worked_map();
        let par = folding_parabola(&f).unwrap();
        assert!(!par.is_degenerate(PARALLEL_EPS));
        for x in [-1.0, 0.0, 0.25, 2.0] {
            assert!(close(par.point(x), f.eval(Vec2::new(x, 1.0 - x)), 1e-14));
        }
    }

    #[test]
    fn folding_parabola_tangent_direction() {
        // Central difference against c + d·x.
        let f = worked_map();
        let par = folding_parabola(&f).unwrap();
        let h = 1e-5;
        for x in [-1.5, 0.0, 0.7, 1.0] {
            let fd = (par.point(x + h) - par.point(x - h)) * (0.5 / h);
            let dir = f.c + f.d * x;
            assert!(fd.cross(dir).abs() < 1e-8 * fd.norm() * dir.norm());
        }
    }

    #[test]
    fn tangent_matches_axis_line_images() {
        let f = worked_map();
        let a = Vec2::new(0.3, 0.7);
        let t = tangent_at(&f, a).unwrap();
        for par in [
            line_image(&f, &Line::vertical(a.x)),
            line_image(&f, &Line::horizontal(a.y)),
        ] {
            for s in [-2.0, 0.0, 1.0, 5.0] {
                assert!(t.distance(par.point(s)) < 1e-12);
            }
        }
        let (qa, qb, qc) = folding_parabola(&f).unwrap().line_quadratic(&t);
        assert!((qb * qb - 4.0 * qa * qc).abs() < 1e-9);
        assert_eq!(
            tangent_at(&f, Vec2::new(0.0, 0.0)),
            Err(GeometryError::NotOnFoldingLine)
        );
    }

    #[test]
    fn tangent_construction_of_origin() {
        let f = worked_map();
        let p = image_via_tangents(&f, Vec2::ZERO).unwrap();
        assert!(close(p, Vec2::new(0.0, -1.0), 1e-12));
        assert_eq!(
            image_via_tangents(&f, Vec2::new(0.5, 0.5)),
            Err(GeometryError::OnFoldingLine)
        );
    }

    #[test]
    fn standard_parabola_focus() {
        let par = Parabola::new(Vec2::ZERO, Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0));
        let (focus, dir) = focus_directrix(&par).unwrap();
        assert!(close(focus, Vec2::new(0.0, 0.25), 1e-12));
        assert!(dir.approx_eq(&Line::horizontal(-0.25), 1e-12));
    }

    #[test]
    fn circumcircle_of_tangent_triangle() {
        // Tangents of y = x² at t = -1, 0, 1 are y = -2x - 1, y = 0, y = 2x - 1.
        let (c, r) = circumcircle(Vec2::new(-0.5, 0.0), Vec2::new(0.5, 0.0), Vec2::new(0.0, -1.0)).unwrap();
        assert!(close(c, Vec2::new(0.0, -0.375), 1e-15));
        assert!((r - 0.625).abs() < 1e-15);
        assert!((c.dist(Vec2::new(0.0, 0.25)) - r).abs() < 1e-15);
    }

    #[test]
    fn degenerate_parabola_has_no_focus() {
        let par = Parabola::new(Vec2::ZERO, Vec2::new(1.0, 1.0), Vec2::new(2.0, 2.0));
        assert_eq!(focus_directrix(&par), Err(GeometryError::DegenerateParabola));
    }

    #[test]
    fn properness() {
        assert!(!is_proper(&worked_map()));
        assert!(is_proper(&BiAffineMap::IDENTITY));
        // Folding line x + y = 5.
        let far = BiAffineMap::new(
            Vec2::ZERO,
            Vec2::new(0.0, 5.0),
            Vec2::new(5.0, 0.0),
            Vec2::new(-1.0, -1.0),
        );
        let l = folding_line(&far).unwrap();
        assert!(l.approx_eq(&Line::new(1.0, 1.0, 5.0).unwrap(), 1e-12), "{l}");
        assert!(is_proper(&far));
    }

    #[test]
    fn inversion() {
        let t = Vec2::new(0.3, 0.7);
        assert!(close(
            invert_on_quad(&BiAffineMap::IDENTITY, t, 1e-12).unwrap(),
            t,
            1e-15
        ));
        let q = Quad::new(
            Vec2::new(0.0, 0.0),
            Vec2::new(0.5, 0.0),
            Vec2::new(0.55, 0.5),
            Vec2::new(0.0, 0.5),
        );
        let f = q.map();
        let x = Vec2::new(0.8, 0.1);
        assert!(close(invert_on_quad(&f, f.eval(x), 1e-9).unwrap(), x, 1e-12));
        assert_eq!(
            invert_on_quad(&f, Vec2::new(3.0, 3.0), 1e-9),
            Err(GeometryError::OutsideImage)
        );
    }
}
