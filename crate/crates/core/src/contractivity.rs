//! Contractivity of quad-defined bi-affine maps on the unit square.
//!
//! Three independent numbers are produced for each map:
//! * `s_min`, the smallest `s` meeting the side / diagonal / incident-sum
//!   inequalities on the corner quadrilateral;
//! * `lipschitz_bound`, a closed-form bound from the corner-rectangle ratios;
//! * `lipschitz_brute`, a seeded sampling estimate used as an oracle.

use std::f64::consts::SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::geometry::{classify, is_proper, DegeneracyClass, Quad, Vec2, PARALLEL_EPS};
use crate::ifs::IfsSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractReport {
    pub side_max: f64,
    pub diag_max: f64,
    pub incident_max: f64,
    pub s_min: f64,
    pub lipschitz_bound: f64,
    pub lipschitz_brute: Option<f64>,
    pub proper: bool,
    pub degeneracy: DegeneracyClass,
}

impl ContractReport {
    /// The corner inequalities hold with some `s < 1` on a proper,
    /// non-degenerate map.
    pub fn theorem_applies(&self) -> bool {
        self.s_min < 1.0 && self.proper && self.degeneracy == DegeneracyClass::NonDegenerate
    }

    /// The map is a contraction on the unit square with factor
    /// `lipschitz_bound`.
    pub fn certified(&self) -> bool {
        self.lipschitz_bound < 1.0
    }
}

pub fn check_contraction(q: &Quad) -> ContractReport {
    let p = q.corners();
    let mut side_max = 0f64;
    let mut diag_max = 0f64;
    let mut incident_max = 0f64;
    for i in 0..4 {
        let (prev, cur, next) = (p[(i + 3) % 4], p[i], p[(i + 1) % 4]);
        side_max = side_max.max(next.dist(cur));
        incident_max = incident_max.max((next + prev - cur * 2.0).norm());
    }
    for i in 0..2 {
        diag_max = diag_max.max(p[i + 2].dist(p[i]));
    }
    let f = q.map();
    ContractReport {
        side_max,
        diag_max,
        incident_max,
        s_min: side_max.max(diag_max / SQRT_2).max(incident_max / SQRT_2),
        lipschitz_bound: lipschitz_bound(q),
        lipschitz_brute: None,
        proper: is_proper(&f),
        degeneracy: classify(&f, PARALLEL_EPS),
    }
}

pub fn check_contraction_with_brute(q: &Quad, n_pairs: usize, seed: u64) -> ContractReport {
    ContractReport {
        lipschitz_brute: Some(lipschitz_brute(q, n_pairs, seed)),
        ..check_contraction(q)
    }
}

/// `sup |u + r·v|² / (1 + r²)` over `r ∈ [lo, hi]` (`hi` may be infinite).
///
/// The quotient is a Rayleigh quotient of the Gram matrix of `(u, v)`, so its
/// unconstrained maximum is the top eigenvalue; on an interval that misses
/// the maximizing direction the supremum sits at an endpoint.
pub(crate) fn ratio_sup(u: Vec2, v: Vec2, lo: f64, hi: f64) -> f64 {
    let (uu, uv, vv) = (u.norm_sq(), u.dot(v), v.norm_sq());
    let at = |r: f64| {
        if r.is_infinite() {
            vv
        } else {
            (uu + 2.0 * r * uv + r * r * vv) / (1.0 + r * r)
        }
    };
    let mid = 0.5 * (uu + vv);
    let lambda = mid + (0.25 * (uu - vv).powi(2) + uv * uv).sqrt();
    let (e1, e2) = if (lambda - uu).abs() > (lambda - vv).abs() {
        (uv, lambda - uu)
    } else {
        (lambda - vv, uv)
    };
    if e1 == 0.0 && e2 == 0.0 {
        // Isotropic: the quotient is constant.
        return lambda;
    }
    let r_star = if e1 == 0.0 { f64::INFINITY } else { e2 / e1 };
    let inside = if r_star.is_infinite() {
        hi.is_infinite()
    } else {
        lo <= r_star && r_star <= hi
    };
    if inside {
        lambda
    } else {
        at(lo).max(at(hi))
    }
}

/// Upper bound on the Lipschitz constant of the quad's map on the unit square.
///
/// The worst ratio `|f(p) − f(p')| / |p − p'|` is attained with `p, p'`
/// spanning a rectangle that shares a vertex with the square. At the
/// lower-left vertex with `r = Δy/Δx` the squared ratio is one of
/// `|b + r·c|²`, `|b + r·c + r·d|²`, `|b − r·c|²` (all over `1 + r²`), plus
/// `|b + r·c + d|² / (1 + r²)` for `r ≥ 1` where `Δy` saturates at 1. The other
/// three vertices are handled by rotating the quad.
pub fn lipschitz_bound(q: &Quad) -> f64 {
    let mut best = 0f64;
    for k in 0..4 {
        let f = q.rotated(k).map();
        let (b, c, d) = (f.b, f.c, f.d);
        best = best
            .max(ratio_sup(b, c, 0.0, f64::INFINITY))
            .max(ratio_sup(b, c + d, 0.0, f64::INFINITY))
            .max(ratio_sup(b, -c, 0.0, f64::INFINITY))
            .max(ratio_sup(b + d, c, 1.0, f64::INFINITY));
    }
    best.sqrt()
}

/// Largest sampled ratio `|f(p) − f(p')| / |p − p'|` over `n_pairs` seeded
/// uniform pairs in the unit square. The sample stream depends only on
/// `seed`, so larger `n_pairs` extend the same sample set.
pub fn lipschitz_brute(q: &Quad, n_pairs: usize, seed: u64) -> f64 {
    let f = q.map();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0f64;
    for _ in 0..n_pairs {
        let p = Vec2::new(rng.random(), rng.random());
        let p2 = Vec2::new(rng.random(), rng.random());
        let den = p.dist(p2);
        if den > 0.0 {
            best = best.max(f.eval(p).dist(f.eval(p2)) / den);
        }
    }
    best
}

pub fn check_ifs(spec: &IfsSpec) -> Vec<ContractReport> {
    spec.quads().iter().map(check_contraction).collect()
}

pub fn ifs_certified(reports: &[ContractReport]) -> bool {
    reports.iter().all(ContractReport::certified)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(p: [(f64, f64); 4]) -> Quad {
        Quad::from_corners(p.map(|(x, y)| Vec2::new(x, y)))
    }

    fn quadrant() -> Quad {
        quad([(0.0, 0.0), (0.5, 0.0), (0.5, 0.5), (0.0, 0.5)])
    }

    fn perturbed() -> Quad {
        quad([(0.0, 0.0), (0.5, 0.0), (0.55, 0.5), (0.0, 0.5)])
    }

    #[test]
    fn quadrant_report() {
        let r = check_contraction(&quadrant());
        assert!((r.side_max - 0.5).abs() < 1e-15);
        assert!((r.diag_max - SQRT_2 / 2.0).abs() < 1e-15);
        assert!((r.incident_max - SQRT_2 / 2.0).abs() < 1e-15);
        assert!((r.s_min - 0.5).abs() < 1e-15);
        assert_eq!(r.degeneracy, DegeneracyClass::Affine);
        assert!(!r.theorem_applies());
        assert!(r.certified());
        assert!((r.lipschitz_bound - 0.5).abs() < 1e-15);
    }

    #[test]
    fn perturbed_report() {
        // Binding term: incident sum at p2, |(-0.6, -0.5)| / √2.
        let r = check_contraction(&perturbed());
        let expected = (0.6f64 * 0.6 + 0.5 * 0.5).sqrt() / SQRT_2;
        assert!((r.s_min - expected).abs() < 1e-15);
        assert!((r.s_min - 0.5523).abs() < 1e-4);
        assert!(r.lipschitz_bound >= lipschitz_brute(&perturbed(), 20_000, 3) - 1e-6);
    }

    #[test]
    fn identity_is_not_a_contraction() {
        let r = check_contraction(&Quad::UNIT);
        assert_eq!(r.s_min, 1.0);
        assert_eq!(r.lipschitz_bound, 1.0);
        assert!(!r.certified());
        let brute = lipschitz_brute(&Quad::UNIT, 1000, 0);
        assert!(brute <= 1.0 + 1e-12 && brute > 0.999);
    }

    #[test]
    fn ratio_sup_matches_grid() {
        let cases = [
            (Vec2::new(0.5, 0.0), Vec2::new(0.0, 0.5)),
            (Vec2::new(0.3, -0.2), Vec2::new(0.1, 0.4)),
            (Vec2::new(-0.4, 0.1), Vec2::new(0.6, 0.2)),
            (Vec2::new(0.0, 0.0), Vec2::new(0.2, 0.0)),
        ];
        for (u, v) in cases {
            for (lo, hi) in [(0.0f64, f64::INFINITY), (1.0, f64::INFINITY), (0.0, 1.0)] {
                let mut grid = 0f64;
                for i in 0..=200_000 {
                    // θ ∈ [atan lo, atan hi]
                    let (t0, t1) = (lo.atan(), hi.atan());
                    let th = t0 + (t1 - t0) * (i as f64 / 200_000.0);
                    let (s, c) = th.sin_cos();
                    grid = grid.max((u * c + v * s).norm_sq());
                }
                let got = ratio_sup(u, v, lo, hi);
                assert!(
                    (got - grid).abs() < 1e-9,
                    "{u:?} {v:?} [{lo},{hi}]: {got} vs {grid}"
                );
            }
        }
    }

    #[test]
    fn brute_is_deterministic_and_monotone() {
        let q = perturbed();
        assert_eq!(lipschitz_brute(&q, 500, 9), lipschitz_brute(&q, 500, 9));
        assert!(lipschitz_brute(&q, 5000, 9) >= lipschitz_brute(&q, 500, 9));
    }

    #[test]
    fn corner_inequalities_admit_an_expanding_map() {
        // |b| = 0.99, |c| = 0.8, b·c = 0.15: sides, diagonals and incident sums
        // all stay under their limits with s < 1, but the derivative at the
        // origin, the matrix [b c], has operator norm above 1.
        let b = Vec2::new(0.99, 0.0);
        let cx = 0.15 / 0.99;
        let c = Vec2::new(cx, (0.64 - cx * cx).sqrt());
        let d = Vec2::new(0.0, 0.02);
        let q = Quad::new(Vec2::ZERO, b, b + c + d, c);
        let r = check_contraction(&q);
        assert!(r.s_min < 1.0, "{r:?}");
        assert!(r.proper);
        assert_eq!(r.degeneracy, DegeneracyClass::NonDegenerate);
        assert!(r.theorem_applies());
        let f = q.map();
        let ratio = (0..=90)
            .map(|k| {
                let (sn, cs) = (k as f64).to_radians().sin_cos();
                let p = Vec2::new(cs, sn) * 1e-4;
                f.eval(p).dist(f.eval(Vec2::ZERO)) / p.norm()
            })
            .fold(0.0, f64::max);
        assert!(ratio > 1.01, "{ratio}");
        assert!(r.lipschitz_bound >= ratio);
        assert!(!r.certified());
    }

    #[test]
    fn s_min_is_rigid_invariant() {
        let q = perturbed();
        let (s, c) = 0.7f64.sin_cos();
        let moved = Quad::from_corners(
            q.corners()
                .map(|p| Vec2::new(c * p.x - s * p.y + 3.0, s * p.x + c * p.y - 1.0)),
        );
        assert!((check_contraction(&moved).s_min - check_contraction(&q).s_min).abs() < 1e-14);
    }
}
