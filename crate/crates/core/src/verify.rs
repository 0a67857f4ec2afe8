//! Seeded property suites over the geometry, contraction, section and
//! homeomorphism layers. Each property reports a measured value against a
//! bound so the CLI can print one machine-readable line per property.

use std::f64::consts::SQRT_2;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::contractivity::{check_contraction, lipschitz_brute};
use crate::geometry::{
    biaffine_from_quad, focus_directrix, fold_point, folding_line, image_via_tangents, invert_on_quad,
    BiAffineMap, Quad, Vec2,
};
use crate::homeo::{homeo_eval, roundtrip_report};
use crate::ifs::{IfsSpec, UNIT_CENTER};
use crate::sections::{
    build_partition, dual_graph, matches_grid, top_mask, verify_section, verify_shift_invariance,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
}

impl PropertyResult {
    /// Passes when `value ≤ bound`.
    pub fn at_most(name: &'static str, value: f64, bound: f64) -> Self {
        PropertyResult {
            name,
            passed: value <= bound,
            value,
            bound,
        }
    }

    pub fn holds(name: &'static str, ok: bool) -> Self {
        PropertyResult {
            name,
            passed: ok,
            value: if ok { 0.0 } else { 1.0 },
            bound: 0.0,
        }
    }
}

impl fmt::Display for PropertyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} value={:.9} bound={:.9}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.value,
            self.bound
        )
    }
}

/// Seeded generators shared by the suites, tests and benches.
pub mod random {
    use super::*;
    use crate::contractivity::ContractReport;
    use crate::geometry::Parabola;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn vec_in(rng: &mut impl Rng, lo: f64, hi: f64) -> Vec2 {
        Vec2::new(rng.random_range(lo..hi), rng.random_range(lo..hi))
    }

    pub fn unit_point(rng: &mut impl Rng) -> Vec2 {
        Vec2::new(rng.random(), rng.random())
    }

    /// Coefficients in `[-1, 1]²` with both fold determinants at least 0.1 in
    /// magnitude, so the fold and folding line are well conditioned.
    pub fn non_degenerate_map(rng: &mut impl Rng) -> BiAffineMap {
        loop {
            let f = BiAffineMap::new(
                vec_in(rng, -1.0, 1.0),
                vec_in(rng, -1.0, 1.0),
                vec_in(rng, -1.0, 1.0),
                vec_in(rng, -1.0, 1.0),
            );
            if f.b.cross(f.d).abs() >= 0.1 && f.d.cross(f.c).abs() >= 0.1 {
                return f;
            }
        }
    }

    /// A unit-square point at least `margin` away from the folding line.
    pub fn point_off_fold(rng: &mut impl Rng, f: &BiAffineMap, margin: f64) -> Vec2 {
        let line = folding_line(f).expect("non-degenerate map");
        loop {
            let p = unit_point(rng);
            if line.distance(p) >= margin {
                return p;
            }
        }
    }

    /// Parabola `u + v·t + w·t²` with `|v × w| ≥ 0.1`.
    pub fn parabola(rng: &mut impl Rng) -> Parabola {
        loop {
            let p = Parabola::new(
                vec_in(rng, -1.0, 1.0),
                vec_in(rng, -1.0, 1.0),
                vec_in(rng, -1.0, 1.0),
            );
            if p.v.cross(p.w).abs() >= 0.1 {
                return p;
            }
        }
    }

    /// A jittered, rotated, shrunken copy of the unit square placed inside it.
    pub fn shrunken_quad(rng: &mut impl Rng) -> Quad {
        let scale = rng.random_range(0.2..0.7);
        let (s, c) = rng.random_range(0.0..std::f64::consts::TAU).sin_cos();
        let centre = vec_in(rng, 0.3, 0.7);
        Quad::from_corners(Quad::UNIT.corners().map(|p| {
            let q = (p - UNIT_CENTER) * scale + vec_in(rng, -0.12, 0.12);
            centre + Vec2::new(c * q.x - s * q.y, s * q.x + c * q.y)
        }))
    }

    /// A shrunken quad for which the contraction theorem applies.
    pub fn theorem_quad(rng: &mut impl Rng) -> (Quad, ContractReport) {
        loop {
            let q = shrunken_quad(rng);
            let r = check_contraction(&q);
            if r.theorem_applies() {
                return (q, r);
            }
        }
    }
}

/// Focus of `u + v·t + w·t²` from its vertex and focal length.
pub fn analytic_focus(p: &crate::geometry::Parabola) -> Vec2 {
    let t0 = -p.v.dot(p.w) / (2.0 * p.w.norm_sq());
    let speed = p.derivative(t0).norm();
    let focal = speed * speed / (4.0 * p.w.norm());
    p.point(t0) + p.w * (focal / p.w.norm())
}

pub fn geometry_suite(samples: usize, seed: u64) -> Vec<PropertyResult> {
    let mut rng = random::rng(seed);
    let mut corner_err = 0f64;
    let mut fold_err = 0f64;
    let mut involution_err = 0f64;
    let mut tangent_err = 0f64;
    let mut failures = 0usize;
    for _ in 0..samples {
        let f = random::non_degenerate_map(&mut rng);
        let q = f.corner_images();
        let g = biaffine_from_quad(&q);
        corner_err = corner_err
            .max((g.a - f.a).norm())
            .max((g.b - f.b).norm())
            .max((g.c - f.c).norm())
            .max((g.d - f.d).norm());
        let p = random::point_off_fold(&mut rng, &f, 0.05);
        match fold_point(&f, p).and_then(|ps| Ok((ps, fold_point(&f, ps)?))) {
            Ok((ps, pss)) => {
                fold_err = fold_err.max(f.eval(p).dist(f.eval(ps)));
                involution_err = involution_err.max(pss.dist(p));
            }
            Err(_) => failures += 1,
        }
        match image_via_tangents(&f, p) {
            Ok(y) => tangent_err = tangent_err.max(y.dist(f.eval(p))),
            Err(_) => failures += 1,
        }
    }
    let mut focus_err = 0f64;
    let mut directrix_err = 0f64;
    for _ in 0..samples {
        let par = random::parabola(&mut rng);
        match focus_directrix(&par) {
            Ok((focus, directrix)) => {
                focus_err = focus_err.max(focus.dist(analytic_focus(&par)));
                for t in [-1.0, 0.0, 0.5, 2.0] {
                    let x = par.point(t);
                    directrix_err = directrix_err.max((x.dist(focus) - directrix.distance(x)).abs());
                }
            }
            Err(_) => failures += 1,
        }
    }
    let mut invert_err = 0f64;
    for _ in 0..samples {
        let (q, _) = random::theorem_quad(&mut rng);
        let f = q.map();
        let p = random::unit_point(&mut rng);
        match invert_on_quad(&f, f.eval(p), 1e-8) {
            Ok(back) => invert_err = invert_err.max(back.dist(p)),
            Err(_) => failures += 1,
        }
    }
    vec![
        PropertyResult::at_most("corner_interpolation", corner_err, 1e-12),
        PropertyResult::at_most("fold_symmetry", fold_err, 1e-9),
        PropertyResult::at_most("fold_involution", involution_err, 1e-9),
        PropertyResult::at_most("tangent_intersection", tangent_err, 1e-8),
        PropertyResult::at_most("lambert_focus", focus_err, 1e-7),
        PropertyResult::at_most("focus_directrix_equidistance", directrix_err, 1e-7),
        PropertyResult::at_most("inversion_round_trip", invert_err, 1e-8),
        PropertyResult::at_most("construction_failures", failures as f64, 0.0),
    ]
}

/// Per-map bounds of `spec` checked against sampling, plus random quads for
/// which the corner inequalities hold.
pub fn contraction_suite(spec: &IfsSpec, samples: usize, seed: u64) -> Vec<PropertyResult> {
    let pairs = 20_000;
    let mut gap = f64::NEG_INFINITY;
    for (i, q) in spec.quads().iter().enumerate() {
        let r = check_contraction(q);
        gap = gap.max(lipschitz_brute(q, pairs, seed.wrapping_add(i as u64)) - r.lipschitz_bound);
    }
    let mut rng = random::rng(seed);
    let mut worst_brute = 0f64;
    let mut worst_gap = f64::NEG_INFINITY;
    let mut bound_vs_smin = f64::NEG_INFINITY;
    for k in 0..samples {
        let (q, r) = random::theorem_quad(&mut rng);
        let brute = lipschitz_brute(&q, pairs, seed ^ (k as u64).wrapping_mul(0x9E37_79B9));
        worst_brute = worst_brute.max(brute);
        worst_gap = worst_gap.max(brute - r.lipschitz_bound);
        bound_vs_smin = bound_vs_smin.max(r.side_max.max(r.diag_max / SQRT_2) - r.lipschitz_bound);
    }
    let certified = spec.contraction_factor().is_some();
    vec![
        PropertyResult::at_most("spec_bound_dominates_sampling", gap, 1e-6),
        PropertyResult::holds("spec_certified", certified),
        PropertyResult::at_most("theorem_quads_contract", worst_brute, 1.0 - f64::EPSILON),
        PropertyResult::at_most("theorem_quads_bound_dominates_sampling", worst_gap, 1e-6),
        PropertyResult::at_most("side_lower_bound", bound_vs_smin, 1e-12),
    ]
}

pub fn section_suite(spec: &IfsSpec, samples: usize, depth: usize, seed: u64) -> Vec<PropertyResult> {
    let mask = top_mask(spec);
    let mut rng = random::rng(seed);
    let xs: Vec<Vec2> = (0..samples).map(|_| random::unit_point(&mut rng)).collect();
    let sec = verify_section(spec, &mask, &xs, depth, 1e-9);
    let shift = verify_shift_invariance(spec, &mask, &xs, depth.min(12), 1e-9);
    let mut out = vec![
        PropertyResult {
            name: "section_identity",
            passed: sec.passed,
            value: sec.max_deviation,
            bound: sec.bound,
        },
        PropertyResult::at_most("section_inversion_failures", sec.inversion_failures as f64, 0.0),
        PropertyResult::at_most("shift_invariance_mismatches", shift.mismatches as f64, 0.0),
    ];
    match build_partition(spec, 2) {
        Ok(p) => {
            out.push(PropertyResult::holds("partition_tiles", p.tiles));
            out.push(PropertyResult::holds("partition_nested", p.nested));
            if spec.len() == 4 {
                let g = dual_graph(&p);
                out.push(PropertyResult::holds("dual_graph_is_grid", matches_grid(&p, &g)));
            }
        }
        Err(_) => out.push(PropertyResult::holds("partition_built", false)),
    }
    out
}

pub fn homeo_suite(f: &IfsSpec, g: &IfsSpec, samples: usize, depth: usize, seed: u64) -> Vec<PropertyResult> {
    let (Some(_), Some(sg)) = (f.contraction_factor(), g.contraction_factor()) else {
        return vec![PropertyResult::holds("both_certified", false)];
    };
    let mask_f = top_mask(f);
    let mask_g = top_mask(g);
    let mut rng = random::rng(seed);
    let mut identity_err = 0f64;
    let mut failures = 0usize;
    for _ in 0..samples {
        let x = random::unit_point(&mut rng);
        match homeo_eval(g, &mask_g, g, x, depth) {
            Ok((y, _)) => identity_err = identity_err.max(y.dist(x)),
            Err(_) => failures += 1,
        }
    }
    let err_g = SQRT_2 * sg.powi(depth as i32);
    let mut corner_err = 0f64;
    for c in Quad::UNIT.corners() {
        match homeo_eval(f, &mask_f, g, c, depth) {
            Ok((y, _)) => corner_err = corner_err.max(y.dist(c)),
            Err(_) => failures += 1,
        }
    }
    let mut edge_err = 0f64;
    for k in 0..=samples.min(64) {
        let x = Vec2::new(k as f64 / samples.min(64) as f64, 0.0);
        match homeo_eval(f, &mask_f, g, x, depth) {
            Ok((y, _)) => edge_err = edge_err.max(y.y.abs()),
            Err(_) => failures += 1,
        }
    }
    let mut out = vec![
        PropertyResult::at_most("identity_law", identity_err, err_g + 1e-9),
        PropertyResult::at_most("corners_fixed", corner_err, err_g + 1e-9),
        PropertyResult::at_most("bottom_edge_preserved", edge_err, err_g + 1e-9),
    ];
    match roundtrip_report(f, g, samples, depth, seed) {
        Ok(r) => {
            failures += r.failures;
            out.push(PropertyResult::at_most("round_trip", r.max_error, r.bound + 1e-9));
        }
        Err(_) => out.push(PropertyResult::holds("round_trip", false)),
    }
    out.push(PropertyResult::at_most(
        "evaluation_failures",
        failures as f64,
        0.0,
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Parabola;
    use crate::ifs::{expand_shorthand, Shorthand};

    #[test]
    fn analytic_focus_of_unit_parabola() {
        let p = Parabola::new(Vec2::ZERO, Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0));
        assert!(analytic_focus(&p).dist(Vec2::new(0.0, 0.25)) < 1e-15);
        // Reparametrized t -> 2t + 1 traces the same curve.
        let q = Parabola::new(Vec2::new(1.0, 1.0), Vec2::new(2.0, 4.0), Vec2::new(0.0, 4.0));
        assert!(analytic_focus(&q).dist(Vec2::new(0.0, 0.25)) < 1e-15);
    }

    #[test]
    fn suites_pass_on_reference_systems() {
        for r in geometry_suite(200, 1) {
            assert!(r.passed, "{r}");
        }
        let f = expand_shorthand(Shorthand::centered());
        let g = expand_shorthand(Shorthand::with_center(Vec2::new(0.55, 0.5)));
        for r in contraction_suite(&f, 20, 1)
            .into_iter()
            .chain(section_suite(&f, 200, 20, 1))
            .chain(homeo_suite(&f, &g, 100, 20, 1))
        {
            assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn display_is_one_line() {
        let r = PropertyResult::at_most("x", 0.5, 1.0);
        assert_eq!(r.to_string(), "x PASS value=0.500000000 bound=1.000000000");
    }
}
