//! Fractal homeomorphisms `h = π_G ∘ τ_F` between two four-map systems, and
//! their action on images, `h(c) = c ∘ h`.

use std::f64::consts::SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::Vec2;
use crate::ifs::{coding_point, IfsSpec, UNIT_CENTER};
use crate::image::{Image, Rgb, Sampling};
use crate::sections::{itinerary, top_mask, Mask, SectionError};

/// Fraction of pixels allowed to fall back to the identity colour.
pub const PIXEL_FAILURE_BUDGET: f64 = 1e-3;

const MAX_AUTO_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HomeoError {
    #[error("{0} system is not certified contractive")]
    NotCertified(&'static str),
    #[error("systems have {0} and {1} maps")]
    MapCountMismatch(usize, usize),
    #[error("{failed} of {total} pixels could not be mapped")]
    PixelBudget { failed: usize, total: usize },
    #[error(transparent)]
    Section(#[from] SectionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    /// `h = π_G ∘ τ_F`.
    #[default]
    Forward,
    /// `h⁻¹ = π_F ∘ τ_G`.
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HomeoConfig {
    /// Itinerary length; `None` picks the half-pixel depth.
    pub depth: Option<usize>,
    pub sampling: Sampling,
    pub direction: Direction,
}

/// `(π_G(τ_F(x)|depth), √2·s_G^depth)`; the address is evaluated at the
/// centre of the square.
pub fn homeo_eval(
    f: &IfsSpec,
    mask_f: &Mask,
    g: &IfsSpec,
    x: Vec2,
    depth: usize,
) -> Result<(Vec2, f64), SectionError> {
    let sigma = itinerary(f, mask_f, x, depth)?;
    Ok(coding_point(g, &sigma, UNIT_CENTER))
}

/// Smallest `n` with `√2·s^n < 0.5 / max(width, height)`.
pub fn auto_depth(s: f64, width: usize, height: usize) -> usize {
    let target = 0.5 / width.max(height) as f64;
    (1..=MAX_AUTO_DEPTH)
        .find(|&n| SQRT_2 * s.powi(n as i32) < target)
        .unwrap_or(MAX_AUTO_DEPTH)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transformed {
    pub image: Image,
    pub depth: usize,
    pub err_bound: f64,
    /// Pixels that kept their own colour because no itinerary was found.
    pub failed_pixels: usize,
}

fn check_pair(f: &IfsSpec, g: &IfsSpec) -> Result<(f64, f64), HomeoError> {
    if f.len() != g.len() {
        return Err(HomeoError::MapCountMismatch(f.len(), g.len()));
    }
    let sf = f.contraction_factor().ok_or(HomeoError::NotCertified("source"))?;
    let sg = g.contraction_factor().ok_or(HomeoError::NotCertified("target"))?;
    Ok((sf, sg))
}

/// Output colour at `x` is the source colour at `h(x)`.
pub fn transform_image(
    c: &Image,
    f: &IfsSpec,
    g: &IfsSpec,
    cfg: HomeoConfig,
) -> Result<Transformed, HomeoError> {
    let (src, dst) = match cfg.direction {
        Direction::Forward => (f, g),
        Direction::Inverse => (g, f),
    };
    let (_, s_dst) = check_pair(src, dst)?;
    let (w, h) = (c.width(), c.height());
    let depth = cfg.depth.unwrap_or_else(|| auto_depth(s_dst, w, h));
    let mask = top_mask(src);
    let rows: Vec<(Vec<Rgb>, usize)> = (0..h)
        .into_par_iter()
        .map(|row| {
            let mut failed = 0;
            let line = (0..w)
                .map(|col| {
                    let x = c.pixel_center(col, row);
                    let hx = homeo_eval(src, &mask, dst, x, depth).or_else(|_| {
                        // Nudge off a region edge and retry once.
                        let inward = x + (UNIT_CENTER - x) * 1e-9;
                        homeo_eval(src, &mask, dst, inward, depth)
                    });
                    match hx {
                        Ok((y, _)) => c.sample(y, cfg.sampling),
                        Err(_) => {
                            failed += 1;
                            c.get(col, row)
                        }
                    }
                })
                .collect();
            (line, failed)
        })
        .collect();
    let failed_pixels: usize = rows.iter().map(|r| r.1).sum();
    let total = w * h;
    if failed_pixels as f64 > PIXEL_FAILURE_BUDGET * total as f64 {
        return Err(HomeoError::PixelBudget {
            failed: failed_pixels,
            total,
        });
    }
    let pixels = rows.into_iter().flat_map(|r| r.0).collect();
    Ok(Transformed {
        image: Image::from_pixels(w, h, pixels).expect("dimensions preserved"),
        depth,
        err_bound: SQRT_2 * s_dst.powi(depth as i32),
        failed_pixels,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundTripReport {
    pub samples: usize,
    pub depth: usize,
    pub max_error: f64,
    pub mean_error: f64,
    /// `2·√2·max(s_F, s_G)^depth`.
    pub bound: f64,
    pub failures: usize,
}

/// Statistics of `|h⁻¹(h(x)) − x|` over seeded uniform samples.
pub fn roundtrip_report(
    f: &IfsSpec,
    g: &IfsSpec,
    n_samples: usize,
    depth: usize,
    seed: u64,
) -> Result<RoundTripReport, HomeoError> {
    let (sf, sg) = check_pair(f, g)?;
    let (mf, mg) = (top_mask(f), top_mask(g));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<Vec2> = (0..n_samples)
        .map(|_| Vec2::new(rng.random(), rng.random()))
        .collect();
    let errs: Vec<Option<f64>> = xs
        .par_iter()
        .map(|&x| {
            let (y, _) = homeo_eval(f, &mf, g, x, depth).ok()?;
            let (z, _) = homeo_eval(g, &mg, f, y, depth).ok()?;
            Some(z.dist(x))
        })
        .collect();
    let ok: Vec<f64> = errs.iter().flatten().copied().collect();
    Ok(RoundTripReport {
        samples: n_samples,
        depth,
        max_error: ok.iter().copied().fold(0.0, f64::max),
        mean_error: if ok.is_empty() {
            0.0
        } else {
            ok.iter().sum::<f64>() / ok.len() as f64
        },
        bound: 2.0 * SQRT_2 * sf.max(sg).powi(depth as i32),
        failures: n_samples - ok.len(),
    })
}
