//! Shared fixtures for the criterion benches.

use biaffine_core::{expand_shorthand, IfsSpec, Image, Quad, Shorthand, Vec2};

pub fn centered() -> IfsSpec {
    expand_shorthand(Shorthand::centered())
}

pub fn perturbed() -> IfsSpec {
    expand_shorthand(Shorthand::with_center(Vec2::new(0.55, 0.5)))
}

pub fn perturbed_quad() -> Quad {
    Quad::new(
        Vec2::new(0.0, 0.0),
        Vec2::new(0.5, 0.0),
        Vec2::new(0.55, 0.5),
        Vec2::new(0.0, 0.5),
    )
}

/// Smooth RGB gradient.
pub fn gradient(width: usize, height: usize) -> Image {
    Image::from_fn(width, height, |p| {
        [
            (p.x * 255.0) as u8,
            (p.y * 255.0) as u8,
            ((p.x + p.y) * 127.5) as u8,
        ]
    })
    .expect("non-empty image")
}

/// Points on a regular grid strictly inside the unit square.
pub fn sample_points(n: usize) -> Vec<Vec2> {
    (0..n * n)
        .map(|i| {
            Vec2::new(
                ((i % n) as f64 + 0.5) / n as f64,
                ((i / n) as f64 + 0.5) / n as f64,
            )
        })
        .collect()
}
