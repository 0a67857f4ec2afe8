//! RGB images over the unit square.
//!
//! Pixel `(col, row)` has its centre at `((col + 0.5)/w, 1 − (row + 0.5)/h)`:
//! `y` points up in the square while row 0 is the top of the picture.

use thiserror::Error;

use crate::geometry::Vec2;

pub type Rgb = [u8; 3];

pub const WHITE: Rgb = [255, 255, 255];
pub const BLACK: Rgb = [0, 0, 0];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1, got {0}x{1}")]
    EmptyImage(usize, usize),
    #[error("pixel buffer has {got} entries, expected {expected}")]
    BufferSize { got: usize, expected: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    #[default]
    Nearest,
    Bilinear,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<Rgb>,
}

impl Image {
    pub fn new(width: usize, height: usize, fill: Rgb) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyImage(width, height));
        }
        Ok(Image {
            width,
            height,
            pixels: vec![fill; width * height],
        })
    }

    /// Row-major pixels, top row first.
    pub fn from_pixels(width: usize, height: usize, pixels: Vec<Rgb>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyImage(width, height));
        }
        if pixels.len() != width * height {
            return Err(ImageError::BufferSize {
                got: pixels.len(),
                expected: width * height,
            });
        }
        Ok(Image {
            width,
            height,
            pixels,
        })
    }

    /// Image whose colour at each pixel centre is `f(centre)`.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(Vec2) -> Rgb) -> Result<Self, ImageError> {
        let mut img = Image::new(width, height, BLACK)?;
        for row in 0..height {
            for col in 0..width {
                let c = f(img.pixel_center(col, row));
                img.set(col, row, c);
            }
        }
        Ok(img)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    pub fn get(&self, col: usize, row: usize) -> Rgb {
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, c: Rgb) {
        self.pixels[row * self.width + col] = c;
    }

    pub fn pixel_center(&self, col: usize, row: usize) -> Vec2 {
        Vec2::new(
            (col as f64 + 0.5) / self.width as f64,
            1.0 - (row as f64 + 0.5) / self.height as f64,
        )
    }

    /// Pixel containing `p`, clamped to the image.
    pub fn pixel_of(&self, p: Vec2) -> (usize, usize) {
        let col = (p.x * self.width as f64).floor();
        let row = ((1.0 - p.y) * self.height as f64).floor();
        (
            (col.max(0.0) as usize).min(self.width - 1),
            (row.max(0.0) as usize).min(self.height - 1),
        )
    }

    pub fn sample(&self, p: Vec2, mode: Sampling) -> Rgb {
        match mode {
            Sampling::Nearest => {
                let (c, r) = self.pixel_of(p);
                self.get(c, r)
            }
            Sampling::Bilinear => self.sample_bilinear(p),
        }
    }

    fn sample_bilinear(&self, p: Vec2) -> Rgb {
        let fx = (p.x * self.width as f64 - 0.5).clamp(0.0, (self.width - 1) as f64);
        let fy = ((1.0 - p.y) * self.height as f64 - 0.5).clamp(0.0, (self.height - 1) as f64);
        let (c0, r0) = (fx.floor() as usize, fy.floor() as usize);
        let (c1, r1) = ((c0 + 1).min(self.width - 1), (r0 + 1).min(self.height - 1));
        let (tx, ty) = (fx - c0 as f64, fy - r0 as f64);
        let (p00, p10, p01, p11) = (
            self.get(c0, r0),
            self.get(c1, r0),
            self.get(c0, r1),
            self.get(c1, r1),
        );
        std::array::from_fn(|k| {
            let top = p00[k] as f64 * (1.0 - tx) + p10[k] as f64 * tx;
            let bot = p01[k] as f64 * (1.0 - tx) + p11[k] as f64 * tx;
            (top * (1.0 - ty) + bot * ty).round().clamp(0.0, 255.0) as u8
        })
    }

    pub fn max_channel_diff(&self, other: &Image) -> Option<u8> {
        if self.width != other.width || self.height != other.height {
            return None;
        }
        self.pixels
            .iter()
            .zip(&other.pixels)
            .flat_map(|(a, b)| (0..3).map(move |k| a[k].abs_diff(b[k])))
            .max()
    }

    pub fn mean_abs_channel_diff(&self, other: &Image) -> Option<f64> {
        if self.width != other.width || self.height != other.height {
            return None;
        }
        let total: u64 = self
            .pixels
            .iter()
            .zip(&other.pixels)
            .flat_map(|(a, b)| (0..3).map(move |k| a[k].abs_diff(b[k]) as u64))
            .sum();
        Some(total as f64 / (3 * self.pixels.len()) as f64)
    }
}

/// Black points on a white background; points outside the square are dropped.
pub fn rasterize(points: &[Vec2], width: usize, height: usize) -> Result<Image, ImageError> {
    let mut img = Image::new(width, height, WHITE)?;
    for &p in points {
        if (0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y) {
            let (c, r) = img.pixel_of(p);
            img.set(c, r, BLACK);
        }
    }
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pixel_convention() {
        let img = Image::new(4, 2, BLACK).unwrap();
        assert_eq!(img.pixel_center(0, 0), Vec2::new(0.125, 0.75));
        assert_eq!(img.pixel_of(Vec2::new(0.125, 0.75)), (0, 0));
        assert_eq!(img.pixel_of(Vec2::new(1.0, 0.0)), (3, 1));
        assert_eq!(img.pixel_of(Vec2::new(-3.0, 9.0)), (0, 0));
        assert!(Image::new(0, 3, BLACK).is_err());
    }

    #[test]
    fn bilinear_reproduces_centres_and_midpoints() {
        let img = Image::from_pixels(2, 1, vec![[0, 0, 0], [200, 100, 50]]).unwrap();
        assert_eq!(
            img.sample(img.pixel_center(1, 0), Sampling::Bilinear),
            [200, 100, 50]
        );
        assert_eq!(img.sample(Vec2::new(0.5, 0.5), Sampling::Bilinear), [100, 50, 25]);
    }

    #[test]
    fn raster() {
        let img = rasterize(&[Vec2::new(0.1, 0.9), Vec2::new(2.0, 0.5)], 2, 2).unwrap();
        assert_eq!(img.pixels(), &[BLACK, WHITE, WHITE, WHITE]);
    }
}
