//! Image files by extension: `.ppm` / `.pgm` natively, `.png` through the
//! `image` crate.

use std::path::Path;

use biaffine_core::io::{decode_ppm, encode_pgm, encode_ppm, write_bytes, IoError};
use biaffine_core::Image;

#[derive(Debug, thiserror::Error)]
pub enum ImageFileError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}: {1}")]
    Png(String, image::ImageError),
    #[error("{0}: unsupported extension (use .ppm, .pgm or .png)")]
    Extension(String),
}

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase()
}

pub fn read_image(path: &Path) -> Result<Image, ImageFileError> {
    match extension(path).as_str() {
        "ppm" | "pgm" | "pnm" => {
            let bytes = std::fs::read(path).map_err(|source| IoError::File {
                path: path.display().to_string(),
                source,
            })?;
            Ok(decode_ppm(&bytes)?)
        }
        "png" => {
            let png = image::open(path)
                .map_err(|e| ImageFileError::Png(path.display().to_string(), e))?
                .into_rgb8();
            let (w, h) = (png.width() as usize, png.height() as usize);
            let pixels = png.pixels().map(|p| p.0).collect();
            Ok(Image::from_pixels(w, h, pixels).map_err(IoError::from)?)
        }
        _ => Err(ImageFileError::Extension(path.display().to_string())),
    }
}

pub fn write_image(path: &Path, img: &Image) -> Result<(), ImageFileError> {
    match extension(path).as_str() {
        "ppm" => Ok(write_bytes(path, &encode_ppm(img))?),
        "pgm" => Ok(write_bytes(path, &encode_pgm(img))?),
        "png" => {
            let raw: Vec<u8> = img.pixels().iter().flatten().copied().collect();
            image::save_buffer(
                path,
                &raw,
                img.width() as u32,
                img.height() as u32,
                image::ColorType::Rgb8,
            )
            .map_err(|e| ImageFileError::Png(path.display().to_string(), e))
        }
        _ => Err(ImageFileError::Extension(path.display().to_string())),
    }
}
