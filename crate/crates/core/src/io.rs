//! JSON spec files and binary PPM/PGM images.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Quad;
use crate::ifs::{expand_shorthand, IfsError, IfsSpec, Shorthand};
use crate::image::{Image, ImageError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid spec JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("spec must contain exactly one of \"shorthand\" or \"maps\"")]
    SpecKeys,
    #[error("spec contains a non-finite number")]
    NonFinite,
    #[error(transparent)]
    Ifs(#[from] IfsError),
    #[error("malformed PPM: {0}")]
    Ppm(String),
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// On-disk form of an IFS.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecFile {
    Shorthand(Shorthand),
    Maps(Vec<Quad>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    shorthand: Option<Shorthand>,
    #[serde(skip_serializing_if = "Option::is_none")]
    maps: Option<Vec<Quad>>,
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<SpecFile, IoError> {
        let raw: RawSpec = serde_json::from_str(text)?;
        let spec = match (raw.shorthand, raw.maps) {
            (Some(sh), None) => SpecFile::Shorthand(sh),
            (None, Some(maps)) => SpecFile::Maps(maps),
            _ => return Err(IoError::SpecKeys),
        };
        if !spec.is_finite() {
            return Err(IoError::NonFinite);
        }
        Ok(spec)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<SpecFile, IoError> {
        SpecFile::parse(&read_text(path.as_ref())?)
    }

    pub fn to_json(&self) -> String {
        let raw = match self {
            SpecFile::Shorthand(sh) => RawSpec {
                shorthand: Some(*sh),
                maps: None,
            },
            SpecFile::Maps(m) => RawSpec {
                shorthand: None,
                maps: Some(m.clone()),
            },
        };
        serde_json::to_string_pretty(&raw).expect("spec serializes")
    }

    fn is_finite(&self) -> bool {
        match self {
            SpecFile::Shorthand(sh) => [sh.o, sh.q, sh.r, sh.s, sh.t].iter().all(|p| p.is_finite()),
            SpecFile::Maps(m) => m.iter().all(Quad::is_finite),
        }
    }

    pub fn to_ifs(&self) -> Result<IfsSpec, IoError> {
        Ok(match self {
            SpecFile::Shorthand(sh) => expand_shorthand(*sh),
            SpecFile::Maps(m) => IfsSpec::new(m.clone())?,
        })
    }
}

impl From<&IfsSpec> for SpecFile {
    fn from(spec: &IfsSpec) -> Self {
        match spec.shorthand() {
            Some(sh) => SpecFile::Shorthand(*sh),
            None => SpecFile::Maps(spec.quads().to_vec()),
        }
    }
}

pub fn read_spec(path: impl AsRef<Path>) -> Result<IfsSpec, IoError> {
    SpecFile::read(path)?.to_ifs()
}

fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn encode_ppm(img: &Image) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.reserve(3 * img.pixels().len());
    for px in img.pixels() {
        out.extend_from_slice(px);
    }
    out
}

/// Rec. 601 luma.
fn gray(px: [u8; 3]) -> u8 {
    ((299 * px[0] as u32 + 587 * px[1] as u32 + 114 * px[2] as u32 + 500) / 1000) as u8
}

pub fn encode_pgm(img: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.pixels().iter().map(|&p| gray(p)));
    out
}

/// Reads binary P6 (maxval 255) or P5, the latter expanded to grey RGB.
/// Header comments are accepted.
pub fn decode_ppm(bytes: &[u8]) -> Result<Image, IoError> {
    let bad = |m: &str| IoError::Ppm(m.to_string());
    let mut pos = 0;
    let mut token = || -> Result<String, IoError> {
        loop {
            match bytes.get(pos) {
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(_) => break,
                None => return Err(bad("truncated header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(|b| !b.is_ascii_whitespace()) {
            pos += 1;
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    let magic = token()?;
    let channels = match magic.as_str() {
        "P6" => 3,
        "P5" => 1,
        _ => return Err(bad("expected P6 or P5")),
    };
    let mut num = || -> Result<usize, IoError> { token()?.parse().map_err(|_| bad("bad header number")) };
    let (w, h, maxval) = (num()?, num()?, num()?);
    if maxval != 255 {
        return Err(bad("only maxval 255 is supported"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    let data = bytes.get(pos + 1..).ok_or_else(|| bad("missing raster"))?;
    let need = w
        .checked_mul(h)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| bad("size overflow"))?;
    if data.len() < need {
        return Err(bad("truncated raster"));
    }
    let pixels = if channels == 3 {
        data[..need].chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect()
    } else {
        data[..need].iter().map(|&g| [g, g, g]).collect()
    };
    Ok(Image::from_pixels(w, h, pixels)?)
}

pub fn read_ppm(path: impl AsRef<Path>) -> Result<Image, IoError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })?;
    decode_ppm(&bytes)
}

pub fn write_bytes(path: impl AsRef<Path>, bytes: &[u8]) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, bytes).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use proptest::prelude::*;

    #[test]
    fn parses_both_forms() {
        let sh = SpecFile::parse(
            r#"{"shorthand": {"O":[0.5,0.5],"Q":[0.5,0],"R":[1,0.5],"S":[0.5,1],"T":[0,0.5]}}"#,
        )
        .unwrap();
        assert_eq!(sh, SpecFile::Shorthand(Shorthand::centered()));
        assert_eq!(sh.to_ifs().unwrap().len(), 4);
        let maps = SpecFile::parse(
            r#"{"maps":[{"p0":[0,0],"p1":[1,0],"p2":[1,1],"p3":[0,1]},
                        {"p0":[0,0],"p1":[0.5,0],"p2":[0.5,0.5],"p3":[0,0.5]}]}"#,
        )
        .unwrap();
        assert_eq!(maps.to_ifs().unwrap().quads()[0], Quad::UNIT);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(SpecFile::parse("{"), Err(IoError::Json(_))));
        assert!(matches!(SpecFile::parse("{}"), Err(IoError::SpecKeys)));
        let both = format!(
            r#"{{"shorthand": {}, "maps": []}}"#,
            serde_json::to_string(&Shorthand::centered()).unwrap()
        );
        assert!(matches!(SpecFile::parse(&both), Err(IoError::SpecKeys)));
        let one = r#"{"maps":[{"p0":[0,0],"p1":[1,0],"p2":[1,1],"p3":[0,1]}]}"#;
        assert!(matches!(
            SpecFile::parse(one).unwrap().to_ifs(),
            Err(IoError::Ifs(IfsError::TooFewMaps(1)))
        ));
        assert!(SpecFile::parse(r#"{"maps":[{"p0":[0,1e999],"p1":[1,0],"p2":[1,1],"p3":[0,1]}]}"#).is_err());
    }

    #[test]
    fn ppm_layout() {
        let img = Image::from_pixels(2, 1, vec![[1, 2, 3], [4, 5, 6]]).unwrap();
        let bytes = encode_ppm(&img);
        assert_eq!(&bytes[..11], b"P6\n2 1\n255\n");
        assert_eq!(&bytes[11..], &[1, 2, 3, 4, 5, 6]);
        assert_eq!(decode_ppm(&bytes).unwrap(), img);
        let pgm = encode_pgm(&Image::from_pixels(2, 1, vec![[255; 3], [0; 3]]).unwrap());
        assert_eq!(pgm, b"P5\n2 1\n255\n\xff\x00");
        let grey = decode_ppm(&pgm).unwrap();
        assert_eq!(grey.pixels(), &[[255; 3], [0; 3]]);
    }

    #[test]
    fn ppm_with_comment() {
        let img = decode_ppm(b"P6\n# made by hand\n1 1\n255\n\x07\x08\x09").unwrap();
        assert_eq!(img.get(0, 0), [7, 8, 9]);
        assert!(decode_ppm(b"P6\n1 1\n255\n\x07").is_err());
        assert!(decode_ppm(b"P3\n1 1\n255\n1 2 3").is_err());
    }

    fn vec2() -> impl Strategy<Value = Vec2> {
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(x, y)| Vec2::new(x, y))
    }

    proptest! {
        #[test]
        fn shorthand_round_trip(p in proptest::array::uniform5(vec2())) {
            let spec = SpecFile::Shorthand(Shorthand { o: p[0], q: p[1], r: p[2], s: p[3], t: p[4] });
            prop_assert_eq!(SpecFile::parse(&spec.to_json()).unwrap(), spec);
        }

        #[test]
        fn maps_round_trip(qs in proptest::collection::vec(proptest::array::uniform4(vec2()), 2..6)) {
            let spec = SpecFile::Maps(qs.into_iter().map(Quad::from_corners).collect());
            prop_assert_eq!(SpecFile::parse(&spec.to_json()).unwrap(), spec);
        }

        #[test]
        fn ppm_round_trip(w in 1usize..6, h in 1usize..6, seed in any::<u8>()) {
            let img = Image::from_fn(w, h, |p| [(p.x * 255.0) as u8, (p.y * 255.0) as u8, seed]).unwrap();
            prop_assert_eq!(decode_ppm(&encode_ppm(&img)).unwrap(), img);
        }
    }
}
