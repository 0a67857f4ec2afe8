//! Bi-affine iterated function systems on the unit square: folding geometry,
//! contraction certificates, attractors, masks and sections, and the fractal
//! homeomorphisms they induce between images.

pub mod contractivity;
pub mod geometry;
pub mod homeo;
pub mod ifs;
pub mod image;
pub mod io;
pub mod sections;
pub mod verify;

pub use contractivity::{check_contraction, lipschitz_bound, lipschitz_brute, ContractReport};
pub use geometry::{BiAffineMap, DegeneracyClass, GeometryError, Line, Parabola, Quad, Vec2};
pub use homeo::{transform_image, Direction, HomeoConfig, HomeoError, Transformed};
pub use ifs::{expand_shorthand, Address, IfsError, IfsSpec, PointSet, Shorthand, UNIT_CENTER};
pub use image::{Image, Sampling};
pub use io::{IoError, SpecFile};
pub use sections::{itinerary, top_mask, Mask, SectionError};
