pub mod error;
pub mod fft;
pub mod fixtures;
pub mod image;
pub mod plane;
pub mod pooling;
pub mod pyramid;
pub mod statistics;

pub use crate::error::{Error, Result};
pub use crate::plane::{ComplexPlane, Plane};
