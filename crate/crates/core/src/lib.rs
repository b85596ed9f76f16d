//! Circulant L-ensembles on the circle and their limits.

pub mod error;
pub mod exact_finite;
pub mod fredholm;
pub mod model;
pub mod quad;
pub mod sampler;
pub mod spectral_limits;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
