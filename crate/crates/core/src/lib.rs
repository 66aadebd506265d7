pub mod error;
pub mod expr;
pub mod checks;
pub mod classify;
pub mod conformal;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod registry;
pub mod report;
pub mod sampling;
pub mod tensor;

pub use error::{Error, GeometryError, Result};
