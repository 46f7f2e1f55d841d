pub mod cli;
pub mod error;
pub mod exec;
pub mod hull;
pub mod hypgeom;
pub mod metric;
pub mod shear;
pub mod surface;
pub mod traintrack;

pub use error::{Error, Result};
