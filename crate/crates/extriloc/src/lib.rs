pub mod error;
pub mod linalg;
pub mod quiver;
pub mod backend;
pub mod subcat;
pub mod relative;
pub mod instances;
pub mod localization;
pub mod heart;

pub use error::{Error, Result};
