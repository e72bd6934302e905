pub mod cli;
pub mod cost;
pub mod disintegration;
pub mod error;
pub mod io;
pub mod kantorovich;
pub mod matrix;
pub mod measure;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod scalar;
pub mod random;
pub mod solver;
pub mod transport_class;

pub use error::{Error, Result};
