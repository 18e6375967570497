pub mod bound;
pub mod channels;
pub mod error;
pub mod experiments;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod noise;
pub mod random;
pub mod tomography;

pub use error::{Error, Result};
