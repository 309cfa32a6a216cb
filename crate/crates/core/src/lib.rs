//! Mutual information of continuous-aperture and discrete line-array
//! transceivers over the scalar free-space Green's-function channel.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod models;
pub mod physics;
pub mod spectra;

pub use error::{Error, Result};
pub use models::{Channel, MiResult, ModelTag, NoiseControl};
pub use physics::SystemConfig;
pub use spectra::{HermitianKernelMatrix, QuadratureGrid, SpectralResult};
