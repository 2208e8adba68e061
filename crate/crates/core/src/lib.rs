//! Classical-quantum multiple-access channel toolkit: quantum linear
//! algebra, one-shot entropies, distribution splitting, channel models,
//! secrecy rate regions and Monte-Carlo covering experiments.

pub mod channel;
pub mod error;
pub mod mc;
pub mod oneshot;
pub mod qla;
pub mod random;
pub mod regions;
pub mod split;

pub use error::{Error, ErrorClass, Result};
pub use qla::{CMatrix, DensityMatrix};

// links the system BLAS/LAPACK used by the SDP solver
use openblas_src as _;
