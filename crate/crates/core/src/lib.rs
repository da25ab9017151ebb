//! Query-optimal estimation of an unknown unitary from black-box access.

pub mod bootstrap;
pub mod eigenphase;
pub mod error;
pub mod hard_instances;
pub mod linalg;
pub mod metrics;
pub mod oracle;
pub mod process_tomography;
pub mod state_tomography;

pub use error::{Error, Result};
pub use linalg::{AntiHermitianGenerator, CMatrix, CVector, UnitaryEigensystem, UnitaryMatrix, C64};
