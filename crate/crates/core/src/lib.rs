//! Numerical verification of integral identities for anisotropic capillary
//! hypersurfaces in the half-space.

pub mod anisotropy;
pub mod capillary;
pub mod error;
pub mod flows;
pub mod integrals;
pub mod linalg;
pub mod quadrature;
pub mod report;
pub mod sphere;
pub mod surface;

pub use anisotropy::{Anisotropy, DualGaugeResult, Family, FamilyKind, Jet};
pub use capillary::{CapillaryCap, CapillaryParams, WulffShape};
pub use error::{Error, Result};
pub use linalg::{Matrix, Tensor3, Vector};
pub use report::{ConvergenceRow, VerificationReport};
pub use surface::{Chart, MeshSpectrum, QuadratureMesh, Resolution};
