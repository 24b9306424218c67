//! Fixtures shared by the benchmarks.

use nalgebra::{Matrix3, Vector3};
use wulffcap::capillary::{CapillaryCap, CapillaryParams};
use wulffcap::surface::{perturb_capillary, PerturbationMode, PerturbedChart};
use wulffcap::Anisotropy;

pub fn families() -> Vec<(&'static str, Anisotropy<3>)> {
    vec![
        ("isotropic", Anisotropy::isotropic()),
        ("quadratic", Anisotropy::quadratic_gauge(Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 2.0))).unwrap()),
        ("linear", Anisotropy::linear_perturbation(Vector3::new(2.0, 1.0, 2.0) / 3.0, 0.1).unwrap()),
        ("p4", Anisotropy::smoothed_p_norm(4.0, 0.25).unwrap()),
    ]
}

/// The perturbed cap used throughout the test matrix.
pub fn perturbed_cap(f: &Anisotropy<3>, omega0: f64) -> (CapillaryParams<3>, PerturbedChart<3, CapillaryCap<3>>) {
    let params = CapillaryParams::new(f, omega0).unwrap();
    let cap = CapillaryCap::new(f, omega0, 1.0, Vector3::zeros()).unwrap();
    (params, perturb_capillary(cap, 0.05, PerturbationMode::default()).unwrap())
}
