//! Integral functionals over quadrature meshes: enclosed volume, the
//! structural identity, Minkowski formulas and Heintze-Karcher functionals.
//!
//! Relative residuals are normalized by the sum of the absolute integrals of
//! the individual terms, so identities whose integrand vanishes pointwise
//! still get a meaningful scale.

use crate::anisotropy::Anisotropy;
use crate::capillary::CapillaryParams;
use crate::error::{Error, Result};
use crate::linalg::{pairwise_sum, pairwise_sum_vec, vertical, Vector};
use crate::report::{ConvergenceRow, VerificationReport};
use crate::sphere;
use crate::surface::{boundary_capillary_values, MeshSpectrum, QuadratureMesh, Resolution};

/// Boundary values of `<Φ(ν), -E>` must match ω₀ to this before an identity
/// that assumes the capillary condition is certified.
pub const CAPILLARY_CERTIFICATION: f64 = 1e-8;

/// Default equality tolerance for Heintze-Karcher ratios.
pub const HK_EQUALITY_TOLERANCE: f64 = 1e-6;

fn integrate<const D: usize>(mesh: &QuadratureMesh<D>, f: impl Fn(usize) -> f64) -> f64 {
    pairwise_sum(&(0..mesh.interior.len()).map(|i| f(i) * mesh.interior[i].weight).collect::<Vec<_>>())
}

fn integrate_boundary<const D: usize>(mesh: &QuadratureMesh<D>, f: impl Fn(usize) -> f64) -> f64 {
    pairwise_sum(&(0..mesh.boundary.len()).map(|j| f(j) * mesh.boundary[j].node.weight).collect::<Vec<_>>())
}

/// `|Ω| = (1/(n+1)) ∫ <x, ν> dA`; the wetting face contributes nothing.
pub fn enclosed_volume<const D: usize>(mesh: &QuadratureMesh<D>) -> Result<f64> {
    let v = integrate(mesh, |i| mesh.interior[i].x.dot(&mesh.interior[i].nu)) / D as f64;
    if !(v > 0.0) {
        return Err(Error::Orientation(format!("enclosed volume {v} is not positive")));
    }
    Ok(v)
}

/// `n ∫ ν dA - ∫_{∂Σ} (<x,µ> ν - <x,ν> µ) ds`; on closed meshes `∫ ν dA`.
pub fn structural_residual<const D: usize>(mesh: &QuadratureMesh<D>, tolerance: f64) -> VerificationReport {
    let n = (D - 1) as f64;
    let lhs = pairwise_sum_vec(&mesh.interior.iter().map(|p| p.nu * (n * p.weight)).collect::<Vec<_>>());
    let rhs = pairwise_sum_vec(
        &mesh
            .boundary
            .iter()
            .map(|b| (b.node.nu * b.node.x.dot(&b.mu) - b.mu * b.node.x.dot(&b.node.nu)) * b.node.weight)
            .collect::<Vec<_>>(),
    );
    let scale = n * mesh.area()
        + integrate_boundary(mesh, |j| {
            let b = &mesh.boundary[j];
            b.node.x.dot(&b.mu).abs() + b.node.x.dot(&b.node.nu).abs()
        });
    let diff = lhs - rhs;
    let mut report = VerificationReport::new("structural", diff.norm(), scale, tolerance)
        .with_resolution(&mesh.resolution)
        .with_value("absolute_residual", diff.norm());
    for k in 0..D {
        report.set(&format!("lhs_{k}"), lhs[k]);
        report.set(&format!("rhs_{k}"), rhs[k]);
    }
    report
}

fn certify_capillary<const D: usize>(f: &Anisotropy<D>, params: &CapillaryParams<D>, mesh: &QuadratureMesh<D>, report: &mut VerificationReport) {
    if mesh.boundary.is_empty() {
        return;
    }
    let values = boundary_capillary_values(f, mesh);
    let drift = (values.max - params.omega0).abs().max((values.min - params.omega0).abs());
    report.set("boundary_capillary_drift", drift);
    if drift > CAPILLARY_CERTIFICATION {
        report.fail_with(format!("hypothesis violated: boundary capillary drift {drift:e} exceeds {CAPILLARY_CERTIFICATION:e}"));
    }
}

/// `∫ [H_{r-1} (F(ν) + ω₀<ν,E^F>) - H_r <x,ν>] dA`.
pub fn minkowski_residual<const D: usize>(
    f: &Anisotropy<D>,
    params: &CapillaryParams<D>,
    mesh: &QuadratureMesh<D>,
    spectrum: &MeshSpectrum<D>,
    r: usize,
    tolerance: f64,
) -> Result<VerificationReport> {
    let n = D - 1;
    if r < 1 || r > n {
        return Err(Error::invalid(format!("Minkowski order r = {r} outside 1..={n}")));
    }
    let first = |i: usize| spectrum.interior[i].mean[r - 1] * params.weight(f, &mesh.interior[i].nu);
    let second = |i: usize| spectrum.interior[i].mean[r] * mesh.interior[i].x.dot(&mesh.interior[i].nu);
    let a = integrate(mesh, first);
    let b = integrate(mesh, second);
    let residual = integrate(mesh, |i| first(i) - second(i));
    let scale = integrate(mesh, |i| first(i).abs()) + integrate(mesh, |i| second(i).abs());
    let mut report = VerificationReport::new(format!("minkowski_r{r}"), residual, scale, tolerance)
        .with_resolution(&mesh.resolution)
        .with_value("order", r as f64)
        .with_value("weighted_term", a)
        .with_value("support_term", b);
    certify_capillary(f, params, mesh, &mut report);
    Ok(report)
}

fn hk_core<const D: usize>(
    name: &str,
    f: &Anisotropy<D>,
    omega0: f64,
    reference: &Vector<D>,
    mesh: &QuadratureMesh<D>,
    spectrum: &MeshSpectrum<D>,
    tolerance: f64,
    equality_tolerance: f64,
) -> Result<VerificationReport> {
    let bad: Vec<usize> = (0..mesh.interior.len()).filter(|&i| !(spectrum.interior[i].hf > 0.0)).collect();
    if !bad.is_empty() {
        return Err(Error::HypothesisViolation {
            detail: format!("anisotropic mean curvature is not positive at {} nodes", bad.len()),
            nodes: bad,
        });
    }
    let n = (D - 1) as f64;
    let lhs = integrate(mesh, |i| {
        let nu = &mesh.interior[i].nu;
        (f.value(nu) + omega0 * nu.dot(reference)) / spectrum.interior[i].hf
    });
    let volume = enclosed_volume(mesh)?;
    let rhs = (n + 1.0) / n * volume;
    let ratio = lhs / rhs;
    let min_hf = spectrum.interior.iter().map(|s| s.hf).fold(f64::INFINITY, f64::min);
    Ok(VerificationReport::new(name, (rhs - lhs).max(0.0), rhs, tolerance)
        .with_resolution(&mesh.resolution)
        .with_value("lhs", lhs)
        .with_value("rhs", rhs)
        .with_value("volume", volume)
        .with_value("ratio", ratio)
        .with_value("margin", ratio - 1.0)
        .with_value("min_mean_curvature", min_hf)
        .with_value("equality", if (ratio - 1.0).abs() <= equality_tolerance { 1.0 } else { 0.0 }))
}

/// Heintze-Karcher functional `∫ (F(ν) + ω₀<ν,E^F>)/H^F dA` against
/// `((n+1)/n) |Ω|`.
///
/// Fails with a hypothesis violation if `H^F ≤ 0` at any node; a boundary
/// value `ω(x) > ω₀` is recorded as a warning and fails the report.
pub fn hk_report<const D: usize>(
    f: &Anisotropy<D>,
    params: &CapillaryParams<D>,
    mesh: &QuadratureMesh<D>,
    spectrum: &MeshSpectrum<D>,
    tolerance: f64,
) -> Result<VerificationReport> {
    let mut report = hk_core("hk", f, params.omega0, &params.e_f, mesh, spectrum, tolerance, HK_EQUALITY_TOLERANCE)?;
    if !mesh.boundary.is_empty() {
        let values = boundary_capillary_values(f, mesh);
        report.set("boundary_max_omega", values.max);
        if values.max > params.omega0 + CAPILLARY_CERTIFICATION {
            report.fail_with(format!(
                "hypothesis violated: boundary value {} exceeds omega0 = {}",
                values.max, params.omega0
            ));
        }
    }
    Ok(report)
}

/// Experimental variant of [`hk_report`] with `E_{n+1}` in place of `E^F_{n+1}`.
/// Diagnostic only.
pub fn hk_report_vertical<const D: usize>(
    f: &Anisotropy<D>,
    params: &CapillaryParams<D>,
    mesh: &QuadratureMesh<D>,
    spectrum: &MeshSpectrum<D>,
    tolerance: f64,
) -> Result<VerificationReport> {
    hk_core("hk_vertical", f, params.omega0, &vertical::<D>(), mesh, spectrum, tolerance, HK_EQUALITY_TOLERANCE)
}

/// Closed-surface inequality `∫ F(ν)/H^F dA ≥ ((n+1)/n)|Ω| + max{0, max_e ∫ <ν,Φ(e)>/H^F dA}`.
///
/// The inner maximum over `e` uses a spiral design of `direction_samples`
/// points followed by 50 projected-gradient ascent steps.
pub fn hk_closed_report<const D: usize>(
    f: &Anisotropy<D>,
    mesh: &QuadratureMesh<D>,
    spectrum: &MeshSpectrum<D>,
    direction_samples: usize,
    tolerance: f64,
) -> Result<VerificationReport> {
    if !mesh.closed {
        return Err(Error::invalid("hk-closed needs a closed mesh"));
    }
    let report = hk_core("hk_closed", f, 0.0, &vertical::<D>(), mesh, spectrum, tolerance, HK_EQUALITY_TOLERANCE)?;
    let weighted = pairwise_sum_vec(
        &(0..mesh.interior.len())
            .map(|i| mesh.interior[i].nu * (mesh.interior[i].weight / spectrum.interior[i].hf))
            .collect::<Vec<_>>(),
    );
    let (extra, direction) = maximize_over_directions(f, &weighted, direction_samples.max(1));
    let extra = extra.max(0.0);
    let lhs = report.value("lhs").unwrap_or(0.0);
    let volume_term = report.value("rhs").unwrap_or(0.0);
    let rhs = volume_term + extra;
    let ratio = lhs / rhs;
    let mut out = VerificationReport::new("hk_closed", (rhs - lhs).max(0.0), rhs, tolerance)
        .with_resolution(&mesh.resolution)
        .with_value("lhs", lhs)
        .with_value("volume_term", volume_term)
        .with_value("extra_term", extra)
        .with_value("rhs", rhs)
        .with_value("ratio", ratio)
        .with_value("margin", ratio - 1.0)
        .with_value("equality", if (ratio - 1.0).abs() <= HK_EQUALITY_TOLERANCE { 1.0 } else { 0.0 });
    for k in 0..D {
        out.set(&format!("direction_{k}"), direction[k]);
    }
    if let Some(v) = report.value("volume") {
        out.set("volume", v);
    }
    Ok(out)
}

/// `max_e <V, Φ(e)>` by sampling then ascent; returns the value and `e`.
pub fn maximize_over_directions<const D: usize>(f: &Anisotropy<D>, v: &Vector<D>, samples: usize) -> (f64, Vector<D>) {
    let objective = |e: &Vector<D>| v.dot(&f.gradient(e));
    let mut best = vertical::<D>();
    let mut best_value = f64::NEG_INFINITY;
    for e in sphere::spiral_design::<D>(samples) {
        let value = objective(&e);
        if value > best_value {
            best_value = value;
            best = e;
        }
    }
    let mut step = 0.1;
    for _ in 0..50 {
        let grad = f.jet(&best).hessian * v;
        let tangential = grad - best * best.dot(&grad);
        if tangential.norm() <= 1e-15 * v.norm().max(1e-300) {
            break;
        }
        let mut improved = false;
        for _ in 0..30 {
            let trial = (best + tangential * (step / tangential.norm().max(1e-300))).normalize();
            let value = objective(&trial);
            if value > best_value {
                best = trial;
                best_value = value;
                step *= 1.5;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (best_value, best)
}

/// `∫ [n F(ν) - H^F <x,ν>] dA - ∫_{∂Σ} [F(ν)<x,µ> - <x,ν><ν_F,µ>] ds`.
pub fn first_variation_identity_residual<const D: usize>(
    f: &Anisotropy<D>,
    mesh: &QuadratureMesh<D>,
    spectrum: &MeshSpectrum<D>,
    tolerance: f64,
) -> VerificationReport {
    let n = (D - 1) as f64;
    let a = |i: usize| n * f.value(&mesh.interior[i].nu);
    let b = |i: usize| spectrum.interior[i].hf * mesh.interior[i].x.dot(&mesh.interior[i].nu);
    let c = |j: usize| {
        let p = &mesh.boundary[j];
        f.value(&p.node.nu) * p.node.x.dot(&p.mu)
    };
    let d = |j: usize| {
        let p = &mesh.boundary[j];
        p.node.x.dot(&p.node.nu) * f.gradient(&p.node.nu).dot(&p.mu)
    };
    let lhs = integrate(mesh, |i| a(i) - b(i));
    let rhs = integrate_boundary(mesh, |j| c(j) - d(j));
    let scale = integrate(mesh, |i| a(i).abs() + b(i).abs()) + integrate_boundary(mesh, |j| c(j).abs() + d(j).abs());
    VerificationReport::new("first_variation", lhs - rhs, scale, tolerance)
        .with_resolution(&mesh.resolution)
        .with_value("lhs", lhs)
        .with_value("rhs", rhs)
}

/// Runs `check` at each resolution and attaches a convergence table to the
/// report of the finest level.
///
/// With `min_reduction = Some(q)` the study fails unless every doubling
/// reduces the relative residual by at least `q`; levels already at the
/// rounding floor (`floor`) are exempt.
pub fn refinement_study(
    levels: &[Resolution],
    dimension: usize,
    min_reduction: Option<f64>,
    floor: f64,
    mut check: impl FnMut(Resolution) -> Result<VerificationReport>,
) -> Result<VerificationReport> {
    if levels.is_empty() {
        return Err(Error::invalid("refinement study needs at least one resolution"));
    }
    let mut rows = Vec::with_capacity(levels.len());
    let mut last = None;
    for &level in levels {
        let report = check(level)?;
        rows.push(ConvergenceRow {
            resolution: level.as_vec(dimension),
            residual: report.residual,
            relative_residual: report.relative_residual,
        });
        last = Some(report);
    }
    let mut report = last.expect("nonempty levels");
    report.convergence = rows;
    if let Some(q) = min_reduction {
        let rows = report.convergence.clone();
        for w in rows.windows(2) {
            let (coarse, fine) = (w[0].relative_residual, w[1].relative_residual);
            if fine <= floor && coarse <= floor {
                continue;
            }
            if !(coarse >= q * fine) {
                report.fail_with(format!(
                    "residual fell only from {coarse:e} to {fine:e} between {:?} and {:?}",
                    w[0].resolution, w[1].resolution
                ));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capillary::{build_wulff_cap, build_wulff_shape};
    use crate::surface::spectra;
    use nalgebra::Vector3;
    use std::f64::consts::PI;

    #[test]
    fn hemisphere_examples() {
        let f = Anisotropy::<3>::isotropic();
        let params = CapillaryParams::new(&f, 0.0).unwrap();
        let (_, mesh) = build_wulff_cap(&f, 0.0, 1.0, Vector3::zeros(), Resolution::square(32)).unwrap();
        let spec = spectra(&f, &mesh).unwrap();
        assert!((enclosed_volume(&mesh).unwrap() - 2.0 * PI / 3.0).abs() < 1e-10);
        let s = structural_residual(&mesh, 1e-8);
        assert!(s.pass, "{s:?}");
        assert!((s.value("lhs_2").unwrap() - 2.0 * PI).abs() < 1e-10);
        let m = minkowski_residual(&f, &params, &mesh, &spec, 1, 1e-7).unwrap();
        assert!(m.residual.abs() < 1e-12 && m.pass);
        let hk = hk_report(&f, &params, &mesh, &spec, 1e-6).unwrap();
        assert!((hk.value("lhs").unwrap() - PI).abs() < 1e-10);
        assert!((hk.value("ratio").unwrap() - 1.0).abs() < 1e-10);
        let fv = first_variation_identity_residual(&f, &mesh, &spec, 1e-9);
        assert!(fv.residual.abs() < 1e-9);
    }

    #[test]
    fn sphere_closed_examples() {
        let f = Anisotropy::<3>::isotropic();
        let (_, mesh) = build_wulff_shape(&f, 1.0, Vector3::zeros(), Resolution::square(24)).unwrap();
        let spec = spectra(&f, &mesh).unwrap();
        assert!((enclosed_volume(&mesh).unwrap() - 4.0 * PI / 3.0).abs() < 1e-10);
        let s = structural_residual(&mesh, 1e-10);
        assert!(s.value("absolute_residual").unwrap() < 1e-10);
        let hk = hk_closed_report(&f, &mesh, &spec, 1024, 1e-6).unwrap();
        assert!((hk.value("lhs").unwrap() - 2.0 * PI).abs() < 1e-9);
        assert!(hk.value("extra_term").unwrap() < 1e-8);
        assert_eq!(hk.value("equality"), Some(1.0));
    }

    #[test]
    fn direction_search_finds_support_value() {
        // max over the Wulff shape of <V, u> is the support value F(V).
        let f = Anisotropy::smoothed_p_norm(4.0, 0.25).unwrap();
        let v = Vector3::new(0.3, -1.2, 0.5);
        let (value, e) = maximize_over_directions(&f, &v, 1024);
        assert!((value - f.value(&v)).abs() < 1e-10 * f.value(&v), "{value} vs {}", f.value(&v));
        assert!((e - v.normalize()).norm() < 1e-4);
    }

    #[test]
    fn minkowski_rejects_bad_order() {
        let f = Anisotropy::<3>::isotropic();
        let params = CapillaryParams::new(&f, 0.0).unwrap();
        let (_, mesh) = build_wulff_cap(&f, 0.0, 1.0, Vector3::zeros(), Resolution::square(8)).unwrap();
        let spec = spectra(&f, &mesh).unwrap();
        assert!(minkowski_residual(&f, &params, &mesh, &spec, 3, 1e-7).is_err());
        assert!(minkowski_residual(&f, &params, &mesh, &spec, 0, 1e-7).is_err());
    }
}
