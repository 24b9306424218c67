//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{Matrix3, Vector2, Vector3};
use wulffcap::capillary::{admissible_range, build_wulff_shape, CapillaryCap, CapillaryParams, WulffChart, WulffShape};
use wulffcap::flows::{elliptic_check, parallel_transport_check, sweepout_check, ParallelTolerances, SweepoutOptions, DEFAULT_TIMES};
use wulffcap::integrals::{
    enclosed_volume, first_variation_identity_residual, hk_closed_report, hk_report, minkowski_residual, refinement_study, structural_residual,
};
use wulffcap::surface::{discretize, perturb_capillary, spectra, Chart, PerturbationMode, PerturbedChart, QuadratureMesh, Resolution};
use wulffcap::{Anisotropy, Error};
use wulffcap_cli::RunConfig;

type Outcome = Result<String, String>;

fn families() -> Vec<(&'static str, Anisotropy<3>)> {
    vec![
        ("isotropic", Anisotropy::isotropic()),
        ("quadratic", Anisotropy::quadratic_gauge(Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 2.0))).unwrap()),
        ("linear", Anisotropy::linear_perturbation(Vector3::new(2.0, 1.0, 2.0) / 3.0, 0.1).unwrap()),
        ("p4", Anisotropy::smoothed_p_norm(4.0, 0.25).unwrap()),
    ]
}

fn curve_families() -> Vec<(&'static str, Anisotropy<2>)> {
    vec![
        ("isotropic", Anisotropy::isotropic()),
        ("quadratic", Anisotropy::quadratic_gauge(nalgebra::Matrix2::from_diagonal(&Vector2::new(1.0, 2.0))).unwrap()),
        ("linear", Anisotropy::linear_perturbation(Vector2::new(0.6, 0.8), 0.1).unwrap()),
        ("p4", Anisotropy::smoothed_p_norm(4.0, 0.25).unwrap()),
    ]
}

const OMEGAS: [f64; 3] = [-0.4, 0.0, 0.4];
const AMPLITUDE: f64 = 0.05;

fn omegas<const D: usize>(f: &Anisotropy<D>) -> Vec<f64> {
    let range = admissible_range(f);
    OMEGAS.into_iter().filter(|w| range.contains(*w)).collect()
}

/// A capillary test surface: a Wulff cap or its perturbation.
struct Surface {
    label: String,
    f: Anisotropy<3>,
    params: CapillaryParams<3>,
    chart: Box<dyn Chart<3>>,
    perturbed: bool,
}

fn cap(f: &Anisotropy<3>, omega0: f64, r: f64) -> CapillaryCap<3> {
    CapillaryCap::new(f, omega0, r, Vector3::new(0.2, -0.1, 0.0)).unwrap()
}

fn perturbed(f: &Anisotropy<3>, omega0: f64) -> PerturbedChart<3, CapillaryCap<3>> {
    perturb_capillary(cap(f, omega0, 1.0), AMPLITUDE, PerturbationMode::default()).unwrap()
}

/// Caps (r = 1) and perturbed caps for every family and admissible ω₀.
fn test_matrix() -> Vec<Surface> {
    let mut out = Vec::new();
    for (name, f) in families() {
        for omega0 in omegas(&f) {
            let params = CapillaryParams::new(&f, omega0).unwrap();
            out.push(Surface {
                label: format!("{name} cap ω₀={omega0}"),
                f: f.clone(),
                params,
                chart: Box::new(cap(&f, omega0, 1.0)),
                perturbed: false,
            });
            out.push(Surface {
                label: format!("{name} perturbed ω₀={omega0}"),
                f: f.clone(),
                params,
                chart: Box::new(perturbed(&f, omega0)),
                perturbed: true,
            });
        }
    }
    out
}

fn fmt_err(label: &str, e: Error) -> String {
    format!("{label}: {e}")
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (name, f) in families() {
        let report = f.verify_gauge_identities(10_000, 1, 1e-8).map_err(|e| fmt_err(name, e))?;
        worst = worst.max(report.residual);
        if !report.pass {
            return Err(format!("{name}: worst violation {:e}", report.residual));
        }
    }
    let seconds = start.elapsed().as_secs_f64();
    if seconds >= 10.0 {
        return Err(format!("runtime {seconds:.1} s"));
    }
    Ok(format!("worst violation {worst:.2e}, {seconds:.2} s"))
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    let mut gap = 0.0f64;
    for (name, f) in families() {
        let report = f.angle_comparison_check(100_000, 2, 1e-12).map_err(|e| fmt_err(name, e))?;
        let violations = report.value("violations").unwrap_or(f64::NAN);
        let spurious = report.value("spurious_equalities").unwrap_or(f64::NAN);
        let equality_gap = report.value("worst_equality_gap").unwrap_or(f64::NAN);
        if !report.pass || violations != 0.0 || spurious != 0.0 || !(equality_gap <= 1e-8) {
            return Err(format!("{name}: violations {violations}, spurious equalities {spurious}, equality gap {equality_gap:e}"));
        }
        worst = worst.max(report.residual);
        gap = gap.max(equality_gap);
    }
    Ok(format!("zero violations, worst excess {worst:.2e}, equality gap {gap:.2e}"))
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    for (name, f) in families() {
        for r in [0.7, 1.0, 2.5] {
            let (_, mesh) = build_wulff_shape(&f, r, Vector3::new(0.3, -0.2, 0.1), Resolution::square(256)).map_err(|e| fmt_err(name, e))?;
            let spec = spectra(&f, &mesh).map_err(|e| fmt_err(name, e))?;
            let err = spec
                .interior
                .iter()
                .flat_map(|s| s.kappa.iter())
                .map(|k| (k - 1.0 / r).abs())
                .fold(0.0, f64::max);
            if !(err <= 1e-8) {
                return Err(format!("{name} r={r}: max |κ - 1/r| = {err:e}"));
            }
            worst = worst.max(err);
        }
    }
    Ok(format!("max |κ - 1/r| = {worst:.2e} at 256×256"))
}

fn criterion_4() -> Outcome {
    let mut worst_cap = 0.0f64;
    for (name, f) in families() {
        for omega0 in omegas(&f) {
            let params = CapillaryParams::new(&f, omega0).unwrap();
            for r in [1.0, 2.0] {
                let mesh = discretize(&cap(&f, omega0, r), Resolution::square(256)).map_err(|e| fmt_err(name, e))?;
                let spec = spectra(&f, &mesh).map_err(|e| fmt_err(name, e))?;
                for order in 1..=2 {
                    let report = minkowski_residual(&f, &params, &mesh, &spec, order, 1e-7).map_err(|e| fmt_err(name, e))?;
                    if !report.pass {
                        return Err(format!("{name} cap ω₀={omega0} r={r} order {order}: {:e}", report.relative_residual));
                    }
                    worst_cap = worst_cap.max(report.relative_residual);
                }
            }
        }
    }
    for (name, f) in curve_families() {
        for omega0 in omegas(&f) {
            let params = CapillaryParams::new(&f, omega0).unwrap();
            for r in [1.0, 2.0] {
                let chart = CapillaryCap::new(&f, omega0, r, Vector2::zeros()).map_err(|e| fmt_err(name, e))?;
                let mesh = discretize(&chart, Resolution::new(256, 1)).map_err(|e| fmt_err(name, e))?;
                let spec = spectra(&f, &mesh).map_err(|e| fmt_err(name, e))?;
                let report = minkowski_residual(&f, &params, &mesh, &spec, 1, 1e-7).map_err(|e| fmt_err(name, e))?;
                if !report.pass {
                    return Err(format!("{name} curve ω₀={omega0} r={r}: {:e}", report.relative_residual));
                }
                worst_cap = worst_cap.max(report.relative_residual);
            }
        }
    }
    let levels = [Resolution::square(16), Resolution::square(32), Resolution::square(64)];
    let mut slowest = f64::INFINITY;
    for (name, f) in families() {
        for omega0 in omegas(&f) {
            let params = CapillaryParams::new(&f, omega0).unwrap();
            let chart = perturbed(&f, omega0);
            for order in 1..=2 {
                let report = refinement_study(&levels, 2, Some(4.0), 1e-12, |res| {
                    let mesh = discretize(&chart, res)?;
                    let spec = spectra(&f, &mesh)?;
                    minkowski_residual(&f, &params, &mesh, &spec, order, 1e-7)
                })
                .map_err(|e| fmt_err(name, e))?;
                if !report.pass {
                    let rows: Vec<f64> = report.convergence.iter().map(|r| r.relative_residual).collect();
                    return Err(format!("{name} perturbed ω₀={omega0} order {order}: {rows:?} {:?}", report.warnings));
                }
                for w in report.convergence.windows(2) {
                    if w[0].relative_residual > 1e-12 {
                        slowest = slowest.min(w[0].relative_residual / w[1].relative_residual);
                    }
                }
            }
        }
    }
    Ok(format!("caps at 256: worst relative {worst_cap:.2e}; perturbed 16/32/64: slowest reduction above the 1e-12 floor {slowest:.1}"))
}

fn criterion_5() -> Outcome {
    let mut cap_dev = 0.0f64;
    let mut min_strict = f64::INFINITY;
    for s in test_matrix() {
        let mesh = discretize(&*s.chart, Resolution::square(64)).map_err(|e| fmt_err(&s.label, e))?;
        let spec = spectra(&s.f, &mesh).map_err(|e| fmt_err(&s.label, e))?;
        let report = hk_report(&s.f, &s.params, &mesh, &spec, 1e-6).map_err(|e| fmt_err(&s.label, e))?;
        let ratio = report.value("ratio").unwrap();
        if s.perturbed {
            if !(ratio >= 1.0 + 1e-4) || !report.pass {
                return Err(format!("{}: ratio {ratio}", s.label));
            }
            min_strict = min_strict.min(ratio - 1.0);
        } else {
            if !((ratio - 1.0).abs() <= 1e-6) || !report.pass {
                return Err(format!("{}: ratio {ratio}", s.label));
            }
            cap_dev = cap_dev.max((ratio - 1.0).abs());
        }
    }
    for (name, f) in curve_families() {
        for omega0 in omegas(&f) {
            let params = CapillaryParams::new(&f, omega0).unwrap();
            let chart = CapillaryCap::new(&f, omega0, 1.0, Vector2::zeros()).unwrap();
            let mesh = discretize(&chart, Resolution::new(256, 1)).map_err(|e| fmt_err(name, e))?;
            let spec = spectra(&f, &mesh).map_err(|e| fmt_err(name, e))?;
            let ratio = hk_report(&f, &params, &mesh, &spec, 1e-6).map_err(|e| fmt_err(name, e))?.value("ratio").unwrap();
            if !((ratio - 1.0).abs() <= 1e-6) {
                return Err(format!("{name} curve ω₀={omega0}: ratio {ratio}"));
            }
            cap_dev = cap_dev.max((ratio - 1.0).abs());
        }
    }
    let f = Anisotropy::<3>::isotropic();
    let params = CapillaryParams::new(&f, 0.0).unwrap();
    let dented = perturb_capillary(cap(&f, 0.0, 1.0), -0.9, PerturbationMode { frequency: 0, cutoff_power: 6 }).unwrap();
    let mesh = discretize(&dented, Resolution::square(32)).map_err(|e| fmt_err("dented", e))?;
    let spec = spectra(&f, &mesh).map_err(|e| fmt_err("dented", e))?;
    match hk_report(&f, &params, &mesh, &spec, 1e-6) {
        Err(Error::HypothesisViolation { nodes, .. }) if !nodes.is_empty() => {}
        other => return Err(format!("dented cap: expected a hypothesis violation, got {other:?}")),
    }
    Ok(format!("caps |ratio - 1| ≤ {cap_dev:.2e}; perturbed ratio - 1 ≥ {min_strict:.2e}; H^F ≤ 0 rejected"))
}

fn closed_margin(mesh: &QuadratureMesh<3>, f: &Anisotropy<3>) -> Result<(f64, f64), Error> {
    let spec = spectra(f, mesh)?;
    let report = hk_closed_report(f, mesh, &spec, 2000, 1e-6)?;
    Ok((report.value("margin").unwrap(), report.value("extra_term").unwrap()))
}

fn criterion_6() -> Outcome {
    let mut worst = (0.0f64, 0.0f64);
    for (name, f) in families() {
        let (_, mesh) = build_wulff_shape(&f, 1.2, Vector3::new(0.1, 0.2, -0.3), Resolution::square(64)).map_err(|e| fmt_err(name, e))?;
        let (margin, extra) = closed_margin(&mesh, &f).map_err(|e| fmt_err(name, e))?;
        if !(margin.abs() <= 1e-6 && extra.abs() <= 1e-8) {
            return Err(format!("{name} Wulff shape: margin {margin:e}, extra term {extra:e}"));
        }
        worst = (worst.0.max(margin.abs()), worst.1.max(extra.abs()));
    }
    // The ellipsoid with semi-axes (1, 1, 1.5) is the Wulff shape of the
    // quadratic gauge diag(1, 1, 1.5); it is measured with F ≡ 1.
    let gauge = Anisotropy::quadratic_gauge(Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 1.5))).unwrap();
    let chart = WulffChart {
        anisotropy: gauge,
        shape: WulffShape::new(Vector3::zeros(), 1.0).unwrap(),
    };
    let iso = Anisotropy::<3>::isotropic();
    let mut margins = Vec::new();
    for n in [64, 128] {
        let mesh = discretize(&chart, Resolution::square(n)).map_err(|e| fmt_err("ellipsoid", e))?;
        let volume = enclosed_volume(&mesh).map_err(|e| fmt_err("ellipsoid", e))?;
        if (volume - 2.0 * PI).abs() > 1e-8 {
            return Err(format!("ellipsoid volume {volume}"));
        }
        margins.push(closed_margin(&mesh, &iso).map_err(|e| fmt_err("ellipsoid", e))?.0);
    }
    if !(margins[0] > 0.0 && (margins[0] - margins[1]).abs() <= 1e-6) {
        return Err(format!("ellipsoid margins {margins:?}"));
    }
    Ok(format!(
        "Wulff shapes |margin| ≤ {:.2e}, extra ≤ {:.2e}; ellipsoid margin {:.6} (grids agree to {:.1e})",
        worst.0,
        worst.1,
        margins[1],
        (margins[0] - margins[1]).abs()
    ))
}

fn criterion_7() -> Outcome {
    let mut worst = [0.0f64; 3];
    for (name, f) in families() {
        for omega0 in omegas(&f) {
            let params = CapillaryParams::new(&f, omega0).unwrap();
            let report = parallel_transport_check(&f, &params, cap(&f, omega0, 1.0), Resolution::square(64), &DEFAULT_TIMES, ParallelTolerances::default())
                .map_err(|e| fmt_err(name, e))?;
            let errors = [
                report.value("curvature_error").unwrap(),
                report.value("jacobian_error").unwrap(),
                report.value("mean_curvature_error").unwrap(),
            ];
            if !(errors[0] <= 1e-7 && errors[1] <= 1e-6 && errors[2] <= 1e-7) || !report.pass {
                return Err(format!("{name} ω₀={omega0}: errors {errors:?} {:?}", report.warnings));
            }
            for k in 0..3 {
                worst[k] = worst[k].max(errors[k]);
            }
        }
    }
    Ok(format!("curvature {:.2e}, area element {:.2e}, H^F {:.2e}", worst[0], worst[1], worst[2]))
}

fn criterion_8() -> Outcome {
    let mut slowest = 0.0f64;
    let mut surfaces = 0;
    for s in test_matrix() {
        let start = Instant::now();
        let mesh = discretize(&*s.chart, Resolution::square(128)).map_err(|e| fmt_err(&s.label, e))?;
        let spec = spectra(&s.f, &mesh).map_err(|e| fmt_err(&s.label, e))?;
        let options = SweepoutOptions {
            samples: 10_000,
            seed: 3,
            ..Default::default()
        };
        let result = sweepout_check(&s.f, &s.params, &mesh, &spec, Some(&*s.chart), options).map_err(|e| fmt_err(&s.label, e))?;
        let seconds = start.elapsed().as_secs_f64();
        let fraction = result.report.value("covered_fraction").unwrap();
        let case2 = result.report.value("boundary_contacts").unwrap();
        if fraction != 1.0 || case2 != 0.0 || !result.report.pass {
            return Err(format!("{}: covered {fraction}, boundary contacts {case2}", s.label));
        }
        if seconds >= 60.0 {
            return Err(format!("{}: {seconds:.1} s", s.label));
        }
        slowest = slowest.max(seconds);
        surfaces += 1;
    }
    Ok(format!("{surfaces} surfaces fully covered, no boundary contacts, slowest {slowest:.1} s"))
}

fn criterion_9() -> Outcome {
    let mut worst = f64::INFINITY;
    for s in test_matrix() {
        let mesh = discretize(&*s.chart, Resolution::square(64)).map_err(|e| fmt_err(&s.label, e))?;
        let spec = spectra(&s.f, &mesh).map_err(|e| fmt_err(&s.label, e))?;
        let report = elliptic_check(&s.f, &s.params, &mesh, &spec, 10, 4, 1e-6).map_err(|e| fmt_err(&s.label, e))?;
        let slack = report.value("worst_slack").unwrap();
        if !(slack >= -1e-6) || !report.pass {
            return Err(format!("{}: slack {slack:e}", s.label));
        }
        worst = worst.min(slack);
    }
    Ok(format!("min κ - 1/r₀ ≥ {worst:.3e} over 10 points per surface"))
}

fn criterion_10() -> Outcome {
    let mut worst = [0.0f64; 2];
    for s in test_matrix() {
        let mesh = discretize(&*s.chart, Resolution::square(64)).map_err(|e| fmt_err(&s.label, e))?;
        let spec = spectra(&s.f, &mesh).map_err(|e| fmt_err(&s.label, e))?;
        let structural = structural_residual(&mesh, 1e-7);
        let first = first_variation_identity_residual(&s.f, &mesh, &spec, 1e-7);
        if !structural.pass || !first.pass {
            return Err(format!("{}: structural {:e}, first variation {:e}", s.label, structural.relative_residual, first.relative_residual));
        }
        worst = [worst[0].max(structural.relative_residual), worst[1].max(first.relative_residual)];
    }
    let mut closed = 0.0f64;
    for (name, f) in families() {
        let (_, mesh) = build_wulff_shape(&f, 1.0, Vector3::new(0.5, 0.0, 0.2), Resolution::square(64)).map_err(|e| fmt_err(name, e))?;
        let value = structural_residual(&mesh, 1e-7).value("absolute_residual").unwrap();
        if !(value <= 1e-10) {
            return Err(format!("{name} Wulff shape: |∫ν dA| = {value:e}"));
        }
        closed = closed.max(value);
    }
    Ok(format!("structural {:.2e}, first variation {:.2e}, closed |∫ν dA| {closed:.2e}", worst[0], worst[1]))
}

fn criterion_11() -> Outcome {
    let config = RunConfig::from_json(
        r#"{
          "schema": 1,
          "anisotropy": {"family": "smoothed-p-norm", "exponent": 4},
          "omega0": -0.4,
          "surface": {"kind": "perturbed-cap", "radius": 1, "amplitude": 0.05},
          "resolutions": [16, 32, 64],
          "checks": "all",
          "budgets": {"sweepout_samples": 2000}
        }"#,
    )
    .map_err(|e| e.to_string())?;
    let a = wulffcap_cli::run(&config).map_err(|e| e.to_string())?;
    let b = wulffcap_cli::run(&config).map_err(|e| e.to_string())?;
    let (ja, jb) = (a.report.to_json(), b.report.to_json());
    if ja != jb || a.tables != b.tables {
        return Err("reports differ between runs".into());
    }
    if !a.report.pass {
        return Err(format!("full suite failed: {ja}"));
    }
    Ok(format!("{} checks, {} report bytes identical across runs", a.report.checks.len(), ja.len()))
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (number, run) in criteria {
        if !only.is_empty() && !only.contains(&number) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let seconds = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {number}: PASS ({detail}) [{seconds:.1} s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {number}: FAIL ({detail}) [{seconds:.1} s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
