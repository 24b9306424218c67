//! Executes a validated configuration.

use std::fs::File;
use std::io::BufReader;
use std::time::Instant;

use serde::Serialize;
use wulffcap::capillary::{CapillaryCap, CapillaryParams, WulffChart, WulffShape};
use wulffcap::flows::{
    elliptic_check, maclaurin_check, parallel_transport_check, ros_chain, sweepout_check, write_sweepout_csv, ParallelTolerances, SweepoutOptions,
};
use wulffcap::integrals::{
    first_variation_identity_residual, hk_closed_report, hk_report, minkowski_residual, refinement_study, structural_residual,
};
use wulffcap::surface::{discretize, perturb_capillary, read_mesh_csv, spectra, Chart, MeshSpectrum, PerturbationMode, PerturbedChart, QuadratureMesh, Resolution};
use wulffcap::{Anisotropy, Error, Vector, VerificationReport};

use crate::catalog::CheckId;
use crate::config::{RunConfig, SurfaceSpec, SCHEMA_VERSION};
use crate::CliError;

/// Relative residuals below this are rounding noise and exempt from the
/// convergence-rate requirement.
pub const CONVERGENCE_FLOOR: f64 = 1e-12;

pub const DEFAULT_REDUCTION: f64 = 4.0;

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

/// The deterministic part of a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub library_version: &'static str,
    pub config: RunConfig,
    pub checks: Vec<VerificationReport>,
    pub pass: bool,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn check(&self, name: &str) -> Option<&VerificationReport> {
        self.checks.iter().find(|r| r.name == name)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckTiming {
    pub check: &'static str,
    pub seconds: f64,
}

/// Timings and environment; kept apart from the report so that reports
/// stay byte-identical between runs.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub library_version: &'static str,
    pub threads: usize,
    pub discretization_seconds: f64,
    pub checks: Vec<CheckTiming>,
    pub total_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub metadata: RunMetadata,
    /// `(file name, contents)` of the CSV tables.
    pub tables: Vec<(String, String)>,
}

/// The surface behind a run.
pub enum Model<const D: usize> {
    Cap(CapillaryCap<D>),
    Perturbed(PerturbedChart<D, CapillaryCap<D>>),
    Closed(WulffChart<D>),
    File(QuadratureMesh<D>),
}

impl<const D: usize> Model<D> {
    pub fn chart(&self) -> Option<&dyn Chart<D>> {
        match self {
            Model::Cap(c) => Some(c),
            Model::Perturbed(c) => Some(c),
            Model::Closed(c) => Some(c),
            Model::File(_) => None,
        }
    }

    fn closed(&self) -> bool {
        match self {
            Model::Closed(_) => true,
            Model::File(mesh) => mesh.closed,
            _ => false,
        }
    }

    pub fn mesh(&self, resolution: Resolution) -> Result<QuadratureMesh<D>, Error> {
        match (self, self.chart()) {
            (Model::File(mesh), _) => Ok(mesh.clone()),
            (_, Some(chart)) => discretize(chart, resolution),
            _ => unreachable!("every non-file model has a chart"),
        }
    }
}

fn vector<const D: usize>(values: &Option<Vec<f64>>, len: usize, what: &str) -> Result<Vector<D>, CliError> {
    let mut v = Vector::<D>::zeros();
    if let Some(values) = values {
        if values.len() != len {
            return Err(CliError::Config(format!("{what} needs {len} components, got {}", values.len())));
        }
        for (k, x) in values.iter().enumerate() {
            v[k] = *x;
        }
    }
    Ok(v)
}

/// Builds the anisotropy, capillary data and surface. Every failure here is
/// a configuration error.
pub fn prepare<const D: usize>(config: &RunConfig) -> Result<(Anisotropy<D>, CapillaryParams<D>, Model<D>), CliError> {
    let f = config.anisotropy::<D>()?;
    let invalid = |e: Error| CliError::Config(e.to_string());
    let params = CapillaryParams::new(&f, config.omega0).map_err(invalid)?;
    let model = match &config.surface {
        SurfaceSpec::WulffCap { radius, center } => Model::Cap(CapillaryCap::new(&f, config.omega0, *radius, vector(center, D - 1, "center")?).map_err(invalid)?),
        SurfaceSpec::PerturbedCap {
            radius,
            center,
            amplitude,
            frequency,
            cutoff_power,
        } => {
            let cap = CapillaryCap::new(&f, config.omega0, *radius, vector(center, D - 1, "center")?).map_err(invalid)?;
            let mode = PerturbationMode {
                frequency: *frequency,
                cutoff_power: *cutoff_power,
            };
            Model::Perturbed(perturb_capillary(cap, *amplitude, mode).map_err(invalid)?)
        }
        SurfaceSpec::WulffClosed { radius, center } => Model::Closed(WulffChart {
            anisotropy: f.clone(),
            shape: WulffShape::new(vector(center, D, "center")?, *radius).map_err(invalid)?,
        }),
        SurfaceSpec::CustomChartFile { path } => {
            let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mesh = read_mesh_csv::<D>(BufReader::new(file)).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            if mesh.closed && config.omega0 != 0.0 {
                return Err(CliError::Config("closed surfaces take omega0 = 0".into()));
            }
            Model::File(mesh)
        }
    };
    Ok((f, params, model))
}

pub fn resolution_for<const D: usize>(n: usize) -> Resolution {
    if D == 2 {
        Resolution::new(n, 1)
    } else {
        Resolution::square(n)
    }
}

struct Level<const D: usize> {
    resolution: Resolution,
    mesh: QuadratureMesh<D>,
    spectrum: MeshSpectrum<D>,
}

/// Runs every enabled check. Errors raised while checking are reported as
/// [`CliError::Run`] and nothing is returned for output.
pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    config.validate()?;
    match config.dimension {
        2 => run_in::<2>(config),
        3 => run_in::<3>(config),
        d => Err(CliError::Config(format!("dimension must be 2 or 3, got {d}"))),
    }
}

fn run_in<const D: usize>(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let start = Instant::now();
    let (f, params, model) = prepare::<D>(config)?;
    let checks = config.enabled_checks_for(model.closed())?;
    let tol = &config.tolerances;
    let failed = |check: &'static str| move |source: Error| CliError::Run { check, source };

    let needs_all_levels = checks.iter().any(|&id| crate::catalog::entry(id).per_resolution);
    let needs_mesh = checks.iter().any(|&id| !matches!(id, CheckId::Gauge | CheckId::Angle));
    let resolutions: Vec<Resolution> = match &model {
        Model::File(mesh) => vec![Resolution::new(mesh.resolution[0], mesh.resolution.get(1).copied().unwrap_or(1))],
        _ => config.resolutions.iter().map(|&n| resolution_for::<D>(n)).collect(),
    };
    let wanted: &[Resolution] = if needs_all_levels { &resolutions } else { &resolutions[resolutions.len() - 1..] };
    let mut levels: Vec<Level<D>> = Vec::new();
    if needs_mesh {
        for &resolution in wanted {
            let mesh = model.mesh(resolution).map_err(failed("discretize"))?;
            let spectrum = spectra(&f, &mesh).map_err(failed("discretize"))?;
            levels.push(Level { resolution, mesh, spectrum });
        }
    }
    let discretization_seconds = start.elapsed().as_secs_f64();
    let n = D - 1;
    let study_levels: Vec<Resolution> = levels.iter().map(|l| l.resolution).collect();
    let at = |resolution: Resolution| levels.iter().find(|l| l.resolution == resolution).expect("level was discretized");
    let doublings = study_levels.windows(2).all(|w| w[1] == w[0].doubled());
    let reduction = match (&model, doublings && study_levels.len() >= 2) {
        (Model::Perturbed(_), true) => Some(tol.convergence_reduction.unwrap_or(DEFAULT_REDUCTION)),
        _ => None,
    };

    let mut reports = Vec::new();
    let mut timings = Vec::new();
    let mut tables = Vec::new();
    for id in checks {
        let clock = Instant::now();
        let name = id.name();
        let tolerance = tol.for_check(id);
        let err = failed(name);
        match id {
            CheckId::Gauge => reports.push(f.verify_gauge_identities(config.budgets.gauge_samples, config.seed, tolerance).map_err(err)?),
            CheckId::Angle => reports.push(f.angle_comparison_check(config.budgets.angle_trials, config.seed, tolerance).map_err(err)?),
            CheckId::Structural => reports.push(
                refinement_study(&study_levels, n, None, CONVERGENCE_FLOOR, |r| Ok(structural_residual(&at(r).mesh, tolerance))).map_err(err)?,
            ),
            CheckId::Minkowski => {
                for order in 1..=n {
                    let report = refinement_study(&study_levels, n, reduction, CONVERGENCE_FLOOR, |r| {
                        let level = at(r);
                        minkowski_residual(&f, &params, &level.mesh, &level.spectrum, order, tolerance)
                    })
                    .map_err(failed(name))?;
                    reports.push(report);
                }
            }
            CheckId::FirstVariation => reports.push(
                refinement_study(&study_levels, n, None, CONVERGENCE_FLOOR, |r| {
                    let level = at(r);
                    Ok(first_variation_identity_residual(&f, &level.mesh, &level.spectrum, tolerance))
                })
                .map_err(err)?,
            ),
            CheckId::Hk => reports.push(
                refinement_study(&study_levels, n, None, CONVERGENCE_FLOOR, |r| {
                    let level = at(r);
                    hk_report(&f, &params, &level.mesh, &level.spectrum, tolerance)
                })
                .map_err(err)?,
            ),
            CheckId::HkClosed => reports.push(
                refinement_study(&study_levels, n, None, CONVERGENCE_FLOOR, |r| {
                    let level = at(r);
                    hk_closed_report(&f, &level.mesh, &level.spectrum, config.budgets.direction_samples, tolerance)
                })
                .map_err(err)?,
            ),
            CheckId::Parallel => {
                let defaults = ParallelTolerances::default();
                let thresholds = ParallelTolerances {
                    curvature: tol.parallel_curvature.unwrap_or(defaults.curvature),
                    jacobian: tol.parallel_jacobian.unwrap_or(defaults.jacobian),
                    mean_curvature: tol.parallel_mean_curvature.unwrap_or(defaults.mean_curvature),
                    ..defaults
                };
                let chart = model.chart().expect("parallel needs a chart");
                let finest = *resolutions.last().expect("resolutions are nonempty");
                reports.push(parallel_transport_check(&f, &params, chart, finest, &config.budgets.parallel_times, thresholds).map_err(err)?);
            }
            CheckId::Sweepout => {
                let level = levels.last().expect("mesh levels exist");
                let options = SweepoutOptions {
                    samples: config.budgets.sweepout_samples,
                    seed: config.seed,
                    coverage_tolerance: tolerance,
                    ..Default::default()
                };
                let result = sweepout_check(&f, &params, &level.mesh, &level.spectrum, model.chart(), options).map_err(err)?;
                let mut csv = Vec::new();
                write_sweepout_csv(&result.rows, &mut csv).map_err(|e| CliError::Io(e.to_string()))?;
                tables.push(("sweepout.csv".to_string(), String::from_utf8(csv).expect("csv is utf-8")));
                reports.push(result.report);
            }
            CheckId::Elliptic => {
                let level = levels.last().expect("mesh levels exist");
                reports.push(elliptic_check(&f, &params, &level.mesh, &level.spectrum, config.budgets.elliptic_points, config.seed, tolerance).map_err(err)?);
            }
            CheckId::Maclaurin => {
                let level = levels.last().expect("mesh levels exist");
                reports.push(maclaurin_check(&level.spectrum, n, tolerance).map_err(failed(name))?);
                // The volume chain needs H_r > 0 everywhere; use the largest such order.
                let positive = |r: usize| level.spectrum.interior.iter().chain(&level.spectrum.boundary).all(|s| s.mean[r] > 0.0);
                match (1..=n).rev().find(|&r| positive(r)) {
                    Some(r) => reports.push(ros_chain(&f, &params, &level.mesh, &level.spectrum, r, tol.for_check(CheckId::Hk)).map_err(err)?),
                    None => {
                        let last = reports.last_mut().expect("maclaurin report was pushed");
                        last.warnings.push("volume chain skipped: H_1 is not positive everywhere".into());
                    }
                }
            }
        }
        timings.push(CheckTiming {
            check: name,
            seconds: clock.elapsed().as_secs_f64(),
        });
    }

    for report in &reports {
        if report.convergence.len() >= 2 {
            let mut csv = String::from("resolution,residual,relative_residual\n");
            for row in &report.convergence {
                let res: Vec<String> = row.resolution.iter().map(|r| r.to_string()).collect();
                csv.push_str(&format!("{},{:e},{:e}\n", res.join("x"), row.residual, row.relative_residual));
            }
            tables.push((format!("convergence_{}.csv", report.name), csv));
        }
    }

    let pass = reports.iter().all(|r| r.pass);
    Ok(RunOutcome {
        report: RunReport {
            schema: SCHEMA_VERSION,
            library_version: LIBRARY_VERSION,
            config: config.clone(),
            checks: reports,
            pass,
        },
        metadata: RunMetadata {
            library_version: LIBRARY_VERSION,
            threads: rayon::current_num_threads(),
            discretization_seconds,
            checks: timings,
            total_seconds: start.elapsed().as_secs_f64(),
        },
        tables,
    })
}

/// Mesh of the configured surface at `n` (default: the finest resolution).
pub fn export_mesh(config: &RunConfig, n: Option<usize>) -> Result<String, CliError> {
    config.validate()?;
    match config.dimension {
        2 => export_in::<2>(config, n),
        3 => export_in::<3>(config, n),
        d => Err(CliError::Config(format!("dimension must be 2 or 3, got {d}"))),
    }
}

fn export_in<const D: usize>(config: &RunConfig, n: Option<usize>) -> Result<String, CliError> {
    let (_, _, model) = prepare::<D>(config)?;
    let n = n.or_else(|| config.resolutions.last().copied()).unwrap_or(0);
    let mesh = model.mesh(resolution_for::<D>(n)).map_err(|source| CliError::Run { check: "discretize", source })?;
    let mut out = Vec::new();
    wulffcap::surface::write_mesh_csv(&mesh, &mut out).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(out).expect("csv is utf-8"))
}
