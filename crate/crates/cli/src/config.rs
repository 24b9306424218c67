//! JSON run configuration.
//!
//! A configuration is a single JSON document; unknown keys are rejected.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "dimension": 3,
//!   "anisotropy": { "family": "linear-perturbation", "direction": [0, 0, 1], "epsilon": 0.1 },
//!   "omega0": -0.4,
//!   "surface": { "kind": "perturbed-cap", "radius": 1.0, "amplitude": 0.05 },
//!   "resolutions": [32, 64],
//!   "checks": "all",
//!   "tolerances": { "hk": 1e-6 },
//!   "seed": 0
//! }
//! ```
//!
//! Anisotropy families: `isotropic`, `quadratic-gauge` (`matrix`, row major),
//! `linear-perturbation` (`direction`, `epsilon`), `smoothed-p-norm`
//! (`exponent`, `smoothing`). Surface kinds: `wulff-cap` (`radius`,
//! horizontal `center`), `wulff-closed` (`radius`, `center`), `perturbed-cap`
//! (cap fields plus `amplitude`, `frequency`, `cutoff_power`) and
//! `custom-chart-file` (`path` to a mesh CSV, relative to the config file).

use std::path::{Path, PathBuf};

use nalgebra::SMatrix;
use serde::{Deserialize, Serialize};
use wulffcap::{Anisotropy, Vector};

use crate::catalog::{self, CheckId};
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    #[serde(default = "default_dimension")]
    pub dimension: usize,
    pub anisotropy: AnisotropySpec,
    #[serde(default)]
    pub omega0: f64,
    pub surface: SurfaceSpec,
    /// Grid sizes, `N` meaning `N × N` on surfaces and `N` nodes on curves.
    #[serde(default)]
    pub resolutions: Vec<usize>,
    #[serde(default)]
    pub checks: CheckSelection,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub seed: u64,
    /// Output directory; not part of the report echo.
    #[serde(default, skip_serializing)]
    pub output: Option<PathBuf>,
}

fn default_dimension() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AnisotropySpec {
    Isotropic {},
    QuadraticGauge {
        matrix: Vec<Vec<f64>>,
    },
    LinearPerturbation {
        direction: Vec<f64>,
        epsilon: f64,
    },
    SmoothedPNorm {
        exponent: f64,
        #[serde(default = "default_smoothing")]
        smoothing: f64,
    },
}

fn default_smoothing() -> f64 {
    0.25
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SurfaceSpec {
    WulffCap {
        radius: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    WulffClosed {
        radius: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    PerturbedCap {
        radius: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
        amplitude: f64,
        #[serde(default = "default_frequency")]
        frequency: u32,
        #[serde(default = "default_cutoff")]
        cutoff_power: u32,
    },
    CustomChartFile {
        path: PathBuf,
    },
}

fn default_frequency() -> u32 {
    2
}

fn default_cutoff() -> u32 {
    3
}

impl SurfaceSpec {
    pub fn closed(&self) -> bool {
        matches!(self, SurfaceSpec::WulffClosed { .. })
    }

    pub fn has_chart(&self) -> bool {
        !matches!(self, SurfaceSpec::CustomChartFile { .. })
    }
}

/// `"all"` or a list of check names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CheckSelection {
    Named(String),
    List(Vec<String>),
}

impl Default for CheckSelection {
    fn default() -> Self {
        CheckSelection::Named("all".into())
    }
}

/// Optional tolerance overrides; absent entries use the catalog defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structural: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minkowski: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_variation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hk: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hk_closed: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallel_curvature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallel_jacobian: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallel_mean_curvature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweepout: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elliptic: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maclaurin: Option<f64>,
    /// Required residual reduction per grid doubling on perturbed caps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence_reduction: Option<f64>,
}

impl Tolerances {
    pub fn for_check(&self, id: CheckId) -> f64 {
        let value = match id {
            CheckId::Gauge => self.gauge,
            CheckId::Angle => self.angle,
            CheckId::Structural => self.structural,
            CheckId::Minkowski => self.minkowski,
            CheckId::FirstVariation => self.first_variation,
            CheckId::Hk => self.hk,
            CheckId::HkClosed => self.hk_closed,
            CheckId::Parallel => None,
            CheckId::Sweepout => self.sweepout,
            CheckId::Elliptic => self.elliptic,
            CheckId::Maclaurin => self.maclaurin,
        };
        value.unwrap_or_else(|| catalog::entry(id).default_tolerance)
    }

    fn all(&self) -> [Option<f64>; 14] {
        [
            self.gauge,
            self.angle,
            self.structural,
            self.minkowski,
            self.first_variation,
            self.hk,
            self.hk_closed,
            self.parallel_curvature,
            self.parallel_jacobian,
            self.parallel_mean_curvature,
            self.sweepout,
            self.elliptic,
            self.maclaurin,
            self.convergence_reduction,
        ]
    }
}

/// Sample counts of the randomized checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    #[serde(default = "Budgets::default_gauge")]
    pub gauge_samples: usize,
    #[serde(default = "Budgets::default_angle")]
    pub angle_trials: usize,
    #[serde(default = "Budgets::default_sweepout")]
    pub sweepout_samples: usize,
    #[serde(default = "Budgets::default_elliptic")]
    pub elliptic_points: usize,
    #[serde(default = "Budgets::default_directions")]
    pub direction_samples: usize,
    #[serde(default = "Budgets::default_times")]
    pub parallel_times: Vec<f64>,
}

impl Budgets {
    fn default_gauge() -> usize {
        10_000
    }
    fn default_angle() -> usize {
        100_000
    }
    fn default_sweepout() -> usize {
        10_000
    }
    fn default_elliptic() -> usize {
        10
    }
    fn default_directions() -> usize {
        2000
    }
    fn default_times() -> Vec<f64> {
        wulffcap::flows::DEFAULT_TIMES.to_vec()
    }
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            gauge_samples: Self::default_gauge(),
            angle_trials: Self::default_angle(),
            sweepout_samples: Self::default_sweepout(),
            elliptic_points: Self::default_elliptic(),
            direction_samples: Self::default_directions(),
            parallel_times: Self::default_times(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads a config file; a relative `custom-chart-file` path is resolved
    /// against the directory of the config.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_json(&text)?;
        if let SurfaceSpec::CustomChartFile { path: mesh } = &mut config.surface {
            if mesh.is_relative() {
                if let Some(dir) = path.parent() {
                    *mesh = dir.join(&*mesh);
                }
            }
        }
        Ok(config)
    }

    /// Checks everything that does not need geometry.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.schema != SCHEMA_VERSION {
            return bad(format!("unsupported schema {} (expected {SCHEMA_VERSION})", self.schema));
        }
        if self.dimension != 2 && self.dimension != 3 {
            return bad(format!("dimension must be 2 or 3, got {}", self.dimension));
        }
        if !self.omega0.is_finite() {
            return bad("omega0 must be finite".into());
        }
        if self.surface.has_chart() && self.resolutions.is_empty() {
            return bad("resolutions must not be empty".into());
        }
        if self.resolutions.iter().any(|&n| n < 4) {
            return bad("every resolution must be at least 4".into());
        }
        if self.resolutions.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("resolutions must be strictly increasing, got {:?}", self.resolutions));
        }
        if self.surface.closed() && self.omega0 != 0.0 {
            return bad("closed surfaces take omega0 = 0".into());
        }
        if self.tolerances.all().iter().flatten().any(|t| !(t.is_finite() && *t > 0.0)) {
            return bad("tolerances must be positive and finite".into());
        }
        let b = &self.budgets;
        if b.gauge_samples == 0 || b.angle_trials == 0 || b.sweepout_samples == 0 || b.elliptic_points == 0 || b.direction_samples == 0 {
            return bad("budgets must be positive".into());
        }
        if b.parallel_times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return bad("parallel_times must be positive".into());
        }
        self.enabled_checks()?;
        Ok(())
    }

    /// Enabled checks in suite order. `all` picks the checks that apply to
    /// the surface; naming an inapplicable check is an error.
    pub fn enabled_checks(&self) -> Result<Vec<CheckId>, CliError> {
        self.enabled_checks_for(self.surface.closed())
    }

    /// As [`enabled_checks`](Self::enabled_checks), with closedness known
    /// from the discretized surface.
    pub fn enabled_checks_for(&self, closed: bool) -> Result<Vec<CheckId>, CliError> {
        let has_chart = self.surface.has_chart();
        let names: Vec<String> = match &self.checks {
            CheckSelection::Named(name) => vec![name.clone()],
            CheckSelection::List(list) => list.clone(),
        };
        if names.is_empty() {
            return Err(CliError::Config("checks must not be empty".into()));
        }
        if names.iter().any(|n| n == "all") {
            if names.len() > 1 {
                return Err(CliError::Config("\"all\" cannot be combined with other checks".into()));
            }
            return Ok(CheckId::ALL.into_iter().filter(|&id| catalog::applies(id, closed, has_chart)).collect());
        }
        let mut ids = Vec::new();
        for name in &names {
            let id = CheckId::parse(name).ok_or_else(|| CliError::Config(format!("unknown check \"{name}\"")))?;
            if !catalog::applies(id, closed, has_chart) {
                return Err(CliError::Config(format!("check \"{name}\" does not apply to this surface")));
            }
            if ids.contains(&id) {
                return Err(CliError::Config(format!("check \"{name}\" listed twice")));
            }
            ids.push(id);
        }
        ids.sort();
        Ok(ids)
    }

    pub fn anisotropy<const D: usize>(&self) -> Result<Anisotropy<D>, CliError> {
        let vector = |v: &[f64], what: &str| -> Result<Vector<D>, CliError> {
            if v.len() != D {
                return Err(CliError::Config(format!("{what} needs {D} components, got {}", v.len())));
            }
            Ok(Vector::<D>::from_fn(|k, _| v[k]))
        };
        let built = match &self.anisotropy {
            AnisotropySpec::Isotropic {} => Ok(Anisotropy::isotropic()),
            AnisotropySpec::QuadraticGauge { matrix } => {
                if matrix.len() != D || matrix.iter().any(|row| row.len() != D) {
                    return Err(CliError::Config(format!("matrix must be {D} × {D}")));
                }
                Anisotropy::quadratic_gauge(SMatrix::<f64, D, D>::from_fn(|i, j| matrix[i][j]))
            }
            AnisotropySpec::LinearPerturbation { direction, epsilon } => Anisotropy::linear_perturbation(vector(direction, "direction")?, *epsilon),
            AnisotropySpec::SmoothedPNorm { exponent, smoothing } => Anisotropy::smoothed_p_norm(*exponent, *smoothing),
        };
        built.map_err(|e| CliError::Config(e.to_string()))
    }
}
