//! Anisotropy functions `F` on the unit sphere, the Cahn-Hoffman map and the
//! dual gauge `F°`.
//!
//! Every anisotropy is handled through its 1-homogeneous extension
//! `F̄(x) = |x| F(x / |x|)`. The Euclidean gradient of `F̄` at a unit vector
//! `z` is the Cahn-Hoffman point `Φ(z) = ∇F(z) + F(z) z`, and the Euclidean
//! Hessian of `F̄` at `z`, restricted to `T_z S^n`, is `A_F(z) = ∇²F + F σ`.
//! Built-in families carry analytic derivatives up to third order; custom
//! anisotropies supply values only and are differentiated numerically.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, restrict, tangent_frame, Matrix, Tensor3, Vector};
use crate::report::VerificationReport;
use crate::sphere;

/// Threshold on `min eig A_F` below which an anisotropy is rejected.
pub const ELLIPTICITY_THRESHOLD: f64 = 1e-8;

/// Grid resolution used to validate anisotropies at construction.
const VALIDATION_RESOLUTION: usize = 24;

const CUSTOM_GRADIENT_STEP: f64 = 1e-5;
const CUSTOM_HESSIAN_STEP: f64 = 2e-3;
const CUSTOM_THIRD_STEP: f64 = 1e-2;

const DUAL_ASCENT_TOL: f64 = 1e-8;
const DUAL_NEWTON_TOL: f64 = 1e-12;
const DUAL_MAX_ITERATIONS: usize = 200;
/// Design points kept as extra starts by [`Anisotropy::dual_gauge`].
const DUAL_STARTS: usize = 4;

/// Value-only anisotropy on the unit sphere.
pub type ValueFn<const D: usize> = Arc<dyn Fn(&Vector<D>) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Isotropic,
    QuadraticGauge,
    LinearPerturbation,
    SmoothedPNorm,
    Custom,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyKind::Isotropic => "isotropic",
            FamilyKind::QuadraticGauge => "quadratic-gauge",
            FamilyKind::LinearPerturbation => "linear-perturbation",
            FamilyKind::SmoothedPNorm => "smoothed-p-norm",
            FamilyKind::Custom => "custom",
        };
        f.write_str(s)
    }
}

#[derive(Clone)]
pub enum Family<const D: usize> {
    /// `F ≡ 1`.
    Isotropic,
    /// `F(z) = |A z|`.
    QuadraticGauge { matrix: Matrix<D> },
    /// `F(z) = 1 + ε <a, z>`.
    LinearPerturbation { direction: Vector<D>, epsilon: f64 },
    /// `F(z) = ‖z‖_p + s |z|`; the Euclidean term keeps `A_F ≥ s` where the
    /// p-norm ball is flat.
    SmoothedPNorm { exponent: f64, smoothing: f64 },
    Custom { value: ValueFn<D> },
}

impl<const D: usize> fmt::Debug for Family<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Isotropic => write!(f, "Isotropic"),
            Family::QuadraticGauge { matrix } => write!(f, "QuadraticGauge({:?})", matrix.as_slice()),
            Family::LinearPerturbation { direction, epsilon } => {
                write!(f, "LinearPerturbation(a={:?}, eps={epsilon})", direction.as_slice())
            }
            Family::SmoothedPNorm { exponent, smoothing } => {
                write!(f, "SmoothedPNorm(p={exponent}, s={smoothing})")
            }
            Family::Custom { .. } => write!(f, "Custom"),
        }
    }
}

/// Wulff body `{u : |B (u - c)| ≤ 1}` for families whose Wulff shape is an ellipsoid.
#[derive(Debug, Clone, Copy)]
pub struct WulffEllipsoid<const D: usize> {
    pub shape: Matrix<D>,
    pub center: Vector<D>,
}

impl<const D: usize> WulffEllipsoid<D> {
    /// Minkowski gauge of the body translated by `shift`, with its gradient.
    pub fn gauge(&self, v: &Vector<D>, shift: &Vector<D>) -> Result<(f64, Vector<D>)> {
        let c = self.center + shift;
        let bc = self.shape * c;
        let gamma = bc.norm_squared();
        if gamma >= 1.0 {
            return Err(Error::invalid("translated Wulff body does not contain the origin"));
        }
        let bv = self.shape * v;
        let alpha = bv.norm_squared();
        if alpha == 0.0 {
            return Ok((0.0, Vector::<D>::zeros()));
        }
        let beta = bv.dot(&bc);
        let root = (beta * beta + (1.0 - gamma) * alpha).sqrt();
        let r = if beta >= 0.0 {
            alpha / (beta + root)
        } else {
            (root - beta) / (1.0 - gamma)
        };
        let m = self.shape * (v - c * r);
        let grad = self.shape.transpose() * m / (m.dot(&bc) + r);
        Ok((r, grad))
    }
}

/// Value, gradient and Hessian of the 1-homogeneous extension at a point.
#[derive(Debug, Clone, Copy)]
pub struct Jet<const D: usize> {
    pub value: f64,
    pub gradient: Vector<D>,
    pub hessian: Matrix<D>,
}

/// Result of maximizing `<x, z> / F(z)` over the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualGaugeResult<const D: usize> {
    pub value: f64,
    pub maximizer: Vector<D>,
    pub iterations: usize,
    pub residual: f64,
}

/// An anisotropy function satisfying `F > 0` and `A_F ≻ 0`.
#[derive(Clone)]
pub struct Anisotropy<const D: usize> {
    family: Family<D>,
    ellipsoid: Option<WulffEllipsoid<D>>,
}

impl<const D: usize> fmt::Debug for Anisotropy<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Anisotropy").field("family", &self.family).finish()
    }
}

impl<const D: usize> Anisotropy<D> {
    pub fn isotropic() -> Self {
        Self {
            family: Family::Isotropic,
            ellipsoid: Some(WulffEllipsoid {
                shape: Matrix::<D>::identity(),
                center: Vector::<D>::zeros(),
            }),
        }
    }

    pub fn quadratic_gauge(matrix: Matrix<D>) -> Result<Self> {
        let inverse = matrix
            .try_inverse()
            .ok_or_else(|| Error::invalid("quadratic gauge matrix is singular"))?;
        Self::validated(Self {
            family: Family::QuadraticGauge { matrix },
            ellipsoid: Some(WulffEllipsoid {
                shape: inverse.transpose(),
                center: Vector::<D>::zeros(),
            }),
        })
    }

    pub fn linear_perturbation(direction: Vector<D>, epsilon: f64) -> Result<Self> {
        if !(epsilon * direction.norm() < 1.0) {
            return Err(Error::invalid(format!(
                "linear perturbation needs ε|a| < 1, got {}",
                epsilon * direction.norm()
            )));
        }
        Self::validated(Self {
            family: Family::LinearPerturbation { direction, epsilon },
            ellipsoid: Some(WulffEllipsoid {
                shape: Matrix::<D>::identity(),
                center: direction * epsilon,
            }),
        })
    }

    pub fn smoothed_p_norm(exponent: f64, smoothing: f64) -> Result<Self> {
        if !(exponent >= 2.0) {
            return Err(Error::invalid(format!("smoothed p-norm needs p ≥ 2, got {exponent}")));
        }
        if !(smoothing > 0.0) {
            return Err(Error::invalid("smoothed p-norm needs a positive smoothing weight"));
        }
        Self::validated(Self {
            family: Family::SmoothedPNorm { exponent, smoothing },
            ellipsoid: None,
        })
    }

    /// Anisotropy from a value function on the unit sphere; derivatives come
    /// from fourth-order central differences of the homogeneous extension.
    pub fn custom(value: impl Fn(&Vector<D>) -> f64 + Send + Sync + 'static) -> Result<Self> {
        Self::validated(Self {
            family: Family::Custom { value: Arc::new(value) },
            ellipsoid: None,
        })
    }

    fn validated(candidate: Self) -> Result<Self> {
        for z in sphere::lat_long_grid::<D>(VALIDATION_RESOLUTION) {
            let f = candidate.value(&z);
            if !(f > 0.0) {
                return Err(Error::invalid(format!("anisotropy is not positive: F = {f} at {:?}", z.as_slice())));
            }
        }
        let min_eig = candidate.validate_ellipticity(VALIDATION_RESOLUTION);
        if !(min_eig > ELLIPTICITY_THRESHOLD) {
            return Err(Error::Ellipticity { min_eigenvalue: min_eig });
        }
        Ok(candidate)
    }

    pub fn family(&self) -> &Family<D> {
        &self.family
    }

    pub fn kind(&self) -> FamilyKind {
        match self.family {
            Family::Isotropic => FamilyKind::Isotropic,
            Family::QuadraticGauge { .. } => FamilyKind::QuadraticGauge,
            Family::LinearPerturbation { .. } => FamilyKind::LinearPerturbation,
            Family::SmoothedPNorm { .. } => FamilyKind::SmoothedPNorm,
            Family::Custom { .. } => FamilyKind::Custom,
        }
    }

    /// Sphere dimension `n`.
    pub fn dimension(&self) -> usize {
        D - 1
    }

    /// `Some` when the Wulff shape is an ellipsoid and `F°` has a closed form.
    pub fn wulff_ellipsoid(&self) -> Option<&WulffEllipsoid<D>> {
        self.ellipsoid.as_ref()
    }

    /// `F̄(x) = |x| F(x/|x|)`; equals `F(z)` on unit vectors.
    pub fn value(&self, x: &Vector<D>) -> f64 {
        match &self.family {
            Family::Isotropic => x.norm(),
            Family::QuadraticGauge { matrix } => (matrix * x).norm(),
            Family::LinearPerturbation { direction, epsilon } => x.norm() + epsilon * direction.dot(x),
            Family::SmoothedPNorm { exponent, smoothing } => p_norm(x, *exponent) + smoothing * x.norm(),
            Family::Custom { value } => {
                let n = x.norm();
                if n == 0.0 {
                    0.0
                } else {
                    n * value(&(x / n))
                }
            }
        }
    }

    /// Value, gradient and Hessian of `F̄` at `x ≠ 0`.
    pub fn jet(&self, x: &Vector<D>) -> Jet<D> {
        match &self.family {
            Family::Isotropic => euclid_jet(x),
            Family::QuadraticGauge { matrix } => {
                let e = euclid_jet(&(matrix * x));
                Jet {
                    value: e.value,
                    gradient: matrix.transpose() * e.gradient,
                    hessian: matrix.transpose() * e.hessian * matrix,
                }
            }
            Family::LinearPerturbation { direction, epsilon } => {
                let mut e = euclid_jet(x);
                e.value += epsilon * direction.dot(x);
                e.gradient += direction * *epsilon;
                e
            }
            Family::SmoothedPNorm { exponent, smoothing } => {
                let p = p_norm_jet(x, *exponent);
                let e = euclid_jet(x);
                Jet {
                    value: p.value + smoothing * e.value,
                    gradient: p.gradient + e.gradient * *smoothing,
                    hessian: p.hessian + e.hessian * *smoothing,
                }
            }
            Family::Custom { .. } => Jet {
                value: self.value(x),
                gradient: fd_gradient(|y| self.value(y), x, CUSTOM_GRADIENT_STEP),
                hessian: fd_hessian(|y| self.value(y), x, CUSTOM_HESSIAN_STEP),
            },
        }
    }

    /// Euclidean gradient of `F̄`.
    pub fn gradient(&self, x: &Vector<D>) -> Vector<D> {
        match &self.family {
            Family::Isotropic => x / x.norm(),
            Family::LinearPerturbation { direction, epsilon } => x / x.norm() + direction * *epsilon,
            _ => self.jet(x).gradient,
        }
    }

    /// Third derivative tensor of `F̄`.
    pub fn third(&self, x: &Vector<D>) -> Tensor3<D> {
        match &self.family {
            Family::Isotropic | Family::LinearPerturbation { .. } => euclid_third(x),
            Family::QuadraticGauge { matrix } => {
                let t = euclid_third(&(matrix * x));
                let mut out = Tensor3::zeros();
                for k in 0..D {
                    let mut m = Matrix::<D>::zeros();
                    for c in 0..D {
                        m += t.slices[c] * matrix[(c, k)];
                    }
                    out.slices[k] = matrix.transpose() * m * matrix;
                }
                out
            }
            Family::SmoothedPNorm { exponent, smoothing } => {
                let mut t = p_norm_third(x, *exponent);
                let e = euclid_third(x);
                for k in 0..D {
                    t.slices[k] += e.slices[k] * *smoothing;
                }
                t
            }
            Family::Custom { .. } => {
                let h = CUSTOM_THIRD_STEP;
                let mut out = Tensor3::zeros();
                for k in 0..D {
                    let e = crate::linalg::basis::<D>(k) * h;
                    let at = |s: f64| self.jet(&(x + e * s)).hessian;
                    out.slices[k] = (at(-2.0) - at(-1.0) * 8.0 + at(1.0) * 8.0 - at(2.0)) / (12.0 * h);
                }
                // Symmetrise over all index pairs.
                let mut sym = Tensor3::zeros();
                for i in 0..D {
                    for j in 0..D {
                        for k in 0..D {
                            let vals = [
                                out.slices[k][(i, j)],
                                out.slices[k][(j, i)],
                                out.slices[i][(j, k)],
                                out.slices[i][(k, j)],
                                out.slices[j][(i, k)],
                                out.slices[j][(k, i)],
                            ];
                            sym.slices[k][(i, j)] = vals.iter().sum::<f64>() / 6.0;
                        }
                    }
                }
                sym
            }
        }
    }

    /// Cahn-Hoffman map `Φ(z) = ∇F(z) + F(z) z`.
    pub fn cahn_hoffman(&self, z: &Vector<D>) -> Result<Vector<D>> {
        check_unit(z)?;
        Ok(self.gradient(z))
    }

    /// Spherical gradient `∇F(z) = Φ(z) - F(z) z`.
    pub fn sphere_gradient(&self, z: &Vector<D>) -> Vector<D> {
        let j = self.jet(z);
        j.gradient - z * j.value
    }

    /// `A_F(z)` in the given orthonormal frame of `T_z S^n`.
    pub fn a_f(&self, z: &Vector<D>, frame: &[Vector<D>]) -> DMatrix<f64> {
        restrict(&self.jet(z).hessian, frame)
    }

    /// Spherical Hessian `∇²F(z) = A_F(z) - F(z) Id` in the given frame.
    pub fn sphere_hessian(&self, z: &Vector<D>, frame: &[Vector<D>]) -> DMatrix<f64> {
        let j = self.jet(z);
        let n = frame.len();
        restrict(&j.hessian, frame) - DMatrix::identity(n, n) * j.value
    }

    /// Minimum eigenvalue of `A_F` over the latitude-longitude grid.
    pub fn validate_ellipticity(&self, grid_resolution: usize) -> f64 {
        sphere::lat_long_grid::<D>(grid_resolution)
            .iter()
            .map(|z| min_eigenvalue(&self.a_f(z, &tangent_frame(z))))
            .fold(f64::INFINITY, f64::min)
    }

    /// `F°(x) = sup <x, z> / F(z)` by multi-start ascent with Newton polish.
    ///
    /// Starts: `x / |x|` and the `DUAL_STARTS` points of a fixed 26-point
    /// sphere design with the largest initial ratio.
    pub fn dual_gauge(&self, x: &Vector<D>) -> Result<DualGaugeResult<D>> {
        let norm = x.norm();
        if !(norm > 0.0) {
            return Err(Error::invalid("dual gauge needs a nonzero vector"));
        }
        let support = |z: &Vector<D>| self.jet(z);
        let mut design: Vec<(f64, Vector<D>)> = sphere::start_design::<D>().into_iter().map(|z| (x.dot(&z) / self.value(&z), z)).collect();
        design.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut starts = vec![x / norm];
        starts.extend(design.into_iter().take(DUAL_STARTS).map(|(_, z)| z));
        let mut best: Option<DualGaugeResult<D>> = None;
        for start in &starts {
            let candidate = maximize_ratio(&support, x, start, true);
            if best.as_ref().map_or(true, |b| candidate.value > b.value) {
                best = Some(candidate);
            }
        }
        let best = best.expect("at least one start");
        if !(best.residual <= DUAL_NEWTON_TOL * 100.0) {
            let mut iterate = best.maximizer.as_slice().to_vec();
            iterate.push(best.value);
            return Err(Error::NumericalFailure {
                detail: format!(
                    "dual gauge did not converge: residual {:e} after {} iterations",
                    best.residual, best.iterations
                ),
                best: Some(iterate),
            });
        }
        Ok(best)
    }

    /// Fast `F°(x)`: closed form for ellipsoidal Wulff shapes, otherwise a
    /// single Newton ascent from `x/|x|` (the ratio is unimodal on the sphere
    /// when `A_F ≻ 0`), falling back to the multi-start solver.
    pub fn dual(&self, x: &Vector<D>) -> f64 {
        self.dual_with_gradient(x).0
    }

    /// `F°(x)` together with `∇F°(x) = z*/F(z*)`.
    pub fn dual_with_gradient(&self, x: &Vector<D>) -> (f64, Vector<D>) {
        self.shifted_dual_with_gradient(x, &Vector::<D>::zeros(), None)
            .expect("untranslated Wulff body contains the origin")
            .0
    }

    /// Gauge of the Wulff body translated by `shift`:
    /// `sup <v, z> / (F(z) + <shift, z>)`, with its gradient and maximizer.
    ///
    /// `warm` seeds the Newton ascent for families without a closed form.
    pub fn shifted_dual_with_gradient(
        &self,
        v: &Vector<D>,
        shift: &Vector<D>,
        warm: Option<&Vector<D>>,
    ) -> Result<((f64, Vector<D>), Vector<D>)> {
        if let Some(ell) = &self.ellipsoid {
            let (value, grad) = ell.gauge(v, shift)?;
            let n = grad.norm();
            let z = if n > 0.0 { grad / n } else { crate::linalg::vertical::<D>() };
            return Ok(((value, grad), z));
        }
        let norm = v.norm();
        if norm == 0.0 {
            return Ok(((0.0, Vector::<D>::zeros()), crate::linalg::vertical::<D>()));
        }
        let support = |z: &Vector<D>| {
            let mut j = self.jet(z);
            j.value += shift.dot(z);
            j.gradient += shift;
            j
        };
        let start = warm.copied().unwrap_or(v / norm);
        let mut result = maximize_ratio(&support, v, &start, false);
        if !(result.residual <= DUAL_NEWTON_TOL * 100.0) {
            for s in sphere::start_design::<D>() {
                let candidate = maximize_ratio(&support, v, &s, true);
                if candidate.residual <= DUAL_NEWTON_TOL * 100.0 && candidate.value > result.value - 1e-12 {
                    result = candidate;
                }
            }
        }
        let z = result.maximizer;
        let w = self.value(&z) + shift.dot(&z);
        if !(w > 0.0) {
            return Err(Error::invalid("translated Wulff body does not contain the origin"));
        }
        Ok(((result.value, z / w), z))
    }

    /// Checks homogeneity of `F°`, `<Φ(z), z> = F(z)`, `F°(Φ(z)) = 1` and the
    /// Cauchy-Schwarz inequality `<x, z> ≤ F°(x) F(z)` on random samples.
    pub fn verify_gauge_identities(&self, sample_count: usize, seed: u64, tolerance: f64) -> Result<VerificationReport> {
        if sample_count == 0 {
            return Err(Error::invalid("sample_count must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = [0.0f64; 5];
        for _ in 0..sample_count {
            let xhat: Vector<D> = sphere::random_unit(&mut rng);
            let z: Vector<D> = sphere::random_unit(&mut rng);
            let t = 10f64.powf(rng.gen_range(-2.0..2.0));
            let dual_unit = self.dual_gauge(&xhat)?.value;
            let dual_scaled = self.dual_gauge(&(xhat * t))?.value;
            worst[0] = worst[0].max((dual_scaled - t * dual_unit).abs() / t);

            let phi = self.gradient(&z);
            let f = self.value(&z);
            worst[1] = worst[1].max((phi.dot(&z) - f).abs());

            let wulff = self.dual_gauge(&phi)?;
            worst[2] = worst[2].max((wulff.value - 1.0).abs());

            let x = xhat * t;
            let slack = (x.dot(&z) - dual_scaled * f) / t;
            worst[3] = worst[3].max(slack.max(0.0));

            // Equality direction: x parallel to Φ(z).
            worst[4] = worst[4].max((phi.dot(&z) - wulff.value * f).abs());
        }
        let residual = worst.iter().copied().fold(0.0, f64::max);
        Ok(VerificationReport::new("gauge", residual, 1.0, tolerance)
            .with_value("samples", sample_count as f64)
            .with_value("worst_homogeneity", worst[0])
            .with_value("worst_support_identity", worst[1])
            .with_value("worst_wulff_membership", worst[2])
            .with_value("worst_cauchy_schwarz_violation", worst[3])
            .with_value("worst_cauchy_schwarz_equality_gap", worst[4]))
    }

    /// Anisotropic angle comparison: for `y` on the minimizing geodesic from
    /// `x` to `z`, `<Φ(x), z> ≤ <Φ(y), z>` with equality only at `y = x`.
    pub fn angle_comparison_check(&self, trials: usize, seed: u64, tolerance: f64) -> Result<VerificationReport> {
        const ANTIPODAL: f64 = -1.0 + 1e-6;
        const MAX_RESAMPLES: usize = 1000;
        const EQUALITY_DISTANCE: f64 = 1e-8;
        if trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst_violation = 0.0f64;
        let mut violations = 0usize;
        let mut spurious_equalities = 0usize;
        let mut worst_equality_gap = 0.0f64;
        let mut rejected = 0usize;
        for trial in 0..trials {
            let mut pair = None;
            for _ in 0..MAX_RESAMPLES {
                let x: Vector<D> = sphere::random_unit(&mut rng);
                let z: Vector<D> = sphere::random_unit(&mut rng);
                if x.dot(&z) >= ANTIPODAL && (x - z).norm() > 0.0 {
                    pair = Some((x, z));
                    break;
                }
                rejected += 1;
            }
            let (x, z) = pair.ok_or_else(|| Error::numerical("angle comparison: antipodal resampling exhausted"))?;
            // Every tenth trial probes the equality case y = x.
            let s = if trial % 10 == 0 { 0.0 } else { rng.gen_range(0.0..=1.0) };
            let y = if s == 0.0 { x } else { sphere::slerp(&x, &z, s) };
            let lhs = self.gradient(&x).dot(&z);
            let rhs = self.gradient(&y).dot(&z);
            let diff = rhs - lhs;
            if -diff > tolerance {
                violations += 1;
            }
            worst_violation = worst_violation.max(-diff);
            let distance = sphere::geodesic_distance(&x, &y);
            if s == 0.0 {
                worst_equality_gap = worst_equality_gap.max(diff.abs());
            } else if diff.abs() <= tolerance && distance > EQUALITY_DISTANCE {
                spurious_equalities += 1;
            }
        }
        let mut report = VerificationReport::new("angle", worst_violation.max(0.0), 1.0, tolerance)
            .with_value("trials", trials as f64)
            .with_value("violations", violations as f64)
            .with_value("spurious_equalities", spurious_equalities as f64)
            .with_value("worst_equality_gap", worst_equality_gap)
            .with_value("antipodal_rejections", rejected as f64);
        if spurious_equalities > 0 {
            report.fail_with(format!("{spurious_equalities} equalities away from y = x"));
        }
        if worst_equality_gap > tolerance {
            report.fail_with("equality fails at y = x");
        }
        Ok(report)
    }
}

/// Rejects vectors that are not unit length to `1e-12`.
pub fn check_unit<const D: usize>(z: &Vector<D>) -> Result<()> {
    let n = z.norm();
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!("expected a unit vector, |z| = {n}")));
    }
    Ok(())
}

/// Ascent of `<x, z> / G(z)` on the sphere, `G` 1-homogeneous and positive.
///
/// With `ascent_first`, projected-gradient steps run until the first-order
/// residual drops below `1e-8` or the Riemannian Hessian becomes negative
/// definite; Newton steps then polish to `1e-12`.
fn maximize_ratio<const D: usize>(
    support: &impl Fn(&Vector<D>) -> Jet<D>,
    x: &Vector<D>,
    start: &Vector<D>,
    ascent_first: bool,
) -> DualGaugeResult<D> {
    let xnorm = x.norm();
    let objective = |z: &Vector<D>| x.dot(z) / support(z).value;
    let mut z = start.normalize();
    let mut value = objective(&z);
    let mut residual = f64::INFINITY;
    let mut newton_phase = !ascent_first;
    let mut iterations = 0;
    let mut step_scale = 0.5;
    while iterations < DUAL_MAX_ITERATIONS {
        iterations += 1;
        let j = support(&z);
        let g = j.value;
        let xz = x.dot(&z);
        let grad = x / g - j.gradient * (xz / (g * g));
        let hess = -(x * j.gradient.transpose() + j.gradient * x.transpose()) / (g * g) - j.hessian * (xz / (g * g))
            + j.gradient * j.gradient.transpose() * (2.0 * xz / (g * g * g));
        let frame = tangent_frame(&z);
        let n = frame.len();
        let gt = nalgebra::DVector::from_fn(n, |a, _| frame[a].dot(&grad));
        residual = gt.norm() * g / xnorm;
        if residual <= DUAL_NEWTON_TOL {
            break;
        }
        let ht = restrict(&hess, &frame);
        let neg_def = (-&ht).cholesky().is_some();
        if !newton_phase && (residual <= DUAL_ASCENT_TOL || neg_def) {
            newton_phase = true;
        }
        let direction = if newton_phase && neg_def {
            ht.clone().lu().solve(&(-&gt)).unwrap_or_else(|| gt.clone())
        } else {
            // Gradient step scaled to the natural length of the objective.
            &gt * (step_scale * g / xnorm)
        };
        let mut tangent = Vector::<D>::zeros();
        for (a, e) in frame.iter().enumerate() {
            tangent += e * direction[a];
        }
        let len = tangent.norm();
        if len > 0.5 {
            tangent *= 0.5 / len;
        }
        let mut accepted = false;
        for _ in 0..40 {
            let trial = (z + tangent).normalize();
            let trial_value = objective(&trial);
            if trial_value >= value - 1e-15 * value.abs().max(xnorm) {
                z = trial;
                value = trial_value;
                accepted = true;
                break;
            }
            tangent *= 0.5;
            if !newton_phase {
                step_scale *= 0.5;
            }
        }
        if !accepted {
            break;
        }
        if !newton_phase {
            step_scale = (step_scale * 2.0).min(4.0);
        }
    }
    DualGaugeResult {
        value,
        maximizer: z,
        iterations,
        residual,
    }
}

fn euclid_jet<const D: usize>(x: &Vector<D>) -> Jet<D> {
    let n = x.norm();
    let u = x / n;
    Jet {
        value: n,
        gradient: u,
        hessian: (Matrix::<D>::identity() - u * u.transpose()) / n,
    }
}

fn euclid_third<const D: usize>(x: &Vector<D>) -> Tensor3<D> {
    let n = x.norm();
    let n3 = n * n * n;
    let n5 = n3 * n * n;
    let mut t = Tensor3::zeros();
    for k in 0..D {
        t.slices[k] = Matrix::<D>::from_fn(|i, j| {
            let dij = if i == j { x[k] } else { 0.0 };
            let dik = if i == k { x[j] } else { 0.0 };
            let djk = if j == k { x[i] } else { 0.0 };
            -(dij + dik + djk) / n3 + 3.0 * x[i] * x[j] * x[k] / n5
        });
    }
    t
}

fn abs_pow(v: f64, e: f64) -> f64 {
    if e == 0.0 {
        return 1.0;
    }
    let a = v.abs();
    if e.fract() == 0.0 && e.abs() < 64.0 {
        a.powi(e as i32)
    } else {
        a.powf(e)
    }
}

fn sign(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.signum()
    }
}

fn p_norm<const D: usize>(x: &Vector<D>, p: f64) -> f64 {
    let s: f64 = x.iter().map(|&v| abs_pow(v, p)).sum();
    s.powf(1.0 / p)
}

fn p_norm_jet<const D: usize>(x: &Vector<D>, p: f64) -> Jet<D> {
    let n = p_norm(x, p);
    let np1 = n.powf(p - 1.0);
    let g = Vector::<D>::from_fn(|i, _| abs_pow(x[i], p - 1.0) * sign(x[i]) / np1);
    let mut h = -(g * g.transpose()) * ((p - 1.0) / n);
    for i in 0..D {
        h[(i, i)] += (p - 1.0) * abs_pow(x[i], p - 2.0) / np1;
    }
    Jet {
        value: n,
        gradient: g,
        hessian: h,
    }
}

fn p_norm_third<const D: usize>(x: &Vector<D>, p: f64) -> Tensor3<D> {
    let Jet {
        value: n,
        gradient: g,
        hessian: h,
    } = p_norm_jet(x, p);
    let np1 = n.powf(p - 1.0);
    let np = np1 * n;
    let mut t = Tensor3::zeros();
    for k in 0..D {
        t.slices[k] = Matrix::<D>::from_fn(|i, j| {
            let mut v = 0.0;
            if i == j {
                if i == k && p != 2.0 {
                    v += (p - 2.0) * abs_pow(x[i], p - 3.0) * sign(x[i]) / np1;
                }
                v -= (p - 1.0) * abs_pow(x[i], p - 2.0) * g[k] / np;
            }
            v *= p - 1.0;
            v - (p - 1.0) * ((h[(i, k)] * g[j] + g[i] * h[(j, k)]) / n - g[i] * g[j] * g[k] / (n * n))
        });
    }
    t
}

/// Fourth-order central difference gradient.
pub(crate) fn fd_gradient<const D: usize>(f: impl Fn(&Vector<D>) -> f64, x: &Vector<D>, h: f64) -> Vector<D> {
    Vector::<D>::from_fn(|i, _| {
        let e = crate::linalg::basis::<D>(i) * h;
        (f(&(x - e * 2.0)) - 8.0 * f(&(x - e)) + 8.0 * f(&(x + e)) - f(&(x + e * 2.0))) / (12.0 * h)
    })
}

/// Fourth-order central difference Hessian (tensor-product stencil off the diagonal).
pub(crate) fn fd_hessian<const D: usize>(f: impl Fn(&Vector<D>) -> f64, x: &Vector<D>, h: f64) -> Matrix<D> {
    const OFFSETS: [f64; 4] = [-2.0, -1.0, 1.0, 2.0];
    const WEIGHTS: [f64; 4] = [1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0];
    let mut m = Matrix::<D>::zeros();
    let f0 = f(x);
    for i in 0..D {
        let ei = crate::linalg::basis::<D>(i) * h;
        m[(i, i)] = (-f(&(x + ei * 2.0)) + 16.0 * f(&(x + ei)) - 30.0 * f0 + 16.0 * f(&(x - ei)) - f(&(x - ei * 2.0)))
            / (12.0 * h * h);
        for j in 0..i {
            let ej = crate::linalg::basis::<D>(j) * h;
            let mut acc = 0.0;
            for (a, wa) in OFFSETS.iter().zip(WEIGHTS) {
                for (b, wb) in OFFSETS.iter().zip(WEIGHTS) {
                    acc += wa * wb * f(&(x + ei * *a + ej * *b));
                }
            }
            m[(i, j)] = acc / (h * h);
            m[(j, i)] = m[(i, j)];
        }
    }
    m
}

/// Deterministic RNG for callers that sample the sphere.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
