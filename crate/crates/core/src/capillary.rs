//! Capillary parameters, Wulff shapes and ω₀-capillary Wulff caps.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::anisotropy::Anisotropy;
use crate::error::{Error, Result};
use crate::linalg::{basis, vertical, Vector};
use crate::sphere;
use crate::surface::{discretize, Chart, ChartJet, Domain, QuadratureMesh, Resolution};

/// Open interval of admissible ω₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleRange {
    pub lower: f64,
    pub upper: f64,
}

impl AdmissibleRange {
    pub fn contains(&self, omega0: f64) -> bool {
        omega0 > self.lower && omega0 < self.upper
    }
}

/// `(-F(E_{n+1}), F(-E_{n+1}))`.
pub fn admissible_range<const D: usize>(f: &Anisotropy<D>) -> AdmissibleRange {
    let e = vertical::<D>();
    AdmissibleRange {
        lower: -f.value(&e),
        upper: f.value(&-e),
    }
}

fn check_range<const D: usize>(f: &Anisotropy<D>, omega0: f64) -> Result<AdmissibleRange> {
    let range = admissible_range(f);
    if !range.contains(omega0) {
        return Err(Error::invalid(format!(
            "omega0 = {omega0} is outside the admissible range ({}, {})",
            range.lower, range.upper
        )));
    }
    Ok(range)
}

/// `E^F_{n+1}`: `Φ(E)/F(E)` for ω₀ < 0, `-Φ(-E)/F(-E)` for ω₀ > 0 and `E`
/// itself for ω₀ = 0.
pub fn reference_vector<const D: usize>(f: &Anisotropy<D>, omega0: f64) -> Result<Vector<D>> {
    check_range(f, omega0)?;
    let e = vertical::<D>();
    Ok(if omega0 < 0.0 {
        f.gradient(&e) / f.value(&e)
    } else if omega0 > 0.0 {
        -f.gradient(&-e) / f.value(&-e)
    } else {
        e
    })
}

/// Validated capillary data for one anisotropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapillaryParams<const D: usize> {
    pub omega0: f64,
    pub e_f: Vector<D>,
    pub range: AdmissibleRange,
}

impl<const D: usize> CapillaryParams<D> {
    pub fn new(f: &Anisotropy<D>, omega0: f64) -> Result<Self> {
        let range = check_range(f, omega0)?;
        let e_f = reference_vector(f, omega0)?;
        let params = Self { omega0, e_f, range };
        if omega0 != 0.0 {
            let dual = f.dual_gauge(&-params.shift())?.value;
            if !(dual < 1.0) {
                return Err(Error::invalid(format!("F°(-ω₀ E^F) = {dual} is not below 1")));
            }
        }
        Ok(params)
    }

    /// `ω₀ E^F_{n+1}`.
    pub fn shift(&self) -> Vector<D> {
        self.e_f * self.omega0
    }

    /// Capillary weight `F(ν) + ω₀ <ν, E^F_{n+1}>`.
    pub fn weight(&self, f: &Anisotropy<D>, nu: &Vector<D>) -> f64 {
        f.value(nu) + self.omega0 * nu.dot(&self.e_f)
    }
}

/// Minimum of `F(z) + ω₀ <z, E^F_{n+1}>` over the validation grid.
pub fn positivity_margin<const D: usize>(f: &Anisotropy<D>, omega0: f64, grid_resolution: usize) -> Result<f64> {
    let e_f = reference_vector(f, omega0)?;
    Ok(sphere::lat_long_grid::<D>(grid_resolution)
        .iter()
        .map(|z| f.value(z) + omega0 * z.dot(&e_f))
        .fold(f64::INFINITY, f64::min))
}

/// Anisotropic contact angle `θ ∈ (0, π)` from `<ν_F, -E_{n+1}>`.
pub fn contact_angle<const D: usize>(f: &Anisotropy<D>, value: f64) -> Result<f64> {
    let range = admissible_range(f);
    if !range.contains(value) {
        return Err(Error::invalid(format!(
            "value {value} is outside ({}, {})",
            range.lower, range.upper
        )));
    }
    let minus_cos = if value < 0.0 {
        value / -range.lower
    } else if value > 0.0 {
        value / range.upper
    } else {
        return Ok(PI / 2.0);
    };
    Ok((-minus_cos).acos())
}

/// `W_r(x0) = {x : F°(x - x0) = r}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WulffShape<const D: usize> {
    pub center: Vector<D>,
    pub radius: f64,
}

impl<const D: usize> WulffShape<D> {
    pub fn new(center: Vector<D>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::invalid(format!("Wulff radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    /// The point with unit normal `z`.
    pub fn point(&self, f: &Anisotropy<D>, z: &Vector<D>) -> Vector<D> {
        self.center + f.gradient(z) * self.radius
    }

    /// `|F°(x - x0) - r|`.
    pub fn membership_residual(&self, f: &Anisotropy<D>, x: &Vector<D>) -> f64 {
        (f.dual(&(x - self.center)) - self.radius).abs()
    }
}

/// Analytic chart `x = x0 + r Φ(z(u))` given the jet of `z(u)` on the sphere.
fn wulff_jet<const D: usize>(f: &Anisotropy<D>, shape: &WulffShape<D>, z: &ChartJet<D>, n: usize, second: bool) -> ChartJet<D> {
    let r = shape.radius;
    let jet = f.jet(&z.x);
    let mut out = ChartJet::at(shape.center + jet.gradient * r);
    for i in 0..n {
        out.dx[i] = jet.hessian * z.dx[i] * r;
    }
    if second {
        let t = f.third(&z.x);
        for i in 0..n {
            for j in 0..n {
                out.ddx[i][j] = (t.contract(&z.dx[i], &z.dx[j]) + jet.hessian * z.ddx[i][j]) * r;
            }
        }
    }
    out
}

/// Closed Wulff shape parametrized by normals: latitude-longitude with polar
/// angle `πρ` on `S^2`, angle on `S^1`.
#[derive(Debug, Clone)]
pub struct WulffChart<const D: usize> {
    pub anisotropy: Anisotropy<D>,
    pub shape: WulffShape<D>,
}

impl<const D: usize> WulffChart<D> {
    fn normal_jet(&self, u: [f64; 2]) -> ChartJet<D> {
        if D == 2 {
            let (s, c) = u[0].sin_cos();
            let z = Vector::<D>::from_fn(|k, _| if k == 0 { c } else { s });
            let dz = Vector::<D>::from_fn(|k, _| if k == 0 { -s } else { c });
            let mut jet = ChartJet::at(z);
            jet.dx[0] = dz;
            jet.ddx[0][0] = -z;
            return jet;
        }
        let theta = PI * u[0];
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = u[1].sin_cos();
        let v = |a: f64, b: f64, c: f64| Vector::<D>::from_fn(|k, _| [a, b, c][k]);
        let z = v(st * cp, st * sp, ct);
        let mut jet = ChartJet::at(z);
        jet.dx[0] = v(ct * cp, ct * sp, -st) * PI;
        jet.dx[1] = v(-st * sp, st * cp, 0.0);
        jet.ddx[0][0] = -z * (PI * PI);
        jet.ddx[0][1] = v(-ct * sp, ct * cp, 0.0) * PI;
        jet.ddx[1][0] = jet.ddx[0][1];
        jet.ddx[1][1] = v(-st * cp, -st * sp, 0.0);
        jet
    }
}

impl<const D: usize> Chart<D> for WulffChart<D> {
    fn domain(&self) -> Domain {
        if D == 2 {
            Domain::Circle
        } else {
            Domain::Sphere
        }
    }

    fn position(&self, u: [f64; 2]) -> Vector<D> {
        self.shape.point(&self.anisotropy, &self.normal_jet(u).x)
    }

    fn jet1(&self, u: [f64; 2]) -> ChartJet<D> {
        wulff_jet(&self.anisotropy, &self.shape, &self.normal_jet(u), D - 1, false)
    }

    fn jet2(&self, u: [f64; 2]) -> ChartJet<D> {
        wulff_jet(&self.anisotropy, &self.shape, &self.normal_jet(u), D - 1, true)
    }
}

/// Builds and discretizes `W_r(x0)`.
pub fn build_wulff_shape<const D: usize>(
    f: &Anisotropy<D>,
    r: f64,
    x0: Vector<D>,
    resolution: Resolution,
) -> Result<(WulffChart<D>, QuadratureMesh<D>)> {
    if D != 2 && D != 3 {
        return Err(Error::invalid("Wulff shapes are supported in R^2 and R^3"));
    }
    let chart = WulffChart {
        anisotropy: f.clone(),
        shape: WulffShape::new(x0, r)?,
    };
    let mesh = discretize(&chart, resolution)?;
    Ok((chart, mesh))
}

/// Polar angle of the cap boundary along one meridian, with its first two
/// azimuthal derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryAngle {
    pub theta: f64,
    pub d1: f64,
    pub d2: f64,
}

/// An ω₀-capillary Wulff cap `{x ∈ W_r(x0) : x_{n+1} > 0}`, `<x0, E> = r ω₀`.
///
/// The normal domain `{z : <Φ(z), -E> < ω₀}` is parametrized in geodesic
/// polar coordinates about `E_{n+1}`, where `<Φ(z), -E>` attains its minimum
/// `-F(E)`. On `S^2` the chart is `z = cos(ρθ_b(φ)) E + sin(ρθ_b(φ)) d(φ)`;
/// on `S^1` it is `z = cos ψ E + sin ψ e_1` for `ψ ∈ [-θ_-, θ_+]`.
#[derive(Debug, Clone)]
pub struct CapillaryCap<const D: usize> {
    pub anisotropy: Anisotropy<D>,
    pub params: CapillaryParams<D>,
    pub wulff: WulffShape<D>,
    interval: (f64, f64),
}

impl<const D: usize> CapillaryCap<D> {
    pub fn new(f: &Anisotropy<D>, omega0: f64, r: f64, horizontal_center: Vector<D>) -> Result<Self> {
        if D != 2 && D != 3 {
            return Err(Error::invalid("capillary caps are supported in R^2 and R^3"));
        }
        let params = CapillaryParams::new(f, omega0)?;
        let mut center = horizontal_center;
        center[D - 1] = r * omega0;
        let wulff = WulffShape::new(center, r)?;
        let mut cap = Self {
            anisotropy: f.clone(),
            params,
            wulff,
            interval: (0.0, 0.0),
        };
        if D == 2 {
            let e1 = basis::<D>(0);
            let plus = cap.meridian_root(&e1)?;
            let minus = cap.meridian_root(&-e1)?;
            cap.interval = (-minus, plus);
        }
        cap.validate_star_shaped()?;
        Ok(cap)
    }

    pub fn omega0(&self) -> f64 {
        self.params.omega0
    }

    /// `h(z) = <Φ(z), -E_{n+1}>`.
    pub fn height_function(&self, z: &Vector<D>) -> f64 {
        -self.anisotropy.gradient(z)[D - 1]
    }

    fn direction(&self, phi: f64) -> (Vector<D>, Vector<D>) {
        let (s, c) = phi.sin_cos();
        (basis::<D>(0) * c + basis::<D>(1) * s, basis::<D>(1) * c - basis::<D>(0) * s)
    }

    /// Root of `h(cos θ E + sin θ d) = ω₀` on `(0, π)` by bisection and Newton.
    fn meridian_root(&self, d: &Vector<D>) -> Result<f64> {
        let e = vertical::<D>();
        let g = |theta: f64| {
            let z = e * theta.cos() + d * theta.sin();
            self.height_function(&z) - self.params.omega0
        };
        let (mut lo, mut hi) = (0.0, PI);
        if !(g(lo) < 0.0 && g(hi) > 0.0) {
            return Err(Error::Construction("cap boundary is not bracketed along a meridian".into()));
        }
        for _ in 0..30 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut theta = 0.5 * (lo + hi);
        for _ in 0..20 {
            let z = e * theta.cos() + d * theta.sin();
            let w = -e * theta.sin() + d * theta.cos();
            let grad_h = -(self.anisotropy.jet(&z).hessian * e);
            let slope = grad_h.dot(&w);
            let value = g(theta);
            if value.abs() < 1e-15 || !(slope > 0.0) {
                break;
            }
            let step = value / slope;
            let next = (theta - step).clamp(lo, hi);
            if (next - theta).abs() < 1e-15 {
                theta = next;
                break;
            }
            theta = next;
        }
        Ok(theta)
    }

    /// Boundary polar angle at azimuth `φ` with implicit derivatives
    /// `θ' = -G_φ/G_θ`, `θ'' = -(G_φφ + 2 G_θφ θ' + G_θθ θ'²)/G_θ`.
    pub fn boundary_angle(&self, phi: f64) -> Result<BoundaryAngle> {
        if D == 2 {
            let theta = if phi.cos() >= 0.0 { self.interval.1 } else { -self.interval.0 };
            return Ok(BoundaryAngle { theta, d1: 0.0, d2: 0.0 });
        }
        let e = vertical::<D>();
        let (d, dp) = self.direction(phi);
        let theta = self.meridian_root(&d)?;
        let (st, ct) = theta.sin_cos();
        let z = e * ct + d * st;
        let w = -e * st + d * ct;
        let zp = dp * st;
        let jet = self.anisotropy.jet(&z);
        let grad_h = -(jet.hessian * e);
        let hess_h = -self.anisotropy.third(&z).along(&e);
        let form = |a: &Vector<D>, b: &Vector<D>| (a.transpose() * hess_h * b)[(0, 0)];
        let g_t = grad_h.dot(&w);
        let g_p = grad_h.dot(&zp);
        let g_tt = form(&w, &w) - grad_h.dot(&z);
        let g_tp = form(&w, &zp) + grad_h.dot(&(dp * ct));
        let g_pp = form(&zp, &zp) - grad_h.dot(&(d * st));
        let d1 = -g_p / g_t;
        let d2 = -(g_pp + 2.0 * g_tp * d1 + g_tt * d1 * d1) / g_t;
        Ok(BoundaryAngle { theta, d1, d2 })
    }

    /// Checks that `h` increases strictly along sampled meridians up to the
    /// boundary, so that the polar chart covers the normal domain.
    fn validate_star_shaped(&self) -> Result<()> {
        let e = vertical::<D>();
        let directions: Vec<Vector<D>> = if D == 2 {
            vec![basis::<D>(0), -basis::<D>(0)]
        } else {
            (0..64).map(|k| self.direction(2.0 * PI * k as f64 / 64.0).0).collect()
        };
        for d in directions {
            let theta_b = self.meridian_root(&d)?;
            if !(theta_b > 0.0) {
                return Err(Error::invalid("empty capillary cap"));
            }
            for j in 1..=32 {
                let theta = theta_b * j as f64 / 32.0;
                let z = e * theta.cos() + d * theta.sin();
                let w = -e * theta.sin() + d * theta.cos();
                let slope = -(self.anisotropy.jet(&z).hessian * e).dot(&w);
                if !(slope > 0.0) {
                    return Err(Error::Construction(format!(
                        "normal domain is not star-shaped about E: slope {slope:e} at polar angle {theta}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn normal_jet(&self, u: [f64; 2]) -> ChartJet<D> {
        let e = vertical::<D>();
        if D == 2 {
            let e1 = basis::<D>(0);
            let (s, c) = u[0].sin_cos();
            let z = e * c + e1 * s;
            let mut jet = ChartJet::at(z);
            jet.dx[0] = -e * s + e1 * c;
            jet.ddx[0][0] = -z;
            return jet;
        }
        let (rho, phi) = (u[0], u[1]);
        let b = self.boundary_angle(phi).expect("boundary angle was validated at construction");
        let (d, dp) = self.direction(phi);
        let s = rho * b.theta;
        let (ss, cs) = s.sin_cos();
        let z = e * cs + d * ss;
        let zs = -e * ss + d * cs;
        let mut jet = ChartJet::at(z);
        jet.dx[0] = zs * b.theta;
        jet.dx[1] = zs * (rho * b.d1) + dp * ss;
        jet.ddx[0][0] = -z * (b.theta * b.theta);
        jet.ddx[0][1] = (-z * (rho * b.d1) + dp * cs) * b.theta + zs * b.d1;
        jet.ddx[1][0] = jet.ddx[0][1];
        jet.ddx[1][1] = -z * (rho * b.d1).powi(2) + dp * (2.0 * cs * rho * b.d1) + zs * (rho * b.d2) - d * ss;
        jet
    }

    /// Mean horizontal distance of the boundary from its centroid.
    pub fn boundary_radius(&self, samples: usize) -> Result<f64> {
        let points: Vec<Vector<D>> = if D == 2 {
            vec![self.position([self.interval.0, 0.0]), self.position([self.interval.1, 0.0])]
        } else {
            (0..samples.max(4))
                .map(|k| self.position([1.0, 2.0 * PI * k as f64 / samples.max(4) as f64]))
                .collect()
        };
        let centroid = points.iter().fold(Vector::<D>::zeros(), |a, p| a + p) / points.len() as f64;
        Ok(points.iter().map(|p| (p - centroid).norm()).sum::<f64>() / points.len() as f64)
    }
}

impl<const D: usize> Chart<D> for CapillaryCap<D> {
    fn domain(&self) -> Domain {
        if D == 2 {
            Domain::Interval {
                a: self.interval.0,
                b: self.interval.1,
            }
        } else {
            Domain::Disk
        }
    }

    fn position(&self, u: [f64; 2]) -> Vector<D> {
        self.wulff.point(&self.anisotropy, &self.normal_jet(u).x)
    }

    fn jet1(&self, u: [f64; 2]) -> ChartJet<D> {
        wulff_jet(&self.anisotropy, &self.wulff, &self.normal_jet(u), D - 1, false)
    }

    fn jet2(&self, u: [f64; 2]) -> ChartJet<D> {
        wulff_jet(&self.anisotropy, &self.wulff, &self.normal_jet(u), D - 1, true)
    }
}

/// Builds and discretizes the ω₀-capillary Wulff cap of radius `r`.
pub fn build_wulff_cap<const D: usize>(
    f: &Anisotropy<D>,
    omega0: f64,
    r: f64,
    horizontal_center: Vector<D>,
    resolution: Resolution,
) -> Result<(CapillaryCap<D>, QuadratureMesh<D>)> {
    let cap = CapillaryCap::new(f, omega0, r, horizontal_center)?;
    let mesh = discretize(&cap, resolution)?;
    Ok((cap, mesh))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::boundary_capillary_values;
    use nalgebra::Vector3;

    fn linear_up() -> Anisotropy<3> {
        Anisotropy::linear_perturbation(Vector3::new(0.0, 0.0, 1.0), 0.1).unwrap()
    }

    #[test]
    fn admissible_range_examples() {
        let iso = admissible_range(&Anisotropy::<3>::isotropic());
        assert_eq!((iso.lower, iso.upper), (-1.0, 1.0));
        let lin = admissible_range(&linear_up());
        assert!((lin.lower + 1.1).abs() < 1e-15 && (lin.upper - 0.9).abs() < 1e-15);
        let quad = Anisotropy::quadratic_gauge(nalgebra::Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 2.0))).unwrap();
        let q = admissible_range(&quad);
        assert_eq!((q.lower, q.upper), (-2.0, 2.0));
    }

    #[test]
    fn reference_vector_examples() {
        let iso = Anisotropy::<3>::isotropic();
        assert_eq!(reference_vector(&iso, -0.5).unwrap(), Vector3::new(0.0, 0.0, 1.0));
        let lin = Anisotropy::linear_perturbation(Vector3::new(1.0, 0.0, 0.0), 0.1).unwrap();
        let e = reference_vector(&lin, -0.5).unwrap();
        assert!((e - Vector3::new(0.1, 0.0, 1.0)).norm() < 1e-15);
        for w in [-0.7, 0.0, 0.7] {
            assert!((reference_vector(&lin, w).unwrap()[2] - 1.0).abs() < 1e-12);
        }
        assert!(reference_vector(&iso, 1.5).is_err());
    }

    #[test]
    fn positivity_margin_examples() {
        let iso = Anisotropy::<3>::isotropic();
        assert!((positivity_margin(&iso, 0.0, 16).unwrap() - 1.0).abs() < 1e-12);
        assert!((positivity_margin(&iso, -0.9, 16).unwrap() - 0.1).abs() < 1e-12);
        assert!((positivity_margin(&iso, 0.9, 16).unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn contact_angle_examples() {
        let iso = Anisotropy::<3>::isotropic();
        assert_eq!(contact_angle(&iso, 0.0).unwrap(), PI / 2.0);
        assert!((contact_angle(&iso, -0.5).unwrap() - PI / 3.0).abs() < 1e-15);
        assert!((contact_angle(&linear_up(), 0.45).unwrap() - 2.0 * PI / 3.0).abs() < 1e-12);
        assert!(contact_angle(&iso, 1.0).is_err());
    }

    #[test]
    fn linear_perturbation_wulff_shape_is_shifted_sphere() {
        let f = Anisotropy::linear_perturbation(Vector3::new(1.0, 0.0, 0.0), 0.1).unwrap();
        let (_, mesh) = build_wulff_shape(&f, 1.0, Vector3::zeros(), Resolution::square(16)).unwrap();
        for p in &mesh.interior {
            assert!(((p.x - Vector3::new(0.1, 0.0, 0.0)).norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn isotropic_cap_geometry() {
        let iso = Anisotropy::<3>::isotropic();
        let (cap, mesh) = build_wulff_cap(&iso, -0.5, 1.0, Vector3::zeros(), Resolution::square(16)).unwrap();
        assert!((cap.wulff.center[2] + 0.5).abs() < 1e-15);
        for b in &mesh.boundary {
            let radius = (b.node.x[0].powi(2) + b.node.x[1].powi(2)).sqrt();
            assert!((radius - 0.75f64.sqrt()).abs() < 1e-12);
        }
        let values = boundary_capillary_values(&iso, &mesh);
        assert!((values.max + 0.5).abs() < 1e-12 && (values.min + 0.5).abs() < 1e-12);
    }

    #[test]
    fn boundary_angle_derivatives_match_differences() {
        let f = Anisotropy::linear_perturbation(Vector3::new(2.0, 1.0, 2.0) / 3.0, 0.1).unwrap();
        let cap = CapillaryCap::new(&f, -0.4, 1.0, Vector3::zeros()).unwrap();
        let h = 1e-4;
        for phi in [0.3, 1.7, 4.0] {
            let b = cap.boundary_angle(phi).unwrap();
            let at = |p: f64| cap.boundary_angle(p).unwrap().theta;
            let d1 = (at(phi + h) - at(phi - h)) / (2.0 * h);
            let d2 = (at(phi + h) - 2.0 * b.theta + at(phi - h)) / (h * h);
            assert!((d1 - b.d1).abs() < 1e-8, "{d1} vs {}", b.d1);
            assert!((d2 - b.d2).abs() < 1e-5, "{d2} vs {}", b.d2);
        }
    }

    #[test]
    fn analytic_cap_jet_matches_default_differences() {
        struct Positions<'a>(&'a CapillaryCap<3>);
        impl Chart<3> for Positions<'_> {
            fn domain(&self) -> Domain {
                Domain::Disk
            }
            fn position(&self, u: [f64; 2]) -> Vector<3> {
                self.0.position(u)
            }
        }
        let f = Anisotropy::smoothed_p_norm(4.0, 0.25).unwrap();
        let cap = CapillaryCap::new(&f, 0.4, 1.0, Vector3::zeros()).unwrap();
        let fd = Positions(&cap);
        for u in [[0.4, 0.7], [0.95, 3.0]] {
            let (a, b) = (cap.jet2(u), fd.jet2(u));
            for i in 0..2 {
                assert!((a.dx[i] - b.dx[i]).norm() < 1e-9);
                for j in 0..2 {
                    assert!((a.ddx[i][j] - b.ddx[i][j]).norm() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn curve_cap_in_the_plane() {
        let f = Anisotropy::<2>::isotropic();
        let (cap, mesh) = build_wulff_cap(&f, 0.0, 1.0, nalgebra::Vector2::zeros(), Resolution::new(32, 1)).unwrap();
        let Domain::Interval { a, b } = cap.domain() else { panic!("curve caps use an interval") };
        assert!((a + PI / 2.0).abs() < 1e-14 && (b - PI / 2.0).abs() < 1e-14);
        assert!((mesh.area() - PI).abs() < 1e-12);
        assert_eq!(mesh.boundary.len(), 2);
    }
}
