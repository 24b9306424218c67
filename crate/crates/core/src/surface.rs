//! Parametric hypersurfaces, their quadrature meshes and curvature spectra.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anisotropy::Anisotropy;
use crate::error::{Error, Result};
use crate::linalg::{binomial, cross_product, gram_schmidt, spd_sqrt, symmetrize, vertical, Matrix, Vector};
use crate::quadrature::{gauss_legendre, periodic_trapezoid};

/// Metric condition number above which a node is treated as degenerate.
const MAX_CONDITION: f64 = 1e12;
/// Relative step of the finite-difference fallbacks, scaled by parameter extent.
const FD_STEP: f64 = 1e-4;

/// Parameter domain of a chart.
///
/// `Disk`: `(ρ, φ) ∈ [0,1] × [0,2π)` with `ρ = 1` mapped onto the boundary in
/// the supporting hyperplane. `Sphere`: `(ρ, φ)` with `ρ` the polar angle
/// divided by `π`, closed. `Interval`: a curve with two boundary endpoints.
/// `Circle`: a closed curve over `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Disk,
    Sphere,
    Interval { a: f64, b: f64 },
    Circle,
}

impl Domain {
    pub fn dimension(&self) -> usize {
        match self {
            Domain::Disk | Domain::Sphere => 2,
            Domain::Interval { .. } | Domain::Circle => 1,
        }
    }

    pub fn closed(&self) -> bool {
        matches!(self, Domain::Sphere | Domain::Circle)
    }

    fn extents(&self) -> [f64; 2] {
        match self {
            Domain::Disk | Domain::Sphere => [1.0, 2.0 * PI],
            Domain::Interval { a, b } => [b - a, 1.0],
            Domain::Circle => [2.0 * PI, 1.0],
        }
    }
}

/// Grid size: `radial × angular` for surfaces, `radial` nodes for curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub radial: usize,
    pub angular: usize,
}

impl Resolution {
    pub fn new(radial: usize, angular: usize) -> Self {
        Self { radial, angular }
    }

    pub fn square(n: usize) -> Self {
        Self::new(n, n)
    }

    pub fn doubled(&self) -> Self {
        Self::new(2 * self.radial, 2 * self.angular)
    }

    pub fn as_vec(&self, dimension: usize) -> Vec<usize> {
        if dimension == 1 {
            vec![self.radial]
        } else {
            vec![self.radial, self.angular]
        }
    }
}

/// Position with first and second parameter derivatives. Only the leading
/// `n × n` block is meaningful for an `n`-dimensional chart.
#[derive(Debug, Clone, Copy)]
pub struct ChartJet<const D: usize> {
    pub x: Vector<D>,
    pub dx: [Vector<D>; 2],
    pub ddx: [[Vector<D>; 2]; 2],
}

impl<const D: usize> ChartJet<D> {
    pub fn at(x: Vector<D>) -> Self {
        let z = Vector::<D>::zeros();
        Self {
            x,
            dx: [z; 2],
            ddx: [[z; 2]; 2],
        }
    }
}

/// A smooth immersion of a parameter domain into `R^D`.
///
/// Charts must extend smoothly slightly past the domain edges so that the
/// finite-difference fallbacks can be evaluated at boundary nodes.
pub trait Chart<const D: usize>: Send + Sync {
    fn domain(&self) -> Domain;

    fn position(&self, u: [f64; 2]) -> Vector<D>;

    /// Position and first derivatives; fourth-order differences by default.
    fn jet1(&self, u: [f64; 2]) -> ChartJet<D> {
        let domain = self.domain();
        let mut jet = ChartJet::at(self.position(u));
        for (i, extent) in domain.extents().iter().enumerate().take(domain.dimension()) {
            let h = FD_STEP * extent;
            let at = |s: f64| {
                let mut v = u;
                v[i] += s * h;
                self.position(v)
            };
            jet.dx[i] = (at(-2.0) - at(-1.0) * 8.0 + at(1.0) * 8.0 - at(2.0)) / (12.0 * h);
        }
        jet
    }

    /// Position with first and second derivatives; second derivatives by
    /// fourth-order differences of `jet1` by default.
    fn jet2(&self, u: [f64; 2]) -> ChartJet<D> {
        let domain = self.domain();
        let n = domain.dimension();
        let mut jet = self.jet1(u);
        for (i, extent) in domain.extents().iter().enumerate().take(n) {
            let h = FD_STEP * extent;
            let at = |s: f64| {
                let mut v = u;
                v[i] += s * h;
                self.jet1(v).dx
            };
            let (m2, m1, p1, p2) = (at(-2.0), at(-1.0), at(1.0), at(2.0));
            for j in 0..n {
                jet.ddx[j][i] = (m2[j] - m1[j] * 8.0 + p1[j] * 8.0 - p2[j]) / (12.0 * h);
            }
        }
        if n == 2 {
            let mixed = (jet.ddx[0][1] + jet.ddx[1][0]) * 0.5;
            jet.ddx[0][1] = mixed;
            jet.ddx[1][0] = mixed;
        }
        jet
    }
}

impl<const D: usize, C: Chart<D> + ?Sized> Chart<D> for &C {
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn position(&self, u: [f64; 2]) -> Vector<D> {
        (**self).position(u)
    }
    fn jet1(&self, u: [f64; 2]) -> ChartJet<D> {
        (**self).jet1(u)
    }
    fn jet2(&self, u: [f64; 2]) -> ChartJet<D> {
        (**self).jet2(u)
    }
}

impl<const D: usize, C: Chart<D> + ?Sized> Chart<D> for Box<C> {
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn position(&self, u: [f64; 2]) -> Vector<D> {
        (**self).position(u)
    }
    fn jet1(&self, u: [f64; 2]) -> ChartJet<D> {
        (**self).jet1(u)
    }
    fn jet2(&self, u: [f64; 2]) -> ChartJet<D> {
        (**self).jet2(u)
    }
}

/// Unit normal `sign · N / |N|` and its derivatives `ν_i = -Σ (L g⁻¹)_{il} x_l`.
pub fn normal_with_derivatives<const D: usize>(jet: &ChartJet<D>, n: usize, sign: f64) -> Option<(Vector<D>, [Vector<D>; 2])> {
    let cross = cross_product(&jet.dx[..n]);
    let len = cross.norm();
    if !(len > 0.0) {
        return None;
    }
    let nu = cross * (sign / len);
    let g = DMatrix::from_fn(n, n, |i, j| jet.dx[i].dot(&jet.dx[j]));
    let l = DMatrix::from_fn(n, n, |i, j| jet.ddx[i][j].dot(&nu));
    let m = &l * g.try_inverse()?;
    let mut dnu = [Vector::<D>::zeros(); 2];
    for i in 0..n {
        for k in 0..n {
            dnu[i] -= jet.dx[k] * m[(i, k)];
        }
    }
    Some((nu, dnu))
}

/// Geometry of one quadrature node.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshNode<const D: usize> {
    pub param: [f64; 2],
    pub x: Vector<D>,
    pub nu: Vector<D>,
    /// Orthonormal tangent frame (Gram-Schmidt of the chart derivatives).
    pub frame: Vec<Vector<D>>,
    /// Shape operator `dν` in `frame`.
    pub shape: DMatrix<f64>,
    /// Area weight `dA` (interior) or line weight `ds` (boundary).
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryNode<const D: usize> {
    pub node: MeshNode<D>,
    /// Outward unit conormal.
    pub mu: Vector<D>,
}

/// A discretized hypersurface, oriented so that `ν` points out of the
/// enclosed region.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureMesh<const D: usize> {
    pub interior: Vec<MeshNode<D>>,
    pub boundary: Vec<BoundaryNode<D>>,
    pub closed: bool,
    pub resolution: Vec<usize>,
    /// Largest metric condition number over the nodes.
    pub max_condition: f64,
    /// Largest Euclidean gap between consecutive boundary nodes.
    pub boundary_cell: f64,
    /// Whether the chart normal had to be reversed.
    pub flipped: bool,
}

impl<const D: usize> QuadratureMesh<D> {
    pub fn dimension(&self) -> usize {
        D - 1
    }

    pub fn area(&self) -> f64 {
        crate::linalg::pairwise_sum(&self.interior.iter().map(|p| p.weight).collect::<Vec<_>>())
    }

    pub fn boundary_length(&self) -> f64 {
        crate::linalg::pairwise_sum(&self.boundary.iter().map(|b| b.node.weight).collect::<Vec<_>>())
    }

    /// Interior nodes followed by boundary nodes.
    pub fn all_nodes(&self) -> impl Iterator<Item = &MeshNode<D>> {
        self.interior.iter().chain(self.boundary.iter().map(|b| &b.node))
    }

    pub fn node_count(&self) -> usize {
        self.interior.len() + self.boundary.len()
    }

    /// Node by combined index (interior first).
    pub fn node(&self, index: usize) -> &MeshNode<D> {
        if index < self.interior.len() {
            &self.interior[index]
        } else {
            &self.boundary[index - self.interior.len()].node
        }
    }

    pub fn is_boundary_index(&self, index: usize) -> bool {
        index >= self.interior.len()
    }
}

/// Samples `chart` at tensor quadrature nodes and computes normals, shape
/// operators and weights.
pub fn discretize<const D: usize, C: Chart<D> + ?Sized>(chart: &C, resolution: Resolution) -> Result<QuadratureMesh<D>> {
    let domain = chart.domain();
    let n = domain.dimension();
    if n + 1 != D {
        return Err(Error::invalid(format!("chart of dimension {n} in R^{D}")));
    }
    let (interior_params, interior_weights, boundary_params): (Vec<[f64; 2]>, Vec<f64>, Vec<[f64; 2]>) = match domain {
        Domain::Disk | Domain::Sphere => {
            if resolution.radial < 8 || resolution.angular < 8 {
                return Err(Error::invalid("surface resolution must be at least 8 × 8"));
            }
            let radial = gauss_legendre(resolution.radial, 0.0, 1.0);
            let angular = periodic_trapezoid(resolution.angular);
            let mut params = Vec::with_capacity(radial.len() * angular.len());
            let mut weights = Vec::with_capacity(params.capacity());
            for (rho, wr) in radial.nodes.iter().zip(&radial.weights) {
                for (phi, wp) in angular.nodes.iter().zip(&angular.weights) {
                    params.push([*rho, *phi]);
                    weights.push(wr * wp);
                }
            }
            let boundary = if domain == Domain::Disk {
                angular.nodes.iter().map(|&phi| [1.0, phi]).collect()
            } else {
                Vec::new()
            };
            (params, weights, boundary)
        }
        Domain::Interval { a, b } => {
            if resolution.radial < 16 {
                return Err(Error::invalid("curve resolution must be at least 16"));
            }
            let rule = gauss_legendre(resolution.radial, a, b);
            (
                rule.nodes.iter().map(|&u| [u, 0.0]).collect(),
                rule.weights.clone(),
                vec![[a, 0.0], [b, 0.0]],
            )
        }
        Domain::Circle => {
            if resolution.radial < 16 {
                return Err(Error::invalid("curve resolution must be at least 16"));
            }
            let rule = periodic_trapezoid(resolution.radial);
            (rule.nodes.iter().map(|&u| [u, 0.0]).collect(), rule.weights.clone(), Vec::new())
        }
    };

    let interior: Vec<(MeshNode<D>, f64)> = interior_params
        .par_iter()
        .zip(interior_weights.par_iter())
        .enumerate()
        .map(|(id, (u, w))| node_geometry(chart, n, *u, id).map(|(node, area, cond)| (MeshNode { weight: area * w, ..node }, cond)))
        .collect::<Result<Vec<_>>>()?;
    let offset = interior.len();
    let boundary: Vec<(BoundaryNode<D>, f64)> = boundary_params
        .par_iter()
        .enumerate()
        .map(|(j, u)| {
            let (node, _, cond) = node_geometry(chart, n, *u, offset + j)?;
            let jet = chart.jet1(*u);
            let (mu, ds) = match domain {
                Domain::Disk => {
                    let along = jet.dx[1];
                    let len = along.norm();
                    let t = along / len;
                    let out = jet.dx[0] - t * t.dot(&jet.dx[0]);
                    (out.normalize(), len * 2.0 * PI / resolution.angular as f64)
                }
                Domain::Interval { a, .. } => {
                    let s = if u[0] == a { -1.0 } else { 1.0 };
                    (jet.dx[0].normalize() * s, 1.0)
                }
                _ => unreachable!("closed domains have no boundary"),
            };
            Ok((BoundaryNode { node: MeshNode { weight: ds, ..node }, mu }, cond))
        })
        .collect::<Result<Vec<_>>>()?;

    let scale = interior.iter().map(|(p, _)| p.x.norm()).fold(1.0, f64::max);
    for (b, _) in &boundary {
        if b.node.x[D - 1].abs() > 1e-10 * scale {
            return Err(Error::Discretization {
                node: offset,
                detail: format!("boundary point off the supporting hyperplane: height {:e}", b.node.x[D - 1]),
            });
        }
    }

    let max_condition = interior.iter().map(|p| p.1).chain(boundary.iter().map(|b| b.1)).fold(1.0, f64::max);
    let mut interior: Vec<MeshNode<D>> = interior.into_iter().map(|p| p.0).collect();
    let mut boundary: Vec<BoundaryNode<D>> = boundary.into_iter().map(|b| b.0).collect();

    let support: Vec<f64> = interior.iter().map(|p| p.x.dot(&p.nu) * p.weight).collect();
    let volume = crate::linalg::pairwise_sum(&support);
    let flipped = volume < 0.0;
    if flipped {
        for p in interior.iter_mut().chain(boundary.iter_mut().map(|b| &mut b.node)) {
            p.nu = -p.nu;
            p.shape = -&p.shape;
        }
    }
    let boundary_cell = match domain {
        Domain::Disk => (0..boundary.len())
            .map(|j| (boundary[j].node.x - boundary[(j + 1) % boundary.len()].node.x).norm())
            .fold(0.0, f64::max),
        Domain::Interval { .. } => {
            // Distance from each endpoint to its nearest interior node.
            let first = interior.first().map_or(0.0, |p| (p.x - boundary[0].node.x).norm());
            let last = interior.last().map_or(0.0, |p| (p.x - boundary[1].node.x).norm());
            first.max(last)
        }
        _ => 0.0,
    };
    Ok(QuadratureMesh {
        interior,
        boundary,
        closed: domain.closed(),
        resolution: resolution.as_vec(n),
        max_condition,
        boundary_cell,
        flipped,
    })
}

/// Node geometry with unit area factor; returns `(node, sqrt(det g), cond g)`.
fn node_geometry<const D: usize, C: Chart<D> + ?Sized>(chart: &C, n: usize, u: [f64; 2], id: usize) -> Result<(MeshNode<D>, f64, f64)> {
    let jet = chart.jet2(u);
    let degenerate = |detail: String| Error::Discretization { node: id, detail };
    let (frame, r) = gram_schmidt(&jet.dx[..n]).ok_or_else(|| degenerate("rank-deficient chart derivatives".into()))?;
    let diag: Vec<f64> = (0..n).map(|i| r[(i, i)].abs()).collect();
    let svd = r.clone().singular_values();
    let cond = (svd.max() / svd.min()).powi(2);
    if !(cond < MAX_CONDITION) {
        return Err(degenerate(format!("metric condition number {cond:e}")));
    }
    let cross = cross_product(&jet.dx[..n]);
    let area = cross.norm();
    let nu = cross / area;
    let l = DMatrix::from_fn(n, n, |i, j| jet.ddx[i][j].dot(&nu));
    let rinv = r.clone().try_inverse().ok_or_else(|| degenerate("singular metric factor".into()))?;
    let shape = symmetrize(&(-(rinv.transpose() * l * rinv)));
    debug_assert!(diag.iter().all(|d| *d > 0.0));
    Ok((
        MeshNode {
            param: u,
            x: jet.x,
            nu,
            frame,
            shape,
            weight: 1.0,
        },
        area,
        cond,
    ))
}

/// Node geometry at one chart parameter, oriented like a mesh discretized
/// with the given `flipped` flag. The weight is the area factor `sqrt(det g)`.
pub fn node_at<const D: usize, C: Chart<D> + ?Sized>(chart: &C, u: [f64; 2], flipped: bool) -> Result<MeshNode<D>> {
    let n = chart.domain().dimension();
    let (mut node, area, _) = node_geometry(chart, n, u, 0)?;
    node.weight = area;
    if flipped {
        node.nu = -node.nu;
        node.shape = -&node.shape;
    }
    Ok(node)
}

/// `+1` when the chart's cross-product normal points out of the enclosed
/// region, `-1` otherwise (decided on a coarse discretization).
pub fn orientation_sign<const D: usize, C: Chart<D> + ?Sized>(chart: &C) -> Result<f64> {
    let res = if chart.domain().dimension() == 1 {
        Resolution::new(16, 1)
    } else {
        Resolution::square(8)
    };
    Ok(if discretize(chart, res)?.flipped { -1.0 } else { 1.0 })
}

/// Anisotropic principal curvatures and mean curvatures at one node.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureSpectrum<const D: usize> {
    /// `κ^F_i`, ascending.
    pub kappa: Vec<f64>,
    /// Unit anisotropic principal directions.
    pub directions: Vec<Vector<D>>,
    /// `H^F_r` for `r = 0..=n`.
    pub mean: Vec<f64>,
    /// Unnormalized anisotropic mean curvature `σ_1 = Σ κ^F_i`.
    pub hf: f64,
}

impl<const D: usize> CurvatureSpectrum<D> {
    pub fn from_kappa(kappa: Vec<f64>, directions: Vec<Vector<D>>) -> Self {
        let mean = mean_curvatures(&kappa);
        let hf = kappa.iter().sum();
        Self {
            kappa,
            directions,
            mean,
            hf,
        }
    }

    pub fn p_n(&self, t: f64) -> f64 {
        p_n(&self.kappa, t)
    }

    /// `H^F(t) = P'_n(t) / P_n(t)` after parallel motion by `t`.
    pub fn transported_mean_curvature(&self, t: f64) -> f64 {
        self.kappa.iter().map(|k| k / (1.0 + t * k)).sum()
    }

    pub fn max_kappa(&self) -> f64 {
        self.kappa.last().copied().unwrap_or(0.0)
    }

    pub fn min_kappa(&self) -> f64 {
        self.kappa.first().copied().unwrap_or(0.0)
    }
}

/// Curvature spectra for every node of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshSpectrum<const D: usize> {
    pub interior: Vec<CurvatureSpectrum<D>>,
    pub boundary: Vec<CurvatureSpectrum<D>>,
}

impl<const D: usize> MeshSpectrum<D> {
    /// Spectrum by combined node index (interior first).
    pub fn get(&self, index: usize) -> &CurvatureSpectrum<D> {
        if index < self.interior.len() {
            &self.interior[index]
        } else {
            &self.boundary[index - self.interior.len()]
        }
    }
}

/// `S_F = A_F(ν) W` in the node frame, with its spectrum.
///
/// Eigenvalues come from the symmetric matrix `A^{1/2} W A^{1/2}`, which is
/// similar to `S_F`; directions are `A^{1/2} v`.
pub fn anisotropic_weingarten<const D: usize>(f: &Anisotropy<D>, node: &MeshNode<D>) -> Result<(DMatrix<f64>, CurvatureSpectrum<D>)> {
    let a = f.a_f(&node.nu, &node.frame);
    let root = spd_sqrt(&a).ok_or(Error::Ellipticity {
        min_eigenvalue: crate::linalg::min_eigenvalue(&a),
    })?;
    let s_f = &a * &node.shape;
    let sym = symmetrize(&(&root * &node.shape * &root));
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut kappa = Vec::with_capacity(order.len());
    let mut directions = Vec::with_capacity(order.len());
    for i in order {
        kappa.push(eig.eigenvalues[i]);
        let v = &root * eig.eigenvectors.column(i);
        let mut d = Vector::<D>::zeros();
        for (a, e) in node.frame.iter().enumerate() {
            d += e * v[a];
        }
        let mut d = d.normalize();
        if let Some(first) = d.iter().find(|c| c.abs() > 1e-14) {
            if *first < 0.0 {
                d = -d;
            }
        }
        directions.push(d);
    }
    Ok((s_f, CurvatureSpectrum::from_kappa(kappa, directions)))
}

pub fn spectra<const D: usize>(f: &Anisotropy<D>, mesh: &QuadratureMesh<D>) -> Result<MeshSpectrum<D>> {
    let interior = mesh
        .interior
        .par_iter()
        .map(|p| anisotropic_weingarten(f, p).map(|s| s.1))
        .collect::<Result<Vec<_>>>()?;
    let boundary = mesh
        .boundary
        .par_iter()
        .map(|b| anisotropic_weingarten(f, &b.node).map(|s| s.1))
        .collect::<Result<Vec<_>>>()?;
    Ok(MeshSpectrum { interior, boundary })
}

/// Elementary symmetric polynomials `e_0..=e_n`.
pub fn elementary_symmetric(kappa: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; kappa.len() + 1];
    e[0] = 1.0;
    for (k, &v) in kappa.iter().enumerate() {
        for r in (1..=k + 1).rev() {
            e[r] += v * e[r - 1];
        }
    }
    e
}

/// Normalized `H_r = e_r / C(n, r)` for `r = 0..=n`.
pub fn mean_curvatures(kappa: &[f64]) -> Vec<f64> {
    let n = kappa.len();
    elementary_symmetric(kappa)
        .iter()
        .enumerate()
        .map(|(r, e)| e / binomial(n, r))
        .collect()
}

/// `P_n(t) = ∏ (1 + t κ_i)`.
pub fn p_n(kappa: &[f64], t: f64) -> f64 {
    kappa.iter().map(|k| 1.0 + t * k).product()
}

/// `P'_n(t)` by the product rule.
pub fn p_n_derivative(kappa: &[f64], t: f64) -> f64 {
    (0..kappa.len())
        .map(|i| {
            kappa[i]
                * kappa
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, k)| 1.0 + t * k)
                    .product::<f64>()
        })
        .sum()
}

/// `ω(x) = <Φ(ν(x)), -E_{n+1}>` over boundary nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CapillaryValues {
    pub values: Vec<f64>,
    pub min: f64,
    pub max: f64,
}

pub fn boundary_capillary_values<const D: usize>(f: &Anisotropy<D>, mesh: &QuadratureMesh<D>) -> CapillaryValues {
    let e = vertical::<D>();
    let values: Vec<f64> = mesh.boundary.iter().map(|b| -f.gradient(&b.node.nu).dot(&e)).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    CapillaryValues { values, min, max }
}

/// Shape of the normal perturbation `ψ(x) ν`.
///
/// `ψ` is a polynomial in ambient position,
/// `ψ(x) = (x_D / h)^m Re((u_1 + i u_2)^k) / R^k`, where `u` is the horizontal
/// offset from the boundary centroid, `h` the cap height and `R` the horizontal
/// extent. It is scaled to unit maximum. For curves the azimuthal factor is 1.
/// Since `x_D` vanishes to first order on the boundary, `m ≥ 2` leaves the
/// boundary position and normal unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerturbationMode {
    pub frequency: u32,
    pub cutoff_power: u32,
}

impl Default for PerturbationMode {
    fn default() -> Self {
        Self {
            frequency: 2,
            cutoff_power: 3,
        }
    }
}

/// Chart `X_ε = X + ε ψ(X) ν` built on a capillary base chart.
pub struct PerturbedChart<const D: usize, C> {
    base: C,
    amplitude: f64,
    mode: PerturbationMode,
    sign: f64,
    center: [f64; 2],
    height: f64,
    extent: f64,
    scale: f64,
}

impl<const D: usize, C: Chart<D>> PerturbedChart<D, C> {
    pub fn base(&self) -> &C {
        &self.base
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn mode(&self) -> PerturbationMode {
        self.mode
    }

    /// `(ψ, ∇ψ, ∇²ψ)` at an ambient point.
    fn profile(&self, x: &Vector<D>) -> (f64, Vector<D>, Matrix<D>) {
        let m = self.mode.cutoff_power as i32;
        let mf = m as f64;
        let h = self.height;
        let s = x[D - 1] / h;
        let cut = [
            s.powi(m),
            mf * s.powi(m - 1) / h,
            if m >= 2 { mf * (mf - 1.0) * s.powi(m - 2) / (h * h) } else { 0.0 },
        ];
        // Harmonic factor Re((a + ib)^k) with its gradient and Hessian.
        let (b, db, ddb) = if D >= 3 {
            let k = self.mode.frequency as i32;
            let kf = k as f64;
            let e = self.extent;
            let a = (x[0] - self.center[0]) / e;
            let c = (x[1] - self.center[1]) / e;
            let (re, _) = complex_pow(a, c, k);
            let (re1, im1) = if k >= 1 { complex_pow(a, c, k - 1) } else { (0.0, 0.0) };
            let (re2, im2) = if k >= 2 { complex_pow(a, c, k - 2) } else { (0.0, 0.0) };
            let k1 = kf / e;
            let k2 = kf * (kf - 1.0) / (e * e);
            (re, [k1 * re1, -k1 * im1], [[k2 * re2, -k2 * im2], [-k2 * im2, -k2 * re2]])
        } else {
            (1.0, [0.0; 2], [[0.0; 2]; 2])
        };
        let top = D - 1;
        let mut grad = Vector::<D>::zeros();
        let mut hess = Matrix::<D>::zeros();
        grad[top] = cut[1] * b;
        hess[(top, top)] = cut[2] * b;
        if D >= 3 {
            for i in 0..2 {
                grad[i] = cut[0] * db[i];
                hess[(i, top)] = cut[1] * db[i];
                hess[(top, i)] = cut[1] * db[i];
                for j in 0..2 {
                    hess[(i, j)] = cut[0] * ddb[i][j];
                }
            }
        }
        (self.scale * cut[0] * b, grad * self.scale, hess * self.scale)
    }

    fn normal(&self, jet: &ChartJet<D>) -> Vector<D> {
        let n = self.domain().dimension();
        let cross = cross_product(&jet.dx[..n]);
        cross * (self.sign / cross.norm())
    }
}

fn complex_pow(a: f64, b: f64, k: i32) -> (f64, f64) {
    let (mut re, mut im) = (1.0, 0.0);
    for _ in 0..k {
        (re, im) = (re * a - im * b, re * b + im * a);
    }
    (re, im)
}

impl<const D: usize, C: Chart<D>> Chart<D> for PerturbedChart<D, C> {
    fn domain(&self) -> Domain {
        self.base.domain()
    }

    fn position(&self, u: [f64; 2]) -> Vector<D> {
        let jet = self.base.jet1(u);
        let nu = self.normal(&jet);
        let (p, _, _) = self.profile(&jet.x);
        jet.x + nu * (self.amplitude * p)
    }

    fn jet1(&self, u: [f64; 2]) -> ChartJet<D> {
        self.jet(u, false)
    }

    fn jet2(&self, u: [f64; 2]) -> ChartJet<D> {
        self.jet(u, true)
    }
}

impl<const D: usize, C: Chart<D>> PerturbedChart<D, C> {
    /// Analytic jet of `X + ε ψ(X) ν`. The second derivatives of the base
    /// normal are the only differenced quantity; they enter multiplied by
    /// `ε ψ`, so their error stays small.
    fn jet(&self, u: [f64; 2], second: bool) -> ChartJet<D> {
        let n = self.domain().dimension();
        let eps = self.amplitude;
        let base = self.base.jet2(u);
        let (nu, dnu) = normal_with_derivatives(&base, n, self.sign).expect("base chart is an immersion");
        let (p, grad, hess) = self.profile(&base.x);
        let mut jet = ChartJet::at(base.x + nu * (eps * p));
        let dp: Vec<f64> = (0..n).map(|i| grad.dot(&base.dx[i])).collect();
        for i in 0..n {
            jet.dx[i] = base.dx[i] + nu * (eps * dp[i]) + dnu[i] * (eps * p);
        }
        if !second {
            return jet;
        }
        let ddnu = self.normal_second_derivatives(u, n);
        for i in 0..n {
            for j in 0..n {
                let ddp = (base.dx[i].transpose() * hess * base.dx[j])[(0, 0)] + grad.dot(&base.ddx[i][j]);
                jet.ddx[i][j] = base.ddx[i][j] + (nu * ddp + dnu[j] * dp[i] + dnu[i] * dp[j] + ddnu[i][j] * p) * eps;
            }
        }
        jet
    }

    /// `∂_j ∂_i ν` of the base chart by fourth-order differences of the
    /// analytic first derivatives, symmetrized.
    fn normal_second_derivatives(&self, u: [f64; 2], n: usize) -> [[Vector<D>; 2]; 2] {
        let extents = self.domain().extents();
        let mut out = [[Vector::<D>::zeros(); 2]; 2];
        for j in 0..n {
            let h = FD_STEP * extents[j];
            let at = |s: f64| {
                let mut v = u;
                v[j] += s * h;
                let jet = self.base.jet2(v);
                normal_with_derivatives(&jet, n, self.sign).expect("base chart is an immersion").1
            };
            let (m2, m1, p1, p2) = (at(-2.0), at(-1.0), at(1.0), at(2.0));
            for i in 0..n {
                out[i][j] = (m2[i] - m1[i] * 8.0 + p1[i] * 8.0 - p2[i]) / (12.0 * h);
            }
        }
        if n == 2 {
            let mixed = (out[0][1] + out[1][0]) * 0.5;
            out[0][1] = mixed;
            out[1][0] = mixed;
        }
        out
    }
}

/// Interior perturbation of a capillary chart along its normal.
///
/// Fails when the perturbed chart is not an immersion or dips below the
/// supporting hyperplane.
pub fn perturb_capillary<const D: usize, C: Chart<D>>(base: C, amplitude: f64, mode: PerturbationMode) -> Result<PerturbedChart<D, C>> {
    let domain = base.domain();
    if !matches!(domain, Domain::Disk | Domain::Interval { .. }) {
        return Err(Error::invalid("perturbations need a disk or interval chart with boundary"));
    }
    if mode.cutoff_power == 0 {
        return Err(Error::invalid("cutoff power must be at least 1"));
    }
    if !amplitude.is_finite() {
        return Err(Error::invalid("perturbation amplitude must be finite"));
    }
    let sign = orientation_sign(&base)?;

    let samples: Vec<(Vector<D>, bool)> = match domain {
        Domain::Interval { a, b } => (0..=128)
            .map(|i| (base.position([a + (b - a) * i as f64 / 128.0, 0.0]), i == 0 || i == 128))
            .collect(),
        _ => (0..=32)
            .flat_map(|i| (0..64).map(move |j| (i, j)))
            .map(|(i, j)| {
                let rho = i as f64 / 32.0;
                let phi = std::f64::consts::TAU * j as f64 / 64.0;
                (base.position([rho, phi]), i == 32)
            })
            .collect(),
    };
    let rim: Vec<&Vector<D>> = samples.iter().filter(|s| s.1).map(|s| &s.0).collect();
    let mut center = [0.0; 2];
    if D >= 3 {
        for k in 0..2 {
            center[k] = rim.iter().map(|x| x[k]).sum::<f64>() / rim.len() as f64;
        }
    }
    let height = samples.iter().map(|s| s.0[D - 1]).fold(0.0, f64::max);
    let extent = samples
        .iter()
        .map(|s| if D >= 3 { (s.0[0] - center[0]).hypot(s.0[1] - center[1]) } else { 0.0 })
        .fold(0.0, f64::max);
    if height <= 0.0 || (D >= 3 && extent <= 0.0) {
        return Err(Error::invalid("perturbation base chart is degenerate"));
    }
    let mut chart = PerturbedChart {
        base,
        amplitude,
        mode,
        sign,
        center,
        height,
        extent: extent.max(1.0e-300),
        scale: 1.0,
    };
    let peak = samples.iter().map(|s| chart.profile(&s.0).0.abs()).fold(0.0, f64::max);
    if peak <= 0.0 {
        return Err(Error::invalid("perturbation profile vanishes identically"));
    }
    chart.scale = 1.0 / peak;

    let res = if domain.dimension() == 1 {
        Resolution::new(64, 1)
    } else {
        Resolution::square(32)
    };
    let mesh = discretize(&chart, res).map_err(|e| Error::invalid(format!("invalid perturbation: {e}")))?;
    if let Some(p) = mesh.interior.iter().find(|p| p.x[D - 1] < 0.0) {
        return Err(Error::invalid(format!(
            "invalid perturbation: height {:e} below the supporting hyperplane",
            p.x[D - 1]
        )));
    }
    Ok(chart)
}

const KIND_INTERIOR: &str = "interior";
const KIND_BOUNDARY: &str = "boundary";

/// Writes the mesh as CSV: `node_id, kind, x_*, nu_*, mu_*, weight`,
/// followed by the chart parameters, tangent frame and shape operator.
/// `mu_*` is empty for interior nodes. Floats use shortest round-trip form.
pub fn write_mesh_csv<const D: usize>(mesh: &QuadratureMesh<D>, mut out: impl Write) -> std::io::Result<()> {
    let n = D - 1;
    let mut header = vec!["node_id".to_string(), "kind".to_string()];
    for prefix in ["x", "nu", "mu"] {
        header.extend((0..D).map(|k| format!("{prefix}_{k}")));
    }
    header.push("weight".into());
    header.extend((0..n).map(|k| format!("param_{k}")));
    for a in 0..n {
        header.extend((0..D).map(|k| format!("frame{a}_{k}")));
    }
    for a in 0..n {
        header.extend((0..n).map(|b| format!("shape_{a}{b}")));
    }
    writeln!(out, "{}", header.join(","))?;
    let row = |id: usize, kind: &str, node: &MeshNode<D>, mu: Option<&Vector<D>>| {
        let mut fields = vec![id.to_string(), kind.to_string()];
        fields.extend(node.x.iter().map(|v| v.to_string()));
        fields.extend(node.nu.iter().map(|v| v.to_string()));
        match mu {
            Some(m) => fields.extend(m.iter().map(|v| v.to_string())),
            None => fields.extend((0..D).map(|_| String::new())),
        }
        fields.push(node.weight.to_string());
        fields.extend(node.param[..n].iter().map(|v| v.to_string()));
        for e in &node.frame {
            fields.extend(e.iter().map(|v| v.to_string()));
        }
        for a in 0..n {
            fields.extend((0..n).map(|b| node.shape[(a, b)].to_string()));
        }
        fields.join(",")
    };
    for (i, p) in mesh.interior.iter().enumerate() {
        writeln!(out, "{}", row(i, KIND_INTERIOR, p, None))?;
    }
    for (j, b) in mesh.boundary.iter().enumerate() {
        writeln!(out, "{}", row(mesh.interior.len() + j, KIND_BOUNDARY, &b.node, Some(&b.mu)))?;
    }
    Ok(())
}

/// Reads a mesh written by [`write_mesh_csv`]. The mesh is closed when it has
/// no boundary rows.
pub fn read_mesh_csv<const D: usize>(input: impl BufRead) -> Result<QuadratureMesh<D>> {
    let n = D - 1;
    let columns = 2 + 3 * D + 1 + n + n * D + n * n;
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    for (line_no, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::invalid(format!("mesh file: {e}")))?;
        if line_no == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let bad = |msg: &str| Error::invalid(format!("mesh file line {}: {msg}", line_no + 1));
        if fields.len() != columns {
            return Err(bad(&format!("expected {columns} columns, found {}", fields.len())));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("not a number: {s:?}")));
        let vec_at = |start: usize| -> Result<Vector<D>> {
            let mut v = Vector::<D>::zeros();
            for k in 0..D {
                v[k] = num(fields[start + k])?;
            }
            Ok(v)
        };
        let x = vec_at(2)?;
        let nu = vec_at(2 + D)?;
        let weight = num(fields[2 + 3 * D])?;
        let mut param = [0.0; 2];
        for (k, p) in param.iter_mut().enumerate().take(n) {
            *p = num(fields[3 + 3 * D + k])?;
        }
        let frame_start = 3 + 3 * D + n;
        let frame = (0..n).map(|a| vec_at(frame_start + a * D)).collect::<Result<Vec<_>>>()?;
        let shape_start = frame_start + n * D;
        let mut shape = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                shape[(a, b)] = num(fields[shape_start + a * n + b])?;
            }
        }
        let node = MeshNode {
            param,
            x,
            nu,
            frame,
            shape,
            weight,
        };
        match fields[1] {
            KIND_INTERIOR => interior.push(node),
            KIND_BOUNDARY => boundary.push(BoundaryNode { node, mu: vec_at(2 + 2 * D)? }),
            other => return Err(bad(&format!("unknown node kind {other:?}"))),
        }
    }
    if interior.is_empty() {
        return Err(Error::invalid("mesh file has no interior nodes"));
    }
    let boundary_cell = (0..boundary.len())
        .map(|j| (boundary[j].node.x - boundary[(j + 1) % boundary.len()].node.x).norm())
        .fold(0.0, f64::max);
    // Tensor layout: rings of constant first parameter, stored ring by ring.
    let mut resolution = vec![interior.len()];
    if n == 2 {
        let rings = 1 + interior.windows(2).filter(|w| w[0].param[0] != w[1].param[0]).count();
        if interior.len() % rings == 0 {
            resolution = vec![rings, interior.len() / rings];
        }
    }
    Ok(QuadratureMesh {
        closed: boundary.is_empty(),
        resolution,
        interior,
        boundary,
        max_condition: f64::NAN,
        boundary_cell,
        flipped: false,
    })
}
