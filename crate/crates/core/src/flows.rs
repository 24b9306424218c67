//! Parallel maps along the shifted Cahn-Hoffman field, touching radii of
//! translated Wulff shapes, and the checks built on them: transport of
//! curvature, sweepout of the enclosed region, elliptic points and the
//! Maclaurin chain.
//!
//! Throughout, `w = ω₀ E^F_{n+1}` and `K = W + w` is the translated Wulff
//! body with support function `h_K(z) = F(z) + <w, z>`. The touching radius
//! of a node `x` seen from a base point `y` is the gauge `r(x) = g_K(x - y)`,
//! i.e. the unique `r` with `x ∈ W_r(y + r w)`.

mod solid;

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::DMatrix;
use rand::Rng;

pub use solid::{point_in_polygon, Solid};

use crate::anisotropy::{seeded_rng, Anisotropy};
use crate::capillary::CapillaryParams;
use crate::error::{Error, Result};
use crate::integrals::{enclosed_volume, CAPILLARY_CERTIFICATION};
use crate::linalg::{cross_product, pairwise_sum, Vector};
use crate::report::VerificationReport;
use crate::sphere;
use crate::surface::{
    anisotropic_weingarten, boundary_capillary_values, discretize, elementary_symmetric, normal_with_derivatives, orientation_sign, p_n_derivative, spectra, Chart,
    ChartJet, CurvatureSpectrum, Domain, MeshNode, MeshSpectrum, QuadratureMesh, Resolution,
};

/// Relative slack allowed when comparing a time against `t_max`.
const TIME_SLACK: f64 = 1e-12;

/// `F°(x* - y - r w) = r` must hold to this at a contact node.
const CONTACT_TOLERANCE: f64 = 1e-10;

const JACOBIAN_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowDirection {
    /// `φ_t(x) = x + t (Φ(ν) + w)`.
    Outward,
    /// `ζ(x, t) = x - t (Φ(ν) + w)`.
    Inward,
}

/// Nodewise offsets `±t (Φ(ν) + w)` of a mesh, interior nodes first.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelFamily<const D: usize> {
    pub t: f64,
    pub direction: FlowDirection,
    pub offsets: Vec<Vector<D>>,
}

impl<const D: usize> ParallelFamily<D> {
    pub fn new(f: &Anisotropy<D>, params: &CapillaryParams<D>, mesh: &QuadratureMesh<D>, t: f64, direction: FlowDirection) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::invalid(format!("offset time must be finite and non-negative, got {t}")));
        }
        let s = match direction {
            FlowDirection::Outward => t,
            FlowDirection::Inward => -t,
        };
        let w = params.shift();
        let offsets = mesh.all_nodes().map(|p| (f.gradient(&p.nu) + w) * s).collect();
        Ok(Self { t, direction, offsets })
    }

    /// Moved node positions in combined node order.
    pub fn positions(&self, mesh: &QuadratureMesh<D>) -> Vec<Vector<D>> {
        mesh.all_nodes().zip(&self.offsets).map(|(p, o)| p.x + o).collect()
    }
}

/// Chart of the parallel surface `X + t (Φ(ν) + w)`; negative `t` gives the
/// inward map `ζ(·, -t)`.
///
/// First derivatives are exact given the base second derivatives:
/// `∂_i X_t = ∂_i X + t D²F(ν) ∂_i ν`.
pub struct OffsetChart<'a, const D: usize, C> {
    base: C,
    anisotropy: &'a Anisotropy<D>,
    shift: Vector<D>,
    t: f64,
    sign: f64,
}

impl<'a, const D: usize, C: Chart<D>> OffsetChart<'a, D, C> {
    pub fn new(f: &'a Anisotropy<D>, params: &CapillaryParams<D>, base: C, t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::invalid("offset time must be finite"));
        }
        let sign = orientation_sign(&base)?;
        Ok(Self {
            base,
            anisotropy: f,
            shift: params.shift(),
            t,
            sign,
        })
    }

    pub fn base(&self) -> &C {
        &self.base
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// `X + s (Φ(ν) + w)` for an arbitrary time `s`.
    fn displaced(&self, u: [f64; 2], s: f64) -> Vector<D> {
        let jet = self.base.jet1(u);
        let nu = self.normal(&jet);
        jet.x + (self.anisotropy.gradient(&nu) + self.shift) * s
    }

    fn normal(&self, jet: &ChartJet<D>) -> Vector<D> {
        let n = self.base.domain().dimension();
        let c = cross_product(&jet.dx[..n]);
        c * (self.sign / c.norm())
    }
}

impl<'a, const D: usize, C: Chart<D>> Chart<D> for OffsetChart<'a, D, C> {
    fn domain(&self) -> Domain {
        self.base.domain()
    }

    fn position(&self, u: [f64; 2]) -> Vector<D> {
        self.displaced(u, self.t)
    }

    fn jet1(&self, u: [f64; 2]) -> ChartJet<D> {
        let n = self.domain().dimension();
        let base = self.base.jet2(u);
        let (nu, dnu) = normal_with_derivatives(&base, n, self.sign).expect("base chart is an immersion");
        let jet = self.anisotropy.jet(&nu);
        let mut out = ChartJet::at(base.x + (jet.gradient + self.shift) * self.t);
        for i in 0..n {
            out.dx[i] = base.dx[i] + jet.hessian * dnu[i] * self.t;
        }
        out
    }
}

/// Discretizes the outward parallel surface `φ_t(Σ)` at the same parameter
/// nodes as the base chart, so node indices correspond.
///
/// No self-intersection check is made.
pub fn parallel_outward<const D: usize, C: Chart<D>>(
    f: &Anisotropy<D>,
    params: &CapillaryParams<D>,
    chart: C,
    t: f64,
    resolution: Resolution,
) -> Result<QuadratureMesh<D>> {
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("outward time must be non-negative, got {t}")));
    }
    discretize(&OffsetChart::new(f, params, chart, t)?, resolution)
}

/// Area Jacobian of `φ_t`: `P_n(t) = ∏ (1 + t κ_i)`.
pub fn jacobian_outward<const D: usize>(spectrum: &CurvatureSpectrum<D>, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("outward time must be non-negative, got {t}")));
    }
    Ok(spectrum.p_n(t))
}

/// `1 / max κ_i`, or a hypothesis violation when no curvature is positive.
pub fn max_inward_time<const D: usize>(spectrum: &CurvatureSpectrum<D>) -> Result<f64> {
    let k = spectrum.max_kappa();
    if !(k > 0.0) {
        return Err(Error::HypothesisViolation {
            detail: format!("largest anisotropic principal curvature {k} is not positive"),
            nodes: Vec::new(),
        });
    }
    Ok(1.0 / k)
}

/// Jacobian of `ζ(x, t)` on `Z`: `(F(ν) + ω₀<ν, E^F>) ∏ (1 - t κ_i)`.
pub fn jacobian_inward<const D: usize>(
    f: &Anisotropy<D>,
    params: &CapillaryParams<D>,
    node: &MeshNode<D>,
    spectrum: &CurvatureSpectrum<D>,
    t: f64,
) -> Result<f64> {
    let t_max = max_inward_time(spectrum)?;
    if !(t > 0.0) || t > t_max * (1.0 + TIME_SLACK) {
        return Err(Error::invalid(format!("inward time {t} outside (0, {t_max}]")));
    }
    Ok(params.weight(f, &node.nu) * spectrum.kappa.iter().map(|k| 1.0 - t * k).product::<f64>())
}

/// Numerical Jacobian of `ζ` at `(u, t)`: `|det[∂_u ζ, ∂_t ζ]| / sqrt(det g)`,
/// with fourth-order differences in every variable.
pub fn numeric_inward_jacobian<const D: usize, C: Chart<D>>(
    f: &Anisotropy<D>,
    params: &CapillaryParams<D>,
    chart: C,
    u: [f64; 2],
    t: f64,
) -> Result<f64> {
    let n = chart.domain().dimension();
    let area = cross_product(&chart.jet1(u).dx[..n]).norm();
    let offset = OffsetChart::new(f, params, &chart, 0.0)?;
    let zeta = |v: [f64; 2], s: f64| offset.displaced(v, -s);
    let stencil = |g: &dyn Fn(f64) -> Vector<D>, h: f64| (g(-2.0 * h) - g(-h) * 8.0 + g(h) * 8.0 - g(2.0 * h)) / (12.0 * h);
    let mut m = DMatrix::<f64>::zeros(D, D);
    for i in 0..n {
        let d = stencil(
            &|s| {
                let mut v = u;
                v[i] += s;
                zeta(v, t)
            },
            JACOBIAN_STEP,
        );
        m.column_mut(i).copy_from(&d);
    }
    let d = stencil(&|s| zeta(u, t + s), JACOBIAN_STEP);
    m.column_mut(n).copy_from(&d);
    Ok(m.determinant().abs() / area)
}

/// Per-node maximal inward times `t_max(x) = 1/max κ_i(x)`, combined order.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibleCylinder {
    pub t_max: Vec<f64>,
}

impl AdmissibleCylinder {
    pub fn new<const D: usize>(mesh: &QuadratureMesh<D>, spectrum: &MeshSpectrum<D>) -> Result<Self> {
        let mut bad = Vec::new();
        let mut t_max = Vec::with_capacity(mesh.node_count());
        for i in 0..mesh.node_count() {
            match max_inward_time(spectrum.get(i)) {
                Ok(t) => t_max.push(t),
                Err(_) => {
                    bad.push(i);
                    t_max.push(f64::NAN);
                }
            }
        }
        if !bad.is_empty() {
            return Err(Error::HypothesisViolation {
                detail: format!("no positive principal curvature at {} nodes", bad.len()),
                nodes: bad,
            });
        }
        Ok(Self { t_max })
    }

    pub fn get(&self, index: usize) -> f64 {
        self.t_max[index]
    }

    pub fn contains(&self, index: usize, t: f64) -> bool {
        t > 0.0 && t <= self.t_max[index] * (1.0 + TIME_SLACK)
    }
}

/// `∫_Σ ∫_0^{t_max} J dt dA`, with the inner integral done exactly:
/// `∫_0^T ∏(1 - tκ_i) dt = Σ_r (-1)^r e_r T^{r+1}/(r+1)`.
pub fn cylinder_volume<const D: usize>(f: &Anisotropy<D>, params: &CapillaryParams<D>, mesh: &QuadratureMesh<D>, spectrum: &MeshSpectrum<D>) -> Result<f64> {
    let mut terms = Vec::with_capacity(mesh.interior.len());
    for (p, s) in mesh.interior.iter().zip(&spectrum.interior) {
        let t = max_inward_time(s)?;
        let e = elementary_symmetric(&s.kappa);
        let inner: f64 = e
            .iter()
            .enumerate()
            .map(|(r, er)| if r % 2 == 0 { 1.0 } else { -1.0 } * er * t.powi(r as i32 + 1) / (r as f64 + 1.0))
            .sum();
        terms.push(params.weight(f, &p.nu) * inner * p.weight);
    }
    Ok(pairwise_sum(&terms))
}

/// Per-quantity thresholds of [`parallel_transport_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParallelTolerances {
    pub curvature: f64,
    pub jacobian: f64,
    pub mean_curvature: f64,
    pub normal: f64,
    pub capillary: f64,
}

impl Default for ParallelTolerances {
    fn default() -> Self {
        Self {
            curvature: 1e-7,
            jacobian: 1e-6,
            mean_curvature: 1e-7,
            normal: 1e-8,
            capillary: 1e-8,
        }
    }
}

pub const DEFAULT_TIMES: [f64; 3] = [0.1, 0.5, 1.0];

/// Recomputes the geometry of `φ_t(Σ)` from scratch and compares it with the
/// transport laws: `κ/(1+tκ)`, area ratio `P_n(t)`, `H^F(t) = P'_n/P_n`,
/// preserved normals and preserved boundary capillary values.
///
/// The residual is the worst error divided by its own threshold, so the
/// report passes when it is at most 1.
pub fn parallel_transport_check<const D: usize, C: Chart<D>>(
    f: &Anisotropy<D>,
    params: &CapillaryParams<D>,
    chart: C,
    resolution: Resolution,
    times: &[f64],
    tol: ParallelTolerances,
) -> Result<VerificationReport> {
    if times.is_empty() {
        return Err(Error::invalid("parallel transport needs at least one time"));
    }
    let base = discretize(&chart, resolution)?;
    let base_spectrum = spectra(f, &base)?;
    let mut worst = [0.0f64; 6];
    let mut capillary_base = 0.0f64;
    if !base.boundary.is_empty() {
        let v = boundary_capillary_values(f, &base);
        capillary_base = (v.max - params.omega0).abs().max((v.min - params.omega0).abs());
    }
    for &t in times {
        let off = parallel_outward(f, params, &chart, t, resolution)?;
        if off.node_count() != base.node_count() {
            return Err(Error::numerical("offset mesh has a different node layout"));
        }
        let spec = spectra(f, &off)?;
        for i in 0..base.node_count() {
            let (s0, s1) = (base_spectrum.get(i), spec.get(i));
            for (k0, k1) in s0.kappa.iter().zip(&s1.kappa) {
                worst[0] = worst[0].max((k1 - k0 / (1.0 + t * k0)).abs());
            }
            let p = s0.p_n(t);
            worst[2] = worst[2].max((s1.hf - p_n_derivative(&s0.kappa, t) / p).abs());
            worst[3] = worst[3].max((off.node(i).nu - base.node(i).nu).norm());
            if i < base.interior.len() {
                let ratio = off.interior[i].weight / base.interior[i].weight;
                worst[1] = worst[1].max((ratio - p).abs() / p);
            }
        }
        if !off.boundary.is_empty() {
            let v = boundary_capillary_values(f, &off);
            let drift = (v.max - params.omega0).abs().max((v.min - params.omega0).abs());
            worst[4] = worst[4].max(drift);
            for b in &off.boundary {
                worst[5] = worst[5].max(b.node.x[D - 1].abs());
            }
        }
    }
    let limits = [tol.curvature, tol.jacobian, tol.mean_curvature, tol.normal, tol.capillary, tol.capillary];
    let residual = worst.iter().zip(&limits).map(|(e, l)| e / l).fold(0.0, f64::max);
    let mut report = VerificationReport::new("parallel", residual, 1.0, 1.0)
        .with_resolution(&base.resolution)
        .with_value("curvature_error", worst[0])
        .with_value("jacobian_error", worst[1])
        .with_value("mean_curvature_error", worst[2])
        .with_value("normal_error", worst[3])
        .with_value("capillary_drift", worst[4])
        .with_value("boundary_height", worst[5])
        .with_value("times", times.len() as f64)
        .with_value("max_time", times.iter().copied().fold(0.0, f64::max));
    if capillary_base > CAPILLARY_CERTIFICATION {
        report.fail_with(format!(
            "hypothesis violated: base boundary capillary drift {capillary_base:e} exceeds {CAPILLARY_CERTIFICATION:e}"
        ));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Largest `W_r(y + r w)` inside the region: minimum of `r(·)`.
    Inner,
    /// Smallest `W_r(y + r w)` enclosing the surface: maximum of `r(·)`.
    Outer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContactKind {
    Interior,
    Boundary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TouchingResult<const D: usize> {
    pub base: Vector<D>,
    pub radius: f64,
    /// Combined node index (interior first).
    pub contact_node: usize,
    pub kind: ContactKind,
    /// `r(x)` for every node in combined order.
    pub radii: Vec<f64>,
}

fn contact_failure(node: usize, detail: impl std::fmt::Display) -> Error {
    Error::NumericalFailure {
        detail: format!("touching radius at node {node}: {detail}"),
        best: None,
    }
}

fn check_contact<const D: usize>(f: &Anisotropy<D>, w: &Vector<D>, x: &Vector<D>, y: &Vector<D>, r: f64, node: usize) -> Result<()> {
    let g = f.dual(&(x - y - w * r));
    if (g - r).abs() > CONTACT_TOLERANCE * r.max(1.0) {
        return Err(contact_failure(node, format!("F°(x - y - r w) = {g} differs from r = {r}")));
    }
    Ok(())
}

/// Touching radius field `r(x) = g_K(x - y)` and its extremum over nodes.
///
/// Ties go to the lowest node index.
pub fn touching_radius<const D: usize>(
    f: &Anisotropy<D>,
    params: &CapillaryParams<D>,
    mesh: &QuadratureMesh<D>,
    y: &Vector<D>,
    side: Side,
) -> Result<TouchingResult<D>> {
    if side == Side::Outer && y[D - 1].abs() > 1e-12 * y.norm().max(1.0) {
        return Err(Error::invalid("outer touching needs a base point on the wetting face"));
    }
    let w = params.shift();
    let radii = mesh
        .all_nodes()
        .enumerate()
        .map(|(i, p)| {
            f.shifted_dual_with_gradient(&(p.x - y), &w, None)
                .map(|r| r.0 .0)
                .map_err(|e| contact_failure(i, e))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (i, r) in radii.iter().enumerate() {
        let better = match side {
            Side::Inner => *r < radii[best],
            Side::Outer => *r > radii[best],
        };
        if better {
            best = i;
        }
    }
    let radius = radii[best];
    check_contact(f, &w, &mesh.node(best).x, y, radius, best)?;
    Ok(TouchingResult {
        base: *y,
        radius,
        contact_node: best,
        kind: if mesh.is_boundary_index(best) {
            ContactKind::Boundary
        } else {
            ContactKind::Interior
        },
        radii,
    })
}

/// Outer contact node with its curvature certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticPoint<const D: usize> {
    pub touching: TouchingResult<D>,
    pub min_kappa: f64,
    /// `1 / r₀`.
    pub bound: f64,
    /// `min κ_i - 1/r₀`.
    pub slack: f64,
}

/// Finds the first contact of shrinking Wulff shapes `W_r(y + r w)` with
/// the surface from outside and certifies `min κ_i ≥ 1/r₀ - tolerance` there.
///
/// A failed certificate is a resolution problem, reported as
/// [`Error::Discretization`].
pub fn elliptic_point<const D: usize>(
    f: &Anisotropy<D>,
    params: &CapillaryParams<D>,
    mesh: &QuadratureMesh<D>,
    spectrum: &MeshSpectrum<D>,
    y: &Vector<D>,
    tolerance: f64,
) -> Result<EllipticPoint<D>> {
    let point = outer_contact(f, params, mesh, spectrum, y)?;
    if point.slack < -tolerance {
        return Err(Error::Discretization {
            node: point.touching.contact_node,
            detail: format!(
                "min curvature {} below 1/r0 = {} by more than {tolerance:e}; refine the mesh",
                point.min_kappa, point.bound
            ),
        });
    }
    Ok(point)
}

fn outer_contact<const D: usize>(
    f: &Anisotropy<D>,
    params: &CapillaryParams<D>,
    mesh: &QuadratureMesh<D>,
    spectrum: &MeshSpectrum<D>,
    y: &Vector<D>,
) -> Result<EllipticPoint<D>> {
    let touching = touching_radius(f, params, mesh, y, Side::Outer)?;
    let min_kappa = spectrum.get(touching.contact_node).min_kappa();
    let bound = 1.0 / touching.radius;
    Ok(EllipticPoint {
        slack: min_kappa - bound,
        min_kappa,
        bound,
        touching,
    })
}

/// Uniform points in the relative interior of the wetting face, the flat
/// region of `{x_{n+1} = 0}` bounded by the surface boundary.
pub fn sample_wetting_face<const D: usize>(mesh: &QuadratureMesh<D>, count: usize, seed: u64) -> Result<Vec<Vector<D>>> {
    if mesh.closed || mesh.boundary.is_empty() {
        return Err(Error::invalid("closed surfaces have no wetting face"));
    }
    let mut rng = seeded_rng(seed);
    let mut out = Vec::with_capacity(count);
    if D == 2 {
        let (a, b) = (mesh.boundary[0].node.x[0], mesh.boundary[1].node.x[0]);
        let (lo, hi) = (a.min(b), a.max(b));
        while out.len() < count {
            let s: f64 = rng.gen();
            if s > 0.0 {
                out.push(Vector::<D>::from_fn(|k, _| if k == 0 { lo + s * (hi - lo) } else { 0.0 }));
            }
        }
        return Ok(out);
    }
    let poly: Vec<[f64; 2]> = mesh.boundary.iter().map(|b| [b.node.x[0], b.node.x[1]]).collect();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &poly {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(Error::numerical("could not sample the wetting face"));
        }
        let c = [lo[0] + rng.gen::<f64>() * (hi[0] - lo[0]), lo[1] + rng.gen::<f64>() * (hi[1] - lo[1])];
        if point_in_polygon(&poly, c) {
            out.push(Vector::<D>::from_fn(|k, _| if k < 2 { c[k] } else { 0.0 }));
        }
    }
    Ok(out)
}

/// Elliptic-point certificates for `points` random wetting-face base points.
pub fn elliptic_check<const D: usize>(
    f: &Anisotropy<D>,
    params: &CapillaryParams<D>,
    mesh: &QuadratureMesh<D>,
    spectrum: &MeshSpectrum<D>,
    points: usize,
    seed: u64,
    tolerance: f64,
) -> Result<VerificationReport> {
    let bases = sample_wetting_face(mesh, points, seed)?;
    let mut worst = f64::INFINITY;
    let mut radii = (f64::INFINITY, 0.0f64);
    let mut boundary_contacts = 0usize;
    for y in &bases {
        let p = outer_contact(f, params, mesh, spectrum, y)?;
        worst = worst.min(p.slack);
        radii = (radii.0.min(p.touching.radius), radii.1.max(p.touching.radius));
        if p.touching.kind == ContactKind::Boundary {
            boundary_contacts += 1;
        }
    }
    Ok(VerificationReport::new("elliptic", (-worst).max(0.0), 1.0, tolerance)
        .with_resolution(&mesh.resolution)
        .with_value("points", points as f64)
        .with_value("worst_slack", worst)
        .with_value("min_radius", radii.0)
        .with_value("max_radius", radii.1)
        .with_value("boundary_contacts", boundary_contacts as f64))
}

/// Maximizers of `<v, z>/h_K(z)` at the cell centres of a cube map, used to
/// bound `g_K` from below cheaply: `g_K(v) ≥ <v, z0>/h_K(z0)` for any `z0`.
struct DirectionTable<const D: usize> {
    cells: usize,
    entries: Vec<(Vector<D>, f64)>,
}

impl<const D: usize> DirectionTable<D> {
    fn new(f: &Anisotropy<D>, w: &Vector<D>, cells: usize) -> Result<Self> {
        let per_face = cells.pow(D as u32 - 1);
        let mut entries = Vec::with_capacity(2 * D * per_face);
        for face in 0..2 * D {
            let (axis, sign) = (face / 2, if face % 2 == 0 { 1.0 } else { -1.0 });
            for c in 0..per_face {
                let mut v = Vector::<D>::zeros();
                v[axis] = sign;
                let mut rest = c;
                for other in (0..D).filter(|&k| k != axis) {
                    let i = rest % cells;
                    rest /= cells;
                    v[other] = 2.0 * (i as f64 + 0.5) / cells as f64 - 1.0;
                }
                let (_, z) = f.shifted_dual_with_gradient(&v, w, None)?;
                entries.push((z, f.value(&z) + w.dot(&z)));
            }
        }
        Ok(Self { cells, entries })
    }

    fn lookup(&self, v: &Vector<D>) -> &(Vector<D>, f64) {
        let axis = v.iamax();
        let a = v[axis].abs();
        if a == 0.0 {
            return &self.entries[0];
        }
        let face = 2 * axis + usize::from(v[axis] < 0.0);
        let mut index = 0;
        let mut scale = 1;
        for other in (0..D).filter(|&k| k != axis) {
            let s = ((v[other] / a + 1.0) * 0.5 * self.cells as f64) as usize;
            index += s.min(self.cells - 1) * scale;
            scale *= self.cells;
        }
        &self.entries[face * self.cells.pow(D as u32 - 1) + index]
    }

    fn lower_bound(&self, v: &Vector<D>) -> f64 {
        let (z, h) = self.lookup(v);
        (v.dot(z) / h).max(0.0)
    }
}

/// How a sweepout sample was realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepoutCase {
    /// Interior contact with `t ≤ t_max(x*)`.
    Covered,
    /// Contact time beyond `t_max(x*)`.
    Uncovered,
    /// Boundary contact within the boundary-cell threshold of an interior
    /// contact; treated as a grid artifact and classified by the interior node.
    BoundaryArtifact,
    /// Boundary contact beyond the threshold.
    BoundaryContact,
}

impl SweepoutCase {
    pub fn label(&self) -> &'static str {
        match self {
            SweepoutCase::Covered => "covered",
            SweepoutCase::Uncovered => "uncovered",
            SweepoutCase::BoundaryArtifact => "boundary-artifact",
            SweepoutCase::BoundaryContact => "boundary-contact",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepoutRow<const D: usize> {
    pub sample: usize,
    pub y: Vector<D>,
    pub radius: f64,
    pub contact_node: usize,
    pub t_max: f64,
    pub slack: f64,
    pub case: SweepoutCase,
    /// Whether radius and `t_max` come from a continuous refinement of the
    /// nodal contact on the chart.
    pub refined: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepoutOptions {
    pub samples: usize,
    pub seed: u64,
    /// Relative allowance in `t ≤ t_max(x*) (1 + tolerance)`.
    pub coverage_tolerance: f64,
    /// Cube-map cells per face edge for the lower-bound table.
    pub table_cells: usize,
}

impl Default for SweepoutOptions {
    fn default() -> Self {
        Self {
            samples: 10_000,
            seed: 0,
            coverage_tolerance: 1e-6,
            table_cells: 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepoutResult<const D: usize> {
    pub report: VerificationReport,
    pub rows: Vec<SweepoutRow<D>>,
}

struct InnerContact<const D: usize> {
    best: (f64, usize),
    interior: (f64, usize, Vector<D>),
}

/// Minimum of `r(·)` over all nodes and over interior nodes, pruned with the
/// direction table: a node is solved exactly only if its lower bound beats
/// the current interior minimum.
fn inner_contact<const D: usize>(
    f: &Anisotropy<D>,
    w: &Vector<D>,
    table: &DirectionTable<D>,
    nodes: &[Vector<D>],
    interior: usize,
    y: &Vector<D>,
    bounds: &mut Vec<f64>,
) -> Result<InnerContact<D>> {
    bounds.clear();
    bounds.extend(nodes.iter().map(|x| table.lower_bound(&(x - y))));
    let exact = |i: usize| -> Result<(f64, Vector<D>)> {
        let v = nodes[i] - y;
        let (z0, _) = table.lookup(&v);
        let ((r, _), z) = f.shifted_dual_with_gradient(&v, w, Some(z0)).map_err(|e| contact_failure(i, e))?;
        Ok((r, z))
    };
    let argmin = |range: std::ops::Range<usize>| {
        range.min_by(|&a, &b| bounds[a].total_cmp(&bounds[b]).then(a.cmp(&b))).expect("nonempty range")
    };
    let j0 = argmin(0..interior);
    let (r0, z0) = exact(j0)?;
    let mut best_interior = (r0, j0, z0);
    let mut best = (r0, j0);
    let mut candidates: Vec<usize> = (0..nodes.len()).filter(|&i| i != j0 && bounds[i] < r0).collect();
    candidates.sort_by(|&a, &b| bounds[a].total_cmp(&bounds[b]).then(a.cmp(&b)));
    for i in candidates {
        if bounds[i] >= best_interior.0 {
            break;
        }
        let (r, z) = exact(i)?;
        if (r, i) < best {
            best = (r, i);
        }
        if i < interior && (r, i) < (best_interior.0, best_interior.1) {
            best_interior = (r, i, z);
        }
    }
    Ok(InnerContact {
        best,
        interior: best_interior,
    })
}

/// A contact found by minimizing `r(u)` over chart parameters.
struct RefinedContact<const D: usize> {
    radius: f64,
    t_max: f64,
    node: MeshNode<D>,
}

/// Pattern search for a local minimum of `r(u) = g_K(X(u) - y)` started at
/// the nodal contact, with initial steps of one grid cell.
fn refine_contact<const D: usize>(
    f: &Anisotropy<D>,
    w: &Vector<D>,
    chart: &dyn Chart<D>,
    mesh: &QuadratureMesh<D>,
    start: [f64; 2],
    y: &Vector<D>,
) -> Result<RefinedContact<D>> {
    let cells = |k: usize| mesh.resolution.get(k).copied().unwrap_or(1).max(1) as f64;
    // Keep clear of the polar singularity of disk and sphere charts.
    let pole = 1e-6;
    let (lo, hi, mut step) = match chart.domain() {
        Domain::Disk => ([pole, f64::NEG_INFINITY], [1.0, f64::INFINITY], [1.0 / cells(0), 2.0 * PI / cells(1)]),
        Domain::Sphere => ([pole, f64::NEG_INFINITY], [1.0 - pole, f64::INFINITY], [1.0 / cells(0), 2.0 * PI / cells(1)]),
        Domain::Interval { a, b } => ([a, 0.0], [b, 0.0], [(b - a) / cells(0), 0.0]),
        Domain::Circle => ([f64::NEG_INFINITY, 0.0], [f64::INFINITY, 0.0], [2.0 * PI / cells(0), 0.0]),
    };
    let radius = |u: [f64; 2]| -> Result<f64> { Ok(f.shifted_dual_with_gradient(&(chart.position(u) - y), w, None)?.0 .0) };
    let moves: &[[f64; 2]] = if chart.domain().dimension() == 1 {
        &[[1.0, 0.0], [-1.0, 0.0]]
    } else {
        &[[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [1.0, 1.0], [-1.0, -1.0], [1.0, -1.0], [-1.0, 1.0]]
    };
    let mut u = [start[0].clamp(lo[0], hi[0]), start[1]];
    let mut best = radius(u)?;
    let stop = step[0] * 1e-9;
    for _ in 0..2000 {
        if step[0] < stop {
            break;
        }
        let mut moved = false;
        for m in moves {
            let v = [(u[0] + m[0] * step[0]).clamp(lo[0], hi[0]), (u[1] + m[1] * step[1]).clamp(lo[1], hi[1])];
            let r = radius(v)?;
            if r < best {
                best = r;
                u = v;
                moved = true;
                break;
            }
        }
        if !moved {
            step = [step[0] * 0.5, step[1] * 0.5];
        }
    }
    let node = crate::surface::node_at(chart, u, mesh.flipped)?;
    let (_, spectrum) = anisotropic_weingarten(f, &node)?;
    let t_max = max_inward_time(&spectrum).unwrap_or(f64::INFINITY);
    Ok(RefinedContact { radius: best, t_max, node })
}

/// Checks that uniform samples `y` of the enclosed region are reached by
/// `ζ(x*, r_y)` with `(x*, r_y)` in the admissible cylinder, where `r_y` is
/// the inner touching radius and `x*` its contact node.
///
/// A contact at a boundary node counts as an artifact when some interior
/// node is within one boundary cell of it, measured in radius through the
/// Lipschitz bound `|Δr| ≤ |Δx| / min h_K`.
///
/// Nodal contacts are accurate to one grid cell; near a focal point `t_max`
/// varies quickly across that cell. When `chart` is given, a contact that
/// fails the nodal test is refined by minimizing over chart parameters and
/// the refined contact decides the case.
pub fn sweepout_check<const D: usize>(
    f: &Anisotropy<D>,
    params: &CapillaryParams<D>,
    mesh: &QuadratureMesh<D>,
    spectrum: &MeshSpectrum<D>,
    chart: Option<&dyn Chart<D>>,
    options: SweepoutOptions,
) -> Result<SweepoutResult<D>> {
    if options.samples == 0 {
        return Err(Error::invalid("sweepout needs at least one sample"));
    }
    let bad: Vec<usize> = (0..mesh.interior.len()).filter(|&i| !(spectrum.interior[i].hf > 0.0)).collect();
    if !bad.is_empty() {
        return Err(Error::HypothesisViolation {
            detail: format!("anisotropic mean curvature is not positive at {} nodes", bad.len()),
            nodes: bad,
        });
    }
    if !mesh.boundary.is_empty() {
        let v = boundary_capillary_values(f, mesh);
        if v.max > params.omega0 + CAPILLARY_CERTIFICATION {
            return Err(Error::HypothesisViolation {
                detail: format!("boundary value {} exceeds omega0 = {}", v.max, params.omega0),
                nodes: Vec::new(),
            });
        }
    }
    let cylinder = AdmissibleCylinder::new(mesh, spectrum)?;
    let solid = Solid::from_mesh(mesh)?;
    let w = params.shift();
    let table = DirectionTable::new(f, &w, options.table_cells.max(2))?;
    let inradius = sphere::lat_long_grid::<D>(64)
        .iter()
        .map(|z| f.value(z) + w.dot(z))
        .fold(f64::INFINITY, f64::min);
    let threshold = mesh.boundary_cell / inradius;
    let nodes: Vec<Vector<D>> = mesh.all_nodes().map(|p| p.x).collect();
    let interior = mesh.interior.len();

    let (lower, upper) = solid.bounds();
    let mut rng = seeded_rng(options.seed);
    let mut rows = Vec::with_capacity(options.samples);
    let mut bounds = Vec::with_capacity(nodes.len());
    let mut attempts = 0usize;
    let mut zeta_mismatch = 0.0f64;
    while rows.len() < options.samples {
        attempts += 1;
        if attempts > 1000 * options.samples {
            return Err(Error::numerical("rejection sampling of the enclosed region failed"));
        }
        let y = Vector::<D>::from_fn(|k, _| lower[k] + rng.gen::<f64>() * (upper[k] - lower[k]));
        if (!mesh.closed && y[D - 1] <= 0.0) || !solid.contains(&y) {
            continue;
        }
        let contact = inner_contact(f, &w, &table, &nodes, interior, &y, &mut bounds)?;
        let (r_int, i_int, _) = contact.interior;
        let (case, radius, node) = if contact.best.1 >= interior {
            if r_int - contact.best.0 > threshold {
                (SweepoutCase::BoundaryContact, contact.best.0, contact.best.1)
            } else {
                (SweepoutCase::BoundaryArtifact, r_int, i_int)
            }
        } else if cylinder.get(i_int) * (1.0 + options.coverage_tolerance) >= r_int {
            (SweepoutCase::Covered, r_int, i_int)
        } else {
            (SweepoutCase::Uncovered, r_int, i_int)
        };
        let case = if case == SweepoutCase::BoundaryArtifact && cylinder.get(node) * (1.0 + options.coverage_tolerance) < radius {
            SweepoutCase::Uncovered
        } else {
            case
        };
        let mut row = SweepoutRow {
            sample: rows.len(),
            y,
            radius,
            contact_node: node,
            t_max: cylinder.get(node),
            slack: cylinder.get(node) - radius,
            case,
            refined: false,
        };
        let mut contact_point = mesh.node(node).clone();
        if let (SweepoutCase::Uncovered, Some(chart)) = (case, chart) {
            let refined = refine_contact(f, &w, chart, mesh, contact_point.param, &y)?;
            if refined.radius <= radius {
                row.radius = refined.radius;
                row.t_max = refined.t_max;
                row.slack = refined.t_max - refined.radius;
                row.refined = true;
                if refined.t_max * (1.0 + options.coverage_tolerance) >= refined.radius {
                    row.case = SweepoutCase::Covered;
                }
                contact_point = refined.node;
            }
        }
        let zeta = contact_point.x - (f.gradient(&contact_point.nu) + w) * row.radius;
        zeta_mismatch = zeta_mismatch.max((zeta - y).norm());
        rows.push(row);
    }

    let count = |c: SweepoutCase| rows.iter().filter(|r| r.case == c).count();
    let uncovered = count(SweepoutCase::Uncovered);
    let case2 = count(SweepoutCase::BoundaryContact);
    let artifacts = count(SweepoutCase::BoundaryArtifact);
    let refined = rows.iter().filter(|r| r.refined).count();
    let covered = rows.len() - uncovered - case2;
    let slacks: Vec<f64> = rows.iter().map(|r| r.slack).collect();
    let min_slack = slacks.iter().copied().fold(f64::INFINITY, f64::min);
    let mean_slack = pairwise_sum(&slacks) / slacks.len() as f64;
    let volume = enclosed_volume(mesh)?;
    let swept = cylinder_volume(f, params, mesh, spectrum)?;
    let n = rows.len() as f64;
    let report = VerificationReport::new("sweepout", (uncovered + case2) as f64, n, 0.0)
        .with_resolution(&mesh.resolution)
        .with_value("samples", n)
        .with_value("attempts", attempts as f64)
        .with_value("covered_fraction", covered as f64 / n)
        .with_value("uncovered", uncovered as f64)
        .with_value("boundary_contacts", case2 as f64)
        .with_value("boundary_artifacts", artifacts as f64)
        .with_value("boundary_threshold", threshold)
        .with_value("refined_contacts", refined as f64)
        .with_value("min_slack", min_slack)
        .with_value("mean_slack", mean_slack)
        .with_value("max_zeta_mismatch", zeta_mismatch)
        .with_value("volume", volume)
        .with_value("cylinder_volume", swept);
    Ok(SweepoutResult { report, rows })
}

/// CSV with columns `sample, y_*, r, contact_node, t_max, slack, case, refined`.
pub fn write_sweepout_csv<const D: usize>(rows: &[SweepoutRow<D>], mut out: impl Write) -> std::io::Result<()> {
    let coords: Vec<String> = (0..D).map(|k| format!("y_{k}")).collect();
    writeln!(out, "sample,{},r,contact_node,t_max,slack,case,refined", coords.join(","))?;
    for r in rows {
        let y: Vec<String> = r.y.iter().map(|v| format!("{v:e}")).collect();
        writeln!(
            out,
            "{},{},{:e},{},{:e},{:e},{},{}",
            r.sample,
            y.join(","),
            r.radius,
            r.contact_node,
            r.t_max,
            r.slack,
            r.case.label(),
            u8::from(r.refined)
        )?;
    }
    Ok(())
}

/// Maclaurin margins `H_1 - H_r^{1/r}` and `H_{r-1} - H_r^{(r-1)/r}` over all
/// nodes where `H_1..H_r > 0`; others are excluded and listed.
///
/// Nodes whose curvature spread is at most 1e-8 must reach equality to 1e-8.
pub fn maclaurin_check<const D: usize>(spectrum: &MeshSpectrum<D>, r: usize, tolerance: f64) -> Result<VerificationReport> {
    const UMBILIC: f64 = 1e-8;
    let n = D - 1;
    if r < 1 || r > n {
        return Err(Error::invalid(format!("Maclaurin order r = {r} outside 1..={n}")));
    }
    let mut worst = [f64::INFINITY; 2];
    let mut umbilic_gap = 0.0f64;
    let mut umbilic = 0usize;
    let mut excluded = Vec::new();
    let all = spectrum.interior.iter().chain(&spectrum.boundary);
    for (i, s) in all.enumerate() {
        if s.mean[1..=r].iter().any(|h| !(*h > 0.0)) {
            excluded.push(i);
            continue;
        }
        let hr = s.mean[r];
        let rf = r as f64;
        let m1 = s.mean[1] - hr.powf(1.0 / rf);
        let m2 = s.mean[r - 1] - hr.powf((rf - 1.0) / rf);
        worst[0] = worst[0].min(m1);
        worst[1] = worst[1].min(m2);
        if s.max_kappa() - s.min_kappa() <= UMBILIC {
            umbilic += 1;
            umbilic_gap = umbilic_gap.max(m1.abs()).max(m2.abs());
        }
    }
    let lowest = worst[0].min(worst[1]);
    let mut report = VerificationReport::new(format!("maclaurin_r{r}"), (-lowest).max(0.0), 1.0, tolerance)
        .with_value("order", r as f64)
        .with_value("worst_margin_mean", worst[0])
        .with_value("worst_margin_ratio", worst[1])
        .with_value("excluded", excluded.len() as f64)
        .with_value("umbilic_nodes", umbilic as f64)
        .with_value("worst_umbilic_gap", umbilic_gap);
    if umbilic_gap > UMBILIC {
        report.fail_with(format!("umbilic nodes miss equality by {umbilic_gap:e}"));
    }
    if !excluded.is_empty() {
        let shown: Vec<String> = excluded.iter().take(20).map(|i| i.to_string()).collect();
        report.warnings.push(format!(
            "{} nodes outside the positive cone excluded: {}{}",
            excluded.len(),
            shown.join(", "),
            if excluded.len() > 20 { ", ..." } else { "" }
        ));
    }
    Ok(report)
}

/// The chain `(n+1)|Ω| ≤ ∫ W/H_1 dA ≤ ∫ W/H_r^{1/r} dA` with
/// `W = F(ν) + ω₀<ν, E^F>`. When `H_r` is constant the right end equals
/// `∫ W dA / H_r^{1/r}`; values `lhs = (n+1) H_r^{1/r} |Ω|` and `rhs = ∫ W dA`
/// are then reported as well.
pub fn ros_chain<const D: usize>(
    f: &Anisotropy<D>,
    params: &CapillaryParams<D>,
    mesh: &QuadratureMesh<D>,
    spectrum: &MeshSpectrum<D>,
    r: usize,
    tolerance: f64,
) -> Result<VerificationReport> {
    let n = D - 1;
    if r < 1 || r > n {
        return Err(Error::invalid(format!("Ros chain order r = {r} outside 1..={n}")));
    }
    let bad: Vec<usize> = (0..mesh.interior.len())
        .filter(|&i| spectrum.interior[i].mean[1..=r].iter().any(|h| !(*h > 0.0)))
        .collect();
    if !bad.is_empty() {
        return Err(Error::HypothesisViolation {
            detail: format!("higher mean curvatures are not positive at {} nodes", bad.len()),
            nodes: bad,
        });
    }
    let rf = r as f64;
    let weight = |i: usize| params.weight(f, &mesh.interior[i].nu) * mesh.interior[i].weight;
    let sum = |g: &dyn Fn(usize) -> f64| pairwise_sum(&(0..mesh.interior.len()).map(g).collect::<Vec<_>>());
    let volume = enclosed_volume(mesh)?;
    let a = (n as f64 + 1.0) * volume;
    let b = sum(&|i| weight(i) / spectrum.interior[i].mean[1]);
    let c = sum(&|i| weight(i) / spectrum.interior[i].mean[r].powf(1.0 / rf));
    let energy = sum(&weight);
    let hr: Vec<f64> = spectrum.interior.iter().map(|s| s.mean[r]).collect();
    let hr_max = hr.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let hr_min = hr.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = hr_max - hr_min;
    let residual = (a - b).max(0.0) + (b - c).max(0.0);
    let mut report = VerificationReport::new(format!("ros_chain_r{r}"), residual, a, tolerance)
        .with_resolution(&mesh.resolution)
        .with_value("order", rf)
        .with_value("volume_term", a)
        .with_value("hk_term", b)
        .with_value("maclaurin_term", c)
        .with_value("energy", energy)
        .with_value("mean_curvature_spread", spread);
    if spread <= 1e-8 * hr_max.abs().max(1.0) {
        let mean = pairwise_sum(&hr) / hr.len() as f64;
        let lhs = a * mean.powf(1.0 / rf);
        report.set("lhs", lhs);
        report.set("rhs", energy);
        report.set("ratio", lhs / energy);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capillary::{build_wulff_cap, CapillaryCap};
    use nalgebra::{Vector2, Vector3};

    fn hemisphere(n: usize) -> (Anisotropy<3>, CapillaryParams<3>, CapillaryCap<3>, QuadratureMesh<3>) {
        let f = Anisotropy::isotropic();
        let params = CapillaryParams::new(&f, 0.0).unwrap();
        let (cap, mesh) = build_wulff_cap(&f, 0.0, 1.0, Vector3::zeros(), Resolution::square(n)).unwrap();
        (f, params, cap, mesh)
    }

    #[test]
    fn outward_jacobian_examples() {
        let s = CurvatureSpectrum::<3>::from_kappa(vec![0.5, 2.0], vec![Vector3::x(), Vector3::y()]);
        assert!((jacobian_outward(&s, 0.5).unwrap() - 2.5).abs() < 1e-15);
        assert_eq!(jacobian_outward(&s, 0.0).unwrap(), 1.0);
        assert!(jacobian_outward(&s, -0.1).is_err());
    }

    #[test]
    fn inward_jacobian_on_hemisphere() {
        let (f, params, _, mesh) = hemisphere(16);
        let spec = spectra(&f, &mesh).unwrap();
        let j = jacobian_inward(&f, &params, &mesh.interior[5], &spec.interior[5], 0.5).unwrap();
        assert!((j - 0.25).abs() < 1e-10);
        let at_max = jacobian_inward(&f, &params, &mesh.interior[5], &spec.interior[5], 1.0).unwrap();
        assert!(at_max.abs() < 1e-9);
        assert!(jacobian_inward(&f, &params, &mesh.interior[5], &spec.interior[5], 1.1).is_err());
        assert!(jacobian_inward(&f, &params, &mesh.interior[5], &spec.interior[5], 0.0).is_err());
    }

    #[test]
    fn offset_of_hemisphere_is_larger_hemisphere() {
        let (f, params, cap, _) = hemisphere(16);
        let off = parallel_outward(&f, &params, &cap, 0.5, Resolution::square(16)).unwrap();
        for p in &off.interior {
            assert!((p.x.norm() - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn touching_examples_on_hemisphere() {
        let (f, params, _, mesh) = hemisphere(64);
        let y = Vector3::new(0.3, 0.0, 0.2);
        let inner = touching_radius(&f, &params, &mesh, &y, Side::Inner).unwrap();
        assert!((inner.radius - (1.0 - 0.13f64.sqrt())).abs() < 1e-3);
        let outer = touching_radius(&f, &params, &mesh, &Vector3::new(0.3, 0.0, 0.0), Side::Outer).unwrap();
        assert!((outer.radius - 1.3).abs() < 1e-12);
        let x = mesh.node(outer.contact_node).x;
        assert!((x - Vector3::new(-1.0, 0.0, 0.0)).norm() < 1e-10);
        assert_eq!(outer.kind, ContactKind::Boundary);
        assert!(touching_radius(&f, &params, &mesh, &y, Side::Outer).is_err());
    }

    #[test]
    fn sweepout_covers_half_disk() {
        let f = Anisotropy::<2>::isotropic();
        let params = CapillaryParams::new(&f, 0.0).unwrap();
        let (_, mesh) = build_wulff_cap(&f, 0.0, 1.0, Vector2::zeros(), Resolution::new(64, 1)).unwrap();
        let spec = spectra(&f, &mesh).unwrap();
        let opts = SweepoutOptions {
            samples: 500,
            ..Default::default()
        };
        let result = sweepout_check(&f, &params, &mesh, &spec, None, opts).unwrap();
        assert!(result.report.pass, "{:?}", result.report);
        assert_eq!(result.report.value("covered_fraction"), Some(1.0));
    }

    #[test]
    fn maclaurin_examples() {
        let umbilic = CurvatureSpectrum::<3>::from_kappa(vec![1.0, 1.0], vec![Vector3::x(), Vector3::y()]);
        let skew = CurvatureSpectrum::<3>::from_kappa(vec![0.5, 2.0], vec![Vector3::x(), Vector3::y()]);
        let spec = MeshSpectrum {
            interior: vec![umbilic, skew],
            boundary: Vec::new(),
        };
        let report = maclaurin_check(&spec, 2, 1e-10).unwrap();
        assert!(report.pass);
        assert!((report.value("worst_margin_mean").unwrap() - 0.0).abs() < 1e-15);
        let skew_only = MeshSpectrum {
            interior: vec![spec.interior[1].clone()],
            boundary: Vec::new(),
        };
        let report = maclaurin_check(&skew_only, 2, 1e-10).unwrap();
        assert!((report.value("worst_margin_mean").unwrap() - 0.25).abs() < 1e-15);
    }
}
