//! Point-in-region tests for the domain bounded by a capillary mesh and its
//! wetting face.
//!
//! Surfaces are triangulated from the tensor node grid; the small hole around
//! a chart pole and the flat wetting face are closed by fans. Curves become a
//! closed polygon through the nodes.

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::surface::QuadratureMesh;

const BINS: usize = 64;

/// Generic ray directions; three independent parity votes make a hit on a
/// shared edge harmless.
const RAYS: [[f64; 3]; 3] = [
    [0.523_606_797_749_979, 0.314_159_265_358_979, 0.791_287_847_477_920],
    [-0.611_903_787_532_191, 0.442_695_040_888_963, 0.255_104_392_851_457],
    [0.171_723_449_609_823, -0.827_329_741_295_619, 0.308_915_776_066_390],
];

type P3 = [f64; 3];

fn sub(a: &P3, b: &P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: &P3, b: &P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &P3, b: &P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(a: P3) -> P3 {
    let n = dot(&a, &a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Triangles bucketed by their projection onto the plane normal to `dir`.
struct RayCast {
    dir: P3,
    p: P3,
    q: P3,
    lo: [f64; 2],
    cell: [f64; 2],
    bins: Vec<Vec<u32>>,
}

impl RayCast {
    fn new(dir: P3, triangles: &[[P3; 3]]) -> Self {
        let dir = normalize(dir);
        let helper = if dir[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let p = normalize(cross(&dir, &helper));
        let q = cross(&dir, &p);
        let project = |v: &P3| [dot(v, &p), dot(v, &q)];
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for t in triangles {
            for v in t {
                let c = project(v);
                for k in 0..2 {
                    lo[k] = lo[k].min(c[k]);
                    hi[k] = hi[k].max(c[k]);
                }
            }
        }
        let cell = [((hi[0] - lo[0]) / BINS as f64).max(1e-300), ((hi[1] - lo[1]) / BINS as f64).max(1e-300)];
        let mut bins = vec![Vec::new(); BINS * BINS];
        let locate = |x: f64, k: usize| (((x - lo[k]) / cell[k]).floor().max(0.0) as usize).min(BINS - 1);
        for (id, t) in triangles.iter().enumerate() {
            let c: Vec<[f64; 2]> = t.iter().map(project).collect();
            let (mut a0, mut a1, mut b0, mut b1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
            for v in &c {
                a0 = a0.min(v[0]);
                a1 = a1.max(v[0]);
                b0 = b0.min(v[1]);
                b1 = b1.max(v[1]);
            }
            for i in locate(a0, 0)..=locate(a1, 0) {
                for j in locate(b0, 1)..=locate(b1, 1) {
                    bins[i * BINS + j].push(id as u32);
                }
            }
        }
        Self { dir, p, q, lo, cell, bins }
    }

    /// Parity of the number of triangles hit by the ray from `y`.
    fn odd(&self, y: &P3, triangles: &[[P3; 3]]) -> bool {
        let c = [dot(y, &self.p), dot(y, &self.q)];
        let mut idx = [0usize; 2];
        for k in 0..2 {
            let s = (c[k] - self.lo[k]) / self.cell[k];
            if !(0.0..BINS as f64).contains(&s) {
                return false;
            }
            idx[k] = s as usize;
        }
        let mut hits = 0usize;
        for &id in &self.bins[idx[0] * BINS + idx[1]] {
            if ray_hits(y, &self.dir, &triangles[id as usize]) {
                hits += 1;
            }
        }
        hits % 2 == 1
    }
}

/// Möller-Trumbore intersection for `t > 0`.
fn ray_hits(origin: &P3, dir: &P3, tri: &[P3; 3]) -> bool {
    let e1 = sub(&tri[1], &tri[0]);
    let e2 = sub(&tri[2], &tri[0]);
    let h = cross(dir, &e2);
    let a = dot(&e1, &h);
    if a.abs() < 1e-300 {
        return false;
    }
    let f = 1.0 / a;
    let s = sub(origin, &tri[0]);
    let u = f * dot(&s, &h);
    if !(0.0..=1.0).contains(&u) {
        return false;
    }
    let qv = cross(&s, &e1);
    let v = f * dot(dir, &qv);
    if v < 0.0 || u + v > 1.0 {
        return false;
    }
    f * dot(&e2, &qv) > 0.0
}

/// The region enclosed by a mesh together with its wetting face.
pub struct Solid<const D: usize> {
    lower: Vector<D>,
    upper: Vector<D>,
    polygon: Vec<[f64; 2]>,
    triangles: Vec<[P3; 3]>,
    casts: Vec<RayCast>,
}

impl<const D: usize> Solid<D> {
    /// Requires the tensor node layout produced by `discretize`.
    pub fn from_mesh(mesh: &QuadratureMesh<D>) -> Result<Self> {
        if mesh.interior.is_empty() {
            return Err(Error::invalid("empty mesh"));
        }
        let mut lower = mesh.interior[0].x;
        let mut upper = lower;
        for p in mesh.all_nodes() {
            lower = lower.inf(&p.x);
            upper = upper.sup(&p.x);
        }
        if !mesh.closed {
            lower[D - 1] = lower[D - 1].max(0.0);
        }
        let mut solid = Self {
            lower,
            upper,
            polygon: Vec::new(),
            triangles: Vec::new(),
            casts: Vec::new(),
        };
        match D {
            2 => solid.polygon = polygon(mesh)?,
            3 => {
                solid.triangles = triangulate(mesh)?;
                solid.casts = RAYS.iter().map(|d| RayCast::new(*d, &solid.triangles)).collect();
            }
            _ => return Err(Error::invalid("inside tests need dimension 2 or 3")),
        }
        Ok(solid)
    }

    pub fn bounds(&self) -> (Vector<D>, Vector<D>) {
        (self.lower, self.upper)
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn contains(&self, y: &Vector<D>) -> bool {
        if (0..D).any(|k| y[k] < self.lower[k] || y[k] > self.upper[k]) {
            return false;
        }
        if D == 2 {
            return point_in_polygon(&self.polygon, [y[0], y[1]]);
        }
        let p = [y[0], y[1], y[2]];
        self.casts.iter().filter(|c| c.odd(&p, &self.triangles)).count() >= 2
    }
}

/// Even-odd rule with a horizontal ray.
pub fn point_in_polygon(poly: &[[f64; 2]], y: [f64; 2]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a[1] > y[1]) != (b[1] > y[1]) {
            let x = a[0] + (y[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if y[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn polygon<const D: usize>(mesh: &QuadratureMesh<D>) -> Result<Vec<[f64; 2]>> {
    let xy = |x: &Vector<D>| [x[0], x[1]];
    let mut poly = Vec::with_capacity(mesh.node_count());
    if mesh.closed {
        poly.extend(mesh.interior.iter().map(|p| xy(&p.x)));
    } else {
        if mesh.boundary.len() != 2 {
            return Err(Error::invalid("a curve with boundary needs two endpoints"));
        }
        poly.push(xy(&mesh.boundary[0].node.x));
        poly.extend(mesh.interior.iter().map(|p| xy(&p.x)));
        poly.push(xy(&mesh.boundary[1].node.x));
    }
    Ok(poly)
}

fn triangulate<const D: usize>(mesh: &QuadratureMesh<D>) -> Result<Vec<[P3; 3]>> {
    let (nr, nphi) = match mesh.resolution.as_slice() {
        [a, b] => (*a, *b),
        _ => return Err(Error::invalid("surface mesh without a two-dimensional resolution")),
    };
    if mesh.interior.len() != nr * nphi || (!mesh.closed && mesh.boundary.len() != nphi) {
        return Err(Error::invalid("mesh does not have the tensor node layout of a chart grid"));
    }
    let p3 = |x: &Vector<D>| [x[0], x[1], x[2]];
    let mut rings: Vec<Vec<P3>> = (0..nr)
        .map(|i| (0..nphi).map(|j| p3(&mesh.interior[i * nphi + j].x)).collect())
        .collect();
    if !mesh.closed {
        rings.push(mesh.boundary.iter().map(|b| p3(&b.node.x)).collect());
    }
    let centroid = |ring: &[P3]| {
        let mut c = [0.0; 3];
        for v in ring {
            for k in 0..3 {
                c[k] += v[k] / ring.len() as f64;
            }
        }
        c
    };
    let mut tris = Vec::with_capacity(2 * rings.len() * nphi + 2 * nphi);
    let fan = |tris: &mut Vec<[P3; 3]>, ring: &[P3]| {
        let c = centroid(ring);
        for j in 0..nphi {
            tris.push([c, ring[j], ring[(j + 1) % nphi]]);
        }
    };
    fan(&mut tris, &rings[0]);
    for w in rings.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        for j in 0..nphi {
            let k = (j + 1) % nphi;
            tris.push([a[j], b[j], b[k]]);
            tris.push([a[j], b[k], a[k]]);
        }
    }
    fan(&mut tris, rings.last().expect("at least one ring"));
    Ok(tris)
}
