//! Point sets and geodesics on the unit sphere `S^n` in `R^{n+1}`.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::Vector;

/// Latitude-longitude validation grid.
///
/// `2 * resolution^2` nodes on `S^2` (polar angle including both poles,
/// `2 * resolution` azimuths), `resolution` equally spaced nodes on `S^1`.
/// Higher dimensions fall back to `2 * resolution^2` seeded random points.
pub fn lat_long_grid<const D: usize>(resolution: usize) -> Vec<Vector<D>> {
    match D {
        2 => (0..resolution)
            .map(|j| {
                let phi = 2.0 * PI * j as f64 / resolution as f64;
                Vector::<D>::from_fn(|k, _| if k == 0 { phi.cos() } else { phi.sin() })
            })
            .collect(),
        3 => {
            let res = resolution.max(2);
            let mut out = Vec::with_capacity(2 * res * res);
            for i in 0..res {
                let theta = PI * i as f64 / (res - 1) as f64;
                for j in 0..2 * res {
                    let phi = PI * j as f64 / res as f64;
                    out.push(spherical::<D>(theta, phi));
                }
            }
            out
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(resolution as u64);
            (0..2 * resolution * resolution).map(|_| random_unit(&mut rng)).collect()
        }
    }
}

/// `(sin t cos p, sin t sin p, cos t)` for `D = 3`.
pub(crate) fn spherical<const D: usize>(theta: f64, phi: f64) -> Vector<D> {
    debug_assert_eq!(D, 3);
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vector::<D>::from_fn(|k, _| match k {
        0 => st * cp,
        1 => st * sp,
        _ => ct,
    })
}

/// Deterministic near-uniform design of `count` directions: a golden-angle
/// spiral on `S^2`, equally spaced angles on `S^1`.
pub fn spiral_design<const D: usize>(count: usize) -> Vec<Vector<D>> {
    match D {
        2 => lat_long_grid::<D>(count),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
                    let phi = golden * i as f64;
                    spherical::<D>(z.clamp(-1.0, 1.0).acos(), phi)
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(count as u64);
            (0..count).map(|_| random_unit(&mut rng)).collect()
        }
    }
}

/// The 26 multi-start directions used by the dual gauge solver.
///
/// On `S^2` these are the normalised nonzero vectors of `{-1, 0, 1}^3`; on
/// other spheres, 26 spiral design points.
pub fn start_design<const D: usize>() -> Vec<Vector<D>> {
    if D == 3 {
        let mut out = Vec::with_capacity(26);
        for a in -1i32..=1 {
            for b in -1i32..=1 {
                for c in -1i32..=1 {
                    if (a, b, c) != (0, 0, 0) {
                        let v = Vector::<D>::from_fn(|k, _| [a, b, c][k] as f64);
                        out.push(v.normalize());
                    }
                }
            }
        }
        out
    } else {
        spiral_design::<D>(26)
    }
}

pub fn random_unit<const D: usize>(rng: &mut impl Rng) -> Vector<D> {
    loop {
        let v = Vector::<D>::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let n = v.norm();
        if n > 1e-8 {
            return v / n;
        }
    }
}

pub fn geodesic_distance<const D: usize>(x: &Vector<D>, z: &Vector<D>) -> f64 {
    // atan2 form keeps accuracy for nearly equal and nearly antipodal points.
    let cross = (x - z * x.dot(z)).norm();
    cross.atan2(x.dot(z))
}

/// Point at fraction `s` along the minimizing geodesic from `x` to `z`.
pub fn slerp<const D: usize>(x: &Vector<D>, z: &Vector<D>, s: f64) -> Vector<D> {
    let d = geodesic_distance(x, z);
    if d < 1e-14 {
        return *x;
    }
    let v = ((x * (((1.0 - s) * d).sin())) + z * ((s * d).sin())) / d.sin();
    v.normalize()
}
