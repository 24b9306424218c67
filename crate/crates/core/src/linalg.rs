//! Small fixed-size linear algebra helpers shared by the geometry modules.

use nalgebra::{DMatrix, SMatrix, SVector};

pub type Vector<const D: usize> = SVector<f64, D>;
pub type Matrix<const D: usize> = SMatrix<f64, D, D>;

/// Third derivative of a scalar function on `R^D`: `slices[k]` is the
/// derivative of the Hessian in coordinate direction `k`.
#[derive(Debug, Clone, Copy)]
pub struct Tensor3<const D: usize> {
    pub slices: [Matrix<D>; D],
}

impl<const D: usize> Tensor3<D> {
    pub fn zeros() -> Self {
        Self {
            slices: [Matrix::<D>::zeros(); D],
        }
    }

    /// `T[a, b, .]` as a vector.
    pub fn contract(&self, a: &Vector<D>, b: &Vector<D>) -> Vector<D> {
        Vector::<D>::from_fn(|k, _| (a.transpose() * self.slices[k] * b)[(0, 0)])
    }

    /// `T[e, ., .]` as a matrix.
    pub fn along(&self, e: &Vector<D>) -> Matrix<D> {
        let mut m = Matrix::<D>::zeros();
        for k in 0..D {
            m += self.slices[k] * e[k];
        }
        m
    }
}

pub fn basis<const D: usize>(k: usize) -> Vector<D> {
    let mut v = Vector::<D>::zeros();
    v[k] = 1.0;
    v
}

/// The last coordinate vector `E_{n+1}`, normal to the supporting hyperplane.
pub fn vertical<const D: usize>() -> Vector<D> {
    basis::<D>(D - 1)
}

/// Orthonormal basis of the orthogonal complement of a unit vector.
///
/// Deterministic: Gram-Schmidt over the standard basis in index order,
/// skipping the coordinate axis most aligned with `z`.
pub fn tangent_frame<const D: usize>(z: &Vector<D>) -> Vec<Vector<D>> {
    let skip = z.iamax();
    let mut frame: Vec<Vector<D>> = Vec::with_capacity(D - 1);
    for k in (0..D).filter(|&k| k != skip) {
        let mut v = basis::<D>(k);
        v -= z * z.dot(&v);
        for e in &frame {
            v -= e * e.dot(&v);
        }
        frame.push(v.normalize());
    }
    frame
}

/// Gram-Schmidt of chart derivatives. Returns the orthonormal frame and the
/// upper-triangular factor `R` with `J = T R`, or `None` if rank deficient.
pub fn gram_schmidt<const D: usize>(vectors: &[Vector<D>]) -> Option<(Vec<Vector<D>>, DMatrix<f64>)> {
    let n = vectors.len();
    let mut frame: Vec<Vector<D>> = Vec::with_capacity(n);
    let mut r = DMatrix::zeros(n, n);
    let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for (j, v) in vectors.iter().enumerate() {
        let mut w = *v;
        for (i, e) in frame.iter().enumerate() {
            let c = e.dot(&w);
            r[(i, j)] = c;
            w -= e * c;
        }
        let len = w.norm();
        if !(len > 1e-13 * scale.max(f64::MIN_POSITIVE)) {
            return None;
        }
        r[(j, j)] = len;
        frame.push(w / len);
    }
    Some((frame, r))
}

/// Generalised cross product: the vector `N` with `<N, v> = det[t_1, ..., t_n, v]`.
pub fn cross_product<const D: usize>(tangents: &[Vector<D>]) -> Vector<D> {
    assert_eq!(tangents.len() + 1, D, "need D-1 tangent vectors");
    match D {
        2 => Vector::<D>::from_fn(|k, _| if k == 0 { -tangents[0][1] } else { tangents[0][0] }),
        3 => {
            let (a, b) = (&tangents[0], &tangents[1]);
            Vector::<D>::from_fn(|k, _| {
                let (i, j) = ((k + 1) % 3, (k + 2) % 3);
                a[i] * b[j] - a[j] * b[i]
            })
        }
        _ => Vector::<D>::from_fn(|k, _| {
            let m = DMatrix::from_fn(D, D, |row, col| {
                if col < D - 1 {
                    tangents[col][row]
                } else if row == k {
                    1.0
                } else {
                    0.0
                }
            });
            m.determinant()
        }),
    }
}

/// Matrix of the bilinear form `m` in the given frame.
pub fn restrict<const D: usize>(m: &Matrix<D>, frame: &[Vector<D>]) -> DMatrix<f64> {
    let n = frame.len();
    DMatrix::from_fn(n, n, |a, b| (frame[a].transpose() * m * frame[b])[(0, 0)])
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Square root of a symmetric positive definite matrix by spectral decomposition.
pub fn spd_sqrt(a: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let eig = symmetrize(a).symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return None;
    }
    let root = eig.eigenvalues.map(f64::sqrt);
    Some(&eig.eigenvectors * DMatrix::from_diagonal(&root) * eig.eigenvectors.transpose())
}

pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return f64::INFINITY;
    }
    symmetrize(a).symmetric_eigen().eigenvalues.min()
}

/// Pairwise (cascade) summation in a fixed order; the result depends only on
/// the input order, never on scheduling.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_vec<const D: usize>(values: &[Vector<D>]) -> Vector<D> {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().fold(Vector::<D>::zeros(), |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum_vec(&values[..mid]) + pairwise_sum_vec(&values[mid..])
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
