//! Small dense linear algebra over [`Scalar`]s.

use ndarray::{ArrayD, IxDyn};

use crate::jet::Scalar;

/// Relative pivot threshold below which a matrix is treated as singular.
pub const SINGULAR_RELATIVE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("matrix is singular (pivot {pivot:e} at scale {scale:e})")]
pub struct Singular {
    pub pivot: f64,
    pub scale: f64,
}

/// Inverse by Gauss-Jordan elimination with partial pivoting on the value
/// parts. Works for jets as well as reals.
pub fn invert<S: Scalar>(m: &ArrayD<S>) -> Result<ArrayD<S>, Singular> {
    let n = m.shape()[0];
    assert_eq!(m.shape(), &[n, n]);
    let scale = m.iter().fold(0.0f64, |a, v| a.max(v.value().abs()));
    let mut a: Vec<Vec<S>> = (0..n).map(|i| (0..n).map(|j| m[[i, j]]).collect()).collect();
    let mut inv: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| S::constant(if i == j { 1.0 } else { 0.0 })).collect())
        .collect();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| a[r][col].value().abs().total_cmp(&a[s][col].value().abs()))
            .unwrap();
        let pivot = a[pivot_row][col].value();
        if !(pivot.abs() > SINGULAR_RELATIVE * scale) {
            return Err(Singular { pivot, scale });
        }
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let p = a[col][col].recip();
        for j in 0..n {
            a[col][j] = a[col][j] * p;
            inv[col][j] = inv[col][j] * p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a[r][col];
            if factor.value() == 0.0 && factor.is_constant() {
                continue;
            }
            for j in 0..n {
                let t = a[col][j];
                a[r][j] -= factor * t;
                let t = inv[col][j];
                inv[r][j] -= factor * t;
            }
        }
    }
    Ok(ArrayD::from_shape_fn(IxDyn(&[n, n]), |ix| inv[ix[0]][ix[1]]))
}

fn determinant(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let p = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs())).unwrap();
        if a[p][col] == 0.0 {
            return 0.0;
        }
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for j in col..n {
                a[r][j] -= f * a[col][j];
            }
        }
    }
    det
}

/// Sums of the k×k principal minors, k = 1..=n. These are (up to sign) the
/// coefficients of the characteristic polynomial.
pub fn principal_minor_sums(m: &ArrayD<f64>) -> Vec<f64> {
    let n = m.shape()[0];
    let mut sums = vec![0.0; n];
    for subset in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| subset & (1 << i) != 0).collect();
        let sub: Vec<Vec<f64>> = idx.iter().map(|&i| idx.iter().map(|&j| m[[i, j]]).collect()).collect();
        sums[idx.len() - 1] += determinant(&sub);
    }
    sums
}

/// A real symmetric matrix (real-rooted characteristic polynomial) is
/// positive definite iff every principal-minor sum is positive.
pub fn is_positive_definite_charpoly(m: &ArrayD<f64>) -> bool {
    principal_minor_sums(m).iter().all(|&e| e > 0.0)
}

/// Gershgorin lower bound on the smallest eigenvalue.
pub fn gershgorin_lower_bound(m: &ArrayD<f64>) -> f64 {
    let n = m.shape()[0];
    (0..n)
        .map(|i| m[[i, i]] - (0..n).filter(|&j| j != i).map(|j| m[[i, j]].abs()).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// Positive definiteness: characteristic-polynomial signs for n ≤ 4,
/// Gershgorin discs above that.
pub fn is_positive_definite(m: &ArrayD<f64>) -> bool {
    if m.shape()[0] <= 4 {
        is_positive_definite_charpoly(m)
    } else {
        gershgorin_lower_bound(m) > 0.0
    }
}

pub fn min_eigenvalue(m: &ArrayD<f64>) -> f64 {
    let n = m.shape()[0];
    let mat = nalgebra::DMatrix::from_fn(n, n, |i, j| 0.5 * (m[[i, j]] + m[[j, i]]));
    mat.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet;
    use approx::assert_relative_eq;
    use ndarray::array;

    #[test]
    fn inverse_of_real_matrix() {
        let m = array![[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]].into_dyn();
        let inv = invert(&m).unwrap();
        let prod = m.clone().into_dimensionality::<ndarray::Ix2>().unwrap()
            .dot(&inv.into_dimensionality::<ndarray::Ix2>().unwrap());
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(prod[[i, j]], if i == j { 1.0 } else { 0.0 }, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = array![[1.0, 2.0], [2.0, 4.0]].into_dyn();
        assert!(invert(&m).is_err());
    }

    #[test]
    fn jet_inverse_differentiates() {
        // d/dt (A + tB)^{-1} = -A^{-1} B A^{-1}; with A = diag(2, 4), B = [[0,1],[1,0]]
        let t = Jet::seeded(0.0, 1, 1).unwrap();
        let two = Jet::constant(2.0);
        let four = Jet::constant(4.0);
        let m = array![[two, t], [t, four]].into_dyn();
        let inv = invert(&m).unwrap();
        assert_relative_eq!(inv[[0, 0]].value(), 0.5);
        assert_relative_eq!(inv[[0, 1]].top(), -1.0 / 8.0, epsilon = 1e-15);
        assert_relative_eq!(inv[[0, 0]].top(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn positive_definiteness_tests_agree() {
        let pd = array![[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]].into_dyn();
        assert!(is_positive_definite(&pd));
        assert_relative_eq!(min_eigenvalue(&pd), 2.0 - 2f64.sqrt(), epsilon = 1e-12);
        let indefinite = array![[1.0, 2.0], [2.0, 1.0]].into_dyn();
        assert!(!is_positive_definite(&indefinite));
        assert!(min_eigenvalue(&indefinite) < 0.0);
        assert_eq!(principal_minor_sums(&indefinite), vec![2.0, -3.0]);
    }
}
