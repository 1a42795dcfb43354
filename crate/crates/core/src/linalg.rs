//! Small dense linear-algebra helpers for deriving catalog constants.

use crate::scalar::Scalar;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
// Index loops mirror the textbook rotation and touch two columns at once.
#[allow(clippy::needless_range_loop)]
pub(crate) fn symmetric_eigenvalues<T: Scalar>(m: &[Vec<T>]) -> Vec<T> {
    let n = m.len();
    let mut a: Vec<Vec<T>> = m.to_vec();
    let two = T::lit(2.0);
    for _sweep in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: T = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= T::epsilon() * T::epsilon() * diag.max(T::min_positive_value()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q] == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (two * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<T> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    eig
}

/// Largest singular value, `sqrt(λ_max(MᵀM))`.
pub(crate) fn spectral_norm<T: Scalar>(m: &[Vec<T>]) -> T {
    let n = m.len();
    let gram: Vec<Vec<T>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| m[k][i] * m[k][j]).sum())
                .collect()
        })
        .collect();
    symmetric_eigenvalues(&gram)
        .last()
        .copied()
        .unwrap_or_else(T::zero)
        .max(T::zero())
        .sqrt()
}
