use super::eig::RANK_TOLERANCE;
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Accepted deviation of `T^* T` from the identity.
pub const ISOMETRY_TOLERANCE: f64 = 1e-8;

/// Completes an `M x N` isometry `T` to a unitary `[T | T_perp]`.
///
/// Gram-Schmidt (with one re-orthogonalization pass) runs over the canonical
/// basis `e_0, e_1, ...` in index order; basis vectors whose residual falls
/// within `RANK_TOLERANCE` of the current span are skipped. Stops as soon as
/// `M - N` columns are found.
pub fn orthonormal_complement_basis(t: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (m, n) = (t.rows(), t.cols());
    if m < n {
        return Err(Error::Dimension(format!(
            "isometry must have at least as many rows as columns, got {m}x{n}"
        )));
    }
    let gram = t.adjoint().matmul(t);
    let deviation = (&gram - &ComplexMatrix::identity(n)).max_abs();
    if deviation > ISOMETRY_TOLERANCE {
        return Err(Error::NotIsometry(deviation));
    }

    let basis: Vec<Vec<C64>> = (0..n).map(|j| t.column(j)).collect();
    let mut found: Vec<Vec<C64>> = Vec::with_capacity(m - n);
    for i in 0..m {
        if found.len() == m - n {
            break;
        }
        let mut v = vec![C64::new(0.0, 0.0); m];
        v[i] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in basis.iter().chain(found.iter()) {
                // coefficient <v, b> removes the component along b
                let c: C64 = v.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm <= RANK_TOLERANCE.sqrt() {
            continue;
        }
        for x in v.iter_mut() {
            *x /= nrm;
        }
        found.push(v);
    }
    if found.len() != m - n {
        return Err(Error::NotIsometry(deviation));
    }
    Ok(ComplexMatrix::from_columns(m, &found))
}
