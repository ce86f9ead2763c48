use super::eig::hermitian_eig;
use super::matrix::ComplexMatrix;

/// Largest singular value, `sqrt(lambda_max(A^* A))`.
///
/// The smaller of `A^* A` and `A A^*` is decomposed.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    if a.rows() == 0 || a.cols() == 0 {
        return 0.0;
    }
    let gram = if a.rows() <= a.cols() {
        a.gram_outer()
    } else {
        a.adjoint().gram_outer()
    };
    let spec = hermitian_eig(&gram).expect("Gram matrix is Hermitian");
    spec.max().max(0.0).sqrt()
}

/// Schur test bound: the larger of the maximal column and row absolute sums.
/// Always dominates [`operator_norm`].
pub fn schur_norm_bound(a: &ComplexMatrix) -> f64 {
    let mut col_sums = vec![0.0f64; a.cols()];
    let mut max_row = 0.0f64;
    for i in 0..a.rows() {
        let mut row_sum = 0.0;
        for (j, z) in a.row(i).iter().enumerate() {
            let m = z.norm();
            row_sum += m;
            col_sums[j] += m;
        }
        max_row = max_row.max(row_sum);
    }
    col_sums.into_iter().fold(max_row, f64::max)
}
