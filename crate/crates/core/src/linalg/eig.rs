//! Cyclic Jacobi eigensolver for Hermitian matrices and spectral functions.

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Relative off-diagonal mass at which Jacobi sweeps stop.
pub const EIG_TOLERANCE: f64 = 1e-11;
/// Relative Hermitian deviation accepted before symmetrization.
pub const HERMITIAN_TOLERANCE: f64 = 1e-9;
/// Eigenvalues below `RANK_TOLERANCE * lambda_max` count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;
pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching unitary eigenvector columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Number of eigenvalues above `RANK_TOLERANCE * max(|lambda|)`.
    pub fn rank(&self) -> usize {
        let scale = self.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
        if scale == 0.0 {
            return 0;
        }
        self.eigenvalues
            .iter()
            .filter(|&&l| l > RANK_TOLERANCE * scale)
            .count()
    }

    /// `V f(Lambda) V^*`.
    pub fn recompose(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let w: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    acc += v[(i, k)] * v[(j, k)].conj() * w[k];
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
        }
        out
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Inputs within `HERMITIAN_TOLERANCE * ||A||` of Hermitian are symmetrized
/// first. The largest-magnitude entry of every eigenvector is made real and
/// positive so results are reproducible.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<Spectrum> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let scale = a.frobenius_norm();
    let deviation = a.hermitian_deviation();
    let tolerance = HERMITIAN_TOLERANCE * scale.max(f64::MIN_POSITIVE);
    if deviation > tolerance {
        return Err(Error::NotHermitian {
            deviation,
            tolerance,
        });
    }
    let mut m = a.symmetrized();
    let mut v = ComplexMatrix::identity(n);

    if scale > 0.0 {
        // Sweeps run to working precision; EIG_TOLERANCE is the guaranteed bound.
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_mass(&m) <= f64::EPSILON * scale {
                break;
            }
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    rotated |= rotate(&mut m, &mut v, p, q);
                }
            }
            if !rotated {
                break;
            }
        }
        debug_assert!(off_diagonal_mass(&m) <= EIG_TOLERANCE * scale);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));

    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        fix_phase(&mut col);
        eigenvectors.set_column(dst, &col);
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_mass(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Annihilates `m[p][q]` with a phase-adjusted plane rotation, accumulating it into `v`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) -> bool {
    let apq = m[(p, q)];
    let abs = apq.norm();
    if abs == 0.0 {
        return false;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // Skip entries already negligible against both diagonal entries.
    if abs < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        m[(p, q)] = C64::new(0.0, 0.0);
        m[(q, p)] = C64::new(0.0, 0.0);
        return false;
    }
    let phase = apq / abs;
    let theta = (aqq - app) / (2.0 * abs);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let ph_conj = phase.conj();
    let n = m.rows();

    // Columns: A <- A U with u_p = c e_p - s e^{-i phi} e_q, u_q = s e_p + c e^{-i phi} e_q.
    for i in 0..n {
        let mip = m[(i, p)];
        let miq = m[(i, q)];
        m[(i, p)] = mip * c - miq * ph_conj * s;
        m[(i, q)] = mip * s + miq * ph_conj * c;
    }
    // Rows: A <- U^* A.
    for j in 0..n {
        let mpj = m[(p, j)];
        let mqj = m[(q, j)];
        m[(p, j)] = mpj * c - mqj * phase * s;
        m[(q, j)] = mpj * s + mqj * phase * c;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * c - viq * ph_conj * s;
        v[(i, q)] = vip * s + viq * ph_conj * c;
    }
    true
}

fn fix_phase(col: &mut [C64]) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in col.iter().enumerate() {
        // Earliest index wins near-ties so the convention is stable under rounding.
        if z.norm() > best_abs * (1.0 + 1e-12) {
            best_abs = z.norm();
            best = i;
        }
    }
    if best_abs <= 0.0 {
        return;
    }
    let phase = col[best].conj() / best_abs;
    for z in col.iter_mut() {
        *z *= phase;
    }
    col[best] = C64::new(col[best].norm(), 0.0);
}

/// Exponents supported by [`spectral_function`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Power {
    Inverse,
    InverseSqrt,
    Sqrt,
}

impl Power {
    pub fn exponent(self) -> f64 {
        match self {
            Power::Inverse => -1.0,
            Power::InverseSqrt => -0.5,
            Power::Sqrt => 0.5,
        }
    }
}

/// `A^p = V Lambda^p V^*` for a Hermitian positive semidefinite `A`.
pub fn spectral_function(a: &ComplexMatrix, power: Power) -> Result<ComplexMatrix> {
    let spec = hermitian_eig(a)?;
    spectral_function_of(&spec, power)
}

pub fn spectral_function_of(spec: &Spectrum, power: Power) -> Result<ComplexMatrix> {
    let max = spec.max().max(0.0);
    let min = spec.min();
    if power != Power::Sqrt && (spec.dim() > 0) && !(min > RANK_TOLERANCE * max) {
        return Err(Error::Singular { min, max });
    }
    let p = power.exponent();
    Ok(spec.recompose(|l| {
        let l = if power == Power::Sqrt { l.max(0.0) } else { l };
        l.powf(p)
    }))
}
