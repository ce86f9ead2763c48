//! Finite subframe removal: the `g` estimate, greedy Riesz subset selection on
//! Naimark complements, and the reduction from arbitrary frames to Parseval
//! frames with small vectors.

use crate::error::{Error, Result};
use crate::frame::{
    frame_bounds, frame_operator, naimark_complement, parseval_deviation, parseval_normalize,
    partial_frame_operator, Frame, PARSEVAL_TOLERANCE,
};
use crate::linalg::{hermitian_eig, ComplexMatrix, C64};

/// Largest frame size accepted by [`exhaustive_oracle`].
pub const ORACLE_LIMIT: usize = 32;

/// Two greedy scores closer than this count as a tie (smallest index wins).
pub const GREEDY_TIE_TOLERANCE: f64 = 1e-12;

/// Slack on vector norms when checking the `1/2` hypotheses.
const NORM_SLACK: f64 = 1e-9;

const ORACLE_TIE_TOLERANCE: f64 = 1e-13;

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "{name} must lie in (0, 1), got {x}"
        )));
    }
    Ok(())
}

/// Natural log of [`g_estimate`]; stays finite where the value itself underflows.
pub fn g_estimate_ln(eps: f64) -> Result<f64> {
    check_unit_interval("eps", eps)?;
    let exponent = 1.0 + (4.0 / (eps * eps)) * (1.0 / eps).ln();
    Ok(exponent * (eps * eps / 8.0).ln())
}

/// `(eps^2/8)^(1 + (4/eps^2) ln(1/eps))`, a lower estimate for the frame bound
/// retained after removal. Underflows to 0 below roughly `eps = 0.22`.
pub fn g_estimate(eps: f64) -> Result<f64> {
    Ok(g_estimate_ln(eps)?.exp())
}

/// Result of a Riesz subset selection.
#[derive(Clone, Debug)]
pub struct RieszSelection {
    /// Chosen positions, in the order the greedy added them.
    pub selected: Vec<usize>,
    /// `lambda_min` of the Gram matrix of the selected vectors.
    pub riesz_bound: f64,
    pub target_size: usize,
    /// `g_estimate(delta)`.
    pub estimate: f64,
}

impl RieszSelection {
    pub fn estimate_met(&self) -> bool {
        self.riesz_bound >= self.estimate
    }
}

/// Largest eigenvalue of `diag(lambda) + z z^*` given `|z_k|^2`, by bisection
/// on the secular equation. `lambda` is ascending.
fn rank_one_top(lambda: &[f64], z_sq: &[f64]) -> f64 {
    let top = lambda.last().copied().unwrap_or(0.0);
    let mass: f64 = z_sq.iter().sum();
    if mass == 0.0 {
        return top;
    }
    let (mut lo, mut hi) = (top, top + mass);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let mut h = 0.0;
        let mut above = true;
        for (&l, &w) in lambda.iter().zip(z_sq) {
            if w == 0.0 {
                continue;
            }
            let gap = mid - l;
            if gap <= 0.0 {
                above = false;
                break;
            }
            h += w / gap;
        }
        if !above || h >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Greedy selection of `target` columns of `coframe` keeping `lambda_max` of
/// their frame operator as small as possible. Returns the selection order and
/// the final `lambda_max`.
///
/// When `coframe` is the Naimark complement of a Parseval frame `F'`, the Gram
/// matrix of `F'` over a set equals `I` minus the Gram matrix of `coframe` over
/// it, so this maximizes the lower Riesz bound of the chosen vectors of `F'`.
fn greedy_on_coframe(coframe: &ComplexMatrix, target: usize) -> (Vec<usize>, f64) {
    let n = coframe.rows();
    let m = coframe.cols();
    let columns: Vec<Vec<C64>> = (0..m).map(|j| coframe.column(j)).collect();
    let mut chosen = vec![false; m];
    let mut order = Vec::with_capacity(target);
    let mut s = ComplexMatrix::zeros(n, n);
    let mut lambda = vec![0.0; n];
    let mut basis_adj = ComplexMatrix::identity(n);
    let mut top = 0.0;

    for _ in 0..target.min(m) {
        let mut best: Option<(usize, f64)> = None;
        for (i, col) in columns.iter().enumerate() {
            if chosen[i] {
                continue;
            }
            let z = basis_adj.mul_vec(col);
            let z_sq: Vec<f64> = z.iter().map(|w| w.norm_sqr()).collect();
            let score = rank_one_top(&lambda, &z_sq);
            match best {
                Some((_, b)) if score >= b - GREEDY_TIE_TOLERANCE => {}
                _ => best = Some((i, score)),
            }
        }
        let (pick, _) = best.expect("an unchosen column remains");
        chosen[pick] = true;
        order.push(pick);
        let col = &columns[pick];
        for r in 0..n {
            for c in 0..n {
                s[(r, c)] += col[r] * col[c].conj();
            }
        }
        let spec = hermitian_eig(&s).expect("partial frame operator is Hermitian");
        lambda = spec.eigenvalues.clone();
        basis_adj = spec.eigenvectors.adjoint();
        top = spec.max().max(0.0);
    }
    (order, top)
}

/// Picks `floor((1-delta) N)` vectors of the Parseval frame `frame` forming a
/// Riesz sequence with a large lower bound. Requires `||f_i||^2 >= 1/2`.
pub fn riesz_subset_select(frame: &Frame, delta: f64) -> Result<RieszSelection> {
    check_unit_interval("delta", delta)?;
    let dev = parseval_deviation(frame);
    if dev > PARSEVAL_TOLERANCE {
        return Err(Error::NotParseval(dev));
    }
    if let Some(i) = (0..frame.len()).find(|&i| frame.norm_sqr(i) < 0.5 - NORM_SLACK) {
        return Err(Error::Hypothesis(format!(
            "vector {i} has squared norm {:.6} below 1/2",
            frame.norm_sqr(i)
        )));
    }
    let coframe = naimark_complement(frame)?;
    let target = floor_tol((1.0 - delta) * frame.dim() as f64);
    let (selected, top) = greedy_on_coframe(coframe.synthesis(), target);
    Ok(RieszSelection {
        selected,
        riesz_bound: (1.0 - top).max(0.0),
        target_size: target,
        estimate: g_estimate(delta)?,
    })
}

fn floor_tol(x: f64) -> usize {
    (x + 1e-9).floor().max(0.0) as usize
}

fn ceil_tol(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

/// `ceil((1+eps) N)`.
pub fn cardinality_bound(eps: f64, dim: usize) -> usize {
    ceil_tol((1.0 + eps) * dim as f64)
}

/// Outcome of a removal step.
#[derive(Clone, Debug)]
pub struct RemovalCertificate {
    /// Kept positions, ascending.
    pub selected: Vec<usize>,
    pub cardinality_bound: usize,
    /// Guaranteed `c` with `S_J >= c S_F`.
    pub certified_ratio: f64,
    /// `ln` of the certified ratio.
    pub certified_ratio_ln: f64,
    /// `lambda_min(S_F^{-1/2} S_J S_F^{-1/2})`.
    pub achieved_ratio: f64,
    /// The `delta` passed to the selection.
    pub delta: f64,
    /// Lower Riesz bound reached by the greedy on the complement.
    pub riesz_bound: f64,
}

impl RemovalCertificate {
    pub fn estimate_met(&self) -> bool {
        self.riesz_bound >= self.certified_ratio
    }

    pub fn holds(&self) -> bool {
        self.selected.len() <= self.cardinality_bound && self.achieved_ratio >= self.certified_ratio
    }
}

fn check_eps(eps: f64, frame: &Frame) -> Result<()> {
    let limit = frame.len() as f64 / frame.dim() as f64 - 1.0;
    if !(eps > 0.0 && eps < limit) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, M/N - 1) = (0, {limit}), got {eps}"
        )));
    }
    Ok(())
}

fn check_parseval(frame: &Frame) -> Result<()> {
    let dev = parseval_deviation(frame);
    if dev > PARSEVAL_TOLERANCE {
        return Err(Error::NotParseval(dev));
    }
    Ok(())
}

/// Removal for a Parseval frame with `||f_i||^2 <= 1/2`, run with an explicit
/// selection parameter. The complement of the frame's Naimark complement is the
/// frame itself up to a unitary, so the greedy runs directly on `frame`.
fn remove_smallnorm_with_delta(frame: &Frame, delta: f64) -> Result<(Vec<usize>, f64)> {
    check_unit_interval("delta", delta)?;
    let m = frame.len();
    let n = frame.dim();
    let target = floor_tol((1.0 - delta) * (m - n) as f64);
    let (sigma, top) = greedy_on_coframe(frame.synthesis(), target);
    let mut removed = vec![false; m];
    for &i in &sigma {
        removed[i] = true;
    }
    let kept = (0..m).filter(|&i| !removed[i]).collect();
    Ok((kept, (1.0 - top).max(0.0)))
}

fn min_eig(s: &ComplexMatrix) -> f64 {
    if s.rows() == 0 {
        return 1.0;
    }
    hermitian_eig(s).expect("Hermitian").min()
}

/// Removal for a Parseval frame whose vectors all have `||f_i||^2 <= 1/2`.
pub fn remove_parseval_smallnorm(frame: &Frame, eps: f64) -> Result<RemovalCertificate> {
    check_parseval(frame)?;
    check_eps(eps, frame)?;
    if let Some(i) = (0..frame.len()).find(|&i| frame.norm_sqr(i) > 0.5 + NORM_SLACK) {
        return Err(Error::Hypothesis(format!(
            "vector {i} has squared norm {:.6} above 1/2",
            frame.norm_sqr(i)
        )));
    }
    let ratio = frame.len() as f64 / frame.dim() as f64;
    let delta = eps / (2.0 * ratio - 1.0);
    let (selected, riesz_bound) = remove_smallnorm_with_delta(frame, delta)?;
    let achieved = min_eig(&partial_frame_operator(frame, &selected));
    let ln = g_estimate_ln(delta)?;
    Ok(RemovalCertificate {
        cardinality_bound: cardinality_bound(eps, frame.dim()),
        selected,
        certified_ratio: ln.exp(),
        certified_ratio_ln: ln,
        achieved_ratio: achieved,
        delta,
        riesz_bound,
    })
}

/// Removal for an arbitrary Parseval frame: every vector is halved and listed
/// twice, the small-norm removal runs on the doubled frame, and a position is
/// kept if either copy was kept.
pub fn remove_parseval(frame: &Frame, eps: f64) -> Result<RemovalCertificate> {
    check_parseval(frame)?;
    check_eps(eps, frame)?;
    let ratio = frame.len() as f64 / frame.dim() as f64;
    let delta = eps / (2.0 * ratio - 1.0);
    let doubled = frame.duplicated_halves();
    let (kept_copies, riesz_bound) = remove_smallnorm_with_delta(&doubled, delta)?;
    let mut selected: Vec<usize> = kept_copies.iter().map(|&p| p / 2).collect();
    selected.dedup();
    let achieved = min_eig(&partial_frame_operator(frame, &selected));
    let ln = g_estimate_ln(delta)?;
    Ok(RemovalCertificate {
        cardinality_bound: cardinality_bound(eps, frame.dim()),
        selected,
        certified_ratio: ln.exp(),
        certified_ratio_ln: ln,
        achieved_ratio: achieved,
        delta,
        riesz_bound,
    })
}

/// Removal for any spanning frame, through its canonical Parseval frame.
/// The certificate is relative: `S_J >= c S_F`.
pub fn finite_removal(frame: &Frame, eps: f64) -> Result<RemovalCertificate> {
    check_eps(eps, frame)?;
    let sharp = parseval_normalize(frame)?;
    remove_parseval(&sharp, eps)
}

/// Best subset found by [`exhaustive_oracle`].
#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub subset: Vec<usize>,
    pub lambda_min: f64,
}

struct Search<'a> {
    frame: &'a Frame,
    size: usize,
    best: Option<OracleResult>,
    chosen: Vec<usize>,
}

impl Search<'_> {
    fn best_value(&self) -> f64 {
        self.best
            .as_ref()
            .map_or(f64::NEG_INFINITY, |b| b.lambda_min)
    }

    fn lower_bound_of(&self, positions: &[usize]) -> f64 {
        if positions.is_empty() {
            return 0.0;
        }
        frame_bounds(&self.frame.subframe(positions).expect("valid positions")).lower
    }

    fn visit(&mut self, next: usize) {
        let m = self.frame.len();
        if self.chosen.len() == self.size {
            let value = self.lower_bound_of(&self.chosen.clone());
            if value > self.best_value() + ORACLE_TIE_TOLERANCE {
                self.best = Some(OracleResult {
                    subset: self.chosen.clone(),
                    lambda_min: value,
                });
            }
            return;
        }
        if self.chosen.len() + (m - next) < self.size {
            return;
        }
        self.chosen.push(next);
        self.visit(next + 1);
        self.chosen.pop();

        if self.chosen.len() + (m - next - 1) < self.size {
            return;
        }
        let mut optimistic = self.chosen.clone();
        optimistic.extend(next + 1..m);
        if self.best.is_some()
            && self.lower_bound_of(&optimistic) <= self.best_value() + ORACLE_TIE_TOLERANCE
        {
            return;
        }
        self.visit(next + 1);
    }
}

/// Exact maximizer of `lambda_min(S_J)` over `|J| <= cap`. Adding vectors never
/// lowers `lambda_min`, so only sets of size `min(cap, M)` are searched; among
/// those, ties go to the lexicographically smallest set. Branch and bound with
/// the bound `lambda_min(S_{chosen + undecided})`.
pub fn exhaustive_oracle(frame: &Frame, cap: usize) -> Result<OracleResult> {
    if frame.len() > ORACLE_LIMIT {
        return Err(Error::TooLarge {
            size: frame.len(),
            limit: ORACLE_LIMIT,
        });
    }
    let size = cap.min(frame.len());
    if size == 0 {
        return Ok(OracleResult {
            subset: Vec::new(),
            lambda_min: 0.0,
        });
    }
    let mut search = Search {
        frame,
        size,
        best: None,
        chosen: Vec::with_capacity(size),
    };
    search.visit(0);
    Ok(search
        .best
        .expect("at least one subset of the requested size"))
}

/// `S_F - S_J` for a kept set `J`, i.e. the frame operator of the removed vectors.
pub fn removed_operator(frame: &Frame, kept: &[usize]) -> ComplexMatrix {
    &frame_operator(frame) - &partial_frame_operator(frame, kept)
}
