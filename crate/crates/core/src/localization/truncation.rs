use super::map::LocalizationMap;
use super::profile::{check_reference, LocalizationProfile};
use crate::error::{Error, Result};
use crate::frame::{parseval_deviation, partial_frame_operator, Frame, PARSEVAL_TOLERANCE};
use crate::linalg::{operator_norm, schur_norm_bound, ComplexMatrix, C64};

/// Slack on `||T_J|| <= 1` when deciding whether the constant 3 applies.
const UNIT_NORM_SLACK: f64 = 1e-9;

fn expansion_coefficients(
    frame: &Frame,
    reference: &Frame,
    map: &LocalizationMap,
) -> Result<ComplexMatrix> {
    let dev = parseval_deviation(reference);
    if dev > PARSEVAL_TOLERANCE {
        return Err(Error::NotParseval(dev));
    }
    check_reference(reference, map.group())?;
    if map.len() != frame.len() {
        return Err(Error::LabelMismatch(format!(
            "map covers {} positions, frame has {}",
            map.len(),
            frame.len()
        )));
    }
    // Row k, column i: <f_i, e_k>.
    Ok(reference.synthesis().adjoint().matmul(frame.synthesis()))
}

/// `f_{i,R} = sum_{|k - a(i)| < R} <f_i, e_k> e_k` over a Parseval reference.
pub fn truncate_frame(
    frame: &Frame,
    reference: &Frame,
    map: &LocalizationMap,
    radius: usize,
) -> Result<Frame> {
    let mut coeffs = expansion_coefficients(frame, reference, map)?;
    let g = map.group();
    for i in 0..frame.len() {
        for k in 0..g.size() {
            if g.dist(k, map.image(i)) >= radius {
                coeffs[(k, i)] = C64::new(0.0, 0.0);
            }
        }
    }
    Frame::new(
        reference.synthesis().matmul(&coeffs),
        frame.labels().to_vec(),
    )
}

/// Both sides of the truncation estimates for one `(R, J)`.
#[derive(Clone, Debug)]
pub struct TruncationCheck {
    pub radius: usize,
    pub min_radius: usize,
    /// `||S_J - S_{R,J}||`.
    pub operator_error: f64,
    /// `E(R)`, or its generalization when `||T_J|| > 1`.
    pub bound: f64,
    /// `||T_J - T_{R,J}||`.
    pub synthesis_error: f64,
    /// Schur test value of the cross-Gram matrix `<f_i - f_{i,R}, e_k>`.
    pub schur_value: f64,
    /// `K_a Δ(R) ||s||_1`.
    pub synthesis_bound: f64,
    /// The constant 3 was replaced by `||T_J|| + ||T_{R,J}||`.
    pub generalized: bool,
}

impl TruncationCheck {
    /// `R >= R_0`, so the estimates are guaranteed.
    pub fn guaranteed(&self) -> bool {
        self.radius >= self.min_radius
    }

    pub fn holds(&self, slack: f64) -> bool {
        self.operator_error <= self.bound + slack
            && self.synthesis_error <= self.schur_value + slack
            && self.schur_value <= self.synthesis_bound + slack
    }
}

/// Computes `||S_J - S_{R,J}||` and the bound `E(R)` for positions `J`.
pub fn truncation_error_check(
    frame: &Frame,
    reference: &Frame,
    map: &LocalizationMap,
    radius: usize,
    subset: &[usize],
    profile: &LocalizationProfile,
) -> Result<TruncationCheck> {
    let truncated = truncate_frame(frame, reference, map, radius)?;
    let n = frame.dim();
    let (operator_error, synthesis_error, schur_value, t_norm, tr_norm) = if subset.is_empty() {
        (0.0, 0.0, 0.0, 0.0, 0.0)
    } else {
        let s_j = partial_frame_operator(frame, subset);
        let s_rj = partial_frame_operator(&truncated, subset);
        let t_j = frame.synthesis().select_columns(subset);
        let t_rj = truncated.synthesis().select_columns(subset);
        let diff = &t_j - &t_rj;
        let cross = reference.synthesis().adjoint().matmul(&diff);
        (
            operator_norm(&(&s_j - &s_rj)),
            operator_norm(&diff),
            schur_norm_bound(&cross),
            operator_norm(&t_j),
            operator_norm(&t_rj),
        )
    };
    debug_assert_eq!(truncated.dim(), n);
    let synthesis_bound = profile.synthesis_error(radius);
    let generalized = t_norm > 1.0 + UNIT_NORM_SLACK;
    let bound = if generalized {
        (t_norm + tr_norm) * synthesis_bound
    } else {
        3.0 * synthesis_bound
    };
    Ok(TruncationCheck {
        radius,
        min_radius: profile.min_radius(),
        operator_error,
        bound,
        synthesis_error,
        schur_value,
        synthesis_bound,
        generalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localization::IndexGroup;

    fn onb(n: usize) -> Frame {
        Frame::from_synthesis(ComplexMatrix::identity(n)).unwrap()
    }

    /// Parseval frame on C^8 with vectors spread over three neighbours.
    fn banded() -> Frame {
        let raw = Frame::from_synthesis(ComplexMatrix::from_fn(8, 8, |i, j| {
            let d = (i as i64 - j as i64).rem_euclid(8);
            let w = match d {
                0 => 1.0,
                1 | 7 => 0.3,
                _ => 0.0,
            };
            C64::new(w, 0.0)
        }))
        .unwrap();
        crate::frame::parseval_normalize(&raw).unwrap()
    }

    #[test]
    fn zero_radius_gives_zero_vectors() {
        let g = IndexGroup::cyclic(8).unwrap();
        let map = LocalizationMap::identity(g);
        let t = truncate_frame(&banded(), &onb(8), &map, 0).unwrap();
        assert_eq!(t.synthesis().max_abs(), 0.0);
    }

    #[test]
    fn large_radius_reproduces_frame() {
        let g = IndexGroup::cyclic(8).unwrap();
        let map = LocalizationMap::identity(g);
        let f = banded();
        let t = truncate_frame(&f, &onb(8), &map, 5).unwrap();
        assert!((t.synthesis() - f.synthesis()).max_abs() < 1e-10);
    }

    #[test]
    fn check_holds_past_min_radius() {
        let g = IndexGroup::cyclic(8).unwrap();
        let map = LocalizationMap::identity(g);
        let f = banded();
        let e = onb(8);
        let p = LocalizationProfile::compute(&f, &map, &e).unwrap();
        let all: Vec<usize> = (0..8).collect();
        for radius in p.min_radius()..=5 {
            let c = truncation_error_check(&f, &e, &map, radius, &all, &p).unwrap();
            assert!(c.guaranteed());
            assert!(c.holds(1e-12), "{c:?}");
            assert!(!c.generalized);
        }
        let c = truncation_error_check(&f, &e, &map, 5, &all, &p).unwrap();
        assert!(c.operator_error < 1e-12);
        assert_eq!(c.bound, 0.0);
        let empty = truncation_error_check(&f, &e, &map, 2, &[], &p).unwrap();
        assert_eq!(empty.operator_error, 0.0);
    }

    #[test]
    fn rejects_non_parseval_reference() {
        let g = IndexGroup::cyclic(8).unwrap();
        let map = LocalizationMap::identity(g);
        let e = onb(8).scaled(2.0);
        assert!(matches!(
            truncate_frame(&banded(), &e, &map, 1),
            Err(Error::NotParseval(_))
        ));
    }
}
