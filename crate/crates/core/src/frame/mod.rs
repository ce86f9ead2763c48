//! Frames, their operators and bounds, canonical duals, Parseval
//! normalization, Naimark complements and redundancy profiles.

mod types;

pub use types::{DualPair, Frame, FrameBounds, Label};

use crate::error::{Error, Result};
use crate::limits::TailLimits;
use crate::linalg::{
    hermitian_eig, orthonormal_complement_basis, spectral_function_of, ComplexMatrix, Power,
    Spectrum, RANK_TOLERANCE,
};

/// Largest accepted entry of `S - I` for a frame treated as Parseval.
pub const PARSEVAL_TOLERANCE: f64 = 1e-8;

/// `S = sum_i f_i f_i^*`, formed as the explicit product `Phi Phi^*`.
pub fn frame_operator(frame: &Frame) -> ComplexMatrix {
    frame.synthesis().gram_outer()
}

/// Frame operator of the sub-collection at `positions`.
pub fn partial_frame_operator(frame: &Frame, positions: &[usize]) -> ComplexMatrix {
    frame.synthesis().select_columns(positions).gram_outer()
}

pub fn frame_spectrum(frame: &Frame) -> Spectrum {
    hermitian_eig(&frame_operator(frame)).expect("frame operator is Hermitian")
}

pub fn bounds_of_spectrum(spec: &Spectrum) -> FrameBounds {
    let upper = spec.max().max(0.0);
    let min = spec.min();
    let lower = if spec.dim() > 0 && min > RANK_TOLERANCE * upper {
        min
    } else {
        0.0
    };
    FrameBounds { lower, upper }
}

/// `(lambda_min(S), lambda_max(S))`; a lower bound of 0 means the vectors do not span.
pub fn frame_bounds(frame: &Frame) -> FrameBounds {
    bounds_of_spectrum(&frame_spectrum(frame))
}

pub fn parseval_deviation(frame: &Frame) -> f64 {
    (&frame_operator(frame) - &ComplexMatrix::identity(frame.dim())).max_abs()
}

pub fn is_parseval(frame: &Frame) -> bool {
    parseval_deviation(frame) <= PARSEVAL_TOLERANCE
}

fn spanning_spectrum(frame: &Frame) -> Result<Spectrum> {
    let spec = frame_spectrum(frame);
    let b = bounds_of_spectrum(&spec);
    if !b.is_frame() {
        return Err(Error::NotSpanning {
            lower: spec.min(),
            upper: b.upper,
        });
    }
    Ok(spec)
}

/// Canonical dual `S^{-1} f_i` together with the diagonal `<f_i, S^{-1} f_i>`.
pub fn canonical_dual(frame: &Frame) -> Result<DualPair> {
    let spec = spanning_spectrum(frame)?;
    let s_inv = spectral_function_of(&spec, Power::Inverse)?;
    let dual = frame.mapped(&s_inv);
    let diagonal = (0..frame.len())
        .map(|i| crate::linalg::inner(&frame.vector(i), &dual.vector(i)).re)
        .collect();
    Ok(DualPair {
        frame: frame.clone(),
        dual,
        diagonal,
    })
}

/// Canonical Parseval frame `S^{-1/2} f_i`.
pub fn parseval_normalize(frame: &Frame) -> Result<Frame> {
    let spec = spanning_spectrum(frame)?;
    let s_inv_sqrt = spectral_function_of(&spec, Power::InverseSqrt)?;
    Ok(frame.mapped(&s_inv_sqrt))
}

/// Naimark complement of a Parseval frame: `M` vectors in `C^{M-N}` with
/// `||sum c_i f_i||^2 + ||sum c_i f'_i||^2 = sum |c_i|^2` for every coefficient vector.
///
/// Realized by completing the isometry `Phi^*` to a unitary `[Phi^* | X]` and
/// taking `f'_i` as the `i`-th column of `X^*`. When `M = N` the result has dimension 0.
pub fn naimark_complement(frame: &Frame) -> Result<Frame> {
    let dev = parseval_deviation(frame);
    if dev > PARSEVAL_TOLERANCE {
        return Err(Error::NotParseval(dev));
    }
    if frame.len() < frame.dim() {
        return Err(Error::Hypothesis(format!(
            "a Parseval frame for C^{} needs at least {} vectors, found {}",
            frame.dim(),
            frame.dim(),
            frame.len()
        )));
    }
    let x = orthonormal_complement_basis(&frame.synthesis().adjoint())?;
    Frame::new(x.adjoint(), frame.labels().to_vec())
}

/// One entry of a redundancy profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RedundancyWindow {
    pub size: usize,
    /// `(1/|I_n|) sum_{i in I_n} <f_i, S^{-1} f_i>`.
    pub average: f64,
    /// Reciprocal of `average`.
    pub redundancy: f64,
}

#[derive(Clone, Debug)]
pub struct RedundancyProfile {
    pub windows: Vec<RedundancyWindow>,
    pub average_limits: TailLimits,
    pub redundancy_limits: TailLimits,
}

/// Window averages of the dual diagonal along nested position sets `I_0 ⊂ I_1 ⊂ ...`.
pub fn redundancy_profile(frame: &Frame, windows: &[Vec<usize>]) -> Result<RedundancyProfile> {
    if windows.is_empty() {
        return Err(Error::InvalidParameter("no windows supplied".into()));
    }
    for (n, w) in windows.iter().enumerate() {
        if w.is_empty() {
            return Err(Error::InvalidParameter(format!("window {n} is empty")));
        }
        if let Some(&bad) = w.iter().find(|&&i| i >= frame.len()) {
            return Err(Error::InvalidParameter(format!(
                "window {n} refers to position {bad} outside the frame"
            )));
        }
        if n > 0 {
            let prev: std::collections::HashSet<_> = windows[n - 1].iter().collect();
            let cur: std::collections::HashSet<_> = w.iter().collect();
            if !prev.is_subset(&cur) {
                return Err(Error::InvalidParameter(format!(
                    "window {n} does not contain window {}",
                    n - 1
                )));
            }
        }
    }
    let pair = canonical_dual(frame)?;
    let entries: Vec<RedundancyWindow> = windows
        .iter()
        .map(|w| {
            let average = w.iter().map(|&i| pair.diagonal[i]).sum::<f64>() / w.len() as f64;
            RedundancyWindow {
                size: w.len(),
                average,
                redundancy: 1.0 / average,
            }
        })
        .collect();
    let averages: Vec<f64> = entries.iter().map(|e| e.average).collect();
    let redundancies: Vec<f64> = entries.iter().map(|e| e.redundancy).collect();
    Ok(RedundancyProfile {
        windows: entries,
        average_limits: TailLimits::of(&averages),
        redundancy_limits: TailLimits::of(&redundancies),
    })
}

/// Bounds of `F[J]` next to the interval `[A A', B B']` predicted from the
/// bounds `A, B` of `F` and `A', B'` of the Parseval-normalized subfamily.
#[derive(Clone, Copy, Debug)]
pub struct Sandwich {
    pub frame: FrameBounds,
    pub parseval_sub: FrameBounds,
    pub computed: FrameBounds,
    pub predicted_lower: f64,
    pub predicted_upper: f64,
}

impl Sandwich {
    /// Both sides hold with the given absolute slack.
    pub fn holds(&self, slack: f64) -> bool {
        self.predicted_lower <= self.computed.lower + slack
            && self.computed.upper <= self.predicted_upper + slack
    }
}

pub fn subframe_bounds_sandwich(frame: &Frame, positions: &[usize]) -> Result<Sandwich> {
    let outer = frame_bounds(frame);
    let sharp = parseval_normalize(frame)?;
    let (parseval_sub, computed) = if positions.is_empty() {
        let zero = FrameBounds {
            lower: 0.0,
            upper: 0.0,
        };
        (zero, zero)
    } else {
        (
            frame_bounds(&sharp.subframe(positions)?),
            frame_bounds(&frame.subframe(positions)?),
        )
    };
    Ok(Sandwich {
        frame: outer,
        parseval_sub,
        computed,
        predicted_lower: outer.lower * parseval_sub.lower,
        predicted_upper: outer.upper * parseval_sub.upper,
    })
}
