//! Finite stand-ins for limits along window sequences.

/// Extremes of the trailing half of a finite sequence.
///
/// For a sequence of length `n` the tail is the entries with index `>= n / 2`;
/// a single-entry sequence is its own tail. Empty sequences yield `NaN`s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailLimits {
    pub inf: f64,
    pub sup: f64,
}

impl TailLimits {
    pub fn of(values: &[f64]) -> Self {
        let tail = &values[values.len() / 2..];
        if tail.is_empty() {
            return Self {
                inf: f64::NAN,
                sup: f64::NAN,
            };
        }
        Self {
            inf: tail.iter().copied().fold(f64::INFINITY, f64::min),
            sup: tail.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn spread(&self) -> f64 {
        self.sup - self.inf
    }
}
