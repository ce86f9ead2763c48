use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

/// Identifier attached to a frame vector: an integer tuple such as `(7)` or `(x, w)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(pub Vec<i64>);

impl Label {
    pub fn index(i: usize) -> Self {
        Label(vec![i as i64])
    }

    pub fn pair(a: i64, b: i64) -> Self {
        Label(vec![a, b])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    /// Label extended by one trailing coordinate.
    pub fn extended(&self, extra: i64) -> Self {
        let mut v = self.0.clone();
        v.push(extra);
        Label(v)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "{}", parts.join(":"))
    }
}

/// Finite collection of `M` vectors in `C^N`, stored as the `N x M` synthesis matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    synthesis: ComplexMatrix,
    labels: Vec<Label>,
}

impl Frame {
    pub fn new(synthesis: ComplexMatrix, labels: Vec<Label>) -> Result<Self> {
        if synthesis.cols() == 0 {
            return Err(Error::InvalidParameter(
                "a frame needs at least one vector".into(),
            ));
        }
        if labels.len() != synthesis.cols() {
            return Err(Error::LabelMismatch(format!(
                "{} labels for {} vectors",
                labels.len(),
                synthesis.cols()
            )));
        }
        let mut seen = HashSet::with_capacity(labels.len());
        for l in &labels {
            if !seen.insert(l) {
                return Err(Error::LabelMismatch(format!("duplicate label {l}")));
            }
        }
        Ok(Self { synthesis, labels })
    }

    /// Frame labelled `0..M` in column order.
    pub fn from_synthesis(synthesis: ComplexMatrix) -> Result<Self> {
        let labels = (0..synthesis.cols()).map(Label::index).collect();
        Self::new(synthesis, labels)
    }

    pub fn from_vectors(dim: usize, vectors: &[Vec<C64>]) -> Result<Self> {
        if let Some(bad) = vectors.iter().position(|v| v.len() != dim) {
            return Err(Error::Dimension(format!(
                "vector {bad} has length {} but the frame dimension is {dim}",
                vectors[bad].len()
            )));
        }
        Self::from_synthesis(ComplexMatrix::from_columns(dim, vectors))
    }

    pub fn from_real_vectors(dim: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<C64>> = vectors
            .iter()
            .map(|v| v.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_vectors(dim, &complex)
    }

    /// Ambient dimension `N`.
    pub fn dim(&self) -> usize {
        self.synthesis.rows()
    }

    /// Number of vectors `M`.
    pub fn len(&self) -> usize {
        self.synthesis.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn synthesis(&self) -> &ComplexMatrix {
        &self.synthesis
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.synthesis.column(i)
    }

    pub fn vectors(&self) -> Vec<Vec<C64>> {
        (0..self.len()).map(|i| self.vector(i)).collect()
    }

    pub fn norm_sqr(&self, i: usize) -> f64 {
        (0..self.dim())
            .map(|r| self.synthesis[(r, i)].norm_sqr())
            .sum()
    }

    pub fn position(&self, label: &Label) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `F[J]` for positions `J` (kept in the given order).
    pub fn subframe(&self, positions: &[usize]) -> Result<Self> {
        let labels = positions.iter().map(|&i| self.labels[i].clone()).collect();
        Self::new(self.synthesis.select_columns(positions), labels)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            synthesis: self.synthesis.scale(s),
            labels: self.labels.clone(),
        }
    }

    /// Applies a linear map `A` (rows x N) to every vector.
    pub fn mapped(&self, a: &ComplexMatrix) -> Self {
        Self {
            synthesis: a.matmul(&self.synthesis),
            labels: self.labels.clone(),
        }
    }

    /// Concatenation of two frames over the same space; labels must stay distinct.
    pub fn union(&self, other: &Frame) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "cannot join frames of dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        let mut cols = self.vectors();
        cols.extend(other.vectors());
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Self::new(ComplexMatrix::from_columns(self.dim(), &cols), labels)
    }

    /// Every vector scaled by `1/sqrt(2)` and listed twice: position `2i + c` holds
    /// copy `c` of vector `i`, labelled by the original label extended with `c`.
    /// The frame operator is unchanged.
    pub fn duplicated_halves(&self) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut cols = Vec::with_capacity(2 * self.len());
        let mut labels = Vec::with_capacity(2 * self.len());
        for i in 0..self.len() {
            let v: Vec<C64> = self.vector(i).into_iter().map(|z| z * h).collect();
            for copy in 0..2 {
                cols.push(v.clone());
                labels.push(self.labels[i].extended(copy));
            }
        }
        Self {
            synthesis: ComplexMatrix::from_columns(self.dim(), &cols),
            labels,
        }
    }
}

/// Optimal frame bounds `A = lambda_min(S)`, `B = lambda_max(S)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    /// `A > 0`: the collection spans the ambient space.
    pub fn is_frame(&self) -> bool {
        self.lower > 0.0
    }
}

/// A frame with its canonical dual and the diagonal `<f_i, S^{-1} f_i>`.
#[derive(Clone, Debug)]
pub struct DualPair {
    pub frame: Frame,
    pub dual: Frame,
    pub diagonal: Vec<f64>,
}

impl DualPair {
    pub fn trace(&self) -> f64 {
        self.diagonal.iter().sum()
    }
}
