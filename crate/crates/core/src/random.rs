//! Seeded generators for test and demo frames.
//!
//! The stream is ChaCha8 seeded with `seed_from_u64`. A uniform draw is
//! `(next_u64 >> 11) * 2^-53`; normals come from Box-Muller on two uniforms
//! `u1, u2` as `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)` and the matching sine, used
//! in that order. Complex entries take the real part first.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::frame::{parseval_normalize, Frame};
use crate::linalg::{ComplexMatrix, C64};
use crate::localization::{IndexGroup, LocalizationMap};

pub struct SeededRng {
    inner: ChaCha8Rng,
    spare: Option<f64>,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * t.sin());
        r * t.cos()
    }

    pub fn complex_normal(&mut self) -> C64 {
        let re = self.normal();
        C64::new(re, self.normal())
    }

    /// Raw draw, used to seed independent sub-generators.
    pub fn next_seed(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }

    /// Each of `0..n` kept independently with probability `p`.
    pub fn subset(&mut self, n: usize, p: f64) -> Vec<usize> {
        (0..n).filter(|_| self.uniform() < p).collect()
    }
}

/// `N x M` matrix of standard normal entries, row-major draw order.
pub fn gaussian_matrix(
    rng: &mut SeededRng,
    rows: usize,
    cols: usize,
    complex: bool,
) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        if complex {
            rng.complex_normal()
        } else {
            C64::new(rng.normal(), 0.0)
        }
    })
}

pub fn random_frame(n: usize, m: usize, seed: u64, complex: bool) -> Result<Frame> {
    let mut rng = SeededRng::new(seed);
    Frame::from_synthesis(gaussian_matrix(&mut rng, n, m, complex))
}

/// Canonical Parseval frame of a Gaussian frame.
pub fn random_parseval(n: usize, m: usize, seed: u64, complex: bool) -> Result<Frame> {
    parseval_normalize(&random_frame(n, m, seed, complex)?)
}

/// A frame localized against a reference on `Z_L`: both are Parseval
/// normalizations of random banded systems, and frame vectors sit `per_site`
/// to a group element.
pub struct LocalizedConfiguration {
    pub frame: Frame,
    pub reference: Frame,
    pub map: LocalizationMap,
}

fn banded(
    rng: &mut SeededRng,
    l: usize,
    centers: &[usize],
    width: usize,
    decay: f64,
) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(l, centers.len());
    for (j, &c) in centers.iter().enumerate() {
        for off in -(width as i64)..=(width as i64) {
            let row = (c as i64 + off).rem_euclid(l as i64) as usize;
            let w = (-decay * off.abs() as f64).exp();
            m[(row, j)] += rng.complex_normal() * w
                + if off == 0 {
                    C64::new(2.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                };
        }
    }
    m
}

pub fn localized_configuration(
    l: usize,
    per_site: usize,
    seed: u64,
) -> Result<LocalizedConfiguration> {
    let mut rng = SeededRng::new(seed);
    let group = IndexGroup::cyclic(l)?;
    let sites: Vec<usize> = (0..l).collect();
    let reference = parseval_normalize(&Frame::new(
        banded(&mut rng, l, &sites, 1, 1.5),
        (0..l).map(|k| group.label(k)).collect(),
    )?)?;
    let assignment: Vec<usize> = (0..l * per_site).map(|i| i / per_site).collect();
    let width = 1 + rng.below(3);
    let frame = parseval_normalize(&Frame::from_synthesis(banded(
        &mut rng,
        l,
        &assignment,
        width,
        0.8,
    ))?)?;
    Ok(LocalizedConfiguration {
        frame,
        reference,
        map: LocalizationMap::new(group, assignment)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::is_parseval;

    #[test]
    fn uniform_range_and_reproducibility() {
        let mut a = SeededRng::new(7);
        let mut b = SeededRng::new(7);
        for _ in 0..1000 {
            let x = a.uniform();
            assert!((0.0..1.0).contains(&x));
            assert_eq!(x, b.uniform());
        }
    }

    #[test]
    fn normal_moments() {
        let mut rng = SeededRng::new(1);
        let xs: Vec<f64> = (0..20000).map(|_| rng.normal()).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.03);
        assert!((var - 1.0).abs() < 0.05);
    }

    #[test]
    fn parseval_generator() {
        let f = random_parseval(4, 10, 7, true).unwrap();
        assert!(is_parseval(&f));
        assert_eq!(f, random_parseval(4, 10, 7, true).unwrap());
        assert_ne!(f, random_parseval(4, 10, 8, true).unwrap());
    }

    #[test]
    fn localized_generator() {
        let c = localized_configuration(16, 2, 3).unwrap();
        assert!(is_parseval(&c.frame) && is_parseval(&c.reference));
        assert_eq!(c.map.len(), 32);
    }
}
