//! Finite Gabor systems on `Z_L`: time-frequency shifts, the periodized
//! Gaussian, the short-time Fourier transform, molecule envelopes, Beurling
//! densities and Gabor thinning.

use std::collections::HashSet;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::frame::{frame_bounds, Frame, Label};
use crate::linalg::{ComplexMatrix, C64};
use crate::localization::{density_table, DensityTable, IndexGroup, LocalizationMap};
use crate::thinning::{extract_sparse_subframe, Mode, ThinningResult};

/// Pointwise slack allowed by [`molecule_check`].
pub const MOLECULE_TOLERANCE: f64 = 1e-12;

fn phase(k: i64, l: usize) -> C64 {
    let t = 2.0 * PI * (k.rem_euclid(l as i64)) as f64 / l as f64;
    C64::new(t.cos(), t.sin())
}

/// `(T_x g)(t) = g((t - x) mod L)`.
pub fn translate(g: &[C64], x: usize) -> Vec<C64> {
    let l = g.len();
    (0..l).map(|t| g[(t + l - x % l) % l]).collect()
}

/// `(M_w g)(t) = e^{2 pi i w t / L} g(t)`.
pub fn modulate(g: &[C64], w: usize) -> Vec<C64> {
    let l = g.len();
    g.iter()
        .enumerate()
        .map(|(t, &z)| z * phase((w * t) as i64, l))
        .collect()
}

/// `M_w T_x g`.
pub fn time_frequency_shift(g: &[C64], x: usize, w: usize) -> Vec<C64> {
    modulate(&translate(g, x), w)
}

/// `sum_{|m| <= 3} e^{-pi (t + mL)^2 / L}`, normalized to unit norm.
pub fn discrete_gaussian(l: usize) -> Result<Vec<C64>> {
    if l < 4 {
        return Err(Error::InvalidParameter(format!(
            "length must be at least 4, got {l}"
        )));
    }
    let lf = l as f64;
    let raw: Vec<f64> = (0..l)
        .map(|t| {
            (-3i64..=3)
                .map(|m| {
                    let u = t as f64 + m as f64 * lf;
                    (-PI * u * u / lf).exp()
                })
                .sum()
        })
        .collect();
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(raw.into_iter().map(|v| C64::new(v / norm, 0.0)).collect())
}

/// `V(y, xi) = sum_t h(t) window(t - y) e^{-2 pi i xi t / L}` as an `L x L`
/// matrix with rows `y` and columns `xi`. The window is not conjugated.
/// With a unit window, `sum |V|^2 = L ||h||^2`.
pub fn stft(h: &[C64], window: &[C64]) -> Result<ComplexMatrix> {
    let l = h.len();
    if window.len() != l {
        return Err(Error::Dimension(format!(
            "signal length {l} differs from window length {}",
            window.len()
        )));
    }
    let mut v = ComplexMatrix::zeros(l, l);
    for y in 0..l {
        let prod: Vec<C64> = (0..l).map(|t| h[t] * window[(t + l - y) % l]).collect();
        for xi in 0..l {
            v[(y, xi)] = prod
                .iter()
                .enumerate()
                .map(|(t, &z)| z * phase(-((xi * t) as i64), l))
                .sum();
        }
    }
    Ok(v)
}

/// `|V|` entrywise, row-major over `(y, xi)`.
pub fn stft_modulus(h: &[C64], window: &[C64]) -> Result<Vec<f64>> {
    Ok(stft(h, window)?
        .as_slice()
        .iter()
        .map(|z| z.norm())
        .collect())
}

/// Window plus time-frequency labels `(x, w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteGaborSystem {
    length: usize,
    window: Vec<C64>,
    labels: Vec<(usize, usize)>,
}

impl FiniteGaborSystem {
    pub fn new(window: Vec<C64>, labels: Vec<(usize, usize)>) -> Result<Self> {
        let length = window.len();
        if length == 0 {
            return Err(Error::InvalidParameter("empty window".into()));
        }
        let mut seen = HashSet::new();
        for &(x, w) in &labels {
            if x >= length || w >= length {
                return Err(Error::InvalidParameter(format!(
                    "label ({x}, {w}) outside Z_{length} x Z_{length}"
                )));
            }
            if !seen.insert((x, w)) {
                return Err(Error::LabelMismatch(format!("duplicate label ({x}, {w})")));
            }
        }
        Ok(Self {
            length,
            window,
            labels,
        })
    }

    /// `Lambda = Z_L x Z_L` in row-major order.
    pub fn full_grid(window: Vec<C64>) -> Result<Self> {
        let l = window.len();
        let labels = (0..l).flat_map(|x| (0..l).map(move |w| (x, w))).collect();
        Self::new(window, labels)
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn window(&self) -> &[C64] {
        &self.window
    }

    pub fn labels(&self) -> &[(usize, usize)] {
        &self.labels
    }
}

/// Frame of the vectors `M_w T_x g` labelled `(x, w)`.
pub fn gabor_frame(sys: &FiniteGaborSystem) -> Result<Frame> {
    let vectors: Vec<Vec<C64>> = sys
        .labels
        .iter()
        .map(|&(x, w)| time_frequency_shift(&sys.window, x, w))
        .collect();
    let labels = sys
        .labels
        .iter()
        .map(|&(x, w)| Label::pair(x as i64, w as i64))
        .collect();
    Frame::new(ComplexMatrix::from_columns(sys.length, &vectors), labels)
}

/// `(x, w)` of a frame label, if it is a pair inside `Z_L x Z_L`.
pub fn tf_label(label: &Label, l: usize) -> Option<(usize, usize)> {
    match label.coords() {
        &[x, w] if x >= 0 && w >= 0 && (x as usize) < l && (w as usize) < l => {
            Some((x as usize, w as usize))
        }
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoleculeCheck {
    pub holds: bool,
    /// Largest `|V_gamma f(y, xi)| - envelope(y - x, xi - w)`; at most 0 when exact.
    pub worst: f64,
}

/// Checks `|V_gamma f_{x,w}(y, xi)| <= envelope(y - x, xi - w)` for every member
/// and every `(y, xi)`, with offsets taken mod `L`. The envelope is row-major
/// over `Z_L x Z_L`.
pub fn molecule_check(envelope: &[f64], family: &Frame, gamma: &[C64]) -> Result<MoleculeCheck> {
    let l = gamma.len();
    if envelope.len() != l * l || family.dim() != l {
        return Err(Error::Dimension(format!(
            "envelope of {} entries and vectors of length {} for L = {l}",
            envelope.len(),
            family.dim()
        )));
    }
    let mut worst = f64::NEG_INFINITY;
    for i in 0..family.len() {
        let (x, w) = tf_label(&family.labels()[i], l).ok_or_else(|| {
            Error::LabelMismatch(format!(
                "label {} is not a time-frequency pair",
                family.labels()[i]
            ))
        })?;
        let v = stft(&family.vector(i), gamma)?;
        for y in 0..l {
            for xi in 0..l {
                let env = envelope[((y + l - x) % l) * l + (xi + l - w) % l];
                worst = worst.max(v[(y, xi)].norm() - env);
            }
        }
    }
    Ok(MoleculeCheck {
        holds: worst <= MOLECULE_TOLERANCE,
        worst,
    })
}

/// `sum Gamma`; on a discrete grid the sup over unit cells is pointwise.
pub fn envelope_w_norm(envelope: &[f64]) -> f64 {
    envelope.iter().sum()
}

/// `||V_gamma g||_1`.
pub fn window_m1_norm(g: &[C64], gamma: &[C64]) -> Result<f64> {
    Ok(stft_modulus(g, gamma)?.iter().sum())
}

/// Counts of a label set in wrapped max-metric balls of `Z_L x Z_L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeurlingRow {
    pub radius: usize,
    pub max_count: usize,
    pub min_count: usize,
    /// `(2N)^2`.
    pub denominator: usize,
}

impl BeurlingRow {
    pub fn upper(&self) -> f64 {
        self.max_count as f64 / self.denominator as f64
    }

    pub fn lower(&self) -> f64 {
        self.min_count as f64 / self.denominator as f64
    }
}

/// Beurling-style counts for radii `1..=max_radius` over every centre.
pub fn beurling_density(
    labels: &[(usize, usize)],
    l: usize,
    max_radius: usize,
) -> Result<Vec<BeurlingRow>> {
    let plane = IndexGroup::new(2, l, 1)?;
    let assignment = labels
        .iter()
        .map(|&(x, w)| plane.index(&[x as i64, w as i64, 0]))
        .collect();
    let map = LocalizationMap::new(plane, assignment)?;
    let table = density_table(&map, None, max_radius);
    Ok(table
        .rows
        .iter()
        .filter(|r| r.radius >= 1)
        .map(|r| BeurlingRow {
            radius: r.radius,
            max_count: r.max_count,
            min_count: r.min_count,
            denominator: 4 * r.radius * r.radius,
        })
        .collect())
}

/// Spacing `a` of the reference lattice `aZ_L x aZ_L`: the largest divisor of
/// `L` not above `sqrt(L/2)` with `a^2 < L` and `L/a >= 4`.
pub fn reference_lattice(l: usize) -> Result<usize> {
    let cap = ((l as f64) / 2.0).sqrt().floor() as usize;
    (1..=cap.max(1))
        .rev()
        .find(|&a| l.is_multiple_of(a) && a * a < l && l / a >= 4)
        .ok_or_else(|| Error::InvalidParameter(format!("no reference lattice for L = {l}")))
}

/// Gaussian reference system on `aZ_L x aZ_L`, indexed by `Z_{L/a}^2`.
pub fn reference_frame(l: usize, spacing: usize) -> Result<(Frame, IndexGroup)> {
    if spacing == 0 || !l.is_multiple_of(spacing) {
        return Err(Error::InvalidParameter(format!(
            "spacing {spacing} does not divide {l}"
        )));
    }
    let group = IndexGroup::new(2, l / spacing, 1)?;
    let gamma = discrete_gaussian(l)?;
    let vectors: Vec<Vec<C64>> = (0..group.size())
        .map(|k| {
            let c = group.coords(k);
            time_frequency_shift(&gamma, c[0] * spacing, c[1] * spacing)
        })
        .collect();
    let labels = (0..group.size()).map(|k| group.label(k)).collect();
    let frame = Frame::new(ComplexMatrix::from_columns(l, &vectors), labels)?;
    let b = frame_bounds(&frame);
    if !b.is_frame() {
        return Err(Error::NotSpanning {
            lower: b.lower,
            upper: b.upper,
        });
    }
    Ok((frame, group))
}

/// `a(x, w) = (floor(x/a), floor(w/a))` in lattice coordinates.
pub fn lattice_map(
    sys: &FiniteGaborSystem,
    spacing: usize,
    group: IndexGroup,
) -> Result<LocalizationMap> {
    let assignment = sys
        .labels
        .iter()
        .map(|&(x, w)| group.index(&[(x / spacing) as i64, (w / spacing) as i64, 0]))
        .collect();
    LocalizationMap::new(group, assignment)
}

#[derive(Clone, Debug)]
pub struct GaborThinning {
    pub spacing: usize,
    pub group: IndexGroup,
    pub result: ThinningResult,
    /// Time-frequency labels of the kept vectors.
    pub kept: Vec<(usize, usize)>,
    /// Density of the kept labels in the lattice group.
    pub group_density: DensityTable,
    /// Beurling counts of the kept labels in the plane.
    pub beurling: Vec<BeurlingRow>,
}

/// Thins a finite Gabor system against the Gaussian reference lattice.
pub fn gabor_thin(sys: &FiniteGaborSystem, eps: f64, mode: Mode) -> Result<GaborThinning> {
    gabor_thin_frame(&gabor_frame(sys)?, eps, mode)
}

/// As [`gabor_thin`], for any frame on `C^L` whose labels are pairs `(x, w)`.
pub fn gabor_thin_frame(frame: &Frame, eps: f64, mode: Mode) -> Result<GaborThinning> {
    let l = frame.dim();
    let labels: Vec<(usize, usize)> = frame
        .labels()
        .iter()
        .map(|lab| {
            tf_label(lab, l).ok_or_else(|| {
                Error::LabelMismatch(format!("label {lab} is not a pair in Z_{l} x Z_{l}"))
            })
        })
        .collect::<Result<_>>()?;
    let spacing = reference_lattice(l)?;
    let (reference, group) = reference_frame(l, spacing)?;
    let assignment = labels
        .iter()
        .map(|&(x, w)| group.index(&[(x / spacing) as i64, (w / spacing) as i64, 0]))
        .collect();
    let map = LocalizationMap::new(group, assignment)?;
    let result = extract_sparse_subframe(frame, &reference, &map, eps, mode)?;
    let kept: Vec<(usize, usize)> = result.selected.iter().map(|&i| labels[i]).collect();
    let group_density = result.density.clone();
    let beurling = beurling_density(&kept, l, l / 4)?;
    Ok(GaborThinning {
        spacing,
        group,
        result,
        kept,
        group_density,
        beurling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::frame_operator;
    use crate::linalg::norm;

    fn impulse(l: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); l];
        v[0] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn shifts() {
        let g = discrete_gaussian(8).unwrap();
        assert_eq!(time_frequency_shift(&g, 0, 0), g);
        let s = time_frequency_shift(&impulse(8), 3, 5);
        for (t, z) in s.iter().enumerate() {
            if t == 3 {
                assert!((z.norm() - 1.0).abs() < 1e-15);
            } else {
                assert_eq!(z.norm(), 0.0);
            }
        }
        let twice = translate(&translate(&g, 5), 6);
        assert_eq!(twice, translate(&g, 3));
        assert!((norm(&time_frequency_shift(&g, 2, 7)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn commutation_phase() {
        let l = 12;
        let g = discrete_gaussian(l).unwrap();
        for (x, w) in [(1, 2), (5, 7), (11, 3)] {
            let lhs = translate(&modulate(&g, w), x);
            let rhs = modulate(&translate(&g, x), w);
            let c = phase(-((w * x) as i64), l);
            for t in 0..l {
                assert!((lhs[t] - c * rhs[t]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn gaussian_shape() {
        let g = discrete_gaussian(16).unwrap();
        assert!((g[1] - g[15]).norm() < 1e-15);
        assert!((norm(&g) - 1.0).abs() < 1e-12);
        assert!(g.iter().all(|z| z.re <= g[0].re));
        assert!(discrete_gaussian(3).is_err());
    }

    #[test]
    fn stft_examples() {
        let g = discrete_gaussian(8).unwrap();
        let v = stft(&g, &g).unwrap();
        assert!((v[(0, 0)].norm() - 1.0).abs() < 1e-14);
        let zero = vec![C64::new(0.0, 0.0); 8];
        assert_eq!(stft(&zero, &g).unwrap().max_abs(), 0.0);
        let h: Vec<C64> = (0..8).map(|t| C64::new(t as f64, 1.0 - t as f64)).collect();
        let energy: f64 = stft(&h, &g)
            .unwrap()
            .as_slice()
            .iter()
            .map(|z| z.norm_sqr())
            .sum();
        assert!((energy - 8.0 * norm(&h).powi(2)).abs() < 1e-9);
    }

    #[test]
    fn full_grid_tight() {
        let g = discrete_gaussian(8).unwrap();
        let f = gabor_frame(&FiniteGaborSystem::full_grid(g).unwrap()).unwrap();
        let s = frame_operator(&f);
        assert!((&s - &ComplexMatrix::identity(8).scale(8.0)).max_abs() < 1e-9);
    }

    #[test]
    fn single_label_and_impulse_basis() {
        let g = discrete_gaussian(8).unwrap();
        let one = gabor_frame(&FiniteGaborSystem::new(g, vec![(0, 0)]).unwrap()).unwrap();
        assert_eq!(frame_bounds(&one).lower, 0.0);
        let labels = (0..8).map(|x| (x, 0)).collect();
        let basis = gabor_frame(&FiniteGaborSystem::new(impulse(8), labels).unwrap()).unwrap();
        let b = frame_bounds(&basis);
        assert!((b.lower - 1.0).abs() < 1e-14 && (b.upper - 1.0).abs() < 1e-14);
    }

    #[test]
    fn system_validation() {
        let g = discrete_gaussian(8).unwrap();
        assert!(FiniteGaborSystem::new(g.clone(), vec![(8, 0)]).is_err());
        assert!(FiniteGaborSystem::new(g, vec![(1, 1), (1, 1)]).is_err());
    }

    #[test]
    fn molecules() {
        let l = 8;
        let gamma = discrete_gaussian(l).unwrap();
        let g: Vec<C64> = (0..l)
            .map(|t| C64::new((t as f64 * 0.7).cos(), 0.2))
            .collect();
        let sys = FiniteGaborSystem::new(g.clone(), vec![(0, 0), (3, 5), (7, 2)]).unwrap();
        let f = gabor_frame(&sys).unwrap();
        let env = stft_modulus(&g, &gamma).unwrap();
        assert!(molecule_check(&env, &f, &gamma).unwrap().holds);
        assert!(!molecule_check(&vec![0.0; l * l], &f, &gamma).unwrap().holds);

        let g2 = translate(&gamma, 2);
        let f2 = gabor_frame(&FiniteGaborSystem::new(g2.clone(), vec![(1, 1), (4, 6)]).unwrap())
            .unwrap();
        // Both halves of the two-window union sit under the summed envelope.
        let env2 = stft_modulus(&g2, &gamma).unwrap();
        let sum: Vec<f64> = env.iter().zip(&env2).map(|(a, b)| a + b).collect();
        assert!(molecule_check(&sum, &f, &gamma).unwrap().holds);
        assert!(molecule_check(&sum, &f2, &gamma).unwrap().holds);
    }

    #[test]
    fn norms() {
        let gamma = discrete_gaussian(8).unwrap();
        let m = window_m1_norm(&gamma, &gamma).unwrap();
        assert!(m > 0.0);
        let scaled: Vec<C64> = gamma.iter().map(|z| z * C64::new(0.0, -3.0)).collect();
        assert!((window_m1_norm(&scaled, &gamma).unwrap() - 3.0 * m).abs() < 1e-12);
        let mut ind = vec![0.0; 64];
        ind[0] = 1.0;
        assert_eq!(envelope_w_norm(&ind), 1.0);
    }

    #[test]
    fn beurling_examples() {
        let l = 16;
        let full: Vec<(usize, usize)> = (0..l).flat_map(|x| (0..l).map(move |w| (x, w))).collect();
        for row in beurling_density(&full, l, 4).unwrap() {
            let n = row.radius;
            assert_eq!(row.max_count, (2 * n + 1) * (2 * n + 1));
            assert_eq!(
                row.upper(),
                ((2 * n + 1) * (2 * n + 1)) as f64 / (4 * n * n) as f64
            );
        }
        assert!(beurling_density(&[], l, 4)
            .unwrap()
            .iter()
            .all(|r| r.upper() == 0.0));
        let half: Vec<(usize, usize)> = full.iter().copied().filter(|&(x, _)| x % 2 == 0).collect();
        let row = beurling_density(&half, l, 4).unwrap()[3];
        assert_eq!((row.min_count, row.max_count), (9 * 4, 9 * 5));
    }

    #[test]
    fn lattice_choice() {
        assert_eq!(reference_lattice(16).unwrap(), 2);
        assert_eq!(reference_lattice(8).unwrap(), 2);
        assert_eq!(reference_lattice(12).unwrap(), 2);
        let (e, g) = reference_frame(16, 2).unwrap();
        assert_eq!((e.len(), g.size()), (64, 64));
    }

    #[test]
    fn impulse_basis_is_kept() {
        let labels = (0..16).map(|x| (x, 0)).collect();
        let sys = FiniteGaborSystem::new(impulse(16), labels).unwrap();
        let t = gabor_thin(&sys, 0.5, Mode::Practical).unwrap();
        assert_eq!(t.kept.len(), 16);
        assert!((t.result.achieved.lower - 1.0).abs() < 1e-9);
    }
}
