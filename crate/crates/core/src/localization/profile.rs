use super::group::IndexGroup;
use super::map::{covering_constant, LocalizationMap};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::linalg::ComplexMatrix;

/// Checks that `reference` has one vector per group element, in flat order.
pub fn check_reference(reference: &Frame, group: &IndexGroup) -> Result<()> {
    if reference.len() != group.size() {
        return Err(Error::LabelMismatch(format!(
            "reference frame has {} vectors for a group of size {}",
            reference.len(),
            group.size()
        )));
    }
    for (k, label) in reference.labels().iter().enumerate() {
        if group.index_of_label(label) != Some(k) {
            return Err(Error::LabelMismatch(format!(
                "reference position {k} carries label {label}, expected {}",
                group.label(k)
            )));
        }
    }
    Ok(())
}

/// `|<f_i, e_k>|` as an `M x |G|` table.
fn cross_moduli(frame: &Frame, reference: &Frame) -> Vec<Vec<f64>> {
    let cross = frame.synthesis().adjoint().matmul(reference.synthesis());
    (0..cross.rows())
        .map(|i| (0..cross.cols()).map(|k| cross[(i, k)].norm()).collect())
        .collect()
}

/// `r(g) = sup { |<f_i, e_k>| : a(i) - k = g }`.
pub fn localization_sequence(
    frame: &Frame,
    map: &LocalizationMap,
    reference: &Frame,
) -> Result<Vec<f64>> {
    let g = map.group();
    check_reference(reference, g)?;
    if map.len() != frame.len() {
        return Err(Error::LabelMismatch(format!(
            "map covers {} positions, frame has {}",
            map.len(),
            frame.len()
        )));
    }
    if frame.dim() != reference.dim() {
        return Err(Error::Dimension(format!(
            "frame dimension {} differs from reference dimension {}",
            frame.dim(),
            reference.dim()
        )));
    }
    let moduli = cross_moduli(frame, reference);
    let mut r = vec![0.0f64; g.size()];
    for (i, row) in moduli.iter().enumerate() {
        let ai = map.image(i);
        for (k, &v) in row.iter().enumerate() {
            let off = g.sub(ai, k);
            r[off] = r[off].max(v);
        }
    }
    Ok(r)
}

/// `s(g) = sup { |<e_k, e_l>| : k - l = g }`.
pub fn self_localization_sequence(reference: &Frame, group: &IndexGroup) -> Result<Vec<f64>> {
    check_reference(reference, group)?;
    let moduli = cross_moduli(reference, reference);
    let mut s = vec![0.0f64; group.size()];
    for (k, row) in moduli.iter().enumerate() {
        for (l, &v) in row.iter().enumerate() {
            let off = group.sub(k, l);
            s[off] = s[off].max(v);
        }
    }
    Ok(s)
}

/// `Δ(R) = sum_{|g| >= R} r(g)`.
pub fn tail_sum(group: &IndexGroup, r: &[f64], radius: usize) -> f64 {
    r.iter()
        .enumerate()
        .filter(|&(g, _)| group.norm(g) >= radius)
        .fold(0.0, |acc, (_, v)| acc + v)
}

/// Everything the truncation estimates need about a (frame, reference, map) triple.
#[derive(Clone, Debug)]
pub struct LocalizationProfile {
    pub group: IndexGroup,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub r_l1: f64,
    pub s_l1: f64,
    pub covering: f64,
}

impl LocalizationProfile {
    pub fn compute(frame: &Frame, map: &LocalizationMap, reference: &Frame) -> Result<Self> {
        let r = localization_sequence(frame, map, reference)?;
        let s = self_localization_sequence(reference, map.group())?;
        Ok(Self {
            group: *map.group(),
            r_l1: r.iter().sum(),
            s_l1: s.iter().sum(),
            covering: covering_constant(map),
            r,
            s,
        })
    }

    pub fn tail(&self, radius: usize) -> f64 {
        tail_sum(&self.group, &self.r, radius)
    }

    /// `(R, Δ(R))` for `R = 0..=diameter+1`.
    pub fn tail_table(&self) -> Vec<(usize, f64)> {
        (0..=self.group.diameter() + 1)
            .map(|radius| (radius, self.tail(radius)))
            .collect()
    }

    /// `K_a Δ(R) ||s||_1`, the bound on `||T_J - T_{R,J}||`.
    pub fn synthesis_error(&self, radius: usize) -> f64 {
        self.covering * self.tail(radius) * self.s_l1
    }

    /// `E(R) = 3 K_a Δ(R) ||s||_1`.
    pub fn truncation_error(&self, radius: usize) -> f64 {
        3.0 * self.synthesis_error(radius)
    }

    /// Smallest `R` with `Δ(R) <= 1 / (K_a ||s||_1)`.
    pub fn min_radius(&self) -> usize {
        let limit = 1.0 / (self.covering * self.s_l1);
        (0..=self.group.diameter() + 1)
            .find(|&radius| self.tail(radius) <= limit)
            .expect("the tail vanishes past the diameter")
    }
}

/// Brute-force `s` straight from the definition, for cross-checking.
pub fn self_localization_brute(reference: &ComplexMatrix, group: &IndexGroup) -> Vec<f64> {
    let n = group.size();
    let mut s = vec![0.0f64; n];
    for g in 0..n {
        for k in 0..n {
            for l in 0..n {
                if group.sub(k, l) == g {
                    let v: f64 =
                        crate::linalg::inner(&reference.column(k), &reference.column(l)).norm();
                    s[g] = s[g].max(v);
                }
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn z(l: usize) -> IndexGroup {
        IndexGroup::cyclic(l).unwrap()
    }

    fn onb(n: usize) -> Frame {
        Frame::from_synthesis(ComplexMatrix::identity(n)).unwrap()
    }

    #[test]
    fn onb_profile() {
        let g = z(8);
        let map = LocalizationMap::identity(g);
        let p = LocalizationProfile::compute(&onb(8), &map, &onb(8)).unwrap();
        assert_eq!(p.r[0], 1.0);
        assert!(p.r[1..].iter().all(|&v| v == 0.0));
        assert_eq!(p.s, p.r);
        assert_eq!(p.tail(0), 1.0);
        assert_eq!(p.tail(1), 0.0);
        assert_eq!(p.covering, 1.0);
        assert_eq!(p.min_radius(), 0);
    }

    #[test]
    fn constant_vectors_have_flat_s() {
        let g = z(4);
        let e =
            Frame::from_synthesis(ComplexMatrix::from_fn(1, 4, |_, _| C64::new(1.0, 0.0))).unwrap();
        let s = self_localization_sequence(&e, &g).unwrap();
        assert!(s.iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn tail_partition() {
        let g = z(10);
        let r: Vec<f64> = (0..10).map(|k| 1.0 / (1.0 + k as f64)).collect();
        let total: f64 = r.iter().sum();
        for radius in 0..8 {
            let inner: f64 = (0..10).filter(|&k| g.norm(k) < radius).map(|k| r[k]).sum();
            assert!((tail_sum(&g, &r, radius) + inner - total).abs() < 1e-14);
        }
        assert_eq!(tail_sum(&g, &r, 6), 0.0);
    }

    #[test]
    fn reference_labels_checked() {
        let g = z(4);
        let mut e = onb(4);
        assert!(check_reference(&e, &g).is_ok());
        e = e.subframe(&[1, 0, 2, 3]).unwrap();
        assert!(check_reference(&e, &g).is_err());
    }
}
