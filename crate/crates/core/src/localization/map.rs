use super::group::IndexGroup;
use crate::error::{Error, Result};
use crate::limits::TailLimits;

/// Assignment `a: I -> G` of frame positions to group elements.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationMap {
    group: IndexGroup,
    assignment: Vec<usize>,
}

impl LocalizationMap {
    pub fn new(group: IndexGroup, assignment: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = assignment.iter().find(|&&g| g >= group.size()) {
            return Err(Error::InvalidParameter(format!(
                "assignment target {bad} outside a group of size {}",
                group.size()
            )));
        }
        Ok(Self { group, assignment })
    }

    /// `a(k) = k` on `I = G`.
    pub fn identity(group: IndexGroup) -> Self {
        Self {
            group,
            assignment: (0..group.size()).collect(),
        }
    }

    pub fn group(&self) -> &IndexGroup {
        &self.group
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn image(&self, i: usize) -> usize {
        self.assignment[i]
    }

    /// Map on `I_1 ⊔ I_2`; positions of `other` are shifted by `self.len()`.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::InvalidParameter("maps into different groups".into()));
        }
        let mut assignment = self.assignment.clone();
        assignment.extend_from_slice(&other.assignment);
        Ok(Self {
            group: self.group,
            assignment,
        })
    }

    /// Restriction to positions `J`, renumbered `0..|J|`.
    pub fn restrict(&self, positions: &[usize]) -> Self {
        Self {
            group: self.group,
            assignment: positions.iter().map(|&i| self.assignment[i]).collect(),
        }
    }

    /// `|a^{-1}(g) ∩ J|` for every `g`; `None` means `J = I`.
    pub fn fiber_counts(&self, subset: Option<&[usize]>) -> Vec<usize> {
        let mut counts = vec![0; self.group.size()];
        match subset {
            Some(j) => j.iter().for_each(|&i| counts[self.assignment[i]] += 1),
            None => self.assignment.iter().for_each(|&g| counts[g] += 1),
        }
        counts
    }

    /// `|a^{-1}(B_N(k)) ∩ J|`.
    pub fn count_in_ball(&self, counts: &[usize], center: usize, radius: usize) -> usize {
        self.group
            .ball(center, radius)
            .into_iter()
            .map(|g| counts[g])
            .sum()
    }
}

/// Smallest `K >= 1` with `|a^{-1}(B_N(k))| <= K |B_N(0)|` for every centre and
/// every radius `0 <= N <= diameter`, by enumeration.
pub fn covering_constant(map: &LocalizationMap) -> f64 {
    let g = map.group();
    let counts = map.fiber_counts(None);
    let mut k = 1.0f64;
    for radius in 0..=g.diameter() {
        let size = g.ball_size(radius) as f64;
        for center in 0..g.size() {
            k = k.max(map.count_in_ball(&counts, center, radius) as f64 / size);
        }
    }
    k
}

/// Counts at one radius, maximized and minimized over centres.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityRow {
    pub radius: usize,
    pub ball_size: usize,
    pub max_count: usize,
    pub min_count: usize,
}

impl DensityRow {
    pub fn sup_ratio(&self) -> f64 {
        self.max_count as f64 / self.ball_size as f64
    }

    pub fn inf_ratio(&self) -> f64 {
        self.min_count as f64 / self.ball_size as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityTable {
    /// Radius at which single-number densities are reported.
    pub report_radius: usize,
    pub rows: Vec<DensityRow>,
}

impl DensityTable {
    pub fn at(&self, radius: usize) -> Option<&DensityRow> {
        self.rows.iter().find(|r| r.radius == radius)
    }

    pub fn upper(&self) -> f64 {
        self.at(self.report_radius)
            .map_or(0.0, DensityRow::sup_ratio)
    }

    pub fn lower(&self) -> f64 {
        self.at(self.report_radius)
            .map_or(0.0, DensityRow::inf_ratio)
    }
}

/// `N* = floor(L/4)`.
pub fn report_radius(group: &IndexGroup) -> usize {
    group.modulus() / 4
}

/// Box counts of `J` (all of `I` when `None`) for radii `0..=max_radius`.
pub fn density_table(
    map: &LocalizationMap,
    subset: Option<&[usize]>,
    max_radius: usize,
) -> DensityTable {
    let g = map.group();
    let counts = map.fiber_counts(subset);
    let rows = (0..=max_radius)
        .map(|radius| {
            let per_center: Vec<usize> = (0..g.size())
                .map(|c| map.count_in_ball(&counts, c, radius))
                .collect();
            DensityRow {
                radius,
                ball_size: g.ball_size(radius),
                max_count: per_center.iter().copied().max().unwrap_or(0),
                min_count: per_center.iter().copied().min().unwrap_or(0),
            }
        })
        .collect();
    DensityTable {
        report_radius: report_radius(g),
        rows,
    }
}

/// Upper density of `J` at the report radius, with the radius table up to it.
pub fn upper_density(map: &LocalizationMap, subset: Option<&[usize]>) -> (f64, DensityTable) {
    let t = density_table(map, subset, report_radius(map.group()));
    (t.upper(), t)
}

pub fn lower_density(map: &LocalizationMap, subset: Option<&[usize]>) -> (f64, DensityTable) {
    let t = density_table(map, subset, report_radius(map.group()));
    (t.lower(), t)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowCount {
    pub center: usize,
    pub radius: usize,
    pub count: usize,
    pub ball_size: usize,
}

impl WindowCount {
    pub fn ratio(&self) -> f64 {
        self.count as f64 / self.ball_size as f64
    }
}

#[derive(Clone, Debug)]
pub struct WindowedDensity {
    pub windows: Vec<WindowCount>,
    pub limits: TailLimits,
}

/// Ratios `|a^{-1}(B_n(k_n)) ∩ J| / |B_n(0)|` along a window sequence.
pub fn windowed_density(
    map: &LocalizationMap,
    subset: Option<&[usize]>,
    centers: &[usize],
    radii: &[usize],
) -> Result<WindowedDensity> {
    if centers.len() != radii.len() {
        return Err(Error::Dimension(format!(
            "{} centres but {} radii",
            centers.len(),
            radii.len()
        )));
    }
    let g = map.group();
    if let Some(&bad) = centers.iter().find(|&&c| c >= g.size()) {
        return Err(Error::InvalidParameter(format!(
            "centre {bad} outside the group"
        )));
    }
    let counts = map.fiber_counts(subset);
    let windows: Vec<WindowCount> = centers
        .iter()
        .zip(radii)
        .map(|(&center, &radius)| WindowCount {
            center,
            radius,
            count: map.count_in_ball(&counts, center, radius),
            ball_size: g.ball_size(radius),
        })
        .collect();
    let ratios: Vec<f64> = windows.iter().map(WindowCount::ratio).collect();
    Ok(WindowedDensity {
        limits: TailLimits::of(&ratios),
        windows,
    })
}
