//! Sparse subframe extraction: truncate against a localized reference, tile the
//! index group into boxes, thin every overfull box with finite removal, and
//! certify the lower frame bound of the union.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::{
    bounds_of_spectrum, frame_bounds, frame_spectrum, parseval_deviation, parseval_normalize,
    partial_frame_operator, Frame, FrameBounds, Label, PARSEVAL_TOLERANCE,
};
use crate::linalg::{hermitian_eig, operator_norm, ComplexMatrix, RANK_TOLERANCE};
use crate::localization::{
    density_table, report_radius, truncate_frame, DensityTable, IndexGroup, LocalizationMap,
    LocalizationProfile,
};
use crate::removal::{finite_removal, g_estimate_ln};

/// Absolute slack used when comparing computed spectra against bounds.
pub const CHECK_SLACK: f64 = 1e-9;

/// Largest truncation error tried in practical mode: `c/(2(1+c)) <= 1/4` for `c <= 1`.
const PRACTICAL_ERROR_CEILING: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Uses `C_eps = g(eps / (2(2K_a - 1)))` throughout.
    Strict,
    /// Replaces `C_eps` by the smallest ratio the box removals actually reached.
    Practical,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::Practical => "practical",
        })
    }
}

/// Resolved parameters of a run.
#[derive(Clone, Debug)]
pub struct ThinningConfig {
    pub eps: f64,
    pub mode: Mode,
    pub covering: f64,
    pub c_eps: f64,
    pub c_eps_ln: f64,
    pub radius: usize,
    pub box_radius: usize,
    /// The whole group forms a single box because no admissible `N` exists.
    pub whole_group_box: bool,
    /// Lattice centres of the boxes.
    pub centers: Vec<usize>,
    /// `(1 + eps/2) |B_{N+R}(0)|`.
    pub box_threshold: f64,
}

/// `C_eps = g(eps / (2(2K_a - 1)))` as `(value, ln value)`.
pub fn c_eps(eps: f64, covering: f64) -> Result<(f64, f64)> {
    let ln = g_estimate_ln(eps / (2.0 * (2.0 * covering - 1.0)))?;
    Ok((ln.exp(), ln))
}

fn radius_threshold(c: f64) -> f64 {
    c / (2.0 * (1.0 + c))
}

/// Smallest `R` with `E(R) < c / (2(1+c))`.
pub fn choose_radius_for(c: f64, profile: &LocalizationProfile) -> Result<usize> {
    let threshold = radius_threshold(c);
    let table: Vec<(usize, f64)> = (0..=profile.group.diameter() + 1)
        .map(|r| (r, profile.truncation_error(r)))
        .collect();
    table
        .iter()
        .find(|&&(_, e)| e < threshold)
        .map(|&(r, _)| r)
        .ok_or(Error::InfeasibleRadius { threshold, table })
}

/// Smallest `R` with `E(R) < C_eps / (2(1 + C_eps))`.
pub fn choose_r(eps: f64, profile: &LocalizationProfile) -> Result<usize> {
    let (c, _) = c_eps(eps, profile.covering)?;
    choose_radius_for(c, profile)
}

/// Smallest `N` with `R < N <= L/4`, `2N | L` and
/// `(1 + eps/2) |B_{N+R}(0)| <= (1 + eps) |B_N(0)|`.
pub fn choose_n(eps: f64, radius: usize, group: &IndexGroup) -> Result<usize> {
    let upper = group.modulus() / 4;
    (radius + 1..=upper)
        .find(|&n| {
            group.modulus().is_multiple_of(2 * n)
                && (1.0 + eps / 2.0) * group.ball_size(n + radius) as f64
                    <= (1.0 + eps) * group.ball_size(n) as f64
        })
        .ok_or(Error::InfeasibleBox {
            lower: radius,
            upper,
            modulus: group.modulus(),
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// No position maps into the box.
    Empty,
    /// Few enough vectors: all kept.
    Small,
    /// Thinned with finite removal.
    Removal,
    /// Every truncated vector vanished; nothing kept.
    RankZero,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Empty => "empty",
            Branch::Small => "small",
            Branch::Removal => "removal",
            Branch::RankZero => "rank-zero",
        })
    }
}

/// What happened in one box.
#[derive(Clone, Debug)]
pub struct BoxLog {
    pub center: usize,
    pub size: usize,
    pub branch: Branch,
    pub rank: usize,
    /// Kept positions (global), ascending.
    pub kept: Vec<usize>,
    /// `b` handed to finite removal.
    pub slack: Option<f64>,
    /// `lambda_min` of `S_{Q,R}^{-1/2} S_{J_k,R} S_{Q,R}^{-1/2}` on the span.
    pub ratio: f64,
    /// `ln` of the removal certificate, 0 outside the removal branch.
    pub certified_ratio_ln: f64,
}

/// Thins one box of truncated vectors down to at most `threshold` of them.
pub fn per_box_thin(
    truncated: &Frame,
    positions: &[usize],
    threshold: f64,
    center: usize,
) -> Result<BoxLog> {
    let mut log = BoxLog {
        center,
        size: positions.len(),
        branch: Branch::Empty,
        rank: 0,
        kept: Vec::new(),
        slack: None,
        ratio: 1.0,
        certified_ratio_ln: 0.0,
    };
    if positions.is_empty() {
        return Ok(log);
    }
    let s_q = partial_frame_operator(truncated, positions);
    let spec = hermitian_eig(&s_q)?;
    let top = spec.max();
    let span: Vec<usize> = (0..spec.dim())
        .filter(|&k| top > 0.0 && spec.eigenvalues[k] > RANK_TOLERANCE * top)
        .collect();
    log.rank = span.len();
    if positions.len() as f64 <= threshold {
        log.branch = Branch::Small;
        log.kept = positions.to_vec();
        return Ok(log);
    }
    if span.is_empty() {
        log.branch = Branch::RankZero;
        log.ratio = 0.0;
        return Ok(log);
    }
    let rank = span.len();
    let cap = threshold.floor();
    let b = cap / rank as f64 - 1.0;
    if b <= 0.0 {
        return Err(Error::Hypothesis(format!(
            "box at {center}: threshold {threshold} leaves no room for rank {rank}"
        )));
    }
    // Coordinates of the truncated vectors in an orthonormal basis of their span.
    let basis = spec.eigenvectors.select_columns(&span);
    let local = Frame::from_synthesis(
        basis
            .adjoint()
            .matmul(&truncated.synthesis().select_columns(positions)),
    )?;
    let cert = finite_removal(&local, b)?;
    log.branch = Branch::Removal;
    log.slack = Some(b);
    log.kept = cert.selected.iter().map(|&p| positions[p]).collect();
    log.kept.sort_unstable();
    log.ratio = cert.achieved_ratio;
    log.certified_ratio_ln = cert.certified_ratio_ln;
    Ok(log)
}

/// Splits positions into boxes `a^{-1}(center + [-N, N)^d x Z_D)`.
fn tile(map: &LocalizationMap, half_width: usize) -> Result<Vec<(usize, Vec<usize>)>> {
    let g = map.group();
    let centers = g.lattice_centers(half_width)?;
    let step = 2 * half_width;
    let per_axis = g.modulus() / step;
    let mut boxes: Vec<(usize, Vec<usize>)> = centers.iter().map(|&c| (c, Vec::new())).collect();
    for i in 0..map.len() {
        let coords = g.coords(map.image(i));
        let mut cell = 0;
        for &x in &coords[..g.rank()] {
            cell = cell * per_axis + ((x + half_width) % g.modulus()) / step;
        }
        boxes[cell].1.push(i);
    }
    Ok(boxes)
}

/// Pass/fail record of every inequality in the certificate chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Checks {
    /// `E(R) < C/(2(1+C))`.
    pub radius: bool,
    /// `(1-E) <= S_R <= (1+E)`.
    pub truncated_bounds: bool,
    /// `S_{R,N} >= C (1 - E)`.
    pub coarse_bound: bool,
    /// `||S_J - S_{R,J}|| <= E(R)`.
    pub truncation_gap: bool,
    /// `|J_k| <= (1 + eps/2) |B_{N+R}(0)|` for every box.
    pub box_cardinality: bool,
    /// `|J_k| / |B_N(0)| <= 1 + eps` for every box.
    pub box_density: bool,
    /// Achieved lower bound at least the certified one.
    pub lower_bound: bool,
}

impl Checks {
    pub fn all(&self) -> bool {
        self.radius
            && self.truncated_bounds
            && self.coarse_bound
            && self.truncation_gap
            && self.box_cardinality
            && self.box_density
            && self.lower_bound
    }
}

/// Bounds of the original frame `F[J]` obtained from a run on its Parseval version.
#[derive(Clone, Copy, Debug)]
pub struct Transported {
    /// Bounds of `F`.
    pub frame: FrameBounds,
    /// Bounds of `F[J]` computed directly.
    pub computed: FrameBounds,
    /// `A A'` with `A'` the achieved bound of the Parseval run.
    pub lower: f64,
    /// `B B'`.
    pub upper: f64,
    /// `A` times the certified bound of the Parseval run.
    pub certified_lower: f64,
}

#[derive(Clone, Debug)]
pub struct ThinningResult {
    pub config: ThinningConfig,
    /// Kept positions, ascending.
    pub selected: Vec<usize>,
    pub labels: Vec<Label>,
    pub boxes: Vec<BoxLog>,
    /// `E(R)`.
    pub truncation_error: f64,
    /// `(R, E(R))` for every radius up to one past the diameter.
    pub error_table: Vec<(usize, f64)>,
    /// Spectrum extremes of the truncated frame operator `S_R`.
    pub truncated_bounds: FrameBounds,
    /// `lambda_min` of `S_{R,N} = sum_k S_{J_k,R}`.
    pub coarse_lower: f64,
    /// `||S_J - S_{R,J}||`.
    pub truncation_gap: f64,
    /// `C_eps` in strict mode, smallest box ratio in practical mode.
    pub ratio_floor: f64,
    pub certified_lower: f64,
    pub achieved: FrameBounds,
    pub max_box_ratio: f64,
    pub density: DensityTable,
    pub checks: Checks,
    pub certified: bool,
    pub transported: Option<Transported>,
    pub notes: Vec<String>,
}

impl ThinningResult {
    /// Ratio of kept positions in every box of radius `N*`, maximized over centres.
    pub fn report_ratio(&self) -> f64 {
        self.density.upper()
    }
}

struct Run {
    boxes: Vec<BoxLog>,
    selected: Vec<usize>,
}

fn run_boxes(
    truncated: &Frame,
    map: &LocalizationMap,
    half_width: usize,
    threshold: f64,
) -> Result<Run> {
    let tiles = tile(map, half_width)?;
    let boxes: Vec<BoxLog> = tiles
        .par_iter()
        .map(|(center, positions)| per_box_thin(truncated, positions, threshold, *center))
        .collect::<Result<_>>()?;
    let mut selected: Vec<usize> = boxes.iter().flat_map(|b| b.kept.iter().copied()).collect();
    selected.sort_unstable();
    Ok(Run { boxes, selected })
}

fn check_parseval(frame: &Frame) -> Result<()> {
    let dev = parseval_deviation(frame);
    if dev > PARSEVAL_TOLERANCE {
        return Err(Error::NotParseval(dev));
    }
    Ok(())
}

fn plan_boxes(
    eps: f64,
    radius: usize,
    group: &IndexGroup,
    allow_whole_group: bool,
) -> Result<(usize, bool)> {
    match choose_n(eps, radius, group) {
        Ok(n) => Ok((n, false)),
        Err(e) if allow_whole_group => {
            let _ = e;
            Ok((group.modulus() / 2, true))
        }
        Err(e) => Err(e),
    }
}

fn threshold_for(eps: f64, radius: usize, half_width: usize, group: &IndexGroup) -> f64 {
    (1.0 + eps / 2.0) * group.ball_size(half_width + radius) as f64
}

/// Sparse subframe of a Parseval frame `F` localized against a Parseval
/// reference `E` indexed by the group of `map`.
pub fn extract_sparse_subframe_parseval(
    frame: &Frame,
    reference: &Frame,
    map: &LocalizationMap,
    eps: f64,
    mode: Mode,
) -> Result<ThinningResult> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    check_parseval(frame)?;
    check_parseval(reference)?;
    let profile = LocalizationProfile::compute(frame, map, reference)?;
    let group = *map.group();
    let (c, c_ln) = c_eps(eps, profile.covering)?;
    let mut notes = Vec::new();

    let (radius, half_width, whole, run, floor) = match mode {
        Mode::Strict => {
            let radius = choose_radius_for(c, &profile)?;
            let half_width = choose_n(eps, radius, &group)?;
            let threshold = threshold_for(eps, radius, half_width, &group);
            let truncated = truncate_frame(frame, reference, map, radius)?;
            let run = run_boxes(&truncated, map, half_width, threshold)?;
            (radius, half_width, false, run, c)
        }
        Mode::Practical => {
            let candidates: Vec<usize> = (0..=group.diameter() + 1)
                .filter(|&r| profile.truncation_error(r) < PRACTICAL_ERROR_CEILING)
                .collect();
            if candidates.is_empty() {
                return Err(Error::InfeasibleRadius {
                    threshold: PRACTICAL_ERROR_CEILING,
                    table: (0..=group.diameter() + 1)
                        .map(|r| (r, profile.truncation_error(r)))
                        .collect(),
                });
            }
            let mut chosen = None;
            for &radius in &candidates {
                let (half_width, whole) = plan_boxes(eps, radius, &group, true)?;
                let threshold = threshold_for(eps, radius, half_width, &group);
                let truncated = truncate_frame(frame, reference, map, radius)?;
                let run = run_boxes(&truncated, map, half_width, threshold)?;
                let c_min = run.boxes.iter().map(|b| b.ratio).fold(1.0, f64::min);
                let accepted = profile.truncation_error(radius) < radius_threshold(c_min);
                let done = accepted || radius == *candidates.last().unwrap();
                if !accepted {
                    notes.push(format!(
                        "R = {radius}: E(R) = {:.3e} not below c/(2(1+c)) = {:.3e}",
                        profile.truncation_error(radius),
                        radius_threshold(c_min)
                    ));
                }
                chosen = Some((radius, half_width, whole, run, c_min));
                if done {
                    break;
                }
            }
            chosen.expect("at least one candidate radius")
        }
    };
    if whole {
        notes.push(format!(
            "no N with R < N <= L/4, 2N | L and the growth bound; the whole group is one box (N = {half_width})"
        ));
    }

    let threshold = threshold_for(eps, radius, half_width, &group);
    let truncated = truncate_frame(frame, reference, map, radius)?;
    let e_r = profile.truncation_error(radius);
    let truncated_bounds = {
        let spec = frame_spectrum(&truncated);
        FrameBounds {
            lower: spec.min(),
            upper: spec.max(),
        }
    };
    let coarse_lower = if run.selected.is_empty() {
        0.0
    } else {
        hermitian_eig(&partial_frame_operator(&truncated, &run.selected))?.min()
    };
    let (truncation_gap, achieved) = if run.selected.is_empty() {
        (
            0.0,
            FrameBounds {
                lower: 0.0,
                upper: 0.0,
            },
        )
    } else {
        let s_j = partial_frame_operator(frame, &run.selected);
        let s_rj = partial_frame_operator(&truncated, &run.selected);
        let spec = hermitian_eig(&s_j)?;
        (
            operator_norm(&(&s_j - &s_rj)),
            FrameBounds {
                lower: spec.min().max(0.0),
                upper: spec.max(),
            },
        )
    };
    for b in &run.boxes {
        match b.branch {
            Branch::Empty => notes.push(format!("box at {} is empty", group.label(b.center))),
            Branch::RankZero => notes.push(format!(
                "box at {} has only zero truncated vectors",
                group.label(b.center)
            )),
            _ => {}
        }
    }
    let cell_ball = group.ball_size(half_width) as f64;
    let max_box_ratio = run
        .boxes
        .iter()
        .map(|b| b.kept.len() as f64 / cell_ball)
        .fold(0.0, f64::max);
    let certified_lower = 0.5 * floor;
    let checks = Checks {
        radius: e_r < radius_threshold(floor),
        truncated_bounds: truncated_bounds.lower >= 1.0 - e_r - CHECK_SLACK
            && truncated_bounds.upper <= 1.0 + e_r + CHECK_SLACK,
        coarse_bound: coarse_lower >= floor * (1.0 - e_r) - CHECK_SLACK,
        truncation_gap: truncation_gap <= e_r + CHECK_SLACK,
        box_cardinality: run.boxes.iter().all(|b| b.kept.len() as f64 <= threshold),
        box_density: max_box_ratio <= 1.0 + eps,
        lower_bound: achieved.lower >= certified_lower,
    };
    let density = density_table(map, Some(&run.selected), report_radius(&group));
    let centers = run.boxes.iter().map(|b| b.center).collect();
    Ok(ThinningResult {
        config: ThinningConfig {
            eps,
            mode,
            covering: profile.covering,
            c_eps: c,
            c_eps_ln: c_ln,
            radius,
            box_radius: half_width,
            whole_group_box: whole,
            centers,
            box_threshold: threshold,
        },
        labels: run
            .selected
            .iter()
            .map(|&i| frame.labels()[i].clone())
            .collect(),
        selected: run.selected,
        boxes: run.boxes,
        truncation_error: e_r,
        error_table: (0..=group.diameter() + 1)
            .map(|r| (r, profile.truncation_error(r)))
            .collect(),
        truncated_bounds,
        coarse_lower,
        truncation_gap,
        ratio_floor: floor,
        certified_lower,
        achieved,
        max_box_ratio,
        density,
        certified: checks.all(),
        checks,
        transported: None,
        notes,
    })
}

/// Sparse subframe of any frame `F` localized against a spanning reference `E`:
/// both are made Parseval, the Parseval pipeline runs, and the bounds are
/// carried back to `F[J]`.
pub fn extract_sparse_subframe(
    frame: &Frame,
    reference: &Frame,
    map: &LocalizationMap,
    eps: f64,
    mode: Mode,
) -> Result<ThinningResult> {
    let sharp = parseval_normalize(frame)?;
    let reference_sharp = parseval_normalize(reference)?;
    let mut result = extract_sparse_subframe_parseval(&sharp, &reference_sharp, map, eps, mode)?;
    let outer = frame_bounds(frame);
    let computed = if result.selected.is_empty() {
        FrameBounds {
            lower: 0.0,
            upper: 0.0,
        }
    } else {
        bounds_of_spectrum(&frame_spectrum(&frame.subframe(&result.selected)?))
    };
    result.transported = Some(Transported {
        frame: outer,
        computed,
        lower: outer.lower * result.achieved.lower,
        upper: outer.upper * result.achieved.upper,
        certified_lower: outer.lower * result.certified_lower,
    });
    Ok(result)
}

/// `lambda_max(S_J - S_I)`; never positive beyond rounding since `J ⊂ I`.
pub fn monotonicity_gap(frame: &Frame, selected: &[usize]) -> f64 {
    let all: Vec<usize> = (0..frame.len()).collect();
    let diff: ComplexMatrix =
        &partial_frame_operator(frame, selected) - &partial_frame_operator(frame, &all);
    hermitian_eig(&diff).expect("Hermitian").max()
}
