//! Seeded property suites behind `locframe verify`.

use crate::error::Result;
use crate::frame::{
    canonical_dual, frame_operator, naimark_complement, subframe_bounds_sandwich, Frame,
};
use crate::gabor::{discrete_gaussian, gabor_frame, FiniteGaborSystem};
use crate::io::{fmt_f64, Table};
use crate::linalg::{norm, ComplexMatrix, C64};
use crate::localization::{
    density_table, truncation_error_check, windowed_density, IndexGroup, LocalizationMap,
    LocalizationProfile,
};
use crate::random::{localized_configuration, random_frame, random_parseval, SeededRng};
use crate::thinning::CHECK_SLACK;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Naimark,
    Truncation,
    Sandwich,
    Densities,
    GaborTight,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Naimark => "naimark",
            Suite::Truncation => "truncation",
            Suite::Sandwich => "sandwich",
            Suite::Densities => "densities",
            Suite::GaborTight => "gabor-tight",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub seed: u64,
    pub cases: usize,
    pub passed: usize,
    /// Largest observed deviation (suite specific; at most 0 means slack to spare).
    pub worst: f64,
    pub table: Table,
}

impl SuiteOutcome {
    pub fn ok(&self) -> bool {
        self.passed == self.cases
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<SuiteOutcome> {
    match suite {
        Suite::Naimark => naimark(seed, 100, 20),
        Suite::Truncation => truncation(seed, 50),
        Suite::Sandwich => sandwich(seed, 100),
        Suite::Densities => densities(seed, 20),
        Suite::GaborTight => gabor_tight(seed, &[8, 12, 16], 5),
    }
}

fn outcome(suite: Suite, seed: u64, table: Table, flags: &[bool], worst: f64) -> SuiteOutcome {
    SuiteOutcome {
        suite,
        seed,
        cases: flags.len(),
        passed: flags.iter().filter(|&&f| f).count(),
        worst,
        table,
    }
}

fn random_shape(rng: &mut SeededRng, max_n: usize) -> (usize, usize) {
    let n = 2 + rng.below(max_n - 1);
    let m = n + 1 + rng.below(2 * n);
    (n, m)
}

fn coefficients(rng: &mut SeededRng, m: usize) -> Vec<C64> {
    (0..m).map(|_| rng.complex_normal()).collect()
}

/// Energy split `||T c||^2 + ||T' c||^2 = ||c||^2` over a Parseval frame and
/// its Naimark complement.
pub fn naimark(seed: u64, frames: usize, vectors: usize) -> Result<SuiteOutcome> {
    let mut rng = SeededRng::new(seed);
    let mut table = Table::new(
        "cases",
        &["case", "n", "m", "max_error", "trace_error", "pass"],
    );
    let mut flags = Vec::new();
    let mut worst = 0.0f64;
    for case in 0..frames {
        let (n, m) = random_shape(&mut rng, 6);
        let f = random_parseval(n, m, rng.next_seed(), true)?;
        let c = naimark_complement(&f)?;
        let mut err = 0.0f64;
        for _ in 0..vectors {
            let coeff = coefficients(&mut rng, m);
            let a = norm(&f.synthesis().mul_vec(&coeff)).powi(2);
            let b = norm(&c.synthesis().mul_vec(&coeff)).powi(2);
            let total = norm(&coeff).powi(2);
            err = err.max((a + b - total).abs());
        }
        let trace_err = (canonical_dual(&f)?.trace() - n as f64).abs();
        let pass = err <= 1e-9 && trace_err <= 1e-8;
        worst = worst.max(err);
        flags.push(pass);
        table.push(vec![
            case.to_string(),
            n.to_string(),
            m.to_string(),
            fmt_f64(err),
            fmt_f64(trace_err),
            pass.to_string(),
        ]);
    }
    Ok(outcome(Suite::Naimark, seed, table, &flags, worst))
}

/// Truncation estimates on random localized configurations over `Z_32` and
/// `Z_64`, for every `R >= R_0`.
pub fn truncation(seed: u64, configs: usize) -> Result<SuiteOutcome> {
    let mut rng = SeededRng::new(seed);
    let mut table = Table::new(
        "cases",
        &[
            "case",
            "L",
            "R",
            "R0",
            "operator_error",
            "bound",
            "schur_value",
            "synthesis_bound",
            "pass",
        ],
    );
    let mut flags = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for case in 0..configs {
        let l = if case % 2 == 0 { 32 } else { 64 };
        let per_site = 1 + rng.below(2);
        let cfg = localized_configuration(l, per_site, rng.next_seed())?;
        let profile = LocalizationProfile::compute(&cfg.frame, &cfg.map, &cfg.reference)?;
        let subset = rng.subset(cfg.frame.len(), 0.5);
        let r0 = profile.min_radius();
        let mut pass = true;
        for radius in r0..=cfg.map.group().diameter() + 1 {
            let c = truncation_error_check(
                &cfg.frame,
                &cfg.reference,
                &cfg.map,
                radius,
                &subset,
                &profile,
            )?;
            let ok = c.holds(CHECK_SLACK);
            pass &= ok;
            worst = worst
                .max(c.operator_error - c.bound)
                .max(c.schur_value - c.synthesis_bound);
            table.push(vec![
                case.to_string(),
                l.to_string(),
                radius.to_string(),
                r0.to_string(),
                fmt_f64(c.operator_error),
                fmt_f64(c.bound),
                fmt_f64(c.schur_value),
                fmt_f64(c.synthesis_bound),
                ok.to_string(),
            ]);
        }
        flags.push(pass);
    }
    Ok(outcome(Suite::Truncation, seed, table, &flags, worst))
}

/// `A A' <= lambda_min(S_{F[J]})` and `lambda_max(S_{F[J]}) <= B B'`.
pub fn sandwich(seed: u64, pairs: usize) -> Result<SuiteOutcome> {
    let mut rng = SeededRng::new(seed);
    let mut table = Table::new(
        "cases",
        &[
            "case",
            "n",
            "m",
            "size",
            "lower_slack",
            "upper_slack",
            "trace_error",
            "pass",
        ],
    );
    let mut flags = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for case in 0..pairs {
        let (n, m) = random_shape(&mut rng, 6);
        let f = random_frame(n, m, rng.next_seed(), case % 2 == 0)?;
        let subset = rng.subset(m, 0.6);
        let s = subframe_bounds_sandwich(&f, &subset)?;
        let lower_slack = s.computed.lower - s.predicted_lower;
        let upper_slack = s.predicted_upper - s.computed.upper;
        let trace_err = (canonical_dual(&f)?.trace() - n as f64).abs();
        let pass = s.holds(1e-9) && trace_err <= 1e-8;
        worst = worst.max(-lower_slack).max(-upper_slack);
        flags.push(pass);
        table.push(vec![
            case.to_string(),
            n.to_string(),
            m.to_string(),
            subset.len().to_string(),
            fmt_f64(lower_slack),
            fmt_f64(upper_slack),
            fmt_f64(trace_err),
            pass.to_string(),
        ]);
    }
    Ok(outcome(Suite::Sandwich, seed, table, &flags, worst))
}

/// Even residues of `Z_64` at `N* = 16`, and additivity of box counts under
/// disjoint unions.
pub fn densities(seed: u64, pairs: usize) -> Result<SuiteOutcome> {
    let mut rng = SeededRng::new(seed);
    let mut table = Table::new("cases", &["case", "kind", "detail", "pass"]);
    let mut flags = Vec::new();

    let z64 = IndexGroup::cyclic(64)?;
    let even: Vec<usize> = (0..64).step_by(2).collect();
    let row = *density_table(&LocalizationMap::identity(z64), Some(&even), 16)
        .at(16)
        .expect("radius 16 row");
    let pass = (row.min_count, row.max_count, row.ball_size) == (16, 17, 33);
    flags.push(pass);
    table.push(vec![
        "0".into(),
        "even-residues".into(),
        format!(
            "{}/{} {}/{}",
            row.min_count, row.ball_size, row.max_count, row.ball_size
        ),
        pass.to_string(),
    ]);

    let group = IndexGroup::cyclic(32)?;
    for case in 1..=pairs {
        let m1 = 20 + rng.below(30);
        let m2 = 20 + rng.below(30);
        let a1 = LocalizationMap::new(group, (0..m1).map(|_| rng.below(32)).collect())?;
        let a2 = LocalizationMap::new(group, (0..m2).map(|_| rng.below(32)).collect())?;
        let j1 = rng.subset(m1, 0.5);
        let j2 = rng.subset(m2, 0.5);
        let union = a1.disjoint_union(&a2)?;
        let ju: Vec<usize> = j1
            .iter()
            .copied()
            .chain(j2.iter().map(|&i| i + m1))
            .collect();
        let centers: Vec<usize> = (0..40).map(|_| rng.below(32)).collect();
        let radii: Vec<usize> = (0..40).map(|k| 1 + k % 8).collect();
        let w1 = windowed_density(&a1, Some(&j1), &centers, &radii)?;
        let w2 = windowed_density(&a2, Some(&j2), &centers, &radii)?;
        let wu = windowed_density(&union, Some(&ju), &centers, &radii)?;
        let pass = wu
            .windows
            .iter()
            .zip(w1.windows.iter().zip(&w2.windows))
            .all(|(u, (x, y))| u.count == x.count + y.count);
        flags.push(pass);
        table.push(vec![
            case.to_string(),
            "union".into(),
            format!("{m1}+{m2}"),
            pass.to_string(),
        ]);
    }
    Ok(outcome(Suite::Densities, seed, table, &flags, 0.0))
}

/// Full-grid Gabor systems have `S = L ||g||^2 I`.
pub fn gabor_tight(seed: u64, lengths: &[usize], random_windows: usize) -> Result<SuiteOutcome> {
    let mut rng = SeededRng::new(seed);
    let mut table = Table::new(
        "cases",
        &["L", "window", "max_deviation", "trace_error", "pass"],
    );
    let mut flags = Vec::new();
    let mut worst = 0.0f64;
    for &l in lengths {
        let mut windows = vec![("gaussian".to_string(), discrete_gaussian(l)?)];
        for k in 0..random_windows {
            windows.push((
                format!("random-{k}"),
                (0..l).map(|_| rng.complex_normal()).collect(),
            ));
        }
        for (name, g) in windows {
            let energy = norm(&g).powi(2);
            let f = gabor_frame(&FiniteGaborSystem::full_grid(g)?)?;
            let target = ComplexMatrix::identity(l).scale(l as f64 * energy);
            let dev = (&frame_operator(&f) - &target).max_abs();
            let trace_err = (canonical_dual(&f)?.trace() - l as f64).abs();
            let pass = dev <= 1e-9 && trace_err <= 1e-8;
            worst = worst.max(dev);
            flags.push(pass);
            table.push(vec![
                l.to_string(),
                name,
                fmt_f64(dev),
                fmt_f64(trace_err),
                pass.to_string(),
            ]);
        }
    }
    Ok(outcome(Suite::GaborTight, seed, table, &flags, worst))
}

/// Trace identity `sum <f_i, S^{-1} f_i> = N`, as an absolute error.
pub fn trace_identity_error(frame: &Frame) -> Result<f64> {
    Ok((canonical_dual(frame)?.trace() - frame.dim() as f64).abs())
}
