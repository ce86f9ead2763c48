//! Command-line surface: `gen`, `analyze`, `thin`, `verify`, `sweep`.
//!
//! Exit codes: 0 success, 1 failed check or uncertified result, 2 usage or
//! input error.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::{canonical_dual, frame_bounds, Frame, Label};
use crate::gabor::{discrete_gaussian, gabor_frame, gabor_thin_frame, FiniteGaborSystem};
use crate::io::{fmt_f64, read_frame_file, write_frame, write_frame_file, Report, Table};
use crate::linalg::{norm, ComplexMatrix, C64};
use crate::localization::{report_radius, IndexGroup, LocalizationMap};
use crate::random::{random_parseval, SeededRng};
use crate::suites::{run_suite, Suite};
use crate::thinning::{extract_sparse_subframe, Mode, ThinningResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "locframe",
    version,
    about = "Finite frames, localization and sparse subframes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated frame file.
    Gen(GenArgs),
    /// Report bounds, redundancy and dual diagonal of a frame file.
    Analyze(AnalyzeArgs),
    /// Extract a sparse subframe.
    Thin(ThinArgs),
    /// Run a seeded property suite.
    Verify(VerifyArgs),
    /// Thin full Gabor grids over a grid of eps and L.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Onb,
    RandomParseval,
    Example31,
    Gabor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WindowKind {
    Gaussian,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strict,
    Practical,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Strict => Mode::Strict,
            ModeArg::Practical => Mode::Practical,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Naimark,
    Truncation,
    Sandwich,
    Densities,
    GaborTight,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Naimark => Suite::Naimark,
            SuiteArg::Truncation => Suite::Truncation,
            SuiteArg::Sandwich => Suite::Sandwich,
            SuiteArg::Densities => Suite::Densities,
            SuiteArg::GaborTight => Suite::GaborTight,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: GenKind,
    /// Dimension.
    #[arg(long = "n", visible_alias = "N")]
    pub n: Option<usize>,
    /// Number of vectors (random-parseval).
    #[arg(long = "m", visible_alias = "M")]
    pub m: Option<usize>,
    /// Signal length (gabor).
    #[arg(long = "l", visible_alias = "L")]
    pub l: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Real Gaussian entries instead of complex ones (random-parseval).
    #[arg(long)]
    pub real: bool,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub window: WindowKind,
    /// Keep labels (x, w) with both coordinates divisible by this step (gabor).
    #[arg(long, default_value_t = 1)]
    pub step: usize,
    /// Output path; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub frame: PathBuf,
    #[arg(short, long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThinArgs {
    pub frame: PathBuf,
    /// Reference frame indexed by the group (labels are group coordinates).
    #[arg(long, conflicts_with = "gabor_auto", requires = "group")]
    pub reference: Option<PathBuf>,
    /// Index group as RANK,L,D.
    #[arg(long)]
    pub group: Option<String>,
    /// One group label per frame vector, one per line; defaults to the frame labels.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Gaussian reference lattice with labels read as time-frequency pairs.
    #[arg(long)]
    pub gabor_auto: bool,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, value_enum, default_value = "practical")]
    pub mode: ModeArg,
    #[arg(short, long)]
    pub report: Option<PathBuf>,
    /// Where to write the subframe F[J].
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(short, long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub eps_grid: Vec<f64>,
    #[arg(long = "l-grid", visible_alias = "L-grid", value_delimiter = ',', required = true, num_args = 1..)]
    pub l_grid: Vec<usize>,
    #[arg(long, value_enum, default_value = "practical")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub window: WindowKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub report: Option<PathBuf>,
}

/// Captured result of one invocation.
#[derive(Debug)]
pub struct Invocation {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses arguments (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            Invocation {
                stdout: if code == EXIT_OK {
                    e.to_string()
                } else {
                    String::new()
                },
                stderr: if code == EXIT_OK {
                    String::new()
                } else {
                    e.to_string()
                },
                code,
            }
        }
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::InvalidParameter(_)
        | Error::Io(_)
        | Error::LabelMismatch(_)
        | Error::Dimension(_) => EXIT_USAGE,
        _ => EXIT_FAILED,
    }
}

pub fn run(cli: &Cli) -> Invocation {
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a).map(|text| (text, EXIT_OK)),
        Command::Analyze(a) => cmd_analyze(a).and_then(|r| emit(r, a.report.as_ref(), EXIT_OK)),
        Command::Thin(a) => cmd_thin(a).and_then(|(r, code)| emit(r, a.report.as_ref(), code)),
        Command::Verify(a) => cmd_verify(a).and_then(|(r, code)| emit(r, a.report.as_ref(), code)),
        Command::Sweep(a) => cmd_sweep(a).and_then(|r| emit(r, a.report.as_ref(), EXIT_OK)),
    };
    match result {
        Ok((stdout, code)) => Invocation {
            stdout,
            stderr: String::new(),
            code,
        },
        Err(e) => Invocation {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: error_code(&e),
        },
    }
}

fn emit(report: Report, path: Option<&PathBuf>, code: i32) -> Result<(String, i32)> {
    let text = report.render();
    match path {
        Some(p) => {
            std::fs::write(p, &text)?;
            Ok((String::new(), code))
        }
        None => Ok((text, code)),
    }
}

fn need(value: Option<usize>, flag: &str) -> Result<usize> {
    value.ok_or_else(|| Error::InvalidParameter(format!("--{flag} is required")))
}

/// `e_1, ..., e_{N-1}` followed by `N` copies of `e_N / sqrt(N)`.
pub fn example31(n: usize) -> Result<Frame> {
    if n < 2 {
        return Err(Error::InvalidParameter("example31 needs N >= 2".into()));
    }
    let h = 1.0 / (n as f64).sqrt();
    let m = ComplexMatrix::from_fn(n, 2 * n - 1, |i, j| {
        let v = if j < n - 1 {
            if i == j {
                1.0
            } else {
                0.0
            }
        } else if i == n - 1 {
            h
        } else {
            0.0
        };
        C64::new(v, 0.0)
    });
    Frame::from_synthesis(m)
}

pub fn gabor_system(
    l: usize,
    window: WindowKind,
    step: usize,
    seed: u64,
) -> Result<FiniteGaborSystem> {
    if step == 0 || !l.is_multiple_of(step) {
        return Err(Error::InvalidParameter(format!(
            "step {step} must divide L = {l}"
        )));
    }
    let g = match window {
        WindowKind::Gaussian => discrete_gaussian(l)?,
        WindowKind::Random => {
            let mut rng = SeededRng::new(seed);
            let raw: Vec<C64> = (0..l).map(|_| rng.complex_normal()).collect();
            let n = norm(&raw);
            raw.into_iter().map(|z| z / n).collect()
        }
    };
    let labels = (0..l)
        .step_by(step)
        .flat_map(|x| (0..l).step_by(step).map(move |w| (x, w)))
        .collect();
    FiniteGaborSystem::new(g, labels)
}

pub fn generate(a: &GenArgs) -> Result<Frame> {
    match a.kind {
        GenKind::Onb => Frame::from_synthesis(ComplexMatrix::identity(need(a.n, "n")?)),
        GenKind::RandomParseval => {
            let n = need(a.n, "n")?;
            let m = need(a.m, "m")?;
            if n == 0 || m < n {
                return Err(Error::InvalidParameter(format!(
                    "need 1 <= N <= M, got N = {n}, M = {m}"
                )));
            }
            random_parseval(n, m, a.seed, !a.real)
        }
        GenKind::Example31 => example31(need(a.n, "n")?),
        GenKind::Gabor => gabor_frame(&gabor_system(need(a.l, "l")?, a.window, a.step, a.seed)?),
    }
}

pub fn cmd_gen(a: &GenArgs) -> Result<String> {
    let frame = generate(a)?;
    match &a.output {
        Some(p) => {
            write_frame_file(p, &frame)?;
            Ok(String::new())
        }
        None => Ok(write_frame(&frame)),
    }
}

pub fn analyze_frame(frame: &Frame) -> Result<Report> {
    let mut r = Report::new("analyze");
    let b = frame_bounds(frame);
    r.set("vectors", frame.len());
    r.set("dimension", frame.dim());
    r.set_f64("lower", b.lower);
    r.set_f64("upper", b.upper);
    r.set("frame", b.is_frame());
    let mut t = Table::new("vectors", &["index", "label", "norm_sqr", "dual_diagonal"]);
    if b.is_frame() {
        let pair = canonical_dual(frame)?;
        let trace = pair.trace();
        r.set_f64("dual_trace", trace);
        r.set_f64("redundancy", frame.len() as f64 / trace);
        for i in 0..frame.len() {
            t.push(vec![
                i.to_string(),
                frame.labels()[i].to_string(),
                fmt_f64(frame.norm_sqr(i)),
                fmt_f64(pair.diagonal[i]),
            ]);
        }
    } else {
        r.set("note", "not a frame: the vectors do not span");
        for i in 0..frame.len() {
            t.push(vec![
                i.to_string(),
                frame.labels()[i].to_string(),
                fmt_f64(frame.norm_sqr(i)),
                String::new(),
            ]);
        }
    }
    r.tables.push(t);
    Ok(r)
}

pub fn cmd_analyze(a: &AnalyzeArgs) -> Result<Report> {
    let frame = read_frame_file(&a.frame)?;
    let mut r = analyze_frame(&frame)?;
    r.set("input", a.frame.display());
    Ok(r)
}

fn parse_group(spec: &str) -> Result<IndexGroup> {
    let parts: Vec<usize> = spec
        .split(',')
        .map(|p| {
            p.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!("bad group spec `{spec}`, expected RANK,L,D"))
            })
        })
        .collect::<Result<_>>()?;
    match parts.as_slice() {
        &[rank, l, d] => IndexGroup::new(rank, l, d),
        _ => Err(Error::InvalidParameter(format!(
            "bad group spec `{spec}`, expected RANK,L,D"
        ))),
    }
}

fn label_to_group(group: &IndexGroup, label: &Label, line: usize) -> Result<usize> {
    let mut c = label.coords().to_vec();
    if c.len() == group.rank() {
        c.push(0);
    }
    if c.len() != group.rank() + 1 {
        return Err(Error::Parse {
            line,
            message: format!("label {label} does not have {} coordinates", group.rank()),
        });
    }
    Ok(group.index(&c))
}

fn read_map(path: Option<&PathBuf>, frame: &Frame, group: IndexGroup) -> Result<LocalizationMap> {
    let assignment = match path {
        None => frame
            .labels()
            .iter()
            .enumerate()
            .map(|(i, l)| label_to_group(&group, l, i + 1))
            .collect::<Result<Vec<_>>>()?,
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            let mut out = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let coords = line
                    .split_whitespace()
                    .map(|t| {
                        t.parse::<i64>().map_err(|_| Error::Parse {
                            line: i + 1,
                            message: format!("bad coordinate `{t}`"),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                out.push(label_to_group(&group, &Label(coords), i + 1)?);
            }
            if out.len() != frame.len() {
                return Err(Error::LabelMismatch(format!(
                    "map has {} entries for {} vectors",
                    out.len(),
                    frame.len()
                )));
            }
            out
        }
    };
    LocalizationMap::new(group, assignment)
}

fn thinning_report(r: &ThinningResult, frame: &Frame, group: &IndexGroup) -> Report {
    let mut rep = Report::new("thin");
    let c = &r.config;
    rep.set_f64("eps", c.eps);
    rep.set("mode", c.mode);
    rep.set_f64("covering", c.covering);
    rep.set_f64("c_eps", c.c_eps);
    rep.set_f64("c_eps_ln", c.c_eps_ln);
    rep.set("radius", c.radius);
    rep.set("box_radius", c.box_radius);
    rep.set("whole_group_box", c.whole_group_box);
    rep.set_f64("box_threshold", c.box_threshold);
    rep.set_f64("truncation_error", r.truncation_error);
    rep.set_f64("truncated_lower", r.truncated_bounds.lower);
    rep.set_f64("truncated_upper", r.truncated_bounds.upper);
    rep.set_f64("coarse_lower", r.coarse_lower);
    rep.set_f64("truncation_gap", r.truncation_gap);
    rep.set_f64("ratio_floor", r.ratio_floor);
    rep.set_f64("certified_lower", r.certified_lower);
    rep.set_f64("achieved_lower", r.achieved.lower);
    rep.set_f64("achieved_upper", r.achieved.upper);
    rep.set("selected", r.selected.len());
    rep.set("total", frame.len());
    rep.set_f64("max_box_ratio", r.max_box_ratio);
    rep.set("report_radius", report_radius(group));
    rep.set_f64("report_ratio", r.report_ratio());
    rep.set("check_radius", r.checks.radius);
    rep.set("check_truncated_bounds", r.checks.truncated_bounds);
    rep.set("check_coarse_bound", r.checks.coarse_bound);
    rep.set("check_truncation_gap", r.checks.truncation_gap);
    rep.set("check_box_cardinality", r.checks.box_cardinality);
    rep.set("check_box_density", r.checks.box_density);
    rep.set("check_lower_bound", r.checks.lower_bound);
    rep.set("certified", r.certified);
    if let Some(t) = &r.transported {
        rep.set_f64("frame_lower", t.frame.lower);
        rep.set_f64("frame_upper", t.frame.upper);
        rep.set_f64("subframe_lower", t.computed.lower);
        rep.set_f64("subframe_upper", t.computed.upper);
        rep.set_f64("transported_lower", t.lower);
        rep.set_f64("transported_upper", t.upper);
        rep.set_f64("transported_certified_lower", t.certified_lower);
    }
    for (k, note) in r.notes.iter().enumerate() {
        rep.set(&format!("note_{}", k + 1), note);
    }

    let mut boxes = Table::new(
        "boxes",
        &[
            "center",
            "label",
            "size",
            "branch",
            "rank",
            "kept",
            "slack",
            "ratio",
            "certified_ratio_ln",
        ],
    );
    for b in &r.boxes {
        boxes.push(vec![
            b.center.to_string(),
            group.label(b.center).to_string(),
            b.size.to_string(),
            b.branch.to_string(),
            b.rank.to_string(),
            b.kept.len().to_string(),
            b.slack.map(fmt_f64).unwrap_or_default(),
            fmt_f64(b.ratio),
            fmt_f64(b.certified_ratio_ln),
        ]);
    }
    let mut density = Table::new(
        "density",
        &[
            "radius",
            "ball_size",
            "max_count",
            "min_count",
            "sup_ratio",
            "inf_ratio",
        ],
    );
    for row in &r.density.rows {
        density.push(vec![
            row.radius.to_string(),
            row.ball_size.to_string(),
            row.max_count.to_string(),
            row.min_count.to_string(),
            fmt_f64(row.sup_ratio()),
            fmt_f64(row.inf_ratio()),
        ]);
    }
    let mut errors = Table::new("truncation_error", &["radius", "error"]);
    for &(radius, e) in &r.error_table {
        errors.push(vec![radius.to_string(), fmt_f64(e)]);
    }
    let mut selected = Table::new("selected", &["position", "label"]);
    for (&i, l) in r.selected.iter().zip(&r.labels) {
        selected.push(vec![i.to_string(), l.to_string()]);
    }
    rep.tables.extend([boxes, density, errors, selected]);
    rep
}

fn infeasible_report(e: &Error) -> Option<Report> {
    let mut rep = Report::new("thin");
    rep.set("certified", false);
    rep.set("failure", e);
    match e {
        Error::InfeasibleRadius { threshold, table } => {
            rep.set_f64("radius_threshold", *threshold);
            let mut t = Table::new("truncation_error", &["radius", "error"]);
            for &(radius, err) in table {
                t.push(vec![radius.to_string(), fmt_f64(err)]);
            }
            rep.tables.push(t);
            Some(rep)
        }
        Error::InfeasibleBox {
            lower,
            upper,
            modulus,
        } => {
            rep.set(
                "diagnostic",
                format!(
                    "grow L: no N in ({lower}, {upper}] with 2N | {modulus} meets the growth bound"
                ),
            );
            Some(rep)
        }
        _ => None,
    }
}

/// Runs the thinning command; the code is 1 when the result is not certified.
pub fn cmd_thin(a: &ThinArgs) -> Result<(Report, i32)> {
    let frame = read_frame_file(&a.frame)?;
    let mode: Mode = a.mode.into();
    let outcome = if a.gabor_auto {
        gabor_thin_frame(&frame, a.eps, mode).map(|t| {
            let mut rep = thinning_report(&t.result, &frame, &t.group);
            rep.set("reference", "gabor-auto");
            rep.set("lattice_spacing", t.spacing);
            let mut beurling = Table::new(
                "beurling",
                &[
                    "radius",
                    "max_count",
                    "min_count",
                    "denominator",
                    "upper",
                    "lower",
                ],
            );
            for row in &t.beurling {
                beurling.push(vec![
                    row.radius.to_string(),
                    row.max_count.to_string(),
                    row.min_count.to_string(),
                    row.denominator.to_string(),
                    fmt_f64(row.upper()),
                    fmt_f64(row.lower()),
                ]);
            }
            rep.tables.push(beurling);
            (t.result, rep)
        })
    } else {
        let reference_path = a.reference.as_ref().ok_or_else(|| {
            Error::InvalidParameter(
                "either --reference with --group, or --gabor-auto, is required".into(),
            )
        })?;
        let group = parse_group(a.group.as_deref().unwrap_or_default())?;
        let reference = read_frame_file(reference_path)?;
        let map = read_map(a.map.as_ref(), &frame, group)?;
        extract_sparse_subframe(&frame, &reference, &map, a.eps, mode).map(|r| {
            let mut rep = thinning_report(&r, &frame, &group);
            rep.set("reference", reference_path.display());
            (r, rep)
        })
    };
    match outcome {
        Ok((result, mut rep)) => {
            rep.set("input", a.frame.display());
            if let Some(out) = &a.output {
                write_frame_file(out, &frame.subframe(&result.selected)?)?;
                rep.set("output", out.display());
            }
            let code = if result.certified {
                EXIT_OK
            } else {
                EXIT_FAILED
            };
            Ok((rep, code))
        }
        Err(e) => match infeasible_report(&e) {
            Some(mut rep) => {
                rep.set("input", a.frame.display());
                Ok((rep, EXIT_FAILED))
            }
            None => Err(e),
        },
    }
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<(Report, i32)> {
    let outcome = run_suite(a.suite.into(), a.seed)?;
    let mut rep = Report::new("verify");
    rep.set("suite", outcome.suite.name());
    rep.set("seed", outcome.seed);
    rep.set("cases", outcome.cases);
    rep.set("passed", outcome.passed);
    rep.set_f64("worst", outcome.worst);
    rep.set("ok", outcome.ok());
    rep.tables.push(outcome.table.clone());
    let code = if outcome.ok() { EXIT_OK } else { EXIT_FAILED };
    Ok((rep, code))
}

pub fn cmd_sweep(a: &SweepArgs) -> Result<Report> {
    if a.eps_grid.is_empty() || a.l_grid.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep grids must be nonempty".into(),
        ));
    }
    let cells: Vec<(f64, usize)> = a
        .eps_grid
        .iter()
        .flat_map(|&e| a.l_grid.iter().map(move |&l| (e, l)))
        .collect();
    let mode: Mode = a.mode.into();
    let rows: Vec<Vec<String>> = cells
        .par_iter()
        .map(|&(eps, l)| {
            let start = Instant::now();
            let run = gabor_system(l, a.window, 1, a.seed)
                .and_then(|sys| gabor_frame(&sys))
                .and_then(|f| gabor_thin_frame(&f, eps, mode));
            let ms = start.elapsed().as_secs_f64() * 1e3;
            match run {
                Ok(t) => vec![
                    fmt_f64(eps),
                    l.to_string(),
                    t.result.selected.len().to_string(),
                    (l * l).to_string(),
                    fmt_f64(t.result.report_ratio()),
                    fmt_f64(t.result.achieved.lower),
                    fmt_f64(t.result.certified_lower),
                    t.result.certified.to_string(),
                    format!("{ms:.1}"),
                    String::new(),
                ],
                Err(e) => vec![
                    fmt_f64(eps),
                    l.to_string(),
                    String::new(),
                    (l * l).to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    "false".into(),
                    format!("{ms:.1}"),
                    e.to_string().replace(',', ";"),
                ],
            }
        })
        .collect();
    let mut rep = Report::new("sweep");
    rep.set("mode", mode);
    rep.set("window", format!("{:?}", a.window).to_lowercase());
    rep.set("seed", a.seed);
    let mut t = Table::new(
        "cells",
        &[
            "eps",
            "L",
            "selected",
            "total",
            "report_ratio",
            "achieved_lower",
            "certified_lower",
            "certified",
            "runtime_ms",
            "error",
        ],
    );
    for row in rows {
        t.push(row);
    }
    rep.tables.push(t);
    Ok(rep)
}
