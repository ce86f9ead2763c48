//! Acceptance criteria. Runs as a plain binary so every criterion prints its
//! own PASS/FAIL line; the process fails if any criterion does.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use locframe::cli::run_from;
use locframe::frame::{
    canonical_dual, frame_bounds, parseval_normalize, redundancy_profile, Frame,
};
use locframe::gabor::{discrete_gaussian, gabor_frame, FiniteGaborSystem};
use locframe::io::{parse_frame, read_frame_file, Report};
use locframe::linalg::{hermitian_eig, ComplexMatrix, C64};
use locframe::localization::{density_table, IndexGroup, LocalizationMap};
use locframe::random::{random_frame, SeededRng};
use locframe::removal::{exhaustive_oracle, finite_removal, g_estimate};
use locframe::suites::{densities, gabor_tight, naimark, sandwich, truncation};

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn trace_error(f: &Frame) -> f64 {
    let t = canonical_dual(f).expect("spanning frame").trace();
    (t - f.dim() as f64).abs()
}

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("locframe-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}

/// `S^{-1/2}` of a positive definite Hermitian matrix.
fn inverse_sqrt(s: &ComplexMatrix) -> ComplexMatrix {
    let spec = hermitian_eig(s).expect("Hermitian");
    let n = s.rows();
    let v = &spec.eigenvectors;
    ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| v[(i, k)] * v[(j, k)].conj() * (1.0 / spec.eigenvalues[k].sqrt()))
            .sum::<C64>()
    })
}

/// `lambda_min(S_F^{-1/2} S_J S_F^{-1/2})`, from raw column sums.
fn relative_lambda_min(f: &Frame, subset: &[usize]) -> f64 {
    let n = f.dim();
    let gram = |cols: &[usize]| {
        ComplexMatrix::from_fn(n, n, |i, j| {
            cols.iter()
                .map(|&c| f.synthesis()[(i, c)] * f.synthesis()[(j, c)].conj())
                .sum::<C64>()
        })
    };
    let all: Vec<usize> = (0..f.len()).collect();
    let w = inverse_sqrt(&gram(&all));
    let m = &(&w * &gram(subset)) * &w;
    hermitian_eig(&m).expect("Hermitian").min()
}

fn criterion_1() -> Result<String, String> {
    let mut worst = 0.0f64;
    for n in [4usize, 8, 16] {
        let inv = run_from(["locframe", "gen", "example31", "--N", &n.to_string()]);
        ensure(inv.code == 0, || {
            format!("gen example31 --N {n} exited {}", inv.code)
        })?;
        let f = parse_frame(&inv.stdout).map_err(|e| e.to_string())?;
        ensure(f.len() == 2 * n - 1, || {
            format!("M = {} for N = {n}", f.len())
        })?;
        let b = frame_bounds(&f);
        ensure(
            (b.lower - 1.0).abs() <= 1e-9 && (b.upper - 1.0).abs() <= 1e-9,
            || format!("N = {n}: bounds ({}, {})", b.lower, b.upper),
        )?;
        let best = exhaustive_oracle(&f, n).map_err(|e| e.to_string())?;
        let expect = 1.0 / n as f64;
        let expect_alt = 1.0 / (f.len() - n + 1) as f64;
        let err = (best.lambda_min - expect).abs();
        worst = worst.max(err);
        ensure(err <= 1e-12 && expect == expect_alt, || {
            format!(
                "N = {n}: oracle lambda_min {} vs 1/N {expect}",
                best.lambda_min
            )
        })?;
    }
    Ok(format!(
        "oracle matches 1/N for N = 4, 8, 16 (max error {worst:.1e})"
    ))
}

fn criterion_2() -> Result<String, String> {
    let out = naimark(2024, 50, 100).map_err(|e| e.to_string())?;
    ensure(out.cases == 50 && out.ok() && out.worst <= 1e-9, || {
        format!(
            "{}/{} frames pass, worst {:.3e}",
            out.passed, out.cases, out.worst
        )
    })?;
    Ok(format!(
        "50 frames x 100 vectors, worst energy error {:.1e}",
        out.worst
    ))
}

fn criterion_3() -> Result<String, String> {
    let eps = 0.4;
    let mut rng = SeededRng::new(33);
    let mut min_lambda = f64::INFINITY;
    for case in 0..30 {
        let (n, ratio) = match case % 3 {
            0 => (2 * (1 + rng.below(5)), 1.5),
            1 => (2 + rng.below(9), 2.0),
            _ => (2 + rng.below(9), 3.0),
        };
        let m = (ratio * n as f64) as usize;
        let f = random_frame(n, m, rng.next_seed(), case % 2 == 0).map_err(|e| e.to_string())?;
        let cert = finite_removal(&f, eps).map_err(|e| e.to_string())?;
        let cap = (14 * n).div_ceil(10);
        ensure(cert.selected.len() <= cap, || {
            format!("case {case}: |J| = {} > {cap}", cert.selected.len())
        })?;
        let lam = relative_lambda_min(&f, &cert.selected);
        let delta = eps / (2.0 * m as f64 / n as f64 - 1.0);
        let estimate = g_estimate(delta).map_err(|e| e.to_string())?;
        ensure(lam >= estimate && lam > 0.0, || {
            format!("case {case}: lambda_min {lam} below estimate {estimate}")
        })?;
        ensure(lam >= cert.riesz_bound - 1e-9, || {
            format!(
                "case {case}: lambda_min {lam} below per-box certificate {}",
                cert.riesz_bound
            )
        })?;
        ensure((lam - cert.achieved_ratio).abs() <= 1e-8, || {
            format!(
                "case {case}: reported ratio {} vs recomputed {lam}",
                cert.achieved_ratio
            )
        })?;
        ensure(trace_error(&f) <= 1e-8, || {
            format!("case {case}: trace identity")
        })?;
        min_lambda = min_lambda.min(lam);
    }
    Ok(format!("30 frames, smallest lambda_min {min_lambda:.3e}"))
}

fn criterion_4() -> Result<String, String> {
    let mut rng = SeededRng::new(44);
    let mut instances = 0;
    let mut tightest = f64::INFINITY;
    for n in 1..=6usize {
        for m in n + 1..=12 {
            let eps = 0.5 * (m as f64 / n as f64 - 1.0).min(1.0);
            let cap = ((1.0 + eps) * n as f64 - 1e-9).ceil() as usize;
            for complex in [false, true] {
                let f = random_frame(n, m, rng.next_seed(), complex).map_err(|e| e.to_string())?;
                let greedy = finite_removal(&f, eps).map_err(|e| e.to_string())?;
                ensure(greedy.selected.len() <= cap, || {
                    format!(
                        "N = {n}, M = {m}: greedy kept {} > {cap}",
                        greedy.selected.len()
                    )
                })?;
                let sharp = parseval_normalize(&f).map_err(|e| e.to_string())?;
                let best = exhaustive_oracle(&sharp, cap).map_err(|e| e.to_string())?;
                ensure(best.subset.len() <= cap, || {
                    "oracle subset too large".to_string()
                })?;
                ensure(best.lambda_min >= greedy.achieved_ratio - 1e-12, || {
                    format!(
                        "N = {n}, M = {m}: oracle {} below greedy {}",
                        best.lambda_min, greedy.achieved_ratio
                    )
                })?;
                tightest = tightest.min(best.lambda_min - greedy.achieved_ratio);
                instances += 1;
            }
        }
    }
    Ok(format!(
        "{instances} instances, smallest oracle margin {tightest:.2e}"
    ))
}

fn criterion_5() -> Result<String, String> {
    let out = truncation(55, 50).map_err(|e| e.to_string())?;
    let ops = out.table.column("operator_error").unwrap();
    let bounds = out.table.column("bound").unwrap();
    let schur = out.table.column("schur_value").unwrap();
    let schur_bounds = out.table.column("synthesis_bound").unwrap();
    let mut violations = 0;
    for k in 0..ops.len() {
        let p = |s: &str| s.parse::<f64>().unwrap();
        if p(ops[k]) > p(bounds[k]) + 1e-9 || p(schur[k]) > p(schur_bounds[k]) + 1e-9 {
            violations += 1;
        }
    }
    ensure(out.cases == 50 && out.ok() && violations == 0, || {
        format!(
            "{violations} violations, {}/{} configurations pass",
            out.passed, out.cases
        )
    })?;
    Ok(format!(
        "50 configurations, {} radii, zero violations",
        ops.len()
    ))
}

fn criterion_6() -> Result<String, String> {
    let out = sandwich(66, 100).map_err(|e| e.to_string())?;
    ensure(out.cases == 100 && out.ok() && out.worst <= 1e-9, || {
        format!("{}/{} pass, worst {:.3e}", out.passed, out.cases, out.worst)
    })?;
    Ok(format!(
        "100 pairs, worst slack violation {:.1e}",
        out.worst
    ))
}

fn criterion_7() -> Result<String, String> {
    let out = gabor_tight(77, &[8, 12, 16], 5).map_err(|e| e.to_string())?;
    ensure(out.cases == 18 && out.ok() && out.worst <= 1e-9, || {
        format!("{}/{} pass, worst {:.3e}", out.passed, out.cases, out.worst)
    })?;
    Ok(format!("18 systems, worst deviation {:.1e}", out.worst))
}

fn meta_f64(r: &Report, key: &str) -> Result<f64, String> {
    r.get_f64(key).ok_or_else(|| format!("report lacks {key}"))
}

fn criterion_8() -> Result<String, String> {
    let eps = 0.5;
    let dir = scratch_dir();
    let grid = dir.join("gabor16.frame");
    let sub = dir.join("thinned.frame");
    let s = |p: &PathBuf| p.to_string_lossy().into_owned();
    let inv = run_from(["locframe", "gen", "gabor", "--L", "16", "-o", &s(&grid)]);
    ensure(inv.code == 0, || {
        format!("gen gabor exited {}: {}", inv.code, inv.stderr)
    })?;
    let inv = run_from([
        "locframe",
        "thin",
        &s(&grid),
        "--gabor-auto",
        "--eps",
        "0.5",
        "--mode",
        "practical",
        "--output",
        &s(&sub),
    ]);
    ensure(inv.code == 0, || {
        format!("thin exited {}: {}", inv.code, inv.stderr)
    })?;
    let rep = Report::parse(&inv.stdout);

    // Per-box cardinality against (1 + eps/2) |B_{N+R}(0)| in the lattice group Z_8^2.
    let group = IndexGroup::new(2, 8, 1).map_err(|e| e.to_string())?;
    let radius = meta_f64(&rep, "radius")? as usize;
    let box_radius = meta_f64(&rep, "box_radius")? as usize;
    let ball = (0..group.size())
        .filter(|&g| {
            let c = group.coords(g);
            c[..2].iter().all(|&x| x.min(8 - x) <= box_radius + radius)
        })
        .count();
    let limit = (1.0 + eps / 2.0) * ball as f64;
    let boxes = rep.table("boxes").ok_or("report lacks boxes")?;
    let kept = boxes.column("kept").unwrap();
    for k in kept {
        let k: usize = k.parse().unwrap();
        ensure(k as f64 <= limit, || format!("box kept {k} > {limit}"))?;
    }

    // Emitted subframe spans.
    let inv = run_from(["locframe", "analyze", &s(&sub)]);
    ensure(inv.code == 0, || format!("analyze exited {}", inv.code))?;
    let analysis = Report::parse(&inv.stdout);
    let a = meta_f64(&analysis, "lower")?;
    ensure(a > 0.0, || format!("subframe lower bound {a}"))?;

    // Every window at the report radius, counted directly on the torus.
    let thinned = read_frame_file(&sub).map_err(|e| e.to_string())?;
    let mut counts = vec![0usize; 64];
    for lab in thinned.labels() {
        let c = lab.coords();
        counts[(c[0] as usize / 2) * 8 + c[1] as usize / 2] += 1;
    }
    let n_star = 8 / 4;
    let wrap = |d: usize| d.min(8 - d);
    let mut worst = 0.0f64;
    for cx in 0..8 {
        for cy in 0..8 {
            let mut count = 0;
            let mut size = 0;
            for x in 0..8usize {
                for y in 0..8usize {
                    if wrap(x.abs_diff(cx)) <= n_star && wrap(y.abs_diff(cy)) <= n_star {
                        count += counts[x * 8 + y];
                        size += 1;
                    }
                }
            }
            worst = worst.max(count as f64 / size as f64);
        }
    }
    ensure(worst <= 1.0 + eps, || {
        format!("window ratio {worst} > {}", 1.0 + eps)
    })?;
    ensure(trace_error(&thinned) <= 1e-8, || {
        "trace identity on the subframe".into()
    })?;
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!(
        "|J| = {} of 256, A = {a:.4}, max box {} <= {limit}, max window ratio {worst:.4}",
        thinned.len(),
        boxes
            .column("kept")
            .unwrap()
            .iter()
            .map(|k| k.parse::<usize>().unwrap())
            .max()
            .unwrap_or(0)
    ))
}

fn criterion_9() -> Result<String, String> {
    let n = densities(99, 20).map_err(|e| e.to_string())?;
    let unions = n
        .table
        .column("kind")
        .unwrap()
        .iter()
        .filter(|k| **k == "union")
        .count();
    ensure(n.ok() && unions == 20, || {
        format!("density additivity {}/{}", n.passed, n.cases)
    })?;
    for (name, out) in [
        ("naimark", naimark(91, 20, 5)),
        ("sandwich", sandwich(92, 40)),
        ("gabor-tight", gabor_tight(93, &[8, 12, 16], 5)),
    ] {
        let out = out.map_err(|e| e.to_string())?;
        let errs = out.table.column("trace_error").unwrap();
        let worst = errs
            .iter()
            .map(|e| e.parse::<f64>().unwrap())
            .fold(0.0, f64::max);
        ensure(worst <= 1e-8, || {
            format!("{name}: trace identity error {worst}")
        })?;
    }
    for l in [8usize, 12, 16] {
        let f = gabor_frame(&FiniteGaborSystem::full_grid(discrete_gaussian(l).unwrap()).unwrap())
            .unwrap();
        ensure(f.len() / f.dim() == l && f.len().is_multiple_of(f.dim()), || {
            "M/N".into()
        })?;
        let all: Vec<usize> = (0..f.len()).collect();
        let prof = redundancy_profile(&f, &[all]).map_err(|e| e.to_string())?;
        let r = prof.windows[0].redundancy;
        ensure((r - l as f64).abs() <= 1e-9 * l as f64, || {
            format!("L = {l}: redundancy {r}")
        })?;
        ensure(trace_error(&f) <= 1e-8, || {
            format!("L = {l}: trace identity")
        })?;
    }
    Ok("trace identity within 1e-8, full-grid redundancy = L, 20 unions additive".into())
}

fn criterion_10() -> Result<String, String> {
    let group = IndexGroup::cyclic(64).map_err(|e| e.to_string())?;
    let even: Vec<usize> = (0..64).step_by(2).collect();
    let table = density_table(&LocalizationMap::identity(group), Some(&even), 16);
    let row = table.at(16).ok_or("no radius 16 row")?;
    let mut seen = std::collections::BTreeSet::new();
    for c in 0..64usize {
        let in_ball = |x: usize| {
            let d = x.abs_diff(c);
            d.min(64 - d) <= 16
        };
        let count = even.iter().filter(|&&x| in_ball(x)).count();
        let size = (0..64).filter(|&x| in_ball(x)).count();
        ensure(size == 33, || format!("ball size {size}"))?;
        ensure(count == 16 || count == 17, || {
            format!("center {c}: {count}/33")
        })?;
        seen.insert(count);
    }
    let direct: Vec<usize> = seen.into_iter().collect();
    ensure(
        row.ball_size == 33
            && row.min_count == direct[0]
            && row.max_count == *direct.last().unwrap(),
        || {
            format!(
                "table {}/{} .. {}/{}",
                row.min_count, row.ball_size, row.max_count, row.ball_size
            )
        },
    )?;
    ensure(direct == [16, 17], || format!("direct counts {direct:?}"))?;
    Ok("window ratios are exactly 16/33 and 17/33".into())
}

fn main() {
    let criteria: [(&str, Check, Duration); 10] = [
        (
            "forced example reproduction",
            criterion_1,
            Duration::from_secs(10),
        ),
        ("naimark identity", criterion_2, Duration::from_secs(30)),
        (
            "finite removal certificate",
            criterion_3,
            Duration::from_secs(120),
        ),
        ("oracle existence", criterion_4, Duration::from_secs(120)),
        ("truncation bound", criterion_5, Duration::from_secs(120)),
        ("sandwich bounds", criterion_6, Duration::from_secs(60)),
        ("gabor tightness", criterion_7, Duration::from_secs(60)),
        ("end-to-end thinning", criterion_8, Duration::from_secs(300)),
        (
            "redundancy identities",
            criterion_9,
            Duration::from_secs(60),
        ),
        ("density counting", criterion_10, Duration::from_secs(5)),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (k, (name, check, budget)) in criteria.iter().enumerate() {
        let id = format!("criterion {:>2}", k + 1);
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|f| name.contains(f.as_str()) || id.contains(f.as_str()))
        {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed <= *budget {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {elapsed:.2?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(msg) => println!("{id} {name}: PASS ({elapsed:.2?}) {msg}"),
            Err(msg) => {
                failed += 1;
                println!("{id} {name}: FAIL ({elapsed:.2?}) {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
