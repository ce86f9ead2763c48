use std::path::PathBuf;

use locframe::cli::{run_from, EXIT_FAILED, EXIT_OK, EXIT_USAGE};
use locframe::frame::{frame_bounds, Frame, Label};
use locframe::io::{parse_frame, read_frame_file, write_frame, write_frame_file, Report};
use locframe::linalg::{ComplexMatrix, C64};
use locframe::random::random_frame;

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("locframe-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_string_lossy().into_owned()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

#[test]
fn frame_file_round_trip_is_exact() {
    let f = random_frame(5, 9, 42, true).unwrap();
    let text = write_frame(&f);
    let back = parse_frame(&text).unwrap();
    assert_eq!(back.synthesis().as_slice(), f.synthesis().as_slice());
    assert_eq!(write_frame(&back), text);

    let labels = (0..4).map(|k| Label::pair(k, -k)).collect();
    let g = Frame::new(
        ComplexMatrix::from_fn(2, 4, |i, j| C64::new((i + j) as f64 / 3.0, 0.0)),
        labels,
    )
    .unwrap();
    let text = write_frame(&g);
    assert!(text.starts_with("FRAME 1 4 2 real labeled"));
    let back = parse_frame(&text).unwrap();
    assert_eq!(back.labels(), g.labels());
    assert_eq!(back.synthesis().as_slice(), g.synthesis().as_slice());
}

#[test]
fn parse_errors_carry_line_numbers() {
    let err = parse_frame("FRAME 1 2 2 real unlabeled\n1.0 0.0\nabc 1.0\n").unwrap_err();
    assert!(err.to_string().contains("line 3"), "{err}");
    assert!(parse_frame("FRAME 1 3 2 real unlabeled\n1.0 0.0\n0.0 1.0\n").is_err());
}

#[test]
fn analyze_missing_file_is_usage_error() {
    let inv = run_from(["locframe", "analyze", "/nonexistent/frame.txt"]);
    assert_eq!(inv.code, EXIT_USAGE);
    assert!(!inv.stderr.is_empty());
}

#[test]
fn gen_then_analyze() {
    let s = Scratch::new("analyze");
    let path = s.path("p.frame");
    let inv = run_from([
        "locframe",
        "gen",
        "random-parseval",
        "--N",
        "3",
        "--M",
        "7",
        "--seed",
        "5",
        "-o",
        &path,
    ]);
    assert_eq!(inv.code, EXIT_OK, "{}", inv.stderr);
    let inv = run_from(["locframe", "analyze", &path]);
    assert_eq!(inv.code, EXIT_OK);
    let rep = Report::parse(&inv.stdout);
    assert!((rep.get_f64("lower").unwrap() - 1.0).abs() < 1e-9);
    assert!((rep.get_f64("upper").unwrap() - 1.0).abs() < 1e-9);
    assert!((rep.get_f64("redundancy").unwrap() - 7.0 / 3.0).abs() < 1e-9);
    let table = rep.table("vectors").unwrap();
    let diag: f64 = table
        .column("dual_diagonal")
        .unwrap()
        .iter()
        .map(|v| v.parse::<f64>().unwrap())
        .sum();
    assert!((diag - 3.0).abs() < 1e-8);

    // the report recomputes byte for byte
    let again = run_from(["locframe", "analyze", &path]);
    assert_eq!(again.stdout, inv.stdout);
}

#[test]
fn gabor_gen_respects_step() {
    let inv = run_from(["locframe", "gen", "gabor", "--L", "8", "--step", "2"]);
    assert_eq!(inv.code, EXIT_OK);
    let f = parse_frame(&inv.stdout).unwrap();
    assert_eq!((f.dim(), f.len()), (8, 16));
    assert!(f
        .labels()
        .iter()
        .all(|l| l.coords().iter().all(|c| c % 2 == 0)));
    assert_eq!(
        run_from(["locframe", "gen", "gabor", "--L", "8", "--step", "3"]).code,
        EXIT_USAGE
    );
}

#[test]
fn thin_with_reference_and_map() {
    let s = Scratch::new("thin");
    let h = 1.0 / 2f64.sqrt();
    let frame = Frame::from_synthesis(ComplexMatrix::from_fn(32, 64, |i, j| {
        C64::new(if j % 32 == i { h } else { 0.0 }, 0.0)
    }))
    .unwrap();
    let reference = Frame::from_synthesis(ComplexMatrix::identity(32)).unwrap();
    let (fp, rp, mp, op) = (s.path("f"), s.path("e"), s.path("map"), s.path("out"));
    write_frame_file(fp.as_ref(), &frame).unwrap();
    write_frame_file(rp.as_ref(), &reference).unwrap();
    let map: String = (0..64).map(|i| format!("{}\n", i % 32)).collect();
    std::fs::write(&mp, map).unwrap();

    let inv = run_from([
        "locframe",
        "thin",
        &fp,
        "--reference",
        &rp,
        "--group",
        "1,32,1",
        "--map",
        &mp,
        "--eps",
        "0.5",
        "--output",
        &op,
    ]);
    assert_eq!(inv.code, EXIT_OK, "{}{}", inv.stdout, inv.stderr);
    let rep = Report::parse(&inv.stdout);
    assert_eq!(rep.get("certified"), Some("true"));
    let selected = rep.get_f64("selected").unwrap() as usize;
    let out = read_frame_file(op.as_ref()).unwrap();
    assert_eq!(out.len(), selected);
    assert!(selected < 64);
    assert!(frame_bounds(&out).lower > 0.0);
    assert!(rep.table("boxes").unwrap().rows.len() > 1);
    assert!(rep.table("truncation_error").is_some());

    let short: String = (0..10).map(|i| format!("{i}\n")).collect();
    std::fs::write(&mp, short).unwrap();
    let inv = run_from([
        "locframe",
        "thin",
        &fp,
        "--reference",
        &rp,
        "--group",
        "1,32,1",
        "--map",
        &mp,
        "--eps",
        "0.5",
    ]);
    assert_eq!(inv.code, EXIT_USAGE);
    let inv = run_from(["locframe", "thin", &fp, "--eps", "0.5"]);
    assert_eq!(inv.code, EXIT_USAGE);
}

#[test]
fn strict_mode_reports_infeasibility() {
    let s = Scratch::new("strict");
    let fp = s.path("g");
    assert_eq!(
        run_from(["locframe", "gen", "gabor", "--L", "16", "-o", &fp]).code,
        EXIT_OK
    );
    let inv = run_from([
        "locframe",
        "thin",
        &fp,
        "--gabor-auto",
        "--eps",
        "0.5",
        "--mode",
        "strict",
    ]);
    assert_eq!(inv.code, EXIT_FAILED);
    let rep = Report::parse(&inv.stdout);
    assert_eq!(rep.get("certified"), Some("false"));
    assert!(rep.get("failure").is_some());
}

#[test]
fn verify_suites_pass() {
    for suite in ["naimark", "sandwich", "gabor-tight", "densities"] {
        let inv = run_from(["locframe", "verify", suite, "--seed", "3"]);
        assert_eq!(inv.code, EXIT_OK, "{suite}: {}", inv.stdout);
        let rep = Report::parse(&inv.stdout);
        assert_eq!(rep.get("seed"), Some("3"));
        assert_eq!(rep.get("ok"), Some("true"));
    }
    assert_eq!(run_from(["locframe", "verify", "nope"]).code, EXIT_USAGE);
}

#[test]
fn sweep_rows_follow_grid_order() {
    let inv = run_from([
        "locframe",
        "sweep",
        "--eps-grid",
        "0.5,0.4",
        "--l-grid",
        "8,12",
    ]);
    assert_eq!(inv.code, EXIT_OK, "{}", inv.stderr);
    let rep = Report::parse(&inv.stdout);
    let t = rep.table("cells").unwrap();
    let eps = t.column("eps").unwrap();
    let l = t.column("L").unwrap();
    assert_eq!(eps, ["0.5", "0.5", "0.4", "0.4"]);
    assert_eq!(l, ["8", "12", "8", "12"]);
}
