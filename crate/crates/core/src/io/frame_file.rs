//! Text frame files.
//!
//! ```text
//! FRAME 1 <M> <N> complex|real labeled|unlabeled
//! @ <label coordinates>        (labeled files only, before each vector)
//! <N reals, or N pairs "re im">
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Numbers are written in
//! shortest round-trip form.

use crate::error::{Error, Result};
use crate::frame::{Frame, Label};
use crate::linalg::{ComplexMatrix, C64};

const MAGIC: &str = "FRAME";
const VERSION: &str = "1";

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Formats a float so that parsing it returns the same value.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn has_default_labels(frame: &Frame) -> bool {
    frame
        .labels()
        .iter()
        .enumerate()
        .all(|(i, l)| *l == Label::index(i))
}

pub fn write_frame(frame: &Frame) -> String {
    let real = frame.synthesis().as_slice().iter().all(|z| z.im == 0.0);
    let labeled = !has_default_labels(frame);
    let mut out = format!(
        "{MAGIC} {VERSION} {} {} {} {}\n",
        frame.len(),
        frame.dim(),
        if real { "real" } else { "complex" },
        if labeled { "labeled" } else { "unlabeled" }
    );
    for i in 0..frame.len() {
        if labeled {
            let coords: Vec<String> = frame.labels()[i]
                .coords()
                .iter()
                .map(i64::to_string)
                .collect();
            out.push_str(&format!("@ {}\n", coords.join(" ")));
        }
        let nums: Vec<String> = frame
            .vector(i)
            .iter()
            .flat_map(|z| {
                if real {
                    vec![fmt_f64(z.re)]
                } else {
                    vec![fmt_f64(z.re), fmt_f64(z.im)]
                }
            })
            .collect();
        out.push_str(&nums.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_frame(text: &str) -> Result<Frame> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 || fields[0] != MAGIC {
        return Err(parse_err(
            hline,
            "expected header `FRAME 1 <M> <N> complex|real labeled|unlabeled`",
        ));
    }
    if fields[1] != VERSION {
        return Err(parse_err(
            hline,
            format!("unsupported version {}", fields[1]),
        ));
    }
    let m: usize = fields[2]
        .parse()
        .map_err(|_| parse_err(hline, format!("bad vector count `{}`", fields[2])))?;
    let n: usize = fields[3]
        .parse()
        .map_err(|_| parse_err(hline, format!("bad dimension `{}`", fields[3])))?;
    let complex = match fields[4] {
        "complex" => true,
        "real" => false,
        other => return Err(parse_err(hline, format!("unknown scalar field `{other}`"))),
    };
    let labeled = match fields[5] {
        "labeled" => true,
        "unlabeled" => false,
        other => return Err(parse_err(hline, format!("unknown label marker `{other}`"))),
    };
    let width = if complex { 2 * n } else { n };
    let mut vectors = Vec::with_capacity(m);
    let mut labels = Vec::with_capacity(m);
    let mut last = hline;
    for i in 0..m {
        if labeled {
            let (ln, text) = lines
                .next()
                .ok_or_else(|| parse_err(last + 1, format!("missing label for vector {i}")))?;
            let rest = text
                .strip_prefix('@')
                .ok_or_else(|| parse_err(ln, "expected a label line starting with `@`"))?;
            let coords = rest
                .split_whitespace()
                .map(|t| {
                    t.parse::<i64>()
                        .map_err(|_| parse_err(ln, format!("bad label entry `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            if coords.is_empty() {
                return Err(parse_err(ln, "empty label"));
            }
            labels.push(Label(coords));
            last = ln;
        } else {
            labels.push(Label::index(i));
        }
        let (ln, text) = lines
            .next()
            .ok_or_else(|| parse_err(last + 1, format!("missing vector {i} of {m}")))?;
        let nums = text
            .split_whitespace()
            .map(|t| {
                let v: f64 = t
                    .parse()
                    .map_err(|_| parse_err(ln, format!("bad number `{t}`")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(parse_err(ln, format!("non-finite number `{t}`")))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        if nums.len() != width {
            return Err(parse_err(
                ln,
                format!("expected {width} numbers, found {}", nums.len()),
            ));
        }
        let v: Vec<C64> = if complex {
            nums.chunks(2).map(|p| C64::new(p[0], p[1])).collect()
        } else {
            nums.iter().map(|&x| C64::new(x, 0.0)).collect()
        };
        vectors.push(v);
        last = ln;
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, format!("trailing content after {m} vectors")));
    }
    Frame::new(ComplexMatrix::from_columns(n, &vectors), labels)
        .map_err(|e| parse_err(hline, e.to_string()))
}

pub fn read_frame_file(path: &std::path::Path) -> Result<Frame> {
    parse_frame(&std::fs::read_to_string(path)?)
}

pub fn write_frame_file(path: &std::path::Path, frame: &Frame) -> Result<()> {
    std::fs::write(path, write_frame(frame))?;
    Ok(())
}
