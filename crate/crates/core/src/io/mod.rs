//! Frame files and reports.

mod frame_file;
mod report;

pub use frame_file::{fmt_f64, parse_frame, read_frame_file, write_frame, write_frame_file};
pub use report::{Report, Table};
