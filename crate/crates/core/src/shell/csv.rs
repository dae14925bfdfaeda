//! Magnitude-only CSV for plotting.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::netsim::{magnitude_db, SParamSweep};

pub const CSV_HEADER: &str = "freq_hz,s11_db,s21_db";

/// One row per frequency; dB values floored at -200.
pub fn render_csv(sweep: &SParamSweep) -> Result<String> {
    super::touchstone::check_writable(sweep)?;
    let mut out = String::with_capacity(40 * (sweep.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (f, m) in sweep.frequencies.iter().zip(&sweep.s) {
        let s11 = magnitude_db(m.s11()) + 0.0;
        let s21 = magnitude_db(m.s21()) + 0.0;
        writeln!(out, "{f},{s11:.9},{s21:.9}").unwrap();
    }
    Ok(out)
}

pub fn write_csv(sweep: &SParamSweep, path: &Path) -> Result<()> {
    let text = render_csv(sweep)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
