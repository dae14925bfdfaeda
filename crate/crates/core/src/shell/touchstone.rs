//! Touchstone v1 two-port files.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::netsim::{SMatrix, SParamSweep};

/// Parsed `.s2p` content.
#[derive(Debug, Clone, PartialEq)]
pub struct TouchstoneData {
    pub z_ref: f64,
    pub frequencies: Vec<f64>,
    pub s: Vec<SMatrix>,
}

/// Scientific notation with 10 significant digits and a signed two-digit
/// exponent, e.g. `-1.234567890e-03`.
pub(crate) fn sci(x: f64) -> String {
    let x = x + 0.0; // -0.0 -> 0.0
    let raw = format!("{x:.9e}");
    let (mantissa, exp) = raw.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub(crate) fn check_writable(sweep: &SParamSweep) -> Result<()> {
    if sweep.is_empty() {
        return Err(Error::Config("refusing to write an empty sweep".into()));
    }
    if let Some(bad) = sweep.singular.first() {
        return Err(Error::Config(format!(
            "sweep has {} singular samples (first at {} Hz)",
            sweep.singular.len(),
            bad.f_hz
        )));
    }
    Ok(())
}

/// Renders the sweep as Touchstone text (`# HZ S RI R <z_ref>`).
pub fn render_touchstone(sweep: &SParamSweep) -> Result<String> {
    check_writable(sweep)?;
    let [z1, z2] = sweep.z_ref;
    if z1 != z2 {
        return Err(Error::Config(format!(
            "Touchstone v1 needs one reference impedance, got {z1} and {z2}"
        )));
    }
    let mut out = String::new();
    writeln!(out, "# HZ S RI R {z1}").unwrap();
    for (f, m) in sweep.frequencies.iter().zip(&sweep.s) {
        out.push_str(&sci(*f));
        for z in [m.s11(), m.s21(), m.s12(), m.s22()] {
            out.push(' ');
            out.push_str(&sci(z.re));
            out.push(' ');
            out.push_str(&sci(z.im));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_touchstone(sweep: &SParamSweep, path: &Path) -> Result<()> {
    let text = render_touchstone(sweep)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[derive(Clone, Copy)]
enum Format {
    Ri,
    Ma,
    Db,
}

fn pair(format: Format, a: f64, b: f64) -> Complex64 {
    match format {
        Format::Ri => Complex64::new(a, b),
        Format::Ma => Complex64::from_polar(a, b.to_radians()),
        Format::Db => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
    }
}

/// Parses two-port Touchstone v1 text (`RI`, `MA` or `DB`; any frequency
/// unit). `origin` only labels error messages.
pub fn parse_touchstone(text: &str, origin: &Path) -> Result<TouchstoneData> {
    let err = |line: usize, msg: String| Error::Parse {
        path: origin.to_owned(),
        line,
        msg,
    };
    let mut scale = 1e9; // GHz is the format default
    let mut format = Format::Ma;
    let mut z_ref = 50.0;
    let mut seen_option = false;
    let mut values: Vec<(usize, f64)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('!').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(opts) = line.strip_prefix('#') {
            if seen_option {
                return Err(err(line_no, "second option line".into()));
            }
            seen_option = true;
            let mut toks = opts.split_whitespace().map(|t| t.to_ascii_uppercase());
            while let Some(t) = toks.next() {
                match t.as_str() {
                    "HZ" => scale = 1.0,
                    "KHZ" => scale = 1e3,
                    "MHZ" => scale = 1e6,
                    "GHZ" => scale = 1e9,
                    "S" => {}
                    "Y" | "Z" | "G" | "H" => {
                        return Err(err(line_no, format!("unsupported parameter type {t}")))
                    }
                    "RI" => format = Format::Ri,
                    "MA" => format = Format::Ma,
                    "DB" => format = Format::Db,
                    "R" => {
                        let v = toks
                            .next()
                            .ok_or_else(|| err(line_no, "missing reference impedance".into()))?;
                        z_ref = v
                            .parse()
                            .map_err(|_| err(line_no, format!("bad reference impedance {v}")))?;
                    }
                    other => return Err(err(line_no, format!("unknown option {other}"))),
                }
            }
            continue;
        }
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| err(line_no, format!("not a number: {tok}")))?;
            values.push((line_no, v));
        }
    }

    if !values.len().is_multiple_of(9) {
        let line = values.last().map_or(0, |v| v.0);
        return Err(err(
            line,
            format!("{} values is not a multiple of 9", values.len()),
        ));
    }
    let mut frequencies = Vec::with_capacity(values.len() / 9);
    let mut s = Vec::with_capacity(values.len() / 9);
    for chunk in values.chunks(9) {
        let v: Vec<f64> = chunk.iter().map(|c| c.1).collect();
        let f = v[0] * scale;
        if let Some(&prev) = frequencies.last() {
            if f <= prev {
                return Err(err(chunk[0].0, "frequencies must ascend".into()));
            }
        }
        frequencies.push(f);
        let s11 = pair(format, v[1], v[2]);
        let s21 = pair(format, v[3], v[4]);
        let s12 = pair(format, v[5], v[6]);
        let s22 = pair(format, v[7], v[8]);
        s.push(SMatrix([[s11, s12], [s21, s22]]));
    }
    Ok(TouchstoneData {
        z_ref,
        frequencies,
        s,
    })
}

pub fn read_touchstone(path: &Path) -> Result<TouchstoneData> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_touchstone(&text, path)
}
