//! CSV and JSON file formats.
//!
//! Floats are written with 17 significant digits so every value reads back
//! bit-for-bit.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hankel::HankelSpectrum;
use crate::hardy::HardyFunction;

/// CSV cell formatting with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_error(context: &str, err: impl std::fmt::Display) -> Error {
    Error::invalid(format!("{context}: {err}"))
}

#[derive(Deserialize)]
struct CoeffRow {
    n: usize,
    re: f64,
    im: f64,
}

/// Writes `n,re,im` rows.
pub fn write_coeffs_csv<W: Write>(out: W, u: &HardyFunction) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e| io_error("writing coefficients", e);
    w.write_record(["n", "re", "im"]).map_err(err)?;
    for (n, c) in u.coeffs().iter().enumerate() {
        w.write_record([n.to_string(), fmt_f64(c.re), fmt_f64(c.im)])
            .map_err(err)?;
    }
    w.flush().map_err(|e| io_error("writing coefficients", e))
}

/// Reads `n,re,im` rows; indices must run `0, 1, 2, …` without gaps.
pub fn read_coeffs_csv<R: Read>(input: R) -> Result<HardyFunction> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let mut coeffs = Vec::new();
    for (i, row) in r.deserialize::<CoeffRow>().enumerate() {
        let row = row.map_err(|e| io_error("reading coefficients", e))?;
        if row.n != i {
            return Err(Error::invalid(format!(
                "coefficient rows must be numbered 0, 1, 2, ...; row {} has n = {}",
                i + 1,
                row.n
            )));
        }
        coeffs.push(Complex64::new(row.re, row.im));
    }
    HardyFunction::from_coeffs(coeffs)
}

/// Writes `index,kind,value` rows, `kind` being `rho` or `sigma` and
/// repeated values listed once per multiplicity.
pub fn write_spectrum_csv<W: Write>(out: W, s: &HankelSpectrum) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e| io_error("writing spectrum", e);
    w.write_record(["index", "kind", "value"]).map_err(err)?;
    for (kind, values, mult) in [
        ("rho", &s.rho, &s.rho_multiplicity),
        ("sigma", &s.sigma, &s.sigma_multiplicity),
    ] {
        let expanded = values
            .iter()
            .zip(mult.iter())
            .flat_map(|(v, &m)| std::iter::repeat_n(*v, m));
        for (i, v) in expanded.enumerate() {
            w.write_record([(i + 1).to_string(), kind.to_string(), fmt_f64(v)])
                .map_err(err)?;
        }
    }
    w.flush().map_err(|e| io_error("writing spectrum", e))
}

/// Writes a header and rows of already formatted cells.
pub fn write_table<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e| io_error("writing table", e);
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row).map_err(err)?;
    }
    w.flush().map_err(|e| io_error("writing table", e))
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| io_error(&path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| io_error(&path.display().to_string(), e))
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| io_error("serializing", e))?;
    std::fs::write(path, text + "\n").map_err(|e| io_error(&path.display().to_string(), e))
}

pub fn load_coeffs_csv(path: &Path) -> Result<HardyFunction> {
    let file = File::open(path).map_err(|e| io_error(&path.display().to_string(), e))?;
    read_coeffs_csv(file)
}
