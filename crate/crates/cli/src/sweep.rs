use std::path::PathBuf;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use szego_core::geometric::zero_gap;
use szego_core::inverse::operator_bounds;
use szego_core::io::{fmt_f64, write_table};
use szego_core::{Error, Result, SpectralData};

use crate::commands::output;

pub const THREADS_VAR: &str = "SZEGO_LAB_THREADS";

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum SweepKind {
    /// `zero_gap` over a γ grid.
    Gamma,
    /// `operator_bounds` for `s_r = δ^{r−1}` over a δ grid.
    Delta,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub kind: SweepKind,
    /// Comma list `0.1,0.3` or inclusive range `START:STOP:STEP`; may be empty.
    #[arg(long, default_value = "")]
    pub values: String,
    /// Pair count for delta sweeps.
    #[arg(long = "N", default_value_t = 10)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::invalid(format!("grid value {s:?}: {e}")))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
            if !(step > 0.0 && step.is_finite() && start.is_finite() && stop.is_finite()) {
                return Err(Error::invalid(format!("bad range {spec:?}")));
            }
            let count = ((stop - start) / step + 1e-9).floor();
            if count < 0.0 {
                return Ok(Vec::new());
            }
            Ok((0..=count as usize).map(|i| start + i as f64 * step).collect())
        }
        [_] => spec.split(',').map(number).collect(),
        _ => Err(Error::invalid(format!("bad grid {spec:?}"))),
    }
}

type RowFn = Box<dyn Fn(f64) -> Vec<String> + Sync>;

fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|e| Error::invalid(format!("{THREADS_VAR}={v:?}: {e}"))),
        Err(_) => Ok(None),
    }
}

fn error_row(width: usize, e: &Error) -> Vec<String> {
    let mut row = vec![String::new(); width];
    row.push(format!("{}: {e}", e.name()));
    row
}

fn gamma_row(gamma: f64) -> Vec<String> {
    let mut row = vec![fmt_f64(gamma)];
    match zero_gap(gamma) {
        Ok(g) => {
            row.extend([g.min_unit, g.max_inner_scaled, g.gap, g.poisson_bound].map(fmt_f64));
            row.push(String::new());
        }
        Err(e) => row.extend(error_row(4, &e)),
    }
    row
}

fn delta_row(delta: f64, n: usize) -> Vec<String> {
    let mut row = vec![fmt_f64(delta), n.to_string()];
    let s: Vec<f64> = (0..2 * n).map(|r| delta.powi(r as i32)).collect();
    let bounds = SpectralData::with_zero_angles(&s).and_then(|d| operator_bounds(&d));
    match bounds {
        Ok(b) => {
            row.extend(
                [
                    b.l1_norm_c0inv_sum,
                    b.l1_norm_product,
                    b.bound_value,
                    b.c_delta_bound,
                ]
                .map(fmt_f64),
            );
            row.push(b.certified_radius.map(fmt_f64).unwrap_or_default());
            row.push(String::new());
        }
        Err(e) => row.extend(error_row(5, &e)),
    }
    row
}

pub fn run(args: &SweepArgs) -> Result<()> {
    if args.n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    let mut grid = parse_grid(&args.values)?;
    grid.sort_by(f64::total_cmp);
    let n = args.n;
    let (header, row): (&[&str], RowFn) = match args.kind {
        SweepKind::Gamma => (
            &[
                "gamma",
                "min_unit",
                "max_inner_scaled",
                "gap",
                "poisson_bound",
                "error",
            ],
            Box::new(gamma_row),
        ),
        SweepKind::Delta => (
            &[
                "delta",
                "N",
                "l1_norm_c0inv_sum",
                "l1_norm_product",
                "bound_value",
                "c_delta_bound",
                "certified_radius",
                "error",
            ],
            Box::new(move |d| delta_row(d, n)),
        ),
    };
    // Rows are independent; collect keeps grid order whatever the schedule.
    let rows: Vec<Vec<String>> = match thread_cap()? {
        Some(0) => grid.iter().map(|&x| row(x)).collect(),
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(|| grid.par_iter().map(|&x| row(x)).collect()),
        None => grid.par_iter().map(|&x| row(x)).collect(),
    };
    write_table(output(args.out.as_deref())?, header, &rows)
}
