use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use szego_core::flow::{compare_flows, conservation_report, integrate};
use szego_core::geometric::{
    choose_radius, index_profile, stability_scan, u_via_toeplitz, zero_gap, GeometricParams,
};
use szego_core::inverse::{c1_closed_form, c1_lower_bound, operator_bounds};
use szego_core::io::{
    fmt_f64, load_coeffs_csv, load_json, write_coeffs_csv, write_spectrum_csv, write_table,
};
use szego_core::{
    pair_singular_values, reconstruct_function, reconstruct_point, Error, Result, SpectralData,
};

use crate::{config, sweep};

#[derive(Parser, Debug)]
#[command(
    name = "szego-lab",
    version,
    about = "Numerical experiments on the cubic Szegő equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Taylor coefficients of u from spectral data.
    Reconstruct(ReconstructArgs),
    /// Singular values of the Hankel operators of u.
    Spectrum(SpectrumArgs),
    /// Integrate the flow and report conserved quantities.
    Flow(FlowArgs),
    /// L² distance between the integrated flow and the angle flow at T.
    FlowCompare(FlowArgs),
    /// ℓ¹ operator bounds for the inverse transform.
    Certify(DataArgs),
    /// Toeplitz diagnostics for geometric data.
    Geometric(GeometricArgs),
    /// Closed-form C¹ norm and its lower bounds (zero angles).
    C1(DataArgs),
    /// Parameter sweep written as one CSV.
    Sweep(sweep::SweepArgs),
    /// Run a command described by a JSON config file.
    Run(RunArgs),
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// Spectral data JSON: {"pairs": [{"s": .., "psi": ..}, ..]}.
    #[arg(long)]
    pub data: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, visible_alias = "M", default_value_t = 256)]
    pub modes: usize,
    /// Coefficient CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SpectrumArgs {
    /// Coefficient CSV with columns n,re,im.
    #[arg(long)]
    pub coeffs: PathBuf,
    #[arg(long, visible_alias = "M", default_value_t = 64)]
    pub modes: usize,
    /// Spectrum CSV (index,kind,value).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct FlowArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long = "T")]
    pub t: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, visible_alias = "M", default_value_t = 128)]
    pub modes: usize,
    /// Recorded intervals of the run.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    /// Trajectory CSV (t,mass,h_half_norm,sv_drift_max); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct GeometricArgs {
    #[arg(long)]
    pub h: f64,
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    /// Evaluation point as RE,IM.
    #[arg(long, default_value = "1,0", value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: Complex64,
    /// Weight radius; picked automatically when absent.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long = "N-max", default_value_t = 20)]
    pub n_max: usize,
    /// Directory for the CSV reports; everything goes to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
}

pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected RE,IM, got {s:?}"))?;
    let part = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok(Complex64::new(part(re)?, part(im)?))
}

pub fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Reconstruct(a) => reconstruct(&a),
        Command::Spectrum(a) => spectrum(&a),
        Command::Flow(a) => flow(&a),
        Command::FlowCompare(a) => flow_compare(&a),
        Command::Certify(a) => certify(&a),
        Command::Geometric(a) => geometric(&a),
        Command::C1(a) => c1(&a),
        Command::Sweep(a) => sweep::run(&a),
        Command::Run(a) => dispatch(config::load(&a.config)?),
    }
}

pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| Error::invalid(format!("{}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn write_err(e: std::io::Error) -> Error {
    Error::invalid(format!("writing output: {e}"))
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} = {value} must be positive")))
    }
}

fn nonzero(name: &str, value: usize) -> Result<()> {
    if value == 0 {
        return Err(Error::invalid(format!("{name} must be at least 1")));
    }
    Ok(())
}

fn reconstruct(a: &ReconstructArgs) -> Result<()> {
    nonzero("modes", a.modes)?;
    let d: SpectralData = load_json(&a.data)?;
    let u = reconstruct_function(&d, a.modes)?;
    write_coeffs_csv(output(a.out.as_deref())?, &u)
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:?}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn spectrum(a: &SpectrumArgs) -> Result<()> {
    nonzero("M", a.modes)?;
    let u = load_coeffs_csv(&a.coeffs)?;
    let s = pair_singular_values(&u, a.modes)?;
    match &a.out {
        Some(path) => write_spectrum_csv(output(Some(path))?, &s),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "rho={}", join(&s.rho)).map_err(write_err)?;
            writeln!(out, "sigma={}", join(&s.sigma)).map_err(write_err)
        }
    }
}

fn check_flow_args(a: &FlowArgs) -> Result<SpectralData> {
    nonzero("modes", a.modes)?;
    positive("dt", a.dt)?;
    if !(a.t >= 0.0 && a.t.is_finite()) {
        return Err(Error::invalid(format!("T = {} must be nonnegative", a.t)));
    }
    load_json(&a.data)
}

fn flow(a: &FlowArgs) -> Result<()> {
    let d = check_flow_args(a)?;
    let u0 = reconstruct_function(&d, a.modes)?;
    let report = conservation_report(&integrate(&u0, a.t, a.dt, a.modes, a.samples)?)?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.t),
                fmt_f64(r.mass),
                fmt_f64(r.h_half_norm),
                fmt_f64(r.sv_drift),
            ]
        })
        .collect();
    write_table(
        output(a.out.as_deref())?,
        &["t", "mass", "h_half_norm", "sv_drift_max"],
        &rows,
    )
}

fn flow_compare(a: &FlowArgs) -> Result<()> {
    let d = check_flow_args(a)?;
    let gap = compare_flows(&d, a.t, a.dt, a.modes)?;
    println!("discrepancy={gap:?}");
    Ok(())
}

fn certify(a: &DataArgs) -> Result<()> {
    let d: SpectralData = load_json(&a.data)?;
    let b = operator_bounds(&d)?;
    let radius = b
        .certified_radius
        .map_or("none".to_string(), |r| format!("{r:?}"));
    println!("delta={:?}", b.delta);
    println!("l1_norm_c0inv_sum={:?}", b.l1_norm_c0inv_sum);
    println!("l1_norm_product={:?}", b.l1_norm_product);
    println!("bound_value={:?}", b.bound_value);
    println!("c_delta_bound={:?}", b.c_delta_bound);
    println!("certified_radius={radius}");
    Ok(())
}

fn c1(a: &DataArgs) -> Result<()> {
    let d: SpectralData = load_json(&a.data)?;
    let closed = c1_closed_form(&d)?;
    let bounds = c1_lower_bound(&d)?;
    println!(
        "closed_form={closed:?} lower_bound={:?} eq4_bound={:?}",
        bounds.lower_bound, bounds.eq4_bound
    );
    Ok(())
}

/// Radii spread over `(γ², γ⁻²)` in log scale.
fn profile_radii(gamma: f64) -> Vec<f64> {
    (0..16)
        .map(|i| gamma.powf(-1.9 + 3.8 * (i as f64 + 0.5) / 16.0))
        .collect()
}

/// Name, header and rows of one CSV report.
type Table<'a> = (&'a str, &'a [&'a str], &'a [Vec<String>]);

fn error_cell(e: &Error) -> String {
    format!("{}: {e}", e.name())
}

fn geometric(a: &GeometricArgs) -> Result<()> {
    let p = GeometricParams::new(a.h, a.theta)?;
    nonzero("N-max", a.n_max)?;
    if !(a.z.re.is_finite() && a.z.im.is_finite()) {
        return Err(Error::invalid("z must be finite"));
    }
    let r = match a.r {
        Some(r) => r,
        None => choose_radius(&p, a.z, 8)?,
    };
    let gamma = p.gamma();

    let header_profile = ["R", "index", "error"];
    let profile: Vec<Vec<String>> = index_profile(gamma, &profile_radii(gamma))
        .into_iter()
        .map(|s| match s.index {
            Ok(i) => vec![fmt_f64(s.radius), i.to_string(), String::new()],
            Err(e) => vec![fmt_f64(s.radius), String::new(), e],
        })
        .collect();

    let step = (a.n_max / 50).max(1);
    let sizes: Vec<usize> = (1..=a.n_max).step_by(step).collect();
    let header_stability = ["N", "inv_norm", "error"];
    let stability: Vec<Vec<String>> = stability_scan(&p, a.z, r, &sizes)?
        .into_iter()
        .map(|row| match row.inv_norm {
            Ok(v) => vec![row.n.to_string(), fmt_f64(v), String::new()],
            Err(e) => vec![row.n.to_string(), String::new(), e],
        })
        .collect();

    let g = zero_gap(gamma)?;
    let header_gap = ["gamma", "min_unit", "max_inner_scaled", "gap", "poisson_bound"];
    let gap = vec![vec![
        fmt_f64(g.gamma),
        fmt_f64(g.min_unit),
        fmt_f64(g.max_inner_scaled),
        fmt_f64(g.gap),
        fmt_f64(g.poisson_bound),
    ]];

    let header_routes = [
        "N",
        "toeplitz_re",
        "toeplitz_im",
        "cauchy_re",
        "cauchy_im",
        "difference",
        "error",
    ];
    let routes: Vec<Vec<String>> = (1..=a.n_max)
        .map(|n| {
            match (
                u_via_toeplitz(&p, a.z, r, n),
                reconstruct_point(&p.spectral_data(n), a.z),
            ) {
                (Ok(t), Ok(c)) => vec![
                    n.to_string(),
                    fmt_f64(t.re),
                    fmt_f64(t.im),
                    fmt_f64(c.re),
                    fmt_f64(c.im),
                    fmt_f64((t - c).norm()),
                    String::new(),
                ],
                (Err(e), _) | (_, Err(e)) => {
                    let mut row = vec![n.to_string()];
                    row.extend(std::iter::repeat_n(String::new(), 5));
                    row.push(error_cell(&e));
                    row
                }
            }
        })
        .collect();

    let tables: [Table; 4] = [
        ("index_profile", &header_profile, &profile),
        ("stability", &header_stability, &stability),
        ("gap", &header_gap, &gap),
        ("routes", &header_routes, &routes),
    ];
    match &a.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::invalid(format!("{}: {e}", dir.display())))?;
            for (name, header, rows) in tables {
                write_table(output(Some(&dir.join(format!("{name}.csv"))))?, header, rows)?;
            }
            println!("r={r:?}");
        }
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "r={r:?}").map_err(write_err)?;
            for (name, header, rows) in tables {
                writeln!(out, "\n# {name}").map_err(write_err)?;
                write_table(&mut out, header, rows)?;
            }
        }
    }
    Ok(())
}
