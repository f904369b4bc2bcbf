//! JSON run files: one command and its parameters, e.g.
//!
//! ```json
//! {"command": "flow", "data": "pair.json", "T": 1.0, "dt": 1e-3, "M": 128, "out": "results"}
//! ```
//!
//! Relative paths resolve against the config file's directory. `out` names
//! a directory; file-producing commands write a fixed file name inside it.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;
use szego_core::io::load_json;
use szego_core::{Error, Result};

use crate::commands::{Command, DataArgs, FlowArgs, GeometricArgs, ReconstructArgs, SpectrumArgs};

#[derive(Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Reconstruct,
    Spectrum,
    Flow,
    FlowCompare,
    Certify,
    Geometric,
    C1,
}

#[derive(Deserialize, Debug, Clone)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    pub data: Option<PathBuf>,
    pub coeffs: Option<PathBuf>,
    #[serde(rename = "M")]
    pub modes: Option<usize>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub dt: Option<f64>,
    pub samples: Option<usize>,
    pub h: Option<f64>,
    pub theta: Option<f64>,
    pub r: Option<f64>,
    pub z: Option<[f64; 2]>,
    pub out: Option<PathBuf>,
}

fn required<T>(value: Option<T>, key: &str, command: CommandKind) -> Result<T> {
    value.ok_or_else(|| Error::invalid(format!("config for {command:?} needs \"{key}\"")))
}

pub fn load(path: &Path) -> Result<Command> {
    let cfg: RunConfig = load_json(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    into_command(cfg, base)
}

pub fn into_command(cfg: RunConfig, base: &Path) -> Result<Command> {
    let kind = cfg.command;
    let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
    let data = || required(cfg.data.clone(), "data", kind).map(resolve);
    let out_file = |name: &str| cfg.out.clone().map(|dir| resolve(dir).join(name));
    if let Some(dir) = &cfg.out {
        if kind != CommandKind::Geometric {
            let dir = resolve(dir.clone());
            std::fs::create_dir_all(&dir).map_err(|e| Error::invalid(format!("{}: {e}", dir.display())))?;
        }
    }
    let flow_args = || -> Result<FlowArgs> {
        Ok(FlowArgs {
            data: data()?,
            t: required(cfg.t, "T", kind)?,
            dt: cfg.dt.unwrap_or(1e-3),
            modes: cfg.modes.unwrap_or(128),
            samples: cfg.samples.unwrap_or(10),
            out: out_file("trajectory.csv"),
        })
    };
    Ok(match kind {
        CommandKind::Reconstruct => Command::Reconstruct(ReconstructArgs {
            data: data()?,
            modes: cfg.modes.unwrap_or(256),
            out: out_file("coeffs.csv"),
        }),
        CommandKind::Spectrum => Command::Spectrum(SpectrumArgs {
            coeffs: resolve(required(cfg.coeffs.clone(), "coeffs", kind)?),
            modes: cfg.modes.unwrap_or(64),
            out: out_file("spectrum.csv"),
        }),
        CommandKind::Flow => Command::Flow(flow_args()?),
        CommandKind::FlowCompare => Command::FlowCompare(flow_args()?),
        CommandKind::Certify => Command::Certify(DataArgs { data: data()? }),
        CommandKind::C1 => Command::C1(DataArgs { data: data()? }),
        CommandKind::Geometric => Command::Geometric(GeometricArgs {
            h: required(cfg.h, "h", kind)?,
            theta: cfg.theta.unwrap_or(0.0),
            z: cfg
                .z
                .map_or(Complex64::new(1.0, 0.0), |[re, im]| Complex64::new(re, im)),
            r: cfg.r,
            n_max: cfg.n.unwrap_or(20),
            out: cfg.out.clone().map(resolve),
        }),
    })
}
