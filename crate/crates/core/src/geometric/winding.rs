//! Winding numbers of sampled closed curves `θ ↦ f(r e^{iθ})`.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use serde::Serialize;

use super::fgamma::f_gamma;
use crate::error::{Error, Result};
use crate::fourier::circle_nodes;

/// Contour samples below `EPS_ZERO · max|f|` count as a zero on the contour.
pub const EPS_ZERO: f64 = 1e-9;
pub const MIN_NODES: usize = 256;
/// Refinement stops here with `UnresolvedPhase`.
pub const MAX_NODES: usize = 1 << 22;

/// Values of a function on `K` equispaced nodes of the circle `|ζ| = r`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolGrid {
    pub radius: f64,
    pub values: Vec<Complex64>,
}

impl SymbolGrid {
    /// Samples `f` at `r e^{2πik/K}`; `K` must be a power of two ≥ 256.
    pub fn sample<F>(f: F, radius: f64, nodes: usize) -> Result<Self>
    where
        F: Fn(Complex64) -> Result<Complex64>,
    {
        if !nodes.is_power_of_two() || nodes < MIN_NODES {
            return Err(Error::invalid(format!(
                "node count {nodes} must be a power of two of at least {MIN_NODES}"
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("radius {radius} must be positive")));
        }
        let values = circle_nodes(radius, nodes).map(f).collect::<Result<Vec<_>>>()?;
        Ok(Self { radius, values })
    }

    /// Doubles `K` from 256 until the Fourier coefficients of the samples
    /// in the upper half of the resolved band are negligible, so the grid
    /// resolves the function to roundoff.
    pub fn resolved<F>(f: F, radius: f64) -> Result<Self>
    where
        F: Fn(Complex64) -> Result<Complex64>,
    {
        let mut nodes = MIN_NODES;
        loop {
            let grid = Self::sample(&f, radius, nodes)?;
            let mut coeffs = grid.values.clone();
            crate::fourier::CirclePlan::new(nodes).analyze(&mut coeffs);
            let peak = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
            let tail = coeffs[nodes / 4..3 * nodes / 4]
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
            if tail <= 1e-15 * peak || nodes >= MAX_NODES {
                return Ok(grid);
            }
            nodes *= 2;
        }
    }

    pub fn nodes(&self) -> usize {
        self.values.len()
    }

    fn check_zeros(&self) -> Result<()> {
        let peak = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let min_modulus = self.values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
        if !(min_modulus > EPS_ZERO * peak) {
            return Err(Error::ZeroOnContour {
                radius: self.radius,
                min_modulus,
            });
        }
        Ok(())
    }

    /// Principal-branch argument increments between consecutive samples,
    /// closing the loop.
    pub fn increments(&self) -> Vec<f64> {
        let k = self.values.len();
        (0..k)
            .map(|i| (self.values[(i + 1) % k] / self.values[i]).arg())
            .collect()
    }

    /// `(1/2π) Σ Δarg` on this grid alone, with the largest increment.
    pub fn raw_winding(&self) -> Result<(i64, f64)> {
        self.check_zeros()?;
        let inc = self.increments();
        let max_increment = inc.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let total: f64 = inc.iter().sum();
        Ok(((total / TAU).round() as i64, max_increment))
    }

    /// Continuous argument along the grid, starting in `(−π, π]`.
    pub fn unwrapped_argument(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.values.len());
        let mut arg = self.values[0].arg();
        out.push(arg);
        for w in self.values.windows(2) {
            arg += (w[1] / w[0]).arg();
            out.push(arg);
        }
        out
    }
}

/// Winding number of `θ ↦ f(r e^{iθ})` around 0.
///
/// The node count doubles until every argument increment is below `π/2`
/// and two successive resolutions give the same index.
pub fn winding_index<F>(f: F, radius: f64) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut nodes = MIN_NODES;
    let mut previous: Option<i64> = None;
    loop {
        let grid = SymbolGrid::sample(&f, radius, nodes)?;
        let (index, max_increment) = grid.raw_winding()?;
        if max_increment < FRAC_PI_2 {
            if previous == Some(index) {
                return Ok(index);
            }
            previous = Some(index);
        } else {
            previous = None;
        }
        if nodes >= MAX_NODES {
            return Err(Error::UnresolvedPhase {
                radius,
                nodes,
                max_increment,
            });
        }
        nodes *= 2;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndexSample {
    pub radius: f64,
    /// Winding number of `ζ ↦ F_γ(Rζ)`, or the failed check's name.
    pub index: std::result::Result<i64, String>,
}

/// Winding numbers of `ζ ↦ F_γ(Rζ)` on `|ζ| = 1` for each `R`.
pub fn index_profile(gamma: f64, radii: &[f64]) -> Vec<IndexSample> {
    radii
        .iter()
        .map(|&radius| IndexSample {
            radius,
            index: winding_index(|z| f_gamma(gamma, z), radius).map_err(|e| e.to_string()),
        })
        .collect()
}

/// Zero counts of `F_γ` read off the index jumps across `|ζ| = γ` and
/// `|ζ| = 1` (the pole circles `γ^{2ℓ}` only carry the real pole).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZeroCensus {
    /// Zeros on `|ζ| = γ`.
    pub on_inner: i64,
    /// Zeros in `γ < |ζ| < 1`.
    pub in_annulus: i64,
    /// Zeros on `|ζ| = 1`.
    pub on_unit: i64,
}

pub fn zero_census(gamma: f64) -> Result<ZeroCensus> {
    let eps = 1e-3_f64.min((1.0 - gamma) / 4.0);
    let index = |r: f64| winding_index(|z| f_gamma(gamma, z), r);
    let below_inner = index(gamma * (1.0 - eps))?;
    let above_inner = index(gamma * (1.0 + eps))?;
    let below_unit = index(1.0 - eps)?;
    let above_unit = index(1.0 + eps)?;
    // Crossing a circle changes the index by (zeros − poles) on it; the
    // unit circle carries exactly one simple pole, at ζ = 1.
    Ok(ZeroCensus {
        on_inner: above_inner - below_inner,
        in_annulus: below_unit - above_inner,
        on_unit: above_unit - below_unit + 1,
    })
}

/// True when `radius` is at least `margin` (relative) away from every
/// circle `|ζ| = γ^k`, `k ∈ ℤ`, which carry the poles (even `k`) and the
/// zeros (odd `k`) of `F_γ`.
pub fn clear_of_circles(gamma: f64, radius: f64, margin: f64) -> bool {
    let k = radius.ln() / gamma.ln();
    let nearest = gamma.powf(k.round());
    (radius - nearest).abs() > margin * nearest
}
