//! The meromorphic function `F_γ(ζ) = Σ_{ℓ∈ℤ} γ^ℓ / (1 − ζγ^{2ℓ})`, its
//! zero/pole structure, and the real closed forms used to separate its
//! modulus on `|ζ| = 1` from that on `|ζ| = γ`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Relative distance to a pole `γ^{2ℓ}` below which evaluation is refused.
pub const EPS_POLE: f64 = 1e-6;
/// Tail tolerance for the truncated two-sided sum.
pub const SERIES_TOL: f64 = 1e-17;

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("gamma = {gamma} must lie in (0, 1)")))
    }
}

/// Base truncation `L = ⌈log(tol(1−γ))/log γ⌉ + 4`.
pub fn truncation(gamma: f64) -> usize {
    ((SERIES_TOL * (1.0 - gamma)).ln() / gamma.ln()).ceil() as usize + 4
}

/// `F_γ(ζ)` with the default truncation.
pub fn f_gamma(gamma: f64, zeta: Complex64) -> Result<Complex64> {
    f_gamma_truncated(gamma, zeta, 0)
}

/// `F_γ(ζ)` keeping `extra` more terms on each side than the default.
///
/// With `|ζ| = γ^{2a}` the terms with `ℓ ≥ 0` only start decaying once
/// `ℓ > −a`, and those with `ℓ < 0` once `|ℓ| > a`, so each side is
/// lengthened by that offset. Negative indices use the rearranged term
/// `γ^m / (γ^{2m} − ζ)`, `m = −ℓ`, which stays bounded.
pub fn f_gamma_truncated(gamma: f64, zeta: Complex64, extra: usize) -> Result<Complex64> {
    check_gamma(gamma)?;
    check_poles(gamma, zeta)?;
    let a = zeta.norm().ln() / (2.0 * gamma.ln());
    let base = truncation(gamma) + extra;
    let positive = base + (-a).ceil().max(0.0) as usize;
    let negative = base + a.ceil().max(0.0) as usize;

    let mut sum = Complex64::new(0.0, 0.0);
    let mut g = 1.0;
    for _ in 0..=positive {
        sum += g / (1.0 - zeta * (g * g));
        g *= gamma;
    }
    let mut g = gamma;
    for _ in 1..=negative {
        sum += g / (g * g - zeta);
        g *= gamma;
    }
    Ok(sum)
}

/// Fails with `NearPole` if `ζ` is within relative distance [`EPS_POLE`] of
/// some pole `γ^{2ℓ}`, or is zero (where the poles accumulate).
fn check_poles(gamma: f64, zeta: Complex64) -> Result<()> {
    let modulus = zeta.norm();
    if !(modulus > 0.0 && modulus.is_finite()) {
        return Err(Error::NearPole {
            re: zeta.re,
            im: zeta.im,
            pole: 0.0,
            distance: modulus,
        });
    }
    let a = modulus.ln() / (2.0 * gamma.ln());
    for k in [a.floor(), a.ceil()] {
        let pole = gamma.powf(2.0 * k);
        let distance = (zeta - pole).norm() / pole;
        if distance < EPS_POLE {
            return Err(Error::NearPole {
                re: zeta.re,
                im: zeta.im,
                pole,
                distance,
            });
        }
    }
    Ok(())
}

/// Residuals `|F(1/ζ) + ζF(ζ)|` and `|F(ζ/γ²) − γF(ζ)|`.
pub fn check_functional_equations(gamma: f64, zeta: Complex64) -> Result<(f64, f64)> {
    let f = f_gamma(gamma, zeta)?;
    let inv = f_gamma(gamma, zeta.inv())?;
    let shifted = f_gamma(gamma, zeta / (gamma * gamma))?;
    Ok(((inv + zeta * f).norm(), (shifted - gamma * f).norm()))
}

/// `|F_γ(e^{iθ})| = |sin(θ/2)| [1/(1−cos θ) + 2Σ_{ℓ≥1} γ^ℓ(1+γ^{2ℓ})/(1+γ^{4ℓ}−2γ^{2ℓ}cos θ)]`.
pub fn unit_circle_modulus(gamma: f64, theta: f64) -> f64 {
    let c = theta.cos();
    let mut sum = 1.0 / (1.0 - c);
    let mut g = gamma;
    while g > 1e-18 {
        let g2 = g * g;
        sum += 2.0 * g * (1.0 + g2) / (1.0 + g2 * g2 - 2.0 * g2 * c);
        g *= gamma;
    }
    (0.5 * theta).sin().abs() * sum
}

/// `|F_γ(γe^{iφ})| = 2|sin(φ/2)| Σ_{ℓ≥0} γ^ℓ(1+γ^{2ℓ+1})/(1+γ^{4ℓ+2}−2γ^{2ℓ+1}cos φ)`.
pub fn inner_circle_modulus(gamma: f64, phi: f64) -> f64 {
    let c = phi.cos();
    let mut sum = 0.0;
    let mut g = 1.0;
    while g > 1e-18 {
        let q = g * g * gamma;
        sum += g * (1.0 + q) / (1.0 + q * q - 2.0 * q * c);
        g *= gamma;
    }
    2.0 * (0.5 * phi).sin().abs() * sum
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZeroGap {
    pub gamma: f64,
    /// `min_{|ζ|=1} |F_γ(ζ)|`.
    pub min_unit: f64,
    /// `γ^{1/2} max_{|ζ|=γ} |F_γ(ζ)|`.
    pub max_inner_scaled: f64,
    pub gap: f64,
    pub poisson_bound: f64,
}

const GAP_GRID: usize = 4096;

/// Golden-section minimisation of `f` on `[lo, hi]`.
fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-13 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Minimum of `f` over `(0, π]` by a uniform grid and golden-section
/// refinement around the best node.
fn grid_min(f: impl Fn(f64) -> f64) -> f64 {
    let step = PI / GAP_GRID as f64;
    let (best, value) = (1..=GAP_GRID)
        .map(|i| (i, f(i as f64 * step)))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let lo = (best as f64 - 1.0) * step;
    let hi = ((best as f64 + 1.0) * step).min(PI);
    let lo = lo.max(1e-3 * step);
    let (_, refined) = golden_min(&f, lo, hi);
    value.min(refined)
}

/// Separation between `|F_γ|` on the unit circle and (scaled) on `|ζ| = γ`,
/// with the Poisson-summation bound that the separation must exceed.
/// Both moduli are even in the angle, so only `(0, π]` is scanned.
pub fn zero_gap(gamma: f64) -> Result<ZeroGap> {
    check_gamma(gamma)?;
    let min_unit = grid_min(|t| unit_circle_modulus(gamma, t));
    let max_inner = -grid_min(|t| -inner_circle_modulus(gamma, t));
    let max_inner_scaled = gamma.sqrt() * max_inner;
    Ok(ZeroGap {
        gamma,
        min_unit,
        max_inner_scaled,
        gap: min_unit - max_inner_scaled,
        poisson_bound: poisson_bound(gamma),
    })
}

/// `(π/|log γ|) Σ_{n≥1} 1/cosh(π²n/log γ)`.
pub fn poisson_bound(gamma: f64) -> f64 {
    let l = gamma.ln();
    let mut sum = 0.0;
    for n in 1.. {
        let term = 1.0 / (PI * PI * n as f64 / l).cosh();
        sum += term;
        if term < 1e-18 {
            break;
        }
    }
    PI / l.abs() * sum
}

/// `f_{γ,θ}(x) = |sin(θ/2)| γ^x(1+γ^{2x})/(1+γ^{4x}−2γ^{2x}cos θ)`.
pub fn f_gamma_theta(gamma: f64, theta: f64, x: f64) -> f64 {
    let g = gamma.powf(x);
    let g2 = g * g;
    (0.5 * theta).sin().abs() * g * (1.0 + g2) / (1.0 + g2 * g2 - 2.0 * g2 * theta.cos())
}

/// Fourier transform `∫ f_{γ,θ}(x) e^{−ixξ} dx`:
/// `(π/(2|log γ|)) cosh((π−θ)ξ/(2 log γ)) / cosh(πξ/(2 log γ))`, `θ ∈ (0, 2π)`.
pub fn fhat_closed_form(gamma: f64, theta: f64, xi: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if !(theta > 0.0 && theta < TAU) {
        return Err(Error::invalid(format!("angle {theta} must lie in (0, 2π)")));
    }
    let l = gamma.ln();
    // cosh(a)/cosh(b) = e^{|a|−|b|}(1+e^{−2|a|})/(1+e^{−2|b|}) avoids overflow.
    let a = ((PI - theta) * xi / (2.0 * l)).abs();
    let b = (PI * xi / (2.0 * l)).abs();
    let ratio = (a - b).exp() * (1.0 + (-2.0 * a).exp()) / (1.0 + (-2.0 * b).exp());
    Ok(PI / (2.0 * l.abs()) * ratio)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EllipticReport {
    pub tau: f64,
    /// `max |G(w+1) − G(w)|` over the sample grid.
    pub period_real: f64,
    /// `max |G(w+iτ) − G(w)|` over the sample grid.
    pub period_imag: f64,
    /// `|w²G(w) + 1/(4π²)|` at `w = pole_offset`.
    pub pole_residual: f64,
    pub pole_offset: f64,
    /// `|G(iτ/2)|`.
    pub zero_value: f64,
}

/// `G_τ(w) = e^{2πiw} F_γ(e^{2πiw})²` with `γ = e^{−πτ}`.
pub fn g_tau(tau: f64, w: Complex64) -> Result<Complex64> {
    let zeta = (Complex64::new(0.0, TAU) * w).exp();
    let f = f_gamma((-PI * tau).exp(), zeta)?;
    Ok(zeta * f * f)
}

/// Periodicity, double-pole and zero checks for `G_τ` on a grid of `w`
/// avoiding the lattice `ℤ + iτℤ`.
pub fn elliptic_check(tau: f64) -> Result<EllipticReport> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::invalid(format!("tau = {tau} must be positive")));
    }
    let mut period_real: f64 = 0.0;
    let mut period_imag: f64 = 0.0;
    for a in 1..8 {
        for b in 1..8 {
            // Offsets by 1/16 keep samples away from the lattice points.
            let w = Complex64::new(a as f64 / 8.0 - 1.0 / 16.0, tau * (b as f64 / 8.0 - 1.0 / 16.0));
            let g = g_tau(tau, w)?;
            let scale = g.norm().max(1.0);
            period_real = period_real.max((g_tau(tau, w + 1.0)? - g).norm() / scale);
            period_imag = period_imag.max((g_tau(tau, w + Complex64::new(0.0, tau))? - g).norm() / scale);
        }
    }
    let pole_offset = 1e-3;
    let w = Complex64::new(pole_offset, 0.0);
    let pole_residual = (w * w * g_tau(tau, w)? + 1.0 / (4.0 * PI * PI)).norm();
    let zero_value = g_tau(tau, Complex64::new(0.0, tau / 2.0))?.norm();
    Ok(EllipticReport {
        tau,
        period_real,
        period_imag,
        pole_residual,
        pole_offset,
        zero_value,
    })
}
