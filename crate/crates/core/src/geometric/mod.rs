//! Totally geometric data `s_r = e^{−rh}`, `ψ_r = rθh`, for which the
//! inverse transform reduces to a Toeplitz problem with symbol built from
//! `F_γ`, `γ = e^{−2h}`.

mod fgamma;
mod toeplitz;
mod winding;

pub use fgamma::{
    check_functional_equations, elliptic_check, f_gamma, f_gamma_theta, f_gamma_truncated, fhat_closed_form,
    g_tau, inner_circle_modulus, poisson_bound, truncation, unit_circle_modulus, zero_gap, EllipticReport,
    ZeroGap, EPS_POLE,
};
pub use toeplitz::wiener_hopf_factorize;
pub use toeplitz::{
    choose_radius, factor_residual, geometric_toeplitz, index_zero_radius, interior_inverse_residual,
    phi_symbol, stability_scan, stability_scan_coeffs, symbol_coefficient, symbol_index, toeplitz_truncated,
    u_via_toeplitz, Laurent, StabilityRow, WienerHopf, DEFAULT_RADIUS, SINGULAR_RATIO,
};
pub use winding::{
    clear_of_circles, index_profile, winding_index, zero_census, IndexSample, SymbolGrid, ZeroCensus,
    EPS_ZERO,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inverse::{SpectralData, SpectralPair};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricParams {
    h: f64,
    theta: f64,
}

impl GeometricParams {
    pub fn new(h: f64, theta: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::invalid(format!("h = {h} must be positive")));
        }
        if !theta.is_finite() {
            return Err(Error::invalid("theta must be finite"));
        }
        Ok(Self { h, theta })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `ω = e^{−h(1−iθ)}`.
    pub fn omega(&self) -> Complex64 {
        Complex64::from_polar((-self.h).exp(), self.h * self.theta)
    }

    /// `γ = e^{−2h} = |ω|²`.
    pub fn gamma(&self) -> f64 {
        (-2.0 * self.h).exp()
    }

    /// The lattice parameter `τ = 2h/π` with `γ = e^{−πτ}`.
    pub fn tau(&self) -> f64 {
        2.0 * self.h / std::f64::consts::PI
    }

    /// `2N` pairs `(e^{−rh}, rθh)`.
    pub fn spectral_data(&self, n: usize) -> SpectralData {
        let pairs = (1..=2 * n)
            .map(|r| SpectralPair {
                s: (-(r as f64) * self.h).exp(),
                psi: r as f64 * self.theta * self.h,
            })
            .collect();
        SpectralData::new(pairs).expect("geometric actions are strictly decreasing")
    }
}

/// [`GeometricParams::spectral_data`] as a free function.
pub fn geometric_spectral_data(p: &GeometricParams, n: usize) -> SpectralData {
    p.spectral_data(n)
}
