//! ℓ¹ bounds on `𝒞_N(0)⁻¹` and `𝒞_N(0)⁻¹𝒞̇_N` in terms of the ratio
//! `δ = max s_{r+1}/s_r`, and the analyticity radius they certify.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::{c_dot_matrix, cauchy_inverse_c0, SpectralData};
use crate::error::Result;

/// `B_δ = Π_{m≥1} (1 − δ^{4m})^{−2}`, truncated once `δ^{4m} < 1e−16`.
pub fn b_delta(delta: f64) -> f64 {
    assert!((0.0..1.0).contains(&delta), "delta must lie in [0, 1)");
    let q = delta.powi(4);
    let mut term = q;
    let mut log_sum = 0.0;
    while term >= 1e-16 {
        log_sum -= 2.0 * (-term).ln_1p();
        term *= q;
    }
    log_sum.exp()
}

/// Proof-explicit constant bounding `‖𝒞_N(0)⁻¹𝒞̇_N‖_{ℓ¹→ℓ¹}`:
/// `2 δB_δ/(1−δ²)⁴ · (1+3δ²)/(1+δ²) + 2δB_δ/((1−δ²)²(1−δ⁴))`.
pub fn a_explicit(delta: f64) -> f64 {
    let b = b_delta(delta);
    let d2 = delta * delta;
    2.0 * (delta * b / (1.0 - d2).powi(4)) * ((1.0 + 3.0 * d2) / (1.0 + d2))
        + 2.0 * delta * b / ((1.0 - d2).powi(2) * (1.0 - d2 * d2))
}

/// `2B_δ s₁/(1−δ²)³`, bounding `Σ_{j,k} |(𝒞_N(0)⁻¹)_{jk}|`.
pub fn c_delta_sum_bound(delta: f64, s1: f64) -> f64 {
    2.0 * b_delta(delta) * s1 / (1.0 - delta * delta).powi(3)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OperatorBounds {
    pub delta: f64,
    /// `Σ_{j,k} |(𝒞_N(0)⁻¹)_{jk}|`.
    pub l1_norm_c0inv_sum: f64,
    /// `‖𝒞_N(0)⁻¹𝒞̇_N‖_{ℓ¹→ℓ¹}` (max column sum).
    pub l1_norm_product: f64,
    /// [`a_explicit`]`(δ)`.
    pub bound_value: f64,
    /// [`c_delta_sum_bound`]`(δ, s₁)`.
    pub c_delta_bound: f64,
    /// `1/l1_norm_product − 1` when positive: `u_N` extends holomorphically
    /// to `|z| < 1 + certified_radius`.
    pub certified_radius: Option<f64>,
}

impl OperatorBounds {
    /// Neumann-series bound on `|u_N(z)|` for `|z|·l1_norm_product < 1`.
    pub fn neumann_bound(&self, modulus: f64) -> Option<f64> {
        let q = modulus * self.l1_norm_product;
        (q < 1.0).then(|| self.l1_norm_c0inv_sum / (1.0 - q))
    }
}

fn max_column_sum(m: &DMatrix<Complex64>) -> f64 {
    super::one_norm(m)
}

pub fn operator_bounds(d: &SpectralData) -> Result<OperatorBounds> {
    let inv = cauchy_inverse_c0(d)?;
    let product = &inv * c_dot_matrix(d)?;
    let delta = d.delta();
    let l1_norm_product = max_column_sum(&product);
    let radius = 1.0 / l1_norm_product - 1.0;
    Ok(OperatorBounds {
        delta,
        l1_norm_c0inv_sum: inv.iter().map(|x| x.norm()).sum(),
        l1_norm_product,
        bound_value: a_explicit(delta),
        c_delta_bound: c_delta_sum_bound(delta, d.s()[0]),
        certified_radius: (radius > 0.0).then_some(radius),
    })
}

/// Ratios `|(𝒞_N(0)⁻¹)_{kj}| / bound_{kj}` (row `k`, column `j`) against the
/// entrywise estimate `B_δ/(1−δ²) · s_{2j−1} · δ^{e(k,j)}` with
/// `e = 2(k−j)` below the diagonal, `0` for `j ∈ {k, k+1}` and
/// `2(j−k−1)` further right. A cell above 1 localizes a violated estimate.
pub fn entry_bound_table(d: &SpectralData) -> Result<DMatrix<f64>> {
    let inv = cauchy_inverse_c0(d)?;
    let delta = d.delta();
    let scale = b_delta(delta) / (1.0 - delta * delta);
    let n = d.n();
    Ok(DMatrix::from_fn(n, n, |k, j| {
        let exponent = if j < k {
            2 * (k - j)
        } else if j <= k + 1 {
            0
        } else {
            2 * (j - k - 1)
        };
        let bound = scale * d.rho(j) * delta.powi(exponent as i32);
        inv[(k, j)].norm() / bound
    }))
}

/// Distance from the origin to the nearest singularity of `𝒞_N(z)⁻¹`,
/// i.e. `1/max|λ|` over eigenvalues `λ` of `𝒞_N(0)⁻¹𝒞̇_N`. Infinite when
/// that matrix is nilpotent; `None` if the eigenvalue iteration fails.
pub fn pole_radius(d: &SpectralData) -> Result<Option<f64>> {
    let product = cauchy_inverse_c0(d)? * c_dot_matrix(d)?;
    let Some(eigs) = product.schur().eigenvalues() else {
        return Ok(None);
    };
    let largest = eigs.iter().map(|l| l.norm()).fold(0.0, f64::max);
    Ok(Some(if largest == 0.0 {
        f64::INFINITY
    } else {
        1.0 / largest
    }))
}
