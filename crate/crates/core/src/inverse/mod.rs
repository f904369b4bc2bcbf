//! Inverse spectral transform: from action-angle data `(s_r, ψ_r)` back to
//! `u(z) = ⟨𝒞_N(z)⁻¹ 𝟏, 𝟏⟩`, plus the Cauchy-matrix machinery built on it.

mod bounds;
mod cauchy;

pub use bounds::{
    a_explicit, b_delta, c_delta_sum_bound, entry_bound_table, operator_bounds, pole_radius, OperatorBounds,
};
pub use cauchy::{
    c1_closed_form, c1_lower_bound, c1_summands, cauchy_inverse_c0, cauchy_ones_solve, C1LowerBound,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::HardyFunction;

/// Relative threshold on `|s_{2j-1}² − s_{2k}²|` below which the spectrum
/// is treated as degenerate.
pub const EPS_DEN: f64 = 1e-13;
/// Ceiling on the (row-equilibrated) 1-norm condition number of a solve.
pub const EPS_COND: f64 = 1e12;
/// Angles within this distance of `0 mod 2π` count as zero.
pub const ANGLE_ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralPair {
    pub s: f64,
    pub psi: f64,
}

/// Action-angle coordinates `(s_r, ψ_r)`, `r = 1..2N`, with `s` strictly
/// decreasing and positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectralData", into = "RawSpectralData")]
pub struct SpectralData {
    pairs: Vec<SpectralPair>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectralData {
    pairs: Vec<SpectralPair>,
}

impl TryFrom<RawSpectralData> for SpectralData {
    type Error = Error;

    fn try_from(raw: RawSpectralData) -> Result<Self> {
        SpectralData::new(raw.pairs)
    }
}

impl From<SpectralData> for RawSpectralData {
    fn from(d: SpectralData) -> Self {
        RawSpectralData { pairs: d.pairs }
    }
}

impl SpectralData {
    pub fn new(pairs: Vec<SpectralPair>) -> Result<Self> {
        if pairs.is_empty() || !pairs.len().is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "spectral data needs a positive even number of pairs, got {}",
                pairs.len()
            )));
        }
        for (i, p) in pairs.iter().enumerate() {
            if !(p.s.is_finite() && p.s > 0.0) {
                return Err(Error::invalid(format!(
                    "s_{} = {} is not a positive number",
                    i + 1,
                    p.s
                )));
            }
            if !p.psi.is_finite() {
                return Err(Error::invalid(format!("psi_{} is not finite", i + 1)));
            }
        }
        if let Some(i) = pairs.windows(2).position(|w| w[1].s >= w[0].s) {
            return Err(Error::invalid(format!(
                "strict decrease violated at r={}: s_{} = {} >= s_{} = {}",
                i + 2,
                i + 2,
                pairs[i + 1].s,
                i + 1,
                pairs[i].s
            )));
        }
        Ok(Self { pairs })
    }

    pub fn from_parts(s: &[f64], psi: &[f64]) -> Result<Self> {
        if s.len() != psi.len() {
            return Err(Error::invalid("s and psi lists differ in length"));
        }
        Self::new(
            s.iter()
                .zip(psi)
                .map(|(&s, &psi)| SpectralPair { s, psi })
                .collect(),
        )
    }

    /// All angles zero.
    pub fn with_zero_angles(s: &[f64]) -> Result<Self> {
        Self::from_parts(s, &vec![0.0; s.len()])
    }

    pub fn pairs(&self) -> &[SpectralPair] {
        &self.pairs
    }

    /// Number `N` of `(ρ, σ)` pairs.
    pub fn n(&self) -> usize {
        self.pairs.len() / 2
    }

    pub fn s(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.s).collect()
    }

    pub fn psi(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.psi).collect()
    }

    /// `ρ_{j+1} = s_{2j+1}` for zero-based `j`.
    pub fn rho(&self, j: usize) -> f64 {
        self.pairs[2 * j].s
    }

    /// `σ_{k+1} = s_{2k+2}` for zero-based `k`.
    pub fn sigma(&self, k: usize) -> f64 {
        self.pairs[2 * k + 1].s
    }

    pub fn rhos(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.rho(j)).collect()
    }

    pub fn sigmas(&self) -> Vec<f64> {
        (0..self.n()).map(|k| self.sigma(k)).collect()
    }

    /// `s_{2j-1} e^{iψ_{2j-1}}`.
    fn odd_phasor(&self, j: usize) -> Complex64 {
        let p = self.pairs[2 * j];
        Complex64::from_polar(p.s, p.psi)
    }

    /// `s_{2k} e^{iψ_{2k}}`.
    fn even_phasor(&self, k: usize) -> Complex64 {
        let p = self.pairs[2 * k + 1];
        Complex64::from_polar(p.s, p.psi)
    }

    /// `max_r s_{r+1}/s_r`.
    pub fn delta(&self) -> f64 {
        self.pairs.windows(2).map(|w| w[1].s / w[0].s).fold(0.0, f64::max)
    }

    pub fn with_angles(&self, psi: &[f64]) -> Result<Self> {
        Self::from_parts(&self.s(), psi)
    }

    /// Multiplies every `s_r` by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let s: Vec<f64> = self.s().iter().map(|s| s * factor).collect();
        Self::from_parts(&s, &self.psi())
    }

    /// Fails with `AnglesNotZero` unless every `ψ_r ≡ 0 mod 2π`.
    pub fn require_zero_angles(&self) -> Result<()> {
        for (i, p) in self.pairs.iter().enumerate() {
            let wrapped = p.psi.rem_euclid(std::f64::consts::TAU);
            if wrapped.min(std::f64::consts::TAU - wrapped) > ANGLE_ZERO_TOL {
                return Err(Error::AnglesNotZero {
                    index: i + 1,
                    value: p.psi,
                });
            }
        }
        Ok(())
    }

    /// `s_{2j-1}² − s_{2k}²`, checked against the degeneracy threshold.
    fn denominator(&self, j: usize, k: usize) -> Result<f64> {
        let a = self.rho(j).powi(2);
        let b = self.sigma(k).powi(2);
        let gap = a - b;
        let threshold = EPS_DEN * a.max(b);
        if gap.abs() < threshold {
            return Err(Error::DegenerateSpectrum {
                odd: 2 * j + 1,
                even: 2 * k + 2,
                gap: gap.abs(),
                threshold,
            });
        }
        Ok(gap)
    }
}

/// `𝒞_N(z)` evaluated at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    pub z: Complex64,
    pub entries: DMatrix<Complex64>,
}

/// `𝒞_N(z)_{jk} = (s_{2j-1}e^{iψ_{2j-1}} − z s_{2k}e^{iψ_{2k}}) / (s_{2j-1}² − s_{2k}²)`.
pub fn build_c_matrix(d: &SpectralData, z: Complex64) -> Result<CMatrix> {
    let n = d.n();
    let mut entries = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            entries[(j, k)] = (d.odd_phasor(j) - z * d.even_phasor(k)) / d.denominator(j, k)?;
        }
    }
    Ok(CMatrix { z, entries })
}

/// `𝒞̇_N = (s_{2k}e^{iψ_{2k}} / (s_{2j-1}² − s_{2k}²))`, so that
/// `𝒞_N(z) = 𝒞_N(0) − z𝒞̇_N`.
pub fn c_dot_matrix(d: &SpectralData) -> Result<DMatrix<Complex64>> {
    let n = d.n();
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            out[(j, k)] = d.even_phasor(k) / d.denominator(j, k)?;
        }
    }
    Ok(out)
}

/// Solves `A x = b` by partial-pivoted LU after scaling every row of the
/// system to unit max-norm. The condition check applies to the scaled
/// matrix, which is what governs the accuracy of `x`.
pub(crate) fn solve_equilibrated(
    a: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
) -> Result<DVector<Complex64>> {
    let n = a.nrows();
    let mut a = a.clone();
    let mut b = b.clone();
    for i in 0..n {
        let scale = a.row(i).iter().map(|x| x.norm()).fold(0.0, f64::max);
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::SingularMatrix {
                condition: f64::INFINITY,
                limit: EPS_COND,
            });
        }
        a.row_mut(i).scale_mut(1.0 / scale);
        b[i] /= scale;
    }
    let lu = a.clone().lu();
    let inverse = lu.try_inverse().ok_or(Error::SingularMatrix {
        condition: f64::INFINITY,
        limit: EPS_COND,
    })?;
    let condition = one_norm(&a) * one_norm(&inverse);
    if !(condition <= EPS_COND) {
        return Err(Error::SingularMatrix {
            condition,
            limit: EPS_COND,
        });
    }
    lu.solve(&b).ok_or(Error::SingularMatrix {
        condition,
        limit: EPS_COND,
    })
}

pub(crate) fn one_norm(a: &DMatrix<Complex64>) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `u_N(z) = ⟨𝒞_N(z)⁻¹ 𝟏, 𝟏⟩` (bilinear pairing).
pub fn reconstruct_point(d: &SpectralData, z: Complex64) -> Result<Complex64> {
    let c = build_c_matrix(d, z)?;
    let ones = DVector::from_element(d.n(), Complex64::new(1.0, 0.0));
    Ok(solve_equilibrated(&c.entries, &ones)?.sum())
}

/// Sampling radius used by [`reconstruct_function`]: the `M`-th coefficient
/// is amplified by at most ~100 when dividing out `r^n`.
pub fn reconstruction_radius(modes: usize) -> f64 {
    if modes <= 1 {
        return crate::hardy::DEFAULT_EXTRACTION_RADIUS;
    }
    100f64
        .powf(-1.0 / (modes as f64 - 1.0))
        .clamp(crate::hardy::DEFAULT_EXTRACTION_RADIUS, 0.999)
}

/// First `modes` Taylor coefficients of `u_N`.
pub fn reconstruct_function(d: &SpectralData, modes: usize) -> Result<HardyFunction> {
    // Fail on degenerate data before sampling.
    build_c_matrix(d, Complex64::new(0.0, 0.0))?;
    let radius = reconstruction_radius(modes);
    let u = HardyFunction::try_from_disc_samples(|z| reconstruct_point(d, z), radius, modes)?;
    // Finite data yields a rational function holomorphic across the circle.
    HardyFunction::from_coeffs(u.into_coeffs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn pair1(psi1: f64, psi2: f64) -> SpectralData {
        SpectralData::from_parts(&[1.0, 0.5], &[psi1, psi2]).unwrap()
    }

    #[test]
    fn validation_messages() {
        let err = SpectralData::with_zero_angles(&[1.0, 0.5, 0.5, 0.1]).unwrap_err();
        assert!(
            err.to_string().contains("strict decrease violated at r=3"),
            "{err}"
        );
        assert!(SpectralData::with_zero_angles(&[1.0, 0.5, 0.2]).is_err());
        assert!(SpectralData::with_zero_angles(&[1.0, -0.5]).is_err());
        assert!(SpectralData::with_zero_angles(&[]).is_err());
        let parsed: std::result::Result<SpectralData, _> =
            serde_json::from_str(r#"{"pairs":[{"s":0.5,"psi":0},{"s":1.0,"psi":0}]}"#);
        assert!(parsed.is_err());
        let extra: std::result::Result<SpectralData, _> =
            serde_json::from_str(r#"{"pairs":[{"s":1.0,"psi":0,"x":1},{"s":0.5,"psi":0}]}"#);
        assert!(extra.is_err());
    }

    #[test]
    fn c_matrix_single_pair() {
        let z = Complex64::new(0.3, -0.2);
        let m = build_c_matrix(&pair1(0.0, 0.0), z).unwrap();
        assert!((m.entries[(0, 0)] - (1.0 - 0.5 * z) / 0.75).norm() < 1e-15);
    }

    #[test]
    fn c_matrix_at_origin_and_row_phases() {
        let d = SpectralData::with_zero_angles(&[1.0, 0.8, 0.5, 0.3]).unwrap();
        let m = build_c_matrix(&d, c(0.0)).unwrap();
        for j in 0..2 {
            for k in 0..2 {
                let want = d.rho(j) / (d.rho(j).powi(2) - d.sigma(k).powi(2));
                assert!((m.entries[(j, k)] - c(want)).norm() < 1e-14);
            }
        }
        // Odd angles rotate C(0) entrywise.
        let alpha = 0.7;
        let rotated = d.with_angles(&[alpha, 0.0, alpha, 0.0]).unwrap();
        let b0 = build_c_matrix(&rotated, c(0.0)).unwrap().entries;
        let phase = Complex64::from_polar(1.0, alpha);
        assert!((b0 - m.entries.map(|x| phase * x)).norm() < 1e-14);

        let z = Complex64::new(0.4, 0.1);
        let a = build_c_matrix(&d, z).unwrap().entries;
        let dot = c_dot_matrix(&d).unwrap();
        assert!((a - (m.entries - dot * z)).norm() < 1e-14);
    }

    #[test]
    fn degenerate_denominator_is_rejected() {
        let s = [1.0, 1.0 - 1e-15];
        let d = SpectralData::with_zero_angles(&s).unwrap();
        assert!(matches!(
            build_c_matrix(&d, c(0.0)),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn reconstruct_point_examples() {
        assert!((reconstruct_point(&pair1(0.0, 0.0), c(0.0)).unwrap() - c(0.75)).norm() < 1e-15);
        assert!((reconstruct_point(&pair1(0.0, 0.0), c(0.5)).unwrap() - c(1.0)).norm() < 1e-15);
        assert!((reconstruct_point(&pair1(PI, 0.0), c(0.0)).unwrap() - c(-0.75)).norm() < 1e-15);
    }

    #[test]
    fn reconstruct_function_geometric() {
        let u = reconstruct_function(&pair1(0.0, 0.0), 64).unwrap();
        for n in 0..64 {
            assert!(
                (u.coeff(n) - c(0.75 * 0.5f64.powi(n as i32))).norm() < 1e-12,
                "mode {n}"
            );
        }
    }

    #[test]
    fn reconstruction_is_homogeneous() {
        let d = SpectralData::from_parts(&[0.9, 0.6, 0.3, 0.1], &[0.2, 1.0, -0.4, 2.0]).unwrap();
        let u = reconstruct_function(&d, 64).unwrap();
        let v = reconstruct_function(&d.scaled(2.5).unwrap(), 64).unwrap();
        for n in 0..64 {
            assert!((v.coeff(n) - 2.5 * u.coeff(n)).norm() < 1e-11, "mode {n}");
        }
    }

    #[test]
    fn zero_angles_give_nonnegative_coefficients() {
        let d = SpectralData::with_zero_angles(&[1.0, 0.7, 0.4, 0.2, 0.1, 0.03]).unwrap();
        let u = reconstruct_function(&d, 128).unwrap();
        for (n, x) in u.coeffs().iter().enumerate() {
            assert!(
                x.re >= -crate::hardy::TAU_POS && x.im.abs() <= crate::hardy::TAU_POS,
                "mode {n}: {x}"
            );
        }
    }

    #[test]
    fn global_phase_rotates_u() {
        let d = SpectralData::from_parts(&[1.0, 0.6, 0.35, 0.1], &[0.3, -1.2, 2.0, 0.5]).unwrap();
        let alpha = 1.1;
        let shifted: Vec<f64> = d.psi().iter().map(|p| p + alpha).collect();
        let e = d.with_angles(&shifted).unwrap();
        for z in [c(0.0), Complex64::new(0.3, 0.6), Complex64::new(-0.9, 0.1)] {
            let a = reconstruct_point(&d, z).unwrap();
            let b = reconstruct_point(&e, z).unwrap();
            assert!((a.norm() - b.norm()).abs() < 1e-12);
            assert!((b - Complex64::from_polar(1.0, -alpha) * a).norm() < 1e-12);
        }
    }

    #[test]
    fn radius_choice() {
        assert_eq!(reconstruction_radius(1), 0.75);
        assert_eq!(reconstruction_radius(8), 0.75);
        let r = reconstruction_radius(256);
        assert!(r > 0.98 && r < 0.99 && r.powi(-255) <= 100.0 + 1e-9);
    }
}
