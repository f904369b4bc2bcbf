//! Toeplitz side of the geometric case: the symbol `Φ(z, ζ)`, its finite
//! sections, their uniform invertibility, and Wiener–Hopf factorization.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::fgamma::f_gamma;
use super::winding::{winding_index, SymbolGrid};
use super::GeometricParams;
use crate::error::{Error, Result};
use crate::fourier::{circle_nodes, CirclePlan};
use crate::inverse::solve_equilibrated;

/// Finite sections with `σ_min < SINGULAR_RATIO · ‖T_N‖` are singular.
pub const SINGULAR_RATIO: f64 = 1e-13;
pub const DEFAULT_RADIUS: f64 = 0.95;

/// `Φ(z, ζ) = F_γ(ζ) − zωF_γ(ζω²)`.
pub fn phi_symbol(p: &GeometricParams, z: Complex64, zeta: Complex64) -> Result<Complex64> {
    let omega = p.omega();
    Ok(f_gamma(p.gamma(), zeta)? - z * omega * f_gamma(p.gamma(), zeta * omega * omega)?)
}

/// Laurent coefficient `c_ℓ = (1 − zω^{2ℓ+1})/(1 − γ^{2ℓ+1})` of `Φ(z, ·)` on
/// the annulus `γ < |ζ| < 1`. For `ℓ < 0` the equivalent form
/// `ω̄^m (z − ω^m)/(1 − γ^m)`, `m = −(2ℓ+1)`, avoids huge intermediate powers.
pub fn symbol_coefficient(p: &GeometricParams, z: Complex64, l: i64) -> Complex64 {
    let omega = p.omega();
    let gamma = p.gamma();
    let e = 2 * l + 1;
    if e > 0 {
        let e = e as i32;
        (1.0 - z * omega.powi(e)) / (1.0 - gamma.powi(e))
    } else {
        let m = -e as i32;
        omega.conj().powi(m) * (z - omega.powi(m)) / (1.0 - gamma.powi(m))
    }
}

/// `N × N` matrix with `A[j][k] = c_{j−k}`.
pub fn toeplitz_truncated(coeff: impl Fn(i64) -> Complex64, n: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |j, k| coeff(j as i64 - k as i64))
}

/// `T_{N,r}(z)` with entries `r^{k−j} c_{k−j}`, the transpose of the finite
/// section of `ζ ↦ Φ(z, rζ)`.
pub fn geometric_toeplitz(p: &GeometricParams, z: Complex64, r: f64, n: usize) -> DMatrix<Complex64> {
    toeplitz_truncated(|l| r.powi(-l as i32) * symbol_coefficient(p, z, -l), n)
}

fn check_radius(p: &GeometricParams, r: f64) -> Result<()> {
    if r > p.gamma() && r < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "radius {r} must lie in (gamma, 1) = ({}, 1)",
            p.gamma()
        )))
    }
}

/// `u_N(z) = ⟨T_{N,r}(z)⁻¹ (r^{−j} ω̄^{2j−1}), (r^k)⟩`, `j, k = 1..N`.
pub fn u_via_toeplitz(p: &GeometricParams, z: Complex64, r: f64, n: usize) -> Result<Complex64> {
    check_radius(p, r)?;
    if n == 0 {
        return Err(Error::invalid("N must be positive"));
    }
    let t = geometric_toeplitz(p, z, r, n);
    let omega_bar = p.omega().conj();
    let rhs = DVector::from_fn(n, |j, _| {
        r.powi(-(j as i32 + 1)) * omega_bar.powi(2 * j as i32 + 1)
    });
    let x = solve_equilibrated(&t, &rhs).map_err(|e| match e {
        Error::SingularMatrix { condition, .. } => {
            let norm = t.norm();
            Error::SingularTruncation {
                n,
                smallest: norm / condition,
                norm,
            }
        }
        other => other,
    })?;
    Ok(x.iter().enumerate().map(|(k, x)| r.powi(k as i32 + 1) * x).sum())
}

/// Spectral norm of the inverse of an `N × N` section.
fn inverse_norm(t: DMatrix<Complex64>) -> Result<f64> {
    let n = t.nrows();
    let sv = t.singular_values();
    let norm = sv.max();
    let smallest = sv.min();
    if !(smallest >= SINGULAR_RATIO * norm) || norm == 0.0 {
        return Err(Error::SingularTruncation { n, smallest, norm });
    }
    Ok(1.0 / smallest)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityRow {
    pub n: usize,
    pub inv_norm: std::result::Result<f64, String>,
}

/// `‖T_N⁻¹‖₂` for each section size, from generic Laurent coefficients.
pub fn stability_scan_coeffs(coeff: impl Fn(i64) -> Complex64, sizes: &[usize]) -> Vec<StabilityRow> {
    sizes
        .iter()
        .map(|&n| StabilityRow {
            n,
            inv_norm: inverse_norm(toeplitz_truncated(&coeff, n)).map_err(|e| e.to_string()),
        })
        .collect()
}

/// `‖T_{N,r}(z)⁻¹‖₂` for each `N`; boundedness in `N` is the numerical
/// stability certificate.
pub fn stability_scan(
    p: &GeometricParams,
    z: Complex64,
    r: f64,
    sizes: &[usize],
) -> Result<Vec<StabilityRow>> {
    check_radius(p, r)?;
    Ok(sizes
        .iter()
        .map(|&n| StabilityRow {
            n,
            inv_norm: inverse_norm(geometric_toeplitz(p, z, r, n)).map_err(|e| e.to_string()),
        })
        .collect())
}

/// Index of `ζ ↦ Φ(z, rζ)` on the unit circle.
pub fn symbol_index(p: &GeometricParams, z: Complex64, r: f64) -> Result<i64> {
    winding_index(|zeta| phi_symbol(p, z, zeta), r)
}

/// Starts at `r = 0.95` and moves halfway to 1 while the symbol index is
/// nonzero, up to `attempts` times.
pub fn choose_radius(p: &GeometricParams, z: Complex64, attempts: usize) -> Result<f64> {
    let mut r = DEFAULT_RADIUS.max(0.5 * (1.0 + p.gamma()));
    for _ in 0..attempts {
        if symbol_index(p, z, r)? == 0 {
            return Ok(r);
        }
        r = 0.5 * (1.0 + r);
    }
    Err(Error::NonzeroIndex {
        index: symbol_index(p, z, r)?,
    })
}

/// Largest `|z|` on `moduli` (increasing) such that the symbol has index 0
/// and no contour zero for `|z|` up to it, tested on `angles` directions.
pub fn index_zero_radius(p: &GeometricParams, r: f64, moduli: &[f64], angles: usize) -> Result<f64> {
    check_radius(p, r)?;
    let mut best = 0.0;
    for &m in moduli {
        let ok = circle_nodes(m, angles.max(1)).all(|z| matches!(symbol_index(p, z, r), Ok(0)));
        if !ok {
            break;
        }
        best = m;
    }
    Ok(best)
}

/// Laurent coefficients of a function on the circle: `pos[n]` multiplies
/// `e^{inθ}`, `neg[m]` multiplies `e^{−imθ}` (`neg[0]` is unused and zero).
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent {
    pub pos: Vec<Complex64>,
    pub neg: Vec<Complex64>,
}

impl Laurent {
    pub fn coeff(&self, n: i64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        if n >= 0 {
            self.pos.get(n as usize).copied().unwrap_or(zero)
        } else {
            self.neg.get((-n) as usize).copied().unwrap_or(zero)
        }
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        let e = Complex64::from_polar(1.0, theta);
        let ei = e.conj();
        let p = self
            .pos
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * e + c);
        let q = self
            .neg
            .iter()
            .skip(1)
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| (acc + c) * ei);
        p + q
    }

    fn from_samples(plan: &CirclePlan, mut values: Vec<Complex64>) -> Self {
        let k = plan.len();
        plan.analyze(&mut values);
        let half = k / 2;
        let pos = values[..half].to_vec();
        let mut neg = vec![Complex64::new(0.0, 0.0); half];
        for m in 1..half {
            neg[m] = values[k - m];
        }
        Self { pos, neg }
    }
}

/// `Φ = Φ₊ Φ̄₋` on the sampled circle, with the inverse factors.
#[derive(Clone, Debug, PartialEq)]
pub struct WienerHopf {
    pub plus: Laurent,
    pub minus: Laurent,
    pub plus_inv: Laurent,
    pub minus_inv: Laurent,
}

impl WienerHopf {
    /// `T(Φ₊⁻¹) T(Φ̄₋⁻¹)` truncated to `N × N`; lower times upper
    /// triangular, so the truncation is exact for this block of `T(Φ)⁻¹`.
    pub fn inverse_section(&self, n: usize) -> DMatrix<Complex64> {
        toeplitz_truncated(|l| self.plus_inv.coeff(l), n) * toeplitz_truncated(|l| self.minus_inv.coeff(l), n)
    }
}

/// Factorizes the symbol sampled on `grid` via `log Φ = Πφ + (I−Π)φ`.
///
/// Mode 0 of `φ` goes to the analytic factor. The grid must resolve `Φ`
/// (see [`SymbolGrid::resolved`]); a grid whose argument increments reach
/// `π/2` is rejected rather than unwrapped on a guess.
pub fn wiener_hopf_factorize(grid: &SymbolGrid) -> Result<WienerHopf> {
    let (index, max_increment) = grid.raw_winding()?;
    if max_increment >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::UnresolvedPhase {
            radius: grid.radius,
            nodes: grid.nodes(),
            max_increment,
        });
    }
    if index != 0 {
        return Err(Error::NonzeroIndex { index });
    }
    let k = grid.nodes();
    let plan = CirclePlan::new(k);
    let arg = grid.unwrapped_argument();
    let mut phi: Vec<Complex64> = grid
        .values
        .iter()
        .zip(&arg)
        .map(|(v, a)| Complex64::new(v.norm().ln(), *a))
        .collect();
    plan.analyze(&mut phi);

    let zero = Complex64::new(0.0, 0.0);
    let mut plus_part = vec![zero; k];
    let mut minus_part = vec![zero; k];
    plus_part[..k / 2].copy_from_slice(&phi[..k / 2]);
    minus_part[k / 2..].copy_from_slice(&phi[k / 2..]);
    plan.synthesize(&mut plus_part);
    plan.synthesize(&mut minus_part);

    let factor = |part: &[Complex64], sign: f64| {
        Laurent::from_samples(&plan, part.iter().map(|x| (sign * x).exp()).collect())
    };
    Ok(WienerHopf {
        plus: factor(&plus_part, 1.0),
        minus: factor(&minus_part, 1.0),
        plus_inv: factor(&plus_part, -1.0),
        minus_inv: factor(&minus_part, -1.0),
    })
}

/// `max |Φ₊Φ̄₋ − Φ| / max|Φ|` at the midpoints between grid nodes.
pub fn factor_residual<F>(wh: &WienerHopf, f: F, grid: &SymbolGrid) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let k = grid.nodes();
    let step = std::f64::consts::TAU / k as f64;
    let scale = grid.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for i in 0..k {
        let theta = (i as f64 + 0.5) * step;
        let exact = f(Complex64::from_polar(grid.radius, theta))?;
        let product = wh.plus.eval(theta) * wh.minus.eval(theta);
        worst = worst.max((product - exact).norm());
    }
    Ok(worst / scale)
}

/// `max |(T_N(Φ) · T_N(Φ₊⁻¹)T_N(Φ̄₋⁻¹) − I)_{jk}|` over the interior block
/// `N/4 ≤ j, k < 3N/4`, where truncation effects from the edges are absent.
pub fn interior_inverse_residual(wh: &WienerHopf, coeff: impl Fn(i64) -> Complex64, n: usize) -> f64 {
    let t = toeplitz_truncated(coeff, n);
    let product = t * wh.inverse_section(n);
    let mut worst: f64 = 0.0;
    for j in n / 4..3 * n / 4 {
        for k in n / 4..3 * n / 4 {
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((product[(j, k)] - target).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn symbol_at_origin_is_f_gamma() {
        let p = GeometricParams::new(LN_2, 0.3).unwrap();
        let zeta = Complex64::from_polar(0.6, 1.0);
        let want = f_gamma(p.gamma(), zeta).unwrap();
        assert!((phi_symbol(&p, c(0.0, 0.0), zeta).unwrap() - want).norm() < 1e-15);
    }

    #[test]
    fn coefficient_closed_form() {
        let p = GeometricParams::new(LN_2, 0.5).unwrap();
        let z = c(0.4, -0.3);
        let c0 = symbol_coefficient(&p, z, 0);
        assert!((c0 - (1.0 - z * p.omega()) / (1.0 - p.gamma())).norm() < 1e-15);
        // Both branches agree where the naive formula is still accurate.
        let naive = |l: i32| (1.0 - z * p.omega().powi(2 * l + 1)) / (1.0 - p.gamma().powi(2 * l + 1));
        for l in -4..0 {
            assert!((symbol_coefficient(&p, z, l as i64) - naive(l)).norm() < 1e-12);
        }
    }

    #[test]
    fn coefficients_match_contour_quadrature() {
        let p = GeometricParams::new(1.0, 0.5).unwrap();
        let z = c(0.5, 0.2);
        let r = 0.7;
        let grid = SymbolGrid::sample(|zeta| phi_symbol(&p, z, zeta), r, 1024).unwrap();
        let mut coeffs = grid.values.clone();
        CirclePlan::new(1024).analyze(&mut coeffs);
        for l in -6i64..=6 {
            let idx = l.rem_euclid(1024) as usize;
            let want = symbol_coefficient(&p, z, l) * r.powi(l as i32);
            assert!((coeffs[idx] - want).norm() < 1e-10, "l = {l}");
        }
    }

    #[test]
    fn toeplitz_layout() {
        let id = toeplitz_truncated(|l| if l == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) }, 4);
        assert_eq!(id, DMatrix::identity(4, 4));
        let shift = toeplitz_truncated(|l| if l == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) }, 3);
        assert_eq!(shift[(1, 0)], c(1.0, 0.0));
        assert_eq!(shift[(0, 1)], c(0.0, 0.0));
        let p = GeometricParams::new(LN_2, 0.0).unwrap();
        let t = geometric_toeplitz(&p, c(0.3, 0.0), 0.9, 3);
        let want = 0.9f64.powi(2) * symbol_coefficient(&p, c(0.3, 0.0), 2);
        assert!((t[(0, 2)] - want).norm() < 1e-15);
    }

    #[test]
    fn single_mode_route() {
        let p = GeometricParams::new(LN_2, 0.4).unwrap();
        let d = p.spectral_data(1);
        for z in [c(0.0, 0.0), c(0.5, -0.1)] {
            let a = u_via_toeplitz(&p, z, 0.8, 1).unwrap();
            let b = crate::inverse::reconstruct_point(&d, z).unwrap();
            assert!((a - b).norm() < 1e-13);
        }
        assert!(u_via_toeplitz(&p, c(0.0, 0.0), 0.2, 3)
            .unwrap_err()
            .is_validation());
    }

    #[test]
    fn stability_of_trivial_and_shift_symbols() {
        let rows = stability_scan_coeffs(|l| if l == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) }, &[4, 16]);
        assert!(rows
            .iter()
            .all(|r| (r.inv_norm.clone().unwrap() - 1.0).abs() < 1e-12));
        let rows = stability_scan_coeffs(|l| if l == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) }, &[4, 16]);
        assert!(rows.iter().all(|r| r.inv_norm.is_err()));
    }

    #[test]
    fn factorization_of_simple_symbols() {
        let grid = SymbolGrid::sample(|_| Ok(c(1.0, 0.0)), 1.0, 256).unwrap();
        let wh = wiener_hopf_factorize(&grid).unwrap();
        assert!((wh.plus.coeff(0) - 1.0).norm() < 1e-14 && (wh.minus.coeff(0) - 1.0).norm() < 1e-14);

        let a = c(0.3, 0.4);
        let grid = SymbolGrid::sample(|zeta| Ok(1.0 - a * zeta), 1.0, 256).unwrap();
        let wh = wiener_hopf_factorize(&grid).unwrap();
        assert!((wh.plus.coeff(0) - 1.0).norm() < 1e-14);
        assert!((wh.plus.coeff(1) + a).norm() < 1e-14);
        assert!(wh.plus.pos[2..].iter().all(|x| x.norm() < 1e-14));
        assert!((wh.minus.coeff(0) - 1.0).norm() < 1e-14);
        assert!(wh.minus.neg.iter().all(|x| x.norm() < 1e-14));

        let grid = SymbolGrid::sample(Ok, 1.0, 256).unwrap();
        assert!(matches!(
            wiener_hopf_factorize(&grid),
            Err(Error::NonzeroIndex { index: 1 })
        ));
    }
}
