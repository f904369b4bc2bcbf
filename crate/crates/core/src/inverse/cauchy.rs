//! Closed-form inverses of the Cauchy-type matrices `𝒞_N(0)` and `𝒞(1)`,
//! and the closed-form `C¹` quantity they lead to.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{SpectralData, EPS_DEN};
use crate::error::{Error, Result};

/// Accumulates a product of real factors as (sign, log|·|), so long
/// products of tiny gaps neither underflow nor overflow.
#[derive(Clone, Copy, Debug)]
struct LogProduct {
    negative: bool,
    log_abs: f64,
}

impl LogProduct {
    const ONE: Self = Self {
        negative: false,
        log_abs: 0.0,
    };

    fn mul(self, x: f64) -> Self {
        Self {
            negative: self.negative ^ (x < 0.0),
            log_abs: self.log_abs + x.abs().ln(),
        }
    }

    fn div(self, x: f64) -> Self {
        Self {
            negative: self.negative ^ (x < 0.0),
            log_abs: self.log_abs - x.abs().ln(),
        }
    }

    fn times(self, other: Self) -> Self {
        Self {
            negative: self.negative ^ other.negative,
            log_abs: self.log_abs + other.log_abs,
        }
    }

    fn value(self) -> f64 {
        let m = self.log_abs.exp();
        if self.negative {
            -m
        } else {
            m
        }
    }
}

fn checked_gap(d: &SpectralData, j: usize, k: usize) -> Result<f64> {
    d.denominator(j, k)
}

/// Gap between two entries of the same strictly decreasing list of squares.
fn same_kind_gap(a: f64, b: f64, odd: usize, even: usize) -> Result<f64> {
    let gap = a - b;
    let threshold = EPS_DEN * a.abs().max(b.abs());
    if gap.abs() < threshold {
        return Err(Error::DegenerateSpectrum {
            odd,
            even,
            gap: gap.abs(),
            threshold,
        });
    }
    Ok(gap)
}

/// `𝒞_N(0)⁻¹` from its product formula. Row index `k`, column index `j`:
///
/// `(𝒞_N(0)⁻¹)_{kj} = (−1)^{j+k+N+1} α_j β_k / ((A_j − B_k) s_{2j−1} e^{iψ_{2j−1}})`
///
/// with `A_j = s_{2j−1}²`, `B_k = s_{2k}²` and
///
/// `α_j = Π_ℓ(A_j − B_ℓ) / (Π_{ℓ<j}(A_ℓ − A_j) Π_{ℓ>j}(A_j − A_ℓ))`,
/// `β_k = Π_ℓ(A_ℓ − B_k) / (Π_{ℓ<k}(B_ℓ − B_k) Π_{ℓ>k}(B_k − B_ℓ))`.
pub fn cauchy_inverse_c0(d: &SpectralData) -> Result<DMatrix<Complex64>> {
    let n = d.n();
    let a: Vec<f64> = d.rhos().iter().map(|x| x * x).collect();
    let b: Vec<f64> = d.sigmas().iter().map(|x| x * x).collect();

    let mut alpha = vec![LogProduct::ONE; n];
    let mut beta = vec![LogProduct::ONE; n];
    for j in 0..n {
        let mut p = LogProduct::ONE;
        for l in 0..n {
            p = p.mul(checked_gap(d, j, l)?);
        }
        for l in 0..n {
            if l < j {
                p = p.div(same_kind_gap(a[l], a[j], 2 * l + 1, 2 * j + 1)?);
            } else if l > j {
                p = p.div(same_kind_gap(a[j], a[l], 2 * j + 1, 2 * l + 1)?);
            }
        }
        alpha[j] = p;
    }
    for k in 0..n {
        let mut p = LogProduct::ONE;
        for l in 0..n {
            p = p.mul(checked_gap(d, l, k)?);
        }
        for l in 0..n {
            if l < k {
                p = p.div(same_kind_gap(b[l], b[k], 2 * l + 2, 2 * k + 2)?);
            } else if l > k {
                p = p.div(same_kind_gap(b[k], b[l], 2 * k + 2, 2 * l + 2)?);
            }
        }
        beta[k] = p;
    }

    let mut out = DMatrix::zeros(n, n);
    for k in 0..n {
        for j in 0..n {
            // One-based j + k + N + 1 has the parity of zero-based j + k + N + 1.
            let parity_negative = (j + k + n + 1) % 2 == 1;
            let mut p = alpha[j].times(beta[k]).div(a[j] - b[k]).div(d.rho(j));
            p.negative ^= parity_negative;
            let phase = Complex64::from_polar(1.0, -d.pairs()[2 * j].psi);
            out[(k, j)] = phase * p.value();
        }
    }
    Ok(out)
}

fn require_interlacing(rho: &[f64], sigma: &[f64]) -> Result<()> {
    if rho.is_empty() || rho.len() != sigma.len() {
        return Err(Error::invalid(format!(
            "need equally many rho and sigma values, got {} and {}",
            rho.len(),
            sigma.len()
        )));
    }
    let merged: Vec<f64> = rho.iter().zip(sigma).flat_map(|(&r, &s)| [r, s]).collect();
    if merged.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::invalid("rho and sigma must be positive and finite"));
    }
    for (i, w) in merged.windows(2).enumerate() {
        let threshold = EPS_DEN * w[0];
        if w[0] - w[1] < threshold {
            return Err(Error::DegenerateSpectrum {
                odd: i + 1,
                even: i + 2,
                gap: w[0] - w[1],
                threshold,
            });
        }
    }
    Ok(())
}

/// Solutions of `𝒞(1)x = 𝟏` and `𝒞(1)ᵀy = 𝟏` for `𝒞(1)_{jk} = 1/(ρ_j + σ_k)`:
///
/// `x_k = Π_j(ρ_j + σ_k) / Π_{ℓ≠k}(σ_k − σ_ℓ)`,
/// `y_j = Π_ℓ(ρ_j + σ_ℓ) / Π_{i≠j}(ρ_j − ρ_i)`.
pub fn cauchy_ones_solve(rho: &[f64], sigma: &[f64]) -> Result<(DVector<f64>, DVector<f64>)> {
    require_interlacing(rho, sigma)?;
    let n = rho.len();
    let x = DVector::from_fn(n, |k, _| {
        let mut p = LogProduct::ONE;
        for r in rho {
            p = p.mul(r + sigma[k]);
        }
        for (l, s) in sigma.iter().enumerate() {
            if l != k {
                p = p.div(sigma[k] - s);
            }
        }
        p.value()
    });
    let y = DVector::from_fn(n, |j, _| {
        let mut p = LogProduct::ONE;
        for s in sigma {
            p = p.mul(rho[j] + s);
        }
        for (i, r) in rho.iter().enumerate() {
            if i != j {
                p = p.div(rho[j] - r);
            }
        }
        p.value()
    });
    Ok((x, y))
}

/// Terms `σ_k Π_j (ρ_j + σ_k)/(ρ_j − σ_k) Π_{ℓ≠k} (σ_k + σ_ℓ)/(σ_ℓ − σ_k)`
/// of the closed form for `Σ n û(n)` when every angle vanishes. Each term
/// is positive for interlaced data; a non-positive one is reported as an
/// error rather than summed.
pub fn c1_summands(d: &SpectralData) -> Result<Vec<f64>> {
    d.require_zero_angles()?;
    let rho = d.rhos();
    let sigma = d.sigmas();
    require_interlacing(&rho, &sigma)?;
    let terms: Vec<f64> = (0..d.n())
        .map(|k| {
            let sk = sigma[k];
            let mut p = LogProduct::ONE.mul(sk);
            for r in &rho {
                p = p.mul(r + sk).div(r - sk);
            }
            for (l, s) in sigma.iter().enumerate() {
                if l != k {
                    p = p.mul(sk + s).div(s - sk);
                }
            }
            p.value()
        })
        .collect();
    if let Some((k, &v)) = terms.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
        return Err(Error::NonPositiveSummand {
            index: k + 1,
            value: v,
        });
    }
    Ok(terms)
}

pub fn c1_closed_form(d: &SpectralData) -> Result<f64> {
    Ok(c1_summands(d)?.iter().sum())
}

/// The two elementary lower bounds for `Σ n û(n)`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct C1LowerBound {
    /// `Σ_k σ_k (ρ_k + σ_k)/(ρ_k − σ_k)`.
    pub lower_bound: f64,
    /// `Σ_j ρ_j σ_j/(ρ_j − σ_j)`.
    pub eq4_bound: f64,
}

pub fn c1_lower_bound(d: &SpectralData) -> Result<C1LowerBound> {
    let mut lower_bound = 0.0;
    let mut eq4_bound = 0.0;
    for k in 0..d.n() {
        let (r, s) = (d.rho(k), d.sigma(k));
        checked_gap(d, k, k)?;
        lower_bound += s * (r + s) / (r - s);
        eq4_bound += r * s / (r - s);
    }
    Ok(C1LowerBound {
        lower_bound,
        eq4_bound,
    })
}
