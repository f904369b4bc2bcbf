//! Direct spectral transform: truncated Hankel matrices `(û(n+p))` and
//! `(û(n+p+1))`, the singular values `ρ_j` of `H_u` and `σ_k` of `K_u`, and
//! checks of the trace and rank-one identities linking them to `u`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hardy::HardyFunction;

/// Eigenvalues of the Gram matrices below this fraction of `ρ₁²` are zero.
pub const TAU_RANK: f64 = 1e-12;
/// Singular values closer than `TAU_EIG·ρ₁` are merged; interlacing is
/// checked up to the same slack.
pub const TAU_EIG: f64 = 1e-9;
/// Largest admissible ratio of discarded to total `H^{1/2}` trace.
pub const TAIL_RATIO_LIMIT: f64 = 1e-10;

/// `A[n][p] = û(n+p)` for `0 ≤ n, p < m`.
pub fn hankel_matrix(u: &HardyFunction, m: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(m, m, |n, p| u.coeff(n + p))
}

/// `A[n][p] = û(n+p+1)`.
pub fn shifted_hankel_matrix(u: &HardyFunction, m: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(m, m, |n, p| u.coeff(n + p + 1))
}

/// Distinct singular values of the pair `(H_u, K_u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HankelSpectrum {
    /// Decreasing singular values of `Γ_û`.
    pub rho: Vec<f64>,
    /// Decreasing singular values of `Γ̃_û`.
    pub sigma: Vec<f64>,
    pub rho_multiplicity: Vec<usize>,
    pub sigma_multiplicity: Vec<usize>,
    pub truncation_m: usize,
    /// `Σ_{n≥M} (1+n)|û(n)|²` over the supplied coefficients.
    pub tail_mass: f64,
}

impl HankelSpectrum {
    /// Interleaved list `s_{2j-1} = ρ_j`, `s_{2k} = σ_k`.
    pub fn merged(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(self.rho.len() + self.sigma.len());
        for r in 0..self.rho.len().max(self.sigma.len()) {
            s.extend(self.rho.get(r));
            s.extend(self.sigma.get(r));
        }
        s
    }

    /// Largest violation of `ρ₁ ≥ σ₁ ≥ ρ₂ ≥ …`, relative to `ρ₁`. Also counts
    /// a list-length mismatch that interlacing forbids (`#σ ∈ {#ρ−1, #ρ}`).
    pub fn interlacing_defect(&self) -> f64 {
        let Some(&top) = self.rho.first() else {
            return if self.sigma.is_empty() { 0.0 } else { f64::INFINITY };
        };
        if self.sigma.len() > self.rho.len() || self.sigma.len() + 1 < self.rho.len() {
            return f64::INFINITY;
        }
        self.merged()
            .windows(2)
            .map(|w| (w[1] - w[0]).max(0.0) / top)
            .fold(0.0, f64::max)
    }

    pub fn is_interlaced(&self) -> bool {
        self.interlacing_defect() <= TAU_EIG
    }

    /// `Σ ρ_j²` counted with multiplicity, i.e. `Tr(H_u²)`.
    pub fn trace_h_squared(&self) -> f64 {
        weighted_square_sum(&self.rho, &self.rho_multiplicity)
    }

    /// `Σ σ_k²` counted with multiplicity, i.e. `Tr(K_u²)`.
    pub fn trace_k_squared(&self) -> f64 {
        weighted_square_sum(&self.sigma, &self.sigma_multiplicity)
    }
}

fn weighted_square_sum(values: &[f64], mult: &[usize]) -> f64 {
    values.iter().zip(mult).map(|(v, &m)| m as f64 * v * v).sum()
}

/// Singular values of the `m × m` sections of `Γ_û` and `Γ̃_û`, via the
/// Hermitian Gram matrices `ΓΓ*` and `Γ̃Γ̃*`.
pub fn pair_singular_values(u: &HardyFunction, m: usize) -> Result<HankelSpectrum> {
    if m == 0 {
        return Err(Error::invalid("Hankel truncation must be at least 1"));
    }
    let weight = |(n, c): (usize, &Complex64)| (1.0 + n as f64) * c.norm_sqr();
    let total: f64 = u.coeffs().iter().enumerate().map(weight).sum();
    let tail_mass: f64 = u.coeffs().iter().enumerate().skip(m).map(weight).sum();
    if total > 0.0 && tail_mass / total >= TAIL_RATIO_LIMIT {
        return Err(Error::InsufficientTruncation {
            modes: m,
            ratio: tail_mass / total,
            limit: TAIL_RATIO_LIMIT,
        });
    }

    let h = hankel_matrix(u, m);
    let k = shifted_hankel_matrix(u, m);
    let h_eig = gram_eigenvalues(&h);
    let k_eig = gram_eigenvalues(&k);

    let scale = h_eig.first().copied().unwrap_or(0.0).max(0.0);
    let (rho, rho_multiplicity) = distinct_singular_values(&h_eig, scale);
    let (sigma, sigma_multiplicity) = distinct_singular_values(&k_eig, scale);
    Ok(HankelSpectrum {
        rho,
        sigma,
        rho_multiplicity,
        sigma_multiplicity,
        truncation_m: m,
        tail_mass,
    })
}

/// Eigenvalues of `A A*` in decreasing order.
fn gram_eigenvalues(a: &DMatrix<Complex64>) -> Vec<f64> {
    let gram = a * a.adjoint();
    let mut ev: Vec<f64> = SymmetricEigen::new(gram).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

fn distinct_singular_values(eigenvalues: &[f64], scale: f64) -> (Vec<f64>, Vec<usize>) {
    let mut values: Vec<f64> = Vec::new();
    let mut mult: Vec<usize> = Vec::new();
    if scale <= 0.0 {
        return (values, mult);
    }
    let top = scale.sqrt();
    for &lambda in eigenvalues {
        if lambda <= TAU_RANK * scale {
            break;
        }
        let s = lambda.sqrt();
        match values.last() {
            Some(&prev) if prev - s <= TAU_EIG * top => *mult.last_mut().unwrap() += 1,
            _ => {
                values.push(s);
                mult.push(1);
            }
        }
    }
    (values, mult)
}

/// `|Σ ρ_j² − ‖u‖²_{H^{1/2}}|`, less the discarded tail mass.
pub fn check_trace_identity(u: &HardyFunction, spectrum: &HankelSpectrum) -> f64 {
    let norm = u.sobolev_norm(0.5);
    ((spectrum.trace_h_squared() - norm * norm).abs() - spectrum.tail_mass).max(0.0)
}

/// `|Σρ² + Σσ² − Σ(1+2n)|û(n)|²|`, less the discarded tail mass.
pub fn check_sum_rule(u: &HardyFunction, spectrum: &HankelSpectrum) -> f64 {
    let weighted: f64 = u
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| (1.0 + 2.0 * n as f64) * c.norm_sqr())
        .sum();
    ((spectrum.trace_h_squared() + spectrum.trace_k_squared() - weighted).abs() - 2.0 * spectrum.tail_mass)
        .max(0.0)
}

/// Max entrywise residual of `K_u² = H_u² − (·|u)u` on the `[0, m/2)²`
/// block of the `m × m` sections.
pub fn check_rank_one_identity(u: &HardyFunction, m: usize) -> f64 {
    let h = hankel_matrix(u, m);
    let k = shifted_hankel_matrix(u, m);
    let hh = &h * h.adjoint();
    let kk = &k * k.adjoint();
    let half = m / 2;
    let mut worst: f64 = 0.0;
    for j in 0..half {
        for l in 0..half {
            let r = kk[(j, l)] - hh[(j, l)] + u.coeff(j) * u.coeff(l).conj();
            worst = worst.max(r.norm());
        }
    }
    worst
}
