//! Functions on the circle with vanishing negative modes, stored as finite
//! Taylor coefficient vectors, together with the Szegő projector, Sobolev
//! and Besov-type norms and coefficient extraction from disc samples.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{circle_nodes, CirclePlan};

/// Absolute tolerance below which a coefficient counts as nonnegative real.
pub const TAU_POS: f64 = 1e-10;
/// Default sampling radius for [`HardyFunction::from_disc_samples`].
pub const DEFAULT_EXTRACTION_RADIUS: f64 = 0.75;
/// Circle nodes per requested mode when extracting coefficients.
pub const OVERSAMPLING: usize = 4;
/// Ratio between the primary and the control radius of the two-radius check.
pub const CONTROL_RADIUS_RATIO: f64 = 0.9;
/// Entrywise agreement demanded by the two-radius check, relative to the
/// sample scale, on top of the roundoff floor of each mode.
pub const TWO_RADIUS_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHardy", into = "RawHardy")]
pub struct HardyFunction {
    coeffs: Vec<Complex64>,
    declared_radius: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHardy {
    coeffs: Vec<Complex64>,
    declared_radius: f64,
}

impl TryFrom<RawHardy> for HardyFunction {
    type Error = Error;

    fn try_from(raw: RawHardy) -> Result<Self> {
        HardyFunction::new(raw.coeffs, raw.declared_radius)
    }
}

impl From<HardyFunction> for RawHardy {
    fn from(u: HardyFunction) -> Self {
        RawHardy {
            coeffs: u.coeffs,
            declared_radius: u.declared_radius,
        }
    }
}

impl HardyFunction {
    pub fn new(coeffs: Vec<Complex64>, declared_radius: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("a Hardy function needs at least one coefficient"));
        }
        if let Some(n) = coeffs
            .iter()
            .position(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::invalid(format!("coefficient {n} is not finite")));
        }
        if !(declared_radius > 0.0 && declared_radius <= 1.0) {
            return Err(Error::invalid(format!(
                "declared radius {declared_radius} outside (0, 1]"
            )));
        }
        Ok(Self {
            coeffs,
            declared_radius,
        })
    }

    /// Coefficients trusted on the closed unit disc.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(coeffs, 1.0)
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::from_coeffs(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); len.max(1)],
            declared_radius: 1.0,
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn declared_radius(&self) -> f64 {
        self.declared_radius
    }

    /// `û(n)`, zero beyond the stored support.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// Truncates or zero-pads to `len` coefficients.
    pub fn resized(&self, len: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(len.max(1), Complex64::new(0.0, 0.0));
        Self {
            coeffs,
            declared_radius: self.declared_radius,
        }
    }

    /// The backward shift `S*u`, i.e. coefficients `û(n+1)`.
    pub fn shifted(&self) -> Self {
        let coeffs = if self.coeffs.len() > 1 {
            self.coeffs[1..].to_vec()
        } else {
            vec![Complex64::new(0.0, 0.0)]
        };
        Self {
            coeffs,
            declared_radius: self.declared_radius,
        }
    }

    /// Evaluates `Σ û(n) zⁿ` by Horner's rule.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let modulus = z.norm();
        if modulus > self.declared_radius * (1.0 + 1e-12) {
            return Err(Error::Domain {
                modulus,
                radius: self.declared_radius,
            });
        }
        Ok(self
            .coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c))
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0)
    }

    /// `(Σ (1+n)^{2s} |û(n)|²)^{1/2}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| (1.0 + n as f64).powf(2.0 * s) * c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `Σ_{n≥1} n Re û(n)`, which is `u'(1)` and the C¹ norm on the circle
    /// when all coefficients are nonnegative.
    pub fn weighted_first_moment(&self) -> Result<f64> {
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.re < -TAU_POS || c.im.abs() > TAU_POS {
                return Err(Error::NegativeCoefficients {
                    mode: n,
                    re: c.re,
                    im: c.im,
                });
            }
        }
        Ok(self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| n as f64 * c.re)
            .sum())
    }

    /// Dyadic Besov-type sum `Σ_j 2^j ∫ |Δ_j u|^p dx/2π`.
    ///
    /// Block 0 collects modes {0, 1}; block `j ≥ 1` collects `[2^j, 2^{j+1})`.
    /// Each block is integrated with the trapezoid rule on `4·2^{j+1}` nodes,
    /// which is exact for `p = 2`.
    pub fn besov_seminorm(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::invalid(format!("Besov exponent {p} must lie in (0, ∞)")));
        }
        let mut total = 0.0;
        let mut j = 0u32;
        loop {
            let (lo, hi) = if j == 0 {
                (0, 2)
            } else {
                (1usize << j, 1usize << (j + 1))
            };
            if lo >= self.coeffs.len() {
                break;
            }
            let hi = hi.min(self.coeffs.len());
            if self.coeffs[lo..hi].iter().any(|c| c.norm_sqr() > 0.0) {
                let nodes = 4usize << (j + 1);
                let plan = CirclePlan::new(nodes);
                let mut block = vec![Complex64::new(0.0, 0.0); hi];
                block[lo..hi].copy_from_slice(&self.coeffs[lo..hi]);
                let samples = plan.samples_of(&block);
                let integral = samples.iter().map(|v| v.norm().powf(p)).sum::<f64>() / nodes as f64;
                total += f64::from(2u32.pow(j)) * integral;
            }
            j += 1;
        }
        Ok(total)
    }

    /// Values on `K` equispaced nodes of the unit circle.
    pub fn circle_samples(&self, nodes: usize) -> Vec<Complex64> {
        CirclePlan::new(nodes).samples_of(&self.coeffs)
    }

    /// `‖self − other‖_{L²}` with the shorter vector zero-padded.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        let len = self.len().max(other.len());
        (0..len)
            .map(|n| (self.coeff(n) - other.coeff(n)).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Extracts `modes` Taylor coefficients of a function holomorphic on
    /// `|z| ≤ radius` from its values on that circle, and cross-checks them
    /// against a second extraction at `0.9·radius`.
    pub fn from_disc_samples<F>(f: F, radius: f64, modes: usize) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64,
    {
        Self::try_from_disc_samples(|z| Ok(f(z)), radius, modes)
    }

    pub fn try_from_disc_samples<F>(f: F, radius: f64, modes: usize) -> Result<Self>
    where
        F: Fn(Complex64) -> Result<Complex64>,
    {
        if modes == 0 {
            return Err(Error::invalid("at least one mode must be extracted"));
        }
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::invalid(format!("sampling radius {radius} outside (0, 1)")));
        }
        let nodes = OVERSAMPLING * modes;
        let plan = CirclePlan::new(nodes);
        let primary = extract_at(&f, &plan, radius, modes)?;
        let control = extract_at(&f, &plan, CONTROL_RADIUS_RATIO * radius, modes)?;

        // Dividing by r^n amplifies the FFT roundoff of mode n; the comparison
        // is only meaningful above that floor.
        let floor = 100.0 * f64::EPSILON * (nodes as f64).log2().max(1.0);
        let scale = primary.peak.max(control.peak).max(f64::MIN_POSITIVE);
        for n in 0..modes {
            let noise = floor
                * (primary.peak * radius.powi(-(n as i32))
                    + control.peak * (CONTROL_RADIUS_RATIO * radius).powi(-(n as i32)));
            let tolerance = TWO_RADIUS_TOLERANCE * scale.max(1.0) + noise;
            let difference = (primary.coeffs[n] - control.coeffs[n]).norm();
            if !(difference <= tolerance) {
                return Err(Error::InconsistentSamples {
                    mode: n,
                    difference,
                    tolerance,
                });
            }
        }
        Self::new(primary.coeffs, radius)
    }
}

struct Extraction {
    coeffs: Vec<Complex64>,
    peak: f64,
}

fn extract_at<F>(f: &F, plan: &CirclePlan, radius: f64, modes: usize) -> Result<Extraction>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut buf = circle_nodes(radius, plan.len())
        .map(f)
        .collect::<Result<Vec<_>>>()?;
    if let Some(k) = buf.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::invalid(format!(
            "sample {k} at radius {radius} is not finite"
        )));
    }
    let peak = buf.iter().map(|v| v.norm()).fold(0.0, f64::max);
    plan.analyze(&mut buf);
    let mut scale = 1.0;
    let coeffs = buf
        .into_iter()
        .take(modes)
        .map(|c| {
            let out = c / scale;
            scale *= radius;
            out
        })
        .collect();
    Ok(Extraction { coeffs, peak })
}

/// Function on the full circle with modes `-M..=M`.
#[derive(Clone, Debug, PartialEq)]
pub struct FullCircleFunction {
    half_width: usize,
    coeffs: Vec<Complex64>,
}

impl FullCircleFunction {
    /// `coeffs[i]` holds mode `i − M`; the length must be odd.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::invalid("full-circle coefficients need an odd length 2M+1"));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::invalid("full-circle coefficients must be finite"));
        }
        Ok(Self {
            half_width: coeffs.len() / 2,
            coeffs,
        })
    }

    pub fn from_fn(half_width: usize, mode: impl Fn(i64) -> Complex64) -> Result<Self> {
        let m = half_width as i64;
        Self::new((-m..=m).map(mode).collect())
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn coeff(&self, n: i64) -> Complex64 {
        let idx = n + self.half_width as i64;
        if idx < 0 {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs.get(idx as usize).copied().unwrap_or_default()
    }
}

/// The Szegő projector: keeps modes `n ≥ 0`.
pub fn szego_project(v: &FullCircleFunction) -> HardyFunction {
    HardyFunction {
        coeffs: v.coeffs[v.half_width..].to_vec(),
        declared_radius: 1.0,
    }
}

impl From<&HardyFunction> for FullCircleFunction {
    fn from(u: &HardyFunction) -> Self {
        let m = u.len() - 1;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); m];
        coeffs.extend_from_slice(u.coeffs());
        Self {
            half_width: m,
            coeffs,
        }
    }
}
