//! Thin wrappers over `rustfft` for sampling Fourier series on circles.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward and inverse plans of one length, reusable across calls.
#[derive(Clone)]
pub struct CirclePlan {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CirclePlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CirclePlan").field("len", &self.len).finish()
    }
}

impl CirclePlan {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `c_n = (1/K) Σ_k f_k e^{-2πi nk/K}` in place, for `n = 0..K` (indices
    /// above `K/2` stand for negative modes).
    pub fn analyze(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.forward.process(buf);
        let scale = 1.0 / self.len as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
    }

    /// `f_k = Σ_n c_n e^{2πi nk/K}` in place.
    pub fn synthesize(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.inverse.process(buf);
    }

    /// Values at the K equispaced nodes of the unit circle of the series
    /// with coefficients `coeffs[n]`, `n ≥ 0`. Modes beyond K are folded.
    pub fn samples_of(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        for (n, c) in coeffs.iter().enumerate() {
            buf[n % self.len] += c;
        }
        self.synthesize(&mut buf);
        buf
    }
}

/// Nodes `radius · e^{2πik/K}`.
pub fn circle_nodes(radius: f64, count: usize) -> impl Iterator<Item = Complex64> {
    let step = std::f64::consts::TAU / count as f64;
    (0..count).map(move |k| Complex64::from_polar(radius, step * k as f64))
}
