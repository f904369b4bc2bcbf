//! The cubic Szegő equation `i∂ₜu = Π(|u|²u)`, evolved either exactly in
//! action-angle coordinates or by direct pseudospectral time stepping.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::CirclePlan;
use crate::hankel::pair_singular_values;
use crate::hardy::{HardyFunction, OVERSAMPLING};
use crate::inverse::{reconstruct_function, SpectralData, SpectralPair};

/// Largest admissible `dt · max|u|²` for the explicit stepper.
pub const STABILITY_LIMIT: f64 = 0.1;
/// Relative L² drift that aborts a run; the exact flow conserves the norm.
pub const BLOWUP_DRIFT: f64 = 0.01;

/// Exact flow in spectral coordinates: `s_r` fixed, `ψ_r ↦ ψ_r + t s_r²`.
pub fn spectral_evolve(d: &SpectralData, t: f64) -> SpectralData {
    let pairs: Vec<SpectralPair> = d
        .pairs()
        .iter()
        .map(|p| SpectralPair {
            s: p.s,
            psi: (p.psi + t * p.s * p.s).rem_euclid(std::f64::consts::TAU),
        })
        .collect();
    let out = SpectralData::new(pairs).expect("actions are unchanged, so the data stays valid");
    debug_assert_eq!(out.s(), d.s());
    out
}

/// `u ↦ −iΠ(|u|²u)` on `M` modes, with the cubic term formed on `4M`
/// circle nodes. The product has bandwidth `3M − 2`, so nothing aliases.
#[derive(Clone, Debug)]
pub struct SzegoRhs {
    modes: usize,
    plan: CirclePlan,
}

impl SzegoRhs {
    pub fn new(modes: usize) -> Self {
        let modes = modes.max(1);
        Self {
            modes,
            plan: CirclePlan::new(OVERSAMPLING * modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Writes the right-hand side for the first `M` coefficients `u` into
    /// `out`.
    pub fn apply(&self, u: &[Complex64], out: &mut [Complex64]) {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.plan.len()];
        let m = self.modes.min(u.len());
        buf[..m].copy_from_slice(&u[..m]);
        self.plan.synthesize(&mut buf);
        buf.iter_mut().for_each(|v| *v *= v.norm_sqr());
        self.plan.analyze(&mut buf);
        let minus_i = Complex64::new(0.0, -1.0);
        for (o, b) in out.iter_mut().zip(&buf[..self.modes]) {
            *o = minus_i * b;
        }
    }
}

/// One-off evaluation of `−iΠ(|u|²u)` on `u`'s own mode count.
pub fn szego_rhs(u: &HardyFunction) -> HardyFunction {
    let rhs = SzegoRhs::new(u.len());
    let mut out = vec![Complex64::new(0.0, 0.0); u.len()];
    rhs.apply(u.coeffs(), &mut out);
    HardyFunction::from_coeffs(out).expect("finite input gives finite output")
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub dt: f64,
    pub modes: usize,
    pub u: HardyFunction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub states: Vec<FlowState>,
}

impl Trajectory {
    pub fn last(&self) -> &FlowState {
        self.states
            .last()
            .expect("trajectories hold at least the initial state")
    }
}

fn max_modulus_squared(u: &[Complex64], modes: usize) -> f64 {
    CirclePlan::new(OVERSAMPLING * modes.max(1))
        .samples_of(u)
        .iter()
        .map(|v| v.norm_sqr())
        .fold(0.0, f64::max)
}

/// Classical RK4 on `M` modes from `t = 0` to `t_final`.
///
/// The step is shrunk to `t_final / ceil(t_final/dt)` so the run lands on
/// `t_final` exactly; `samples` equal intervals of the run are recorded,
/// plus the initial state.
pub fn integrate(
    u0: &HardyFunction,
    t_final: f64,
    dt: f64,
    modes: usize,
    samples: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid(format!("time step {dt} must be positive")));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::invalid(format!(
            "final time {t_final} must be nonnegative"
        )));
    }
    if modes == 0 {
        return Err(Error::invalid("mode count must be positive"));
    }
    let samples = samples.max(1);
    let mut u = u0.resized(modes).into_coeffs();
    let peak = max_modulus_squared(&u, modes);
    if dt * peak > STABILITY_LIMIT {
        return Err(Error::invalid(format!(
            "dt * max|u|^2 = {:.3e} exceeds the stability limit {STABILITY_LIMIT}",
            dt * peak
        )));
    }

    let steps = (t_final / dt).ceil() as usize;
    let h = if steps == 0 { dt } else { t_final / steps as f64 };
    let rhs = SzegoRhs::new(modes);
    let mass0 = l2(&u);
    let zero = Complex64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut stage) = (
        vec![zero; modes],
        vec![zero; modes],
        vec![zero; modes],
        vec![zero; modes],
        vec![zero; modes],
    );

    let state = |u: &[Complex64], t: f64| FlowState {
        t,
        dt: h,
        modes,
        u: HardyFunction::from_coeffs(u.to_vec()).expect("finite state"),
    };
    let mut states = vec![state(&u, 0.0)];
    let mut next_record = 1;
    for step in 1..=steps {
        rhs.apply(&u, &mut k1);
        axpy(&mut stage, &u, 0.5 * h, &k1);
        rhs.apply(&stage, &mut k2);
        axpy(&mut stage, &u, 0.5 * h, &k2);
        rhs.apply(&stage, &mut k3);
        axpy(&mut stage, &u, h, &k3);
        rhs.apply(&stage, &mut k4);
        for i in 0..modes {
            u[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        let t = step as f64 * h;
        let mass = l2(&u);
        let drift = if mass0 > 0.0 {
            (mass - mass0).abs() / mass0
        } else {
            mass
        };
        if !(drift <= BLOWUP_DRIFT) {
            return Err(Error::BlowupDetected {
                time: t,
                relative_drift: drift,
            });
        }
        while next_record <= samples && step * samples >= next_record * steps {
            states.push(state(&u, t));
            next_record += 1;
        }
    }
    while states.len() < samples + 1 {
        // Zero-length runs: every requested sample is the initial state.
        states.push(state(&u, t_final));
    }
    Ok(Trajectory { states })
}

fn axpy(out: &mut [Complex64], x: &[Complex64], a: f64, y: &[Complex64]) {
    for ((o, x), y) in out.iter_mut().zip(x).zip(y) {
        *o = x + a * y;
    }
}

fn l2(u: &[Complex64]) -> f64 {
    u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖reconstruct(spectral_evolve(d, T)) − integrate(reconstruct(d), T)‖_{L²}`.
pub fn compare_flows(d: &SpectralData, t_final: f64, dt: f64, modes: usize) -> Result<f64> {
    let u0 = reconstruct_function(d, modes)?;
    let direct = integrate(&u0, t_final, dt, modes, 1)?;
    let exact = reconstruct_function(&spectral_evolve(d, t_final), modes)?;
    Ok(exact.l2_distance(&direct.last().u))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConservationRow {
    pub t: f64,
    pub mass: f64,
    pub h_half_norm: f64,
    pub rho: Vec<f64>,
    pub sigma: Vec<f64>,
    /// `|‖u(t)‖ − ‖u(0)‖| / ‖u(0)‖` (absolute when `u(0) = 0`).
    pub mass_drift: f64,
    pub h_half_drift: f64,
    /// Largest change of any `ρ_j` or `σ_k`, relative to `ρ₁(0)`.
    pub sv_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConservationReport {
    pub rows: Vec<ConservationRow>,
    pub max_mass_drift: f64,
    pub max_h_half_drift: f64,
    pub max_sv_drift: f64,
}

fn relative(now: f64, then: f64) -> f64 {
    if then > 0.0 {
        (now - then).abs() / then
    } else {
        now.abs()
    }
}

fn list_drift(now: &[f64], then: &[f64]) -> f64 {
    let len = now.len().max(then.len());
    (0..len)
        .map(|i| (now.get(i).copied().unwrap_or(0.0) - then.get(i).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

/// Conserved quantities along a trajectory: `‖u‖_{L²}`, `‖u‖_{H^{1/2}}`
/// and the singular values of `H_u`, `K_u`.
pub fn conservation_report(trajectory: &Trajectory) -> Result<ConservationReport> {
    let mut rows: Vec<ConservationRow> = Vec::with_capacity(trajectory.states.len());
    for state in &trajectory.states {
        let spectrum = pair_singular_values(&state.u, state.u.len())?;
        let mass = state.u.l2_norm();
        let h_half_norm = state.u.sobolev_norm(0.5);
        let (mass_drift, h_half_drift, sv_drift) = match rows.first() {
            None => (0.0, 0.0, 0.0),
            Some(first) => {
                let scale = first.rho.first().copied().unwrap_or(0.0);
                let raw =
                    list_drift(&spectrum.rho, &first.rho).max(list_drift(&spectrum.sigma, &first.sigma));
                (
                    relative(mass, first.mass),
                    relative(h_half_norm, first.h_half_norm),
                    if scale > 0.0 { raw / scale } else { raw },
                )
            }
        };
        rows.push(ConservationRow {
            t: state.t,
            mass,
            h_half_norm,
            rho: spectrum.rho,
            sigma: spectrum.sigma,
            mass_drift,
            h_half_drift,
            sv_drift,
        });
    }
    let max = |f: fn(&ConservationRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    Ok(ConservationReport {
        max_mass_drift: max(|r| r.mass_drift),
        max_h_half_drift: max(|r| r.h_half_drift),
        max_sv_drift: max(|r| r.sv_drift),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spectral_evolve_examples() {
        let d = SpectralData::with_zero_angles(&[1.0, 0.5]).unwrap();
        assert_eq!(spectral_evolve(&d, 0.0), d);
        let e = spectral_evolve(&d, 1.0);
        assert_eq!(e.psi(), vec![1.0, 0.25]);
        assert_eq!(e.s(), d.s());

        let ints = SpectralData::from_parts(&[2.0, 1.0], &[0.3, 1.1]).unwrap();
        let back = spectral_evolve(&ints, std::f64::consts::TAU);
        for (a, b) in back.psi().iter().zip(ints.psi()) {
            let diff = (a - b).rem_euclid(std::f64::consts::TAU);
            assert!(diff.min(std::f64::consts::TAU - diff) < 1e-12);
        }
    }

    #[test]
    fn rhs_examples() {
        let zero = HardyFunction::zeros(8);
        assert!(szego_rhs(&zero).coeffs().iter().all(|x| x.norm() == 0.0));

        let k = c(0.6, -0.3);
        let want = c(0.0, -1.0) * k.norm_sqr() * k;
        let constant = HardyFunction::from_coeffs(vec![k, c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let out = szego_rhs(&constant);
        assert!((out.coeff(0) - want).norm() < 1e-15);
        assert!(out.coeffs()[1..].iter().all(|x| x.norm() < 1e-15));

        let linear = HardyFunction::from_coeffs(vec![c(0.0, 0.0), k, c(0.0, 0.0)]).unwrap();
        let out = szego_rhs(&linear);
        assert!((out.coeff(1) - want).norm() < 1e-15);
        assert!(out.coeff(0).norm() < 1e-15 && out.coeff(2).norm() < 1e-15);
    }

    #[test]
    fn rhs_matches_direct_convolution() {
        let u: Vec<Complex64> = (0..6)
            .map(|n| c(0.3 / (1.0 + n as f64), 0.1 * n as f64 - 0.2))
            .collect();
        let h = HardyFunction::from_coeffs(u.clone()).unwrap();
        let out = szego_rhs(&h);
        for n in 0..6i64 {
            let mut acc = c(0.0, 0.0);
            for a in 0..6i64 {
                for b in 0..6i64 {
                    let cc = a + b - n;
                    if (0..6).contains(&cc) {
                        acc += u[a as usize] * u[b as usize] * u[cc as usize].conj();
                    }
                }
            }
            assert!((out.coeff(n as usize) - c(0.0, -1.0) * acc).norm() < 1e-14);
        }
    }

    #[test]
    fn constant_solution_is_resolved() {
        let k = c(0.8, 0.4);
        let u0 = HardyFunction::from_coeffs(vec![k]).unwrap();
        let traj = integrate(&u0, 1.0, 1e-2, 4, 4).unwrap();
        assert_eq!(traj.states.len(), 5);
        let exact = Complex64::from_polar(1.0, -k.norm_sqr()) * k;
        assert!((traj.last().u.coeff(0) - exact).norm() < 1e-9);
        assert!((traj.last().t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_solution_stays_zero() {
        let traj = integrate(&HardyFunction::zeros(4), 1.0, 1e-2, 4, 2).unwrap();
        assert!(traj.states.iter().all(|s| s.u.l2_norm() == 0.0));
        let report = conservation_report(&traj).unwrap();
        assert!(report.rows.iter().all(|r| r.mass == 0.0 && r.rho.is_empty()));
        assert_eq!(report.max_sv_drift, 0.0);
    }

    #[test]
    fn rejects_unstable_step() {
        let u0 = HardyFunction::from_real(&[3.0]).unwrap();
        assert!(integrate(&u0, 1.0, 0.05, 4, 1).unwrap_err().is_validation());
        assert!(integrate(&u0, 1.0, -1.0, 4, 1).is_err());
    }

    #[test]
    fn zero_time_comparison_is_exact() {
        let d = SpectralData::with_zero_angles(&[1.0, 0.5]).unwrap();
        assert_eq!(compare_flows(&d, 0.0, 1e-3, 32).unwrap(), 0.0);
    }
}
