use szego_core::flow::{compare_flows, conservation_report, integrate};
use szego_core::{reconstruct_function, HardyFunction, SpectralData};

fn two_pair_datum() -> SpectralData {
    SpectralData::from_parts(&[1.0, 0.5, 0.25, 0.1], &[0.1, 0.7, 2.0, 1.0]).unwrap()
}

#[test]
fn single_pair_flows_agree() {
    let d = SpectralData::with_zero_angles(&[1.0, 0.5]).unwrap();
    let gap = compare_flows(&d, 1.0, 1e-3, 64).unwrap();
    assert!(gap <= 1e-6, "discrepancy {gap:e}");
}

#[test]
fn discrepancy_shrinks_at_fourth_order() {
    let d = SpectralData::with_zero_angles(&[1.0, 0.5]).unwrap();
    let coarse = compare_flows(&d, 1.0, 0.04, 64).unwrap();
    let fine = compare_flows(&d, 1.0, 0.02, 64).unwrap();
    let ratio = coarse / fine;
    assert!(
        (12.0..20.0).contains(&ratio),
        "{coarse:e} -> {fine:e}, ratio {ratio}"
    );
}

#[test]
fn two_pair_datum_conserves_spectrum() {
    let d = two_pair_datum();
    let u0 = reconstruct_function(&d, 128).unwrap();
    let traj = integrate(&u0, 1.0, 1e-3, 128, 4).unwrap();
    let report = conservation_report(&traj).unwrap();
    assert!(report.max_sv_drift <= 1e-6, "{}", report.max_sv_drift);
    assert!(report.max_h_half_drift <= 1e-7, "{}", report.max_h_half_drift);
    assert!(report.max_mass_drift <= 1e-8);
    let first = &report.rows[0];
    for (a, b) in first.rho.iter().zip(d.rhos()) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn mass_is_conserved() {
    let u0 = HardyFunction::from_real(&[0.5, 0.3, -0.2, 0.1]).unwrap();
    let traj = integrate(&u0, 1.0, 1e-3, 32, 1).unwrap();
    let drift = (traj.last().u.l2_norm().powi(2) - u0.l2_norm().powi(2)).abs();
    assert!(drift <= 1e-8, "{drift:e}");
}

#[test]
fn constant_solution_report_is_flat() {
    let u0 = HardyFunction::from_real(&[0.9]).unwrap();
    let traj = integrate(&u0, 1.0, 1e-3, 8, 5).unwrap();
    let report = conservation_report(&traj).unwrap();
    assert!(report.max_mass_drift < 1e-10);
    assert!(report.max_h_half_drift < 1e-10);
    assert!(report.max_sv_drift < 1e-10);
}
