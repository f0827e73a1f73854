use std::f64::consts::TAU;

use akdv::config::parse_config;
use akdv::dispersion::ModelSpec;
use akdv::evolver::{simulate, Evolver, StepperConfig, Trajectory};
use akdv::linear::evolve_linear;
use akdv::spectral::{Grid, SpectralField};
use num_complex::Complex64;

fn wave(grid: &Grid) -> SpectralField {
    let mut f = SpectralField::zeros(grid);
    f.set_coeff(1, Complex64::new(0.3, 0.1)).unwrap();
    f.set_coeff(2, Complex64::new(-0.1, 0.05)).unwrap();
    f.set_coeff(3, Complex64::new(0.02, 0.0)).unwrap();
    f
}

fn integrate(spec: &ModelSpec, grid: &Grid, f0: &SpectralField, t: f64, steps: u64) -> SpectralField {
    let mut ev = Evolver::new(spec, grid, StepperConfig::new(t / steps as f64)).unwrap();
    let mut st = ev.initial_state(f0, 0.0).unwrap();
    ev.advance(&mut st, steps).unwrap();
    st.field
}

#[test]
fn fourth_order_in_time() {
    let g = Grid::new(64, TAU).unwrap();
    let spec = ModelSpec::akdv(0.02, -0.02);
    let f0 = wave(&g);
    let reference = integrate(&spec, &g, &f0, 1.0, 3200);
    let errors: Vec<f64> = [50u64, 100, 200]
        .iter()
        .map(|&s| integrate(&spec, &g, &f0, 1.0, s).sub(&reference).max_abs_coeff())
        .collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!(ratio > 13.0 && ratio < 19.0, "errors {errors:?}");
    }
}

#[test]
fn linear_runs_match_exact_flow() {
    let g = Grid::new(128, TAU).unwrap();
    let spec = ModelSpec::linear_only(-1.0, 1.0);
    let f0 = wave(&g);
    let stepped = integrate(&spec, &g, &f0, 0.7, 700);
    let exact = evolve_linear(&f0, &spec, 0.7);
    assert!(stepped.sub(&exact).max_abs_coeff() < 1e-13);
}

#[test]
fn runs_are_deterministic() {
    let cfg = parse_config("preset = zk65_akdv\nn = 128\nt_end = 0.05\ncarpet_rows = 3\n").unwrap();
    let go = || {
        let mut tr = Trajectory::new(&Grid::new(cfg.n, cfg.length).unwrap());
        simulate(&cfg, &mut tr).unwrap();
        tr
    };
    let (a, b) = (go(), go());
    assert_eq!(a.carpet.values(), b.carpet.values());
    assert_eq!(a.last_field(), b.last_field());
}
