//! Mass, energy and Hamiltonian functionals, the gradient identity that ties
//! the Hamiltonian to the right-hand side, and drift monitoring.
//!
//! For a conservative family the Hamiltonian is
//! `H = (L/2) Σ_k c_k |û_k|² − ∫ u³/6 dx` with `c_k = Ω(k)/κ_k`; for the
//! alternating family this is the familiar
//! `∫ [ᵒμ(∂_x ᵒu)²/2 + ᵉμ(∂_x ᵉu)²/2 − u³/6] dx`, and the flow satisfies
//! `dû_k/dt = (i/L)·κ_k·∂H/∂û_k*`.

use num_complex::Complex64;

use crate::dispersion::{Family, ModelSpec};
use crate::error::{Error, Result};
use crate::evolver::{nonlinear_term, DealiasRule};
use crate::spectral::SpectralField;

/// Denominator floor for relative drift of invariants whose initial value is
/// (close to) zero.
pub const DRIFT_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantSample {
    pub time: f64,
    pub mass: f64,
    pub energy: f64,
    pub hamiltonian: f64,
}

/// `M = ∫ u dx`.
pub fn mass(field: &SpectralField) -> f64 {
    field.integral()
}

/// `E = ∫ u² dx`.
pub fn energy(field: &SpectralField) -> f64 {
    field.integral_of_square()
}

/// Hamiltonian of a conservative family.  Galerkin-truncated models are
/// evaluated on the projection of `field` onto their Galerkin space.
pub fn hamiltonian(field: &SpectralField, spec: &ModelSpec) -> Result<f64> {
    if spec.family == Family::Akdvb {
        return Err(Error::UndefinedFamily(spec.family.to_string()));
    }
    Ok(hamiltonian_functional(field, spec))
}

/// The Hamiltonian of the inviscid, unforced part of any family.  Used for
/// monitoring damped runs, where it is not conserved.
pub fn hamiltonian_functional(field: &SpectralField, spec: &ModelSpec) -> f64 {
    let projected;
    let field = match spec.galerkin_k {
        Some(k) => {
            projected = field.truncate(k);
            &projected
        }
        None => field,
    };
    let grid = field.grid();
    let nyq = grid.nyquist();
    let quadratic: f64 = field
        .half_spectrum()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| {
            let weight = spec.hamiltonian_weight(grid, k as i64) * c.norm_sqr();
            if k == nyq {
                weight / 2.0
            } else {
                weight
            }
        })
        .sum::<f64>()
        * grid.length();
    let cubic = if spec.nonlinear {
        -field.integral_of_power(3) / 6.0
    } else {
        0.0
    };
    quadratic + cubic
}

pub fn sample(field: &SpectralField, spec: &ModelSpec, time: f64) -> InvariantSample {
    InvariantSample {
        time,
        mass: mass(field),
        energy: energy(field),
        hamiltonian: hamiltonian_functional(field, spec),
    }
}

/// Largest mode index on which the conservative right-hand side is exact.
fn retained_cutoff(field: &SpectralField, spec: &ModelSpec, dealias: DealiasRule) -> usize {
    let grid = field.grid();
    let mut cutoff = grid.nyquist() - 1;
    if spec.nonlinear && dealias == DealiasRule::TwoThirds {
        cutoff = cutoff.min(grid.dealias_cutoff());
    }
    if let Some(k) = spec.galerkin_k {
        cutoff = cutoff.min(k);
    }
    cutoff
}

/// Compares `(i/L)·κ_k·∂H/∂û_k*`, with the Wirtinger derivative taken by
/// central differences on `Re û_k` and `Im û_k`, against the conservative
/// right-hand side `iΩ(k)û_k − [u∂_x u]_k` on every retained mode `k ≠ 0`.
///
/// The field is first projected onto the retained modes.  Returns
/// `max_k |difference| / max_k |rhs_k|` (the absolute difference when the
/// right-hand side vanishes identically).
pub fn hamiltonian_gradient_check(
    field: &SpectralField,
    spec: &ModelSpec,
    fd_step: f64,
    dealias: DealiasRule,
) -> Result<f64> {
    if !(fd_step.is_finite() && fd_step > 0.0) {
        return Err(Error::InvalidArgument(format!("degenerate finite-difference step {fd_step}")));
    }
    if spec.family == Family::Akdvb || !spec.is_conservative() {
        return Err(Error::UndefinedFamily(spec.family.to_string()));
    }
    let cutoff = retained_cutoff(field, spec, dealias);
    let field = field.truncate(cutoff);
    let grid = field.grid().clone();

    let linear = field.map_modes(|k, c| c * Complex64::new(0.0, spec.omega(&grid, k)));
    let rhs = if spec.nonlinear {
        linear.sub(&nonlinear_term(&field, dealias))
    } else {
        linear
    };

    let h_at = |k: i64, delta: Complex64| {
        let mut f = field.clone();
        f.set_coeff(k, field.coeff(k) + delta).expect("retained mode");
        hamiltonian_functional(&f, spec)
    };

    let mut max_diff: f64 = 0.0;
    let mut max_rhs: f64 = 0.0;
    for k in 1..=cutoff as i64 {
        let d_re = (h_at(k, Complex64::new(fd_step, 0.0)) - h_at(k, Complex64::new(-fd_step, 0.0)))
            / (2.0 * fd_step);
        let d_im = (h_at(k, Complex64::new(0.0, fd_step)) - h_at(k, Complex64::new(0.0, -fd_step)))
            / (2.0 * fd_step);
        let wirtinger = Complex64::new(d_re, d_im) * 0.5;
        let predicted = Complex64::new(0.0, grid.wavenumber(k) / grid.length()) * wirtinger;
        let actual = rhs.coeff(k);
        max_diff = max_diff.max((predicted - actual).norm());
        max_rhs = max_rhs.max(actual.norm());
    }
    Ok(if max_rhs > 0.0 {
        max_diff / max_rhs
    } else {
        max_diff
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Drift {
    pub mass: f64,
    pub energy: f64,
    pub hamiltonian: f64,
}

/// `max_t |Q(t) − Q(0)| / max(|Q(0)|, DRIFT_FLOOR)` for each invariant.
pub fn drift_series(samples: &[InvariantSample]) -> Result<Drift> {
    drift_series_with_floor(samples, DRIFT_FLOOR)
}

pub fn drift_series_with_floor(samples: &[InvariantSample], floor: f64) -> Result<Drift> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument(
            "drift needs at least two invariant samples".into(),
        ));
    }
    let first = samples[0];
    let rel = |get: fn(&InvariantSample) -> f64| {
        let q0 = get(&first);
        let worst = samples
            .iter()
            .map(|s| (get(s) - q0).abs())
            .fold(0.0, f64::max);
        worst / q0.abs().max(floor)
    };
    Ok(Drift {
        mass: rel(|s| s.mass),
        energy: rel(|s| s.energy),
        hamiltonian: rel(|s| s.hamiltonian),
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{PI, TAU};

    use super::*;
    use crate::linear::{step_initial_data, StepData};
    use crate::spectral::Grid;

    fn cos_pi_x(n: usize) -> SpectralField {
        let g = Grid::new(n, 2.0).unwrap();
        let v: Vec<f64> = g.points().iter().map(|x| (PI * x).cos()).collect();
        SpectralField::forward(&g, &v).unwrap()
    }

    #[test]
    fn mass_examples() {
        let g = Grid::new(256, TAU).unwrap();
        let step = step_initial_data(&StepData::UnitStep, &g).unwrap();
        assert!((mass(&step) - PI).abs() < 1e-14);
        assert!(mass(&cos_pi_x(64)).abs() < 1e-15);
        let c = SpectralField::forward(&Grid::new(16, 3.0).unwrap(), &[0.7; 16]).unwrap();
        assert!((mass(&c) - 2.1).abs() < 1e-15);
    }

    #[test]
    fn energy_examples() {
        assert!((energy(&cos_pi_x(64)) - 1.0).abs() < 1e-14);
        let g = Grid::new(64, TAU).unwrap();
        assert_eq!(energy(&SpectralField::zeros(&g)), 0.0);
        // the truncated step approaches ∫ of the indicator from below
        let g = Grid::new(1 << 16, TAU).unwrap();
        let step = step_initial_data(&StepData::UnitStep, &g).unwrap();
        assert!((energy(&step) - PI).abs() < 1e-4);
    }

    #[test]
    fn hamiltonian_single_mode() {
        let g = Grid::new(32, TAU).unwrap();
        let a = 0.3;
        let mut f = SpectralField::zeros(&g);
        f.set_coeff(1, Complex64::new(a, 0.0)).unwrap();
        let spec = ModelSpec::akdv(-0.5, 0.8);
        let h = hamiltonian(&f, &spec).unwrap();
        assert!((h - TAU * 0.8 * a * a).abs() < 1e-14);
        assert_eq!(hamiltonian(&SpectralField::zeros(&g), &spec).unwrap(), 0.0);
        let b = ModelSpec::akdvb(0.1, 1, 0.1, crate::dispersion::Forcing::none());
        assert!(hamiltonian(&f, &b).is_err());
    }

    #[test]
    fn drift_examples() {
        let s = |t, e| InvariantSample {
            time: t,
            mass: 1.0,
            energy: e,
            hamiltonian: -2.0,
        };
        let d = drift_series(&[s(0.0, 4.0), s(1.0, 4.0)]).unwrap();
        assert_eq!(d, Drift { mass: 0.0, energy: 0.0, hamiltonian: 0.0 });
        let d = drift_series(&[s(0.0, 4.0), s(1.0, 4.2), s(2.0, 3.9)]).unwrap();
        assert!((d.energy - 0.05).abs() < 1e-15);
        assert!(drift_series(&[s(0.0, 1.0)]).is_err());
    }

    #[test]
    fn gradient_check_rejects_degenerate_step() {
        let f = cos_pi_x(32);
        assert!(hamiltonian_gradient_check(&f, &ModelSpec::kdv(0.1), 0.0, DealiasRule::TwoThirds)
            .is_err());
    }

    #[test]
    fn gradient_check_zero_field() {
        let g = Grid::new(32, TAU).unwrap();
        let err = hamiltonian_gradient_check(
            &SpectralField::zeros(&g),
            &ModelSpec::akdv(1.0, -1.0),
            1e-6,
            DealiasRule::TwoThirds,
        )
        .unwrap();
        assert_eq!(err, 0.0);
    }
}
