//! Pseudo-spectral right-hand side and integrating-factor RK4 time stepping.
//!
//! The stiff linear part `(iΩ(k) − νκ_k²)û_k` is integrated exactly through
//! the substitution `v̂_k = e^{−(iΩ(k)−νκ_k²)t} û_k`; classical RK4 advances
//! the remaining forcing and advection terms.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::carpet::CarpetGrid;
use crate::config::{InitialCondition, RunConfig};
use crate::conserved::{self, InvariantSample};
use crate::dispersion::{Family, LinearTable, ModelSpec};
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

/// Coefficient magnitude beyond which a run is declared to have blown up.
pub const BLOWUP_THRESHOLD: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DealiasRule {
    /// Keep `|k| <= K` with `3K < n`.
    TwoThirds,
    None,
}

impl DealiasRule {
    pub fn name(self) -> &'static str {
        match self {
            DealiasRule::TwoThirds => "two_thirds",
            DealiasRule::None => "none",
        }
    }

    fn cutoff(self, grid: &Grid) -> usize {
        match self {
            DealiasRule::TwoThirds => grid.dealias_cutoff(),
            DealiasRule::None => grid.nyquist(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    IntegratingFactorRk4,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepperConfig {
    pub dt: f64,
    pub dealias: DealiasRule,
    pub scheme: Scheme,
}

impl StepperConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            dealias: DealiasRule::TwoThirds,
            scheme: Scheme::IntegratingFactorRk4,
        }
    }

    /// Default step `0.25·dx / max(1, max|u₀|)`.
    pub fn advisory_dt(grid: &Grid, max_abs_u: f64) -> f64 {
        0.25 * grid.dx() / max_abs_u.max(1.0)
    }
}

#[derive(Clone, Debug)]
pub struct EvolverState {
    pub field: SpectralField,
    pub time: f64,
    pub step_count: u64,
}

/// Workspace for repeated transforms of the advection term.
struct Transforms {
    grid: Grid,
    ik: Vec<Complex64>,
    spec_buf: Vec<Complex64>,
    u: Vec<f64>,
    ux: Vec<f64>,
    scratch: Vec<Complex64>,
}

impl Transforms {
    fn new(grid: &Grid) -> Self {
        let nyq = grid.nyquist();
        let ik = (0..=nyq)
            .map(|k| {
                if k == nyq {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, grid.wavenumber(k as i64))
                }
            })
            .collect();
        Self {
            grid: grid.clone(),
            ik,
            spec_buf: vec![Complex64::new(0.0, 0.0); nyq + 1],
            u: vec![0.0; grid.n()],
            ux: vec![0.0; grid.n()],
            scratch: vec![Complex64::new(0.0, 0.0); grid.plans().scratch_len()],
        }
    }

    /// Writes the coefficients of `u∂_x u` for `coeffs` into `out`
    /// (unmasked; the mean mode is exactly zero).
    fn advection(&mut self, coeffs: &[Complex64], out: &mut [Complex64]) {
        let plans = self.grid.plans();
        self.spec_buf.copy_from_slice(coeffs);
        plans.inverse_with(&mut self.spec_buf, &mut self.u, &mut self.scratch);
        for ((b, c), ik) in self.spec_buf.iter_mut().zip(coeffs).zip(&self.ik) {
            *b = c * ik;
        }
        plans.inverse_with(&mut self.spec_buf, &mut self.ux, &mut self.scratch);
        for (u, ux) in self.u.iter_mut().zip(&self.ux) {
            *u *= ux;
        }
        plans.forward_with(&mut self.u, out, &mut self.scratch);
        let scale = 1.0 / self.grid.n() as f64;
        out.iter_mut().for_each(|c| *c *= scale);
        out[0] = Complex64::new(0.0, 0.0);
    }

    /// Unscaled spectrum of `u²` for the coefficients `coeffs`.  Together
    /// with the factor `−iκ_k/(2n)` this is `∂_x(u²/2)`, which agrees with
    /// the product form on every mode below the two-thirds cutoff when the
    /// input is already dealiased, at one inverse transform fewer.
    fn square(&mut self, coeffs: &[Complex64], out: &mut [Complex64]) {
        let plans = self.grid.plans();
        self.spec_buf.copy_from_slice(coeffs);
        plans.inverse_with(&mut self.spec_buf, &mut self.u, &mut self.scratch);
        for u in self.u.iter_mut() {
            *u *= *u;
        }
        plans.forward_with(&mut self.u, out, &mut self.scratch);
    }
}

/// Exact-determinant rotation by a fixed angle, applied as a quarter turn
/// followed by three shears.  Rounding in the shear coefficients changes the
/// angle slightly but never the modulus, so repeated application does not
/// drift in norm the way multiplication by a rounded `e^{iθ}` does.
#[derive(Clone, Copy, Debug)]
struct Rotation {
    /// `i^q`, whose product with any value is exact.
    quarter: Complex64,
    shear_x: f64,
    shear_y: f64,
    gain: f64,
}

impl Rotation {
    fn new(theta: f64, gain: f64) -> Self {
        let turns = (theta / FRAC_PI_2).round();
        let phi = theta - turns * FRAC_PI_2;
        let quarter = match turns.rem_euclid(4.0) as u8 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        Self {
            quarter,
            shear_x: -(phi / 2.0).tan(),
            shear_y: phi.sin(),
            gain,
        }
    }

    #[inline]
    fn apply(&self, z: Complex64) -> Complex64 {
        let z = self.quarter * z;
        let x = z.re + self.shear_x * z.im;
        let y = z.im + self.shear_y * x;
        let x = x + self.shear_x * y;
        Complex64::new(x * self.gain, y * self.gain)
    }
}

fn dealias_mask(grid: &Grid, rule: DealiasRule) -> Vec<bool> {
    let cutoff = rule.cutoff(grid);
    (0..=grid.nyquist()).map(|k| k <= cutoff).collect()
}

/// Spectral coefficients of `u∂_x u`, computed by transforming `u` and
/// `∂_x u` to the grid, multiplying pointwise and transforming back.  With
/// the two-thirds rule both the input and the product are restricted to the
/// alias-free band, so the result equals the exact convolution
/// `i Σ_{p+q=k} κ_q û_p û_q` of the band-limited input there.
pub fn nonlinear_term(field: &SpectralField, dealias: DealiasRule) -> SpectralField {
    let grid = field.grid();
    let mask = dealias_mask(grid, dealias);
    let input: Vec<Complex64> = field
        .half_spectrum()
        .iter()
        .zip(&mask)
        .map(|(&c, &keep)| if keep { c } else { Complex64::new(0.0, 0.0) })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.modes()];
    Transforms::new(grid).advection(&input, &mut out);
    for (c, &keep) in out.iter_mut().zip(&mask) {
        if !keep {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    SpectralField::from_half_spectrum(grid, out).expect("grid-sized spectrum")
}

/// `dû_k/dt = iΩ(k)û_k − νκ_k²û_k + f̂_k − [u∂_x u]_k`, restricted to the
/// retained modes (Galerkin space and, for nonlinear runs, the dealiased band).
pub fn rhs(field: &SpectralField, spec: &ModelSpec, dealias: DealiasRule) -> Result<SpectralField> {
    let grid = field.grid();
    let table = LinearTable::new(spec, grid);
    let retained = retained_modes(spec, grid, dealias)?;
    let forcing = spec.forcing_spectrum(grid)?;
    let advection = if spec.nonlinear {
        nonlinear_term(field, dealias)
    } else {
        SpectralField::zeros(grid)
    };
    Ok(field.map_modes(|k, c| {
        let k = k as usize;
        if !retained[k] {
            return Complex64::new(0.0, 0.0);
        }
        table.generator(k) * c + forcing.half_spectrum()[k] - advection.half_spectrum()[k]
    }))
}

fn retained_modes(spec: &ModelSpec, grid: &Grid, dealias: DealiasRule) -> Result<Vec<bool>> {
    if spec.family == Family::Grbh {
        let k = spec.galerkin_k.unwrap_or(0);
        if 3 * k >= grid.n() {
            return Err(Error::InvalidArgument(format!(
                "Galerkin cutoff {k} is not alias-free on {} points (need 3K < n)",
                grid.n()
            )));
        }
    }
    let dealiased = if spec.nonlinear {
        dealias_mask(grid, dealias)
    } else {
        vec![true; grid.modes()]
    };
    Ok((0..=grid.nyquist())
        .map(|k| dealiased[k] && spec.galerkin_mask(k as i64))
        .collect())
}

/// Integrating-factor RK4 stepper with precomputed exponentials.
pub struct Evolver {
    spec: ModelSpec,
    grid: Grid,
    stepper: StepperConfig,
    retained: Vec<bool>,
    /// 1 on retained modes, 0 elsewhere.
    weight: Vec<f64>,
    /// Forcing spectrum restricted to the retained modes.
    forcing: Vec<Complex64>,
    /// `−iκ_k/(2n)` on retained modes: turns the raw spectrum of `u²` into
    /// minus the advection term.
    flux: Vec<Complex64>,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    propagator: Vec<Rotation>,
    transforms: Transforms,
    stages: [Vec<Complex64>; 5],
}

impl Evolver {
    pub fn new(spec: &ModelSpec, grid: &Grid, stepper: StepperConfig) -> Result<Self> {
        spec.validate()?;
        if !(stepper.dt.is_finite() && stepper.dt > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "time step must be positive, got {}",
                stepper.dt
            )));
        }
        let table = LinearTable::new(spec, grid);
        let retained = retained_modes(spec, grid, stepper.dealias)?;
        let weight: Vec<f64> = retained.iter().map(|&r| if r { 1.0 } else { 0.0 }).collect();
        let forcing = spec
            .forcing_spectrum(grid)?
            .into_half_spectrum()
            .into_iter()
            .zip(&weight)
            .map(|(f, w)| f * w)
            .collect();
        let nyq = grid.nyquist();
        let flux = (0..=nyq)
            .map(|k| {
                let kappa = if k == nyq { 0.0 } else { grid.wavenumber(k as i64) };
                Complex64::new(0.0, -0.5 * kappa * weight[k] / grid.n() as f64)
            })
            .collect();
        let exp = |scale: f64| -> Vec<Complex64> {
            (0..=nyq).map(|k| (table.generator(k) * scale).exp()).collect()
        };
        let zeros = vec![Complex64::new(0.0, 0.0); grid.modes()];
        Ok(Self {
            spec: spec.clone(),
            grid: grid.clone(),
            half: exp(stepper.dt / 2.0),
            full: exp(stepper.dt),
            propagator: (0..=nyq)
                .map(|k| {
                    let g = table.generator(k) * stepper.dt;
                    Rotation::new(g.im, g.re.exp())
                })
                .collect(),
            stepper,
            retained,
            weight,
            forcing,
            flux,
            transforms: Transforms::new(grid),
            stages: [
                zeros.clone(),
                zeros.clone(),
                zeros.clone(),
                zeros.clone(),
                zeros,
            ],
        })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.stepper.dt
    }

    /// Projects `field` onto the retained modes and wraps it as a state at `time`.
    pub fn initial_state(&self, field: &SpectralField, time: f64) -> Result<EvolverState> {
        if field.grid() != &self.grid {
            return Err(Error::InvalidArgument("initial field lives on another grid".into()));
        }
        let projected = field.map_modes(|k, c| {
            if self.retained[k as usize] {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(EvolverState {
            field: projected,
            time,
            step_count: 0,
        })
    }

    /// Advances `state` by one step of size `dt`.
    pub fn step(&mut self, state: &mut EvolverState) -> Result<()> {
        let dt = self.stepper.dt;
        let flux_form = self.stepper.dealias == DealiasRule::TwoThirds;
        let Self {
            spec,
            weight,
            forcing,
            flux,
            half,
            full,
            propagator,
            transforms,
            stages,
            ..
        } = self;
        let [a, b, c, d, tmp] = stages;
        let u = state.field.half_spectrum_mut();

        // forcing minus advection on the retained modes
        let mut explicit = |coeffs: &[Complex64], out: &mut [Complex64]| {
            if !spec.nonlinear {
                out.copy_from_slice(forcing);
            } else if flux_form {
                transforms.square(coeffs, out);
                for ((o, f), s) in out.iter_mut().zip(forcing.iter()).zip(flux.iter()) {
                    *o = f + s * *o;
                }
            } else {
                transforms.advection(coeffs, out);
                for ((o, f), w) in out.iter_mut().zip(forcing.iter()).zip(weight.iter()) {
                    *o = (f - *o) * w;
                }
            }
        };

        let h = dt / 2.0;
        explicit(u, a);
        for (((t, &e), &x), &y) in tmp.iter_mut().zip(half.iter()).zip(u.iter()).zip(a.iter()) {
            *t = e * (x + y * h);
        }
        explicit(tmp, b);
        for (((t, &e), &x), &y) in tmp.iter_mut().zip(half.iter()).zip(u.iter()).zip(b.iter()) {
            *t = e * x + y * h;
        }
        explicit(tmp, c);
        for ((((t, &e), &e2), &x), &y) in tmp
            .iter_mut()
            .zip(half.iter())
            .zip(full.iter())
            .zip(u.iter())
            .zip(c.iter())
        {
            *t = e2 * x + e * y * dt;
        }
        explicit(tmp, d);
        // Modes outside the retained set stay zero: every term vanishes there.
        let sixth = dt / 6.0;
        let mut peak: f64 = 0.0;
        let mut total = 0.0;
        for ((((((x, r), &e), &e2), &sa), &sb), (&sc, &sd)) in u
            .iter_mut()
            .zip(propagator.iter())
            .zip(half.iter())
            .zip(full.iter())
            .zip(a.iter())
            .zip(b.iter())
            .zip(c.iter().zip(d.iter()))
        {
            *x = r.apply(*x) + (e2 * sa + e * (sb + sc) * 2.0 + sd) * sixth;
            let m = x.norm_sqr();
            total += m;
            peak = peak.max(m);
        }
        u[0].im = 0.0;
        let nyq = u.len() - 1;
        u[nyq].im = 0.0;

        state.time += dt;
        state.step_count += 1;
        if !total.is_finite() || peak.sqrt() > BLOWUP_THRESHOLD {
            return Err(Error::BlowUp { time: state.time });
        }
        Ok(())
    }

    pub fn advance(&mut self, state: &mut EvolverState, steps: u64) -> Result<()> {
        for _ in 0..steps {
            self.step(state)?;
        }
        Ok(())
    }
}

/// One integrating-factor RK4 step.  Builds a fresh [`Evolver`]; loops should
/// construct one and reuse it.
pub fn step(state: &EvolverState, spec: &ModelSpec, stepper: StepperConfig) -> Result<EvolverState> {
    let mut evolver = Evolver::new(spec, state.field.grid(), stepper)?;
    let mut next = state.clone();
    evolver.step(&mut next)?;
    Ok(next)
}

/// Receives simulation output as it is produced.
pub trait Observer {
    fn snapshot(&mut self, _time: f64, _field: &SpectralField) -> Result<()> {
        Ok(())
    }

    fn invariants(&mut self, _sample: &InvariantSample) -> Result<()> {
        Ok(())
    }

    fn carpet_row(&mut self, _time: f64, _field: &SpectralField) -> Result<()> {
        Ok(())
    }
}

/// Collects everything a simulation emits.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub snapshots: Vec<(f64, SpectralField)>,
    pub invariants: Vec<InvariantSample>,
    pub carpet: CarpetGrid,
}

impl Trajectory {
    pub fn new(grid: &Grid) -> Self {
        Self {
            snapshots: Vec::new(),
            invariants: Vec::new(),
            carpet: CarpetGrid::for_grid(grid),
        }
    }

    pub fn last_field(&self) -> Option<&SpectralField> {
        self.snapshots.last().map(|(_, f)| f)
    }
}

impl Observer for Trajectory {
    fn snapshot(&mut self, time: f64, field: &SpectralField) -> Result<()> {
        self.snapshots.push((time, field.clone()));
        Ok(())
    }

    fn invariants(&mut self, sample: &InvariantSample) -> Result<()> {
        self.invariants.push(*sample);
        Ok(())
    }

    fn carpet_row(&mut self, time: f64, field: &SpectralField) -> Result<()> {
        self.carpet.push_field(time, field)
    }
}

/// Reference times of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub steps: u64,
    pub dt: f64,
    pub final_time: f64,
    /// Named reference times such as the Burgers breaking time.
    pub marks: Vec<(String, f64)>,
    pub final_field: SpectralField,
}

/// Initial spectral field of a run configuration.
pub fn initial_field(config: &RunConfig) -> Result<SpectralField> {
    let grid = Grid::new(config.n, config.length)?;
    config.initial.to_field(&grid)
}

/// Burgers breaking time `1/max(−u₀')` of smooth initial data, if it steepens.
pub fn breaking_time(field: &SpectralField) -> Option<f64> {
    let slope = field.derivative(1).inverse();
    let steepest = slope.iter().cloned().fold(f64::INFINITY, f64::min);
    (steepest < 0.0).then(|| -1.0 / steepest)
}

/// Runs `config` to `t_end`, streaming snapshots every `snapshot_stride`
/// steps (and at the end), invariants every `invariant_stride` steps, and
/// `carpet_rows` carpet rows evenly spaced in step index.  The step is
/// shrunk slightly so that `t_end` is hit exactly.  On blow-up the outputs
/// produced so far have already been delivered to `observer`.
pub fn simulate(config: &RunConfig, observer: &mut dyn Observer) -> Result<RunSummary> {
    config.model.validate()?;
    let grid = Grid::new(config.n, config.length)?;
    let field0 = config.initial.to_field(&grid)?;
    let max_u = field0.inverse().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let dt_target = config.dt.unwrap_or_else(|| StepperConfig::advisory_dt(&grid, max_u));
    if !(config.t_end > 0.0) {
        return Err(Error::InvalidArgument("t_end must be positive".into()));
    }
    let steps = (config.t_end / dt_target).ceil().max(1.0) as u64;
    let dt = config.t_end / steps as f64;
    let stepper = StepperConfig {
        dt,
        dealias: config.dealias,
        scheme: Scheme::IntegratingFactorRk4,
    };
    let mut evolver = Evolver::new(&config.model, &grid, stepper)?;
    let mut state = evolver.initial_state(&field0, 0.0)?;

    let mut marks = Vec::new();
    if matches!(config.initial, InitialCondition::Cosine { .. }) {
        if let Some(tb) = breaking_time(&state.field) {
            marks.push(("t_B".to_string(), tb));
            marks.push(("t_ZK".to_string(), 3.6 * tb));
        }
    }

    let carpet_steps: Vec<u64> = match config.carpet_rows {
        0 => Vec::new(),
        1 => vec![0],
        rows => (0..rows)
            .map(|i| ((i as f64 * steps as f64) / (rows - 1) as f64).round() as u64)
            .collect(),
    };
    let mut next_carpet = 0usize;
    let snapshot_stride = config.snapshot_stride.max(1);
    let invariant_stride = config.invariant_stride.max(1);

    let mut emit = |state: &EvolverState, last: bool, observer: &mut dyn Observer| -> Result<()> {
        let s = state.step_count;
        if s % snapshot_stride == 0 || last {
            observer.snapshot(state.time, &state.field)?;
        }
        if s % invariant_stride == 0 || last {
            observer.invariants(&conserved::sample(&state.field, &config.model, state.time))?;
        }
        while next_carpet < carpet_steps.len() && carpet_steps[next_carpet] == s {
            observer.carpet_row(state.time, &state.field)?;
            next_carpet += 1;
        }
        Ok(())
    };

    emit(&state, steps == 0, observer)?;
    for i in 1..=steps {
        evolver.step(&mut state)?;
        if i == steps {
            state.time = config.t_end;
        }
        emit(&state, i == steps, observer)?;
    }
    Ok(RunSummary {
        steps,
        dt,
        final_time: state.time,
        marks,
        final_field: state.field,
    })
}

/// Breaking time of the cosine preset `cos(πx)` on `[0, 2)`.
pub const ZK_BREAKING_TIME: f64 = 1.0 / PI;

#[cfg(test)]
mod tests {
    use std::f64::consts::TAU;

    use super::*;
    use crate::linear::evolve_linear;

    fn band_limited(grid: &Grid, kmax: usize, seed: u64) -> SpectralField {
        // small deterministic LCG, enough for unit tests
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut f = SpectralField::zeros(grid);
        for k in 0..=kmax as i64 {
            f.set_coeff(k, Complex64::new(next(), next()) / (1.0 + k as f64))
                .unwrap();
        }
        f
    }

    #[test]
    fn nonlinear_term_examples() {
        let g = Grid::new(32, TAU).unwrap();
        assert_eq!(
            nonlinear_term(&SpectralField::zeros(&g), DealiasRule::TwoThirds).max_abs_coeff(),
            0.0
        );
        let a = 0.7;
        let mut f = SpectralField::zeros(&g);
        f.set_coeff(1, Complex64::new(a, 0.0)).unwrap();
        let nl = nonlinear_term(&f, DealiasRule::TwoThirds);
        assert!((nl.coeff(2) - Complex64::new(0.0, a * a)).norm() < 1e-15);
        assert!(nl.coeff(1).norm() < 1e-15);
    }

    #[test]
    fn rhs_examples() {
        let g = Grid::new(64, TAU).unwrap();
        let f = band_limited(&g, 10, 3);
        let lin = ModelSpec::linear_only(-1.0, 1.0);
        let r = rhs(&f, &lin, DealiasRule::TwoThirds).unwrap();
        for k in 0..=32 {
            let expect = f.coeff(k) * Complex64::new(0.0, lin.omega(&g, k));
            assert!((r.coeff(k) - expect).norm() < 1e-14);
        }

        let grbh = ModelSpec::grbh(6);
        let r = rhs(&f, &grbh, DealiasRule::TwoThirds).unwrap();
        assert!((7..=32).all(|k| r.coeff(k) == Complex64::new(0.0, 0.0)));
        assert!(rhs(&f, &ModelSpec::grbh(30), DealiasRule::TwoThirds).is_err());

        let forced = ModelSpec::akdvb(0.012, 1, 0.009, crate::dispersion::Forcing::sine(0.25));
        let r = rhs(&SpectralField::zeros(&g), &forced, DealiasRule::TwoThirds).unwrap();
        let f_hat = forced.forcing_spectrum(&g).unwrap();
        assert!(r.sub(&f_hat).max_abs_coeff() < 1e-16);
    }

    #[test]
    fn linear_steps_match_exact_propagator() {
        let g = Grid::new(64, TAU).unwrap();
        let f = band_limited(&g, 10, 9);
        let spec = ModelSpec::linear_only(-1.0, 1.0);
        let mut ev = Evolver::new(&spec, &g, StepperConfig::new(0.013)).unwrap();
        let mut state = ev.initial_state(&f, 0.0).unwrap();
        ev.advance(&mut state, 200).unwrap();
        let exact = evolve_linear(&f, &spec, state.time);
        let diff = state.field.sub(&exact).max_abs_coeff();
        assert!(diff < 1e-12, "{diff}");
    }

    #[test]
    fn blowup_is_reported() {
        let g = Grid::new(32, TAU).unwrap();
        let mut f = SpectralField::zeros(&g);
        f.set_coeff(1, Complex64::new(1e6, 0.0)).unwrap();
        let mut ev = Evolver::new(&ModelSpec::kdv(0.0), &g, StepperConfig::new(1.0)).unwrap();
        let mut state = ev.initial_state(&f, 0.0).unwrap();
        let err = ev.advance(&mut state, 50).unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }));
    }

    #[test]
    fn rejects_bad_step() {
        let g = Grid::new(32, TAU).unwrap();
        assert!(Evolver::new(&ModelSpec::kdv(1.0), &g, StepperConfig::new(0.0)).is_err());
    }
}
