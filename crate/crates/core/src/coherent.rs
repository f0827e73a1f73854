//! Travelling waves, shock tracking and the diagnostics applied to
//! dispersive fronts: a two-sidedness ratio for the oscillations flanking a
//! front and a prominence-based count of solitary peaks.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::carpet::CarpetGrid;
use crate::dispersion::ModelSpec;
use crate::error::{Error, Result};
use crate::linear::linear_fit;
use crate::spectral::{Grid, SpectralField};

/// Coefficients `(u²)_k` for `0 <= k <= kmax` of the band-limited field
/// whose non-negative coefficients are `coeffs`, computed without aliasing.
fn square_modes(coeffs: &[Complex64], length: f64, kmax: usize) -> Result<Vec<Complex64>> {
    let bw = coeffs.len().saturating_sub(1);
    let m = (bw + kmax + 2).next_power_of_two().max(2 * (bw + 1)).max(4);
    let grid = Grid::new(m, length)?;
    let mut half = vec![Complex64::new(0.0, 0.0); grid.modes()];
    half[..coeffs.len()].copy_from_slice(coeffs);
    let field = SpectralField::from_half_spectrum(&grid, half)?;
    let sq: Vec<f64> = field.inverse().iter().map(|v| v * v).collect();
    let out = SpectralField::forward(&grid, &sq)?;
    Ok(out.half_spectrum()[..=kmax].to_vec())
}

/// Steady profile `u(x − λt)` of a conservative family, truncated to modes
/// `|k| <= mode_cutoff`.
///
/// The profile solves `(Ω(k) + λκ_k)û_k = (κ_k/2)(u²)_k` for
/// `0 < k <= mode_cutoff`, with `Re û_{amplitude_mode}` pinned to
/// `amplitude` and `Im û_1 = 0` fixing the phase.  The mean `û_0` is an
/// unknown: it absorbs the Galilean freedom at fixed speed.
#[derive(Clone, Debug, PartialEq)]
pub struct TravellingWaveProblem {
    pub spec: ModelSpec,
    pub grid: Grid,
    pub lambda: f64,
    pub mode_cutoff: usize,
    pub amplitude_mode: usize,
    pub amplitude: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl TravellingWaveProblem {
    pub fn new(spec: ModelSpec, grid: Grid, lambda: f64, mode_cutoff: usize) -> Self {
        Self {
            spec,
            grid,
            lambda,
            mode_cutoff,
            amplitude_mode: 1,
            amplitude: 0.0,
            max_iterations: 50,
            tolerance: 1e-10,
        }
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    fn check(&self) -> Result<()> {
        if self.mode_cutoff < 1 || 3 * self.mode_cutoff >= self.grid.n() {
            return Err(Error::InvalidArgument(format!(
                "travelling-wave cutoff {} must satisfy 1 <= K and 3K < {}",
                self.mode_cutoff,
                self.grid.n()
            )));
        }
        if self.amplitude_mode == 0 || self.amplitude_mode > self.mode_cutoff {
            return Err(Error::InvalidArgument("amplitude mode outside 1..=K".into()));
        }
        if !self.spec.is_conservative() {
            return Err(Error::UndefinedFamily(self.spec.family.to_string()));
        }
        if !self.lambda.is_finite() {
            return Err(Error::InvalidArgument("wave speed must be finite".into()));
        }
        Ok(())
    }

    /// `Ω(k) + λκ_k`.
    fn linear_factor(&self, k: usize) -> f64 {
        let k = k as i64;
        self.spec.omega(&self.grid, k) + self.lambda * self.grid.wavenumber(k)
    }

    /// Residuals `R_k` for `k = 1..=K` of the coefficients `coeffs[0..=K]`.
    fn residual(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        let k_max = self.mode_cutoff;
        let sq = square_modes(coeffs, self.grid.length(), k_max)?;
        Ok((1..=k_max)
            .map(|k| {
                let kappa = self.grid.wavenumber(k as i64);
                self.linear_factor(k) * coeffs[k] - sq[k] * (kappa / 2.0)
            })
            .collect())
    }

    /// Residuals of an arbitrary field on the problem's modes.
    pub fn residual_norm(&self, field: &SpectralField) -> Result<f64> {
        let coeffs = &field.half_spectrum()[..=self.mode_cutoff];
        Ok(norm(&self.residual(coeffs)?))
    }

    /// Real unknowns: `a_0`, then `(a_k, b_k)` for `k = 1..=K` with the
    /// pinned `a_{amplitude_mode}` and `b_1` removed.
    fn unknown_slots(&self) -> Vec<(usize, bool)> {
        let mut slots = vec![(0, false)];
        for k in 1..=self.mode_cutoff {
            if k != self.amplitude_mode {
                slots.push((k, false));
            }
            if k != 1 {
                slots.push((k, true));
            }
        }
        slots
    }

    fn jacobian(&self, coeffs: &[Complex64]) -> DMatrix<f64> {
        let k_max = self.mode_cutoff as i64;
        let at = |m: i64| -> Complex64 {
            if m.unsigned_abs() as i64 > k_max {
                Complex64::new(0.0, 0.0)
            } else if m >= 0 {
                coeffs[m as usize]
            } else {
                coeffs[(-m) as usize].conj()
            }
        };
        let slots = self.unknown_slots();
        let rows = 2 * self.mode_cutoff;
        let mut jac = DMatrix::zeros(rows, slots.len());
        for k in 1..=k_max {
            let kappa = self.grid.wavenumber(k);
            for (col, &(j, imag)) in slots.iter().enumerate() {
                let j = j as i64;
                // derivative of (u²)_k with respect to the real unknown
                let d_conv = if j == 0 {
                    at(k) * 2.0
                } else if imag {
                    (at(k - j) - at(k + j)) * Complex64::new(0.0, 2.0)
                } else {
                    (at(k - j) + at(k + j)) * 2.0
                };
                let mut d = -d_conv * (kappa / 2.0);
                if j == k {
                    let lin = self.linear_factor(k as usize);
                    d += if imag {
                        Complex64::new(0.0, lin)
                    } else {
                        Complex64::new(lin, 0.0)
                    };
                }
                let row = 2 * (k as usize - 1);
                jac[(row, col)] = d.re;
                jac[(row + 1, col)] = d.im;
            }
        }
        jac
    }
}

fn norm(r: &[Complex64]) -> f64 {
    r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Clone, Debug)]
pub struct TravellingWave {
    pub field: SpectralField,
    pub lambda: f64,
    /// Euclidean norm of the residuals `R_k`, `k = 1..=K`.
    pub residual: f64,
    pub iterations: usize,
}

/// Damped Gauss–Newton iteration from `initial_guess`.  The pinned
/// coefficients are overwritten with the constraint values before starting.
pub fn solve_travelling_wave(
    problem: &TravellingWaveProblem,
    initial_guess: &SpectralField,
) -> Result<TravellingWave> {
    problem.check()?;
    if initial_guess.grid() != &problem.grid {
        return Err(Error::InvalidArgument("initial guess lives on another grid".into()));
    }
    if initial_guess.max_abs_coeff() == 0.0 && problem.amplitude == 0.0 {
        return Err(Error::InvalidArgument("initial guess is identically zero".into()));
    }
    let k_max = problem.mode_cutoff;
    let mut coeffs: Vec<Complex64> = initial_guess.half_spectrum()[..=k_max].to_vec();
    coeffs[0].im = 0.0;
    coeffs[problem.amplitude_mode].re = problem.amplitude;
    coeffs[1].im = 0.0;
    let slots = problem.unknown_slots();

    let mut residual = problem.residual(&coeffs)?;
    let mut res_norm = norm(&residual);
    let mut iterations = 0;
    loop {
        let jac = problem.jacobian(&coeffs);
        let svd = jac.svd(true, true);
        let sigma_max = svd.singular_values.max();
        let sigma_min = svd.singular_values.min();
        if !(sigma_min > 1e-12 * sigma_max.max(1.0)) {
            return Err(Error::SingularJacobian { sigma_min });
        }
        if res_norm < problem.tolerance {
            break;
        }
        if iterations == problem.max_iterations {
            return Err(Error::NoConvergence {
                iterations,
                residual: res_norm,
            });
        }
        iterations += 1;
        let rhs = DVector::from_iterator(
            2 * k_max,
            residual.iter().flat_map(|c| [-c.re, -c.im]),
        );
        let delta = svd
            .solve(&rhs, 0.0)
            .map_err(|e| Error::Analysis(format!("least-squares solve failed: {e}")))?;

        let mut step = 1.0;
        loop {
            let mut trial = coeffs.clone();
            for (&(k, imag), d) in slots.iter().zip(delta.iter()) {
                if imag {
                    trial[k].im += step * d;
                } else {
                    trial[k].re += step * d;
                }
            }
            let trial_res = problem.residual(&trial)?;
            let trial_norm = norm(&trial_res);
            if trial_norm < res_norm || step < 1e-3 {
                coeffs = trial;
                residual = trial_res;
                res_norm = trial_norm;
                break;
            }
            step *= 0.5;
        }
        if !res_norm.is_finite() {
            return Err(Error::NoConvergence {
                iterations,
                residual: res_norm,
            });
        }
    }

    let mut half = vec![Complex64::new(0.0, 0.0); problem.grid.modes()];
    half[..=k_max].copy_from_slice(&coeffs);
    Ok(TravellingWave {
        field: SpectralField::from_half_spectrum(&problem.grid, half)?,
        lambda: problem.lambda,
        residual: res_norm,
        iterations,
    })
}

/// Speed at which the linearized problem admits the single-mode solution
/// `e^{iκ_k x}`: `λ = −Ω(k)/κ_k`.
pub fn bifurcation_speed(spec: &ModelSpec, grid: &Grid, k: i64) -> f64 {
    -spec.omega(grid, k) / grid.wavenumber(k)
}

/// Follows the branch through `amplitudes`, starting from the linear mode
/// `û_{amplitude_mode} = amplitudes[0]` and using each converged profile as
/// the guess for the next amplitude.
pub fn continue_travelling_wave(
    problem: &TravellingWaveProblem,
    amplitudes: &[f64],
) -> Result<Vec<TravellingWave>> {
    let mut out: Vec<TravellingWave> = Vec::with_capacity(amplitudes.len());
    for &a in amplitudes {
        let p = problem.clone().with_amplitude(a);
        let guess = match out.last() {
            Some(prev) => prev.field.clone(),
            None => {
                let mut g = SpectralField::zeros(&problem.grid);
                g.set_coeff(problem.amplitude_mode as i64, Complex64::new(a, 0.0))?;
                g
            }
        };
        out.push(solve_travelling_wave(&p, &guess)?);
    }
    Ok(out)
}

/// Multipliers `(λ_E, λ_M)` making a travelling wave of speed `λ` a
/// critical point of `H − λ_E E − λ_M M`: `λ_E = −λ/2` and `λ_M` cancels
/// the mean component.
pub fn travelling_wave_multipliers(field: &SpectralField, lambda: f64) -> Result<[f64; 2]> {
    let bw = field.bandwidth();
    let sq = square_modes(&field.half_spectrum()[..=bw], field.grid().length(), 0)?;
    let lambda_e = -lambda / 2.0;
    Ok([lambda_e, -sq[0].re / 2.0 - 2.0 * lambda_e * field.coeff(0).re])
}

/// L² norm of `δH/δu − λ_E δE/δu − λ_M δM/δu` on the modes
/// `|k| <= bandwidth(field)`.  `lambdas` pairs with `(E, M)`; missing
/// entries are zero.
pub fn torus_residual(field: &SpectralField, spec: &ModelSpec, lambdas: &[f64]) -> Result<f64> {
    if lambdas.len() > 2 {
        return Err(Error::InvalidArgument(
            "multipliers are defined for energy and mass only".into(),
        ));
    }
    let lambda_e = lambdas.first().copied().unwrap_or(0.0);
    let lambda_m = lambdas.get(1).copied().unwrap_or(0.0);
    let grid = field.grid();
    let bw = field.bandwidth().min(grid.nyquist() - 1);
    let coeffs = &field.half_spectrum()[..=bw];
    let sq = if spec.nonlinear {
        square_modes(coeffs, grid.length(), bw)?
    } else {
        vec![Complex64::new(0.0, 0.0); bw + 1]
    };
    let mut total = 0.0;
    for k in 0..=bw {
        let weight = spec.hamiltonian_weight(grid, k as i64);
        let mut r = coeffs[k] * weight - sq[k] / 2.0 - coeffs[k] * (2.0 * lambda_e);
        if k == 0 {
            r -= lambda_m;
        }
        total += if k == 0 { r.norm_sqr() } else { 2.0 * r.norm_sqr() };
    }
    Ok((grid.length() * total).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    /// Steepest descent of `u`: the front sits at the minimum of `∂_x u`.
    Shock,
    /// Steepest ascent: the maximum of `∂_x u`.
    Antishock,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrackerConfig {
    /// Width, as a fraction of the Nyquist index, of the Gaussian low-pass
    /// `exp(−(k/k_s)²)` applied before locating the front; 0 disables it.
    pub smoothing: f64,
    /// When set, each row is searched only within this distance of the
    /// previous position.
    pub search_radius: Option<f64>,
    /// Rows whose extremal slope magnitude falls below this are rejected.
    pub min_steepness: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            smoothing: 0.0,
            search_radius: None,
            min_steepness: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShockTrace {
    pub polarity: Polarity,
    pub times: Vec<f64>,
    /// Unwrapped positions: consecutive entries differ by less than `L/2`.
    pub positions: Vec<f64>,
    /// `∂_x u` at the front.
    pub steepness: Vec<f64>,
    pub velocity: f64,
    pub intercept: f64,
    /// RMS deviation of the positions from the fitted line.
    pub residual_rms: f64,
}

impl ShockTrace {
    /// Refits velocity and residual on the samples with `t` in `[t0, t1]`.
    pub fn fit_window(&self, t0: f64, t1: f64) -> Result<(f64, f64)> {
        let (t, x): (Vec<f64>, Vec<f64>) = self
            .times
            .iter()
            .zip(&self.positions)
            .filter(|(t, _)| **t >= t0 && **t <= t1)
            .map(|(t, x)| (*t, *x))
            .unzip();
        if t.len() < 3 {
            return Err(Error::Analysis("fewer than three samples in window".into()));
        }
        let (v, _, rms) = linear_fit(&t, &x);
        Ok((v, rms))
    }
}

fn smoothed_slope(field: &SpectralField, smoothing: f64) -> SpectralField {
    let slope = field.derivative(1);
    if smoothing <= 0.0 {
        return slope;
    }
    let ks = smoothing * field.grid().nyquist() as f64;
    slope.map_modes(|k, c| c * (-(k as f64 / ks).powi(2)).exp())
}

/// Position and slope of the front of `field` with the given polarity.
///
/// The extremum of the (optionally smoothed) slope on the grid is refined
/// by a parabola through its neighbours and then polished by Newton steps
/// on the band-limited interpolant.
pub fn locate_front(
    field: &SpectralField,
    polarity: Polarity,
    config: &TrackerConfig,
    near: Option<f64>,
) -> Result<(f64, f64)> {
    let grid = field.grid();
    let n = grid.n();
    let dx = grid.dx();
    let length = grid.length();
    let sign = match polarity {
        Polarity::Shock => 1.0,
        Polarity::Antishock => -1.0,
    };
    let slope = smoothed_slope(field, config.smoothing);
    let g: Vec<f64> = slope.inverse().iter().map(|v| sign * v).collect();

    let in_range = |j: usize| match (near, config.search_radius) {
        (Some(x0), Some(r)) => {
            let d = grid.x(j) - x0;
            (d - length * (d / length).round()).abs() <= r
        }
        _ => true,
    };
    let (j, gmin) = g
        .iter()
        .enumerate()
        .filter(|(j, _)| in_range(*j))
        .fold((usize::MAX, f64::INFINITY), |best, (j, &v)| {
            if v < best.1 {
                (j, v)
            } else {
                best
            }
        });
    if j == usize::MAX || !(-gmin >= config.min_steepness) {
        return Err(Error::FeatureAbsent(format!(
            "extremal slope {:e} below threshold {:e}",
            -gmin, config.min_steepness
        )));
    }

    let (gl, gr) = (g[(j + n - 1) % n], g[(j + 1) % n]);
    let curvature = gl - 2.0 * gmin + gr;
    let mut offset = if curvature > 0.0 {
        (0.5 * (gl - gr) / curvature).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    let mut x = grid.x(j) + offset * dx;

    let second = slope.derivative(1);
    let third = second.derivative(1);
    for _ in 0..8 {
        let d1 = second.evaluate_at(x);
        let d2 = third.evaluate_at(x);
        if !(sign * d2 > 0.0) {
            break;
        }
        let step = d1 / d2;
        let next_offset = offset - step / dx;
        if next_offset.abs() > 1.0 {
            break;
        }
        offset = next_offset;
        x -= step;
        if step.abs() < 1e-14 * length {
            break;
        }
    }
    let x = x.rem_euclid(length);
    Ok((x, slope.evaluate_at(x)))
}

/// Tracks one front through the rows of `carpet`, using the default
/// tracker settings.
pub fn track_shock(carpet: &CarpetGrid, polarity: Polarity) -> Result<ShockTrace> {
    track_shock_with(carpet, polarity, &TrackerConfig::default())
}

pub fn track_shock_with(
    carpet: &CarpetGrid,
    polarity: Polarity,
    config: &TrackerConfig,
) -> Result<ShockTrace> {
    if carpet.rows() < 3 {
        return Err(Error::InvalidArgument("shock tracking needs at least three rows".into()));
    }
    if carpet.times().windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("carpet times must increase".into()));
    }
    let grid = carpet.grid()?;
    let fields = (0..carpet.rows())
        .map(|i| SpectralField::forward(&grid, carpet.row(i)))
        .collect::<Result<Vec<_>>>()?;
    track_fields(carpet.times(), &fields, polarity, config)
}

/// Tracks one front through a sequence of spectral fields.
pub fn track_fields(
    times: &[f64],
    fields: &[SpectralField],
    polarity: Polarity,
    config: &TrackerConfig,
) -> Result<ShockTrace> {
    if times.len() != fields.len() || times.len() < 3 {
        return Err(Error::InvalidArgument(
            "shock tracking needs at least three samples with matching times".into(),
        ));
    }
    let length = fields[0].grid().length();
    let mut positions: Vec<f64> = Vec::with_capacity(fields.len());
    let mut steepness = Vec::with_capacity(fields.len());
    for field in fields {
        let near = positions.last().map(|p| p.rem_euclid(length));
        let (x, s) = locate_front(field, polarity, config, near)?;
        let unwrapped = match positions.last() {
            None => x,
            Some(&prev) => {
                let d = x - prev.rem_euclid(length);
                prev + d - length * (d / length).round()
            }
        };
        positions.push(unwrapped);
        steepness.push(s);
    }
    let (velocity, intercept, residual_rms) = linear_fit(times, &positions);
    Ok(ShockTrace {
        polarity,
        times: times.to_vec(),
        positions,
        steepness,
        velocity,
        intercept,
        residual_rms,
    })
}

/// Ratio of the detrended RMS of `profile` in a window of width `window`
/// left of `shock_x` to that in the mirror window on the right; each window
/// starts `guard` away from the front.  Samples are at `x_j = jL/n`.
pub fn two_sided_oscillation_metric(
    profile: &[f64],
    length: f64,
    shock_x: f64,
    window: f64,
    guard: f64,
) -> Result<f64> {
    let n = profile.len();
    if n < 4 || !(length > 0.0) {
        return Err(Error::InvalidArgument("profile too short".into()));
    }
    if !(window > 0.0 && guard >= 0.0) || 2.0 * (window + guard) > length {
        return Err(Error::InvalidArgument(format!(
            "windows of width {window} with guard {guard} do not fit in period {length}"
        )));
    }
    let dx = length / n as f64;
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (j, &v) in profile.iter().enumerate() {
        let d = j as f64 * dx - shock_x;
        let d = d - length * (d / length).round();
        if d < -guard && d >= -(guard + window) {
            left.push(v);
        } else if d > guard && d <= guard + window {
            right.push(v);
        }
    }
    if left.len() < 2 || right.len() < 2 {
        return Err(Error::InvalidArgument(
            "window holds fewer than two samples".into(),
        ));
    }
    let rms = |w: &[f64]| {
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        (w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / w.len() as f64).sqrt()
    };
    let (l, r) = (rms(&left), rms(&right));
    if r == 0.0 {
        return Err(Error::Analysis("right window is flat".into()));
    }
    Ok(l / r)
}

/// Number of local maxima of the periodic `profile` whose prominence (height
/// above the higher of the two minima separating it from higher ground)
/// exceeds `prominence`.
pub fn count_solitary_peaks(profile: &[f64], prominence: f64) -> usize {
    peak_prominences(profile)
        .into_iter()
        .filter(|&(_, p)| p > prominence)
        .count()
}

/// Local maxima of the periodic `profile` with their prominences.  A
/// plateau counts once, at its first sample.
pub fn peak_prominences(profile: &[f64]) -> Vec<(usize, f64)> {
    let n = profile.len();
    if n < 3 {
        return Vec::new();
    }
    let start = profile
        .iter()
        .enumerate()
        .fold(0, |best, (j, &v)| if v < profile[best] { j } else { best });
    // rotated so that index 0 holds the global minimum, closed at both ends
    let mut p: Vec<f64> = (0..n).map(|j| profile[(start + j) % n]).collect();
    p.push(p[0]);

    let mut out = Vec::new();
    let mut i = 1;
    while i < n {
        if p[i] > p[i - 1] {
            let mut end = i;
            while end + 1 < p.len() && p[end + 1] == p[i] {
                end += 1;
            }
            if end + 1 < p.len() && p[end + 1] < p[i] {
                let peak = p[i];
                let mut left_min = peak;
                let mut l = i;
                while l > 0 {
                    l -= 1;
                    if p[l] > peak {
                        break;
                    }
                    left_min = left_min.min(p[l]);
                }
                let mut right_min = peak;
                for &v in &p[end + 1..] {
                    if v > peak {
                        break;
                    }
                    right_min = right_min.min(v);
                }
                out.push(((i + start) % n, peak - left_min.max(right_min)));
            }
            i = end + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Default peak-prominence threshold: a fixed fraction of the profile range.
pub const PROMINENCE_FRACTION: f64 = 0.05;

pub fn default_prominence(profile: &[f64]) -> f64 {
    let (lo, hi) = profile
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    PROMINENCE_FRACTION * (hi - lo)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{PI, TAU};

    use super::*;

    #[test]
    fn peaks_examples() {
        let n = 256;
        let pulse: Vec<f64> = (0..n)
            .map(|j| {
                let x = j as f64 / n as f64;
                if (x - 0.5).abs() < 0.25 {
                    0.5 * (1.0 + (4.0 * PI * (x - 0.5)).cos())
                } else {
                    0.0
                }
            })
            .collect();
        assert_eq!(count_solitary_peaks(&pulse, 0.05), 1);
        assert_eq!(count_solitary_peaks(&[0.3; 64], 0.05), 0);
        let three: Vec<f64> = (0..n).map(|j| (3.0 * TAU * j as f64 / n as f64).cos()).collect();
        assert_eq!(count_solitary_peaks(&three, 0.05), 3);
        // a ripple on a shoulder has small prominence
        let shoulder: Vec<f64> = (0..n)
            .map(|j| {
                let x = TAU * j as f64 / n as f64;
                x.sin() + 0.01 * (20.0 * x).sin()
            })
            .collect();
        assert_eq!(count_solitary_peaks(&shoulder, 0.05), 1);
    }

    #[test]
    fn metric_symmetric_profile() {
        let n = 512;
        let length = 2.0;
        let shock = 1.0;
        let p: Vec<f64> = (0..n)
            .map(|j| {
                let d = j as f64 * length / n as f64 - shock;
                (d * 40.0).cos() * (-d * d).exp()
            })
            .collect();
        let r = two_sided_oscillation_metric(&p, length, shock, 0.3, 0.05).unwrap();
        assert!((r - 1.0).abs() < 1e-12);
        assert!(two_sided_oscillation_metric(&p, length, shock, 0.0, 0.05).is_err());
        assert!(two_sided_oscillation_metric(&p, length, shock, 0.9, 0.2).is_err());
    }

    #[test]
    fn tracks_translating_tanh() {
        let g = Grid::new(256, TAU).unwrap();
        let c = 0.3;
        let w = 0.3;
        let mut carpet = CarpetGrid::for_grid(&g);
        for i in 0..11 {
            let t = i as f64 * 0.2;
            let row: Vec<f64> = g
                .points()
                .iter()
                .map(|&x| {
                    // descending front at π + ct, ascending one at ct
                    -((x - PI - c * t).sin() / w).tanh()
                })
                .collect();
            carpet.push_row(t, &row).unwrap();
        }
        let trace = track_shock(&carpet, Polarity::Shock).unwrap();
        assert!((trace.velocity - c).abs() < 1e-3, "{}", trace.velocity);
        assert!(trace.residual_rms < 1e-6, "{:?}", trace.positions);
        assert!((trace.positions[0] - PI).abs() < 1e-6);
    }

    #[test]
    fn flat_carpet_has_no_front() {
        let g = Grid::new(32, TAU).unwrap();
        let mut carpet = CarpetGrid::for_grid(&g);
        for i in 0..3 {
            carpet.push_row(i as f64, &[1.0; 32]).unwrap();
        }
        assert!(matches!(
            track_shock(&carpet, Polarity::Shock),
            Err(Error::FeatureAbsent(_))
        ));
    }

    #[test]
    fn torus_residual_trivial_cases() {
        let g = Grid::new(32, TAU).unwrap();
        let spec = ModelSpec::akdv(1.0, -1.0);
        assert_eq!(torus_residual(&SpectralField::zeros(&g), &spec, &[0.3, 0.0]).unwrap(), 0.0);
        let mut f = SpectralField::zeros(&g);
        f.set_coeff(2, Complex64::new(0.1, 0.2)).unwrap();
        f.set_coeff(5, Complex64::new(-0.1, 0.05)).unwrap();
        assert!(torus_residual(&f, &spec, &[0.3, 0.1]).unwrap() > 0.0);
    }

    #[test]
    fn bifurcation_speeds() {
        let g = Grid::new(32, TAU).unwrap();
        let spec = ModelSpec::akdv(-1.0, 1.0);
        assert_eq!(bifurcation_speed(&spec, &g, 1), -1.0);
        assert_eq!(bifurcation_speed(&spec, &g, 2), 4.0);
        let spec = ModelSpec::kdv(0.5);
        assert_eq!(bifurcation_speed(&spec, &g, 3), -4.5);
    }

    #[test]
    fn small_wave_converges() {
        let g = Grid::new(64, TAU).unwrap();
        let spec = ModelSpec::akdv(-1.0, 1.0);
        let problem = TravellingWaveProblem::new(spec.clone(), g.clone(), -1.0, 16);
        let branch = continue_travelling_wave(&problem, &[0.01, 0.02, 0.05]).unwrap();
        let wave = branch.last().unwrap();
        assert!(wave.residual < 1e-10);
        let lambdas = travelling_wave_multipliers(&wave.field, wave.lambda).unwrap();
        assert!(torus_residual(&wave.field, &spec, &lambdas).unwrap() < 1e-9);
    }

    #[test]
    fn resonant_speed_at_tiny_amplitude_is_singular() {
        let g = Grid::new(64, TAU).unwrap();
        let spec = ModelSpec::akdv(-1.0, 1.0);
        // λ = 4 = −Ω(2)/κ_2
        let problem = TravellingWaveProblem::new(spec, g.clone(), 4.0, 8).with_amplitude(1e-20);
        let err = solve_travelling_wave(&problem, &SpectralField::zeros(&g)).unwrap_err();
        assert!(matches!(err, Error::SingularJacobian { .. }), "{err:?}");
        let zero = problem.with_amplitude(0.0);
        assert!(solve_travelling_wave(&zero, &SpectralField::zeros(&g)).is_err());
    }
}
