//! Exact evolution of the linearised equations, piecewise-constant initial
//! data with analytic Fourier coefficients, and the piecewise-constancy test
//! for solutions at rational multiples of π.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::carpet::CarpetGrid;
use crate::dispersion::{LinearTable, ModelSpec};
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

/// The time `π·p/q`, stored in lowest terms with `q >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RationalTime {
    p: i64,
    q: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl RationalTime {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("denominator must be non-zero".into()));
        }
        let g = gcd(p, q).max(1);
        let sign = q.signum();
        Ok(Self {
            p: sign * p / g,
            q: sign * q / g,
        })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn value(&self) -> f64 {
        PI * self.p as f64 / self.q as f64
    }

    /// Best continued-fraction approximant `p/q ≈ ratio` with `q <= max_q`;
    /// the represented time is `π·p/q`.
    pub fn approximant(ratio: f64, max_q: i64) -> Result<Self> {
        if !ratio.is_finite() || max_q < 1 {
            return Err(Error::InvalidArgument(format!(
                "cannot approximate {ratio} with denominators up to {max_q}"
            )));
        }
        let (mut h0, mut h1) = (0i64, 1i64);
        let (mut k0, mut k1) = (1i64, 0i64);
        let mut x = ratio;
        loop {
            let a = x.floor();
            let a_int = a as i64;
            let k2 = a_int.saturating_mul(k1).saturating_add(k0);
            if k2 > max_q {
                break;
            }
            let h2 = a_int.saturating_mul(h1).saturating_add(h0);
            (h0, h1, k0, k1) = (h1, h2, k1, k2);
            let frac = x - a;
            if frac.abs() < 1e-15 {
                break;
            }
            x = 1.0 / frac;
        }
        Self::new(h1, k1)
    }
}

/// Evolution time: either an ordinary real value or an exact rational
/// multiple of π.  The latter lets integer frequencies be reduced modulo `2π`
/// without rounding, so revivals come back bit-for-bit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EvolutionTime {
    Real(f64),
    PiRational(RationalTime),
}

impl EvolutionTime {
    pub fn value(&self) -> f64 {
        match self {
            EvolutionTime::Real(t) => *t,
            EvolutionTime::PiRational(r) => r.value(),
        }
    }

    fn phase(&self, omega: f64) -> f64 {
        const EXACT: f64 = 9_007_199_254_740_992.0;
        match self {
            EvolutionTime::PiRational(r) if omega.fract() == 0.0 && omega.abs() < EXACT => {
                let turns = (omega as i128 * r.p as i128).rem_euclid(2 * r.q as i128);
                PI * turns as f64 / r.q as f64
            }
            other => omega * other.value(),
        }
    }
}

impl From<f64> for EvolutionTime {
    fn from(t: f64) -> Self {
        EvolutionTime::Real(t)
    }
}

impl From<RationalTime> for EvolutionTime {
    fn from(t: RationalTime) -> Self {
        EvolutionTime::PiRational(t)
    }
}

/// `û_k(t) = û_k(0)·exp((iΩ(k) − νκ_k²) t)`.
pub fn evolve_linear(
    field: &SpectralField,
    spec: &ModelSpec,
    t: impl Into<EvolutionTime>,
) -> SpectralField {
    let t = t.into();
    let table = LinearTable::new(spec, field.grid());
    let time = t.value();
    field.map_modes(|k, c| {
        let k = k as usize;
        let decay = if table.damping[k] == 0.0 {
            1.0
        } else {
            (-table.damping[k] * time).exp()
        };
        c * Complex64::from_polar(decay, t.phase(table.omega[k]))
    })
}

/// Piecewise-constant initial data.
#[derive(Clone, Debug, PartialEq)]
pub enum StepData {
    /// 0 on `(0, L/2)`, 1 on `(L/2, L)`.
    UnitStep,
    /// 0 on `x/L ∈ (0, 1/8) ∪ (3/8, 1/2)`, 1 on `(1/8, 3/8) ∪ (1/2, 1)`.
    DoubleStep,
    /// `values[i]` on `[breakpoints[i], breakpoints[i+1])`, the last segment
    /// wrapping around to `breakpoints[0] + L`.
    Custom {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
}

impl StepData {
    /// Breakpoints as fractions of the period, with their segment values.
    fn segments(&self, length: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let (fractions, values) = match self {
            StepData::UnitStep => (vec![0.0, 0.5], vec![0.0, 1.0]),
            StepData::DoubleStep => (
                vec![0.0, 0.125, 0.375, 0.5],
                vec![0.0, 1.0, 0.0, 1.0],
            ),
            StepData::Custom {
                breakpoints,
                values,
            } => {
                if breakpoints.is_empty() || breakpoints.len() != values.len() {
                    return Err(Error::InvalidArgument(
                        "step data needs one value per breakpoint".into(),
                    ));
                }
                if breakpoints.windows(2).any(|w| !(w[0] < w[1]))
                    || breakpoints[0] < 0.0
                    || *breakpoints.last().unwrap() >= length
                {
                    return Err(Error::InvalidArgument(
                        "breakpoints must increase strictly within [0, L)".into(),
                    ));
                }
                (
                    breakpoints.iter().map(|b| b / length).collect(),
                    values.clone(),
                )
            }
        };
        Ok((fractions, values))
    }

    /// Point value, using the two-sided average at a discontinuity.
    pub fn value_at(&self, x: f64, length: f64) -> Result<f64> {
        let (fr, vals) = self.segments(length)?;
        let s = (x / length).rem_euclid(1.0);
        let m = fr.len();
        for i in 0..m {
            if s == fr[i] {
                return Ok(0.5 * (vals[i] + vals[(i + m - 1) % m]));
            }
        }
        let seg = fr.iter().rposition(|&b| b <= s).unwrap_or(m - 1);
        Ok(vals[seg])
    }
}

/// Exact Fourier coefficients of piecewise-constant data, truncated to the
/// symmetric band `|k| < n/2` (the Nyquist mode is left at zero).
pub fn step_initial_data(data: &StepData, grid: &Grid) -> Result<SpectralField> {
    let length = grid.length();
    let (fractions, values) = data.segments(length)?;
    let m = fractions.len();
    let mut field = SpectralField::zeros(grid);
    let mean: f64 = (0..m)
        .map(|i| {
            let end = if i + 1 < m { fractions[i + 1] } else { fractions[0] + 1.0 };
            values[i] * (end - fractions[i])
        })
        .sum();
    field.set_coeff(0, Complex64::new(mean, 0.0))?;
    let unit_phase = |k: i64, s: f64| {
        let turns = (k as f64 * s).rem_euclid(1.0);
        Complex64::from_polar(1.0, -TAU * turns)
    };
    for k in 1..grid.nyquist() as i64 {
        let twopik = TAU * k as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..m {
            let start = fractions[i];
            let end = if i + 1 < m { fractions[i + 1] } else { fractions[0] + 1.0 };
            acc += values[i] * (unit_phase(k, start) - unit_phase(k, end));
        }
        // (1/L)∫ e^{-iκx} over a segment = (e^{-iκa} − e^{-iκb}) / (i·2πk)
        field.set_coeff(k, acc / Complex64::new(0.0, twopik))?;
    }
    Ok(field)
}

#[derive(Clone, Debug)]
pub struct ConstancyReport {
    /// Partition used: `2q` subintervals of width `L/(2q)`.
    pub partition: RationalTime,
    pub interval_ranges: Vec<f64>,
    /// Mean of the interior samples of each subinterval.
    pub interval_values: Vec<f64>,
    pub global_range: f64,
    /// `max_j range_j / global_range`; zero when the field is constant.
    pub statistic: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Tests whether `field` is constant on each subinterval
/// `jL/(2q) < x < (j+1)L/(2q)`, ignoring a buffer of `buffer_fraction` of the
/// subinterval width at both ends (where Gibbs oscillations of the truncated
/// series live).  Samples are the grid points.
pub fn revival_constancy(
    field: &SpectralField,
    partition: RationalTime,
    samples_per_interval: usize,
    buffer_fraction: f64,
    tolerance: f64,
) -> Result<ConstancyReport> {
    if samples_per_interval < 8 {
        return Err(Error::InvalidArgument(
            "need at least 8 samples per subinterval".into(),
        ));
    }
    if !(buffer_fraction > 0.0 && buffer_fraction < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "buffer fraction must lie in (0, 0.5), got {buffer_fraction}"
        )));
    }
    if !(tolerance > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let n = field.grid().n();
    let parts = 2 * partition.q() as usize;
    let samples = field.inverse();
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); parts];
    for (j, &v) in samples.iter().enumerate() {
        let scaled = j * parts;
        let idx = scaled / n;
        let frac = (scaled % n) as f64 / n as f64;
        if frac >= buffer_fraction && frac <= 1.0 - buffer_fraction {
            buckets[idx].push(v);
        }
    }
    if let Some(short) = buckets.iter().map(Vec::len).min() {
        if short < samples_per_interval {
            return Err(Error::InvalidArgument(format!(
                "q = {} too large for {n} points: only {short} interior samples per subinterval",
                partition.q()
            )));
        }
    }
    let range = |vals: &[f64]| {
        let (lo, hi) = vals
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        hi - lo
    };
    let interval_ranges: Vec<f64> = buckets.iter().map(|b| range(b)).collect();
    let interval_values = buckets
        .iter()
        .map(|b| b.iter().sum::<f64>() / b.len() as f64)
        .collect();
    let all: Vec<f64> = buckets.concat();
    let global_range = range(&all);
    let worst = interval_ranges.iter().cloned().fold(0.0, f64::max);
    let statistic = if global_range > 0.0 {
        worst / global_range
    } else {
        0.0
    };
    Ok(ConstancyReport {
        partition,
        interval_ranges,
        interval_values,
        global_range,
        statistic,
        tolerance,
        pass: statistic < tolerance,
    })
}

/// Row `i` holds the real-space samples of `evolve_linear(field0, spec, times[i])`.
pub fn linear_carpet(field0: &SpectralField, spec: &ModelSpec, times: &[f64]) -> Result<CarpetGrid> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("carpet needs at least one time".into()));
    }
    if times.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidArgument("carpet times must increase".into()));
    }
    let mut carpet = CarpetGrid::for_grid(field0.grid());
    for &t in times {
        carpet.push_field(t, &evolve_linear(field0, spec, t))?;
    }
    Ok(carpet)
}

/// Phase velocity of mode `k` measured from a carpet: the unwrapped phase of
/// `û_k` in each row is fitted linearly in time, and the pattern moves with
/// velocity `−(dφ/dt)/κ_k`.
pub fn phase_velocity(carpet: &CarpetGrid, k: i64) -> Result<f64> {
    if carpet.rows() < 2 {
        return Err(Error::InvalidArgument("need at least two carpet rows".into()));
    }
    let grid = carpet.grid()?;
    let mut phases: Vec<f64> = Vec::with_capacity(carpet.rows());
    for i in 0..carpet.rows() {
        let c = SpectralField::forward(&grid, carpet.row(i))?.coeff(k);
        if c.norm() == 0.0 {
            return Err(Error::Analysis(format!("mode {k} vanishes in row {i}")));
        }
        let raw = c.arg();
        let unwrapped = match phases.last() {
            None => raw,
            Some(&prev) => prev + (raw - prev + PI).rem_euclid(TAU) - PI,
        };
        phases.push(unwrapped);
    }
    let (slope, _, _) = linear_fit(carpet.times(), &phases);
    Ok(-slope / grid.wavenumber(k))
}

/// Least-squares line `y ≈ a·x + b`; returns `(a, b, rms residual)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rms = (x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::new(n, TAU).unwrap()
    }

    #[test]
    fn rational_time_reduces() {
        let r = RationalTime::new(4, -6).unwrap();
        assert_eq!((r.p(), r.q()), (-2, 3));
        assert!(RationalTime::new(1, 0).is_err());
        let a = RationalTime::approximant(std::f64::consts::SQRT_2 - 1.0, 12).unwrap();
        assert_eq!((a.p(), a.q()), (5, 12));
        let a = RationalTime::approximant(0.5, 100).unwrap();
        assert_eq!((a.p(), a.q()), (1, 2));
    }

    #[test]
    fn unit_step_coefficients() {
        let f = step_initial_data(&StepData::UnitStep, &grid(64)).unwrap();
        let close = |a: Complex64, b: Complex64| (a - b).norm() < 1e-16;
        assert!(close(f.coeff(0), Complex64::new(0.5, 0.0)));
        assert!(close(f.coeff(1), Complex64::new(0.0, 1.0 / PI)));
        assert!(close(f.coeff(2), Complex64::new(0.0, 0.0)));
        assert!(close(f.coeff(3), Complex64::new(0.0, 1.0 / (3.0 * PI))));
        assert!(close(f.coeff(-3), Complex64::new(0.0, -1.0 / (3.0 * PI))));
    }

    #[test]
    fn double_step_and_constant() {
        let f = step_initial_data(&StepData::DoubleStep, &grid(64)).unwrap();
        assert_eq!(f.coeff(0).re, 0.75);
        let c = StepData::Custom {
            breakpoints: vec![0.0],
            values: vec![1.7],
        };
        let f = step_initial_data(&c, &grid(64)).unwrap();
        assert_eq!(f.coeff(0).re, 1.7);
        assert_eq!(f.half_spectrum()[1..].iter().map(|c| c.norm()).fold(0.0, f64::max), 0.0);
        let bad = StepData::Custom {
            breakpoints: vec![1.0, 1.0],
            values: vec![0.0, 1.0],
        };
        assert!(step_initial_data(&bad, &grid(64)).is_err());
    }

    #[test]
    fn step_value_convention() {
        let s = StepData::UnitStep;
        assert_eq!(s.value_at(1.0, TAU).unwrap(), 0.0);
        assert_eq!(s.value_at(4.0, TAU).unwrap(), 1.0);
        assert_eq!(s.value_at(PI, TAU).unwrap(), 0.5);
        assert_eq!(s.value_at(0.0, TAU).unwrap(), 0.5);
    }

    #[test]
    fn linear_evolution_examples() {
        let g = grid(256);
        let f0 = step_initial_data(&StepData::UnitStep, &g).unwrap();
        let lkdv = ModelSpec::linear_only(1.0, 1.0);
        let at0 = evolve_linear(&f0, &lkdv, 0.0);
        assert_eq!(at0.half_spectrum(), f0.half_spectrum());

        let full = evolve_linear(&f0, &lkdv, RationalTime::new(2, 1).unwrap());
        assert!(full.sub(&f0).max_abs_coeff() < 1e-15);

        let half = evolve_linear(&f0, &lkdv, RationalTime::new(1, 1).unwrap());
        let complement = f0.scale(-1.0).map_modes(|k, c| if k == 0 { -c } else { c });
        assert!(half.sub(&complement).max_abs_coeff() < 1e-15);

        let lakdv = ModelSpec::linear_only(-1.0, 1.0);
        for t in [0.3, 1.7, 5.0] {
            let a = evolve_linear(&f0, &lkdv, t);
            let b = evolve_linear(&f0, &lakdv, t);
            assert!(a.sub(&b).max_abs_coeff() < 1e-15);
        }
    }

    #[test]
    fn constant_data_always_passes() {
        let g = grid(1024);
        let mut f = SpectralField::zeros(&g);
        f.set_coeff(0, Complex64::new(0.3, 0.0)).unwrap();
        let r = revival_constancy(&f, RationalTime::new(1, 3).unwrap(), 16, 0.1, 0.02).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn constancy_rejects_bad_arguments() {
        let g = grid(64);
        let f = SpectralField::zeros(&g);
        let t = RationalTime::new(1, 8).unwrap();
        assert!(revival_constancy(&f, t, 4, 0.1, 0.02).is_err());
        assert!(revival_constancy(&f, t, 8, 0.6, 0.02).is_err());
        // 64 points over 16 subintervals leave 4 points each
        assert!(revival_constancy(&f, t, 8, 0.1, 0.02).is_err());
    }

    #[test]
    fn carpet_rows() {
        let g = grid(32);
        let f0 = step_initial_data(&StepData::UnitStep, &g).unwrap();
        let c = linear_carpet(&f0, &ModelSpec::linear_only(-1.0, 1.0), &[0.0]).unwrap();
        assert_eq!(c.row(0), f0.inverse().as_slice());
        assert!(linear_carpet(&f0, &ModelSpec::linear_only(-1.0, 1.0), &[]).is_err());
        assert!(linear_carpet(&f0, &ModelSpec::linear_only(-1.0, 1.0), &[1.0, 0.5]).is_err());
    }

    #[test]
    fn single_mode_drifts_at_k_squared() {
        let g = grid(64);
        let spec = ModelSpec::linear_only(-1.0, 1.0);
        let times: Vec<f64> = (0..50).map(|i| i as f64 * 0.01).collect();
        for (k, speed) in [(1i64, 1.0), (3, 9.0), (4, 16.0)] {
            let mut f = SpectralField::zeros(&g);
            f.set_coeff(k, Complex64::new(0.5, 0.0)).unwrap();
            let c = linear_carpet(&f, &spec, &times).unwrap();
            let v = phase_velocity(&c, k).unwrap();
            assert!((v.abs() - speed).abs() < 1e-9, "k={k} v={v}");
        }
    }
}
