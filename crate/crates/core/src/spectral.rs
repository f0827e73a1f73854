//! Periodic grids, the real/spectral transform pair, spectral differentiation,
//! quadrature and the even/odd parity projections.
//!
//! Fourier coefficients follow the mean-value normalisation
//! `û_k = (1/L) ∫ u e^{-iκ_k x} dx`, so `û_0` is the mean of the field and
//! `u(x) = Σ_k û_k e^{iκ_k x}`.  A [`SpectralField`] stores only the
//! non-negative modes `k = 0..=n/2`; negative modes are implied by Hermitian
//! symmetry, so every field is real by construction.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

use crate::error::{Error, Result};

/// Relative tolerance for accepting a full spectrum as Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-13;

pub(crate) struct Plans {
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
}

pub(crate) fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().expect("fft plan cache poisoned");
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = RealFftPlanner::<f64>::new();
            Arc::new(Plans {
                r2c: planner.plan_fft_forward(n),
                c2r: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

impl Plans {
    /// Unnormalised forward transform of `samples` into `n/2 + 1` coefficients.
    pub(crate) fn forward(&self, samples: &mut [f64], out: &mut [Complex64]) {
        self.r2c
            .process(samples, out)
            .expect("real FFT buffer sizes are fixed by the plan");
    }

    /// Scratch length that serves both directions.
    pub(crate) fn scratch_len(&self) -> usize {
        self.r2c.get_scratch_len().max(self.c2r.get_scratch_len())
    }

    /// [`Self::forward`] without allocating.
    pub(crate) fn forward_with(&self, samples: &mut [f64], out: &mut [Complex64], scratch: &mut [Complex64]) {
        let len = self.r2c.get_scratch_len();
        self.r2c
            .process_with_scratch(samples, out, &mut scratch[..len])
            .expect("real FFT buffer sizes are fixed by the plan");
    }

    /// [`Self::inverse`] without allocating.
    pub(crate) fn inverse_with(&self, coeffs: &mut [Complex64], out: &mut [f64], scratch: &mut [Complex64]) {
        coeffs[0].im = 0.0;
        if let Some(last) = coeffs.last_mut() {
            last.im = 0.0;
        }
        let len = self.c2r.get_scratch_len();
        self.c2r
            .process_with_scratch(coeffs, out, &mut scratch[..len])
            .expect("real FFT buffer sizes are fixed by the plan");
    }

    /// Unnormalised synthesis `Σ_k c_k e^{ikx_j}` over the Hermitian extension.
    pub(crate) fn inverse(&self, coeffs: &mut [Complex64], out: &mut [f64]) {
        coeffs[0].im = 0.0;
        if let Some(last) = coeffs.last_mut() {
            last.im = 0.0;
        }
        self.c2r
            .process(coeffs, out)
            .expect("real FFT buffer sizes are fixed by the plan");
    }
}

/// Uniform periodic grid on `[0, L)`.
#[derive(Clone)]
pub struct Grid {
    n: usize,
    length: f64,
    plans: Arc<Plans>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length
    }
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "point count must be even and at least 4, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "domain length must be positive, got {length}"
            )));
        }
        Ok(Self {
            n,
            length,
            plans: plans(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Largest stored mode index, `n/2`.
    pub fn nyquist(&self) -> usize {
        self.n / 2
    }

    /// Number of stored (non-negative) modes.
    pub fn modes(&self) -> usize {
        self.n / 2 + 1
    }

    /// Largest mode `K` with `3K < n`: quadratic products of modes `|k| <= K`
    /// never alias back onto `|k| <= K`.
    pub fn dealias_cutoff(&self) -> usize {
        (self.n - 1) / 3
    }

    /// Mode indices `-n/2+1 ..= n/2`.
    pub fn mode_indices(&self) -> impl Iterator<Item = i64> {
        let half = (self.n / 2) as i64;
        (-half + 1)..=half
    }

    /// Physical wavenumber `κ_k = (2π/L)·k`.
    pub fn wavenumber(&self, k: i64) -> f64 {
        TAU / self.length * k as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub(crate) fn plans(&self) -> &Plans {
        &self.plans
    }
}

/// Uniform-grid periodic quadrature (trapezoid rule), spectrally exact for
/// band-limited integrands.
pub fn quadrature(grid: &Grid, samples: &[f64]) -> Result<f64> {
    check_len(grid, samples)?;
    Ok(grid.dx() * samples.iter().sum::<f64>())
}

fn check_len(grid: &Grid, samples: &[f64]) -> Result<()> {
    if samples.len() != grid.n() {
        return Err(Error::LengthMismatch {
            expected: grid.n(),
            got: samples.len(),
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Parity class of an integer mode index; `k = 0` is even.
    pub fn of(k: i64) -> Parity {
        if k.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn contains(self, k: i64) -> bool {
        Parity::of(k) == self
    }
}

/// Fourier coefficients of a real periodic field.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::new(0.0, 0.0); grid.modes()],
        }
    }

    /// Builds a field from the non-negative modes `k = 0..=n/2`.  The
    /// imaginary parts of the mean and Nyquist coefficients are dropped.
    pub fn from_half_spectrum(grid: &Grid, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.modes() {
            return Err(Error::LengthMismatch {
                expected: grid.modes(),
                got: coeffs.len(),
            });
        }
        coeffs[0].im = 0.0;
        coeffs[grid.nyquist()].im = 0.0;
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Builds a field from all `n` coefficients in FFT order (index `j` holds
    /// mode `j` for `j <= n/2` and mode `j - n` above).  Rejects spectra whose
    /// Hermitian defect exceeds [`HERMITIAN_TOLERANCE`] relative to the largest
    /// coefficient.
    pub fn from_full_spectrum(grid: &Grid, full: &[Complex64]) -> Result<Self> {
        let n = grid.n();
        if full.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: full.len(),
            });
        }
        let scale = full.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let tol = HERMITIAN_TOLERANCE * scale.max(f64::MIN_POSITIVE);
        for j in 0..=n / 2 {
            let partner = (n - j) % n;
            let deviation = (full[j] - full[partner].conj()).norm();
            if deviation > tol {
                return Err(Error::NonHermitian {
                    mode: j as i64,
                    deviation,
                });
            }
        }
        let coeffs = (0..=n / 2)
            .map(|j| (full[j] + full[(n - j) % n].conj()) * 0.5)
            .collect();
        Self::from_half_spectrum(grid, coeffs)
    }

    /// Transform real samples at `x_j = j·dx` to spectral space.
    pub fn forward(grid: &Grid, samples: &[f64]) -> Result<Self> {
        check_len(grid, samples)?;
        let mut buf = samples.to_vec();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.modes()];
        grid.plans().forward(&mut buf, &mut coeffs);
        let scale = 1.0 / grid.n() as f64;
        coeffs.iter_mut().for_each(|c| *c *= scale);
        Self::from_half_spectrum(grid, coeffs)
    }

    /// Real samples at the grid points.
    pub fn inverse(&self) -> Vec<f64> {
        let mut coeffs = self.coeffs.clone();
        let mut out = vec![0.0; self.grid.n()];
        self.grid.plans().inverse(&mut coeffs, &mut out);
        out
    }

    /// Samples of the band-limited interpolant on a finer grid of `m` points
    /// (`m` even, `m >= n`).  The Nyquist mode is split evenly between `±n/2`.
    pub fn inverse_padded(&self, m: usize) -> Vec<f64> {
        assert!(m >= self.grid.n() && m % 2 == 0, "padding must not truncate");
        if m == self.grid.n() {
            return self.inverse();
        }
        let nyq = self.grid.nyquist();
        let mut padded = vec![Complex64::new(0.0, 0.0); m / 2 + 1];
        padded[..nyq].copy_from_slice(&self.coeffs[..nyq]);
        padded[nyq] = self.coeffs[nyq] * 0.5;
        let mut out = vec![0.0; m];
        plans(m).inverse(&mut padded, &mut out);
        out
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Non-negative modes `k = 0..=n/2`.
    pub fn half_spectrum(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn half_spectrum_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_half_spectrum(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of mode `k`; zero outside the stored index range.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let idx = k.unsigned_abs() as usize;
        if idx > self.grid.nyquist() {
            return Complex64::new(0.0, 0.0);
        }
        if k >= 0 {
            self.coeffs[idx]
        } else {
            self.coeffs[idx].conj()
        }
    }

    /// Sets mode `k` (and, implicitly, its conjugate partner `-k`).
    pub fn set_coeff(&mut self, k: i64, value: Complex64) -> Result<()> {
        let idx = k.unsigned_abs() as usize;
        if idx > self.grid.nyquist() {
            return Err(Error::InvalidArgument(format!(
                "mode {k} outside grid range ±{}",
                self.grid.nyquist()
            )));
        }
        let mut v = if k >= 0 { value } else { value.conj() };
        if idx == 0 || idx == self.grid.nyquist() {
            v.im = 0.0;
        }
        self.coeffs[idx] = v;
        Ok(())
    }

    /// Applies `f(k, û_k)` to every non-negative mode.
    pub fn map_modes(&self, mut f: impl FnMut(i64, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| f(k as i64, c))
            .collect();
        Self::from_half_spectrum(&self.grid, coeffs).expect("length preserved")
    }

    pub fn project_parity(&self, parity: Parity) -> Self {
        self.map_modes(|k, c| if parity.contains(k) { c } else { Complex64::new(0.0, 0.0) })
    }

    /// Multiplies `û_k` by `(iκ_k)^order`.  The Nyquist mode is zeroed for odd
    /// orders, where the sign of its derivative is ambiguous.
    pub fn derivative(&self, order: u32) -> Self {
        let nyq = self.grid.nyquist() as i64;
        let grid = self.grid.clone();
        self.map_modes(|k, c| {
            if order % 2 == 1 && k == nyq {
                return Complex64::new(0.0, 0.0);
            }
            c * Complex64::new(0.0, grid.wavenumber(k)).powu(order)
        })
    }

    /// Zeroes every mode with `|k| > kmax`.
    pub fn truncate(&self, kmax: usize) -> Self {
        self.map_modes(|k, c| {
            if k as usize <= kmax {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map_modes(|_, c| c * factor)
    }

    pub fn add(&self, other: &SpectralField) -> Self {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        self.map_modes(|k, c| c + other.coeffs[k as usize])
    }

    pub fn sub(&self, other: &SpectralField) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Largest non-zero mode index (0 for a constant or zero field).
    pub fn bandwidth(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| c.norm_sqr() > 0.0)
            .unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `Σ_k |û_k|²` over all modes, negative ones included.
    pub fn sum_sq(&self) -> f64 {
        let nyq = self.grid.nyquist();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k == 0 || k == nyq {
                    c.norm_sqr()
                } else {
                    2.0 * c.norm_sqr()
                }
            })
            .sum()
    }

    /// `∫ u dx = L·û_0`.
    pub fn integral(&self) -> f64 {
        self.grid.length() * self.coeffs[0].re
    }

    /// `∫ u² dx = L Σ |û_k|²` (Parseval).
    pub fn integral_of_square(&self) -> f64 {
        self.grid.length() * self.sum_sq()
    }

    /// `∫ u^p dx`, evaluated on a zero-padded grid fine enough that the
    /// product does not alias onto the mean.
    pub fn integral_of_power(&self, p: u32) -> f64 {
        if p == 0 {
            return self.grid.length();
        }
        let m = self.alias_free_size(p);
        let samples = self.inverse_padded(m);
        let dx = self.grid.length() / m as f64;
        dx * samples.iter().map(|v| v.powi(p as i32)).sum::<f64>()
    }

    /// Smallest power-of-two grid (at least `n`) on which `u^p` is alias-free
    /// at the mean mode.
    pub(crate) fn alias_free_size(&self, p: u32) -> usize {
        let needed = p as usize * self.bandwidth() + 1;
        needed.next_power_of_two().max(self.grid.n())
    }

    /// Samples of the interpolant at arbitrary points, by direct summation.
    pub fn evaluate_at(&self, x: f64) -> f64 {
        let nyq = self.grid.nyquist();
        let mut acc = self.coeffs[0].re;
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            let phase = self.grid.wavenumber(k as i64) * x;
            let term = c.re * phase.cos() - c.im * phase.sin();
            acc += if k == nyq { term } else { 2.0 * term };
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn grid_validation() {
        assert_eq!(Grid::new(8, TAU).unwrap().wavenumber(1), 1.0);
        assert_eq!(Grid::new(8, 2.0).unwrap().wavenumber(1), PI);
        assert!(Grid::new(7, TAU).is_err());
        assert!(Grid::new(2, TAU).is_err());
        assert!(Grid::new(8, 0.0).is_err());
        assert!(Grid::new(8, -1.0).is_err());
        let g = Grid::new(8, TAU).unwrap();
        assert_eq!(g.mode_indices().collect::<Vec<_>>(), vec![-3, -2, -1, 0, 1, 2, 3, 4]);
        assert_eq!(Grid::new(1024, 2.0).unwrap().dealias_cutoff(), 341);
        assert_eq!(Grid::new(96, 2.0).unwrap().dealias_cutoff(), 31);
    }

    #[test]
    fn forward_simple_fields() {
        let g = Grid::new(16, TAU).unwrap();
        let f = SpectralField::forward(&g, &[2.5; 16]).unwrap();
        assert!((f.coeff(0).re - 2.5).abs() < 1e-15);
        assert!(f.half_spectrum()[1..].iter().all(|c| c.norm() < 1e-15));

        let cos: Vec<f64> = g.points().iter().map(|x| x.cos()).collect();
        let f = SpectralField::forward(&g, &cos).unwrap();
        assert!((f.coeff(1) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((f.coeff(-1) - c(0.5, 0.0)).norm() < 1e-15);
        assert!(SpectralField::forward(&g, &[0.0; 15]).is_err());
    }

    #[test]
    fn inverse_simple_fields() {
        let g = Grid::new(16, TAU).unwrap();
        let mut f = SpectralField::zeros(&g);
        f.set_coeff(0, c(0.5, 0.0)).unwrap();
        assert!(f.inverse().iter().all(|v| (v - 0.5).abs() < 1e-15));

        let mut f = SpectralField::zeros(&g);
        f.set_coeff(1, c(0.0, -0.5)).unwrap();
        assert!((f.coeff(-1) - c(0.0, 0.5)).norm() < 1e-16);
        for (x, v) in g.points().iter().zip(f.inverse()) {
            assert!((v - x.sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn full_spectrum_hermitian_check() {
        let g = Grid::new(8, TAU).unwrap();
        let mut full = vec![c(0.0, 0.0); 8];
        full[1] = c(0.25, 0.1);
        full[7] = c(0.25, -0.1);
        let f = SpectralField::from_full_spectrum(&g, &full).unwrap();
        assert_eq!(f.coeff(-1), c(0.25, -0.1));
        full[7] = c(0.25, 0.1);
        assert!(matches!(
            SpectralField::from_full_spectrum(&g, &full),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn nyquist_is_real() {
        let g = Grid::new(8, TAU).unwrap();
        let mut f = SpectralField::zeros(&g);
        f.set_coeff(4, c(1.0, 2.0)).unwrap();
        assert_eq!(f.coeff(4), c(1.0, 0.0));
        assert_eq!(f.derivative(1).coeff(4), c(0.0, 0.0));
        assert_eq!(f.derivative(2).coeff(4), c(-16.0, 0.0));
    }

    #[test]
    fn derivative_examples() {
        let g = Grid::new(32, 2.0).unwrap();
        let cos: Vec<f64> = g.points().iter().map(|x| (PI * x).cos()).collect();
        let d = SpectralField::forward(&g, &cos).unwrap().derivative(1).inverse();
        for (x, v) in g.points().iter().zip(d) {
            assert!((v + PI * (PI * x).sin()).abs() < 1e-13);
        }
        let constant = SpectralField::forward(&g, &[3.0; 32]).unwrap();
        for order in 1..5 {
            assert_eq!(constant.derivative(order).max_abs_coeff(), 0.0);
        }
    }

    #[test]
    fn quadrature_examples() {
        let g = Grid::new(16, TAU).unwrap();
        assert!((quadrature(&g, &[1.5; 16]).unwrap() - TAU * 1.5).abs() < 1e-14);
        let cos: Vec<f64> = g.points().iter().map(|x| x.cos()).collect();
        let f = SpectralField::forward(&g, &cos).unwrap();
        assert!((f.integral_of_square() - PI).abs() < 1e-14);
        assert!(f.integral_of_power(3).abs() < 1e-13);
        assert!((f.integral_of_power(4) - 3.0 * PI / 4.0).abs() < 1e-13);
    }

    #[test]
    fn padded_inverse_interpolates() {
        let g = Grid::new(16, TAU).unwrap();
        let v: Vec<f64> = g.points().iter().map(|x| (3.0 * x).sin() + 0.2).collect();
        let f = SpectralField::forward(&g, &v).unwrap();
        let fine = f.inverse_padded(64);
        for (j, s) in fine.iter().enumerate() {
            let x = j as f64 * TAU / 64.0;
            assert!((s - ((3.0 * x).sin() + 0.2)).abs() < 1e-14);
            assert!((f.evaluate_at(x) - s).abs() < 1e-13);
        }
    }
}
