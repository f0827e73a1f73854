//! Linear frequency, damping, forcing and Galerkin masks for every model
//! family.
//!
//! The linear evolution of a mode is `dû_k/dt = (iΩ(k) − νκ_k²) û_k`.  The
//! frequency magnitude is evaluated at the physical wavenumber of an
//! effective index while the even/odd class is always taken from the integer
//! mode index itself.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Grid, Parity, SpectralField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `∂_t u + u∂_x u + μ∂_x³u = 0`.
    Kdv,
    /// Independent dispersion coefficients on the even and odd classes.
    Akdv,
    /// Alternating dispersion with adjacent even/odd "twin" modes sharing a
    /// half-integer effective wavenumber.
    AkdvCorrected,
    /// Alternating hyperdispersion with viscous damping and forcing.
    Akdvb,
    /// Galerkin-truncated Burgers–Hopf.
    Grbh,
    /// Alternating dispersion with the nonlinear term switched off.
    LinearOnly,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Kdv => "kdv",
            Family::Akdv => "akdv",
            Family::AkdvCorrected => "akdv_corrected",
            Family::Akdvb => "akdvb",
            Family::Grbh => "grbh",
            Family::LinearOnly => "linear",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "kdv" => Family::Kdv,
            "akdv" => Family::Akdv,
            "akdv_corrected" => Family::AkdvCorrected,
            "akdvb" => Family::Akdvb,
            "grbh" => Family::Grbh,
            "linear" | "linear_only" => Family::LinearOnly,
            other => {
                return Err(Error::InvalidArgument(format!("unknown model family `{other}`")))
            }
        })
    }
}

/// One forced Fourier mode; its conjugate partner is implied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForcingMode {
    pub k: i64,
    pub amplitude: Complex64,
}

/// Time-independent forcing, given by its spectral content.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Forcing {
    pub modes: Vec<ForcingMode>,
}

impl Forcing {
    pub fn none() -> Self {
        Self::default()
    }

    /// `f(x) = a·sin(κ_1 x)`.
    pub fn sine(amplitude: f64) -> Self {
        Self {
            modes: vec![ForcingMode {
                k: 1,
                amplitude: Complex64::new(0.0, -amplitude / 2.0),
            }],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.modes.iter().all(|m| m.amplitude.norm() == 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub family: Family,
    pub e_mu: f64,
    pub o_mu: f64,
    /// Hyperdispersion order `m`; the frequency scales as `κ^{2m+1}`.
    pub hyper_order: u32,
    pub nu: f64,
    pub galerkin_k: Option<usize>,
    pub forcing: Forcing,
    pub nonlinear: bool,
}

impl ModelSpec {
    fn base(family: Family, e_mu: f64, o_mu: f64) -> Self {
        Self {
            family,
            e_mu,
            o_mu,
            hyper_order: 1,
            nu: 0.0,
            galerkin_k: None,
            forcing: Forcing::none(),
            nonlinear: true,
        }
    }

    pub fn kdv(mu: f64) -> Self {
        Self::base(Family::Kdv, mu, mu)
    }

    pub fn akdv(e_mu: f64, o_mu: f64) -> Self {
        Self::base(Family::Akdv, e_mu, o_mu)
    }

    pub fn akdv_corrected(e_mu: f64, o_mu: f64) -> Self {
        Self::base(Family::AkdvCorrected, e_mu, o_mu)
    }

    /// Alternating KdV–Burgers: odd modes carry `+μ̂`, even modes `−μ̂`.
    pub fn akdvb(mu_hat: f64, hyper_order: u32, nu: f64, forcing: Forcing) -> Self {
        Self {
            hyper_order,
            nu,
            forcing,
            ..Self::base(Family::Akdvb, -mu_hat, mu_hat)
        }
    }

    pub fn grbh(galerkin_k: usize) -> Self {
        Self {
            galerkin_k: Some(galerkin_k),
            ..Self::base(Family::Grbh, 0.0, 0.0)
        }
    }

    pub fn linear_only(e_mu: f64, o_mu: f64) -> Self {
        Self {
            nonlinear: false,
            ..Self::base(Family::LinearOnly, e_mu, o_mu)
        }
    }

    /// Same dispersion and parameters with the nonlinear term removed.
    pub fn linearized(&self) -> Self {
        Self {
            nonlinear: false,
            ..self.clone()
        }
    }

    /// Checks the per-family parameter constraints.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.e_mu.is_finite() && self.o_mu.is_finite() && self.nu.is_finite()) {
            return bad("model parameters must be finite".into());
        }
        if self.nu < 0.0 {
            return bad(format!("damping must be non-negative, got {}", self.nu));
        }
        if self.hyper_order == 0 {
            return bad("hyperdispersion order must be positive".into());
        }
        if self.galerkin_k == Some(0) {
            return bad("Galerkin cutoff must be positive".into());
        }
        match self.family {
            Family::Kdv if self.e_mu != self.o_mu => {
                bad("kdv requires equal even and odd dispersion".into())
            }
            Family::Akdvb if self.e_mu != -self.o_mu => {
                bad("akdvb requires e_mu = -o_mu".into())
            }
            Family::Grbh if self.e_mu != 0.0 || self.o_mu != 0.0 || self.nu != 0.0 => {
                bad("grbh has no dispersion or damping".into())
            }
            Family::Grbh if self.galerkin_k.is_none() => bad("grbh requires a Galerkin cutoff".into()),
            Family::LinearOnly if self.nonlinear => bad("linear family has no nonlinear term".into()),
            f if f != Family::Akdvb && (self.nu != 0.0 || !self.forcing.is_empty()) => {
                bad(format!("{f} is conservative: no damping or forcing allowed"))
            }
            f if f != Family::Akdvb && self.hyper_order != 1 => {
                bad(format!("{f} has third-order dispersion only"))
            }
            _ => Ok(()),
        }
    }

    /// True when the flow is Hamiltonian (no damping, no forcing).
    pub fn is_conservative(&self) -> bool {
        self.nu == 0.0 && self.forcing.is_empty()
    }

    /// Dispersion coefficient of the parity class of `k`.
    pub fn mu_for(&self, k: i64) -> f64 {
        match Parity::of(k) {
            Parity::Even => self.e_mu,
            Parity::Odd => self.o_mu,
        }
    }

    /// Effective index at which the frequency magnitude is evaluated.  For
    /// the twin-corrected family the pair `{2m, 2m − sgn m}` shares
    /// `2m − sgn(m)/2`.
    pub fn effective_index(&self, k: i64) -> f64 {
        match self.family {
            Family::AkdvCorrected => {
                let sgn = k.signum() as f64;
                let odd = k.rem_euclid(2) as f64;
                k as f64 + sgn * odd - sgn / 2.0
            }
            _ => k as f64,
        }
    }

    /// Linear frequency `Ω(k)`.
    pub fn omega(&self, grid: &Grid, k: i64) -> f64 {
        if self.family == Family::Grbh {
            return 0.0;
        }
        let kappa = grid.wavenumber(1) * self.effective_index(k);
        self.mu_for(k) * kappa.powi(2 * self.hyper_order as i32 + 1)
    }

    /// Damping rate `νκ_k²`.
    pub fn damping_rate(&self, grid: &Grid, k: i64) -> f64 {
        if self.nu == 0.0 {
            return 0.0;
        }
        self.nu * grid.wavenumber(k).powi(2)
    }

    pub fn galerkin_mask(&self, k: i64) -> bool {
        self.galerkin_k
            .map_or(true, |cutoff| k.unsigned_abs() as usize <= cutoff)
    }

    pub fn forcing_spectrum(&self, grid: &Grid) -> Result<SpectralField> {
        let mut field = SpectralField::zeros(grid);
        for mode in &self.forcing.modes {
            if mode.k == 0 || mode.k.unsigned_abs() as usize >= grid.nyquist() {
                return Err(Error::InvalidArgument(format!(
                    "forcing mode {} outside the resolvable range 1..{}",
                    mode.k,
                    grid.nyquist()
                )));
            }
            let current = field.coeff(mode.k);
            field.set_coeff(mode.k, current + mode.amplitude)?;
        }
        Ok(field)
    }

    /// Per-mode weight `c_k = Ω(k)/κ_k` of the quadratic part of the
    /// Hamiltonian, `(L/2) Σ c_k |û_k|²`; zero for the mean mode.
    pub fn hamiltonian_weight(&self, grid: &Grid, k: i64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.omega(grid, k) / grid.wavenumber(k)
    }
}

/// Per-mode linear coefficients tabulated for the non-negative modes of a grid.
#[derive(Clone, Debug)]
pub struct LinearTable {
    pub omega: Vec<f64>,
    pub damping: Vec<f64>,
    pub retained: Vec<bool>,
}

impl LinearTable {
    /// The Nyquist mode has no conjugate partner, so it cannot rotate and stay
    /// real; it is held frozen (frequency zero).
    pub fn new(spec: &ModelSpec, grid: &Grid) -> Self {
        let nyq = grid.nyquist();
        let omega = (0..=nyq)
            .map(|k| if k == nyq { 0.0 } else { spec.omega(grid, k as i64) })
            .collect();
        let damping = (0..=nyq).map(|k| spec.damping_rate(grid, k as i64)).collect();
        let retained = (0..=nyq).map(|k| spec.galerkin_mask(k as i64)).collect();
        Self {
            omega,
            damping,
            retained,
        }
    }

    /// `iΩ − νκ²` for mode `k`.
    pub fn generator(&self, k: usize) -> Complex64 {
        Complex64::new(-self.damping[k], self.omega[k])
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::TAU;

    use super::*;

    fn grid_2pi() -> Grid {
        Grid::new(64, TAU).unwrap()
    }

    #[test]
    fn omega_examples() {
        let g = grid_2pi();
        let a = ModelSpec::akdv(-1.0, 1.0);
        assert_eq!(a.omega(&g, 2), -8.0);
        assert_eq!(a.omega(&g, 1), 1.0);
        assert_eq!(a.omega(&g, 3), 27.0);

        let c = ModelSpec::akdv_corrected(-1.0, 1.0);
        assert_eq!(c.omega(&g, 1), 3.375);
        assert_eq!(c.omega(&g, 2), -3.375);
        assert_eq!(c.omega(&g, 0), 0.0);

        let b = ModelSpec::akdvb(0.5, 2, 0.0, Forcing::none());
        assert_eq!(b.omega(&g, 2), -32.0 * 0.5);

        let k = ModelSpec::kdv(0.022 * 0.022);
        assert!((k.omega(&g, 10) - 0.484).abs() < 1e-15);
    }

    #[test]
    fn omega_uses_physical_wavenumber() {
        let g = Grid::new(64, 2.0).unwrap();
        let k = ModelSpec::kdv(1.0);
        let pi = std::f64::consts::PI;
        assert!((k.omega(&g, 2) - (2.0 * pi).powi(3)).abs() < 1e-12);
    }

    #[test]
    fn damping_examples() {
        let g = grid_2pi();
        let b = ModelSpec::akdvb(0.012, 1, 0.009, Forcing::sine(0.25));
        assert!((b.damping_rate(&g, 3) - 0.081).abs() < 1e-15);
        assert_eq!(b.damping_rate(&g, 0), 0.0);
        assert_eq!(ModelSpec::akdv(1.0, -1.0).damping_rate(&g, 7), 0.0);
    }

    #[test]
    fn galerkin_mask_examples() {
        let s = ModelSpec::grbh(10);
        assert!(s.galerkin_mask(10));
        assert!(s.galerkin_mask(-10));
        assert!(!s.galerkin_mask(11));
        assert!(ModelSpec::akdv(1.0, -1.0).galerkin_mask(500));
    }

    #[test]
    fn forcing_examples() {
        let g = grid_2pi();
        let s = ModelSpec::akdvb(0.012, 1, 0.009, Forcing::sine(0.25));
        let f = s.forcing_spectrum(&g).unwrap();
        assert_eq!(f.coeff(1), Complex64::new(0.0, -0.125));
        assert_eq!(f.coeff(-1), Complex64::new(0.0, 0.125));
        assert_eq!(f.max_abs_coeff(), 0.125);
        for (x, v) in g.points().iter().zip(f.inverse()) {
            assert!((v - x.sin() / 4.0).abs() < 1e-14);
        }
        assert_eq!(
            ModelSpec::akdv(1.0, 1.0).forcing_spectrum(&g).unwrap().max_abs_coeff(),
            0.0
        );
        let bad = ModelSpec::akdvb(
            0.01,
            1,
            0.01,
            Forcing {
                modes: vec![ForcingMode {
                    k: 40,
                    amplitude: Complex64::new(1.0, 0.0),
                }],
            },
        );
        assert!(bad.forcing_spectrum(&g).is_err());
    }

    #[test]
    fn structural_properties() {
        let g = Grid::new(128, TAU).unwrap();
        let specs = [
            ModelSpec::kdv(0.3),
            ModelSpec::akdv(0.7, -1.3),
            ModelSpec::akdv_corrected(1.0, -1.0),
            ModelSpec::akdvb(0.01, 2, 0.01, Forcing::none()),
            ModelSpec::grbh(20),
            ModelSpec::linear_only(-1.0, 1.0),
        ];
        for s in &specs {
            s.validate().unwrap();
            for k in g.mode_indices() {
                assert_eq!(s.omega(&g, -k), -s.omega(&g, k), "{:?} k={k}", s.family);
            }
        }
        let mu = 0.37;
        let kdv = ModelSpec::kdv(mu);
        let same = ModelSpec::akdv(mu, mu);
        for k in g.mode_indices() {
            assert_eq!(kdv.omega(&g, k), same.omega(&g, k));
            assert_eq!(kdv.omega(&g, k), mu * (k as f64).powi(3));
            let a = ModelSpec::akdv(0.4, -0.9);
            let r = ModelSpec::akdv(-0.4, 0.9);
            assert_eq!(r.omega(&g, k), -a.omega(&g, k));
        }
        let twin = ModelSpec::akdv_corrected(2.0, -2.0);
        for m in (-30i64..=30).filter(|&m| m != 0) {
            let a = twin.omega(&g, 2 * m).abs();
            let b = twin.omega(&g, 2 * m - m.signum()).abs();
            assert_eq!(a, b);
        }
        let int = ModelSpec::akdv(-2.0, 3.0);
        for k in g.mode_indices() {
            assert_eq!(int.omega(&g, k).fract(), 0.0);
        }
    }

    #[test]
    fn validation_rejects_inconsistent_specs() {
        let mut s = ModelSpec::kdv(1.0);
        s.o_mu = 2.0;
        assert!(s.validate().is_err());
        let mut s = ModelSpec::akdv(1.0, -1.0);
        s.nu = 0.1;
        assert!(s.validate().is_err());
        let mut s = ModelSpec::grbh(4);
        s.galerkin_k = None;
        assert!(s.validate().is_err());
        let mut s = ModelSpec::akdvb(0.1, 1, 0.1, Forcing::none());
        s.e_mu = 0.1;
        assert!(s.validate().is_err());
    }
}
