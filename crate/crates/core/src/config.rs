//! Run configuration: `key = value` text, experiment presets and the
//! resolved form echoed into every run manifest.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;

use crate::dispersion::{Family, Forcing, ForcingMode, ModelSpec};
use crate::error::{Error, Result};
use crate::evolver::DealiasRule;
use crate::linear::{step_initial_data, StepData};
use crate::spectral::{Grid, SpectralField};

/// Dispersion scale of the cosine experiments.
pub const ZK_DELTA: f64 = 0.022;

/// Breaking time `t_B` of `cos(πx)` under inviscid Burgers.
pub fn zk_breaking_time() -> f64 {
    1.0 / PI
}

/// Reference time `t_ZK = 3.6·t_B`.
pub fn zk_time() -> f64 {
    3.6 / PI
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Zk65Kdv,
    Zk65Akdv,
    Fig5Sweep,
    Fig9Corrected,
    Fig10AkdvbM1,
    Fig10AkdvbM2,
    LinearStepCarpet,
    FaqrStep,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::Zk65Kdv,
        Preset::Zk65Akdv,
        Preset::Fig5Sweep,
        Preset::Fig9Corrected,
        Preset::Fig10AkdvbM1,
        Preset::Fig10AkdvbM2,
        Preset::LinearStepCarpet,
        Preset::FaqrStep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Zk65Kdv => "zk65_kdv",
            Preset::Zk65Akdv => "zk65_akdv",
            Preset::Fig5Sweep => "fig5_sweep",
            Preset::Fig9Corrected => "fig9_corrected",
            Preset::Fig10AkdvbM1 => "fig10_akdvb_m1",
            Preset::Fig10AkdvbM2 => "fig10_akdvb_m2",
            Preset::LinearStepCarpet => "linear_step_carpet",
            Preset::FaqrStep => "faqr_step",
        }
    }

    /// Key/value pairs the preset expands to, before user overrides.
    fn entries(self) -> Vec<(&'static str, String)> {
        let d2 = ZK_DELTA * ZK_DELTA;
        let zk = |t_end_in_zk: f64| {
            vec![
                ("n", "1024".to_string()),
                ("length", "2".to_string()),
                ("initial", "cosine".to_string()),
                ("initial_amplitude", "1".to_string()),
                ("initial_mode", "1".to_string()),
                ("t_end", fmt_f64(t_end_in_zk * zk_time())),
                ("snapshot_stride", "1000".to_string()),
                ("invariant_stride", "100".to_string()),
                ("carpet_rows", "256".to_string()),
            ]
        };
        let akdvb = |m: u32, mu_hat: f64| {
            vec![
                ("family", "akdvb".to_string()),
                ("mu_hat", fmt_f64(mu_hat)),
                ("hyper_order", m.to_string()),
                ("nu", fmt_f64(0.009)),
                ("forcing_amplitude", fmt_f64(0.25)),
                ("n", "1024".to_string()),
                ("length", fmt_f64(TAU)),
                ("initial", "zero".to_string()),
                ("t_end", "400".to_string()),
                ("snapshot_stride", "10000".to_string()),
                ("invariant_stride", "1000".to_string()),
                ("carpet_rows", "256".to_string()),
                ("track_shock", "true".to_string()),
                // the forced state needs time to build up from rest
                ("track_start", "100".to_string()),
            ]
        };
        let step = |family: &str| {
            vec![
                ("family", family.to_string()),
                ("e_mu", "-1".to_string()),
                ("o_mu", "1".to_string()),
                ("length", fmt_f64(TAU)),
                ("initial", "unit_step".to_string()),
                ("carpet_rows", "256".to_string()),
            ]
        };
        let mut e = match self {
            Preset::Zk65Kdv => {
                let mut e = zk(20.0);
                e.push(("family", "kdv".into()));
                e.push(("mu", fmt_f64(d2)));
                e
            }
            Preset::Zk65Akdv | Preset::Fig5Sweep | Preset::Fig9Corrected => {
                let mut e = zk(if self == Preset::Fig9Corrected { 80.0 } else { 20.0 });
                e.push(("family", "akdv".into()));
                e.push(("e_mu", fmt_f64(d2)));
                e.push(("o_mu", fmt_f64(-d2)));
                e.push(("track_shock", "true".into()));
                // the alternating phases destabilise the integrating-factor
                // scheme well below the advisory step; longer runs need less
                let dt = if self == Preset::Fig9Corrected { 5e-6 } else { 1e-5 };
                e.push(("dt", fmt_f64(dt)));
                e
            }
            Preset::Fig10AkdvbM1 => akdvb(1, 0.012),
            Preset::Fig10AkdvbM2 => akdvb(2, 0.0005),
            Preset::LinearStepCarpet => {
                let mut e = step("linear");
                e.push(("n", "4096".into()));
                e.push(("t_end", fmt_f64(PI)));
                e.push(("snapshot_stride", "100000".into()));
                e.push(("invariant_stride", "100".into()));
                e
            }
            Preset::FaqrStep => {
                let mut e = step("akdv");
                // shock drift near 1.5 needs the odd class to carry −1
                e[1].1 = "1".into();
                e[2].1 = "-1".into();
                e.push(("n", "1024".into()));
                e.push(("t_end", "2".into()));
                e.push(("snapshot_stride", "1000".into()));
                e.push(("invariant_stride", "100".into()));
                e.push(("track_shock", "true".into()));
                e.push(("dt", "0.00025".into()));
                e.push(("track_smoothing", "0.004".into()));
                e.push(("track_radius", "0.5".into()));
                e
            }
        };
        match self {
            Preset::Fig5Sweep => {
                e.push((
                    "sweep_mu",
                    [1.0, 2.0, 4.0, 8.0]
                        .iter()
                        .map(|d| fmt_f64(d2 / d))
                        .collect::<Vec<_>>()
                        .join(", "),
                ));
            }
            Preset::Fig9Corrected => {
                e.push(("companion", "akdv_corrected".into()));
                e.push(("track_smoothing", "0.02".into()));
            }
            _ => {}
        }
        e
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::config(None, format!("unknown preset `{s}`")))
    }
}

/// Shortest decimal text that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Initial data of a run.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    /// `a·cos(κ_m x)`.
    Cosine { amplitude: f64, mode: u32 },
    /// `a·sin(κ_m x)`.
    Sine { amplitude: f64, mode: u32 },
    Step(StepData),
    Zero,
}

impl InitialCondition {
    pub fn to_field(&self, grid: &Grid) -> Result<SpectralField> {
        let mut f = SpectralField::zeros(grid);
        match self {
            InitialCondition::Cosine { amplitude, mode } | InitialCondition::Sine { amplitude, mode } => {
                let k = *mode as i64;
                if k == 0 || k as usize >= grid.nyquist() {
                    return Err(Error::InvalidArgument(format!(
                        "initial mode {k} is outside 1..{}",
                        grid.nyquist()
                    )));
                }
                let c = if matches!(self, InitialCondition::Cosine { .. }) {
                    Complex64::new(amplitude / 2.0, 0.0)
                } else {
                    Complex64::new(0.0, -amplitude / 2.0)
                };
                f.set_coeff(k, c)?;
                Ok(f)
            }
            InitialCondition::Step(data) => step_initial_data(data, grid),
            InitialCondition::Zero => Ok(f),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            InitialCondition::Cosine { .. } => "cosine",
            InitialCondition::Sine { .. } => "sine",
            InitialCondition::Step(StepData::UnitStep) => "unit_step",
            InitialCondition::Step(StepData::DoubleStep) => "double_step",
            InitialCondition::Step(StepData::Custom { .. }) => "custom_step",
            InitialCondition::Zero => "zero",
        }
    }
}

/// Shock-tracking options of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct TrackingOptions {
    pub enabled: bool,
    /// Gaussian low-pass width, as a fraction of the Nyquist index, applied
    /// before locating fronts; 0 disables it.
    pub smoothing: f64,
    /// Largest distance a front may move between tracked rows.
    pub radius: Option<f64>,
    /// Rows earlier than this time are not tracked.
    pub start: f64,
}

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub preset: Option<Preset>,
    pub model: ModelSpec,
    pub n: usize,
    pub length: f64,
    /// Requested step; `None` selects the advisory step.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub snapshot_stride: u64,
    pub invariant_stride: u64,
    pub carpet_rows: usize,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub dealias: DealiasRule,
    pub initial: InitialCondition,
    /// Dispersion magnitudes of a sweep; each value `μ` replaces the
    /// alternating pair by `(μ, −μ)`.
    pub sweep_mu: Vec<f64>,
    /// Second family run side by side with identical data.
    pub companion: Option<Family>,
    pub tracking: TrackingOptions,
}

const KEYS: &[&str] = &[
    "preset",
    "family",
    "mu",
    "e_mu",
    "o_mu",
    "mu_hat",
    "hyper_order",
    "nu",
    "galerkin_k",
    "forcing_amplitude",
    "nonlinear",
    "n",
    "length",
    "dt",
    "t_end",
    "snapshot_stride",
    "invariant_stride",
    "carpet_rows",
    "output_dir",
    "seed",
    "dealias",
    "initial",
    "initial_amplitude",
    "initial_mode",
    "step_breakpoints",
    "step_values",
    "sweep_mu",
    "companion",
    "track_shock",
    "track_smoothing",
    "track_radius",
    "track_start",
];

struct Entries {
    map: BTreeMap<String, (Option<usize>, String)>,
}

impl Entries {
    fn raw(&self, key: &str) -> Option<(Option<usize>, &str)> {
        self.map.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<T>().map(Some).map_err(|_| {
                Error::config(line, format!("`{key}` expects {}, got `{v}`", type_label::<T>()))
            }),
        }
    }

    fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| Error::config(None, format!("missing required key `{key}`")))
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(|s| s.trim())
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<f64>().map_err(|_| {
                        Error::config(line, format!("`{key}` expects numbers, got `{s}`"))
                    })
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.map.get(key).and_then(|(l, _)| *l)
    }
}

fn type_label<T>() -> &'static str {
    let name = std::any::type_name::<T>();
    if name.contains("f64") {
        "a number"
    } else if name.contains("bool") {
        "true or false"
    } else if name.contains("usize") || name.contains("u64") || name.contains("u32") {
        "a non-negative integer"
    } else {
        "a valid value"
    }
}

/// Parses `key = value` text.  A `preset` key expands first; every other
/// key overrides the preset value.  Unknown keys are errors.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut user = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(Some(line_no), format!("expected `key = value`, got `{line}`")))?;
        let key = key.trim();
        let value = value.trim();
        if !KEYS.contains(&key) {
            return Err(Error::config(Some(line_no), format!("unknown key `{key}`")));
        }
        if user
            .insert(key.to_string(), (Some(line_no), value.to_string()))
            .is_some()
        {
            return Err(Error::config(Some(line_no), format!("duplicate key `{key}`")));
        }
    }

    let preset = match user.get("preset") {
        Some((line, name)) => Some(
            name.parse::<Preset>()
                .map_err(|_| Error::config(*line, format!("unknown preset `{name}`")))?,
        ),
        None => None,
    };
    let mut map = BTreeMap::new();
    if let Some(p) = preset {
        for (k, v) in p.entries() {
            map.insert(k.to_string(), (None, v));
        }
        // an explicit family switches the dispersion keys a preset set for another family
        if user.contains_key("family") {
            for k in ["mu", "e_mu", "o_mu", "mu_hat"] {
                map.remove(k);
            }
        }
    }
    map.extend(user);
    resolve(preset, &Entries { map })
}

fn resolve(preset: Option<Preset>, e: &Entries) -> Result<RunConfig> {
    let family: Family = {
        let (line, v) = e
            .raw("family")
            .ok_or_else(|| Error::config(None, "missing required key `family`"))?;
        v.parse().map_err(|_| Error::config(line, format!("unknown family `{v}`")))?
    };
    let forbid = |keys: &[&str]| -> Result<()> {
        for k in keys {
            if e.raw(k).is_some() {
                return Err(Error::config(
                    e.line_of(k),
                    format!("`{k}` does not apply to family {family}"),
                ));
            }
        }
        Ok(())
    };
    let mut model = match family {
        Family::Kdv => {
            forbid(&["e_mu", "o_mu", "mu_hat", "galerkin_k"])?;
            ModelSpec::kdv(e.require("mu")?)
        }
        Family::Akdv | Family::AkdvCorrected | Family::LinearOnly => {
            forbid(&["mu", "mu_hat", "galerkin_k"])?;
            let (em, om) = (e.require("e_mu")?, e.require("o_mu")?);
            match family {
                Family::Akdv => ModelSpec::akdv(em, om),
                Family::AkdvCorrected => ModelSpec::akdv_corrected(em, om),
                _ => ModelSpec::linear_only(em, om),
            }
        }
        Family::Akdvb => {
            forbid(&["mu", "e_mu", "o_mu", "galerkin_k"])?;
            ModelSpec::akdvb(
                e.require("mu_hat")?,
                e.get_or("hyper_order", 1u32)?,
                e.get_or("nu", 0.0)?,
                Forcing::none(),
            )
        }
        Family::Grbh => {
            forbid(&["mu", "e_mu", "o_mu", "mu_hat"])?;
            ModelSpec::grbh(e.require("galerkin_k")?)
        }
    };
    if family != Family::Akdvb {
        if let Some(m) = e.get::<u32>("hyper_order")? {
            model.hyper_order = m;
        }
        if let Some(nu) = e.get::<f64>("nu")? {
            model.nu = nu;
        }
    }
    if let Some(a) = e.get::<f64>("forcing_amplitude")? {
        model.forcing = if a == 0.0 {
            Forcing::none()
        } else {
            Forcing {
                modes: vec![ForcingMode {
                    k: 1,
                    amplitude: Forcing::sine(a).modes[0].amplitude,
                }],
            }
        };
    }
    if let Some(nl) = e.get::<bool>("nonlinear")? {
        model.nonlinear = nl;
    }
    model
        .validate()
        .map_err(|err| Error::config(None, err.to_string()))?;

    let initial_name: String = e.require("initial")?;
    let amplitude = e.get_or("initial_amplitude", 1.0)?;
    let mode = e.get_or("initial_mode", 1u32)?;
    let initial = match initial_name.as_str() {
        "cosine" => InitialCondition::Cosine { amplitude, mode },
        "sine" => InitialCondition::Sine { amplitude, mode },
        "unit_step" => InitialCondition::Step(StepData::UnitStep),
        "double_step" => InitialCondition::Step(StepData::DoubleStep),
        "custom_step" => InitialCondition::Step(StepData::Custom {
            breakpoints: e
                .list("step_breakpoints")?
                .ok_or_else(|| Error::config(None, "custom_step needs `step_breakpoints`"))?,
            values: e
                .list("step_values")?
                .ok_or_else(|| Error::config(None, "custom_step needs `step_values`"))?,
        }),
        "zero" => InitialCondition::Zero,
        other => {
            return Err(Error::config(
                e.line_of("initial"),
                format!("unknown initial condition `{other}`"),
            ))
        }
    };

    let dealias = match e.get_or("dealias", "two_thirds".to_string())?.as_str() {
        "two_thirds" => DealiasRule::TwoThirds,
        "none" => DealiasRule::None,
        other => {
            return Err(Error::config(
                e.line_of("dealias"),
                format!("unknown dealias rule `{other}`"),
            ))
        }
    };
    let companion = match e.get::<String>("companion")? {
        None => None,
        Some(v) if v == "none" => None,
        Some(v) => Some(
            v.parse::<Family>()
                .map_err(|_| Error::config(e.line_of("companion"), format!("unknown family `{v}`")))?,
        ),
    };
    let sweep_mu = e.list("sweep_mu")?.unwrap_or_default();
    if !sweep_mu.is_empty() && !matches!(family, Family::Akdv | Family::AkdvCorrected) {
        return Err(Error::config(
            e.line_of("sweep_mu"),
            "a dispersion sweep needs an alternating family",
        ));
    }

    let config = RunConfig {
        preset,
        model,
        n: e.get_or("n", 1024usize)?,
        length: e.require("length")?,
        dt: e.get("dt")?,
        t_end: e.require("t_end")?,
        snapshot_stride: e.get_or("snapshot_stride", 1000u64)?,
        invariant_stride: e.get_or("invariant_stride", 100u64)?,
        carpet_rows: e.get_or("carpet_rows", 0usize)?,
        output_dir: PathBuf::from(e.get_or("output_dir", "output".to_string())?),
        seed: e.get_or("seed", 0u64)?,
        dealias,
        initial,
        sweep_mu,
        companion,
        tracking: TrackingOptions {
            enabled: e.get_or("track_shock", false)?,
            smoothing: e.get_or("track_smoothing", 0.0)?,
            radius: e.get("track_radius")?,
            start: e.get_or("track_start", 0.0)?,
        },
    };
    config.check()?;
    Ok(config)
}

impl RunConfig {
    fn check(&self) -> Result<()> {
        Grid::new(self.n, self.length).map_err(|err| Error::config(None, err.to_string()))?;
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::config(None, "t_end must be positive"));
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::config(None, "dt must be positive"));
            }
        }
        if self.snapshot_stride == 0 || self.invariant_stride == 0 {
            return Err(Error::config(None, "strides must be positive"));
        }
        if !(self.tracking.smoothing >= 0.0 && self.tracking.smoothing.is_finite()) {
            return Err(Error::config(None, "track_smoothing must be non-negative"));
        }
        if matches!(self.tracking.radius, Some(r) if !(r.is_finite() && r > 0.0)) {
            return Err(Error::config(None, "track_radius must be positive"));
        }
        if !(self.tracking.start >= 0.0 && self.tracking.start < self.t_end) {
            return Err(Error::config(None, "track_start must lie in [0, t_end)"));
        }
        if self.sweep_mu.iter().any(|m| !m.is_finite()) {
            return Err(Error::config(None, "sweep values must be finite"));
        }
        if let Some(f) = self.companion {
            self.with_family(f)?.model.validate().map_err(|err| Error::config(None, err.to_string()))?;
        }
        Ok(())
    }

    /// Copy with the model family replaced, keeping all parameters.
    pub fn with_family(&self, family: Family) -> Result<RunConfig> {
        let mut c = self.clone();
        c.model.family = family;
        c.companion = None;
        c.sweep_mu.clear();
        c.preset = None;
        c.model
            .validate()
            .map_err(|err| Error::config(None, err.to_string()))?;
        Ok(c)
    }

    /// The independent single runs this configuration stands for, labelled
    /// by their output subdirectory (empty for a plain run).
    pub fn expand(&self) -> Result<Vec<(String, RunConfig)>> {
        let mut runs = Vec::new();
        if !self.sweep_mu.is_empty() {
            for (i, &mu) in self.sweep_mu.iter().enumerate() {
                let mut c = self.clone();
                c.sweep_mu.clear();
                c.companion = None;
                c.preset = None;
                c.model.e_mu = mu;
                c.model.o_mu = -mu;
                runs.push((format!("mu_{i}"), c));
            }
        } else if let Some(f) = self.companion {
            let mut base = self.clone();
            base.companion = None;
            base.preset = None;
            runs.push((self.model.family.name().to_string(), base));
            runs.push((f.name().to_string(), self.with_family(f)?));
        } else {
            runs.push((String::new(), self.clone()));
        }
        Ok(runs)
    }

    /// Derived reference quantities written to the manifest as comments.
    pub fn derived(&self) -> Vec<(&'static str, f64)> {
        let mut out = Vec::new();
        if matches!(self.initial, InitialCondition::Cosine { amplitude, mode } if amplitude == 1.0 && mode == 1)
            && self.length == 2.0
        {
            out.push(("delta", ZK_DELTA));
            out.push(("t_B", zk_breaking_time()));
            out.push(("t_ZK", zk_time()));
        }
        out
    }

    /// Resolved configuration as parseable `key = value` text.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        let m = &self.model;
        kv("family", m.family.name().into());
        match m.family {
            Family::Kdv => kv("mu", fmt_f64(m.e_mu)),
            Family::Akdvb => kv("mu_hat", fmt_f64(m.o_mu)),
            Family::Grbh => kv("galerkin_k", m.galerkin_k.unwrap_or(0).to_string()),
            _ => {
                kv("e_mu", fmt_f64(m.e_mu));
                kv("o_mu", fmt_f64(m.o_mu));
            }
        }
        kv("hyper_order", m.hyper_order.to_string());
        kv("nu", fmt_f64(m.nu));
        let forcing = m.forcing.modes.first().map(|f| -2.0 * f.amplitude.im).unwrap_or(0.0);
        kv("forcing_amplitude", fmt_f64(forcing));
        kv("nonlinear", m.nonlinear.to_string());
        kv("n", self.n.to_string());
        kv("length", fmt_f64(self.length));
        if let Some(dt) = self.dt {
            kv("dt", fmt_f64(dt));
        }
        kv("t_end", fmt_f64(self.t_end));
        kv("snapshot_stride", self.snapshot_stride.to_string());
        kv("invariant_stride", self.invariant_stride.to_string());
        kv("carpet_rows", self.carpet_rows.to_string());
        kv("output_dir", self.output_dir.display().to_string());
        kv("seed", self.seed.to_string());
        kv("dealias", self.dealias.name().into());
        kv("initial", self.initial.name().into());
        match &self.initial {
            InitialCondition::Cosine { amplitude, mode } | InitialCondition::Sine { amplitude, mode } => {
                kv("initial_amplitude", fmt_f64(*amplitude));
                kv("initial_mode", mode.to_string());
            }
            InitialCondition::Step(StepData::Custom {
                breakpoints,
                values,
            }) => {
                let join = |v: &[f64]| v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(", ");
                kv("step_breakpoints", join(breakpoints));
                kv("step_values", join(values));
            }
            _ => {}
        }
        if !self.sweep_mu.is_empty() {
            kv(
                "sweep_mu",
                self.sweep_mu.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(", "),
            );
        }
        if let Some(f) = self.companion {
            kv("companion", f.name().into());
        }
        kv("track_shock", self.tracking.enabled.to_string());
        kv("track_smoothing", fmt_f64(self.tracking.smoothing));
        if let Some(r) = self.tracking.radius {
            kv("track_radius", fmt_f64(r));
        }
        kv("track_start", fmt_f64(self.tracking.start));
        s
    }
}
