//! Scenario files.
//!
//! A scenario is a TOML document in fixed units: µm for distances, s for
//! time, µM for concentrations, rad/s for frequencies, µm²/s for diffusion
//! coefficients. Every section is optional at parse time; each command
//! asks for the sections it needs.

use std::path::Path;

use diffchan::{
    CleanBandOptions, DiffusionChannel, FrequencyBand, ReceptionSystem, SquareWaveInput,
    ThresholdMode,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<DiffusionChannel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reception: Option<ReceptionSystem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<FrequencyBand>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Thresholds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<Simulation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub species: Vec<Species>,
}

/// Distortion budgets, each given either absolutely or as a multiple of the reception system's own index.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q0_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0_factor: Option<f64>,
}

/// One budget after resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    Absolute(f64),
    Factor(f64),
}

impl Budget {
    pub fn apply(self, reception_index: f64) -> f64 {
        match self {
            Budget::Absolute(v) => v,
            Budget::Factor(f) => f * reception_index,
        }
    }
}

impl Thresholds {
    pub fn budgets(&self) -> Result<(Budget, Budget)> {
        fn pick(name: &str, abs: Option<f64>, factor: Option<f64>) -> Result<Budget> {
            let b = match (abs, factor) {
                (Some(v), None) => Budget::Absolute(v),
                (None, Some(f)) => Budget::Factor(f),
                (Some(_), Some(_)) => {
                    return Err(CliError::Config(format!(
                        "thresholds: give either {name} or {name}_factor, not both"
                    )))
                }
                (None, None) => {
                    return Err(CliError::Config(format!(
                        "thresholds: {name} or {name}_factor is required"
                    )))
                }
            };
            let v = match b {
                Budget::Absolute(v) | Budget::Factor(v) => v,
            };
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Config(format!(
                    "thresholds: {name} must be finite and > 0 (got {v})"
                )));
            }
            Ok(b)
        }
        Ok((
            pick("q0", self.q0, self.q0_factor)?,
            pick("r0", self.r0, self.r0_factor)?,
        ))
    }
}

/// Square-wave emission and solver settings. The fundamental is the band's lower edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Simulation {
    #[serde(default = "defaults::amplitude")]
    pub amplitude: f64,
    #[serde(default = "defaults::duty")]
    pub duty: f64,
    #[serde(default)]
    pub offset: f64,
    /// Activation threshold on the complex concentration (µM).
    #[serde(default = "defaults::threshold")]
    pub threshold: f64,
    /// Periods covered by the Fourier traces.
    #[serde(default = "defaults::one")]
    pub periods: usize,
    #[serde(default = "defaults::samples_per_period")]
    pub samples_per_period: usize,
    /// Harmonic count; defaults to every harmonic up to the band's upper edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub harmonics: Option<usize>,
    #[serde(default)]
    pub fdm: FdmSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdmSection {
    #[serde(default = "defaults::dx")]
    pub dx: f64,
    #[serde(default = "defaults::steps_per_period")]
    pub steps_per_period: usize,
    /// Simulated periods; timings are read from the last one.
    #[serde(default = "defaults::fdm_periods")]
    pub periods: usize,
    /// Time steps between recorded samples.
    #[serde(default = "defaults::output_stride")]
    pub output_stride: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_length: Option<f64>,
}

impl Default for FdmSection {
    fn default() -> Self {
        Self {
            dx: defaults::dx(),
            steps_per_period: defaults::steps_per_period(),
            periods: defaults::fdm_periods(),
            output_stride: defaults::output_stride(),
            domain_length: None,
        }
    }
}

/// Grid over normalized frequencies `(ω'₁, ω'₂)` at fixed `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    #[serde(default = "defaults::lambda")]
    pub lambda: f64,
    #[serde(default = "defaults::omega_min")]
    pub omega_min: f64,
    #[serde(default = "defaults::omega_max")]
    pub omega_max: f64,
    #[serde(default = "defaults::sweep_points")]
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

impl Sweep {
    pub fn axis(&self, points: usize) -> Vec<f64> {
        let (lo, hi) = (self.omega_min, self.omega_max);
        let last = (points - 1) as f64;
        (0..points)
            .map(|i| {
                let f = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => lo + f * (hi - lo),
                    Spacing::Log => lo * (hi / lo).powf(f),
                }
            })
            .map(|w| w.min(hi))
            .collect()
    }
}

/// One row of the clean-band table. Rows without `x_r` are reported with blank bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Species {
    pub name: String,
    pub mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_r: Option<f64>,
    #[serde(default = "defaults::decade_width")]
    pub decade_width: f64,
    #[serde(default = "defaults::frac")]
    pub q_frac: f64,
    #[serde(default = "defaults::frac")]
    pub r_frac: f64,
}

impl Species {
    pub fn options(&self) -> CleanBandOptions {
        CleanBandOptions {
            decade_width: self.decade_width,
            q_frac: self.q_frac,
            r_frac: self.r_frac,
            thresholds: ThresholdMode::BandDependent,
            ..CleanBandOptions::default()
        }
    }
}

mod defaults {
    pub fn amplitude() -> f64 {
        0.1
    }
    pub fn duty() -> f64 {
        0.5
    }
    pub fn threshold() -> f64 {
        0.09
    }
    pub fn one() -> usize {
        1
    }
    pub fn samples_per_period() -> usize {
        4000
    }
    pub fn dx() -> f64 {
        0.5
    }
    pub fn steps_per_period() -> usize {
        6000
    }
    pub fn fdm_periods() -> usize {
        3
    }
    pub fn output_stride() -> usize {
        4
    }
    pub fn lambda() -> f64 {
        1.0
    }
    pub fn omega_min() -> f64 {
        0.5
    }
    pub fn omega_max() -> f64 {
        100.0
    }
    pub fn sweep_points() -> usize {
        200
    }
    pub fn decade_width() -> f64 {
        10.0
    }
    pub fn frac() -> f64 {
        0.1
    }
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses and validates every section present.
    pub fn parse(text: &str) -> Result<Self> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| config(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = &self.thresholds {
            t.budgets()?;
        }
        if let Some(sim) = &self.simulation {
            let omega = self.band.map_or(1.0, |b| b.omega1());
            sim.square_wave(omega)?;
            check(sim.threshold.is_finite() && sim.threshold >= 0.0, || {
                format!(
                    "simulation.threshold must be finite and >= 0 (got {})",
                    sim.threshold
                )
            })?;
            check(sim.periods >= 1, || {
                "simulation.periods must be >= 1".into()
            })?;
            check(sim.samples_per_period >= 2, || {
                "simulation.samples_per_period must be >= 2".into()
            })?;
            check(sim.harmonics != Some(0), || {
                "simulation.harmonics must be >= 1".into()
            })?;
            let f = &sim.fdm;
            check(f.dx.is_finite() && f.dx > 0.0, || {
                format!("simulation.fdm.dx must be > 0 (got {})", f.dx)
            })?;
            check(f.steps_per_period >= 2, || {
                "simulation.fdm.steps_per_period must be >= 2".into()
            })?;
            check(f.periods >= 1, || {
                "simulation.fdm.periods must be >= 1".into()
            })?;
            check(f.output_stride >= 1, || {
                "simulation.fdm.output_stride must be >= 1".into()
            })?;
            if let Some(l) = f.domain_length {
                check(l.is_finite() && l > 0.0, || {
                    format!("simulation.fdm.domain_length must be > 0 (got {l})")
                })?;
            }
        }
        if let Some(s) = &self.sweep {
            check(s.lambda.is_finite() && s.lambda >= 0.0, || {
                format!("sweep.lambda must be finite and >= 0 (got {})", s.lambda)
            })?;
            check(s.omega_min.is_finite() && s.omega_min > 0.0, || {
                format!("sweep.omega_min must be > 0 (got {})", s.omega_min)
            })?;
            check(s.omega_max.is_finite() && s.omega_max > s.omega_min, || {
                format!(
                    "sweep.omega_max must exceed omega_min (got {})",
                    s.omega_max
                )
            })?;
            check(s.points >= 2, || "sweep.points must be >= 2".into())?;
        }
        for sp in &self.species {
            check(sp.mu.is_finite() && sp.mu > 0.0, || {
                format!("species {}: mu must be > 0", sp.name)
            })?;
            if let Some(x) = sp.x_r {
                check(x.is_finite() && x >= 0.0, || {
                    format!("species {}: x_r must be >= 0", sp.name)
                })?;
            }
            check(sp.decade_width > 1.0, || {
                format!("species {}: decade_width must be > 1", sp.name)
            })?;
            for (name, v) in [("q_frac", sp.q_frac), ("r_frac", sp.r_frac)] {
                check(v > 0.0 && v < 1.0, || {
                    format!("species {}: {name} must lie in (0, 1)", sp.name)
                })?;
            }
        }
        Ok(())
    }

    pub fn channel(&self) -> Result<DiffusionChannel> {
        self.channel
            .ok_or_else(|| config("missing [channel] section"))
    }

    pub fn reception(&self) -> Result<ReceptionSystem> {
        self.reception
            .ok_or_else(|| config("missing [reception] section"))
    }

    pub fn band(&self) -> Result<FrequencyBand> {
        self.band.ok_or_else(|| config("missing [band] section"))
    }

    pub fn thresholds(&self) -> Result<Thresholds> {
        self.thresholds
            .ok_or_else(|| config("missing [thresholds] section"))
    }

    pub fn simulation(&self) -> Result<Simulation> {
        self.simulation
            .ok_or_else(|| config("missing [simulation] section"))
    }

    pub fn sweep(&self) -> Result<Sweep> {
        self.sweep.ok_or_else(|| config("missing [sweep] section"))
    }
}

impl Simulation {
    pub fn square_wave(&self, fundamental: f64) -> Result<SquareWaveInput> {
        Ok(SquareWaveInput::new(self.amplitude, fundamental)?
            .with_duty(self.duty)?
            .with_offset(self.offset)?)
    }
}
