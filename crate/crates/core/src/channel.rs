//! Physical channel parameters and their frequency responses.
//!
//! Units are fixed throughout the crate: distances in µm, time in s,
//! concentrations in µM and angular frequencies in rad/s.
//!
//! ```text
//! G(s)  = exp(-sqrt(x_r² s / µ))                 diffusion, emitter -> receiver
//! H(s)  = k_f r / (s + k_r)                      receptor binding
//! G'(s) = exp(-sqrt(d² s / µ)) / (4π µ d)        diffusion in three dimensions
//! ```
//!
//! Responses are carried as magnitude and *unwrapped* phase. The diffusion
//! phase `-sqrt(x_r² ω / 2µ)` grows without bound, and phase delay
//! `τ(ω) = -∠F(jω)/ω` needs the accumulated value, not the principal one.

use std::f64::consts::{LOG10_E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{non_negative, positive, Error, Result};

/// Gain and phase of a transfer function evaluated at `s = jω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexResponse {
    pub magnitude: f64,
    /// Unwrapped phase in radians.
    pub phase: f64,
}

impl ComplexResponse {
    pub fn gain_db(&self) -> f64 {
        20.0 * self.magnitude.log10()
    }

    /// Series connection of two responses.
    pub fn cascade(self, other: ComplexResponse) -> ComplexResponse {
        ComplexResponse {
            magnitude: self.magnitude * other.magnitude,
            phase: self.phase + other.phase,
        }
    }
}

/// Anything with a gain and a phase delay over positive frequencies.
pub trait FrequencyResponse {
    fn response(&self, omega: f64) -> Result<ComplexResponse>;

    /// Logarithmic gain `20 log10 |F(jω)|` in dB.
    fn gain_db(&self, omega: f64) -> Result<f64>;

    /// Phase delay `-∠F(jω)/ω` in seconds.
    fn phase_delay(&self, omega: f64) -> Result<f64>;
}

fn check_omega(operation: &'static str, omega: f64) -> Result<f64> {
    if omega.is_finite() && omega > 0.0 {
        Ok(omega)
    } else {
        Err(Error::Domain {
            operation,
            reason: "angular frequency must be finite and > 0",
            value: omega,
        })
    }
}

fn check_omega_dc(operation: &'static str, omega: f64) -> Result<f64> {
    if omega.is_finite() && omega >= 0.0 {
        Ok(omega)
    } else {
        Err(Error::Domain {
            operation,
            reason: "angular frequency must be finite and >= 0",
            value: omega,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiffusionChannelRaw {
    mu: f64,
    x_r: f64,
}

/// One-dimensional diffusion from the transmitter at `x = 0` to a receiver at `x_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiffusionChannelRaw")]
pub struct DiffusionChannel {
    mu: f64,
    x_r: f64,
}

impl TryFrom<DiffusionChannelRaw> for DiffusionChannel {
    type Error = Error;
    fn try_from(raw: DiffusionChannelRaw) -> Result<Self> {
        DiffusionChannel::new(raw.mu, raw.x_r)
    }
}

impl DiffusionChannel {
    /// `mu` in µm²/s, `x_r` in µm.
    pub fn new(mu: f64, x_r: f64) -> Result<Self> {
        Ok(Self {
            mu: positive("mu", mu)?,
            x_r: non_negative("x_r", x_r)?,
        })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn x_r(&self) -> f64 {
        self.x_r
    }

    pub fn with_distance(&self, x_r: f64) -> Result<Self> {
        Self::new(self.mu, x_r)
    }

    /// `sqrt(x_r² / 2µ)`, the factor shared by every diffusion formula (s^½).
    pub fn delay_scale(&self) -> f64 {
        self.x_r / (2.0 * self.mu).sqrt()
    }

    /// The exponent `sqrt(x_r² ω / 2µ)`; equals both `-ln|G|` and `-∠G`.
    fn exponent(&self, omega: f64) -> f64 {
        self.delay_scale() * omega.sqrt()
    }
}

impl FrequencyResponse for DiffusionChannel {
    fn response(&self, omega: f64) -> Result<ComplexResponse> {
        let a = self.exponent(check_omega("diffusion_response", omega)?);
        Ok(ComplexResponse {
            magnitude: (-a).exp(),
            phase: -a,
        })
    }

    fn gain_db(&self, omega: f64) -> Result<f64> {
        let a = self.exponent(check_omega("diffusion_gain_db", omega)?);
        Ok(-20.0 * a * LOG10_E)
    }

    fn phase_delay(&self, omega: f64) -> Result<f64> {
        let omega = check_omega("diffusion_phase_delay", omega)?;
        Ok(self.delay_scale() / omega.sqrt())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReceptionSystemRaw {
    k_f: f64,
    k_r: f64,
    r: f64,
}

/// Linearised receptor binding `dc/dt = k_f r u - k_r c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ReceptionSystemRaw")]
pub struct ReceptionSystem {
    k_f: f64,
    k_r: f64,
    r: f64,
}

impl TryFrom<ReceptionSystemRaw> for ReceptionSystem {
    type Error = Error;
    fn try_from(raw: ReceptionSystemRaw) -> Result<Self> {
        ReceptionSystem::new(raw.k_f, raw.k_r, raw.r)
    }
}

impl ReceptionSystem {
    /// `k_f` in µM⁻¹s⁻¹, `k_r` in s⁻¹, `r` (total receptor) in µM.
    pub fn new(k_f: f64, k_r: f64, r: f64) -> Result<Self> {
        let rs = Self {
            k_f: positive("k_f", k_f)?,
            k_r: positive("k_r", k_r)?,
            r: positive("r", r)?,
        };
        let dc = rs.dc_gain();
        if !(dc.is_finite() && dc > 0.0) {
            return Err(Error::InvalidParameter {
                field: "k_f*r/k_r",
                value: dc,
                constraint: "DC gain must be finite and > 0",
            });
        }
        Ok(rs)
    }

    pub fn k_f(&self) -> f64 {
        self.k_f
    }

    pub fn k_r(&self) -> f64 {
        self.k_r
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Binding flux coefficient `k_f r` (s⁻¹).
    pub fn binding_rate(&self) -> f64 {
        self.k_f * self.r
    }

    /// `|H(0)| = k_f r / k_r`.
    pub fn dc_gain(&self) -> f64 {
        self.k_f * self.r / self.k_r
    }
}

impl FrequencyResponse for ReceptionSystem {
    fn response(&self, omega: f64) -> Result<ComplexResponse> {
        let omega = check_omega_dc("reception_response", omega)?;
        Ok(ComplexResponse {
            magnitude: self.binding_rate() / omega.hypot(self.k_r),
            phase: (-omega / self.k_r).atan(),
        })
    }

    fn gain_db(&self, omega: f64) -> Result<f64> {
        let omega = check_omega_dc("reception_gain_db", omega)?;
        Ok(20.0 * self.binding_rate().log10() - 20.0 * omega.hypot(self.k_r).log10())
    }

    /// `atan(ω/k_r)/ω`, with the removable singularity at ω = 0 filled by `1/k_r`.
    fn phase_delay(&self, omega: f64) -> Result<f64> {
        let omega = check_omega_dc("reception_phase_delay", omega)?;
        if omega == 0.0 {
            return Ok(1.0 / self.k_r);
        }
        Ok((omega / self.k_r).atan() / omega)
    }
}

/// The full channel `G(s) H(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cascade {
    pub diffusion: DiffusionChannel,
    pub reception: ReceptionSystem,
}

impl Cascade {
    pub fn new(diffusion: DiffusionChannel, reception: ReceptionSystem) -> Self {
        Self {
            diffusion,
            reception,
        }
    }
}

impl FrequencyResponse for Cascade {
    fn response(&self, omega: f64) -> Result<ComplexResponse> {
        Ok(self
            .diffusion
            .response(omega)?
            .cascade(self.reception.response(omega)?))
    }

    fn gain_db(&self, omega: f64) -> Result<f64> {
        Ok(self.diffusion.gain_db(omega)? + self.reception.gain_db(omega)?)
    }

    fn phase_delay(&self, omega: f64) -> Result<f64> {
        Ok(self.diffusion.phase_delay(omega)? + self.reception.phase_delay(omega)?)
    }
}

pub fn cascade_response(
    ch: &DiffusionChannel,
    rs: &ReceptionSystem,
    omega: f64,
) -> Result<ComplexResponse> {
    Cascade::new(*ch, *rs).response(omega)
}

/// Point-to-point diffusion in unbounded 3-D space over distance `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diffusion3d {
    mu: f64,
    d: f64,
}

impl Diffusion3d {
    pub fn new(mu: f64, d: f64) -> Result<Self> {
        let mu = positive("mu", mu)?;
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::Domain {
                operation: "diffusion3d_response",
                reason: "distance must be > 0 (the 1/(4πµd) prefactor is singular at 0)",
                value: d,
            });
        }
        Ok(Self { mu, d })
    }

    /// The frequency-independent factor `1/(4πµd)` (µm⁻³·s).
    pub fn prefactor(&self) -> f64 {
        1.0 / (4.0 * PI * self.mu * self.d)
    }

    /// The 1-D channel with the same exponent.
    pub fn as_1d(&self) -> DiffusionChannel {
        DiffusionChannel {
            mu: self.mu,
            x_r: self.d,
        }
    }
}

impl FrequencyResponse for Diffusion3d {
    fn response(&self, omega: f64) -> Result<ComplexResponse> {
        let r = self.as_1d().response(omega)?;
        Ok(ComplexResponse {
            magnitude: self.prefactor() * r.magnitude,
            phase: r.phase,
        })
    }

    fn gain_db(&self, omega: f64) -> Result<f64> {
        Ok(20.0 * self.prefactor().log10() + self.as_1d().gain_db(omega)?)
    }

    fn phase_delay(&self, omega: f64) -> Result<f64> {
        self.as_1d().phase_delay(omega)
    }
}

pub fn diffusion3d_response(mu: f64, d: f64, omega: f64) -> Result<ComplexResponse> {
    Diffusion3d::new(mu, d)?.response(omega)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FrequencyBandRaw {
    omega1: f64,
    omega2: f64,
}

/// Analysis band `[ω₁, ω₂]` with `0 < ω₁ < ω₂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrequencyBandRaw")]
pub struct FrequencyBand {
    omega1: f64,
    omega2: f64,
}

impl TryFrom<FrequencyBandRaw> for FrequencyBand {
    type Error = Error;
    fn try_from(raw: FrequencyBandRaw) -> Result<Self> {
        FrequencyBand::new(raw.omega1, raw.omega2)
    }
}

impl FrequencyBand {
    pub fn new(omega1: f64, omega2: f64) -> Result<Self> {
        let omega1 = positive("omega1", omega1)?;
        let omega2 = positive("omega2", omega2)?;
        if omega2 <= omega1 {
            return Err(Error::InvalidParameter {
                field: "omega2",
                value: omega2,
                constraint: "must be strictly greater than omega1",
            });
        }
        Ok(Self { omega1, omega2 })
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn omega2(&self) -> f64 {
        self.omega2
    }

    /// Period of the lowest frequency, `T₁ = 2π/ω₁`.
    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega1
    }

    pub fn contains(&self, omega: f64) -> bool {
        omega >= self.omega1 && omega <= self.omega2
    }
}
