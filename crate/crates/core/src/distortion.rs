//! Amplitude and delay distortion indices over a frequency band.
//!
//! For a band `[ω₁, ω₂]` with fundamental period `T₁ = 2π/ω₁`:
//!
//! ```text
//! Q = max g(ω) - min g(ω)            g = 20 log10 |F(jω)|   (dB)
//! R = (max τ(ω) - min τ(ω)) / T₁     τ = -∠F(jω) / ω        (periods)
//! ```
//!
//! Two routes are provided: a generic log-spaced grid search over any gain or
//! phase-delay callable, and closed forms for the diffusion and reception
//! systems. Both subsystems are monotone decreasing in ω, so the closed forms
//! are endpoint differences and the grid search must reproduce them.

use std::f64::consts::{LOG10_E, PI};

use serde::{Deserialize, Serialize};

use crate::channel::{DiffusionChannel, FrequencyBand, ReceptionSystem};
use crate::error::{non_negative, positive, Error, Result};

pub const DEFAULT_GRID_POINTS: usize = 4096;

/// `n` log-spaced frequencies covering the band, both endpoints exact.
pub fn log_grid(band: &FrequencyBand, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            field: "n_points",
            value: n as f64,
            constraint: "grid needs at least 2 points",
        });
    }
    let lo = band.omega1().ln();
    let span = band.omega2().ln() - lo;
    let last = (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n)
        .map(|i| (lo + span * i as f64 / last).exp())
        .collect();
    grid[0] = band.omega1();
    grid[n - 1] = band.omega2();
    Ok(grid)
}

/// Spread `max - min` of `f` sampled on the log grid.
///
/// Extremes are picked by index-ordered comparison so the result does not
/// depend on evaluation order.
fn grid_spread<F>(f: F, band: &FrequencyBand, n_points: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for omega in log_grid(band, n_points)? {
        let value = f(omega)?;
        if !value.is_finite() {
            return Err(Error::Evaluation { omega, value });
        }
        lo = lo.min(value);
        hi = hi.max(value);
    }
    Ok(hi - lo)
}

/// Amplitude distortion `Q` (dB) of a logarithmic-gain curve, by grid search.
pub fn q_index_grid<F>(gain_db: F, band: &FrequencyBand, n_points: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    grid_spread(gain_db, band, n_points)
}

/// Delay distortion `R` (fraction of `T₁`) of a phase-delay curve, by grid search.
pub fn r_index_grid<F>(phase_delay: F, band: &FrequencyBand, n_points: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok(grid_spread(phase_delay, band, n_points)? / band.period())
}

pub fn q_diffusion(ch: &DiffusionChannel, band: &FrequencyBand) -> f64 {
    20.0 * ch.delay_scale() * (band.omega2().sqrt() - band.omega1().sqrt()) * LOG10_E
}

pub fn r_diffusion(ch: &DiffusionChannel, band: &FrequencyBand) -> f64 {
    ch.delay_scale() * (1.0 / band.omega1().sqrt() - 1.0 / band.omega2().sqrt()) / band.period()
}

/// Depends on `k_r` only; `k_f` and `r` shift the gain curve without changing its spread.
pub fn q_reception(rs: &ReceptionSystem, band: &FrequencyBand) -> f64 {
    let k_r = rs.k_r();
    reception_q(band.omega1() / k_r, band.omega2() / k_r)
}

/// `(τ_H(ω₁) - τ_H(ω₂)) / T₁`, written out in closed form.
pub fn r_reception(rs: &ReceptionSystem, band: &FrequencyBand) -> f64 {
    let k_r = rs.k_r();
    reception_r(band.omega1() / k_r, band.omega2() / k_r)
}

// Both reception indices cancel badly when the band lies far below k_r, so
// they are written in terms of differences that stay accurate there.

/// `20 log10 (|1 + jb| / |1 + ja|)`.
fn reception_q(a: f64, b: f64) -> f64 {
    10.0 * LOG10_E * ((b - a) * (b + a) / (1.0 + a * a)).ln_1p()
}

/// `(atan a - (a/b) atan b) / 2π = a (h(b) - h(a)) / 2π`.
fn reception_r(a: f64, b: f64) -> f64 {
    a * (one_minus_atan_ratio(b) - one_minus_atan_ratio(a)) / (2.0 * PI)
}

/// `h(x) = 1 - atan(x)/x`, by its Maclaurin series below 0.5.
fn one_minus_atan_ratio(x: f64) -> f64 {
    if x >= 0.5 {
        return 1.0 - x.atan() / x;
    }
    let x2 = x * x;
    let (mut sum, mut power, mut k) = (0.0, x2, 1.0);
    loop {
        let term = power / (2.0 * k + 1.0);
        let signed = if k % 2.0 == 1.0 { term } else { -term };
        sum += signed;
        if term <= 1e-18 * sum.abs() {
            return sum;
        }
        power *= x2;
        k += 1.0;
    }
}

/// Closed-form indices for the diffusion system, the reception system, and the whole channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub q_g: f64,
    pub r_g: f64,
    pub q_h: f64,
    pub r_h: f64,
    pub q_m: f64,
    pub r_m: f64,
    pub band: FrequencyBand,
}

impl DistortionReport {
    pub fn new(ch: &DiffusionChannel, rs: &ReceptionSystem, band: &FrequencyBand) -> Self {
        let q_g = q_diffusion(ch, band);
        let r_g = r_diffusion(ch, band);
        let q_h = q_reception(rs, band);
        let r_h = r_reception(rs, band);
        Self {
            q_g,
            r_g,
            q_h,
            r_h,
            q_m: q_g + q_h,
            r_m: r_g + r_h,
            band: *band,
        }
    }

    /// Checks non-negativity and the channel decomposition `Q_M = Q_G + Q_H`, `R_M = R_G + R_H`.
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("q_g", self.q_g),
            ("r_g", self.r_g),
            ("q_h", self.q_h),
            ("r_h", self.r_h),
            ("q_m", self.q_m),
            ("r_m", self.r_m),
        ] {
            non_negative(field, v)?;
        }
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300);
        if !close(self.q_m, self.q_g + self.q_h) {
            return Err(Error::InvalidParameter {
                field: "q_m",
                value: self.q_m,
                constraint: "must equal q_g + q_h",
            });
        }
        if !close(self.r_m, self.r_g + self.r_h) {
            return Err(Error::InvalidParameter {
                field: "r_m",
                value: self.r_m,
                constraint: "must equal r_g + r_h",
            });
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NormalizedBandRaw {
    omega1p: f64,
    omega2p: f64,
    lambda: f64,
}

/// Band and distance in units of the receptor dissociation rate.
///
/// `ω' = ω / k_r` and `λ = sqrt(x_r² k_r / 2µ)`. In these coordinates the
/// diffusion indices are linear in `λ` and the reception indices depend on
/// `(ω'₁, ω'₂)` alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormalizedBandRaw")]
pub struct NormalizedBand {
    omega1p: f64,
    omega2p: f64,
    lambda: f64,
}

impl TryFrom<NormalizedBandRaw> for NormalizedBand {
    type Error = Error;
    fn try_from(raw: NormalizedBandRaw) -> Result<Self> {
        NormalizedBand::new(raw.omega1p, raw.omega2p, raw.lambda)
    }
}

impl NormalizedBand {
    pub fn new(omega1p: f64, omega2p: f64, lambda: f64) -> Result<Self> {
        positive("omega1p", omega1p)?;
        positive("omega2p", omega2p)?;
        if omega2p <= omega1p {
            return Err(Error::InvalidParameter {
                field: "omega2p",
                value: omega2p,
                constraint: "must be strictly greater than omega1p",
            });
        }
        Ok(Self {
            omega1p,
            omega2p,
            lambda: non_negative("lambda", lambda)?,
        })
    }

    pub fn omega1p(&self) -> f64 {
        self.omega1p
    }

    pub fn omega2p(&self) -> f64 {
        self.omega2p
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.omega1p, self.omega2p, lambda)
    }

    /// The dimensional band for a given dissociation rate.
    pub fn band(&self, k_r: f64) -> Result<FrequencyBand> {
        FrequencyBand::new(self.omega1p * k_r, self.omega2p * k_r)
    }

    /// Communication distance `x_r = λ sqrt(2µ / k_r)` recovered from `λ`.
    pub fn distance(&self, mu: f64, k_r: f64) -> f64 {
        self.lambda * (2.0 * mu / k_r).sqrt()
    }

    pub fn q_diffusion(&self) -> f64 {
        20.0 * self.lambda * (self.omega2p.sqrt() - self.omega1p.sqrt()) * LOG10_E
    }

    pub fn r_diffusion(&self) -> f64 {
        self.omega1p / (2.0 * PI)
            * self.lambda
            * (1.0 / self.omega1p.sqrt() - 1.0 / self.omega2p.sqrt())
    }

    pub fn q_reception(&self) -> f64 {
        reception_q(self.omega1p, self.omega2p)
    }

    pub fn r_reception(&self) -> f64 {
        reception_r(self.omega1p, self.omega2p)
    }
}

pub fn normalize(
    ch: &DiffusionChannel,
    rs: &ReceptionSystem,
    band: &FrequencyBand,
) -> NormalizedBand {
    let k_r = rs.k_r();
    NormalizedBand {
        omega1p: band.omega1() / k_r,
        omega2p: band.omega2() / k_r,
        lambda: ch.x_r() * (k_r / (2.0 * ch.mu())).sqrt(),
    }
}

pub fn q_diffusion_normalized(nb: &NormalizedBand) -> f64 {
    nb.q_diffusion()
}

pub fn r_diffusion_normalized(nb: &NormalizedBand) -> f64 {
    nb.r_diffusion()
}

pub fn q_reception_normalized(nb: &NormalizedBand) -> f64 {
    nb.q_reception()
}

pub fn r_reception_normalized(nb: &NormalizedBand) -> f64 {
    nb.r_reception()
}

/// Lower normalized edges `ω'₁` that maximise `R_G` and `R_H` for a fixed `ω'₂`.
///
/// Returns `(ω'₂/4, sqrt(ω'₂/atan(ω'₂) - 1))`.
pub fn r_maxima(omega2p: f64) -> Result<(f64, f64)> {
    let w2 = positive("omega2p", omega2p)?;
    Ok((w2 / 4.0, (w2 / w2.atan() - 1.0).sqrt()))
}
