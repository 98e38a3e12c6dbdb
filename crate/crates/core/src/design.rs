//! Channel design under distortion budgets.
//!
//! Because the diffusion and reception subsystems are both monotone, the
//! channel indices split as `Q_M = Q_G + Q_H` and `R_M = R_G + R_H`. Given
//! thresholds `Q₀ > Q_H` and `R₀ > R_H`, the diffusion share is linear in
//! `x_r` and the distance bound follows directly:
//!
//! ```text
//! x_Q = sqrt(2µ) (Q₀ - Q_H) / (20 (sqrt ω₂ - sqrt ω₁) log10 e)
//! x_R = sqrt(2µ) (R₀ - R_H) T₁ / (1/sqrt ω₁ - 1/sqrt ω₂)
//! x_r < min(x_Q, x_R)
//! ```

use std::f64::consts::LOG10_E;

use serde::{Deserialize, Serialize};

use crate::channel::{DiffusionChannel, FrequencyBand, ReceptionSystem};
use crate::distortion::{q_diffusion, q_reception, r_diffusion, r_reception};
use crate::error::{positive, Error, Result};

/// Distortion thresholds for the whole channel plus the fixed parts of the design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub q0: f64,
    pub r0: f64,
    pub band: FrequencyBand,
    pub rs: ReceptionSystem,
    pub mu: f64,
}

impl DesignSpec {
    pub fn new(
        q0: f64,
        r0: f64,
        band: FrequencyBand,
        rs: ReceptionSystem,
        mu: f64,
    ) -> Result<Self> {
        Ok(Self {
            q0: positive("q0", q0)?,
            r0: positive("r0", r0)?,
            band,
            rs,
            mu: positive("mu", mu)?,
        })
    }

    /// Thresholds expressed as multiples of the reception system's own distortion,
    /// e.g. `1.2` leaves the diffusion system a budget of one fifth of `Q_H`.
    pub fn relative_to_reception(
        q_factor: f64,
        r_factor: f64,
        band: FrequencyBand,
        rs: ReceptionSystem,
        mu: f64,
    ) -> Result<Self> {
        positive("q_factor", q_factor)?;
        positive("r_factor", r_factor)?;
        Self::new(
            q_factor * q_reception(&rs, &band),
            r_factor * r_reception(&rs, &band),
            band,
            rs,
            mu,
        )
    }
}

/// Which threshold limits the distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingConstraint {
    Amplitude,
    Delay,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignResult {
    /// Distance allowed by the amplitude budget (µm). Non-positive when `Q₀ ≤ Q_H`.
    pub x_q: f64,
    /// Distance allowed by the delay budget (µm). Non-positive when `R₀ ≤ R_H`.
    pub x_r_delay: f64,
    /// `min(x_Q, x_R)` when feasible.
    pub x_r_limit: Option<f64>,
    pub feasible: bool,
    pub binding: Option<BindingConstraint>,
    pub q_h: f64,
    pub r_h: f64,
}

/// Upper limit on the communication distance for a set of distortion thresholds.
///
/// When the reception system alone already uses up either budget the result is
/// returned with `feasible = false` rather than as an error.
pub fn distance_bound(spec: &DesignSpec) -> DesignResult {
    let band = &spec.band;
    let (w1, w2) = (band.omega1(), band.omega2());
    let q_h = q_reception(&spec.rs, band);
    let r_h = r_reception(&spec.rs, band);
    let root = (2.0 * spec.mu).sqrt();

    let x_q = root * (spec.q0 - q_h) / (20.0 * (w2.sqrt() - w1.sqrt()) * LOG10_E);
    let x_r_delay = root * (spec.r0 - r_h) * band.period() / (1.0 / w1.sqrt() - 1.0 / w2.sqrt());

    let feasible = spec.q0 > q_h && spec.r0 > r_h;
    let (x_r_limit, binding) = if feasible {
        if x_r_delay <= x_q {
            (Some(x_r_delay), Some(BindingConstraint::Delay))
        } else {
            (Some(x_q), Some(BindingConstraint::Amplitude))
        }
    } else {
        (None, None)
    };
    DesignResult {
        x_q,
        x_r_delay,
        x_r_limit,
        feasible,
        binding,
        q_h,
        r_h,
    }
}

/// Frequency at which `|H(jω)|` has fallen to `attenuation`.
pub fn reception_cutoff(rs: &ReceptionSystem, attenuation: f64) -> Result<f64> {
    let dc = rs.dc_gain();
    if !(attenuation.is_finite() && attenuation > 0.0 && attenuation < dc) {
        return Err(Error::Domain {
            operation: "reception_cutoff",
            reason: "attenuation must lie in (0, k_f r / k_r)",
            value: attenuation,
        });
    }
    let level = rs.binding_rate() / attenuation;
    Ok(((level - rs.k_r()) * (level + rs.k_r())).sqrt())
}

/// How the reception thresholds of the clean-band predicate are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum ThresholdMode {
    /// `Q_H`, `R_H` evaluated on each candidate band.
    BandDependent,
    /// `Q_H`, `R_H` held at fixed values regardless of the candidate band.
    Fixed { q_h: f64, r_h: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CleanBandOptions {
    /// `ω₂ / ω₁` of every candidate band.
    pub decade_width: f64,
    pub q_frac: f64,
    pub r_frac: f64,
    pub search_lo: f64,
    pub search_hi: f64,
    /// Relative bracket width at which bisection stops.
    pub rel_tol: f64,
    /// Density of the coarse scan that locates the upper feasibility edge.
    pub scan_per_decade: usize,
    pub thresholds: ThresholdMode,
}

impl Default for CleanBandOptions {
    fn default() -> Self {
        Self {
            decade_width: 10.0,
            q_frac: 0.1,
            r_frac: 0.1,
            search_lo: 1e-8,
            search_hi: 1e8,
            rel_tol: 1e-4,
            scan_per_decade: 16,
            thresholds: ThresholdMode::BandDependent,
        }
    }
}

impl CleanBandOptions {
    fn validate(&self) -> Result<()> {
        if !(self.decade_width.is_finite() && self.decade_width > 1.0) {
            return Err(Error::InvalidParameter {
                field: "decade_width",
                value: self.decade_width,
                constraint: "must be > 1",
            });
        }
        for (field, v) in [("q_frac", self.q_frac), ("r_frac", self.r_frac)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter {
                    field,
                    value: v,
                    constraint: "must lie in (0, 1)",
                });
            }
        }
        positive("search_lo", self.search_lo)?;
        positive("search_hi", self.search_hi)?;
        if self.search_hi <= self.search_lo {
            return Err(Error::InvalidParameter {
                field: "search_hi",
                value: self.search_hi,
                constraint: "must exceed search_lo",
            });
        }
        positive("rel_tol", self.rel_tol)?;
        if self.scan_per_decade == 0 {
            return Err(Error::InvalidParameter {
                field: "scan_per_decade",
                value: 0.0,
                constraint: "must be >= 1",
            });
        }
        if let ThresholdMode::Fixed { q_h, r_h } = self.thresholds {
            positive("q_h", q_h)?;
            positive("r_h", r_h)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CleanBand {
    pub band: FrequencyBand,
    /// The predicate still held at the top of the search range.
    pub saturated: bool,
}

/// Whether the band `[ω₁, width·ω₁]` keeps the diffusion distortion within the given
/// fractions of the reception distortion.
pub fn band_is_clean(
    ch: &DiffusionChannel,
    rs: &ReceptionSystem,
    omega1: f64,
    opts: &CleanBandOptions,
) -> Result<bool> {
    let band = FrequencyBand::new(omega1, opts.decade_width * omega1)?;
    let (q_h, r_h) = match opts.thresholds {
        ThresholdMode::BandDependent => (q_reception(rs, &band), r_reception(rs, &band)),
        ThresholdMode::Fixed { q_h, r_h } => (q_h, r_h),
    };
    Ok(q_diffusion(ch, &band) <= opts.q_frac * q_h && r_diffusion(ch, &band) <= opts.r_frac * r_h)
}

/// Highest band of fixed ratio `ω₂/ω₁` whose diffusion distortion stays below the
/// fractional reception thresholds.
///
/// With band-dependent thresholds the predicate is a window, not a half-line:
/// below `k_r` the reception indices vanish faster (∝ ω²) than the diffusion
/// ones (∝ sqrt ω), so very low bands fail too. The search therefore scans the
/// range on a log grid from the top down, takes the highest passing grid point,
/// and bisects between it and the failing point above it.
pub fn highest_clean_band(
    mu: f64,
    x_r: f64,
    rs: &ReceptionSystem,
    opts: &CleanBandOptions,
) -> Result<CleanBand> {
    opts.validate()?;
    let ch = DiffusionChannel::new(mu, x_r)?;
    let clean = |w: f64| band_is_clean(&ch, rs, w, opts);

    let log_lo = opts.search_lo.log10();
    let log_hi = opts.search_hi.log10();
    let steps = ((log_hi - log_lo) * opts.scan_per_decade as f64)
        .ceil()
        .max(1.0) as usize;
    let at = |k: usize| {
        if k == steps {
            opts.search_hi
        } else {
            10f64.powf(log_lo + (log_hi - log_lo) * k as f64 / steps as f64)
        }
    };

    if clean(opts.search_hi)? {
        return Ok(CleanBand {
            band: FrequencyBand::new(opts.search_hi, opts.decade_width * opts.search_hi)?,
            saturated: true,
        });
    }
    let mut pass = None;
    for k in (0..steps).rev() {
        if clean(at(k))? {
            pass = Some(k);
            break;
        }
    }
    let k = pass.ok_or(Error::NoCleanBand {
        lo: opts.search_lo,
        hi: opts.search_hi,
    })?;

    let (mut lo, mut hi) = (at(k), at(k + 1));
    while hi / lo - 1.0 > opts.rel_tol {
        let mid = (lo * hi).sqrt();
        if clean(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(CleanBand {
        band: FrequencyBand::new(lo, opts.decade_width * lo)?,
        saturated: false,
    })
}
