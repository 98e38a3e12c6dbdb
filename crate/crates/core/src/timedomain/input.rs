use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{non_negative, positive, Error, Result};

/// Periodic rectangular emission profile `v(t)`.
///
/// The wave sits at `offset + amplitude` on `[kT, kT + duty·T)` and at `offset`
/// for the rest of each period `T = 2π / fundamental`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SquareWaveRaw")]
pub struct SquareWaveInput {
    amplitude: f64,
    fundamental: f64,
    duty: f64,
    offset: f64,
}

#[derive(Deserialize)]
struct SquareWaveRaw {
    amplitude: f64,
    fundamental: f64,
    #[serde(default = "half")]
    duty: f64,
    #[serde(default)]
    offset: f64,
}

fn half() -> f64 {
    0.5
}

impl TryFrom<SquareWaveRaw> for SquareWaveInput {
    type Error = Error;
    fn try_from(raw: SquareWaveRaw) -> Result<Self> {
        SquareWaveInput::new(raw.amplitude, raw.fundamental)?
            .with_duty(raw.duty)?
            .with_offset(raw.offset)
    }
}

impl SquareWaveInput {
    /// 50 % duty, swinging between 0 and `amplitude` (µM).
    pub fn new(amplitude: f64, fundamental: f64) -> Result<Self> {
        Ok(Self {
            amplitude: positive("amplitude", amplitude)?,
            fundamental: positive("fundamental", fundamental)?,
            duty: 0.5,
            offset: 0.0,
        })
    }

    pub fn with_duty(mut self, duty: f64) -> Result<Self> {
        if !(duty > 0.0 && duty < 1.0) {
            return Err(Error::InvalidParameter {
                field: "duty",
                value: duty,
                constraint: "must lie in (0, 1)",
            });
        }
        self.duty = duty;
        Ok(self)
    }

    pub fn with_offset(mut self, offset: f64) -> Result<Self> {
        self.offset = non_negative("offset", offset)?;
        Ok(self)
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Result<Self> {
        self.amplitude = positive("amplitude", amplitude)?;
        Ok(self)
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn fundamental(&self) -> f64 {
        self.fundamental
    }

    pub fn duty(&self) -> f64 {
        self.duty
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.fundamental
    }

    pub fn value(&self, t: f64) -> f64 {
        let phase = (t / self.period()).rem_euclid(1.0);
        if phase < self.duty {
            self.offset + self.amplitude
        } else {
            self.offset
        }
    }

    /// Mean level `offset + amplitude·duty`.
    pub fn mean(&self) -> f64 {
        self.offset + self.amplitude * self.duty
    }

    /// Cosine-series term `n`: returns `(c_n, θ_n)` with the harmonic equal to
    /// `c_n cos(n ω t + θ_n)`.
    pub fn harmonic(&self, n: usize) -> (f64, f64) {
        let nf = n as f64;
        let c = 2.0 * self.amplitude * (nf * PI * self.duty).sin() / (nf * PI);
        (c, -nf * PI * self.duty)
    }

    /// The `k`-th high interval `[kT, kT + duty·T]`.
    pub fn pulse_window(&self, k: usize) -> (f64, f64) {
        let t0 = k as f64 * self.period();
        (t0, t0 + self.duty * self.period())
    }

    /// Number of harmonics `n` with `n·ω₁ ≤ omega_max`.
    pub fn harmonics_below(&self, omega_max: f64) -> usize {
        let ratio = omega_max / self.fundamental;
        (ratio * (1.0 + 1e-12)).floor().max(0.0) as usize
    }

    fn has_edge_in(&self, t0: f64, t1: f64) -> bool {
        let period = self.period();
        let first = (t0 / period).floor() as i64;
        let last = (t1 / period).floor() as i64;
        (first..=last).any(|k| {
            let rise = k as f64 * period;
            let fall = rise + self.duty * period;
            (rise > t0 && rise <= t1) || (fall > t0 && fall <= t1)
        })
    }
}

/// Boundary concentration at the transmitter for the finite-difference route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InputSignal {
    Square(SquareWaveInput),
    /// `amplitude · sin(omega t)`.
    Sine {
        amplitude: f64,
        omega: f64,
    },
    /// 0 at `t = 0`, `amplitude` afterwards.
    Step {
        amplitude: f64,
    },
}

impl InputSignal {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InputSignal::Square(_) => Ok(()),
            InputSignal::Sine { amplitude, omega } => {
                positive("amplitude", amplitude)?;
                positive("omega", omega)?;
                Ok(())
            }
            InputSignal::Step { amplitude } => positive("amplitude", amplitude).map(|_| ()),
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            InputSignal::Square(sq) => sq.value(t),
            InputSignal::Sine { amplitude, omega } => amplitude * (omega * t).sin(),
            InputSignal::Step { amplitude } => {
                if t > 0.0 {
                    amplitude
                } else {
                    0.0
                }
            }
        }
    }

    /// Lowest angular frequency carried by the signal, if periodic.
    pub fn fundamental(&self) -> Option<f64> {
        match *self {
            InputSignal::Square(sq) => Some(sq.fundamental()),
            InputSignal::Sine { omega, .. } => Some(omega),
            InputSignal::Step { .. } => None,
        }
    }

    /// True if the signal has a discontinuity in `(t0, t1]`.
    pub fn has_jump(&self, t0: f64, t1: f64) -> bool {
        match *self {
            InputSignal::Square(sq) => sq.has_edge_in(t0, t1),
            InputSignal::Sine { .. } => false,
            InputSignal::Step { .. } => t0 <= 0.0 && t1 > 0.0,
        }
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Ok(match *self {
            InputSignal::Square(sq) => InputSignal::Square(
                sq.with_amplitude(sq.amplitude() * factor)?
                    .with_offset(sq.offset() * factor)?,
            ),
            InputSignal::Sine { amplitude, omega } => InputSignal::Sine {
                amplitude: amplitude * factor,
                omega,
            },
            InputSignal::Step { amplitude } => InputSignal::Step {
                amplitude: amplitude * factor,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn square_wave_levels() {
        let sq = SquareWaveInput::new(0.1, 5e-4).unwrap();
        let t = sq.period();
        assert_eq!(sq.value(0.0), 0.1);
        assert_eq!(sq.value(0.49 * t), 0.1);
        assert_eq!(sq.value(0.51 * t), 0.0);
        assert_eq!(sq.value(1.2 * t), 0.1);
        assert_eq!(sq.mean(), 0.05);
        assert_eq!(sq.pulse_window(1), (t, 1.5 * t));
    }

    #[test]
    fn half_duty_has_odd_harmonics_only() {
        let sq = SquareWaveInput::new(1.0, 1.0).unwrap();
        let (c1, _) = sq.harmonic(1);
        assert_relative_eq!(c1, 2.0 / PI, max_relative = 1e-15);
        assert!(sq.harmonic(2).0.abs() < 1e-15);
        assert!(sq.harmonic(4).0.abs() < 1e-15);
        // First harmonic is (2/π) sin(ωt).
        let (c, th) = sq.harmonic(1);
        for t in [0.1, 1.3, 2.9] {
            assert_relative_eq!(c * (t + th).cos(), 2.0 / PI * f64::sin(t), epsilon = 1e-14);
        }
    }

    #[test]
    fn series_reconstructs_square_wave() {
        let sq = SquareWaveInput::new(2.0, 1.0)
            .unwrap()
            .with_duty(0.3)
            .unwrap();
        let t = 0.4 * sq.period() * 0.3;
        let mut v = sq.mean();
        for n in 1..20_000 {
            let (c, th) = sq.harmonic(n);
            v += c * (n as f64 * t + th).cos();
        }
        assert_relative_eq!(v, 2.0, epsilon = 1e-3);
    }

    #[test]
    fn harmonic_count_for_reference_band() {
        let sq = SquareWaveInput::new(0.1, 5e-4).unwrap();
        assert_eq!(sq.harmonics_below(0.4), 800);
    }

    #[test]
    fn edges_detected() {
        let sq = SquareWaveInput::new(1.0, 2.0 * PI).unwrap();
        let input = InputSignal::Square(sq);
        assert!(input.has_jump(0.4, 0.6));
        assert!(input.has_jump(0.9, 1.1));
        assert!(!input.has_jump(0.1, 0.4));
        assert!(InputSignal::Step { amplitude: 1.0 }.has_jump(0.0, 0.1));
        assert!(!InputSignal::Step { amplitude: 1.0 }.has_jump(0.1, 0.2));
    }

    #[test]
    fn invalid_waves() {
        assert!(SquareWaveInput::new(0.0, 1.0).is_err());
        assert!(SquareWaveInput::new(1.0, 1.0)
            .unwrap()
            .with_duty(1.0)
            .is_err());
        assert!(InputSignal::Sine {
            amplitude: 1.0,
            omega: 0.0
        }
        .validate()
        .is_err());
    }
}
