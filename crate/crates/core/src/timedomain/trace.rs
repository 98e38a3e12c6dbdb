use std::io::Write;

use serde::{Deserialize, Serialize};

use super::input::InputSignal;
use crate::error::{Error, Result};

/// Which route produced a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Fourier,
    Fdm,
}

/// Uniform sample times `start + k·step`, `k = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl TimeGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(start.is_finite() && step.is_finite() && step > 0.0 && len > 0) {
            return Err(Error::Config(format!(
                "time grid needs finite start, step > 0 and len > 0 (got {start}, {step}, {len})"
            )));
        }
        Ok(Self { start, step, len })
    }

    /// `len` samples covering `[start, start + span)`.
    pub fn over(start: f64, span: f64, len: usize) -> Result<Self> {
        Self::new(start, span / len as f64, len)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len)
            .map(|k| self.start + self.step * k as f64)
            .collect()
    }
}

/// Series selector for measurements on a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signal {
    /// Emitted concentration `v(t)`.
    Input,
    /// Concentration at the receiver `u(x_r, t)`.
    Received,
    /// Receptor complex `c(t)`.
    Complex,
}

/// Sampled time series of one channel run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub route: Route,
    pub source: InputSignal,
    pub times: Vec<f64>,
    pub input: Vec<f64>,
    pub received: Vec<f64>,
    pub complex_conc: Vec<f64>,
}

pub const CSV_HEADER: [&str; 4] = ["t[s]", "v[uM]", "u_xr[uM]", "c[uM]"];

/// Nine significant digits.
pub fn format_sig9(x: f64) -> String {
    format!("{x:.8e}")
}

impl SimulationTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn series(&self, signal: Signal) -> &[f64] {
        match signal {
            Signal::Input => &self.input,
            Signal::Received => &self.received,
            Signal::Complex => &self.complex_conc,
        }
    }

    /// Equal lengths, finite values, and `0 ≤ c ≤ r_total` up to `slack`.
    pub fn validate(&self, r_total: f64, slack: f64) -> Result<()> {
        let n = self.times.len();
        if self.input.len() != n || self.received.len() != n || self.complex_conc.len() != n {
            return Err(Error::Config("trace series have different lengths".into()));
        }
        for (i, &c) in self.complex_conc.iter().enumerate() {
            if !c.is_finite() || c < -slack || c > r_total + slack {
                return Err(Error::Evaluation {
                    omega: self.times[i],
                    value: c,
                });
            }
        }
        Ok(())
    }

    /// Samples with `t0 ≤ t < t1`, times kept absolute.
    pub fn window(&self, t0: f64, t1: f64) -> SimulationTrace {
        let idx: Vec<usize> = (0..self.len())
            .filter(|&i| self.times[i] >= t0 && self.times[i] < t1)
            .collect();
        let pick = |s: &[f64]| idx.iter().map(|&i| s[i]).collect::<Vec<_>>();
        SimulationTrace {
            route: self.route,
            source: self.source,
            times: pick(&self.times),
            input: pick(&self.input),
            received: pick(&self.received),
            complex_conc: pick(&self.complex_conc),
        }
    }

    /// CSV with a header row naming columns and units.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for i in 0..self.len() {
            w.write_record([
                format_sig9(self.times[i]),
                format_sig9(self.input[i]),
                format_sig9(self.received[i]),
                format_sig9(self.complex_conc[i]),
            ])?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))?;
        Ok(())
    }
}

/// Root-mean-square of `a - b` relative to the RMS of `b`.
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "series length mismatch");
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "series length mismatch");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
