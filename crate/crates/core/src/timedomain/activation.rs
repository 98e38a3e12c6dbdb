//! Threshold crossings of the complex concentration within a pulse.

use serde::{Deserialize, Serialize};

use super::input::InputSignal;
use super::trace::{Signal, SimulationTrace};
use crate::error::{Error, Result};

/// Switching behaviour of a downstream reaction that fires once `c(t) ≥ threshold`.
///
/// `t_on` is the first crossing inside the pulse window. `active_duration` is
/// how long the reaction stays switched on before the pulse ends, i.e.
/// `pulse_end - t_on`; for an undistorted pulse it equals the pulse width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActivationTiming {
    pub threshold: f64,
    pub t_on: Option<f64>,
    pub pulse_window: (f64, f64),
    pub active_duration: Option<f64>,
}

/// First crossing of `threshold` by `c(t)` within pulse `pulse_index` of the trace's square-wave source.
pub fn activation_time(
    trace: &SimulationTrace,
    threshold: f64,
    pulse_index: usize,
) -> Result<ActivationTiming> {
    activation_time_of(trace, Signal::Complex, threshold, pulse_index)
}

/// As [`activation_time`], on any of the trace's series.
pub fn activation_time_of(
    trace: &SimulationTrace,
    signal: Signal,
    threshold: f64,
    pulse_index: usize,
) -> Result<ActivationTiming> {
    let window = match trace.source {
        InputSignal::Square(sq) => sq.pulse_window(pulse_index),
        _ => {
            return Err(Error::Config(
                "activation timing needs a square-wave source".into(),
            ))
        }
    };
    crossing_in_window(trace, signal, threshold, window)
}

/// First upward crossing of `threshold` in `[window.0, window.1]`, linearly interpolated.
pub fn crossing_in_window(
    trace: &SimulationTrace,
    signal: Signal,
    threshold: f64,
    window: (f64, f64),
) -> Result<ActivationTiming> {
    let (start, end) = window;
    let times = &trace.times;
    let (Some(&first), Some(&last)) = (times.first(), times.last()) else {
        return Err(Error::Config("empty trace".into()));
    };
    // One sample interval of slack: the last sample may sit just short of the window end.
    let spacing = if times.len() > 1 {
        times[1] - times[0]
    } else {
        0.0
    };
    if first > start || last + spacing < end {
        return Err(Error::Config(format!(
            "trace [{first}, {last}] does not cover pulse window [{start}, {end}]"
        )));
    }
    let values = trace.series(signal);
    let mut t_on = None;
    let mut prev: Option<(f64, f64)> = None;
    for (&t, &y) in times.iter().zip(values) {
        if t > end {
            break;
        }
        if t >= start && y >= threshold {
            t_on = Some(match prev {
                Some((tp, yp)) if yp < threshold => {
                    let frac = (threshold - yp) / (y - yp);
                    (tp + frac * (t - tp)).max(start)
                }
                _ => start,
            });
            break;
        }
        prev = Some((t, y));
    }
    Ok(ActivationTiming {
        threshold,
        t_on,
        pulse_window: window,
        active_duration: t_on.map(|t| end - t),
    })
}

/// First time in the window at which the series reaches `fraction` of its maximum there.
pub fn rise_time(
    trace: &SimulationTrace,
    signal: Signal,
    fraction: f64,
    window: (f64, f64),
) -> Result<Option<f64>> {
    let peak = trace
        .times
        .iter()
        .zip(trace.series(signal))
        .filter(|(&t, _)| t >= window.0 && t <= window.1)
        .map(|(_, &y)| y)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(crossing_in_window(trace, signal, fraction * peak, window)?.t_on)
}
