//! Steady-periodic channel response by harmonic superposition.
//!
//! Each cosine term of the square wave passes through the channel as
//! `|F(jnω₁)| cos(nω₁t + θ_n + ∠F(jnω₁))`; the mean passes through the DC gains
//! `G(0) = 1` and `H(0) = k_f r / k_r`.

use crate::channel::{DiffusionChannel, FrequencyResponse, ReceptionSystem};
use crate::error::{Error, Result};

use super::input::{InputSignal, SquareWaveInput};
use super::trace::{Route, SimulationTrace, TimeGrid};

struct Term {
    omega: f64,
    // (amplitude, phase) for v, u(x_r) and c respectively
    parts: [(f64, f64); 3],
}

/// Synthesises `v`, `u(x_r, ·)` and `c` from the first `n_harmonics` harmonics.
pub fn synthesize_fourier(
    ch: &DiffusionChannel,
    rs: &ReceptionSystem,
    input: &SquareWaveInput,
    n_harmonics: usize,
    grid: &TimeGrid,
) -> Result<SimulationTrace> {
    if n_harmonics == 0 {
        return Err(Error::InvalidParameter {
            field: "n_harmonics",
            value: 0.0,
            constraint: "must be >= 1",
        });
    }
    let mut terms = Vec::with_capacity(n_harmonics);
    for n in 1..=n_harmonics {
        let (c, theta) = input.harmonic(n);
        if c == 0.0 || c.abs() < 1e-15 * input.amplitude() {
            continue;
        }
        let omega = n as f64 * input.fundamental();
        let g = ch.response(omega)?;
        let gh = g.cascade(rs.response(omega)?);
        terms.push(Term {
            omega,
            parts: [
                (c, theta),
                (c * g.magnitude, theta + g.phase),
                (c * gh.magnitude, theta + gh.phase),
            ],
        });
    }

    let mean = input.mean();
    let times = grid.times();
    let mut series = [
        vec![mean; times.len()],
        vec![mean; times.len()],
        vec![mean * rs.dc_gain(); times.len()],
    ];
    for term in &terms {
        // cos(ωt + φ) = cos ωt cos φ - sin ωt sin φ
        let coeffs = term
            .parts
            .map(|(amp, phase)| (amp * phase.cos(), amp * phase.sin()));
        for (k, &t) in times.iter().enumerate() {
            let (s, c) = (term.omega * t).sin_cos();
            for (out, (a, b)) in series.iter_mut().zip(coeffs) {
                out[k] += a * c - b * s;
            }
        }
    }
    let [input_series, received, complex_conc] = series;
    Ok(SimulationTrace {
        route: Route::Fourier,
        source: InputSignal::Square(*input),
        times,
        input: input_series,
        received,
        complex_conc,
    })
}
