//! Time-domain responses to square-wave emission, by two independent routes.
//!
//! [`synthesize_fourier`] superposes the channel's steady-state response to
//! each harmonic of the input; [`simulate_fdm`] integrates the diffusion PDE and
//! the receptor rate equation directly. Agreement between the two is the check
//! that the transfer functions describe the physical model.

mod activation;
mod fdm;
mod fourier;
mod input;
mod trace;

pub use activation::{
    activation_time, activation_time_of, crossing_in_window, rise_time, ActivationTiming,
};
pub use fdm::{
    default_domain_length, resolve, run, simulate_fdm, FdmConfig, FdmScheme, FdmSettings,
};
pub use fourier::synthesize_fourier;
pub use input::{InputSignal, SquareWaveInput};
pub use trace::{
    format_sig9, max_abs_diff, relative_l2, Route, Signal, SimulationTrace, TimeGrid, CSV_HEADER,
};

/// Least-squares fit `y ≈ offset + amplitude · sin(ω t + phase)` over the given samples.
///
/// Returns `(amplitude, phase, offset)` with `phase` in `(-π, π]`.
pub fn fit_sinusoid(times: &[f64], values: &[f64], omega: f64) -> (f64, f64, f64) {
    // Normal equations for the basis [sin ωt, cos ωt, 1].
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for (&t, &y) in times.iter().zip(values) {
        let (s, c) = (omega * t).sin_cos();
        let basis = [s, c, 1.0];
        for i in 0..3 {
            rhs[i] += basis[i] * y;
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
        }
    }
    let [a, b, offset] = solve3(m, rhs);
    (a.hypot(b), b.atan2(a), offset)
}

fn solve3(mut m: [[f64; 3]; 3], mut r: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        r.swap(col, pivot);
        let pivot_row = m[col];
        for row in col + 1..3 {
            let f = m[row][col] / pivot_row[col];
            for (a, b) in m[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *a -= f * b;
            }
            r[row] -= f * r[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| m[row][k] * x[k]).sum();
        x[row] = (r[row] - tail) / m[row][row];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fit_recovers_known_sinusoid() {
        let times: Vec<f64> = (0..500).map(|k| k as f64 * 0.013).collect();
        let values: Vec<f64> = times
            .iter()
            .map(|&t| 0.3 + 1.7 * (2.1 * t - 0.4).sin())
            .collect();
        let (amp, phase, offset) = fit_sinusoid(&times, &values, 2.1);
        assert_relative_eq!(amp, 1.7, epsilon = 1e-12);
        assert_relative_eq!(phase, -0.4, epsilon = 1e-12);
        assert_relative_eq!(offset, 0.3, epsilon = 1e-12);
    }
}
