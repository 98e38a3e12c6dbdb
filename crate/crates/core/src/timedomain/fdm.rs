//! Finite-difference solution of the diffusion PDE coupled to receptor binding.
//!
//! ```text
//! ∂u/∂t = µ ∂²u/∂x²,   u(0,t) = v(t),   u(L,t) = 0,   u(x,0) = 0
//! dc/dt = k_f r u(x_r,t) - k_r c,        c(0) = 0
//! ```
//!
//! Space uses second-order central differences on a uniform grid with `x_r`
//! placed exactly on a node. Time stepping is Crank–Nicolson; any step that
//! contains a jump of the boundary value is replaced by two backward-Euler
//! half steps (Rannacher smoothing) so the discontinuity does not excite the
//! undamped high-frequency modes of Crank–Nicolson. The receptor ODE is
//! integrated exactly for `u(x_r, ·)` linear over each step.

use serde::{Deserialize, Serialize};

use crate::channel::{DiffusionChannel, ReceptionSystem};
use crate::error::{Error, Result};

use super::input::InputSignal;
use super::trace::{Route, SimulationTrace};

/// User-facing solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdmConfig {
    /// Requested spatial step (µm); shrunk slightly so `x_r` falls on a node.
    pub dx: f64,
    /// Time step (s).
    pub dt: f64,
    /// Domain length (µm). Defaults to `max(10 x_r, 5 sqrt(2µ/ω₁))`.
    #[serde(default)]
    pub domain_length: Option<f64>,
    /// Simulated time (s).
    pub duration: f64,
    /// Spacing of recorded samples (s); must be a multiple of `dt`.
    pub output_interval: f64,
}

/// Solver settings after snapping and defaulting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdmSettings {
    pub scheme: FdmScheme,
    pub mu: f64,
    pub dx: f64,
    pub dt: f64,
    pub domain_length: f64,
    /// Grid intervals; nodes are `0..=intervals`.
    pub intervals: usize,
    pub receiver_node: usize,
    pub steps: usize,
    pub sample_stride: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FdmScheme {
    CrankNicolsonRannacher,
}

/// Domain length that keeps the Dirichlet-zero far boundary from disturbing `u(x_r, ·)`.
pub fn default_domain_length(ch: &DiffusionChannel, input: &InputSignal, duration: f64) -> f64 {
    let depth = match input.fundamental() {
        Some(omega) => (2.0 * ch.mu() / omega).sqrt(),
        None => (2.0 * ch.mu() * duration).sqrt(),
    };
    (10.0 * ch.x_r()).max(5.0 * depth)
}

fn config_err(msg: String) -> Error {
    Error::Config(msg)
}

/// Validates a configuration and resolves the grid it implies, without running.
pub fn resolve(ch: &DiffusionChannel, input: &InputSignal, cfg: &FdmConfig) -> Result<FdmSettings> {
    input.validate()?;
    for (name, v) in [
        ("dx", cfg.dx),
        ("dt", cfg.dt),
        ("duration", cfg.duration),
        ("output_interval", cfg.output_interval),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(config_err(format!(
                "{name} must be finite and > 0 (got {v})"
            )));
        }
    }
    let length = cfg
        .domain_length
        .unwrap_or_else(|| default_domain_length(ch, input, cfg.duration));
    if !(length.is_finite() && length > 0.0) {
        return Err(config_err(format!(
            "domain_length must be > 0 (got {length})"
        )));
    }
    let x_r = ch.x_r();
    if x_r >= length {
        return Err(config_err(format!(
            "receiver at x_r = {x_r} µm lies outside the domain of length {length} µm"
        )));
    }

    let (dx, receiver_node) = if x_r > 0.0 {
        let n = (x_r / cfg.dx).round().max(1.0);
        (x_r / n, n as usize)
    } else {
        (cfg.dx, 0)
    };
    let intervals = (length / dx).ceil() as usize;
    if intervals < receiver_node + 2 || intervals < 3 {
        return Err(config_err(format!(
            "domain of {length} µm with dx = {dx} µm leaves too few nodes beyond the receiver"
        )));
    }

    let steps = (cfg.duration / cfg.dt).round() as usize;
    let stride_f = cfg.output_interval / cfg.dt;
    let sample_stride = stride_f.round() as usize;
    if sample_stride == 0 || (stride_f - sample_stride as f64).abs() > 1e-9 * stride_f.max(1.0) {
        return Err(config_err(format!(
            "output_interval {} is not a positive multiple of dt {}",
            cfg.output_interval, cfg.dt
        )));
    }
    if steps == 0 {
        return Err(config_err("duration shorter than one time step".into()));
    }

    Ok(FdmSettings {
        scheme: FdmScheme::CrankNicolsonRannacher,
        mu: ch.mu(),
        dx,
        dt: cfg.dt,
        domain_length: intervals as f64 * dx,
        intervals,
        receiver_node,
        steps,
        sample_stride,
    })
}

/// LU factors of the constant tridiagonal matrix `(1 + 2θρ) I - θρ (shift₋ + shift₊)`.
struct Tridiagonal {
    off: f64,
    // forward-eliminated super-diagonal and reciprocal pivots
    upper: Vec<f64>,
    inv_pivot: Vec<f64>,
}

impl Tridiagonal {
    fn new(size: usize, theta_rho: f64) -> Self {
        let diag = 1.0 + 2.0 * theta_rho;
        let off = -theta_rho;
        let mut upper = vec![0.0; size];
        let mut inv_pivot = vec![0.0; size];
        let mut prev_upper = 0.0;
        for i in 0..size {
            let pivot = diag - off * prev_upper;
            inv_pivot[i] = 1.0 / pivot;
            upper[i] = off / pivot;
            prev_upper = upper[i];
        }
        Self {
            off,
            upper,
            inv_pivot,
        }
    }

    fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        let mut prev = 0.0;
        for (x, inv) in rhs.iter_mut().zip(&self.inv_pivot) {
            *x = (*x - self.off * prev) * inv;
            prev = *x;
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.upper[i] * rhs[i + 1];
        }
    }
}

/// One θ-scheme step with a precomputed factorisation.
struct Stepper {
    theta: f64,
    rho: f64,
    matrix: Tridiagonal,
}

impl Stepper {
    fn new(interior: usize, theta: f64, rho: f64) -> Self {
        Self {
            theta,
            rho,
            matrix: Tridiagonal::new(interior, theta * rho),
        }
    }

    /// Advances `u` (all nodes, `u[0]` holding the old boundary value) to the new
    /// boundary value `v_new`. `scratch` has one slot per interior node.
    fn advance(&self, u: &mut [f64], v_new: f64, scratch: &mut [f64]) {
        let n = u.len() - 1;
        let explicit = (1.0 - self.theta) * self.rho;
        for i in 1..n {
            scratch[i - 1] = u[i] + explicit * (u[i - 1] - 2.0 * u[i] + u[i + 1]);
        }
        scratch[0] += self.theta * self.rho * v_new;
        self.matrix.solve_in_place(scratch);
        u[0] = v_new;
        u[1..n].copy_from_slice(scratch);
        u[n] = 0.0;
    }
}

/// Exact update of `dc/dt = a u(t) - k c` over `h` for `u` linear between `u0` and `u1`.
struct ReceptorStep {
    decay: f64,
    w0: f64,
    w1: f64,
}

impl ReceptorStep {
    fn new(rs: &ReceptionSystem, h: f64) -> Self {
        let k = rs.k_r();
        let a = rs.binding_rate();
        let kh = k * h;
        let decay = (-kh).exp();
        // ∫₀ʰ e^{-k(h-s)} ds  and  ∫₀ʰ e^{-k(h-s)} s/h ds
        let (i0, i1) = if kh < 1e-3 {
            let i0 = h * (1.0 - kh / 2.0 + kh * kh / 6.0 - kh * kh * kh / 24.0);
            let i1 = h * (0.5 - kh / 6.0 + kh * kh / 24.0 - kh * kh * kh / 120.0);
            (i0, i1)
        } else {
            let i0 = -(-kh).exp_m1() / k;
            (i0, i0 - (-(-kh).exp_m1() - kh * decay) / (k * kh))
        };
        Self {
            decay,
            w0: a * (i0 - i1),
            w1: a * i1,
        }
    }

    fn advance(&self, c: f64, u0: f64, u1: f64) -> f64 {
        c * self.decay + self.w0 * u0 + self.w1 * u1
    }
}

/// Runs the coupled PDE + ODE and samples `v`, `u(x_r, ·)` and `c`.
pub fn simulate_fdm(
    ch: &DiffusionChannel,
    rs: &ReceptionSystem,
    input: &InputSignal,
    cfg: &FdmConfig,
) -> Result<SimulationTrace> {
    let s = resolve(ch, input, cfg)?;
    Ok(run(rs, input, &s))
}

/// Runs with already-resolved settings.
pub fn run(rs: &ReceptionSystem, input: &InputSignal, s: &FdmSettings) -> SimulationTrace {
    let interior = s.intervals - 1;
    let rho = |h: f64| s.mu * h / (s.dx * s.dx);
    let cn = Stepper::new(interior, 0.5, rho(s.dt));
    let half_be = Stepper::new(interior, 1.0, rho(s.dt / 2.0));
    let full_ode = ReceptorStep::new(rs, s.dt);
    let half_ode = ReceptorStep::new(rs, s.dt / 2.0);

    let mut u = vec![0.0; s.intervals + 1];
    let mut scratch = vec![0.0; interior];
    let mut c = 0.0;

    let samples = s.steps / s.sample_stride + 1;
    let mut times = Vec::with_capacity(samples);
    let mut v_series = Vec::with_capacity(samples);
    let mut u_series = Vec::with_capacity(samples);
    let mut c_series = Vec::with_capacity(samples);
    let mut record = |t: f64, u: &[f64], c: f64| {
        times.push(t);
        v_series.push(input.value(t));
        u_series.push(u[s.receiver_node]);
        c_series.push(c);
    };
    record(0.0, &u, c);

    for n in 0..s.steps {
        let t0 = n as f64 * s.dt;
        let t1 = (n + 1) as f64 * s.dt;
        let u_before = u[s.receiver_node];
        if n == 0 || input.has_jump(t0, t1) {
            let tm = t0 + s.dt / 2.0;
            half_be.advance(&mut u, input.value(tm), &mut scratch);
            let u_mid = u[s.receiver_node];
            c = half_ode.advance(c, u_before, u_mid);
            half_be.advance(&mut u, input.value(t1), &mut scratch);
            c = half_ode.advance(c, u_mid, u[s.receiver_node]);
        } else {
            cn.advance(&mut u, input.value(t1), &mut scratch);
            c = full_ode.advance(c, u_before, u[s.receiver_node]);
        }
        if (n + 1) % s.sample_stride == 0 {
            record(t1, &u, c);
        }
    }

    SimulationTrace {
        route: Route::Fdm,
        source: *input,
        times,
        input: v_series,
        received: u_series,
        complex_conc: c_series,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tridiagonal_solve_matches_direct_product() {
        let m = Tridiagonal::new(5, 0.7);
        let x = [1.0, -2.0, 0.5, 3.0, 0.25];
        let mut b: Vec<f64> = (0..5)
            .map(|i| {
                let mut v = (1.0 + 1.4) * x[i];
                if i > 0 {
                    v -= 0.7 * x[i - 1];
                }
                if i < 4 {
                    v -= 0.7 * x[i + 1];
                }
                v
            })
            .collect();
        m.solve_in_place(&mut b);
        for i in 0..5 {
            assert_relative_eq!(b[i], x[i], epsilon = 1e-13);
        }
    }

    #[test]
    fn receptor_step_is_exact_for_linear_input() {
        // dc/dt = a u - k c with u = 1 + t; c(0) = 0.
        let rs = ReceptionSystem::new(2.0, 0.5, 1.5).unwrap();
        let (a, k) = (3.0, 0.5);
        let exact = |t: f64| {
            // particular solution p + q t
            let q = a / k;
            let p = a / k - a / (k * k);
            p + q * t - p * (-k * t).exp()
        };
        for h in [1e-5, 0.1, 2.0] {
            let step = ReceptorStep::new(&rs, h);
            assert_relative_eq!(
                step.advance(0.0, 1.0, 1.0 + h),
                exact(h),
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn receiver_lands_on_node() {
        let ch = DiffusionChannel::new(83.0, 14.0).unwrap();
        let input = InputSignal::Sine {
            amplitude: 1.0,
            omega: 0.1,
        };
        let cfg = FdmConfig {
            dx: 0.3,
            dt: 0.1,
            domain_length: None,
            duration: 10.0,
            output_interval: 1.0,
        };
        let s = resolve(&ch, &input, &cfg).unwrap();
        assert_relative_eq!(s.receiver_node as f64 * s.dx, 14.0, max_relative = 1e-14);
        assert_eq!(s.sample_stride, 10);
        assert!(s.domain_length >= 140.0);
    }

    #[test]
    fn configuration_errors() {
        let ch = DiffusionChannel::new(83.0, 14.0).unwrap();
        let input = InputSignal::Sine {
            amplitude: 1.0,
            omega: 0.1,
        };
        let base = FdmConfig {
            dx: 0.5,
            dt: 0.1,
            domain_length: Some(100.0),
            duration: 10.0,
            output_interval: 1.0,
        };
        let short = FdmConfig {
            domain_length: Some(14.0),
            ..base
        };
        assert!(matches!(
            resolve(&ch, &input, &short),
            Err(Error::Config(_))
        ));
        let odd = FdmConfig {
            output_interval: 0.25,
            ..base
        };
        assert!(resolve(&ch, &input, &odd).is_err());
        let neg = FdmConfig { dt: -1.0, ..base };
        assert!(resolve(&ch, &input, &neg).is_err());
        assert!(resolve(&ch, &input, &base).is_ok());
    }

    #[test]
    fn steady_state_profile() {
        // Constant input: u(x_r) -> V₀ (1 - x_r/L), c -> k_f r u / k_r.
        let ch = DiffusionChannel::new(100.0, 10.0).unwrap();
        let rs = ReceptionSystem::new(0.5, 2.0, 1.0).unwrap();
        let input = InputSignal::Step { amplitude: 2.0 };
        let cfg = FdmConfig {
            dx: 0.5,
            dt: 0.05,
            domain_length: Some(40.0),
            duration: 200.0,
            output_interval: 10.0,
        };
        let tr = simulate_fdm(&ch, &rs, &input, &cfg).unwrap();
        let u_end = *tr.received.last().unwrap();
        assert_relative_eq!(u_end, 2.0 * (1.0 - 10.0 / 40.0), max_relative = 1e-9);
        assert_relative_eq!(
            *tr.complex_conc.last().unwrap(),
            0.25 * u_end,
            max_relative = 1e-9
        );
    }
}
