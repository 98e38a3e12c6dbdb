//! Exit criteria. Each test prints one `[PASS]`/`[FAIL]` line; run with
//! `--nocapture --test-threads=1` to read them in order.

use diffchan::distortion::log_grid;
use diffchan::timedomain::{activation_time_of, fit_sinusoid, relative_l2, rise_time, Signal};
use diffchan::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const MU: f64 = 83.0;
const AMPLITUDE: f64 = 0.1;
const THRESHOLD: f64 = 0.09;

fn gate(id: u32, title: &str, pass: bool, detail: String) {
    println!(
        "[{}] C{id} {title}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "C{id} {title}: {detail}");
}

fn reception() -> ReceptionSystem {
    ReceptionSystem::new(1.0e-3, 4.0e-3, 4.0).unwrap()
}

fn analysis_band() -> FrequencyBand {
    FrequencyBand::new(5.0e-4, 4.0e-1).unwrap()
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn within_rel(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target.abs()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

struct Case {
    ch: DiffusionChannel,
    rs: ReceptionSystem,
    band: FrequencyBand,
}

fn random_cases() -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_d1ff);
    let mut log_uniform = |lo: f64, hi: f64| 10f64.powf(rng.gen_range(lo.log10()..hi.log10()));
    (0..100)
        .map(|_| {
            let mu = log_uniform(0.1, 7000.0);
            let x_r = log_uniform(0.01, 400.0);
            let k_r = log_uniform(1e-4, 1.0);
            let k_f = log_uniform(1e-4, 1.0);
            let w1 = log_uniform(1e-6, 1e3 / 1.01);
            let max_ratio = (1e3 / w1).min(1e6);
            let w2 = w1 * log_uniform(1.01, max_ratio.max(1.0101));
            Case {
                ch: DiffusionChannel::new(mu, x_r).unwrap(),
                rs: ReceptionSystem::new(k_f, k_r, 1.0).unwrap(),
                band: FrequencyBand::new(w1, w2.min(1e3)).unwrap(),
            }
        })
        .collect()
}

#[test]
fn reception_indices() {
    let rs = reception();
    let band = analysis_band();
    let (q_h, r_h) = (q_reception(&rs, &band), r_reception(&rs, &band));
    let pass = within(q_h, 39.9, 0.1) && within(r_h, 1.95e-2, 1e-4);
    gate(
        1,
        "reception indices",
        pass,
        format!("Q_H = {q_h:.4} dB, R_H = {r_h:.5e}"),
    );
}

#[test]
fn design_distance_bound() {
    let spec =
        DesignSpec::relative_to_reception(1.2, 1.2, analysis_band(), reception(), MU).unwrap();
    let res = distance_bound(&spec);
    let limit = res.x_r_limit.unwrap_or(f64::NAN);
    let pass = res.feasible
        && within(limit, 14.6, 0.1)
        && res.binding == Some(BindingConstraint::Delay)
        && within(res.x_q, 19.4, 0.1);
    gate(
        2,
        "design distance bound",
        pass,
        format!(
            "x_r < {limit:.3} um ({:?} binds), x_Q = {:.3} um, x_R = {:.3} um",
            res.binding, res.x_q, res.x_r_delay
        ),
    );
}

#[test]
fn reception_cutoff_frequency() {
    let w = reception_cutoff(&reception(), 1.0 / 100.0).unwrap();
    gate(
        3,
        "reception cutoff",
        within_rel(w, 0.4, 0.01),
        format!("|H| = 1/100 at {w:.5} rad/s"),
    );
}

#[test]
fn highest_clean_decades() {
    let rs = reception();
    let opts = CleanBandOptions::default();
    let rows = [
        ("autoinducer", 83.0, 10.0, 2.0e-2),
        ("neurotransmitter", 500.0, 2.5e-2, 1.9e4),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, mu, x_r, target) in rows {
        let found = highest_clean_band(mu, x_r, &rs, &opts).unwrap();
        let (w1, w2) = (found.band.omega1(), found.band.omega2());
        let ok = within_rel(w1, target, 0.05) && within_rel(w2, 10.0 * target, 0.05);
        pass &= ok;
        detail.push(format!(
            "{name} [{w1:.4e}, {w2:.4e}] vs [{target:.1e}, {:.1e}] ({:+.1}%)",
            10.0 * target,
            100.0 * (w1 / target - 1.0)
        ));
    }
    gate(
        4,
        "highest clean decade per species",
        pass,
        detail.join("; "),
    );
}

#[test]
fn closed_forms_match_grid_search() {
    let n = DEFAULT_GRID_POINTS;
    let mut worst = 0.0f64;
    let mut failures = 0;
    for c in random_cases() {
        let pairs = [
            (
                q_index_grid(|w| c.ch.gain_db(w), &c.band, n).unwrap(),
                q_diffusion(&c.ch, &c.band),
            ),
            (
                r_index_grid(|w| c.ch.phase_delay(w), &c.band, n).unwrap(),
                r_diffusion(&c.ch, &c.band),
            ),
            (
                q_index_grid(|w| c.rs.gain_db(w), &c.band, n).unwrap(),
                q_reception(&c.rs, &c.band),
            ),
            (
                r_index_grid(|w| c.rs.phase_delay(w), &c.band, n).unwrap(),
                r_reception(&c.rs, &c.band),
            ),
        ];
        for (grid, closed) in pairs {
            if !close(grid, closed, 1e-6) {
                failures += 1;
            }
            worst = worst.max((grid - closed).abs() / closed.abs());
        }
    }
    gate(
        5,
        "closed forms match grid search",
        failures == 0,
        format!("100 random sets, {failures} mismatches, worst relative gap {worst:.2e}"),
    );
}

#[test]
fn cascade_indices_decompose() {
    let n = DEFAULT_GRID_POINTS;
    let mut failures = 0;
    let mut worst = 0.0f64;
    for c in random_cases() {
        let m = Cascade::new(c.ch, c.rs);
        let q = q_index_grid(|w| m.gain_db(w), &c.band, n).unwrap();
        let r = r_index_grid(|w| m.phase_delay(w), &c.band, n).unwrap();
        let q_sum = q_diffusion(&c.ch, &c.band) + q_reception(&c.rs, &c.band);
        let r_sum = r_diffusion(&c.ch, &c.band) + r_reception(&c.rs, &c.band);
        for (grid, sum) in [(q, q_sum), (r, r_sum)] {
            if !close(grid, sum, 1e-6) {
                failures += 1;
            }
            worst = worst.max((grid - sum).abs() / sum.abs());
        }
    }
    gate(
        6,
        "cascade indices decompose",
        failures == 0,
        format!("100 random sets, {failures} mismatches, worst relative gap {worst:.2e}"),
    );
}

#[test]
fn normalized_indices_and_lambda_scaling() {
    let rel = |a: f64, b: f64| {
        if a == b {
            0.0
        } else {
            (a - b).abs() / a.abs().max(b.abs())
        }
    };
    let mut worst = 0.0f64;
    let mut linear = true;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for c in random_cases() {
        let nb = normalize(&c.ch, &c.rs, &c.band);
        worst = worst
            .max(rel(nb.q_diffusion(), q_diffusion(&c.ch, &c.band)))
            .max(rel(nb.r_diffusion(), r_diffusion(&c.ch, &c.band)))
            .max(rel(nb.q_reception(), q_reception(&c.rs, &c.band)))
            .max(rel(nb.r_reception(), r_reception(&c.rs, &c.band)));
        let doubled = nb.with_lambda(2.0 * nb.lambda()).unwrap();
        linear &= doubled.q_diffusion() == 2.0 * nb.q_diffusion();
        linear &= doubled.r_diffusion() == 2.0 * nb.r_diffusion();
        let k: f64 = rng.gen_range(0.0..50.0);
        let scaled = nb.with_lambda(k * nb.lambda()).unwrap();
        linear &= rel(scaled.q_diffusion(), k * nb.q_diffusion()) <= 1e-14;
        linear &= rel(scaled.r_diffusion(), k * nb.r_diffusion()) <= 1e-14;
    }
    gate(
        7,
        "normalized form and lambda linearity",
        worst <= 1e-12 && linear,
        format!("worst normalized-vs-dimensional gap {worst:.2e}, linear in lambda: {linear}"),
    );
}

#[test]
fn delay_distortion_maxima() {
    let mut pass = true;
    let mut detail = Vec::new();
    for w2 in [1.0, 4.0, 10.0, 100.0] {
        let (g_star, h_star) = r_maxima(w2).unwrap();
        let band = FrequencyBand::new(w2 * 1e-6, w2 * (1.0 - 1e-9)).unwrap();
        let grid = log_grid(&band, 10_000).unwrap();
        let cell = grid[1] / grid[0];
        let argmax = |f: &dyn Fn(f64) -> f64| {
            grid.iter()
                .copied()
                .fold((grid[0], f(grid[0])), |best, w| {
                    let v = f(w);
                    if v > best.1 {
                        (w, v)
                    } else {
                        best
                    }
                })
                .0
        };
        let g = argmax(&|w1| NormalizedBand::new(w1, w2, 1.0).unwrap().r_diffusion());
        let h = argmax(&|w1| NormalizedBand::new(w1, w2, 1.0).unwrap().r_reception());
        let near = |a: f64, b: f64| (a / b).max(b / a) <= cell;
        pass &= near(g, g_star) && near(h, h_star);
        detail.push(format!(
            "w2'={w2}: R_G at {g:.5} (expect {g_star:.5}), R_H at {h:.5} (expect {h_star:.5})"
        ));
    }
    gate(8, "delay distortion maxima", pass, detail.join("; "));
}

#[test]
fn fdm_matches_diffusion_response() {
    let ch = DiffusionChannel::new(MU, 14.0).unwrap();
    let rs = reception();
    let mut pass = true;
    let mut detail = Vec::new();
    for (omega, dx, steps_per_period, periods) in [
        (5e-4, 0.5, 1000.0, 6.0),
        (1.4e-2, 0.25, 400.0, 10.0),
        (0.4, 0.2, 400.0, 20.0),
    ] {
        let period = 2.0 * PI / omega;
        let dt = period / steps_per_period;
        let cfg = FdmConfig {
            dx,
            dt,
            domain_length: None,
            duration: periods * period,
            output_interval: dt,
        };
        let input = InputSignal::Sine {
            amplitude: 1.0,
            omega,
        };
        let trace = simulate_fdm(&ch, &rs, &input, &cfg).unwrap();
        let tail = trace.window((periods - 2.0) * period, periods * period + dt);
        let (amp, phase, _) = fit_sinusoid(&tail.times, &tail.received, omega);
        let expected = ch.response(omega).unwrap();
        let amp_err = amp / expected.magnitude - 1.0;
        let phase_err = (phase - expected.phase + PI).rem_euclid(2.0 * PI) - PI;
        pass &= amp_err.abs() < 0.01 && phase_err.abs() < 0.02;
        detail.push(format!(
            "w={omega:.1e}: |G| {amp_err:+.1e} rel, phase {phase_err:+.1e} rad"
        ));
    }
    gate(
        9,
        "FDM matches diffusion frequency response",
        pass,
        detail.join("; "),
    );
}

#[test]
fn fourier_and_fdm_routes_agree() {
    let ch = DiffusionChannel::new(MU, 14.0).unwrap();
    let rs = reception();
    let sq = SquareWaveInput::new(AMPLITUDE, analysis_band().omega1()).unwrap();
    let period = sq.period();
    let dt = period / (period / 2.0).round();
    let cfg = FdmConfig {
        dx: 0.5,
        dt,
        domain_length: None,
        duration: 3.0 * period,
        output_interval: 4.0 * dt,
    };
    let fdm = simulate_fdm(&ch, &rs, &InputSignal::Square(sq), &cfg).unwrap();
    let last = fdm.window(2.0 * period - 1e-6, 3.0 * period - 1e-6);
    let grid = TimeGrid::new(last.times[0] - 2.0 * period, 4.0 * dt, last.len()).unwrap();
    let fourier = synthesize_fourier(
        &ch,
        &rs,
        &sq,
        sq.harmonics_below(analysis_band().omega2()),
        &grid,
    )
    .unwrap();
    let err = relative_l2(&last.complex_conc, &fourier.complex_conc);
    gate(
        10,
        "Fourier and FDM routes agree",
        err < 0.02,
        format!("steady-period relative L2 of c = {err:.3e}"),
    );
}

#[test]
fn square_wave_distortion_and_activation() {
    // Input amplitude 0.1 uM: H has unit DC gain here, so the plateau is 0.1 uM.
    let rs = reception();
    let sq = SquareWaveInput::new(AMPLITUDE, analysis_band().omega1()).unwrap();
    let n = sq.harmonics_below(analysis_band().omega2());
    let grid = TimeGrid::over(0.0, sq.period(), 20_000).unwrap();
    let run = |x_r: f64| {
        synthesize_fourier(&DiffusionChannel::new(MU, x_r).unwrap(), &rs, &sq, n, &grid).unwrap()
    };
    let plateau = AMPLITUDE * rs.dc_gain();
    let pulse = sq.pulse_window(0);

    let ideal = run(0.0);
    let near = run(14.0);
    let far = run(100.0);
    let gap =
        |tr: &SimulationTrace| timedomain::max_abs_diff(&tr.complex_conc, &ideal.complex_conc);
    let (gap_near, gap_far) = (gap(&near), gap(&far));
    let rise = |tr: &SimulationTrace| rise_time(tr, Signal::Complex, 0.5, pulse).unwrap().unwrap();
    let (rise_near, rise_far) = (rise(&near), rise(&far));

    let duration = |tr: &SimulationTrace, s: Signal| {
        activation_time_of(tr, s, THRESHOLD, 0)
            .unwrap()
            .active_duration
            .unwrap_or(0.0)
    };
    let t_v = duration(&ideal, Signal::Input);
    let t_a100 = duration(&far, Signal::Complex);
    let t_a19 = duration(&run(19.0), Signal::Complex);
    let t_a14 = duration(&near, Signal::Complex);

    let pass = gap_near < 0.1 * plateau
        && gap_far > gap_near
        && rise_far > rise_near
        && within_rel(t_v, 6.5e3, 0.10)
        && within_rel(t_a100, 4.1e3, 0.10);
    gate(
        11,
        "square-wave distortion and activation",
        pass,
        format!(
            "gap x=14 {:.1}% of plateau, x=100 {:.1}%; 50% rise {rise_near:.0} s vs {rise_far:.0} s; \
             T_v {t_v:.0} s, T_a(100) {t_a100:.0} s (T_a(14) {t_a14:.0} s, T_a(19) {t_a19:.0} s)",
            100.0 * gap_near / plateau,
            100.0 * gap_far / plateau,
        ),
    );
}
