use diffchan::distortion::log_grid;
use diffchan::timedomain::{
    activation_time_of, max_abs_diff, resolve, rise_time, run, FdmSettings, Signal,
};
use diffchan::*;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::output::{Document, OutputDir};
use crate::scenario::Scenario;

pub const DEFAULT_CURVE_POINTS: usize = 200;

/// Attenuation at which the reception cutoff is reported.
const CUTOFF_ATTENUATION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum RouteChoice {
    #[default]
    Fourier,
    Fdm,
    Both,
}

impl RouteChoice {
    fn routes(self) -> &'static [Route] {
        match self {
            RouteChoice::Fourier => &[Route::Fourier],
            RouteChoice::Fdm => &[Route::Fdm],
            RouteChoice::Both => &[Route::Fourier, Route::Fdm],
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub route: RouteChoice,
    pub points: Option<usize>,
}

fn doc<'a, T: Serialize>(
    command: &'static str,
    scenario: &'a Scenario,
    body: T,
) -> Document<'a, T> {
    Document {
        version: diffchan::VERSION,
        command,
        scenario,
        body,
    }
}

fn points(requested: Option<usize>, default: usize) -> Result<usize> {
    match requested.unwrap_or(default) {
        n if n >= 2 => Ok(n),
        n => Err(CliError::Config(format!("--points must be >= 2 (got {n})"))),
    }
}

#[derive(Debug, Serialize)]
struct AnalyzeBody {
    report: DistortionReport,
    normalized: NormalizedBand,
    curve_points: usize,
}

pub fn analyze(s: &Scenario, opts: &RunOptions, out: &mut OutputDir) -> Result<()> {
    let (ch, rs, band) = (s.channel()?, s.reception()?, s.band()?);
    let report = DistortionReport::new(&ch, &rs, &band);
    report.validate()?;
    let n = points(opts.points, DEFAULT_CURVE_POINTS)?;

    let m = Cascade::new(ch, rs);
    let rows = log_grid(&band, n)?
        .into_iter()
        .map(|w| {
            Ok(vec![
                Some(w),
                Some(ch.gain_db(w)?),
                Some(ch.phase_delay(w)?),
                Some(rs.gain_db(w)?),
                Some(rs.phase_delay(w)?),
                Some(m.gain_db(w)?),
                Some(m.phase_delay(w)?),
            ])
        })
        .collect::<diffchan::Result<Vec<_>>>()?;
    let header = [
        "omega[rad/s]",
        "G_gain[dB]",
        "G_phase_delay[s]",
        "H_gain[dB]",
        "H_phase_delay[s]",
        "GH_gain[dB]",
        "GH_phase_delay[s]",
    ]
    .map(String::from);
    out.table("curves.csv", &header, &rows)?;

    let body = AnalyzeBody {
        report,
        normalized: normalize(&ch, &rs, &band),
        curve_points: n,
    };
    out.json("report.json", &doc("analyze", s, body))
}

#[derive(Debug, Serialize)]
struct DesignBody {
    spec: DesignSpec,
    result: DesignResult,
    /// The scenario's own distance, checked against the bound.
    x_r: f64,
    x_r_within_bound: Option<bool>,
    reception_cutoff: Option<CutoffSummary>,
}

#[derive(Debug, Serialize)]
struct CutoffSummary {
    attenuation: f64,
    omega: f64,
}

pub fn design(s: &Scenario, out: &mut OutputDir) -> Result<()> {
    let (rs, band, ch) = (s.reception()?, s.band()?, s.channel()?);
    let (q_budget, r_budget) = s.thresholds()?.budgets()?;
    let q0 = q_budget.apply(q_reception(&rs, &band));
    let r0 = r_budget.apply(r_reception(&rs, &band));
    let spec = DesignSpec::new(q0, r0, band, rs, ch.mu())?;
    let result = distance_bound(&spec);
    let x_r = ch.x_r();
    let cutoff = reception_cutoff(&rs, CUTOFF_ATTENUATION)
        .ok()
        .map(|omega| CutoffSummary {
            attenuation: CUTOFF_ATTENUATION,
            omega,
        });
    let body = DesignBody {
        spec,
        result,
        x_r,
        x_r_within_bound: result.x_r_limit.map(|limit| x_r < limit),
        reception_cutoff: cutoff,
    };
    out.json("design.json", &doc("design", s, body))
}

#[derive(Debug, Serialize)]
struct SweepBody {
    lambda: f64,
    points: usize,
    axis: Vec<f64>,
    files: [&'static str; 4],
}

const SWEEP_FILES: [&str; 4] = ["q_g.csv", "r_g.csv", "q_h.csv", "r_h.csv"];

pub fn sweep(s: &Scenario, opts: &RunOptions, out: &mut OutputDir) -> Result<()> {
    let sw = s.sweep()?;
    let n = points(opts.points, sw.points)?;
    let axis = sw.axis(n);

    // rows[i][k][j]: index k at (ω'₁ = axis[i], ω'₂ = axis[j]).
    let rows = axis
        .par_iter()
        .map(|&w1| {
            let mut cells: [Vec<Option<f64>>; 4] = Default::default();
            for c in cells.iter_mut() {
                c.push(Some(w1));
            }
            for &w2 in &axis {
                let values = if w1 < w2 {
                    let nb = NormalizedBand::new(w1, w2, sw.lambda)?;
                    [
                        nb.q_diffusion(),
                        nb.r_diffusion(),
                        nb.q_reception(),
                        nb.r_reception(),
                    ]
                    .map(Some)
                } else {
                    [None; 4]
                };
                for (c, v) in cells.iter_mut().zip(values) {
                    c.push(v);
                }
            }
            Ok(cells)
        })
        .collect::<diffchan::Result<Vec<_>>>()?;

    let mut header = vec!["omega1p\\omega2p".to_string()];
    header.extend(axis.iter().map(|&w| diffchan::timedomain::format_sig9(w)));
    for (k, name) in SWEEP_FILES.iter().enumerate() {
        let matrix: Vec<Vec<Option<f64>>> = rows.iter().map(|r| r[k].clone()).collect();
        out.table(name, &header, &matrix)?;
    }
    let body = SweepBody {
        lambda: sw.lambda,
        points: n,
        axis,
        files: SWEEP_FILES,
    };
    out.json("sweep.json", &doc("sweep", s, body))
}

#[derive(Debug, Serialize)]
struct RunSummary {
    label: &'static str,
    route: Route,
    x_r: f64,
    file: String,
    pulse_index: usize,
    /// Timing of the emitted square wave itself.
    desired: ActivationTiming,
    /// Timing of the receptor complex.
    actual: ActivationTiming,
    /// Time from pulse onset to half the pulse's peak complex concentration (s).
    rise_50: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fdm: Option<FdmSettings>,
}

#[derive(Debug, Serialize)]
struct RouteGap {
    route: Route,
    /// Largest `|c_channel - c_reception|` over the measured period (µM).
    max_abs_gap: f64,
}

#[derive(Debug, Serialize)]
struct SimulateBody {
    input: SquareWaveInput,
    threshold: f64,
    harmonics: Option<usize>,
    runs: Vec<RunSummary>,
    gaps: Vec<RouteGap>,
}

pub fn simulate(s: &Scenario, opts: &RunOptions, out: &mut OutputDir) -> Result<()> {
    let (ch, rs, band, sim) = (s.channel()?, s.reception()?, s.band()?, s.simulation()?);
    let sq = sim.square_wave(band.omega1())?;
    let input = InputSignal::Square(sq);
    let period = sq.period();
    let cases = [("reception", ch.with_distance(0.0)?), ("channel", ch)];
    let routes = opts.route.routes();

    let harmonics = sim
        .harmonics
        .unwrap_or_else(|| sq.harmonics_below(band.omega2()));
    if routes.contains(&Route::Fourier) && harmonics == 0 {
        return Err(CliError::Config(format!(
            "band upper edge {} rad/s is below the fundamental; no harmonics to synthesize",
            band.omega2()
        )));
    }

    // Resolve every solver grid before any run starts.
    let dt = period / sim.fdm.steps_per_period as f64;
    let fdm_cfg = FdmConfig {
        dx: sim.fdm.dx,
        dt,
        domain_length: sim.fdm.domain_length,
        duration: sim.fdm.periods as f64 * period,
        output_interval: sim.fdm.output_stride as f64 * dt,
    };
    let fdm_settings = if routes.contains(&Route::Fdm) {
        Some(
            cases
                .map(|(_, c)| resolve(&c, &input, &fdm_cfg))
                .into_iter()
                .collect::<diffchan::Result<Vec<_>>>()?,
        )
    } else {
        None
    };

    let mut summaries = Vec::new();
    let mut gaps = Vec::new();
    for &route in routes {
        let traces: Vec<SimulationTrace> = match route {
            Route::Fourier => {
                let grid = TimeGrid::over(
                    0.0,
                    sim.periods as f64 * period,
                    sim.periods * sim.samples_per_period,
                )?;
                cases
                    .par_iter()
                    .map(|(_, c)| synthesize_fourier(c, &rs, &sq, harmonics, &grid))
                    .collect::<diffchan::Result<_>>()?
            }
            Route::Fdm => {
                let settings = fdm_settings.as_ref().expect("resolved above");
                settings.par_iter().map(|st| run(&rs, &input, st)).collect()
            }
        };
        let pulse_index = match route {
            Route::Fourier => 0,
            Route::Fdm => sim.fdm.periods - 1,
        };
        let pulse = sq.pulse_window(pulse_index);
        let (t0, t1) = (
            pulse_index as f64 * period,
            (pulse_index + 1) as f64 * period,
        );
        let measured: Vec<SimulationTrace> = traces
            .iter()
            .map(|t| t.window(t0 - 1e-9 * period, t1 - 1e-9 * period))
            .collect();
        gaps.push(RouteGap {
            route,
            max_abs_gap: max_abs_diff(&measured[1].complex_conc, &measured[0].complex_conc),
        });

        for (i, ((label, c), trace)) in cases.iter().zip(&traces).enumerate() {
            let file = format!("{label}_{}.csv", route_name(route));
            out.trace(&file, trace)?;
            summaries.push(RunSummary {
                label,
                route,
                x_r: c.x_r(),
                file,
                pulse_index,
                desired: activation_time_of(trace, Signal::Input, sim.threshold, pulse_index)?,
                actual: activation_time_of(trace, Signal::Complex, sim.threshold, pulse_index)?,
                rise_50: rise_time(trace, Signal::Complex, 0.5, pulse)?.map(|t| t - pulse.0),
                fdm: fdm_settings
                    .as_ref()
                    .filter(|_| route == Route::Fdm)
                    .map(|s| s[i]),
            });
        }
    }

    let body = SimulateBody {
        input: sq,
        threshold: sim.threshold,
        harmonics: routes.contains(&Route::Fourier).then_some(harmonics),
        runs: summaries,
        gaps,
    };
    out.json("timings.json", &doc("simulate", s, body))
}

fn route_name(route: Route) -> &'static str {
    match route {
        Route::Fourier => "fourier",
        Route::Fdm => "fdm",
    }
}

#[derive(Debug, Serialize)]
struct TableRow {
    species: String,
    band: Option<FrequencyBand>,
    saturated: bool,
    status: &'static str,
}

#[derive(Debug, Serialize)]
struct TableBody {
    rows: Vec<TableRow>,
}

pub fn table(s: &Scenario, out: &mut OutputDir) -> Result<()> {
    let rs = s.reception()?;
    if s.species.is_empty() {
        return Err(CliError::Config("no [[species]] rows".into()));
    }
    let rows = s
        .species
        .par_iter()
        .map(|sp| {
            let Some(x_r) = sp.x_r else {
                return Ok(TableRow {
                    species: sp.name.clone(),
                    band: None,
                    saturated: false,
                    status: "no-distance",
                });
            };
            match highest_clean_band(sp.mu, x_r, &rs, &sp.options()) {
                Ok(found) => Ok(TableRow {
                    species: sp.name.clone(),
                    band: Some(found.band),
                    saturated: found.saturated,
                    status: if found.saturated { "saturated" } else { "ok" },
                }),
                Err(diffchan::Error::NoCleanBand { .. }) => Ok(TableRow {
                    species: sp.name.clone(),
                    band: None,
                    saturated: false,
                    status: "no-clean-band",
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<diffchan::Result<Vec<_>>>()?;

    let fmt = diffchan::timedomain::format_sig9;
    let opt = |v: Option<f64>| v.map(fmt).unwrap_or_default();
    let records: Vec<Vec<String>> = s
        .species
        .iter()
        .zip(&rows)
        .map(|(sp, row)| {
            vec![
                sp.name.clone(),
                fmt(sp.mu),
                opt(sp.x_r),
                fmt(sp.decade_width),
                fmt(sp.q_frac),
                fmt(sp.r_frac),
                opt(row.band.map(|b| b.omega1())),
                opt(row.band.map(|b| b.omega2())),
                row.status.to_string(),
            ]
        })
        .collect();
    let header = [
        "species",
        "mu[um^2/s]",
        "x_r[um]",
        "decade_width",
        "q_frac",
        "r_frac",
        "omega1[rad/s]",
        "omega2[rad/s]",
        "status",
    ];
    out.records("table.csv", &header, &records)?;
    out.json("table.json", &doc("table", s, TableBody { rows }))
}
