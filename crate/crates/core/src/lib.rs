//! Frequency-response analysis of diffusion-based molecular communication channels.
//!
//! A transmitter at `x = 0` emits signalling molecules that diffuse along a
//! half-line to a receiver at `x_r`, where they bind receptors. The channel is
//! the cascade of a diffusion system `G(s)` and a first-order reception system
//! `H(s)`. The crate provides:
//!
//! * [`channel`]: gain, phase and phase delay of `G`, `H`, `GH` and the 3-D variant;
//! * [`distortion`]: amplitude (`Q`) and delay (`R`) distortion indices, by grid
//!   search and in closed form, plus the normalized `(λ, ω')` parameterisation;
//! * [`design`]: distance bounds under distortion budgets and the highest
//!   clean band for a given distance;
//! * [`timedomain`]: square-wave responses by Fourier synthesis and by a
//!   finite-difference PDE solver, with activation-time measurement.
//!
//! ```
//! use diffchan::{DiffusionChannel, DistortionReport, FrequencyBand, ReceptionSystem};
//!
//! let ch = DiffusionChannel::new(83.0, 14.0)?;
//! let rs = ReceptionSystem::new(1.0e-3, 4.0e-3, 4.0)?;
//! let band = FrequencyBand::new(5.0e-4, 0.4)?;
//! let report = DistortionReport::new(&ch, &rs, &band);
//! assert!((report.q_h - 39.9).abs() < 0.1);
//! # Ok::<(), diffchan::Error>(())
//! ```

pub mod channel;
pub mod design;
pub mod distortion;
mod error;
pub mod timedomain;

pub use channel::{
    cascade_response, diffusion3d_response, Cascade, ComplexResponse, Diffusion3d,
    DiffusionChannel, FrequencyBand, FrequencyResponse, ReceptionSystem,
};
pub use design::{
    distance_bound, highest_clean_band, reception_cutoff, BindingConstraint, CleanBand,
    CleanBandOptions, DesignResult, DesignSpec, ThresholdMode,
};
pub use distortion::{
    normalize, q_diffusion, q_index_grid, q_reception, r_diffusion, r_index_grid, r_maxima,
    r_reception, DistortionReport, NormalizedBand, DEFAULT_GRID_POINTS,
};
pub use error::{Error, Result};
pub use timedomain::{
    activation_time, simulate_fdm, synthesize_fourier, ActivationTiming, FdmConfig, InputSignal,
    Route, SimulationTrace, SquareWaveInput, TimeGrid,
};

/// Crate version, embedded in exported run metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
