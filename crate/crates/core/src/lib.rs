//! Density-evolution and error-floor analysis for variable-regular LDPC
//! codes on the binary-input AWGN channel.
//!
//! The crate is organized around the pipeline used in iterative-decoding
//! error-floor studies:
//!
//! * [`gauss_phi`] — the scalar φ function of Gaussian-approximated density
//!   evolution, its inverse, and closed-form sandwich bounds;
//! * [`de_engine`] — mean-LLR density evolution, trajectories, decoding
//!   thresholds;
//! * [`growth_bounds`] — closed-form lower bounds on LLR growth and the
//!   SNR/LLR threshold curves they induce;
//! * [`ldpc_codes`] — parity-check matrices, alist I/O, random regular
//!   construction, and the algebraic (2640, 1320) construction;
//! * [`trapping_set`] — elementary trapping-set topologies, their
//!   state-space matrices and spectral radii, and subgraph search;
//! * [`spa_decoder`] — an LLR-domain sum-product decoder with per-iteration
//!   message statistics and Monte-Carlo driver.

pub mod de_engine;
pub mod error;
pub mod gauss_phi;
pub mod growth_bounds;
pub mod ldpc_codes;
pub mod spa_decoder;
pub mod trapping_set;

pub use de_engine::{
    de_step, de_trajectory, de_trajectory_with_ceiling, decoding_threshold,
    decoding_threshold_with_budget, ChannelCondition, DETrajectory, EnsembleSpec,
};
pub use error::{Error, Result};
pub use gauss_phi::{phi, phi_bounds, phi_inv};
pub use growth_bounds::{
    growth_bound_params, growth_lower_bound_step, lemma1_unique_y, lemma2_lower_bound,
    required_mean_for_growth, snr_llr_threshold_curve, snr_threshold_breakout, BoundParams,
    CurvePoint, CurveSolve, GrowthQuery,
};
pub use ldpc_codes::{
    construct_margulis, format_alist, generate_regular, load_alist, parse_alist, save_alist,
    ParityCheckMatrix,
};
pub use spa_decoder::{
    awgn_llr_channel, monte_carlo_run, spa_decode, DecodeOutcome, DecoderConfig,
    IterationSummary, LLRIterationStats, MonteCarloReport,
};
pub use trapping_set::{
    build_state_space, find_elementary_trapping_sets, mean_to_std_ratio, simulate_state_space,
    spectral_radius, FoundTrappingSet, GainSchedule, SpectralMethod, SpectralRadius,
    StateSpaceModel, TrappingSetTopology, TsSearchConfig, TsSearchReport,
};
