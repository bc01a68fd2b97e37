//! Simultaneous wireless information and power transfer with a diplexer
//! receiver: the single-antenna receiver chain that splits mixer outputs
//! into decoding and harvesting paths, and multiuser downlink beamforming
//! that minimizes transmit power under per-user SINR and harvested-power
//! constraints via semidefinite relaxation.

pub mod beamform;
pub mod experiment;
pub mod hermitian;
pub mod link;
pub mod miso;
mod random;
pub mod sdp;
pub mod units;

pub use beamform::{
    build_relaxation, optimize, recover, solve_relaxed, to_lmi_form, OptimizeError,
    OptimizeOptions, RecoveredSolution, RecoveryMethod, RelaxedProblem,
};
pub use experiment::{
    generate_channels, run_sweep, sweep_csv, sweep_json, ExperimentConfig, ExperimentError,
    ResultRow, SweepParameter, SweepSpec,
};
pub use hermitian::HermitianMatrix;
pub use link::{
    assemble_paths, diplex, mix, receiver_report, run_receiver_chain, simulate_receiver,
    synthesize_received, synthesize_received_with_truth, BasebandMessage, LinkConfig, LinkError,
    ReceiverChain, ReceiverReport, WaveformTrace,
};
pub use miso::{
    feasibility_test, harvested, received_sample, sinr, BeamformerSet, FeasibilityReport,
    MisoChannel, UserThresholds,
};
pub use sdp::{SdpConstraint, SdpProblem, SdpSolution, SolveOptions, SolveStatus};
