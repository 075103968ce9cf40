//! Four-photon polarization entanglement from a pulsed down-conversion
//! source, its coincidence statistics, and a four-party communication
//! complexity protocol that uses it.
//!
//! The crate is organised bottom-up:
//!
//! * [`exact`]: exact arithmetic in ℚ(√2)(i).
//! * [`fock`]: creation-operator polynomials, beam splitters and the
//!   post-selected four-photon state.
//! * [`state`]: dense qubit states, local unitaries, Born-rule
//!   distributions and the white-noise family.
//! * [`polarimetry`]: analyzers, the correlation function, fringe scans,
//!   sinusoid fits and simulated counts.
//! * [`qccs`]: the protocol, its baselines and the classical search.
//! * [`io`]: CSV/JSON output and run manifests.

pub mod cli;
pub mod error;
pub mod exact;
pub mod fock;
pub mod io;
pub mod mode;
pub mod polarimetry;
pub mod qccs;
pub mod state;

pub use error::{Error, Result};
pub use fock::{
    apply_beam_splitters, four_photon_state, ghz_epr_decompose, postselect_one_per_mode,
    spdc_second_order, GhzEprDecomposition, OperatorPolynomial, PostSelected,
};
pub use mode::{Mode, ModeLabel, Polarization};
pub use polarimetry::{
    correlation, correlation_scan, fit_sinusoid, fringe_scan_linear, sample_counts,
    AnalyzerSetting, CountSample, FitResult, FringeCurve, Phases,
};
pub use qccs::{
    average_success, average_success_exact, classical_optimal_success, quantum_success_probability,
    table_one, two_epr_exact, two_epr_state, CaseReport, ClassicalBound, LowBits, QccsInputs,
    Scoring,
};
pub use state::{
    apply_locals, mix_with_white_noise, rotation_rx, rotation_ry, ExactState, LocalUnitary,
    Measurable, MeasurementBasis, NoisyState, OutcomeDistribution, PureState,
};
