//! Two-photon linear-optics simulation of symmetric phase-covariant 1->2
//! qubit cloners.
//!
//! * [`fock`]: dense two-photon Fock space over 8 modes (port x rail x temporal bin)
//! * [`cloner`]: the special beam splitter, Mach-Zehnder, hybrid and fiber cloners
//! * [`noise`]: photon distinguishability and interferometer phase drift
//! * [`counting`]: seeded coincidence-count simulation and detector balancing
//! * [`optimize`]: design conditions and numeric symmetrization
//! * [`experiment`]: JSON configs and CSV/JSON tables used by `pcclone`
//!
//! ```
//! use phasecov::{ClonerParams, Qubit, SpecialBsParams};
//!
//! let model = ClonerParams::SpecialBs(SpecialBsParams::ideal());
//! let report = model.run(&Qubit::equatorial(0.3)).unwrap();
//! assert!((report.f1 - 0.8535533906).abs() < 1e-9);
//! assert!((report.p_succ - 1.0 / 3.0).abs() < 1e-12);
//! ```

pub mod cloner;
pub mod counting;
pub mod error;
pub mod experiment;
pub mod fock;
pub mod noise;
pub mod optimize;
pub mod qubit;

pub use cloner::{
    ideal_pc_map, ideal_pc_report, mz_splitting, run_fiber, run_hybrid, run_mach_zehnder,
    run_special_bs, theoretical_limits, CloneReport, ClonerParams, Coupler, FiberParams,
    GlassPlate, Hemisphere, HybridParams, Knob, MachZehnderParams, RailAmplitudes,
    SpecialBsParams,
};
pub use counting::{
    balance_detectors, fidelity_from_counts, outcome_distribution, simulate_counts,
    success_probability_estimate, BalanceMethod, CoincidenceRecord, CountingSetup, DetectorBank,
};
pub use error::{Error, Result};
pub use fock::{Mode, Photon, Port, Rail, StateVector, TemporalBin};
pub use noise::{
    evaluate_with_noise, hom_coincidence_probability, hom_visibility, sample_phase_jitter,
    with_distinguishability, NoiseConfig,
};
pub use optimize::{
    optimize_symmetry, solve_hybrid_compensation, solve_ideal_reflectance, FreeParameter,
    Objective,
};
pub use qubit::{fidelity, DensityMatrix, JointState, Qubit};
