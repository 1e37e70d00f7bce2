//! Single-photon linear-optics engine with transactional bookkeeping.
//!
//! An apparatus is a directed port-graph of optical elements
//! ([`OpticalNetwork`]). A unit-norm offer wave propagates from the source
//! to every absorbing port with exact polarization-resolved interference
//! ([`propagate_offer`]); each sink answers with a confirmation wave
//! propagated backward through transposed scattering descriptions
//! ([`propagate_confirmation`]), arriving at the source with the echo
//! strength |psi|^2 that weights transaction selection
//! ([`select_transaction`], [`monte_carlo`]). Apparatus builders and the
//! closed-form efficiency analytics live in [`scenarios`]; the textual
//! network format lives in [`dsl`].
//!
//! The crate is `no_std` + `alloc`; the `std` feature adds
//! `std::error::Error` for [`Error`].

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod amplitude;
pub mod dsl;
pub mod element;
pub mod error;
pub mod netgen;
pub mod network;
pub mod path;
pub mod report;
pub mod scenarios;
pub mod transaction;
pub mod wave;

pub use amplitude::{Amplitude, Jones, PolAxis, PolarizedAmplitude};
pub use dsl::{
    parse, parse_named, serialize, to_network, ParseError, ParseErrorCode, ScenarioSource,
};
pub use element::{scattering_matrix, ElementKind, PortName, Scattering, Traversal};
pub use error::Error;
pub use netgen::random_network;
pub use network::{ElementId, Link, OpticalNetwork, PortRef, Violation};
pub use path::{render_dirac, PathRecord, PathStep, StepAction, WaveDirection};
pub use scenarios::{
    build_ev, build_zeno, sweep_csv, zeno_analytics, zeno_engine_vs_analytic, ZenoAnalytics,
    ZenoComparison,
};
pub use transaction::{
    echo_report, monte_carlo, repeated_ev, rng_from_seed, select_transaction, tally_csv,
    EchoReport, RepeatedEvOutcome, TrialRng, TrialTally,
};
pub use wave::{
    probe_report, propagate_confirmation, propagate_confirmation_with, propagate_offer,
    propagate_offer_with, run_handshake, AbortedComponent, AbsorberSide, Arrival,
    ConfirmationResult, EngineConfig, Handshake, ObjectProbe, OfferResult, ProbeReport,
};
