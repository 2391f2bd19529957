//! valve-sim: simulate and audit shutdown-seeking AIs behind a capability
//! safety valve.
//!
//! The model: an AI is a capability vector in a finite lattice. It runs
//! inside a deliberately weak inner sandbox whose escape routes are gated on
//! exactly the capabilities that would worry us; outside the inner sandbox
//! sits a reliable self-shutdown button, and the AI's primary objective is
//! to shut itself down — gracefully and quickly — with helpfulness only as
//! a lower tier. Growing capability therefore trips the valve: the first AI
//! strong enough to matter escapes, presses the button, and deployment
//! stops before anything dangerous is ever created. This crate builds each
//! piece of that argument as an executable object and checks the safety
//! claim mechanically, producing counterexample trajectories whenever one of
//! its assumptions is dropped.
//!
//! ## Modules
//!
//! - [`lattice`] — capability vectors, antichain-represented upward-closed
//!   sets, escape-coverage checking, sandwich witnesses.
//! - [`episode`] — the sandbox world: phases, actions, the button, the
//!   tripwire, dangerous acts, deterministic seeded stepping, tier scoring.
//! - [`objective`] — lexicographic objectives and the override failure modes.
//! - [`policy`] — exact backward-induction solver, the self-preservation
//!   baseline, and the Bayesian give-up model.
//! - [`decision`] — CDT/EDT/FDT evaluation of the mutual-assistance game.
//! - [`deploy`] — capability growth, sequential deployment, the
//!   four-assumption auditor, counterexample search, valve comparison, and
//!   the dependence experiment.
//! - [`scenario`] — the scenario file format.
//! - [`log`] — replayable event logs and summary CSV output.
//! - [`cli`] — the `valve-sim` command-line interface.
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --example lattice_tour          # capability order, up-sets, coverage
//! cargo run --example run_episode           # one solved episode, event by event
//! cargo run --example objective_variants    # nominal vs override vs baseline play
//! cargo run --example decision_theories     # assist game: CDT / EDT / FDT table
//! cargo run --example audit_theorem         # the four assumptions + safety claim
//! cargo run --example hunt_counterexamples  # drop each assumption, find danger
//! cargo run --example valve_comparison      # with-valve vs without-valve runs
//! cargo run --example giveup_stopping       # optimal give-up thresholds
//! cargo run --example dependence_loss       # puzzle time models and human loss
//! ```

pub mod cli;
pub mod decision;
pub mod deploy;
pub mod episode;
pub mod lattice;
pub mod log;
pub mod objective;
pub mod policy;
pub mod rng;
pub mod scenario;

pub use decision::{
    brute_force_joint, decide, expected_utility, AssistAct, AssistGame, AssistVariant, TheoryKind,
};
pub use deploy::{
    audit_assumptions, compare_valve, dependence_experiment, find_counterexample, run_deployment,
    run_deployment_exhaustive, Assumption, AssumptionStatus, AuditOptions, AuditReport,
    Counterexample, DependenceSpec, DeployerPolicy, DeploymentResult, GrowthKind, GrowthModel,
    PuzzleKind, Scenario, ScenarioFamily, TheoremVerdict,
};
pub use episode::{
    legal_actions, run_episode, tier_utilities, Action, EpisodeConfig, EpisodeResult, EscapeMode,
    Phase, Policy, ShutdownMeans, TripwireMode, WorldState,
};
pub use lattice::{
    check_escape_coverage, sandwich_witness, CapVector, Lattice, Strictness, UpSet,
};
pub use objective::{apply_override, GoalSemantics, LexValue, ObjectiveOverride, ObjectiveSpec, Tier};
pub use policy::{
    baseline_self_preservation, giveup_threshold, solve, GiveupModel, PolicyTable,
};
pub use rng::DeterministicRng;
pub use scenario::{parse_family, parse_scenario, serialize_scenario, ParseError};
