//! Event-driven front tracking for the isothermal p-system in Lagrangian
//! coordinates, with the a-contraction weight and its budget checks.
// Comparisons are written as `!(x <= y)` on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod engine;
pub mod error;
pub mod front;
pub mod initial;
pub mod interactions;
pub mod io;
pub mod params;
pub mod policy;
pub mod riemann;
pub mod state;
pub mod weight;

pub use engine::{run, run_many, run_observed, EventObserver, InteractionEvent, RunOptions, RunRecord};
pub use error::{Error, Result};
pub use front::{Front, Snapshot, WaveLabel};
pub use initial::InitialData;
pub use interactions::{classify_pair, resolve_interaction, CaseCode, InteractionOutcome};
pub use params::{DataBox, SchemeParams, Tolerances};
pub use riemann::{solve_intermediate, Family, WaveDecomposition};
pub use state::{LogState, State};
pub use weight::{compute_budgets, BudgetConstants, WeightState};
