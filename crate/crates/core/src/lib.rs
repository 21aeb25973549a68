//! Deterministic scheduling of periodic traffic on a fixed slot grid.
//!
//! When a traffic period is not an exact multiple of the slot width, a fixed
//! assignment period either wastes slots or lets the waiting delay grow
//! without bound. This crate derives a recursive shifting policy that keeps
//! every assignment inside the slot right after its packet's arrival, for any
//! integer period:
//!
//! * [`timebase`] — exact integer arithmetic for the slot grid and traffic,
//!   plus the greedy reference rule everything is checked against.
//! * [`rps`] — derivation of the scheduling-factor tuple and closed-form
//!   evaluation of assignment slot indices.
//! * [`baselines`] — the fixed-period and single-shift reference schedulers.
//! * [`simulator`] — packet/slot matching with queueing, waste, and drop
//!   accounting.

pub mod baselines;
mod error;
pub mod rps;
pub mod simulator;
pub mod timebase;

pub use baselines::{AssignmentStream, PeriodRounding, Scheme};
pub use error::{Error, Result};
pub use rps::{
    derive_factors, expand_reference_schedule, CorrectionRule, DelayGap, Direction, FactorTuple,
    FactorVector, DEFAULT_GAMMA,
};
pub use simulator::{PacketRecord, PacketStatus, SimStats, SimTrace};
pub use timebase::{SlotGrid, TimeQuantum, TrafficSpec};
