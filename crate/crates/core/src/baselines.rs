//! Reference schedulers the shifting scheme is compared against: classical
//! fixed-period assignment and single-level fixed-cadence shifting.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rps::{self, CorrectionRule, DEFAULT_GAMMA};
use crate::timebase::{SlotGrid, TrafficSpec};

/// Scheduling scheme label, also the CLI spelling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    Rps,
    Psps,
    Csps,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Rps, Scheme::Psps, Scheme::Csps];

    pub const fn name(self) -> &'static str {
        match self {
            Scheme::Rps => "rps",
            Scheme::Psps => "psps",
            Scheme::Csps => "csps",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown scheme {0:?}, expected one of: rps, psps, csps")]
pub struct ParseSchemeError(String);

impl FromStr for Scheme {
    type Err = ParseSchemeError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "rps" => Ok(Scheme::Rps),
            "psps" => Ok(Scheme::Psps),
            "csps" => Ok(Scheme::Csps),
            other => Err(ParseSchemeError(other.to_string())),
        }
    }
}

/// A strictly increasing sequence of assignment slot indices produced by one
/// scheme.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentStream {
    slots: Vec<i64>,
    scheme: Scheme,
}

impl AssignmentStream {
    pub fn new(slots: Vec<i64>, scheme: Scheme) -> Result<Self> {
        let mut prev = 0; // first slot must be >= 1
        for &slot in &slots {
            if slot <= prev {
                return Err(Error::NonIncreasingAssignments(slot));
            }
            prev = slot;
        }
        Ok(AssignmentStream { slots, scheme })
    }

    pub fn slots(&self) -> &[i64] {
        &self.slots
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
}

/// Which fixed period the classical scheduler locks in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodRounding {
    /// Integer nearest `p_trff / wsch` (ties toward the smaller period).
    Nearest,
    /// Always the smaller period: assignments recur too fast and slots go to
    /// waste.
    Floor,
    /// Always the larger period: assignments recur too slowly and the delay
    /// grows without bound.
    Ceil,
}

/// Classical fixed-period scheduling: assignments at
/// `t0 + (k-1) * p_fix` with the nearest integer period.
pub fn csps_schedule(
    traffic: &TrafficSpec,
    grid: &SlotGrid,
    count: u64,
) -> Result<AssignmentStream> {
    csps_schedule_with_rounding(traffic, grid, count, PeriodRounding::Nearest)
}

/// Classical fixed-period scheduling with an explicit period choice, for
/// reproducing the over- and under-scheduled regimes.
pub fn csps_schedule_with_rounding(
    traffic: &TrafficSpec,
    grid: &SlotGrid,
    count: u64,
    rounding: PeriodRounding,
) -> Result<AssignmentStream> {
    traffic.validate_on(grid)?;
    let w = grid.slot_width().value();
    let p = traffic.period().value();
    let p_fix = match rounding {
        PeriodRounding::Nearest => rps::derive_root(traffic.period(), grid)?.period,
        PeriodRounding::Floor => p / w,
        PeriodRounding::Ceil => p / w + i64::from(p % w != 0),
    };
    let t0 = rps::derive_t0(traffic, grid)?;
    let slots = (0..count as i64).map(|k| t0 + k * p_fix).collect();
    AssignmentStream::new(slots, Scheme::Csps)
}

/// Fixed-value periodic shifting: the full derivation truncated at one
/// alignment level, i.e. the best single shift cadence. With zero or one
/// alignment level this coincides with the full scheme; with more, the
/// uncancelled second-level gradient accumulates.
pub fn psps_schedule(
    traffic: &TrafficSpec,
    grid: &SlotGrid,
    count: u64,
) -> Result<AssignmentStream> {
    let (levels, _) = rps::derive_levels(traffic, grid, DEFAULT_GAMMA, Some(1))?;
    let slots = (1..=count as i64)
        .map(|m| rps::slot_for(m, &levels, CorrectionRule::PerLevel))
        .collect();
    AssignmentStream::new(slots, Scheme::Psps)
}
