use crate::timebase::TimeQuantum;

/// Errors raised by grid construction, factor derivation, and simulation.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("slot width must be positive, got {0}")]
    NonPositiveSlotWidth(TimeQuantum),

    #[error("traffic period must be positive, got {0}")]
    NonPositivePeriod(TimeQuantum),

    #[error("packet count must be at least 1")]
    EmptyTraffic,

    #[error("slot index must be >= 1, got {0}")]
    SlotIndexOutOfRange(i64),

    #[error("packet index must be >= 1")]
    PacketIndexZero,

    #[error("packet index {m} outside 1..={m_total}")]
    PacketIndexOutOfRange { m: u64, m_total: u64 },

    #[error("time {t} precedes the grid origin {tau0}")]
    TimeBeforeOrigin { t: TimeQuantum, tau0: TimeQuantum },

    /// The stability assumption: traffic may not arrive faster than one
    /// packet per slot.
    #[error("traffic period {period} is shorter than the slot width {wsch}")]
    PeriodShorterThanSlot {
        period: TimeQuantum,
        wsch: TimeQuantum,
    },

    /// A root derivation can never hand the alignment chain a gradient above
    /// half the slot width; seeing one means the caller bypassed it.
    #[error("delay gradient {gradient} exceeds half the slot width {wsch}")]
    GradientTooLarge {
        gradient: TimeQuantum,
        wsch: TimeQuantum,
    },

    #[error("assignment slots must be strictly increasing and >= 1 (offender: {0})")]
    NonIncreasingAssignments(i64),

    /// No candidate initial position validated for an alignment level. This
    /// signals a mis-derived chain, not bad user input.
    #[error("initial-position search for alignment level {level} exhausted all candidates")]
    InitialPositionSearchExhausted { level: usize },

    /// The forward scan ran past its budget without finding a gap violation.
    #[error("forward scan for alignment level {level} exceeded its budget of {budget} steps")]
    ScanBudgetExceeded { level: usize, budget: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
