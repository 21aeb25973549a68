//! Exact integer time arithmetic for the slot grid and the periodic traffic
//! it serves.
//!
//! Every duration in the system is an integer count of one base unit
//! (microseconds by convention, nanoseconds when a finer lattice is needed).
//! No floating-point time exists anywhere: the alignment recursion in
//! [`crate::rps`] only terminates exactly on an integer lattice.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// A signed count of the configured base time unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TimeQuantum(pub i64);

impl TimeQuantum {
    pub const ZERO: TimeQuantum = TimeQuantum(0);

    pub const fn new(value: i64) -> Self {
        TimeQuantum(value)
    }

    pub const fn value(self) -> i64 {
        self.0
    }

    pub const fn is_positive(self) -> bool {
        self.0 > 0
    }
}

impl fmt::Display for TimeQuantum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<i64> for TimeQuantum {
    fn from(value: i64) -> Self {
        TimeQuantum(value)
    }
}

impl Add for TimeQuantum {
    type Output = TimeQuantum;
    fn add(self, rhs: TimeQuantum) -> TimeQuantum {
        TimeQuantum(self.0 + rhs.0)
    }
}

impl AddAssign for TimeQuantum {
    fn add_assign(&mut self, rhs: TimeQuantum) {
        self.0 += rhs.0;
    }
}

impl Sub for TimeQuantum {
    type Output = TimeQuantum;
    fn sub(self, rhs: TimeQuantum) -> TimeQuantum {
        TimeQuantum(self.0 - rhs.0)
    }
}

impl SubAssign for TimeQuantum {
    fn sub_assign(&mut self, rhs: TimeQuantum) {
        self.0 -= rhs.0;
    }
}

impl Mul<i64> for TimeQuantum {
    type Output = TimeQuantum;
    fn mul(self, rhs: i64) -> TimeQuantum {
        TimeQuantum(self.0 * rhs)
    }
}

impl Neg for TimeQuantum {
    type Output = TimeQuantum;
    fn neg(self) -> TimeQuantum {
        TimeQuantum(-self.0)
    }
}

/// Ceiling division for a positive divisor, exact for any signed numerator.
pub(crate) fn ceil_div(num: i64, div: i64) -> i64 {
    debug_assert!(div > 0);
    let q = num.div_euclid(div);
    if num.rem_euclid(div) != 0 {
        q + 1
    } else {
        q
    }
}

/// The scheduling time axis: equally sized slots of width `wsch` starting at
/// origin `tau0`. Slot `i` (1-based) covers the half-open interval
/// `[tau0 + (i-1)*wsch, tau0 + i*wsch)`, so an arrival exactly on a boundary
/// belongs to the slot starting there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SlotGrid {
    tau0: TimeQuantum,
    wsch: TimeQuantum,
}

impl SlotGrid {
    pub fn new(tau0: TimeQuantum, wsch: TimeQuantum) -> Result<Self> {
        if !wsch.is_positive() {
            return Err(Error::NonPositiveSlotWidth(wsch));
        }
        Ok(SlotGrid { tau0, wsch })
    }

    pub const fn origin(&self) -> TimeQuantum {
        self.tau0
    }

    pub const fn slot_width(&self) -> TimeQuantum {
        self.wsch
    }

    /// Start time of slot `i`.
    pub fn slot_start(&self, i: i64) -> Result<TimeQuantum> {
        if i < 1 {
            return Err(Error::SlotIndexOutOfRange(i));
        }
        Ok(self.tau0 + self.wsch * (i - 1))
    }

    /// The smallest slot index whose start time is at or after `t`.
    ///
    /// This is the greedy ideal: serve each packet in the first slot that
    /// opens at or after its arrival. It doubles as the reference the
    /// closed-form index evaluation is checked against.
    pub fn first_slot_at_or_after(&self, t: TimeQuantum) -> Result<i64> {
        if t < self.tau0 {
            return Err(Error::TimeBeforeOrigin { t, tau0: self.tau0 });
        }
        Ok(ceil_div(t.value() - self.tau0.value(), self.wsch.value()) + 1)
    }
}

/// Fixed-cycle traffic: packet `m` (1-based) arrives at
/// `tau_trff + (m-1) * p_trff`, for `m` in `1..=m_total`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrafficSpec {
    tau_trff: TimeQuantum,
    p_trff: TimeQuantum,
    m_total: u64,
}

impl TrafficSpec {
    pub fn new(tau_trff: TimeQuantum, p_trff: TimeQuantum, m_total: u64) -> Result<Self> {
        if !p_trff.is_positive() {
            return Err(Error::NonPositivePeriod(p_trff));
        }
        if m_total == 0 {
            return Err(Error::EmptyTraffic);
        }
        Ok(TrafficSpec {
            tau_trff,
            p_trff,
            m_total,
        })
    }

    pub const fn start(&self) -> TimeQuantum {
        self.tau_trff
    }

    pub const fn period(&self) -> TimeQuantum {
        self.p_trff
    }

    pub const fn packet_count(&self) -> u64 {
        self.m_total
    }

    /// Arrival time of packet `m`.
    pub fn arrival_time(&self, m: u64) -> Result<TimeQuantum> {
        if m < 1 || m > self.m_total {
            return Err(Error::PacketIndexOutOfRange {
                m,
                m_total: self.m_total,
            });
        }
        Ok(self.tau_trff + self.p_trff * (m as i64 - 1))
    }

    /// Checks the pairing constraints against a grid: traffic must start at or
    /// after the grid origin and may not cycle faster than one slot width.
    pub fn validate_on(&self, grid: &SlotGrid) -> Result<()> {
        if self.tau_trff < grid.origin() {
            return Err(Error::TimeBeforeOrigin {
                t: self.tau_trff,
                tau0: grid.origin(),
            });
        }
        if self.p_trff < grid.slot_width() {
            return Err(Error::PeriodShorterThanSlot {
                period: self.p_trff,
                wsch: grid.slot_width(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(tau0: i64, wsch: i64) -> SlotGrid {
        SlotGrid::new(TimeQuantum(tau0), TimeQuantum(wsch)).unwrap()
    }

    #[test]
    fn slot_start_examples() {
        assert_eq!(grid(0, 71).slot_start(1).unwrap(), TimeQuantum(0));
        assert_eq!(grid(0, 71).slot_start(41).unwrap(), TimeQuantum(2840));
        assert_eq!(grid(100, 10).slot_start(3).unwrap(), TimeQuantum(120));
    }

    #[test]
    fn slot_start_rejects_nonpositive_index() {
        assert_eq!(
            grid(0, 71).slot_start(0),
            Err(Error::SlotIndexOutOfRange(0))
        );
        assert!(grid(0, 71).slot_start(-3).is_err());
    }

    #[test]
    fn arrival_time_examples() {
        let t = TrafficSpec::new(TimeQuantum(0), TimeQuantum(2800), 10).unwrap();
        assert_eq!(t.arrival_time(1).unwrap(), TimeQuantum(0));
        assert_eq!(t.arrival_time(3).unwrap(), TimeQuantum(5600));

        let t = TrafficSpec::new(TimeQuantum(95), TimeQuantum(150), 5).unwrap();
        assert_eq!(t.arrival_time(2).unwrap(), TimeQuantum(245));
    }

    #[test]
    fn arrival_time_rejects_out_of_range() {
        let t = TrafficSpec::new(TimeQuantum(0), TimeQuantum(2800), 3).unwrap();
        assert!(t.arrival_time(0).is_err());
        assert!(t.arrival_time(4).is_err());
    }

    #[test]
    fn first_slot_examples() {
        let g = grid(0, 71);
        assert_eq!(g.first_slot_at_or_after(TimeQuantum(0)).unwrap(), 1);
        assert_eq!(g.first_slot_at_or_after(TimeQuantum(2800)).unwrap(), 41);
        assert_eq!(g.first_slot_at_or_after(TimeQuantum(95)).unwrap(), 3);
    }

    #[test]
    fn first_slot_rejects_pre_origin_time() {
        let g = grid(100, 10);
        assert!(matches!(
            g.first_slot_at_or_after(TimeQuantum(99)),
            Err(Error::TimeBeforeOrigin { .. })
        ));
    }

    #[test]
    fn boundary_arrival_maps_to_its_own_slot() {
        let g = grid(0, 71);
        for i in 1..200 {
            let start = g.slot_start(i).unwrap();
            assert_eq!(g.first_slot_at_or_after(start).unwrap(), i);
        }
    }

    #[test]
    fn first_slot_starts_within_one_width_of_request() {
        let g = grid(7, 13);
        for t in 7..400 {
            let t = TimeQuantum(t);
            let i = g.first_slot_at_or_after(t).unwrap();
            let gap = g.slot_start(i).unwrap() - t;
            assert!(gap >= TimeQuantum::ZERO && gap < g.slot_width());
        }
    }

    #[test]
    fn grid_rejects_nonpositive_width() {
        assert!(SlotGrid::new(TimeQuantum(0), TimeQuantum(0)).is_err());
        assert!(SlotGrid::new(TimeQuantum(0), TimeQuantum(-5)).is_err());
    }

    #[test]
    fn validate_on_enforces_stability() {
        let g = grid(0, 71);
        let sub_slot = TrafficSpec::new(TimeQuantum(0), TimeQuantum(70), 1).unwrap();
        assert!(matches!(
            sub_slot.validate_on(&g),
            Err(Error::PeriodShorterThanSlot { .. })
        ));
        let ok = TrafficSpec::new(TimeQuantum(0), TimeQuantum(71), 1).unwrap();
        assert!(ok.validate_on(&g).is_ok());
    }

    #[test]
    fn ceil_div_is_exact() {
        assert_eq!(ceil_div(0, 71), 0);
        assert_eq!(ceil_div(1, 71), 1);
        assert_eq!(ceil_div(71, 71), 1);
        assert_eq!(ceil_div(72, 71), 2);
        assert_eq!(ceil_div(-1, 71), 0);
        assert_eq!(ceil_div(-71, 71), -1);
        assert_eq!(ceil_div(-72, 71), -1);
    }
}
