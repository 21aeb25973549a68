//! Recursive periodicity shifting: derive the scheduling-factor tuple for an
//! arbitrary traffic period and evaluate assignment slot indices in closed
//! form.
//!
//! The root level spaces assignments `period0` slots apart, the integer
//! spacing nearest to `p_trff / wsch`. Whenever the traffic period is not an
//! exact multiple of the slot width a residual delay gradient remains, and
//! each alignment level cancels most of its predecessor's gradient by
//! postponing or expediting one single slot at a fixed cadence. The gradient
//! at least halves per level, so the recursion reaches exactly zero after at
//! most `floor(log2(wsch)) + 1` levels.
//!
//! The normative semantics of `slot_index` is the greedy reference rule:
//! assignment `m` lands in the first slot starting at or after packet `m`'s
//! arrival ([`expand_reference_schedule`]). The closed form is an evaluation
//! strategy for that rule, and the randomized verification harness checks the
//! two against each other packet by packet.

use std::fmt;

use crate::baselines::{AssignmentStream, Scheme};
use crate::error::{Error, Result};
use crate::timebase::{ceil_div, SlotGrid, TimeQuantum, TrafficSpec};

/// Validation horizon multiplier for the initial-position search.
pub const DEFAULT_GAMMA: u32 = 3;

/// Shift direction of an alignment level: postpone pushes future assignments
/// one slot later, expedite pulls them one slot earlier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Postpone,
    Expedite,
}

impl Direction {
    pub const fn sign(self) -> i64 {
        match self {
            Direction::Postpone => 1,
            Direction::Expedite => -1,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Postpone => "+1",
            Direction::Expedite => "-1",
        })
    }
}

/// One level of the scheduling policy: a period (measured in events of the
/// level below), a shift direction, and the event index where the level first
/// triggers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FactorVector {
    pub period: i64,
    pub direction: Direction,
    pub initial_position: i64,
}

/// Signed gap between an assignment's slot start and its packet's arrival.
/// A fully derived tuple keeps every gap inside `[0, wsch)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct DelayGap(pub TimeQuantum);

impl DelayGap {
    pub const fn value(self) -> TimeQuantum {
        self.0
    }

    /// True when the gap sits inside the serving slot: `0 <= gap < wsch`.
    pub fn is_aligned(self, wsch: TimeQuantum) -> bool {
        self.0 >= TimeQuantum::ZERO && self.0 < wsch
    }
}

/// Root-level selection: nearest integer slot spacing and the residual
/// gradient it leaves per assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootFactors {
    pub period: i64,
    pub direction: Direction,
    pub gradient: TimeQuantum,
}

/// Pick the root period minimizing `|p_trff - x * wsch|` over positive
/// integers `x`.
///
/// The residual `gradient` is the per-assignment drift that selection leaves
/// behind; its sign is carried separately as `direction` (postpone when the
/// root interval undershoots the period, expedite when it overshoots). An
/// exact tie at half a slot resolves to the smaller period with postponement,
/// and an exact multiple reports a zero gradient with an unused direction.
pub fn derive_root(p_trff: TimeQuantum, grid: &SlotGrid) -> Result<RootFactors> {
    let w = grid.slot_width().value();
    let p = p_trff.value();
    if p < w {
        return Err(Error::PeriodShorterThanSlot {
            period: p_trff,
            wsch: grid.slot_width(),
        });
    }
    let rem = p % w;
    let (period, direction, gradient) = if rem == 0 {
        (p / w, Direction::Postpone, 0)
    } else if rem <= w / 2 {
        (p / w, Direction::Postpone, rem)
    } else {
        (p / w + 1, Direction::Expedite, w - rem)
    };
    Ok(RootFactors {
        period,
        direction,
        gradient: TimeQuantum::new(gradient),
    })
}

/// Alignment periods and directions for every level after the root, together
/// with the gradient left after each level. `gradients[n-1]` is the residual
/// once level `n` is active; the final entry is always exactly zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlignmentChain {
    pub periods: Vec<i64>,
    pub directions: Vec<Direction>,
    pub gradients: Vec<TimeQuantum>,
}

impl AlignmentChain {
    /// Number of alignment levels (the `N` of the derivation).
    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub(crate) fn truncated(&self, max_levels: usize) -> AlignmentChain {
        let k = max_levels.min(self.len());
        AlignmentChain {
            periods: self.periods[..k].to_vec(),
            directions: self.directions[..k].to_vec(),
            gradients: self.gradients[..k].to_vec(),
        }
    }
}

/// Run the gradient recursion from a root residual down to exactly zero.
///
/// Per level: the period is the integer nearest `wsch / gradient` (ties take
/// the smaller quotient with postponement, matching the root-level rule), and
/// the next gradient is `|period * gradient - wsch|`. Each step at least
/// halves the gradient, so the chain ends with a zero entry after finitely
/// many levels. A zero input returns an empty chain.
pub fn derive_alignment_chain(gradient: TimeQuantum, wsch: TimeQuantum) -> Result<AlignmentChain> {
    let w = wsch.value();
    if w <= 0 {
        return Err(Error::NonPositiveSlotWidth(wsch));
    }
    let seed = gradient.value();
    if seed < 0 || seed > w / 2 {
        return Err(Error::GradientTooLarge { gradient, wsch });
    }

    let mut chain = AlignmentChain::default();
    let mut delta = seed;
    while delta != 0 {
        let rem = w % delta;
        let (period, direction, next) = if rem == 0 {
            (w / delta, Direction::Postpone, 0)
        } else if rem <= delta / 2 {
            (w / delta, Direction::Postpone, rem)
        } else {
            (w / delta + 1, Direction::Expedite, delta - rem)
        };
        chain.periods.push(period);
        chain.directions.push(direction);
        chain.gradients.push(TimeQuantum::new(next));
        delta = next;
    }
    Ok(chain)
}

/// Initial position of the root level: the 1-based index of the first slot
/// starting at or after the first packet, `ceil((tau_trff - tau0) / wsch) + 1`.
pub fn derive_t0(traffic: &TrafficSpec, grid: &SlotGrid) -> Result<i64> {
    if traffic.start() < grid.origin() {
        return Err(Error::TimeBeforeOrigin {
            t: traffic.start(),
            tau0: grid.origin(),
        });
    }
    Ok(ceil_div(
        traffic.start().value() - grid.origin().value(),
        grid.slot_width().value(),
    ) + 1)
}

/// How the correction-count recursion of the closed form is evaluated.
///
/// The recursion folds the deeper levels' trigger counts into each level's
/// own count. Its printed form is ambiguous in two places, so all three
/// readings are implemented behind one switch:
///
/// * [`PerLevel`](CorrectionRule::PerLevel) divides level `n`'s numerator by
///   level `n`'s own period and subtracts the deeper count with level `n`'s
///   own direction. This is the only variant whose average trigger rate
///   equals the residual gradient at every level, and the only one that
///   reproduces the reference schedule on randomized scenarios; it is the
///   default everywhere.
/// * [`FirstLevelDivisor`](CorrectionRule::FirstLevelDivisor) divides every
///   intermediate level by the first alignment period instead.
/// * [`NextLevelSign`](CorrectionRule::NextLevelSign) applies the deeper
///   level's direction to the subtracted count instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionRule {
    PerLevel,
    FirstLevelDivisor,
    NextLevelSign,
}

/// Correction count for assignment `m` over the alignment levels
/// `align[0..]` (level 1 upward). Empty levels contribute zero.
fn correction(m: i64, align: &[FactorVector], rule: CorrectionRule) -> i64 {
    let mut count = 0i64;
    for (idx, level) in align.iter().enumerate().rev() {
        let last = idx + 1 == align.len();
        let divisor = match rule {
            CorrectionRule::FirstLevelDivisor if !last => align[0].period,
            _ => level.period,
        };
        let sign = match rule {
            CorrectionRule::NextLevelSign if !last => align[idx + 1].direction.sign(),
            _ => level.direction.sign(),
        };
        count = (level.period - level.initial_position + m - sign * count).div_euclid(divisor);
    }
    count
}

/// Closed-form slot index of assignment `m` under a (possibly truncated)
/// level stack. `levels[0]` is the root; deeper absent levels contribute no
/// correction.
pub(crate) fn slot_for(m: i64, levels: &[FactorVector], rule: CorrectionRule) -> i64 {
    let root = &levels[0];
    root.initial_position
        + (m - 1) * root.period
        + root.direction.sign() * correction(m, &levels[1..], rule)
}

/// Signed gap between assignment `m`'s slot start and packet `m`'s arrival:
/// `(slot - 1) * wsch - (tau_trff - tau0) - (m - 1) * p_trff`.
pub(crate) fn gap_for(
    m: i64,
    levels: &[FactorVector],
    wsch: i64,
    tau_offset: i64,
    period: i64,
    rule: CorrectionRule,
) -> i64 {
    (slot_for(m, levels, rule) - 1) * wsch - tau_offset - (m - 1) * period
}

/// Product of the given periods, capped to keep later divisions overflow-free.
fn capped_product(periods: &[i64]) -> i128 {
    const CAP: i128 = 1 << 60;
    let mut prod: i128 = 1;
    for &p in periods {
        prod = prod.saturating_mul(p as i128).min(CAP);
    }
    prod
}

/// Upper bound on how far a forward scan can run before the truncated
/// policy's gap must leave `[0, wsch)`: the gap drifts by
/// `corrected / prod(shallower periods)` per assignment, padded generously.
fn scan_budget(wsch: i64, corrected: i64, periods_through_level: &[i64]) -> u64 {
    let level_count = periods_through_level.len();
    let shallower = capped_product(&periods_through_level[..level_count - 1]);
    let own_period = *periods_through_level.last().expect("at least one level") as i128;
    let steps = 8 * (wsch as i128) * shallower / (corrected.max(1) as i128) + 8 * own_period + 1024;
    steps.min(u64::MAX as i128) as u64
}

/// Allowance for the gradient not yet cancelled by deeper, still underived
/// levels: `steps` assignments away from the candidate position the truncated
/// policy may legitimately have drifted `ceil(steps * residual / prod)`
/// quanta outside `[0, wsch)`. Zero at the last level, where validation is
/// exact.
fn drift_allowance(steps: i64, residual: i64, prod: i128) -> i64 {
    if residual == 0 {
        return 0;
    }
    let num = steps as i128 * residual as i128;
    ((num + prod - 1) / prod) as i64
}

/// Candidate positions for backward validation, nearest the estimate first
/// and preferring the downward side: `e, e-1, e+1, e-2, e+2, ...` clipped to
/// `[1, e + 4 * period + 4]`.
///
/// Downward candidates re-phase the level's trigger train. Upward candidates
/// beyond one period select the same train with a higher count baseline
/// (earlier triggers then count negative), which re-phases the level below by
/// a constant; some schedules are only expressible that way.
fn candidate_positions(estimate: i64, period: i64) -> impl Iterator<Item = i64> {
    let upper = estimate + 4 * period + 4;
    let downward = (1..estimate).rev();
    let upward = estimate + 1..=upper;
    std::iter::once(estimate).chain(itertools::interleave(downward, upward))
}

/// Shared state for the initial-position search.
struct JdvSearch<'a> {
    chain: &'a AlignmentChain,
    root_gradient: i64,
    wsch: i64,
    tau_offset: i64,
    period: i64,
    gamma: i64,
    /// Remaining gap evaluations before the search gives up.
    fuel: u64,
}

impl JdvSearch<'_> {
    fn spend(&mut self, evals: u64, level: usize) -> Result<()> {
        if self.fuel < evals {
            return Err(Error::ScanBudgetExceeded {
                level,
                budget: self.fuel,
            });
        }
        self.fuel -= evals;
        Ok(())
    }

    /// Derive levels `n..=N` on top of the already-fixed prefix, backtracking
    /// into earlier candidates when a deeper level cannot complete.
    fn derive_from(&mut self, n: usize, levels: &[FactorVector]) -> Result<Vec<FactorVector>> {
        if n > self.chain.len() {
            return Ok(levels.to_vec());
        }
        let rule = CorrectionRule::PerLevel;
        let level_period = self.chain.periods[n - 1];
        let level_direction = self.chain.directions[n - 1];
        // Gradient this level corrects, and the residual it leaves behind.
        let corrected = if n == 1 {
            self.root_gradient
        } else {
            self.chain.gradients[n - 2].value()
        };
        let residual = self.chain.gradients[n - 1].value();
        let prod = capped_product(&self.chain.periods[..n]);

        // Forward derivation: first assignment whose gap escapes the slot.
        let start = if n == 1 {
            2
        } else {
            levels[n - 1].initial_position
        };
        let scan_cap = scan_budget(self.wsch, corrected, &self.chain.periods[..n]);
        let mut probe = start;
        loop {
            self.spend(1, n)?;
            let theta = gap_for(probe, levels, self.wsch, self.tau_offset, self.period, rule);
            if theta < 0 || theta >= self.wsch {
                break;
            }
            probe += 1;
            if (probe - start) as u64 > scan_cap {
                return Err(Error::ScanBudgetExceeded {
                    level: n,
                    budget: scan_cap,
                });
            }
        }

        // Backward validation: try candidates nearest the estimate first and
        // recurse into the remaining levels; a candidate whose deeper levels
        // cannot complete is abandoned and the next one is tried.
        for candidate in candidate_positions(probe, level_period) {
            let mut trial = levels.to_vec();
            // The previous alignment level may not trigger after this one.
            // (The root position indexes slots, not assignments, and is never
            // clamped.)
            if n >= 2 && trial[n - 1].initial_position > candidate {
                trial[n - 1].initial_position = candidate;
            }
            trial.push(FactorVector {
                period: level_period,
                direction: level_direction,
                initial_position: candidate,
            });
            let end = candidate + self.gamma * level_period + 1;
            self.spend(end as u64, n)?;
            let ok = (1..=end).all(|j| {
                let theta = gap_for(j, &trial, self.wsch, self.tau_offset, self.period, rule);
                let slack = drift_allowance((j - candidate).abs() + 1, residual, prod);
                theta >= -slack && theta < self.wsch + slack
            });
            if !ok {
                continue;
            }
            match self.derive_from(n + 1, &trial) {
                Ok(levels) => return Ok(levels),
                Err(Error::InitialPositionSearchExhausted { .. }) => continue,
                Err(other) => return Err(other),
            }
        }
        Err(Error::InitialPositionSearchExhausted { level: n })
    }
}

/// Joint derivation and validation of the alignment-level initial positions.
///
/// For each level in order the forward scan walks assignment indices from 2
/// (first level) or the previous level's position until the gap under the
/// already-derived prefix leaves `[0, wsch)`; that index is the estimate. The
/// backward pass then tries candidate positions nearest the estimate first
/// ([`candidate_positions`]), clamping the previous alignment level's
/// position down whenever it exceeds the candidate, and accepts a candidate
/// when its gaps hold from the first assignment through `gamma` cadence
/// periods past the candidate. Validation of intermediate levels tolerates
/// the drift owed to deeper levels (see [`drift_allowance`]); the last level
/// is checked exactly, and a level whose deeper levels cannot complete is
/// re-searched (bounded backtracking).
fn jdv_levels(
    traffic: &TrafficSpec,
    grid: &SlotGrid,
    root: &RootFactors,
    chain: &AlignmentChain,
    gamma: u32,
) -> Result<Vec<FactorVector>> {
    let root_level = FactorVector {
        period: root.period,
        direction: root.direction,
        initial_position: derive_t0(traffic, grid)?,
    };
    let mut search = JdvSearch {
        chain,
        root_gradient: root.gradient.value(),
        wsch: grid.slot_width().value(),
        tau_offset: traffic.start().value() - grid.origin().value(),
        period: traffic.period().value(),
        gamma: i64::from(gamma.max(1)),
        fuel: 2_000_000_000,
    };
    search.derive_from(1, &[root_level])
}

/// Initial positions `t_1..t_N` for a derived chain, including any clamping
/// applied to earlier levels along the way.
pub fn jdv_initial_positions(
    traffic: &TrafficSpec,
    grid: &SlotGrid,
    root: &RootFactors,
    chain: &AlignmentChain,
    gamma: u32,
) -> Result<Vec<i64>> {
    let levels = jdv_levels(traffic, grid, root, chain, gamma)?;
    Ok(levels[1..].iter().map(|l| l.initial_position).collect())
}

/// Derive the complete level stack, optionally truncating the alignment chain
/// (used by the single-shift baseline). Returns the levels plus the gradient
/// sequence starting at the root residual.
pub(crate) fn derive_levels(
    traffic: &TrafficSpec,
    grid: &SlotGrid,
    gamma: u32,
    max_align_levels: Option<usize>,
) -> Result<(Vec<FactorVector>, Vec<TimeQuantum>)> {
    traffic.validate_on(grid)?;
    let root = derive_root(traffic.period(), grid)?;
    let mut chain = derive_alignment_chain(root.gradient, grid.slot_width())?;
    if let Some(k) = max_align_levels {
        chain = chain.truncated(k);
    }
    let levels = jdv_levels(traffic, grid, &root, &chain, gamma)?;
    let mut gradients = vec![root.gradient];
    gradients.extend(chain.gradients.iter().copied());
    Ok((levels, gradients))
}

/// The complete scheduling-factor tuple for one traffic/grid pairing.
///
/// Holds the root level plus all alignment levels with their derived initial
/// positions, and the gradient sequence `delta_1..delta_{N+1}` (the final
/// entry is exactly zero). Immutable once derived and cheap to share.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorTuple {
    levels: Vec<FactorVector>,
    gradients: Vec<TimeQuantum>,
    grid: SlotGrid,
    traffic_period: TimeQuantum,
}

/// Derive the full factor tuple: root selection, alignment chain, and joint
/// derivation/validation of every initial position.
pub fn derive_factors(traffic: &TrafficSpec, grid: &SlotGrid, gamma: u32) -> Result<FactorTuple> {
    let (levels, gradients) = derive_levels(traffic, grid, gamma, None)?;
    Ok(FactorTuple {
        levels,
        gradients,
        grid: *grid,
        traffic_period: traffic.period(),
    })
}

impl FactorTuple {
    /// Number of alignment levels (`N`); zero when the traffic period is an
    /// exact multiple of the slot width.
    pub fn n_levels(&self) -> usize {
        self.levels.len() - 1
    }

    /// All levels, root first.
    pub fn levels(&self) -> &[FactorVector] {
        &self.levels
    }

    pub fn root(&self) -> &FactorVector {
        &self.levels[0]
    }

    /// Gradient sequence `delta_1..delta_{N+1}`.
    pub fn gradients(&self) -> &[TimeQuantum] {
        &self.gradients
    }

    pub fn grid(&self) -> &SlotGrid {
        &self.grid
    }

    pub fn traffic_period(&self) -> TimeQuantum {
        self.traffic_period
    }

    /// Slot index of assignment `m` (1-based), equal to the greedy reference
    /// rule's choice for packet `m`.
    pub fn slot_index(&self, m: u64) -> Result<i64> {
        self.slot_index_with_rule(m, CorrectionRule::PerLevel)
    }

    /// Slot index under an explicit correction-rule reading. Only
    /// [`CorrectionRule::PerLevel`] matches the reference schedule in
    /// general; the others exist for comparison.
    pub fn slot_index_with_rule(&self, m: u64, rule: CorrectionRule) -> Result<i64> {
        if m == 0 {
            return Err(Error::PacketIndexZero);
        }
        Ok(slot_for(m as i64, &self.levels, rule))
    }

    /// Gap between assignment `m`'s slot start and packet `m`'s arrival,
    /// using all levels.
    pub fn theta(&self, m: u64, traffic: &TrafficSpec) -> Result<DelayGap> {
        self.theta_prefix(m, self.n_levels(), traffic)
    }

    /// Gap evaluated with only the first `align_levels` alignment levels
    /// active (the root always is); deeper levels contribute no correction.
    pub fn theta_prefix(
        &self,
        m: u64,
        align_levels: usize,
        traffic: &TrafficSpec,
    ) -> Result<DelayGap> {
        if m == 0 {
            return Err(Error::PacketIndexZero);
        }
        debug_assert_eq!(traffic.period(), self.traffic_period);
        let used = align_levels.min(self.n_levels()) + 1;
        let theta = gap_for(
            m as i64,
            &self.levels[..used],
            self.grid.slot_width().value(),
            traffic.start().value() - self.grid.origin().value(),
            traffic.period().value(),
            CorrectionRule::PerLevel,
        );
        Ok(DelayGap(TimeQuantum::new(theta)))
    }

    /// Expand the first `count` assignments into a stream for simulation.
    pub fn assignment_stream(&self, count: u64) -> Result<AssignmentStream> {
        let slots: Result<Vec<i64>> = (1..=count).map(|m| self.slot_index(m)).collect();
        AssignmentStream::new(slots?, Scheme::Rps)
    }
}

/// The greedy reference schedule: for every packet, the first slot starting
/// at or after its arrival. Strictly increasing because the traffic period is
/// at least one slot width.
pub fn expand_reference_schedule(traffic: &TrafficSpec, grid: &SlotGrid) -> Result<Vec<i64>> {
    traffic.validate_on(grid)?;
    (1..=traffic.packet_count())
        .map(|m| grid.first_slot_at_or_after(traffic.arrival_time(m)?))
        .collect()
}
