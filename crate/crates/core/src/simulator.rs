//! Match an assignment stream against periodic packet arrivals and account
//! for waiting delays, wasted slots, and drops.
//!
//! Assignments are processed in slot order. An assignment serves the earliest
//! waiting packet at the slot's start instant; a packet whose wait would
//! exceed its own period is dropped at that instant instead, and a slot that
//! finds no waiting packet is wasted. Packets no assignment ever reaches stay
//! unserved. The run is sequential and fully deterministic.

use num_rational::Ratio;

use crate::baselines::{AssignmentStream, Scheme};
use crate::error::Result;
use crate::timebase::{SlotGrid, TimeQuantum, TrafficSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PacketStatus {
    Served,
    Dropped,
    Unserved,
}

impl PacketStatus {
    pub const fn name(self) -> &'static str {
        match self {
            PacketStatus::Served => "served",
            PacketStatus::Dropped => "dropped",
            PacketStatus::Unserved => "unserved",
        }
    }
}

/// Outcome for one packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PacketRecord {
    pub m: u64,
    pub arrival: TimeQuantum,
    pub serving_slot: Option<i64>,
    pub delay: Option<TimeQuantum>,
    pub status: PacketStatus,
}

/// Full record of one simulation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimTrace {
    pub packets: Vec<PacketRecord>,
    pub wasted_slots: Vec<i64>,
    pub scheme: Scheme,
    pub grid: SlotGrid,
    pub traffic: TrafficSpec,
}

/// Aggregates over one trace. The mean is exact and averages served packets
/// only; it is absent when nothing was served.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimStats {
    pub mean_delay: Option<Ratio<i64>>,
    pub max_delay: Option<TimeQuantum>,
    pub drop_count: u64,
    pub wasted_count: u64,
    pub served_count: u64,
}

/// Replay the assignment stream against the traffic.
///
/// At each assignment slot with start time `s`: packets with `arrival <= s`
/// whose wait `s - arrival` exceeds the traffic period are dropped first (a
/// dropped packet never consumes a slot); then the earliest remaining such
/// packet is served with delay `s - arrival`; if none is waiting the slot is
/// recorded as wasted. A wait of exactly one period is still served.
pub fn run(
    assignments: &AssignmentStream,
    traffic: &TrafficSpec,
    grid: &SlotGrid,
) -> Result<SimTrace> {
    traffic.validate_on(grid)?;
    let period = traffic.period();

    let mut packets: Vec<PacketRecord> = (1..=traffic.packet_count())
        .map(|m| {
            Ok(PacketRecord {
                m,
                arrival: traffic.arrival_time(m)?,
                serving_slot: None,
                delay: None,
                status: PacketStatus::Unserved,
            })
        })
        .collect::<Result<_>>()?;

    let mut wasted_slots = Vec::new();
    let mut head = 0usize; // earliest packet not yet served or dropped

    for &slot in assignments.slots() {
        let start = grid.slot_start(slot)?;
        // Expired packets are cleared before the slot can serve anyone.
        while head < packets.len()
            && packets[head].arrival <= start
            && start - packets[head].arrival > period
        {
            packets[head].status = PacketStatus::Dropped;
            head += 1;
        }
        if head < packets.len() && packets[head].arrival <= start {
            let p = &mut packets[head];
            p.serving_slot = Some(slot);
            p.delay = Some(start - p.arrival);
            p.status = PacketStatus::Served;
            head += 1;
        } else {
            wasted_slots.push(slot);
        }
    }

    Ok(SimTrace {
        packets,
        wasted_slots,
        scheme: assignments.scheme(),
        grid: *grid,
        traffic: *traffic,
    })
}

/// Aggregate a trace into counts and exact delay statistics.
pub fn summarize(trace: &SimTrace) -> SimStats {
    let mut delay_sum = 0i64;
    let mut max_delay = None;
    let mut served_count = 0u64;
    let mut drop_count = 0u64;
    for p in &trace.packets {
        match p.status {
            PacketStatus::Served => {
                let d = p.delay.expect("served packet has a delay");
                delay_sum += d.value();
                max_delay = Some(max_delay.map_or(d, |m: TimeQuantum| m.max(d)));
                served_count += 1;
            }
            PacketStatus::Dropped => drop_count += 1,
            PacketStatus::Unserved => {}
        }
    }
    SimStats {
        mean_delay: (served_count > 0).then(|| Ratio::new(delay_sum, served_count as i64)),
        max_delay,
        drop_count,
        wasted_count: trace.wasted_slots.len() as u64,
        served_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::{csps_schedule, Scheme};
    use crate::rps::{derive_factors, DEFAULT_GAMMA};

    fn grid(wsch: i64) -> SlotGrid {
        SlotGrid::new(TimeQuantum::ZERO, TimeQuantum::new(wsch)).unwrap()
    }

    fn traffic(period: i64, m_total: u64) -> TrafficSpec {
        TrafficSpec::new(TimeQuantum::ZERO, TimeQuantum::new(period), m_total).unwrap()
    }

    #[test]
    fn single_assignment_serves_first_packet_immediately() {
        let g = grid(71);
        let t = traffic(2800, 1);
        let stream = AssignmentStream::new(vec![1], Scheme::Rps).unwrap();
        let trace = run(&stream, &t, &g).unwrap();
        let p = &trace.packets[0];
        assert_eq!(p.status, PacketStatus::Served);
        assert_eq!(p.serving_slot, Some(1));
        assert_eq!(p.delay, Some(TimeQuantum::ZERO));
        assert!(trace.wasted_slots.is_empty());
    }

    #[test]
    fn derived_schedule_serves_everything_within_one_slot() {
        let g = grid(71);
        let t = traffic(2800, 200);
        let tuple = derive_factors(&t, &g, DEFAULT_GAMMA).unwrap();
        let trace = run(&tuple.assignment_stream(200).unwrap(), &t, &g).unwrap();
        let stats = summarize(&trace);
        assert_eq!(stats.served_count, 200);
        assert_eq!(stats.drop_count, 0);
        assert_eq!(stats.wasted_count, 0);
        assert!(stats.max_delay.unwrap() < g.slot_width());
        // One-to-one matching: assignment k serves packet k.
        for (k, p) in trace.packets.iter().enumerate() {
            assert_eq!(p.serving_slot, Some(tuple.slot_index(k as u64 + 1).unwrap()));
        }
    }

    #[test]
    fn fixed_period_schedule_shows_waste_and_excess_delay() {
        let g = grid(71);
        let t = traffic(2800, 200);
        let stream = csps_schedule(&t, &g, 200).unwrap();
        let trace = run(&stream, &t, &g).unwrap();
        let stats = summarize(&trace);
        assert!(stats.wasted_count >= 1);
        assert!(stats.max_delay.unwrap() >= g.slot_width());
    }

    #[test]
    fn slow_schedule_drops_expired_packets() {
        // One assignment every 2 slots against a period of 1 slot: the queue
        // falls behind and waits blow past the period.
        let g = grid(10);
        let t = traffic(10, 20);
        let slots: Vec<i64> = (0..10).map(|k| 1 + 2 * k).collect();
        let stream = AssignmentStream::new(slots, Scheme::Csps).unwrap();
        let trace = run(&stream, &t, &g).unwrap();
        let stats = summarize(&trace);
        assert!(stats.drop_count > 0);
        // Served delays never exceed the period.
        for p in &trace.packets {
            if let Some(d) = p.delay {
                assert!(d <= t.period());
            }
        }
    }

    #[test]
    fn delay_of_exactly_one_period_is_served() {
        let g = grid(10);
        let t = traffic(10, 2);
        // Slot 2 starts at 10 = arrival of packet 1 plus exactly one period.
        let stream = AssignmentStream::new(vec![2, 3], Scheme::Csps).unwrap();
        let trace = run(&stream, &t, &g).unwrap();
        assert_eq!(trace.packets[0].status, PacketStatus::Served);
        assert_eq!(trace.packets[0].delay, Some(TimeQuantum::new(10)));
    }

    #[test]
    fn delay_beyond_one_period_is_dropped_not_served() {
        let g = grid(10);
        let t = traffic(10, 2);
        // Slot 3 starts at 20: packet 1 has waited 20 > 10, packet 2 exactly 10.
        let stream = AssignmentStream::new(vec![3], Scheme::Csps).unwrap();
        let trace = run(&stream, &t, &g).unwrap();
        assert_eq!(trace.packets[0].status, PacketStatus::Dropped);
        assert_eq!(trace.packets[1].status, PacketStatus::Served);
        assert_eq!(trace.packets[1].delay, Some(TimeQuantum::new(10)));
    }

    #[test]
    fn unreached_packets_stay_unserved() {
        let g = grid(10);
        let t = traffic(10, 5);
        let stream = AssignmentStream::new(vec![1, 2], Scheme::Csps).unwrap();
        let trace = run(&stream, &t, &g).unwrap();
        let unserved = trace
            .packets
            .iter()
            .filter(|p| p.status == PacketStatus::Unserved)
            .count();
        assert_eq!(unserved, 3);
    }

    #[test]
    fn conservation_of_packets() {
        let g = grid(71);
        let t = traffic(2805, 200);
        let stream = csps_schedule(&t, &g, 150).unwrap();
        let trace = run(&stream, &t, &g).unwrap();
        let stats = summarize(&trace);
        let unserved = trace
            .packets
            .iter()
            .filter(|p| p.status == PacketStatus::Unserved)
            .count() as u64;
        assert_eq!(stats.served_count + stats.drop_count + unserved, 200);
        // Wasted slots never coincide with serving slots.
        for p in &trace.packets {
            if let Some(slot) = p.serving_slot {
                assert!(!trace.wasted_slots.contains(&slot));
            }
        }
    }

    #[test]
    fn summarize_mean_is_exact() {
        let g = grid(10);
        let t = traffic(25, 4);
        let tuple = derive_factors(&t, &g, DEFAULT_GAMMA).unwrap();
        let trace = run(&tuple.assignment_stream(4).unwrap(), &t, &g).unwrap();
        let delays: Vec<i64> = trace
            .packets
            .iter()
            .map(|p| p.delay.unwrap().value())
            .collect();
        assert_eq!(delays, vec![0, 5, 0, 5]);
        let stats = summarize(&trace);
        assert_eq!(stats.mean_delay, Some(Ratio::new(5, 2)));
        assert_eq!(stats.max_delay, Some(TimeQuantum::new(5)));
        assert_eq!(stats.drop_count, 0);
    }

    #[test]
    fn summarize_empty_service_has_no_mean() {
        let g = grid(10);
        let t = traffic(10, 1);
        let stream = AssignmentStream::new(Vec::new(), Scheme::Rps).unwrap();
        let trace = run(&stream, &t, &g).unwrap();
        let stats = summarize(&trace);
        assert_eq!(stats.mean_delay, None);
        assert_eq!(stats.max_delay, None);
        assert_eq!(stats.served_count, 0);
    }

    #[test]
    fn identical_inputs_produce_identical_traces() {
        let g = grid(71);
        let t = traffic(2800, 200);
        let stream = csps_schedule(&t, &g, 200).unwrap();
        let a = run(&stream, &t, &g).unwrap();
        let b = run(&stream, &t, &g).unwrap();
        assert_eq!(a, b);
    }
}
