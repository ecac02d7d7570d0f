//! Shared test oracles: everything here recomputes results from the raw
//! event log alone, independently of the incremental collectors it checks.
#![allow(dead_code)] // each test binary uses its own subset

use std::collections::HashMap;

use ihon_sim::eventlog::{LogAction, LogRecord};
use ihon_sim::metrics::RunMetrics;
use ihon_sim::packet::{PacketId, TrafficClass};
use ihon_sim::time::{service_time, Picos};

#[derive(Debug, Default, Clone)]
pub struct ClassAudit {
    pub generated: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub sum_delay_ps: u128,
    pub min_delay: Option<Picos>,
    pub max_delay: Option<Picos>,
    pub last_arrival: Option<Picos>,
}

#[derive(Debug, Default, Clone)]
pub struct LogAudit {
    pub classes: [ClassAudit; 4],
    pub busy_in_window_ps: u128,
    pub window_end: Option<Picos>,
}

impl LogAudit {
    pub fn class(&self, class: TrafficClass) -> &ClassAudit {
        &self.classes[class_index(class)]
    }
}

pub fn class_index(class: TrafficClass) -> usize {
    TrafficClass::ALL.iter().position(|c| *c == class).unwrap()
}

/// Recompute per-class counters, delay statistics, and windowed busy time
/// from the raw log. Delays are reconstructed as tx_start - arrival; the
/// window closes at the last arrival of any class, and only the part of
/// each transmission that starts before the window end counts.
pub fn audit_from_log(records: &[LogRecord], capacity_bps: u64) -> LogAudit {
    let mut audit = LogAudit::default();
    let mut arrivals: HashMap<PacketId, Picos> = HashMap::new();

    let window_end = records
        .iter()
        .filter(|r| r.action == LogAction::Arrive)
        .map(|r| r.time)
        .max();
    audit.window_end = window_end;

    for r in records {
        let class = &mut audit.classes[class_index(r.class)];
        match r.action {
            LogAction::Arrive => {
                class.generated += 1;
                class.last_arrival = Some(r.time);
                arrivals.insert(r.packet, r.time);
            }
            LogAction::Drop => {
                class.dropped += 1;
            }
            LogAction::TxStart => {
                let arrival = arrivals[&r.packet];
                let delay = r.time - arrival;
                class.sum_delay_ps += delay.as_ps() as u128;
                class.min_delay = Some(class.min_delay.map_or(delay, |m| m.min(delay)));
                class.max_delay = Some(class.max_delay.map_or(delay, |m| m.max(delay)));
                let end = r.time + service_time(r.length_bytes, capacity_bps);
                if let Some(w) = window_end {
                    if r.time < w {
                        audit.busy_in_window_ps += (end.min(w) - r.time).as_ps() as u128;
                    }
                }
            }
            LogAction::TxDone => {
                class.delivered += 1;
            }
        }
    }
    audit
}

/// Assert that the incrementally collected metrics equal the log audit
/// exactly, field by field.
pub fn assert_metrics_match_audit(metrics: &RunMetrics, audit: &LogAudit) {
    for class in TrafficClass::ALL {
        let m = metrics.class(class);
        let a = audit.class(class);
        assert_eq!(m.generated(), a.generated, "{} generated", class.label());
        assert_eq!(m.delivered(), a.delivered, "{} delivered", class.label());
        assert_eq!(m.dropped(), a.dropped, "{} dropped", class.label());
        assert_eq!(
            m.sum_delay_ps(),
            a.sum_delay_ps,
            "{} delay sum",
            class.label()
        );
        assert_eq!(m.min_delay(), a.min_delay, "{} min delay", class.label());
        assert_eq!(m.max_delay(), a.max_delay, "{} max delay", class.label());
        assert_eq!(
            m.last_arrival(),
            a.last_arrival,
            "{} last arrival",
            class.label()
        );
    }
    assert_eq!(metrics.window_end(), audit.window_end, "window end");
    assert_eq!(
        metrics.busy_in_window_ps(),
        audit.busy_in_window_ps,
        "busy time in window"
    );
    let audit_util = audit
        .window_end
        .and_then(|w| (w > Picos::ZERO).then(|| audit.busy_in_window_ps as f64 / w.as_ps() as f64));
    assert_eq!(metrics.utilization(), audit_util, "utilization");
}

/// Transmission intervals `[start, end)` on the output link, in start order.
pub fn tx_intervals(records: &[LogRecord], capacity_bps: u64) -> Vec<(Picos, Picos)> {
    records
        .iter()
        .filter(|r| r.action == LogAction::TxStart)
        .map(|r| (r.time, r.time + service_time(r.length_bytes, capacity_bps)))
        .collect()
}

pub fn assert_non_overlapping(records: &[LogRecord], capacity_bps: u64) {
    let intervals = tx_intervals(records, capacity_bps);
    for pair in intervals.windows(2) {
        assert!(
            pair[0].1 <= pair[1].0,
            "transmissions overlap: [{:?}, {:?}) then [{:?}, {:?})",
            pair[0].0,
            pair[0].1,
            pair[1].0,
            pair[1].1
        );
    }
}

/// Delivery (tx start) order must equal arrival order within `class`.
pub fn assert_fifo_within_class(records: &[LogRecord], class: TrafficClass) {
    let arrivals: Vec<PacketId> = records
        .iter()
        .filter(|r| r.action == LogAction::Arrive && r.class == class)
        .map(|r| r.packet)
        .collect();
    let dropped: Vec<PacketId> = records
        .iter()
        .filter(|r| r.action == LogAction::Drop && r.class == class)
        .map(|r| r.packet)
        .collect();
    let expected: Vec<PacketId> = arrivals
        .into_iter()
        .filter(|id| !dropped.contains(id))
        .collect();
    let starts: Vec<PacketId> = records
        .iter()
        .filter(|r| r.action == LogAction::TxStart && r.class == class)
        .map(|r| r.packet)
        .collect();
    assert_eq!(starts, expected, "{} delivery order", class.label());
}

/// Replay queue occupancy from the log and return its maximum. A dropped
/// packet is logged as an arrival immediately followed by a drop; the pair
/// never occupies the buffer.
pub fn max_occupancy_bytes(records: &[LogRecord], classes: &[TrafficClass]) -> u64 {
    let mut occupancy: i64 = 0;
    let mut max = 0i64;
    let relevant: Vec<&LogRecord> = records
        .iter()
        .filter(|r| classes.contains(&r.class))
        .collect();
    let mut i = 0;
    while i < relevant.len() {
        let r = relevant[i];
        match r.action {
            LogAction::Arrive => {
                let dropped_next = relevant
                    .get(i + 1)
                    .is_some_and(|n| n.action == LogAction::Drop && n.packet == r.packet);
                if dropped_next {
                    i += 1; // skip the drop record too
                } else {
                    occupancy += i64::from(r.length_bytes);
                }
            }
            LogAction::TxStart => occupancy -= i64::from(r.length_bytes),
            LogAction::Drop | LogAction::TxDone => {}
        }
        max = max.max(occupancy);
        i += 1;
    }
    assert!(
        occupancy == 0,
        "occupancy must drain to zero, got {occupancy}"
    );
    max as u64
}

/// Every inserted SM transmission must finish no later than the earliest
/// delay-line exit known at its insertion instant: exits of GST packets
/// that arrived at or before the insertion and leave after it.
pub fn assert_sm_insertion_safety(records: &[LogRecord], capacity_bps: u64, fdl_delay: Picos) {
    let gst_arrivals: Vec<Picos> = records
        .iter()
        .filter(|r| r.action == LogAction::Arrive && r.class == TrafficClass::Gst)
        .map(|r| r.time)
        .collect();
    for r in records {
        if r.action != LogAction::TxStart || r.class != TrafficClass::Sm {
            continue;
        }
        let start = r.time;
        let end = start + service_time(r.length_bytes, capacity_bps);
        let next_exit = gst_arrivals
            .iter()
            .filter(|a| **a <= start && **a + fdl_delay > start)
            .map(|a| *a + fdl_delay)
            .min();
        if let Some(exit) = next_exit {
            assert!(
                end <= exit,
                "SM packet {} transmits [{:?}, {:?}) past the pending exit at {:?}",
                r.packet,
                start,
                end,
                exit
            );
        }
    }
}
