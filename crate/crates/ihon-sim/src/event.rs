//! Time-ordered event queue with a fixed same-instant dispatch order.
//!
//! Ties at one instant dispatch as: delay-line exits first (a GST packet
//! claims the link at its exact exit time), then transmission completions,
//! then arrivals, SM/HP ahead of GST/LP; within one kind, insertion order.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::SimError;
use crate::packet::{PacketId, TrafficClass};
use crate::time::Picos;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    FdlExit(PacketId),
    TxComplete(PacketId),
    Arrival(TrafficClass),
}

impl EventKind {
    fn tie_rank(self) -> u8 {
        match self {
            EventKind::FdlExit(_) => 0,
            EventKind::TxComplete(_) => 1,
            EventKind::Arrival(TrafficClass::Sm) | EventKind::Arrival(TrafficClass::Hp) => 2,
            EventKind::Arrival(TrafficClass::Gst) | EventKind::Arrival(TrafficClass::Lp) => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimEvent {
    pub time: Picos,
    pub kind: EventKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Entry {
    time: Picos,
    rank: u8,
    seq: u64,
    kind: EventKind,
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.time, self.rank, self.seq).cmp(&(other.time, other.rank, other.seq))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Min-heap of pending events plus the virtual clock.
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Reverse<Entry>>,
    now: Picos,
    seq: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn now(&self) -> Picos {
        self.now
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Queue an event for dispatch in global time order. Scheduling into the
    /// past is a programming error and fails fast.
    pub fn schedule(&mut self, event: SimEvent) -> Result<(), SimError> {
        if event.time < self.now {
            return Err(SimError::RetroSchedule {
                event_ps: event.time.as_ps(),
                now_ps: self.now.as_ps(),
            });
        }
        let entry = Entry {
            time: event.time,
            rank: event.kind.tie_rank(),
            seq: self.seq,
            kind: event.kind,
        };
        self.seq += 1;
        self.heap.push(Reverse(entry));
        Ok(())
    }

    /// Remove and return the next event, advancing the clock to its time.
    pub fn pop(&mut self) -> Option<SimEvent> {
        let Reverse(entry) = self.heap.pop()?;
        debug_assert!(entry.time >= self.now, "event queue went backwards");
        self.now = entry.time;
        Some(SimEvent {
            time: entry.time,
            kind: entry.kind,
        })
    }
}
