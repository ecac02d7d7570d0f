//! The fusion-node data plane and the strict-priority reference switch.
//!
//! Fusion mode: GST packets enter a fixed delay line and leave it exactly
//! one delay later, claiming the output link with absolute priority. SM
//! packets wait in a byte-bounded FIFO; whenever the link is idle the head
//! packet is inserted only if it finishes before the earliest pending
//! delay-line exit. An empty delay line is an unbounded gap: any GST packet
//! arriving after the decision instant exits at least one full delay later,
//! and the delay is sized to the largest SM serialization time, so the
//! insertion can never collide with it.
//!
//! Strict-priority mode: no delay line, no gap lookahead. When the link goes
//! idle the head HP packet is served, else the head LP packet; transmissions
//! are never preempted.

use std::collections::VecDeque;

use crate::error::SimError;
use crate::event::{EventKind, EventQueue, SimEvent};
use crate::eventlog::{LogAction, Trace};
use crate::metrics::RunMetrics;
use crate::packet::{Packet, PacketId, TrafficClass};
use crate::time::{service_time, Picos};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeParams {
    pub capacity_bps: u64,
    /// Fixed delay applied to every GST packet; must cover the largest SM
    /// serialization time so that an empty delay line is a safe gap.
    pub fdl_delay: Picos,
    pub buffer_capacity_bytes: u64,
    /// How many queued SM packets the gap test may look at (first fit).
    /// Depth 1 is plain head-of-line FIFO.
    pub scan_depth: usize,
}

#[derive(Clone, Copy, Debug)]
struct InFlight {
    packet: Packet,
    /// Delay recorded for the packet when transmission started.
    delay: Picos,
}

/// Output-link state. Completion records are a small FIFO, not a single
/// slot: when a delay-line exit coincides with a completion, the exit
/// dispatches first and starts the next transmission before the finished
/// packet's completion event is processed.
#[derive(Clone, Debug, Default)]
struct Link {
    busy_until: Picos,
    in_flight: VecDeque<InFlight>,
}

impl Link {
    fn is_idle_at(&self, t: Picos) -> bool {
        self.busy_until <= t
    }

    fn start(&mut self, t: Picos, service: Picos, packet: Packet, delay: Picos) {
        debug_assert!(self.is_idle_at(t));
        self.busy_until = t + service;
        self.in_flight.push_back(InFlight { packet, delay });
    }

    fn complete(&mut self, id: PacketId) -> Result<InFlight, SimError> {
        match self.in_flight.pop_front() {
            Some(f) if f.packet.id == id => Ok(f),
            _ => Err(SimError::TxStateMismatch { packet: id }),
        }
    }

    fn residual_class(&self) -> Option<TrafficClass> {
        self.in_flight.front().map(|f| f.packet.class)
    }
}

#[derive(Clone, Copy, Debug)]
struct FdlEntry {
    packet: Packet,
    exit_time: Picos,
}

#[derive(Debug)]
pub struct FusionNode {
    params: NodeParams,
    fdl: VecDeque<FdlEntry>,
    sm_queue: VecDeque<Packet>,
    occupancy_bytes: u64,
    link: Link,
}

impl FusionNode {
    pub fn new(params: NodeParams) -> Self {
        FusionNode {
            params,
            fdl: VecDeque::new(),
            sm_queue: VecDeque::new(),
            occupancy_bytes: 0,
            link: Link::default(),
        }
    }

    pub fn params(&self) -> &NodeParams {
        &self.params
    }

    /// GST entry: the packet goes onto the delay line and an exit is booked
    /// exactly one delay later. GST is never dropped.
    pub fn on_gst_arrival(
        &mut self,
        queue: &mut EventQueue,
        t: Picos,
        packet: Packet,
    ) -> Result<(), SimError> {
        let exit_time = t + self.params.fdl_delay;
        self.fdl.push_back(FdlEntry { packet, exit_time });
        queue.schedule(SimEvent {
            time: exit_time,
            kind: EventKind::FdlExit(packet.id),
        })
    }

    /// GST exit: the link must be idle here; the gap test guarantees it, so
    /// a busy link is an invariant violation, never a legal state.
    pub fn on_fdl_exit(
        &mut self,
        queue: &mut EventQueue,
        t: Picos,
        id: PacketId,
        metrics: &mut RunMetrics,
        trace: &mut Trace,
    ) -> Result<(), SimError> {
        let entry = self
            .fdl
            .pop_front()
            .ok_or(SimError::FdlEmpty { packet: id })?;
        if entry.packet.id != id {
            return Err(SimError::FdlOrderMismatch {
                expected: id,
                found: entry.packet.id,
            });
        }
        if !self.link.is_idle_at(t) {
            return Err(SimError::LinkBusyAtFdlExit {
                at_ps: t.as_ps(),
                busy_until_ps: self.link.busy_until.as_ps(),
            });
        }
        let delay = t
            .checked_sub(entry.packet.arrival)
            .ok_or(SimError::NegativeDelay {
                packet: id,
                at_ps: t.as_ps(),
                arrival_ps: entry.packet.arrival.as_ps(),
            })?;
        self.start_tx(queue, t, entry.packet, delay, metrics, trace)
    }

    /// SM entry: queue if the buffer has room, otherwise drop-tail; a packet
    /// landing on an idle link is considered for insertion immediately.
    pub fn on_sm_arrival(
        &mut self,
        queue: &mut EventQueue,
        t: Picos,
        packet: Packet,
        metrics: &mut RunMetrics,
        trace: &mut Trace,
    ) -> Result<(), SimError> {
        if self.occupancy_bytes + packet.length_bytes as u64 > self.params.buffer_capacity_bytes {
            metrics.class_mut(TrafficClass::Sm).record_drop();
            trace.record(
                t,
                LogAction::Drop,
                TrafficClass::Sm,
                packet.id,
                packet.length_bytes,
            );
            return Ok(());
        }
        self.occupancy_bytes += packet.length_bytes as u64;
        self.sm_queue.push_back(packet);
        if self.link.is_idle_at(t) {
            self.try_insert_sm(queue, t, metrics, trace)?;
        }
        Ok(())
    }

    /// Completion: the link goes idle and queued SM traffic is reconsidered.
    pub fn on_tx_complete(
        &mut self,
        queue: &mut EventQueue,
        t: Picos,
        id: PacketId,
        metrics: &mut RunMetrics,
        trace: &mut Trace,
    ) -> Result<(), SimError> {
        self.finish_tx(t, id, metrics, trace)?;
        if self.link.is_idle_at(t) {
            self.try_insert_sm(queue, t, metrics, trace)?;
        }
        Ok(())
    }

    /// Gap test. The gap is the span from `t` to the earliest pending
    /// delay-line exit, unbounded when the delay line is empty. The first
    /// fitting packet among the first `scan_depth` queued (head only by
    /// default) is inserted; otherwise nothing happens until the next
    /// completion or exit re-evaluates.
    fn try_insert_sm(
        &mut self,
        queue: &mut EventQueue,
        t: Picos,
        metrics: &mut RunMetrics,
        trace: &mut Trace,
    ) -> Result<bool, SimError> {
        debug_assert!(self.link.is_idle_at(t));
        let gap = self.fdl.front().map(|entry| entry.exit_time - t);
        let depth = self.params.scan_depth.max(1).min(self.sm_queue.len());
        let fit = (0..depth).find(|&i| {
            let service = service_time(self.sm_queue[i].length_bytes, self.params.capacity_bps);
            gap.is_none_or(|g| service <= g)
        });
        let Some(i) = fit else {
            return Ok(false);
        };
        let packet = self.sm_queue.remove(i).expect("index within queue");
        self.occupancy_bytes -= packet.length_bytes as u64;
        let waiting = t
            .checked_sub(packet.arrival)
            .ok_or(SimError::NegativeDelay {
                packet: packet.id,
                at_ps: t.as_ps(),
                arrival_ps: packet.arrival.as_ps(),
            })?;
        self.start_tx(queue, t, packet, waiting, metrics, trace)?;
        Ok(true)
    }

    fn start_tx(
        &mut self,
        queue: &mut EventQueue,
        t: Picos,
        packet: Packet,
        delay: Picos,
        metrics: &mut RunMetrics,
        trace: &mut Trace,
    ) -> Result<(), SimError> {
        let service = service_time(packet.length_bytes, self.params.capacity_bps);
        self.link.start(t, service, packet, delay);
        metrics.record_tx_start(service);
        trace.record(
            t,
            LogAction::TxStart,
            packet.class,
            packet.id,
            packet.length_bytes,
        );
        queue.schedule(SimEvent {
            time: self.link.busy_until,
            kind: EventKind::TxComplete(packet.id),
        })
    }

    fn finish_tx(
        &mut self,
        t: Picos,
        id: PacketId,
        metrics: &mut RunMetrics,
        trace: &mut Trace,
    ) -> Result<(), SimError> {
        let in_flight = self.link.complete(id)?;
        let packet = in_flight.packet;
        metrics
            .class_mut(packet.class)
            .record_delivery(in_flight.delay);
        trace.record(
            t,
            LogAction::TxDone,
            packet.class,
            packet.id,
            packet.length_bytes,
        );
        Ok(())
    }

    pub fn busy_until(&self) -> Picos {
        self.link.busy_until
    }

    pub fn occupancy_bytes(&self) -> u64 {
        self.occupancy_bytes
    }

    pub fn queued_sm(&self) -> usize {
        self.sm_queue.len()
    }

    /// The class of anything still buffered, delayed, or in flight.
    pub fn residual_class(&self) -> Option<TrafficClass> {
        if !self.fdl.is_empty() {
            return Some(TrafficClass::Gst);
        }
        if !self.sm_queue.is_empty() {
            return Some(TrafficClass::Sm);
        }
        self.link.residual_class()
    }

    #[cfg(test)]
    pub(crate) fn force_link_busy_until(&mut self, t: Picos) {
        self.link.busy_until = t;
    }
}

#[derive(Debug)]
pub struct StrictPriorityNode {
    params: NodeParams,
    hp_queue: VecDeque<Packet>,
    lp_queue: VecDeque<Packet>,
    occupancy_bytes: u64,
    link: Link,
}

impl StrictPriorityNode {
    pub fn new(params: NodeParams) -> Self {
        StrictPriorityNode {
            params,
            hp_queue: VecDeque::new(),
            lp_queue: VecDeque::new(),
            occupancy_bytes: 0,
            link: Link::default(),
        }
    }

    pub fn on_arrival(
        &mut self,
        queue: &mut EventQueue,
        t: Picos,
        packet: Packet,
        metrics: &mut RunMetrics,
        trace: &mut Trace,
    ) -> Result<(), SimError> {
        if self.occupancy_bytes + packet.length_bytes as u64 > self.params.buffer_capacity_bytes {
            metrics.class_mut(packet.class).record_drop();
            trace.record(
                t,
                LogAction::Drop,
                packet.class,
                packet.id,
                packet.length_bytes,
            );
            return Ok(());
        }
        self.occupancy_bytes += packet.length_bytes as u64;
        match packet.class {
            TrafficClass::Hp => self.hp_queue.push_back(packet),
            TrafficClass::Lp => self.lp_queue.push_back(packet),
            other => return Err(SimError::ClassModeMismatch { class: other }),
        }
        if self.link.is_idle_at(t) {
            self.start_next(queue, t, metrics, trace)?;
        }
        Ok(())
    }

    pub fn on_tx_complete(
        &mut self,
        queue: &mut EventQueue,
        t: Picos,
        id: PacketId,
        metrics: &mut RunMetrics,
        trace: &mut Trace,
    ) -> Result<(), SimError> {
        let in_flight = self.link.complete(id)?;
        let packet = in_flight.packet;
        metrics
            .class_mut(packet.class)
            .record_delivery(in_flight.delay);
        trace.record(
            t,
            LogAction::TxDone,
            packet.class,
            packet.id,
            packet.length_bytes,
        );
        self.start_next(queue, t, metrics, trace)
    }

    /// Serve the head HP packet if any, else the head LP packet. Whatever is
    /// started runs to completion; an HP packet arriving during an LP
    /// transmission simply waits.
    fn start_next(
        &mut self,
        queue: &mut EventQueue,
        t: Picos,
        metrics: &mut RunMetrics,
        trace: &mut Trace,
    ) -> Result<(), SimError> {
        debug_assert!(self.link.is_idle_at(t));
        let packet = match self
            .hp_queue
            .pop_front()
            .or_else(|| self.lp_queue.pop_front())
        {
            Some(p) => p,
            None => return Ok(()),
        };
        self.occupancy_bytes -= packet.length_bytes as u64;
        let waiting = t
            .checked_sub(packet.arrival)
            .ok_or(SimError::NegativeDelay {
                packet: packet.id,
                at_ps: t.as_ps(),
                arrival_ps: packet.arrival.as_ps(),
            })?;
        let service = service_time(packet.length_bytes, self.params.capacity_bps);
        self.link.start(t, service, packet, waiting);
        metrics.record_tx_start(service);
        trace.record(
            t,
            LogAction::TxStart,
            packet.class,
            packet.id,
            packet.length_bytes,
        );
        queue.schedule(SimEvent {
            time: self.link.busy_until,
            kind: EventKind::TxComplete(packet.id),
        })
    }

    pub fn busy_until(&self) -> Picos {
        self.link.busy_until
    }

    pub fn occupancy_bytes(&self) -> u64 {
        self.occupancy_bytes
    }

    pub fn residual_class(&self) -> Option<TrafficClass> {
        if !self.hp_queue.is_empty() {
            return Some(TrafficClass::Hp);
        }
        if !self.lp_queue.is_empty() {
            return Some(TrafficClass::Lp);
        }
        self.link.residual_class()
    }
}

/// The node under simulation, one of the two scheduler disciplines.
#[derive(Debug)]
pub enum Node {
    Fusion(FusionNode),
    Strict(StrictPriorityNode),
}

impl Node {
    pub fn busy_until(&self) -> Picos {
        match self {
            Node::Fusion(n) => n.busy_until(),
            Node::Strict(n) => n.busy_until(),
        }
    }

    pub fn occupancy_bytes(&self) -> u64 {
        match self {
            Node::Fusion(n) => n.occupancy_bytes(),
            Node::Strict(n) => n.occupancy_bytes(),
        }
    }

    pub fn residual_class(&self) -> Option<TrafficClass> {
        match self {
            Node::Fusion(n) => n.residual_class(),
            Node::Strict(n) => n.residual_class(),
        }
    }
}
