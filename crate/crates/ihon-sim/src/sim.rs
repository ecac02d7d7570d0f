//! One sub-simulation: sources feed the node through the event queue until
//! every enabled class has generated its target packet count and the system
//! has drained.
//!
//! The run is strictly single-threaded and deterministic: one seed fixes
//! the entire event sequence bit-exactly. The generation window closes at
//! the final arrival; utilization is measured inside it so the drain tail
//! does not dilute the figure.

use std::collections::VecDeque;

use crate::config::{RunConfig, SchedulerMode};
use crate::error::SimError;
use crate::event::{EventKind, EventQueue, SimEvent};
use crate::eventlog::{LogAction, LogRecord, Trace};
use crate::metrics::RunMetrics;
use crate::node::{FusionNode, Node, StrictPriorityNode};
use crate::packet::{Packet, PacketId, TrafficClass};
use crate::rng::RngStream;
use crate::time::Picos;
use crate::traffic::{ArrivalProcess, LengthModel, TrafficSpec};

/// Result of one sub-simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct SimOutput {
    pub metrics: RunMetrics,
    pub log: Option<Vec<LogRecord>>,
}

/// A hand-written arrival for scenario tests and replays.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScriptedArrival {
    pub at: Picos,
    pub class: TrafficClass,
    pub length_bytes: u32,
}

enum Source {
    Random {
        process: ArrivalProcess,
        /// Arrivals not yet scheduled.
        remaining: u64,
        /// Body of the arrival currently in the event queue.
        pending: Option<(u32, u32)>,
    },
    Script {
        /// (length, interface) bodies in arrival-time order.
        bodies: VecDeque<(u32, u32)>,
    },
}

impl Source {
    fn take_pending(&mut self) -> (u32, u32) {
        match self {
            Source::Random { pending, .. } => pending
                .take()
                .expect("arrival dispatched without a pending body"),
            Source::Script { bodies } => bodies
                .pop_front()
                .expect("arrival dispatched without a scripted body"),
        }
    }

    fn schedule_next(
        &mut self,
        queue: &mut EventQueue,
        now: Picos,
        class: TrafficClass,
    ) -> Result<(), SimError> {
        if let Source::Random {
            process,
            remaining,
            pending,
        } = self
        {
            if *remaining > 0 {
                *remaining -= 1;
                let (spacing, length, iface) = process.next_arrival();
                *pending = Some((length, iface));
                queue.schedule(SimEvent {
                    time: now + spacing,
                    kind: EventKind::Arrival(class),
                })?;
            }
        }
        Ok(())
    }
}

/// Run one seeded sub-simulation of `config` to completion.
///
/// Generation per enabled class stops at `config.n_packets`; the run then
/// drains until the event queue is empty. A queue that empties earlier, or
/// any packet left in the node afterwards, halts with a diagnostic.
pub fn run_seed(config: &RunConfig, seed: u64, capture_log: bool) -> Result<SimOutput, SimError> {
    let mut sources: [Option<Source>; 4] = Default::default();
    let mut queue = EventQueue::new();
    let mut outstanding: u64 = 0;

    let class_specs: [(TrafficClass, f64, LengthModel, u32); 2] = match config.scheduler_mode {
        SchedulerMode::Fusion => [
            (
                TrafficClass::Gst,
                config.gst_load,
                LengthModel::Deterministic(config.gst_length_bytes),
                1,
            ),
            (
                TrafficClass::Sm,
                config.sm_load,
                LengthModel::UniformInt {
                    lo: config.sm_length_min_bytes,
                    hi: config.sm_length_max_bytes,
                },
                config.n_interfaces,
            ),
        ],
        SchedulerMode::StrictPriority => [
            (
                TrafficClass::Hp,
                config.gst_load,
                LengthModel::Deterministic(config.gst_length_bytes),
                1,
            ),
            (
                TrafficClass::Lp,
                config.sm_load,
                LengthModel::Deterministic(config.lp_length_bytes),
                1,
            ),
        ],
    };

    for (class, load, length, n_interfaces) in class_specs {
        if load == 0.0 || config.n_packets == 0 {
            continue;
        }
        let process = ArrivalProcess::new(
            TrafficSpec {
                class,
                load,
                length,
                n_interfaces,
            },
            config.link_capacity_bps,
            RngStream::substream(seed, class.index() as u64),
        )?;
        let mut source = Source::Random {
            process,
            remaining: config.n_packets,
            pending: None,
        };
        source.schedule_next(&mut queue, Picos::ZERO, class)?;
        outstanding += config.n_packets;
        sources[class.index()] = Some(source);
    }

    drive(config, sources, queue, outstanding, capture_log)
}

/// Run the node against a fixed arrival script instead of random sources.
pub fn run_scripted(
    config: &RunConfig,
    arrivals: &[ScriptedArrival],
    capture_log: bool,
) -> Result<SimOutput, SimError> {
    let mut sorted: Vec<ScriptedArrival> = arrivals.to_vec();
    sorted.sort_by_key(|a| a.at);

    let mut sources: [Option<Source>; 4] = Default::default();
    let mut queue = EventQueue::new();
    for arrival in &sorted {
        let valid = match config.scheduler_mode {
            SchedulerMode::Fusion => {
                matches!(arrival.class, TrafficClass::Gst | TrafficClass::Sm)
            }
            SchedulerMode::StrictPriority => {
                matches!(arrival.class, TrafficClass::Hp | TrafficClass::Lp)
            }
        };
        if !valid {
            return Err(SimError::ClassModeMismatch {
                class: arrival.class,
            });
        }
        let slot = &mut sources[arrival.class.index()];
        let source = slot.get_or_insert_with(|| Source::Script {
            bodies: VecDeque::new(),
        });
        if let Source::Script { bodies } = source {
            bodies.push_back((arrival.length_bytes, 0));
        }
        queue.schedule(SimEvent {
            time: arrival.at,
            kind: EventKind::Arrival(arrival.class),
        })?;
    }

    drive(config, sources, queue, sorted.len() as u64, capture_log)
}

fn drive(
    config: &RunConfig,
    mut sources: [Option<Source>; 4],
    mut queue: EventQueue,
    mut outstanding: u64,
    capture_log: bool,
) -> Result<SimOutput, SimError> {
    let params = config.node_params();
    let mut node = match config.scheduler_mode {
        SchedulerMode::Fusion => Node::Fusion(FusionNode::new(params)),
        SchedulerMode::StrictPriority => Node::Strict(StrictPriorityNode::new(params)),
    };
    let mut metrics = RunMetrics::new();
    let mut trace = Trace::new(capture_log);
    let mut next_id: PacketId = 0;

    while let Some(event) = queue.pop() {
        let t = event.time;
        match event.kind {
            EventKind::Arrival(class) => {
                let source = sources[class.index()]
                    .as_mut()
                    .expect("arrival event without a source");
                let (length_bytes, source_interface) = source.take_pending();
                let packet = Packet {
                    id: next_id,
                    class,
                    length_bytes,
                    arrival: t,
                    source_interface,
                };
                next_id += 1;
                metrics.class_mut(class).record_arrival(t, length_bytes);
                trace.record(t, LogAction::Arrive, class, packet.id, length_bytes);
                outstanding -= 1;
                if outstanding == 0 {
                    // Generation is complete; the offered-load window closes
                    // here, before this packet can start transmitting.
                    metrics.freeze_window(t, node.busy_until());
                }
                source.schedule_next(&mut queue, t, class)?;
                match (&mut node, class) {
                    (Node::Fusion(n), TrafficClass::Gst) => {
                        n.on_gst_arrival(&mut queue, t, packet)?
                    }
                    (Node::Fusion(n), TrafficClass::Sm) => {
                        n.on_sm_arrival(&mut queue, t, packet, &mut metrics, &mut trace)?
                    }
                    (Node::Strict(n), TrafficClass::Hp | TrafficClass::Lp) => {
                        n.on_arrival(&mut queue, t, packet, &mut metrics, &mut trace)?
                    }
                    _ => return Err(SimError::ClassModeMismatch { class }),
                }
            }
            EventKind::FdlExit(id) => match &mut node {
                Node::Fusion(n) => n.on_fdl_exit(&mut queue, t, id, &mut metrics, &mut trace)?,
                Node::Strict(_) => return Err(SimError::TxStateMismatch { packet: id }),
            },
            EventKind::TxComplete(id) => match &mut node {
                Node::Fusion(n) => n.on_tx_complete(&mut queue, t, id, &mut metrics, &mut trace)?,
                Node::Strict(n) => n.on_tx_complete(&mut queue, t, id, &mut metrics, &mut trace)?,
            },
        }
    }

    // The queue is empty: every source must have generated its target and
    // the node must be drained, or the wiring is broken.
    if outstanding > 0 {
        for class in TrafficClass::ALL {
            if let Some(Source::Random {
                remaining, pending, ..
            }) = &sources[class.index()]
            {
                if *remaining > 0 || pending.is_some() {
                    return Err(SimError::StalledBeforeTarget {
                        class,
                        generated: metrics.class(class).generated(),
                        target: config.n_packets,
                    });
                }
            }
        }
    }
    if let Some(class) = node.residual_class() {
        return Err(SimError::ResidualAfterDrain { class });
    }
    for class in TrafficClass::ALL {
        let m = metrics.class(class);
        if m.generated() != m.delivered() + m.dropped() {
            return Err(SimError::ConservationViolated {
                class,
                generated: m.generated(),
                delivered: m.delivered(),
                dropped: m.dropped(),
            });
        }
    }
    metrics.set_end_time(queue.now());

    Ok(SimOutput {
        metrics,
        log: trace.into_records(),
    })
}
