use thiserror::Error;

use crate::packet::{PacketId, TrafficClass};
use crate::rng::SampleError;

/// Fatal simulation failures. Scheduling into the past, or finding the
/// output link busy when a GST packet leaves the delay line, are scheduler
/// bugs rather than legal outcomes, so the run halts instead of continuing
/// with corrupt state.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("event scheduled at {event_ps} ps is before the clock at {now_ps} ps")]
    RetroSchedule { event_ps: u64, now_ps: u64 },

    #[error("output link busy until {busy_until_ps} ps when a GST packet exits the delay line at {at_ps} ps")]
    LinkBusyAtFdlExit { at_ps: u64, busy_until_ps: u64 },

    #[error("delay-line exit for packet {expected} observed packet {found} at the head")]
    FdlOrderMismatch { expected: PacketId, found: PacketId },

    #[error("delay-line exit for packet {packet} with an empty delay line")]
    FdlEmpty { packet: PacketId },

    #[error("tx completion for packet {packet} does not match the transmission in flight")]
    TxStateMismatch { packet: PacketId },

    #[error("event queue drained before the {} source reached its target: {generated} of {target} generated", class.label())]
    StalledBeforeTarget {
        class: TrafficClass,
        generated: u64,
        target: u64,
    },

    #[error("{} packets remain in the node after drain", class.label())]
    ResidualAfterDrain { class: TrafficClass },

    #[error("{} conservation broken: generated {generated} != delivered {delivered} + dropped {dropped}", class.label())]
    ConservationViolated {
        class: TrafficClass,
        generated: u64,
        delivered: u64,
        dropped: u64,
    },

    #[error("packet {packet} handled at {at_ps} ps before its arrival at {arrival_ps} ps")]
    NegativeDelay {
        packet: PacketId,
        at_ps: u64,
        arrival_ps: u64,
    },

    #[error("{} arrivals are not valid under the configured scheduler mode", class.label())]
    ClassModeMismatch { class: TrafficClass },

    #[error(transparent)]
    Sample(#[from] SampleError),

    #[error(transparent)]
    Traffic(#[from] crate::traffic::TrafficError),

    #[error("{message}")]
    Config { message: String },
}
