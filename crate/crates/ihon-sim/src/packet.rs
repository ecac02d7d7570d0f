//! Traffic classes and the packet record that flows through the node.

use crate::time::Picos;

pub type PacketId = u64;

/// The four traffic classes. GST/SM belong to the fusion-node scheduler,
/// HP/LP to the strict-priority Ethernet-switch comparison mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TrafficClass {
    Gst,
    Sm,
    Hp,
    Lp,
}

impl TrafficClass {
    pub const ALL: [TrafficClass; 4] = [
        TrafficClass::Gst,
        TrafficClass::Sm,
        TrafficClass::Hp,
        TrafficClass::Lp,
    ];

    pub fn label(self) -> &'static str {
        match self {
            TrafficClass::Gst => "gst",
            TrafficClass::Sm => "sm",
            TrafficClass::Hp => "hp",
            TrafficClass::Lp => "lp",
        }
    }

    pub fn from_label(s: &str) -> Option<TrafficClass> {
        match s {
            "gst" => Some(TrafficClass::Gst),
            "sm" => Some(TrafficClass::Sm),
            "hp" => Some(TrafficClass::Hp),
            "lp" => Some(TrafficClass::Lp),
            _ => None,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            TrafficClass::Gst => 0,
            TrafficClass::Sm => 1,
            TrafficClass::Hp => 2,
            TrafficClass::Lp => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Packet {
    pub id: PacketId,
    pub class: TrafficClass,
    pub length_bytes: u32,
    pub arrival: Picos,
    /// Ingress interface tag, round-robin over the configured SM interface
    /// count. Bookkeeping only; it has no queuing effect.
    pub source_interface: u32,
}
