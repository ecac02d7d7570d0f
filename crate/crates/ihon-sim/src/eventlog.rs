//! Optional per-run event log.
//!
//! One record per observable node event, in dispatch order: arrivals, drops,
//! transmission starts, transmission completions. The log carries enough to
//! recompute every reported metric by an independent pass, which is how the
//! audit tests cross-check the incremental collectors.

use std::fmt;

use thiserror::Error;

use crate::packet::{PacketId, TrafficClass};
use crate::time::Picos;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogAction {
    Arrive,
    Drop,
    TxStart,
    TxDone,
}

impl LogAction {
    fn label(self) -> &'static str {
        match self {
            LogAction::Arrive => "arrive",
            LogAction::Drop => "drop",
            LogAction::TxStart => "tx_start",
            LogAction::TxDone => "tx_done",
        }
    }

    fn from_label(s: &str) -> Option<LogAction> {
        match s {
            "arrive" => Some(LogAction::Arrive),
            "drop" => Some(LogAction::Drop),
            "tx_start" => Some(LogAction::TxStart),
            "tx_done" => Some(LogAction::TxDone),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LogRecord {
    pub time: Picos,
    pub action: LogAction,
    pub class: TrafficClass,
    pub packet: PacketId,
    pub length_bytes: u32,
}

#[derive(Debug, Error, PartialEq)]
#[error("malformed event-log line: {0}")]
pub struct LogParseError(String);

impl LogRecord {
    /// Parse one rendered line back into a record.
    pub fn parse(line: &str) -> Result<LogRecord, LogParseError> {
        let err = || LogParseError(line.to_string());
        let mut fields = line.split_whitespace();
        let time = Picos::from_ps(fields.next().ok_or_else(err)?.parse().map_err(|_| err())?);
        let action = LogAction::from_label(fields.next().ok_or_else(err)?).ok_or_else(err)?;
        let class = TrafficClass::from_label(fields.next().ok_or_else(err)?).ok_or_else(err)?;
        let packet = fields.next().ok_or_else(err)?.parse().map_err(|_| err())?;
        let length_bytes = fields.next().ok_or_else(err)?.parse().map_err(|_| err())?;
        if fields.next().is_some() {
            return Err(err());
        }
        Ok(LogRecord {
            time,
            action,
            class,
            packet,
            length_bytes,
        })
    }
}

impl fmt::Display for LogRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {} {}",
            self.time.as_ps(),
            self.action.label(),
            self.class.label(),
            self.packet,
            self.length_bytes
        )
    }
}

/// Recording sink handed through the node handlers; a disabled trace is a
/// no-op so full-size runs pay nothing for it.
#[derive(Debug, Default)]
pub struct Trace {
    records: Option<Vec<LogRecord>>,
}

impl Trace {
    pub fn new(enabled: bool) -> Self {
        Trace {
            records: enabled.then(Vec::new),
        }
    }

    pub fn record(
        &mut self,
        time: Picos,
        action: LogAction,
        class: TrafficClass,
        packet: PacketId,
        length_bytes: u32,
    ) {
        if let Some(records) = &mut self.records {
            records.push(LogRecord {
                time,
                action,
                class,
                packet,
                length_bytes,
            });
        }
    }

    pub fn into_records(self) -> Option<Vec<LogRecord>> {
        self.records
    }
}
