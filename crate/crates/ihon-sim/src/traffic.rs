//! Arrival processes for the four traffic classes.
//!
//! GST and HP model a circuit-like stream already serialized on one input
//! wavelength: consecutive packets are separated by at least one packet
//! serialization time, and only the idle gap on top of it is exponential.
//! With service time `s` and offered load `L`, the gap mean is
//! `s * (1/L - 1)`, so the mean spacing is `s / L` and the long-run offered
//! load converges to `L` without ever overlapping arrivals.
//!
//! SM and LP are plain Poisson processes: exponential inter-arrival with
//! mean `E[len] * 8 / (capacity * L)`, lengths drawn per packet.

use thiserror::Error;

use crate::packet::TrafficClass;
use crate::rng::RngStream;
use crate::time::{service_time, Picos};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrafficError {
    #[error("{} load must lie in (0, 1), got {load}", class.label())]
    InvalidLoad { class: TrafficClass, load: f64 },
    #[error("{} packet length must be deterministic", class.label())]
    LengthModelMismatch { class: TrafficClass },
    #[error("length range is empty: lo {lo} > hi {hi}")]
    EmptyLengthRange { lo: u32, hi: u32 },
    #[error("packet length must be positive")]
    ZeroLength,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LengthModel {
    Deterministic(u32),
    UniformInt { lo: u32, hi: u32 },
}

impl LengthModel {
    pub fn mean_bytes(self) -> f64 {
        match self {
            LengthModel::Deterministic(b) => b as f64,
            LengthModel::UniformInt { lo, hi } => (lo as f64 + hi as f64) / 2.0,
        }
    }

    pub fn max_bytes(self) -> u32 {
        match self {
            LengthModel::Deterministic(b) => b,
            LengthModel::UniformInt { hi, .. } => hi,
        }
    }

    fn validate(self) -> Result<(), TrafficError> {
        match self {
            LengthModel::Deterministic(0) => Err(TrafficError::ZeroLength),
            LengthModel::Deterministic(_) => Ok(()),
            LengthModel::UniformInt { lo, hi } if lo > hi => {
                Err(TrafficError::EmptyLengthRange { lo, hi })
            }
            LengthModel::UniformInt { lo: 0, .. } => Err(TrafficError::ZeroLength),
            LengthModel::UniformInt { .. } => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TrafficSpec {
    pub class: TrafficClass,
    /// Offered load as a fraction of the output-port capacity.
    pub load: f64,
    pub length: LengthModel,
    /// Ingress interfaces feeding the class; round-robin tag only.
    pub n_interfaces: u32,
}

/// Stateful per-source arrival generator. One instance per enabled class,
/// each with its own random stream.
#[derive(Debug)]
pub struct ArrivalProcess {
    spec: TrafficSpec,
    stream: RngStream,
    /// Shift applied to every spacing for serialized (GST/HP) sources.
    shift: Picos,
    /// Mean of the exponential part of the spacing, in seconds.
    exp_mean_secs: f64,
    iface_cursor: u32,
}

impl ArrivalProcess {
    pub fn new(
        spec: TrafficSpec,
        capacity_bps: u64,
        stream: RngStream,
    ) -> Result<Self, TrafficError> {
        if !(spec.load > 0.0 && spec.load < 1.0) {
            return Err(TrafficError::InvalidLoad {
                class: spec.class,
                load: spec.load,
            });
        }
        spec.length.validate()?;
        let serialized = matches!(spec.class, TrafficClass::Gst | TrafficClass::Hp);
        if serialized && !matches!(spec.length, LengthModel::Deterministic(_)) {
            return Err(TrafficError::LengthModelMismatch { class: spec.class });
        }
        if spec.class == TrafficClass::Lp && !matches!(spec.length, LengthModel::Deterministic(_)) {
            return Err(TrafficError::LengthModelMismatch { class: spec.class });
        }

        let mean_service_secs = spec.length.mean_bytes() * 8.0 / capacity_bps as f64;
        let (shift, exp_mean_secs) = if serialized {
            let bytes = spec.length.max_bytes();
            (
                service_time(bytes, capacity_bps),
                mean_service_secs * (1.0 / spec.load - 1.0),
            )
        } else {
            (Picos::ZERO, mean_service_secs / spec.load)
        };
        Ok(ArrivalProcess {
            spec,
            stream,
            shift,
            exp_mean_secs,
            iface_cursor: 0,
        })
    }

    pub fn class(&self) -> TrafficClass {
        self.class_spec().class
    }

    pub fn class_spec(&self) -> &TrafficSpec {
        &self.spec
    }

    /// Spacing to the next packet, its length, and its interface tag.
    pub fn next_arrival(&mut self) -> (Picos, u32, u32) {
        let gap = Picos::from_secs_f64(
            self.stream
                .exp(self.exp_mean_secs)
                .expect("mean validated at construction"),
        );
        let spacing = self.shift + gap;
        let length = match self.spec.length {
            LengthModel::Deterministic(b) => b,
            LengthModel::UniformInt { lo, hi } => self
                .stream
                .uniform_int(lo, hi)
                .expect("range validated at construction"),
        };
        let iface = self.iface_cursor;
        self.iface_cursor = (self.iface_cursor + 1) % self.spec.n_interfaces.max(1);
        (spacing, length, iface)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAP: u64 = 10_000_000_000;

    fn process(class: TrafficClass, load: f64, length: LengthModel) -> ArrivalProcess {
        ArrivalProcess::new(
            TrafficSpec {
                class,
                load,
                length,
                n_interfaces: 10,
            },
            CAP,
            RngStream::substream(907, class.index() as u64),
        )
        .unwrap()
    }

    /// Offered load measured as transmitted bits over the span to the last
    /// arrival, the independent oracle for the load calibration.
    fn measured_load(proc: &mut ArrivalProcess, n: u64) -> f64 {
        let mut t = Picos::ZERO;
        let mut bits = 0u128;
        for _ in 0..n {
            let (gap, len, _) = proc.next_arrival();
            t += gap;
            bits += len as u128 * 8;
        }
        bits as f64 / (CAP as f64 * t.as_secs_f64())
    }

    #[test]
    fn gst_service_time_is_exact() {
        // 1200 bytes at 10 Gb/s serialize in 0.96 us.
        assert_eq!(service_time(1200, CAP).as_ps(), 960_000);
    }

    #[test]
    fn gst_load_converges_and_never_overlaps() {
        let mut p = process(TrafficClass::Gst, 0.5, LengthModel::Deterministic(1200));
        let mut min_gap = u64::MAX;
        let mut sum = 0u128;
        let n = 100_000;
        for _ in 0..n {
            let (gap, len, _) = p.next_arrival();
            assert_eq!(len, 1200);
            min_gap = min_gap.min(gap.as_ps());
            sum += gap.as_ps() as u128;
        }
        // Serialization property: spacing never below the service time.
        assert!(min_gap >= 960_000, "min spacing {min_gap} ps");
        // Mean spacing s / L = 1.92 us within 1%.
        let mean_us = sum as f64 / n as f64 / 1e6;
        assert!(
            (mean_us - 1.92).abs() / 1.92 < 0.01,
            "mean spacing {mean_us} us"
        );

        let mut p = process(TrafficClass::Gst, 0.5, LengthModel::Deterministic(1200));
        let load = measured_load(&mut p, 100_000);
        assert!((load - 0.5).abs() < 0.01, "measured load {load}");
    }

    #[test]
    fn gst_near_unit_load_degenerates_to_back_to_back() {
        let mut p = process(TrafficClass::Gst, 0.9999, LengthModel::Deterministic(1200));
        let mut sum = 0u128;
        let n = 20_000;
        for _ in 0..n {
            let (gap, _, _) = p.next_arrival();
            assert!(gap.as_ps() >= 960_000);
            sum += gap.as_ps() as u128;
        }
        let mean_ps = sum as f64 / n as f64;
        // The exponential part has mean s * (1/L - 1) ~ 0.1 ns; spacing is
        // essentially the bare service time.
        assert!(
            (mean_ps - 960_000.0) / 960_000.0 < 0.001,
            "mean {mean_ps} ps"
        );
    }

    #[test]
    fn sm_interarrival_means() {
        // E[len] = 770 bytes: mean spacing 770*8/(1e10*0.3) = 2.0533 us.
        let p = process(
            TrafficClass::Sm,
            0.3,
            LengthModel::UniformInt { lo: 40, hi: 1500 },
        );
        assert!((p.exp_mean_secs - 2.0533e-6).abs() < 1e-10);
        let p = process(
            TrafficClass::Sm,
            0.1,
            LengthModel::UniformInt { lo: 40, hi: 1500 },
        );
        assert!((p.exp_mean_secs - 6.16e-6).abs() < 1e-10);
    }

    #[test]
    fn sm_load_converges_and_lengths_stay_in_range() {
        let mut p = process(
            TrafficClass::Sm,
            0.3,
            LengthModel::UniformInt { lo: 40, hi: 1500 },
        );
        for _ in 0..100_000 {
            let (_, len, _) = p.next_arrival();
            assert!((40..=1500).contains(&len));
        }
        let mut p = process(
            TrafficClass::Sm,
            0.3,
            LengthModel::UniformInt { lo: 40, hi: 1500 },
        );
        let load = measured_load(&mut p, 100_000);
        assert!((load - 0.3).abs() < 0.01, "measured load {load}");
    }

    #[test]
    fn hp_matches_gst_construction() {
        let p = process(TrafficClass::Hp, 0.5, LengthModel::Deterministic(1200));
        assert_eq!(p.shift.as_ps(), 960_000);
        // Mean spacing = shift + exp mean = 0.96 + 0.96 = 1.92 us.
        assert!((p.exp_mean_secs - 0.96e-6).abs() < 1e-12);
        let mut p = process(TrafficClass::Hp, 0.5, LengthModel::Deterministic(1200));
        let load = measured_load(&mut p, 100_000);
        assert!((load - 0.5).abs() < 0.01, "measured load {load}");
    }

    #[test]
    fn lp_is_plain_exponential() {
        // 1500 bytes at load 0.3: mean spacing 1500*8/(1e10*0.3) = 4.0 us.
        let p = process(TrafficClass::Lp, 0.3, LengthModel::Deterministic(1500));
        assert_eq!(p.shift, Picos::ZERO);
        assert!((p.exp_mean_secs - 4.0e-6).abs() < 1e-12);
        let mut p = process(TrafficClass::Lp, 0.3, LengthModel::Deterministic(1500));
        let load = measured_load(&mut p, 100_000);
        assert!((load - 0.3).abs() < 0.01, "measured load {load}");
    }

    #[test]
    fn loads_outside_unit_interval_are_rejected() {
        for load in [0.0, 1.0, 1.5, -0.2] {
            let err = ArrivalProcess::new(
                TrafficSpec {
                    class: TrafficClass::Gst,
                    load,
                    length: LengthModel::Deterministic(1200),
                    n_interfaces: 1,
                },
                CAP,
                RngStream::new(1),
            )
            .unwrap_err();
            assert_eq!(
                err,
                TrafficError::InvalidLoad {
                    class: TrafficClass::Gst,
                    load
                }
            );
        }
    }

    #[test]
    fn serialized_classes_require_deterministic_length() {
        let err = ArrivalProcess::new(
            TrafficSpec {
                class: TrafficClass::Hp,
                load: 0.5,
                length: LengthModel::UniformInt { lo: 40, hi: 1500 },
                n_interfaces: 1,
            },
            CAP,
            RngStream::new(1),
        )
        .unwrap_err();
        assert_eq!(
            err,
            TrafficError::LengthModelMismatch {
                class: TrafficClass::Hp
            }
        );
    }

    #[test]
    fn interface_tags_round_robin() {
        let mut p = process(
            TrafficClass::Sm,
            0.3,
            LengthModel::UniformInt { lo: 40, hi: 1500 },
        );
        let tags: Vec<u32> = (0..12).map(|_| p.next_arrival().2).collect();
        assert_eq!(tags, vec![0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 0, 1]);
    }
}
