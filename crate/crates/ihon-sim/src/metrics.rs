//! Per-class delivery counters, delay statistics, and multi-seed aggregation.
//!
//! Delay bookkeeping is integer picoseconds end to end; floating point only
//! appears in derived per-seed values (means, ratios) and their cross-seed
//! summaries. PDV follows the minimum-delay reference: the headline value is
//! peak-to-peak (max - min) and `pdv_mean` (mean - min) is carried alongside.

use crate::packet::TrafficClass;
use crate::time::Picos;

/// Counters and delay statistics for one traffic class in one run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClassMetrics {
    generated: u64,
    delivered: u64,
    dropped: u64,
    bits_offered: u128,
    last_arrival: Option<Picos>,
    sum_delay_ps: u128,
    min_delay: Option<Picos>,
    max_delay: Option<Picos>,
}

impl ClassMetrics {
    pub fn record_arrival(&mut self, t: Picos, length_bytes: u32) {
        self.generated += 1;
        self.bits_offered += length_bytes as u128 * 8;
        self.last_arrival = Some(t);
    }

    pub fn record_drop(&mut self) {
        self.dropped += 1;
    }

    pub fn record_delivery(&mut self, delay: Picos) {
        self.delivered += 1;
        self.sum_delay_ps += delay.as_ps() as u128;
        self.min_delay = Some(self.min_delay.map_or(delay, |m| m.min(delay)));
        self.max_delay = Some(self.max_delay.map_or(delay, |m| m.max(delay)));
    }

    pub fn generated(&self) -> u64 {
        self.generated
    }

    pub fn delivered(&self) -> u64 {
        self.delivered
    }

    pub fn dropped(&self) -> u64 {
        self.dropped
    }

    pub fn sum_delay_ps(&self) -> u128 {
        self.sum_delay_ps
    }

    pub fn min_delay(&self) -> Option<Picos> {
        self.min_delay
    }

    pub fn max_delay(&self) -> Option<Picos> {
        self.max_delay
    }

    pub fn mean_delay_ps(&self) -> Option<f64> {
        (self.delivered > 0).then(|| self.sum_delay_ps as f64 / self.delivered as f64)
    }

    /// Peak-to-peak delay variation against the minimum-delay reference.
    /// `None` until at least one delivery ("no data").
    pub fn pdv(&self) -> Option<Picos> {
        Some(self.max_delay? - self.min_delay?)
    }

    /// Mean of (delay - minimum delay), in picoseconds.
    pub fn pdv_mean_ps(&self) -> Option<f64> {
        Some(self.mean_delay_ps()? - self.min_delay?.as_ps() as f64)
    }

    /// Dropped / generated. `None` until at least one packet was generated.
    pub fn plr(&self) -> Option<f64> {
        (self.generated > 0).then(|| self.dropped as f64 / self.generated as f64)
    }

    /// Offered load at the node input: generated bits over the span from
    /// time zero to the last arrival.
    pub fn offered_load(&self, capacity_bps: u64) -> Option<f64> {
        let span = self.last_arrival?;
        (span > Picos::ZERO)
            .then(|| self.bits_offered as f64 / (capacity_bps as f64 * span.as_secs_f64()))
    }

    pub fn last_arrival(&self) -> Option<Picos> {
        self.last_arrival
    }
}

/// All per-class metrics of one run plus output-link utilization tracking.
///
/// Utilization is busy time over the generation window [0, last arrival]:
/// transmissions that start after every source has finished belong to the
/// drain tail and are excluded, so the figure reflects wavelength usage
/// while traffic was actually offered.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunMetrics {
    classes: [ClassMetrics; 4],
    busy_in_window_ps: u128,
    window_end: Option<Picos>,
    end_time: Picos,
}

impl RunMetrics {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn class(&self, class: TrafficClass) -> &ClassMetrics {
        &self.classes[class.index()]
    }

    pub fn class_mut(&mut self, class: TrafficClass) -> &mut ClassMetrics {
        &mut self.classes[class.index()]
    }

    pub(crate) fn record_tx_start(&mut self, service: Picos) {
        if self.window_end.is_none() {
            self.busy_in_window_ps += service.as_ps() as u128;
        }
    }

    /// Close the generation window at `end`. Any transmission still in
    /// flight keeps only the part before `end`.
    pub(crate) fn freeze_window(&mut self, end: Picos, busy_until: Picos) {
        if self.window_end.is_some() {
            return;
        }
        if busy_until > end {
            self.busy_in_window_ps -= (busy_until - end).as_ps() as u128;
        }
        self.window_end = Some(end);
    }

    pub(crate) fn set_end_time(&mut self, end: Picos) {
        self.end_time = end;
    }

    pub fn window_end(&self) -> Option<Picos> {
        self.window_end
    }

    /// Drain end: the time of the last dispatched event.
    pub fn end_time(&self) -> Picos {
        self.end_time
    }

    pub fn busy_in_window_ps(&self) -> u128 {
        self.busy_in_window_ps
    }

    /// Output-link utilization over the generation window.
    pub fn utilization(&self) -> Option<f64> {
        let window = self.window_end?;
        (window > Picos::ZERO).then(|| self.busy_in_window_ps as f64 / window.as_ps() as f64)
    }
}

/// Result of one sub-simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedRun {
    pub seed: u64,
    pub metrics: RunMetrics,
}

/// Cross-seed mean and sample standard deviation of one derived metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanStd {
    pub mean: f64,
    pub stddev: f64,
}

/// Cross-seed mean and sample standard deviation over `values`.
/// A single observation carries no spread information; its stddev is 0.
pub fn mean_and_sample_stddev(values: &[f64]) -> Option<MeanStd> {
    if values.is_empty() {
        return None;
    }
    // A constant sample has mean equal to that constant and zero spread;
    // short-circuit so float accumulation cannot blur exact-by-construction
    // metrics like the GST delay.
    let first = values[0];
    if values.iter().all(|v| *v == first) {
        return Some(MeanStd {
            mean: first,
            stddev: 0.0,
        });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let stddev = if values.len() < 2 {
        0.0
    } else {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1.0)).sqrt()
    };
    Some(MeanStd { mean, stddev })
}

/// Per-class cross-seed summary. Counts are totals over all seeds; derived
/// metrics are summarized in microseconds (delays) or ratios.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClassSummary {
    pub generated: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub latency_mean_us: Option<MeanStd>,
    pub latency_min_us: Option<MeanStd>,
    pub latency_max_us: Option<MeanStd>,
    pub pdv_us: Option<MeanStd>,
    pub pdv_mean_us: Option<MeanStd>,
    pub plr: Option<MeanStd>,
    pub offered_load: Option<MeanStd>,
}

/// One batch: every per-seed result plus the cross-seed summaries.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchSummary {
    pub runs: Vec<SeedRun>,
    classes: [ClassSummary; 4],
    pub utilization: Option<MeanStd>,
}

impl BatchSummary {
    pub fn class(&self, class: TrafficClass) -> &ClassSummary {
        &self.classes[class.index()]
    }
}

fn collect<F: Fn(&RunMetrics) -> Option<f64>>(runs: &[SeedRun], f: F) -> Option<MeanStd> {
    let values: Vec<f64> = runs.iter().filter_map(|r| f(&r.metrics)).collect();
    mean_and_sample_stddev(&values)
}

/// Fold per-seed results into a batch summary. Every listed seed keeps its
/// own entry in `runs`; derived metrics are averaged across seeds.
pub fn aggregate(runs: Vec<SeedRun>, capacity_bps: u64) -> BatchSummary {
    const US: f64 = 1e6; // picoseconds per microsecond

    let mut classes: [ClassSummary; 4] = Default::default();
    for tc in TrafficClass::ALL {
        let i = tc.index();
        classes[i].generated = runs.iter().map(|r| r.metrics.class(tc).generated()).sum();
        classes[i].delivered = runs.iter().map(|r| r.metrics.class(tc).delivered()).sum();
        classes[i].dropped = runs.iter().map(|r| r.metrics.class(tc).dropped()).sum();
        classes[i].latency_mean_us =
            collect(&runs, |m| m.class(tc).mean_delay_ps().map(|v| v / US));
        classes[i].latency_min_us = collect(&runs, |m| {
            m.class(tc).min_delay().map(|v| v.as_micros_f64())
        });
        classes[i].latency_max_us = collect(&runs, |m| {
            m.class(tc).max_delay().map(|v| v.as_micros_f64())
        });
        classes[i].pdv_us = collect(&runs, |m| m.class(tc).pdv().map(|v| v.as_micros_f64()));
        classes[i].pdv_mean_us = collect(&runs, |m| m.class(tc).pdv_mean_ps().map(|v| v / US));
        classes[i].plr = collect(&runs, |m| m.class(tc).plr());
        classes[i].offered_load = collect(&runs, |m| m.class(tc).offered_load(capacity_bps));
    }
    let utilization = collect(&runs, |m| m.utilization());
    BatchSummary {
        runs,
        classes,
        utilization,
    }
}
