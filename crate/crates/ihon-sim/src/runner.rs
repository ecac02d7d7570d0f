//! Experiment orchestration and CSV emission.
//!
//! A "single" run is one batch: one sub-simulation per configured seed,
//! aggregated into a [`BatchSummary`]. A sweep is one batch per swept load
//! value. Seeds within a batch run in parallel with fully independent
//! state; results are assembled in seed order, so parallelism never changes
//! the output bytes.
//!
//! CSV layout: a `#`-prefixed comment block echoing the full effective
//! configuration (enough to reproduce the run by feeding it back), one
//! header row, then one data row per sweep point. Counts are totals over
//! all seeds; latency/PDV columns are cross-seed means in microseconds with
//! three decimals; PLR and utilization use shortest-round-trip formatting.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::budget::{check_profile, BudgetRow, MeasuredQos, ServiceClassProfile};
use crate::config::{BudgetConfig, RunConfig, SchedulerMode, SweepSpec};
use crate::error::SimError;
use crate::eventlog::LogRecord;
use crate::metrics::{aggregate, BatchSummary, ClassSummary, MeanStd, SeedRun};
use crate::packet::TrafficClass;
use crate::sim::run_seed;

fn validate(config: &RunConfig) -> Result<(), SimError> {
    config.validate().map_err(|e| SimError::Config {
        message: e.to_string(),
    })
}

/// One batch: `config.n_packets` per class, once per seed, aggregated.
/// Deterministic for a given config regardless of thread scheduling.
/// Invalid configurations are rejected with the offending field named.
pub fn run_single(config: &RunConfig) -> Result<BatchSummary, SimError> {
    validate(config)?;
    let runs: Vec<SeedRun> = config
        .seeds
        .par_iter()
        .map(|&seed| {
            run_seed(config, seed, false).map(|out| SeedRun {
                seed,
                metrics: out.metrics,
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(aggregate(runs, config.link_capacity_bps))
}

/// Per-seed event logs, in seed order.
pub type SeedLogs = Vec<(u64, Vec<LogRecord>)>;

/// As [`run_single`], additionally returning every seed's event log in seed
/// order.
pub fn run_single_with_logs(config: &RunConfig) -> Result<(BatchSummary, SeedLogs), SimError> {
    validate(config)?;
    let outputs: Vec<(u64, crate::sim::SimOutput)> = config
        .seeds
        .par_iter()
        .map(|&seed| run_seed(config, seed, true).map(|out| (seed, out)))
        .collect::<Result<_, _>>()?;
    let mut runs = Vec::with_capacity(outputs.len());
    let mut logs = Vec::with_capacity(outputs.len());
    for (seed, out) in outputs {
        runs.push(SeedRun {
            seed,
            metrics: out.metrics,
        });
        logs.push((seed, out.log.expect("log capture was requested")));
    }
    Ok((aggregate(runs, config.link_capacity_bps), logs))
}

/// One sweep point: the effective config and its batch result.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub value: f64,
    pub config: RunConfig,
    pub summary: BatchSummary,
}

/// One batch per sweep value, in sweep order.
pub fn run_sweep(base: &RunConfig, sweep: &SweepSpec) -> Result<Vec<SweepPoint>, SimError> {
    let values = sweep.expand().map_err(|e| SimError::Config {
        message: e.to_string(),
    })?;
    values
        .into_iter()
        .map(|value| {
            let config = sweep.apply(base, value);
            let summary = run_single(&config)?;
            Ok(SweepPoint {
                value,
                config,
                summary,
            })
        })
        .collect()
}

fn class_columns(mode: SchedulerMode) -> [TrafficClass; 2] {
    match mode {
        SchedulerMode::Fusion => [TrafficClass::Gst, TrafficClass::Sm],
        SchedulerMode::StrictPriority => [TrafficClass::Hp, TrafficClass::Lp],
    }
}

fn load_column_names(mode: SchedulerMode) -> [&'static str; 2] {
    match mode {
        SchedulerMode::Fusion => ["gst_load", "sm_load"],
        SchedulerMode::StrictPriority => ["hp_load", "lp_load"],
    }
}

fn fmt_us(v: Option<MeanStd>) -> String {
    format!("{:.3}", v.map_or(0.0, |m| m.mean))
}

fn fmt_ratio(v: Option<MeanStd>) -> String {
    format!("{}", v.map_or(0.0, |m| m.mean))
}

fn write_config_header<W: Write>(w: &mut W, config: &RunConfig) -> io::Result<()> {
    let json = serde_json::to_string(config).expect("config serializes");
    writeln!(w, "# config: {json}")?;
    let seeds: Vec<String> = config.seeds.iter().map(|s| s.to_string()).collect();
    writeln!(w, "# seeds: {}", seeds.join(" "))
}

fn write_point_header<W: Write>(w: &mut W, mode: SchedulerMode) -> io::Result<()> {
    let [a, b] = load_column_names(mode);
    let mut columns = vec![a.to_string(), b.to_string(), "system_load".to_string()];
    for class in class_columns(mode) {
        let l = class.label();
        for col in [
            "generated",
            "delivered",
            "dropped",
            "latency_mean_us",
            "latency_min_us",
            "latency_max_us",
            "pdv_us",
            "pdv_mean_us",
            "plr",
        ] {
            columns.push(format!("{l}_{col}"));
        }
    }
    columns.push("utilization".to_string());
    writeln!(w, "{}", columns.join(","))
}

fn write_point_row<W: Write>(
    w: &mut W,
    config: &RunConfig,
    summary: &BatchSummary,
) -> io::Result<()> {
    let mut fields = vec![
        format!("{}", config.gst_load),
        format!("{}", config.sm_load),
        format!("{}", config.system_load()),
    ];
    for class in class_columns(config.scheduler_mode) {
        let c: &ClassSummary = summary.class(class);
        fields.push(c.generated.to_string());
        fields.push(c.delivered.to_string());
        fields.push(c.dropped.to_string());
        fields.push(fmt_us(c.latency_mean_us));
        fields.push(fmt_us(c.latency_min_us));
        fields.push(fmt_us(c.latency_max_us));
        fields.push(fmt_us(c.pdv_us));
        fields.push(fmt_us(c.pdv_mean_us));
        fields.push(fmt_ratio(c.plr));
    }
    fields.push(fmt_ratio(summary.utilization));
    writeln!(w, "{}", fields.join(","))
}

fn write_profile_checks<W: Write>(
    w: &mut W,
    config: &RunConfig,
    summary: &BatchSummary,
    profiles: &[ServiceClassProfile],
) -> io::Result<()> {
    for class in class_columns(config.scheduler_mode) {
        let c = summary.class(class);
        let (Some(latency), Some(pdv), Some(plr)) = (c.latency_mean_us, c.pdv_us, c.plr) else {
            continue;
        };
        let qos = MeasuredQos {
            latency_us: latency.mean,
            pdv_us: pdv.mean,
            plr: plr.mean,
        };
        for profile in profiles {
            let v = check_profile(&qos, profile);
            writeln!(
                w,
                "# profile {} class={} plr={} delay={} jitter={} overall={}",
                profile.name,
                class.label(),
                v.plr.label(),
                v.delay.label(),
                v.jitter.label(),
                if v.pass() { "pass" } else { "fail" }
            )?;
        }
    }
    Ok(())
}

/// Emit one batch as CSV. `profiles`, when given, appends per-profile
/// verdict comments after the data row.
pub fn write_single_csv<W: Write>(
    w: &mut W,
    config: &RunConfig,
    summary: &BatchSummary,
    profiles: Option<&[ServiceClassProfile]>,
) -> io::Result<()> {
    writeln!(w, "# mode: single")?;
    write_config_header(w, config)?;
    write_point_header(w, config.scheduler_mode)?;
    write_point_row(w, config, summary)?;
    if let Some(profiles) = profiles {
        write_profile_checks(w, config, summary, profiles)?;
    }
    Ok(())
}

/// Emit a sweep as CSV, one data row per point.
pub fn write_sweep_csv<W: Write>(
    w: &mut W,
    base: &RunConfig,
    sweep: &SweepSpec,
    points: &[SweepPoint],
) -> io::Result<()> {
    writeln!(w, "# mode: sweep")?;
    write_config_header(w, base)?;
    let sweep_json = serde_json::to_string(sweep).expect("sweep serializes");
    writeln!(w, "# sweep: {sweep_json}")?;
    write_point_header(w, base.scheduler_mode)?;
    for point in points {
        write_point_row(w, &point.config, &point.summary)?;
    }
    Ok(())
}

/// Compute and emit the node-count vs. link-length table.
pub fn budget_rows(config: &BudgetConfig) -> Vec<BudgetRow> {
    crate::budget::budget_table(
        config.n_min,
        config.n_max,
        config.node_delay_us,
        config.node_pdv_us,
        config.propagation_us_per_km,
        config.total_budget_us,
    )
}

pub fn write_budget_csv<W: Write>(
    w: &mut W,
    config: &BudgetConfig,
    rows: &[BudgetRow],
) -> io::Result<()> {
    writeln!(w, "# mode: budget")?;
    let json = serde_json::to_string(config).expect("budget config serializes");
    writeln!(w, "# budget: {json}")?;
    writeln!(w, "n_nodes,total_node_delay_us,link_length_km,feasible")?;
    for row in rows {
        writeln!(
            w,
            "{},{:.3},{:.2},{}",
            row.nodes, row.total_node_delay_us, row.link_length_km, row.feasible
        )?;
    }
    Ok(())
}

/// Emit raw event logs, one line per event, grouped by seed in seed order.
pub fn write_event_log<W: Write>(w: &mut W, logs: &[(u64, Vec<LogRecord>)]) -> io::Result<()> {
    for (seed, records) in logs {
        writeln!(w, "# seed {seed}")?;
        for record in records {
            writeln!(w, "{record}")?;
        }
    }
    Ok(())
}
