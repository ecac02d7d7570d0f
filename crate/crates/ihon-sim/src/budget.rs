//! Analytical fronthaul link budget.
//!
//! An end-to-end latency budget is spent on per-node forwarding delay plus
//! delay variation and on fiber propagation; whatever remains after the
//! nodes bounds the BBU-RRH separation:
//!
//! `total = n * (node_delay + node_pdv) + propagation_per_km * length`
//!
//! Service-class profiles (PLR / delay / jitter upper bounds) let run
//! results be checked against deployment requirements; an undefined bound
//! skips that check.

use serde::{Deserialize, Serialize};

/// Inputs to the link-length calculation. Times in microseconds,
/// propagation in microseconds per km.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BudgetSpec {
    pub nodes: u32,
    pub node_delay_us: f64,
    pub node_pdv_us: f64,
    pub propagation_us_per_km: f64,
    pub total_budget_us: f64,
}

/// Result of [`max_link_length`]. An exhausted budget is reported as an
/// infeasible zero-length link rather than a negative length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkLength {
    pub km: f64,
    pub feasible: bool,
}

/// Longest BBU-RRH link the budget allows after `nodes` forwarding hops.
pub fn max_link_length(spec: &BudgetSpec) -> LinkLength {
    let node_total_us = f64::from(spec.nodes) * (spec.node_delay_us + spec.node_pdv_us);
    let remainder_us = spec.total_budget_us - node_total_us;
    if remainder_us < 0.0 {
        LinkLength {
            km: 0.0,
            feasible: false,
        }
    } else {
        LinkLength {
            km: remainder_us / spec.propagation_us_per_km,
            feasible: true,
        }
    }
}

/// One row of the node-count vs. link-length table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BudgetRow {
    pub nodes: u32,
    pub total_node_delay_us: f64,
    pub link_length_km: f64,
    pub feasible: bool,
}

/// Table of link lengths for every node count in `[n_min, n_max]`.
pub fn budget_table(
    n_min: u32,
    n_max: u32,
    node_delay_us: f64,
    node_pdv_us: f64,
    propagation_us_per_km: f64,
    total_budget_us: f64,
) -> Vec<BudgetRow> {
    (n_min..=n_max)
        .map(|nodes| {
            let spec = BudgetSpec {
                nodes,
                node_delay_us,
                node_pdv_us,
                propagation_us_per_km,
                total_budget_us,
            };
            let length = max_link_length(&spec);
            BudgetRow {
                nodes,
                total_node_delay_us: f64::from(nodes) * (node_delay_us + node_pdv_us),
                link_length_km: length.km,
                feasible: length.feasible,
            }
        })
        .collect()
}

/// Upper-bound requirements of one service class. `None` marks a bound the
/// source leaves undefined; that check is skipped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceClassProfile {
    pub name: String,
    #[serde(default)]
    pub plr_bound: Option<f64>,
    #[serde(default)]
    pub delay_bound_us: Option<f64>,
    #[serde(default)]
    pub jitter_bound_us: Option<f64>,
}

impl ServiceClassProfile {
    fn new(
        name: &str,
        plr_bound: Option<f64>,
        delay_bound_us: Option<f64>,
        jitter_bound_us: Option<f64>,
    ) -> Self {
        ServiceClassProfile {
            name: name.to_string(),
            plr_bound,
            delay_bound_us,
            jitter_bound_us,
        }
    }
}

/// Measured per-class results to hold against a profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasuredQos {
    pub latency_us: f64,
    pub pdv_us: f64,
    pub plr: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundCheck {
    Pass,
    Fail,
    Skipped,
}

impl BoundCheck {
    pub fn label(self) -> &'static str {
        match self {
            BoundCheck::Pass => "pass",
            BoundCheck::Fail => "fail",
            BoundCheck::Skipped => "skipped",
        }
    }
}

/// Per-bound verdicts for one (measurement, profile) pair. The overall
/// verdict passes iff every defined bound passes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProfileVerdict {
    pub plr: BoundCheck,
    pub delay: BoundCheck,
    pub jitter: BoundCheck,
}

impl ProfileVerdict {
    pub fn pass(&self) -> bool {
        [self.plr, self.delay, self.jitter]
            .iter()
            .all(|c| *c != BoundCheck::Fail)
    }
}

fn check_bound(measured: f64, bound: Option<f64>) -> BoundCheck {
    match bound {
        None => BoundCheck::Skipped,
        Some(b) if measured <= b => BoundCheck::Pass,
        Some(_) => BoundCheck::Fail,
    }
}

pub fn check_profile(qos: &MeasuredQos, profile: &ServiceClassProfile) -> ProfileVerdict {
    ProfileVerdict {
        plr: check_bound(qos.plr, profile.plr_bound),
        delay: check_bound(qos.latency_us, profile.delay_bound_us),
        jitter: check_bound(qos.pdv_us, profile.jitter_bound_us),
    }
}

/// Mobile-fronthaul profile: 50 us end-to-end delay including fiber, 5 us
/// delay variation, and a PLR bound from the [1e-6, 1e-9] requirement range
/// (strict end by default, configurable down to 1e-9).
pub fn fronthaul_profile(plr_bound: f64) -> ServiceClassProfile {
    ServiceClassProfile::new("fronthaul", Some(plr_bound), Some(50.0), Some(5.0))
}

/// Processing-only fronthaul budget with cable propagation excluded; an
/// optional extra check next to the end-to-end profile.
pub fn fronthaul_processing_profile() -> ServiceClassProfile {
    ServiceClassProfile::new("fronthaul-ex-propagation", None, Some(5.0), None)
}

const MS: f64 = 1_000.0; // microseconds per millisecond

/// Built-in access-network service classes. Classes with a dual delay bound
/// ("100 ms or 400 ms") are encoded as two named variants.
pub fn builtin_profiles() -> Vec<ServiceClassProfile> {
    let dual = |name: &str, plr: f64, jitter: Option<f64>| {
        vec![
            ServiceClassProfile::new(
                &format!("{name}-100ms"),
                Some(plr),
                Some(100.0 * MS),
                jitter,
            ),
            ServiceClassProfile::new(
                &format!("{name}-400ms"),
                Some(plr),
                Some(400.0 * MS),
                jitter,
            ),
        ]
    };
    let mut profiles = vec![fronthaul_profile(1e-6), fronthaul_processing_profile()];
    profiles.extend(dual("video-streaming", 1e-5, Some(50.0 * MS)));
    profiles.extend(dual("video-conversational", 1e-3, Some(50.0 * MS)));
    profiles.extend(dual("music-streaming", 1e-5, Some(50.0 * MS)));
    profiles.extend(dual("voice-conversational", 1e-3, Some(50.0 * MS)));
    profiles.extend(dual("interactive-messaging", 1e-3, None));
    profiles.push(ServiceClassProfile::new(
        "control-traffic",
        Some(1e-3),
        Some(100.0 * MS),
        None,
    ));
    profiles.push(ServiceClassProfile::new(
        "general-data-transfer",
        Some(1e-3),
        None,
        None,
    ));
    profiles.push(ServiceClassProfile::new(
        "general-data-transfer-unbounded",
        None,
        None,
        None,
    ));
    profiles
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_spec(nodes: u32) -> BudgetSpec {
        BudgetSpec {
            nodes,
            node_delay_us: 1.2,
            node_pdv_us: 0.0,
            propagation_us_per_km: 5.0,
            total_budget_us: 50.0,
        }
    }

    #[test]
    fn two_node_network_reaches_9_52_km() {
        let r = max_link_length(&reference_spec(2));
        assert!(r.feasible);
        assert!((r.km - 9.52).abs() < 5e-3, "{}", r.km);
    }

    #[test]
    fn six_node_network_reaches_8_56_km() {
        let r = max_link_length(&reference_spec(6));
        assert!(r.feasible);
        assert!((r.km - 8.56).abs() < 5e-3, "{}", r.km);
    }

    #[test]
    fn zero_nodes_spend_the_whole_budget_on_fiber() {
        let r = max_link_length(&reference_spec(0));
        assert!(r.feasible);
        assert_eq!(r.km, 10.0);
    }

    #[test]
    fn per_node_pdv_consumes_budget() {
        let mut spec = reference_spec(2);
        spec.node_pdv_us = 5.0;
        let r = max_link_length(&spec);
        assert!(r.feasible);
        assert!((r.km - 7.52).abs() < 1e-12, "{}", r.km);
    }

    #[test]
    fn exhausted_budget_is_flagged_infeasible() {
        // 41 nodes leave 0.8 us = 0.16 km; 42 nodes overrun the budget.
        let r41 = max_link_length(&reference_spec(41));
        assert!(r41.feasible);
        assert!((r41.km - 0.16).abs() < 1e-9, "{}", r41.km);
        let r42 = max_link_length(&reference_spec(42));
        assert!(!r42.feasible);
        assert_eq!(r42.km, 0.0);
    }

    #[test]
    fn link_length_is_linear_in_node_count() {
        // Slope -(node_delay + pdv) / propagation = -0.24 km per node.
        let rows = budget_table(2, 6, 1.2, 0.0, 5.0, 50.0);
        for pair in rows.windows(2) {
            let slope = pair[1].link_length_km - pair[0].link_length_km;
            assert!((slope + 0.24).abs() < 1e-9, "slope {slope}");
        }
    }

    #[test]
    fn round_trip_identity_recovers_the_budget() {
        for nodes in 0..=41 {
            let spec = reference_spec(nodes);
            let r = max_link_length(&spec);
            let total = f64::from(nodes) * (spec.node_delay_us + spec.node_pdv_us)
                + spec.propagation_us_per_km * r.km;
            assert!((total - spec.total_budget_us).abs() < 1e-9);
        }
    }

    #[test]
    fn gst_results_meet_the_fronthaul_profile() {
        let qos = MeasuredQos {
            latency_us: 1.2,
            pdv_us: 0.0,
            plr: 0.0,
        };
        let verdict = check_profile(&qos, &fronthaul_profile(1e-6));
        assert_eq!(verdict.plr, BoundCheck::Pass);
        assert_eq!(verdict.delay, BoundCheck::Pass);
        assert_eq!(verdict.jitter, BoundCheck::Pass);
        assert!(verdict.pass());
    }

    #[test]
    fn sm_loss_fails_the_fronthaul_plr_bound() {
        let qos = MeasuredQos {
            latency_us: 10.0,
            pdv_us: 3.0,
            plr: 1e-3,
        };
        let verdict = check_profile(&qos, &fronthaul_profile(1e-6));
        assert_eq!(verdict.plr, BoundCheck::Fail);
        assert!(!verdict.pass());
    }

    #[test]
    fn undefined_jitter_bound_is_skipped() {
        let qos = MeasuredQos {
            latency_us: 50_000.0,
            pdv_us: 1e9,
            plr: 1e-4,
        };
        let profile = builtin_profiles()
            .into_iter()
            .find(|p| p.name == "interactive-messaging-100ms")
            .unwrap();
        let verdict = check_profile(&qos, &profile);
        assert_eq!(verdict.jitter, BoundCheck::Skipped);
        assert_eq!(verdict.delay, BoundCheck::Pass);
        assert_eq!(verdict.plr, BoundCheck::Pass);
        assert!(verdict.pass());
    }
}
