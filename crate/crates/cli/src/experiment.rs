//! Turning a [`Scenario`](crate::config::Scenario) into a concrete
//! experiment: a topology with one lossy link, routed flows, and per-flow
//! send rates calibrated to the scenario's utilization target.
//!
//! Rates are drawn heterogeneously (uniform in [0.5, 1.5), one draw per
//! flow from a dedicated seeded stream) and then scaled as a group so the
//! chosen utilization statistic — mean over loaded links, or the busiest
//! link — hits the target exactly. The returned rates are in packets per
//! second at full link speed; commands apply their own `rate_scale` when
//! compressing an experiment to desk scale.

use linc_core::model::{Flow, FlowEnsemble};
use linc_core::rng::{derive_rng, StreamDomain};
use linc_core::topology::{self, RoutedFlow, Topology, DEFAULT_RATE_BPS};
use rand::Rng;

use crate::config::{Normalize, Scenario, TopologySource};
use crate::Failure;

/// A scenario made concrete: topology, routes, and calibrated rates.
pub struct Experiment {
    pub topology: Topology,
    pub routed: Vec<RoutedFlow>,
    /// Calibrated per-flow rates in packets per second, before any
    /// desk-scale compression.
    pub lambdas: Vec<f64>,
}

impl Experiment {
    /// The flow ensemble seen by the analytic model, with every rate
    /// multiplied by `rate_scale` so model and simulator share units.
    pub fn ensemble(&self, rate_scale: f64) -> Result<FlowEnsemble<f64>, Failure> {
        let flows = self
            .routed
            .iter()
            .zip(&self.lambdas)
            .map(|(flow, &lambda)| Flow {
                lambda: lambda * rate_scale,
                eta: flow.eta as f64,
            })
            .collect();
        Ok(FlowEnsemble::new(flows)?)
    }
}

/// Build the experiment for one loss probability. The scenario's own
/// `epsilon` is ignored in favor of the sweep value passed here.
pub fn materialize(
    scenario: &Scenario,
    epsilon: f64,
    packet_size_bytes: usize,
) -> Result<Experiment, Failure> {
    let (topology, pairs) = match &scenario.source {
        TopologySource::Builtin => {
            let (topology, default_pairs) = topology::builtin_scenario1(epsilon)?;
            let pairs = if scenario.flows.is_empty() {
                default_pairs
            } else {
                scenario.flows.clone()
            };
            (topology, pairs)
        }
        TopologySource::Graphml {
            path,
            lossy_a,
            lossy_b,
        } => {
            if scenario.flows.is_empty() {
                return Err(Failure::Usage(format!(
                    "scenario `{}` selects a GraphML topology but lists no flows",
                    scenario.name
                )));
            }
            let mut topology = topology::load_graphml(path, DEFAULT_RATE_BPS)?;
            topology.mark_lossy(lossy_a, lossy_b, epsilon)?;
            (topology, scenario.flows.clone())
        }
    };

    let routed: Vec<RoutedFlow> = pairs
        .iter()
        .map(|(src, dst)| topology::route(&topology, src, dst))
        .collect::<Result<_, _>>()?;

    let mut rng = derive_rng(scenario.seed, StreamDomain::FlowRates, 0);
    let mut lambdas: Vec<f64> = (0..routed.len())
        .map(|_| 0.5 + rng.random::<f64>())
        .collect();

    match scenario.normalize {
        Normalize::Mean => {
            topology::normalize_load(
                &topology,
                &routed,
                &mut lambdas,
                scenario.target_utilization,
                packet_size_bytes,
            )?;
        }
        Normalize::Bottleneck => {
            normalize_bottleneck(
                &topology,
                &routed,
                &mut lambdas,
                scenario.target_utilization,
                packet_size_bytes,
            )?;
        }
    }

    Ok(Experiment {
        topology,
        routed,
        lambdas,
    })
}

/// Scale all rates by one factor so the busiest link's utilization equals
/// `target`. Unlike mean-based normalization this keeps every queue stable
/// no matter how unevenly the flows share links.
fn normalize_bottleneck(
    topology: &Topology,
    routed: &[RoutedFlow],
    lambdas: &mut [f64],
    target: f64,
    packet_size_bytes: usize,
) -> Result<f64, Failure> {
    assert_eq!(routed.len(), lambdas.len());
    if !(target > 0.0 && target <= 1.0) {
        return Err(Failure::Usage(format!(
            "target utilization {target} is outside (0, 1]"
        )));
    }
    let bits_per_packet = packet_size_bytes as f64 * 8.0;
    let mut offered_bps = vec![0.0_f64; topology.links.len()];
    for (flow, &lambda) in routed.iter().zip(lambdas.iter()) {
        for &link in &flow.links {
            offered_bps[link] += lambda * bits_per_packet;
        }
    }
    let peak = offered_bps
        .iter()
        .zip(&topology.links)
        .map(|(offered, link)| offered / link.rate_bps)
        .fold(0.0_f64, f64::max);
    if peak <= 0.0 {
        return Err(Failure::Usage(
            "no link carries traffic; cannot normalize load".into(),
        ));
    }
    let factor = target / peak;
    for lambda in lambdas.iter_mut() {
        *lambda *= factor;
    }
    Ok(factor)
}
