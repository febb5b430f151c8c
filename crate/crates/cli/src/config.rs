//! Scenario presets and the flat `key = value` configuration format.
//!
//! A scenario bundles everything needed to materialize an experiment:
//! which topology to use, which link is lossy, the traffic matrix, and the
//! load-normalization policy. Two presets ship with the tool:
//!
//! * `scenario1` — the bundled six-node chain with one lossy hop and two
//!   end-to-end flows.
//! * `scenario2` — the bundled wide-area GraphML topology with the
//!   Paris—Saint-Denis hop marked lossy and five cross-country flows.
//!
//! Custom scenarios come from config files of `key = value` lines
//! (`#` starts a comment). Recognized keys:
//!
//! ```text
//! graphml            = path.graphml      # relative to the config file
//! lossy_a            = NodeLabel         # one endpoint of the lossy link
//! lossy_b            = NodeLabel         # the other endpoint
//! epsilon            = 0.05              # loss probability on that link
//! flows              = A>B, C>D          # source>destination pairs
//! target_utilization = 0.5               # offered-load target in (0, 1]
//! normalize          = mean | bottleneck # which utilization hits the target
//! k                  = 50                # data symbols per coding block
//! n                  = 60                # total symbols per coding block
//! seed               = 7                 # flow-rate RNG seed
//! ```
//!
//! Omitting `graphml` selects the built-in six-node chain. Unknown keys are
//! rejected rather than ignored so that typos fail loudly.

use std::fs;
use std::path::{Path, PathBuf};

use crate::Failure;

/// How per-flow send rates are scaled to meet `target_utilization`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalize {
    /// Scale rates so the *mean* utilization over loaded links hits the target.
    Mean,
    /// Scale rates so the *busiest* link's utilization hits the target.
    /// Appropriate when many flows share one link: it keeps every queue
    /// stable, which mean-based scaling cannot guarantee.
    Bottleneck,
}

impl Normalize {
    pub fn parse(s: &str) -> Result<Self, Failure> {
        match s {
            "mean" => Ok(Self::Mean),
            "bottleneck" => Ok(Self::Bottleneck),
            other => Err(Failure::Usage(format!(
                "unknown normalization `{other}` (expected `mean` or `bottleneck`)"
            ))),
        }
    }
}

/// Where the topology comes from.
#[derive(Debug, Clone)]
pub enum TopologySource {
    /// The built-in six-node chain with one lossy middle hop.
    Builtin,
    /// A GraphML file plus the labels of the lossy link's endpoints.
    Graphml {
        path: PathBuf,
        lossy_a: String,
        lossy_b: String,
    },
}

/// A fully-specified experiment scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub source: TopologySource,
    /// Loss probability on the lossy link.
    pub epsilon: f64,
    /// Traffic matrix as (source label, destination label) pairs. Empty means
    /// "use the built-in scenario's own flows" and is only valid for
    /// [`TopologySource::Builtin`].
    pub flows: Vec<(String, String)>,
    /// Target link utilization in (0, 1] used when normalizing flow rates.
    pub target_utilization: f64,
    pub normalize: Normalize,
    /// Default coding-block geometry for commands that need a single (k, n).
    pub k: usize,
    pub n: Option<usize>,
    /// Seed for drawing the heterogeneous per-flow rate factors.
    pub seed: u64,
}

/// The built-in six-node chain scenario.
pub fn scenario1() -> Scenario {
    Scenario {
        name: "scenario1".into(),
        source: TopologySource::Builtin,
        epsilon: 0.05,
        flows: Vec::new(),
        target_utilization: 0.5,
        normalize: Normalize::Mean,
        k: 50,
        n: None,
        seed: 7,
    }
}

/// The built-in wide-area scenario backed by the bundled GraphML file.
/// `data_dir` is the directory holding `vtlwavenet2011.graphml`.
pub fn scenario2(data_dir: &Path) -> Scenario {
    Scenario {
        name: "scenario2".into(),
        source: TopologySource::Graphml {
            path: data_dir.join("vtlwavenet2011.graphml"),
            lossy_a: "Paris".into(),
            lossy_b: "Saint-Denis".into(),
        },
        epsilon: 0.05,
        flows: vec![
            ("Marseille".into(), "London".into()),
            ("Bordeaux".into(), "Amsterdam".into()),
            ("Geneva".into(), "London".into()),
            ("Sete".into(), "Antoing".into()),
            ("Blanzay".into(), "Strasbourg".into()),
        ],
        target_utilization: 0.5,
        // Five flows funnel through the single lossy hop; targeting the mean
        // would drive that shared link past saturation.
        normalize: Normalize::Bottleneck,
        k: 50,
        n: Some(60),
        seed: 7,
    }
}

/// Look up a named preset. `data_dir` anchors bundled data files.
pub fn preset(name: &str, data_dir: &Path) -> Result<Scenario, Failure> {
    match name {
        "scenario1" => Ok(scenario1()),
        "scenario2" => Ok(scenario2(data_dir)),
        other => Err(Failure::Usage(format!(
            "unknown scenario `{other}` (expected `scenario1` or `scenario2`)"
        ))),
    }
}

/// Parse `A>B, C>D` into (source, destination) label pairs.
fn parse_flows(value: &str) -> Result<Vec<(String, String)>, Failure> {
    let mut flows = Vec::new();
    for part in value.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (src, dst) = part.split_once('>').ok_or_else(|| {
            Failure::Usage(format!(
                "flow `{part}` is not of the form `Source>Destination`"
            ))
        })?;
        let (src, dst) = (src.trim(), dst.trim());
        if src.is_empty() || dst.is_empty() {
            return Err(Failure::Usage(format!(
                "flow `{part}` has an empty endpoint"
            )));
        }
        flows.push((src.to_string(), dst.to_string()));
    }
    if flows.is_empty() {
        return Err(Failure::Usage(
            "`flows` lists no source>destination pairs".into(),
        ));
    }
    Ok(flows)
}

/// Load a scenario from a config file. Relative `graphml` paths resolve
/// against the config file's own directory.
pub fn load(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Ingest(format!("cannot read config {}: {e}", path.display())))?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));

    let mut scenario = scenario1();
    scenario.name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "custom".into());
    scenario.flows.clear();

    let mut graphml: Option<PathBuf> = None;
    let mut lossy_a: Option<String> = None;
    let mut lossy_b: Option<String> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Failure::Usage(format!(
                "{}:{}: expected `key = value`, got `{line}`",
                path.display(),
                lineno + 1
            ))
        })?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| {
            Failure::Usage(format!(
                "{}:{}: `{key}` {what} (got `{value}`)",
                path.display(),
                lineno + 1
            ))
        };
        match key {
            "graphml" => {
                let p = PathBuf::from(value);
                graphml = Some(if p.is_absolute() { p } else { dir.join(p) });
            }
            "lossy_a" => lossy_a = Some(value.to_string()),
            "lossy_b" => lossy_b = Some(value.to_string()),
            "epsilon" => {
                let eps: f64 = value.parse().map_err(|_| bad("expects a number"))?;
                if !(0.0..1.0).contains(&eps) {
                    return Err(bad("expects a loss probability in [0, 1)"));
                }
                scenario.epsilon = eps;
            }
            "flows" => scenario.flows = parse_flows(value)?,
            "target_utilization" => {
                let t: f64 = value.parse().map_err(|_| bad("expects a number"))?;
                if !(t > 0.0 && t <= 1.0) {
                    return Err(bad("expects a utilization in (0, 1]"));
                }
                scenario.target_utilization = t;
            }
            "normalize" => scenario.normalize = Normalize::parse(value)?,
            "k" => {
                scenario.k = value
                    .parse()
                    .map_err(|_| bad("expects a positive integer"))?
            }
            "n" => {
                scenario.n = Some(
                    value
                        .parse()
                        .map_err(|_| bad("expects a positive integer"))?,
                )
            }
            "seed" => {
                scenario.seed = value
                    .parse()
                    .map_err(|_| bad("expects an unsigned integer"))?
            }
            other => {
                return Err(Failure::Usage(format!(
                    "{}:{}: unknown config key `{other}`",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }

    match (graphml, lossy_a, lossy_b) {
        (Some(path), Some(a), Some(b)) => {
            if scenario.flows.is_empty() {
                return Err(Failure::Usage(
                    "config selects a GraphML topology but lists no `flows`".into(),
                ));
            }
            scenario.source = TopologySource::Graphml {
                path,
                lossy_a: a,
                lossy_b: b,
            };
        }
        (None, None, None) => {
            // Built-in chain; empty `flows` means the scenario's own pairs.
        }
        _ => {
            return Err(Failure::Usage(
                "`graphml`, `lossy_a`, and `lossy_b` must be given together".into(),
            ))
        }
    }
    Ok(scenario)
}
