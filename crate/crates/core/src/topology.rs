//! Network descriptions for the experiments: a built-in six-switch chain
//! and GraphML imports of real-world topologies.
//!
//! Links are undirected, carry a rate in bits per second, a propagation
//! latency in seconds, and an erasure probability (nonzero on exactly one
//! link per experiment). Imported topologies derive latency from
//! great-circle distance at 2·10^5 km/s with a 0.01 ms floor.

use std::collections::HashMap;
use std::path::Path;

use quick_xml::events::Event;
use quick_xml::Reader;
use thiserror::Error;

/// Propagation speed through fiber, in km/s.
const PROPAGATION_KM_PER_S: f64 = 2.0e5;

/// Mean Earth radius for great-circle distances, in km.
const EARTH_RADIUS_KM: f64 = 6371.0;

/// Lower bound on link latency so co-located nodes still cost something.
const MIN_LATENCY_S: f64 = 1.0e-5;

/// Default link rate when a dataset does not specify one (100 Gbit/s).
pub const DEFAULT_RATE_BPS: f64 = 100.0e9;

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed GraphML: {0}")]
    Xml(String),
    #[error("node {label:?} has no usable Latitude/Longitude")]
    MissingCoordinates { label: String },
    #[error("edge references unknown node id {id:?}")]
    UnknownEdgeEndpoint { id: String },
    #[error("no node labelled {label:?}")]
    UnknownNode { label: String },
    #[error("no link between {a:?} and {b:?}")]
    NoSuchLink { a: String, b: String },
    #[error("erasure probability {0} outside [0, 1)")]
    InvalidLossProbability(f64),
    #[error("no route from {src:?} to {dst:?}")]
    NoPath { src: String, dst: String },
    #[error("route {src:?} -> {dst:?} does not traverse the lossy link")]
    PathMissesLossyLink { src: String, dst: String },
    #[error("expected exactly one lossy link, found {0}")]
    LossyLinkCount(usize),
    #[error("target utilization {0} must be in (0, 1]")]
    InvalidUtilization(f64),
    #[error("no link carries traffic, cannot normalize load")]
    NoTraffic,
}

#[derive(Debug, Clone)]
pub struct Node {
    pub label: String,
    pub latitude: Option<f64>,
    pub longitude: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Link {
    pub a: usize,
    pub b: usize,
    pub rate_bps: f64,
    pub latency_s: f64,
    pub loss_prob: f64,
}

impl Link {
    /// The far end of the link as seen from `node`.
    pub fn other(&self, node: usize) -> usize {
        if node == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Topology {
    pub nodes: Vec<Node>,
    pub links: Vec<Link>,
    /// The link designated as the lossy one, kept explicitly so an
    /// erasure probability of zero still identifies where the coding
    /// pair sits.
    pub protected: Option<usize>,
}

impl Topology {
    pub fn node_index(&self, label: &str) -> Result<usize, TopologyError> {
        self.nodes
            .iter()
            .position(|n| n.label == label)
            .ok_or_else(|| TopologyError::UnknownNode {
                label: label.to_string(),
            })
    }

    /// Index of the unique lossy link: the designated one if set,
    /// otherwise the single link with a nonzero erasure probability.
    /// Errors if no link qualifies, several do, or a stray link carries
    /// loss besides the designated one.
    pub fn lossy_link(&self) -> Result<usize, TopologyError> {
        let lossy: Vec<usize> = self
            .links
            .iter()
            .enumerate()
            .filter(|(_, l)| l.loss_prob > 0.0)
            .map(|(i, _)| i)
            .collect();
        if let Some(protected) = self.protected {
            if lossy.iter().any(|&i| i != protected) {
                let count = lossy.len() + usize::from(!lossy.contains(&protected));
                return Err(TopologyError::LossyLinkCount(count));
            }
            return Ok(protected);
        }
        match lossy.as_slice() {
            [only] => Ok(*only),
            other => Err(TopologyError::LossyLinkCount(other.len())),
        }
    }

    /// Marks the link between the two labelled nodes as the lossy one and
    /// clears the loss probability of every other link.
    pub fn mark_lossy(
        &mut self,
        label_a: &str,
        label_b: &str,
        loss_prob: f64,
    ) -> Result<usize, TopologyError> {
        if !(0.0..1.0).contains(&loss_prob) {
            return Err(TopologyError::InvalidLossProbability(loss_prob));
        }
        let a = self.node_index(label_a)?;
        let b = self.node_index(label_b)?;
        let target = self
            .links
            .iter()
            .position(|l| (l.a == a && l.b == b) || (l.a == b && l.b == a))
            .ok_or_else(|| TopologyError::NoSuchLink {
                a: label_a.to_string(),
                b: label_b.to_string(),
            })?;
        for (i, link) in self.links.iter_mut().enumerate() {
            link.loss_prob = if i == target { loss_prob } else { 0.0 };
        }
        self.protected = Some(target);
        Ok(target)
    }
}

/// A flow's path through the topology, as link indices from source to
/// destination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutedFlow {
    pub src: usize,
    pub dst: usize,
    pub links: Vec<usize>,
    /// Count of non-lossy links on the path.
    pub eta: usize,
}

/// f64 wrapper ordered by total_cmp so it can live in a BinaryHeap.
#[derive(PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Latency-shortest path between two labelled nodes. Ties resolve toward
/// the lower-indexed node and link, so routing is deterministic for a
/// given topology. The experiments require every flow to cross the lossy
/// link; a shortest path that avoids it is an error.
pub fn route(
    topology: &Topology,
    src_label: &str,
    dst_label: &str,
) -> Result<RoutedFlow, TopologyError> {
    let src = topology.node_index(src_label)?;
    let dst = topology.node_index(dst_label)?;
    let lossy = topology.lossy_link()?;

    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); topology.nodes.len()];
    for (i, link) in topology.links.iter().enumerate() {
        adjacency[link.a].push(i);
        adjacency[link.b].push(i);
    }

    let mut dist = vec![f64::INFINITY; topology.nodes.len()];
    let mut prev: Vec<Option<(usize, usize)>> = vec![None; topology.nodes.len()];
    let mut heap = std::collections::BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(std::cmp::Reverse((OrdF64(0.0), src)));

    while let Some(std::cmp::Reverse((OrdF64(d), node))) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        if node == dst {
            break;
        }
        for &link_idx in &adjacency[node] {
            let link = &topology.links[link_idx];
            let next = link.other(node);
            let cand = d + link.latency_s;
            if cand < dist[next] {
                dist[next] = cand;
                prev[next] = Some((node, link_idx));
                heap.push(std::cmp::Reverse((OrdF64(cand), next)));
            }
        }
    }

    if dist[dst].is_infinite() {
        return Err(TopologyError::NoPath {
            src: src_label.to_string(),
            dst: dst_label.to_string(),
        });
    }

    let mut links = Vec::new();
    let mut cursor = dst;
    while cursor != src {
        let (parent, link_idx) = prev[cursor].expect("visited node has a predecessor");
        links.push(link_idx);
        cursor = parent;
    }
    links.reverse();

    if !links.contains(&lossy) {
        return Err(TopologyError::PathMissesLossyLink {
            src: src_label.to_string(),
            dst: dst_label.to_string(),
        });
    }

    Ok(RoutedFlow {
        src,
        dst,
        eta: links.len() - 1,
        links,
    })
}

/// Scales all flow rates by one common factor so the mean utilization
/// over links that carry traffic hits `target`. Utilization counts raw
/// data traffic only (no parity or retransmissions). Returns the factor;
/// applying the function twice is a no-op because the second factor is 1.
pub fn normalize_load(
    topology: &Topology,
    routed: &[RoutedFlow],
    lambdas: &mut [f64],
    target: f64,
    packet_size_bytes: usize,
) -> Result<f64, TopologyError> {
    assert_eq!(routed.len(), lambdas.len(), "one rate per routed flow");
    if !(target > 0.0 && target <= 1.0) {
        return Err(TopologyError::InvalidUtilization(target));
    }
    let packet_bits = packet_size_bytes as f64 * 8.0;
    let mut offered_bps = vec![0.0f64; topology.links.len()];
    for (flow, lambda) in routed.iter().zip(lambdas.iter()) {
        for &link in &flow.links {
            offered_bps[link] += lambda * packet_bits;
        }
    }
    let mut total_util = 0.0;
    let mut loaded_links = 0usize;
    for (offered, link) in offered_bps.iter().zip(&topology.links) {
        if *offered > 0.0 {
            total_util += offered / link.rate_bps;
            loaded_links += 1;
        }
    }
    if loaded_links == 0 {
        return Err(TopologyError::NoTraffic);
    }
    let mean = total_util / loaded_links as f64;
    let scale = target / mean;
    for lambda in lambdas.iter_mut() {
        *lambda *= scale;
    }
    Ok(scale)
}

/// The six-switch chain: five 100 Gbit/s links, 100 ms latency each
/// except the 1 ms middle link, which is the lossy one. Both end-to-end
/// flows run s0 -> s5 and see four non-lossy links.
pub fn builtin_scenario1(epsilon: f64) -> Result<(Topology, Vec<(String, String)>), TopologyError> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(TopologyError::InvalidLossProbability(epsilon));
    }
    let nodes = (0..6)
        .map(|i| Node {
            label: format!("s{i}"),
            latitude: None,
            longitude: None,
        })
        .collect();
    let latencies_ms = [100.0, 100.0, 1.0, 100.0, 100.0];
    let links = latencies_ms
        .iter()
        .enumerate()
        .map(|(i, ms)| Link {
            a: i,
            b: i + 1,
            rate_bps: DEFAULT_RATE_BPS,
            latency_s: ms * 1e-3,
            loss_prob: if i == 2 { epsilon } else { 0.0 },
        })
        .collect();
    let topology = Topology {
        nodes,
        links,
        protected: Some(2),
    };
    let flows = vec![
        ("s0".to_string(), "s5".to_string()),
        ("s0".to_string(), "s5".to_string()),
    ];
    Ok((topology, flows))
}

/// Great-circle distance between two (latitude, longitude) points in km.
fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (phi1, phi2) = (lat1.to_radians(), lat2.to_radians());
    let d_phi = (lat2 - lat1).to_radians();
    let d_lambda = (lon2 - lon1).to_radians();
    let a = (d_phi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (d_lambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * a.sqrt().asin()
}

/// Latency of a link spanning the given great-circle distance.
pub fn distance_latency_s(distance_km: f64) -> f64 {
    (distance_km / PROPAGATION_KM_PER_S).max(MIN_LATENCY_S)
}

/// Loads a GraphML topology from a file. See [`load_graphml_str`].
pub fn load_graphml(path: &Path, default_rate_bps: f64) -> Result<Topology, TopologyError> {
    let content = std::fs::read_to_string(path).map_err(|source| TopologyError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_graphml_str(&content, default_rate_bps)
}

/// Parses a GraphML document of the Topology Zoo flavor: node attributes
/// declared via `<key>` elements, nodes carrying `label`, `Latitude` and
/// `Longitude` data, and undirected edges. Link latency comes from the
/// great-circle distance between the endpoints; every node on an edge
/// must therefore have coordinates.
pub fn load_graphml_str(content: &str, default_rate_bps: f64) -> Result<Topology, TopologyError> {
    let mut reader = Reader::from_str(content);
    reader.config_mut().trim_text(true);

    // key id -> attribute name, for node-scoped attributes.
    let mut key_names: HashMap<String, String> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut node_ids: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<(String, String)> = Vec::new();

    #[derive(Default)]
    struct PendingNode {
        id: String,
        label: Option<String>,
        latitude: Option<f64>,
        longitude: Option<f64>,
    }

    enum Scope {
        None,
        Node(PendingNode),
        Edge,
    }

    fn xml_err<E: std::fmt::Display>(e: E) -> TopologyError {
        TopologyError::Xml(e.to_string())
    }

    let mut scope = Scope::None;
    let mut current_key: Option<String> = None;

    fn finish_node(
        pending: PendingNode,
        nodes: &mut Vec<Node>,
        node_ids: &mut HashMap<String, usize>,
    ) {
        let label = pending.label.unwrap_or_else(|| pending.id.clone());
        node_ids.insert(pending.id, nodes.len());
        nodes.push(Node {
            label,
            latitude: pending.latitude,
            longitude: pending.longitude,
        });
    }

    loop {
        let (element, is_empty) = match reader.read_event().map_err(xml_err)? {
            Event::Start(e) => (e, false),
            Event::Empty(e) => (e, true),
            Event::Text(t) => {
                if let (Scope::Node(pending), Some(key)) = (&mut scope, &current_key) {
                    let text = t.unescape().map_err(xml_err)?.into_owned();
                    match key_names.get(key).map(String::as_str) {
                        Some("label") => pending.label = Some(text),
                        Some("Latitude") => pending.latitude = text.parse().ok(),
                        Some("Longitude") => pending.longitude = text.parse().ok(),
                        _ => {}
                    }
                }
                continue;
            }
            Event::End(e) => {
                match e.name().as_ref() {
                    b"node" => {
                        if let Scope::Node(pending) = std::mem::replace(&mut scope, Scope::None) {
                            finish_node(pending, &mut nodes, &mut node_ids);
                        }
                    }
                    b"edge" => scope = Scope::None,
                    b"data" => current_key = None,
                    _ => {}
                }
                continue;
            }
            Event::Eof => break,
            _ => continue,
        };

        match element.name().as_ref() {
            b"key" => {
                let mut id = None;
                let mut attr_name = None;
                let mut for_node = true;
                for attr in element.attributes() {
                    let attr = attr.map_err(xml_err)?;
                    let value = attr.unescape_value().map_err(xml_err)?.into_owned();
                    match attr.key.as_ref() {
                        b"id" => id = Some(value),
                        b"attr.name" => attr_name = Some(value),
                        b"for" => for_node = value == "node",
                        _ => {}
                    }
                }
                if let (Some(id), Some(attr_name)) = (id, attr_name) {
                    if for_node {
                        key_names.insert(id, attr_name);
                    }
                }
            }
            b"node" => {
                let mut pending = PendingNode::default();
                for attr in element.attributes() {
                    let attr = attr.map_err(xml_err)?;
                    if attr.key.as_ref() == b"id" {
                        pending.id = attr.unescape_value().map_err(xml_err)?.into_owned();
                    }
                }
                if is_empty {
                    finish_node(pending, &mut nodes, &mut node_ids);
                } else {
                    scope = Scope::Node(pending);
                }
            }
            b"edge" => {
                let mut source = None;
                let mut target = None;
                for attr in element.attributes() {
                    let attr = attr.map_err(xml_err)?;
                    let value = attr.unescape_value().map_err(xml_err)?.into_owned();
                    match attr.key.as_ref() {
                        b"source" => source = Some(value),
                        b"target" => target = Some(value),
                        _ => {}
                    }
                }
                if let (Some(s), Some(t)) = (source, target) {
                    edges.push((s, t));
                }
                if !is_empty {
                    scope = Scope::Edge;
                }
            }
            b"data" if !is_empty => {
                for attr in element.attributes() {
                    let attr = attr.map_err(xml_err)?;
                    if attr.key.as_ref() == b"key" {
                        current_key = Some(attr.unescape_value().map_err(xml_err)?.into_owned());
                    }
                }
            }
            _ => {}
        }
    }

    let mut links = Vec::with_capacity(edges.len());
    for (source, target) in edges {
        let a = *node_ids
            .get(&source)
            .ok_or(TopologyError::UnknownEdgeEndpoint { id: source.clone() })?;
        let b = *node_ids
            .get(&target)
            .ok_or(TopologyError::UnknownEdgeEndpoint { id: target.clone() })?;
        let coords = |idx: usize| -> Result<(f64, f64), TopologyError> {
            let node = &nodes[idx];
            match (node.latitude, node.longitude) {
                (Some(lat), Some(lon)) => Ok((lat, lon)),
                _ => Err(TopologyError::MissingCoordinates {
                    label: node.label.clone(),
                }),
            }
        };
        let (lat_a, lon_a) = coords(a)?;
        let (lat_b, lon_b) = coords(b)?;
        let distance = haversine_km(lat_a, lon_a, lat_b, lon_b);
        links.push(Link {
            a,
            b,
            rate_bps: default_rate_bps,
            latency_s: distance_latency_s(distance),
            loss_prob: 0.0,
        });
    }

    Ok(Topology {
        nodes,
        links,
        protected: None,
    })
}
