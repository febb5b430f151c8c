//! Event-driven packet-level simulator.
//!
//! Every flow is an independent Poisson source feeding a path of
//! store-and-forward links; each link direction has a FIFO transmit
//! queue. One link erases packets at random. Senders retransmit on
//! explicit receiver requests or on a timer; receivers deliver strictly
//! in order. When coding is enabled, the switches adjacent to the lossy
//! link run the transparent encoder/decoder pair from
//! [`crate::coding`], and data packets carry real payload bytes (a
//! 20-byte self-describing record) so reconstruction exercises the
//! actual field arithmetic, not a bookkeeping shortcut.
//!
//! Determinism: all randomness derives from `SimConfig::seed` through
//! per-entity streams, and simultaneous events fire in creation order,
//! so a run is a pure function of its inputs.

mod metrics;
mod middlebox;
mod queue;
mod transport;

pub use metrics::SimResult;

use std::collections::VecDeque;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coding::CodedPacketTag;
use crate::rng::{derive_rng, sample_exponential, StreamDomain};
use crate::topology::{RoutedFlow, Topology, TopologyError};

use metrics::Collector;
use middlebox::{EgressDecoder, IngressCoder};
use queue::EventQueue;
use transport::{AckRecord, Receiver, Sender, TimeoutOutcome};

/// Bytes in the self-describing record every data packet carries: flow
/// id (u32), sequence number (u64) and creation time (f64 bits), all
/// big-endian. Lost packets are rebuilt from these bytes alone.
pub const RECORD_LEN: usize = 20;

/// Worst-case coding tag: block id (4) + index (1) + length (2).
const MAX_TAG_LEN: usize = 7;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("simulation needs at least one flow")]
    NoFlows,
    #[error("duration {duration} must exceed warmup {warmup} (both finite, warmup >= 0)")]
    InvalidWindow { duration: f64, warmup: f64 },
    #[error("flow rate {0} must be positive and finite")]
    InvalidFlowRate(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(
        "packet size {0} cannot hold the {RECORD_LEN}-byte record plus a {MAX_TAG_LEN}-byte tag"
    )]
    PacketTooSmall(usize),
    #[error("flow {flow} route is not connected at hop {hop}")]
    BrokenRoute { flow: usize, hop: usize },
    #[error("flow {0} route does not cross the lossy link")]
    RouteMissesLossyLink(usize),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// Knobs for one simulation run.
#[derive(Debug, Clone)]
pub struct SimConfig {
    /// Sources emit packets for this many seconds; the run then drains.
    pub duration: f64,
    /// Measurement starts here; earlier packets are excluded.
    pub warmup: f64,
    /// Wire size of data and parity packets, bytes.
    pub packet_size_bytes: usize,
    /// Wire size of acknowledgements, bytes.
    pub ack_size_bytes: usize,
    /// Multiplier on every link rate, for scaling experiments down to
    /// tractable packet counts while keeping utilization fixed.
    pub rate_scale: f64,
    /// Retransmission timer as a multiple of the flow's propagation
    /// round trip.
    pub timeout_multiplier: f64,
    /// Transmission budget per packet (original + retransmissions).
    pub max_attempts: u32,
    /// Subject acknowledgements to the lossy link too.
    pub ack_lossy: bool,
    /// Enable the coding pair around the lossy link.
    pub coding: Option<crate::coding::CodingParams>,
    /// Master seed for all random streams.
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            duration: 15.0,
            warmup: 1.5,
            packet_size_bytes: 1500,
            ack_size_bytes: 64,
            rate_scale: 1.0,
            timeout_multiplier: 3.0,
            max_attempts: 100,
            ack_lossy: false,
            coding: None,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
enum PacketKind {
    Data,
    Parity,
    Ack(AckRecord),
}

#[derive(Debug, Clone)]
struct Packet {
    flow: usize,
    seq: u64,
    /// Creation time of the original copy; retransmissions inherit it,
    /// and it also attributes the packet to the measurement window.
    created_at: f64,
    kind: PacketKind,
    tag: Option<CodedPacketTag>,
    payload: Vec<u8>,
    size_bytes: usize,
    /// Links already crossed (for acks: reverse links already crossed).
    hop: usize,
}

enum Event {
    Source {
        flow: usize,
    },
    Departure {
        link: usize,
        dir: usize,
    },
    Deliver {
        node: usize,
        via_link: usize,
        packet: Packet,
    },
    Timeout {
        flow: usize,
        seq: u64,
        gen: u32,
    },
}

#[derive(Default)]
struct DirQueue {
    queue: VecDeque<Packet>,
    busy: bool,
}

struct FlowState {
    nodes: Vec<usize>,
    links: Vec<usize>,
    lambda: f64,
    /// Position of the lossy link within `links`.
    lossy_pos: usize,
    rto: f64,
    sender: Sender,
    receiver: Receiver,
    rng: ChaCha8Rng,
}

struct Engine<'a> {
    topology: &'a Topology,
    cfg: &'a SimConfig,
    flows: Vec<FlowState>,
    lossy: usize,
    epsilon: f64,
    queues: Vec<[DirQueue; 2]>,
    erasure: [ChaCha8Rng; 2],
    ingress: [Option<IngressCoder>; 2],
    egress: [Option<EgressDecoder>; 2],
    events: EventQueue<Event>,
    stats: Collector,
    now: f64,
}

fn encode_payload_record(flow: u32, seq: u64, created_at: f64) -> [u8; RECORD_LEN] {
    let mut r = [0u8; RECORD_LEN];
    r[0..4].copy_from_slice(&flow.to_be_bytes());
    r[4..12].copy_from_slice(&seq.to_be_bytes());
    r[12..20].copy_from_slice(&created_at.to_bits().to_be_bytes());
    r
}

fn decode_payload_record(bytes: &[u8]) -> (u32, u64, f64) {
    assert_eq!(bytes.len(), RECORD_LEN, "malformed packet record");
    let flow = u32::from_be_bytes(bytes[0..4].try_into().unwrap());
    let seq = u64::from_be_bytes(bytes[4..12].try_into().unwrap());
    let created_at = f64::from_bits(u64::from_be_bytes(bytes[12..20].try_into().unwrap()));
    (flow, seq, created_at)
}

fn transmission_time(size_bytes: usize, rate_bps: f64) -> f64 {
    (size_bytes as f64 * 8.0) / rate_bps
}

/// Runs one simulation of the given flows over the topology. Flow rates
/// are in packets per second. The topology must designate exactly one
/// lossy link and every flow must cross it.
pub fn run(
    topology: &Topology,
    flows: &[(RoutedFlow, f64)],
    cfg: &SimConfig,
) -> Result<SimResult, SimError> {
    if flows.is_empty() {
        return Err(SimError::NoFlows);
    }
    if !(cfg.warmup >= 0.0 && cfg.duration > cfg.warmup && cfg.duration.is_finite()) {
        return Err(SimError::InvalidWindow {
            duration: cfg.duration,
            warmup: cfg.warmup,
        });
    }
    if !(cfg.rate_scale > 0.0 && cfg.rate_scale.is_finite()) {
        return Err(SimError::InvalidConfig(
            "rate_scale must be positive and finite",
        ));
    }
    if !(cfg.timeout_multiplier > 0.0 && cfg.timeout_multiplier.is_finite()) {
        return Err(SimError::InvalidConfig(
            "timeout_multiplier must be positive and finite",
        ));
    }
    if cfg.max_attempts == 0 {
        return Err(SimError::InvalidConfig("max_attempts must be at least 1"));
    }
    if cfg.packet_size_bytes < RECORD_LEN + MAX_TAG_LEN {
        return Err(SimError::PacketTooSmall(cfg.packet_size_bytes));
    }
    if cfg.ack_size_bytes == 0 {
        return Err(SimError::InvalidConfig("ack_size_bytes must be at least 1"));
    }
    assert!(flows.len() <= u32::MAX as usize, "flow id must fit in u32");

    let lossy = topology.lossy_link()?;
    let epsilon = topology.links[lossy].loss_prob;
    let gated = cfg.coding.map(|p| p.n() > p.k()).unwrap_or(false);

    let mut flow_states = Vec::with_capacity(flows.len());
    for (i, (route, lambda)) in flows.iter().enumerate() {
        if !(lambda.is_finite() && *lambda > 0.0) {
            return Err(SimError::InvalidFlowRate(*lambda));
        }
        let mut nodes = vec![route.src];
        let mut cursor = route.src;
        let mut rtt = 0.0;
        for (hop, &l) in route.links.iter().enumerate() {
            let link = topology
                .links
                .get(l)
                .ok_or(SimError::BrokenRoute { flow: i, hop })?;
            if link.a != cursor && link.b != cursor {
                return Err(SimError::BrokenRoute { flow: i, hop });
            }
            cursor = link.other(cursor);
            nodes.push(cursor);
            rtt += 2.0 * link.latency_s;
        }
        if cursor != route.dst {
            return Err(SimError::BrokenRoute {
                flow: i,
                hop: route.links.len(),
            });
        }
        let lossy_pos = route
            .links
            .iter()
            .position(|&l| l == lossy)
            .ok_or(SimError::RouteMissesLossyLink(i))?;
        flow_states.push(FlowState {
            nodes,
            links: route.links.clone(),
            lambda: *lambda,
            lossy_pos,
            rto: cfg.timeout_multiplier * rtt,
            sender: Sender::new(cfg.max_attempts),
            // A repair needs one round trip to land; re-request a hole
            // that outlives two.
            receiver: Receiver::new(gated, 2.0 * rtt),
            rng: derive_rng(cfg.seed, StreamDomain::Source, i as u64),
        });
    }

    let queues = (0..topology.links.len())
        .map(|_| [DirQueue::default(), DirQueue::default()])
        .collect();
    let (ingress, egress) = match cfg.coding {
        Some(params) => (
            [
                Some(IngressCoder::new(params)),
                Some(IngressCoder::new(params)),
            ],
            [
                Some(EgressDecoder::new(params)),
                Some(EgressDecoder::new(params)),
            ],
        ),
        None => ([None, None], [None, None]),
    };

    let mut engine = Engine {
        topology,
        cfg,
        flows: flow_states,
        lossy,
        epsilon,
        queues,
        erasure: [
            derive_rng(cfg.seed, StreamDomain::Erasure, 0),
            derive_rng(cfg.seed, StreamDomain::Erasure, 1),
        ],
        ingress,
        egress,
        events: EventQueue::new(),
        stats: Collector::new(topology.links.len()),
        now: 0.0,
    };
    Ok(engine.run())
}

impl Engine<'_> {
    fn run(&mut self) -> SimResult {
        for f in 0..self.flows.len() {
            let fs = &mut self.flows[f];
            let t = sample_exponential(&mut fs.rng, fs.lambda);
            if t < self.cfg.duration {
                self.events.push(t, Event::Source { flow: f });
            }
        }

        while let Some((t, event)) = self.events.pop() {
            debug_assert!(t >= self.now, "event time went backwards");
            self.now = t;
            match event {
                Event::Source { flow } => self.on_source(flow),
                Event::Departure { link, dir } => self.on_departure(link, dir),
                Event::Deliver {
                    node,
                    via_link,
                    packet,
                } => self.on_deliver(node, via_link, packet),
                Event::Timeout { flow, seq, gen } => self.on_timeout(flow, seq, gen),
            }
        }

        let result = std::mem::replace(&mut self.stats, Collector::new(0))
            .finalize(self.cfg.duration - self.cfg.warmup);
        assert!(result.delivered <= result.created);
        if result.abandoned == 0 {
            assert_eq!(
                result.created, result.delivered,
                "drained run must deliver every packet exactly once"
            );
        }
        result
    }

    fn in_window(&self, t: f64) -> bool {
        t >= self.cfg.warmup && t < self.cfg.duration
    }

    fn direction(&self, link: usize, from: usize) -> usize {
        let l = &self.topology.links[link];
        debug_assert!(from == l.a || from == l.b);
        usize::from(from != l.a)
    }

    fn on_source(&mut self, flow: usize) {
        let next = {
            let fs = &mut self.flows[flow];
            self.now + sample_exponential(&mut fs.rng, fs.lambda)
        };
        if next < self.cfg.duration {
            self.events.push(next, Event::Source { flow });
        }

        let (seq, gen) = self.flows[flow].sender.on_source(self.now);
        self.stats.created += 1;
        if self.in_window(self.now) {
            self.stats.originals += 1;
        }
        self.send_data(flow, seq, self.now, false, gen);
    }

    /// Injects one data packet (fresh or retransmitted) at its source
    /// and arms the retransmission timer.
    fn send_data(
        &mut self,
        flow: usize,
        seq: u64,
        created_at: f64,
        retransmission: bool,
        gen: u32,
    ) {
        let (first_link, src, rto) = {
            let fs = &self.flows[flow];
            (fs.links[0], fs.nodes[0], fs.rto)
        };
        if retransmission && self.in_window(created_at) {
            self.stats.retransmissions += 1;
        }
        let packet = Packet {
            flow,
            seq,
            created_at,
            kind: PacketKind::Data,
            tag: None,
            payload: encode_payload_record(flow as u32, seq, created_at).to_vec(),
            size_bytes: self.cfg.packet_size_bytes,
            hop: 0,
        };
        self.events
            .push(self.now + rto, Event::Timeout { flow, seq, gen });
        self.enqueue(first_link, src, packet);
    }

    /// Queues a packet for transmission from `from` onto `link`. Data
    /// entering the coded link is tagged here, and a completed block's
    /// parity packets queue up right behind their last data packet.
    fn enqueue(&mut self, link: usize, from: usize, mut packet: Packet) {
        let dir = self.direction(link, from);
        if link == self.lossy && matches!(packet.kind, PacketKind::Data) {
            if let Some(ingress) = self.ingress[dir].as_mut() {
                let (tag, parity) = ingress.on_data(&packet.payload);
                packet.tag = Some(tag);
                // Parity inherits the triggering packet's window
                // attribution: a block's cost belongs to the window its
                // data belongs to.
                let block_stamp = packet.created_at;
                self.count_link_entry(link, packet.created_at);
                self.push_packet(link, dir, packet);
                for (ptag, symbol) in parity {
                    let parity_packet = Packet {
                        flow: usize::MAX,
                        seq: 0,
                        created_at: block_stamp,
                        kind: PacketKind::Parity,
                        tag: Some(ptag),
                        payload: symbol,
                        size_bytes: self.cfg.packet_size_bytes,
                        hop: 0,
                    };
                    self.count_link_entry(link, block_stamp);
                    self.push_packet(link, dir, parity_packet);
                }
                return;
            }
        }
        if !matches!(packet.kind, PacketKind::Ack(_)) {
            self.count_link_entry(link, packet.created_at);
        }
        self.push_packet(link, dir, packet);
    }

    fn count_link_entry(&mut self, link: usize, created_at: f64) {
        if self.in_window(created_at) {
            self.stats.link_entries[link] += 1;
        }
    }

    fn push_packet(&mut self, link: usize, dir: usize, packet: Packet) {
        let rate = self.topology.links[link].rate_bps * self.cfg.rate_scale;
        let service = transmission_time(packet.size_bytes, rate);
        let q = &mut self.queues[link][dir];
        q.queue.push_back(packet);
        if !q.busy {
            q.busy = true;
            self.events
                .push(self.now + service, Event::Departure { link, dir });
        }
    }

    /// The head packet finished transmitting: draw its fate on the
    /// lossy link, propagate it, and start on the next packet in line.
    fn on_departure(&mut self, link: usize, dir: usize) {
        let rate = self.topology.links[link].rate_bps * self.cfg.rate_scale;
        let (packet, next_size) = {
            let q = &mut self.queues[link][dir];
            let p = q.queue.pop_front().expect("departure from empty queue");
            let next_size = q.queue.front().map(|n| n.size_bytes);
            q.busy = next_size.is_some();
            (p, next_size)
        };
        if let Some(size) = next_size {
            self.events.push(
                self.now + transmission_time(size, rate),
                Event::Departure { link, dir },
            );
        }

        if link == self.lossy {
            let eligible = match packet.kind {
                PacketKind::Ack(_) => self.cfg.ack_lossy,
                _ => true,
            };
            if eligible && self.erasure[dir].random::<f64>() < self.epsilon {
                match packet.kind {
                    PacketKind::Data => self.stats.data_drops += 1,
                    PacketKind::Parity => self.stats.parity_drops += 1,
                    PacketKind::Ack(_) => self.stats.ack_drops += 1,
                }
                return;
            }
        }

        let l = &self.topology.links[link];
        let node = if dir == 0 { l.b } else { l.a };
        self.events.push(
            self.now + l.latency_s,
            Event::Deliver {
                node,
                via_link: link,
                packet,
            },
        );
    }

    /// Direction index of a crossing that just arrived at `node` over
    /// the lossy link.
    fn crossing_direction(&self, node: usize) -> usize {
        usize::from(node != self.topology.links[self.lossy].b)
    }

    fn on_deliver(&mut self, node: usize, via_link: usize, mut packet: Packet) {
        match packet.kind {
            PacketKind::Ack(_) => {
                packet.hop += 1;
                let flow = packet.flow;
                if node == self.flows[flow].nodes[0] {
                    let PacketKind::Ack(ack) = packet.kind else {
                        unreachable!()
                    };
                    let retransmits = self.flows[flow].sender.on_ack(&ack, self.now);
                    for r in retransmits {
                        self.send_data(flow, r.seq, r.created_at, true, r.gen);
                    }
                } else {
                    let back_link = {
                        let fs = &self.flows[flow];
                        fs.links[fs.links.len() - 1 - packet.hop]
                    };
                    self.enqueue(back_link, node, packet);
                }
            }
            PacketKind::Parity => {
                debug_assert_eq!(via_link, self.lossy, "parity only lives on the lossy link");
                let dir = self.crossing_direction(node);
                let recovered = match self.egress[dir].as_mut() {
                    Some(egress) => egress.on_symbol(
                        packet.tag.as_ref().expect("parity packets are tagged"),
                        &packet.payload,
                    ),
                    None => Vec::new(),
                };
                self.emit_recovered(node, recovered);
            }
            PacketKind::Data => {
                packet.hop += 1;
                if via_link == self.lossy && self.cfg.coding.is_some() {
                    let dir = self.crossing_direction(node);
                    let tag = packet.tag.expect("coded data packets are tagged");
                    let recovered = self.egress[dir]
                        .as_mut()
                        .expect("decoder exists when coding is on")
                        .on_symbol(&tag, &packet.payload);
                    self.forward_or_deliver(node, packet);
                    self.emit_recovered(node, recovered);
                } else {
                    self.forward_or_deliver(node, packet);
                }
            }
        }
    }

    /// Turns decoder output back into live packets continuing from the
    /// egress node.
    fn emit_recovered(&mut self, node: usize, recovered: Vec<(CodedPacketTag, Vec<u8>)>) {
        for (tag, payload) in recovered {
            let (flow_id, seq, created_at) = decode_payload_record(&payload);
            let flow = flow_id as usize;
            assert!(flow < self.flows.len(), "decoded record names a real flow");
            if self.in_window(created_at) {
                self.stats.recovered += 1;
            }
            let packet = Packet {
                flow,
                seq,
                created_at,
                kind: PacketKind::Data,
                tag: Some(tag),
                payload,
                size_bytes: self.cfg.packet_size_bytes,
                hop: self.flows[flow].lossy_pos + 1,
            };
            self.forward_or_deliver(node, packet);
        }
    }

    fn forward_or_deliver(&mut self, node: usize, packet: Packet) {
        let flow = packet.flow;
        let dst = *self.flows[flow].nodes.last().expect("route has nodes");
        if node != dst {
            let next = self.flows[flow].links[packet.hop];
            self.enqueue(next, node, packet);
            return;
        }

        let outcome = self.flows[flow].receiver.on_data(
            packet.seq,
            packet.created_at,
            packet.tag.as_ref().map(|t| t.block_id),
            self.now,
        );
        for &(_, created) in &outcome.deliveries {
            self.stats.delivered += 1;
            if self.in_window(created) {
                self.stats.delivered_in_window += 1;
                self.stats.delays.push(self.now - created);
            }
        }
        if outcome.duplicate && self.in_window(packet.created_at) {
            self.stats.duplicate_arrivals += 1;
        }

        let ack = Packet {
            flow,
            seq: 0,
            created_at: self.now,
            kind: PacketKind::Ack(outcome.ack),
            tag: None,
            payload: Vec::new(),
            size_bytes: self.cfg.ack_size_bytes,
            hop: 0,
        };
        let back_link = *self.flows[flow].links.last().expect("route has links");
        self.enqueue(back_link, node, ack);
    }

    fn on_timeout(&mut self, flow: usize, seq: u64, gen: u32) {
        match self.flows[flow].sender.on_timeout(seq, gen, self.now) {
            TimeoutOutcome::Stale => {}
            TimeoutOutcome::Defer => {
                let rto = self.flows[flow].rto;
                self.events
                    .push(self.now + rto, Event::Timeout { flow, seq, gen });
            }
            TimeoutOutcome::Abandoned => self.stats.abandoned += 1,
            TimeoutOutcome::Retransmit(r) => self.send_data(flow, r.seq, r.created_at, true, r.gen),
        }
    }
}
