//! Link-local erasure coding for lossy network paths: an analytic model
//! of retransmission cost and goodput, a systematic MDS coder over
//! GF(2^8), and an event-driven packet simulator that exercises both.
//!
//! The crate answers one question from two directions: when a single
//! lossy link sits inside a longer path, how much does transparently
//! coding across it (k data packets protected by n-k parity packets
//! between the adjacent switches) reduce end-to-end retransmission
//! traffic and delay?
//!
//! * [`gf256`] — arithmetic in GF(2^8) used by the coder.
//! * [`coding`] — systematic MDS encode/decode and the packet tag format.
//! * [`model`] — closed-form retransmission rate, offered-load and
//!   goodput-ratio formulas, and a parameter optimizer. Generic over the
//!   scalar type via [`scalar::Scalar`].
//! * [`topology`] — the built-in chain scenario, GraphML import, routing
//!   and load normalization.
//! * [`rng`] — deterministic per-entity random stream derivation.
//! * [`sim`] — the event-driven simulator and its metrics.

pub mod coding;
pub mod gf256;
pub mod model;
pub mod rng;
pub mod scalar;
pub mod sim;
pub mod topology;

pub use coding::{
    decode_block, encode_block, BlockEncoder, CodedPacketTag, CodingError, CodingParams,
    GeneratorMatrix, MAX_BLOCK_LEN,
};
pub use gf256::Gf256;
pub use model::{
    goodput_ratio, lambda_lossy, lambda_nonlossy, optimize_params, retrans_rate_coded,
    retrans_rate_uncoded, Flow, FlowEnsemble, LossModel, ModelError, ModelReport,
};
pub use scalar::Scalar;
pub use sim::{SimConfig, SimError, SimResult};
pub use topology::{
    builtin_scenario1, load_graphml, load_graphml_str, normalize_load, route, Link, Node,
    RoutedFlow, Topology, TopologyError,
};

/// Default floating-point type for simulation and reporting. The model
/// is generic; everything that touches wall-clock time uses this alias.
pub type Real = f64;
