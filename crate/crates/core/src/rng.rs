//! Deterministic stream derivation: one master seed fans out into
//! independent per-entity generators (per-flow traffic sources, per-link
//! erasure draws) so simulations replay bit-identically regardless of
//! entity iteration order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags keep streams for different purposes disjoint even when
/// their entity indices collide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamDomain {
    /// Packet inter-arrival draws for one traffic source.
    Source,
    /// Erasure draws for one direction of the lossy link.
    Erasure,
    /// Per-flow rate draws when building a random ensemble.
    FlowRates,
}

impl StreamDomain {
    fn tag(self) -> u64 {
        match self {
            StreamDomain::Source => 0x736f_7572_6365_0001,
            StreamDomain::Erasure => 0x6572_6173_7572_6502,
            StreamDomain::FlowRates => 0x666c_6f77_7261_7403,
        }
    }
}

/// SplitMix64 step: the de-facto standard seed expander. Each call
/// advances the state by the golden-ratio increment and returns a
/// well-mixed 64-bit value.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent generator from `(master, domain, index)`.
/// The 256-bit ChaCha seed comes from iterating SplitMix64 over a state
/// mixed from all three inputs.
pub fn derive_rng(master: u64, domain: StreamDomain, index: u64) -> ChaCha8Rng {
    let mut state =
        master ^ domain.tag().rotate_left(17) ^ index.wrapping_mul(0xd134_2543_de82_ef95);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Draws an exponential inter-arrival time with the given rate.
pub fn sample_exponential(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    use rand::Rng;
    debug_assert!(rate > 0.0);
    // random::<f64>() is uniform on [0, 1); flipping it to (0, 1] keeps
    // ln away from zero.
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate
}
