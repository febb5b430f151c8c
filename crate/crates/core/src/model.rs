//! Closed-form retransmission and goodput model for one lossy link
//! protected by systematic block coding.
//!
//! Packets cross the lossy link in blocks of `n` (of which `k` carry
//! data); each packet is erased independently with probability ε. A block
//! that keeps at least `k` of its `n` packets loses nothing; otherwise
//! every erased data packet must be retransmitted end to end. The
//! functions here give the resulting retransmission rate, the offered
//! load on the lossy and non-lossy links, and the goodput ratio between
//! running uncoded and running coded.

use crate::coding::CodingParams;
use crate::scalar::Scalar;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("erasure probability {0} outside [0, 1)")]
    InvalidEpsilon(f64),
    #[error("flow rate {0} must be positive and finite")]
    InvalidRate(f64),
    #[error("non-lossy hop count {0} must be non-negative and finite")]
    InvalidHopCount(f64),
    #[error("flow ensemble must not be empty")]
    EmptyEnsemble,
    #[error("retransmission feedback r={0} >= 1 diverges")]
    DivergentLoad(f64),
    #[error("goodput ratio cross-check failed: {ratio_form} vs {factored_form}")]
    Inconsistent { ratio_form: f64, factored_form: f64 },
    #[error("search grid k_max={k_max}, n_max={n_max} is empty or exceeds the block-length cap")]
    InvalidGrid { k_max: usize, n_max: usize },
}

/// Erasure probability of the one lossy link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossModel<F: Scalar> {
    epsilon: F,
}

impl<F: Scalar> LossModel<F> {
    pub fn new(epsilon: F) -> Result<Self, ModelError> {
        if !(epsilon >= F::zero() && epsilon < F::one()) {
            return Err(ModelError::InvalidEpsilon(
                epsilon.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(LossModel { epsilon })
    }

    #[inline]
    pub fn epsilon(&self) -> F {
        self.epsilon
    }
}

/// One sender: packet rate plus how many non-lossy links its path uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flow<F: Scalar> {
    /// Packet arrival rate in packets per second.
    pub lambda: F,
    /// Number of non-lossy links on the flow's path. Fractional values
    /// are allowed so an averaged path length can stand in for a set of
    /// flows.
    pub eta: F,
}

/// The set of flows sharing the lossy link.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowEnsemble<F: Scalar> {
    flows: Vec<Flow<F>>,
}

impl<F: Scalar> FlowEnsemble<F> {
    pub fn new(flows: Vec<Flow<F>>) -> Result<Self, ModelError> {
        if flows.is_empty() {
            return Err(ModelError::EmptyEnsemble);
        }
        for flow in &flows {
            if !(flow.lambda > F::zero() && flow.lambda.is_finite()) {
                return Err(ModelError::InvalidRate(
                    flow.lambda.to_f64().unwrap_or(f64::NAN),
                ));
            }
            if !(flow.eta >= F::zero() && flow.eta.is_finite()) {
                return Err(ModelError::InvalidHopCount(
                    flow.eta.to_f64().unwrap_or(f64::NAN),
                ));
            }
        }
        Ok(FlowEnsemble { flows })
    }

    pub fn flows(&self) -> &[Flow<F>] {
        &self.flows
    }

    /// Σ λ_i.
    pub fn total_rate(&self) -> F {
        self.flows.iter().fold(F::zero(), |acc, f| acc + f.lambda)
    }

    /// Σ η_i λ_i.
    pub fn weighted_hop_rate(&self) -> F {
        self.flows
            .iter()
            .fold(F::zero(), |acc, f| acc + f.eta * f.lambda)
    }

    /// Σ (η_i + 1) λ_i — the end-to-end delivery work per second.
    pub fn goodput_weight(&self) -> F {
        self.flows
            .iter()
            .fold(F::zero(), |acc, f| acc + (f.eta + F::one()) * f.lambda)
    }
}

/// Cumulative log-factorial table: `table[m] = ln(m!)`, exact at integer
/// arguments by direct summation, which keeps binomial coefficients for
/// block lengths up to 255 accurate to a few ulps in log space.
struct LnFactorial<F> {
    table: Vec<F>,
}

impl<F: Scalar> LnFactorial<F> {
    fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        let mut acc = F::zero();
        table.push(acc);
        for i in 1..=max {
            acc = acc + F::from_count(i).ln();
            table.push(acc);
        }
        LnFactorial { table }
    }

    /// ln C(n, r); zero for the degenerate r = 0 or r = n cases.
    #[inline]
    fn ln_choose(&self, n: usize, r: usize) -> F {
        debug_assert!(r <= n);
        self.table[n] - self.table[r] - self.table[n - r]
    }
}

/// Expected fraction of data packets that need an end-to-end retransmission
/// per block, for a block of `n` packets carrying `k` data packets over a
/// link with erasure probability ε.
///
/// Summed in log space: the contribution of `q` total erasures of which
/// `c` hit data packets is `c·C(k,c)·C(n-k,q-c)·ε^q·(1-ε)^(n-q)`, counted
/// only when the block is unrecoverable (q > n-k), and averaged over the
/// k data packets.
pub fn retrans_rate_coded<F: Scalar>(params: &CodingParams, loss: &LossModel<F>) -> F {
    let table = LnFactorial::new(params.n());
    retrans_rate_coded_with(&table, params.k(), params.n(), loss.epsilon())
}

fn retrans_rate_coded_with<F: Scalar>(table: &LnFactorial<F>, k: usize, n: usize, epsilon: F) -> F {
    if epsilon == F::zero() {
        return F::zero();
    }
    let ln_eps = epsilon.ln();
    let ln_keep = (F::one() - epsilon).ln();
    let parity = n - k;

    let mut expected_losses = F::zero();
    for q in (parity + 1)..=n {
        let ln_pattern = F::from_count(q) * ln_eps + F::from_count(n - q) * ln_keep;
        let c_lo = 1.max(q.saturating_sub(parity));
        let c_hi = k.min(q);
        let mut inner = F::zero();
        for c in c_lo..=c_hi {
            let ln_term =
                F::from_count(c).ln() + table.ln_choose(k, c) + table.ln_choose(parity, q - c);
            inner = inner + (ln_term + ln_pattern).exp();
        }
        expected_losses = expected_losses + inner;
    }
    expected_losses / F::from_count(k)
}

/// Without coding every erased packet is retransmitted, so the rate is ε
/// itself.
pub fn retrans_rate_uncoded<F: Scalar>(loss: &LossModel<F>) -> F {
    loss.epsilon()
}

/// Offered packet rate on the lossy link: raw traffic expanded by n/k for
/// parity and by the retransmission feedback 1/(1-r).
pub fn lambda_lossy<F: Scalar>(
    flows: &FlowEnsemble<F>,
    params: &CodingParams,
    retrans_rate: F,
) -> Result<F, ModelError> {
    let feedback = retransmission_feedback(retrans_rate)?;
    let rate = F::from_count(params.n()) / F::from_count(params.k());
    Ok(rate * flows.total_rate() * feedback)
}

/// Total offered packet rate across all non-lossy links: each flow loads
/// η_i of them, again inflated by the retransmission feedback.
pub fn lambda_nonlossy<F: Scalar>(
    flows: &FlowEnsemble<F>,
    retrans_rate: F,
) -> Result<F, ModelError> {
    let feedback = retransmission_feedback(retrans_rate)?;
    Ok(flows.weighted_hop_rate() * feedback)
}

fn retransmission_feedback<F: Scalar>(retrans_rate: F) -> Result<F, ModelError> {
    if !(retrans_rate >= F::zero() && retrans_rate < F::one()) {
        return Err(ModelError::DivergentLoad(
            retrans_rate.to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(F::one() / (F::one() - retrans_rate))
}

/// Everything the model has to say about one (ensemble, ε, k, n) point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelReport<F: Scalar> {
    /// Per-original retransmission probability with coding (block based).
    pub retrans_rate_coded: F,
    /// Per-original retransmission probability without coding (= ε).
    pub retrans_rate_uncoded: F,
    /// Offered packet rate on the lossy link with coding.
    pub lambda_lossy_coded: F,
    /// Offered packet rate over all non-lossy links with coding.
    pub lambda_nonlossy_coded: F,
    /// Offered packet rate on the lossy link without coding.
    pub lambda_lossy_uncoded: F,
    /// Offered packet rate over all non-lossy links without coding.
    pub lambda_nonlossy_uncoded: F,
    /// Delivered work per unit of network transmission work, coded.
    pub goodput_coded: F,
    /// Delivered work per unit of network transmission work, uncoded.
    pub goodput_uncoded: F,
    /// goodput_coded / goodput_uncoded; > 1 means coding wins.
    pub delta: F,
}

/// Computes the full report. The goodput ratio is evaluated two ways —
/// as the ratio of total offered rates and in the factored closed form —
/// and the two must agree to within numerical noise.
pub fn goodput_ratio<F: Scalar>(
    flows: &FlowEnsemble<F>,
    params: &CodingParams,
    loss: &LossModel<F>,
) -> Result<ModelReport<F>, ModelError> {
    let r_coded = retrans_rate_coded(params, loss);
    let r_uncoded = retrans_rate_uncoded(loss);
    let uncoded_params = CodingParams::new(params.k(), params.k())
        .expect("uncoded geometry is valid whenever the coded one is");

    let lambda_lossy_coded = lambda_lossy(flows, params, r_coded)?;
    let lambda_nonlossy_coded = lambda_nonlossy(flows, r_coded)?;
    let lambda_lossy_uncoded = lambda_lossy(flows, &uncoded_params, r_uncoded)?;
    let lambda_nonlossy_uncoded = lambda_nonlossy(flows, r_uncoded)?;

    let weight = flows.goodput_weight();
    let total_coded = lambda_lossy_coded + lambda_nonlossy_coded;
    let total_uncoded = lambda_lossy_uncoded + lambda_nonlossy_uncoded;
    let goodput_coded = weight / total_coded;
    let goodput_uncoded = weight / total_uncoded;

    let ratio_form = total_uncoded / total_coded;
    let factored_form = delta_factored(flows, params, loss.epsilon(), r_coded);

    let tolerance = F::from_f64(1e-9).expect("tolerance representable");
    let scale = ratio_form.abs().max(factored_form.abs()).max(F::one());
    if (ratio_form - factored_form).abs() > tolerance * scale {
        return Err(ModelError::Inconsistent {
            ratio_form: ratio_form.to_f64().unwrap_or(f64::NAN),
            factored_form: factored_form.to_f64().unwrap_or(f64::NAN),
        });
    }

    Ok(ModelReport {
        retrans_rate_coded: r_coded,
        retrans_rate_uncoded: r_uncoded,
        lambda_lossy_coded,
        lambda_nonlossy_coded,
        lambda_lossy_uncoded,
        lambda_nonlossy_uncoded,
        goodput_coded,
        goodput_uncoded,
        delta: ratio_form,
    })
}

/// Closed form of the goodput ratio:
/// ((1-R)/(1-ε)) · Σλ(η+1) / Σλ(η + n/k).
fn delta_factored<F: Scalar>(
    flows: &FlowEnsemble<F>,
    params: &CodingParams,
    epsilon: F,
    r_coded: F,
) -> F {
    let rate = F::from_count(params.n()) / F::from_count(params.k());
    let denom = flows
        .flows()
        .iter()
        .fold(F::zero(), |acc, f| acc + (f.eta + rate) * f.lambda);
    (F::one() - r_coded) / (F::one() - epsilon) * flows.goodput_weight() / denom
}

/// Exhaustive search for the (k, n) pair maximizing the goodput ratio on
/// the grid 1 <= k <= k_max, k <= n <= n_max. Ties resolve to the
/// lexicographically smallest (k, n), so the result does not depend on
/// evaluation order.
pub fn optimize_params<F: Scalar>(
    flows: &FlowEnsemble<F>,
    loss: &LossModel<F>,
    k_max: usize,
    n_max: usize,
) -> Result<(CodingParams, F), ModelError> {
    if k_max == 0 || n_max == 0 || n_max > crate::coding::MAX_BLOCK_LEN {
        return Err(ModelError::InvalidGrid { k_max, n_max });
    }
    let table = LnFactorial::new(n_max);
    let mut best: Option<(CodingParams, F)> = None;
    for k in 1..=k_max.min(n_max) {
        for n in k..=n_max {
            let params = CodingParams::new(k, n).expect("grid point is valid");
            let r = retrans_rate_coded_with(&table, k, n, loss.epsilon());
            let delta = delta_factored(flows, &params, loss.epsilon(), r);
            let better = match &best {
                None => true,
                Some((_, best_delta)) => delta > *best_delta,
            };
            if better {
                best = Some((params, delta));
            }
        }
    }
    best.ok_or(ModelError::EmptyEnsemble)
}
