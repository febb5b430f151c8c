//! Systematic maximum-distance-separable block coding over GF(2^8).
//!
//! A block of `k` data packets is expanded to `n` packets: the `k`
//! originals pass through unchanged, followed by `n - k` parity packets.
//! Any `k` of the `n` suffice to reconstruct the originals, which is the
//! best any code can do against `n - k` erasures.
//!
//! The generator matrix starts from an n-by-k Vandermonde matrix over
//! distinct nonzero field elements (any k rows of which are invertible),
//! and is row-reduced so the top k-by-k block is the identity. Parity rows
//! are scaled so their first nonzero coefficient is 1, making the matrix
//! canonical for a given (k, n).

use crate::gf256::{mul_acc_slice, Gf256};
use thiserror::Error;

/// Largest supported block length; one fewer than the field size so that
/// every packet index maps to a distinct nonzero evaluation point.
pub const MAX_BLOCK_LEN: usize = 255;

/// Payload ceiling leaving room for the two-byte length prefix folded into
/// parity symbols while keeping lengths representable in 16 bits.
pub const MAX_PAYLOAD_LEN: usize = u16::MAX as usize - LEN_PREFIX;

/// Width of the length prefix embedded in parity symbols so that decode
/// can restore the exact length of a reconstructed payload.
const LEN_PREFIX: usize = 2;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodingError {
    #[error("invalid coding parameters k={k}, n={n}: need 0 < k <= n <= {MAX_BLOCK_LEN}")]
    InvalidParams { k: usize, n: usize },
    #[error("block expects exactly {expected} payloads, got {got}")]
    WrongPayloadCount { expected: usize, got: usize },
    #[error("payload of {got} bytes exceeds the {MAX_PAYLOAD_LEN}-byte limit")]
    PayloadTooLarge { got: usize },
    #[error("duplicate packet index {index} in decode input")]
    DuplicateIndex { index: u8 },
    #[error("packet index {index} out of range for block length {n}")]
    IndexOutOfRange { index: u8, n: usize },
    #[error("parity payload of {got} bytes does not match block symbol width {expected}")]
    InconsistentSymbolWidth { expected: usize, got: usize },
    #[error("block unrecoverable: {received} packets received, {needed} needed")]
    Unrecoverable { received: usize, needed: usize },
    #[error("tag truncated: need {needed} bytes, got {got}")]
    TagTruncated { needed: usize, got: usize },
}

/// Block geometry: `k` data packets coded into `n` on-the-wire packets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodingParams {
    k: usize,
    n: usize,
}

impl CodingParams {
    pub fn new(k: usize, n: usize) -> Result<Self, CodingError> {
        if k == 0 || k > n || n > MAX_BLOCK_LEN {
            return Err(CodingError::InvalidParams { k, n });
        }
        Ok(CodingParams { k, n })
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// n/k, the bandwidth expansion on the coded link.
    pub fn rate(&self) -> f64 {
        self.n as f64 / self.k as f64
    }

    /// Bytes used by the packet-index field in a serialized tag: the
    /// smallest whole number of bytes covering ceil(log2 n) bits.
    pub fn index_bytes(&self) -> usize {
        let bits = if self.n <= 1 {
            0
        } else {
            usize::BITS - (self.n - 1).leading_zeros()
        };
        bits.div_ceil(8) as usize
    }

    /// Serialized tag length for this block geometry.
    pub fn tag_len(&self) -> usize {
        4 + self.index_bytes() + 2
    }
}

/// Per-packet coding metadata carried next to the payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodedPacketTag {
    /// Block sequence number; wraps around at u32::MAX.
    pub block_id: u32,
    /// Position within the block: `< k` systematic, `>= k` parity.
    pub index: u8,
    /// Exact payload length in bytes, before any padding.
    pub payload_len: u16,
}

impl CodedPacketTag {
    /// `true` when the packet carries an original payload unchanged.
    pub fn is_systematic(&self, params: &CodingParams) -> bool {
        (self.index as usize) < params.k()
    }
}

/// Wire form of a tag: block_id as 32-bit big-endian, then the packet
/// index in ceil(log2 n) bits padded to whole bytes (big-endian), then
/// payload_len as 16-bit big-endian.
pub fn serialize_tag(params: &CodingParams, tag: &CodedPacketTag) -> Vec<u8> {
    let mut out = Vec::with_capacity(params.tag_len());
    out.extend_from_slice(&tag.block_id.to_be_bytes());
    let idx_bytes = params.index_bytes();
    if idx_bytes > 0 {
        // n <= 255 keeps the index within a single byte today; the loop
        // form keeps the layout well-defined if the bound ever grows.
        let idx = tag.index as u64;
        for shift in (0..idx_bytes).rev() {
            out.push((idx >> (8 * shift)) as u8);
        }
    }
    out.extend_from_slice(&tag.payload_len.to_be_bytes());
    out
}

pub fn deserialize_tag(
    params: &CodingParams,
    bytes: &[u8],
) -> Result<(CodedPacketTag, usize), CodingError> {
    let needed = params.tag_len();
    if bytes.len() < needed {
        return Err(CodingError::TagTruncated {
            needed,
            got: bytes.len(),
        });
    }
    let block_id = u32::from_be_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]);
    let idx_bytes = params.index_bytes();
    let mut index: u64 = 0;
    for &b in &bytes[4..4 + idx_bytes] {
        index = (index << 8) | b as u64;
    }
    let len_off = 4 + idx_bytes;
    let payload_len = u16::from_be_bytes([bytes[len_off], bytes[len_off + 1]]);
    let index = index as u8;
    if index as usize >= params.n() {
        return Err(CodingError::IndexOutOfRange {
            index,
            n: params.n(),
        });
    }
    Ok((
        CodedPacketTag {
            block_id,
            index,
            payload_len,
        },
        needed,
    ))
}

/// Systematic generator matrix: `n` rows of `k` coefficients each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    params: CodingParams,
    rows: Vec<Vec<Gf256>>,
}

impl GeneratorMatrix {
    /// Builds the canonical generator for the given block geometry.
    pub fn build(params: CodingParams) -> Self {
        let (k, n) = (params.k(), params.n());
        // Vandermonde rows over the distinct nonzero points 1..=n.
        let mut rows: Vec<Vec<Gf256>> = (0..n)
            .map(|i| {
                let point = Gf256((i + 1) as u8);
                (0..k).map(|j| point.pow(j as u32)).collect()
            })
            .collect();

        // Right-multiply by the inverse of the top k-by-k block so the
        // systematic rows become the identity. Row-reduce [top | I] while
        // applying the same column operations to every row lazily: we
        // instead invert the top block and multiply it out, which is
        // simpler and runs once per geometry.
        let top_inv = invert(&rows[..k]).expect("Vandermonde top block is invertible");
        for row in rows.iter_mut() {
            let mut new_row = vec![Gf256::ZERO; k];
            for (j, cell) in new_row.iter_mut().enumerate() {
                let mut acc = Gf256::ZERO;
                for (c, &coeff) in row.iter().enumerate() {
                    acc += coeff * top_inv[c][j];
                }
                *cell = acc;
            }
            *row = new_row;
        }

        // Scale parity rows so the first nonzero coefficient is 1, making
        // the matrix canonical; row scaling preserves the MDS property.
        for row in rows.iter_mut().skip(k) {
            if let Some(first) = row.iter().find(|c| **c != Gf256::ZERO) {
                let scale = first.inv().expect("nonzero coefficient");
                for cell in row.iter_mut() {
                    *cell *= scale;
                }
            }
        }

        GeneratorMatrix { params, rows }
    }

    #[inline]
    pub fn params(&self) -> &CodingParams {
        &self.params
    }

    pub fn row(&self, i: usize) -> &[Gf256] {
        &self.rows[i]
    }
}

/// Inverts a square matrix given as row slices; `None` if singular.
fn invert(matrix: &[Vec<Gf256>]) -> Option<Vec<Vec<Gf256>>> {
    let k = matrix.len();
    let mut aug: Vec<Vec<Gf256>> = matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| if i == j { Gf256::ONE } else { Gf256::ZERO }));
            r
        })
        .collect();

    for col in 0..k {
        let pivot = (col..k).find(|&r| aug[r][col] != Gf256::ZERO)?;
        aug.swap(col, pivot);
        let inv = aug[col][col].inv().expect("pivot is nonzero");
        for cell in aug[col].iter_mut() {
            *cell *= inv;
        }
        for r in 0..k {
            if r != col && aug[r][col] != Gf256::ZERO {
                let factor = aug[r][col];
                let (head, tail) = if r < col {
                    let (a, b) = aug.split_at_mut(col);
                    (&mut a[r], &b[0])
                } else {
                    let (a, b) = aug.split_at_mut(r);
                    (&mut b[0], &a[col])
                };
                for (dst, src) in head.iter_mut().zip(tail.iter()) {
                    *dst += factor * *src;
                }
            }
        }
    }

    Some(aug.into_iter().map(|mut row| row.split_off(k)).collect())
}

/// Expands `k` payloads into `n` (tag, payload) pairs: the originals in
/// positions 0..k byte-for-byte, parity packets after them. Parity
/// payloads all share the block symbol width (two-byte length prefix plus
/// the longest original, zero-padded).
pub fn encode_block(
    generator: &GeneratorMatrix,
    block_id: u32,
    payloads: &[&[u8]],
) -> Result<Vec<(CodedPacketTag, Vec<u8>)>, CodingError> {
    let params = generator.params();
    let (k, n) = (params.k(), params.n());
    if payloads.len() != k {
        return Err(CodingError::WrongPayloadCount {
            expected: k,
            got: payloads.len(),
        });
    }
    if let Some(p) = payloads.iter().find(|p| p.len() > MAX_PAYLOAD_LEN) {
        return Err(CodingError::PayloadTooLarge { got: p.len() });
    }

    let width = symbol_width(payloads.iter().map(|p| p.len()).max().unwrap_or(0));
    let symbols: Vec<Vec<u8>> = payloads.iter().map(|p| to_symbol(p, width)).collect();

    let mut out = Vec::with_capacity(n);
    for (i, payload) in payloads.iter().enumerate() {
        out.push((
            CodedPacketTag {
                block_id,
                index: i as u8,
                payload_len: payload.len() as u16,
            },
            payload.to_vec(),
        ));
    }
    for i in k..n {
        let mut parity = vec![0u8; width];
        for (j, symbol) in symbols.iter().enumerate() {
            mul_acc_slice(&mut parity, symbol, generator.row(i)[j]);
        }
        out.push((
            CodedPacketTag {
                block_id,
                index: i as u8,
                payload_len: width as u16,
            },
            parity,
        ));
    }
    Ok(out)
}

/// Reconstructs all `k` original payloads from any `k` received packets
/// of one block. Returns them in index order, byte-identical to what was
/// encoded; fewer than `k` packets is reported as unrecoverable.
pub fn decode_block(
    generator: &GeneratorMatrix,
    received: &[(u8, &[u8])],
) -> Result<Vec<Vec<u8>>, CodingError> {
    let params = generator.params();
    let (k, n) = (params.k(), params.n());

    let mut seen = [false; MAX_BLOCK_LEN];
    for &(index, _) in received {
        if index as usize >= n {
            return Err(CodingError::IndexOutOfRange { index, n });
        }
        if seen[index as usize] {
            return Err(CodingError::DuplicateIndex { index });
        }
        seen[index as usize] = true;
    }
    if received.len() < k {
        return Err(CodingError::Unrecoverable {
            received: received.len(),
            needed: k,
        });
    }

    // Prefer systematic packets, then parity, keeping exactly k shards.
    let mut shards: Vec<(u8, &[u8])> = received.to_vec();
    shards.sort_by_key(|(index, _)| *index);
    shards.truncate(k);

    if shards.iter().all(|(index, _)| (*index as usize) < k) {
        // All originals present: nothing to solve.
        return Ok(shards.into_iter().map(|(_, p)| p.to_vec()).collect());
    }

    // Symbol width comes from any parity shard; at least one is present
    // on this path.
    let width = shards
        .iter()
        .find(|(index, _)| *index as usize >= k)
        .map(|(_, p)| p.len())
        .expect("parity shard present");
    let mut matrix = Vec::with_capacity(k);
    let mut symbols = Vec::with_capacity(k);
    for &(index, payload) in &shards {
        let symbol = if (index as usize) < k {
            if payload.len() + LEN_PREFIX > width {
                return Err(CodingError::InconsistentSymbolWidth {
                    expected: width,
                    got: payload.len() + LEN_PREFIX,
                });
            }
            to_symbol(payload, width)
        } else {
            if payload.len() != width {
                return Err(CodingError::InconsistentSymbolWidth {
                    expected: width,
                    got: payload.len(),
                });
            }
            payload.to_vec()
        };
        matrix.push(generator.row(index as usize).to_vec());
        symbols.push(symbol);
    }

    let inverse = invert(&matrix).expect("any k generator rows are invertible");
    let mut originals = Vec::with_capacity(k);
    for row in &inverse {
        let mut symbol = vec![0u8; width];
        for (j, coeff) in row.iter().enumerate() {
            mul_acc_slice(&mut symbol, &symbols[j], *coeff);
        }
        originals.push(from_symbol(&symbol));
    }
    Ok(originals)
}

/// Tracks the block counter so successive blocks get increasing ids,
/// wrapping at u32::MAX.
#[derive(Debug, Clone)]
pub struct BlockEncoder {
    generator: GeneratorMatrix,
    next_block_id: u32,
}

impl BlockEncoder {
    pub fn new(params: CodingParams) -> Self {
        BlockEncoder {
            generator: GeneratorMatrix::build(params),
            next_block_id: 0,
        }
    }

    pub fn generator(&self) -> &GeneratorMatrix {
        &self.generator
    }

    /// Encodes one block, consuming the next block id.
    pub fn encode_block(
        &mut self,
        payloads: &[&[u8]],
    ) -> Result<Vec<(CodedPacketTag, Vec<u8>)>, CodingError> {
        let block_id = self.next_block_id;
        let out = encode_block(&self.generator, block_id, payloads)?;
        self.next_block_id = self.next_block_id.wrapping_add(1);
        Ok(out)
    }
}

fn symbol_width(max_payload_len: usize) -> usize {
    LEN_PREFIX + max_payload_len
}

fn to_symbol(payload: &[u8], width: usize) -> Vec<u8> {
    let mut symbol = vec![0u8; width];
    symbol[..LEN_PREFIX].copy_from_slice(&(payload.len() as u16).to_be_bytes());
    symbol[LEN_PREFIX..LEN_PREFIX + payload.len()].copy_from_slice(payload);
    symbol
}

fn from_symbol(symbol: &[u8]) -> Vec<u8> {
    let len = u16::from_be_bytes([symbol[0], symbol[1]]) as usize;
    symbol[LEN_PREFIX..LEN_PREFIX + len].to_vec()
}
