//! The transparent coding pair wrapped around the lossy link. The
//! ingress side tags every data packet entering the link with its block
//! position and emits parity packets right behind each completed block;
//! the egress side watches arrivals, and as soon as any k symbols of a
//! block have made it across, reconstructs whichever data packets of
//! that block did not.

use std::collections::BTreeMap;

use crate::coding::{decode_block, encode_block, CodedPacketTag, CodingParams, GeneratorMatrix};

/// Blocks this far behind the newest one can no longer receive symbols
/// (the link preserves order), so their buffered state is discarded.
const PRUNE_HORIZON: u32 = 64;

pub(crate) struct IngressCoder {
    generator: GeneratorMatrix,
    block_id: u32,
    pending: Vec<Vec<u8>>,
}

impl IngressCoder {
    pub fn new(params: CodingParams) -> Self {
        IngressCoder {
            generator: GeneratorMatrix::build(params),
            block_id: 0,
            pending: Vec::with_capacity(params.k()),
        }
    }

    /// Admits one data packet to the current block. Returns the tag to
    /// attach to it, plus the parity packets to transmit right after it
    /// if it completed the block.
    pub fn on_data(&mut self, payload: &[u8]) -> (CodedPacketTag, Vec<(CodedPacketTag, Vec<u8>)>) {
        let params = self.generator.params();
        let tag = CodedPacketTag {
            block_id: self.block_id,
            index: self.pending.len() as u8,
            payload_len: payload.len() as u16,
        };
        self.pending.push(payload.to_vec());
        if self.pending.len() < params.k() {
            return (tag, Vec::new());
        }
        let payloads: Vec<&[u8]> = self.pending.iter().map(Vec::as_slice).collect();
        let coded = encode_block(&self.generator, self.block_id, &payloads)
            .expect("block geometry is enforced by construction");
        let parity = coded.into_iter().skip(params.k()).collect();
        self.block_id = self.block_id.wrapping_add(1);
        self.pending.clear();
        (tag, parity)
    }
}

#[derive(Default)]
struct BlockState {
    shards: Vec<(u8, Vec<u8>)>,
    done: bool,
}

pub(crate) struct EgressDecoder {
    generator: GeneratorMatrix,
    blocks: BTreeMap<u32, BlockState>,
}

impl EgressDecoder {
    pub fn new(params: CodingParams) -> Self {
        EgressDecoder {
            generator: GeneratorMatrix::build(params),
            blocks: BTreeMap::new(),
        }
    }

    /// Registers one symbol that survived the link. Returns the data
    /// packets this completes: `(tag, payload)` for every index of the
    /// block that was lost, in index order. The caller forwards arriving
    /// data packets itself; parity packets exist only for this decoder.
    pub fn on_symbol(
        &mut self,
        tag: &CodedPacketTag,
        payload: &[u8],
    ) -> Vec<(CodedPacketTag, Vec<u8>)> {
        let k = self.generator.params().k();

        let newest = self
            .blocks
            .keys()
            .next_back()
            .copied()
            .unwrap_or(0)
            .max(tag.block_id);
        if newest > PRUNE_HORIZON {
            self.blocks = self.blocks.split_off(&(newest - PRUNE_HORIZON));
        }

        let state = self.blocks.entry(tag.block_id).or_default();
        if state.done || state.shards.iter().any(|(i, _)| *i == tag.index) {
            return Vec::new();
        }
        state.shards.push((tag.index, payload.to_vec()));
        if state.shards.len() < k {
            return Vec::new();
        }

        state.done = true;
        let mut have = vec![false; k];
        for (i, _) in &state.shards {
            if (*i as usize) < k {
                have[*i as usize] = true;
            }
        }
        if have.iter().all(|&h| h) {
            state.shards = Vec::new();
            return Vec::new();
        }

        let shards: Vec<(u8, &[u8])> = state
            .shards
            .iter()
            .map(|(i, p)| (*i, p.as_slice()))
            .collect();
        let originals =
            decode_block(&self.generator, &shards).expect("any k symbols of a block decode");
        state.shards = Vec::new();

        (0..k)
            .filter(|i| !have[*i])
            .map(|i| {
                let payload = originals[i].clone();
                let tag = CodedPacketTag {
                    block_id: tag.block_id,
                    index: i as u8,
                    payload_len: payload.len() as u16,
                };
                (tag, payload)
            })
            .collect()
    }

    #[cfg(test)]
    fn tracked_blocks(&self) -> usize {
        self.blocks.len()
    }
}
