//! End-host behavior: a sender with cumulative acknowledgements, loss
//! signalling and a retransmission timer, and a receiver that delivers
//! strictly in order.
//!
//! The receiver tracks every missing sequence number ("hole")
//! individually and can request several retransmissions in parallel, so
//! recovery time does not grow with the number of packets in flight.
//! When the lossy link is protected by parity packets, a hole that the
//! far-side decoder can still repair must not trigger a retransmission.
//! The receiver exploits the order-preserving path: block numbers only
//! move forward, so once arrivals carry a block id beyond the block the
//! hole could belong to, the decoder has had its chance and the loss is
//! final. Out-of-order arrivals gated this way count toward the classic
//! three-duplicate threshold; without coding every out-of-order arrival
//! counts, which reduces to standard fast retransmit.

use std::collections::BTreeMap;

/// Duplicate count at which the receiver declares a hole unrecoverable
/// and requests a retransmission.
const DUP_THRESHOLD: u8 = 3;

/// Acknowledgement content: cumulative progress plus explicit
/// retransmission requests for holes declared lost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct AckRecord {
    pub next_expected: u64,
    pub nacks: Vec<u64>,
}

/// A retransmission directive handed back to the engine.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Retransmit {
    pub seq: u64,
    pub created_at: f64,
    pub gen: u32,
}

pub(crate) enum TimeoutOutcome {
    /// The timer belongs to an already-acknowledged or superseded copy.
    Stale,
    /// The packet is still outstanding but not the oldest; the timer
    /// should be re-armed rather than fire a retransmission.
    Defer,
    /// The retransmission budget is exhausted; the packet is given up.
    Abandoned,
    Retransmit(Retransmit),
}

struct Outstanding {
    created_at: f64,
    attempts: u32,
    gen: u32,
}

pub(crate) struct Sender {
    next_seq: u64,
    max_attempts: u32,
    outstanding: BTreeMap<u64, Outstanding>,
}

impl Sender {
    pub fn new(max_attempts: u32) -> Self {
        Sender {
            next_seq: 0,
            max_attempts,
            outstanding: BTreeMap::new(),
        }
    }

    /// Registers a fresh packet; returns its sequence number and timer
    /// generation.
    pub fn on_source(&mut self, now: f64) -> (u64, u32) {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.outstanding.insert(
            seq,
            Outstanding {
                created_at: now,
                attempts: 1,
                gen: 0,
            },
        );
        (seq, 0)
    }

    /// Applies one acknowledgement: cumulative progress clears state,
    /// and each requested hole is retransmitted at most once per
    /// request (the receiver requests each hole once per loss event).
    pub fn on_ack(&mut self, ack: &AckRecord, _now: f64) -> Vec<Retransmit> {
        self.outstanding = self.outstanding.split_off(&ack.next_expected);
        let mut out = Vec::new();
        for &seq in &ack.nacks {
            if let Some(o) = self.outstanding.get_mut(&seq) {
                if o.attempts >= self.max_attempts {
                    continue;
                }
                o.attempts += 1;
                o.gen += 1;
                out.push(Retransmit {
                    seq,
                    created_at: o.created_at,
                    gen: o.gen,
                });
            }
        }
        out
    }

    /// Handles a retransmission timer for `(seq, gen)`.
    ///
    /// Only the oldest outstanding packet may retransmit on timer: the
    /// cumulative acknowledgement cannot name packets parked behind a
    /// hole, so timers of later packets merely mean "progress is
    /// stalled below me" and re-arm instead. This mirrors a transport
    /// with a single retransmission timer per connection and prevents a
    /// storm of spurious copies whenever one repair is slow.
    pub fn on_timeout(&mut self, seq: u64, gen: u32, _now: f64) -> TimeoutOutcome {
        match self.outstanding.get(&seq) {
            None => return TimeoutOutcome::Stale,
            Some(o) if o.gen != gen => return TimeoutOutcome::Stale,
            Some(_) => {}
        }
        if self.outstanding.keys().next() != Some(&seq) {
            return TimeoutOutcome::Defer;
        }
        let o = self.outstanding.get_mut(&seq).expect("checked above");
        if o.attempts >= self.max_attempts {
            self.outstanding.remove(&seq);
            return TimeoutOutcome::Abandoned;
        }
        o.attempts += 1;
        o.gen += 1;
        TimeoutOutcome::Retransmit(Retransmit {
            seq,
            created_at: o.created_at,
            gen: o.gen,
        })
    }

    #[cfg(test)]
    fn outstanding_len(&self) -> usize {
        self.outstanding.len()
    }
}

struct Hole {
    /// Lower bound on the block id of the lost packet: the block of the
    /// first packet received above the hole. Arrivals from later blocks
    /// prove the decoder's chance has passed.
    bound: Option<u32>,
    dups: u8,
    /// When the hole was last requested, if ever.
    fired_at: Option<f64>,
}

/// What one data arrival produced at the receiver.
pub(crate) struct RxOutcome {
    /// Packets released in order: `(seq, created_at)`.
    pub deliveries: Vec<(u64, f64)>,
    pub ack: AckRecord,
    /// The arrival was a redundant copy of something already seen.
    pub duplicate: bool,
}

pub(crate) struct Receiver {
    /// With parity protection active, duplicate counting waits for
    /// arrivals from later blocks; without it, every out-of-order
    /// arrival counts (classic fast retransmit).
    gated: bool,
    /// A requested hole still open this long after the request is
    /// re-requested: the retransmission itself must have been lost.
    /// Must exceed one round trip or repairs in flight get duplicated.
    renack_delay: f64,
    next_expected: u64,
    buffer: BTreeMap<u64, f64>,
    holes: BTreeMap<u64, Hole>,
}

impl Receiver {
    pub fn new(gated: bool, renack_delay: f64) -> Self {
        Receiver {
            gated,
            renack_delay,
            next_expected: 0,
            buffer: BTreeMap::new(),
            holes: BTreeMap::new(),
        }
    }

    /// Processes one data arrival carrying `block` if it crossed the
    /// coded link.
    pub fn on_data(
        &mut self,
        seq: u64,
        created_at: f64,
        block: Option<u32>,
        now: f64,
    ) -> RxOutcome {
        if seq < self.next_expected || self.buffer.contains_key(&seq) {
            return RxOutcome {
                deliveries: Vec::new(),
                ack: AckRecord {
                    next_expected: self.next_expected,
                    nacks: Vec::new(),
                },
                duplicate: true,
            };
        }

        // This arrival is evidence against every open hole below it.
        let mut nacks = Vec::new();
        for (&h, hole) in self.holes.range_mut(..seq) {
            if let Some(fired_at) = hole.fired_at {
                // Already requested. The stream is still moving and the
                // repair has had a full round trip to land, so it was
                // lost too: ask again.
                if now - fired_at >= self.renack_delay {
                    hole.fired_at = Some(now);
                    nacks.push(h);
                }
                continue;
            }
            let counts = if self.gated {
                match (block, hole.bound) {
                    (Some(b), Some(bound)) => {
                        // Tighten the bound: any packet above the hole
                        // left the encoder no earlier than the hole did.
                        if b < bound {
                            hole.bound = Some(b);
                        }
                        b > hole.bound.unwrap()
                    }
                    _ => true,
                }
            } else {
                true
            };
            if counts {
                hole.dups += 1;
                if hole.dups >= DUP_THRESHOLD {
                    hole.fired_at = Some(now);
                    nacks.push(h);
                }
            }
        }

        self.holes.remove(&seq);
        let mut deliveries = Vec::new();
        if seq == self.next_expected {
            deliveries.push((seq, created_at));
            self.next_expected += 1;
            while let Some(created) = self.buffer.remove(&self.next_expected) {
                deliveries.push((self.next_expected, created));
                self.next_expected += 1;
            }
        } else {
            // New holes span from just above the highest arrival below
            // `seq` up to `seq`; anything missing further down is a hole
            // already. With gating the triggering arrival itself cannot
            // testify (it may share the lost packet's block), without
            // gating it is duplicate evidence number one.
            let lower = self
                .buffer
                .range(..seq)
                .next_back()
                .map(|(s, _)| s + 1)
                .unwrap_or(self.next_expected);
            for h in lower..seq {
                self.holes.entry(h).or_insert(Hole {
                    bound: block,
                    dups: if self.gated { 0 } else { 1 },
                    fired_at: None,
                });
            }
            self.buffer.insert(seq, created_at);
        }

        RxOutcome {
            deliveries,
            ack: AckRecord {
                next_expected: self.next_expected,
                nacks,
            },
            duplicate: false,
        }
    }

    #[cfg(test)]
    fn open_holes(&self) -> usize {
        self.holes.len()
    }
}
