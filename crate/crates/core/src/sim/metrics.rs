//! Run statistics. Counts that feed rate comparisons are attributed to
//! the measurement window by the *original* packet's creation time, so a
//! retransmission sent during drain still counts toward the window in
//! which its packet was born. This removes the horizon bias that plain
//! interval counting would add at the end of a run.

/// Everything measured over one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// Packets created at sources over the whole run.
    pub created: u64,
    /// Unique packets delivered in order over the whole run.
    pub delivered: u64,
    /// Packets whose retransmission budget ran out.
    pub abandoned: u64,
    /// Packets created inside the measurement window.
    pub originals: u64,
    /// Retransmissions belonging to window packets, whenever they were
    /// actually sent.
    pub retransmissions: u64,
    /// Window packets reconstructed by the decoder at the far end of the
    /// lossy link.
    pub recovered: u64,
    /// Window packets delivered in order.
    pub delivered_in_window: u64,
    /// Redundant copies of already-seen packets that reached a receiver.
    pub duplicate_arrivals: u64,
    /// Data packets (including retransmissions) erased by the lossy
    /// link, whole run.
    pub data_drops: u64,
    /// Parity packets erased by the lossy link, whole run.
    pub parity_drops: u64,
    /// Acknowledgements erased by the lossy link, whole run.
    pub ack_drops: u64,
    /// Per-link packet entries attributed to the window. Data, parity
    /// and retransmissions count; acknowledgements do not.
    pub link_entries: Vec<u64>,
    /// Sorted in-order delivery delays of window packets, in seconds.
    pub delays: Vec<f64>,
    /// Measurement window length in seconds.
    pub window: f64,
}

impl SimResult {
    /// Packets per second entering the given link, window-attributed.
    pub fn arrival_rate(&self, link: usize) -> f64 {
        self.link_entries[link] as f64 / self.window
    }

    /// Sum of per-link arrival rates over every link, packets per second.
    pub fn aggregate_rate(&self) -> f64 {
        self.link_entries.iter().sum::<u64>() as f64 / self.window
    }

    /// Fraction of data transmissions that were retransmissions. Each
    /// unrecoverable erasure costs exactly one retransmission, so this
    /// estimates the per-transmission residual loss probability.
    pub fn retrans_rate(&self) -> f64 {
        let sent = self.originals + self.retransmissions;
        if sent == 0 {
            0.0
        } else {
            self.retransmissions as f64 / sent as f64
        }
    }

    pub fn mean_delay(&self) -> Option<f64> {
        if self.delays.is_empty() {
            None
        } else {
            Some(self.delays.iter().sum::<f64>() / self.delays.len() as f64)
        }
    }

    /// 99th percentile delay by the nearest-rank method.
    pub fn p99_delay(&self) -> Option<f64> {
        if self.delays.is_empty() {
            return None;
        }
        let rank = ((self.delays.len() as f64) * 0.99).ceil() as usize;
        Some(self.delays[rank.clamp(1, self.delays.len()) - 1])
    }
}

/// Mutable accumulator used while the run is in progress.
pub(crate) struct Collector {
    pub created: u64,
    pub delivered: u64,
    pub abandoned: u64,
    pub originals: u64,
    pub retransmissions: u64,
    pub recovered: u64,
    pub delivered_in_window: u64,
    pub duplicate_arrivals: u64,
    pub data_drops: u64,
    pub parity_drops: u64,
    pub ack_drops: u64,
    pub link_entries: Vec<u64>,
    pub delays: Vec<f64>,
}

impl Collector {
    pub fn new(links: usize) -> Self {
        Collector {
            created: 0,
            delivered: 0,
            abandoned: 0,
            originals: 0,
            retransmissions: 0,
            recovered: 0,
            delivered_in_window: 0,
            duplicate_arrivals: 0,
            data_drops: 0,
            parity_drops: 0,
            ack_drops: 0,
            link_entries: vec![0; links],
            delays: Vec::new(),
        }
    }

    pub fn finalize(mut self, window: f64) -> SimResult {
        self.delays.sort_by(f64::total_cmp);
        SimResult {
            created: self.created,
            delivered: self.delivered,
            abandoned: self.abandoned,
            originals: self.originals,
            retransmissions: self.retransmissions,
            recovered: self.recovered,
            delivered_in_window: self.delivered_in_window,
            duplicate_arrivals: self.duplicate_arrivals,
            data_drops: self.data_drops,
            parity_drops: self.parity_drops,
            ack_drops: self.ack_drops,
            link_entries: self.link_entries,
            delays: self.delays,
            window,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result_with_delays(delays: Vec<f64>) -> SimResult {
        let mut c = Collector::new(2);
        c.delays = delays;
        c.link_entries = vec![30, 12];
        c.originals = 45;
        c.retransmissions = 5;
        c.finalize(2.0)
    }

    #[test]
    fn rates_divide_by_the_window() {
        let r = result_with_delays(vec![0.3, 0.1, 0.2]);
        assert_eq!(r.arrival_rate(0), 15.0);
        assert_eq!(r.arrival_rate(1), 6.0);
        assert_eq!(r.aggregate_rate(), 21.0);
        assert_eq!(r.retrans_rate(), 0.1);
    }

    #[test]
    fn delays_are_sorted_and_summarized() {
        let r = result_with_delays(vec![0.3, 0.1, 0.2]);
        assert_eq!(r.delays, vec![0.1, 0.2, 0.3]);
        assert!((r.mean_delay().unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(r.p99_delay(), Some(0.3));
    }

    #[test]
    fn p99_uses_nearest_rank() {
        let delays: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let r = result_with_delays(delays);
        // ceil(100 * 0.99) = 99th order statistic.
        assert_eq!(r.p99_delay(), Some(99.0));
        let r = result_with_delays(vec![7.0]);
        assert_eq!(r.p99_delay(), Some(7.0));
        let r = result_with_delays(Vec::new());
        assert_eq!(r.p99_delay(), None);
        assert_eq!(r.mean_delay(), None);
    }
}
