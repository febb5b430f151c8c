//! Acceptance suite: ten numbered criteria covering the coder, the
//! analytic model, the simulator, and the experiment tool. Each test
//! prints one `criterion N: PASS/FAIL` line with the measured numbers
//! (visible with `--nocapture`; always shown for failures) and asserts
//! the stated tolerance.
//!
//! Budgeted for a single-core machine: the full target runs in about two
//! minutes, dominated by the simulation sweeps of criteria 5, 6, and 8.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::Command;

use linc_core::coding::{decode_block, encode_block, CodingParams, GeneratorMatrix};
use linc_core::model::{
    goodput_ratio, optimize_params, retrans_rate_coded, retrans_rate_uncoded, Flow, FlowEnsemble,
    LossModel,
};
use linc_core::rng::{derive_rng, StreamDomain};
use linc_core::sim::{self, SimConfig, SimResult};
use linc_core::topology::{
    builtin_scenario1, load_graphml, normalize_load, route, RoutedFlow, Topology, DEFAULT_RATE_BPS,
};
use rand::Rng;

/// Print the verdict line and enforce it.
fn conclude(criterion: u32, description: &str, pass: bool, details: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {verdict} — {description}");
    for line in details.lines() {
        println!("  {line}");
    }
    assert!(
        pass,
        "criterion {criterion}: FAIL — {description}\n{details}"
    );
}

fn mean_stderr(samples: &[f64]) -> (f64, f64) {
    let count = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / count;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0);
    (mean, (var / count).sqrt())
}

// ---------------------------------------------------------------------
// Criterion 1 — exhaustive MDS correctness on small blocks.
// ---------------------------------------------------------------------

#[test]
fn criterion_01_mds_codes_recover_from_every_survivable_loss_pattern() {
    let mut checked = 0u64;
    for k in 1..=4usize {
        for n in k..=8usize {
            let params = CodingParams::new(k, n).unwrap();
            let generator = GeneratorMatrix::build(params);
            // Varied lengths exercise the padding and length-prefix paths.
            let payloads: Vec<Vec<u8>> = (0..k)
                .map(|i| {
                    (0..3 + 2 * i)
                        .map(|j| (37 * i + 11 * j + n) as u8)
                        .collect()
                })
                .collect();
            let refs: Vec<&[u8]> = payloads.iter().map(Vec::as_slice).collect();
            let encoded = encode_block(&generator, 0, &refs).unwrap();

            for pattern in 0u32..(1 << n) {
                let received: Vec<(u8, &[u8])> = (0..n)
                    .filter(|i| pattern & (1 << i) != 0)
                    .map(|i| (i as u8, encoded[i].1.as_slice()))
                    .collect();
                let survivors = received.len();
                match decode_block(&generator, &received) {
                    Ok(decoded) => {
                        assert!(
                            survivors >= k,
                            "(k={k}, n={n}) pattern {pattern:#010b}: decoded from {survivors} < k"
                        );
                        assert_eq!(
                            decoded, payloads,
                            "(k={k}, n={n}) pattern {pattern:#010b}: wrong bytes"
                        );
                    }
                    Err(_) => assert!(
                        survivors < k,
                        "(k={k}, n={n}) pattern {pattern:#010b}: {survivors} >= k yet undecodable"
                    ),
                }
                checked += 1;
            }
        }
    }
    conclude(
        1,
        "every loss pattern with >= k survivors decodes byte-exactly, every \
         smaller one is rejected (k <= 4, n <= 8)",
        true,
        &format!("{checked} (geometry, pattern) cases checked exhaustively"),
    );
}

// ---------------------------------------------------------------------
// Criterion 2 — degenerate identity: no parity means raw loss rate.
// ---------------------------------------------------------------------

#[test]
fn criterion_02_uncoded_blocks_leak_exactly_the_raw_loss_rate() {
    let mut details = String::new();
    let mut worst = 0.0f64;
    for &k in &[1usize, 10, 50] {
        for &eps in &[0.01f64, 0.05, 0.1, 0.2] {
            let loss = LossModel::new(eps).unwrap();
            let rate = retrans_rate_coded(&CodingParams::new(k, k).unwrap(), &loss);
            let diff = (rate - eps).abs();
            worst = worst.max(diff);
            assert_eq!(retrans_rate_uncoded(&loss), eps);
            let _ = writeln!(
                details,
                "k={k} eps={eps}: rate(k,k) = {rate:.17}, |diff| = {diff:.3e}"
            );
        }
    }
    conclude(
        2,
        "retransmission rate at n=k equals the loss probability within 1e-12",
        worst < 1e-12,
        &format!("worst deviation {worst:.3e}\n{details}"),
    );
}

// ---------------------------------------------------------------------
// Criterion 3 — closed form vs an independent Monte Carlo oracle.
// ---------------------------------------------------------------------

#[test]
fn criterion_03_closed_form_matches_a_bernoulli_block_oracle() {
    const BLOCKS: u64 = 1_000_000;
    let mut details = String::new();
    let mut pass = true;
    let mut stream = 0u64;
    for &(k, n) in &[(5usize, 7usize), (10, 12), (50, 55)] {
        for &eps in &[0.05, 0.1] {
            let closed: f64 = retrans_rate_coded(
                &CodingParams::new(k, n).unwrap(),
                &LossModel::new(eps).unwrap(),
            );

            // One block sample: erase each of the n packets independently;
            // if more than n-k are gone the block is undecodable and every
            // erased *data* packet must be retransmitted.
            let mut rng = derive_rng(0xACC3, StreamDomain::Erasure, stream);
            stream += 1;
            let mut sum = 0.0f64;
            let mut sum_sq = 0.0f64;
            for _ in 0..BLOCKS {
                let mut data_lost = 0u32;
                let mut total_lost = 0u32;
                for i in 0..n {
                    if rng.random::<f64>() < eps {
                        total_lost += 1;
                        if i < k {
                            data_lost += 1;
                        }
                    }
                }
                let x = if total_lost as usize > n - k {
                    data_lost as f64 / k as f64
                } else {
                    0.0
                };
                sum += x;
                sum_sq += x * x;
            }
            let mc = sum / BLOCKS as f64;
            let var = (sum_sq - sum * sum / BLOCKS as f64) / (BLOCKS as f64 - 1.0);
            let se = (var / BLOCKS as f64).sqrt();
            let diff = (mc - closed).abs();
            let ok = diff <= 3.0 * se;
            pass &= ok;
            let _ = writeln!(
                details,
                "(k={k}, n={n}, eps={eps}): closed {closed:.6e}, monte carlo {mc:.6e} \
                 (se {se:.2e}, |diff| {diff:.2e} {} 3se)",
                if ok { "<=" } else { ">" }
            );
        }
    }
    conclude(
        3,
        "closed-form retransmission rate within 3 standard errors of a \
         1e6-block Monte Carlo oracle",
        pass,
        &details,
    );
}

// ---------------------------------------------------------------------
// Criterion 4 — the two algebraic forms of the goodput ratio agree.
// ---------------------------------------------------------------------

#[test]
fn criterion_04_goodput_ratio_forms_agree_on_random_ensembles() {
    let mut rng = derive_rng(0x6F0D, StreamDomain::FlowRates, 4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let flow_count = 1 + (rng.random::<u64>() % 5) as usize;
        let flows: Vec<Flow<f64>> = (0..flow_count)
            .map(|_| Flow {
                lambda: 100.0 + 9900.0 * rng.random::<f64>(),
                eta: 1.0 + 29.0 * rng.random::<f64>(),
            })
            .collect();
        let k = 1 + (rng.random::<u64>() % 80) as usize;
        let n = k + (rng.random::<u64>() % 40) as usize;
        let eps = 0.005 + 0.295 * rng.random::<f64>();

        let ensemble = FlowEnsemble::new(flows.clone()).unwrap();
        let params = CodingParams::new(k, n).unwrap();
        let loss = LossModel::new(eps).unwrap();
        let report = goodput_ratio(&ensemble, &params, &loss).unwrap();

        // Ratio-of-total-rates form, from the report's lambda fields.
        let ratio_form = (report.lambda_lossy_uncoded + report.lambda_nonlossy_uncoded)
            / (report.lambda_lossy_coded + report.lambda_nonlossy_coded);
        // Factored form, recomputed here from first principles:
        // (1 - R)/(1 - eps) * sum lambda(eta + 1) / sum lambda(eta + n/k).
        let rate = n as f64 / k as f64;
        let useful: f64 = flows.iter().map(|f| f.lambda * (f.eta + 1.0)).sum();
        let loaded: f64 = flows.iter().map(|f| f.lambda * (f.eta + rate)).sum();
        let factored_form = (1.0 - report.retrans_rate_coded) / (1.0 - eps) * useful / loaded;

        worst = worst.max((ratio_form - factored_form).abs());
        assert!((report.delta - ratio_form).abs() < 1e-15);
    }
    conclude(
        4,
        "ratio-of-rates and factored goodput-ratio forms agree within 1e-12 \
         on 100 random ensembles",
        worst < 1e-12,
        &format!("worst |difference| {worst:.3e}"),
    );
}

// ---------------------------------------------------------------------
// Shared simulation scaffolding for criteria 5-7: the six-node chain at
// desk scale, rates calibrated exactly as the CLI calibrates them.
// ---------------------------------------------------------------------

const RATE_SCALE: f64 = 2e-3;

fn chain_experiment(epsilon: f64) -> (Topology, Vec<(RoutedFlow, f64)>) {
    let (topology, pairs) = builtin_scenario1(epsilon).unwrap();
    let routed: Vec<RoutedFlow> = pairs
        .iter()
        .map(|(src, dst)| route(&topology, src, dst).unwrap())
        .collect();
    let mut rng = derive_rng(7, StreamDomain::FlowRates, 0);
    let mut lambdas: Vec<f64> = (0..routed.len())
        .map(|_| 0.5 + rng.random::<f64>())
        .collect();
    normalize_load(&topology, &routed, &mut lambdas, 0.5, 1500).unwrap();
    let flows = routed
        .into_iter()
        .zip(lambdas.into_iter().map(|l| l * RATE_SCALE))
        .collect();
    (topology, flows)
}

fn desk_config(seed: u64, coding: Option<CodingParams>) -> SimConfig {
    SimConfig {
        rate_scale: RATE_SCALE,
        coding,
        seed,
        ..SimConfig::default()
    }
}

fn seed_sweep(
    topology: &Topology,
    flows: &[(RoutedFlow, f64)],
    coding: Option<CodingParams>,
    seeds: u64,
) -> Vec<SimResult> {
    (1..=seeds)
        .map(|seed| sim::run(topology, flows, &desk_config(seed, coding)).unwrap())
        .collect()
}

// ---------------------------------------------------------------------
// Criterion 5 — measured rates track the analytic formulas.
// ---------------------------------------------------------------------

#[test]
fn criterion_05_simulated_rates_match_theory_across_the_rate_sweep() {
    let eps = 0.05;
    let k = 50usize;
    let (topology, flows) = chain_experiment(eps);
    let ensemble = FlowEnsemble::new(
        flows
            .iter()
            .map(|(r, l)| Flow {
                lambda: *l,
                eta: r.eta as f64,
            })
            .collect(),
    )
    .unwrap();
    let loss = LossModel::new(eps).unwrap();

    let mut details = String::new();
    let mut pass = true;
    for &n in &[50usize, 53, 55, 60, 65, 70] {
        let params = CodingParams::new(k, n).unwrap();
        let report = goodput_ratio(&ensemble, &params, &loss).unwrap();
        let theory_rate = report.lambda_lossy_coded + report.lambda_nonlossy_coded;
        let theory_retrans = report.retrans_rate_coded;

        let runs = seed_sweep(&topology, &flows, Some(params), 5);
        let rates: Vec<f64> = runs.iter().map(SimResult::aggregate_rate).collect();
        let retrans: Vec<f64> = runs.iter().map(SimResult::retrans_rate).collect();
        let delivered: u64 = runs.iter().map(|r| r.delivered_in_window).sum();

        let (rate_mean, _) = mean_stderr(&rates);
        let (retrans_mean, retrans_se) = mean_stderr(&retrans);
        let rate_err = (rate_mean - theory_rate).abs() / theory_rate;
        let retrans_diff = (retrans_mean - theory_retrans).abs();
        let retrans_bound = (3.0 * retrans_se).max(1e-3);

        let ok = rate_err <= 0.05 && retrans_diff <= retrans_bound && delivered >= 100_000;
        pass &= ok;
        let _ = writeln!(
            details,
            "n/k={:.2}: aggregate {rate_mean:.1} vs {theory_rate:.1} pps \
             ({:+.2}%), retrans {retrans_mean:.3e} vs {theory_retrans:.3e} \
             (|diff| {retrans_diff:.2e} <= {retrans_bound:.2e}), \
             delivered {delivered} [{}]",
            n as f64 / k as f64,
            (rate_mean / theory_rate - 1.0) * 100.0,
            if ok { "ok" } else { "VIOLATION" },
        );
    }
    conclude(
        5,
        "chain-scenario sweep: aggregate rate within 5% of theory and \
         retransmission rate within max(3se, 1e-3), >= 1e5 delivered per point",
        pass,
        &details,
    );
}

// ---------------------------------------------------------------------
// Criterion 6 — residual retransmissions below 1e-3 at n/k = 1.18.
// ---------------------------------------------------------------------

#[test]
fn criterion_06_rate_1_18_eliminates_retransmissions_at_ten_percent_loss() {
    let eps = 0.1;
    let (k, n) = (50usize, 59usize);
    let (topology, flows) = chain_experiment(eps);
    let params = CodingParams::new(k, n).unwrap();

    let runs = seed_sweep(&topology, &flows, Some(params), 5);
    let retrans: Vec<f64> = runs.iter().map(SimResult::retrans_rate).collect();
    let (measured, se) = mean_stderr(&retrans);
    let analytic: f64 = retrans_rate_coded(&params, &LossModel::new(eps).unwrap());

    conclude(
        6,
        "chain scenario at eps=0.1, k=50, n=59: measured retransmission rate \
         below 1e-3",
        measured < 1e-3,
        &format!(
            "measured {measured:.3e} (se {se:.1e}) vs bound 1.0e-3; the \
             block-loss formula itself gives {analytic:.3e} at this geometry, \
             an order of magnitude above the bound, so the measurement agrees \
             with theory yet the stated threshold is unreachable"
        ),
    );
}

// ---------------------------------------------------------------------
// Criterion 7 — delay collapses toward the propagation floor.
// ---------------------------------------------------------------------

#[test]
fn criterion_07_coding_pulls_mean_delay_to_the_propagation_floor() {
    let eps = 0.05;
    let (topology, flows) = chain_experiment(eps);
    // Propagation floor: one-way latency along the route (half the
    // round trip), identical for both flows on the chain.
    let floor: f64 = flows[0]
        .0
        .links
        .iter()
        .map(|&l| topology.links[l].latency_s)
        .sum();

    let uncoded = sim::run(&topology, &flows, &desk_config(1, None)).unwrap();
    let coded_params = CodingParams::new(50, 65).unwrap();
    let coded = sim::run(&topology, &flows, &desk_config(1, Some(coded_params))).unwrap();

    let uncoded_delay = uncoded.mean_delay().unwrap();
    let coded_delay = coded.mean_delay().unwrap();
    let reduction = 1.0 - coded_delay / uncoded_delay;
    let above_floor = coded_delay / floor - 1.0;

    conclude(
        7,
        "chain scenario at eps=0.05: coded mean delay at least 10% below the \
         uncoded baseline and within 5% of the propagation floor",
        reduction >= 0.10 && coded_delay <= 1.05 * floor,
        &format!(
            "uncoded {uncoded_delay:.4} s, coded (n=65) {coded_delay:.4} s \
             ({:.1}% reduction), floor {floor:.4} s (coded {:.2}% above it)",
            reduction * 100.0,
            above_floor * 100.0,
        ),
    );
}

// ---------------------------------------------------------------------
// Criterion 8 — wide-area scenario: import, routing, and curve shape.
// ---------------------------------------------------------------------

fn repo_data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Parse the `seed=mean, link_id=all` rows of a sim CSV into
/// (n, aggregate rate, retransmission rate) triples in file order.
fn parse_sweep_csv(path: &Path) -> Vec<(usize, f64, f64)> {
    let text = std::fs::read_to_string(path).expect("sweep csv readable");
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().expect("header").split(',').collect();
    let idx = |name: &str| header.iter().position(|h| *h == name).expect("column");
    let (c_n, c_seed, c_link) = (idx("n"), idx("seed"), idx("link_id"));
    let (c_rate, c_retrans) = (idx("arrival_rate_pps"), idx("retrans_rate"));
    lines
        .filter_map(|line| {
            let cells: Vec<&str> = line.split(',').collect();
            (cells[c_seed] == "mean" && cells[c_link] == "all").then(|| {
                (
                    cells[c_n].parse().unwrap(),
                    cells[c_rate].parse().unwrap(),
                    cells[c_retrans].parse().unwrap(),
                )
            })
        })
        .collect()
}

#[test]
fn criterion_08_wide_area_scenario_reproduces_the_three_regime_curve() {
    // Import and routing: all five flow pairs cross the lossy hop with a
    // path length in the expected band.
    let graphml = repo_data_dir().join("vtlwavenet2011.graphml");
    let mut topology = load_graphml(&graphml, DEFAULT_RATE_BPS).unwrap();
    assert_eq!(topology.nodes.len(), 73, "imported node count");
    assert_eq!(topology.links.len(), 74, "imported link count");
    let lossy = topology.mark_lossy("Paris", "Saint-Denis", 0.05).unwrap();

    let pairs = [
        ("Marseille", "London"),
        ("Bordeaux", "Amsterdam"),
        ("Geneva", "London"),
        ("Sete", "Antoing"),
        ("Blanzay", "Strasbourg"),
    ];
    let mut details = String::new();
    let mut routing_ok = true;
    for (src, dst) in pairs {
        let flow = route(&topology, src, dst).unwrap();
        let crosses = flow.links.contains(&lossy);
        let in_band = (12..=30).contains(&flow.eta);
        routing_ok &= crosses && in_band;
        let _ = writeln!(
            details,
            "{src} -> {dst}: eta = {} non-lossy links, crosses lossy hop: {crosses}",
            flow.eta
        );
    }

    // Aggregate-rate curve over the block-length sweep, via the CLI so the
    // exported CSV is what gets checked. One seed suffices: the arrival
    // process is seed-determined and shared across sweep points, so the
    // differences between points are the coding effects themselves.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let status = Command::new(env!("CARGO_BIN_EXE_linc"))
        .args([
            "sim",
            "--scenario",
            "scenario2",
            "--rate",
            "1.0,1.04,1.08,1.12,1.16,1.2,1.3",
            "--seeds",
            "1",
            "--duration",
            "5",
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .expect("linc sim runs");
    assert!(status.success(), "wide-area sweep failed");

    let curve = parse_sweep_csv(&out);
    assert_eq!(curve.len(), 7, "one aggregate row per sweep point");
    let rates: Vec<f64> = curve.iter().map(|&(_, rate, _)| rate).collect();
    let argmin = rates
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();

    let _ = writeln!(details, "aggregate rate by block length:");
    for &(n, rate, retrans) in &curve {
        let _ = writeln!(
            details,
            "  n={n}: {rate:.0} pps, retrans rate {retrans:.2e}"
        );
    }
    // Regime boundaries, logged rather than asserted: the curve leaves
    // regime (i) once coding has cut the retransmission rate well below
    // the raw loss rate, and enters regime (iii) once retransmissions are
    // effectively gone and parity overhead alone moves the curve.
    let regime_ii = curve.iter().find(|&&(_, _, r)| r < 0.025);
    let regime_iii = curve.iter().find(|&&(_, _, r)| r < 1e-3);
    if let Some(&(n, _, r)) = regime_ii {
        let _ = writeln!(
            details,
            "regime (ii) reached by n={n} (retrans {r:.2e} < eps/2)"
        );
    }
    if let Some(&(n, _, r)) = regime_iii {
        let _ = writeln!(
            details,
            "regime (iii) reached by n={n} (retrans {r:.2e} < 1e-3)"
        );
    }
    let _ = writeln!(
        details,
        "curve: falls from {:.0} pps (n={}) to {:.0} pps (n={}), rises again to {:.0} pps (n={})",
        rates[0], curve[0].0, rates[argmin], curve[argmin].0, rates[6], curve[6].0
    );

    let shape_ok = argmin != 0
        && argmin != curve.len() - 1
        && rates[0] > rates[argmin]
        && rates[curve.len() - 1] > rates[argmin];
    conclude(
        8,
        "wide-area import succeeds, all five pairs route across the lossy hop \
         with eta in [12, 30], and the aggregate-rate curve falls, bottoms out \
         inside the sweep, and rises again",
        routing_ok && shape_ok,
        &details,
    );
}

// ---------------------------------------------------------------------
// Criterion 9 — repeated runs serialize byte-identically.
// ---------------------------------------------------------------------

#[test]
fn criterion_09_identical_seeds_produce_byte_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    for out in [&first, &second] {
        let status = Command::new(env!("CARGO_BIN_EXE_linc"))
            .args([
                "sim",
                "--n",
                "55",
                "--seeds",
                "2",
                "--duration",
                "2",
                "--out",
                out.to_str().unwrap(),
            ])
            .status()
            .expect("linc sim runs");
        assert!(status.success());
    }
    let bytes_a = std::fs::read(&first).unwrap();
    let bytes_b = std::fs::read(&second).unwrap();
    conclude(
        9,
        "the same sim invocation twice yields byte-identical metrics CSV",
        bytes_a == bytes_b,
        &format!("{} bytes compared", bytes_a.len()),
    );
}

// ---------------------------------------------------------------------
// Criterion 10 — the optimizer equals a brute-force argmax.
// ---------------------------------------------------------------------

#[test]
fn criterion_10_optimizer_matches_brute_force_on_random_instances() {
    let mut rng = derive_rng(0xB07, StreamDomain::FlowRates, 10);
    let mut details = String::new();
    let mut pass = true;
    for instance in 0..5 {
        let flow_count = 1 + (rng.random::<u64>() % 5) as usize;
        let flows: Vec<Flow<f64>> = (0..flow_count)
            .map(|_| Flow {
                lambda: 100.0 + 9900.0 * rng.random::<f64>(),
                eta: 1.0 + 29.0 * rng.random::<f64>(),
            })
            .collect();
        let eps = 0.005 + 0.295 * rng.random::<f64>();
        let ensemble = FlowEnsemble::new(flows).unwrap();
        let loss = LossModel::new(eps).unwrap();

        let (best, best_delta) = optimize_params(&ensemble, &loss, 80, 80).unwrap();

        // Brute force through the public per-point report, scanning in the
        // same lexicographic order with strict improvement.
        let mut brute: Option<(usize, usize, f64)> = None;
        for k in 1..=80usize {
            for n in k..=80usize {
                let report =
                    goodput_ratio(&ensemble, &CodingParams::new(k, n).unwrap(), &loss).unwrap();
                if brute.is_none_or(|(_, _, delta)| report.delta > delta) {
                    brute = Some((k, n, report.delta));
                }
            }
        }
        let (bk, bn, bd) = brute.unwrap();
        let agree = (bk, bn) == (best.k(), best.n()) && (bd - best_delta).abs() < 1e-9;
        pass &= agree;
        let _ = writeln!(
            details,
            "instance {instance} (eps {eps:.3}, {flow_count} flows): optimizer \
             (k={}, n={}, delta={best_delta:.6}), brute force (k={bk}, n={bn}, \
             delta={bd:.6}) [{}]",
            best.k(),
            best.n(),
            if agree { "ok" } else { "MISMATCH" },
        );
    }
    conclude(
        10,
        "optimizer equals brute-force argmax on 80x80 grids for 5 random \
         (ensemble, loss) instances",
        pass,
        &details,
    );
}
