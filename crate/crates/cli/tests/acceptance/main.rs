//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them). Every tolerance is pinned in
//! code.

mod instances;

use std::f64::consts::LN_2;
use std::time::Instant;

use ratiolist::analysis::{
    code_mutual_information, erasures_only_capacity_estimate, exact_counting_error,
    exact_decoder_error, exact_error_via_phi, fano_lower_bound, replication_monotonicity_check,
    mc_list_error, rc_upper_bound, spectrum_inequality_check, DecoderSpec, EnumerationLimits,
    EoOptions, ExpectationMode,
};
use ratiolist::channel::{Block, Channel};
use ratiolist::codes::{list_size_for_theta, message_count_for_rate, random_codebook, Codebook};
use ratiolist::decoding::Metric;
use ratiolist::information::{binary_entropy, blahut_arimoto, Distribution};
use ratiolist::rng::Stream;
use ratiolist_cli::config::CommonArgs;
use ratiolist_cli::record::records_text;
use ratiolist_cli::{run, CommandKind};

fn report(criterion: &str, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {criterion}: {verdict} ({detail})");
    assert!(pass, "ACCEPTANCE {criterion} FAILED: {detail}");
}

fn limits() -> EnumerationLimits {
    EnumerationLimits::default()
}

/// Criterion 1: the rank-statistic route and the counting route agree to
/// 1e-12 over at least 200 randomized enumerable instances, within 60 s.
#[test]
fn criterion_1_rank_identity() {
    let started = Instant::now();
    let mut stream = Stream::from_seed(101);
    let mut worst = 0.0f64;
    let cases = 220;
    for _ in 0..cases {
        let inst = instances::random_instance(&mut stream);
        let m = inst.codebook.len() as u64;
        let list = inst.ratio.evaluate(m, inst.codebook.n()).list_size;
        let counting =
            exact_counting_error(&inst.channel, &inst.codebook, &inst.metric, list, &limits())
                .unwrap();
        let rank = exact_error_via_phi(
            &inst.channel,
            &inst.codebook,
            &inst.metric,
            &inst.ratio,
            &limits(),
        )
        .unwrap();
        worst = worst.max((counting - rank).abs());
    }
    let elapsed = started.elapsed().as_secs_f64();
    report(
        "1 rank-identity",
        worst <= 1e-12 && elapsed <= 60.0,
        format!("max residual {worst:.3e} over {cases} instances, {elapsed:.2}s"),
    );
}

/// Criterion 2: the capacity solver hits the closed forms within 1e-6 bits,
/// each solve in under a second.
#[test]
fn criterion_2_capacity_solver() {
    let mut worst = 0.0f64;
    let mut slowest = 0.0f64;
    for p in [0.05, 0.11, 0.25] {
        let t = Instant::now();
        let res = blahut_arimoto(&Channel::bsc(p).unwrap(), 1e-9, 100_000).unwrap();
        slowest = slowest.max(t.elapsed().as_secs_f64());
        worst = worst.max((res.capacity_bits - (1.0 - binary_entropy(p).unwrap())).abs());
    }
    for e in [0.1, 0.3, 0.7] {
        let t = Instant::now();
        let res = blahut_arimoto(&Channel::bec(e).unwrap(), 1e-9, 100_000).unwrap();
        slowest = slowest.max(t.elapsed().as_secs_f64());
        worst = worst.max((res.capacity_bits - (1.0 - e)).abs());
    }
    report(
        "2 capacity-solver",
        worst <= 1e-6 && slowest < 1.0,
        format!("max closed-form gap {worst:.3e} bits, slowest solve {slowest:.3}s"),
    );
}

/// Criterion 3: replication with a proportionally larger list never
/// increases the counting error on 50 random bases, and noiseless bases
/// stay at zero on both sides.
#[test]
fn criterion_3_replication_monotonicity() {
    let mut stream = Stream::from_seed(303);
    let mut worst_excess = f64::NEG_INFINITY;
    for _ in 0..50 {
        let channel = instances::random_channel(&mut stream, false);
        let n = 1 + stream.next_below(4) as usize;
        let m = 2 + stream.next_below(5) as usize;
        let base = instances::random_codebook_with_duplicates(
            &mut stream,
            n,
            m,
            channel.input_size(),
        );
        let copies = 1 + stream.next_below(4);
        let metric = if stream.next_f64() < 0.5 {
            Metric::Hamming
        } else {
            Metric::Matched(channel.clone())
        };
        let (p_base, p_rep) =
            replication_monotonicity_check(&channel, &base, &metric, copies, 1, &limits()).unwrap();
        worst_excess = worst_excess.max(p_rep - p_base);
    }

    // noiseless bases: distinct codewords, matched metric
    let noiseless = Channel::noiseless(2).unwrap();
    let distinct = Codebook::new(
        2,
        vec![
            Block::from_usizes(&[0, 0]),
            Block::from_usizes(&[0, 1]),
            Block::from_usizes(&[1, 0]),
            Block::from_usizes(&[1, 1]),
        ],
        "noiseless_base",
    )
    .unwrap();
    let (p_base, p_rep) = replication_monotonicity_check(
        &noiseless,
        &distinct,
        &Metric::Matched(noiseless.clone()),
        3,
        1,
        &limits(),
    )
    .unwrap();
    report(
        "3 replication-monotonicity",
        worst_excess <= 1e-12 && p_base == 0.0 && p_rep == 0.0,
        format!("worst excess {worst_excess:.3e}, noiseless pair ({p_base}, {p_rep})"),
    );
}

/// Criterion 4: on the criterion-1 instance family, the converse floor
/// never exceeds the exact counting error (which stays a probability), and
/// the success product obeys `(1-eps)(1-zeta) ln r <= I + 1` with the block
/// mutual information enumerated exactly.
#[test]
fn criterion_4_bound_sandwich() {
    let mut stream = Stream::from_seed(101); // same family as criterion 1
    let mut checked_floor = 0usize;
    let mut worst_floor_excess = f64::NEG_INFINITY;
    let mut worst_converse_excess = f64::NEG_INFINITY;
    for _ in 0..220 {
        let inst = instances::random_instance(&mut stream);
        let m = inst.codebook.len() as u64;
        let n = inst.codebook.n();
        let list = inst.ratio.evaluate(m, n).list_size;
        let exact =
            exact_counting_error(&inst.channel, &inst.codebook, &inst.metric, list, &limits())
                .unwrap();
        assert!((0.0..=1.0 + 1e-12).contains(&exact));
        // floor needs rate strictly above the list exponent
        if list < m {
            let rate = (m as f64).ln() / n as f64;
            let theta = (list as f64).ln() / n as f64;
            let floor = fano_lower_bound(
                &inst.channel,
                &inst.codebook,
                &inst.metric,
                rate,
                theta,
                &limits(),
            )
            .unwrap();
            worst_floor_excess = worst_floor_excess.max(floor - exact);
            checked_floor += 1;
        }
        let mutual =
            code_mutual_information(&inst.channel, &inst.codebook, &limits()).unwrap();
        let est = exact_decoder_error(
            &inst.channel,
            &inst.codebook,
            &inst.metric,
            &DecoderSpec::top_l(list),
            &limits(),
        )
        .unwrap()
        .estimate;
        let lhs = (1.0 - est.eps_first_kind)
            * (1.0 - est.zeta_second_kind)
            * inst.ratio.log_ratio_nats(m, n);
        worst_converse_excess = worst_converse_excess.max(lhs - (mutual + 1.0));
    }
    report(
        "4 bound-sandwich",
        worst_floor_excess <= 1e-12 && worst_converse_excess <= 1e-12,
        format!(
            "floor excess {worst_floor_excess:.3e} over {checked_floor} instances, \
             converse excess {worst_converse_excess:.3e}"
        ),
    );
}

/// Criterion 5: the random-coding ceiling dominates the mean Monte Carlo
/// error of 50 fresh random codebooks within four combined sigma, within
/// five minutes. bsc(0.11), uniform inputs, Hamming metric, n = 10,
/// R = 0.4 ln 2, Theta = 0.1 ln 2.
#[test]
fn criterion_5_rc_dominance() {
    let started = Instant::now();
    let channel = Channel::bsc(0.11).unwrap();
    let px = Distribution::uniform(2);
    let n = 10;
    let rate = 0.4 * LN_2;
    let theta = 0.1 * LN_2;
    let bound = rc_upper_bound(
        &Metric::Hamming,
        &px,
        &channel,
        n,
        rate,
        theta,
        ExpectationMode::Enumerate,
        &limits(),
    )
    .unwrap();

    let m = message_count_for_rate(n, 0.4);
    let list = list_size_for_theta(n, 0.1);
    let root = Stream::from_seed(505);
    let mut estimates = Vec::with_capacity(50);
    for book in 0..50u64 {
        let mut cb_stream = root.derive(book).derive(0);
        let cb = random_codebook(n, m, &px, &mut cb_stream).unwrap();
        let trial_seed = root.derive(book).derive(1).next_u64();
        let est = mc_list_error(
            &channel,
            &cb,
            &Metric::Hamming,
            &DecoderSpec::top_l(list),
            10_000,
            trial_seed,
        )
        .unwrap();
        estimates.push(est.p_er_counting);
    }
    let mean: f64 = estimates.iter().sum::<f64>() / estimates.len() as f64;
    let var: f64 = estimates
        .iter()
        .map(|e| (e - mean) * (e - mean))
        .sum::<f64>()
        / (estimates.len() - 1) as f64;
    let combined_sigma = (var / estimates.len() as f64).sqrt().max(1e-6);
    let elapsed = started.elapsed().as_secs_f64();
    report(
        "5 rc-dominance",
        mean <= bound.value + 4.0 * combined_sigma && elapsed <= 300.0,
        format!(
            "rc bound {:.6}, mean mc error {mean:.6} (sigma {combined_sigma:.2e}), {elapsed:.1}s",
            bound.value
        ),
    );
}

/// Criterion 6: list-exponent capacity shift. bsc(0.11), matched metric,
/// Theta = 0.25 bits, top-L decoding with L = ceil(2^{n Theta}):
/// (a) at R = 0.6 < C + Theta the first-kind error strictly decreases over
///     n in {8, 12, 16, 20};
/// (b) at R = 0.9 > C + Theta the error at n = 20 exceeds 0.10 and the
///     R = 0.6 error at n = 20. Within ten minutes.
#[test]
fn criterion_6_capacity_shift_trend() {
    let started = Instant::now();
    let args = CommonArgs {
        channel: Some("bsc:0.11".into()),
        metric: Some("matched".into()),
        n: Some("8,12,16,20".into()),
        rate_bits: Some("0.6,0.9".into()),
        theta_bits: Some("0.25".into()),
        trials: Some(10_000),
        seed: Some(606),
        ..CommonArgs::default()
    };
    let exp = args.resolve().unwrap();
    let records = run(CommandKind::Sweep, &exp).unwrap();
    assert_eq!(records.len(), 8);
    let eps_of = |record: &ratiolist_cli::RunRecord| -> f64 {
        record
            .results
            .iter()
            .find(|(k, _)| k == "eps_first_kind")
            .map(|(_, v)| v.parse().unwrap())
            .expect("sweep point ran")
    };
    let grid_point = |n: usize, rate: f64| -> f64 {
        let record = records
            .iter()
            .find(|r| {
                let field = |key: &str| {
                    r.config
                        .iter()
                        .find(|(k, _)| k == key)
                        .map(|(_, v)| v.clone())
                        .unwrap()
                };
                field("n") == n.to_string()
                    && field("rate_bits").parse::<f64>().unwrap() == rate
            })
            .expect("grid point present");
        eps_of(record)
    };
    let below: Vec<f64> = [8, 12, 16, 20].iter().map(|&n| grid_point(n, 0.6)).collect();
    let strictly_decreasing = below.windows(2).all(|w| w[1] < w[0]);
    let above_n20 = grid_point(20, 0.9);
    let below_n20 = below[3];
    let elapsed = started.elapsed().as_secs_f64();
    report(
        "6 capacity-shift-trend",
        strictly_decreasing && above_n20 > 0.10 && above_n20 > below_n20 && elapsed <= 600.0,
        format!(
            "eps at R=0.6: {below:?}; eps at R=0.9, n=20: {above_n20}; {elapsed:.1}s"
        ),
    );
}

/// Criterion 7: erasures-only support search. bec(0.3) at n = 1 gives
/// exactly 0.7 bits/use with the full binary support, bsc(0.11) gives 0,
/// and bec(0.3) at n = 2 stays at 0.7 bits/use within 1e-9.
#[test]
fn criterion_7_erasures_only() {
    let opts = EoOptions::default();
    let bec1 =
        erasures_only_capacity_estimate(&Channel::bec(0.3).unwrap(), 1, &opts, &limits())
            .unwrap();
    let bsc1 =
        erasures_only_capacity_estimate(&Channel::bsc(0.11).unwrap(), 1, &opts, &limits())
            .unwrap();
    let bec2 =
        erasures_only_capacity_estimate(&Channel::bec(0.3).unwrap(), 2, &opts, &limits())
            .unwrap();
    let pass = (bec1.bits_per_use - 0.7).abs() <= 1e-15
        && bec1.support.len() == 2
        && bsc1.bits_per_use == 0.0
        && (bec2.bits_per_use - 0.7).abs() <= 1e-9;
    report(
        "7 erasures-only",
        pass,
        format!(
            "bec(0.3) n=1: {} bits/use (support {}), bsc(0.11) n=1: {}, bec(0.3) n=2: {}",
            bec1.bits_per_use,
            bec1.support.len(),
            bsc1.bits_per_use,
            bec2.bits_per_use
        ),
    );
}

/// Criterion 8: the enumerated information-density tail never exceeds
/// `eps_n + e^{-n gamma} E|L|/L` for threshold decoders on 100 random
/// enumerable instances with gamma in {0.05, 0.1} nats.
#[test]
fn criterion_8_info_spectrum_inequality() {
    let mut stream = Stream::from_seed(808);
    let mut worst = f64::NEG_INFINITY;
    let mut checked = 0usize;
    while checked < 100 {
        let inst = instances::random_instance(&mut stream);
        // a threshold drawn from the achievable score range
        let m = stream.next_below(inst.codebook.len() as u64) as usize;
        let y = inst
            .channel
            .transmit(inst.codebook.codeword(m), &mut stream)
            .unwrap();
        let probe = stream.next_below(inst.codebook.len() as u64) as usize;
        let tau = inst.metric.score(inst.codebook.codeword(probe), &y).unwrap();
        checked += 1;
        for gamma in [0.05, 0.1] {
            let check = spectrum_inequality_check(
                &inst.channel,
                &inst.codebook,
                &inst.metric,
                tau,
                &inst.ratio,
                gamma,
                &limits(),
            )
            .unwrap();
            worst = worst.max(check.lhs - check.rhs);
        }
    }
    report(
        "8 info-spectrum-inequality",
        worst <= 1e-12,
        format!("worst lhs-rhs {worst:.3e} over {checked} instances x 2 gammas"),
    );
}

/// Criterion 9: identical configuration and seed reproduce byte-identical
/// machine-readable records, for a single simulate point and a sweep.
#[test]
fn criterion_9_reproducibility() {
    let make = || {
        let args = CommonArgs {
            channel: Some("bsc:0.11".into()),
            metric: Some("matched".into()),
            n: Some("8,10".into()),
            rate_bits: Some("0.5".into()),
            theta_bits: Some("0.25".into()),
            trials: Some(3000),
            seed: Some(909),
            ..CommonArgs::default()
        };
        let exp = args.resolve().unwrap();
        records_text(&run(CommandKind::Sweep, &exp).unwrap())
    };
    let sweep_a = make();
    let sweep_b = make();

    let simulate = || {
        let args = CommonArgs {
            channel: Some("bec:0.3".into()),
            metric: Some("erasures-only".into()),
            code: Some("random:16".into()),
            n: Some("5".into()),
            list_size: Some(3),
            trials: Some(2000),
            seed: Some(4242),
            ..CommonArgs::default()
        };
        let exp = args.resolve().unwrap();
        records_text(&run(CommandKind::Simulate, &exp).unwrap())
    };
    let sim_a = simulate();
    let sim_b = simulate();
    report(
        "9 reproducibility",
        sweep_a == sweep_b && sim_a == sim_b && !sweep_a.is_empty(),
        format!(
            "sweep records {} bytes, simulate records {} bytes, both byte-identical",
            sweep_a.len(),
            sim_a.len()
        ),
    );
}
