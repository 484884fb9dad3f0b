//! Acceptance suite: every release gate in one target, one verdict line
//! per criterion. Each criterion is stated in terms of what the simulator
//! must reproduce — closed-form laws, monotonicity, relaying gains, slope
//! separation, bit-level determinism, and the statistical toolbox.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::Instant;

use cognoma::analytic::{
    downlink_noma_two_user_outage, p2p_rayleigh_outage, rate, P2pSpec, TwoUserNomaSpec,
};
use cognoma::channel::{
    sample_rayleigh_gain, InterferenceModel, LinkStat, Node, RngStream, Topology, UserId,
};
use cognoma::montecarlo::{
    db_to_linear, estimate_outage, sweep_snr, wilson_interval, OutageEstimate, RunOptions,
};
use cognoma::noma::{
    af_effective_snr, decode_chain, mrc_combine, threshold, PowerSplit, RateTarget, SicStage,
};
use cognoma::scenario::Preset;
use cognoma::schemes::{ScenarioConfig, Scheme};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn verdict(id: u32, what: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {id} ({what}): {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn opts(trials: u64, seed: u64) -> RunOptions {
    RunOptions {
        trials,
        seed,
        confidence: 0.95,
        workers: None,
    }
}

fn by_user(estimates: Vec<OutageEstimate>) -> BTreeMap<UserId, OutageEstimate> {
    estimates.into_iter().map(|e| (e.user, e)).collect()
}

/// Oracle tolerance: three binomial sigma with a 1e-3 floor.
fn oracle_tol(p: f64, trials: u64) -> f64 {
    (3.0 * (p * (1.0 - p) / trials as f64).sqrt()).max(1e-3)
}

#[test]
fn criterion_1_point_to_point_oracle() {
    // A single receiver holding the whole power budget over one Rayleigh
    // link with no interference is a point-to-point channel; the estimator
    // must land on 1 - exp(-gamma / (rho * mean)) at gamma = 1.
    let cfg = ScenarioConfig {
        scheme: Scheme::UnderlayDirect,
        topology: Topology::new(vec![LinkStat::new(Node::St, Node::Sr(1), 1.0)]).unwrap(),
        split: Some(PowerSplit::new(vec![1.0]).unwrap()),
        rate_pr: None,
        rate_sr: 1.0,
        interference: InterferenceModel::None,
        rho: 1.0,
        num_srs: 1,
        num_relays: 0,
    };
    let trials = 1_000_000;
    let mut pass = true;
    let mut detail = String::new();
    for snr_db in [0.0, 10.0, 20.0] {
        let rho = db_to_linear(snr_db);
        let started = Instant::now();
        let est = estimate_outage(&cfg.with_rho(rho), &opts(trials, 0)).unwrap();
        let elapsed = started.elapsed();
        let p = p2p_rayleigh_outage(P2pSpec {
            rate: rate(1.0, 1.0).unwrap(),
            rho,
            mean_gain: 1.0,
        });
        let err = (est[0].p_hat - p).abs();
        let tol = oracle_tol(p, trials);
        let ok = err <= tol && elapsed.as_secs_f64() < 10.0;
        pass &= ok;
        detail.push_str(&format!(
            "{snr_db} dB: |{:.6} - {p:.6}| = {err:.2e} (tol {tol:.2e}, {:.2}s); ",
            est[0].p_hat,
            elapsed.as_secs_f64()
        ));
    }
    verdict(1, "point-to-point oracle equivalence", pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_2_two_user_noma_oracle() {
    // Fixed-role two-user downlink: the primary holds 0.8 and decodes only
    // itself; the secondary holds 0.2 and cancels the primary first. With
    // no interference this is exactly the two-user closed form.
    let cfg = ScenarioConfig {
        scheme: Scheme::CrnomaDirect,
        topology: Topology::new(vec![
            LinkStat::new(Node::Bs, Node::Pr, 1.0),
            LinkStat::new(Node::Bs, Node::Sr(1), 1.0),
        ])
        .unwrap(),
        split: Some(PowerSplit::new(vec![0.8, 0.2]).unwrap()),
        rate_pr: Some(0.5),
        rate_sr: 0.5,
        interference: InterferenceModel::None,
        rho: 1.0,
        num_srs: 1,
        num_relays: 0,
    };
    let split = PowerSplit::new(vec![0.8, 0.2]).unwrap();
    let trials = 1_000_000;
    let mut pass = true;
    let mut detail = String::new();
    for snr_db in [10.0, 20.0] {
        let rho = db_to_linear(snr_db);
        let est = by_user(estimate_outage(&cfg.with_rho(rho), &opts(trials, 0)).unwrap());
        let (p_w, p_s) = downlink_noma_two_user_outage(
            &split,
            TwoUserNomaSpec {
                rate_weak: rate(0.5, 1.0).unwrap(),
                rate_strong: rate(0.5, 1.0).unwrap(),
                rho,
                mean_gain_weak: 1.0,
                mean_gain_strong: 1.0,
            },
        );
        for (user, p) in [(UserId::Pr, p_w), (UserId::Sr(1), p_s)] {
            let p_hat = est[&user].p_hat;
            let err = (p_hat - p).abs();
            let tol = oracle_tol(p, trials);
            pass &= err <= tol;
            detail.push_str(&format!(
                "{snr_db} dB {user}: |{p_hat:.6} - {p:.6}| = {err:.2e} (tol {tol:.2e}); "
            ));
        }
    }
    verdict(2, "two-user downlink oracle equivalence", pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_3_common_random_numbers_monotonicity() {
    // Shared trial streams across the grid make every per-user curve
    // exactly non-increasing in SNR, not just statistically so.
    let grid: Vec<f64> = (0..=8).map(|i| 5.0 * i as f64).collect();
    let mut violations = 0u32;
    let mut checked = 0u32;
    for preset in Preset::all() {
        for cfg in &preset.configs {
            let table = sweep_snr(cfg, &grid, &opts(100_000, 0)).unwrap();
            // Rows are sorted by (scheme, user, snr); walk each series.
            for pair in table.rows().windows(2) {
                if pair[0].estimate.user == pair[1].estimate.user {
                    checked += 1;
                    if pair[1].estimate.p_hat > pair[0].estimate.p_hat {
                        violations += 1;
                    }
                }
            }
        }
    }
    let pass = violations == 0;
    verdict(
        3,
        "per-user outage non-increasing in SNR",
        pass,
        &format!("{violations} violations over {checked} adjacent grid steps"),
    );
    assert!(pass);
}

#[test]
fn criterion_4_underlay_relaying_gain() {
    let preset = Preset::by_name("underlay").unwrap();
    let rho = db_to_linear(20.0);
    let mut est = BTreeMap::new();
    for cfg in &preset.configs {
        est.insert(
            cfg.scheme,
            by_user(estimate_outage(&cfg.with_rho(rho), &opts(100_000, 0)).unwrap()),
        );
    }
    let direct = &est[&Scheme::UnderlayDirect];
    let coop = &est[&Scheme::UnderlayAf];
    let mut pass = true;
    let mut detail = String::new();
    for user in [UserId::Sr(1), UserId::Sr(2)] {
        let (d, c) = (&direct[&user], &coop[&user]);
        let ok = c.p_hat < d.p_hat && c.ci_high < d.ci_low;
        pass &= ok;
        detail.push_str(&format!(
            "{user}: relayed {:.4} [{:.4},{:.4}] vs direct {:.4} [{:.4},{:.4}]; ",
            c.p_hat, c.ci_low, c.ci_high, d.p_hat, d.ci_low, d.ci_high
        ));
    }
    verdict(
        4,
        "relaying lowers underlay outage at 20 dB, separated intervals",
        pass,
        &detail,
    );
    assert!(pass, "{detail}");
}

#[test]
fn criterion_5_overlay_relaying_gain() {
    let preset = Preset::by_name("overlay").unwrap();
    let rho = db_to_linear(20.0);
    let mut est = BTreeMap::new();
    for cfg in &preset.configs {
        est.insert(
            cfg.scheme,
            by_user(estimate_outage(&cfg.with_rho(rho), &opts(100_000, 0)).unwrap()),
        );
    }
    let direct = &est[&Scheme::OverlayDirect];
    let coop = &est[&Scheme::OverlayCoop];
    let mut pass = true;
    let mut detail = String::new();
    for user in [UserId::Pr, UserId::Sr(1), UserId::Sr(2)] {
        let (d, c) = (&direct[&user], &coop[&user]);
        let ok = c.p_hat < d.p_hat && c.ci_high < d.ci_low;
        pass &= ok;
        detail.push_str(&format!(
            "{user}: relayed {:.4} [{:.4},{:.4}] vs direct {:.4} [{:.4},{:.4}]; ",
            c.p_hat, c.ci_low, c.ci_high, d.p_hat, d.ci_low, d.ci_high
        ));
    }
    verdict(
        5,
        "relaying lowers overlay outage at 20 dB, separated intervals",
        pass,
        &detail,
    );
    assert!(pass, "{detail}");
}

#[test]
fn criterion_6_cooperative_slope_advantage() {
    // Between 20 and 30 dB the cooperative curves must fall faster (in
    // decades of outage) than both baselines, user by user.
    let preset = Preset::by_name("crnoma").unwrap();
    let mut drops: BTreeMap<Scheme, BTreeMap<UserId, f64>> = BTreeMap::new();
    for cfg in &preset.configs {
        let at20 = by_user(estimate_outage(&cfg.with_rho(db_to_linear(20.0)), &opts(100_000, 0)).unwrap());
        let at30 = by_user(estimate_outage(&cfg.with_rho(db_to_linear(30.0)), &opts(100_000, 0)).unwrap());
        let per_user = at20
            .iter()
            .map(|(user, e20)| {
                (*user, e20.p_hat.log10() - at30[user].p_hat.log10())
            })
            .collect();
        drops.insert(cfg.scheme, per_user);
    }
    let coop = &drops[&Scheme::CrnomaCoop];
    let mut pass = true;
    let mut detail = String::new();
    for (user, coop_drop) in coop {
        for baseline in [Scheme::CrnomaDirect, Scheme::OmaTdma] {
            let base_drop = drops[&baseline][user];
            pass &= coop_drop > &base_drop;
            detail.push_str(&format!(
                "{user}: coop {coop_drop:.2} vs {baseline} {base_drop:.2}; "
            ));
        }
    }
    verdict(
        6,
        "cooperative outage falls faster from 20 to 30 dB",
        pass,
        &detail,
    );
    assert!(pass, "{detail}");
}

#[test]
fn criterion_7_csv_determinism_across_workers() {
    let base = [
        "--preset", "crnoma", "--trials", "100000", "--seed", "7",
    ];
    let run = |workers: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_cognoma"))
            .args(base)
            .args(["--workers", workers])
            .output()
            .expect("spawn cognoma");
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let one = run("1");
    let four = run("4");
    let pass = one == four;
    verdict(
        7,
        "full sweep CSV byte-identical across worker counts",
        pass,
        &format!("{} bytes each", one.len()),
    );
    assert!(pass);
}

#[test]
fn criterion_8_statistical_toolbox() {
    let started = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0xACCE97);
    let mut pass = true;
    let mut detail = String::new();

    // SIC chains are prefix-closed.
    let mut sic_ok = true;
    for _ in 0..10_000 {
        let len = 1 + (rng.random::<u32>() % 8) as usize;
        let stages: Vec<SicStage> = (0..len)
            .map(|_| SicStage {
                sinr: rng.random::<f64>() * 20.0,
                threshold: rng.random::<f64>() * 20.0,
            })
            .collect();
        let ok = decode_chain(&stages);
        let mut alive = true;
        for (i, &o) in ok.iter().enumerate() {
            alive = alive && stages[i].sinr >= stages[i].threshold;
            sic_ok &= o == alive;
        }
    }
    pass &= sic_ok;
    detail.push_str(&format!("sic prefix {}; ", if sic_ok { "ok" } else { "broken" }));

    // Combining dominates every branch; the cascade never beats a hop.
    let mut combine_ok = true;
    for _ in 0..10_000 {
        let a = rng.random::<f64>() * 1e4;
        let b = rng.random::<f64>() * 1e4;
        let c = rng.random::<f64>() * 1e4;
        combine_ok &= mrc_combine(&[a, b, c]) >= a.max(b).max(c);
        combine_ok &= af_effective_snr(a, b) <= a.min(b);
    }
    pass &= combine_ok;
    detail.push_str(&format!("mrc/af bounds {}; ", if combine_ok { "ok" } else { "broken" }));

    // Decode thresholds rise with rate and with fewer channel uses.
    let mut thr_ok = true;
    let mut prev = 0.0;
    for i in 1..=40 {
        let r = 0.1 * i as f64;
        let full = threshold(RateTarget::new(r, 1.0).unwrap());
        let half = threshold(RateTarget::new(r, 0.5).unwrap());
        thr_ok &= full > prev && half > full;
        prev = full;
    }
    pass &= thr_ok;
    detail.push_str(&format!("threshold monotone {}; ", if thr_ok { "ok" } else { "broken" }));

    // Kolmogorov-Smirnov distance of the channel sampler against the
    // exponential law it claims to draw from.
    let n = 100_000usize;
    let mean = 1.0;
    let mut samples: Vec<f64> = (0..n)
        .map(|i| sample_rayleigh_gain(mean, RngStream::new(0xD157, i as u64)))
        .collect();
    samples.sort_by(f64::total_cmp);
    let mut ks = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let cdf = 1.0 - (-x / mean).exp();
        let lo = i as f64 / n as f64;
        let hi = (i + 1) as f64 / n as f64;
        ks = ks.max((cdf - lo).abs()).max((hi - cdf).abs());
    }
    let ks_ok = ks < 0.01;
    pass &= ks_ok;
    detail.push_str(&format!("ks {ks:.4}; "));

    // Wilson interval coverage at nominal 95%.
    let (reps, t, p_true) = (1000u32, 10_000u64, 0.1f64);
    let mut covered = 0u32;
    for _ in 0..reps {
        let failures = (0..t).filter(|_| rng.random::<f64>() < p_true).count() as u64;
        let (lo, hi) = wilson_interval(failures, t, 0.95);
        if lo <= p_true && p_true <= hi {
            covered += 1;
        }
    }
    let coverage = covered as f64 / reps as f64;
    let coverage_ok = coverage >= 0.93;
    pass &= coverage_ok;
    detail.push_str(&format!("wilson coverage {coverage:.3}; "));

    let elapsed = started.elapsed().as_secs_f64();
    pass &= elapsed < 60.0;
    detail.push_str(&format!("{elapsed:.1}s"));
    verdict(8, "statistical toolbox properties", pass, &detail);
    assert!(pass, "{detail}");
}
