//! Acceptance gate: one test per headline claim, each printing a PASS line
//! with the measured values (visible with `--nocapture`; cargo's own
//! ok/FAILED line is the verdict).

use std::time::Instant;

use num_complex::Complex64 as C64;

use tomoqkd::attack::{betting_comparison, joint_table, srm_parameters, srm_vectors};
use tomoqkd::channel::{
    build_purification, family_state, reduced_bob_state, ChannelParams,
};
use tomoqkd::linalg::partial_trace;
use tomoqkd::mub::build_basis_family;
use tomoqkd::report::{simulate_report, RunManifest};
use tomoqkd::security::{beta0_approx, ck_yield, info_ae_components, threshold_beta0};
use tomoqkd::sim::{empirical_mutual_info, eve_accuracy, run_protocol, SimConfig};
use tomoqkd::tomography::{acceptance_pipeline, fit_family, invert_cells, CellProbabilities};

/// Reference threshold table: (n, [β₀, nβ₁/β₀, η₁/η₀] at ν=0, same at ν=0.5),
/// printed to four decimals.
const THRESHOLD_TABLE: [(usize, [f64; 3], [f64; 3]); 8] = [
    (2, [0.8436, 0.3707, 0.2659], [0.9357, 0.1373, 0.4661]),
    (3, [0.7733, 0.4398, 0.2741], [0.9050, 0.1574, 0.4649]),
    (4, [0.7334, 0.4846, 0.2790], [0.8870, 0.1698, 0.4641]),
    (5, [0.7077, 0.5163, 0.2821], [0.8750, 0.1785, 0.4635]),
    (10, [0.6503, 0.5975, 0.2880], [0.8468, 0.2010, 0.4604]),
    (30, [0.6016, 0.6851, 0.2887], [0.8203, 0.2266, 0.4532]),
    (50, [0.5881, 0.7146, 0.2872], [0.8123, 0.2358, 0.4496]),
    (100, [0.5747, 0.7475, 0.2843], [0.8040, 0.2462, 0.4448]),
];

#[test]
fn criterion_1_threshold_table_reproduction() {
    let start = Instant::now();
    let mut worst_beta0 = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for &(n, ref nu0, ref nu5) in &THRESHOLD_TABLE {
        for (nu, expect) in [(0.0, nu0), (0.5, nu5)] {
            let t = threshold_beta0(n, nu).unwrap();
            let d0 = (t.beta0 - expect[0]).abs();
            let d1 = (t.n_beta1_over_beta0 - expect[1]).abs();
            let d2 = (t.eta1_over_eta0 - expect[2]).abs();
            assert!(d0 < 5e-5, "n={n} nu={nu}: beta0 {} vs {}", t.beta0, expect[0]);
            assert!(d1 < 1e-3, "n={n} nu={nu}: noise ratio column off by {d1}");
            assert!(d2 < 1e-3, "n={n} nu={nu}: eta ratio column off by {d2}");
            worst_beta0 = worst_beta0.max(d0);
            worst_ratio = worst_ratio.max(d1.max(d2));
        }
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "table took {elapsed:?}, budget is 1 s"
    );
    println!(
        "criterion 1 PASS: all 16 threshold cells match (worst beta0 dev {worst_beta0:.2e}, \
         worst ratio dev {worst_ratio:.2e}) in {elapsed:?}"
    );
}

#[test]
fn criterion_2_threshold_approximation_accuracy() {
    // The claim is about absolute accuracy of the approximate β₀ — that
    // reading reproduces the stated validity cutoffs exactly, and both
    // boundary cases sit outside the bound, so the cutoffs are sharp.
    let abs_err = |n: usize, nu: f64| {
        let exact = threshold_beta0(n, nu).unwrap().beta0;
        (beta0_approx(n, nu).unwrap() - exact).abs()
    };
    let mut worst0 = (0usize, 0.0f64);
    for n in 5..=100 {
        let e = abs_err(n, 0.0);
        assert!(e <= 0.01, "nu=0, n={n}: |approx - exact| = {e:.5} > 0.01");
        if e > worst0.1 {
            worst0 = (n, e);
        }
    }
    let mut worst5 = (0usize, 0.0f64);
    for n in 4..=100 {
        let e = abs_err(n, 0.5);
        assert!(e <= 0.01, "nu=0.5, n={n}: |approx - exact| = {e:.5} > 0.01");
        if e > worst5.1 {
            worst5 = (n, e);
        }
    }
    // sharpness: the first excluded dimension fails the bound on both rows
    assert!(abs_err(4, 0.0) > 0.01);
    assert!(abs_err(3, 0.5) > 0.01);

    // relative error is also below 1% except for the single documented
    // near-miss at (nu=0, n=5), which sits just above it
    let rel_err = |n: usize, nu: f64| {
        let exact = threshold_beta0(n, nu).unwrap().beta0;
        (beta0_approx(n, nu).unwrap() - exact).abs() / exact
    };
    for n in 6..=100 {
        assert!(rel_err(n, 0.0) <= 0.01, "nu=0, n={n}");
    }
    for n in 4..=100 {
        assert!(rel_err(n, 0.5) <= 0.01, "nu=0.5, n={n}");
    }
    let edge = rel_err(5, 0.0);
    assert!(
        (0.010..0.011).contains(&edge),
        "(nu=0, n=5) relative error moved: {edge:.6}"
    );

    println!(
        "criterion 2 PASS: |approx - exact| <= 0.01 for (nu=0, n>4) and (nu=0.5, n>3), \
         cutoffs sharp; worst abs dev {:.5} at n={} (nu=0), {:.5} at n={} (nu=0.5); \
         single relative near-miss {:.4}% at (nu=0, n=5)",
        worst0.1,
        worst0.0,
        worst5.1,
        worst5.0,
        100.0 * edge
    );
}

#[test]
fn criterion_3_yield_endpoints_and_monotonicity() {
    for n in [2usize, 3, 5, 10, 100] {
        let lo = 1.0 / n as f64;
        let nu_at = |beta0: f64| {
            let p = ChannelParams::new(n, beta0).unwrap();
            ck_yield(&p).nu
        };
        assert!((nu_at(lo) + 1.0).abs() < 1e-9, "n={n}: nu(1/n) != -1");
        assert!((nu_at(1.0) - 1.0).abs() < 1e-9, "n={n}: nu(1) != +1");

        let mut prev = f64::NEG_INFINITY;
        for i in 0..=1000 {
            let beta0 = lo + (1.0 - lo) * i as f64 / 1000.0;
            let nu = nu_at(beta0);
            assert!(nu > prev, "n={n}: nu not strictly increasing at beta0={beta0}");
            prev = nu;
        }
    }
    println!(
        "criterion 3 PASS: nu spans [-1, +1] within 1e-9 and is strictly monotone on a \
         1000-point grid for n in {{2, 3, 5, 10, 100}}"
    );
}

#[test]
fn criterion_4_closed_forms_match_constructed_vectors() {
    let mut worst_joint = 0.0f64;
    let mut worst_gram = 0.0f64;
    let mut worst_trace = 0.0f64;
    for n in [2usize, 3, 5] {
        let f = build_basis_family(n).unwrap();
        for j in 1..=9 {
            let ratio = j as f64 / 10.0;
            let p = ChannelParams::params_from_ratio(n, ratio).unwrap();
            let pur = build_purification(&p).unwrap();

            // joint outcome table from raw amplitudes vs the closed form
            let e = srm_vectors(&pur).unwrap();
            let table = joint_table(&p);
            for k in 0..n {
                for l in 0..n {
                    let et = pur.e_tilde(k, l);
                    for kp in 0..n {
                        for lp in 0..n {
                            let amp = et.inner(&e[kp * n + lp]).norm_sqr();
                            let dev = (amp - table.get(k, l, kp, lp)).abs();
                            assert!(
                                dev < 1e-10,
                                "n={n} ratio={ratio}: cell ({k}{l};{kp}{lp}) off by {dev:.2e}"
                            );
                            worst_joint = worst_joint.max(dev);
                        }
                    }
                }
            }

            // ancilla Gram matrix vs its closed form
            for k in 0..n {
                for l in 0..n {
                    for kp in 0..n {
                        for lp in 0..n {
                            let g = pur.e_tilde(k, l).inner(&pur.e_tilde(kp, lp));
                            let dev = (g.re - pur.gram_expected(k, l, kp, lp)).abs() + g.im.abs();
                            assert!(dev < 1e-12);
                            worst_gram = worst_gram.max(dev);
                        }
                    }
                }
            }

            // tracing out the ancilla recovers the two-qunit family state;
            // projecting Alice recovers Bob's conditional state
            let rho_abe = pur.psi_abe.outer(&pur.psi_abe);
            let dims = [n, n, pur.ancilla_dim];
            let rho_ab = partial_trace(&rho_abe, &dims, &[0, 1]).unwrap();
            let dev = rho_ab.max_abs_diff(&family_state(&p));
            assert!(dev < 1e-12, "n={n} ratio={ratio}: family state off by {dev:.2e}");
            worst_trace = worst_trace.max(dev);

            for m in 0..f.num_bases() {
                for k in 0..n {
                    let alice = &f.alice_bases[m][k];
                    let mut bob = tomoqkd::linalg::CMatrix::zeros(n, n);
                    for i in 0..n {
                        for ip in 0..n {
                            let mut acc = C64::new(0.0, 0.0);
                            for j in 0..n {
                                for jp in 0..n {
                                    acc += alice.get(j).conj()
                                        * rho_ab.get(j * n + i, jp * n + ip)
                                        * alice.get(jp);
                                }
                            }
                            bob.set(i, ip, acc);
                        }
                    }
                    // P(k) = 1/n, so the conditional state is n times the block
                    let bob = bob.scale(C64::new(n as f64, 0.0));
                    let expect = reduced_bob_state(&p, &f, m, k).unwrap();
                    let dev = bob.max_abs_diff(&expect);
                    assert!(dev < 1e-12, "n={n} ratio={ratio} basis {m} value {k}: {dev:.2e}");
                    worst_trace = worst_trace.max(dev);
                }
            }
        }
    }
    println!(
        "criterion 4 PASS: amplitude joint table within 1e-10 (worst {worst_joint:.2e}), \
         Gram within 1e-12 (worst {worst_gram:.2e}), partial traces within 1e-12 \
         (worst {worst_trace:.2e}) over n in {{2, 3, 5}} x 9 noise points"
    );
}

#[test]
fn criterion_5_parameter_identities() {
    let mut worst = 0.0f64;
    for n in [2usize, 3, 5, 10, 100] {
        for j in 0..=10 {
            let ratio = j as f64 / 10.0;
            let p = ChannelParams::params_from_ratio(n, ratio).unwrap();
            let s = srm_parameters(&p);
            let nn = n as f64;
            let d1 = (s.r0 + (nn - 1.0) * s.r1 - 1.0).abs();
            let d2 = (s.eta0 + (nn - 1.0) * s.eta1 - 1.0).abs();
            let d3 = (s.eta0.sqrt() - s.eta1.sqrt() - (p.beta1 / p.beta0).sqrt()).abs();
            assert!(d1 < 1e-12 && d2 < 1e-12 && d3 < 1e-12, "n={n} ratio={ratio}");
            worst = worst.max(d1).max(d2).max(d3);
        }

        // betting break-even at β₀ = (n+3)β₁
        let p = ChannelParams::params_from_ratio(n, 1.0 / (n as f64 + 3.0)).unwrap();
        let s = srm_parameters(&p);
        let bob = p.beta0;
        let eve = 1.0 - p.beta0 + p.beta0 * s.eta0;
        let d = (bob - eve).abs();
        assert!(d < 1e-12, "n={n}: betting equality off by {d:.2e}");
        worst = worst.max(d);
        assert_eq!(
            betting_comparison(&p).verdict,
            tomoqkd::attack::Verdict::Even
        );
    }
    println!("criterion 5 PASS: weight/accuracy/betting identities hold within 1e-12 (worst {worst:.2e})");
}

#[test]
fn criterion_6_monte_carlo_agreement() {
    let n = 3;
    let beta0 = 0.8;
    let pairs: u64 = 1_000_000;
    let params = ChannelParams::new(n, beta0).unwrap();
    let cfg = SimConfig::new(params, pairs, 1234).unwrap();

    let start = Instant::now();
    let t = run_protocol(&cfg).unwrap();
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "simulation took {elapsed:?}, budget is 30 s"
    );

    let sigma = |trials: u64, p: f64| (trials as f64 * p * (1.0 - p)).sqrt();

    // matched fraction: bases agree with probability 1/(n+1)
    let sifted = t.sifted_len();
    let p_match = 1.0 / (n + 1) as f64;
    let dev_match = (sifted as f64 - pairs as f64 * p_match).abs() / sigma(pairs, p_match);
    assert!(dev_match < 4.0, "matched fraction off by {dev_match:.1} sigma");

    // same-value rate on sifted rounds
    let same = t.same_value_rate().unwrap();
    let dev_same = (same - beta0).abs() * sifted as f64 / sigma(sifted, beta0);
    assert!(dev_same < 4.0, "same-value rate off by {dev_same:.1} sigma");

    // Eve's overall accuracy against the closed form
    let s = srm_parameters(&params);
    let p_eve = 1.0 - beta0 + beta0 * s.eta0;
    let eve = eve_accuracy(&t).unwrap();
    let dev_eve =
        (eve.p_correct_overall - p_eve).abs() * sifted as f64 / sigma(sifted, p_eve);
    assert!(dev_eve < 4.0, "Eve accuracy off by {dev_eve:.1} sigma");

    // every mismatched-pair cell is uniform at 1/n²
    let u = 1.0 / (n * n) as f64;
    let mut worst_cell = 0.0f64;
    for a in 0..=n {
        for b in 0..=n {
            if a == b {
                continue;
            }
            let total = t.counts.pair_total(a, b);
            for k in 0..n {
                for l in 0..n {
                    let c = t.counts.get(a, b, k, l) as f64;
                    let dev = (c - total as f64 * u).abs() / sigma(total, u);
                    assert!(
                        dev < 4.0,
                        "cell ({a},{b},{k},{l}) off by {dev:.1} sigma"
                    );
                    worst_cell = worst_cell.max(dev);
                }
            }
        }
    }

    println!(
        "criterion 6 PASS: 10^6 rounds in {elapsed:?}; matched {dev_match:.1} sigma, \
         same-value {dev_same:.1} sigma, Eve {dev_eve:.1} sigma, worst mismatched cell \
         {worst_cell:.1} sigma"
    );
}

#[test]
fn criterion_7_tomography_inversion_and_rejection() {
    // exact probabilities invert back to the family state
    let mut worst_exact = 0.0f64;
    for n in [2usize, 3] {
        let f = build_basis_family(n).unwrap();
        for beta0 in [1.0 / n as f64, 0.75, 0.9, 1.0] {
            let p = ChannelParams::new(n, beta0).unwrap();
            let rho = family_state(&p);
            let cells = CellProbabilities::exact_from_state(&rho, &f).unwrap();
            let rho_hat = invert_cells(&cells, &f).unwrap();
            let dev = rho.max_abs_diff(&rho_hat);
            assert!(dev < 1e-8, "n={n} beta0={beta0}: inversion error {dev:.2e}");
            worst_exact = worst_exact.max(dev);
            let fit = fit_family(&rho_hat, &f, None).unwrap();
            assert!((fit.beta0_hat - beta0).abs() < 1e-8);
            assert!(fit.accepted);
        }
    }

    // a simulated long run lands within ±0.01 and is accepted
    let n = 3;
    let beta0 = 0.8;
    let params = ChannelParams::new(n, beta0).unwrap();
    let cfg = SimConfig::new(params, 1_000_000, 99).unwrap();
    let t = run_protocol(&cfg).unwrap();
    let f = build_basis_family(n).unwrap();
    let fit = acceptance_pipeline(&t, &f).unwrap();
    assert!(fit.accepted, "honest 10^6-round run must be accepted");
    let sim_dev = (fit.beta0_hat - beta0).abs();
    assert!(sim_dev < 0.01, "beta0_hat {} vs {beta0}", fit.beta0_hat);

    // a product-state override is rejected through the CLI with exit code 2
    let dir = std::env::temp_dir().join(format!("tomoqkd-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let d = 4;
    let mut entries = vec![[0.0f64, 0.0]; d * d];
    entries[0] = [1.0, 0.0]; // |00><00| row-major
    let state_path = dir.join("product.json");
    std::fs::write(&state_path, serde_json::to_string(&entries).unwrap()).unwrap();
    let report_path = dir.join("report.json");

    let status = std::process::Command::new(env!("CARGO_BIN_EXE_tomoqkd"))
        .args([
            "simulate",
            "--n",
            "2",
            "--beta0",
            "0.9",
            "--pairs",
            "20000",
            "--seed",
            "4",
            "--override-state",
        ])
        .arg(&state_path)
        .arg("--out")
        .arg(&report_path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2), "override run must exit with code 2");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["verdict"], "reject");
    std::fs::remove_dir_all(&dir).ok();

    println!(
        "criterion 7 PASS: exact inversion within 1e-8 (worst {worst_exact:.2e}); simulated \
         beta0_hat within {sim_dev:.4} of truth and accepted; product override exits 2 with a \
         reject verdict"
    );
}

#[test]
fn criterion_8_end_to_end_key_yield() {
    let n = 3;
    let beta0 = 0.9050;
    let params = ChannelParams::new(n, beta0).unwrap();
    let cfg = SimConfig::new(params, 1_000_000, 7).unwrap();
    let t = run_protocol(&cfg).unwrap();
    let f = build_basis_family(n).unwrap();
    let fit = acceptance_pipeline(&t, &f).unwrap();
    assert!(fit.accepted, "honest run must pass tomography");

    let mi = empirical_mutual_info(&t).unwrap();
    let assumed = ChannelParams::new(n, mi.beta0_hat.clamp(1.0 / n as f64, 1.0)).unwrap();
    let s = srm_parameters(&assumed);
    let nu_hat = mi.i_ab_hat - info_ae_components(n, assumed.beta0, s.eta0, s.eta1);
    assert!(
        (nu_hat - 0.5).abs() <= 0.01,
        "empirical yield {nu_hat:.4} should be 0.5 +- 0.01"
    );

    let net = t.net_key_length();
    let manifest = RunManifest::new("simulate", serde_json::json!({}));
    let report = simulate_report(&t, &fit, &manifest, 12);
    assert_eq!(report["verdict"], "accept");
    let key = report["empirical"]["secure_key_nits"].as_u64().unwrap();
    assert_eq!(key, (nu_hat.max(0.0) * net as f64).floor() as u64);
    assert!((key as f64 - nu_hat * net as f64).abs() <= 1.0);

    println!(
        "criterion 8 PASS: accepted; nu_hat = {nu_hat:.4}; secure key {key} nits from {net} \
         sifted-and-kept ({}% of raw pairs)",
        (100 * key) as f64 / t.pairs as f64
    );
}
