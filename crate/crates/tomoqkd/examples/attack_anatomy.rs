//! Walk through the optimal incoherent attack for one channel: the ancilla
//! geometry Eve is handed, her square-root measurement, and what each side
//! learns per sifted round.

use tomoqkd::attack::{joint_table, srm_parameters, srm_vectors};
use tomoqkd::channel::{build_purification, eve_conditional_states, ChannelParams};
use tomoqkd::report::fmt_sig;
use tomoqkd::security::{mutual_info_ab, mutual_info_ae};

fn main() {
    let n = 3;
    let p = ChannelParams::new(n, 0.8).unwrap();
    println!(
        "channel: n = {n}, beta0 = {}, beta1 = {}  (noise ratio {})",
        p.beta0,
        fmt_sig(p.beta1, 6),
        fmt_sig(p.ratio(), 6)
    );

    let pur = build_purification(&p).unwrap();
    println!("\nancilla overlaps Eve must discriminate (equal-value rounds):");
    for k in 0..n {
        for l in 0..n {
            if k < l {
                let g = pur.e_tilde(k, k).inner(&pur.e_tilde(l, l)).re
                    / (pur.gram_expected(k, k, k, k) * pur.gram_expected(l, l, l, l)).sqrt();
                println!("  <E_{k}{k}|E_{l}{l}> / norms = {}", fmt_sig(g, 6));
            }
        }
    }

    let (rho_eq, _, _) = eve_conditional_states(&pur);
    let s = srm_parameters(&p);
    println!("\nsquare-root measurement on the equal-value subspace:");
    println!("  spectrum weights      r0 = {}, r1 = {}", fmt_sig(s.r0, 6), fmt_sig(s.r1, 6));
    println!("  success probability   eta0 = {}", fmt_sig(s.eta0, 6));
    println!("  per-wrong-letter      eta1 = {}", fmt_sig(s.eta1, 6));
    println!("  conditional state trace check: {}", fmt_sig(rho_eq.trace().re, 6));

    let e = srm_vectors(&pur).unwrap();
    let amp = e[0].inner(&pur.e_tilde(0, 0)).norm_sqr() / (p.beta0 / n as f64);
    println!("  |<e_00|E_00>|^2 recomputed from vectors = {}  (matches eta0)", fmt_sig(amp, 6));

    let t = joint_table(&p);
    // Eve's guess for Alice's value is the first index of her outcome pair.
    let overall: f64 = (0..n)
        .map(|k| (0..n).map(|lp| t.marginal_ae(k, k, lp)).sum::<f64>())
        .sum();
    println!("\njoint outcome table marginals:");
    println!("  P(A=B)                 = {}", fmt_sig((0..n).map(|k| t.marginal_ab(k, k)).sum::<f64>(), 6));
    println!("  P(E guesses A | A=B)   = {}", fmt_sig(s.eta0, 6));
    println!("  P(E = A) overall       = {}  (closed form {})", fmt_sig(overall, 6), fmt_sig(1.0 - p.beta0 + p.beta0 * s.eta0, 6));

    println!("\ninformation balance (base-n units):");
    println!("  I(A;B) = {}", fmt_sig(mutual_info_ab(&p), 6));
    println!("  I(A;E) = {}", fmt_sig(mutual_info_ae(&p), 6));
    println!(
        "  nu     = {}   ({} one-way key)",
        fmt_sig(mutual_info_ab(&p) - mutual_info_ae(&p), 6),
        if mutual_info_ab(&p) > mutual_info_ae(&p) { "positive:" } else { "no" }
    );
}
