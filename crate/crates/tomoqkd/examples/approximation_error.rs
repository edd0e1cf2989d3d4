//! How good is the closed-form threshold approximation
//! β₀ ≈ (1 + ν + log_n(2/(1−ν))) / (2 + log_n((1+ν)/(1−ν)))?
//!
//! It is derived for large n; this prints its relative error against the
//! exact bisection root over the full dimension range.

use tomoqkd::report::fmt_sig;
use tomoqkd::security::{beta0_approx, threshold_beta0};

fn main() {
    for nu in [0.0, 0.5] {
        println!("target yield nu = {nu}");
        let mut worst: (usize, f64) = (0, 0.0);
        for n in 2..=100 {
            let exact = threshold_beta0(n, nu).unwrap().beta0;
            let approx = beta0_approx(n, nu).unwrap();
            let rel = ((approx - exact) / exact).abs();
            if n > 3 && rel > worst.1 {
                worst = (n, rel);
            }
            if matches!(n, 2 | 3 | 4 | 5 | 10 | 30 | 100) {
                println!(
                    "  n = {n:>3}: exact {} approx {} rel err {}%",
                    fmt_sig(exact, 6),
                    fmt_sig(approx, 6),
                    fmt_sig(100.0 * rel, 3)
                );
            }
        }
        println!(
            "  worst relative error for n > 3: {}% at n = {}",
            fmt_sig(100.0 * worst.1, 3),
            worst.0
        );
        println!();
    }
}
