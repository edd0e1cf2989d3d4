//! Sample the one-way secret-key yield ν(β₀) for a few dimensions and locate
//! each curve's zero crossing by sign change.

use tomoqkd::report::{fmt_sig, yield_curve};

fn main() {
    for n in [2usize, 3, 5, 10, 100] {
        let pts = yield_curve(n, 2001).unwrap();
        let crossing = pts
            .windows(2)
            .find(|w| w[0].nu < 0.0 && w[1].nu >= 0.0)
            .map(|w| 0.5 * (w[0].beta0 + w[1].beta0))
            .expect("yield runs from -1 to +1");
        println!("n = {n:>3}: zero crossing near beta0 = {}", fmt_sig(crossing, 6));
    }

    println!();
    println!("n = 3 curve, ten samples:");
    println!("{:>10} {:>10} {:>10}", "beta0", "nu", "yield");
    for p in yield_curve(3, 10).unwrap() {
        println!(
            "{:>10} {:>10} {:>10}",
            fmt_sig(p.beta0, 6),
            fmt_sig(p.nu, 6),
            fmt_sig(p.ck_yield, 6)
        );
    }
}
