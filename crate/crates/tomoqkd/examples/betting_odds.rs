//! The "who knows Alice's value better" bet: Bob wins a round when his value
//! matches Alice's; Eve wins when her measurement names it. Prints both odds
//! across the noise range and the break-even channel.

use tomoqkd::attack::{betting_comparison, Verdict};
use tomoqkd::channel::ChannelParams;
use tomoqkd::report::fmt_sig;

fn main() {
    let n = 2;
    println!("n = {n}");
    println!("{:>8} {:>10} {:>10}  verdict", "b1/b0", "bob", "eve");
    for i in 0..=10 {
        let ratio = i as f64 / 10.0;
        let p = ChannelParams::params_from_ratio(n, ratio).unwrap();
        let b = betting_comparison(&p);
        println!(
            "{:>8} {:>10} {:>10}  {}",
            fmt_sig(ratio, 3),
            fmt_sig(b.bob_odds, 6),
            fmt_sig(b.eve_odds, 6),
            b.verdict
        );
    }

    // break-even sits at beta0 = (n+3) beta1 for every n
    println!();
    for n in [2usize, 3, 5, 10] {
        let ratio = 1.0 / (n as f64 + 3.0);
        let p = ChannelParams::params_from_ratio(n, ratio).unwrap();
        let b = betting_comparison(&p);
        assert_eq!(b.verdict, Verdict::Even);
        println!(
            "n = {n:>2}: even odds at beta1/beta0 = 1/{} -> both sides win {}",
            n + 3,
            fmt_sig(b.bob_odds, 6)
        );
    }
}
