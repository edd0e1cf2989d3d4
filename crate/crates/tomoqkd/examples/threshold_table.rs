//! Solve the security thresholds for the standard dimension grid and print
//! them the way the reference table lays them out.

use tomoqkd::report::{fmt_sig, threshold_table};

fn main() {
    let rows = threshold_table(&[2, 3, 4, 5, 10, 30, 50, 100], &[0.0, 0.5]).unwrap();

    println!("{:>4} {:>5} {:>10} {:>10} {:>10} {:>10} {:>9}", "n", "nu", "beta0", "n*b1/b0", "eta1/eta0", "approx", "rel err");
    for r in &rows {
        println!(
            "{:>4} {:>5} {:>10} {:>10} {:>10} {:>10} {:>8}%",
            r.n,
            fmt_sig(r.nu, 2),
            fmt_sig(r.beta0, 6),
            fmt_sig(r.n_beta1_over_beta0, 6),
            fmt_sig(r.eta1_over_eta0, 6),
            fmt_sig(r.beta0_approx, 6),
            fmt_sig(100.0 * r.approx_rel_error, 3),
        );
    }

    // the qubit zero-yield threshold is the best-known reference point
    let qubit = &rows[0];
    println!();
    println!(
        "qubit channel becomes insecure against the optimal incoherent attack once beta0 < {}",
        fmt_sig(qubit.beta0, 10)
    );
}
