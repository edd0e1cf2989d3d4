//! Monte Carlo run of the full protocol: pair emission, random basis
//! choices, outcome sampling for all three parties, sifting, and raw-key
//! extraction.
//!
//! Every round draws from its own counter-indexed stream of a ChaCha8
//! generator keyed by the seed, so results are independent of any chunking
//! and reproducible bit-for-bit. Per-round draw order is fixed:
//! Alice's basis, Bob's basis, one uniform for the outcome cell, one uniform
//! for Eve's guess (only on matched equal-value rounds with the attack on),
//! and one uniform for the sacrifice decision (only on matched rounds).

use std::io::Write as IoWrite;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::attack::srm_parameters;
use crate::channel::{family_state, ChannelParams};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::mub::{build_basis_family, BasisFamily};

/// Outcome counts indexed by (alice basis, bob basis, alice value, bob value).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountTensor {
    pub n: usize,
    pub num_bases: usize,
    data: Vec<u64>,
}

impl CountTensor {
    pub fn new(n: usize) -> Self {
        let num_bases = n + 1;
        Self {
            n,
            num_bases,
            data: vec![0; num_bases * num_bases * n * n],
        }
    }

    fn idx(&self, a: usize, b: usize, k: usize, l: usize) -> usize {
        ((a * self.num_bases + b) * self.n + k) * self.n + l
    }

    pub fn get(&self, a: usize, b: usize, k: usize, l: usize) -> u64 {
        self.data[self.idx(a, b, k, l)]
    }

    pub fn add(&mut self, a: usize, b: usize, k: usize, l: usize) {
        let i = self.idx(a, b, k, l);
        self.data[i] += 1;
    }

    /// Rounds recorded for one basis pair.
    pub fn pair_total(&self, a: usize, b: usize) -> u64 {
        let mut acc = 0;
        for k in 0..self.n {
            for l in 0..self.n {
                acc += self.get(a, b, k, l);
            }
        }
        acc
    }

    pub fn total(&self) -> u64 {
        self.data.iter().sum()
    }

    /// CSV dump with header `a,b,k,l,count`.
    pub fn write_csv<W: IoWrite>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "a,b,k,l,count")?;
        for a in 0..self.num_bases {
            for b in 0..self.num_bases {
                for k in 0..self.n {
                    for l in 0..self.n {
                        writeln!(w, "{a},{b},{k},{l},{}", self.get(a, b, k, l))?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub params: ChannelParams,
    pub pairs: u64,
    pub seed: u64,
    pub eve_enabled: bool,
    /// Fraction of matched rounds given up for tomography.
    pub sacrifice_fraction: f64,
    /// Replace the source by an arbitrary state; used to exercise the
    /// tomography rejection path. No attack outcomes are generated for it.
    pub state_override: Option<CMatrix>,
}

impl SimConfig {
    pub fn new(params: ChannelParams, pairs: u64, seed: u64) -> Result<Self> {
        if pairs == 0 {
            return Err(Error::InvalidConfig("pairs must be ≥ 1".into()));
        }
        Ok(Self {
            params,
            pairs,
            seed,
            eve_enabled: true,
            sacrifice_fraction: 0.1,
            state_override: None,
        })
    }

    pub fn with_eve(mut self, enabled: bool) -> Self {
        self.eve_enabled = enabled;
        self
    }

    pub fn with_sacrifice(mut self, fraction: f64) -> Result<Self> {
        if !fraction.is_finite() || !(0.0..=1.0).contains(&fraction) {
            return Err(Error::InvalidConfig(format!(
                "sacrifice fraction must lie in [0, 1], got {fraction}"
            )));
        }
        self.sacrifice_fraction = fraction;
        Ok(self)
    }

    pub fn with_override(mut self, state: CMatrix) -> Result<Self> {
        let d = self.params.n * self.params.n;
        if state.rows() != d || state.cols() != d {
            return Err(Error::InvalidState(format!(
                "override state must be {d}×{d}, got {}×{}",
                state.rows(),
                state.cols()
            )));
        }
        let herm = state.hermiticity_deviation();
        if herm > 1e-10 {
            return Err(Error::InvalidState(format!(
                "override state is not Hermitian: deviation {herm:.3e}"
            )));
        }
        if (state.trace().re - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidState(format!(
                "override state has trace {}, expected 1",
                state.trace().re
            )));
        }
        let eig = hermitian_eigen(&state)?;
        if let Some(&min) = eig.eigenvalues.last() {
            if min < -1e-10 {
                return Err(Error::InvalidState(format!(
                    "override state is not positive semidefinite: eigenvalue {min:.3e}"
                )));
            }
        }
        self.state_override = Some(state);
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RoundRecord {
    pub alice_m: u8,
    pub bob_m: u8,
    pub alice_k: u8,
    pub bob_l: u8,
    /// Eve's measured (k', l'); absent on mismatched, attack-off, or
    /// override rounds.
    pub eve_outcome: Option<(u8, u8)>,
    /// True for matched rounds donated to tomography.
    pub sacrificed: bool,
}

#[derive(Debug, Clone)]
pub struct ProtocolTranscript {
    pub params: ChannelParams,
    pub pairs: u64,
    pub seed: u64,
    pub eve_enabled: bool,
    pub sacrifice_fraction: f64,
    pub overridden: bool,
    pub rounds: Vec<RoundRecord>,
    /// Alice's values on matched rounds, in round order.
    pub sifted_key_alice: Vec<u8>,
    /// Bob's values on the same rounds.
    pub sifted_key_bob: Vec<u8>,
    /// Eve's inferred value for Alice on the same rounds; empty when she is
    /// absent.
    pub eve_guess: Vec<u8>,
    /// All rounds.
    pub counts: CountTensor,
    /// Mismatched rounds plus sacrificed matched rounds.
    pub tomo_counts: CountTensor,
    pub sacrificed_rounds: u64,
}

impl ProtocolTranscript {
    pub fn sifted_len(&self) -> u64 {
        self.sifted_key_alice.len() as u64
    }

    /// Raw-key nits left after the tomography donation.
    pub fn net_key_length(&self) -> u64 {
        self.sifted_len() - self.sacrificed_rounds
    }

    /// Fraction of matched rounds where both values agree.
    pub fn same_value_rate(&self) -> Option<f64> {
        if self.sifted_key_alice.is_empty() {
            return None;
        }
        let same = self
            .sifted_key_alice
            .iter()
            .zip(&self.sifted_key_bob)
            .filter(|(a, b)| a == b)
            .count();
        Some(same as f64 / self.sifted_key_alice.len() as f64)
    }

    /// Round records as CSV; refuses to dump more than `limit` rounds
    /// (default cap 100 000) to keep artifacts bounded.
    pub fn write_rounds_csv<W: IoWrite>(
        &self,
        w: &mut W,
        limit: Option<usize>,
    ) -> std::io::Result<()> {
        let cap = limit.unwrap_or(100_000);
        writeln!(w, "round,alice_m,bob_m,alice_k,bob_l,eve_kp,eve_lp,sacrificed")?;
        for (i, r) in self.rounds.iter().take(cap).enumerate() {
            let (kp, lp) = match r.eve_outcome {
                Some((kp, lp)) => (kp.to_string(), lp.to_string()),
                None => (String::new(), String::new()),
            };
            writeln!(
                w,
                "{i},{},{},{},{},{kp},{lp},{}",
                r.alice_m, r.bob_m, r.alice_k, r.bob_l, r.sacrificed
            )?;
        }
        Ok(())
    }
}

/// Born-rule cumulative tables for every basis pair of a fixed state.
struct CellSampler {
    n: usize,
    num_bases: usize,
    /// cumulative[pair][cell]; last entry of each row is exactly 1
    cumulative: Vec<Vec<f64>>,
}

impl CellSampler {
    fn build(state: &CMatrix, f: &BasisFamily) -> Self {
        let n = f.n;
        let num_bases = f.num_bases();
        let mut cumulative = Vec::with_capacity(num_bases * num_bases);
        for a in 0..num_bases {
            for b in 0..num_bases {
                let mut row = Vec::with_capacity(n * n);
                let mut acc = 0.0;
                for k in 0..n {
                    for l in 0..n {
                        let p = state.expectation(&f.product_ket(a, b, k, l)).max(0.0);
                        acc += p;
                        row.push(acc);
                    }
                }
                // normalize away rounding so the final bound is exact
                for v in &mut row {
                    *v /= acc;
                }
                if let Some(last) = row.last_mut() {
                    *last = 1.0;
                }
                cumulative.push(row);
            }
        }
        Self {
            n,
            num_bases,
            cumulative,
        }
    }

    fn sample(&self, a: usize, b: usize, u: f64) -> (usize, usize) {
        let row = &self.cumulative[a * self.num_bases + b];
        let cell = row.partition_point(|&edge| edge < u).min(row.len() - 1);
        (cell / self.n, cell % self.n)
    }
}

pub fn run_protocol(cfg: &SimConfig) -> Result<ProtocolTranscript> {
    let n = cfg.params.n;
    let f = build_basis_family(n)?;
    let state = match &cfg.state_override {
        Some(s) => s.clone(),
        None => family_state(&cfg.params),
    };
    let sampler = CellSampler::build(&state, &f);
    let srm = srm_parameters(&cfg.params);
    let overridden = cfg.state_override.is_some();
    let eve_active = cfg.eve_enabled && !overridden;

    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rounds = Vec::with_capacity(cfg.pairs as usize);
    let mut counts = CountTensor::new(n);
    let mut tomo_counts = CountTensor::new(n);
    let mut sifted_key_alice = Vec::new();
    let mut sifted_key_bob = Vec::new();
    let mut eve_guess = Vec::new();
    let mut sacrificed_rounds = 0u64;

    for round in 0..cfg.pairs {
        let mut rng = base.clone();
        rng.set_stream(round);

        let alice_m = rng.random_range(0..=n);
        let bob_m = rng.random_range(0..=n);
        let u_cell: f64 = rng.random();
        let (k, l) = sampler.sample(alice_m, bob_m, u_cell);
        let matched = alice_m == bob_m;

        let eve_outcome = if matched && eve_active {
            if k == l {
                let u: f64 = rng.random();
                let kp = if u < srm.eta0 {
                    k
                } else {
                    // uniform over the n−1 wrong values, in increasing order
                    let j = (((u - srm.eta0) / srm.eta1) as usize).min(n - 2);
                    if j < k {
                        j
                    } else {
                        j + 1
                    }
                };
                Some((kp as u8, kp as u8))
            } else {
                Some((k as u8, l as u8))
            }
        } else {
            None
        };

        let sacrificed = matched && (rng.random::<f64>() < cfg.sacrifice_fraction);

        counts.add(alice_m, bob_m, k, l);
        if matched {
            sifted_key_alice.push(k as u8);
            sifted_key_bob.push(l as u8);
            if let Some((kp, _)) = eve_outcome {
                eve_guess.push(kp);
            }
            if sacrificed {
                tomo_counts.add(alice_m, bob_m, k, l);
                sacrificed_rounds += 1;
            }
        } else {
            tomo_counts.add(alice_m, bob_m, k, l);
        }

        rounds.push(RoundRecord {
            alice_m: alice_m as u8,
            bob_m: bob_m as u8,
            alice_k: k as u8,
            bob_l: l as u8,
            eve_outcome,
            sacrificed,
        });
    }

    Ok(ProtocolTranscript {
        params: cfg.params,
        pairs: cfg.pairs,
        seed: cfg.seed,
        eve_enabled: cfg.eve_enabled,
        sacrifice_fraction: cfg.sacrifice_fraction,
        overridden,
        rounds,
        sifted_key_alice,
        sifted_key_bob,
        eve_guess,
        counts,
        tomo_counts,
        sacrificed_rounds,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EveAccuracy {
    /// Fraction of sifted rounds where Eve named Alice's value correctly.
    pub p_correct_overall: f64,
    /// Same, restricted to rounds where Alice and Bob agreed.
    pub p_correct_given_equal: f64,
}

pub fn eve_accuracy(t: &ProtocolTranscript) -> Result<EveAccuracy> {
    if t.sifted_key_alice.is_empty() {
        return Err(Error::NoSiftedRounds);
    }
    if t.eve_guess.is_empty() {
        return Err(Error::EveDisabled);
    }
    let mut correct = 0u64;
    let mut equal_rounds = 0u64;
    let mut equal_correct = 0u64;
    for i in 0..t.sifted_key_alice.len() {
        let hit = t.eve_guess[i] == t.sifted_key_alice[i];
        if hit {
            correct += 1;
        }
        if t.sifted_key_alice[i] == t.sifted_key_bob[i] {
            equal_rounds += 1;
            if hit {
                equal_correct += 1;
            }
        }
    }
    Ok(EveAccuracy {
        p_correct_overall: correct as f64 / t.sifted_key_alice.len() as f64,
        p_correct_given_equal: if equal_rounds == 0 {
            f64::NAN
        } else {
            equal_correct as f64 / equal_rounds as f64
        },
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EmpiricalMi {
    /// Same-value rate over matched rounds — the empirical β₀.
    pub beta0_hat: f64,
    /// Eve's accuracy on equal-value rounds — the empirical η₀; absent
    /// without attack outcomes.
    pub eta0_hat: Option<f64>,
    /// The information formulas evaluated at the empirical parameters,
    /// base-n units.
    pub i_ab_hat: f64,
    pub i_ae_hat: Option<f64>,
    /// Set when fewer than 10⁴ sifted rounds back the estimates.
    pub insufficient_data: bool,
}

/// Plug-in mutual informations from the matched rounds of a transcript: the
/// empirical (β̂₀, η̂₀) inserted into the closed-form expressions. Exact at
/// the noiseless endpoint, where every round agrees.
pub fn empirical_mutual_info(t: &ProtocolTranscript) -> Result<EmpiricalMi> {
    if t.sifted_key_alice.is_empty() {
        return Err(Error::NoSiftedRounds);
    }
    let n = t.params.n;
    let beta0_hat = t.same_value_rate().expect("sifted rounds exist");
    let beta1_hat = (1.0 - beta0_hat) / (n - 1) as f64;
    let i_ab_hat = crate::security::info_ab_components(n, beta0_hat, beta1_hat);

    let mut equal_rounds = 0u64;
    let mut equal_correct = 0u64;
    for i in 0..t.sifted_key_alice.len() {
        if t.sifted_key_alice[i] == t.sifted_key_bob[i] {
            equal_rounds += 1;
            if !t.eve_guess.is_empty() && t.eve_guess[i] == t.sifted_key_alice[i] {
                equal_correct += 1;
            }
        }
    }
    let eta0_hat = if t.eve_guess.is_empty() || equal_rounds == 0 {
        None
    } else {
        Some(equal_correct as f64 / equal_rounds as f64)
    };
    let i_ae_hat = eta0_hat.map(|eta0| {
        let eta1 = (1.0 - eta0) / (n - 1) as f64;
        crate::security::info_ae_components(n, beta0_hat, eta0, eta1)
    });

    Ok(EmpiricalMi {
        beta0_hat,
        eta0_hat,
        i_ab_hat,
        i_ae_hat,
        insufficient_data: t.sifted_key_alice.len() < 10_000,
    })
}
