//! The eavesdropper's measurement: square-root discrimination of the pyramid
//! states on the k=l subspace, trivial orthonormal readout on the rest, and
//! the closed-form outcome tables it induces for matched-basis rounds.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::channel::{ChannelParams, Purification};
use crate::error::{Error, Result};
use crate::linalg::CVector;

/// Spectral data of the equal-value ancilla state and the resulting guess
/// probabilities.
#[derive(Debug, Clone, Copy)]
pub struct SrmParameters {
    /// Non-degenerate eigenvalue of ρ^(=).
    pub r0: f64,
    /// (n−1)-fold degenerate eigenvalue of ρ^(=).
    pub r1: f64,
    /// Probability that the measurement points at the correct common value.
    pub eta0: f64,
    /// Probability for each particular wrong value.
    pub eta1: f64,
}

/// Closed forms: r₀ = 1 − (n−1)β₁/(nβ₀), r₁ = β₁/(nβ₀),
/// √η₀ = (√r₀ + (n−1)√r₁)/√n, √η₁ = (√r₀ − √r₁)/√n.
///
/// At β₁ = 0 these degenerate gracefully to η₀ = η₁ = 1/n: the ancilla is
/// uninformative and every guess is a uniform stab.
pub fn srm_parameters(p: &ChannelParams) -> SrmParameters {
    let n = p.n as f64;
    let r0 = 1.0 - (n - 1.0) * p.beta1 / (n * p.beta0);
    let r1 = p.beta1 / (n * p.beta0);
    let sqrt_eta0 = (r0.sqrt() + (n - 1.0) * r1.sqrt()) / n.sqrt();
    let sqrt_eta1 = (r0.sqrt() - r1.sqrt()) / n.sqrt();
    SrmParameters {
        r0,
        r1,
        eta0: sqrt_eta0 * sqrt_eta0,
        eta1: sqrt_eta1 * sqrt_eta1,
    }
}

/// The n² orthonormal measurement directions |e_kl⟩ in the ancilla space,
/// index k·n+l. The k=l directions implement the square-root measurement of
/// the pyramid; the k≠l directions read the orthonormal set out directly.
pub fn srm_vectors(pur: &Purification) -> Result<Vec<CVector>> {
    if pur.decoupled() {
        return Err(Error::DecoupledAncilla);
    }
    let n = pur.n;
    let p = ChannelParams::new(n, pur.beta0)?;
    let srm = srm_parameters(&p);

    // Σ_j E_jj, shared by every k=l direction
    let mut sum = CVector::zeros(pur.ancilla_dim);
    for j in 0..n {
        sum = sum.add(pur.e_state(j, j));
    }
    let shift = (1.0 - (srm.r1 / srm.r0).sqrt()) / n as f64;
    let scale = 1.0 / (n as f64 * srm.r1).sqrt();

    let mut out = Vec::with_capacity(n * n);
    for k in 0..n {
        for l in 0..n {
            if k == l {
                let v = pur
                    .e_state(k, k)
                    .sub(&sum.scale(C64::new(shift, 0.0)))
                    .scale(C64::new(scale, 0.0));
                out.push(v);
            } else {
                out.push(pur.e_state(k, l).clone());
            }
        }
    }
    Ok(out)
}

/// Full attack data for one parameter point.
#[derive(Debug, Clone)]
pub struct AttackModel {
    pub n: usize,
    pub beta0: f64,
    pub beta1: f64,
    pub r0: f64,
    pub r1: f64,
    pub eta0: f64,
    pub eta1: f64,
    /// Orthonormal measurement directions, index k·n+l.
    pub srm_vectors: Vec<CVector>,
}

impl AttackModel {
    /// Requires β₁ > 0; with no noise there is nothing to measure.
    pub fn build(p: &ChannelParams, pur: &Purification) -> Result<Self> {
        let srm = srm_parameters(p);
        let vectors = srm_vectors(pur)?;
        Ok(Self {
            n: p.n,
            beta0: p.beta0,
            beta1: p.beta1,
            r0: srm.r0,
            r1: srm.r1,
            eta0: srm.eta0,
            eta1: srm.eta1,
            srm_vectors: vectors,
        })
    }
}

/// Joint outcome probabilities p[k][l][k'][l'] for matched-basis rounds:
/// Alice k, Bob l, Eve (k', l').
#[derive(Debug, Clone)]
pub struct JointTable {
    pub n: usize,
    p: Vec<f64>,
}

impl JointTable {
    fn idx(&self, k: usize, l: usize, kp: usize, lp: usize) -> usize {
        ((k * self.n + l) * self.n + kp) * self.n + lp
    }

    pub fn get(&self, k: usize, l: usize, kp: usize, lp: usize) -> f64 {
        self.p[self.idx(k, l, kp, lp)]
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Σ over Eve: [(β₀−β₁)δ_kl + β₁]/n.
    pub fn marginal_ab(&self, k: usize, l: usize) -> f64 {
        let mut acc = 0.0;
        for kp in 0..self.n {
            for lp in 0..self.n {
                acc += self.get(k, l, kp, lp);
            }
        }
        acc
    }

    /// Σ over Bob: Alice k against Eve (k', l').
    pub fn marginal_ae(&self, k: usize, kp: usize, lp: usize) -> f64 {
        (0..self.n).map(|l| self.get(k, l, kp, lp)).sum()
    }

    pub fn marginal_a(&self, k: usize) -> f64 {
        let mut acc = 0.0;
        for l in 0..self.n {
            for kp in 0..self.n {
                for lp in 0..self.n {
                    acc += self.get(k, l, kp, lp);
                }
            }
        }
        acc
    }

    pub fn marginal_b(&self, l: usize) -> f64 {
        let mut acc = 0.0;
        for k in 0..self.n {
            for kp in 0..self.n {
                for lp in 0..self.n {
                    acc += self.get(k, l, kp, lp);
                }
            }
        }
        acc
    }

    /// Σ over Alice and Bob: [(β₀−β₁)δ_k'l' + β₁]/n.
    pub fn marginal_e(&self, kp: usize, lp: usize) -> f64 {
        let mut acc = 0.0;
        for k in 0..self.n {
            for l in 0..self.n {
                acc += self.get(k, l, kp, lp);
            }
        }
        acc
    }
}

/// Closed-form joint table for matched-basis rounds:
/// p_{kl;k'l'} = (β₀/n)δ_klδ_k'l'[(η₀−η₁)δ_kk' + η₁] + (β₁/n)(1−δ_kl)δ_kk'δ_ll'.
pub fn joint_table(p: &ChannelParams) -> JointTable {
    let n = p.n;
    let srm = srm_parameters(p);
    let nf = n as f64;
    let mut table = JointTable {
        n,
        p: vec![0.0; n * n * n * n],
    };
    for k in 0..n {
        for l in 0..n {
            for kp in 0..n {
                for lp in 0..n {
                    let mut v = 0.0;
                    if k == l && kp == lp {
                        v += p.beta0 / nf * if k == kp { srm.eta0 } else { srm.eta1 };
                    }
                    if k != l && kp == k && lp == l {
                        v += p.beta1 / nf;
                    }
                    let i = table.idx(k, l, kp, lp);
                    table.p[i] = v;
                }
            }
        }
    }
    table
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Bob,
    Eve,
    Even,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Bob => write!(f, "bob"),
            Verdict::Eve => write!(f, "eve"),
            Verdict::Even => write!(f, "even"),
        }
    }
}

/// Who wins the "guess Alice's value" bet in the long run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BettingComparison {
    /// Bob's success probability β₀.
    pub bob_odds: f64,
    /// Eve's success probability 1 − β₀ + β₀η₀.
    pub eve_odds: f64,
    pub verdict: Verdict,
}

/// Bob wins iff β₀ > (n+3)β₁; the boundary case comes out even. When the
/// params carry their defining ratio the boundary is decided exactly;
/// otherwise a 1e-12 band around equality maps to even.
pub fn betting_comparison(p: &ChannelParams) -> BettingComparison {
    let srm = srm_parameters(p);
    let bob_odds = p.beta0;
    let eve_odds = 1.0 - p.beta0 + p.beta0 * srm.eta0;
    let verdict = if p.from_exact_ratio() {
        let threshold = 1.0 / (p.n + 3) as f64;
        let ratio = p.ratio();
        if ratio == threshold {
            Verdict::Even
        } else if ratio < threshold {
            Verdict::Bob
        } else {
            Verdict::Eve
        }
    } else {
        let d = p.beta0 - (p.n + 3) as f64 * p.beta1;
        if d.abs() <= 1e-12 {
            Verdict::Even
        } else if d > 0.0 {
            Verdict::Bob
        } else {
            Verdict::Eve
        }
    };
    BettingComparison {
        bob_odds,
        eve_odds,
        verdict,
    }
}
