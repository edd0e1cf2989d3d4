//! The accepted one-parameter state family, its explicit three-party
//! purification, and the states each party holds conditionally.
//!
//! The ancilla space has dimension n²+1 with a fixed layout: component 0 is
//! the shared direction `w`, components 1..=n are the pyramid offsets `f_k`,
//! and the remaining n(n−1) components are the orthonormal `g_kl` (k ≠ l) in
//! row-major order with the diagonal skipped. The ancilla states only matter
//! through their inner products; this embedding realizes them with the
//! smallest dimension that keeps the pyramid structure explicit.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::mub::{entangled_ket, BasisFamily};

/// Noise parameters (n, β₀, β₁) with β₀ + (n−1)β₁ = 1.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChannelParams {
    pub n: usize,
    pub beta0: f64,
    pub beta1: f64,
    /// Set when the params were specified as a ratio β₁/β₀; keeps verdict
    /// boundaries exact for rational inputs.
    exact_ratio: Option<f64>,
}

impl ChannelParams {
    pub fn new(n: usize, beta0: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("n must be ≥ 2, got {n}")));
        }
        if !beta0.is_finite() || beta0 < 1.0 / n as f64 || beta0 > 1.0 {
            return Err(Error::InvalidParams(format!(
                "beta0 must lie in [1/n, 1] = [{:.6}, 1], got {beta0}",
                1.0 / n as f64
            )));
        }
        let beta1 = (1.0 - beta0) / (n - 1) as f64;
        Ok(Self {
            n,
            beta0,
            beta1,
            exact_ratio: None,
        })
    }

    /// Construct from the noise ratio β₁/β₀ ∈ [0, 1].
    pub fn params_from_ratio(n: usize, ratio: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("n must be ≥ 2, got {n}")));
        }
        if !ratio.is_finite() || !(0.0..=1.0).contains(&ratio) {
            return Err(Error::InvalidParams(format!(
                "ratio must lie in [0, 1], got {ratio}"
            )));
        }
        let beta0 = 1.0 / (1.0 + (n - 1) as f64 * ratio);
        let beta1 = ratio * beta0;
        Ok(Self {
            n,
            beta0,
            beta1,
            exact_ratio: Some(ratio),
        })
    }

    /// β₁/β₀ — the stored exact input when available.
    pub fn ratio(&self) -> f64 {
        self.exact_ratio.unwrap_or(self.beta1 / self.beta0)
    }

    pub fn from_exact_ratio(&self) -> bool {
        self.exact_ratio.is_some()
    }
}

/// ρ = (β₀−β₁)|ψ⟩⟨ψ| + (β₁/n)·1 on the two-qunit space.
pub fn family_state(p: &ChannelParams) -> CMatrix {
    let n = p.n;
    let psi = entangled_ket(n);
    let pure = psi.outer(&psi);
    pure.scale(C64::new(p.beta0 - p.beta1, 0.0))
        .add(&CMatrix::identity(n * n).scale(C64::new(p.beta1 / n as f64, 0.0)))
}

/// Eve's pure three-party preparation and her ancilla geometry.
#[derive(Debug, Clone)]
pub struct Purification {
    pub n: usize,
    pub beta0: f64,
    pub beta1: f64,
    /// n² + 1
    pub ancilla_dim: usize,
    /// Pyramid overlap c = 1 − β₁/β₀ between distinct k=l ancilla states.
    pub c: f64,
    /// Full state on qunit ⊗ qunit ⊗ ancilla, assembled in the reference bases.
    pub psi_abe: CVector,
    /// Normalized ancilla states E_kl, index k·n+l.
    e_states: Vec<CVector>,
}

impl Purification {
    pub fn idx_w(&self) -> usize {
        0
    }

    pub fn idx_f(&self, k: usize) -> usize {
        assert!(k < self.n);
        1 + k
    }

    pub fn idx_g(&self, k: usize, l: usize) -> usize {
        assert!(k != l && k < self.n && l < self.n);
        let row_skip = if l > k { l - 1 } else { l };
        1 + self.n + k * (self.n - 1) + row_skip
    }

    /// Normalized ancilla state E_kl.
    pub fn e_state(&self, k: usize, l: usize) -> &CVector {
        &self.e_states[k * self.n + l]
    }

    /// Weighted ancilla state Ẽ_kl = E_kl·√(β₀/n) (k=l) or E_kl·√(β₁/n) (k≠l).
    pub fn e_tilde(&self, k: usize, l: usize) -> CVector {
        let w = if k == l {
            (self.beta0 / self.n as f64).sqrt()
        } else {
            (self.beta1 / self.n as f64).sqrt()
        };
        self.e_state(k, l).scale(C64::new(w, 0.0))
    }

    /// All n² weighted ancilla states, index k·n+l.
    pub fn e_tilde_set(&self) -> Vec<CVector> {
        let mut out = Vec::with_capacity(self.n * self.n);
        for k in 0..self.n {
            for l in 0..self.n {
                out.push(self.e_tilde(k, l));
            }
        }
        out
    }

    /// True when β₁ = 0: the ancilla factorizes and carries no information.
    pub fn decoupled(&self) -> bool {
        self.beta1 == 0.0
    }

    /// Closed-form Gram entry ⟨Ẽ_kl|Ẽ_k'l'⟩ =
    /// (β₀−β₁)/n·δ_kl·δ_k'l' + β₁/n·δ_kk'·δ_ll'.
    pub fn gram_expected(&self, k: usize, l: usize, kp: usize, lp: usize) -> f64 {
        let n = self.n as f64;
        let mut g = 0.0;
        if k == l && kp == lp {
            g += (self.beta0 - self.beta1) / n;
        }
        if k == kp && l == lp {
            g += self.beta1 / n;
        }
        g
    }
}

/// Build the purification in the reference bases. For β₁ = 0 this is the
/// product preparation |ψ⟩⊗|w⟩ with every E_kk equal to w.
pub fn build_purification(p: &ChannelParams) -> Result<Purification> {
    let n = p.n;
    let ancilla_dim = n * n + 1;
    let c = 1.0 - p.beta1 / p.beta0;

    let mut stub = Purification {
        n,
        beta0: p.beta0,
        beta1: p.beta1,
        ancilla_dim,
        c,
        psi_abe: CVector::zeros(n * n * ancilla_dim),
        e_states: Vec::with_capacity(n * n),
    };
    for k in 0..n {
        for l in 0..n {
            let mut e = CVector::zeros(ancilla_dim);
            if k == l {
                e.set(stub.idx_w(), C64::new(c.sqrt(), 0.0));
                e.set(stub.idx_f(k), C64::new((1.0 - c).sqrt(), 0.0));
            } else {
                e.set(stub.idx_g(k, l), C64::new(1.0, 0.0));
            }
            stub.e_states.push(e);
        }
    }

    let mut psi = CVector::zeros(n * n * ancilla_dim);
    for k in 0..n {
        for l in 0..n {
            let et = stub.e_tilde(k, l);
            for a in 0..ancilla_dim {
                psi.set((k * n + l) * ancilla_dim + a, et.get(a));
            }
        }
    }
    stub.psi_abe = psi;
    Ok(stub)
}

/// Transport a weighted ancilla set between basis labels:
/// Ẽ^(to)_kl = Σ_{k'l'} Ẽ^(from)_{k'l'} · ⟨to_k|from_k'⟩ · ⟨from_l'|to_l⟩.
fn transport_set(
    set: &[CVector],
    f: &BasisFamily,
    from: usize,
    to: usize,
) -> Vec<CVector> {
    let n = f.n;
    let dim = set[0].dim();
    let mut out = Vec::with_capacity(n * n);
    for k in 0..n {
        for l in 0..n {
            let mut v = CVector::zeros(dim);
            for kp in 0..n {
                let ca = f.alice_bases[to][k].inner(&f.alice_bases[from][kp]);
                for lp in 0..n {
                    let cb = f.alice_bases[from][lp].inner(&f.alice_bases[to][l]);
                    v = v.add(&set[kp * n + lp].scale(ca * cb));
                }
            }
            out.push(v);
        }
    }
    out
}

/// The weighted ancilla states for basis `m_prime`, reached from basis `m`.
/// The map is unitary on the ancilla span, so all Gram matrices agree.
pub fn basis_change_ancilla(
    pur: &Purification,
    f: &BasisFamily,
    m: usize,
    m_prime: usize,
) -> Result<Vec<CVector>> {
    if f.n != pur.n {
        return Err(Error::DimensionMismatch(format!(
            "basis family is for n={} but purification is for n={}",
            f.n, pur.n
        )));
    }
    if m >= f.num_bases() || m_prime >= f.num_bases() {
        return Err(Error::IndexOutOfRange(format!(
            "basis labels ({m}, {m_prime}) exceed the {} bases",
            f.num_bases()
        )));
    }
    let at_m = if m == 0 {
        pur.e_tilde_set()
    } else {
        transport_set(&pur.e_tilde_set(), f, 0, m)
    };
    if m_prime == m {
        return Ok(at_m);
    }
    Ok(transport_set(&at_m, f, m, m_prime))
}

/// Eve's states conditioned on whether Alice's and Bob's values agree:
/// (ρ^(=), ρ^(≠), β₀). The unconditional ancilla state is the β₀-weighted
/// mixture of the two.
pub fn eve_conditional_states(pur: &Purification) -> (CMatrix, CMatrix, f64) {
    let n = pur.n;
    let dim = pur.ancilla_dim;
    let mut rho_eq = CMatrix::zeros(dim, dim);
    for k in 0..n {
        let e = pur.e_state(k, k);
        rho_eq = rho_eq.add(&e.outer(e));
    }
    rho_eq = rho_eq.scale(C64::new(1.0 / n as f64, 0.0));

    let mut rho_neq = CMatrix::zeros(dim, dim);
    for k in 0..n {
        for l in 0..n {
            if k != l {
                let e = pur.e_state(k, l);
                rho_neq = rho_neq.add(&e.outer(e));
            }
        }
    }
    rho_neq = rho_neq.scale(C64::new(1.0 / (n * (n - 1)) as f64, 0.0));
    (rho_eq, rho_neq, pur.beta0)
}

/// Bob's state when Alice found value `k` in basis `m`:
/// (β₀−β₁)|m̄_k⟩⟨m̄_k| + β₁·1.
pub fn reduced_bob_state(
    p: &ChannelParams,
    f: &BasisFamily,
    m: usize,
    k: usize,
) -> Result<CMatrix> {
    if f.n != p.n {
        return Err(Error::DimensionMismatch(format!(
            "basis family is for n={} but params are for n={}",
            f.n, p.n
        )));
    }
    if m >= f.num_bases() || k >= p.n {
        return Err(Error::IndexOutOfRange(format!(
            "basis {m} / outcome {k} out of range for n={}",
            p.n
        )));
    }
    let ket = &f.bob_bases[m][k];
    Ok(ket
        .outer(ket)
        .scale(C64::new(p.beta0 - p.beta1, 0.0))
        .add(&CMatrix::identity(p.n).scale(C64::new(p.beta1, 0.0))))
}
