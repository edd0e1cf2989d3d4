//! The n+1 mutually unbiased measurement bases for prime n, the conjugate
//! bases used on the second qunit, and the shared maximally entangled state.
//!
//! Basis `m = 0` is the computational reference basis. For odd prime `n`,
//! basis `m ∈ 1..=n` has vectors with components
//! `⟨j|m_k⟩ = ω^((m−1)j² + kj) / √n`, `ω = exp(2πi/n)`; for `n = 2` the
//! remaining two bases are the Hadamard and circular bases. These phase
//! conventions are fixed, so every downstream transcript is reproducible.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// The n+1 bases for the first qunit and their conjugates for the second.
#[derive(Debug, Clone)]
pub struct BasisFamily {
    pub n: usize,
    /// `alice_bases[m][k]` is the ket `|m_k⟩` in the reference basis.
    pub alice_bases: Vec<Vec<CVector>>,
    /// `bob_bases[m][k]` is the ket `|m̄_k⟩`, entrywise conjugate of `|m_k⟩`.
    pub bob_bases: Vec<Vec<CVector>>,
}

/// Conjugate a basis entrywise; this is the second-party counterpart of a
/// first-party basis when the two are expressed in the reference basis.
pub fn bob_basis_from_alice(alice_basis: &[CVector]) -> Vec<CVector> {
    alice_basis.iter().map(CVector::conjugate).collect()
}

/// Build the n+1 bases for prime `n`.
pub fn build_basis_family(n: usize) -> Result<BasisFamily> {
    if !is_prime(n) {
        return Err(Error::UnsupportedDimension {
            n,
            reason: "explicit basis construction requires a prime dimension".into(),
        });
    }
    let mut alice_bases = Vec::with_capacity(n + 1);
    alice_bases.push((0..n).map(|k| CVector::basis(n, k)).collect::<Vec<_>>());

    if n == 2 {
        let s = 1.0 / 2f64.sqrt();
        alice_bases.push(vec![
            CVector::new(vec![C64::new(s, 0.0), C64::new(s, 0.0)]),
            CVector::new(vec![C64::new(s, 0.0), C64::new(-s, 0.0)]),
        ]);
        alice_bases.push(vec![
            CVector::new(vec![C64::new(s, 0.0), C64::new(0.0, s)]),
            CVector::new(vec![C64::new(s, 0.0), C64::new(0.0, -s)]),
        ]);
    } else {
        let norm = 1.0 / (n as f64).sqrt();
        for m in 1..=n {
            let mut basis = Vec::with_capacity(n);
            for k in 0..n {
                let mut v = CVector::zeros(n);
                for j in 0..n {
                    // exponent of ω, reduced mod n to keep the angle small
                    let e = ((m - 1) * j * j + k * j) % n;
                    let angle = 2.0 * std::f64::consts::PI * e as f64 / n as f64;
                    v.set(j, C64::from_polar(norm, angle));
                }
                basis.push(v);
            }
            alice_bases.push(basis);
        }
    }

    let bob_bases = alice_bases
        .iter()
        .map(|b| bob_basis_from_alice(b))
        .collect();
    Ok(BasisFamily {
        n,
        alice_bases,
        bob_bases,
    })
}

impl BasisFamily {
    pub fn num_bases(&self) -> usize {
        self.alice_bases.len()
    }

    /// Unitary whose column `k` is `|m_k⟩`.
    pub fn basis_matrix(&self, m: usize) -> CMatrix {
        let n = self.n;
        let mut u = CMatrix::zeros(n, n);
        for k in 0..n {
            for j in 0..n {
                u.set(j, k, self.alice_bases[m][k].get(j));
            }
        }
        u
    }

    /// Projector pair `|m_k⟩⟨m_k| ⊗ |m̄'_l⟩⟨m̄'_l|` used for Born-rule cells.
    pub fn projector_pair(&self, a: usize, b: usize, k: usize, l: usize) -> CMatrix {
        let pa = self.alice_bases[a][k].outer(&self.alice_bases[a][k]);
        let pb = self.bob_bases[b][l].outer(&self.bob_bases[b][l]);
        pa.kron(&pb)
    }

    /// Product ket `|m_k⟩ ⊗ |m̄'_l⟩`.
    pub fn product_ket(&self, a: usize, b: usize, k: usize, l: usize) -> CVector {
        self.alice_bases[a][k].kron(&self.bob_bases[b][l])
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Fam {
            n: usize,
            alice_bases: Vec<Vec<Vec<[f64; 2]>>>,
            bob_bases: Vec<Vec<Vec<[f64; 2]>>>,
        }
        let dump = |bases: &Vec<Vec<CVector>>| {
            bases
                .iter()
                .map(|basis| {
                    basis
                        .iter()
                        .map(|v| v.as_slice().iter().map(|c| [c.re, c.im]).collect())
                        .collect()
                })
                .collect()
        };
        serde_json::to_value(Fam {
            n: self.n,
            alice_bases: dump(&self.alice_bases),
            bob_bases: dump(&self.bob_bases),
        })
        .expect("basis serialization cannot fail")
    }
}

/// The shared two-qunit state, maximally entangled across every basis pair.
#[derive(Debug, Clone)]
pub struct EntangledState {
    pub psi: CVector,
}

/// Assemble `(1/√n) Σ_k |m_k⟩⊗|m̄_k⟩` from basis `m` of the family.
fn psi_from_basis(f: &BasisFamily, m: usize) -> CVector {
    let n = f.n;
    let mut psi = CVector::zeros(n * n);
    for k in 0..n {
        psi = psi.add(&f.alice_bases[m][k].kron(&f.bob_bases[m][k]));
    }
    psi.scale(C64::new(1.0 / (n as f64).sqrt(), 0.0))
}

/// Build the entangled state from the reference basis and confirm the same
/// vector arises from every other basis of the family.
pub fn entangled_state(f: &BasisFamily) -> Result<EntangledState> {
    let psi = psi_from_basis(f, 0);
    for m in 1..f.num_bases() {
        let alt = psi_from_basis(f, m);
        let dev = psi
            .as_slice()
            .iter()
            .zip(alt.as_slice())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if dev > 1e-10 {
            return Err(Error::InvalidState(format!(
                "entangled state is basis-dependent: deviation {dev:.3e} at basis {m}"
            )));
        }
    }
    Ok(EntangledState { psi })
}

/// The reference-basis entangled ket `(1/√n) Σ_k |k⟩⊗|k⟩` for any `n ≥ 2`,
/// independent of any explicit basis family.
pub fn entangled_ket(n: usize) -> CVector {
    let mut psi = CVector::zeros(n * n);
    let amp = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    for k in 0..n {
        psi.set(k * n + k, amp);
    }
    psi
}
