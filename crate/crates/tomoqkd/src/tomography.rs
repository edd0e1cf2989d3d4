//! State reconstruction from the sifting by-product and the family-membership
//! acceptance test.
//!
//! The (n+1)² basis-pair projectors are tomographically complete, so the
//! relative frequencies of the discarded rounds determine the joint state by
//! linear inversion. The reconstructed state is then fitted against the
//! one-parameter isotropic family; acceptance demands every Born-rule cell of
//! the reconstruction stay within `k` standard errors of the fitted family
//! member. A channel that merely adds isotropic noise passes; anything that
//! skews the cell pattern — an intercepting measurement among them — fails.

use num_complex::Complex64 as C64;
use serde_json::json;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, lstsq_real, CMatrix, RMatrix};
use crate::mub::{entangled_ket, BasisFamily};
use crate::sim::{CountTensor, ProtocolTranscript};

/// Default acceptance width: cells must sit within this many standard errors
/// of the fitted family prediction.
pub const ACCEPTANCE_K: f64 = 5.0;

/// Absolute floor under the statistical threshold, so that exact inputs are
/// still accepted despite floating-point residue.
pub const ACCEPTANCE_FLOOR: f64 = 1e-8;

/// Per-cell relative frequencies, normalized within each basis pair, together
/// with the sample count behind each pair (`None` for analytically exact
/// probabilities).
#[derive(Debug, Clone)]
pub struct CellProbabilities {
    pub n: usize,
    pub num_bases: usize,
    probs: Vec<f64>,
    pair_counts: Vec<Option<u64>>,
}

impl CellProbabilities {
    fn idx(&self, a: usize, b: usize, k: usize, l: usize) -> usize {
        ((a * self.num_bases + b) * self.n + k) * self.n + l
    }

    pub fn get(&self, a: usize, b: usize, k: usize, l: usize) -> f64 {
        self.probs[self.idx(a, b, k, l)]
    }

    pub fn pair_count(&self, a: usize, b: usize) -> Option<u64> {
        self.pair_counts[a * self.num_bases + b]
    }

    /// Normalize raw outcome counts per basis pair. Every pair must have been
    /// sampled at least once; inversion is underdetermined otherwise.
    pub fn from_counts(counts: &CountTensor) -> Result<Self> {
        let n = counts.n;
        let num_bases = counts.num_bases;
        let mut probs = vec![0.0; num_bases * num_bases * n * n];
        let mut pair_counts = vec![None; num_bases * num_bases];
        for a in 0..num_bases {
            for b in 0..num_bases {
                let total = counts.pair_total(a, b);
                if total == 0 {
                    return Err(Error::MissingCoverage(format!(
                        "basis pair ({a},{b}) has no recorded outcomes"
                    )));
                }
                pair_counts[a * num_bases + b] = Some(total);
                for k in 0..n {
                    for l in 0..n {
                        let i = ((a * num_bases + b) * n + k) * n + l;
                        probs[i] = counts.get(a, b, k, l) as f64 / total as f64;
                    }
                }
            }
        }
        Ok(Self {
            n,
            num_bases,
            probs,
            pair_counts,
        })
    }

    /// Born-rule probabilities of `state` for every cell; sample counts are
    /// `None` to mark the probabilities as exact.
    pub fn exact_from_state(state: &CMatrix, f: &BasisFamily) -> Result<Self> {
        let n = f.n;
        let d = n * n;
        if state.rows() != d || state.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "state is {}×{} but the basis family acts on dimension {d}",
                state.rows(),
                state.cols()
            )));
        }
        let num_bases = f.num_bases();
        let mut probs = vec![0.0; num_bases * num_bases * n * n];
        for a in 0..num_bases {
            for b in 0..num_bases {
                for k in 0..n {
                    for l in 0..n {
                        let ket = f.product_ket(a, b, k, l);
                        let i = ((a * num_bases + b) * n + k) * n + l;
                        probs[i] = state.expectation(&ket);
                    }
                }
            }
        }
        Ok(Self {
            n,
            num_bases,
            probs,
            pair_counts: vec![None; num_bases * num_bases],
        })
    }
}

/// `Re Tr[a b]` for same-dimension square matrices.
fn trace_product_re(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = a.rows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += a.get(i, j) * b.get(j, i);
        }
    }
    acc.re
}

/// Orthonormal traceless Hermitian operator basis for dimension `d`:
/// symmetric and antisymmetric off-diagonal pairs followed by the diagonal
/// ladder, `d²−1` operators with `Tr[B_i B_j] = δ_ij`.
pub fn hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut ops = Vec::with_capacity(d * d - 1);
    let s = 1.0 / 2f64.sqrt();
    for i in 0..d {
        for j in (i + 1)..d {
            let mut x = CMatrix::zeros(d, d);
            x.set(i, j, C64::new(s, 0.0));
            x.set(j, i, C64::new(s, 0.0));
            ops.push(x);
            let mut y = CMatrix::zeros(d, d);
            y.set(i, j, C64::new(0.0, -s));
            y.set(j, i, C64::new(0.0, s));
            ops.push(y);
        }
    }
    for m in 1..d {
        let norm = 1.0 / ((m * (m + 1)) as f64).sqrt();
        let mut dm = CMatrix::zeros(d, d);
        for i in 0..m {
            dm.set(i, i, C64::new(norm, 0.0));
        }
        dm.set(m, m, C64::new(-(m as f64) * norm, 0.0));
        ops.push(dm);
    }
    ops
}

/// Least-squares reconstruction of the joint state from per-cell frequencies.
///
/// The state is expanded as `I/d + Σ xᵢ Bᵢ` over the traceless Hermitian
/// basis, and the Born-rule equations of all `(n+1)²·n²` cells are solved for
/// the `d²−1` coefficients. The result is Hermitian with unit trace by
/// construction, but may have slightly negative eigenvalues under sampling
/// noise; see [`TomographyResult::rho_proj`] for the physical projection.
pub fn invert_cells(cells: &CellProbabilities, f: &BasisFamily) -> Result<CMatrix> {
    if cells.n != f.n {
        return Err(Error::DimensionMismatch(format!(
            "cell table has n={} but basis family has n={}",
            cells.n, f.n
        )));
    }
    let n = f.n;
    let d = n * n;
    let num_bases = f.num_bases();
    let ops = hermitian_basis(d);
    let rows = num_bases * num_bases * n * n;
    let cols = d * d - 1;

    let mut a = RMatrix::zeros(rows, cols);
    let mut rhs = vec![0.0; rows];
    let mut row = 0;
    for ai in 0..num_bases {
        for bi in 0..num_bases {
            for k in 0..n {
                for l in 0..n {
                    let proj = f.projector_pair(ai, bi, k, l);
                    for (col, op) in ops.iter().enumerate() {
                        a.set(row, col, trace_product_re(&proj, op));
                    }
                    rhs[row] = cells.get(ai, bi, k, l) - 1.0 / d as f64;
                    row += 1;
                }
            }
        }
    }

    let sol = lstsq_real(&a, &rhs)?;
    let mut rho = CMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0));
    for (x, op) in sol.solution.iter().zip(&ops) {
        rho = rho.add(&op.scale(C64::new(*x, 0.0)));
    }
    Ok(rho)
}

/// Reconstruct the joint state from raw outcome counts.
pub fn invert_state(counts: &CountTensor, f: &BasisFamily) -> Result<CMatrix> {
    let cells = CellProbabilities::from_counts(counts)?;
    invert_cells(&cells, f)
}

/// Outcome of fitting a reconstructed state against the isotropic family.
#[derive(Debug, Clone)]
pub struct TomographyResult {
    /// Linear-inversion estimate; Hermitian, unit trace, possibly indefinite.
    pub rho_hat: CMatrix,
    /// `rho_hat` with negative eigenvalues clipped and the spectrum
    /// renormalized — the closest physical state for downstream use.
    pub rho_proj: CMatrix,
    /// Same-value probability of the best-fitting family member.
    pub beta0_hat: f64,
    /// Largest absolute cell deviation between `rho_hat` and the fit.
    pub residual: f64,
    /// Largest per-cell standard error used in the acceptance thresholds;
    /// zero when the input probabilities were exact.
    pub sigma_scale: f64,
    /// Acceptance width in standard errors that this result was judged at.
    pub threshold_k: f64,
    pub accepted: bool,
    n: usize,
    num_bases: usize,
    pair_max_dev: Vec<f64>,
}

impl TomographyResult {
    /// Largest cell deviation within one basis pair.
    pub fn pair_deviation(&self, a: usize, b: usize) -> f64 {
        self.pair_max_dev[a * self.num_bases + b]
    }

    /// Channel parameters of the fitted family member, when accepted.
    pub fn channel_params(&self) -> Option<ChannelParams> {
        if self.accepted {
            ChannelParams::new(self.n, self.beta0_hat).ok()
        } else {
            None
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut pairs = Vec::new();
        for a in 0..self.num_bases {
            for b in 0..self.num_bases {
                pairs.push(json!({
                    "alice_basis": a,
                    "bob_basis": b,
                    "max_deviation": self.pair_deviation(a, b),
                }));
            }
        }
        json!({
            "beta0_hat": self.beta0_hat,
            "residual": self.residual,
            "sigma_scale": self.sigma_scale,
            "threshold_k": self.threshold_k,
            "verdict": if self.accepted { "accept" } else { "reject" },
            "pair_deviations": pairs,
        })
    }
}

/// Clip negative eigenvalues and renormalize the spectrum to unit trace.
fn project_physical(rho: &CMatrix) -> Result<CMatrix> {
    let eig = hermitian_eigen(rho)?;
    let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidState(
            "reconstruction has no positive spectral weight".into(),
        ));
    }
    let d = rho.rows();
    let mut out = CMatrix::zeros(d, d);
    for (i, &v) in clipped.iter().enumerate() {
        if v > 0.0 {
            let col = eig.eigenvectors.column(i);
            out = out.add(&col.outer(&col).scale(C64::new(v / total, 0.0)));
        }
    }
    Ok(out)
}

/// Fit `rho_hat` against the family `a·|ψ⟩⟨ψ| + (1−a)·I/n²` and test
/// family membership at width `k`.
///
/// The family is affine in `a`, so the least-squares estimate over all cells
/// is closed-form. `sample_sizes`, indexed by `a·(n+1)+b`, supplies the
/// per-pair sample counts behind the reconstruction; each cell's acceptance
/// threshold is `max(k·σ_cell, ACCEPTANCE_FLOOR)` with
/// `σ_cell = √(p(1−p)/N_ab)` at the fitted prediction. Passing `None` marks
/// the input exact and leaves only the floor.
pub fn fit_family_with_width(
    rho_hat: &CMatrix,
    f: &BasisFamily,
    sample_sizes: Option<&[u64]>,
    k: f64,
) -> Result<TomographyResult> {
    let n = f.n;
    let d = n * n;
    let num_bases = f.num_bases();
    if rho_hat.rows() != d || rho_hat.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "state is {}×{} but the basis family acts on dimension {d}",
            rho_hat.rows(),
            rho_hat.cols()
        )));
    }
    if let Some(sizes) = sample_sizes {
        if sizes.len() != num_bases * num_bases {
            return Err(Error::DimensionMismatch(format!(
                "expected {} per-pair sample sizes, got {}",
                num_bases * num_bases,
                sizes.len()
            )));
        }
        if sizes.contains(&0) {
            return Err(Error::MissingCoverage(
                "a basis pair has zero sample size".into(),
            ));
        }
    }
    if k <= 0.0 || k.is_nan() {
        return Err(Error::InvalidParams(format!(
            "acceptance width must be positive, got {k}"
        )));
    }

    let pure = entangled_ket(n);
    let uniform = 1.0 / d as f64;

    // Cell probabilities of the reconstruction and of the pure family anchor.
    let cells = num_bases * num_bases * n * n;
    let mut p_hat = vec![0.0; cells];
    let mut p_pure = vec![0.0; cells];
    let mut i = 0;
    for a in 0..num_bases {
        for b in 0..num_bases {
            for kk in 0..n {
                for ll in 0..n {
                    let ket = f.product_ket(a, b, kk, ll);
                    p_hat[i] = rho_hat.expectation(&ket);
                    p_pure[i] = ket.inner(&pure).norm_sqr();
                    i += 1;
                }
            }
        }
    }

    // Least squares in the mixing weight: minimize Σ (p̂ − a·p_pure − (1−a)·u)².
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..cells {
        let dir = p_pure[i] - uniform;
        num += dir * (p_hat[i] - uniform);
        den += dir * dir;
    }
    let a_raw = num / den;
    let beta0_hat = ((a_raw * (n as f64 - 1.0) + 1.0) / n as f64).clamp(1.0 / n as f64, 1.0);
    let a_fit = (n as f64 * beta0_hat - 1.0) / (n as f64 - 1.0);

    let mut residual: f64 = 0.0;
    let mut sigma_scale: f64 = 0.0;
    let mut accepted = true;
    let mut pair_max_dev = vec![0.0f64; num_bases * num_bases];
    let mut i = 0;
    for a in 0..num_bases {
        for b in 0..num_bases {
            let pair = a * num_bases + b;
            for _ in 0..n * n {
                let p_fam = (a_fit * p_pure[i] + (1.0 - a_fit) * uniform).clamp(0.0, 1.0);
                let dev = (p_hat[i] - p_fam).abs();
                let sigma = match sample_sizes {
                    Some(sizes) => (p_fam * (1.0 - p_fam) / sizes[pair] as f64).sqrt(),
                    None => 0.0,
                };
                if dev > (k * sigma).max(ACCEPTANCE_FLOOR) {
                    accepted = false;
                }
                residual = residual.max(dev);
                sigma_scale = sigma_scale.max(sigma);
                pair_max_dev[pair] = pair_max_dev[pair].max(dev);
                i += 1;
            }
        }
    }

    Ok(TomographyResult {
        rho_hat: rho_hat.clone(),
        rho_proj: project_physical(rho_hat)?,
        beta0_hat,
        residual,
        sigma_scale,
        threshold_k: k,
        accepted,
        n,
        num_bases,
        pair_max_dev,
    })
}

/// [`fit_family_with_width`] at the default width [`ACCEPTANCE_K`].
pub fn fit_family(
    rho_hat: &CMatrix,
    f: &BasisFamily,
    sample_sizes: Option<&[u64]>,
) -> Result<TomographyResult> {
    fit_family_with_width(rho_hat, f, sample_sizes, ACCEPTANCE_K)
}

/// Full acceptance chain on a finished transcript: normalize the tomography
/// pool, reconstruct the joint state, fit the family, and judge every cell at
/// the default width. Requires the transcript to have sampled every basis
/// pair, which the default sacrifice fraction guarantees for long runs.
pub fn acceptance_pipeline(t: &ProtocolTranscript, f: &BasisFamily) -> Result<TomographyResult> {
    let cells = CellProbabilities::from_counts(&t.tomo_counts)?;
    let rho_hat = invert_cells(&cells, f)?;
    let num_bases = f.num_bases();
    let mut sizes = vec![0u64; num_bases * num_bases];
    for a in 0..num_bases {
        for b in 0..num_bases {
            // Coverage was checked during normalization.
            sizes[a * num_bases + b] = cells.pair_count(a, b).unwrap_or(0);
        }
    }
    fit_family(&rho_hat, f, Some(&sizes))
}
