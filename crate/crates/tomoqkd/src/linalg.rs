//! Minimal dense complex linear algebra: vectors, matrices, Kronecker
//! products, partial traces, a Hermitian eigensolver, and real least squares.
//!
//! Everything here operates on immutable values and is safe to call from any
//! number of threads. Dimensions stay small (at most a few dozen), so the
//! implementations favour clarity over cache tricks.
//!
//! Index convention, shared by every module: composite systems are laid out
//! row-major with the left tensor factor most significant, so the pair index
//! of `a ⊗ b` is `i * dim_b + j`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Maximum allowed entrywise deviation from `m = m†` before an input is
/// rejected as non-Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Maximum allowed entrywise deviation from `U†U = 1` in unitarity checks.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Dense complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    data: Vec<C64>,
}

impl CVector {
    pub fn new(data: Vec<C64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![C64::new(0.0, 0.0); dim],
        }
    }

    /// Computational basis ket `|index⟩` in `dim` dimensions.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut v = Self::zeros(dim);
        v.data[index] = C64::new(1.0, 0.0);
        v
    }

    pub fn from_real(reals: &[f64]) -> Self {
        Self {
            data: reals.iter().map(|&r| C64::new(r, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, i: usize) -> C64 {
        self.data[i]
    }

    pub fn set(&mut self, i: usize, value: C64) {
        self.data[i] = value;
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self.scale(C64::new(1.0 / n, 0.0))
    }

    /// Inner product `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &CVector) -> C64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Outer product `|self⟩⟨other|`.
    pub fn outer(&self, other: &CVector) -> CMatrix {
        let rows = self.dim();
        let cols = other.dim();
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, self.data[i] * other.data[j].conj());
            }
        }
        m
    }

    /// Kronecker product `self ⊗ other` with pair index `i * other.dim() + j`.
    pub fn kron(&self, other: &CVector) -> Self {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Self { data }
    }

    pub fn conjugate(&self) -> Self {
        Self {
            data: self.data.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            data: self.data.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &CVector) -> Self {
        assert_eq!(self.dim(), other.dim(), "vector addition dimension mismatch");
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CVector) -> Self {
        assert_eq!(self.dim(), other.dim(), "vector subtraction dimension mismatch");
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    data: Vec<C64>,
    rows: usize,
    cols: usize,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            data: vec![C64::new(0.0, 0.0); rows * cols],
            rows,
            cols,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows × cols");
        Self { data, rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> CVector {
        CVector::new((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    pub fn trace(&self) -> C64 {
        assert_eq!(self.rows, self.cols, "trace requires a square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).conj());
            }
        }
        m
    }

    pub fn mul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = m.get(i, j) + a * other.get(k, j);
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        let mut out = CVector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.get(i, j) * v.get(j);
            }
            out.set(i, acc);
        }
        out
    }

    /// Kronecker product `self ⊗ other` in standard block layout.
    pub fn kron(&self, other: &CMatrix) -> Self {
        let mut m = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        m
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            data: self.data.iter().map(|c| c * factor).collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn add(&self, other: &CMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn sub(&self, other: &CMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `self = self†`.
    pub fn hermiticity_deviation(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian_within(&self, tol: f64) -> bool {
        self.rows == self.cols && self.hermiticity_deviation() <= tol
    }

    /// Born-rule expectation `⟨v|self|v⟩` (real part).
    pub fn expectation(&self, v: &CVector) -> f64 {
        v.inner(&self.mul_vec(v)).re
    }
}

/// Trace over the factors of a composite space not listed in `keep`.
///
/// `dims` gives the factor dimensions in the shared index convention; the
/// result keeps the listed factors in their original order. The total trace
/// is preserved exactly.
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let total: usize = dims.iter().product();
    if m.rows() != total || m.cols() != total {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}×{} but the factor dimensions multiply to {}",
            m.rows(),
            m.cols(),
            total
        )));
    }
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::IndexOutOfRange(format!(
            "keep set {:?} exceeds the {} factors",
            keep,
            dims.len()
        )));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();

    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep_sorted.contains(i)).collect();
    let kept_dim: usize = keep_sorted.iter().map(|&i| dims[i]).product();
    let traced_dim: usize = traced.iter().map(|&i| dims[i]).product();

    // Strides of each factor in the full row-major index.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }

    let decompose = |mut idx: usize, factors: &[usize]| -> usize {
        // Maps a flat index over `factors` to a flat full-space offset.
        let mut offset = 0;
        for &f in factors.iter().rev() {
            offset += (idx % dims[f]) * strides[f];
            idx /= dims[f];
        }
        offset
    };

    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    for ki in 0..kept_dim {
        let row_keep = decompose(ki, &keep_sorted);
        for kj in 0..kept_dim {
            let col_keep = decompose(kj, &keep_sorted);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..traced_dim {
                let off = decompose(t, &traced);
                acc += m.get(row_keep + off, col_keep + off);
            }
            out.set(ki, kj, acc);
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose column `i` is the eigenvector of `eigenvalues[i]`.
    pub eigenvectors: CMatrix,
}

/// Diagonalize a Hermitian matrix with cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order together with the unitary of
/// eigenvectors, so that `m V = V diag(λ)`. Inputs further than
/// [`HERMITICITY_TOL`] from Hermitian are rejected.
pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    if m.rows() != m.cols() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition requires a square matrix, got {}×{}",
            m.rows(),
            m.cols()
        )));
    }
    let deviation = m.hermiticity_deviation();
    if deviation > HERMITICITY_TOL {
        return Err(Error::NotHermitian {
            deviation,
            tolerance: HERMITICITY_TOL,
        });
    }
    let n = m.rows();
    // Work on the Hermitian average to keep rotations exactly symmetric.
    let mut a = m.add(&m.adjoint()).scale(C64::new(0.5, 0.0));
    let mut v = CMatrix::identity(n);
    if n > 1 {
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        let eps = 1e-14 * scale;
        for _sweep in 0..100 {
            let mut off_max: f64 = 0.0;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    off_max = off_max.max(a.get(p, q).norm());
                }
            }
            if off_max <= eps {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    let b = a.get(p, q);
                    let babs = b.norm();
                    if babs <= eps * 1e-2 {
                        continue;
                    }
                    let phi = b.arg();
                    let tau = (a.get(q, q).re - a.get(p, p).re) / (2.0 * babs);
                    // Smaller-magnitude root of t² - 2τt - 1 = 0.
                    let t = -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = C64::from_polar(t * c, -phi);

                    // a ← U† a U with U the identity outside the (p,q) block,
                    // U_pp = U_qq = c, U_qp = s, U_pq = -s̄.
                    for i in 0..n {
                        let aip = a.get(i, p);
                        let aiq = a.get(i, q);
                        a.set(i, p, aip.scale(c) + s * aiq);
                        a.set(i, q, aiq.scale(c) - s.conj() * aip);
                    }
                    for i in 0..n {
                        let api = a.get(p, i);
                        let aqi = a.get(q, i);
                        a.set(p, i, api.scale(c) + s.conj() * aqi);
                        a.set(q, i, aqi.scale(c) - s * api);
                    }
                    a.set(p, q, C64::new(0.0, 0.0));
                    a.set(q, p, C64::new(0.0, 0.0));
                    for i in 0..n {
                        let vip = v.get(i, p);
                        let viq = v.get(i, q);
                        v.set(i, p, vip.scale(c) + s * viq);
                        v.set(i, q, viq.scale(c) - s.conj() * vip);
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).re.total_cmp(&a.get(i, i).re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors.set(i, new_col, v.get(i, old_col));
        }
    }
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// Dense real matrix, row-major. Used only by the least-squares solver.
#[derive(Debug, Clone)]
pub struct RMatrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl RMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            data: vec![0.0; rows * cols],
            rows,
            cols,
        }
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows × cols");
        Self { data, rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }
}

/// Least-squares solution together with its residual norm `‖ax - b‖₂`.
#[derive(Debug, Clone)]
pub struct Lstsq {
    pub solution: Vec<f64>,
    pub residual: f64,
}

/// Minimize `‖ax - b‖₂` by Householder QR for a tall full-column-rank system.
pub fn lstsq_real(a: &RMatrix, b: &[f64]) -> Result<Lstsq> {
    let (m, k) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "rhs has {} entries but the matrix has {} rows",
            b.len(),
            m
        )));
    }
    if m < k {
        return Err(Error::DimensionMismatch(format!(
            "system is underdetermined: {m} rows < {k} columns"
        )));
    }
    let mut r = a.clone();
    let mut rhs = b.to_vec();

    // Householder triangularization applied to the matrix and rhs together.
    for col in 0..k {
        let mut norm2 = 0.0;
        for i in col..m {
            norm2 += r.get(i, col) * r.get(i, col);
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            return Err(Error::RankDeficient {
                cond_estimate: f64::INFINITY,
            });
        }
        let alpha = if r.get(col, col) >= 0.0 { -norm } else { norm };
        let mut v = vec![0.0; m - col];
        v[0] = r.get(col, col) - alpha;
        for i in col + 1..m {
            v[i - col] = r.get(i, col);
        }
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for j in col..k {
                let mut dot = 0.0;
                for i in col..m {
                    dot += v[i - col] * r.get(i, j);
                }
                let f = 2.0 * dot / vnorm2;
                for i in col..m {
                    r.set(i, j, r.get(i, j) - f * v[i - col]);
                }
            }
            let mut dot = 0.0;
            for i in col..m {
                dot += v[i - col] * rhs[i];
            }
            let f = 2.0 * dot / vnorm2;
            for i in col..m {
                rhs[i] -= f * v[i - col];
            }
        }
        r.set(col, col, alpha);
        for i in col + 1..m {
            r.set(i, col, 0.0);
        }
    }

    let diag_max = (0..k).map(|i| r.get(i, i).abs()).fold(0.0, f64::max);
    let diag_min = (0..k).map(|i| r.get(i, i).abs()).fold(f64::INFINITY, f64::min);
    if diag_min <= 1e-12 * diag_max {
        return Err(Error::RankDeficient {
            cond_estimate: diag_max / diag_min.max(f64::MIN_POSITIVE),
        });
    }

    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = rhs[i];
        for j in i + 1..k {
            acc -= r.get(i, j) * x[j];
        }
        x[i] = acc / r.get(i, i);
    }
    let residual = rhs[k..].iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(Lstsq {
        solution: x,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_basis_vectors() {
        // e0 (dim 2) ⊗ e1 (dim 2) = e1 (dim 4)
        let v = CVector::basis(2, 0).kron(&CVector::basis(2, 1));
        assert_eq!(v, CVector::basis(4, 1));
    }

    #[test]
    fn kron_identities() {
        let i6 = CMatrix::identity(2).kron(&CMatrix::identity(3));
        assert_eq!(i6, CMatrix::identity(6));
    }

    #[test]
    fn kron_superposition() {
        let plus = CVector::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).scale(c(1.0 / 2f64.sqrt(), 0.0));
        let v = plus.kron(&CVector::basis(2, 0));
        let expect = CVector::new(vec![
            c(1.0 / 2f64.sqrt(), 0.0),
            c(0.0, 0.0),
            c(1.0 / 2f64.sqrt(), 0.0),
            c(0.0, 0.0),
        ]);
        for i in 0..4 {
            assert!((v.get(i) - expect.get(i)).norm() < 1e-15);
        }
    }

    #[test]
    fn kron_associativity() {
        let mut rng = StdRng::seed_from_u64(11);
        let mut rand_vec = |d: usize| {
            CVector::new(
                (0..d)
                    .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                    .collect(),
            )
        };
        let (a, b, cc) = (rand_vec(2), rand_vec(3), rand_vec(4));
        let left = a.kron(&b).kron(&cc);
        let right = a.kron(&b.kron(&cc));
        for i in 0..left.dim() {
            assert!((left.get(i) - right.get(i)).norm() < 1e-14);
        }
    }

    fn random_hermitian(rng: &mut StdRng, dim: usize) -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
            }
        }
        m.add(&m.adjoint()).scale(c(0.5, 0.0))
    }

    #[test]
    fn partial_trace_product_state() {
        let mut rng = StdRng::seed_from_u64(3);
        let a = random_hermitian(&mut rng, 3);
        let b = random_hermitian(&mut rng, 4);
        let joint = a.kron(&b);
        let out = partial_trace(&joint, &[3, 4], &[0]).unwrap();
        let expect = a.scale(b.trace());
        assert!(out.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn partial_trace_bell_state() {
        // Maximally entangled qubit pair reduces to I/2.
        let psi = CVector::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .scale(c(1.0 / 2f64.sqrt(), 0.0));
        let rho = psi.outer(&psi);
        let red = partial_trace(&rho, &[2, 2], &[0]).unwrap();
        assert!(red.max_abs_diff(&CMatrix::identity(2).scale(c(0.5, 0.0))) < 1e-14);
    }

    #[test]
    fn partial_trace_preserves_trace() {
        let mut rng = StdRng::seed_from_u64(7);
        for dims in [vec![3usize, 3, 10], vec![2, 2], vec![2, 3, 4]] {
            let total: usize = dims.iter().product();
            let m = random_hermitian(&mut rng, total);
            for keep in [vec![0usize], vec![dims.len() - 1], (0..dims.len()).collect()] {
                let red = partial_trace(&m, &dims, &keep).unwrap();
                assert!((red.trace() - m.trace()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn partial_trace_dimension_error() {
        let m = CMatrix::identity(5);
        assert!(matches!(
            partial_trace(&m, &[2, 3], &[0]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn eigen_diagonal() {
        let mut m = CMatrix::zeros(3, 3);
        m.set(0, 0, c(3.0, 0.0));
        m.set(1, 1, c(1.0, 0.0));
        m.set(2, 2, c(2.0, 0.0));
        let e = hermitian_eigen(&m).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn eigen_pauli_x() {
        let mut m = CMatrix::zeros(2, 2);
        m.set(0, 1, c(1.0, 0.0));
        m.set(1, 0, c(1.0, 0.0));
        let e = hermitian_eigen(&m).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_random_residual_and_unitarity() {
        let mut rng = StdRng::seed_from_u64(42);
        for dim in [2usize, 5, 9, 16, 32] {
            let m = random_hermitian(&mut rng, dim);
            let e = hermitian_eigen(&m).unwrap();

            // Σλ = tr(m)
            let lam_sum: f64 = e.eigenvalues.iter().sum();
            assert!((lam_sum - m.trace().re).abs() < 1e-10);

            // residual ‖mV - V diag(λ)‖_max
            let mv = m.mul(&e.eigenvectors);
            let mut vl = e.eigenvectors.clone();
            for j in 0..dim {
                for i in 0..dim {
                    vl.set(i, j, vl.get(i, j).scale(e.eigenvalues[j]));
                }
            }
            assert!(mv.max_abs_diff(&vl) < 1e-9, "residual too large at dim {dim}");

            // eigenvector unitarity
            let vhv = e.eigenvectors.adjoint().mul(&e.eigenvectors);
            assert!(vhv.max_abs_diff(&CMatrix::identity(dim)) < 1e-9);
        }
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m.set(0, 1, c(1.0, 0.0));
        assert!(matches!(
            hermitian_eigen(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn lstsq_identity_and_consistent() {
        let mut a = RMatrix::zeros(3, 3);
        for i in 0..3 {
            a.set(i, i, 1.0);
        }
        let b = [1.0, -2.0, 3.0];
        let out = lstsq_real(&a, &b).unwrap();
        for i in 0..3 {
            assert!((out.solution[i] - b[i]).abs() < 1e-14);
        }
        assert!(out.residual < 1e-14);

        // Overdetermined but consistent: duplicate every row.
        let mut a2 = RMatrix::zeros(6, 3);
        let mut b2 = vec![0.0; 6];
        for i in 0..3 {
            a2.set(i, i, 1.0);
            a2.set(i + 3, i, 1.0);
            b2[i] = b[i];
            b2[i + 3] = b[i];
        }
        let out2 = lstsq_real(&a2, &b2).unwrap();
        for i in 0..3 {
            assert!((out2.solution[i] - b[i]).abs() < 1e-14);
        }
        assert!(out2.residual < 1e-13);
    }

    #[test]
    fn lstsq_matches_normal_equations_oracle() {
        // Independent oracle: solve AᵀA x = Aᵀb by Gaussian elimination.
        let mut rng = StdRng::seed_from_u64(19);
        let (m, k) = (20usize, 10usize);
        let mut a = RMatrix::zeros(m, k);
        let mut b = vec![0.0; m];
        for i in 0..m {
            for j in 0..k {
                a.set(i, j, rng.random::<f64>() - 0.5);
            }
            b[i] = rng.random::<f64>() - 0.5;
        }

        let mut ata = vec![vec![0.0; k + 1]; k];
        for i in 0..k {
            for j in 0..k {
                let mut acc = 0.0;
                for r in 0..m {
                    acc += a.get(r, i) * a.get(r, j);
                }
                ata[i][j] = acc;
            }
            let mut acc = 0.0;
            for r in 0..m {
                acc += a.get(r, i) * b[r];
            }
            ata[i][k] = acc;
        }
        for col in 0..k {
            let pivot = (col..k).max_by(|&x, &y| ata[x][col].abs().total_cmp(&ata[y][col].abs())).unwrap();
            ata.swap(col, pivot);
            for row in col + 1..k {
                let f = ata[row][col] / ata[col][col];
                for j in col..=k {
                    ata[row][j] -= f * ata[col][j];
                }
            }
        }
        let mut oracle = vec![0.0; k];
        for i in (0..k).rev() {
            let mut acc = ata[i][k];
            for j in i + 1..k {
                acc -= ata[i][j] * oracle[j];
            }
            oracle[i] = acc / ata[i][i];
        }

        let out = lstsq_real(&a, &b).unwrap();
        for i in 0..k {
            assert!(
                (out.solution[i] - oracle[i]).abs() < 1e-8,
                "QR and normal equations disagree at {i}"
            );
        }
    }

    #[test]
    fn lstsq_rank_deficient() {
        let mut a = RMatrix::zeros(4, 2);
        for i in 0..4 {
            a.set(i, 0, 1.0);
            a.set(i, 1, 2.0); // second column is a multiple of the first
        }
        assert!(matches!(
            lstsq_real(&a, &[1.0, 2.0, 3.0, 4.0]),
            Err(Error::RankDeficient { .. })
        ));
    }
}
