//! Dense complex linear algebra for quantum states.
//!
//! Everything downstream (channels, information measures, the capacity
//! solver, the coding simulators) is built on the primitives in this module:
//! Hermitian eigendecomposition, Kronecker products, partial trace, von
//! Neumann entropy (base-2), trace norm and canonical purification.
//!
//! All logarithms are base two: entropies are reported in bits.

use crate::error::{Error, Result};
use num_complex::Complex;

/// Complex scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// Entrywise Hermiticity tolerance for density matrices.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue of a density matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Trace deviation tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues at or below this threshold contribute 0·log 0 := 0 to entropies.
pub const ENTROPY_ZERO_TOL: f64 = 1e-12;

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Build from a row-major entry vector. Length must be `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
                context: "row-major entry vector",
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Real diagonal matrix.
    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Rank-one |v⟩⟨w|.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        let mut m = Self::zeros(v.len(), w.len());
        for i in 0..v.len() {
            for j in 0..w.len() {
                m[(i, j)] = v[i] * w[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, s: C64) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Largest entrywise absolute value.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermiticity_defect() <= tol
    }

    /// Replace by (M + M†)/2. Removes the ~1e-16 representation noise of
    /// products that are Hermitian in exact arithmetic.
    pub fn symmetrize(&mut self) {
        assert!(self.is_square());
        for i in 0..self.rows {
            for j in i..self.cols {
                let avg = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                self[(i, j)] = avg;
                self[(j, i)] = avg.conj();
            }
        }
    }

    /// Kronecker product self ⊗ other.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }
}

/// Kronecker product A ⊗ B.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Kronecker product of state vectors.
pub fn tensor_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition
// ---------------------------------------------------------------------------

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues sorted in descending order and a unitary whose columns
/// are the matching eigenvectors, so that `H = U diag(λ) U†`.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !h.is_square() {
        return Err(Error::NotSquare(h.rows, h.cols));
    }
    let defect = h.hermiticity_defect();
    if defect > 1e-10 {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.rows;
    let mut na = nalgebra::DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            // Feed an exactly Hermitian matrix to the decomposition.
            na[(i, j)] = if i <= j {
                (h[(i, j)] + h[(j, i)].conj()) * 0.5
            } else {
                na[(j, i)].conj()
            };
        }
    }
    let eig = nalgebra::SymmetricEigen::new(na);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = eig.eigenvectors[(row, src)];
        }
    }
    Ok((values, vectors))
}

/// Sum of singular values. For Hermitian input this is Σ|λᵢ|.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows, m.cols));
    }
    if m.is_hermitian(1e-10) {
        let (vals, _) = hermitian_eig(m)?;
        return Ok(vals.iter().map(|v| v.abs()).sum());
    }
    // General case: singular values are the square roots of eig(M†M).
    let gram = m.dagger().mul(m);
    let (vals, _) = hermitian_eig(&gram)?;
    Ok(vals.iter().map(|v| v.max(0.0).sqrt()).sum())
}

/// Entropy in bits of a nonnegative spectrum.
///
/// Eigenvalues in [-PSD_TOL, ENTROPY_ZERO_TOL] contribute zero; anything more
/// negative is rejected rather than silently clamped.
pub fn entropy_of_spectrum(eigs: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigs {
        if l < -PSD_TOL {
            return Err(Error::NotPsd(l));
        }
        if l > ENTROPY_ZERO_TOL {
            s -= l * l.log2();
        }
    }
    Ok(s)
}

// ---------------------------------------------------------------------------
// Quantum state types
// ---------------------------------------------------------------------------

/// Hermitian, positive semi-definite, unit-trace complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validate and wrap a matrix as a quantum state.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::validate(&mat)?;
        Ok(Self {
            dim: mat.rows(),
            mat,
        })
    }

    /// The shared density-matrix validator: Hermitian within 1e-12 entrywise,
    /// smallest eigenvalue ≥ -1e-10, trace within 1e-10 of one.
    pub fn validate(mat: &ComplexMatrix) -> Result<()> {
        if !mat.is_square() {
            return Err(Error::NotSquare(mat.rows(), mat.cols()));
        }
        let defect = mat.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let (vals, _) = hermitian_eig(mat)?;
        let min = vals.last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(())
    }

    /// Wrap without validating. Restricted to call sites where the invariants
    /// hold by construction.
    pub(crate) fn from_parts_unchecked(mat: ComplexMatrix) -> Self {
        Self {
            dim: mat.rows(),
            mat,
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_parts_unchecked(ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0)))
    }

    /// Pure basis state |i⟩⟨i|.
    pub fn basis_state(dim: usize, i: usize) -> Self {
        let mut m = ComplexMatrix::zeros(dim, dim);
        m[(i, i)] = C64::new(1.0, 0.0);
        Self::from_parts_unchecked(m)
    }

    /// Diagonal state from a probability vector.
    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        validate_probability(p, 1e-10)?;
        Ok(Self::from_parts_unchecked(ComplexMatrix::from_diag(p)))
    }

    pub fn from_pure(psi: &PureStateVector) -> Self {
        Self::from_parts_unchecked(ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Eigenvalues (descending) and eigenbasis.
    pub fn eig(&self) -> (Vec<f64>, ComplexMatrix) {
        hermitian_eig(&self.mat).expect("density matrix is Hermitian by construction")
    }
}

/// Unit-norm complex vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureStateVector {
    dim: usize,
    amps: Vec<C64>,
}

impl PureStateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            dim: amps.len(),
            amps,
        })
    }

    /// Normalize and wrap. Fails only on the zero vector.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-14 {
            return Err(Error::NotNormalized(norm));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self {
            dim: amps.len(),
            amps,
        })
    }

    pub fn basis_state(dim: usize, i: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[i] = C64::new(1.0, 0.0);
        Self { dim, amps }
    }

    /// Maximally entangled state (1/√d) Σᵢ |i⟩|i⟩ on d ⊗ d.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); d * d];
        let c = 1.0 / (d as f64).sqrt();
        for i in 0..d {
            amps[i * d + i] = C64::new(c, 0.0);
        }
        Self { dim: d * d, amps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            dim: self.dim * other.dim,
            amps: tensor_vec(&self.amps, &other.amps),
        }
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amps, &self.amps)
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Von Neumann entropy S(ρ) = -tr(ρ log₂ ρ) in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    let (vals, _) = rho.eig();
    entropy_of_spectrum(&vals).expect("density matrix spectrum is admissible")
}

/// Partial trace over the factors *not* listed in `keep`.
///
/// `dims` are the tensor factor dimensions from left to right; their product
/// must equal the dimension of `rho`. `keep` lists factor indices to retain,
/// in increasing order. An empty `keep` yields the scalar 1 as a 1x1 state.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let mat = partial_trace_matrix(rho.matrix(), dims, keep)?;
    Ok(DensityMatrix::from_parts_unchecked(mat))
}

/// Partial trace on a raw matrix (no state validation).
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if m.rows() != total || m.cols() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            got: m.rows(),
            context: "partial trace factor dimensions",
        });
    }
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidParameter(
            "keep indices must be strictly increasing and in range".into(),
        ));
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let kept_total: usize = kept_dims.iter().product::<usize>().max(1);
    let traced_total: usize = traced_dims.iter().product::<usize>().max(1);

    // Strides of each factor in the composite index.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let index_of = |digits_kept: usize, digits_traced: usize| -> usize {
        let mut idx = 0;
        let mut rk = digits_kept;
        for (pos, &k) in keep.iter().enumerate().rev() {
            let d = kept_dims[pos];
            idx += (rk % d) * strides[k];
            rk /= d;
        }
        let mut rt = digits_traced;
        for (pos, &t) in traced.iter().enumerate().rev() {
            let d = traced_dims[pos];
            idx += (rt % d) * strides[t];
            rt /= d;
        }
        idx
    };

    let mut out = ComplexMatrix::zeros(kept_total, kept_total);
    for a in 0..kept_total {
        for b in 0..kept_total {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..traced_total {
                acc += m.data()[index_of(a, t) * m.cols() + index_of(b, t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Partial transpose on the factor `which` of a bipartite-or-more operator.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dims: &[usize],
    which: usize,
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if m.rows() != total || m.cols() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            got: m.rows(),
            context: "partial transpose factor dimensions",
        });
    }
    if which >= dims.len() {
        return Err(Error::InvalidParameter("factor index out of range".into()));
    }
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let d = dims[which];
    let s = strides[which];
    let mut out = m.clone();
    // Swap the `which` digit between row and column index.
    for row in 0..total {
        let ri = (row / s) % d;
        for col in 0..total {
            let ci = (col / s) % d;
            if ri == ci {
                continue;
            }
            let row2 = (row as isize + (ci as isize - ri as isize) * s as isize) as usize;
            let col2 = (col as isize + (ri as isize - ci as isize) * s as isize) as usize;
            out[(row, col)] = m[(row2, col2)];
        }
    }
    Ok(out)
}

/// Canonical purification ψ = Σᵢ √αᵢ γᵢ ⊗ γᵢ built on the eigenbasis of ρ,
/// living on dim² with ρ recovered as the marginal of the first factor.
pub fn purify(rho: &DensityMatrix) -> PureStateVector {
    let d = rho.dim();
    let (vals, vecs) = rho.eig();
    let mut amps = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        let w = vals[i].max(0.0).sqrt();
        if w == 0.0 {
            continue;
        }
        for a in 0..d {
            let ga = vecs[(a, i)];
            if ga.norm_sqr() == 0.0 {
                continue;
            }
            for b in 0..d {
                amps[a * d + b] += ga * vecs[(b, i)] * w;
            }
        }
    }
    PureStateVector::normalized(amps).expect("purification of a unit-trace state is normalizable")
}

/// Reorder tensor factors of a state vector: new factor `j` is old factor
/// `perm[j]`. `dims` are the dimensions of the *old* factor layout.
pub fn permute_tensor_factors(amps: &[C64], dims: &[usize], perm: &[usize]) -> Vec<C64> {
    let total: usize = dims.iter().product();
    assert_eq!(amps.len(), total);
    assert_eq!(perm.len(), dims.len());
    let mut old_strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        old_strides[i] = old_strides[i + 1] * dims[i + 1];
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut out = vec![C64::new(0.0, 0.0); total];
    for (new_idx, slot) in out.iter_mut().enumerate() {
        let mut rem = new_idx;
        let mut old_idx = 0;
        for j in (0..new_dims.len()).rev() {
            let digit = rem % new_dims[j];
            rem /= new_dims[j];
            old_idx += digit * old_strides[perm[j]];
        }
        *slot = amps[old_idx];
    }
    out
}

/// Validate a probability vector: entries ≥ -tol, sum within tol of 1.
pub fn validate_probability(p: &[f64], tol: f64) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidProbability("empty vector".into()));
    }
    if let Some(&bad) = p.iter().find(|&&x| x < -tol || !x.is_finite()) {
        return Err(Error::InvalidProbability(format!("entry {bad}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::InvalidProbability(format!("sum {sum}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{random_density_matrix, random_pure_state, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let (vals, _) = hermitian_eig(&ComplexMatrix::identity(2)).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);

        let (vals, vecs) = hermitian_eig(&ComplexMatrix::from_diag(&[0.7, 0.3])).unwrap();
        assert!((vals[0] - 0.7).abs() < 1e-12);
        assert!((vals[1] - 0.3).abs() < 1e-12);
        // Eigenvectors are the standard basis up to phase.
        assert!((vecs[(0, 0)].norm() - 1.0).abs() < 1e-10);
        assert!((vecs[(1, 1)].norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = 4;
            let mut h = ComplexMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    h[(i, j)] = c(
                        rand::Rng::gen_range(&mut rng, -1.0..1.0),
                        rand::Rng::gen_range(&mut rng, -1.0..1.0),
                    );
                }
            }
            h.symmetrize();
            let (vals, vecs) = hermitian_eig(&h).unwrap();
            assert!(vals.windows(2).all(|w| w[0] >= w[1] - 1e-12), "descending");
            let rebuilt = vecs
                .mul(&ComplexMatrix::from_diag(&vals))
                .mul(&vecs.dagger());
            assert!(rebuilt.sub(&h).max_abs() <= 1e-9);
            // U unitary
            let gram = vecs.dagger().mul(&vecs);
            assert!(gram.sub(&ComplexMatrix::identity(n)).max_abs() <= 1e-9);
        }
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eig(&rect), Err(Error::NotSquare(2, 3))));
    }

    #[test]
    fn entropy_cases() {
        assert_eq!(von_neumann_entropy(&DensityMatrix::basis_state(2, 0)), 0.0);
        let mm5 = DensityMatrix::maximally_mixed(5);
        assert!((von_neumann_entropy(&mm5) - 5.0f64.log2()).abs() < 1e-12);
        let half = DensityMatrix::from_probabilities(&[0.5, 0.5, 0.0]).unwrap();
        assert!((von_neumann_entropy(&half) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_rejects_negative_spectrum() {
        assert!(matches!(
            entropy_of_spectrum(&[1.0, -1e-6]),
            Err(Error::NotPsd(_))
        ));
        // Mild negativity inside tolerance is treated as zero.
        assert_eq!(entropy_of_spectrum(&[1.0, -1e-11]).unwrap(), 0.0);
    }

    #[test]
    fn tensor_cases() {
        let b = ComplexMatrix::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, 1.0));
        let one = ComplexMatrix::identity(1);
        assert_eq!(tensor(&one, &b), b);
        assert_eq!(
            tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3)),
            ComplexMatrix::identity(6)
        );
    }

    #[test]
    fn tensor_mixed_product_property() {
        // (A⊗B)(C⊗D) = AC ⊗ BD on random 2x2 pairs.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let mut rand_mat = || {
                ComplexMatrix::from_fn(2, 2, |_, _| {
                    c(
                        rand::Rng::gen_range(&mut rng, -1.0..1.0),
                        rand::Rng::gen_range(&mut rng, -1.0..1.0),
                    )
                })
            };
            let (a, b, cc, d) = (rand_mat(), rand_mat(), rand_mat(), rand_mat());
            let lhs = tensor(&a, &b).mul(&tensor(&cc, &d));
            let rhs = tensor(&a.mul(&cc), &b.mul(&d));
            assert!(lhs.sub(&rhs).max_abs() <= 1e-10);
        }
    }

    #[test]
    fn partial_trace_product_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_density_matrix(2, &mut rng);
        let sigma = random_density_matrix(3, &mut rng);
        let joint = DensityMatrix::new(tensor(rho.matrix(), sigma.matrix())).unwrap();
        let back = partial_trace(&joint, &[2, 3], &[0]).unwrap();
        assert!(back.matrix().sub(rho.matrix()).max_abs() <= 1e-12);
        let back2 = partial_trace(&joint, &[2, 3], &[1]).unwrap();
        assert!(back2.matrix().sub(sigma.matrix()).max_abs() <= 1e-12);
    }

    #[test]
    fn partial_trace_maximally_entangled() {
        let bell = PureStateVector::maximally_entangled(2);
        let rho = DensityMatrix::from_pure(&bell);
        for keep in [0usize, 1] {
            let marg = partial_trace(&rho, &[2, 2], &[keep]).unwrap();
            assert!(
                marg.matrix()
                    .sub(DensityMatrix::maximally_mixed(2).matrix())
                    .max_abs()
                    <= 1e-12
            );
        }
    }

    #[test]
    fn partial_trace_preserves_trace_and_scalar_case() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_density_matrix(6, &mut rng);
        let kept = partial_trace(&rho, &[2, 3], &[1]).unwrap();
        assert!((kept.matrix().trace().re - 1.0).abs() <= 1e-12);
        let scalar = partial_trace(&rho, &[2, 3], &[]).unwrap();
        assert_eq!(scalar.dim(), 1);
        assert!((scalar.matrix()[(0, 0)].re - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let rho = DensityMatrix::maximally_mixed(6);
        assert!(partial_trace(&rho, &[2, 2], &[0]).is_err());
    }

    #[test]
    fn purify_cases() {
        // Pure input: |0⟩⟨0| → |00⟩.
        let psi = purify(&DensityMatrix::basis_state(2, 0));
        assert!((psi.amplitudes()[0].norm() - 1.0).abs() < 1e-12);

        // Maximally mixed qubit → maximally entangled pair up to basis phase.
        let psi = purify(&DensityMatrix::maximally_mixed(2));
        let rho = DensityMatrix::from_pure(&psi);
        let marg = partial_trace(&rho, &[2, 2], &[0]).unwrap();
        assert!(
            marg.matrix()
                .sub(DensityMatrix::maximally_mixed(2).matrix())
                .max_abs()
                <= 1e-12
        );

        // Random qutrit: marginal recovery within 1e-10.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let rho = random_density_matrix(3, &mut rng);
            let psi = purify(&rho);
            let joint = DensityMatrix::from_pure(&psi);
            let marg = partial_trace(&joint, &[3, 3], &[0]).unwrap();
            assert!(marg.matrix().sub(rho.matrix()).max_abs() <= 1e-10);
        }
    }

    #[test]
    fn trace_norm_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let rho = random_density_matrix(4, &mut rng);
        assert!((trace_norm(rho.matrix()).unwrap() - 1.0).abs() <= 1e-10);
        assert!((trace_norm(&ComplexMatrix::from_diag(&[1.0, -1.0])).unwrap() - 2.0).abs() < 1e-12);
        assert!(trace_norm(&ComplexMatrix::zeros(2, 3)).is_err());

        // ρ - σ matches the eigenvalue-sum oracle.
        let sigma = random_density_matrix(2, &mut rng);
        let tau = random_density_matrix(2, &mut rng);
        let diff = sigma.matrix().sub(tau.matrix());
        let (vals, _) = hermitian_eig(&diff).unwrap();
        let oracle: f64 = vals.iter().map(|v| v.abs()).sum();
        assert!((trace_norm(&diff).unwrap() - oracle).abs() <= 1e-10);
    }

    #[test]
    fn trace_norm_unitary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..5 {
            let m = random_density_matrix(3, &mut rng).into_matrix();
            let u = random_unitary(3, &mut rng);
            let v = random_unitary(3, &mut rng);
            let rotated = u.mul(&m).mul(&v);
            assert!((trace_norm(&rotated).unwrap() - trace_norm(&m).unwrap()).abs() <= 1e-9);
        }
    }

    #[test]
    fn entropy_additive_on_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..5 {
            let a = random_density_matrix(2, &mut rng);
            let b = random_density_matrix(3, &mut rng);
            let joint = DensityMatrix::new(tensor(a.matrix(), b.matrix())).unwrap();
            let lhs = von_neumann_entropy(&joint);
            let rhs = von_neumann_entropy(&a) + von_neumann_entropy(&b);
            assert!((lhs - rhs).abs() <= 1e-9);
        }
    }

    #[test]
    fn purify_then_trace_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for dim in [2usize, 3, 4] {
            let rho = random_density_matrix(dim, &mut rng);
            let joint = DensityMatrix::from_pure(&purify(&rho));
            let back = partial_trace(&joint, &[dim, dim], &[0]).unwrap();
            assert!(back.matrix().sub(rho.matrix()).max_abs() <= 1e-10);
        }
    }

    #[test]
    fn density_matrix_validation_rejects_bad_inputs() {
        // Not unit trace.
        let m = ComplexMatrix::from_diag(&[0.9, 0.3]);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidTrace(_))));
        // Not PSD.
        let m = ComplexMatrix::from_diag(&[1.5, -0.5]);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotPsd(_))));
        // Not Hermitian.
        let mut m = ComplexMatrix::from_diag(&[0.5, 0.5]);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(
            DensityMatrix::new(m),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn permute_tensor_factors_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let psi = random_pure_state(2, &mut rng);
        let phi = random_pure_state(3, &mut rng);
        let chi = random_pure_state(2, &mut rng);
        let joint = tensor_vec(&tensor_vec(psi.amplitudes(), phi.amplitudes()), chi.amplitudes());
        // Rotate factors (0,1,2) -> (2,0,1) and back.
        let rotated = permute_tensor_factors(&joint, &[2, 3, 2], &[2, 0, 1]);
        let back = permute_tensor_factors(&rotated, &[2, 2, 3], &[1, 2, 0]);
        assert_eq!(back, joint);
        // Direct check of the (2,0,1) layout: chi ⊗ psi ⊗ phi.
        let expected = tensor_vec(&tensor_vec(chi.amplitudes(), psi.amplitudes()), phi.amplitudes());
        for (a, b) in rotated.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
