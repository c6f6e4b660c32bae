//! The typical-subspace encoding family.
//!
//! For a base state σ on C^d and block length k, the product space H^{⊗k}
//! splits into typical blocks H_λ spanned by eigenbasis sequences of one
//! frequency type λ. The encoding family conjugates by block unitaries
//! u_x = ⊕_λ (−1)^{r_λ} v^λ_{j_λ}, where each block carries a
//! Hilbert-Schmidt orthogonal unitary basis {v^λ_j} realized as generalized
//! Weyl shift-clock operators, padded with zeros outside its block.
//!
//! Averaging the encodings over the whole alphabet scrambles the purified
//! product state into Σ_λ α^k(T_λ) π_λ ⊗ π_λ, and each single encoding
//! leaves the joint output entropy of any channel unchanged; both identities
//! are checked numerically here, and they drive the approximation of k·I(σ,N)
//! by the Holevo quantity of the induced cq channel.

use crate::channels::{Channel, CqChannel, dim_guard, tensor_apply};
use crate::coding::types::{TypeClass, enumerate_types};
use crate::error::{Error, Result};
use crate::info::{holevo_quantity, mutual_information};
use crate::linalg::{
    C64, ComplexMatrix, DensityMatrix, PureStateVector, permute_tensor_factors, tensor_vec,
    trace_norm,
};

/// Full summation over the alphabet is used up to this size; beyond it the
/// scrambling check sums sign bits and cross blocks analytically and only
/// the per-block Weyl averages numerically.
const BRUTE_ALPHABET_LIMIT: usize = 4200;
/// Alphabet cap for materializing the induced cq channel.
const CQ_ALPHABET_LIMIT: usize = 2000;

/// Hilbert-Schmidt orthogonal unitary basis of C^m: the m² shift-clock
/// products X^a Z^b with tr(v†v') = m·δ.
pub fn weyl_basis(m: usize) -> Vec<ComplexMatrix> {
    let omega = 2.0 * std::f64::consts::PI / m as f64;
    let mut out = Vec::with_capacity(m * m);
    for a in 0..m {
        for b in 0..m {
            let mut v = ComplexMatrix::zeros(m, m);
            for col in 0..m {
                let phase = omega * (b * col) as f64;
                v[((col + a) % m, col)] = C64::new(phase.cos(), phase.sin());
            }
            out.push(v);
        }
    }
    out
}

/// One alphabet letter: a Weyl index and a sign bit per typical block.
pub type EncodingIndex = Vec<(usize, bool)>;

/// The encoding family {Ẽ_x} built from a base state and block length.
pub struct EncodingFamily {
    k: usize,
    d: usize,
    sigma: DensityMatrix,
    /// Eigenvalues of σ, descending.
    alpha: Vec<f64>,
    /// Eigenvectors of σ as columns.
    basis: ComplexMatrix,
    /// k-fold Kronecker power of `basis`.
    basis_pow: ComplexMatrix,
    types: Vec<TypeClass>,
    /// Per type: composite indices of its sequences in the eigenbasis
    /// product ordering.
    blocks: Vec<Vec<usize>>,
    /// Per type: the d_λ² block unitaries.
    weyl: Vec<Vec<ComplexMatrix>>,
}

/// Build the family for σ on C^d and block length k.
pub fn build_encoding_family(sigma: &DensityMatrix, k: usize) -> Result<EncodingFamily> {
    let d = sigma.dim();
    let types = enumerate_types(k, d)?;
    let dim_total = d.pow(k as u32);
    if dim_total > dim_guard() {
        return Err(Error::GuardExceeded {
            what: "typical decomposition dimension d^k",
            got: dim_total,
            limit: dim_guard(),
        });
    }
    let (alpha, basis) = sigma.eig();
    let mut basis_pow = ComplexMatrix::identity(1);
    for _ in 0..k {
        basis_pow = basis_pow.kron(&basis);
    }
    let mut blocks = Vec::with_capacity(types.len());
    let mut weyl = Vec::with_capacity(types.len());
    for ty in &types {
        let indices: Vec<usize> = ty
            .sequences()
            .iter()
            .map(|seq| seq.iter().fold(0usize, |acc, &digit| acc * d + digit))
            .collect();
        weyl.push(weyl_basis(indices.len()));
        blocks.push(indices);
    }
    Ok(EncodingFamily {
        k,
        d,
        sigma: sigma.clone(),
        alpha,
        basis,
        basis_pow,
        types,
        blocks,
        weyl,
    })
}

impl EncodingFamily {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn letter_dim(&self) -> usize {
        self.d
    }

    pub fn base_state(&self) -> &DensityMatrix {
        &self.sigma
    }

    pub fn types(&self) -> &[TypeClass] {
        &self.types
    }

    /// |𝒳| = Π_λ 2·d_λ².
    pub fn alphabet_size(&self) -> usize {
        self.blocks.iter().map(|b| 2 * b.len() * b.len()).product()
    }

    /// Decode a flat index into per-block (Weyl label, sign bit) digits.
    pub fn index_to_letter(&self, mut idx: usize) -> EncodingIndex {
        let mut letter = Vec::with_capacity(self.blocks.len());
        for block in &self.blocks {
            let radix = 2 * block.len() * block.len();
            let digit = idx % radix;
            idx /= radix;
            letter.push((digit / 2, digit % 2 == 1));
        }
        letter
    }

    /// The block unitary u_x on H^{⊗k} in the computational basis.
    pub fn unitary(&self, x: &EncodingIndex) -> ComplexMatrix {
        self.basis_pow
            .mul(&self.unitary_eigen_coords(x))
            .mul(&self.basis_pow.dagger())
    }

    /// u_x expressed in the σ-eigenbasis product coordinates, where it is
    /// block diagonal over the typical blocks.
    pub fn unitary_eigen_coords(&self, x: &EncodingIndex) -> ComplexMatrix {
        assert_eq!(x.len(), self.blocks.len());
        let dim = self.d.pow(self.k as u32);
        let mut u = ComplexMatrix::zeros(dim, dim);
        for (t, &(j, sign)) in x.iter().enumerate() {
            let v = &self.weyl[t][j];
            let s = if sign { -1.0 } else { 1.0 };
            for (local_r, &global_r) in self.blocks[t].iter().enumerate() {
                for (local_c, &global_c) in self.blocks[t].iter().enumerate() {
                    u[(global_r, global_c)] = v[(local_r, local_c)] * s;
                }
            }
        }
        u
    }

    /// The encoding channel Ẽ_x(a) = u_x a u_x†.
    pub fn encoder(&self, x: &EncodingIndex) -> Channel {
        Channel::new(
            self.d.pow(self.k as u32),
            self.d.pow(self.k as u32),
            vec![self.unitary(x)],
        )
        .expect("block unitary conjugation is CPTP")
    }

    /// State vector of Ψ^{⊗k} reordered to (H_A^{⊗k}) ⊗ (H_B^{⊗k}), where
    /// Ψ purifies σ on both eigenbasis factors.
    pub fn purified_power(&self) -> PureStateVector {
        let d = self.d;
        let mut psi = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            let w = self.alpha[i].max(0.0).sqrt();
            if w == 0.0 {
                continue;
            }
            for a in 0..d {
                for b in 0..d {
                    psi[a * d + b] += self.basis[(a, i)] * self.basis[(b, i)] * w;
                }
            }
        }
        let mut power = psi.clone();
        for _ in 1..self.k {
            power = tensor_vec(&power, &psi);
        }
        // Interleaved (A₁ B₁ A₂ B₂ ...) to blocked (A... B...).
        let dims = vec![d; 2 * self.k];
        let mut perm: Vec<usize> = (0..self.k).map(|i| 2 * i).collect();
        perm.extend((0..self.k).map(|i| 2 * i + 1));
        let blocked = permute_tensor_factors(&power, &dims, &perm);
        PureStateVector::new(blocked).expect("purification power stays normalized")
    }

    /// Projectors of the typical blocks in the computational basis, scaled to
    /// the maximally mixed block states π_λ.
    fn block_pi(&self, t: usize) -> ComplexMatrix {
        let dim = self.d.pow(self.k as u32);
        let block = &self.blocks[t];
        let mut p = ComplexMatrix::zeros(dim, dim);
        for &idx in block {
            let col: Vec<C64> = (0..dim).map(|r| self.basis_pow[(r, idx)]).collect();
            p = p.add(&ComplexMatrix::outer(&col, &col));
        }
        p.scale(C64::new(1.0 / block.len() as f64, 0.0))
    }
}

/// Trace-norm residual of the scrambling identity
/// (1/|𝒳|) Σ_x (Ẽ_x ⊗ id)(Ψ^{⊗k}) = Σ_λ α^k(T_λ) π_λ ⊗ π_λ.
///
/// Small alphabets are summed exhaustively in the computational basis. For
/// large alphabets the sum over sign bits (which cancels all cross-block
/// terms exactly) and over untouched blocks is carried out analytically,
/// leaving the per-block Weyl averages to be summed numerically in the
/// eigenbasis coordinates.
pub fn verify_scrambling(fam: &EncodingFamily) -> Result<f64> {
    let dim = fam.d.pow(fam.k as u32);
    if dim * dim > dim_guard() {
        return Err(Error::GuardExceeded {
            what: "scrambling check joint dimension",
            got: dim * dim,
            limit: dim_guard(),
        });
    }
    let lhs = if fam.alphabet_size() <= BRUTE_ALPHABET_LIMIT {
        scrambling_average_brute(fam)
    } else {
        scrambling_average_blockwise(fam)
    };

    // Right side in matching coordinates.
    let brute = fam.alphabet_size() <= BRUTE_ALPHABET_LIMIT;
    let mut rhs = ComplexMatrix::zeros(dim * dim, dim * dim);
    for (t, ty) in fam.types.iter().enumerate() {
        let weight = ty.class_probability(&fam.alpha);
        if weight == 0.0 {
            continue;
        }
        let pi = if brute {
            fam.block_pi(t)
        } else {
            // Eigenbasis coordinates: diagonal indicator.
            let block = &fam.blocks[t];
            let mut p = ComplexMatrix::zeros(dim, dim);
            for &idx in block {
                p[(idx, idx)] = C64::new(1.0 / block.len() as f64, 0.0);
            }
            p
        };
        rhs.add_assign_scaled(&pi.kron(&pi), C64::new(weight, 0.0));
    }
    trace_norm(&lhs.sub(&rhs))
}

/// Exhaustive average over the alphabet, in the computational basis.
fn scrambling_average_brute(fam: &EncodingFamily) -> ComplexMatrix {
    let dim = fam.d.pow(fam.k as u32);
    let psi = fam.purified_power();
    // View ψ as a dim×dim matrix: row = A index, column = B index.
    let psi_mat = ComplexMatrix::from_fn(dim, dim, |a, b| psi.amplitudes()[a * dim + b]);
    let size = fam.alphabet_size();
    let mut avg = ComplexMatrix::zeros(dim * dim, dim * dim);
    for idx in 0..size {
        let x = fam.index_to_letter(idx);
        let rotated = fam.unitary(&x).mul(&psi_mat);
        avg.add_assign_scaled(
            &ComplexMatrix::outer(rotated.data(), rotated.data()),
            C64::new(1.0 / size as f64, 0.0),
        );
    }
    avg.symmetrize();
    avg
}

/// Block-analytic average in eigenbasis coordinates: cross-block terms carry
/// a free sign bit and average to zero, so only the diagonal blocks
/// Σ_j (v_j ⊗ 1)Φ_λ(v_j ⊗ 1)†/d_λ² remain.
fn scrambling_average_blockwise(fam: &EncodingFamily) -> ComplexMatrix {
    let dim = fam.d.pow(fam.k as u32);
    let mut avg = ComplexMatrix::zeros(dim * dim, dim * dim);
    for (t, ty) in fam.types.iter().enumerate() {
        let weight = ty.class_probability(&fam.alpha);
        if weight == 0.0 {
            continue;
        }
        let block = &fam.blocks[t];
        let dl = block.len();
        let scale = weight / (dl as f64 * dl as f64 * dl as f64);
        for v in &fam.weyl[t] {
            // (v ⊗ 1)|Φ_λ⟩ has amplitudes v[a,b]/√d_λ on |block_a, block_b⟩.
            let mut w = vec![C64::new(0.0, 0.0); dim * dim];
            for (la, &ga) in block.iter().enumerate() {
                for (lb, &gb) in block.iter().enumerate() {
                    w[ga * dim + gb] = v[(la, lb)];
                }
            }
            avg.add_assign_scaled(&ComplexMatrix::outer(&w, &w), C64::new(scale, 0.0));
        }
    }
    avg.symmetrize();
    avg
}

/// Joint output entropies S((N ∘ Ẽ_x ⊗ id)(Ψ^{⊗k})) and
/// S((N ⊗ id)(Ψ^{⊗k})) for a channel N on H^{⊗k}. The two agree for every
/// alphabet letter.
pub fn verify_entropy_invariance(
    fam: &EncodingFamily,
    ch: &Channel,
    x: &EncodingIndex,
) -> Result<(f64, f64)> {
    let dim = fam.d.pow(fam.k as u32);
    if ch.dim_in() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: ch.dim_in(),
            context: "entropy invariance channel input",
        });
    }
    let psi = fam.purified_power();
    let joint = DensityMatrix::from_pure(&psi);
    let id_b = Channel::identity(dim);
    let reference = tensor_apply(&[ch, &id_b], &joint)?;
    let s_ref = crate::linalg::von_neumann_entropy(&reference);

    let encoded = tensor_apply(&[&fam.encoder(x), &id_b], &joint)?;
    let rotated = tensor_apply(&[ch, &id_b], &encoded)?;
    let s_x = crate::linalg::von_neumann_entropy(&rotated);
    Ok((s_x, s_ref))
}

/// Report for the approximation of k·I(σ, N) by the Holevo quantity of the
/// induced cq channel V(x) = (N^{⊗k} ∘ Ẽ_x ⊗ id^{⊗k})(Ψ^{⊗k}).
#[derive(Clone, Debug)]
pub struct MutualGapReport {
    pub k_times_mutual: f64,
    pub chi: f64,
    pub gap: f64,
    /// 2d·log₂(k+1).
    pub bound: f64,
    pub holds: bool,
}

/// Evaluate the gap |k·I(σ,N) − χ(q*, V)| with q* the uniform distribution
/// on the encoding alphabet.
pub fn mutual_approx_gap(
    sigma: &DensityMatrix,
    k: usize,
    ch: &Channel,
) -> Result<MutualGapReport> {
    if ch.dim_in() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            got: ch.dim_in(),
            context: "mutual gap channel input",
        });
    }
    let fam = build_encoding_family(sigma, k)?;
    let size = fam.alphabet_size();
    if size > CQ_ALPHABET_LIMIT {
        return Err(Error::GuardExceeded {
            what: "encoding alphabet size",
            got: size,
            limit: CQ_ALPHABET_LIMIT,
        });
    }
    let d = sigma.dim();
    let out_dim = ch.dim_out().pow(k as u32) * d.pow(k as u32);
    if out_dim > dim_guard() {
        return Err(Error::GuardExceeded {
            what: "induced cq output dimension",
            got: out_dim,
            limit: dim_guard(),
        });
    }

    let psi = fam.purified_power();
    // Factor layout A₁..A_k B₁..B_k with per-letter channels on the A half.
    let id_letter = Channel::identity(d);
    let mut per_factor: Vec<&Channel> = vec![ch; k];
    per_factor.extend(std::iter::repeat_n(&id_letter, k));

    let dim_a = d.pow(k as u32);
    let mut outputs = Vec::with_capacity(size);
    for idx in 0..size {
        let x = fam.index_to_letter(idx);
        let u = fam.unitary(&x);
        // Apply u on the A half of the pure state, then the channels.
        let mut amps = vec![C64::new(0.0, 0.0); psi.dim()];
        for (a_out, chunk) in amps.chunks_mut(dim_a).enumerate() {
            for a_in in 0..dim_a {
                let coeff = u[(a_out, a_in)];
                if coeff.norm_sqr() == 0.0 {
                    continue;
                }
                for (b, slot) in chunk.iter_mut().enumerate() {
                    *slot += coeff * psi.amplitudes()[a_in * dim_a + b];
                }
            }
        }
        let encoded = DensityMatrix::from_pure(&PureStateVector::new(amps)?);
        outputs.push(crate::channels::tensor_apply_guarded(
            &per_factor,
            &encoded,
            dim_guard(),
        )?);
    }
    let v = CqChannel::new(outputs)?;
    let q_uniform = vec![1.0 / size as f64; size];
    let chi = holevo_quantity(&q_uniform, &v)?;
    let k_times_mutual = k as f64 * mutual_information(sigma, ch)?.value;
    let gap = (k_times_mutual - chi).abs();
    let bound = 2.0 * d as f64 * ((k + 1) as f64).log2();
    Ok(MutualGapReport {
        k_times_mutual,
        chi,
        gap,
        bound,
        holds: gap <= bound + 1e-6,
    })
}
