//! Information quantities: quantum mutual information, Holevo quantity, and
//! their structural inequalities (subadditivity, data processing against the
//! Holevo quantity of induced cq channels).

use crate::channels::{Channel, CqChannel, tensor_apply};
use crate::error::{Error, Result};
use crate::linalg::{
    C64, ComplexMatrix, DensityMatrix, PureStateVector, partial_trace, purify,
    validate_probability, von_neumann_entropy,
};

/// Value and entropy decomposition of I(ρ, N) = S(ρ) + S(N(ρ)) - S((N⊗id)Ψ).
#[derive(Clone, Debug)]
pub struct MutualInfoResult {
    /// Mutual information in bits.
    pub value: f64,
    /// (S(ρ), S(N(ρ)), S((N ⊗ id)(Ψ))) in bits.
    pub entropy_terms: [f64; 3],
}

impl MutualInfoResult {
    fn assemble(terms: [f64; 3], dim_in: usize, dim_out: usize) -> Result<Self> {
        let value = terms[0] + terms[1] - terms[2];
        let cap = ((dim_in * dim_out) as f64).log2();
        if value < -1e-9 || value > cap + 1e-9 {
            return Err(Error::Other(format!(
                "mutual information {value} outside [0, {cap}]"
            )));
        }
        Ok(Self {
            value,
            entropy_terms: terms,
        })
    }
}

/// Quantum mutual information of a state and a channel, evaluated on the
/// canonical purification (eigenbasis on both factors). The value does not
/// depend on that choice; see [`mutual_information_with_purification`].
pub fn mutual_information(rho: &DensityMatrix, ch: &Channel) -> Result<MutualInfoResult> {
    mutual_information_with_purification(rho, ch, &purify(rho))
}

/// Quantum mutual information evaluated with a caller-supplied purification
/// of ρ on dim². The joint term applies N ⊗ id factor-wise.
pub fn mutual_information_with_purification(
    rho: &DensityMatrix,
    ch: &Channel,
    psi: &PureStateVector,
) -> Result<MutualInfoResult> {
    let d = rho.dim();
    if ch.dim_in() != d {
        return Err(Error::DimensionMismatch {
            expected: ch.dim_in(),
            got: d,
            context: "mutual information input state",
        });
    }
    if psi.dim() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            got: psi.dim(),
            context: "purification dimension",
        });
    }
    let s_in = von_neumann_entropy(rho);
    let s_out = von_neumann_entropy(&ch.apply(rho)?);
    let joint = tensor_apply(
        &[ch, &Channel::identity(d)],
        &DensityMatrix::from_pure(psi),
    )?;
    let s_joint = von_neumann_entropy(&joint);
    MutualInfoResult::assemble([s_in, s_out, s_joint], d, ch.dim_out())
}

/// Holevo quantity χ(p, W) = S(Σ p(x) W(x)) - Σ p(x) S(W(x)) in bits.
pub fn holevo_quantity(p: &[f64], w: &CqChannel) -> Result<f64> {
    if p.len() != w.alphabet_size() {
        return Err(Error::DimensionMismatch {
            expected: w.alphabet_size(),
            got: p.len(),
            context: "Holevo input distribution",
        });
    }
    validate_probability(p, 1e-10)?;
    let d = w.dim_out();
    let mut avg = ComplexMatrix::zeros(d, d);
    let mut avg_entropy = 0.0;
    for (x, weight) in p.iter().enumerate() {
        if *weight <= 0.0 {
            continue;
        }
        avg.add_assign_scaled(w.output(x).matrix(), C64::new(*weight, 0.0));
        avg_entropy += weight * von_neumann_entropy(w.output(x));
    }
    avg.symmetrize();
    let s_avg = von_neumann_entropy(&DensityMatrix::from_parts_unchecked(avg));
    Ok(s_avg - avg_entropy)
}

/// Both sides of I(ρ, N₁⊗N₂) ≤ I(ρ₁, N₁) + I(ρ₂, N₂) for a bipartite input.
#[derive(Clone, Debug)]
pub struct SubadditivityReport {
    pub lhs: f64,
    pub rhs: f64,
    /// rhs - lhs; nonnegative up to numerical tolerance.
    pub slack: f64,
}

pub fn check_subadditivity(
    rho12: &DensityMatrix,
    n1: &Channel,
    n2: &Channel,
) -> Result<SubadditivityReport> {
    let (d1, d2) = (n1.dim_in(), n2.dim_in());
    if rho12.dim() != d1 * d2 {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            got: rho12.dim(),
            context: "bipartite input state",
        });
    }
    let product = n1.tensor(n2)?;
    let lhs = mutual_information(rho12, &product)?.value;
    let rho1 = partial_trace(rho12, &[d1, d2], &[0])?;
    let rho2 = partial_trace(rho12, &[d1, d2], &[1])?;
    let rhs = mutual_information(&rho1, n1)?.value + mutual_information(&rho2, n2)?.value;
    Ok(SubadditivityReport {
        lhs,
        rhs,
        slack: rhs - lhs,
    })
}

/// Holevo quantity of the cq channel V(m) = (N ∘ E_m ⊗ id)(Ψ) versus the
/// mutual information of the averaged encoded input τ̄ = Σ q(m) E_m(ρ).
#[derive(Clone, Debug)]
pub struct HolevoVsMutualReport {
    pub chi: f64,
    pub mutual: f64,
    /// mutual - chi; nonnegative up to numerical tolerance.
    pub slack: f64,
}

pub fn holevo_vs_mutual(
    psi: &PureStateVector,
    encoders: &[Channel],
    ch: &Channel,
    q: &[f64],
) -> Result<HolevoVsMutualReport> {
    if encoders.is_empty() {
        return Err(Error::InvalidParameter("no encoders".into()));
    }
    if q.len() != encoders.len() {
        return Err(Error::DimensionMismatch {
            expected: encoders.len(),
            got: q.len(),
            context: "encoder distribution",
        });
    }
    validate_probability(q, 1e-10)?;
    let ka = encoders[0].dim_in();
    let kb = psi.dim() / ka;
    if ka * kb != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: ka,
            got: psi.dim(),
            context: "resource state factors",
        });
    }
    let resource = DensityMatrix::from_pure(psi);
    let id_b = Channel::identity(kb);
    let mut outputs = Vec::with_capacity(encoders.len());
    for enc in encoders {
        if enc.dim_in() != ka || enc.dim_out() != ch.dim_in() {
            return Err(Error::DimensionMismatch {
                expected: ka,
                got: enc.dim_in(),
                context: "encoder dimensions",
            });
        }
        let encoded = tensor_apply(&[enc, &id_b], &resource)?;
        outputs.push(tensor_apply(&[ch, &id_b], &encoded)?);
    }
    let v = CqChannel::new(outputs)?;
    let chi = holevo_quantity(q, &v)?;

    let rho = partial_trace(&resource, &[ka, kb], &[0])?;
    let mut tau = ComplexMatrix::zeros(ch.dim_in(), ch.dim_in());
    for (weight, enc) in q.iter().zip(encoders) {
        if *weight <= 0.0 {
            continue;
        }
        tau.add_assign_scaled(enc.apply(&rho)?.matrix(), C64::new(*weight, 0.0));
    }
    tau.symmetrize();
    let mutual = mutual_information(&DensityMatrix::from_parts_unchecked(tau), ch)?.value;
    Ok(HolevoVsMutualReport {
        chi,
        mutual,
        slack: mutual - chi,
    })
}

/// Binary entropy in bits, with h(0) = h(1) = 0.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}
