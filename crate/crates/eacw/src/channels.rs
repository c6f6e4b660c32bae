//! CPTP channel model: Kraus families, Choi matrices, mixtures, tensor
//! products, classical-quantum channels, and the dimension-five
//! measure-and-prepare pair used as the no-strong-converse counterexample.

use crate::error::{Error, Result};
use crate::linalg::{
    C64, ComplexMatrix, DensityMatrix, hermitian_eig, validate_probability,
};
use serde::{Deserialize, Serialize};

/// Default cap on any dimension materialized by tensor constructions.
pub const DEFAULT_DIM_GUARD: usize = 4096;

static DIM_GUARD: std::sync::atomic::AtomicUsize =
    std::sync::atomic::AtomicUsize::new(DEFAULT_DIM_GUARD);

/// Current cap on materialized dimensions.
pub fn dim_guard() -> usize {
    DIM_GUARD.load(std::sync::atomic::Ordering::Relaxed)
}

/// Adjust the dimension cap process-wide (the CLI's --guard-dim flag).
pub fn set_dim_guard(limit: usize) {
    DIM_GUARD.store(limit.max(1), std::sync::atomic::Ordering::Relaxed);
}

/// Completely positive trace-preserving map in Kraus form.
///
/// Kraus operators are `dim_out x dim_in`; trace preservation
/// Σ K†K = 1 is enforced at construction (entrywise within 1e-10).
/// Complete positivity is automatic from the Kraus form and re-asserted via
/// the Choi matrix when channels are imported from JSON.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl Channel {
    pub fn new(dim_in: usize, dim_out: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidParameter("empty Kraus family".into()));
        }
        for k in &kraus {
            if k.rows() != dim_out || k.cols() != dim_in {
                return Err(Error::DimensionMismatch {
                    expected: dim_out * dim_in,
                    got: k.rows() * k.cols(),
                    context: "Kraus operator shape",
                });
            }
        }
        let mut acc = ComplexMatrix::zeros(dim_in, dim_in);
        for k in &kraus {
            acc = acc.add(&k.dagger().mul(k));
        }
        let defect = acc.sub(&ComplexMatrix::identity(dim_in)).max_abs();
        if defect > 1e-10 {
            return Err(Error::NotTracePreserving(defect));
        }
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
        })
    }

    /// Identity channel on dimension `d`.
    pub fn identity(d: usize) -> Self {
        Self {
            dim_in: d,
            dim_out: d,
            kraus: vec![ComplexMatrix::identity(d)],
        }
    }

    /// γ-depolarizing channel D_γ(x) = (1-γ)x + γ tr(x) 1/d.
    pub fn depolarizing(gamma: f64, d: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!(
                "depolarizing parameter {gamma} outside [0,1]"
            )));
        }
        let mut kraus = Vec::with_capacity(1 + d * d);
        if gamma < 1.0 {
            kraus.push(ComplexMatrix::identity(d).scale(C64::new((1.0 - gamma).sqrt(), 0.0)));
        }
        if gamma > 0.0 {
            let w = (gamma / d as f64).sqrt();
            for i in 0..d {
                for j in 0..d {
                    let mut k = ComplexMatrix::zeros(d, d);
                    k[(i, j)] = C64::new(w, 0.0);
                    kraus.push(k);
                }
            }
        }
        Self::new(d, d, kraus)
    }

    /// Convex combination Σ p(s) N_s of a channel set, realized by the Kraus
    /// union {√p(s)·K : K ∈ Kraus(N_s)}.
    pub fn mix(set: &ChannelSet, p: &[f64]) -> Result<Self> {
        if p.len() != set.len() {
            return Err(Error::DimensionMismatch {
                expected: set.len(),
                got: p.len(),
                context: "mixture weight count",
            });
        }
        validate_probability(p, 1e-12)?;
        let mut kraus = Vec::new();
        for (w, ch) in p.iter().zip(set.channels()) {
            if *w <= 0.0 {
                continue;
            }
            let root = C64::new(w.sqrt(), 0.0);
            for k in &ch.kraus {
                kraus.push(k.scale(root));
            }
        }
        Self::new(set.dim_in(), set.dim_out(), kraus)
    }

    /// Tensor product channel with the product Kraus family materialized.
    /// Use [`tensor_apply`] instead when only the action is needed.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let din = self.dim_in * other.dim_in;
        let dout = self.dim_out * other.dim_out;
        if din.max(dout) > dim_guard() {
            return Err(Error::GuardExceeded {
                what: "tensor product channel dimension",
                got: din.max(dout),
                limit: dim_guard(),
            });
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.kron(b));
            }
        }
        Self::new(din, dout, kraus)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Σ K m K† on a raw operator (no state validation).
    pub fn apply_to_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out = out.add(&k.mul(m).mul(&k.dagger()));
        }
        out
    }

    /// Hilbert-Schmidt adjoint action Σ K† m K (unital, not trace preserving).
    pub fn apply_adjoint_to_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            out = out.add(&k.dagger().mul(m).mul(k));
        }
        out
    }

    /// Apply the channel to a state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim_in {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                got: rho.dim(),
                context: "channel input",
            });
        }
        let mut m = self.apply_to_matrix(rho.matrix());
        m.symmetrize();
        Ok(DensityMatrix::from_parts_unchecked(m))
    }

    /// Unnormalized Choi matrix J = Σᵢⱼ Eᵢⱼ ⊗ N(Eᵢⱼ), of trace dim_in.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.dim_in;
        let e = self.dim_out;
        let mut j = ComplexMatrix::zeros(d * e, d * e);
        for k in &self.kraus {
            // J = Σ_k |w_k⟩⟨w_k| with w_k[(i,o)] = K_k[o,i].
            let mut w = vec![C64::new(0.0, 0.0); d * e];
            for i in 0..d {
                for o in 0..e {
                    w[i * e + o] = k[(o, i)];
                }
            }
            j = j.add(&ComplexMatrix::outer(&w, &w));
        }
        j
    }

    /// Reconstruct a channel from an unnormalized Choi matrix.
    ///
    /// Requires J PSD (min eigenvalue ≥ -1e-9) and tr_out J = 1 within 1e-8.
    pub fn from_choi(j: &ComplexMatrix, dim_in: usize, dim_out: usize) -> Result<Self> {
        if j.rows() != dim_in * dim_out || !j.is_square() {
            return Err(Error::DimensionMismatch {
                expected: dim_in * dim_out,
                got: j.rows(),
                context: "Choi matrix side",
            });
        }
        let (vals, vecs) = hermitian_eig(j)?;
        if let Some(&min) = vals.last() {
            if min < -1e-9 {
                return Err(Error::NotPsd(min));
            }
        }
        let mut kraus = Vec::new();
        for (idx, &l) in vals.iter().enumerate() {
            if l <= 1e-12 {
                continue;
            }
            let w = l.sqrt();
            let mut k = ComplexMatrix::zeros(dim_out, dim_in);
            for i in 0..dim_in {
                for o in 0..dim_out {
                    k[(o, i)] = vecs[(i * dim_out + o, idx)] * w;
                }
            }
            kraus.push(k);
        }
        Self::new(dim_in, dim_out, kraus)
    }

    fn to_wire(&self) -> ChannelWire {
        ChannelWire {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            kraus: self.kraus.iter().map(matrix_to_wire).collect(),
        }
    }

    fn from_wire(w: &ChannelWire) -> Result<Self> {
        let kraus = w
            .kraus
            .iter()
            .map(|m| matrix_from_wire(m))
            .collect::<Result<Vec<_>>>()?;
        let ch = Self::new(w.dim_in, w.dim_out, kraus)?;
        // Imported data gets the full CPTP assertion: Choi PSD.
        let (vals, _) = hermitian_eig(&ch.choi())?;
        if let Some(&min) = vals.last() {
            if min < -1e-9 {
                return Err(Error::NotPsd(min));
            }
        }
        Ok(ch)
    }
}

/// Matrix wire format: rows of [re, im] pairs.
pub(crate) fn matrix_to_wire(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub(crate) fn matrix_from_wire(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
    let r = rows.len();
    if r == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    let c = rows[0].len();
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::InvalidParameter("ragged matrix rows".into()));
    }
    let mut m = ComplexMatrix::zeros(r, c);
    for (i, row) in rows.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            m[(i, j)] = C64::new(re, im);
        }
    }
    Ok(m)
}

#[derive(Serialize, Deserialize)]
struct ChannelWire {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

impl Serialize for Channel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_wire().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Channel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = ChannelWire::deserialize(d)?;
        Channel::from_wire(&wire).map_err(serde::de::Error::custom)
    }
}

/// Finite indexed family {N_s} with matching dimensions: the generating set
/// of a compound channel or AVQC.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelSetWire", into = "ChannelSetWire")]
pub struct ChannelSet {
    labels: Vec<String>,
    channels: Vec<Channel>,
}

#[derive(Serialize, Deserialize)]
struct ChannelSetWire {
    labels: Vec<String>,
    channels: Vec<Channel>,
}

impl TryFrom<ChannelSetWire> for ChannelSet {
    type Error = Error;
    fn try_from(w: ChannelSetWire) -> Result<Self> {
        ChannelSet::new(w.labels, w.channels)
    }
}

impl From<ChannelSet> for ChannelSetWire {
    fn from(s: ChannelSet) -> Self {
        ChannelSetWire {
            labels: s.labels,
            channels: s.channels,
        }
    }
}

impl ChannelSet {
    pub fn new(labels: Vec<String>, channels: Vec<Channel>) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::InvalidParameter("empty channel set".into()));
        }
        if labels.len() != channels.len() {
            return Err(Error::DimensionMismatch {
                expected: channels.len(),
                got: labels.len(),
                context: "channel set labels",
            });
        }
        let (din, dout) = (channels[0].dim_in(), channels[0].dim_out());
        if channels
            .iter()
            .any(|c| c.dim_in() != din || c.dim_out() != dout)
        {
            return Err(Error::InvalidParameter(
                "channel set members have differing dimensions".into(),
            ));
        }
        Ok(Self { labels, channels })
    }

    pub fn singleton(label: impl Into<String>, channel: Channel) -> Self {
        Self {
            labels: vec![label.into()],
            channels: vec![channel],
        }
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn get(&self, i: usize) -> &Channel {
        &self.channels[i]
    }

    pub fn dim_in(&self) -> usize {
        self.channels[0].dim_in()
    }

    pub fn dim_out(&self) -> usize {
        self.channels[0].dim_out()
    }

    /// Pairwise tensor products {N ⊗ N'}, labelled "a⊗b".
    pub fn tensor(&self, other: &ChannelSet) -> Result<ChannelSet> {
        let mut labels = Vec::new();
        let mut channels = Vec::new();
        for (la, a) in self.labels.iter().zip(&self.channels) {
            for (lb, b) in other.labels.iter().zip(&other.channels) {
                labels.push(format!("{la}⊗{lb}"));
                channels.push(a.tensor(b)?);
            }
        }
        ChannelSet::new(labels, channels)
    }
}

/// The entanglement-breaking pair on C⁵ used as the no-strong-converse
/// counterexample: N₁ keeps letters {1,2} and collapses {3,4,5} onto e₃,
/// N₂ keeps {4,5} and collapses {1,2,3} onto e₃. Both are basis
/// measure-and-prepare maps with Kraus operators |target⟩⟨source|.
pub fn counterexample_pair() -> ChannelSet {
    let assemble = |targets: [usize; 5]| -> Channel {
        let kraus = (0..5)
            .map(|src| {
                let mut k = ComplexMatrix::zeros(5, 5);
                k[(targets[src], src)] = C64::new(1.0, 0.0);
                k
            })
            .collect();
        Channel::new(5, 5, kraus).expect("measure-prepare family is CPTP")
    };
    // 0-based targets: N₁ sends basis vectors (1,2,3,4,5) to (1,2,3,3,3).
    let n1 = assemble([0, 1, 2, 2, 2]);
    // N₂ sends (1,2,3,4,5) to (3,3,3,4,5).
    let n2 = assemble([2, 2, 2, 3, 4]);
    ChannelSet::new(vec!["N1".into(), "N2".into()], vec![n1, n2])
        .expect("two channels of equal dimension")
}

/// Apply one channel per tensor factor without materializing the product
/// Kraus family. `channels[i]` acts on factor `i` of `rho`.
pub fn tensor_apply(channels: &[&Channel], rho: &DensityMatrix) -> Result<DensityMatrix> {
    tensor_apply_guarded(channels, rho, dim_guard())
}

pub fn tensor_apply_guarded(
    channels: &[&Channel],
    rho: &DensityMatrix,
    guard: usize,
) -> Result<DensityMatrix> {
    let dims_in: Vec<usize> = channels.iter().map(|c| c.dim_in()).collect();
    let total_in: usize = dims_in.iter().product();
    if total_in != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: total_in,
            got: rho.dim(),
            context: "tensor_apply input",
        });
    }
    let mut m = rho.matrix().clone();
    let mut dims = dims_in;
    for (idx, ch) in channels.iter().enumerate() {
        let next_total: usize = dims
            .iter()
            .enumerate()
            .map(|(i, &d)| if i == idx { ch.dim_out() } else { d })
            .product();
        if next_total > guard {
            return Err(Error::GuardExceeded {
                what: "tensor_apply intermediate dimension",
                got: next_total,
                limit: guard,
            });
        }
        m = apply_to_factor(&m, &dims, idx, ch);
        dims[idx] = ch.dim_out();
    }
    m.symmetrize();
    Ok(DensityMatrix::from_parts_unchecked(m))
}

/// Apply a channel to one tensor factor of a raw operator via reshaping.
pub fn apply_to_factor(
    m: &ComplexMatrix,
    dims: &[usize],
    factor: usize,
    ch: &Channel,
) -> ComplexMatrix {
    apply_kraus_to_factor(m, dims, factor, ch.kraus())
}

/// Apply an arbitrary Kraus list Σ K · K† to one tensor factor. The list need
/// not be trace preserving (used for channel differences and adjoints).
pub fn apply_kraus_to_factor(
    m: &ComplexMatrix,
    dims: &[usize],
    factor: usize,
    kraus: &[ComplexMatrix],
) -> ComplexMatrix {
    let before: usize = dims[..factor].iter().product();
    let din = dims[factor];
    let after: usize = dims[factor + 1..].iter().product();
    assert_eq!(m.rows(), before * din * after);
    assert_eq!(din, kraus[0].cols());
    let dout = kraus[0].rows();
    let rows_out = before * dout * after;
    let mut out = ComplexMatrix::zeros(rows_out, rows_out);
    let cols = m.cols();
    for k in kraus {
        // Left contraction: t[(a,j,b), col] = Σᵢ K[j,i] m[(a,i,b), col].
        let mut t = ComplexMatrix::zeros(rows_out, cols);
        for a in 0..before {
            for j in 0..dout {
                for i in 0..din {
                    let kji = k[(j, i)];
                    if kji.norm_sqr() == 0.0 {
                        continue;
                    }
                    for b in 0..after {
                        let r_out = (a * dout + j) * after + b;
                        let r_in = (a * din + i) * after + b;
                        for col in 0..cols {
                            let v = m.data()[r_in * cols + col];
                            t[(r_out, col)] += kji * v;
                        }
                    }
                }
            }
        }
        // Right contraction: out[row, (a,j,b)] += Σᵢ t[row, (a,i,b)] conj(K[j,i]).
        for a in 0..before {
            for j in 0..dout {
                for i in 0..din {
                    let kji_c = k[(j, i)].conj();
                    if kji_c.norm_sqr() == 0.0 {
                        continue;
                    }
                    for b in 0..after {
                        let c_out = (a * dout + j) * after + b;
                        let c_in = (a * din + i) * after + b;
                        for row in 0..rows_out {
                            let v = t[(row, c_in)];
                            out[(row, c_out)] += v * kji_c;
                        }
                    }
                }
            }
        }
    }
    out
}

/// Classical-quantum channel: a finite alphabet mapped to output states.
#[derive(Clone, Debug)]
pub struct CqChannel {
    outputs: Vec<DensityMatrix>,
}

impl CqChannel {
    pub fn new(outputs: Vec<DensityMatrix>) -> Result<Self> {
        if outputs.is_empty() {
            return Err(Error::InvalidParameter("empty cq alphabet".into()));
        }
        let d = outputs[0].dim();
        if outputs.iter().any(|o| o.dim() != d) {
            return Err(Error::InvalidParameter(
                "cq outputs have differing dimensions".into(),
            ));
        }
        Ok(Self { outputs })
    }

    pub fn alphabet_size(&self) -> usize {
        self.outputs.len()
    }

    pub fn dim_out(&self) -> usize {
        self.outputs[0].dim()
    }

    pub fn output(&self, x: usize) -> &DensityMatrix {
        &self.outputs[x]
    }

    pub fn outputs(&self) -> &[DensityMatrix] {
        &self.outputs
    }

    /// W^{⊗n}(x^n) = W(x₁) ⊗ ... ⊗ W(x_n).
    pub fn cq_apply(&self, word: &[usize]) -> Result<DensityMatrix> {
        if word.is_empty() {
            return Err(Error::InvalidParameter("empty word".into()));
        }
        let mut dim = 1usize;
        for &x in word {
            if x >= self.outputs.len() {
                return Err(Error::InvalidParameter(format!(
                    "letter {x} outside alphabet of size {}",
                    self.outputs.len()
                )));
            }
            dim *= self.dim_out();
            if dim > dim_guard() {
                return Err(Error::GuardExceeded {
                    what: "cq word output dimension",
                    got: dim,
                    limit: dim_guard(),
                });
            }
        }
        let mut m = self.outputs[word[0]].matrix().clone();
        for &x in &word[1..] {
            m = m.kron(self.outputs[x].matrix());
        }
        Ok(DensityMatrix::from_parts_unchecked(m))
    }
}
