//! Entanglement-assisted message transmission codes and their exact error
//! evaluation against compound channels (memoryless words) and arbitrarily
//! varying channels (all words).

use crate::channels::{Channel, ChannelSet, dim_guard, matrix_to_wire, tensor_apply};
use crate::error::{Error, Result};
use crate::linalg::{C64, ComplexMatrix, DensityMatrix, PureStateVector, hermitian_eig};
use serde::Serialize;

/// Cap on enumerated channel words |S|^n.
pub const WORD_GUARD: usize = 100_000;

/// An (n, L, M) code: a pure resource state on K_A ⊗ K_B, one encoding
/// channel K_A → H_A^{⊗n} per message, and a POVM on H_B^{⊗n} ⊗ K_B whose
/// elements sum to at most the identity (the deficit is an abort outcome
/// counted as an error).
#[derive(Clone, Debug)]
pub struct EACode {
    n: usize,
    /// Input letter dimension dim H_A.
    letter_dim: usize,
    /// Output letter dimension dim H_B.
    letter_out: usize,
    /// L = dim K_A.
    ent_dim: usize,
    /// dim K_B.
    receiver_dim: usize,
    resource: PureStateVector,
    encoders: Vec<Channel>,
    povm: Vec<ComplexMatrix>,
}

impl EACode {
    pub fn new(
        n: usize,
        letter_dim: usize,
        letter_out: usize,
        resource: PureStateVector,
        encoders: Vec<Channel>,
        povm: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if encoders.is_empty() || encoders.len() != povm.len() {
            return Err(Error::InvalidParameter(
                "encoder and POVM counts must match and be nonempty".into(),
            ));
        }
        let ent_dim = encoders[0].dim_in();
        if resource.dim() % ent_dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: ent_dim,
                got: resource.dim(),
                context: "resource state factorization",
            });
        }
        let receiver_dim = resource.dim() / ent_dim;
        let block_dim = letter_dim.pow(n as u32);
        for enc in &encoders {
            if enc.dim_in() != ent_dim || enc.dim_out() != block_dim {
                return Err(Error::DimensionMismatch {
                    expected: block_dim,
                    got: enc.dim_out(),
                    context: "encoder output dimension",
                });
            }
        }
        let povm_dim = povm[0].rows();
        if povm_dim != letter_out.pow(n as u32) * receiver_dim {
            return Err(Error::DimensionMismatch {
                expected: letter_out.pow(n as u32) * receiver_dim,
                got: povm_dim,
                context: "POVM dimension",
            });
        }
        let mut sum = ComplexMatrix::zeros(povm_dim, povm_dim);
        for d in &povm {
            if d.rows() != povm_dim || !d.is_square() {
                return Err(Error::NotSquare(d.rows(), d.cols()));
            }
            if !d.is_hermitian(1e-10) {
                return Err(Error::NotHermitian(d.hermiticity_defect()));
            }
            let (vals, _) = hermitian_eig(d)?;
            let (max, min) = (vals[0], *vals.last().unwrap());
            if min < -1e-10 {
                return Err(Error::NotPsd(min));
            }
            if max > 1.0 + 1e-10 {
                return Err(Error::InvalidParameter(format!(
                    "POVM element exceeds identity (max eigenvalue {max})"
                )));
            }
            sum = sum.add(d);
        }
        let (vals, _) = hermitian_eig(&sum)?;
        if vals[0] > 1.0 + 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "POVM sums above identity (max eigenvalue {})",
                vals[0]
            )));
        }
        Ok(Self {
            n,
            letter_dim,
            letter_out,
            ent_dim,
            receiver_dim,
            resource,
            encoders,
            povm,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letter_dim(&self) -> usize {
        self.letter_dim
    }

    pub fn letter_out(&self) -> usize {
        self.letter_out
    }

    /// Entanglement dimension L = dim K_A.
    pub fn entanglement_dim(&self) -> usize {
        self.ent_dim
    }

    pub fn receiver_dim(&self) -> usize {
        self.receiver_dim
    }

    pub fn message_count(&self) -> usize {
        self.encoders.len()
    }

    /// Message rate (log₂ M)/n.
    pub fn rate(&self) -> f64 {
        (self.message_count() as f64).log2() / self.n as f64
    }

    /// Entanglement rate (log₂ L)/n.
    pub fn entanglement_rate(&self) -> f64 {
        (self.ent_dim as f64).log2() / self.n as f64
    }

    pub fn resource(&self) -> &PureStateVector {
        &self.resource
    }

    pub fn encoders(&self) -> &[Channel] {
        &self.encoders
    }

    pub fn povm(&self) -> &[ComplexMatrix] {
        &self.povm
    }

    /// Exact per-message success probability for one channel word.
    pub fn success_probabilities(&self, word: &[&Channel]) -> Result<Vec<f64>> {
        if word.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: word.len(),
                context: "channel word length",
            });
        }
        for ch in word {
            if ch.dim_in() != self.letter_dim {
                return Err(Error::DimensionMismatch {
                    expected: self.letter_dim,
                    got: ch.dim_in(),
                    context: "channel letter input",
                });
            }
        }
        let out_dim = word.iter().map(|c| c.dim_out()).product::<usize>() * self.receiver_dim;
        if out_dim > dim_guard() {
            return Err(Error::GuardExceeded {
                what: "code evaluation output dimension",
                got: out_dim,
                limit: dim_guard(),
            });
        }
        if self.povm[0].rows() != out_dim {
            return Err(Error::DimensionMismatch {
                expected: out_dim,
                got: self.povm[0].rows(),
                context: "POVM dimension for this channel word",
            });
        }
        let resource = DensityMatrix::from_pure(&self.resource);
        let id_b = Channel::identity(self.receiver_dim);
        let mut out = Vec::with_capacity(self.message_count());
        for (enc, effect) in self.encoders.iter().zip(&self.povm) {
            let encoded = tensor_apply(&[enc, &id_b], &resource)?;
            // Letter-wise channel application on the H_A factors; the block
            // output of the encoder carries the same composite index layout.
            let mut per_factor: Vec<&Channel> = word.to_vec();
            per_factor.push(&id_b);
            let transmitted = tensor_apply(&per_factor, &encoded)?;
            let mut p = 0.0;
            for i in 0..out_dim {
                for j in 0..out_dim {
                    p += (effect[(i, j)] * transmitted.matrix()[(j, i)]).re;
                }
            }
            out.push(p.clamp(0.0, 1.0));
        }
        Ok(out)
    }
}

/// Worst-case error summary of a code evaluation.
#[derive(Clone, Debug, Serialize)]
pub struct ErrorReport {
    /// sup over the channel uncertainty of the mean per-message error.
    pub average: f64,
    /// sup over the channel uncertainty of the worst per-message error.
    pub maximal: f64,
    /// Per-message errors at the uncertainty attaining `average`.
    pub per_message: Vec<f64>,
    /// Label of the channel (or word) attaining `average`.
    pub worst_index: String,
}

impl ErrorReport {
    pub fn csv_header() -> &'static str {
        "n,M,L,label,average,maximal"
    }

    pub fn csv_row(&self, n: usize, m: usize, l: usize) -> String {
        format!(
            "{n},{m},{l},{},{:.12e},{:.12e}",
            self.worst_index, self.average, self.maximal
        )
    }

    fn from_per_word(mut evaluated: Vec<(String, Vec<f64>)>) -> ErrorReport {
        let mut average = -1.0;
        let mut maximal: f64 = 0.0;
        let mut worst_index = String::new();
        let mut per_message = Vec::new();
        for (label, errors) in evaluated.drain(..) {
            let avg = errors.iter().sum::<f64>() / errors.len() as f64;
            let max = errors.iter().copied().fold(0.0f64, f64::max);
            maximal = maximal.max(max);
            if avg > average {
                average = avg;
                worst_index = label;
                per_message = errors;
            }
        }
        ErrorReport {
            average,
            maximal,
            per_message,
            worst_index,
        }
    }
}

/// Errors of one message list for one channel word.
fn word_errors(code: &EACode, word: &[&Channel]) -> Result<Vec<f64>> {
    Ok(code
        .success_probabilities(word)?
        .into_iter()
        .map(|p| (1.0 - p).clamp(0.0, 1.0))
        .collect())
}

/// Evaluate against a compound channel: the uncertainty ranges over the
/// memoryless words (s, s, ..., s) only.
pub fn evaluate_code_compound(code: &EACode, set: &ChannelSet) -> Result<ErrorReport> {
    let mut evaluated = Vec::with_capacity(set.len());
    for (label, ch) in set.labels().iter().zip(set.channels()) {
        let word: Vec<&Channel> = vec![ch; code.n()];
        evaluated.push((label.clone(), word_errors(code, &word)?));
    }
    Ok(ErrorReport::from_per_word(evaluated))
}

/// Evaluate against the arbitrarily varying channel: exhaustive maximization
/// over all |S|^n channel words.
pub fn evaluate_code_avqc(code: &EACode, set: &ChannelSet) -> Result<ErrorReport> {
    let words = (set.len() as f64).powi(code.n() as i32);
    if words > WORD_GUARD as f64 {
        return Err(Error::GuardExceeded {
            what: "channel word count |S|^n",
            got: words as usize,
            limit: WORD_GUARD,
        });
    }
    let mut evaluated = Vec::with_capacity(words as usize);
    let mut digits = vec![0usize; code.n()];
    loop {
        let word: Vec<&Channel> = digits.iter().map(|&s| set.get(s)).collect();
        let label = digits
            .iter()
            .map(|&s| set.labels()[s].clone())
            .collect::<Vec<_>>()
            .join("|");
        evaluated.push((label, word_errors(code, &word)?));
        // Mixed-radix increment.
        let mut pos = code.n();
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < set.len() {
                break;
            }
            digits[pos] = 0;
        }
        if digits.iter().all(|&d| d == 0) {
            break;
        }
    }
    Ok(ErrorReport::from_per_word(evaluated))
}

/// Wire format for code export: resource amplitudes, encoder Kraus lists and
/// POVM matrices, complex entries as [re, im].
#[derive(Serialize)]
struct EACodeWire {
    n: usize,
    letter_dim: usize,
    letter_out: usize,
    entanglement_dim: usize,
    receiver_dim: usize,
    message_count: usize,
    resource: Vec<[f64; 2]>,
    encoders: Vec<Channel>,
    povm: Vec<Vec<Vec<[f64; 2]>>>,
}

impl Serialize for EACode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        EACodeWire {
            n: self.n,
            letter_dim: self.letter_dim,
            letter_out: self.letter_out,
            entanglement_dim: self.ent_dim,
            receiver_dim: self.receiver_dim,
            message_count: self.message_count(),
            resource: self
                .resource
                .amplitudes()
                .iter()
                .map(|z| [z.re, z.im])
                .collect(),
            encoders: self.encoders.clone(),
            povm: self.povm.iter().map(matrix_to_wire).collect(),
        }
        .serialize(s)
    }
}

/// Random toy code for conversion and derandomization experiments: a seeded
/// resource state, seeded encoder channels and a seeded POVM obtained by
/// normalizing M+1 random positive operators (the dropped one leaves the sum
/// strictly below the identity).
pub fn random_toy_code(
    n: usize,
    letter_dim: usize,
    ent_dim: usize,
    receiver_dim: usize,
    messages: usize,
    letter_out: usize,
    rng: &mut impl rand::Rng,
) -> Result<EACode> {
    let resource = crate::rng::random_pure_state(ent_dim * receiver_dim, rng);
    let block = letter_dim.pow(n as u32);
    let encoders: Vec<Channel> = (0..messages)
        .map(|_| crate::rng::random_channel(ent_dim, block, 2, rng))
        .collect();
    let povm_dim = letter_out.pow(n as u32) * receiver_dim;
    let raw: Vec<ComplexMatrix> = (0..=messages)
        .map(|_| {
            let g = crate::rng::ginibre(povm_dim, povm_dim, rng);
            g.mul(&g.dagger())
        })
        .collect();
    let mut total = ComplexMatrix::zeros(povm_dim, povm_dim);
    for g in &raw {
        total = total.add(g);
    }
    let inv_sqrt = matrix_inverse_sqrt(&total, 1e-12)?;
    let povm: Vec<ComplexMatrix> = raw[..messages]
        .iter()
        .map(|g| {
            let mut d = inv_sqrt.mul(g).mul(&inv_sqrt);
            d.symmetrize();
            d
        })
        .collect();
    EACode::new(n, letter_dim, letter_out, resource, encoders, povm)
}

/// Pseudo-inverse square root on the support of a PSD matrix.
pub(crate) fn matrix_inverse_sqrt(m: &ComplexMatrix, threshold: f64) -> Result<ComplexMatrix> {
    let (vals, vecs) = hermitian_eig(m)?;
    let dim = m.rows();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (idx, &l) in vals.iter().enumerate() {
        if l <= threshold {
            continue;
        }
        let col: Vec<C64> = (0..dim).map(|r| vecs[(r, idx)]).collect();
        out.add_assign_scaled(
            &ComplexMatrix::outer(&col, &col),
            C64::new(1.0 / l.sqrt(), 0.0),
        );
    }
    out.symmetrize();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::counterexample_pair;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// A perfect one-shot code: orthogonal basis preparations decoded by the
    /// matching projectors.
    fn perfect_code(m: usize) -> EACode {
        let encoders: Vec<Channel> = (0..m)
            .map(|i| {
                let mut k = ComplexMatrix::zeros(m, 1);
                k[(i, 0)] = C64::new(1.0, 0.0);
                Channel::new(1, m, vec![k]).unwrap()
            })
            .collect();
        let povm: Vec<ComplexMatrix> = (0..m)
            .map(|i| DensityMatrix::basis_state(m, i).into_matrix())
            .collect();
        EACode::new(
            1,
            m,
            m,
            PureStateVector::basis_state(1, 0),
            encoders,
            povm,
        )
        .unwrap()
    }

    #[test]
    fn perfect_code_has_zero_error() {
        let code = perfect_code(4);
        let set = ChannelSet::singleton("id", Channel::identity(4));
        let rep = evaluate_code_compound(&code, &set).unwrap();
        assert_eq!(rep.average, 0.0);
        assert_eq!(rep.maximal, 0.0);
    }

    #[test]
    fn uniform_povm_gives_one_minus_inverse_m() {
        let m = 4;
        let encoders: Vec<Channel> = (0..m)
            .map(|i| {
                let mut k = ComplexMatrix::zeros(m, 1);
                k[(i, 0)] = C64::new(1.0, 0.0);
                Channel::new(1, m, vec![k]).unwrap()
            })
            .collect();
        let povm: Vec<ComplexMatrix> = (0..m)
            .map(|_| ComplexMatrix::identity(m).scale(C64::new(1.0 / m as f64, 0.0)))
            .collect();
        let code = EACode::new(1, m, m, PureStateVector::basis_state(1, 0), encoders, povm).unwrap();
        let set = ChannelSet::singleton("id", Channel::identity(m));
        let rep = evaluate_code_compound(&code, &set).unwrap();
        let expected = 1.0 - 1.0 / m as f64;
        assert!((rep.average - expected).abs() <= 1e-12);
        assert!((rep.maximal - expected).abs() <= 1e-12);
    }

    #[test]
    fn maximal_dominates_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let code = random_toy_code(1, 2, 2, 2, 3, 2, &mut rng).unwrap();
            let set = ChannelSet::singleton("ch", crate::rng::random_channel(2, 2, 2, &mut rng));
            let rep = evaluate_code_compound(&code, &set).unwrap();
            assert!(rep.maximal >= rep.average - 1e-12);
            assert!(rep.average >= 0.0 && rep.maximal <= 1.0);
            let mean: f64 =
                rep.per_message.iter().sum::<f64>() / rep.per_message.len() as f64;
            assert!((mean - rep.average).abs() <= 1e-12);
        }
    }

    #[test]
    fn avqc_singleton_matches_compound() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let code = random_toy_code(2, 2, 2, 2, 2, 2, &mut rng).unwrap();
        let set = ChannelSet::singleton("ch", crate::rng::random_channel(2, 2, 2, &mut rng));
        let comp = evaluate_code_compound(&code, &set).unwrap();
        let avqc = evaluate_code_avqc(&code, &set).unwrap();
        assert!((comp.average - avqc.average).abs() <= 1e-12);
        assert!((comp.maximal - avqc.maximal).abs() <= 1e-12);
    }

    #[test]
    fn constant_povm_code_sees_identical_words() {
        // POVM independent of the channel word: every word yields the same
        // error, so compound and avqc agree on a two-channel set.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = 2;
        let encoders: Vec<Channel> = (0..m)
            .map(|_| crate::rng::random_channel(2, 4, 2, &mut rng))
            .collect();
        let povm: Vec<ComplexMatrix> = (0..m)
            .map(|_| ComplexMatrix::identity(8).scale(C64::new(0.5, 0.0)))
            .collect();
        let code = EACode::new(
            2,
            2,
            2,
            crate::rng::random_pure_state(4, &mut rng),
            encoders,
            povm,
        )
        .unwrap();
        let dep = Channel::depolarizing(1.0, 2).unwrap();
        let set = ChannelSet::new(
            vec!["a".into(), "b".into()],
            vec![dep.clone(), dep.clone()],
        )
        .unwrap();
        let rep = evaluate_code_avqc(&code, &set).unwrap();
        assert!((rep.average - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn povm_validation_rejects_oversums() {
        let encoders = vec![
            Channel::identity(2),
            Channel::identity(2),
        ];
        let povm = vec![ComplexMatrix::identity(2), ComplexMatrix::identity(2)];
        let resource = PureStateVector::maximally_entangled(2);
        assert!(EACode::new(1, 2, 2, resource, encoders, povm).is_err());
    }

    #[test]
    fn counterexample_word_eval_guard() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let code = random_toy_code(1, 2, 2, 2, 2, 2, &mut rng).unwrap();
        let set = counterexample_pair();
        // Letter dimension mismatch.
        assert!(evaluate_code_compound(&code, &set).is_err());
    }
}
