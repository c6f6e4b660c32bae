//! Code conversions: the max-from-average construction (cyclic message
//! translations controlled by an extra maximally entangled register), code
//! permutations, and the derandomized combination of permuted compound codes
//! into an arbitrarily-varying code.

use crate::channels::{Channel, dim_guard};
use crate::coding::code::EACode;
use crate::error::{Error, Result};
use crate::linalg::{C64, ComplexMatrix, PureStateVector, permute_tensor_factors};

/// Combine K codes sharing the same resource, dimensions and message count
/// into one code whose extra maximally entangled register of dimension K
/// selects the variant: encoders act conditionally on the sender half, the
/// POVM reads the receiver half. The per-message error of the combined code
/// against any channel word is exactly the mean over variants.
fn control_mix(variants: &[EACode]) -> Result<EACode> {
    let k_count = variants.len();
    if k_count == 0 {
        return Err(Error::InvalidParameter("no code variants".into()));
    }
    let base = &variants[0];
    for v in variants {
        if v.n() != base.n()
            || v.letter_dim() != base.letter_dim()
            || v.letter_out() != base.letter_out()
            || v.entanglement_dim() != base.entanglement_dim()
            || v.receiver_dim() != base.receiver_dim()
            || v.message_count() != base.message_count()
            || v.resource() != base.resource()
        {
            return Err(Error::InvalidParameter(
                "code variants must share resource, dimensions and message count".into(),
            ));
        }
    }
    let ka = base.entanglement_dim();
    let kb = base.receiver_dim();
    let new_povm_dim = base.povm()[0].rows() * k_count;
    if ka * k_count > dim_guard() || new_povm_dim > dim_guard() {
        return Err(Error::GuardExceeded {
            what: "controlled code dimension",
            got: new_povm_dim.max(ka * k_count),
            limit: dim_guard(),
        });
    }

    // Resource Ψ ⊗ Φ_K with factors reordered to (K_A, C^K) ⊗ (K_B, C^K).
    let phi = PureStateVector::maximally_entangled(k_count);
    let raw = base.resource().tensor(&phi);
    let blocked = permute_tensor_factors(
        raw.amplitudes(),
        &[ka, kb, k_count, k_count],
        &[0, 2, 1, 3],
    );
    let resource = PureStateVector::new(blocked)?;

    let m_count = base.message_count();
    let mut encoders = Vec::with_capacity(m_count);
    let mut povm = Vec::with_capacity(m_count);
    for m in 0..m_count {
        let mut kraus = Vec::new();
        for (k, variant) in variants.iter().enumerate() {
            // Projection 1_{K_A} ⊗ ⟨e_k| from K_A ⊗ C^K to K_A.
            let mut proj = ComplexMatrix::zeros(ka, ka * k_count);
            for a in 0..ka {
                proj[(a, a * k_count + k)] = C64::new(1.0, 0.0);
            }
            for op in variant.encoders()[m].kraus() {
                kraus.push(op.mul(&proj));
            }
        }
        encoders.push(Channel::new(
            ka * k_count,
            base.letter_dim().pow(base.n() as u32),
            kraus,
        )?);

        let block = base.povm()[0].rows();
        let mut effect = ComplexMatrix::zeros(block * k_count, block * k_count);
        for (k, variant) in variants.iter().enumerate() {
            let mut selector = ComplexMatrix::zeros(k_count, k_count);
            selector[(k, k)] = C64::new(1.0, 0.0);
            effect = effect.add(&variant.povm()[m].kron(&selector));
        }
        povm.push(effect);
    }
    EACode::new(
        base.n(),
        base.letter_dim(),
        base.letter_out(),
        resource,
        encoders,
        povm,
    )
}

/// Relabel messages: message m of the result uses encoder and POVM element
/// alpha(m) of the source.
fn relabel_messages(code: &EACode, alpha: &[usize]) -> Result<EACode> {
    validate_permutation(alpha, code.message_count(), "message permutation")?;
    let encoders: Vec<Channel> = alpha.iter().map(|&a| code.encoders()[a].clone()).collect();
    let povm: Vec<ComplexMatrix> = alpha.iter().map(|&a| code.povm()[a].clone()).collect();
    EACode::new(
        code.n(),
        code.letter_dim(),
        code.letter_out(),
        code.resource().clone(),
        encoders,
        povm,
    )
}

fn validate_permutation(perm: &[usize], len: usize, what: &str) -> Result<()> {
    if perm.len() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            got: perm.len(),
            context: "permutation length",
        });
    }
    let mut seen = vec![false; len];
    for &p in perm {
        if p >= len || seen[p] {
            return Err(Error::InvalidParameter(format!("invalid {what}: {perm:?}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Unitary permuting tensor factors: slot j of the output carries factor
/// sigma(j) of the input.
fn factor_permutation_unitary(letter_dim: usize, sigma: &[usize]) -> ComplexMatrix {
    let n = sigma.len();
    let dim = letter_dim.pow(n as u32);
    let mut u = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        // Digits of the input basis vector, most significant first.
        let mut digits = vec![0usize; n];
        let mut rem = col;
        for j in (0..n).rev() {
            digits[j] = rem % letter_dim;
            rem /= letter_dim;
        }
        let mut row = 0usize;
        for j in 0..n {
            row = row * letter_dim + digits[sigma[j]];
        }
        u[(row, col)] = C64::new(1.0, 0.0);
    }
    u
}

/// Conjugate a code by a blocklength permutation and a message relabeling:
/// encoders become U_{A,σ} E_{α(m)} U†, the POVM (U_{B,σ} ⊗ 1) D_{α(m)} (·)†.
/// Against a channel word s^n the permuted code reproduces the original
/// code's errors on the inversely permuted word.
pub fn permuted_code(code: &EACode, sigma: &[usize], alpha: &[usize]) -> Result<EACode> {
    validate_permutation(sigma, code.n(), "blocklength permutation")?;
    let relabeled = relabel_messages(code, alpha)?;
    let u_a = factor_permutation_unitary(code.letter_dim(), sigma);
    let u_b = factor_permutation_unitary(code.letter_out(), sigma);
    let u_b_full = u_b.kron(&ComplexMatrix::identity(code.receiver_dim()));

    let encoders: Vec<Channel> = relabeled
        .encoders()
        .iter()
        .map(|enc| {
            let kraus = enc.kraus().iter().map(|k| u_a.mul(k)).collect();
            Channel::new(enc.dim_in(), enc.dim_out(), kraus)
        })
        .collect::<Result<Vec<_>>>()?;
    let povm: Vec<ComplexMatrix> = relabeled
        .povm()
        .iter()
        .map(|d| {
            let mut rotated = u_b_full.mul(d).mul(&u_b_full.dagger());
            rotated.symmetrize();
            rotated
        })
        .collect();
    EACode::new(
        code.n(),
        code.letter_dim(),
        code.letter_out(),
        code.resource().clone(),
        encoders,
        povm,
    )
}

/// The max-from-average conversion: an extra maximally entangled register of
/// dimension M coordinates a uniformly random cyclic message translation, so
/// every per-message error of the converted code equals the source code's
/// average error, channel by channel. The entanglement dimension grows from
/// L to M·L.
pub fn max_from_avg(code: &EACode) -> Result<EACode> {
    let m_count = code.message_count();
    let variants: Vec<EACode> = (0..m_count)
        .map(|shift| {
            let alpha: Vec<usize> = (0..m_count).map(|m| (m + shift) % m_count).collect();
            relabel_messages(code, &alpha)
        })
        .collect::<Result<Vec<_>>>()?;
    control_mix(&variants)
}

/// The derandomized arbitrarily-varying code: a maximally entangled register
/// of dimension K selects one of K (blocklength, message) permutation pairs;
/// the combined code's error against any channel word equals the mean of the
/// permuted codes' errors on that word.
pub fn avqc_code_from_compound(
    code: &EACode,
    pairs: &[(Vec<usize>, Vec<usize>)],
) -> Result<EACode> {
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("no permutation pairs".into()));
    }
    let variants: Vec<EACode> = pairs
        .iter()
        .map(|(sigma, alpha)| permuted_code(code, sigma, alpha))
        .collect::<Result<Vec<_>>>()?;
    control_mix(&variants)
}

/// Seeded random permutation of [len].
pub fn random_permutation(len: usize, rng: &mut impl rand::Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..len).collect();
    for i in (1..len).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::ChannelSet;
    use crate::coding::code::{evaluate_code_avqc, evaluate_code_compound, random_toy_code};
    use crate::coding::counterexample::counterexample_code;
    use crate::rng::random_channel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn conversion_flattens_per_message_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let code = random_toy_code(1, 2, 2, 2, 3, 2, &mut rng).unwrap();
        let ch = random_channel(2, 2, 2, &mut rng);
        let set = ChannelSet::singleton("ch", ch);
        let before = evaluate_code_compound(&code, &set).unwrap();

        let converted = max_from_avg(&code).unwrap();
        assert_eq!(converted.entanglement_dim(), 3 * 2);
        let after = evaluate_code_compound(&converted, &set).unwrap();
        let spread = after
            .per_message
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &e| {
                (lo.min(e), hi.max(e))
            });
        assert!(spread.1 - spread.0 <= 1e-12, "spread {spread:?}");
        assert!((after.maximal - before.average).abs() <= 1e-12);
        assert!((after.average - before.average).abs() <= 1e-12);
    }

    #[test]
    fn conversion_is_identity_on_uniform_codes() {
        // A code whose per-message errors are already constant keeps them.
        let code = counterexample_code(1).unwrap().to_eacode().unwrap();
        let set = crate::channels::counterexample_pair();
        let before = evaluate_code_compound(&code, &set).unwrap();
        let converted = max_from_avg(&code).unwrap();
        let after = evaluate_code_compound(&converted, &set).unwrap();
        // Converted per-message errors all equal the source average 2/5.
        for e in &after.per_message {
            assert!((e - before.average).abs() <= 1e-12);
        }
        assert!((after.maximal - 0.4).abs() <= 1e-12);
    }

    #[test]
    fn permuted_code_identity_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let code = random_toy_code(2, 2, 2, 2, 2, 2, &mut rng).unwrap();
        let set = ChannelSet::singleton("ch", random_channel(2, 2, 2, &mut rng));
        let same = permuted_code(&code, &[0, 1], &[0, 1]).unwrap();
        let a = evaluate_code_compound(&code, &set).unwrap();
        let b = evaluate_code_compound(&same, &set).unwrap();
        assert!((a.average - b.average).abs() <= 1e-12);
        assert!((a.maximal - b.maximal).abs() <= 1e-12);
    }

    #[test]
    fn permuted_code_swaps_word_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let code = random_toy_code(2, 2, 2, 2, 2, 2, &mut rng).unwrap();
        let n0 = random_channel(2, 2, 2, &mut rng);
        let n1 = random_channel(2, 2, 3, &mut rng);
        let swap = permuted_code(&code, &[1, 0], &[0, 1]).unwrap();

        // Memoryless words are invariant under blocklength permutations.
        let word_aa: Vec<&crate::channels::Channel> = vec![&n0, &n0];
        let base_aa = code.success_probabilities(&word_aa).unwrap();
        let perm_aa = swap.success_probabilities(&word_aa).unwrap();
        for (x, y) in base_aa.iter().zip(&perm_aa) {
            assert!((x - y).abs() <= 1e-10);
        }

        // Mixed word (n0, n1): permuted code on it equals original on (n1, n0).
        let word_ab: Vec<&crate::channels::Channel> = vec![&n0, &n1];
        let word_ba: Vec<&crate::channels::Channel> = vec![&n1, &n0];
        let permuted_on_ab = swap.success_probabilities(&word_ab).unwrap();
        let original_on_ba = code.success_probabilities(&word_ba).unwrap();
        for (x, y) in permuted_on_ab.iter().zip(&original_on_ba) {
            assert!((x - y).abs() <= 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn message_relabeling_tracks_alpha() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let code = random_toy_code(1, 2, 2, 2, 3, 2, &mut rng).unwrap();
        let ch = random_channel(2, 2, 2, &mut rng);
        let alpha = vec![2usize, 0, 1];
        let relabeled = permuted_code(&code, &[0], &alpha).unwrap();
        let word: Vec<&crate::channels::Channel> = vec![&ch];
        let base = code.success_probabilities(&word).unwrap();
        let shuffled = relabeled.success_probabilities(&word).unwrap();
        for (m, &a) in alpha.iter().enumerate() {
            assert!((shuffled[m] - base[a]).abs() <= 1e-10);
        }
    }

    #[test]
    fn derandomized_code_averages_variant_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let code = random_toy_code(3, 2, 2, 2, 2, 2, &mut rng).unwrap();
        let set = ChannelSet::new(
            vec!["a".into(), "b".into()],
            vec![
                random_channel(2, 2, 2, &mut rng),
                random_channel(2, 2, 2, &mut rng),
            ],
        )
        .unwrap();
        let pairs: Vec<(Vec<usize>, Vec<usize>)> = (0..3)
            .map(|_| {
                (
                    random_permutation(3, &mut rng),
                    random_permutation(2, &mut rng),
                )
            })
            .collect();
        let combined = avqc_code_from_compound(&code, &pairs).unwrap();
        assert_eq!(combined.entanglement_dim(), 2 * 3);

        // Exact identity: combined error on a word = mean of variant errors.
        let word_digits = [0usize, 1, 0];
        let word: Vec<&crate::channels::Channel> =
            word_digits.iter().map(|&s| set.get(s)).collect();
        let combined_probs = combined.success_probabilities(&word).unwrap();
        let mut mean = vec![0.0f64; 2];
        for (sigma, alpha) in &pairs {
            let variant = permuted_code(&code, sigma, alpha).unwrap();
            for (m, p) in variant
                .success_probabilities(&word)
                .unwrap()
                .iter()
                .enumerate()
            {
                mean[m] += p / pairs.len() as f64;
            }
        }
        for (x, y) in combined_probs.iter().zip(&mean) {
            assert!((x - y).abs() <= 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn single_identity_pair_reproduces_original() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let code = random_toy_code(2, 2, 2, 2, 2, 2, &mut rng).unwrap();
        let set = ChannelSet::new(
            vec!["a".into(), "b".into()],
            vec![
                random_channel(2, 2, 2, &mut rng),
                random_channel(2, 2, 2, &mut rng),
            ],
        )
        .unwrap();
        let combined =
            avqc_code_from_compound(&code, &[(vec![0, 1], vec![0, 1])]).unwrap();
        let a = evaluate_code_avqc(&code, &set).unwrap();
        let b = evaluate_code_avqc(&combined, &set).unwrap();
        assert!((a.average - b.average).abs() <= 1e-10);
        assert!((a.maximal - b.maximal).abs() <= 1e-10);
        assert_eq!(a.worst_index, b.worst_index);
    }
}
