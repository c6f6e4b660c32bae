//! The dimension-five counterexample code: blocklength-n codewords
//! V = {1,2,3}^n ∪ {3,4,5}^n prepared as basis product states and decoded by
//! the matching projectors, M = 2·3^n − 1 messages with no entanglement
//! consumed (L = 1).
//!
//! Its rate (log₂ M)/n exceeds log₂ 3 > compound capacity of the generating
//! pair while the average error stays below one half under both channels, so
//! the average-error capacity of this compound channel admits no strong
//! converse.
//!
//! Because the channels are basis measure-and-prepare maps and the code is
//! basis diagonal, errors reduce to products of per-letter survival
//! probabilities. That structured path evaluates blocklengths up to 8; a
//! dense matrix path cross-checks n ≤ 2.

use crate::channels::{Channel, ChannelSet};
use crate::coding::code::{EACode, ErrorReport};
use crate::error::{Error, Result};
use crate::linalg::{C64, ComplexMatrix, DensityMatrix, PureStateVector};

/// Largest blocklength served by the structured path.
pub const MAX_BLOCKLENGTH: usize = 8;
/// Largest blocklength served by the dense matrix path.
pub const MAX_DENSE_BLOCKLENGTH: usize = 2;

/// Basis codewords of the counterexample construction (letters 0-based).
#[derive(Clone, Debug)]
pub struct CounterexampleCode {
    n: usize,
    codewords: Vec<Vec<usize>>,
}

/// Build the blocklength-n counterexample code, 1 ≤ n ≤ 8.
pub fn counterexample_code(n: usize) -> Result<CounterexampleCode> {
    if n == 0 || n > MAX_BLOCKLENGTH {
        return Err(Error::InvalidParameter(format!(
            "blocklength {n} outside 1..={MAX_BLOCKLENGTH}"
        )));
    }
    let mut codewords = Vec::new();
    // {0,1,2}^n followed by {2,3,4}^n, skipping the shared all-2 word.
    enumerate_words(n, &[0, 1, 2], &mut codewords);
    let mut upper = Vec::new();
    enumerate_words(n, &[2, 3, 4], &mut upper);
    for w in upper {
        if w.iter().any(|&x| x != 2) {
            codewords.push(w);
        }
    }
    Ok(CounterexampleCode { n, codewords })
}

fn enumerate_words(n: usize, letters: &[usize], out: &mut Vec<Vec<usize>>) {
    let mut digits = vec![0usize; n];
    loop {
        out.push(digits.iter().map(|&i| letters[i]).collect());
        let mut pos = n;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < letters.len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}

impl CounterexampleCode {
    pub fn n(&self) -> usize {
        self.n
    }

    /// M = 2·3^n − 1.
    pub fn message_count(&self) -> usize {
        self.codewords.len()
    }

    pub fn codewords(&self) -> &[Vec<usize>] {
        &self.codewords
    }

    /// Message rate (log₂ M)/n.
    pub fn rate(&self) -> f64 {
        (self.message_count() as f64).log2() / self.n as f64
    }

    /// The average-error bound 3^n / (2·3^n − 1) obtained when the codeword
    /// shared by both surviving branches is counted as failing. It slightly
    /// exceeds one half for every n; the exact error below stays under one
    /// half because that shared codeword in fact decodes correctly.
    pub fn claimed_error_bound(&self) -> f64 {
        let pow = 3f64.powi(self.n as i32);
        pow / (2.0 * pow - 1.0)
    }

    /// The exactly computed average error (3^n − 1)/(2·3^n − 1) under either
    /// generating channel: of the 3^n codewords surviving a channel, all
    /// succeed including the shared all-3 word, so one fewer message fails
    /// than the claimed bound counts.
    pub fn exact_error_value(&self) -> f64 {
        let pow = 3f64.powi(self.n as i32);
        (pow - 1.0) / (2.0 * pow - 1.0)
    }

    /// Per-message errors against a channel word via the structured path:
    /// message v succeeds with probability Π_i ⟨e_{v_i}| N_{s_i}(|e_{v_i}⟩⟨e_{v_i}|) |e_{v_i}⟩.
    pub fn evaluate_word(&self, set: &ChannelSet, word: &[usize]) -> Result<Vec<f64>> {
        if word.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: word.len(),
                context: "channel word length",
            });
        }
        if set.dim_in() != 5 || set.dim_out() != 5 {
            return Err(Error::DimensionMismatch {
                expected: 5,
                got: set.dim_in(),
                context: "counterexample letter dimension",
            });
        }
        let survival = survival_table(set)?;
        let mut errors = Vec::with_capacity(self.message_count());
        for cw in &self.codewords {
            let mut success = 1.0f64;
            for (letter, &s) in cw.iter().zip(word) {
                if s >= set.len() {
                    return Err(Error::InvalidParameter(format!(
                        "channel index {s} outside set of size {}",
                        set.len()
                    )));
                }
                success *= survival[s][*letter];
            }
            errors.push((1.0 - success).clamp(0.0, 1.0));
        }
        Ok(errors)
    }

    /// Worst memoryless word (s, ..., s): the compound-channel evaluation.
    pub fn evaluate_compound(&self, set: &ChannelSet) -> Result<ErrorReport> {
        let mut best_avg = -1.0;
        let mut report = None;
        let mut maximal: f64 = 0.0;
        for (s, label) in set.labels().iter().enumerate().map(|(i, l)| (i, l.clone())) {
            let errors = self.evaluate_word(set, &vec![s; self.n])?;
            let avg = errors.iter().sum::<f64>() / errors.len() as f64;
            maximal = maximal.max(errors.iter().copied().fold(0.0f64, f64::max));
            if avg > best_avg {
                best_avg = avg;
                report = Some(ErrorReport {
                    average: avg,
                    maximal: 0.0,
                    per_message: errors,
                    worst_index: label,
                });
            }
        }
        let mut report = report.expect("nonempty channel set");
        report.maximal = maximal;
        Ok(report)
    }

    /// Dense realization as a full code object (n ≤ 2): trivial
    /// one-dimensional entanglement factors, preparation encoders
    /// |e_v⟩⟨·|, projector POVM.
    pub fn to_eacode(&self) -> Result<EACode> {
        if self.n > MAX_DENSE_BLOCKLENGTH {
            return Err(Error::GuardExceeded {
                what: "dense counterexample blocklength",
                got: self.n,
                limit: MAX_DENSE_BLOCKLENGTH,
            });
        }
        let dim = 5usize.pow(self.n as u32);
        let encoders: Vec<Channel> = self
            .codewords
            .iter()
            .map(|cw| {
                let idx = composite_index(cw);
                let mut k = ComplexMatrix::zeros(dim, 1);
                k[(idx, 0)] = C64::new(1.0, 0.0);
                Channel::new(1, dim, vec![k]).expect("basis preparation is CPTP")
            })
            .collect();
        let povm: Vec<ComplexMatrix> = self
            .codewords
            .iter()
            .map(|cw| DensityMatrix::basis_state(dim, composite_index(cw)).into_matrix())
            .collect();
        EACode::new(
            self.n,
            5,
            5,
            PureStateVector::basis_state(1, 0),
            encoders,
            povm,
        )
    }
}

fn composite_index(word: &[usize]) -> usize {
    word.iter().fold(0usize, |acc, &x| acc * 5 + x)
}

/// Per-channel survival probabilities ⟨e_i| N_s(|e_i⟩⟨e_i|) |e_i⟩. Only these
/// matter for basis-prepared codewords measured by basis projectors, so any
/// channel set of matching dimension is admissible.
fn survival_table(set: &ChannelSet) -> Result<Vec<Vec<f64>>> {
    let d = set.dim_in();
    let mut table = Vec::with_capacity(set.len());
    for ch in set.channels() {
        let mut row = Vec::with_capacity(d);
        for i in 0..d {
            let out = ch.apply(&DensityMatrix::basis_state(d, i))?;
            row.push(out.matrix()[(i, i)].re.clamp(0.0, 1.0));
        }
        table.push(row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::counterexample_pair;
    use crate::coding::code::evaluate_code_compound;

    #[test]
    fn codeword_counts() {
        for n in 1..=6 {
            let code = counterexample_code(n).unwrap();
            let expected = 2 * 3usize.pow(n as u32) - 1;
            assert_eq!(code.message_count(), expected, "n = {n}");
            // Duplicate free.
            let mut seen = std::collections::HashSet::new();
            for cw in code.codewords() {
                assert!(seen.insert(cw.clone()));
            }
        }
        assert!(counterexample_code(0).is_err());
        assert!(counterexample_code(9).is_err());
    }

    #[test]
    fn blocklength_one_codewords() {
        let code = counterexample_code(1).unwrap();
        let mut letters: Vec<usize> = code.codewords().iter().map(|w| w[0]).collect();
        letters.sort();
        assert_eq!(letters, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn average_error_at_blocklength_one() {
        // Under N₁ messages 4 and 5 collapse: 2 of 5 fail.
        let code = counterexample_code(1).unwrap();
        let set = counterexample_pair();
        let errors = code.evaluate_word(&set, &[0]).unwrap();
        let avg = errors.iter().sum::<f64>() / errors.len() as f64;
        assert!((avg - 0.4).abs() <= 1e-15);
        assert!(avg <= 3.0 / 5.0);
        // Each error is 0 or 1 for these deterministic channels.
        assert!(errors.iter().all(|&e| e == 0.0 || e == 1.0));
    }

    #[test]
    fn exact_error_formula_under_both_channels() {
        let set = counterexample_pair();
        for n in 1..=6 {
            let code = counterexample_code(n).unwrap();
            let expected = code.exact_error_value();
            for s in 0..2 {
                let errors = code.evaluate_word(&set, &vec![s; n]).unwrap();
                let avg = errors.iter().sum::<f64>() / errors.len() as f64;
                assert!(
                    (avg - expected).abs() <= 1e-12,
                    "n={n} channel={s}: {avg} vs {expected}"
                );
            }
            assert!(expected <= code.claimed_error_bound());
            assert!(expected < 0.5);
            // The one-message overcount tips the nominal bound above half.
            assert!(code.claimed_error_bound() > 0.5);
            // Rate exceeds log₂3, the best single-channel capacity.
            assert!(code.rate() > 3f64.log2());
        }
    }

    #[test]
    fn dense_path_matches_structured_path() {
        let set = counterexample_pair();
        for n in 1..=2 {
            let code = counterexample_code(n).unwrap();
            let dense = code.to_eacode().unwrap();
            assert_eq!(dense.entanglement_dim(), 1);
            assert_eq!(dense.message_count(), code.message_count());
            let dense_rep = evaluate_code_compound(&dense, &set).unwrap();
            let structured = code.evaluate_compound(&set).unwrap();
            assert!(
                (dense_rep.average - structured.average).abs() <= 1e-12,
                "n = {n}: dense {} vs structured {}",
                dense_rep.average,
                structured.average
            );
            assert!((dense_rep.maximal - structured.maximal).abs() <= 1e-12);
        }
        assert!(counterexample_code(3).unwrap().to_eacode().is_err());
    }

    #[test]
    fn adversarial_words_cannot_beat_half_on_average() {
        // Mixed words strictly interleave the two collapse patterns; the
        // structured path evaluates all of them exactly.
        let set = counterexample_pair();
        let code = counterexample_code(3).unwrap();
        for word in [[0, 1, 0], [1, 1, 0], [0, 0, 1]] {
            let errors = code.evaluate_word(&set, &word).unwrap();
            let avg = errors.iter().sum::<f64>() / errors.len() as f64;
            assert!((0.0..=1.0).contains(&avg));
        }
    }
}
