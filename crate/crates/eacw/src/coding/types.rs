//! Frequency types of sequences in [d]^k and their sequence classes.

use crate::error::{Error, Result};

/// Enumeration guard: sequence spaces larger than this are rejected.
pub const TYPE_ENUMERATION_GUARD: usize = 1_000_000;

/// A frequency type λ of sequences of length `k` over an alphabet of size
/// `d`: the letter counts, the sequence class T_λ^k, and its size d_λ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeClass {
    k: usize,
    d: usize,
    counts: Vec<usize>,
}

impl TypeClass {
    pub fn new(k: usize, d: usize, counts: Vec<usize>) -> Result<Self> {
        if counts.len() != d || counts.iter().sum::<usize>() != k {
            return Err(Error::InvalidParameter(format!(
                "counts {counts:?} are not a type of [{d}]^{k}"
            )));
        }
        Ok(Self { k, d, counts })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alphabet(&self) -> usize {
        self.d
    }

    /// Letter counts k·λ(a).
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// |T_λ^k| = k! / Π counts!, the dimension of the typical block.
    pub fn dimension(&self) -> usize {
        let mut num: u128 = 1;
        let mut denom: u128 = 1;
        let mut placed = 0usize;
        for &c in &self.counts {
            for i in 1..=c {
                num *= (placed + i) as u128;
                denom *= i as u128;
            }
            placed += c;
        }
        (num / denom) as usize
    }

    /// All sequences of this type, each as base-d digits, in lexicographic
    /// order. Their composite indices Σ xᵢ·d^(k-1-i) index the typical block
    /// inside the product basis.
    pub fn sequences(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.dimension());
        let mut current = Vec::with_capacity(self.k);
        let mut remaining = self.counts.clone();
        fn recurse(
            current: &mut Vec<usize>,
            remaining: &mut [usize],
            k: usize,
            out: &mut Vec<Vec<usize>>,
        ) {
            if current.len() == k {
                out.push(current.clone());
                return;
            }
            for letter in 0..remaining.len() {
                if remaining[letter] == 0 {
                    continue;
                }
                remaining[letter] -= 1;
                current.push(letter);
                recurse(current, remaining, k, out);
                current.pop();
                remaining[letter] += 1;
            }
        }
        recurse(&mut current, &mut remaining, self.k, &mut out);
        out
    }

    /// Probability α^k(T_λ^k) = Σ_{i^k ∈ T_λ} Π αᵢ = d_λ · Π α_a^{counts_a}
    /// of the whole class under an i.i.d. distribution α.
    pub fn class_probability(&self, alpha: &[f64]) -> f64 {
        assert_eq!(alpha.len(), self.d);
        let mut per_sequence = 1.0f64;
        for (a, &c) in self.counts.iter().enumerate() {
            per_sequence *= alpha[a].powi(c as i32);
        }
        self.dimension() as f64 * per_sequence
    }
}

/// The type (letter counts) of one sequence.
pub fn type_of(word: &[usize], d: usize) -> Vec<usize> {
    let mut counts = vec![0usize; d];
    for &x in word {
        counts[x] += 1;
    }
    counts
}

/// All types of sequences in [d]^k, in lexicographic count order.
/// Complete and duplicate free; block dimensions sum to d^k and the number
/// of types is at most (k+1)^d.
pub fn enumerate_types(k: usize, d: usize) -> Result<Vec<TypeClass>> {
    if d == 0 || k == 0 {
        return Err(Error::InvalidParameter(
            "type enumeration needs k ≥ 1 and d ≥ 1".into(),
        ));
    }
    let space = (d as f64).powi(k as i32);
    if space > TYPE_ENUMERATION_GUARD as f64 {
        return Err(Error::GuardExceeded {
            what: "sequence space d^k",
            got: space as usize,
            limit: TYPE_ENUMERATION_GUARD,
        });
    }
    let mut out = Vec::new();
    let mut counts = vec![0usize; d];
    fn recurse(
        counts: &mut Vec<usize>,
        letter: usize,
        left: usize,
        k: usize,
        d: usize,
        out: &mut Vec<TypeClass>,
    ) {
        if letter == d - 1 {
            counts[letter] = left;
            out.push(TypeClass::new(k, d, counts.clone()).expect("counts sum to k"));
            counts[letter] = 0;
            return;
        }
        for c in 0..=left {
            counts[letter] = c;
            recurse(counts, letter + 1, left - c, k, d, out);
        }
        counts[letter] = 0;
    }
    recurse(&mut counts, 0, k, k, d, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_small_cases() {
        let t = enumerate_types(1, 2).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.iter().all(|ty| ty.dimension() == 1));

        let t = enumerate_types(2, 2).unwrap();
        let dims: Vec<usize> = t.iter().map(|ty| ty.dimension()).collect();
        let mut sorted = dims.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 1, 2]);
        assert_eq!(dims.iter().sum::<usize>(), 4);
    }

    #[test]
    fn dimensions_sum_to_full_space() {
        for (k, d) in [(3usize, 3usize), (4, 2), (2, 5)] {
            let types = enumerate_types(k, d).unwrap();
            let total: usize = types.iter().map(|t| t.dimension()).sum();
            assert_eq!(total, d.pow(k as u32));
            assert!(types.len() <= (k + 1).pow(d as u32));
            // Duplicate free.
            for i in 0..types.len() {
                for j in (i + 1)..types.len() {
                    assert_ne!(types[i].counts(), types[j].counts());
                }
            }
        }
    }

    #[test]
    fn sequences_match_exhaustive_enumeration() {
        let (k, d) = (3usize, 3usize);
        let types = enumerate_types(k, d).unwrap();
        for ty in &types {
            let seqs = ty.sequences();
            assert_eq!(seqs.len(), ty.dimension());
            for s in &seqs {
                assert_eq!(&type_of(s, d), ty.counts());
            }
        }
        // Every sequence in [3]^3 belongs to exactly one class.
        let total: usize = types.iter().map(|t| t.sequences().len()).sum();
        assert_eq!(total, 27);
    }

    #[test]
    fn class_probability_sums_to_one() {
        let alpha = [0.5, 0.3, 0.2];
        let types = enumerate_types(4, 3).unwrap();
        let total: f64 = types.iter().map(|t| t.class_probability(&alpha)).sum();
        assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn guard_rejects_large_spaces() {
        assert!(matches!(
            enumerate_types(30, 4),
            Err(Error::GuardExceeded { .. })
        ));
    }
}
