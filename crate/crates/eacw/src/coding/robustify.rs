//! The robustification device: an i.i.d. average guarantee per type implies
//! a permutation-average guarantee for every fixed word, at the cost of a
//! polynomial factor (n+1)^{|S|} in the slack.

use crate::coding::types::{enumerate_types, type_of};
use crate::error::{Error, Result};

/// Word-count guard for the exhaustive checks.
pub const ROBUSTIFY_WORD_GUARD: usize = 100_000;
/// Blocklength guard; permutation averages are orbit sums over types.
pub const ROBUSTIFY_MAX_N: usize = 8;

/// Outcome of checking the implication on one table f: S^n → [0,1].
#[derive(Clone, Debug)]
pub struct RobustificationReport {
    pub gamma: f64,
    /// Whether Σ f(s^n)·Πq(sᵢ) ≥ 1−γ for every type q of S^n.
    pub hypothesis_holds: bool,
    /// Whether the permutation average of f at every word is ≥ 1−(n+1)^{|S|}γ.
    pub conclusion_holds: bool,
    /// min over types of the i.i.d. average Σ f·q^n.
    pub lhs_min: f64,
    /// min over words of the permutation average of f.
    pub perm_avg_min: f64,
    /// 1 − (n+1)^{|S|}·γ.
    pub threshold: f64,
}

impl RobustificationReport {
    /// The implication itself: hypothesis ⇒ conclusion.
    pub fn implication_ok(&self) -> bool {
        !self.hypothesis_holds || self.conclusion_holds
    }
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

fn word_at(mut idx: usize, s: usize, n: usize) -> Vec<usize> {
    let mut word = vec![0usize; n];
    for pos in (0..n).rev() {
        word[pos] = idx % s;
        idx /= s;
    }
    word
}

/// Check both sides of the robustification implication for a table `f`
/// (indexed by the base-s word value, most significant letter first) at a
/// given slack γ.
///
/// The hypothesis sweeps every type q of sequences in S^n exactly; the
/// conclusion uses the orbit decomposition: the permutation average of f at
/// a word equals the plain mean of f over the word's type class, so one mean
/// per type covers all |S|^n words without touching n! permutations.
pub fn robustification_check(
    f: &[f64],
    s: usize,
    n: usize,
    gamma: f64,
) -> Result<RobustificationReport> {
    if n == 0 || n > ROBUSTIFY_MAX_N {
        return Err(Error::InvalidParameter(format!(
            "blocklength {n} outside 1..={ROBUSTIFY_MAX_N}"
        )));
    }
    let words = s.checked_pow(n as u32).filter(|&w| w <= ROBUSTIFY_WORD_GUARD);
    let word_count = words.ok_or(Error::GuardExceeded {
        what: "word count |S|^n",
        got: usize::MAX,
        limit: ROBUSTIFY_WORD_GUARD,
    })?;
    if f.len() != word_count {
        return Err(Error::DimensionMismatch {
            expected: word_count,
            got: f.len(),
            context: "robustification table length",
        });
    }
    if f.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(Error::InvalidParameter(
            "table values must lie in [0,1]".into(),
        ));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter("γ must lie in [0,1]".into()));
    }

    let types = enumerate_types(n, s)?;

    // Hypothesis: i.i.d. average under each type's empirical distribution.
    let mut lhs_min = f64::INFINITY;
    for ty in &types {
        let q: Vec<f64> = ty.counts().iter().map(|&c| c as f64 / n as f64).collect();
        let avg = kahan_sum((0..word_count).map(|idx| {
            let word = word_at(idx, s, n);
            let weight: f64 = word.iter().map(|&a| q[a]).product();
            f[idx] * weight
        }));
        lhs_min = lhs_min.min(avg);
    }

    // Conclusion: per-type orbit means.
    let mut perm_avg_min = f64::INFINITY;
    let mut orbit_mean = std::collections::HashMap::new();
    for idx in 0..word_count {
        let word = word_at(idx, s, n);
        let counts = type_of(&word, s);
        let entry = orbit_mean.entry(counts).or_insert((0.0f64, 0usize));
        entry.0 += f[idx];
        entry.1 += 1;
    }
    for (mean_sum, count) in orbit_mean.values() {
        perm_avg_min = perm_avg_min.min(mean_sum / *count as f64);
    }

    let factor = ((n + 1) as f64).powi(s as i32);
    let threshold = 1.0 - factor * gamma;
    Ok(RobustificationReport {
        gamma,
        hypothesis_holds: lhs_min >= 1.0 - gamma - 1e-12,
        conclusion_holds: perm_avg_min >= threshold - 1e-12,
        lhs_min,
        perm_avg_min,
        threshold,
    })
}

/// Sweep seeded random tables: for each trial take the tightest γ making the
/// hypothesis true (γ* = 1 − lhs_min) and verify the conclusion at that γ.
/// Returns the number of implication failures (expected zero).
pub fn robustification_sweep(
    s: usize,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<RobustificationSweep> {
    let mut failures = 0usize;
    let mut worst_margin = f64::INFINITY;
    for trial in 0..trials {
        let mut rng = crate::rng::task_rng(seed, trial as u64);
        let word_count = s.pow(n as u32);
        let f: Vec<f64> = (0..word_count)
            .map(|_| rand::Rng::gen_range(&mut rng, 0.0..=1.0))
            .collect();
        let probe = robustification_check(&f, s, n, 0.0)?;
        let gamma_star = (1.0 - probe.lhs_min).clamp(0.0, 1.0);
        let report = robustification_check(&f, s, n, gamma_star)?;
        let margin = report.perm_avg_min - report.threshold;
        worst_margin = worst_margin.min(margin);
        if report.hypothesis_holds && !report.conclusion_holds {
            failures += 1;
        }
    }
    Ok(RobustificationSweep {
        trials,
        failures,
        worst_margin,
    })
}

#[derive(Clone, Debug)]
pub struct RobustificationSweep {
    pub trials: usize,
    pub failures: usize,
    /// Smallest observed conclusion margin (permutation average minus
    /// threshold) across trials.
    pub worst_margin: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_one_table() {
        let n = 3;
        let f = vec![1.0; 8];
        let rep = robustification_check(&f, 2, n, 0.0).unwrap();
        assert!(rep.hypothesis_holds);
        assert!(rep.conclusion_holds);
        assert!((rep.lhs_min - 1.0).abs() <= 1e-12);
        assert!((rep.perm_avg_min - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn symmetric_table_conclusion_equals_value() {
        // f depending only on the type: the permutation average is f itself.
        let (s, n) = (2usize, 4usize);
        let f: Vec<f64> = (0..s.pow(n as u32))
            .map(|idx| {
                let word = word_at(idx, s, n);
                let ones = word.iter().sum::<usize>();
                0.8 + 0.05 * ones as f64
            })
            .collect();
        let rep = robustification_check(&f, s, n, 0.2).unwrap();
        // Orbit means coincide with the table values, so the conclusion
        // minimum is the smallest table value.
        assert!((rep.perm_avg_min - 0.8).abs() <= 1e-12);
    }

    #[test]
    fn hypothesis_uses_all_types() {
        // A table that is perfect on mixed-type words but bad on the all-one
        // word fails the hypothesis through the degenerate type q = (0, 1).
        let (s, n) = (2usize, 2usize);
        let mut f = vec![1.0; 4];
        f[3] = 0.0; // word (1,1)
        let rep = robustification_check(&f, s, n, 0.1).unwrap();
        assert!(!rep.hypothesis_holds);
        assert!((rep.lhs_min - 0.0).abs() <= 1e-12);
    }

    #[test]
    fn random_sweep_has_no_counterexamples() {
        for n in 2..=6 {
            let sweep = robustification_sweep(2, n, 300, 7).unwrap();
            assert_eq!(sweep.failures, 0, "n = {n}");
        }
    }

    #[test]
    fn input_validation() {
        assert!(robustification_check(&[0.5; 4], 2, 2, 1.5).is_err());
        assert!(robustification_check(&[0.5; 3], 2, 2, 0.1).is_err());
        assert!(robustification_check(&[1.5; 4], 2, 2, 0.1).is_err());
        assert!(robustification_check(&[0.5; 512], 2, 9, 0.1).is_err());
    }
}
