//! Random-codebook search with the pretty-good (square-root) measurement:
//! a desk-scale constructive stand-in for random-coding existence arguments
//! over classical-quantum channels.

use crate::channels::{CqChannel, dim_guard};
use crate::coding::code::{ErrorReport, matrix_inverse_sqrt};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::rng::task_rng;
use rand::Rng;

/// A classical-quantum codebook with its decoding POVM on K^{⊗n}.
#[derive(Clone, Debug)]
pub struct CqCode {
    pub codewords: Vec<Vec<usize>>,
    pub povm: Vec<ComplexMatrix>,
}

/// Draw `messages` codewords i.i.d. from the input distribution `p`, decode
/// with the square-root measurement built from the codeword output states,
/// and report the exact decoding errors under W^{⊗n}.
pub fn pgm_code_search(
    w: &CqChannel,
    n: usize,
    messages: usize,
    p: &[f64],
    seed: u64,
) -> Result<(CqCode, ErrorReport)> {
    if messages == 0 || n == 0 {
        return Err(Error::InvalidParameter(
            "need at least one message and one letter".into(),
        ));
    }
    if p.len() != w.alphabet_size() {
        return Err(Error::DimensionMismatch {
            expected: w.alphabet_size(),
            got: p.len(),
            context: "codeword input distribution",
        });
    }
    crate::linalg::validate_probability(p, 1e-10)?;
    let out_dim = w
        .dim_out()
        .checked_pow(n as u32)
        .filter(|&d| d <= dim_guard())
        .ok_or(Error::GuardExceeded {
            what: "codeword output dimension",
            got: usize::MAX,
            limit: dim_guard(),
        })?;

    let mut rng = task_rng(seed, 0);
    let cdf: Vec<f64> = p
        .iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    let mut draw_letter = || -> usize {
        let u: f64 = rng.gen_range(0.0..1.0);
        cdf.iter().position(|&c| u < c).unwrap_or(p.len() - 1)
    };
    let codewords: Vec<Vec<usize>> = (0..messages)
        .map(|_| (0..n).map(|_| draw_letter()).collect())
        .collect();

    let outputs: Vec<ComplexMatrix> = codewords
        .iter()
        .map(|cw| Ok(w.cq_apply(cw)?.into_matrix()))
        .collect::<Result<Vec<_>>>()?;
    let mut total = ComplexMatrix::zeros(out_dim, out_dim);
    for o in &outputs {
        total = total.add(o);
    }
    let inv_sqrt = matrix_inverse_sqrt(&total, 1e-12)?;
    let povm: Vec<ComplexMatrix> = outputs
        .iter()
        .map(|o| {
            let mut d = inv_sqrt.mul(o).mul(&inv_sqrt);
            d.symmetrize();
            d
        })
        .collect();

    let mut per_message = Vec::with_capacity(messages);
    for (d, o) in povm.iter().zip(&outputs) {
        let mut success = 0.0;
        for i in 0..out_dim {
            for j in 0..out_dim {
                success += (d[(i, j)] * o[(j, i)]).re;
            }
        }
        per_message.push((1.0 - success).clamp(0.0, 1.0));
    }
    let average = per_message.iter().sum::<f64>() / messages as f64;
    let maximal = per_message.iter().copied().fold(0.0f64, f64::max);
    Ok((
        CqCode { codewords, povm },
        ErrorReport {
            average,
            maximal,
            per_message,
            worst_index: "memoryless".into(),
        },
    ))
}

/// Best average error over `seeds` independent codebook draws.
pub fn pgm_best_of_seeds(
    w: &CqChannel,
    n: usize,
    messages: usize,
    p: &[f64],
    base_seed: u64,
    seeds: usize,
) -> Result<(u64, CqCode, ErrorReport)> {
    let mut best: Option<(u64, CqCode, ErrorReport)> = None;
    for i in 0..seeds {
        let seed = base_seed.wrapping_add(i as u64);
        let (code, report) = pgm_code_search(w, n, messages, p, seed)?;
        let better = best
            .as_ref()
            .map(|(_, _, b)| report.average < b.average)
            .unwrap_or(true);
        if better {
            best = Some((seed, code, report));
        }
    }
    Ok(best.expect("at least one seed"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{C64, DensityMatrix, PureStateVector, hermitian_eig};

    fn plus_state() -> DensityMatrix {
        let amps = vec![
            C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ];
        DensityMatrix::from_pure(&PureStateVector::new(amps).unwrap())
    }

    fn binary_cq() -> CqChannel {
        CqChannel::new(vec![DensityMatrix::basis_state(2, 0), plus_state()]).unwrap()
    }

    #[test]
    fn single_message_decodes_perfectly() {
        let w = binary_cq();
        let (_, report) = pgm_code_search(&w, 2, 1, &[0.5, 0.5], 1).unwrap();
        assert!(report.average <= 1e-12);
    }

    #[test]
    fn orthogonal_outputs_decode_perfectly() {
        let w = CqChannel::new(vec![
            DensityMatrix::basis_state(2, 0),
            DensityMatrix::basis_state(2, 1),
        ])
        .unwrap();
        // Find a seed where the two codewords differ (n = 1, M = 2).
        let (_, _, report) = pgm_best_of_seeds(&w, 1, 2, &[0.5, 0.5], 0, 16).unwrap();
        assert!(report.average <= 1e-12, "average {}", report.average);
    }

    #[test]
    fn povm_is_valid_and_bounded() {
        let w = binary_cq();
        let (code, _) = pgm_code_search(&w, 3, 4, &[0.5, 0.5], 7).unwrap();
        let dim = code.povm[0].rows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for d in &code.povm {
            let (vals, _) = hermitian_eig(d).unwrap();
            assert!(*vals.last().unwrap() >= -1e-10);
            assert!(vals[0] <= 1.0 + 1e-9);
            sum = sum.add(d);
        }
        let (vals, _) = hermitian_eig(&sum).unwrap();
        assert!(vals[0] <= 1.0 + 1e-9, "POVM sum exceeds identity");
    }

    #[test]
    fn best_seed_beats_quarter_on_nonorthogonal_pair() {
        // Threshold frozen from a pre-registered run of this exact search.
        let w = binary_cq();
        let (_, _, report) = pgm_best_of_seeds(&w, 4, 2, &[0.5, 0.5], 0, 32).unwrap();
        assert!(report.average < 0.25, "best average {}", report.average);
    }

    #[test]
    fn input_validation() {
        let w = binary_cq();
        assert!(pgm_code_search(&w, 0, 2, &[0.5, 0.5], 0).is_err());
        assert!(pgm_code_search(&w, 2, 0, &[0.5, 0.5], 0).is_err());
        assert!(pgm_code_search(&w, 2, 2, &[0.9, 0.9], 0).is_err());
        assert!(pgm_code_search(&w, 30, 2, &[0.5, 0.5], 0).is_err());
    }
}
