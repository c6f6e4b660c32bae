//! Channel distance geometry: diamond-norm estimates for channel differences
//! and the induced Hausdorff distance between channel sets.

use crate::channels::{Channel, ChannelSet, apply_kraus_to_factor};
use crate::error::{Error, Result};
use crate::linalg::{C64, ComplexMatrix, PureStateVector, hermitian_eig};
use crate::rng::{random_pure_state, task_rng};
use crate::threads;
use rayon::prelude::*;

/// Configuration for the multistart diamond-norm ascent.
#[derive(Clone, Debug)]
pub struct DiamondConfig {
    /// Seeded random starting states in addition to the maximally entangled one.
    pub starts: usize,
    /// Seesaw iterations per start.
    pub max_iter: usize,
    /// Stop when the objective improves by less than this.
    pub tol: f64,
    /// Acceptable upper-minus-lower interval width.
    pub gap_tol: f64,
    pub seed: u64,
}

impl Default for DiamondConfig {
    fn default() -> Self {
        Self {
            starts: 12,
            max_iter: 200,
            tol: 1e-10,
            gap_tol: 1e-3,
            seed: 0,
        }
    }
}

impl DiamondConfig {
    pub fn seeded(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// Two-sided diamond-norm estimate for a channel difference.
///
/// `lower` is attained by `witness` and is exact up to the quality of the
/// multistart ascent; `upper` is the trace norm of the (unnormalized) Choi
/// difference, a valid but coarse relaxation.
#[derive(Clone, Debug)]
pub struct DiamondEstimate {
    pub lower: f64,
    pub upper: f64,
    /// Pure input on reference ⊗ input attaining `lower`; the reference factor
    /// carries the identity.
    pub witness: PureStateVector,
}

impl DiamondEstimate {
    /// Whether the enclosure is tight enough for the configured tolerance.
    pub fn is_tight(&self, cfg: &DiamondConfig) -> bool {
        self.upper - self.lower <= cfg.gap_tol
    }
}

/// Trace norm of (id ⊗ (N−M)) applied to a pure input on reference ⊗ input.
///
/// N−M is Hermiticity preserving, so the evaluated operator is Hermitian and
/// the trace norm reduces to the absolute eigenvalue sum.
pub fn evaluate_diamond_witness(
    n: &Channel,
    m: &Channel,
    witness: &PureStateVector,
) -> Result<f64> {
    let evaluated = apply_difference(n, m, witness)?;
    let (vals, _) = hermitian_eig(&evaluated)?;
    Ok(vals.iter().map(|v| v.abs()).sum())
}

fn apply_difference(n: &Channel, m: &Channel, psi: &PureStateVector) -> Result<ComplexMatrix> {
    let din = n.dim_in();
    let dref = psi.dim() / din;
    if dref * din != psi.dim() {
        return Err(Error::DimensionMismatch {
            expected: din,
            got: psi.dim(),
            context: "diamond witness factor layout",
        });
    }
    let proj = psi.projector();
    let dims = [dref, din];
    let out_n = apply_kraus_to_factor(&proj, &dims, 1, n.kraus());
    let out_m = apply_kraus_to_factor(&proj, &dims, 1, m.kraus());
    let mut diff = out_n.sub(&out_m);
    diff.symmetrize();
    Ok(diff)
}

/// Diamond-norm estimate of ‖N − M‖_◊.
///
/// The lower bound maximizes ‖(id ⊗ (N−M))(|ψ⟩⟨ψ|)‖₁ over pure inputs with a
/// reference of dimension equal to the channel input dimension; a reference
/// that large is sufficient to attain the diamond-norm supremum, so the only
/// looseness is the quality of the ascent. Each start alternates between the
/// optimal distinguishing observable (the sign of the evaluated operator) and
/// the top eigenvector of the pulled-back observable, which is monotone in
/// the objective. The upper bound is the trace norm of the Choi difference —
/// coarse, and reported as such via [`DiamondEstimate::is_tight`].
pub fn diamond_norm_diff(n: &Channel, m: &Channel, cfg: &DiamondConfig) -> Result<DiamondEstimate> {
    if n.dim_in() != m.dim_in() || n.dim_out() != m.dim_out() {
        return Err(Error::DimensionMismatch {
            expected: n.dim_in(),
            got: m.dim_in(),
            context: "diamond norm channel dimensions",
        });
    }
    let din = n.dim_in();
    let total = din * din;
    let mut starts: Vec<PureStateVector> = vec![PureStateVector::maximally_entangled(din)];
    for i in 0..cfg.starts {
        let mut rng = task_rng(cfg.seed, i as u64);
        starts.push(random_pure_state(total, &mut rng));
    }
    let refined: Vec<(f64, PureStateVector)> = threads::pool().install(|| {
        starts
            .par_iter()
            .map(|psi| seesaw(n, m, psi, cfg))
            .collect::<Result<Vec<_>>>()
    })?;
    let (lower, witness) = refined
        .into_iter()
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal))
        .expect("at least one start");

    let upper = crate::linalg::trace_norm(&n.choi().sub(&m.choi()))?;
    Ok(DiamondEstimate {
        lower,
        upper: upper.max(lower),
        witness,
    })
}

fn seesaw(
    n: &Channel,
    m: &Channel,
    start: &PureStateVector,
    cfg: &DiamondConfig,
) -> Result<(f64, PureStateVector)> {
    let din = n.dim_in();
    let dout = n.dim_out();
    let mut psi = start.clone();
    let mut value = 0.0f64;
    let kraus_n_dag: Vec<ComplexMatrix> = n.kraus().iter().map(|k| k.dagger()).collect();
    let kraus_m_dag: Vec<ComplexMatrix> = m.kraus().iter().map(|k| k.dagger()).collect();
    for _ in 0..cfg.max_iter {
        let x = apply_difference(n, m, &psi)?;
        let (vals, vecs) = hermitian_eig(&x)?;
        let new_value: f64 = vals.iter().map(|v| v.abs()).sum();
        let improved = new_value > value + cfg.tol;
        value = value.max(new_value);
        if !improved && value > 0.0 {
            break;
        }
        // Optimal observable W = sign(X); pull it back through the adjoint
        // difference and move ψ to the top eigenvector.
        let dim = x.rows();
        let mut w = ComplexMatrix::zeros(dim, dim);
        for (idx, &l) in vals.iter().enumerate() {
            let col: Vec<C64> = (0..dim).map(|r| vecs[(r, idx)]).collect();
            w.add_assign_scaled(&ComplexMatrix::outer(&col, &col), C64::new(l.signum(), 0.0));
        }
        let dims_out = [din, dout];
        let pulled_n = apply_kraus_to_factor(&w, &dims_out, 1, &kraus_n_dag);
        let pulled_m = apply_kraus_to_factor(&w, &dims_out, 1, &kraus_m_dag);
        let mut y = pulled_n.sub(&pulled_m);
        y.symmetrize();
        let (_, yvecs) = hermitian_eig(&y)?;
        let top: Vec<C64> = (0..din * din).map(|r| yvecs[(r, 0)]).collect();
        psi = PureStateVector::normalized(top)?;
    }
    let final_value = evaluate_diamond_witness(n, m, &psi)?;
    Ok((final_value.max(value), psi))
}

/// Hausdorff distance between finite channel sets under the diamond norm:
/// max of the two directed sup-inf distances, each pair estimated by the
/// multistart lower bound.
pub fn hausdorff_distance(a: &ChannelSet, b: &ChannelSet, cfg: &DiamondConfig) -> Result<f64> {
    if a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out() {
        return Err(Error::DimensionMismatch {
            expected: a.dim_in(),
            got: b.dim_in(),
            context: "Hausdorff distance set dimensions",
        });
    }
    let mut pairwise = vec![vec![0.0f64; b.len()]; a.len()];
    for (i, row) in pairwise.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = diamond_norm_diff(a.get(i), b.get(j), cfg)?.lower;
        }
    }
    let dir_ab = (0..a.len())
        .map(|i| {
            (0..b.len())
                .map(|j| pairwise[i][j])
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0f64, f64::max);
    let dir_ba = (0..b.len())
        .map(|j| {
            (0..a.len())
                .map(|i| pairwise[i][j])
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0f64, f64::max);
    Ok(dir_ab.max(dir_ba))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::counterexample_pair;
    use crate::linalg::trace_norm;
    use crate::rng::{random_channel, random_density_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> DiamondConfig {
        DiamondConfig::seeded(11)
    }

    #[test]
    fn identical_channels_have_zero_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = random_channel(2, 2, 2, &mut rng);
        let est = diamond_norm_diff(&ch, &ch, &cfg()).unwrap();
        assert!(est.lower.abs() <= 1e-10);
        assert!(est.upper.abs() <= 1e-9);
    }

    #[test]
    fn orthogonal_preparations_reach_two() {
        // Constant channels with orthogonal pure outputs: distance 2.
        let prep = |i: usize| {
            let kraus = (0..2)
                .map(|j| {
                    let mut k = ComplexMatrix::zeros(2, 2);
                    k[(i, j)] = C64::new(1.0, 0.0);
                    k
                })
                .collect();
            Channel::new(2, 2, kraus).unwrap()
        };
        let est = diamond_norm_diff(&prep(0), &prep(1), &cfg()).unwrap();
        assert!((est.lower - 2.0).abs() <= 1e-9, "lower {}", est.lower);
        assert!(est.upper >= est.lower - 1e-7);
    }

    #[test]
    fn witness_reproduces_lower() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = random_channel(2, 2, 2, &mut rng);
        let m = random_channel(2, 2, 2, &mut rng);
        let est = diamond_norm_diff(&n, &m, &cfg()).unwrap();
        let replay = evaluate_diamond_witness(&n, &m, &est.witness).unwrap();
        assert!((replay - est.lower).abs() <= 1e-9);
        assert!(est.lower >= 0.0 && est.lower <= est.upper + 1e-7);
    }

    #[test]
    fn lower_dominates_output_trace_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = random_channel(2, 2, 2, &mut rng);
        let m = random_channel(2, 2, 2, &mut rng);
        let est = diamond_norm_diff(&n, &m, &cfg()).unwrap();
        for _ in 0..20 {
            let rho = random_density_matrix(2, &mut rng);
            let out_dist = trace_norm(
                &n.apply(&rho).unwrap().matrix().sub(m.apply(&rho).unwrap().matrix()),
            )
            .unwrap();
            assert!(est.lower >= out_dist - 1e-9);
        }
    }

    #[test]
    fn identity_vs_fully_depolarizing_matches_sampling_oracle() {
        // Oracle: many seeded pure states followed by local refinement.
        let id = Channel::identity(2);
        let dep = Channel::depolarizing(1.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut best = 0.0f64;
        let mut best_psi = PureStateVector::maximally_entangled(2);
        for _ in 0..100_000 {
            let psi = random_pure_state(4, &mut rng);
            let v = evaluate_diamond_witness(&id, &dep, &psi).unwrap();
            if v > best {
                best = v;
                best_psi = psi;
            }
        }
        let (refined, _) = seesaw(&id, &dep, &best_psi, &cfg()).unwrap();
        let oracle = best.max(refined);

        let est = diamond_norm_diff(&id, &dep, &cfg()).unwrap();
        assert!(
            (est.lower - oracle).abs() <= 1e-4,
            "estimate {} vs oracle {oracle}",
            est.lower
        );
        // Known value for this pair: 2(1 - 1/d²) = 3/2.
        assert!((est.lower - 1.5).abs() <= 1e-6, "lower {}", est.lower);
    }

    #[test]
    fn hausdorff_cases() {
        let set = counterexample_pair();
        let d = hausdorff_distance(&set, &set, &cfg()).unwrap();
        assert!(d.abs() <= 1e-9);

        // Adding a duplicate member does not change the distance.
        let bigger = ChannelSet::new(
            vec!["N1".into(), "N2".into(), "N1again".into()],
            vec![set.get(0).clone(), set.get(1).clone(), set.get(0).clone()],
        )
        .unwrap();
        let d = hausdorff_distance(&set, &bigger, &cfg()).unwrap();
        assert!(d.abs() <= 1e-9);
    }

    #[test]
    fn hausdorff_symmetry_and_triangle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let sets: Vec<ChannelSet> = (0..3)
            .map(|i| ChannelSet::singleton(format!("s{i}"), random_channel(2, 2, 2, &mut rng)))
            .collect();
        let c = cfg();
        let dab = hausdorff_distance(&sets[0], &sets[1], &c).unwrap();
        let dba = hausdorff_distance(&sets[1], &sets[0], &c).unwrap();
        assert!((dab - dba).abs() <= 1e-9);
        let dbc = hausdorff_distance(&sets[1], &sets[2], &c).unwrap();
        let dac = hausdorff_distance(&sets[0], &sets[2], &c).unwrap();
        assert!(dac <= dab + dbc + 1e-6, "triangle: {dac} vs {dab}+{dbc}");
    }

    #[test]
    fn depolarized_images_unroll_to_pairwise_distances() {
        let set = counterexample_pair();
        let smoothed: Vec<Channel> = set
            .channels()
            .iter()
            .map(|ch| {
                // D_γ ∘ N via mixing the channel with the fully depolarizing one.
                let pair = ChannelSet::new(
                    vec!["ch".into(), "noise".into()],
                    vec![ch.clone(), Channel::depolarizing(1.0, 5).unwrap()],
                )
                .unwrap();
                Channel::mix(&pair, &[0.9, 0.1]).unwrap()
            })
            .collect();
        let image = ChannelSet::new(vec!["D1".into(), "D2".into()], smoothed).unwrap();
        let c = cfg();
        let d = hausdorff_distance(&set, &image, &c).unwrap();
        let mut per_channel = vec![f64::INFINITY; 2];
        for i in 0..2 {
            for j in 0..2 {
                let l = diamond_norm_diff(set.get(i), image.get(j), &c).unwrap().lower;
                per_channel[i] = per_channel[i].min(l);
            }
        }
        let expected = per_channel.iter().copied().fold(0.0f64, f64::max);
        assert!((d - expected).abs() <= 1e-6, "{d} vs {expected}");
    }
}
