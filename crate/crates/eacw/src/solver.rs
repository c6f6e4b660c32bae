//! Saddle-point engine for entanglement-assisted capacities.
//!
//! The single-channel capacity is the concave maximum sup_ρ I(ρ, N) over the
//! density-matrix simplex. The compound capacity maximizes the concave
//! function min_s I(ρ, N_s); the arbitrarily-varying capacity maximizes
//! inf_p I(ρ, Ñ_p) over mixtures Ñ_p = Σ p(s) N_s, which is convex in p and
//! concave in ρ. The ascent runs exponentiated-gradient (matrix
//! multiplicative-weights) updates ρ ← exp(log ρ + η G)/tr(...) so iterates
//! stay strictly interior, with gradients taken numerically by central
//! differences in a Hermitian operator basis.
//!
//! Every result carries a certificate: for the maximizations a first-order
//! stationarity gap λ_max(G) − tr(Gρ) that upper-bounds the remaining
//! suboptimality, and for the arbitrarily-varying problem the minimax
//! residual obtained by also solving inf_p sup_ρ and differencing.

use crate::channels::{Channel, ChannelSet};
use crate::error::{Error, Result};
use crate::geometry::{self, DiamondConfig};
use crate::info::binary_entropy;
use crate::linalg::{
    C64, ComplexMatrix, DensityMatrix, entropy_of_spectrum, hermitian_eig,
};
use crate::rng::random_interior_state;
use crate::threads;
use rayon::prelude::*;

/// Central-difference step for gradients in the Hermitian operator basis.
/// Shrunk to half the smallest iterate eigenvalue when that is smaller, so
/// perturbed states stay positive semi-definite.
const GRAD_STEP: f64 = 1e-5;
/// Iterates keep all eigenvalues at or above this floor.
const EIG_FLOOR: f64 = 2e-8;
/// Channels within this much of the active minimum count as attaining.
const ACTIVE_TIE_TOL: f64 = 1e-9;
/// Window length for the plateau stopping rule.
const PLATEAU_WINDOW: usize = 25;

/// Backtracking step rule for the exponentiated-gradient ascent.
#[derive(Clone, Debug)]
pub struct StepRule {
    pub initial: f64,
    pub grow: f64,
    pub shrink: f64,
    pub min_step: f64,
}

impl Default for StepRule {
    fn default() -> Self {
        Self {
            initial: 1.0,
            grow: 1.6,
            shrink: 0.5,
            min_step: 1e-12,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Convergence tolerance in bits.
    pub tol: f64,
    /// Iteration cap per restart.
    pub max_iter: usize,
    /// Number of ascent restarts (the first starts maximally mixed).
    pub restarts: usize,
    /// Base seed for restart initializations and inner multistarts.
    pub seed: u64,
    pub step: StepRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 5000,
            restarts: 8,
            seed: 0,
            step: StepRule::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tol <= 0.0 {
            return Err(Error::InvalidParameter("tol must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("restarts must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// Converged capacity value with its optimizer and certificates.
#[derive(Clone, Debug)]
pub struct CapacityResult {
    /// Capacity estimate in bits.
    pub value: f64,
    /// Input state attaining the reported value.
    pub optimizer_state: DensityMatrix,
    /// Adversary weights: the attaining mixture over the channel set.
    pub worst_mixture: Vec<f64>,
    /// Outer ascent iterations spent (summed over directions for minimax runs).
    pub iterations: usize,
    /// Certified residual: stationarity gap, or sup-inf vs inf-sup difference.
    pub certified_gap: f64,
}

// ---------------------------------------------------------------------------
// Fast objective evaluation
// ---------------------------------------------------------------------------

/// Evaluates I(ρ, N) through the entropy-exchange identity: the joint term
/// S((N ⊗ id)Ψ) equals the entropy of the Gram matrix W_ij = tr(K_i ρ K_j†),
/// which stays (#Kraus)² instead of (dim_in·dim_out)². Agreement with the
/// purification route is pinned by tests.
pub(crate) struct ChannelEval {
    kraus: Vec<ComplexMatrix>,
    daggers: Vec<ComplexMatrix>,
}

impl ChannelEval {
    pub(crate) fn new(ch: &Channel) -> Self {
        Self {
            kraus: ch.kraus().to_vec(),
            daggers: ch.kraus().iter().map(|k| k.dagger()).collect(),
        }
    }

    /// I(ρ/tr ρ, N) in bits for a Hermitian PSD ρ.
    pub(crate) fn mi(&self, rho: &ComplexMatrix) -> f64 {
        let tr = rho.trace().re;
        let rho = rho.scale(C64::new(1.0 / tr, 0.0));
        let (vals_in, _) = hermitian_eig(&rho).expect("iterate is Hermitian");
        let s_in = entropy_of_spectrum(&vals_in).expect("iterate is PSD");

        let products: Vec<ComplexMatrix> = self.kraus.iter().map(|k| k.mul(&rho)).collect();
        let dout = self.kraus[0].rows();
        let mut out = ComplexMatrix::zeros(dout, dout);
        for (p, kd) in products.iter().zip(&self.daggers) {
            out = out.add(&p.mul(kd));
        }
        out.symmetrize();
        let (vals_out, _) = hermitian_eig(&out).expect("channel output is Hermitian");
        let s_out = entropy_of_spectrum(&vals_out).expect("channel output is PSD");

        let r = self.kraus.len();
        let mut w = ComplexMatrix::zeros(r, r);
        for i in 0..r {
            for j in 0..r {
                let mut acc = C64::new(0.0, 0.0);
                for (a, b) in products[i].data().iter().zip(self.kraus[j].data()) {
                    acc += a * b.conj();
                }
                w[(i, j)] = acc;
            }
        }
        w.symmetrize();
        let (vals_w, _) = hermitian_eig(&w).expect("Gram matrix is Hermitian");
        let s_joint = entropy_of_spectrum(&vals_w).expect("Gram matrix is PSD");

        s_in + s_out - s_joint
    }
}

fn re_trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

/// Euclidean gradient of a scalar function of ρ by central differences over
/// the orthonormal Hermitian basis {E_ii, (E_ij+E_ji)/√2, i(E_ij−E_ji)/√2}.
fn hermitian_basis_gradient(
    f: &mut impl FnMut(&ComplexMatrix) -> f64,
    rho: &ComplexMatrix,
    min_eig: f64,
) -> ComplexMatrix {
    let d = rho.rows();
    let eps = GRAD_STEP.min((min_eig * 0.5).max(1e-12));
    let inv2 = 1.0 / (2.0 * eps);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut grad = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        let mut p = rho.clone();
        p[(i, i)] += C64::new(eps, 0.0);
        let mut m = rho.clone();
        m[(i, i)] -= C64::new(eps, 0.0);
        let g = (f(&p) - f(&m)) * inv2;
        grad[(i, i)] = C64::new(g, 0.0);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut p = rho.clone();
            p[(i, j)] += C64::new(eps * s, 0.0);
            p[(j, i)] += C64::new(eps * s, 0.0);
            let mut m = rho.clone();
            m[(i, j)] -= C64::new(eps * s, 0.0);
            m[(j, i)] -= C64::new(eps * s, 0.0);
            let gx = (f(&p) - f(&m)) * inv2;

            let mut p = rho.clone();
            p[(i, j)] += C64::new(0.0, eps * s);
            p[(j, i)] -= C64::new(0.0, eps * s);
            let mut m = rho.clone();
            m[(i, j)] -= C64::new(0.0, eps * s);
            m[(j, i)] += C64::new(0.0, eps * s);
            let gy = (f(&p) - f(&m)) * inv2;

            grad[(i, j)] = C64::new(gx * s, gy * s);
            grad[(j, i)] = grad[(i, j)].conj();
        }
    }
    grad
}

// ---------------------------------------------------------------------------
// Exponentiated-gradient ascent
// ---------------------------------------------------------------------------

struct AscentOutcome {
    rho: ComplexMatrix,
    value: f64,
    iterations: usize,
    cert_gap: f64,
    converged: bool,
}

/// ρ(A) = exp(A)/tr exp(A), mixed with a sliver of the identity so the
/// smallest eigenvalue stays at or above EIG_FLOOR.
fn softmax_floored(a: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let d = a.rows();
    let (vals, vecs) = hermitian_eig(a).expect("ascent potential is Hermitian");
    let shift = vals[0];
    let mut weights: Vec<f64> = vals.iter().map(|v| (v - shift).exp()).collect();
    let z: f64 = weights.iter().sum();
    let nu = EIG_FLOOR * d as f64;
    let mut min_eig = f64::INFINITY;
    for w in &mut weights {
        *w = (1.0 - nu) * (*w / z) + nu / d as f64;
        min_eig = min_eig.min(*w);
    }
    let mut rho = ComplexMatrix::zeros(d, d);
    for (idx, &w) in weights.iter().enumerate() {
        let col: Vec<C64> = (0..d).map(|r| vecs[(r, idx)]).collect();
        rho.add_assign_scaled(&ComplexMatrix::outer(&col, &col), C64::new(w, 0.0));
    }
    rho.symmetrize();
    (rho, min_eig)
}

fn log_potential(rho: &ComplexMatrix) -> ComplexMatrix {
    let d = rho.rows();
    let (vals, vecs) = hermitian_eig(rho).expect("initial state is Hermitian");
    let logs: Vec<f64> = vals.iter().map(|v| v.max(EIG_FLOOR).ln()).collect();
    let mut a = ComplexMatrix::zeros(d, d);
    for (idx, &l) in logs.iter().enumerate() {
        let col: Vec<C64> = (0..d).map(|r| vecs[(r, idx)]).collect();
        a.add_assign_scaled(&ComplexMatrix::outer(&col, &col), C64::new(l, 0.0));
    }
    a.symmetrize();
    a
}

fn mw_maximize(
    init: &DensityMatrix,
    value_of: &mut impl FnMut(&ComplexMatrix) -> f64,
    supergrad: &mut impl FnMut(&ComplexMatrix, f64) -> ComplexMatrix,
    cfg: &SolverConfig,
) -> AscentOutcome {
    let mut a = log_potential(init.matrix());
    let (mut rho, mut min_eig) = softmax_floored(&a);
    let mut value = value_of(&rho);
    let mut eta = cfg.step.initial;
    let mut history: Vec<f64> = vec![value];
    let mut cert_gap = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iter {
        iterations += 1;
        let g = supergrad(&rho, min_eig);
        let lmax = hermitian_eig(&g).expect("gradient is Hermitian").0[0];
        cert_gap = lmax - re_trace_product(&g, &rho);
        if cert_gap <= cfg.tol {
            converged = true;
            break;
        }

        let mut accepted = false;
        while eta >= cfg.step.min_step {
            let mut a_try = a.clone();
            a_try.add_assign_scaled(&g, C64::new(eta, 0.0));
            let (rho_try, me_try) = softmax_floored(&a_try);
            let v_try = value_of(&rho_try);
            if v_try > value {
                a = a_try;
                rho = rho_try;
                min_eig = me_try;
                value = v_try;
                eta = (eta * cfg.step.grow).min(1e4);
                accepted = true;
                break;
            }
            eta *= cfg.step.shrink;
        }
        if !accepted {
            // No ascent direction at the smallest step: numerically stationary.
            converged = true;
            break;
        }
        // Keep the potential bounded; shifting by a multiple of the identity
        // does not change ρ(A).
        let shift = hermitian_eig(&a).expect("potential is Hermitian").0[0];
        for i in 0..a.rows() {
            a[(i, i)] -= C64::new(shift, 0.0);
        }
        history.push(value);
        if history.len() > PLATEAU_WINDOW {
            let prev = history[history.len() - 1 - PLATEAU_WINDOW];
            if value - prev < cfg.tol * 0.1 {
                converged = true;
                break;
            }
        }
    }
    // Report the certificate at the final iterate.
    let g = supergrad(&rho, min_eig);
    let lmax = hermitian_eig(&g).expect("gradient is Hermitian").0[0];
    cert_gap = cert_gap.min(lmax - re_trace_product(&g, &rho));
    AscentOutcome {
        rho,
        value,
        iterations,
        cert_gap,
        converged,
    }
}

/// Run one ascent per restart (restart 0 starts maximally mixed, the rest at
/// seeded random interior states) and keep the best value, breaking ties by
/// the smaller restart index so results are reproducible.
fn run_restarts<F>(dim: usize, cfg: &SolverConfig, solve: F) -> AscentOutcome
where
    F: Fn(&DensityMatrix) -> AscentOutcome + Sync,
{
    let inits: Vec<DensityMatrix> = (0..cfg.restarts)
        .map(|i| {
            if i == 0 {
                DensityMatrix::maximally_mixed(dim)
            } else {
                let mut rng = crate::rng::task_rng(cfg.seed, i as u64);
                random_interior_state(dim, &mut rng)
            }
        })
        .collect();
    let mut outcomes: Vec<(usize, AscentOutcome)> = threads::pool().install(|| {
        inits
            .par_iter()
            .enumerate()
            .map(|(i, init)| (i, solve(init)))
            .collect()
    });
    outcomes.sort_by(|(ia, a), (ib, b)| {
        b.value
            .partial_cmp(&a.value)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(ia.cmp(ib))
    });
    outcomes.into_iter().next().expect("restarts ≥ 1").1
}

fn finish(
    outcome: AscentOutcome,
    worst_mixture: Vec<f64>,
    extra_iterations: usize,
    certified_gap: f64,
) -> Result<CapacityResult> {
    let result = CapacityResult {
        value: outcome.value,
        optimizer_state: DensityMatrix::new(outcome.rho.clone())?,
        worst_mixture,
        iterations: outcome.iterations + extra_iterations,
        certified_gap,
    };
    if outcome.converged {
        Ok(result)
    } else {
        Err(Error::NonConvergence {
            iterations: result.iterations,
            best_value: result.value,
            gap: certified_gap,
            best: Box::new(result),
        })
    }
}

// ---------------------------------------------------------------------------
// Capacities
// ---------------------------------------------------------------------------

/// Entanglement-assisted classical capacity sup_ρ I(ρ, N) of a single channel.
pub fn ea_capacity_single(ch: &Channel, cfg: &SolverConfig) -> Result<CapacityResult> {
    let set = ChannelSet::singleton("channel", ch.clone());
    compound_capacity(&set, cfg)
}

/// Compound capacity sup_ρ min_s I(ρ, N_s) by supergradient ascent of the
/// concave minimum; the supergradient averages the gradients of all
/// attaining channels.
pub fn compound_capacity(set: &ChannelSet, cfg: &SolverConfig) -> Result<CapacityResult> {
    cfg.validate()?;
    let evals: Vec<ChannelEval> = set.channels().iter().map(ChannelEval::new).collect();
    let dim = set.dim_in();

    let solve = |init: &DensityMatrix| {
        let mut value_of = |rho: &ComplexMatrix| {
            evals
                .iter()
                .map(|e| e.mi(rho))
                .fold(f64::INFINITY, f64::min)
        };
        let mut supergrad = |rho: &ComplexMatrix, min_eig: f64| {
            let values: Vec<f64> = evals.iter().map(|e| e.mi(rho)).collect();
            let m = values.iter().copied().fold(f64::INFINITY, f64::min);
            let active: Vec<usize> = (0..evals.len())
                .filter(|&s| values[s] <= m + ACTIVE_TIE_TOL)
                .collect();
            let mut g = ComplexMatrix::zeros(dim, dim);
            for &s in &active {
                let gs = hermitian_basis_gradient(&mut |r| evals[s].mi(r), rho, min_eig);
                g.add_assign_scaled(&gs, C64::new(1.0 / active.len() as f64, 0.0));
            }
            g
        };
        mw_maximize(init, &mut value_of, &mut supergrad, cfg)
    };
    let outcome = run_restarts(dim, cfg, solve);

    // Attaining channels at the optimizer, as an indicator mixture.
    let values: Vec<f64> = evals.iter().map(|e| e.mi(&outcome.rho)).collect();
    let m = values.iter().copied().fold(f64::INFINITY, f64::min);
    let active: Vec<usize> = (0..evals.len())
        .filter(|&s| values[s] <= m + ACTIVE_TIE_TOL)
        .collect();
    let mut worst = vec![0.0; evals.len()];
    for &s in &active {
        worst[s] = 1.0 / active.len() as f64;
    }
    let gap = outcome.cert_gap;
    finish(outcome, worst, 0, gap)
}

/// Minimize p ↦ I(ρ, Ñ_p) over the probability simplex by projected gradient
/// with backtracking. Returns the minimizer and its value.
fn inner_mixture_min(
    set: &ChannelSet,
    rho: &ComplexMatrix,
    p_init: &[f64],
    tol: f64,
) -> (Vec<f64>, f64) {
    let n = set.len();
    if n == 1 {
        let eval = ChannelEval::new(set.get(0));
        return (vec![1.0], eval.mi(rho));
    }
    let h = |p: &[f64]| -> f64 {
        // Normalize so finite-difference probes off the simplex stay valid.
        let sum: f64 = p.iter().sum();
        let normalized: Vec<f64> = p.iter().map(|x| (x / sum).max(0.0)).collect();
        let sum2: f64 = normalized.iter().sum();
        let normalized: Vec<f64> = normalized.iter().map(|x| x / sum2).collect();
        let mixed = Channel::mix(set, &normalized).expect("normalized mixture");
        ChannelEval::new(&mixed).mi(rho)
    };
    let mut p = p_init.to_vec();
    let mut value = h(&p);
    let mut step = 0.5;
    let eps = 1e-6;
    for _ in 0..400 {
        // One-sided differences at the boundary, central in the interior.
        let mut g = vec![0.0; n];
        for i in 0..n {
            let mut plus = p.clone();
            plus[i] += eps;
            if p[i] >= eps {
                let mut minus = p.clone();
                minus[i] -= eps;
                g[i] = (h(&plus) - h(&minus)) / (2.0 * eps);
            } else {
                g[i] = (h(&plus) - value) / eps;
            }
        }
        // Frank-Wolfe gap certifies optimality of the convex minimization.
        let pg: f64 = p.iter().zip(&g).map(|(a, b)| a * b).sum();
        let gmin = g.iter().copied().fold(f64::INFINITY, f64::min);
        if pg - gmin <= tol {
            break;
        }
        let mut improved = false;
        while step >= 1e-12 {
            let trial: Vec<f64> = p.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let trial = project_simplex(&trial);
            let v_trial = h(&trial);
            if v_trial < value {
                p = trial;
                value = v_trial;
                step = (step * 1.8).min(1e3);
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (p, value)
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut css = 0.0;
    let mut tau = 0.0;
    let mut k = 0;
    for (j, &uj) in u.iter().enumerate() {
        css += uj;
        let t = (css - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            tau = t;
            k = j + 1;
        }
    }
    if k == 0 {
        return vec![1.0 / n as f64; n];
    }
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

/// Arbitrarily-varying capacity sup_ρ inf_{p} I(ρ, Ñ_p) over mixtures of the
/// generating set, with the minimax residual (inf-sup minus sup-inf) reported
/// as the certificate.
pub fn avqc_capacity(set: &ChannelSet, cfg: &SolverConfig) -> Result<CapacityResult> {
    cfg.validate()?;
    let dim = set.dim_in();
    let n = set.len();
    let inner_tol = (cfg.tol * 0.1).max(1e-10);

    // Primal direction: ascend ρ ↦ inf_p I(ρ, Ñ_p).
    let solve = |init: &DensityMatrix| {
        let mut warm_p = vec![1.0 / n as f64; n];
        let mut value_of = |rho: &ComplexMatrix| {
            let (p, v) = inner_mixture_min(set, rho, &warm_p, inner_tol);
            warm_p = p;
            v
        };
        let mut warm_grad_p = vec![1.0 / n as f64; n];
        let mut supergrad = |rho: &ComplexMatrix, min_eig: f64| {
            let (p, _) = inner_mixture_min(set, rho, &warm_grad_p, inner_tol);
            warm_grad_p = p.clone();
            let mixed = Channel::mix(set, &project_simplex(&p)).expect("minimizing mixture");
            let eval = ChannelEval::new(&mixed);
            hermitian_basis_gradient(&mut |r| eval.mi(r), rho, min_eig)
        };
        mw_maximize(init, &mut value_of, &mut supergrad, cfg)
    };
    let outcome = run_restarts(dim, cfg, solve);
    let (p_star, primal_value) =
        inner_mixture_min(set, &outcome.rho, &vec![1.0 / n as f64; n], inner_tol);

    // Swapped direction: descend p ↦ sup_ρ I(ρ, Ñ_p); its certified upper
    // bound dominates the primal value, so the difference is a true minimax
    // residual.
    let (swap_cert, swap_iterations) = minimize_sup_over_mixtures(set, &p_star, cfg)?;

    let mut outcome = outcome;
    outcome.value = primal_value;
    let gap = swap_cert - primal_value;
    finish(outcome, project_simplex(&p_star), swap_iterations, gap)
}

/// Solve inf_p sup_ρ I(ρ, Ñ_p) and return a certified upper bound on the
/// minimax value together with the iterations spent.
fn minimize_sup_over_mixtures(
    set: &ChannelSet,
    p_init: &[f64],
    cfg: &SolverConfig,
) -> Result<(f64, usize)> {
    let dim = set.dim_in();
    let n = set.len();
    let inner_cfg = SolverConfig {
        tol: (cfg.tol * 0.1).max(1e-10),
        max_iter: cfg.max_iter,
        restarts: 1,
        seed: cfg.seed,
        step: cfg.step.clone(),
    };
    let mut warm = DensityMatrix::maximally_mixed(dim);
    let mut total_iterations = 0usize;

    // φ(p) with warm-started inner ascent; returns value at the inner optimum.
    let phi = |p: &[f64], warm: &mut DensityMatrix, total: &mut usize| -> (f64, f64) {
        let sum: f64 = p.iter().sum();
        let normalized: Vec<f64> = p.iter().map(|x| (x / sum).max(0.0)).collect();
        let sum2: f64 = normalized.iter().sum();
        let normalized: Vec<f64> = normalized.iter().map(|x| x / sum2).collect();
        let mixed = Channel::mix(set, &normalized).expect("mixture");
        let eval = ChannelEval::new(&mixed);
        let mut value_of = |rho: &ComplexMatrix| eval.mi(rho);
        let mut supergrad = |rho: &ComplexMatrix, min_eig: f64| {
            hermitian_basis_gradient(&mut |r| eval.mi(r), rho, min_eig)
        };
        let out = mw_maximize(warm, &mut value_of, &mut supergrad, &inner_cfg);
        *total += out.iterations;
        *warm = DensityMatrix::from_parts_unchecked(out.rho);
        (out.value, out.cert_gap.max(0.0))
    };

    let mut p = project_simplex(p_init);
    let (mut value, cert0) = phi(&p, &mut warm, &mut total_iterations);
    if n == 1 {
        return Ok((value + cert0, total_iterations));
    }
    let mut step = 0.25;
    let eps = 1e-6;
    for _ in 0..200 {
        // Danskin subgradient: differentiate only the explicit p-dependence
        // at the inner maximizer.
        let rho_star = warm.matrix().clone();
        let g: Vec<f64> = (0..n)
            .map(|i| {
                let h = |q: &[f64]| -> f64 {
                    let sum: f64 = q.iter().sum();
                    let norm: Vec<f64> = q.iter().map(|x| (x / sum).max(0.0)).collect();
                    let s2: f64 = norm.iter().sum();
                    let norm: Vec<f64> = norm.iter().map(|x| x / s2).collect();
                    ChannelEval::new(&Channel::mix(set, &norm).expect("mixture")).mi(&rho_star)
                };
                let mut plus = p.clone();
                plus[i] += eps;
                if p[i] >= eps {
                    let mut minus = p.clone();
                    minus[i] -= eps;
                    (h(&plus) - h(&minus)) / (2.0 * eps)
                } else {
                    (h(&plus) - h(&p)) / eps
                }
            })
            .collect();
        let pg: f64 = p.iter().zip(&g).map(|(a, b)| a * b).sum();
        let gmin = g.iter().copied().fold(f64::INFINITY, f64::min);
        if pg - gmin <= cfg.tol {
            break;
        }
        let mut improved = false;
        while step >= 1e-12 {
            let trial: Vec<f64> = p.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let trial = project_simplex(&trial);
            let (v_trial, _) = phi(&trial, &mut warm, &mut total_iterations);
            if v_trial < value {
                p = trial;
                value = v_trial;
                step = (step * 1.8).min(1e3);
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    // Tighten the inner solve at the final mixture so the certificate is sharp.
    let tight_cfg = SolverConfig {
        tol: (cfg.tol * 0.05).max(1e-11),
        restarts: 1,
        ..cfg.clone()
    };
    let mixed = Channel::mix(set, &p).expect("mixture");
    let eval = ChannelEval::new(&mixed);
    let mut value_of = |rho: &ComplexMatrix| eval.mi(rho);
    let mut supergrad = |rho: &ComplexMatrix, min_eig: f64| {
        hermitian_basis_gradient(&mut |r| eval.mi(r), rho, min_eig)
    };
    let out = mw_maximize(&warm, &mut value_of, &mut supergrad, &tight_cfg);
    total_iterations += out.iterations;
    Ok((out.value + out.cert_gap.max(0.0), total_iterations))
}

/// Capacities of two sets and of their pairwise tensor products, with the
/// additivity residual |C(A⊗B) − C(A) − C(B)|.
#[derive(Clone, Debug)]
pub struct AdditivityReport {
    pub cap_a: f64,
    pub cap_b: f64,
    pub cap_ab: f64,
    pub residual: f64,
}

pub fn additivity_check(
    set_a: &ChannelSet,
    set_b: &ChannelSet,
    cfg: &SolverConfig,
) -> Result<AdditivityReport> {
    let product = set_a.tensor(set_b)?;
    let cap_a = avqc_capacity(set_a, cfg)?.value;
    let cap_b = avqc_capacity(set_b, cfg)?.value;
    let cap_ab = avqc_capacity(&product, cfg)?.value;
    Ok(AdditivityReport {
        cap_a,
        cap_b,
        cap_ab,
        residual: (cap_ab - cap_a - cap_b).abs(),
    })
}

/// Capacity difference against the perturbation bound
/// 6·D·log₂(dim_A) + h(D), D the Hausdorff diamond distance of the sets.
#[derive(Clone, Debug)]
pub struct ContinuityReport {
    pub cap_a: f64,
    pub cap_b: f64,
    pub distance: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn continuity_bound(
    set_a: &ChannelSet,
    set_b: &ChannelSet,
    cfg: &SolverConfig,
) -> Result<ContinuityReport> {
    if set_a.dim_in() != set_b.dim_in() || set_a.dim_out() != set_b.dim_out() {
        return Err(Error::DimensionMismatch {
            expected: set_a.dim_in(),
            got: set_b.dim_in(),
            context: "continuity bound set dimensions",
        });
    }
    let cap_a = avqc_capacity(set_a, cfg)?.value;
    let cap_b = avqc_capacity(set_b, cfg)?.value;
    let geo = DiamondConfig::seeded(cfg.seed);
    let distance = geometry::hausdorff_distance(set_a, set_b, &geo)?;
    let bound = 6.0 * distance * (set_a.dim_in() as f64).log2() + binary_entropy(distance.min(1.0));
    let holds = (cap_a - cap_b).abs() <= bound + 1e-6;
    Ok(ContinuityReport {
        cap_a,
        cap_b,
        distance,
        bound,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::counterexample_pair;
    use crate::info::mutual_information;
    use crate::linalg::trace_norm;
    use crate::rng::random_channel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quick_cfg() -> SolverConfig {
        SolverConfig {
            tol: 1e-7,
            restarts: 2,
            seed: 7,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn fast_objective_matches_purification_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let ch = random_channel(3, 2, 3, &mut rng);
            let rho = crate::rng::random_density_matrix(3, &mut rng);
            let fast = ChannelEval::new(&ch).mi(rho.matrix());
            let slow = mutual_information(&rho, &ch).unwrap().value;
            assert!((fast - slow).abs() <= 1e-10, "{fast} vs {slow}");
        }
    }

    #[test]
    fn identity_qubit_capacity_is_two_bits() {
        let r = ea_capacity_single(&Channel::identity(2), &quick_cfg()).unwrap();
        assert!((r.value - 2.0).abs() <= 1e-5, "value {}", r.value);
        // Optimizer is maximally mixed.
        let dist = trace_norm(
            &r.optimizer_state
                .matrix()
                .sub(DensityMatrix::maximally_mixed(2).matrix()),
        )
        .unwrap();
        assert!(dist <= 1e-3);
        assert!(r.certified_gap >= -1e-7);
    }

    #[test]
    fn depolarizing_capacity_matches_symmetry_oracle() {
        // By covariance the optimum is maximally mixed; I(1/2, D_γ) has the
        // closed-form spectrum ((1-γ) + γ/4, γ/4, γ/4, γ/4) for the joint term.
        let gamma: f64 = 0.5;
        let joint = [1.0 - 0.75 * gamma, gamma / 4.0, gamma / 4.0, gamma / 4.0];
        let s_joint: f64 = -joint.iter().map(|p| p * p.log2()).sum::<f64>();
        let oracle = 2.0 - s_joint;
        let ch = Channel::depolarizing(gamma, 2).unwrap();
        let r = ea_capacity_single(&ch, &quick_cfg()).unwrap();
        assert!((r.value - oracle).abs() <= 1e-5, "{} vs {oracle}", r.value);
        let dist = trace_norm(
            &r.optimizer_state
                .matrix()
                .sub(DensityMatrix::maximally_mixed(2).matrix()),
        )
        .unwrap();
        assert!(dist <= 1e-3, "optimizer distance {dist}");
    }

    #[test]
    fn example_channel_capacity_is_log3() {
        let set = counterexample_pair();
        let cfg = SolverConfig {
            tol: 1e-6,
            restarts: 2,
            seed: 1,
            ..SolverConfig::default()
        };
        let r = ea_capacity_single(set.get(0), &cfg).unwrap();
        assert!(
            (r.value - 3f64.log2()).abs() <= 1e-4,
            "value {} vs log2(3)",
            r.value
        );
    }

    #[test]
    fn compound_on_singleton_and_duplicate_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = random_channel(2, 2, 2, &mut rng);
        let cfg = quick_cfg();
        let single = ea_capacity_single(&ch, &cfg).unwrap();
        let dup = ChannelSet::new(
            vec!["a".into(), "b".into()],
            vec![ch.clone(), ch.clone()],
        )
        .unwrap();
        let comp = compound_capacity(&dup, &cfg).unwrap();
        assert!((single.value - comp.value).abs() <= 2e-6);
        // Duplicates are not removed; the mixture spreads over both labels.
        assert_eq!(comp.worst_mixture.len(), 2);
    }

    #[test]
    fn value_is_reproduced_from_optimizer_state() {
        let set = counterexample_pair();
        let cfg = SolverConfig {
            tol: 1e-6,
            restarts: 1,
            seed: 3,
            ..SolverConfig::default()
        };
        let r = compound_capacity(&set, &cfg).unwrap();
        let direct = set
            .channels()
            .iter()
            .map(|ch| ChannelEval::new(ch).mi(r.optimizer_state.matrix()))
            .fold(f64::INFINITY, f64::min);
        assert!((direct - r.value).abs() <= 1e-9);
        DensityMatrix::validate(r.optimizer_state.matrix()).unwrap();
    }

    #[test]
    fn avqc_below_compound_and_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_channel(2, 2, 2, &mut rng);
        let b = random_channel(2, 2, 2, &mut rng);
        let c = random_channel(2, 2, 2, &mut rng);
        let cfg = SolverConfig {
            tol: 1e-6,
            restarts: 1,
            seed: 5,
            ..SolverConfig::default()
        };
        let two = ChannelSet::new(vec!["a".into(), "b".into()], vec![a.clone(), b.clone()])
            .unwrap();
        let three = ChannelSet::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![a, b, c],
        )
        .unwrap();
        let comp2 = compound_capacity(&two, &cfg).unwrap().value;
        let comp3 = compound_capacity(&three, &cfg).unwrap().value;
        assert!(comp3 <= comp2 + 2.0 * cfg.tol, "monotone under set growth");
        let av2 = avqc_capacity(&two, &cfg).unwrap();
        assert!(av2.value <= comp2 + 2.0 * cfg.tol);
        assert!(av2.certified_gap >= -1e-7);
        assert!(av2.certified_gap <= 1e-4, "gap {}", av2.certified_gap);
    }

    #[test]
    fn avqc_singleton_equals_single() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let ch = random_channel(2, 2, 2, &mut rng);
        let cfg = quick_cfg();
        let single = ea_capacity_single(&ch, &cfg).unwrap();
        let av = avqc_capacity(&ChannelSet::singleton("x", ch), &cfg).unwrap();
        assert!((single.value - av.value).abs() <= 2e-6);
        assert_eq!(av.worst_mixture, vec![1.0]);
    }

    #[test]
    fn restart_determinism() {
        let set = counterexample_pair();
        let cfg = SolverConfig {
            tol: 1e-5,
            restarts: 3,
            seed: 42,
            ..SolverConfig::default()
        };
        let a = compound_capacity(&set, &cfg).unwrap();
        let b = compound_capacity(&set, &cfg).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(
            a.optimizer_state.matrix().data(),
            b.optimizer_state.matrix().data()
        );
    }

    #[test]
    fn additivity_with_trivial_factor() {
        let set = {
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            ChannelSet::singleton("x", random_channel(2, 2, 2, &mut rng))
        };
        let trivial = ChannelSet::singleton("1", Channel::identity(1));
        let cfg = SolverConfig {
            tol: 1e-6,
            restarts: 1,
            seed: 9,
            ..SolverConfig::default()
        };
        let rep = additivity_check(&set, &trivial, &cfg).unwrap();
        assert!(rep.residual <= 1e-5, "residual {}", rep.residual);
        assert!(rep.cap_b.abs() <= 1e-9);
    }

    #[test]
    fn continuity_identical_sets() {
        let set = {
            let mut rng = ChaCha8Rng::seed_from_u64(19);
            ChannelSet::singleton("x", random_channel(2, 2, 2, &mut rng))
        };
        let cfg = quick_cfg();
        let rep = continuity_bound(&set, &set, &cfg).unwrap();
        assert!(rep.distance <= 1e-9);
        assert!((rep.cap_a - rep.cap_b).abs() <= 1e-6);
        assert!(rep.holds);
    }

    #[test]
    fn project_simplex_basics() {
        let p = project_simplex(&[0.2, 0.9, -0.3]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&x| x >= 0.0));
        let q = project_simplex(&[0.25, 0.75]);
        assert!((q[0] - 0.25).abs() < 1e-12 && (q[1] - 0.75).abs() < 1e-12);
    }
}
