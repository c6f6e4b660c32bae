//! Seeded samplers for states, unitaries and channels.
//!
//! Everything takes an explicit generator so that solver restarts, multistart
//! ascents and simulations are reproducible from a single 64-bit seed.

use crate::channels::Channel;
use crate::linalg::{C64, ComplexMatrix, DensityMatrix, PureStateVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic per-task generator derived from a base seed and task index.
pub fn task_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller; avoids pulling in rand_distr for one distribution.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn gaussian_complex(rng: &mut impl Rng) -> C64 {
    C64::new(gaussian(rng), gaussian(rng))
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

/// Haar-distributed pure state.
pub fn random_pure_state(dim: usize, rng: &mut impl Rng) -> PureStateVector {
    let amps: Vec<C64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
    PureStateVector::normalized(amps).expect("Gaussian vector is nonzero almost surely")
}

/// Full-rank random state G G† / tr(G G†).
pub fn random_density_matrix(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = ginibre(dim, dim, rng);
    let mut m = g.mul(&g.dagger());
    let tr = m.trace().re;
    m = m.scale(C64::new(1.0 / tr, 0.0));
    m.symmetrize();
    DensityMatrix::new(m).expect("Ginibre construction yields a valid state")
}

/// Random interior state: a Ginibre state mixed with a sliver of identity.
pub fn random_interior_state(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = random_density_matrix(dim, rng);
    let eps = 1e-3;
    let mut m = g.matrix().scale(C64::new(1.0 - eps, 0.0));
    m.add_assign_scaled(
        &ComplexMatrix::identity(dim),
        C64::new(eps / dim as f64, 0.0),
    );
    DensityMatrix::new(m).expect("mixture of states is a state")
}

/// Haar-ish unitary via Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng);
    gram_schmidt_columns(&g)
}

/// Orthonormalize the columns of a matrix (rows ≥ cols required).
pub fn gram_schmidt_columns(m: &ComplexMatrix) -> ComplexMatrix {
    let (rows, cols) = (m.rows(), m.cols());
    assert!(rows >= cols);
    let mut q = ComplexMatrix::zeros(rows, cols);
    for j in 0..cols {
        let mut v: Vec<C64> = (0..rows).map(|i| m[(i, j)]).collect();
        for prev in 0..j {
            // Re-orthogonalize twice for numerical stability.
            for _ in 0..2 {
                let mut dot = C64::new(0.0, 0.0);
                for i in 0..rows {
                    dot += q[(i, prev)].conj() * v[i];
                }
                for i in 0..rows {
                    v[i] -= dot * q[(i, prev)];
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 1e-12, "rank-deficient Gram-Schmidt input");
        for i in 0..rows {
            q[(i, j)] = v[i] / norm;
        }
    }
    q
}

/// Random channel from a Haar-ish isometry with `kraus_count` Kraus operators.
pub fn random_channel(
    dim_in: usize,
    dim_out: usize,
    kraus_count: usize,
    rng: &mut impl Rng,
) -> Channel {
    assert!(kraus_count >= 1 && dim_out * kraus_count >= dim_in);
    let g = ginibre(dim_out * kraus_count, dim_in, rng);
    let iso = gram_schmidt_columns(&g);
    let kraus: Vec<ComplexMatrix> = (0..kraus_count)
        .map(|k| {
            ComplexMatrix::from_fn(dim_out, dim_in, |o, i| iso[(k * dim_out + o, i)])
        })
        .collect();
    Channel::new(dim_in, dim_out, kraus).expect("isometry slices form a CPTP map")
}

/// Probability vector with Dirichlet(1,...,1)-style weights.
pub fn random_probability(len: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut p: Vec<f64> = (0..len).map(|_| -f64::ln(rng.gen_range(1e-12..1.0))).collect();
    let sum: f64 = p.iter().sum();
    for x in &mut p {
        *x /= sum;
    }
    p
}
