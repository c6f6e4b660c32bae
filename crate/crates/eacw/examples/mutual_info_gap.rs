//! Approximating k·I(σ, N) by the Holevo quantity of the induced cq channel
//! V(x) = (N^{⊗k} ∘ Ẽ_x ⊗ id)(Ψ^{⊗k}) under the uniform input distribution.
//! The gap is at most 2d·log₂(k+1), the log-size of the type set.

use eacw::channels::Channel;
use eacw::coding::mutual_approx_gap;
use eacw::linalg::DensityMatrix;
use eacw::rng::{random_density_matrix, task_rng};

fn main() -> eacw::Result<()> {
    let ch = Channel::depolarizing(0.3, 2)?;
    let sigma = DensityMatrix::from_probabilities(&[0.6, 0.4])?;
    println!("σ = diag(0.6, 0.4), N = depolarizing(0.3):");
    println!("{:>2} {:>12} {:>12} {:>10} {:>10}", "k", "k·I(σ,N)", "χ(q*,V)", "gap", "bound");
    for k in 1..=3 {
        let rep = mutual_approx_gap(&sigma, k, &ch)?;
        println!(
            "{k:>2} {:>12.6} {:>12.6} {:>10.6} {:>10.6}",
            rep.k_times_mutual, rep.chi, rep.gap, rep.bound
        );
        assert!(rep.holds);
    }

    let mut rng = task_rng(31, 0);
    let sigma = random_density_matrix(2, &mut rng);
    let ch = eacw::rng::random_channel(2, 2, 2, &mut rng);
    println!("\nrandom σ and channel:");
    for k in 1..=3 {
        let rep = mutual_approx_gap(&sigma, k, &ch)?;
        println!(
            "k = {k}: gap {:.6} ≤ bound {:.6} ({})",
            rep.gap,
            rep.bound,
            if rep.holds { "holds" } else { "VIOLATED" }
        );
    }
    Ok(())
}
