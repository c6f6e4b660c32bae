//! Entanglement-assisted capacity of single channels: the noiseless qubit
//! (2 bits), a depolarizing qubit against its closed-form value, and the
//! first counterexample channel on C⁵ (log₂ 3).

use eacw::channels::{Channel, counterexample_pair};
use eacw::solver::{SolverConfig, ea_capacity_single};

fn main() -> eacw::Result<()> {
    let cfg = SolverConfig {
        restarts: 2,
        seed: 1,
        ..SolverConfig::default()
    };

    let r = ea_capacity_single(&Channel::identity(2), &cfg)?;
    println!("identity qubit: C_EA = {:.6} bits (expected 2.0)", r.value);

    let gamma: f64 = 0.5;
    let ch = Channel::depolarizing(gamma, 2)?;
    let r = ea_capacity_single(&ch, &cfg)?;
    // Covariance puts the optimum at the maximally mixed state, where the
    // joint output spectrum is ((1-γ)+γ/4, γ/4, γ/4, γ/4).
    let joint = [1.0 - 0.75 * gamma, gamma / 4.0, gamma / 4.0, gamma / 4.0];
    let closed_form = 2.0 + joint.iter().map(|p| p * p.log2()).sum::<f64>();
    println!(
        "depolarizing γ={gamma}: C_EA = {:.6} bits (closed form {:.6})",
        r.value, closed_form
    );

    let set = counterexample_pair();
    for (label, ch) in set.labels().iter().zip(set.channels()) {
        let r = ea_capacity_single(ch, &cfg)?;
        println!(
            "{label}: C_EA = {:.6} bits (expected log₂3 = {:.6}), certificate gap {:.2e}",
            r.value,
            3f64.log2(),
            r.certified_gap
        );
    }
    Ok(())
}
