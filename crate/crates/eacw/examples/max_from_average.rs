//! Turning an average-error guarantee into a maximal-error one: an extra
//! maximally entangled register of dimension M coordinates a uniformly
//! random cyclic relabeling of the messages, which flattens every
//! per-message error to the source code's average — exactly, channel by
//! channel — at the price of growing the entanglement dimension from L to
//! M·L.

use eacw::channels::{ChannelSet, counterexample_pair};
use eacw::coding::{counterexample_code, evaluate_code_compound, max_from_avg, random_toy_code};
use eacw::rng::{random_channel, task_rng};

fn main() -> eacw::Result<()> {
    // A lopsided toy code: per-message errors differ wildly before
    // conversion and coincide afterwards.
    let mut rng = task_rng(12, 0);
    let code = random_toy_code(1, 2, 2, 2, 3, 2, &mut rng)?;
    let set = ChannelSet::new(
        vec!["a".into(), "b".into()],
        vec![
            random_channel(2, 2, 2, &mut rng),
            random_channel(2, 2, 2, &mut rng),
        ],
    )?;
    let before = evaluate_code_compound(&code, &set)?;
    let converted = max_from_avg(&code)?;
    let after = evaluate_code_compound(&converted, &set)?;
    println!("toy code, worst channel {}:", before.worst_index);
    println!("  before: per-message errors {:?}", before.per_message);
    println!("  after:  per-message errors {:?}", after.per_message);
    println!(
        "  average {:.9} -> maximal {:.9}; L grows {} -> {}",
        before.average,
        after.maximal,
        code.entanglement_dim(),
        converted.entanglement_dim()
    );

    // The counterexample code at n = 1: average 2/5 becomes maximal 2/5.
    let source = counterexample_code(1)?.to_eacode()?;
    let set = counterexample_pair();
    let before = evaluate_code_compound(&source, &set)?;
    let converted = max_from_avg(&source)?;
    let after = evaluate_code_compound(&converted, &set)?;
    println!("\ncounterexample n=1:");
    println!(
        "  source average {:.6}, source maximal {:.6}",
        before.average, before.maximal
    );
    println!(
        "  converted maximal {:.6} (= source average), L = {}",
        after.maximal,
        converted.entanglement_dim()
    );
    Ok(())
}
