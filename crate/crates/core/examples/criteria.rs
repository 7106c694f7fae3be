//! All three criteria on one prime, first with synthetic all-nonzero data and
//! then with a planted zero.
//!
//!     cargo run --release --example criteria -- 491

use std::collections::BTreeSet;

use unramified::bernoulli::irregular_indices;
use unramified::criteria::{
    gk_verdict, greenberg_verdict, height_lower_bound, HypothesisFlags, DEFAULT_NODE_BUDGET,
};
use unramified::eigen::check_congruences;
use unramified::modmath::PrimeModulus;
use unramified::pairing::{eligible_set, synth_b_table, synth_table};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p: u64 = std::env::args().nth(1).map_or(Ok(157), |s| s.parse())?;
    let p = PrimeModulus::new(p)?;
    let r = irregular_indices(p)?;
    let flags = HypothesisFlags::defaults_for(p);
    println!("p = {p}, R = {{{}}}, flags {flags:?}", r.joined());

    let e = synth_table(&r, &BTreeSet::new(), 1)?;
    let elig = eligible_set(&r, &e)?;
    let g = greenberg_verdict(&r, &elig, flags)?;
    println!("greenberg: {} ({:?})", g.status, g.detail.reason);

    let h = height_lower_bound(&r, &elig, flags, Some(DEFAULT_NODE_BUDGET))?;
    println!(
        "height: d = {:?} (optimal {}, at most {:?}), bound {:?}, corollary {}",
        h.d,
        h.d_optimal,
        h.d_upper,
        h.bound_exact,
        h.bound_corollary.map_or("-".into(), |c| c.to_string())
    );

    let cc = check_congruences(&r);
    let b = synth_b_table(&r, &BTreeSet::new(), 1)?;
    let v = gk_verdict(&r, &cc, &b, flags)?;
    println!("gk, all nonzero: {} ({:?})", v.status, v.detail.reason);

    if let [k, k2, ..] = *r.indices() {
        let b = synth_b_table(&r, &BTreeSet::from([(k, k2)]), 1)?;
        let v = gk_verdict(&r, &cc, &b, flags)?;
        println!("gk, b({k}, {k2}) = 0: {} ({:?})", v.status, v.detail.reason);
    }
    Ok(())
}
