//! Disjoint translates of an irregular set inside Z/(p-1), with every odd
//! offset allowed.

use std::time::Instant;

use unramified::bernoulli::irregular_indices;
use unramified::modmath::odd_primes_in;
use unramified::packing::{
    max_disjoint_translates_exact, max_disjoint_translates_greedy, translates_disjoint,
    PackingInstance,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let toy = PackingInstance::new(12, [2, 6], (1..12).step_by(2))?;
    let res = max_disjoint_translates_exact(&toy);
    println!("m = 12, R = {{2, 6}}: d = {} via {:?}", res.d, res.witness);

    let max_p: u64 = std::env::args().nth(1).map_or(Ok(1300), |s| s.parse())?;
    println!("p\tR\tgreedy\texact\toptimal\tupper\tnodes\tms");
    for p in odd_primes_in(5, max_p) {
        let r = irregular_indices(p)?;
        if r.r() < 2 {
            continue;
        }
        let m = p.get() - 1;
        let inst = PackingInstance::new(m, r.indices().iter().copied(), (1..m).step_by(2))?;
        let t = Instant::now();
        let exact = unramified::packing::max_disjoint_translates_budgeted(&inst, Some(2_000_000));
        let greedy = max_disjoint_translates_greedy(&inst);
        assert!(translates_disjoint(m, inst.shape(), &exact.witness));
        println!(
            "{p}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.joined(),
            greedy.d,
            exact.d,
            exact.optimal,
            exact.upper_bound,
            exact.nodes,
            t.elapsed().as_millis()
        );
    }
    Ok(())
}
