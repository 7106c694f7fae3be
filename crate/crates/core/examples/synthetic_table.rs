//! Prints a synthetic pairing table in canonical TSV.
//!
//!     cargo run --example synthetic_table -- 37 1          # E rows, all nonzero
//!     cargo run --example synthetic_table -- 157 1 5:62    # E rows, zero at (5, 62)
//!     cargo run --example synthetic_table -- 1217 1 b      # B rows, all nonzero

use std::collections::BTreeSet;

use unramified::bernoulli::irregular_indices;
use unramified::modmath::PrimeModulus;
use unramified::pairing::{synth_b_table, synth_table};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let p = PrimeModulus::new(
        args.first()
            .ok_or("usage: synthetic_table P [SEED] [b | I:K ...]")?
            .parse()?,
    )?;
    let seed: u64 = args.get(1).map_or(Ok(1), |s| s.parse())?;
    let r = irregular_indices(p)?;
    let rest = args.get(2..).unwrap_or(&[]);
    let table = if rest.first().is_some_and(|s| s == "b") {
        synth_b_table(&r, &BTreeSet::new(), seed)?
    } else {
        let mut zeros = BTreeSet::new();
        for z in rest {
            let (i, k) = z.split_once(':').ok_or("zero keys are I:K")?;
            zeros.insert((i.parse()?, k.parse()?));
        }
        synth_table(&r, &zeros, seed)?
    };
    println!("# {}", table.provenance);
    print!("{}", table.to_tsv());
    Ok(())
}
