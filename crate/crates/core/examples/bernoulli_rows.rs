//! Bernoulli numbers mod p by every available method, with timings.
//!
//!     cargo run --release --example bernoulli_rows -- 1217

use std::time::Instant;

use unramified::bernoulli::{bernoulli_row, bernoulli_voronoi, RowMethod};
use unramified::modmath::PrimeModulus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p: u64 = std::env::args().nth(1).map_or(Ok(1217), |s| s.parse())?;
    let p = PrimeModulus::new(p)?;

    let mut rows = Vec::new();
    for method in [
        RowMethod::Naive,
        RowMethod::Voronoi,
        RowMethod::Fast,
        RowMethod::Series,
    ] {
        if method == RowMethod::Naive && p.get() > 5000 {
            continue;
        }
        let t = Instant::now();
        let row = bernoulli_row(p, method)?;
        println!("{method:>8}: {} values in {:.2?}", row.len(), t.elapsed());
        rows.push(row);
    }
    assert!(rows.windows(2).all(|w| w[0].same_values(&w[1])));

    let r = rows[0].irregular_set();
    println!("irregular pairs ({p}, k): k in {{{}}}", r.joined());
    for &k in r.indices() {
        println!("  B_{k} = {} mod {p}", bernoulli_voronoi(p, k)?);
    }
    Ok(())
}
