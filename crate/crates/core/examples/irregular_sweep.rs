//! Sweeps all primes below a bound for irregular pairs and checks the
//! congruence hypotheses on each irregular set.
//!
//! ```bash
//! cargo run --release -p unramified --example irregular_sweep -- 25000
//! ```

use std::time::Instant;

use unramified::bernoulli::irregular_sweep;
use unramified::eigen::congruence_sweep;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p_max: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(2000);
    let start = Instant::now();
    let sets = irregular_sweep(p_max, 1, None)?;
    let elapsed = start.elapsed();

    let irregular: Vec<_> = sets.iter().filter(|s| !s.is_regular()).collect();
    let max_r = sets.iter().map(|s| s.r()).max().unwrap_or(0);
    println!(
        "{} primes below {p_max}: {} irregular, max index of irregularity {max_r} ({:.2?})",
        sets.len(),
        irregular.len(),
        elapsed
    );
    for r in 1..=max_r {
        let count = sets.iter().filter(|s| s.r() == r).count();
        println!("  r = {r}: {count} primes");
    }
    for s in irregular.iter().filter(|s| s.r() == max_r).take(5) {
        println!("  e.g. p = {}: R = {{{}}}", s.prime(), s.joined());
    }

    let violations = congruence_sweep(p_max, &sets);
    println!("congruence violations: {}", violations.len());
    for v in &violations {
        for line in v.tsv_lines() {
            println!("  {line}");
        }
    }
    Ok(())
}
