//! Reading pairing data and deriving the eligible offsets.

use unramified::bernoulli::irregular_indices;
use unramified::modmath::PrimeModulus;
use unramified::pairing::{b_to_e, eligible_set, PairingFile};

const DATA: &str = "\
# p = 157 has R = {62, 110}
B 157 62 110 5
E 157 1 62 12
E 157 1 110 40
E 157 3 62 0
E 157 3 110 9
E 157 5 62 77
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (p, k, k2) in [(1217, 784, 866), (7069, 1478, 2570), (9829, 4562, 7548)] {
        let r = irregular_indices(PrimeModulus::new(p)?)?;
        let (i, j) = b_to_e(&r, k, k2)?;
        println!("p = {p}: b({k}, {k2}) is stored as e({i}, {j})");
    }

    let file = PairingFile::parse(DATA.as_bytes())?;
    let r = irregular_indices(PrimeModulus::new(157)?)?;
    let table = file.table_for(&r)?;
    print!("canonical form:\n{}", table.to_tsv());
    println!("digest {}", table.digest());

    let elig = eligible_set(&r, &table)?;
    println!("eligible {:?}", elig.eligible);
    println!(
        "missing  {} offsets, s = {:?}",
        elig.missing.len(),
        elig.s()
    );
    Ok(())
}
