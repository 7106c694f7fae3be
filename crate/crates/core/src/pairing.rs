//! Cup-product pairing coefficients as ingested data.
//!
//! Two species of entries share one TSV format:
//!
//! ```text
//! # comment
//! B   p   k   k'   value   b_{p,k,k'} for irregular k < k'
//! E   p   i   k    value   coefficient of (eta_i, eta_{k-i}) in the (1-k)-eigenspace
//! ```
//!
//! Fields may be separated by any run of ASCII whitespace; a file may mix
//! several primes. Values are decimal in `[0, p)`. They are only meaningful up
//! to a unit, so everything downstream looks at zero versus nonzero.
//!
//! A `B` entry at `(k, k')` is the same datum as the `E` entry at
//! `(p - k, k')` (see [`b_to_e`]). A zero `b` forces the pairing value to
//! vanish; a nonzero `b` only does so under surjectivity of the pairing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bernoulli::IrregularSet;
use crate::error::{Error, Result};
use crate::modmath::{PrimeModulus, Residue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Species {
    B,
    E,
}

/// One syntactically valid data line, not yet checked against `R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RawEntry {
    pub line: usize,
    pub species: Species,
    pub p: PrimeModulus,
    pub first: u32,
    pub second: u32,
    pub value: u64,
}

/// A parsed pairing file, possibly covering several primes.
#[derive(Clone, Debug, Default)]
pub struct PairingFile {
    entries: BTreeMap<PrimeModulus, Vec<RawEntry>>,
    comments: Vec<String>,
}

impl PairingFile {
    pub fn parse(text: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(text).map_err(|e| Error::Parse {
            line: 0,
            msg: format!("input is not UTF-8: {e}"),
        })?;
        let mut file = PairingFile::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(c) = trimmed.strip_prefix('#') {
                file.comments.push(c.trim().to_string());
                continue;
            }
            let entry = parse_line(line, trimmed)?;
            file.entries.entry(entry.p).or_default().push(entry);
        }
        Ok(file)
    }

    pub fn primes(&self) -> impl Iterator<Item = PrimeModulus> + '_ {
        self.entries.keys().copied()
    }

    pub fn entries_for(&self, p: PrimeModulus) -> &[RawEntry] {
        self.entries.get(&p).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Validated table for the prime of `r`; primes without lines give an
    /// empty table.
    pub fn table_for(&self, r: &IrregularSet) -> Result<PairingTable> {
        let p = r.prime();
        let mut table = PairingTable::empty(p);
        table.provenance = self.comments.join("; ");
        for e in self.entries_for(p) {
            table.insert_checked(r, e)?;
        }
        table.check_b_e_consistency()?;
        Ok(table)
    }
}

fn parse_line(line: usize, text: &str) -> Result<RawEntry> {
    let fields: Vec<&str> = text.split_ascii_whitespace().collect();
    let err = |msg: String| Error::Parse { line, msg };
    if fields.len() != 5 {
        return Err(err(format!("expected 5 fields, found {}", fields.len())));
    }
    let species = match fields[0] {
        "B" => Species::B,
        "E" => Species::E,
        other => return Err(err(format!("unknown row species {other:?}"))),
    };
    let num = |s: &str| -> Result<u64> {
        s.parse::<u64>()
            .map_err(|_| err(format!("{s:?} is not a non-negative decimal integer")))
    };
    let p_raw = num(fields[1])?;
    let p = PrimeModulus::new(p_raw).map_err(|_| err(format!("{p_raw} is not an odd prime")))?;
    let first = num(fields[2])?;
    let second = num(fields[3])?;
    let value = num(fields[4])?;
    if first >= p.as_u64() || second >= p.as_u64() {
        return Err(err(format!("index out of range for p = {p}")));
    }
    if value >= p.as_u64() {
        return Err(Error::ValueOutOfRange {
            line,
            p: p.get(),
            value,
        });
    }
    Ok(RawEntry {
        line,
        species,
        p,
        first: first as u32,
        second: second as u32,
        value,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingTable {
    p: PrimeModulus,
    b_entries: BTreeMap<(u32, u32), u32>,
    e_entries: BTreeMap<(u32, u32), u32>,
    pub provenance: String,
}

impl PairingTable {
    pub fn empty(p: PrimeModulus) -> Self {
        PairingTable {
            p,
            b_entries: BTreeMap::new(),
            e_entries: BTreeMap::new(),
            provenance: String::new(),
        }
    }

    pub fn prime(&self) -> PrimeModulus {
        self.p
    }

    pub fn b(&self, k: u32, k2: u32) -> Option<u32> {
        self.b_entries.get(&(k, k2)).copied()
    }

    pub fn e(&self, i: u32, k: u32) -> Option<u32> {
        self.e_entries.get(&(i, k)).copied()
    }

    pub fn b_entries(&self) -> &BTreeMap<(u32, u32), u32> {
        &self.b_entries
    }

    pub fn e_entries(&self) -> &BTreeMap<(u32, u32), u32> {
        &self.e_entries
    }

    pub fn b_residue(&self, k: u32, k2: u32) -> Option<Residue> {
        self.b(k, k2).map(|v| self.p.residue(u64::from(v)))
    }

    pub fn is_empty(&self) -> bool {
        self.b_entries.is_empty() && self.e_entries.is_empty()
    }

    /// Adds `b_{p,k,k'}` after validating the key against `r`.
    pub fn insert_b(&mut self, r: &IrregularSet, k: u32, k2: u32, value: u64) -> Result<()> {
        self.insert_checked(
            r,
            &RawEntry {
                line: 0,
                species: Species::B,
                p: self.p,
                first: k,
                second: k2,
                value,
            },
        )
    }

    /// Adds the coefficient at `(i, k)` after validating the key against `r`.
    pub fn insert_e(&mut self, r: &IrregularSet, i: u32, k: u32, value: u64) -> Result<()> {
        self.insert_checked(
            r,
            &RawEntry {
                line: 0,
                species: Species::E,
                p: self.p,
                first: i,
                second: k,
                value,
            },
        )
    }

    fn insert_checked(&mut self, r: &IrregularSet, e: &RawEntry) -> Result<()> {
        let p = self.p;
        if r.prime() != p || e.p != p {
            return Err(Error::PrimeMismatch(format!(
                "entry for p = {} cannot go into a table for p = {p} with R for p = {}",
                e.p,
                r.prime()
            )));
        }
        if e.value >= p.as_u64() {
            return Err(Error::ValueOutOfRange {
                line: e.line,
                p: p.get(),
                value: e.value,
            });
        }
        let key = (e.first, e.second);
        let map = match e.species {
            Species::B => {
                if !(r.contains(e.first) && r.contains(e.second)) || e.first >= e.second {
                    return Err(Error::KeyOutsideIrregular {
                        line: e.line,
                        p: p.get(),
                        key: format!("B({},{})", e.first, e.second),
                    });
                }
                &mut self.b_entries
            }
            Species::E => {
                let i_ok = e.first % 2 == 1 && e.first + 2 <= p.get();
                if !i_ok || !r.contains(e.second) {
                    return Err(Error::KeyOutsideIrregular {
                        line: e.line,
                        p: p.get(),
                        key: format!("E({},{})", e.first, e.second),
                    });
                }
                &mut self.e_entries
            }
        };
        let value = e.value as u32;
        match map.insert(key, value) {
            Some(old) if old != value => Err(Error::Parse {
                line: e.line,
                msg: format!(
                    "conflicting duplicate for {:?} {key:?}: {old} vs {value}",
                    e.species
                ),
            }),
            _ => Ok(()),
        }
    }

    /// A zero `b_{p,k,k'}` forces the coefficient at `(p - k, k')` to vanish.
    fn check_b_e_consistency(&self) -> Result<()> {
        for (&(k, k2), &b) in &self.b_entries {
            let i = self.p.get() - k;
            if b == 0 {
                if let Some(e) = self.e(i, k2) {
                    if e != 0 {
                        return Err(Error::Domain(format!(
                            "p = {}: B({k},{k2}) = 0 but E({i},{k2}) = {e} is nonzero",
                            self.p
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Canonical TSV: `B` lines then `E` lines, each sorted by key, no comments.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (&(k, k2), v) in &self.b_entries {
            let _ = writeln!(out, "B\t{}\t{k}\t{k2}\t{v}", self.p);
        }
        for (&(i, k), v) in &self.e_entries {
            let _ = writeln!(out, "E\t{}\t{i}\t{k}\t{v}", self.p);
        }
        out
    }

    /// SHA-256 of [`to_tsv`](Self::to_tsv), hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_tsv().as_bytes()))
    }
}

/// Parses the lines for `expected.prime()` out of a pairing TSV and validates
/// them against `expected`. Lines for other primes are checked for syntax only.
pub fn parse_pairing_table(text: &[u8], expected: &IrregularSet) -> Result<PairingTable> {
    PairingFile::parse(text)?.table_for(expected)
}

/// The e-index carrying `b_{p,k,k'}`: `(p - k, k')`.
pub fn b_to_e(r: &IrregularSet, k: u32, k2: u32) -> Result<(u32, u32)> {
    if !r.contains(k) || !r.contains(k2) {
        return Err(Error::Domain(format!(
            "({k}, {k2}) is not a pair of irregular indices for p = {}",
            r.prime()
        )));
    }
    if k >= k2 {
        return Err(Error::Domain(format!("expected k < k', got ({k}, {k2})")));
    }
    Ok((r.prime().get() - k, k2))
}

/// The odd residues `i` with `e(i, k) != 0` for every irregular `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EligibleSet {
    pub p: PrimeModulus,
    /// Sorted odd `i` in `[1, p - 2]` with complete, all-nonzero data.
    pub eligible: Vec<u32>,
    /// Odd `i` without a known zero but with some coefficient absent.
    pub missing: Vec<u32>,
}

impl EligibleSet {
    /// `s = |I|` when the data is complete, else `None`.
    pub fn s(&self) -> Option<usize> {
        self.missing.is_empty().then_some(self.eligible.len())
    }

    pub fn is_complete(&self) -> bool {
        self.missing.is_empty()
    }
}

pub fn eligible_set(r: &IrregularSet, table: &PairingTable) -> Result<EligibleSet> {
    let p = r.prime();
    if table.prime() != p {
        return Err(Error::PrimeMismatch(format!(
            "irregular set for p = {p}, pairing table for p = {}",
            table.prime()
        )));
    }
    let mut eligible = Vec::new();
    let mut missing = Vec::new();
    for i in (1..p.get() - 1).step_by(2) {
        let mut any_zero = false;
        let mut any_absent = false;
        for &k in r.indices() {
            match table.e(i, k) {
                Some(0) => any_zero = true,
                Some(_) => {}
                None => any_absent = true,
            }
        }
        if any_zero {
            continue;
        }
        if any_absent {
            missing.push(i);
        } else {
            eligible.push(i);
        }
    }
    Ok(EligibleSet {
        p,
        eligible,
        missing,
    })
}

/// Full synthetic e-table: zero exactly at `zero_keys`, seeded nonzero values
/// everywhere else.
pub fn synth_table(
    r: &IrregularSet,
    zero_keys: &BTreeSet<(u32, u32)>,
    seed: u64,
) -> Result<PairingTable> {
    let p = r.prime();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p.as_u64().rotate_left(32));
    let mut table = PairingTable::empty(p);
    table.provenance = format!("synthetic e-table, seed {seed}");
    for &(i, k) in zero_keys {
        table.insert_e(r, i, k, 0)?;
    }
    for i in (1..p.get() - 1).step_by(2) {
        for &k in r.indices() {
            let value = rng.gen_range(1..p.as_u64());
            if !zero_keys.contains(&(i, k)) {
                table.insert_e(r, i, k, value)?;
            }
        }
    }
    Ok(table)
}

/// Synthetic b-table over all irregular pairs `k < k'`, zero exactly at
/// `zero_pairs`.
pub fn synth_b_table(
    r: &IrregularSet,
    zero_pairs: &BTreeSet<(u32, u32)>,
    seed: u64,
) -> Result<PairingTable> {
    let p = r.prime();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p.as_u64().rotate_left(32) ^ 0xb);
    let mut table = PairingTable::empty(p);
    table.provenance = format!("synthetic b-table, seed {seed}");
    for &(k, k2) in zero_pairs {
        table.insert_b(r, k, k2, 0)?;
    }
    let ks = r.indices();
    for (a, &k) in ks.iter().enumerate() {
        for &k2 in &ks[a + 1..] {
            let value = rng.gen_range(1..p.as_u64());
            if !zero_pairs.contains(&(k, k2)) {
                table.insert_b(r, k, k2, value)?;
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(p: u64, ks: &[u32]) -> IrregularSet {
        IrregularSet::new(PrimeModulus::new(p).unwrap(), ks.to_vec()).unwrap()
    }

    #[test]
    fn parses_b_and_e_lines() {
        let r1217 = set(1217, &[784, 866, 1118]);
        let t = parse_pairing_table(b"B 1217 784 866 0\n", &r1217).unwrap();
        assert_eq!(t.b(784, 866), Some(0));
        let r37 = set(37, &[32]);
        let t = parse_pairing_table(b"# synthetic\nE\t37\t7\t32\t5\n", &r37).unwrap();
        assert_eq!(t.e(7, 32), Some(5));
        assert_eq!(t.provenance, "synthetic");
        assert!(parse_pairing_table(b"", &r37).unwrap().is_empty());
    }

    #[test]
    fn other_primes_are_skipped_but_checked() {
        let r37 = set(37, &[32]);
        let t = parse_pairing_table(b"E 37 7 32 5\nB 1217 784 866 0\n", &r37).unwrap();
        assert_eq!(t.e_entries().len(), 1);
        assert!(parse_pairing_table(b"E 37 7 32 5\nB 1217 784 866 5000\n", &r37).is_err());
        assert!(parse_pairing_table(b"E 39 7 32 5\n", &r37).is_err());
    }

    #[test]
    fn error_paths() {
        let r37 = set(37, &[32]);
        match parse_pairing_table(b"# x\nE 37 7 32\n", &r37) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_pairing_table(b"E 37 7 30 5\n", &r37) {
            Err(Error::KeyOutsideIrregular { key, .. }) => assert_eq!(key, "E(7,30)"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_pairing_table(b"E 37 7 32 37\n", &r37),
            Err(Error::ValueOutOfRange { value: 37, .. })
        ));
        // even i
        assert!(parse_pairing_table(b"E 37 8 32 1\n", &r37).is_err());
        assert!(parse_pairing_table(b"X 37 7 32 1\n", &r37).is_err());
        assert!(parse_pairing_table(b"E 37 7 32 -1\n", &r37).is_err());
        assert!(parse_pairing_table(b"E 37 7 32 1\nE 37 7 32 2\n", &r37).is_err());
        assert!(parse_pairing_table(b"E 37 7 32 1\nE 37 7 32 1\n", &r37).is_ok());
        let r157 = set(157, &[62, 110]);
        // k must precede k'
        assert!(parse_pairing_table(b"B 157 110 62 1\n", &r157).is_err());
        // zero b contradicts a nonzero coefficient at (p - k, k')
        assert!(parse_pairing_table(b"B 157 62 110 0\nE 157 95 110 4\n", &r157).is_err());
        assert!(parse_pairing_table(b"B 157 62 110 3\nE 157 95 110 0\n", &r157).is_ok());
    }

    #[test]
    fn b_to_e_examples() {
        assert_eq!(
            b_to_e(&set(1217, &[784, 866, 1118]), 784, 866).unwrap(),
            (433, 866)
        );
        assert_eq!(
            b_to_e(&set(7069, &[1478, 2570]), 1478, 2570).unwrap(),
            (5591, 2570)
        );
        assert_eq!(
            b_to_e(&set(9829, &[4562, 7548]), 4562, 7548).unwrap(),
            (5267, 7548)
        );
        assert!(b_to_e(&set(9829, &[4562, 7548]), 4560, 7548).is_err());
        assert!(b_to_e(&set(9829, &[4562, 7548]), 7548, 4562).is_err());
    }

    #[test]
    fn eligible_set_examples() {
        let empty = set(37, &[]);
        let es = eligible_set(&empty, &PairingTable::empty(empty.prime())).unwrap();
        assert_eq!(es.s(), Some(18));
        assert_eq!(es.eligible[0], 1);
        assert_eq!(*es.eligible.last().unwrap(), 35);

        let r = set(37, &[32]);
        let full = synth_table(&r, &BTreeSet::new(), 1).unwrap();
        let es = eligible_set(&r, &full).unwrap();
        assert_eq!(es.s(), Some(18));

        let zeroed = synth_table(&r, &BTreeSet::from([(3, 32)]), 1).unwrap();
        let es = eligible_set(&r, &zeroed).unwrap();
        assert_eq!(es.s(), Some(17));
        assert!(!es.eligible.contains(&3));

        let partial = parse_pairing_table(b"E 37 1 32 4\nE 37 3 32 0\n", &r).unwrap();
        let es = eligible_set(&r, &partial).unwrap();
        assert_eq!(es.eligible, vec![1]);
        assert_eq!(es.missing.len(), 16);
        assert_eq!(es.s(), None);

        assert!(eligible_set(&r, &PairingTable::empty(PrimeModulus::new(41).unwrap())).is_err());
    }

    #[test]
    fn synthetic_tables() {
        let r = set(37, &[32]);
        let a = synth_table(&r, &BTreeSet::new(), 1).unwrap();
        assert_eq!(a.e_entries().len(), 18);
        assert!(a.e_entries().values().all(|&v| v != 0));
        assert_eq!(a, synth_table(&r, &BTreeSet::new(), 1).unwrap());
        let z = synth_table(&r, &BTreeSet::from([(5, 32)]), 1).unwrap();
        assert_eq!(z.e_entries().values().filter(|&&v| v == 0).count(), 1);
        assert!(synth_table(&r, &BTreeSet::from([(4, 32)]), 1).is_err());

        let r1217 = set(1217, &[784, 866, 1118]);
        let b = synth_b_table(&r1217, &BTreeSet::from([(784, 866)]), 0).unwrap();
        assert_eq!(b.b_entries().len(), 3);
        assert_eq!(b.b(784, 866), Some(0));
        assert!(b.b(784, 1118).unwrap() != 0);
    }

    #[test]
    fn canonical_form_and_digest() {
        let r = set(157, &[62, 110]);
        let t = parse_pairing_table(b"E 157 3 62 7\n# note\nB  157 62 110 5\n", &r).unwrap();
        assert_eq!(t.to_tsv(), "B\t157\t62\t110\t5\nE\t157\t3\t62\t7\n");
        assert_eq!(t.digest().len(), 64);
        let again = parse_pairing_table(t.to_tsv().as_bytes(), &r).unwrap();
        assert_eq!(again.to_tsv(), t.to_tsv());
    }
}
