//! Congruence hypotheses on irregular indices modulo `p - 1`.
//!
//! For irregular `k < k'` the abelianness criterion needs
//! `k + k' != 2 (mod p - 1)`, and all the sums `k + k' (mod p - 1)` over
//! distinct pairs must be pairwise distinct.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bernoulli::IrregularSet;
use crate::modmath::PrimeModulus;

/// An unordered pair of irregular indices, stored with `lo < hi`.
pub type IndexPair = (u32, u32);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceCheckResult {
    pub p: PrimeModulus,
    /// Pairs `k < k'` with `k + k' = 2 (mod p - 1)`.
    pub sum_two_violations: Vec<IndexPair>,
    /// Distinct pairs with the same sum mod `p - 1`, each as `(first, second)`
    /// with `first < second` lexicographically, the list itself sorted.
    pub collision_violations: Vec<(IndexPair, IndexPair)>,
}

impl CongruenceCheckResult {
    pub fn holds(&self) -> bool {
        self.sum_two_violations.is_empty() && self.collision_violations.is_empty()
    }

    /// One TSV line per violation: `p<TAB>sum-two<TAB>k,k'` or
    /// `p<TAB>collision<TAB>j,j'<TAB>k,k'`.
    pub fn tsv_lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (a, b) in &self.sum_two_violations {
            out.push(format!("{}\tsum-two\t{a},{b}", self.p));
        }
        for ((a, b), (c, d)) in &self.collision_violations {
            out.push(format!("{}\tcollision\t{a},{b}\t{c},{d}", self.p));
        }
        out
    }
}

pub fn check_congruences(r: &IrregularSet) -> CongruenceCheckResult {
    let p = r.prime();
    let m = p.group_order();
    let ks = r.indices(); // sorted ascending
    let two = 2 % m;
    let mut sum_two = Vec::new();
    let mut by_sum: BTreeMap<u64, Vec<IndexPair>> = BTreeMap::new();
    for (i, &k) in ks.iter().enumerate() {
        for &k2 in &ks[i + 1..] {
            let s = (u64::from(k) + u64::from(k2)) % m;
            if s == two {
                sum_two.push((k, k2));
            }
            by_sum.entry(s).or_default().push((k, k2));
        }
    }
    sum_two.sort_unstable();
    let mut collisions = Vec::new();
    for pairs in by_sum.values() {
        for (i, &a) in pairs.iter().enumerate() {
            for &b in &pairs[i + 1..] {
                collisions.push((a.min(b), a.max(b)));
            }
        }
    }
    collisions.sort_unstable();
    CongruenceCheckResult {
        p,
        sum_two_violations: sum_two,
        collision_violations: collisions,
    }
}

/// Checks every set from `source` with `p < p_max` and keeps those with a
/// violation, in ascending order of p.
pub fn congruence_sweep<'a, I>(p_max: u64, source: I) -> Vec<CongruenceCheckResult>
where
    I: IntoIterator<Item = &'a IrregularSet>,
{
    let mut out: Vec<CongruenceCheckResult> = source
        .into_iter()
        .filter(|s| s.prime().as_u64() < p_max)
        .map(check_congruences)
        .filter(|c| !c.holds())
        .collect();
    out.sort_by_key(|c| c.p);
    out
}
