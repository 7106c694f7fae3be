//! Verdicts: Greenberg pseudo-nullity via an eligible offset, the lower bound
//! on the annihilator height, and abelianness of the unramified pro-p group
//! over the cyclotomic Z_p-extension.
//!
//! Pairing data enters only as zero / nonzero. Every verdict carries the
//! hypothesis flags it relied on.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::bernoulli::IrregularSet;
use crate::eigen::{CongruenceCheckResult, IndexPair};
use crate::error::{Error, Result};
use crate::modmath::PrimeModulus;
use crate::packing::{max_disjoint_translates_budgeted, PackingInstance};
use crate::pairing::{EligibleSet, PairingTable};

/// Vandiver and eigenspace procyclicity are verified below this bound.
pub const VERIFIED_BOUND: u64 = 12_000_000;
/// The pairing is known to be surjective below this bound.
pub const SURJECTIVE_BOUND: u64 = 1000;
/// Default branching budget for the exact packing search.
pub const DEFAULT_NODE_BUDGET: u64 = 250_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Hypothesis {
    True,
    Assumed,
    Unknown,
}

impl Hypothesis {
    pub fn granted(self) -> bool {
        self != Hypothesis::Unknown
    }
}

impl std::str::FromStr for Hypothesis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "true" | "yes" => Ok(Hypothesis::True),
            "assumed" => Ok(Hypothesis::Assumed),
            "unknown" | "false" | "no" => Ok(Hypothesis::Unknown),
            other => Err(Error::Domain(format!("unknown hypothesis state {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Surjectivity {
    True,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HypothesisFlags {
    pub vandiver: Hypothesis,
    pub procyclic: Hypothesis,
    pub pairing_surjective: Surjectivity,
}

impl HypothesisFlags {
    pub fn defaults_for(p: PrimeModulus) -> Self {
        let verified = if p.as_u64() < VERIFIED_BOUND {
            Hypothesis::Assumed
        } else {
            Hypothesis::Unknown
        };
        HypothesisFlags {
            vandiver: verified,
            procyclic: verified,
            pairing_surjective: surjectivity_auto(p),
        }
    }
}

/// Command-line overrides on top of [`HypothesisFlags::defaults_for`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FlagOverrides {
    pub vandiver: Option<Hypothesis>,
    pub procyclic: Option<Hypothesis>,
    pub pairing_surjective: Option<Surjectivity>,
}

impl FlagOverrides {
    pub fn apply(self, p: PrimeModulus) -> HypothesisFlags {
        let d = HypothesisFlags::defaults_for(p);
        HypothesisFlags {
            vandiver: self.vandiver.unwrap_or(d.vandiver),
            procyclic: self.procyclic.unwrap_or(d.procyclic),
            pairing_surjective: self.pairing_surjective.unwrap_or(d.pairing_surjective),
        }
    }
}

pub fn surjectivity_auto(p: PrimeModulus) -> Surjectivity {
    if p.as_u64() < SURJECTIVE_BOUND {
        Surjectivity::True
    } else {
        Surjectivity::Unknown
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Holds,
    Fails,
    Conditional,
    Inconclusive,
    Trivial,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "HOLDS",
            Status::Fails => "FAILS",
            Status::Conditional => "CONDITIONAL",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Trivial => "TRIVIAL",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    ModuleZero,
    EligibleOffset,
    NoEligibleOffset,
    MissingPairingData,
    VandiverNotGranted,
    RankAtMostOne,
    CongruenceViolation,
    ZeroPairing,
    AllNonzero,
    SurjectivityUnknown,
    HypothesesNotGranted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Detail {
    pub reason: Reason,
    /// Index pairs `(k, k')` behind the decision (zero or missing entries).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub keys: Vec<IndexPair>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Detail {
    fn new(reason: Reason) -> Self {
        Detail {
            reason,
            keys: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn keys(mut self, keys: Vec<IndexPair>) -> Self {
        self.keys = keys;
        self
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub detail: Detail,
    pub flags_used: HypothesisFlags,
}

fn verdict(status: Status, detail: Detail, flags: HypothesisFlags) -> Verdict {
    Verdict {
        status,
        detail,
        flags_used: flags,
    }
}

fn same_prime(what: &str, expected: PrimeModulus, got: PrimeModulus) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::PrimeMismatch(format!(
            "{what} is for p = {got}, expected p = {expected}"
        )))
    }
}

pub fn greenberg_verdict(
    r: &IrregularSet,
    elig: &EligibleSet,
    flags: HypothesisFlags,
) -> Result<Verdict> {
    same_prime("eligible set", r.prime(), elig.p)?;
    if r.is_regular() {
        return Ok(verdict(
            Status::Trivial,
            Detail::new(Reason::ModuleZero),
            flags,
        ));
    }
    if let Some(&i) = elig.eligible.first() {
        let detail = Detail::new(Reason::EligibleOffset).note(format!(
            "{} eligible offsets, least i = {i}",
            elig.eligible.len()
        ));
        // reading I as the surjectivity condition uses cyclic eigenspaces
        if !flags.vandiver.granted() {
            let detail = Detail {
                reason: Reason::VandiverNotGranted,
                ..detail
            };
            return Ok(verdict(Status::Conditional, detail, flags));
        }
        return Ok(verdict(Status::Holds, detail, flags));
    }
    if !elig.missing.is_empty() {
        let detail = Detail::new(Reason::MissingPairingData).note(format!(
            "{} odd offsets lack pairing data",
            elig.missing.len()
        ));
        return Ok(verdict(Status::Conditional, detail, flags));
    }
    Ok(verdict(
        Status::Inconclusive,
        Detail::new(Reason::NoEligibleOffset),
        flags,
    ))
}

/// A nonnegative rational in lowest terms, serialized as `"n/d"` (or `"n"`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: u64,
    den: u64,
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let g = gcd(num, den);
        Rational {
            num: num / g,
            den: den / g,
        }
    }

    pub fn numer(self) -> u64 {
        self.num
    }

    pub fn denom(self) -> u64 {
        self.den
    }

    pub fn ceil(self) -> u64 {
        self.num.div_ceil(self.den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `s / (r^2 - r + 1) + 1`.
pub fn corollary_bound(s: u64, r: u64) -> Rational {
    let q = r * r - r + 1;
    Rational::new(s + q, q)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeightBound {
    #[serde(skip)]
    pub p: PrimeModulus,
    /// R is empty: the module vanishes and there is nothing to bound.
    pub module_zero: bool,
    pub d: Option<usize>,
    /// Whether `d` is proven to be the maximum packing.
    pub d_optimal: bool,
    /// Upper bound on the maximum packing, equal to `d` when optimal.
    pub d_upper: Option<usize>,
    pub bound_exact: Option<usize>,
    pub bound_corollary: Option<Rational>,
    pub bound_corollary_ceil: Option<u64>,
    pub witness: Vec<u32>,
    /// Pairing data was missing; `d` was computed on the eligible offsets only.
    pub partial: bool,
    pub vandiver_granted: bool,
    pub flags_used: HypothesisFlags,
}

pub fn height_lower_bound(
    r: &IrregularSet,
    elig: &EligibleSet,
    flags: HypothesisFlags,
    node_budget: Option<u64>,
) -> Result<HeightBound> {
    let p = r.prime();
    same_prime("eligible set", p, elig.p)?;
    let mut out = HeightBound {
        p,
        module_zero: r.is_regular(),
        d: None,
        d_optimal: false,
        d_upper: None,
        bound_exact: None,
        bound_corollary: None,
        bound_corollary_ceil: None,
        witness: Vec::new(),
        partial: !elig.is_complete(),
        vandiver_granted: flags.vandiver.granted(),
        flags_used: flags,
    };
    if out.module_zero {
        out.partial = false;
        return Ok(out);
    }
    let m = p.get() - 1;
    let inst = PackingInstance::new(
        m,
        r.indices().iter().copied(),
        elig.eligible.iter().copied(),
    )?;
    let res = max_disjoint_translates_budgeted(&inst, node_budget);
    out.d = Some(res.d);
    out.d_optimal = res.optimal;
    out.d_upper = Some(res.upper_bound);
    out.bound_exact = Some(res.d + 1);
    out.witness = res.witness;
    if let Some(s) = elig.s() {
        let c = corollary_bound(s as u64, r.r() as u64);
        out.bound_corollary = Some(c);
        out.bound_corollary_ceil = Some(c.ceil());
    }
    Ok(out)
}

/// Per-pair evidence for the nonvanishing condition of the abelianness
/// criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PairEvidence {
    Zero,
    /// The pairing value itself is known to be nonzero.
    Nonzero,
    /// Only the table value is nonzero; the pairing value follows from it
    /// under surjectivity.
    TableNonzero,
    Missing,
}

fn pair_evidence(r: &IrregularSet, table: &PairingTable, k: u32, k2: u32) -> PairEvidence {
    let i = r.prime().get() - k;
    match (table.b(k, k2), table.e(i, k2)) {
        (Some(0), _) | (_, Some(0)) => PairEvidence::Zero,
        (_, Some(_)) => PairEvidence::Nonzero,
        (Some(_), None) => PairEvidence::TableNonzero,
        (None, None) => PairEvidence::Missing,
    }
}

pub fn gk_verdict(
    r: &IrregularSet,
    cc: &CongruenceCheckResult,
    table: &PairingTable,
    flags: HypothesisFlags,
) -> Result<Verdict> {
    let p = r.prime();
    same_prime("pairing table", p, table.prime())?;
    same_prime("congruence check", p, cc.p)?;
    let granted = flags.vandiver.granted() && flags.procyclic.granted();
    let not_granted = |detail: Detail| {
        let detail = detail.note("Vandiver or procyclicity not granted");
        verdict(
            Status::Conditional,
            Detail {
                reason: Reason::HypothesesNotGranted,
                ..detail
            },
            flags,
        )
    };
    if r.r() <= 1 {
        let detail = Detail::new(Reason::RankAtMostOne);
        return Ok(if granted {
            verdict(Status::Holds, detail, flags)
        } else {
            not_granted(detail)
        });
    }
    if !cc.holds() {
        let mut keys = cc.sum_two_violations.clone();
        for (a, b) in &cc.collision_violations {
            keys.push(*a);
            keys.push(*b);
        }
        keys.sort_unstable();
        keys.dedup();
        let detail = Detail::new(Reason::CongruenceViolation)
            .keys(keys)
            .note("hypotheses checked over all unordered pairs of irregular indices");
        return Ok(verdict(Status::Inconclusive, detail, flags));
    }
    let ks = r.indices();
    let mut zero = Vec::new();
    let mut missing = Vec::new();
    let mut table_only = Vec::new();
    for (a, &k) in ks.iter().enumerate() {
        for &k2 in &ks[a + 1..] {
            match pair_evidence(r, table, k, k2) {
                PairEvidence::Zero => zero.push((k, k2)),
                PairEvidence::Missing => missing.push((k, k2)),
                PairEvidence::TableNonzero => table_only.push((k, k2)),
                PairEvidence::Nonzero => {}
            }
        }
    }
    if !zero.is_empty() {
        let detail = Detail::new(Reason::ZeroPairing).keys(zero);
        return Ok(if granted {
            verdict(Status::Fails, detail, flags)
        } else {
            not_granted(detail)
        });
    }
    if !missing.is_empty() {
        let detail = Detail::new(Reason::MissingPairingData).keys(missing);
        return Ok(verdict(Status::Conditional, detail, flags));
    }
    if !table_only.is_empty() && flags.pairing_surjective != Surjectivity::True {
        let detail = Detail::new(Reason::SurjectivityUnknown).keys(table_only);
        return Ok(verdict(Status::Conditional, detail, flags));
    }
    let detail = Detail::new(Reason::AllNonzero);
    Ok(if granted {
        verdict(Status::Holds, detail, flags)
    } else {
        not_granted(detail)
    })
}

/// One prime's input to [`remark_ranges_check`]: `s` is `None` when the
/// pairing data is incomplete.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RangeSample {
    pub p: PrimeModulus,
    pub r: usize,
    pub s: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RangeViolation {
    pub p: PrimeModulus,
    pub r: usize,
    /// `(p - 1)/2 - s`, absent when only the rank is out of range.
    pub gap: Option<usize>,
    pub expected: Option<(usize, usize)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RangeReport {
    pub violations: Vec<RangeViolation>,
    /// Primes whose `s` was unavailable.
    pub skipped: Vec<PrimeModulus>,
}

/// Expected window for `(p - 1)/2 - s` by index of irregularity, `p < 1000`.
pub fn remark_range(r: usize) -> Option<(usize, usize)> {
    match r {
        1 => Some((2, 6)),
        2 => Some((6, 8)),
        3 => Some((9, 12)),
        _ => None,
    }
}

/// Checks `r <= 3` and the gap windows for primes below 1000; larger primes
/// and regular primes are outside the remark and ignored.
pub fn remark_ranges_check(samples: impl IntoIterator<Item = RangeSample>) -> RangeReport {
    let mut out = RangeReport::default();
    for RangeSample { p, r, s } in samples {
        if p.as_u64() >= SURJECTIVE_BOUND || r == 0 {
            continue;
        }
        let Some(window) = remark_range(r) else {
            out.violations.push(RangeViolation {
                p,
                r,
                gap: None,
                expected: None,
            });
            continue;
        };
        let Some(s) = s else {
            out.skipped.push(p);
            continue;
        };
        let half = (p.get() as usize - 1) / 2;
        let gap = half.saturating_sub(s);
        if gap < window.0 || gap > window.1 {
            out.violations.push(RangeViolation {
                p,
                r,
                gap: Some(gap),
                expected: Some(window),
            });
        }
    }
    out
}
