//! Per-prime summaries tying every verdict together.
//!
//! Field order is fixed by the struct definitions, so the JSON and TSV output
//! is byte-stable for identical inputs.

use rayon::prelude::*;
use serde::Serialize;

use crate::bernoulli::{irregular_indices, irregular_sweep, IrregularCache, IrregularSet};
use crate::criteria::{
    gk_verdict, greenberg_verdict, height_lower_bound, FlagOverrides, HeightBound, HypothesisFlags,
    Rational, Reason, Status, Verdict,
};
use crate::eigen::{check_congruences, CongruenceCheckResult};
use crate::error::{Error, Result};
use crate::modmath::PrimeModulus;
use crate::pairing::{eligible_set, EligibleSet, PairingFile, PairingTable};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CongruenceStatus {
    Holds,
    Violated,
}

impl CongruenceStatus {
    fn of(cc: &CongruenceCheckResult) -> Self {
        if cc.holds() {
            CongruenceStatus::Holds
        } else {
            CongruenceStatus::Violated
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub p: PrimeModulus,
    #[serde(rename = "R")]
    pub irregular: Vec<u32>,
    pub r: usize,
    pub congruence: CongruenceStatus,
    pub s: Option<usize>,
    pub eligible: usize,
    pub missing: usize,
    pub d: Option<usize>,
    pub d_optimal: bool,
    pub bound_exact: Option<usize>,
    pub bound_corollary: Option<Rational>,
    pub bound_corollary_ceil: Option<u64>,
    pub greenberg: Status,
    pub gk: Status,
    pub gk_reason: Reason,
    pub flags: HypothesisFlags,
    pub version: &'static str,
    pub table_digest: String,
}

/// Everything computed for one prime, before projection.
#[derive(Clone, Debug)]
pub struct PrimeAnalysis {
    pub irregular: IrregularSet,
    pub table: PairingTable,
    pub congruence: CongruenceCheckResult,
    pub eligible: EligibleSet,
    pub greenberg: Verdict,
    pub height: HeightBound,
    pub gk: Verdict,
    pub flags: HypothesisFlags,
}

pub fn analyze(
    r: &IrregularSet,
    table: &PairingTable,
    flags: HypothesisFlags,
    node_budget: Option<u64>,
) -> Result<PrimeAnalysis> {
    let congruence = check_congruences(r);
    let eligible = eligible_set(r, table)?;
    let greenberg = greenberg_verdict(r, &eligible, flags)?;
    let height = height_lower_bound(r, &eligible, flags, node_budget)?;
    let gk = gk_verdict(r, &congruence, table, flags)?;
    Ok(PrimeAnalysis {
        irregular: r.clone(),
        table: table.clone(),
        congruence,
        eligible,
        greenberg,
        height,
        gk,
        flags,
    })
}

impl PrimeAnalysis {
    pub fn report(&self) -> Report {
        Report {
            p: self.irregular.prime(),
            irregular: self.irregular.indices().to_vec(),
            r: self.irregular.r(),
            congruence: CongruenceStatus::of(&self.congruence),
            s: self.eligible.s(),
            eligible: self.eligible.eligible.len(),
            missing: self.eligible.missing.len(),
            d: self.height.d,
            d_optimal: self.height.d_optimal,
            bound_exact: self.height.bound_exact,
            bound_corollary: self.height.bound_corollary,
            bound_corollary_ceil: self.height.bound_corollary_ceil,
            greenberg: self.greenberg.status,
            gk: self.gk.status,
            gk_reason: self.gk.detail.reason,
            flags: self.flags,
            version: TOOL_VERSION,
            table_digest: self.table.digest(),
        }
    }

    fn header(&self, criterion: &'static str) -> Header {
        Header {
            p: self.irregular.prime(),
            irregular: self.irregular.indices().to_vec(),
            r: self.irregular.r(),
            criterion,
        }
    }

    fn footer(&self) -> Footer {
        Footer {
            version: TOOL_VERSION,
            table_digest: self.table.digest(),
        }
    }

    pub fn greenberg_projection(&self) -> GreenbergProjection {
        GreenbergProjection {
            header: self.header("greenberg"),
            s: self.eligible.s(),
            eligible: self.eligible.eligible.len(),
            missing: self.eligible.missing.len(),
            verdict: self.greenberg.clone(),
            footer: self.footer(),
        }
    }

    pub fn height_projection(&self) -> HeightProjection {
        HeightProjection {
            header: self.header("height"),
            s: self.eligible.s(),
            missing: self.eligible.missing.len(),
            height: self.height.clone(),
            footer: self.footer(),
        }
    }

    pub fn gk_projection(&self) -> GkProjection {
        GkProjection {
            header: self.header("gk"),
            congruence: CongruenceStatus::of(&self.congruence),
            verdict: self.gk.clone(),
            footer: self.footer(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Header {
    pub p: PrimeModulus,
    #[serde(rename = "R")]
    pub irregular: Vec<u32>,
    pub r: usize,
    pub criterion: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct Footer {
    pub version: &'static str,
    pub table_digest: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GreenbergProjection {
    #[serde(flatten)]
    pub header: Header,
    pub s: Option<usize>,
    pub eligible: usize,
    pub missing: usize,
    pub verdict: Verdict,
    #[serde(flatten)]
    pub footer: Footer,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeightProjection {
    #[serde(flatten)]
    pub header: Header,
    pub s: Option<usize>,
    pub missing: usize,
    #[serde(flatten)]
    pub height: HeightBound,
    #[serde(flatten)]
    pub footer: Footer,
}

#[derive(Clone, Debug, Serialize)]
pub struct GkProjection {
    #[serde(flatten)]
    pub header: Header,
    pub congruence: CongruenceStatus,
    pub verdict: Verdict,
    #[serde(flatten)]
    pub footer: Footer,
}

/// Analysis of a single prime; the irregular set comes from the cache when
/// present.
pub fn analyze_prime(
    p: PrimeModulus,
    file: &PairingFile,
    overrides: FlagOverrides,
    node_budget: Option<u64>,
    cache: Option<&IrregularCache>,
) -> Result<PrimeAnalysis> {
    let r = match cache.and_then(|c| c.get(p)) {
        Some(hit) => hit,
        None => {
            let r = irregular_indices(p)?;
            if let Some(c) = cache {
                c.insert_all(std::slice::from_ref(&r));
            }
            r
        }
    };
    let table = file.table_for(&r)?;
    analyze(&r, &table, overrides.apply(p), node_budget)
}

/// Reports for every prime `7 <= p < max_p`, in ascending order whatever
/// `jobs` is.
pub fn report_stream(
    max_p: u64,
    file: &PairingFile,
    overrides: FlagOverrides,
    node_budget: Option<u64>,
    jobs: usize,
    cache: Option<&IrregularCache>,
) -> Result<Vec<Report>> {
    let sets = irregular_sweep(max_p, jobs, cache)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    pool.install(|| {
        sets.par_iter()
            .map(|r| {
                let table = file.table_for(r)?;
                Ok(analyze(r, &table, overrides.apply(r.prime()), node_budget)?.report())
            })
            .collect()
    })
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
}

pub const TSV_HEADER: &str = "p\tR\tr\tcongruence\ts\teligible\tmissing\td\td_optimal\tbound_exact\tbound_corollary\tbound_corollary_ceil\tgreenberg\tgk\tgk_reason\tvandiver\tprocyclic\tpairing_surjective\tversion\ttable_digest";

impl Report {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_tsv_row(&self) -> String {
        [
            self.p.to_string(),
            self.irregular
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(","),
            self.r.to_string(),
            label(&self.congruence),
            opt(&self.s),
            self.eligible.to_string(),
            self.missing.to_string(),
            opt(&self.d),
            self.d_optimal.to_string(),
            opt(&self.bound_exact),
            opt(&self.bound_corollary),
            opt(&self.bound_corollary_ceil),
            self.greenberg.to_string(),
            self.gk.to_string(),
            label(&self.gk_reason),
            label(&self.flags.vandiver),
            label(&self.flags.procyclic),
            label(&self.flags.pairing_surjective),
            self.version.to_string(),
            self.table_digest.clone(),
        ]
        .join("\t")
    }
}

/// The serde name of a unit enum variant.
fn label<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

/// Flattens a JSON object into `key<TAB>value` lines; nested values stay JSON.
pub fn object_to_tsv<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Internal(e.to_string()))?;
    let serde_json::Value::Object(map) = v else {
        return Err(Error::Internal("expected a JSON object".into()));
    };
    let mut out = String::new();
    for (k, v) in map {
        let cell = match v {
            serde_json::Value::String(s) => s,
            serde_json::Value::Null => "-".into(),
            other => other.to_string(),
        };
        out.push_str(&k);
        out.push('\t');
        out.push_str(&cell);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::pairing::synth_table;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn singleton_report() {
        let r = IrregularSet::new(pm(37), vec![32]).unwrap();
        let t = synth_table(&r, &BTreeSet::new(), 1).unwrap();
        let a = analyze(&r, &t, HypothesisFlags::defaults_for(pm(37)), None).unwrap();
        let rep = a.report();
        assert_eq!(rep.bound_exact, Some(19));
        assert_eq!(rep.greenberg, Status::Holds);
        assert_eq!(rep.gk, Status::Holds);
        let json = rep.to_json_line();
        assert!(json.starts_with("{\"p\":37,\"R\":[32],\"r\":1,"), "{json}");
        assert_eq!(
            rep.to_tsv_row().split('\t').count(),
            TSV_HEADER.split('\t').count()
        );
        let tsv = object_to_tsv(&a.height_projection()).unwrap();
        assert!(tsv.contains("bound_exact\t19\n"), "{tsv}");
        assert!(tsv.starts_with("p\t37\nR\t[32]\n"), "{tsv}");
    }

    #[test]
    fn stream_is_ordered_and_job_independent() {
        let file = PairingFile::parse(b"B 157 62 110 5\n").unwrap();
        let a = report_stream(400, &file, FlagOverrides::default(), None, 1, None).unwrap();
        let b = report_stream(400, &file, FlagOverrides::default(), None, 3, None).unwrap();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0].p < w[1].p));
        let r157 = a.iter().find(|x| x.p == pm(157)).unwrap();
        assert_eq!(r157.gk, Status::Holds);
        assert_eq!(r157.greenberg, Status::Conditional);
    }
}
