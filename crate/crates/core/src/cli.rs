//! Command-line front end. [`run`] takes the argument list and output streams
//! and returns the process exit code, so it can be driven from tests.
//!
//! Exit codes: 0 success, 1 internal error, 2 usage or data error, and 3 when
//! `congruence-sweep` finds violations.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bernoulli::{
    bernoulli_naive_row, bernoulli_row, irregular_sweep, IrregularCache, IrregularSet, RowMethod,
};
use crate::criteria::{FlagOverrides, Hypothesis, Surjectivity, DEFAULT_NODE_BUDGET};
use crate::eigen::congruence_sweep;
use crate::error::{Error, Result};
use crate::modmath::PrimeModulus;
use crate::pairing::PairingFile;
use crate::report::{analyze_prime, object_to_tsv, report_stream, TSV_HEADER};

/// Environment variable naming the irregular-cache directory when `--cache`
/// is not given.
pub const CACHE_ENV: &str = "UNRAMIFIED_CACHE_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VIOLATIONS: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "unramified",
    version,
    about = "Irregular primes, pairing data and the verdicts built on them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bernoulli numbers B_k mod p for even k in [2, p-3].
    Bern {
        p: u64,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, value_enum, default_value_t = MethodArg::Fast)]
        method: MethodArg,
    },
    /// Irregular primes below a bound, one "p<TAB>k1,k2,..." line each.
    Irregular {
        #[arg(long)]
        max_p: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Violations of the index congruences below a bound.
    CongruenceSweep {
        #[arg(long)]
        max_p: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Replace the irregular set of a prime, as "p:k1,k2,...".
        #[arg(long, value_name = "P:K,K")]
        inject: Vec<String>,
    },
    /// One verdict for one prime.
    Criteria {
        #[arg(value_enum)]
        which: Which,
        p: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Full per-prime reports below a bound.
    Report {
        #[arg(long)]
        max_p: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Pairing TSV file, or "-" for stdin.
    #[arg(long)]
    pairing: String,
    #[arg(long, value_parser = parse_hypothesis)]
    vandiver: Option<Hypothesis>,
    #[arg(long, value_parser = parse_hypothesis)]
    procyclic: Option<Hypothesis>,
    #[arg(long, value_enum, default_value_t = SurjectiveArg::Auto)]
    surjective: SurjectiveArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Branching budget for the exact packing search; 0 means unlimited.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
    #[arg(long)]
    cache: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> FlagOverrides {
        FlagOverrides {
            vandiver: self.vandiver,
            procyclic: self.procyclic,
            pairing_surjective: match self.surjective {
                SurjectiveArg::Yes => Some(Surjectivity::True),
                SurjectiveArg::No => Some(Surjectivity::Unknown),
                SurjectiveArg::Auto => None,
            },
        }
    }

    fn budget(&self) -> Option<u64> {
        (self.node_budget > 0).then_some(self.node_budget)
    }
}

fn parse_hypothesis(s: &str) -> std::result::Result<Hypothesis, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Naive,
    Voronoi,
    Fast,
    Series,
}

impl From<MethodArg> for RowMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Naive => RowMethod::Naive,
            MethodArg::Voronoi => RowMethod::Voronoi,
            MethodArg::Fast => RowMethod::Fast,
            MethodArg::Series => RowMethod::Series,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Which {
    Greenberg,
    Height,
    Gk,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SurjectiveArg {
    Yes,
    No,
    Auto,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

/// Rows above this prime are not cross-checked against the recurrence.
const CROSS_CHECK_LIMIT: u64 = 200;

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Internal(_) => EXIT_INTERNAL,
                Error::Io(ref io) if io.kind() == std::io::ErrorKind::BrokenPipe => EXIT_OK,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Bern { p, k, method } => bern(p, k, method, out),
        Command::Irregular { max_p, jobs, cache } => {
            let cache = open_cache(cache);
            let sets = irregular_sweep(max_p, jobs, cache.as_ref())?;
            for s in sets.iter().filter(|s| !s.is_regular()) {
                writeln!(out, "{}\t{}", s.prime(), s.joined())?;
            }
            flush_cache(cache, err);
            Ok(EXIT_OK)
        }
        Command::CongruenceSweep {
            max_p,
            jobs,
            cache,
            inject,
        } => {
            let cache = open_cache(cache);
            let mut sets: BTreeMap<PrimeModulus, IrregularSet> =
                irregular_sweep(max_p, jobs, cache.as_ref())?
                    .into_iter()
                    .map(|s| (s.prime(), s))
                    .collect();
            flush_cache(cache, err);
            for spec in &inject {
                let s = parse_injection(spec)?;
                sets.insert(s.prime(), s);
            }
            let found = congruence_sweep(max_p, sets.values());
            for c in &found {
                for line in c.tsv_lines() {
                    writeln!(out, "{line}")?;
                }
            }
            Ok(if found.is_empty() {
                EXIT_OK
            } else {
                EXIT_VIOLATIONS
            })
        }
        Command::Criteria { which, p, common } => {
            let p = PrimeModulus::new(p)?;
            let file = load_pairing(&common.pairing)?;
            let cache = open_cache(common.cache.clone());
            let a = analyze_prime(
                p,
                &file,
                common.overrides(),
                common.budget(),
                cache.as_ref(),
            )?;
            flush_cache(cache, err);
            let text = match (which, common.format) {
                (Which::Greenberg, Format::Json) => json(&a.greenberg_projection())?,
                (Which::Greenberg, Format::Tsv) => object_to_tsv(&a.greenberg_projection())?,
                (Which::Height, Format::Json) => json(&a.height_projection())?,
                (Which::Height, Format::Tsv) => object_to_tsv(&a.height_projection())?,
                (Which::Gk, Format::Json) => json(&a.gk_projection())?,
                (Which::Gk, Format::Tsv) => object_to_tsv(&a.gk_projection())?,
            };
            out.write_all(text.as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Report {
            max_p,
            jobs,
            common,
        } => {
            let file = load_pairing(&common.pairing)?;
            let cache = open_cache(common.cache.clone());
            let reports = report_stream(
                max_p,
                &file,
                common.overrides(),
                common.budget(),
                jobs,
                cache.as_ref(),
            )?;
            flush_cache(cache, err);
            if let Format::Tsv = common.format {
                writeln!(out, "{TSV_HEADER}")?;
            }
            for r in &reports {
                match common.format {
                    Format::Json => writeln!(out, "{}", r.to_json_line())?,
                    Format::Tsv => writeln!(out, "{}", r.to_tsv_row())?,
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string(value).map_err(|e| Error::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn bern(p: u64, k: Option<u32>, method: MethodArg, out: &mut dyn Write) -> Result<i32> {
    let p = PrimeModulus::new(p)?;
    let row = bernoulli_row(p, method.into())?;
    if p.as_u64() <= CROSS_CHECK_LIMIT && !matches!(method, MethodArg::Naive) {
        let naive = bernoulli_naive_row(p)?;
        if !row.same_values(&naive) {
            return Err(Error::Internal(format!(
                "{} row for p = {p} disagrees with the recurrence",
                row.method()
            )));
        }
    }
    match k {
        Some(k) => {
            let v = row.get(k).ok_or_else(|| {
                Error::Domain(format!(
                    "k = {k} is not an even index in [2, {}]",
                    p.get() - 3
                ))
            })?;
            writeln!(out, "{k}\t{v}")?;
        }
        None => {
            for (k, v) in row.iter() {
                writeln!(out, "{k}\t{v}")?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn parse_injection(spec: &str) -> Result<IrregularSet> {
    let bad = || Error::Domain(format!("injection {spec:?} is not of the form p:k1,k2,..."));
    let (p, ks) = spec.split_once(':').ok_or_else(bad)?;
    let p = PrimeModulus::new(p.trim().parse().map_err(|_| bad())?)?;
    let ks = ks
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<u32>().map_err(|_| bad()))
        .collect::<Result<Vec<_>>>()?;
    IrregularSet::new(p, ks)
}

fn load_pairing(path: &str) -> Result<PairingFile> {
    let bytes = if path == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        buf
    } else {
        fs::read(path)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{path}: {e}"))))?
    };
    PairingFile::parse(&bytes)
}

fn open_cache(flag: Option<PathBuf>) -> Option<IrregularCache> {
    let dir = flag.or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))?;
    Some(IrregularCache::open(&dir))
}

fn flush_cache(cache: Option<IrregularCache>, err: &mut dyn Write) {
    if let Some(cache) = cache {
        if let Err(e) = cache.flush() {
            let _ = writeln!(
                err,
                "warning: cannot write irregular cache {}: {e}",
                cache.path().display()
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("unramified").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn bern_rows() {
        assert_eq!(
            call(&["bern", "7"]),
            (0, "2\t6\n4\t3\n".into(), String::new())
        );
        assert_eq!(call(&["bern", "1217", "--k", "784"]).1, "784\t0\n");
        assert_eq!(call(&["bern", "9", "--k", "2"]).0, 2);
        assert_eq!(call(&["bern", "37", "--k", "3"]).0, 2);
        assert_eq!(
            call(&["bern", "101", "--method", "voronoi", "--k", "68"]).1,
            "68\t0\n"
        );
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&[]).0, 2);
        assert_eq!(call(&["bern"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn irregular_small() {
        assert_eq!(call(&["irregular", "--max-p", "40"]).1, "37\t32\n");
        assert_eq!(call(&["irregular", "--max-p", "8"]).1, "");
    }

    #[test]
    fn injected_violation() {
        let (code, out, _) = call(&["congruence-sweep", "--max-p", "100", "--inject", "13:4,10"]);
        assert_eq!(code, 3);
        assert_eq!(out, "13\tsum-two\t4,10\n");
        assert_eq!(
            call(&["congruence-sweep", "--max-p", "100"]),
            (0, String::new(), String::new())
        );
        assert_eq!(
            call(&["congruence-sweep", "--max-p", "100", "--inject", "13:5"]).0,
            2
        );
    }

    #[test]
    fn missing_pairing_file() {
        assert_eq!(
            call(&["criteria", "gk", "11", "--pairing", "/nonexistent/x.tsv"]).0,
            2
        );
    }
}
