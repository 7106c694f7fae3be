//! On-disk cache of irregular sets.
//!
//! One file, `irregular.tsv`, inside the cache directory:
//!
//! ```text
//! # unramified irregular-cache v0.1.0
//! 7
//! 37      32
//! 157     62,110
//! ```
//!
//! Fields are tab-separated and lines are sorted by p; regular primes carry an
//! empty list. The cache is advisory. Malformed lines and listed indices whose
//! Bernoulli number is not actually zero are logged and dropped, so those
//! primes get recomputed.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use log::warn;

use super::{bernoulli_voronoi, IrregularSet};
use crate::error::Result;
use crate::modmath::PrimeModulus;

pub const CACHE_FILE_NAME: &str = "irregular.tsv";
pub const CACHE_HEADER_PREFIX: &str = "# unramified irregular-cache";

#[derive(Debug)]
pub struct IrregularCache {
    path: PathBuf,
    entries: Mutex<BTreeMap<u32, IrregularSet>>,
    diagnostics: Vec<String>,
}

impl IrregularCache {
    /// Opens (or starts) the cache in `dir`. The directory is created on
    /// [`flush`](Self::flush), not here, so a read-only location still works
    /// as an empty cache.
    pub fn open(dir: &Path) -> Self {
        let path = dir.join(CACHE_FILE_NAME);
        let mut diagnostics = Vec::new();
        let entries = match fs::read_to_string(&path) {
            Ok(text) => parse_cache(&text, &mut diagnostics),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => {
                diagnostics.push(format!("cannot read {}: {e}", path.display()));
                BTreeMap::new()
            }
        };
        for d in &diagnostics {
            warn!("irregular cache: {d}");
        }
        IrregularCache {
            path,
            entries: Mutex::new(entries),
            diagnostics,
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Problems found while loading; each affected prime will be recomputed.
    pub fn diagnostics(&self) -> &[String] {
        &self.diagnostics
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, p: PrimeModulus) -> Option<IrregularSet> {
        self.entries
            .lock()
            .expect("cache lock")
            .get(&p.get())
            .cloned()
    }

    pub fn insert_all(&self, sets: &[IrregularSet]) {
        let mut entries = self.entries.lock().expect("cache lock");
        for s in sets {
            entries.insert(s.prime().get(), s.clone());
        }
    }

    /// Writes the whole cache atomically (temp file, then rename).
    pub fn flush(&self) -> Result<()> {
        let entries = self.entries.lock().expect("cache lock");
        let mut out = format!("{CACHE_HEADER_PREFIX} v{}\n", env!("CARGO_PKG_VERSION"));
        for (p, set) in entries.iter() {
            out.push_str(&format!("{p}\t{}\n", set.joined()));
        }
        if let Some(dir) = self.path.parent() {
            fs::create_dir_all(dir)?;
        }
        let tmp = self.path.with_extension("tsv.tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(out.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &self.path)?;
        Ok(())
    }
}

fn parse_cache(text: &str, diagnostics: &mut Vec<String>) -> BTreeMap<u32, IrregularSet> {
    let mut entries = BTreeMap::new();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.starts_with(CACHE_HEADER_PREFIX) => {}
        _ => {
            diagnostics.push("missing header line; ignoring the whole file".into());
            return entries;
        }
    }
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(line) {
            Ok(set) => {
                if entries.insert(set.prime().get(), set).is_some() {
                    diagnostics.push(format!("line {}: duplicate prime", idx + 1));
                }
            }
            Err(msg) => diagnostics.push(format!("line {}: {msg}", idx + 1)),
        }
    }
    entries
}

fn parse_line(line: &str) -> std::result::Result<IrregularSet, String> {
    let (p_field, ks_field) = line
        .split_once('\t')
        .ok_or_else(|| "expected p<TAB>k-list".to_string())?;
    let p_raw: u64 = p_field
        .parse()
        .map_err(|_| format!("bad prime {p_field:?}"))?;
    let p = PrimeModulus::new(p_raw).map_err(|e| e.to_string())?;
    let mut ks = Vec::new();
    if !ks_field.is_empty() {
        for part in ks_field.split(',') {
            ks.push(
                part.parse::<u32>()
                    .map_err(|_| format!("bad index {part:?}"))?,
            );
        }
    }
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err("indices not strictly ascending".into());
    }
    let set = IrregularSet::new(p, ks).map_err(|e| e.to_string())?;
    for &k in set.indices() {
        if bernoulli_voronoi(p, k).map_err(|e| e.to_string())? != 0 {
            return Err(format!("B_{k} is not divisible by {p}"));
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let cache = IrregularCache::open(dir.path());
        assert!(cache.is_empty());
        let p37 = PrimeModulus::new(37).unwrap();
        let p7 = PrimeModulus::new(7).unwrap();
        cache.insert_all(&[
            IrregularSet::new(p37, vec![32]).unwrap(),
            IrregularSet::new(p7, vec![]).unwrap(),
        ]);
        cache.flush().unwrap();
        let text = fs::read_to_string(dir.path().join(CACHE_FILE_NAME)).unwrap();
        assert!(text.starts_with(CACHE_HEADER_PREFIX));
        assert!(text.ends_with("7\t\n37\t32\n"));
        let reopened = IrregularCache::open(dir.path());
        assert!(reopened.diagnostics().is_empty());
        assert_eq!(reopened.get(p37).unwrap().indices(), &[32]);
        assert!(reopened.get(p7).unwrap().is_regular());
    }

    #[test]
    fn corrupt_lines_are_dropped_and_reported() {
        let dir = tempfile::tempdir().unwrap();
        let body = format!("{CACHE_HEADER_PREFIX} v0\n37\t30\n41\n43\tx\n59\t44\n9\t\n");
        fs::write(dir.path().join(CACHE_FILE_NAME), body).unwrap();
        let cache = IrregularCache::open(dir.path());
        assert_eq!(cache.len(), 1, "only 59 survives");
        assert_eq!(cache.diagnostics().len(), 4);
        assert!(cache.get(PrimeModulus::new(37).unwrap()).is_none());
    }

    #[test]
    fn headerless_file_is_ignored() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(CACHE_FILE_NAME), "37\t32\n").unwrap();
        let cache = IrregularCache::open(dir.path());
        assert!(cache.is_empty());
        assert_eq!(cache.diagnostics().len(), 1);
    }
}
