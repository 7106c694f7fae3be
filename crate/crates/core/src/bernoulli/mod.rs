//! Bernoulli numbers modulo p, irregular pairs and the all-primes sweep.
//!
//! Four routes compute `B_k mod p` for even `2 <= k <= p - 3`:
//!
//! * [`bernoulli_naive_row`]: the recurrence `sum_{j<=m} C(m+1, j) B_j = 0`
//!   run in `Z/p`. Quadratic; used as the oracle.
//! * [`bernoulli_voronoi`]: Voronoi's congruence for a single index,
//!   `(t^k - 1) B_k = k t^(k-1) sum_{j=1}^{p-1} j^(k-1) floor(j t / p)`.
//! * [`bernoulli_fast_row`]: the same congruence for every `k` at once, with
//!   base `t = g` a primitive root. Writing `j = g^a` turns the sum into a
//!   discrete Fourier transform over `(Z/p)^*`; folding `a` by `(p-1)/2` and
//!   Bluestein's `au = C(a+u,2) - C(a,2) - C(u,2)` reduce it to one wrapped
//!   convolution of length about `p`.
//! * [`bernoulli_series_row`]: `(x/2) coth(x/2) = sum B_2n x^2n / (2n)!` as a
//!   quotient of half-length series in `y = x^2`, inverted by Newton
//!   iteration on top of [`convolution_mod`]. A second quasi-linear route.
//!
//! All denominators involved are products of integers below `p`, so every
//! division is legal in this range (von Staudt–Clausen).

mod cache;

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modmath::{
    convolution_mod, convolution_mod_wrapped, odd_primes_in, series_inverse, PrimeModulus, Residue,
};

pub use cache::{IrregularCache, CACHE_FILE_NAME, CACHE_HEADER_PREFIX};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowMethod {
    Naive,
    Voronoi,
    Fast,
    Series,
}

impl fmt::Display for RowMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowMethod::Naive => "naive",
            RowMethod::Voronoi => "voronoi",
            RowMethod::Fast => "fast",
            RowMethod::Series => "series",
        })
    }
}

/// `B_k mod p` for every even `k` in `[2, p - 3]`.
#[derive(Clone, Debug)]
pub struct BernoulliRow {
    p: PrimeModulus,
    // values[j] = B_{2j+2} mod p
    values: Vec<u32>,
    method: RowMethod,
}

impl BernoulliRow {
    fn from_even_values(p: PrimeModulus, values: Vec<u32>, method: RowMethod) -> Self {
        debug_assert_eq!(values.len(), expected_len(p));
        BernoulliRow { p, values, method }
    }

    pub fn prime(&self) -> PrimeModulus {
        self.p
    }

    pub fn method(&self) -> RowMethod {
        self.method
    }

    /// `B_k mod p`, or `None` when `k` is odd or outside `[2, p - 3]`.
    pub fn get(&self, k: u32) -> Option<u32> {
        if k < 2 || k % 2 == 1 {
            return None;
        }
        self.values.get((k / 2 - 1) as usize).copied()
    }

    pub fn residue(&self, k: u32) -> Option<Residue> {
        self.get(k).map(|v| self.p.residue(u64::from(v)))
    }

    /// `(k, B_k mod p)` in ascending `k`.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(j, &v)| (2 * j as u32 + 2, v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same prime and same values; the producing method is ignored.
    pub fn same_values(&self, other: &BernoulliRow) -> bool {
        self.p == other.p && self.values == other.values
    }

    pub fn irregular_set(&self) -> IrregularSet {
        IrregularSet {
            p: self.p,
            indices: self
                .iter()
                .filter(|&(_, v)| v == 0)
                .map(|(k, _)| k)
                .collect(),
        }
    }
}

fn expected_len(p: PrimeModulus) -> usize {
    // even k in [2, p-3]
    ((p.get() - 3) / 2) as usize
}

fn check_row_prime(p: PrimeModulus) -> Result<()> {
    if p.get() < 5 {
        return Err(Error::Domain(format!(
            "no even index k with 2 <= k <= p - 3 exists for p = {p}"
        )));
    }
    Ok(())
}

/// Irregular indices of a prime: `R = { k even, 2 <= k <= p - 3 : p | B_k }`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IrregularSet {
    p: PrimeModulus,
    indices: Vec<u32>,
}

impl IrregularSet {
    /// Builds a set from explicit indices, checking that each is even and in
    /// `[2, p - 3]`. Does not check the Bernoulli condition, which lets tests
    /// plant synthetic sets.
    pub fn new(p: PrimeModulus, mut indices: Vec<u32>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if let Some(&bad) = indices
            .iter()
            .find(|&&k| k < 2 || k % 2 == 1 || k + 3 > p.get())
        {
            return Err(Error::Domain(format!(
                "{bad} is not an even index in [2, {}] for p = {p}",
                p.get().saturating_sub(3)
            )));
        }
        Ok(IrregularSet { p, indices })
    }

    pub fn prime(&self) -> PrimeModulus {
        self.p
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn contains(&self, k: u32) -> bool {
        self.indices.binary_search(&k).is_ok()
    }

    /// Index of irregularity.
    pub fn r(&self) -> usize {
        self.indices.len()
    }

    pub fn is_regular(&self) -> bool {
        self.indices.is_empty()
    }

    /// Comma-joined indices, as used by the TSV outputs.
    pub fn joined(&self) -> String {
        let parts: Vec<String> = self.indices.iter().map(u32::to_string).collect();
        parts.join(",")
    }
}

fn factorials(p: PrimeModulus, upto: usize) -> Vec<u64> {
    let mut f = Vec::with_capacity(upto + 1);
    f.push(1u64);
    for i in 1..=upto {
        f.push(p.mul(f[i - 1], i as u64));
    }
    f
}

/// Inverse factorials from the factorial table, with a single inversion.
fn inverse_factorials(p: PrimeModulus, fact: &[u64]) -> Result<Vec<u64>> {
    let n = fact.len();
    let mut inv = vec![0u64; n];
    inv[n - 1] = p.inv(fact[n - 1])?;
    for i in (1..n).rev() {
        inv[i - 1] = p.mul(inv[i], i as u64);
    }
    Ok(inv)
}

/// Row via the classical recurrence, `O(p^2)`.
pub fn bernoulli_naive_row(p: PrimeModulus) -> Result<BernoulliRow> {
    check_row_prime(p)?;
    let top = (p.get() - 3) as usize;
    let fact = factorials(p, top + 1);
    let inv_fact = inverse_factorials(p, &fact)?;
    let binom = |n: usize, k: usize| p.mul(fact[n], p.mul(inv_fact[k], inv_fact[n - k]));
    let mut b = vec![0u64; top + 1];
    b[0] = 1;
    for m in 1..=top {
        let mut s = 0;
        for (j, &bj) in b.iter().enumerate().take(m) {
            s = p.add(s, p.mul(binom(m + 1, j), bj));
        }
        b[m] = p.neg(p.mul(s, p.inv((m + 1) as u64)?));
    }
    let values = (2..=top).step_by(2).map(|k| b[k] as u32).collect();
    Ok(BernoulliRow::from_even_values(p, values, RowMethod::Naive))
}

fn check_index(p: PrimeModulus, k: u32) -> Result<()> {
    if k < 2 || k % 2 == 1 || k + 3 > p.get() {
        return Err(Error::Domain(format!(
            "k = {k} must be even with 2 <= k <= p - 3 = {}",
            i64::from(p.get()) - 3
        )));
    }
    Ok(())
}

/// Base for Voronoi's congruence: 2 unless `2^k = 1`, else the smallest
/// `t >= 3` with `t^k != 1`.
pub fn voronoi_base(p: PrimeModulus, k: u32) -> u64 {
    (2..p.as_u64())
        .find(|&t| p.pow(t, u64::from(k)) != 1)
        .expect("a primitive root has t^k != 1 for 0 < k < p - 1")
}

fn voronoi_from_sum(p: PrimeModulus, k: u32, t: u64, sum: u64) -> Result<u64> {
    let tk = p.pow(t, u64::from(k));
    let num = p.mul(p.mul(u64::from(k), p.pow(t, u64::from(k) - 1)), sum);
    Ok(p.mul(num, p.inv(p.sub(tk, 1))?))
}

/// `B_k mod p` for a single even `k`, `O(p log p)`.
pub fn bernoulli_voronoi(p: PrimeModulus, k: u32) -> Result<u64> {
    check_index(p, k)?;
    let t = voronoi_base(p, k);
    let pm = p.as_u64();
    let mut sum = 0;
    for j in 1..pm {
        let q = (j * t / pm) % pm;
        if q != 0 {
            sum = p.add(sum, p.mul(p.pow(j, u64::from(k) - 1), q));
        }
    }
    voronoi_from_sum(p, k, t, sum)
}

/// Full row through Voronoi's congruence, `O(p^2)` with incremental powers.
pub fn bernoulli_voronoi_row(p: PrimeModulus) -> Result<BernoulliRow> {
    check_row_prime(p)?;
    let pm = p.as_u64();
    let squares: Vec<u64> = (0..pm).map(|j| p.mul(j, j)).collect();
    // powers[j] = j^(k-1), starting at k = 2
    let mut powers: Vec<u64> = (0..pm).collect();
    let mut floors: Vec<(u64, Vec<u64>)> = Vec::new();
    let mut values = Vec::with_capacity(expected_len(p));
    let mut k = 2u32;
    while k + 3 <= p.get() {
        let t = voronoi_base(p, k);
        if !floors.iter().any(|(base, _)| *base == t) {
            floors.push((t, (0..pm).map(|j| (j * t / pm) % pm).collect()));
        }
        let fl = &floors
            .iter()
            .find(|(base, _)| *base == t)
            .expect("inserted above")
            .1;
        let sum = (1..pm as usize).fold(0, |acc, j| p.add(acc, p.mul(powers[j], fl[j])));
        values.push(voronoi_from_sum(p, k, t, sum)? as u32);
        for (pw, &sq) in powers.iter_mut().zip(&squares) {
            *pw = p.mul(*pw, sq);
        }
        k += 2;
    }
    Ok(BernoulliRow::from_even_values(
        p,
        values,
        RowMethod::Voronoi,
    ))
}

/// Quasi-linear row: Voronoi's congruence with a primitive-root base,
/// evaluated for all `k` by one Bluestein convolution.
pub fn bernoulli_fast_row(p: PrimeModulus) -> Result<BernoulliRow> {
    check_row_prime(p)?;
    let pm = p.as_u64();
    let g = p.primitive_root();
    let half = ((pm - 1) / 2) as usize; // order of v = g^2
                                        // H(a) = (h(a) - h(a + half)) g^a with h(a) = floor(g^a g / p);
                                        // since g^(a+half) = p - g^a, h(a + half) = g - 1 - h(a).
    let mut folded = Vec::with_capacity(half);
    let mut x = 1u64; // g^a as an integer in [1, p)
    for _ in 0..half {
        let h = x * g / pm;
        folded.push(p.mul(p.sub(p.reduce(2 * h), p.reduce(g - 1)), x));
        x = p.mul(x, g);
    }
    // chirp[x] = v^C(x,2), inv_chirp[x] = v^-C(x,2)
    let v = p.mul(g, g);
    let v_inv = p.inv(v)?;
    let span = 2 * half - 1;
    let mut chirp = Vec::with_capacity(span);
    let mut inv_chirp = Vec::with_capacity(half);
    let (mut c, mut ci, mut vx, mut vxi) = (1u64, 1u64, 1u64, 1u64);
    for idx in 0..span {
        chirp.push(c);
        if idx < half {
            inv_chirp.push(ci);
        }
        c = p.mul(c, vx);
        ci = p.mul(ci, vxi);
        vx = p.mul(vx, v);
        vxi = p.mul(vxi, v_inv);
    }
    // sum_a A(a) chirp(a + u) as a correlation against the reversed A
    let reversed: Vec<u64> = (0..half)
        .rev()
        .map(|a| p.mul(folded[a], inv_chirp[a]))
        .collect();
    let len = span.max(half).next_power_of_two();
    let corr = convolution_mod_wrapped(&reversed, &chirp[..span.min(len)], len, p);
    let mut values = Vec::with_capacity(expected_len(p));
    let mut g_pow = g; // g^(k-1), starting at k = 2
    let g_sq = p.mul(g, g);
    for u in 0..half.saturating_sub(1) {
        let k = 2 * u as u64 + 2;
        let sum = p.mul(inv_chirp[u], corr[half - 1 + u]);
        let num = p.mul(p.mul(k, g_pow), sum);
        let den = p.sub(p.mul(g_pow, g), 1);
        values.push(p.mul(num, p.inv(den)?) as u32);
        g_pow = p.mul(g_pow, g_sq);
    }
    Ok(BernoulliRow::from_even_values(p, values, RowMethod::Fast))
}

/// Quasi-linear row through series inversion.
pub fn bernoulli_series_row(p: PrimeModulus) -> Result<BernoulliRow> {
    check_row_prime(p)?;
    // coefficients of y^j for j < n, with 2j + 1 <= p - 2
    let n = ((p.get() - 1) / 2) as usize;
    let fact = factorials(p, 2 * n - 1);
    let inv_fact = inverse_factorials(p, &fact)?;
    let inv4 = p.inv(4)?;
    let mut sinh_over = Vec::with_capacity(n);
    let mut cosh = Vec::with_capacity(n);
    let mut scale = 1;
    for j in 0..n {
        // sinh(x/2)/(x/2) and cosh(x/2) in y = x^2
        sinh_over.push(p.mul(scale, inv_fact[2 * j + 1]));
        cosh.push(p.mul(scale, inv_fact[2 * j]));
        scale = p.mul(scale, inv4);
    }
    let inv = series_inverse(&sinh_over, n, p)?;
    let quotient = convolution_mod(&cosh, &inv, p);
    let values = (1..n)
        .map(|j| p.mul(quotient[j], fact[2 * j]) as u32)
        .collect();
    Ok(BernoulliRow::from_even_values(p, values, RowMethod::Series))
}

pub fn bernoulli_row(p: PrimeModulus, method: RowMethod) -> Result<BernoulliRow> {
    match method {
        RowMethod::Naive => bernoulli_naive_row(p),
        RowMethod::Voronoi => bernoulli_voronoi_row(p),
        RowMethod::Fast => bernoulli_fast_row(p),
        RowMethod::Series => bernoulli_series_row(p),
    }
}

/// `R` for `p` from the fast row. `p = 5` gives the empty set.
pub fn irregular_indices(p: PrimeModulus) -> Result<IrregularSet> {
    Ok(bernoulli_fast_row(p)?.irregular_set())
}

/// `IrregularSet` for every odd prime `7 <= p < p_max`, ascending.
///
/// Work is spread over a pool of `jobs` threads; the output order and content
/// do not depend on `jobs`. Cached entries are reused and fresh results are
/// inserted into the cache (the caller decides when to flush it).
pub fn irregular_sweep(
    p_max: u64,
    jobs: usize,
    cache: Option<&IrregularCache>,
) -> Result<Vec<IrregularSet>> {
    if jobs == 0 {
        return Err(Error::Domain("jobs must be at least 1".into()));
    }
    let primes = odd_primes_in(7, p_max);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let sets: Vec<IrregularSet> = pool.install(|| {
        primes
            .par_iter()
            .map(|&p| match cache.and_then(|c| c.get(p)) {
                Some(hit) => Ok(hit),
                None => irregular_indices(p),
            })
            .collect::<Result<Vec<_>>>()
    })?;
    if let Some(cache) = cache {
        cache.insert_all(&sets);
    }
    Ok(sets)
}
