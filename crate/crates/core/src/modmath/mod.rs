//! Exact arithmetic modulo an odd prime `p < 2^32`, plus the residue-class
//! helpers modulo `p - 1` used for eigenspace indices.
//!
//! Hot loops (Bernoulli rows, convolution) work on raw `u64` values through
//! the methods on [`PrimeModulus`]; [`Residue`] carries its modulus along and
//! is what the public free functions accept.

mod ntt;
mod series;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub use ntt::{convolution_mod, convolution_mod_wrapped, convolution_schoolbook};
pub use series::series_inverse;

/// An odd prime modulus, checked at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct PrimeModulus(u32);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p > u64::from(u32::MAX) || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeModulus(p as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_u64(self) -> u64 {
        u64::from(self.0)
    }

    /// `p - 1`, the modulus for eigenspace indices.
    #[inline]
    pub fn group_order(self) -> u64 {
        u64::from(self.0) - 1
    }

    #[inline]
    pub fn reduce(self, a: u64) -> u64 {
        a % self.as_u64()
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.as_u64() {
            s - self.as_u64()
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.as_u64() - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.as_u64() - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.as_u64()
    }

    pub fn pow(self, a: u64, mut e: u64) -> u64 {
        let mut base = self.reduce(a);
        let mut acc = 1 % self.as_u64();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u64) -> Result<u64> {
        let a = self.reduce(a);
        if a == 0 {
            return Err(Error::NotInvertible {
                value: a,
                modulus: self.as_u64(),
            });
        }
        // Extended Euclid on signed values; p < 2^32 fits comfortably in i64.
        let (mut r0, mut r1) = (self.as_u64() as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(t0.rem_euclid(self.as_u64() as i64) as u64)
    }

    /// Smallest positive generator of `(Z/p)^*`.
    pub fn primitive_root(self) -> u64 {
        let order = self.group_order();
        let factors = prime_factors(order);
        (2..self.as_u64())
            .find(|&g| factors.iter().all(|&q| self.pow(g, order / q) != 1))
            // p = 3: the loop range is {2}, always found; the fallback covers nothing real.
            .unwrap_or(1)
    }

    /// Multiplicative order of `a`, which must be nonzero mod p.
    pub fn order_of(self, a: u64) -> u64 {
        let mut ord = self.group_order();
        for q in prime_factors(ord) {
            while ord.is_multiple_of(q) && self.pow(a, ord / q) == 1 {
                ord /= q;
            }
        }
        ord
    }

    pub fn residue(self, value: u64) -> Residue {
        Residue::new(value, self.as_u64())
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A value in `[0, m)` tagged with its modulus `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    /// Reduces `value` into `[0, modulus)`. Panics on a zero modulus.
    pub fn new(value: u64, modulus: u64) -> Self {
        assert!(modulus > 0, "residue modulus must be positive");
        Residue {
            value: value % modulus,
            modulus,
        }
    }

    /// Reduces a signed value, e.g. an index difference.
    pub fn from_signed(value: i64, modulus: u64) -> Self {
        assert!(modulus > 0, "residue modulus must be positive");
        Residue {
            value: value.rem_euclid(modulus as i64) as u64,
            modulus,
        }
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

fn check_modulus(a: Residue, p: PrimeModulus) -> Result<()> {
    if a.modulus != p.as_u64() {
        return Err(Error::ModulusMismatch {
            expected: p.as_u64(),
            got: a.modulus,
        });
    }
    Ok(())
}

/// Inverse of a nonzero residue modulo p.
pub fn mod_inv(a: Residue, p: PrimeModulus) -> Result<Residue> {
    check_modulus(a, p)?;
    Ok(p.residue(p.inv(a.value)?))
}

/// `a^e mod p`; `e = 0` gives 1.
pub fn pow_mod(a: Residue, e: u64, p: PrimeModulus) -> Result<Residue> {
    check_modulus(a, p)?;
    Ok(p.residue(p.pow(a.value, e)))
}

pub fn primitive_root(p: PrimeModulus) -> Residue {
    p.residue(p.primitive_root())
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    (u128::from(a) * u128::from(b) % u128::from(m)) as u64
}

fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, a, m);
        }
        a = mul_mod_u64(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin. The witnesses 2, 3, 5, 7, 11 are exact for
/// every n below 2,152,302,898,747, which covers all of `u32`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 5] = [2, 3, 5, 7, 11];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors in ascending order, by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            out.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Odd primes `p` with `lo <= p < hi`, ascending (sieve of Eratosthenes).
pub fn odd_primes_in(lo: u64, hi: u64) -> Vec<PrimeModulus> {
    if hi <= 3 || lo >= hi {
        return Vec::new();
    }
    let hi = hi.min(u64::from(u32::MAX) + 1) as usize;
    let mut composite = vec![false; hi];
    let mut i = 2;
    while i * i < hi {
        if !composite[i] {
            let mut j = i * i;
            while j < hi {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (lo.max(3) as usize..hi)
        .filter(|&n| n % 2 == 1 && !composite[n])
        .map(|n| PrimeModulus(n as u32))
        .collect()
}
