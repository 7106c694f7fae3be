//! Convolution modulo an arbitrary prime `p < 2^32`.
//!
//! Inputs are lifted to integers in `[0, p)`, convolved exactly over up to
//! three NTT-friendly primes, recombined with Garner's CRT and reduced mod `p`.
//! The number of auxiliary primes is the smallest one whose product exceeds
//! the largest possible integer coefficient `min(|u|, |v|) * (p - 1)^2`.
//! Short inputs, and inputs too large for the auxiliary primes, go through the
//! schoolbook loop instead. Either way the result is bit-identical to it.

use super::PrimeModulus;

const M1: u64 = 998_244_353; // 119 * 2^23 + 1
const M2: u64 = 469_762_049; // 7 * 2^26 + 1
const M3: u64 = 167_772_161; // 5 * 2^25 + 1
const GENERATOR: u64 = 3; // primitive root of all three
const MAX_NTT_LOG: u32 = 23;
const SCHOOLBOOK_CUTOFF: usize = 48;

#[inline]
fn pow_const<const M: u64>(mut a: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    a %= M;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % M;
        }
        a = a * a % M;
        e >>= 1;
    }
    acc
}

fn transform<const M: u64>(a: &mut [u64], invert: bool) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    // roots[k] = w^k for the primitive n-th root w (or its inverse)
    let mut w = pow_const::<M>(GENERATOR, (M - 1) / n as u64);
    if invert {
        w = pow_const::<M>(w, M - 2);
    }
    let half = n / 2;
    let mut roots = Vec::with_capacity(half.max(1));
    let mut cur = 1u64;
    for _ in 0..half.max(1) {
        roots.push(cur);
        cur = cur * w % M;
    }
    let mut len = 2;
    while len <= n {
        let step = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..len / 2 {
                let u = a[start + k];
                let v = a[start + k + len / 2] * roots[k * step] % M;
                a[start + k] = if u + v >= M { u + v - M } else { u + v };
                a[start + k + len / 2] = if u >= v { u - v } else { u + M - v };
            }
        }
        len <<= 1;
    }
    if invert {
        let n_inv = pow_const::<M>(n as u64, M - 2);
        for x in a.iter_mut() {
            *x = *x * n_inv % M;
        }
    }
}

fn cyclic_product<const M: u64>(u: &[u64], v: &[u64], size: usize) -> Vec<u64> {
    let mut a = vec![0u64; size];
    let mut b = vec![0u64; size];
    for (dst, &x) in a.iter_mut().zip(u) {
        *dst = x % M;
    }
    for (dst, &x) in b.iter_mut().zip(v) {
        *dst = x % M;
    }
    transform::<M>(&mut a, false);
    transform::<M>(&mut b, false);
    for (x, y) in a.iter_mut().zip(&b) {
        *x = *x * *y % M;
    }
    transform::<M>(&mut a, true);
    a
}

/// Schoolbook reference: `result[n] = sum_{i+j=n} u[i] v[j] mod p`.
pub fn convolution_schoolbook(u: &[u64], v: &[u64], p: PrimeModulus) -> Vec<u64> {
    if u.is_empty() || v.is_empty() {
        return Vec::new();
    }
    let m = u128::from(p.as_u64());
    let mut acc = vec![0u128; u.len() + v.len() - 1];
    for (i, &x) in u.iter().enumerate() {
        let x = u128::from(x) % m;
        if x == 0 {
            continue;
        }
        for (j, &y) in v.iter().enumerate() {
            acc[i + j] += x * (u128::from(y) % m);
        }
        // keep headroom: reduce every row once the accumulators could overflow
        if i % 1024 == 1023 {
            for a in acc.iter_mut() {
                *a %= m;
            }
        }
    }
    acc.into_iter().map(|a| (a % m) as u64).collect()
}

/// Largest exact integer coefficient `shortest * (p - 1)^2` decides how many
/// auxiliary primes are needed; `None` means none suffice.
fn crt_width(shortest: usize, pm: u64) -> Option<usize> {
    let bound = shortest as u128 * u128::from(pm - 1) * u128::from(pm - 1);
    let m12 = u128::from(M1) * u128::from(M2);
    if bound < u128::from(M1) {
        Some(1)
    } else if bound < m12 {
        Some(2)
    } else if bound < m12 * u128::from(M3) {
        Some(3)
    } else {
        None
    }
}

/// Cyclic product of length `size` (a power of two), lifted exactly through
/// `width` auxiliary primes and reduced mod `pm`.
fn cyclic_mod(u: &[u64], v: &[u64], size: usize, width: usize, pm: u64) -> Vec<u64> {
    let m12 = u128::from(M1) * u128::from(M2);
    match width {
        1 => cyclic_product::<M1>(u, v, size)
            .into_iter()
            .map(|x| x % pm)
            .collect(),
        2 => {
            let r1 = cyclic_product::<M1>(u, v, size);
            let r2 = cyclic_product::<M2>(u, v, size);
            let inv_m1 = pow_const::<M2>(M1 % M2, M2 - 2);
            r1.iter()
                .zip(&r2)
                .map(|(&a, &b)| {
                    let x2 = (b + M2 - a % M2) % M2 * inv_m1 % M2;
                    ((u128::from(a) + u128::from(x2) * u128::from(M1)) % u128::from(pm)) as u64
                })
                .collect()
        }
        _ => {
            let r1 = cyclic_product::<M1>(u, v, size);
            let r2 = cyclic_product::<M2>(u, v, size);
            let r3 = cyclic_product::<M3>(u, v, size);
            let inv_m1_m2 = pow_const::<M2>(M1 % M2, M2 - 2);
            let inv_m12_m3 = pow_const::<M3>((m12 % u128::from(M3)) as u64, M3 - 2);
            let m1_m3 = M1 % M3;
            r1.iter()
                .zip(&r2)
                .zip(&r3)
                .map(|((&a, &b), &c)| {
                    let x2 = (b + M2 - a % M2) % M2 * inv_m1_m2 % M2;
                    // (c - a - x2*m1) mod m3
                    let sub = (a % M3 + x2 % M3 * m1_m3) % M3;
                    let x3 = (c + M3 - sub) % M3 * inv_m12_m3 % M3;
                    let x = u128::from(a) + u128::from(x2) * u128::from(M1) + u128::from(x3) * m12;
                    (x % u128::from(pm)) as u64
                })
                .collect()
        }
    }
}

/// Convolution of two residue sequences modulo `p`. Entries need not be
/// reduced; the result has length `|u| + |v| - 1` (empty if either is empty).
pub fn convolution_mod(u: &[u64], v: &[u64], p: PrimeModulus) -> Vec<u64> {
    if u.is_empty() || v.is_empty() {
        return Vec::new();
    }
    let out_len = u.len() + v.len() - 1;
    let size = out_len.next_power_of_two();
    let shortest = u.len().min(v.len());
    let pm = p.as_u64();
    match crt_width(shortest, pm) {
        Some(width) if shortest > SCHOOLBOOK_CUTOFF && size <= 1 << MAX_NTT_LOG => {
            let u: Vec<u64> = u.iter().map(|&x| x % pm).collect();
            let v: Vec<u64> = v.iter().map(|&x| x % pm).collect();
            let mut out = cyclic_mod(&u, &v, size, width, pm);
            out.truncate(out_len);
            out
        }
        _ => convolution_schoolbook(u, v, p),
    }
}

/// Convolution wrapped modulo `x^len - 1`: `result[n] = sum_{i+j = n mod len}`.
/// `len` must be a power of two no smaller than either input.
pub fn convolution_mod_wrapped(u: &[u64], v: &[u64], len: usize, p: PrimeModulus) -> Vec<u64> {
    assert!(
        len.is_power_of_two(),
        "wrapped length must be a power of two"
    );
    assert!(
        u.len() <= len && v.len() <= len,
        "inputs longer than the wrap length"
    );
    if u.is_empty() || v.is_empty() {
        return vec![0; len];
    }
    let shortest = u.len().min(v.len());
    let pm = p.as_u64();
    match crt_width(shortest, pm) {
        Some(width) if shortest > SCHOOLBOOK_CUTOFF && len <= 1 << MAX_NTT_LOG => {
            let u: Vec<u64> = u.iter().map(|&x| x % pm).collect();
            let v: Vec<u64> = v.iter().map(|&x| x % pm).collect();
            cyclic_mod(&u, &v, len, width, pm)
        }
        _ => {
            let mut out = vec![0u64; len];
            for (n, c) in convolution_schoolbook(u, v, p).into_iter().enumerate() {
                out[n % len] = p.add(out[n % len], c);
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(convolution_mod(&[1, 1], &[1, 1], pm(5)), vec![1, 2, 1]);
        assert_eq!(convolution_mod(&[4], &[5], pm(7)), vec![6]);
        assert_eq!(
            convolution_mod(&[1, 2, 3], &[4, 5], pm(7)),
            vec![4, 6, 1, 1]
        );
        assert!(convolution_mod(&[], &[1], pm(7)).is_empty());
    }

    #[test]
    fn each_crt_width_matches_schoolbook() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // one, two and three auxiliary primes respectively
        for &p in &[101u64, 1_000_003, 2_147_483_647, 4_294_967_291] {
            let p = pm(p);
            for len in [49usize, 100, 333] {
                let u: Vec<u64> = (0..len).map(|_| rng.gen_range(0..p.as_u64())).collect();
                let v: Vec<u64> = (0..len + 17)
                    .map(|_| rng.gen_range(0..p.as_u64()))
                    .collect();
                assert_eq!(
                    convolution_mod(&u, &v, p),
                    convolution_schoolbook(&u, &v, p)
                );
            }
        }
    }

    #[test]
    fn wrapped_matches_folded_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = pm(25_013);
        for (lu, lv, len) in [
            (3usize, 5usize, 8usize),
            (60, 64, 64),
            (100, 128, 128),
            (200, 90, 256),
        ] {
            let u: Vec<u64> = (0..lu).map(|_| rng.gen_range(0..p.as_u64())).collect();
            let v: Vec<u64> = (0..lv).map(|_| rng.gen_range(0..p.as_u64())).collect();
            let mut folded = vec![0u64; len];
            for (n, c) in convolution_schoolbook(&u, &v, p).into_iter().enumerate() {
                folded[n % len] = (folded[n % len] + c) % p.as_u64();
            }
            assert_eq!(convolution_mod_wrapped(&u, &v, len, p), folded);
        }
    }

    #[test]
    fn extreme_values() {
        let p = pm(4_294_967_291);
        let u = vec![p.as_u64() - 1; 200];
        assert_eq!(
            convolution_mod(&u, &u, p),
            convolution_schoolbook(&u, &u, p)
        );
    }
}
