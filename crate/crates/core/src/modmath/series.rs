//! Truncated power series over `Z/p`.

use super::{convolution_mod, PrimeModulus};
use crate::error::Result;

/// First `n` coefficients of `1 / f`, by Newton iteration
/// `g <- g (2 - f g) mod x^{2m}`. Requires `f[0]` to be a unit.
pub fn series_inverse(f: &[u64], n: usize, p: PrimeModulus) -> Result<Vec<u64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let head = f.first().copied().unwrap_or(0);
    let mut g = vec![p.inv(head)?];
    let mut m = 1;
    while m < n {
        let next = (2 * m).min(n);
        let f_trunc = &f[..next.min(f.len())];
        let mut fg = convolution_mod(f_trunc, &g, p);
        fg.resize(next, 0);
        for c in fg.iter_mut() {
            *c = p.neg(*c);
        }
        fg[0] = p.add(fg[0], 2);
        let mut prod = convolution_mod(&g, &fg, p);
        prod.truncate(next);
        prod.resize(next, 0);
        g = prod;
        m = next;
    }
    g.truncate(n);
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modmath::convolution_schoolbook;

    #[test]
    fn inverse_times_series_is_one() {
        let p = PrimeModulus::new(10_007).unwrap();
        let f: Vec<u64> = (1..=300).map(|i| (i * i + 3) % 10_007).collect();
        for n in [1, 2, 3, 64, 65, 300] {
            let g = series_inverse(&f, n, p).unwrap();
            let prod = convolution_schoolbook(&f[..n], &g, p);
            assert_eq!(prod[0], 1);
            assert!(prod[1..n].iter().all(|&c| c == 0), "n = {n}");
        }
    }

    #[test]
    fn geometric_series() {
        // 1 / (1 - x) = 1 + x + x^2 + ...
        let p = PrimeModulus::new(7).unwrap();
        assert_eq!(series_inverse(&[1, 6], 5, p).unwrap(), vec![1; 5]);
    }

    #[test]
    fn non_unit_constant_term_fails() {
        let p = PrimeModulus::new(7).unwrap();
        assert!(series_inverse(&[0, 1], 3, p).is_err());
    }
}
