//! Exact integer helpers: binomials, integer roots, checked powers.

/// `C(n, k)` as `u128`, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `base^exp`, `None` on overflow.
pub fn checked_pow(base: u128, exp: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Largest `x` with `x^k <= n`.
pub fn iroot_floor(n: u128, k: u32) -> u128 {
    assert!(k >= 1, "root index must be positive");
    if k == 1 || n <= 1 {
        return n;
    }
    let mut guess = (n as f64).powf(1.0 / k as f64).round() as u128;
    // float guess is within a couple of units; settle exactly
    while guess > 0 && checked_pow(guess, k).is_none_or(|v| v > n) {
        guess -= 1;
    }
    while checked_pow(guess + 1, k).is_some_and(|v| v <= n) {
        guess += 1;
    }
    guess
}

/// Smallest `x` with `x^k >= n`.
pub fn iroot_ceil(n: u128, k: u32) -> u128 {
    let f = iroot_floor(n, k);
    if checked_pow(f, k) == Some(n) {
        f
    } else {
        f + 1
    }
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Splits `q = p^k`; `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d) && is_prime(*d))?;
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

/// Prime divisors of `n`, ascending, without multiplicity.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), Some(6));
        assert_eq!(binomial(7, 3), Some(35));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(0, 0), Some(1));
        assert_eq!(binomial(60, 30), Some(118_264_581_564_861_424));
    }

    #[test]
    fn roots_are_exact() {
        for n in 0u128..2000 {
            for k in 1..6 {
                let f = iroot_floor(n, k);
                assert!(f.pow(k) <= n && (f + 1).pow(k) > n, "floor {n} {k}");
                let c = iroot_ceil(n, k);
                assert!(c.pow(k) >= n && (c == 0 || (c - 1).pow(k) < n), "ceil {n} {k}");
            }
        }
        assert_eq!(iroot_floor(60_000, 3), 39);
        assert_eq!(iroot_floor(u128::MAX, 2), u64::MAX as u128);
    }

    #[test]
    fn primes_and_powers() {
        let primes: Vec<u64> = (0..30).filter(|n| is_prime(*n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(11), Some((11, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_factors(120), vec![2, 3, 5]);
        assert_eq!(prime_factors(7), vec![7]);
    }
}
