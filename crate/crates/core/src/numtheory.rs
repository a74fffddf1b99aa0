//! Integer helpers shared by the family builders and the verifiers.

use crate::error::{Error, Result};

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// 2-adic valuation of a positive integer.
pub fn v2(x: i128) -> Result<u32> {
    if x <= 0 {
        return Err(Error::NonPositive(x));
    }
    Ok(x.trailing_zeros())
}

/// Returns `(g, s, t)` with `a*s + b*t = g = gcd(a, b)`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let quot = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
        (old_t, t) = (t, old_t - quot * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Inverse of `a` modulo `n`, reported in `[1, n-1]` (or 0 when n = 1).
pub fn mod_inverse(a: i128, n: i128) -> Result<i128> {
    if n < 1 {
        return Err(Error::NotInvertible { a, n });
    }
    let (g, s, _) = ext_gcd(a.rem_euclid(n), n);
    if g != 1 {
        return Err(Error::NotInvertible { a, n });
    }
    Ok(s.rem_euclid(n))
}

/// `a / b mod n` for a fraction with `b` invertible mod `n`, in `[0, n-1]`.
pub fn mod_fraction(a: i128, b: i128, n: i128) -> Result<i128> {
    Ok((a.rem_euclid(n) * mod_inverse(b, n)?).rem_euclid(n))
}

pub fn hamming_weight(x: u64) -> u32 {
    x.count_ones()
}
