//! Arithmetic in GF(2^n) with n = 2m.
//!
//! Elements are stored as `u32` bit vectors in the polynomial basis of a fixed
//! irreducible modulus. The modulus is the irreducible polynomial of degree n with
//! the smallest integer encoding and the generator is the smallest-encoding
//! primitive element, so a given `m` always produces the same field.
//!
//! For n ≤ 20 the context also carries exp/log tables built from the generator.
//! Multiplication and exponentiation go through the tables when present; the
//! carryless routine is kept as the reference path and is what the tables are
//! built from.

use std::fmt;
use std::ops::{Add, Mul};

use crate::error::{Error, Result};

/// Largest supported `m` (so q ≤ 2^24).
pub const MAX_M: u32 = 12;

const TABLE_MAX_N: u32 = 20;

#[derive(Debug, Clone)]
struct LogTables {
    // exp has 2(q-1) entries so that exp[log a + log b] needs no reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// One instance of GF(2^{2m}).
#[derive(Debug, Clone)]
pub struct FieldCtx {
    m: u32,
    n: u32,
    q: u32,
    modulus: u32,
    generator: u32,
    tables: Option<LogTables>,
}

/// Builds the field GF(2^{2m}).
pub fn make_ctx(m: u32) -> Result<FieldCtx> {
    FieldCtx::new(m)
}

impl FieldCtx {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 || m > MAX_M {
            return Err(Error::UnsupportedM(m));
        }
        let n = 2 * m;
        let q = 1u32 << n;
        let modulus = smallest_irreducible(n);
        let mut ctx = FieldCtx {
            m,
            n,
            q,
            modulus,
            generator: 0,
            tables: None,
        };
        ctx.generator = ctx.find_generator();
        if n <= TABLE_MAX_N {
            ctx.tables = Some(ctx.build_tables());
        }
        Ok(ctx)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Order of the multiplicative group, q - 1.
    pub fn group_order(&self) -> u64 {
        u64::from(self.q) - 1
    }

    /// The modulus as an (n+1)-bit integer.
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn generator(&self) -> FieldElement<'_> {
        FieldElement {
            bits: self.generator,
            ctx: self,
        }
    }

    pub fn zero(&self) -> FieldElement<'_> {
        FieldElement { bits: 0, ctx: self }
    }

    pub fn one(&self) -> FieldElement<'_> {
        FieldElement { bits: 1, ctx: self }
    }

    pub fn element(&self, bits: u32) -> Result<FieldElement<'_>> {
        if bits >= self.q {
            return Err(Error::ParamOutOfRange(format!(
                "{bits:#x} does not fit in GF(2^{})",
                self.n
            )));
        }
        Ok(FieldElement { bits, ctx: self })
    }

    /// All q elements in ascending order of their encoding.
    pub fn elements(&self) -> impl ExactSizeIterator<Item = FieldElement<'_>> + '_ {
        (0..self.q).map(move |bits| FieldElement { bits, ctx: self })
    }

    pub(crate) fn same_field(&self, other: &FieldCtx) -> bool {
        std::ptr::eq(self, other) || (self.m == other.m && self.modulus == other.modulus)
    }

    // ---- raw kernel -------------------------------------------------------
    //
    // The `*_raw` functions take encodings that are assumed to be < q. They
    // are what the exhaustive verifiers call in their inner loops.

    /// Schoolbook carryless product reduced modulo the field polynomial.
    pub fn carryless_mul(&self, a: u32, b: u32) -> u32 {
        let mut a = u64::from(a);
        let mut b = b;
        let top = 1u64 << self.n;
        let modulus = u64::from(self.modulus);
        let mut acc = 0u64;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= modulus;
            }
        }
        acc as u32
    }

    #[inline]
    pub fn mul_raw(&self, a: u32, b: u32) -> u32 {
        match &self.tables {
            Some(t) => {
                if a == 0 || b == 0 {
                    0
                } else {
                    t.exp[(t.log[a as usize] + t.log[b as usize]) as usize]
                }
            }
            None => self.carryless_mul(a, b),
        }
    }

    /// `a^e` for a non-negative exponent, with 0^0 = 1.
    #[inline]
    pub fn pow_raw(&self, a: u32, e: u64) -> u32 {
        if a == 0 {
            return u32::from(e == 0);
        }
        let order = self.group_order();
        let e = e % order;
        match &self.tables {
            Some(t) => {
                let l = (u64::from(t.log[a as usize]) * e) % order;
                t.exp[l as usize]
            }
            None => self.square_and_multiply(a, e),
        }
    }

    fn square_and_multiply(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.carryless_mul(acc, base);
            }
            base = self.carryless_mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv_raw(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        Some(self.pow_raw(a, self.group_order() - 1))
    }

    /// `a^(2^k)`, the k-th Frobenius iterate.
    pub fn frobenius_raw(&self, a: u32, k: u32) -> u32 {
        (0..k).fold(a, |x, _| self.mul_raw(x, x))
    }

    /// Absolute trace by the defining sum a + a^2 + ... + a^(2^(n-1)).
    pub fn trace_raw(&self, a: u32) -> u8 {
        let mut x = a;
        let mut acc = 0u32;
        for _ in 0..self.n {
            acc ^= x;
            x = self.mul_raw(x, x);
        }
        debug_assert!(acc <= 1);
        acc as u8
    }

    /// Discrete logarithm to the base of the generator. `None` for zero.
    pub fn log_raw(&self, a: u32) -> Option<u64> {
        if a == 0 {
            return None;
        }
        match &self.tables {
            Some(t) => Some(u64::from(t.log[a as usize])),
            None => {
                let mut x = 1u32;
                for l in 0..self.group_order() {
                    if x == a {
                        return Some(l);
                    }
                    x = self.carryless_mul(x, self.generator);
                }
                None
            }
        }
    }

    fn find_generator(&self) -> u32 {
        let order = self.group_order();
        let primes = prime_factors(order);
        (2..self.q)
            .find(|&g| {
                primes
                    .iter()
                    .all(|&p| self.square_and_multiply(g, order / p) != 1)
            })
            .expect("the multiplicative group of a finite field is cyclic")
    }

    fn build_tables(&self) -> LogTables {
        let order = self.group_order() as usize;
        let mut exp = vec![0u32; 2 * order];
        let mut log = vec![0u32; self.q as usize];
        let mut x = 1u32;
        for (l, slot) in exp.iter_mut().take(order).enumerate() {
            *slot = x;
            log[x as usize] = l as u32;
            x = self.carryless_mul(x, self.generator);
        }
        let (lo, hi) = exp.split_at_mut(order);
        hi.copy_from_slice(lo);
        LogTables { exp, log }
    }
}

/// Remainder of carryless division of `a` by `b` over GF(2).
fn gf2_poly_rem(mut a: u64, b: u64) -> u64 {
    let db = 63 - b.leading_zeros();
    while a != 0 && 63 - a.leading_zeros() >= db {
        a ^= b << ((63 - a.leading_zeros()) - db);
    }
    a
}

/// Trial division by every polynomial of degree 1..=deg/2.
pub(crate) fn is_irreducible(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let deg = 63 - p.leading_zeros();
    let max_div = 1u64 << (deg / 2 + 1);
    (2..max_div).all(|d| gf2_poly_rem(p, d) != 0)
}

fn smallest_irreducible(n: u32) -> u32 {
    let lo = 1u64 << n;
    (lo..lo << 1)
        .find(|&p| is_irreducible(p))
        .expect("irreducible polynomials exist in every degree") as u32
}

/// Distinct prime factors by trial division.
pub(crate) fn prime_factors(mut x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= x {
        if x % p == 0 {
            out.push(p);
            while x % p == 0 {
                x /= p;
            }
        }
        p += 1;
    }
    if x > 1 {
        out.push(x);
    }
    out
}

/// An element of a particular [`FieldCtx`].
#[derive(Clone, Copy)]
pub struct FieldElement<'a> {
    bits: u32,
    ctx: &'a FieldCtx,
}

impl<'a> FieldElement<'a> {
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    fn check(&self, other: &FieldElement<'_>) -> Result<()> {
        if self.ctx.same_field(other.ctx) {
            Ok(())
        } else {
            Err(Error::CtxMismatch {
                left: self.ctx.m,
                right: other.ctx.m,
            })
        }
    }

    pub fn try_add(self, other: FieldElement<'_>) -> Result<Self> {
        self.check(&other)?;
        Ok(FieldElement {
            bits: self.bits ^ other.bits,
            ctx: self.ctx,
        })
    }

    pub fn try_mul(self, other: FieldElement<'_>) -> Result<Self> {
        self.check(&other)?;
        Ok(FieldElement {
            bits: self.ctx.mul_raw(self.bits, other.bits),
            ctx: self.ctx,
        })
    }

    /// `self^e` for any integer `e`; negative exponents invert first.
    pub fn pow(self, e: i128) -> Result<Self> {
        let ctx = self.ctx;
        if e < 0 && self.bits == 0 {
            return Err(Error::NegativePowerOfZero(e));
        }
        let bits = if self.bits == 0 {
            ctx.pow_raw(0, e as u64)
        } else {
            let reduced = e.rem_euclid(i128::from(ctx.group_order())) as u64;
            ctx.pow_raw(self.bits, reduced)
        };
        Ok(FieldElement { bits, ctx })
    }

    pub fn inv(self) -> Result<Self> {
        let bits = self.ctx.inv_raw(self.bits).ok_or(Error::ZeroInverse)?;
        Ok(FieldElement {
            bits,
            ctx: self.ctx,
        })
    }

    pub fn square(self) -> Self {
        FieldElement {
            bits: self.ctx.mul_raw(self.bits, self.bits),
            ctx: self.ctx,
        }
    }

    pub fn trace(self) -> u8 {
        self.ctx.trace_raw(self.bits)
    }
}

impl PartialEq for FieldElement<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits && self.ctx.same_field(other.ctx)
    }
}

impl Eq for FieldElement<'_> {}

impl fmt::Debug for FieldElement<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{})[{:#x}]", self.ctx.n, self.bits)
    }
}

impl fmt::Display for FieldElement<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.bits)
    }
}

/// Panics on a field mismatch; use [`FieldElement::try_add`] to handle it.
impl<'a> Add for FieldElement<'a> {
    type Output = FieldElement<'a>;

    fn add(self, rhs: Self) -> Self::Output {
        self.try_add(rhs).expect("field mismatch in addition")
    }
}

/// Panics on a field mismatch; use [`FieldElement::try_mul`] to handle it.
impl<'a> Mul for FieldElement<'a> {
    type Output = FieldElement<'a>;

    fn mul(self, rhs: Self) -> Self::Output {
        self.try_mul(rhs).expect("field mismatch in multiplication")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Rabin's test: p of degree n is irreducible iff x^(2^n) = x mod p and
    // gcd(x^(2^(n/r)) - x, p) = 1 for every prime r | n. Independent of the
    // trial-division search used by make_ctx.
    fn rabin_irreducible(p: u64) -> bool {
        let n = 63 - p.leading_zeros();
        let mulmod = |a: u64, b: u64| -> u64 {
            let mut acc = 0u64;
            for i in 0..n {
                if b >> i & 1 == 1 {
                    acc ^= a << i;
                }
            }
            gf2_poly_rem(acc, p)
        };
        let x_pow_2k = |k: u32| (0..k).fold(2u64, |x, _| mulmod(x, x));
        let gcd = |mut a: u64, mut b: u64| {
            while b != 0 {
                let r = gf2_poly_rem(a, b);
                a = b;
                b = r;
            }
            a
        };
        if x_pow_2k(n) != 2 {
            return false;
        }
        prime_factors(u64::from(n))
            .into_iter()
            .all(|r| gcd(p, x_pow_2k(n / r as u32) ^ 2) == 1)
    }

    fn first_irreducible_by_rabin(n: u32) -> u32 {
        ((1u64 << n)..(1u64 << (n + 1)))
            .find(|&p| rabin_irreducible(p))
            .unwrap() as u32
    }

    #[test]
    fn moduli_are_smallest_irreducible() {
        assert_eq!(make_ctx(1).unwrap().modulus(), 0b111);
        assert_eq!(make_ctx(2).unwrap().modulus(), 0b10011);
        assert_eq!(make_ctx(4).unwrap().modulus(), 0b1_0001_1011);
        for m in 1..=8 {
            let ctx = make_ctx(m).unwrap();
            assert_eq!(ctx.modulus(), first_irreducible_by_rabin(2 * m), "m={m}");
        }
    }

    #[test]
    fn rejects_out_of_range_m() {
        assert_eq!(make_ctx(0).unwrap_err(), Error::UnsupportedM(0));
        assert_eq!(make_ctx(13).unwrap_err(), Error::UnsupportedM(13));
    }

    #[test]
    fn construction_is_deterministic() {
        for m in 1..=6 {
            let a = make_ctx(m).unwrap();
            let b = make_ctx(m).unwrap();
            assert_eq!(a.modulus(), b.modulus());
            assert_eq!(a.generator().bits(), b.generator().bits());
        }
    }

    #[test]
    fn generator_has_full_order() {
        for m in 1..=8 {
            let ctx = make_ctx(m).unwrap();
            let order = ctx.group_order();
            let g = ctx.generator().bits();
            assert_eq!(ctx.pow_raw(g, order), 1);
            for p in prime_factors(order) {
                assert_ne!(ctx.pow_raw(g, order / p), 1, "m={m} p={p}");
            }
            // smallest such element
            for cand in 2..g {
                assert!(prime_factors(order)
                    .iter()
                    .any(|&p| ctx.pow_raw(cand, order / p) == 1));
            }
        }
    }

    #[test]
    fn add_examples() {
        let ctx = make_ctx(2).unwrap();
        let a = ctx.element(0b0010).unwrap();
        let b = ctx.element(0b0011).unwrap();
        assert_eq!((a + b).bits(), 0b0001);
        assert!((a + a).is_zero());
        assert_eq!(a + ctx.zero(), a);
    }

    #[test]
    fn mul_examples() {
        let ctx = make_ctx(2).unwrap();
        let x = ctx.element(0b0010).unwrap();
        let x3 = ctx.element(0b1000).unwrap();
        assert_eq!((x * x3).bits(), 0b0011);
        for a in ctx.elements() {
            assert_eq!(a * ctx.one(), a);
            assert!((a * ctx.zero()).is_zero());
        }
    }

    #[test]
    fn table_and_carryless_paths_agree() {
        for m in 1..=4 {
            let ctx = make_ctx(m).unwrap();
            for a in 0..ctx.q() {
                for b in 0..ctx.q() {
                    assert_eq!(ctx.mul_raw(a, b), ctx.carryless_mul(a, b));
                }
            }
        }
        let ctx = make_ctx(8).unwrap();
        for a in (0..ctx.q()).step_by(97) {
            for b in (0..ctx.q()).step_by(89) {
                assert_eq!(ctx.mul_raw(a, b), ctx.carryless_mul(a, b));
            }
        }
    }

    #[test]
    fn untabled_field_works() {
        let ctx = make_ctx(11).unwrap();
        assert!(ctx.tables.is_none());
        let g = ctx.generator();
        assert_eq!(g.pow(i128::from(ctx.group_order())).unwrap(), ctx.one());
        let a = ctx.element(0x12345).unwrap();
        assert_eq!(a * a.inv().unwrap(), ctx.one());
        assert_eq!(ctx.log_raw(g.pow(1000).unwrap().bits()), Some(1000));
    }

    #[test]
    fn pow_examples() {
        let ctx = make_ctx(2).unwrap();
        for a in ctx.elements().skip(1) {
            assert_eq!(a.pow(15).unwrap(), ctx.one());
            assert_eq!(a.pow(-1).unwrap(), a.inv().unwrap());
        }
        assert!(ctx.zero().pow(5).unwrap().is_zero());
        assert_eq!(ctx.zero().pow(0).unwrap(), ctx.one());
        assert_eq!(
            ctx.zero().pow(-3).unwrap_err(),
            Error::NegativePowerOfZero(-3)
        );
    }

    #[test]
    fn inv_examples() {
        let ctx = make_ctx(1).unwrap();
        let x = ctx.element(0b10).unwrap();
        assert_eq!(x.inv().unwrap().bits(), 0b11);
        assert_eq!(ctx.one().inv().unwrap(), ctx.one());
        assert_eq!(ctx.zero().inv().unwrap_err(), Error::ZeroInverse);
        let ctx = make_ctx(3).unwrap();
        for a in ctx.elements().skip(1) {
            assert_eq!(a.inv().unwrap().inv().unwrap(), a);
        }
    }

    #[test]
    fn trace_examples() {
        let ctx = make_ctx(1).unwrap();
        assert_eq!(ctx.zero().trace(), 0);
        assert_eq!(ctx.one().trace(), 0);
        let ctx = make_ctx(2).unwrap();
        let sum: i32 = ctx
            .elements()
            .map(|x| if x.trace() == 0 { 1 } else { -1 })
            .sum();
        assert_eq!(sum, 0);
    }

    #[test]
    fn elements_enumeration() {
        let ctx = make_ctx(2).unwrap();
        let all: Vec<_> = ctx.elements().map(|e| e.bits()).collect();
        assert_eq!(all.len(), 16);
        assert_eq!(all[0], 0);
        assert_eq!(*all.last().unwrap(), 15);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn ctx_mismatch_is_rejected() {
        let a = make_ctx(2).unwrap();
        let b = make_ctx(3).unwrap();
        let err = a.one().try_add(b.one()).unwrap_err();
        assert_eq!(err, Error::CtxMismatch { left: 2, right: 3 });
        assert!(a.one().try_mul(b.one()).is_err());
        // a separately built context for the same m is the same field
        let a2 = make_ctx(2).unwrap();
        assert!(a.one().try_add(a2.one()).is_ok());
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for m in 1..=2 {
            let ctx = make_ctx(m).unwrap();
            for a in ctx.elements() {
                for b in ctx.elements() {
                    assert_eq!(a * b, b * a);
                    assert_eq!((a + b).square(), a.square() + b.square());
                    assert_eq!((a + b).trace(), a.trace() ^ b.trace());
                    for c in ctx.elements() {
                        assert_eq!((a * b) * c, a * (b * c));
                        assert_eq!(a * (b + c), a * b + a * c);
                    }
                }
                assert_eq!(a.square().trace(), a.trace());
            }
        }
    }

    #[test]
    fn element_rejects_oversized_bits() {
        let ctx = make_ctx(2).unwrap();
        assert!(ctx.element(16).is_err());
        assert!(ctx.element(15).is_ok());
    }
}
