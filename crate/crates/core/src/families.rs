//! Builders for the coefficient-1 families over GF(2^{2m}), the fractional
//! families over U, the catalog of previously known permutation trinomials and
//! pentanomials, and the explicit low-dimensional witnesses.
//!
//! Builders never refuse a point because a hypothesis fails; use
//! [`check_conditions`] for that. They only refuse parameters whose exponents
//! would not fit the integer arithmetic.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2n::{FieldCtx, MAX_M};
use crate::numtheory::gcd;
use crate::polyexp::SparsePoly;
use crate::subgroup::FracPoly;

pub use crate::numtheory::{mod_inverse, v2};

/// Largest `k` accepted by the closed-form builders.
pub const MAX_K: u32 = 64;
/// Largest `k` for the families whose term count grows like 2^k.
pub const MAX_K_SUMMED: u32 = 24;
/// Bound on |s|, |u| and i.
pub const MAX_PARAM_ABS: i128 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
    F1,
    F14,
    F27,
    F31,
    L4,
    L5,
}

impl Family {
    pub const ALL: [Family; 12] = [
        Family::T1,
        Family::T2,
        Family::T3,
        Family::T4,
        Family::T5,
        Family::T6,
        Family::F1,
        Family::F14,
        Family::F27,
        Family::F31,
        Family::L4,
        Family::L5,
    ];

    pub const FULL_FIELD: [Family; 6] = [
        Family::T1,
        Family::T2,
        Family::T3,
        Family::T4,
        Family::T5,
        Family::T6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::T1 => "thm1",
            Family::T2 => "thm2",
            Family::T3 => "thm3",
            Family::T4 => "thm4",
            Family::T5 => "thm5",
            Family::T6 => "thm6",
            Family::F1 => "frac1",
            Family::F14 => "frac14",
            Family::F27 => "frac27",
            Family::F31 => "frac31",
            Family::L4 => "lem4",
            Family::L5 => "lem5",
        }
    }

    /// Polynomials over the whole field, as opposed to fractions over U.
    pub fn is_full_field(self) -> bool {
        Self::FULL_FIELD.contains(&self)
    }

    pub fn uses_s(self) -> bool {
        matches!(
            self,
            Family::T1 | Family::T2 | Family::T3 | Family::T4 | Family::F1 | Family::F14
        )
    }

    pub fn uses_u_and_i(self) -> bool {
        matches!(self, Family::T2 | Family::T4 | Family::T6)
    }

    /// Whether the family is only defined for even m.
    pub fn needs_even_m(self) -> bool {
        !matches!(self, Family::L4 | Family::L5)
    }

    fn sums_over_k(self) -> bool {
        matches!(self, Family::T5 | Family::T6 | Family::F27 | Family::F31)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

/// One point of a family's parameter space. Parameters a family does not use
/// are carried along but ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FamilyParams {
    pub family: Family,
    pub m: u32,
    pub k: u32,
    pub s: i128,
    pub u: i128,
    pub i: i128,
}

impl FamilyParams {
    pub fn new(family: Family, m: u32, k: u32) -> Self {
        FamilyParams {
            family,
            m,
            k,
            s: 0,
            u: 0,
            i: 1,
        }
    }

    pub fn with_s(mut self, s: i128) -> Self {
        self.s = s;
        self
    }

    pub fn with_u(mut self, u: i128) -> Self {
        self.u = u;
        self
    }

    pub fn with_i(mut self, i: i128) -> Self {
        self.i = i;
        self
    }

    /// 2^k
    pub fn big_k(&self) -> i128 {
        1i128 << self.k
    }

    /// 2^m + 1
    pub fn big_q(&self) -> i128 {
        (1i128 << self.m) + 1
    }

    /// 2^{2m} - 1
    pub fn q_minus_one(&self) -> i128 {
        (1i128 << (2 * self.m)) - 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m > MAX_M {
            return Err(Error::UnsupportedM(self.m));
        }
        let k_max = if self.family.sums_over_k() {
            MAX_K_SUMMED
        } else {
            MAX_K
        };
        if self.k == 0 || self.k > k_max {
            return Err(Error::ParamOutOfRange(format!(
                "k = {} outside 1..={k_max} for {}",
                self.k, self.family
            )));
        }
        for (name, v) in [("s", self.s), ("u", self.u)] {
            if v.abs() > MAX_PARAM_ABS {
                return Err(Error::ParamOutOfRange(format!("|{name}| = {} exceeds 2^40", v.abs())));
            }
        }
        if self.i < 1 || self.i > MAX_PARAM_ABS {
            return Err(Error::ParamOutOfRange(format!("i = {} outside 1..=2^40", self.i)));
        }
        Ok(())
    }

    /// The leading exponent d1 as the construction lists it, before reduction.
    pub fn d1(&self) -> Option<i128> {
        let (kk, q) = (self.big_k(), self.big_q());
        match self.family {
            Family::T1 | Family::T3 => Some(kk + 2 * self.s + 1),
            Family::T2 | Family::T4 => Some((kk + 2 * self.s + 1) * self.i + self.u * q),
            Family::T5 => {
                let j = (1..=kk).rev().find(|j| matches!(j % 3, 0 | 2))?;
                Some((kk - j) * (1i128 << self.m) + j - 1)
            }
            Family::T6 => Some((kk - 1) * self.i + self.u * q),
            _ => None,
        }
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} m={} k={} s={} u={} i={}",
            self.family, self.m, self.k, self.s, self.u, self.i
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ConditionReport {
    pub conditions: Vec<Condition>,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }

    pub fn failing(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.holds)
    }

    pub fn get(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, holds: bool, detail: String) {
        self.conditions.push(Condition {
            name: name.to_string(),
            holds,
            detail,
        });
    }

    fn gcd_is_one(&mut self, name: &str, a: i128, b: i128) {
        let g = gcd(a, b);
        self.push(name, g == 1, format!("gcd({a}, {b}) = {g}"));
    }
}

/// Evaluates every hypothesis of the construction at `p`.
///
/// Parameters outside the supported range yield a single failing
/// `params_in_range` entry instead of an error.
pub fn check_conditions(p: &FamilyParams) -> ConditionReport {
    let mut r = ConditionReport::default();
    if let Err(e) = p.validate() {
        r.push("params_in_range", false, e.to_string());
        return r;
    }
    let m = i128::from(p.m);
    let k = i128::from(p.k);
    let kk = p.big_k();
    let q = p.big_q();
    let m_minus = (1i128 << p.m) - 1;
    let s = p.s;

    let m_even = |r: &mut ConditionReport| {
        r.push("m_even", p.m % 2 == 0, format!("m = {}", p.m));
    };
    let v2_cmp = |r: &mut ConditionReport| {
        let (vk, vm) = (k.trailing_zeros(), m.trailing_zeros());
        r.push("v2(k)<=v2(m)", vk <= vm, format!("v2({k}) = {vk}, v2({m}) = {vm}"));
    };
    let d1_unit = |r: &mut ConditionReport| {
        let d1 = p.d1().expect("full-field family");
        r.gcd_is_one("gcd(d1,q-1)=1", d1, p.q_minus_one());
    };

    match p.family {
        Family::T1 => {
            m_even(&mut r);
            v2_cmp(&mut r);
            r.gcd_is_one("gcd(K+2s+1,2^m-1)=1", kk + 2 * s + 1, m_minus);
        }
        Family::T2 => {
            m_even(&mut r);
            v2_cmp(&mut r);
            r.gcd_is_one("gcd(i,Q)=1", p.i, q);
            r.gcd_is_one("gcd(K+2s+1,Q)=1", kk + 2 * s + 1, q);
            d1_unit(&mut r);
        }
        Family::T3 => {
            m_even(&mut r);
            r.gcd_is_one("gcd(K+1,Q)=1", kk + 1, q);
            r.gcd_is_one("gcd(K+2s+1,2^m-1)=1", kk + 2 * s + 1, m_minus);
        }
        Family::T4 => {
            m_even(&mut r);
            r.gcd_is_one("gcd(i,Q)=1", p.i, q);
            r.gcd_is_one("gcd(K+1,Q)=1", kk + 1, q);
            r.gcd_is_one("gcd(K+2s+1,Q)=1", kk + 2 * s + 1, q);
            d1_unit(&mut r);
        }
        Family::T5 => {
            m_even(&mut r);
            r.push("k_odd", p.k % 2 == 1, format!("k = {k}"));
            r.gcd_is_one("gcd(K-1,2^m-1)=1", kk - 1, m_minus);
            r.gcd_is_one("gcd(K+1,Q)=1", kk + 1, q);
        }
        Family::T6 => {
            m_even(&mut r);
            v2_cmp(&mut r);
            r.gcd_is_one("gcd(i,Q)=1", p.i, q);
            d1_unit(&mut r);
            let g = gcd(kk + 1, q);
            let holds = p.k % 2 == 0 || g == 1;
            r.push(
                "k_even_or_gcd(K+1,Q)=1",
                holds,
                format!("k = {k}, gcd({}, {q}) = {g}", kk + 1),
            );
        }
        Family::F1 => {
            m_even(&mut r);
            v2_cmp(&mut r);
        }
        Family::F14 => {
            m_even(&mut r);
            r.gcd_is_one("gcd(K+1,Q)=1", kk + 1, q);
        }
        Family::F27 => {
            m_even(&mut r);
            r.push("k_even", p.k % 2 == 0, format!("k = {k}"));
            v2_cmp(&mut r);
        }
        Family::F31 => {
            m_even(&mut r);
            r.push("k_odd", p.k % 2 == 1, format!("k = {k}"));
            r.gcd_is_one("gcd(K+1,Q)=1", kk + 1, q);
        }
        Family::L4 => r.gcd_is_one("gcd(K-1,Q)=1", kk - 1, q),
        Family::L5 => r.gcd_is_one("gcd(K+1,Q)=1", kk + 1, q),
    }
    r
}

/// Offsets c_j in d_j = d1 + (Q-2)·c_j·i.
fn congruence_offsets(p: &FamilyParams) -> [i128; 9] {
    let (kk, s) = (p.big_k(), p.s);
    let tail = if p.family == Family::T2 {
        [kk + 1, kk + s + 1, kk + 2 * s + 1]
    } else {
        [kk, kk + s, kk + 2 * s]
    };
    [0, 1, s, s + 1, 2 * s, 2 * s + 1, tail[0], tail[1], tail[2]]
}

/// The unreduced exponent list of a full-field family, with d1 first.
pub fn exponent_list(p: &FamilyParams) -> Result<Vec<i128>> {
    p.validate()?;
    let mm = 1i128 << p.m;
    let kk = p.big_k();
    let q = p.big_q();
    let s = p.s;
    let out = match p.family {
        Family::T1 => vec![
            kk + 2 * s + 1,
            kk * mm + 2 * s * mm + mm,
            kk * mm + s * mm + mm + s,
            kk * mm + mm + 2 * s,
            2 * s * mm + mm + kk,
            2 * s * mm + kk + 1,
            s * mm + mm + kk + s,
            s * mm + kk + s + 1,
            mm + kk + 2 * s,
        ],
        Family::T3 => vec![
            kk + 2 * s + 1,
            kk * mm + 2 * s * mm + 1,
            kk * mm + s * mm + s + 1,
            kk * mm + 2 * s + 1,
            2 * s * mm + mm + kk,
            2 * s * mm + kk + 1,
            s * mm + mm + kk + s,
            s * mm + kk + s + 1,
            mm + kk + 2 * s,
        ],
        Family::T2 | Family::T4 => {
            let d1 = p.d1().expect("full-field family");
            congruence_offsets(p)
                .iter()
                .map(|c| d1 + (q - 2) * c * p.i)
                .collect()
        }
        // j runs downwards so that the first term is d1 (K - 1 when k is odd)
        Family::T5 => (1..=kk)
            .rev()
            .filter(|j| matches!(j % 3, 0 | 2))
            .map(|j| (kk - j) * mm + j - 1)
            .collect(),
        Family::T6 => {
            let d1 = p.d1().expect("full-field family");
            (1..=kk)
                .filter(|j| matches!(j % 3, 0 | 1))
                .map(|j| d1 + (q - 2) * (j - 1) * p.i)
                .collect()
        }
        other => return Err(Error::UnsupportedFamily(other.name().to_string())),
    };
    Ok(out)
}

fn check_field(p: &FamilyParams, ctx: &FieldCtx) -> Result<()> {
    if ctx.m() != p.m {
        return Err(Error::CtxMismatch {
            left: p.m,
            right: ctx.m(),
        });
    }
    Ok(())
}

/// The canonical polynomial of a full-field family at `p`.
pub fn build_pp(p: &FamilyParams, ctx: &Arc<FieldCtx>) -> Result<SparsePoly> {
    check_field(p, ctx)?;
    Ok(SparsePoly::from_exponents(exponent_list(p)?, ctx))
}

/// Unreduced numerator and denominator exponents of a U-family at `p`.
pub fn frac_exponent_lists(p: &FamilyParams) -> Result<(Vec<i128>, Vec<i128>)> {
    p.validate()?;
    let kk = p.big_k();
    let s = p.s;
    Ok(match p.family {
        Family::F1 => (
            vec![kk + 2 * s + 1, kk + 2 * s, kk + s + 1, kk + s, kk + 1, kk, 2 * s, s, 0],
            vec![kk + 2 * s + 1, kk + s + 1, kk + 1, 2 * s + 1, 2 * s, s + 1, s, 1, 0],
        ),
        Family::F14 => (
            vec![kk + 2 * s + 1, kk + 2 * s, kk + s + 1, kk + s, kk + 1, kk, 2 * s + 1, s + 1, 1],
            vec![kk + 2 * s, kk + s, kk, 2 * s + 1, 2 * s, s + 1, s, 1, 0],
        ),
        Family::F27 | Family::F31 => {
            let num = (1..=kk).filter(|i| matches!(i % 3, 0 | 1)).map(|i| kk - i).collect();
            let den_classes: [i128; 2] = if p.family == Family::F27 { [1, 2] } else { [0, 2] };
            let den = (1..=kk)
                .filter(|j| den_classes.contains(&(j % 3)))
                .map(|j| kk - j)
                .collect();
            (num, den)
        }
        Family::L4 => (vec![kk + 1, kk, 0], vec![kk + 1, 1, 0]),
        Family::L5 => (vec![kk + 1, kk, 1], vec![kk, 1, 0]),
        other => return Err(Error::UnsupportedFamily(other.name().to_string())),
    })
}

/// The fraction of a U-family at `p`, reduced mod 2^m + 1.
pub fn build_frac(p: &FamilyParams) -> Result<FracPoly> {
    let (num, den) = frac_exponent_lists(p)?;
    Ok(FracPoly::new(num, den, p.big_q() as u64))
}

/// The three (s, t) pairs, as fractions mod 2^m + 1, allowed for f8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum F8Pair {
    /// (-1/3, 4/3)
    P1,
    /// (3, -1)
    P2,
    /// (-2/3, 5/3)
    P3,
}

impl F8Pair {
    pub const ALL: [F8Pair; 3] = [F8Pair::P1, F8Pair::P2, F8Pair::P3];

    pub fn fractions(self) -> [(i128, i128); 2] {
        match self {
            F8Pair::P1 => [(-1, 3), (4, 3)],
            F8Pair::P2 => [(3, 1), (-1, 1)],
            F8Pair::P3 => [(-2, 3), (5, 3)],
        }
    }

    pub fn index(self) -> u32 {
        match self {
            F8Pair::P1 => 1,
            F8Pair::P2 => 2,
            F8Pair::P3 => 3,
        }
    }

    pub fn from_index(i: i128) -> Result<Self> {
        match i {
            1 => Ok(F8Pair::P1),
            2 => Ok(F8Pair::P2),
            3 => Ok(F8Pair::P3),
            _ => Err(Error::ParamOutOfRange(format!("f8 pair selector {i} not in 1..=3"))),
        }
    }
}

fn frac_text((a, b): (i128, i128)) -> String {
    if b == 1 {
        a.to_string()
    } else {
        format!("{a}/{b}")
    }
}

/// A member of the catalog of previously known permutation polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum KnownFamily {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6 { k: u32 },
    F7 { k: u32 },
    F8(F8Pair),
    F9,
    F10,
    F11,
    F12,
    F13,
    F14,
    F15,
    F16,
    F17,
    F18,
}

impl KnownFamily {
    /// Catalog number 1..=18.
    pub fn number(self) -> u32 {
        use KnownFamily::*;
        match self {
            F1 => 1,
            F2 => 2,
            F3 => 3,
            F4 => 4,
            F5 => 5,
            F6 { .. } => 6,
            F7 { .. } => 7,
            F8(_) => 8,
            F9 => 9,
            F10 => 10,
            F11 => 11,
            F12 => 12,
            F13 => 13,
            F14 => 14,
            F15 => 15,
            F16 => 16,
            F17 => 17,
            F18 => 18,
        }
    }

    /// Resolves `f1`..`f18`; `extra` is k for f6/f7 and the pair index for f8.
    pub fn from_name(name: &str, extra: Option<i128>) -> Result<Self> {
        use KnownFamily::*;
        let n: u32 = name
            .strip_prefix('f')
            .and_then(|d| d.parse().ok())
            .filter(|n| (1..=18).contains(n))
            .ok_or_else(|| Error::UnknownId(name.to_string()))?;
        let need = |what: &str| {
            extra.ok_or_else(|| Error::ParamOutOfRange(format!("{name} needs {what}")))
        };
        let small_k = |k: i128| {
            u32::try_from(k)
                .ok()
                .filter(|&k| k >= 1)
                .ok_or_else(|| Error::ParamOutOfRange(format!("k = {k} for {name}")))
        };
        Ok(match n {
            1 => F1,
            2 => F2,
            3 => F3,
            4 => F4,
            5 => F5,
            6 => F6 { k: small_k(need("k")?)? },
            7 => F7 { k: small_k(need("k")?)? },
            8 => F8(F8Pair::from_index(need("a pair selector 1..=3")?)?),
            9 => F9,
            10 => F10,
            11 => F11,
            12 => F12,
            13 => F13,
            14 => F14,
            15 => F15,
            16 => F16,
            17 => F17,
            _ => F18,
        })
    }

    pub fn label(self) -> String {
        match self {
            KnownFamily::F6 { k } => format!("f6[k={k}]"),
            KnownFamily::F7 { k } => format!("f7[k={k}]"),
            KnownFamily::F8(pair) => {
                let [a, b] = pair.fractions();
                format!("f8[{},{}]", frac_text(a), frac_text(b))
            }
            other => format!("f{}", other.number()),
        }
    }

    /// `Err` carries the violated side condition.
    pub fn side_condition(self, m: u32) -> std::result::Result<(), String> {
        use KnownFamily::*;
        let q = (1i128 << m) + 1;
        let ok = |holds: bool, text: &str| if holds { Ok(()) } else { Err(format!("requires {text}")) };
        match self {
            F1 | F2 | F3 | F13 => ok(gcd(i128::from(m), 3) == 1, "gcd(m,3)=1"),
            F4 => ok(m % 3 != 0, "m not divisible by 3"),
            F5 | F9 => Ok(()),
            F6 { k } => {
                ok(k >= 1 && k < m, "1<=k<m")?;
                ok(gcd((1i128 << k) - 1, q) == 1, "gcd(2^k-1,2^m+1)=1")
            }
            F7 { k } => {
                ok((1..=2 * m).contains(&k), "1<=k<=2m")?;
                ok(gcd((1i128 << k) + 1, q) == 1, "gcd(2^k+1,2^m+1)=1")
            }
            F8(_) => ok(m % 2 == 0, "m even"),
            F10 => ok(m % 2 == 0 && m >= 4, "m even and m>=4"),
            F11 | F12 => ok(m % 4 != 0, "m not divisible by 4"),
            F14 | F15 | F16 | F17 | F18 => ok(m % 4 == 2, "m = 2 mod 4"),
        }
    }

    /// Every catalog instance whose side condition holds at `m`, in catalog
    /// order, with f6/f7 expanded over k and f8 over its pairs.
    pub fn catalog(m: u32) -> Vec<KnownFamily> {
        use KnownFamily::*;
        let mut all = vec![F1, F2, F3, F4, F5];
        all.extend((1..m).map(|k| F6 { k }));
        all.extend((1..=2 * m).map(|k| F7 { k }));
        all.extend(F8Pair::ALL.map(F8));
        all.extend([F9, F10, F11, F12, F13, F14, F15, F16, F17, F18]);
        all.into_iter()
            .filter(|f| f.side_condition(m).is_ok())
            .collect()
    }
}

impl fmt::Display for KnownFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// 1 + s(2^m - 1) with s given as a fraction mod 2^m + 1.
fn polar_exp(m: u32, (a, b): (i128, i128)) -> Result<i128> {
    let mm = 1i128 << m;
    let s = crate::numtheory::mod_fraction(a, b, mm + 1)?;
    Ok(1 + s * (mm - 1))
}

/// Builds a catalog entry over `ctx`, checking its side condition first.
pub fn build_known(id: KnownFamily, ctx: &Arc<FieldCtx>) -> Result<SparsePoly> {
    SparsePoly::from_terms(known_terms(id, ctx)?, ctx)
}

/// The (exponent, coefficient) list of a catalog entry as written, unreduced.
pub fn known_terms(id: KnownFamily, ctx: &FieldCtx) -> Result<Vec<(i128, u32)>> {
    use KnownFamily::*;
    let m = ctx.m();
    id.side_condition(m)
        .map_err(|c| Error::SideCondition(format!("{id} at m = {m}: {c}")))?;
    let mm = 1i128 << m;
    let n = 2 * m;
    let exps: Vec<i128> = match id {
        F1 => vec![4, mm + 3, 3 * mm + 1],
        F2 => vec![2, 2 * mm, 3 * mm - 1],
        F3 => vec![5, mm + 4, 4 * mm + 1],
        F4 => vec![1, mm, (1 << (n - 1)) - (1 << (m - 1)) + 1],
        F5 => {
            let q_minus_one = ctx.group_order();
            let a = ctx.pow_raw(ctx.generator().bits(), q_minus_one / (mm as u64 + 1));
            let a2 = ctx.pow_raw(a, 1u64 << (m - 1));
            return Ok(vec![(1, 1), ((1 << (m + 1)) - 1, a), ((1 << n) - mm + 1, a2)]);
        }
        F6 { k } => {
            let kk = 1i128 << k;
            vec![1, polar_exp(m, (kk, kk - 1))?, polar_exp(m, (-1, kk - 1))?]
        }
        F7 { k } => {
            let kk = 1i128 << k;
            vec![1, polar_exp(m, (1, kk + 1))?, polar_exp(m, (kk, kk + 1))?]
        }
        F8(pair) => {
            let [a, b] = pair.fractions();
            vec![1, polar_exp(m, a)?, polar_exp(m, b)?]
        }
        F9 => vec![1, mm * (mm - 1) + 1, 2 * (mm - 1) + 1],
        F10 => vec![
            1,
            (1 << (m - 1)) * (mm - 1) + 1,
            (1 << (n - 1)) * (mm - 1) + 1,
        ],
        F11 => vec![5, mm + 4, 3 * mm + 2, 4 * mm + 1, 5 * mm],
        F12 => vec![5, mm + 4, 2 * mm + 3, 4 * mm + 1, 5 * mm],
        F13 => vec![7, 2 * mm + 5, 3 * mm + 4, 5 * mm + 2, 6 * mm + 1],
        F14 => vec![5, mm + 4, 3 * mm + 2, 4 * mm + 1, 6 * mm - 1],
        F15 => vec![5, 3 * mm + 2, 4 * mm + 1],
        F16 => vec![mm + 4, 2 * mm + 3, 5 * mm],
        F17 => vec![5, mm + 4, 5 * mm],
        F18 => vec![5, 4 * mm + 1, 5 * mm],
    };
    Ok(exps.into_iter().map(|e| (e, 1)).collect())
}

/// The explicit polynomials exhibited for each new family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Witness {
    G1,
    G2,
    G3,
    G4,
    G5,
    G6,
    G7,
    G8,
    G9,
    G10,
    G11,
    G12,
}

impl Witness {
    pub const ALL: [Witness; 12] = [
        Witness::G1,
        Witness::G2,
        Witness::G3,
        Witness::G4,
        Witness::G5,
        Witness::G6,
        Witness::G7,
        Witness::G8,
        Witness::G9,
        Witness::G10,
        Witness::G11,
        Witness::G12,
    ];

    pub fn number(self) -> usize {
        Self::ALL.iter().position(|&w| w == self).expect("listed") + 1
    }

    pub fn name(self) -> String {
        format!("g{}", self.number())
    }

    pub fn from_name(name: &str) -> Result<Self> {
        name.strip_prefix('g')
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|n| (1..=12).contains(n))
            .map(|n| Self::ALL[n - 1])
            .ok_or_else(|| Error::UnknownId(name.to_string()))
    }

    /// g2, g4, ..., g12 exist only for m = 2.
    pub fn only_m2(self) -> bool {
        self.number() % 2 == 0
    }

    pub fn family(self) -> Family {
        Family::FULL_FIELD[(self.number() - 1) / 2]
    }

    /// The witness used for `family` at `m`.
    pub fn for_family(family: Family, m: u32) -> Result<Self> {
        let idx = Family::FULL_FIELD
            .iter()
            .position(|&f| f == family)
            .ok_or_else(|| Error::UnsupportedFamily(family.name().to_string()))?;
        Ok(Self::ALL[2 * idx + usize::from(m == 2)])
    }

    /// Degree the witness is claimed to have: 1 for the m = 2 witnesses, else 2m-1.
    pub fn claimed_degree(self, m: u32) -> u32 {
        if self.only_m2() {
            1
        } else {
            2 * m - 1
        }
    }

    fn check_m(self, m: u32) -> Result<()> {
        if m == 0 || m % 2 != 0 || m > MAX_M {
            return Err(Error::ParamOutOfRange(format!("{} needs even m, got {m}", self.name())));
        }
        if self.only_m2() && m != 2 {
            return Err(Error::ParamOutOfRange(format!("{} is defined only for m = 2", self.name())));
        }
        Ok(())
    }

    /// Family parameters that produce the witness.
    ///
    /// For g4 and g8 the listed i (1) does not give the printed monomial; i = 2
    /// and i = 3 respectively do, and satisfy every hypothesis.
    pub fn params(self, m: u32) -> Result<FamilyParams> {
        use Witness::*;
        self.check_m(m)?;
        let big_s = (1i128 << (2 * m - 1)) - 3;
        let p = |f| FamilyParams::new(f, m, 1);
        Ok(match self {
            G1 => p(Family::T1).with_s(big_s),
            G2 => p(Family::T1).with_s(1),
            G3 => p(Family::T2).with_s(-2),
            G4 => p(Family::T2).with_s(-1).with_u(4).with_i(2),
            G5 => p(Family::T3).with_s(big_s),
            G6 => FamilyParams::new(Family::T3, m, 3).with_s(1),
            G7 => p(Family::T4).with_s(-2),
            G8 => FamilyParams::new(Family::T4, m, 3).with_s(-1).with_u(2).with_i(3),
            G9 => FamilyParams::new(Family::T5, m, 2 * m - 1),
            G10 => p(Family::T5),
            G11 => FamilyParams::new(Family::T6, m, 2).with_u(-2),
            G12 => p(Family::T6),
        })
    }

    /// The polynomial exactly as printed, as an unreduced exponent list.
    pub fn printed_exponents(self, m: u32) -> Result<Vec<i128>> {
        use Witness::*;
        self.check_m(m)?;
        let mm = 1i128 << m;
        let n = 2 * m;
        let p2 = |e: u32| 1i128 << e;
        Ok(match self {
            G1 => vec![
                p2(n) - p2(m + 1) - 1,
                p2(n - 1) + p2(m - 1) - 3,
                p2(m + 1) + mm - 5,
                p2(n) - p2(m + 2) + 1,
                p2(n) - p2(m + 2) - mm + 2,
                p2(n - 1) - p2(m + 1) + p2(m - 1) - 1,
                p2(n - 1) - p2(m + 1) - p2(m - 1),
                mm - 3,
                p2(n) - 3,
            ],
            G3 => vec![
                p2(n) - 2,
                p2(n) - p2(m + 1),
                p2(n) - p2(m + 2) + 2,
                p2(n) - 3 * mm + 1,
                3 * mm - 4,
            ],
            G5 => vec![
                p2(n) - p2(m + 2) + mm,
                p2(n - 1) - p2(m - 1) - 2,
                p2(m + 1) - 4,
                p2(n) - p2(m + 2) + 1,
                p2(n) - p2(m + 2) - mm + 2,
                p2(n - 1) - p2(m + 1) - p2(m - 1),
                p2(n - 1) - p2(m + 1) + p2(m - 1) - 1,
                mm - 3,
                p2(n) - 3,
            ],
            G7 => vec![
                mm - 2,
                p2(n) - mm - 1,
                p2(n) - p2(m + 2) + 2,
                p2(n) - 3 * mm + 1,
                p2(m + 1) - 3,
            ],
            G9 => (1..=p2(n - 1))
                .filter(|j| matches!(j % 3, 0 | 2))
                .map(|j| p2(3 * m - 1) - j * mm + j - 1)
                .collect(),
            G11 => vec![p2(n) - p2(m + 1), p2(n) - 2, mm - 2],
            G2 => vec![2],
            G4 | G8 => vec![4],
            G6 => vec![8],
            G10 | G12 => vec![1],
        })
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

pub fn build_witness(id: Witness, ctx: &Arc<FieldCtx>) -> Result<SparsePoly> {
    build_pp(&id.params(ctx.m())?, ctx)
}

/// One instance of a printed specialization: builder parameters and the
/// polynomial as printed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialInstance {
    pub params: FamilyParams,
    pub printed: Vec<i128>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialCase {
    pub id: &'static str,
    pub instances: Vec<SpecialInstance>,
}

/// The printed specializations of the full-field families at even `m`.
///
/// Where the printed parameter i is a fraction mod Q, the integer i used is its
/// least positive residue and u absorbs the multiple of Q that this introduces,
/// so d1 keeps the printed value.
pub fn special_cases(m: u32) -> Result<Vec<SpecialCase>> {
    if m == 0 || m % 2 != 0 || m > MAX_M {
        return Err(Error::ParamOutOfRange(format!("special cases need even m, got {m}")));
    }
    let mm = 1i128 << m;
    let q = mm + 1;
    let polar = |a: i128, b: i128| polar_exp(m, (a, b));
    let inst = |params: FamilyParams, printed: Vec<i128>| SpecialInstance { params, printed };
    let one = |id, params, printed| SpecialCase {
        id,
        instances: vec![inst(params, printed)],
    };
    let fp = |f, k| FamilyParams::new(f, m, k);

    let valid_k: Vec<u32> = (1..=2 * m)
        .filter(|&k| gcd((1i128 << k) + 1, q) == 1)
        .collect();
    let inverse_point = |f, k: u32| -> Result<FamilyParams> {
        let kk = 1i128 << k;
        let i = mod_inverse(kk + 1, q)?;
        Ok(fp(f, k).with_i(i).with_u((1 - (kk + 1) * i) / q))
    };

    let i3 = mod_inverse(3, q)?;
    let mut cases = vec![
        one("thm1:k=2,s=0", fp(Family::T1, 2), vec![5, mm + 4, 5 * mm]),
        one("thm1:k=1,s=1", fp(Family::T1, 1).with_s(1), vec![5, 4 * mm + 1, 5 * mm]),
        one(
            "thm2:k=2,s=0,u=-i,i=1/3",
            fp(Family::T2, 2).with_i(i3).with_u(-i3 + (1 - 3 * i3) / q),
            vec![1, polar(-1, 3)?, polar(4, 3)?],
        ),
    ];
    let mut case4 = Vec::new();
    let mut case8 = Vec::new();
    for &k in &valid_k {
        let kk = 1i128 << k;
        case4.push(inst(
            inverse_point(Family::T2, k)?,
            vec![1, mm, polar(1, kk + 1)?],
        ));
        case8.push(inst(
            inverse_point(Family::T4, k)?,
            vec![1, polar(1, kk + 1)?, polar(kk, kk + 1)?],
        ));
    }
    cases.push(SpecialCase {
        id: "thm2:s=0,u=0,i=1/(2^k+1)",
        instances: case4,
    });
    cases.push(one(
        "thm3:k=2,s=1",
        fp(Family::T3, 2).with_s(1),
        vec![7, 3 * mm + 4, 4 * mm + 3, 5 * mm + 2, 6 * mm + 1],
    ));
    cases.push(one(
        "thm4:k=1,s=0,u=1,i=1",
        fp(Family::T4, 1).with_u(1),
        vec![mm + 4, 2 * mm + 3, 5 * mm],
    ));
    cases.push(one(
        "thm4:k=3,s=0,u=-1,i=2^m",
        fp(Family::T4, 3).with_u(-1).with_i(mm),
        vec![7, 7 * mm, 8 * mm - 1],
    ));
    cases.push(SpecialCase {
        id: "thm4:s=0,u=0,i=1/(2^k+1)",
        instances: case8,
    });
    cases.push(one(
        "thm5:k=3",
        fp(Family::T5, 3),
        vec![7, 2 * mm + 5, 3 * mm + 4, 5 * mm + 2, 6 * mm + 1],
    ));
    cases.push(one(
        "thm6:k=3,u=-1,i=2^m",
        fp(Family::T6, 3).with_u(-1).with_i(mm),
        vec![5, mm + 4, 3 * mm + 2, 4 * mm + 1, 6 * mm - 1],
    ));
    Ok(cases)
}
