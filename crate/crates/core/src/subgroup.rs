//! Roots of unity inside GF(2^{2m}) and fractional polynomials over them.
//!
//! The subgroup of interest is U, the (2^m+1)-th roots of unity. On U every
//! exponent only matters mod 2^m+1, which is how [`FracPoly`] stores them.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2n::{FieldCtx, FieldElement};

/// The cyclic group of d-th roots of unity, materialized as a list.
#[derive(Debug, Clone)]
pub struct RootsOfUnity {
    ctx: Arc<FieldCtx>,
    order: u64,
    elements: Vec<u32>,
}

/// U, the order-(2^m+1) subgroup.
pub type SubgroupU = RootsOfUnity;

pub fn make_subgroup(ctx: &Arc<FieldCtx>) -> SubgroupU {
    RootsOfUnity::new(ctx, (1u64 << ctx.m()) + 1).expect("2^m+1 divides 2^2m-1")
}

impl RootsOfUnity {
    /// Enumerates μ_d as successive powers of generator^((q-1)/d).
    pub fn new(ctx: &Arc<FieldCtx>, d: u64) -> Result<Self> {
        let q_minus_one = ctx.group_order();
        if d == 0 || q_minus_one % d != 0 {
            return Err(Error::NotADivisor { d, q_minus_one });
        }
        let root = ctx.pow_raw(ctx.generator().bits(), q_minus_one / d);
        let mut elements = Vec::with_capacity(d as usize);
        let mut x = 1u32;
        for _ in 0..d {
            elements.push(x);
            x = ctx.mul_raw(x, root);
        }
        Ok(RootsOfUnity {
            ctx: Arc::clone(ctx),
            order: d,
            elements,
        })
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Members as raw encodings, in the order 1, ζ, ζ², ...
    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = FieldElement<'_>> + '_ {
        self.elements
            .iter()
            .map(move |&b| self.ctx.element(b).expect("member is a field element"))
    }

    pub fn contains(&self, x: FieldElement<'_>) -> Result<bool> {
        if !self.ctx.same_field(x.ctx()) {
            return Err(Error::CtxMismatch {
                left: self.ctx.m(),
                right: x.ctx().m(),
            });
        }
        Ok(self.contains_raw(x.bits()))
    }

    pub fn contains_raw(&self, x: u32) -> bool {
        x != 0 && self.ctx.pow_raw(x, self.order) == 1
    }
}

pub fn in_u(x: FieldElement<'_>, u: &SubgroupU) -> Result<bool> {
    u.contains(x)
}

/// A ratio of coefficient-1 polynomials, meaningful only on a subgroup of order
/// `order`: exponents are kept mod `order` with paired terms cancelled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FracPoly {
    order: u64,
    num: Vec<u32>,
    den: Vec<u32>,
}

fn reduce_odd(exps: impl IntoIterator<Item = i128>, order: u64) -> Vec<u32> {
    let mut parity: HashMap<u32, bool> = HashMap::new();
    for e in exps {
        let r = e.rem_euclid(i128::from(order)) as u32;
        *parity.entry(r).or_insert(false) ^= true;
    }
    let mut out: Vec<u32> = parity
        .into_iter()
        .filter_map(|(e, odd)| odd.then_some(e))
        .collect();
    out.sort_unstable();
    out
}

impl FracPoly {
    pub fn new<N, D>(num: N, den: D, order: u64) -> Self
    where
        N: IntoIterator<Item = i128>,
        D: IntoIterator<Item = i128>,
    {
        FracPoly {
            order,
            num: reduce_odd(num, order),
            den: reduce_odd(den, order),
        }
    }

    /// `x ↦ x`, written as x^1 / x^0.
    pub fn identity(order: u64) -> Self {
        Self::new([1], [0], order)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn numerator(&self) -> &[u32] {
        &self.num
    }

    pub fn denominator(&self) -> &[u32] {
        &self.den
    }

    /// `None` when the denominator vanishes at `x`.
    pub fn eval_raw(&self, ctx: &FieldCtx, x: u32) -> Option<u32> {
        let sum = |exps: &[u32]| {
            exps.iter()
                .fold(0u32, |acc, &e| acc ^ ctx.pow_raw(x, u64::from(e)))
        };
        let den = sum(&self.den);
        let inv = ctx.inv_raw(den)?;
        Some(ctx.mul_raw(sum(&self.num), inv))
    }
}

impl fmt::Display for FracPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "num={:?};den={:?}", self.num, self.den)
    }
}

fn check_order(f: &FracPoly, u: &RootsOfUnity) -> Result<()> {
    if f.order != u.order {
        return Err(Error::ParamOutOfRange(format!(
            "fraction reduced mod {} evaluated on a subgroup of order {}",
            f.order, u.order
        )));
    }
    Ok(())
}

pub fn eval_frac<'a>(
    f: &FracPoly,
    x: FieldElement<'a>,
    u: &SubgroupU,
) -> Result<FieldElement<'a>> {
    check_order(f, u)?;
    if !u.contains(x)? {
        return Err(Error::NotInSubgroup(x.bits(), u.order));
    }
    let y = f
        .eval_raw(x.ctx(), x.bits())
        .ok_or(Error::DenominatorZero { x: x.bits() })?;
    x.ctx().element(y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UWitness {
    /// Two members with the same image.
    Collision { x1: u32, x2: u32 },
    DenominatorZero { x: u32 },
    /// The image left the subgroup.
    Escapes { x: u32, image: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UPermReport {
    pub permutes: bool,
    pub witness: Option<UWitness>,
}

/// Bijectivity of `x ↦ map(x)` on the members of `u`, stopping at the first
/// failure in enumeration order.
pub(crate) fn check_bijection_on<F>(u: &RootsOfUnity, map: F) -> UPermReport
where
    F: Fn(u32) -> std::result::Result<u32, UWitness>,
{
    let mut seen: HashMap<u32, u32> = HashMap::with_capacity(u.elements.len());
    for &x in &u.elements {
        let y = match map(x) {
            Ok(y) => y,
            Err(w) => {
                return UPermReport {
                    permutes: false,
                    witness: Some(w),
                }
            }
        };
        if !u.contains_raw(y) {
            return UPermReport {
                permutes: false,
                witness: Some(UWitness::Escapes { x, image: y }),
            };
        }
        if let Some(&x1) = seen.get(&y) {
            return UPermReport {
                permutes: false,
                witness: Some(UWitness::Collision { x1, x2: x }),
            };
        }
        seen.insert(y, x);
    }
    UPermReport {
        permutes: true,
        witness: None,
    }
}

pub fn frac_permutes_u(f: &FracPoly, u: &SubgroupU) -> Result<UPermReport> {
    check_order(f, u)?;
    let ctx = u.ctx();
    Ok(check_bijection_on(u, |x| {
        f.eval_raw(ctx, x).ok_or(UWitness::DenominatorZero { x })
    }))
}

/// Bijectivity of `x ↦ f(x^inner_exp)` on U.
pub fn composed_permutes_u(f: &FracPoly, inner_exp: i128, u: &SubgroupU) -> Result<UPermReport> {
    check_order(f, u)?;
    let ctx = u.ctx();
    let e = inner_exp.rem_euclid(i128::from(u.order)) as u64;
    Ok(check_bijection_on(u, |x| {
        let y = ctx.pow_raw(x, e);
        f.eval_raw(ctx, y).ok_or(UWitness::DenominatorZero { x })
    }))
}
