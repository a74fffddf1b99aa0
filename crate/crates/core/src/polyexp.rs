//! Sparse polynomials over GF(2^{2m}) in canonical form.
//!
//! Exponents are reduced into `[0, q-1]` as soon as they enter a polynomial and
//! repeated exponents are merged by adding their coefficients, so two coefficient-1
//! terms with the same exponent cancel.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf2n::{FieldCtx, FieldElement};

/// Reduces an exponent so that `x^d` and `x^norm_exp(d, q)` agree on all of GF(q).
///
/// Zero stays zero. Any other `d` is taken mod `q - 1` into the window
/// `[1, q - 1]`, so a nonzero multiple of `q - 1` becomes `q - 1` (which still
/// sends 0 to 0). For negative `d` the identity holds on the nonzero elements.
pub fn norm_exp(d: i128, q: u64) -> u32 {
    if d == 0 {
        return 0;
    }
    let order = i128::from(q) - 1;
    match d.rem_euclid(order) {
        0 => order as u32,
        r => r as u32,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub exp: u32,
    pub coeff: u32,
}

/// A polynomial stored as strictly increasing exponents with nonzero coefficients.
#[derive(Clone)]
pub struct SparsePoly {
    ctx: Arc<FieldCtx>,
    terms: Vec<Term>,
}

impl SparsePoly {
    pub fn zero(ctx: &Arc<FieldCtx>) -> Self {
        SparsePoly {
            ctx: Arc::clone(ctx),
            terms: Vec::new(),
        }
    }

    /// Sum of `x^e` over the given exponents, each with coefficient 1.
    pub fn from_exponents<I>(exps: I, ctx: &Arc<FieldCtx>) -> Self
    where
        I: IntoIterator<Item = i128>,
    {
        let q = u64::from(ctx.q());
        let mut acc: BTreeMap<u32, u32> = BTreeMap::new();
        for d in exps {
            *acc.entry(norm_exp(d, q)).or_insert(0) ^= 1;
        }
        Self::from_map(acc, ctx)
    }

    /// Sum of `coeff * x^e`; coefficients are combined by field addition.
    pub fn from_terms<I>(terms: I, ctx: &Arc<FieldCtx>) -> Result<Self>
    where
        I: IntoIterator<Item = (i128, u32)>,
    {
        let q = u64::from(ctx.q());
        let mut acc: BTreeMap<u32, u32> = BTreeMap::new();
        for (d, c) in terms {
            if c >= ctx.q() {
                return Err(Error::ParamOutOfRange(format!(
                    "coefficient {c:#x} is not an element of GF(2^{})",
                    ctx.n()
                )));
            }
            *acc.entry(norm_exp(d, q)).or_insert(0) ^= c;
        }
        Ok(Self::from_map(acc, ctx))
    }

    fn from_map(acc: BTreeMap<u32, u32>, ctx: &Arc<FieldCtx>) -> Self {
        let terms = acc
            .into_iter()
            .filter(|&(_, c)| c != 0)
            .map(|(exp, coeff)| Term { exp, coeff })
            .collect();
        SparsePoly {
            ctx: Arc::clone(ctx),
            terms,
        }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.terms.iter().map(|t| t.exp).collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains_exponent(&self, exp: u32) -> bool {
        self.terms.binary_search_by_key(&exp, |t| t.exp).is_ok()
    }

    /// True when every coefficient equals 1.
    pub fn has_unit_coefficients(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == 1)
    }

    pub fn evaluate<'a>(&self, x: FieldElement<'a>) -> Result<FieldElement<'a>> {
        if !self.ctx.same_field(x.ctx()) {
            return Err(Error::CtxMismatch {
                left: self.ctx.m(),
                right: x.ctx().m(),
            });
        }
        x.ctx().element(self.eval_raw(x.bits()))
    }

    /// Evaluation on a raw encoding; `x` must be < q.
    #[inline]
    pub fn eval_raw(&self, x: u32) -> u32 {
        let ctx = &*self.ctx;
        self.terms.iter().fold(0u32, |acc, t| {
            let p = ctx.pow_raw(x, u64::from(t.exp));
            acc ^ if t.coeff == 1 {
                p
            } else {
                ctx.mul_raw(p, t.coeff)
            }
        })
    }

    /// Largest Hamming weight of an exponent present in the polynomial.
    pub fn algebraic_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.exp.count_ones())
            .max()
            .unwrap_or(0)
    }

    /// `"e:coeff"` pairs in ascending exponent order joined by `+`, coefficients in
    /// lowercase hex; the zero polynomial is `"0"`.
    pub fn canonical_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_owned();
        }
        self.terms
            .iter()
            .map(|t| format!("{}:{:x}", t.exp, t.coeff))
            .collect::<Vec<_>>()
            .join("+")
    }
}

pub fn from_exponents<I>(exps: I, ctx: &Arc<FieldCtx>) -> SparsePoly
where
    I: IntoIterator<Item = i128>,
{
    SparsePoly::from_exponents(exps, ctx)
}

pub fn evaluate<'a>(p: &SparsePoly, x: FieldElement<'a>) -> Result<FieldElement<'a>> {
    p.evaluate(x)
}

pub fn algebraic_degree(p: &SparsePoly) -> u32 {
    p.algebraic_degree()
}

impl PartialEq for SparsePoly {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_field(&other.ctx) && self.terms == other.terms
    }
}

impl Eq for SparsePoly {}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparsePoly[m={}]({})", self.ctx.m(), self.canonical_text())
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text())
    }
}
