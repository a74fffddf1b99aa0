//! Three independent permutation tests for polynomials over GF(2^{2m}):
//! exhaustive evaluation, the x^r h(x^{(q-1)/d}) criterion, and the
//! exponential-sum count over U.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2n::FieldCtx;
use crate::numtheory::gcd;
use crate::polyexp::{norm_exp, SparsePoly};
use crate::subgroup::{check_bijection_on, make_subgroup, RootsOfUnity, SubgroupU, UWitness};

/// Work below this many items stays on the calling thread.
const PAR_MIN_LEN: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BruteForce,
    Zieve,
    ExpSum,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpSumWitness {
    pub delta: u32,
    /// ω_1 = 1 followed by ω_i = δ^{d_1 - d_i}.
    pub omegas: Vec<u32>,
    pub n_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerifyWitness {
    Collision { x1: u32, x2: u32 },
    /// gcd(r, (q-1)/d) > 1.
    NotCoprime { r: i128, index: u64, gcd: i128 },
    Subgroup { order: u64, detail: UWitness },
    ExpSum(ExpSumWitness),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub method: Method,
    pub is_permutation: bool,
    pub witness: Option<VerifyWitness>,
    #[serde(skip)]
    pub elapsed: Duration,
    pub checked_points: u64,
}

/// Evaluates `p` at every element and looks for a repeated value.
pub fn brute_force_is_pp(p: &SparsePoly) -> VerifyReport {
    let start = Instant::now();
    let q = p.ctx().q();
    let values: Vec<u32> = (0..q)
        .into_par_iter()
        .with_min_len(PAR_MIN_LEN)
        .map(|x| p.eval_raw(x))
        .collect();
    let mut occupied = vec![0u64; (q as usize).div_ceil(64)];
    let mut witness = None;
    let mut checked = u64::from(q);
    for (x2, &y) in values.iter().enumerate() {
        let (word, bit) = (y as usize / 64, y % 64);
        if occupied[word] >> bit & 1 == 1 {
            let x1 = values.iter().position(|&v| v == y).expect("value seen before");
            witness = Some(VerifyWitness::Collision {
                x1: x1 as u32,
                x2: x2 as u32,
            });
            checked = x2 as u64 + 1;
            break;
        }
        occupied[word] |= 1 << bit;
    }
    VerifyReport {
        method: Method::BruteForce,
        is_permutation: witness.is_none(),
        witness,
        elapsed: start.elapsed(),
        checked_points: checked,
    }
}

fn subgroup_index(d: u64, ctx: &FieldCtx) -> Result<u64> {
    let q_minus_one = ctx.group_order();
    if d == 0 || q_minus_one % d != 0 {
        return Err(Error::NotADivisor { d, q_minus_one });
    }
    Ok(q_minus_one / d)
}

/// Tests x^r h(x^{(q-1)/d}) for bijectivity via gcd(r, (q-1)/d) = 1 and
/// bijectivity of x^r h(x)^{(q-1)/d} on the d-th roots of unity.
pub fn zieve_check(r: i128, h_exps: &[i128], d: u64, ctx: &std::sync::Arc<FieldCtx>) -> Result<VerifyReport> {
    let start = Instant::now();
    let index = subgroup_index(d, ctx)?;
    if r <= 0 {
        return Err(Error::PreconditionViolated(format!("r = {r} must be positive")));
    }
    let g = gcd(r, i128::from(index));
    if g != 1 {
        return Ok(VerifyReport {
            method: Method::Zieve,
            is_permutation: false,
            witness: Some(VerifyWitness::NotCoprime { r, index, gcd: g }),
            elapsed: start.elapsed(),
            checked_points: 0,
        });
    }
    let mu = RootsOfUnity::new(ctx, d)?;
    let order = i128::from(d);
    let r_red = r.rem_euclid(order) as u64;
    let h_red: Vec<u64> = h_exps.iter().map(|e| e.rem_euclid(order) as u64).collect();
    let report = check_bijection_on(&mu, |x| {
        let h = h_red.iter().fold(0u32, |acc, &e| acc ^ ctx.pow_raw(x, e));
        Ok(ctx.mul_raw(ctx.pow_raw(x, r_red), ctx.pow_raw(h, index)))
    });
    Ok(VerifyReport {
        method: Method::Zieve,
        is_permutation: report.permutes,
        witness: report
            .witness
            .map(|detail| VerifyWitness::Subgroup { order: d, detail }),
        elapsed: start.elapsed(),
        checked_points: d,
    })
}

/// Writes a coefficient-1 polynomial as x^r h(x^{(q-1)/d}) with r its smallest
/// exponent, or `None` when the exponents do not share a residue mod (q-1)/d.
pub fn decompose_zieve(p: &SparsePoly, d: u64) -> Option<(i128, Vec<i128>)> {
    let index = subgroup_index(d, p.ctx()).ok()?;
    if p.is_zero() || !p.has_unit_coefficients() {
        return None;
    }
    let exps = p.exponents();
    let r = u64::from(exps[0]);
    if r == 0 {
        return None;
    }
    let mut h = Vec::with_capacity(exps.len());
    for &e in &exps {
        let diff = u64::from(e) - r;
        if diff % index != 0 {
            return None;
        }
        h.push(i128::from(diff / index));
    }
    Some((r as i128, h))
}

/// Checks the hypotheses of the exponential-sum criterion on an exponent
/// list: a unit d_1 and a common residue mod 2^m - 1.
pub fn expsum_preconditions(d_exps: &[i128], ctx: &FieldCtx) -> Result<()> {
    let Some(&d1) = d_exps.first() else {
        return Err(Error::PreconditionViolated("empty exponent list".into()));
    };
    let q_minus_one = i128::from(ctx.group_order());
    let g = gcd(d1, q_minus_one);
    if g != 1 {
        return Err(Error::PreconditionViolated(format!(
            "gcd(d1, q-1) = gcd({d1}, {q_minus_one}) = {g}"
        )));
    }
    let modulus = (1i128 << ctx.m()) - 1;
    if let Some(&d) = d_exps
        .iter()
        .find(|&&d| (d - d1).rem_euclid(modulus) != 0)
    {
        return Err(Error::PreconditionViolated(format!(
            "{d} and d1 = {d1} differ mod 2^m-1 = {modulus}"
        )));
    }
    Ok(())
}

fn check_omegas(d_exps: &[i128], omegas: &[u32], ctx: &FieldCtx) -> Result<()> {
    if omegas.len() != d_exps.len() {
        return Err(Error::ParamOutOfRange(format!(
            "{} coefficients for {} exponents",
            omegas.len(),
            d_exps.len()
        )));
    }
    if let Some(&w) = omegas.iter().find(|&&w| w >= ctx.q()) {
        return Err(Error::ParamOutOfRange(format!("{w:#x} is not a field element")));
    }
    Ok(())
}

/// Powers λ^{d_i} for every λ in U, row-major by λ.
fn subgroup_powers(d_exps: &[i128], u: &SubgroupU) -> Vec<u32> {
    let ctx = u.ctx();
    let order = i128::from(u.order());
    let reduced: Vec<u64> = d_exps.iter().map(|d| d.rem_euclid(order) as u64).collect();
    u.elements()
        .iter()
        .flat_map(|&l| reduced.iter().map(move |&e| ctx.pow_raw(l, e)))
        .collect()
}

fn count_with_powers(powers: &[u32], omegas: &[u32], ctx: &FieldCtx) -> u64 {
    let conj = 1u64 << ctx.m();
    powers
        .chunks_exact(omegas.len())
        .filter(|row| {
            let g = row
                .iter()
                .zip(omegas)
                .fold(0u32, |acc, (&p, &w)| acc ^ ctx.mul_raw(w, p));
            g == ctx.pow_raw(g, conj)
        })
        .count() as u64
}

/// N = #{λ ∈ U : g(λ) + g(λ)^{2^m} = 0} with g(λ) = Σ ω_i λ^{d_i}.
pub fn n_count(d_exps: &[i128], omegas: &[u32], ctx: &std::sync::Arc<FieldCtx>) -> Result<u64> {
    check_omegas(d_exps, omegas, ctx)?;
    let u = make_subgroup(ctx);
    Ok(count_with_powers(&subgroup_powers(d_exps, &u), omegas, ctx))
}

fn omegas_for(delta: u32, d_exps: &[i128], ctx: &FieldCtx) -> Vec<u32> {
    let q_minus_one = i128::from(ctx.group_order());
    let d1 = d_exps[0];
    d_exps
        .iter()
        .map(|&d| ctx.pow_raw(delta, (d1 - d).rem_euclid(q_minus_one) as u64))
        .collect()
}

/// Exponential-sum criterion: Σ x^{d_i} permutes the field iff N = 1 for
/// every δ ≠ 0, where ω_i = δ^{d_1 - d_i}.
pub fn expsum_check(d_exps: &[i128], ctx: &std::sync::Arc<FieldCtx>) -> Result<VerifyReport> {
    let start = Instant::now();
    expsum_preconditions(d_exps, ctx)?;
    let u = make_subgroup(ctx);
    let powers = subgroup_powers(d_exps, &u);
    let q = ctx.q();
    let failure = (1..q)
        .into_par_iter()
        .with_min_len(64)
        .map(|delta| {
            let omegas = omegas_for(delta, d_exps, ctx);
            let n = count_with_powers(&powers, &omegas, ctx);
            (delta, omegas, n)
        })
        .find_first(|(_, _, n)| *n != 1);
    let (is_permutation, witness, checked) = match failure {
        None => (true, None, u64::from(q) - 1),
        Some((delta, omegas, n_count)) => (
            false,
            Some(VerifyWitness::ExpSum(ExpSumWitness {
                delta,
                omegas,
                n_count,
            })),
            u64::from(delta),
        ),
    };
    Ok(VerifyReport {
        method: Method::ExpSum,
        is_permutation,
        witness,
        elapsed: start.elapsed(),
        checked_points: checked,
    })
}

/// Σ_x (-1)^{Tr(Σ ω_i x^{d_i})} computed literally over the whole field.
pub fn direct_expsum(d_exps: &[i128], omegas: &[u32], ctx: &FieldCtx) -> Result<i64> {
    check_omegas(d_exps, omegas, ctx)?;
    let q = u64::from(ctx.q());
    let exps: Vec<u64> = d_exps.iter().map(|&d| u64::from(norm_exp(d, q))).collect();
    let sum = (0..ctx.q())
        .into_par_iter()
        .with_min_len(PAR_MIN_LEN)
        .map(|x| {
            let v = exps
                .iter()
                .zip(omegas)
                .fold(0u32, |acc, (&e, &w)| acc ^ ctx.mul_raw(w, ctx.pow_raw(x, e)));
            1 - 2 * i64::from(ctx.trace_raw(v))
        })
        .sum();
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2n::make_ctx;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn ctx(m: u32) -> Arc<FieldCtx> {
        Arc::new(make_ctx(m).unwrap())
    }

    fn poly(exps: &[i128], c: &Arc<FieldCtx>) -> SparsePoly {
        SparsePoly::from_exponents(exps.iter().copied(), c)
    }

    #[test]
    fn brute_force_monomials() {
        let c = ctx(2);
        assert!(brute_force_is_pp(&poly(&[2], &c)).is_permutation);
        let cube = brute_force_is_pp(&poly(&[3], &c));
        assert!(!cube.is_permutation);
        let Some(VerifyWitness::Collision { x1, x2 }) = cube.witness else {
            panic!("expected a collision");
        };
        assert_ne!(x1, x2);
        let p = poly(&[3], &c);
        assert_eq!(p.eval_raw(x1), p.eval_raw(x2));
        assert!(!brute_force_is_pp(&SparsePoly::zero(&c)).is_permutation);
    }

    #[test]
    fn brute_force_parallel_path() {
        let c = ctx(8);
        let r = brute_force_is_pp(&poly(&[7], &c));
        assert!(r.is_permutation);
        assert_eq!(r.checked_points, 1 << 16);
        assert!(!brute_force_is_pp(&poly(&[5], &c)).is_permutation);
    }

    #[test]
    fn zieve_trivial_cases() {
        let c = ctx(2);
        let id = zieve_check(1, &[0], 15, &c).unwrap();
        assert!(id.is_permutation);
        let bad = zieve_check(3, &[0, 1], 5, &c).unwrap();
        assert!(!bad.is_permutation);
        assert!(matches!(bad.witness, Some(VerifyWitness::NotCoprime { .. })));
        assert!(zieve_check(1, &[0], 4, &c).is_err());
        assert!(zieve_check(0, &[0], 5, &c).is_err());
    }

    #[test]
    fn decompose_examples() {
        let c4 = ctx(4);
        assert_eq!(
            decompose_zieve(&poly(&[5, 20, 80], &c4), 17),
            Some((5, vec![0, 1, 5]))
        );
        let c2 = ctx(2);
        assert_eq!(decompose_zieve(&poly(&[1, 2], &c2), 5), None);
        assert_eq!(decompose_zieve(&poly(&[7], &c2), 5), Some((7, vec![0])));
        assert_eq!(decompose_zieve(&SparsePoly::zero(&c2), 5), None);
        assert_eq!(decompose_zieve(&poly(&[7], &c2), 4), None);
    }

    #[test]
    fn zieve_on_decomposed_t1_points() {
        // x^5 + x^{2^m+4} + x^{5*2^m}: gcd(5, 2^m-1) decides both ways
        let c6 = ctx(6);
        let p = poly(&[5, 68, 320], &c6);
        let (r, h) = decompose_zieve(&p, 65).unwrap();
        assert!(zieve_check(r, &h, 65, &c6).unwrap().is_permutation);
        assert!(brute_force_is_pp(&p).is_permutation);

        let c4 = ctx(4);
        let p = poly(&[5, 20, 80], &c4);
        let (r, h) = decompose_zieve(&p, 17).unwrap();
        assert!(!zieve_check(r, &h, 17, &c4).unwrap().is_permutation);
        assert!(!brute_force_is_pp(&p).is_permutation);
    }

    #[test]
    fn expsum_monomial_and_linear() {
        let c = ctx(2);
        assert!(expsum_check(&[7], &c).unwrap().is_permutation);
        let lin = expsum_check(&[1, 4], &c).unwrap();
        assert!(!lin.is_permutation);
        let Some(VerifyWitness::ExpSum(w)) = lin.witness else {
            panic!("expected a delta witness");
        };
        assert!(w.n_count != 1);
        assert_eq!(w.omegas[0], 1);
        assert_eq!(n_count(&[1, 4], &w.omegas, &c).unwrap(), w.n_count);
    }

    #[test]
    fn expsum_preconditions_reported() {
        let c = ctx(2);
        assert!(matches!(
            expsum_check(&[3], &c),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(matches!(
            expsum_check(&[1, 2], &c),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(expsum_check(&[], &c).is_err());
    }

    #[test]
    fn direct_expsum_examples() {
        let c = ctx(2);
        assert_eq!(direct_expsum(&[7], &[1], &c).unwrap(), 0);
        assert_eq!(direct_expsum(&[7, 1], &[0, 0], &c).unwrap(), 16);
        let n = n_count(&[1, 4], &[1, 1], &c).unwrap() as i64;
        assert_eq!(direct_expsum(&[1, 4], &[1, 1], &c).unwrap(), (n - 1) * 4);
        assert!(direct_expsum(&[1, 4], &[1], &c).is_err());
    }

    #[test]
    fn sum_identity_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in [2u32, 3] {
            let c = ctx(m);
            let modulus = (1i128 << m) - 1;
            let units: Vec<i128> = (1..i128::from(c.group_order()))
                .filter(|&d| gcd(d, i128::from(c.group_order())) == 1)
                .collect();
            for _ in 0..40 {
                let d1 = units[rng.random_range(0..units.len())];
                let t = rng.random_range(1..5);
                let mut exps = vec![d1];
                let mut omegas = vec![1u32];
                for _ in 1..t {
                    exps.push(d1 + modulus * rng.random_range(-20..20));
                    omegas.push(rng.random_range(0..c.q()));
                }
                let n = n_count(&exps, &omegas, &c).unwrap() as i64;
                let direct = direct_expsum(&exps, &omegas, &c).unwrap();
                assert_eq!(direct, (n - 1) << m, "{exps:?} {omegas:?}");
            }
        }
    }

    #[test]
    fn methods_agree_on_small_grid() {
        let c = ctx(2);
        for a in 1..15i128 {
            for b in 0..5i128 {
                let exps = [a, a + 3 * b];
                let p = poly(&exps, &c);
                let brute = brute_force_is_pp(&p).is_permutation;
                if let Ok(r) = expsum_check(&exps, &c) {
                    assert_eq!(r.is_permutation, brute, "{exps:?}");
                }
                if let Some((r, h)) = decompose_zieve(&p, 5) {
                    assert_eq!(zieve_check(r, &h, 5, &c).unwrap().is_permutation, brute);
                }
            }
        }
    }
}
