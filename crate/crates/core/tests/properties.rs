use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use permpoly::families::{build_frac, build_pp, check_conditions, Family, FamilyParams};
use permpoly::gf2n::{make_ctx, FieldCtx};
use permpoly::numtheory::{gcd, mod_inverse, v2};
use permpoly::polyexp::{norm_exp, SparsePoly};
use permpoly::subgroup::make_subgroup;
use permpoly::verify::brute_force_is_pp;
use proptest::prelude::*;

fn ctx(m: u32) -> Arc<FieldCtx> {
    static CTXS: OnceLock<Vec<Arc<FieldCtx>>> = OnceLock::new();
    let all = CTXS.get_or_init(|| (1..=8).map(|m| Arc::new(make_ctx(m).unwrap())).collect());
    Arc::clone(&all[m as usize - 1])
}

fn even_m() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 4, 6, 8])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn norm_exp_window_and_value(m in 1u32..=6, d in -100_000i128..100_000, x in any::<u32>()) {
        let c = ctx(m);
        let q = u64::from(c.q());
        let e = norm_exp(d, q);
        let x = x % c.q();
        if d == 0 {
            prop_assert_eq!(e, 0);
        } else {
            prop_assert!((1..q).contains(&u64::from(e)));
            prop_assert_eq!((d - i128::from(e)).rem_euclid(i128::from(q) - 1), 0);
        }
        if d >= 0 {
            // x^d computed by repeated squaring of the unreduced exponent.
            let direct = c.pow_raw(x, d as u64);
            prop_assert_eq!(c.pow_raw(x, u64::from(e)), direct);
        }
    }

    #[test]
    fn degree_is_max_weight_of_surviving_exponents(
        m in 1u32..=6,
        exps in prop::collection::vec(0i128..5000, 0..12),
    ) {
        let c = ctx(m);
        let q = 1i128 << (2 * m);
        let mut parity: BTreeMap<i128, bool> = BTreeMap::new();
        for &d in &exps {
            let r = if d == 0 { 0 } else { (d - 1) % (q - 1) + 1 };
            *parity.entry(r).or_default() ^= true;
        }
        let expected = parity
            .iter()
            .filter(|(_, &odd)| odd)
            .map(|(e, _)| e.count_ones())
            .max()
            .unwrap_or(0);
        let p = SparsePoly::from_exponents(exps.iter().copied(), &c);
        prop_assert_eq!(p.algebraic_degree(), expected);
        prop_assert_eq!(p.len(), parity.values().filter(|&&o| o).count());
    }

    #[test]
    fn unit_coefficient_polys_commute_with_squaring(
        m in 1u32..=6,
        exps in prop::collection::vec(0i128..5000, 1..8),
        x in any::<u32>(),
    ) {
        let c = ctx(m);
        let x = x % c.q();
        let p = SparsePoly::from_exponents(exps, &c);
        let fx = p.eval_raw(x);
        prop_assert_eq!(p.eval_raw(c.mul_raw(x, x)), c.mul_raw(fx, fx));
    }

    #[test]
    fn gcd_matches_valuations(k in 1i128..=62, m in 1i128..=62) {
        let coprime = gcd((1i128 << k) - 1, (1i128 << m) + 1) == 1;
        prop_assert_eq!(coprime, v2(k).unwrap() <= v2(m).unwrap());
    }

    #[test]
    fn inverse_is_inverse(a in -1_000_000i128..1_000_000, n in 2i128..100_000) {
        match mod_inverse(a, n) {
            Ok(b) => {
                prop_assert!((1..n).contains(&b));
                prop_assert_eq!((a * b).rem_euclid(n), 1);
            }
            Err(_) => prop_assert_ne!(gcd(a, n), 1),
        }
    }

    #[test]
    fn field_multiplication_is_a_ring(m in 1u32..=8, a in any::<u32>(), b in any::<u32>(), e in any::<u32>()) {
        let f = ctx(m);
        let (a, b, e) = (a % f.q(), b % f.q(), e % f.q());
        prop_assert_eq!(f.mul_raw(a, b), f.mul_raw(b, a));
        prop_assert_eq!(f.mul_raw(a, b ^ e), f.mul_raw(a, b) ^ f.mul_raw(a, e));
        prop_assert_eq!(f.mul_raw(f.mul_raw(a, b), e), f.mul_raw(a, f.mul_raw(b, e)));
        if a != 0 {
            prop_assert_eq!(f.mul_raw(a, f.inv_raw(a).unwrap()), 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn f27_agrees_with_lem4(m in even_m(), half in 1u32..=8) {
        let k = 2 * half;
        let p = FamilyParams::new(Family::F27, m, k);
        prop_assume!(check_conditions(&p).all_hold());
        let c = ctx(m);
        let big = build_frac(&p).unwrap();
        let small = build_frac(&FamilyParams::new(Family::L4, m, k)).unwrap();
        for &x in make_subgroup(&c).elements() {
            prop_assert_eq!(big.eval_raw(&c, x), small.eval_raw(&c, x));
        }
    }

    #[test]
    fn f31_agrees_with_lem5(m in even_m(), half in 0u32..=8) {
        let k = 2 * half + 1;
        let p = FamilyParams::new(Family::F31, m, k);
        prop_assume!(check_conditions(&p).all_hold());
        let c = ctx(m);
        let big = build_frac(&p).unwrap();
        let small = build_frac(&FamilyParams::new(Family::L5, m, k)).unwrap();
        for &x in make_subgroup(&c).elements() {
            prop_assert_eq!(big.eval_raw(&c, x), small.eval_raw(&c, x));
        }
    }

    #[test]
    fn thm1_conditions_imply_permutation(m in prop::sample::select(vec![2u32, 4, 6]), k in 1u32..=12, s in -30i128..=30) {
        let p = FamilyParams::new(Family::T1, m, k).with_s(s);
        prop_assume!(check_conditions(&p).all_hold());
        prop_assert!(brute_force_is_pp(&build_pp(&p, &ctx(m)).unwrap()).is_permutation);
    }

    #[test]
    fn thm2_conditions_imply_permutation(
        m in prop::sample::select(vec![2u32, 4]),
        k in 1u32..=8,
        s in -10i128..=10,
        u in -10i128..=10,
        i in 1i128..=16,
    ) {
        let p = FamilyParams::new(Family::T2, m, k).with_s(s).with_u(u).with_i(i);
        prop_assume!(check_conditions(&p).all_hold());
        prop_assert!(brute_force_is_pp(&build_pp(&p, &ctx(m)).unwrap()).is_permutation);
    }

    #[test]
    fn thm6_conditions_imply_permutation(
        m in prop::sample::select(vec![2u32, 4]),
        k in 1u32..=10,
        u in -10i128..=10,
        i in 1i128..=16,
    ) {
        let p = FamilyParams::new(Family::T6, m, k).with_u(u).with_i(i);
        prop_assume!(check_conditions(&p).all_hold());
        prop_assert!(brute_force_is_pp(&build_pp(&p, &ctx(m)).unwrap()).is_permutation);
    }
}
