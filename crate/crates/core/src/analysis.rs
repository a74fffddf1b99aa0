//! Algebraic-degree tables for the known catalog and the witnesses, and the
//! degree-based EA-inequivalence verdicts built on them.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{build_known, build_witness, Family, KnownFamily, Witness};
use crate::gf2n::{FieldCtx, MAX_M};
use crate::numtheory::hamming_weight;
use crate::polyexp::SparsePoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum DegreeClaim {
    Exactly(u32),
    AtMost(u32),
}

impl DegreeClaim {
    pub fn holds(self, degree: u32) -> bool {
        match self {
            DegreeClaim::Exactly(d) => degree == d,
            DegreeClaim::AtMost(d) => degree <= d,
        }
    }
}

/// The degree asserted for a catalog entry at `m`.
pub fn known_degree_claim(id: KnownFamily, m: u32) -> DegreeClaim {
    use KnownFamily::*;
    match id {
        F3 | F17 | F18 => DegreeClaim::AtMost(2),
        F1 | F11 | F12 | F13 | F15 | F16 => DegreeClaim::Exactly(3),
        F2 | F4 | F5 | F9 | F10 => DegreeClaim::Exactly(m + 1),
        F14 if m == 2 => DegreeClaim::Exactly(3),
        F14 => DegreeClaim::Exactly(m + 2),
        F6 { .. } | F7 { .. } | F8(_) => DegreeClaim::AtMost(m + 1),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeRow {
    pub id: String,
    pub applicable: bool,
    pub skip_reason: Option<String>,
    pub degree: Option<u32>,
    pub claim: Option<DegreeClaim>,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeTable {
    pub m: u32,
    pub rows: Vec<DegreeRow>,
}

impl DegreeTable {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| !r.applicable || r.matches)
    }

    pub fn row(&self, id: &str) -> Option<&DegreeRow> {
        self.rows.iter().find(|r| r.id == id)
    }

    /// Applicable catalog rows with their computed degrees.
    pub fn known_degrees(&self) -> Vec<(String, u32)> {
        self.rows
            .iter()
            .filter(|r| r.applicable && r.id.starts_with('f'))
            .filter_map(|r| Some((r.id.clone(), r.degree?)))
            .collect()
    }
}

fn check_even_m(m: u32) -> Result<()> {
    if m == 0 || m % 2 != 0 || m > MAX_M {
        return Err(Error::ParamOutOfRange(format!("m = {m} must be even and at most {MAX_M}")));
    }
    Ok(())
}

fn shared_ctx(m: u32) -> Result<Arc<FieldCtx>> {
    Ok(Arc::new(crate::gf2n::make_ctx(m)?))
}

/// Degrees of every applicable catalog entry and of the witnesses at `m`.
///
/// Catalog numbers with no applicable instance get one skipped row.
pub fn degree_claims(m: u32) -> Result<DegreeTable> {
    check_even_m(m)?;
    let ctx = shared_ctx(m)?;
    let catalog = KnownFamily::catalog(m);
    let mut known_rows: Vec<DegreeRow> = catalog
        .par_iter()
        .map(|&id| {
            let degree = build_known(id, &ctx)
                .expect("catalog entries satisfy their side conditions")
                .algebraic_degree();
            let claim = known_degree_claim(id, m);
            DegreeRow {
                id: id.label(),
                applicable: true,
                skip_reason: None,
                degree: Some(degree),
                claim: Some(claim),
                matches: claim.holds(degree),
            }
        })
        .collect();
    for number in 1..=18u32 {
        if catalog.iter().any(|f| f.number() == number) {
            continue;
        }
        let probe = KnownFamily::from_name(&format!("f{number}"), Some(1))?;
        let pos = known_rows
            .iter()
            .position(|r| catalog_number(&r.id) > number)
            .unwrap_or(known_rows.len());
        known_rows.insert(
            pos,
            DegreeRow {
                id: format!("f{number}"),
                applicable: false,
                skip_reason: Some(skip_reason(probe, m)),
                degree: None,
                claim: None,
                matches: true,
            },
        );
    }
    let witnesses: Vec<Witness> = Witness::ALL
        .into_iter()
        .filter(|w| w.only_m2() == (m == 2))
        .collect();
    let witness_rows: Vec<DegreeRow> = witnesses
        .par_iter()
        .map(|&w| {
            let degree = build_witness(w, &ctx)
                .expect("witness defined at this m")
                .algebraic_degree();
            let claim = DegreeClaim::Exactly(w.claimed_degree(m));
            DegreeRow {
                id: w.name(),
                applicable: true,
                skip_reason: None,
                degree: Some(degree),
                claim: Some(claim),
                matches: claim.holds(degree),
            }
        })
        .collect();
    known_rows.extend(witness_rows);
    Ok(DegreeTable { m, rows: known_rows })
}

fn catalog_number(label: &str) -> u32 {
    label
        .trim_start_matches('f')
        .split('[')
        .next()
        .and_then(|d| d.parse().ok())
        .unwrap_or(u32::MAX)
}

fn skip_reason(probe: KnownFamily, m: u32) -> String {
    match probe {
        KnownFamily::F6 { .. } => "no k in 1..m with gcd(2^k-1,2^m+1)=1".to_string(),
        KnownFamily::F7 { .. } => "no k in 1..=2m with gcd(2^k+1,2^m+1)=1".to_string(),
        other => other
            .side_condition(m)
            .err()
            .unwrap_or_else(|| "side condition".to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EaVerdict {
    Inequivalent,
    Unknown,
}

fn is_constant(p: &SparsePoly) -> bool {
    p.terms().iter().all(|t| t.exp == 0)
}

/// Distinct algebraic degrees certify EA-inequivalence; equal degrees decide nothing.
pub fn ea_inequiv_by_degree(p1: &SparsePoly, p2: &SparsePoly) -> Result<EaVerdict> {
    if is_constant(p1) || is_constant(p2) {
        return Err(Error::ConstantInput);
    }
    Ok(if p1.algebraic_degree() != p2.algebraic_degree() {
        EaVerdict::Inequivalent
    } else {
        EaVerdict::Unknown
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KnownDegree {
    pub id: String,
    pub degree: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationVerdict {
    pub family: Family,
    pub m: u32,
    pub witness: String,
    pub witness_degree: u32,
    pub claimed_degree: u32,
    pub degree_matches_claim: bool,
    pub knowns: Vec<KnownDegree>,
    /// Applicable catalog entries sharing the witness degree.
    pub colliding: Vec<String>,
    pub separated: bool,
}

fn verdict_from_table(family: Family, table: &DegreeTable) -> Result<SeparationVerdict> {
    let m = table.m;
    let w = Witness::for_family(family, m)?;
    let ctx = shared_ctx(m)?;
    let witness_degree = build_witness(w, &ctx)?.algebraic_degree();
    let claimed_degree = w.claimed_degree(m);
    let knowns: Vec<KnownDegree> = table
        .known_degrees()
        .into_iter()
        .map(|(id, degree)| KnownDegree { id, degree })
        .collect();
    let colliding: Vec<String> = knowns
        .iter()
        .filter(|k| k.degree == witness_degree)
        .map(|k| k.id.clone())
        .collect();
    Ok(SeparationVerdict {
        family,
        m,
        witness: w.name(),
        witness_degree,
        claimed_degree,
        degree_matches_claim: witness_degree == claimed_degree,
        separated: colliding.is_empty(),
        knowns,
        colliding,
    })
}

/// Compares the family's witness degree at `m` against every applicable
/// catalog entry.
pub fn separation_report(family: Family, m: u32) -> Result<SeparationVerdict> {
    if !family.is_full_field() {
        return Err(Error::UnsupportedFamily(family.name().to_string()));
    }
    verdict_from_table(family, &degree_claims(m)?)
}

/// Degree table plus the six verdicts at `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub m: u32,
    pub degree_table: DegreeTable,
    pub verdicts: Vec<SeparationVerdict>,
    pub claims_match: bool,
    pub all_separated: bool,
}

pub fn witness_report(m: u32) -> Result<WitnessReport> {
    let degree_table = degree_claims(m)?;
    let verdicts = Family::FULL_FIELD
        .iter()
        .map(|&f| verdict_from_table(f, &degree_table))
        .collect::<Result<Vec<_>>>()?;
    Ok(WitnessReport {
        m,
        claims_match: degree_table.all_match() && verdicts.iter().all(|v| v.degree_matches_claim),
        all_separated: verdicts.iter().all(|v| v.separated),
        degree_table,
        verdicts,
    })
}

/// wt(s(2^m - 1)) = m for every 1 <= s <= 2^m.
pub fn weight_lemma_check(m: u32) -> bool {
    if m == 0 || m > 31 {
        return false;
    }
    let mm = 1u64 << m;
    (1..=mm).all(|s| hamming_weight(s * (mm - 1)) == m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2n::make_ctx;

    fn ctx(m: u32) -> Arc<FieldCtx> {
        Arc::new(make_ctx(m).unwrap())
    }

    #[test]
    fn table_examples() {
        let t4 = degree_claims(4).unwrap();
        assert_eq!(t4.row("f9").unwrap().degree, Some(5));
        assert_eq!(t4.row("f1").unwrap().degree, Some(3));
        assert!(!t4.row("f14").unwrap().applicable);
        assert!(t4.all_match());
        let t2 = degree_claims(2).unwrap();
        assert_eq!(t2.row("f14").unwrap().degree, Some(3));
        assert!(t2.all_match());
        assert!(degree_claims(3).is_err());
    }

    #[test]
    fn rows_follow_catalog_order() {
        let t = degree_claims(6).unwrap();
        let nums: Vec<u32> = t
            .rows
            .iter()
            .filter(|r| r.id.starts_with('f'))
            .map(|r| catalog_number(&r.id))
            .collect();
        assert!(nums.windows(2).all(|w| w[0] <= w[1]), "{nums:?}");
        assert_eq!(nums.first(), Some(&1));
        assert_eq!(nums.last(), Some(&18));
    }

    #[test]
    fn ea_examples() {
        let c = ctx(2);
        let p = |e: i128| SparsePoly::from_exponents([e], &c);
        assert_eq!(ea_inequiv_by_degree(&p(2), &p(3)).unwrap(), EaVerdict::Inequivalent);
        assert_eq!(ea_inequiv_by_degree(&p(2), &p(4)).unwrap(), EaVerdict::Unknown);
        assert_eq!(
            ea_inequiv_by_degree(&p(0), &p(4)).unwrap_err(),
            Error::ConstantInput
        );
        assert!(ea_inequiv_by_degree(&SparsePoly::zero(&c), &p(4)).is_err());
        let c4 = ctx(4);
        let g1 = build_witness(Witness::G1, &c4).unwrap();
        let f9 = build_known(KnownFamily::F9, &c4).unwrap();
        assert_eq!(ea_inequiv_by_degree(&g1, &f9).unwrap(), EaVerdict::Inequivalent);
    }

    #[test]
    fn separation_examples() {
        let v = separation_report(Family::T1, 4).unwrap();
        assert_eq!(v.witness, "g1");
        assert_eq!(v.witness_degree, 7);
        assert!(v.separated);
        let v = separation_report(Family::T6, 4).unwrap();
        assert_eq!(v.witness, "g11");
        assert_eq!(v.witness_degree, 7);
        assert!(separation_report(Family::F1, 4).is_err());
    }

    #[test]
    fn degree_one_knowns_at_m2() {
        let v = separation_report(Family::T1, 2).unwrap();
        assert_eq!(v.witness, "g2");
        assert_eq!(v.witness_degree, 1);
        assert!(v.degree_matches_claim);
        assert!(v.colliding.contains(&"f17".to_string()), "{:?}", v.colliding);
        assert!(!v.separated);
    }

    #[test]
    fn weight_lemma() {
        for m in 1..=10 {
            assert!(weight_lemma_check(m));
        }
        assert!(!weight_lemma_check(0));
    }
}
