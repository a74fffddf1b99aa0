//! Command implementations behind the `permpoly` binary: argument types,
//! per-point verification records, grid scans and their serialization.
//!
//! Exit codes: 0 for a report that is internally consistent, 1 for usage or
//! parameter errors, 2 when a report contradicts itself (a hypothesis-passing
//! point that does not permute, or two methods that disagree).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::witness_report;
use crate::error::{Error, Result};
use crate::families::{
    build_known, build_pp, check_conditions, exponent_list, frac_exponent_lists, known_terms,
    Family, FamilyParams, KnownFamily, Witness,
};
use crate::gf2n::{make_ctx, FieldCtx};
use crate::numtheory::gcd;
use crate::polyexp::{norm_exp, SparsePoly};
use crate::subgroup::{frac_permutes_u, make_subgroup, FracPoly};
use crate::verify::{brute_force_is_pp, decompose_zieve, expsum_check, zieve_check, Method};

pub const THREADS_ENV: &str = "PERMPOLY_THREADS";

#[derive(Debug, Parser)]
#[command(name = "permpoly", version, about = "Build and verify permutation polynomials over GF(2^2m)")]
pub struct Cli {
    /// Worker threads; overrides PERMPOLY_THREADS. 0 picks the number of CPUs.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the canonical polynomial or fraction for one parameter point.
    Build(PointArgs),
    /// Verify one parameter point and print its record.
    Verify(VerifyArgs),
    /// Verify every point of a parameter grid.
    Scan(ScanArgs),
    /// Degree table and separation verdicts for one m.
    Witness(WitnessArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    /// thm1..thm6, frac1, frac14, frac27, frac31, lem4, lem5, f1..f18 or g1..g12.
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub m: u32,
    /// Also selects k for f6 and f7.
    #[arg(long)]
    pub k: Option<u32>,
    /// Also selects the (s, t) pair 1..=3 for f8.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<i128>,
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<i128>,
    #[arg(long)]
    pub i: Option<i128>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodSel {
    Brute,
    Zieve,
    Expsum,
    All,
}

impl MethodSel {
    fn runs(self, m: Method) -> bool {
        match self {
            MethodSel::All => true,
            MethodSel::Brute => m == Method::BruteForce,
            MethodSel::Zieve => m == Method::Zieve,
            MethodSel::Expsum => m == Method::ExpSum,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub point: PointArgs,
    #[arg(long, value_enum, default_value_t = MethodSel::All)]
    pub method: MethodSel,
    /// Include elapsed_ms (makes output run-dependent).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// A family with a parameter grid: thm1..thm6, frac1, frac14, frac27, frac31, lem4, lem5.
    #[arg(long)]
    pub family: String,
    /// Values as `a..b` (inclusive), single values and comma-separated mixes.
    #[arg(long, allow_hyphen_values = true)]
    pub m: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub k: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub s: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub u: String,
    /// A range, `units` (every unit mod 2^m+1) or `units:N` (N sampled units).
    #[arg(long, default_value = "1")]
    pub i: String,
    /// Seed for `units:N` sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = MethodSel::All)]
    pub method: MethodSel,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
    /// Write records here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub timings: bool,
    /// Refuse grids with more points than this.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_points: usize,
}

#[derive(Debug, Clone, Args)]
pub struct WitnessArgs {
    #[arg(long)]
    pub m: u32,
}

/// What a `--family` name refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Family(FamilyParams),
    Known(KnownFamily),
    Witness(Witness),
}

/// Resolves a point from CLI-style fields, applying the family's hypotheses
/// on m that make the point meaningless rather than merely failing.
pub fn resolve_target(args: &PointArgs) -> Result<Target> {
    let name = args.family.as_str();
    if let Ok(family) = name.parse::<Family>() {
        if family.needs_even_m() && args.m % 2 != 0 {
            return Err(Error::ParamOutOfRange(format!("{family} needs even m, got {}", args.m)));
        }
        let k = args
            .k
            .ok_or_else(|| Error::ParamOutOfRange(format!("{family} needs --k")))?;
        let p = FamilyParams::new(family, args.m, k)
            .with_s(args.s.unwrap_or(0))
            .with_u(args.u.unwrap_or(0))
            .with_i(args.i.unwrap_or(1));
        p.validate()?;
        return Ok(Target::Family(p));
    }
    if name.starts_with('g') {
        let w = Witness::from_name(name)?;
        w.params(args.m)?;
        return Ok(Target::Witness(w));
    }
    if name.starts_with('f') && !name.starts_with("frac") {
        let extra = match name {
            "f6" | "f7" => args.k.map(i128::from),
            "f8" => args.s,
            _ => None,
        };
        return Ok(Target::Known(KnownFamily::from_name(name, extra)?));
    }
    Err(Error::UnknownId(name.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionEntry {
    pub name: String,
    pub holds: bool,
}

/// A method's verdict, or why it has none.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Outcome {
    Verdict(bool),
    Label(&'static str),
}

impl Outcome {
    pub const NA: Outcome = Outcome::Label("n/a");
    pub const SKIPPED: Outcome = Outcome::Label("skipped");

    pub fn verdict(self) -> Option<bool> {
        match self {
            Outcome::Verdict(b) => Some(b),
            Outcome::Label(_) => None,
        }
    }

    fn text(self) -> String {
        match self {
            Outcome::Verdict(b) => b.to_string(),
            Outcome::Label(l) => l.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Methods {
    pub brute: Outcome,
    pub zieve: Outcome,
    pub expsum: Outcome,
}

/// One verified point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub family: String,
    pub m: u32,
    pub k: Option<u32>,
    pub s: Option<i128>,
    pub u: Option<i128>,
    pub i: Option<i128>,
    pub conditions: Vec<ConditionEntry>,
    /// Listed terms that cancelled or merged during canonicalization.
    pub collapsed_terms: u64,
    pub terms: u64,
    pub methods: Methods,
    pub degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
    pub witness: Option<Value>,
    pub consistent: bool,
}

impl Record {
    pub fn conditions_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }

    /// Brute force when it ran, otherwise the first method with a verdict.
    pub fn primary_verdict(&self) -> Option<bool> {
        [self.methods.brute, self.methods.zieve, self.methods.expsum]
            .into_iter()
            .find_map(Outcome::verdict)
    }
}

fn tagged_witness<T: Serialize>(method: Method, w: &T) -> Value {
    let mut v = serde_json::to_value(w).expect("witness serializes");
    if let Value::Object(map) = &mut v {
        map.insert("method".into(), serde_json::to_value(method).expect("method serializes"));
    }
    v
}

struct Verdicts {
    methods: Methods,
    witness: Option<Value>,
}

/// Runs the selected full-field methods on `poly`; `d1` is the leading
/// exponent for the exponential-sum test.
fn verify_full_field(poly: &SparsePoly, d1: Option<i128>, sel: MethodSel) -> Result<Verdicts> {
    let ctx = poly.ctx();
    let mut witnesses: Vec<Value> = Vec::new();
    let brute = if sel.runs(Method::BruteForce) {
        let r = brute_force_is_pp(poly);
        if let Some(w) = &r.witness {
            witnesses.push(tagged_witness(Method::BruteForce, w));
        }
        Outcome::Verdict(r.is_permutation)
    } else {
        Outcome::SKIPPED
    };
    let zieve = if !sel.runs(Method::Zieve) {
        Outcome::SKIPPED
    } else {
        let d = (1u64 << ctx.m()) + 1;
        match decompose_zieve(poly, d) {
            None => Outcome::NA,
            Some((r, h)) => {
                let rep = zieve_check(r, &h, d, ctx)?;
                if let Some(w) = &rep.witness {
                    witnesses.push(tagged_witness(Method::Zieve, w));
                }
                Outcome::Verdict(rep.is_permutation)
            }
        }
    };
    let expsum = if !sel.runs(Method::ExpSum) {
        Outcome::SKIPPED
    } else {
        match expsum_exponents(poly, d1) {
            None => Outcome::NA,
            Some(exps) => match expsum_check(&exps, ctx) {
                Err(Error::PreconditionViolated(_)) => Outcome::NA,
                Err(e) => return Err(e),
                Ok(rep) => {
                    if let Some(w) = &rep.witness {
                        witnesses.push(tagged_witness(Method::ExpSum, w));
                    }
                    Outcome::Verdict(rep.is_permutation)
                }
            },
        }
    };
    Ok(Verdicts {
        methods: Methods {
            brute,
            zieve,
            expsum,
        },
        witness: witnesses.into_iter().next(),
    })
}

/// Canonical exponents with d1 moved to the front; `None` when the polynomial
/// is not coefficient-1 or the d1 term cancelled.
fn expsum_exponents(poly: &SparsePoly, d1: Option<i128>) -> Option<Vec<i128>> {
    if poly.is_zero() || !poly.has_unit_coefficients() {
        return None;
    }
    let exps = poly.exponents();
    let lead = match d1 {
        Some(d) => norm_exp(d, u64::from(poly.ctx().q())),
        None => exps[0],
    };
    if !exps.contains(&lead) {
        return None;
    }
    let mut out = vec![i128::from(lead)];
    out.extend(exps.iter().filter(|&&e| e != lead).map(|&e| i128::from(e)));
    Some(out)
}

fn verify_fraction(frac: &FracPoly, ctx: &Arc<FieldCtx>, sel: MethodSel) -> Result<Verdicts> {
    let (brute, witness) = if sel.runs(Method::BruteForce) {
        let rep = frac_permutes_u(frac, &make_subgroup(ctx))?;
        let w = rep.witness.map(|w| tagged_witness(Method::BruteForce, &w));
        (Outcome::Verdict(rep.permutes), w)
    } else {
        (Outcome::SKIPPED, None)
    };
    let na_or_skipped = |m| if sel.runs(m) { Outcome::NA } else { Outcome::SKIPPED };
    Ok(Verdicts {
        methods: Methods {
            brute,
            zieve: na_or_skipped(Method::Zieve),
            expsum: na_or_skipped(Method::ExpSum),
        },
        witness,
    })
}

fn consistent(conditions: &[ConditionEntry], methods: &Methods) -> bool {
    let verdicts: Vec<bool> = [methods.brute, methods.zieve, methods.expsum]
        .into_iter()
        .filter_map(Outcome::verdict)
        .collect();
    let agree = verdicts.windows(2).all(|w| w[0] == w[1]);
    let holds = conditions.iter().all(|c| c.holds);
    agree && !(holds && verdicts.contains(&false))
}

fn family_conditions(p: &FamilyParams) -> Vec<ConditionEntry> {
    check_conditions(p)
        .conditions
        .into_iter()
        .map(|c| ConditionEntry {
            name: c.name,
            holds: c.holds,
        })
        .collect()
}

fn param_fields(p: &FamilyParams) -> (Option<i128>, Option<i128>, Option<i128>) {
    let f = p.family;
    (
        f.uses_s().then_some(p.s),
        f.uses_u_and_i().then_some(p.u),
        f.uses_u_and_i().then_some(p.i),
    )
}

/// Verifies one point. `ctx` must be the field for the point's m.
pub fn evaluate_target(
    target: &Target,
    ctx: &Arc<FieldCtx>,
    sel: MethodSel,
    timings: bool,
) -> Result<Record> {
    let start = Instant::now();
    let (family, p, conditions) = match target {
        Target::Family(p) => (p.family.name().to_string(), Some(*p), family_conditions(p)),
        Target::Witness(w) => {
            let p = w.params(ctx.m())?;
            (w.name(), Some(p), family_conditions(&p))
        }
        Target::Known(id) => {
            let holds = id.side_condition(ctx.m()).is_ok();
            let cond = ConditionEntry {
                name: "side_condition".into(),
                holds,
            };
            (id.number().to_string(), None, vec![cond])
        }
    };
    let family = match target {
        Target::Known(_) => format!("f{family}"),
        _ => family,
    };

    let (verdicts, raw_terms, terms, degree) = match p {
        Some(p) if p.family.is_full_field() => {
            let raw = exponent_list(&p)?;
            let poly = build_pp(&p, ctx)?;
            let v = verify_full_field(&poly, p.d1(), sel)?;
            (v, raw.len(), poly.len(), Some(poly.algebraic_degree()))
        }
        Some(p) => {
            let (num, den) = frac_exponent_lists(&p)?;
            let frac = FracPoly::new(num.iter().copied(), den.iter().copied(), p.big_q() as u64);
            let v = verify_fraction(&frac, ctx, sel)?;
            let reduced = frac.numerator().len() + frac.denominator().len();
            (v, num.len() + den.len(), reduced, None)
        }
        None => {
            let Target::Known(id) = target else {
                unreachable!("only catalog targets lack family parameters")
            };
            let listed = known_terms(*id, ctx)?.len();
            let poly = build_known(*id, ctx)?;
            let v = verify_full_field(&poly, None, sel)?;
            (v, listed, poly.len(), Some(poly.algebraic_degree()))
        }
    };

    let (k, s, u, i) = match (target, p) {
        (Target::Known(KnownFamily::F6 { k } | KnownFamily::F7 { k }), _) => (Some(*k), None, None, None),
        (Target::Known(KnownFamily::F8(pair)), _) => (None, Some(i128::from(pair.index())), None, None),
        (Target::Known(_), _) => (None, None, None, None),
        (Target::Witness(_), Some(p)) => (Some(p.k), Some(p.s), Some(p.u), Some(p.i)),
        (_, Some(p)) => {
            let (s, u, i) = param_fields(&p);
            (Some(p.k), s, u, i)
        }
        (_, None) => (None, None, None, None),
    };
    let consistent = consistent(&conditions, &verdicts.methods);
    Ok(Record {
        family,
        m: ctx.m(),
        k,
        s,
        u,
        i,
        conditions,
        collapsed_terms: (raw_terms - terms) as u64,
        terms: terms as u64,
        methods: verdicts.methods,
        degree,
        elapsed_ms: timings.then(|| start.elapsed().as_secs_f64() * 1e3),
        witness: verdicts.witness,
        consistent,
    })
}

/// A set of parameter values.
pub fn parse_values(text: &str) -> Result<Vec<i128>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let bad = || Error::ParamOutOfRange(format!("cannot parse {part:?} as a value or a..b range"));
        match part.split_once("..") {
            Some((a, b)) => {
                let a: i128 = a.trim().parse().map_err(|_| bad())?;
                let b: i128 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
                if b.saturating_sub(a) > 1 << 24 {
                    return Err(Error::ParamOutOfRange(format!("range {part} is too long")));
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn parse_u32_values(text: &str, what: &str) -> Result<Vec<u32>> {
    parse_values(text)?
        .into_iter()
        .map(|v| {
            u32::try_from(v).map_err(|_| Error::ParamOutOfRange(format!("{what} = {v} must be non-negative")))
        })
        .collect()
}

/// How i is chosen at each m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ISpec {
    Values(Vec<i128>),
    Units,
    SampledUnits(usize),
}

impl ISpec {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "units" => Ok(ISpec::Units),
            t if t.starts_with("units:") => t["units:".len()..]
                .parse()
                .map(ISpec::SampledUnits)
                .map_err(|_| Error::ParamOutOfRange(format!("bad sample size in {t:?}"))),
            t => Ok(ISpec::Values(parse_values(t)?)),
        }
    }

    /// Ascending values of i at `m`.
    pub fn values(&self, m: u32, seed: u64) -> Vec<i128> {
        let q = (1i128 << m) + 1;
        let units = || (1..q).filter(|&i| gcd(i, q) == 1).collect::<Vec<_>>();
        match self {
            ISpec::Values(v) => v.clone(),
            ISpec::Units => units(),
            ISpec::SampledUnits(n) => {
                let all = units();
                if *n >= all.len() {
                    return all;
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(m) << 32));
                let mut picked: Vec<i128> = rand::seq::index::sample(&mut rng, all.len(), *n)
                    .into_iter()
                    .map(|ix| all[ix])
                    .collect();
                picked.sort_unstable();
                picked
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanSpec {
    pub family: Family,
    pub ms: Vec<u32>,
    pub ks: Vec<u32>,
    pub ss: Vec<i128>,
    pub us: Vec<i128>,
    pub i: ISpec,
    pub seed: u64,
    pub method: MethodSel,
    pub timings: bool,
    pub max_points: usize,
}

impl ScanSpec {
    pub fn from_args(a: &ScanArgs) -> Result<Self> {
        Ok(ScanSpec {
            family: a.family.parse()?,
            ms: parse_u32_values(&a.m, "m")?,
            ks: parse_u32_values(&a.k, "k")?,
            ss: parse_values(&a.s)?,
            us: parse_values(&a.u)?,
            i: ISpec::parse(&a.i)?,
            seed: a.seed,
            method: a.method,
            timings: a.timings,
            max_points: a.max_points,
        })
    }

    /// A spec with the defaults of the `scan` subcommand.
    pub fn new(family: Family, ms: Vec<u32>, ks: Vec<u32>) -> Self {
        ScanSpec {
            family,
            ms,
            ks,
            ss: vec![0],
            us: vec![0],
            i: ISpec::Values(vec![1]),
            seed: 0,
            method: MethodSel::All,
            timings: false,
            max_points: 1_000_000,
        }
    }

    /// Grid points in lexicographic order of (m, k, s, u, i); parameters the
    /// family ignores are pinned to their defaults.
    pub fn points(&self) -> Result<Vec<FamilyParams>> {
        let f = self.family;
        let ss = if f.uses_s() { self.ss.clone() } else { vec![0] };
        let us = if f.uses_u_and_i() { self.us.clone() } else { vec![0] };
        let mut ms = self.ms.clone();
        ms.sort_unstable();
        ms.dedup();
        let mut ks = self.ks.clone();
        ks.sort_unstable();
        ks.dedup();
        let mut out = Vec::new();
        for &m in &ms {
            let is = if f.uses_u_and_i() {
                self.i.values(m, self.seed)
            } else {
                vec![1]
            };
            for &k in &ks {
                for &s in &ss {
                    for &u in &us {
                        for &i in &is {
                            let p = FamilyParams::new(f, m, k).with_s(s).with_u(u).with_i(i);
                            p.validate()?;
                            out.push(p);
                            if out.len() > self.max_points {
                                return Err(Error::ParamOutOfRange(format!(
                                    "grid exceeds {} points",
                                    self.max_points
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ScanSummary {
    pub points: u64,
    /// Hypotheses hold and the point permutes.
    pub pass: u64,
    /// Hypotheses hold but the point does not permute.
    pub fail: u64,
    /// Hypotheses fail, or no method produced a verdict.
    pub skip: u64,
    pub permutations: u64,
    pub inconsistent: u64,
}

impl ScanSummary {
    pub fn of(records: &[Record]) -> Self {
        let mut s = ScanSummary::default();
        for r in records {
            s.points += 1;
            let verdict = r.primary_verdict();
            if verdict == Some(true) {
                s.permutations += 1;
            }
            match (r.conditions_hold(), verdict) {
                (true, Some(true)) => s.pass += 1,
                (true, Some(false)) => s.fail += 1,
                _ => s.skip += 1,
            }
            if !r.consistent {
                s.inconsistent += 1;
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome {
    pub records: Vec<Record>,
    pub summary: ScanSummary,
}

/// Verifies every grid point; records come back in grid order whatever the
/// thread count.
pub fn run_scan(spec: &ScanSpec) -> Result<ScanOutcome> {
    let points = spec.points()?;
    let mut ctxs: BTreeMap<u32, Arc<FieldCtx>> = BTreeMap::new();
    for p in &points {
        if !ctxs.contains_key(&p.m) {
            ctxs.insert(p.m, Arc::new(make_ctx(p.m)?));
        }
    }
    let records = points
        .par_iter()
        .with_max_len(1)
        .map(|p| evaluate_target(&Target::Family(*p), &ctxs[&p.m], spec.method, spec.timings))
        .collect::<Result<Vec<_>>>()?;
    let summary = ScanSummary::of(&records);
    Ok(ScanOutcome { records, summary })
}

pub fn record_json(r: &Record) -> String {
    serde_json::to_string(r).expect("record serializes")
}

pub fn render_jsonl(records: &[Record]) -> String {
    records.iter().map(|r| record_json(r) + "\n").collect()
}

#[derive(Serialize)]
struct CsvRow<'a> {
    family: &'a str,
    m: u32,
    k: Option<u32>,
    s: Option<i128>,
    u: Option<i128>,
    i: Option<i128>,
    conditions: String,
    collapsed_terms: u64,
    terms: u64,
    brute: String,
    zieve: String,
    expsum: String,
    degree: Option<u32>,
    elapsed_ms: Option<f64>,
    witness: String,
    consistent: bool,
}

pub fn render_csv(records: &[Record]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        let row = CsvRow {
            family: &r.family,
            m: r.m,
            k: r.k,
            s: r.s,
            u: r.u,
            i: r.i,
            conditions: r
                .conditions
                .iter()
                .map(|c| format!("{}={}", c.name, u8::from(c.holds)))
                .collect::<Vec<_>>()
                .join(";"),
            collapsed_terms: r.collapsed_terms,
            terms: r.terms,
            brute: r.methods.brute.text(),
            zieve: r.methods.zieve.text(),
            expsum: r.methods.expsum.text(),
            degree: r.degree,
            elapsed_ms: r.elapsed_ms,
            witness: r.witness.as_ref().map(Value::to_string).unwrap_or_default(),
            consistent: r.consistent,
        };
        w.serialize(row)
            .map_err(|e| Error::ParamOutOfRange(format!("csv: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::ParamOutOfRange(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Thread count from the flag, then the environment, then the CPU count.
pub fn resolve_threads(flag: Option<usize>) -> std::result::Result<usize, String> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{THREADS_ENV}={v:?} is not a thread count")),
        Err(_) => Ok(0),
    }
}

/// Outcome of a command: exit code and the text for standard output.
struct Done {
    code: i32,
    stdout: String,
    stderr: String,
}

fn usage(e: impl std::fmt::Display) -> Done {
    Done {
        code: 1,
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    }
}

fn cmd_build(args: &PointArgs) -> Done {
    let target = match resolve_target(args) {
        Ok(t) => t,
        Err(e) => return usage(e),
    };
    let ctx = match make_ctx(args.m) {
        Ok(c) => Arc::new(c),
        Err(e) => return usage(e),
    };
    let out = match target {
        Target::Family(p) if !p.family.is_full_field() => {
            match crate::families::build_frac(&p) {
                Ok(f) => json!({
                    "family": p.family.name(),
                    "m": p.m,
                    "k": p.k,
                    "order": f.order(),
                    "num": f.numerator(),
                    "den": f.denominator(),
                }),
                Err(e) => return usage(e),
            }
        }
        _ => {
            let (name, poly) = match target {
                Target::Family(p) => (p.family.name().to_string(), build_pp(&p, &ctx)),
                Target::Witness(w) => (w.name(), crate::families::build_witness(w, &ctx)),
                Target::Known(id) => (id.label(), build_known(id, &ctx)),
            };
            match poly {
                Ok(poly) => json!({
                    "family": name,
                    "m": args.m,
                    "poly": poly.canonical_text(),
                    "terms": poly.len(),
                    "degree": poly.algebraic_degree(),
                }),
                Err(e) => return usage(e),
            }
        }
    };
    Done {
        code: 0,
        stdout: format!("{out}\n"),
        stderr: String::new(),
    }
}

fn cmd_verify(args: &VerifyArgs) -> Done {
    let target = match resolve_target(&args.point) {
        Ok(t) => t,
        Err(e) => return usage(e),
    };
    let ctx = match make_ctx(args.point.m) {
        Ok(c) => Arc::new(c),
        Err(e) => return usage(e),
    };
    if let Target::Known(id) = target {
        if let Err(c) = id.side_condition(args.point.m) {
            return usage(format!("{id} at m = {}: {c}", args.point.m));
        }
    }
    match evaluate_target(&target, &ctx, args.method, args.timings) {
        Ok(r) => Done {
            code: if r.consistent { 0 } else { 2 },
            stdout: record_json(&r) + "\n",
            stderr: String::new(),
        },
        Err(e) => usage(e),
    }
}

fn cmd_scan(args: &ScanArgs) -> Done {
    let spec = match ScanSpec::from_args(args) {
        Ok(s) => s,
        Err(e) => return usage(e),
    };
    let n = match spec.points() {
        Ok(p) => p.len(),
        Err(e) => return usage(e),
    };
    let mut stderr = format!("grid: {n} points\n");
    let outcome = match run_scan(&spec) {
        Ok(o) => o,
        Err(e) => return usage(e),
    };
    let body = match args.format {
        Format::Jsonl => render_jsonl(&outcome.records),
        Format::Csv => match render_csv(&outcome.records) {
            Ok(b) => b,
            Err(e) => return usage(e),
        },
    };
    let summary = json!({ "summary": outcome.summary });
    stderr.push_str(&format!("{summary}\n"));
    let stdout = match &args.output {
        Some(path) => {
            let written = File::create(path).and_then(|f| {
                let mut w = BufWriter::new(f);
                w.write_all(body.as_bytes())?;
                w.flush()
            });
            if let Err(e) = written {
                return usage(format!("{}: {e}", path.display()));
            }
            String::new()
        }
        None => body,
    };
    Done {
        code: if outcome.summary.inconsistent > 0 { 2 } else { 0 },
        stdout,
        stderr,
    }
}

fn cmd_witness(args: &WitnessArgs) -> Done {
    if args.m % 2 != 0 {
        return usage(format!("witness needs even m, got {}", args.m));
    }
    match witness_report(args.m) {
        Ok(rep) => Done {
            code: if rep.claims_match && rep.all_separated { 0 } else { 2 },
            stdout: serde_json::to_string(&rep).expect("report serializes") + "\n",
            stderr: String::new(),
        },
        Err(e) => usage(e),
    }
}

/// Runs a parsed command line, writing to the given streams; returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let threads = match resolve_threads(cli.threads) {
        Ok(n) => n,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };
    let done = pool.install(|| match &cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Witness(a) => cmd_witness(a),
    });
    let wrote = out
        .write_all(done.stdout.as_bytes())
        .and_then(|_| out.flush())
        .and_then(|_| err.write_all(done.stderr.as_bytes()));
    match wrote {
        Ok(()) => done.code,
        Err(_) => 1,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            code
        }
    }
}
