use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use roebench::double::{
    compare_cross, compare_doubles, semigroup_probe, separation, validate_double, witness_nonequivalence, CaseStatus,
    DoubleMetric, Law,
};
use roebench::inverse::MulTable;
use roebench::metric::{coarse_compare, validate_metric, DistortionTable, MetricTower, Point, VerdictTag};
use roebench::roe::{
    contains_operator, ghost_profile, mask_compose, mask_inclusion, metric_mask, pair_sum_operator, split_cover,
};
use roebench::schema::{BaseRef, CrossSpec, DoubleSpec, MaskSpec, OperatorSpec, PbSpec, SpaceSpec, TableSpec};
use roebench::Dist;
use serde::{Deserialize, Serialize};

use crate::load::{Config, Kind, Loader};
use crate::report::{render, write_text, Report, Status};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    Equivalent,
    NotEquivalent,
}

impl From<Expect> for VerdictTag {
    fn from(e: Expect) -> VerdictTag {
        match e {
            Expect::Equivalent => VerdictTag::Equivalent,
            Expect::NotEquivalent => VerdictTag::NotEquivalent,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum LawArg {
    Associativity,
    Regularity,
    IdempotentCommutation,
}

impl From<LawArg> for Law {
    fn from(l: LawArg) -> Law {
        match l {
            LawArg::Associativity => Law::Associativity,
            LawArg::Regularity => Law::Regularity,
            LawArg::IdempotentCommutation => Law::IdempotentCommutation,
        }
    }
}

/// Operations runnable from the command line or from an experiment file.
#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum Operation {
    /// Check a space, double, partial bijection, table, mask or operator file.
    Validate(ValidateArgs),
    /// Coarse comparison of two spaces or two doubles.
    Compare(CompareArgs),
    /// Concatenate two doubles over the same base.
    Concat(ConcatArgs),
    /// Test that a double is idempotent up to coarse equivalence.
    Idempotent(IdempotentArgs),
    /// Extract pairs bounded for one double and growing for the other.
    Witness(WitnessArgs),
    /// Support masks of doubles, and the composition law between them.
    Mask(MaskArgs),
    /// Ghost profile and norm data of an operator.
    Ghost(GhostArgs),
    /// Inverse-semigroup checks on partial bijections, tables or doubles.
    Semigroup(SemigroupArgs),
}

impl Operation {
    /// Reads `{"op": name, ...arguments}`, reporting failures with a JSON pointer.
    pub fn from_value(mut v: serde_json::Value) -> roebench::Result<Operation> {
        use roebench::schema::from_value;
        let bad = |pointer: &str, message: String| roebench::Error::Schema { pointer: pointer.into(), message };
        let obj = v.as_object_mut().ok_or_else(|| bad("", "expected an object with an `op`".into()))?;
        let op = match obj.remove("op") {
            Some(serde_json::Value::String(op)) => op,
            _ => return Err(bad("/op", "expected the operation name as a string".into())),
        };
        Ok(match op.as_str() {
            "validate" => Operation::Validate(from_value(v)?),
            "compare" => Operation::Compare(from_value(v)?),
            "concat" => Operation::Concat(from_value(v)?),
            "idempotent" => Operation::Idempotent(from_value(v)?),
            "witness" => Operation::Witness(from_value(v)?),
            "mask" => Operation::Mask(from_value(v)?),
            "ghost" => Operation::Ghost(from_value(v)?),
            "semigroup" => Operation::Semigroup(from_value(v)?),
            other => return Err(bad("/op", format!("unknown operation {other:?}"))),
        })
    }
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidateArgs {
    pub input: PathBuf,
    /// Document kind; guessed from the top-level keys when omitted.
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// For doubles, compare only the cross values.
    #[arg(long)]
    #[serde(default)]
    pub cross: bool,
    /// Fail unless the verdict is this one.
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expect>,
    /// Write the distortion tables as CSV.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcatArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// Also write the result as a double file with an explicit cross matrix.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emit: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdempotentArgs {
    pub input: PathBuf,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct WitnessArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// Bound on the first double's cross values.
    #[arg(long = "L1", default_value = "1")]
    #[serde(rename = "L1")]
    pub l1: Dist,
    /// Value the second double's cross values must exceed.
    #[arg(long = "L2", default_value = "20")]
    #[serde(rename = "L2")]
    pub l2: Dist,
    /// Fewest pairs for the check to pass.
    #[arg(long = "min-pairs", default_value_t = 1)]
    #[serde(default = "one_pair")]
    pub min_pairs: usize,
}

fn one_pair() -> usize {
    1
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskArgs {
    pub a: PathBuf,
    /// Second double; checks mask(a, L1)∘mask(b, L2) ⊆ mask(a∘b, L1+L2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<PathBuf>,
    /// Bound for a single mask.
    #[arg(long = "L")]
    #[serde(default, rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<Dist>,
    #[arg(long = "L1")]
    #[serde(default, rename = "L1", skip_serializing_if = "Option::is_none")]
    pub l1: Option<Dist>,
    #[arg(long = "L2")]
    #[serde(default, rename = "L2", skip_serializing_if = "Option::is_none")]
    pub l2: Option<Dist>,
    /// Level to read cross values at; the top level by default.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    /// Write the (single or composed) mask as a PBM grid.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pbm: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GhostArgs {
    pub operator: PathBuf,
    /// Space measuring distances from the basepoint.
    #[arg(long)]
    pub space: PathBuf,
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub basepoint: i64,
    /// Radii to sample; 0, 1, … up to the farthest point by default.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<Dist>>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupArgs {
    /// Check the symmetric inverse monoid on n points.
    #[arg(long, conflicts_with_all = ["table", "doubles"])]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Check a multiplication table file.
    #[arg(long, conflicts_with = "doubles")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
    /// Probe a law over a catalog of double files.
    #[arg(long, num_args = 1.., requires = "law")]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub doubles: Vec<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<LawArg>,
}

#[derive(Serialize)]
struct Embedded<'a, T: Serialize> {
    #[serde(flatten)]
    common: &'a Config,
    params: &'a T,
}

fn report(command: &str, config: &Config, params: &impl Serialize) -> Report {
    Report::new(command, Embedded { common: config, params })
}

pub fn run(op: &Operation, config: &Config, loader: &Loader) -> Result<Report> {
    match op {
        Operation::Validate(a) => validate(a, config, loader),
        Operation::Compare(a) => compare(a, config, loader),
        Operation::Concat(a) => concat(a, config, loader),
        Operation::Idempotent(a) => idempotent(a, config, loader),
        Operation::Witness(a) => witness(a, config, loader),
        Operation::Mask(a) => mask(a, config, loader),
        Operation::Ghost(a) => ghost(a, config, loader),
        Operation::Semigroup(a) => semigroup(a, config, loader),
    }
}

pub fn double_spec(d: &DoubleMetric) -> Result<DoubleSpec> {
    let base = d.base();
    let table = d.cross_table(base.top())?;
    Ok(DoubleSpec { base: BaseRef::Inline(SpaceSpec::from_tower(base)?), cross: CrossSpec::from_table(&table) })
}

fn validate(args: &ValidateArgs, config: &Config, loader: &Loader) -> Result<Report> {
    let kind = loader.kind(&args.input, args.kind)?;
    let mut r = report("validate", config, args);
    r.record("kind", kind)?;
    match kind {
        Kind::Space => {
            let t = loader.space(&args.input)?;
            let v = validate_metric(&t)?;
            r.assert("metric-axioms", v.ok, format!("{} violations", v.total));
            r.record("level_sizes", t.level_sizes())?;
            r.record("validation", v)?;
        }
        Kind::Double => {
            let d = loader.double(&args.input)?;
            let v = validate_double(&d)?;
            r.assert("double-axioms", v.ok, format!("{} violations", v.total));
            r.record("separation", separation(&d, d.base().top())?)?;
            r.record("validation", v)?;
        }
        Kind::Pb => {
            let p = loader.pb(&args.input)?;
            r.assert("partial-bijection", true, format!("rank {}", p.rank()));
            r.record("partial_bijection", PbSpec::from_pb(&p))?;
            r.record("domain", p.domain())?;
            r.record("image", p.image())?;
        }
        Kind::Table => {
            let t = loader.table(&args.input)?;
            table_checks(&mut r, &t)?;
        }
        Kind::Mask => {
            let m = loader.mask(&args.input)?;
            r.assert("mask", true, format!("{} of {} pairs", m.count(), m.len() * m.len()));
            r.record("mask", MaskSpec::from_mask(&m))?;
        }
        Kind::Operator => {
            let t = loader.operator(&args.input)?;
            r.assert("operator", true, format!("{} nonzero entries", t.nnz()));
            let (rows, cols) = t.row_column_sums()?;
            r.record("row_sum", rows)?;
            r.record("column_sum", cols)?;
            r.record("norm_bound", t.norm_bound()?)?;
            r.record("exact_norm_sq", t.exact_norm_sq()?)?;
        }
    }
    Ok(r)
}

fn table_checks(r: &mut Report, t: &MulTable) -> Result<bool> {
    let assoc = t.check_associative();
    let assoc_ok = r.assert("associative", assoc.is_ok(), assoc.err().map(|e| e.to_string()).unwrap_or_default());
    r.record("size", t.len())?;
    r.record("idempotents", t.idempotents())?;
    if !assoc_ok {
        return Ok(false);
    }
    let inv = t.check_inverse()?;
    r.assert(
        "regular",
        inv.regular,
        inv.irregular.map(|s| format!("element {s} has no pseudoinverse")).unwrap_or_default(),
    );
    r.assert(
        "idempotents-commute",
        inv.non_commuting.is_none(),
        inv.non_commuting.map(|(e, f)| format!("{e} and {f}")).unwrap_or_default(),
    );
    let ok = inv.inverse;
    r.record("inverse_report", inv)?;
    Ok(ok)
}

fn distortion_csv(tables: &[DistortionTable]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["level", "direction", "r", "phi"])?;
    for t in tables {
        for (dir, f) in [("forward", &t.forward), ("backward", &t.backward)] {
            for (r, phi) in &f.samples {
                w.write_record([t.level.to_string(), dir.to_string(), r.to_string(), phi.to_string()])?;
            }
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn compare(args: &CompareArgs, config: &Config, loader: &Loader) -> Result<Report> {
    let cfg = config.coarse()?;
    let (ka, kb) = (loader.kind(&args.a, None)?, loader.kind(&args.b, None)?);
    let mut r = report("compare", config, args);
    let expect = args.expect.map(VerdictTag::from);
    let (tag, tables) = match (ka, kb) {
        (Kind::Space, Kind::Space) => {
            if args.cross {
                bail!("--cross applies to doubles only");
            }
            let (a, b) = (loader.space(&args.a)?, loader.space(&args.b)?);
            let v = coarse_compare(&a, &b, &cfg)?;
            r.record("verdict", &v)?;
            (v.tag, v.diagnostics.tables)
        }
        (Kind::Double, Kind::Double) => {
            let (a, b) = (loader.double(&args.a)?, loader.double(&args.b)?);
            if args.cross {
                let v = compare_cross(&a, &b, &cfg)?;
                r.record("verdict", &v)?;
                (v.tag, v.diagnostics.tables)
            } else {
                let v = compare_doubles(&a, &b, &cfg)?;
                r.record("verdict", &v)?;
                (v.tag, v.diagnostics.tables)
            }
        }
        _ => bail!("compare needs two spaces or two doubles"),
    };
    r.check("verdict", Status::from_verdict(tag, expect), format!("{tag:?}"));
    if let Some(p) = &args.csv {
        write_text(&loader.resolve(p), &distortion_csv(&tables)?)?;
    }
    Ok(r)
}

fn concat(args: &ConcatArgs, config: &Config, loader: &Loader) -> Result<Report> {
    let ds = loader.doubles(&[args.a.clone(), args.b.clone()])?;
    let dd = ds[0].concat(&ds[1])?;
    let mut r = report("concat", config, args);
    let v = validate_double(&dd)?;
    r.assert("double-axioms", v.ok, format!("{} violations", v.total));
    let top = dd.base().top();
    let table = dd.cross_table(top)?;
    r.record("boundary", table.boundary_pairs())?;
    r.record("separation", separation(&dd, top)?)?;
    let spec = double_spec(&dd)?;
    r.record("double", &spec)?;
    r.record("validation", v)?;
    if let Some(p) = &args.emit {
        write_text(&loader.resolve(p), &render(&serde_json::to_value(&spec)?, true))?;
    }
    Ok(r)
}

fn idempotent(args: &IdempotentArgs, config: &Config, loader: &Loader) -> Result<Report> {
    let cfg = config.coarse()?;
    let d = loader.double(&args.input)?;
    let mut r = report("idempotent", config, args);
    let v = validate_double(&d)?;
    r.assert("double-axioms", v.ok, format!("{} violations", v.total));
    let verdict = compare_doubles(&d.concat(&d)?, &d, &cfg)?;
    r.check("d∘d ~ d", Status::from_verdict(verdict.tag, Some(VerdictTag::Equivalent)), format!("{:?}", verdict.tag));
    r.record("verdict", verdict)?;
    Ok(r)
}

fn witness(args: &WitnessArgs, config: &Config, loader: &Loader) -> Result<Report> {
    let ds = loader.doubles(&[args.a.clone(), args.b.clone()])?;
    let (d1, d2) = (&ds[0], &ds[1]);
    let mut r = report("witness", config, args);
    let found = witness_nonequivalence(d1, d2, args.l1, args.l2)?.unwrap_or_default();
    let enough = found.len() >= args.min_pairs;
    r.check(
        "witness-pairs",
        if enough { Status::Pass } else { Status::Inconclusive },
        format!("{} pairs, {} required", found.len(), args.min_pairs),
    );
    if !found.is_empty() {
        let base = d1.base();
        let top = base.top();
        let pts: Arc<[Point]> = base.points().into();
        let pairs: Vec<(Point, Point)> = found.iter().map(|p| (p.x, p.y)).collect();
        let m = pair_sum_operator(pts.clone(), pts, &pairs)?;
        let inside = contains_operator(&metric_mask(d1, args.l1, top)?, &m);
        r.assert("pair-sum in mask(a, L1)", inside.holds, counterexample(inside.counterexample));
        let outside = contains_operator(&metric_mask(d2, args.l2, top)?, &m);
        r.assert("pair-sum outside mask(b, L2)", !outside.holds, "");
        r.record("operator", OperatorSpec::from_operator(&m))?;
    }
    r.record("pairs", found)?;
    Ok(r)
}

fn counterexample(c: Option<(Point, Point)>) -> String {
    c.map(|(x, y)| format!("({x}, {y})")).unwrap_or_default()
}

fn mask(args: &MaskArgs, config: &Config, loader: &Loader) -> Result<Report> {
    let mut r = report("mask", config, args);
    match &args.b {
        None => {
            let l = args.l.context("a single mask needs --L")?;
            let d = loader.double(&args.a)?;
            let level = args.level.unwrap_or(d.base().top());
            let m = metric_mask(&d, l, level)?;
            r.record("count", m.count())?;
            r.record("full", m.count() == m.len() * m.len())?;
            r.record("mask", MaskSpec::from_mask(&m))?;
            if let Some(p) = &args.pbm {
                write_text(&loader.resolve(p), &m.to_pbm())?;
            }
        }
        Some(b) => {
            let (l1, l2) = match (args.l1, args.l2) {
                (Some(l1), Some(l2)) => (l1, l2),
                _ => bail!("composing masks needs --L1 and --L2"),
            };
            let ds = loader.doubles(&[args.a.clone(), b.clone()])?;
            let (d1, d2) = (&ds[0], &ds[1]);
            let level = args.level.unwrap_or(d1.base().top());
            let composed = mask_compose(&metric_mask(d1, l1, level)?, &metric_mask(d2, l2, level)?)?;
            let dd = d1.concat(d2)?;
            let target = metric_mask(&dd, l1 + l2, level)?;
            let inc = mask_inclusion(&composed, &target)?;
            r.assert("mask(a,L1)∘mask(b,L2) ⊆ mask(a∘b,L1+L2)", inc.holds, counterexample(inc.counterexample));
            if d1.base().is_complete() && level == d1.base().top() {
                let cover = split_cover(d1, d2, l1 + l2, level)?;
                let back = mask_inclusion(&target, &cover)?;
                r.assert("mask(a∘b,L) ⊆ ∪ mask(a,L1)∘mask(b,L-L1)", back.holds, counterexample(back.counterexample));
            }
            r.record("composed", MaskSpec::from_mask(&composed))?;
            r.record("concat", MaskSpec::from_mask(&target))?;
            if let Some(p) = &args.pbm {
                write_text(&loader.resolve(p), &composed.to_pbm())?;
            }
        }
    }
    Ok(r)
}

/// 0, 1, … up to the farthest point of `tower` from `basepoint`.
pub fn default_radii(tower: &MetricTower, basepoint: Point) -> Result<Vec<Dist>> {
    let mut far = Dist::ZERO;
    for &p in tower.points() {
        far = far.max(tower.dist(basepoint, p)?);
    }
    Ok((0..=far.ceil()).map(Dist::int).collect())
}

fn ghost(args: &GhostArgs, config: &Config, loader: &Loader) -> Result<Report> {
    let t = loader.operator(&args.operator)?;
    let tower = loader.space(&args.space)?;
    let x0 = Point(args.basepoint);
    let radii = match &args.radii {
        Some(r) => r.clone(),
        None => default_radii(&tower, x0)?,
    };
    let p = ghost_profile(&t, &tower, x0, &radii)?;
    let mut r = report("ghost", config, args);
    r.assert("profile-nonincreasing", p.is_nonincreasing(), "");
    let (rows, cols) = t.row_column_sums()?;
    r.record("reaches_zero", p.reaches_zero())?;
    r.record("profile", p)?;
    r.record("row_sum", rows)?;
    r.record("column_sum", cols)?;
    r.record("norm_bound", t.norm_bound()?)?;
    r.record("exact_norm_sq", t.exact_norm_sq()?)?;
    Ok(r)
}

fn semigroup(args: &SemigroupArgs, config: &Config, loader: &Loader) -> Result<Report> {
    let mut r = report("semigroup", config, args);
    match (args.n, &args.table, args.doubles.is_empty()) {
        (Some(n), None, true) => {
            let (elems, table) = MulTable::partial_bijections(n)?;
            if table_checks(&mut r, &table)? {
                let idem = table.idempotents().len();
                r.assert("idempotents = 2^n", idem == 1 << n, format!("{idem}"));
            }
            r.record("n", n)?;
            r.record("elements", elems.iter().map(PbSpec::from_pb).collect::<Vec<_>>())?;
        }
        (None, Some(p), true) => {
            let table = loader.table(p)?;
            table_checks(&mut r, &table)?;
            r.record("table", TableSpec::from_table(&table))?;
        }
        (None, None, false) => {
            let law = args.law.context("--doubles needs --law")?;
            let catalog = loader.doubles(&args.doubles)?;
            let probe = semigroup_probe(&catalog, law.into(), &config.coarse()?)?;
            for case in &probe.cases {
                let status = match case.status {
                    CaseStatus::Pass => Status::Pass,
                    CaseStatus::Fail => Status::Fail,
                    CaseStatus::Inconclusive => Status::Inconclusive,
                };
                r.check(&case.description, status, "");
            }
            r.record("probe", probe)?;
        }
        _ => bail!("semigroup needs exactly one of --n, --table or --doubles"),
    }
    Ok(r)
}
