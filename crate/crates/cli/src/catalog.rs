//! Built-in experiments and experiment files.

use std::collections::BTreeSet;
use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use roebench::double::{
    compare_cross, compare_doubles, semigroup_probe, validate_double, witness_nonequivalence, Bridge, DoubleMetric,
    Law, NestedFamily, Region,
};
use roebench::inverse::{ideal_product, pb_enumerate, pb_natural_le, MulTable};
use roebench::metric::{coarse_compare, Generator, GeneratorKind, MetricTower, Point, VerdictTag};
use roebench::roe::{contains_operator, ghost_profile, metric_mask, pair_sum_operator, real, BandOperator};
use roebench::schema::{self, OperatorSpec};
use roebench::Dist;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::commands::{self, Operation};
use crate::load::{Config, Loader};
use crate::report::{Report, Status};

/// Directory searched for experiment files before the built-ins.
pub const CATALOG_DIR_VAR: &str = "ROEBENCH_CATALOG_DIR";

pub const BUILTIN: &[(&str, &str)] = &[
    ("discrete-unit", "doubles over a uniformly discrete space are all equivalent and their masks fill"),
    ("squares-cubes", "the squares metric against its pullback along the cube map"),
    ("injectivity-witness", "unit against zero over the integers: bounded pairs and mask separation"),
    ("non-surjectivity", "a bounded diagonal run gives an operator that is not a ghost"),
    ("mc-probe", "the same double over two coarsely equivalent metrics"),
    ("ghost-blocks", "block averages have small entries and norm one"),
    ("symmetric-inverse-monoid", "partial bijections on up to four points, and the ideal product"),
    ("z-laws", "unit law, associativity and regularity on integer doubles"),
];

/// A catalog entry stored as a file: one operation with its config.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// `{"op": ..., arguments}`; see [`Operation::from_value`].
    pub operation: serde_json::Value,
    #[serde(default)]
    pub config: Config,
    /// Report path, relative to the experiment file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn catalog_dir() -> Option<PathBuf> {
    env::var_os(CATALOG_DIR_VAR).map(PathBuf::from)
}

fn file_entries(dir: &Path) -> Result<Vec<String>> {
    let mut names = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "json") {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                names.push(stem.to_string());
            }
        }
    }
    names.sort();
    Ok(names)
}

/// `(name, source)` for every runnable entry, files first.
pub fn list() -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    if let Some(dir) = catalog_dir() {
        for name in file_entries(&dir)? {
            out.push((name, dir.display().to_string()));
        }
    }
    for (name, _) in BUILTIN {
        if !out.iter().any(|(n, _)| n == name) {
            out.push((name.to_string(), "built-in".into()));
        }
    }
    Ok(out)
}

/// Runs a catalog entry. Returns the report and, for experiment files, the
/// report path they ask for.
pub fn run(name: &str, config: &Config) -> Result<(Report, Option<PathBuf>)> {
    if let Some(dir) = catalog_dir() {
        let path = dir.join(format!("{name}.json"));
        if path.is_file() {
            return run_file(&path, config);
        }
    }
    let report = match name {
        "discrete-unit" => discrete_unit(config),
        "squares-cubes" => squares_cubes(config),
        "injectivity-witness" => injectivity_witness(config),
        "non-surjectivity" => non_surjectivity(config),
        "mc-probe" => mc_probe(config),
        "ghost-blocks" => ghost_blocks(config),
        "symmetric-inverse-monoid" => symmetric_inverse_monoid(config),
        "z-laws" => z_laws(config),
        _ => bail!("unknown catalog entry {name:?}; `catalog --list` shows the available ones"),
    }?;
    Ok((report, None))
}

fn run_file(path: &Path, cli: &Config) -> Result<(Report, Option<PathBuf>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut spec: ExperimentSpec = schema::parse(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    if cli.levels.is_some() {
        spec.config.levels = cli.levels.clone();
    }
    spec.config.coarse().with_context(|| format!("{}: config", path.display()))?;
    let op = Operation::from_value(spec.operation.clone()).map_err(|e| match e {
        roebench::Error::Schema { pointer, message } => {
            anyhow!(
                "{}: {}",
                path.display(),
                roebench::Error::Schema { pointer: format!("/operation{pointer}"), message }
            )
        }
        other => anyhow!("{}: {other}", path.display()),
    })?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let loader = Loader::new(dir, &spec.config);
    let mut report = commands::run(&op, &spec.config, &loader)?;
    report.record("experiment", &spec.name)?;
    Ok((report, spec.out.map(|o| loader.resolve(&o))))
}

fn start(name: &str, config: &Config, params: serde_json::Value) -> Report {
    let mut embedded = serde_json::to_value(config).unwrap_or_default();
    if let Some(m) = embedded.as_object_mut() {
        m.insert("name".into(), json!(name));
        m.insert("params".into(), params);
    }
    Report::new("catalog", embedded)
}

fn integers(levels: &[u32]) -> Result<Arc<MetricTower>> {
    Ok(Arc::new(MetricTower::integers(levels)?))
}

fn generated(kind: GeneratorKind, levels: Vec<u32>) -> Result<Arc<MetricTower>> {
    Ok(Arc::new(MetricTower::from_generator(Generator::new(kind, levels))?))
}

fn tag_name(tag: VerdictTag) -> &'static str {
    match tag {
        VerdictTag::Equivalent => "equivalent",
        VerdictTag::NotEquivalent => "not-equivalent",
        VerdictTag::Inconclusive => "inconclusive",
    }
}

fn discrete_unit(config: &Config) -> Result<Report> {
    let levels = config.levels_or(&[4, 8, 12, 16, 20]);
    let full_at = Dist::int(3);
    let mut r = start("discrete-unit", config, json!({ "levels": levels, "full_mask_bound": full_at }));
    let base = generated(GeneratorKind::Discrete, levels)?;
    let cfg = config.coarse()?;
    let catalog = vec![
        ("unit", DoubleMetric::unit(base.clone())),
        ("zero(0)", DoubleMetric::zero(base.clone(), Point(0))?),
        ("balls(0)", DoubleMetric::from_family(base.clone(), NestedFamily::balls(Point(0)))?),
        (
            "bridge(0)",
            DoubleMetric::from_bridges(
                base.clone(),
                &[Bridge { source: Point(0), target: Point(0), length: Dist::new(1, 2)? }],
            )?,
        ),
    ];
    let top = base.top();
    let mut masks = Vec::new();
    for (name, d) in &catalog {
        let v = validate_double(d)?;
        r.assert(&format!("{name} valid"), v.ok, format!("{} violations", v.total));
        let counts: Vec<usize> = [1, 2, 3]
            .iter()
            .map(|&l| metric_mask(d, Dist::int(l), top).map(|m| m.count()))
            .collect::<Result<_, _>>()?;
        let n = base.level_size(top)?;
        r.assert(
            &format!("{name} mask at L = {full_at} is full"),
            counts[2] == n * n,
            format!("{} of {}", counts[2], n * n),
        );
        masks.push(json!({ "double": name, "counts_at_L_1_2_3": counts, "points": n }));
    }
    let mut verdicts = Vec::new();
    for (i, (ni, di)) in catalog.iter().enumerate() {
        for (nj, dj) in catalog.iter().skip(i + 1) {
            let v = compare_doubles(di, dj, &cfg)?;
            r.check(
                &format!("{ni} ~ {nj}"),
                Status::from_verdict(v.tag, Some(VerdictTag::Equivalent)),
                tag_name(v.tag),
            );
            verdicts.push(json!({ "pair": [ni, nj], "tag": v.tag, "control_ceiling": v.control_ceiling() }));
        }
    }
    r.record("masks", masks)?;
    r.record("verdicts", verdicts)?;
    Ok(r)
}

fn squares_cubes(config: &Config) -> Result<Report> {
    let levels = config.levels_or(&[4, 8, 16, 32, 64]);
    let mut r = start("squares-cubes", config, json!({ "levels": levels }));
    let d = generated(GeneratorKind::Squares { signed: true }, levels.clone())?;
    let b = generated(GeneratorKind::CubesPullback, levels)?;
    let samples: Vec<_> = [1i64, -1, 2].iter().map(|&n| json!({ "n": n, "f": Generator::cube_image(n) })).collect();
    for (n, f) in [(1i64, 8i64), (-1, 1), (2, 64)] {
        let got = Generator::cube_image(n);
        r.assert(&format!("f(x_{n}) = {f}"), got == f, format!("{got}"));
    }
    let cfg = config.coarse()?;
    let v = coarse_compare(&d, &b, &cfg)?;
    r.check("d_X ~ b_X", Status::from_verdict(v.tag, Some(VerdictTag::Equivalent)), tag_name(v.tag));
    let back = coarse_compare(&b, &d, &cfg)?;
    r.check("b_X ~ d_X", Status::from_verdict(back.tag, Some(VerdictTag::Equivalent)), tag_name(back.tag));
    r.record("f", samples)?;
    r.record("verdict", v)?;
    r.record("reverse_tag", back.tag)?;
    Ok(r)
}

fn injectivity_witness(config: &Config) -> Result<Report> {
    let levels = config.levels_or(&[8, 16, 32, 64, 128]);
    let (c, t, min_pairs) = (Dist::ONE, Dist::int(20), 10);
    let mut r =
        start("injectivity-witness", config, json!({ "levels": levels, "L1": c, "L2": t, "min_pairs": min_pairs }));
    let base = integers(&levels)?;
    let unit = DoubleMetric::unit(base.clone());
    let zero = DoubleMetric::zero(base.clone(), Point(0))?;
    let found = witness_nonequivalence(&unit, &zero, c, t)?.unwrap_or_default();
    r.assert("at least 10 pairs", found.len() >= min_pairs, format!("{} pairs", found.len()));
    r.assert("c1 = 1 on every pair", found.iter().all(|p| p.c1 == c), "");
    r.assert(
        "c2 strictly increasing past 20",
        found.iter().all(|p| p.c2 > t) && found.windows(2).all(|w| w[0].c2 < w[1].c2),
        "",
    );
    if !found.is_empty() {
        let top = base.top();
        let pts: Arc<[Point]> = base.points().into();
        let pairs: Vec<_> = found.iter().map(|p| (p.x, p.y)).collect();
        let m = pair_sum_operator(pts.clone(), pts, &pairs)?;
        r.assert("pair sum in mask(unit, 1)", contains_operator(&metric_mask(&unit, c, top)?, &m).holds, "");
        r.assert("pair sum outside mask(zero, 20)", !contains_operator(&metric_mask(&zero, t, top)?, &m).holds, "");
        r.record("operator", OperatorSpec::from_operator(&m))?;
    }
    r.record("pairs", found)?;
    Ok(r)
}

fn non_surjectivity(config: &Config) -> Result<Report> {
    let levels = config.levels_or(&[8, 16, 32, 64, 128]);
    let (c, t) = (Dist::ONE, Dist::int(20));
    let mut r = start("non-surjectivity", config, json!({ "levels": levels, "bound": c, "zero_bound": t }));
    let base = integers(&levels)?;
    let zero = DoubleMetric::zero(base.clone(), Point(0))?;
    let half = NestedFamily::neighborhoods(Region::AtLeast(0), Dist::ZERO, Dist::ONE);
    let unbounded =
        [("unit", DoubleMetric::unit(base.clone())), ("half-line", DoubleMetric::from_family(base.clone(), half)?)];
    let top = base.top();
    let pts: Arc<[Point]> = base.points().into();
    let x0 = Point(0);
    let mut runs = Vec::new();
    for (name, d) in &unbounded {
        let found = witness_nonequivalence(d, &zero, c, t)?.unwrap_or_default();
        let diagonal = found.iter().filter(|p| p.x == p.y).count();
        r.assert(&format!("{name}: bounded diagonal run"), diagonal >= 2, format!("{diagonal} diagonal pairs"));
        let pairs: Vec<_> = found.iter().filter(|p| p.x == p.y).map(|p| (p.x, p.y)).collect();
        if pairs.is_empty() {
            continue;
        }
        let m = pair_sum_operator(pts.clone(), pts.clone(), &pairs)?;
        r.assert(&format!("{name}: m in mask({name}, {c})"), contains_operator(&metric_mask(d, c, top)?, &m).holds, "");
        r.assert(
            &format!("{name}: m outside mask(zero, {t})"),
            !contains_operator(&metric_mask(&zero, t, top)?, &m).holds,
            "",
        );
        // Entries of m stay at 1 arbitrarily far out, so m is not a ghost.
        let far = pairs
            .iter()
            .map(|&(x, _)| base.dist(x0, x))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .max()
            .unwrap_or_default();
        let radii: Vec<Dist> = (0..far.ceil()).map(Dist::int).collect();
        let profile = ghost_profile(&m, &base, x0, &radii)?;
        r.assert(
            &format!("{name}: m is not a ghost"),
            profile.sup.iter().all(|v| *v == Some(Dist::ONE)),
            format!("sup of entries is 1 out to radius {far}"),
        );
        runs.push(json!({ "double": name, "points": pairs.iter().map(|p| p.0).collect::<Vec<_>>(), "profile_radii": radii.len() }));
    }
    r.record("runs", runs)?;
    Ok(r)
}

fn mc_probe(config: &Config) -> Result<Report> {
    let levels = config.levels_or(&[4, 8, 16, 32, 64]);
    let mut r = start("mc-probe", config, json!({ "levels": levels }));
    let d = generated(GeneratorKind::Squares { signed: true }, levels.clone())?;
    let b = generated(GeneratorKind::CubesPullback, levels)?;
    let cfg = config.coarse()?;
    let x0 = Point(0);
    let build = |base: &Arc<MetricTower>| -> Result<Vec<(&'static str, DoubleMetric)>> {
        Ok(vec![
            ("unit", DoubleMetric::unit(base.clone())),
            ("zero(0)", DoubleMetric::zero(base.clone(), x0)?),
            ("balls(0)", DoubleMetric::from_family(base.clone(), NestedFamily::balls(x0))?),
        ])
    };
    let mut verdicts = Vec::new();
    for ((name, over_d), (_, over_b)) in build(&d)?.into_iter().zip(build(&b)?) {
        let v = compare_cross(&over_d, &over_b, &cfg)?;
        r.check(
            &format!("{name}: image over d_X ~ image over b_X"),
            Status::from_verdict(v.tag, Some(VerdictTag::Equivalent)),
            tag_name(v.tag),
        );
        verdicts.push(json!({ "double": name, "tag": v.tag, "control_ceiling": v.control_ceiling(), "notes": v.diagnostics.notes }));
    }
    r.record("verdicts", verdicts)?;
    Ok(r)
}

fn ghost_blocks(config: &Config) -> Result<Report> {
    let radius = config.levels.as_ref().and_then(|l| l.last().copied()).unwrap_or(64);
    let kmax = (radius as i64 / 2).max(2);
    let mut r = start("ghost-blocks", config, json!({ "radius": radius, "k": [2, kmax] }));
    let tower = MetricTower::integers(&[radius])?;
    let pts: Arc<[Point]> = tower.points().into();
    let radii: Vec<Dist> = (0..radius as i64).map(Dist::int).collect();
    let x0 = Point(0);
    let id = ghost_profile(&BandOperator::identity(pts.clone()), &tower, x0, &radii)?;
    r.assert("identity profile stays 1", id.sup.iter().all(|v| *v == Some(Dist::ONE)), "");
    let mut rows = Vec::new();
    for k in 2..=kmax {
        let inv_k = Dist::new(1, k)?;
        let value = real(inv_k);
        let block = (k..2 * k).flat_map(|x| (k..2 * k).map(move |y| ((Point(x), Point(y)), value)));
        let t = BandOperator::from_entries(pts.clone(), pts.clone(), block)?;
        let p = ghost_profile(&t, &tower, x0, &radii)?;
        let max = p.sup.iter().flatten().max().copied();
        let (row, col) = t.row_column_sums()?;
        let norm_sq = t.exact_norm_sq()?;
        let ok = max == Some(inv_k) && row == Dist::ONE && col == Dist::ONE && norm_sq == Some(Dist::ONE);
        r.assert(
            &format!("k = {k}"),
            ok && p.is_nonincreasing(),
            format!("max entry {}, row sum {row}", max.unwrap_or_default()),
        );
        rows.push(json!({ "k": k, "max_entry": max, "row_sum": row, "column_sum": col, "norm_sq": norm_sq, "reaches_zero": p.reaches_zero() }));
    }
    r.record("blocks", rows)?;
    Ok(r)
}

fn symmetric_inverse_monoid(config: &Config) -> Result<Report> {
    let expected = [(1usize, 2usize), (2, 7), (3, 34), (4, 209)];
    let mut r = start("symmetric-inverse-monoid", config, json!({ "n": [1, 4], "ideal_n": 5 }));
    let mut sizes = Vec::new();
    for (n, count) in expected {
        let (elems, table) = MulTable::partial_bijections(n)?;
        r.assert(&format!("|I_{n}| = {count}"), elems.len() == count, format!("{}", elems.len()));
        let inv = table.check_inverse()?;
        r.assert(&format!("I_{n} is an inverse monoid"), inv.inverse, "");
        let idem = table.idempotents().len();
        r.assert(&format!("I_{n} has 2^{n} idempotents"), idem == 1 << n, format!("{idem}"));
        sizes.push(json!({ "n": n, "elements": elems.len(), "idempotents": idem }));
    }
    let all = pb_enumerate(3)?;
    let mut agree = true;
    for s in &all {
        for t in &all {
            agree &= pb_natural_le(s, t)? == s.restricts(t);
        }
    }
    r.assert("natural order is restriction on I_3", agree, "");
    let n = 5;
    let subsets: Vec<BTreeSet<usize>> =
        (0u32..1 << n).map(|bits| (1..=n).filter(|i| bits & (1 << (i - 1)) != 0).collect()).collect();
    let mut ideal_ok = true;
    for p in &subsets {
        for q in &subsets {
            let prod = ideal_product(n, p, q)?;
            ideal_ok &= prod.verified && prod.product == p.intersection(q).copied().collect();
        }
    }
    r.assert("ideal product is intersection on {1..5}", ideal_ok, format!("{} pairs", subsets.len() * subsets.len()));
    r.record("sizes", sizes)?;
    Ok(r)
}

fn z_laws(config: &Config) -> Result<Report> {
    let levels = config.levels_or(&[4, 8, 12, 16, 20, 24]);
    let mut r = start("z-laws", config, json!({ "levels": levels }));
    let base = integers(&levels)?;
    let shift: Vec<Bridge> = base
        .points()
        .iter()
        .filter(|p| base.contains(Point(p.0 + 3)))
        .map(|&p| Bridge { source: p, target: Point(p.0 + 3), length: Dist::new(3, 2).unwrap() })
        .collect();
    let catalog = vec![
        DoubleMetric::unit(base.clone()),
        DoubleMetric::zero(base.clone(), Point(0))?,
        DoubleMetric::from_family(base.clone(), NestedFamily::balls(Point(0)))?,
        DoubleMetric::from_family(
            base.clone(),
            NestedFamily::neighborhoods(Region::AtLeast(0), Dist::ZERO, Dist::ONE),
        )?,
        DoubleMetric::from_bridges(base.clone(), &shift)?,
    ];
    let names = ["unit", "zero(0)", "balls(0)", "half-line", "shift-3"];
    let unit = &catalog[0];
    for (name, d) in names.iter().zip(&catalog) {
        let mut exact = true;
        for level in 0..base.num_levels() {
            let plus = d.cross_table(level)?.grid.add_scalar(Dist::ONE)?;
            exact &=
                unit.concat(d)?.cross_table(level)?.grid == plus && d.concat(unit)?.cross_table(level)?.grid == plus;
        }
        r.assert(&format!("unit law on {name}"), exact, "");
    }
    let cfg = config.coarse()?;
    let mut probes = Vec::new();
    for law in [Law::Associativity, Law::Regularity] {
        let p = semigroup_probe(&catalog, law, &cfg)?;
        let status = if p.all_pass() {
            Status::Pass
        } else if p.count(roebench::double::CaseStatus::Fail) > 0 {
            Status::Fail
        } else {
            Status::Inconclusive
        };
        r.check(&format!("{law:?}"), status, format!("{} cases", p.cases.len()));
        probes.push(json!({
            "law": law,
            "cases": p.cases.len(),
            "pass": p.count(roebench::double::CaseStatus::Pass),
            "fail": p.count(roebench::double::CaseStatus::Fail),
            "inconclusive": p.count(roebench::double::CaseStatus::Inconclusive),
        }));
    }
    r.record("catalog", names)?;
    r.record("probes", probes)?;
    Ok(r)
}
