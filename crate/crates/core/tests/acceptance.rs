//! Acceptance checks, one line per criterion. Runs without the test harness
//! so the lines are always printed; exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use roebench::double::{
    compare_doubles, validate_double, witness_nonequivalence, Bridge, DoubleMetric, NestedFamily, Region,
};
use roebench::inverse::{ideal_product, pb_enumerate, InverseSemigroup, MulTable};
use roebench::metric::{coarse_compare, CoarseConfig, Generator, GeneratorKind, MetricTower, Point, VerdictTag};
use roebench::roe::{
    compose, contains_operator, ghost_profile, mask_compose, mask_inclusion, metric_mask, pair_sum_operator,
    split_cover, BandOperator, Scalar,
};
use roebench::Dist;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// Catalog doubles over a `ℤ` tower.
fn z_catalog(base: &Arc<MetricTower>) -> Result<Vec<(String, DoubleMetric)>, String> {
    let half = NestedFamily::neighborhoods(Region::AtLeast(0), Dist::ZERO, Dist::ONE);
    let pair = NestedFamily::neighborhoods(Region::Points(vec![Point(-5), Point(5)]), Dist::ONE, Dist::int(2));
    let shift: Vec<Bridge> = base
        .points()
        .iter()
        .filter(|p| base.contains(Point(p.0 + 3)))
        .map(|&p| Bridge { source: p, target: Point(p.0 + 3), length: Dist::new(3, 2).unwrap() })
        .collect();
    Ok(vec![
        ("unit".into(), DoubleMetric::unit(base.clone())),
        ("zero(0)".into(), ok(DoubleMetric::zero(base.clone(), Point(0)))?),
        ("zero(7)".into(), ok(DoubleMetric::zero(base.clone(), Point(7)))?),
        ("balls(0)".into(), ok(DoubleMetric::from_family(base.clone(), NestedFamily::balls(Point(0))))?),
        ("half-line".into(), ok(DoubleMetric::from_family(base.clone(), half))?),
        ("two-centres".into(), ok(DoubleMetric::from_family(base.clone(), pair))?),
        ("shift-3".into(), ok(DoubleMetric::from_bridges(base.clone(), &shift))?),
    ])
}

fn unit_law() -> Check {
    let base = common::integers(&[16, 32, 64, 127]);
    ensure!(base.points().len() <= 256, "tower too large");
    let unit = DoubleMetric::unit(base.clone());
    let catalog = z_catalog(&base)?;
    let mut checked = 0usize;
    for (name, d) in &catalog {
        ensure!(ok(validate_double(d))?.ok, "{name} is not a valid double");
        for level in 0..base.num_levels() {
            let plain = ok(ok(d.cross_table(level))?.grid.add_scalar(Dist::ONE))?;
            let left = ok(ok(unit.concat(d))?.cross_table(level))?;
            let right = ok(ok(d.concat(&unit))?.cross_table(level))?;
            ensure!(left.grid == plain, "unit∘{name} differs from {name}+1 at level {level}");
            ensure!(right.grid == plain, "{name}∘unit differs from {name}+1 at level {level}");
            checked += 2 * plain.rows() * plain.cols();
        }
    }
    Ok(format!("{} doubles, {checked} entries equal", catalog.len()))
}

fn idempotent_law() -> Check {
    let base = common::integers(&[4, 8, 16, 32, 48, 64]);
    let families = [
        ("balls(0)", NestedFamily::balls(Point(0))),
        ("half-line", NestedFamily::neighborhoods(Region::AtLeast(0), Dist::ZERO, Dist::ONE)),
        (
            "two-centres",
            NestedFamily::neighborhoods(Region::Points(vec![Point(-5), Point(5)]), Dist::ONE, Dist::int(2)),
        ),
        ("whole", NestedFamily::whole()),
    ];
    let config = CoarseConfig { window: 3, ..CoarseConfig::default() };
    for (name, fam) in families.iter().cloned() {
        let d = ok(DoubleMetric::from_family(base.clone(), fam))?;
        let v = ok(compare_doubles(&ok(d.concat(&d))?, &d, &config))?;
        ensure!(v.tag == VerdictTag::Equivalent, "{name}: {:?} ({:?})", v.tag, v.diagnostics.notes);
    }
    Ok(format!("{} families Equivalent over {} levels", families.len(), base.num_levels()))
}

fn associativity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA550C);
    let base = Arc::new(common::random_graph_tower(&mut rng, 64, 0.08, 6));
    let top = base.top();
    for t in 0..20 {
        let a = common::random_double(&mut rng, &base);
        let b = common::random_double(&mut rng, &base);
        let c = common::random_double(&mut rng, &base);
        let lhs = ok(ok(ok(a.concat(&b))?.concat(&c))?.cross_table(top))?;
        let rhs = ok(ok(a.concat(&ok(b.concat(&c))?))?.cross_table(top))?;
        ensure!(lhs.grid == rhs.grid, "triple {t} differs");
        ensure!(lhs.boundary_pairs().is_empty(), "triple {t} has boundary-limited entries");
    }
    Ok("20 triples on 64 points equal".into())
}

fn symmetric_inverse_monoid() -> Check {
    let mut counts = Vec::new();
    for (n, expect) in [(1, 2), (2, 7), (3, 34), (4, 209)] {
        let (all, table) = ok(MulTable::partial_bijections(n))?;
        ensure!(all.len() == expect, "n={n}: {} elements", all.len());
        ensure!(ok(pb_enumerate(n))?.len() == expect, "n={n}: enumeration differs");
        let report = ok(table.check_inverse())?;
        ensure!(report.inverse, "n={n}: {report:?}");
        let sg = ok(InverseSemigroup::new(table))?;
        ensure!(sg.idempotents().len() == 1 << n, "n={n}: {} idempotents", sg.idempotents().len());
        counts.push(all.len());
    }
    Ok(format!("counts {counts:?}, inverse, 2^n idempotents"))
}

fn ideal_lemma() -> Check {
    let n = 5;
    let subsets: Vec<BTreeSet<usize>> =
        (0..1u32 << n).map(|m| (1..=n).filter(|i| m >> (i - 1) & 1 == 1).collect()).collect();
    for p in &subsets {
        for q in &subsets {
            let r = ok(ideal_product(n, p, q))?;
            let meet: BTreeSet<usize> = p.intersection(q).copied().collect();
            ensure!(r.product == meet, "{p:?}·{q:?} = {:?}", r.product);
            ensure!(r.verified, "{p:?}·{q:?}: matrix span disagrees");
        }
    }
    Ok(format!("{} pairs", subsets.len() * subsets.len()))
}

fn homomorphism_law() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1407);
    let mut compared = 0usize;
    for pair in 0..20 {
        let base = Arc::new(common::random_graph_tower(&mut rng, 40, 0.1, 4));
        let d1 = common::random_double(&mut rng, &base);
        let d2 = common::random_double(&mut rng, &base);
        let dd = ok(d1.concat(&d2))?;
        let top = base.top();
        for l1 in 1..=5 {
            let m1 = ok(metric_mask(&d1, Dist::int(l1), top))?;
            for l2 in 1..=5 {
                let m2 = ok(metric_mask(&d2, Dist::int(l2), top))?;
                let composed = ok(mask_compose(&m1, &m2))?;
                let target = ok(metric_mask(&dd, Dist::int(l1 + l2), top))?;
                let inc = ok(mask_inclusion(&composed, &target))?;
                ensure!(inc.holds, "pair {pair}, L1={l1}, L2={l2}: {:?} escapes", inc.counterexample);
                compared += 1;
            }
        }
        for l in 2..=10 {
            let target = ok(metric_mask(&dd, Dist::int(l), top))?;
            let cover = ok(split_cover(&d1, &d2, Dist::int(l), top))?;
            let inc = ok(mask_inclusion(&target, &cover))?;
            ensure!(inc.holds, "pair {pair}, L={l}: {:?} not covered", inc.counterexample);
            ensure!(ok(mask_inclusion(&cover, &target))?.holds, "pair {pair}, L={l}: cover too large");
        }
    }
    Ok(format!("{compared} inclusions, covers exact"))
}

fn injectivity_witness() -> Check {
    let base = common::integers(&[8, 16, 32, 64, 128]);
    let unit = DoubleMetric::unit(base.clone());
    let zero = ok(DoubleMetric::zero(base.clone(), Point(0)))?;
    let (c, t) = (Dist::ONE, Dist::int(20));
    let w = ok(witness_nonequivalence(&unit, &zero, c, t))?.ok_or("no witness found")?;
    ensure!(w.len() >= 10, "only {} pairs", w.len());
    ensure!(w.iter().all(|p| p.c1 == Dist::ONE && p.c2 > t), "bounds violated");
    ensure!(w.windows(2).all(|p| p[0].c2 < p[1].c2), "c2 not increasing");
    let top = base.top();
    let ut = ok(unit.cross_table(top))?;
    let zt = ok(zero.cross_table(top))?;
    ensure!(
        w.iter().all(|p| ut.value(p.x, p.y) == Some(p.c1) && zt.value(p.x, p.y) == Some(p.c2)),
        "reported values differ from direct evaluation"
    );
    let pts: Arc<[Point]> = base.points().into();
    let pairs: Vec<(Point, Point)> = w.iter().map(|p| (p.x, p.y)).collect();
    let m = ok(pair_sum_operator(pts.clone(), pts, &pairs))?;
    ensure!(contains_operator(&ok(metric_mask(&unit, c, top))?, &m).holds, "pair sum outside mask(d1, 1)");
    ensure!(!contains_operator(&ok(metric_mask(&zero, t, top))?, &m).holds, "pair sum inside mask(d2, 20)");
    Ok(format!("{} pairs, c2 from {} to {}", w.len(), w[0].c2, w[w.len() - 1].c2))
}

fn squares_cubes() -> Check {
    let levels = vec![4, 8, 16, 32, 64];
    let d = ok(MetricTower::from_generator(Generator::new(GeneratorKind::Squares { signed: true }, levels.clone())))?;
    let b = ok(MetricTower::from_generator(Generator::new(GeneratorKind::CubesPullback, levels)))?;
    for (n, f) in [(1i64, 8i64), (-1, 1), (2, 64)] {
        ensure!(Generator::cube_image(n) == f, "f(x_{n}) = {}", Generator::cube_image(n));
    }
    let v = ok(coarse_compare(&d, &b, &CoarseConfig { window: 3, ..CoarseConfig::default() }))?;
    ensure!(v.tag == VerdictTag::Equivalent, "{:?}: {:?}", v.tag, v.diagnostics.notes);
    let reverse = ok(coarse_compare(&b, &d, &CoarseConfig::default()))?;
    ensure!(reverse.tag == VerdictTag::Equivalent, "reverse comparison {:?}", reverse.tag);
    Ok(format!("Equivalent, control ceiling {}", v.control_ceiling().map_or("-".into(), |c| c.to_string())))
}

fn ghost_diagnostic() -> Check {
    let tower = MetricTower::integers(&[64]).map_err(|e| e.to_string())?;
    let pts: Arc<[Point]> = tower.points().into();
    let radii: Vec<Dist> = (0..64).map(Dist::int).collect();
    let id =
        ghost_profile(&BandOperator::identity(pts.clone()), &tower, Point(0), &radii).map_err(|e| e.to_string())?;
    ensure!(id.sup.iter().all(|v| *v == Some(Dist::ONE)), "identity profile drops below 1");
    for k in 2..=32i64 {
        let value = Scalar::new(Ratio::new(1, k), Ratio::zero());
        let block = (k..2 * k).flat_map(|x| (k..2 * k).map(move |y| ((Point(x), Point(y)), value)));
        let t = ok(BandOperator::from_entries(pts.clone(), pts.clone(), block))?;
        let p = ok(ghost_profile(&t, &tower, Point(0), &radii))?;
        let inv_k = Dist::new(1, k).unwrap();
        ensure!(p.sup.iter().flatten().max() == Some(&inv_k), "k={k}: max entry is not 1/k");
        ensure!(p.sup[..k as usize].iter().all(|v| *v == Some(inv_k)), "k={k}: profile below the block");
        ensure!(p.is_nonincreasing() && p.reaches_zero(), "k={k}: profile shape");
        let (rows, cols) = ok(t.row_column_sums())?;
        ensure!(rows == Dist::ONE && cols == Dist::ONE, "k={k}: row/column sums {rows}, {cols}");
        ensure!(ok(t.exact_norm_sq())? == Some(Dist::ONE), "k={k}: norm is not 1");
    }
    Ok("k = 2..32: max entry 1/k, norm bound 1".into())
}

fn elementary_identities() -> Check {
    let tower = ok(MetricTower::from_generator(Generator::new(GeneratorKind::Discrete, vec![20])))?;
    let pts: Arc<[Point]> = tower.points().into();
    ensure!(pts.len() == 20, "level has {} points", pts.len());
    let e = |x: Point, y: Point| BandOperator::elementary(pts.clone(), pts.clone(), x, y).unwrap();
    let mut triples = 0;
    for &x in pts.iter() {
        for &y in pts.iter() {
            let exy = e(x, y);
            ensure!(ok(compose(&e(y, y), &ok(compose(&exy, &e(x, x)))?))? == exy, "e_yy e_xy e_xx ≠ e_xy for {x},{y}");
            for &z in pts.iter() {
                ensure!(ok(compose(&exy, &e(z, x)))? == e(z, y), "e_xy e_zx ≠ e_zy for {x},{y},{z}");
                triples += 1;
            }
        }
    }
    Ok(format!("{triples} triples"))
}

fn main() {
    let criteria: [(u8, &str, u64, fn() -> Check); 10] = [
        (1, "unit law", 5, unit_law),
        (2, "idempotent law", 30, idempotent_law),
        (3, "min-plus associativity", 10, associativity),
        (4, "symmetric inverse monoid", 60, symmetric_inverse_monoid),
        (5, "ideal lemma", 5, ideal_lemma),
        (6, "homomorphism law for masks", 30, homomorphism_law),
        (7, "injectivity witness", 5, injectivity_witness),
        (8, "squares-cubes", 30, squares_cubes),
        (9, "ghost diagnostic", 5, ghost_diagnostic),
        (10, "elementary identities", 5, elementary_identities),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let (status, detail) = match (&result, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over the {limit} s limit")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {id:>2} {status} {name} [{:.3} s / {limit} s]: {detail}", elapsed.as_secs_f64());
    }
    println!("acceptance: {} of 10 passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
