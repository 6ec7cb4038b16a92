use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::metric::same_base;
use super::DoubleMetric;
use crate::error::{Error, Result};
use crate::metric::{compare_levels, CoarseConfig, CoarseVerdict, LevelSamples, Point, Sample};
use crate::number::Dist;

/// A point of the double `X × {0,1}`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Site {
    pub point: Point,
    pub copy: u8,
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.point, self.copy)
    }
}

/// Every pair of distinct sites of a level with its distance under both doubles.
pub fn double_samples(d1: &DoubleMetric, d2: &DoubleMetric, level: usize) -> Result<LevelSamples<Site>> {
    if !same_base(d1.base(), d2.base()) {
        return Err(Error::BaseMismatch);
    }
    let base = d1.base();
    let pts = base.level_points(level)?;
    let d = base.table(level)?;
    let c1 = d1.cross_table(level)?;
    let c2 = d2.cross_table(level)?;
    let n = pts.len();
    let mut samples = Vec::with_capacity(n * n * 2);
    for copy in 0..2u8 {
        for i in 0..n {
            for j in i + 1..n {
                let v = d.get(i, j);
                let pair = (Site { point: pts[i], copy }, Site { point: pts[j], copy });
                samples.push(Sample { pair, a: v, b: v });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let pair = (Site { point: pts[i], copy: 0 }, Site { point: pts[j], copy: 1 });
            samples.push(Sample { pair, a: c1.get(i, j), b: c2.get(i, j) });
        }
    }
    Ok(LevelSamples { level, samples })
}

/// Coarse comparison of two doubles as metrics on `X × {0,1}`: the class
/// equality test of the concatenation semigroup.
pub fn compare_doubles(d1: &DoubleMetric, d2: &DoubleMetric, config: &CoarseConfig) -> Result<CoarseVerdict<Site>> {
    let levels = (0..d1.base().num_levels()).map(|k| double_samples(d1, d2, k)).collect::<Result<Vec<_>>>()?;
    Ok(compare_levels(&levels, config))
}

/// Coarse comparison of the cross functions alone.
///
/// The bases may carry different metrics as long as they share points; this
/// compares the operator supports two doubles generate, whichever metric on
/// `X` they were built over.
pub fn compare_cross(d1: &DoubleMetric, d2: &DoubleMetric, config: &CoarseConfig) -> Result<CoarseVerdict<Point>> {
    if !d1.base().same_points(d2.base()) {
        return Err(Error::MismatchedPoints);
    }
    let mut levels = Vec::with_capacity(d1.base().num_levels());
    for level in 0..d1.base().num_levels() {
        let c1 = d1.cross_table(level)?;
        let c2 = d2.cross_table(level)?;
        let pts = c1.points();
        let n = pts.len();
        let mut samples = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                samples.push(Sample { pair: (pts[i], pts[j]), a: c1.get(i, j), b: c2.get(i, j) });
            }
        }
        levels.push(LevelSamples { level, samples });
    }
    Ok(compare_levels(&levels, config))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    /// Smallest level containing both points; values are read there.
    pub level: usize,
    pub x: Point,
    pub y: Point,
    pub c1: Dist,
    pub c2: Dist,
}

/// Pairs `(x_k, y_k)` with `c₁ ≤ bound`, `c₂ > target` and `c₂` strictly
/// increasing, taken shell by shell through the tower.
///
/// Sources are pairwise distinct and so are targets, so the pairs support a
/// partial isometry `Σ e_{x_k,y_k}`. Returns `None` when the tower yields no pair.
pub fn witness_nonequivalence(
    d1: &DoubleMetric,
    d2: &DoubleMetric,
    bound: Dist,
    target: Dist,
) -> Result<Option<Vec<PairWitness>>> {
    if !same_base(d1.base(), d2.base()) {
        return Err(Error::BaseMismatch);
    }
    let base = d1.base();
    let mut out: Vec<PairWitness> = Vec::new();
    let mut used_x = HashSet::new();
    let mut used_y = HashSet::new();
    let mut prev = 0;
    for level in 0..base.num_levels() {
        let size = base.level_size(level)?;
        if size == prev {
            continue;
        }
        let t1 = d1.cross_table(level)?;
        let t2 = d2.cross_table(level)?;
        let pts = t1.points();
        let mut shell = Vec::new();
        for i in 0..size {
            for j in 0..size {
                if i < prev && j < prev {
                    continue;
                }
                let (c1, c2) = (t1.get(i, j), t2.get(i, j));
                if c1 <= bound && c2 > target {
                    shell.push(PairWitness { level, x: pts[i], y: pts[j], c1, c2 });
                }
            }
        }
        shell.sort_by_key(|p| (p.c2, p.x, p.y));
        for w in shell {
            let grows = out.last().is_none_or(|last| w.c2 > last.c2);
            if grows && !used_x.contains(&w.x) && !used_y.contains(&w.y) {
                used_x.insert(w.x);
                used_y.insert(w.y);
                out.push(w);
            }
        }
        prev = size;
    }
    Ok((!out.is_empty()).then_some(out))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::metric::{MetricTower, VerdictTag};

    #[test]
    fn unit_against_zero() {
        let base = Arc::new(MetricTower::integers(&[8, 16, 32]).unwrap());
        let unit = DoubleMetric::unit(base.clone());
        let zero = DoubleMetric::zero(base.clone(), Point(0)).unwrap();
        let w = witness_nonequivalence(&unit, &zero, Dist::ONE, Dist::int(20)).unwrap().unwrap();
        assert!(w.len() >= 10);
        for p in &w {
            assert_eq!(p.x, p.y);
            assert_eq!(p.c1, Dist::ONE);
            assert_eq!(p.c2, Dist::int(2 * p.x.0.abs() + 1));
        }
        assert!(witness_nonequivalence(&unit, &unit, Dist::ONE, Dist::int(20)).unwrap().is_none());
        assert!(witness_nonequivalence(&zero, &unit, Dist::int(3), Dist::int(3)).unwrap().is_none());
    }

    #[test]
    fn doubles_compare() {
        let base = Arc::new(MetricTower::integers(&[4, 8, 16, 32]).unwrap());
        let unit = DoubleMetric::unit(base.clone());
        let zero = DoubleMetric::zero(base.clone(), Point(0)).unwrap();
        let cfg = CoarseConfig::default();
        assert_eq!(compare_doubles(&unit, &unit, &cfg).unwrap().tag, VerdictTag::Equivalent);
        let v = compare_doubles(&unit, &zero, &cfg).unwrap();
        assert_eq!(v.tag, VerdictTag::NotEquivalent);
        assert!(v.witnesses.iter().all(|w| w.is_well_formed()));
        assert_eq!(compare_doubles(&zero, &unit, &cfg).unwrap().tag, VerdictTag::NotEquivalent);
    }
}
