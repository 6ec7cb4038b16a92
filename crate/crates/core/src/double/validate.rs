use serde::Serialize;

use super::DoubleMetric;
use crate::error::Result;
use crate::metric::{Point, ValidationReport};
use crate::number::{Dist, Grid};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DoubleAxiom {
    /// `c(x,y) ≤ 0`: the two copies touch.
    CopiesTouch,
    /// `|c(x,y) - c(x',y)| > d(x,x')`.
    SourceLipschitz,
    /// `|c(x,y) - c(x,y')| > d(y,y')`.
    TargetLipschitz,
    /// `d(x,x') > c(x,y) + c(x',y)`.
    SourceTriangle,
    /// `d(y,y') > c(x,y) + c(x,y')`.
    TargetTriangle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DoubleViolation {
    pub axiom: DoubleAxiom,
    pub level: usize,
    /// `(x, y)` for separation; `(x, x', y)` or `(x, y, y')` otherwise.
    pub points: Vec<Point>,
}

pub type DoubleReport = ValidationReport<DoubleViolation>;

/// Checks on every level that `d_X ⊔ d_X ⊔ c` is a metric on `X × {0,1}`.
///
/// With `d_X` a metric, that holds exactly when `c > 0` and the four
/// mixed triangle inequalities hold.
pub fn validate_double(dm: &DoubleMetric) -> Result<DoubleReport> {
    let base = dm.base();
    let mut report = DoubleReport::new();
    for level in 0..base.num_levels() {
        let table = dm.cross_table(level)?;
        let d = base.table(level)?;
        check_level(level, table.points(), &table.grid, &d, &mut report)?;
    }
    Ok(report)
}

fn check_level(level: usize, pts: &[Point], c: &Grid, d: &Grid, report: &mut DoubleReport) -> Result<()> {
    let n = pts.len();
    let ct = c.transpose();
    let (_, raws) = Grid::align_many(&[c, &ct, d])?;
    let (c, ct, d) = (&raws[0], &raws[1], &raws[2]);
    let mut push = |axiom, points: Vec<usize>| {
        report.push(DoubleViolation { axiom, level, points: points.into_iter().map(|i| pts[i]).collect() });
    };
    for x in 0..n {
        for y in 0..n {
            if c[x * n + y] <= 0 {
                push(DoubleAxiom::CopiesTouch, vec![x, y]);
            }
        }
    }
    // Rows of `c` for the source side, rows of `cᵀ` for the target side.
    for (rows, lip, tri) in [
        (c, DoubleAxiom::SourceLipschitz, DoubleAxiom::SourceTriangle),
        (ct, DoubleAxiom::TargetLipschitz, DoubleAxiom::TargetTriangle),
    ] {
        let source_side = lip == DoubleAxiom::SourceLipschitz;
        for u in 0..n {
            let ru = &rows[u * n..(u + 1) * n];
            for v in u + 1..n {
                let duv = d[u * n + v];
                let rv = &rows[v * n..(v + 1) * n];
                for w in 0..n {
                    let (a, b) = (ru[w], rv[w]);
                    let named = || if source_side { vec![u, v, w] } else { vec![w, u, v] };
                    if (a - b).abs() > duv {
                        push(lip, named());
                    }
                    if duv > a + b {
                        push(tri, named());
                    }
                }
            }
        }
    }
    Ok(())
}

/// Smallest cross value on a level.
pub fn separation(dm: &DoubleMetric, level: usize) -> Result<Dist> {
    Ok(dm.cross_table(level)?.grid.min_value().unwrap_or(Dist::ZERO))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::metric::{Generator, GeneratorKind, MetricTower};

    fn matrix_double(base: &Arc<MetricTower>, f: impl Fn(i64, i64) -> i64) -> DoubleMetric {
        let pts = base.points();
        let rows = pts.iter().map(|x| pts.iter().map(|y| Dist::int(f(x.0, y.0))).collect()).collect();
        DoubleMetric::from_matrix(base.clone(), None, rows).unwrap()
    }

    #[test]
    fn shifted_base_metric_is_valid() {
        let base = Arc::new(MetricTower::integers(&[3, 6]).unwrap());
        let d = matrix_double(&base, |x, y| (x - y).abs() + 1);
        assert!(validate_double(&d).unwrap().ok);
    }

    #[test]
    fn touching_copies() {
        let base = Arc::new(MetricTower::integers(&[3]).unwrap());
        let d = matrix_double(&base, |x, y| (x - y).abs());
        let r = validate_double(&d).unwrap();
        assert!(!r.ok);
        assert!(r.violations.iter().any(|v| v.axiom == DoubleAxiom::CopiesTouch && v.points[0] == v.points[1]));
    }

    #[test]
    fn constant_one_over_discrete_space() {
        let base = Arc::new(MetricTower::from_generator(Generator::new(GeneratorKind::Discrete, vec![4, 8])).unwrap());
        let d = matrix_double(&base, |_, _| 1);
        assert!(validate_double(&d).unwrap().ok);
    }

    #[test]
    fn lipschitz_failure_is_named() {
        let base = Arc::new(MetricTower::integers(&[2]).unwrap());
        // Jumps by 3 between neighbours 0 and 1 on the source side.
        let d = matrix_double(&base, |x, y| if x == 1 { 10 + (x - y).abs() } else { (x - y).abs() + 7 });
        let r = validate_double(&d).unwrap();
        let v = r.violations.iter().find(|v| v.axiom == DoubleAxiom::SourceLipschitz).unwrap();
        assert!(v.points[..2].contains(&Point(1)));
    }
}
