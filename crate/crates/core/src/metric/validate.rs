use serde::Serialize;

use super::{MetricTower, Point};
use crate::error::Result;
use crate::number::Dist;

/// Reports keep at most this many violations; `total` counts all of them.
pub const MAX_REPORTED: usize = 64;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Negative,
    Identity,
    Separation,
    Symmetry,
    Triangle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    /// Smallest level on which every named point is present.
    pub level: usize,
    pub points: Vec<Point>,
    pub values: Vec<Dist>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport<V> {
    pub ok: bool,
    pub total: usize,
    pub violations: Vec<V>,
}

impl<V> ValidationReport<V> {
    pub(crate) fn new() -> Self {
        ValidationReport { ok: true, total: 0, violations: Vec::new() }
    }

    pub(crate) fn push(&mut self, v: V) {
        self.ok = false;
        self.total += 1;
        if self.violations.len() < MAX_REPORTED {
            self.violations.push(v);
        }
    }
}

pub type MetricReport = ValidationReport<Violation>;

/// Checks the metric axioms on every level.
///
/// Levels are prefixes sharing one distance function, so scanning the top
/// level covers all of them; a violation is attributed to the smallest level
/// containing its points.
pub fn validate_metric(tower: &MetricTower) -> Result<MetricReport> {
    let pts = tower.points();
    let n = pts.len();
    let table = tower.table(tower.top())?;
    let sizes = tower.level_sizes();
    let level_of = |idx: &[usize]| {
        let max = idx.iter().copied().max().unwrap_or(0);
        sizes.partition_point(|&s| s <= max)
    };
    let mut report = MetricReport::new();
    let push = |report: &mut MetricReport, axiom, idx: &[usize]| {
        let values = match idx {
            [i] => vec![table.get(*i, *i)],
            [i, j] => vec![table.get(*i, *j), table.get(*j, *i)],
            [i, j, k] => vec![table.get(*i, *k), table.get(*i, *j), table.get(*j, *k)],
            _ => unreachable!(),
        };
        report.push(Violation { axiom, level: level_of(idx), points: idx.iter().map(|&i| pts[i]).collect(), values });
    };

    for i in 0..n {
        if table.raw(i, i) != 0 {
            push(&mut report, Axiom::Identity, &[i]);
        }
        for j in 0..n {
            let v = table.raw(i, j);
            if v < 0 {
                push(&mut report, Axiom::Negative, &[i, j]);
            }
            if i < j {
                if v == 0 {
                    push(&mut report, Axiom::Separation, &[i, j]);
                }
                if v != table.raw(j, i) {
                    push(&mut report, Axiom::Symmetry, &[i, j]);
                }
            }
        }
    }
    // Triangle: d(i,k) <= d(i,j) + d(j,k), reported as (i, j, k).
    for i in 0..n {
        let row_i = table.raw_row(i);
        for j in 0..n {
            let dij = row_i[j];
            let row_j = table.raw_row(j);
            for k in 0..n {
                if row_i[k] > dij + row_j[k] {
                    push(&mut report, Axiom::Triangle, &[i, j, k]);
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{Generator, GeneratorKind};

    fn explicit(points: &[i64], rows: &[&[i64]]) -> MetricTower {
        MetricTower::from_matrix(
            points.iter().map(|&p| Point(p)).collect(),
            rows.iter().map(|r| r.iter().map(|&v| Dist::int(v)).collect()).collect(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn discrete_unit_space_is_valid() {
        let t = MetricTower::from_generator(Generator::new(GeneratorKind::Discrete, vec![5])).unwrap();
        assert!(validate_metric(&t).unwrap().ok);
    }

    #[test]
    fn single_point_is_valid() {
        let t = explicit(&[7], &[&[0]]);
        assert!(validate_metric(&t).unwrap().ok);
    }

    #[test]
    fn triangle_violation_names_points() {
        // a=0, b=1, c=2 with d(a,c)=10 and d(a,b)=d(b,c)=1.
        let t = explicit(&[0, 1, 2], &[&[0, 1, 10], &[1, 0, 1], &[10, 1, 0]]);
        let r = validate_metric(&t).unwrap();
        assert!(!r.ok);
        let tri: Vec<_> = r.violations.iter().filter(|v| v.axiom == Axiom::Triangle).collect();
        assert!(tri.iter().any(|v| v.points == vec![Point(0), Point(1), Point(2)]));
        assert!(tri.iter().all(|v| v.values[0] > v.values[1] + v.values[2]));
    }

    #[test]
    fn asymmetry_and_zero_distance() {
        let t = explicit(&[0, 1], &[&[0, 2], &[3, 0]]);
        let r = validate_metric(&t).unwrap();
        assert!(r.violations.iter().any(|v| v.axiom == Axiom::Symmetry));
        let t = explicit(&[0, 1], &[&[0, 0], &[0, 0]]);
        let r = validate_metric(&t).unwrap();
        assert_eq!(r.violations[0].axiom, Axiom::Separation);
    }
}
