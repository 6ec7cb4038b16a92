//! Metrics on the double `X × {0,1}` and their concatenation semigroup.
//!
//! A double is stored through its cross function `c(x,y) = d((x,0),(y,1))`;
//! the two copies always carry the base metric. Concatenation glues copy 1
//! of the first double to copy 0 of the second, which is a min-plus product
//! of cross functions.

mod compare;
mod family;
mod kernel;
mod metric;
mod probe;
mod validate;

use std::sync::Arc;

pub use compare::{compare_cross, compare_doubles, double_samples, witness_nonequivalence, PairWitness, Site};
pub use family::{FamilyRule, NestedFamily, Region};
pub use metric::{Bridge, CrossTable, DoubleMetric};
pub use probe::{semigroup_probe, CaseStatus, Law, ProbeCase, ProbeReport};
pub use validate::{separation, validate_double, DoubleAxiom, DoubleReport, DoubleViolation};

use crate::error::{Error, Result};
use crate::metric::MetricTower;

pub fn concat(d1: &DoubleMetric, d2: &DoubleMetric) -> Result<DoubleMetric> {
    d1.concat(d2)
}

pub fn flip(d: &DoubleMetric) -> DoubleMetric {
    d.flip()
}

pub fn idempotent_from_family(base: Arc<MetricTower>, family: NestedFamily) -> Result<DoubleMetric> {
    DoubleMetric::from_family(base, family)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StandardKind {
    Unit,
    /// Singleton family at the basepoint of the tower (its first point).
    Zero,
    Family(NestedFamily),
}

pub fn standard_double(base: Arc<MetricTower>, kind: StandardKind) -> Result<DoubleMetric> {
    match kind {
        StandardKind::Unit => Ok(DoubleMetric::unit(base)),
        StandardKind::Zero => {
            let x0 = *base.points().first().ok_or(Error::EmptyTower)?;
            DoubleMetric::zero(base, x0)
        }
        StandardKind::Family(f) => DoubleMetric::from_family(base, f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Point;
    use crate::number::Dist;

    #[test]
    fn whole_family_is_unit_like() {
        let base = Arc::new(MetricTower::integers(&[5, 10]).unwrap());
        let d = idempotent_from_family(base.clone(), NestedFamily::whole()).unwrap();
        let u = standard_double(base, StandardKind::Unit).unwrap();
        assert_eq!(d.cross_table(1).unwrap().grid, u.cross_table(1).unwrap().grid);
    }

    #[test]
    fn zero_squared() {
        let base = Arc::new(MetricTower::integers(&[4, 8, 16]).unwrap());
        let z = standard_double(base.clone(), StandardKind::Zero).unwrap();
        let zz = concat(&z, &z).unwrap().cross_table(1).unwrap();
        for &x in base.level_points(1).unwrap() {
            for &y in base.level_points(1).unwrap() {
                assert_eq!(zz.value(x, y).unwrap(), Dist::int(x.0.abs() + y.0.abs() + 2));
            }
        }
    }

    #[test]
    fn ball_family_diagonal() {
        let base = Arc::new(MetricTower::integers(&[20]).unwrap());
        let d = idempotent_from_family(base.clone(), NestedFamily::balls(Point(0)).with_depth(20)).unwrap();
        let t = d.cross_table(0).unwrap();
        for x in -20i64..=20 {
            let oracle = (1..=20i64).map(|n| 2 * (x.abs() - n).max(0) + n).min().unwrap();
            assert_eq!(t.value(Point(x), Point(x)).unwrap(), Dist::int(oracle));
        }
        assert_eq!(t.value(Point(5), Point(5)).unwrap(), Dist::int(5));
    }

    #[test]
    fn zero_family_rejected_as_idempotent() {
        let base = Arc::new(MetricTower::integers(&[3]).unwrap());
        let err = idempotent_from_family(base, NestedFamily::constant(vec![Point(0)])).unwrap_err();
        assert!(err.to_string().contains("1-neighborhood"));
    }
}
