use serde::Serialize;

use super::operator::{abs_exact, abs_sq, BandOperator};
use crate::error::Result;
use crate::metric::{MetricTower, Point};
use crate::number::Dist;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GhostProfile {
    pub basepoint: Point,
    pub radii: Vec<Dist>,
    /// `sup |T_{x,y}|²` over entries with `x` or `y` outside the ball of each radius.
    pub sup_sq: Vec<Dist>,
    /// The supremum itself, when rational.
    pub sup: Vec<Option<Dist>>,
}

impl GhostProfile {
    pub fn is_nonincreasing(&self) -> bool {
        self.sup_sq.windows(2).all(|w| w[0] >= w[1])
    }

    /// Whether the last radius sees no entry at all.
    pub fn reaches_zero(&self) -> bool {
        self.sup_sq.last().is_none_or(|v| v.is_zero())
    }
}

/// Size of the entries of `t` away from `basepoint`, one value per radius.
///
/// A ghost has this profile tending to 0; a profile that stays away from 0
/// on every truncation is evidence against.
pub fn ghost_profile(t: &BandOperator, tower: &MetricTower, basepoint: Point, radii: &[Dist]) -> Result<GhostProfile> {
    let mut reach = Vec::with_capacity(t.nnz());
    for (&(x, y), v) in t.entries() {
        let r = tower.dist(basepoint, x)?.max(tower.dist(basepoint, y)?);
        reach.push((r, abs_sq(v)?, *v));
    }
    let mut sup_sq = Vec::with_capacity(radii.len());
    let mut sup = Vec::with_capacity(radii.len());
    for &radius in radii {
        let best = reach.iter().filter(|(r, _, _)| *r > radius).max_by_key(|(_, a, _)| *a);
        match best {
            Some((_, a, v)) => {
                sup_sq.push(*a);
                sup.push(abs_exact(v)?);
            }
            None => {
                sup_sq.push(Dist::ZERO);
                sup.push(Some(Dist::ZERO));
            }
        }
    }
    Ok(GhostProfile { basepoint, radii: radii.to_vec(), sup_sq, sup })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use num_complex::Complex;
    use num_rational::Ratio;

    use super::*;

    fn radii(n: i64) -> Vec<Dist> {
        (0..n).map(Dist::int).collect()
    }

    #[test]
    fn identity_is_not_a_ghost() {
        let tower = MetricTower::integers(&[10]).unwrap();
        let id = BandOperator::identity(tower.points().into());
        let p = ghost_profile(&id, &tower, Point(0), &radii(10)).unwrap();
        assert!(p.sup.iter().all(|v| *v == Some(Dist::ONE)));
        assert!(p.is_nonincreasing());
    }

    #[test]
    fn elementary_vanishes_past_its_point() {
        let tower = MetricTower::integers(&[10]).unwrap();
        let pts: Arc<[Point]> = tower.points().into();
        let e = BandOperator::elementary(pts.clone(), pts, Point(-3), Point(-3)).unwrap();
        let p = ghost_profile(&e, &tower, Point(0), &radii(6)).unwrap();
        assert_eq!(p.sup, [1, 1, 1, 0, 0, 0].map(|v| Some(Dist::int(v))).to_vec());
        assert!(p.reaches_zero());
    }

    #[test]
    fn complex_entries() {
        let tower = MetricTower::integers(&[3]).unwrap();
        let pts: Arc<[Point]> = tower.points().into();
        let v = Complex::new(Ratio::from_integer(1), Ratio::from_integer(1));
        let t = BandOperator::from_entries(pts.clone(), pts, [((Point(2), Point(1)), v)]).unwrap();
        let p = ghost_profile(&t, &tower, Point(0), &radii(1)).unwrap();
        assert_eq!(p.sup_sq, vec![Dist::int(2)]);
        assert_eq!(p.sup, vec![None]);
    }
}
