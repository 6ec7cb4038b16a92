use serde::Serialize;

use super::{MetricTower, Point};
use crate::error::{Error, Result};
use crate::number::Dist;

/// Points of `level` within distance `radius` of `center`, sorted by id.
pub fn ball(tower: &MetricTower, level: usize, center: Point, radius: Dist) -> Result<Vec<Point>> {
    let pts = tower.level_points(level)?;
    if !pts.contains(&center) {
        return Err(Error::UnknownPoint(center));
    }
    let mut out = Vec::new();
    for &p in pts {
        if tower.dist(center, p)? <= radius {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

/// Maximal ball cardinality per radius, for every level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeometryProfile {
    pub radii: Vec<Dist>,
    /// `per_level[level][i]` is the largest ball of radius `radii[i]`.
    pub per_level: Vec<Vec<usize>>,
}

impl GeometryProfile {
    /// Whether the maxima for `radii[i]` stop growing over the last `window` levels.
    pub fn plateaus(&self, i: usize, window: usize) -> bool {
        let n = self.per_level.len();
        n >= window && self.per_level[n - window..].windows(2).all(|w| w[0][i] == w[1][i])
    }
}

pub fn bounded_geometry_profile(tower: &MetricTower, radii: &[Dist]) -> Result<GeometryProfile> {
    let mut per_level = Vec::with_capacity(tower.num_levels());
    for level in 0..tower.num_levels() {
        let table = tower.table(level)?;
        let n = table.rows();
        let maxima = radii
            .iter()
            .map(|r| (0..n).map(|i| (0..n).filter(|&j| table.get(i, j) <= *r).count()).max().unwrap_or(0))
            .collect();
        per_level.push(maxima);
    }
    Ok(GeometryProfile { radii: radii.to_vec(), per_level })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{Generator, GeneratorKind};

    #[test]
    fn squares_ball() {
        let g = Generator::new(GeneratorKind::Squares { signed: false }, vec![4]);
        let t = MetricTower::from_generator(g).unwrap();
        // Enumerate n² ≤ 5 directly.
        let expected: Vec<Point> = (0..=4i64).map(|n| n * n).filter(|&s| s <= 5).map(Point).collect();
        assert_eq!(ball(&t, 0, Point(0), Dist::int(5)).unwrap(), expected);
        assert_eq!(expected, vec![Point(0), Point(1), Point(4)]);
    }

    #[test]
    fn zero_radius_and_unknown_center() {
        let t = MetricTower::integers(&[3]).unwrap();
        assert_eq!(ball(&t, 0, Point(2), Dist::ZERO).unwrap(), vec![Point(2)]);
        assert_eq!(ball(&t, 0, Point(9), Dist::ONE).unwrap_err(), Error::UnknownPoint(Point(9)));
    }

    #[test]
    fn discrete_ball_is_whole_level() {
        let t = MetricTower::from_generator(Generator::new(GeneratorKind::Discrete, vec![6])).unwrap();
        assert_eq!(ball(&t, 0, Point(3), Dist::ONE).unwrap().len(), 6);
    }

    #[test]
    fn integer_line_profile() {
        let t = MetricTower::integers(&[10]).unwrap();
        let p = bounded_geometry_profile(&t, &[Dist::ZERO, Dist::int(2)]).unwrap();
        // {x-2, ..., x+2} fits for interior x.
        assert_eq!(p.per_level[0], vec![1, 5]);
    }

    #[test]
    fn discrete_profile_grows_with_level() {
        let t = MetricTower::from_generator(Generator::new(GeneratorKind::Discrete, vec![2, 4, 8])).unwrap();
        let p = bounded_geometry_profile(&t, &[Dist::ONE]).unwrap();
        assert_eq!(p.per_level, vec![vec![2], vec![4], vec![8]]);
        assert!(!p.plateaus(0, 2));
    }
}
