use std::sync::Arc;

use serde::Serialize;

use super::family::NestedFamily;
use super::kernel::min_plus;
use crate::error::{Error, Result};
use crate::metric::{MetricTower, Point};
use crate::number::{Dist, Grid};

/// A direct link `(source, 0) — (target, 1)` of the given length.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bridge {
    pub source: Point,
    pub target: Point,
    pub length: Dist,
}

#[derive(Clone, Debug)]
enum Cross {
    /// `c = d_X + 1`.
    Unit,
    /// `c(x,y) = min_z d(x,z) + m(z) + d(z,y)` for a family with ranks `m`.
    Family(NestedFamily),
    /// Values over the top level of the base.
    Explicit(Grid),
    Concat {
        left: Box<DoubleMetric>,
        right: Box<DoubleMetric>,
        buffer: usize,
    },
    Flip(Box<DoubleMetric>),
}

/// A metric on `X × {0,1}` that restricts to `d_X` on both copies, stored as
/// its cross-distance function `c(x,y) = d((x,0),(y,1))`.
///
/// Cross values are produced per level; concatenations evaluate lazily, so
/// a composite is only ever materialized at the levels asked for.
#[derive(Clone, Debug)]
pub struct DoubleMetric {
    base: Arc<MetricTower>,
    cross: Cross,
}

/// Cross values `c(x,y)` on one level, rows indexed by copy-0 points.
#[derive(Clone, Debug)]
pub struct CrossTable {
    base: Arc<MetricTower>,
    pub level: usize,
    pub grid: Grid,
    /// Entries whose minimum was only reached in the outermost evaluated shell.
    boundary: Vec<bool>,
}

impl CrossTable {
    pub fn points(&self) -> &[Point] {
        &self.base.points()[..self.grid.rows()]
    }

    pub fn len(&self) -> usize {
        self.grid.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.rows() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> Dist {
        self.grid.get(i, j)
    }

    /// `c(x,y)`, or `None` when either point is outside the level.
    pub fn value(&self, x: Point, y: Point) -> Option<Dist> {
        let i = self.base.index_of(x).ok()?;
        let j = self.base.index_of(y).ok()?;
        (i < self.len() && j < self.len()).then(|| self.grid.get(i, j))
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        !self.boundary.is_empty() && self.boundary[i * self.len() + j]
    }

    pub fn boundary_pairs(&self) -> Vec<(Point, Point)> {
        let pts = self.points();
        let n = self.len();
        (0..n * n)
            .filter(|&k| self.boundary.get(k).copied().unwrap_or(false))
            .map(|k| (pts[k / n], pts[k % n]))
            .collect()
    }
}

impl DoubleMetric {
    /// The standard unit, `c = d_X + 1`.
    pub fn unit(base: Arc<MetricTower>) -> DoubleMetric {
        DoubleMetric { base, cross: Cross::Unit }
    }

    /// The standard zero: the singleton family at `basepoint`, `c(x,y) = d(x,x₀) + 1 + d(x₀,y)`.
    ///
    /// The constant singleton family does not satisfy the 1-neighborhood
    /// condition; it is used as a formula, not as a validated family.
    pub fn zero(base: Arc<MetricTower>, basepoint: Point) -> Result<DoubleMetric> {
        base.index_of(basepoint)?;
        Ok(DoubleMetric { base, cross: Cross::Family(NestedFamily::constant(vec![basepoint])) })
    }

    /// The idempotent `d_𝒜` of a validated nested family.
    pub fn from_family(base: Arc<MetricTower>, family: NestedFamily) -> Result<DoubleMetric> {
        family.validate(&base)?;
        Ok(DoubleMetric { base, cross: Cross::Family(family) })
    }

    /// Explicit cross values; `points` orders the matrix rows and columns and
    /// defaults to the base's top-level order. Every top-level point must be covered.
    pub fn from_matrix(
        base: Arc<MetricTower>,
        points: Option<Vec<Point>>,
        rows: Vec<Vec<Dist>>,
    ) -> Result<DoubleMetric> {
        let order = points.unwrap_or_else(|| base.points().to_vec());
        let m = order.len();
        if rows.len() != m || rows.iter().any(|r| r.len() != m) {
            return Err(Error::Shape(format!("cross matrix must be {m}×{m}")));
        }
        let mut pos = vec![usize::MAX; base.points().len()];
        for (k, &p) in order.iter().enumerate() {
            let i = base.index_of(p)?;
            if pos[i] != usize::MAX {
                return Err(Error::DuplicatePoint(p));
            }
            pos[i] = k;
        }
        if let Some(i) = pos.iter().position(|&k| k == usize::MAX) {
            return Err(Error::Shape(format!("cross matrix misses point {}", base.points()[i])));
        }
        let n = pos.len();
        let grid = Grid::from_fn(n, n, |i, j| rows[pos[i]][pos[j]])?;
        Ok(DoubleMetric { base, cross: Cross::Explicit(grid) })
    }

    /// `c(x,y) = min_j d(x, a_j) + w_j + d(b_j, y)` over the given bridges.
    ///
    /// The result is a valid double exactly when
    /// `d(a_i,a_j) ≤ w_i + w_j + d(b_i,b_j)` and symmetrically for all pairs of bridges;
    /// [`validate_double`](super::validate_double) reports any failure.
    pub fn from_bridges(base: Arc<MetricTower>, bridges: &[Bridge]) -> Result<DoubleMetric> {
        if bridges.is_empty() {
            return Err(Error::InvalidParameter("at least one bridge is required".into()));
        }
        let table = base.table(base.top())?;
        let n = table.rows();
        let src = bridges.iter().map(|b| base.index_of(b.source)).collect::<Result<Vec<_>>>()?;
        let dst = bridges.iter().map(|b| base.index_of(b.target)).collect::<Result<Vec<_>>>()?;
        let left = Grid::from_fn(n, bridges.len(), |x, j| table.get(x, src[j]) + bridges[j].length)?;
        let right = Grid::from_fn(bridges.len(), n, |j, y| table.get(dst[j], y))?;
        let grid = min_plus(&left, &right, n, bridges.len(), n, None)?.grid;
        Ok(DoubleMetric { base, cross: Cross::Explicit(grid) })
    }

    pub fn base(&self) -> &Arc<MetricTower> {
        &self.base
    }

    /// Concatenation with the default one-level buffer.
    pub fn concat(&self, other: &DoubleMetric) -> Result<DoubleMetric> {
        self.concat_with_buffer(other, 1)
    }

    /// `c(x,y) = min_z c₁(x,z) + c₂(z,y)`, with `z` ranging over the level
    /// `buffer` steps deeper than the one evaluated (clamped to the top).
    pub fn concat_with_buffer(&self, other: &DoubleMetric, buffer: usize) -> Result<DoubleMetric> {
        if !same_base(&self.base, &other.base) {
            return Err(Error::BaseMismatch);
        }
        Ok(DoubleMetric {
            base: self.base.clone(),
            cross: Cross::Concat { left: Box::new(self.clone()), right: Box::new(other.clone()), buffer },
        })
    }

    /// Swaps the two copies: `c'(x,y) = c(y,x)`.
    pub fn flip(&self) -> DoubleMetric {
        match &self.cross {
            Cross::Flip(inner) => (**inner).clone(),
            _ => DoubleMetric { base: self.base.clone(), cross: Cross::Flip(Box::new(self.clone())) },
        }
    }

    /// Short human-readable description of how the double was built.
    pub fn describe(&self) -> String {
        match &self.cross {
            Cross::Unit => "unit".into(),
            Cross::Family(f) => match &f.rule {
                super::FamilyRule::Constant(ps) if ps.len() == 1 => format!("zero({})", ps[0]),
                _ => "family".into(),
            },
            Cross::Explicit(_) => "matrix".into(),
            Cross::Concat { left, right, .. } => format!("({} ∘ {})", left.describe(), right.describe()),
            Cross::Flip(inner) => format!("flip({})", inner.describe()),
        }
    }

    /// Cross values on `level`.
    pub fn cross_table(&self, level: usize) -> Result<CrossTable> {
        let n = self.base.level_size(level)?;
        let (grid, boundary) = match &self.cross {
            Cross::Unit => (self.base.table(level)?.add_scalar(Dist::ONE)?, Vec::new()),
            Cross::Explicit(grid) => (grid.prefix(n, n), Vec::new()),
            Cross::Family(family) => self.family_table(family, level)?,
            Cross::Concat { left, right, buffer } => {
                let top = self.base.top();
                let eval = (level + buffer).min(top);
                let lt = left.cross_table(eval)?;
                let rt = right.cross_table(eval)?;
                let inner = self.base.level_size(eval)?;
                let out = min_plus(&lt.grid, &rt.grid, n, inner, n, self.shell_start(eval))?;
                (out.grid, out.boundary)
            }
            Cross::Flip(inner) => {
                let t = inner.cross_table(level)?;
                let boundary = if t.boundary.is_empty() {
                    Vec::new()
                } else {
                    (0..n * n).map(|k| t.boundary[(k % n) * n + k / n]).collect()
                };
                (t.grid.transpose(), boundary)
            }
        };
        Ok(CrossTable { base: self.base.clone(), level, grid, boundary })
    }

    /// First index of the outermost shell of `level`, if that level is a truncation.
    fn shell_start(&self, level: usize) -> Option<usize> {
        if self.base.is_complete() && level == self.base.top() {
            return None;
        }
        Some(if level == 0 { 0 } else { self.base.level_sizes()[level - 1] })
    }

    fn family_table(&self, family: &NestedFamily, level: usize) -> Result<(Grid, Vec<bool>)> {
        let base = &self.base;
        let n = base.level_size(level)?;
        let ranks = family.ranks(base)?;
        let members: Vec<(usize, u64)> = ranks.iter().enumerate().filter_map(|(z, r)| r.map(|r| (z, r))).collect();
        if members.is_empty() {
            return Err(Error::InvalidParameter("nested family has no materialized points".into()));
        }
        let top = base.top();
        let dist = base.table_rect(top, top)?;
        let left = Grid::from_fn(n, members.len(), |x, k| {
            let (z, m) = members[k];
            dist.get(x, z) + Dist::int(m as i64)
        })?;
        let right = Grid::from_fn(members.len(), n, |k, y| dist.get(members[k].0, y))?;
        let shell = self.shell_start(top).map(|s| members.partition_point(|&(z, _)| z < s));
        let out = min_plus(&left, &right, n, members.len(), n, shell)?;
        Ok((out.grid, out.boundary))
    }
}

pub(crate) fn same_base(a: &Arc<MetricTower>, b: &Arc<MetricTower>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(radii: &[u32]) -> Arc<MetricTower> {
        Arc::new(MetricTower::integers(radii).unwrap())
    }

    #[test]
    fn unit_and_zero_formulas() {
        let base = z(&[4, 8]);
        let u = DoubleMetric::unit(base.clone()).cross_table(1).unwrap();
        let o = DoubleMetric::zero(base.clone(), Point(0)).unwrap().cross_table(1).unwrap();
        for &x in base.points() {
            for &y in base.points() {
                assert_eq!(u.value(x, y).unwrap(), Dist::int((x.0 - y.0).abs() + 1));
                assert_eq!(o.value(x, y).unwrap(), Dist::int(x.0.abs() + y.0.abs() + 1));
            }
        }
    }

    #[test]
    fn flip_transposes() {
        let base = z(&[3]);
        let fam = NestedFamily::neighborhoods(super::super::Region::AtLeast(1), Dist::ZERO, Dist::ONE);
        let d = DoubleMetric::from_family(base.clone(), fam).unwrap();
        let skew = d.concat(&DoubleMetric::zero(base, Point(2)).unwrap()).unwrap();
        let a = skew.cross_table(0).unwrap();
        let b = skew.flip().cross_table(0).unwrap();
        assert_eq!(a.grid.transpose(), b.grid);
        assert_eq!(skew.flip().flip().cross_table(0).unwrap().grid, a.grid);
    }

    #[test]
    fn matrix_double_needs_every_point() {
        let base = z(&[1]);
        let rows = vec![vec![Dist::ONE; 2]; 2];
        assert!(DoubleMetric::from_matrix(base.clone(), Some(vec![Point(0), Point(1)]), rows).is_err());
        let rows = vec![vec![Dist::int(5); 3]; 3];
        let d = DoubleMetric::from_matrix(base, Some(vec![Point(1), Point(0), Point(-1)]), rows).unwrap();
        assert_eq!(d.cross_table(0).unwrap().value(Point(1), Point(-1)), Some(Dist::int(5)));
    }

    #[test]
    fn base_mismatch() {
        let a = DoubleMetric::unit(z(&[2]));
        let b = DoubleMetric::unit(z(&[3]));
        assert_eq!(a.concat(&b).unwrap_err(), Error::BaseMismatch);
    }

    #[test]
    fn bridges_reproduce_unit() {
        let base = z(&[3]);
        let bridges: Vec<Bridge> =
            base.points().iter().map(|&p| Bridge { source: p, target: p, length: Dist::ONE }).collect();
        let d = DoubleMetric::from_bridges(base.clone(), &bridges).unwrap();
        assert_eq!(d.cross_table(0).unwrap().grid, DoubleMetric::unit(base).cross_table(0).unwrap().grid);
    }
}
