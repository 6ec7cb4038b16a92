use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_integer::Roots;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::{Dist, Grid};

/// A point of the underlying countable space, identified by an integer id.
///
/// For the coordinate generators the id is the coordinate itself (the integer
/// `x`, or the square `±n²`).
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub i64);

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Exponential generator exponents are capped so `2^x` stays in the exact range.
pub const MAX_EXPONENT: u32 = 28;

/// Named distance formulas that produce unbounded families of points.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    /// `ℤ` with `|x - y|`; level parameter is the radius.
    Integers,
    /// Points `x_n = n²` (`±n²` when signed); level parameter bounds `|n|`.
    Squares { signed: bool },
    /// The signed squares carrying `|f(x_n) - f(x_m)|`, with `f(x_n) = (2n)³` for
    /// `n ≥ 0` and `-(2n+1)³` for `n < 0`.
    CubesPullback,
    /// `ℤ` with `|2^x - 2^y|`; level parameter is the radius.
    Exponential,
    /// Points `0..k` at mutual distance 1; level parameter is the size `k`.
    Discrete,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub kind: GeneratorKind,
    /// One parameter per level (radius or size, depending on the kind).
    pub levels: Vec<u32>,
    /// Every distance is multiplied by this factor.
    pub scale: Dist,
}

impl Generator {
    pub fn new(kind: GeneratorKind, levels: Vec<u32>) -> Generator {
        Generator { kind, levels, scale: Dist::ONE }
    }

    pub fn with_scale(mut self, scale: Dist) -> Generator {
        self.scale = scale;
        self
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            GeneratorKind::Integers => "integers",
            GeneratorKind::Squares { .. } => "squares",
            GeneratorKind::CubesPullback => "cubes-pullback",
            GeneratorKind::Exponential => "exponential",
            GeneratorKind::Discrete => "discrete",
        }
    }

    fn check(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::EmptyTower);
        }
        if let Some(i) = self.levels.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::LevelsNotNested { level: i + 1 });
        }
        if !self.scale.is_positive() {
            return Err(Error::InvalidParameter("generator scale must be positive".into()));
        }
        match self.kind {
            GeneratorKind::Discrete if self.levels[0] == 0 => Err(Error::EmptyLevel { level: 0 }),
            GeneratorKind::Exponential if *self.levels.last().unwrap() > MAX_EXPONENT => {
                Err(Error::InvalidParameter(format!("exponential generator radius is limited to {MAX_EXPONENT}")))
            }
            _ => Ok(()),
        }
    }

    /// The index `n` underlying a point of a squares-type generator.
    fn square_index(p: Point) -> i64 {
        let root = p.0.abs().sqrt();
        if p.0 < 0 {
            -root
        } else {
            root
        }
    }

    /// Image of `x_n` under the squares-to-cubes map.
    pub fn cube_image(n: i64) -> i64 {
        if n >= 0 {
            (2 * n).pow(3)
        } else {
            -(2 * n + 1).pow(3)
        }
    }

    fn unscaled(&self, p: Point, q: Point) -> Dist {
        match self.kind {
            GeneratorKind::Integers | GeneratorKind::Squares { .. } => Dist::int((p.0 - q.0).abs()),
            GeneratorKind::CubesPullback => {
                let fp = Generator::cube_image(Generator::square_index(p));
                let fq = Generator::cube_image(Generator::square_index(q));
                Dist::int((fp - fq).abs())
            }
            GeneratorKind::Exponential => (pow2(p.0) - pow2(q.0)).abs(),
            GeneratorKind::Discrete => {
                if p == q {
                    Dist::ZERO
                } else {
                    Dist::ONE
                }
            }
        }
    }

    fn dist(&self, p: Point, q: Point) -> Dist {
        let d = self.unscaled(p, q);
        if self.scale == Dist::ONE {
            d
        } else {
            d * self.scale
        }
    }

    /// Point ids of each level shell, in the order they are appended.
    fn shells(&self) -> Vec<Vec<Point>> {
        let mut out = Vec::with_capacity(self.levels.len());
        let mut done: Option<u32> = None;
        for &param in &self.levels {
            let shell: Vec<Point> = match self.kind {
                GeneratorKind::Integers | GeneratorKind::Exponential => {
                    signed_shell(done, param).into_iter().map(Point).collect()
                }
                GeneratorKind::Squares { signed: true } | GeneratorKind::CubesPullback => {
                    signed_shell(done, param).into_iter().map(|n| Point(n.signum() * n * n)).collect()
                }
                GeneratorKind::Squares { signed: false } => {
                    let start = done.map_or(0, |d| d as i64 + 1);
                    (start..=param as i64).map(|n| Point(n * n)).collect()
                }
                GeneratorKind::Discrete => {
                    let start = done.unwrap_or(0) as i64;
                    (start..param as i64).map(Point).collect()
                }
            };
            out.push(shell);
            done = Some(param);
        }
        out
    }
}

fn pow2(x: i64) -> Dist {
    if x >= 0 {
        Dist::int(1i64 << x)
    } else {
        Dist::new(1, 1i64 << (-x)).expect("nonzero denominator")
    }
}

/// Integers with `prev < |n| ≤ radius` (all `|n| ≤ radius` when `prev` is unset),
/// ordered outward from 0 so the first point of a tower is its basepoint.
fn signed_shell(prev: Option<u32>, radius: u32) -> Vec<i64> {
    let r = radius as i64;
    let inner = prev.map(|p| p as i64);
    let mut shell: Vec<i64> = (-r..=r).filter(|n| inner.is_none_or(|p| n.abs() > p)).collect();
    shell.sort_by_key(|n| (n.abs(), *n));
    shell
}

#[derive(Clone, Debug)]
enum Source {
    Generator(Generator),
    Explicit(Grid),
}

/// A nested chain of finite metric spaces.
///
/// Points are stored once, ordered so that every level is a prefix of the
/// next; level `k` consists of the first `level_size(k)` points. This makes
/// containment between levels hold by construction and lets distance tables
/// of lower levels be leading blocks of the top table. A single distance
/// function serves all levels, so values agree across levels.
#[derive(Debug)]
pub struct MetricTower {
    source: Source,
    points: Vec<Point>,
    level_sizes: Vec<usize>,
    index: HashMap<Point, usize>,
    top_table: OnceLock<Grid>,
}

impl Clone for MetricTower {
    fn clone(&self) -> Self {
        MetricTower {
            source: self.source.clone(),
            points: self.points.clone(),
            level_sizes: self.level_sizes.clone(),
            index: self.index.clone(),
            top_table: OnceLock::new(),
        }
    }
}

impl PartialEq for MetricTower {
    fn eq(&self, other: &Self) -> bool {
        if self.points != other.points || self.level_sizes != other.level_sizes {
            return false;
        }
        match (&self.source, &other.source) {
            (Source::Generator(a), Source::Generator(b)) => a == b,
            _ => self.top_grid() == other.top_grid(),
        }
    }
}

impl MetricTower {
    pub fn from_generator(generator: Generator) -> Result<MetricTower> {
        generator.check()?;
        let mut points = Vec::new();
        let mut level_sizes = Vec::new();
        for shell in generator.shells() {
            points.extend(shell);
            level_sizes.push(points.len());
        }
        MetricTower::assemble(Source::Generator(generator), points, level_sizes)
    }

    /// A tower over an explicit finite distance matrix.
    ///
    /// `level_sizes` are prefix lengths of `points`; by default the whole
    /// point list forms a single level. Explicit towers are complete: their top
    /// level is the entire space.
    pub fn from_matrix(
        points: Vec<Point>,
        matrix: Vec<Vec<Dist>>,
        level_sizes: Option<Vec<usize>>,
    ) -> Result<MetricTower> {
        let n = points.len();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::Shape(format!("distance matrix must be {n}×{n}")));
        }
        let level_sizes = level_sizes.unwrap_or_else(|| vec![n]);
        if level_sizes.last() != Some(&n) {
            return Err(Error::Shape("last level must contain every point".into()));
        }
        if let Some(i) = level_sizes.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::LevelsNotNested { level: i + 1 });
        }
        let values: Vec<Dist> = matrix.into_iter().flatten().collect();
        let grid = Grid::from_values(n, n, &values)?;
        MetricTower::assemble(Source::Explicit(grid), points, level_sizes)
    }

    fn assemble(source: Source, points: Vec<Point>, level_sizes: Vec<usize>) -> Result<MetricTower> {
        if level_sizes.is_empty() {
            return Err(Error::EmptyTower);
        }
        if level_sizes[0] == 0 {
            return Err(Error::EmptyLevel { level: 0 });
        }
        let mut index = HashMap::with_capacity(points.len());
        for (i, &p) in points.iter().enumerate() {
            if index.insert(p, i).is_some() {
                return Err(Error::DuplicatePoint(p));
            }
        }
        Ok(MetricTower { source, points, level_sizes, index, top_table: OnceLock::new() })
    }

    /// `ℤ` truncated at the given radii.
    pub fn integers(radii: &[u32]) -> Result<MetricTower> {
        MetricTower::from_generator(Generator::new(GeneratorKind::Integers, radii.to_vec()))
    }

    pub fn generator(&self) -> Option<&Generator> {
        match &self.source {
            Source::Generator(g) => Some(g),
            Source::Explicit(_) => None,
        }
    }

    /// Whether the top level is the whole space rather than a truncation.
    pub fn is_complete(&self) -> bool {
        matches!(self.source, Source::Explicit(_))
    }

    pub fn num_levels(&self) -> usize {
        self.level_sizes.len()
    }

    pub fn top(&self) -> usize {
        self.level_sizes.len() - 1
    }

    pub fn level_sizes(&self) -> &[usize] {
        &self.level_sizes
    }

    pub fn level_size(&self, level: usize) -> Result<usize> {
        self.level_sizes.get(level).copied().ok_or(Error::LevelOutOfRange { level, levels: self.level_sizes.len() })
    }

    pub fn level_points(&self, level: usize) -> Result<&[Point]> {
        Ok(&self.points[..self.level_size(level)?])
    }

    /// All points of the top level.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn index_of(&self, p: Point) -> Result<usize> {
        self.index.get(&p).copied().ok_or(Error::UnknownPoint(p))
    }

    pub fn contains(&self, p: Point) -> bool {
        self.index.contains_key(&p)
    }

    /// Smallest level containing `p`.
    pub fn level_of(&self, p: Point) -> Result<usize> {
        let i = self.index_of(p)?;
        Ok(self.level_sizes.partition_point(|&s| s <= i))
    }

    pub fn dist(&self, p: Point, q: Point) -> Result<Dist> {
        let i = self.index_of(p)?;
        let j = self.index_of(q)?;
        Ok(match &self.source {
            Source::Generator(g) => g.dist(p, q),
            Source::Explicit(grid) => grid.get(i, j),
        })
    }

    fn top_grid(&self) -> &Grid {
        self.top_table.get_or_init(|| match &self.source {
            Source::Explicit(grid) => grid.clone(),
            Source::Generator(g) => {
                let pts = &self.points;
                Grid::from_fn(pts.len(), pts.len(), |i, j| g.dist(pts[i], pts[j]))
                    .expect("generator distances stay within exact range")
            }
        })
    }

    /// Dense distance table of a level, in level point order.
    pub fn table(&self, level: usize) -> Result<Grid> {
        let n = self.level_size(level)?;
        let top = self.top_grid();
        Ok(if n == top.rows() { top.clone() } else { top.prefix(n, n) })
    }

    /// Distances from the points of `rows_level` to those of `cols_level`.
    pub fn table_rect(&self, rows_level: usize, cols_level: usize) -> Result<Grid> {
        let r = self.level_size(rows_level)?;
        let c = self.level_size(cols_level)?;
        Ok(self.top_grid().prefix(r, c))
    }

    pub fn same_points(&self, other: &MetricTower) -> bool {
        self.points == other.points && self.level_sizes == other.level_sizes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels_are_prefixes() {
        let t = MetricTower::integers(&[1, 3]).unwrap();
        assert_eq!(t.level_points(0).unwrap(), &[Point(0), Point(-1), Point(1)]);
        assert_eq!(t.level_size(1).unwrap(), 7);
        assert_eq!(t.level_of(Point(0)).unwrap(), 0);
        assert_eq!(t.level_of(Point(-3)).unwrap(), 1);
        assert!(t.level_of(Point(4)).is_err());
    }

    #[test]
    fn squares_and_cubes() {
        let g = Generator::new(GeneratorKind::CubesPullback, vec![2]);
        let t = MetricTower::from_generator(g).unwrap();
        assert_eq!(Generator::cube_image(1), 8);
        assert_eq!(Generator::cube_image(-1), 1);
        assert_eq!(Generator::cube_image(2), 64);
        assert_eq!(Generator::cube_image(-2), 27);
        // x_1 = 1 and x_{-1} = -1 map to 8 and 1.
        assert_eq!(t.dist(Point(1), Point(-1)).unwrap(), Dist::int(7));
        assert_eq!(t.dist(Point(4), Point(0)).unwrap(), Dist::int(64));
        let unsigned = Generator::new(GeneratorKind::Squares { signed: false }, vec![3]);
        let t = MetricTower::from_generator(unsigned).unwrap();
        assert_eq!(t.points(), &[Point(0), Point(1), Point(4), Point(9)]);
    }

    #[test]
    fn exponential_has_rational_distances() {
        let t = MetricTower::from_generator(Generator::new(GeneratorKind::Exponential, vec![3])).unwrap();
        assert_eq!(t.dist(Point(-1), Point(-2)).unwrap(), Dist::new(1, 4).unwrap());
        assert_eq!(t.table(0).unwrap().denom(), 8);
    }

    #[test]
    fn rejects_bad_towers() {
        assert_eq!(MetricTower::integers(&[]).unwrap_err(), Error::EmptyTower);
        assert!(matches!(MetricTower::integers(&[3, 1]), Err(Error::LevelsNotNested { .. })));
        let m = vec![vec![Dist::ZERO; 2]; 2];
        assert!(MetricTower::from_matrix(vec![Point(1), Point(1)], m.clone(), None).is_err());
        assert!(MetricTower::from_matrix(vec![Point(1)], m, None).is_err());
    }

    #[test]
    fn scaled_generator() {
        let g = Generator::new(GeneratorKind::Integers, vec![2]).with_scale(Dist::int(2));
        let t = MetricTower::from_generator(g).unwrap();
        assert_eq!(t.dist(Point(-2), Point(1)).unwrap(), Dist::int(6));
    }
}
