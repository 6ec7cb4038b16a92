use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use super::operator::BandOperator;
use crate::double::{CrossTable, DoubleMetric};
use crate::error::{Error, Result};
use crate::metric::{MetricTower, Point};
use crate::number::{Dist, Grid};

/// A relation on the points of one level: pairs `(x, y)` with `x` a copy-0
/// (source) point and `y` a copy-1 (target) point.
#[derive(Clone, Debug)]
pub struct SupportMask {
    points: Arc<[Point]>,
    index: Arc<HashMap<Point, usize>>,
    words: usize,
    bits: Vec<u64>,
    /// Propagation bound the mask was cut at, if it came from a metric.
    pub bound: Option<Dist>,
}

impl PartialEq for SupportMask {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.bits == other.bits
    }
}

impl Eq for SupportMask {}

/// Outcome of a containment test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inclusion {
    pub holds: bool,
    /// First pair (in row-major point order) of the left side missing from the right.
    pub counterexample: Option<(Point, Point)>,
}

impl SupportMask {
    pub fn empty(points: Arc<[Point]>) -> Result<SupportMask> {
        let mut index = HashMap::with_capacity(points.len());
        for (i, &p) in points.iter().enumerate() {
            if index.insert(p, i).is_some() {
                return Err(Error::DuplicatePoint(p));
            }
        }
        let words = points.len().div_ceil(64);
        let bits = vec![0; words * points.len()];
        Ok(SupportMask { points, index: Arc::new(index), words, bits, bound: None })
    }

    pub fn full(points: Arc<[Point]>) -> Result<SupportMask> {
        let mut m = SupportMask::empty(points)?;
        let n = m.len();
        for i in 0..n {
            for j in 0..n {
                m.set(i, j);
            }
        }
        Ok(m)
    }

    pub fn from_pairs(points: Arc<[Point]>, pairs: impl IntoIterator<Item = (Point, Point)>) -> Result<SupportMask> {
        let mut m = SupportMask::empty(points)?;
        for (x, y) in pairs {
            let (i, j) = (m.idx(x)?, m.idx(y)?);
            m.set(i, j);
        }
        Ok(m)
    }

    fn from_grid(points: Arc<[Point]>, grid: &Grid, bound: Dist) -> Result<SupportMask> {
        let mut m = SupportMask::empty(points)?;
        let n = m.len();
        for i in 0..n {
            for j in 0..n {
                if grid.get(i, j) <= bound {
                    m.set(i, j);
                }
            }
        }
        m.bound = Some(bound);
        Ok(m)
    }

    fn idx(&self, p: Point) -> Result<usize> {
        self.index.get(&p).copied().ok_or(Error::UnknownPoint(p))
    }

    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    fn bit(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    pub fn points(&self) -> &Arc<[Point]> {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn contains(&self, x: Point, y: Point) -> bool {
        match (self.index.get(&x), self.index.get(&y)) {
            (Some(&i), Some(&j)) => self.bit(i, j),
            _ => false,
        }
    }

    /// Pairs in row-major point order.
    pub fn iter(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| (0..n).filter(move |&j| self.bit(i, j)).map(move |j| (self.points[i], self.points[j])))
    }

    /// Pairs sorted by point id.
    pub fn sorted_pairs(&self) -> Vec<(Point, Point)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort();
        v
    }

    fn check_same(&self, other: &SupportMask) -> Result<()> {
        if self.points != other.points {
            return Err(Error::MismatchedPoints);
        }
        Ok(())
    }

    fn with_bits(&self, bits: Vec<u64>) -> SupportMask {
        SupportMask { points: self.points.clone(), index: self.index.clone(), words: self.words, bits, bound: None }
    }

    pub fn union(&self, other: &SupportMask) -> Result<SupportMask> {
        self.check_same(other)?;
        Ok(self.with_bits(self.bits.iter().zip(&other.bits).map(|(a, b)| a | b).collect()))
    }

    pub fn intersection(&self, other: &SupportMask) -> Result<SupportMask> {
        self.check_same(other)?;
        Ok(self.with_bits(self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect()))
    }

    /// PBM (plain `P1`) image, rows are sources in level order.
    pub fn to_pbm(&self) -> String {
        let n = self.len();
        let mut s = format!("P1\n{n} {n}\n");
        for i in 0..n {
            let row: Vec<&str> = (0..n).map(|j| if self.bit(i, j) { "1" } else { "0" }).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }
}

/// `{(x,y) : c(x,y) ≤ L}` on a level.
pub fn metric_mask(d: &DoubleMetric, bound: Dist, level: usize) -> Result<SupportMask> {
    cross_mask(&d.cross_table(level)?, bound)
}

pub fn cross_mask(table: &CrossTable, bound: Dist) -> Result<SupportMask> {
    SupportMask::from_grid(table.points().into(), &table.grid, bound)
}

/// `{(x,y) : d_X(x,y) ≤ L}` on a level.
pub fn base_mask(tower: &MetricTower, bound: Dist, level: usize) -> Result<SupportMask> {
    SupportMask::from_grid(tower.level_points(level)?.into(), &tower.table(level)?, bound)
}

/// Relational composition read left to right:
/// `(x,y) ∈ m1∘m2` iff `(x,z) ∈ m1` and `(z,y) ∈ m2` for some `z`.
pub fn mask_compose(m1: &SupportMask, m2: &SupportMask) -> Result<SupportMask> {
    m1.check_same(m2)?;
    let n = m1.len();
    let w = m1.words;
    let mut bits = vec![0u64; w * n];
    for i in 0..n {
        let out = &mut bits[i * w..(i + 1) * w];
        for z in 0..n {
            if m1.bit(i, z) {
                for (o, r) in out.iter_mut().zip(m2.row(z)) {
                    *o |= r;
                }
            }
        }
    }
    Ok(m1.with_bits(bits))
}

pub fn mask_transpose(m: &SupportMask) -> SupportMask {
    let n = m.len();
    let mut t = m.with_bits(vec![0; m.bits.len()]);
    for i in 0..n {
        for j in 0..n {
            if m.bit(i, j) {
                t.set(j, i);
            }
        }
    }
    t.bound = m.bound;
    t
}

pub fn mask_inclusion(m1: &SupportMask, m2: &SupportMask) -> Result<Inclusion> {
    m1.check_same(m2)?;
    let n = m1.len();
    for i in 0..n {
        let (a, b) = (m1.row(i), m2.row(i));
        if let Some(k) = (0..m1.words).find(|&k| a[k] & !b[k] != 0) {
            let j = k * 64 + (a[k] & !b[k]).trailing_zeros() as usize;
            return Ok(Inclusion { holds: false, counterexample: Some((m1.points[i], m1.points[j])) });
        }
    }
    Ok(Inclusion { holds: true, counterexample: None })
}

/// Whether the support of `t` lies in the mask; the first pair outside is returned.
pub fn contains_operator(m: &SupportMask, t: &BandOperator) -> Inclusion {
    match t.support().find(|&(x, y)| !m.contains(x, y)) {
        Some(p) => Inclusion { holds: false, counterexample: Some(p) },
        None => Inclusion { holds: true, counterexample: None },
    }
}

/// The graph of a support mask as an operator with entries 1.
pub fn mask_operator(m: &SupportMask) -> Result<BandOperator> {
    BandOperator::from_entries(m.points.clone(), m.points.clone(), m.iter().map(|p| (p, super::operator::one())))
}

/// `∪ mask(d1, L1) ∘ mask(d2, L − L1)` over every value `L1 ≤ L` attained by `c₁`
/// on the level.
///
/// On a complete base evaluated at its top level this equals
/// `mask(concat(d1, d2), L)`: a minimizer `z` of `c₁(x,z) + c₂(z,y)` splits
/// the bound at `L1 = c₁(x,z)`.
pub fn split_cover(d1: &DoubleMetric, d2: &DoubleMetric, bound: Dist, level: usize) -> Result<SupportMask> {
    let t1 = d1.cross_table(level)?;
    let t2 = d2.cross_table(level)?;
    let mut splits: Vec<Dist> = t1.grid.values().filter(|v| *v <= bound).collect();
    splits.sort();
    splits.dedup();
    let mut out = SupportMask::empty(t1.points().into())?;
    for l1 in splits {
        let part = mask_compose(&cross_mask(&t1, l1)?, &cross_mask(&t2, bound.checked_sub(&l1)?)?)?;
        out = out.union(&part)?;
    }
    out.bound = Some(bound);
    Ok(out)
}
