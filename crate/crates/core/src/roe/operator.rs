use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use num_complex::Complex;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Zero};

use crate::double::CrossTable;
use crate::error::{Error, Result};
use crate::metric::{MetricTower, Point};
use crate::number::Dist;

/// Exact complex rational.
pub type Scalar = Complex<Ratio<i64>>;

pub fn real(v: Dist) -> Scalar {
    Complex::new(v.ratio(), Ratio::zero())
}

pub fn one() -> Scalar {
    real(Dist::ONE)
}

pub(crate) fn checked_mul(a: &Scalar, b: &Scalar) -> Result<Scalar> {
    let rr = a.re.checked_mul(&b.re).ok_or(Error::Overflow)?;
    let ii = a.im.checked_mul(&b.im).ok_or(Error::Overflow)?;
    let ri = a.re.checked_mul(&b.im).ok_or(Error::Overflow)?;
    let ir = a.im.checked_mul(&b.re).ok_or(Error::Overflow)?;
    Ok(Complex::new(rr.checked_sub(&ii).ok_or(Error::Overflow)?, ri.checked_add(&ir).ok_or(Error::Overflow)?))
}

pub(crate) fn checked_add(a: &Scalar, b: &Scalar) -> Result<Scalar> {
    Ok(Complex::new(a.re.checked_add(&b.re).ok_or(Error::Overflow)?, a.im.checked_add(&b.im).ok_or(Error::Overflow)?))
}

/// `|z|²`, always exact.
pub fn abs_sq(z: &Scalar) -> Result<Dist> {
    let a = z.re.checked_mul(&z.re).ok_or(Error::Overflow)?;
    let b = z.im.checked_mul(&z.im).ok_or(Error::Overflow)?;
    Ok(Dist::from(a.checked_add(&b).ok_or(Error::Overflow)?))
}

/// `|z|` when it is rational.
pub fn abs_exact(z: &Scalar) -> Result<Option<Dist>> {
    if z.im.is_zero() {
        return Ok(Some(Dist::from(z.re).abs()));
    }
    if z.re.is_zero() {
        return Ok(Some(Dist::from(z.im).abs()));
    }
    Ok(abs_sq(z)?.exact_sqrt())
}

/// `|z|` when rational, otherwise the upper bound `|re| + |im|`.
fn abs_upper(z: &Scalar) -> Result<Dist> {
    match abs_exact(z)? {
        Some(v) => Ok(v),
        None => Dist::from(z.re).abs().checked_add(&Dist::from(z.im).abs()),
    }
}

/// A finitely supported operator `H_source → H_target` with exact entries.
///
/// The entry at `(x, y)` is `T_{x,y} = ⟨δ_y, T δ_x⟩`: `x` is a source point
/// and `y` a target point. Zero entries are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandOperator {
    source: Arc<[Point]>,
    target: Arc<[Point]>,
    entries: BTreeMap<(Point, Point), Scalar>,
}

impl BandOperator {
    pub fn zero(source: Arc<[Point]>, target: Arc<[Point]>) -> BandOperator {
        BandOperator { source, target, entries: BTreeMap::new() }
    }

    pub fn identity(points: Arc<[Point]>) -> BandOperator {
        let entries = points.iter().map(|&p| ((p, p), one())).collect();
        BandOperator { source: points.clone(), target: points, entries }
    }

    /// `e_{x,y}`: sends `δ_x` to `δ_y` and every other basis vector to 0.
    pub fn elementary(source: Arc<[Point]>, target: Arc<[Point]>, x: Point, y: Point) -> Result<BandOperator> {
        BandOperator::from_entries(source, target, [((x, y), one())])
    }

    /// Later entries for the same pair replace earlier ones.
    pub fn from_entries(
        source: Arc<[Point]>,
        target: Arc<[Point]>,
        entries: impl IntoIterator<Item = ((Point, Point), Scalar)>,
    ) -> Result<BandOperator> {
        let src: HashSet<Point> = source.iter().copied().collect();
        let dst: HashSet<Point> = target.iter().copied().collect();
        let mut map = BTreeMap::new();
        for ((x, y), v) in entries {
            if !src.contains(&x) {
                return Err(Error::UnknownPoint(x));
            }
            if !dst.contains(&y) {
                return Err(Error::UnknownPoint(y));
            }
            if v.is_zero() {
                map.remove(&(x, y));
            } else {
                map.insert((x, y), v);
            }
        }
        Ok(BandOperator { source, target, entries: map })
    }

    pub fn source(&self) -> &Arc<[Point]> {
        &self.source
    }

    pub fn target(&self) -> &Arc<[Point]> {
        &self.target
    }

    pub fn get(&self, x: Point, y: Point) -> Scalar {
        self.entries.get(&(x, y)).copied().unwrap_or_else(Scalar::zero)
    }

    /// Non-zero entries ordered by `(x, y)`.
    pub fn entries(&self) -> impl Iterator<Item = (&(Point, Point), &Scalar)> {
        self.entries.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.entries.keys().copied()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Conjugate transpose: `(T*)_{y,x} = conj(T_{x,y})`.
    pub fn adjoint(&self) -> BandOperator {
        let entries = self.entries.iter().map(|(&(x, y), v)| ((y, x), v.conj())).collect();
        BandOperator { source: self.target.clone(), target: self.source.clone(), entries }
    }

    pub fn add(&self, other: &BandOperator) -> Result<BandOperator> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::Shape("operators act between different spaces".into()));
        }
        let mut entries = self.entries.clone();
        for (&k, v) in &other.entries {
            let s = checked_add(&entries.get(&k).copied().unwrap_or_else(Scalar::zero), v)?;
            if s.is_zero() {
                entries.remove(&k);
            } else {
                entries.insert(k, s);
            }
        }
        Ok(BandOperator { source: self.source.clone(), target: self.target.clone(), entries })
    }

    pub fn scale(&self, s: Scalar) -> Result<BandOperator> {
        let mut entries = BTreeMap::new();
        for (&k, v) in &self.entries {
            let p = checked_mul(v, &s)?;
            if !p.is_zero() {
                entries.insert(k, p);
            }
        }
        Ok(BandOperator { source: self.source.clone(), target: self.target.clone(), entries })
    }

    /// Largest row sum and largest column sum of `|T_{x,y}|`; their maximum
    /// bounds the operator norm. Irrational moduli are replaced by `|re| + |im|`.
    pub fn row_column_sums(&self) -> Result<(Dist, Dist)> {
        let mut rows: HashMap<Point, Dist> = HashMap::new();
        let mut cols: HashMap<Point, Dist> = HashMap::new();
        for (&(x, y), v) in &self.entries {
            let a = abs_upper(v)?;
            let r = rows.entry(x).or_insert(Dist::ZERO);
            *r = r.checked_add(&a)?;
            let c = cols.entry(y).or_insert(Dist::ZERO);
            *c = c.checked_add(&a)?;
        }
        let max = |m: HashMap<Point, Dist>| m.into_values().max().unwrap_or(Dist::ZERO);
        Ok((max(rows), max(cols)))
    }

    pub fn norm_bound(&self) -> Result<Dist> {
        let (r, c) = self.row_column_sums()?;
        Ok(r.max(c))
    }

    /// `‖T‖²` when the support splits into disjoint rectangles `A × B`, each
    /// carrying a single constant value `a`; the norm of such a block is
    /// `|a|·√(|A||B|)`. Covers diagonal operators, partial isometries and
    /// block averages. `None` for any other shape.
    pub fn exact_norm_sq(&self) -> Result<Option<Dist>> {
        let mut row_blocks: HashMap<Point, usize> = HashMap::new();
        let mut col_blocks: HashMap<Point, usize> = HashMap::new();
        // Union-find over support entries, joined through shared rows and columns.
        let keys: Vec<(Point, Point)> = self.entries.keys().copied().collect();
        let mut parent: Vec<usize> = (0..keys.len()).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            let mut j = i;
            while p[j] != r {
                let n = p[j];
                p[j] = r;
                j = n;
            }
            r
        }
        for (i, &(x, y)) in keys.iter().enumerate() {
            for slot in [row_blocks.entry(x), col_blocks.entry(y)] {
                let j = *slot.or_insert(i);
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
        let mut comps: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..keys.len() {
            let r = find(&mut parent, i);
            comps.entry(r).or_default().push(i);
        }
        let mut best = Dist::ZERO;
        for members in comps.values() {
            let value = self.entries[&keys[members[0]]];
            let rows: HashSet<Point> = members.iter().map(|&i| keys[i].0).collect();
            let cols: HashSet<Point> = members.iter().map(|&i| keys[i].1).collect();
            if members.len() != rows.len() * cols.len() || members.iter().any(|&i| self.entries[&keys[i]] != value) {
                return Ok(None);
            }
            let size = Dist::int(rows.len() as i64).checked_mul(&Dist::int(cols.len() as i64))?;
            best = best.max(abs_sq(&value)?.checked_mul(&size)?);
        }
        Ok(Some(best))
    }
}

/// `S ∘ T` (apply `T`, then `S`): `(ST)_{x,y} = Σ_w T_{x,w} S_{w,y}`.
pub fn compose(s: &BandOperator, t: &BandOperator) -> Result<BandOperator> {
    if t.target != s.source {
        return Err(Error::Shape("target of the right factor differs from source of the left".into()));
    }
    let mut by_row: HashMap<Point, Vec<(Point, Scalar)>> = HashMap::new();
    for (&(w, y), v) in &s.entries {
        by_row.entry(w).or_default().push((y, *v));
    }
    let mut acc: BTreeMap<(Point, Point), Scalar> = BTreeMap::new();
    for (&(x, w), tv) in &t.entries {
        let Some(row) = by_row.get(&w) else { continue };
        for (y, sv) in row {
            let p = checked_mul(tv, sv)?;
            let e = acc.entry((x, *y)).or_insert_with(Scalar::zero);
            *e = checked_add(e, &p)?;
        }
    }
    acc.retain(|_, v| !v.is_zero());
    Ok(BandOperator { source: t.source.clone(), target: s.target.clone(), entries: acc })
}

/// Product of bimodule elements written in metric order: `m1` lives over
/// the first double and `m2` over the second, and the result lives over
/// their concatenation.
///
/// Supports compose left to right, `supp(m1 · m2) ⊆ supp(m1) ∘ supp(m2)`,
/// while operators act right to left, so the product is `m2 ∘ m1` as
/// operators. This is the only place the two orders meet.
pub fn bimodule_product(m1: &BandOperator, m2: &BandOperator) -> Result<BandOperator> {
    compose(m2, m1)
}

/// `⟨T,S⟩ = T*S`, an operator on the source space.
pub fn inner_right(t: &BandOperator, s: &BandOperator) -> Result<BandOperator> {
    same_spaces(t, s)?;
    compose(&t.adjoint(), s)
}

/// `⟨T,S⟩ = TS*`, an operator on the target space.
pub fn inner_left(t: &BandOperator, s: &BandOperator) -> Result<BandOperator> {
    same_spaces(t, s)?;
    compose(t, &s.adjoint())
}

fn same_spaces(t: &BandOperator, s: &BandOperator) -> Result<()> {
    if t.source != s.source || t.target != s.target {
        return Err(Error::Shape("inner product of operators between different spaces".into()));
    }
    Ok(())
}

/// `Σ_k e_{x_k,y_k}`. Sources must be pairwise distinct and so must targets.
pub fn pair_sum_operator(source: Arc<[Point]>, target: Arc<[Point]>, pairs: &[(Point, Point)]) -> Result<BandOperator> {
    let mut xs = HashSet::new();
    let mut ys = HashSet::new();
    for &(x, y) in pairs {
        if !xs.insert(x) {
            return Err(Error::RepeatedIndex { side: "source", point: x });
        }
        if !ys.insert(y) {
            return Err(Error::RepeatedIndex { side: "target", point: y });
        }
    }
    BandOperator::from_entries(source, target, pairs.iter().map(|&p| (p, one())))
}

/// A distance on pairs of points, for measuring propagation.
pub trait PairMetric {
    fn pair_dist(&self, x: Point, y: Point) -> Result<Dist>;
}

impl PairMetric for MetricTower {
    fn pair_dist(&self, x: Point, y: Point) -> Result<Dist> {
        self.dist(x, y)
    }
}

impl PairMetric for CrossTable {
    fn pair_dist(&self, x: Point, y: Point) -> Result<Dist> {
        self.value(x, y).ok_or(Error::UnknownPoint(if self.value(x, x).is_none() { x } else { y }))
    }
}

/// Largest distance over the support, 0 for the zero operator.
pub fn propagation(t: &BandOperator, metric: &impl PairMetric) -> Result<Dist> {
    let mut best = Dist::ZERO;
    for (x, y) in t.support() {
        best = best.max(metric.pair_dist(x, y)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn pts(n: i64) -> Arc<[Point]> {
        (0..n).map(Point).collect()
    }

    fn c(re: i64, im: i64) -> Scalar {
        Complex::new(Ratio::from_integer(re), Ratio::from_integer(im))
    }

    fn e(x: i64, y: i64) -> BandOperator {
        BandOperator::elementary(pts(5), pts(5), Point(x), Point(y)).unwrap()
    }

    #[test]
    fn elementary_identities() {
        assert_eq!(e(1, 3).adjoint(), e(3, 1));
        let lhs = compose(&e(3, 3), &compose(&e(1, 3), &e(1, 1)).unwrap()).unwrap();
        assert_eq!(lhs, e(1, 3));
        assert_eq!(compose(&e(1, 3), &e(4, 1)).unwrap(), e(4, 3));
        assert!(compose(&e(1, 3), &e(4, 2)).unwrap().is_zero());
    }

    #[test]
    fn inner_products_of_elementary() {
        assert_eq!(inner_right(&e(1, 3), &e(1, 3)).unwrap(), e(1, 1));
        assert_eq!(inner_left(&e(1, 3), &e(1, 3)).unwrap(), e(3, 3));
    }

    #[test]
    fn identity_is_neutral_and_shapes_checked() {
        let t = BandOperator::from_entries(pts(3), pts(4), [((Point(0), Point(3)), c(2, -1))]).unwrap();
        assert_eq!(compose(&BandOperator::identity(pts(4)), &t).unwrap(), t);
        assert_eq!(compose(&t, &BandOperator::identity(pts(3))).unwrap(), t);
        assert!(compose(&t, &t).is_err());
        assert!(BandOperator::elementary(pts(3), pts(3), Point(7), Point(0)).is_err());
    }

    fn dense(t: &BandOperator, n: usize) -> Vec<Vec<Scalar>> {
        let mut m = vec![vec![Scalar::zero(); n]; n];
        for (&(x, y), v) in t.entries() {
            // Column x holds T δ_x.
            m[y.0 as usize][x.0 as usize] = *v;
        }
        m
    }

    fn random_band(rng: &mut ChaCha8Rng, n: i64, width: i64) -> BandOperator {
        let mut entries = Vec::new();
        for x in 0..n {
            for y in (x - width).max(0)..(x + width + 1).min(n) {
                if rng.gen_bool(0.6) {
                    entries.push(((Point(x), Point(y)), c(rng.gen_range(-3..4), rng.gen_range(-3..4))));
                }
            }
        }
        BandOperator::from_entries(pts(n), pts(n), entries).unwrap()
    }

    #[test]
    fn product_matches_dense_multiply() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let s = random_band(&mut rng, 10, 2);
            let t = random_band(&mut rng, 10, 3);
            let (ds, dt) = (dense(&s, 10), dense(&t, 10));
            let st = dense(&compose(&s, &t).unwrap(), 10);
            for i in 0..10 {
                for j in 0..10 {
                    let v = (0..10).fold(Scalar::zero(), |acc, k| acc + ds[i][k] * dt[k][j]);
                    assert_eq!(st[i][j], v);
                }
            }
        }
    }

    #[test]
    fn propagation_is_subadditive() {
        let tower = MetricTower::integers(&[10]).unwrap();
        let all: Arc<[Point]> = tower.points().into();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let mut entries = Vec::new();
            for _ in 0..6 {
                let x = rng.gen_range(-10..=10);
                let y = (x + rng.gen_range(-3..=3i64)).clamp(-10, 10);
                entries.push(((Point(x), Point(y)), c(1, 0)));
            }
            let s = BandOperator::from_entries(all.clone(), all.clone(), entries.clone()).unwrap();
            let t =
                BandOperator::from_entries(all.clone(), all.clone(), entries.iter().map(|&((x, y), v)| ((y, x), v)))
                    .unwrap();
            let ps = propagation(&s, &tower).unwrap();
            let pt = propagation(&t, &tower).unwrap();
            assert!(propagation(&compose(&s, &t).unwrap(), &tower).unwrap() <= ps + pt);
        }
        assert_eq!(propagation(&BandOperator::identity(all), &tower).unwrap(), Dist::ZERO);
    }

    #[test]
    fn positivity_of_self_inner_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let t = random_band(&mut rng, 6, 1);
            assert_eq!(inner_right(&t, &t).unwrap().is_zero(), t.is_zero());
        }
        let z = BandOperator::zero(pts(3), pts(3));
        assert!(inner_right(&z, &z).unwrap().is_zero());
    }

    #[test]
    fn pair_sums() {
        let single = pair_sum_operator(pts(5), pts(5), &[(Point(1), Point(2))]).unwrap();
        assert_eq!(single, e(1, 2));
        let err = pair_sum_operator(pts(5), pts(5), &[(Point(1), Point(2)), (Point(1), Point(3))]).unwrap_err();
        assert_eq!(err, Error::RepeatedIndex { side: "source", point: Point(1) });
        let err = pair_sum_operator(pts(5), pts(5), &[(Point(1), Point(2)), (Point(0), Point(2))]).unwrap_err();
        assert_eq!(err, Error::RepeatedIndex { side: "target", point: Point(2) });
    }

    #[test]
    fn norms_of_blocks() {
        let third = Complex::new(Ratio::new(1, 3), Ratio::zero());
        let block = (0..3).flat_map(|x| (0..3).map(move |y| ((Point(x), Point(y)), third)));
        let t = BandOperator::from_entries(pts(5), pts(5), block).unwrap();
        assert_eq!(t.norm_bound().unwrap(), Dist::ONE);
        assert_eq!(t.exact_norm_sq().unwrap(), Some(Dist::ONE));
        let diag = BandOperator::from_entries(
            pts(3),
            pts(3),
            [((Point(0), Point(0)), c(3, 4)), ((Point(1), Point(2)), c(1, 0))],
        )
        .unwrap();
        assert_eq!(diag.exact_norm_sq().unwrap(), Some(Dist::int(25)));
        assert_eq!(diag.norm_bound().unwrap(), Dist::int(5));
        let ragged = BandOperator::from_entries(
            pts(3),
            pts(3),
            [((Point(0), Point(0)), c(1, 0)), ((Point(0), Point(1)), c(2, 0))],
        )
        .unwrap();
        assert_eq!(ragged.exact_norm_sq().unwrap(), None);
    }
}
