use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::Point;
use crate::roe::SupportMask;

/// Default largest ground set [`pb_enumerate`] accepts.
pub const DEFAULT_ENUMERATION_BOUND: usize = 5;

/// An injective partial map on `{1..n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialBijection {
    n: usize,
    /// `map[i - 1]` is the image of `i`.
    map: Vec<Option<usize>>,
}

impl PartialBijection {
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> Result<PartialBijection> {
        let mut map = vec![None; n];
        let mut hit = vec![false; n];
        for &(x, y) in pairs {
            for v in [x, y] {
                if v == 0 || v > n {
                    return Err(Error::InvalidParameter(format!("{v} is outside 1..={n}")));
                }
            }
            if map[x - 1].is_some_and(|old| old != y) {
                return Err(Error::InvalidParameter(format!("{x} is sent to two points")));
            }
            if map[x - 1].is_none() {
                if hit[y - 1] {
                    return Err(Error::NotInjective(y));
                }
                hit[y - 1] = true;
                map[x - 1] = Some(y);
            }
        }
        Ok(PartialBijection { n, map })
    }

    pub fn empty(n: usize) -> PartialBijection {
        PartialBijection { n, map: vec![None; n] }
    }

    pub fn identity(n: usize) -> PartialBijection {
        PartialBijection { n, map: (1..=n).map(Some).collect() }
    }

    /// Identity on a subset; members outside `1..=n` are an error.
    pub fn identity_on(n: usize, subset: &BTreeSet<usize>) -> Result<PartialBijection> {
        let pairs: Vec<_> = subset.iter().map(|&x| (x, x)).collect();
        PartialBijection::new(n, &pairs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        x.checked_sub(1).and_then(|i| self.map.get(i).copied().flatten())
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.map.iter().enumerate().filter_map(|(i, y)| y.map(|y| (i + 1, y))).collect()
    }

    pub fn domain(&self) -> BTreeSet<usize> {
        self.pairs().into_iter().map(|p| p.0).collect()
    }

    pub fn image(&self) -> BTreeSet<usize> {
        self.pairs().into_iter().map(|p| p.1).collect()
    }

    pub fn rank(&self) -> usize {
        self.map.iter().flatten().count()
    }

    /// `self` followed by `other`, defined where both steps are.
    pub fn then(&self, other: &PartialBijection) -> Result<PartialBijection> {
        if self.n != other.n {
            return Err(Error::SizeMismatch { left: self.n, right: other.n });
        }
        let map = self.map.iter().map(|y| y.and_then(|y| other.map[y - 1])).collect();
        Ok(PartialBijection { n: self.n, map })
    }

    pub fn inverse(&self) -> PartialBijection {
        let mut map = vec![None; self.n];
        for (x, y) in self.pairs() {
            map[y - 1] = Some(x);
        }
        PartialBijection { n: self.n, map }
    }

    pub fn is_idempotent(&self) -> bool {
        self.pairs().iter().all(|(x, y)| x == y)
    }

    /// Restriction order: `self` agrees with `other` wherever `self` is defined.
    pub fn restricts(&self, other: &PartialBijection) -> bool {
        self.n == other.n && self.pairs().iter().all(|&(x, y)| other.apply(x) == Some(y))
    }

    /// The graph `{(x, σ(x))}` over the points `1..=n`.
    pub fn graph(&self) -> Result<SupportMask> {
        let pts: Arc<[Point]> = (1..=self.n as i64).map(Point).collect();
        SupportMask::from_pairs(pts, self.pairs().into_iter().map(|(x, y)| (Point(x as i64), Point(y as i64))))
    }

    /// Reads a graph back; the mask must be over `1..=n` and be injective.
    pub fn from_mask(mask: &SupportMask) -> Result<PartialBijection> {
        let n = mask.len();
        if mask.points().iter().zip(1..).any(|(p, i)| p.0 != i) {
            return Err(Error::Shape("mask points must be 1..=n in order".into()));
        }
        let pairs: Vec<_> = mask.iter().map(|(x, y)| (x.0 as usize, y.0 as usize)).collect();
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidParameter(format!("{} is sent to two points", w[0].0)));
        }
        PartialBijection::new(n, &pairs)
    }
}

impl fmt::Display for PartialBijection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs().iter().map(|(x, y)| format!("{x}→{y}")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for PartialBijection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            n: usize,
            pairs: Vec<(usize, usize)>,
        }
        Repr { n: self.n, pairs: self.pairs() }.serialize(s)
    }
}

pub fn pb_compose(sigma: &PartialBijection, tau: &PartialBijection) -> Result<PartialBijection> {
    sigma.then(tau)
}

pub fn pb_inverse(sigma: &PartialBijection) -> PartialBijection {
    sigma.inverse()
}

/// Every partial bijection of `{1..n}`, for `n ≤` [`DEFAULT_ENUMERATION_BOUND`].
pub fn pb_enumerate(n: usize) -> Result<Vec<PartialBijection>> {
    pb_enumerate_bounded(n, DEFAULT_ENUMERATION_BOUND)
}

/// Ordered by rank, then lexicographically by images.
pub fn pb_enumerate_bounded(n: usize, bound: usize) -> Result<Vec<PartialBijection>> {
    if n > bound {
        return Err(Error::BoundExceeded { n, bound });
    }
    let mut out = Vec::new();
    let mut map = vec![None; n];
    let mut used = vec![false; n];
    fn go(i: usize, map: &mut Vec<Option<usize>>, used: &mut Vec<bool>, out: &mut Vec<PartialBijection>) {
        let n = map.len();
        if i == n {
            out.push(PartialBijection { n, map: map.clone() });
            return;
        }
        map[i] = None;
        go(i + 1, map, used, out);
        for y in 0..n {
            if !used[y] {
                used[y] = true;
                map[i] = Some(y + 1);
                go(i + 1, map, used, out);
                used[y] = false;
            }
        }
        map[i] = None;
    }
    go(0, &mut map, &mut used, &mut out);
    out.sort_by(|a, b| (a.rank(), &a.map).cmp(&(b.rank(), &b.map)));
    Ok(out)
}

/// The graph of `σ` and whether it reads back to `σ`.
#[derive(Clone, Debug)]
pub struct Correspondence {
    pub mask: SupportMask,
    pub round_trip: bool,
}

pub fn pb_support_correspondence(sigma: &PartialBijection) -> Result<Correspondence> {
    let mask = sigma.graph()?;
    let round_trip = PartialBijection::from_mask(&mask)? == *sigma;
    Ok(Correspondence { mask, round_trip })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roe::{mask_compose, mask_transpose};

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    fn count_oracle(n: usize) -> usize {
        (0..=n).map(|k| binom(n, k).pow(2) * (1..=k).product::<usize>()).sum()
    }

    #[test]
    fn counts() {
        for n in 0..=5 {
            let all = pb_enumerate(n).unwrap();
            assert_eq!(all.len(), count_oracle(n));
            assert_eq!(all.iter().filter(|s| s.then(s).unwrap() == **s).count(), 1 << n);
            assert!(all.iter().filter(|s| s.is_idempotent()).all(|s| s.then(s).unwrap() == *s));
        }
        assert_eq!([2, 3, 4].map(|n| pb_enumerate(n).unwrap().len()), [7, 34, 209]);
        assert_eq!(pb_enumerate(6).unwrap_err(), Error::BoundExceeded { n: 6, bound: 5 });
    }

    #[test]
    fn regular_and_units() {
        for n in 0..=4 {
            let id = PartialBijection::identity(n);
            let zero = PartialBijection::empty(n);
            for s in pb_enumerate(n).unwrap() {
                assert_eq!(s.then(&s.inverse()).unwrap().then(&s).unwrap(), s);
                assert_eq!(id.then(&s).unwrap(), s);
                assert_eq!(s.then(&id).unwrap(), s);
                assert_eq!(zero.then(&s).unwrap(), zero);
                assert_eq!(s.then(&zero).unwrap(), zero);
            }
        }
    }

    #[test]
    fn construction_errors() {
        assert_eq!(PartialBijection::new(3, &[(1, 2), (3, 2)]).unwrap_err(), Error::NotInjective(2));
        assert!(PartialBijection::new(3, &[(1, 4)]).is_err());
        assert!(PartialBijection::new(3, &[(1, 2), (1, 3)]).is_err());
        let a = PartialBijection::identity(2);
        assert_eq!(a.then(&PartialBijection::identity(3)).unwrap_err(), Error::SizeMismatch { left: 2, right: 3 });
    }

    #[test]
    fn graph_is_a_homomorphism() {
        let all = pb_enumerate(3).unwrap();
        for s in &all {
            let c = pb_support_correspondence(s).unwrap();
            assert!(c.round_trip);
            assert_eq!(mask_transpose(&c.mask), s.inverse().graph().unwrap());
            for t in &all {
                let composed = mask_compose(&c.mask, &t.graph().unwrap()).unwrap();
                assert_eq!(composed, s.then(t).unwrap().graph().unwrap());
            }
        }
        let sub = PartialBijection::identity_on(3, &BTreeSet::from([1, 3])).unwrap();
        assert_eq!(sub.graph().unwrap().sorted_pairs(), vec![(Point(1), Point(1)), (Point(3), Point(3))]);
    }

    #[test]
    fn graph_is_injective() {
        let all = pb_enumerate(3).unwrap();
        let graphs: BTreeSet<Vec<(Point, Point)>> = all.iter().map(|s| s.graph().unwrap().sorted_pairs()).collect();
        assert_eq!(graphs.len(), all.len());
    }
}
