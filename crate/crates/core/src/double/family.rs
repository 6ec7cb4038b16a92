use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{MetricTower, Point};
use crate::number::Dist;

/// A subset of the base space described without listing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    Points(Vec<Point>),
    Whole,
    /// Points with id `≥ t`.
    AtLeast(i64),
    /// Points with id `≤ t`.
    AtMost(i64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyRule {
    /// `A_1, A_2, …` listed explicitly.
    Explicit(Vec<Vec<Point>>),
    /// `A_n = S` for every `n`.
    Constant(Vec<Point>),
    /// `A_n = N_{offset + growth·(n-1)}(core)`.
    Neighborhoods { core: Region, offset: Dist, growth: Dist },
}

/// An increasing sequence of subsets `A_1 ⊆ A_2 ⊆ …` of the base points.
///
/// The family is stored through its rank function `m(z) = min { n : z ∈ A_n }`,
/// so `A_n = { z : m(z) ≤ n }` and nesting is automatic for rule-based
/// families. Sets are intersected with the top level of the base tower.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NestedFamily {
    pub rule: FamilyRule,
    /// Only `A_1..A_depth` are materialized; unbounded when `None`.
    pub depth: Option<usize>,
}

impl NestedFamily {
    pub fn explicit(sets: Vec<Vec<Point>>) -> NestedFamily {
        NestedFamily { rule: FamilyRule::Explicit(sets), depth: None }
    }

    pub fn constant(points: Vec<Point>) -> NestedFamily {
        NestedFamily { rule: FamilyRule::Constant(points), depth: None }
    }

    pub fn neighborhoods(core: Region, offset: Dist, growth: Dist) -> NestedFamily {
        NestedFamily { rule: FamilyRule::Neighborhoods { core, offset, growth }, depth: None }
    }

    /// `A_n = X` for every `n`.
    pub fn whole() -> NestedFamily {
        NestedFamily::neighborhoods(Region::Whole, Dist::ZERO, Dist::ONE)
    }

    /// `A_n` = closed ball of radius `n` around `center`.
    pub fn balls(center: Point) -> NestedFamily {
        NestedFamily::neighborhoods(Region::Points(vec![center]), Dist::ONE, Dist::ONE)
    }

    pub fn with_depth(mut self, depth: usize) -> NestedFamily {
        self.depth = Some(depth);
        self
    }

    fn effective_depth(&self) -> Option<usize> {
        match (&self.rule, self.depth) {
            (FamilyRule::Explicit(sets), Some(d)) => Some(d.min(sets.len())),
            (FamilyRule::Explicit(sets), None) => Some(sets.len()),
            (_, d) => d,
        }
    }

    /// Rank `m(z)` of every top-level point of `base`, `None` outside all materialized sets.
    pub fn ranks(&self, base: &MetricTower) -> Result<Vec<Option<u64>>> {
        let pts = base.points();
        let mut ranks: Vec<Option<u64>> = vec![None; pts.len()];
        match &self.rule {
            FamilyRule::Explicit(sets) => {
                for (n, set) in sets.iter().enumerate() {
                    for &p in set {
                        let i = base.index_of(p)?;
                        let r = n as u64 + 1;
                        ranks[i] = Some(ranks[i].map_or(r, |old| old.min(r)));
                    }
                }
            }
            FamilyRule::Constant(set) => {
                for &p in set {
                    ranks[base.index_of(p)?] = Some(1);
                }
            }
            FamilyRule::Neighborhoods { core, offset, growth } => {
                if !growth.is_positive() || offset.is_negative() {
                    return Err(Error::InvalidParameter("neighborhood family needs growth > 0 and offset ≥ 0".into()));
                }
                let core_idx: Vec<usize> = match core {
                    Region::Points(ps) => ps.iter().map(|&p| base.index_of(p)).collect::<Result<_>>()?,
                    Region::Whole => (0..pts.len()).collect(),
                    Region::AtLeast(t) => (0..pts.len()).filter(|&i| pts[i].0 >= *t).collect(),
                    Region::AtMost(t) => (0..pts.len()).filter(|&i| pts[i].0 <= *t).collect(),
                };
                let table = base.table(base.top())?;
                for (z, rank) in ranks.iter_mut().enumerate() {
                    let Some(r) = core_idx.iter().map(|&c| table.get(z, c)).min() else {
                        continue;
                    };
                    let excess = r.checked_sub(offset)?;
                    let steps =
                        if excess.is_positive() { Dist::from(excess.ratio() / growth.ratio()).ceil() } else { 0 };
                    *rank = Some(1 + steps as u64);
                }
            }
        }
        if let Some(d) = self.effective_depth() {
            for r in &mut ranks {
                if r.is_some_and(|v| v > d as u64) {
                    *r = None;
                }
            }
        }
        Ok(ranks)
    }

    /// `A_n` intersected with the top level, sorted by id.
    pub fn set(&self, base: &MetricTower, n: usize) -> Result<Vec<Point>> {
        let ranks = self.ranks(base)?;
        let mut out: Vec<Point> = base
            .points()
            .iter()
            .zip(&ranks)
            .filter(|(_, r)| r.is_some_and(|v| v <= n as u64))
            .map(|(&p, _)| p)
            .collect();
        out.sort();
        Ok(out)
    }

    /// Checks `A_n ⊆ A_{n+1}` and `N_1(A_n) ⊆ A_{n+1}` for every materialized `n`.
    pub fn validate(&self, base: &MetricTower) -> Result<()> {
        if let FamilyRule::Explicit(sets) = &self.rule {
            for (n, w) in sets.windows(2).enumerate() {
                let next: BTreeSet<Point> = w[1].iter().copied().collect();
                if !w[0].iter().all(|p| next.contains(p)) {
                    return Err(Error::FamilyNotNested { n: n + 1 });
                }
            }
        }
        let ranks = self.ranks(base)?;
        let depth = self.effective_depth();
        let table = base.table(base.top())?;
        let pts = base.points();
        for z in 0..pts.len() {
            let Some(n) = ranks[z] else { continue };
            if depth.is_some_and(|d| n >= d as u64) {
                continue;
            }
            for w in 0..pts.len() {
                if table.get(z, w) <= Dist::ONE && ranks[w].is_none_or(|m| m > n + 1) {
                    return Err(Error::NeighborhoodCondition { n: n as usize, point: pts[w], near: pts[z] });
                }
            }
        }
        Ok(())
    }
}
