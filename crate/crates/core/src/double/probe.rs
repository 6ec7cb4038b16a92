use serde::Serialize;

use super::compare::{compare_doubles, Site};
use super::metric::same_base;
use super::DoubleMetric;
use crate::error::{Error, Result};
use crate::metric::{CoarseConfig, CoarseVerdict, VerdictTag};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    /// `(a∘b)∘c = a∘(b∘c)` exactly on the top level.
    Associativity,
    /// `d∘d*∘d ~ d` and `d*∘d∘d* ~ d*` with `d* = flip(d)`.
    Regularity,
    /// `e∘f ~ f∘e` for catalog entries that are idempotent up to equivalence.
    IdempotentCommutation,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeCase {
    /// Catalog indices involved.
    pub instance: Vec<usize>,
    pub description: String,
    pub status: CaseStatus,
    /// Number of differing entries, for exact checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatches: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<CoarseVerdict<Site>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub law: Law,
    /// Catalog indices found idempotent; only filled for idempotent commutation.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub idempotents: Vec<usize>,
    pub cases: Vec<ProbeCase>,
}

impl ProbeReport {
    pub fn count(&self, status: CaseStatus) -> usize {
        self.cases.iter().filter(|c| c.status == status).count()
    }

    pub fn all_pass(&self) -> bool {
        self.cases.iter().all(|c| c.status == CaseStatus::Pass)
    }
}

fn status_of(v: &CoarseVerdict<Site>) -> CaseStatus {
    match v.tag {
        VerdictTag::Equivalent => CaseStatus::Pass,
        VerdictTag::NotEquivalent => CaseStatus::Fail,
        VerdictTag::Inconclusive => CaseStatus::Inconclusive,
    }
}

fn verdict_case(instance: Vec<usize>, description: String, v: CoarseVerdict<Site>) -> ProbeCase {
    ProbeCase { instance, description, status: status_of(&v), mismatches: None, verdict: Some(v) }
}

/// Exercises one semigroup law on every applicable tuple of catalog entries.
pub fn semigroup_probe(catalog: &[DoubleMetric], law: Law, config: &CoarseConfig) -> Result<ProbeReport> {
    if let Some(first) = catalog.first() {
        if catalog.iter().any(|d| !same_base(first.base(), d.base())) {
            return Err(Error::BaseMismatch);
        }
    }
    let mut report = ProbeReport { law, idempotents: Vec::new(), cases: Vec::new() };
    let name = |i: usize| format!("d{i}");
    match law {
        Law::Associativity => {
            let k = catalog.len();
            for a in 0..k {
                for b in 0..k {
                    for c in 0..k {
                        let (da, db, dc) = (&catalog[a], &catalog[b], &catalog[c]);
                        let top = da.base().top();
                        let lhs = da.concat(db)?.concat(dc)?.cross_table(top)?;
                        let rhs = da.concat(&db.concat(dc)?)?.cross_table(top)?;
                        let mismatches = lhs.grid.values().zip(rhs.grid.values()).filter(|(x, y)| x != y).count();
                        report.cases.push(ProbeCase {
                            instance: vec![a, b, c],
                            description: format!(
                                "({}∘{})∘{} = {}∘({}∘{})",
                                name(a),
                                name(b),
                                name(c),
                                name(a),
                                name(b),
                                name(c)
                            ),
                            status: if mismatches == 0 { CaseStatus::Pass } else { CaseStatus::Fail },
                            mismatches: Some(mismatches),
                            verdict: None,
                        });
                    }
                }
            }
        }
        Law::Regularity => {
            for (i, d) in catalog.iter().enumerate() {
                let f = d.flip();
                let v = compare_doubles(&d.concat(&f)?.concat(d)?, d, config)?;
                report.cases.push(verdict_case(vec![i], format!("{0}∘{0}*∘{0} ~ {0}", name(i)), v));
                let v = compare_doubles(&f.concat(d)?.concat(&f)?, &f, config)?;
                report.cases.push(verdict_case(vec![i], format!("{0}*∘{0}∘{0}* ~ {0}*", name(i)), v));
            }
        }
        Law::IdempotentCommutation => {
            for (i, d) in catalog.iter().enumerate() {
                let v = compare_doubles(&d.concat(d)?, d, config)?;
                if v.tag == VerdictTag::Equivalent {
                    report.idempotents.push(i);
                }
            }
            let ids = report.idempotents.clone();
            for (p, &i) in ids.iter().enumerate() {
                for &j in &ids[p + 1..] {
                    let (e, f) = (&catalog[i], &catalog[j]);
                    let v = compare_doubles(&e.concat(f)?, &f.concat(e)?, config)?;
                    report.cases.push(verdict_case(
                        vec![i, j],
                        format!("{}∘{} ~ {}∘{}", name(i), name(j), name(j), name(i)),
                        v,
                    ));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::double::{NestedFamily, Region};
    use crate::metric::{MetricTower, Point};
    use crate::number::Dist;

    fn catalog() -> Vec<DoubleMetric> {
        let base = Arc::new(MetricTower::integers(&[4, 8, 12, 16, 20]).unwrap());
        vec![
            DoubleMetric::unit(base.clone()),
            DoubleMetric::zero(base.clone(), Point(0)).unwrap(),
            DoubleMetric::from_family(base.clone(), NestedFamily::balls(Point(0))).unwrap(),
            DoubleMetric::from_family(base, NestedFamily::neighborhoods(Region::AtLeast(0), Dist::ZERO, Dist::ONE))
                .unwrap(),
        ]
    }

    #[test]
    fn associativity_is_exact() {
        let r = semigroup_probe(&catalog()[..3], Law::Associativity, &CoarseConfig::default()).unwrap();
        assert_eq!(r.cases.len(), 27);
        assert!(r.all_pass());
    }

    #[test]
    fn unit_is_regular() {
        let r = semigroup_probe(&catalog()[..1], Law::Regularity, &CoarseConfig::default()).unwrap();
        assert!(r.all_pass(), "{r:?}");
    }

    #[test]
    fn family_idempotents_commute() {
        let r = semigroup_probe(&catalog(), Law::IdempotentCommutation, &CoarseConfig::default()).unwrap();
        assert_eq!(r.idempotents, vec![0, 1, 2, 3]);
        assert_eq!(r.cases.len(), 6);
        assert!(r.all_pass(), "{:?}", r.cases.iter().map(|c| (&c.description, c.status)).collect::<Vec<_>>());
    }
}
