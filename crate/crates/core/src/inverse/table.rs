use std::collections::HashMap;
use std::fmt::Display;
use std::hash::Hash;

use serde::Serialize;

use super::pbij::PartialBijection;
use crate::error::{Error, Result};

/// A finite magma given by its full multiplication table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MulTable {
    pub elements: Vec<String>,
    /// `product[a][b]` is the index of `a·b`.
    pub product: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularReport {
    pub regular: bool,
    /// First element with no `t` such that `sts = s` and `tst = t`.
    pub irregular: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InverseReport {
    pub inverse: bool,
    pub regular: bool,
    pub irregular: Option<usize>,
    /// First pair of idempotents with `ef ≠ fe`.
    pub non_commuting: Option<(usize, usize)>,
}

impl MulTable {
    pub fn new(elements: Vec<String>, product: Vec<Vec<usize>>) -> Result<MulTable> {
        let n = elements.len();
        if product.len() != n || product.iter().any(|r| r.len() != n) {
            return Err(Error::Shape(format!("product table must be {n}×{n}")));
        }
        if product.iter().flatten().any(|&v| v >= n) {
            return Err(Error::NotClosed);
        }
        Ok(MulTable { elements, product })
    }

    /// The table of `op` on `elements`; every product must be in the list.
    pub fn generate<T: Eq + Hash + Clone + Display>(
        elements: &[T],
        op: impl Fn(&T, &T) -> Result<T>,
    ) -> Result<MulTable> {
        let index: HashMap<&T, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut product = Vec::with_capacity(elements.len());
        for a in elements {
            let mut row = Vec::with_capacity(elements.len());
            for b in elements {
                row.push(*index.get(&op(a, b)?).ok_or(Error::NotClosed)?);
            }
            product.push(row);
        }
        Ok(MulTable { elements: elements.iter().map(|e| e.to_string()).collect(), product })
    }

    /// Symmetric inverse monoid on `{1..n}` with left-to-right composition.
    pub fn partial_bijections(n: usize) -> Result<(Vec<PartialBijection>, MulTable)> {
        let all = super::pb_enumerate(n)?;
        let table = MulTable::generate(&all, |a, b| a.then(b))?;
        Ok((all, table))
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.product[a][b]
    }

    pub fn idempotents(&self) -> Vec<usize> {
        (0..self.len()).filter(|&e| self.mul(e, e) == e).collect()
    }

    pub fn check_associative(&self) -> Result<()> {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::NonAssociative { a, b, c });
                    }
                }
            }
        }
        Ok(())
    }

    /// Every `t` with `sts = s` and `tst = t`.
    pub fn pseudoinverses(&self, s: usize) -> Vec<usize> {
        (0..self.len()).filter(|&t| self.mul(self.mul(s, t), s) == s && self.mul(self.mul(t, s), t) == t).collect()
    }

    pub fn check_regular(&self) -> Result<RegularReport> {
        self.check_associative()?;
        Ok(self.regular_unchecked())
    }

    fn regular_unchecked(&self) -> RegularReport {
        let irregular = (0..self.len())
            .find(|&s| !(0..self.len()).any(|t| self.mul(self.mul(s, t), s) == s && self.mul(self.mul(t, s), t) == t));
        RegularReport { regular: irregular.is_none(), irregular }
    }

    /// Regular with commuting idempotents.
    pub fn check_inverse(&self) -> Result<InverseReport> {
        self.check_associative()?;
        let reg = self.regular_unchecked();
        let ids = self.idempotents();
        let mut non_commuting = None;
        'outer: for (i, &e) in ids.iter().enumerate() {
            for &f in &ids[i + 1..] {
                if self.mul(e, f) != self.mul(f, e) {
                    non_commuting = Some((e, f));
                    break 'outer;
                }
            }
        }
        Ok(InverseReport {
            inverse: reg.regular && non_commuting.is_none(),
            regular: reg.regular,
            irregular: reg.irregular,
            non_commuting,
        })
    }
}

/// A table known to be an inverse semigroup.
#[derive(Clone, Debug)]
pub struct InverseSemigroup {
    table: MulTable,
    inverses: Vec<usize>,
    idempotents: Vec<usize>,
}

impl InverseSemigroup {
    pub fn new(table: MulTable) -> Result<InverseSemigroup> {
        let report = table.check_inverse()?;
        if let Some(s) = report.irregular {
            return Err(Error::NotInverse(format!("{} has no pseudoinverse", table.elements[s])));
        }
        if let Some((e, f)) = report.non_commuting {
            return Err(Error::NotInverse(format!(
                "idempotents {} and {} do not commute",
                table.elements[e], table.elements[f]
            )));
        }
        let mut inverses = Vec::with_capacity(table.len());
        for s in 0..table.len() {
            let p = table.pseudoinverses(s);
            if p.len() != 1 {
                return Err(Error::NotInverse(format!("{} has {} pseudoinverses", table.elements[s], p.len())));
            }
            inverses.push(p[0]);
        }
        let idempotents = table.idempotents();
        Ok(InverseSemigroup { table, inverses, idempotents })
    }

    pub fn table(&self) -> &MulTable {
        &self.table
    }

    pub fn inverse(&self, s: usize) -> usize {
        self.inverses[s]
    }

    pub fn idempotents(&self) -> &[usize] {
        &self.idempotents
    }

    /// `s ≤ t` iff `s = t·e` for some idempotent `e`.
    pub fn natural_le(&self, s: usize, t: usize) -> bool {
        self.idempotents.iter().any(|&e| self.table.mul(t, e) == s)
    }
}

/// Natural partial order of two partial bijections: `σ = τ·e` with
/// `e` the identity on the image of `σ`.
pub fn pb_natural_le(sigma: &PartialBijection, tau: &PartialBijection) -> Result<bool> {
    let e = PartialBijection::identity_on(sigma.n(), &sigma.image())?;
    Ok(tau.then(&e)? == *sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    #[test]
    fn symmetric_inverse_monoid_is_inverse() {
        for n in 0..=3 {
            let (all, table) = MulTable::partial_bijections(n).unwrap();
            let r = table.check_inverse().unwrap();
            assert!(r.inverse, "n={n}: {r:?}");
            let sg = InverseSemigroup::new(table).unwrap();
            assert_eq!(sg.idempotents().len(), 1 << n);
            for (i, s) in all.iter().enumerate() {
                assert_eq!(all[sg.inverse(i)], s.inverse());
            }
            for (i, s) in all.iter().enumerate() {
                for (j, t) in all.iter().enumerate() {
                    let le = sg.natural_le(i, j);
                    assert_eq!(le, s.restricts(t));
                    assert_eq!(le, pb_natural_le(s, t).unwrap());
                }
            }
        }
    }

    #[test]
    fn idempotents_form_the_subset_lattice() {
        let (all, table) = MulTable::partial_bijections(3).unwrap();
        let sg = InverseSemigroup::new(table).unwrap();
        for &e in sg.idempotents() {
            for &f in sg.idempotents() {
                assert_eq!(sg.natural_le(e, f), all[e].domain().is_subset(&all[f].domain()));
                let meet = sg.table().mul(e, f);
                let expect: std::collections::BTreeSet<usize> =
                    all[e].domain().intersection(&all[f].domain()).copied().collect();
                assert_eq!(all[meet].domain(), expect);
            }
        }
    }

    #[test]
    fn incomparable_pair() {
        let a = PartialBijection::new(2, &[(1, 1)]).unwrap();
        let b = PartialBijection::new(2, &[(1, 2)]).unwrap();
        assert!(!pb_natural_le(&a, &b).unwrap() && !pb_natural_le(&b, &a).unwrap());
        let empty = PartialBijection::empty(2);
        assert!(pb_natural_le(&empty, &a).unwrap() && pb_natural_le(&empty, &b).unwrap());
    }

    #[test]
    fn left_zero_is_regular_not_inverse() {
        let t = MulTable::new(labels(2), vec![vec![0, 0], vec![1, 1]]).unwrap();
        let r = t.check_inverse().unwrap();
        assert!(r.regular && !r.inverse);
        assert_eq!(r.non_commuting, Some((0, 1)));
        assert!(matches!(InverseSemigroup::new(t), Err(Error::NotInverse(_))));
    }

    #[test]
    fn cyclic_group_is_inverse() {
        let n = 5;
        let t = MulTable::new(labels(n), (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()).unwrap();
        let sg = InverseSemigroup::new(t).unwrap();
        assert_eq!(sg.idempotents(), &[0]);
        assert_eq!(sg.inverse(2), 3);
    }

    #[test]
    fn non_associative_reported() {
        let t = MulTable::new(labels(2), vec![vec![1, 0], vec![0, 0]]).unwrap();
        assert!(matches!(t.check_regular(), Err(Error::NonAssociative { .. })));
        let quasigroup = MulTable::new(labels(3), vec![vec![0, 2, 1], vec![2, 1, 0], vec![1, 0, 2]]).unwrap();
        let err = quasigroup.check_inverse().unwrap_err();
        let Error::NonAssociative { a, b, c } = err else { panic!() };
        assert_ne!(quasigroup.mul(quasigroup.mul(a, b), c), quasigroup.mul(a, quasigroup.mul(b, c)));
    }

    #[test]
    fn shape_and_closure() {
        assert!(matches!(MulTable::new(labels(2), vec![vec![0]]), Err(Error::Shape(_))));
        assert_eq!(MulTable::new(labels(1), vec![vec![3]]).unwrap_err(), Error::NotClosed);
        let r = MulTable::generate(&[1u32, 2], |a, b| Ok(a * b));
        assert_eq!(r.unwrap_err(), Error::NotClosed);
    }
}
