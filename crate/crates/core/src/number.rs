//! Exact distance arithmetic.
//!
//! Every distance in the workbench is a rational number. Dense tables are held
//! as [`Grid`]s: integer numerators over one shared positive denominator, so
//! the cubic kernels (min-plus products, triangle scans) run on machine
//! integers while staying exact.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest magnitude a scaled numerator may take; sums of two stay in range.
const SCALED_LIMIT: i64 = 1 << 60;

/// An exact nonnegative-or-signed rational distance value.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Dist(Ratio<i64>);

impl Dist {
    pub const ZERO: Dist = Dist(Ratio::new_raw(0, 1));
    pub const ONE: Dist = Dist(Ratio::new_raw(1, 1));

    pub fn new(numer: i64, denom: i64) -> Result<Dist> {
        if denom == 0 {
            return Err(Error::ZeroDenominator);
        }
        Ok(Dist(Ratio::new(numer, denom)))
    }

    pub fn int(v: i64) -> Dist {
        Dist(Ratio::from_integer(v))
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Dist {
        Dist(self.0.abs())
    }

    /// Smallest integer not below the value.
    pub fn ceil(&self) -> i64 {
        *self.0.ceil().numer()
    }

    pub fn checked_add(&self, other: &Dist) -> Result<Dist> {
        self.0.checked_add(&other.0).map(Dist).ok_or(Error::Overflow)
    }

    pub fn checked_sub(&self, other: &Dist) -> Result<Dist> {
        self.0.checked_sub(&other.0).map(Dist).ok_or(Error::Overflow)
    }

    pub fn checked_mul(&self, other: &Dist) -> Result<Dist> {
        self.0.checked_mul(&other.0).map(Dist).ok_or(Error::Overflow)
    }

    /// Exact square root when the value is the square of a rational.
    pub fn exact_sqrt(&self) -> Option<Dist> {
        if self.is_negative() {
            return None;
        }
        let n = exact_isqrt(self.numer())?;
        let d = exact_isqrt(self.denom())?;
        Some(Dist(Ratio::new(n, d)))
    }
}

fn exact_isqrt(v: i64) -> Option<i64> {
    let r = num_integer::Roots::sqrt(&v);
    (r * r == v).then_some(r)
}

impl From<i64> for Dist {
    fn from(v: i64) -> Self {
        Dist::int(v)
    }
}

impl From<Ratio<i64>> for Dist {
    fn from(v: Ratio<i64>) -> Self {
        Dist(v)
    }
}

impl Add for Dist {
    type Output = Dist;
    fn add(self, rhs: Dist) -> Dist {
        self.checked_add(&rhs).expect("distance arithmetic overflow")
    }
}

impl Sub for Dist {
    type Output = Dist;
    fn sub(self, rhs: Dist) -> Dist {
        self.checked_sub(&rhs).expect("distance arithmetic overflow")
    }
}

impl Mul for Dist {
    type Output = Dist;
    fn mul(self, rhs: Dist) -> Dist {
        self.checked_mul(&rhs).expect("distance arithmetic overflow")
    }
}

impl Neg for Dist {
    type Output = Dist;
    fn neg(self) -> Dist {
        Dist(-self.0)
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Dist {
    type Err = Error;

    /// Accepts `"n"`, `"-n"` and `"p/q"`.
    fn from_str(s: &str) -> Result<Dist> {
        let bad = || Error::BadRational(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| bad())?;
                let q: i64 = q.trim().parse().map_err(|_| bad())?;
                Dist::new(p, q).map_err(|_| bad())
            }
            None => s.parse::<i64>().map(Dist::int).map_err(|_| bad()),
        }
    }
}

impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Dist, D::Error> {
        struct Visitor;

        impl serde::de::Visitor<'_> for Visitor {
            type Value = Dist;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or a rational string \"p/q\"")
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<Dist, E> {
                Ok(Dist::int(v))
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Dist, E> {
                i64::try_from(v).map(Dist::int).map_err(|_| E::custom("integer out of range"))
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<Dist, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(Visitor)
    }
}

/// A dense `rows × cols` matrix of rationals sharing one denominator.
///
/// The representation is canonical (the denominator is as small as possible),
/// so derived equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    rows: usize,
    cols: usize,
    denom: i64,
    data: Vec<i64>,
}

impl Grid {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Dist) -> Result<Grid> {
        let mut values = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                values.push(f(r, c));
            }
        }
        Grid::from_values(rows, cols, &values)
    }

    pub fn try_from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Result<Dist>) -> Result<Grid> {
        let mut values = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                values.push(f(r, c)?);
            }
        }
        Grid::from_values(rows, cols, &values)
    }

    pub fn from_values(rows: usize, cols: usize, values: &[Dist]) -> Result<Grid> {
        assert_eq!(values.len(), rows * cols, "grid shape mismatch");
        let mut denom: i64 = 1;
        for v in values {
            denom = checked_lcm(denom, v.denom())?;
        }
        let data = values
            .iter()
            .map(|v| {
                let scaled = v.numer().checked_mul(denom / v.denom()).ok_or(Error::Overflow)?;
                check_scaled(scaled)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Grid { rows, cols, denom, data }.normalized())
    }

    /// Builds a grid directly from scaled numerators.
    pub(crate) fn from_raw(rows: usize, cols: usize, denom: i64, data: Vec<i64>) -> Result<Grid> {
        assert_eq!(data.len(), rows * cols, "grid shape mismatch");
        assert!(denom > 0);
        for &v in &data {
            check_scaled(v)?;
        }
        Ok(Grid { rows, cols, denom, data }.normalized())
    }

    fn normalized(mut self) -> Grid {
        let mut g = self.denom;
        for &v in &self.data {
            if g == 1 {
                break;
            }
            g = g.gcd(&v);
        }
        if g > 1 {
            self.denom /= g;
            for v in &mut self.data {
                *v /= g;
            }
        }
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    pub fn get(&self, r: usize, c: usize) -> Dist {
        Dist(Ratio::new(self.raw(r, c), self.denom))
    }

    #[inline]
    pub(crate) fn raw(&self, r: usize, c: usize) -> i64 {
        self.data[r * self.cols + c]
    }

    pub(crate) fn raw_row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// The same values over a multiple of the current denominator.
    pub(crate) fn raw_over(&self, denom: i64) -> Result<Vec<i64>> {
        if denom % self.denom != 0 {
            return Err(Error::Overflow);
        }
        let k = denom / self.denom;
        self.data.iter().map(|&v| v.checked_mul(k).ok_or(Error::Overflow).and_then(check_scaled)).collect()
    }

    pub fn transpose(&self) -> Grid {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.raw(r, c));
            }
        }
        Grid { rows: self.cols, cols: self.rows, denom: self.denom, data }
    }

    /// The leading `rows × cols` block.
    pub fn prefix(&self, rows: usize, cols: usize) -> Grid {
        assert!(rows <= self.rows && cols <= self.cols);
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            data.extend_from_slice(&self.raw_row(r)[..cols]);
        }
        Grid { rows, cols, denom: self.denom, data }.normalized()
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Grid {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                data.push(self.raw(r, c));
            }
        }
        Grid { rows: rows.len(), cols: cols.len(), denom: self.denom, data }.normalized()
    }

    pub fn add_scalar(&self, k: Dist) -> Result<Grid> {
        let denom = checked_lcm(self.denom, k.denom())?;
        let mut data = self.raw_over(denom)?;
        let shift = k.numer().checked_mul(denom / k.denom()).ok_or(Error::Overflow)?;
        for v in &mut data {
            *v = check_scaled(v.checked_add(shift).ok_or(Error::Overflow)?)?;
        }
        Grid::from_raw(self.rows, self.cols, denom, data)
    }

    pub fn min_value(&self) -> Option<Dist> {
        self.data.iter().min().map(|&v| Dist(Ratio::new(v, self.denom)))
    }

    pub fn max_value(&self) -> Option<Dist> {
        self.data.iter().max().map(|&v| Dist(Ratio::new(v, self.denom)))
    }

    pub fn values(&self) -> impl Iterator<Item = Dist> + '_ {
        self.data.iter().map(|&v| Dist(Ratio::new(v, self.denom)))
    }

    /// Raw numerators of two grids over their common denominator.
    pub(crate) fn align(a: &Grid, b: &Grid) -> Result<(i64, Vec<i64>, Vec<i64>)> {
        let denom = checked_lcm(a.denom, b.denom)?;
        Ok((denom, a.raw_over(denom)?, b.raw_over(denom)?))
    }

    pub(crate) fn align_many(grids: &[&Grid]) -> Result<(i64, Vec<Vec<i64>>)> {
        let mut denom = 1;
        for g in grids {
            denom = checked_lcm(denom, g.denom)?;
        }
        let raws = grids.iter().map(|g| g.raw_over(denom)).collect::<Result<Vec<_>>>()?;
        Ok((denom, raws))
    }
}

pub(crate) fn checked_lcm(a: i64, b: i64) -> Result<i64> {
    let g = a.gcd(&b);
    (a / g).checked_mul(b).ok_or(Error::Overflow).and_then(check_scaled)
}

fn check_scaled(v: i64) -> Result<i64> {
    if v.abs() > SCALED_LIMIT {
        Err(Error::Overflow)
    } else {
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prints() {
        let d: Dist = "6/4".parse().unwrap();
        assert_eq!(d.to_string(), "3/2");
        assert_eq!("-7".parse::<Dist>().unwrap(), Dist::int(-7));
        assert!("1/0".parse::<Dist>().is_err());
        assert!("x".parse::<Dist>().is_err());
    }

    #[test]
    fn json_accepts_integers_and_strings() {
        let v: Vec<Dist> = serde_json::from_str(r#"[3, "1/3", "-2"]"#).unwrap();
        assert_eq!(v, vec![Dist::int(3), Dist::new(1, 3).unwrap(), Dist::int(-2)]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["3","1/3","-2"]"#);
    }

    #[test]
    fn grid_is_canonical() {
        let a = Grid::from_values(1, 2, &[Dist::new(1, 2).unwrap(), Dist::int(1)]).unwrap();
        let b = Grid::from_values(1, 2, &[Dist::new(2, 4).unwrap(), Dist::new(3, 3).unwrap()]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.denom(), 2);
        let c = a.add_scalar(Dist::new(1, 2).unwrap()).unwrap();
        assert_eq!(c.denom(), 2);
        assert_eq!(c.get(0, 0), Dist::int(1));
        assert_eq!(c.prefix(1, 1).denom(), 1);
    }

    #[test]
    fn exact_sqrt_of_squares() {
        assert_eq!(Dist::new(9, 4).unwrap().exact_sqrt(), Some(Dist::new(3, 2).unwrap()));
        assert_eq!(Dist::int(2).exact_sqrt(), None);
    }
}
