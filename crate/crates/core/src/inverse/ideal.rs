use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::Point;
use crate::roe::{compose, BandOperator};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdealProduct {
    pub product: BTreeSet<usize>,
    /// Whether the span of products of diagonal matrix units from both
    /// ideals, taken in either order, is exactly the ideal of `product`.
    pub verified: bool,
}

/// Product of the ideals of `ℂⁿ` supported on `p` and `q`.
pub fn ideal_product(n: usize, p: &BTreeSet<usize>, q: &BTreeSet<usize>) -> Result<IdealProduct> {
    if let Some(&v) = p.iter().chain(q).find(|&&v| v == 0 || v > n) {
        return Err(Error::InvalidParameter(format!("{v} is outside 1..={n}")));
    }
    let product: BTreeSet<usize> = p.intersection(q).copied().collect();
    let verified = span_support(n, p, q)? == product && span_support(n, q, p)? == product;
    Ok(IdealProduct { product, verified })
}

/// Diagonal positions reached by the span of `{ab : a ∈ I_p, b ∈ I_q}`,
/// using the basis `e_{i,i}` of each ideal.
fn span_support(n: usize, p: &BTreeSet<usize>, q: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
    let pts: Arc<[Point]> = (1..=n as i64).map(Point).collect();
    let unit = |i: usize| BandOperator::elementary(pts.clone(), pts.clone(), Point(i as i64), Point(i as i64));
    let mut out = BTreeSet::new();
    for &i in p {
        for &j in q {
            let ab = compose(&unit(i)?, &unit(j)?)?;
            for (x, y) in ab.support() {
                if x != y {
                    return Err(Error::Shape("product of diagonal units left the diagonal".into()));
                }
                out.insert(x.0 as usize);
            }
        }
    }
    Ok(out)
}
