use thiserror::Error;

use crate::metric::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("tower has no levels")]
    EmptyTower,
    #[error("level {level} is empty")]
    EmptyLevel { level: usize },
    #[error("level sizes must be nondecreasing (level {level})")]
    LevelsNotNested { level: usize },
    #[error("level {level} requested but tower has {levels} levels")]
    LevelOutOfRange { level: usize, levels: usize },
    #[error("unknown point {0}")]
    UnknownPoint(Point),
    #[error("duplicate point {0}")]
    DuplicatePoint(Point),
    #[error("metrics are defined on different point sets")]
    MismatchedPoints,
    #[error("doubles are defined over different base towers")]
    BaseMismatch,
    #[error("matrix shape mismatch: {0}")]
    Shape(String),
    #[error("nested family violates the 1-neighborhood condition: {point} is within distance 1 of A_{n} but not in A_{next}", next = n + 1)]
    NeighborhoodCondition { n: usize, point: Point, near: Point },
    #[error("nested family is not increasing: A_{n} is not contained in A_{next}", next = n + 1)]
    FamilyNotNested { n: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("repeated {side} index {point} in pair list")]
    RepeatedIndex { side: &'static str, point: Point },
    #[error("operands have sizes {left} and {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("n = {n} exceeds the enumeration bound {bound}")]
    BoundExceeded { n: usize, bound: usize },
    #[error("multiplication table is not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NonAssociative { a: usize, b: usize, c: usize },
    #[error("multiplication table is not closed under the operation")]
    NotClosed,
    #[error("not an inverse semigroup: {0}")]
    NotInverse(String),
    #[error("partial map is not injective: {0} is hit twice")]
    NotInjective(usize),
    #[error("rational with zero denominator")]
    ZeroDenominator,
    #[error("cannot parse rational {0:?}")]
    BadRational(String),
    #[error("exact arithmetic overflowed 64-bit range")]
    Overflow,
    #[error("invalid input at {}: {message}", if pointer.is_empty() { "/" } else { pointer.as_str() })]
    Schema { pointer: String, message: String },
}
