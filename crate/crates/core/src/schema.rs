//! JSON formats for spaces, doubles, operators, masks, partial bijections
//! and multiplication tables.
//!
//! Rationals are read from integers or `"p/q"` strings and always written
//! as strings. Parse failures carry the JSON pointer of the offending value.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::double::{Bridge, CrossTable, DoubleMetric, FamilyRule, NestedFamily, Region};
use crate::error::{Error, Result};
use crate::inverse::{MulTable, PartialBijection};
use crate::metric::{Generator, GeneratorKind, MetricTower, Point};
use crate::number::Dist;
use crate::roe::{BandOperator, Scalar, SupportMask};

/// Deserializes `text`, reporting failures with a JSON pointer.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(fold)
}

/// Like [`parse`], for a document already read into a JSON value.
pub fn from_value<T: DeserializeOwned>(value: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(fold)
}

fn fold<E: std::fmt::Display>(e: serde_path_to_error::Error<E>) -> Error {
    let outer = pointer(e.path());
    let message = e.into_inner().to_string();
    // Tagged and untagged enums buffer their input, so nested failures
    // arrive with their own pointer folded into the message.
    match message.split_once(NESTED) {
        Some((inner, rest)) => Error::Schema { pointer: format!("{outer}{inner}"), message: rest.to_string() },
        None => Error::Schema { pointer: outer, message },
    }
}

const NESTED: char = '\u{1f}';

/// Deserializes a buffered value, keeping the pointer of a failure inside it.
fn nested<T: DeserializeOwned, E: serde::de::Error>(value: serde_json::Value) -> std::result::Result<T, E> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = pointer(e.path());
        let message = e.into_inner().to_string();
        match message.split_once(NESTED) {
            Some((deeper, rest)) => E::custom(format!("{inner}{deeper}{NESTED}{rest}")),
            None => E::custom(format!("{inner}{NESTED}{message}")),
        }
    })
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => out.push_str(&format!("/{index}")),
            Segment::Map { key } => out.push_str(&format!("/{}", key.replace('~', "~0").replace('/', "~1"))),
            Segment::Enum { .. } | Segment::Unknown => {}
        }
    }
    out
}

/// Attaches a pointer to an error raised while building from a parsed spec.
fn at(pointer: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Schema { .. } => e,
        other => Error::Schema { pointer: pointer.to_string(), message: other.to_string() },
    }
}

fn schema(pointer: &str, message: impl Into<String>) -> Error {
    Error::Schema { pointer: pointer.to_string(), message: message.into() }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Dist>>>,
    /// Prefix lengths of `points` forming the levels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    #[serde(default)]
    pub params: GeneratorParams,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorParams {
    /// One radius (or size) per level.
    #[serde(default)]
    pub levels: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Dist>,
}

impl SpaceSpec {
    pub fn generator(name: &str, levels: Vec<u32>) -> SpaceSpec {
        SpaceSpec {
            generator: Some(GeneratorSpec {
                name: name.to_string(),
                params: GeneratorParams { levels, ..GeneratorParams::default() },
            }),
            ..SpaceSpec::default()
        }
    }

    /// Replaces generator level parameters; explicit spaces are left alone.
    pub fn with_levels(mut self, levels: Vec<u32>) -> SpaceSpec {
        if let Some(g) = &mut self.generator {
            g.params.levels = levels;
        }
        self
    }

    pub fn build(&self) -> Result<MetricTower> {
        match (&self.generator, &self.points, &self.matrix) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                Err(schema("", "give either a generator or points and a matrix, not both"))
            }
            (Some(g), None, None) => {
                if self.levels.is_some() {
                    return Err(schema("/levels", "generator spaces take their levels from params.levels"));
                }
                let kind = match g.name.as_str() {
                    "integers" => GeneratorKind::Integers,
                    "squares" => GeneratorKind::Squares { signed: g.params.signed.unwrap_or(true) },
                    "cubes-pullback" => GeneratorKind::CubesPullback,
                    "exponential" => GeneratorKind::Exponential,
                    "discrete" => GeneratorKind::Discrete,
                    other => return Err(schema("/generator/name", format!("unknown generator {other:?}"))),
                };
                if g.params.signed.is_some() && !matches!(kind, GeneratorKind::Squares { .. }) {
                    return Err(schema("/generator/params/signed", "only the squares generator takes `signed`"));
                }
                if g.params.levels.is_empty() {
                    return Err(schema("/generator/params/levels", "at least one level is required"));
                }
                let mut gen = Generator::new(kind, g.params.levels.clone());
                if let Some(s) = g.params.scale {
                    gen = gen.with_scale(s);
                }
                MetricTower::from_generator(gen).map_err(at("/generator/params"))
            }
            (None, _, None) => Err(schema("", "a space needs a generator or a matrix")),
            (None, points, Some(matrix)) => {
                let points = points.clone().unwrap_or_else(|| (0..matrix.len() as i64).map(Point).collect());
                MetricTower::from_matrix(points, matrix.clone(), self.levels.clone()).map_err(at("/matrix"))
            }
        }
    }

    pub fn from_tower(tower: &MetricTower) -> Result<SpaceSpec> {
        if let Some(g) = tower.generator() {
            let signed = match g.kind {
                GeneratorKind::Squares { signed } => Some(signed),
                _ => None,
            };
            return Ok(SpaceSpec {
                generator: Some(GeneratorSpec {
                    name: g.name().to_string(),
                    params: GeneratorParams {
                        levels: g.levels.clone(),
                        signed,
                        scale: (g.scale != Dist::ONE).then_some(g.scale),
                    },
                }),
                ..SpaceSpec::default()
            });
        }
        let table = tower.table(tower.top())?;
        let n = table.rows();
        let matrix = (0..n).map(|i| (0..n).map(|j| table.get(i, j)).collect()).collect();
        Ok(SpaceSpec {
            generator: None,
            points: Some(tower.points().to_vec()),
            matrix: Some(matrix),
            levels: (tower.num_levels() > 1).then(|| tower.level_sizes().to_vec()),
        })
    }
}

/// A base given inline or as a path to a space file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum BaseRef {
    Path(String),
    Inline(SpaceSpec),
}

impl<'de> Deserialize<'de> for BaseRef {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        match serde_json::Value::deserialize(de)? {
            serde_json::Value::String(p) => Ok(BaseRef::Path(p)),
            v @ serde_json::Value::Object(_) => nested(v).map(BaseRef::Inline),
            _ => Err(serde::de::Error::custom("expected a path or an inline space")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSpec {
    pub core: Region,
    #[serde(default = "one")]
    pub offset: Dist,
    #[serde(default = "one")]
    pub growth: Dist,
}

fn one() -> Dist {
    Dist::ONE
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BridgeSpec {
    pub source: Point,
    pub target: Point,
    pub length: Dist,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum CrossSpec {
    /// Rows are copy-0 points, columns copy-1 points, both in `points` order
    /// (the base's top-level order by default).
    Matrix {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<Point>>,
        matrix: Vec<Vec<Dist>>,
    },
    Unit,
    /// Defaults to the first point of the base.
    Zero {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        basepoint: Option<Point>,
    },
    /// Either `sets` (`A_1, A_2, …`) or a neighborhood `rule`.
    Family {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sets: Option<Vec<Vec<Point>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rule: Option<RuleSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        depth: Option<usize>,
    },
    Bridges {
        bridges: Vec<BridgeSpec>,
    },
}

impl<'de> Deserialize<'de> for CrossSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;

        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Matrix {
            #[serde(default)]
            points: Option<Vec<Point>>,
            matrix: Vec<Vec<Dist>>,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Unit {}
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Zero {
            #[serde(default)]
            basepoint: Option<Point>,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Family {
            #[serde(default)]
            sets: Option<Vec<Vec<Point>>>,
            #[serde(default)]
            rule: Option<RuleSpec>,
            #[serde(default)]
            depth: Option<usize>,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Bridges {
            bridges: Vec<BridgeSpec>,
        }

        let mut v = serde_json::Value::deserialize(de)?;
        let obj = v.as_object_mut().ok_or_else(|| D::Error::custom("expected an object with a `type`"))?;
        let ty = match obj.remove("type") {
            Some(serde_json::Value::String(t)) => t,
            Some(_) => return Err(D::Error::custom(format!("/type{NESTED}expected a string"))),
            None => return Err(D::Error::missing_field("type")),
        };
        match ty.as_str() {
            "matrix" => nested::<Matrix, D::Error>(v).map(|m| CrossSpec::Matrix { points: m.points, matrix: m.matrix }),
            "unit" => nested::<Unit, D::Error>(v).map(|_| CrossSpec::Unit),
            "zero" => nested::<Zero, D::Error>(v).map(|z| CrossSpec::Zero { basepoint: z.basepoint }),
            "family" => {
                nested::<Family, D::Error>(v).map(|f| CrossSpec::Family { sets: f.sets, rule: f.rule, depth: f.depth })
            }
            "bridges" => nested::<Bridges, D::Error>(v).map(|b| CrossSpec::Bridges { bridges: b.bridges }),
            other => Err(D::Error::custom(format!(
                "/type{NESTED}unknown type {other:?}, expected one of matrix, unit, zero, family, bridges"
            ))),
        }
    }
}

impl CrossSpec {
    pub fn build(&self, base: Arc<MetricTower>) -> Result<DoubleMetric> {
        match self {
            CrossSpec::Matrix { points, matrix } => {
                DoubleMetric::from_matrix(base, points.clone(), matrix.clone()).map_err(at("/cross/matrix"))
            }
            CrossSpec::Unit => Ok(DoubleMetric::unit(base)),
            CrossSpec::Zero { basepoint } => {
                let x0 = match basepoint {
                    Some(p) => *p,
                    None => *base.points().first().ok_or(Error::EmptyTower)?,
                };
                DoubleMetric::zero(base, x0).map_err(at("/cross/basepoint"))
            }
            CrossSpec::Family { sets, rule, depth } => {
                let family = match (sets, rule) {
                    (Some(sets), None) => NestedFamily::explicit(sets.clone()),
                    (None, Some(r)) => NestedFamily::neighborhoods(r.core.clone(), r.offset, r.growth),
                    _ => return Err(schema("/cross", "a family needs exactly one of `sets` and `rule`")),
                };
                let family = match depth {
                    Some(d) => family.with_depth(*d),
                    None => family,
                };
                DoubleMetric::from_family(base, family).map_err(at("/cross"))
            }
            CrossSpec::Bridges { bridges } => {
                let list: Vec<Bridge> =
                    bridges.iter().map(|b| Bridge { source: b.source, target: b.target, length: b.length }).collect();
                DoubleMetric::from_bridges(base, &list).map_err(at("/cross/bridges"))
            }
        }
    }

    /// Explicit values of a materialized level.
    pub fn from_table(table: &CrossTable) -> CrossSpec {
        let n = table.len();
        CrossSpec::Matrix {
            points: Some(table.points().to_vec()),
            matrix: (0..n).map(|i| (0..n).map(|j| table.get(i, j)).collect()).collect(),
        }
    }

    pub fn from_family(family: &NestedFamily) -> Result<CrossSpec> {
        let (sets, rule) = match &family.rule {
            FamilyRule::Explicit(sets) => (Some(sets.clone()), None),
            FamilyRule::Neighborhoods { core, offset, growth } => {
                (None, Some(RuleSpec { core: core.clone(), offset: *offset, growth: *growth }))
            }
            FamilyRule::Constant(_) => {
                return Err(Error::InvalidParameter("constant families are written as zero doubles".into()))
            }
        };
        Ok(CrossSpec::Family { sets, rule, depth: family.depth })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleSpec {
    pub base: BaseRef,
    pub cross: CrossSpec,
}

impl DoubleSpec {
    /// Builds the base (resolving a path through `resolve`) and the double.
    pub fn build(&self, resolve: &dyn Fn(&str) -> Result<SpaceSpec>) -> Result<DoubleMetric> {
        let space = match &self.base {
            BaseRef::Inline(s) => s.clone(),
            BaseRef::Path(p) => resolve(p).map_err(at("/base"))?,
        };
        let base = space.build().map_err(|e| match e {
            Error::Schema { pointer, message } => Error::Schema { pointer: format!("/base{pointer}"), message },
            other => at("/base")(other),
        })?;
        self.cross.build(Arc::new(base))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PbSpec {
    pub n: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl PbSpec {
    pub fn build(&self) -> Result<PartialBijection> {
        PartialBijection::new(self.n, &self.pairs).map_err(at("/pairs"))
    }

    pub fn from_pb(p: &PartialBijection) -> PbSpec {
        PbSpec { n: p.n(), pairs: p.pairs() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub elements: Vec<String>,
    pub product: Vec<Vec<usize>>,
}

impl TableSpec {
    pub fn build(&self) -> Result<MulTable> {
        MulTable::new(self.elements.clone(), self.product.clone()).map_err(at("/product"))
    }

    pub fn from_table(t: &MulTable) -> TableSpec {
        TableSpec { elements: t.elements.clone(), product: t.product.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskSpec {
    pub points: Vec<Point>,
    pub pairs: Vec<(Point, Point)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<Dist>,
}

impl MaskSpec {
    pub fn build(&self) -> Result<SupportMask> {
        let mut m =
            SupportMask::from_pairs(self.points.clone().into(), self.pairs.iter().copied()).map_err(at("/pairs"))?;
        m.bound = self.bound;
        Ok(m)
    }

    pub fn from_mask(m: &SupportMask) -> MaskSpec {
        MaskSpec { points: m.points().to_vec(), pairs: m.sorted_pairs(), bound: m.bound }
    }
}

/// An entry value: a rational, or `[re, im]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarSpec {
    Real(Dist),
    Complex(Dist, Dist),
}

impl ScalarSpec {
    pub fn value(&self) -> Scalar {
        match self {
            ScalarSpec::Real(r) => Complex::new(r.ratio(), Zero::zero()),
            ScalarSpec::Complex(re, im) => Complex::new(re.ratio(), im.ratio()),
        }
    }

    pub fn from_value(v: &Scalar) -> ScalarSpec {
        if v.im.is_zero() {
            ScalarSpec::Real(Dist::from(v.re))
        } else {
            ScalarSpec::Complex(Dist::from(v.re), Dist::from(v.im))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub source: Vec<Point>,
    pub target: Vec<Point>,
    /// `[x, y, value]` with `x` a source point and `y` a target point.
    pub entries: Vec<(Point, Point, ScalarSpec)>,
}

impl OperatorSpec {
    pub fn build(&self) -> Result<BandOperator> {
        BandOperator::from_entries(
            self.source.clone().into(),
            self.target.clone().into(),
            self.entries.iter().map(|(x, y, v)| ((*x, *y), v.value())),
        )
        .map_err(at("/entries"))
    }

    pub fn from_operator(t: &BandOperator) -> OperatorSpec {
        OperatorSpec {
            source: t.source().to_vec(),
            target: t.target().to_vec(),
            entries: t.entries().map(|(&(x, y), v)| (x, y, ScalarSpec::from_value(v))).collect(),
        }
    }
}
