//! JSON encoding of expansions and rationals.
//!
//! Rationals travel as `"num/den"` strings in lowest terms with a positive
//! denominator. An expansion looks like
//!
//! ```json
//! {"coeffs": [{"t2": [[2,1],[1,2]], "value": "3/1"}],
//!  "degree": 2, "meta": {"character": null, "level": 3, "weight": "1/1"},
//!  "shape": "scalar", "trace_bound": 2}
//! ```
//!
//! with `"shape": {"compound": r}` and matrix-valued `"value"`s for
//! compound expansions. Object keys are emitted in sorted order and
//! coefficients in key order, so equal values serialize identically.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::halfint::HalfIntegralMatrix;
use crate::matrix::QMatrix;
use crate::qexpansion::{FourierExpansion, Meta, Shape};
use crate::Rational;

/// `"num/den"`.
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Accepts `"num/den"` or a bare integer `"num"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ShapeJson {
    Scalar(String),
    Compound { compound: usize },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ValueJson {
    Scalar(String),
    Block(Vec<Vec<String>>),
}

#[derive(Serialize, Deserialize)]
struct CoeffJson {
    t2: Vec<Vec<i64>>,
    value: ValueJson,
}

#[derive(Serialize, Deserialize, Default)]
struct MetaJson {
    #[serde(default)]
    character: Option<String>,
    #[serde(default)]
    level: Option<u64>,
    #[serde(default)]
    weight: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct ExpansionJson {
    coeffs: Vec<CoeffJson>,
    degree: usize,
    #[serde(default)]
    meta: MetaJson,
    shape: ShapeJson,
    trace_bound: u64,
}

fn block_to_json(shape: Shape, b: &QMatrix) -> ValueJson {
    match shape {
        Shape::Scalar => ValueJson::Scalar(format_rational(b.get(0, 0))),
        Shape::Compound(_) => ValueJson::Block(
            (0..b.rows())
                .map(|i| (0..b.cols()).map(|j| format_rational(b.get(i, j))).collect())
                .collect(),
        ),
    }
}

fn block_from_json(shape: Shape, degree: usize, v: &ValueJson) -> Result<QMatrix> {
    match (shape, v) {
        (Shape::Scalar, ValueJson::Scalar(s)) => Ok(QMatrix::scalar(parse_rational(s)?)),
        (Shape::Compound(_), ValueJson::Block(rows)) => {
            let dim = shape.block_dim(degree);
            if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                return Err(Error::ShapeMismatch(format!("expected {dim}x{dim} coefficient block")));
            }
            let data = rows
                .iter()
                .flatten()
                .map(|s| parse_rational(s))
                .collect::<Result<Vec<_>>>()?;
            Ok(QMatrix::new(dim, dim, data))
        }
        _ => Err(Error::ShapeMismatch("coefficient value does not match shape".into())),
    }
}

impl From<&FourierExpansion> for ExpansionJson {
    fn from(f: &FourierExpansion) -> Self {
        let shape = match f.shape() {
            Shape::Scalar => ShapeJson::Scalar("scalar".into()),
            Shape::Compound(r) => ShapeJson::Compound { compound: r },
        };
        ExpansionJson {
            coeffs: f
                .iter()
                .map(|(t, b)| CoeffJson {
                    t2: t.doubled_rows(),
                    value: block_to_json(f.shape(), b),
                })
                .collect(),
            degree: f.degree(),
            meta: MetaJson {
                character: f.meta().character.clone(),
                level: f.meta().level,
                weight: f.meta().weight.as_ref().map(format_rational),
            },
            shape,
            trace_bound: f.trace_bound(),
        }
    }
}

impl TryFrom<ExpansionJson> for FourierExpansion {
    type Error = Error;
    fn try_from(j: ExpansionJson) -> Result<Self> {
        let shape = match j.shape {
            ShapeJson::Scalar(s) if s == "scalar" => Shape::Scalar,
            ShapeJson::Scalar(s) => return Err(Error::Parse(format!("unknown shape {s:?}"))),
            ShapeJson::Compound { compound } => Shape::Compound(compound),
        };
        let coeffs = j
            .coeffs
            .iter()
            .map(|c| {
                let t = HalfIntegralMatrix::from_doubled(&c.t2)?;
                Ok((t, block_from_json(shape, j.degree, &c.value)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let f = FourierExpansion::from_coeffs(j.degree, j.trace_bound, shape, coeffs)?;
        let meta = Meta {
            weight: j.meta.weight.as_deref().map(parse_rational).transpose()?,
            level: j.meta.level,
            character: j.meta.character,
        };
        Ok(f.with_meta(meta))
    }
}

impl Serialize for FourierExpansion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExpansionJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FourierExpansion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ExpansionJson::deserialize(d)?;
        FourierExpansion::try_from(j).map_err(D::Error::custom)
    }
}

/// Canonical text form of an expansion.
pub fn expansion_to_string(f: &FourierExpansion) -> String {
    serde_json::to_string(f).expect("expansions always serialize")
}

pub fn expansion_from_str(s: &str) -> Result<FourierExpansion> {
    serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
}
