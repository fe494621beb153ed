//! Problem-file schema.
//!
//! ```json
//! { "v": [2, 0],
//!   "blocks": [ { "A": [[1, 0], [0, 0]],
//!                 "set": { "type": "ballp", "center": [0, 0], "radius": 1, "p": 1.5 } } ] }
//! ```

use std::fmt;
use std::path::Path;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::Instance;
use crate::sets::{ConvexSet, Orientation, Shape};

/// A box bound: a number, or the strings `"inf"` / `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound(pub f64);

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            v if v == f64::INFINITY => s.serialize_str("inf"),
            v if v == f64::NEG_INFINITY => s.serialize_str("-inf"),
            v => s.serialize_f64(v),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct BoundVisitor;
        impl Visitor<'_> for BoundVisitor {
            type Value = Bound;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, \"inf\" or \"-inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Bound, E> {
                Ok(Bound(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Bound, E> {
                Ok(Bound(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Bound, E> {
                Ok(Bound(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Bound, E> {
                match v {
                    "inf" => Ok(Bound(f64::INFINITY)),
                    "-inf" => Ok(Bound(f64::NEG_INFINITY)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(BoundVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SetSpec {
    Box { lower: Vec<Bound>, upper: Vec<Bound> },
    Halfspace { a: Vec<f64>, b: f64 },
    Hyperplane { a: Vec<f64>, b: f64 },
    /// `basis` lists the spanning vectors (columns of B).
    Affine { basis: Vec<Vec<f64>>, anchor: Vec<f64> },
    Ball2 { center: Vec<f64>, radius: f64 },
    Ballp { center: Vec<f64>, radius: f64, p: f64 },
    /// `dim` defaults to the row count of the block matrix.
    Soc {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
    SocReflected { orientation: Orientation },
    Orthant {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
    },
}

const SET_TYPES: &[&str] = &[
    "box",
    "halfspace",
    "hyperplane",
    "affine",
    "ball2",
    "ballp",
    "soc",
    "soc_reflected",
    "orthant",
];

// Variant bodies, deserialized separately from the tag so that errors keep
// the path of the offending field.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoxBody {
    lower: Vec<Bound>,
    upper: Vec<Bound>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NormalBody {
    a: Vec<f64>,
    b: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AffineBody {
    basis: Vec<Vec<f64>>,
    anchor: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Ball2Body {
    center: Vec<f64>,
    radius: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BallpBody {
    center: Vec<f64>,
    radius: f64,
    p: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DimBody {
    #[serde(default)]
    dim: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OrientationBody {
    orientation: Orientation,
}

fn body<T: de::DeserializeOwned, E: de::Error>(value: serde_json::Value) -> std::result::Result<T, E> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            E::custom(inner)
        } else {
            E::custom(format_args!("field `{path}`: {inner}"))
        }
    })
}

impl<'de> Deserialize<'de> for SetSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let mut map = serde_json::Map::deserialize(d)?;
        let tag = match map.remove("type") {
            Some(serde_json::Value::String(t)) => t,
            Some(_) => return Err(de::Error::custom("field `type` must be a string")),
            None => return Err(de::Error::missing_field("type")),
        };
        let value = serde_json::Value::Object(map);
        Ok(match tag.as_str() {
            "box" => {
                let b: BoxBody = body(value)?;
                Self::Box {
                    lower: b.lower,
                    upper: b.upper,
                }
            }
            "halfspace" => {
                let b: NormalBody = body(value)?;
                Self::Halfspace { a: b.a, b: b.b }
            }
            "hyperplane" => {
                let b: NormalBody = body(value)?;
                Self::Hyperplane { a: b.a, b: b.b }
            }
            "affine" => {
                let b: AffineBody = body(value)?;
                Self::Affine {
                    basis: b.basis,
                    anchor: b.anchor,
                }
            }
            "ball2" => {
                let b: Ball2Body = body(value)?;
                Self::Ball2 {
                    center: b.center,
                    radius: b.radius,
                }
            }
            "ballp" => {
                let b: BallpBody = body(value)?;
                Self::Ballp {
                    center: b.center,
                    radius: b.radius,
                    p: b.p,
                }
            }
            "soc" => Self::Soc {
                dim: body::<DimBody, _>(value)?.dim,
            },
            "soc_reflected" => Self::SocReflected {
                orientation: body::<OrientationBody, _>(value)?.orientation,
            },
            "orthant" => Self::Orthant {
                dim: body::<DimBody, _>(value)?.dim,
            },
            other => return Err(de::Error::unknown_variant(other, SET_TYPES)),
        })
    }
}

impl SetSpec {
    pub fn to_set(&self, rows: usize) -> Result<ConvexSet> {
        let bounds = |b: &[Bound]| b.iter().map(|v| v.0).collect();
        match self {
            Self::Box { lower, upper } => ConvexSet::boxed(bounds(lower), bounds(upper)),
            Self::Halfspace { a, b } => ConvexSet::halfspace(a.clone(), *b),
            Self::Hyperplane { a, b } => ConvexSet::hyperplane(a.clone(), *b),
            Self::Affine { basis, anchor } => ConvexSet::affine(basis.clone(), anchor.clone()),
            Self::Ball2 { center, radius } => ConvexSet::ball(center.clone(), *radius),
            Self::Ballp { center, radius, p } => ConvexSet::p_ball(center.clone(), *radius, *p),
            Self::Soc { dim } => ConvexSet::second_order_cone(dim.unwrap_or(rows)),
            Self::SocReflected { orientation } => Ok(ConvexSet::reflected_cone(orientation.clone())),
            Self::Orthant { dim } => ConvexSet::orthant(dim.unwrap_or(rows)),
        }
    }

    pub fn from_set(set: &ConvexSet) -> Self {
        let bounds = |v: &[f64]| v.iter().copied().map(Bound).collect();
        match set.shape() {
            Shape::Box { lower, upper } => Self::Box {
                lower: bounds(lower),
                upper: bounds(upper),
            },
            Shape::Halfspace { normal, offset } => Self::Halfspace {
                a: normal.clone(),
                b: *offset,
            },
            Shape::Hyperplane { normal, offset } => Self::Hyperplane {
                a: normal.clone(),
                b: *offset,
            },
            Shape::Affine { basis, anchor } => Self::Affine {
                basis: basis.clone(),
                anchor: anchor.clone(),
            },
            Shape::EuclideanBall { center, radius } => Self::Ball2 {
                center: center.clone(),
                radius: *radius,
            },
            Shape::PNormBall { center, radius, p } => Self::Ballp {
                center: center.clone(),
                radius: *radius,
                p: *p,
            },
            Shape::SecondOrderCone { dim } => Self::Soc { dim: Some(*dim) },
            Shape::PolarReflectedCone { orientation } => Self::SocReflected {
                orientation: orientation.clone(),
            },
            Shape::NonnegativeOrthant { dim } => Self::Orthant { dim: Some(*dim) },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub set: SetSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub v: Vec<f64>,
    pub blocks: Vec<BlockSpec>,
}

fn domain_err(path: String, e: Error) -> Error {
    let message = match e {
        Error::InvalidArgument(m) => m,
        other => other.to_string(),
    };
    Error::Parse { path, message }
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let mut path = e.path().to_string();
            let mut message = e.into_inner().to_string();
            // set bodies report their own field as a message prefix
            if let Some(rest) = message.strip_prefix("field `") {
                if let Some((field, tail)) = rest.split_once("`: ") {
                    path = format!("{path}.{field}");
                    message = tail.to_string();
                }
            }
            Error::Parse { path, message }
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }

    pub fn to_instance(&self) -> Result<Instance> {
        let n = self.v.len();
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (i, b) in self.blocks.iter().enumerate() {
            if let Some(j) = b.a.iter().position(|row| row.len() != n) {
                return Err(domain_err(
                    format!("blocks[{i}].A[{j}]"),
                    Error::DimensionMismatch {
                        expected: n,
                        got: b.a[j].len(),
                    },
                ));
            }
            let matrix = Matrix::from_rows(&b.a).map_err(|e| domain_err(format!("blocks[{i}].A"), e))?;
            let set = b
                .set
                .to_set(b.a.len())
                .map_err(|e| domain_err(format!("blocks[{i}].set"), e))?;
            blocks.push((matrix, set));
        }
        Instance::new(self.v.clone(), blocks).map_err(|e| domain_err("blocks".into(), e))
    }

    pub fn from_instance(inst: &Instance) -> Self {
        Self {
            v: inst.anchor().to_vec(),
            blocks: inst
                .blocks()
                .iter()
                .map(|b| BlockSpec {
                    a: b.matrix().to_rows(),
                    set: SetSpec::from_set(b.set()),
                })
                .collect(),
        }
    }
}

/// Reference solution stored next to a problem file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub x_star: Vec<f64>,
    pub d_star: f64,
}

impl SolutionFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
            path: e.path().to_string(),
            message: e.into_inner().to_string(),
        })
    }
}
