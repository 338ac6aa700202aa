//! Problem files: a variety plus named divisors, as JSON.
//!
//! ```json
//! {
//!   "variety": "F1",
//!   "divisors": { "D": { "C": "1", "E": "1/2 + sqrt(2)" } },
//!   "disc": 2
//! }
//! ```
//!
//! `variety` is a preset name, `{"kind": "fan", "rays": .., "cones": ..,
//! "names": ..}`, or `{"kind": "hirzebruch", "e": 1, "fibers": [..]}`.
//! Coefficients are scalar literals (or JSON integers) keyed by ray name,
//! `r<k>`, or surface component label.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::scalar::Scalar;
use crate::surface::{SDivisor, SurfaceModel};
use crate::theorems::Instance;
use crate::toric::{Fan, TDivisor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("{path}: {message} at line {line}, column {column}")]
    Syntax { path: String, line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: invalid scalar {literal:?}: {reason}")]
    InvalidScalar { path: String, literal: String, reason: String },
    #[error("{path}: invariant violated: {reason}")]
    InvariantViolation { path: String, reason: String },
    #[error("{path}: unknown component {name:?}")]
    UnknownComponent { path: String, name: String },
    #[error("{path}: scalar uses sqrt({got}) but the file's discriminant is {expected}")]
    Discriminant { path: String, expected: u64, got: u64 },
    #[error("input is not valid UTF-8")]
    Utf8,
    #[error("no divisor named {0:?}")]
    NoSuchDivisor(String),
    #[error("divisor {0:?} does not fit the variety")]
    WrongModel(String),
}

pub type Result<T, E = ProblemError> = std::result::Result<T, E>;

/// How the variety was written.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VarietySpec {
    Preset(String),
    Inline(InlineVariety),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InlineVariety {
    Preset {
        name: String,
    },
    Fan {
        rays: Vec<Vec<i64>>,
        cones: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        names: Option<Vec<String>>,
    },
    Hirzebruch {
        e: u32,
        fibers: Vec<String>,
    },
}

#[derive(Debug, Clone)]
pub enum Model {
    Toric(Arc<Fan>),
    Surface(SurfaceModel),
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Divisor {
    Toric(TDivisor),
    Surface(SDivisor),
}

#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub variety: VarietySpec,
    pub divisors: BTreeMap<String, BTreeMap<String, Scalar>>,
    pub disc: Option<u64>,
    model: Model,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    variety: Value,
    #[serde(default)]
    divisors: BTreeMap<String, BTreeMap<String, RawScalar>>,
    #[serde(default)]
    disc: Option<u64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawScalar {
    Int(i64),
    Literal(String),
}

#[derive(Serialize)]
struct CanonicalProblem<'a> {
    variety: &'a VarietySpec,
    divisors: BTreeMap<&'a str, BTreeMap<&'a str, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    disc: Option<u64>,
}

/// Parses and validates a problem file. `default_disc` applies when the
/// file has no `disc` field.
pub fn parse_problem(bytes: &[u8], default_disc: Option<u64>) -> Result<ProblemFile> {
    let text = std::str::from_utf8(bytes).map_err(|_| ProblemError::Utf8)?;
    ProblemFile::parse(text, default_disc)
}

fn schema(path: &str, message: impl ToString) -> ProblemError {
    ProblemError::Schema { path: path.to_string(), message: message.to_string() }
}

fn invariant(path: &str, reason: impl ToString) -> ProblemError {
    ProblemError::InvariantViolation { path: path.to_string(), reason: reason.to_string() }
}

impl ProblemFile {
    pub fn parse(text: &str, default_disc: Option<u64>) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawProblem = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            ProblemError::Syntax { path, line: inner.line(), column: inner.column(), message: inner.to_string() }
        })?;

        let variety = match raw.variety {
            Value::String(s) => VarietySpec::Preset(s),
            v @ Value::Object(_) => {
                let inline: InlineVariety = serde_path_to_error::deserialize(v)
                    .map_err(|e| schema(&format!("variety.{}", e.path()), e.into_inner()))?;
                VarietySpec::Inline(inline)
            }
            _ => return Err(schema("variety", "expected a preset name or an object")),
        };
        let model = build_model(&variety)?;

        let disc = raw.disc.or(default_disc);
        if disc == Some(0) {
            return Err(schema("disc", "discriminant must be positive"));
        }
        let mut seen_disc = disc;
        let mut divisors = BTreeMap::new();
        for (name, terms) in raw.divisors {
            let mut coeffs = BTreeMap::new();
            for (key, raw_scalar) in terms {
                let path = format!("divisors.{name}.{key}");
                let a = match raw_scalar {
                    RawScalar::Int(k) => Scalar::from_int(k),
                    RawScalar::Literal(lit) => lit.parse::<Scalar>().map_err(|e| ProblemError::InvalidScalar {
                        path: path.clone(),
                        literal: lit.clone(),
                        reason: e.to_string(),
                    })?,
                };
                if !component_exists(&model, &key) {
                    return Err(ProblemError::UnknownComponent { path, name: key });
                }
                if a.disc() != 0 {
                    match seen_disc {
                        Some(d) if d != a.disc() => {
                            return Err(ProblemError::Discriminant { path, expected: d, got: a.disc() })
                        }
                        _ => seen_disc = Some(a.disc()),
                    }
                }
                coeffs.insert(key, a);
            }
            divisors.insert(name, coeffs);
        }
        Ok(ProblemFile { variety, divisors, disc, model })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    /// The named divisor on the file's variety.
    pub fn divisor(&self, name: &str) -> Result<Divisor> {
        let terms = self.divisors.get(name).ok_or_else(|| ProblemError::NoSuchDivisor(name.to_string()))?;
        let terms: Vec<(&str, Scalar)> = terms.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
        build_divisor(&self.model, &terms, &format!("divisors.{name}"))
    }

    /// Theorem instance from two named divisors.
    pub fn instance(&self, d: &str, e: &str) -> Result<Instance> {
        match (self.divisor(d)?, self.divisor(e)?, &self.model) {
            (Divisor::Toric(d), Divisor::Toric(e), _) => Ok(Instance::Toric { d, e }),
            (Divisor::Surface(d), Divisor::Surface(e), Model::Surface(m)) => {
                Ok(Instance::Surface { model: m.clone(), d, e })
            }
            _ => Err(ProblemError::WrongModel(e.to_string())),
        }
    }

    /// The instance as a file with divisors `D` and `E`, for replay.
    pub fn from_instance(inst: &Instance) -> Self {
        let (variety, model, d, e) = match inst {
            Instance::Toric { d, e } => {
                let fan = d.fan();
                let is_preset = Fan::preset(fan.name()).is_ok_and(|p| p == **fan);
                let variety = if is_preset {
                    VarietySpec::Preset(fan.name().to_string())
                } else {
                    VarietySpec::Inline(InlineVariety::Fan {
                        rays: fan.rays().to_vec(),
                        cones: fan.cones().to_vec(),
                        names: Some(fan.ray_names().to_vec()),
                    })
                };
                let terms = |t: &TDivisor| {
                    t.support().into_iter().map(|r| (fan.ray_name(r).to_string(), t.coeff(r).clone())).collect()
                };
                (variety, Model::Toric(fan.clone()), terms(d), terms(e))
            }
            Instance::Surface { model, d, e } => {
                let variety =
                    VarietySpec::Inline(InlineVariety::Hirzebruch { e: model.e(), fibers: model.fibers().to_vec() });
                let terms = |t: &SDivisor| {
                    t.support().into_iter().map(|c| (model.component_name(c).to_string(), t.coeff(c).clone())).collect()
                };
                (variety, Model::Surface(model.clone()), terms(d), terms(e))
            }
        };
        let divisors: BTreeMap<String, BTreeMap<String, Scalar>> =
            BTreeMap::from([("D".to_string(), d), ("E".to_string(), e)]);
        let disc = divisors.values().flat_map(|t| t.values()).map(Scalar::disc).find(|&d| d != 0);
        ProblemFile { variety, divisors, disc, model }
    }

    /// Canonical JSON: sorted keys, canonical literals, trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let divisors = self
            .divisors
            .iter()
            .map(|(n, t)| (n.as_str(), t.iter().map(|(k, v)| (k.as_str(), v.to_string())).collect()))
            .collect();
        let canon = CanonicalProblem { variety: &self.variety, divisors, disc: self.disc };
        let mut out = serde_json::to_string_pretty(&canon).expect("problem serializes");
        out.push('\n');
        out
    }

    pub fn to_value(&self) -> Value {
        serde_json::from_str(&self.to_canonical_json()).expect("canonical JSON parses")
    }
}

fn build_model(spec: &VarietySpec) -> Result<Model> {
    let fan_err = |e: crate::toric::FanError| invariant("variety", e);
    match spec {
        VarietySpec::Preset(name) | VarietySpec::Inline(InlineVariety::Preset { name }) => {
            Ok(Model::Toric(Arc::new(Fan::preset(name).map_err(|e| schema("variety", e))?)))
        }
        VarietySpec::Inline(InlineVariety::Fan { rays, cones, names }) => {
            let fan = match names {
                Some(n) => Fan::with_names("custom", rays.clone(), n.clone(), cones.clone()),
                None => Fan::new(rays.clone(), cones.clone()),
            }
            .map_err(fan_err)?;
            Ok(Model::Toric(Arc::new(fan)))
        }
        VarietySpec::Inline(InlineVariety::Hirzebruch { e, fibers }) => Ok(Model::Surface(
            SurfaceModel::new(*e, fibers.clone()).map_err(|err| invariant("variety.fibers", err))?,
        )),
    }
}

fn component_exists(model: &Model, key: &str) -> bool {
    match model {
        Model::Toric(fan) => fan.ray_index(key).is_some(),
        Model::Surface(m) => m.component(key).is_some(),
    }
}

/// Builds a divisor from `(component, coefficient)` terms; repeated keys add.
pub fn build_divisor(model: &Model, terms: &[(&str, Scalar)], path: &str) -> Result<Divisor> {
    let unknown = |k: &str| ProblemError::UnknownComponent { path: path.to_string(), name: k.to_string() };
    let mixed = |e: String| invariant(path, e);
    match model {
        Model::Toric(fan) => {
            let mut coeffs = vec![Scalar::zero(); fan.num_rays()];
            for (k, a) in terms {
                let r = fan.ray_index(k).ok_or_else(|| unknown(k))?;
                coeffs[r] = coeffs[r].try_add(a).map_err(|e| mixed(e.to_string()))?;
            }
            Ok(Divisor::Toric(TDivisor::new(fan, coeffs).map_err(|e| mixed(e.to_string()))?))
        }
        Model::Surface(m) => {
            for (k, _) in terms {
                m.component(k).ok_or_else(|| unknown(k))?;
            }
            Ok(Divisor::Surface(SDivisor::from_named(m, terms).map_err(|e| mixed(e.to_string()))?))
        }
    }
}

/// Parses `"C:1, E:1/2 + sqrt(2)"` into terms. An empty string is the zero
/// divisor.
pub fn parse_terms(text: &str) -> Result<Vec<(String, Scalar)>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|term| {
            let (k, v) = term
                .split_once(':')
                .ok_or_else(|| schema("divisor", format!("term {term:?} is not of the form name:coefficient")))?;
            let a = v.trim().parse::<Scalar>().map_err(|e| ProblemError::InvalidScalar {
                path: format!("divisor.{}", k.trim()),
                literal: v.trim().to_string(),
                reason: e.to_string(),
            })?;
            Ok((k.trim().to_string(), a))
        })
        .collect()
}

/// Parses a comma-separated list of scalar literals.
pub fn parse_samples(text: &str) -> Result<Vec<Scalar>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .enumerate()
        .map(|(i, lit)| {
            lit.parse::<Scalar>().map_err(|e| ProblemError::InvalidScalar {
                path: format!("samples[{i}]"),
                literal: lit.to_string(),
                reason: e.to_string(),
            })
        })
        .collect()
}
