//! JSON interchange format for set families.
//!
//! A document has the top-level keys `sets`, `elements`, `attributes`,
//! `memberships` and `disclaimer_uncertain`, all optional. Serialization is
//! canonical: object keys sorted, lists ordered by id (memberships by
//! element then set), two-space indentation and a trailing newline.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::model::{
    validate, AttributeKind, AttributeSchema, AttributeValue, Datum, Element, Membership,
    MembershipStatus, SetDef, SetFamily, Violation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Unknown fields are errors.
    #[default]
    Strict,
    /// Unknown fields are dropped with a warning.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("malformed document: {0}")]
    Syntax(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("{path}: probability {p} of ({element}, {set}) lies outside [0, 1]")]
    ProbabilityOutOfRange {
        path: String,
        element: String,
        set: String,
        p: f64,
    },
    #[error("{path}: {message}")]
    Entry { path: String, message: String },
    #[error("invalid dataset: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentDto {
    #[serde(default)]
    sets: Vec<SetDto>,
    #[serde(default)]
    elements: Vec<ElementDto>,
    #[serde(default)]
    attributes: Vec<AttributeDto>,
    #[serde(default)]
    memberships: Vec<MembershipDto>,
    #[serde(default)]
    disclaimer_uncertain: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetDto {
    id: String,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    membership_uncertain: bool,
    #[serde(default)]
    known_empty: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementDto {
    id: String,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    membership_uncertain: bool,
    #[serde(default)]
    attributes: BTreeMap<String, ValueDto>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum DatumDto {
    Number(f64),
    Level(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum ValueDto {
    Known { value: DatumDto },
    Missing,
    Flagged { value: DatumDto },
    Range { low: f64, high: f64 },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum AttributeDto {
    Numeric {
        name: String,
        min: f64,
        max: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unit: Option<String>,
        #[serde(default)]
        uncertain_everywhere: bool,
    },
    Categorical {
        name: String,
        levels: Vec<String>,
        #[serde(default)]
        uncertain_everywhere: bool,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
enum StatusDto {
    #[serde(rename = "certain")]
    Certain,
    #[serde(rename = "non-member")]
    NonMember,
    #[serde(rename = "uncertain")]
    Uncertain,
    #[serde(rename = "probability")]
    Probability,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MembershipDto {
    element: String,
    set: String,
    status: StatusDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
}

/// Parse a dataset document, logging any lenient-mode warnings.
pub fn parse(document: &str, mode: Mode) -> Result<SetFamily, IngestError> {
    let (family, warnings) = parse_with_warnings(document, mode)?;
    for w in warnings {
        log::warn!("{w}");
    }
    Ok(family)
}

/// Parse a dataset document and return it with the warnings raised in
/// lenient mode. The family is returned in canonical order.
pub fn parse_with_warnings(
    document: &str,
    mode: Mode,
) -> Result<(SetFamily, Vec<String>), IngestError> {
    let mut warnings = Vec::new();
    let dto: DocumentDto = match mode {
        Mode::Strict => serde_json::from_str(document).map_err(classify_json_error)?,
        Mode::Lenient => {
            let mut value: Value = serde_json::from_str(document).map_err(classify_json_error)?;
            strip_unknown(&mut value, &mut warnings);
            serde_json::from_value(value).map_err(|e| IngestError::Schema(e.to_string()))?
        }
    };
    let mut family = from_dto(dto)?;
    let violations = validate(&family);
    if !violations.is_empty() {
        return Err(IngestError::Invalid(violations));
    }
    family.canonicalize();
    Ok((family, warnings))
}

fn classify_json_error(e: serde_json::Error) -> IngestError {
    match e.classify() {
        serde_json::error::Category::Data => IngestError::Schema(e.to_string()),
        _ => IngestError::Syntax(e.to_string()),
    }
}

const TOP_KEYS: &[&str] = &["sets", "elements", "attributes", "memberships", "disclaimer_uncertain"];
const SET_KEYS: &[&str] = &["id", "label", "membership_uncertain", "known_empty"];
const ELEMENT_KEYS: &[&str] = &["id", "label", "membership_uncertain", "attributes"];
const VALUE_KEYS: &[&str] = &["kind", "value", "low", "high"];
const ATTRIBUTE_KEYS: &[&str] = &["name", "kind", "min", "max", "unit", "levels", "uncertain_everywhere"];
const MEMBERSHIP_KEYS: &[&str] = &["element", "set", "status", "p"];

fn retain_known(value: &mut Value, known: &[&str], path: &str, warnings: &mut Vec<String>) {
    if let Value::Object(map) = value {
        let unknown: Vec<String> = map
            .keys()
            .filter(|k| !known.contains(&k.as_str()))
            .cloned()
            .collect();
        for k in unknown {
            warnings.push(format!("{path}: ignoring unknown field {k:?}"));
            map.remove(&k);
        }
    }
}

fn strip_unknown(doc: &mut Value, warnings: &mut Vec<String>) {
    retain_known(doc, TOP_KEYS, "document", warnings);
    let Value::Object(top) = doc else { return };
    let lists: [(&str, &[&str]); 4] = [
        ("sets", SET_KEYS),
        ("elements", ELEMENT_KEYS),
        ("attributes", ATTRIBUTE_KEYS),
        ("memberships", MEMBERSHIP_KEYS),
    ];
    for (key, known) in lists {
        let Some(Value::Array(items)) = top.get_mut(key) else { continue };
        for (i, item) in items.iter_mut().enumerate() {
            let path = format!("{key}[{i}]");
            retain_known(item, known, &path, warnings);
            if key == "elements" {
                if let Some(Value::Object(values)) = item.get_mut("attributes") {
                    for (name, v) in values.iter_mut() {
                        retain_known(v, VALUE_KEYS, &format!("{path}.attributes.{name}"), warnings);
                    }
                }
            }
        }
    }
}

fn datum(d: DatumDto) -> Datum {
    match d {
        DatumDto::Number(v) => Datum::Number(v),
        DatumDto::Level(l) => Datum::Level(l),
    }
}

fn from_dto(doc: DocumentDto) -> Result<SetFamily, IngestError> {
    let sets = doc
        .sets
        .into_iter()
        .map(|s| SetDef {
            label: s.label.unwrap_or_else(|| s.id.clone()),
            id: s.id,
            membership_uncertain: s.membership_uncertain,
            known_empty: s.known_empty,
        })
        .collect();

    let elements = doc
        .elements
        .into_iter()
        .map(|e| Element {
            label: e.label.unwrap_or_else(|| e.id.clone()),
            id: e.id,
            membership_uncertain: e.membership_uncertain,
            attribute_values: e
                .attributes
                .into_iter()
                .map(|(name, v)| {
                    let value = match v {
                        ValueDto::Known { value } => AttributeValue::Known(datum(value)),
                        ValueDto::Missing => AttributeValue::Missing,
                        ValueDto::Flagged { value } => AttributeValue::Flagged(datum(value)),
                        ValueDto::Range { low, high } => AttributeValue::Range { low, high },
                    };
                    (name, value)
                })
                .collect(),
        })
        .collect();

    let attributes = doc
        .attributes
        .into_iter()
        .map(|a| match a {
            AttributeDto::Numeric {
                name,
                min,
                max,
                unit,
                uncertain_everywhere,
            } => AttributeSchema {
                name,
                kind: AttributeKind::Numeric { min, max, unit },
                uncertain_everywhere,
            },
            AttributeDto::Categorical {
                name,
                levels,
                uncertain_everywhere,
            } => AttributeSchema {
                name,
                kind: AttributeKind::Categorical { levels },
                uncertain_everywhere,
            },
        })
        .collect();

    let mut memberships = Vec::with_capacity(doc.memberships.len());
    for (i, m) in doc.memberships.into_iter().enumerate() {
        let path = format!("memberships[{i}]");
        let status = match (m.status, m.p) {
            (StatusDto::Probability, Some(p)) => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(IngestError::ProbabilityOutOfRange {
                        path,
                        element: m.element,
                        set: m.set,
                        p,
                    });
                }
                MembershipStatus::Probability(p)
            }
            (StatusDto::Probability, None) => {
                return Err(IngestError::Entry {
                    path,
                    message: "status \"probability\" requires \"p\"".into(),
                })
            }
            (_, Some(_)) => {
                return Err(IngestError::Entry {
                    path,
                    message: "\"p\" is only allowed with status \"probability\"".into(),
                })
            }
            (StatusDto::Certain, None) => MembershipStatus::CertainMember,
            (StatusDto::NonMember, None) => MembershipStatus::CertainNonMember,
            (StatusDto::Uncertain, None) => MembershipStatus::Uncertain,
        };
        memberships.push(Membership {
            element: m.element,
            set: m.set,
            status,
        });
    }

    Ok(SetFamily {
        sets,
        elements,
        memberships,
        attributes,
        disclaimer_uncertain: doc.disclaimer_uncertain,
    })
}

fn datum_dto(d: &Datum) -> DatumDto {
    match d {
        Datum::Number(v) => DatumDto::Number(*v),
        Datum::Level(l) => DatumDto::Level(l.clone()),
    }
}

fn to_dto(family: &SetFamily) -> DocumentDto {
    let f = family.canonicalized();
    DocumentDto {
        sets: f
            .sets
            .iter()
            .map(|s| SetDto {
                id: s.id.clone(),
                label: Some(s.label.clone()),
                membership_uncertain: s.membership_uncertain,
                known_empty: s.known_empty,
            })
            .collect(),
        elements: f
            .elements
            .iter()
            .map(|e| ElementDto {
                id: e.id.clone(),
                label: Some(e.label.clone()),
                membership_uncertain: e.membership_uncertain,
                attributes: e
                    .attribute_values
                    .iter()
                    .map(|(k, v)| {
                        let dto = match v {
                            AttributeValue::Known(d) => ValueDto::Known { value: datum_dto(d) },
                            AttributeValue::Missing => ValueDto::Missing,
                            AttributeValue::Flagged(d) => ValueDto::Flagged { value: datum_dto(d) },
                            AttributeValue::Range { low, high } => ValueDto::Range {
                                low: *low,
                                high: *high,
                            },
                        };
                        (k.clone(), dto)
                    })
                    .collect(),
            })
            .collect(),
        attributes: f
            .attributes
            .iter()
            .map(|a| match &a.kind {
                AttributeKind::Numeric { min, max, unit } => AttributeDto::Numeric {
                    name: a.name.clone(),
                    min: *min,
                    max: *max,
                    unit: unit.clone(),
                    uncertain_everywhere: a.uncertain_everywhere,
                },
                AttributeKind::Categorical { levels } => AttributeDto::Categorical {
                    name: a.name.clone(),
                    levels: levels.clone(),
                    uncertain_everywhere: a.uncertain_everywhere,
                },
            })
            .collect(),
        memberships: f
            .memberships
            .iter()
            .map(|m| {
                let (status, p) = match m.status {
                    MembershipStatus::CertainMember => (StatusDto::Certain, None),
                    MembershipStatus::CertainNonMember => (StatusDto::NonMember, None),
                    MembershipStatus::Uncertain => (StatusDto::Uncertain, None),
                    MembershipStatus::Probability(p) => (StatusDto::Probability, Some(p)),
                };
                MembershipDto {
                    element: m.element.clone(),
                    set: m.set.clone(),
                    status,
                    p,
                }
            })
            .collect(),
        disclaimer_uncertain: f.disclaimer_uncertain,
    }
}

/// Canonical document for `family`.
pub fn serialize(family: &SetFamily) -> String {
    // going through Value sorts every object's keys
    let value = serde_json::to_value(to_dto(family)).expect("dataset DTOs always serialize");
    let mut out = serde_json::to_string_pretty(&value).expect("JSON values always serialize");
    out.push('\n');
    out
}
