//! Typed data model for set families with uncertain memberships and
//! attributes, plus the facet × uncertainty classification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Identifier of a set or an element.
pub type Id = String;

/// One set of the family (e.g. a course).
#[derive(Debug, Clone, PartialEq)]
pub struct SetDef {
    pub id: Id,
    pub label: String,
    /// The roster of this set is wholly unknown.
    pub membership_uncertain: bool,
    /// The set is known to have no members at all.
    pub known_empty: bool,
}

impl SetDef {
    pub fn new(id: impl Into<Id>, label: impl Into<String>) -> Self {
        SetDef {
            id: id.into(),
            label: label.into(),
            membership_uncertain: false,
            known_empty: false,
        }
    }

    pub fn uncertain(mut self) -> Self {
        self.membership_uncertain = true;
        self
    }

    pub fn empty(mut self) -> Self {
        self.known_empty = true;
        self
    }
}

/// One element of the shared universe (e.g. a student).
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub id: Id,
    pub label: String,
    /// The sets this element belongs to are unknown.
    pub membership_uncertain: bool,
    /// Attribute values by attribute name. An absent key means the value is missing.
    pub attribute_values: BTreeMap<String, AttributeValue>,
}

impl Element {
    pub fn new(id: impl Into<Id>, label: impl Into<String>) -> Self {
        Element {
            id: id.into(),
            label: label.into(),
            membership_uncertain: false,
            attribute_values: BTreeMap::new(),
        }
    }

    pub fn uncertain(mut self) -> Self {
        self.membership_uncertain = true;
        self
    }

    pub fn with_value(mut self, attribute: impl Into<String>, value: AttributeValue) -> Self {
        self.attribute_values.insert(attribute.into(), value);
        self
    }

    /// The value of `attribute`, treating an absent key as [`AttributeValue::Missing`].
    pub fn value(&self, attribute: &str) -> &AttributeValue {
        self.attribute_values
            .get(attribute)
            .unwrap_or(&AttributeValue::Missing)
    }
}

/// Membership of one element in one set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MembershipStatus {
    CertainMember,
    CertainNonMember,
    /// Membership is possible but nothing more is known.
    Uncertain,
    /// Membership holds with probability `p`, strictly between 0 and 1.
    Probability(f64),
}

impl MembershipStatus {
    /// True for statuses that carry any doubt about the pair.
    pub fn is_uncertain(&self) -> bool {
        matches!(self, MembershipStatus::Uncertain | MembershipStatus::Probability(_))
    }
}

impl fmt::Display for MembershipStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MembershipStatus::CertainMember => write!(f, "certain"),
            MembershipStatus::CertainNonMember => write!(f, "non-member"),
            MembershipStatus::Uncertain => write!(f, "uncertain"),
            MembershipStatus::Probability(p) => write!(f, "probability({p})"),
        }
    }
}

/// An explicit membership entry of the dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub element: Id,
    pub set: Id,
    pub status: MembershipStatus,
}

impl Membership {
    pub fn new(element: impl Into<Id>, set: impl Into<Id>, status: MembershipStatus) -> Self {
        Membership {
            element: element.into(),
            set: set.into(),
            status,
        }
    }
}

/// A single attribute datum: a number for numeric attributes, a level name
/// for categorical ones.
#[derive(Debug, Clone, PartialEq)]
pub enum Datum {
    Number(f64),
    Level(String),
}

impl Datum {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Datum::Number(v) => Some(*v),
            Datum::Level(_) => None,
        }
    }

    pub fn as_level(&self) -> Option<&str> {
        match self {
            Datum::Level(l) => Some(l),
            Datum::Number(_) => None,
        }
    }
}

impl From<f64> for Datum {
    fn from(v: f64) -> Self {
        Datum::Number(v)
    }
}

impl From<&str> for Datum {
    fn from(v: &str) -> Self {
        Datum::Level(v.to_string())
    }
}

/// Value of one attribute at one element.
#[derive(Debug, Clone, PartialEq)]
pub enum AttributeValue {
    Known(Datum),
    Missing,
    /// A value was given but may be incorrect.
    Flagged(Datum),
    /// The value lies somewhere in `[low, high]`. Open thresholds such as
    /// "above 30" are closed with the schema's domain bound.
    Range { low: f64, high: f64 },
}

impl AttributeValue {
    pub fn known(v: impl Into<Datum>) -> Self {
        AttributeValue::Known(v.into())
    }

    pub fn flagged(v: impl Into<Datum>) -> Self {
        AttributeValue::Flagged(v.into())
    }

    pub fn range(low: f64, high: f64) -> Self {
        AttributeValue::Range { low, high }
    }

    /// True for values that mark a specific element as uncertain.
    pub fn is_uncertain(&self) -> bool {
        !matches!(self, AttributeValue::Known(_))
    }
}

/// Kind and domain of an attribute.
#[derive(Debug, Clone, PartialEq)]
pub enum AttributeKind {
    Numeric {
        min: f64,
        max: f64,
        unit: Option<String>,
    },
    Categorical {
        levels: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeSchema {
    pub name: String,
    pub kind: AttributeKind,
    /// Some values of this attribute are wrong, but it is unknown which.
    pub uncertain_everywhere: bool,
}

impl AttributeSchema {
    pub fn numeric(name: impl Into<String>, min: f64, max: f64) -> Self {
        AttributeSchema {
            name: name.into(),
            kind: AttributeKind::Numeric {
                min,
                max,
                unit: None,
            },
            uncertain_everywhere: false,
        }
    }

    pub fn categorical<S: Into<String>>(
        name: impl Into<String>,
        levels: impl IntoIterator<Item = S>,
    ) -> Self {
        AttributeSchema {
            name: name.into(),
            kind: AttributeKind::Categorical {
                levels: levels.into_iter().map(Into::into).collect(),
            },
            uncertain_everywhere: false,
        }
    }

    pub fn with_unit(mut self, unit: impl Into<String>) -> Self {
        if let AttributeKind::Numeric { unit: u, .. } = &mut self.kind {
            *u = Some(unit.into());
        }
        self
    }

    pub fn uncertain_everywhere(mut self) -> Self {
        self.uncertain_everywhere = true;
        self
    }

    pub fn domain(&self) -> Option<(f64, f64)> {
        match self.kind {
            AttributeKind::Numeric { min, max, .. } => Some((min, max)),
            AttributeKind::Categorical { .. } => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, AttributeKind::Numeric { .. })
    }
}

/// The whole dataset.
///
/// Equality is structural and ignores the order of the four lists, since
/// sets, elements and memberships are unordered collections.
#[derive(Debug, Clone, Default)]
pub struct SetFamily {
    pub sets: Vec<SetDef>,
    pub elements: Vec<Element>,
    pub memberships: Vec<Membership>,
    pub attributes: Vec<AttributeSchema>,
    /// Dataset-wide undefined uncertainty: something is wrong somewhere.
    pub disclaimer_uncertain: bool,
}

impl PartialEq for SetFamily {
    fn eq(&self, other: &Self) -> bool {
        let a = self.canonicalized();
        let b = other.canonicalized();
        a.sets == b.sets
            && a.elements == b.elements
            && a.memberships == b.memberships
            && a.attributes == b.attributes
            && a.disclaimer_uncertain == b.disclaimer_uncertain
    }
}

impl SetFamily {
    /// Copy with every list in canonical order: sets and elements by id,
    /// attributes by name, memberships by (element, set).
    pub fn canonicalized(&self) -> SetFamily {
        let mut out = self.clone();
        out.canonicalize();
        out
    }

    pub fn canonicalize(&mut self) {
        self.sets.sort_by(|a, b| a.id.cmp(&b.id));
        self.elements.sort_by(|a, b| a.id.cmp(&b.id));
        self.attributes.sort_by(|a, b| a.name.cmp(&b.name));
        self.memberships
            .sort_by(|a, b| (&a.element, &a.set).cmp(&(&b.element, &b.set)));
    }

    pub fn set(&self, id: &str) -> Option<&SetDef> {
        self.sets.iter().find(|s| s.id == id)
    }

    pub fn element(&self, id: &str) -> Option<&Element> {
        self.elements.iter().find(|e| e.id == id)
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeSchema> {
        self.attributes.iter().find(|a| a.name == name)
    }

    /// Set ids in canonical (sorted) order.
    pub fn sorted_set_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.sets.iter().map(|s| s.id.as_str()).collect();
        ids.sort_unstable();
        ids
    }

    /// Elements in canonical (id) order.
    pub fn sorted_elements(&self) -> Vec<&Element> {
        let mut els: Vec<&Element> = self.elements.iter().collect();
        els.sort_by(|a, b| a.id.cmp(&b.id));
        els
    }
}

/// One broken invariant, naming the offending entity.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("duplicate set id {0:?}")]
    DuplicateSetId(Id),
    #[error("duplicate element id {0:?}")]
    DuplicateElementId(Id),
    #[error("duplicate attribute name {0:?}")]
    DuplicateAttributeName(String),
    #[error("membership ({}, {}) references unknown element", .0.0, .0.1)]
    UnknownElement((Id, Id)),
    #[error("membership ({}, {}) references unknown set", .0.0, .0.1)]
    UnknownSet((Id, Id)),
    #[error("more than one membership entry for ({}, {})", .0.0, .0.1)]
    DuplicateMembership((Id, Id)),
    #[error("membership ({}, {}) uses probability 0 or 1; write it as a certain status", .0.0, .0.1)]
    ProbabilityBoundary((Id, Id)),
    #[error("membership ({}, {}) has probability {} outside [0, 1]", .0.0, .0.1, .1)]
    ProbabilityOutOfRange((Id, Id), f64),
    #[error("set {} has an unknown roster but ({}, {}) is given as {}", .0.1, .0.0, .0.1, .1)]
    DefiniteEntryInUncertainSet((Id, Id), String),
    #[error("set {} is known to be empty but ({}, {}) is given as {}", .0.1, .0.0, .0.1, .1)]
    EntryInEmptySet((Id, Id), String),
    #[error("set {0:?} is marked both empty and of unknown roster")]
    EmptySetMarkedUncertain(Id),
    #[error("element {0:?} has a value for undeclared attribute {1:?}")]
    UnknownAttribute(Id, String),
    #[error("element {0:?} has a value of the wrong kind for attribute {1:?}")]
    ValueKindMismatch(Id, String),
    #[error("element {0:?} uses unknown level {2:?} of attribute {1:?}")]
    UnknownLevel(Id, String, String),
    #[error("element {0:?} has an invalid range for attribute {1:?}")]
    InvalidRange(Id, String),
    #[error("element {0:?} has a value outside the domain of attribute {1:?}")]
    ValueOutsideDomain(Id, String),
    #[error("attribute {0:?} has an empty or inverted numeric domain")]
    InvalidDomain(String),
    #[error("attribute {0:?} declares no levels")]
    EmptyLevels(String),
    #[error("attribute {0:?} declares level {1:?} twice")]
    DuplicateLevel(String, String),
}

/// Check every invariant of the model. An empty result means the family is valid.
pub fn validate(family: &SetFamily) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut seen = BTreeSet::new();
    for s in &family.sets {
        if !seen.insert(s.id.as_str()) {
            out.push(Violation::DuplicateSetId(s.id.clone()));
        }
        if s.known_empty && s.membership_uncertain {
            out.push(Violation::EmptySetMarkedUncertain(s.id.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    for e in &family.elements {
        if !seen.insert(e.id.as_str()) {
            out.push(Violation::DuplicateElementId(e.id.clone()));
        }
    }
    let mut seen = BTreeSet::new();
    for a in &family.attributes {
        if !seen.insert(a.name.as_str()) {
            out.push(Violation::DuplicateAttributeName(a.name.clone()));
        }
        match &a.kind {
            AttributeKind::Numeric { min, max, .. } => {
                if !(min.is_finite() && max.is_finite() && min < max) {
                    out.push(Violation::InvalidDomain(a.name.clone()));
                }
            }
            AttributeKind::Categorical { levels } => {
                if levels.is_empty() {
                    out.push(Violation::EmptyLevels(a.name.clone()));
                }
                let mut lv = BTreeSet::new();
                for l in levels {
                    if !lv.insert(l.as_str()) {
                        out.push(Violation::DuplicateLevel(a.name.clone(), l.clone()));
                    }
                }
            }
        }
    }

    let mut pairs = BTreeSet::new();
    for m in &family.memberships {
        let key = (m.element.clone(), m.set.clone());
        if family.element(&m.element).is_none() {
            out.push(Violation::UnknownElement(key.clone()));
        }
        let set = family.set(&m.set);
        if set.is_none() {
            out.push(Violation::UnknownSet(key.clone()));
        }
        if !pairs.insert(key.clone()) {
            out.push(Violation::DuplicateMembership(key.clone()));
        }
        if let MembershipStatus::Probability(p) = m.status {
            if !(0.0..=1.0).contains(&p) {
                out.push(Violation::ProbabilityOutOfRange(key.clone(), p));
            } else if p == 0.0 || p == 1.0 {
                out.push(Violation::ProbabilityBoundary(key.clone()));
            }
        }
        if let Some(set) = set {
            let definite = matches!(
                m.status,
                MembershipStatus::CertainMember | MembershipStatus::Probability(_)
            );
            if set.membership_uncertain && definite {
                out.push(Violation::DefiniteEntryInUncertainSet(
                    key.clone(),
                    m.status.to_string(),
                ));
            }
            if set.known_empty && m.status != MembershipStatus::CertainNonMember {
                out.push(Violation::EntryInEmptySet(key, m.status.to_string()));
            }
        }
    }

    for e in &family.elements {
        for (name, value) in &e.attribute_values {
            let Some(schema) = family.attribute(name) else {
                out.push(Violation::UnknownAttribute(e.id.clone(), name.clone()));
                continue;
            };
            if let Some(v) = check_value(schema, value) {
                out.push(v.into_violation(e.id.clone(), name.clone()));
            }
        }
    }

    out
}

enum ValueProblem {
    Kind,
    Level(String),
    Range,
    Domain,
}

impl ValueProblem {
    fn into_violation(self, element: Id, attribute: String) -> Violation {
        match self {
            ValueProblem::Kind => Violation::ValueKindMismatch(element, attribute),
            ValueProblem::Level(l) => Violation::UnknownLevel(element, attribute, l),
            ValueProblem::Range => Violation::InvalidRange(element, attribute),
            ValueProblem::Domain => Violation::ValueOutsideDomain(element, attribute),
        }
    }
}

fn check_value(schema: &AttributeSchema, value: &AttributeValue) -> Option<ValueProblem> {
    match (&schema.kind, value) {
        (_, AttributeValue::Missing) => None,
        (AttributeKind::Numeric { min, max, .. }, AttributeValue::Known(d))
        | (AttributeKind::Numeric { min, max, .. }, AttributeValue::Flagged(d)) => match d {
            Datum::Number(v) if !v.is_finite() => Some(ValueProblem::Kind),
            Datum::Number(v) if v < min || v > max => Some(ValueProblem::Domain),
            Datum::Number(_) => None,
            Datum::Level(_) => Some(ValueProblem::Kind),
        },
        (AttributeKind::Numeric { min, max, .. }, AttributeValue::Range { low, high }) => {
            if !(low.is_finite() && high.is_finite()) || low > high {
                Some(ValueProblem::Range)
            } else if low < min || high > max {
                Some(ValueProblem::Domain)
            } else {
                None
            }
        }
        (AttributeKind::Categorical { levels }, AttributeValue::Known(d))
        | (AttributeKind::Categorical { levels }, AttributeValue::Flagged(d)) => match d {
            Datum::Level(l) if levels.iter().any(|x| x == l) => None,
            Datum::Level(l) => Some(ValueProblem::Level(l.clone())),
            Datum::Number(_) => Some(ValueProblem::Kind),
        },
        (AttributeKind::Categorical { .. }, AttributeValue::Range { .. }) => {
            Some(ValueProblem::Kind)
        }
    }
}

/// How much is known about the uncertainty of one data facet.
///
/// Ordered by how much is known about the uncertainty: `U0 < UBinary < UDefined`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UncertaintyClass {
    /// No uncertainty (U=0).
    U0,
    /// Uncertainty is present but neither located nor quantified (U>0).
    UBinary,
    /// Uncertainty is located and quantified (U=p).
    UDefined,
}

impl UncertaintyClass {
    pub fn symbol(&self) -> &'static str {
        match self {
            UncertaintyClass::U0 => "U=0",
            UncertaintyClass::UBinary => "U>0",
            UncertaintyClass::UDefined => "U=p",
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            UncertaintyClass::U0 => "certainty",
            UncertaintyClass::UBinary => "undefined uncertainty",
            UncertaintyClass::UDefined => "defined uncertainty",
        }
    }
}

impl fmt::Display for UncertaintyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.symbol(), self.name())
    }
}

/// The three data facets of set-type data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Facet {
    Membership,
    SetAttributes,
    ElementAttributes,
}

impl Facet {
    pub const ALL: [Facet; 3] = [
        Facet::Membership,
        Facet::SetAttributes,
        Facet::ElementAttributes,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Facet::Membership => "set membership",
            Facet::SetAttributes => "set attributes",
            Facet::ElementAttributes => "element attributes",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FacetClassification {
    pub membership: UncertaintyClass,
    pub set_attributes: UncertaintyClass,
    pub element_attributes: UncertaintyClass,
    pub notes: Vec<String>,
}

impl FacetClassification {
    pub fn get(&self, facet: Facet) -> UncertaintyClass {
        match facet {
            Facet::Membership => self.membership,
            Facet::SetAttributes => self.set_attributes,
            Facet::ElementAttributes => self.element_attributes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("family is not valid ({} violation(s)); first: {}", .0.len(), .0[0])]
    Invalid(Vec<Violation>),
}

/// Place each facet of the family in its uncertainty class.
pub fn classify(family: &SetFamily) -> Result<FacetClassification, ClassifyError> {
    let violations = validate(family);
    if !violations.is_empty() {
        return Err(ClassifyError::Invalid(violations));
    }

    let membership = if family
        .memberships
        .iter()
        .any(|m| matches!(m.status, MembershipStatus::Probability(_)))
    {
        UncertaintyClass::UDefined
    } else if family
        .memberships
        .iter()
        .any(|m| m.status == MembershipStatus::Uncertain)
        || family.elements.iter().any(|e| e.membership_uncertain)
        || family.sets.iter().any(|s| s.membership_uncertain)
    {
        UncertaintyClass::UBinary
    } else {
        UncertaintyClass::U0
    };

    let located = family.elements.iter().any(|e| {
        family
            .attributes
            .iter()
            .any(|a| e.value(&a.name).is_uncertain())
    });
    let blanket = family.disclaimer_uncertain
        || family.attributes.iter().any(|a| a.uncertain_everywhere);

    let mut notes = Vec::new();
    let element_attributes = match (located, blanket) {
        (true, true) => {
            notes.push(
                "element attributes carry both located uncertainty and a blanket \
                 uncertainty flag; reported as defined uncertainty"
                    .to_string(),
            );
            UncertaintyClass::UDefined
        }
        (true, false) => UncertaintyClass::UDefined,
        (false, true) => UncertaintyClass::UBinary,
        (false, false) => UncertaintyClass::U0,
    };

    Ok(FacetClassification {
        membership,
        set_attributes: membership.max(element_attributes),
        element_attributes,
        notes,
    })
}

/// One (element, set) pair of the full membership table.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedMembership {
    pub element: Id,
    pub set: Id,
    pub status: MembershipStatus,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpandError {
    #[error("set {set:?} is known empty, yet its unknown roster would make ({element}, {set}) uncertain")]
    Conflict { element: Id, set: Id },
}

/// Fill in the full |elements| × |sets| membership table.
///
/// Explicit entries pass through. A pair without an entry is `Uncertain`
/// when its element or its set has an unknown membership and the set is not
/// known to be empty; every other pair is `CertainNonMember`. Output is
/// ordered by (element id, set id).
pub fn expand_memberships(family: &SetFamily) -> Result<Vec<ExpandedMembership>, ExpandError> {
    let explicit: BTreeMap<(&str, &str), MembershipStatus> = family
        .memberships
        .iter()
        .map(|m| ((m.element.as_str(), m.set.as_str()), m.status))
        .collect();

    let mut sets: Vec<&SetDef> = family.sets.iter().collect();
    sets.sort_by(|a, b| a.id.cmp(&b.id));

    for s in &sets {
        if s.known_empty && s.membership_uncertain {
            if let Some(e) = family.sorted_elements().first() {
                return Err(ExpandError::Conflict {
                    element: e.id.clone(),
                    set: s.id.clone(),
                });
            }
        }
    }

    let mut out = Vec::with_capacity(family.elements.len() * sets.len());
    for e in family.sorted_elements() {
        for s in &sets {
            let status = match explicit.get(&(e.id.as_str(), s.id.as_str())) {
                Some(st) => *st,
                None if s.known_empty => MembershipStatus::CertainNonMember,
                None if e.membership_uncertain || s.membership_uncertain => {
                    MembershipStatus::Uncertain
                }
                None => MembershipStatus::CertainNonMember,
            };
            out.push(ExpandedMembership {
                element: e.id.clone(),
                set: s.id.clone(),
                status,
            });
        }
    }
    Ok(out)
}
