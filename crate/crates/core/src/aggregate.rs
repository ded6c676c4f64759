//! Exclusive set regions, cardinality bounds and aggregate set attributes
//! with their certainty scores.
//!
//! Aggregate values are computed by one of two [`ValueRule`]s and their
//! certainty by one of two [`CertaintyRule`]s. Any pairing is allowed.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::model::{
    expand_memberships, AttributeKind, AttributeSchema, AttributeValue, Element, ExpandError, Id,
    MembershipStatus, SetFamily,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AggregateError {
    #[error("membership ({0}, {1}) is uncertain; aggregation needs given memberships")]
    MembershipUncertain(Id, Id),
    #[error("unknown set {0:?}")]
    UnknownSet(Id),
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("attribute {0:?} is not categorical")]
    NotCategorical(String),
    #[error("attribute {0:?} is not numeric")]
    NotNumeric(String),
    #[error("attribute {attribute:?} has no level {level:?}")]
    UnknownLevel { attribute: String, level: String },
    #[error("certainty over all elements is undefined for an empty scope")]
    EmptyScope,
    #[error(transparent)]
    Expand(#[from] ExpandError),
}

/// Elements that belong to exactly the sets of `signature`.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    /// Sorted, non-empty list of set ids.
    pub signature: Vec<Id>,
    /// Sorted element ids.
    pub members: Vec<Id>,
}

impl Region {
    pub fn key(&self) -> String {
        self.signature.join("&")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Regions {
    /// Non-empty regions in lexicographic signature order.
    pub regions: Vec<Region>,
    /// Elements that belong to no set.
    pub outside: Vec<Id>,
}

/// Partition the elements by the exact combination of sets they belong to.
///
/// Fails when any pair of the expanded membership table is uncertain.
pub fn enumerate_regions(family: &SetFamily) -> Result<Regions, AggregateError> {
    let table = expand_memberships(family)?;
    let mut by_element: BTreeMap<&str, Vec<Id>> = BTreeMap::new();
    for e in &family.elements {
        by_element.entry(e.id.as_str()).or_default();
    }
    for m in &table {
        match m.status {
            MembershipStatus::CertainMember => {
                by_element.entry(&m.element).or_default().push(m.set.clone())
            }
            MembershipStatus::CertainNonMember => {}
            MembershipStatus::Uncertain | MembershipStatus::Probability(_) => {
                return Err(AggregateError::MembershipUncertain(
                    m.element.clone(),
                    m.set.clone(),
                ))
            }
        }
    }

    let mut regions: BTreeMap<Vec<Id>, Vec<Id>> = BTreeMap::new();
    let mut outside = Vec::new();
    // expansion already yields set ids in sorted order per element
    for (element, signature) in by_element {
        if signature.is_empty() {
            outside.push(element.to_string());
        } else {
            regions.entry(signature).or_default().push(element.to_string());
        }
    }
    Ok(Regions {
        regions: regions
            .into_iter()
            .map(|(signature, members)| Region { signature, members })
            .collect(),
        outside,
    })
}

/// Bounds on the size of a set under uncertain membership.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CardinalityBounds {
    pub min: usize,
    pub max: usize,
    pub expected: f64,
}

/// Weight an undefined-uncertain candidate contributes to the expected size.
pub const UNDEFINED_MEMBERSHIP_WEIGHT: f64 = 0.5;

pub fn cardinality(family: &SetFamily, set: &str) -> Result<CardinalityBounds, AggregateError> {
    if family.set(set).is_none() {
        return Err(AggregateError::UnknownSet(set.to_string()));
    }
    let table = expand_memberships(family)?;
    let mut min = 0;
    let mut candidates = 0;
    let mut expected = 0.0;
    for m in table.iter().filter(|m| m.set == set) {
        match m.status {
            MembershipStatus::CertainMember => min += 1,
            MembershipStatus::CertainNonMember => {}
            MembershipStatus::Uncertain => {
                candidates += 1;
                expected += UNDEFINED_MEMBERSHIP_WEIGHT;
            }
            MembershipStatus::Probability(p) => {
                candidates += 1;
                expected += p;
            }
        }
    }
    Ok(CardinalityBounds {
        min,
        max: min + candidates,
        expected: min as f64 + expected,
    })
}

/// Which element values feed an aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueRule {
    /// Ignore missing and doubted values alike.
    CertainOnly,
    /// Ignore missing values, take doubted values at face value.
    UseGiven,
}

/// Which denominator the certainty score uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CertaintyRule {
    /// Known values over all elements of the scope.
    OverAll,
    /// Known values over elements with a given value.
    OverGiven,
}

/// Counts of value kinds in one scope. Range values count as given but
/// doubted, like flagged ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ValueCounts {
    pub total: usize,
    pub known: usize,
    pub flagged: usize,
    pub missing: usize,
}

pub fn count_values(members: &[&Element], attribute: &str) -> ValueCounts {
    let mut c = ValueCounts {
        total: members.len(),
        ..Default::default()
    };
    for e in members {
        match e.value(attribute) {
            AttributeValue::Known(_) => c.known += 1,
            AttributeValue::Flagged(_) | AttributeValue::Range { .. } => c.flagged += 1,
            AttributeValue::Missing => c.missing += 1,
        }
    }
    c
}

/// Share of contributing elements whose value is `target`; `None` when no
/// element contributes.
pub fn aggregate_proportion(
    members: &[&Element],
    attribute: &AttributeSchema,
    target: &str,
    rule: ValueRule,
) -> Result<Option<f64>, AggregateError> {
    let AttributeKind::Categorical { levels } = &attribute.kind else {
        return Err(AggregateError::NotCategorical(attribute.name.clone()));
    };
    if !levels.iter().any(|l| l == target) {
        return Err(AggregateError::UnknownLevel {
            attribute: attribute.name.clone(),
            level: target.to_string(),
        });
    }
    let mut hits = 0usize;
    let mut total = 0usize;
    for e in members {
        let datum = match (e.value(&attribute.name), rule) {
            (AttributeValue::Known(d), _) => d,
            (AttributeValue::Flagged(d), ValueRule::UseGiven) => d,
            _ => continue,
        };
        total += 1;
        if datum.as_level() == Some(target) {
            hits += 1;
        }
    }
    Ok((total > 0).then(|| hits as f64 / total as f64))
}

/// Mean of the contributing values; a range contributes its midpoint under
/// [`ValueRule::UseGiven`]. `None` when no element contributes.
pub fn aggregate_mean(
    members: &[&Element],
    attribute: &AttributeSchema,
    rule: ValueRule,
) -> Result<Option<f64>, AggregateError> {
    if !attribute.is_numeric() {
        return Err(AggregateError::NotNumeric(attribute.name.clone()));
    }
    let mut sum = 0.0;
    let mut n = 0usize;
    for e in members {
        let v = match (e.value(&attribute.name), rule) {
            (AttributeValue::Known(d), _) => d.as_number(),
            (AttributeValue::Flagged(d), ValueRule::UseGiven) => d.as_number(),
            (AttributeValue::Range { low, high }, ValueRule::UseGiven) => Some((low + high) / 2.0),
            _ => None,
        };
        if let Some(v) = v {
            sum += v;
            n += 1;
        }
    }
    Ok((n > 0).then(|| sum / n as f64))
}

/// Proportion of elements whose value is certainly known.
///
/// Under [`CertaintyRule::OverGiven`] a scope without any given value has
/// certainty 0.
pub fn certainty(
    members: &[&Element],
    attribute: &str,
    rule: CertaintyRule,
) -> Result<f64, AggregateError> {
    let c = count_values(members, attribute);
    certainty_from_counts(&c, rule)
}

fn certainty_from_counts(c: &ValueCounts, rule: CertaintyRule) -> Result<f64, AggregateError> {
    match rule {
        CertaintyRule::OverAll if c.total == 0 => Err(AggregateError::EmptyScope),
        CertaintyRule::OverAll => Ok(c.known as f64 / c.total as f64),
        CertaintyRule::OverGiven => {
            let given = c.known + c.flagged;
            Ok(if given == 0 {
                0.0
            } else {
                c.known as f64 / given as f64
            })
        }
    }
}

/// The aggregate computed over a scope.
#[derive(Debug, Clone, PartialEq)]
pub enum AggregateKind {
    /// Share of a categorical level.
    Proportion { target: String },
    /// Mean of a numeric attribute.
    Mean,
}

/// What one row of a summary table covers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum CellScope {
    Region(Vec<Id>),
    Set(Id),
}

impl fmt::Display for CellScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellScope::Region(sig) => write!(f, "region:{}", sig.join("&")),
            CellScope::Set(id) => write!(f, "set:{id}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummaryScope {
    Regions,
    Sets,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateCell {
    pub scope: CellScope,
    /// `None` when the value rule leaves no contributing element.
    pub value: Option<f64>,
    pub certainty: f64,
    pub counts: ValueCounts,
    /// Element ids in the scope.
    pub members: Vec<Id>,
}

/// Options shared by every aggregate view.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateSpec {
    pub attribute: String,
    pub kind: AggregateKind,
    pub value_rule: ValueRule,
    pub certainty_rule: CertaintyRule,
}

impl AggregateSpec {
    /// Look up and check the attribute against the aggregate kind.
    pub fn schema<'a>(&self, family: &'a SetFamily) -> Result<&'a AttributeSchema, AggregateError> {
        let schema = family
            .attribute(&self.attribute)
            .ok_or_else(|| AggregateError::UnknownAttribute(self.attribute.clone()))?;
        match (&self.kind, &schema.kind) {
            (AggregateKind::Mean, AttributeKind::Numeric { .. }) => Ok(schema),
            (AggregateKind::Mean, _) => Err(AggregateError::NotNumeric(schema.name.clone())),
            (AggregateKind::Proportion { target }, AttributeKind::Categorical { levels }) => {
                if levels.iter().any(|l| l == target) {
                    Ok(schema)
                } else {
                    Err(AggregateError::UnknownLevel {
                        attribute: schema.name.clone(),
                        level: target.clone(),
                    })
                }
            }
            (AggregateKind::Proportion { .. }, _) => {
                Err(AggregateError::NotCategorical(schema.name.clone()))
            }
        }
    }

    /// Range of possible aggregate values, used to scale encodings.
    pub fn value_domain(&self, schema: &AttributeSchema) -> (f64, f64) {
        match self.kind {
            AggregateKind::Proportion { .. } => (0.0, 1.0),
            AggregateKind::Mean => schema.domain().unwrap_or((0.0, 1.0)),
        }
    }

    /// Aggregate one scope.
    pub fn cell(
        &self,
        schema: &AttributeSchema,
        scope: CellScope,
        members: &[&Element],
    ) -> Result<AggregateCell, AggregateError> {
        let value = match &self.kind {
            AggregateKind::Proportion { target } => {
                aggregate_proportion(members, schema, target, self.value_rule)?
            }
            AggregateKind::Mean => aggregate_mean(members, schema, self.value_rule)?,
        };
        let counts = count_values(members, &schema.name);
        let certainty = if counts.total == 0 {
            0.0
        } else {
            certainty_from_counts(&counts, self.certainty_rule)?
        };
        Ok(AggregateCell {
            scope,
            value,
            certainty,
            counts,
            members: members.iter().map(|e| e.id.clone()).collect(),
        })
    }
}

/// One aggregate cell per region, or per whole set (the union of its
/// regions). Sets without members get an undefined value and certainty 0.
pub fn summary_table(
    family: &SetFamily,
    spec: &AggregateSpec,
    scope: SummaryScope,
) -> Result<Vec<AggregateCell>, AggregateError> {
    let schema = spec.schema(family)?;
    let regions = enumerate_regions(family)?;
    let elements: BTreeMap<&str, &Element> =
        family.elements.iter().map(|e| (e.id.as_str(), e)).collect();
    let lookup = |ids: &[Id]| -> Vec<&Element> { ids.iter().map(|id| elements[id.as_str()]).collect() };

    match scope {
        SummaryScope::Regions => regions
            .regions
            .iter()
            .map(|r| {
                spec.cell(
                    schema,
                    CellScope::Region(r.signature.clone()),
                    &lookup(&r.members),
                )
            })
            .collect(),
        SummaryScope::Sets => family
            .sorted_set_ids()
            .into_iter()
            .map(|set| {
                let mut members: Vec<Id> = regions
                    .regions
                    .iter()
                    .filter(|r| r.signature.iter().any(|s| s == set))
                    .flat_map(|r| r.members.iter().cloned())
                    .collect();
                members.sort();
                spec.cell(schema, CellScope::Set(set.to_string()), &lookup(&members))
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{courses_family, residency_family, Flavour};
    use crate::model::{AttributeValue as V, Membership, SetDef};

    fn residency() -> AttributeSchema {
        AttributeSchema::categorical("res", ["dom", "int"])
    }

    fn elements(values: Vec<V>, attribute: &str) -> Vec<Element> {
        values
            .into_iter()
            .enumerate()
            .map(|(i, v)| Element::new(format!("x{i}"), "").with_value(attribute, v))
            .collect()
    }

    fn mixed_residency() -> Vec<Element> {
        elements(
            vec![
                V::known("dom"),
                V::known("dom"),
                V::known("int"),
                V::flagged("int"),
                V::Missing,
            ],
            "res",
        )
    }

    #[test]
    fn proportion_rules() {
        let els = mixed_residency();
        let refs: Vec<&Element> = els.iter().collect();
        let s = residency();
        assert_eq!(
            aggregate_proportion(&refs, &s, "int", ValueRule::UseGiven).unwrap(),
            Some(0.5)
        );
        assert_eq!(
            aggregate_proportion(&refs, &s, "int", ValueRule::CertainOnly).unwrap(),
            Some(1.0 / 3.0)
        );
    }

    #[test]
    fn proportion_all_missing_is_undefined() {
        let els = elements(vec![V::Missing, V::Missing], "res");
        let refs: Vec<&Element> = els.iter().collect();
        for rule in [ValueRule::UseGiven, ValueRule::CertainOnly] {
            assert_eq!(aggregate_proportion(&refs, &residency(), "int", rule).unwrap(), None);
        }
    }

    #[test]
    fn proportion_errors() {
        let refs: Vec<&Element> = vec![];
        let age = AttributeSchema::numeric("age", 0.0, 99.0);
        assert_eq!(
            aggregate_proportion(&refs, &age, "int", ValueRule::UseGiven),
            Err(AggregateError::NotCategorical("age".into()))
        );
        assert!(matches!(
            aggregate_proportion(&refs, &residency(), "alien", ValueRule::UseGiven),
            Err(AggregateError::UnknownLevel { .. })
        ));
    }

    #[test]
    fn mean_rules() {
        let els = elements(
            vec![V::known(20.0), V::known(24.0), V::flagged(28.0), V::Missing],
            "age",
        );
        let refs: Vec<&Element> = els.iter().collect();
        let age = AttributeSchema::numeric("age", 0.0, 99.0);
        assert_eq!(aggregate_mean(&refs, &age, ValueRule::UseGiven).unwrap(), Some(24.0));
        assert_eq!(aggregate_mean(&refs, &age, ValueRule::CertainOnly).unwrap(), Some(22.0));
        assert_eq!(
            aggregate_mean(&refs, &residency(), ValueRule::UseGiven),
            Err(AggregateError::NotNumeric("res".into()))
        );
    }

    #[test]
    fn mean_uses_range_midpoint_only_when_using_given() {
        let els = elements(vec![V::known(20.0), V::range(20.0, 30.0)], "age");
        let refs: Vec<&Element> = els.iter().collect();
        let age = AttributeSchema::numeric("age", 0.0, 99.0);
        assert_eq!(aggregate_mean(&refs, &age, ValueRule::UseGiven).unwrap(), Some(22.5));
        assert_eq!(aggregate_mean(&refs, &age, ValueRule::CertainOnly).unwrap(), Some(20.0));
    }

    #[test]
    fn certainty_rules() {
        let els = elements(
            vec![V::known("dom"), V::known("int"), V::flagged("dom"), V::flagged("int"), V::Missing],
            "res",
        );
        let refs: Vec<&Element> = els.iter().collect();
        assert_eq!(certainty(&refs, "res", CertaintyRule::OverAll).unwrap(), 0.4);
        assert_eq!(certainty(&refs, "res", CertaintyRule::OverGiven).unwrap(), 0.5);

        let known = elements(vec![V::known("dom"), V::known("int")], "res");
        let refs: Vec<&Element> = known.iter().collect();
        assert_eq!(certainty(&refs, "res", CertaintyRule::OverAll).unwrap(), 1.0);
        assert_eq!(certainty(&refs, "res", CertaintyRule::OverGiven).unwrap(), 1.0);
    }

    #[test]
    fn certainty_edge_conventions() {
        assert_eq!(certainty(&[], "res", CertaintyRule::OverAll), Err(AggregateError::EmptyScope));
        let els = elements(vec![V::Missing], "res");
        let refs: Vec<&Element> = els.iter().collect();
        assert_eq!(certainty(&refs, "res", CertaintyRule::OverGiven).unwrap(), 0.0);
    }

    fn two_sets() -> SetFamily {
        use MembershipStatus::*;
        SetFamily {
            sets: vec![SetDef::new("A", "A"), SetDef::new("B", "B")],
            elements: vec![
                Element::new("x", "x").with_value("res", V::known("int")),
                Element::new("y", "y").with_value("res", V::known("dom")),
                Element::new("z", "z").with_value("res", V::flagged("int")),
                Element::new("w", "w"),
            ],
            memberships: vec![
                Membership::new("x", "A", CertainMember),
                Membership::new("x", "B", CertainMember),
                Membership::new("y", "A", CertainMember),
                Membership::new("z", "B", CertainMember),
            ],
            attributes: vec![residency()],
            disclaimer_uncertain: false,
        }
    }

    #[test]
    fn regions_of_two_sets() {
        let r = enumerate_regions(&two_sets()).unwrap();
        let sigs: Vec<String> = r.regions.iter().map(Region::key).collect();
        assert_eq!(sigs, vec!["A", "A&B", "B"]);
        assert_eq!(r.regions[1].members, vec!["x"]);
        assert_eq!(r.outside, vec!["w"]);
    }

    #[test]
    fn regions_refuse_uncertain_membership() {
        assert!(matches!(
            enumerate_regions(&courses_family()),
            Err(AggregateError::MembershipUncertain(_, _))
        ));
    }

    #[test]
    fn set_cells_cover_the_union_of_regions() {
        let spec = AggregateSpec {
            attribute: "res".into(),
            kind: AggregateKind::Proportion { target: "int".into() },
            value_rule: ValueRule::UseGiven,
            certainty_rule: CertaintyRule::OverAll,
        };
        let cells = summary_table(&two_sets(), &spec, SummaryScope::Sets).unwrap();
        assert_eq!(cells.len(), 2);
        // A = {x, y}: one international of two; B = {x, z}: both given as international
        assert_eq!(cells[0].scope, CellScope::Set("A".into()));
        assert_eq!(cells[0].members, vec!["x", "y"]);
        assert_eq!(cells[0].value, Some(0.5));
        assert_eq!(cells[0].certainty, 1.0);
        assert_eq!(cells[1].members, vec!["x", "z"]);
        assert_eq!(cells[1].value, Some(1.0));
        assert_eq!(cells[1].certainty, 0.5);
    }

    #[test]
    fn empty_set_gets_undefined_cell() {
        let mut f = two_sets();
        f.sets.push(SetDef::new("C", "C"));
        let spec = AggregateSpec {
            attribute: "res".into(),
            kind: AggregateKind::Proportion { target: "int".into() },
            value_rule: ValueRule::CertainOnly,
            certainty_rule: CertaintyRule::OverAll,
        };
        let cells = summary_table(&f, &spec, SummaryScope::Sets).unwrap();
        assert_eq!(cells[2].value, None);
        assert_eq!(cells[2].certainty, 0.0);
        assert_eq!(cells[2].counts.total, 0);
    }

    #[test]
    fn certain_dataset_has_full_certainty_everywhere() {
        let f = residency_family(Flavour::Certain);
        for certainty_rule in [CertaintyRule::OverAll, CertaintyRule::OverGiven] {
            let spec = AggregateSpec {
                attribute: "residency".into(),
                kind: AggregateKind::Proportion { target: "international".into() },
                value_rule: ValueRule::CertainOnly,
                certainty_rule,
            };
            for scope in [SummaryScope::Regions, SummaryScope::Sets] {
                for cell in summary_table(&f, &spec, scope).unwrap() {
                    assert_eq!(cell.certainty, 1.0);
                }
            }
        }
    }

    #[test]
    fn cardinality_examples() {
        use MembershipStatus::*;
        let mut f = SetFamily {
            sets: vec![SetDef::new("X", "X")],
            elements: ["a", "b", "e", "f"].iter().map(|id| Element::new(*id, *id)).collect(),
            memberships: vec![
                Membership::new("a", "X", CertainMember),
                Membership::new("b", "X", CertainMember),
                Membership::new("e", "X", Probability(0.5)),
                Membership::new("f", "X", Probability(0.25)),
            ],
            ..Default::default()
        };
        let c = cardinality(&f, "X").unwrap();
        assert_eq!((c.min, c.max, c.expected), (2, 4, 2.75));

        f.memberships.truncate(2);
        let c = cardinality(&f, "X").unwrap();
        assert_eq!((c.min, c.max, c.expected), (2, 2, 2.0));

        assert_eq!(cardinality(&f, "Q"), Err(AggregateError::UnknownSet("Q".into())));
    }

    #[test]
    fn undefined_candidate_on_empty_set() {
        let f = SetFamily {
            sets: vec![SetDef::new("X", "X")],
            elements: vec![Element::new("e", "e").uncertain()],
            ..Default::default()
        };
        let c = cardinality(&f, "X").unwrap();
        assert_eq!((c.min, c.max, c.expected), (0, 1, 0.5));
    }
}
