#![allow(dead_code)]

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use uncertain_sets::model::{AttributeSchema, Membership, SetDef};
use uncertain_sets::{AttributeValue, Element, MembershipStatus, SetFamily};

pub const AGE: &str = "age";
pub const RES: &str = "residency";

#[derive(Debug, Clone, Copy)]
pub struct Gen {
    pub max_sets: usize,
    pub max_elements: usize,
    /// Only certain memberships, no element or set flags.
    pub certain_memberships: bool,
    /// Only known attribute values.
    pub known_values: bool,
}

impl Gen {
    pub fn anything() -> Self {
        Gen {
            max_sets: 4,
            max_elements: 12,
            certain_memberships: false,
            known_values: false,
        }
    }
}

#[derive(Debug, Clone)]
struct Raw {
    n_sets: usize,
    n_elements: usize,
    set_kind: Vec<u8>,
    element_flag: Vec<bool>,
    entries: Vec<(u8, f64)>,
    ages: Vec<(u8, f64, f64)>,
    residency: Vec<(u8, bool)>,
    disclaimer: bool,
    blanket_age: bool,
}

fn build(raw: Raw, g: Gen) -> SetFamily {
    let sets: Vec<SetDef> = (0..raw.n_sets)
        .map(|i| {
            let s = SetDef::new(format!("S{i}"), format!("Set {i}"));
            match (g.certain_memberships, raw.set_kind[i]) {
                (false, 1) => s.uncertain(),
                (false, 2) => s.empty(),
                _ => s,
            }
        })
        .collect();
    let mut elements = Vec::new();
    let mut memberships = Vec::new();
    for e in 0..raw.n_elements {
        let id = format!("e{e:02}");
        let mut el = Element::new(id.clone(), format!("Element {e}"));
        if !g.certain_memberships && raw.element_flag[e] {
            el = el.uncertain();
        }
        let (kind, v, w) = raw.ages[e];
        let age = match if g.known_values { 0 } else { kind } {
            0 => Some(AttributeValue::known(v)),
            1 => Some(AttributeValue::flagged(v)),
            2 => Some(AttributeValue::range(v.min(50.0), v.min(50.0) + w)),
            3 => Some(AttributeValue::Missing),
            _ => None,
        };
        if let Some(a) = age {
            el = el.with_value(AGE, a);
        }
        let (kind, intl) = raw.residency[e];
        let level = if intl { "international" } else { "domestic" };
        let res = match if g.known_values { 0 } else { kind } {
            0 => AttributeValue::known(level),
            1 => AttributeValue::flagged(level),
            _ => AttributeValue::Missing,
        };
        el = el.with_value(RES, res);
        elements.push(el);

        for (s, set) in sets.iter().enumerate() {
            let (code, p) = raw.entries[e * 4 + s];
            let status = if g.certain_memberships {
                match code % 2 {
                    0 => Some(MembershipStatus::CertainMember),
                    _ => Some(MembershipStatus::CertainNonMember),
                }
            } else if set.known_empty {
                (code == 1).then_some(MembershipStatus::CertainNonMember)
            } else if set.membership_uncertain {
                match code {
                    1 => Some(MembershipStatus::CertainNonMember),
                    2 => Some(MembershipStatus::Uncertain),
                    _ => None,
                }
            } else {
                match code {
                    0 => Some(MembershipStatus::CertainMember),
                    1 => Some(MembershipStatus::CertainNonMember),
                    2 => Some(MembershipStatus::Uncertain),
                    3 => Some(MembershipStatus::Probability(p)),
                    _ => None,
                }
            };
            if let Some(st) = status {
                memberships.push(Membership::new(id.clone(), set.id.clone(), st));
            }
        }
    }
    let mut age = AttributeSchema::numeric(AGE, 15.0, 70.0).with_unit("yrs");
    let mut residency = AttributeSchema::categorical(RES, ["domestic", "international"]);
    if !g.known_values && raw.blanket_age {
        age = age.uncertain_everywhere();
        residency = residency.uncertain_everywhere();
    }
    SetFamily {
        sets,
        elements,
        memberships,
        attributes: vec![age, residency],
        disclaimer_uncertain: !g.known_values && raw.disclaimer,
    }
}

pub fn family(g: Gen) -> impl Strategy<Value = SetFamily> {
    let n = g.max_elements;
    (
        1..=g.max_sets,
        0..=n,
        prop::collection::vec(prop_oneof![4 => Just(0u8), 1 => Just(1u8), 1 => Just(2u8)], 4),
        prop::collection::vec(prop::bool::weighted(0.15), n),
        prop::collection::vec((0u8..5, 0.01f64..0.99), n * 4),
        prop::collection::vec((0u8..5, 15.0f64..60.0, 1.0f64..20.0), n),
        prop::collection::vec((0u8..3, any::<bool>()), n),
        prop::bool::weighted(0.1),
        prop::bool::weighted(0.1),
    )
        .prop_map(move |(n_sets, n_elements, set_kind, element_flag, entries, ages, residency, disclaimer, blanket_age)| {
            build(
                Raw {
                    n_sets,
                    n_elements,
                    set_kind,
                    element_flag,
                    entries,
                    ages,
                    residency,
                    disclaimer,
                    blanket_age,
                },
                g,
            )
        })
}

/// A family together with a shuffled copy of itself.
pub fn family_and_shuffle(g: Gen) -> impl Strategy<Value = (SetFamily, SetFamily)> {
    family(g).prop_flat_map(|f| {
        (
            Just(f.clone()),
            Just(f.sets.clone()).prop_shuffle(),
            Just(f.elements.clone()).prop_shuffle(),
            Just(f.memberships.clone()).prop_shuffle(),
            Just(f.attributes.clone()).prop_shuffle(),
        )
            .prop_map(|(f, sets, elements, memberships, attributes)| {
                let shuffled = SetFamily {
                    sets,
                    elements,
                    memberships,
                    attributes,
                    disclaimer_uncertain: f.disclaimer_uncertain,
                };
                (f, shuffled)
            })
    })
}

/// A runner with a fixed seed, for drawing samples outside `proptest!`.
pub fn seeded_runner() -> TestRunner {
    TestRunner::new_with_rng(Config::default(), TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

pub fn sample<S: Strategy>(runner: &mut TestRunner, s: &S) -> S::Value {
    s.new_tree(runner).expect("strategy never rejects").current()
}

/// Expected size of a set by brute force over every outcome of its
/// uncertain candidates; `Uncertain` counts as a fair coin.
pub fn enumerate_cardinality(base: usize, candidates: &[f64]) -> (usize, usize, f64) {
    let k = candidates.len();
    let mut min = usize::MAX;
    let mut max = 0;
    let mut expected = 0.0;
    for mask in 0u32..(1 << k) {
        let mut weight = 1.0;
        let mut size = base;
        for (i, p) in candidates.iter().enumerate() {
            if mask & (1 << i) != 0 {
                weight *= p;
                size += 1;
            } else {
                weight *= 1.0 - p;
            }
        }
        min = min.min(size);
        max = max.max(size);
        expected += weight * size as f64;
    }
    (min, max, expected)
}
