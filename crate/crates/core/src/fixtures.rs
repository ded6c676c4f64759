//! Small example datasets about students (elements) enrolled in courses
//! (sets). Used by the tests and handy for trying the CLI.

use crate::model::{
    AttributeSchema, AttributeValue, Element, Membership, MembershipStatus, SetDef, SetFamily,
};

/// Six students and four courses. Memberships of Alex, Ben, Chris and Dana
/// are certain, Biology is known to be empty, and the memberships of Eva,
/// Frank and the Math roster are unknown.
pub fn courses_family() -> SetFamily {
    let certain = [("a", "F"), ("a", "H"), ("b", "H"), ("c", "F"), ("d", "F"), ("d", "H")];
    SetFamily {
        sets: vec![
            SetDef::new("B", "Biology").empty(),
            SetDef::new("F", "French"),
            SetDef::new("H", "History"),
            SetDef::new("M", "Math").uncertain(),
        ],
        elements: vec![
            Element::new("a", "Alex"),
            Element::new("b", "Ben"),
            Element::new("c", "Chris"),
            Element::new("d", "Dana"),
            Element::new("e", "Eva").uncertain(),
            Element::new("f", "Frank").uncertain(),
        ],
        memberships: certain
            .iter()
            .map(|(e, s)| Membership::new(*e, *s, MembershipStatus::CertainMember))
            .collect(),
        attributes: vec![],
        disclaimer_uncertain: false,
    }
}

/// Which flavour of attribute uncertainty a course dataset carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavour {
    /// Every value known.
    Certain,
    /// Some values missing, some given but possibly wrong.
    Partial,
    /// Every value given, but the attribute as a whole is doubted.
    Blanket,
}

const COURSES: [(&str, &str); 3] = [("F", "French"), ("H", "History"), ("M", "Math")];

/// One region signature and the values of its students.
type Row<'a, V> = (&'a [&'a str], Vec<(V, char)>);

/// Builds a three-course family from (region signature, [(value, marker)]) rows.
/// Marker: 'k' known, 'f' flagged, 'm' missing.
fn courses<V: Clone + Into<crate::model::Datum>>(
    attribute: AttributeSchema,
    rows: &[Row<'_, V>],
) -> SetFamily {
    let mut elements = Vec::new();
    let mut memberships = Vec::new();
    let mut n = 0;
    for (signature, values) in rows {
        for (v, marker) in values {
            n += 1;
            let id = format!("s{n:02}");
            let value = match marker {
                'k' => AttributeValue::Known(v.clone().into()),
                'f' => AttributeValue::Flagged(v.clone().into()),
                _ => AttributeValue::Missing,
            };
            elements.push(Element::new(&id, format!("Student {n}")).with_value(&attribute.name, value));
            for (set, _) in COURSES {
                let status = if signature.contains(&set) {
                    MembershipStatus::CertainMember
                } else {
                    MembershipStatus::CertainNonMember
                };
                memberships.push(Membership::new(&id, set, status));
            }
        }
    }
    SetFamily {
        sets: COURSES.iter().map(|(id, l)| SetDef::new(*id, *l)).collect(),
        elements,
        memberships,
        attributes: vec![attribute],
        disclaimer_uncertain: false,
    }
}

/// Residential status of fifteen students in five course regions
/// ({F}, {F,H}, {H}, {H,M}, {M}).
///
/// Certain: international ratio [1/5, 1/2, 1/3, 0, 2/4].
/// Partial, using given values and certainty over all students:
/// ratio [1/4, 1/2, 0, 0, 1/4], certainty [2/5, 1/2, 1/3, 1, 2/4].
pub fn residency_family(flavour: Flavour) -> SetFamily {
    let schema = AttributeSchema::categorical("residency", ["domestic", "international"]);
    let d = "domestic";
    let i = "international";
    let rows: Vec<Row<&str>> = match flavour {
        Flavour::Certain | Flavour::Blanket => vec![
            (&["F"], vec![(i, 'k'), (d, 'k'), (d, 'k'), (d, 'k'), (d, 'k')]),
            (&["F", "H"], vec![(i, 'k'), (d, 'k')]),
            (&["H"], vec![(i, 'k'), (d, 'k'), (d, 'k')]),
            (&["H", "M"], vec![(d, 'k')]),
            (&["M"], vec![(i, 'k'), (i, 'k'), (d, 'k'), (d, 'k')]),
        ],
        Flavour::Partial => vec![
            (&["F"], vec![(d, 'k'), (d, 'k'), (i, 'f'), (d, 'f'), (d, 'm')]),
            (&["F", "H"], vec![(i, 'k'), (d, 'f')]),
            (&["H"], vec![(d, 'k'), (d, 'f'), (d, 'm')]),
            (&["H", "M"], vec![(d, 'k')]),
            (&["M"], vec![(d, 'k'), (d, 'k'), (i, 'f'), (d, 'f')]),
        ],
    };
    let mut f = courses(schema, &rows);
    if flavour == Flavour::Blanket {
        f.attributes[0].uncertain_everywhere = true;
    }
    f
}

/// Ages of sixteen students in five course regions
/// ({F}, {F,H}, {H}, {H,M}, {M}).
///
/// Certain: mean age [26.2, 19.5, 22, 34, 24.5].
/// Partial, using given values and certainty over all students:
/// mean [30, 19.5, 23, 34, 30], certainty [2/5, 1, 1/3, 1/2, 1/4].
pub fn age_family(flavour: Flavour) -> SetFamily {
    let schema = AttributeSchema::numeric("age", 15.0, 60.0).with_unit("yrs");
    let rows: Vec<Row<f64>> = match flavour {
        Flavour::Certain | Flavour::Blanket => vec![
            (&["F"], vec![(20.0, 'k'), (22.0, 'k'), (25.0, 'k'), (30.0, 'k'), (34.0, 'k')]),
            (&["F", "H"], vec![(19.0, 'k'), (20.0, 'k')]),
            (&["H"], vec![(20.0, 'k'), (22.0, 'k'), (24.0, 'k')]),
            (&["H", "M"], vec![(30.0, 'k'), (38.0, 'k')]),
            (&["M"], vec![(20.0, 'k'), (22.0, 'k'), (26.0, 'k'), (30.0, 'k')]),
        ],
        Flavour::Partial => vec![
            (&["F"], vec![(25.0, 'k'), (34.0, 'k'), (30.0, 'f'), (31.0, 'f'), (0.0, 'm')]),
            (&["F", "H"], vec![(19.0, 'k'), (20.0, 'k')]),
            (&["H"], vec![(22.0, 'k'), (24.0, 'f'), (0.0, 'm')]),
            (&["H", "M"], vec![(34.0, 'k'), (0.0, 'm')]),
            (&["M"], vec![(20.0, 'k'), (30.0, 'f'), (40.0, 'f'), (0.0, 'm')]),
        ],
    };
    let mut f = courses(schema, &rows);
    if flavour == Flavour::Blanket {
        f.attributes[0].uncertain_everywhere = true;
    }
    f
}

/// Two courses with twenty enrolled students each. In the `Certain`
/// flavour every age is known; otherwise five students per course have an
/// unknown age, an age above 30, or an age in 20–30.
pub fn dotplot_family(flavour: Flavour) -> SetFamily {
    let schema = AttributeSchema::numeric("age", 15.0, 60.0).with_unit("yrs");
    let mut elements = Vec::new();
    let mut memberships = Vec::new();
    for (c, course) in ["A", "B"].iter().enumerate() {
        for k in 0..20 {
            let id = format!("{}{:02}", course.to_lowercase(), k + 1);
            let age = 18.0 + ((k * 7 + c * 3) % 23) as f64;
            let value = match (flavour, k) {
                (Flavour::Certain, _) | (_, 0..=14) => AttributeValue::known(age),
                (_, 15 | 16) => AttributeValue::range(20.0, 30.0),
                (_, 17 | 18) => AttributeValue::range(30.0, 60.0),
                _ => AttributeValue::Missing,
            };
            elements.push(Element::new(&id, &id).with_value("age", value));
            memberships.push(Membership::new(&id, *course, MembershipStatus::CertainMember));
        }
    }
    SetFamily {
        sets: vec![SetDef::new("A", "Course A"), SetDef::new("B", "Course B")],
        elements,
        memberships,
        attributes: vec![schema],
        disclaimer_uncertain: false,
    }
}
