//! Renderer-independent scenes for the five views: bipartite node-link
//! diagram, membership matrix, aggregate matrix, Euler diagram and
//! element-attribute dot plot.
//!
//! A [`Scene`] is an ordered display list. Every primitive carries one
//! [`Role`] tag and the ids of the elements and sets it stands for.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::aggregate::{
    enumerate_regions, summary_table, AggregateCell, AggregateError, AggregateSpec, CellScope,
    SummaryScope,
};
use crate::encode::{
    element_value_class, CellVariant, DashPattern, EncodeError, GrayscaleClass, TextureSpec, Theme,
};
use crate::geometry::{
    clearance, fmt_num, grid_points, region_anchor, region_paths, Circle, Path, Point,
};
use crate::model::{
    expand_memberships, validate, AttributeValue, ExpandError, ExpandedMembership, Id,
    MembershipStatus, SetFamily, Violation,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LayoutError {
    #[error("family is not valid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("Euler templates support 1 to 3 sets, got {0}; use a matrix view instead")]
    UnsupportedSetCount(usize),
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("attribute {0:?} is not numeric")]
    NotNumeric(String),
    #[error(transparent)]
    Aggregate(#[from] AggregateError),
    #[error(transparent)]
    Expand(#[from] ExpandError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

/// Semantic tag of a primitive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    CertainLink,
    UncertainLink,
    ProbabilityLink,
    FanStub,
    ElementNode,
    SetNode,
    Label,
    Grid,
    CertainCell,
    UncertainCell,
    ProbabilityCell,
    SignatureDot,
    AggregateCell,
    NoDataCell,
    PieFrame,
    PieValue,
    PieCertainty,
    SetOutline,
    Region(Vec<Id>),
    Texture(Vec<Id>),
    ElementDot,
    UncertainDot,
    OutsideDot,
    ValueDot(GrayscaleClass),
    ExtentBar,
    Axis,
    Disclaimer,
}

impl Role {
    /// Roles that stand for an uncertain membership.
    pub fn is_uncertain_membership(&self) -> bool {
        matches!(
            self,
            Role::UncertainLink
                | Role::ProbabilityLink
                | Role::FanStub
                | Role::UncertainCell
                | Role::ProbabilityCell
        )
    }

    pub fn is_region(&self) -> bool {
        matches!(self, Role::Region(_))
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Role::CertainLink => "certain-link",
            Role::UncertainLink => "uncertain-link",
            Role::ProbabilityLink => "probability-link",
            Role::FanStub => "fan-stub",
            Role::ElementNode => "element-node",
            Role::SetNode => "set-node",
            Role::Label => "label",
            Role::Grid => "grid",
            Role::CertainCell => "certain-cell",
            Role::UncertainCell => "uncertain-cell",
            Role::ProbabilityCell => "probability-cell",
            Role::SignatureDot => "signature-dot",
            Role::AggregateCell => "aggregate-cell",
            Role::NoDataCell => "no-data-cell",
            Role::PieFrame => "pie-frame",
            Role::PieValue => "pie-value",
            Role::PieCertainty => "pie-certainty",
            Role::SetOutline => "set-outline",
            Role::Region(sig) => return write!(f, "region:{{{}}}", sig.join(",")),
            Role::Texture(sig) => return write!(f, "texture:{{{}}}", sig.join(",")),
            Role::ElementDot => "element-dot",
            Role::UncertainDot => "uncertain-dot",
            Role::OutsideDot => "outside-dot",
            Role::ValueDot(c) => return write!(f, "value-dot:{}", c.name()),
            Role::ExtentBar => "extent-bar",
            Role::Axis => "axis",
            Role::Disclaimer => "disclaimer",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fill {
    None,
    /// Gray of the given lightness in percent.
    Gray(f64),
    Hatch(TextureSpec),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stroke {
    pub lightness: f64,
    pub width: f64,
    /// (on, off) dash lengths; `None` is solid.
    pub dash: Option<(f64, f64)>,
}

impl Stroke {
    pub fn solid(lightness: f64, width: f64) -> Self {
        Stroke {
            lightness,
            width,
            dash: None,
        }
    }

    pub fn dashed(lightness: f64, width: f64, dash: &DashPattern) -> Self {
        Stroke {
            lightness,
            width,
            dash: dash.dash_array(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Style {
    pub fill: Fill,
    pub stroke: Option<Stroke>,
    pub italic: bool,
}

impl Style {
    pub fn fill(lightness: f64) -> Self {
        Style {
            fill: Fill::Gray(lightness),
            stroke: None,
            italic: false,
        }
    }

    pub fn stroke(stroke: Stroke) -> Self {
        Style {
            fill: Fill::None,
            stroke: Some(stroke),
            italic: false,
        }
    }

    pub fn with_stroke(mut self, stroke: Stroke) -> Self {
        self.stroke = Some(stroke);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    Start,
    Middle,
    End,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Line { from: Point, to: Point },
    Circle { center: Point, r: f64 },
    Rect { x: f64, y: f64, w: f64, h: f64 },
    Path(Path),
    Text { at: Point, text: String, anchor: Anchor, size: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Primitive {
    pub shape: Shape,
    pub role: Role,
    /// Ids of the elements and sets the primitive stands for.
    pub refs: Vec<Id>,
    pub style: Style,
}

/// What a legend entry explains. Entries are listed in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LegendKind {
    CertainMembership,
    UncertainMembership,
    ProbabilityHigh,
    ProbabilityLow,
    FanStub,
    ValueHigh,
    ValueLow,
    NoData,
    CertaintyFull,
    CertaintyHalf,
    CertaintyNone,
    Texture,
    Gray(GrayscaleClass),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Swatch {
    Line(Stroke),
    Box { style: Style, size_fraction: f64 },
    Dot(Style),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LegendEntry {
    pub kind: LegendKind,
    pub label: String,
    pub swatch: Swatch,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scene {
    pub width: f64,
    pub height: f64,
    pub primitives: Vec<Primitive>,
    pub legend: Vec<LegendEntry>,
}

impl Scene {
    fn new(width: f64, height: f64) -> Self {
        Scene {
            width,
            height,
            ..Default::default()
        }
    }

    pub fn count(&self, pred: impl Fn(&Role) -> bool) -> usize {
        self.primitives.iter().filter(|p| pred(&p.role)).count()
    }

    pub fn with_role<'a>(&'a self, role: &'a Role) -> impl Iterator<Item = &'a Primitive> + 'a {
        self.primitives.iter().filter(move |p| &p.role == role)
    }

    fn push(&mut self, shape: Shape, role: Role, refs: Vec<Id>, style: Style) {
        self.primitives.push(Primitive {
            shape,
            role,
            refs,
            style,
        });
    }

    fn text(&mut self, at: Point, text: impl Into<String>, anchor: Anchor, refs: Vec<Id>) {
        self.push(
            Shape::Text {
                at,
                text: text.into(),
                anchor,
                size: 11.0,
            },
            Role::Label,
            refs,
            Style::fill(0.0),
        );
    }
}

#[derive(Default)]
struct Legend(BTreeMap<LegendKind, LegendEntry>);

impl Legend {
    fn add(&mut self, kind: LegendKind, label: impl Into<String>, swatch: Swatch) {
        self.0.entry(kind).or_insert_with(|| LegendEntry {
            kind,
            label: label.into(),
            swatch,
        });
    }

    fn certainty(&mut self, theme: &Theme, certainty: f64) -> Result<(), EncodeError> {
        let sample = |c: f64| -> Result<Swatch, EncodeError> {
            Ok(Swatch::Line(Stroke::dashed(
                theme.lightness_dark,
                1.5,
                &theme.certainty_to_dash(c)?,
            )))
        };
        self.add(LegendKind::CertaintyFull, "certainty 1 (solid outline)", sample(1.0)?);
        if certainty < 1.0 {
            self.add(LegendKind::CertaintyHalf, "certainty 0.5", sample(0.5)?);
            self.add(LegendKind::CertaintyNone, "certainty 0 (dotted outline)", sample(0.0)?);
        }
        Ok(())
    }

    fn value_ramp(&mut self, theme: &Theme, lo: f64, hi: f64, what: &str) {
        self.add(
            LegendKind::ValueHigh,
            format!("{what} {}", fmt_num(hi)),
            Swatch::Box {
                style: Style::fill(theme.lightness_dark),
                size_fraction: 1.0,
            },
        );
        self.add(
            LegendKind::ValueLow,
            format!("{what} {}", fmt_num(lo)),
            Swatch::Box {
                style: Style::fill(theme.lightness_light),
                size_fraction: 1.0,
            },
        );
    }

    fn no_data(&mut self, theme: &Theme) {
        self.add(
            LegendKind::NoData,
            "no data",
            Swatch::Box {
                style: no_data_style(theme),
                size_fraction: 1.0,
            },
        );
    }

    fn finish(self) -> Vec<LegendEntry> {
        self.0.into_values().collect()
    }
}

fn no_data_style(theme: &Theme) -> Style {
    Style::stroke(Stroke {
        lightness: theme.lightness_light,
        width: 1.0,
        dash: Some((2.0, 2.0)),
    })
}

fn check(family: &SetFamily) -> Result<(), LayoutError> {
    let v = validate(family);
    if v.is_empty() {
        Ok(())
    } else {
        Err(LayoutError::Invalid(v))
    }
}

fn what(spec: &AggregateSpec) -> String {
    match &spec.kind {
        crate::aggregate::AggregateKind::Proportion { target } => {
            format!("share {target}")
        }
        crate::aggregate::AggregateKind::Mean => format!("mean {}", spec.attribute),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BipartiteVariant {
    /// Every possible uncertain membership gets its own thin light link.
    FullLinks,
    /// Uncertain memberships become short stubs fanning out of a node.
    Fans,
    /// Probabilities drive link width and lightness.
    Probability,
}

const NODE_R: f64 = 5.0;

/// Elements in a left column, sets in a right column, memberships as links.
///
/// With `pies`, every set node gets a pie of its aggregate value and a pie
/// of its certainty.
pub fn layout_bipartite(
    family: &SetFamily,
    variant: BipartiteVariant,
    pies: Option<&AggregateSpec>,
    theme: &Theme,
) -> Result<Scene, LayoutError> {
    check(family)?;
    let table = expand_memberships(family)?;
    let has_probability = table
        .iter()
        .any(|m| matches!(m.status, MembershipStatus::Probability(_)));
    let variant = if variant == BipartiteVariant::Probability && !has_probability {
        log::warn!("no membership probabilities to show; drawing full links instead");
        BipartiteVariant::FullLinks
    } else {
        variant
    };
    let pie_cells = match pies {
        Some(spec) => Some((spec, summary_table(family, spec, SummaryScope::Sets)?)),
        None => None,
    };

    let elements = family.sorted_elements();
    let sets = family.sorted_set_ids();
    let gap = 28.0;
    let top = 30.0;
    let rows = elements.len().max(sets.len()).max(1) as f64;
    let span = rows * gap;
    let left = 120.0;
    let right = 360.0;
    let width = if pie_cells.is_some() { 560.0 } else { 500.0 };
    let mut scene = Scene::new(width, top + span + 20.0);
    let mut legend = Legend::default();

    let column = |i: usize, n: usize| top + (i as f64 + 0.5) * span / n.max(1) as f64;
    let el_pos: BTreeMap<&str, Point> = elements
        .iter()
        .enumerate()
        .map(|(i, e)| (e.id.as_str(), Point::new(left, column(i, elements.len()))))
        .collect();
    let set_pos: BTreeMap<&str, Point> = sets
        .iter()
        .enumerate()
        .map(|(i, s)| (*s, Point::new(right, column(i, sets.len()))))
        .collect();

    let certain = theme.certain_line();
    legend.add(
        LegendKind::CertainMembership,
        "certain membership",
        Swatch::Line(Stroke::solid(certain.lightness, certain.width)),
    );
    if elements.is_empty() && sets.is_empty() {
        scene.legend = legend.finish();
        return Ok(scene);
    }

    // links below nodes: certain first, then uncertain
    for m in table.iter().filter(|m| m.status == MembershipStatus::CertainMember) {
        scene.push(
            Shape::Line {
                from: el_pos[m.element.as_str()],
                to: set_pos[m.set.as_str()],
            },
            Role::CertainLink,
            vec![m.element.clone(), m.set.clone()],
            Style::stroke(Stroke::solid(certain.lightness, certain.width)),
        );
    }

    let uncertain: Vec<&ExpandedMembership> =
        table.iter().filter(|m| m.status.is_uncertain()).collect();
    match variant {
        BipartiteVariant::FullLinks | BipartiteVariant::Probability => {
            for m in &uncertain {
                let (role, style) = match (variant, m.status) {
                    (BipartiteVariant::Probability, MembershipStatus::Probability(p)) => {
                        let lo = theme.membership_line_style(MembershipStatus::Probability(0.0))?;
                        let hi = theme.membership_line_style(MembershipStatus::Probability(1.0))?;
                        legend.add(
                            LegendKind::ProbabilityHigh,
                            "membership probability 1",
                            Swatch::Line(Stroke::solid(hi.lightness, hi.width)),
                        );
                        legend.add(
                            LegendKind::ProbabilityLow,
                            "membership probability 0",
                            Swatch::Line(Stroke::solid(lo.lightness, lo.width)),
                        );
                        (Role::ProbabilityLink, theme.membership_line_style(MembershipStatus::Probability(p))?)
                    }
                    _ => {
                        let s = theme.uncertain_line();
                        legend.add(
                            LegendKind::UncertainMembership,
                            "possible membership",
                            Swatch::Line(Stroke::solid(s.lightness, s.width)),
                        );
                        (Role::UncertainLink, s)
                    }
                };
                scene.push(
                    Shape::Line {
                        from: el_pos[m.element.as_str()],
                        to: set_pos[m.set.as_str()],
                    },
                    role,
                    vec![m.element.clone(), m.set.clone()],
                    Style::stroke(Stroke::solid(style.lightness, style.width)),
                );
            }
        }
        BipartiteVariant::Fans => {
            // one stub per uncertain pair, at the end whose uncertainty produced it
            let mut at_element: BTreeMap<&str, Vec<&ExpandedMembership>> = BTreeMap::new();
            let mut at_set: BTreeMap<&str, Vec<&ExpandedMembership>> = BTreeMap::new();
            for m in &uncertain {
                let el = family.element(&m.element).map(|e| e.membership_uncertain);
                let set = family.set(&m.set).map(|s| s.membership_uncertain);
                if theme.set_side_fans && set == Some(true) && el != Some(true) {
                    at_set.entry(&m.set).or_default().push(m);
                } else {
                    at_element.entry(&m.element).or_default().push(m);
                }
            }
            let s = theme.uncertain_line();
            let stroke = Stroke::solid(s.lightness, s.width);
            if !uncertain.is_empty() {
                legend.add(
                    LegendKind::FanStub,
                    "possible memberships (one stub each)",
                    Swatch::Line(stroke),
                );
            }
            let fans = at_element
                .iter()
                .map(|(id, ms)| (el_pos[id], 0.0, ms))
                .chain(at_set.iter().map(|(id, ms)| (set_pos[id], PI, ms)));
            for (origin, base, ms) in fans {
                let k = ms.len();
                let spread = theme.fan_spread.to_radians();
                for (j, m) in ms.iter().enumerate() {
                    let angle = if k == 1 {
                        base
                    } else {
                        base - spread + 2.0 * spread * j as f64 / (k - 1) as f64
                    };
                    let (dx, dy) = (angle.cos(), angle.sin());
                    scene.push(
                        Shape::Line {
                            from: Point::new(origin.x + NODE_R * dx, origin.y + NODE_R * dy),
                            to: Point::new(
                                origin.x + (NODE_R + theme.fan_length) * dx,
                                origin.y + (NODE_R + theme.fan_length) * dy,
                            ),
                        },
                        Role::FanStub,
                        vec![m.element.clone(), m.set.clone()],
                        Style::stroke(stroke),
                    );
                }
            }
        }
    }

    for e in &elements {
        let p = el_pos[e.id.as_str()];
        scene.push(
            Shape::Circle { center: p, r: NODE_R },
            Role::ElementNode,
            vec![e.id.clone()],
            Style::fill(theme.lightness_dark),
        );
        scene.text(
            Point::new(p.x - 12.0, p.y + 4.0),
            &e.label,
            Anchor::End,
            vec![e.id.clone()],
        );
    }
    for s in &sets {
        let p = set_pos[s];
        let label = family.set(s).map(|d| d.label.clone()).unwrap_or_default();
        scene.push(
            Shape::Circle { center: p, r: NODE_R },
            Role::SetNode,
            vec![s.to_string()],
            Style::fill(theme.lightness_dark),
        );
        scene.text(Point::new(p.x + 12.0, p.y + 4.0), label, Anchor::Start, vec![s.to_string()]);
    }

    if let Some((spec, cells)) = pie_cells {
        let schema = spec.schema(family)?;
        let (lo, hi) = spec.value_domain(schema);
        legend.add(
            LegendKind::ValueHigh,
            format!("dark wedge: {}", what(spec)),
            Swatch::Box {
                style: Style::fill(theme.lightness_dark),
                size_fraction: 1.0,
            },
        );
        legend.add(
            LegendKind::CertaintyFull,
            "light wedge: certainty",
            Swatch::Box {
                style: Style::fill(theme.lightness_light),
                size_fraction: 1.0,
            },
        );
        for cell in cells {
            let CellScope::Set(id) = &cell.scope else { continue };
            let p = set_pos[id.as_str()];
            let value_disc = Circle::new(p.x + 110.0, p.y, 9.0);
            let certainty_disc = Circle::new(p.x + 135.0, p.y, 9.0);
            let frame = Style::stroke(Stroke::solid(theme.lightness_dark, 0.75));
            match cell.value {
                Some(v) => {
                    let fraction = if hi > lo { ((v - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.5 };
                    scene.push(Shape::Path(Path::circle(&value_disc)), Role::PieFrame, vec![id.clone()], frame);
                    scene.push(
                        Shape::Path(Path::wedge(&value_disc, fraction)),
                        Role::PieValue,
                        vec![id.clone()],
                        Style::fill(theme.lightness_dark),
                    );
                }
                None => {
                    legend.no_data(theme);
                    scene.push(
                        Shape::Path(Path::circle(&value_disc)),
                        Role::NoDataCell,
                        vec![id.clone()],
                        no_data_style(theme),
                    );
                }
            }
            scene.push(Shape::Path(Path::circle(&certainty_disc)), Role::PieFrame, vec![id.clone()], frame);
            scene.push(
                Shape::Path(Path::wedge(&certainty_disc, cell.certainty)),
                Role::PieCertainty,
                vec![id.clone()],
                Style::fill(theme.lightness_light),
            );
        }
    }

    scene.legend = legend.finish();
    Ok(scene)
}

const CELL: f64 = 20.0;

/// Elements as rows, sets as columns, one mark per possible membership.
pub fn layout_membership_matrix(
    family: &SetFamily,
    variant: CellVariant,
    theme: &Theme,
) -> Result<Scene, LayoutError> {
    check(family)?;
    let table = expand_memberships(family)?;
    let elements = family.sorted_elements();
    let sets = family.sorted_set_ids();
    let (left, top) = (100.0, 40.0);
    let mut scene = Scene::new(
        left + sets.len() as f64 * CELL + 20.0,
        top + elements.len() as f64 * CELL + 20.0,
    );
    let mut legend = Legend::default();

    scene.push(
        Shape::Rect {
            x: left,
            y: top,
            w: sets.len() as f64 * CELL,
            h: elements.len() as f64 * CELL,
        },
        Role::Grid,
        vec![],
        Style::stroke(Stroke::solid(theme.lightness_light, 0.5)),
    );
    for (c, s) in sets.iter().enumerate() {
        scene.text(
            Point::new(left + (c as f64 + 0.5) * CELL, top - 8.0),
            *s,
            Anchor::Middle,
            vec![s.to_string()],
        );
    }
    for (r, e) in elements.iter().enumerate() {
        scene.text(
            Point::new(left - 8.0, top + (r as f64 + 0.5) * CELL + 4.0),
            &e.label,
            Anchor::End,
            vec![e.id.clone()],
        );
    }

    let n_sets = sets.len();
    for (i, m) in table.iter().enumerate() {
        if m.status == MembershipStatus::CertainNonMember {
            continue;
        }
        let (r, c) = (i / n_sets, i % n_sets);
        let style = theme.membership_cell_style(m.status, variant)?;
        let role = match (m.status, variant) {
            (MembershipStatus::CertainMember, _) => Role::CertainCell,
            (MembershipStatus::Probability(_), CellVariant::SizeColor) => Role::ProbabilityCell,
            _ => Role::UncertainCell,
        };
        let swatch = Swatch::Box {
            style: Style::fill(style.lightness),
            size_fraction: style.size_fraction,
        };
        match role {
            Role::CertainCell => legend.add(LegendKind::CertainMembership, "certain membership", swatch),
            Role::ProbabilityCell => {
                for (kind, p) in [(LegendKind::ProbabilityHigh, 1.0), (LegendKind::ProbabilityLow, 0.0)] {
                    let s = theme.membership_cell_style(
                        MembershipStatus::Probability(p),
                        CellVariant::SizeColor,
                    )?;
                    legend.add(
                        kind,
                        format!("membership probability {p}"),
                        Swatch::Box {
                            style: Style::fill(s.lightness),
                            size_fraction: s.size_fraction,
                        },
                    );
                }
            }
            _ => legend.add(LegendKind::UncertainMembership, "possible membership", swatch),
        }
        let side = (CELL - 2.0) * style.size_fraction;
        let cx = left + (c as f64 + 0.5) * CELL;
        let cy = top + (r as f64 + 0.5) * CELL;
        scene.push(
            Shape::Rect {
                x: cx - side / 2.0,
                y: cy - side / 2.0,
                w: side,
                h: side,
            },
            role,
            vec![m.element.clone(), m.set.clone()],
            Style::fill(style.lightness),
        );
    }
    scene.legend = legend.finish();
    Ok(scene)
}

fn cell_label(cell: &AggregateCell) -> String {
    let value = cell.value.map(fmt_value).unwrap_or_else(|| "n/a".into());
    format!("{value} ({})", fmt_value(cell.certainty))
}

fn fmt_value(v: f64) -> String {
    format!("{:.2}", v)
}

/// One row per region and one per whole set; each row marks the sets it
/// covers and shows the aggregate as a value-shaded cell whose border dash
/// encodes certainty.
pub fn layout_aggregate_matrix(
    family: &SetFamily,
    spec: &AggregateSpec,
    theme: &Theme,
) -> Result<Scene, LayoutError> {
    check(family)?;
    let schema = spec.schema(family)?;
    let (lo, hi) = spec.value_domain(schema);
    let mut rows = summary_table(family, spec, SummaryScope::Regions)?;
    rows.extend(summary_table(family, spec, SummaryScope::Sets)?);
    let sets = family.sorted_set_ids();

    let (left, top) = (110.0, 40.0);
    let value_x = left + sets.len() as f64 * CELL + 10.0;
    let mut scene = Scene::new(value_x + 2.0 * CELL + 110.0, top + rows.len() as f64 * CELL + 20.0);
    let mut legend = Legend::default();
    legend.value_ramp(theme, lo, hi, &what(spec));

    for (c, s) in sets.iter().enumerate() {
        scene.text(
            Point::new(left + (c as f64 + 0.5) * CELL, top - 8.0),
            *s,
            Anchor::Middle,
            vec![s.to_string()],
        );
    }
    scene.text(
        Point::new(value_x + CELL, top - 8.0),
        what(spec),
        Anchor::Start,
        vec![],
    );

    for (r, cell) in rows.iter().enumerate() {
        let cy = top + (r as f64 + 0.5) * CELL;
        let (covered, label): (Vec<Id>, String) = match &cell.scope {
            CellScope::Region(sig) => (sig.clone(), sig.join(" & ")),
            CellScope::Set(id) => (vec![id.clone()], format!("all of {id}")),
        };
        scene.text(Point::new(left - 8.0, cy + 4.0), label, Anchor::End, covered.clone());
        for (c, s) in sets.iter().enumerate() {
            if covered.iter().any(|x| x == s) {
                scene.push(
                    Shape::Circle {
                        center: Point::new(left + (c as f64 + 0.5) * CELL, cy),
                        r: 4.0,
                    },
                    Role::SignatureDot,
                    vec![s.to_string()],
                    Style::fill(theme.lightness_dark),
                );
            }
        }
        let rect = Shape::Rect {
            x: value_x + 1.0,
            y: cy - CELL / 2.0 + 1.0,
            w: 2.0 * CELL - 2.0,
            h: CELL - 2.0,
        };
        match cell.value {
            Some(v) => {
                let dash = theme.certainty_to_dash(cell.certainty)?;
                legend.certainty(theme, cell.certainty)?;
                scene.push(
                    rect,
                    Role::AggregateCell,
                    covered.clone(),
                    Style::fill(theme.value_to_lightness(v, lo, hi)?)
                        .with_stroke(Stroke::dashed(theme.lightness_dark, 1.5, &dash)),
                );
            }
            None => {
                legend.no_data(theme);
                scene.push(rect, Role::NoDataCell, covered.clone(), no_data_style(theme));
            }
        }
        scene.text(
            Point::new(value_x + 2.0 * CELL + 8.0, cy + 4.0),
            cell_label(cell),
            Anchor::Start,
            covered,
        );
    }
    scene.legend = legend.finish();
    Ok(scene)
}

#[derive(Debug, Clone, PartialEq)]
pub enum EulerMode {
    /// Elements as dots inside their region.
    Membership,
    /// Region fill shows the aggregate, the outline dash its certainty.
    Aggregate(AggregateSpec),
    /// Region fill shows the aggregate; a hatch on every region and a
    /// caption say that all of the data is uncertain.
    AggregateTextured(AggregateSpec),
}

pub const EULER_SIZE: (f64, f64) = (360.0, 370.0);

/// Fixed circle templates for one to three sets.
pub fn euler_template(k: usize) -> Option<Vec<Circle>> {
    match k {
        1 => Some(vec![Circle::new(180.0, 170.0, 110.0)]),
        2 => Some(vec![Circle::new(140.0, 170.0, 100.0), Circle::new(220.0, 170.0, 100.0)]),
        3 => Some(vec![
            Circle::new(180.0, 125.0, 95.0),
            Circle::new(130.0, 210.0, 95.0),
            Circle::new(230.0, 210.0, 95.0),
        ]),
        _ => None,
    }
}

const DOT_R: f64 = 4.0;

/// Dot positions inside a region, nearest to its anchor first.
fn dot_slots(circles: &[Circle], signature: &[usize], anchor: Point, needed: usize) -> Vec<Point> {
    let mut step = 14.0;
    loop {
        let mut pts: Vec<Point> = grid_points(circles, signature, step)
            .into_iter()
            .filter(|p| clearance(circles, p) >= DOT_R + 2.0)
            .collect();
        pts.sort_by(|a, b| {
            a.dist(&anchor)
                .total_cmp(&b.dist(&anchor))
                .then(a.y.total_cmp(&b.y))
                .then(a.x.total_cmp(&b.x))
        });
        if pts.len() >= needed || step < 3.0 {
            if pts.is_empty() {
                pts.push(anchor);
            }
            return pts;
        }
        step /= 2.0;
    }
}

pub fn layout_euler(family: &SetFamily, mode: &EulerMode, theme: &Theme) -> Result<Scene, LayoutError> {
    check(family)?;
    let sets = family.sorted_set_ids();
    let circles = euler_template(sets.len()).ok_or(LayoutError::UnsupportedSetCount(sets.len()))?;
    let regions = region_paths(&circles);
    let ids = |sig: &[usize]| -> Vec<Id> { sig.iter().map(|&i| sets[i].to_string()).collect() };

    let (width, height) = EULER_SIZE;
    let mut scene = Scene::new(width, height);
    let mut legend = Legend::default();

    match mode {
        EulerMode::Membership => {
            let table = expand_memberships(family)?;
            let mut signature: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            let mut doubtful: BTreeSet<&str> = BTreeSet::new();
            for e in &family.elements {
                signature.entry(e.id.as_str()).or_default();
            }
            for m in &table {
                match m.status {
                    MembershipStatus::CertainMember => {
                        let idx = sets.iter().position(|s| *s == m.set).expect("known set");
                        signature.entry(&m.element).or_default().push(idx);
                    }
                    MembershipStatus::Uncertain | MembershipStatus::Probability(_) => {
                        doubtful.insert(&m.element);
                    }
                    MembershipStatus::CertainNonMember => {}
                }
            }
            let region_style = Style::fill(97.0).with_stroke(Stroke::solid(theme.lightness_dark, 1.5));
            for (sig, path) in &regions {
                scene.push(Shape::Path(path.clone()), Role::Region(ids(sig)), ids(sig), region_style);
            }
            let mut by_region: BTreeMap<Vec<usize>, Vec<&str>> = BTreeMap::new();
            for (el, sig) in &signature {
                by_region.entry(sig.clone()).or_default().push(el);
            }
            legend.add(
                LegendKind::CertainMembership,
                "element (certain membership)",
                Swatch::Dot(Style::fill(theme.lightness_dark)),
            );
            for (sig, members) in &by_region {
                if sig.is_empty() {
                    continue;
                }
                let anchor = region_anchor(&circles, sig, 2.0).unwrap_or(circles[sig[0]].center);
                let slots = dot_slots(&circles, sig, anchor, members.len());
                for (n, el) in members.iter().enumerate() {
                    let (role, fill) = if doubtful.contains(el) {
                        legend.add(
                            LegendKind::UncertainMembership,
                            "element with uncertain memberships",
                            Swatch::Dot(Style::fill(theme.lightness_light)),
                        );
                        (Role::UncertainDot, theme.lightness_light)
                    } else {
                        (Role::ElementDot, theme.lightness_dark)
                    };
                    let mut refs = vec![el.to_string()];
                    refs.extend(ids(sig));
                    scene.push(
                        Shape::Circle {
                            center: slots[n % slots.len()],
                            r: DOT_R,
                        },
                        role,
                        refs,
                        Style::fill(fill),
                    );
                }
            }
            if let Some(outside) = by_region.get(&Vec::new()) {
                for (n, el) in outside.iter().enumerate() {
                    let fill = if doubtful.contains(el) {
                        theme.lightness_light
                    } else {
                        theme.lightness_dark
                    };
                    scene.push(
                        Shape::Circle {
                            center: Point::new(20.0 + (n % 40) as f64 * 8.0, height - 12.0),
                            r: DOT_R - 1.0,
                        },
                        Role::OutsideDot,
                        vec![el.to_string()],
                        Style::fill(fill),
                    );
                }
            }
        }
        EulerMode::Aggregate(spec) | EulerMode::AggregateTextured(spec) => {
            let textured = matches!(mode, EulerMode::AggregateTextured(_));
            let schema = spec.schema(family)?;
            let (lo, hi) = spec.value_domain(schema);
            let cells: BTreeMap<Vec<Id>, AggregateCell> = summary_table(family, spec, SummaryScope::Regions)?
                .into_iter()
                .filter_map(|c| match &c.scope {
                    CellScope::Region(sig) => Some((sig.clone(), c)),
                    CellScope::Set(_) => None,
                })
                .collect();
            legend.value_ramp(theme, lo, hi, &what(spec));
            for (sig, path) in &regions {
                let key = ids(sig);
                let style = match cells.get(&key).and_then(|c| c.value.map(|v| (v, c.certainty))) {
                    Some((v, certainty)) => {
                        let fill = Style::fill(theme.value_to_lightness(v, lo, hi)?);
                        if textured {
                            fill.with_stroke(Stroke::solid(theme.lightness_dark, 1.5))
                        } else {
                            legend.certainty(theme, certainty)?;
                            let dash = theme.certainty_to_dash(certainty)?;
                            fill.with_stroke(Stroke::dashed(theme.lightness_dark, 1.5, &dash))
                        }
                    }
                    None => {
                        legend.no_data(theme);
                        no_data_style(theme)
                    }
                };
                scene.push(Shape::Path(path.clone()), Role::Region(key.clone()), key, style);
            }
            if textured {
                let texture = theme.texture();
                legend.add(
                    LegendKind::Texture,
                    "all values possibly incorrect",
                    Swatch::Box {
                        style: Style {
                            fill: Fill::Hatch(texture),
                            stroke: None,
                            italic: false,
                        },
                        size_fraction: 1.0,
                    },
                );
                for (sig, path) in &regions {
                    scene.push(
                        Shape::Path(path.clone()),
                        Role::Texture(ids(sig)),
                        ids(sig),
                        Style {
                            fill: Fill::Hatch(texture),
                            stroke: None,
                            italic: false,
                        },
                    );
                }
            }
            for sig in regions.keys() {
                if let (Some(cell), Some(anchor)) =
                    (cells.get(&ids(sig)), region_anchor(&circles, sig, 2.0))
                {
                    scene.text(Point::new(anchor.x, anchor.y + 4.0), cell_label(cell), Anchor::Middle, ids(sig));
                }
            }
            if textured {
                let mut style = Style::fill(0.0);
                style.italic = true;
                scene.push(
                    Shape::Text {
                        at: Point::new(width / 2.0, height - 10.0),
                        text: format!(
                            "Note: all {} values are possibly incorrect.",
                            spec.attribute
                        ),
                        anchor: Anchor::Middle,
                        size: 11.0,
                    },
                    Role::Disclaimer,
                    vec![],
                    style,
                );
            }
        }
    }

    for (i, c) in circles.iter().enumerate() {
        let label = family.set(sets[i]).map(|s| s.label.clone()).unwrap_or_default();
        let dy = if c.center.y < 150.0 { -c.r - 6.0 } else { c.r + 14.0 };
        scene.text(
            Point::new(c.center.x, c.center.y + dy),
            label,
            Anchor::Middle,
            vec![sets[i].to_string()],
        );
    }
    scene.legend = legend.finish();
    Ok(scene)
}

/// FNV-1a followed by a splitmix64 finalizer; stable across platforms and
/// releases.
fn stable_hash(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^= h >> 30;
    h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h ^= h >> 27;
    h = h.wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

/// One column per set; known ages as black dots, ranges at their midpoint
/// with an extent bar, missing values in a lane below the axis. Shades of
/// gray grow lighter as less is known.
pub fn layout_dotplot(family: &SetFamily, attribute: &str, theme: &Theme) -> Result<Scene, LayoutError> {
    check(family)?;
    let schema = family
        .attribute(attribute)
        .ok_or_else(|| LayoutError::UnknownAttribute(attribute.to_string()))?;
    let (min, max) = schema
        .domain()
        .ok_or_else(|| LayoutError::NotNumeric(attribute.to_string()))?;
    let regions = enumerate_regions(family)?;

    let sets = family.sorted_set_ids();
    let (left, top, bottom, lane, col_w) = (60.0, 30.0, 230.0, 262.0, 120.0);
    let mut scene = Scene::new(left + sets.len() as f64 * col_w + 20.0, 310.0);
    let mut legend = Legend::default();
    let y_of = |v: f64| bottom - (v - min) / (max - min) * (bottom - top);

    scene.push(
        Shape::Line {
            from: Point::new(left, top),
            to: Point::new(left, bottom),
        },
        Role::Axis,
        vec![],
        Style::stroke(Stroke::solid(theme.lightness_dark, 1.0)),
    );
    let unit = match &schema.kind {
        crate::model::AttributeKind::Numeric { unit: Some(u), .. } => format!(" {u}"),
        _ => String::new(),
    };
    for v in [min, (min + max) / 2.0, max] {
        scene.text(Point::new(left - 6.0, y_of(v) + 4.0), format!("{}{unit}", fmt_num(v)), Anchor::End, vec![]);
    }
    scene.text(Point::new(left - 6.0, lane + 4.0), "unknown", Anchor::End, vec![]);

    for (c, set) in sets.iter().enumerate() {
        let cx = left + (c as f64 + 0.5) * col_w;
        let label = family.set(set).map(|s| s.label.clone()).unwrap_or_default();
        scene.text(Point::new(cx, 295.0), label, Anchor::Middle, vec![set.to_string()]);
        let mut members: Vec<&str> = regions
            .regions
            .iter()
            .filter(|r| r.signature.iter().any(|s| s == set))
            .flat_map(|r| r.members.iter().map(String::as_str))
            .collect();
        members.sort_unstable();
        for id in members {
            let e = family.element(id).expect("region members exist");
            let value = e.value(attribute);
            let class = element_value_class(value, schema);
            let gray = theme.gray(class);
            let jitter = ((stable_hash(id) >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 50.0;
            let x = cx + jitter;
            let y = match value {
                AttributeValue::Known(d) | AttributeValue::Flagged(d) => {
                    y_of(d.as_number().unwrap_or(min))
                }
                AttributeValue::Range { low, high } => {
                    scene.push(
                        Shape::Line {
                            from: Point::new(x, y_of(*low)),
                            to: Point::new(x, y_of(*high)),
                        },
                        Role::ExtentBar,
                        vec![id.to_string(), set.to_string()],
                        Style::stroke(Stroke::solid(gray.max(theme.gray_unknown), 1.0)),
                    );
                    y_of((low + high) / 2.0)
                }
                AttributeValue::Missing => lane,
            };
            legend.add(
                LegendKind::Gray(class),
                match class {
                    GrayscaleClass::Known => "value known",
                    GrayscaleClass::RangeKnown => "value within a range or doubted",
                    GrayscaleClass::ThresholdKnown => "value beyond a threshold",
                    GrayscaleClass::Unknown => "value unknown",
                },
                Swatch::Dot(Style::fill(gray)),
            );
            scene.push(
                Shape::Circle {
                    center: Point::new(x, y),
                    r: 3.5,
                },
                Role::ValueDot(class),
                vec![id.to_string(), set.to_string()],
                Style::fill(gray),
            );
        }
    }
    scene.legend = legend.finish();
    Ok(scene)
}
