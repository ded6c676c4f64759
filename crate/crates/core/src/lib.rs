//! Set-type data with uncertain memberships and attributes: a typed model,
//! aggregation under explicit value and certainty rules, visual encodings,
//! scene layouts and deterministic SVG output.

pub mod aggregate;
pub mod cli;
pub mod encode;
pub mod fixtures;
pub mod geometry;
pub mod ingest;
pub mod layout;
pub mod model;
pub mod render;

pub use aggregate::{
    AggregateCell, AggregateKind, AggregateSpec, CardinalityBounds, CertaintyRule, SummaryScope,
    ValueRule,
};
pub use encode::Theme;
pub use ingest::{parse, serialize, Mode};
pub use layout::Scene;
pub use model::{
    classify, expand_memberships, validate, AttributeValue, Element, MembershipStatus, SetFamily,
    UncertaintyClass,
};
pub use render::render_svg;
