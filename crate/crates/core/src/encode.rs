//! Mapping of data and uncertainty onto visual variables.
//!
//! Lightness is given in percent, 0 being black and 100 white. Every
//! constant lives in [`Theme`], which can be overridden from a JSON file.

use serde::Deserialize;
use thiserror::Error;

use crate::model::{AttributeSchema, AttributeValue, MembershipStatus};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EncodeError {
    #[error("a certain non-member has no membership mark")]
    NonMember,
    #[error("certainty {0} lies outside [0, 1]")]
    CertaintyOutOfRange(f64),
    #[error("value domain [{0}, {1}] is inverted")]
    InvertedDomain(f64, f64),
    #[error("invalid theme: {0}")]
    Theme(String),
}

/// Encoder constants. All keys of a theme file are optional.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theme {
    pub line_width_min: f64,
    pub line_width_max: f64,
    pub lightness_dark: f64,
    pub lightness_light: f64,
    pub cell_size_min: f64,
    pub dash_period: f64,
    /// Shortest dash drawn for a certainty of 0, so outlines stay findable.
    pub dash_min: f64,
    pub gray_known: f64,
    pub gray_range: f64,
    pub gray_threshold: f64,
    pub gray_unknown: f64,
    pub hatch_angle: f64,
    pub hatch_spacing: f64,
    pub hatch_lightness: f64,
    pub fan_length: f64,
    pub fan_spread: f64,
    /// Draw fans at the set end for pairs made uncertain by an unknown set roster.
    pub set_side_fans: bool,
    /// Let probability modulate line width as well as lightness.
    pub probability_width: bool,
    /// Let probability modulate cell size as well as lightness.
    pub probability_size: bool,
}

impl Default for Theme {
    fn default() -> Self {
        Theme {
            line_width_min: 0.6,
            line_width_max: 2.5,
            lightness_dark: 10.0,
            lightness_light: 75.0,
            cell_size_min: 0.35,
            dash_period: 8.0,
            dash_min: 0.5,
            gray_known: 0.0,
            gray_range: 30.0,
            gray_threshold: 55.0,
            gray_unknown: 80.0,
            hatch_angle: 45.0,
            hatch_spacing: 6.0,
            hatch_lightness: 40.0,
            fan_length: 14.0,
            fan_spread: 40.0,
            set_side_fans: true,
            probability_width: true,
            probability_size: true,
        }
    }
}

impl Theme {
    /// Parse a theme from JSON and check its constants.
    pub fn from_json(text: &str) -> Result<Theme, EncodeError> {
        let theme: Theme =
            serde_json::from_str(text).map_err(|e| EncodeError::Theme(e.to_string()))?;
        theme.check()?;
        Ok(theme)
    }

    pub fn check(&self) -> Result<(), EncodeError> {
        let bad = |msg: &str| Err(EncodeError::Theme(msg.to_string()));
        if !(0.0 < self.line_width_min && self.line_width_min < self.line_width_max) {
            return bad("line widths must satisfy 0 < min < max");
        }
        if !(0.0 <= self.lightness_dark
            && self.lightness_dark < self.lightness_light
            && self.lightness_light <= 100.0)
        {
            return bad("lightness must satisfy 0 <= dark < light <= 100");
        }
        if !(0.0 < self.cell_size_min && self.cell_size_min < 1.0) {
            return bad("cell_size_min must lie in (0, 1)");
        }
        if !(self.dash_period > 0.0 && 0.0 < self.dash_min && self.dash_min < self.dash_period) {
            return bad("dash lengths must satisfy 0 < dash_min < dash_period");
        }
        let grays = [self.gray_known, self.gray_range, self.gray_threshold, self.gray_unknown];
        if grays.windows(2).any(|w| w[0] >= w[1]) || grays[0] < 0.0 || grays[3] > 100.0 {
            return bad("gray levels must increase strictly within [0, 100]");
        }
        if self.hatch_spacing <= 0.0 || self.fan_length <= 0.0 {
            return bad("hatch spacing and fan length must be positive");
        }
        Ok(())
    }

    pub fn certain_line(&self) -> LineStyle {
        LineStyle {
            width: self.line_width_max,
            lightness: self.lightness_dark,
        }
    }

    pub fn uncertain_line(&self) -> LineStyle {
        LineStyle {
            width: self.line_width_min,
            lightness: self.lightness_light,
        }
    }

    fn probability_lightness(&self, p: f64) -> f64 {
        self.lightness_light - p * (self.lightness_light - self.lightness_dark)
    }

    /// Stroke for a membership link. Non-members have no link.
    pub fn membership_line_style(&self, status: MembershipStatus) -> Result<LineStyle, EncodeError> {
        match status {
            MembershipStatus::CertainMember => Ok(self.certain_line()),
            MembershipStatus::Uncertain => Ok(self.uncertain_line()),
            MembershipStatus::Probability(p) => Ok(LineStyle {
                width: if self.probability_width {
                    self.line_width_min + p * (self.line_width_max - self.line_width_min)
                } else {
                    self.line_width_min
                },
                lightness: self.probability_lightness(p),
            }),
            MembershipStatus::CertainNonMember => Err(EncodeError::NonMember),
        }
    }

    /// Fill of a membership matrix cell. Non-members have no cell.
    pub fn membership_cell_style(
        &self,
        status: MembershipStatus,
        variant: CellVariant,
    ) -> Result<CellStyle, EncodeError> {
        let certain = CellStyle {
            size_fraction: 1.0,
            lightness: self.lightness_dark,
        };
        let small = CellStyle {
            size_fraction: self.cell_size_min,
            lightness: self.lightness_light,
        };
        match (status, variant) {
            (MembershipStatus::CertainNonMember, _) => Err(EncodeError::NonMember),
            (MembershipStatus::CertainMember, _) => Ok(certain),
            (_, CellVariant::Plain) => Ok(CellStyle {
                size_fraction: 1.0,
                lightness: self.lightness_light,
            }),
            (_, CellVariant::SmallMarks) => Ok(small),
            (MembershipStatus::Probability(p), CellVariant::SizeColor) => Ok(CellStyle {
                size_fraction: if self.probability_size {
                    self.cell_size_min + p.sqrt() * (1.0 - self.cell_size_min)
                } else {
                    1.0
                },
                lightness: self.probability_lightness(p),
            }),
            (MembershipStatus::Uncertain, CellVariant::SizeColor) => {
                log::warn!("membership without a probability drawn as a small mark");
                Ok(small)
            }
        }
    }

    /// Lightness for `value` on `[lo, hi]`: larger values are darker.
    pub fn value_to_lightness(&self, value: f64, lo: f64, hi: f64) -> Result<f64, EncodeError> {
        if lo > hi {
            return Err(EncodeError::InvertedDomain(lo, hi));
        }
        if lo == hi {
            log::warn!("degenerate value domain [{lo}, {hi}]; using middle lightness");
            return Ok((self.lightness_dark + self.lightness_light) / 2.0);
        }
        let t = ((value - lo) / (hi - lo)).clamp(0.0, 1.0);
        Ok(self.lightness_light - t * (self.lightness_light - self.lightness_dark))
    }

    pub fn certainty_to_dash(&self, certainty: f64) -> Result<DashPattern, EncodeError> {
        if !(0.0..=1.0).contains(&certainty) {
            return Err(EncodeError::CertaintyOutOfRange(certainty));
        }
        Ok(DashPattern {
            period: self.dash_period,
            solid_fraction: certainty,
            min_dash: self.dash_min,
        })
    }

    pub fn gray(&self, class: GrayscaleClass) -> f64 {
        match class {
            GrayscaleClass::Known => self.gray_known,
            GrayscaleClass::RangeKnown => self.gray_range,
            GrayscaleClass::ThresholdKnown => self.gray_threshold,
            GrayscaleClass::Unknown => self.gray_unknown,
        }
    }

    pub fn texture(&self) -> TextureSpec {
        TextureSpec {
            angle: self.hatch_angle,
            spacing: self.hatch_spacing,
            lightness: self.hatch_lightness,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineStyle {
    pub width: f64,
    pub lightness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellVariant {
    /// Uncertain cells differ by fill only.
    Plain,
    /// Uncertain cells are drawn as small light marks.
    SmallMarks,
    /// Probability drives both size and fill.
    SizeColor,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellStyle {
    /// Side of the mark relative to the cell side.
    pub size_fraction: f64,
    pub lightness: f64,
}

/// Dash pattern of an outline whose solid share is the certainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DashPattern {
    pub period: f64,
    pub solid_fraction: f64,
    pub min_dash: f64,
}

impl DashPattern {
    pub fn is_solid(&self) -> bool {
        self.solid_fraction >= 1.0
    }

    /// (on, off) lengths, or `None` for a solid stroke.
    pub fn dash_array(&self) -> Option<(f64, f64)> {
        if self.is_solid() {
            return None;
        }
        let on = (self.solid_fraction * self.period).max(self.min_dash);
        Some((on, self.period - on))
    }
}

/// How much is known about an element's attribute value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GrayscaleClass {
    Known,
    /// Value lies in a bounded interval, or was given but doubted.
    RangeKnown,
    /// Value lies beyond a threshold.
    ThresholdKnown,
    Unknown,
}

impl GrayscaleClass {
    pub fn name(&self) -> &'static str {
        match self {
            GrayscaleClass::Known => "known",
            GrayscaleClass::RangeKnown => "range",
            GrayscaleClass::ThresholdKnown => "threshold",
            GrayscaleClass::Unknown => "unknown",
        }
    }
}

pub fn element_value_class(value: &AttributeValue, schema: &AttributeSchema) -> GrayscaleClass {
    match value {
        AttributeValue::Known(_) => GrayscaleClass::Known,
        AttributeValue::Missing => GrayscaleClass::Unknown,
        AttributeValue::Flagged(_) => GrayscaleClass::RangeKnown,
        AttributeValue::Range { low, high } => {
            let Some((min, max)) = schema.domain() else {
                return GrayscaleClass::Unknown;
            };
            match (*low <= min, *high >= max) {
                (true, true) => GrayscaleClass::Unknown,
                (true, false) | (false, true) => GrayscaleClass::ThresholdKnown,
                (false, false) => GrayscaleClass::RangeKnown,
            }
        }
    }
}

/// Hatch overlay marking data as uncertain throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TextureSpec {
    pub angle: f64,
    pub spacing: f64,
    pub lightness: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use MembershipStatus::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn line_style_endpoints_and_midpoint() {
        let t = Theme::default();
        let near_one = t.membership_line_style(Probability(1.0 - 1e-15)).unwrap();
        assert!(close(near_one.width, 2.5) && close(near_one.lightness, 10.0));
        let near_zero = t.membership_line_style(Probability(1e-15)).unwrap();
        assert!(close(near_zero.width, 0.6) && close(near_zero.lightness, 75.0));
        let half = t.membership_line_style(Probability(0.5)).unwrap();
        assert!(close(half.width, 1.55) && close(half.lightness, 42.5));
        assert_eq!(t.membership_line_style(CertainMember).unwrap(), LineStyle { width: 2.5, lightness: 10.0 });
        assert_eq!(t.membership_line_style(Uncertain).unwrap(), LineStyle { width: 0.6, lightness: 75.0 });
        assert_eq!(t.membership_line_style(CertainNonMember), Err(EncodeError::NonMember));
    }

    #[test]
    fn cell_styles() {
        let t = Theme::default();
        for v in [CellVariant::Plain, CellVariant::SmallMarks, CellVariant::SizeColor] {
            assert_eq!(
                t.membership_cell_style(CertainMember, v).unwrap(),
                CellStyle { size_fraction: 1.0, lightness: 10.0 }
            );
        }
        assert_eq!(
            t.membership_cell_style(Uncertain, CellVariant::SmallMarks).unwrap(),
            CellStyle { size_fraction: 0.35, lightness: 75.0 }
        );
        assert_eq!(
            t.membership_cell_style(Uncertain, CellVariant::Plain).unwrap(),
            CellStyle { size_fraction: 1.0, lightness: 75.0 }
        );
        let q = t.membership_cell_style(Probability(0.25), CellVariant::SizeColor).unwrap();
        assert!(close(q.size_fraction, 0.675) && close(q.lightness, 58.75));
        // no probability to show: falls back to the small mark
        assert_eq!(
            t.membership_cell_style(Uncertain, CellVariant::SizeColor).unwrap(),
            t.membership_cell_style(Uncertain, CellVariant::SmallMarks).unwrap()
        );
    }

    #[test]
    fn value_lightness() {
        let t = Theme::default();
        assert_eq!(t.value_to_lightness(1.0, 0.0, 1.0).unwrap(), 10.0);
        assert_eq!(t.value_to_lightness(0.0, 0.0, 1.0).unwrap(), 75.0);
        assert_eq!(t.value_to_lightness(0.5, 0.0, 1.0).unwrap(), 42.5);
        assert_eq!(t.value_to_lightness(7.0, 0.0, 1.0).unwrap(), 10.0);
        assert_eq!(t.value_to_lightness(3.0, 3.0, 3.0).unwrap(), 42.5);
        assert_eq!(t.value_to_lightness(0.0, 2.0, 1.0), Err(EncodeError::InvertedDomain(2.0, 1.0)));
    }

    #[test]
    fn dashes() {
        let t = Theme::default();
        assert!(t.certainty_to_dash(1.0).unwrap().is_solid());
        assert_eq!(t.certainty_to_dash(1.0).unwrap().dash_array(), None);
        let (on, off) = t.certainty_to_dash(0.4).unwrap().dash_array().unwrap();
        assert!(close(on, 3.2) && close(off, 4.8));
        assert_eq!(t.certainty_to_dash(0.0).unwrap().dash_array(), Some((0.5, 7.5)));
        assert_eq!(t.certainty_to_dash(1.2), Err(EncodeError::CertaintyOutOfRange(1.2)));
        assert!(t.certainty_to_dash(f64::NAN).is_err());
    }

    #[test]
    fn gray_classes() {
        let age = AttributeSchema::numeric("age", 15.0, 60.0);
        use AttributeValue as V;
        assert_eq!(element_value_class(&V::known(25.0), &age), GrayscaleClass::Known);
        assert_eq!(element_value_class(&V::range(20.0, 30.0), &age), GrayscaleClass::RangeKnown);
        assert_eq!(element_value_class(&V::range(30.0, 60.0), &age), GrayscaleClass::ThresholdKnown);
        assert_eq!(element_value_class(&V::range(15.0, 60.0), &age), GrayscaleClass::Unknown);
        assert_eq!(element_value_class(&V::Missing, &age), GrayscaleClass::Unknown);
        assert_eq!(element_value_class(&V::flagged(28.0), &age), GrayscaleClass::RangeKnown);

        let t = Theme::default();
        let grays: Vec<f64> = [
            GrayscaleClass::Known,
            GrayscaleClass::RangeKnown,
            GrayscaleClass::ThresholdKnown,
            GrayscaleClass::Unknown,
        ]
        .iter()
        .map(|c| t.gray(*c))
        .collect();
        assert_eq!(grays, vec![0.0, 30.0, 55.0, 80.0]);
    }

    #[test]
    fn theme_overrides_and_checks() {
        let t = Theme::from_json(r#"{"line_width_max": 4.0}"#).unwrap();
        assert_eq!(t.line_width_max, 4.0);
        assert_eq!(t.lightness_dark, 10.0);
        assert!(Theme::from_json(r#"{"no_such_key": 1}"#).is_err());
        assert!(Theme::from_json(r#"{"lightness_dark": 90}"#).is_err());
        assert!(Theme::from_json(r#"{"gray_range": 90}"#).is_err());
    }

    #[test]
    fn channel_coupling_can_be_disabled() {
        let t = Theme {
            probability_width: false,
            probability_size: false,
            ..Theme::default()
        };
        assert_eq!(t.membership_line_style(Probability(0.9)).unwrap().width, 0.6);
        let c = t.membership_cell_style(Probability(0.9), CellVariant::SizeColor).unwrap();
        assert_eq!(c.size_fraction, 1.0);
    }
}
