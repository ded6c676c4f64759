//! SVG serialization of a [`Scene`]. Output is byte-for-byte deterministic:
//! primitives keep their scene order and numbers carry at most three
//! decimals.

use std::fmt::Write;

use crate::encode::TextureSpec;
use crate::geometry::fmt_num;
use crate::layout::{Anchor, Fill, LegendEntry, Scene, Shape, Stroke, Style, Swatch};

const LEGEND_ROW: f64 = 18.0;

/// Gray of lightness `l` (0 black, 100 white) as a hex color.
pub fn gray_hex(l: f64) -> String {
    let v = (255.0 * l.clamp(0.0, 100.0) / 100.0).round() as u8;
    format!("#{v:02x}{v:02x}{v:02x}")
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn pattern_id(t: &TextureSpec) -> String {
    format!(
        "hatch-{}-{}-{}",
        fmt_num(t.angle),
        fmt_num(t.spacing),
        fmt_num(t.lightness)
    )
    .replace('.', "_")
}

fn stroke_attrs(s: &Stroke) -> String {
    let mut out = format!(
        r#" stroke="{}" stroke-width="{}""#,
        gray_hex(s.lightness),
        fmt_num(s.width)
    );
    if let Some((on, off)) = s.dash {
        let _ = write!(out, r#" stroke-dasharray="{} {}""#, fmt_num(on), fmt_num(off));
    }
    out
}

fn style_attrs(style: &Style) -> String {
    let mut out = match &style.fill {
        Fill::None => r#" fill="none""#.to_string(),
        Fill::Gray(l) => format!(r#" fill="{}""#, gray_hex(*l)),
        Fill::Hatch(t) => format!(r#" fill="url(#{})""#, pattern_id(t)),
    };
    if let Some(s) = &style.stroke {
        out.push_str(&stroke_attrs(s));
    }
    out
}

fn shape_element(shape: &Shape, style: &Style, attrs: &str) -> String {
    let paint = style_attrs(style);
    match shape {
        Shape::Line { from, to } => format!(
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}"{paint}{attrs}/>"#,
            fmt_num(from.x),
            fmt_num(from.y),
            fmt_num(to.x),
            fmt_num(to.y)
        ),
        Shape::Circle { center, r } => format!(
            r#"<circle cx="{}" cy="{}" r="{}"{paint}{attrs}/>"#,
            fmt_num(center.x),
            fmt_num(center.y),
            fmt_num(*r)
        ),
        Shape::Rect { x, y, w, h } => format!(
            r#"<rect x="{}" y="{}" width="{}" height="{}"{paint}{attrs}/>"#,
            fmt_num(*x),
            fmt_num(*y),
            fmt_num(*w),
            fmt_num(*h)
        ),
        Shape::Path(p) => format!(
            r#"<path d="{}" fill-rule="evenodd"{paint}{attrs}/>"#,
            p.svg_data()
        ),
        Shape::Text {
            at,
            text,
            anchor,
            size,
        } => {
            let anchor = match anchor {
                Anchor::Start => "start",
                Anchor::Middle => "middle",
                Anchor::End => "end",
            };
            let italic = if style.italic {
                r#" font-style="italic""#
            } else {
                ""
            };
            format!(
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="{}" text-anchor="{anchor}"{italic}{paint}{attrs}>{}</text>"#,
                fmt_num(at.x),
                fmt_num(at.y),
                fmt_num(*size),
                escape(text)
            )
        }
    }
}

fn hatches(scene: &Scene) -> Vec<TextureSpec> {
    let mut out: Vec<TextureSpec> = Vec::new();
    let styles = scene
        .primitives
        .iter()
        .map(|p| &p.style)
        .chain(scene.legend.iter().filter_map(|e| match &e.swatch {
            Swatch::Box { style, .. } | Swatch::Dot(style) => Some(style),
            Swatch::Line(_) => None,
        }));
    for s in styles {
        if let Fill::Hatch(t) = s.fill {
            if !out.contains(&t) {
                out.push(t);
            }
        }
    }
    out
}

fn legend_rows(out: &mut String, entries: &[LegendEntry], top: f64) {
    for (i, e) in entries.iter().enumerate() {
        let y = top + i as f64 * LEGEND_ROW;
        let attrs = r#" data-role="legend" data-ref="""#;
        let swatch = match &e.swatch {
            Swatch::Line(s) => shape_element(
                &Shape::Line {
                    from: crate::geometry::Point::new(10.0, y + 6.0),
                    to: crate::geometry::Point::new(34.0, y + 6.0),
                },
                &Style::stroke(*s),
                attrs,
            ),
            Swatch::Box {
                style,
                size_fraction,
            } => {
                let side = 12.0 * size_fraction;
                shape_element(
                    &Shape::Rect {
                        x: 22.0 - side / 2.0,
                        y: y + 6.0 - side / 2.0,
                        w: side,
                        h: side,
                    },
                    style,
                    attrs,
                )
            }
            Swatch::Dot(style) => shape_element(
                &Shape::Circle {
                    center: crate::geometry::Point::new(22.0, y + 6.0),
                    r: 4.0,
                },
                style,
                attrs,
            ),
        };
        out.push_str(&swatch);
        out.push('\n');
        out.push_str(&format!(
            r#"<text x="42" y="{}" font-family="sans-serif" font-size="11" fill="{}"{attrs}>{}</text>"#,
            fmt_num(y + 10.0),
            gray_hex(0.0),
            escape(&e.label)
        ));
        out.push('\n');
    }
}

/// Serialize a scene; with `legend` the key is appended below the drawing.
pub fn render_svg(scene: &Scene, legend: bool) -> String {
    let entries: &[LegendEntry] = if legend { &scene.legend } else { &[] };
    let legend_height = if entries.is_empty() {
        0.0
    } else {
        entries.len() as f64 * LEGEND_ROW + 10.0
    };
    let width = scene.width.max(if entries.is_empty() { 0.0 } else { 300.0 });
    let height = scene.height + legend_height;
    let mut out = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = fmt_num(width),
        h = fmt_num(height)
    );
    out.push('\n');

    let patterns = hatches(scene);
    if !patterns.is_empty() {
        out.push_str("<defs>\n");
        for t in &patterns {
            let _ = writeln!(
                out,
                r#"<pattern id="{}" patternUnits="userSpaceOnUse" width="{s}" height="{s}" patternTransform="rotate({})"><line x1="0" y1="0" x2="0" y2="{s}" stroke="{}" stroke-width="1"/></pattern>"#,
                pattern_id(t),
                fmt_num(t.angle),
                gray_hex(t.lightness),
                s = fmt_num(t.spacing)
            );
        }
        out.push_str("</defs>\n");
    }

    for p in &scene.primitives {
        let attrs = format!(
            r#" data-role="{}" data-ref="{}""#,
            escape(&p.role.to_string()),
            escape(&p.refs.join(","))
        );
        out.push_str(&shape_element(&p.shape, &p.style, &attrs));
        out.push('\n');
    }
    legend_rows(&mut out, entries, scene.height + 5.0);
    out.push_str("</svg>\n");
    out
}
