//! Plane geometry for the diagrams: paths made of lines and circular arcs,
//! exclusive regions of circle arrangements, and point-in-path tests.
//!
//! Coordinates follow SVG: x grows to the right, y grows downwards, and
//! angles grow clockwise on screen.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

/// Format a coordinate with at most three decimals and no trailing zeros.
pub fn fmt_num(v: f64) -> String {
    let r = (v * 1000.0).round() / 1000.0;
    let r = if r == 0.0 { 0.0 } else { r };
    let s = format!("{r:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, o: &Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Point,
    pub r: f64,
}

impl Circle {
    pub fn new(cx: f64, cy: f64, r: f64) -> Self {
        Circle {
            center: Point::new(cx, cy),
            r,
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.center.dist(p) < self.r
    }

    pub fn at(&self, angle: f64) -> Point {
        Point::new(
            self.center.x + self.r * angle.cos(),
            self.center.y + self.r * angle.sin(),
        )
    }

    fn angle_of(&self, p: &Point) -> f64 {
        (p.y - self.center.y).atan2(p.x - self.center.x).rem_euclid(TAU)
    }

    /// The two crossing points with `other`, if the boundaries cross.
    pub fn intersections(&self, other: &Circle) -> Option<(Point, Point)> {
        let d = self.center.dist(&other.center);
        if d == 0.0 || d >= self.r + other.r || d <= (self.r - other.r).abs() {
            return None;
        }
        let a = (self.r * self.r - other.r * other.r + d * d) / (2.0 * d);
        let h = (self.r * self.r - a * a).sqrt();
        let ux = (other.center.x - self.center.x) / d;
        let uy = (other.center.y - self.center.y) / d;
        let mx = self.center.x + a * ux;
        let my = self.center.y + a * uy;
        Some((
            Point::new(mx - h * uy, my + h * ux),
            Point::new(mx + h * uy, my - h * ux),
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    MoveTo(Point),
    LineTo(Point),
    /// Circular arc from the current point, turning by `sweep` radians
    /// (positive is clockwise on screen). `|sweep|` stays below a full turn.
    Arc {
        center: Point,
        radius: f64,
        start_angle: f64,
        sweep: f64,
    },
    Close,
}

impl Segment {
    fn arc_end(center: Point, radius: f64, start_angle: f64, sweep: f64) -> Point {
        Circle { center, r: radius }.at(start_angle + sweep)
    }
}

/// A closed outline built from lines and arcs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Path {
    pub segments: Vec<Segment>,
}

impl Path {
    pub fn rect(x: f64, y: f64, w: f64, h: f64) -> Path {
        Path {
            segments: vec![
                Segment::MoveTo(Point::new(x, y)),
                Segment::LineTo(Point::new(x + w, y)),
                Segment::LineTo(Point::new(x + w, y + h)),
                Segment::LineTo(Point::new(x, y + h)),
                Segment::Close,
            ],
        }
    }

    pub fn circle(c: &Circle) -> Path {
        Path {
            segments: vec![
                Segment::MoveTo(c.at(0.0)),
                Segment::Arc {
                    center: c.center,
                    radius: c.r,
                    start_angle: 0.0,
                    sweep: PI,
                },
                Segment::Arc {
                    center: c.center,
                    radius: c.r,
                    start_angle: PI,
                    sweep: PI,
                },
                Segment::Close,
            ],
        }
    }

    /// Pie wedge covering `fraction` of the disc, starting at 12 o'clock and
    /// turning clockwise.
    pub fn wedge(c: &Circle, fraction: f64) -> Path {
        let fraction = fraction.clamp(0.0, 1.0);
        if fraction >= 1.0 {
            return Path::circle(c);
        }
        let start = -PI / 2.0;
        let mut segments = vec![Segment::MoveTo(c.center), Segment::LineTo(c.at(start))];
        if fraction > 0.0 {
            segments.push(Segment::Arc {
                center: c.center,
                radius: c.r,
                start_angle: start,
                sweep: fraction * TAU,
            });
        }
        segments.push(Segment::Close);
        Path { segments }
    }

    /// SVG path data.
    pub fn svg_data(&self) -> String {
        let mut parts = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            match *s {
                Segment::MoveTo(p) => parts.push(format!("M{} {}", fmt_num(p.x), fmt_num(p.y))),
                Segment::LineTo(p) => parts.push(format!("L{} {}", fmt_num(p.x), fmt_num(p.y))),
                Segment::Arc {
                    center,
                    radius,
                    start_angle,
                    sweep,
                } => {
                    let end = Segment::arc_end(center, radius, start_angle, sweep);
                    parts.push(format!(
                        "A{r} {r} 0 {} {} {} {}",
                        u8::from(sweep.abs() > PI),
                        u8::from(sweep > 0.0),
                        fmt_num(end.x),
                        fmt_num(end.y),
                        r = fmt_num(radius)
                    ));
                }
                Segment::Close => parts.push("Z".to_string()),
            }
        }
        parts.join(" ")
    }

    /// Polygons approximating each subpath, arcs sampled every two degrees.
    pub fn flatten(&self) -> Vec<Vec<Point>> {
        let mut polys: Vec<Vec<Point>> = Vec::new();
        let mut current: Vec<Point> = Vec::new();
        for s in &self.segments {
            match *s {
                Segment::MoveTo(p) => {
                    if current.len() > 2 {
                        polys.push(std::mem::take(&mut current));
                    }
                    current.clear();
                    current.push(p);
                }
                Segment::LineTo(p) => current.push(p),
                Segment::Arc {
                    center,
                    radius,
                    start_angle,
                    sweep,
                } => {
                    let steps = ((sweep.abs() / (PI / 90.0)).ceil() as usize).max(1);
                    let c = Circle { center, r: radius };
                    for k in 1..=steps {
                        current.push(c.at(start_angle + sweep * k as f64 / steps as f64));
                    }
                }
                Segment::Close => {
                    if current.len() > 2 {
                        polys.push(std::mem::take(&mut current));
                    }
                    current.clear();
                }
            }
        }
        if current.len() > 2 {
            polys.push(current);
        }
        polys
    }

    /// Even-odd point-in-path test on the flattened outline.
    pub fn contains(&self, p: &Point) -> bool {
        let mut inside = false;
        for poly in self.flatten() {
            let n = poly.len();
            for i in 0..n {
                let a = poly[i];
                let b = poly[(i + 1) % n];
                if (a.y > p.y) != (b.y > p.y) {
                    let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                    if p.x < x {
                        inside = !inside;
                    }
                }
            }
        }
        inside
    }
}

/// Exact membership test for the region of circles `signature` (indices):
/// inside every listed circle and outside all others.
pub fn in_region(circles: &[Circle], signature: &[usize], p: &Point) -> bool {
    circles
        .iter()
        .enumerate()
        .all(|(i, c)| c.contains(p) == signature.contains(&i))
}

/// Distance from `p` to the nearest circle boundary.
pub fn clearance(circles: &[Circle], p: &Point) -> f64 {
    circles
        .iter()
        .map(|c| (c.center.dist(p) - c.r).abs())
        .fold(f64::INFINITY, f64::min)
}

struct Edge {
    from: usize,
    to: usize,
    circle: usize,
    start_angle: f64,
    sweep: f64,
}

/// Outline of every non-empty exclusive region of a circle arrangement,
/// keyed by the sorted indices of the circles containing it.
pub fn region_paths(circles: &[Circle]) -> BTreeMap<Vec<usize>, Path> {
    // crossing points, shared between the two circles that make them
    let mut points: Vec<Point> = Vec::new();
    let mut on_circle: Vec<Vec<(f64, usize)>> = vec![Vec::new(); circles.len()];
    for i in 0..circles.len() {
        for j in (i + 1)..circles.len() {
            if let Some((p, q)) = circles[i].intersections(&circles[j]) {
                for pt in [p, q] {
                    let id = points.len();
                    points.push(pt);
                    on_circle[i].push((circles[i].angle_of(&pt), id));
                    on_circle[j].push((circles[j].angle_of(&pt), id));
                }
            }
        }
    }

    let mut edges: BTreeMap<Vec<usize>, Vec<Edge>> = BTreeMap::new();
    let mut whole: BTreeMap<Vec<usize>, Vec<Path>> = BTreeMap::new();
    for (i, circle) in circles.iter().enumerate() {
        let containing = |p: &Point| -> Vec<usize> {
            (0..circles.len())
                .filter(|&j| j != i && circles[j].contains(p))
                .collect()
        };
        let with_self = |mut s: Vec<usize>| {
            s.push(i);
            s.sort_unstable();
            s
        };

        let marks = &mut on_circle[i];
        marks.sort_by(|a, b| a.0.total_cmp(&b.0));
        if marks.is_empty() {
            let outside = containing(&circle.at(0.0));
            whole.entry(with_self(outside.clone())).or_default().push(Path::circle(circle));
            if !outside.is_empty() {
                whole.entry(outside).or_default().push(Path::circle(circle));
            }
            continue;
        }
        for k in 0..marks.len() {
            let (a0, p0) = marks[k];
            let (mut a1, p1) = marks[(k + 1) % marks.len()];
            if a1 <= a0 {
                a1 += TAU;
            }
            let outside = containing(&circle.at((a0 + a1) / 2.0));
            if !outside.is_empty() {
                edges.entry(outside.clone()).or_default().push(Edge {
                    from: p1,
                    to: p0,
                    circle: i,
                    start_angle: a1,
                    sweep: a0 - a1,
                });
            }
            edges.entry(with_self(outside)).or_default().push(Edge {
                from: p0,
                to: p1,
                circle: i,
                start_angle: a0,
                sweep: a1 - a0,
            });
        }
    }

    let mut out: BTreeMap<Vec<usize>, Path> = BTreeMap::new();
    for (sig, mut list) in edges {
        let mut segments = Vec::new();
        while !list.is_empty() {
            let first = list.remove(0);
            let start = first.from;
            segments.push(Segment::MoveTo(points[start]));
            let mut edge = first;
            loop {
                let c = circles[edge.circle];
                segments.push(Segment::Arc {
                    center: c.center,
                    radius: c.r,
                    start_angle: edge.start_angle,
                    sweep: edge.sweep,
                });
                if edge.to == start {
                    break;
                }
                match list.iter().position(|e| e.from == edge.to) {
                    Some(idx) => edge = list.remove(idx),
                    None => break,
                }
            }
            segments.push(Segment::Close);
        }
        out.insert(sig, Path { segments });
    }
    for (sig, paths) in whole {
        let entry = out.entry(sig).or_default();
        for p in paths {
            entry.segments.extend(p.segments);
        }
    }
    out
}

/// The interior point of a region farthest from every circle boundary,
/// searched on a grid of `step` pixels.
pub fn region_anchor(circles: &[Circle], signature: &[usize], step: f64) -> Option<Point> {
    let mut best: Option<(f64, Point)> = None;
    for p in grid_points(circles, signature, step) {
        let c = clearance(circles, &p);
        if best.is_none_or(|(b, _)| c > b) {
            best = Some((c, p));
        }
    }
    best.map(|(_, p)| p)
}

/// Grid points inside a region, scanned row by row.
pub fn grid_points(circles: &[Circle], signature: &[usize], step: f64) -> Vec<Point> {
    let Some(first) = signature.first() else {
        return Vec::new();
    };
    let c = circles[*first];
    let (x0, y0) = (c.center.x - c.r, c.center.y - c.r);
    let n = (2.0 * c.r / step).ceil() as usize;
    let mut out = Vec::new();
    for row in 0..=n {
        for col in 0..=n {
            let p = Point::new(x0 + col as f64 * step, y0 + row as f64 * step);
            if in_region(circles, signature, &p) {
                out.push(p);
            }
        }
    }
    out
}
