use std::fmt::Write as _;

/// Primitive geometry of a mark, in canvas points (y grows downward).
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Rect { x: f64, y: f64, w: f64, h: f64 },
    Circle { cx: f64, cy: f64, r: f64 },
    Line { x1: f64, y1: f64, x2: f64, y2: f64 },
    Polyline { points: Vec<(f64, f64)> },
    /// Closed polygon.
    Path { points: Vec<(f64, f64)> },
    Text { x: f64, y: f64, text: String, anchor: Anchor, size: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    Start,
    Middle,
    End,
}

impl Anchor {
    fn as_str(self) -> &'static str {
        match self {
            Anchor::Start => "start",
            Anchor::Middle => "middle",
            Anchor::End => "end",
        }
    }
}

/// A shape with its semantic class and style.
#[derive(Debug, Clone, PartialEq)]
pub struct Mark {
    pub shape: Shape,
    /// Space-separated class tokens; the first is the semantic tag.
    pub class: String,
    pub fill: Option<String>,
    pub stroke: Option<String>,
    pub stroke_width: Option<f64>,
    pub opacity: Option<f64>,
    /// Extra `data-*` attributes for structural checks.
    pub data: Vec<(String, String)>,
}

impl Mark {
    pub fn new(shape: Shape, class: impl Into<String>) -> Self {
        Self {
            shape,
            class: class.into(),
            fill: None,
            stroke: None,
            stroke_width: None,
            opacity: None,
            data: Vec::new(),
        }
    }

    pub fn fill(mut self, c: impl Into<String>) -> Self {
        self.fill = Some(c.into());
        self
    }

    pub fn stroke(mut self, c: impl Into<String>, width: f64) -> Self {
        self.stroke = Some(c.into());
        self.stroke_width = Some(width);
        self
    }

    pub fn opacity(mut self, o: f64) -> Self {
        self.opacity = Some(o);
        self
    }

    pub fn data(mut self, key: &str, value: impl ToString) -> Self {
        self.data.push((key.to_string(), value.to_string()));
        self
    }

    pub fn has_class(&self, token: &str) -> bool {
        self.class.split_whitespace().any(|t| t == token)
    }

    pub fn get_data(&self, key: &str) -> Option<&str> {
        self.data.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn points(&self) -> Vec<(f64, f64)> {
        match &self.shape {
            Shape::Rect { x, y, w, h } => vec![(*x, *y), (x + w, y + h)],
            Shape::Circle { cx, cy, r } => vec![(cx - r, cy - r), (cx + r, cy + r)],
            Shape::Line { x1, y1, x2, y2 } => vec![(*x1, *y1), (*x2, *y2)],
            Shape::Polyline { points } | Shape::Path { points } => points.clone(),
            Shape::Text { x, y, .. } => vec![(*x, *y)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisSide {
    Bottom,
    Left,
}

/// An axis line at a fixed canvas coordinate with labeled ticks.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub side: AxisSide,
    /// y for a bottom axis, x for a left axis.
    pub at: f64,
    pub from: f64,
    pub to: f64,
    /// Tick canvas positions with labels.
    pub ticks: Vec<(f64, String)>,
    pub label: String,
    /// Rotate bottom tick labels (long category names).
    pub rotate_labels: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LegendEntry {
    pub label: String,
    pub color: String,
}

/// Renderer-independent description of a figure.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorScene {
    pub width: f64,
    pub height: f64,
    pub title: String,
    pub marks: Vec<Mark>,
    pub axes: Vec<Axis>,
    pub legend: Vec<LegendEntry>,
}

fn num(v: f64) -> String {
    // Fixed precision keeps output byte-stable; avoid "-0.00".
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

const LEGEND_WIDTH: f64 = 120.0;

impl VectorScene {
    pub fn new(width: f64, height: f64, title: impl Into<String>) -> Self {
        Self {
            width,
            height,
            title: title.into(),
            marks: Vec::new(),
            axes: Vec::new(),
            legend: Vec::new(),
        }
    }

    pub fn push(&mut self, mark: Mark) {
        self.marks.push(mark);
    }

    pub fn marks_with_class<'a>(&'a self, token: &'a str) -> impl Iterator<Item = &'a Mark> + 'a {
        self.marks.iter().filter(move |m| m.has_class(token))
    }

    pub fn count_class(&self, token: &str) -> usize {
        self.marks_with_class(token).count()
    }

    fn total_width(&self) -> f64 {
        if self.legend.is_empty() {
            self.width
        } else {
            self.width + LEGEND_WIDTH
        }
    }

    /// Every mark coordinate is finite and within the canvas.
    pub fn is_within_canvas(&self) -> bool {
        let eps = 1e-6;
        self.marks.iter().all(|m| {
            let ok_shape = match &m.shape {
                Shape::Rect { w, h, .. } => *w >= 0.0 && *h >= 0.0,
                Shape::Circle { r, .. } => *r >= 0.0,
                _ => true,
            };
            ok_shape
                && m.points().iter().all(|(x, y)| {
                    x.is_finite() && y.is_finite() && *x >= -eps && *y >= -eps && *x <= self.width + eps && *y <= self.height + eps
                })
        })
    }

    pub fn to_svg(&self) -> String {
        let w = self.total_width();
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" font-family=\"Helvetica, Arial, sans-serif\">",
            num(w),
            num(self.height),
            num(w),
            num(self.height)
        );
        let _ = writeln!(s, "<title>{}</title>", escape(&self.title));
        let _ = writeln!(
            s,
            "<rect class=\"background\" x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>",
            num(w),
            num(self.height)
        );
        let _ = writeln!(
            s,
            "<text class=\"title\" x=\"{}\" y=\"16.00\" text-anchor=\"middle\" font-size=\"13.00\">{}</text>",
            num(self.width / 2.0),
            escape(&self.title)
        );
        s.push_str("<g class=\"axes\">\n");
        for axis in &self.axes {
            write_axis(&mut s, axis);
        }
        s.push_str("</g>\n<g class=\"marks\">\n");
        for m in &self.marks {
            write_mark(&mut s, m);
        }
        s.push_str("</g>\n");
        if !self.legend.is_empty() {
            s.push_str("<g class=\"legend\">\n");
            for (i, e) in self.legend.iter().enumerate() {
                let y = 30.0 + 16.0 * i as f64;
                let _ = writeln!(
                    s,
                    "<rect class=\"legend-swatch\" x=\"{}\" y=\"{}\" width=\"10.00\" height=\"10.00\" fill=\"{}\"/>",
                    num(self.width + 8.0),
                    num(y),
                    escape(&e.color)
                );
                let _ = writeln!(
                    s,
                    "<text class=\"legend-label\" x=\"{}\" y=\"{}\" font-size=\"10.00\">{}</text>",
                    num(self.width + 22.0),
                    num(y + 9.0),
                    escape(&e.label)
                );
            }
            s.push_str("</g>\n");
        }
        s.push_str("</svg>\n");
        s
    }
}

fn write_axis(s: &mut String, a: &Axis) {
    match a.side {
        AxisSide::Bottom => {
            let _ = writeln!(
                s,
                "<line class=\"axis-line\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\"/>",
                num(a.from),
                num(a.at),
                num(a.to),
                num(a.at)
            );
            for (x, label) in &a.ticks {
                let _ = writeln!(
                    s,
                    "<line class=\"axis-tick\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\"/>",
                    num(*x),
                    num(a.at),
                    num(*x),
                    num(a.at + 4.0)
                );
                if a.rotate_labels {
                    let _ = writeln!(
                        s,
                        "<text class=\"axis-tick-label\" x=\"{x}\" y=\"{y}\" font-size=\"10.00\" text-anchor=\"end\" transform=\"rotate(-45 {x} {y})\">{}</text>",
                        escape(label),
                        x = num(*x),
                        y = num(a.at + 12.0)
                    );
                } else {
                    let _ = writeln!(
                        s,
                        "<text class=\"axis-tick-label\" x=\"{}\" y=\"{}\" font-size=\"10.00\" text-anchor=\"middle\">{}</text>",
                        num(*x),
                        num(a.at + 15.0),
                        escape(label)
                    );
                }
            }
            if !a.label.is_empty() {
                let _ = writeln!(
                    s,
                    "<text class=\"axis-label\" x=\"{}\" y=\"{}\" font-size=\"11.00\" text-anchor=\"middle\">{}</text>",
                    num((a.from + a.to) / 2.0),
                    num(a.at + if a.rotate_labels { 48.0 } else { 30.0 }),
                    escape(&a.label)
                );
            }
        }
        AxisSide::Left => {
            let _ = writeln!(
                s,
                "<line class=\"axis-line\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\"/>",
                num(a.at),
                num(a.from),
                num(a.at),
                num(a.to)
            );
            for (y, label) in &a.ticks {
                let _ = writeln!(
                    s,
                    "<line class=\"axis-tick\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\"/>",
                    num(a.at - 4.0),
                    num(*y),
                    num(a.at),
                    num(*y)
                );
                let _ = writeln!(
                    s,
                    "<text class=\"axis-tick-label\" x=\"{}\" y=\"{}\" font-size=\"10.00\" text-anchor=\"end\">{}</text>",
                    num(a.at - 6.0),
                    num(y + 3.5),
                    escape(label)
                );
            }
            if !a.label.is_empty() {
                let x = num(a.at - 42.0);
                let y = num((a.from + a.to) / 2.0);
                let _ = writeln!(
                    s,
                    "<text class=\"axis-label\" x=\"{x}\" y=\"{y}\" font-size=\"11.00\" text-anchor=\"middle\" transform=\"rotate(-90 {x} {y})\">{}</text>",
                    escape(&a.label)
                );
            }
        }
    }
}

fn style_attrs(m: &Mark) -> String {
    let mut a = String::new();
    match &m.fill {
        Some(f) => {
            let _ = write!(a, " fill=\"{}\"", escape(f));
        }
        None => a.push_str(" fill=\"none\""),
    }
    if let Some(st) = &m.stroke {
        let _ = write!(a, " stroke=\"{}\"", escape(st));
    }
    if let Some(w) = m.stroke_width {
        let _ = write!(a, " stroke-width=\"{}\"", num(w));
    }
    if let Some(o) = m.opacity {
        let _ = write!(a, " opacity=\"{}\"", num(o));
    }
    for (k, v) in &m.data {
        let _ = write!(a, " data-{}=\"{}\"", k, escape(v));
    }
    a
}

fn points_attr(points: &[(f64, f64)]) -> String {
    points
        .iter()
        .map(|(x, y)| format!("{},{}", num(*x), num(*y)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn write_mark(s: &mut String, m: &Mark) {
    let class = escape(&m.class);
    let style = style_attrs(m);
    match &m.shape {
        Shape::Rect { x, y, w, h } => {
            let _ = writeln!(
                s,
                "<rect class=\"{class}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"{style}/>",
                num(*x),
                num(*y),
                num(*w),
                num(*h)
            );
        }
        Shape::Circle { cx, cy, r } => {
            let _ = writeln!(s, "<circle class=\"{class}\" cx=\"{}\" cy=\"{}\" r=\"{}\"{style}/>", num(*cx), num(*cy), num(*r));
        }
        Shape::Line { x1, y1, x2, y2 } => {
            let _ = writeln!(
                s,
                "<line class=\"{class}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"{style}/>",
                num(*x1),
                num(*y1),
                num(*x2),
                num(*y2)
            );
        }
        Shape::Polyline { points } => {
            let _ = writeln!(s, "<polyline class=\"{class}\" points=\"{}\"{style}/>", points_attr(points));
        }
        Shape::Path { points } => {
            let mut d = String::new();
            for (i, (x, y)) in points.iter().enumerate() {
                let _ = write!(d, "{}{},{} ", if i == 0 { "M" } else { "L" }, num(*x), num(*y));
            }
            d.push('Z');
            let _ = writeln!(s, "<path class=\"{class}\" d=\"{d}\"{style}/>");
        }
        Shape::Text { x, y, text, anchor, size } => {
            let _ = writeln!(
                s,
                "<text class=\"{class}\" x=\"{}\" y=\"{}\" text-anchor=\"{}\" font-size=\"{}\"{style}>{}</text>",
                num(*x),
                num(*y),
                anchor.as_str(),
                num(*size),
                escape(text)
            );
        }
    }
}

/// Affine map from a data interval onto a canvas interval.
#[derive(Debug, Clone, Copy)]
pub struct Scale {
    d0: f64,
    d1: f64,
    r0: f64,
    r1: f64,
}

impl Scale {
    pub fn new(domain: (f64, f64), range: (f64, f64)) -> Self {
        let (d0, mut d1) = domain;
        if d1 == d0 {
            d1 = d0 + 1.0;
        }
        Self {
            d0,
            d1,
            r0: range.0,
            r1: range.1,
        }
    }

    pub fn map(&self, v: f64) -> f64 {
        self.r0 + (v - self.d0) / (self.d1 - self.d0) * (self.r1 - self.r0)
    }

    /// About `count` round tick values inside the domain.
    pub fn ticks(&self, count: usize) -> Vec<f64> {
        let (lo, hi) = if self.d0 <= self.d1 { (self.d0, self.d1) } else { (self.d1, self.d0) };
        let raw = (hi - lo) / count.max(1) as f64;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 2.5, 5.0, 10.0]
            .iter()
            .map(|m| m * mag)
            .find(|s| *s >= raw)
            .unwrap_or(10.0 * mag);
        let start = (lo / step).ceil() as i64;
        let end = (hi / step + 1e-9).floor() as i64;
        (start..=end).map(|k| k as f64 * step).collect()
    }
}

pub fn tick_label(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}
