//! Minimal standalone SVG plots with axes and ticks.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

#[derive(Debug, Clone)]
pub enum Mark {
    Line(Vec<[f64; 2]>),
    /// Closed polyline.
    Loop(Vec<[f64; 2]>),
    Points(Vec<[f64; 2]>),
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub mark: Mark,
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    /// Same scale on both axes.
    pub equal_aspect: bool,
    pub series: Vec<Series>,
    /// Written as a comment when set.
    pub stamp: Option<String>,
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_x: false,
            log_y: false,
            equal_aspect: false,
            series: Vec::new(),
            stamp: None,
        }
    }

    pub fn add(&mut self, label: &str, mark: Mark) -> &mut Self {
        self.series.push(Series {
            label: label.into(),
            mark,
        });
        self
    }

    fn tx(&self, v: f64) -> f64 {
        if self.log_x {
            v.log10()
        } else {
            v
        }
    }

    fn ty(&self, v: f64) -> f64 {
        if self.log_y {
            v.log10()
        } else {
            v
        }
    }

    fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        let mut xr = [f64::INFINITY, f64::NEG_INFINITY];
        let mut yr = [f64::INFINITY, f64::NEG_INFINITY];
        for s in &self.series {
            let pts = match &s.mark {
                Mark::Line(p) | Mark::Loop(p) | Mark::Points(p) => p,
            };
            for p in pts {
                let (x, y) = (self.tx(p[0]), self.ty(p[1]));
                if x.is_finite() && y.is_finite() {
                    xr = [xr[0].min(x), xr[1].max(x)];
                    yr = [yr[0].min(y), yr[1].max(y)];
                }
            }
        }
        let pad = |r: [f64; 2]| {
            if !r[0].is_finite() {
                return [0.0, 1.0];
            }
            let span = (r[1] - r[0]).max(1e-12 * r[1].abs().max(1.0));
            [r[0] - 0.05 * span, r[1] + 0.05 * span]
        };
        let (mut xr, mut yr) = (pad(xr), pad(yr));
        if self.equal_aspect {
            let half = 0.5 * (xr[1] - xr[0]).max(yr[1] - yr[0]);
            let (cx, cy) = (0.5 * (xr[0] + xr[1]), 0.5 * (yr[0] + yr[1]));
            xr = [cx - half, cx + half];
            yr = [cy - half, cy + half];
        }
        (xr, yr)
    }

    pub fn render(&self) -> String {
        let (xr, yr) = self.bounds();
        let (pw, ph) = (W - 2.0 * MARGIN, H - 2.0 * MARGIN);
        let (pw, ph) = if self.equal_aspect {
            (pw.min(ph), pw.min(ph))
        } else {
            (pw, ph)
        };
        let sx = |x: f64| MARGIN + (x - xr[0]) / (xr[1] - xr[0]) * pw;
        let sy = |y: f64| MARGIN + ph - (y - yr[0]) / (yr[1] - yr[0]) * ph;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
        );
        if let Some(stamp) = &self.stamp {
            let _ = writeln!(out, "<!-- generated {stamp} -->");
        }
        let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            W / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for t in ticks(xr) {
            let x = sx(t);
            let _ = writeln!(
                out,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                MARGIN + ph,
                MARGIN + ph + 5.0,
                MARGIN + ph + 18.0,
                tick_label(t, self.log_x)
            );
        }
        for t in ticks(yr) {
            let y = sy(t);
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                MARGIN - 5.0,
                MARGIN - 8.0,
                y + 4.0,
                tick_label(t, self.log_y)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN + pw / 2.0,
            MARGIN + ph + 40.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            MARGIN + ph / 2.0,
            MARGIN + ph / 2.0,
            escape(&self.y_label)
        );

        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let project = |pts: &[[f64; 2]]| -> Vec<(f64, f64)> {
                pts.iter()
                    .map(|p| (self.tx(p[0]), self.ty(p[1])))
                    .filter(|(x, y)| x.is_finite() && y.is_finite())
                    .map(|(x, y)| (sx(x), sy(y)))
                    .collect()
            };
            let path = |pts: &[(f64, f64)]| {
                pts.iter()
                    .map(|(x, y)| format!("{x:.2},{y:.2}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            match &s.mark {
                Mark::Line(p) => {
                    let _ = writeln!(
                        out,
                        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                        path(&project(p))
                    );
                }
                Mark::Loop(p) => {
                    let _ = writeln!(
                        out,
                        r#"<polygon points="{}" fill="none" stroke="{color}" stroke-width="1.2"/>"#,
                        path(&project(p))
                    );
                }
                Mark::Points(p) => {
                    for (x, y) in project(p) {
                        let _ = writeln!(
                            out,
                            r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#
                        );
                    }
                }
            }
            let ly = MARGIN + 14.0 + 14.0 * i as f64;
            let lx = MARGIN + pw - 194.0;
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="10" height="3" fill="{color}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                lx,
                ly - 4.0,
                lx + 14.0,
                ly,
                escape(&s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn ticks(r: [f64; 2]) -> Vec<f64> {
    let span = r[1] - r[0];
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let mut t = (r[0] / step).ceil() * step;
    let mut out = Vec::new();
    while t <= r[1] + 1e-12 * step && out.len() < 20 {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn tick_label(t: f64, log: bool) -> String {
    if log {
        format!("1e{}", fmt_num(t))
    } else {
        fmt_num(t)
    }
}

fn fmt_num(t: f64) -> String {
    let s = format!("{t:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_is_deterministic_without_stamp() {
        let mut p = Plot::new("t", "x", "y");
        p.log_x = true;
        p.log_y = true;
        p.add("pts", Mark::Points(vec![[1e-3, 1e-4], [1e-2, 3e-4]]));
        p.add("env", Mark::Line(vec![[1e-3, 1e-2], [1e-2, 2e-2]]));
        let a = p.render();
        assert_eq!(a, p.render());
        assert!(!a.contains("generated"));
        p.stamp = Some("now".into());
        assert!(p.render().contains("<!-- generated now -->"));
    }

    #[test]
    fn ticks_cover_range() {
        let t = ticks([0.0, 1.0]);
        assert_eq!(t.first(), Some(&0.0));
        assert!(t.len() >= 3);
    }
}
