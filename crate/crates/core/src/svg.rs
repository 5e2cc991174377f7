//! Minimal deterministic SVG line plots.

use std::fmt::Write as _;

const W: f64 = 720.0;
const H: f64 = 420.0;
const MARGIN: (f64, f64, f64, f64) = (70.0, 20.0, 30.0, 50.0); // left, right, top, bottom
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Series<'a> {
    pub label: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
}

pub struct Plot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    /// Plot `log10(y)`; non-positive values are dropped.
    pub log_y: bool,
    pub series: Vec<Series<'a>>,
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

impl Plot<'_> {
    fn points(&self, s: &Series) -> Vec<(f64, f64)> {
        s.x.iter()
            .zip(s.y)
            .filter(|(_, &y)| !self.log_y || y > 0.0)
            .map(|(&x, &y)| (x, if self.log_y { y.log10() } else { y }))
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect()
    }

    pub fn render(&self) -> String {
        let pts: Vec<Vec<(f64, f64)>> = self.series.iter().map(|s| self.points(s)).collect();
        let (x0, x1) = bounds(pts.iter().flatten().map(|p| p.0));
        let (y0, y1) = bounds(pts.iter().flatten().map(|p| p.1));
        let (ml, mr, mt, mb) = MARGIN;
        let px = |x: f64| ml + (x - x0) / (x1 - x0) * (W - ml - mr);
        let py = |y: f64| H - mb - (y - y0) / (y1 - y0) * (H - mt - mb);

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(out, r#"<text x="{}" y="18" text-anchor="middle">{}</text>"#, W / 2.0, escape(self.title));
        let _ = writeln!(
            out,
            r#"<rect x="{ml}" y="{mt}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - ml - mr,
            H - mt - mb
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let xv = x0 + f * (x1 - x0);
            let yv = y0 + f * (y1 - y0);
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                px(xv),
                H - mb + 16.0,
                tick(xv)
            );
            let label = if self.log_y { format!("1e{}", tick(yv)) } else { tick(yv) };
            let _ =
                writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#, ml - 4.0, py(yv) + 4.0);
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (ml + W - mr) / 2.0,
            H - 12.0,
            escape(self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            (mt + H - mb) / 2.0,
            (mt + H - mb) / 2.0,
            escape(self.y_label)
        );
        for (k, (s, p)) in self.series.iter().zip(&pts).enumerate() {
            let color = COLORS[k % COLORS.len()];
            let path: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#,
                path.join(" ")
            );
            let ly = mt + 14.0 + 16.0 * k as f64;
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{ly:.2}" fill="{color}" text-anchor="end">{}</text>"#,
                W - mr - 6.0,
                escape(s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
