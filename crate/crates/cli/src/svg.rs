//! Minimal SVG plotting over a chart window: `x` to the right, `t` upwards.

use std::fmt::Write as _;

use sigchange::locus::Polyline;
use sigchange::{ChartPoint, Window};

const SIZE: f64 = 640.0;
const PAD: f64 = 40.0;

pub struct Plot {
    window: Window,
    body: String,
}

fn f(v: f64) -> String {
    format!("{v:.3}")
}

impl Plot {
    pub fn new(window: Window) -> Self {
        Plot {
            window,
            body: String::new(),
        }
    }

    fn px(&self, p: ChartPoint) -> (f64, f64) {
        let w = &self.window;
        let sx = (p.x - w.x_min) / (w.x_max - w.x_min);
        let st = (p.t - w.t_min) / (w.t_max - w.t_min);
        (PAD + sx * SIZE, PAD + (1.0 - st) * SIZE)
    }

    /// Pixels per chart unit along `x` and `t`.
    fn scale(&self) -> (f64, f64) {
        let w = &self.window;
        (SIZE / (w.x_max - w.x_min), SIZE / (w.t_max - w.t_min))
    }

    pub fn rect(&self, t0: f64, t1: f64, x0: f64, x1: f64) -> (f64, f64, f64, f64) {
        let (ax, at) = self.px(ChartPoint::new(t1, x0));
        let (bx, bt) = self.px(ChartPoint::new(t0, x1));
        (ax, at, bx - ax, bt - at)
    }

    /// Filled cell covering `[t0,t1]×[x0,x1]`.
    pub fn shade(&mut self, t0: f64, t1: f64, x0: f64, x1: f64, fill: &str) {
        let (x, y, w, h) = self.rect(t0, t1, x0, x1);
        let _ = writeln!(
            self.body,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}" stroke="none"/>"#,
            f(x),
            f(y),
            f(w),
            f(h)
        );
    }

    /// Segment of pixel length `len` centred at `p` along chart direction `(dt, dx)`.
    pub fn glyph(&mut self, p: ChartPoint, dir: [f64; 2], len: f64, stroke: &str) {
        let (sx, st) = self.scale();
        let (cx, cy) = self.px(p);
        let (ux, uy) = (dir[1] * sx, -dir[0] * st);
        let n = ux.hypot(uy);
        if n == 0.0 || !n.is_finite() {
            return;
        }
        let (hx, hy) = (0.5 * len * ux / n, 0.5 * len * uy / n);
        let _ = writeln!(
            self.body,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}" stroke-width="1"/>"#,
            f(cx - hx),
            f(cy - hy),
            f(cx + hx),
            f(cy + hy)
        );
    }

    pub fn polyline(&mut self, pts: &[ChartPoint], closed: bool, stroke: &str, width: f64, dashed: bool) {
        if pts.len() < 2 {
            return;
        }
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = self.px(*p);
            let _ = write!(d, "{}{} {} ", if i == 0 { "M" } else { "L" }, f(x), f(y));
        }
        if closed {
            d.push('Z');
        }
        let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            self.body,
            r#"<path d="{}" fill="none" stroke="{stroke}" stroke-width="{width}"{dash}/>"#,
            d.trim_end()
        );
    }

    pub fn locus(&mut self, lines: &[Polyline], stroke: &str) {
        for l in lines {
            self.polyline(&l.points, l.closed, stroke, 1.5, true);
        }
    }

    pub fn dot(&mut self, p: ChartPoint, r: f64, fill: &str) {
        let (x, y) = self.px(p);
        let _ = writeln!(self.body, r#"<circle cx="{}" cy="{}" r="{r}" fill="{fill}"/>"#, f(x), f(y));
    }

    pub fn cell_size_px(&self, grid_n: usize) -> f64 {
        SIZE / (grid_n.max(2) - 1) as f64
    }

    pub fn finish(self, title: &str) -> String {
        let total = SIZE + 2.0 * PAD;
        let w = &self.window;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
        );
        let _ = writeln!(s, "<title>{}</title>", escape(title));
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        s.push_str(&self.body);
        let _ = writeln!(
            s,
            r#"<rect x="{PAD}" y="{PAD}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>"#
        );
        let label = |v: f64| format!("{v}");
        let bottom = PAD + SIZE + 16.0;
        let _ = writeln!(s, r#"<text x="{PAD}" y="{bottom}" font-size="12">{}</text>"#, label(w.x_min));
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{bottom}" font-size="12" text-anchor="end">{}</text>"#,
            PAD + SIZE,
            label(w.x_max)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{bottom}" font-size="12" text-anchor="middle">x</text>"#,
            PAD + SIZE / 2.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{}</text>"#,
            PAD - 4.0,
            PAD + SIZE,
            label(w.t_min)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{}</text>"#,
            PAD - 4.0,
            PAD + 12.0,
            label(w.t_max)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="end">t</text>"#,
            PAD - 4.0,
            PAD + SIZE / 2.0
        );
        s.push_str("</svg>\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
