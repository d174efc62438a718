//! Deterministic SVG phase portraits.
//!
//! Coordinates are printed with two decimals in pixel space, so equal
//! inputs give byte-identical files.

use std::fmt::Write as _;
use std::str::FromStr;

use cycles_core::fields::{classify, CenterSystem, Flow, Point, Region, SaddleParams};
use cycles_core::orbits::VerifiedCycle;

const SIZE: f64 = 600.0;
const MARGIN: f64 = 40.0;
const GLYPHS: usize = 17;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b",
];

/// Plot window `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl FromStr for Window {
    type Err = String;

    /// Parses `x0,x1,y0,y1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let v: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|e| format!("window: {e}")))
            .collect::<Result<_, _>>()?;
        let [x0, x1, y0, y1] = v[..] else {
            return Err("window: expected x0,x1,y0,y1".into());
        };
        if !(x0 < x1 && y0 < y1) || !v.iter().all(|t| t.is_finite()) {
            return Err("window: expected x0 < x1 and y0 < y1".into());
        }
        Ok(Self { x0, x1, y0, y1 })
    }
}

impl Window {
    /// Bounding box of the cycles and the origin, padded by 10%.
    pub fn fit(cycles: &[VerifiedCycle]) -> Self {
        let pts = cycles
            .iter()
            .flat_map(|c| c.plus_arc.samples.iter().chain(&c.minus_arc.samples));
        let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for p in pts {
            x0 = x0.min(p.x);
            x1 = x1.max(p.x);
            y0 = y0.min(p.y);
            y1 = y1.max(p.y);
        }
        if x1 - x0 == 0.0 || y1 - y0 == 0.0 {
            return Self {
                x0: -1.0,
                x1: 1.0,
                y0: -1.0,
                y1: 1.0,
            };
        }
        let (px, py) = (0.1 * (x1 - x0), 0.1 * (y1 - y0));
        Self {
            x0: x0 - px,
            x1: x1 + px,
            y0: y0 - py,
            y1: y1 + py,
        }
    }

    fn to_px(self, p: Point) -> (f64, f64) {
        let w = SIZE - 2.0 * MARGIN;
        (
            MARGIN + (p.x - self.x0) / (self.x1 - self.x0) * w,
            SIZE - MARGIN - (p.y - self.y0) / (self.y1 - self.y0) * w,
        )
    }
}

fn path(win: Window, pts: impl Iterator<Item = Point>, close: bool) -> String {
    let mut d = String::new();
    for (k, p) in pts.enumerate() {
        let (x, y) = win.to_px(p);
        let _ = write!(d, "{}{x:.2},{y:.2}", if k == 0 { "M" } else { " L" });
    }
    if close {
        d.push_str(" Z");
    }
    d
}

fn glyphs(svg: &mut String, win: Window, sp: &SaddleParams, cs: &CenterSystem) {
    let cell = (SIZE - 2.0 * MARGIN) / GLYPHS as f64;
    svg.push_str("<g class=\"glyphs\" stroke=\"#bbbbbb\" stroke-width=\"1\">\n");
    for i in 0..GLYPHS {
        for j in 0..GLYPHS {
            let p = Point::new(
                win.x0 + (i as f64 + 0.5) / GLYPHS as f64 * (win.x1 - win.x0),
                win.y0 + (j as f64 + 0.5) / GLYPHS as f64 * (win.y1 - win.y0),
            );
            let f = match classify(p) {
                Region::SigmaPlus => sp.velocity(p),
                _ => cs.velocity(p),
            };
            let n = f.norm();
            if !n.is_finite() || n <= 1e-12 {
                continue;
            }
            // screen y points down
            let (ux, uy) = (f.x / n, -f.y / n);
            let (cx, cy) = win.to_px(p);
            let half = 0.35 * cell;
            let (ax, ay) = (cx - ux * half, cy - uy * half);
            let (bx, by) = (cx + ux * half, cy + uy * half);
            let (hx, hy) = (bx - ux * 4.0, by - uy * 4.0);
            let _ = writeln!(
                svg,
                "<path d=\"M{ax:.2},{ay:.2} L{bx:.2},{by:.2} M{:.2},{:.2} L{bx:.2},{by:.2} L{:.2},{:.2}\" fill=\"none\"/>",
                hx - uy * 3.0,
                hy + ux * 3.0,
                hx + uy * 3.0,
                hy - ux * 3.0,
            );
        }
    }
    svg.push_str("</g>\n");
}

/// Renders the axes, the two switching rays, optional direction glyphs and
/// the verified cycles with their crossing points `p_i`, `q_i`.
pub fn render_svg(
    sp: &SaddleParams,
    cs: &CenterSystem,
    cycles: &[VerifiedCycle],
    win: Window,
    with_glyphs: bool,
) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let inner = SIZE - 2.0 * MARGIN;
    let _ = writeln!(
        svg,
        "<defs><clipPath id=\"frame\"><rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{inner}\" height=\"{inner}\"/></clipPath></defs>"
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str("<g clip-path=\"url(#frame)\">\n");

    // first quadrant tint
    let (ox, oy) = win.to_px(Point::ORIGIN);
    let _ = writeln!(
        svg,
        "<rect class=\"sigma-plus\" x=\"{:.2}\" y=\"{MARGIN}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#fdf3e7\"/>",
        ox.max(MARGIN),
        (SIZE - MARGIN - ox.max(MARGIN)).max(0.0),
        (oy.min(SIZE - MARGIN) - MARGIN).max(0.0),
    );
    if with_glyphs {
        glyphs(&mut svg, win, sp, cs);
    }

    let (l, r) = (
        win.to_px(Point::new(win.x0, 0.0)),
        win.to_px(Point::new(win.x1, 0.0)),
    );
    let (b, t) = (
        win.to_px(Point::new(0.0, win.y0)),
        win.to_px(Point::new(0.0, win.y1)),
    );
    let _ = writeln!(
        svg,
        "<path class=\"axis\" d=\"M{:.2},{:.2} L{:.2},{:.2} M{:.2},{:.2} L{:.2},{:.2}\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"4 3\"/>",
        l.0, l.1, r.0, r.1, b.0, b.1, t.0, t.1
    );
    if win.x1 > 0.0 {
        let _ = writeln!(
            svg,
            "<path class=\"switch-x\" d=\"M{ox:.2},{oy:.2} L{:.2},{:.2}\" stroke=\"#c0392b\" stroke-width=\"3\"/>",
            r.0, r.1
        );
    }
    if win.y1 > 0.0 {
        let _ = writeln!(
            svg,
            "<path class=\"switch-y\" d=\"M{ox:.2},{oy:.2} L{:.2},{:.2}\" stroke=\"#8e44ad\" stroke-width=\"3\"/>",
            t.0, t.1
        );
    }

    for (k, c) in cycles.iter().enumerate() {
        let pts = c
            .plus_arc
            .samples
            .iter()
            .chain(c.minus_arc.samples.iter().skip(1))
            .copied();
        let _ = writeln!(
            svg,
            "<path class=\"cycle\" d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
            path(win, pts, true),
            PALETTE[k % PALETTE.len()]
        );
    }
    svg.push_str("</g>\n");

    for (k, c) in cycles.iter().enumerate() {
        for (label, p) in [
            ("p", Point::new(c.candidate.x, 0.0)),
            ("q", Point::new(0.0, c.candidate.y)),
        ] {
            let (x, y) = win.to_px(p);
            let _ = writeln!(
                svg,
                "<circle class=\"crossing\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"black\"/><text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" font-family=\"sans-serif\">{label}{}</text>",
                x + 4.0,
                y - 4.0,
                k + 1
            );
        }
    }
    let _ = writeln!(
        svg,
        "<text x=\"{MARGIN}\" y=\"{:.2}\" font-size=\"11\" font-family=\"sans-serif\">[{:.3}, {:.3}] × [{:.3}, {:.3}]</text>",
        SIZE - 12.0,
        win.x0,
        win.x1,
        win.y0,
        win.y1
    );
    svg.push_str("</svg>\n");
    svg
}
