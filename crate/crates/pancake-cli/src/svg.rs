//! Static SVG rendering of a computed cut: points, the two lines, and the
//! per-quadrant counts. Output is deterministic for fixed inputs.

use pancake::geometry::{CutLine, OrthoCut, PointSet2D, QuadrantCounts};

const SIZE: f64 = 800.0;
const MARGIN: f64 = 60.0;

struct Frame {
    min_x: f64,
    min_y: f64,
    scale: f64,
}

impl Frame {
    fn fit(ps: &PointSet2D) -> Frame {
        let mut min_x = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for p in ps.points() {
            min_x = min_x.min(p.x);
            max_x = max_x.max(p.x);
            min_y = min_y.min(p.y);
            max_y = max_y.max(p.y);
        }
        let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
        Frame {
            min_x,
            min_y,
            scale: (SIZE - 2.0 * MARGIN) / span,
        }
    }

    fn x(&self, x: f64) -> f64 {
        MARGIN + (x - self.min_x) * self.scale
    }

    // SVG y grows downward.
    fn y(&self, y: f64) -> f64 {
        SIZE - MARGIN - (y - self.min_y) * self.scale
    }
}

fn line_path(frame: &Frame, line: &CutLine) -> String {
    // Draw across the full data frame, extended past the margins.
    let lo = frame.min_x - 2.0 * MARGIN / frame.scale;
    let hi = frame.min_x + (SIZE / frame.scale);
    match *line {
        CutLine::Slanted { slope, intercept } => {
            let (x1, y1) = (lo, slope * lo + intercept);
            let (x2, y2) = (hi, slope * hi + intercept);
            format!(
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>",
                frame.x(x1),
                frame.y(y1),
                frame.x(x2),
                frame.y(y2)
            )
        }
        CutLine::Vertical { x } => format!(
            "<line x1=\"{0:.2}\" y1=\"0\" x2=\"{0:.2}\" y2=\"{1}\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>",
            frame.x(x),
            SIZE
        ),
    }
}

pub fn render(ps: &PointSet2D, cut: &OrthoCut, counts: &QuadrantCounts) -> String {
    let frame = Frame::fit(ps);
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n",
        SIZE as u64
    ));
    out.push_str(&format!(
        "<rect width=\"{0}\" height=\"{0}\" fill=\"#fdfdfd\"/>\n",
        SIZE as u64
    ));
    out.push_str(&line_path(&frame, &cut.line1));
    out.push('\n');
    out.push_str(&line_path(&frame, &cut.line2));
    out.push('\n');
    for p in ps.points() {
        out.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"#2c3e50\"/>\n",
            frame.x(p.x),
            frame.y(p.y)
        ));
    }
    let labels = [
        (counts.q1, "q1", SIZE - MARGIN, MARGIN),
        (counts.q2, "q2", MARGIN, MARGIN),
        (counts.q3, "q3", MARGIN, SIZE - MARGIN),
        (counts.q4, "q4", SIZE - MARGIN, SIZE - MARGIN),
    ];
    for (count, name, x, y) in labels {
        out.push_str(&format!(
            "<text x=\"{x:.0}\" y=\"{y:.0}\" font-family=\"monospace\" font-size=\"18\" fill=\"#555\" text-anchor=\"middle\">{name}={count}</text>\n"
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.0}\" y=\"{:.0}\" font-family=\"monospace\" font-size=\"14\" fill=\"#888\" text-anchor=\"middle\">n={} on1={} on2={} on_both={}</text>\n",
        SIZE / 2.0,
        SIZE - 18.0,
        counts.n,
        counts.on1,
        counts.on2,
        counts.on_both
    ));
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use pancake::geometry::OrthoCut;

    #[test]
    fn render_is_deterministic() {
        let ps = PointSet2D::from_coords(&[(1.0, 2.0), (-1.0, -2.0), (2.0, -1.0), (-2.0, 1.0)]);
        let cut = OrthoCut::slanted(1.0, 0.0, 0.0).unwrap();
        let counts = pancake::count_quadrants(&ps, &cut, 1e-9);
        let a = render(&ps, &cut, &counts);
        let b = render(&ps, &cut, &counts);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("q1=1"));
    }
}
