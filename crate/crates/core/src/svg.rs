//! Hand-emitted SVG views: the persistence diagram of signed diagrams, and
//! the signed barcode of rectangle diagonals. No plotting dependency; output
//! is deterministic (fixed element order, fixed number formatting, no
//! timestamps).

use std::fmt::Write;

use crate::bifiltration::{Axis, GradeMap};
use crate::signed::{MetaDiagram, RankDecomposition};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 640.0;
const MARGIN: f64 = 48.0;
const GLYPH: f64 = 24.0;
const POSITIVE: &str = "#d62728";
const NEGATIVE: &str = "#1f77b4";

struct Frame {
    min: f64,
    max: f64,
}

impl Frame {
    /// Data range padded by 5%, degenerate ranges widened to unit size.
    fn new(values: impl Iterator<Item = f64>) -> Frame {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for v in values.filter(|v| v.is_finite()) {
            min = min.min(v);
            max = max.max(v);
        }
        if !min.is_finite() {
            min = 0.0;
            max = 1.0;
        }
        if max - min < 1e-12 {
            max = min + 1.0;
        }
        let pad = (max - min) * 0.05;
        Frame {
            min: min - pad,
            max: max + pad,
        }
    }

    fn x(&self, v: f64) -> f64 {
        let v = v.min(self.max);
        MARGIN + (v - self.min) / (self.max - self.min) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        let v = v.min(self.max);
        HEIGHT - MARGIN - (v - self.min) / (self.max - self.min) * (HEIGHT - 2.0 * MARGIN)
    }

    /// Clamp target for unbounded endpoints.
    fn top(&self) -> f64 {
        self.max
    }
}

fn header(out: &mut String) {
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
}

fn axes(out: &mut String) {
    let _ = write!(
        out,
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\" stroke-width=\"1\"/>\n\
         <line x1=\"{m}\" y1=\"{b}\" x2=\"{m}\" y2=\"{t}\" stroke=\"black\" stroke-width=\"1\"/>\n",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN,
    );
}

/// A persistence diagram of signed diagrams: one glyph per non-zero cell of
/// the chosen dimension, placed at the cell's real column values above the
/// diagonal; inside each glyph the cell's bars, positive red, negative blue,
/// stroke count growing with multiplicity (capped at 3).
pub fn render_diagram_of_diagrams(mdgm: &MetaDiagram, map: &GradeMap, dim: usize) -> String {
    let n = map.n();
    let mut out = String::new();
    header(&mut out);
    axes(&mut out);
    let frame = Frame::new(map.values(Axis::X).iter().copied());
    let yframe = Frame::new(map.values(Axis::Y).iter().copied());
    let _ = writeln!(
        out,
        "<line x1=\"{a:.3}\" y1=\"{b:.3}\" x2=\"{c:.3}\" y2=\"{d:.3}\" \
         stroke=\"#cccccc\" stroke-dasharray=\"4 3\"/>",
        a = frame.x(frame.min),
        b = frame.y(frame.min),
        c = frame.x(frame.max),
        d = frame.y(frame.max),
    );
    for (&(cell_dim, s, t), bc) in mdgm.iter() {
        if cell_dim != dim {
            continue;
        }
        let sx = map.value(Axis::X, s);
        // The cell [s, t] covers targets up to just below column t + 1.
        let tx = if t < n {
            map.value(Axis::X, t + 1)
        } else {
            frame.top()
        };
        let cx = frame.x(sx);
        let cy = frame.y(tx);
        let _ = write!(
            out,
            "<g transform=\"translate({x:.3} {y:.3})\">\n\
             <rect x=\"0\" y=\"0\" width=\"{g}\" height=\"{g}\" fill=\"none\" \
             stroke=\"#888888\" stroke-width=\"0.5\"/>\n",
            x = cx - GLYPH / 2.0,
            y = cy - GLYPH / 2.0,
            g = GLYPH,
        );
        let bars: Vec<(crate::table::Bar, i64)> = bc.iter().collect();
        let rows = bars.len().max(1) as f64;
        for (row, (bar, mult)) in bars.iter().enumerate() {
            let lo = map.value(Axis::Y, bar.lo as usize);
            let hi = if (bar.hi as usize) < n {
                map.value(Axis::Y, bar.hi as usize + 1)
            } else {
                yframe.top()
            };
            let scale =
                |v: f64| (v.min(yframe.max) - yframe.min) / (yframe.max - yframe.min) * GLYPH;
            let (x1, x2) = (scale(lo), scale(hi));
            let y = (row as f64 + 0.5) / rows * GLYPH;
            let color = if *mult > 0 { POSITIVE } else { NEGATIVE };
            let strokes = mult.unsigned_abs().min(3);
            for k in 0..strokes {
                let dy = (k as f64 - (strokes - 1) as f64 / 2.0) * 1.2;
                let _ = writeln!(
                    out,
                    "<line x1=\"{x1:.3}\" y1=\"{yy:.3}\" x2=\"{x2:.3}\" y2=\"{yy:.3}\" \
                     stroke=\"{color}\" stroke-width=\"1.2\"/>",
                    yy = y + dy,
                );
            }
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    out
}

/// The signed barcode: each rectangle of the decomposition drawn as its
/// diagonal in real coordinates, positive part red, negative part blue,
/// multiplicity as parallel stroke count (capped at 3).
pub fn render_signed_barcode(decomp: &RankDecomposition, map: &GradeMap) -> String {
    let n = map.n();
    let mut out = String::new();
    header(&mut out);
    axes(&mut out);
    let xframe = Frame::new(map.values(Axis::X).iter().copied());
    let yframe = Frame::new(map.values(Axis::Y).iter().copied());
    let mut draw = |rects: &std::collections::BTreeMap<crate::signed::Rect, u64>, color: &str| {
        for (rect, &mult) in rects {
            let x1 = map.value(Axis::X, rect.s);
            let x2 = if rect.t < n {
                map.value(Axis::X, rect.t + 1)
            } else {
                xframe.top()
            };
            let y1 = map.value(Axis::Y, rect.lo);
            let y2 = if rect.hi < n {
                map.value(Axis::Y, rect.hi + 1)
            } else {
                yframe.top()
            };
            let strokes = mult.min(3);
            for k in 0..strokes {
                let off = (k as f64 - (strokes - 1) as f64 / 2.0) * 2.0;
                let _ = writeln!(
                    out,
                    "<line x1=\"{a:.3}\" y1=\"{b:.3}\" x2=\"{c:.3}\" y2=\"{d:.3}\" \
                     stroke=\"{color}\" stroke-width=\"1.5\"/>",
                    a = xframe.x(x1),
                    b = yframe.y(y1) + off,
                    c = xframe.x(x2),
                    d = yframe.y(y2) + off,
                );
            }
        }
    };
    draw(&decomp.r, POSITIVE);
    draw(&decomp.s, NEGATIVE);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signed::{mobius_invert, rank_decomposition};
    use crate::table::compute_metarank;
    use crate::vineyard::CheckLevel;

    #[test]
    fn zero_module_renders_axes_only() {
        let raw = crate::bifiltration::parse_bifiltration("").unwrap();
        let (complex, map) = crate::bifiltration::refine_to_simplexwise(&raw).unwrap();
        let table = compute_metarank(&complex, CheckLevel::None);
        let mdgm = mobius_invert(&table);
        let svg = render_diagram_of_diagrams(&mdgm, &map, 0);
        assert!(svg.contains("<svg"));
        assert!(!svg.contains("<g transform"));
        let decomp = rank_decomposition(&mdgm, 0);
        let svg = render_signed_barcode(&decomp, &map);
        assert_eq!(svg.matches("<line").count(), 2); // the two axes
    }

    /// The sphere fixture carries a single 2-dimensional class supported on
    /// one quadrant rectangle of the grid: exactly one glyph, one red bar.
    #[test]
    fn rectangle_module_renders_one_glyph_and_one_red_diagonal() {
        let (complex, map) = crate::generators::rectangle_module_complex();
        let table = compute_metarank(&complex, CheckLevel::None);
        let mdgm = mobius_invert(&table);
        let cells: Vec<_> = mdgm.iter().filter(|(&(d, _, _), _)| d == 2).collect();
        assert_eq!(cells.len(), 1);
        let svg = render_diagram_of_diagrams(&mdgm, &map, 2);
        assert_eq!(svg.matches("<g transform").count(), 1);
        assert!(svg.contains(POSITIVE));
        let decomp = rank_decomposition(&mdgm, 2);
        let svg = render_signed_barcode(&decomp, &map);
        assert_eq!(svg.matches(POSITIVE).count(), 1);
        assert!(!svg.contains(NEGATIVE));
        // Determinism.
        let again = render_signed_barcode(&decomp, &map);
        assert_eq!(svg, again);
    }
}
