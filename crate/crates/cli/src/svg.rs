//! Tiny self-contained SVG plot for sweep output: confidence band, mean
//! curve, and a framed data area. No external renderer.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

/// Renders the sweep `(t, mean, ci_low, ci_high)` rows to an SVG document.
pub fn sweep_plot(t: &[f64], mean: &[f64], ci_low: &[f64], ci_high: &[f64]) -> String {
    assert!(!t.is_empty());
    assert!(t.len() == mean.len() && t.len() == ci_low.len() && t.len() == ci_high.len());

    let (t_lo, t_hi) = bounds(t);
    let (mut y_lo, mut y_hi) = bounds(ci_low);
    let (hi_lo, hi_hi) = bounds(ci_high);
    y_lo = y_lo.min(hi_lo);
    y_hi = y_hi.max(hi_hi);
    if y_hi - y_lo < 1e-300 {
        // flat profile: open a window so the line sits mid-plot
        y_lo -= 0.5;
        y_hi += 0.5;
    }

    let x = |v: f64| MARGIN + (v - t_lo) / (t_hi - t_lo).max(1e-300) * (WIDTH - 2.0 * MARGIN);
    let y = |v: f64| HEIGHT - MARGIN - (v - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);

    let mut band = String::new();
    for (v, w) in t.iter().zip(ci_high) {
        write!(band, "{:.3},{:.3} ", x(*v), y(*w)).unwrap();
    }
    for (v, w) in t.iter().zip(ci_low).rev() {
        write!(band, "{:.3},{:.3} ", x(*v), y(*w)).unwrap();
    }

    let mut line = String::new();
    for (v, w) in t.iter().zip(mean) {
        write!(line, "{:.3},{:.3} ", x(*v), y(*w)).unwrap();
    }

    let mut doc = String::new();
    writeln!(
        doc,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    )
    .unwrap();
    writeln!(doc, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>").unwrap();
    writeln!(
        doc,
        "<polygon points=\"{}\" fill=\"#9ecae1\" fill-opacity=\"0.6\" stroke=\"none\"/>",
        band.trim_end()
    )
    .unwrap();
    writeln!(
        doc,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"#08519c\" stroke-width=\"1.5\"/>",
        line.trim_end()
    )
    .unwrap();
    writeln!(
        doc,
        "<rect x=\"{M}\" y=\"{M}\" width=\"{w:.3}\" height=\"{h:.3}\" fill=\"none\" stroke=\"black\"/>",
        M = MARGIN,
        w = WIDTH - 2.0 * MARGIN,
        h = HEIGHT - 2.0 * MARGIN
    )
    .unwrap();
    for (v, anchor, px) in [(t_lo, "start", x(t_lo)), (t_hi, "end", x(t_hi))] {
        writeln!(
            doc,
            "<text x=\"{px:.3}\" y=\"{:.3}\" font-size=\"12\" text-anchor=\"{anchor}\">t = {v:.6}</text>",
            HEIGHT - MARGIN + 16.0
        )
        .unwrap();
    }
    for (v, py) in [(y_lo, HEIGHT - MARGIN), (y_hi, MARGIN + 10.0)] {
        writeln!(
            doc,
            "<text x=\"{:.3}\" y=\"{py:.3}\" font-size=\"12\" text-anchor=\"end\">{v:.6e}</text>",
            MARGIN - 6.0
        )
        .unwrap();
    }
    doc.push_str("</svg>\n");
    doc
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in v {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_contains_band_and_line() {
        let t = [0.0, 0.5, 1.0];
        let m = [1.0, 0.8, 1.1];
        let lo = [0.9, 0.7, 1.0];
        let hi = [1.1, 0.9, 1.2];
        let doc = sweep_plot(&t, &m, &lo, &hi);
        assert!(doc.starts_with("<svg"));
        assert!(doc.contains("<polygon"));
        assert!(doc.contains("<polyline"));
        assert_eq!(doc, sweep_plot(&t, &m, &lo, &hi));
    }

    #[test]
    fn flat_profile_renders() {
        let t = [0.0, 1.0];
        let m = [2.0, 2.0];
        let doc = sweep_plot(&t, &m, &m, &m);
        assert!(doc.contains("<polyline"));
    }
}
