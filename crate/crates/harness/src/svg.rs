//! Minimal log-log line plots.

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 60.0;

/// One polyline on log-log axes with decade ticks. Non-positive points are
/// dropped.
pub fn loglog_plot(title: &str, pts: &[(f64, f64)]) -> String {
    let mut pts: Vec<(f64, f64)> = pts.iter().copied().filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite()).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
        W / 2.0,
        escape(title)
    );
    let (x0, x1) = decades(pts.iter().map(|p| p.0));
    let (y0, y1) = decades(pts.iter().map(|p| p.1));
    let sx = |x: f64| PAD + (x.log10() - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y.log10() - y0) / (y1 - y0) * (H - 2.0 * PAD);
    out.push_str(&format!(
        "<g stroke=\"black\" fill=\"none\"><rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\"/></g>\n",
        W - 2.0 * PAD,
        H - 2.0 * PAD
    ));
    out.push_str("<g font-family=\"sans-serif\" font-size=\"11\" stroke=\"#ccc\">\n");
    for e in x0 as i32..=x1 as i32 {
        let x = sx(10f64.powi(e));
        out.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{PAD}\" x2=\"{x:.2}\" y2=\"{:.2}\"/><text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\" stroke=\"none\">1e{e}</text>\n",
            H - PAD,
            H - PAD + 16.0
        ));
    }
    for e in y0 as i32..=y1 as i32 {
        let y = sy(10f64.powi(e));
        out.push_str(&format!(
            "<line x1=\"{PAD}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\"/><text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" stroke=\"none\">1e{e}</text>\n",
            W - PAD,
            PAD - 6.0,
            y + 4.0
        ));
    }
    out.push_str("</g>\n");
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">scale</text>\n",
        W / 2.0,
        H - 14.0
    ));
    if !pts.is_empty() {
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        out.push_str(&format!("<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"{}\"/>\n", path.join(" ")));
    }
    out.push_str("</svg>\n");
    out
}

fn decades(v: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let (a, b) = (lo.log10().floor(), hi.log10().ceil());
    if a == b {
        (a, a + 1.0)
    } else {
        (a, b)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
