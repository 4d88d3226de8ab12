use std::collections::BTreeMap;
use std::fmt::Write;

use super::record::Record;

const PALETTE: [&str; 8] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"];

/// A line chart of `metric` against the grid coordinate `x`, one line per
/// remaining combination of coordinates, method and parametrization.
/// Returns `None` when no record carries both.
pub fn line_chart(records: &[Record], x: &str, metric: &str, title: &str) -> Option<String> {
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.metric == metric && r.value.is_finite()) {
        let Some(xv) = r.get(x) else { continue };
        let mut label: Vec<String> = r.point.iter().filter(|(k, _)| k != x).map(|(k, v)| format!("{k}={v}")).collect();
        if r.method != "-" {
            label.push(r.method.clone());
        }
        if r.param != "-" {
            label.push(format!("({})", r.param));
        }
        series.entry(label.join(" ")).or_default().push((xv, r.value));
    }
    if series.is_empty() {
        return None;
    }
    let pts = series.values().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(a, b) in pts {
        x0 = x0.min(a);
        x1 = x1.max(a);
        y0 = y0.min(b);
        y1 = y1.max(b);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let (w, h, left, top, plot_w, plot_h) = (900.0, 520.0, 70.0, 40.0, 560.0, 420.0);
    let sx = |v: f64| left + (v - x0) / (x1 - x0) * plot_w;
    let sy = |v: f64| top + plot_h - (v - y0) / (y1 - y0) * plot_h;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<text x="{left}" y="20" font-size="14">{}</text>"#, escape(title));
    let _ = writeln!(s, r#"<rect x="{left}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#);
    for i in 0..=4 {
        let fx = x0 + (x1 - x0) * i as f64 / 4.0;
        let fy = y0 + (y1 - y0) * i as f64 / 4.0;
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, sx(fx), top + plot_h + 16.0, tick(fx));
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#, left - 6.0, sy(fy) + 4.0, tick(fy));
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, left + plot_w / 2.0, h - 10.0, escape(x));
    for (i, (label, mut pts)) in series.into_iter().enumerate() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = pts.iter().map(|&(a, b)| format!("{:.1},{:.1}", sx(a), sy(b))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        let ly = top + 14.0 * i as f64;
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#, left + plot_w + 12.0, left + plot_w + 30.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, left + plot_w + 34.0, ly + 4.0, escape(&label));
    }
    s.push_str("</svg>\n");
    Some(s)
}

fn tick(v: f64) -> String {
    let t = format!("{v:.3}");
    t.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
