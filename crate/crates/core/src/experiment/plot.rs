//! Hand-written SVG line charts of the witness against N.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::sweep::ResultRow;
use crate::error::{Error, Result};

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

fn series_name(r: &ResultRow) -> String {
    match r.l_requested {
        Some(l) if r.method == crate::synth::Method::GroupMV => format!("{} L={l}", r.method),
        _ => r.method.to_string(),
    }
}

/// SVG document for the rows of one topology: x = N, y = mean witness with
/// +-std error bars, one polyline per (method, L).
pub fn plot_svg(topology: &str, rows: &[&ResultRow]) -> String {
    let mut series: BTreeMap<String, Vec<(usize, f64, f64)>> = BTreeMap::new();
    for r in rows {
        if let Some(w) = r.w_mean {
            series.entry(series_name(r)).or_default().push((r.n, w, r.w_std.unwrap_or(0.0)));
        }
    }
    let ns: Vec<usize> = series.values().flatten().map(|p| p.0).collect();
    let (n_lo, n_hi) = match (ns.iter().min(), ns.iter().max()) {
        (Some(&a), Some(&b)) if a < b => (a as f64, b as f64),
        (Some(&a), _) => (a as f64 - 1.0, a as f64 + 1.0),
        _ => (0.0, 1.0),
    };
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let sx = |n: f64| LEFT + (n - n_lo) / (n_hi - n_lo) * pw;
    let sy = |w: f64| TOP + (1.0 - w.clamp(0.0, 1.0)) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">GHZ witness vs N ({topology})</text>"#, LEFT + pw / 2.0);
    let _ = writeln!(s, r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##);
    for i in 0..=5 {
        let w = i as f64 / 5.0;
        let y = sy(w);
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##, LEFT + pw);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{w:.1}</text>"#, LEFT - 6.0, y + 4.0);
    }
    let y_half = sy(0.5);
    let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y_half:.1}" x2="{:.1}" y2="{y_half:.1}" stroke="#888" stroke-dasharray="4 3"/>"##, LEFT + pw);
    let mut ticks = ns.clone();
    ticks.sort_unstable();
    ticks.dedup();
    for n in ticks {
        let x = sx(n as f64);
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{n}</text>"#, TOP + ph + 18.0);
    }
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">N</text>"#, LEFT + pw / 2.0, H - 12.0);
    let _ = writeln!(s, r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">W_N</text>"#, TOP + ph / 2.0, TOP + ph / 2.0);

    for (i, (name, mut pts)) in series.into_iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        pts.sort_by_key(|p| p.0);
        let poly: Vec<String> = pts.iter().map(|&(n, w, _)| format!("{:.1},{:.1}", sx(n as f64), sy(w))).collect();
        let _ = writeln!(s, r#"<g class="series" data-name="{name}">"#);
        let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, poly.join(" "));
        for &(n, w, sd) in &pts {
            let x = sx(n as f64);
            let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="{color}"/>"#, sy(w - sd), sy(w + sd));
            let _ = writeln!(s, r#"<circle cx="{x:.1}" cy="{:.1}" r="3.5" fill="{color}"/>"#, sy(w));
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + pw + 16.0;
        let _ = writeln!(s, r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{name}</text>"#, lx + 26.0, ly + 4.0);
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

/// One `witness_<topology>.svg` per topology in `dir`.
pub fn emit_plot(rows: &[ResultRow], dir: &Path) -> Result<Vec<PathBuf>> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("nothing to plot".into()));
    }
    let mut by_topo: BTreeMap<&str, Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        by_topo.entry(r.topology.as_str()).or_default().push(r);
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = Vec::new();
    for (topo, rs) in by_topo {
        let safe: String = topo.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect();
        let path = dir.join(format!("witness_{safe}.svg"));
        std::fs::write(&path, plot_svg(topo, &rs)).map_err(|e| Error::io(&path, e))?;
        out.push(path);
    }
    Ok(out)
}
