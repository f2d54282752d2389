//! Flat-file emission: CSV fields, JSON records and static figures.
//!
//! Every file is written to a sibling temporary and renamed into place.

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use qwscatter::lattice::{Chirality, GridField, Site, SparseField};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .with_context(|| format!("creating {}", dir.display()))?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, contents).with_context(|| format!("writing {}", path.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub const FIELD_HEADER: &str = "x1,x2,chirality,re,im";

/// One row per site and chirality, in window order.
pub fn field_csv(f: &GridField) -> String {
    let mut out = String::with_capacity(48 * 4 * f.window().num_sites());
    out.push_str(FIELD_HEADER);
    out.push('\n');
    for (x, v) in f.iter() {
        for p in Chirality::ALL {
            let z = v[p.index()];
            let _ = writeln!(out, "{},{},{},{},{}", x.x1, x.x2, p.label(), z.re, z.im);
        }
    }
    out
}

pub fn parse_field_csv(text: &str) -> Result<SparseField> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == FIELD_HEADER => {}
        _ => bail!("field file must start with the header `{FIELD_HEADER}`"),
    }
    let mut out = SparseField::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 5 {
            bail!("line {}: expected 5 columns, found {}", i + 1, cols.len());
        }
        let x1: i64 = cols[0].parse().with_context(|| format!("line {}: x1", i + 1))?;
        let x2: i64 = cols[1].parse().with_context(|| format!("line {}: x2", i + 1))?;
        let p = Chirality::from_label(cols[2])
            .with_context(|| format!("line {}: chirality `{}`", i + 1, cols[2]))?;
        let re: f64 = cols[3].parse().with_context(|| format!("line {}: re", i + 1))?;
        let im: f64 = cols[4].parse().with_context(|| format!("line {}: im", i + 1))?;
        if !re.is_finite() || !im.is_finite() {
            bail!("line {}: non-finite amplitude", i + 1);
        }
        let mut a = qwscatter::lattice::ZERO4;
        a[p.index()] = Complex64::new(re, im);
        out.add_at(Site::new(x1, x2), a);
    }
    Ok(out)
}

fn moduli(f: &GridField, p: Chirality) -> (usize, Vec<f64>) {
    let w = f.window();
    let side = w.side();
    let l = w.half_width();
    // rows from top (x2 = L) to bottom, columns from x1 = -L
    let mut vals = Vec::with_capacity(side * side);
    for x2 in (-l..=l).rev() {
        for x1 in -l..=l {
            vals.push(f.component(Site::new(x1, x2), p).norm());
        }
    }
    (side, vals)
}

/// ASCII (P2) greymap of `|f_p|`, scaled to the field's maximum.
pub fn pgm_heatmap(f: &GridField, p: Chirality) -> String {
    let (side, vals) = moduli(f, p);
    let max = vals.iter().copied().fold(0.0, f64::max);
    let mut out = format!("P2\n# |{}| component, max {}\n{side} {side}\n255\n", p.label(), max);
    for row in vals.chunks(side) {
        let line: Vec<String> = row
            .iter()
            .map(|v| {
                let g = if max > 0.0 { (v / max * 255.0).round() } else { 0.0 };
                format!("{}", g as u8)
            })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Four greyscale panels of `|f_p|`, one per chirality.
pub fn svg_heatmap(f: &GridField, cell: usize) -> String {
    let side = f.window().side();
    let panel = side * cell;
    let gap = 20;
    let width = 4 * panel + 3 * gap;
    let height = panel + 20;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    );
    for p in Chirality::ALL {
        let (_, vals) = moduli(f, p);
        let max = vals.iter().copied().fold(0.0, f64::max);
        let ox = p.index() * (panel + gap);
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"14\" font-family=\"monospace\" font-size=\"12\">|{}|</text>",
            ox,
            p.label()
        );
        for (i, v) in vals.iter().enumerate() {
            let g = if max > 0.0 { 255 - (v / max * 255.0).round() as u8 } else { 255 };
            let (r, c) = (i / side, i % side);
            let _ = writeln!(
                out,
                "<rect x=\"{}\" y=\"{}\" width=\"{cell}\" height=\"{cell}\" fill=\"rgb({g},{g},{g})\"/>",
                ox + c * cell,
                20 + r * cell
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Polylines of several series over a shared abscissa.
pub fn svg_lines(title: &str, xs: &[f64], series: &[(String, Vec<f64>)]) -> String {
    let (w, h, m) = (640.0, 400.0, 40.0);
    let xmin = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let xmax = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ymax = series
        .iter()
        .flat_map(|(_, ys)| ys.iter().copied())
        .fold(0.0, f64::max)
        .max(1e-300);
    let sx = |x: f64| {
        if xmax > xmin {
            m + (x - xmin) / (xmax - xmin) * (w - 2.0 * m)
        } else {
            w / 2.0
        }
    };
    let sy = |y: f64| h - m - y / ymax * (h - 2.0 * m);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <text x=\"{m}\" y=\"20\" font-family=\"monospace\" font-size=\"12\">{title} (max {ymax:.4})</text>\n\
         <rect x=\"{m}\" y=\"{m}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        w - 2.0 * m,
        h - 2.0 * m
    );
    for (k, (name, ys)) in series.iter().enumerate() {
        let pts: Vec<String> = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
            .collect();
        let hue = (k * 137) % 360;
        let _ = writeln!(
            out,
            "<polyline fill=\"none\" stroke=\"hsl({hue},60%,40%)\" points=\"{}\"><title>{name}</title></polyline>",
            pts.join(" ")
        );
    }
    out.push_str("</svg>\n");
    out
}
