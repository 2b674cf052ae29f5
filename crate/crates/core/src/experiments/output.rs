//! CSV and SVG writers for table rows and scatter records.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::scatter::ScatterRecord;
use super::table::TableRow;
use super::ExperimentError;
use crate::moments::Level;

const SCATTER_HEADER: &str = "sample_id,mode,seed,lambda_1,lambda_1ab,lambda_2,lambda_3,lambda_4,deviated";

/// Fifteen significant digits, positional notation where that is readable.
pub fn format_sig15(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return format!("{:.14}", 0.0);
    }
    // take the exponent after rounding, so 0.99999999999999996 counts as 1
    let sci = format!("{v:.14e}");
    let exponent: i32 = sci[sci.find('e').expect("exponent marker") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..15).contains(&exponent) {
        let decimals = (14 - exponent).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        sci
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), ExperimentError> {
    fs::write(path, contents).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn scatter_csv(records: &[ScatterRecord]) -> Result<String, ExperimentError> {
    if records.is_empty() {
        return Err(ExperimentError::EmptyInput);
    }
    let mut out = String::with_capacity(96 * (records.len() + 1));
    out.push_str(SCATTER_HEADER);
    out.push('\n');
    for r in records {
        let _ = write!(out, "{},{},{}", r.sample_id, r.mode, r.seed);
        for level in Level::ALL {
            out.push(',');
            if let Some(v) = r.lambda_per_level.get(&level) {
                out.push_str(&format_sig15(*v));
            }
        }
        let _ = writeln!(out, ",{}", r.deviated);
    }
    Ok(out)
}

/// Columns `x,quantum` followed by `value_<level>` for the requested levels.
pub fn table_csv(rows: &[TableRow], levels: &[Level]) -> Result<String, ExperimentError> {
    if rows.is_empty() {
        return Err(ExperimentError::EmptyInput);
    }
    let mut levels = levels.to_vec();
    levels.sort();
    levels.dedup();
    let mut out = String::from("x,quantum");
    for level in &levels {
        let _ = write!(out, ",value_{}", level.column_suffix());
    }
    out.push('\n');
    for row in rows {
        out.push_str(&format_sig15(row.x));
        out.push(',');
        if let Some(q) = row.quantum {
            out.push_str(&format_sig15(q));
        }
        for level in &levels {
            out.push(',');
            if let Some(v) = row.value_per_level.get(level) {
                out.push_str(&format_sig15(*v));
            }
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn emit_scatter_csv(records: &[ScatterRecord], path: &Path) -> Result<(), ExperimentError> {
    write_file(path, &scatter_csv(records)?)
}

pub fn emit_table_csv(rows: &[TableRow], levels: &[Level], path: &Path) -> Result<(), ExperimentError> {
    write_file(path, &table_csv(rows, levels)?)
}

/// Scatter of `λ` at `axes.1` (horizontal) against `λ` at `axes.0`
/// (vertical) with the diagonal drawn for reference. Deviated records are red.
pub fn svg_scatter(records: &[ScatterRecord], axes: (Level, Level)) -> Result<String, ExperimentError> {
    let (vertical, horizontal) = axes;
    let pts: Vec<(f64, f64, bool)> = records
        .iter()
        .filter_map(|r| {
            Some((
                *r.lambda_per_level.get(&horizontal)?,
                *r.lambda_per_level.get(&vertical)?,
                r.deviated,
            ))
        })
        .collect();
    if pts.is_empty() {
        return Err(ExperimentError::EmptyInput);
    }

    let (mut lo, mut hi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(x, y, _)| {
            (lo.min(x).min(y), hi.max(x).max(y))
        });
    let pad = ((hi - lo) * 0.05).max(1e-6);
    lo -= pad;
    hi += pad;

    const SIZE: f64 = 600.0;
    const MARGIN: f64 = 60.0;
    let span = SIZE - 2.0 * MARGIN;
    let sx = |v: f64| MARGIN + (v - lo) / (hi - lo) * span;
    let sy = |v: f64| SIZE - MARGIN - (v - lo) / (hi - lo) * span;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" width="{SIZE}" height="{SIZE}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{span}" height="{span}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#888" stroke-dasharray="4 3"/>"##,
        sx(lo),
        sy(lo),
        sx(hi),
        sy(hi)
    );
    for i in 0..=4 {
        let v = lo + (hi - lo) * i as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(v),
            SIZE - MARGIN + 18.0,
            tick_label(v)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            MARGIN - 6.0,
            sy(v) + 4.0,
            tick_label(v)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">λ at level {horizontal}</text>"#,
        SIZE / 2.0,
        SIZE - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">λ at level {vertical}</text>"#,
        SIZE / 2.0,
        SIZE / 2.0
    );
    for (x, y, deviated) in pts {
        let color = if deviated { "red" } else { "black" };
        let _ = writeln!(
            svg,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
            sx(x),
            sy(y)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn tick_label(v: f64) -> String {
    if v.abs() < 1e-3 && v != 0.0 {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}")
    }
}

pub fn emit_svg_scatter(
    records: &[ScatterRecord],
    axes: (Level, Level),
    path: &Path,
) -> Result<(), ExperimentError> {
    write_file(path, &svg_scatter(records, axes)?)
}
