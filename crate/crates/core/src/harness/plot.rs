//! Scatter-plot artifacts: a per-point CSV and a static SVG.
//!
//! Points are coloured by assigned cluster. Samples with at least one hidden element get a
//! black ring, and centroids are drawn as black dots (`class="centroid"`).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{ClusterError, Result};
use crate::model::{Dataset, ObservationMask};

const PALETTE: [&str; 8] = [
    "#2ca02c", "#1f77b4", "#ff7f0e", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const SIZE: f64 = 600.0;
const MARGIN: f64 = 30.0;

fn require_2d(data: &Dataset<f64>) -> Result<()> {
    if data.d() != 2 {
        return Err(ClusterError::Unsupported(format!(
            "scatter plots need 2-D data, got d = {}",
            data.d()
        )));
    }
    Ok(())
}

fn check_inputs(data: &Dataset<f64>, assignment: &[usize], mask: &ObservationMask) -> Result<()> {
    require_2d(data)?;
    if assignment.len() != data.m() {
        return Err(ClusterError::dim("plot assignment", data.m(), assignment.len()));
    }
    mask.check_matches(data)
}

/// CSV with columns `x,y,assigned_cluster,any_missing_flag`.
pub fn points_csv(data: &Dataset<f64>, assignment: &[usize], mask: &ObservationMask) -> Result<String> {
    check_inputs(data, assignment, mask)?;
    let mut out = String::from("x,y,assigned_cluster,any_missing_flag\n");
    for (i, row) in data.points().outer_iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            row[0],
            row[1],
            assignment[i],
            u8::from(mask.has_missing(i))
        );
    }
    Ok(out)
}

pub fn render_svg(
    data: &Dataset<f64>,
    assignment: &[usize],
    centroids: &[Vec<f64>],
    mask: &ObservationMask,
    title: &str,
) -> Result<String> {
    check_inputs(data, assignment, mask)?;
    if centroids.iter().any(|c| c.len() != 2) {
        return Err(ClusterError::Unsupported("centroids must be 2-D".into()));
    }
    let xs = data.points().column(0).to_vec();
    let ys = data.points().column(1).to_vec();
    let all_x = xs.iter().chain(centroids.iter().map(|c| &c[0]));
    let all_y = ys.iter().chain(centroids.iter().map(|c| &c[1]));
    let (x_min, x_max) = bounds(all_x);
    let (y_min, y_max) = bounds(all_y);
    let span = (x_max - x_min).max(y_max - y_min).max(1e-12);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let px = |x: f64| MARGIN + (x - x_min) * scale;
    // SVG y grows downward
    let py = |y: f64| SIZE - MARGIN - (y - y_min) * scale;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="18" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        escape(title)
    );
    for i in 0..data.m() {
        let color = PALETTE[assignment[i] % PALETTE.len()];
        let _ = writeln!(
            svg,
            r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
            px(xs[i]),
            py(ys[i])
        );
        if mask.has_missing(i) {
            let _ = writeln!(
                svg,
                r#"<circle class="missing" cx="{:.2}" cy="{:.2}" r="5" fill="none" stroke="black" stroke-width="1"/>"#,
                px(xs[i]),
                py(ys[i])
            );
        }
    }
    for c in centroids {
        let _ = writeln!(
            svg,
            r#"<circle class="centroid" cx="{:.2}" cy="{:.2}" r="6" fill="black"/>"#,
            px(c[0]),
            py(c[1])
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn bounds<'a>(values: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `<stem>.points.csv` and `<stem>.svg` next to each other.
pub fn write_plot_files(
    stem: &Path,
    data: &Dataset<f64>,
    assignment: &[usize],
    centroids: &[Vec<f64>],
    mask: &ObservationMask,
    title: &str,
) -> Result<()> {
    let csv = points_csv(data, assignment, mask)?;
    let svg = render_svg(data, assignment, centroids, mask, title)?;
    let with_ext = |ext: &str| {
        let mut p = stem.as_os_str().to_owned();
        p.push(ext);
        std::path::PathBuf::from(p)
    };
    for (path, text) in [(with_ext(".points.csv"), csv), (with_ext(".svg"), svg)] {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(|source| ClusterError::Io {
                path: parent.display().to_string(),
                source,
            })?;
        }
        std::fs::write(&path, text).map_err(|source| ClusterError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(())
}
