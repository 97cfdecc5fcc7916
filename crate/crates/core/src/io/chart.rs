//! Grouped bar chart of a report as a standalone SVG document.

use std::fmt::Write as _;
use std::path::Path;

use super::write_atomic;
use crate::error::Result;
use crate::pipeline::ScoreReport;
use crate::pose::Axis;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const BAR_WIDTH: f64 = 28.0;

fn color(axis: Axis) -> &'static str {
    match axis {
        Axis::X => "#4c72b0",
        Axis::Y => "#dd8452",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Plot-area height in pixels and the score mapped to its top edge.
fn scale(report: &ScoreReport) -> (f64, f64) {
    let max = report.rows.iter().map(|r| r.score).fold(1.0f64, f64::max);
    (HEIGHT - TOP - BOTTOM, max * 1.1)
}

/// One cluster per group with an x and a y bar, plus a dashed line at score 1.
pub fn bar_chart_svg(report: &ScoreReport) -> String {
    let (plot_h, y_max) = scale(report);
    let base_y = HEIGHT - BOTTOM;
    let to_px = |score: f64| score / y_max * plot_h;

    let mut groups: Vec<&str> = Vec::new();
    for row in &report.rows {
        if !groups.contains(&row.group.as_str()) {
            groups.push(&row.group);
        }
    }
    let cluster_w = (WIDTH - LEFT - RIGHT) / groups.len().max(1) as f64;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"  <text x="{}" y="24" text-anchor="middle" font-size="14">{} vs {}</text>"#,
        WIDTH / 2.0,
        escape(&report.test_id),
        escape(&report.gold_id)
    );
    let _ = writeln!(
        svg,
        r#"  <line class="axis" x1="{LEFT}" y1="{base_y}" x2="{}" y2="{base_y}" stroke="black"/>"#,
        WIDTH - RIGHT
    );
    let _ = writeln!(
        svg,
        r#"  <line class="axis" x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{base_y}" stroke="black"/>"#
    );

    let ticks = 5;
    for k in 0..=ticks {
        let v = y_max * k as f64 / ticks as f64;
        let y = base_y - to_px(v);
        let _ = writeln!(
            svg,
            r#"  <text x="{}" y="{y:.2}" text-anchor="end" dominant-baseline="middle">{v:.2}</text>"#,
            LEFT - 6.0
        );
    }

    for (c, group) in groups.iter().enumerate() {
        let center = LEFT + cluster_w * (c as f64 + 0.5);
        for (k, axis) in Axis::BOTH.into_iter().enumerate() {
            let Some(row) = report.rows.iter().find(|r| r.group == *group && r.axis == axis) else {
                continue;
            };
            let h = to_px(row.score);
            let x = center - BAR_WIDTH + k as f64 * BAR_WIDTH;
            let _ = writeln!(
                svg,
                r#"  <rect class="bar" data-group="{}" data-axis="{axis}" data-score="{}" x="{x:.2}" y="{:.4}" width="{BAR_WIDTH}" height="{h:.4}" fill="{}"/>"#,
                escape(group),
                row.score,
                base_y - h,
                color(axis)
            );
        }
        let _ = writeln!(
            svg,
            r#"  <text x="{center:.2}" y="{}" text-anchor="middle">{}</text>"#,
            base_y + 18.0,
            escape(group)
        );
    }

    let ref_y = base_y - to_px(1.0);
    let _ = writeln!(
        svg,
        r##"  <line class="reference" data-score="1" x1="{LEFT}" y1="{ref_y:.4}" x2="{}" y2="{ref_y:.4}" stroke="#c44e52" stroke-dasharray="6 4"/>"##,
        WIDTH - RIGHT
    );

    let legend_y = HEIGHT - 20.0;
    for (k, axis) in Axis::BOTH.into_iter().enumerate() {
        let x = LEFT + k as f64 * 80.0;
        let _ = writeln!(
            svg,
            r#"  <rect x="{x}" y="{}" width="12" height="12" fill="{}"/><text x="{}" y="{legend_y}">{axis}-axis</text>"#,
            legend_y - 10.0,
            color(axis),
            x + 16.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn render_bar_chart(report: &ScoreReport, path: &Path) -> Result<()> {
    write_atomic(path, bar_chart_svg(report).as_bytes())
}
