//! Grouped bar chart of correlation estimates with confidence whiskers,
//! rendered as standalone SVG text.

use std::fmt::Write;

use crate::epidemic::ProcessKind;
use crate::experiment::{ExperimentError, ExperimentReport, Metric};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 48.0;
const PALETTE: [&str; 6] = ["#1b6ca8", "#d1495b", "#edae49", "#66a182", "#8d6a9f", "#555555"];

fn label(metric: Metric) -> &'static str {
    match metric {
        Metric::Degree => "degree",
        Metric::Exf => "ExF",
        Metric::Exfm => "ExF^M",
        Metric::Kshell => "ks",
        Metric::Evc => "evc",
    }
}

/// One group per process and one bar per metric, bar height `r`, whiskers
/// spanning the confidence interval. Cells without an estimate are left
/// out. Output is a pure function of the report.
pub fn render_figure(report: &ExperimentReport) -> Result<String, ExperimentError> {
    let processes: Vec<ProcessKind> = ProcessKind::ALL
        .into_iter()
        .filter(|&p| report.correlations.iter().any(|c| c.process == p))
        .collect();
    let metrics = &report.config.metrics;
    if processes.is_empty() || metrics.is_empty() {
        return Err(ExperimentError::EmptyReport);
    }

    let min_lower = report
        .correlations
        .iter()
        .filter_map(|c| c.estimate.map(|e| e.lower))
        .fold(0.0_f64, f64::min);
    let y_min = (min_lower * 4.0).floor() / 4.0;
    let y_max = 1.0;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let plot_w = WIDTH - LEFT - RIGHT;
    let y = |v: f64| TOP + (y_max - v.clamp(y_min, y_max)) / (y_max - y_min) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">Correlation with spreading outcome ({:.0}% CI)</text>"#,
        LEFT + plot_w / 2.0,
        report.config.level * 100.0
    );

    // y axis with ticks every 0.25
    let _ = writeln!(s, r#"<g class="axis">"#);
    let mut tick = y_min;
    while tick <= y_max + 1e-9 {
        let ty = y(tick);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT:.2}" y1="{ty:.2}" x2="{:.2}" y2="{ty:.2}" stroke="#e0e0e0"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{tick:.2}</text>"#,
            LEFT - 6.0,
            ty + 4.0
        );
        tick += 0.25;
    }
    let zero = y(0.0);
    let _ = writeln!(
        s,
        r##"<line x1="{LEFT:.2}" y1="{zero:.2}" x2="{:.2}" y2="{zero:.2}" stroke="#000"/>"##,
        LEFT + plot_w
    );
    let _ = writeln!(
        s,
        r##"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{:.2}" stroke="#000"/>"##,
        TOP + plot_h
    );
    let _ = writeln!(s, "</g>");

    let group_w = plot_w / processes.len() as f64;
    let bar_w = group_w * 0.7 / metrics.len() as f64;
    for (gi, &process) in processes.iter().enumerate() {
        let gx = LEFT + gi as f64 * group_w + group_w * 0.15;
        let _ = writeln!(s, r#"<g class="group" data-process="{process}">"#);
        for (mi, &metric) in metrics.iter().enumerate() {
            let Some(est) = report.cell(process, metric).and_then(|c| c.estimate) else {
                continue;
            };
            let color = PALETTE[mi % PALETTE.len()];
            let x = gx + mi as f64 * bar_w;
            let (top, bottom) = if est.r >= 0.0 {
                (y(est.r), zero)
            } else {
                (zero, y(est.r))
            };
            let _ = writeln!(
                s,
                r#"<rect class="bar" data-metric="{metric}" x="{x:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{color}"><title>{process} {}: r = {:.3} [{:.3}, {:.3}], n = {}</title></rect>"#,
                bar_w * 0.9,
                bottom - top,
                label(metric),
                est.r,
                est.lower,
                est.upper,
                est.n
            );
            let cx = x + bar_w * 0.45;
            let (lo, hi) = (y(est.lower), y(est.upper));
            let cap = bar_w * 0.2;
            let _ = writeln!(
                s,
                r##"<g class="whisker" stroke="#222"><line x1="{cx:.2}" y1="{hi:.2}" x2="{cx:.2}" y2="{lo:.2}"/><line x1="{:.2}" y1="{hi:.2}" x2="{:.2}" y2="{hi:.2}"/><line x1="{:.2}" y1="{lo:.2}" x2="{:.2}" y2="{lo:.2}"/></g>"##,
                cx - cap,
                cx + cap,
                cx - cap,
                cx + cap
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + gi as f64 * group_w + group_w / 2.0,
            TOP + plot_h + 20.0,
            process.as_str().to_uppercase()
        );
        let _ = writeln!(s, "</g>");
    }

    let lx = WIDTH - RIGHT + 20.0;
    let _ = writeln!(s, r#"<g class="legend">"#);
    for (mi, &metric) in metrics.iter().enumerate() {
        let ly = TOP + 10.0 + mi as f64 * 20.0;
        let _ = writeln!(
            s,
            r#"<rect x="{lx:.2}" y="{ly:.2}" width="12" height="12" fill="{}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            PALETTE[mi % PALETTE.len()],
            lx + 18.0,
            ly + 10.0,
            label(metric)
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::fisher_interval;
    use crate::experiment::{CorrelationCell, ExperimentConfig};

    fn report(rs: &[(ProcessKind, Metric, f64)]) -> ExperimentReport {
        let mut cfg = ExperimentConfig::new(0.1, 0.5);
        cfg.metrics = vec![Metric::Exfm, Metric::Kshell, Metric::Evc];
        ExperimentReport {
            config: cfg,
            nodes: 0,
            edges: 0,
            lcc_size: 0,
            seeds: vec![],
            metrics: vec![],
            processes: vec![],
            correlations: rs
                .iter()
                .map(|&(process, metric, r)| CorrelationCell {
                    process,
                    metric,
                    estimate: Some(fisher_interval(r, 100, 0.95)),
                    n: 100,
                    note: None,
                })
                .collect(),
        }
    }

    fn full(r: f64) -> ExperimentReport {
        let mut cells = vec![];
        for p in ProcessKind::ALL {
            for m in [Metric::Exfm, Metric::Kshell, Metric::Evc] {
                cells.push((p, m, r));
            }
        }
        report(&cells)
    }

    #[test]
    fn nine_bars_nine_whiskers() {
        let svg = render_figure(&full(0.6)).unwrap();
        assert_eq!(svg.matches(r#"class="bar""#).count(), 9);
        assert_eq!(svg.matches(r#"class="whisker""#).count(), 9);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn zero_correlation_bars_have_zero_height() {
        let svg = render_figure(&full(0.0)).unwrap();
        assert_eq!(svg.matches(r#"height="0.00""#).count(), 9);
    }

    #[test]
    fn deterministic() {
        let r = report(&[(ProcessKind::Sis, Metric::Exfm, -0.3), (ProcessKind::Sis, Metric::Evc, 0.8)]);
        assert_eq!(render_figure(&r).unwrap(), render_figure(&r).unwrap());
    }

    #[test]
    fn empty_report_is_an_error() {
        assert!(matches!(render_figure(&report(&[])), Err(ExperimentError::EmptyReport)));
    }
}
