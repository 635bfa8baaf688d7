//! CSV tables and SVG charts. Floats are written with 17 significant
//! digits so every value reads back bit-for-bit.

use std::fmt::Write as _;
use std::path::Path;

use ves_core::{Plant, RteResult, ScheduleSpec, SimTrace, VesCoefficients};

use crate::error::CliError;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

const RESULT_COLUMNS: [&str; 10] = [
    "eta_rt",
    "t_c_s",
    "t_d_s",
    "t_recov_s",
    "recovery",
    "t_tilde_end_k",
    "energy_charged_j",
    "energy_discharged_j",
    "zero_energy",
    "comfort_violation",
];

fn result_fields(r: &RteResult) -> Vec<String> {
    vec![
        num(r.eta_rt),
        num(r.t_c),
        num(r.t_d),
        num(r.t_recov),
        r.recovery.as_str().to_string(),
        num(r.t_tilde_end),
        num(r.energy_charged),
        num(r.energy_discharged),
        r.zero_energy.to_string(),
        r.comfort_violation.to_string(),
    ]
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>, CliError> {
    csv::Writer::from_path(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn write_baseline(path: &Path, plant: &Plant, v: &VesCoefficients) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record([
        "t_b_k",
        "m_a_b_kg_s",
        "q_x_w",
        "p_hvac_b_w",
        "a",
        "b",
        "c",
        "d",
        "alpha",
        "beta",
        "gamma",
    ])?;
    let b = &plant.baseline;
    w.write_record(
        [
            b.t_b.kelvin(),
            b.m_a_b,
            b.q_x,
            b.p_hvac_b,
            v.a,
            v.b,
            v.c,
            v.d,
            v.alpha,
            v.beta,
            v.gamma,
        ]
        .map(num),
    )?;
    w.flush()?;
    Ok(())
}

pub fn write_rte(path: &Path, spec: &ScheduleSpec, r: &RteResult) -> Result<(), CliError> {
    let mut w = writer(path)?;
    let mut header = vec!["delta_p_w", "t_p_s", "n", "phase"];
    header.extend(RESULT_COLUMNS);
    w.write_record(&header)?;
    let phase = match spec.phase {
        ves_core::Phase::UpDown => "up-down",
        ves_core::Phase::DownUp => "down-up",
    };
    let mut row = vec![
        num(spec.delta_p),
        num(spec.half_period),
        spec.n_cycles.to_string(),
        phase.into(),
    ];
    row.extend(result_fields(r));
    w.write_record(&row)?;
    w.flush()?;
    Ok(())
}

pub fn write_trace(path: &Path, trace: &SimTrace) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record([
        "t_s",
        "t_zone_k",
        "t_wall_k",
        "w_zone",
        "m_a_kg_s",
        "p_hvac_w",
        "p_tilde_w",
        "soc",
    ])?;
    for s in &trace.samples {
        w.write_record([
            num(s.t),
            num(s.t_zone),
            opt(s.t_wall),
            opt(s.w_zone),
            num(s.m_a),
            num(s.p_hvac),
            num(s.p_tilde),
            num(s.soc),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_curve(
    path: &Path,
    x_column: &str,
    points: &[(f64, RteResult)],
) -> Result<(), CliError> {
    let mut w = writer(path)?;
    let mut header = vec![x_column];
    header.extend(RESULT_COLUMNS);
    w.write_record(&header)?;
    for (x, r) in points {
        let mut row = vec![num(*x)];
        row.extend(result_fields(r));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 450.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

/// Tick positions at 1, 2 or 5 times a power of ten.
fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn log_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (lo.log10().ceil() as i32, hi.log10().floor() as i32);
    let mut ticks: Vec<f64> = Vec::new();
    for e in (a - 1)..=b {
        for m in [1.0, 2.0, 5.0] {
            let v = m * 10f64.powi(e);
            if v >= lo * (1.0 - 1e-12) && v <= hi * (1.0 + 1e-12) {
                ticks.push(v);
            }
        }
    }
    ticks
}

fn label(v: f64) -> String {
    let s = format!("{:.6}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Line chart of `(x, eta)` with gridlines and a dashed reference at 1.
pub fn svg_chart(title: &str, x_label: &str, points: &[(f64, f64)], log_x: bool) -> String {
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let (mut x0, mut x1) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| {
            (a.min(*x), b.max(*x))
        });
    if x0 == x1 {
        let pad = if x0 == 0.0 { 1.0 } else { 0.05 * x0.abs() };
        x0 -= pad;
        x1 += pad;
    }
    let log_x = log_x && x0 > 0.0;
    let finite_y = points.iter().map(|p| p.1).filter(|y| y.is_finite());
    let (y_min, y_max) = finite_y.fold((1.0f64, 1.0f64), |(a, b), y| (a.min(y), b.max(y)));
    let span = (y_max - y_min).max(0.02);
    let (y0, y1) = (y_min - 0.05 * span, y_max + 0.05 * span);

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| {
        let f = if log_x {
            (x.ln() - x0.ln()) / (x1.ln() - x0.ln())
        } else {
            (x - x0) / (x1 - x0)
        };
        LEFT + f * plot_w
    };
    let sy = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{:.2}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let x_ticks = if log_x {
        log_ticks(x0, x1)
    } else {
        linear_ticks(x0, x1)
    };
    for t in x_ticks {
        let x = sx(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/>
<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP + plot_h,
            TOP + plot_h + 18.0,
            label(t)
        );
    }
    for t in linear_ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>
<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0,
            label(t)
        );
    }
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>
<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#c0392b" stroke-dasharray="6,4"/>
<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>
<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">eta_rt</text>"##,
        LEFT + plot_w,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        escape(x_label),
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        y = sy(1.0),
    );
    let coords: Vec<String> = points
        .iter()
        .filter(|p| p.1.is_finite())
        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    let _ = writeln!(
        s,
        r##"<polyline points="{}" fill="none" stroke="#1f4e9c" stroke-width="2"/>
</svg>"##,
        coords.join(" ")
    );
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2233.1368539, -4.2e-300, 6.02e23] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn ticks_are_round_numbers() {
        assert_eq!(
            linear_ticks(0.0, 12.0),
            vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0]
        );
        assert_eq!(log_ticks(60.0, 1000.0), vec![100.0, 200.0, 500.0, 1000.0]);
        assert_eq!(label(0.30000000000000004), "0.3");
    }

    #[test]
    fn chart_has_axes_reference_and_curve() {
        let pts = [(60.0, 0.9), (600.0, 0.98), (6000.0, 1.02)];
        let svg = svg_chart("eta vs t_p", "t_p_s", &pts, true);
        assert!(svg.starts_with("<?xml"));
        assert!(svg.contains("stroke-dasharray"));
        assert!(svg.contains(">eta_rt</text>"));
        assert!(svg.contains(">t_p_s</text>"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg, svg_chart("eta vs t_p", "t_p_s", &pts, true));
    }

    #[test]
    fn degenerate_charts_render() {
        let one = svg_chart("single", "n", &[(5.0, 1.0)], false);
        assert!(!one.contains("NaN"));
        let flat = svg_chart("flat", "r_oa", &[(0.0, 1.0), (1.0, 1.0)], false);
        assert!(!flat.contains("NaN") && !flat.contains("inf"));
    }
}
