//! Deterministic SVG line plots of risk-curve or two-column CSV files.

use std::fmt::Write as _;
use std::path::Path;

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 520.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const RISK_HEADER: [&str; 5] = ["kind", "param", "bias_sq", "variance", "risk"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Axes {
    pub logx: bool,
    pub logy: bool,
}

fn parse(path: &Path, row: usize, field: &str) -> Result<f64, String> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| format!("{}: row {row}: bad number {field:?}", path.display()))
}

/// Reads one series. Risk-schema files plot `param` against `column`
/// (default `risk`); any other file must have exactly two columns.
pub fn load_series(path: &Path, column: Option<&str>) -> Result<(String, String, Series), String> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| format!("{}: {e}", path.display()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let (xi, yi, label) = if headers == RISK_HEADER {
        let col = column.unwrap_or("risk");
        let yi = RISK_HEADER[2..]
            .iter()
            .position(|h| *h == col)
            .map(|i| i + 2)
            .ok_or_else(|| format!("unknown column {col:?}; expected bias_sq, variance or risk"))?;
        let label = if col == "risk" { stem } else { format!("{stem} {col}") };
        (1, yi, label)
    } else if headers.len() == 2 && headers.iter().all(|h| !h.is_empty()) {
        if column.is_some() {
            return Err(format!("{}: --column applies only to risk curves", path.display()));
        }
        (0, 1, stem)
    } else {
        return Err(format!(
            "{}: expected header {} or two columns, got {}",
            path.display(),
            RISK_HEADER.join(","),
            headers.join(",")
        ));
    };
    let mut points = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| format!("{}: {e}", path.display()))?;
        if rec.len() != headers.len() {
            return Err(format!("{}: row {} has {} fields", path.display(), i + 1, rec.len()));
        }
        points.push((parse(path, i + 1, &rec[xi])?, parse(path, i + 1, &rec[yi])?));
    }
    if points.is_empty() {
        return Err(format!("{}: no data rows", path.display()));
    }
    Ok((headers[xi].clone(), headers[yi].clone(), Series { label, points }))
}

pub fn load(paths: &[impl AsRef<Path>], column: Option<&str>) -> Result<PlotData, String> {
    if paths.is_empty() {
        return Err("no input files".into());
    }
    let mut data = PlotData {
        x_label: String::new(),
        y_label: String::new(),
        series: Vec::new(),
    };
    for p in paths {
        let (x, y, s) = load_series(p.as_ref(), column)?;
        if data.series.is_empty() {
            data.x_label = x;
            data.y_label = y;
        }
        data.series.push(s);
    }
    Ok(data)
}

fn transform(v: f64, log: bool) -> Option<f64> {
    match (log, v.is_finite()) {
        (_, false) => None,
        (true, _) if v <= 0.0 => None,
        (true, _) => Some(v.log10()),
        (false, _) => Some(v),
    }
}

fn range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if lo > hi {
        return None;
    }
    if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        Some((lo - 0.5, hi + 0.5))
    } else {
        Some((lo, hi))
    }
}

/// Tick positions in transformed coordinates with their labels.
fn ticks(lo: f64, hi: f64, log: bool) -> Vec<(f64, String)> {
    if log {
        let (a, b) = (lo.ceil() as i64, hi.floor() as i64);
        let stride = ((b - a) / 8 + 1).max(1);
        return (a..=b)
            .filter(|k| (k - a) % stride == 0)
            .map(|k| (k as f64, format!("1e{k}")))
            .collect();
    }
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last)
        .map(|k| {
            let v = k as f64 * step;
            let s = format!("{v:.decimals$}");
            (
                v,
                if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
                    "0".into()
                } else {
                    s
                },
            )
        })
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render_svg(data: &PlotData, axes: Axes) -> Result<String, String> {
    let series: Vec<(&str, Vec<(f64, f64)>)> = data
        .series
        .iter()
        .map(|s| {
            let pts = s
                .points
                .iter()
                .filter_map(|&(x, y)| Some((transform(x, axes.logx)?, transform(y, axes.logy)?)))
                .collect();
            (s.label.as_str(), pts)
        })
        .collect();
    let all = || series.iter().flat_map(|(_, p)| p.iter().copied());
    let (x0, x1) = range(all().map(|p| p.0)).ok_or("no plottable points")?;
    let (y0, y1) = range(all().map(|p| p.1)).ok_or("no plottable points")?;
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        w,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        w,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for (v, label) in ticks(x0, x1, axes.logx) {
        let x = sx(v);
        let _ = writeln!(
            w,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd" stroke-width="0.5"/>"##,
            TOP + ph
        );
        let _ = writeln!(
            w,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 16.0,
            escape(&label)
        );
    }
    for (v, label) in ticks(y0, y1, axes.logy) {
        let y = sy(v);
        let _ = writeln!(
            w,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd" stroke-width="0.5"/>"##,
            LEFT + pw
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            escape(&label)
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 18.0,
        escape(&data.x_label)
    );
    let _ = writeln!(
        w,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&data.y_label)
    );
    for (i, (label, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            w,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            w,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(label)
        );
    }
    let _ = writeln!(w, "</svg>");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_ticks_are_round() {
        let t = ticks(0.0, 1.0, false);
        let labels: Vec<&str> = t.iter().map(|(_, s)| s.as_str()).collect();
        assert_eq!(labels, ["0", "0.2", "0.4", "0.6", "0.8", "1.0"]);
        let t = ticks(-2.0, 3.0, true);
        assert_eq!(t.first().unwrap().1, "1e-2");
        assert_eq!(t.len(), 6);
    }

    #[test]
    fn log_axes_drop_nonpositive_points() {
        let data = PlotData {
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![Series {
                label: "a<b".into(),
                points: vec![(0.0, 1.0), (1.0, 2.0), (10.0, 3.0)],
            }],
        };
        let svg = render_svg(
            &data,
            Axes {
                logx: true,
                logy: false,
            },
        )
        .unwrap();
        assert!(svg.contains("a&lt;b"));
        let poly = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        assert_eq!(poly.matches(',').count(), 2);
        let bad = PlotData {
            series: vec![Series {
                label: "z".into(),
                points: vec![(0.0, 1.0)],
            }],
            ..data
        };
        assert!(render_svg(
            &bad,
            Axes {
                logx: true,
                logy: false
            }
        )
        .is_err());
    }
}
