use std::fmt::Write as _;

use dmax_core::norm_lab::fit_proportional;

use crate::CliError;

pub const GROWTH_HEADER: [&str; 11] = [
    "operator",
    "N",
    "L",
    "seed",
    "estimate",
    "logN",
    "sqrtlogN",
    "fit_c_log",
    "fit_c_sqrt",
    "resid_log",
    "resid_sqrt",
];
pub const LOWER_BOUND_HEADER: [&str; 7] = [
    "N",
    "r0",
    "c0",
    "f_norm",
    "Tf_norm",
    "ratio",
    "pointwise_violations",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Log,
    SqrtLog,
}

impl Model {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "log" => Ok(Self::Log),
            "sqrtlog" => Ok(Self::SqrtLog),
            _ => Err(CliError::Usage(format!("unknown model {s}"))),
        }
    }

    fn eval(self, n: f64) -> f64 {
        match self {
            Self::Log => n.ln(),
            Self::SqrtLog => n.ln().max(0.0).sqrt(),
        }
    }

    fn label(self) -> &'static str {
        match self {
            Self::Log => "c·log N",
            Self::SqrtLog => "c·√log N",
        }
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 52.0;

/// `(N, value)` pairs of a growth (`estimate`) or lower-bound (`ratio`) CSV,
/// with the column name used for the y axis.
pub fn read_points(csv_text: &str) -> Result<(Vec<(f64, f64)>, &'static str), CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(csv_text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Usage(format!("unreadable CSV: {e}")))?
        .iter()
        .map(str::to_owned)
        .collect();
    let (value_column, label) = if header == GROWTH_HEADER {
        (4, "estimate")
    } else if header == LOWER_BOUND_HEADER {
        (5, "ratio")
    } else {
        return Err(CliError::Usage(format!(
            "unknown CSV schema: {}",
            header.join(",")
        )));
    };
    let n_column = header
        .iter()
        .position(|h| h == "N")
        .expect("both schemas have N");
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Usage(format!("malformed row: {e}")))?;
        let parse = |k: usize| {
            record
                .get(k)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| CliError::Usage(format!("bad numeric field in row {record:?}")))
        };
        points.push((parse(n_column)?, parse(value_column)?));
    }
    Ok((points, label))
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Scatter of the values against `N` on a log-x axis with the fitted
/// proportional model overlaid. Pure function of its inputs.
pub fn render_svg(csv_text: &str, model: Model) -> Result<String, CliError> {
    let (points, label) = read_points(csv_text)?;
    let x: Vec<f64> = points.iter().map(|p| model.eval(p.0)).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let fit = (!points.is_empty()).then(|| fit_proportional(&x, &y));

    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |a, p| {
            (a.0.min(p.0.log2()), a.1.max(p.0.log2()))
        });
    let (x_lo, x_hi) = if points.is_empty() {
        (0.0, 8.0)
    } else {
        (lo.floor().min(hi - 1.0), hi.ceil().max(lo + 1.0))
    };
    let curve_top = fit
        .as_ref()
        .map_or(0.0, |f| f.c * model.eval(2f64.powf(x_hi)));
    let y_hi = y.iter().copied().fold(curve_top, f64::max).max(1.0) * 1.1;

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |log2n: f64| LEFT + (log2n - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |v: f64| TOP + plot_h - v / y_hi * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<g class="axes" stroke="black" stroke-width="1"><line x1="{LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.2}"/></g>"#,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h,
        TOP + plot_h
    );
    s.push_str(r#"<g class="ticks" font-family="sans-serif" font-size="11" text-anchor="middle">"#);
    s.push('\n');
    let mut k = x_lo as i64;
    while k as f64 <= x_hi {
        let px = sx(k as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}">{}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 4.0,
            TOP + plot_h + 18.0,
            2f64.powi(k as i32)
        );
        k += 1;
    }
    for j in 0..=4 {
        let v = y_hi * j as f64 / 4.0;
        let py = sy(v);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.2}</text>"#,
            LEFT - 4.0,
            LEFT - 6.0,
            py + 4.0
        );
    }
    s.push_str("</g>\n");
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">N (log scale)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.2})">{label}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    if let Some(fit) = &fit {
        let steps = 64;
        let path: Vec<String> = (0..=steps)
            .map(|j| {
                let l = x_lo + (x_hi - x_lo) * j as f64 / steps as f64;
                format!("{:.2},{:.2}", sx(l), sy(fit.c * model.eval(2f64.powf(l))))
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline class="fit" fill="none" stroke="#c0392b" stroke-width="1.5" points="{}"/>"##,
            path.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{} with c = {:.4}</text>"#,
            LEFT + 8.0,
            TOP - 12.0,
            escape(model.label()),
            fit.c
        );
    }
    s.push_str(r##"<g class="points" fill="#2c3e50">"##);
    s.push('\n');
    for (n, v) in &points {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3"/>"#,
            sx(n.log2()),
            sy(*v)
        );
    }
    s.push_str("</g>\n</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn growth_csv(rows: &[(usize, f64)]) -> String {
        let mut s = format!("# dmax test\n{}\n", GROWTH_HEADER.join(","));
        for (n, e) in rows {
            let l = (*n as f64).ln();
            s.push_str(&format!("kakeya0,{n},10,1,{e},{l},{},1,1,0,0\n", l.sqrt()));
        }
        s
    }

    #[test]
    fn empty_rows_give_axes_only() {
        let svg = render_svg(&growth_csv(&[]), Model::Log).unwrap();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains(r#"class="axes""#));
        assert_eq!(svg.matches("<circle").count(), 0);
        assert!(!svg.contains("polyline"));
    }

    #[test]
    fn one_point_per_row_and_deterministic() {
        let rows: Vec<(usize, f64)> = (2..=8)
            .map(|k| (1usize << k, 1.3 * ((1u64 << k) as f64).ln().sqrt()))
            .collect();
        let csv = growth_csv(&rows);
        let a = render_svg(&csv, Model::SqrtLog).unwrap();
        let b = render_svg(&csv, Model::SqrtLog).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.matches("<circle").count(), 7);
        assert!(a.contains("c = 1.3000"));
    }

    #[test]
    fn lower_bound_schema_is_accepted() {
        let csv = format!(
            "{}\n64,1,4,2,8,4,0\n128,1,4,2,9,4.5,0\n",
            LOWER_BOUND_HEADER.join(",")
        );
        let svg = render_svg(&csv, Model::Log).unwrap();
        assert_eq!(svg.matches("<circle").count(), 2);
    }

    #[test]
    fn schema_mismatch_is_a_usage_error() {
        let err = render_svg("a,b\n1,2\n", Model::Log).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
