//! CSV and SVG writers.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::runner::{KrausRow, TimeSeriesRecord};

pub const SERIES_HEADER: &str = "step,time,fidelity,concurrence";
pub const SWEEP_HEADER: &str = "T,m0,m1,m2,m3,m4,m5,m6_abs,m6_sign,residual";

const SIG_DIGITS: usize = 12;

/// Shortest rendering of `x` rounded to 12 significant digits, plain for
/// moderate exponents and scientific otherwise.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.into()
    }
}

fn to_csv<I>(header: &str, rows: I) -> String
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let header: Vec<&str> = header.split(',').collect();
    w.write_record(&header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn series_csv(records: &[TimeSeriesRecord]) -> String {
    to_csv(
        SERIES_HEADER,
        records.iter().map(|r| {
            vec![
                r.step.to_string(),
                format_sig(r.time),
                format_sig(r.fidelity),
                format_sig(r.concurrence),
            ]
        }),
    )
}

pub fn sweep_csv(rows: &[KrausRow]) -> String {
    to_csv(
        SWEEP_HEADER,
        rows.iter().map(|row| {
            let f = &row.fit;
            [
                row.period, f.m0, f.m1, f.m2, f.m3, f.m4, f.m5, f.m6_abs, f.m6_sign, f.residual,
            ]
            .iter()
            .map(|&x| format_sig(x))
            .collect()
        }),
    )
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn non_empty<T>(items: &[T]) -> Result<()> {
    if items.is_empty() {
        Err(Error::InvalidArgument("nothing to write".into()))
    } else {
        Ok(())
    }
}

pub fn emit_csv(records: &[TimeSeriesRecord], path: &Path) -> Result<()> {
    non_empty(records)?;
    write_file(path, &series_csv(records))
}

pub fn emit_sweep_csv(rows: &[KrausRow], path: &Path) -> Result<()> {
    non_empty(rows)?;
    write_file(path, &sweep_csv(rows))
}

pub fn emit_svg(records: &[TimeSeriesRecord], path: &Path) -> Result<()> {
    non_empty(records)?;
    let pts = |f: fn(&TimeSeriesRecord) -> f64| {
        records.iter().map(|r| (r.time, f(r))).collect::<Vec<_>>()
    };
    let chart = LineChart {
        x_label: "time",
        y_label: "value",
        series: vec![
            ("fidelity", pts(|r| r.fidelity)),
            ("concurrence", pts(|r| r.concurrence)),
        ],
    };
    write_file(path, &chart.render())
}

pub fn emit_sweep_svg(rows: &[KrausRow], path: &Path) -> Result<()> {
    non_empty(rows)?;
    let names = ["m0", "m1", "m2", "m3", "m4", "m5", "m6"];
    let series = names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            (
                *name,
                rows.iter()
                    .map(|r| (r.period, r.fit.weights()[k]))
                    .collect(),
            )
        })
        .collect();
    let chart = LineChart {
        x_label: "T",
        y_label: "weight",
        series,
    };
    write_file(path, &chart.render())
}

const COLORS: [&str; 7] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf",
];

struct LineChart<'a> {
    x_label: &'a str,
    y_label: &'a str,
    series: Vec<(&'a str, Vec<(f64, f64)>)>,
}

impl LineChart<'_> {
    fn render(&self) -> String {
        let (w, h) = (640.0, 420.0);
        let (left, right, top, bottom) = (60.0, 130.0, 20.0, 50.0);
        let all = self.series.iter().flat_map(|(_, p)| p.iter());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, 0.0f64, 1.0f64);
        for &(x, y) in all {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if x1 <= x0 {
            x1 = x0 + 1.0;
        }
        let pw = w - left - right;
        let ph = h - top - bottom;
        let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| top + (y1 - y) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        for k in 0..=4 {
            let fx = x0 + (x1 - x0) * k as f64 / 4.0;
            let fy = y0 + (y1 - y0) * k as f64 / 4.0;
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                sx(fx),
                top + ph + 16.0,
                tick(fx)
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
                left - 6.0,
                sy(fy) + 4.0,
                tick(fy)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            left + pw / 2.0,
            h - 12.0,
            self.x_label
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
            top + ph / 2.0,
            top + ph / 2.0,
            self.y_label
        );
        for (k, (name, pts)) in self.series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let path: Vec<String> = pts
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
            let ly = top + 14.0 + 18.0 * k as f64;
            let lx = left + pw + 12.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
                lx + 20.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}">{name}</text>"#,
                lx + 26.0,
                ly + 4.0
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick(x: f64) -> String {
    trim_zeros(format!("{x:.3}"))
}
