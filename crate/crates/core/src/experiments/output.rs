//! CSV and SVG output.

use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{data_err, Error, Result};
use crate::mab::AggregateCurve;

/// Header of the regret-curve CSV.
pub const CSV_HEADER: [&str; 5] = ["round", "policy", "mean_regret", "stderr", "n_seeds"];

/// One policy's aggregated regret curve.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedCurve {
    pub policy: String,
    pub curve: AggregateCurve,
}

impl NamedCurve {
    pub fn new(policy: impl Into<String>, curve: AggregateCurve) -> Self {
        Self { policy: policy.into(), curve }
    }
}

/// Formats a float with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

/// Writes curves round by round; within a round, policies keep their order.
pub fn write_csv_to<W: Write>(curves: &[NamedCurve], out: W) -> Result<()> {
    let len = curves.first().map_or(0, |c| c.curve.len());
    if let Some(c) = curves.iter().find(|c| c.curve.len() != len || c.curve.stderr.len() != len) {
        return data_err(format!("curve `{}` has a different length", c.policy));
    }
    let mut w = csv_writer(out);
    w.write_record(CSV_HEADER)?;
    for round in 0..len {
        let r = (round + 1).to_string();
        for c in curves {
            let mean = format_f64(c.curve.mean[round]);
            let se = format_f64(c.curve.stderr[round]);
            let n = c.curve.n_seeds.to_string();
            w.write_record([r.as_str(), &c.policy, &mean, &se, &n])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(curves: &[NamedCurve], path: &Path) -> Result<()> {
    write_csv_to(curves, fs::File::create(path)?)
}

/// Reads a file written by [`write_csv`]. Policies come back in order of
/// first appearance.
pub fn read_csv_from<R: Read>(input: R) -> Result<Vec<NamedCurve>> {
    let mut r = csv::ReaderBuilder::new().from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return data_err(format!("unexpected CSV header {header:?}"));
    }
    let mut curves: Vec<NamedCurve> = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| Error::Data(format!("row {}: bad {what}", line + 2));
        let round: usize = rec[0].parse().map_err(|_| bad("round"))?;
        let policy = &rec[1];
        let mean: f64 = rec[2].parse().map_err(|_| bad("mean_regret"))?;
        let se: f64 = rec[3].parse().map_err(|_| bad("stderr"))?;
        let n: usize = rec[4].parse().map_err(|_| bad("n_seeds"))?;
        let idx = match curves.iter().position(|c| c.policy == policy) {
            Some(i) => i,
            None => {
                curves.push(NamedCurve::new(policy, AggregateCurve { mean: vec![], stderr: vec![], n_seeds: n }));
                curves.len() - 1
            }
        };
        let c = &mut curves[idx].curve;
        if round != c.mean.len() + 1 {
            return Err(bad("round sequence"));
        }
        if c.n_seeds != n {
            return Err(bad("n_seeds"));
        }
        c.mean.push(mean);
        c.stderr.push(se);
    }
    Ok(curves)
}

pub fn read_csv(path: &Path) -> Result<Vec<NamedCurve>> {
    read_csv_from(fs::File::open(path)?)
}

/// Writes any serialisable rows with a header taken from the field names.
pub fn write_table<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// One line of a plot with an optional symmetric error band.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub err: Vec<f64>,
}

/// A line plot with shaded bands.
#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

/// Longest polyline drawn; longer curves are thinned evenly.
pub const MAX_POINTS: usize = 1000;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

impl Plot {
    /// Regret curves against the round index.
    pub fn regret(title: impl Into<String>, curves: &[NamedCurve]) -> Self {
        let series = curves
            .iter()
            .map(|c| Series {
                label: c.policy.clone(),
                x: (1..=c.curve.len()).map(|r| r as f64).collect(),
                y: c.curve.mean.clone(),
                err: c.curve.stderr.clone(),
            })
            .collect();
        Self { title: title.into(), x_label: "round".into(), y_label: "regret".into(), series }
    }

    pub fn render(&self) -> Result<String> {
        if self.series.is_empty() || self.series.iter().any(|s| s.x.is_empty()) {
            return data_err("cannot plot empty curves");
        }
        if let Some(s) = self.series.iter().find(|s| s.y.len() != s.x.len() || s.err.len() != s.x.len()) {
            return data_err(format!("series `{}` has mismatched lengths", s.label));
        }
        let finite = |v: f64| if v.is_finite() { Some(v) } else { None };
        let xs = self.series.iter().flat_map(|s| s.x.iter().copied()).filter_map(finite);
        let (x_min, x_max) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        let lows = self.series.iter().flat_map(|s| s.y.iter().zip(&s.err).map(|(y, e)| y - e));
        let highs = self.series.iter().flat_map(|s| s.y.iter().zip(&s.err).map(|(y, e)| y + e));
        let y_min = lows.filter_map(finite).fold(0.0, f64::min);
        let y_max = highs.filter_map(finite).fold(0.0, f64::max);
        let (x_min, x_max) = widen(x_min, x_max);
        let (y_min, y_max) = widen(y_min, y_max);

        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * pw;
        let sy = |y: f64| TOP + ph - (y - y_min) / (y_max - y_min) * ph;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + pw / 2.0,
            escape(&self.title)
        );

        for i in 0..=4 {
            let fx = x_min + (x_max - x_min) * i as f64 / 4.0;
            let fy = y_min + (y_max - y_min) * i as f64 / 4.0;
            let (px, py) = (sx(fx), sy(fy));
            let _ = writeln!(
                svg,
                r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#000"/>"##,
                TOP + ph,
                TOP + ph + 5.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                TOP + ph + 19.0,
                tick(fx)
            );
            let _ = writeln!(
                svg,
                r##"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}" stroke="#000"/>"##,
                LEFT - 5.0
            );
            let _ =
                writeln!(svg, r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/>"##, LEFT + pw);
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 8.0,
                py + 4.0,
                tick(fy)
            );
        }
        let _ = writeln!(svg, r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>"##);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="20" y="{0:.2}" text-anchor="middle" transform="rotate(-90 20 {0:.2})">{1}</text>"#,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );

        for (k, s) in self.series.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let idx = thin(s.x.len());
            let upper = idx.iter().map(|&i| point(sx(s.x[i]), sy(s.y[i] + s.err[i])));
            let lower = idx.iter().rev().map(|&i| point(sx(s.x[i]), sy(s.y[i] - s.err[i])));
            let band: Vec<String> = upper.chain(lower).collect();
            let _ = writeln!(
                svg,
                r#"<polygon class="band" points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
                band.join(" ")
            );
            let line: Vec<String> = idx.iter().map(|&i| point(sx(s.x[i]), sy(s.y[i]))).collect();
            let _ = writeln!(
                svg,
                r#"<polyline class="curve" points="{}" fill="none" stroke="{color}" stroke-width="1.5"><title>{}</title></polyline>"#,
                line.join(" "),
                escape(&s.label)
            );
            let ly = TOP + 10.0 + 20.0 * k as f64;
            let lx = LEFT + pw + 15.0;
            let _ = writeln!(
                svg,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="3"/>"#,
                lx + 20.0
            );
            let _ = writeln!(svg, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&s.label));
        }
        svg.push_str("</svg>\n");
        Ok(svg)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render()?)?;
        Ok(())
    }
}

/// Renders regret curves to a standalone SVG file.
pub fn render_svg(curves: &[NamedCurve], path: &Path) -> Result<()> {
    Plot::regret("cumulative regret", curves).write(path)
}

fn widen(lo: f64, hi: f64) -> (f64, f64) {
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        (lo, lo + 1.0)
    } else {
        (lo, hi)
    }
}

fn point(x: f64, y: f64) -> String {
    format!("{x:.2},{y:.2}")
}

fn tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e5 || v.abs() < 1e-2 {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn thin(n: usize) -> Vec<usize> {
    if n <= MAX_POINTS {
        return (0..n).collect();
    }
    let mut idx: Vec<usize> = (0..MAX_POINTS).map(|i| i * (n - 1) / (MAX_POINTS - 1)).collect();
    idx.dedup();
    idx
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Files written by a command. Unless [`OutputGuard::commit`] is called,
/// dropping the guard deletes them again.
#[derive(Debug, Default)]
pub struct OutputGuard {
    written: Vec<PathBuf>,
    committed: bool,
}

impl OutputGuard {
    pub fn new() -> Self {
        Self::default()
    }

    /// Runs `write` on `path` and remembers the file.
    pub fn write_with(&mut self, path: &Path, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
        self.written.push(path.to_path_buf());
        write(path)
    }

    pub fn paths(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn commit(mut self) {
        self.committed = true;
    }
}

impl Drop for OutputGuard {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.written {
                let _ = fs::remove_file(p);
            }
        }
    }
}
