use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{ConvergenceReport, LemmaReport};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "case,mode,variant,t,delta,n0,m0,seed,e2,iters,wall_ms";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportPaths {
    pub csv: PathBuf,
    pub svg: PathBuf,
}

/// Convergence rows in the fixed schema, followed by `#slope=` and, when some
/// runs failed, `#nonconverged=t:seed;...`.
pub fn write_csv(report: &ConvergenceReport) -> String {
    let mut s = String::new();
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{:.12e},{},{},{},{:.12e},{},{}",
            report.case, report.mode, report.variant, r.t, r.delta, r.n0, r.m0, r.seed, r.e2, r.iters, r.wall_ms
        );
    }
    let _ = writeln!(s, "#slope={:.6}", report.slope);
    let failed: Vec<String> = report
        .rows
        .iter()
        .filter(|r| !r.converged)
        .map(|r| format!("{}:{}", r.t, r.seed))
        .collect();
    if !failed.is_empty() {
        let _ = writeln!(s, "#nonconverged={}", failed.join(";"));
    }
    s
}

struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, px_lo: f64, px_hi: f64) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| *v > 0.0 && v.is_finite()) {
            lo = lo.min(v.log10());
            hi = hi.max(v.log10());
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        let (lo, hi) = (lo.floor(), hi.ceil().max(lo.floor() + 1.0));
        Self { lo, hi, px_lo, px_hi }
    }

    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v.log10() - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

/// Log–log scatter of `(x, y)` points with an optional fitted power law
/// `y = exp(intercept) x^slope`.
pub fn loglog_svg(title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)], fit: Option<(f64, f64)>) -> String {
    let (w, h) = (640.0, 480.0);
    let (left, right, top, bottom) = (80.0, 600.0, 50.0, 420.0);
    let xa = Axis::new(points.iter().map(|p| p.0), left, right);
    let ya = Axis::new(points.iter().map(|p| p.1), bottom, top);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="25" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );
    for e in (xa.lo as i32)..=(xa.hi as i32) {
        let px = xa.map(10f64.powi(e));
        let _ = writeln!(s, r##"<line x1="{px:.2}" y1="{top}" x2="{px:.2}" y2="{bottom}" stroke="#ddd"/>"##);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{}" text-anchor="middle">1e{e}</text>"#, bottom + 18.0);
    }
    for e in (ya.lo as i32)..=(ya.hi as i32) {
        let py = ya.map(10f64.powi(e));
        let _ = writeln!(s, r##"<line x1="{left}" y1="{py:.2}" x2="{right}" y2="{py:.2}" stroke="#ddd"/>"##);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{e}</text>"#, left - 6.0, py + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (left + right) / 2.0, h - 20.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="20" y="{0}" text-anchor="middle" transform="rotate(-90 20 {0})">{1}</text>"#,
        (top + bottom) / 2.0,
        escape(y_label)
    );
    if let Some((slope, intercept)) = fit {
        let x0 = 10f64.powf(xa.lo);
        let x1 = 10f64.powf(xa.hi);
        let f = |x: f64| (intercept + slope * x.ln()).exp();
        let _ = writeln!(
            s,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c33" stroke-width="1.5" clip-path="url(#plot)"/>"##,
            xa.map(x0),
            ya.map(f(x0)),
            xa.map(x1),
            ya.map(f(x1))
        );
        let _ = writeln!(
            s,
            r##"<text x="{}" y="{}" fill="#c33">slope {:.3}</text>"##,
            left + 10.0,
            top + 18.0,
            slope
        );
    }
    let _ = writeln!(
        s,
        r#"<defs><clipPath id="plot"><rect x="{left}" y="{top}" width="{}" height="{}"/></clipPath></defs>"#,
        right - left,
        bottom - top
    );
    for &(x, y) in points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0) {
        let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="#236"/>"##, xa.map(x), ya.map(y));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn write_svg(report: &ConvergenceReport) -> String {
    let points: Vec<(f64, f64)> = report.rows.iter().filter(|r| r.converged).map(|r| (r.delta, r.e2)).collect();
    let fit = report.slope.is_finite().then_some((report.slope, report.intercept));
    loglog_svg(
        &format!("{} {} {}", report.case, report.mode, report.variant),
        "delta",
        "e2",
        &points,
        fit,
    )
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

fn out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `<stem>.csv` and `<stem>.svg` into `dir`.
pub fn emit_report(report: &ConvergenceReport, dir: &Path, stem: &str) -> Result<ReportPaths> {
    if report.rows.is_empty() {
        return Err(Error::Validation("report has no rows, nothing written".into()));
    }
    out_dir(dir)?;
    let paths = ReportPaths {
        csv: dir.join(format!("{stem}.csv")),
        svg: dir.join(format!("{stem}.svg")),
    };
    write_file(&paths.csv, &write_csv(report))?;
    write_file(&paths.svg, &write_svg(report))?;
    Ok(paths)
}

/// Writes `lemmas.csv` and `lemmas.svg` into `dir`.
pub fn emit_lemma_report(report: &LemmaReport, dir: &Path) -> Result<ReportPaths> {
    if report.rows.is_empty() {
        return Err(Error::Validation("report has no rows, nothing written".into()));
    }
    out_dir(dir)?;
    let mut s = String::from("case,delta,boundary_points,boundary_sum,boundary_deviation,omega_hat,omega_deviation\n");
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{},{:.12e},{},{:.12e},{:.12e},{:.12e},{:.12e}",
            report.case, r.delta, r.boundary_points, r.boundary_sum, r.boundary_deviation, r.omega_hat, r.omega_deviation
        );
    }
    let _ = writeln!(s, "#cr={:.12e}", report.cr);
    let _ = writeln!(s, "#boundary_order={:.6}", report.boundary_order);
    let _ = writeln!(s, "#omega_order={:.6}", report.omega_order);
    let paths = ReportPaths {
        csv: dir.join("lemmas.csv"),
        svg: dir.join("lemmas.svg"),
    };
    write_file(&paths.csv, &s)?;
    let pts: Vec<(f64, f64)> = report
        .rows
        .iter()
        .flat_map(|r| [(r.delta, r.boundary_deviation), (r.delta, r.omega_deviation)])
        .collect();
    write_file(
        &paths.svg,
        &loglog_svg("kernel lemma deviations", "delta", "deviation", &pts, None),
    )?;
    Ok(paths)
}
