//! Convergence tables, their CSV form and plot data files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use super::norms::observed_order;

/// Column order of every convergence CSV.
pub const CSV_HEADER: [&str; 9] = ["h", "dofs", "err_A", "order_A", "err_inf", "order_inf", "assemble_ms", "solve_ms", "m_matrix"];

/// Marker written in the `err_A` column of a level that did not complete.
pub const FAILED: &str = "FAILED";

#[derive(Debug, Clone, PartialEq)]
pub struct LevelStats {
    pub dofs: usize,
    /// Largest cell diameter of the generated mesh.
    pub h_measured: f64,
    pub err_a: f64,
    pub err_inf: f64,
    pub assemble_ms: f64,
    pub solve_ms: f64,
    pub m_matrix: bool,
    pub projection_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LevelOutcome {
    Solved(LevelStats),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    /// Nominal spacing.
    pub h: f64,
    pub outcome: LevelOutcome,
    pub order_a: Option<f64>,
    pub order_inf: Option<f64>,
}

impl ConvergenceRow {
    pub fn stats(&self) -> Option<&LevelStats> {
        match &self.outcome {
            LevelOutcome::Solved(s) => Some(s),
            LevelOutcome::Failed(_) => None,
        }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self.outcome, LevelOutcome::Failed(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// Short identifier, also the file stem of written outputs.
    pub label: String,
    pub scheme: String,
    pub family: String,
    pub epsilon: f64,
    pub seed: u64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn new(label: impl Into<String>, scheme: impl Into<String>, family: impl Into<String>, epsilon: f64, seed: u64) -> Self {
        Self { label: label.into(), scheme: scheme.into(), family: family.into(), epsilon, seed, rows: Vec::new() }
    }

    /// Appends a level; orders are taken against the previous row when both
    /// levels completed (and left out when an error is exactly zero).
    pub fn push(&mut self, h: f64, outcome: LevelOutcome) {
        let (mut order_a, mut order_inf) = (None, None);
        if let (Some(prev), LevelOutcome::Solved(cur)) = (self.rows.last(), &outcome) {
            if let Some(p) = prev.stats() {
                let order = |e0: f64, e1: f64| Some(observed_order(prev.h, e0, h, e1)).filter(|o| o.is_finite());
                order_a = order(p.err_a, cur.err_a);
                order_inf = order(p.err_inf, cur.err_inf);
            }
        }
        self.rows.push(ConvergenceRow { h, outcome, order_a, order_inf });
    }

    pub fn has_failures(&self) -> bool {
        self.rows.iter().any(ConvergenceRow::is_failed)
    }

    pub fn last_order_a(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.order_a)
    }

    pub fn last_order_inf(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.order_inf)
    }

    pub fn orders_a(&self) -> Vec<Option<f64>> {
        self.rows.iter().skip(1).map(|r| r.order_a).collect()
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER)?;
        for row in &self.rows {
            let order = |o: Option<f64>| o.map(|v| format!("{v:.4}")).unwrap_or_default();
            let h = format!("{}", row.h);
            match &row.outcome {
                LevelOutcome::Solved(s) => out.write_record([
                    h,
                    s.dofs.to_string(),
                    format!("{:.6e}", s.err_a),
                    order(row.order_a),
                    format!("{:.6e}", s.err_inf),
                    order(row.order_inf),
                    format!("{:.3}", s.assemble_ms),
                    format!("{:.3}", s.solve_ms),
                    s.m_matrix.to_string(),
                ])?,
                LevelOutcome::Failed(_) => {
                    out.write_record([h.as_str(), "", FAILED, "", "", "", "", "", ""])?
                }
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Human-readable table with measured `h` and failure reasons.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} on {} (eps = {:e}, seed = {})", self.scheme, self.family, self.epsilon, self.seed);
        let _ = writeln!(s, "{:>10} {:>10} {:>8} {:>11} {:>6} {:>11} {:>6} {:>6}", "h", "h_meas", "dofs", "err_A", "ord", "err_inf", "ord", "M");
        let ord = |o: Option<f64>| o.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
        for r in &self.rows {
            match &r.outcome {
                LevelOutcome::Solved(st) => {
                    let _ = writeln!(
                        s,
                        "{:>10.4e} {:>10.4e} {:>8} {:>11.4e} {:>6} {:>11.4e} {:>6} {:>6}",
                        r.h,
                        st.h_measured,
                        st.dofs,
                        st.err_a,
                        ord(r.order_a),
                        st.err_inf,
                        ord(r.order_inf),
                        st.m_matrix
                    );
                }
                LevelOutcome::Failed(why) => {
                    let _ = writeln!(s, "{:>10.4e} {FAILED}: {why}", r.h);
                }
            }
        }
        s
    }
}

/// One `(scheme, ε)` point of an `ε`-sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub scheme: String,
    pub family: String,
    pub epsilon: f64,
    pub dofs: usize,
    /// `None` when the run failed.
    pub err_inf: Option<f64>,
    pub err_a: Option<f64>,
}

impl SweepPoint {
    /// `scheme/family`, which tells apart one scheme run on two meshes.
    pub fn series_label(&self) -> String {
        format!("{}/{}", self.scheme, self.family)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepReport {
    pub h: f64,
    pub points: Vec<SweepPoint>,
}

impl SweepReport {
    pub fn has_failures(&self) -> bool {
        self.points.iter().any(|p| p.err_inf.is_none())
    }

    /// `L∞` errors of one `scheme/family` series in `ε` order.
    pub fn series(&self, label: &str) -> Vec<(f64, Option<f64>)> {
        self.points.iter().filter(|p| p.series_label() == label).map(|p| (p.epsilon, p.err_inf)).collect()
    }

    /// Series labels in first-appearance order.
    pub fn series_labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for p in &self.points {
            let l = p.series_label();
            if !out.contains(&l) {
                out.push(l);
            }
        }
        out
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = csv::Writer::from_writer(Vec::new());
        let f = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_else(|| FAILED.into());
        out.write_record(["scheme", "family", "h", "epsilon", "dofs", "err_inf", "err_A"]).expect("in-memory write");
        for p in &self.points {
            out.write_record([
                p.scheme.clone(),
                p.family.clone(),
                format!("{}", self.h),
                format!("{:e}", p.epsilon),
                p.dofs.to_string(),
                f(p.err_inf),
                f(p.err_a),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(out.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
    }
}

fn plot_header(title: &str, columns: &str) -> String {
    format!("# {title}\n# columns: {columns}\n")
}

/// Writes one gnuplot-ready `<label>.dat` per report (solved levels only)
/// and returns the written paths in report order.
pub fn emit_plots(reports: &[ConvergenceReport], dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::with_capacity(reports.len());
    for r in reports {
        let mut s = plot_header(
            &format!("{} on {}, eps = {:e}, seed = {}", r.scheme, r.family, r.epsilon, r.seed),
            "h err_A err_inf",
        );
        for row in &r.rows {
            if let Some(st) = row.stats() {
                let _ = writeln!(s, "{} {:.6e} {:.6e}", row.h, st.err_a, st.err_inf);
            }
        }
        let path = dir.join(format!("{}.dat", r.label));
        fs::write(&path, s)?;
        paths.push(path);
    }
    Ok(paths)
}

/// `ε`-sweep as a table with one column per `scheme/family`; failed runs are `nan`.
pub fn emit_sweep_plot(sweep: &SweepReport, path: &Path) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let schemes = sweep.series_labels();
    let mut s = plot_header(&format!("L-infinity error against epsilon, h = {}", sweep.h), &format!("epsilon {}", schemes.join(" ")));
    let mut eps: Vec<f64> = Vec::new();
    for p in &sweep.points {
        if !eps.contains(&p.epsilon) {
            eps.push(p.epsilon);
        }
    }
    for e in eps {
        let _ = write!(s, "{e:e}");
        for sc in &schemes {
            let v = sweep.points.iter().find(|p| &p.series_label() == sc && p.epsilon == e).and_then(|p| p.err_inf);
            match v {
                Some(v) => {
                    let _ = write!(s, " {v:.6e}");
                }
                None => s.push_str(" nan"),
            }
        }
        s.push('\n');
    }
    fs::write(path, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(err_a: f64, err_inf: f64) -> LevelOutcome {
        LevelOutcome::Solved(LevelStats {
            dofs: 10,
            h_measured: 0.1,
            err_a,
            err_inf,
            assemble_ms: 0.0,
            solve_ms: 0.0,
            m_matrix: true,
            projection_error: None,
        })
    }

    #[test]
    fn orders_between_consecutive_levels() {
        let mut r = ConvergenceReport::new("t", "meave", "hexa-dual", 1e-2, 0);
        r.push(0.25, stats(1.0, 1.0));
        r.push(0.125, stats(0.5, 0.25));
        r.push(0.0625, LevelOutcome::Failed("boom".into()));
        r.push(0.03125, stats(0.1, 0.1));
        assert_eq!(r.rows[0].order_a, None);
        assert!((r.rows[1].order_a.unwrap() - 1.0).abs() < 1e-15);
        assert!((r.rows[1].order_inf.unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(r.rows[3].order_a, None);
        assert!(r.has_failures());
    }

    #[test]
    fn csv_layout() {
        let mut r = ConvergenceReport::new("t", "meave", "hexa-dual", 1e-2, 0);
        r.push(0.5, stats(0.4, 0.2));
        r.push(0.25, LevelOutcome::Failed("no".into()));
        let csv = r.to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "h,dofs,err_A,order_A,err_inf,order_inf,assemble_ms,solve_ms,m_matrix");
        assert_eq!(lines[1], "0.5,10,4.000000e-1,,2.000000e-1,,0.000,0.000,true");
        assert_eq!(lines[2], "0.25,,FAILED,,,,,,");
    }

    #[test]
    fn plot_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut r = ConvergenceReport::new("empty", "eave-sv", "ncvx", 1e-2, 0);
        let p = emit_plots(std::slice::from_ref(&r), dir.path()).unwrap();
        let text = fs::read_to_string(&p[0]).unwrap();
        assert!(text.lines().all(|l| l.starts_with('#')));
        r.label = "two".into();
        r.push(0.5, stats(0.4, 0.2));
        r.push(0.25, stats(0.2, 0.05));
        let p = emit_plots(std::slice::from_ref(&r), dir.path()).unwrap();
        let first = fs::read(&p[0]).unwrap();
        assert_eq!(String::from_utf8_lossy(&first).lines().filter(|l| !l.starts_with('#')).count(), 2);
        emit_plots(std::slice::from_ref(&r), dir.path()).unwrap();
        assert_eq!(fs::read(&p[0]).unwrap(), first);
    }
}
