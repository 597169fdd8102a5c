//! CSV, JSON and plain-text renderings of solutions, sweeps and validation runs.
//!
//! Every number is written with 17 significant digits so that parsing the
//! output gives back the in-memory `f64` exactly.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::covariance::{csa_entry_name, quadrature_label, va_entry_name, vs_entry_name, CovarianceMatrix};
use crate::error::{Error, Result};
use crate::layout::Basis;
use crate::oracle::OracleReport;
use crate::pipeline::{Solution, SweepAxis, SweepPoint};
use crate::validate::ValidationSummary;

/// Shortest exact decimal form is not required; a fixed 17-digit form is.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn raw(x: f64) -> Box<RawValue> {
    let text = if x.is_finite() { format_f64(x) } else { "null".to_string() };
    RawValue::from_string(text).expect("numeric literal")
}

fn raw_matrix(m: &DMatrix<f64>) -> Vec<Vec<Box<RawValue>>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| raw(m[(i, j)])).collect()).collect()
}

struct Entry {
    block: &'static str,
    i: usize,
    j: usize,
    row: String,
    col: String,
    name: String,
    value: f64,
}

fn entries(sol: &Solution) -> Vec<Entry> {
    let mut out = Vec::with_capacity(144 + 3 * 36);
    let v = &sol.covariance.matrix;
    for i in 0..v.nrows() {
        for j in 0..v.ncols() {
            let (row, col) =
                (quadrature_label(Basis::FrequencySidebands, i), quadrature_label(Basis::FrequencySidebands, j));
            let name = format!("{row}:{col}");
            out.push(Entry { block: "v", i, j, row, col, name, value: v[(i, j)] });
        }
    }
    let sa = |k: usize| quadrature_label(Basis::SymmetricAntisymmetric, k);
    for i in 0..6 {
        for j in 0..6 {
            out.push(Entry {
                block: "v_s",
                i,
                j,
                row: sa(i),
                col: sa(j),
                name: vs_entry_name(i, j).into(),
                value: sol.blocks.v_s[(i, j)],
            });
        }
    }
    for i in 0..6 {
        for j in 0..6 {
            out.push(Entry {
                block: "v_a",
                i,
                j,
                row: sa(i + 6),
                col: sa(j + 6),
                name: va_entry_name(i, j),
                value: sol.blocks.v_a[(i, j)],
            });
        }
    }
    for i in 0..6 {
        for j in 0..6 {
            out.push(Entry {
                block: "c_sa",
                i,
                j,
                row: sa(i),
                col: sa(j + 6),
                name: csa_entry_name(i, j).into(),
                value: sol.blocks.c_sa[(i, j)],
            });
        }
    }
    out
}

fn csv_error(e: impl std::fmt::Display) -> Error {
    Error::Format(format!("csv: {e}"))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(csv_error)?;
    String::from_utf8(bytes).map_err(csv_error)
}

/// Long-format CSV with one row per entry of `V`, `V_s`, `V_a` and `C_sa`.
pub fn covariance_csv(sol: &Solution) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["block", "i", "j", "row", "col", "name", "value"]).map_err(csv_error)?;
    for e in entries(sol) {
        w.write_record([e.block, &e.i.to_string(), &e.j.to_string(), &e.row, &e.col, &e.name, &format_f64(e.value)])
            .map_err(csv_error)?;
    }
    finish_csv(w)
}

pub fn report_csv(sol: &Solution) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["quantity", "value"]).map_err(csv_error)?;
    let r = &sol.report;
    w.write_record(["min_eigenvalue", &format_f64(r.min_eigenvalue)]).map_err(csv_error)?;
    w.write_record(["purity", &format_f64(r.purity)]).map_err(csv_error)?;
    w.write_record(["asymmetry", &format_f64(r.asymmetry)]).map_err(csv_error)?;
    for (k, nu) in r.symplectic_eigenvalues.iter().enumerate() {
        w.write_record([&format!("symplectic_eigenvalue_{k}"), &format_f64(*nu)]).map_err(csv_error)?;
    }
    finish_csv(w)
}

/// Reads the `v` block of [`covariance_csv`] output.
pub fn parse_covariance_csv(text: &str) -> Result<CovarianceMatrix> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut cells = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        if rec.get(0) != Some("v") {
            continue;
        }
        let field = |k: usize| rec.get(k).ok_or_else(|| Error::Format(format!("csv row has no column {k}")));
        let i: usize = field(1)?.parse().map_err(csv_error)?;
        let j: usize = field(2)?.parse().map_err(csv_error)?;
        let x: f64 = field(6)?.parse().map_err(csv_error)?;
        cells.push((i, j, x));
    }
    let n = cells.iter().map(|c| c.0.max(c.1) + 1).max().unwrap_or(0);
    if cells.len() != n * n {
        return Err(Error::Format(format!("expected {} covariance entries, found {}", n * n, cells.len())));
    }
    let mut m = DMatrix::zeros(n, n);
    for (i, j, x) in cells {
        m[(i, j)] = x;
    }
    Ok(CovarianceMatrix { matrix: m, basis: Basis::FrequencySidebands })
}

#[derive(Serialize)]
struct SolutionDoc {
    sigma: Box<RawValue>,
    omega_analysis_hz: Box<RawValue>,
    phonons: bool,
    detection: bool,
    mean_fields: [Box<RawValue>; 3],
    labels: Vec<String>,
    covariance: Vec<Vec<Box<RawValue>>>,
    v_s: Vec<Vec<Box<RawValue>>>,
    v_a: Vec<Vec<Box<RawValue>>>,
    c_sa: Vec<Vec<Box<RawValue>>>,
    physicality: ReportDoc,
}

#[derive(Serialize)]
struct ReportDoc {
    min_eigenvalue: Box<RawValue>,
    purity: Box<RawValue>,
    asymmetry: Box<RawValue>,
    symplectic_eigenvalues: Vec<Box<RawValue>>,
}

fn solution_doc(sol: &Solution) -> SolutionDoc {
    let mf = &sol.mean_fields;
    SolutionDoc {
        sigma: raw(sol.sigma),
        omega_analysis_hz: raw(sol.omega_hz),
        phonons: sol.phonons,
        detection: sol.detection,
        mean_fields: [raw(mf.chi_alpha0.re), raw(mf.chi_alpha1.re), raw(mf.chi_alpha2.re)],
        labels: (0..sol.covariance.dim()).map(|k| quadrature_label(Basis::FrequencySidebands, k)).collect(),
        covariance: raw_matrix(&sol.covariance.matrix),
        v_s: raw_matrix(&sol.blocks.v_s),
        v_a: raw_matrix(&sol.blocks.v_a),
        c_sa: raw_matrix(&sol.blocks.c_sa),
        physicality: ReportDoc {
            min_eigenvalue: raw(sol.report.min_eigenvalue),
            purity: raw(sol.report.purity),
            asymmetry: raw(sol.report.asymmetry),
            symplectic_eigenvalues: sol.report.symplectic_eigenvalues.iter().map(|&x| raw(x)).collect(),
        },
    }
}

pub fn solution_json(sol: &Solution) -> Result<String> {
    serde_json::to_string_pretty(&solution_doc(sol)).map_err(|e| Error::Format(e.to_string()))
}

#[derive(Deserialize)]
struct CovarianceOnly {
    covariance: Vec<Vec<f64>>,
}

/// Reads the `covariance` member of [`solution_json`] output.
pub fn parse_covariance_json(text: &str) -> Result<CovarianceMatrix> {
    let doc: CovarianceOnly = serde_json::from_str(text).map_err(|e| Error::Format(format!("json: {e}")))?;
    let n = doc.covariance.len();
    if doc.covariance.iter().any(|row| row.len() != n) {
        return Err(Error::Format("covariance is not square".into()));
    }
    let m = DMatrix::from_fn(n, n, |i, j| doc.covariance[i][j]);
    Ok(CovarianceMatrix { matrix: m, basis: Basis::FrequencySidebands })
}

fn write_matrix(out: &mut String, title: &str, m: &DMatrix<f64>, labels: &[String], col_labels: &[String]) {
    let _ = writeln!(out, "{title}");
    let _ = write!(out, "{:>6}", "");
    for l in col_labels {
        let _ = write!(out, " {l:>10}");
    }
    out.push('\n');
    for i in 0..m.nrows() {
        let _ = write!(out, "{:>6}", labels[i]);
        for j in 0..m.ncols() {
            let _ = write!(out, " {:>10.5}", m[(i, j)]);
        }
        out.push('\n');
    }
    out.push('\n');
}

pub fn solution_table(sol: &Solution) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "sigma = {}  omega/2pi = {} Hz  phonons = {}  detection = {}\n",
        sol.sigma,
        sol.omega_hz,
        on_off(sol.phonons),
        on_off(sol.detection)
    );
    let freq: Vec<String> = (0..12).map(|k| quadrature_label(Basis::FrequencySidebands, k)).collect();
    let s: Vec<String> = (0..6).map(|k| quadrature_label(Basis::SymmetricAntisymmetric, k)).collect();
    let a: Vec<String> = (6..12).map(|k| quadrature_label(Basis::SymmetricAntisymmetric, k)).collect();
    write_matrix(&mut out, "V (frequency basis)", &sol.covariance.matrix, &freq, &freq);
    write_matrix(&mut out, "V_s", &sol.blocks.v_s, &s, &s);
    write_matrix(&mut out, "V_a", &sol.blocks.v_a, &a, &a);
    write_matrix(&mut out, "C_sa", &sol.blocks.c_sa, &s, &a);
    let r = &sol.report;
    let _ = writeln!(out, "min eigenvalue of V + iΩ  {:.3e}", r.min_eigenvalue);
    let _ = writeln!(out, "purity                    {:.6}", r.purity);
    let nu: Vec<String> = r.symplectic_eigenvalues.iter().map(|x| format!("{x:.6}")).collect();
    let _ = writeln!(out, "symplectic eigenvalues    {}", nu.join(" "));
    out
}

fn on_off(b: bool) -> &'static str {
    if b {
        "on"
    } else {
        "off"
    }
}

/// Long-format sweep CSV; failed points get a single row carrying the error.
pub fn sweep_csv(axis: SweepAxis, points: &[SweepPoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([axis.name(), "status", "block", "i", "j", "name", "value"]).map_err(csv_error)?;
    for p in points {
        let x = format_f64(p.value);
        match &p.outcome {
            Ok(sol) => {
                for e in entries(sol) {
                    w.write_record([
                        &x,
                        "ok",
                        e.block,
                        &e.i.to_string(),
                        &e.j.to_string(),
                        &e.name,
                        &format_f64(e.value),
                    ])
                    .map_err(csv_error)?;
                }
                let r = &sol.report;
                for (name, value) in [("min_eigenvalue", r.min_eigenvalue), ("purity", r.purity)] {
                    w.write_record([&x, "ok", "report", "", "", name, &format_f64(value)]).map_err(csv_error)?;
                }
            }
            Err(f) => {
                w.write_record([&x, &format!("error {}: {}", f.exit_code, f.message), "", "", "", "", ""])
                    .map_err(csv_error)?;
            }
        }
    }
    finish_csv(w)
}

#[derive(Serialize)]
struct SweepPointDoc {
    value: Box<RawValue>,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    solution: Option<SolutionDoc>,
}

pub fn sweep_json(axis: SweepAxis, points: &[SweepPoint]) -> Result<String> {
    let docs: Vec<SweepPointDoc> = points
        .iter()
        .map(|p| match &p.outcome {
            Ok(sol) => SweepPointDoc { value: raw(p.value), status: "ok".into(), solution: Some(solution_doc(sol)) },
            Err(f) => SweepPointDoc {
                value: raw(p.value),
                status: format!("error {}: {}", f.exit_code, f.message),
                solution: None,
            },
        })
        .collect();
    #[derive(Serialize)]
    struct Doc<'a> {
        axis: &'a str,
        points: Vec<SweepPointDoc>,
    }
    serde_json::to_string_pretty(&Doc { axis: axis.name(), points: docs }).map_err(|e| Error::Format(e.to_string()))
}

pub fn sweep_table(axis: SweepAxis, points: &[SweepPoint]) -> String {
    let mut out =
        format!("{:>14} {:>10} {:>12} {:>12} {:>10}  status\n", axis.name(), "twin", "|C_sa|", "min eig", "purity");
    for p in points {
        match &p.outcome {
            Ok(s) => {
                let _ = writeln!(
                    out,
                    "{:>14.6e} {:>10.6} {:>12.6e} {:>12.3e} {:>10.6}  ok",
                    p.value,
                    s.blocks.amplitude_difference_variance(),
                    s.blocks.cross_norm(),
                    s.report.min_eigenvalue,
                    s.report.purity
                );
            }
            Err(f) => {
                let _ = writeln!(
                    out,
                    "{:>14.6e} {:>10} {:>12} {:>12} {:>10}  error {}: {}",
                    p.value, "-", "-", "-", "-", f.exit_code, f.message
                );
            }
        }
    }
    out
}

pub fn validation_table(summary: &ValidationSummary) -> String {
    let mut out = format!("{:<24} {:>6} {:>12} {:>10}\n", "check", "result", "error", "tolerance");
    for r in &summary.reports {
        let _ = write!(
            out,
            "{:<24} {:>6} {:>12.3e} {:>10.1e}",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.max_abs_error,
            r.tolerance
        );
        if let Some(d) = &r.detail {
            let _ = write!(out, "  {d}");
        }
        out.push('\n');
    }
    out
}

pub fn validation_json(summary: &ValidationSummary) -> Result<String> {
    #[derive(Serialize)]
    struct Doc<'a> {
        passed: bool,
        at_boundary: bool,
        reports: Vec<ReportRow<'a>>,
    }
    #[derive(Serialize)]
    struct ReportRow<'a> {
        name: &'a str,
        passed: bool,
        max_abs_error: Box<RawValue>,
        tolerance: Box<RawValue>,
        #[serde(skip_serializing_if = "Option::is_none")]
        detail: Option<&'a str>,
    }
    let rows = summary
        .reports
        .iter()
        .map(|r: &OracleReport| ReportRow {
            name: &r.name,
            passed: r.passed,
            max_abs_error: raw(r.max_abs_error),
            tolerance: raw(r.tolerance),
            detail: r.detail.as_deref(),
        })
        .collect();
    serde_json::to_string_pretty(&Doc { passed: summary.passed(), at_boundary: summary.at_boundary, reports: rows })
        .map_err(|e| Error::Format(e.to_string()))
}

pub fn validation_csv(summary: &ValidationSummary) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check", "passed", "max_abs_error", "tolerance", "detail"]).map_err(csv_error)?;
    for r in &summary.reports {
        w.write_record([
            r.name.as_str(),
            if r.passed { "true" } else { "false" },
            &format_f64(r.max_abs_error),
            &format_f64(r.tolerance),
            r.detail.as_deref().unwrap_or(""),
        ])
        .map_err(csv_error)?;
    }
    finish_csv(w)
}
