//! Result files of a study: CSV tables and fields, and a JSON report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use super::reference::ReferenceSource;
use super::run::{CaseRun, OracleRow, Row, StudyOutcome};
use crate::error::{Error, Result};
use crate::problem::ProblemSpec;
use crate::report::StopReason;

pub const TABLE_HEADER: &str = "N,epsilon,L1,L1_order,Linf,Linf_order,iters,seconds,converged";

/// `v` with six significant digits and a two-digit exponent, e.g. `1.26000e-05`.
pub fn sci(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.5e}");
    let (mant, exp) = s.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.abs())
}

/// SHA-256 of the values rounded to eight significant digits, one per line.
pub fn field_hash(values: &[f64]) -> String {
    let mut h = Sha256::new();
    for v in values {
        // +0.0 and −0.0 round to the same text
        let v = if *v == 0.0 { 0.0 } else { *v };
        h.update(format!("{v:.7e}\n").as_bytes());
    }
    h.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn table_line(row: &Row, timing: bool) -> String {
    let (l1, linf) = match row.errors {
        Some(e) => (sci(e.l1), sci(e.linf)),
        None => ("-".into(), "-".into()),
    };
    let seconds = if timing {
        format!("{:.3}", row.seconds)
    } else {
        "-".into()
    };
    format!(
        "{},{},{},{},{},{},{},{},{}",
        row.cells, row.epsilon, l1, row.l1_order, linf, row.linf_order, row.iterations, seconds, row.converged
    )
}

/// The study table as CSV text.
pub fn table_csv(outcome: &StudyOutcome, timing: bool) -> String {
    let mut s = String::from(TABLE_HEADER);
    s.push('\n');
    for r in &outcome.runs {
        s.push_str(&table_line(&r.row, timing));
        s.push('\n');
    }
    s
}

pub fn oracle_csv(rows: &[OracleRow]) -> String {
    let mut s = String::from("N,unknowns,residual,max_difference,iters,pass\n");
    for o in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            o.cells,
            o.unknowns,
            sci(o.residual),
            sci(o.difference),
            o.iterations,
            o.pass
        );
    }
    s
}

fn phi_csv(run: &CaseRun) -> String {
    let r = &run.report;
    let mut s = String::new();
    if r.dimension == 1 {
        s.push_str("x,phi\n");
        for (x, p) in r.x.iter().zip(&r.phi) {
            let _ = writeln!(s, "{x:e},{p:e}");
        }
    } else {
        s.push_str("x,y,phi\n");
        for ((x, y), p) in r.x.iter().zip(&r.y).zip(&r.phi) {
            let _ = writeln!(s, "{x:e},{y:e},{p:e}");
        }
    }
    s
}

fn edge_csv(run: &CaseRun) -> Option<String> {
    let e = run.report.edges.as_ref()?;
    let mut s = String::from("x,upwind,from_left,from_right\n");
    for i in 0..e.x.len() {
        let _ = writeln!(s, "{:e},{:e},{:e},{:e}", e.x[i], e.upwind[i], e.from_left[i], e.from_right[i]);
    }
    Some(s)
}

fn history_csv(run: &CaseRun) -> String {
    let mut s = String::from("iteration,delta\n");
    for (k, d) in run.report.history.iter().enumerate() {
        let _ = writeln!(s, "{},{d:e}", k + 1);
    }
    s
}

#[derive(Serialize)]
struct RunSummary<'a> {
    #[serde(flatten)]
    row: &'a Row,
    final_delta: f64,
    min_phi: f64,
    phi_hash: String,
}

#[derive(Serialize)]
struct Report<'a> {
    config: &'a RunConfig,
    problem: &'a ProblemSpec,
    reference: ReferenceSource,
    success: bool,
    runs: Vec<RunSummary<'a>>,
    #[serde(skip_serializing_if = "<[_]>::is_empty")]
    oracle: &'a [OracleRow],
}

pub fn report_json(outcome: &StudyOutcome, cfg: &RunConfig) -> Result<String> {
    let runs = outcome
        .runs
        .iter()
        .map(|r| RunSummary {
            row: &r.row,
            final_delta: r.report.final_delta(),
            min_phi: r.report.min_phi(),
            phi_hash: field_hash(&r.report.phi),
        })
        .collect();
    // the output directory is left out so reports of identical runs match
    let config = RunConfig { out: None, ..cfg.clone() };
    let report = Report {
        config: &config,
        problem: &outcome.spec,
        reference: outcome.reference,
        success: outcome.success(),
        runs,
        oracle: &outcome.oracle,
    };
    let mut v = serde_json::to_value(&report).map_err(|e| Error::Config(e.to_string()))?;
    if !cfg.timing {
        if let Some(runs) = v.get_mut("runs").and_then(|r| r.as_array_mut()) {
            for r in runs {
                r["seconds"] = serde_json::Value::Null;
            }
        }
    }
    serde_json::to_string_pretty(&v).map_err(|e| Error::Config(e.to_string()))
}

fn run_dir_name(row: &Row) -> String {
    format!("N{}_eps{}", row.cells, row.epsilon)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write_fields(dir: &Path, run: &CaseRun) -> Result<()> {
    write(&dir.join("phi_avg.csv"), &phi_csv(run))?;
    if let Some(edges) = edge_csv(run) {
        write(&dir.join("phi_edge.csv"), &edges)?;
    }
    write(&dir.join("history.csv"), &history_csv(run))
}

/// Writes all result files under `dir` and returns the paths written at the top level.
///
/// `table.csv`, `report.json` (and `oracle.csv` for oracle checks) summarize the
/// study. Field files of the last run sit next to them; with several runs each
/// run also gets its own `runs/N<cells>_eps<ε>/` directory.
pub fn write_outputs(dir: &Path, outcome: &StudyOutcome, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = vec![dir.join("table.csv"), dir.join("report.json")];
    write(&written[0], &table_csv(outcome, cfg.timing))?;
    write(&written[1], &report_json(outcome, cfg)?)?;
    if !outcome.oracle.is_empty() {
        let p = dir.join("oracle.csv");
        write(&p, &oracle_csv(&outcome.oracle))?;
        written.push(p);
    }
    if outcome.runs.len() > 1 {
        for run in &outcome.runs {
            let sub = dir.join("runs").join(run_dir_name(&run.row));
            fs::create_dir_all(&sub)?;
            write_fields(&sub, run)?;
        }
    }
    if let Some(last) = outcome.runs.last() {
        write_fields(dir, last)?;
        written.push(dir.join("phi_avg.csv"));
    }
    Ok(written)
}

/// One-word description of how a run ended.
pub fn stop_label(stop: StopReason) -> &'static str {
    match stop {
        StopReason::Converged => "converged",
        StopReason::MaxIterations => "iteration cap",
        StopReason::Stalled => "stalled",
        StopReason::TimeBudget => "time budget",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::run::run_study;

    #[test]
    fn scientific_format() {
        assert_eq!(sci(1.26e-5), "1.26000e-05");
        assert_eq!(sci(2.0), "2.00000e+00");
        assert_eq!(sci(-3.5e12), "-3.50000e+12");
        assert_eq!(sci(0.0), "0.00000e+00");
    }

    #[test]
    fn hash_ignores_noise_below_eight_digits() {
        let a = field_hash(&[1.0, 0.123456789]);
        assert_eq!(a, field_hash(&[1.0 + 1e-12, 0.1234567891]));
        assert_ne!(a, field_hash(&[1.0, 0.1234568]));
        assert_eq!(field_hash(&[0.0]), field_hash(&[-0.0]));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn outputs_are_reproducible_without_timing() {
        let cfg = RunConfig::from_toml_str(
            "study = \"refine\"\nproblem = 1\nmesh = [10, 20]\ntol = 1e-12\ntiming = false\n",
        )
        .unwrap();
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        for d in &dirs {
            let out = run_study(&cfg).unwrap();
            write_outputs(d.path(), &out, &cfg).unwrap();
        }
        for f in ["table.csv", "report.json", "phi_avg.csv", "phi_edge.csv", "history.csv", "runs/N10_eps1/phi_avg.csv"] {
            let a = fs::read(dirs[0].path().join(f)).unwrap();
            let b = fs::read(dirs[1].path().join(f)).unwrap();
            assert_eq!(a, b, "{f}");
        }
        let table = fs::read_to_string(dirs[0].path().join("table.csv")).unwrap();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines[0], TABLE_HEADER);
        assert!(lines[1].starts_with("10,1,") && lines[1].ends_with(",-,true"), "{}", lines[1]);
        assert_eq!(lines.len(), 3);
    }
}
