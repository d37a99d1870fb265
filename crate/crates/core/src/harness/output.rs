use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{ComparisonSummary, MeanCurve};
use crate::error::{Result, SpsaError};
use crate::spsa1a::Algorithm;
use crate::trace::{IterateTrace, Termination, TraceRecord};

pub const TRACE_HEADER: &str = "replication,iteration,measurements,error";
pub const CURVE_HEADER: &str = "measurements,mean_error,median_error,stderr";

/// Creates `dir` and `dir/traces` and proves they are writable.
pub fn prepare_output_dir(dir: &Path) -> Result<()> {
    let traces = dir.join("traces");
    fs::create_dir_all(&traces).map_err(|e| SpsaError::io(&traces, e))?;
    let probe = dir.join(".write-probe");
    File::create(&probe).map_err(|e| SpsaError::io(&probe, e))?;
    fs::remove_file(&probe).map_err(|e| SpsaError::io(&probe, e))
}

/// Path of a replication's trace relative to the output directory.
pub fn trace_file_name(algorithm: Algorithm, replication: u64) -> String {
    format!("traces/{}_{:04}.csv", algorithm.id(), replication)
}

fn write_with<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let file = File::create(path).map_err(|e| SpsaError::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| SpsaError::io(path, e))
}

/// Writes one row per record. Floats use the shortest representation that
/// reads back to the same value.
pub fn write_trace_csv(path: &Path, trace: &IterateTrace) -> Result<()> {
    write_with(path, |w| {
        writeln!(w, "{TRACE_HEADER}")?;
        for r in &trace.records {
            writeln!(
                w,
                "{},{},{},{}",
                trace.replication, r.iteration, r.measurements, r.error
            )?;
        }
        Ok(())
    })
}

/// Reads a trace CSV back. The termination reason is not stored and comes
/// back as `MaxIterations`.
pub fn read_trace_csv(path: &Path) -> Result<IterateTrace> {
    let file = File::open(path).map_err(|e| SpsaError::io(path, e))?;
    let parse_err = |line: usize, message: String| SpsaError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut trace = IterateTrace::new(0);
    trace.termination = Termination::MaxIterations;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| SpsaError::io(path, e))?;
        if i == 0 {
            if line != TRACE_HEADER {
                return Err(parse_err(1, format!("unexpected header {line:?}")));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(parse_err(
                i + 1,
                format!("expected 4 fields, got {}", fields.len()),
            ));
        }
        let int = |s: &str| {
            s.parse::<u64>()
                .map_err(|e| parse_err(i + 1, e.to_string()))
        };
        trace.replication = int(fields[0])?;
        trace.records.push(TraceRecord {
            iteration: int(fields[1])?,
            measurements: int(fields[2])?,
            error: fields[3]
                .parse()
                .map_err(|e| parse_err(i + 1, format!("{e}")))?,
        });
    }
    Ok(trace)
}

pub fn write_curve_csv(path: &Path, curve: &MeanCurve) -> Result<()> {
    write_with(path, |w| {
        writeln!(w, "{CURVE_HEADER}")?;
        for r in &curve.rows {
            writeln!(
                w,
                "{},{},{},{}",
                r.measurements, r.mean_error, r.median_error, r.stderr
            )?;
        }
        Ok(())
    })
}

pub fn write_summary_json(path: &Path, summary: &ComparisonSummary) -> Result<()> {
    let text = serde_json::to_string_pretty(summary)
        .map_err(|e| SpsaError::Configuration(format!("cannot serialize summary: {e}")))?;
    write_with(path, |w| writeln!(w, "{text}"))
}

fn format_threshold(t: f64) -> String {
    format!("e<={t:e}")
}

/// Two tables, median and mean measurements, one row per algorithm and one
/// column per threshold, followed by the fraction of replications that
/// reached each threshold. Unreached cells show `--`.
pub fn render_table(summary: &ComparisonSummary) -> String {
    let thresholds = &summary.config_echo.thresholds;
    let mut out = String::new();
    if thresholds.is_empty() {
        out.push_str("no thresholds configured\n");
    }
    let width = 12;
    let header = |title: &str| {
        let mut s = format!("{title:<10}");
        for t in thresholds {
            s.push_str(&format!("{:>width$}", format_threshold(*t)));
        }
        s.push('\n');
        s
    };
    let cell = |v: Option<f64>| v.map_or_else(|| "--".to_string(), |m| format!("{m:.0}"));
    for (title, pick) in [
        (
            "median",
            (|r: &super::ThresholdResult| r.median_measurements) as fn(&_) -> _,
        ),
        ("mean", |r| r.mean_measurements),
    ] {
        if thresholds.is_empty() {
            break;
        }
        out.push_str(&header(title));
        for a in &summary.algorithms {
            let alg = a.setup.algorithm;
            out.push_str(&format!("{:<10}", alg.label()));
            for t in thresholds {
                let v = summary.result(alg, *t).and_then(pick);
                out.push_str(&format!("{:>width$}", cell(v)));
            }
            out.push('\n');
        }
        out.push('\n');
    }
    if !thresholds.is_empty() {
        out.push_str(&header("reached"));
        for a in &summary.algorithms {
            let alg = a.setup.algorithm;
            out.push_str(&format!("{:<10}", alg.label()));
            for t in thresholds {
                let f = summary.result(alg, *t).map_or(0.0, |r| r.reached_fraction);
                out.push_str(&format!("{:>width$}", format!("{:.0}%", 100.0 * f)));
            }
            out.push('\n');
        }
    }
    for a in &summary.algorithms {
        let d = a.diverged();
        if d > 0 {
            out.push_str(&format!(
                "{}: {d} replication(s) diverged\n",
                a.setup.algorithm.label()
            ));
        }
    }
    out
}
