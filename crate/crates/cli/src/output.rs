//! CSV and JSON writers.

use std::io::{self, Write};

use serde::Serialize;

use fracsl::convergence::{ConvergenceRecord, ProbeFraction};
use fracsl::Solution;

use crate::{Format, OutputArgs, ProblemArgs};

/// Fixed-point rendering with `precision` decimals. Rust rounds the exact
/// binary value half-to-even; a negative zero result is printed unsigned.
pub fn fixed(x: f64, precision: usize) -> String {
    let s = format!("{x:.precision$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|c| c == b'0' || c == b'.') => rest.to_string(),
        _ => s,
    }
}

pub fn write_solution_csv(out: &mut dyn Write, solution: &Solution, precision: usize) -> io::Result<()> {
    writeln!(out, "t,f")?;
    for (t, f) in solution.grid().nodes().iter().zip(solution.values()) {
        writeln!(out, "{},{}", fixed(*t, precision), fixed(*f, precision))?;
    }
    Ok(())
}

pub fn write_study_csv(out: &mut dyn Write, records: &[ConvergenceRecord], precision: usize) -> io::Result<()> {
    writeln!(out, "dt,probe,f,p")?;
    for rec in records {
        for (level, entry) in rec.ladder.iter().enumerate() {
            let p = rec.rate_at(level).map(|p| fixed(p, precision)).unwrap_or_default();
            writeln!(out, "{},{},{},{}", entry.dt, rec.probe.value(), fixed(entry.value, precision), p)?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct SolveConfig<'a> {
    mode: &'static str,
    #[serde(flatten)]
    problem: &'a ProblemArgs,
    n: usize,
    refine: bool,
    format: Format,
    precision: usize,
}

impl<'a> SolveConfig<'a> {
    pub fn new(problem: &'a ProblemArgs, n: usize, refine: bool, out: &OutputArgs) -> Self {
        Self { mode: "solve", problem, n, refine, format: out.format, precision: out.precision }
    }
}

#[derive(Debug, Serialize)]
pub struct StudyConfig<'a> {
    mode: &'static str,
    #[serde(flatten)]
    problem: &'a ProblemArgs,
    n_list: &'a [usize],
    probes: Vec<String>,
    format: Format,
    precision: usize,
}

impl<'a> StudyConfig<'a> {
    pub fn new(problem: &'a ProblemArgs, n_list: &'a [usize], probes: &[ProbeFraction], out: &OutputArgs) -> Self {
        Self {
            mode: "study",
            problem,
            n_list,
            probes: probes.iter().map(ToString::to_string).collect(),
            format: out.format,
            precision: out.precision,
        }
    }
}

#[derive(Serialize)]
struct SolveDocument<'a> {
    config: &'a SolveConfig<'a>,
    grid: GridSummary<'a>,
    values: &'a [f64],
}

#[derive(Serialize)]
struct GridSummary<'a> {
    n: usize,
    b: f64,
    dt: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    nodes: Option<&'a [f64]>,
}

#[derive(Serialize)]
struct StudyDocument<'a> {
    config: &'a StudyConfig<'a>,
    grid: Vec<GridSummary<'a>>,
    /// Probe values per level, in probe order.
    values: Vec<Vec<f64>>,
    ladders: &'a [ConvergenceRecord],
}

pub fn write_solution_json(out: &mut dyn Write, config: &SolveConfig, solution: &Solution) -> io::Result<()> {
    let grid = solution.grid();
    let doc = SolveDocument {
        config,
        grid: GridSummary { n: grid.n(), b: grid.b(), dt: grid.dt(), nodes: Some(grid.nodes()) },
        values: solution.values(),
    };
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)
}

pub fn write_study_json(
    out: &mut dyn Write,
    config: &StudyConfig,
    b: f64,
    records: &[ConvergenceRecord],
) -> io::Result<()> {
    let levels = records.first().map_or(0, |r| r.ladder.len());
    let grid = records
        .first()
        .map(|r| r.ladder.iter().map(|l| GridSummary { n: l.n, b, dt: l.dt, nodes: None }).collect())
        .unwrap_or_default();
    let values = (0..levels).map(|k| records.iter().map(|r| r.ladder[k].value).collect()).collect();
    let doc = StudyDocument { config, grid, values, ladders: records };
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)
}
