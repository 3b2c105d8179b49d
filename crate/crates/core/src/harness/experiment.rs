use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{Algorithm, ExperimentConfig};
use super::metric::{performance_gap, Gap};
use super::trace_csv::trace_csv_bytes;
use crate::baseline::nelder_mead;
use crate::engine::{run_somogsa, RunError};
use crate::error::{Error, Result};
use crate::landscape::{
    build_grid, compute_plot_field, render_decision_space, render_objective_space, render_plot, write_atomic,
    Glyph, Marker, Overlay, RenderStyle, TRACE_PALETTE,
};
use crate::moization::make_biobjective;
use crate::trace::{best_of_trace, Termination};
use crate::{BiObjectiveProblem, NelderMeadConfig, Point, ScalarProblem, SearchTrace, SomogsaConfig};

/// Runs one algorithm from one start. Nelder-Mead traces get their helper
/// values filled in afterwards.
pub fn run_algorithm(
    algo: Algorithm,
    p: &BiObjectiveProblem,
    start: &Point,
    somogsa: &SomogsaConfig,
    nm: &NelderMeadConfig,
) -> Result<SearchTrace> {
    match algo {
        Algorithm::Somogsa => run_somogsa(p, start, somogsa).map_err(|e| match e {
            RunError::Invalid(e) => e,
            RunError::NonFinite { at, .. } => Error::NonFinite(format!("objective at {at:?}")),
        }),
        Algorithm::NelderMead => {
            let mut t = nelder_mead(p.f1(), start, nm)?;
            t.attach_helper(p);
            Ok(t)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    /// 1-based.
    pub start_id: usize,
    pub algorithm: Algorithm,
    pub start: Point,
    pub f1_start: f64,
    pub best_point: Point,
    pub best_f1: f64,
    pub gap: Gap,
    pub evals: u64,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub problem: String,
    pub sphere_center: Point,
    pub rows: Vec<RunRow>,
}

impl RunReport {
    pub fn rows_for(&self, algo: Algorithm) -> impl Iterator<Item = &RunRow> {
        self.rows.iter().filter(move |r| r.algorithm == algo)
    }

    pub fn algorithms(&self) -> Vec<Algorithm> {
        let mut seen = Vec::new();
        for r in &self.rows {
            if !seen.contains(&r.algorithm) {
                seen.push(r.algorithm);
            }
        }
        seen
    }

    pub fn mean_gap(&self, algo: Algorithm) -> Option<f64> {
        let gaps: Vec<f64> = self.rows_for(algo).map(|r| r.gap.value).collect();
        (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64)
    }

    /// `start_id,algo,best_f1,gap,evals,reason`, then one `mean` row per
    /// algorithm carrying the mean gap.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["start_id", "algo", "best_f1", "gap", "evals", "reason"])?;
        for r in &self.rows {
            w.write_record([
                r.start_id.to_string(),
                r.algorithm.to_string(),
                r.best_f1.to_string(),
                r.gap.value.to_string(),
                r.evals.to_string(),
                r.termination.to_string(),
            ])?;
        }
        for a in self.algorithms() {
            let mean = self.mean_gap(a).unwrap_or_default();
            w.write_record(["mean", a.as_str(), "", &mean.to_string(), "", ""])?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    /// Human-readable table with gaps as one-decimal percentages.
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let c = self.sphere_center.to_f64();
        let _ = writeln!(s, "# {} with sphere center {c:?}\n", self.problem);
        s.push_str("| start | algorithm | start point | best f1 | gap | evals | termination |\n");
        s.push_str("|---|---|---|---|---|---|---|\n");
        let mut degenerate = false;
        for r in &self.rows {
            let mark = if r.gap.degenerate { "*" } else { "" };
            degenerate |= r.gap.degenerate;
            let _ = writeln!(
                s,
                "| {} | {} | {:?} | {:.4} | {:.1}%{mark} | {} | {} |",
                r.start_id,
                r.algorithm,
                r.start.to_f64(),
                r.best_f1,
                100.0 * r.gap.value,
                r.evals,
                r.termination
            );
        }
        for a in self.algorithms() {
            let _ = writeln!(s, "| mean | {a} | | | {:.1}% | | |", 100.0 * self.mean_gap(a).unwrap_or_default());
        }
        if degenerate {
            s.push_str("\n\\* start already optimal; gap defined as 100%.\n");
        }
        s
    }
}

pub fn trace_file_name(algo: Algorithm, start_id: usize) -> String {
    format!("trace_{algo}_start{start_id}.csv")
}

fn row_for(f1: &ScalarProblem, algo: Algorithm, start_id: usize, start: &Point, trace: &SearchTrace) -> Result<RunRow> {
    let f1_opt = f1
        .known_optimum()
        .map(|(_, v)| v)
        .ok_or_else(|| Error::invalid("performance gap needs a problem with known optimum"))?;
    let (best_point, best_f1) = best_of_trace(trace);
    let f1_start = trace.first().f1;
    Ok(RunRow {
        start_id,
        algorithm: algo,
        start: start.clone(),
        f1_start,
        best_point,
        best_f1,
        gap: performance_gap(best_f1, f1_start, f1_opt)?,
        evals: trace.evaluations().total(f1.dimension()),
        termination: trace.termination(),
    })
}

/// Everything an experiment produced, in memory.
pub struct ExperimentRun {
    pub report: RunReport,
    pub traces: Vec<SearchTrace>,
    pub problem: BiObjectiveProblem,
}

/// Runs every start with every algorithm, in parallel, without touching disk.
pub fn execute(cfg: &ExperimentConfig) -> Result<ExperimentRun> {
    let f1 = cfg.build_problem()?;
    let starts = cfg.resolve_starts(&f1)?;
    let p = make_biobjective(f1.clone(), cfg.sphere_center.clone())?;
    let jobs: Vec<(usize, Algorithm)> = (0..starts.len())
        .flat_map(|k| cfg.algorithms.iter().map(move |&a| (k, a)))
        .collect();
    let traces: Vec<SearchTrace> = jobs
        .par_iter()
        .map(|&(k, a)| run_algorithm(a, &p, &starts[k], &cfg.somogsa, &cfg.nelder_mead))
        .collect::<Result<_>>()?;
    let rows = jobs
        .iter()
        .zip(&traces)
        .map(|(&(k, a), t)| row_for(&f1, a, k + 1, &starts[k], t))
        .collect::<Result<_>>()?;
    Ok(ExperimentRun {
        report: RunReport {
            problem: f1.name().to_string(),
            sphere_center: cfg.sphere_center.clone(),
            rows,
        },
        traces,
        problem: p,
    })
}

/// Runs the experiment and writes traces, reports and (optionally) images
/// into `out_dir`. Returns the report and the list of written files.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path) -> Result<(RunReport, Vec<PathBuf>)> {
    let run = execute(cfg)?;
    std::fs::create_dir_all(out_dir)?;
    let f1 = run.problem.f1();
    let mut written = Vec::new();
    let mut put = |name: String, bytes: &[u8]| -> Result<()> {
        let path = out_dir.join(name);
        write_atomic(&path, bytes)?;
        written.push(path);
        Ok(())
    };

    for (row, trace) in run.report.rows.iter().zip(&run.traces) {
        put(trace_file_name(row.algorithm, row.start_id), &trace_csv_bytes(trace, f1)?)?;
    }
    put("report.csv".into(), &run.report.to_csv()?)?;
    put("report.md".into(), run.report.to_markdown().as_bytes())?;

    if cfg.images {
        let style = RenderStyle { pixels_per_cell: cfg.pixels_per_cell, ..RenderStyle::default() };
        let grid = build_grid(f1.bounds().clone(), cfg.resolution)?;
        let field = compute_plot_field(&run.problem, &grid, cfg.tau)?;
        let mut markers = Vec::new();
        if let Some((x, _)) = f1.known_optimum() {
            markers.push(Marker::new([x[0], x[1]], Glyph::Cross));
        }
        let s = &cfg.sphere_center;
        markers.push(Marker::new([s[0], s[1]], Glyph::Circle));

        for algo in run.report.algorithms() {
            let mut overlays = Vec::new();
            for (row, trace) in run.report.rows.iter().zip(&run.traces) {
                if row.algorithm == algo {
                    let color = TRACE_PALETTE[(row.start_id - 1) % TRACE_PALETTE.len()];
                    overlays.push(Overlay::from_trace(trace, color)?);
                }
            }
            let decision = render_decision_space(f1, &grid, &style, &overlays, &markers)?;
            put(format!("decision_{algo}.png"), &decision.to_png()?)?;
            let plot = render_plot(&field, &style, &overlays, &markers)?;
            put(format!("plot_{algo}.png"), &plot.to_png()?)?;
            for (row, trace) in run.report.rows.iter().zip(&run.traces) {
                if row.algorithm == algo && cfg.objective_space_starts.contains(&row.start_id) {
                    let img = render_objective_space(&field, Some(trace), row.best_f1, &style)?;
                    put(format!("objective_{algo}_start{}.png", row.start_id), &img.to_png()?)?;
                }
            }
        }
    }
    Ok((run.report, written))
}
