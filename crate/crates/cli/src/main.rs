//! `somogsa` command-line tool: single runs, landscape plots, benchmarks.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use somogsa::harness::{read_trace_csv, run_algorithm, run_experiment, trace_csv_bytes, Algorithm, ExperimentConfig};
use somogsa::landscape::{
    build_grid, compute_plot_field, render_plot, write_atomic, Glyph, Marker, Overlay, RenderStyle, DEFAULT_TAU,
    TRACE_PALETTE,
};
use somogsa::moization::make_biobjective;
use somogsa::problems::ProblemId;
use somogsa::trace::best_of_trace;
use somogsa::{Error, NelderMeadConfig, Point, SomogsaConfig};

#[derive(Parser)]
#[command(name = "somogsa", version, about = "Multiobjectivized gradient-based local search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm from one start and write its trace.
    Run(RunArgs),
    /// Render the multi-objective landscape plot of a problem.
    Plot(PlotArgs),
    /// Run a multi-start benchmark described by a config file.
    Bench(BenchArgs),
}

#[derive(Args)]
struct RunArgs {
    /// sphere, rastrigin, gallagher21:<seed> or gallagher101:<seed>
    #[arg(long)]
    problem: String,
    #[arg(long, value_parser = parse_algorithm)]
    algo: Algorithm,
    /// Comma-separated coordinates; their count sets the dimension.
    #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
    start: Coords,
    #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
    sphere_center: Coords,
    #[arg(long)]
    t_angle: Option<f64>,
    #[arg(long)]
    sigma_mo: Option<f64>,
    #[arg(long)]
    sigma_so: Option<f64>,
    #[arg(long)]
    eps_f2opt: Option<f64>,
    #[arg(long)]
    trace_out: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long)]
    problem: String,
    #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
    sphere_center: Coords,
    /// Rows x columns, e.g. 100x100 (rows along x2, columns along x1).
    #[arg(long, value_parser = parse_resolution)]
    resolution: [usize; 2],
    #[arg(long, default_value_t = DEFAULT_TAU)]
    tau: f64,
    /// Trace CSV files to overlay.
    #[arg(long, num_args = 1..)]
    trace: Vec<PathBuf>,
    #[arg(long, default_value_t = 4)]
    pixels_per_cell: u32,
    /// Output image (.png or .ppm).
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    field_out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides `out_dir` from the config file.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Debug)]
struct Coords(Vec<f64>);

fn parse_coords(s: &str) -> Result<Coords, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number")))
        .collect::<Result<_, _>>()
        .map(Coords)
}

fn parse_resolution(s: &str) -> Result<[usize; 2], String> {
    let (r, c) = s.split_once(['x', 'X']).ok_or("expected RxC, e.g. 100x100")?;
    let n = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a cell count"));
    // grid resolution is ordered (x1 cells, x2 cells) = (columns, rows)
    Ok([n(c)?, n(r)?])
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn cmd_run(a: RunArgs) -> Result<(), Error> {
    let f1 = a.problem.parse::<ProblemId>()?.build::<f64>(a.start.0.len())?;
    let start = Point::new(a.start.0)?;
    let p = make_biobjective(f1, Point::new(a.sphere_center.0)?)?;
    let mut cfg = SomogsaConfig::default();
    if let Some(v) = a.t_angle {
        cfg.t_angle = v;
    }
    if let Some(v) = a.sigma_mo {
        cfg.sigma_mo = v;
    }
    if let Some(v) = a.sigma_so {
        cfg.sigma_so = v;
    }
    if let Some(v) = a.eps_f2opt {
        cfg.eps_f2opt = v;
    }
    let trace = run_algorithm(a.algo, &p, &start, &cfg, &NelderMeadConfig::default())?;
    write_atomic(&a.trace_out, &trace_csv_bytes(&trace, p.f1())?)?;
    let (best, best_f1) = best_of_trace(&trace);
    println!(
        "best_f1={best_f1} best={:?} evals={} reason={} entries={}",
        best.to_f64(),
        trace.evaluations().total(p.dimension()),
        trace.termination(),
        trace.len()
    );
    Ok(())
}

fn cmd_plot(a: PlotArgs) -> Result<(), Error> {
    let f1 = a.problem.parse::<ProblemId>()?.build::<f64>(2)?;
    let s = Point::new(a.sphere_center.0)?;
    let p = make_biobjective(f1, s.clone())?;
    let grid = build_grid(p.f1().bounds().clone(), a.resolution)?;
    let field = compute_plot_field(&p, &grid, a.tau)?;

    let mut overlays = Vec::new();
    for (k, path) in a.trace.iter().enumerate() {
        let file = File::open(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
        let rows = read_trace_csv(BufReader::new(file))?;
        let mut points = Vec::with_capacity(rows.len());
        for r in rows {
            if r.point.len() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, found: r.point.len() });
            }
            points.push([r.point[0], r.point[1]]);
        }
        overlays.push(Overlay { points, color: TRACE_PALETTE[k % TRACE_PALETTE.len()] });
    }
    let mut markers = vec![Marker::new([s[0], s[1]], Glyph::Circle)];
    if let Some((x, _)) = p.f1().known_optimum() {
        markers.insert(0, Marker::new([x[0], x[1]], Glyph::Cross));
    }
    let style = RenderStyle { pixels_per_cell: a.pixels_per_cell, ..RenderStyle::default() };
    render_plot(&field, &style, &overlays, &markers)?.save(&a.out)?;
    if let Some(path) = a.field_out {
        let mut buf = Vec::new();
        field.write_csv(&mut buf)?;
        write_atomic(&path, &buf)?;
    }
    println!(
        "cells={} efficient={} max_dominance_count={}",
        field.len(),
        field.efficient_cells().count(),
        field.max_dominance_count()
    );
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<(), Error> {
    let cfg = ExperimentConfig::load(&a.config)?;
    let out_dir = a
        .out_dir
        .or_else(|| cfg.out_dir.clone())
        .ok_or_else(|| Error::InvalidArgument("no output directory given".into()))?;
    let go = || run_experiment(&cfg, &out_dir);
    let (report, written) = match a.threads {
        Some(0) => return Err(Error::InvalidArgument("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(go)?,
        None => go()?,
    };
    for algo in report.algorithms() {
        println!("mean_gap[{algo}]={:.1}%", 100.0 * report.mean_gap(algo).unwrap_or_default());
    }
    println!("wrote {} files to {}", written.len(), out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Plot(a) => cmd_plot(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 3 })
        }
    }
}
