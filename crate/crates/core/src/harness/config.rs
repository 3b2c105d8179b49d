use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use super::starts::sample_starts;
use crate::error::{Error, Result};
use crate::landscape::DEFAULT_TAU;
use crate::problems::ProblemId;
use crate::{GradientDescentConfig, NelderMeadConfig, Point, ScalarProblem, SomogsaConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Somogsa,
    NelderMead,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Somogsa => "somogsa",
            Algorithm::NelderMead => "nelder-mead",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "somogsa" => Ok(Algorithm::Somogsa),
            "nelder-mead" => Ok(Algorithm::NelderMead),
            other => Err(Error::invalid(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Where the start points come from.
#[derive(Debug, Clone, PartialEq)]
pub enum StartSpec {
    Explicit(Vec<Point>),
    Sampled { count: usize, seed: u64, exclusion_radius: f64 },
}

impl Default for StartSpec {
    fn default() -> Self {
        StartSpec::Sampled { count: 6, seed: 1, exclusion_radius: 0.5 }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: ProblemId,
    pub dimension: usize,
    pub sphere_center: Point,
    pub starts: StartSpec,
    pub algorithms: Vec<Algorithm>,
    pub somogsa: SomogsaConfig,
    pub nelder_mead: NelderMeadConfig,
    pub resolution: [usize; 2],
    pub tau: f64,
    pub pixels_per_cell: u32,
    pub images: bool,
    /// 1-based start ids that get an objective-space image.
    pub objective_space_starts: Vec<usize>,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            problem: ProblemId::Rastrigin,
            dimension: 2,
            sphere_center: Point::from(vec![-3.5, -2.5]),
            starts: StartSpec::default(),
            algorithms: vec![Algorithm::Somogsa, Algorithm::NelderMead],
            somogsa: SomogsaConfig::default(),
            nelder_mead: NelderMeadConfig::default(),
            resolution: [100, 100],
            tau: DEFAULT_TAU,
            pixels_per_cell: 4,
            images: true,
            objective_space_starts: Vec::new(),
            out_dir: None,
        }
    }
}

/// On-disk form: flat TOML keys, all optional except `problem`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    problem: String,
    dimension: Option<usize>,
    sphere_center: Option<Vec<f64>>,
    starts: Option<Vec<Vec<f64>>>,
    start_count: Option<usize>,
    start_seed: Option<u64>,
    exclusion_radius: Option<f64>,
    algorithms: Option<Vec<String>>,
    t_angle: Option<f64>,
    sigma_mo: Option<f64>,
    sigma_so: Option<f64>,
    eps_grad: Option<f64>,
    eps_f2opt: Option<f64>,
    max_outer: Option<usize>,
    max_inner: Option<usize>,
    gd_step: Option<f64>,
    gd_tol_grad: Option<f64>,
    gd_max_steps: Option<usize>,
    nm_simplex_scale: Option<f64>,
    nm_max_evals: Option<usize>,
    nm_tol_simplex: Option<f64>,
    nm_tol_f: Option<f64>,
    resolution: Option<[usize; 2]>,
    tau: Option<f64>,
    pixels_per_cell: Option<u32>,
    images: Option<bool>,
    objective_space_starts: Option<Vec<usize>>,
    out_dir: Option<PathBuf>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut cfg = ExperimentConfig {
            problem: file.problem.parse()?,
            ..ExperimentConfig::default()
        };
        set(&mut cfg.dimension, file.dimension);
        if let Some(c) = file.sphere_center {
            cfg.sphere_center = Point::new(c)?;
        }
        match (file.starts, file.start_count.is_some() || file.start_seed.is_some()) {
            (Some(_), true) => return Err(Error::Config("give either `starts` or `start_count`/`start_seed`".into())),
            (Some(list), false) => {
                cfg.starts = StartSpec::Explicit(list.into_iter().map(Point::new).collect::<Result<_>>()?);
            }
            (None, _) => {
                let d = StartSpec::default();
                let StartSpec::Sampled { count, seed, exclusion_radius } = d else { unreachable!() };
                cfg.starts = StartSpec::Sampled {
                    count: file.start_count.unwrap_or(count),
                    seed: file.start_seed.unwrap_or(seed),
                    exclusion_radius: file.exclusion_radius.unwrap_or(exclusion_radius),
                };
            }
        }
        if let Some(list) = file.algorithms {
            cfg.algorithms = list.iter().map(|a| a.parse()).collect::<Result<_>>()?;
        }
        let so = &mut cfg.somogsa;
        set(&mut so.t_angle, file.t_angle);
        set(&mut so.sigma_mo, file.sigma_mo);
        set(&mut so.sigma_so, file.sigma_so);
        set(&mut so.eps_grad, file.eps_grad);
        set(&mut so.eps_f2opt, file.eps_f2opt);
        set(&mut so.max_outer, file.max_outer);
        set(&mut so.max_inner, file.max_inner);
        let gd: &mut GradientDescentConfig = &mut so.local_search;
        set(&mut gd.step, file.gd_step);
        set(&mut gd.tol_grad, file.gd_tol_grad);
        set(&mut gd.max_steps, file.gd_max_steps);
        let nm = &mut cfg.nelder_mead;
        set(&mut nm.initial_simplex_scale, file.nm_simplex_scale);
        set(&mut nm.max_evals, file.nm_max_evals);
        set(&mut nm.tol_simplex_diameter, file.nm_tol_simplex);
        set(&mut nm.tol_f_spread, file.nm_tol_f);
        set(&mut cfg.resolution, file.resolution);
        set(&mut cfg.tau, file.tau);
        set(&mut cfg.pixels_per_cell, file.pixels_per_cell);
        set(&mut cfg.images, file.images);
        set(&mut cfg.objective_space_starts, file.objective_space_starts);
        cfg.out_dir = file.out_dir;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn build_problem(&self) -> Result<ScalarProblem> {
        self.problem.build(self.dimension)
    }

    /// Checks parameters and resolves the start points.
    pub fn resolve_starts(&self, f1: &ScalarProblem) -> Result<Vec<Point>> {
        self.somogsa.validate()?;
        self.nelder_mead.validate()?;
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms selected".into()));
        }
        f1.bounds().require(&self.sphere_center)?;
        if self.images && self.dimension != 2 {
            return Err(Error::Config("images need a two-dimensional problem".into()));
        }
        if !(self.tau > 0.0) || self.resolution.iter().any(|&r| r < 2) || self.pixels_per_cell == 0 {
            return Err(Error::Config("tau, resolution and pixels_per_cell must be positive".into()));
        }
        let starts = match &self.starts {
            StartSpec::Explicit(list) => list.clone(),
            &StartSpec::Sampled { count, seed, exclusion_radius } => sample_starts(
                f1.bounds(),
                count,
                seed,
                f1.known_optimum().map(|(x, _)| x),
                exclusion_radius,
            )?,
        };
        if starts.is_empty() {
            return Err(Error::Config("at least one start point is required".into()));
        }
        for x in &starts {
            f1.bounds().require(x)?;
        }
        if let Some(&k) = self.objective_space_starts.iter().find(|&&k| k == 0 || k > starts.len()) {
            return Err(Error::Config(format!("objective_space_starts: no start with id {k}")));
        }
        Ok(starts)
    }
}
