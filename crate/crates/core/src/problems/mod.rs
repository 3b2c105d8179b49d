//! Single-objective test problems and their gradients.
//!
//! Every problem is a pure, immutable description; evaluation and gradients
//! may run concurrently from any number of threads.

mod finite_diff;
mod gallagher;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use finite_diff::{finite_diff_grad, relative_step, FdGradient, DEFAULT_FD_STEP};
pub use gallagher::{build_gallagher, eval_gallagher, grad_gallagher, GallagherSpec};

use crate::error::{check_dims, Error, Result};
use crate::point::{Bounds, Point};
use crate::scalar::Scalar;

/// How a problem supplies gradients to the optimizers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientKind {
    Analytic,
    FiniteDifference,
}

pub type Evaluator<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

#[derive(Clone)]
pub enum Landscape<T> {
    Sphere { center: Point<T> },
    Rastrigin,
    Gallagher(GallagherSpec<T>),
    /// Arbitrary black-box function; gradients come from finite differences.
    Custom(Evaluator<T>),
}

impl<T: fmt::Debug> fmt::Debug for Landscape<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Landscape::Sphere { center } => f.debug_struct("Sphere").field("center", center).finish(),
            Landscape::Rastrigin => f.write_str("Rastrigin"),
            Landscape::Gallagher(spec) => f.debug_tuple("Gallagher").field(spec).finish(),
            Landscape::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A box-constrained single-objective minimization problem.
#[derive(Debug, Clone)]
pub struct ScalarProblem<T> {
    name: String,
    bounds: Bounds<T>,
    landscape: Landscape<T>,
    gradient_kind: GradientKind,
    known_optimum: Option<(Point<T>, T)>,
}

impl<T: Scalar> ScalarProblem<T> {
    pub fn sphere(center: Point<T>, bounds: Bounds<T>) -> Result<Self> {
        check_dims(bounds.dim(), center.dim())?;
        Ok(ScalarProblem {
            name: "sphere".into(),
            known_optimum: Some((center.clone(), T::zero())),
            landscape: Landscape::Sphere { center },
            bounds,
            gradient_kind: GradientKind::Analytic,
        })
    }

    pub fn rastrigin(bounds: Bounds<T>) -> Self {
        let dim = bounds.dim();
        ScalarProblem {
            name: "rastrigin".into(),
            bounds,
            landscape: Landscape::Rastrigin,
            gradient_kind: GradientKind::Analytic,
            known_optimum: Some((Point::zeros(dim), T::zero())),
        }
    }

    pub fn gallagher(spec: GallagherSpec<T>, bounds: Bounds<T>) -> Result<Self> {
        check_dims(bounds.dim(), spec.dim())?;
        let best = spec.best_peak();
        Ok(ScalarProblem {
            name: format!("gallagher{}:{}", spec.num_peaks(), spec.seed()),
            known_optimum: Some((spec.centers()[best].clone(), T::zero())),
            landscape: Landscape::Gallagher(spec),
            bounds,
            gradient_kind: GradientKind::Analytic,
        })
    }

    /// Wraps a black-box function. Gradients are approximated numerically.
    pub fn custom(
        name: impl Into<String>,
        bounds: Bounds<T>,
        f: impl Fn(&[T]) -> T + Send + Sync + 'static,
    ) -> Self {
        ScalarProblem {
            name: name.into(),
            bounds,
            landscape: Landscape::Custom(Arc::new(f)),
            gradient_kind: GradientKind::FiniteDifference,
            known_optimum: None,
        }
    }

    pub fn with_known_optimum(mut self, x: Point<T>, value: T) -> Self {
        self.known_optimum = Some((x, value));
        self
    }

    /// Forces gradients through central finite differences (black-box mode).
    pub fn with_finite_differences(mut self) -> Self {
        self.gradient_kind = GradientKind::FiniteDifference;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.bounds.dim()
    }

    pub fn bounds(&self) -> &Bounds<T> {
        &self.bounds
    }

    pub fn landscape(&self) -> &Landscape<T> {
        &self.landscape
    }

    pub fn gradient_kind(&self) -> GradientKind {
        self.gradient_kind
    }

    pub fn known_optimum(&self) -> Option<(&Point<T>, T)> {
        self.known_optimum.as_ref().map(|(x, v)| (x, *v))
    }

    /// Evaluates the objective. `x` must have the problem's dimension.
    pub fn eval(&self, x: &[T]) -> T {
        debug_assert_eq!(x.len(), self.dimension());
        match &self.landscape {
            Landscape::Sphere { center } => sphere_unchecked(x, center),
            Landscape::Rastrigin => eval_rastrigin(x),
            Landscape::Gallagher(spec) => eval_gallagher(spec, x),
            Landscape::Custom(f) => f(x),
        }
    }

    /// Closed-form gradient, if the landscape has one.
    pub fn analytic_gradient(&self, x: &[T]) -> Option<Point<T>> {
        match &self.landscape {
            Landscape::Sphere { center } => Some(sphere_grad_unchecked(x, center)),
            Landscape::Rastrigin => Some(grad_rastrigin(x)),
            Landscape::Gallagher(spec) => Some(grad_gallagher(spec, x)),
            Landscape::Custom(_) => None,
        }
    }

    /// Gradient according to the problem's [`GradientKind`].
    pub fn gradient(&self, x: &[T]) -> Point<T> {
        match (self.gradient_kind, self.analytic_gradient(x)) {
            (GradientKind::Analytic, Some(g)) => g,
            _ => finite_diff_grad(self, x, T::lit(DEFAULT_FD_STEP)).gradient,
        }
    }
}

fn sphere_unchecked<T: Scalar>(x: &[T], s: &[T]) -> T {
    x.iter()
        .zip(s)
        .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
}

fn sphere_grad_unchecked<T: Scalar>(x: &[T], s: &[T]) -> Point<T> {
    let two = T::lit(2.0);
    Point::from(x.iter().zip(s).map(|(&a, &b)| two * (a - b)).collect::<Vec<_>>())
}

/// `sum_i (x_i - s_i)^2`
pub fn eval_sphere<T: Scalar>(x: &[T], s: &[T]) -> Result<T> {
    check_dims(s.len(), x.len())?;
    Ok(sphere_unchecked(x, s))
}

/// Componentwise `2 (x_i - s_i)`.
pub fn grad_sphere<T: Scalar>(x: &[T], s: &[T]) -> Result<Point<T>> {
    check_dims(s.len(), x.len())?;
    Ok(sphere_grad_unchecked(x, s))
}

/// `10 n + sum_i (x_i^2 - 10 cos(2 pi x_i))`
pub fn eval_rastrigin<T: Scalar>(x: &[T]) -> T {
    let ten = T::lit(10.0);
    let two_pi = T::TAU();
    x.iter().fold(ten * T::of_usize(x.len()), |acc, &xi| {
        acc + xi * xi - ten * (two_pi * xi).cos()
    })
}

/// Componentwise `2 x_i + 20 pi sin(2 pi x_i)`.
pub fn grad_rastrigin<T: Scalar>(x: &[T]) -> Point<T> {
    let two = T::lit(2.0);
    let twenty_pi = T::lit(20.0) * T::PI();
    let two_pi = T::TAU();
    Point::from(
        x.iter()
            .map(|&xi| two * xi + twenty_pi * (two_pi * xi).sin())
            .collect::<Vec<_>>(),
    )
}

/// String identifier of a built-in problem, as used on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemId {
    Sphere,
    Rastrigin,
    Gallagher { peaks: usize, seed: u64 },
}

impl ProblemId {
    /// Instantiates the problem on the default `[-5, 5]^dim` box.
    pub fn build<T: Scalar>(&self, dim: usize) -> Result<ScalarProblem<T>> {
        let bounds = Bounds::cube(dim, -5.0, 5.0)?;
        match *self {
            ProblemId::Sphere => ScalarProblem::sphere(Point::zeros(dim), bounds),
            ProblemId::Rastrigin => Ok(ScalarProblem::rastrigin(bounds)),
            ProblemId::Gallagher { peaks, seed } => build_gallagher(peaks, seed, bounds),
        }
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "sphere" => return Ok(ProblemId::Sphere),
            "rastrigin" => return Ok(ProblemId::Rastrigin),
            _ => {}
        }
        let (head, seed) = s
            .split_once(':')
            .ok_or_else(|| Error::UnknownProblem(s.to_string()))?;
        let peaks = match head {
            "gallagher21" => 21,
            "gallagher101" => 101,
            _ => return Err(Error::UnknownProblem(s.to_string())),
        };
        let seed = seed
            .parse()
            .map_err(|_| Error::UnknownProblem(s.to_string()))?;
        Ok(ProblemId::Gallagher { peaks, seed })
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemId::Sphere => f.write_str("sphere"),
            ProblemId::Rastrigin => f.write_str("rastrigin"),
            ProblemId::Gallagher { peaks, seed } => write!(f, "gallagher{peaks}:{seed}"),
        }
    }
}
