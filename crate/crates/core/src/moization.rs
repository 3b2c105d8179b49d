//! Bi-objective view of a single-objective problem: `F(x) = (f1(x), f2(x))`
//! where `f2` is a sphere centered at a fixed point `s`.

use crate::error::{check_dims, Error, Result, Vanished};
use crate::point::Point;
use crate::problems::{eval_sphere, grad_sphere, ScalarProblem};
use crate::scalar::Scalar;

/// Gradients with norm at or below this are treated as vanished.
pub const DEFAULT_EPS_GRAD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectivePair<T> {
    pub f1: T,
    pub f2: T,
}

impl<T: Scalar> ObjectivePair<T> {
    pub fn new(f1: T, f2: T) -> Self {
        ObjectivePair { f1, f2 }
    }

    pub fn is_finite(&self) -> bool {
        self.f1.is_finite() && self.f2.is_finite()
    }
}

#[derive(Debug, Clone)]
pub struct BiObjectiveProblem<T> {
    f1: ScalarProblem<T>,
    center: Point<T>,
}

/// Pairs `f1` with the sphere helper centered at `s`.
pub fn make_biobjective<T: Scalar>(f1: ScalarProblem<T>, s: Point<T>) -> Result<BiObjectiveProblem<T>> {
    f1.bounds().require(&s)?;
    Ok(BiObjectiveProblem { f1, center: s })
}

impl<T: Scalar> BiObjectiveProblem<T> {
    pub fn f1(&self) -> &ScalarProblem<T> {
        &self.f1
    }

    pub fn sphere_center(&self) -> &Point<T> {
        &self.center
    }

    pub fn dimension(&self) -> usize {
        self.center.dim()
    }

    pub fn eval_f1(&self, x: &[T]) -> T {
        self.f1.eval(x)
    }

    pub fn eval_f2(&self, x: &[T]) -> T {
        eval_sphere(x, &self.center).expect("dimension checked at construction")
    }

    pub fn evaluate_pair(&self, x: &[T]) -> ObjectivePair<T> {
        ObjectivePair::new(self.eval_f1(x), self.eval_f2(x))
    }

    pub fn grad_f1(&self, x: &[T]) -> Point<T> {
        self.f1.gradient(x)
    }

    /// Always the closed form `2 (x - s)`.
    pub fn grad_f2(&self, x: &[T]) -> Point<T> {
        grad_sphere(x, &self.center).expect("dimension checked at construction")
    }

    /// Sum of the normalized objective gradients at `x`.
    pub fn mo_gradient(&self, x: &[T]) -> Result<Point<T>> {
        check_dims(self.dimension(), x.len())?;
        mo_gradient_from(&self.grad_f1(x), &self.grad_f2(x), T::lit(DEFAULT_EPS_GRAD))
    }
}

/// `g1 / |g1| + g2 / |g2|`, failing when either norm is at most `eps`.
pub fn mo_gradient_from<T: Scalar>(g1: &Point<T>, g2: &Point<T>, eps: T) -> Result<Point<T>> {
    check_dims(g1.dim(), g2.dim())?;
    let (n1, n2) = (g1.norm(), g2.norm());
    match (n1 <= eps, n2 <= eps) {
        (true, true) => Err(Error::DegenerateGradient(Vanished::Both)),
        (true, false) => Err(Error::DegenerateGradient(Vanished::F1)),
        (false, true) => Err(Error::DegenerateGradient(Vanished::F2)),
        (false, false) => Ok(g1.scaled(T::one() / n1).add(&g2.scaled(T::one() / n2))),
    }
}

/// Angle between `u` and `v` in degrees, in `[0, 180]`.
pub fn angle_deg<T: Scalar>(u: &[T], v: &[T]) -> Result<T> {
    check_dims(u.len(), v.len())?;
    let (u, v) = (Point::from(u.to_vec()), Point::from(v.to_vec()));
    let (nu, nv) = (u.norm(), v.norm());
    if nu <= T::zero() || nv <= T::zero() {
        let which = match (nu <= T::zero(), nv <= T::zero()) {
            (true, true) => Vanished::Both,
            (true, false) => Vanished::F1,
            _ => Vanished::F2,
        };
        return Err(Error::DegenerateGradient(which));
    }
    let cos = (u.dot(&v) / (nu * nv)).max(-T::one()).min(T::one());
    Ok(cos.acos().to_degrees())
}

/// Pareto dominance for minimization: no worse in both, strictly better in one.
pub fn dominates<T: PartialOrd>(a: &ObjectivePair<T>, b: &ObjectivePair<T>) -> bool {
    a.f1 <= b.f1 && a.f2 <= b.f2 && (a.f1 < b.f1 || a.f2 < b.f2)
}

/// `|v1 g1 + v2 g2|` for a convex weight pair `(v1, v2)`.
pub fn fritz_john_residual<T: Scalar>(g1: &[T], g2: &[T], weights: (T, T)) -> Result<T> {
    check_dims(g1.len(), g2.len())?;
    let (v1, v2) = weights;
    let tol = T::lit(1e-12);
    if !(v1 >= T::zero() && v2 >= T::zero()) || (v1 + v2 - T::one()).abs() > tol {
        return Err(Error::invalid("Fritz John weights must be non-negative and sum to one"));
    }
    let combo: Vec<T> = g1.iter().zip(g2).map(|(&a, &b)| v1 * a + v2 * b).collect();
    Ok(Point::from(combo).norm())
}
