use crate::error::{Error, Result};
use crate::point::Point;
use crate::problems::ScalarProblem;
use crate::scalar::Scalar;
use crate::trace::EvalCount;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientDescentConfig<T> {
    /// Length of a full normalized step; also the cap when steps grow back.
    pub step: T,
    pub tol_grad: T,
    pub max_steps: usize,
    pub backtracking: bool,
}

impl<T: Scalar> Default for GradientDescentConfig<T> {
    fn default() -> Self {
        GradientDescentConfig {
            step: T::lit(0.05),
            tol_grad: T::lit(1e-6),
            max_steps: 100_000,
            backtracking: true,
        }
    }
}

impl<T: Scalar> GradientDescentConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > T::zero() && self.tol_grad > T::zero() && self.max_steps > 0) {
            return Err(Error::invalid("gradient descent step, tolerance and step cap must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescentStatus {
    /// Gradient norm reached the tolerance.
    Converged,
    /// No representable step decreases `f` any further.
    Stalled,
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Descent<T> {
    pub point: Point<T>,
    pub value: T,
    pub grad_norm: T,
    pub steps: usize,
    pub status: DescentStatus,
    pub evaluations: EvalCount,
}

impl<T> Descent<T> {
    /// True unless the step cap cut the descent short.
    pub fn is_stationary(&self) -> bool {
        self.status != DescentStatus::MaxSteps
    }
}

/// Normalized-gradient descent on `f`, clamped to the box.
///
/// With backtracking, a trial step is halved until it lowers `f`; when `f` is
/// flat at machine precision a step that lowers the gradient norm is accepted
/// instead. The accepted step length doubles back toward `cfg.step` after
/// every success.
pub fn gradient_descent_f1<T: Scalar>(
    f: &ScalarProblem<T>,
    x: &Point<T>,
    cfg: &GradientDescentConfig<T>,
) -> Result<Descent<T>> {
    cfg.validate()?;
    f.bounds().require(x)?;
    let bounds = f.bounds();
    let mut evals = EvalCount::default();

    let mut x = x.clone();
    let mut fx = f.eval(&x);
    let mut g = f.gradient(&x);
    evals.f1 += 1;
    evals.grad_f1 += 1;
    if !fx.is_finite() || !g.is_finite() {
        return Err(Error::NonFinite(format!("f1 or its gradient at {:?}", x.to_f64())));
    }

    let mut best = (x.clone(), fx, g.norm());
    let mut t = cfg.step;
    let mut steps = 0;
    let two = T::lit(2.0);

    let status = loop {
        let gn = g.norm();
        if gn <= cfg.tol_grad {
            break DescentStatus::Converged;
        }
        if steps >= cfg.max_steps {
            break DescentStatus::MaxSteps;
        }
        let dir = g.scaled(T::one() / gn);
        let min_step = T::epsilon() * x.iter().fold(T::one(), |m, &v| m.max(v.abs()));

        let accepted = loop {
            let (trial, _) = bounds.clamp(&x.step(-t, &dir));
            if trial == x {
                break None;
            }
            let ft = f.eval(&trial);
            evals.f1 += 1;
            if !ft.is_finite() {
                return Err(Error::NonFinite(format!("f1 at {:?}", trial.to_f64())));
            }
            if !cfg.backtracking {
                let gt = f.gradient(&trial);
                evals.grad_f1 += 1;
                break Some((trial, ft, gt));
            }
            if ft < fx {
                let gt = f.gradient(&trial);
                evals.grad_f1 += 1;
                break Some((trial, ft, gt));
            }
            if ft == fx {
                let gt = f.gradient(&trial);
                evals.grad_f1 += 1;
                if gt.norm() < gn {
                    break Some((trial, ft, gt));
                }
            }
            t = t / two;
            if t < min_step {
                break None;
            }
        };

        match accepted {
            Some((nx, nf, ng)) => {
                x = nx;
                fx = nf;
                g = ng;
                steps += 1;
                if fx < best.1 || (fx == best.1 && g.norm() < best.2) {
                    best = (x.clone(), fx, g.norm());
                }
                if cfg.backtracking {
                    t = (t * two).min(cfg.step);
                }
            }
            None => break DescentStatus::Stalled,
        }
    };

    let (point, value, grad_norm) = if cfg.backtracking { (x, fx, g.norm()) } else { best };
    Ok(Descent {
        point,
        value,
        grad_norm,
        steps,
        status,
        evaluations: evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::Bounds;

    fn box5() -> Bounds<f64> {
        Bounds::cube(2, -5.0, 5.0).unwrap()
    }

    #[test]
    fn sphere_converges_to_center() {
        let f = ScalarProblem::sphere(Point::zeros(2), box5()).unwrap();
        let d = gradient_descent_f1(&f, &Point::from(vec![1.0, 0.0]), &GradientDescentConfig::default()).unwrap();
        assert_eq!(d.status, DescentStatus::Converged);
        assert!(d.point.norm() < 1e-6);
        assert!(d.grad_norm <= 1e-6);
    }

    #[test]
    fn rastrigin_inside_global_basin() {
        let f = ScalarProblem::rastrigin(box5());
        let d = gradient_descent_f1(&f, &Point::from(vec![0.2, 0.1]), &GradientDescentConfig::default()).unwrap();
        assert!(d.point.norm() < 1e-6, "{:?}", d.point);
        assert!(d.value < 1e-9);
    }

    #[test]
    fn stationary_start_is_returned_unchanged() {
        let f = ScalarProblem::sphere(Point::zeros(2), box5()).unwrap();
        let x = Point::from(vec![1e-9, 0.0]);
        let d = gradient_descent_f1(&f, &x, &GradientDescentConfig::default()).unwrap();
        assert_eq!(d.point, x);
        assert_eq!(d.steps, 0);
    }

    #[test]
    fn never_worsens_and_without_backtracking_returns_best() {
        let f = ScalarProblem::rastrigin(box5());
        let x = Point::from(vec![2.3, -1.6]);
        let fx = f.eval(&x);
        for backtracking in [true, false] {
            let cfg = GradientDescentConfig { backtracking, max_steps: 500, ..Default::default() };
            let d = gradient_descent_f1(&f, &x, &cfg).unwrap();
            assert!(d.value <= fx);
        }
    }

    #[test]
    fn rejects_bad_config_and_start() {
        let f = ScalarProblem::rastrigin(box5());
        let cfg = GradientDescentConfig { step: 0.0, ..Default::default() };
        assert!(gradient_descent_f1(&f, &Point::from(vec![0.0, 0.0]), &cfg).unwrap_err().is_usage());
        let err = gradient_descent_f1(&f, &Point::from(vec![9.0, 0.0]), &Default::default()).unwrap_err();
        assert!(err.is_usage());
    }

    #[test]
    fn stops_on_box_face_when_gradient_points_out() {
        // minimizer (7, 0) lies outside the box; the face point is a box-KKT point
        let f = ScalarProblem::sphere(Point::from(vec![7.0f64, 0.0]), Bounds::cube(2, -5.0, 5.0).unwrap()).unwrap();
        let d = gradient_descent_f1(&f, &Point::from(vec![4.0, 1.0]), &GradientDescentConfig::default()).unwrap();
        assert!((d.point[0] - 5.0).abs() < 1e-12);
        assert!(d.point[1].abs() < 1e-3);
        assert_ne!(d.status, DescentStatus::MaxSteps);
    }
}
