//! SO-MOGSA: multi-objective gradient descent onto a locally efficient set,
//! refinement of `f1` by gradient descent, then sliding along the helper
//! sphere's descent direction until a ridge is crossed. Repeats until the
//! sphere center is reached and archives every accepted point.

use crate::baseline::{gradient_descent_f1, GradientDescentConfig};
use crate::error::{Error, Result};
use crate::moization::{angle_deg, BiObjectiveProblem, DEFAULT_EPS_GRAD};
use crate::point::Point;
use crate::scalar::Scalar;
use crate::trace::{EvalCount, Phase, SearchTrace, Termination};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SomogsaConfig<T> {
    /// Angle between the objective gradients (degrees) at which MO descent
    /// hands over to the local search.
    pub t_angle: T,
    pub sigma_mo: T,
    pub sigma_so: T,
    pub eps_grad: T,
    /// Distance to the sphere center that counts as having reached it.
    pub eps_f2opt: T,
    pub max_outer: usize,
    /// Step cap for each individual phase.
    pub max_inner: usize,
    pub local_search: GradientDescentConfig<T>,
}

impl<T: Scalar> Default for SomogsaConfig<T> {
    fn default() -> Self {
        SomogsaConfig {
            t_angle: T::lit(170.0),
            sigma_mo: T::lit(0.01),
            sigma_so: T::lit(0.01),
            eps_grad: T::lit(DEFAULT_EPS_GRAD),
            eps_f2opt: T::lit(1e-3),
            max_outer: 1000,
            max_inner: 100_000,
            local_search: GradientDescentConfig::default(),
        }
    }
}

impl<T: Scalar> SomogsaConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let zero = T::zero();
        if !(self.t_angle >= zero && self.t_angle <= T::lit(180.0)) {
            return Err(Error::invalid("t_angle must lie in [0, 180]"));
        }
        if !(self.sigma_mo > zero && self.sigma_so > zero && self.eps_grad > zero && self.eps_f2opt > zero) {
            return Err(Error::invalid("step sizes and tolerances must be positive"));
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(Error::invalid("iteration caps must be positive"));
        }
        self.local_search.validate()
    }
}

/// Failure of a run. Non-finite values keep the trace gathered so far.
#[derive(Debug, thiserror::Error)]
pub enum RunError<T: Scalar> {
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("non-finite objective value at {at:?} after {} trace entries", trace.len())]
    NonFinite { at: Vec<f64>, trace: SearchTrace<T> },
}

impl<T: Scalar> RunError<T> {
    pub fn is_usage(&self) -> bool {
        matches!(self, RunError::Invalid(e) if e.is_usage())
    }
}

enum PhaseEnd {
    Done,
    /// A clamped step failed to move the point.
    Stuck,
    Capped,
}

struct Run<'a, T: Scalar> {
    p: &'a BiObjectiveProblem<T>,
    cfg: &'a SomogsaConfig<T>,
    trace: SearchTrace<T>,
    evals: EvalCount,
}

impl<'a, T: Scalar> Run<'a, T> {
    fn grad_f1(&mut self, x: &Point<T>) -> Point<T> {
        self.evals.grad_f1 += 1;
        self.p.grad_f1(x)
    }

    fn record(&mut self, x: &Point<T>, phase: Phase) -> Result<(), RunError<T>> {
        let f1 = self.p.eval_f1(x);
        self.evals.f1 += 1;
        let f2 = self.p.eval_f2(x);
        if !(f1.is_finite() && f2.is_finite()) {
            return Err(self.non_finite(x));
        }
        self.trace.push(x.clone(), f1, Some(f2), phase);
        Ok(())
    }

    fn non_finite(&mut self, x: &Point<T>) -> RunError<T> {
        let trace = std::mem::replace(&mut self.trace, SearchTrace::start(x.clone(), T::zero(), None));
        RunError::NonFinite {
            at: x.to_f64(),
            trace: trace.finish(Termination::MaxIter, self.evals),
        }
    }

    /// Clamped step; `None` when clamping leaves the point where it was.
    fn step(&self, x: &Point<T>, length: T, direction: &Point<T>) -> Option<Point<T>> {
        let (next, clamped) = self.p.f1().bounds().clamp(&x.step(-length, direction));
        if clamped && &next == x {
            None
        } else {
            Some(next)
        }
    }

    /// Follows the sum of normalized gradients while both gradients are
    /// present and their angle is at most `t_angle`.
    fn mo_descent(&mut self, x: &mut Point<T>) -> Result<PhaseEnd, RunError<T>> {
        let eps = self.cfg.eps_grad;
        for _ in 0..self.cfg.max_inner {
            let g1 = self.grad_f1(x);
            let g2 = self.p.grad_f2(x);
            if !g1.is_finite() {
                return Err(self.non_finite(x));
            }
            let (n1, n2) = (g1.norm(), g2.norm());
            if n1 <= eps || n2 <= eps {
                return Ok(PhaseEnd::Done);
            }
            let angle = angle_deg(&g1, &g2).map_err(RunError::Invalid)?;
            if angle > self.cfg.t_angle {
                return Ok(PhaseEnd::Done);
            }
            let direction = g1.scaled(T::one() / n1).add(&g2.scaled(T::one() / n2));
            match self.step(x, self.cfg.sigma_mo, &direction) {
                Some(next) => *x = next,
                None => return Ok(PhaseEnd::Stuck),
            }
            self.record(x, Phase::MoDescent)?;
        }
        Ok(PhaseEnd::Capped)
    }

    /// Slides toward the sphere center while `f1` keeps opposing `f2`
    /// (angle >= 90) and the helper gradient has not turned around
    /// (angle to the previous helper gradient <= 90). Returns whether the
    /// turn-around fired, i.e. the path crossed the sphere center.
    fn slide(&mut self, x: &mut Point<T>, f1_stationary: bool) -> Result<(PhaseEnd, bool), RunError<T>> {
        let eps = self.cfg.eps_grad;
        let right = T::lit(90.0);
        let mut prev = x.clone();
        let mut at_local_optimum = f1_stationary;
        for _ in 0..self.cfg.max_inner {
            let g2 = self.p.grad_f2(x);
            let n2 = g2.norm();
            if n2 <= eps {
                return Ok((PhaseEnd::Done, true));
            }
            let g2_prev = self.p.grad_f2(&prev);
            let turned = match angle_deg(&g2_prev, &g2) {
                Ok(a) => a > right,
                Err(_) => false,
            };
            if turned {
                return Ok((PhaseEnd::Done, true));
            }
            let opposing = if at_local_optimum {
                // the local-search output is a minimizer of f1; its residual
                // gradient carries no direction
                true
            } else {
                let g1 = self.grad_f1(x);
                if !g1.is_finite() {
                    return Err(self.non_finite(x));
                }
                g1.norm() <= eps || angle_deg(&g1, &g2).map_err(RunError::Invalid)? >= right
            };
            if !opposing {
                return Ok((PhaseEnd::Done, false));
            }
            prev = x.clone();
            match self.step(x, self.cfg.sigma_so, &g2.scaled(T::one() / n2)) {
                Some(next) => *x = next,
                None => return Ok((PhaseEnd::Stuck, false)),
            }
            self.record(x, Phase::SlideF2)?;
            at_local_optimum = false;
        }
        Ok((PhaseEnd::Capped, false))
    }
}

/// Runs SO-MOGSA from `x_s` and returns the archived search path.
pub fn run_somogsa<T: Scalar>(
    p: &BiObjectiveProblem<T>,
    x_s: &Point<T>,
    cfg: &SomogsaConfig<T>,
) -> Result<SearchTrace<T>, RunError<T>> {
    cfg.validate()?;
    p.f1().bounds().require(x_s)?;

    let f1 = p.eval_f1(x_s);
    let f2 = p.eval_f2(x_s);
    let mut run = Run {
        p,
        cfg,
        trace: SearchTrace::start(x_s.clone(), f1, Some(f2)),
        evals: EvalCount { f1: 1, grad_f1: 0 },
    };
    if !(f1.is_finite() && f2.is_finite()) {
        return Err(run.non_finite(x_s));
    }

    let s = p.sphere_center();
    let mut x = x_s.clone();
    let mut last_outer_end: Option<Point<T>> = None;
    let mut outer = 0;

    let termination = loop {
        if x.distance(s) <= cfg.eps_f2opt {
            break Termination::F2OptReached;
        }
        if outer >= cfg.max_outer {
            break Termination::MaxIter;
        }
        outer += 1;

        let mo_end = run.mo_descent(&mut x)?;
        if matches!(mo_end, PhaseEnd::Capped) {
            break Termination::MaxIter;
        }

        let ls = gradient_descent_f1(p.f1(), &x, &cfg.local_search).map_err(|e| match e {
            Error::NonFinite(_) => run.non_finite(&x),
            other => RunError::Invalid(other),
        })?;
        run.evals.absorb(ls.evaluations);
        x = ls.point.clone();
        run.record(&x, Phase::LocalSearchF1)?;

        let (slide_end, crossed_center) = run.slide(&mut x, ls.is_stationary())?;
        if crossed_center {
            break Termination::F2OptReached;
        }
        match slide_end {
            PhaseEnd::Capped => break Termination::MaxIter,
            PhaseEnd::Stuck | PhaseEnd::Done => {}
        }

        if last_outer_end.as_ref() == Some(&x) {
            break Termination::BoxStuck;
        }
        last_outer_end = Some(x.clone());
    };

    let evals = run.evals;
    Ok(run.trace.finish(termination, evals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moization::make_biobjective;
    use crate::point::Bounds;
    use crate::problems::ScalarProblem;
    use crate::trace::best_of_trace;

    fn box5() -> Bounds<f64> {
        Bounds::cube(2, -5.0, 5.0).unwrap()
    }

    fn s() -> Point<f64> {
        Point::from(vec![-3.5, -2.5])
    }

    fn bi_sphere() -> BiObjectiveProblem<f64> {
        let f1 = ScalarProblem::sphere(Point::zeros(2), box5()).unwrap();
        make_biobjective(f1, s()).unwrap()
    }

    #[test]
    fn start_at_center_is_immediately_done() {
        let t = run_somogsa(&bi_sphere(), &s(), &SomogsaConfig::default()).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.first().phase, Phase::Start);
        assert_eq!(t.termination(), Termination::F2OptReached);
    }

    #[test]
    fn bi_sphere_passes_f1_optimum_and_ends_at_center() {
        let t = run_somogsa(&bi_sphere(), &Point::from(vec![4.0, 4.0]), &SomogsaConfig::default()).unwrap();
        assert_eq!(t.termination(), Termination::F2OptReached);
        assert!(t.last().point.distance(&s()) <= 0.01);
        let (_, best) = best_of_trace(&t);
        assert!(best <= 1e-3, "best f1 {best}");
    }

    #[test]
    fn mo_and_slide_steps_have_bounded_length() {
        let cfg = SomogsaConfig::default();
        let t = run_somogsa(&bi_sphere(), &Point::from(vec![4.0, -1.0]), &cfg).unwrap();
        for w in t.entries().windows(2) {
            let d = w[1].point.distance(&w[0].point);
            match w[1].phase {
                Phase::MoDescent => assert!(d <= 2.0 * cfg.sigma_mo + 1e-12),
                Phase::SlideF2 => assert!((d - cfg.sigma_so).abs() < 1e-12),
                _ => {}
            }
        }
    }

    #[test]
    fn rejects_start_outside_box() {
        let err = run_somogsa(&bi_sphere(), &Point::from(vec![6.0, 0.0]), &SomogsaConfig::default()).unwrap_err();
        assert!(err.is_usage());
    }

    #[test]
    fn rejects_bad_angle() {
        let cfg = SomogsaConfig { t_angle: 181.0, ..Default::default() };
        assert!(run_somogsa(&bi_sphere(), &Point::zeros(2), &cfg).unwrap_err().is_usage());
    }

    #[test]
    fn non_finite_objective_aborts_with_trace() {
        let f1 = ScalarProblem::custom("blowup", box5(), |x: &[f64]| if x[0] < 2.0 { f64::NAN } else { x[0] * x[0] });
        let p = make_biobjective(f1, s()).unwrap();
        match run_somogsa(&p, &Point::from(vec![4.0, 0.0]), &SomogsaConfig::default()) {
            Err(RunError::NonFinite { trace, .. }) => {
                assert!(!trace.is_empty());
                assert!(trace.entries().iter().all(|e| e.f1.is_finite()));
            }
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn runs_in_f32() {
        let f1 = ScalarProblem::<f32>::sphere(Point::zeros(2), Bounds::cube(2, -5.0, 5.0).unwrap()).unwrap();
        let p = make_biobjective(f1, Point::from(vec![-3.5f32, -2.5])).unwrap();
        let cfg = SomogsaConfig::<f32> {
            eps_grad: 1e-6,
            local_search: GradientDescentConfig { tol_grad: 1e-4, ..Default::default() },
            ..Default::default()
        };
        let t = run_somogsa(&p, &Point::from(vec![4.0f32, 4.0]), &cfg).unwrap();
        assert!(t.last().point.distance(p.sphere_center()) <= 0.011);
    }
}
