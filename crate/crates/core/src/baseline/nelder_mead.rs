use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::point::Point;
use crate::problems::ScalarProblem;
use crate::scalar::Scalar;
use crate::trace::{EvalCount, Phase, SearchTrace, Termination};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadConfig<T> {
    pub initial_simplex_scale: T,
    pub reflection: T,
    pub expansion: T,
    pub contraction: T,
    pub shrink: T,
    pub tol_simplex_diameter: T,
    pub tol_f_spread: T,
    pub max_evals: usize,
}

impl<T: Scalar> Default for NelderMeadConfig<T> {
    fn default() -> Self {
        NelderMeadConfig {
            initial_simplex_scale: T::lit(0.1),
            reflection: T::lit(1.0),
            expansion: T::lit(2.0),
            contraction: T::lit(0.5),
            shrink: T::lit(0.5),
            tol_simplex_diameter: T::lit(1e-8),
            tol_f_spread: T::lit(1e-14),
            max_evals: 10_000,
        }
    }
}

impl<T: Scalar> NelderMeadConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let (zero, one) = (T::zero(), T::one());
        let ok = self.initial_simplex_scale > zero
            && self.reflection > zero
            && self.expansion > one
            && self.contraction > zero
            && self.contraction < one
            && self.shrink > zero
            && self.shrink < one
            && self.tol_simplex_diameter > zero
            && self.tol_f_spread > zero
            && self.max_evals > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("invalid Nelder-Mead coefficients"))
        }
    }
}

struct Vertex<T> {
    x: Point<T>,
    f: T,
}

struct Simplex<'a, T> {
    f: &'a ScalarProblem<T>,
    vertices: Vec<Vertex<T>>,
    evals: u64,
}

impl<'a, T: Scalar> Simplex<'a, T> {
    fn vertex(&mut self, x: Point<T>) -> Result<Vertex<T>> {
        let (x, _) = self.f.bounds().clamp(&x);
        let f = self.f.eval(&x);
        self.evals += 1;
        if !f.is_finite() {
            return Err(Error::NonFinite(format!("f at {:?}", x.to_f64())));
        }
        Ok(Vertex { x, f })
    }

    fn sort(&mut self) {
        self.vertices
            .sort_by(|a, b| a.f.partial_cmp(&b.f).unwrap_or(Ordering::Equal));
    }

    fn centroid(&self) -> Point<T> {
        let n = self.vertices.len() - 1;
        let mut c = Point::zeros(self.vertices[0].x.dim());
        for v in &self.vertices[..n] {
            c = c.add(&v.x);
        }
        c.scaled(T::one() / T::of_usize(n))
    }

    fn diameter(&self) -> T {
        let best = &self.vertices[0].x;
        self.vertices[1..]
            .iter()
            .map(|v| v.x.distance(best))
            .fold(T::zero(), T::max)
    }
}

/// Nelder-Mead simplex search from `x_s`, clamping every vertex to the box.
///
/// The trace records the start and each strict improvement of the best vertex.
pub fn nelder_mead<T: Scalar>(
    f: &ScalarProblem<T>,
    x_s: &Point<T>,
    cfg: &NelderMeadConfig<T>,
) -> Result<SearchTrace<T>> {
    cfg.validate()?;
    f.bounds().require(x_s)?;
    let n = x_s.dim();
    let mut s = Simplex {
        f,
        vertices: Vec::with_capacity(n + 1),
        evals: 0,
    };

    let v0 = s.vertex(x_s.clone())?;
    let mut trace = SearchTrace::start(v0.x.clone(), v0.f, None);
    s.vertices.push(v0);
    for i in 0..n {
        let mut offset = Point::zeros(n).into_vec();
        offset[i] = cfg.initial_simplex_scale;
        let up = x_s.add(&Point::from(offset.clone()));
        let x = if f.bounds().contains(&up) {
            up
        } else {
            offset[i] = -cfg.initial_simplex_scale;
            x_s.add(&Point::from(offset))
        };
        let v = s.vertex(x)?;
        s.vertices.push(v);
    }
    s.sort();
    let mut best_f = trace.first().f1;
    if s.vertices[0].f < best_f {
        best_f = s.vertices[0].f;
        trace.push(s.vertices[0].x.clone(), best_f, None, Phase::LocalSearchF1);
    }

    let termination = loop {
        let spread = s.vertices[n].f - s.vertices[0].f;
        if s.diameter() <= cfg.tol_simplex_diameter || spread <= cfg.tol_f_spread {
            break Termination::Converged;
        }
        if s.evals >= cfg.max_evals as u64 {
            break Termination::MaxIter;
        }

        let c = s.centroid();
        let worst_x = s.vertices[n].x.clone();
        let worst_f = s.vertices[n].f;
        let toward = |coef: T, from: &Point<T>| c.step(coef, &c.sub(from));

        let xr = s.vertex(toward(cfg.reflection, &worst_x))?;
        let replacement = if xr.f < s.vertices[0].f {
            let xe = s.vertex(toward(cfg.reflection * cfg.expansion, &worst_x))?;
            Some(if xe.f < xr.f { xe } else { xr })
        } else if xr.f < s.vertices[n - 1].f {
            Some(xr)
        } else if xr.f < worst_f {
            let xc = s.vertex(toward(cfg.reflection * cfg.contraction, &worst_x))?;
            if xc.f <= xr.f {
                Some(xc)
            } else {
                None
            }
        } else {
            let xc = s.vertex(toward(-cfg.contraction, &worst_x))?;
            if xc.f < worst_f {
                Some(xc)
            } else {
                None
            }
        };

        match replacement {
            Some(v) => s.vertices[n] = v,
            None => {
                let best = s.vertices[0].x.clone();
                for i in 1..=n {
                    let x = best.step(cfg.shrink, &s.vertices[i].x.sub(&best));
                    s.vertices[i] = s.vertex(x)?;
                }
            }
        }
        s.sort();
        if s.vertices[0].f < best_f {
            best_f = s.vertices[0].f;
            trace.push(s.vertices[0].x.clone(), best_f, None, Phase::LocalSearchF1);
        }
    };

    Ok(trace.finish(
        termination,
        EvalCount {
            f1: s.evals,
            grad_f1: 0,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::Bounds;

    fn box5() -> Bounds<f64> {
        Bounds::cube(2, -5.0, 5.0).unwrap()
    }

    #[test]
    fn sphere_converges() {
        let f = ScalarProblem::sphere(Point::zeros(2), box5()).unwrap();
        let t = nelder_mead(&f, &Point::from(vec![3.0, 3.0]), &NelderMeadConfig::default()).unwrap();
        assert_eq!(t.termination(), Termination::Converged);
        assert!(t.last().point.norm() < 1e-6, "{:?}", t.last().point);
    }

    #[test]
    fn best_vertex_value_is_monotone() {
        let f = ScalarProblem::rastrigin(box5());
        let t = nelder_mead(&f, &Point::from(vec![2.2, 1.9]), &NelderMeadConfig::default()).unwrap();
        for w in t.entries().windows(2) {
            assert!(w[1].f1 < w[0].f1);
        }
    }

    #[test]
    fn tiny_simplex_at_optimum_does_not_worsen() {
        let f = ScalarProblem::rastrigin(box5());
        let cfg = NelderMeadConfig { initial_simplex_scale: 1e-6, ..Default::default() };
        let t = nelder_mead(&f, &Point::zeros(2), &cfg).unwrap();
        assert!(t.last().f1 <= 0.0);
    }

    #[test]
    fn start_on_upper_face_builds_inward_simplex() {
        let f = ScalarProblem::sphere(Point::zeros(2), box5()).unwrap();
        let t = nelder_mead(&f, &Point::from(vec![5.0, 5.0]), &NelderMeadConfig::default()).unwrap();
        assert!(t.last().point.norm() < 1e-6);
    }

    #[test]
    fn eval_budget_is_respected() {
        let f = ScalarProblem::rastrigin(box5());
        let cfg = NelderMeadConfig { max_evals: 20, ..Default::default() };
        let t = nelder_mead(&f, &Point::from(vec![2.2, 1.9]), &cfg).unwrap();
        assert_eq!(t.termination(), Termination::MaxIter);
        // one iteration can overshoot the cap by at most n + 1 evaluations
        assert!(t.evaluations().f1 <= 20 + 3);
    }

    #[test]
    fn invalid_coefficients_rejected() {
        let f = ScalarProblem::rastrigin(box5());
        let cfg = NelderMeadConfig { expansion: 0.5, ..Default::default() };
        assert!(nelder_mead(&f, &Point::zeros(2), &cfg).unwrap_err().is_usage());
    }
}
