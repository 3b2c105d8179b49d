use super::ScalarProblem;
use crate::point::Point;
use crate::scalar::Scalar;

/// Base step for numerical gradients; scaled per component by `max(1, |x_i|)`.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct FdGradient<T> {
    pub gradient: Point<T>,
    /// Set when at least one component fell back to a one-sided difference
    /// because `x` was within a step of a box face.
    pub one_sided: bool,
    pub evaluations: usize,
}

/// Step actually used for component value `xi`.
#[inline]
pub fn relative_step<T: Scalar>(h: T, xi: T) -> T {
    h * xi.abs().max(T::one())
}

/// Central-difference gradient of `f` at `x`.
///
/// Component `i` is `(f(x + h_i e_i) - f(x - h_i e_i)) / (2 h_i)` with
/// `h_i = h * max(1, |x_i|)`. Components whose central stencil would leave the
/// box use a forward or backward difference instead.
pub fn finite_diff_grad<T: Scalar>(f: &ScalarProblem<T>, x: &[T], h: T) -> FdGradient<T> {
    let bounds = f.bounds();
    let mut probe = x.to_vec();
    let mut center_value = None;
    let mut one_sided = false;
    let mut evaluations = 0;
    let mut grad = Vec::with_capacity(x.len());

    for i in 0..x.len() {
        let xi = x[i];
        let hi = relative_step(h, xi);
        let room_below = xi - hi >= bounds.lower()[i];
        let room_above = xi + hi <= bounds.upper()[i];

        let component = if room_below && room_above {
            probe[i] = xi + hi;
            let up = f.eval(&probe);
            probe[i] = xi - hi;
            let down = f.eval(&probe);
            evaluations += 2;
            (up - down) / (hi + hi)
        } else {
            one_sided = true;
            let fx = *center_value.get_or_insert_with(|| {
                evaluations += 1;
                f.eval(x)
            });
            if room_above {
                probe[i] = xi + hi;
                evaluations += 1;
                (f.eval(&probe) - fx) / hi
            } else {
                probe[i] = xi - hi;
                evaluations += 1;
                (fx - f.eval(&probe)) / hi
            }
        };
        probe[i] = xi;
        grad.push(component);
    }

    FdGradient {
        gradient: Point::from(grad),
        one_sided,
        evaluations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::Bounds;
    use crate::problems::grad_rastrigin;

    fn unit_box() -> Bounds<f64> {
        Bounds::cube(2, -5.0, 5.0).unwrap()
    }

    #[test]
    fn sphere_is_exact_up_to_rounding() {
        let p = ScalarProblem::sphere(Point::zeros(2), unit_box()).unwrap();
        let g = finite_diff_grad(&p, &[1.0, 0.0], 1e-6);
        assert!(!g.one_sided);
        assert_eq!(g.evaluations, 4);
        assert!((g.gradient[0] - 2.0).abs() < 1e-6);
        assert!(g.gradient[1].abs() < 1e-6);
    }

    #[test]
    fn rastrigin_matches_analytic() {
        let p = ScalarProblem::rastrigin(unit_box());
        let g = finite_diff_grad(&p, &[0.5, 0.0], 1e-6);
        let exact = grad_rastrigin(&[0.5, 0.0]);
        assert!((g.gradient[0] - 1.0).abs() < 1e-4);
        assert!(g.gradient.distance(&exact) < 1e-4);
    }

    #[test]
    fn constant_function_has_zero_gradient() {
        let p = ScalarProblem::custom("const", unit_box(), |_| 3.25);
        let g = finite_diff_grad(&p, &[0.1, -2.0], 1e-6);
        assert_eq!(g.gradient.coords(), &[0.0, 0.0]);
    }

    #[test]
    fn near_face_falls_back_to_one_sided() {
        let p = ScalarProblem::sphere(Point::zeros(2), unit_box()).unwrap();
        let g = finite_diff_grad(&p, &[5.0, 0.0], 1e-6);
        assert!(g.one_sided);
        // backward difference of x^2 at 5 with h = 5e-6
        assert!((g.gradient[0] - 10.0).abs() < 1e-4);
        assert!(g.gradient[1].abs() < 1e-6);
    }
}
