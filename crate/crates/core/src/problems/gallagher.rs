use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ScalarProblem;
use crate::error::{check_dims, Error, Result};
use crate::point::{Bounds, Point};
use crate::scalar::Scalar;

const BEST_HEIGHT: f64 = 10.0;
const OTHER_HEIGHTS: (f64, f64) = (1.1, 9.1);
const BASE_WIDTHS: (f64, f64) = (0.5, 1.5);

/// Isotropic Gaussian peaks in min convention:
/// `f(x) = h_max - max_i h_i exp(-|x - y_i|^2 / (2 w_i^2))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GallagherSpec<T> {
    seed: u64,
    centers: Vec<Point<T>>,
    heights: Vec<T>,
    widths: Vec<T>,
    best: usize,
}

impl<T: Scalar> GallagherSpec<T> {
    /// Assembles a spec from explicit peak data. The tallest peak must be unique.
    pub fn new(seed: u64, centers: Vec<Point<T>>, heights: Vec<T>, widths: Vec<T>) -> Result<Self> {
        let k = centers.len();
        if k == 0 {
            return Err(Error::invalid("gallagher problem needs at least one peak"));
        }
        if heights.len() != k || widths.len() != k {
            return Err(Error::invalid("peak lists must have equal length"));
        }
        let dim = centers[0].dim();
        for c in &centers {
            check_dims(dim, c.dim())?;
        }
        if heights.iter().chain(&widths).any(|v| !(*v > T::zero() && v.is_finite())) {
            return Err(Error::invalid("peak heights and widths must be positive"));
        }
        let best = (0..k)
            .max_by(|&a, &b| heights[a].partial_cmp(&heights[b]).unwrap().then(b.cmp(&a)))
            .unwrap();
        if heights
            .iter()
            .enumerate()
            .any(|(i, &h)| i != best && h == heights[best])
        {
            return Err(Error::invalid("tallest peak must be unique"));
        }
        Ok(GallagherSpec {
            seed,
            centers,
            heights,
            widths,
            best,
        })
    }

    /// Draws a seeded instance: centers uniform in the box, peak 0 tallest.
    pub fn generate(num_peaks: usize, seed: u64, bounds: &Bounds<T>) -> Result<Self> {
        if num_peaks == 0 {
            return Err(Error::invalid("num_peaks must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lower = bounds.lower().to_f64();
        let upper = bounds.upper().to_f64();
        // keep the total peak mass roughly constant as the count grows
        let width_scale = (21.0 / num_peaks as f64).sqrt();

        let mut centers = Vec::with_capacity(num_peaks);
        let mut heights = Vec::with_capacity(num_peaks);
        let mut widths = Vec::with_capacity(num_peaks);
        for i in 0..num_peaks {
            let c: Vec<f64> = lower
                .iter()
                .zip(&upper)
                .map(|(&l, &u)| rng.random_range(l..u))
                .collect();
            centers.push(Point::from_f64(&c));
            let h = if i == 0 {
                BEST_HEIGHT
            } else {
                rng.random_range(OTHER_HEIGHTS.0..OTHER_HEIGHTS.1)
            };
            heights.push(T::lit(h));
            widths.push(T::lit(rng.random_range(BASE_WIDTHS.0..BASE_WIDTHS.1) * width_scale));
        }
        Self::new(seed, centers, heights, widths)
    }

    pub fn num_peaks(&self) -> usize {
        self.centers.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.centers[0].dim()
    }

    pub fn centers(&self) -> &[Point<T>] {
        &self.centers
    }

    pub fn heights(&self) -> &[T] {
        &self.heights
    }

    pub fn widths(&self) -> &[T] {
        &self.widths
    }

    /// Index of the tallest peak, whose center is the global minimizer.
    pub fn best_peak(&self) -> usize {
        self.best
    }

    pub fn max_height(&self) -> T {
        self.heights[self.best]
    }

    fn peak_value(&self, i: usize, x: &[T]) -> T {
        let c = &self.centers[i];
        let r2 = x
            .iter()
            .zip(c.iter())
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
        let w = self.widths[i];
        self.heights[i] * (-r2 / (T::lit(2.0) * w * w)).exp()
    }

    /// Peak attaining the max at `x`; the lowest index wins ties.
    pub fn active_peak(&self, x: &[T]) -> (usize, T) {
        let mut best = (0, self.peak_value(0, x));
        for i in 1..self.num_peaks() {
            let v = self.peak_value(i, x);
            if v > best.1 {
                best = (i, v);
            }
        }
        best
    }
}

/// Builds the seeded peaks problem on `bounds`.
pub fn build_gallagher<T: Scalar>(num_peaks: usize, seed: u64, bounds: Bounds<T>) -> Result<ScalarProblem<T>> {
    let spec = GallagherSpec::generate(num_peaks, seed, &bounds)?;
    ScalarProblem::gallagher(spec, bounds)
}

pub fn eval_gallagher<T: Scalar>(spec: &GallagherSpec<T>, x: &[T]) -> T {
    let (_, v) = spec.active_peak(x);
    (spec.max_height() - v).max(T::zero())
}

/// Gradient of the active peak's term.
pub fn grad_gallagher<T: Scalar>(spec: &GallagherSpec<T>, x: &[T]) -> Point<T> {
    let (k, v) = spec.active_peak(x);
    let w = spec.widths[k];
    let scale = v / (w * w);
    Point::from(
        x.iter()
            .zip(spec.centers[k].iter())
            .map(|(&a, &b)| scale * (a - b))
            .collect::<Vec<_>>(),
    )
}
