use std::ops::{Deref, Index};

use crate::error::{check_dims, Error, Result};
use crate::scalar::Scalar;

/// A point in the n-dimensional decision space.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T>(Vec<T>);

impl<T: Scalar> Point<T> {
    /// Builds a point, rejecting empty or non-finite coordinates.
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("point must have at least one coordinate"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("point coordinate".into()));
        }
        Ok(Point(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![T::zero(); dim])
    }

    pub fn from_f64(coords: &[f64]) -> Self {
        Point(coords.iter().map(|&c| T::lit(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.as_f64()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, other: &Self) -> T {
        self.0
            .iter()
            .zip(&other.0)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &Self) -> T {
        self.0
            .iter()
            .zip(&other.0)
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b))
            .sqrt()
    }

    pub fn sub(&self, other: &Self) -> Self {
        Point(self.0.iter().zip(&other.0).map(|(&a, &b)| a - b).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Point(self.0.iter().zip(&other.0).map(|(&a, &b)| a + b).collect())
    }

    pub fn scaled(&self, factor: T) -> Self {
        Point(self.0.iter().map(|&a| a * factor).collect())
    }

    /// `self + factor * direction`
    pub fn step(&self, factor: T, direction: &Self) -> Self {
        Point(
            self.0
                .iter()
                .zip(&direction.0)
                .map(|(&a, &d)| a + factor * d)
                .collect(),
        )
    }

    /// Unit vector in the direction of `self`, or `None` when the norm is zero.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(self.scaled(T::one() / n))
        } else {
            None
        }
    }
}

impl<T> Deref for Point<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> Index<usize> for Point<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> From<Vec<T>> for Point<T> {
    fn from(v: Vec<T>) -> Self {
        Point(v)
    }
}

/// Box constraints `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds<T> {
    lower: Point<T>,
    upper: Point<T>,
}

impl<T: Scalar> Bounds<T> {
    pub fn new(lower: Point<T>, upper: Point<T>) -> Result<Self> {
        check_dims(lower.dim(), upper.dim())?;
        if lower.dim() == 0 {
            return Err(Error::InvalidBox("zero-dimensional box".into()));
        }
        for (i, (&l, &u)) in lower.iter().zip(upper.iter()).enumerate() {
            if !(l.is_finite() && u.is_finite() && l < u) {
                return Err(Error::InvalidBox(format!(
                    "axis {i}: lower bound must be finite and strictly below upper bound"
                )));
            }
        }
        Ok(Bounds { lower, upper })
    }

    /// The hypercube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(
            Point(vec![T::lit(lo); dim]),
            Point(vec![T::lit(hi); dim]),
        )
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    pub fn lower(&self) -> &Point<T> {
        &self.lower
    }

    pub fn upper(&self) -> &Point<T> {
        &self.upper
    }

    pub fn width(&self, axis: usize) -> T {
        self.upper[axis] - self.lower[axis]
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(self.upper.iter()))
                .all(|(&v, (&l, &u))| l <= v && v <= u)
    }

    /// Checks dimension and membership, mapping failures to usage errors.
    pub fn require(&self, x: &[T]) -> Result<()> {
        check_dims(self.dim(), x.len())?;
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutsideBox)
        }
    }

    /// Projects `x` onto the box; the flag reports whether any component moved.
    pub fn clamp(&self, x: &Point<T>) -> (Point<T>, bool) {
        let mut clamped = false;
        let coords = x
            .iter()
            .zip(self.lower.iter().zip(self.upper.iter()))
            .map(|(&v, (&l, &u))| {
                if v < l {
                    clamped = true;
                    l
                } else if v > u {
                    clamped = true;
                    u
                } else {
                    v
                }
            })
            .collect();
        (Point(coords), clamped)
    }

    pub fn center(&self) -> Point<T> {
        let half = T::lit(0.5);
        Point(
            self.lower
                .iter()
                .zip(self.upper.iter())
                .map(|(&l, &u)| (l + u) * half)
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inverted_box() {
        let b = Bounds::<f64>::new(Point::from(vec![0.0, 1.0]), Point::from(vec![1.0, 1.0]));
        assert!(matches!(b, Err(Error::InvalidBox(_))));
    }

    #[test]
    fn clamp_reports_movement() {
        let b = Bounds::<f64>::cube(2, -1.0, 1.0).unwrap();
        let (p, moved) = b.clamp(&Point::from(vec![2.0, 0.5]));
        assert!(moved);
        assert_eq!(p.coords(), &[1.0, 0.5]);
        let (q, moved) = b.clamp(&p);
        assert!(!moved);
        assert_eq!(q, p);
    }

    #[test]
    fn point_new_rejects_nan() {
        assert!(Point::new(vec![0.0, f64::NAN]).is_err());
        assert!(Point::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn normalized_zero_is_none() {
        assert!(Point::<f64>::zeros(3).normalized().is_none());
        let u = Point::from(vec![3.0f64, 4.0]).normalized().unwrap();
        assert!((u.norm() - 1.0).abs() < 1e-15);
    }
}
