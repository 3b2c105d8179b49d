use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::{Bounds, Point};

const MAX_REJECTIONS: usize = 10_000;

/// Seeded, stratified start points.
///
/// The first two axes are split into a `cols x rows` grid of strata
/// (`cols = ceil(sqrt(count))`), filled row by row; each point is drawn
/// uniformly inside its stratum, redrawing while it lies within `exclusion`
/// of `avoid`. Further axes are sampled uniformly over the box.
pub fn sample_starts(
    bounds: &Bounds,
    count: usize,
    seed: u64,
    avoid: Option<&Point>,
    exclusion: f64,
) -> Result<Vec<Point>> {
    if count == 0 {
        return Err(Error::invalid("at least one start point is required"));
    }
    if bounds.dim() < 2 {
        return Err(Error::invalid("start sampling needs at least two dimensions"));
    }
    if !(exclusion >= 0.0) {
        return Err(Error::invalid("exclusion radius must be non-negative"));
    }
    let cols = (count as f64).sqrt().ceil() as usize;
    let rows = count.div_ceil(cols);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (bounds.lower(), bounds.upper());
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let (c, r) = (k % cols, k / cols);
        let stratum = |axis: usize, i: usize, n: usize| {
            let w = bounds.width(axis) / n as f64;
            (lo[axis] + i as f64 * w, lo[axis] + (i + 1) as f64 * w)
        };
        let (x0, x1) = stratum(0, c, cols);
        let (y0, y1) = stratum(1, r, rows);
        let mut accepted = None;
        for _ in 0..MAX_REJECTIONS {
            let mut x = vec![rng.random_range(x0..x1), rng.random_range(y0..y1)];
            x.extend((2..bounds.dim()).map(|a| rng.random_range(lo[a]..hi[a])));
            let x = Point::from(x);
            if avoid.is_none_or(|o| x.distance(o) > exclusion) {
                accepted = Some(x);
                break;
            }
        }
        out.push(accepted.ok_or_else(|| Error::invalid("exclusion ball covers a whole stratum"))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_starts_one_per_stratum() {
        let b = Bounds::cube(2, -5.0, 5.0).unwrap();
        let origin = Point::zeros(2);
        let s = sample_starts(&b, 6, 1, Some(&origin), 0.5).unwrap();
        assert_eq!(s.len(), 6);
        for (k, x) in s.iter().enumerate() {
            assert!(b.contains(x));
            assert!(x.distance(&origin) > 0.5);
            let (c, r) = (k % 3, k / 3);
            assert!(x[0] >= -5.0 + c as f64 * 10.0 / 3.0 && x[0] <= -5.0 + (c + 1) as f64 * 10.0 / 3.0);
            assert!(x[1] >= -5.0 + r as f64 * 5.0 && x[1] <= r as f64 * 5.0);
        }
    }

    #[test]
    fn seeded_and_reproducible() {
        let b = Bounds::cube(2, -5.0, 5.0).unwrap();
        assert_eq!(sample_starts(&b, 6, 7, None, 0.0).unwrap(), sample_starts(&b, 6, 7, None, 0.0).unwrap());
        assert_ne!(sample_starts(&b, 6, 7, None, 0.0).unwrap(), sample_starts(&b, 6, 8, None, 0.0).unwrap());
    }

    #[test]
    fn impossible_exclusion_is_reported() {
        let b = Bounds::cube(2, -1.0, 1.0).unwrap();
        assert!(sample_starts(&b, 1, 0, Some(&Point::zeros(2)), 5.0).unwrap_err().is_usage());
        assert!(sample_starts(&b, 0, 0, None, 0.0).unwrap_err().is_usage());
    }
}
