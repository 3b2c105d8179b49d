use crate::error::{check_dims, Error, Result};
use crate::point::{Bounds, Point};
use crate::scalar::Scalar;

/// Regular 2-D cell grid over a box. Cell `(ix, iy)` has linear index
/// `iy * res_x + ix`; `iy = 0` is the row at the lower bound of axis 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec<T> {
    bounds: Bounds<T>,
    resolution: [usize; 2],
}

pub fn build_grid<T: Scalar>(bounds: Bounds<T>, resolution: [usize; 2]) -> Result<GridSpec<T>> {
    check_dims(2, bounds.dim())?;
    if resolution.iter().any(|&r| r < 2) {
        return Err(Error::invalid("grid resolution must be at least 2 per axis"));
    }
    Ok(GridSpec { bounds, resolution })
}

impl<T: Scalar> GridSpec<T> {
    pub fn bounds(&self) -> &Bounds<T> {
        &self.bounds
    }

    pub fn resolution(&self) -> [usize; 2] {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.resolution[0] * self.resolution[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_width(&self, axis: usize) -> T {
        self.bounds.width(axis) / T::of_usize(self.resolution[axis])
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.resolution[0] + ix
    }

    pub fn cell(&self, index: usize) -> (usize, usize) {
        (index % self.resolution[0], index / self.resolution[0])
    }

    pub fn center_coords(&self, ix: usize, iy: usize) -> [T; 2] {
        let half = T::lit(0.5);
        [
            self.bounds.lower()[0] + (T::of_usize(ix) + half) * self.cell_width(0),
            self.bounds.lower()[1] + (T::of_usize(iy) + half) * self.cell_width(1),
        ]
    }

    pub fn center(&self, index: usize) -> Point<T> {
        let (ix, iy) = self.cell(index);
        Point::from(self.center_coords(ix, iy).to_vec())
    }

    /// Cell containing `x`, or `None` outside the box.
    pub fn locate(&self, x: &[T]) -> Option<(usize, usize)> {
        if x.len() != 2 || !self.bounds.contains(x) {
            return None;
        }
        let pick = |axis: usize| {
            let rel = (x[axis] - self.bounds.lower()[axis]) / self.cell_width(axis);
            rel.floor().to_usize().unwrap_or(0).min(self.resolution[axis] - 1)
        };
        Some((pick(0), pick(1)))
    }

    /// Neighbor at offset `(dx, dy)`, or `None` past the grid edge.
    pub fn neighbor(&self, index: usize, dx: isize, dy: isize) -> Option<usize> {
        let (ix, iy) = self.cell(index);
        let nx = ix as isize + dx;
        let ny = iy as isize + dy;
        if nx < 0 || ny < 0 || nx >= self.resolution[0] as isize || ny >= self.resolution[1] as isize {
            None
        } else {
            Some(self.index(nx as usize, ny as usize))
        }
    }
}

/// The eight neighbor offsets in a fixed order used for tie-breaking.
pub const NEIGHBOR_OFFSETS: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];
