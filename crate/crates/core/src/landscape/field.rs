use std::cmp::Ordering;
use std::io::Write;

use rayon::prelude::*;

use super::grid::{GridSpec, NEIGHBOR_OFFSETS};
use crate::error::{Error, Result};
use crate::moization::{mo_gradient_from, BiObjectiveProblem, ObjectivePair, DEFAULT_EPS_GRAD};
use crate::scalar::Scalar;

/// Default efficiency threshold on the MO gradient norm.
pub const DEFAULT_TAU: f64 = 0.1;

/// Why a descent path stopped short of an efficient cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathEnd {
    Cycle,
    Edge,
}

/// Per-cell multi-objective landscape data.
#[derive(Debug, Clone)]
pub struct PlotField<T> {
    grid: GridSpec<T>,
    mo_grad: Vec<[T; 2]>,
    grad_norm: Vec<T>,
    degenerate: Vec<bool>,
    objectives: Vec<ObjectivePair<T>>,
    tau: Option<T>,
    efficient: Vec<bool>,
    heights_ready: bool,
    height: Vec<T>,
    next: Vec<Option<usize>>,
    path_end: Vec<Option<PathEnd>>,
    dominance: Vec<Option<usize>>,
}

/// Evaluates the MO gradient and both objectives at every cell center.
///
/// Cells where either single-objective gradient vanishes are marked
/// degenerate and hold a zero gradient.
pub fn mo_gradient_field<T: Scalar>(p: &BiObjectiveProblem<T>, grid: &GridSpec<T>) -> Result<PlotField<T>> {
    let pb = p.f1().bounds();
    if p.dimension() != 2 {
        return Err(Error::invalid("landscape grids are two-dimensional"));
    }
    if !pb.contains(grid.bounds().lower()) || !pb.contains(grid.bounds().upper()) {
        return Err(Error::invalid("grid must lie inside the problem box"));
    }
    let eps = T::lit(DEFAULT_EPS_GRAD);
    let cells: Vec<([T; 2], T, bool, ObjectivePair<T>)> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.center(i);
            let pair = p.evaluate_pair(&x);
            match mo_gradient_from(&p.grad_f1(&x), &p.grad_f2(&x), eps) {
                Ok(m) => ([m[0], m[1]], m.norm(), false, pair),
                Err(_) => ([T::zero(); 2], T::zero(), true, pair),
            }
        })
        .collect();

    let n = grid.len();
    let mut field = PlotField {
        grid: grid.clone(),
        mo_grad: Vec::with_capacity(n),
        grad_norm: Vec::with_capacity(n),
        degenerate: Vec::with_capacity(n),
        objectives: Vec::with_capacity(n),
        tau: None,
        efficient: vec![false; n],
        heights_ready: false,
        height: vec![T::zero(); n],
        next: vec![None; n],
        path_end: vec![None; n],
        dominance: vec![None; n],
    };
    for (m, norm, degenerate, pair) in cells {
        field.mo_grad.push(m);
        field.grad_norm.push(norm);
        field.degenerate.push(degenerate);
        field.objectives.push(pair);
    }
    Ok(field)
}

/// Runs every stage: gradients, efficiency, heights and dominance counts.
pub fn compute_plot_field<T: Scalar>(p: &BiObjectiveProblem<T>, grid: &GridSpec<T>, tau: T) -> Result<PlotField<T>> {
    let mut field = mo_gradient_field(p, grid)?;
    field.detect_efficient_cells(tau)?;
    field.accumulate_heights()?;
    field.dominance_counts()?;
    Ok(field)
}

impl<T: Scalar> PlotField<T> {
    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn mo_grad(&self, i: usize) -> [T; 2] {
        self.mo_grad[i]
    }

    pub fn grad_norm(&self, i: usize) -> T {
        self.grad_norm[i]
    }

    pub fn is_degenerate(&self, i: usize) -> bool {
        self.degenerate[i]
    }

    pub fn objectives(&self, i: usize) -> ObjectivePair<T> {
        self.objectives[i]
    }

    pub fn is_efficient(&self, i: usize) -> bool {
        self.efficient[i]
    }

    pub fn efficient_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.efficient[i])
    }

    pub fn height(&self, i: usize) -> T {
        self.height[i]
    }

    /// Successor on the stored descent path, if the path continues.
    pub fn next(&self, i: usize) -> Option<usize> {
        self.next[i]
    }

    pub fn path_end(&self, i: usize) -> Option<PathEnd> {
        self.path_end[i]
    }

    pub fn dominance_count(&self, i: usize) -> Option<usize> {
        self.dominance[i]
    }

    /// True once efficiency, heights and dominance counts are all computed.
    pub fn is_complete(&self) -> bool {
        self.tau.is_some() && self.heights_ready && self.efficient_cells().all(|i| self.dominance[i].is_some())
    }

    pub fn tau(&self) -> Option<T> {
        self.tau
    }

    pub fn max_height(&self) -> T {
        self.height.iter().copied().fold(T::zero(), T::max)
    }

    pub fn max_dominance_count(&self) -> usize {
        self.dominance.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Neighbor best aligned with the descent direction `-mo_grad`; ties go
    /// to the earliest offset. `Err(())` when that neighbor is off the grid.
    fn descent_neighbor(&self, i: usize) -> Option<std::result::Result<usize, ()>> {
        let [mx, my] = self.mo_grad[i];
        let (dx, dy) = (-mx, -my);
        let dn = (dx * dx + dy * dy).sqrt();
        if !(dn > T::zero()) {
            return None;
        }
        let (wx, wy) = (self.grid.cell_width(0), self.grid.cell_width(1));
        let mut best: Option<(usize, T)> = None;
        for (k, &(ox, oy)) in NEIGHBOR_OFFSETS.iter().enumerate() {
            let (vx, vy) = (T::from_isize(ox).unwrap() * wx, T::from_isize(oy).unwrap() * wy);
            let cos = (vx * dx + vy * dy) / ((vx * vx + vy * vy).sqrt() * dn);
            if best.map_or(true, |(_, c)| cos > c) {
                best = Some((k, cos));
            }
        }
        let (k, _) = best.unwrap();
        let (ox, oy) = NEIGHBOR_OFFSETS[k];
        Some(self.grid.neighbor(i, ox, oy).ok_or(()))
    }

    /// Lexicographic 8-neighborhood minimum of `(primary, secondary)`.
    fn is_discrete_minimum(&self, i: usize, key: impl Fn(&ObjectivePair<T>) -> (T, T)) -> bool {
        let (a, b) = key(&self.objectives[i]);
        NEIGHBOR_OFFSETS
            .iter()
            .filter_map(|&(ox, oy)| self.grid.neighbor(i, ox, oy))
            .all(|j| {
                let (c, d) = key(&self.objectives[j]);
                a < c || (a == c && b <= d)
            })
    }

    /// Flags locally efficient cells.
    ///
    /// A cell is efficient when its MO gradient norm is at most `tau`, when a
    /// single-objective gradient vanishes at its center, when it is a discrete
    /// local minimum of either objective over its 8-neighborhood (ties broken
    /// by the other objective), or when its
    /// descent step lands on a neighbor whose MO gradient points back against
    /// its own (the efficient set passes between the two centers; the cell
    /// with the smaller norm is flagged).
    pub fn detect_efficient_cells(&mut self, tau: T) -> Result<()> {
        if !(tau > T::zero()) {
            return Err(Error::invalid("efficiency threshold tau must be positive"));
        }
        let n = self.len();
        let mut efficient: Vec<bool> = (0..n)
            .map(|i| {
                self.degenerate[i]
                    || self.grad_norm[i] <= tau
                    || self.is_discrete_minimum(i, |o| (o.f1, o.f2))
                    || self.is_discrete_minimum(i, |o| (o.f2, o.f1))
            })
            .collect();

        for i in 0..n {
            if self.degenerate[i] {
                continue;
            }
            let Some(Ok(j)) = self.descent_neighbor(i) else { continue };
            if self.degenerate[j] {
                continue;
            }
            let (a, b) = (self.mo_grad[i], self.mo_grad[j]);
            if a[0] * b[0] + a[1] * b[1] < T::zero() {
                let keep = match self.grad_norm[i].partial_cmp(&self.grad_norm[j]) {
                    Some(Ordering::Greater) => j,
                    Some(Ordering::Less) => i,
                    _ => i.min(j),
                };
                efficient[keep] = true;
            }
        }

        self.efficient = efficient;
        self.tau = Some(tau);
        self.heights_ready = false;
        self.dominance = vec![None; n];
        Ok(())
    }

    /// Accumulates MO gradient norms along discrete descent paths.
    ///
    /// Efficient cells have height zero. Any other cell's height is its own
    /// norm plus the height of its successor; paths that revisit a cell or
    /// leave the grid end there and are flagged.
    pub fn accumulate_heights(&mut self) -> Result<()> {
        if self.tau.is_none() {
            return Err(Error::invalid("efficient cells must be detected before heights"));
        }
        const NEW: u8 = 0;
        const ON_PATH: u8 = 1;
        const DONE: u8 = 2;
        let n = self.len();
        let mut state = vec![NEW; n];
        let mut height = vec![T::zero(); n];
        let mut next = vec![None; n];
        let mut path_end = vec![None; n];
        let mut path = Vec::new();

        for start in 0..n {
            if state[start] == DONE {
                continue;
            }
            path.clear();
            let mut cur = start;
            let base = loop {
                if self.efficient[cur] {
                    state[cur] = DONE;
                    break T::zero();
                }
                match state[cur] {
                    DONE => break height[cur],
                    ON_PATH => {
                        let last = *path.last().expect("cycle implies a non-empty path");
                        next[last] = None;
                        path_end[last] = Some(PathEnd::Cycle);
                        break T::zero();
                    }
                    _ => {}
                }
                state[cur] = ON_PATH;
                path.push(cur);
                match self.descent_neighbor(cur) {
                    Some(Ok(j)) => {
                        next[cur] = Some(j);
                        cur = j;
                    }
                    // a zero gradient is always efficient, so only the edge case remains
                    _ => {
                        path_end[cur] = Some(PathEnd::Edge);
                        break T::zero();
                    }
                }
            };
            let mut acc = base;
            for &c in path.iter().rev() {
                acc = acc + self.grad_norm[c];
                height[c] = acc;
                state[c] = DONE;
            }
        }

        self.height = height;
        self.next = next;
        self.path_end = path_end;
        self.heights_ready = true;
        Ok(())
    }

    /// For each efficient cell, the number of efficient cells dominating it.
    ///
    /// Sorts by `f1` and sweeps a Fenwick tree over `f2` ranks, so the count
    /// runs in `O(k log k)` for `k` efficient cells.
    pub fn dominance_counts(&mut self) -> Result<()> {
        if self.tau.is_none() {
            return Err(Error::invalid("efficient cells must be detected before dominance counts"));
        }
        let cells: Vec<usize> = self.efficient_cells().collect();
        let cmp = |a: T, b: T| a.partial_cmp(&b).unwrap_or(Ordering::Equal);

        let mut f2_sorted: Vec<T> = cells.iter().map(|&i| self.objectives[i].f2).collect();
        f2_sorted.sort_by(|&a, &b| cmp(a, b));
        f2_sorted.dedup();
        let rank = |v: T| f2_sorted.partition_point(|&w| w < v);

        let mut order = cells.clone();
        order.sort_by(|&a, &b| {
            let (oa, ob) = (self.objectives[a], self.objectives[b]);
            cmp(oa.f1, ob.f1).then(cmp(oa.f2, ob.f2))
        });

        let mut tree = Fenwick::new(f2_sorted.len());
        let mut counts = vec![None; self.len()];
        let mut g = 0;
        while g < order.len() {
            let f1 = self.objectives[order[g]].f1;
            let mut end = g;
            while end < order.len() && self.objectives[order[end]].f1 == f1 {
                end += 1;
            }
            let group = &order[g..end];
            for &c in group {
                tree.add(rank(self.objectives[c].f2));
            }
            for &c in group {
                let f2 = self.objectives[c].f2;
                let weakly = tree.prefix(rank(f2));
                // equal points in both objectives (the cell itself included) do not dominate
                let equal = group.iter().filter(|&&d| self.objectives[d].f2 == f2).count();
                counts[c] = Some(weakly - equal);
            }
            g = end;
        }
        self.dominance = counts;
        Ok(())
    }

    /// Writes `ix,iy,x1,x2,f1,f2,mograd_norm,efficient,height,domcount`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "ix", "iy", "x1", "x2", "f1", "f2", "mograd_norm", "efficient", "height", "domcount",
        ])?;
        for i in 0..self.len() {
            let (ix, iy) = self.grid.cell(i);
            let [x1, x2] = self.grid.center_coords(ix, iy);
            let o = self.objectives[i];
            w.write_record([
                ix.to_string(),
                iy.to_string(),
                x1.as_f64().to_string(),
                x2.as_f64().to_string(),
                o.f1.as_f64().to_string(),
                o.f2.as_f64().to_string(),
                self.grad_norm[i].as_f64().to_string(),
                u8::from(self.efficient[i]).to_string(),
                self.height[i].as_f64().to_string(),
                self.dominance[i].map(|c| c.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Fenwick {
    tree: Vec<usize>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick { tree: vec![0; n + 1] }
    }

    /// Counts one item at 0-based `rank`.
    fn add(&mut self, rank: usize) {
        let mut i = rank + 1;
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Items with rank `<= rank`.
    fn prefix(&self, rank: usize) -> usize {
        let mut i = rank + 1;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}
