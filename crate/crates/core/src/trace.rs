use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::moization::{BiObjectiveProblem, ObjectivePair};
use crate::point::Point;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Start,
    MoDescent,
    LocalSearchF1,
    SlideF2,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Start => "START",
            Phase::MoDescent => "MO_DESCENT",
            Phase::LocalSearchF1 => "LOCAL_SEARCH_F1",
            Phase::SlideF2 => "SLIDE_F2",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "START" => Phase::Start,
            "MO_DESCENT" => Phase::MoDescent,
            "LOCAL_SEARCH_F1" => Phase::LocalSearchF1,
            "SLIDE_F2" => Phase::SlideF2,
            other => return Err(Error::invalid(format!("unknown phase `{other}`"))),
        })
    }
}

/// Why a search stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    F2OptReached,
    MaxIter,
    BoxStuck,
    /// Local search met its own convergence tolerance.
    Converged,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::F2OptReached => "F2_OPT_REACHED",
            Termination::MaxIter => "MAX_ITER",
            Termination::BoxStuck => "BOX_STUCK",
            Termination::Converged => "CONVERGED",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Evaluation bookkeeping. The helper objective is free; a gradient of `f1`
/// costs `2n` evaluations whether it is analytic or numerical.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCount {
    pub f1: u64,
    pub grad_f1: u64,
}

impl EvalCount {
    pub fn total(&self, dim: usize) -> u64 {
        self.f1 + 2 * dim as u64 * self.grad_f1
    }

    pub fn absorb(&mut self, other: EvalCount) {
        self.f1 += other.f1;
        self.grad_f1 += other.grad_f1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry<T> {
    pub point: Point<T>,
    pub f1: T,
    /// Helper objective value; absent for runs that never saw the helper.
    pub f2: Option<T>,
    pub phase: Phase,
    pub iteration: usize,
}

impl<T: Scalar> TraceEntry<T> {
    pub fn objectives(&self) -> Option<ObjectivePair<T>> {
        self.f2.map(|f2| ObjectivePair::new(self.f1, f2))
    }
}

/// Ordered archive of every point a search accepted.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchTrace<T> {
    entries: Vec<TraceEntry<T>>,
    termination: Termination,
    evaluations: EvalCount,
}

impl<T: Scalar> SearchTrace<T> {
    pub(crate) fn start(point: Point<T>, f1: T, f2: Option<T>) -> Self {
        SearchTrace {
            entries: vec![TraceEntry {
                point,
                f1,
                f2,
                phase: Phase::Start,
                iteration: 0,
            }],
            termination: Termination::MaxIter,
            evaluations: EvalCount::default(),
        }
    }

    pub(crate) fn push(&mut self, point: Point<T>, f1: T, f2: Option<T>, phase: Phase) {
        let iteration = self.entries.len();
        self.entries.push(TraceEntry {
            point,
            f1,
            f2,
            phase,
            iteration,
        });
    }

    pub(crate) fn finish(mut self, termination: Termination, evaluations: EvalCount) -> Self {
        self.termination = termination;
        self.evaluations = evaluations;
        self
    }

    pub fn entries(&self) -> &[TraceEntry<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn first(&self) -> &TraceEntry<T> {
        &self.entries[0]
    }

    pub fn last(&self) -> &TraceEntry<T> {
        self.entries.last().expect("trace holds at least the start point")
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    pub fn evaluations(&self) -> EvalCount {
        self.evaluations
    }

    /// Fills missing helper values using `problem`'s sphere.
    pub fn attach_helper(&mut self, problem: &BiObjectiveProblem<T>) {
        for e in &mut self.entries {
            if e.f2.is_none() {
                e.f2 = Some(problem.eval_f2(&e.point));
            }
        }
    }

    pub fn best(&self) -> (&Point<T>, T) {
        let e = best_entry(self);
        (&e.point, e.f1)
    }
}

fn best_entry<T: Scalar>(trace: &SearchTrace<T>) -> &TraceEntry<T> {
    let mut best = &trace.entries[0];
    for e in &trace.entries[1..] {
        if e.f1 < best.f1 {
            best = e;
        }
    }
    best
}

/// Entry with the smallest `f1`; the earliest wins ties.
pub fn best_of_trace<T: Scalar>(trace: &SearchTrace<T>) -> (Point<T>, T) {
    let e = best_entry(trace);
    (e.point.clone(), e.f1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64) -> Point<f64> {
        Point::from(vec![x])
    }

    #[test]
    fn single_entry_best() {
        let t = SearchTrace::start(p(1.0), 4.0, None);
        assert_eq!(best_of_trace(&t), (p(1.0), 4.0));
    }

    #[test]
    fn ties_keep_the_earlier_entry() {
        let mut t = SearchTrace::start(p(0.0), 5.0, None);
        t.push(p(1.0), 2.0, None, Phase::LocalSearchF1);
        t.push(p(2.0), 3.0, None, Phase::SlideF2);
        t.push(p(3.0), 2.0, None, Phase::LocalSearchF1);
        let (x, v) = best_of_trace(&t);
        assert_eq!(v, 2.0);
        assert_eq!(x, p(1.0));
        let iters: Vec<_> = t.entries().iter().map(|e| e.iteration).collect();
        assert_eq!(iters, vec![0, 1, 2, 3]);
    }

    #[test]
    fn phase_names_parse_back() {
        for ph in [Phase::Start, Phase::MoDescent, Phase::LocalSearchF1, Phase::SlideF2] {
            assert_eq!(ph.as_str().parse::<Phase>().unwrap(), ph);
        }
    }

    #[test]
    fn eval_cost_model() {
        let c = EvalCount { f1: 10, grad_f1: 3 };
        assert_eq!(c.total(2), 22);
    }
}
