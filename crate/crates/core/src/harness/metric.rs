use crate::error::{Error, Result};

/// Fraction of the start-to-optimum `f1` gap closed by a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub value: f64,
    /// The start already had the optimal value, so the ratio is 0/0 and is
    /// reported as 1.
    pub degenerate: bool,
}

/// `|f1_best - f1_start| / |f1_opt - f1_start|`, in `[0, 1]`.
///
/// Requires `f1_opt <= f1_best <= f1_start`.
pub fn performance_gap(f1_best: f64, f1_start: f64, f1_opt: f64) -> Result<Gap> {
    if !(f1_best.is_finite() && f1_start.is_finite() && f1_opt.is_finite()) {
        return Err(Error::NonFinite("performance gap inputs".into()));
    }
    if f1_best > f1_start || f1_best < f1_opt {
        return Err(Error::invalid(format!(
            "expected f1_opt <= f1_best <= f1_start, got {f1_opt}, {f1_best}, {f1_start}"
        )));
    }
    if f1_start == f1_opt {
        return Ok(Gap { value: 1.0, degenerate: true });
    }
    let value = ((f1_best - f1_start).abs() / (f1_opt - f1_start).abs()).clamp(0.0, 1.0);
    Ok(Gap { value, degenerate: false })
}
