use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::problems::ScalarProblem;
use crate::trace::{Phase, SearchTrace};

/// One parsed line of a trace file.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub phase: Phase,
    pub point: Vec<f64>,
    pub f1: f64,
    pub f2: Option<f64>,
    pub grad1_norm: f64,
}

fn header(dim: usize) -> Vec<String> {
    let mut h = vec!["iter".to_string(), "phase".to_string()];
    h.extend((1..=dim).map(|i| format!("x{i}")));
    h.extend(["f1", "f2", "grad1_norm"].map(String::from));
    h
}

/// Writes `iter,phase,x1,...,xn,f1,f2,grad1_norm`; `f2` is empty when the
/// run never evaluated the helper.
pub fn write_trace_csv<W: Write>(out: W, trace: &SearchTrace<f64>, f1: &ScalarProblem<f64>) -> Result<()> {
    let dim = f1.dimension();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(dim))?;
    for e in trace.entries() {
        if e.point.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: e.point.dim() });
        }
        let mut rec = vec![e.iteration.to_string(), e.phase.to_string()];
        rec.extend(e.point.iter().map(f64::to_string));
        rec.push(e.f1.to_string());
        rec.push(e.f2.map(|v| v.to_string()).unwrap_or_default());
        rec.push(f1.gradient(&e.point).norm().to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn trace_csv_bytes(trace: &SearchTrace<f64>, f1: &ScalarProblem<f64>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_trace_csv(&mut buf, trace, f1)?;
    Ok(buf)
}

pub fn read_trace_csv<R: Read>(input: R) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let dim = headers.len().checked_sub(5).filter(|&d| d > 0).ok_or_else(|| bad("too few columns"))?;
    if headers.iter().ne(header(dim).iter().map(String::as_str)) {
        return Err(bad("unexpected header"));
    }
    let num = |s: &str, what: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad {what} `{s}`")));
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let point = (0..dim).map(|i| num(&rec[2 + i], "coordinate")).collect::<Result<Vec<_>>>()?;
        let f2 = &rec[dim + 3];
        rows.push(TraceRow {
            iter: rec[0].parse().map_err(|_| bad("bad iteration"))?,
            phase: rec[1].parse()?,
            point,
            f1: num(&rec[dim + 2], "f1")?,
            f2: if f2.is_empty() { None } else { Some(num(f2, "f2")?) },
            grad1_norm: num(&rec[dim + 4], "grad1_norm")?,
        });
    }
    if rows.is_empty() {
        return Err(bad("no rows"));
    }
    Ok(rows)
}

fn bad(msg: &str) -> Error {
    Error::invalid(format!("trace file: {msg}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_somogsa, SomogsaConfig};
    use crate::moization::make_biobjective;
    use crate::point::{Bounds, Point};

    #[test]
    fn round_trip_preserves_values_exactly() {
        let b = Bounds::cube(2, -5.0, 5.0).unwrap();
        let f1 = ScalarProblem::rastrigin(b);
        let p = make_biobjective(f1.clone(), Point::from(vec![-3.5, -2.5])).unwrap();
        let t = run_somogsa(&p, &Point::from(vec![0.7, 2.7]), &SomogsaConfig::default()).unwrap();
        let rows = read_trace_csv(&trace_csv_bytes(&t, &f1).unwrap()[..]).unwrap();
        assert_eq!(rows.len(), t.len());
        for (row, e) in rows.iter().zip(t.entries()) {
            assert_eq!(row.point, e.point.coords());
            assert_eq!(row.f1.to_bits(), e.f1.to_bits());
            assert_eq!(row.f2, e.f2);
            assert_eq!(row.phase, e.phase);
        }
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(read_trace_csv(&b"a,b\n1,2\n"[..]).unwrap_err().is_usage());
        assert!(read_trace_csv(&b"iter,phase,x1,x2,f1,f2,grad1_norm\n"[..]).unwrap_err().is_usage());
        let bad_phase = b"iter,phase,x1,x2,f1,f2,grad1_norm\n0,JUMP,0,0,0,,0\n";
        assert!(read_trace_csv(&bad_phase[..]).unwrap_err().is_usage());
    }
}
