//! Density fields, relative error norms, error tables and CSV output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{MomentError, Result};
use crate::quadrature::trapezoid_weights;

/// `ψ⁽⁰⁾(t, x)` sampled at a few times on a uniform cell-centre grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityField {
    pub x: Vec<f64>,
    pub times: Vec<f64>,
    /// `values[k][i]` at `times[k]`, `x[i]`.
    pub values: Vec<Vec<f64>>,
}

impl DensityField {
    pub fn new(x: Vec<f64>) -> Self {
        Self { x, times: Vec::new(), values: Vec::new() }
    }

    pub fn push(&mut self, t: f64, density: Vec<f64>) {
        debug_assert_eq!(density.len(), self.x.len());
        self.times.push(t);
        self.values.push(density);
    }

    /// Index of the sample at time `t` (within a relative 1e-9).
    pub fn snapshot_index(&self, t: f64) -> Result<usize> {
        let tol = 1e-9 * t.abs().max(1.0);
        self.times.iter().position(|&s| (s - t).abs() <= tol).ok_or(MomentError::MissingSnapshot(t))
    }

    /// The samples with `t ≤ t_max`.
    pub fn truncated(&self, t_max: f64) -> DensityField {
        let tol = 1e-9 * t_max.abs().max(1.0);
        let keep = self.times.partition_point(|&t| t <= t_max + tol);
        DensityField { x: self.x.clone(), times: self.times[..keep].to_vec(), values: self.values[..keep].to_vec() }
    }

    pub fn snapshot(&self, t: f64) -> Result<&[f64]> {
        Ok(&self.values[self.snapshot_index(t)?])
    }

    /// Linear interpolation in x, constant extrapolation past the ends.
    fn interp_x(&self, row: &[f64], x: f64) -> f64 {
        let xs = &self.x;
        if xs.len() == 1 || x <= xs[0] {
            return row[0];
        }
        if x >= xs[xs.len() - 1] {
            return row[xs.len() - 1];
        }
        let k = xs.partition_point(|&v| v <= x).max(1) - 1;
        let s = (x - xs[k]) / (xs[k + 1] - xs[k]);
        row[k] + s * (row[k + 1] - row[k])
    }

    /// Row at time `t` on the grid `x`, linear in time between samples.
    fn resample(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        let ts = &self.times;
        let tol = 1e-9 * t.abs().max(1.0);
        if ts.is_empty() || t < ts[0] - tol || t > ts[ts.len() - 1] + tol {
            return Err(MomentError::GridMismatch(format!("time {t} outside the sampled range")));
        }
        let k = ts.partition_point(|&s| s <= t + tol);
        let same_grid = x == self.x.as_slice();
        let row_at = |k: usize| -> Vec<f64> {
            if same_grid {
                self.values[k].clone()
            } else {
                x.iter().map(|&xi| self.interp_x(&self.values[k], xi)).collect()
            }
        };
        if k == 0 {
            return Ok(row_at(0));
        }
        let lo = k - 1;
        if (ts[lo] - t).abs() <= tol || lo + 1 == ts.len() {
            return Ok(row_at(lo));
        }
        let s = (t - ts[lo]) / (ts[lo + 1] - ts[lo]);
        let (a, b) = (row_at(lo), row_at(lo + 1));
        Ok(a.iter().zip(&b).map(|(a, b)| a + s * (b - a)).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    Inf,
}

fn space_norm(v: &[f64], w: &[f64], p: Norm) -> f64 {
    match p {
        Norm::L1 => v.iter().zip(w).map(|(a, w)| w * a.abs()).sum(),
        Norm::L2 => v.iter().zip(w).map(|(a, w)| w * a * a).sum::<f64>(),
        Norm::Inf => v.iter().fold(0.0, |m, a| m.max(a.abs())),
    }
}

fn finish(acc: f64, p: Norm) -> f64 {
    if p == Norm::L2 {
        acc.sqrt()
    } else {
        acc
    }
}

fn relative(err: f64, reference: f64) -> f64 {
    if reference > 0.0 {
        err / reference
    } else {
        err
    }
}

/// Space-time norm of a field over all its samples.
pub fn norm_lp(a: &DensityField, p: Norm) -> f64 {
    let wx = trapezoid_weights(&a.x);
    let wt = if a.times.len() > 1 { trapezoid_weights(&a.times) } else { vec![1.0] };
    let mut acc = 0.0;
    for (k, row) in a.values.iter().enumerate() {
        let n = space_norm(row, &wx, p);
        acc = if p == Norm::Inf { f64::max(acc, n) } else { acc + wt[k] * n };
    }
    finish(acc, p)
}

/// Relative space-time error of `a` against `reference` over the sample
/// times of `a` that the reference covers.
pub fn error_lp(a: &DensityField, reference: &DensityField, p: Norm) -> Result<f64> {
    let (r0, r1) = match (reference.times.first(), reference.times.last()) {
        (Some(&r0), Some(&r1)) => (r0, r1),
        _ => return Err(MomentError::GridMismatch("empty reference".into())),
    };
    let tol = 1e-9 * r1.abs().max(1.0);
    let ks: Vec<usize> = (0..a.times.len()).filter(|&k| a.times[k] >= r0 - tol && a.times[k] <= r1 + tol).collect();
    if ks.is_empty() {
        return Err(MomentError::GridMismatch("time ranges do not overlap".into()));
    }
    let wx = trapezoid_weights(&a.x);
    let ts: Vec<f64> = ks.iter().map(|&k| a.times[k]).collect();
    let wt = if ts.len() > 1 { trapezoid_weights(&ts) } else { vec![1.0] };
    let (mut err, mut norm) = (0.0, 0.0);
    for (j, &k) in ks.iter().enumerate() {
        let r = reference.resample(a.times[k], &a.x)?;
        let d: Vec<f64> = a.values[k].iter().zip(&r).map(|(u, v)| u - v).collect();
        let (e, n) = (space_norm(&d, &wx, p), space_norm(&r, &wx, p));
        if p == Norm::Inf {
            err = f64::max(err, e);
            norm = f64::max(norm, n);
        } else {
            err += wt[j] * e;
            norm += wt[j] * n;
        }
    }
    Ok(relative(finish(err, p), finish(norm, p)))
}

/// Relative spatial error at the snapshot `t_star`.
pub fn error_lp_char(a: &DensityField, reference: &DensityField, p: Norm, t_star: f64) -> Result<f64> {
    let row = a.snapshot(t_star)?;
    reference.snapshot_index(t_star)?;
    let r = reference.resample(t_star, &a.x)?;
    let wx = trapezoid_weights(&a.x);
    let d: Vec<f64> = row.iter().zip(&r).map(|(u, v)| u - v).collect();
    Ok(relative(finish(space_norm(&d, &wx, p), p), finish(space_norm(&r, &wx, p), p)))
}

/// One row of an error table.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorRow {
    pub model: String,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub cl1: f64,
    pub cl2: f64,
    pub clinf: f64,
}

impl ErrorRow {
    pub fn compute(model: &str, a: &DensityField, reference: &DensityField, t_star: f64) -> Result<Self> {
        Ok(Self {
            model: model.to_string(),
            l1: error_lp(a, reference, Norm::L1)?,
            l2: error_lp(a, reference, Norm::L2)?,
            linf: error_lp(a, reference, Norm::Inf)?,
            cl1: error_lp_char(a, reference, Norm::L1, t_star)?,
            cl2: error_lp_char(a, reference, Norm::L2, t_star)?,
            clinf: error_lp_char(a, reference, Norm::Inf, t_star)?,
        })
    }

    fn values(&self) -> [f64; 6] {
        [self.l1, self.l2, self.linf, self.cl1, self.cl2, self.clinf]
    }
}

pub const TABLE_HEADER: &str = "model,l1,l2,linf,cl1,cl2,clinf";

pub fn table_csv(rows: &[ErrorRow]) -> String {
    let mut out = format!("{TABLE_HEADER}\n");
    for r in rows {
        let vals: Vec<String> = r.values().iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{},{}", r.model, vals.join(","));
    }
    out
}

/// Aligned plain-text table.
pub fn table_text(title: &str, rows: &[ErrorRow]) -> String {
    let mut out = format!("{title}\n");
    let _ = writeln!(
        out,
        "{:<10} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "model", "L1", "L2", "Linf", "char L1", "char L2", "char Linf"
    );
    for r in rows {
        let _ = write!(out, "{:<10}", r.model);
        for v in r.values() {
            let _ = write!(out, " {v:>12.7}");
        }
        out.push('\n');
    }
    out
}

/// `x,density` rows.
pub fn snapshot_csv(x: &[f64], density: &[f64]) -> String {
    let mut out = String::from("x,density\n");
    for (x, d) in x.iter().zip(density) {
        let _ = writeln!(out, "{x},{d}");
    }
    out
}

pub fn snapshot_path(dir: &Path, label: &str, t: f64) -> PathBuf {
    dir.join(format!("snap_{label}_{t}.csv"))
}

/// Parses a file written by [`snapshot_csv`].
pub fn read_snapshot_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut x = Vec::new();
    let mut d = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let mut it = line.split(',');
        let mut next = |col: usize| -> Result<f64> {
            it.next().and_then(|s| s.trim().parse().ok()).ok_or(MomentError::Parse {
                line: i + 1,
                column: col,
                message: "expected two numbers".into(),
            })
        };
        x.push(next(1)?);
        d.push(next(2)?);
    }
    Ok((x, d))
}

/// Whole field as `t,x,density` rows, time-major.
pub fn field_csv(field: &DensityField) -> String {
    let mut out = String::from("t,x,density\n");
    for (t, row) in field.times.iter().zip(&field.values) {
        for (x, d) in field.x.iter().zip(row) {
            let _ = writeln!(out, "{t},{x},{d}");
        }
    }
    out
}

/// Parses a file written by [`field_csv`].
pub fn read_field_csv(text: &str) -> Result<DensityField> {
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let vals: Vec<f64> = line.split(',').filter_map(|s| s.trim().parse().ok()).collect();
        if vals.len() != 3 {
            return Err(MomentError::Parse { line: i + 1, column: 1, message: "expected three numbers".into() });
        }
        rows.push((vals[0], vals[1], vals[2]));
    }
    let Some(&(t0, _, _)) = rows.first() else {
        return Err(MomentError::Parse { line: 1, column: 1, message: "empty field".into() });
    };
    let x: Vec<f64> = rows.iter().take_while(|r| r.0 == t0).map(|r| r.1).collect();
    if !rows.len().is_multiple_of(x.len()) {
        return Err(MomentError::GridMismatch("ragged field file".into()));
    }
    let mut field = DensityField::new(x.clone());
    for chunk in rows.chunks(x.len()) {
        if chunk.iter().zip(&x).any(|(r, &xi)| r.0 != chunk[0].0 || r.1 != xi) {
            return Err(MomentError::GridMismatch("inconsistent field file".into()));
        }
        field.push(chunk[0].0, chunk.iter().map(|r| r.2).collect());
    }
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn field(f: impl Fn(f64, f64) -> f64) -> DensityField {
        let x: Vec<f64> = (0..50).map(|i| (i as f64 + 0.5) / 50.0).collect();
        let mut d = DensityField::new(x.clone());
        for k in 0..=4 {
            let t = k as f64 * 0.5;
            d.push(t, x.iter().map(|&x| f(t, x)).collect());
        }
        d
    }

    #[test]
    fn identical_and_doubled() {
        let a = field(|t, x| 1.0 + t * x);
        for p in [Norm::L1, Norm::L2, Norm::Inf] {
            assert_eq!(error_lp(&a, &a, p).unwrap(), 0.0);
            assert_eq!(error_lp_char(&a, &a, p, 1.0).unwrap(), 0.0);
        }
        let b = field(|t, x| 2.0 * (1.0 + t * x));
        assert!((error_lp(&b, &a, Norm::L1).unwrap() - 1.0).abs() < 1e-14);
        assert!((error_lp_char(&b, &a, Norm::Inf, 2.0).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn shifted_step_inf_error_is_one() {
        let a = field(|_, x| if x < 0.5 { 1.0 } else { 0.0 });
        let b = field(|_, x| if x < 0.52 { 1.0 } else { 0.0 });
        assert_eq!(error_lp_char(&b, &a, Norm::Inf, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn errors_on_missing_data() {
        let a = field(|_, _| 1.0);
        assert!(matches!(error_lp_char(&a, &a, Norm::L1, 0.7), Err(MomentError::MissingSnapshot(_))));
        let mut late = DensityField::new(a.x.clone());
        late.push(5.0, vec![1.0; 50]);
        assert!(matches!(error_lp(&a, &late, Norm::L1), Err(MomentError::GridMismatch(_))));
    }

    #[test]
    fn reference_on_finer_grid_is_interpolated() {
        let fine_x: Vec<f64> = (0..200).map(|i| (i as f64 + 0.5) / 200.0).collect();
        let mut fine = DensityField::new(fine_x.clone());
        for k in 0..=4 {
            let t = k as f64 * 0.5;
            fine.push(t, fine_x.iter().map(|&x| 1.0 + t * x).collect());
        }
        let coarse = field(|t, x| 1.0 + t * x);
        assert!(error_lp(&coarse, &fine, Norm::L1).unwrap() < 1e-14);
    }

    #[test]
    fn table_formats() {
        assert_eq!(table_csv(&[]), format!("{TABLE_HEADER}\n"));
        let a = field(|_, x| x);
        let row = ErrorRow::compute("mm1", &a, &a, 2.0).unwrap();
        assert_eq!(table_csv(&[row]), format!("{TABLE_HEADER}\nmm1,0,0,0,0,0,0\n"));
        let csv = snapshot_csv(&[0.25, 0.75], &[1.5, 1e-4]);
        assert_eq!(csv, "x,density\n0.25,1.5\n0.75,0.0001\n");
        assert_eq!(read_snapshot_csv(&csv).unwrap(), (vec![0.25, 0.75], vec![1.5, 1e-4]));
        assert_eq!(snapshot_path(Path::new("o"), "pn7", 0.5), Path::new("o/snap_pn7_0.5.csv"));
    }

    proptest! {
        #[test]
        fn norms_are_scale_invariant_and_satisfy_triangle(
            s in 0.1..10.0f64,
            a in prop::collection::vec(0.0..5.0f64, 50),
            b in prop::collection::vec(0.0..5.0f64, 50),
            c in prop::collection::vec(0.0..5.0f64, 50),
        ) {
            let mk = |v: &Vec<f64>, s: f64| {
                let mut f = DensityField::new((0..50).map(|i| i as f64).collect());
                f.push(0.0, v.iter().map(|x| x * s).collect());
                f.push(1.0, v.iter().map(|x| x * s * 0.5).collect());
                f
            };
            for p in [Norm::L1, Norm::L2, Norm::Inf] {
                let e = error_lp(&mk(&a, 1.0), &mk(&b, 1.0), p).unwrap();
                let es = error_lp(&mk(&a, s), &mk(&b, s), p).unwrap();
                prop_assert!(e >= 0.0);
                prop_assert!((e - es).abs() <= 1e-12 * e.max(1.0));
                // ‖a − r‖ ≤ ‖a − b‖ + ‖b − r‖ with the absolute norms
                let (fa, fb, fr) = (mk(&a, 1.0), mk(&b, 1.0), mk(&c, 1.0));
                let abs = |x: &DensityField, y: &DensityField| error_lp(x, y, p).unwrap() * norm_lp(y, p);
                prop_assert!(abs(&fa, &fr) <= abs(&fa, &fb) + abs(&fb, &fr) + 1e-9);
            }
        }
    }

    #[test]
    fn field_csv_round_trip() {
        let f = field(|t, x| (t + 1.0) * x.sin());
        assert_eq!(read_field_csv(&field_csv(&f)).unwrap(), f);
        assert!(read_field_csv("t,x,density\n0,1\n").is_err());
    }
}
