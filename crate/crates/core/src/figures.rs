//! Tabulated curve data behind the three standard plots, with a small CSV
//! writer.
//!
//! The tables are plain grids of cells so callers (CLI, tests, the web demo)
//! can consume them without re-deriving any formula. Output is
//! deterministic: fixed column order, fixed grid order, floats printed to 12
//! significant digits, LF line endings.

use std::fmt::Write as _;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bounds::{
    kendall_excess_lower, kendall_excess_upper, kendall_excess_upper_linear,
    kendall_excess_upper_sublinear,
};
use crate::codes::construction_rate_asymptotic;
use crate::error::{Error, Result};

const LG_E: f64 = std::f64::consts::LOG2_E;

/// One table entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    /// Curve not defined at this grid point.
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(v) => Some(v as f64),
            Cell::Float(v) => Some(v),
            Cell::Empty => None,
        }
    }
}

/// A named table: header labels plus one row of cells per grid point.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn column_index(&self, label: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == label)
    }

    /// All values of one column; `None` entries are empty cells.
    pub fn column(&self, label: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.column_index(label)?;
        Some(self.rows.iter().map(|r| r[idx].as_f64()).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.columns.len());
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match *cell {
                    Cell::Int(v) => {
                        write!(out, "{v}").unwrap();
                    }
                    Cell::Float(v) => out.push_str(&format_sig12(v)),
                    Cell::Empty => {}
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Formats to 12 significant digits in plain decimal notation.
fn format_sig12(v: f64) -> String {
    if v == 0.0 {
        return "0.00000000000".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    // Take the decimal exponent from scientific formatting rather than
    // log10, which can land on the wrong side of a power of ten.
    let sci = format!("{v:e}");
    let epos = sci.find('e').unwrap();
    let exp: i32 = sci[epos + 1..].parse().unwrap();
    let decimals = (11 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

/// Parses a nonnegative number written as a decimal (`0.02`), an integer
/// (`3`), or a fraction (`1/50`) into an exact rational.
pub fn parse_decimal(s: &str) -> Result<Rational64> {
    let bad = |what: &str| Error::Parse(format!("{what}: {s:?}"));
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: i64 = num.trim().parse().map_err(|_| bad("bad fraction"))?;
        let d: i64 = den.trim().parse().map_err(|_| bad("bad fraction"))?;
        if d == 0 {
            return Err(bad("zero denominator"));
        }
        return Ok(Rational64::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let int: i64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad("bad decimal"))?
        };
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("bad decimal"));
        }
        let digits: i64 = frac.parse().map_err(|_| bad("bad decimal"))?;
        let scale = 10i64.pow(frac.len() as u32);
        return Ok(Rational64::from_integer(int) + Rational64::new(digits, scale));
    }
    let int: i64 = s.parse().map_err(|_| bad("bad number"))?;
    Ok(Rational64::from_integer(int))
}

/// Inclusive arithmetic progression `lo, lo+step, ...` up to `hi`.
pub fn decimal_grid(lo: Rational64, hi: Rational64, step: Rational64) -> Result<Vec<Rational64>> {
    if step <= Rational64::zero() || hi < lo {
        return Err(Error::Domain(format!(
            "bad grid: lo = {lo}, hi = {hi}, step = {step}"
        )));
    }
    let count = ((hi - lo) / step).floor().to_integer();
    let mut out = Vec::with_capacity(count as usize + 1);
    let mut v = lo;
    while v <= hi {
        out.push(v);
        v += step;
    }
    Ok(out)
}

/// A `lo:hi` or `lo:hi:step` range with exact endpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub lo: Rational64,
    pub hi: Rational64,
    pub step: Rational64,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<Rational64>> {
        decimal_grid(self.lo, self.hi, self.step)
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let (lo, hi, step) = match parts.as_slice() {
            [lo, hi] => (*lo, *hi, None),
            [lo, hi, step] => (*lo, *hi, Some(*step)),
            _ => {
                return Err(Error::Parse(format!(
                    "grid must be lo:hi or lo:hi:step, got {s:?}"
                )))
            }
        };
        let lo = parse_decimal(lo)?;
        let hi = parse_decimal(hi)?;
        let step = match step {
            Some(t) => parse_decimal(t)?,
            None => Rational64::one(),
        };
        Ok(GridSpec { lo, hi, step })
    }
}

/// Kendall excess-rate curves at fixed `n` over an integer-distortion grid.
///
/// Default grid: `D = 1 ..= n(n-1)/4`, i.e. relative distortion up to half
/// the diameter. The selected upper bound switches branches at `D = n`; the
/// two branch columns carry each form wherever it is defined (they overlap
/// only at `D = n`), since it is a judgment call which one a plot should
/// show right at the handoff.
pub fn fig1(n: usize, d_grid: Option<&GridSpec>) -> Result<Table> {
    if n < 2 {
        return Err(Error::Domain(format!("need n >= 2, got {n}")));
    }
    let ds: Vec<u64> = match d_grid {
        Some(spec) => {
            let pts = spec.points()?;
            let mut ds = Vec::with_capacity(pts.len());
            for p in pts {
                if !p.is_integer() || p.is_negative() {
                    return Err(Error::Domain(format!(
                        "distortion grid must be positive integers, got {p}"
                    )));
                }
                ds.push(p.to_integer() as u64);
            }
            ds
        }
        None => (1..=(n as u64 * (n as u64 - 1)) / 4).collect(),
    };
    let mut rows = Vec::with_capacity(ds.len());
    for d in ds {
        let lower = kendall_excess_lower(n, d)?;
        let upper = kendall_excess_upper(n, d)?;
        let sublinear = if d <= n as u64 {
            Cell::Float(kendall_excess_upper_sublinear(n, d)?)
        } else {
            Cell::Empty
        };
        let linear = if d >= n as u64 {
            Cell::Float(kendall_excess_upper_linear(n, d)?)
        } else {
            Cell::Empty
        };
        rows.push(vec![
            Cell::Int(d as i64),
            Cell::Float(d as f64 / n as f64),
            Cell::Float(lower.worst),
            Cell::Float(lower.average),
            Cell::Float(upper.value),
            sublinear,
            linear,
        ]);
    }
    Ok(Table {
        name: "fig1",
        columns: vec![
            "D",
            "delta",
            "lower_worst",
            "lower_average",
            "upper",
            "upper_sublinear",
            "upper_linear",
        ],
        rows,
    })
}

pub fn default_c_grid() -> Vec<Rational64> {
    (1..=49).map(|k| Rational64::new(k, 100)).collect()
}

/// Large-distortion comparison curves over a grid of `c` (with `D = c n^2`).
///
/// All four curves are reported as excess rate plus `lg n`, which cancels
/// the `n` out of every leading term, so the table has no `n` parameter.
/// The old window is `[ours_lower - 1, lg(e ceil(1/(2c)))]`.
pub fn fig2(c_grid: Option<&GridSpec>) -> Result<Table> {
    let cs = match c_grid {
        Some(spec) => spec.points()?,
        None => default_c_grid(),
    };
    let mut rows = Vec::with_capacity(cs.len());
    for c_rat in cs {
        let c = c_rat
            .to_f64()
            .ok_or_else(|| Error::Domain(format!("bad c: {c_rat}")))?;
        if !(0.0 < c && c < 0.5) {
            return Err(Error::Domain(format!(
                "fig2 needs 0 < c < 1/2, got {c_rat}"
            )));
        }
        let lower = -(std::f64::consts::E * c).log2();
        let upper = lower + (1.0 + c) * LG_E;
        let wang_lower = lower - 1.0;
        let wang_upper = LG_E + (1.0 / (2.0 * c)).ceil().log2();
        rows.push(vec![
            Cell::Float(c),
            Cell::Float(lower),
            Cell::Float(upper),
            Cell::Float(wang_lower),
            Cell::Float(wang_upper),
        ]);
    }
    Ok(Table {
        name: "fig2",
        columns: vec!["c", "lower", "upper", "wang_lower", "wang_upper"],
        rows,
    })
}

pub fn default_delta_grid() -> Vec<Rational64> {
    (1..=49).map(|k| Rational64::new(k, 50)).collect()
}

/// Chebyshev rate window plus the block construction's asymptotic rate over
/// a grid of relative distortion `delta`.
pub fn fig3(delta_grid: Option<&GridSpec>) -> Result<Table> {
    let deltas = match delta_grid {
        Some(spec) => spec.points()?,
        None => default_delta_grid(),
    };
    let mut rows = Vec::with_capacity(deltas.len());
    for delta in deltas {
        let d = delta
            .to_f64()
            .ok_or_else(|| Error::Domain(format!("bad delta: {delta}")))?;
        let window = crate::bounds::chebyshev_rate_leading(d)?;
        let construction = construction_rate_asymptotic(delta)?;
        rows.push(vec![
            Cell::Float(d),
            Cell::Float(window.lower),
            Cell::Float(window.upper),
            Cell::Float(construction),
        ]);
    }
    Ok(Table {
        name: "fig3",
        columns: vec!["delta", "lower", "upper", "construction"],
        rows,
    })
}

/// Which standard table to produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fig1" | "1" => Ok(FigureId::Fig1),
            "fig2" | "2" => Ok(FigureId::Fig2),
            "fig3" | "3" => Ok(FigureId::Fig3),
            other => Err(Error::Parse(format!("unknown figure {other:?}"))),
        }
    }
}

pub const FIG1_DEFAULT_N: usize = 50;

/// Dispatch by id; `n` only affects `fig1`.
pub fn figure_table(id: FigureId, n: Option<usize>, grid: Option<&GridSpec>) -> Result<Table> {
    match id {
        FigureId::Fig1 => fig1(n.unwrap_or(FIG1_DEFAULT_N), grid),
        FigureId::Fig2 => fig2(grid),
        FigureId::Fig3 => fig3(grid),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_formatting() {
        assert_eq!(format_sig12(-2.0), "-2.00000000000");
        assert_eq!(format_sig12(0.5), "0.500000000000");
        assert_eq!(format_sig12(0.0), "0.00000000000");
        assert_eq!(format_sig12(123.456789), "123.456789000");
        assert_eq!(format_sig12(1234567890123456.0), "1234567890123456");
        assert_eq!(format_sig12(0.000123), "0.000123000000000");
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_decimal("0.02").unwrap(), Rational64::new(1, 50));
        assert_eq!(parse_decimal("1/50").unwrap(), Rational64::new(1, 50));
        assert_eq!(parse_decimal("3").unwrap(), Rational64::from_integer(3));
        assert_eq!(parse_decimal(".5").unwrap(), Rational64::new(1, 2));
        assert!(parse_decimal("0.0.1").is_err());
        assert!(parse_decimal("x").is_err());
        let spec: GridSpec = "0.02:0.98:0.02".parse().unwrap();
        assert_eq!(spec.points().unwrap().len(), 49);
        let spec: GridSpec = "1:612".parse().unwrap();
        assert_eq!(spec.points().unwrap().len(), 612);
        assert!("1:2:3:4".parse::<GridSpec>().is_err());
    }

    #[test]
    fn fig1_shape_and_boundary() {
        let t = fig1(50, None).unwrap();
        assert_eq!(t.rows.len(), 612);
        assert_eq!(t.columns.len(), 7);

        let d_col = t.column("D").unwrap();
        let lower = t.column("lower_worst").unwrap();
        let avg = t.column("lower_average").unwrap();
        let upper = t.column("upper").unwrap();
        for i in 0..t.rows.len() {
            let (lo, av, up) = (lower[i].unwrap(), avg[i].unwrap(), upper[i].unwrap());
            assert!(up >= lo, "row {i}: upper {up} < lower {lo}");
            assert!(lo > av, "row {i}: worst should exceed average");
        }
        // delta = 1 row: lower is exactly -2.
        let at = d_col.iter().position(|d| *d == Some(50.0)).unwrap();
        assert_eq!(lower[at].unwrap(), -2.0);

        // Branch columns: sublinear through D = n, linear from D = n on.
        let sub = t.column("upper_sublinear").unwrap();
        let lin = t.column("upper_linear").unwrap();
        assert!(sub[at].is_some() && lin[at].is_some());
        assert!(sub[at - 1].is_some() && lin[at - 1].is_none());
        assert!(sub[at + 1].is_none() && lin[at + 1].is_some());
        assert_eq!(upper[at - 1], sub[at - 1]);
        assert_eq!(upper[at], lin[at]);
    }

    #[test]
    fn fig2_gap_to_previous_bounds() {
        let t = fig2(None).unwrap();
        assert_eq!(t.rows.len(), 49);
        let lower = t.column("lower").unwrap();
        let upper = t.column("upper").unwrap();
        let wl = t.column("wang_lower").unwrap();
        let wu = t.column("wang_upper").unwrap();
        for i in 0..49 {
            let gap = lower[i].unwrap() - wl[i].unwrap();
            assert!((gap - 1.0).abs() <= 1e-12, "row {i}: gap {gap}");
            assert!(upper[i].unwrap() >= lower[i].unwrap());
            assert!(wu[i].unwrap() >= wl[i].unwrap());
            // The new window's upper edge beats the old one everywhere here.
            assert!(upper[i].unwrap() < wu[i].unwrap(), "row {i}");
        }
        // Consistency with the finite-n evaluators at an arbitrary n.
        let n = 100usize;
        let lgn = (n as f64).log2();
        for (i, c) in default_c_grid().iter().enumerate() {
            let cf = c.to_f64().unwrap();
            let ours = crate::bounds::kendall_asymptotic(
                crate::bounds::Regime::Large { c: cf },
                n,
            )
            .unwrap();
            let (a, b) = crate::bounds::wang_large_distortion(cf, n).unwrap();
            assert!((lower[i].unwrap() - (ours.lower + lgn)).abs() < 1e-9);
            assert!((upper[i].unwrap() - (ours.upper + lgn)).abs() < 1e-9);
            assert!((wl[i].unwrap() - (a + lgn)).abs() < 1e-9);
            assert!((wu[i].unwrap() - (b + lgn)).abs() < 1e-9);
        }
    }

    #[test]
    fn fig3_ordering_and_midpoint() {
        let t = fig3(None).unwrap();
        assert_eq!(t.rows.len(), 49);
        let deltas = t.column("delta").unwrap();
        let lower = t.column("lower").unwrap();
        let upper = t.column("upper").unwrap();
        let cons = t.column("construction").unwrap();
        for i in 0..49 {
            assert!(upper[i].unwrap() >= lower[i].unwrap(), "row {i}");
            assert!(
                cons[i].unwrap() >= upper[i].unwrap() - 1e-12,
                "construction under the upper bound at delta = {:?}",
                deltas[i]
            );
        }
        let mid = deltas.iter().position(|d| *d == Some(0.5)).unwrap();
        assert_eq!(cons[mid].unwrap(), 1.0);
        assert_eq!(upper[mid].unwrap(), 1.0);
        assert!((lower[mid].unwrap() - (LG_E - 1.0)).abs() < 1e-15);
        // delta with integral 1/delta: rate collapses to lg(1/delta).
        let at02 = deltas.iter().position(|d| *d == Some(0.2)).unwrap();
        assert!((cons[at02].unwrap() - 5f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip_shape() {
        let t = fig3(None).unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.split('\n').collect();
        assert_eq!(lines[0], "delta,lower,upper,construction");
        assert_eq!(lines.len(), 51); // header + 49 rows + trailing empty
        assert_eq!(lines[50], "");
        assert!(lines[1].starts_with("0.0200000000000,"));
        // Empty cells leave their slot blank but keep the separators.
        let t1 = fig1(6, None).unwrap();
        let csv1 = t1.to_csv();
        let first_row = csv1.split('\n').nth(1).unwrap();
        assert_eq!(first_row.matches(',').count(), 6);
        assert!(first_row.ends_with(','), "no linear branch at D=1: {first_row}");
    }

    #[test]
    fn dispatcher_and_overrides() {
        let t = figure_table(FigureId::Fig1, Some(10), None).unwrap();
        assert_eq!(t.rows.len(), 22); // 10*9/4 = 22
        let grid: GridSpec = "5:20:5".parse().unwrap();
        let t = figure_table(FigureId::Fig1, Some(10), Some(&grid)).unwrap();
        assert_eq!(t.rows.len(), 4);
        assert!(figure_table(FigureId::Fig1, Some(1), None).is_err());
        let bad: GridSpec = "0.5:0.9:0.1".parse().unwrap();
        assert!(fig2(Some(&bad)).is_err());
        assert_eq!("fig2".parse::<FigureId>().unwrap(), FigureId::Fig2);
        assert!("fig9".parse::<FigureId>().is_err());
    }
}
