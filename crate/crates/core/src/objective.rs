//! The shift objective `g(k) = ∫ f(x) (1 - f(x + k)) dx` and its maximum over `k`.
//!
//! The integral runs over the overlap window `{x : x ∈ [0, 2], x + k ∈ [0, 2]}`.
//! For an `n`-step function with width `h = 2/n`, `g` is piecewise linear in `k`
//! with breakpoints at multiples of `h`, so its maximum over all real shifts is
//! attained at a grid shift `k = j·h` with `|j| < n`. At those shifts
//!
//! ```text
//! g[j] = h · Σ_{0 ≤ i, i+j < n} values[i] · (1 - values[i + j])
//! ```

use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, ratio, Rational};
use crate::stepfn::StepFunction;

/// Float-mode values within this distance of the maximum count as ties.
pub const FLOAT_TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float,
}

/// A scalar produced in either mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Rational),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rational::to_f64(r),
            Value::Float(x) => *x,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => f.write_str(&rational::to_decimal(r, 40)),
            Value::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Per-shift values `g[j]` for `j ∈ {-(n-1), ..., n-1}`, with their maximum.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftReport<T> {
    n: usize,
    g: Vec<T>,
    max_value: T,
    argmax: Vec<i64>,
}

impl<T> ShiftReport<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_value(&self) -> &T {
        &self.max_value
    }

    /// Shift indices attaining the maximum, ascending.
    pub fn argmax(&self) -> &[i64] {
        &self.argmax
    }

    /// `(j, g[j])` for every stored shift, ascending in `j`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &T)> + '_ {
        let offset = self.n as i64 - 1;
        self.g
            .iter()
            .enumerate()
            .map(move |(idx, v)| (idx as i64 - offset, v))
    }

    fn index(&self, j: i64) -> Option<usize> {
        let offset = self.n as i64 - 1;
        if j.abs() > offset {
            None
        } else {
            Some((j + offset) as usize)
        }
    }
}

impl<T: Clone + Zero> ShiftReport<T> {
    /// `g[j]`; zero for `|j| >= n` where the overlap window misses every step pair.
    pub fn g(&self, j: i64) -> T {
        match self.index(j) {
            Some(idx) => self.g[idx].clone(),
            None => T::zero(),
        }
    }
}

pub type ExactReport = ShiftReport<Rational>;
pub type FloatReport = ShiftReport<f64>;

/// Either report, as returned by [`shift_values`].
#[derive(Clone, Debug, PartialEq)]
pub enum Report {
    Exact(ExactReport),
    Float(FloatReport),
}

impl Report {
    pub fn n(&self) -> usize {
        match self {
            Report::Exact(r) => r.n(),
            Report::Float(r) => r.n(),
        }
    }

    pub fn max_value(&self) -> Value {
        match self {
            Report::Exact(r) => Value::Exact(r.max_value().clone()),
            Report::Float(r) => Value::Float(*r.max_value()),
        }
    }

    pub fn argmax(&self) -> &[i64] {
        match self {
            Report::Exact(r) => r.argmax(),
            Report::Float(r) => r.argmax(),
        }
    }

    /// CSV with columns `j,k,g` and a trailing `# max=...,argmax=...` row.
    ///
    /// Exact mode prints `k` and `g` to 40 decimal places; float mode uses the
    /// shortest round-trip representation.
    pub fn to_csv(&self) -> String {
        let n = self.n() as i64;
        let mut out = String::from("j,k,g\n");
        match self {
            Report::Exact(r) => {
                for (j, g) in r.iter() {
                    let k = ratio(2 * j, n);
                    let _ = writeln!(
                        out,
                        "{j},{},{}",
                        rational::to_decimal(&k, 40),
                        rational::to_decimal(g, 40)
                    );
                }
            }
            Report::Float(r) => {
                for (j, g) in r.iter() {
                    let _ = writeln!(out, "{j},{},{g}", 2.0 * j as f64 / n as f64);
                }
            }
        }
        let argmax: Vec<String> = self.argmax().iter().map(i64::to_string).collect();
        let _ = writeln!(
            out,
            "# max={},argmax={}",
            self.max_value(),
            argmax.join(";")
        );
        out
    }
}

fn check_box_f64(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !(0.0..=1.0).contains(v)) {
        Some(index) => Err(Error::Domain {
            index,
            value: values[index].to_string(),
        }),
        None => Ok(()),
    }
}

/// Exact per-shift values. Values must lie in `[0, 1]`; the integral is not checked.
pub fn shift_values_exact(f: &StepFunction) -> Result<ExactReport> {
    f.check_box()?;
    let n = f.n();

    // Put every value over one common denominator and sum integer products.
    let den = f
        .values()
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let nums: Vec<BigInt> = f
        .values()
        .iter()
        .map(|v| v.numer() * (&den / v.denom()))
        .collect();
    let complements: Vec<BigInt> = nums.iter().map(|p| &den - p).collect();
    // g[j] = (2/n) Σ p_i (D - p_{i+j}) / D²
    let scale = BigInt::from(n) * &den * &den;

    let g: Vec<Rational> = (-(n as i64 - 1)..n as i64)
        .map(|j| {
            let lo = 0.max(-j) as usize;
            let hi = (n as i64).min(n as i64 - j) as usize;
            let mut acc = BigInt::zero();
            for (p, q) in nums[lo..hi]
                .iter()
                .zip(&complements[(lo as i64 + j) as usize..])
            {
                acc += p * q;
            }
            BigRational::new(acc * 2, scale.clone())
        })
        .collect();

    let max_value = g.iter().max().cloned().expect("at least one shift");
    let argmax = g
        .iter()
        .enumerate()
        .filter(|(_, v)| **v == max_value)
        .map(|(idx, _)| idx as i64 - (n as i64 - 1))
        .collect();
    Ok(ShiftReport {
        n,
        g,
        max_value,
        argmax,
    })
}

/// `g[j]` in floating point without any domain checks.
///
/// Sums in ascending `i` so the result does not depend on evaluation order
/// elsewhere.
pub fn shift_value_f64(values: &[f64], j: i64) -> f64 {
    let n = values.len() as i64;
    let h = 2.0 / n as f64;
    let lo = 0.max(-j);
    let hi = n.min(n - j);
    let mut acc = 0.0;
    for i in lo..hi {
        acc += values[i as usize] * (1.0 - values[(i + j) as usize]);
    }
    h * acc
}

/// Floating-point per-shift values for a raw value vector in `[0, 1]`.
pub fn shift_values_float(values: &[f64]) -> Result<FloatReport> {
    if values.is_empty() {
        return Err(Error::Argument(
            "a step function needs at least one step".into(),
        ));
    }
    check_box_f64(values)?;
    let n = values.len();
    let g: Vec<f64> = (-(n as i64 - 1)..n as i64)
        .map(|j| shift_value_f64(values, j))
        .collect();
    let max_value = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let argmax = g
        .iter()
        .enumerate()
        .filter(|(_, v)| max_value - **v <= FLOAT_TIE_TOLERANCE)
        .map(|(idx, _)| idx as i64 - (n as i64 - 1))
        .collect();
    Ok(ShiftReport {
        n,
        g,
        max_value,
        argmax,
    })
}

pub fn shift_values(f: &StepFunction, mode: Mode) -> Result<Report> {
    match mode {
        Mode::Exact => shift_values_exact(f).map(Report::Exact),
        Mode::Float => {
            f.check_box()?;
            shift_values_float(&f.float_values()).map(Report::Float)
        }
    }
}

/// `(max_k g(k), argmax)`.
pub fn max_overlap(f: &StepFunction, mode: Mode) -> Result<(Value, Vec<i64>)> {
    let report = shift_values(f, mode)?;
    Ok((report.max_value(), report.argmax().to_vec()))
}

/// Exact report for a function that must be fully valid, integral included.
///
/// This is the certificate path: raw iterates are refused.
pub fn certify(f: &StepFunction) -> Result<ExactReport> {
    f.validate()?;
    shift_values_exact(f)
}

/// `g` at an arbitrary real shift `k`, integrated directly over the overlap window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowIntegral {
    pub value: f64,
    /// The window `{x ∈ [0,2] : x + k ∈ [0,2]}` has zero length (`|k| >= 2`).
    pub empty_window: bool,
}

/// Piecewise integration of `f(x)(1 - f(x + k))` with no grid assumption on `k`.
pub fn continuous_at(f: &StepFunction, k: f64) -> WindowIntegral {
    continuous_at_f64(&f.float_values(), k)
}

pub fn continuous_at_f64(values: &[f64], k: f64) -> WindowIntegral {
    let n = values.len();
    let h = 2.0 / n as f64;
    let lo = 0f64.max(-k);
    let hi = 2f64.min(2.0 - k);
    if hi <= lo {
        return WindowIntegral {
            value: 0.0,
            empty_window: true,
        };
    }

    let step = |x: f64| ((x / h).floor().max(0.0) as usize).min(n - 1);
    // Breakpoints of f(x) and of f(x + k), both ascending; merge them.
    let own = (1..n).map(|i| i as f64 * h);
    let shifted = (1..n).map(|i| i as f64 * h - k);
    let mut cuts: Vec<f64> = Vec::with_capacity(2 * n + 2);
    cuts.push(lo);
    {
        let mut a = own.peekable();
        let mut b = shifted.peekable();
        loop {
            let next = match (a.peek(), b.peek()) {
                (Some(&x), Some(&y)) if x <= y => a.next(),
                (Some(_), Some(_)) => b.next(),
                (Some(_), None) => a.next(),
                (None, Some(_)) => b.next(),
                (None, None) => break,
            };
            let x = next.expect("peeked");
            if x > lo && x < hi {
                cuts.push(x);
            }
        }
    }
    cuts.push(hi);

    let mut acc = 0.0;
    for w in cuts.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        let mid = 0.5 * (w[0] + w[1]);
        acc += values[step(mid)] * (1.0 - values[step(mid + k)]) * len;
    }
    WindowIntegral {
        value: acc,
        empty_window: false,
    }
}

/// Gradient of `g[j]` with respect to the step values.
///
/// Component `m` is `h(1 - v[m+j])` when `m + j` is a step, minus `h·v[m-j]`
/// when `m - j` is a step.
pub fn subgradient_f64(values: &[f64], j: i64) -> Result<Vec<f64>> {
    let n = values.len() as i64;
    if j.abs() >= n {
        return Err(Error::Argument(format!(
            "shift index {j} outside -(n-1)..=(n-1) for n = {n}"
        )));
    }
    let h = 2.0 / n as f64;
    Ok((0..n)
        .map(|m| {
            let mut d = 0.0;
            if (0..n).contains(&(m + j)) {
                d += h * (1.0 - values[(m + j) as usize]);
            }
            if (0..n).contains(&(m - j)) {
                d -= h * values[(m - j) as usize];
            }
            d
        })
        .collect())
}

pub fn subgradient(f: &StepFunction, j: i64) -> Result<Vec<f64>> {
    subgradient_f64(&f.float_values(), j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_decimal;
    use crate::stepfn::builtin;

    fn f(values: &[(i64, i64)]) -> StepFunction {
        StepFunction::raw(values.iter().map(|&(a, b)| ratio(a, b)).collect()).unwrap()
    }

    #[test]
    fn constant_half_two_steps() {
        let r = shift_values_exact(&f(&[(1, 2), (1, 2)])).unwrap();
        assert_eq!(r.g(-1), ratio(1, 4));
        assert_eq!(r.g(0), ratio(1, 2));
        assert_eq!(r.g(1), ratio(1, 4));
        assert_eq!(r.max_value(), &ratio(1, 2));
        assert_eq!(r.argmax(), &[0]);
    }

    #[test]
    fn indicator_of_left_half() {
        let r = shift_values_exact(&f(&[(1, 1), (0, 1)])).unwrap();
        assert_eq!(r.g(-1), ratio(0, 1));
        assert_eq!(r.g(0), ratio(0, 1));
        assert_eq!(r.g(1), ratio(1, 1));
        assert_eq!(r.argmax(), &[1]);
        let (v, argmax) = max_overlap(&f(&[(1, 1), (0, 1)]), Mode::Exact).unwrap();
        assert_eq!(v, Value::Exact(ratio(1, 1)));
        assert_eq!(argmax, vec![1]);
    }

    #[test]
    fn shifts_beyond_support_are_zero() {
        let r = shift_values_exact(&f(&[(1, 2), (1, 2)])).unwrap();
        assert!(r.g(2).is_zero() && r.g(-5).is_zero());
    }

    #[test]
    fn p15_value_rounds_up_to_published_digits() {
        let r = shift_values_exact(&builtin("p15").unwrap()).unwrap();
        let m = r.max_value();
        assert!(m > &parse_decimal("0.38153154").unwrap());
        assert!(m <= &parse_decimal("0.38153155").unwrap());
    }

    #[test]
    fn out_of_box_values_are_rejected() {
        let bad = f(&[(3, 2), (1, 2)]);
        assert!(matches!(
            shift_values_exact(&bad),
            Err(Error::Domain { index: 0, .. })
        ));
        assert!(matches!(
            shift_values(&bad, Mode::Float),
            Err(Error::Domain { .. })
        ));
        assert!(shift_values_float(&[0.5, -0.1]).is_err());
    }

    #[test]
    fn certification_refuses_unnormalized() {
        let raw = f(&[(1, 2), (1, 4)]);
        assert!(shift_values_exact(&raw).is_ok());
        assert!(matches!(certify(&raw), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn continuous_values() {
        let half = f(&[(1, 2), (1, 2)]);
        assert_eq!(continuous_at(&half, 0.0).value, 0.5);
        assert!((continuous_at(&half, 0.5).value - 0.375).abs() < 1e-15);
        // linear between g[0] = 1/2 and g[1] = 1/4
        let interp = 0.5 * 0.5 + 0.5 * 0.25;
        assert!((continuous_at(&half, 0.5).value - interp).abs() < 1e-15);
        let edge = continuous_at(&half, 2.0);
        assert_eq!(edge.value, 0.0);
        assert!(edge.empty_window);
        assert!(continuous_at(&half, -2.5).empty_window);
        assert!(!continuous_at(&half, 1.9).empty_window);
    }

    #[test]
    fn gradient_examples() {
        assert_eq!(
            subgradient(&f(&[(1, 2), (1, 2)]), 0).unwrap(),
            vec![0.0, 0.0]
        );
        assert_eq!(
            subgradient(&f(&[(1, 1), (0, 1)]), 1).unwrap(),
            vec![1.0, -1.0]
        );
        assert!(matches!(
            subgradient(&f(&[(1, 1), (0, 1)]), 2),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn float_ties_group_within_tolerance() {
        let r = shift_values_float(&[0.5, 0.5, 0.5]).unwrap();
        assert_eq!(r.argmax(), &[0]);
        let sym = shift_values_float(&[0.0, 1.0, 0.5, 0.5]).unwrap();
        let (a, b) = (sym.g(-1), sym.g(1));
        if (a - b).abs() <= FLOAT_TIE_TOLERANCE && *sym.max_value() == a.max(b) {
            assert!(sym.argmax().contains(&-1) && sym.argmax().contains(&1));
        }
    }

    #[test]
    fn csv_layout() {
        let report = shift_values(&f(&[(1, 1), (0, 1)]), Mode::Exact).unwrap();
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "j,k,g");
        assert_eq!(lines.len(), 5);
        assert!(lines[3].starts_with("1,1.0000"));
        assert!(lines[4].starts_with("# max=1.0000") && lines[4].ends_with(",argmax=1"));
        let float = shift_values(&f(&[(1, 1), (0, 1)]), Mode::Float)
            .unwrap()
            .to_csv();
        assert!(float.contains("\n1,1,1\n"));
    }
}
