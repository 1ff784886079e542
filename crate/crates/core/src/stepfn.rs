//! Step functions on `[0, 2]` with `n` equal-width steps and exact rational values.
//!
//! Step `i` owns the half-open interval `[2i/n, 2(i+1)/n)`; the last step is
//! closed at `2`. Values are kept as exact rationals. Float shadows are derived on
//! demand.

use std::fs;
use std::path::Path;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, is_in_unit_interval, parse_decimal, ratio, to_f64, Rational};

/// A step function with `n = values.len()` equal steps on `[0, 2]`.
///
/// Construction through [`StepFunction::new`] enforces the box and the unit
/// integral. [`StepFunction::raw`] accepts any values so intermediate iterates can
/// be held; call [`StepFunction::validate`] before certifying anything.
#[derive(Clone, Debug)]
pub struct StepFunction {
    values: Vec<Rational>,
    label: Option<String>,
}

impl PartialEq for StepFunction {
    // the label is metadata
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}

impl Eq for StepFunction {}

impl StepFunction {
    /// Strict constructor: values in `[0, 1]` and integral exactly 1.
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        let f = Self::raw(values)?;
        f.validate()?;
        Ok(f)
    }

    /// Unchecked apart from `n >= 1`.
    pub fn raw(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument(
                "a step function needs at least one step".into(),
            ));
        }
        Ok(Self {
            values,
            label: None,
        })
    }

    /// Values in `[0, 1]` and integral 1.
    pub fn validate(&self) -> Result<()> {
        self.check_box()?;
        let integral = self.integral();
        if !integral.is_one() {
            return Err(Error::NotNormalized {
                integral: rational::to_fraction_string(&integral),
            });
        }
        Ok(())
    }

    /// Values in `[0, 1]`.
    pub fn check_box(&self) -> Result<()> {
        match self.values.iter().position(|v| !is_in_unit_interval(v)) {
            Some(index) => Err(Error::Domain {
                index,
                value: rational::to_exact_decimal(&self.values[index])
                    .unwrap_or_else(|| rational::to_fraction_string(&self.values[index])),
            }),
            None => Ok(()),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// `h = 2/n`.
    pub fn step_width(&self) -> Rational {
        ratio(2, self.n() as i64)
    }

    /// `h · Σ values`, the exact integral over `[0, 2]`.
    pub fn integral(&self) -> Rational {
        let sum: Rational = self.values.iter().sum();
        sum * self.step_width()
    }

    pub fn is_normalized(&self) -> bool {
        self.integral().is_one()
    }

    /// `values[i] == values[n-1-i]` for all `i`, i.e. `f(x) = f(2 - x)`.
    pub fn is_symmetric(&self) -> bool {
        let n = self.n();
        (0..n / 2).all(|i| self.values[i] == self.values[n - 1 - i])
    }

    /// Nearest-double copy of the values.
    pub fn float_values(&self) -> Vec<f64> {
        self.values.iter().map(to_f64).collect()
    }

    /// Values on `[0, 1]`: the first `⌈n/2⌉` steps.
    pub fn half_values(&self) -> &[Rational] {
        &self.values[..self.n().div_ceil(2)]
    }

    /// Index of the step containing `x`, or `None` outside `[0, 2]`.
    pub fn step_index(&self, x: &Rational) -> Option<usize> {
        if x < &Rational::zero() || x > &ratio(2, 1) {
            return None;
        }
        let i = (x / self.step_width()).floor().to_integer();
        let i: usize = i.try_into().ok()?;
        Some(i.min(self.n() - 1))
    }

    /// Point evaluation under the half-open step convention.
    pub fn value_at(&self, x: &Rational) -> Option<&Rational> {
        self.step_index(x).map(|i| &self.values[i])
    }
}

/// Extends the values on `[0, 1]` to `[0, 2]` by `f(x) = f(2 - x)`.
///
/// `half` must hold `⌈n/2⌉` entries. For odd `n` the middle step straddles
/// `x = 1` and maps to itself under the reflection.
pub fn build_symmetric(n: usize, half: &[Rational]) -> Result<StepFunction> {
    if n == 0 {
        return Err(Error::Argument(
            "a step function needs at least one step".into(),
        ));
    }
    let m = n.div_ceil(2);
    if half.len() != m {
        return Err(Error::Length {
            what: "half_values",
            expected: m,
            found: half.len(),
        });
    }
    if let Some(index) = half.iter().position(|v| !is_in_unit_interval(v)) {
        return Err(Error::Domain {
            index,
            value: rational::to_fraction_string(&half[index]),
        });
    }
    let values = (0..n)
        .map(|i| {
            if i < m {
                half[i].clone()
            } else {
                half[n - 1 - i].clone()
            }
        })
        .collect();
    StepFunction::raw(values)
}

fn parse_all(strings: &[&str]) -> Vec<Rational> {
    strings
        .iter()
        .map(|s| parse_decimal(s).expect("built-in table is well formed"))
        .collect()
}

/// Values on `[0, 1]` of the published 15-step function.
pub const P15_HALF: [&str; 8] = [
    "0",
    "0.09938602",
    "0.64299877",
    "0.36104582",
    "0.69536426",
    "0.59241335",
    "0.89573331",
    "0.92611694",
];

/// Values on `[0, 1]` of the published 19-step function.
pub const P19_HALF: [&str; 10] = [
    "0",
    "0",
    "0.348795091509472207",
    "0.742684181900847446",
    "0.207655267155520404",
    "0.780222086674911898",
    "0.568104573396874436",
    "0.689049157609512654",
    "0.967251286500411737",
    "0.892476710504898436",
];

/// Values on `[0, 1]` of the published 51-step function.
pub const P51_HALF: [&str; 26] = [
    "0",
    "0",
    "0",
    "0",
    "0",
    "0.0002938681556273",
    "0.5952882223921177",
    "0.7844530825484313",
    "0.8950034338013842",
    "0.0597964076006748",
    "0.0189602838469592",
    "0.7420501628172980",
    "0.6444559588500921",
    "0.3549040817844764",
    "0.8762442385073478",
    "0.5437907313675501",
    "0.2679640048997296",
    "0.8518954615823791",
    "0.5211171156914872",
    "1",
    "0.5506146790047043",
    "0.9007715390796991",
    "0.8229000691941086",
    "0.8879541710440111",
    "0.9315424878319221",
    "1",
];

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 3] = ["p15", "p19", "p51"];

/// One of the published functions by name: `p15`, `p19` or `p51`.
pub fn builtin(name: &str) -> Option<StepFunction> {
    let (n, half): (usize, &[&str]) = match name {
        "p15" => (15, &P15_HALF),
        "p19" => (19, &P19_HALF),
        "p51" => (51, &P51_HALF),
        _ => return None,
    };
    let f = build_symmetric(n, &parse_all(half)).expect("built-in table is valid");
    Some(f.with_label(name))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepFile {
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    half_values: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

fn parse_list(list: &[String], field: &'static str) -> Result<Vec<Rational>> {
    list.iter()
        .enumerate()
        .map(|(i, s)| parse_decimal(s).map_err(|e| Error::Format(format!("{field}[{i}]: {e}"))))
        .collect()
}

/// Parses the JSON step-function format.
///
/// Exactly one of `values` (n entries) or `half_values` (⌈n/2⌉ entries) must be
/// present, all as decimal strings. Values must lie in `[0, 1]`; the integral is
/// not checked here.
pub fn from_json_str(text: &str) -> Result<StepFunction> {
    let file: StepFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    if file.n == 0 {
        return Err(Error::Format("n must be positive".into()));
    }
    let f = match (&file.values, &file.half_values) {
        (Some(values), None) => {
            if values.len() != file.n {
                return Err(Error::Length {
                    what: "values",
                    expected: file.n,
                    found: values.len(),
                });
            }
            let f = StepFunction::raw(parse_list(values, "values")?)?;
            f.check_box()?;
            f
        }
        (None, Some(half)) => build_symmetric(file.n, &parse_list(half, "half_values")?)?,
        (Some(_), Some(_)) => {
            return Err(Error::Format(
                "give either `values` or `half_values`, not both".into(),
            ))
        }
        (None, None) => {
            return Err(Error::Format(
                "missing field `values` or `half_values`".into(),
            ))
        }
    };
    Ok(match file.label {
        Some(label) => f.with_label(label),
        None => f,
    })
}

/// Serializes to the JSON step-function format.
///
/// Symmetric functions are written as `half_values`. Every value must have a
/// terminating decimal expansion.
pub fn to_json_string(f: &StepFunction) -> Result<String> {
    let render = |vs: &[Rational]| -> Result<Vec<String>> {
        vs.iter()
            .enumerate()
            .map(|(i, v)| {
                rational::to_exact_decimal(v).ok_or_else(|| {
                    Error::Format(format!(
                        "value {i} ({}) has no terminating decimal expansion",
                        rational::to_fraction_string(v)
                    ))
                })
            })
            .collect()
    };
    let file = if f.is_symmetric() {
        StepFile {
            n: f.n(),
            values: None,
            half_values: Some(render(f.half_values())?),
            label: f.label.clone(),
        }
    } else {
        StepFile {
            n: f.n(),
            values: Some(render(f.values())?),
            half_values: None,
            label: f.label.clone(),
        }
    };
    let mut text = serde_json::to_string_pretty(&file).map_err(|e| Error::Format(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

pub fn load(path: impl AsRef<Path>) -> Result<StepFunction> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    from_json_str(&text)
}

pub fn store(f: &StepFunction, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_json_string(f)?).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
