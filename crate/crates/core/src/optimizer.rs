//! Projected subgradient search over feasible step functions.
//!
//! The feasible set is `{v ∈ [0,1]^n : Σ v = n/2}` (unit integral). Each
//! iteration steps against the gradient of one maximizing shift `g[j*]` (the
//! lowest index on ties) with step size `s0 / √(t+1)`, then projects back.
//! When a sweep of iterations stops improving the best value, an optional
//! annealing kick perturbs the iterate and accepts by the Metropolis rule.
//!
//! The final float iterate is snapped to 18 decimal digits, rebalanced exactly
//! so the integral is 1, and certified in exact arithmetic.

use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::objective::{self, shift_values_float, subgradient_f64};
use crate::rational::{self, from_f64_rounded, ratio, Rational};
use crate::stepfn::StepFunction;

/// Decimal digits kept when snapping a float iterate to a certificate.
pub const CERTIFICATE_DIGITS: u32 = 18;

/// Target accuracy of `Σ v = n/2` in [`project_feasible`].
pub const PROJECTION_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct AnnealConfig {
    pub initial_temperature: f64,
    /// Multiplicative cooling per kick, in `(0, 1)`.
    pub cooling: f64,
    /// No kicks below this temperature.
    pub min_temperature: f64,
    /// Perturbation half-width at the initial temperature; scales with `T / T0`.
    pub amplitude: f64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            initial_temperature: 1e-2,
            cooling: 0.8,
            min_temperature: 1e-5,
            amplitude: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub n: usize,
    /// Optimize only `⌈n/2⌉` free values and mirror them.
    pub symmetric: bool,
    pub restarts: usize,
    pub max_iters: usize,
    /// `s0` in the step schedule `s_t = s0 / √(t+1)`.
    pub initial_step: f64,
    /// Iterations per sweep for the stopping rule.
    pub sweep_len: usize,
    /// Stop when a sweep improves the best value by less than this.
    pub tolerance: f64,
    pub anneal: Option<AnnealConfig>,
    pub seed: u64,
}

impl OptimizerConfig {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            symmetric: false,
            restarts: 50,
            max_iters: 2000,
            initial_step: 0.1,
            sweep_len: 100,
            tolerance: 1e-12,
            anneal: None,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Argument(msg.to_string()));
        if self.n == 0 {
            return bad("n must be positive");
        }
        if self.restarts == 0 {
            return bad("restarts must be positive");
        }
        if self.sweep_len == 0 {
            return bad("sweep length must be positive");
        }
        if !(self.initial_step.is_finite() && self.initial_step > 0.0) {
            return bad("initial step must be positive");
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return bad("tolerance must be non-negative");
        }
        if let Some(a) = &self.anneal {
            if !(a.initial_temperature.is_finite() && a.initial_temperature > 0.0) {
                return bad("annealing temperature must be positive");
            }
            if !(a.cooling > 0.0 && a.cooling < 1.0) {
                return bad("annealing cooling factor must lie in (0, 1)");
            }
            if !(a.min_temperature >= 0.0 && a.amplitude >= 0.0 && a.amplitude.is_finite()) {
                return bad("annealing minimum temperature and amplitude must be non-negative");
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    /// Normalized, in the box, integral exactly 1.
    pub best: StepFunction,
    pub best_value_float: f64,
    /// Exact maximum overlap of `best`.
    pub best_value_exact: Rational,
    pub argmax: Vec<i64>,
    /// Certified value of each restart, in restart order.
    pub history: Vec<Rational>,
    /// Index into `history` of the selected run.
    pub best_restart: usize,
    pub seed: u64,
}

impl RunResult {
    /// Plain-text sidecar report: certified value, configuration and history.
    pub fn report(&self, cfg: &OptimizerConfig) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "certified_value {}",
            rational::to_decimal(&self.best_value_exact, 40)
        );
        let _ = writeln!(
            out,
            "certified_fraction {}",
            rational::to_fraction_string(&self.best_value_exact)
        );
        let argmax: Vec<String> = self.argmax.iter().map(i64::to_string).collect();
        let _ = writeln!(out, "argmax {}", argmax.join(" "));
        let _ = writeln!(out, "float_value {}", self.best_value_float);
        let _ = writeln!(out, "seed {}", self.seed);
        let _ = writeln!(out, "n {}", cfg.n);
        let _ = writeln!(out, "symmetric {}", cfg.symmetric);
        let _ = writeln!(out, "restarts {}", cfg.restarts);
        let _ = writeln!(out, "max_iters {}", cfg.max_iters);
        let _ = writeln!(out, "initial_step {}", cfg.initial_step);
        let _ = writeln!(out, "sweep_len {}", cfg.sweep_len);
        let _ = writeln!(out, "tolerance {:e}", cfg.tolerance);
        match &cfg.anneal {
            Some(a) => {
                let _ = writeln!(
                    out,
                    "anneal T0={} cooling={} Tmin={} amplitude={}",
                    a.initial_temperature, a.cooling, a.min_temperature, a.amplitude
                );
            }
            None => out.push_str("anneal off\n"),
        }
        let _ = writeln!(out, "best_restart {}", self.best_restart);
        for (r, v) in self.history.iter().enumerate() {
            let _ = writeln!(out, "restart {r} {}", rational::to_decimal(v, 20));
        }
        out
    }
}

fn sum_clamped(v: &[f64], shift: f64) -> f64 {
    v.iter().map(|x| (x + shift).clamp(0.0, 1.0)).sum()
}

/// Euclidean projection onto `{v ∈ [0,1]^n : Σ v = n/2}`.
///
/// The projection has the form `clamp(v_i + λ, 0, 1)`; `λ` is found by
/// bisection on the monotone map `λ ↦ Σ clamp(v_i + λ)`, then polished by
/// solving for `λ` exactly on the free coordinates.
pub fn project_feasible(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    if v.iter().any(|x| !x.is_finite()) {
        return vec![f64::NAN; v.len()];
    }
    let target = v.len() as f64 / 2.0;
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);

    // Σ at lo is 0, Σ at hi is n.
    let (mut lo, mut hi) = (-max, 1.0 - min);
    let mut lambda = 0.5 * (lo + hi);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        lambda = mid;
        let s = sum_clamped(v, lambda);
        if (s - target).abs() <= PROJECTION_TOLERANCE {
            break;
        }
        if s < target {
            lo = lambda;
        } else {
            hi = lambda;
        }
    }

    let (mut free_sum, mut free, mut ones) = (0.0, 0usize, 0usize);
    for x in v {
        let y = x + lambda;
        if y >= 1.0 {
            ones += 1;
        } else if y > 0.0 {
            free += 1;
            free_sum += x;
        }
    }
    if free > 0 {
        let polished = (target - ones as f64 - free_sum) / free as f64;
        if (sum_clamped(v, polished) - target).abs() <= (sum_clamped(v, lambda) - target).abs() {
            lambda = polished;
        }
    }
    v.iter().map(|x| (x + lambda).clamp(0.0, 1.0)).collect()
}

fn symmetrize(g: &mut [f64]) {
    let n = g.len();
    for i in 0..n / 2 {
        let avg = 0.5 * (g[i] + g[n - 1 - i]);
        g[i] = avg;
        g[n - 1 - i] = avg;
    }
}

/// Max value and lowest maximizing shift.
fn evaluate(x: &[f64]) -> Result<(f64, i64)> {
    let report = shift_values_float(x)?;
    Ok((*report.max_value(), report.argmax()[0]))
}

fn check_finite(x: &[f64], iteration: usize) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::Numeric {
            iteration,
            detail: format!("step value {i} is {}", x[i]),
        }),
        None => Ok(()),
    }
}

/// Snaps a feasible float vector to 18-digit decimals and restores `Σ = n/2` exactly.
///
/// The correction goes to the largest value strictly inside `(0, 1)` (split across
/// the mirror pair in symmetric mode) that can absorb it without leaving the box.
pub fn snap_to_certificate(v: &[f64], symmetric: bool) -> Result<StepFunction> {
    let n = v.len();
    check_finite(v, 0)?;
    let zero = Rational::zero();
    let one = Rational::one();
    let mut values: Vec<Rational> = v
        .iter()
        .map(|&x| {
            let r = from_f64_rounded(x, CERTIFICATE_DIGITS).expect("finite");
            r.clamp(zero.clone(), one.clone())
        })
        .collect();
    if symmetric {
        for i in 0..n / 2 {
            values[n - 1 - i] = values[i].clone();
        }
    }

    let sum: Rational = values.iter().sum();
    let deficit = ratio(n as i64, 2) - sum;
    if !deficit.is_zero() {
        let m = if symmetric { n.div_ceil(2) } else { n };
        let mut order: Vec<usize> = (0..m)
            .filter(|&i| values[i] > zero && values[i] < one)
            .collect();
        // largest first, lowest index on ties
        order.sort_by(|&a, &b| values[b].cmp(&values[a]).then(a.cmp(&b)));
        let fits = |x: &Rational| !x.is_negative() && x <= &one;
        let mut done = false;
        for i in order {
            let paired = symmetric && n - 1 - i != i;
            let delta = if paired {
                &deficit / ratio(2, 1)
            } else {
                deficit.clone()
            };
            let adjusted = &values[i] + &delta;
            if fits(&adjusted) {
                if paired {
                    values[n - 1 - i] = adjusted.clone();
                }
                values[i] = adjusted;
                done = true;
                break;
            }
        }
        if !done {
            return Err(Error::Numeric {
                iteration: 0,
                detail: format!(
                    "cannot restore unit integral: deficit {} and no interior value absorbs it",
                    rational::to_fraction_string(&deficit)
                ),
            });
        }
    }
    StepFunction::new(values)
}

fn anneal_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * restart as u64 + 1);
    rng
}

fn start_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * restart as u64);
    rng
}

/// The seeded random start of restart `restart`: i.i.d. uniform values in
/// `[0, 1]` (mirrored in symmetric mode), projected and snapped.
///
/// Streams come from ChaCha8 seeded with `cfg.seed`, stream `2·restart`.
pub fn random_start(cfg: &OptimizerConfig, restart: usize) -> Result<StepFunction> {
    cfg.validate()?;
    let mut rng = start_rng(cfg.seed, restart);
    let n = cfg.n;
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    if cfg.symmetric {
        for i in 0..n / 2 {
            v[n - 1 - i] = v[i];
        }
    }
    snap_to_certificate(&project_feasible(&v), cfg.symmetric)
}

struct Descent {
    best: Vec<f64>,
    best_value: f64,
    improved: bool,
}

fn descend(x0: Vec<f64>, cfg: &OptimizerConfig, rng: &mut ChaCha8Rng) -> Result<Descent> {
    let n = x0.len();
    let mut x = x0;
    let (mut current, mut jstar) = evaluate(&x)?;
    let mut out = Descent {
        best: x.clone(),
        best_value: current,
        improved: false,
    };
    let mut temperature = cfg.anneal.as_ref().map(|a| a.initial_temperature);
    let mut sweep_start = out.best_value;

    for t in 0..cfg.max_iters {
        let mut grad = subgradient_f64(&x, jstar)?;
        if cfg.symmetric {
            symmetrize(&mut grad);
        }
        let step = cfg.initial_step / ((t + 1) as f64).sqrt();
        let moved: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - step * gi).collect();
        check_finite(&moved, t)?;
        x = project_feasible(&moved);
        check_finite(&x, t)?;
        (current, jstar) = evaluate(&x)?;
        if current < out.best_value {
            out.best.clone_from(&x);
            out.best_value = current;
            out.improved = true;
        }

        if (t + 1) % cfg.sweep_len != 0 {
            continue;
        }
        if sweep_start - out.best_value >= cfg.tolerance {
            sweep_start = out.best_value;
            continue;
        }
        // stalled
        match (&cfg.anneal, temperature) {
            (Some(a), Some(temp)) if temp > a.min_temperature => {
                let width = a.amplitude * temp / a.initial_temperature;
                let mut noise: Vec<f64> = (0..n)
                    .map(|_| width * (2.0 * rng.random::<f64>() - 1.0))
                    .collect();
                if cfg.symmetric {
                    for i in 0..n / 2 {
                        noise[n - 1 - i] = noise[i];
                    }
                }
                let u: f64 = rng.random();
                let proposal: Vec<f64> = x.iter().zip(&noise).map(|(a, b)| a + b).collect();
                let proposal = project_feasible(&proposal);
                check_finite(&proposal, t)?;
                let (value, j) = evaluate(&proposal)?;
                let delta = value - current;
                if delta <= 0.0 || u < (-delta / temp).exp() {
                    x = proposal;
                    current = value;
                    jstar = j;
                    if current < out.best_value {
                        out.best.clone_from(&x);
                        out.best_value = current;
                        out.improved = true;
                    }
                }
                temperature = Some(temp * a.cooling);
                sweep_start = out.best_value;
            }
            _ => break,
        }
    }
    Ok(out)
}

fn run(start: &StepFunction, cfg: &OptimizerConfig, restart: usize) -> Result<RunResult> {
    cfg.validate()?;
    if start.n() != cfg.n {
        return Err(Error::Argument(format!(
            "start has {} steps but the configuration asks for {}",
            start.n(),
            cfg.n
        )));
    }
    start
        .validate()
        .map_err(|e| Error::Argument(format!("infeasible start: {e}")))?;
    if cfg.symmetric && !start.is_symmetric() {
        return Err(Error::Argument(
            "symmetric search needs a symmetric start".into(),
        ));
    }

    let mut rng = anneal_rng(cfg.seed, restart);
    let descent = descend(start.float_values(), cfg, &mut rng)?;
    let best = if descent.improved {
        snap_to_certificate(&descent.best, cfg.symmetric)?
    } else {
        start.clone()
    };
    let certificate = objective::certify(&best)?;
    let (best_value_float, _) = evaluate(&best.float_values())?;
    let value = certificate.max_value().clone();
    Ok(RunResult {
        best,
        best_value_float,
        best_value_exact: value.clone(),
        argmax: certificate.argmax().to_vec(),
        history: vec![value],
        best_restart: 0,
        seed: cfg.seed,
    })
}

/// One descent from `start`, returning the certified best point.
///
/// With `max_iters = 0`, or when no iterate beats the start, the start itself
/// is returned unchanged.
pub fn minimize(start: &StepFunction, cfg: &OptimizerConfig) -> Result<RunResult> {
    run(start, cfg, 0)
}

/// `cfg.restarts` independent descents from seeded random starts.
///
/// Returns the run with the smallest certified value (lowest restart index on
/// ties). Restarts run in parallel; the result does not depend on scheduling.
pub fn multi_start(cfg: &OptimizerConfig) -> Result<RunResult> {
    cfg.validate()?;
    let runs: Vec<RunResult> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| random_start(cfg, r).and_then(|start| run(&start, cfg, r)))
        .collect::<Result<_>>()?;

    let history: Vec<Rational> = runs.iter().map(|r| r.best_value_exact.clone()).collect();
    let mut best_restart = 0;
    for (r, v) in history.iter().enumerate() {
        if v < &history[best_restart] {
            best_restart = r;
        }
    }
    let mut result = runs.into_iter().nth(best_restart).expect("restarts > 0");
    result.history = history;
    result.best_restart = best_restart;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stepfn::build_symmetric;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn projection_examples() {
        assert!(close(&project_feasible(&[0.5, 0.5]), &[0.5, 0.5], 1e-12));
        assert!(close(&project_feasible(&[0.0, 0.0]), &[0.5, 0.5], 1e-12));
        assert!(close(&project_feasible(&[2.0, -1.0]), &[1.0, 0.0], 1e-12));
        assert!(close(&project_feasible(&[7.0]), &[0.5], 1e-12));
        assert!(project_feasible(&[]).is_empty());
        assert!(project_feasible(&[f64::NAN, 0.0])
            .iter()
            .all(|x| x.is_nan()));
    }

    #[test]
    fn projection_preserves_mirror_symmetry_exactly() {
        let v = [0.3, -0.7, 1.9, 0.4, 1.9, -0.7, 0.3];
        let p = project_feasible(&v);
        for i in 0..v.len() {
            assert_eq!(p[i].to_bits(), p[v.len() - 1 - i].to_bits());
        }
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig::new(5).validate().is_ok());
        let mut cfg = OptimizerConfig::new(5);
        cfg.restarts = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = OptimizerConfig::new(5);
        cfg.initial_step = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = OptimizerConfig::new(5);
        cfg.tolerance = -1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = OptimizerConfig::new(5);
        cfg.anneal = Some(AnnealConfig {
            cooling: 1.0,
            ..AnnealConfig::default()
        });
        assert!(cfg.validate().is_err());
        assert!(OptimizerConfig::new(0).validate().is_err());
    }

    #[test]
    fn zero_iterations_return_start() {
        let start = build_symmetric(2, &[ratio(1, 2)]).unwrap();
        let mut cfg = OptimizerConfig::new(2);
        cfg.max_iters = 0;
        let res = minimize(&start, &cfg).unwrap();
        assert_eq!(res.best, start);
        assert_eq!(res.best_value_exact, ratio(1, 2));
    }

    #[test]
    fn stationary_start_stays_put() {
        // g[0] is active at (1/2, 1/2) and its gradient vanishes there.
        let start = build_symmetric(2, &[ratio(1, 2)]).unwrap();
        let res = minimize(&start, &OptimizerConfig::new(2)).unwrap();
        assert_eq!(res.best_value_exact, ratio(1, 2));
    }

    #[test]
    fn infeasible_or_mismatched_starts_are_rejected() {
        let raw = StepFunction::raw(vec![ratio(1, 2), ratio(1, 4)]).unwrap();
        assert!(matches!(
            minimize(&raw, &OptimizerConfig::new(2)),
            Err(Error::Argument(_))
        ));
        let ok = StepFunction::new(vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        assert!(matches!(
            minimize(&ok, &OptimizerConfig::new(3)),
            Err(Error::Argument(_))
        ));
        let skew = StepFunction::new(vec![ratio(1, 1), ratio(0, 1)]).unwrap();
        let mut cfg = OptimizerConfig::new(2);
        cfg.symmetric = true;
        assert!(matches!(minimize(&skew, &cfg), Err(Error::Argument(_))));
    }

    #[test]
    fn snapping_restores_integral_exactly() {
        let v = project_feasible(&[0.1, 0.7, 0.3, 0.9, 0.2, 0.55, 0.61]);
        let f = snap_to_certificate(&v, false).unwrap();
        assert!(f.integral().is_one());
        let sym = project_feasible(&[0.1, 0.7, 0.3, 0.9, 0.3, 0.7, 0.1]);
        let f = snap_to_certificate(&sym, true).unwrap();
        assert!(f.integral().is_one() && f.is_symmetric());
    }

    #[test]
    fn single_step_is_forced_to_half() {
        let mut cfg = OptimizerConfig::new(1);
        cfg.restarts = 3;
        let res = multi_start(&cfg).unwrap();
        assert_eq!(res.best.values(), &[ratio(1, 2)]);
        assert_eq!(res.best_value_exact, ratio(1, 2));
    }

    #[test]
    fn annealing_run_is_certified_and_deterministic() {
        let mut cfg = OptimizerConfig::new(9);
        cfg.symmetric = true;
        cfg.restarts = 4;
        cfg.max_iters = 600;
        cfg.sweep_len = 50;
        cfg.anneal = Some(AnnealConfig::default());
        cfg.seed = 3;
        let a = multi_start(&cfg).unwrap();
        let b = multi_start(&cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.best.is_symmetric());
        assert_eq!(
            objective::certify(&a.best).unwrap().max_value(),
            &a.best_value_exact
        );
    }

    #[test]
    fn report_lists_history() {
        let mut cfg = OptimizerConfig::new(4);
        cfg.restarts = 2;
        cfg.max_iters = 50;
        let res = multi_start(&cfg).unwrap();
        let text = res.report(&cfg);
        assert!(text.starts_with("certified_value 0."));
        assert!(text.contains("restart 0 ") && text.contains("restart 1 "));
        assert!(text.contains("seed 0\n"));
    }
}
