//! Properties of the shift objective on seeded random step functions.

use minoverlap::objective::{
    continuous_at_f64, shift_value_f64, shift_values_exact, shift_values_float, subgradient_f64,
};
use minoverlap::optimizer::{project_feasible, snap_to_certificate};
use minoverlap::stepfn::StepFunction;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    project_feasible(&v)
}

#[test]
fn dense_sampling_never_exceeds_grid_maximum() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..100 {
        let n = rng.random_range(2..=40);
        let v = random_values(&mut rng, n);
        let max = *shift_values_float(&v).unwrap().max_value();
        for s in 0..=10_000 {
            let k = -2.0 + 4.0 * s as f64 / 10_000.0;
            let g = continuous_at_f64(&v, k).value;
            assert!(g <= max + 1e-12, "n={n} k={k}: {g} > {max}");
        }
    }
}

#[test]
fn continuous_values_interpolate_grid_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..200 {
        let n = rng.random_range(1..=40);
        let v = random_values(&mut rng, n);
        let h = 2.0 / n as f64;
        let j = rng.random_range(-(n as i64)..n as i64);
        let t: f64 = rng.random();
        let expected = (1.0 - t) * shift_value_f64(&v, j) + t * shift_value_f64(&v, j + 1);
        let got = continuous_at_f64(&v, (j as f64 + t) * h).value;
        assert!((got - expected).abs() <= 1e-12, "n={n} j={j} t={t}");
    }
}

#[test]
fn grid_shifts_match_direct_integration() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..50 {
        let n = rng.random_range(1..=30);
        let v = random_values(&mut rng, n);
        let h = 2.0 / n as f64;
        for j in -(n as i64)..=n as i64 {
            let direct = continuous_at_f64(&v, j as f64 * h).value;
            assert!((direct - shift_value_f64(&v, j)).abs() <= 1e-12);
        }
    }
}

#[test]
fn subgradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let step = 1e-6;
    for _ in 0..100 {
        let n = rng.random_range(1..=30);
        let v = random_values(&mut rng, n);
        let j = rng.random_range(-(n as i64 - 1)..n as i64);
        let grad = subgradient_f64(&v, j).unwrap();
        for m in 0..n {
            let mut plus = v.clone();
            let mut minus = v.clone();
            plus[m] += step;
            minus[m] -= step;
            let fd = (shift_value_f64(&plus, j) - shift_value_f64(&minus, j)) / (2.0 * step);
            assert!(
                (fd - grad[m]).abs() <= 1e-6 * grad[m].abs().max(1.0),
                "n={n} j={j} m={m}"
            );
        }
    }
}

#[test]
fn boundary_shift_gradient_is_supported_on_the_ends() {
    let v = [0.2, 0.9, 0.4, 0.5];
    let g = subgradient_f64(&v, 3).unwrap();
    assert!(g[0] != 0.0 && g[3] != 0.0);
    assert_eq!((g[1], g[2]), (0.0, 0.0));
}

fn exact_function(v: &[f64], symmetric: bool) -> StepFunction {
    snap_to_certificate(&project_feasible(v), symmetric).unwrap()
}

proptest! {
    #[test]
    fn nonnegative_and_zero_beyond_support(v in prop::collection::vec(0.0f64..=1.0, 1..25)) {
        let f = exact_function(&v, false);
        let r = shift_values_exact(&f).unwrap();
        let n = f.n() as i64;
        for (_, g) in r.iter() {
            prop_assert!(g >= &minoverlap::rational::ratio(0, 1));
        }
        prop_assert!(num_traits::Zero::is_zero(&r.g(n)));
        prop_assert!(num_traits::Zero::is_zero(&r.g(-n - 3)));
        prop_assert!(r.argmax().iter().all(|j| &r.g(*j) == r.max_value()));
    }

    #[test]
    fn symmetric_functions_have_mirrored_shifts(half in prop::collection::vec(0.0f64..=1.0, 1..13), odd in any::<bool>()) {
        let n = 2 * half.len() - usize::from(odd);
        let v: Vec<f64> = (0..n).map(|i| half[i.min(n - 1 - i)]).collect();
        let f = exact_function(&v, true);
        prop_assert!(f.is_symmetric());
        let r = shift_values_exact(&f).unwrap();
        for j in 0..n as i64 {
            prop_assert_eq!(r.g(j), r.g(-j));
        }
    }
}
