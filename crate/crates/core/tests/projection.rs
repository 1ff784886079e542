use minoverlap::optimizer::project_feasible;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn assert_feasible(p: &[f64]) {
    assert!(p.iter().all(|x| (0.0..=1.0).contains(x)));
    let sum: f64 = p.iter().sum();
    assert!((sum - p.len() as f64 / 2.0).abs() <= 1e-12, "sum {sum}");
}

#[test]
fn projection_is_feasible_and_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..1000 {
        let n = rng.random_range(1..=40);
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..4.0)).collect();
        let p = project_feasible(&v);
        assert_feasible(&p);
        let q = project_feasible(&p);
        assert!(p.iter().zip(&q).all(|(a, b)| (a - b).abs() <= 1e-12));
    }
}

#[test]
fn projection_fixes_feasible_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..1000 {
        let n = rng.random_range(1..=40);
        let u: Vec<f64> = (0..n).map(|_| rng.random()).collect();
        let feasible = project_feasible(&u);
        let again = project_feasible(&feasible);
        assert!(feasible
            .iter()
            .zip(&again)
            .all(|(a, b)| (a - b).abs() <= 1e-12));
    }
}

// No sampled feasible point may be closer to the input than the projection.
#[test]
fn projection_beats_random_feasible_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let pools: Vec<Vec<Vec<f64>>> = (0..=6)
        .map(|n| {
            (0..10_000)
                .map(|_| project_feasible(&(0..n).map(|_| rng.random()).collect::<Vec<f64>>()))
                .collect()
        })
        .collect();
    for _ in 0..1000 {
        let n = rng.random_range(1..=6);
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..2.5)).collect();
        let best = dist2(&v, &project_feasible(&v)).sqrt();
        for candidate in &pools[n] {
            assert!(best <= dist2(&v, candidate).sqrt() + 1e-9);
        }
    }
}
