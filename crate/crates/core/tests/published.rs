use minoverlap::objective::{self, Mode, Value};
use minoverlap::rational::{parse_decimal, to_f64};
use minoverlap::stepfn::{self, BUILTIN_NAMES, P15_HALF};
use num_traits::{One, Signed};

fn dec(s: &str) -> minoverlap::Rational {
    parse_decimal(s).unwrap()
}

#[test]
fn p15_rounds_up_to_eight_digits() {
    let r = objective::certify(&stepfn::builtin("p15").unwrap()).unwrap();
    assert!(r.max_value() > &dec("0.38153154"));
    assert!(r.max_value() <= &dec("0.38153155"));
}

#[test]
fn p19_within_one_unit_of_last_digit() {
    let (v, argmax) =
        objective::max_overlap(&stepfn::builtin("p19").unwrap(), Mode::Exact).unwrap();
    let Value::Exact(v) = v else {
        panic!("exact mode")
    };
    assert!((&v - dec("0.381112263316104816")).abs() <= dec("0.000000000000000001"));
    assert_eq!(argmax, vec![-3, 3]);
}

#[test]
fn p51_rounds_to_sixteen_significant_digits() {
    let (v, _) = objective::max_overlap(&stepfn::builtin("p51").unwrap(), Mode::Exact).unwrap();
    let Value::Exact(v) = v else {
        panic!("exact mode")
    };
    assert!((&v - dec("0.3809268534330870")).abs() <= dec("0.00000000000000005"));
    assert_eq!(
        minoverlap::rational::to_decimal(&v, 16),
        "0.3809268534330870"
    );
}

#[test]
fn builtins_have_unit_integral() {
    for name in BUILTIN_NAMES {
        let f = stepfn::builtin(name).unwrap();
        assert!(f.integral().is_one(), "{name}");
        f.check_box().unwrap();
    }
}

#[test]
fn p15_from_symmetric_builder_equals_builtin() {
    let half: Vec<_> = P15_HALF.iter().map(|s| dec(s)).collect();
    let f = stepfn::build_symmetric(15, &half).unwrap();
    assert_eq!(f, stepfn::builtin("p15").unwrap());
}

#[test]
fn exact_and_float_maxima_agree() {
    for name in BUILTIN_NAMES {
        let f = stepfn::builtin(name).unwrap();
        let (exact, _) = objective::max_overlap(&f, Mode::Exact).unwrap();
        let (float, _) = objective::max_overlap(&f, Mode::Float).unwrap();
        let Value::Exact(e) = exact else { panic!() };
        assert!((to_f64(&e) - float.to_f64()).abs() <= 1e-12, "{name}");
    }
}

#[test]
fn published_functions_attain_max_symmetrically() {
    for name in BUILTIN_NAMES {
        let r = objective::shift_values_exact(&stepfn::builtin(name).unwrap()).unwrap();
        for j in 0..r.n() as i64 {
            assert_eq!(r.g(j), r.g(-j));
        }
        let argmax = r.argmax();
        assert!(argmax.iter().all(|j| argmax.contains(&-j)));
    }
}
