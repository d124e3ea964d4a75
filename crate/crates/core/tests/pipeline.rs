use momentcone::io::{
    measure_to_json, moments_to_json, parse_measure, parse_moments, parse_polynomial, polynomial_to_json,
};
use momentcone::{
    box_from_weight, dual_norm_of_moments, is_psd_functional, moments_of_measure, recover_measure,
    verify_representation, AtomicMeasure, BoxSpec, Exponent, MultiIndex, Polynomial, RecoveryConfig,
    WeightSpec,
};
use proptest::prelude::*;

fn poly1(coefs: &[f64]) -> Polynomial {
    Polynomial::from_terms(
        1,
        coefs
            .iter()
            .enumerate()
            .map(|(k, c)| (MultiIndex::new(vec![k as u32]), *c)),
    )
    .unwrap()
}

#[test]
fn measure_to_recovered_measure() {
    let mu = AtomicMeasure::new(2, vec![vec![0.3, -0.7], vec![-0.5, 0.1]], vec![0.4, 1.1]).unwrap();
    let s = moments_of_measure(&mu, 4);
    assert!(is_psd_functional(&s, 2, None).unwrap());

    let w = WeightSpec::new(Exponent::new(2.0).unwrap(), vec![1.0, 1.0]).unwrap();
    let hypothesis = dual_norm_of_moments(&s, &w).unwrap();
    assert!(hypothesis.value.is_finite() && !hypothesis.growing);

    let k = box_from_weight(&w);
    let rec = recover_measure(&s, &k, &RecoveryConfig::default()).unwrap();
    assert!(rec.residual <= 1e-6);
    let report = verify_representation(&s, &rec.measure, Some(&k), 1e-6).unwrap();
    assert!(report.pass, "{report:?}");
    assert_eq!(report.atoms_in_box, Some(true));
}

#[test]
fn json_round_trips() {
    let f = poly1(&[1.0, -0.25, 0.0, 3.5e-20]);
    let text = polynomial_to_json(&f).to_string();
    assert_eq!(parse_polynomial(&text).unwrap(), f);

    let mu = AtomicMeasure::new(1, vec![vec![0.1], vec![0.7]], vec![0.2, 0.8]).unwrap();
    assert_eq!(parse_measure(&measure_to_json(&mu).to_string()).unwrap(), mu);

    let s = moments_of_measure(&mu, 5);
    let back = parse_moments(&moments_to_json(&s).to_string()).unwrap();
    for (alpha, value) in s.iter() {
        assert_eq!(back.get(alpha), Some(value));
    }
}

#[test]
fn measure_outside_box_is_not_recovered_inside() {
    let mu = AtomicMeasure::dirac(vec![1.6], 1.0).unwrap();
    let s = moments_of_measure(&mu, 6);
    let unit = BoxSpec::symmetric(&[1.0]).unwrap();
    assert!(recover_measure(&s, &unit, &RecoveryConfig::default()).is_err());
    let wide = BoxSpec::symmetric(&[2.0]).unwrap();
    assert!(recover_measure(&s, &wide, &RecoveryConfig::default()).is_ok());
}

fn measure_1d() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    // atoms on a 1/8 lattice of [-1, 1], so they are at least 1/8 apart
    proptest::sample::subsequence((0..=16).collect::<Vec<i32>>(), 1..=3).prop_flat_map(|idx| {
        let atoms: Vec<f64> = idx.iter().map(|&i| -1.0 + i as f64 / 8.0).collect();
        let n = atoms.len();
        (Just(atoms), proptest::collection::vec(0.1f64..2.0, n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn functional_of_square_is_integral_of_square(
        (atoms, weights) in measure_1d(),
        coefs in proptest::collection::vec(-2.0f64..2.0, 1..=3),
    ) {
        let mu = AtomicMeasure::new(1, atoms.iter().map(|x| vec![*x]).collect(), weights.clone()).unwrap();
        let s = moments_of_measure(&mu, 4);
        let h = poly1(&coefs);
        let by_functional = s.apply(&h.square()).unwrap();
        let direct: f64 = atoms
            .iter()
            .zip(&weights)
            .map(|(x, w)| {
                let v: f64 = coefs.iter().enumerate().map(|(k, c)| c * x.powi(k as i32)).sum();
                w * v * v
            })
            .sum();
        prop_assert!((by_functional - direct).abs() <= 1e-12 * (1.0 + direct.abs()));
        prop_assert!(by_functional >= -1e-12);
    }

    #[test]
    fn recovered_measure_reproduces_moments((atoms, weights) in measure_1d()) {
        let mu = AtomicMeasure::new(1, atoms.iter().map(|x| vec![*x]).collect(), weights).unwrap();
        let s = moments_of_measure(&mu, 6);
        let k = BoxSpec::symmetric(&[1.0]).unwrap();
        let rec = recover_measure(&s, &k, &RecoveryConfig::default()).unwrap();
        prop_assert!(rec.residual <= 1e-6);
        for atom in rec.measure.atoms() {
            prop_assert!(atom[0].abs() <= 1.0);
        }
        prop_assert!(rec.measure.weights().iter().all(|w| *w >= 0.0));
        let mass: f64 = rec.measure.weights().iter().sum();
        prop_assert!((mass - mu.mass()).abs() <= 1e-6);
    }
}
