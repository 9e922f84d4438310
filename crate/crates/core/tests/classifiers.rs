use biasline_core::ml::metrics::{auroc, auroc_trapezoid};
use biasline_core::ml::mlp::Network;
use biasline_core::ml::{
    evaluate, fit, transfer_protocol, transfer_protocol_with, AdaBoost, AdaBoostParams, Dataset, DecisionTree,
    ForestParams, LogisticParams, Matrix, MaxFeatures, MlpParams, ModelParams, ModelSpec, QdaParams, RandomForest,
    TreeParams,
};
use biasline_core::{rng, Error};
use rand::Rng;

fn names(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("x{i}")).collect()
}

fn dataset(rows: Vec<Vec<f64>>, y: Vec<u8>) -> Dataset {
    let k = rows[0].len();
    Dataset::new(Matrix::from_rows(&rows).unwrap(), y, names(k)).unwrap()
}

/// `n` points per class around `(-c, -c)` and `(c, c)`, unit variance.
fn blobs(n: usize, c: f64, seed: u64) -> Dataset {
    let mut r = rng::seeded(seed);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for i in 0..2 * n {
        let label = (i % 2) as u8;
        let centre = if label == 1 { c } else { -c };
        rows.push(vec![centre + rng::normal(&mut r), centre + rng::normal(&mut r)]);
        y.push(label);
    }
    dataset(rows, y)
}

fn xor() -> Dataset {
    dataset(
        vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]],
        vec![0, 1, 1, 0],
    )
}

fn accuracy(spec: &ModelSpec, train: &Dataset, test: &Dataset) -> f64 {
    let m = fit(spec, train).unwrap();
    evaluate(&test.y, &m.predict_proba(&test.x, &test.feature_names).unwrap()).unwrap().accuracy
}

fn lr() -> ModelSpec {
    ModelSpec::new(ModelParams::LogisticRegression(LogisticParams::default()), 0)
}

#[test]
fn logistic_separates_blobs() {
    let d = blobs(100, 3.0, 1);
    assert_eq!(d.len(), 200);
    assert!(accuracy(&lr(), &d, &d) >= 0.95);
}

#[test]
fn xor_tree_exact_logistic_capped() {
    let d = xor();
    let tree = ModelSpec::new(
        ModelParams::DecisionTree(TreeParams {
            max_depth: 2,
            ..TreeParams::default()
        }),
        0,
    );
    assert_eq!(accuracy(&tree, &d, &d), 1.0);
    assert!(accuracy(&lr(), &d, &d) <= 0.75);
}

#[test]
fn constant_features_predict_majority() {
    let rows = vec![vec![1.0, 5.0]; 10];
    let y = vec![1, 1, 1, 0, 1, 0, 1, 1, 0, 1];
    let d = dataset(rows, y);
    let prior = 0.7;
    for params in [
        ModelParams::LogisticRegression(LogisticParams::default()),
        ModelParams::DecisionTree(TreeParams::default()),
        ModelParams::RandomForest(ForestParams {
            n_trees: 5,
            ..ForestParams::default()
        }),
        ModelParams::Mlp(MlpParams {
            epochs: 200,
            ..MlpParams::default()
        }),
        ModelParams::AdaBoost(AdaBoostParams::default()),
    ] {
        let spec = ModelSpec::new(params, 3);
        let m = fit(&spec, &d).unwrap();
        let preds = m.predict(&d.x, &d.feature_names).unwrap();
        assert!(preds.iter().all(|&p| p == 1), "{}", spec.kind_name());
        assert!((accuracy(&spec, &d, &d) - prior).abs() < 1e-12);
    }
}

#[test]
fn single_class_rejected() {
    let d = dataset(vec![vec![0.0], vec![1.0], vec![2.0]], vec![1, 1, 1]);
    assert_eq!(fit(&lr(), &d), Err(Error::SingleClass));
    let one_neg = dataset(vec![vec![0.0], vec![1.0], vec![2.0]], vec![0, 1, 1]);
    let qda = ModelSpec::new(ModelParams::Qda(QdaParams::default()), 0);
    assert!(matches!(fit(&qda, &one_neg), Err(Error::InvalidDataset(_))));
}

#[test]
fn qda_singular_covariance() {
    // both features identical within each class, zero ridge
    let rows = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]];
    let d = dataset(rows, vec![0, 0, 1, 1]);
    let qda = ModelSpec::new(ModelParams::Qda(QdaParams { ridge: 0.0 }), 0);
    assert!(matches!(fit(&qda, &d), Err(Error::SingularCovariance(_))));
}

#[test]
fn invalid_hyperparameters() {
    let d = xor();
    for params in [
        ModelParams::DecisionTree(TreeParams {
            max_depth: 0,
            ..TreeParams::default()
        }),
        ModelParams::RandomForest(ForestParams {
            n_trees: 0,
            ..ForestParams::default()
        }),
        ModelParams::Mlp(MlpParams {
            hidden: 0,
            ..MlpParams::default()
        }),
    ] {
        assert!(matches!(fit(&ModelSpec::new(params, 0), &d), Err(Error::InvalidConfig(_))));
    }
}

#[test]
fn prediction_shape_and_feature_guard() {
    let d = blobs(20, 2.0, 4);
    let m = fit(&lr(), &d).unwrap();
    assert_eq!(m.predict_proba(&d.x, &d.feature_names).unwrap().len(), d.y.len());
    let wrong = vec!["x0".to_string(), "z".to_string()];
    match m.predict_proba(&d.x, &wrong) {
        Err(Error::FeatureMismatch { missing, unexpected }) => {
            assert_eq!(missing, vec!["x1".to_string()]);
            assert_eq!(unexpected, vec!["z".to_string()]);
        }
        other => panic!("{other:?}"),
    }
    // permuted columns are matched by name
    let swapped = d.x.select_cols(&[1, 0]);
    let names_swapped = vec!["x1".to_string(), "x0".to_string()];
    assert_eq!(
        m.predict_proba(&swapped, &names_swapped).unwrap(),
        m.predict_proba(&d.x, &d.feature_names).unwrap()
    );
}

#[test]
fn monotone_logistic_scores() {
    let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
    let y = (0..20).map(|i| u8::from(i >= 10)).collect();
    let d = dataset(rows, y);
    let m = fit(&lr(), &d).unwrap();
    let probe = Matrix::from_rows(&(0..40).map(|i| vec![i as f64 / 2.0]).collect::<Vec<_>>()).unwrap();
    let s = m.predict_proba(&probe, &d.feature_names).unwrap();
    assert!(s.windows(2).all(|w| w[1] > w[0]));
    assert!(s.iter().all(|v| v.is_finite() && (0.0..=1.0).contains(v)));
}

#[test]
fn single_tree_forest_equals_tree() {
    let d = blobs(60, 1.0, 5);
    for max_features in [MaxFeatures::All, MaxFeatures::Count(1)] {
        let tree = DecisionTree::fit(
            &d.x,
            &d.y,
            &TreeParams {
                max_features,
                ..TreeParams::default()
            },
            9,
        )
        .unwrap();
        let forest = RandomForest::fit(
            &d.x,
            &d.y,
            &ForestParams {
                n_trees: 1,
                bootstrap: false,
                max_features,
                ..ForestParams::default()
            },
            9,
        )
        .unwrap();
        assert_eq!(&forest.trees()[0], &tree);
        assert_eq!(forest.predict_proba(&d.x), tree.predict_proba(&d.x));
    }
}

#[test]
fn fitting_is_deterministic() {
    let d = blobs(50, 1.0, 6);
    for spec in ModelSpec::forecast_roster(17).into_iter().chain(ModelSpec::bias_roster(17)) {
        let a = fit(&spec, &d).unwrap();
        let b = fit(&spec, &d).unwrap();
        assert_eq!(a, b, "{}", spec.kind_name());
    }
}

#[test]
fn auroc_routes_agree() {
    let mut r = rng::seeded(2);
    for _ in 0..200 {
        let n = r.gen_range(2..80);
        let y: Vec<u8> = (0..n).map(|_| r.gen_range(0..2)).collect();
        if !y.contains(&0) || !y.contains(&1) {
            continue;
        }
        let s: Vec<f64> = (0..n).map(|_| f64::from(r.gen_range(0..20u8)) / 19.0).collect();
        let a = auroc(&y, &s).unwrap();
        assert!((a - auroc_trapezoid(&y, &s).unwrap()).abs() < 1e-9);
    }
}

fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / (a.abs() + n.abs()).max(1e-8))
        .fold(0.0, f64::max)
}

#[test]
fn mlp_gradient_matches_finite_differences() {
    let mut r = rng::seeded(8);
    for trial in 0..5 {
        let batch = 6;
        let rows: Vec<Vec<f64>> = (0..batch).map(|_| (0..3).map(|_| rng::normal(&mut r)).collect()).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let y: Vec<u8> = (0..batch).map(|i| (i % 2) as u8).collect();
        let net = Network::random(3, 4, trial);
        let l2 = if trial % 2 == 0 { 0.0 } else { 0.01 };
        let (_, grad) = net.loss_and_gradient(&x, &y, l2);
        let h = 1e-5;
        let loss_at = |n: &Network| n.loss_and_gradient(&x, &y, l2).0;
        let mut numeric = Vec::new();
        let mut analytic = Vec::new();
        for k in 0..net.w1.len() {
            let (mut p, mut m) = (net.clone(), net.clone());
            p.w1[k] += h;
            m.w1[k] -= h;
            numeric.push((loss_at(&p) - loss_at(&m)) / (2.0 * h));
            analytic.push(grad.w1[k]);
        }
        for k in 0..net.w2.len() {
            let (mut p, mut m) = (net.clone(), net.clone());
            p.w2[k] += h;
            m.w2[k] -= h;
            numeric.push((loss_at(&p) - loss_at(&m)) / (2.0 * h));
            analytic.push(grad.w2[k]);
            let (mut p, mut m) = (net.clone(), net.clone());
            p.b1[k] += h;
            m.b1[k] -= h;
            numeric.push((loss_at(&p) - loss_at(&m)) / (2.0 * h));
            analytic.push(grad.b1[k]);
        }
        let (mut p, mut m) = (net.clone(), net.clone());
        p.b2 += h;
        m.b2 -= h;
        numeric.push((loss_at(&p) - loss_at(&m)) / (2.0 * h));
        analytic.push(grad.b2);
        let err = max_relative_error(&analytic, &numeric);
        assert!(err < 1e-4, "trial {trial}: {err}");
    }
}

#[test]
fn mlp_learns_xor() {
    let d = xor();
    let spec = ModelSpec::new(
        ModelParams::Mlp(MlpParams {
            hidden: 8,
            epochs: 3000,
            ..MlpParams::default()
        }),
        1,
    );
    assert_eq!(accuracy(&spec, &d, &d), 1.0);
}

fn gaussian_pair(n: usize, delta: f64, seed: u64) -> Dataset {
    let mut r = rng::seeded(seed);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for i in 0..n {
        let label = (i % 2) as u8;
        let shift = if label == 1 { delta } else { 0.0 };
        rows.push(vec![shift + rng::normal(&mut r), rng::normal(&mut r)]);
        y.push(label);
    }
    dataset(rows, y)
}

#[test]
fn qda_reaches_bayes_error() {
    let delta = 3.0;
    // equal priors, unit isotropic covariance: error = Phi(-delta / 2)
    let bayes = 0.5 * libm::erfc(delta / 2.0 / std::f64::consts::SQRT_2);
    let train = gaussian_pair(2000, delta, 21);
    let test = gaussian_pair(2000, delta, 22);
    let qda = ModelSpec::new(ModelParams::Qda(QdaParams::default()), 0);
    let err = 1.0 - accuracy(&qda, &train, &test);
    assert!((err - bayes).abs() < 0.02, "error {err} vs bayes {bayes}");
}

fn training_error_by_round(model: &AdaBoost, d: &Dataset) -> Vec<f64> {
    (1..=model.stumps.len())
        .map(|t| {
            let wrong = d
                .x
                .iter_rows()
                .zip(&d.y)
                .filter(|(row, &label)| (model.staged_decision(row, t) > 0.0) != (label == 1))
                .count();
            wrong as f64 / d.len() as f64
        })
        .collect()
}

/// Product of the per-round normalizers, an upper bound on training error.
fn exponential_bound(model: &AdaBoost) -> Vec<f64> {
    let mut bound = 1.0;
    model
        .stumps
        .iter()
        .map(|(_, alpha)| {
            let e = 1.0 / (1.0 + alpha.exp());
            bound *= 2.0 * (e * (1.0 - e)).sqrt();
            bound
        })
        .collect()
}

fn boost_fixtures() -> Vec<Dataset> {
    vec![
        blobs(40, 1.5, 30),
        blobs(40, 1.5, 31),
        dataset(
            (0..12).map(|i| vec![i as f64]).collect(),
            vec![0, 0, 0, 1, 1, 1, 1, 1, 0, 0, 1, 1],
        ),
        dataset(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0], vec![2.0, 2.0], vec![2.0, 0.0]],
            vec![0, 0, 0, 1, 1, 1],
        ),
    ]
}

#[test]
fn adaboost_error_bound_non_increasing() {
    for d in &boost_fixtures() {
        let model = AdaBoost::fit(&d.x, &d.y, &AdaBoostParams { rounds: 30 }).unwrap();
        // every kept stump beats chance
        assert!(model.stumps.iter().all(|(_, a)| *a > 0.0));
        let bound = exponential_bound(&model);
        let errs = training_error_by_round(&model, d);
        assert!(bound.windows(2).all(|w| w[1] < w[0]));
        assert!(errs.iter().zip(&bound).all(|(e, b)| e <= b));
        assert_eq!(*errs.last().unwrap(), errs.iter().cloned().fold(1.0, f64::min));
    }
}

#[test]
fn adaboost_raw_error_can_rise() {
    // Counterexample to monotone raw training error even though every stump
    // beats chance, on the twelve-point interval set.
    let d = boost_fixtures().swap_remove(2);
    let model = AdaBoost::fit(&d.x, &d.y, &AdaBoostParams { rounds: 30 }).unwrap();
    let errs = training_error_by_round(&model, &d);
    assert!(errs.windows(2).any(|w| w[1] > w[0]), "{errs:?}");
}

#[test]
fn tree_models_fit_separable_train_equals_test() {
    let d = blobs(50, 3.0, 40);
    for spec in [
        ModelSpec::new(ModelParams::DecisionTree(TreeParams::default()), 1),
        ModelSpec::new(ModelParams::RandomForest(ForestParams::default()), 1),
    ] {
        let rows = transfer_protocol(&d, &d, std::slice::from_ref(&spec)).unwrap();
        assert!(rows[0].metrics.accuracy >= 0.99, "{}", spec.kind_name());
    }
}

#[test]
fn transfer_never_fits_on_test_rows() {
    let train = blobs(30, 2.0, 50);
    let mut test = blobs(30, 2.0, 51);
    // tag test rows so they are recognisable if they ever reach fit
    for i in 0..test.x.rows() {
        test.x.row_mut(i)[0] += 1e6;
    }
    let mut calls = 0;
    let rows = transfer_protocol_with(&train, &test, &ModelSpec::bias_roster(3), |spec, seen| {
        calls += 1;
        assert_eq!(seen, &train);
        assert!(seen.x.iter_rows().all(|r| r[0] < 1e5));
        fit(spec, seen)
    })
    .unwrap();
    assert_eq!(calls, 4);
    assert_eq!(rows.len(), 4);

    let other = Dataset::new(test.x.clone(), test.y.clone(), vec!["a".into(), "b".into()]).unwrap();
    assert!(matches!(
        transfer_protocol(&train, &other, &ModelSpec::bias_roster(3)),
        Err(Error::FeatureMismatch { .. })
    ));
}

/// Label = `x0 > x1` with a little flip noise; domains differ by a shift
/// along the boundary direction and by spread.
fn boundary_domain(n: usize, offset: f64, spread: f64, seed: u64) -> Dataset {
    let mut r = rng::seeded(seed);
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for _ in 0..n {
        let along = offset + spread * rng::normal(&mut r);
        let across = rng::normal(&mut r);
        let (a, b) = (along + across, along - across);
        let mut label = u8::from(a > b);
        if r.gen_bool(0.05) {
            label ^= 1;
        }
        rows.push(vec![a, b]);
        y.push(label);
    }
    dataset(rows, y)
}

#[test]
fn shared_boundary_transfers() {
    let train = boundary_domain(600, 0.0, 1.0, 60);
    let same = boundary_domain(600, 0.0, 1.0, 61);
    let shifted = boundary_domain(600, 0.75, 1.2, 62);
    let specs = [
        lr(),
        ModelSpec::new(
            ModelParams::RandomForest(ForestParams {
                n_trees: 50,
                ..ForestParams::default()
            }),
            2,
        ),
    ];
    let in_domain = transfer_protocol(&train, &same, &specs).unwrap();
    let cross = transfer_protocol(&train, &shifted, &specs).unwrap();
    for (a, b) in in_domain.iter().zip(&cross) {
        let gap = (a.metrics.accuracy - b.metrics.accuracy).abs();
        assert!(gap <= 0.05, "{}: {} vs {}", a.model, a.metrics.accuracy, b.metrics.accuracy);
    }
}
