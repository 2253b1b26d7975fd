//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (run with `--nocapture` to see them inline).
//!
//! 1. Circuit equals the dense unitary-product oracle (N ≤ 3, 50 seeds).
//! 2. Every gradient path agrees with central finite differences.
//! 3. Norm conservation over long gate sequences; probabilities sum to 1.
//! 4. Reference parameter arithmetic and warning percentages reproduce.
//! 5. Trainable-count reduction and polylog growth across model sizes.
//! 6. End-to-end training beats the persistence baseline on both routes.
//! 7. Seeded determinism and checkpoint fidelity.

mod support;

use std::time::Instant;

use qtlstm::checkpoint::Checkpoint;
use qtlstm::data::{synth_flood_series, DataRecipe, WindowedDataset};
use qtlstm::lstm::{self, required_qubits, FlatParams, LstmSpec, SequenceBatch};
use qtlstm::mapping::{default_layer_dims, gamma_len, Activation, MappingInput, MappingNet};
use qtlstm::metrics::{classify_warnings, evaluate_regression};
use qtlstm::model::QtModel;
use qtlstm::sim::{angle_count, AnsatzCircuit, ProbabilityVector, StateVector};
use qtlstm::train::{train_classical, train_qt, validation_loss, TrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pass(criterion: &str, detail: &str) {
    println!("ACCEPT ok  {criterion}: {detail}");
}

#[test]
fn criterion_1_circuit_matches_dense_oracle() {
    let start = Instant::now();
    let mut checked = 0usize;
    for n_qubits in 1..=3usize {
        for seed in 0..50u64 {
            let n_block = (seed % 3) as usize + 1;
            let circuit = AnsatzCircuit::seeded(n_qubits, n_block, seed).unwrap();
            let expected = support::oracle_final_state(&circuit);
            let state = circuit.forward_state().unwrap();
            for (got, want) in state.amplitudes().iter().zip(&expected) {
                assert!(
                    (got - want).norm() < 1e-12,
                    "N={n_qubits} seed={seed}: amplitude off by {:.3e}",
                    (got - want).norm()
                );
            }
            checked += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "oracle sweep took {elapsed:.1}s, limit 10s");
    pass(
        "criterion 1",
        &format!("{checked} circuits matched the dense oracle to 1e-12 in {elapsed:.2}s"),
    );
}

fn fd_on_coordinate<F>(f: F, x: &[f64], eps: f64, k: usize) -> f64
where
    F: Fn(&[f64]) -> f64,
{
    let mut probe = x.to_vec();
    probe[k] = x[k] + eps;
    let plus = f(&probe);
    probe[k] = x[k] - eps;
    let minus = f(&probe);
    (plus - minus) / (2.0 * eps)
}

#[test]
fn criterion_2_gradient_suite_matches_finite_differences() {
    let start = Instant::now();
    let eps = 1e-5;
    let tol = 1e-4;
    let floor = 1e-6;

    // Circuit probability Jacobian up to six qubits.
    for (n_qubits, seed) in [(2usize, 1u64), (3, 2), (4, 3), (6, 4)] {
        let circuit = AnsatzCircuit::seeded(n_qubits, 2, seed).unwrap();
        let analytic = circuit.grad_probabilities().unwrap();
        for k in 0..circuit.phi().len() {
            let numeric = support::central_diff(
                |phi| {
                    AnsatzCircuit::new(n_qubits, 2, phi.to_vec())
                        .unwrap()
                        .probabilities()
                        .unwrap()
                        .as_slice()
                        .to_vec()
                },
                circuit.phi(),
                eps,
                k,
            );
            for (i, num) in numeric.iter().enumerate() {
                let err = (analytic[i][k] - num).abs() / num.abs().max(floor);
                assert!(err < tol, "circuit N={n_qubits} p[{i}]/phi[{k}]: err {err}");
            }
        }
    }

    // Mapping-network backward.
    let net = MappingNet::seeded(vec![5, 10, 10, 1], 8).unwrap();
    let x = MappingInput {
        bits: vec![1, 0, 1, 1],
        prob: 1.3,
    };
    let (d_gamma, d_prob) = net.backward(&x, 1.7).unwrap();
    for k in 0..net.gamma().len() {
        let numeric = fd_on_coordinate(
            |gamma| {
                let probe =
                    MappingNet::new(vec![5, 10, 10, 1], gamma.to_vec(), Activation::Tanh).unwrap();
                1.7 * probe.forward(&x).unwrap()
            },
            net.gamma(),
            eps,
            k,
        );
        let err = (d_gamma[k] - numeric).abs() / numeric.abs().max(floor);
        assert!(err < tol, "mapping gamma[{k}]: err {err}");
    }
    let numeric_prob = {
        let f = |p: f64| {
            1.7 * net
                .forward(&MappingInput {
                    bits: x.bits.clone(),
                    prob: p,
                })
                .unwrap()
        };
        (f(x.prob + eps) - f(x.prob - eps)) / (2.0 * eps)
    };
    assert!((d_prob - numeric_prob).abs() / numeric_prob.abs().max(floor) < tol);

    // LSTM backpropagation through time, M ≤ 200.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let spec = LstmSpec::new(3, 4); // M = 4·(12+16+4)+5 = 133
    assert!(spec.param_count() <= 200);
    let theta_vec: Vec<f64> = (0..spec.param_count())
        .map(|_| rng.random_range(-0.7..0.7))
        .collect();
    let theta = FlatParams::new(theta_vec.clone(), &spec).unwrap();
    let inputs: Vec<f64> = (0..4 * 6 * 3)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let targets: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
    let batch = SequenceBatch::new(inputs, targets, 6, 3).unwrap();
    let (_, analytic) = lstm::backward(&theta, &spec, &batch).unwrap();
    for k in 0..spec.param_count() {
        let numeric = fd_on_coordinate(
            |params| {
                let probe = FlatParams::new(params.to_vec(), &spec).unwrap();
                let preds = lstm::forward(&probe, &spec, &batch).unwrap();
                lstm::mse_loss(&preds, batch.targets()).unwrap()
            },
            &theta_vec,
            eps,
            k,
        );
        let err = (analytic[k] - numeric).abs() / numeric.abs().max(floor);
        assert!(err < tol, "lstm theta[{k}]: err {err}");
    }

    // Full pipeline, both readings of the toy shape: the four-qubit model
    // (H = 1 forces M = 14) and the H = 2 model (M = 35, six qubits).
    let fd_eps = 1e-4;
    let fd_tol = 1e-3;
    for (spec, n_block, seed) in [
        (LstmSpec::new(1, 1), 2usize, 5u64),
        (LstmSpec::new(1, 2), 1, 6),
    ] {
        let model = QtModel::seeded(spec, n_block, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa5);
        let inputs: Vec<f64> = (0..3 * 4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let targets: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let batch = SequenceBatch::new(inputs, targets, 4, 1).unwrap();
        let grads = model.loss_and_grads(&batch).unwrap();
        let loss_for = |phi: &[f64], gamma: &[f64]| {
            let circuit =
                AnsatzCircuit::new(model.circuit().n_qubits(), n_block, phi.to_vec()).unwrap();
            let net = MappingNet::new(
                model.net().layer_dims().to_vec(),
                gamma.to_vec(),
                Activation::Tanh,
            )
            .unwrap();
            let probe = QtModel::new(circuit, net, spec).unwrap();
            let theta = probe.generate_theta().unwrap();
            let preds = lstm::forward(&theta, &spec, &batch).unwrap();
            lstm::mse_loss(&preds, batch.targets()).unwrap()
        };
        for k in 0..model.circuit().phi().len() {
            let numeric = fd_on_coordinate(
                |phi| loss_for(phi, model.net().gamma()),
                model.circuit().phi(),
                fd_eps,
                k,
            );
            let err = (grads.d_phi[k] - numeric).abs() / numeric.abs().max(floor);
            assert!(err < fd_tol, "pipeline phi[{k}]: err {err}");
        }
        for k in 0..model.net().gamma().len() {
            let numeric = fd_on_coordinate(
                |gamma| loss_for(model.circuit().phi(), gamma),
                model.net().gamma(),
                fd_eps,
                k,
            );
            let err = (grads.d_gamma[k] - numeric).abs() / numeric.abs().max(floor);
            assert!(err < fd_tol, "pipeline gamma[{k}]: err {err}");
        }
    }

    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < 120.0,
        "gradient suite took {elapsed:.1}s, limit 120s"
    );
    pass(
        "criterion 2",
        &format!(
            "circuit, mapping, BPTT and full-pipeline gradients within tolerance in {elapsed:.1}s"
        ),
    );
}

#[test]
fn criterion_3_norm_and_probability_conservation() {
    // 1,000 random gates on eight qubits.
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut state = StateVector::zero_state(8);
    for _ in 0..1000 {
        let angles: [f64; 3] = std::array::from_fn(|_| rng.random_range(-3.2..3.2));
        if rng.random::<bool>() {
            let q = rng.random_range(0..8);
            state.apply_u3(q, angles[0], angles[1], angles[2]).unwrap();
        } else {
            let control = rng.random_range(0..8);
            let mut target = rng.random_range(0..8);
            if target == control {
                target = (target + 1) % 8;
            }
            state
                .apply_cu3(control, target, angles[0], angles[1], angles[2])
                .unwrap();
        }
    }
    let drift = (state.norm_sqr() - 1.0).abs();
    assert!(drift < 1e-10, "norm drifted by {drift:.3e}");

    // Probability vectors from assorted circuits all sum to 1.
    let mut worst = 0.0f64;
    for seed in 0..25u64 {
        let n_qubits = (seed % 6) as usize + 1;
        let circuit = AnsatzCircuit::seeded(n_qubits, (seed % 3) as usize + 1, seed).unwrap();
        let probs: ProbabilityVector = circuit.probabilities().unwrap();
        let total: f64 = probs.as_slice().iter().sum();
        worst = worst.max((total - 1.0).abs());
        assert!((total - 1.0).abs() < 1e-10);
        assert!(probs.as_slice().iter().all(|p| (0.0..=1.0).contains(p)));
    }
    pass(
        "criterion 3",
        &format!(
            "norm drift {drift:.2e} after 1000 gates; worst probability-sum error {worst:.2e}"
        ),
    );
}

#[test]
fn criterion_4_reference_arithmetic_reproduces() {
    // A 40,451-weight LSTM instance (F = 151, H = 50) needs 16 qubits.
    let spec = LstmSpec::new(151, 50);
    assert_eq!(spec.param_count(), 40_451);
    assert_eq!(spec.required_qubits(), 16);
    assert_eq!(required_qubits(40_451), 16);

    // The reference classical warning percentages, fed through the
    // classifier as labelled outcome pairs, come back out unchanged.
    let mut preds = Vec::new();
    let mut actuals = Vec::new();
    let mut push = |n: usize, p: bool, a: bool| {
        for _ in 0..n {
            preds.push(if p { 130.0 } else { 70.0 });
            actuals.push(if a { 130.0 } else { 70.0 });
        }
    };
    push(1178, true, true);
    push(0, true, false);
    push(247, false, true);
    push(8575, false, false);
    let report = classify_warnings(&preds, &actuals, 100.0).unwrap();
    assert_eq!(
        report.percentages(),
        [11.78, 0.00, 2.47, 85.75],
        "reference percentages must reproduce exactly"
    );
    let total: f64 = report.percentages().iter().sum();
    assert!((total - 100.0).abs() < 1e-9);
    pass(
        "criterion 4",
        "M = 40,451 -> 16 qubits; (11.78, 0.00, 2.47, 85.75) reproduced, sum 100",
    );
}

#[test]
fn criterion_5_parameter_reduction_and_polylog_growth() {
    // Desk-scale reference shape: F = 8, H = 24 -> M = 3193, N = 12.
    let spec = LstmSpec::new(8, 24);
    assert_eq!(spec.param_count(), 3193);
    assert_eq!(spec.required_qubits(), 12);
    let model = QtModel::seeded(spec, 2, 0).unwrap();
    let counts = model.trainable_counts();
    assert_eq!(counts.classical, 3193);
    assert_eq!(
        counts.qt,
        angle_count(12, 2) + gamma_len(&default_layer_dims(12))
    );
    assert!(
        counts.qt < counts.classical,
        "qt {} must undercut classical {}",
        counts.qt,
        counts.classical
    );

    // Trainable count as a function of M = 2^11 … 2^16 under default widths
    // (n_block = 2).
    let qt_count = |n: usize| angle_count(n, 2) + gamma_len(&default_layer_dims(n));
    let points: Vec<(usize, usize)> = (11..=16)
        .map(|n| {
            let m = 1usize << n;
            assert_eq!(required_qubits(m), n);
            (n, qt_count(n))
        })
        .collect();
    for &(n, qt) in &points {
        assert!(qt < (1usize << n), "qt({n}) = {qt} is not below M = 2^{n}");
    }

    // Fit a quadratic in N through the first three points; a polynomial in
    // N = ⌈log₂ M⌉ is polylogarithmic in M. The fit must predict the
    // remaining sizes exactly.
    let f = |i: usize| points[i].1 as f64;
    let n0 = points[0].0 as f64;
    // Newton's forward differences on unit-spaced N.
    let d1 = f(1) - f(0);
    let d2 = f(2) - 2.0 * f(1) + f(0);
    let predict = |n: f64| f(0) + d1 * (n - n0) + d2 * (n - n0) * (n - n0 - 1.0) / 2.0;
    for &(n, qt) in &points[3..] {
        let predicted = predict(n as f64);
        assert!(
            (predicted - qt as f64).abs() < 1e-9,
            "qt({n}) = {qt} deviates from the quadratic fit {predicted}"
        );
    }
    let ratio = 100.0 * counts.qt as f64 / counts.classical as f64;
    pass(
        "criterion 5",
        &format!(
            "desk spec trains {} of {} weights ({ratio:.1}%); qt counts {:?} are quadratic in N",
            counts.qt,
            counts.classical,
            points.iter().map(|p| p.1).collect::<Vec<_>>()
        ),
    );
}

fn desk_recipe() -> DataRecipe {
    DataRecipe {
        level_column: "level".into(),
        feature_columns: vec![
            "level".into(),
            "discharge".into(),
            "reservoir_fill".into(),
            "rainfall".into(),
        ],
        lags: vec![1, 3, 5, 7],
        window: 30,
        horizon_steps: 24,
        train_fraction: 0.8,
        validation_fraction: 0.2,
    }
}

fn desk_dataset() -> WindowedDataset {
    let table = synth_flood_series(2000, 1, 0.012, 1.5).unwrap();
    let (mut data, _) = desk_recipe().prepare(table).unwrap();
    data.normalize().unwrap();
    data
}

#[test]
fn criterion_6_end_to_end_learning_beats_persistence() {
    let start = Instant::now();
    let data = desk_dataset();
    let recipe = desk_recipe();
    let spec = LstmSpec::new(recipe.n_features(), 24);
    // Full-batch training wants a larger step than the mini-batch default.
    let mut config = TrainConfig::new(200, 1);
    config.learning_rate = 1e-2;

    // Persistence over the same validation tail the trainers use.
    let split = data.split_index();
    let val_len =
        ((split as f64 * config.validation_fraction).floor() as usize).clamp(1, split - 1);
    let val_range = (split - val_len)..split;
    let persistence = data.persistence_predictions(val_range.clone());
    let persistence_mse = lstm::mse_loss(&persistence, &data.targets()[val_range]).unwrap();

    let model = QtModel::seeded(spec, 2, config.seed).unwrap();
    let (trained, qt_report) = train_qt(model, &data, &config).unwrap();
    assert!(
        qt_report.best_val_loss < persistence_mse,
        "generated-weight route {} did not beat persistence {persistence_mse}",
        qt_report.best_val_loss
    );

    let (_, classical_report) = train_classical(spec, &data, &config).unwrap();
    assert!(
        classical_report.best_val_loss < persistence_mse,
        "classical route {} did not beat persistence {persistence_mse}",
        classical_report.best_val_loss
    );

    // Warning report over the held-out test region, in cm.
    let stats = data.normalization().unwrap();
    let theta = trained.generate_theta().unwrap();
    let test_batch = data.batch(split..data.len()).unwrap();
    let preds = lstm::forward(&theta, &spec, &test_batch).unwrap();
    let preds_cm = stats.denormalize_level(&preds);
    let actuals_cm = stats.denormalize_level(test_batch.targets());
    let warnings = classify_warnings(&preds_cm, &actuals_cm, 100.0).unwrap();
    let total: f64 = warnings.percentages().iter().sum();
    assert!((total - 100.0).abs() < 1e-9);
    let regression = evaluate_regression(&preds_cm, &actuals_cm).unwrap();

    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < 900.0,
        "end-to-end run took {elapsed:.0}s, limit 900s"
    );
    pass(
        "criterion 6",
        &format!(
            "qt val {:.4} and classical val {:.4} beat persistence {:.4}; test MSE {:.1} cm², warning sum {total}; {elapsed:.0}s",
            qt_report.best_val_loss,
            classical_report.best_val_loss,
            persistence_mse,
            regression.mse
        ),
    );
}

#[test]
fn criterion_7_determinism_and_checkpoint_fidelity() {
    // Moderate-size run so the criterion exercises real training dynamics.
    let table = synth_flood_series(600, 11, 0.015, 1.2).unwrap();
    let recipe = DataRecipe {
        level_column: "level".into(),
        feature_columns: vec!["level".into(), "rainfall".into()],
        lags: vec![1, 3],
        window: 16,
        horizon_steps: 8,
        train_fraction: 0.8,
        validation_fraction: 0.2,
    };
    let spec = LstmSpec::new(recipe.n_features(), 8);
    let config = TrainConfig::new(25, 42);

    let run = || {
        let (mut data, _) = recipe.prepare(table.clone()).unwrap();
        let stats = data.normalize().unwrap().clone();
        let model = QtModel::seeded(spec, 2, config.seed).unwrap();
        let (trained, report) = train_qt(model, &data, &config).unwrap();
        let ckpt = Checkpoint::from_qt(
            &trained,
            stats,
            recipe.clone(),
            config.seed,
            report.final_val_loss,
        );
        (report.learning_curve_csv(), ckpt)
    };
    let (curve_a, ckpt) = run();
    let (curve_b, _) = run();
    assert_eq!(
        curve_a.as_bytes(),
        curve_b.as_bytes(),
        "same seed must give bit-identical learning curves"
    );

    // Through-disk fidelity.
    let dir = std::env::temp_dir().join("qtlstm_acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("criterion7.json");
    ckpt.save(&path).unwrap();
    let loaded = Checkpoint::load(&path).unwrap();
    let (mut fresh, _) = loaded.data.prepare(table).unwrap();
    fresh.apply_normalization(&loaded.normalization).unwrap();
    let theta = loaded.rebuild_theta().unwrap();
    let recomputed = validation_loss(
        &theta,
        &loaded.lstm,
        &fresh,
        loaded.data.validation_fraction,
    )
    .unwrap();
    let gap = (recomputed - loaded.val_loss).abs();
    assert!(
        gap < 1e-9,
        "reloaded checkpoint reproduces val loss to {gap:.2e}, limit 1e-9"
    );
    pass(
        "criterion 7",
        &format!("identical curves across reruns; checkpoint val-loss gap {gap:.2e}"),
    );
}
