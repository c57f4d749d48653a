//! Acceptance gate. Each test prints one `criterion N: PASS|FAIL` line to
//! stdout (bypassing capture) and then asserts.
//!
//! The benchmark criteria (4 to 7) read the Mulan scene and yeast files from
//! `$MLCCP_DATA_DIR`, defaulting to `data/` at the workspace root:
//! `scene-train.arff`, `scene-test.arff`, `scene.xml`, and likewise for
//! yeast.

use std::io::Write;
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use mlccp::conformal::{cooccurrence, labelset_scores, nonconformity, CooccurrenceMatrix};
use mlccp::dataset::write_csv;
use mlccp::experiment::{run_experiment, DataSource, ExperimentConfig, ExperimentReport, FoldRule};
use mlccp::metrics::{classification_accuracy, f_measures, hamming_loss};
use mlccp::mlrbf::{sigmoid_transform, threshold, train_rbf};
use mlccp::prediction::{forced, prediction_set};
use mlccp::synthetic::SyntheticProblem;
use mlccp::{make_folds, train_ccp, LabelSet, MeasureParams, MultiLabelDataset, RbfConfig};
use num_rational::Ratio;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use proptest::test_runner::{Config as ProptestConfig, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(n: usize, name: &str, pass: bool, detail: &str) {
    let line = format!("criterion {}: {} {} ({})\n", n, if pass { "PASS" } else { "FAIL" }, name, detail);
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn random_dataset(rng: &mut ChaCha8Rng, rows: usize, n_features: usize, n_labels: usize) -> MultiLabelDataset {
    let features: Vec<f64> = (0..rows * n_features).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let labels: Vec<LabelSet> = (0..rows)
        .map(|_| LabelSet::from_bits(rng.gen_range(1..1u64 << n_labels)))
        .collect();
    let names = (0..n_labels).map(|j| format!("l{}", j)).collect();
    MultiLabelDataset::from_labelsets(features, n_features, labels, names).unwrap()
}

/// Term-by-term score, written independently of the library.
fn oracle_score(o: &[f64], ls: u64, unseen: &[Vec<bool>], d: f64, lambda: f64) -> f64 {
    let mut distance = 0.0;
    for (j, &oj) in o.iter().enumerate() {
        let t = if ls >> j & 1 == 1 { 1.0 } else { 0.0 };
        distance += f64::abs(t - oj).powf(d);
    }
    let mut pairs = 0usize;
    for j in 0..o.len() {
        for r in j + 1..o.len() {
            if ls >> j & 1 == 1 && ls >> r & 1 == 1 && unseen[j][r] {
                pairs += 1;
            }
        }
    }
    distance + lambda * pairs as f64
}

fn oracle_unseen(labels: &[LabelSet], n: usize) -> Vec<Vec<bool>> {
    let mut unseen = vec![vec![true; n]; n];
    for ls in labels {
        for j in 0..n {
            for r in 0..n {
                if ls.contains(j) && ls.contains(r) {
                    unseen[j][r] = false;
                }
            }
        }
    }
    unseen
}

#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut problems = 0;
    let mut checked = 0usize;
    let mut mismatches = 0usize;
    while problems < 120 {
        let rows = rng.gen_range(4..=8);
        let n = rng.gen_range(1..=4);
        let data = random_dataset(&mut rng, rows, 2, n);
        let d = [1.0, 2.0, 4.0][rng.gen_range(0..3)];
        let lambda = [0.0, 0.5, 1.0][rng.gen_range(0..3)];
        let folds = make_folds(rows, 2, rng.gen()).unwrap();
        let config = RbfConfig::default().with_fraction(1.0).with_seed(rng.gen());
        let model = train_ccp(&data, &folds, &config, MeasureParams::new(d, lambda).unwrap()).unwrap();
        problems += 1;

        // Brute force: retrain each fold model, rescore every calibration
        // example and every labelset, and recount with a double loop.
        let mut fold_parts = Vec::new();
        for k in 0..2 {
            let train_idx = folds.training(k);
            let proper = data.subset(&train_idx);
            let rbf = train_rbf(&proper, &config).unwrap();
            let unseen = oracle_unseen(proper.labels(), n);
            let calibration: Vec<f64> = folds
                .held_out(k)
                .into_iter()
                .map(|i| {
                    let o = sigmoid_transform(&rbf.raw_scores(data.row(i)).unwrap());
                    oracle_score(&o, data.labelset(i).bits(), &unseen, d, lambda)
                })
                .collect();
            fold_parts.push((rbf, unseen, calibration));
        }
        let mut tests: Vec<Vec<f64>> = (0..3).map(|_| vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)]).collect();
        tests.extend(data.rows().map(|r| r.to_vec()));
        for x in &tests {
            let table = model.p_values(x).unwrap();
            for ls in 1..1u64 << n {
                let mut count = 1usize;
                for (rbf, unseen, calibration) in &fold_parts {
                    let o = sigmoid_transform(&rbf.raw_scores(x).unwrap());
                    let alpha = oracle_score(&o, ls, unseen, d, lambda);
                    for &a in calibration {
                        if a >= alpha {
                            count += 1;
                        }
                    }
                }
                let p = count as f64 / (rows + 1) as f64;
                checked += 1;
                if table.count(LabelSet::from_bits(ls)) as usize != count || table.p(LabelSet::from_bits(ls)) != p {
                    mismatches += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = mismatches == 0 && elapsed < Duration::from_secs(10);
    verdict(
        1,
        "p-values equal brute-force recount",
        pass,
        &format!("{} problems, {} p-values, {} mismatches, {:.2?}", problems, checked, mismatches, elapsed),
    );
    assert!(pass);
}

#[test]
fn criterion_02_fast_path_exact() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let n = 10;
    let mut mismatches = 0usize;
    let mut checked = 0usize;
    for _ in 0..20 {
        let o: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let seen: Vec<LabelSet> = (0..6).map(|_| LabelSet::from_bits(rng.gen_range(1..1u64 << n))).collect();
        let mu = cooccurrence(&seen, n).unwrap();
        let unseen = oracle_unseen(&seen, n);
        for d in [1.0, 2.0, 4.0] {
            for lambda in [0.0, 0.5, 1.0] {
                let params = MeasureParams::new(d, lambda).unwrap();
                let fast = labelset_scores(&o, &mu, &params).unwrap();
                for ls in 1..1u64 << n {
                    let direct = nonconformity(&o, LabelSet::from_bits(ls), &mu, &params).unwrap();
                    let oracle = oracle_score(&o, ls, &unseen, d, lambda);
                    checked += 1;
                    if fast[ls as usize].to_bits() != direct.to_bits() || direct.to_bits() != oracle.to_bits() {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = mismatches == 0 && elapsed < Duration::from_secs(5);
    verdict(
        2,
        "incremental powerset scores equal direct evaluation",
        pass,
        &format!("{} scores, {} mismatches, {:.2?}", checked, mismatches, elapsed),
    );
    assert!(pass);
}

#[test]
fn criterion_03_empirical_validity() {
    let start = Instant::now();
    let problem = SyntheticProblem::new(5, 4, 303);
    let train = problem.sample(2000, 1);
    let test = problem.sample(2000, 2);
    let folds = make_folds(train.len(), FoldRule::Auto.resolve(train.len()), 3).unwrap();
    let model = train_ccp(&train, &folds, &RbfConfig::default().with_seed(3), MeasureParams::new(4.0, 1.0).unwrap()).unwrap();
    let rows: Vec<&[f64]> = test.rows().collect();
    let tables = model.p_values_batch(&rows).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for delta in [0.05, 0.10, 0.20] {
        let report = mlccp::metrics::set_report(&tables, test.labels(), delta).unwrap();
        pass &= report.error_rate <= delta + 0.03;
        detail.push(format!("delta {} error {:.4}", delta, report.error_rate));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(120);
    verdict(3, "set error rate within delta + 0.03", pass, &format!("{}, {:.2?}", detail.join(", "), elapsed));
    assert!(pass);
}

fn data_dir() -> PathBuf {
    std::env::var_os("MLCCP_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data")))
}

fn benchmark(name: &str) -> Result<(ExperimentReport, Duration), String> {
    let dir = data_dir();
    let train = dir.join(format!("{}-train.arff", name));
    let test = dir.join(format!("{}-test.arff", name));
    let xml = dir.join(format!("{}.xml", name));
    for p in [&train, &test, &xml] {
        if !p.exists() {
            return Err(format!("{} not found; set MLCCP_DATA_DIR to the Mulan {} files", p.display(), name));
        }
    }
    let mut config = ExperimentConfig::new(
        DataSource::Mulan { arff: train, xml: xml.clone() },
        DataSource::Mulan { arff: test, xml },
    );
    config.lambdas = vec![0.0, 1.0];
    let start = Instant::now();
    let report = run_experiment(&config, None).map_err(|e| e.to_string())?;
    Ok((report, start.elapsed()))
}

fn scene() -> &'static Result<(ExperimentReport, Duration), String> {
    static RUN: OnceLock<Result<(ExperimentReport, Duration), String>> = OnceLock::new();
    RUN.get_or_init(|| benchmark("scene"))
}

fn yeast() -> &'static Result<(ExperimentReport, Duration), String> {
    static RUN: OnceLock<Result<(ExperimentReport, Duration), String>> = OnceLock::new();
    RUN.get_or_init(|| benchmark("yeast"))
}

fn within(v: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&v)
}

#[test]
fn criterion_04_scene_single_predictions() {
    let name = "scene forced-prediction metrics in band";
    let (report, elapsed) = match scene() {
        Ok(r) => r,
        Err(e) => {
            verdict(4, name, false, e);
            panic!("{}", e);
        }
    };
    let m = report.run_for(1.0).unwrap().forced;
    let pass = report.folds == 12
        && within(m.hamming_loss, 0.082, 0.105)
        && within(m.accuracy, 0.62, 0.74)
        && within(m.f_macro, 0.69, 0.79)
        && within(m.f_micro, 0.69, 0.78)
        && *elapsed < Duration::from_secs(600);
    verdict(
        4,
        name,
        pass,
        &format!(
            "K {}, HL {:.4}, CA {:.4}, F-macro {:.4}, F-micro {:.4}, {:.1?}",
            report.folds, m.hamming_loss, m.accuracy, m.f_macro, m.f_micro, elapsed
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_05_yeast_single_predictions() {
    let name = "yeast forced-prediction metrics in band, lambda rows agree";
    let (report, elapsed) = match yeast() {
        Ok(r) => r,
        Err(e) => {
            verdict(5, name, false, e);
            panic!("{}", e);
        }
    };
    let a = report.run_for(0.0).unwrap().forced;
    let b = report.run_for(1.0).unwrap().forced;
    let mut pass = report.folds == 15 && *elapsed < Duration::from_secs(900);
    for m in [a, b] {
        pass &= within(m.hamming_loss, 0.185, 0.210) && within(m.accuracy, 0.15, 0.21) && within(m.f_micro, 0.61, 0.67);
    }
    let gap = [
        a.hamming_loss - b.hamming_loss,
        a.accuracy - b.accuracy,
        a.f_macro - b.f_macro,
        a.f_micro - b.f_micro,
    ]
    .iter()
    .fold(0.0f64, |g, v| g.max(v.abs()));
    pass &= gap <= 0.005;
    verdict(
        5,
        name,
        pass,
        &format!(
            "K {}, lambda 1: HL {:.4}, CA {:.4}, F-micro {:.4}; max lambda gap {:.4}, {:.1?}",
            report.folds, b.hamming_loss, b.accuracy, b.f_micro, gap, elapsed
        ),
    );
    assert!(pass);
}

fn error_rates(report: &ExperimentReport) -> Vec<f64> {
    report.run_for(1.0).unwrap().sets.iter().map(|c| c.report.error_rate).collect()
}

#[test]
fn criterion_06_scene_set_report() {
    let name = "scene prediction-set errors and singleton share";
    let (report, _) = match scene() {
        Ok(r) => r,
        Err(e) => {
            verdict(6, name, false, e);
            panic!("{}", e);
        }
    };
    let errors = error_rates(report);
    let at80 = &report.run_for(1.0).unwrap().sets[2];
    let singletons = at80.report.fractions()[1];
    let pass = errors[0] <= 0.06 && errors[1] <= 0.12 && errors[2] <= 0.23 && singletons >= 0.45;
    verdict(
        6,
        name,
        pass,
        &format!("errors {:.4}/{:.4}/{:.4}, singletons at 80% {:.4}", errors[0], errors[1], errors[2], singletons),
    );
    assert!(pass);
}

#[test]
fn criterion_07_yeast_set_report() {
    let name = "yeast prediction-set errors and size share";
    let (report, _) = match yeast() {
        Ok(r) => r,
        Err(e) => {
            verdict(7, name, false, e);
            panic!("{}", e);
        }
    };
    let errors = error_rates(report);
    let small = report.run_for(1.0).unwrap().sets[2].report.fraction_at_most(1 << 10);
    let pass = errors[0] <= 0.07 && errors[1] <= 0.12 && errors[2] <= 0.23 && small >= 0.70;
    verdict(
        7,
        name,
        pass,
        &format!("errors {:.4}/{:.4}/{:.4}, size <= 1024 at 80% {:.4}", errors[0], errors[1], errors[2], small),
    );
    assert!(pass);
}

#[test]
fn criterion_08_metric_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let n = 4;
    let mut mismatches = 0;
    for _ in 0..200 {
        let truth: Vec<LabelSet> = (0..10).map(|_| LabelSet::from_bits(rng.gen_range(0..16))).collect();
        let pred: Vec<LabelSet> = (0..10).map(|_| LabelSet::from_bits(rng.gen_range(0..16))).collect();
        let g = truth.len() as i64;

        let mut wrong = 0i64;
        let mut exact = 0i64;
        let (mut tp, mut fp, mut fn_) = (vec![0i64; n], vec![0i64; n], vec![0i64; n]);
        for (t, p) in truth.iter().zip(&pred) {
            if t == p {
                exact += 1;
            }
            for j in 0..n {
                match (t.contains(j), p.contains(j)) {
                    (true, true) => tp[j] += 1,
                    (false, true) => fp[j] += 1,
                    (true, false) => fn_[j] += 1,
                    (false, false) => {}
                }
                if t.contains(j) != p.contains(j) {
                    wrong += 1;
                }
            }
        }
        let f = |tp: i64, fp: i64, fn_: i64| {
            if 2 * tp + fp + fn_ == 0 {
                Ratio::from_integer(1)
            } else {
                Ratio::new(2 * tp, 2 * tp + fp + fn_)
            }
        };
        let macro_f = (0..n).fold(Ratio::from_integer(0i64), |acc, j| acc + f(tp[j], fp[j], fn_[j])) / n as i64;
        let micro_f = f(tp.iter().sum(), fp.iter().sum(), fn_.iter().sum());
        let hl = Ratio::new(wrong, g * n as i64);
        let ca = Ratio::new(exact, g);

        let (got_macro, got_micro) = f_measures(&truth, &pred, n).unwrap();
        let expected = [hl, ca, macro_f, micro_f].map(|r| r.to_f64().unwrap());
        let got = [
            hamming_loss(&truth, &pred, n).unwrap(),
            classification_accuracy(&truth, &pred).unwrap(),
            got_macro,
            got_micro,
        ];
        if expected.iter().zip(&got).any(|(e, g)| e.to_bits() != g.to_bits()) {
            mismatches += 1;
        }
    }
    let pass = mismatches == 0;
    verdict(8, "metrics equal exact rational recounts", pass, &format!("200 trials, {} mismatches", mismatches));
    assert!(pass);
}

#[test]
fn criterion_09_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let problem = SyntheticProblem::new(4, 4, 909);
    let paths: Vec<PathBuf> = ["tx.csv", "ty.csv", "sx.csv", "sy.csv"].iter().map(|f| dir.path().join(f)).collect();
    write_csv(&problem.sample(400, 1), &paths[0], &paths[1]).unwrap();
    write_csv(&problem.sample(150, 2), &paths[2], &paths[3]).unwrap();
    let mut config = ExperimentConfig::new(
        DataSource::Csv { features: paths[0].clone(), labels: paths[1].clone() },
        DataSource::Csv { features: paths[2].clone(), labels: paths[3].clone() },
    );
    config.rbf = RbfConfig::default().with_fraction(0.05);
    config.seed = 17;
    let mut outputs = Vec::new();
    for (i, threads) in [1, 4, 4].into_iter().enumerate() {
        config.threads = Some(threads);
        let out = dir.path().join(format!("run{}", i));
        let report = run_experiment(&config, Some(&out)).unwrap();
        let file = std::fs::read(out.join("report.json")).unwrap();
        assert_eq!(file, report.to_json().as_bytes());
        outputs.push((file, std::fs::read(out.join("model_lambda1.json")).unwrap()));
    }
    let pass = outputs.windows(2).all(|w| w[0] == w[1]);
    verdict(
        9,
        "byte-identical reports across runs and thread counts",
        pass,
        &format!("3 runs (1, 4, 4 threads), report {} bytes", outputs[0].0.len()),
    );
    assert!(pass);
}

fn property_suites() -> Result<usize, String> {
    let mut runner = TestRunner::new(ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    });
    let mut suites = 0;

    // Nesting, granularity and forced-prediction invariants on trained models.
    runner
        .run(&(any::<u64>(), 8usize..24, 1usize..=4), |(seed, rows, n)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data = random_dataset(&mut rng, rows, 2, n);
            let folds = make_folds(rows, 2 + (seed % 3) as usize, seed).unwrap();
            let lambda = (seed % 2) as f64;
            let model = train_ccp(&data, &folds, &RbfConfig::default().with_fraction(0.5), MeasureParams::new(4.0, lambda).unwrap()).unwrap();
            let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let table = model.p_values(&x).unwrap();
            for (ls, p) in table.iter() {
                let c = table.count(ls) as usize;
                prop_assert!((1..=rows + 1).contains(&c));
                prop_assert_eq!(p, c as f64 / (rows + 1) as f64);
            }
            let deltas = [0.05, 0.1, 0.2, 0.5, 0.9];
            let sets: Vec<_> = deltas.iter().map(|&d| prediction_set(&table, d).unwrap()).collect();
            for w in sets.windows(2) {
                prop_assert!(w[1].members.iter().all(|&m| w[0].contains(m)));
            }
            let f = forced(&table);
            prop_assert!(sets.iter().all(|s| s.is_empty() || s.contains(f.labelset)));
            Ok(())
        })
        .map_err(|e| format!("nesting/granularity: {}", e))?;
    suites += 1;

    // With lambda = 0 the co-occurrence matrix has no effect.
    runner
        .run(&(proptest::collection::vec(0.0f64..1.0, 1..=8), prop_oneof![Just(1.0), Just(2.0), Just(4.0)]), |(o, d)| {
            let n = o.len();
            let params = MeasureParams::new(d, 0.0).unwrap();
            let a = labelset_scores(&o, &CooccurrenceMatrix::all_seen(n), &params).unwrap();
            let b = labelset_scores(&o, &CooccurrenceMatrix::none_seen(n), &params).unwrap();
            prop_assert_eq!(a, b);
            Ok(())
        })
        .map_err(|e| format!("lambda = 0 reduction: {}", e))?;
    suites += 1;

    // Native prediction equals thresholding the sigmoid outputs at 0.5.
    runner
        .run(&(any::<u64>(), 6usize..30), |(seed, rows)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let data = random_dataset(&mut rng, rows, 3, 4);
            let model = train_rbf(&data, &RbfConfig::default().with_fraction(0.3).with_seed(seed)).unwrap();
            for _ in 0..5 {
                let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let raw = model.raw_scores(&x).unwrap();
                if raw.iter().any(|&r| r != 0.0 && r.abs() < 1e-12) {
                    continue;
                }
                let native = model.native_prediction(&x).unwrap();
                prop_assert_eq!(native, threshold(&raw, 0.0));
                prop_assert_eq!(native, threshold(&sigmoid_transform(&raw), 0.5));
            }
            Ok(())
        })
        .map_err(|e| format!("threshold equivalence: {}", e))?;
    suites += 1;

    // Fold partitions are exact.
    runner
        .run(&(2usize..500, any::<u64>()), |(size, seed)| {
            let k = 2 + (seed as usize % (size - 1));
            let folds = make_folds(size, k, seed).unwrap();
            let sizes = folds.fold_sizes();
            prop_assert_eq!(sizes.iter().sum::<usize>(), size);
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            let mut all: Vec<usize> = (0..k).flat_map(|f| folds.held_out(f)).collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..size).collect::<Vec<_>>());
            Ok(())
        })
        .map_err(|e| format!("fold partition: {}", e))?;
    suites += 1;
    Ok(suites)
}

#[test]
fn criterion_10_property_suites() {
    let result = property_suites();
    let pass = result.is_ok();
    let detail = match &result {
        Ok(n) => format!("{} suites, 48 cases each", n),
        Err(e) => e.clone(),
    };
    verdict(10, "module invariant property suites", pass, &detail);
    assert!(pass, "{}", detail);
}
