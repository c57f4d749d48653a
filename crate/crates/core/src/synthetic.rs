//! Seeded i.i.d. multi-label data for tests, demos and validity checks.
//!
//! Features are standard normal. Label `j` is present when a fixed random
//! linear score plus Gaussian noise clears a per-label offset, so labels are
//! correlated through shared features and some pairs rarely co-occur.
//! Instances never get an empty labelset: the label with the highest score
//! is forced on instead.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::MultiLabelDataset;
use crate::labelset::LabelSet;

#[derive(Debug, Clone)]
pub struct SyntheticProblem {
    weights: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    noise: f64,
}

impl SyntheticProblem {
    pub fn new(n_features: usize, n_labels: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = (0..n_labels)
            .map(|_| (0..n_features).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        let offsets = (0..n_labels).map(|_| rng.gen_range(0.0..1.0)).collect();
        Self {
            weights,
            offsets,
            noise: 0.5,
        }
    }

    pub fn n_features(&self) -> usize {
        self.weights[0].len()
    }

    pub fn n_labels(&self) -> usize {
        self.weights.len()
    }

    /// Draws `rows` instances; different `seed`s give independent samples of
    /// the same distribution.
    pub fn sample(&self, rows: usize, seed: u64) -> MultiLabelDataset<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = self.n_features();
        let mut features = Vec::with_capacity(rows * d);
        let mut labels = Vec::with_capacity(rows);
        for _ in 0..rows {
            let x: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let scores: Vec<f64> = self
                .weights
                .iter()
                .zip(&self.offsets)
                .map(|(w, b)| {
                    let noise: f64 = rng.sample(StandardNormal);
                    w.iter().zip(&x).map(|(a, v)| a * v).sum::<f64>() + self.noise * noise - b
                })
                .collect();
            let mut ls = LabelSet::from_indices(scores.iter().enumerate().filter(|(_, &s)| s > 0.0).map(|(j, _)| j));
            if ls.is_empty() {
                let best = (0..scores.len()).fold(0, |b, j| if scores[j] > scores[b] { j } else { b });
                ls.insert(best);
            }
            features.extend(x);
            labels.push(ls);
        }
        let names = (0..self.n_labels()).map(|j| format!("label{}", j + 1)).collect();
        MultiLabelDataset::from_labelsets(features, d, labels, names).expect("generated dataset is well formed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_non_empty() {
        let p = SyntheticProblem::new(5, 4, 1);
        let a = p.sample(200, 7);
        assert_eq!(a, p.sample(200, 7));
        assert_ne!(a, p.sample(200, 8));
        assert!(a.labels().iter().all(|ls| !ls.is_empty()));
        for j in 0..4 {
            assert!(a.labels().iter().any(|ls| ls.contains(j)), "label {} never appears", j);
        }
    }
}
