//! Seeded Lloyd k-means used to place RBF prototypes.
//!
//! Points are sorted lexicographically before anything else happens, so the
//! result depends on the multiset of points and the seed, never on the order
//! the caller supplied them in.

use std::cmp::Ordering;

use rand::Rng;

use crate::scalar::Scalar;

fn squared_distance<F: Scalar>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

fn lexicographic<F: Scalar>(a: &[F], b: &[F]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.partial_cmp(y).unwrap_or(Ordering::Equal))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Clusters `points` into at most `k` groups and returns the centers.
///
/// Initial centers are `k` distinct point values drawn with `rng`. When there
/// are no more than `k` distinct values, those values are returned as the
/// centers. Iteration stops once assignments are stable or after `max_iters`
/// rounds; an emptied cluster is re-seeded at the point farthest from its
/// current center.
pub fn kmeans<F: Scalar, R: Rng>(points: &[&[F]], k: usize, max_iters: usize, rng: &mut R) -> Vec<Vec<F>> {
    if points.is_empty() || k == 0 {
        return Vec::new();
    }
    let mut sorted: Vec<&[F]> = points.to_vec();
    sorted.sort_by(|a, b| lexicographic(a, b));
    let mut distinct: Vec<&[F]> = sorted.clone();
    distinct.dedup_by(|a, b| lexicographic(a, b).is_eq());
    if distinct.len() <= k {
        return distinct.into_iter().map(<[F]>::to_vec).collect();
    }

    let mut picks = rand::seq::index::sample(rng, distinct.len(), k).into_vec();
    picks.sort_unstable();
    let mut centers: Vec<Vec<F>> = picks.iter().map(|&i| distinct[i].to_vec()).collect();

    let dim = centers[0].len();
    let mut assignment = vec![usize::MAX; sorted.len()];
    for _ in 0..max_iters {
        let mut changed = false;
        for (p, slot) in sorted.iter().zip(assignment.iter_mut()) {
            let nearest = nearest_center(p, &centers);
            if *slot != nearest {
                *slot = nearest;
                changed = true;
            }
        }
        if !changed {
            break;
        }

        let mut sums = vec![vec![F::zero(); dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in sorted.iter().zip(&assignment) {
            counts[c] += 1;
            for (s, &v) in sums[c].iter_mut().zip(p.iter()) {
                *s = *s + v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                let n = F::from_count(counts[c]);
                centers[c] = sums[c].iter().map(|&s| s / n).collect();
            }
        }
        for c in (0..k).filter(|&c| counts[c] == 0) {
            let far = sorted
                .iter()
                .zip(&assignment)
                .enumerate()
                .map(|(i, (p, &a))| (i, squared_distance(p, &centers[a])))
                .fold((0, F::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best });
            centers[c] = sorted[far.0].to_vec();
            assignment[far.0] = c;
        }
    }
    centers
}

fn nearest_center<F: Scalar>(p: &[F], centers: &[Vec<F>]) -> usize {
    let mut best = 0;
    let mut best_d = F::infinity();
    for (c, center) in centers.iter().enumerate() {
        let d = squared_distance(p, center);
        if d < best_d {
            best_d = d;
            best = c;
        }
    }
    best
}
