//! Maximin and random sampling.
//!
//! Picks `k'` distinguished objects that are pairwise far apart, groups
//! every object with its nearest distinguished object, then draws a random
//! sample from each group proportional to the group size. Distances are
//! computed on demand, so no N x N matrix is materialized.

use crate::data::EmbeddingSet;
use crate::dissimilarity::{metric_distance, Metric};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// How the first maximin object is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaximinStart {
    /// The object with the largest total distance to all others.
    /// Deterministic; the default.
    MaxRowSum,
    /// A uniformly random object from the seeded generator.
    Random(u64),
}

/// Output of the full sampling pass.
#[derive(Debug, Clone, PartialEq)]
pub struct MmrsResult {
    /// Original indices of the k' distinguished objects, in selection order.
    pub distinguished: Vec<usize>,
    /// Object -> group id in `0..k'`.
    pub group_of: Vec<usize>,
    /// Sampled original indices, deduplicated and sorted ascending.
    pub sample: Vec<usize>,
    /// Quota drawn from each group: `ceil(n * |G_j| / N)`.
    pub per_group_quota: Vec<usize>,
}

fn check_cosine_rows(x: &EmbeddingSet, metric: Metric) -> Result<()> {
    if metric == Metric::Cosine {
        for i in 0..x.n_objects() {
            if x.row(i).iter().all(|&v| v == 0.0) {
                return Err(Error::ZeroNormRow { row: i });
            }
        }
    }
    Ok(())
}

/// Selects `k_prime` distinguished objects by farthest-point traversal.
///
/// The first object maximizes the sum of distances to all others (ties to
/// the smallest index); each later object maximizes its minimum distance to
/// the already-chosen set (ties to the smallest index).
pub fn maximin_select(x: &EmbeddingSet, metric: Metric, k_prime: usize) -> Result<Vec<usize>> {
    maximin_select_with_start(x, metric, k_prime, MaximinStart::MaxRowSum)
}

pub fn maximin_select_with_start(
    x: &EmbeddingSet,
    metric: Metric,
    k_prime: usize,
    start: MaximinStart,
) -> Result<Vec<usize>> {
    let n = x.n_objects();
    if k_prime < 1 || k_prime > n {
        return Err(Error::InvalidParameter(format!("k' = {k_prime} out of range 1..={n}")));
    }
    check_cosine_rows(x, metric)?;

    let first = match start {
        MaximinStart::MaxRowSum => {
            let mut row_sums = vec![0.0; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let d = metric_distance(x.row(i), x.row(j), metric);
                    row_sums[i] += d;
                    row_sums[j] += d;
                }
            }
            let mut best = 0;
            for i in 1..n {
                if row_sums[i] > row_sums[best] {
                    best = i;
                }
            }
            best
        }
        MaximinStart::Random(seed) => SplitMix64::new(seed).next_below(n as u64) as usize,
    };

    let mut chosen = Vec::with_capacity(k_prime);
    chosen.push(first);
    let mut min_dist: Vec<f64> =
        (0..n).map(|i| metric_distance(x.row(i), x.row(first), metric)).collect();
    min_dist[first] = f64::NEG_INFINITY;

    while chosen.len() < k_prime {
        let mut pick = usize::MAX;
        let mut best = f64::NEG_INFINITY;
        for (i, &d) in min_dist.iter().enumerate() {
            if !chosen.contains(&i) && d > best {
                best = d;
                pick = i;
            }
        }
        chosen.push(pick);
        for i in 0..n {
            let d = metric_distance(x.row(i), x.row(pick), metric);
            if d < min_dist[i] {
                min_dist[i] = d;
            }
        }
    }
    Ok(chosen)
}

/// Nearest-prototype rule: maps each object to its closest distinguished
/// object (ties to the smallest group id). Distinguished objects always map
/// to their own group.
pub fn npr_group(x: &EmbeddingSet, metric: Metric, distinguished: &[usize]) -> Result<Vec<usize>> {
    let n = x.n_objects();
    if distinguished.is_empty() {
        return Err(Error::InvalidParameter("no distinguished objects".into()));
    }
    for &d in distinguished {
        if d >= n {
            return Err(Error::InvalidParameter(format!("distinguished index {d} out of range")));
        }
    }
    check_cosine_rows(x, metric)?;
    let mut group_of = vec![0usize; n];
    for i in 0..n {
        let mut best = f64::INFINITY;
        let mut group = 0;
        for (j, &proto) in distinguished.iter().enumerate() {
            let d = metric_distance(x.row(i), x.row(proto), metric);
            if d < best {
                best = d;
                group = j;
            }
        }
        group_of[i] = group;
    }
    // A duplicated prototype would capture later copies under the smallest-j
    // rule; pin each distinguished object to its own group.
    for (j, &proto) in distinguished.iter().enumerate() {
        group_of[proto] = j;
    }
    Ok(group_of)
}

/// Full MMRS pass: maximin selection, nearest-prototype grouping, then a
/// proportional without-replacement draw of `ceil(n * |G_j| / N)` objects
/// per group using a partial Fisher-Yates shuffle over the seeded
/// generator. Deterministic for a fixed seed.
pub fn mmrs_sample(
    x: &EmbeddingSet,
    metric: Metric,
    k_prime: usize,
    n_target: usize,
    seed: u64,
) -> Result<MmrsResult> {
    let n = x.n_objects();
    if n_target < 1 || n_target > n {
        return Err(Error::InvalidParameter(format!("n = {n_target} out of range 1..={n}")));
    }
    let distinguished = maximin_select(x, metric, k_prime)?;
    let group_of = npr_group(x, metric, &distinguished)?;

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k_prime];
    for (i, &g) in group_of.iter().enumerate() {
        members[g].push(i);
    }

    let mut rng = SplitMix64::new(seed);
    let mut sample = Vec::new();
    let mut per_group_quota = Vec::with_capacity(k_prime);
    for group in &mut members {
        // ceil(n_target * |G_j| / N) in exact integer arithmetic.
        let quota = (n_target * group.len()).div_ceil(n);
        per_group_quota.push(quota);
        let len = group.len();
        for t in 0..quota {
            let swap = t + rng.next_below((len - t) as u64) as usize;
            group.swap(t, swap);
            sample.push(group[t]);
        }
    }
    sample.sort_unstable();
    sample.dedup();
    Ok(MmrsResult { distinguished, group_of, sample, per_group_quota })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_points() -> EmbeddingSet {
        EmbeddingSet::new(3, 1, vec![0.0, 1.0, 10.0]).unwrap()
    }

    #[test]
    fn maximin_hand_trace() {
        // Row sums: 11 (point 0), 10 (point 1), 19 (point 10).
        let chosen = maximin_select(&line_points(), Metric::Euclidean, 2).unwrap();
        assert_eq!(chosen, vec![2, 0]);
    }

    #[test]
    fn maximin_extremes() {
        let one = maximin_select(&line_points(), Metric::Euclidean, 1).unwrap();
        assert_eq!(one, vec![2]);
        let all = maximin_select(&line_points(), Metric::Euclidean, 3).unwrap();
        let mut sorted = all.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2]);
        assert!(maximin_select(&line_points(), Metric::Euclidean, 4).is_err());
        assert!(maximin_select(&line_points(), Metric::Euclidean, 0).is_err());
    }

    #[test]
    fn npr_hand_trace() {
        let groups = npr_group(&line_points(), Metric::Euclidean, &[2, 0]).unwrap();
        assert_eq!(groups, vec![1, 1, 0]);
    }

    #[test]
    fn npr_single_prototype() {
        let groups = npr_group(&line_points(), Metric::Euclidean, &[1]).unwrap();
        assert_eq!(groups, vec![0, 0, 0]);
    }

    #[test]
    fn npr_distinguished_own_group() {
        let groups = npr_group(&line_points(), Metric::Euclidean, &[2, 0, 1]).unwrap();
        assert_eq!(groups[2], 0);
        assert_eq!(groups[0], 1);
        assert_eq!(groups[1], 2);
    }

    #[test]
    fn quota_example() {
        // 10 points in two well-separated blobs of sizes 7 and 3.
        let mut data = Vec::new();
        for i in 0..7 {
            data.push(i as f64 * 0.01);
        }
        for i in 0..3 {
            data.push(100.0 + i as f64 * 0.01);
        }
        let x = EmbeddingSet::new(10, 1, data).unwrap();
        let result = mmrs_sample(&x, Metric::Euclidean, 2, 4, 9).unwrap();
        let mut quotas = result.per_group_quota.clone();
        quotas.sort_unstable();
        assert_eq!(quotas, vec![2, 3]); // ceil(1.2), ceil(2.8)
        assert_eq!(result.sample.len(), 5);
    }

    #[test]
    fn sample_everything_when_n_equals_big_n() {
        let x = line_points();
        let result = mmrs_sample(&x, Metric::Euclidean, 2, 3, 1).unwrap();
        assert_eq!(result.sample, vec![0, 1, 2]);
        let sizes: Vec<usize> = {
            let mut s = vec![0; 2];
            for &g in &result.group_of {
                s[g] += 1;
            }
            s
        };
        assert_eq!(result.per_group_quota, sizes);
    }

    #[test]
    fn determinism_and_membership() {
        let spec = crate::data::MixtureSpec { k: 3, dims: 2, n_per: 40, separation: 15.0, seed: 4 };
        let x = crate::data::generate_gaussian_mixture(&spec).unwrap();
        let a = mmrs_sample(&x, Metric::Euclidean, 5, 30, 42).unwrap();
        let b = mmrs_sample(&x, Metric::Euclidean, 5, 30, 42).unwrap();
        assert_eq!(a, b);
        let c = mmrs_sample(&x, Metric::Euclidean, 5, 30, 43).unwrap();
        assert_ne!(a.sample, c.sample);

        // Every sampled index belongs to the group that claimed it, the
        // sample is unique, and quotas are exact.
        let n = x.n_objects();
        let mut group_sizes = [0usize; 5];
        for &g in &a.group_of {
            group_sizes[g] += 1;
        }
        for (j, &q) in a.per_group_quota.iter().enumerate() {
            assert_eq!(q, (30 * group_sizes[j]).div_ceil(n));
            let drawn = a.sample.iter().filter(|&&i| a.group_of[i] == j).count();
            assert_eq!(drawn, q);
        }
        let total: usize = a.per_group_quota.iter().sum();
        assert!((30..30 + 5).contains(&total));
        assert_eq!(a.sample.len(), total);
    }

    #[test]
    fn maximin_step_property() {
        let spec = crate::data::MixtureSpec { k: 2, dims: 3, n_per: 25, separation: 8.0, seed: 12 };
        let x = crate::data::generate_gaussian_mixture(&spec).unwrap();
        let chosen = maximin_select(&x, Metric::Euclidean, 6).unwrap();
        for t in 1..chosen.len() {
            let prior = &chosen[..t];
            let min_to = |i: usize| {
                prior
                    .iter()
                    .map(|&c| metric_distance(x.row(i), x.row(c), Metric::Euclidean))
                    .fold(f64::INFINITY, f64::min)
            };
            let chosen_min = min_to(chosen[t]);
            for i in 0..x.n_objects() {
                if !chosen[..=t].contains(&i) {
                    assert!(chosen_min >= min_to(i) - 1e-12);
                }
            }
        }
    }

    #[test]
    fn random_start_is_seeded() {
        let x = line_points();
        let a = maximin_select_with_start(&x, Metric::Euclidean, 2, MaximinStart::Random(5)).unwrap();
        let b = maximin_select_with_start(&x, Metric::Euclidean, 2, MaximinStart::Random(5)).unwrap();
        assert_eq!(a, b);
    }
}
