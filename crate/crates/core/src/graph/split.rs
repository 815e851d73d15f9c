use log::warn;
use rand::seq::SliceRandom;

use super::{DataSplit, Graph};
use crate::{rng, Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self {
            train: 0.1,
            val: 0.1,
            test: 0.8,
        }
    }
}

impl SplitRatios {
    pub fn validate(&self) -> Result<()> {
        let SplitRatios { train, val, test } = *self;
        if [train, val, test].iter().any(|r| !(0.0..=1.0).contains(r) || r.is_nan())
            || train <= 0.0
            || train + val + test > 1.0 + 1e-9
        {
            return Err(Error::Parameter(format!(
                "split ratios ({train}, {val}, {test}) must be nonnegative with positive train and sum <= 1"
            )));
        }
        Ok(())
    }
}

/// Splits `total` across classes proportionally to `weights`, never exceeding
/// `capacity`, optionally giving every class at least one slot first.
fn allocate(total: usize, weights: &[usize], capacity: &[usize], at_least_one: bool) -> Vec<usize> {
    let c = weights.len();
    let mut quota = vec![0usize; c];
    let mut left = total;
    if at_least_one && total >= c {
        for (q, &cap) in quota.iter_mut().zip(capacity) {
            if cap > 0 {
                *q = 1;
                left -= 1;
            }
        }
    }
    let weight_sum: usize = weights.iter().sum();
    if left > 0 && weight_sum > 0 {
        let mut frac = Vec::with_capacity(c);
        let base_left = left;
        for i in 0..c {
            let exact = base_left as f64 * weights[i] as f64 / weight_sum as f64;
            let take = (exact.floor() as usize).min(capacity[i] - quota[i]).min(left);
            quota[i] += take;
            left -= take;
            frac.push((exact - exact.floor(), i));
        }
        frac.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        for &(_, i) in &frac {
            if left == 0 {
                break;
            }
            if quota[i] < capacity[i] {
                quota[i] += 1;
                left -= 1;
            }
        }
    }
    // Leftovers from capped classes go wherever room remains.
    for i in 0..c {
        let room = capacity[i] - quota[i];
        let take = room.min(left);
        quota[i] += take;
        left -= take;
    }
    quota
}

/// Label-stratified random split with `floor(ratio · n)` nodes per mask.
pub fn split_nodes<S: Scalar>(graph: &Graph<S>, ratios: SplitRatios, seed: u64) -> Result<DataSplit> {
    ratios.validate()?;
    let SplitRatios { train, val, test } = ratios;
    let n = graph.num_nodes();
    let count = |r: f64| ((r * n as f64) + 1e-9).floor() as usize;
    let (n_train, n_val, n_test) = (count(train), count(val), count(test));
    if n_train == 0 {
        return Err(Error::Parameter(format!("train ratio {train} selects no nodes out of {n}")));
    }

    let c = graph.num_classes();
    let mut rng = rng::seeded(seed);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); c];
    for (u, &y) in graph.labels().iter().enumerate() {
        by_class[y].push(u);
    }
    for nodes in by_class.iter_mut() {
        nodes.shuffle(&mut rng);
    }
    let sizes: Vec<usize> = by_class.iter().map(Vec::len).collect();
    if n_train >= c && sizes.contains(&0) {
        warn!("some classes have no nodes; they cannot appear in the training set");
    }

    let train_q = allocate(n_train, &sizes, &sizes, true);
    let remaining: Vec<usize> = sizes.iter().zip(&train_q).map(|(s, q)| s - q).collect();
    let val_q = allocate(n_val, &sizes, &remaining, false);
    if sizes.iter().zip(&train_q).any(|(&s, &q)| s > 0 && q == 0) {
        warn!("class too small for stratified training quota; split is best-effort");
    }

    let (mut tr, mut va, mut rest) = (Vec::new(), Vec::new(), Vec::new());
    for (k, nodes) in by_class.iter().enumerate() {
        tr.extend_from_slice(&nodes[..train_q[k]]);
        va.extend_from_slice(&nodes[train_q[k]..train_q[k] + val_q[k]]);
        rest.extend_from_slice(&nodes[train_q[k] + val_q[k]..]);
    }
    rest.shuffle(&mut rng);
    rest.truncate(n_test);
    DataSplit::new(n, tr, va, rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{synth_sbm, SbmParams};

    fn sbm(n: usize, k: usize) -> Graph {
        synth_sbm(&SbmParams {
            n,
            k,
            p_in: 0.2,
            p_out: 0.02,
            feature_dim: k,
            seed: 5,
        })
        .unwrap()
    }

    #[test]
    fn default_ratios_sizes() {
        let g = sbm(100, 2);
        let s = split_nodes(&g, SplitRatios::default(), 1).unwrap();
        assert_eq!((s.train.len(), s.val.len(), s.test.len()), (10, 10, 80));
        let t = split_nodes(&g, SplitRatios::default(), 2).unwrap();
        assert_ne!(s, t);
        assert_eq!((t.train.len(), t.val.len(), t.test.len()), (10, 10, 80));
        assert_eq!(s, split_nodes(&g, SplitRatios::default(), 1).unwrap());
    }

    #[test]
    fn all_train() {
        let g = sbm(20, 2);
        let s = split_nodes(&g, SplitRatios { train: 1.0, val: 0.0, test: 0.0 }, 0).unwrap();
        assert_eq!(s.train, (0..20).collect::<Vec<_>>());
        assert!(s.val.is_empty() && s.test.is_empty());
    }

    #[test]
    fn every_class_in_train() {
        let g = sbm(40, 4);
        let s = split_nodes(&g, SplitRatios::default(), 9).unwrap();
        let mut classes: Vec<usize> = s.train.iter().map(|&u| g.labels()[u]).collect();
        classes.dedup();
        classes.sort();
        classes.dedup();
        assert_eq!(classes, vec![0, 1, 2, 3]);
    }

    #[test]
    fn bad_ratios() {
        let g = sbm(20, 2);
        assert!(split_nodes(&g, SplitRatios { train: 0.6, val: 0.3, test: 0.3 }, 0).is_err());
        assert!(split_nodes(&g, SplitRatios { train: 0.0, val: 0.3, test: 0.3 }, 0).is_err());
    }

    #[test]
    fn allocation_respects_capacity() {
        assert_eq!(allocate(5, &[10, 1], &[10, 1], true), vec![4, 1]);
        assert_eq!(allocate(3, &[1, 1], &[1, 1], false), vec![1, 1]);
    }
}
