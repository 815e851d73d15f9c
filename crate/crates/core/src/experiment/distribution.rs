use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use crate::graph::upper_pairs;
use crate::smoothing::Certificate;
use crate::{Error, Result};

/// Flipped pairs per certified size of their target endpoints. A pair with
/// two target endpoints counts once for each; a pair touching no target is
/// counted in `none`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeHistogram {
    pub by_size: BTreeMap<usize, usize>,
    pub none: usize,
}

impl EdgeHistogram {
    pub fn is_empty(&self) -> bool {
        self.by_size.is_empty() && self.none == 0
    }

    /// Endpoint entries with certified size at most `k`, over all entries
    /// including the `none` bin.
    pub fn fraction_at_most(&self, k: usize) -> f64 {
        let low: usize = self.by_size.range(..=k).map(|(_, c)| c).sum();
        let total: usize = self.by_size.values().sum::<usize>() + self.none;
        if total == 0 {
            0.0
        } else {
            low as f64 / total as f64
        }
    }
}

pub fn edge_histogram(delta: &[u8], num_nodes: usize, certificates: &[Certificate]) -> EdgeHistogram {
    let size: HashMap<usize, usize> = certificates.iter().map(|c| (c.node, c.certified_size)).collect();
    let mut h = EdgeHistogram::default();
    for ((s, t), _) in upper_pairs(num_nodes).zip(delta).filter(|(_, &f)| f == 1) {
        let mut hit = false;
        for u in [s, t] {
            if let Some(&k) = size.get(&u) {
                *h.by_size.entry(k).or_insert(0) += 1;
                hit = true;
            }
        }
        if !hit {
            h.none += 1;
        }
    }
    h
}

/// Writes `K,edges` rows in increasing `K`, then a `none` row if any pair
/// touched no target node.
pub fn report_distribution(
    delta: &[u8],
    num_nodes: usize,
    certificates: &[Certificate],
    path: impl AsRef<Path>,
) -> Result<EdgeHistogram> {
    let path = path.as_ref();
    let h = edge_histogram(delta, num_nodes, certificates);
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["K", "edges"])?;
    for (k, c) in &h.by_size {
        w.write_record([k.to_string(), c.to_string()])?;
    }
    if h.none > 0 {
        w.write_record(["none".to_string(), h.none.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(h)
}
