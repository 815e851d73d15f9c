use std::sync::atomic::{AtomicUsize, Ordering};

/// Label lookup restricted to a visible node set. Reads of hidden labels
/// return `None` and are counted, so tests can audit that an attack path
/// never touched them.
#[derive(Debug)]
pub struct VisibleLabels<'a> {
    labels: &'a [usize],
    visible: Vec<bool>,
    violations: AtomicUsize,
}

impl<'a> VisibleLabels<'a> {
    pub fn new(labels: &'a [usize], visible_nodes: &[usize]) -> Self {
        let mut visible = vec![false; labels.len()];
        for &u in visible_nodes {
            visible[u] = true;
        }
        Self {
            labels,
            visible,
            violations: AtomicUsize::new(0),
        }
    }

    pub fn get(&self, node: usize) -> Option<usize> {
        if self.visible.get(node).copied().unwrap_or(false) {
            Some(self.labels[node])
        } else {
            self.violations.fetch_add(1, Ordering::Relaxed);
            None
        }
    }

    pub fn violations(&self) -> usize {
        self.violations.load(Ordering::Relaxed)
    }
}
