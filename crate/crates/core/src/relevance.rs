//! Relevance totals and the best-achievable relevance benchmark `rel_max`.

use crate::error::{Error, Result};
use crate::model::Instance;

/// Tolerance applied to every `rel >= beta * rel_max` comparison.
pub const REL_EPS: f64 = 1e-9;

/// Sum of member relevances, accumulated in the iteration order given.
pub fn rel_total<I: IntoIterator<Item = usize>>(instance: &Instance, ids: I) -> f64 {
    ids.into_iter().map(|id| instance.tag(id).relevance).sum()
}

/// Per-polarity relevances sorted descending, with prefix sums.
#[derive(Clone, Debug, PartialEq)]
pub struct RelBenchmark {
    sorted_pos: Vec<f64>,
    sorted_neg: Vec<f64>,
    prefix_pos: Vec<f64>,
    prefix_neg: Vec<f64>,
}

fn descending_with_prefix(mut values: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    values.sort_by(|a, b| b.total_cmp(a));
    let mut prefix = Vec::with_capacity(values.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in &values {
        acc += v;
        prefix.push(acc);
    }
    (values, prefix)
}

impl RelBenchmark {
    pub fn new(instance: &Instance) -> Self {
        let rel = |r: std::ops::Range<usize>| r.map(|id| instance.tag(id).relevance).collect();
        let (sorted_pos, prefix_pos) = descending_with_prefix(rel(instance.positive_ids()));
        let (sorted_neg, prefix_neg) = descending_with_prefix(rel(instance.negative_ids()));
        RelBenchmark {
            sorted_pos,
            sorted_neg,
            prefix_pos,
            prefix_neg,
        }
    }

    pub fn sorted_pos(&self) -> &[f64] {
        &self.sorted_pos
    }

    pub fn sorted_neg(&self) -> &[f64] {
        &self.sorted_neg
    }

    pub fn prefix_pos(&self) -> &[f64] {
        &self.prefix_pos
    }

    pub fn prefix_neg(&self) -> &[f64] {
        &self.prefix_neg
    }

    fn infeasible(&self, k1: usize, k2: usize) -> Error {
        Error::InfeasiblePolarity {
            need_pos: k1,
            need_neg: k2,
            have_pos: self.sorted_pos.len(),
            have_neg: self.sorted_neg.len(),
        }
    }

    /// Sum of the top `k1` positive and top `k2` negative relevances.
    pub fn rel_max(&self, k1: usize, k2: usize) -> Result<f64> {
        if k1 > self.sorted_pos.len() || k2 > self.sorted_neg.len() {
            return Err(self.infeasible(k1, k2));
        }
        Ok(self.prefix_pos[k1] + self.prefix_neg[k2])
    }

    /// Best relevance of any `x`-subset with at most `k1` positives and `k2` negatives.
    ///
    /// This is the per-step benchmark of the greedy solvers; at `x = k1 + k2` it coincides
    /// with [`rel_max`](Self::rel_max).
    pub fn stepwise_rel_max(&self, x: usize, k1: usize, k2: usize) -> Result<f64> {
        let max_pos = k1.min(self.sorted_pos.len());
        let max_neg = k2.min(self.sorted_neg.len());
        let lo = x.saturating_sub(max_neg);
        let hi = x.min(max_pos);
        if lo > hi {
            return Err(self.infeasible(k1, k2));
        }
        Ok((lo..=hi)
            .map(|p| self.prefix_pos[p] + self.prefix_neg[x - p])
            .fold(f64::NEG_INFINITY, f64::max))
    }
}

/// `rel >= beta * benchmark`, up to [`REL_EPS`].
#[inline]
pub fn meets_bound(rel: f64, beta: f64, benchmark: f64) -> bool {
    rel >= beta * benchmark - REL_EPS
}
