//! Greedy solvers with a per-step relevance filter.

use super::{prepare, timed, Algorithm, SolveReport, SolverConfig};
use crate::bitset::AttrSet;
use crate::coverage::{DcGraph, ThetaAcc};
use crate::error::Result;
use crate::model::{Instance, Objective, Params, Selection};
use crate::relevance::{meets_bound, rel_total, RelBenchmark};

/// Open quotas and running totals shared by both greedy loops.
struct Progress {
    chosen: Vec<usize>,
    taken: Vec<bool>,
    rel: f64,
    open_pos: usize,
    open_neg: usize,
}

impl Progress {
    fn new(instance: &Instance, params: &Params) -> Self {
        Progress {
            chosen: Vec::with_capacity(params.k),
            taken: vec![false; instance.len()],
            rel: 0.0,
            open_pos: params.k1,
            open_neg: params.k2,
        }
    }

    fn open(&self, instance: &Instance, id: usize) -> bool {
        !self.taken[id]
            && if instance.tag(id).is_positive() {
                self.open_pos > 0
            } else {
                self.open_neg > 0
            }
    }

    fn take(&mut self, instance: &Instance, id: usize) {
        self.taken[id] = true;
        self.chosen.push(id);
        self.rel += instance.tag(id).relevance;
        if instance.tag(id).is_positive() {
            self.open_pos -= 1;
        } else {
            self.open_neg -= 1;
        }
    }

    fn benchmark(&self, bench: &RelBenchmark, params: &Params, step: usize) -> Result<f64> {
        bench.stepwise_rel_max(self.chosen.len() + step, params.k1, params.k2)
    }

    fn sorted(&self) -> Vec<usize> {
        let mut ids = self.chosen.clone();
        ids.sort_unstable();
        ids
    }
}

/// Strictly-better test for `(score, relevance, ids)` keys; `score` is maximized.
fn beats(score: i64, rel: f64, cand: &[usize], best: &Option<(i64, f64, Vec<usize>)>) -> bool {
    match best {
        None => true,
        Some((s, r, ids)) => {
            (score, rel).partial_cmp(&(*s, *r)).is_some_and(|o| o.is_gt())
                || (score == *s && rel == *r && cand < ids.as_slice())
        }
    }
}

/// Greedy independent coverage: one tag per step, maximizing the coverage union.
///
/// A step admits only tags of an open polarity whose addition keeps the running relevance at
/// or above `beta` times the best relevance achievable with that many tags. Ties go to higher
/// relevance, then lower id. If no tag is admissible the partial selection is returned with
/// `feasible = false` and `dead_end = true`.
pub fn greedy_ic(instance: &Instance, params: &Params, _config: &SolverConfig) -> Result<SolveReport> {
    let prep = prepare(instance, params)?;
    let threshold = params.beta * prep.rel_max;
    let (progress, wall_time) = timed(|| -> Result<(Progress, bool)> {
        let mut pr = Progress::new(instance, params);
        let mut covered = AttrSet::new(instance.m());
        for _ in 0..params.k {
            let bench = pr.benchmark(&prep.bench, params, 1)?;
            let mut best: Option<(i64, f64, Vec<usize>)> = None;
            for id in 0..instance.len() {
                if !pr.open(instance, id) {
                    continue;
                }
                let tag = instance.tag(id);
                if !meets_bound(pr.rel + tag.relevance, params.beta, bench) {
                    continue;
                }
                let gain = covered.union_count(&tag.coverage) as i64;
                if beats(gain, tag.relevance, &[id], &best) {
                    best = Some((gain, tag.relevance, vec![id]));
                }
            }
            let Some((_, _, pick)) = best else {
                return Ok((pr, true));
            };
            covered.union_with(&instance.tag(pick[0]).coverage);
            pr.take(instance, pick[0]);
        }
        Ok((pr, false))
    });
    let (pr, dead_end) = progress?;
    let ids = pr.sorted();
    let value = crate::coverage::cov_ic(instance, &ids);
    Ok(report(
        Algorithm::GreedyIc,
        instance,
        ids,
        Objective::CovIc(value),
        threshold,
        wall_time,
        dead_end,
    ))
}

/// Greedy dependent coverage minimizing `theta_dc`.
///
/// While both quotas are open, adds the cross pair `(t⁺, t⁻)` that minimizes `theta_dc` of the
/// extended selection among pairs passing the relevance filter for `|T*| + 2` tags. Then fills
/// the remaining quota one tag at a time with the filter for `|T*| + 1`. Ties go to the higher
/// relevance of the added tags, then the lexicographically smaller ids.
pub fn greedy_dc(instance: &Instance, params: &Params, config: &SolverConfig) -> Result<SolveReport> {
    let prep = prepare(instance, params)?;
    let threshold = params.beta * prep.rel_max;
    let graph = DcGraph::with_policy(instance, config.dummy_policy);
    let (progress, wall_time) = timed(|| -> Result<(Progress, bool)> {
        let mut pr = Progress::new(instance, params);
        let mut acc = ThetaAcc::new(&graph);

        while pr.open_pos > 0 && pr.open_neg > 0 {
            let bench = pr.benchmark(&prep.bench, params, 2)?;
            let pos = candidates(instance, &pr, instance.positive_ids(), config.dc_beam);
            let neg = candidates(instance, &pr, instance.negative_ids(), config.dc_beam);
            let mut best: Option<(i64, f64, Vec<usize>)> = None;
            for &p in &pos {
                for &n in &neg {
                    let pair_rel = instance.tag(p).relevance + instance.tag(n).relevance;
                    if !meets_bound(pr.rel + pair_rel, params.beta, bench) {
                        continue;
                    }
                    let theta = -(acc.value_with(&graph, &[p, n]) as i64);
                    if beats(theta, pair_rel, &[p, n], &best) {
                        best = Some((theta, pair_rel, vec![p, n]));
                    }
                }
            }
            let Some((_, _, pick)) = best else {
                return Ok((pr, true));
            };
            for id in pick {
                acc.add(&graph, id);
                pr.take(instance, id);
            }
        }

        while pr.chosen.len() < params.k {
            let bench = pr.benchmark(&prep.bench, params, 1)?;
            let mut best: Option<(i64, f64, Vec<usize>)> = None;
            for id in 0..instance.len() {
                if !pr.open(instance, id) {
                    continue;
                }
                let r = instance.tag(id).relevance;
                if !meets_bound(pr.rel + r, params.beta, bench) {
                    continue;
                }
                let theta = -(acc.value_with(&graph, &[id]) as i64);
                if beats(theta, r, &[id], &best) {
                    best = Some((theta, r, vec![id]));
                }
            }
            let Some((_, _, pick)) = best else {
                return Ok((pr, true));
            };
            acc.add(&graph, pick[0]);
            pr.take(instance, pick[0]);
        }
        Ok((pr, false))
    });
    let (pr, dead_end) = progress?;
    let ids = pr.sorted();
    let value = graph.theta(&ids);
    Ok(report(
        Algorithm::GreedyDc,
        instance,
        ids,
        Objective::ThetaDc(value),
        threshold,
        wall_time,
        dead_end,
    ))
}

/// Unselected tags of one polarity, optionally limited to the `beam` most relevant.
fn candidates(instance: &Instance, pr: &Progress, range: std::ops::Range<usize>, beam: Option<usize>) -> Vec<usize> {
    let mut ids: Vec<usize> = range.filter(|&id| !pr.taken[id]).collect();
    if let Some(b) = beam {
        ids.sort_by(|&a, &b| {
            instance
                .tag(b)
                .relevance
                .total_cmp(&instance.tag(a).relevance)
                .then(a.cmp(&b))
        });
        ids.truncate(b);
        ids.sort_unstable();
    }
    ids
}

fn report(
    algorithm: Algorithm,
    instance: &Instance,
    ids: Vec<usize>,
    objective: Objective,
    threshold: f64,
    wall_time: std::time::Duration,
    dead_end: bool,
) -> SolveReport {
    let rel = rel_total(instance, ids.iter().copied());
    SolveReport {
        algorithm,
        selection: Selection {
            tag_ids: ids,
            rel_total: rel,
            objective,
            feasible: !dead_end,
        },
        objective_value: objective.value(),
        rel_total: rel,
        threshold,
        wall_time,
        nodes_explored: 0,
        dead_end,
        alternate: None,
    }
}
