//! Exhaustive enumeration over all subsets with exactly `k1` positives and `k2` negatives.

use itertools::Itertools;

use super::{check_cap, prepare, timed, Algorithm, SolveReport, SolverConfig};
use crate::bitset::AttrSet;
use crate::coverage::{DcGraph, ThetaAcc};
use crate::error::{Error, Result};
use crate::model::{Instance, Objective, Params, Selection};
use crate::relevance::{meets_bound, rel_total};

/// One side (all positives or all negatives) of a candidate subset.
struct Half {
    ids: Vec<usize>,
    union: AttrSet,
    rel: f64,
}

fn halves(instance: &Instance, ids: std::ops::Range<usize>, r: usize) -> Vec<Half> {
    ids.combinations(r)
        .map(|ids| {
            let mut union = AttrSet::new(instance.m());
            for &id in &ids {
                union.union_with(&instance.tag(id).coverage);
            }
            let rel = rel_total(instance, ids.iter().copied());
            Half { ids, union, rel }
        })
        .collect()
}

fn joined(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

/// Running best under `(objective, rel_total)`, first-found winning exact ties.
/// Enumeration order is lexicographic in the sorted id list, so the first found is the smallest.
struct Best {
    score: i64,
    rel: f64,
    ids: Vec<usize>,
}

impl Best {
    fn offer(slot: &mut Option<Best>, score: i64, ids: impl FnOnce() -> Vec<usize>, instance: &Instance) {
        let ids = ids();
        let rel = rel_total(instance, ids.iter().copied());
        let better = match slot {
            None => true,
            Some(b) => score > b.score || (score == b.score && rel > b.rel),
        };
        if better {
            *slot = Some(Best { score, rel, ids });
        }
    }
}

/// Maximizes `cov_ic` by enumerating every quota-respecting subset.
///
/// Ties go to the higher relevance total, then the lexicographically smallest id list.
pub fn exact_ic(instance: &Instance, params: &Params, config: &SolverConfig) -> Result<SolveReport> {
    check_cap(instance, config)?;
    let prep = prepare(instance, params)?;
    let threshold = params.beta * prep.rel_max;

    let (outcome, wall_time) = timed(|| {
        let pos = halves(instance, instance.positive_ids(), params.k1);
        let neg = halves(instance, instance.negative_ids(), params.k2);
        let mut best: Option<Best> = None;
        let mut evaluated = 0u64;
        for p in &pos {
            for n in &neg {
                evaluated += 1;
                if !meets_bound(p.rel + n.rel, params.beta, prep.rel_max) {
                    continue;
                }
                let cov = p.union.union_count(&n.union) as i64;
                if let Some(b) = &best {
                    if cov < b.score {
                        continue;
                    }
                }
                Best::offer(&mut best, cov, || joined(&p.ids, &n.ids), instance);
            }
        }
        (best, evaluated)
    });

    let (best, evaluated) = outcome;
    let best = best.ok_or(Error::Infeasible { threshold })?;
    let value = best.score as u32;
    Ok(SolveReport {
        algorithm: Algorithm::ExactIc,
        selection: Selection {
            rel_total: best.rel,
            tag_ids: best.ids,
            objective: Objective::CovIc(value),
            feasible: true,
        },
        objective_value: value,
        rel_total: best.rel,
        threshold,
        wall_time,
        nodes_explored: evaluated,
        dead_end: false,
        alternate: None,
    })
}

/// Enumerates every quota-respecting subset, returning the `theta_dc` minimizer as the
/// primary selection and the `cov_dc` maximizer as [`SolveReport::alternate`].
pub fn exact_dc(instance: &Instance, params: &Params, config: &SolverConfig) -> Result<SolveReport> {
    check_cap(instance, config)?;
    let prep = prepare(instance, params)?;
    let threshold = params.beta * prep.rel_max;
    let graph = DcGraph::with_policy(instance, config.dummy_policy);

    let (outcome, wall_time) = timed(|| {
        let pos = halves(instance, instance.positive_ids(), params.k1);
        let neg = halves(instance, instance.negative_ids(), params.k2);
        let theta_acc = |ids: &[usize]| {
            let mut acc = ThetaAcc::new(&graph);
            for &id in ids {
                acc.add(&graph, id);
            }
            acc
        };
        let neg_acc: Vec<ThetaAcc> = neg.iter().map(|n| theta_acc(&n.ids)).collect();
        // the one-sided cov_dc terms depend on a single half each
        let pos_only: Vec<usize> = pos
            .iter()
            .map(|p| p.union.difference(instance.neg_union()).count())
            .collect();
        let neg_only: Vec<usize> = neg
            .iter()
            .map(|n| n.union.difference(instance.pos_union()).count())
            .collect();

        let mut best_theta: Option<Best> = None;
        let mut best_cov: Option<Best> = None;
        let mut evaluated = 0u64;
        for (pi, p) in pos.iter().enumerate() {
            let p_acc = theta_acc(&p.ids);
            for (ni, n) in neg.iter().enumerate() {
                evaluated += 1;
                if !meets_bound(p.rel + n.rel, params.beta, prep.rel_max) {
                    continue;
                }
                let theta = p_acc.joined(&neg_acc[ni]).value(&graph) as i64;
                let cov = (p.union.intersection(&n.union).count() + pos_only[pi] + neg_only[ni]) as i64;
                if best_theta.as_ref().is_none_or(|b| -theta >= b.score) {
                    Best::offer(&mut best_theta, -theta, || joined(&p.ids, &n.ids), instance);
                }
                if best_cov.as_ref().is_none_or(|b| cov >= b.score) {
                    Best::offer(&mut best_cov, cov, || joined(&p.ids, &n.ids), instance);
                }
            }
        }
        (best_theta, best_cov, evaluated)
    });

    let (best_theta, best_cov, evaluated) = outcome;
    let (Some(theta), Some(cov)) = (best_theta, best_cov) else {
        return Err(Error::Infeasible { threshold });
    };
    let theta_value = (-theta.score) as u32;
    Ok(SolveReport {
        algorithm: Algorithm::ExactDc,
        selection: Selection {
            rel_total: theta.rel,
            tag_ids: theta.ids,
            objective: Objective::ThetaDc(theta_value),
            feasible: true,
        },
        objective_value: theta_value,
        rel_total: theta.rel,
        threshold,
        wall_time,
        nodes_explored: evaluated,
        dead_end: false,
        alternate: Some(Selection {
            rel_total: cov.rel,
            tag_ids: cov.ids,
            objective: Objective::CovDc(cov.score as u32),
            feasible: true,
        }),
    })
}
