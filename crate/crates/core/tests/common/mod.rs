//! Brute-force oracles written against plain `BTreeSet`s, independent of the crate's bitsets.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tagadvisor::datagen::{random_instance, RandomSpec};
use tagadvisor::{Instance, Params};

pub fn cover(inst: &Instance, id: usize) -> BTreeSet<usize> {
    inst.tag(id).coverage.iter().collect()
}

fn union(inst: &Instance, ids: impl Iterator<Item = usize>) -> BTreeSet<usize> {
    ids.flat_map(|id| cover(inst, id)).collect()
}

pub fn cov_ic(inst: &Instance, sel: &[usize]) -> u32 {
    union(inst, sel.iter().copied()).len() as u32
}

pub fn cov_dc(inst: &Instance, sel: &[usize]) -> u32 {
    let is_pos = |id: &usize| inst.tag(*id).is_positive();
    let p = union(inst, sel.iter().copied().filter(is_pos));
    let n = union(inst, sel.iter().copied().filter(|id| !is_pos(id)));
    let all_p = union(inst, (0..inst.len()).filter(is_pos));
    let all_n = union(inst, (0..inst.len()).filter(|id| !is_pos(id)));
    (p.intersection(&n).count() + p.difference(&all_n).count() + n.difference(&all_p).count()) as u32
}

/// `theta_dc` by listing augmented vectors and every edge; a dummy joins only an empty side.
pub fn theta(inst: &Instance, sel: &[usize]) -> u32 {
    let is_pos = |id: &usize| inst.tag(*id).is_positive();
    let all_p = union(inst, (0..inst.len()).filter(is_pos));
    let all_n = union(inst, (0..inst.len()).filter(|id| !is_pos(id)));
    let only_p: BTreeSet<usize> = all_p.difference(&all_n).copied().collect();
    let only_n: BTreeSet<usize> = all_n.difference(&all_p).copied().collect();
    let aug = |id: usize| -> BTreeSet<usize> {
        let extra = if inst.tag(id).is_positive() { &only_n } else { &only_p };
        cover(inst, id).union(extra).copied().collect()
    };
    let mut pos: Vec<BTreeSet<usize>> = sel.iter().copied().filter(is_pos).map(aug).collect();
    let mut neg: Vec<BTreeSet<usize>> = sel.iter().copied().filter(|id| !is_pos(id)).map(aug).collect();
    let intra: BTreeSet<usize> = [&pos, &neg]
        .iter()
        .flat_map(|side| {
            let mut labels = BTreeSet::new();
            for (i, a) in side.iter().enumerate() {
                for b in &side[i + 1..] {
                    labels.extend(a.symmetric_difference(b).copied());
                }
            }
            labels
        })
        .collect();
    if pos.is_empty() {
        pos.push(only_n.clone());
    }
    if neg.is_empty() {
        neg.push(only_p.clone());
    }
    let mut cross = BTreeSet::new();
    for a in &pos {
        for b in &neg {
            cross.extend(a.symmetric_difference(b).copied());
        }
    }
    cross.difference(&intra).count() as u32
}

/// Every subset meeting the quotas and the relevance bound, as ascending id lists.
pub fn feasible_subsets(inst: &Instance, params: &Params) -> Vec<Vec<usize>> {
    let n = inst.len();
    let sets: Vec<Vec<usize>> = (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == params.k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|s| s.iter().filter(|&&i| inst.tag(i).is_positive()).count() == params.k1)
        .collect();
    let rel = |s: &Vec<usize>| s.iter().map(|&i| inst.tag(i).relevance).sum::<f64>();
    let best = sets.iter().map(rel).fold(f64::NEG_INFINITY, f64::max);
    sets.into_iter()
        .filter(|s| rel(s) >= params.beta * best - 1e-9)
        .collect()
}

pub fn max_of(inst: &Instance, params: &Params, f: impl Fn(&Instance, &[usize]) -> u32) -> Option<u32> {
    feasible_subsets(inst, params).iter().map(|s| f(inst, s)).max()
}

pub fn min_of(inst: &Instance, params: &Params, f: impl Fn(&Instance, &[usize]) -> u32) -> Option<u32> {
    feasible_subsets(inst, params).iter().map(|s| f(inst, s)).min()
}

/// Deterministic random instance number `i` of a suite.
pub fn suite_instance(seed: u64, i: usize, spec: RandomSpec) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    random_instance(&mut rng, spec)
}

pub fn sentence(inst: &Instance, ids: &[usize]) -> String {
    ids.iter()
        .map(|&i| inst.tag(i).to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn assert_feasible(inst: &Instance, params: &Params, ids: &[usize]) {
    assert!(
        tagadvisor::solvers::is_feasible(inst, params, ids),
        "infeasible selection {ids:?}"
    );
}
