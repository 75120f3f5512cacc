//! Coverage objectives.
//!
//! * [`cov_ic`]: attribute values covered by any selected tag.
//! * [`cov_dc`]: attribute values covered from both sentiment sides, where the vocabulary
//!   has both sides for that value; one-sided values count when their only side is selected.
//! * [`theta_dc`]: the edge-label objective on the dummy-augmented tag graph, minimized by
//!   the dependent-coverage greedy solver.

use crate::bitset::AttrSet;
use crate::model::{Instance, Sentiment};

/// `|∪ cov(t)|` over the selection.
pub fn cov_ic(instance: &Instance, ids: &[usize]) -> u32 {
    let mut union = AttrSet::new(instance.m());
    for &id in ids {
        union.union_with(&instance.tag(id).coverage);
    }
    union.count() as u32
}

/// Dependent coverage:
/// `|P ∩ N| + |P \ ∪cov(T⁻)| + |N \ ∪cov(T⁺)|`, where `P`/`N` are the unions of selected
/// positive/negative coverage and the subtracted unions range over the whole vocabulary.
pub fn cov_dc(instance: &Instance, ids: &[usize]) -> u32 {
    let (pos, neg) = selected_unions(instance, ids);
    let both = pos.intersection(&neg).count();
    let pos_only = pos.difference(instance.neg_union()).count();
    let neg_only = neg.difference(instance.pos_union()).count();
    (both + pos_only + neg_only) as u32
}

fn selected_unions(instance: &Instance, ids: &[usize]) -> (AttrSet, AttrSet) {
    let mut pos = AttrSet::new(instance.m());
    let mut neg = AttrSet::new(instance.m());
    for &id in ids {
        let tag = instance.tag(id);
        if tag.is_positive() {
            pos.union_with(&tag.coverage);
        } else {
            neg.union_with(&tag.coverage);
        }
    }
    (pos, neg)
}

/// When the dummy tags `t_d⁺`/`t_d⁻` join the cross edges of [`theta_dc`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DummyPolicy {
    /// A dummy stands in for its polarity only when no real tag of that polarity is selected.
    #[default]
    FillEmptySide,
    /// Both dummies are always part of the cross-edge index sets.
    Always,
}

/// A vertex of the labeled tag graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Tag(usize),
    DummyPos,
    DummyNeg,
}

/// Set of attribute values on which two augmented tag vectors differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeLabel {
    pub differing: AttrSet,
}

impl EdgeLabel {
    /// Hamming distance between the endpoints.
    pub fn len(&self) -> usize {
        self.differing.count()
    }

    pub fn is_empty(&self) -> bool {
        self.differing.is_empty()
    }
}

/// Dummy-augmented tag vectors.
///
/// Values covered only by positive tags (`only_pos`) are added to every negative tag and
/// form the vector of `t_d⁻`; symmetrically `only_neg` is added to every positive tag and
/// forms `t_d⁺`. Dummies have relevance 0 and never count toward `k`.
#[derive(Clone, Debug)]
pub struct DcGraph {
    n_pos: usize,
    aug: Vec<AttrSet>,
    only_pos: AttrSet,
    only_neg: AttrSet,
    policy: DummyPolicy,
}

impl DcGraph {
    pub fn new(instance: &Instance) -> Self {
        DcGraph::with_policy(instance, DummyPolicy::default())
    }

    pub fn with_policy(instance: &Instance, policy: DummyPolicy) -> Self {
        let only_pos = instance.pos_union().difference(instance.neg_union());
        let only_neg = instance.neg_union().difference(instance.pos_union());
        let aug = instance
            .tags()
            .iter()
            .map(|t| match t.sentiment {
                Sentiment::Positive => t.coverage.union(&only_neg),
                Sentiment::Negative => t.coverage.union(&only_pos),
            })
            .collect();
        DcGraph {
            n_pos: instance.n_pos(),
            aug,
            only_pos,
            only_neg,
            policy,
        }
    }

    pub fn policy(&self) -> DummyPolicy {
        self.policy
    }

    pub fn only_pos(&self) -> &AttrSet {
        &self.only_pos
    }

    pub fn only_neg(&self) -> &AttrSet {
        &self.only_neg
    }

    pub fn n_pos(&self) -> usize {
        self.n_pos
    }

    pub fn len(&self) -> usize {
        self.aug.len()
    }

    pub fn is_empty(&self) -> bool {
        self.aug.is_empty()
    }

    fn words(&self) -> usize {
        self.only_pos.words().len()
    }

    pub fn is_positive(&self, id: usize) -> bool {
        id < self.n_pos
    }

    pub fn aug_vector(&self, node: Node) -> &AttrSet {
        match node {
            Node::Tag(id) => &self.aug[id],
            Node::DummyPos => &self.only_neg,
            Node::DummyNeg => &self.only_pos,
        }
    }

    pub fn edge_label(&self, a: Node, b: Node) -> EdgeLabel {
        EdgeLabel {
            differing: self.aug_vector(a).symmetric_difference(self.aug_vector(b)),
        }
    }

    /// [`theta_dc`] of the selection `ids` (real tags only).
    pub fn theta(&self, ids: &[usize]) -> u32 {
        let mut acc = ThetaAcc::new(self);
        for &id in ids {
            acc.add(self, id);
        }
        acc.value(self)
    }
}

/// `theta_dc`: size of the union of cross-edge labels minus the union of intra-edge labels.
///
/// A value `j` survives iff every selected positive vector agrees at `j`, every selected
/// negative vector agrees at `j`, and the two sides disagree. This is evaluated word-wise
/// from running AND/OR accumulators instead of enumerating edges.
pub fn theta_dc(graph: &DcGraph, ids: &[usize]) -> u32 {
    graph.theta(ids)
}

/// Incremental state for [`theta_dc`]: per-polarity AND and OR of selected augmented vectors.
#[derive(Clone, Debug)]
pub struct ThetaAcc {
    p_and: Vec<u64>,
    p_or: Vec<u64>,
    n_and: Vec<u64>,
    n_or: Vec<u64>,
    p_cnt: usize,
    n_cnt: usize,
}

impl ThetaAcc {
    pub fn new(graph: &DcGraph) -> Self {
        let w = graph.words();
        ThetaAcc {
            p_and: vec![u64::MAX; w],
            p_or: vec![0; w],
            n_and: vec![u64::MAX; w],
            n_or: vec![0; w],
            p_cnt: 0,
            n_cnt: 0,
        }
    }

    pub fn add(&mut self, graph: &DcGraph, id: usize) {
        let v = graph.aug[id].words();
        let (and, or) = if graph.is_positive(id) {
            self.p_cnt += 1;
            (&mut self.p_and, &mut self.p_or)
        } else {
            self.n_cnt += 1;
            (&mut self.n_and, &mut self.n_or)
        };
        for ((a, o), x) in and.iter_mut().zip(or.iter_mut()).zip(v) {
            *a &= x;
            *o |= x;
        }
    }

    pub fn value(&self, graph: &DcGraph) -> u32 {
        self.value_with(graph, &[])
    }

    /// Accumulator of the union of both selections.
    pub fn joined(&self, other: &ThetaAcc) -> ThetaAcc {
        let and = |a: &[u64], b: &[u64]| a.iter().zip(b).map(|(x, y)| x & y).collect();
        let or = |a: &[u64], b: &[u64]| a.iter().zip(b).map(|(x, y)| x | y).collect();
        ThetaAcc {
            p_and: and(&self.p_and, &other.p_and),
            p_or: or(&self.p_or, &other.p_or),
            n_and: and(&self.n_and, &other.n_and),
            n_or: or(&self.n_or, &other.n_or),
            p_cnt: self.p_cnt + other.p_cnt,
            n_cnt: self.n_cnt + other.n_cnt,
        }
    }

    /// Value after hypothetically adding `extra` (real tag ids), without mutating `self`.
    pub fn value_with(&self, graph: &DcGraph, extra: &[usize]) -> u32 {
        let mut p_cnt = self.p_cnt;
        let mut n_cnt = self.n_cnt;
        for &id in extra {
            if graph.is_positive(id) {
                p_cnt += 1;
            } else {
                n_cnt += 1;
            }
        }
        let with_dpos = graph.policy == DummyPolicy::Always || p_cnt == 0;
        let with_dneg = graph.policy == DummyPolicy::Always || n_cnt == 0;
        let dpos = graph.only_neg.words();
        let dneg = graph.only_pos.words();

        let mut total = 0u32;
        for w in 0..self.p_and.len() {
            let (mut pa, mut po, mut na, mut no) = (self.p_and[w], self.p_or[w], self.n_and[w], self.n_or[w]);
            for &id in extra {
                let x = graph.aug[id].words()[w];
                if graph.is_positive(id) {
                    pa &= x;
                    po |= x;
                } else {
                    na &= x;
                    no |= x;
                }
            }
            let intra = (po & !pa) | (no & !na);
            let (cpa, cpo) = if with_dpos {
                (pa & dpos[w], po | dpos[w])
            } else {
                (pa, po)
            };
            let (cna, cno) = if with_dneg {
                (na & dneg[w], no | dneg[w])
            } else {
                (na, no)
            };
            let cross = (cpo | cno) & !(cpa & cna);
            total += (cross & !intra).count_ones();
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{camera, ids};
    use crate::model::{build_instance, Rule};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    /// `cov_dc` straight from the three-term definition over `BTreeSet`s.
    fn cov_dc_oracle(inst: &Instance, sel: &[usize]) -> u32 {
        let set = |it: &mut dyn Iterator<Item = usize>| -> BTreeSet<usize> {
            it.flat_map(|id| inst.tag(id).coverage.iter().collect::<Vec<_>>())
                .collect()
        };
        let p = set(&mut sel.iter().copied().filter(|&i| inst.tag(i).is_positive()));
        let n = set(&mut sel.iter().copied().filter(|&i| !inst.tag(i).is_positive()));
        let all_p = set(&mut inst.positive_ids());
        let all_n = set(&mut inst.negative_ids());
        (p.intersection(&n).count() + p.difference(&all_n).count() + n.difference(&all_p).count()) as u32
    }

    /// `theta_dc` by enumerating every cross and intra edge and taking label unions.
    fn theta_oracle(graph: &DcGraph, sel: &[usize]) -> u32 {
        let pos: Vec<Node> = sel
            .iter()
            .filter(|&&i| graph.is_positive(i))
            .map(|&i| Node::Tag(i))
            .collect();
        let neg: Vec<Node> = sel
            .iter()
            .filter(|&&i| !graph.is_positive(i))
            .map(|&i| Node::Tag(i))
            .collect();
        let mut cross_pos = pos.clone();
        let mut cross_neg = neg.clone();
        if graph.policy() == DummyPolicy::Always || pos.is_empty() {
            cross_pos.push(Node::DummyPos);
        }
        if graph.policy() == DummyPolicy::Always || neg.is_empty() {
            cross_neg.push(Node::DummyNeg);
        }
        let mut cross = BTreeSet::new();
        for &a in &cross_pos {
            for &b in &cross_neg {
                cross.extend(graph.edge_label(a, b).differing.iter());
            }
        }
        let mut intra = BTreeSet::new();
        for side in [&pos, &neg] {
            for (i, &a) in side.iter().enumerate() {
                for &b in &side[i + 1..] {
                    intra.extend(graph.edge_label(a, b).differing.iter());
                }
            }
        }
        cross.difference(&intra).count() as u32
    }

    #[test]
    fn cov_ic_examples() {
        let inst = camera();
        assert_eq!(
            cov_ic(&inst, &ids(&inst, &["super cool", "stylish", "gimmicky touchscreen"])),
            5
        );
        let pair = ids(&inst, &["stylish", "blurry pictures"]);
        assert_eq!(cov_ic(&inst, &pair), 7);
        let union: BTreeSet<usize> = pair.iter().flat_map(|&i| inst.tag(i).coverage.iter()).collect();
        assert_eq!(union.len(), 7);
        assert_eq!(cov_ic(&inst, &[]), 0);
    }

    #[test]
    fn cov_dc_examples() {
        let inst = camera();
        let three = ids(&inst, &["super cool", "stylish", "gimmicky touchscreen"]);
        assert_eq!(cov_dc(&inst, &three), 3);
        let pair = ids(&inst, &["stylish", "poor battery life"]);
        assert_eq!(cov_dc_oracle(&inst, &pair), 4);
        assert_eq!(cov_dc(&inst, &pair), 4);
        assert_eq!(cov_dc(&inst, &[]), 0);
    }

    #[test]
    fn dummy_construction_on_camera() {
        let inst = camera();
        let g = DcGraph::new(&inst);
        // a3 = Color=Red has no negative tag, a6 = Shutter Speed has no positive tag
        assert_eq!(g.only_pos().iter().collect::<Vec<_>>(), vec![2]);
        assert_eq!(g.only_neg().iter().collect::<Vec<_>>(), vec![5]);
        // super cool gains a6, poor battery life gains a3: labels differ on {a3, a6}
        let sc = ids(&inst, &["super cool"])[0];
        let pbl = ids(&inst, &["poor battery life"])[0];
        assert_eq!(g.aug_vector(Node::Tag(sc)).iter().collect::<Vec<_>>(), vec![3, 5, 6, 7]);
        assert_eq!(
            g.aug_vector(Node::Tag(pbl)).iter().collect::<Vec<_>>(),
            vec![2, 3, 6, 7]
        );
        assert_eq!(
            g.edge_label(Node::Tag(sc), Node::Tag(pbl))
                .differing
                .iter()
                .collect::<Vec<_>>(),
            vec![2, 5]
        );
    }

    #[test]
    fn edge_label_examples() {
        let inst = camera();
        let g = DcGraph::new(&inst);
        let st = ids(&inst, &["stylish"])[0];
        let pbl = ids(&inst, &["poor battery life"])[0];
        let label = g.edge_label(Node::Tag(st), Node::Tag(pbl));
        let oracle: BTreeSet<usize> = g
            .aug_vector(Node::Tag(st))
            .iter()
            .collect::<BTreeSet<_>>()
            .symmetric_difference(&g.aug_vector(Node::Tag(pbl)).iter().collect())
            .copied()
            .collect();
        assert_eq!(label.differing.iter().collect::<BTreeSet<_>>(), oracle);
        assert_eq!(label.differing.iter().collect::<Vec<_>>(), vec![5]);
        assert!(g.edge_label(Node::Tag(st), Node::Tag(st)).is_empty());
        let dd = g.edge_label(Node::DummyPos, Node::DummyNeg);
        assert_eq!(dd.differing.iter().collect::<Vec<_>>(), vec![2, 5]);
    }

    #[test]
    fn theta_examples() {
        let inst = camera();
        let g = DcGraph::new(&inst);
        let pair = ids(&inst, &["stylish", "poor battery life"]);
        assert_eq!(theta_oracle(&g, &pair), 1);
        assert_eq!(theta_dc(&g, &pair), 1);
        // one real cross edge, no intra edges: l(super cool, poor battery life) = {a3, a6}
        let sc_pbl = ids(&inst, &["super cool", "poor battery life"]);
        assert_eq!(theta_oracle(&g, &sc_pbl), 2);
        assert_eq!(theta_dc(&g, &sc_pbl), 2);
        // empty selection: only the dummy-dummy edge
        assert_eq!(theta_dc(&g, &[]), (g.only_pos().count() + g.only_neg().count()) as u32);
        assert_eq!(
            theta_dc(&g, &[]),
            g.edge_label(Node::DummyPos, Node::DummyNeg).len() as u32
        );
    }

    #[test]
    fn always_policy_includes_dummy_edges() {
        let inst = camera();
        let g = DcGraph::with_policy(&inst, DummyPolicy::Always);
        let pair = ids(&inst, &["stylish", "poor battery life"]);
        assert_eq!(theta_oracle(&g, &pair), 5);
        assert_eq!(theta_dc(&g, &pair), 5);
    }

    #[test]
    fn identical_vectors_give_zero() {
        let rules = vec![
            Rule::new([0, 1], "good", Sentiment::Positive, 0.5),
            Rule::new([0, 1], "bad", Sentiment::Negative, 0.5),
        ];
        let inst = build_instance(&rules, 3).unwrap();
        let g = DcGraph::new(&inst);
        assert!(g.only_pos().is_empty() && g.only_neg().is_empty());
        assert_eq!(g.aug_vector(Node::Tag(0)), &inst.tag(0).coverage);
        assert_eq!(theta_dc(&g, &[0, 1]), 0);
    }

    #[test]
    fn positive_only_vocabulary() {
        let rules = vec![
            Rule::new([0, 1], "a", Sentiment::Positive, 0.5),
            Rule::new([2], "b", Sentiment::Positive, 0.5),
        ];
        let inst = build_instance(&rules, 4).unwrap();
        let g = DcGraph::new(&inst);
        assert_eq!(g.only_pos().iter().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert!(g.only_neg().is_empty());
        // the single positive faces t_d⁻ only
        assert_eq!(theta_dc(&g, &[0]), theta_oracle(&g, &[0]));
        assert_eq!(theta_dc(&g, &[0]), 1);
    }

    #[test]
    fn dependent_coverage_is_not_submodular() {
        // a positive tag whose matching negative is present only in the superset
        let rules = vec![
            Rule::new([0], "plus", Sentiment::Positive, 0.5),
            Rule::new([0], "minus", Sentiment::Negative, 0.5),
        ];
        let inst = build_instance(&rules, 1).unwrap();
        let small: Vec<usize> = vec![];
        let large = vec![1];
        let gain = |s: &[usize]| {
            let mut with = s.to_vec();
            with.push(0);
            with.sort_unstable();
            cov_dc(&inst, &with) as i64 - cov_dc(&inst, s) as i64
        };
        assert_eq!(gain(&small), 0);
        assert_eq!(gain(&large), 1);
        assert!(gain(&large) > gain(&small));
    }

    fn arb_instance() -> impl Strategy<Value = Instance> {
        (1usize..20).prop_flat_map(|m| {
            proptest::collection::vec(
                (proptest::collection::btree_set(0..m, 1..=m.min(6)), any::<bool>()),
                1..10,
            )
            .prop_map(move |tags| {
                let rules: Vec<Rule> = tags
                    .into_iter()
                    .enumerate()
                    .map(|(i, (ante, pos))| {
                        let s = if pos { Sentiment::Positive } else { Sentiment::Negative };
                        Rule::new(ante, format!("t{i}"), s, 0.5)
                    })
                    .collect();
                build_instance(&rules, m).unwrap()
            })
        })
    }

    fn subsets(n: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>, usize)> {
        (proptest::collection::vec(0u8..3, n), 0..n).prop_map(|(marks, t)| {
            // 0: outside, 1: in S and S', 2: in S' only; t is forced outside S'
            let small = (0..marks.len()).filter(|&i| i != t && marks[i] == 1).collect();
            let large = (0..marks.len()).filter(|&i| i != t && marks[i] >= 1).collect();
            (small, large, t)
        })
    }

    proptest! {
        #[test]
        fn theta_closed_form_matches_edge_enumeration(
            inst in arb_instance(),
            mask in any::<u16>(),
            always in any::<bool>(),
        ) {
            let policy = if always { DummyPolicy::Always } else { DummyPolicy::FillEmptySide };
            let g = DcGraph::with_policy(&inst, policy);
            let sel: Vec<usize> = (0..inst.len()).filter(|i| mask & (1 << i) != 0).collect();
            prop_assert_eq!(theta_dc(&g, &sel), theta_oracle(&g, &sel));
            let mut acc = ThetaAcc::new(&g);
            if let Some((last, rest)) = sel.split_last() {
                for &i in rest { acc.add(&g, i); }
                prop_assert_eq!(acc.value_with(&g, &[*last]), theta_oracle(&g, &sel));
            }
        }

        #[test]
        fn cov_dc_matches_oracle(inst in arb_instance(), mask in any::<u16>()) {
            let sel: Vec<usize> = (0..inst.len()).filter(|i| mask & (1 << i) != 0).collect();
            prop_assert_eq!(cov_dc(&inst, &sel), cov_dc_oracle(&inst, &sel));
        }

        #[test]
        fn edge_labels_form_a_metric(inst in arb_instance(), a in 0usize..10, b in 0usize..10, c in 0usize..10) {
            let g = DcGraph::new(&inst);
            let n = inst.len();
            let (a, b, c) = (Node::Tag(a % n), Node::Tag(b % n), Node::Tag(c % n));
            prop_assert_eq!(g.edge_label(a, b), g.edge_label(b, a));
            prop_assert!(g.edge_label(a, c).len() <= g.edge_label(a, b).len() + g.edge_label(b, c).len());
        }

        #[test]
        fn cov_ic_monotone_submodular((inst, (small, large, t)) in arb_instance().prop_flat_map(|i| {
            let n = i.len();
            (Just(i), subsets(n))
        })) {
            let gain = |s: &[usize]| {
                let mut with = s.to_vec();
                with.push(t);
                cov_ic(&inst, &with) as i64 - cov_ic(&inst, s) as i64
            };
            prop_assert!(gain(&small) >= gain(&large));
            prop_assert!(gain(&large) >= 0);
        }
    }
}
