//! Depth-first branch-and-bound over tag inclusion, special-cased to the two 0/1 models.

use super::{check_cap, prepare, timed, Algorithm, DcLinearization, Prepared, SolveReport, SolverConfig};
use crate::bitset::AttrSet;
use crate::coverage::{cov_dc, DcGraph};
use crate::error::{Error, Result};
use crate::model::{Instance, Objective, Params, Selection};
use crate::relevance::{meets_bound, rel_total};

/// Coverage model explored by the search.
trait Model {
    type State: Clone;
    fn init(&self) -> Self::State;
    fn add(&self, state: &mut Self::State, id: usize);
    fn value(&self, state: &Self::State) -> u32;
    /// Upper bound on `value` over completions drawing from order position `pos` onward.
    fn bound(&self, state: &Self::State, pos: usize, pos_open: bool, neg_open: bool) -> u32;
}

/// Per-position unions of the remaining positives and negatives in search order.
struct Suffixes {
    pos: Vec<AttrSet>,
    neg: Vec<AttrSet>,
}

impl Suffixes {
    fn new(order: &[usize], vectors: impl Fn(usize) -> AttrSet, is_pos: impl Fn(usize) -> bool, m: usize) -> Self {
        let n = order.len();
        let mut pos = vec![AttrSet::new(m); n + 1];
        let mut neg = vec![AttrSet::new(m); n + 1];
        for i in (0..n).rev() {
            pos[i] = pos[i + 1].clone();
            neg[i] = neg[i + 1].clone();
            let id = order[i];
            if is_pos(id) {
                pos[i].union_with(&vectors(id));
            } else {
                neg[i].union_with(&vectors(id));
            }
        }
        Suffixes { pos, neg }
    }

    fn open(&self, i: usize, pos_open: bool, neg_open: bool) -> (AttrSet, AttrSet) {
        let m = self.pos[i].len();
        (
            if pos_open { self.pos[i].clone() } else { AttrSet::new(m) },
            if neg_open { self.neg[i].clone() } else { AttrSet::new(m) },
        )
    }
}

struct IcModel<'a> {
    instance: &'a Instance,
    suffix: Suffixes,
}

impl Model for IcModel<'_> {
    type State = AttrSet;

    fn init(&self) -> AttrSet {
        AttrSet::new(self.instance.m())
    }

    fn add(&self, state: &mut AttrSet, id: usize) {
        state.union_with(&self.instance.tag(id).coverage);
    }

    fn value(&self, state: &AttrSet) -> u32 {
        state.count() as u32
    }

    fn bound(&self, state: &AttrSet, pos: usize, pos_open: bool, neg_open: bool) -> u32 {
        let (p, n) = self.suffix.open(pos, pos_open, neg_open);
        let mut all = state.union(&p);
        all.union_with(&n);
        all.count() as u32
    }
}

/// `y_j <= Σ x⁺` and `y_j <= Σ x⁻`, dummies fixed selected.
struct TwoSidedModel<'a> {
    instance: &'a Instance,
    graph: DcGraph,
    suffix: Suffixes,
}

#[derive(Clone)]
struct Sides {
    pos: AttrSet,
    neg: AttrSet,
}

impl Model for TwoSidedModel<'_> {
    type State = Sides;

    fn init(&self) -> Sides {
        Sides {
            pos: self.graph.only_neg().clone(),
            neg: self.graph.only_pos().clone(),
        }
    }

    fn add(&self, state: &mut Sides, id: usize) {
        let v = &self.instance.tag(id).coverage;
        if self.instance.tag(id).is_positive() {
            state.pos.union_with(v);
        } else {
            state.neg.union_with(v);
        }
    }

    fn value(&self, state: &Sides) -> u32 {
        state.pos.intersection(&state.neg).count() as u32
    }

    fn bound(&self, state: &Sides, pos: usize, pos_open: bool, neg_open: bool) -> u32 {
        let (p, n) = self.suffix.open(pos, pos_open, neg_open);
        p.union(&state.pos).intersection(&n.union(&state.neg)).count() as u32
    }
}

/// `2·y_j <= Σ x` over all augmented coverers, dummies fixed selected.
struct AsPrintedModel<'a> {
    graph: &'a DcGraph,
    /// Values contained in at least one / at least two remaining augmented vectors, per polarity.
    suf_one: Suffixes,
    suf_two: Suffixes,
}

#[derive(Clone)]
struct Multiplicity {
    one: AttrSet,
    two: AttrSet,
}

impl Multiplicity {
    fn add(&mut self, v: &AttrSet) {
        let again = self.one.intersection(v);
        self.two.union_with(&again);
        self.one.union_with(v);
    }
}

impl AsPrintedModel<'_> {
    fn suffixes(graph: &DcGraph, order: &[usize], m: usize) -> (Suffixes, Suffixes) {
        let n = order.len();
        let empty = Multiplicity {
            one: AttrSet::new(m),
            two: AttrSet::new(m),
        };
        let mut pos = vec![empty.clone(); n + 1];
        let mut neg = vec![empty; n + 1];
        for i in (0..n).rev() {
            pos[i] = pos[i + 1].clone();
            neg[i] = neg[i + 1].clone();
            let id = order[i];
            let v = graph.aug_vector(crate::coverage::Node::Tag(id));
            if graph.is_positive(id) {
                pos[i].add(v);
            } else {
                neg[i].add(v);
            }
        }
        let split = |f: fn(&Multiplicity) -> &AttrSet| Suffixes {
            pos: pos.iter().map(|x| f(x).clone()).collect(),
            neg: neg.iter().map(|x| f(x).clone()).collect(),
        };
        (split(|x| &x.one), split(|x| &x.two))
    }
}

impl Model for AsPrintedModel<'_> {
    type State = Multiplicity;

    fn init(&self) -> Multiplicity {
        let m = self.graph.only_pos().len();
        let mut s = Multiplicity {
            one: AttrSet::new(m),
            two: AttrSet::new(m),
        };
        s.add(self.graph.only_neg());
        s.add(self.graph.only_pos());
        s
    }

    fn add(&self, state: &mut Multiplicity, id: usize) {
        state.add(self.graph.aug_vector(crate::coverage::Node::Tag(id)));
    }

    fn value(&self, state: &Multiplicity) -> u32 {
        state.two.count() as u32
    }

    fn bound(&self, state: &Multiplicity, pos: usize, pos_open: bool, neg_open: bool) -> u32 {
        let (op, on) = self.suf_one.open(pos, pos_open, neg_open);
        let (tp, tn) = self.suf_two.open(pos, pos_open, neg_open);
        let one = op.union(&on);
        let mut two = tp.union(&tn);
        two.union_with(&op.intersection(&on));
        let mut reach = state.two.union(&two);
        reach.union_with(&state.one.intersection(&one));
        reach.count() as u32
    }
}

/// Search order: positives by descending relevance, then negatives likewise; ties by id.
fn search_order(instance: &Instance) -> Vec<usize> {
    let by_rel = |r: std::ops::Range<usize>| {
        let mut ids: Vec<usize> = r.collect();
        ids.sort_by(|&a, &b| {
            instance
                .tag(b)
                .relevance
                .total_cmp(&instance.tag(a).relevance)
                .then(a.cmp(&b))
        });
        ids
    };
    let mut order = by_rel(instance.positive_ids());
    order.extend(by_rel(instance.negative_ids()));
    order
}

struct Search<'a, M: Model> {
    model: &'a M,
    order: &'a [usize],
    relevance: Vec<f64>,
    n_pos: usize,
    params: &'a Params,
    prep: &'a Prepared,
    chosen: Vec<usize>,
    best: Option<(u32, Vec<usize>)>,
    nodes: u64,
}

impl<M: Model> Search<'_, M> {
    fn dfs(&mut self, i: usize, state: &M::State, cp: usize, cn: usize, rel: f64) {
        self.nodes += 1;
        let (k1, k2) = (self.params.k1, self.params.k2);
        if cp == k1 && cn == k2 {
            if meets_bound(rel, self.params.beta, self.prep.rel_max) {
                let v = self.model.value(state);
                if self.best.as_ref().is_none_or(|(b, _)| v > *b) {
                    self.best = Some((v, self.chosen.clone()));
                }
            }
            return;
        }
        // (a) remaining quotas must still be fillable
        let pi = i.min(self.n_pos);
        let ni = i.saturating_sub(self.n_pos);
        let n_neg = self.order.len() - self.n_pos;
        let (rp, rn) = (k1 - cp, k2 - cn);
        if self.n_pos - pi < rp || n_neg - ni < rn {
            return;
        }
        // (b) optimistic relevance from the best remaining tags of each polarity
        let pp = self.prep.bench.prefix_pos();
        let pn = self.prep.bench.prefix_neg();
        let rel_bound = rel + (pp[pi + rp] - pp[pi]) + (pn[ni + rn] - pn[ni]);
        if !meets_bound(rel_bound, self.params.beta, self.prep.rel_max) {
            return;
        }
        // (c) optimistic coverage from every remaining open-side candidate
        if let Some((b, _)) = &self.best {
            if self.model.bound(state, i, rp > 0, rn > 0) <= *b {
                return;
            }
        }

        let id = self.order[i];
        let is_pos = i < self.n_pos;
        if (is_pos && rp > 0) || (!is_pos && rn > 0) {
            let mut next = state.clone();
            self.model.add(&mut next, id);
            self.chosen.push(id);
            let r = rel + self.relevance[id];
            if is_pos {
                self.dfs(i + 1, &next, cp + 1, cn, r);
            } else {
                self.dfs(i + 1, &next, cp, cn + 1, r);
            }
            self.chosen.pop();
        }
        self.dfs(i + 1, state, cp, cn, rel);
    }
}

fn run<M: Model>(
    model: &M,
    instance: &Instance,
    params: &Params,
    prep: &Prepared,
    order: &[usize],
) -> (Option<(u32, Vec<usize>)>, u64) {
    let mut search = Search {
        model,
        order,
        relevance: instance.tags().iter().map(|t| t.relevance).collect(),
        n_pos: instance.n_pos(),
        params,
        prep,
        chosen: Vec::with_capacity(params.k),
        best: None,
        nodes: 0,
    };
    search.dfs(0, &model.init(), 0, 0, 0.0);
    (search.best, search.nodes)
}

/// Maximizes `cov_ic` by branch-and-bound; the objective value always equals [`exact_ic`](super::exact_ic)'s.
pub fn bnb_ic(instance: &Instance, params: &Params, config: &SolverConfig) -> Result<SolveReport> {
    check_cap(instance, config)?;
    let prep = prepare(instance, params)?;
    let threshold = params.beta * prep.rel_max;
    let ((best, nodes), wall_time) = timed(|| {
        let order = search_order(instance);
        let model = IcModel {
            instance,
            suffix: Suffixes::new(
                &order,
                |id| instance.tag(id).coverage.clone(),
                |id| id < instance.n_pos(),
                instance.m(),
            ),
        };
        run(&model, instance, params, &prep, &order)
    });
    let (value, mut ids) = best.ok_or(Error::Infeasible { threshold })?;
    ids.sort_unstable();
    let rel = rel_total(instance, ids.iter().copied());
    Ok(SolveReport {
        algorithm: Algorithm::BnbIc,
        selection: Selection {
            tag_ids: ids,
            rel_total: rel,
            objective: Objective::CovIc(value),
            feasible: true,
        },
        objective_value: value,
        rel_total: rel,
        threshold,
        wall_time,
        nodes_explored: nodes,
        dead_end: false,
        alternate: None,
    })
}

/// Maximizes dependent coverage by branch-and-bound under `config.dc_linearization`.
///
/// With [`DcLinearization::TwoSided`] the model value is exactly `cov_dc`. The selection's
/// objective always carries the true `cov_dc`; `objective_value` carries the model value.
pub fn bnb_dc(instance: &Instance, params: &Params, config: &SolverConfig) -> Result<SolveReport> {
    check_cap(instance, config)?;
    let prep = prepare(instance, params)?;
    let threshold = params.beta * prep.rel_max;
    let graph = DcGraph::with_policy(instance, config.dummy_policy);
    let ((best, nodes), wall_time) = timed(|| {
        let order = search_order(instance);
        let is_pos = |id: usize| id < instance.n_pos();
        match config.dc_linearization {
            DcLinearization::TwoSided => {
                let model = TwoSidedModel {
                    instance,
                    suffix: Suffixes::new(&order, |id| instance.tag(id).coverage.clone(), is_pos, instance.m()),
                    graph: graph.clone(),
                };
                run(&model, instance, params, &prep, &order)
            }
            DcLinearization::AsPrinted => {
                let (suf_one, suf_two) = AsPrintedModel::suffixes(&graph, &order, instance.m());
                let model = AsPrintedModel {
                    graph: &graph,
                    suf_one,
                    suf_two,
                };
                run(&model, instance, params, &prep, &order)
            }
        }
    });
    let (value, mut ids) = best.ok_or(Error::Infeasible { threshold })?;
    ids.sort_unstable();
    let rel = rel_total(instance, ids.iter().copied());
    Ok(SolveReport {
        algorithm: Algorithm::BnbDc,
        selection: Selection {
            objective: Objective::CovDc(cov_dc(instance, &ids)),
            tag_ids: ids,
            rel_total: rel,
            feasible: true,
        },
        objective_value: value,
        rel_total: rel,
        threshold,
        wall_time,
        nodes_explored: nodes,
        dead_end: false,
        alternate: None,
    })
}

/// Value of the DC 0/1 model at the selection `ids` (dummies fixed selected).
pub fn dc_linearized_value(graph: &DcGraph, instance: &Instance, ids: &[usize], lin: DcLinearization) -> u32 {
    match lin {
        DcLinearization::TwoSided => {
            let model = TwoSidedModel {
                instance,
                graph: graph.clone(),
                suffix: Suffixes {
                    pos: vec![],
                    neg: vec![],
                },
            };
            let mut s = model.init();
            for &id in ids {
                model.add(&mut s, id);
            }
            model.value(&s)
        }
        DcLinearization::AsPrinted => {
            let empty = Suffixes {
                pos: vec![],
                neg: vec![],
            };
            let model = AsPrintedModel {
                graph,
                suf_one: empty,
                suf_two: Suffixes {
                    pos: vec![],
                    neg: vec![],
                },
            };
            let mut s = model.init();
            for &id in ids {
                model.add(&mut s, id);
            }
            model.value(&s)
        }
    }
}
