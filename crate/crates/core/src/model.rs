//! Instance data model: attribute values, sentiment-labeled tags, rules, and solve parameters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bitset::AttrSet;
use crate::error::{Error, Result};

/// Slack subtracted before taking `ceil(alpha * k)` so that e.g. `0.5 * 2` never rounds up to 2.
pub const QUOTA_EPS: f64 = 1e-9;

/// Dense index of one attribute value of the item under review.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AttrId(pub usize);

impl fmt::Display for AttrId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// Tag polarity. `Positive` orders before `Negative`, which fixes the tag id layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sentiment {
    Positive,
    Negative,
}

impl Sentiment {
    pub fn is_positive(self) -> bool {
        self == Sentiment::Positive
    }

    /// Symbol used in the rules file format.
    pub fn ascii(self) -> &'static str {
        match self {
            Sentiment::Positive => "+",
            Sentiment::Negative => "-",
        }
    }
}

impl fmt::Display for Sentiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sentiment::Positive => "+",
            Sentiment::Negative => "\u{2212}",
        })
    }
}

/// An association `{attribute values} -> tag` with occurrence probability `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub antecedent: BTreeSet<AttrId>,
    pub tag_label: String,
    pub sentiment: Sentiment,
    pub probability: f64,
}

impl Rule {
    pub fn new<I: IntoIterator<Item = usize>>(
        antecedent: I,
        tag_label: impl Into<String>,
        sentiment: Sentiment,
        probability: f64,
    ) -> Self {
        Rule {
            antecedent: antecedent.into_iter().map(AttrId).collect(),
            tag_label: tag_label.into(),
            sentiment,
            probability,
        }
    }

    fn validate(&self, m: usize) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidRule {
            label: self.tag_label.clone(),
            reason: reason.to_string(),
        };
        if self.antecedent.is_empty() {
            return Err(invalid("antecedent is empty"));
        }
        if !(0.0..=1.0).contains(&self.probability) {
            return Err(invalid("probability must lie in [0, 1]"));
        }
        if let Some(&AttrId(index)) = self.antecedent.iter().find(|a| a.0 >= m) {
            return Err(Error::AttributeOutOfRange { index, m });
        }
        Ok(())
    }
}

/// A sentiment-labeled tag of the instance vocabulary.
#[derive(Clone, Debug, PartialEq)]
pub struct Tag {
    pub id: usize,
    pub label: String,
    pub sentiment: Sentiment,
    /// Probability of the rule kept for this tag, `rel(t, i)`.
    pub relevance: f64,
    pub coverage: AttrSet,
}

impl Tag {
    pub fn is_positive(&self) -> bool {
        self.sentiment.is_positive()
    }

    /// Boolean vector of length `m`, bit `y` set iff attribute value `y` is covered.
    pub fn vectorize(&self) -> Vec<bool> {
        self.coverage.to_bools()
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.label, self.sentiment)
    }
}

/// See [`Tag::vectorize`].
pub fn vectorize(tag: &Tag) -> Vec<bool> {
    tag.vectorize()
}

/// Immutable, solver-ready view of one item's tag vocabulary.
///
/// Tag ids are dense: positives occupy `0..n_pos` and negatives `n_pos..n`, each block
/// sorted by label.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    item_id: String,
    m: usize,
    tags: Vec<Tag>,
    n_pos: usize,
    n_neg: usize,
    attr_names: Vec<String>,
    pos_union: AttrSet,
    neg_union: AttrSet,
}

/// Builds an [`Instance`] from rules over a universe of `m` attribute values.
///
/// Rules sharing `(label, sentiment)` collapse to the one with highest probability;
/// remaining ties prefer the larger antecedent, then the lexicographically smaller one.
pub fn build_instance(rules: &[Rule], m: usize) -> Result<Instance> {
    if m == 0 {
        return Err(Error::InvalidParams("attribute universe must be non-empty".into()));
    }
    if rules.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let mut best: BTreeMap<(Sentiment, &str), &Rule> = BTreeMap::new();
    for rule in rules {
        rule.validate(m)?;
        let key = (rule.sentiment, rule.tag_label.as_str());
        match best.get(&key) {
            Some(current) if !rule_beats(rule, current) => {}
            _ => {
                best.insert(key, rule);
            }
        }
    }

    let tags: Vec<Tag> = best
        .into_values()
        .enumerate()
        .map(|(id, rule)| Tag {
            id,
            label: rule.tag_label.clone(),
            sentiment: rule.sentiment,
            relevance: rule.probability,
            coverage: AttrSet::from_indices(m, rule.antecedent.iter().map(|a| a.0))
                .expect("antecedent validated against m"),
        })
        .collect();

    let n_pos = tags.iter().take_while(|t| t.is_positive()).count();
    let n_neg = tags.len() - n_pos;
    let mut pos_union = AttrSet::new(m);
    let mut neg_union = AttrSet::new(m);
    for tag in &tags {
        if tag.is_positive() {
            pos_union.union_with(&tag.coverage);
        } else {
            neg_union.union_with(&tag.coverage);
        }
    }

    Ok(Instance {
        item_id: String::new(),
        m,
        tags,
        n_pos,
        n_neg,
        attr_names: (0..m).map(|i| AttrId(i).to_string()).collect(),
        pos_union,
        neg_union,
    })
}

fn rule_beats(candidate: &Rule, current: &Rule) -> bool {
    if candidate.probability != current.probability {
        return candidate.probability > current.probability;
    }
    if candidate.antecedent.len() != current.antecedent.len() {
        return candidate.antecedent.len() > current.antecedent.len();
    }
    candidate.antecedent < current.antecedent
}

impl Instance {
    pub fn with_item_id(mut self, item_id: impl Into<String>) -> Self {
        self.item_id = item_id.into();
        self
    }

    /// Attaches display names for attribute values; `names.len()` must equal `m`.
    pub fn with_attr_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.m {
            return Err(Error::InvalidParams(format!(
                "{} attribute names for a universe of {}",
                names.len(),
                self.m
            )));
        }
        self.attr_names = names;
        Ok(self)
    }

    pub fn item_id(&self) -> &str {
        &self.item_id
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn tag(&self, id: usize) -> &Tag {
        &self.tags[id]
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn n_pos(&self) -> usize {
        self.n_pos
    }

    pub fn n_neg(&self) -> usize {
        self.n_neg
    }

    pub fn positive_ids(&self) -> std::ops::Range<usize> {
        0..self.n_pos
    }

    pub fn negative_ids(&self) -> std::ops::Range<usize> {
        self.n_pos..self.tags.len()
    }

    pub fn attr_names(&self) -> &[String] {
        &self.attr_names
    }

    pub fn attr_name(&self, a: AttrId) -> &str {
        &self.attr_names[a.0]
    }

    /// Union of the coverage of every positive tag in the vocabulary.
    pub fn pos_union(&self) -> &AttrSet {
        &self.pos_union
    }

    /// Union of the coverage of every negative tag in the vocabulary.
    pub fn neg_union(&self) -> &AttrSet {
        &self.neg_union
    }

    /// Attribute values referenced by at least one tag.
    pub fn covered_universe(&self) -> AttrSet {
        self.pos_union.union(&self.neg_union)
    }

    /// Looks a tag up by label and sentiment.
    pub fn find(&self, label: &str, sentiment: Sentiment) -> Option<&Tag> {
        self.tags.iter().find(|t| t.label == label && t.sentiment == sentiment)
    }

    /// The surviving rule of each tag; rebuilding from these yields the same instance.
    pub fn rules(&self) -> Vec<Rule> {
        self.tags
            .iter()
            .map(|t| Rule {
                antecedent: t.coverage.iter().map(AttrId).collect(),
                tag_label: t.label.clone(),
                sentiment: t.sentiment,
                probability: t.relevance,
            })
            .collect()
    }
}

/// Solve request: budget `k`, user factor `alpha`, relevance parameter `beta`,
/// and the derived polarity quotas `k1 = ceil(alpha * k)` and `k2 = k - k1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub k1: usize,
    pub k2: usize,
}

impl Params {
    /// Validates ranges and derives the quotas, without checking them against an instance.
    pub fn new(k: usize, alpha: f64, beta: f64) -> Result<Params> {
        if k == 0 {
            return Err(Error::InvalidParams("k must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParams(format!("alpha = {alpha} outside [0, 1]")));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidParams(format!("beta = {beta} outside [0, 1]")));
        }
        let k1 = positive_quota(k, alpha);
        Ok(Params {
            k,
            alpha,
            beta,
            k1,
            k2: k - k1,
        })
    }

    /// Quotas from a rational user factor `num / den`, using exact integer ceiling.
    pub fn from_ratio(k: usize, num: usize, den: usize, beta: f64) -> Result<Params> {
        if den == 0 || num > den {
            return Err(Error::InvalidParams(format!("alpha = {num}/{den} outside [0, 1]")));
        }
        let mut params = Params::new(k, num as f64 / den as f64, beta)?;
        params.k1 = (num * k).div_ceil(den);
        params.k2 = k - params.k1;
        Ok(params)
    }

    /// Checks the quotas against the tags available in `instance`.
    pub fn check(&self, instance: &Instance) -> Result<()> {
        if self.k1 > instance.n_pos() || self.k2 > instance.n_neg() {
            return Err(Error::InfeasiblePolarity {
                need_pos: self.k1,
                need_neg: self.k2,
                have_pos: instance.n_pos(),
                have_neg: instance.n_neg(),
            });
        }
        Ok(())
    }
}

/// `ceil(alpha * k)` with a guard against binary float drift.
pub fn positive_quota(k: usize, alpha: f64) -> usize {
    let raw = (alpha * k as f64 - QUOTA_EPS).ceil();
    (raw.max(0.0) as usize).min(k)
}

/// Builds [`Params`] and verifies the instance has enough tags of each sentiment.
pub fn make_params(k: usize, alpha: f64, beta: f64, instance: &Instance) -> Result<Params> {
    let params = Params::new(k, alpha, beta)?;
    params.check(instance)?;
    Ok(params)
}

/// The objective value attached to a [`Selection`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    CovIc(u32),
    CovDc(u32),
    ThetaDc(u32),
}

impl Objective {
    pub fn value(self) -> u32 {
        match self {
            Objective::CovIc(v) | Objective::CovDc(v) | Objective::ThetaDc(v) => v,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Objective::CovIc(_) => "cov_ic",
            Objective::CovDc(_) => "cov_dc",
            Objective::ThetaDc(_) => "theta_dc",
        }
    }
}

/// A chosen tag set with its relevance total and objective value.
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    /// Ascending tag ids.
    pub tag_ids: Vec<usize>,
    pub rel_total: f64,
    pub objective: Objective,
    pub feasible: bool,
}

impl Selection {
    pub fn labels<'a>(&self, instance: &'a Instance) -> Vec<&'a str> {
        self.tag_ids.iter().map(|&id| instance.tag(id).label.as_str()).collect()
    }

    /// `(positives, negatives)` in the selection.
    pub fn polarity_counts(&self, instance: &Instance) -> (usize, usize) {
        let pos = self.tag_ids.iter().filter(|&&id| id < instance.n_pos()).count();
        (pos, self.tag_ids.len() - pos)
    }

    /// Renders e.g. `stylish (+), blurry pictures (−)`.
    pub fn describe(&self, instance: &Instance) -> String {
        self.tag_ids
            .iter()
            .map(|&id| instance.tag(id).to_string())
            .collect::<Vec<_>>()
            .join(", ")
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn camera_instance_layout() {
        let inst = camera();
        assert_eq!((inst.n_pos(), inst.n_neg()), (3, 3));
        let stylish = inst.find("stylish", Sentiment::Positive).unwrap();
        assert_eq!(stylish.relevance, 0.2);
        assert_eq!(stylish.coverage.iter().collect::<Vec<_>>(), vec![2, 3, 6, 7]);
        // positives first, each block sorted by label
        let labels: Vec<_> = inst.tags().iter().map(|t| t.label.as_str()).collect();
        assert_eq!(
            labels,
            [
                "lightweight",
                "stylish",
                "super cool",
                "blurry pictures",
                "gimmicky touchscreen",
                "poor battery life"
            ]
        );
    }

    #[test]
    fn duplicate_rules_keep_max_probability() {
        let rules = vec![
            Rule::new([0], "t", Sentiment::Positive, 0.1),
            Rule::new([1], "t", Sentiment::Positive, 0.3),
        ];
        let inst = build_instance(&rules, 2).unwrap();
        assert_eq!(inst.len(), 1);
        assert_eq!(inst.tag(0).relevance, 0.3);
        assert!(inst.tag(0).coverage.contains(1));
    }

    #[test]
    fn probability_ties_prefer_larger_antecedent() {
        let rules = vec![
            Rule::new([0], "t", Sentiment::Negative, 0.5),
            Rule::new([1, 2], "t", Sentiment::Negative, 0.5),
            Rule::new([0, 3], "t", Sentiment::Negative, 0.5),
        ];
        let inst = build_instance(&rules, 4).unwrap();
        assert_eq!(inst.tag(0).coverage.iter().collect::<Vec<_>>(), vec![0, 3]);
    }

    #[test]
    fn same_label_both_sentiments_are_distinct_tags() {
        let rules = vec![
            Rule::new([0], "battery", Sentiment::Positive, 0.4),
            Rule::new([0], "battery", Sentiment::Negative, 0.2),
        ];
        let inst = build_instance(&rules, 1).unwrap();
        assert_eq!((inst.n_pos(), inst.n_neg()), (1, 1));
    }

    #[test]
    fn degenerate_single_rule() {
        let inst = build_instance(&[Rule::new([0], "t", Sentiment::Positive, 1.0)], 1).unwrap();
        assert_eq!((inst.n_pos(), inst.n_neg()), (1, 0));
    }

    #[test]
    fn build_errors() {
        assert!(matches!(build_instance(&[], 3), Err(Error::EmptyInstance)));
        let out = build_instance(&[Rule::new([5], "t", Sentiment::Positive, 0.5)], 3);
        assert!(matches!(out, Err(Error::AttributeOutOfRange { index: 5, m: 3 })));
        let bad_p = build_instance(&[Rule::new([0], "t", Sentiment::Positive, 1.5)], 3);
        assert!(matches!(bad_p, Err(Error::InvalidRule { .. })));
        let empty = build_instance(&[Rule::new([], "t", Sentiment::Positive, 0.5)], 3);
        assert!(matches!(empty, Err(Error::InvalidRule { .. })));
    }

    #[test]
    fn vectorize_examples() {
        let inst = camera();
        let super_cool = inst.find("super cool", Sentiment::Positive).unwrap();
        let bits = vectorize(super_cool);
        let set: Vec<usize> = bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i).collect();
        assert_eq!(set, vec![3, 6, 7]);

        let all = build_instance(&[Rule::new(0..4, "t", Sentiment::Positive, 0.5)], 4).unwrap();
        assert_eq!(all.tag(0).vectorize(), vec![true; 4]);
        let one = build_instance(&[Rule::new([0], "t", Sentiment::Positive, 0.5)], 3).unwrap();
        assert_eq!(one.tag(0).vectorize(), vec![true, false, false]);
    }

    #[test]
    fn quota_examples() {
        let inst = camera();
        let p = make_params(2, 0.5, 0.5, &inst).unwrap();
        assert_eq!((p.k1, p.k2), (1, 1));
        let p = Params::new(5, 1.0, 0.0).unwrap();
        assert_eq!((p.k1, p.k2), (5, 0));
        let p = Params::new(3, 0.5, 0.0).unwrap();
        assert_eq!((p.k1, p.k2), (2, 1));
        let p = Params::new(4, 0.0, 0.0).unwrap();
        assert_eq!((p.k1, p.k2), (0, 4));
        let p = Params::from_ratio(10, 1, 3, 0.0).unwrap();
        assert_eq!((p.k1, p.k2), (4, 6));
    }

    #[test]
    fn quota_errors() {
        let inst = camera();
        assert!(matches!(
            make_params(10, 0.5, 0.5, &inst),
            Err(Error::InfeasiblePolarity {
                need_pos: 5,
                need_neg: 5,
                have_pos: 3,
                have_neg: 3
            })
        ));
        assert!(matches!(Params::new(0, 0.5, 0.5), Err(Error::InvalidParams(_))));
        assert!(matches!(Params::new(2, 1.5, 0.5), Err(Error::InvalidParams(_))));
        assert!(matches!(Params::new(2, 0.5, -0.1), Err(Error::InvalidParams(_))));
    }

    fn arb_rules() -> impl Strategy<Value = Vec<Rule>> {
        let rule = (
            proptest::collection::btree_set(0usize..12, 1..5),
            0usize..5,
            any::<bool>(),
            0u32..=100,
        )
            .prop_map(|(ante, label, pos, p)| {
                let sentiment = if pos { Sentiment::Positive } else { Sentiment::Negative };
                Rule::new(ante, format!("tag{label}"), sentiment, p as f64 / 100.0)
            });
        proptest::collection::vec(rule, 1..20)
    }

    proptest! {
        #[test]
        fn rebuild_is_idempotent(rules in arb_rules()) {
            let inst = build_instance(&rules, 12).unwrap();
            let again = build_instance(&inst.rules(), 12).unwrap();
            prop_assert_eq!(inst, again);
        }

        #[test]
        fn ids_independent_of_rule_order(rules in arb_rules(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut shuffled = rules.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(build_instance(&rules, 12).unwrap(), build_instance(&shuffled, 12).unwrap());
        }

        #[test]
        fn quotas_sum_to_k(k in 1usize..200, num in 0usize..=50) {
            let alpha = num as f64 / 50.0;
            let p = Params::new(k, alpha, 0.0).unwrap();
            prop_assert_eq!(p.k1 + p.k2, k);
            let exact = Params::from_ratio(k, num, 50, 0.0).unwrap();
            prop_assert_eq!(p.k1, exact.k1);
        }

        #[test]
        fn polarity_counts_match(rules in arb_rules()) {
            let inst = build_instance(&rules, 12).unwrap();
            let pos = inst.tags().iter().filter(|t| t.is_positive()).count();
            prop_assert_eq!(inst.n_pos(), pos);
            prop_assert_eq!(inst.n_pos() + inst.n_neg(), inst.len());
            for (i, t) in inst.tags().iter().enumerate() {
                prop_assert_eq!(t.id, i);
                prop_assert_eq!(t.is_positive(), i < inst.n_pos());
            }
        }
    }
}
