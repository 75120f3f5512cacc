//! Synthetic item × (attribute, tag) matrices, rule extraction, per-item instances,
//! random test instances and user-factor estimation.

mod alpha;
mod matrix_io;

pub use alpha::{estimate_alpha, read_ratings_csv, DemographicRatings};
pub use matrix_io::{read_matrix, write_matrix, write_matrix_csv};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::AttrSet;
use crate::error::{Error, Result};
use crate::model::{build_instance, Instance, Rule, Sentiment};
use crate::rules_file::RulesFile;

/// Floor applied to extracted rule probabilities.
pub const MIN_RULE_P: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub num_items: usize,
    pub num_attrs: usize,
    pub num_pos_tags: usize,
    pub num_neg_tags: usize,
    /// Probability that an attribute cell is 1, for each of the four attribute groups.
    pub group_probs: [f64; 4],
    /// Inclusive size range of each tag's correlated attribute set.
    pub corr_min: usize,
    pub corr_max: usize,
    /// Majority means strictly more than half; when false, exactly half also sets the tag.
    pub strict_majority: bool,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            num_items: 100_000,
            num_attrs: 100,
            num_pos_tags: 50,
            num_neg_tags: 50,
            group_probs: [0.75, 0.15, 0.10, 0.05],
            corr_min: 3,
            corr_max: 8,
            strict_majority: true,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn num_tags(&self) -> usize {
        self.num_pos_tags + self.num_neg_tags
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_attrs == 0 {
            return Err(Error::InvalidParams("num_attrs must be positive".into()));
        }
        if let Some(p) = self.group_probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidParams(format!("group probability {p} outside [0, 1]")));
        }
        if self.corr_min == 0 || self.corr_min > self.corr_max {
            return Err(Error::InvalidParams(format!(
                "correlated set size range [{}, {}] is empty",
                self.corr_min, self.corr_max
            )));
        }
        Ok(())
    }

    /// Group index of attribute `a`; groups split `num_attrs` as evenly as possible,
    /// earlier groups taking the remainder.
    pub fn group_of(&self, a: usize) -> usize {
        let base = self.num_attrs / 4;
        let extra = self.num_attrs % 4;
        let mut start = 0;
        for g in 0..4 {
            let size = base + usize::from(g < extra);
            if a < start + size {
                return g;
            }
            start += size;
        }
        3
    }

    /// Attribute index range of group `g`.
    pub fn group_range(&self, g: usize) -> std::ops::Range<usize> {
        let base = self.num_attrs / 4;
        let extra = self.num_attrs % 4;
        let start = g * base + g.min(extra);
        start..start + base + usize::from(g < extra)
    }
}

/// Row-major bit-packed boolean matrix: `num_attrs` attribute columns then the tag columns.
#[derive(Clone, Debug, PartialEq)]
pub struct BoolMatrix {
    pub config: SynthConfig,
    /// Correlated attribute set of each tag column, ascending.
    pub correlated: Vec<Vec<usize>>,
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BoolMatrix {
    fn zeroed(config: SynthConfig, correlated: Vec<Vec<usize>>, rows: usize) -> Self {
        let cols = config.num_attrs + config.num_tags();
        let words_per_row = cols.div_ceil(64);
        BoolMatrix {
            config,
            correlated,
            rows,
            cols,
            words_per_row,
            data: vec![0; rows * words_per_row],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_attrs(&self) -> usize {
        self.config.num_attrs
    }

    pub fn num_tags(&self) -> usize {
        self.cols - self.config.num_attrs
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.row_words(row)[col / 64] >> (col % 64) & 1 == 1
    }

    pub fn attr(&self, row: usize, a: usize) -> bool {
        self.get(row, a)
    }

    pub fn tag(&self, row: usize, t: usize) -> bool {
        self.get(row, self.config.num_attrs + t)
    }

    pub fn row_words(&self, row: usize) -> &[u64] {
        &self.data[row * self.words_per_row..(row + 1) * self.words_per_row]
    }

    pub(crate) fn data(&self) -> &[u64] {
        &self.data
    }

    pub(crate) fn from_parts(
        config: SynthConfig,
        correlated: Vec<Vec<usize>>,
        rows: usize,
        data: Vec<u64>,
    ) -> Result<Self> {
        let mut m = BoolMatrix::zeroed(config, correlated, rows);
        if data.len() != m.data.len() {
            return Err(Error::Format(format!(
                "payload has {} words, expected {}",
                data.len(),
                m.data.len()
            )));
        }
        m.data = data;
        Ok(m)
    }

    /// Attribute cells of `row` as a set.
    pub fn attr_set(&self, row: usize) -> AttrSet {
        AttrSet::from_bools(&(0..self.num_attrs()).map(|a| self.attr(row, a)).collect::<Vec<_>>())
    }

    /// Mean of each attribute group's cells over all rows.
    pub fn group_means(&self) -> [f64; 4] {
        let mut means = [0.0; 4];
        for (g, mean) in means.iter_mut().enumerate() {
            let range = self.config.group_range(g);
            if range.is_empty() || self.rows == 0 {
                continue;
            }
            let ones: usize = (0..self.rows)
                .map(|r| range.clone().filter(|&a| self.attr(r, a)).count())
                .sum();
            *mean = ones as f64 / (self.rows * range.len()) as f64;
        }
        means
    }

    pub fn sentiment_of(&self, t: usize) -> Sentiment {
        if t < self.config.num_pos_tags {
            Sentiment::Positive
        } else {
            Sentiment::Negative
        }
    }
}

fn majority(config: &SynthConfig, ones: usize, size: usize) -> bool {
    if config.strict_majority {
        2 * ones > size
    } else {
        2 * ones >= size
    }
}

/// Per-row generator: stream `row + 1` of the seed, so rows are independent of scheduling.
fn row_rng(seed: u64, row: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row as u64 + 1);
    rng
}

/// Draws each tag's correlated attribute set from stream 0 of the seed.
fn correlated_sets(config: &SynthConfig) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let hi = config.corr_max.min(config.num_attrs);
    let lo = config.corr_min.min(hi);
    (0..config.num_tags())
        .map(|_| {
            let size = rng.gen_range(lo..=hi);
            let mut set = index::sample(&mut rng, config.num_attrs, size).into_vec();
            set.sort_unstable();
            set
        })
        .collect()
}

/// Generates the synthetic matrix. Identical configs give identical matrices, in parallel or not.
pub fn gen_matrix(config: &SynthConfig) -> Result<BoolMatrix> {
    config.validate()?;
    let correlated = correlated_sets(config);
    let probs: Vec<f64> = (0..config.num_attrs)
        .map(|a| config.group_probs[config.group_of(a)])
        .collect();
    let mut matrix = BoolMatrix::zeroed(config.clone(), correlated, config.num_items);
    let wpr = matrix.words_per_row;
    let na = config.num_attrs;
    let corr = &matrix.correlated;
    let mut data = std::mem::take(&mut matrix.data);
    data.par_chunks_mut(wpr.max(1)).enumerate().for_each(|(row, words)| {
        let mut rng = row_rng(config.seed, row);
        for (a, &p) in probs.iter().enumerate() {
            if rng.gen_bool(p) {
                words[a / 64] |= 1 << (a % 64);
            }
        }
        for (t, set) in corr.iter().enumerate() {
            let ones = set.iter().filter(|&&a| words[a / 64] >> (a % 64) & 1 == 1).count();
            if majority(config, ones, set.len()) {
                let c = na + t;
                words[c / 64] |= 1 << (c % 64);
            }
        }
    });
    matrix.data = data;
    Ok(matrix)
}

/// Label of tag column `t`.
pub fn tag_label(matrix: &BoolMatrix, t: usize) -> String {
    match matrix.sentiment_of(t) {
        Sentiment::Positive => format!("pos{t:03}"),
        Sentiment::Negative => format!("neg{:03}", t - matrix.config.num_pos_tags),
    }
}

/// One rule per tag column, in column order.
///
/// The antecedent is the tag's correlated set. The probability is the frequency of the tag
/// among items having at least one antecedent attribute, clamped to `[0.01, 1]`.
pub fn extract_rules(matrix: &BoolMatrix) -> Vec<Rule> {
    (0..matrix.num_tags())
        .into_par_iter()
        .map(|t| {
            let set = &matrix.correlated[t];
            let (mut any, mut fired) = (0usize, 0usize);
            for row in 0..matrix.rows() {
                if set.iter().any(|&a| matrix.attr(row, a)) {
                    any += 1;
                    fired += usize::from(matrix.tag(row, t));
                }
            }
            let p = if any == 0 { 0.0 } else { fired as f64 / any as f64 };
            Rule::new(
                set.iter().copied(),
                tag_label(matrix, t),
                matrix.sentiment_of(t),
                p.clamp(MIN_RULE_P, 1.0),
            )
        })
        .collect()
}

/// Rules file for the synthetic vocabulary, attributes named `a0..`.
pub fn rules_file(matrix: &BoolMatrix, rules: Vec<Rule>) -> RulesFile {
    RulesFile {
        item_id: format!("synthetic-seed-{}", matrix.config.seed),
        attributes: (0..matrix.num_attrs()).map(|a| format!("a{a}")).collect(),
        rules,
    }
}

/// Instance for one item: rules whose tag is 1 for the item, antecedents restricted to the
/// item's attribute values that are 1. `rules[t]` must describe tag column `t`.
pub fn sample_instance(matrix: &BoolMatrix, rules: &[Rule], row: usize) -> Result<Instance> {
    if row >= matrix.rows() {
        return Err(Error::InvalidParams(format!(
            "row {row} outside {} rows",
            matrix.rows()
        )));
    }
    if rules.len() != matrix.num_tags() {
        return Err(Error::InvalidParams(format!(
            "{} rules for {} tag columns",
            rules.len(),
            matrix.num_tags()
        )));
    }
    let kept: Vec<Rule> = rules
        .iter()
        .enumerate()
        .filter(|&(t, _)| matrix.tag(row, t))
        .filter_map(|(_, r)| {
            let antecedent: std::collections::BTreeSet<_> =
                r.antecedent.iter().copied().filter(|a| matrix.attr(row, a.0)).collect();
            (!antecedent.is_empty()).then(|| Rule {
                antecedent,
                ..r.clone()
            })
        })
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyInstance);
    }
    Ok(build_instance(&kept, matrix.num_attrs())?.with_item_id(format!("item{row}")))
}

/// Keeps the `max_pos` most relevant positives and `max_neg` most relevant negatives
/// (ties by id).
pub fn cap_instance(instance: &Instance, max_pos: usize, max_neg: usize) -> Result<Instance> {
    let pick = |range: std::ops::Range<usize>, cap: usize| {
        let mut ids: Vec<usize> = range.collect();
        ids.sort_by(|&a, &b| {
            instance
                .tag(b)
                .relevance
                .total_cmp(&instance.tag(a).relevance)
                .then(a.cmp(&b))
        });
        ids.truncate(cap);
        ids
    };
    let all = instance.rules();
    let mut ids = pick(instance.positive_ids(), max_pos);
    ids.extend(pick(instance.negative_ids(), max_neg));
    let rules: Vec<Rule> = ids.into_iter().map(|id| all[id].clone()).collect();
    Ok(build_instance(&rules, instance.m())?.with_item_id(instance.item_id().to_string()))
}

/// Shape of a random test instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomSpec {
    pub n_pos: usize,
    pub n_neg: usize,
    pub m: usize,
    /// Probability that a tag covers a given attribute value; every tag covers at least one.
    pub density: f64,
}

/// Random instance with uniformly drawn coverage and relevances in `[0.01, 1]` at 0.01 steps.
pub fn random_instance<R: Rng>(rng: &mut R, spec: RandomSpec) -> Instance {
    let mut rules = Vec::with_capacity(spec.n_pos + spec.n_neg);
    for i in 0..spec.n_pos + spec.n_neg {
        let mut attrs: Vec<usize> = (0..spec.m).filter(|_| rng.gen_bool(spec.density)).collect();
        if attrs.is_empty() {
            attrs.push(rng.gen_range(0..spec.m));
        }
        let (sentiment, label) = if i < spec.n_pos {
            (Sentiment::Positive, format!("p{i}"))
        } else {
            (Sentiment::Negative, format!("n{}", i - spec.n_pos))
        };
        let p = rng.gen_range(1..=100) as f64 / 100.0;
        rules.push(Rule::new(attrs, label, sentiment, p));
    }
    build_instance(&rules, spec.m).expect("random rules are valid")
}
