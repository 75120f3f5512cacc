//! CPLEX LP text export of both 0/1 models, for cross-checking with external solvers.

use std::fmt::Write as _;

use super::DcLinearization;
use crate::coverage::{DcGraph, Node};
use crate::error::Result;
use crate::model::{Instance, Params};
use crate::relevance::{RelBenchmark, REL_EPS};

const TERMS_PER_LINE: usize = 8;

fn x(id: usize) -> String {
    format!("x{id}")
}

fn y(j: usize) -> String {
    format!("y{j}")
}

/// Writes `name: terms op rhs`, wrapping long sums onto continuation lines.
fn constraint(out: &mut String, name: &str, terms: &[String], op: &str, rhs: impl std::fmt::Display) {
    let _ = write!(out, " {name}:");
    for (i, t) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let t = t.trim();
        if i == 0 {
            let _ = write!(out, " {t}");
        } else if let Some(neg) = t.strip_prefix('-') {
            let _ = write!(out, " - {}", neg.trim());
        } else {
            let _ = write!(out, " + {t}");
        }
    }
    let _ = writeln!(out, " {op} {rhs}");
}

fn header(out: &mut String, instance: &Instance, params: &Params, model: &str) {
    let _ = writeln!(out, "\\ {model} model, item {:?}", instance.item_id());
    let _ = writeln!(
        out,
        "\\ k = {}, k1 = {}, k2 = {}, beta = {}",
        params.k, params.k1, params.k2, params.beta
    );
    for t in instance.tags() {
        let _ = writeln!(
            out,
            "\\ {} = {} ({}) rel {}",
            x(t.id),
            t.label,
            t.sentiment.ascii(),
            t.relevance
        );
    }
}

fn common_rows(out: &mut String, instance: &Instance, params: &Params) -> Result<()> {
    let pos: Vec<String> = instance.positive_ids().map(x).collect();
    let neg: Vec<String> = instance.negative_ids().map(x).collect();
    if !pos.is_empty() {
        constraint(out, "quota_pos", &pos, "=", params.k1);
    }
    if !neg.is_empty() {
        constraint(out, "quota_neg", &neg, "=", params.k2);
    }
    let threshold = params.beta * RelBenchmark::new(instance).rel_max(params.k1, params.k2)? - REL_EPS;
    let rel: Vec<String> = instance
        .tags()
        .iter()
        .map(|t| format!("{} {}", t.relevance, x(t.id)))
        .collect();
    constraint(out, "relevance", &rel, ">=", threshold.max(0.0));
    Ok(())
}

fn binaries(out: &mut String, names: impl IntoIterator<Item = String>) {
    out.push_str("Binary\n");
    for (i, n) in names.into_iter().enumerate() {
        out.push(' ');
        out.push_str(&n);
        if i % TERMS_PER_LINE == TERMS_PER_LINE - 1 {
            out.push('\n');
        }
    }
    if !out.ends_with('\n') {
        out.push('\n');
    }
    out.push_str("End\n");
}

/// Independent-coverage model: maximize `Σ y_j` with `y_j <= Σ x_i` over coverers of `j`.
pub fn ic_model(instance: &Instance, params: &Params) -> Result<String> {
    params.check(instance)?;
    let mut out = String::new();
    header(&mut out, instance, params, "independent coverage");
    let universe: Vec<usize> = instance.covered_universe().iter().collect();
    out.push_str("Maximize\n");
    constraint_objective(&mut out, &universe.iter().map(|&j| y(j)).collect::<Vec<_>>());
    out.push_str("Subject To\n");
    for &j in &universe {
        let mut terms: Vec<String> = instance
            .tags()
            .iter()
            .filter(|t| t.coverage.contains(j))
            .map(|t| x(t.id))
            .collect();
        terms.push(format!("-{}", y(j)));
        constraint(&mut out, &format!("cover{j}"), &terms, ">=", 0);
    }
    common_rows(&mut out, instance, params)?;
    binaries(
        &mut out,
        (0..instance.len()).map(x).chain(universe.iter().map(|&j| y(j))),
    );
    Ok(out)
}

fn constraint_objective(out: &mut String, terms: &[String]) {
    if terms.is_empty() {
        out.push_str(" obj: 0 x0\n");
    } else {
        let mut row = String::new();
        constraint(&mut row, "obj", terms, "", "");
        out.push_str(row.trim_end());
        out.push('\n');
    }
}

/// Dependent-coverage model over dummy-augmented vectors, dummies `dpos`/`dneg` fixed at 1.
pub fn dc_model(instance: &Instance, params: &Params, graph: &DcGraph, lin: DcLinearization) -> Result<String> {
    params.check(instance)?;
    let mut out = String::new();
    let name = match lin {
        DcLinearization::TwoSided => "dependent coverage (two-sided)",
        DcLinearization::AsPrinted => "dependent coverage (pairwise count)",
    };
    header(&mut out, instance, params, name);
    let universe: Vec<usize> = instance.covered_universe().iter().collect();
    out.push_str("Maximize\n");
    constraint_objective(&mut out, &universe.iter().map(|&j| y(j)).collect::<Vec<_>>());
    out.push_str("Subject To\n");
    let coverers = |j: usize, positive: bool| -> Vec<String> {
        let mut v: Vec<String> = instance
            .tags()
            .iter()
            .filter(|t| t.is_positive() == positive && graph.aug_vector(Node::Tag(t.id)).contains(j))
            .map(|t| x(t.id))
            .collect();
        let (dummy, name) = if positive {
            (Node::DummyPos, "dpos")
        } else {
            (Node::DummyNeg, "dneg")
        };
        if graph.aug_vector(dummy).contains(j) {
            v.push(name.to_string());
        }
        v
    };
    for &j in &universe {
        match lin {
            DcLinearization::TwoSided => {
                for (side, positive) in [("pos", true), ("neg", false)] {
                    let mut terms = coverers(j, positive);
                    terms.push(format!("-{}", y(j)));
                    constraint(&mut out, &format!("cover{j}_{side}"), &terms, ">=", 0);
                }
            }
            DcLinearization::AsPrinted => {
                let mut terms = coverers(j, true);
                terms.extend(coverers(j, false));
                terms.push(format!("-2 {}", y(j)));
                constraint(&mut out, &format!("cover{j}"), &terms, ">=", 0);
            }
        }
    }
    common_rows(&mut out, instance, params)?;
    constraint(&mut out, "fix_dpos", &["dpos".into()], "=", 1);
    constraint(&mut out, "fix_dneg", &["dneg".into()], "=", 1);
    binaries(
        &mut out,
        (0..instance.len())
            .map(x)
            .chain(["dpos".to_string(), "dneg".to_string()])
            .chain(universe.iter().map(|&j| y(j))),
    );
    Ok(out)
}
