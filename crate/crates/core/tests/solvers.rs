mod common;

use tagadvisor::datagen::RandomSpec;
use tagadvisor::rules_file::camera_example;
use tagadvisor::solvers::{self, lp, Algorithm, DcLinearization};
use tagadvisor::{
    build_instance, cov_dc, cov_ic, DcGraph, Error, Instance, Objective, Params, Rule, Sentiment, SolverConfig,
};

fn camera() -> Instance {
    camera_example().to_instance().unwrap()
}

fn labels(inst: &Instance, ids: &[usize]) -> Vec<String> {
    ids.iter().map(|&i| inst.tag(i).label.clone()).collect()
}

fn run(
    alg: Algorithm,
    inst: &Instance,
    k: usize,
    alpha: f64,
    beta: f64,
) -> tagadvisor::Result<tagadvisor::SolveReport> {
    let params = Params::new(k, alpha, beta)?;
    solvers::solve(alg, inst, &params, &SolverConfig::default())
}

#[test]
fn camera_independent_coverage() {
    let inst = camera();
    for alg in [Algorithm::ExactIc, Algorithm::BnbIc, Algorithm::GreedyIc] {
        let r = run(alg, &inst, 2, 0.5, 0.5).unwrap();
        assert_eq!(
            labels(&inst, &r.selection.tag_ids),
            ["stylish", "blurry pictures"],
            "{alg}"
        );
        assert_eq!(r.objective_value, 7);
        assert!(r.feasible());
    }
    let r = run(Algorithm::ExactIc, &inst, 2, 0.5, 1.0).unwrap();
    assert_eq!(
        labels(&inst, &r.selection.tag_ids),
        ["super cool", "gimmicky touchscreen"]
    );
}

#[test]
fn camera_dependent_coverage() {
    let inst = camera();
    let greedy = run(Algorithm::GreedyDc, &inst, 2, 0.5, 0.5).unwrap();
    assert_eq!(
        labels(&inst, &greedy.selection.tag_ids),
        ["stylish", "poor battery life"]
    );
    assert_eq!(greedy.selection.objective, Objective::ThetaDc(1));

    let exact = run(Algorithm::ExactDc, &inst, 2, 0.5, 0.5).unwrap();
    assert_eq!(exact.objective_value, 1);
    assert_eq!(
        labels(&inst, &exact.selection.tag_ids),
        ["stylish", "poor battery life"]
    );
    let alt = exact.alternate.unwrap();
    assert_eq!(alt.objective, Objective::CovDc(4));

    let bnb = run(Algorithm::BnbDc, &inst, 2, 0.5, 0.5).unwrap();
    assert_eq!(bnb.objective_value, 4);
    assert_eq!(cov_dc(&inst, &bnb.selection.tag_ids), 4);
}

#[test]
fn all_tags_with_zero_beta() {
    let inst = camera();
    let all: Vec<usize> = (0..inst.len()).collect();
    let r = run(Algorithm::ExactIc, &inst, 6, 0.5, 0.0).unwrap();
    assert_eq!(r.selection.tag_ids, all);
    assert_eq!(r.objective_value, cov_ic(&inst, &all));
}

#[test]
fn single_positive_at_full_alpha() {
    let inst = camera();
    let r = run(Algorithm::GreedyIc, &inst, 1, 1.0, 1.0).unwrap();
    assert_eq!(labels(&inst, &r.selection.tag_ids), ["super cool"]);
    let r = run(Algorithm::ExactDc, &inst, 1, 1.0, 0.0).unwrap();
    assert_eq!(r.selection.polarity_counts(&inst), (1, 0));
}

fn pair() -> Instance {
    build_instance(
        &[
            Rule::new([0, 1], "good", Sentiment::Positive, 0.4),
            Rule::new([1, 2], "bad", Sentiment::Negative, 0.2),
        ],
        3,
    )
    .unwrap()
}

#[test]
fn forced_pair() {
    let inst = pair();
    for alg in Algorithm::ALL {
        let r = run(alg, &inst, 2, 0.5, 0.0).unwrap();
        assert_eq!(r.selection.tag_ids, [0, 1], "{alg}");
    }
    let r = run(Algorithm::BnbIc, &inst, 2, 0.5, 0.0).unwrap();
    assert!(r.nodes_explored <= 7, "{}", r.nodes_explored);
}

#[test]
fn quota_and_cap_errors() {
    let inst = camera();
    for alg in Algorithm::ALL {
        assert!(matches!(
            run(alg, &inst, 10, 0.5, 0.5),
            Err(Error::InfeasiblePolarity {
                need_pos: 5,
                need_neg: 5,
                have_pos: 3,
                have_neg: 3
            })
        ));
    }
    let config = SolverConfig {
        exact_cap: 4,
        ..SolverConfig::default()
    };
    let params = Params::new(2, 0.5, 0.5).unwrap();
    for alg in [
        Algorithm::ExactIc,
        Algorithm::BnbIc,
        Algorithm::ExactDc,
        Algorithm::BnbDc,
    ] {
        assert!(matches!(
            solvers::solve(alg, &inst, &params, &config),
            Err(Error::TooLarge { n: 6, cap: 4 })
        ));
    }
    assert!(solvers::solve(Algorithm::GreedyIc, &inst, &params, &config).is_ok());
}

#[test]
fn random_suite_matches_oracles() {
    let spec = RandomSpec {
        n_pos: 5,
        n_neg: 5,
        m: 10,
        density: 0.3,
    };
    let config = SolverConfig::default();
    for i in 0..60 {
        let inst = common::suite_instance(99, i, spec);
        let (k, alpha, beta) = [(2, 0.5, 0.3), (3, 0.25, 0.7), (4, 0.75, 0.0), (5, 0.5, 0.7)][i % 4];
        let params = Params::new(k, alpha, beta).unwrap();
        let oracle_ic = common::max_of(&inst, &params, common::cov_ic).unwrap();
        let oracle_dc = common::max_of(&inst, &params, common::cov_dc).unwrap();
        let oracle_theta = common::min_of(&inst, &params, common::theta).unwrap();

        let e = solvers::exact_ic(&inst, &params, &config).unwrap();
        let b = solvers::bnb_ic(&inst, &params, &config).unwrap();
        assert_eq!(
            (e.objective_value, b.objective_value),
            (oracle_ic, oracle_ic),
            "instance {i}"
        );
        let e = solvers::exact_dc(&inst, &params, &config).unwrap();
        let b = solvers::bnb_dc(&inst, &params, &config).unwrap();
        assert_eq!(e.objective_value, oracle_theta, "instance {i}");
        assert_eq!(e.alternate.as_ref().unwrap().objective.value(), oracle_dc);
        assert_eq!(b.objective_value, oracle_dc, "instance {i}");

        for alg in Algorithm::ALL {
            let r = solvers::solve(alg, &inst, &params, &config).unwrap();
            if r.feasible() {
                common::assert_feasible(&inst, &params, &r.selection.tag_ids);
            }
            let again = solvers::solve(alg, &inst, &params, &config).unwrap();
            assert_eq!(r.selection, again.selection);
        }
    }
}

#[test]
fn exact_ties_prefer_relevance_then_smallest_ids() {
    let inst = build_instance(
        &[
            Rule::new([0], "a", Sentiment::Positive, 0.2),
            Rule::new([0], "b", Sentiment::Positive, 0.3),
            Rule::new([0], "c", Sentiment::Positive, 0.3),
        ],
        1,
    )
    .unwrap();
    let r = run(Algorithm::ExactIc, &inst, 1, 1.0, 0.0).unwrap();
    assert_eq!(labels(&inst, &r.selection.tag_ids), ["b"]);
}

#[test]
fn beam_restricts_pairs() {
    let inst = camera();
    let params = Params::new(2, 0.5, 0.5).unwrap();
    let config = SolverConfig {
        dc_beam: Some(1),
        ..SolverConfig::default()
    };
    let r = solvers::greedy_dc(&inst, &params, &config).unwrap();
    assert_eq!(
        labels(&inst, &r.selection.tag_ids),
        ["super cool", "gimmicky touchscreen"]
    );
}

#[test]
fn as_printed_linearization_counts_same_side_pairs() {
    // two positives share value 0 and nothing negative covers it
    let inst = build_instance(
        &[
            Rule::new([0, 1], "p1", Sentiment::Positive, 0.5),
            Rule::new([0], "p2", Sentiment::Positive, 0.5),
            Rule::new([1, 2], "n1", Sentiment::Negative, 0.5),
        ],
        3,
    )
    .unwrap();
    let graph = DcGraph::new(&inst);
    let sel = [0, 1, 2];
    let two = solvers::dc_linearized_value(&graph, &inst, &sel, DcLinearization::TwoSided);
    assert_eq!(two, cov_dc(&inst, &sel));
    let printed = solvers::dc_linearized_value(&graph, &inst, &sel, DcLinearization::AsPrinted);
    assert!(printed >= two);

    let params = Params::new(3, 0.6, 0.0).unwrap();
    let config = SolverConfig {
        dc_linearization: DcLinearization::AsPrinted,
        ..SolverConfig::default()
    };
    let r = solvers::bnb_dc(&inst, &params, &config).unwrap();
    assert_eq!(r.objective_value, printed);
}

#[test]
fn all_positive_vocabulary_dc_equals_ic() {
    let inst = build_instance(
        &[
            Rule::new([0, 1], "a", Sentiment::Positive, 0.5),
            Rule::new([1, 2, 3], "b", Sentiment::Positive, 0.4),
            Rule::new([4], "c", Sentiment::Positive, 0.3),
        ],
        5,
    )
    .unwrap();
    for k in 1..=3 {
        let params = Params::new(k, 1.0, 0.0).unwrap();
        let r = solvers::bnb_dc(&inst, &params, &SolverConfig::default()).unwrap();
        assert_eq!(r.objective_value, cov_ic(&inst, &r.selection.tag_ids));
        let ic = solvers::bnb_ic(&inst, &params, &SolverConfig::default()).unwrap();
        assert_eq!(r.objective_value, ic.objective_value);
    }
}

#[test]
fn lp_export_mentions_every_variable() {
    let inst = camera();
    let params = Params::new(2, 0.5, 0.5).unwrap();
    let ic = lp::ic_model(&inst, &params).unwrap();
    assert!(ic.starts_with("\\ independent coverage"));
    for section in ["Maximize", "Subject To", "Binary", "End"] {
        assert!(ic.lines().any(|l| l == section), "{section}");
    }
    assert!(ic.contains(" quota_pos: x0 + x1 + x2 = 1"));
    assert!(ic.contains(" cover0: x0 + x3 - y0 >= 0"));
    let dc = lp::dc_model(&inst, &params, &DcGraph::new(&inst), DcLinearization::TwoSided).unwrap();
    assert!(dc.contains("fix_dpos: dpos = 1"));
    assert!(dc.contains(" cover2_neg: x3 + x4 + x5 + dneg - y2 >= 0"));
    assert!(dc.contains(" cover5_pos: x0 + x1 + x2 + dpos - y5 >= 0"));
    let printed = lp::dc_model(&inst, &params, &DcGraph::new(&inst), DcLinearization::AsPrinted).unwrap();
    assert!(printed.contains("- 2 y0 >= 0"));
}
