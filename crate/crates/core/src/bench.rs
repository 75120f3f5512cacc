//! Parameter sweeps over instances and algorithms, emitted as CSV with `#` comment blocks.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coverage::{cov_dc, cov_ic};
use crate::datagen::{
    cap_instance, extract_rules, gen_matrix, random_instance, sample_instance, RandomSpec, SynthConfig,
};
use crate::error::{Error, Result};
use crate::model::{Instance, Params};
use crate::rules_file::RulesFile;
use crate::solvers::{solve, Algorithm, SolveReport, SolverConfig};

/// Default instance-size limit for exact solvers inside sweeps.
pub const SWEEP_EXACT_CAP: usize = 18;
/// Greedy is "close" to exact when its coverage is at least this fraction of the optimum.
pub const CLOSE_FRACTION: f64 = 0.95;
const RATIO_SLACK: f64 = 1e-9;

/// Where sweep instances come from.
#[derive(Clone, Debug)]
pub enum InstanceSource {
    /// Uniform random coverage; instance `i` uses stream `i` of the sweep seed.
    Random(RandomSpec),
    /// Items of a generated matrix with at least `n_pos`/`n_neg` active tags, capped to exactly that.
    Synthetic {
        config: SynthConfig,
        n_pos: usize,
        n_neg: usize,
    },
    /// A single instance from a rules file.
    RulesFile(PathBuf),
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub algorithms: Vec<Algorithm>,
    pub k_values: Vec<usize>,
    pub alpha_values: Vec<f64>,
    pub beta_values: Vec<f64>,
    pub source: InstanceSource,
    pub instances: usize,
    /// Timing repetitions per (algorithm, point, instance).
    pub repetitions: usize,
    pub seed: u64,
    pub exact_cap: usize,
    pub solver: SolverConfig,
    pub jobs: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidParams("repetitions must be at least 1".into()));
        }
        if self.algorithms.is_empty()
            || self.k_values.is_empty()
            || self.alpha_values.is_empty()
            || self.beta_values.is_empty()
        {
            return Err(Error::InvalidParams(
                "sweep needs an algorithm and a parameter point".into(),
            ));
        }
        if self.instances == 0 {
            return Err(Error::InvalidParams("sweep needs at least one instance".into()));
        }
        Ok(())
    }
}

/// Outcome of one solver call.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    DeadEnd,
    Infeasible,
    InfeasiblePolarity,
    Error,
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub algorithm: String,
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub instance_id: usize,
    pub repetition: usize,
    pub n_tags: usize,
    /// The solver's own objective (`theta_dc` for enumeration and greedy DC).
    pub objective_value: Option<u32>,
    /// `cov_ic` for IC algorithms, `cov_dc` for DC algorithms.
    pub coverage_value: Option<u32>,
    /// Optimal coverage of the same family at this point, when an exact solver ran.
    pub reference_coverage: Option<u32>,
    /// `coverage_value` over the attribute values appearing in the instance.
    pub coverage_proportion: Option<f64>,
    pub rel_total: Option<f64>,
    pub wall_time_ns: u64,
    /// Greedy only: `opt/greedy` coverage for IC, `greedy/opt` theta for DC.
    pub approx_ratio: Option<f64>,
    pub dead_end: bool,
    pub status: Status,
}

impl BenchRow {
    fn key(&self) -> (usize, u64, u64, usize, usize, usize) {
        let alg = Algorithm::ALL
            .iter()
            .position(|a| a.display_name() == self.algorithm)
            .unwrap_or(usize::MAX);
        (
            self.k,
            self.alpha.to_bits(),
            self.beta.to_bits(),
            self.instance_id,
            self.repetition,
            alg,
        )
    }

    pub fn algorithm(&self) -> Option<Algorithm> {
        self.algorithm.parse().ok()
    }

    /// `coverage_value / reference_coverage`, 1 when both are 0.
    pub fn quality(&self) -> Option<f64> {
        match (self.coverage_value, self.reference_coverage) {
            (Some(_), Some(0)) => Some(1.0),
            (Some(c), Some(r)) => Some(c as f64 / r as f64),
            _ => None,
        }
    }
}

/// Loads the sweep's instances.
pub fn load_instances(spec: &SweepSpec) -> Result<Vec<Instance>> {
    match &spec.source {
        InstanceSource::Random(shape) => Ok((0..spec.instances)
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
                rng.set_stream(i as u64);
                random_instance(&mut rng, *shape)
            })
            .collect()),
        InstanceSource::Synthetic { config, n_pos, n_neg } => {
            let matrix = gen_matrix(config)?;
            let rules = extract_rules(&matrix);
            let mut out = Vec::with_capacity(spec.instances);
            for row in 0..matrix.rows() {
                if out.len() == spec.instances {
                    break;
                }
                let Ok(inst) = sample_instance(&matrix, &rules, row) else {
                    continue;
                };
                if inst.n_pos() >= *n_pos && inst.n_neg() >= *n_neg {
                    out.push(cap_instance(&inst, *n_pos, *n_neg)?);
                }
            }
            if out.len() < spec.instances {
                return Err(Error::NoData(format!(
                    "only {} of {} items have {n_pos} positive and {n_neg} negative tags",
                    out.len(),
                    spec.instances
                )));
            }
            Ok(out)
        }
        InstanceSource::RulesFile(path) => Ok(vec![RulesFile::load(path)?.to_instance()?]),
    }
}

struct Point {
    k: usize,
    alpha: f64,
    beta: f64,
    instance_id: usize,
    repetition: usize,
}

fn status_of(err: &Error) -> Status {
    match err {
        Error::Infeasible { .. } => Status::Infeasible,
        Error::InfeasiblePolarity { .. } => Status::InfeasiblePolarity,
        _ => Status::Error,
    }
}

fn coverage_of(alg: Algorithm, instance: &Instance, report: &SolveReport) -> u32 {
    if alg.is_dependent() {
        cov_dc(instance, &report.selection.tag_ids)
    } else {
        cov_ic(instance, &report.selection.tag_ids)
    }
}

/// Runs every scheduled algorithm at one point and fills cross-algorithm columns.
fn run_point(spec: &SweepSpec, instance: &Instance, p: &Point) -> Vec<BenchRow> {
    let universe = instance.covered_universe().count();
    let params = Params::new(p.k, p.alpha, p.beta);
    let mut results: Vec<(Algorithm, Result<SolveReport>)> = Vec::new();
    for &alg in &spec.algorithms {
        if alg.is_exact() && instance.len() > spec.exact_cap {
            continue;
        }
        let config = SolverConfig {
            exact_cap: spec.exact_cap.max(spec.solver.exact_cap),
            ..spec.solver.clone()
        };
        let res = params
            .as_ref()
            .map_err(|e| Error::InvalidParams(e.to_string()))
            .and_then(|params| solve(alg, instance, params, &config));
        results.push((alg, res));
    }

    let find = |a: Algorithm| results.iter().find(|(x, _)| *x == a).and_then(|(_, r)| r.as_ref().ok());
    // optimal coverage per family
    let ref_ic = find(Algorithm::ExactIc)
        .or(find(Algorithm::BnbIc))
        .map(|r| coverage_of(Algorithm::ExactIc, instance, r));
    let ref_dc = find(Algorithm::BnbDc)
        .map(|r| cov_dc(instance, &r.selection.tag_ids))
        .or_else(|| {
            find(Algorithm::ExactDc)
                .and_then(|r| r.alternate.as_ref())
                .map(|s| s.objective.value())
        });
    let opt_theta = find(Algorithm::ExactDc).map(|r| r.objective_value);

    results
        .iter()
        .map(|(alg, res)| {
            let mut row = BenchRow {
                algorithm: alg.display_name().to_string(),
                k: p.k,
                alpha: p.alpha,
                beta: p.beta,
                instance_id: p.instance_id,
                repetition: p.repetition,
                n_tags: instance.len(),
                objective_value: None,
                coverage_value: None,
                reference_coverage: if alg.is_dependent() { ref_dc } else { ref_ic },
                coverage_proportion: None,
                rel_total: None,
                wall_time_ns: 0,
                approx_ratio: None,
                dead_end: false,
                status: Status::Ok,
            };
            match res {
                Err(e) => row.status = status_of(e),
                Ok(r) => {
                    row.wall_time_ns = r.wall_time.as_nanos() as u64;
                    row.dead_end = r.dead_end;
                    row.rel_total = Some(r.rel_total);
                    row.objective_value = Some(r.objective_value);
                    if r.dead_end {
                        row.status = Status::DeadEnd;
                    } else {
                        let cov = coverage_of(*alg, instance, r);
                        row.coverage_value = Some(cov);
                        row.coverage_proportion = Some(if universe == 0 {
                            0.0
                        } else {
                            cov as f64 / universe as f64
                        });
                        row.approx_ratio = match alg {
                            Algorithm::GreedyIc => ref_ic.map(|opt| ic_ratio(opt, cov)),
                            Algorithm::GreedyDc => opt_theta.map(|opt| theta_ratio(r.objective_value, opt)),
                            _ => None,
                        };
                    }
                }
            }
            row
        })
        .collect()
}

/// `opt / greedy` for a maximization objective; 1 when both are 0.
pub fn ic_ratio(opt: u32, greedy: u32) -> f64 {
    match (opt, greedy) {
        (0, _) => 1.0,
        (_, 0) => f64::INFINITY,
        (o, g) => o as f64 / g as f64,
    }
}

/// `greedy / opt` for `theta_dc`; 1 when both are 0, infinite (flagged) when only opt is 0.
pub fn theta_ratio(greedy: u32, opt: u32) -> f64 {
    match (greedy, opt) {
        (0, 0) => 1.0,
        (_, 0) => f64::INFINITY,
        (g, o) => g as f64 / o as f64,
    }
}

/// Runs the sweep on a pool of `spec.jobs` threads; rows come back in canonical key order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<BenchRow>> {
    spec.validate()?;
    let instances = load_instances(spec)?;
    let mut points = Vec::new();
    for &k in &spec.k_values {
        for &alpha in &spec.alpha_values {
            for &beta in &spec.beta_values {
                for instance_id in 0..instances.len() {
                    for repetition in 0..spec.repetitions {
                        points.push(Point {
                            k,
                            alpha,
                            beta,
                            instance_id,
                            repetition,
                        });
                    }
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(e.to_string()))?;
    let mut rows: Vec<BenchRow> = pool.install(|| {
        points
            .par_iter()
            .flat_map_iter(|p| run_point(spec, &instances[p.instance_id], p))
            .collect()
    });
    rows.sort_by_key(BenchRow::key);
    Ok(rows)
}

fn percentile(sorted: &[u64], q: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Aggregates of one algorithm at one `k`, or over all `k` when `k` is `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub algorithm: String,
    pub k: Option<usize>,
    pub rows: usize,
    pub mean_wall_ns: f64,
    pub p95_wall_ns: u64,
    pub mean_coverage_proportion: f64,
    pub mean_approx_ratio: Option<f64>,
    pub max_approx_ratio: Option<f64>,
    pub dead_end_rate: f64,
    /// Rows with a reference where coverage reaches [`CLOSE_FRACTION`] of it.
    pub close_fraction: Option<f64>,
}

pub fn summarize(rows: &[BenchRow]) -> Vec<Summary> {
    let mut groups: BTreeMap<(usize, Option<usize>), Vec<&BenchRow>> = BTreeMap::new();
    let order = |name: &str| {
        Algorithm::ALL
            .iter()
            .position(|a| a.display_name() == name)
            .unwrap_or(usize::MAX)
    };
    for r in rows {
        groups.entry((order(&r.algorithm), Some(r.k))).or_default().push(r);
        groups.entry((order(&r.algorithm), None)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((_, k), group)| {
            let n = group.len();
            let mut walls: Vec<u64> = group.iter().map(|r| r.wall_time_ns).collect();
            walls.sort_unstable();
            let covs: Vec<f64> = group.iter().filter_map(|r| r.coverage_proportion).collect();
            let ratios: Vec<f64> = group.iter().filter_map(|r| r.approx_ratio).collect();
            let quality: Vec<f64> = group.iter().filter_map(|r| r.quality()).collect();
            Summary {
                algorithm: group[0].algorithm.clone(),
                k,
                rows: n,
                mean_wall_ns: walls.iter().sum::<u64>() as f64 / n as f64,
                p95_wall_ns: percentile(&walls, 0.95),
                mean_coverage_proportion: mean(&covs).unwrap_or(0.0),
                mean_approx_ratio: mean(&ratios),
                max_approx_ratio: ratios.iter().copied().reduce(f64::max),
                dead_end_rate: group.iter().filter(|r| r.dead_end).count() as f64 / n as f64,
                close_fraction: (!quality.is_empty()).then(|| {
                    quality.iter().filter(|&&q| q >= CLOSE_FRACTION - RATIO_SLACK).count() as f64 / quality.len() as f64
                }),
            }
        })
        .collect()
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Rows breaking an approximation guarantee.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundReport {
    /// Greedy IC rows with `opt/greedy > 2`.
    pub ic_ratio: Vec<usize>,
    /// Greedy DC rows with `greedy/opt theta > 2` where opt theta is positive.
    pub dc_ratio: Vec<usize>,
    /// Greedy DC rows with opt theta 0 and greedy theta positive; flagged, outside the ratio bound.
    pub dc_zero_opt: Vec<usize>,
    /// Greedy rows whose coverage is below half the family optimum.
    pub half_coverage: Vec<usize>,
}

impl BoundReport {
    /// Only the ratio guarantees are hard; `half_coverage` is informational for DC.
    pub fn ratios_hold(&self) -> bool {
        self.ic_ratio.is_empty() && self.dc_ratio.is_empty()
    }
}

pub fn check_bounds(rows: &[BenchRow]) -> BoundReport {
    let mut out = BoundReport::default();
    for (i, r) in rows.iter().enumerate() {
        let Some(alg) = r.algorithm() else { continue };
        if let Some(ratio) = r.approx_ratio {
            match alg {
                Algorithm::GreedyDc if ratio.is_infinite() => out.dc_zero_opt.push(i),
                Algorithm::GreedyDc if ratio > 2.0 + RATIO_SLACK => out.dc_ratio.push(i),
                Algorithm::GreedyIc if ratio > 2.0 + RATIO_SLACK => out.ic_ratio.push(i),
                _ => {}
            }
        }
        if !alg.is_exact() && r.quality().is_some_and(|q| q < 0.5 - RATIO_SLACK) {
            out.half_coverage.push(i);
        }
    }
    out
}

/// Writes the `#` config block, the CSV body and the `#` summary block.
pub fn write_csv<W: Write>(spec: &SweepSpec, rows: &[BenchRow], mut w: W) -> Result<()> {
    let names: Vec<&str> = spec.algorithms.iter().map(|a| a.display_name()).collect();
    writeln!(w, "# algorithms={}", names.join(";"))?;
    writeln!(
        w,
        "# k={:?} alpha={:?} beta={:?}",
        spec.k_values, spec.alpha_values, spec.beta_values
    )?;
    writeln!(w, "# source={:?}", spec.source)?;
    writeln!(
        w,
        "# instances={} repetitions={} seed={} exact_cap={} jobs={}",
        spec.instances, spec.repetitions, spec.seed, spec.exact_cap, spec.jobs
    )?;
    {
        let mut out = csv::Writer::from_writer(&mut w);
        for r in rows {
            out.serialize(r)?;
        }
        if rows.is_empty() {
            out.write_record(CSV_COLUMNS)?;
        }
        out.flush()?;
    }
    for s in summarize(rows) {
        let k = s.k.map_or("all".to_string(), |k| k.to_string());
        let opt = |v: Option<f64>| v.map_or("na".to_string(), |v| format!("{v:.4}"));
        writeln!(
            w,
            "# summary algorithm={} k={k} rows={} mean_wall_ns={:.0} p95_wall_ns={} mean_coverage={:.4} mean_ratio={} max_ratio={} dead_end_rate={:.4} within_5pct={}",
            s.algorithm,
            s.rows,
            s.mean_wall_ns,
            s.p95_wall_ns,
            s.mean_coverage_proportion,
            opt(s.mean_approx_ratio),
            opt(s.max_approx_ratio),
            s.dead_end_rate,
            opt(s.close_fraction),
        )?;
    }
    let b = check_bounds(rows);
    writeln!(
        w,
        "# bounds ic_ratio_violations={} dc_ratio_violations={} dc_zero_opt_flagged={} below_half_coverage={}",
        b.ic_ratio.len(),
        b.dc_ratio.len(),
        b.dc_zero_opt.len(),
        b.half_coverage.len()
    )?;
    Ok(())
}

/// Column order of [`BenchRow`].
pub const CSV_COLUMNS: [&str; 16] = [
    "algorithm",
    "k",
    "alpha",
    "beta",
    "instance_id",
    "repetition",
    "n_tags",
    "objective_value",
    "coverage_value",
    "reference_coverage",
    "coverage_proportion",
    "rel_total",
    "wall_time_ns",
    "approx_ratio",
    "dead_end",
    "status",
];

/// Parses rows written by [`write_csv`], skipping `#` lines.
pub fn read_csv<R: Read>(r: R) -> Result<Vec<BenchRow>> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    reader
        .deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::Parse {
                line: i + 2,
                message: e.to_string(),
            })
        })
        .collect()
}
