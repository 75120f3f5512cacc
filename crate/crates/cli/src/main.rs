use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use tagadvisor::bench::{self, InstanceSource, SweepSpec, SWEEP_EXACT_CAP};
use tagadvisor::datagen::{self, RandomSpec, SynthConfig};
use tagadvisor::rules_file::RulesFile;
use tagadvisor::solvers::{self, lp, Algorithm, DcLinearization, DEFAULT_EXACT_CAP};
use tagadvisor::{cov_dc, cov_ic, DcGraph, DummyPolicy, Params, SolverConfig};

/// Top-k sentiment-aware tag selection.
#[derive(Parser)]
#[command(name = "tagadvisor", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select tags for one rules file.
    Solve(SolveArgs),
    /// Run a parameter sweep and write CSV.
    Bench(BenchArgs),
    /// Generate a synthetic matrix and its rules.
    Gen(GenArgs),
    /// Write a 0/1 model in LP format.
    ExportLp(ExportArgs),
}

#[derive(Args)]
struct Problem {
    /// Line-JSON rules file.
    #[arg(long)]
    rules: PathBuf,
    #[arg(long)]
    k: usize,
    /// User factor in [0, 1]; defaults to 0.5 unless --ratings is given.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    /// Ratings CSV (group_key,rating,max_scale) to estimate alpha from.
    #[arg(long, requires = "group", conflicts_with = "alpha")]
    ratings: Option<PathBuf>,
    /// Demographic group key within --ratings.
    #[arg(long)]
    group: Option<String>,
}

impl Problem {
    fn alpha(&self) -> Result<f64> {
        let Some(path) = &self.ratings else {
            return Ok(self.alpha.unwrap_or(0.5));
        };
        let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let groups = datagen::read_ratings_csv(file)?;
        let key = self.group.as_deref().unwrap_or_default();
        let group = groups
            .iter()
            .find(|g| g.group_key == key)
            .with_context(|| format!("group {key:?} not in {}", path.display()))?;
        Ok(datagen::estimate_alpha(group)?)
    }
}

#[derive(Args, Clone)]
struct SolverFlags {
    /// Include the dummy tags in every cross edge of theta_dc.
    #[arg(long)]
    always_dummies: bool,
    /// Dependent-coverage constraint used by bnb-dc.
    #[arg(long, value_enum, default_value_t = Linearization::TwoSided)]
    linearization: Linearization,
    /// Limit greedy DC pair candidates to the most relevant tags of each polarity.
    #[arg(long)]
    beam: Option<usize>,
}

impl SolverFlags {
    fn config(&self, exact_cap: usize) -> SolverConfig {
        SolverConfig {
            exact_cap,
            dummy_policy: if self.always_dummies {
                DummyPolicy::Always
            } else {
                DummyPolicy::FillEmptySide
            },
            dc_linearization: self.linearization.into(),
            dc_beam: self.beam,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Linearization {
    TwoSided,
    AsPrinted,
}

impl From<Linearization> for DcLinearization {
    fn from(l: Linearization) -> Self {
        match l {
            Linearization::TwoSided => DcLinearization::TwoSided,
            Linearization::AsPrinted => DcLinearization::AsPrinted,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: Problem,
    /// a-ic, a-dc, e-ic, e-dc, bnb-ic or bnb-dc.
    #[arg(long, default_value = "a-ic", value_parser = parse_algorithm)]
    algorithm: Algorithm,
    /// Largest instance the exact solvers accept.
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    exact_cap: usize,
    #[command(flatten)]
    solver: SolverFlags,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: tagadvisor::Error| e.to_string())
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Random,
    Synthetic,
    Rules,
}

#[derive(Args)]
struct BenchArgs {
    /// Algorithms to run, comma separated.
    #[arg(long = "algorithm", value_delimiter = ',', default_value = "a-ic,e-ic,a-dc,e-dc", value_parser = parse_algorithm)]
    algorithms: Vec<Algorithm>,
    #[arg(long, value_delimiter = ',', default_value = "2,4,6,8,10")]
    k: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    beta: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Source::Synthetic)]
    source: Source,
    /// Rules file for --source rules.
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Tags per instance, split evenly between polarities.
    #[arg(long, default_value_t = 18)]
    n: usize,
    /// Attribute values per random instance.
    #[arg(long, default_value_t = 24)]
    m: usize,
    /// Coverage density of random instances.
    #[arg(long, default_value_t = 0.25)]
    density: f64,
    /// Items in the synthetic matrix sampled for instances.
    #[arg(long, default_value_t = 2_000)]
    items: usize,
    #[arg(long, default_value_t = 100)]
    instances: usize,
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest instance the exact solvers run on inside the sweep.
    #[arg(long, default_value_t = SWEEP_EXACT_CAP)]
    exact_cap: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit nonzero if a greedy row breaks its approximation ratio bound.
    #[arg(long)]
    assert_bounds: bool,
    #[command(flatten)]
    solver: SolverFlags,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 100_000)]
    items: usize,
    #[arg(long, default_value_t = 100)]
    attrs: usize,
    #[arg(long, default_value_t = 50)]
    pos_tags: usize,
    #[arg(long, default_value_t = 50)]
    neg_tags: usize,
    /// Four group probabilities.
    #[arg(long, value_delimiter = ',', default_value = "0.75,0.15,0.10,0.05")]
    probs: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    corr_min: usize,
    #[arg(long, default_value_t = 8)]
    corr_max: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for matrix.bin and rules.jsonl.
    #[arg(long)]
    out: PathBuf,
    /// Also write matrix.csv.
    #[arg(long)]
    csv: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Ic,
    Dc,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    problem: Problem,
    #[arg(long, value_enum, default_value_t = ModelKind::Ic)]
    model: ModelKind,
    #[arg(long, value_enum, default_value_t = Linearization::TwoSided)]
    linearization: Linearization,
    /// LP output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(problem: &Problem) -> Result<(tagadvisor::Instance, Params)> {
    let file = RulesFile::load(&problem.rules).with_context(|| format!("reading {}", problem.rules.display()))?;
    let instance = file.to_instance()?;
    let params = Params::new(problem.k, problem.alpha()?, problem.beta)?;
    params.check(&instance)?;
    Ok((instance, params))
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    let (instance, params) = load(&args.problem)?;
    let report = solvers::solve(args.algorithm, &instance, &params, &args.solver.config(args.exact_cap))?;
    let ids = &report.selection.tag_ids;
    println!("algorithm: {}", args.algorithm.display_name());
    println!(
        "quotas: k1 = {} positive, k2 = {} negative (alpha = {})",
        params.k1, params.k2, params.alpha
    );
    println!("selection: {}", report.selection.describe(&instance));
    println!(
        "objective: {} = {}",
        report.selection.objective.name(),
        report.objective_value
    );
    let graph = DcGraph::with_policy(&instance, args.solver.config(DEFAULT_EXACT_CAP).dummy_policy);
    println!(
        "cov_ic = {}, cov_dc = {}, theta_dc = {}",
        cov_ic(&instance, ids),
        cov_dc(&instance, ids),
        graph.theta(ids)
    );
    if let Some(alt) = &report.alternate {
        println!(
            "max {} selection: {} ({})",
            alt.objective.name(),
            alt.describe(&instance),
            alt.objective.value()
        );
    }
    println!("relevance: {:.6} (threshold {:.6})", report.rel_total, report.threshold);
    println!("time: {:?}, nodes: {}", report.wall_time, report.nodes_explored);
    if report.dead_end {
        eprintln!("dead end: no admissible tag after {} of {} picks", ids.len(), params.k);
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn bench(args: BenchArgs) -> Result<ExitCode> {
    let half = args.n / 2;
    let source = match args.source {
        Source::Random => InstanceSource::Random(RandomSpec {
            n_pos: args.n - half,
            n_neg: half,
            m: args.m,
            density: args.density,
        }),
        Source::Synthetic => InstanceSource::Synthetic {
            config: SynthConfig {
                num_items: args.items,
                seed: args.seed,
                ..SynthConfig::default()
            },
            n_pos: args.n - half,
            n_neg: half,
        },
        Source::Rules => match &args.rules {
            Some(p) => InstanceSource::RulesFile(p.clone()),
            None => bail!("--source rules needs --rules"),
        },
    };
    let spec = SweepSpec {
        algorithms: args.algorithms,
        k_values: args.k,
        alpha_values: args.alpha,
        beta_values: args.beta,
        source,
        instances: if matches!(args.source, Source::Rules) {
            1
        } else {
            args.instances
        },
        repetitions: args.repetitions,
        seed: args.seed,
        exact_cap: args.exact_cap,
        solver: args.solver.config(args.exact_cap),
        jobs: args.jobs,
    };
    let rows = bench::run_sweep(&spec)?;
    let mut out = output(&args.out)?;
    bench::write_csv(&spec, &rows, &mut out)?;
    out.flush()?;
    let bounds = bench::check_bounds(&rows);
    eprintln!(
        "{} rows; ratio violations: ic {}, dc {}; dc rows with zero optimum: {}; below half coverage: {}",
        rows.len(),
        bounds.ic_ratio.len(),
        bounds.dc_ratio.len(),
        bounds.dc_zero_opt.len(),
        bounds.half_coverage.len()
    );
    if args.assert_bounds && !bounds.ratios_hold() {
        eprintln!("approximation bound violated");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn gen(args: GenArgs) -> Result<ExitCode> {
    let probs: [f64; 4] = args.probs.as_slice().try_into().context("--probs takes four values")?;
    let config = SynthConfig {
        num_items: args.items,
        num_attrs: args.attrs,
        num_pos_tags: args.pos_tags,
        num_neg_tags: args.neg_tags,
        group_probs: probs,
        corr_min: args.corr_min,
        corr_max: args.corr_max,
        seed: args.seed,
        ..SynthConfig::default()
    };
    let matrix = datagen::gen_matrix(&config)?;
    let rules = datagen::extract_rules(&matrix);
    fs::create_dir_all(&args.out)?;
    let matrix_path = args.out.join("matrix.bin");
    datagen::write_matrix(&matrix, BufWriter::new(File::create(&matrix_path)?))?;
    let rules_path = args.out.join("rules.jsonl");
    datagen::rules_file(&matrix, rules).save(&rules_path)?;
    if args.csv {
        datagen::write_matrix_csv(&matrix, BufWriter::new(File::create(args.out.join("matrix.csv"))?))?;
    }
    println!("seed: {}", config.seed);
    println!(
        "matrix: {} ({} x {})",
        matrix_path.display(),
        matrix.rows(),
        matrix.cols()
    );
    println!("rules: {} ({} rules)", rules_path.display(), matrix.num_tags());
    Ok(ExitCode::SUCCESS)
}

fn export_lp(args: ExportArgs) -> Result<ExitCode> {
    let (instance, params) = load(&args.problem)?;
    let text = match args.model {
        ModelKind::Ic => lp::ic_model(&instance, &params)?,
        ModelKind::Dc => lp::dc_model(&instance, &params, &DcGraph::new(&instance), args.linearization.into())?,
    };
    let mut out = output(&args.out)?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Bench(a) => bench(a),
        Command::Gen(a) => gen(a),
        Command::ExportLp(a) => export_lp(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<tagadvisor::Error>() {
                Some(tagadvisor::Error::Infeasible { .. } | tagadvisor::Error::InfeasiblePolarity { .. }) => {
                    ExitCode::from(2)
                }
                _ => ExitCode::FAILURE,
            }
        }
    }
}
