//! Command-line front end.
//!
//! Every command returns an [`Outcome`] (exit code plus report text) instead
//! of printing, so the binary stays a thin wrapper and tests can drive the
//! commands directly. Exit codes: 0 when every requested check passes, 1
//! when a check fails, 2 for unreadable input or violated limits.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use maxsat_core::{
    brute_force_opt, build_relaxation, corpus, exact_expectation, run_greedy_sat,
    run_greedy_unsat, run_lp_rounding, run_randomized, run_vanzuylen, solve_lp, Assignment,
    CorpusParams, Formula, Order, Rational, RunResult, Wide, BRUTE_FORCE_LIMIT,
    EXPECTATION_LIMIT,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::dimacs::{parse_dimacs, write_dimacs};
use crate::lp_format::write_cplex_lp;
use crate::verify::{min_ratio, sweep, Fault, Verdict};

#[derive(Debug, Parser)]
#[command(name = "maxsat", version, about = "Sequential 3/4-approximation for weighted MAX SAT")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// Stable-key-order JSON; every weight and ratio is an exact `num/den` string.
    Structured,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one algorithm on a DIMACS CNF/WCNF file.
    Solve(SolveArgs),
    /// Check every guarantee on a file or a generated corpus.
    Verify(VerifyArgs),
    /// Exact expected weight of the randomized algorithm, optionally with a
    /// Monte Carlo cross-check.
    Expectation(ExpectationArgs),
    /// Write a generated corpus as WCNF files.
    Corpus(CorpusArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Rand34,
    Vanzuylen,
    LpRound,
    GreedySat,
    GreedyUnsat,
    Brute,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::Rand34 => "rand34",
            Algorithm::Vanzuylen => "vanzuylen",
            Algorithm::LpRound => "lp-round",
            Algorithm::GreedySat => "greedy-sat",
            Algorithm::GreedyUnsat => "greedy-unsat",
            Algorithm::Brute => "brute",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderKind {
    Identity,
    Shuffled,
}

#[derive(Debug, Clone, Args)]
pub struct OrderArgs {
    /// Variable assignment order.
    #[arg(long, value_enum, default_value_t = OrderKind::Identity)]
    pub order: OrderKind,
    /// Seed for `--order shuffled` (defaults to `--seed`).
    #[arg(long)]
    pub order_seed: Option<u64>,
}

impl OrderArgs {
    fn order(&self, n: usize, seed: u64, salt: u64) -> Order {
        match self.order {
            OrderKind::Identity => Order::identity(n),
            OrderKind::Shuffled => Order::shuffled(n, self.order_seed.unwrap_or(seed).wrapping_add(salt)),
        }
    }

    fn describe(&self, seed: u64) -> String {
        match self.order {
            OrderKind::Identity => "identity".into(),
            OrderKind::Shuffled => format!("shuffled({})", self.order_seed.unwrap_or(seed)),
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub input: PathBuf,
    #[arg(long = "alg", value_enum, default_value_t = Algorithm::Rand34)]
    pub algorithm: Algorithm,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub order: OrderArgs,
    /// Print the per-step decisions.
    #[arg(long)]
    pub trace: bool,
    /// Also write the LP relaxation in CPLEX LP format to this path.
    #[arg(long)]
    pub export_lp: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// A DIMACS CNF/WCNF file; omit when using `--corpus`.
    pub input: Option<PathBuf>,
    /// Generated corpus, e.g. `n=8,m=20,count=100,seed=1[,len=4,w=10]`.
    #[arg(long)]
    pub corpus: Option<CorpusSpec>,
    /// Seed of the randomized runs compared against Van Zuylen's rule.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub order: OrderArgs,
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<FaultArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    Lemma1,
}

#[derive(Debug, Args)]
pub struct ExpectationArgs {
    pub input: PathBuf,
    /// Monte Carlo repetitions (0 = exact value only).
    #[arg(long, default_value_t = 0)]
    pub trials: u64,
    /// Seed of the first Monte Carlo run; run `k` uses `seed + k`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub order: OrderArgs,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    #[arg(long)]
    pub corpus: CorpusSpec,
    /// Directory the `.wcnf` files are written to (created if missing).
    #[arg(long)]
    pub dir: PathBuf,
}

/// `n=…,m=…,count=…,seed=…[,len=…,w=…]`: instances with `1 ≤ n' ≤ n` and
/// `0 ≤ m' ≤ m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusSpec(pub CorpusParams);

impl FromStr for CorpusSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = CorpusParams::STANDARD;
        for part in s.split(',').filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .with_context(|| format!("expected key=value, got `{part}`"))?;
            let num: u64 = value
                .trim()
                .parse()
                .with_context(|| format!("`{value}` is not a nonnegative integer"))?;
            match key.trim() {
                "n" => p.max_n = num as usize,
                "m" => p.max_m = num as usize,
                "count" => p.count = num as usize,
                "seed" => p.seed = num,
                "len" => p.max_len = num as usize,
                "w" => p.max_w = num,
                other => bail!("unknown corpus key `{other}`"),
            }
        }
        Ok(CorpusSpec(p))
    }
}

impl std::fmt::Display for CorpusSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let p = &self.0;
        write!(
            f,
            "n={},m={},count={},seed={},len={},w={}",
            p.max_n, p.max_m, p.count, p.seed, p.max_len, p.max_w
        )
    }
}

fn corpus_json(p: &CorpusParams) -> Value {
    json!({
        "count": p.count,
        "max_len": p.max_len,
        "max_m": p.max_m,
        "max_n": p.max_n,
        "max_w": p.max_w,
        "seed": p.seed,
    })
}

/// Exit code and report of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
}

/// Exact `num/den` rendering, also for integers.
pub fn frac(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn wfrac(w: Wide) -> String {
    format!("{w}/1")
}

fn decimal(r: &Rational) -> f64 {
    let num: f64 = r.numer().to_string().parse().unwrap_or(f64::NAN);
    let den: f64 = r.denom().to_string().parse().unwrap_or(f64::NAN);
    num / den
}

fn signed_literals(a: &Assignment) -> String {
    a.values()
        .iter()
        .enumerate()
        .map(|(i, &v)| if v { format!("{}", i + 1) } else { format!("-{}", i + 1) })
        .collect::<Vec<_>>()
        .join(" ")
}

fn render(format: Format, text: String, value: Value) -> String {
    match format {
        Format::Text => text,
        Format::Structured => {
            let mut s = serde_json::to_string_pretty(&value).expect("json values serialize");
            s.push('\n');
            s
        }
    }
}

fn load(path: &PathBuf) -> anyhow::Result<Formula> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_dimacs(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, cli.format),
        Command::Verify(a) => cmd_verify(a, cli.format),
        Command::Expectation(a) => cmd_expectation(a, cli.format),
        Command::Corpus(a) => cmd_corpus(a, cli.format),
    };
    result.unwrap_or_else(|e| Outcome {
        code: 2,
        report: format!("error: {e:#}\n"),
    })
}

pub fn cmd_solve(args: &SolveArgs, format: Format) -> anyhow::Result<Outcome> {
    let f = load(&args.input)?;
    let order = args.order.order(f.num_vars(), args.seed, 0);
    let mut text = String::new();
    let mut extra = serde_json::Map::new();

    let model = build_relaxation(&f);
    if let Some(path) = &args.export_lp {
        fs::write(path, write_cplex_lp(&model))
            .with_context(|| format!("writing {}", path.display()))?;
    }

    let run: RunResult = match args.algorithm {
        Algorithm::Rand34 => run_randomized(&f, order, args.seed)?,
        Algorithm::Vanzuylen => run_vanzuylen(&f, order, args.seed)?,
        Algorithm::GreedySat => run_greedy_sat(&f, order)?,
        Algorithm::GreedyUnsat => run_greedy_unsat(&f, order)?,
        Algorithm::LpRound => {
            let sol = solve_lp(&model);
            let bound = &sol.objective / Rational::from_integer(2.into())
                + Rational::new(f.total_weight().into(), 4.into());
            writeln!(text, "opt_lp {}", frac(&sol.objective))?;
            writeln!(text, "bound {}", frac(&bound))?;
            extra.insert("opt_lp".into(), json!(frac(&sol.objective)));
            extra.insert("bound".into(), json!(frac(&bound)));
            run_lp_rounding(&f, order, &sol)?
        }
        Algorithm::Brute => {
            let (weight, witness) = brute_force_opt(&f)
                .with_context(|| format!("brute force is limited to n <= {BRUTE_FORCE_LIMIT}"))?;
            RunResult {
                assignment: witness,
                weight,
                steps: Vec::new(),
                seed: None,
            }
        }
    };

    let mut out = format!("algorithm {}\n", args.algorithm.name());
    out.push_str(&text);
    writeln!(out, "weight {}", run.weight)?;
    writeln!(out, "assignment {}", signed_literals(&run.assignment))?;
    let mut value = json!({
        "algorithm": args.algorithm.name(),
        "assignment": run.assignment.values(),
        "num_clauses": f.num_clauses(),
        "num_vars": f.num_vars(),
        "order": args.order.describe(args.seed),
        "seed": run.seed,
        "total_weight": wfrac(f.total_weight()),
        "weight": wfrac(run.weight),
    });
    let obj = value.as_object_mut().expect("object literal");
    obj.extend(extra);
    if args.trace {
        let mut steps = Vec::new();
        for s in &run.steps {
            let draw = s.draw.map(|d| format!("{d:#018x}")).unwrap_or_else(|| "-".into());
            writeln!(
                out,
                "step x{} t2={} f2={} p={} draw={} value={}",
                s.var,
                s.t2,
                s.f2,
                frac(&s.prob_true),
                draw,
                s.value
            )?;
            steps.push(json!({
                "draw": s.draw,
                "f2": s.f2.to_string(),
                "prob_true": frac(&s.prob_true),
                "t2": s.t2.to_string(),
                "value": s.value,
                "var": s.var,
            }));
        }
        obj.insert("steps".into(), Value::Array(steps));
    }
    Ok(Outcome {
        code: 0,
        report: render(format, out, value),
    })
}

pub fn cmd_verify(args: &VerifyArgs, format: Format) -> anyhow::Result<Outcome> {
    let fault = args.inject_fault.map(|FaultArg::Lemma1| Fault::Lemma1);
    let (formulas, source_text, source_json) = match (&args.input, &args.corpus) {
        (Some(_), Some(_)) => bail!("give either an input file or --corpus, not both"),
        (None, None) => bail!("give an input file or --corpus"),
        (Some(path), None) => (
            vec![load(path)?],
            format!("instance {}", path.display()),
            json!({ "instance": path.display().to_string() }),
        ),
        (None, Some(spec)) => (
            corpus(&spec.0)?,
            format!("corpus {spec}"),
            json!({ "corpus": corpus_json(&spec.0) }),
        ),
    };
    if let Some(f) = formulas.iter().find(|f| f.num_vars() > EXPECTATION_LIMIT) {
        bail!(
            "verification needs n <= {EXPECTATION_LIMIT}, an instance has n = {}",
            f.num_vars()
        );
    }
    let verdicts = sweep(
        &formulas,
        |i, f| args.order.order(f.num_vars(), args.seed, i as u64),
        args.seed,
        fault,
    )?;
    Ok(verify_report(&verdicts, source_text, source_json, args, format))
}

fn verify_report(
    verdicts: &[Verdict],
    source_text: String,
    source_json: Value,
    args: &VerifyArgs,
    format: Format,
) -> Outcome {
    let failed: Vec<&Verdict> = verdicts.iter().filter(|v| !v.pass()).collect();
    let min = min_ratio(verdicts);
    let checks: usize = verdicts.iter().map(|v| v.checks).sum();
    let mut text = format!(
        "{source_text}\norder {}\nseed {}\ninstances {}\nchecks {checks}\n",
        args.order.describe(args.seed),
        args.seed,
        verdicts.len()
    );
    match &min {
        Some(r) => writeln!(text, "min ratio {} ({:.6})", frac(r), decimal(r)).unwrap(),
        None => text.push_str("min ratio none (every OPT is 0)\n"),
    }
    for v in &failed {
        for msg in &v.failures {
            writeln!(
                text,
                "FAIL instance {} (n={}, m={}): {msg}",
                v.index, v.num_vars, v.num_clauses
            )
            .unwrap();
        }
    }
    if failed.is_empty() {
        text.push_str("result: min ratio 3/4 <= r <= 1, all lemmas pass\n");
    } else {
        writeln!(text, "result: FAILED on {} instance(s)", failed.len()).unwrap();
    }

    let instances: Vec<Value> = verdicts
        .iter()
        .map(|v| {
            json!({
                "expectation": frac(&v.expectation),
                "failures": v.failures,
                "index": v.index,
                "lp_weight": v.lp_weight.map(wfrac),
                "nodes": v.nodes,
                "num_clauses": v.num_clauses,
                "num_vars": v.num_vars,
                "opt": wfrac(v.opt),
                "opt_lp": v.opt_lp.as_ref().map(frac),
                "pass": v.pass(),
                "ratio": v.ratio.as_ref().map(frac),
                "total_weight": wfrac(v.total_weight),
            })
        })
        .collect();
    let value = json!({
        "checks": checks,
        "instances": instances,
        "min_ratio": min.as_ref().map(frac),
        "order": args.order.describe(args.seed),
        "pass": failed.is_empty(),
        "seed": args.seed,
        "source": source_json,
    });
    Outcome {
        code: if failed.is_empty() { 0 } else { 1 },
        report: render(format, text, value),
    }
}

/// Mean, sample standard error and exact sum of `trials` seeded runs.
struct MonteCarlo {
    mean: Rational,
    std_error: f64,
}

fn monte_carlo(f: &Formula, order: &Order, seed: u64, trials: u64) -> anyhow::Result<MonteCarlo> {
    let weights: Vec<Wide> = (0..trials)
        .into_par_iter()
        .map(|k| run_randomized(f, order.clone(), seed.wrapping_add(k)).map(|r| r.weight))
        .collect::<Result<_, _>>()?;
    let sum: Wide = weights.iter().sum();
    let mean = Rational::new(sum.into(), (trials as Wide).into());
    let m = decimal(&mean);
    let var = if trials > 1 {
        weights.iter().map(|&w| (w as f64 - m).powi(2)).sum::<f64>() / (trials - 1) as f64
    } else {
        0.0
    };
    Ok(MonteCarlo {
        mean,
        std_error: (var / trials as f64).sqrt(),
    })
}

pub fn cmd_expectation(args: &ExpectationArgs, format: Format) -> anyhow::Result<Outcome> {
    let f = load(&args.input)?;
    let order = args.order.order(f.num_vars(), args.seed, 0);
    let r = exact_expectation(&f, order.clone())?;
    let mut text = format!("E = {}\nOPT = {}\n", frac(&r.expectation), r.opt);
    match &r.ratio {
        Some(q) => writeln!(text, "ratio = {} ({:.6})", frac(q), decimal(q))?,
        None => text.push_str("ratio = undefined (OPT = 0)\n"),
    }
    writeln!(text, "nodes = {}", r.node_count)?;
    let mut value = json!({
        "expectation": frac(&r.expectation),
        "nodes": r.node_count,
        "opt": wfrac(r.opt),
        "order": args.order.describe(args.seed),
        "ratio": r.ratio.as_ref().map(frac),
        "trials": args.trials,
    });
    let mut code = 0;
    if args.trials > 0 {
        let mc = monte_carlo(&f, &order, args.seed, args.trials)?;
        let deviation = (decimal(&mc.mean) - decimal(&r.expectation)).abs();
        let within = deviation <= 3.0 * mc.std_error;
        if !within {
            code = 1;
        }
        writeln!(text, "trials = {}", args.trials)?;
        writeln!(text, "mean = {} ({:.6})", frac(&mc.mean), decimal(&mc.mean))?;
        writeln!(text, "std_error = {:.6}", mc.std_error)?;
        writeln!(text, "deviation = {deviation:.6}")?;
        writeln!(text, "within_3_std_errors = {within}")?;
        let obj = value.as_object_mut().expect("object literal");
        obj.insert("mean".into(), json!(frac(&mc.mean)));
        obj.insert("std_error".into(), json!(mc.std_error));
        obj.insert("deviation".into(), json!(deviation));
        obj.insert("within_3_std_errors".into(), json!(within));
    }
    Ok(Outcome {
        code,
        report: render(format, text, value),
    })
}

pub fn cmd_corpus(args: &CorpusArgs, format: Format) -> anyhow::Result<Outcome> {
    let formulas = corpus(&args.corpus.0)?;
    fs::create_dir_all(&args.dir).with_context(|| format!("creating {}", args.dir.display()))?;
    let mut text = format!("corpus {}\n", args.corpus);
    let mut files = Vec::new();
    for (i, f) in formulas.iter().enumerate() {
        let name = format!("instance_{i:05}.wcnf");
        let path = args.dir.join(&name);
        let body = format!("c maxsat corpus {} instance {i}\n{}", args.corpus, write_dimacs(f));
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        writeln!(text, "{name} n={} m={} W={}", f.num_vars(), f.num_clauses(), f.total_weight())?;
        files.push(json!({
            "file": name,
            "num_clauses": f.num_clauses(),
            "num_vars": f.num_vars(),
            "total_weight": wfrac(f.total_weight()),
        }));
    }
    let value = json!({ "corpus": corpus_json(&args.corpus.0), "files": files });
    Ok(Outcome {
        code: 0,
        report: render(format, text, value),
    })
}
