//! `satreason` command line: generate pairs and grids, solve, render
//! questions, verify answers and compute rewards.
//!
//! Exit codes: 0 success (for `verify`: the answer is correct), 1 wrong
//! answer, 2 answer could not be extracted or is malformed, 3 usage or
//! operational error.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use satreason::dataset::{self, build_eval_grid, build_rft_grid, read_dataset, write_dataset};
use satreason::generator::{gen_cnf_pair_with_limits, GenLimits, DEFAULT_P_GEO, DEFAULT_P_K2};
use satreason::render::{render_task, Symbols};
use satreason::verify::{
    format_match_reward, tag_count_reward, verify_response, verify_responses, verify_task, VerdictRecord,
};
use satreason::{
    parse_dimacs, serialize_dimacs, solve, verify, CnfPair, Dataset, ExtractionMode, GenParams, Member, ProblemType,
    QuestionFormat, RewardWeights, SatStatus, Task, Template, Verdict,
};

// stdout writes that fail (closed pipe) surface as errors instead of panics
macro_rules! outln {
    ($($arg:tt)*) => {
        writeln!(io::stdout(), $($arg)*)?
    };
}

const EXIT_WRONG: u8 = 1;
const EXIT_FORMAT: u8 = 2;
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "satreason", version, about = "Paired SAT/UNSAT reasoning problems")]
struct Cli {
    /// Print machine-readable JSON on stdout.
    #[arg(long, global = true)]
    json: bool,

    /// Directory that relative dataset paths are resolved against.
    #[arg(long, global = true, env = "SATREASON_DATA_DIR", value_name = "DIR")]
    data_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one SAT/UNSAT pair and write `<OUT>.sat.cnf` and `<OUT>.unsat.cnf`.
    Gen(GenArgs),
    /// Solve a DIMACS file and report the verdict and solver counters.
    Solve {
        /// DIMACS file, or `-` for stdin.
        path: PathBuf,
    },
    /// Build an evaluation or RFT dataset grid as JSONL.
    Dataset(DatasetArgs),
    /// Render the question(s) for one pair.
    Render(RenderArgs),
    /// Check an answer for one pair; the exit code reports the verdict.
    Verify(VerifyArgs),
    /// Verify a JSONL file of responses; writes one verdict per line, in input order.
    VerifyBatch(BatchArgs),
    /// Combined reward for a tagged response.
    Reward(RewardArgs),
    /// Per-n medians of the difficulty counters of a dataset.
    Profile {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(short, long)]
    n: usize,
    #[arg(short, long)]
    m: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Probability of a unit clause.
    #[arg(long, default_value_t = DEFAULT_P_K2)]
    p_k2: f64,
    /// Success probability of the geometric width tail.
    #[arg(long, default_value_t = DEFAULT_P_GEO)]
    p_geo: f64,
    #[arg(long)]
    max_flips: Option<u32>,
    /// Output path stem.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Grid {
    Eval,
    Rft,
}

#[derive(Args)]
struct DatasetArgs {
    #[arg(value_enum)]
    grid: Grid,
    #[arg(long)]
    seed: u64,
    #[arg(short, long)]
    out: PathBuf,
    /// Also record engine and oracle counters for every pair.
    #[arg(long)]
    annotate: bool,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    pair_id: String,
    #[arg(long)]
    ptype: ProblemType,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, default_value = "MATH")]
    format: QuestionFormat,
    #[arg(long, default_value = "eval")]
    template: Template,
    /// Use `& | ~` instead of `∧ ∨ ¬`.
    #[arg(long)]
    ascii: bool,
    /// Wrap each question in ChatML turns.
    #[arg(long)]
    chatml: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Check only this SATDP member.
    #[arg(long)]
    sub_task: Option<Member>,
    /// Bare answer bit string; repeat for SATDP (sat member first).
    #[arg(long, required_unless_present = "response", conflicts_with = "response")]
    answer: Vec<String>,
    /// File holding a raw response (`-` for stdin); repeat for SATDP.
    #[arg(long)]
    response: Vec<PathBuf>,
    /// How to extract answers from responses.
    #[arg(long, default_value = "answer-line")]
    mode: ExtractionMode,
}

#[derive(Args)]
struct WeightArgs {
    #[arg(long, default_value_t = 1.0)]
    w_correct: f64,
    #[arg(long, default_value_t = 0.05)]
    w_tag: f64,
    #[arg(long, default_value_t = 0.05)]
    w_format: f64,
}

impl WeightArgs {
    fn weights(&self) -> Result<RewardWeights> {
        let w = RewardWeights {
            correctness: self.w_correct,
            tag_count: self.w_tag,
            format_match: self.w_format,
        };
        w.validate().map_err(anyhow::Error::msg)?;
        Ok(w)
    }
}

#[derive(Args)]
struct BatchArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// JSONL with `pair_id`, `ptype`, optional `sub_task` and `format`, and `response`.
    #[arg(long)]
    input: PathBuf,
    /// Where to write verdicts (default stdout).
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "tag")]
    mode: ExtractionMode,
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    weights: WeightArgs,
}

#[derive(Args)]
struct RewardArgs {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long)]
    sub_task: Option<Member>,
    /// File holding the response, `-` for stdin.
    #[arg(long)]
    response: PathBuf,
    #[command(flatten)]
    weights: WeightArgs,
}

#[derive(Deserialize)]
struct BatchLine {
    pair_id: String,
    ptype: ProblemType,
    #[serde(default)]
    sub_task: Option<Member>,
    #[serde(default)]
    format: Option<QuestionFormat>,
    response: String,
}

struct Ctx {
    json: bool,
    data_dir: Option<PathBuf>,
}

impl Ctx {
    fn dataset_path(&self, path: &Path) -> PathBuf {
        match &self.data_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }

    fn load(&self, path: &Path) -> Result<Dataset> {
        let path = self.dataset_path(path);
        read_dataset(&path).with_context(|| format!("reading dataset {}", path.display()))
    }

    fn load_pair(&self, args: &PairArgs) -> Result<CnfPair> {
        let ds = self.load(&args.dataset)?;
        Ok(ds.get(&args.pair_id)?.pair()?)
    }

    fn print_json(&self, value: &impl Serialize) -> Result<()> {
        outln!("{}", serde_json::to_string_pretty(value)?);
        Ok(())
    }
}

fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).context("reading stdin")?;
        return Ok(text);
    }
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => bail!("--jobs must be at least 1"),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            Ok(pool.install(f))
        }
    }
}

fn tasks_for(ptype: ProblemType, sub_task: Option<Member>) -> Result<Vec<Task>> {
    match sub_task {
        Some(_) => Ok(vec![Task::from_parts(ptype, sub_task).map_err(anyhow::Error::msg)?]),
        None => Ok(ptype.tasks()),
    }
}

fn cmd_gen(ctx: &Ctx, args: &GenArgs) -> Result<ExitCode> {
    let params = GenParams {
        p_k2: args.p_k2,
        p_geo: args.p_geo,
        ..GenParams::new(args.n, args.m, args.seed)
    }
    .with_stream(args.stream);
    let mut limits = GenLimits::default();
    if let Some(max) = args.max_flips {
        limits.max_flips = max;
    }
    let pair = gen_cnf_pair_with_limits(&params, limits)?;
    let stem = args.out.display().to_string();
    let sat_path = PathBuf::from(format!("{stem}.sat.cnf"));
    let unsat_path = PathBuf::from(format!("{stem}.unsat.cnf"));
    fs::write(&sat_path, serialize_dimacs(&pair.sat)).with_context(|| format!("writing {}", sat_path.display()))?;
    fs::write(&unsat_path, serialize_dimacs(&pair.unsat))
        .with_context(|| format!("writing {}", unsat_path.display()))?;
    if ctx.json {
        ctx.print_json(&json!({
            "sat_path": sat_path,
            "unsat_path": unsat_path,
            "params": params,
            "flip_count": pair.flip_count,
        }))?;
    } else {
        outln!("{}", sat_path.display());
        outln!("{}", unsat_path.display());
        eprintln!("n = {}, m = {}, {} flip(s)", args.n, args.m, pair.flip_count);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(ctx: &Ctx, path: &Path) -> Result<ExitCode> {
    let formula = parse_dimacs(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let result = solve(&formula);
    if ctx.json {
        ctx.print_json(&json!({
            "status": result.status,
            "model": result.model.as_ref().map(|m| m.to_bits()),
            "stats": result.stats,
        }))?;
        return Ok(ExitCode::SUCCESS);
    }
    match &result.model {
        Some(model) => {
            outln!("s SATISFIABLE");
            let lits: Vec<String> = model
                .values()
                .iter()
                .enumerate()
                .map(|(i, &v)| if v { format!("{}", i + 1) } else { format!("-{}", i + 1) })
                .collect();
            outln!("v {} 0", lits.join(" "));
        }
        None => {
            debug_assert_eq!(result.status, SatStatus::Unsat);
            outln!("s UNSATISFIABLE");
        }
    }
    let s = result.stats;
    outln!(
        "c decisions {} conflicts {} propagations {}",
        s.decisions,
        s.conflicts,
        s.propagations
    );
    Ok(ExitCode::SUCCESS)
}

type GridBuilder = fn(u64) -> Result<Dataset, dataset::DatasetError>;

fn cmd_dataset(ctx: &Ctx, args: &DatasetArgs) -> Result<ExitCode> {
    let (name, build): (&str, GridBuilder) = match args.grid {
        Grid::Eval => ("eval", build_eval_grid),
        Grid::Rft => ("rft", build_rft_grid),
    };
    let seed = args.seed;
    let annotate = args.annotate;
    let ds = with_jobs(args.jobs, move || -> Result<Dataset> {
        let ds = build(seed)?;
        Ok(if annotate { ds.annotate()? } else { ds })
    })??;
    let path = ctx.dataset_path(&args.out);
    write_dataset(&path, &ds).with_context(|| format!("writing {}", path.display()))?;

    let ns: Vec<usize> = ds.records.iter().map(|r| r.n()).collect();
    let mut flips: Vec<u64> = ds.records.iter().map(|r| u64::from(r.flip_count)).collect();
    let (n_min, n_max) = (ns.iter().min().copied(), ns.iter().max().copied());
    let flips_median = dataset::median(&mut flips);
    if ctx.json {
        ctx.print_json(&json!({
            "grid": name,
            "seed": seed,
            "path": path,
            "pairs": ds.len(),
            "n_min": n_min,
            "n_max": n_max,
            "flips_median": flips_median,
            "annotated": annotate,
        }))?;
    } else {
        outln!("{name} grid: {} pairs written to {}", ds.len(), path.display());
        if let (Some(lo), Some(hi)) = (n_min, n_max) {
            outln!("n = {lo}..{hi}, median flips {flips_median}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_render(ctx: &Ctx, args: &RenderArgs) -> Result<ExitCode> {
    let pair = ctx.load_pair(&args.pair)?;
    let symbols = if args.ascii { Symbols::Ascii } else { Symbols::Unicode };
    let questions: Vec<_> = args
        .pair
        .ptype
        .tasks()
        .into_iter()
        .map(|task| {
            let mut q = render_task(&pair, task, args.format, args.template, symbols);
            q.pair_id = Some(args.pair.pair_id.clone());
            q
        })
        .collect();
    if ctx.json {
        ctx.print_json(&questions)?;
        return Ok(ExitCode::SUCCESS);
    }
    for (i, q) in questions.iter().enumerate() {
        if questions.len() > 1 {
            if i > 0 {
                outln!();
            }
            outln!("===== {} =====", q.task());
        }
        if args.chatml {
            write!(io::stdout(), "{}", q.to_chatml())?;
        } else {
            outln!("{}", q.prompt);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verdict_exit(v: &Verdict) -> ExitCode {
    if v.semantic_ok {
        ExitCode::SUCCESS
    } else if v.format_ok {
        ExitCode::from(EXIT_WRONG)
    } else {
        ExitCode::from(EXIT_FORMAT)
    }
}

fn cmd_verify(ctx: &Ctx, args: &VerifyArgs) -> Result<ExitCode> {
    let pair = ctx.load_pair(&args.pair)?;
    let ptype = args.pair.ptype;
    let tasks = tasks_for(ptype, args.sub_task)?;
    let given = args.answer.len().max(args.response.len());
    ensure!(
        given == tasks.len(),
        "{} expects {} answer(s), got {given}",
        tasks.iter().map(ToString::to_string).collect::<Vec<_>>().join(" + "),
        tasks.len()
    );

    let verdict = if !args.answer.is_empty() {
        let answers: Vec<&str> = args.answer.iter().map(String::as_str).collect();
        match args.sub_task {
            Some(_) => verify_task(&pair, tasks[0], answers[0]),
            None => verify(&pair, ptype, &answers)?,
        }
    } else {
        let texts = args.response.iter().map(|p| read_text(p)).collect::<Result<Vec<_>>>()?;
        let texts: Vec<&str> = texts.iter().map(String::as_str).collect();
        match args.sub_task {
            Some(_) => verify_response(&pair, tasks[0], texts[0], args.mode),
            None => verify_responses(&pair, ptype, &texts, args.mode)?,
        }
    };

    if ctx.json {
        ctx.print_json(&json!({
            "pair_id": args.pair.pair_id,
            "ptype": ptype,
            "sub_task": args.sub_task,
            "format_ok": verdict.format_ok,
            "semantic_ok": verdict.semantic_ok,
            "extracted": verdict.extracted,
            "detail": verdict.detail,
        }))?;
    } else {
        // format-error details already say so
        match (verdict.format_ok, verdict.semantic_ok) {
            (_, true) => outln!("correct: {}", verdict.detail),
            (true, false) => outln!("incorrect: {}", verdict.detail),
            (false, _) => outln!("{}", verdict.detail),
        }
    }
    Ok(verdict_exit(&verdict))
}

fn cmd_verify_batch(ctx: &Ctx, args: &BatchArgs) -> Result<ExitCode> {
    let weights = args.weights.weights()?;
    let ds = ctx.load(&args.dataset)?;
    let input = read_text(&args.input)?;

    // resolve every line up front so a bad line fails before any work
    let mut pairs = std::collections::HashMap::new();
    let mut items = Vec::new();
    for (i, line) in input.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let item: BatchLine = serde_json::from_str(line).with_context(|| format!("input line {}", i + 1))?;
        let task = Task::from_parts(item.ptype, item.sub_task)
            .map_err(anyhow::Error::msg)
            .with_context(|| format!("input line {}", i + 1))?;
        if !pairs.contains_key(&item.pair_id) {
            let pair = ds.get(&item.pair_id)?.pair()?;
            pairs.insert(item.pair_id.clone(), pair);
        }
        items.push((item, task));
    }

    let mode = args.mode;
    let records: Vec<VerdictRecord> = with_jobs(args.jobs, || {
        use rayon::prelude::*;
        items
            .par_iter()
            .map(|(item, task)| {
                let pair = &pairs[&item.pair_id];
                let verdict = verify_response(pair, *task, &item.response, mode);
                let reward = weights.combine(verdict.semantic_ok, &item.response);
                VerdictRecord::new(&item.pair_id, item.ptype, item.sub_task, item.format, &verdict, reward)
            })
            .collect()
    })?;

    let mut out = String::new();
    for r in &records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    match &args.out {
        Some(path) => fs::write(path, out).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().lock().write_all(out.as_bytes())?,
    }
    let correct = records.iter().filter(|r| r.semantic_ok).count();
    let malformed = records.iter().filter(|r| !r.format_ok).count();
    eprintln!(
        "{} responses: {correct} correct, {malformed} format errors",
        records.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_reward(ctx: &Ctx, args: &RewardArgs) -> Result<ExitCode> {
    let weights = args.weights.weights()?;
    let pair = ctx.load_pair(&args.pair)?;
    let task = Task::from_parts(args.pair.ptype, args.sub_task).map_err(anyhow::Error::msg)?;
    let text = read_text(&args.response)?;
    let verdict = verify_response(&pair, task, &text, ExtractionMode::Tag);
    let reward = weights.combine(verdict.semantic_ok, &text);
    if ctx.json {
        ctx.print_json(&json!({
            "reward": reward,
            "correct": verdict.semantic_ok,
            "tag_count": tag_count_reward(&text),
            "format_match": format_match_reward(&text),
        }))?;
    } else {
        outln!("{reward}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_profile(ctx: &Ctx, path: &Path, jobs: Option<usize>) -> Result<ExitCode> {
    let ds = ctx.load(path)?;
    let rows = with_jobs(jobs, || dataset::profile(&ds))??;
    if ctx.json {
        ctx.print_json(&rows)?;
        return Ok(ExitCode::SUCCESS);
    }
    outln!(
        "{:>3} {:>5} {:>9} {:>9} {:>9} {:>9} {:>10} {:>9} {:>9}",
        "n",
        "pairs",
        "sat_dec",
        "unsat_dec",
        "unsat_cfl",
        "unsat_prp",
        "maxsat_nd",
        "mcs_call",
        "mus_call"
    );
    for r in &rows {
        outln!(
            "{:>3} {:>5} {:>9} {:>9} {:>9} {:>9} {:>10} {:>9} {:>9}",
            r.n,
            r.pairs,
            r.sat_decisions,
            r.unsat_decisions,
            r.unsat_conflicts,
            r.unsat_propagations,
            r.maxsat_nodes,
            r.mcs_solver_calls,
            r.mus_solver_calls
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let ctx = Ctx {
        json: cli.json,
        data_dir: cli.data_dir,
    };
    match &cli.command {
        Command::Gen(args) => cmd_gen(&ctx, args),
        Command::Solve { path } => cmd_solve(&ctx, path),
        Command::Dataset(args) => cmd_dataset(&ctx, args),
        Command::Render(args) => cmd_render(&ctx, args),
        Command::Verify(args) => cmd_verify(&ctx, args),
        Command::VerifyBatch(args) => cmd_verify_batch(&ctx, args),
        Command::Reward(args) => cmd_reward(&ctx, args),
        Command::Profile { dataset, jobs } => cmd_profile(&ctx, dataset, *jobs),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help and version go to stdout and are not errors
            let code = if err.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain()
        .filter_map(|e| e.downcast_ref::<io::Error>())
        .any(|e| e.kind() == io::ErrorKind::BrokenPipe)
}
