//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain failure (bad input file, infeasible
//! parameters, failed verification), 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use percolade_core::certify::{self, binomial, DEFAULT_ENUMERATION_BUDGET};
use percolade_core::diagnostics::{verify_run_invariants, RunDiagnostics};
use percolade_core::{generators, Graph};

use crate::edgelist::{load_graph, write_edge_list, FormatError};
use crate::harness::{run_experiment, run_sweep, ConfigSpec, Grid, HarnessOptions};
use crate::plot::{sweep_svg, Axis};
use crate::records::{self, Metadata, ReportFile};

#[derive(Debug, Parser)]
#[command(name = "percolade", version, about = "Long cycles in percolated vertex expanders")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a graph and write it as an edge list.
    Gen(GenArgs),
    /// Check the (=k,d) vertex-expansion property.
    Certify(CertifyArgs),
    /// Run independent trials of the search-and-sprinkle experiment.
    Run(RunArgs),
    /// Run the experiment over a parameter grid.
    Sweep(SweepArgs),
    /// Re-check a saved run record against its graph.
    Verify(VerifyArgs),
    /// Summarize a results or sweep CSV.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Family {
    Complete,
    Cycle,
    Path,
    Bipartite,
    Regular,
    ErdosRenyi,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub n: Option<usize>,
    /// Degree for `regular`.
    #[arg(long)]
    pub r: Option<usize>,
    /// Side sizes for `bipartite`.
    #[arg(long)]
    pub a: Option<usize>,
    #[arg(long)]
    pub b: Option<usize>,
    /// Edge probability for `erdos-renyi`.
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CertifyMode {
    /// Exact when C(n, k) fits the budget, sampled otherwise.
    Auto,
    Exact,
    Sampled,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub d: f64,
    #[arg(long, value_enum, default_value = "auto")]
    pub mode: CertifyMode,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Default)]
pub struct ParamArgs {
    /// JSON file with any of k, d, epsilon, p, p2, seed, trials, step_budget.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long = "eps", alias = "epsilon")]
    pub epsilon: Option<f64>,
    /// Overall edge probability; defaults to (1+3 eps)/d.
    #[arg(long)]
    pub p: Option<f64>,
    /// Sprinkling probability; the search runs at p1 with (1-p1)(1-p2) = 1-p.
    #[arg(long)]
    pub p2: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: Option<u64>,
    #[arg(long)]
    pub step_budget: Option<u64>,
}

#[derive(Debug, Args, Default)]
pub struct ExecArgs {
    /// Worker threads; defaults to PERCOLADE_THREADS, then the machine's parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Record per-trial wall time in the millis column (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub exec: ExecArgs,
    /// Also write every run record to OUT/runs/trial-NNNNN.json.
    #[arg(long)]
    pub save_runs: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub exec: ExecArgs,
    #[arg(long, value_delimiter = ',')]
    pub p_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub eps_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub k_grid: Vec<usize>,
    /// Also render OUT/sweep.svg.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub run: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// A results CSV from `run` or a sweep CSV from `sweep`.
    #[arg(long)]
    pub input: PathBuf,
    /// Where to write the plot of a sweep CSV; defaults to INPUT with an .svg extension.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Domain(e.into())
    }
}

impl From<percolade_core::Error> for CliError {
    fn from(e: percolade_core::Error) -> Self {
        CliError::Domain(e.into())
    }
}

type CliResult = Result<(), CliError>;

/// Parses `args` and runs the command, writing normal output to `out`.
/// Returns the process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprintln!("error: {msg}"),
                CliError::Domain(err) => eprintln!("error: {err:#}"),
            }
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> CliResult {
    match cli.command {
        Command::Gen(a) => cmd_gen(a, out),
        Command::Certify(a) => cmd_certify(a, out),
        Command::Run(a) => cmd_run(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Report(a) => cmd_report(a, out),
    }
}

fn io_err(e: io::Error) -> CliError {
    CliError::Domain(e.into())
}

fn need<T>(v: Option<T>, flag: &str, family: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for the {family} family")))
}

fn cmd_gen(a: GenArgs, out: &mut dyn Write) -> CliResult {
    let g = match a.family {
        Family::Complete => generators::complete(need(a.n, "n", "complete")?)?,
        Family::Cycle => generators::cycle(need(a.n, "n", "cycle")?)?,
        Family::Path => generators::path(need(a.n, "n", "path")?)?,
        Family::Bipartite => generators::complete_bipartite(need(a.a, "a", "bipartite")?, need(a.b, "b", "bipartite")?)?,
        Family::Regular => generators::random_regular(need(a.n, "n", "regular")?, need(a.r, "r", "regular")?, a.seed)?,
        Family::ErdosRenyi => {
            generators::erdos_renyi(need(a.n, "n", "erdos-renyi")?, need(a.q, "q", "erdos-renyi")?, a.seed)?
        }
    };
    match a.out {
        Some(path) => crate::edgelist::save_graph(&g, &path)?,
        None => write_edge_list(&g, out).map_err(io_err)?,
    }
    Ok(())
}

fn cmd_certify(a: CertifyArgs, out: &mut dyn Write) -> CliResult {
    let g = load_graph(&a.graph)?;
    let exact_fits = binomial(g.vertex_count(), a.k).is_some_and(|c| c <= a.budget);
    let verdict = match a.mode {
        CertifyMode::Exact => certify::certify_exact(&g, a.k, a.d, a.budget)?,
        CertifyMode::Auto if exact_fits => certify::certify_exact(&g, a.k, a.d, a.budget)?,
        CertifyMode::Auto | CertifyMode::Sampled => certify::certify_sampled(&g, a.k, a.d, a.trials, a.seed)?,
    };
    serde_json::to_writer_pretty(&mut *out, &verdict).map_err(|e| CliError::Domain(e.into()))?;
    writeln!(out).map_err(io_err)?;
    Ok(())
}

/// Config file under flags, with the required parameters checked.
fn resolve_spec(p: &ParamArgs) -> Result<ConfigSpec, CliError> {
    let file = match &p.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))
                .map_err(CliError::Domain)?;
            serde_json::from_str::<ConfigSpec>(&text)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?
        }
        None => ConfigSpec::default(),
    };
    let flags = ConfigSpec {
        k: p.k,
        d: p.d,
        epsilon: p.epsilon,
        p: p.p,
        p2: p.p2,
        seed: p.seed,
        trials: p.trials,
        step_budget: p.step_budget,
    };
    let spec = file.overlay(&flags);
    if spec.k.is_none() || spec.d.is_none() || spec.epsilon.is_none() {
        return Err(CliError::Usage("--k, --d and --eps are required (flags or config file)".into()));
    }
    if spec.trials == Some(0) {
        return Err(CliError::Usage("trials must be at least 1".into()));
    }
    Ok(spec)
}

fn load_checked(path: &Path, k: Option<usize>) -> Result<Graph, CliError> {
    let g = load_graph(path).map_err(|e| match e {
        FormatError::Io { .. } => CliError::Domain(e.into()),
        _ => CliError::Domain(anyhow!("{}: {e}", path.display())),
    })?;
    if let Some(k) = k {
        if k > g.vertex_count() {
            return Err(CliError::Domain(anyhow!(
                "block size k = {k} exceeds the vertex count n = {} of {}",
                g.vertex_count(),
                path.display()
            )));
        }
    }
    Ok(g)
}

fn options(e: &ExecArgs, keep_runs: bool) -> HarnessOptions {
    HarnessOptions {
        threads: e.threads,
        timing: e.timing,
        keep_runs,
    }
}

fn cmd_run(a: RunArgs, out: &mut dyn Write) -> CliResult {
    let spec = resolve_spec(&a.params)?;
    let g = load_checked(&a.graph, spec.k)?;
    let cfg = spec.build()?;
    let exp = run_experiment(&g, &cfg, options(&a.exec, a.save_runs))?;
    fs::create_dir_all(&a.exec.out).map_err(io_err)?;
    records::write_results(&exp.results, records::create(&a.exec.out.join("results.csv"))?)?;
    let report = ReportFile {
        report: exp.report.clone(),
        metadata: Metadata::now(exp.threads),
    };
    records::write_report(&report, records::create(&a.exec.out.join("report.json"))?)?;
    if a.save_runs {
        let dir = a.exec.out.join("runs");
        fs::create_dir_all(&dir).map_err(io_err)?;
        for (r, run) in exp.results.iter().zip(&exp.runs) {
            records::save_run(run, &dir.join(format!("trial-{:05}.json", r.trial)))?;
        }
    }
    let s = &exp.report.summary;
    let longest = exp.results.iter().map(|r| r.cycle_len).max().unwrap_or(0);
    writeln!(
        out,
        "trials {} | long cycles {} | P(cycle >= alpha k d) = {:.3} [{:.3}, {:.3}] | longest cycle {} | mean length {:.2} | \
         long-edge threshold {:.3} | theorem target eps^2 k d / 100 = {:.3} ({})",
        s.trials,
        s.cycles_found,
        s.cycle_probability,
        s.cycle_probability_interval.0,
        s.cycle_probability_interval.1,
        longest,
        s.mean_cycle_len,
        cfg.long_threshold(),
        exp.report.bounds.target_cycle_length,
        if cfg.theorem_valid() { "in the theorem's range" } else { "outside the theorem's range" }
    )
    .map_err(io_err)?;
    Ok(())
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> CliResult {
    let grid = Grid {
        p: a.p_grid,
        epsilon: a.eps_grid,
        k: a.k_grid,
    };
    if grid.is_empty() {
        return Err(CliError::Usage("give at least one of --p-grid, --eps-grid, --k-grid".into()));
    }
    let spec = resolve_spec(&a.params)?;
    let max_k = grid.k.iter().copied().max().or(spec.k);
    let g = load_checked(&a.graph, max_k)?;
    let rows = run_sweep(&g, &spec, &grid, options(&a.exec, false))?;
    fs::create_dir_all(&a.exec.out).map_err(io_err)?;
    records::write_sweep(&rows, records::create(&a.exec.out.join("sweep.csv"))?)?;
    if a.svg {
        fs::write(a.exec.out.join("sweep.svg"), sweep_svg(&rows, Axis::varying(&rows))).map_err(io_err)?;
    }
    for r in &rows {
        writeln!(
            out,
            "k {} eps {} p {:.6} | P(long cycle) {:.3} [{:.3}, {:.3}] | mean length {:.2} +- {:.2}",
            r.k, r.epsilon, r.p, r.cycle_probability, r.ci_low, r.ci_high, r.mean_cycle_len, r.cycle_len_std_error
        )
        .map_err(io_err)?;
    }
    Ok(())
}

fn print_diagnostics(d: &RunDiagnostics, out: &mut dyn Write) -> io::Result<()> {
    if d.hard.is_empty() {
        writeln!(out, "hard invariants: ok")?;
    } else {
        writeln!(out, "hard invariants: {} violation(s)", d.hard.len())?;
        for v in &d.hard {
            writeln!(out, "  {v}")?;
        }
    }
    if let Some(s) = &d.soft {
        let list = |v: &[usize]| {
            if v.is_empty() {
                "none".to_string()
            } else {
                let head: Vec<String> = v.iter().take(10).map(usize::to_string).collect();
                format!("{} (blocks {}{})", v.len(), head.join(","), if v.len() > 10 { ",..." } else { "" })
            }
        };
        writeln!(out, "blocks: {}", s.blocks.len())?;
        writeln!(out, "safe count >= floor(i/2k) - 2Z_i violated: {}", list(&s.safe_count_violations))?;
        writeln!(out, "safe count >= i/2k - 2Z_i violated: {}", list(&s.safe_count_literal_violations))?;
        writeln!(out, "safe stack outside active path: {}", list(&s.containment_violations))?;
        writeln!(out, "good block with growth < gamma k: {}", list(&s.growth_violations))?;
        writeln!(out, "safe pairs closer than gamma k^2: {}", s.close_safe_pairs.len())?;
        for r in &s.safe_regions {
            writeln!(
                out,
                "safe {}: {} vertices within alpha d k (bounds {:.1} / {:.1})",
                r.safe, r.within, r.bound, r.bound_alt
            )?;
        }
        writeln!(out, "long edges: {} (fewer than eps k: {})", s.long_edges, s.few_long_edges)?;
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> CliResult {
    let g = load_checked(&a.graph, None)?;
    let run = records::load_run(&a.run)?;
    let d = verify_run_invariants(&g, &run);
    print_diagnostics(&d, out).map_err(io_err)?;
    if d.is_sound() {
        Ok(())
    } else {
        Err(CliError::Domain(anyhow!("{} hard invariant violation(s)", d.hard.len())))
    }
}

fn cmd_report(a: ReportArgs, out: &mut dyn Write) -> CliResult {
    let text = fs::read_to_string(&a.input)
        .with_context(|| format!("reading {}", a.input.display()))?;
    let header = text.lines().next().unwrap_or("");
    if header == records::RESULTS_HEADER {
        let rows = records::read_results(text.as_bytes())?;
        let n = rows.len() as u64;
        let found = rows.iter().filter(|r| r.cycle_found).count() as u64;
        let (lo, hi) = percolade_core::bounds::wilson_interval(found, n, 1.959_963_984_540_054);
        let mut lens: Vec<usize> = rows.iter().filter(|r| r.cycle_found).map(|r| r.cycle_len).collect();
        lens.sort_unstable();
        let mean = |f: &dyn Fn(&records::ResultRow) -> f64| {
            if n == 0 {
                0.0
            } else {
                rows.iter().map(f).sum::<f64>() / n as f64
            }
        };
        let summary = serde_json::json!({
            "trials": n,
            "cycles_found": found,
            "cycle_probability": if n == 0 { 0.0 } else { found as f64 / n as f64 },
            "cycle_probability_interval": [lo, hi],
            "mean_cycle_len": mean(&|r| r.cycle_len as f64),
            "median_cycle_len": lens.get(lens.len().saturating_sub(1) / 2),
            "max_cycle_len": lens.last(),
            "mean_long_edges": mean(&|r| r.long_edges as f64),
            "mean_bad_blocks": mean(&|r| r.bad_blocks as f64),
            "failure_rate": mean(&|r| f64::from(u8::from(r.failed))),
        });
        serde_json::to_writer_pretty(&mut *out, &summary).map_err(|e| CliError::Domain(e.into()))?;
        writeln!(out).map_err(io_err)?;
        return Ok(());
    }
    let rows = records::read_sweep(text.as_bytes())
        .map_err(|e| CliError::Domain(anyhow!("{}: neither a results nor a sweep table ({e})", a.input.display())))?;
    let svg_path = a.svg.unwrap_or_else(|| a.input.with_extension("svg"));
    fs::write(&svg_path, sweep_svg(&rows, Axis::varying(&rows))).map_err(io_err)?;
    writeln!(out, "{} grid points plotted to {}", rows.len(), svg_path.display()).map_err(io_err)?;
    Ok(())
}
