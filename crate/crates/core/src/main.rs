use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use coarse_kit::cochain::Method;
use coarse_kit::complex::io::{from_json, to_json};
use coarse_kit::constructions::{MkParams, NMode, DEFAULT_BUDGET};
use coarse_kit::report::{
    build, check_witness_file, homology_lines, summary, verify_prop51, verify_prop52, verify_tower, write_atomic,
    BuildKind, BuildSpec, ReportError, RunOptions, VerificationReport,
};

const USAGE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "coarse-kit", version, about = "Exact certificates for M_k bundles, towers and bounded cochains")]
struct Cli {
    /// TOML file supplying defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a complex and write it in the interchange format.
    Build {
        kind: Kind,
        #[command(flatten)]
        common: Common,
        /// Circle size, or interval length for `product`.
        #[arg(long)]
        n: Option<usize>,
        /// Annulus inner circle size.
        #[arg(long)]
        a: Option<usize>,
        /// Annulus outer circle size.
        #[arg(long)]
        b: Option<usize>,
    },
    VerifyProp51 {
        #[command(flatten)]
        common: Common,
    },
    VerifyProp52 {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        n_mode: Option<Mode>,
    },
    VerifyTower {
        #[command(flatten)]
        common: Common,
    },
    /// Re-validate a witness file written by a verify command.
    CheckWitness {
        file: PathBuf,
        #[arg(long)]
        timing: bool,
    },
    /// Integral homology of an interchange file or of a built complex.
    Homology {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        kind: Option<Kind>,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Kind {
    Circle,
    Annulus,
    Mk,
    Tower,
    YStage,
    Product,
}

impl From<Kind> for BuildKind {
    fn from(k: Kind) -> BuildKind {
        match k {
            Kind::Circle => BuildKind::Circle,
            Kind::Annulus => BuildKind::Annulus,
            Kind::Mk => BuildKind::Mk,
            Kind::Tower => BuildKind::Tower,
            Kind::YStage => BuildKind::YStage,
            Kind::Product => BuildKind::Product,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Lcm,
    Factorial,
}

#[derive(ValueEnum, Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SearchMethod {
    Auto,
    Ilp,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    k: Option<u32>,
    /// Linear stage circle sizes.
    #[arg(long)]
    reduce: bool,
    #[arg(long)]
    edge_scale: Option<usize>,
    #[arg(long)]
    stages: Option<u32>,
    #[arg(long)]
    node_limit: Option<u64>,
    /// Minimal-norm search: cycle potentials when applicable (`auto`) or branch and bound (`ilp`).
    #[arg(long, value_enum)]
    method: Option<SearchMethod>,
    /// Cell budget for the size guards.
    #[arg(long)]
    budget: Option<usize>,
    /// Output file for `build`, output directory for the verify commands.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall-clock timings in the report.
    #[arg(long)]
    timing: bool,
}

/// Config file keys, using the flag names with `-` or `_`.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct Config {
    p: Option<u64>,
    q: Option<u64>,
    k: Option<u32>,
    reduce: Option<bool>,
    #[serde(alias = "edge_scale")]
    edge_scale: Option<usize>,
    stages: Option<u32>,
    #[serde(alias = "node_limit")]
    node_limit: Option<u64>,
    budget: Option<usize>,
    method: Option<SearchMethod>,
    out: Option<PathBuf>,
    timing: Option<bool>,
    n: Option<usize>,
    a: Option<usize>,
    b: Option<usize>,
    #[serde(alias = "n_mode")]
    n_mode: Option<Mode>,
}

struct Usage(String);

impl From<ReportError> for Usage {
    fn from(e: ReportError) -> Usage {
        Usage(e.to_string())
    }
}

fn load_config(path: Option<&Path>) -> Result<Config, Usage> {
    let Some(path) = path else { return Ok(Config::default()) };
    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

struct Resolved {
    params: MkParams,
    stages: u32,
    run: RunOptions,
}

fn resolve(c: &Common, cfg: &Config) -> Result<Resolved, Usage> {
    let missing = |f: &str| Usage(format!("missing --{f}"));
    let p = c.p.or(cfg.p).ok_or_else(|| missing("p"))?;
    let q = c.q.or(cfg.q).ok_or_else(|| missing("q"))?;
    let k = c.k.or(cfg.k).ok_or_else(|| missing("k"))?;
    let params = MkParams {
        p,
        q,
        k,
        edge_scale: c.edge_scale.or(cfg.edge_scale).unwrap_or(3),
        reduce: c.reduce || cfg.reduce.unwrap_or(false),
        budget: c.budget.or(cfg.budget).unwrap_or(DEFAULT_BUDGET),
    };
    let run = RunOptions {
        out: c.out.clone().or_else(|| cfg.out.clone()),
        node_limit: c.node_limit.or(cfg.node_limit).unwrap_or(RunOptions::default().node_limit),
        method: match c.method.or(cfg.method) {
            Some(SearchMethod::Ilp) => Method::Ilp,
            _ => Method::Auto,
        },
        timing: c.timing || cfg.timing.unwrap_or(false),
    };
    Ok(Resolved { params, stages: c.stages.or(cfg.stages).unwrap_or(1), run })
}

/// Like [`resolve`], but `p, q, k` are only needed by the `M_k` kinds.
fn build_spec(kind: Kind, c: &Common, cfg: &Config, n: Option<usize>, a: Option<usize>, b: Option<usize>) -> Result<(BuildSpec, RunOptions), Usage> {
    let needs_params = !matches!(kind, Kind::Circle | Kind::Annulus);
    let r = if needs_params {
        resolve(c, cfg)?
    } else {
        let filled = Common { p: c.p.or(Some(2)), q: c.q.or(Some(3)), k: c.k.or(Some(1)), ..c.clone() };
        resolve(&filled, cfg)?
    };
    let n = n.or(cfg.n);
    let spec = BuildSpec {
        kind: kind.into(),
        n: match kind {
            Kind::Circle => n.ok_or_else(|| Usage("circle needs --n".into()))?,
            _ => n.unwrap_or(1),
        },
        a: a.or(cfg.a).unwrap_or(3),
        b: b.or(cfg.b).unwrap_or(3),
        stages: r.stages,
        params: r.params,
    };
    Ok((spec, r.run))
}

fn emit(report: &VerificationReport) -> ExitCode {
    print!("{}", report.to_json());
    ExitCode::from(report.exit_code() as u8)
}

fn failure(e: ReportError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_usage() { USAGE } else { 1 })
}

fn run(cli: Cli) -> Result<ExitCode, Usage> {
    let cfg = load_config(cli.config.as_deref())?;
    Ok(match cli.command {
        Command::Build { kind, common, n, a, b } => {
            let (spec, run) = build_spec(kind, &common, &cfg, n, a, b)?;
            match build(&spec) {
                Ok(cx) => {
                    if let Some(out) = &run.out {
                        write_atomic(out, &to_json(&cx))?;
                    }
                    print!("{}", summary(&cx));
                    ExitCode::SUCCESS
                }
                Err(e) => failure(e),
            }
        }
        Command::VerifyProp51 { common } => {
            let r = resolve(&common, &cfg)?;
            verify_prop51(&r.params, &r.run).map_or_else(failure, |rep| emit(&rep))
        }
        Command::VerifyProp52 { common, n_mode } => {
            let r = resolve(&common, &cfg)?;
            let mode = match n_mode.or(cfg.n_mode).unwrap_or(Mode::Lcm) {
                Mode::Lcm => NMode::Lcm,
                Mode::Factorial => NMode::Factorial,
            };
            verify_prop52(&r.params, mode, &r.run).map_or_else(failure, |rep| emit(&rep))
        }
        Command::VerifyTower { common } => {
            let r = resolve(&common, &cfg)?;
            verify_tower(&r.params, r.stages, &r.run).map_or_else(failure, |rep| emit(&rep))
        }
        Command::CheckWitness { file, timing } => {
            let run = RunOptions { timing: timing || cfg.timing.unwrap_or(false), ..RunOptions::default() };
            check_witness_file(&file, &run).map_or_else(failure, |rep| emit(&rep))
        }
        Command::Homology { input, kind, common, n, a, b } => {
            let cx = match (input, kind) {
                (Some(path), None) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
                    std::sync::Arc::new(from_json(&text).map_err(|e| Usage(e.to_string()))?)
                }
                (None, Some(kind)) => {
                    let (spec, _) = build_spec(kind, &common, &cfg, n, a, b)?;
                    match build(&spec) {
                        Ok(cx) => cx,
                        Err(e) => return Ok(failure(e)),
                    }
                }
                _ => return Err(Usage("homology needs exactly one of --input or --kind".into())),
            };
            match homology_lines(&cx) {
                Ok(s) => {
                    print!("{}{s}", summary(&cx));
                    ExitCode::SUCCESS
                }
                Err(e) => failure(e),
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(USAGE)
        }
    }
}
