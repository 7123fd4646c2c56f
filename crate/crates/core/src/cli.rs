//! The `normargue` command line: `run`, `export` and `check`.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::arguments::{construct_arguments, ArgId, Argument, Ordering};
use crate::formula::parse_with_mode;
use crate::semantics::{
    acceptance, brute_force_stable, compute_defeats, grounded_extension, stable_extensions,
    verify_extension, AcceptanceMode, ArgumentationFramework, Defeat, DefeatConfig, DefeatKind,
    Extension, Locus,
};
use crate::theory::{instantiate_schemes_report, load_theory, LoadError, LoadOptions, Theory};

pub const EXIT_INVALID: i32 = 2;
pub const EXIT_TOO_LARGE: i32 = 3;
pub const EXIT_ORACLE_MISMATCH: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "normargue",
    version,
    about = "Argue about norms: build arguments from a theory file and find what is jointly acceptable"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build arguments and defeats, then print extensions and verdicts.
    Run {
        theory: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        /// A conclusion to test for acceptance; repeatable.
        #[arg(long = "query", value_name = "FORMULA")]
        queries: Vec<String>,
        #[arg(long, value_enum, default_value_t = SemanticsKind::Stable)]
        semantics: SemanticsKind,
        /// Cross-check the stable solver against brute-force enumeration.
        #[arg(long)]
        oracle: bool,
    },
    /// Print the argument graph.
    Export {
        theory: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[arg(long, value_enum, default_value_t = ExportFormat::Dot)]
        format: ExportFormat,
    },
    /// Validate a theory file without evaluating it.
    Check {
        theory: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct PipelineArgs {
    /// Longest rule chain (and scheme rounds) to consider.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    pub max_depth: Option<u32>,
    /// Let undercutting respect the rule-based preference.
    #[arg(long)]
    pub undercut_gated: bool,
    /// Read permission as the absence of a contrary obligation.
    #[arg(long)]
    pub weak_mode: bool,
}

impl PipelineArgs {
    fn load_options(&self) -> LoadOptions {
        LoadOptions {
            weak_mode: self.weak_mode.then_some(true),
            max_depth: self.max_depth.map(|n| n as usize),
        }
    }

    fn defeat_config(&self) -> DefeatConfig {
        DefeatConfig {
            undercut_ordering: self.undercut_gated.then_some(Ordering::RuleBased),
            ..DefeatConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemanticsKind {
    Stable,
    Grounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Dot,
    Json,
}

/// Everything computed from one theory file.
#[derive(Debug, Clone)]
pub struct Pipeline {
    /// Loaded theory before scheme instantiation.
    pub source: Theory,
    pub theory: Theory,
    pub fixpoint: bool,
    pub arguments: Vec<Argument>,
    pub truncated: bool,
    pub af: ArgumentationFramework,
}

impl Pipeline {
    pub fn from_theory(source: Theory, config: &DefeatConfig) -> Self {
        let (theory, report) = instantiate_schemes_report(&source);
        let construction = construct_arguments(&theory);
        let defeats = compute_defeats(&construction.arguments, &theory, config);
        let af = ArgumentationFramework::new(construction.arguments.len(), defeats);
        Pipeline {
            source,
            theory,
            fixpoint: report.fixpoint,
            arguments: construction.arguments,
            truncated: construction.truncated,
            af,
        }
    }

    pub fn load(path: &Path, args: &PipelineArgs) -> Result<Self, LoadError> {
        let source = load_theory(path, &args.load_options())?;
        Ok(Pipeline::from_theory(source, &args.defeat_config()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheorySummary {
    pub agents: usize,
    pub premises: usize,
    pub rules: usize,
    pub generated_rules: usize,
    pub contraries: usize,
    pub weak_mode: bool,
    pub max_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgumentReport {
    pub id: ArgId,
    pub label: String,
    pub conclusion: String,
    pub premise: Option<String>,
    pub top_rule: Option<String>,
    pub sub_args: Vec<ArgId>,
    pub strict: bool,
    pub firm: bool,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryVerdict {
    pub query: String,
    pub credulous: bool,
    pub skeptical: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub theory: TheorySummary,
    pub semantics: SemanticsKind,
    pub arguments: Vec<ArgumentReport>,
    pub defeats: Vec<Defeat>,
    pub extensions: Vec<Vec<ArgId>>,
    pub queries: Vec<QueryVerdict>,
    pub truncated: bool,
    pub fixpoint: bool,
    pub warnings: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", .path.display())]
    Load {
        path: PathBuf,
        #[source]
        source: LoadError,
    },
    #[error("query `{query}`: {message}")]
    Query { query: String, message: String },
    #[error("{0}")]
    TooLarge(#[from] crate::semantics::TooLarge),
    #[error("solver and brute force disagree: solver {solver:?}, brute force {oracle:?}")]
    OracleMismatch {
        solver: Vec<Vec<ArgId>>,
        oracle: Vec<Vec<ArgId>>,
    },
    #[error("solver returned a set that is not a stable extension: {0:?}")]
    InvalidExtension(Vec<ArgId>),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Load { .. } | CliError::Query { .. } => EXIT_INVALID,
            CliError::TooLarge(_) => EXIT_TOO_LARGE,
            CliError::OracleMismatch { .. } | CliError::InvalidExtension(_) => EXIT_ORACLE_MISMATCH,
            CliError::Io(_) => 1,
        }
    }
}

fn ids(e: &Extension) -> Vec<ArgId> {
    e.members.iter().copied().collect()
}

fn load(path: &Path, args: &PipelineArgs) -> Result<Pipeline, CliError> {
    Pipeline::load(path, args).map_err(|source| CliError::Load {
        path: path.to_path_buf(),
        source,
    })
}

pub fn build_report(
    p: &Pipeline,
    semantics: SemanticsKind,
    queries: &[String],
    oracle: bool,
) -> Result<RunReport, CliError> {
    let stable = stable_extensions(&p.af);
    if let Some(bad) = stable.iter().find(|e| !verify_extension(&p.af, &e.members)) {
        return Err(CliError::InvalidExtension(ids(bad)));
    }
    if oracle {
        let brute = brute_force_stable(&p.af)?;
        if brute != stable {
            return Err(CliError::OracleMismatch {
                solver: stable.iter().map(ids).collect(),
                oracle: brute.iter().map(ids).collect(),
            });
        }
    }
    let extensions = match semantics {
        SemanticsKind::Stable => stable,
        SemanticsKind::Grounded => vec![grounded_extension(&p.af)],
    };

    let mut verdicts = Vec::new();
    for q in queries {
        let f = parse_with_mode(q, p.theory.mode()).map_err(|e| CliError::Query {
            query: q.clone(),
            message: e.to_string(),
        })?;
        verdicts.push(QueryVerdict {
            query: f.to_string(),
            credulous: acceptance(&p.arguments, &extensions, &f, AcceptanceMode::Credulous),
            skeptical: acceptance(&p.arguments, &extensions, &f, AcceptanceMode::Skeptical),
        });
    }

    let mut warnings: Vec<String> = p.theory.warnings.iter().map(|w| w.to_string()).collect();
    if !p.fixpoint {
        warnings.push(format!(
            "scheme instantiation stopped after {} rounds before reaching a fixpoint",
            p.theory.max_depth
        ));
    }
    if p.truncated {
        warnings.push(format!(
            "argument construction truncated at depth {}",
            p.theory.max_depth
        ));
    }

    Ok(RunReport {
        schema: 1,
        theory: TheorySummary {
            agents: p.theory.agents.len(),
            premises: p.theory.premises.len(),
            rules: p.theory.rules.len(),
            generated_rules: p.theory.rules.len() - p.source.rules.len(),
            contraries: p.theory.contraries.len(),
            weak_mode: p.theory.weak_mode,
            max_depth: p.theory.max_depth,
        },
        semantics,
        arguments: p
            .arguments
            .iter()
            .map(|a| ArgumentReport {
                id: a.id,
                label: a.label().to_string(),
                conclusion: a.conclusion.to_string(),
                premise: a.premise.clone(),
                top_rule: a.top_rule.clone(),
                sub_args: a.sub_args.clone(),
                strict: !a.defeasible,
                firm: !a.plausible,
                depth: a.depth,
            })
            .collect(),
        defeats: p.af.defeats.clone(),
        extensions: extensions.iter().map(ids).collect(),
        queries: verdicts,
        truncated: p.truncated,
        fixpoint: p.fixpoint,
        warnings,
    })
}

struct Style {
    color: bool,
}

impl Style {
    fn heading(&self, s: &str) -> String {
        if self.color {
            format!("\x1b[1m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }

    fn verdict(&self, yes: bool) -> String {
        let word = if yes { "yes" } else { "no" };
        match (self.color, yes) {
            (false, _) => word.to_string(),
            (true, true) => format!("\x1b[32m{word}\x1b[0m"),
            (true, false) => format!("\x1b[31m{word}\x1b[0m"),
        }
    }
}

fn locus_text(l: &Locus) -> String {
    match l {
        Locus::SubArgument(a) => format!("A{a}"),
        Locus::Premise(p) => format!("premise {p}"),
        Locus::Rule(r) => format!("rule {r}"),
    }
}

fn kind_text(k: DefeatKind) -> &'static str {
    match k {
        DefeatKind::Rebut => "rebuts",
        DefeatKind::Undermine => "undermines",
        DefeatKind::Undercut => "undercuts",
    }
}

pub fn render_text(r: &RunReport, color: bool) -> String {
    let st = Style { color };
    let mut out = String::new();
    let t = &r.theory;
    let _ = writeln!(
        out,
        "theory: {} premises, {} rules ({} generated), {}",
        t.premises,
        t.rules,
        t.generated_rules,
        contrary_pairs(t.contraries)
    );
    for w in &r.warnings {
        let _ = writeln!(out, "warning: {w}");
    }

    let _ = writeln!(
        out,
        "\n{}",
        st.heading(&format!("arguments ({})", r.arguments.len()))
    );
    let width = r.arguments.iter().map(|a| a.label.len()).max().unwrap_or(0);
    for a in &r.arguments {
        let mark = if a.premise.is_some() { "*" } else { " " };
        let class = format!(
            "{}, {}",
            if a.strict { "strict" } else { "defeasible" },
            if a.firm { "firm" } else { "plausible" }
        );
        let _ = writeln!(
            out,
            "  A{:<3}{mark} {:<width$}  {}  [{class}]",
            a.id, a.label, a.conclusion
        );
    }

    let _ = writeln!(
        out,
        "\n{}",
        st.heading(&format!("defeats ({})", r.defeats.len()))
    );
    for d in &r.defeats {
        let _ = writeln!(
            out,
            "  A{} {} A{} at {}",
            d.attacker,
            kind_text(d.kind),
            d.target,
            locus_text(&d.locus)
        );
    }

    let name = match r.semantics {
        SemanticsKind::Stable => "stable extensions",
        SemanticsKind::Grounded => "grounded extension",
    };
    let _ = writeln!(
        out,
        "\n{}",
        st.heading(&format!("{name} ({})", r.extensions.len()))
    );
    if r.extensions.is_empty() {
        let _ = writeln!(out, "  no stable extension");
    }
    for (i, e) in r.extensions.iter().enumerate() {
        let members: Vec<String> = e.iter().map(|a| format!("A{a}")).collect();
        let _ = writeln!(out, "  E{}: {{{}}}", i + 1, members.join(", "));
        for &a in e {
            let _ = writeln!(out, "      A{a}  {}", r.arguments[a].conclusion);
        }
    }

    if !r.queries.is_empty() {
        let _ = writeln!(out, "\n{}", st.heading("queries"));
        for q in &r.queries {
            let _ = writeln!(
                out,
                "  {}: credulous {}, skeptical {}",
                q.query,
                st.verdict(q.credulous),
                st.verdict(q.skeptical)
            );
        }
        if r.extensions.is_empty() {
            let _ = writeln!(out, "  (no stable extension: nothing is accepted)");
        }
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT rendering: one node per argument, premise-arguments starred, one
/// edge per defeat styled by kind.
fn contrary_pairs(n: usize) -> String {
    if n == 1 {
        "1 contrary pair".into()
    } else {
        format!("{n} contrary pairs")
    }
}

pub fn render_dot(p: &Pipeline) -> String {
    let mut out = String::from("digraph arguments {\n  node [shape=box];\n");
    for a in &p.arguments {
        let star = if a.is_premise() { "*" } else { "" };
        let _ = writeln!(
            out,
            "  a{} [label=\"A{}{star} {}\"];",
            a.id,
            a.id,
            dot_escape(&a.conclusion.to_string())
        );
    }
    for d in &p.af.defeats {
        let (style, label) = match d.kind {
            DefeatKind::Rebut => ("solid", "rebut"),
            DefeatKind::Undermine => ("dashed", "undermine"),
            DefeatKind::Undercut => ("dotted", "undercut"),
        };
        let _ = writeln!(
            out,
            "  a{} -> a{} [style={style}, label=\"{label}\"];",
            d.attacker, d.target
        );
    }
    out.push_str("}\n");
    out
}

fn check(
    path: &Path,
    args: &PipelineArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let theory = load_theory(path, &args.load_options()).map_err(|source| CliError::Load {
        path: path.to_path_buf(),
        source,
    })?;
    for w in &theory.warnings {
        writeln!(err, "{}: warning: {w}", path.display())?;
    }
    writeln!(
        out,
        "{}: ok ({} agents, {} premises, {} rules, {})",
        path.display(),
        theory.agents.len(),
        theory.premises.len(),
        theory.rules.len(),
        contrary_pairs(theory.contraries.len())
    )?;
    Ok(())
}

fn execute(
    cli: &Cli,
    color: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    match &cli.command {
        Command::Run {
            theory,
            pipeline,
            json,
            queries,
            semantics,
            oracle,
        } => {
            let p = load(theory, pipeline)?;
            let report = build_report(&p, *semantics, queries, *oracle)?;
            if *json {
                serde_json::to_writer_pretty(&mut *out, &report).map_err(io::Error::from)?;
                writeln!(out)?;
            } else {
                out.write_all(render_text(&report, color).as_bytes())?;
            }
        }
        Command::Export {
            theory,
            pipeline,
            format,
        } => {
            let p = load(theory, pipeline)?;
            match format {
                ExportFormat::Dot => out.write_all(render_dot(&p).as_bytes())?,
                ExportFormat::Json => {
                    serde_json::to_writer_pretty(&mut *out, &p.af).map_err(io::Error::from)?;
                    writeln!(out)?;
                }
            }
        }
        Command::Check { theory, pipeline } => check(theory, pipeline, out, err)?,
    }
    Ok(())
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli, color: bool, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cli, color, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Color only on a terminal, and never when `NORMARGUE_COLOR=0`.
pub fn color_enabled() -> bool {
    use std::io::IsTerminal;
    std::env::var("NORMARGUE_COLOR").map_or(true, |v| v != "0") && io::stdout().is_terminal()
}
