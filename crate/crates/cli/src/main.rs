//! mereoscan command line: scan -> classify -> verdict, plus direct access
//! to the finite-model checker.
//!
//! Exit codes are a fixed contract for CI use:
//! 0 = functional whole(s) only / requested checks satisfied,
//! 2 = any non-whole verdict or failed check,
//! 3 = input error (unreadable root, malformed manifest/model/config).

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand};

use mereoscan::classify::text::print_classifications;
use mereoscan::classify::{classify_participation, ParticipationClassification};
use mereoscan::config::{ConfigOverrides, OutputFormat, ToolConfig, CONFIG_ENV_VAR};
use mereoscan::graph::algo::{detect_cycles, detect_orphans, find_entry_points};
use mereoscan::graph::extract::{extract_dependencies, ExtractWarning};
use mereoscan::graph::text::print_graph;
use mereoscan::graph::{DependencyGraph, EdgeFilter};
use mereoscan::model::axioms::{
    check_weak_supplementation, eval_noncontingency, eval_unity,
};
use mereoscan::model::text::parse_model;
use mereoscan::model::RelationKind;
use mereoscan::verdict::report::{print_report_human, print_report_structured};
use mereoscan::verdict::{build_model, issue_verdict, VerdictOptions};

const EXIT_OK: u8 = 0;
const EXIT_NONWHOLE: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "mereoscan",
    version,
    about = "Extract file dependency graphs and decide whether a program is a functional whole, a collective, or a mere set of files"
)]
struct Cli {
    /// Config file (TOML, schema config/v1); falls back to $MEREOSCAN_CONFIG
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output format: human or structured
    #[arg(long, global = true, value_name = "FMT")]
    format: Option<String>,

    /// Write primary output to a file instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScanArgs {
    /// Root directory of the tree to analyze
    root: PathBuf,

    /// Enable an extraction grammar (repeatable): python, c
    #[arg(long = "grammar", value_name = "NAME", action = ArgAction::Append)]
    grammars: Option<Vec<String>>,

    /// Edge-list manifest (edges/v1) merged into the graph
    #[arg(long, value_name = "FILE")]
    manifest: Option<PathBuf>,

    /// Declare an entry point (repeatable); disables auto-detection
    #[arg(long = "entry", value_name = "PATH", action = ArgAction::Append)]
    entries: Option<Vec<String>>,

    /// Declare that the tree has no entry points at all
    #[arg(long)]
    no_entries: bool,

    /// Count loose couplings (socket/pipe manifest edges) as connectivity
    #[arg(long)]
    include_loose: bool,

    /// Cap on enumerated elementary cycles (>= 1)
    #[arg(long, value_name = "N")]
    cycle_cap: Option<usize>,
}

#[derive(Args)]
struct VerdictArgs {
    #[command(flatten)]
    scan: ScanArgs,

    /// Analysis mode: source (binding SCgraphPath) or compiled (binding linked)
    #[arg(long, value_name = "MODE")]
    mode: Option<String>,

    /// Count each orphan file as a candidate standalone program
    #[arg(long)]
    orphans_standalone: bool,

    /// Staging directory prefix for probe workspaces
    #[arg(long, value_name = "DIR")]
    staging_prefix: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the dependency graph and report entries, cycles, and orphans
    Scan(ScanArgs),
    /// Classify each file's participation mode (optional/mandatory/essential)
    Classify(VerdictArgs),
    /// Run the full pipeline and issue the wholeness verdict
    Verdict(VerdictArgs),
    /// Check unity, non-contingency, and weak supplementation on a model/v1 file
    CheckModel {
        /// Model file (model/v1)
        model: PathBuf,

        /// Part-whole relation kind to check (default: parthood)
        #[arg(long, value_name = "KIND")]
        parthood: Option<String>,

        /// Run only the named check (repeatable): unity, noncontingency,
        /// weak-supplementation
        #[arg(long = "check", value_name = "NAME", action = ArgAction::Append)]
        checks: Option<Vec<String>>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("mereoscan: error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

/// Input-level failures all map to exit code 3.
type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

fn run(cli: Cli) -> CliResult<u8> {
    let config_path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV_VAR).map(PathBuf::from));

    match &cli.command {
        Command::Scan(args) => cmd_scan(&cli, config_path.as_deref(), args),
        Command::Classify(args) => cmd_classify(&cli, config_path.as_deref(), args),
        Command::Verdict(args) => cmd_verdict(&cli, config_path.as_deref(), args),
        Command::CheckModel {
            model,
            parthood,
            checks,
        } => cmd_check_model(model, parthood.as_deref(), checks.as_deref()),
    }
}

fn resolve_config(
    cli: &Cli,
    config_path: Option<&Path>,
    scan: &ScanArgs,
    verdict: Option<&VerdictArgs>,
) -> CliResult<ToolConfig> {
    let overrides = ConfigOverrides {
        grammars: scan.grammars.clone(),
        manifest: scan.manifest.clone(),
        entries: scan.entries.clone(),
        no_entries: scan.no_entries,
        include_loose: scan.include_loose,
        orphans_standalone: verdict.is_some_and(|v| v.orphans_standalone),
        cycle_cap: scan.cycle_cap,
        format: cli.format.clone(),
        mode: verdict.and_then(|v| v.mode.clone()),
        staging_prefix: verdict.and_then(|v| v.staging_prefix.clone()),
    };
    Ok(ToolConfig::resolve(config_path, &overrides)?)
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

struct Scanned {
    graph: DependencyGraph,
    warnings: Vec<ExtractWarning>,
}

fn scan_tree(root: &Path, config: &ToolConfig) -> CliResult<Scanned> {
    let extraction = extract_dependencies(
        root,
        &config.grammars,
        config.manifest.as_deref(),
    )?;
    let mut graph = extraction.graph;
    let entries = find_entry_points(&graph, config.entries.as_deref())?;
    graph.set_entries(entries)?;
    Ok(Scanned {
        graph,
        warnings: extraction.warnings,
    })
}

fn report_warnings(warnings: &[ExtractWarning]) {
    for w in warnings {
        eprintln!("mereoscan: warning: {}: {}", w.path, w.message);
    }
}

fn cmd_scan(cli: &Cli, config_path: Option<&Path>, args: &ScanArgs) -> CliResult<u8> {
    let config = resolve_config(cli, config_path, args, None)?;
    let filter = EdgeFilter {
        include_loose: config.include_loose,
    };
    let scanned = scan_tree(&args.root, &config)?;
    report_warnings(&scanned.warnings);

    let graph = &scanned.graph;
    let cycles = detect_cycles(graph, config.cycle_cap);
    let orphans = detect_orphans(graph, graph.entries(), filter);

    match config.format {
        OutputFormat::Structured => emit(cli, &print_graph(graph))?,
        OutputFormat::Human => {
            let mut text = String::new();
            text.push_str(&format!(
                "scan of {} ({} nodes, {} edges)\n",
                args.root.display(),
                graph.node_count(),
                graph.edges().len()
            ));
            text.push_str(&format!("  digest : {}\n", graph.digest()));
            if graph.entries().is_empty() {
                text.push_str("  entries: none found (no in-degree-0 source file)\n");
            } else {
                text.push_str(&format!(
                    "  entries: {}\n",
                    graph
                        .entries()
                        .iter()
                        .cloned()
                        .collect::<Vec<_>>()
                        .join(", ")
                ));
            }
            for n in graph.nodes() {
                text.push_str(&format!(
                    "  {} [{}]\n",
                    n.path,
                    n.grammar.as_deref().unwrap_or("unclaimed")
                ));
            }
            for e in graph.edges() {
                text.push_str(&format!(
                    "  {} -> {} ({}, {})\n",
                    e.from, e.to, e.mechanism, e.site
                ));
            }
            for u in graph.unresolved() {
                text.push_str(&format!("  {} -> {} (unresolved)\n", u.from, u.target));
            }
            if !orphans.is_empty() {
                text.push_str(&format!(
                    "  orphans: {}\n",
                    orphans.iter().cloned().collect::<Vec<_>>().join(", ")
                ));
            }
            if !cycles.cycles.is_empty() {
                for c in &cycles.cycles {
                    text.push_str(&format!("  cycle: {}\n", c.join(" -> ")));
                }
                if cycles.truncated {
                    text.push_str("  (cycle list truncated at cap)\n");
                }
            }
            emit(cli, &text)?;
        }
    }
    Ok(EXIT_OK)
}

fn classify_scanned(
    root: &Path,
    config: &ToolConfig,
    scanned: &Scanned,
    filter: EdgeFilter,
) -> CliResult<Vec<ParticipationClassification>> {
    let probe_spec = config.probe.as_ref().map(|p| p.to_spec());
    let replacements: BTreeMap<String, PathBuf> = config
        .probe
        .as_ref()
        .map(|p| p.replacements.clone())
        .unwrap_or_default();
    Ok(classify_participation(
        &scanned.graph,
        Some(root),
        probe_spec.as_ref(),
        &replacements,
        filter,
    )?)
}

fn cmd_classify(cli: &Cli, config_path: Option<&Path>, args: &VerdictArgs) -> CliResult<u8> {
    let config = resolve_config(cli, config_path, &args.scan, Some(args))?;
    let filter = EdgeFilter {
        include_loose: config.include_loose,
    };
    let scanned = scan_tree(&args.scan.root, &config)?;
    report_warnings(&scanned.warnings);
    let classifications = classify_scanned(&args.scan.root, &config, &scanned, filter)?;

    match config.format {
        OutputFormat::Structured => emit(cli, &print_classifications(&classifications))?,
        OutputFormat::Human => {
            let mut text = String::new();
            text.push_str(&format!(
                "participation of {} files ({})\n",
                classifications.len(),
                mereoscan::classify::IMMUTABLE_NOTE
            ));
            for c in &classifications {
                let evidence: Vec<&str> = c.evidence.iter().map(|e| e.tag()).collect();
                text.push_str(&format!(
                    "  {:<9} {} {}\n",
                    c.mode.name(),
                    c.file,
                    if evidence.is_empty() {
                        String::new()
                    } else {
                        format!("({})", evidence.join(", "))
                    }
                ));
            }
            emit(cli, &text)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verdict(cli: &Cli, config_path: Option<&Path>, args: &VerdictArgs) -> CliResult<u8> {
    let config = resolve_config(cli, config_path, &args.scan, Some(args))?;
    let filter = EdgeFilter {
        include_loose: config.include_loose,
    };
    let scanned = scan_tree(&args.scan.root, &config)?;
    report_warnings(&scanned.warnings);
    let classifications = classify_scanned(&args.scan.root, &config, &scanned, filter)?;

    let model = build_model(&scanned.graph, &classifications, config.mode, filter)?;
    let options = VerdictOptions {
        mode: config.mode,
        orphans_standalone: config.orphans_standalone,
        filter,
        cycle_cap: config.cycle_cap,
    };
    let report = issue_verdict(&model, &scanned.graph, &options)?;

    match config.format {
        OutputFormat::Structured => emit(cli, &print_report_structured(&report))?,
        OutputFormat::Human => emit(cli, &print_report_human(&report))?,
    }
    Ok(if report.all_wholes() {
        EXIT_OK
    } else {
        EXIT_NONWHOLE
    })
}

fn cmd_check_model(
    model_path: &Path,
    parthood: Option<&str>,
    checks: Option<&[String]>,
) -> CliResult<u8> {
    let text = std::fs::read_to_string(model_path)?;
    let model = parse_model(&text)?;

    let parthood = match parthood {
        Some(name) => RelationKind::parse(name)
            .ok_or_else(|| format!("unknown relation kind `{name}`"))?,
        None => RelationKind::Parthood,
    };

    let requested: BTreeSet<String> = match checks {
        Some(list) => {
            let known = ["unity", "noncontingency", "weak-supplementation"];
            for c in list {
                if !known.contains(&c.as_str()) {
                    return Err(format!(
                        "unknown check `{c}` (known: {})",
                        known.join(", ")
                    )
                    .into());
                }
            }
            list.iter().cloned().collect()
        }
        None => ["unity", "noncontingency", "weak-supplementation"]
            .into_iter()
            .map(String::from)
            .collect(),
    };

    for issue in model.issues() {
        println!("model issue: {issue}");
    }

    let mut all_sat = true;
    if requested.contains("unity") {
        let r = eval_unity(&model, parthood, RelationKind::Binding)?;
        println!(
            "unity ({} over {parthood}): {}",
            model.binding_name(),
            if r.sat { "sat" } else { "unsat" }
        );
        for c in &r.counterexamples {
            println!(
                "  counterexample: x={} whole={} z={} t={} ({})",
                c.x, c.whole, c.z, c.time, c.direction
            );
        }
        all_sat &= r.sat;
    }
    if requested.contains("noncontingency") {
        let r = eval_noncontingency(&model, parthood, RelationKind::Binding)?;
        println!(
            "non-contingency ({} not equivalent to co-parthood): {}",
            model.binding_name(),
            if r.sat { "sat" } else { "unsat" }
        );
        for w in r.witnesses.iter().take(10) {
            println!("  witness: x={} z={} t={} ({})", w.x, w.z, w.time, w.direction);
        }
        if r.witnesses.len() > 10 {
            println!("  ... {} more witnesses", r.witnesses.len() - 10);
        }
        all_sat &= r.sat;
    }
    if requested.contains("weak-supplementation") {
        let violations = check_weak_supplementation(&model);
        println!(
            "weak supplementation: {}",
            if violations.is_empty() { "sat" } else { "violated" }
        );
        for v in &violations {
            println!(
                "  violation: part={} whole={} t={} has no disjoint supplement",
                v.part, v.whole, v.time
            );
        }
        all_sat &= violations.is_empty();
    }

    Ok(if all_sat { EXIT_OK } else { EXIT_NONWHOLE })
}
