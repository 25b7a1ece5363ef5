//! Command-line front end: build note-transition networks from scores,
//! report metrics, detect communities, batch-analyze corpora, and convert
//! MusicXML to the plain-text melody format.
//!
//! Exit codes: 0 success, 2 input error, 3 empty corpus, 4 internal
//! invariant violation. Every output file path is printed to stdout, one
//! per line; warnings go to stderr.

use clap::{Args, Parser, Subcommand, ValueEnum};
use melonet_core::community::{
    community_size_distribution, detect_communities, write_assignment_csv,
};
use melonet_core::corpus::{
    analyze_corpus, collect_inputs, summarize, write_cdf_csv, write_corpus_csv,
    write_degree_cdf_csv, write_degree_distribution_csv, write_failures_csv,
    write_histogram_csv, CorpusConfig, SUMMARY_METRICS,
};
use melonet_core::graph::{export_dot, export_gexf, export_json};
use melonet_core::metrics::{full_report, normalize_betweenness};
use melonet_core::score::{parse_edge_list, parse_mel_text, parse_musicxml, write_mel};
use melonet_core::smallworld::small_world_sigma;
use melonet_core::{build_network, Error, GraphKind, MelodyNetwork, Result};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "melonet",
    version,
    about = "Note-transition network analysis for symbolic music scores"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the note-transition network for one score and export it
    Build(BuildArgs),
    /// Compute the full metrics report for one score
    Metrics(MetricsArgs),
    /// Detect communities and export the attributed network
    Communities(CommunitiesArgs),
    /// Analyze every score under a directory
    Corpus(CorpusArgs),
    /// Convert a MusicXML score to the plain-text melody format
    Convert(ConvertArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Input score (.mel, .xml, .musicxml, or .edges)
    input: PathBuf,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Export formats, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = [ExportFormat::Json])]
    export: Vec<ExportFormat>,
    /// Drop rest nodes and their edges before exporting
    #[arg(long)]
    remove_rests: bool,
    /// Project onto an undirected network (self-loops kept)
    #[arg(long)]
    undirected: bool,
}

#[derive(Args)]
struct MetricsArgs {
    /// Input score (.mel, .xml, .musicxml, or .edges)
    input: PathBuf,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Ensemble seed; falls back to MELONET_SEED, then 42
    #[arg(long)]
    seed: Option<u64>,
    /// Random-graph ensemble size for the small-world comparison
    #[arg(long, default_value_t = 100)]
    ensemble: usize,
    /// Skip the small-world stage
    #[arg(long)]
    no_smallworld: bool,
    /// Minimum r-squared for calling the degree distribution scale-free
    #[arg(long, default_value_t = 0.80)]
    r2_threshold: f64,
    /// Drop rest nodes and their edges before analysis
    #[arg(long)]
    remove_rests: bool,
    /// Analyze the undirected projection (self-loops kept)
    #[arg(long)]
    undirected: bool,
    /// Divide betweenness scores by (n-1)(n-2)
    #[arg(long)]
    normalize_betweenness: bool,
}

#[derive(Args)]
struct CommunitiesArgs {
    /// Input score (.mel, .xml, .musicxml, or .edges)
    input: PathBuf,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Detection seed; falls back to MELONET_SEED, then 42
    #[arg(long)]
    seed: Option<u64>,
    /// Modularity resolution
    #[arg(long, default_value_t = 1.0)]
    resolution: f64,
    /// Drop rest nodes and their edges before detection
    #[arg(long)]
    remove_rests: bool,
}

#[derive(Args)]
struct CorpusArgs {
    /// Directory scanned recursively for .mel, .xml, and .musicxml files
    dir: PathBuf,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Per-track analysis seed; falls back to MELONET_SEED, then 42
    #[arg(long)]
    seed: Option<u64>,
    /// Random-graph ensemble size for the small-world comparison
    #[arg(long, default_value_t = 100)]
    ensemble: usize,
    /// Minimum r-squared for calling a degree distribution scale-free
    #[arg(long, default_value_t = 0.80)]
    r2_threshold: f64,
    /// Modularity resolution
    #[arg(long, default_value_t = 1.0)]
    resolution: f64,
    /// Drop rest nodes and their edges before per-track analysis
    #[arg(long)]
    remove_rests: bool,
    /// Histogram bin count for the metric distributions
    #[arg(long, default_value_t = 20)]
    bins: usize,
}

#[derive(Args)]
struct ConvertArgs {
    /// Input MusicXML score (.xml or .musicxml)
    input: PathBuf,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum ExportFormat {
    Json,
    Gexf,
    Dot,
}

impl ExportFormat {
    fn ext(self) -> &'static str {
        match self {
            ExportFormat::Json => "json",
            ExportFormat::Gexf => "gexf",
            ExportFormat::Dot => "dot",
        }
    }
}

impl std::fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.ext())
    }
}

/// Resolved configuration echoed beside every run's outputs so results
/// are self-describing; fields a subcommand does not use carry the
/// defaults.
#[derive(Serialize)]
struct RunConfig {
    subcommand: &'static str,
    inputs: Vec<String>,
    out_dir: String,
    seed: u64,
    ensemble: usize,
    r2_threshold: f64,
    resolution: f64,
    remove_rests: bool,
    undirected: bool,
    normalize_betweenness: bool,
    export: Vec<&'static str>,
    bins: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            subcommand: "",
            inputs: Vec::new(),
            out_dir: String::new(),
            seed: DEFAULT_SEED,
            ensemble: 100,
            r2_threshold: 0.80,
            resolution: 1.0,
            remove_rests: false,
            undirected: false,
            normalize_betweenness: false,
            export: Vec::new(),
            bins: 20,
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } | Error::Domain(_) | Error::Io(_) => 2,
        Error::CorpusEmpty(_) => 3,
        Error::Internal(_) => 4,
    }
}

fn run() -> Result<()> {
    match Cli::parse().command {
        Command::Build(args) => cmd_build(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::Communities(args) => cmd_communities(args),
        Command::Corpus(args) => cmd_corpus(args),
        Command::Convert(args) => cmd_convert(args),
    }
}

/// --seed beats MELONET_SEED beats the built-in default.
fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("MELONET_SEED") {
        Ok(value) => value
            .trim()
            .parse()
            .map_err(|_| Error::domain(format!("MELONET_SEED is not an integer: '{value}'"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|err| Error::domain(format!("cannot read '{}': {err}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "score".to_string())
}

/// Parse a score or edge list by extension and apply the shared
/// preprocessing flags. Parser warnings go to stderr.
fn load_network(path: &Path, remove_rests: bool, undirected: bool) -> Result<MelodyNetwork> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    let text = read_input(path)?;
    let name = stem(path);
    let mut net = match ext.as_str() {
        "mel" => build_network(&parse_mel_text(&text)?, &name)?,
        "xml" | "musicxml" => {
            let parsed = parse_musicxml(&text)?;
            for warning in &parsed.warnings {
                eprintln!("warning: {warning}");
            }
            build_network(&parsed.events, &name)?
        }
        "edges" => parse_edge_list(&text, &name)?,
        other => {
            return Err(Error::domain(format!(
                "unsupported input extension '{other}' (expected .mel, .xml, .musicxml, or .edges)"
            )))
        }
    };
    if remove_rests {
        net = net.remove_rests();
    }
    if undirected && net.kind() == GraphKind::Directed {
        net = net.undirected_projection(true);
    }
    Ok(net)
}

/// Write one artifact and print its path, the machine-readable record of
/// what the run produced. A closed stdout (downstream `head`) must not
/// abort the run, so print failures are ignored.
fn write_output(path: &Path, contents: &str) -> Result<()> {
    use std::io::Write;
    fs::write(path, contents)?;
    let _ = writeln!(std::io::stdout().lock(), "{}", path.display());
    Ok(())
}

fn write_run_config(out: &Path, config: &RunConfig) -> Result<()> {
    let mut body = serde_json::to_string_pretty(config)
        .map_err(|err| Error::Internal(format!("run config serialization: {err}")))?;
    body.push('\n');
    write_output(&out.join("run_config.json"), &body)
}

fn cmd_build(args: BuildArgs) -> Result<()> {
    let net = load_network(&args.input, args.remove_rests, args.undirected)?;
    fs::create_dir_all(&args.out)?;
    let name = stem(&args.input);
    let mut formats = args.export.clone();
    formats.sort();
    formats.dedup();
    for format in &formats {
        let contents = match format {
            ExportFormat::Json => export_json(&net),
            ExportFormat::Gexf => export_gexf(&net, None),
            ExportFormat::Dot => export_dot(&net),
        };
        write_output(&args.out.join(format!("{name}.{}", format.ext())), &contents)?;
    }
    write_run_config(
        &args.out,
        &RunConfig {
            subcommand: "build",
            inputs: vec![args.input.display().to_string()],
            out_dir: args.out.display().to_string(),
            remove_rests: args.remove_rests,
            undirected: args.undirected,
            export: formats.iter().map(|f| f.ext()).collect(),
            ..RunConfig::default()
        },
    )
}

fn cmd_metrics(args: MetricsArgs) -> Result<()> {
    let seed = resolve_seed(args.seed)?;
    let net = load_network(&args.input, args.remove_rests, args.undirected)?;
    fs::create_dir_all(&args.out)?;
    let name = stem(&args.input);

    let mut report = full_report(&net, args.r2_threshold)?;
    if args.normalize_betweenness {
        report.betweenness = normalize_betweenness(&report.betweenness);
        for entry in &mut report.top_by_betweenness {
            entry.value = report.betweenness[&entry.node];
        }
    }
    let mut body = serde_json::to_string_pretty(&report)
        .map_err(|err| Error::Internal(format!("report serialization: {err}")))?;
    body.push('\n');
    write_output(&args.out.join(format!("{name}.report.json")), &body)?;
    write_output(
        &args.out.join(format!("{name}.degree_distribution.csv")),
        &write_degree_distribution_csv(&report.degree_distribution),
    )?;
    write_output(
        &args.out.join(format!("{name}.degree_cdf.csv")),
        &write_degree_cdf_csv(&report.degree_distribution),
    )?;

    if !args.no_smallworld {
        let sigma = small_world_sigma(&net, args.ensemble, seed)?;
        let mut body = serde_json::to_string_pretty(&sigma)
            .map_err(|err| Error::Internal(format!("sigma serialization: {err}")))?;
        body.push('\n');
        write_output(&args.out.join(format!("{name}.smallworld.json")), &body)?;
    }

    write_run_config(
        &args.out,
        &RunConfig {
            subcommand: "metrics",
            inputs: vec![args.input.display().to_string()],
            out_dir: args.out.display().to_string(),
            seed,
            ensemble: args.ensemble,
            r2_threshold: args.r2_threshold,
            remove_rests: args.remove_rests,
            undirected: args.undirected,
            normalize_betweenness: args.normalize_betweenness,
            ..RunConfig::default()
        },
    )
}

fn cmd_communities(args: CommunitiesArgs) -> Result<()> {
    let seed = resolve_seed(args.seed)?;
    let net = load_network(&args.input, args.remove_rests, false)?;
    let assignment = detect_communities(&net, args.resolution, seed)?;
    fs::create_dir_all(&args.out)?;
    let name = stem(&args.input);

    write_output(
        &args.out.join(format!("{name}.communities.csv")),
        &write_assignment_csv(&assignment),
    )?;
    let mut sizes = String::from("community,size\n");
    for (id, size) in community_size_distribution(&assignment) {
        sizes.push_str(&format!("{id},{size}\n"));
    }
    write_output(&args.out.join(format!("{name}.community_sizes.csv")), &sizes)?;
    write_output(
        &args.out.join(format!("{name}.communities.gexf")),
        &export_gexf(&net, Some(&assignment.mapping)),
    )?;

    write_run_config(
        &args.out,
        &RunConfig {
            subcommand: "communities",
            inputs: vec![args.input.display().to_string()],
            out_dir: args.out.display().to_string(),
            seed,
            resolution: args.resolution,
            remove_rests: args.remove_rests,
            ..RunConfig::default()
        },
    )
}

fn cmd_corpus(args: CorpusArgs) -> Result<()> {
    let seed = resolve_seed(args.seed)?;
    let paths = collect_inputs(&args.dir)?;
    let config = CorpusConfig {
        seed,
        ensemble_size: args.ensemble,
        r_squared_threshold: args.r2_threshold,
        resolution: args.resolution,
        remove_rests: args.remove_rests,
        bins: args.bins,
    };
    let result = analyze_corpus(&paths, &config)?;
    fs::create_dir_all(&args.out)?;

    for failure in &result.failures {
        eprintln!("warning: {}: {}", failure.path, failure.error);
    }
    write_output(&args.out.join("corpus.csv"), &write_corpus_csv(&result.rows))?;
    if !result.failures.is_empty() {
        write_output(
            &args.out.join("failures.csv"),
            &write_failures_csv(&result.failures),
        )?;
    }
    for metric in SUMMARY_METRICS {
        match summarize(&result.rows, metric, args.bins) {
            Ok(summary) => {
                write_output(
                    &args.out.join(format!("dist_{metric}.csv")),
                    &write_histogram_csv(&summary),
                )?;
                write_output(
                    &args.out.join(format!("cdf_{metric}.csv")),
                    &write_cdf_csv(&summary),
                )?;
            }
            Err(err) => eprintln!("note: skipping {metric}: {err}"),
        }
    }

    write_run_config(
        &args.out,
        &RunConfig {
            subcommand: "corpus",
            inputs: vec![args.dir.display().to_string()],
            out_dir: args.out.display().to_string(),
            seed,
            ensemble: args.ensemble,
            r2_threshold: args.r2_threshold,
            resolution: args.resolution,
            remove_rests: args.remove_rests,
            bins: args.bins,
            ..RunConfig::default()
        },
    )
}

fn cmd_convert(args: ConvertArgs) -> Result<()> {
    let ext = args
        .input
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    if ext != "xml" && ext != "musicxml" {
        return Err(Error::domain(format!(
            "convert expects a MusicXML input (.xml or .musicxml), got '{}'",
            args.input.display()
        )));
    }
    let parsed = parse_musicxml(&read_input(&args.input)?)?;
    for warning in &parsed.warnings {
        eprintln!("warning: {warning}");
    }
    fs::create_dir_all(&args.out)?;
    let name = stem(&args.input);
    write_output(&args.out.join(format!("{name}.mel")), &write_mel(&parsed.events))?;

    write_run_config(
        &args.out,
        &RunConfig {
            subcommand: "convert",
            inputs: vec![args.input.display().to_string()],
            out_dir: args.out.display().to_string(),
            ..RunConfig::default()
        },
    )
}
