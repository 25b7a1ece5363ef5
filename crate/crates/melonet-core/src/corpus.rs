//! Directory-level batch analysis: one metrics row per track, plus
//! histogram and CDF summaries of any metric across the corpus.

use crate::community::detect_communities;
use crate::error::{Error, Result};
use crate::graph::build_network;
use crate::metrics::full_report;
use crate::score::{parse_mel_text, parse_musicxml, ParseOutput};
use crate::smallworld::small_world_sigma;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorpusConfig {
    pub seed: u64,
    pub ensemble_size: usize,
    pub r_squared_threshold: f64,
    pub resolution: f64,
    /// Strip rest nodes before any analysis, the rest-removal workflow.
    pub remove_rests: bool,
    pub bins: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            seed: 42,
            ensemble_size: 100,
            r_squared_threshold: 0.80,
            resolution: 1.0,
            remove_rests: false,
            bins: 20,
        }
    }
}

/// Per-track scalars, one CSV row. Option fields serialize as empty cells
/// when the quantity is undefined for that track.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusRow {
    pub name: String,
    pub length: usize,
    pub node_count: usize,
    pub edge_count: usize,
    pub avg_degree: f64,
    pub max_degree: usize,
    pub median_degree: f64,
    pub density: f64,
    pub avg_distance_directed: f64,
    pub avg_distance_undirected: f64,
    pub diameter: usize,
    pub reachable_fraction_directed: f64,
    pub reachable_fraction_undirected: f64,
    pub clustering_global: f64,
    pub clustering_avg_local: f64,
    pub lambda: Option<f64>,
    pub r_squared: Option<f64>,
    pub scale_free: bool,
    pub sigma: Option<f64>,
    pub cc: Option<f64>,
    pub cc_rg: Option<f64>,
    pub l: Option<f64>,
    pub l_rg: Option<f64>,
    pub modularity_q: f64,
    pub community_count: usize,
    pub warnings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusFailure {
    pub path: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusResult {
    pub rows: Vec<CorpusRow>,
    pub failures: Vec<CorpusFailure>,
}

/// Score files under a directory (.mel, .xml, .musicxml), sorted by path.
pub fn collect_inputs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::domain(format!("reading {}: {e}", dir.display())))?;
        if !entry.file_type().is_file() {
            continue;
        }
        let path = entry.into_path();
        match path.extension().and_then(|e| e.to_str()) {
            Some("mel") | Some("xml") | Some("musicxml") => paths.push(path),
            _ => {}
        }
    }
    paths.sort();
    Ok(paths)
}

/// Parse one score file by extension; .mel produces no warnings.
pub fn parse_score_file(path: &Path) -> Result<ParseOutput> {
    let text = std::fs::read_to_string(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("mel") => Ok(ParseOutput {
            events: parse_mel_text(&text)?,
            warnings: Vec::new(),
        }),
        Some("xml") | Some("musicxml") => parse_musicxml(&text),
        other => Err(Error::domain(format!(
            "unsupported score extension {other:?} for {}",
            path.display()
        ))),
    }
}

fn track_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// The full single-track pipeline: parse, build, optional rest removal,
/// metrics, sigma (left empty when undefined), communities.
pub fn analyze_track(path: &Path, config: &CorpusConfig) -> Result<CorpusRow> {
    let parsed = parse_score_file(path)?;
    let name = track_name(path);
    let mut net = build_network(&parsed.events, &name)?;
    if config.remove_rests {
        net = net.remove_rests();
    }
    let report = full_report(&net, config.r_squared_threshold)?;
    let sigma = small_world_sigma(&net, config.ensemble_size, config.seed).ok();
    let communities = detect_communities(&net, config.resolution, config.seed)?;
    Ok(CorpusRow {
        name,
        length: report.length,
        node_count: report.node_count,
        edge_count: report.edge_count,
        avg_degree: report.avg_degree,
        max_degree: report.max_degree,
        median_degree: report.median_degree,
        density: report.density,
        avg_distance_directed: report.avg_distance_directed,
        avg_distance_undirected: report.avg_distance_undirected,
        diameter: report.diameter,
        reachable_fraction_directed: report.reachable_fraction_directed,
        reachable_fraction_undirected: report.reachable_fraction_undirected,
        clustering_global: report.clustering_global,
        clustering_avg_local: report.clustering_avg_local,
        lambda: report.power_law.lambda,
        r_squared: report.power_law.r_squared,
        scale_free: report.power_law.scale_free,
        sigma: sigma.as_ref().and_then(|s| s.sigma),
        cc: sigma.as_ref().map(|s| s.cc),
        cc_rg: sigma.as_ref().map(|s| s.cc_rg),
        l: sigma.as_ref().map(|s| s.l),
        l_rg: sigma.as_ref().map(|s| s.l_rg),
        modularity_q: communities.modularity_q,
        community_count: communities.community_count(),
        warnings: parsed.warnings.len(),
    })
}

/// Analyze every input; failures become rows in the failure list. Errors
/// only when there are no inputs or nothing parses.
pub fn analyze_corpus(paths: &[PathBuf], config: &CorpusConfig) -> Result<CorpusResult> {
    if paths.is_empty() {
        return Err(Error::CorpusEmpty("no inputs".to_string()));
    }
    let mut sorted: Vec<&PathBuf> = paths.iter().collect();
    sorted.sort_by_key(|p| (track_name(p), (*p).clone()));
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for path in sorted {
        match analyze_track(path, config) {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(CorpusFailure {
                path: path.display().to_string(),
                error: e.to_string(),
            }),
        }
    }
    if rows.is_empty() {
        return Err(Error::CorpusEmpty(format!(
            "no inputs parsed ({} failures, first: {})",
            failures.len(),
            failures[0].error
        )));
    }
    Ok(CorpusResult { rows, failures })
}

/// Stable-column CSV for the per-track table.
pub fn write_corpus_csv(rows: &[CorpusRow]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row).expect("row serializes");
    }
    String::from_utf8(writer.into_inner().expect("csv flush")).expect("csv is UTF-8")
}

pub fn write_failures_csv(failures: &[CorpusFailure]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for failure in failures {
        writer.serialize(failure).expect("failure serializes");
    }
    String::from_utf8(writer.into_inner().expect("csv flush")).expect("csv is UTF-8")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub width: f64,
    pub density: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionSummary {
    pub metric: String,
    pub histogram: Vec<HistogramBin>,
    /// Empirical CDF: (value, fraction of samples <= value) per distinct
    /// value, ending at exactly 1.
    pub cdf: Vec<(f64, f64)>,
    pub n: usize,
}

/// Metrics summarize() accepts, also the set the CLI exposes.
pub const SUMMARY_METRICS: &[&str] = &[
    "node_count",
    "edge_count",
    "length",
    "avg_degree",
    "max_degree",
    "median_degree",
    "density",
    "avg_distance_directed",
    "avg_distance_undirected",
    "diameter",
    "clustering_global",
    "clustering_avg_local",
    "lambda",
    "r_squared",
    "sigma",
    "modularity_q",
    "community_count",
];

fn metric_value(row: &CorpusRow, metric: &str) -> Option<f64> {
    match metric {
        "node_count" => Some(row.node_count as f64),
        "edge_count" => Some(row.edge_count as f64),
        "length" => Some(row.length as f64),
        "avg_degree" => Some(row.avg_degree),
        "max_degree" => Some(row.max_degree as f64),
        "median_degree" => Some(row.median_degree),
        "density" => Some(row.density),
        "avg_distance_directed" => Some(row.avg_distance_directed),
        "avg_distance_undirected" => Some(row.avg_distance_undirected),
        "diameter" => Some(row.diameter as f64),
        "clustering_global" => Some(row.clustering_global),
        "clustering_avg_local" => Some(row.clustering_avg_local),
        "lambda" => row.lambda,
        "r_squared" => row.r_squared,
        "sigma" => row.sigma,
        "modularity_q" => Some(row.modularity_q),
        "community_count" => Some(row.community_count as f64),
        _ => None,
    }
}

/// Equal-width histogram over [min, max] plus the empirical CDF. Rows
/// where the metric is undefined are skipped; a constant sample collapses
/// to one unit-width bin.
pub fn summarize(rows: &[CorpusRow], metric: &str, bins: usize) -> Result<DistributionSummary> {
    if bins == 0 {
        return Err(Error::domain("bin count must be at least 1"));
    }
    if !SUMMARY_METRICS.contains(&metric) {
        return Err(Error::domain(format!("unknown metric '{metric}'")));
    }
    let mut values: Vec<f64> = rows
        .iter()
        .filter_map(|r| metric_value(r, metric))
        .filter(|v| v.is_finite())
        .collect();
    if values.is_empty() {
        return Err(Error::domain(format!(
            "no finite values of '{metric}' in the corpus"
        )));
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let min = values[0];
    let max = values[n - 1];

    let histogram = if max == min {
        vec![HistogramBin {
            lower: min,
            width: 1.0,
            density: 1.0,
        }]
    } else {
        let width = (max - min) / bins as f64;
        let mut counts = vec![0usize; bins];
        for &v in &values {
            let bin = (((v - min) / width) as usize).min(bins - 1);
            counts[bin] += 1;
        }
        counts
            .into_iter()
            .enumerate()
            .map(|(i, count)| HistogramBin {
                lower: min + i as f64 * width,
                width,
                density: count as f64 / (n as f64 * width),
            })
            .collect()
    };

    let mut cdf: Vec<(f64, f64)> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let fraction = (i + 1) as f64 / n as f64;
        match cdf.last_mut() {
            Some(last) if last.0 == v => last.1 = fraction,
            _ => cdf.push((v, fraction)),
        }
    }

    Ok(DistributionSummary {
        metric: metric.to_string(),
        histogram,
        cdf,
        n,
    })
}

pub fn write_histogram_csv(summary: &DistributionSummary) -> String {
    let mut out = String::from("bin_lower,bin_width,density\n");
    for bin in &summary.histogram {
        out.push_str(&format!("{},{},{}\n", bin.lower, bin.width, bin.density));
    }
    out
}

pub fn write_cdf_csv(summary: &DistributionSummary) -> String {
    let mut out = String::from("value,cumulative_fraction\n");
    for (value, fraction) in &summary.cdf {
        out.push_str(&format!("{value},{fraction}\n"));
    }
    out
}

/// 2-column CSV of a degree distribution, for plotting P(k).
pub fn write_degree_distribution_csv(dist: &BTreeMap<usize, f64>) -> String {
    let mut out = String::from("degree,probability\n");
    for (k, p) in dist {
        out.push_str(&format!("{k},{p}\n"));
    }
    out
}

/// Cumulative form of the degree distribution: fraction with degree <= k.
pub fn write_degree_cdf_csv(dist: &BTreeMap<usize, f64>) -> String {
    let mut out = String::from("degree,cumulative_probability\n");
    let mut acc = 0.0;
    for (k, p) in dist {
        acc += p;
        out.push_str(&format!("{k},{acc}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    const FIG_MELODY: &str = "\
note C 4 1/4
note D 4 1/4
note D 4 1/4
note C 4 1/4
note D 4 1/4
note G 4 1/8
rest 1/8
note G 4 1/4
note G 5 1/4
";

    fn write_corpus(dir: &Path, files: &[(&str, &str)]) -> Vec<PathBuf> {
        for (name, body) in files {
            fs::write(dir.join(name), body).unwrap();
        }
        collect_inputs(dir).unwrap()
    }

    #[test]
    fn single_fixture_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_corpus(dir.path(), &[("fig.mel", FIG_MELODY)]);
        let result = analyze_corpus(&paths, &CorpusConfig::default()).unwrap();
        assert_eq!(result.rows.len(), 1);
        assert_eq!(result.failures.len(), 0);
        let row = &result.rows[0];
        assert_eq!((row.node_count, row.edge_count, row.length), (6, 7, 9));
        assert_eq!(row.name, "fig");
        assert!((row.density - 7.0 / 36.0).abs() < 1e-15);
    }

    #[test]
    fn empty_directory_is_a_corpus_error() {
        let dir = tempfile::tempdir().unwrap();
        let paths = collect_inputs(dir.path()).unwrap();
        let err = analyze_corpus(&paths, &CorpusConfig::default()).unwrap_err();
        assert!(matches!(err, Error::CorpusEmpty(_)), "{err}");
    }

    #[test]
    fn failures_are_recorded_not_dropped() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_corpus(
            dir.path(),
            &[
                ("bad.mel", "note X 4 1/4"),
                ("empty.mel", "# nothing\n"),
                ("good.mel", FIG_MELODY),
            ],
        );
        assert_eq!(paths.len(), 3);
        let result = analyze_corpus(&paths, &CorpusConfig::default()).unwrap();
        assert_eq!(result.rows.len(), 1);
        assert_eq!(result.failures.len(), 2);
        assert_eq!(result.rows.len() + result.failures.len(), paths.len());
        assert!(result.failures[0].path.ends_with("bad.mel"));
        // all-failing corpus escalates to an error
        let all_bad = [paths[0].clone()];
        assert!(matches!(
            analyze_corpus(&all_bad, &CorpusConfig::default()),
            Err(Error::CorpusEmpty(_))
        ));
    }

    #[test]
    fn rerun_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_corpus(
            dir.path(),
            &[
                ("a.mel", FIG_MELODY),
                ("b.mel", "note C 4 1/4\nnote E 4 1/4\nnote G 4 1/4\nnote C 4 1/4\n"),
                ("c.mel", "note A 3 1/8\nnote B 3 1/8\nnote A 3 1/8\nrest 1/4\nnote A 3 1/8\n"),
            ],
        );
        let config = CorpusConfig {
            ensemble_size: 5,
            ..CorpusConfig::default()
        };
        let first = write_corpus_csv(&analyze_corpus(&paths, &config).unwrap().rows);
        let second = write_corpus_csv(&analyze_corpus(&paths, &config).unwrap().rows);
        assert_eq!(first, second);
        assert!(first.starts_with("name,length,node_count,edge_count"));
        // rows are name-sorted
        let names: Vec<&str> = first
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap())
            .collect();
        assert_eq!(names, ["a", "b", "c"]);
    }

    #[test]
    fn remove_rests_flag_changes_counts() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_corpus(dir.path(), &[("fig.mel", FIG_MELODY)]);
        let config = CorpusConfig {
            remove_rests: true,
            ensemble_size: 5,
            ..CorpusConfig::default()
        };
        let result = analyze_corpus(&paths, &config).unwrap();
        assert_eq!(result.rows[0].node_count, 5);
        assert_eq!(result.rows[0].edge_count, 5);
        assert_eq!(result.rows[0].length, 0);
    }

    fn rows_with(values: &[f64]) -> Vec<CorpusRow> {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_corpus(dir.path(), &[("fig.mel", FIG_MELODY)]);
        let config = CorpusConfig {
            ensemble_size: 2,
            ..CorpusConfig::default()
        };
        let template = analyze_corpus(&paths, &config).unwrap().rows.pop().unwrap();
        values
            .iter()
            .map(|v| CorpusRow {
                density: *v,
                ..template.clone()
            })
            .collect()
    }

    #[test]
    fn histogram_hand_example() {
        let rows = rows_with(&[2.0, 2.0, 4.0]);
        let summary = summarize(&rows, "density", 2).unwrap();
        assert_eq!(summary.n, 3);
        assert_eq!(summary.histogram.len(), 2);
        let width = 1.0;
        assert_eq!(summary.histogram[0].lower, 2.0);
        assert!((summary.histogram[0].density - 2.0 / 3.0 / width).abs() < 1e-12);
        assert!((summary.histogram[1].density - 1.0 / 3.0 / width).abs() < 1e-12);
        let mass: f64 = summary.histogram.iter().map(|b| b.density * b.width).sum();
        assert!((mass - 1.0).abs() < 1e-6);
        assert_eq!(summary.cdf, vec![(2.0, 2.0 / 3.0), (4.0, 1.0)]);
    }

    #[test]
    fn degenerate_summaries() {
        let single = summarize(&rows_with(&[3.5]), "density", 20).unwrap();
        assert_eq!(single.histogram.len(), 1);
        assert_eq!(single.histogram[0].density * single.histogram[0].width, 1.0);
        assert_eq!(single.cdf, vec![(3.5, 1.0)]);
        let constant = summarize(&rows_with(&[2.0, 2.0, 2.0]), "density", 5).unwrap();
        assert_eq!(constant.histogram.len(), 1);
        assert_eq!(constant.cdf, vec![(2.0, 1.0)]);
    }

    #[test]
    fn summarize_errors() {
        let rows = rows_with(&[1.0]);
        assert!(summarize(&rows, "bogus_metric", 5).is_err());
        assert!(summarize(&rows, "density", 0).is_err());
        let mut no_sigma = rows.clone();
        for row in &mut no_sigma {
            row.sigma = None;
        }
        let err = summarize(&no_sigma, "sigma", 5).unwrap_err();
        assert!(err.to_string().contains("sigma"), "{err}");
    }

    #[test]
    fn csv_helpers_have_headers() {
        let dist: BTreeMap<usize, f64> = [(1, 0.25), (2, 0.75)].into();
        let csv = write_degree_distribution_csv(&dist);
        assert_eq!(csv, "degree,probability\n1,0.25\n2,0.75\n");
        let cdf = write_degree_cdf_csv(&dist);
        assert!(cdf.ends_with("2,1\n"));
        let failures = vec![CorpusFailure {
            path: "x.mel".into(),
            error: "parse error at line 1: boom".into(),
        }];
        assert!(write_failures_csv(&failures).starts_with("path,error\n"));
    }
}
