use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, ValueEnum};
use homophily_core::graph::{write_edge_list, write_node_table};
use homophily_core::homophily::{
    bin_counts, defined, global_homophily, histogram, local_homophily_all, BetaGoal,
};
use homophily_core::metrics::{
    baseline_adjust, delta_metrics, summarize, MetricRecord, MulticlassMode, PredictionTable,
};
use homophily_core::rewire::generate as run_generation;
use homophily_core::split::{stratified_split, SplitConfig, SplitTag};
use homophily_core::synth::{sample_sbm, SbmConfig};
use homophily_core::theory::{
    expected_logit_gap, fit_line, model_logit_gap, sweep_alpha, write_sweep_csv, TheoryParams,
};
use serde::Serialize;

use crate::input::{GraphInput, LoadedGraph};
use crate::output::OutputDir;


#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    input: GraphInput,
    /// Histogram bins over [0, 1].
    #[arg(long, default_value_t = 10)]
    bins: usize,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    #[command(flatten)]
    input: GraphInput,
    /// Beta goal shape alpha (> 0).
    #[arg(long)]
    alpha: f64,
    /// Beta goal shape beta (> 0).
    #[arg(long)]
    beta: f64,
    /// Homophily bins over [0, 1].
    #[arg(long, default_value_t = 10)]
    bins: usize,
    /// Seed for every random step.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SplitArgs {
    #[command(flatten)]
    input: GraphInput,
    /// Shift strength; repeat or comma-separate for several splits.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    gamma: Vec<f64>,
    /// Homophily bins over [0, 1].
    #[arg(long, default_value_t = 10)]
    bins: usize,
    /// Share of eligible nodes in the training pool (train + val).
    #[arg(long, default_value_t = 0.8)]
    train_frac: f64,
    /// Share of the training pool held out for validation.
    #[arg(long, default_value_t = 0.2)]
    val_frac: f64,
    /// Seed for every random step.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ModeArg {
    /// Largest one-vs-rest parity over classes.
    OneVsRest,
    /// Largest pairwise parity, conditional on predicting one of the pair.
    ClassPairs,
}

impl From<ModeArg> for MulticlassMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::OneVsRest => MulticlassMode::OneVsRest,
            ModeArg::ClassPairs => MulticlassMode::ClassPairs,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct MetricsArgs {
    /// Predictions CSV with header `node_id,y_true,y_pred,sensitive`.
    #[arg(long)]
    pred: PathBuf,
    /// Predictions of the same model under a shifted split; reports deltas.
    #[arg(long)]
    pred_shifted: Option<PathBuf>,
    /// Baseline predictions; reports model minus baseline.
    #[arg(long)]
    baseline: Option<PathBuf>,
    /// Split CSV (`node_id,split`) used to restrict evaluation.
    #[arg(long)]
    split: Option<PathBuf>,
    /// Split tag to evaluate on when --split is given.
    #[arg(long, default_value = "test", requires = "split")]
    subset: String,
    #[arg(long, value_enum, default_value_t = ModeArg::OneVsRest)]
    mode: ModeArg,
    #[arg(long, default_value = "dataset")]
    dataset: String,
    #[arg(long, default_value = "model")]
    model: String,
    #[arg(long, default_value = "baseline")]
    baseline_model: String,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct TheoryArgs {
    /// Number of nodes.
    #[arg(long, default_value_t = 1000)]
    n: u64,
    /// Nodes with sensitive attribute 1.
    #[arg(long, default_value_t = 500)]
    k: u64,
    /// Degree of every node.
    #[arg(long, default_value_t = 10)]
    degree: u64,
    /// Label homophily.
    #[arg(long, default_value_t = 0.7)]
    h: f64,
    /// Affinity grid; repeat or comma-separate.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true,
          default_value = "-0.3,-0.2,-0.1,0,0.1,0.2,0.3")]
    alpha: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    mu_l: f64,
    #[arg(long, default_value_t = 1.0)]
    mu_s: f64,
    #[arg(long, default_value_t = 0.01)]
    sigma: f64,
    /// Ridge strength; defaults to 1e-6 * n.
    #[arg(long)]
    lambda: Option<f64>,
    /// Monte Carlo trials per grid point.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Seed for every random step.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SbmArgs {
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    classes: usize,
    /// Expected degree.
    #[arg(long, default_value_t = 10.0)]
    degree: f64,
    /// Expected edge homophily.
    #[arg(long, default_value_t = 0.5)]
    homophily: f64,
    /// Probability that the sensitive attribute follows label parity.
    #[arg(long, default_value_t = 0.0)]
    sensitive_agreement: f64,
    /// Seed for every random step.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

fn ratio_csv(ratios: &[Option<f64>]) -> String {
    let mut text = String::from("node_id,local_homophily\n");
    for (node, r) in ratios.iter().enumerate() {
        match r {
            Some(r) => writeln!(text, "{node},{r}"),
            None => writeln!(text, "{node},"),
        }
        .expect("writing to a string");
    }
    text
}

fn id_map_csv(loaded: &LoadedGraph) -> Option<String> {
    let remap = loaded.remap.as_ref()?;
    let mut text = String::from("node_id,input_id\n");
    for (new, old) in remap.old_of_new().iter().enumerate() {
        writeln!(text, "{new},{old}").expect("writing to a string");
    }
    Some(text)
}

#[derive(Serialize)]
struct AnalyzeSummary {
    nodes: usize,
    edges: usize,
    isolated_nodes: usize,
    global_homophily: f64,
    mean_local_homophily: Option<f64>,
    classes: usize,
    class_histogram: Vec<usize>,
    bins: usize,
    self_loops_dropped: usize,
    duplicates_collapsed: usize,
    renumbered: bool,
}

pub fn analyze(args: &AnalyzeArgs) -> Result<Vec<PathBuf>> {
    let loaded = args.input.load()?;
    let (graph, table) = (&loaded.graph, &loaded.table);
    let ratios = local_homophily_all::<f64>(graph, table)?;
    let defined_ratios = defined(&ratios);
    let hist = histogram(&defined_ratios, args.bins)?;
    let summary = AnalyzeSummary {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        isolated_nodes: ratios.len() - defined_ratios.len(),
        global_homophily: global_homophily(graph, table)?,
        mean_local_homophily: (!defined_ratios.is_empty())
            .then(|| defined_ratios.iter().sum::<f64>() / defined_ratios.len() as f64),
        classes: table.class_count(),
        class_histogram: table.class_histogram(),
        bins: args.bins,
        self_loops_dropped: loaded.self_loops_dropped,
        duplicates_collapsed: loaded.duplicates_collapsed,
        renumbered: loaded.remap.is_some(),
    };

    let out = OutputDir::create(&args.out, "analyze", args)?;
    let mut written = vec![
        out.write_text("ratios.csv", &ratio_csv(&ratios))?,
        out.write_text("histogram.csv", &hist.to_csv())?,
        out.write_json("summary.json", &summary)?,
    ];
    if let Some(map) = id_map_csv(&loaded) {
        written.push(out.write_text("id_map.csv", &map)?);
    }
    Ok(written)
}

pub fn generate(args: &GenerateArgs) -> Result<Vec<PathBuf>> {
    let loaded = args.input.load()?;
    let goal = BetaGoal::new(args.alpha, args.beta)?;
    let run = run_generation(&loaded.graph, &loaded.table, &goal, args.bins, args.seed)?;

    // The log must reproduce the generated graph exactly.
    let replayed = run.log.replay(&loaded.graph).context("replaying the edit log")?;
    ensure!(replayed == run.graph, "edit log replay does not match the generated graph");
    ensure!(run.graph.is_simple(), "generated graph is not simple");

    let out = OutputDir::create(&args.out, "generate", args)?;
    let mut written = vec![
        out.write("generated.edges", |w| Ok(write_edge_list(&run.graph, w)?))?,
        out.write("edits.jsonl", |w| Ok(run.log.write_jsonl(w)?))?,
        out.write_json("report.json", &run.report)?,
        out.write("nodes.csv", |w| Ok(write_node_table(&loaded.table, w)?))?,
        out.write_text("hist_original.csv", &run.original.to_csv())?,
        out.write_text("hist_goal.csv", &run.goal.to_csv())?,
        out.write_text("hist_generated.csv", &run.generated.to_csv())?,
    ];
    if loaded.remap.is_some() {
        // Replay needs the graph the log was recorded against.
        written.push(out.write("input.edges", |w| Ok(write_edge_list(&loaded.graph, w)?))?);
    }
    if let Some(map) = id_map_csv(&loaded) {
        written.push(out.write_text("id_map.csv", &map)?);
    }
    log::info!(
        "emd to goal {:.4} -> {:.4} with {} edits",
        run.report.emd_original_goal,
        run.report.emd_generated_goal,
        run.log.len()
    );
    Ok(written)
}

#[derive(Serialize)]
struct SplitSummary<'a> {
    gamma: f64,
    bins: usize,
    seed: u64,
    train_frac: f64,
    val_frac: f64,
    train: usize,
    val: usize,
    test: usize,
    excluded: usize,
    emd_train_test: f64,
    /// Eligible nodes per homophily bin.
    bin_counts: Vec<usize>,
    per_bin_train_share: &'a [Option<f64>],
}

/// `0` -> `0`, `0.5` -> `0.5`, `3` -> `3`.
fn gamma_tag(gamma: f64) -> String {
    format!("{gamma}")
}

pub fn split(args: &SplitArgs) -> Result<Vec<PathBuf>> {
    ensure!(!args.gamma.is_empty(), "no --gamma given");
    let loaded = args.input.load()?;
    let ratios = local_homophily_all::<f64>(&loaded.graph, &loaded.table)?;
    let out = OutputDir::create(&args.out, "split", args)?;
    let mut written = Vec::new();
    let mut seen = HashSet::new();
    for &gamma in &args.gamma {
        let tag = gamma_tag(gamma);
        if !seen.insert(tag.clone()) {
            continue;
        }
        let config = SplitConfig {
            gamma,
            bins: args.bins,
            train_frac: args.train_frac,
            val_frac: args.val_frac,
            seed: args.seed,
        };
        let assignment = stratified_split(&ratios, &config)?;
        let eligible = ratios.iter().filter(|r| r.is_some()).count();
        let covered = assignment.tags.iter().filter(|&&t| t != SplitTag::Excluded).count();
        ensure!(covered == eligible, "split covers {covered} of {eligible} eligible nodes");

        let summary = SplitSummary {
            gamma,
            bins: args.bins,
            seed: args.seed,
            train_frac: args.train_frac,
            val_frac: args.val_frac,
            train: assignment.count(SplitTag::Train),
            val: assignment.count(SplitTag::Val),
            test: assignment.count(SplitTag::Test),
            excluded: assignment.count(SplitTag::Excluded),
            emd_train_test: assignment.diagnostics.emd_train_test,
            bin_counts: bin_counts(&defined(&ratios), args.bins)?,
            per_bin_train_share: &assignment.diagnostics.per_bin_train_share,
        };
        written.push(out.write(&format!("split_gamma{tag}.csv"), |w| Ok(assignment.write_csv(w)?))?);
        written.push(out.write_json(&format!("split_gamma{tag}.json"), &summary)?);
    }
    Ok(written)
}

fn split_subset(path: &PathBuf, subset: &str) -> Result<HashSet<usize>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let want: SplitTag = subset.parse().map_err(|_| anyhow::anyhow!("unknown subset {subset:?}"))?;
    let mut nodes = HashSet::new();
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "node_id,split" => {}
        _ => bail!("{}: expected header node_id,split", path.display()),
    }
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (node, tag) = line
            .split_once(',')
            .with_context(|| format!("{}:{}: expected two fields", path.display(), i + 2))?;
        let node: usize =
            node.trim().parse().with_context(|| format!("{}:{}: bad node id", path.display(), i + 2))?;
        let tag: SplitTag = tag
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("{}:{}: bad split tag {tag:?}", path.display(), i + 2))?;
        if tag == want {
            nodes.insert(node);
        }
    }
    Ok(nodes)
}

#[derive(Serialize)]
struct ScoredFile {
    record: MetricRecord<f64>,
    per_class_sp: Vec<f64>,
    mode: ModeArg,
}

#[derive(Serialize)]
struct Delta {
    dataset: String,
    model: String,
    subset: String,
    delta_f1: f64,
    delta_sp: f64,
}

pub fn metrics(args: &MetricsArgs) -> Result<Vec<PathBuf>> {
    let subset = args.split.as_ref().map(|p| split_subset(p, &args.subset)).transpose()?;
    let subset_name = if subset.is_some() { args.subset.clone() } else { "all".to_string() };
    let score = |path: &PathBuf, model: &str| -> Result<ScoredFile> {
        let mut table = PredictionTable::load_csv(path)?;
        if let Some(nodes) = &subset {
            table = table.with_subset(nodes);
        }
        let summary = summarize::<f64>(&table, args.mode.into())
            .with_context(|| format!("scoring {}", path.display()))?;
        Ok(ScoredFile {
            record: MetricRecord {
                dataset: args.dataset.clone(),
                model: model.to_string(),
                subset: subset_name.clone(),
                n_eval: summary.n_eval,
                f1: summary.f1,
                sp: summary.sp,
            },
            per_class_sp: summary.per_class_sp,
            mode: args.mode,
        })
    };

    let out = OutputDir::create(&args.out, "metrics", args)?;
    let main = score(&args.pred, &args.model)?;
    let mut written = vec![out.write_json("metrics.json", &main)?];
    if let Some(shifted) = &args.pred_shifted {
        let other = score(shifted, &args.model)?;
        let (delta_f1, delta_sp) = delta_metrics(&main.record, &other.record)?;
        written.push(out.write_json("metrics_shifted.json", &other)?);
        written.push(out.write_json(
            "delta.json",
            &Delta {
                dataset: args.dataset.clone(),
                model: args.model.clone(),
                subset: subset_name.clone(),
                delta_f1,
                delta_sp,
            },
        )?);
    }
    if let Some(baseline) = &args.baseline {
        let base = score(baseline, &args.baseline_model)?;
        let adjusted = baseline_adjust(&main.record, &base.record)?;
        written.push(out.write_json("metrics_baseline.json", &base)?);
        written.push(out.write_json("adjusted.json", &adjusted)?);
    }
    Ok(written)
}

#[derive(Serialize)]
struct TheorySummary {
    params: TheoryParams<f64>,
    /// Gap of the published closed form at each grid point.
    closed_form: Vec<f64>,
    /// Exact expected gap of the fitted two-dimensional model.
    model_gap: Vec<f64>,
    slope: f64,
    intercept: f64,
    r2: f64,
    skipped: Vec<f64>,
}

pub fn theory(args: &TheoryArgs) -> Result<Vec<PathBuf>> {
    ensure!(!args.alpha.is_empty(), "empty --alpha grid");
    let params = TheoryParams {
        n: args.n,
        k: args.k,
        d: args.degree,
        h: args.h,
        alpha: args.alpha[0],
        mu_l: args.mu_l,
        mu_s: args.mu_s,
        sigma: args.sigma,
        lambda: args.lambda.unwrap_or(1e-6 * args.n as f64),
    };
    let rows = sweep_alpha(&params, &args.alpha, args.trials, args.seed)?;
    ensure!(!rows.is_empty(), "no valid point on the --alpha grid");
    let kept: Vec<f64> = rows.iter().map(|r| r.alpha).collect();
    let skipped = args.alpha.iter().copied().filter(|a| !kept.contains(a)).collect();
    let closed_form: Vec<f64> = rows.iter().map(|r| r.closed_form).collect();
    let model_gap = kept
        .iter()
        .map(|&a| model_logit_gap(&params.with_alpha(a)))
        .collect::<Result<Vec<_>, _>>()?;
    for (row, &a) in rows.iter().zip(&kept) {
        ensure!(row.closed_form == expected_logit_gap(&params.with_alpha(a))?, "closed form mismatch");
    }
    let (slope, intercept, r2) = fit_line(&kept, &closed_form);
    let summary = TheorySummary { params, closed_form, model_gap, slope, intercept, r2, skipped };

    let out = OutputDir::create(&args.out, "theory", args)?;
    Ok(vec![
        out.write("sweep.csv", |w| Ok(write_sweep_csv(&rows, w)?))?,
        out.write_json("params.json", &summary)?,
    ])
}

#[derive(Serialize)]
struct SbmSummary {
    config: SbmConfig,
    nodes: usize,
    edges: usize,
    global_homophily: f64,
    degree_histogram: BTreeMap<usize, usize>,
}

pub fn sbm(args: &SbmArgs) -> Result<Vec<PathBuf>> {
    let mut config = SbmConfig::balanced(args.n, args.classes, args.degree, args.homophily)?;
    config.sensitive_agreement = args.sensitive_agreement;
    let (graph, table) = sample_sbm(&config, args.seed)?;
    let mut degree_histogram = BTreeMap::new();
    for d in graph.degrees() {
        *degree_histogram.entry(d).or_insert(0) += 1;
    }
    let summary = SbmSummary {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        global_homophily: global_homophily(&graph, &table)?,
        degree_histogram,
        config,
    };
    let out = OutputDir::create(&args.out, "sbm", args)?;
    Ok(vec![
        out.write("graph.edges", |w| Ok(write_edge_list(&graph, w)?))?,
        out.write("nodes.csv", |w| Ok(write_node_table(&table, w)?))?,
        out.write_json("sbm.json", &summary)?,
    ])
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_tags() {
        assert_eq!(gamma_tag(0.0), "0");
        assert_eq!(gamma_tag(3.0), "3");
        assert_eq!(gamma_tag(0.5), "0.5");
    }

    #[test]
    fn subset_from_split_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        fs::write(&path, "node_id,split\n0,test\n1,train\n\n2,test\n3,excluded\n").unwrap();
        assert_eq!(split_subset(&path, "test").unwrap(), HashSet::from([0, 2]));
        assert!(split_subset(&path, "holdout").is_err());
        fs::write(&path, "node,split\n0,test\n").unwrap();
        assert!(split_subset(&path, "test").is_err());
        fs::write(&path, "node_id,split\n0,later\n").unwrap();
        assert!(split_subset(&path, "test").is_err());
    }
}
