use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use culinaria::authenticity::{self, Denominator, MeanOver};
use culinaria::clustering::{self, hac, pairwise_rows, Dendrogram, Linkage, Metric};
use culinaria::corpus::{self, build_transactions, ClassSet, CorpusFormat, RecipeRecord};
use culinaria::evaluation::{compare_with, Correlation};
use culinaria::geo;
use culinaria::mining::{mine_all, MiningParams};
use culinaria::patterns::{self, score_patterns, CuisineVector, PatternVocabulary, ScoredPattern};
use culinaria::report::{self, SummaryRow};

use crate::error::{CliError, CliResult, InputContext};
use crate::output::{read_input, OutDir};
use crate::{AuthenticityArgs, Cli, ClusterArgs, Command, CompareArgs, ElbowArgs, GeoArgs, MineArgs};

const BUNDLED_REGIONS: &str = include_str!("../../../data/regions.csv");
const ELBOW_MAX_DEFAULT_K: usize = 10;

pub fn run(cli: &Cli) -> CliResult<()> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build().map_err(CliError::internal)?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    let out = OutDir::new(cli.out.clone());
    match &cli.command {
        Command::Mine(args) => mine(cli, &out, args),
        Command::Cluster(args) => cluster(&out, args),
        Command::Authenticity(args) => authenticity(cli, &out, args),
        Command::Geo(args) => geo(cli, &out, args),
        Command::Elbow(args) => elbow(cli, &out, args),
        Command::Compare(args) => compare(&out, args),
    }
}

fn load_records(cli: &Cli) -> CliResult<Vec<RecipeRecord>> {
    let path = cli.input.as_deref().ok_or_else(|| CliError::input(anyhow!("--input is required for this command")))?;
    let format = match &cli.format {
        Some(f) => f.parse::<CorpusFormat>().input("--format")?,
        None => CorpusFormat::from_path(path),
    };
    corpus::load_corpus(path, format).input("loading corpus")
}

fn parse_classes(text: &str) -> CliResult<ClassSet> {
    text.parse::<ClassSet>().input("--classes")
}

fn parse_linkage(text: &str) -> CliResult<Linkage> {
    text.parse::<Linkage>().input("--linkage")
}

fn parse_metrics(text: &str) -> CliResult<Vec<Metric>> {
    if text.eq_ignore_ascii_case("all") {
        return Ok(Metric::ALL.to_vec());
    }
    let mut metrics = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let metric = part.parse::<Metric>().input("--metric")?;
        if !metrics.contains(&metric) {
            metrics.push(metric);
        }
    }
    if metrics.is_empty() {
        return Err(CliError::input(anyhow!("--metric: no metric given")));
    }
    Ok(metrics)
}

/// Accepts `A..B`, `A..=B` and `A-B`, all inclusive.
fn parse_k_range(text: &str) -> CliResult<RangeInclusive<usize>> {
    let (lo, hi) = text
        .split_once("..=")
        .or_else(|| text.split_once(".."))
        .or_else(|| text.split_once('-'))
        .unwrap_or((text, text));
    let parse = |s: &str| s.trim().parse::<usize>().input(format!("--k-range `{text}`"));
    Ok(parse(lo)?..=parse(hi)?)
}

fn write_tree(out: &OutDir, dir: &str, tree: &Dendrogram) -> CliResult<()> {
    out.write(Path::new(dir).join("tree.newick"), &tree.to_newick())?;
    out.write(Path::new(dir).join("linkage.json"), &tree.to_linkage_json())?;
    Ok(())
}

fn mine(cli: &Cli, out: &OutDir, args: &MineArgs) -> CliResult<()> {
    let params = MiningParams { min_support: args.min_support, max_len: args.max_len, ..MiningParams::default() };
    params.validate().input("mining parameters")?;
    let classes = parse_classes(&args.classes)?;
    let records = load_records(cli)?;
    let set = build_transactions(&records, classes).input("encoding transactions")?;
    let mined = mine_all(&set.dbs, &params).input("mining")?;

    let cuisines: Vec<String> = set.dbs.keys().cloned().collect();
    let stems = report::file_stems(&cuisines);
    let mut summary = Vec::with_capacity(cuisines.len());
    for (cuisine, stem) in cuisines.iter().zip(&stems) {
        let scored = score_patterns(&mined[cuisine], &set.dictionary).map_err(CliError::internal)?;
        out.write(format!("patterns/{stem}.tsv"), &report::patterns_tsv(cuisine, &scored))?;
        summary.push(SummaryRow::new(cuisine, set.dbs[cuisine].recipe_count(), &scored));
    }
    out.write("summary.tsv", &report::summary_tsv(&summary))?;
    Ok(())
}

/// Reads the mine outputs back as patterns grouped by cuisine.
fn load_patterns(out: &OutDir) -> CliResult<BTreeMap<String, Vec<ScoredPattern>>> {
    let summary = report::parse_summary_tsv(&out.read("summary.tsv", "mine")?).input("summary.tsv")?;
    let cuisines: Vec<String> = summary.iter().map(|r| r.cuisine.clone()).collect();
    let mut all = BTreeMap::new();
    for (row, stem) in summary.iter().zip(report::file_stems(&cuisines)) {
        let rel = format!("patterns/{stem}.tsv");
        let rows = report::parse_patterns_tsv(&out.read(&rel, "mine")?).input(&rel)?;
        if let Some((other, _)) = rows.iter().find(|(c, _)| c != &row.cuisine) {
            return Err(CliError::input(anyhow!("{rel}: row for `{other}`, expected `{}`", row.cuisine)));
        }
        if rows.len() != row.pattern_count {
            return Err(CliError::input(anyhow!(
                "{rel}: {} patterns but summary.tsv lists {}",
                rows.len(),
                row.pattern_count
            )));
        }
        all.insert(row.cuisine.clone(), rows.into_iter().map(|(_, p)| p).collect());
    }
    Ok(all)
}

fn pattern_vectors(out: &OutDir, weighted: bool) -> CliResult<(PatternVocabulary, Vec<CuisineVector>)> {
    let all = load_patterns(out)?;
    let vocab = patterns::build_vocabulary(&all).input("building the pattern vocabulary")?;
    let vectors = patterns::vectorize_all(&all, &vocab, weighted).input("vectorizing cuisines")?;
    Ok((vocab, vectors))
}

fn cluster(out: &OutDir, args: &ClusterArgs) -> CliResult<()> {
    let metrics = parse_metrics(&args.metric)?;
    let linkage = parse_linkage(&args.linkage)?;
    let (vocab, vectors) = pattern_vectors(out, args.weighted)?;
    let mut trees = Vec::with_capacity(metrics.len());
    for metric in metrics {
        let d = clustering::pairwise_distances(&vectors, metric).input(format!("{metric} distances"))?;
        trees.push((metric, hac(&d, linkage).input("clustering")?));
    }
    out.write("vocab.tsv", &report::vocab_tsv(&vocab))?;
    out.write("vectors.tsv", &report::vectors_tsv(&vectors))?;
    for (metric, tree) in trees {
        write_tree(out, metric.as_str(), &tree)?;
    }
    Ok(())
}

fn authenticity(cli: &Cli, out: &OutDir, args: &AuthenticityArgs) -> CliResult<()> {
    let classes = parse_classes(&args.classes)?;
    let metric = args.metric.parse::<Metric>().input("--metric")?;
    let linkage = parse_linkage(&args.linkage)?;
    let denominator = if args.global_denominator { Denominator::Global } else { Denominator::PerCuisine };
    let mean = if args.mean_all { MeanOver::All } else { MeanOver::Others };
    let records = load_records(cli)?;
    let p = authenticity::prevalence(&records, classes, denominator).input("prevalence")?;
    let rel = authenticity::relative_prevalence(&p, mean).input("relative prevalence")?;
    let prints = rel
        .cuisines()
        .iter()
        .map(|c| authenticity::fingerprint(&rel, c, args.top))
        .collect::<Result<Vec<_>, _>>()
        .input("--top")?;

    let labels = rel.cuisines().to_vec();
    let rows: Vec<Vec<f64>> = if args.raw_prevalence {
        (0..labels.len()).map(|c| p.column(c)).collect()
    } else {
        (0..labels.len()).map(|c| rel.column(c)).collect()
    };
    let d = pairwise_rows(labels, &rows, metric).input(format!("{metric} distances"))?;
    let tree = hac(&d, linkage).input("clustering")?;

    out.write("prevalence.csv", &report::prevalence_csv(&p))?;
    out.write("authenticity.csv", &report::authenticity_csv(&rel))?;
    out.write("fingerprints.tsv", &report::fingerprints_tsv(&prints))?;
    write_tree(out, "authenticity", &tree)?;
    Ok(())
}

fn geo(cli: &Cli, out: &OutDir, args: &GeoArgs) -> CliResult<()> {
    let linkage = parse_linkage(&args.linkage)?;
    let coords = match &args.coords {
        Some(path) => geo::parse_regions(read_input(path)?.as_bytes()).input(path.display())?,
        None => geo::parse_regions(BUNDLED_REGIONS.as_bytes()).map_err(CliError::internal)?,
    };
    let cuisines: Option<Vec<String>> = match cli.input {
        Some(_) => {
            let names: BTreeSet<String> = load_records(cli)?.into_iter().map(|r| r.region).collect();
            Some(names.into_iter().collect())
        }
        None => None,
    };
    let tree = geo::geo_tree(&coords, cuisines.as_deref(), linkage).input("geographic tree")?;
    write_tree(out, "geo", &tree)
}

fn elbow(cli: &Cli, out: &OutDir, args: &ElbowArgs) -> CliResult<()> {
    let (_, vectors) = pattern_vectors(out, args.weighted)?;
    let points: Vec<Vec<f64>> = vectors.iter().map(CuisineVector::values).collect();
    let n = points.len();
    let range = match &args.k_range {
        Some(text) => {
            let range = parse_k_range(text)?;
            let (lo, hi) = (*range.start(), *range.end());
            if hi > n && lo <= n {
                log::warn!("k range {lo}..{hi} capped at {n}, the number of cuisines");
                lo..=n
            } else {
                range
            }
        }
        None => 1..=n.clamp(1, ELBOW_MAX_DEFAULT_K),
    };
    let results = clustering::kmeans_elbow(&points, range, args.restarts, cli.seed).input("k-means")?;
    out.write("elbow.csv", &report::elbow_csv(&results))?;
    Ok(())
}

fn load_tree(path: &Path) -> CliResult<Dendrogram> {
    let file: PathBuf = if path.is_dir() { path.join("linkage.json") } else { path.to_path_buf() };
    Dendrogram::from_linkage_json(&read_input(&file)?).input(file.display())
}

fn compare(out: &OutDir, args: &CompareArgs) -> CliResult<()> {
    let left = load_tree(&args.left)?;
    let right = load_tree(&args.right)?;
    let correlation = if args.spearman { Correlation::Spearman } else { Correlation::Pearson };
    let result = compare_with(&left, &right, correlation).input("comparing trees")?;
    let json = result.to_json();
    out.write("comparison.json", &json)?;
    print!("{json}");
    Ok(())
}
