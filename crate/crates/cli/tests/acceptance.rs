//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Set `RECIPEDB_EXPORT` to a full RecipeDB export (JSON Lines or CSV) to run
//! the dataset replication check; without it that check is skipped.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use culinaria::authenticity::{prevalence, relative_prevalence, Denominator, MeanOver};
use culinaria::clustering::{
    cosine, euclidean, hac, jaccard, kmeans::wcss, kmeans_elbow, CondensedDistanceMatrix, Dendrogram, DistanceTag,
    Linkage, Merge,
};
use culinaria::corpus::{build_transactions, load_corpus, ClassSet, CorpusFormat, ItemId, RecipeRecord};
use culinaria::evaluation::{compare, cophenetic_matrix};
use culinaria::geo::haversine;
use culinaria::mining::{brute_force_frequent, fp_growth, FrequentPattern, MiningParams};
use culinaria::patterns::{build_vocabulary, score_patterns, vectorize_all};
use culinaria::{RegionCoordinates, TransactionDB};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_611;
const ORACLE_DBS: usize = 200;
const ORACLE_BUDGET: Duration = Duration::from_secs(30);
const ZERO_SUM_CORPORA: usize = 100;
const ZERO_SUM_TOL: f64 = 1e-9;
const METRIC_TRIPLES: usize = 500;
const IDENTITY_TOL: f64 = 1e-12;
const RANDOM_MATRICES: usize = 100;
const ELBOW_TOL: f64 = 1e-9;
const HAVERSINE_TOL_KM: f64 = 0.01;
const CORRELATION_TOL: f64 = 1e-9;
const PIPELINE_BUDGET: Duration = Duration::from_secs(5);
const REPLICATION_SUPPORT: f64 = 0.34;
const REPLICATION_TOL: f64 = 0.05;

type Criterion = (&'static str, fn() -> Outcome);

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn random_db(rng: &mut ChaCha8Rng) -> TransactionDB {
    let items = rng.gen_range(1..=12u32);
    let rows = rng.gen_range(1..=50);
    let transactions = (0..rows)
        .map(|_| {
            let len = rng.gen_range(1..=items.min(8));
            (0..len).map(|_| ItemId(rng.gen_range(0..items))).collect()
        })
        .collect();
    TransactionDB::new("random", transactions)
}

fn oracle_suite() -> Vec<(TransactionDB, f64, Vec<FrequentPattern>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let supports = [0.1, 0.2, 0.3, 0.5];
    (0..ORACLE_DBS)
        .map(|i| {
            let db = random_db(&mut rng);
            let support = supports[i % supports.len()];
            let mined = fp_growth(&db, &MiningParams::with_support(support)).expect("valid parameters");
            (db, support, mined)
        })
        .collect()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let suite = oracle_suite();
    let mismatches = suite
        .iter()
        .filter(|(db, support, mined)| &brute_force_frequent(db, *support).expect("≤12 items") != mined)
        .count();
    let elapsed = start.elapsed();
    check(
        mismatches == 0 && elapsed < ORACLE_BUDGET,
        format!("{ORACLE_DBS} random DBs, {mismatches} mismatches, {:.2}s (limit 30s)", elapsed.as_secs_f64()),
    )
}

fn anti_monotonicity() -> Outcome {
    let mut violations = 0;
    let mut checked = 0;
    for (_, _, mined) in oracle_suite() {
        let counts: BTreeMap<&[ItemId], usize> = mined.iter().map(|p| (p.items.as_slice(), p.count)).collect();
        for p in mined.iter().filter(|p| p.items.len() > 1) {
            for skip in 0..p.items.len() {
                let mut sub = p.items.clone();
                sub.remove(skip);
                checked += 1;
                if !counts.get(sub.as_slice()).is_some_and(|&c| c >= p.count) {
                    violations += 1;
                }
            }
        }
    }
    check(violations == 0, format!("{checked} subset checks, {violations} violations"))
}

fn recipe(id: usize, region: &str, ingredients: &[String]) -> RecipeRecord {
    RecipeRecord::new(&id.to_string(), region, ingredients.to_vec(), vec![], vec![])
}

fn authenticity_zero_sum() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst: f64 = 0.0;
    for _ in 0..ZERO_SUM_CORPORA {
        let cuisines = rng.gen_range(2..=6);
        let n = rng.gen_range(cuisines..=200);
        let records: Vec<RecipeRecord> = (0..n)
            .map(|i| {
                let region = format!("C{}", if i < cuisines { i } else { rng.gen_range(0..cuisines) });
                let items: Vec<String> =
                    (0..rng.gen_range(1..6)).map(|_| format!("i{}", rng.gen_range(0..20))).collect();
                recipe(i, &region, &items)
            })
            .collect();
        for denominator in [Denominator::PerCuisine, Denominator::Global] {
            for mean in [MeanOver::Others, MeanOver::All] {
                let p = prevalence(&records, ClassSet::all(), denominator).expect("nonempty corpus");
                let rel = relative_prevalence(&p, mean).expect("≥2 cuisines");
                for i in 0..rel.items().len() {
                    worst = worst.max(rel.row(i).iter().sum::<f64>().abs());
                }
            }
        }
    }

    // Onion prevalence 3/4, 1/4 and 2/4 across three cuisines.
    let onion = |with: bool| if with { vec!["onion".to_string()] } else { vec!["rice".to_string()] };
    let mut worked = Vec::new();
    for (region, with) in [("A", 3), ("B", 1), ("C", 2)] {
        for k in 0..4 {
            worked.push(recipe(worked.len(), region, &onion(k < with)));
        }
    }
    let p = prevalence(&worked, ClassSet::all(), Denominator::PerCuisine).expect("worked example");
    let rel = relative_prevalence(&p, MeanOver::Others).expect("3 cuisines");
    let row = rel.row(p.item_index("ingredient:onion").expect("onion")).to_vec();
    let exact = row == [0.375, -0.375, 0.0];
    check(
        worst < ZERO_SUM_TOL && exact,
        format!("{ZERO_SUM_CORPORA} corpora x 4 modes, max |row sum| {worst:.2e} (tol 1e-9); worked example {row:?}"),
    )
}

fn metric_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut failures = Vec::new();
    for t in 0..METRIC_TRIPLES {
        let dim = rng.gen_range(1..=24);
        let mut vector = || -> Vec<f64> { (0..dim).map(|_| f64::from(rng.gen_range(0..2u8))).collect() };
        let (a, b, c) = (vector(), vector(), vector());
        for (name, f) in [("jaccard", jaccard as fn(&[f64], &[f64]) -> f64), ("euclidean", euclidean)] {
            let symmetric = f(&a, &b) == f(&b, &a);
            let identity = f(&a, &a).abs() <= IDENTITY_TOL && (a == b || f(&a, &b) > 0.0);
            let triangle = f(&a, &c) <= f(&a, &b) + f(&b, &c) + IDENTITY_TOL;
            if !(symmetric && identity && triangle) {
                failures.push(format!("{name} triple {t}"));
            }
        }
        if let (Some(ab), Some(ba), Some(aa)) = (cosine(&a, &b), cosine(&b, &a), cosine(&a, &a)) {
            if (ab - ba).abs() > IDENTITY_TOL || aa.abs() > IDENTITY_TOL {
                failures.push(format!("cosine triple {t}"));
            }
        }
        let weighted: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.01..1.0)).collect();
        let zero_self = jaccard(&weighted, &weighted).abs() <= IDENTITY_TOL
            && euclidean(&weighted, &weighted).abs() <= IDENTITY_TOL
            && cosine(&weighted, &weighted).is_some_and(|d| d.abs() <= IDENTITY_TOL);
        if !zero_self {
            failures.push(format!("identical vectors triple {t}"));
        }
    }
    check(
        failures.is_empty(),
        format!(
            "{METRIC_TRIPLES} triples, {} failures {:?}",
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn random_metric_matrix(rng: &mut ChaCha8Rng) -> CondensedDistanceMatrix {
    let n = rng.gen_range(3..=15);
    let dim = rng.gen_range(1..=5);
    let points: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.gen_range(-50.0..50.0)).collect()).collect();
    let labels = (0..n).map(|i| format!("L{i:02}")).collect();
    CondensedDistanceMatrix::from_fn(labels, DistanceTag::Given, |i, j| euclidean(&points[i], &points[j]))
        .expect("finite distances")
}

fn shape(tree: &Dendrogram) -> BTreeSet<(Vec<String>, u64)> {
    tree.clusters()
        .iter()
        .zip(tree.merges())
        .map(|(members, m)| {
            let mut names: Vec<String> = members.iter().map(|&i| tree.labels()[i].clone()).collect();
            names.sort();
            (names, (m.height * 1e6).round() as u64)
        })
        .collect()
}

fn hac_correctness() -> Outcome {
    let labels = ["A", "B", "C"].iter().map(|s| s.to_string()).collect();
    let d = CondensedDistanceMatrix::new(labels, vec![1.0, 4.0, 5.0], DistanceTag::Given).expect("valid");
    let heights: Vec<f64> = hac(&d, Linkage::Average).expect("3 points").merges().iter().map(|m| m.height).collect();
    let example = heights == [1.0, 4.5];

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let (mut decreasing, mut non_isomorphic) = (0, 0);
    for r in 0..RANDOM_MATRICES {
        let d = random_metric_matrix(&mut rng);
        let linkage = Linkage::ALL[r % 3];
        let tree = hac(&d, linkage).expect("≥3 points");
        if tree.merges().windows(2).any(|w| w[1].height < w[0].height) {
            decreasing += 1;
        }
        let mut order: Vec<usize> = (0..d.len()).collect();
        order.shuffle(&mut rng);
        let perm_labels = order.iter().map(|&i| d.labels()[i].clone()).collect();
        let perm = CondensedDistanceMatrix::from_fn(perm_labels, DistanceTag::Given, |i, j| d.get(order[i], order[j]))
            .expect("finite distances");
        if shape(&hac(&perm, linkage).expect("≥3 points")) != shape(&tree) {
            non_isomorphic += 1;
        }
    }
    check(
        example && decreasing == 0 && non_isomorphic == 0,
        format!(
            "3-point heights {heights:?}; {RANDOM_MATRICES} random matrices: {decreasing} non-monotone, {non_isomorphic} permutation mismatches"
        ),
    )
}

fn mini_corpus_points() -> Vec<Vec<f64>> {
    let records = load_corpus(&common::mini_corpus(), CorpusFormat::Jsonl).expect("bundled corpus");
    let set = build_transactions(&records, ClassSet::all()).expect("bundled corpus");
    let mut all = BTreeMap::new();
    for (cuisine, db) in &set.dbs {
        let mined = fp_growth(db, &MiningParams::default()).expect("default parameters");
        all.insert(cuisine.clone(), score_patterns(&mined, &set.dictionary).expect("known items"));
    }
    let vocab = build_vocabulary(&all).expect("nonempty vocabulary");
    vectorize_all(&all, &vocab, false).expect("known patterns").iter().map(|v| v.values()).collect()
}

fn elbow_monotonicity() -> Outcome {
    let points = mini_corpus_points();
    let n = points.len();
    let results = kmeans_elbow(&points, 1..=n, 10, SEED).expect("valid k range");
    let curve: Vec<f64> = results.iter().map(|r| r.wcss).collect();
    let monotone = curve.windows(2).all(|w| w[1] <= w[0]);
    let dim = points[0].len();
    let mean: Vec<f64> = (0..dim).map(|d| points.iter().map(|p| p[d]).sum::<f64>() / n as f64).collect();
    let total = wcss(&points, &[mean], &vec![0; n]);
    let k1 = (curve[0] - total).abs() <= ELBOW_TOL;
    let kn = curve[n - 1] == 0.0;
    check(monotone && k1 && kn, format!("k=1..{n} wcss {curve:?}; total sum of squares {total}"))
}

fn haversine_values() -> Outcome {
    let at = |lat, lon| RegionCoordinates::new("p", lat, lon).expect("in range");
    let quarter = haversine(&at(0.0, 0.0), &at(0.0, 90.0));
    let half = haversine(&at(0.0, 0.0), &at(0.0, 180.0));
    check(
        (quarter - 10007.543).abs() <= HAVERSINE_TOL_KM && (half - 20015.087).abs() <= HAVERSINE_TOL_KM,
        format!("quarter {quarter:.3} km, half {half:.3} km (tol 0.01 km)"),
    )
}

fn four_leaf(pairs: [(usize, usize); 2]) -> Dendrogram {
    let labels = ["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect();
    let merges = vec![
        Merge { left: pairs[0].0, right: pairs[0].1, height: 1.0, size: 2 },
        Merge { left: pairs[1].0, right: pairs[1].1, height: 1.0, size: 2 },
        Merge { left: 4, right: 5, height: 2.0, size: 4 },
    ];
    Dendrogram::new(labels, merges, Linkage::Average).expect("valid tree")
}

fn tree_comparison() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let (mut self_failures, mut ultrametric_failures) = (0, 0);
    for r in 0..RANDOM_MATRICES {
        let tree = hac(&random_metric_matrix(&mut rng), Linkage::ALL[r % 3]).expect("≥3 points");
        let cmp = compare(&tree, &tree).expect("same leaves");
        if (cmp.cophenetic_correlation - 1.0).abs() > CORRELATION_TOL || cmp.robinson_foulds != 0 {
            self_failures += 1;
        }
        let c = cophenetic_matrix(&tree);
        let n = c.len();
        let ultrametric = (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| c.get(i, j) <= c.get(i, k).max(c.get(k, j)))));
        if !ultrametric {
            ultrametric_failures += 1;
        }
    }
    let rf = compare(&four_leaf([(0, 1), (2, 3)]), &four_leaf([(0, 2), (1, 3)])).expect("same leaves").robinson_foulds;
    check(
        self_failures == 0 && ultrametric_failures == 0 && rf == 2,
        format!(
            "{RANDOM_MATRICES} trees: {self_failures} imperfect self-comparisons, {ultrametric_failures} non-ultrametric; 4-leaf RF {rf}"
        ),
    )
}

fn golden_pipeline() -> Outcome {
    let mut problems = Vec::new();
    let mut slowest = Duration::ZERO;
    for threads in [1, 1, 8, 8] {
        let dir = tempfile::tempdir().expect("temp dir");
        let start = Instant::now();
        if let Err(e) = common::pipeline(&common::mini_corpus(), dir.path(), threads) {
            return Outcome::Fail(e);
        }
        slowest = slowest.max(start.elapsed());
        for (output, golden) in common::GOLDEN {
            if common::read(dir.path(), output) != common::golden(golden) {
                problems.push(format!("{output} (threads {threads})"));
            }
        }
    }
    check(
        problems.is_empty() && slowest < PIPELINE_BUDGET,
        format!(
            "4 runs (threads 1,1,8,8), {} golden mismatches {problems:?}, slowest {:.2}s (limit 5s)",
            problems.len(),
            slowest.as_secs_f64()
        ),
    )
}

fn dataset_replication() -> Outcome {
    let Some(path) = std::env::var_os("RECIPEDB_EXPORT") else {
        return Outcome::Skip("RECIPEDB_EXPORT not set; point it at a RecipeDB export to run this check".into());
    };
    let path = Path::new(&path);
    let records = match load_corpus(path, CorpusFormat::from_path(path)) {
        Ok(r) => r,
        Err(e) => return Outcome::Fail(format!("{}: {e}", path.display())),
    };
    let korean: Vec<RecipeRecord> =
        records.into_iter().filter(|r| r.region.to_ascii_lowercase().contains("korea")).collect();
    if korean.is_empty() {
        return Outcome::Fail("no Korean recipes in the export".into());
    }
    let set = build_transactions(&korean, ClassSet::all()).expect("nonempty corpus");
    let mut best: Option<(f64, String)> = None;
    for db in set.dbs.values() {
        let mined = fp_growth(db, &MiningParams::default()).expect("default parameters");
        for p in &mined {
            let names: Vec<&str> = p.items.iter().map(|&id| set.dictionary.name(id)).collect();
            let both = names.iter().any(|n| n.contains("soy sauce")) && names.iter().any(|n| n.contains("sesame oil"));
            if both && best.as_ref().is_none_or(|(s, _)| p.support > *s) {
                best = Some((p.support, names.join("+")));
            }
        }
    }
    match best {
        Some((support, pattern)) => check(
            (support - REPLICATION_SUPPORT).abs() <= REPLICATION_TOL,
            format!("{} Korean recipes; best soy sauce + sesame oil pattern `{pattern}` support {support:.6} (target 0.34 ± 0.05)", korean.len()),
        ),
        None => Outcome::Fail(format!("{} Korean recipes; no frequent pattern with soy sauce and sesame oil", korean.len())),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("anti-monotonicity", anti_monotonicity),
        ("authenticity zero-sum", authenticity_zero_sum),
        ("metric axioms", metric_axioms),
        ("hac correctness", hac_correctness),
        ("elbow monotonicity", elbow_monotonicity),
        ("haversine", haversine_values),
        ("tree comparison", tree_comparison),
        ("golden pipeline", golden_pipeline),
        ("dataset replication", dataset_replication),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Outcome::Pass(detail) => println!("PASS  {name}: {detail}"),
            Outcome::Skip(detail) => println!("SKIP  {name}: {detail}"),
            Outcome::Fail(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
