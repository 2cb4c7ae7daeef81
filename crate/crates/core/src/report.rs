//! Text formats for pipeline outputs. Floats are always printed with six
//! decimals so outputs are byte-stable across platforms.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::authenticity::{Fingerprint, PrevalenceMatrix, RelativePrevalenceMatrix};
use crate::clustering::KMeansResult;
use crate::patterns::{CanonicalPattern, CuisineVector, PatternError, PatternVocabulary, ScoredPattern};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

/// `{:.6}` without a negative sign on zero.
pub fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// A file-system friendly name for a cuisine: lowercase ASCII alphanumerics
/// with every other run of characters replaced by `_`.
pub fn file_stem(cuisine: &str) -> String {
    let mut out = String::new();
    for ch in cuisine.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    let trimmed = out.trim_matches('_');
    if trimmed.is_empty() {
        "cuisine".to_string()
    } else {
        trimmed.to_string()
    }
}

/// [`file_stem`] for every cuisine, with `_2`, `_3`, .. appended on collisions
/// in the order given.
pub fn file_stems(cuisines: &[String]) -> Vec<String> {
    let mut used = std::collections::HashSet::new();
    cuisines
        .iter()
        .map(|c| {
            let base = file_stem(c);
            let mut stem = base.clone();
            let mut n = 2;
            while !used.insert(stem.clone()) {
                stem = format!("{base}_{n}");
                n += 1;
            }
            stem
        })
        .collect()
}

/// Patterns ordered by descending support, then text.
pub fn ranked(patterns: &[ScoredPattern]) -> Vec<&ScoredPattern> {
    let mut rows: Vec<&ScoredPattern> = patterns.iter().collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.pattern.cmp(&b.pattern)));
    rows
}

pub const PATTERN_HEADER: &str = "cuisine\tpattern\tsupport\tcount";

pub fn patterns_tsv(cuisine: &str, patterns: &[ScoredPattern]) -> String {
    let mut out = String::from(PATTERN_HEADER);
    out.push('\n');
    for p in ranked(patterns) {
        let _ = writeln!(out, "{cuisine}\t{}\t{}\t{}", p.pattern, fmt6(p.support), p.count);
    }
    out
}

fn split_row(line: &str, line_no: usize, width: usize) -> Result<Vec<&str>, ReportError> {
    let cells: Vec<&str> = line.trim_end_matches('\r').split('\t').collect();
    if cells.len() != width {
        return Err(ReportError::Malformed {
            line: line_no,
            message: format!("expected {width} tab-separated columns, found {}", cells.len()),
        });
    }
    Ok(cells)
}

fn check_header(text: &str, header: &str) -> Result<(), ReportError> {
    match text.lines().next() {
        Some(first) if first.trim_end_matches('\r') == header => Ok(()),
        _ => Err(ReportError::Malformed {
            line: 1,
            message: format!("expected header `{}`", header.replace('\t', "<TAB>")),
        }),
    }
}

fn parse_num<T: std::str::FromStr>(cell: &str, line: usize, what: &str) -> Result<T, ReportError>
where
    T::Err: std::fmt::Display,
{
    cell.parse().map_err(|e| ReportError::Malformed { line, message: format!("{what}: {e}") })
}

/// Reads a pattern TSV back as `(cuisine, pattern)` rows.
pub fn parse_patterns_tsv(text: &str) -> Result<Vec<(String, ScoredPattern)>, ReportError> {
    check_header(text, PATTERN_HEADER)?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let cells = split_row(line, line_no, 4)?;
        rows.push((
            cells[0].to_string(),
            ScoredPattern {
                pattern: CanonicalPattern::from_text(cells[1])?,
                support: parse_num(cells[2], line_no, "support")?,
                count: parse_num(cells[3], line_no, "count")?,
            },
        ));
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub cuisine: String,
    pub recipe_count: usize,
    pub top_pattern: Option<CanonicalPattern>,
    pub top_support: Option<f64>,
    pub pattern_count: usize,
}

impl SummaryRow {
    /// The top pattern is the most supported one; ties prefer longer
    /// patterns, then the lexicographically smaller text.
    pub fn new(cuisine: &str, recipe_count: usize, patterns: &[ScoredPattern]) -> Self {
        let top = patterns.iter().min_by(|a, b| {
            b.count
                .cmp(&a.count)
                .then_with(|| b.pattern.len().cmp(&a.pattern.len()))
                .then_with(|| a.pattern.cmp(&b.pattern))
        });
        SummaryRow {
            cuisine: cuisine.to_string(),
            recipe_count,
            top_pattern: top.map(|p| p.pattern.clone()),
            top_support: top.map(|p| p.support),
            pattern_count: patterns.len(),
        }
    }
}

pub const SUMMARY_HEADER: &str = "cuisine\trecipe_count\ttop_pattern\ttop_support\tpattern_count";

pub fn summary_tsv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.cuisine,
            r.recipe_count,
            r.top_pattern.as_ref().map_or("", |p| p.as_str()),
            r.top_support.map(fmt6).unwrap_or_default(),
            r.pattern_count
        );
    }
    out
}

pub fn parse_summary_tsv(text: &str) -> Result<Vec<SummaryRow>, ReportError> {
    check_header(text, SUMMARY_HEADER)?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let cells = split_row(line, line_no, 5)?;
        rows.push(SummaryRow {
            cuisine: cells[0].to_string(),
            recipe_count: parse_num(cells[1], line_no, "recipe_count")?,
            top_pattern: if cells[2].is_empty() { None } else { Some(CanonicalPattern::from_text(cells[2])?) },
            top_support: if cells[3].is_empty() { None } else { Some(parse_num(cells[3], line_no, "top_support")?) },
            pattern_count: parse_num(cells[4], line_no, "pattern_count")?,
        });
    }
    Ok(rows)
}

pub fn vocab_tsv(vocab: &PatternVocabulary) -> String {
    let mut out = String::from("code\tpattern\n");
    for (code, p) in vocab.iter() {
        let _ = writeln!(out, "{code}\t{p}");
    }
    out
}

pub fn vectors_tsv(vectors: &[CuisineVector]) -> String {
    let dim = vectors.first().map_or(0, CuisineVector::dim);
    let mut out = String::from("cuisine");
    for code in 0..dim {
        let _ = write!(out, "\t{code}");
    }
    out.push('\n');
    for v in vectors {
        out.push_str(&v.cuisine);
        match &v.weights {
            Some(w) => w.iter().for_each(|x| {
                let _ = write!(out, "\t{}", fmt6(*x));
            }),
            None => v.bits.iter().for_each(|&b| {
                out.push('\t');
                out.push(if b { '1' } else { '0' });
            }),
        }
        out.push('\n');
    }
    out
}

fn matrix_csv(items: &[String], cuisines: &[String], value: impl Fn(usize, usize) -> f64) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header = vec!["item".to_string()];
    header.extend(cuisines.iter().cloned());
    w.write_record(&header).expect("in-memory write");
    for (i, item) in items.iter().enumerate() {
        let mut row = vec![item.clone()];
        row.extend((0..cuisines.len()).map(|c| fmt6(value(i, c))));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

pub fn prevalence_csv(p: &PrevalenceMatrix) -> String {
    matrix_csv(p.items(), p.cuisines(), |i, c| p.value(i, c))
}

pub fn authenticity_csv(p: &RelativePrevalenceMatrix) -> String {
    matrix_csv(p.items(), p.cuisines(), |i, c| p.value(i, c))
}

pub fn fingerprints_tsv(prints: &[Fingerprint]) -> String {
    let mut out = String::from("cuisine\tdirection\trank\titem\tauthenticity\n");
    for f in prints {
        for (direction, list) in [("most", &f.most), ("least", &f.least)] {
            for (rank, (item, value)) in list.iter().enumerate() {
                let _ = writeln!(out, "{}\t{direction}\t{}\t{item}\t{}", f.cuisine, rank + 1, fmt6(*value));
            }
        }
    }
    out
}

pub fn elbow_csv(results: &[KMeansResult]) -> String {
    let mut out = String::from("k,wcss,best_restart_seed\n");
    for r in results {
        let _ = writeln!(out, "{},{},{}", r.k, fmt6(r.wcss), r.seed);
    }
    out
}

/// Groups parsed pattern rows by cuisine.
pub fn group_by_cuisine(rows: Vec<(String, ScoredPattern)>) -> BTreeMap<String, Vec<ScoredPattern>> {
    let mut grouped: BTreeMap<String, Vec<ScoredPattern>> = BTreeMap::new();
    for (cuisine, p) in rows {
        grouped.entry(cuisine).or_default().push(p);
    }
    grouped
}
