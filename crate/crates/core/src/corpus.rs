//! Recipe ingestion and transaction encoding.
//!
//! A recipe is an unordered bag of ingredients, processes and utensils. Items
//! are keyed on `(class, name)` so that the same string used as an ingredient
//! and as a process stays two distinct items, while mining still runs over a
//! single merged id space.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: field `{field}`: {message}")]
    Malformed { line: usize, field: String, message: String },
    #[error("duplicate recipe id `{0}`")]
    DuplicateId(String),
    #[error("recipe `{0}` has no items in any class")]
    NoItems(String),
    #[error("corpus is empty")]
    Empty,
    #[error("no item classes selected")]
    NoClasses,
    #[error("unknown item class `{0}` (expected ingredient, process or utensil)")]
    UnknownClass(String),
    #[error("unknown corpus format `{0}` (expected jsonl or csv)")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ItemClass {
    Ingredient,
    Process,
    Utensil,
}

impl ItemClass {
    pub const ALL: [ItemClass; 3] = [ItemClass::Ingredient, ItemClass::Process, ItemClass::Utensil];

    pub fn as_str(self) -> &'static str {
        match self {
            ItemClass::Ingredient => "ingredient",
            ItemClass::Process => "process",
            ItemClass::Utensil => "utensil",
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for ItemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ItemClass {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ingredient" | "ingredients" => Ok(ItemClass::Ingredient),
            "process" | "processes" => Ok(ItemClass::Process),
            "utensil" | "utensils" => Ok(ItemClass::Utensil),
            other => Err(CorpusError::UnknownClass(other.to_string())),
        }
    }
}

/// A subset of item classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassSet(u8);

impl ClassSet {
    pub const fn empty() -> Self {
        ClassSet(0)
    }

    pub const fn all() -> Self {
        ClassSet(0b111)
    }

    pub fn only(class: ItemClass) -> Self {
        ClassSet(class.bit())
    }

    pub fn with(self, class: ItemClass) -> Self {
        ClassSet(self.0 | class.bit())
    }

    pub fn contains(self, class: ItemClass) -> bool {
        self.0 & class.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = ItemClass> {
        ItemClass::ALL.into_iter().filter(move |c| self.contains(*c))
    }
}

impl FromIterator<ItemClass> for ClassSet {
    fn from_iter<I: IntoIterator<Item = ItemClass>>(iter: I) -> Self {
        iter.into_iter().fold(ClassSet::empty(), ClassSet::with)
    }
}

impl FromStr for ClassSet {
    type Err = CorpusError;

    /// Parses a comma separated list such as `ingredient,process`, or `all`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(ClassSet::all());
        }
        let set = s
            .split(',')
            .filter(|part| !part.trim().is_empty())
            .map(ItemClass::from_str)
            .collect::<Result<ClassSet, _>>()?;
        if set.is_empty() {
            return Err(CorpusError::NoClasses);
        }
        Ok(set)
    }
}

/// Lowercases and collapses runs of whitespace. Idempotent.
pub fn normalize_item(raw: &str) -> String {
    raw.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecipeRecord {
    pub id: String,
    pub region: String,
    pub ingredients: BTreeSet<String>,
    pub processes: BTreeSet<String>,
    pub utensils: BTreeSet<String>,
}

impl RecipeRecord {
    /// Builds a record, normalizing item strings and dropping blanks.
    pub fn new<I, S>(id: &str, region: &str, ingredients: I, processes: I, utensils: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        fn collect<I: IntoIterator<Item = S>, S: AsRef<str>>(items: I) -> BTreeSet<String> {
            items.into_iter().map(|s| normalize_item(s.as_ref())).filter(|s| !s.is_empty()).collect()
        }
        RecipeRecord {
            id: id.trim().to_string(),
            region: region.trim().to_string(),
            ingredients: collect(ingredients),
            processes: collect(processes),
            utensils: collect(utensils),
        }
    }

    pub fn items(&self, class: ItemClass) -> &BTreeSet<String> {
        match class {
            ItemClass::Ingredient => &self.ingredients,
            ItemClass::Process => &self.processes,
            ItemClass::Utensil => &self.utensils,
        }
    }

    pub fn item_count(&self) -> usize {
        self.ingredients.len() + self.processes.len() + self.utensils.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl CorpusFormat {
    /// Guesses the format from a file extension, defaulting to JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => CorpusFormat::Csv,
            _ => CorpusFormat::Jsonl,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(CorpusFormat::Jsonl),
            "csv" => Ok(CorpusFormat::Csv),
            other => Err(CorpusError::UnknownFormat(other.to_string())),
        }
    }
}

pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Vec<RecipeRecord>, CorpusError> {
    let file = File::open(path).map_err(|source| CorpusError::Io { path: path.display().to_string(), source })?;
    match format {
        CorpusFormat::Jsonl => parse_jsonl(BufReader::new(file)),
        CorpusFormat::Csv => parse_csv(file),
    }
}

/// Parses one JSON object per line. Blank lines are skipped.
pub fn parse_jsonl<R: BufRead>(reader: R) -> Result<Vec<RecipeRecord>, CorpusError> {
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line =
            line.map_err(|e| CorpusError::Malformed { line: line_no, field: "<line>".into(), message: e.to_string() })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        records.push(parse_json_record(line, line_no)?);
    }
    finish(records)
}

fn parse_json_record(line: &str, line_no: usize) -> Result<RecipeRecord, CorpusError> {
    let malformed =
        |field: &str, message: String| CorpusError::Malformed { line: line_no, field: field.to_string(), message };
    let value: Value = serde_json::from_str(line).map_err(|e| malformed("<json>", e.to_string()))?;
    let obj = value.as_object().ok_or_else(|| malformed("<json>", "expected a JSON object".into()))?;

    let text = |field: &str| -> Result<String, CorpusError> {
        match obj.get(field) {
            Some(Value::String(s)) if !s.trim().is_empty() => Ok(s.trim().to_string()),
            Some(Value::String(_)) => Err(malformed(field, "must not be empty".into())),
            Some(_) => Err(malformed(field, "expected a string".into())),
            None => Err(malformed(field, "missing".into())),
        }
    };
    let list = |field: &str| -> Result<Vec<String>, CorpusError> {
        match obj.get(field) {
            None | Some(Value::Null) => Ok(Vec::new()),
            Some(Value::Array(values)) => values
                .iter()
                .map(|v| {
                    v.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| malformed(field, "expected an array of strings".into()))
                })
                .collect(),
            Some(_) => Err(malformed(field, "expected an array of strings".into())),
        }
    };

    let id = text("id")?;
    let region = text("region")?;
    Ok(RecipeRecord::new(&id, &region, list("ingredients")?, list("processes")?, list("utensils")?))
}

const CSV_HEADER: [&str; 5] = ["id", "region", "ingredients", "processes", "utensils"];

/// Parses the CSV corpus format; multi-valued cells are `|`-separated.
pub fn parse_csv<R: Read>(reader: R) -> Result<Vec<RecipeRecord>, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers().map_err(|e| CorpusError::Malformed {
        line: 1,
        field: "<header>".into(),
        message: e.to_string(),
    })?;
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != CSV_HEADER {
        return Err(CorpusError::Malformed {
            line: 1,
            field: "<header>".into(),
            message: format!("expected `{}`", CSV_HEADER.join(",")),
        });
    }

    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| CorpusError::Malformed {
            line: e.position().map_or(0, |p| p.line() as usize),
            field: "<row>".into(),
            message: e.to_string(),
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let cell = |idx: usize| row.get(idx).unwrap_or("");
        for (idx, field) in CSV_HEADER.iter().enumerate().take(2) {
            if cell(idx).trim().is_empty() {
                return Err(CorpusError::Malformed {
                    line,
                    field: field.to_string(),
                    message: "must not be empty".into(),
                });
            }
        }
        let split = |idx: usize| cell(idx).split('|').map(str::to_string).collect::<Vec<_>>();
        records.push(RecipeRecord::new(cell(0), cell(1), split(2), split(3), split(4)));
    }
    finish(records)
}

fn finish(records: Vec<RecipeRecord>) -> Result<Vec<RecipeRecord>, CorpusError> {
    if records.is_empty() {
        return Err(CorpusError::Empty);
    }
    let mut seen = HashSet::with_capacity(records.len());
    for record in &records {
        if !seen.insert(record.id.as_str()) {
            return Err(CorpusError::DuplicateId(record.id.clone()));
        }
        if record.item_count() == 0 {
            return Err(CorpusError::NoItems(record.id.clone()));
        }
    }
    Ok(records)
}

/// Dense item identifier, assigned in first-seen order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

impl ItemId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Default)]
pub struct ItemDictionary {
    entries: Vec<(ItemClass, String)>,
    lookup: HashMap<(ItemClass, String), ItemId>,
}

impl ItemDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, class: ItemClass, name: &str) -> ItemId {
        if let Some(&id) = self.lookup.get(&(class, name.to_string())) {
            return id;
        }
        let id = ItemId(self.entries.len() as u32);
        self.entries.push((class, name.to_string()));
        self.lookup.insert((class, name.to_string()), id);
        id
    }

    pub fn get(&self, class: ItemClass, name: &str) -> Option<ItemId> {
        self.lookup.get(&(class, name.to_string())).copied()
    }

    pub fn name(&self, id: ItemId) -> &str {
        &self.entries[id.index()].1
    }

    pub fn class(&self, id: ItemId) -> ItemClass {
        self.entries[id.index()].0
    }

    /// `class:name`, e.g. `ingredient:onion`.
    pub fn qualified(&self, id: ItemId) -> String {
        let (class, name) = &self.entries[id.index()];
        format!("{class}:{name}")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ItemId, ItemClass, &str)> {
        self.entries.iter().enumerate().map(|(i, (class, name))| (ItemId(i as u32), *class, name.as_str()))
    }
}

/// Transactions of a single cuisine. Each transaction is sorted and duplicate free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionDB {
    pub cuisine: String,
    pub transactions: Vec<Vec<ItemId>>,
}

impl TransactionDB {
    pub fn new(cuisine: impl Into<String>, transactions: Vec<Vec<ItemId>>) -> Self {
        let transactions = transactions
            .into_iter()
            .map(|mut t| {
                t.sort_unstable();
                t.dedup();
                t
            })
            .collect();
        TransactionDB { cuisine: cuisine.into(), transactions }
    }

    pub fn recipe_count(&self) -> usize {
        self.transactions.len()
    }

    pub fn distinct_items(&self) -> BTreeSet<ItemId> {
        self.transactions.iter().flatten().copied().collect()
    }
}

#[derive(Debug, Clone)]
pub struct TransactionSet {
    pub dbs: BTreeMap<String, TransactionDB>,
    pub dictionary: ItemDictionary,
    /// Recipes with no items left after class restriction.
    pub dropped: usize,
}

/// Groups recipes by region and encodes the selected item classes.
///
/// Every region present in `records` gets a database, even when all of its
/// recipes were dropped by the class restriction.
pub fn build_transactions(records: &[RecipeRecord], classes: ClassSet) -> Result<TransactionSet, CorpusError> {
    if classes.is_empty() {
        return Err(CorpusError::NoClasses);
    }
    if records.is_empty() {
        return Err(CorpusError::Empty);
    }
    let mut dictionary = ItemDictionary::new();
    let mut grouped: BTreeMap<String, Vec<Vec<ItemId>>> = BTreeMap::new();
    let mut dropped = 0;
    for record in records {
        let transaction: Vec<ItemId> = classes
            .iter()
            .flat_map(|class| record.items(class).iter().map(move |name| (class, name)))
            .map(|(class, name)| dictionary.intern(class, name))
            .collect();
        let bucket = grouped.entry(record.region.clone()).or_default();
        if transaction.is_empty() {
            dropped += 1;
        } else {
            bucket.push(transaction);
        }
    }
    if dropped > 0 {
        log::warn!("dropped {dropped} recipe(s) with no items in the selected classes");
    }
    let dbs = grouped
        .into_iter()
        .map(|(cuisine, transactions)| {
            let db = TransactionDB::new(cuisine.clone(), transactions);
            (cuisine, db)
        })
        .collect();
    Ok(TransactionSet { dbs, dictionary, dropped })
}
