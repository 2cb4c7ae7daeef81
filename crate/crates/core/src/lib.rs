//! Mining and clustering of cuisines from recipe corpora.
//!
//! The pipeline runs in stages, each in its own module:
//!
//! * [`corpus`] loads recipes and encodes them as per-cuisine transactions.
//! * [`mining`] finds frequent itemsets with FP-Growth.
//! * [`patterns`] turns itemsets into canonical strings and cuisine vectors.
//! * [`authenticity`] computes item prevalence and relative prevalence.
//! * [`clustering`] builds distance matrices, dendrograms and K-means elbows.
//! * [`geo`] builds the great-circle baseline tree.
//! * [`evaluation`] scores agreement between two trees.
//! * [`report`] holds the text formats shared by the CLI.

pub mod authenticity;
pub mod clustering;
pub mod corpus;
pub mod evaluation;
pub mod geo;
pub mod mining;
pub mod patterns;
pub mod report;

pub use authenticity::{Denominator, MeanOver, PrevalenceMatrix, RelativePrevalenceMatrix};
pub use clustering::{CondensedDistanceMatrix, Dendrogram, KMeansResult, Linkage, Metric};
pub use corpus::{ClassSet, CorpusFormat, ItemClass, ItemDictionary, ItemId, RecipeRecord, TransactionDB};
pub use evaluation::TreeComparison;
pub use geo::RegionCoordinates;
pub use mining::{FrequentPattern, MiningParams};
pub use patterns::{CanonicalPattern, CuisineVector, PatternVocabulary, ScoredPattern};
