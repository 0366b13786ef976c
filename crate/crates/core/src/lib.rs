//! Multi-objective association rule mining over categorical data.
//!
//! Rows are binarized into one item per (attribute, value) pair, frequent
//! itemsets seed a genetic algorithm, and the algorithm keeps a Pareto archive
//! of rules scored on confidence, completeness, interestingness and
//! comprehensibility. A brute-force oracle computes exact fronts for small
//! catalogs.

pub mod apriori;
pub mod dataset;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod ga;
pub mod metrics;
pub mod oracle;
pub mod report;
pub mod store;

#[cfg(test)]
mod testutil;

pub use apriori::{mine_frequent, mine_frequent_with, AprioriOptions, FrequentItemset};
pub use dataset::{binarize, parse_csv, CategoricalDataset, CsvOptions, ItemCatalog};
pub use error::{Error, Result};
pub use exec::Execution;
pub use ga::{evolve, run_evolution, ArchiveEntry, GAConfig, ParetoArchive};
pub use metrics::{evaluate_rule, ComprehensibilityVariant, Evaluation, Rule, RuleMetrics};
pub use store::{BinaryTransactionDB, ItemId, Itemset, JointCounts};
