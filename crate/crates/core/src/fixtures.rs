//! Bundled datasets.

use crate::dataset::{parse_csv, CategoricalDataset, CsvOptions};

/// Four web sessions described by country, gender and browser.
pub const WEB_SESSIONS_CSV: &str = include_str!("../fixtures/web_sessions.csv");

/// UCI Zoo: 101 animals, 16 traits plus the class label, with the animal
/// name still attached.
pub const ZOO_CSV: &str = include_str!("../fixtures/zoo.csv");

pub fn web_sessions() -> CategoricalDataset {
    parse_csv(WEB_SESSIONS_CSV.as_bytes(), &CsvOptions::default()).expect("bundled fixture parses")
}

/// Zoo without the per-row `name` identifier: 17 attributes, 43 items.
pub fn zoo() -> CategoricalDataset {
    parse_csv(ZOO_CSV.as_bytes(), &CsvOptions::default())
        .and_then(|ds| ds.drop_column("name"))
        .expect("bundled fixture parses")
}
