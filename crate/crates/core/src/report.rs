//! Output formats: rule tables, CSV/JSON rows, archive files and run
//! manifests.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::ItemCatalog;
use crate::error::{Error, Result};
use crate::ga::{ArchiveEntry, GAConfig};
use crate::metrics::{Rule, RuleMetrics};
use crate::store::Itemset;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// One rule in flat, human-readable form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub antecedent: String,
    pub consequent: String,
    pub cf: f64,
    pub completeness: f64,
    pub interestingness: f64,
    pub comprehensibility: f64,
    pub n_a: u64,
    pub n_c: u64,
    pub n_ac: u64,
}

impl ReportRow {
    pub fn new(catalog: &ItemCatalog, entry: &ArchiveEntry) -> Self {
        let m = &entry.metrics;
        ReportRow {
            antecedent: catalog.describe(&entry.rule.antecedent).join(" AND "),
            consequent: catalog.describe(&entry.rule.consequent).join(" AND "),
            cf: m.cf,
            completeness: m.completeness,
            interestingness: m.interestingness,
            comprehensibility: m.comprehensibility,
            n_a: m.counts.n_a,
            n_c: m.counts.n_c,
            n_ac: m.counts.n_ac,
        }
    }
}

pub fn rows(catalog: &ItemCatalog, entries: &[ArchiveEntry]) -> Vec<ReportRow> {
    entries.iter().map(|e| ReportRow::new(catalog, e)).collect()
}

pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::Format(e.to_string()))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn write_json<W: Write>(rows: &[ReportRow], out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, rows)?;
    Ok(())
}

/// Aligned text table; CF and completeness shown as percentages.
pub fn write_table<W: Write>(rows: &[ReportRow], mut out: W) -> std::io::Result<()> {
    let rule = |r: &ReportRow| format!("{} => {}", r.antecedent, r.consequent);
    let width = rows.iter().map(|r| rule(r).len()).max().unwrap_or(0).max(4);
    writeln!(
        out,
        "{:<width$}  {:>7}  {:>7}  {:>9}  {:>7}",
        "rule", "cf%", "comp%", "interest", "compr"
    )?;
    for r in rows {
        writeln!(
            out,
            "{:<width$}  {:>7.2}  {:>7.2}  {:>9.4}  {:>7.4}",
            rule(r),
            r.cf * 100.0,
            r.completeness * 100.0,
            r.interestingness,
            r.comprehensibility
        )?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoredRule {
    pub antecedent: Vec<String>,
    pub consequent: Vec<String>,
    pub metrics: RuleMetrics,
}

/// Serialized archive, tied to the catalog it was mined over.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchiveFile {
    pub catalog_fingerprint: String,
    pub config: GAConfig,
    pub generations: usize,
    pub rules: Vec<StoredRule>,
}

impl ArchiveFile {
    pub fn new(catalog: &ItemCatalog, config: &GAConfig, generations: usize, entries: &[ArchiveEntry]) -> Self {
        ArchiveFile {
            catalog_fingerprint: catalog.fingerprint(),
            config: config.clone(),
            generations,
            rules: entries
                .iter()
                .map(|e| StoredRule {
                    antecedent: catalog.tokens(&e.rule.antecedent),
                    consequent: catalog.tokens(&e.rule.consequent),
                    metrics: e.metrics,
                })
                .collect(),
        }
    }

    /// Resolves stored tokens against `catalog`, which must match the one
    /// the archive was written with.
    pub fn entries(&self, catalog: &ItemCatalog) -> Result<Vec<ArchiveEntry>> {
        if self.catalog_fingerprint != catalog.fingerprint() {
            return Err(Error::CatalogMismatch(
                "archive was written for a different item catalog".into(),
            ));
        }
        let side = |tokens: &[String]| -> Result<Itemset> {
            tokens.iter().map(|t| catalog.parse_token(t)).collect()
        };
        self.rules
            .iter()
            .map(|r| {
                Ok(ArchiveEntry {
                    rule: Rule::new(side(&r.antecedent)?, side(&r.consequent)?)?,
                    metrics: r.metrics,
                })
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn digest(&self) -> Result<String> {
        Ok(sha256_hex(self.to_json()?.as_bytes()))
    }
}

/// Everything needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub input_sha256: String,
    pub catalog_fingerprint: String,
    pub minsup: f64,
    pub config: GAConfig,
    pub seed: u64,
    pub generations: usize,
    pub archive_size: usize,
    pub archive_sha256: String,
}

impl RunManifest {
    pub fn new(input: &[u8], minsup: f64, archive: &ArchiveFile) -> Result<Self> {
        Ok(RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_sha256: sha256_hex(input),
            catalog_fingerprint: archive.catalog_fingerprint.clone(),
            minsup,
            config: archive.config.clone(),
            seed: archive.config.rng_seed,
            generations: archive.generations,
            archive_size: archive.rules.len(),
            archive_sha256: archive.digest()?,
        })
    }
}
