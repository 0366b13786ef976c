//! Categorical datasets: CSV ingestion, preprocessing and binarization into
//! asymmetric binary items.

use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::store::{BinaryTransactionDB, Bitmap, ItemId, ItemLayout, Itemset};

/// A cell holds an index into its attribute's domain, or `None` when missing.
pub type Cell = Option<u32>;

/// Label given to merged low-support values.
pub const OTHER_LABEL: &str = "OTHER";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum AttributeKind {
    Categorical,
    /// Half-open bins `[boundaries[i], boundaries[i + 1])`, one per domain value.
    Interval { boundaries: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeSchema {
    pub name: String,
    pub domain: Vec<String>,
    pub kind: AttributeKind,
}

impl AttributeSchema {
    pub fn categorical(name: impl Into<String>, domain: Vec<String>) -> Self {
        AttributeSchema {
            name: name.into(),
            domain,
            kind: AttributeKind::Categorical,
        }
    }

    pub fn is_interval(&self) -> bool {
        matches!(self.kind, AttributeKind::Interval { .. })
    }

    fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for v in &self.domain {
            if !seen.insert(v) {
                return Err(Error::Contract(format!(
                    "attribute `{}` repeats domain value `{v}`",
                    self.name
                )));
            }
        }
        if let AttributeKind::Interval { boundaries } = &self.kind {
            if boundaries.len() != self.domain.len() + 1 || boundaries.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidBoundaries);
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CategoricalDataset {
    schema: Vec<AttributeSchema>,
    rows: Vec<Vec<Cell>>,
}

#[derive(Clone, Debug)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub missing_token: String,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            delimiter: b',',
            missing_token: "?".to_string(),
        }
    }
}

impl CategoricalDataset {
    pub fn new(schema: Vec<AttributeSchema>, rows: Vec<Vec<Cell>>) -> Result<Self> {
        let mut names = std::collections::HashSet::new();
        for a in &schema {
            a.validate()?;
            if !names.insert(&a.name) {
                return Err(Error::DuplicateAttribute(a.name.clone()));
            }
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(Error::RaggedRow {
                    row: r + 1,
                    expected: schema.len(),
                    found: row.len(),
                });
            }
            for (cell, attr) in row.iter().zip(&schema) {
                if let Some(v) = cell {
                    if *v as usize >= attr.domain.len() {
                        return Err(Error::Contract(format!(
                            "row {}: value index {v} outside domain of `{}`",
                            r + 1,
                            attr.name
                        )));
                    }
                }
            }
        }
        Ok(CategoricalDataset { schema, rows })
    }

    pub fn schema(&self) -> &[AttributeSchema] {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn attribute_index(&self, name: &str) -> Result<usize> {
        self.schema
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    /// Label of a cell, `None` for missing.
    pub fn value_label(&self, row: usize, attr: usize) -> Option<&str> {
        self.rows[row][attr].map(|v| self.schema[attr].domain[v as usize].as_str())
    }

    pub fn drop_column(&self, name: &str) -> Result<CategoricalDataset> {
        let k = self.attribute_index(name)?;
        let mut schema = self.schema.clone();
        schema.remove(k);
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.remove(k);
                r
            })
            .collect();
        Ok(CategoricalDataset { schema, rows })
    }

    fn replace_column(&self, k: usize, attr: AttributeSchema, cells: Vec<Cell>) -> Result<CategoricalDataset> {
        let mut schema = self.schema.clone();
        schema[k] = attr;
        let rows = self
            .rows
            .iter()
            .zip(cells)
            .map(|(r, c)| {
                let mut r = r.clone();
                r[k] = c;
                r
            })
            .collect();
        CategoricalDataset::new(schema, rows)
    }
}

/// Parses a headed, rectangular CSV body. Domains list distinct values in
/// first-appearance order.
pub fn parse_csv<R: Read>(input: R, options: &CsvOptions) -> Result<CategoricalDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut records = reader.records();
    let header = match records.next() {
        Some(h) => h?,
        None => return Err(Error::EmptyInput),
    };
    if header.iter().all(str::is_empty) {
        return Err(Error::EmptyInput);
    }
    let names: Vec<String> = header.iter().map(str::to_string).collect();
    let width = names.len();
    let mut domains: Vec<Vec<String>> = vec![Vec::new(); width];
    let mut lookup: Vec<HashMap<String, u32>> = vec![HashMap::new(); width];
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(rows.len() + 2);
        if rec.len() == 1 && rec.get(0) == Some("") {
            continue; // blank line
        }
        if rec.len() != width {
            return Err(Error::RaggedRow {
                row: line,
                expected: width,
                found: rec.len(),
            });
        }
        let row = rec
            .iter()
            .enumerate()
            .map(|(k, field)| {
                if field == options.missing_token {
                    return None;
                }
                let next = domains[k].len() as u32;
                let id = *lookup[k].entry(field.to_string()).or_insert_with(|| {
                    domains[k].push(field.to_string());
                    next
                });
                Some(id)
            })
            .collect();
        rows.push(row);
    }
    let schema = names
        .into_iter()
        .zip(domains)
        .map(|(n, d)| AttributeSchema::categorical(n, d))
        .collect();
    CategoricalDataset::new(schema, rows)
}

fn format_number(x: f64) -> String {
    format!("{x}")
}

/// Label of the half-open interval `[low, high)`. Integer bounds render as
/// the inclusive integer range `low..high-1`.
pub fn interval_label(low: f64, high: f64) -> String {
    if low.fract() == 0.0 && high.fract() == 0.0 && high - low >= 1.0 {
        format!("{}..{}", format_number(low), format_number(high - 1.0))
    } else {
        format!("[{},{})", format_number(low), format_number(high))
    }
}

/// Replaces a numeric column by half-open bins between consecutive boundaries.
pub fn discretize(ds: &CategoricalDataset, attr: &str, boundaries: &[f64]) -> Result<CategoricalDataset> {
    let k = ds.attribute_index(attr)?;
    if boundaries.len() < 2 || boundaries.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
        return Err(Error::InvalidBoundaries);
    }
    let (low, high) = (boundaries[0], boundaries[boundaries.len() - 1]);
    let mut cells = Vec::with_capacity(ds.n_rows());
    for r in 0..ds.n_rows() {
        let Some(label) = ds.value_label(r, k) else {
            cells.push(None);
            continue;
        };
        let x: f64 = label.parse().map_err(|_| Error::NotNumeric {
            row: r + 1,
            column: attr.to_string(),
            value: label.to_string(),
        })?;
        if !(x >= low && x < high) {
            return Err(Error::OutOfRange {
                row: r + 1,
                column: attr.to_string(),
                value: x,
                low,
                high,
            });
        }
        // last boundary strictly greater than x
        let bin = boundaries.partition_point(|&b| b <= x) - 1;
        cells.push(Some(bin as u32));
    }
    let domain = boundaries.windows(2).map(|w| interval_label(w[0], w[1])).collect();
    let schema = AttributeSchema {
        name: attr.to_string(),
        domain,
        kind: AttributeKind::Interval {
            boundaries: boundaries.to_vec(),
        },
    };
    ds.replace_column(k, schema, cells)
}

/// Group number (1-based) of the 1-based value index `i` when a domain of
/// `domain_size` values is compressed to at most `max_values` groups.
pub fn compressed_group(i: usize, domain_size: usize, max_values: usize) -> usize {
    let c = domain_size.div_ceil(max_values).max(1);
    (i - 1) / c + 1
}

/// Shrinks an attribute's domain to at most `max_values` groups of
/// consecutive values.
pub fn compress_domain(ds: &CategoricalDataset, attr: &str, max_values: usize) -> Result<CategoricalDataset> {
    let k = ds.attribute_index(attr)?;
    if max_values == 0 {
        return Err(Error::InvalidParameter("maximum domain size must be at least 1".into()));
    }
    let old = &ds.schema[k];
    let d = old.domain.len();
    if d <= max_values {
        return Ok(ds.clone());
    }
    let n_groups = compressed_group(d, d, max_values);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_groups];
    for i in 1..=d {
        members[compressed_group(i, d, max_values) - 1].push(i - 1);
    }
    let (domain, kind) = match &old.kind {
        AttributeKind::Interval { boundaries } => {
            let mut b: Vec<f64> = members.iter().map(|m| boundaries[m[0]]).collect();
            b.push(boundaries[d]);
            let labels = b.windows(2).map(|w| interval_label(w[0], w[1])).collect();
            (labels, AttributeKind::Interval { boundaries: b })
        }
        AttributeKind::Categorical => {
            let labels = members
                .iter()
                .map(|m| m.iter().map(|&v| old.domain[v].as_str()).collect::<Vec<_>>().join("|"))
                .collect();
            (labels, AttributeKind::Categorical)
        }
    };
    let cells = ds
        .rows
        .iter()
        .map(|r| r[k].map(|v| (compressed_group(v as usize + 1, d, max_values) - 1) as u32))
        .collect();
    let schema = AttributeSchema {
        name: old.name.clone(),
        domain,
        kind,
    };
    ds.replace_column(k, schema, cells)
}

/// Merges every value seen in fewer than `min_count` rows into [`OTHER_LABEL`].
pub fn aggregate_low_support(ds: &CategoricalDataset, attr: &str, min_count: usize) -> Result<CategoricalDataset> {
    let k = ds.attribute_index(attr)?;
    let old = &ds.schema[k];
    let mut counts = vec![0usize; old.domain.len()];
    for r in &ds.rows {
        if let Some(v) = r[k] {
            counts[v as usize] += 1;
        }
    }
    if counts.iter().all(|&c| c >= min_count) {
        return Ok(ds.clone());
    }
    let mut domain: Vec<String> = Vec::new();
    let mut remap = vec![0u32; old.domain.len()];
    let mut other: Option<u32> = None;
    for (v, label) in old.domain.iter().enumerate() {
        if counts[v] >= min_count {
            remap[v] = domain.len() as u32;
            if label == OTHER_LABEL {
                other = Some(remap[v]);
            }
            domain.push(label.clone());
        }
    }
    let other = other.unwrap_or_else(|| {
        domain.push(OTHER_LABEL.to_string());
        (domain.len() - 1) as u32
    });
    for v in 0..old.domain.len() {
        if counts[v] < min_count {
            remap[v] = other;
        }
    }
    let cells = ds.rows.iter().map(|r| r[k].map(|v| remap[v as usize])).collect();
    ds.replace_column(k, AttributeSchema::categorical(old.name.clone(), domain), cells)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogItem {
    pub attribute: String,
    pub value: String,
    /// Index of the source attribute in the dataset schema.
    pub attribute_index: u32,
    /// Index of the value in that attribute's domain.
    pub value_index: u32,
}

/// Dense list of (attribute, value) items produced by binarization.
#[derive(Clone, Debug, PartialEq)]
pub struct ItemCatalog {
    items: Vec<CatalogItem>,
    attributes: Vec<AttributeSchema>,
    index: HashMap<(String, String), ItemId>,
}

impl ItemCatalog {
    fn new(items: Vec<CatalogItem>, attributes: Vec<AttributeSchema>) -> Self {
        let index = items
            .iter()
            .enumerate()
            .map(|(i, it)| ((it.attribute.clone(), it.value.clone()), ItemId(i as u32)))
            .collect();
        ItemCatalog { items, attributes, index }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[CatalogItem] {
        &self.items
    }

    pub fn item(&self, id: ItemId) -> Result<&CatalogItem> {
        self.items.get(id.index()).ok_or(Error::UnknownItem(id.0))
    }

    pub fn attributes(&self) -> &[AttributeSchema] {
        &self.attributes
    }

    pub fn id_of(&self, attribute: &str, value: &str) -> Option<ItemId> {
        self.index.get(&(attribute.to_string(), value.to_string())).copied()
    }

    pub fn label(&self, id: ItemId) -> String {
        match self.items.get(id.index()) {
            Some(it) => format!("{}={}", it.attribute, it.value),
            None => format!("#{}", id.0),
        }
    }

    /// Resolves an `attribute=value` token.
    pub fn parse_token(&self, token: &str) -> Result<ItemId> {
        let (a, v) = token
            .split_once('=')
            .ok_or_else(|| Error::UnknownItemLabel(token.to_string()))?;
        self.id_of(a.trim(), v.trim())
            .ok_or_else(|| Error::UnknownItemLabel(token.to_string()))
    }

    /// Human-readable conditions of one rule side. Several bins of one
    /// interval attribute collapse into the covering interval.
    pub fn describe(&self, s: &Itemset) -> Vec<String> {
        let mut out = Vec::new();
        let items = s.items();
        let mut i = 0;
        while i < items.len() {
            let Some(first) = self.items.get(items[i].index()) else {
                out.push(self.label(items[i]));
                i += 1;
                continue;
            };
            let mut j = i + 1;
            while j < items.len()
                && self.items.get(items[j].index()).map(|x| x.attribute_index) == Some(first.attribute_index)
            {
                j += 1;
            }
            let attr = &self.attributes[first.attribute_index as usize];
            match (&attr.kind, j - i) {
                (AttributeKind::Interval { boundaries }, n) if n > 1 => {
                    let last = &self.items[items[j - 1].index()];
                    let label = interval_label(
                        boundaries[first.value_index as usize],
                        boundaries[last.value_index as usize + 1],
                    );
                    out.push(format!("{}={}", first.attribute, label));
                }
                _ => out.extend(items[i..j].iter().map(|&x| self.label(x))),
            }
            i = j;
        }
        out
    }

    /// Tokens accepted back by [`parse_token`](Self::parse_token), one per item.
    pub fn tokens(&self, s: &Itemset) -> Vec<String> {
        s.items().iter().map(|&i| self.label(i)).collect()
    }

    /// Column headers for the 0/1 matrix: bare value labels when they are
    /// unambiguous across attributes, `attribute=value` otherwise.
    pub fn matrix_header(&self) -> Vec<String> {
        let mut seen = std::collections::HashSet::new();
        let unique = self.items.iter().all(|it| seen.insert(it.value.as_str()));
        self.items
            .iter()
            .enumerate()
            .map(|(i, it)| if unique { it.value.clone() } else { self.label(ItemId(i as u32)) })
            .collect()
    }

    /// SHA-256 over the ordered item labels.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for it in &self.items {
            h.update(it.attribute.as_bytes());
            h.update(b"=");
            h.update(it.value.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}

/// One asymmetric binary item per (attribute, value) pair. Missing cells set
/// no bit. With `drop_items_above`, items whose support fraction exceeds it
/// are left out of the catalog.
pub fn binarize(ds: &CategoricalDataset, drop_items_above: Option<f64>) -> Result<(ItemCatalog, BinaryTransactionDB)> {
    if let Some(t) = drop_items_above {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter(format!("drop threshold {t} outside [0, 1]")));
        }
    }
    let n = ds.n_rows();
    let mut items = Vec::new();
    let mut columns = Vec::new();
    let mut item_attribute = Vec::new();
    let mut attribute_items = Vec::with_capacity(ds.schema.len());
    for (k, attr) in ds.schema.iter().enumerate() {
        let mut cols = vec![Bitmap::new(n); attr.domain.len()];
        for (r, row) in ds.rows.iter().enumerate() {
            if let Some(v) = row[k] {
                cols[v as usize].set(r);
            }
        }
        let mut ids = Vec::new();
        for (v, col) in cols.into_iter().enumerate() {
            if let Some(t) = drop_items_above {
                if n > 0 && col.count_ones() as f64 / n as f64 > t {
                    continue;
                }
            }
            let id = ItemId(items.len() as u32);
            ids.push(id);
            items.push(CatalogItem {
                attribute: attr.name.clone(),
                value: attr.domain[v].clone(),
                attribute_index: k as u32,
                value_index: v as u32,
            });
            columns.push(col);
            item_attribute.push(k as u32);
        }
        attribute_items.push(ids);
    }
    let layout = ItemLayout {
        item_attribute,
        attribute_items,
        interval: ds.schema.iter().map(AttributeSchema::is_interval).collect(),
    };
    let db = BinaryTransactionDB::new(n, columns, layout)?;
    Ok((ItemCatalog::new(items, ds.schema.clone()), db))
}
