//! Brute-force ground truth for small instances.
//!
//! Rules are enumerated exhaustively and scored by scanning dataset rows
//! directly. Nothing here touches the bitmap store, so agreement between the
//! two paths is meaningful.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{CategoricalDataset, ItemCatalog};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::ga::ArchiveEntry;
use crate::metrics::{ComprehensibilityVariant, Rule, RuleMetrics};
use crate::store::{ItemId, Itemset, JointCounts};

/// Catalogs up to this size may be enumerated with any rule length.
pub const MAX_UNBOUNDED_ITEMS: usize = 24;
/// Longest rules enumerable on larger catalogs.
pub const MAX_BOUNDED_RULE_ITEMS: usize = 4;
/// Slack for comparing objective values computed along different paths.
pub const OBJECTIVE_TOLERANCE: f64 = 1e-9;

fn guard(n_items: usize, max_items: usize) -> Result<()> {
    if n_items <= MAX_UNBOUNDED_ITEMS || max_items <= MAX_BOUNDED_RULE_ITEMS {
        Ok(())
    } else {
        Err(Error::EnumerationTooLarge(format!(
            "{n_items} items with rules up to {max_items} items; use at most {MAX_BOUNDED_RULE_ITEMS} items per rule or {MAX_UNBOUNDED_ITEMS} catalog items"
        )))
    }
}

/// Every rule with disjoint non-empty sides, at most one item per attribute
/// on each side and at most `max_items` items overall, each exactly once.
pub fn enumerate_rules(catalog: &ItemCatalog, max_items: usize) -> Result<Vec<Rule>> {
    let k = catalog.len();
    guard(k, max_items)?;
    let attr: Vec<u32> = catalog.items().iter().map(|it| it.attribute_index).collect();
    let mut out = Vec::new();
    let mut combo: Vec<usize> = Vec::new();

    fn side_ok(attr: &[u32], items: &[usize]) -> bool {
        for (i, a) in items.iter().enumerate() {
            if items[..i].iter().any(|b| attr[*b] == attr[*a]) {
                return false;
            }
        }
        true
    }

    fn extend(start: usize, size: usize, k: usize, attr: &[u32], combo: &mut Vec<usize>, out: &mut Vec<Rule>) {
        if combo.len() == size {
            for split in 1u64..(1u64 << size) - 1 {
                let (mut a, mut c) = (Vec::new(), Vec::new());
                for (bit, &item) in combo.iter().enumerate() {
                    if split >> bit & 1 == 1 {
                        a.push(item);
                    } else {
                        c.push(item);
                    }
                }
                if side_ok(attr, &a) && side_ok(attr, &c) {
                    out.push(Rule {
                        antecedent: Itemset::from_ids(a.iter().map(|&i| i as u32)),
                        consequent: Itemset::from_ids(c.iter().map(|&i| i as u32)),
                    });
                }
            }
            return;
        }
        for i in start..k {
            combo.push(i);
            extend(i + 1, size, k, attr, combo, out);
            combo.pop();
        }
    }

    for size in 2..=max_items.min(k) {
        extend(0, size, k, &attr, &mut combo, &mut out);
    }
    Ok(out)
}

/// Scores rules by scanning the rows of the source dataset.
pub struct RawScanner<'a> {
    dataset: &'a CategoricalDataset,
    /// (attribute index, value index) of each catalog item.
    cells: Vec<(usize, u32)>,
}

impl<'a> RawScanner<'a> {
    pub fn new(dataset: &'a CategoricalDataset, catalog: &ItemCatalog) -> Result<Self> {
        if catalog.attributes() != dataset.schema() {
            return Err(Error::CatalogMismatch("catalog was not built from this dataset".into()));
        }
        let cells = catalog
            .items()
            .iter()
            .map(|it| (it.attribute_index as usize, it.value_index))
            .collect();
        Ok(RawScanner { dataset, cells })
    }

    fn conditions(&self, side: &Itemset) -> Result<Vec<(usize, Vec<u32>)>> {
        let mut by_attr: Vec<(usize, Vec<u32>)> = Vec::new();
        for id in side.items() {
            let &(a, v) = self.cells.get(id.index()).ok_or(Error::UnknownItem(id.0))?;
            match by_attr.iter_mut().find(|(x, _)| *x == a) {
                Some((_, vals)) => vals.push(v),
                None => by_attr.push((a, vec![v])),
            }
        }
        Ok(by_attr)
    }

    fn holds(row: &[Option<u32>], conds: &[(usize, Vec<u32>)]) -> bool {
        conds.iter().all(|(a, vals)| match row[*a] {
            Some(v) => vals.contains(&v),
            None => false,
        })
    }

    pub fn counts(&self, rule: &Rule) -> Result<JointCounts> {
        let a = self.conditions(&rule.antecedent)?;
        let c = self.conditions(&rule.consequent)?;
        let (mut n_a, mut n_c, mut n_ac) = (0u64, 0u64, 0u64);
        for row in self.dataset.rows() {
            let in_a = Self::holds(row, &a);
            let in_c = Self::holds(row, &c);
            n_a += in_a as u64;
            n_c += in_c as u64;
            n_ac += (in_a && in_c) as u64;
        }
        Ok(JointCounts {
            n_a,
            n_c,
            n_ac,
            n: self.dataset.n_rows() as u64,
        })
    }

    /// All four objectives, or `None` if any is undefined for this rule.
    pub fn metrics(&self, rule: &Rule, variant: ComprehensibilityVariant) -> Result<Option<RuleMetrics>> {
        let counts = self.counts(rule)?;
        if counts.n_ac == 0 {
            // n_ac >= 1 implies |A|, |C| and N are positive too
            return Ok(None);
        }
        let (a, c, ac, n) = (counts.n_a as f64, counts.n_c as f64, counts.n_ac as f64, counts.n as f64);
        let comprehensibility = match variant {
            ComprehensibilityVariant::RowCount => (c + 1.0).ln() / (ac + 1.0).ln(),
            ComprehensibilityVariant::AttributeCount => {
                let nc = self.conditions(&rule.consequent)?.len() as f64;
                let na = self.conditions(&rule.antecedent)?.len() as f64;
                (nc + 1.0).ln() / (nc + na + 1.0).ln()
            }
        };
        Ok(Some(RuleMetrics {
            cf: ac / a,
            completeness: ac / c,
            interestingness: ac - a * c / n,
            comprehensibility,
            counts,
        }))
    }
}

/// `a` dominates `b` allowing for rounding noise of [`OBJECTIVE_TOLERANCE`].
pub fn dominates_tolerant(a: &[f64; 4], b: &[f64; 4]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x >= y - OBJECTIVE_TOLERANCE) && a.iter().zip(b).any(|(x, y)| *x > y + OBJECTIVE_TOLERANCE)
}

fn same_vector(a: &[f64; 4], b: &[f64; 4]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= OBJECTIVE_TOLERANCE)
}

/// Maximal entries under dominance. Entries sharing an objective vector are
/// all kept. Output is sorted by rule, independent of input order.
pub fn exact_pareto_front(scored: &[ArchiveEntry], exec: Execution) -> Vec<ArchiveEntry> {
    let mut distinct: Vec<[f64; 4]> = Vec::new();
    let mut index: HashMap<[u64; 4], usize> = HashMap::new();
    let keys: Vec<usize> = scored
        .iter()
        .map(|e| {
            let o = e.metrics.objectives();
            *index.entry(o.map(f64::to_bits)).or_insert_with(|| {
                distinct.push(o);
                distinct.len() - 1
            })
        })
        .collect();
    let on_front = exec::map(exec, &distinct, |v| {
        !distinct.iter().any(|w| crate::metrics::dominates_objectives(w, v))
    });
    let mut front: Vec<ArchiveEntry> = scored
        .iter()
        .zip(keys)
        .filter(|&(_, k)| on_front[k])
        .map(|(e, _)| e.clone())
        .collect();
    front.sort_by(|a, b| a.rule.cmp(&b.rule));
    front
}

/// Exact front of all rules up to `max_items` items.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExactFront {
    pub catalog_fingerprint: String,
    pub max_items: usize,
    pub rules_enumerated: usize,
    pub feasible: usize,
    pub entries: Vec<ArchiveEntry>,
}

impl ExactFront {
    /// Distinct objective vectors on the front.
    pub fn distinct_vectors(&self) -> Vec<[f64; 4]> {
        let mut out: Vec<[f64; 4]> = Vec::new();
        for e in &self.entries {
            let o = e.metrics.objectives();
            if !out.iter().any(|v| same_vector(v, &o)) {
                out.push(o);
            }
        }
        out
    }

    /// A front member dominating `metrics`, if any.
    pub fn witness(&self, metrics: &RuleMetrics) -> Option<&ArchiveEntry> {
        let o = metrics.objectives();
        self.entries.iter().find(|e| dominates_tolerant(&e.metrics.objectives(), &o))
    }
}

/// Every enumerated rule with its raw-scan metrics; infeasible rules are dropped.
pub fn score_all(
    dataset: &CategoricalDataset,
    catalog: &ItemCatalog,
    rules: &[Rule],
    variant: ComprehensibilityVariant,
    exec: Execution,
) -> Result<Vec<ArchiveEntry>> {
    let scanner = RawScanner::new(dataset, catalog)?;
    let scored = exec::map(exec, rules, |r| scanner.metrics(r, variant));
    let mut out = Vec::new();
    for (rule, m) in rules.iter().zip(scored) {
        if let Some(metrics) = m? {
            out.push(ArchiveEntry {
                rule: rule.clone(),
                metrics,
            });
        }
    }
    Ok(out)
}

pub fn exact_front(
    dataset: &CategoricalDataset,
    catalog: &ItemCatalog,
    max_items: usize,
    variant: ComprehensibilityVariant,
    exec: Execution,
) -> Result<ExactFront> {
    let rules = enumerate_rules(catalog, max_items)?;
    let scored = score_all(dataset, catalog, &rules, variant, exec)?;
    Ok(ExactFront {
        catalog_fingerprint: catalog.fingerprint(),
        max_items,
        rules_enumerated: rules.len(),
        feasible: scored.len(),
        entries: exact_pareto_front(&scored, exec),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpuriousEntry {
    pub entry: ArchiveEntry,
    pub witness: ArchiveEntry,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrontReport {
    pub true_front: Vec<ArchiveEntry>,
    /// Share of distinct front objective vectors present in the archive.
    pub coverage: f64,
    /// Archive entries strictly dominated by a front member.
    pub spurious: Vec<SpuriousEntry>,
}

impl FrontReport {
    pub fn is_sound(&self) -> bool {
        self.spurious.is_empty()
    }
}

pub fn verify_archive(archive: &[ArchiveEntry], archive_catalog: &str, front: &ExactFront) -> Result<FrontReport> {
    if archive_catalog != front.catalog_fingerprint {
        return Err(Error::CatalogMismatch(
            "archive and exact front were computed over different item catalogs".into(),
        ));
    }
    let vectors = front.distinct_vectors();
    let found = vectors
        .iter()
        .filter(|v| archive.iter().any(|e| same_vector(v, &e.metrics.objectives())))
        .count();
    let coverage = if vectors.is_empty() { 1.0 } else { found as f64 / vectors.len() as f64 };
    let spurious = archive
        .iter()
        .filter_map(|e| {
            front.witness(&e.metrics).map(|w| SpuriousEntry {
                entry: e.clone(),
                witness: w.clone(),
            })
        })
        .collect();
    Ok(FrontReport {
        true_front: front.entries.clone(),
        coverage,
        spurious,
    })
}

/// Looks up an item id for tests and tooling.
pub fn item(catalog: &ItemCatalog, attribute: &str, value: &str) -> Result<ItemId> {
    catalog
        .id_of(attribute, value)
        .ok_or_else(|| Error::UnknownItemLabel(format!("{attribute}={value}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{binarize, parse_csv, CsvOptions};
    use crate::store::JointCounts;

    fn web() -> (CategoricalDataset, ItemCatalog) {
        let ds = crate::fixtures::web_sessions();
        let (cat, _) = binarize(&ds, None).unwrap();
        (ds, cat)
    }

    fn entry(id: u32, o: [f64; 4]) -> ArchiveEntry {
        ArchiveEntry {
            rule: Rule::new(Itemset::from_ids([id]), Itemset::from_ids([id + 100])).unwrap(),
            metrics: RuleMetrics {
                cf: o[0],
                completeness: o[1],
                interestingness: o[2],
                comprehensibility: o[3],
                counts: JointCounts::new(1, 1, 1, 1),
            },
        }
    }

    #[test]
    fn two_item_catalog() {
        let ds = parse_csv("a,b\nx,y\n".as_bytes(), &CsvOptions::default()).unwrap();
        let (cat, _) = binarize(&ds, None).unwrap();
        let rules = enumerate_rules(&cat, 2).unwrap();
        assert_eq!(rules.len(), 2);
        assert!(enumerate_rules(&cat, 1).unwrap().is_empty());
    }

    #[test]
    fn web_session_counts() {
        let (_, cat) = web();
        // all ordered pairs of distinct items: 8 * 7
        assert_eq!(enumerate_rules(&cat, 2).unwrap().len(), 56);
        assert_eq!(enumerate_rules(&cat, 3).unwrap().len(), 308);
        // Country x Gender orientations: 3 * 2 * 2
        let cg = enumerate_rules(&cat, 2)
            .unwrap()
            .into_iter()
            .filter(|r| {
                let a = cat.item(r.antecedent.items()[0]).unwrap().attribute.as_str();
                let c = cat.item(r.consequent.items()[0]).unwrap().attribute.as_str();
                matches!((a, c), ("Country", "Gender") | ("Gender", "Country"))
            })
            .count();
        assert_eq!(cg, 12);
    }

    #[test]
    fn guard_refuses_wide_unbounded() {
        let body: String = (0..30).map(|i| format!("v{i}\n")).collect();
        let ds = parse_csv(format!("x\n{body}").as_bytes(), &CsvOptions::default()).unwrap();
        let (cat, _) = binarize(&ds, None).unwrap();
        assert!(matches!(enumerate_rules(&cat, 5), Err(Error::EnumerationTooLarge(_))));
        assert!(enumerate_rules(&cat, 4).is_ok());
    }

    #[test]
    fn raw_scan_counts() {
        let (ds, cat) = web();
        let scan = RawScanner::new(&ds, &cat).unwrap();
        let usa = item(&cat, "Country", "USA").unwrap();
        let male = item(&cat, "Gender", "Male").unwrap();
        let r = Rule::new(Itemset::new(vec![usa]), Itemset::new(vec![male])).unwrap();
        assert_eq!(scan.counts(&r).unwrap(), JointCounts::new(2, 2, 1, 4));
    }

    #[test]
    fn front_examples() {
        let single = vec![entry(0, [1.0; 4])];
        assert_eq!(exact_pareto_front(&single, Execution::Sequential).len(), 1);
        let chain = vec![entry(0, [3.0; 4]), entry(1, [2.0; 4]), entry(2, [1.0; 4])];
        let f = exact_pareto_front(&chain, Execution::Sequential);
        assert_eq!(f, vec![chain[0].clone()]);
        let anti = vec![
            entry(0, [1.0, 0.0, 0.0, 0.0]),
            entry(1, [0.0, 1.0, 0.0, 0.0]),
            entry(2, [0.0, 0.0, 1.0, 0.0]),
        ];
        assert_eq!(exact_pareto_front(&anti, Execution::Parallel).len(), 3);
        let tied = vec![entry(0, [1.0; 4]), entry(1, [1.0; 4])];
        assert_eq!(exact_pareto_front(&tied, Execution::Sequential).len(), 2);
    }

    #[test]
    fn front_ignores_input_order() {
        let (ds, cat) = web();
        let rules = enumerate_rules(&cat, 3).unwrap();
        let scored = score_all(&ds, &cat, &rules, ComprehensibilityVariant::RowCount, Execution::Sequential).unwrap();
        let mut reversed = scored.clone();
        reversed.reverse();
        assert_eq!(
            exact_pareto_front(&scored, Execution::Sequential),
            exact_pareto_front(&reversed, Execution::Parallel)
        );
    }

    fn front_of(entries: Vec<ArchiveEntry>) -> ExactFront {
        ExactFront {
            catalog_fingerprint: "fp".into(),
            max_items: 2,
            rules_enumerated: entries.len(),
            feasible: entries.len(),
            entries,
        }
    }

    #[test]
    fn verify_examples() {
        let front = front_of(vec![entry(0, [1.0, 0.0, 0.0, 0.0]), entry(1, [0.0, 1.0, 0.0, 0.0])]);
        let full = verify_archive(&front.entries, "fp", &front).unwrap();
        assert_eq!(full.coverage, 1.0);
        assert!(full.is_sound());

        let empty = verify_archive(&[], "fp", &front).unwrap();
        assert_eq!(empty.coverage, 0.0);
        assert!(empty.is_sound());

        let mut archive = front.entries.clone();
        archive.push(entry(7, [0.5, 0.0, 0.0, 0.0]));
        let report = verify_archive(&archive, "fp", &front).unwrap();
        assert_eq!(report.spurious.len(), 1);
        assert_eq!(report.spurious[0].entry.rule, archive[2].rule);
        assert_eq!(report.spurious[0].witness.rule, front.entries[0].rule);

        assert!(matches!(verify_archive(&archive, "other", &front), Err(Error::CatalogMismatch(_))));
    }
}
