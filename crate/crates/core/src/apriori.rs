//! Levelwise Apriori over a [`BinaryTransactionDB`].

use std::collections::HashSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::ItemCatalog;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::store::{BinaryTransactionDB, ItemId, Itemset};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequentItemset {
    pub itemset: Itemset,
    pub support_count: u64,
    pub support_fraction: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AprioriOptions {
    /// Inclusive minimum support fraction in (0, 1].
    pub minsup: f64,
    /// Longest itemset to mine; `None` is unbounded.
    pub max_len: Option<usize>,
    pub execution: Execution,
}

impl AprioriOptions {
    pub fn new(minsup: f64) -> Self {
        AprioriOptions {
            minsup,
            max_len: None,
            execution: Execution::default(),
        }
    }
}

/// Whether `count` rows out of `n` meet the inclusive threshold.
#[inline]
pub fn meets_minsup(count: u64, n: usize, minsup: f64) -> bool {
    n > 0 && count as f64 / n as f64 >= minsup
}

/// Join step on a shared (k-1)-prefix followed by the subset prune step.
pub fn generate_candidates(level: &[Itemset]) -> Result<Vec<Itemset>> {
    let Some(first) = level.first() else {
        return Ok(Vec::new());
    };
    let k = first.len();
    if k == 0 || level.iter().any(|s| s.len() != k) {
        return Err(Error::Contract("candidate generation needs non-empty itemsets of one size".into()));
    }
    let mut sorted: Vec<&Itemset> = level.iter().collect();
    sorted.sort();
    sorted.dedup();
    let known: HashSet<&[ItemId]> = sorted.iter().map(|s| s.items()).collect();

    let mut out = Vec::new();
    let mut subset = Vec::with_capacity(k);
    for (i, a) in sorted.iter().enumerate() {
        let a = a.items();
        for b in &sorted[i + 1..] {
            let b = b.items();
            if a[..k - 1] != b[..k - 1] {
                break;
            }
            let mut cand = a.to_vec();
            cand.push(b[k - 1]);
            // a and b are the subsets that drop the last two items
            let all_frequent = (0..k - 1).all(|skip| {
                subset.clear();
                subset.extend(cand.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &x)| x));
                known.contains(subset.as_slice())
            });
            if all_frequent {
                out.push(Itemset::new(cand));
            }
        }
    }
    Ok(out)
}

pub fn mine_frequent(db: &BinaryTransactionDB, minsup: f64) -> Result<Vec<FrequentItemset>> {
    mine_frequent_with(db, &AprioriOptions::new(minsup))
}

/// Every itemset whose support fraction is at least `minsup`, ordered by
/// (size, item ids).
pub fn mine_frequent_with(db: &BinaryTransactionDB, opts: &AprioriOptions) -> Result<Vec<FrequentItemset>> {
    if !(opts.minsup > 0.0 && opts.minsup <= 1.0) {
        return Err(Error::InvalidParameter(format!("minimum support {} outside (0, 1]", opts.minsup)));
    }
    if db.n_rows() == 0 {
        return Err(Error::Contract("cannot mine an empty database".into()));
    }
    let n = db.n_rows();
    let max_len = opts.max_len.unwrap_or(usize::MAX);
    let mut result = Vec::new();
    let mut candidates: Vec<Itemset> = (0..db.n_items() as u32).map(|i| Itemset::from_ids([i])).collect();
    let mut size = 1;
    while !candidates.is_empty() && size <= max_len {
        let counts = exec::map(opts.execution, &candidates, |c| db.support_count(c).expect("candidate ids come from the db"));
        let level: Vec<FrequentItemset> = candidates
            .into_iter()
            .zip(counts)
            .filter(|&(_, c)| meets_minsup(c, n, opts.minsup))
            .map(|(itemset, support_count)| FrequentItemset {
                itemset,
                support_count,
                support_fraction: support_count as f64 / n as f64,
            })
            .collect();
        let frontier: Vec<Itemset> = level.iter().map(|f| f.itemset.clone()).collect();
        result.extend(level);
        candidates = if size < max_len { generate_candidates(&frontier)? } else { Vec::new() };
        size += 1;
    }
    Ok(result)
}

/// One itemset per line: comma-separated `attribute=value` tokens, a tab,
/// the support count, a tab and the support fraction.
pub fn write_frequent<W: Write>(catalog: &ItemCatalog, frequent: &[FrequentItemset], mut out: W) -> std::io::Result<()> {
    for f in frequent {
        writeln!(
            out,
            "{}\t{}\t{}",
            catalog.tokens(&f.itemset).join(", "),
            f.support_count,
            f.support_fraction
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::sessions_db as sessions;

    fn sets(v: &[&[u32]]) -> Vec<Itemset> {
        v.iter().map(|s| Itemset::from_ids(s.iter().copied())).collect()
    }

    #[test]
    fn candidate_examples() {
        assert_eq!(
            generate_candidates(&sets(&[&[0], &[1], &[2]])).unwrap(),
            sets(&[&[0, 1], &[0, 2], &[1, 2]])
        );
        assert!(generate_candidates(&sets(&[&[0, 1], &[0, 2]])).unwrap().is_empty());
        assert_eq!(
            generate_candidates(&sets(&[&[0, 1], &[0, 2], &[1, 2]])).unwrap(),
            sets(&[&[0, 1, 2]])
        );
        assert!(matches!(
            generate_candidates(&sets(&[&[0], &[1, 2]])),
            Err(Error::Contract(_))
        ));
        assert!(generate_candidates(&[]).unwrap().is_empty());
    }

    fn listing(f: &[FrequentItemset]) -> Vec<(Vec<u32>, u64)> {
        f.iter()
            .map(|x| (x.itemset.items().iter().map(|i| i.0).collect(), x.support_count))
            .collect()
    }

    #[test]
    fn sessions_at_half_support() {
        let got = mine_frequent(&sessions(), 0.5).unwrap();
        assert_eq!(
            listing(&got),
            vec![(vec![0], 2), (vec![3], 2), (vec![4], 2), (vec![5], 2), (vec![3, 5], 2)]
        );
        assert_eq!(got[0].support_fraction, 0.5);
    }

    #[test]
    fn sessions_full_support_is_empty() {
        assert!(mine_frequent(&sessions(), 1.0).unwrap().is_empty());
    }

    #[test]
    fn tiny_minsup_keeps_every_nonzero_itemset() {
        let got = mine_frequent(&sessions(), 1e-9).unwrap();
        assert!(got.iter().any(|f| f.itemset == Itemset::from_ids([0, 4, 7])));
        // rows are three one-hot attributes: 4 rows * 7 non-empty subsets, minus repeats
        assert!(got.iter().all(|f| f.support_count > 0));
    }

    #[test]
    fn max_len_bounds_levels() {
        let mut opts = AprioriOptions::new(1e-9);
        opts.max_len = Some(2);
        let got = mine_frequent_with(&sessions(), &opts).unwrap();
        assert!(got.iter().all(|f| f.itemset.len() <= 2));
        assert!(got.iter().any(|f| f.itemset.len() == 2));
    }

    #[test]
    fn rejects_bad_minsup() {
        assert!(matches!(mine_frequent(&sessions(), 0.0), Err(Error::InvalidParameter(_))));
        assert!(matches!(mine_frequent(&sessions(), 1.1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn inclusive_threshold() {
        assert!(meets_minsup(3, 10, 0.3));
        assert!(!meets_minsup(2, 10, 0.3));
    }
}
