use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::metrics::{dominates, Rule, RuleMetrics};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub rule: Rule,
    pub metrics: RuleMetrics,
}

/// Mutually non-dominated rules found so far.
#[derive(Clone, Debug, Default)]
pub struct ParetoArchive {
    entries: Vec<ArchiveEntry>,
    rules: HashSet<Rule>,
    capacity: Option<usize>,
}

impl PartialEq for ParetoArchive {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries && self.capacity == other.capacity
    }
}

impl ParetoArchive {
    pub fn new(capacity: Option<usize>) -> Self {
        ParetoArchive {
            entries: Vec::new(),
            rules: HashSet::new(),
            capacity,
        }
    }

    pub fn from_entries(entries: impl IntoIterator<Item = ArchiveEntry>) -> Self {
        let mut a = ParetoArchive::new(None);
        for e in entries {
            a.insert(e.rule, e.metrics);
        }
        a
    }

    pub fn entries(&self) -> &[ArchiveEntry] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<ArchiveEntry> {
        self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> Option<usize> {
        self.capacity
    }

    pub fn contains_rule(&self, rule: &Rule) -> bool {
        self.rules.contains(rule)
    }

    /// Adds a feasible rule unless it is already present or dominated by an
    /// entry; entries it dominates are evicted. Returns whether the archive
    /// changed.
    pub fn insert(&mut self, rule: Rule, metrics: RuleMetrics) -> bool {
        if self.rules.contains(&rule) || self.entries.iter().any(|e| dominates(&e.metrics, &metrics)) {
            return false;
        }
        let rules = &mut self.rules;
        self.entries.retain(|e| {
            let keep = !dominates(&metrics, &e.metrics);
            if !keep {
                rules.remove(&e.rule);
            }
            keep
        });
        self.rules.insert(rule.clone());
        self.entries.push(ArchiveEntry { rule, metrics });
        if let Some(cap) = self.capacity {
            while self.entries.len() > cap {
                let victim = self.most_crowded();
                let e = self.entries.remove(victim);
                self.rules.remove(&e.rule);
            }
        }
        true
    }

    /// Index of the entry closest to another in range-normalized objective space.
    fn most_crowded(&self) -> usize {
        let objs: Vec<[f64; 4]> = self.entries.iter().map(|e| e.metrics.objectives()).collect();
        let mut span = [0f64; 4];
        for k in 0..4 {
            let (lo, hi) = objs
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), o| (lo.min(o[k]), hi.max(o[k])));
            span[k] = if hi > lo { hi - lo } else { 1.0 };
        }
        let mut best = (0, f64::INFINITY);
        for (i, a) in objs.iter().enumerate() {
            let nearest = objs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, b)| (0..4).map(|k| ((a[k] - b[k]) / span[k]).powi(2)).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            if nearest < best.1 {
                best = (i, nearest);
            }
        }
        best.0
    }
}

/// Functional form of [`ParetoArchive::insert`].
pub fn update_archive(mut q: ParetoArchive, rule: Rule, metrics: RuleMetrics) -> (ParetoArchive, bool) {
    let changed = q.insert(rule, metrics);
    (q, changed)
}

/// Final ranking: descending interestingness, then descending
/// comprehensibility, then ascending rule item ids. Returns the first `k`.
pub fn select_final(q: &ParetoArchive, k: Option<usize>) -> Vec<ArchiveEntry> {
    let mut out = q.entries.clone();
    out.sort_by(|a, b| {
        b.metrics
            .interestingness
            .total_cmp(&a.metrics.interestingness)
            .then_with(|| b.metrics.comprehensibility.total_cmp(&a.metrics.comprehensibility))
            .then_with(|| a.rule.cmp(&b.rule))
    });
    out.truncate(k.unwrap_or(usize::MAX));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::{Itemset, JointCounts};

    fn rule(a: u32, c: u32) -> Rule {
        Rule::new(Itemset::from_ids([a]), Itemset::from_ids([c])).unwrap()
    }

    fn m(o: [f64; 4]) -> RuleMetrics {
        RuleMetrics {
            cf: o[0],
            completeness: o[1],
            interestingness: o[2],
            comprehensibility: o[3],
            counts: JointCounts::new(1, 1, 1, 1),
        }
    }

    fn assert_sound(q: &ParetoArchive) {
        for a in q.entries() {
            for b in q.entries() {
                assert!(!dominates(&a.metrics, &b.metrics));
            }
        }
    }

    #[test]
    fn first_insert_changes() {
        let (q, changed) = update_archive(ParetoArchive::new(None), rule(0, 1), m([0.5; 4]));
        assert!(changed);
        assert_eq!(q.len(), 1);
    }

    #[test]
    fn duplicate_rule_ignored() {
        let mut q = ParetoArchive::new(None);
        assert!(q.insert(rule(0, 1), m([0.5; 4])));
        assert!(!q.insert(rule(0, 1), m([0.5; 4])));
        assert_eq!(q.len(), 1);
        // same vector, different rule: kept alongside
        assert!(q.insert(rule(1, 0), m([0.5; 4])));
        assert_eq!(q.len(), 2);
    }

    #[test]
    fn dominated_candidate_rejected() {
        let mut q = ParetoArchive::new(None);
        q.insert(rule(0, 1), m([1.0; 4]));
        assert!(!q.insert(rule(2, 3), m([0.5; 4])));
    }

    #[test]
    fn candidate_evicts_what_it_dominates() {
        let mut q = ParetoArchive::new(None);
        q.insert(rule(0, 1), m([0.5, 0.5, 0.0, 1.0]));
        q.insert(rule(0, 2), m([0.4, 0.6, 0.0, 1.0]));
        q.insert(rule(0, 3), m([0.1, 0.1, 5.0, 1.0]));
        assert_eq!(q.len(), 3);
        assert!(q.insert(rule(4, 5), m([0.6, 0.6, 0.0, 1.0])));
        assert_eq!(q.len(), 2);
        assert!(q.contains_rule(&rule(0, 3)) && q.contains_rule(&rule(4, 5)));
        assert!(!q.contains_rule(&rule(0, 1)));
        assert_sound(&q);
    }

    #[test]
    fn capacity_evicts_most_crowded() {
        let mut q = ParetoArchive::new(Some(2));
        q.insert(rule(0, 1), m([1.0, 0.0, 0.0, 1.0]));
        q.insert(rule(0, 2), m([0.0, 1.0, 0.0, 1.0]));
        q.insert(rule(0, 3), m([0.01, 0.99, 0.0, 1.0]));
        assert_eq!(q.len(), 2);
        assert!(q.contains_rule(&rule(0, 1)));
    }

    #[test]
    fn select_final_ordering() {
        assert!(select_final(&ParetoArchive::new(None), None).is_empty());
        let mut q = ParetoArchive::new(None);
        q.insert(rule(0, 1), m([1.0, 0.0, 1.0, 1.0]));
        q.insert(rule(0, 2), m([0.0, 1.0, 1.0, 2.0]));
        let out = select_final(&q, None);
        assert_eq!(out[0].rule, rule(0, 2));
        assert_eq!(select_final(&q, Some(10)).len(), 2);
        assert_eq!(select_final(&q, Some(1)).len(), 1);
    }

    #[test]
    fn ties_break_on_rule_order() {
        let mut q = ParetoArchive::new(None);
        q.insert(rule(3, 1), m([1.0, 0.5, 1.0, 1.0]));
        q.insert(rule(0, 1), m([0.5, 1.0, 1.0, 1.0]));
        let out = select_final(&q, None);
        assert_eq!(out[0].rule, rule(0, 1));
    }
}
