//! Rule quality objectives computed from joint row counts.
//!
//! All four objectives are maximized:
//!
//! * confidence factor `|A & C| / |A|`
//! * completeness `|A & C| / |C|`
//! * interestingness `|A & C| - |A| * |C| / N`
//! * comprehensibility `ln(1 + |C|) / ln(1 + |A & C|)`

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::store::{BinaryTransactionDB, JointCounts, Itemset};

/// `antecedent => consequent` over disjoint, non-empty itemsets.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub antecedent: Itemset,
    pub consequent: Itemset,
}

impl Rule {
    pub fn new(antecedent: Itemset, consequent: Itemset) -> Result<Self> {
        if antecedent.is_empty() || consequent.is_empty() {
            return Err(Error::Contract("rule sides must be non-empty".into()));
        }
        if !antecedent.is_disjoint(&consequent) {
            return Err(Error::Contract("antecedent and consequent overlap".into()));
        }
        Ok(Rule { antecedent, consequent })
    }

    pub fn len(&self) -> usize {
        self.antecedent.len() + self.consequent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |s: &Itemset| s.items().iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{{{}}} => {{{}}}", side(&self.antecedent), side(&self.consequent))
    }
}

/// Which comprehensibility formula to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComprehensibilityVariant {
    /// `ln(1 + |C|) / ln(1 + |A & C|)` over row counts.
    #[default]
    RowCount,
    /// `ln(1 + #consequent conditions) / ln(1 + #rule conditions)`.
    AttributeCount,
}

impl std::str::FromStr for ComprehensibilityVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "row-count" => Ok(ComprehensibilityVariant::RowCount),
            "attribute-count" => Ok(ComprehensibilityVariant::AttributeCount),
            other => Err(Error::InvalidParameter(format!("unknown comprehensibility variant `{other}`"))),
        }
    }
}

impl fmt::Display for ComprehensibilityVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComprehensibilityVariant::RowCount => "row-count",
            ComprehensibilityVariant::AttributeCount => "attribute-count",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleMetrics {
    pub cf: f64,
    pub completeness: f64,
    pub interestingness: f64,
    pub comprehensibility: f64,
    #[serde(flatten)]
    pub counts: JointCounts,
}

impl RuleMetrics {
    pub fn objectives(&self) -> [f64; 4] {
        [self.cf, self.completeness, self.interestingness, self.comprehensibility]
    }
}

fn undefined(what: &str) -> Error {
    Error::InvalidParameter(format!("{what} undefined for these counts"))
}

pub fn confidence_factor(c: &JointCounts) -> Result<f64> {
    if c.n_a == 0 {
        return Err(undefined("confidence factor (|A| = 0)"));
    }
    Ok(c.n_ac as f64 / c.n_a as f64)
}

pub fn completeness(c: &JointCounts) -> Result<f64> {
    if c.n_c == 0 {
        return Err(undefined("completeness (|C| = 0)"));
    }
    Ok(c.n_ac as f64 / c.n_c as f64)
}

pub fn interestingness(c: &JointCounts) -> Result<f64> {
    if c.n == 0 {
        return Err(undefined("interestingness (N = 0)"));
    }
    Ok(c.n_ac as f64 - (c.n_a as f64 * c.n_c as f64) / c.n as f64)
}

pub fn comprehensibility(c: &JointCounts) -> Result<f64> {
    if c.n_ac == 0 {
        return Err(undefined("comprehensibility (|A & C| = 0)"));
    }
    Ok((1.0 + c.n_c as f64).ln() / (1.0 + c.n_ac as f64).ln())
}

fn attribute_count_comprehensibility(consequent_conditions: usize, rule_conditions: usize) -> f64 {
    (1.0 + consequent_conditions as f64).ln() / (1.0 + rule_conditions as f64).ln()
}

/// Result of scoring a rule: feasible rules carry all four objectives,
/// infeasible ones only the counts that made a metric undefined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Evaluation {
    Feasible(RuleMetrics),
    Infeasible(JointCounts),
}

impl Evaluation {
    pub fn metrics(&self) -> Option<&RuleMetrics> {
        match self {
            Evaluation::Feasible(m) => Some(m),
            Evaluation::Infeasible(_) => None,
        }
    }

    pub fn counts(&self) -> &JointCounts {
        match self {
            Evaluation::Feasible(m) => &m.counts,
            Evaluation::Infeasible(c) => c,
        }
    }
}

/// Scores precomputed counts. `conditions` gives (consequent, whole rule)
/// condition counts for the attribute-count variant.
pub fn score(counts: JointCounts, variant: ComprehensibilityVariant, conditions: (usize, usize)) -> Evaluation {
    let (Ok(cf), Ok(completeness), Ok(interestingness), Ok(row_count)) = (
        confidence_factor(&counts),
        self::completeness(&counts),
        self::interestingness(&counts),
        self::comprehensibility(&counts),
    ) else {
        return Evaluation::Infeasible(counts);
    };
    let comprehensibility = match variant {
        ComprehensibilityVariant::RowCount => row_count,
        ComprehensibilityVariant::AttributeCount => attribute_count_comprehensibility(conditions.0, conditions.1),
    };
    Evaluation::Feasible(RuleMetrics {
        cf,
        completeness,
        interestingness,
        comprehensibility,
        counts,
    })
}

/// Number of distinct attributes a side constrains.
pub fn condition_count(db: &BinaryTransactionDB, s: &Itemset) -> usize {
    let layout = db.layout();
    let mut n = 0;
    let mut last = None;
    for &i in s.items() {
        let a = layout.attribute_of(i);
        if last != Some(a) {
            n += 1;
            last = Some(a);
        }
    }
    n
}

pub fn evaluate_rule(db: &BinaryTransactionDB, rule: &Rule) -> Result<Evaluation> {
    evaluate_rule_with(db, rule, ComprehensibilityVariant::RowCount)
}

pub fn evaluate_rule_with(db: &BinaryTransactionDB, rule: &Rule, variant: ComprehensibilityVariant) -> Result<Evaluation> {
    let counts = db.joint_counts(&rule.antecedent, &rule.consequent)?;
    let conditions = match variant {
        ComprehensibilityVariant::RowCount => (0, 0),
        ComprehensibilityVariant::AttributeCount => {
            let c = condition_count(db, &rule.consequent);
            (c, c + condition_count(db, &rule.antecedent))
        }
    };
    Ok(score(counts, variant, conditions))
}

/// Pareto dominance with every objective maximized.
pub fn dominates(m1: &RuleMetrics, m2: &RuleMetrics) -> bool {
    dominates_objectives(&m1.objectives(), &m2.objectives())
}

pub fn dominates_objectives(a: &[f64; 4], b: &[f64; 4]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strictly = true;
        }
    }
    strictly
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn jc(n_a: u64, n_c: u64, n_ac: u64, n: u64) -> JointCounts {
        JointCounts::new(n_a, n_c, n_ac, n)
    }

    #[test]
    fn confidence_factor_examples() {
        assert_eq!(confidence_factor(&jc(10, 10, 8, 20)).unwrap(), 0.8);
        assert_eq!(confidence_factor(&jc(1, 1, 1, 20)).unwrap(), 1.0);
        assert_eq!(confidence_factor(&jc(5, 3, 0, 20)).unwrap(), 0.0);
        assert!(confidence_factor(&jc(0, 3, 0, 20)).is_err());
    }

    #[test]
    fn completeness_examples() {
        assert_eq!(completeness(&jc(7, 10, 5, 20)).unwrap(), 0.5);
        assert_eq!(completeness(&jc(9, 4, 4, 20)).unwrap(), 1.0);
        assert_eq!(completeness(&jc(2, 2, 1, 4)).unwrap(), 0.5);
        assert!(completeness(&jc(2, 0, 0, 4)).is_err());
    }

    #[test]
    fn interestingness_examples() {
        assert_eq!(interestingness(&jc(2, 2, 1, 4)).unwrap(), 0.0);
        assert_eq!(interestingness(&jc(2, 2, 2, 4)).unwrap(), 1.0);
        assert_eq!(interestingness(&jc(1, 2, 0, 4)).unwrap(), -0.5);
        assert!(interestingness(&jc(0, 0, 0, 0)).is_err());
    }

    #[test]
    fn comprehensibility_examples() {
        assert_eq!(comprehensibility(&jc(5, 3, 3, 9)).unwrap(), 1.0);
        assert!((comprehensibility(&jc(5, 3, 1, 9)).unwrap() - 2.0).abs() < 1e-15);
        assert!((comprehensibility(&jc(2, 2, 1, 4)).unwrap() - 1.584962500721156).abs() < 1e-12);
        assert!(comprehensibility(&jc(2, 2, 0, 4)).is_err());
    }

    #[test]
    fn infeasible_when_nothing_covered() {
        assert_eq!(
            score(jc(0, 2, 0, 4), ComprehensibilityVariant::RowCount, (0, 0)),
            Evaluation::Infeasible(jc(0, 2, 0, 4))
        );
    }

    #[test]
    fn attribute_count_variant() {
        let e = score(jc(2, 2, 2, 4), ComprehensibilityVariant::AttributeCount, (1, 3));
        let m = e.metrics().unwrap();
        assert!((m.comprehensibility - 2f64.ln() / 4f64.ln()).abs() < 1e-15);
        assert_eq!("attribute-count".parse::<ComprehensibilityVariant>().unwrap(), ComprehensibilityVariant::AttributeCount);
    }

    fn m(o: [f64; 4]) -> RuleMetrics {
        RuleMetrics {
            cf: o[0],
            completeness: o[1],
            interestingness: o[2],
            comprehensibility: o[3],
            counts: jc(1, 1, 1, 1),
        }
    }

    #[test]
    fn dominance_examples() {
        let a = m([1.0, 1.0, 1.0, 2.0]);
        assert!(!dominates(&a, &a));
        assert!(dominates(&a, &m([0.5, 0.5, 0.0, 2.0])));
        let (x, y) = (m([1.0, 0.2, 0.0, 1.0]), m([0.2, 1.0, 0.0, 1.0]));
        assert!(!dominates(&x, &y) && !dominates(&y, &x));
    }

    #[test]
    fn metrics_serialize_flat() {
        let v = serde_json::to_value(m([1.0, 0.5, 0.25, 1.5])).unwrap();
        for key in ["cf", "completeness", "interestingness", "comprehensibility", "n_a", "n_c", "n_ac", "n"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }

    fn counts() -> impl Strategy<Value = JointCounts> {
        (1u64..200).prop_flat_map(|n| {
            (0..=n, 0..=n).prop_flat_map(move |(a, c)| {
                let lo = (a + c).saturating_sub(n);
                (lo..=a.min(c)).prop_map(move |ac| JointCounts::new(a, c, ac, n))
            })
        })
    }

    proptest! {
        #[test]
        fn count_identity_and_bounds(c in counts()) {
            if let Evaluation::Feasible(m) = score(c, ComprehensibilityVariant::RowCount, (0, 0)) {
                prop_assert!((m.cf * c.n_a as f64 - c.n_ac as f64).abs() < 1e-12 * c.n as f64);
                prop_assert!((m.completeness * c.n_c as f64 - c.n_ac as f64).abs() < 1e-12 * c.n as f64);
                prop_assert!(m.comprehensibility >= 1.0);
                prop_assert!(m.interestingness.abs() <= c.n as f64);
                prop_assert_eq!(m.interestingness == 0.0, c.n_ac * c.n == c.n_a * c.n_c);
            }
        }
    }
}
