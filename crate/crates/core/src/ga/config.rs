use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::metrics::ComprehensibilityVariant;

/// Bitwise operator applied to parent antecedents by generalizing crossover.
/// Specializing crossover uses the other one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaskOp {
    /// Keep only shared conditions: fewer conditions cover more rows.
    #[default]
    And,
    Or,
}

impl std::str::FromStr for MaskOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "and" => Ok(MaskOp::And),
            "or" => Ok(MaskOp::Or),
            other => Err(Error::InvalidParameter(format!("unknown mask operator `{other}`"))),
        }
    }
}

pub const DEFAULT_MAX_RULE_ITEMS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GAConfig {
    pub population_size: usize,
    pub mutation_rate: f64,
    pub crossover_rate: f64,
    pub min_generations: usize,
    pub stall_generations: usize,
    /// Hard stop regardless of archive progress.
    pub max_generations: usize,
    pub rng_seed: u64,
    /// Upper bound on conditions per rule (antecedent plus consequent);
    /// `None` is unbounded, which lets archives grow very large on wide data.
    pub max_rule_items: Option<usize>,
    /// Chance that a mutation generalizes or specializes (drop, add or
    /// interval step) instead of substituting a value.
    pub specialize_generalize_probability: f64,
    pub generalize_operator: MaskOp,
    pub archive_capacity: Option<usize>,
    pub comprehensibility: ComprehensibilityVariant,
    pub execution: Execution,
}

impl Default for GAConfig {
    fn default() -> Self {
        GAConfig {
            population_size: 50,
            mutation_rate: 0.5,
            crossover_rate: 0.8,
            min_generations: 20,
            stall_generations: 10,
            max_generations: 100_000,
            rng_seed: 1,
            max_rule_items: Some(DEFAULT_MAX_RULE_ITEMS),
            specialize_generalize_probability: 0.5,
            generalize_operator: MaskOp::And,
            archive_capacity: None,
            comprehensibility: ComprehensibilityVariant::RowCount,
            execution: Execution::Parallel,
        }
    }
}

impl GAConfig {
    pub fn validate(&self) -> Result<()> {
        let probability = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} = {p} is not a probability")))
            }
        };
        probability("mutation_rate", self.mutation_rate)?;
        probability("crossover_rate", self.crossover_rate)?;
        probability("specialize_generalize_probability", self.specialize_generalize_probability)?;
        let positive = |name: &str, n: usize| {
            if n >= 1 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must be at least 1")))
            }
        };
        positive("population_size", self.population_size)?;
        positive("min_generations", self.min_generations)?;
        positive("stall_generations", self.stall_generations)?;
        positive("max_generations", self.max_generations)?;
        if let Some(m) = self.max_rule_items {
            if m < 2 {
                return Err(Error::InvalidParameter("max_rule_items must be at least 2".into()));
            }
        }
        if self.archive_capacity == Some(0) {
            return Err(Error::InvalidParameter("archive_capacity must be at least 1".into()));
        }
        Ok(())
    }

    pub(crate) fn max_conditions(&self) -> usize {
        self.max_rule_items.unwrap_or(usize::MAX)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let cfg = GAConfig::default();
        cfg.validate().unwrap();
        assert_eq!((cfg.population_size, cfg.mutation_rate, cfg.crossover_rate), (50, 0.5, 0.8));
        assert_eq!(cfg.stall_generations, 10);
    }

    #[test]
    fn rejects_out_of_range() {
        let bad = [
            GAConfig { population_size: 0, ..Default::default() },
            GAConfig { mutation_rate: 1.5, ..Default::default() },
            GAConfig { crossover_rate: -0.1, ..Default::default() },
            GAConfig { stall_generations: 0, ..Default::default() },
            GAConfig { max_rule_items: Some(1), ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }
}
