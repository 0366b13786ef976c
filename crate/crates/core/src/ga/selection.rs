use rand::Rng;

use crate::error::{Error, Result};
use crate::metrics::{dominates, RuleMetrics};

/// Smallest weight a roulette slot can have.
pub const FITNESS_FLOOR: f64 = 1e-12;

/// Pareto rank of each feasible member: 0 for the non-dominated front, `k`
/// for the front left after peeling ranks below `k`. Infeasible members get `None`.
pub fn pareto_ranks(metrics: &[Option<RuleMetrics>]) -> Vec<Option<usize>> {
    let n = metrics.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominating: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let Some(mi) = &metrics[i] else { continue };
        for j in i + 1..n {
            let Some(mj) = &metrics[j] else { continue };
            if dominates(mi, mj) {
                dominating[i].push(j);
                dominated_by[j] += 1;
            } else if dominates(mj, mi) {
                dominating[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut ranks = vec![None; n];
    let mut front: Vec<usize> = (0..n).filter(|&i| metrics[i].is_some() && dominated_by[i] == 0).collect();
    let mut rank = 0;
    while !front.is_empty() {
        let mut next = Vec::new();
        for &i in &front {
            ranks[i] = Some(rank);
            for &j in &dominating[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        front = next;
        rank += 1;
    }
    ranks
}

/// Roulette weights `1 / (1 + rank)`; infeasible members get `1 / (2 + max rank)`.
pub fn pareto_rank_fitness(metrics: &[Option<RuleMetrics>]) -> Vec<f64> {
    let ranks = pareto_ranks(metrics);
    let max_rank = ranks.iter().flatten().copied().max().unwrap_or(0);
    ranks
        .into_iter()
        .map(|r| match r {
            Some(r) => 1.0 / (1.0 + r as f64),
            None => 1.0 / (2.0 + max_rank as f64),
        })
        .collect()
}

/// One fitness-proportional draw.
pub fn roulette_index<R: Rng + ?Sized>(fitness: &[f64], rng: &mut R) -> Result<usize> {
    if fitness.is_empty() {
        return Err(Error::Contract("roulette over an empty population".into()));
    }
    let weight = |f: f64| if f.is_finite() { f.max(FITNESS_FLOOR) } else { FITNESS_FLOOR };
    let total: f64 = fitness.iter().map(|&f| weight(f)).sum();
    let mut spin = rng.gen::<f64>() * total;
    for (i, &f) in fitness.iter().enumerate() {
        spin -= weight(f);
        if spin < 0.0 {
            return Ok(i);
        }
    }
    Ok(fitness.len() - 1)
}

/// Two independent roulette draws; both may pick the same member.
pub fn roulette_select<'a, T, R: Rng + ?Sized>(population: &'a [T], fitness: &[f64], rng: &mut R) -> Result<(&'a T, &'a T)> {
    if population.len() != fitness.len() {
        return Err(Error::Contract("fitness length differs from population".into()));
    }
    let a = roulette_index(fitness, rng)?;
    let b = roulette_index(fitness, rng)?;
    Ok((&population[a], &population[b]))
}
