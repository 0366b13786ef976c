//! Generational loop: evaluate, rank, select, breed, archive.

use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::archive::ParetoArchive;
use super::chromosome::{repair, Chromosome};
use super::config::GAConfig;
use super::operators::{crossover, mutate, CrossoverMode};
use super::selection::{pareto_rank_fitness, roulette_index};
use crate::apriori::FrequentItemset;
use crate::error::{Error, Result};
use crate::exec;
use crate::metrics::{evaluate_rule_with, Evaluation, RuleMetrics};
use crate::store::{BinaryTransactionDB, Bitmap, ItemLayout};

/// Progress of one generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub archive_size: usize,
    pub changed: bool,
    /// Best archived value per objective (cf, completeness, interestingness,
    /// comprehensibility); `None` while the archive is empty.
    pub best: Option<[f64; 4]>,
}

#[derive(Clone, Debug)]
pub struct EvolutionRun {
    pub archive: ParetoArchive,
    pub generations: usize,
    pub history: Vec<GenerationStats>,
}

/// Encodes frequent itemsets (size >= 2) as rules: an itemset is picked with
/// probability proportional to its support, then split at random into two
/// non-empty sides.
pub fn seed_population<R: Rng + ?Sized>(
    frequent: &[FrequentItemset],
    cfg: &GAConfig,
    layout: &ItemLayout,
    rng: &mut R,
) -> Result<Vec<Chromosome>> {
    let n_items = layout.item_attribute.len();
    let max = cfg.max_conditions();
    let pool: Vec<&FrequentItemset> = frequent
        .iter()
        .filter(|f| f.itemset.len() >= 2 && f.itemset.len() <= max)
        .collect();
    if pool.is_empty() {
        return Err(Error::NoSeedItemsets);
    }
    if let Some(bad) = pool.iter().flat_map(|f| f.itemset.items()).find(|i| i.index() >= n_items) {
        return Err(Error::UnknownItem(bad.0));
    }
    let weights: Vec<f64> = pool.iter().map(|f| f.support_count as f64).collect();
    let mut population = Vec::with_capacity(cfg.population_size);
    while population.len() < cfg.population_size {
        let pick = roulette_index(&weights, rng)?;
        let items = pool[pick].itemset.items();
        let ch = loop {
            let mut ch = Chromosome::new(Bitmap::new(n_items), Bitmap::new(n_items));
            for id in items {
                ch.side_mut(rng.gen_bool(0.5)).set(id.index());
            }
            if !ch.antecedent.none() && !ch.consequent.none() {
                break ch;
            }
        };
        if let Some(ch) = repair(&ch, layout, max, rng) {
            population.push(ch);
        }
    }
    Ok(population)
}

fn evaluate(db: &BinaryTransactionDB, population: &[Chromosome], cfg: &GAConfig) -> Vec<Option<RuleMetrics>> {
    exec::map(cfg.execution, population, |ch| {
        match evaluate_rule_with(db, &ch.to_rule(), cfg.comprehensibility) {
            Ok(Evaluation::Feasible(m)) => Some(m),
            _ => None,
        }
    })
}

fn best_objectives(archive: &ParetoArchive) -> Option<[f64; 4]> {
    let mut entries = archive.entries().iter();
    let mut best = entries.next()?.metrics.objectives();
    for e in entries {
        for (b, o) in best.iter_mut().zip(e.metrics.objectives()) {
            *b = b.max(o);
        }
    }
    Some(best)
}

pub fn evolve(db: &BinaryTransactionDB, frequent: &[FrequentItemset], cfg: &GAConfig) -> Result<ParetoArchive> {
    Ok(run_evolution(db, frequent, cfg, |_| {})?.archive)
}

/// Runs the GA until the archive has been stable for `stall_generations`
/// consecutive generations after at least `min_generations`, calling
/// `observe` once per generation.
pub fn run_evolution<F: FnMut(&GenerationStats)>(
    db: &BinaryTransactionDB,
    frequent: &[FrequentItemset],
    cfg: &GAConfig,
    mut observe: F,
) -> Result<EvolutionRun> {
    cfg.validate()?;
    let layout = db.layout();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut population = seed_population(frequent, cfg, layout, &mut rng)?;
    let mut archive = ParetoArchive::new(cfg.archive_capacity);
    let mut history = Vec::new();
    let mut stall = 0usize;
    let mut generation = 0usize;

    loop {
        let metrics = evaluate(db, &population, cfg);
        let mut changed = false;
        for (ch, m) in population.iter().zip(&metrics) {
            if let Some(m) = m {
                changed |= archive.insert(ch.to_rule(), *m);
            }
        }
        stall = if changed { 0 } else { stall + 1 };
        let stats = GenerationStats {
            generation,
            archive_size: archive.len(),
            changed,
            best: best_objectives(&archive),
        };
        observe(&stats);
        history.push(stats);
        generation += 1;
        if (generation >= cfg.min_generations && stall >= cfg.stall_generations) || generation >= cfg.max_generations {
            break;
        }

        let fitness = pareto_rank_fitness(&metrics);
        let elites = archive.len().min(cfg.population_size / 2);
        let mut next = Vec::with_capacity(cfg.population_size);
        while next.len() < cfg.population_size - elites {
            let p1 = &population[roulette_index(&fitness, &mut rng)?];
            let p2 = &population[roulette_index(&fitness, &mut rng)?];
            let (c1, c2) = if rng.gen::<f64>() < cfg.crossover_rate {
                let mode = CrossoverMode::ALL[rng.gen_range(0..CrossoverMode::ALL.len())];
                crossover(p1, p2, mode, cfg, layout, &mut rng)
            } else {
                (p1.clone(), p2.clone())
            };
            next.push(mutate(&c1, cfg, layout, &mut rng));
            if next.len() < cfg.population_size - elites {
                next.push(mutate(&c2, cfg, layout, &mut rng));
            }
        }
        let n_items = db.n_items();
        for i in sample(&mut rng, archive.len(), elites) {
            next.push(Chromosome::from_rule(&archive.entries()[i].rule, n_items));
        }
        population = next;
    }

    Ok(EvolutionRun {
        archive,
        generations: generation,
        history,
    })
}
