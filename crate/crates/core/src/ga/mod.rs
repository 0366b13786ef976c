//! Michigan-style multi-objective genetic algorithm: every chromosome is one
//! rule, parents are drawn by roulette over reciprocal Pareto rank, and the
//! output is a Pareto archive of the rules found.

pub mod archive;
pub mod chromosome;
pub mod config;
pub mod evolve;
pub mod operators;
pub mod selection;

pub use archive::{select_final, update_archive, ArchiveEntry, ParetoArchive};
pub use chromosome::{repair, Chromosome};
pub use config::{GAConfig, MaskOp, DEFAULT_MAX_RULE_ITEMS};
pub use evolve::{evolve, run_evolution, seed_population, EvolutionRun, GenerationStats};
pub use operators::{crossover, mutate, CrossoverMode, MutationKind};
pub use selection::{pareto_rank_fitness, roulette_select};
