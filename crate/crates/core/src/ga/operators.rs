//! Crossover and mutation over rule chromosomes.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::chromosome::{attribute_groups, condition_count, repair, Chromosome};
use super::config::{GAConfig, MaskOp};
use crate::store::{Bitmap, ItemId, ItemLayout};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossoverMode {
    /// Single cut over the concatenated antecedent and consequent masks.
    Standard,
    /// Combine antecedents so the offspring covers more rows.
    Generalize,
    /// Combine antecedents so the offspring covers fewer rows.
    Specialize,
}

impl CrossoverMode {
    pub const ALL: [CrossoverMode; 3] = [CrossoverMode::Standard, CrossoverMode::Generalize, CrossoverMode::Specialize];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MutationKind {
    /// Swap one item for another value of the same attribute.
    Substitute,
    /// Remove one antecedent condition.
    DropCondition,
    /// Add a condition on an attribute the rule does not use yet.
    AddCondition,
    /// Widen an interval condition by one adjacent bin.
    WidenInterval,
    /// Narrow an interval condition by one end bin.
    NarrowInterval,
}

fn apply(op: MaskOp, a: &Bitmap, b: &Bitmap) -> Bitmap {
    match op {
        MaskOp::And => a.and(b),
        MaskOp::Or => a.or(b),
    }
}

fn other(op: MaskOp) -> MaskOp {
    match op {
        MaskOp::And => MaskOp::Or,
        MaskOp::Or => MaskOp::And,
    }
}

/// Offspring before repair.
pub fn raw_crossover<R: Rng + ?Sized>(
    p1: &Chromosome,
    p2: &Chromosome,
    mode: CrossoverMode,
    generalize_op: MaskOp,
    rng: &mut R,
) -> (Chromosome, Chromosome) {
    match mode {
        CrossoverMode::Standard => {
            let k = p1.n_items();
            let total = 2 * k;
            if total < 2 {
                return (p1.clone(), p2.clone());
            }
            let cut = rng.gen_range(1..total);
            let mut c1 = p1.clone();
            let mut c2 = p2.clone();
            for bit in cut..total {
                let (side, i) = if bit < k { (false, bit) } else { (true, bit - k) };
                let (b1, b2) = (p1.side(side).get(i), p2.side(side).get(i));
                if b2 { c1.side_mut(side).set(i) } else { c1.side_mut(side).clear(i) }
                if b1 { c2.side_mut(side).set(i) } else { c2.side_mut(side).clear(i) }
            }
            (c1, c2)
        }
        CrossoverMode::Generalize | CrossoverMode::Specialize => {
            let op = if mode == CrossoverMode::Generalize { generalize_op } else { other(generalize_op) };
            let ant = apply(op, &p1.antecedent, &p2.antecedent);
            (
                Chromosome::new(ant.clone(), p1.consequent.clone()),
                Chromosome::new(ant, p2.consequent.clone()),
            )
        }
    }
}

/// Crossover followed by repair; an irreparable child is replaced by a
/// copy of its parent.
pub fn crossover<R: Rng + ?Sized>(
    p1: &Chromosome,
    p2: &Chromosome,
    mode: CrossoverMode,
    cfg: &GAConfig,
    layout: &ItemLayout,
    rng: &mut R,
) -> (Chromosome, Chromosome) {
    let (c1, c2) = raw_crossover(p1, p2, mode, cfg.generalize_operator, rng);
    let max = cfg.max_conditions();
    let c1 = repair(&c1, layout, max, rng).unwrap_or_else(|| p1.clone());
    let c2 = repair(&c2, layout, max, rng).unwrap_or_else(|| p2.clone());
    (c1, c2)
}

fn used_attributes(ch: &Chromosome, layout: &ItemLayout) -> Vec<bool> {
    let mut used = vec![false; layout.n_attributes()];
    for i in ch.antecedent.iter_ones().chain(ch.consequent.iter_ones()) {
        used[layout.attribute_of(ItemId(i as u32))] = true;
    }
    used
}

/// Interval conditions as (consequent side?, items of the run).
fn interval_runs(ch: &Chromosome, layout: &ItemLayout) -> Vec<(bool, Vec<ItemId>)> {
    [false, true]
        .into_iter()
        .flat_map(|side| {
            attribute_groups(ch.side(side), layout)
                .into_iter()
                .filter(|(a, _)| layout.interval[*a])
                .map(move |(_, items)| (side, items))
        })
        .collect()
}

/// Mutation kinds that can change `ch`.
pub fn applicable_mutations(ch: &Chromosome, layout: &ItemLayout, max_conditions: usize) -> Vec<MutationKind> {
    let mut out = Vec::new();
    let substitutable = ch
        .antecedent
        .iter_ones()
        .chain(ch.consequent.iter_ones())
        .any(|i| layout.attribute_items[layout.attribute_of(ItemId(i as u32))].len() > 1);
    if substitutable {
        out.push(MutationKind::Substitute);
    }
    if condition_count(&ch.antecedent, layout) >= 2 {
        out.push(MutationKind::DropCondition);
    }
    let conditions = condition_count(&ch.antecedent, layout) + condition_count(&ch.consequent, layout);
    let used = used_attributes(ch, layout);
    if conditions < max_conditions && (0..layout.n_attributes()).any(|a| !used[a] && !layout.attribute_items[a].is_empty()) {
        out.push(MutationKind::AddCondition);
    }
    let runs = interval_runs(ch, layout);
    if runs.iter().any(|(_, items)| items.len() < layout.attribute_items[layout.attribute_of(items[0])].len()) {
        out.push(MutationKind::WidenInterval);
    }
    if runs.iter().any(|(_, items)| items.len() > 1) {
        out.push(MutationKind::NarrowInterval);
    }
    out
}

/// Applies one mutation kind without repair.
pub fn apply_mutation<R: Rng + ?Sized>(ch: &Chromosome, kind: MutationKind, layout: &ItemLayout, rng: &mut R) -> Chromosome {
    let mut out = ch.clone();
    match kind {
        MutationKind::Substitute => {
            let candidates: Vec<(bool, ItemId)> = [false, true]
                .into_iter()
                .flat_map(|side| ch.side(side).iter_ones().map(move |i| (side, ItemId(i as u32))))
                .filter(|&(_, id)| layout.attribute_items[layout.attribute_of(id)].len() > 1)
                .collect();
            if let Some(&(side, id)) = candidates.choose(rng) {
                let domain = &layout.attribute_items[layout.attribute_of(id)];
                let others: Vec<ItemId> = domain.iter().copied().filter(|&x| x != id).collect();
                let new = *others.choose(rng).expect("attribute has another value");
                out.side_mut(side).clear(id.index());
                out.side_mut(side).set(new.index());
            }
        }
        MutationKind::DropCondition => {
            let groups = attribute_groups(&ch.antecedent, layout);
            if groups.len() >= 2 {
                let (_, items) = &groups[rng.gen_range(0..groups.len())];
                for id in items {
                    out.antecedent.clear(id.index());
                }
            }
        }
        MutationKind::AddCondition => {
            let used = used_attributes(ch, layout);
            let free: Vec<usize> = (0..layout.n_attributes())
                .filter(|&a| !used[a] && !layout.attribute_items[a].is_empty())
                .collect();
            if let Some(&a) = free.choose(rng) {
                let id = *layout.attribute_items[a].choose(rng).expect("non-empty attribute");
                out.antecedent.set(id.index());
            }
        }
        MutationKind::WidenInterval => {
            let runs: Vec<_> = interval_runs(ch, layout)
                .into_iter()
                .filter(|(_, items)| items.len() < layout.attribute_items[layout.attribute_of(items[0])].len())
                .collect();
            if let Some((side, items)) = runs.choose(rng) {
                let domain = &layout.attribute_items[layout.attribute_of(items[0])];
                let lo = layout.position_in_attribute(items[0]);
                let hi = layout.position_in_attribute(*items.last().unwrap());
                let mut ends = Vec::new();
                if lo > 0 {
                    ends.push(domain[lo - 1]);
                }
                if hi + 1 < domain.len() {
                    ends.push(domain[hi + 1]);
                }
                if let Some(id) = ends.choose(rng) {
                    out.side_mut(*side).set(id.index());
                }
            }
        }
        MutationKind::NarrowInterval => {
            let runs: Vec<_> = interval_runs(ch, layout).into_iter().filter(|(_, items)| items.len() > 1).collect();
            if let Some((side, items)) = runs.choose(rng) {
                let end = if rng.gen_bool(0.5) { items[0] } else { *items.last().unwrap() };
                out.side_mut(*side).clear(end.index());
            }
        }
    }
    out
}

fn is_generalize_specialize(kind: MutationKind) -> bool {
    !matches!(kind, MutationKind::Substitute)
}

/// With probability `mutation_rate`, applies exactly one applicable
/// mutation and repairs the result. Irreparable results leave `ch` unchanged.
pub fn mutate<R: Rng + ?Sized>(ch: &Chromosome, cfg: &GAConfig, layout: &ItemLayout, rng: &mut R) -> Chromosome {
    if rng.gen::<f64>() >= cfg.mutation_rate {
        return ch.clone();
    }
    let max = cfg.max_conditions();
    let options = applicable_mutations(ch, layout, max);
    if options.is_empty() {
        return ch.clone();
    }
    let want_structural = rng.gen::<f64>() < cfg.specialize_generalize_probability;
    let preferred: Vec<MutationKind> = options
        .iter()
        .copied()
        .filter(|&k| is_generalize_specialize(k) == want_structural)
        .collect();
    let pool = if preferred.is_empty() { &options } else { &preferred };
    let kind = *pool.choose(rng).expect("non-empty pool");
    let mutated = apply_mutation(ch, kind, layout, rng);
    repair(&mutated, layout, max, rng).unwrap_or_else(|| ch.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::sessions_layout;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn ones(b: &Bitmap) -> Vec<usize> {
        b.iter_ones().collect()
    }

    #[test]
    fn generalize_on_identical_parents_is_identity() {
        let layout = sessions_layout();
        let cfg = GAConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = Chromosome::from_ids(8, &[0, 3], &[5]);
        for mode in CrossoverMode::ALL {
            let (a, b) = crossover(&p, &p, mode, &cfg, &layout, &mut rng);
            assert_eq!((a, b), (p.clone(), p.clone()), "{mode:?}");
        }
    }

    #[test]
    fn specialize_ors_and_generalize_ands_antecedents() {
        // items 0,1,2 stand for a,b,c; 5 and 6 are consequents
        let layout = ItemLayout::flat(8);
        let cfg = GAConfig { max_rule_items: None, ..GAConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p1 = Chromosome::from_ids(8, &[0, 1], &[5]);
        let p2 = Chromosome::from_ids(8, &[1, 2], &[6]);

        let (s1, s2) = crossover(&p1, &p2, CrossoverMode::Specialize, &cfg, &layout, &mut rng);
        assert_eq!(ones(&s1.antecedent), [0, 1, 2]);
        assert_eq!(ones(&s2.antecedent), [0, 1, 2]);
        assert_eq!((ones(&s1.consequent), ones(&s2.consequent)), (vec![5], vec![6]));

        let (g1, g2) = crossover(&p1, &p2, CrossoverMode::Generalize, &cfg, &layout, &mut rng);
        assert_eq!(ones(&g1.antecedent), [1]);
        assert_eq!(ones(&g2.antecedent), [1]);

        // switched semantics
        let flipped = GAConfig { generalize_operator: MaskOp::Or, ..cfg };
        let (g1, _) = crossover(&p1, &p2, CrossoverMode::Generalize, &flipped, &layout, &mut rng);
        assert_eq!(ones(&g1.antecedent), [0, 1, 2]);
    }

    #[test]
    fn empty_and_falls_back_to_parents() {
        let layout = ItemLayout::flat(8);
        let cfg = GAConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p1 = Chromosome::from_ids(8, &[0], &[5]);
        let p2 = Chromosome::from_ids(8, &[2], &[6]);
        let (g1, g2) = crossover(&p1, &p2, CrossoverMode::Generalize, &cfg, &layout, &mut rng);
        assert_eq!((g1, g2), (p1, p2));
    }

    #[test]
    fn standard_crossover_conserves_bits_per_position() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p1 = Chromosome::from_ids(8, &[0, 3], &[5]);
        let p2 = Chromosome::from_ids(8, &[2], &[4, 7]);
        for _ in 0..50 {
            let (c1, c2) = raw_crossover(&p1, &p2, CrossoverMode::Standard, MaskOp::And, &mut rng);
            for side in [false, true] {
                for i in 0..8 {
                    let parents = p1.side(side).get(i) as u8 + p2.side(side).get(i) as u8;
                    let kids = c1.side(side).get(i) as u8 + c2.side(side).get(i) as u8;
                    assert_eq!(parents, kids);
                }
            }
        }
    }

    #[test]
    fn zero_rate_never_mutates() {
        let layout = sessions_layout();
        let cfg = GAConfig { mutation_rate: 0.0, ..GAConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = Chromosome::from_ids(8, &[0, 3], &[5]);
        for _ in 0..100 {
            assert_eq!(mutate(&ch, &cfg, &layout, &mut rng), ch);
        }
    }

    #[test]
    fn drop_condition_removes_one_of_two() {
        let layout = sessions_layout();
        let ch = Chromosome::from_ids(8, &[0, 3], &[5]);
        let mut seen = HashSet::new();
        for seed in 0..40 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = apply_mutation(&ch, MutationKind::DropCondition, &layout, &mut rng);
            seen.insert(ones(&out.antecedent));
            assert_eq!(ones(&out.consequent), [5]);
        }
        assert_eq!(seen, HashSet::from([vec![0], vec![3]]));
        let single = Chromosome::from_ids(8, &[0], &[5]);
        assert!(!applicable_mutations(&single, &layout, usize::MAX).contains(&MutationKind::DropCondition));
    }

    #[test]
    fn substitute_stays_within_attribute() {
        let layout = sessions_layout();
        let ch = Chromosome::from_ids(8, &[3], &[5]);
        for seed in 0..40 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = apply_mutation(&ch, MutationKind::Substitute, &layout, &mut rng);
            let all: Vec<usize> = ones(&out.antecedent).into_iter().chain(ones(&out.consequent)).collect();
            assert_eq!(all.len(), 2);
            assert!(all != [3, 5]);
            assert!(ones(&out.antecedent) == [4] || ones(&out.consequent) == [6] || ones(&out.consequent) == [7]);
        }
    }

    #[test]
    fn add_condition_uses_free_attribute() {
        let layout = sessions_layout();
        let ch = Chromosome::from_ids(8, &[3], &[5]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let out = apply_mutation(&ch, MutationKind::AddCondition, &layout, &mut rng);
        let added: Vec<usize> = ones(&out.antecedent).into_iter().filter(|&i| i != 3).collect();
        assert_eq!(added.len(), 1);
        assert!(added[0] <= 2, "country item expected, got {added:?}");
        assert!(!applicable_mutations(&ch, &layout, 2).contains(&MutationKind::AddCondition));
    }

    #[test]
    fn interval_widen_to_merged_bin() {
        use crate::dataset::{binarize, discretize, parse_csv, CsvOptions};
        let ds = parse_csv("age,city\n18,L\n19,L\n20,G\n21,L\n".as_bytes(), &CsvOptions::default()).unwrap();
        let ds = discretize(&ds, "age", &[18.0, 20.0, 22.0]).unwrap();
        let (cat, db) = binarize(&ds, None).unwrap();
        let layout = db.layout();
        let bin = cat.id_of("age", "20..21").unwrap();
        let city = cat.id_of("city", "L").unwrap();
        let ch = Chromosome::from_ids(cat.len(), &[bin.0], &[city.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let wide = apply_mutation(&ch, MutationKind::WidenInterval, layout, &mut rng);
        let rule = wide.to_rule();
        assert_eq!(cat.describe(&rule.antecedent), ["age=18..21"]);
        assert!(crate::ga::chromosome::is_valid(&wide, layout, usize::MAX));

        let narrow = apply_mutation(&wide, MutationKind::NarrowInterval, layout, &mut rng);
        assert_eq!(narrow.antecedent.count_ones(), 1);
        assert!(!applicable_mutations(&ch, layout, usize::MAX).contains(&MutationKind::NarrowInterval));
    }

    #[test]
    fn mutation_output_is_always_valid() {
        let layout = sessions_layout();
        let cfg = GAConfig { mutation_rate: 1.0, ..GAConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut ch = Chromosome::from_ids(8, &[0, 3], &[5]);
        for _ in 0..500 {
            ch = mutate(&ch, &cfg, &layout, &mut rng);
            assert!(crate::ga::chromosome::is_valid(&ch, &layout, usize::MAX), "{ch:?}");
        }
    }
}
