//! Rule chromosomes: one antecedent mask and one consequent mask over the
//! item catalog.

use rand::Rng;

use crate::metrics::Rule;
use crate::store::{Bitmap, ItemId, ItemLayout, Itemset};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chromosome {
    pub antecedent: Bitmap,
    pub consequent: Bitmap,
}

impl Chromosome {
    pub fn new(antecedent: Bitmap, consequent: Bitmap) -> Self {
        debug_assert_eq!(antecedent.len(), consequent.len());
        Chromosome { antecedent, consequent }
    }

    pub fn from_rule(rule: &Rule, n_items: usize) -> Self {
        Chromosome::new(rule.antecedent.to_mask(n_items), rule.consequent.to_mask(n_items))
    }

    pub fn from_ids(n_items: usize, antecedent: &[u32], consequent: &[u32]) -> Self {
        Chromosome::new(
            Bitmap::from_indices(n_items, antecedent.iter().map(|&i| i as usize)),
            Bitmap::from_indices(n_items, consequent.iter().map(|&i| i as usize)),
        )
    }

    pub fn n_items(&self) -> usize {
        self.antecedent.len()
    }

    /// Decodes into a rule. Only meaningful for repaired chromosomes.
    pub fn to_rule(&self) -> Rule {
        Rule {
            antecedent: Itemset::from_mask(&self.antecedent),
            consequent: Itemset::from_mask(&self.consequent),
        }
    }

    pub fn side(&self, consequent: bool) -> &Bitmap {
        if consequent {
            &self.consequent
        } else {
            &self.antecedent
        }
    }

    pub fn side_mut(&mut self, consequent: bool) -> &mut Bitmap {
        if consequent {
            &mut self.consequent
        } else {
            &mut self.antecedent
        }
    }
}

/// Set items of `mask` grouped by attribute, in attribute order.
pub(crate) fn attribute_groups(mask: &Bitmap, layout: &ItemLayout) -> Vec<(usize, Vec<ItemId>)> {
    let mut groups: Vec<(usize, Vec<ItemId>)> = Vec::new();
    for i in mask.iter_ones() {
        let id = ItemId(i as u32);
        let a = layout.attribute_of(id);
        match groups.last_mut() {
            Some((last, items)) if *last == a => items.push(id),
            _ => groups.push((a, vec![id])),
        }
    }
    groups
}

pub(crate) fn condition_count(mask: &Bitmap, layout: &ItemLayout) -> usize {
    attribute_groups(mask, layout).len()
}

/// Positions inside the attribute domain form one contiguous run.
fn is_contiguous(items: &[ItemId], layout: &ItemLayout) -> bool {
    let pos: Vec<usize> = items.iter().map(|&i| layout.position_in_attribute(i)).collect();
    pos.windows(2).all(|w| w[1] == w[0] + 1)
}

fn normalize_side<R: Rng + ?Sized>(mask: &mut Bitmap, layout: &ItemLayout, rng: &mut R) {
    for (attr, items) in attribute_groups(mask, layout) {
        if items.len() == 1 {
            continue;
        }
        if layout.interval[attr] {
            if is_contiguous(&items, layout) {
                continue;
            }
            // keep the contiguous run around one randomly chosen bin
            let pick = rng.gen_range(0..items.len());
            let pos: Vec<usize> = items.iter().map(|&i| layout.position_in_attribute(i)).collect();
            let (mut lo, mut hi) = (pick, pick);
            while lo > 0 && pos[lo - 1] + 1 == pos[lo] {
                lo -= 1;
            }
            while hi + 1 < pos.len() && pos[hi] + 1 == pos[hi + 1] {
                hi += 1;
            }
            for (k, id) in items.iter().enumerate() {
                if k < lo || k > hi {
                    mask.clear(id.index());
                }
            }
        } else {
            let keep = rng.gen_range(0..items.len());
            for (k, id) in items.iter().enumerate() {
                if k != keep {
                    mask.clear(id.index());
                }
            }
        }
    }
}

fn drop_random_condition<R: Rng + ?Sized>(mask: &mut Bitmap, layout: &ItemLayout, rng: &mut R) {
    let groups = attribute_groups(mask, layout);
    let (_, items) = &groups[rng.gen_range(0..groups.len())];
    for id in items {
        mask.clear(id.index());
    }
}

/// Restores chromosome invariants: sides disjoint, one item per attribute
/// per side (a contiguous run of bins for interval attributes), and at most
/// `max_conditions` conditions overall. Returns `None` when a side ends up
/// empty.
pub fn repair<R: Rng + ?Sized>(ch: &Chromosome, layout: &ItemLayout, max_conditions: usize, rng: &mut R) -> Option<Chromosome> {
    let mut out = ch.clone();
    out.consequent.and_not_assign(&out.antecedent);
    normalize_side(&mut out.antecedent, layout, rng);
    normalize_side(&mut out.consequent, layout, rng);
    if out.antecedent.none() || out.consequent.none() {
        return None;
    }
    loop {
        let a = condition_count(&out.antecedent, layout);
        let c = condition_count(&out.consequent, layout);
        if a + c <= max_conditions {
            break;
        }
        if a > 1 {
            drop_random_condition(&mut out.antecedent, layout, rng);
        } else if c > 1 {
            drop_random_condition(&mut out.consequent, layout, rng);
        } else {
            return None;
        }
    }
    Some(out)
}

/// Whether `ch` already satisfies every invariant [`repair`] enforces.
pub fn is_valid(ch: &Chromosome, layout: &ItemLayout, max_conditions: usize) -> bool {
    if ch.antecedent.none() || ch.consequent.none() || ch.antecedent.intersects(&ch.consequent) {
        return false;
    }
    let side_ok = |m: &Bitmap| {
        attribute_groups(m, layout)
            .iter()
            .all(|(a, items)| items.len() == 1 || (layout.interval[*a] && is_contiguous(items, layout)))
    };
    side_ok(&ch.antecedent)
        && side_ok(&ch.consequent)
        && condition_count(&ch.antecedent, layout) + condition_count(&ch.consequent, layout) <= max_conditions
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use crate::testutil::sessions_layout;

    #[test]
    fn valid_chromosome_is_a_fixpoint() {
        let layout = sessions_layout();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ch = Chromosome::from_ids(8, &[5], &[3]);
        assert_eq!(repair(&ch, &layout, usize::MAX, &mut rng), Some(ch));
    }

    #[test]
    fn overlapping_single_item_is_irreparable() {
        let layout = sessions_layout();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ch = Chromosome::from_ids(8, &[0], &[0]);
        assert_eq!(repair(&ch, &layout, usize::MAX, &mut rng), None);
    }

    #[test]
    fn keeps_one_value_per_attribute() {
        let layout = sessions_layout();
        let mut seen = std::collections::HashSet::new();
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ch = Chromosome::from_ids(8, &[5, 6], &[3]);
            let fixed = repair(&ch, &layout, usize::MAX, &mut rng).unwrap();
            let ant: Vec<usize> = fixed.antecedent.iter_ones().collect();
            assert!(ant == [5] || ant == [6]);
            seen.insert(ant);
            assert!(is_valid(&fixed, &layout, usize::MAX));
        }
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn trims_to_condition_bound() {
        let layout = sessions_layout();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ch = Chromosome::from_ids(8, &[0, 3], &[5]);
        let fixed = repair(&ch, &layout, 2, &mut rng).unwrap();
        assert_eq!(fixed.antecedent.count_ones(), 1);
        assert_eq!(fixed.consequent.iter_ones().collect::<Vec<_>>(), [5]);
    }

    #[test]
    fn interval_runs_survive_but_gaps_do_not() {
        let layout = ItemLayout {
            item_attribute: vec![0, 0, 0, 1, 1],
            attribute_items: vec![vec![ItemId(0), ItemId(1), ItemId(2)], vec![ItemId(3), ItemId(4)]],
            interval: vec![true, false],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let run = Chromosome::from_ids(5, &[0, 1], &[3]);
        assert_eq!(repair(&run, &layout, usize::MAX, &mut rng), Some(run));
        let gap = Chromosome::from_ids(5, &[0, 2], &[3]);
        let fixed = repair(&gap, &layout, usize::MAX, &mut rng).unwrap();
        assert_eq!(fixed.antecedent.count_ones(), 1);
    }
}
