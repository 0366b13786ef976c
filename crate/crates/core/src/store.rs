//! Packed per-item row bitmaps and the count queries built on them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// Fixed-width packed bit vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Bitmap {
    words: Vec<u64>,
    len: usize,
}

impl Bitmap {
    pub fn new(len: usize) -> Self {
        Bitmap {
            words: vec![0; len.div_ceil(WORD_BITS)],
            len,
        }
    }

    /// A bitmap with every bit in `0..len` set.
    pub fn full(len: usize) -> Self {
        let mut b = Bitmap {
            words: vec![u64::MAX; len.div_ceil(WORD_BITS)],
            len,
        };
        b.mask_tail();
        b
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Bitmap::new(len);
        for i in indices {
            b.set(i);
        }
        b
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        i < self.len && self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / WORD_BITS] &= !(1 << (i % WORD_BITS));
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn none(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn and_assign(&mut self, other: &Bitmap) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn or_assign(&mut self, other: &Bitmap) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Clears every bit that is set in `other`.
    pub fn and_not_assign(&mut self, other: &Bitmap) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn and(&self, other: &Bitmap) -> Bitmap {
        let mut out = self.clone();
        out.and_assign(other);
        out
    }

    pub fn or(&self, other: &Bitmap) -> Bitmap {
        let mut out = self.clone();
        out.or_assign(other);
        out
    }

    /// Popcount of `self & other` without allocating.
    pub fn and_count(&self, other: &Bitmap) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn intersects(&self, other: &Bitmap) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }
}

impl fmt::Debug for Bitmap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter_ones()).finish()
    }
}

/// Dense id of a binarized item.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemId(pub u32);

impl ItemId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Sorted, duplicate-free set of item ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Itemset(Vec<ItemId>);

impl Itemset {
    pub fn new(mut items: Vec<ItemId>) -> Self {
        items.sort_unstable();
        items.dedup();
        Itemset(items)
    }

    pub fn from_ids(ids: impl IntoIterator<Item = u32>) -> Self {
        Itemset::new(ids.into_iter().map(ItemId).collect())
    }

    pub fn empty() -> Self {
        Itemset(Vec::new())
    }

    pub fn items(&self) -> &[ItemId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    pub fn is_disjoint(&self, other: &Itemset) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn union(&self, other: &Itemset) -> Itemset {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Itemset::new(v)
    }

    pub fn is_subset_of(&self, other: &Itemset) -> bool {
        self.0.iter().all(|&i| other.contains(i))
    }

    pub fn to_mask(&self, n_items: usize) -> Bitmap {
        Bitmap::from_indices(n_items, self.0.iter().map(|i| i.index()))
    }

    pub fn from_mask(mask: &Bitmap) -> Itemset {
        Itemset(mask.iter_ones().map(|i| ItemId(i as u32)).collect())
    }
}

impl FromIterator<ItemId> for Itemset {
    fn from_iter<I: IntoIterator<Item = ItemId>>(iter: I) -> Self {
        Itemset::new(iter.into_iter().collect())
    }
}

/// Row counts behind every rule metric: |A|, |C|, |A & C| and N.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointCounts {
    pub n_a: u64,
    pub n_c: u64,
    pub n_ac: u64,
    pub n: u64,
}

impl JointCounts {
    pub fn new(n_a: u64, n_c: u64, n_ac: u64, n: u64) -> Self {
        JointCounts { n_a, n_c, n_ac, n }
    }
}

/// How binarized items group into source attributes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ItemLayout {
    /// Source attribute index of each item.
    pub item_attribute: Vec<u32>,
    /// Items of each attribute, in domain order.
    pub attribute_items: Vec<Vec<ItemId>>,
    /// Whether each attribute is a discretized interval.
    pub interval: Vec<bool>,
}

impl ItemLayout {
    /// Every item is its own attribute.
    pub fn flat(n_items: usize) -> Self {
        ItemLayout {
            item_attribute: (0..n_items as u32).collect(),
            attribute_items: (0..n_items as u32).map(|i| vec![ItemId(i)]).collect(),
            interval: vec![false; n_items],
        }
    }

    pub fn n_attributes(&self) -> usize {
        self.attribute_items.len()
    }

    #[inline]
    pub fn attribute_of(&self, item: ItemId) -> usize {
        self.item_attribute[item.index()] as usize
    }

    /// Position of `item` inside its attribute's domain order.
    pub fn position_in_attribute(&self, item: ItemId) -> usize {
        let attr = self.attribute_of(item);
        self.attribute_items[attr]
            .iter()
            .position(|&i| i == item)
            .expect("layout is consistent")
    }
}

/// Vertical 0/1 transaction matrix: one row bitmap per item.
#[derive(Clone, Debug)]
pub struct BinaryTransactionDB {
    n_rows: usize,
    columns: Vec<Bitmap>,
    layout: ItemLayout,
}

impl BinaryTransactionDB {
    pub fn new(n_rows: usize, columns: Vec<Bitmap>, layout: ItemLayout) -> Result<Self> {
        if columns.len() != layout.item_attribute.len() {
            return Err(Error::Contract(format!(
                "{} columns but layout describes {} items",
                columns.len(),
                layout.item_attribute.len()
            )));
        }
        if layout.item_attribute.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Contract("items of one attribute must have contiguous ids".into()));
        }
        if columns.iter().any(|c| c.len() != n_rows) {
            return Err(Error::Contract("column length differs from row count".into()));
        }
        Ok(BinaryTransactionDB { n_rows, columns, layout })
    }

    /// Builds a DB from horizontal transactions where every item is its own attribute.
    pub fn from_transactions(n_items: usize, transactions: &[Vec<u32>]) -> Result<Self> {
        let mut columns = vec![Bitmap::new(transactions.len()); n_items];
        for (r, t) in transactions.iter().enumerate() {
            for &i in t {
                let col = columns.get_mut(i as usize).ok_or(Error::UnknownItem(i))?;
                col.set(r);
            }
        }
        BinaryTransactionDB::new(transactions.len(), columns, ItemLayout::flat(n_items))
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_items(&self) -> usize {
        self.columns.len()
    }

    pub fn layout(&self) -> &ItemLayout {
        &self.layout
    }

    pub fn column(&self, item: ItemId) -> Result<&Bitmap> {
        self.columns.get(item.index()).ok_or(Error::UnknownItem(item.0))
    }

    fn check(&self, s: &Itemset) -> Result<()> {
        match s.items().iter().find(|i| i.index() >= self.columns.len()) {
            Some(i) => Err(Error::UnknownItem(i.0)),
            None => Ok(()),
        }
    }

    /// Rows containing every item of `s`. The empty itemset covers all rows.
    pub fn cover(&self, s: &Itemset) -> Result<Bitmap> {
        self.check(s)?;
        let mut rows = Bitmap::full(self.n_rows);
        for &i in s.items() {
            rows.and_assign(&self.columns[i.index()]);
        }
        Ok(rows)
    }

    pub fn support_count(&self, s: &Itemset) -> Result<u64> {
        self.check(s)?;
        Ok(match s.items() {
            [] => self.n_rows as u64,
            [a] => self.columns[a.index()].count_ones() as u64,
            [a, b] => self.columns[a.index()].and_count(&self.columns[b.index()]) as u64,
            _ => self.cover(s)?.count_ones() as u64,
        })
    }

    /// Rows satisfying one side of a rule: for each attribute present, the
    /// row must hold one of that attribute's listed items. With at most one
    /// item per attribute this is exactly [`cover`](Self::cover); a run of
    /// several interval bins acts as the union of those bins.
    pub fn cover_condition(&self, s: &Itemset) -> Result<Bitmap> {
        self.check(s)?;
        let mut rows = Bitmap::full(self.n_rows);
        let items = s.items();
        let mut i = 0;
        while i < items.len() {
            let attr = self.layout.attribute_of(items[i]);
            let mut group = self.columns[items[i].index()].clone();
            let mut j = i + 1;
            // items of one attribute are contiguous ids
            while j < items.len() && self.layout.attribute_of(items[j]) == attr {
                group.or_assign(&self.columns[items[j].index()]);
                j += 1;
            }
            rows.and_assign(&group);
            i = j;
        }
        Ok(rows)
    }

    pub fn joint_counts(&self, antecedent: &Itemset, consequent: &Itemset) -> Result<JointCounts> {
        if antecedent.is_empty() || consequent.is_empty() {
            return Err(Error::Contract("rule sides must be non-empty".into()));
        }
        if !antecedent.is_disjoint(consequent) {
            return Err(Error::Contract("antecedent and consequent overlap".into()));
        }
        let a = self.cover_condition(antecedent)?;
        let c = self.cover_condition(consequent)?;
        Ok(JointCounts {
            n_a: a.count_ones() as u64,
            n_c: c.count_ones() as u64,
            n_ac: a.and_count(&c) as u64,
            n: self.n_rows as u64,
        })
    }

    /// Writes the 0/1 matrix, one row per transaction, under `header`.
    pub fn write_matrix<W: std::io::Write>(&self, header: &[String], mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", header.join(","))?;
        let mut line = String::with_capacity(self.columns.len() * 2);
        for r in 0..self.n_rows {
            line.clear();
            for (k, col) in self.columns.iter().enumerate() {
                if k > 0 {
                    line.push(',');
                }
                line.push(if col.get(r) { '1' } else { '0' });
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}
