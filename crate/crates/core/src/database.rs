//! Classical ground truth: the database `f: [N] -> {0,1}^m` and target sets.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest address width we allocate a dense table for.
pub const MAX_ADDRESS_BITS: u32 = 26;

/// A total map from the `N = 2^n` addresses to `m`-bit items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Database {
    address_bits: u32,
    item_bits: u32,
    entries: Vec<u64>,
}

impl Database {
    pub fn new(address_bits: u32, item_bits: u32, entries: Vec<u64>) -> Result<Self> {
        if address_bits > MAX_ADDRESS_BITS {
            return Err(Error::invalid(format!(
                "address width {address_bits} exceeds {MAX_ADDRESS_BITS} bits"
            )));
        }
        if item_bits == 0 || item_bits > 63 {
            return Err(Error::invalid(format!(
                "item width must be in 1..=63, got {item_bits}"
            )));
        }
        let size = 1usize << address_bits;
        if entries.len() != size {
            return Err(Error::invalid(format!(
                "database with {address_bits} address bits needs {size} entries, got {}",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|&&v| v >> item_bits != 0) {
            return Err(Error::invalid(format!(
                "item {bad} does not fit in {item_bits} bits"
            )));
        }
        Ok(Self {
            address_bits,
            item_bits,
            entries,
        })
    }

    /// Builds a random instance holding every target exactly once.
    ///
    /// Targets land on addresses drawn uniformly without replacement. The
    /// remaining addresses hold either pairwise-distinct non-target values or
    /// the all-zeros item, depending on `filler`.
    pub fn with_targets<R: Rng + ?Sized>(
        address_bits: u32,
        item_bits: u32,
        targets: &TargetSet,
        filler: Filler,
        rng: &mut R,
    ) -> Result<Self> {
        if address_bits > MAX_ADDRESS_BITS {
            return Err(Error::invalid(format!(
                "address width {address_bits} exceeds {MAX_ADDRESS_BITS} bits"
            )));
        }
        let size = 1usize << address_bits;
        if targets.len() > size {
            return Err(Error::invalid(format!(
                "{} targets do not fit in {size} addresses",
                targets.len()
            )));
        }
        if let Some(bad) = targets.iter().find(|&v| v >> item_bits != 0) {
            return Err(Error::invalid(format!(
                "target {bad} does not fit in {item_bits} bits"
            )));
        }

        if filler == Filler::Zero && targets.contains(0) {
            return Err(Error::invalid("zero filler requires non-zero targets"));
        }
        if filler == Filler::Distinct && (1u128 << item_bits) < size as u128 {
            return Err(Error::invalid(format!(
                "{item_bits}-bit items cannot fill {size} addresses with distinct values"
            )));
        }

        let mut is_target = vec![false; size];
        let mut entries = vec![0u64; size];
        let slots = index::sample(rng, size, targets.len());
        for (slot, item) in slots.iter().zip(targets.iter()) {
            entries[slot] = item;
            is_target[slot] = true;
        }
        if filler == Filler::Distinct {
            let mut values = (0u64..).filter(|v| !targets.contains(*v));
            for (entry, _) in entries.iter_mut().zip(&is_target).filter(|(_, &t)| !t) {
                *entry = values.next().expect("item space checked above");
            }
        }
        Self::new(address_bits, item_bits, entries)
    }

    pub fn address_bits(&self) -> u32 {
        self.address_bits
    }

    pub fn item_bits(&self) -> u32 {
        self.item_bits
    }

    /// Number of addresses, `N = 2^n`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Classical lookup of `f(address)`.
    pub fn get(&self, address: usize) -> u64 {
        self.entries[address]
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    /// Addresses holding an item of `targets`.
    pub fn locations_of(&self, targets: &TargetSet) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| targets.contains(self.entries[x]))
            .collect()
    }
}

/// Content of non-target addresses in generated databases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Filler {
    #[default]
    Distinct,
    Zero,
}

/// `k >= 1` pairwise-distinct items.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TargetSet {
    items: BTreeSet<u64>,
}

impl TargetSet {
    pub fn new(items: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for item in items {
            if !set.insert(item) {
                return Err(Error::invalid(format!("duplicate target item {item}")));
            }
        }
        if set.is_empty() {
            return Err(Error::invalid("target set must contain at least one item"));
        }
        Ok(Self { items: set })
    }

    /// Draws `k` distinct items uniformly from `[lowest, 2^item_bits)`.
    pub fn random<R: Rng + ?Sized>(
        k: usize,
        item_bits: u32,
        lowest: u64,
        rng: &mut R,
    ) -> Result<Self> {
        if item_bits == 0 || item_bits > 63 {
            return Err(Error::invalid(format!(
                "item width must be in 1..=63, got {item_bits}"
            )));
        }
        let span = (1u64 << item_bits).saturating_sub(lowest);
        if k == 0 || (k as u64) > span {
            return Err(Error::invalid(format!(
                "cannot draw {k} distinct items from {span} values"
            )));
        }
        let mut items = BTreeSet::new();
        while items.len() < k {
            items.insert(rng.gen_range(lowest..lowest + span));
        }
        Ok(Self { items })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn contains(&self, item: u64) -> bool {
        self.items.contains(&item)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.items.iter().copied()
    }

    pub fn items(&self) -> &BTreeSet<u64> {
        &self.items
    }
}
