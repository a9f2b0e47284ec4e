//! Lower-bound side: the closed-form bound and a brute-force construction of
//! the adversary graph for the "all k items present vs. exactly k-1 present"
//! distinguishing problem.
//!
//! Vertices are base databases `f: [N] -> {0^m} ∪ Y`. A `V0` vertex holds
//! exactly `k-1` of the targets once each, a `V1` vertex holds all `k`; every
//! other address holds the all-zeros item. `(f0, f1)` is an edge iff the two
//! differ at exactly one base address. The `d`-fold databases on which the
//! statistics are defined are `f^{⊗d}`; an edge that differs at base address
//! `x` is labelled by every `d`-fold address with some coordinate equal to `x`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::binomial;

/// Largest `|V1|` we are willing to enumerate.
pub const VERTEX_LIMIT: f64 = 1e6;

/// `sqrt(N k / (d min{d, k}))`.
pub fn closed_form_bound(size: usize, copies: usize, targets: usize) -> f64 {
    let (n, d, k) = (size as f64, copies as f64, targets as f64);
    (n * k / (d * d.min(k))).sqrt()
}

/// Parameters of the instance family plus its fixed target items.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFamily {
    pub address_bits: u32,
    pub item_bits: u32,
    pub copies: usize,
    /// Distinct non-zero `m`-bit items.
    pub targets: Vec<u64>,
}

impl InstanceFamily {
    /// Family with targets `1, 2, ..., k`.
    pub fn new(address_bits: u32, item_bits: u32, copies: usize, k: usize) -> Result<Self> {
        Self::with_targets(address_bits, item_bits, copies, (1..=k as u64).collect())
    }

    pub fn with_targets(
        address_bits: u32,
        item_bits: u32,
        copies: usize,
        targets: Vec<u64>,
    ) -> Result<Self> {
        if item_bits == 0 || item_bits > 63 {
            return Err(Error::invalid(format!(
                "item width must be in 1..=63, got {item_bits}"
            )));
        }
        if address_bits > 20 {
            return Err(Error::invalid(format!(
                "address width {address_bits} is far beyond enumeration"
            )));
        }
        if copies == 0 {
            return Err(Error::invalid("at least one database copy is required"));
        }
        let k = targets.len() as u64;
        if k == 0 {
            return Err(Error::invalid("at least one target item is required"));
        }
        if k > 1u64 << (item_bits - 1) {
            return Err(Error::precondition(format!(
                "k = {k} exceeds 2^(m-1) = {} for m = {item_bits}",
                1u64 << (item_bits - 1)
            )));
        }
        let mut seen = targets.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != targets.len() {
            return Err(Error::invalid("target items must be distinct"));
        }
        if let Some(bad) = targets.iter().find(|&&y| y == 0 || y >> item_bits != 0) {
            return Err(Error::invalid(format!(
                "target {bad} must be a non-zero {item_bits}-bit item"
            )));
        }
        if k > 1u64 << address_bits {
            return Err(Error::invalid(format!(
                "{k} targets do not fit in {} addresses",
                1u64 << address_bits
            )));
        }
        Ok(Self {
            address_bits,
            item_bits,
            copies,
            targets,
        })
    }

    pub fn size(&self) -> usize {
        1 << self.address_bits
    }

    pub fn k(&self) -> usize {
        self.targets.len()
    }

    /// `C(N, k) k!`, the number of databases holding every target once.
    pub fn v1_count(&self) -> f64 {
        binomial(self.size(), self.k()) * factorial(self.k())
    }

    /// `C(N, k-1) (k-1)!` placements times `k` choices of the missing item.
    pub fn v0_count_factors(&self) -> (f64, usize) {
        let k = self.k();
        (binomial(self.size(), k - 1) * factorial(k - 1), k)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// One edge: `v0[from]` and `v1[to]` differ only at base address `location`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub location: usize,
}

/// Vertex contents are stored as slot indices: 0 is the filler, `i >= 1` is
/// `targets[i - 1]`.
#[derive(Debug, Clone)]
pub struct AdversaryGraph {
    family: InstanceFamily,
    v0: Vec<Vec<u8>>,
    v1: Vec<Vec<u8>>,
    edges: Vec<Edge>,
}

/// Enumerates the graph. Refuses when `|V1|` would exceed [`VERTEX_LIMIT`].
pub fn build_adversary_graph(family: &InstanceFamily) -> Result<AdversaryGraph> {
    let estimate = family.v1_count();
    if estimate > VERTEX_LIMIT {
        return Err(Error::Infeasible {
            estimate,
            limit: VERTEX_LIMIT,
        });
    }
    let size = family.size();
    let k = family.k();

    let mut v1 = Vec::new();
    let all: Vec<u8> = (1..=k as u8).collect();
    place(&all, size, &mut vec![0; size], &mut v1);

    let mut v0 = Vec::new();
    for missing in 1..=k as u8 {
        let present: Vec<u8> = all.iter().copied().filter(|&s| s != missing).collect();
        place(&present, size, &mut vec![0; size], &mut v0);
    }

    let index: HashMap<&[u8], usize> = v1
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_slice(), i))
        .collect();
    let mut edges = Vec::new();
    let mut probe = vec![0u8; size];
    for (from, f0) in v0.iter().enumerate() {
        probe.copy_from_slice(f0);
        for location in 0..size {
            let original = probe[location];
            for value in 0..=k as u8 {
                if value == original {
                    continue;
                }
                probe[location] = value;
                if let Some(&to) = index.get(probe.as_slice()) {
                    edges.push(Edge { from, to, location });
                }
            }
            probe[location] = original;
        }
    }
    drop(index);

    Ok(AdversaryGraph {
        family: family.clone(),
        v0,
        v1,
        edges,
    })
}

/// Every injective placement of `slots` into `[size]`, pushed as full tables.
fn place(slots: &[u8], size: usize, table: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    let Some((&first, rest)) = slots.split_first() else {
        out.push(table.clone());
        return;
    };
    for x in 0..size {
        if table[x] == 0 {
            table[x] = first;
            place(rest, size, table, out);
            table[x] = 0;
        }
    }
}

impl AdversaryGraph {
    pub fn family(&self) -> &InstanceFamily {
        &self.family
    }

    pub fn v0_len(&self) -> usize {
        self.v0.len()
    }

    pub fn v1_len(&self) -> usize {
        self.v1.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Item stored at `address` of `V0` vertex `vertex`.
    pub fn v0_item(&self, vertex: usize, address: usize) -> u64 {
        self.item(self.v0[vertex][address])
    }

    pub fn v1_item(&self, vertex: usize, address: usize) -> u64 {
        self.item(self.v1[vertex][address])
    }

    fn item(&self, slot: u8) -> u64 {
        match slot {
            0 => 0,
            s => self.family.targets[s as usize - 1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryStats {
    /// Minimum degree over `V0`.
    pub delta0: u64,
    /// Minimum degree over `V1`.
    pub delta1: u64,
    /// Largest number of edges at one `V0` vertex sharing a `d`-fold label.
    pub ell0: u64,
    pub ell1: u64,
}

/// Exact statistics by enumeration.
///
/// A `d`-fold address covers at most `min(d, N)` distinct base addresses, and
/// an edge carries a given `d`-fold label iff its differing base address is
/// among them. The largest same-label multiplicity at a vertex is therefore
/// the sum of its `min(d, N)` largest per-base-address edge counts.
pub fn compute_stats(graph: &AdversaryGraph) -> Result<AdversaryStats> {
    if graph.edges.is_empty() || graph.v0.is_empty() || graph.v1.is_empty() {
        return Err(Error::invalid("adversary graph has no edges"));
    }
    let size = graph.family.size();
    let reach = graph.family.copies.min(size);

    let mut at_v0 = vec![vec![0u64; size]; graph.v0.len()];
    let mut at_v1 = vec![vec![0u64; size]; graph.v1.len()];
    for e in &graph.edges {
        at_v0[e.from][e.location] += 1;
        at_v1[e.to][e.location] += 1;
    }

    let side = |counts: &mut [Vec<u64>]| -> (u64, u64) {
        let mut min_degree = u64::MAX;
        let mut max_label = 0;
        for per_location in counts.iter_mut() {
            min_degree = min_degree.min(per_location.iter().sum());
            per_location.sort_unstable_by(|a, b| b.cmp(a));
            max_label = max_label.max(per_location[..reach].iter().sum());
        }
        (min_degree, max_label)
    };
    let (delta0, ell0) = side(&mut at_v0);
    let (delta1, ell1) = side(&mut at_v1);
    Ok(AdversaryStats {
        delta0,
        delta1,
        ell0,
        ell1,
    })
}

/// `sqrt(Δ0 Δ1 / (ℓ0 ℓ1))`.
pub fn ambainis_bound(stats: &AdversaryStats) -> Result<f64> {
    if stats.ell0 == 0 || stats.ell1 == 0 {
        return Err(Error::invalid("label multiplicities must be positive"));
    }
    Ok(((stats.delta0 * stats.delta1) as f64 / (stats.ell0 * stats.ell1) as f64).sqrt())
}
