//! Known-count and unknown-count Grover search, iterated multi-item search on
//! one copy, and the partitioned parallel search over `d` copies.
//!
//! Copies never interact quantumly: each searches its own cell of a random
//! address partition and the copies only exchange classical results between
//! repetitions. The joint state is therefore a product state and simulating
//! each copy on its own vector is exact.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::database::{Database, TargetSet};
use crate::error::{Error, Result};
use crate::qsim::{optimal_iterations, MarkedPredicate, QueryLedger, StateVector};
use crate::seed::{self, stream};

/// Growth factor of the unknown-count iteration cutoff.
pub const CUTOFF_GROWTH: f64 = 6.0 / 5.0;

/// Default bound on repetitions of the partitioned search.
pub const MAX_REPETITIONS: usize = 10;

/// Result of a single-copy search for one marked address.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SingleSearch {
    pub address: Option<usize>,
    pub queries: u64,
}

/// Runs `floor(pi / 4 theta)` Grover iterations for `assumed` marked
/// addresses in `subdomain`, then measures. The measured address is returned
/// only if it holds a target; the classical membership test is free here and
/// `queries` equals the iteration count.
pub fn grover_search_known<R: Rng + ?Sized>(
    db: &Database,
    subdomain: &[usize],
    targets: &BTreeSet<u64>,
    assumed: usize,
    rng: &mut R,
) -> Result<SingleSearch> {
    if assumed == 0 {
        return Err(Error::invalid("assumed marked count must be at least 1"));
    }
    if assumed > subdomain.len() {
        return Err(Error::invalid(format!(
            "assumed {assumed} marked addresses in a subdomain of {}",
            subdomain.len()
        )));
    }
    let marked = MarkedPredicate::new(db, subdomain, targets)?;
    let iterations = optimal_iterations(subdomain.len(), assumed);
    let mut ledger = QueryLedger::new(1);
    let mut state = StateVector::uniform(subdomain.len())?;
    for _ in 0..iterations {
        state.grover_iterate(&marked, &mut ledger, 0)?;
    }
    let local = state.measure(rng)?;
    let address = marked.is_marked(local).then(|| marked.address(local));
    Ok(SingleSearch {
        address,
        queries: ledger.total_queries(),
    })
}

/// Hard query budget of the unknown-count search on `size` addresses:
/// `ceil(9/4 sqrt(size)) + 2 ceil(log_{6/5} sqrt(size))`.
pub fn unknown_search_budget(size: usize) -> u64 {
    let root = (size as f64).sqrt();
    let stages = if root > 1.0 {
        (root.ln() / CUTOFF_GROWTH.ln()).ceil()
    } else {
        0.0
    };
    (2.25 * root).ceil() as u64 + 2 * stages as u64
}

/// Search without knowing how many addresses are marked.
///
/// Stage `s` draws an iteration count uniformly from
/// `0..=floor(min(1.2^s, sqrt|S|))`, runs it from the uniform state, measures
/// and tests the result classically (one counted query). Gives up once the
/// budget from [`unknown_search_budget`] is spent.
pub fn bbht_search_unknown<R: Rng + ?Sized>(
    db: &Database,
    subdomain: &[usize],
    targets: &BTreeSet<u64>,
    rng: &mut R,
) -> Result<SingleSearch> {
    if subdomain.is_empty() {
        return Err(Error::InvalidDimension);
    }
    let marked = MarkedPredicate::new(db, subdomain, targets)?;
    let root = (subdomain.len() as f64).sqrt();
    let budget = unknown_search_budget(subdomain.len());
    let mut ledger = QueryLedger::new(1);
    let mut cutoff = 1.0_f64;

    while ledger.total_queries() < budget {
        let spare = budget - ledger.total_queries() - 1;
        let iterations = rng.gen_range(0..=cutoff.floor() as u64).min(spare);
        let mut state = StateVector::uniform(subdomain.len())?;
        for _ in 0..iterations {
            state.grover_iterate(&marked, &mut ledger, 0)?;
        }
        let local = state.measure(rng)?;
        ledger.record(0, 1)?;
        if marked.is_marked(local) {
            return Ok(SingleSearch {
                address: Some(marked.address(local)),
                queries: ledger.total_queries(),
            });
        }
        cutoff = (cutoff * CUTOFF_GROWTH).min(root);
    }
    Ok(SingleSearch {
        address: None,
        queries: ledger.total_queries(),
    })
}

/// Behaviour of the iterated search when a known-count step misses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fallback {
    /// Move on to the next step.
    #[default]
    None,
    /// Retry with [`bbht_search_unknown`]; if that also comes back empty the
    /// remaining steps are skipped.
    Unknown,
}

/// Items found in one cell and the oracle queries that cell spent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CellSearch {
    pub found: Vec<(u64, usize)>,
    pub queries: u64,
}

/// Iterated search of one cell for up to `cap` items of `targets`.
///
/// Step `i` assumes `cap - i + 1` marked addresses remain. Every hit removes
/// both the item from the target set and the address from the search space.
pub fn search_cell<R: Rng + ?Sized>(
    db: &Database,
    cell: &[usize],
    targets: &BTreeSet<u64>,
    cap: usize,
    fallback: Fallback,
    rng: &mut R,
) -> Result<CellSearch> {
    let mut remaining = targets.clone();
    let mut space = cell.to_vec();
    let mut out = CellSearch::default();

    for step in 1..=cap {
        if remaining.is_empty() || space.is_empty() {
            break;
        }
        let assumed = (cap - step + 1).min(space.len());
        let known = grover_search_known(db, &space, &remaining, assumed, rng)?;
        out.queries += known.queries;
        let hit = match (known.address, fallback) {
            (Some(address), _) => address,
            (None, Fallback::None) => continue,
            (None, Fallback::Unknown) => {
                let unknown = bbht_search_unknown(db, &space, &remaining, rng)?;
                out.queries += unknown.queries;
                match unknown.address {
                    Some(address) => address,
                    None => break,
                }
            }
        };
        let item = db.get(hit);
        remaining.remove(&item);
        space.retain(|&x| x != hit);
        out.found.push((item, hit));
    }
    Ok(out)
}

/// Outcome of a multi-item search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub targets: Vec<u64>,
    /// Item -> address where it was found.
    pub located: BTreeMap<u64, usize>,
    /// All targets located and verified.
    pub success: bool,
    /// Cumulative counts over every repetition.
    pub ledger: QueryLedger,
    /// Per-repetition counts, in order.
    pub repetitions: Vec<QueryLedger>,
}

impl SearchOutcome {
    fn empty(targets: &TargetSet, copies: usize) -> Self {
        Self {
            targets: targets.iter().collect(),
            located: BTreeMap::new(),
            success: false,
            ledger: QueryLedger::new(copies),
            repetitions: Vec::new(),
        }
    }

    /// Parallel rounds summed over repetitions.
    pub fn parallel_rounds(&self) -> u64 {
        self.repetitions
            .iter()
            .map(QueryLedger::parallel_rounds)
            .sum()
    }

    pub fn missing(&self) -> Vec<u64> {
        self.targets
            .iter()
            .copied()
            .filter(|y| !self.located.contains_key(y))
            .collect()
    }
}

/// Locates the targets present in `subdomain` on a single copy, assuming at
/// most `cap` of them are there. With `cap == 0` nothing is searched.
pub fn multi_item_search(
    db: &Database,
    subdomain: &[usize],
    targets: &TargetSet,
    cap: usize,
    fallback: Fallback,
    seed: u64,
) -> Result<SearchOutcome> {
    let mut outcome = SearchOutcome::empty(targets, 1);
    let mut rng = seed::rng(seed);
    let cell = search_cell(db, subdomain, targets.items(), cap, fallback, &mut rng)?;
    let mut ledger = QueryLedger::new(1);
    ledger.record(0, cell.queries)?;
    outcome.located.extend(cell.found);
    outcome.ledger.absorb(&ledger)?;
    outcome.repetitions.push(ledger);
    outcome.success = outcome.located.len() == outcome.targets.len();
    Ok(outcome)
}

/// A split of `[N]` into `d` disjoint cells whose sizes differ by at most one.
/// Each cell is stored in increasing address order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    cells: Vec<Vec<usize>>,
}

impl Partition {
    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell_sizes(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }
}

/// Sizes of the `cells` contiguous blocks a permutation of `size` addresses
/// is cut into: the first `size % cells` blocks get the extra element.
pub fn block_sizes(size: usize, cells: usize) -> Vec<usize> {
    let (base, extra) = (size / cells, size % cells);
    (0..cells).map(|c| base + usize::from(c < extra)).collect()
}

fn check_partition_args(size: usize, cells: usize) -> Result<()> {
    if cells == 0 {
        return Err(Error::invalid("partition needs at least one cell"));
    }
    if cells > size {
        return Err(Error::invalid(format!(
            "cannot split {size} addresses into {cells} cells"
        )));
    }
    Ok(())
}

/// Uniform random equipartition of `[size]` into `cells` cells.
pub fn random_partition(size: usize, cells: usize, seed: u64) -> Result<Partition> {
    random_partition_with(size, cells, &mut seed::rng(seed))
}

pub fn random_partition_with<R: Rng + ?Sized>(
    size: usize,
    cells: usize,
    rng: &mut R,
) -> Result<Partition> {
    check_partition_args(size, cells)?;
    let mut perm: Vec<usize> = (0..size).collect();
    perm.shuffle(rng);
    let mut rest = perm.as_slice();
    let cells = block_sizes(size, cells)
        .into_iter()
        .map(|len| {
            let (head, tail) = rest.split_at(len);
            rest = tail;
            let mut cell = head.to_vec();
            cell.sort_unstable();
            cell
        })
        .collect();
    Ok(Partition { cells })
}

/// Number of `targets` fixed addresses that land in each cell of a uniform
/// random equipartition of `[size]`.
///
/// Under a uniform permutation the positions of the target addresses form a
/// uniform `targets`-subset of the slots, so sampling that subset directly
/// gives the exact load distribution in `O(targets)` work.
pub fn cell_loads<R: Rng + ?Sized>(
    size: usize,
    cells: usize,
    targets: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    check_partition_args(size, cells)?;
    if targets > size {
        return Err(Error::invalid(format!(
            "{targets} targets exceed {size} addresses"
        )));
    }
    let sizes = block_sizes(size, cells);
    let (base, extra) = (size / cells, size % cells);
    let boundary = extra * (base + 1);
    let mut loads = vec![0; sizes.len()];
    for slot in index::sample(rng, size, targets) {
        let cell = if slot < boundary {
            slot / (base + 1)
        } else {
            extra + (slot - boundary) / base
        };
        loads[cell] += 1;
    }
    Ok(loads)
}

/// Load-balancing regime, by how the number of targets compares with the
/// number of copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `k <= sqrt(d)`
    Sparse,
    /// `sqrt(d) < k <= d`
    Balanced,
    /// `d < k <= d lg d`
    Crowded,
    /// `k > d lg d`
    Saturated,
}

impl Regime {
    pub fn number(self) -> u8 {
        match self {
            Regime::Sparse => 1,
            Regime::Balanced => 2,
            Regime::Crowded => 3,
            Regime::Saturated => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeParams {
    pub regime: Regime,
    /// Per-cell item cap `t`.
    pub cap: usize,
    pub repetitions: usize,
    /// `d` or `k` exceeds `sqrt(N)`; the load analysis no longer applies.
    pub assumption_violated: bool,
}

/// Picks the regime and per-cell cap for `targets` items over `copies` cells
/// of a database of `size` addresses. Fractional caps are rounded up.
pub fn choose_regime(size: usize, copies: usize, targets: usize) -> Result<RegimeParams> {
    if copies == 0 || targets == 0 {
        return Err(Error::invalid("copies and targets must both be at least 1"));
    }
    let (d, k) = (copies as f64, targets as f64);
    let lg = d.log2();
    let (regime, cap) = if targets * targets <= copies {
        (Regime::Sparse, 2.0)
    } else if targets <= copies {
        (Regime::Balanced, 5.0 * lg)
    } else if k <= d * lg {
        (Regime::Crowded, 5.0 * k * lg / d)
    } else {
        (Regime::Saturated, 2.0 * k / d)
    };
    let root = (size as f64).sqrt();
    Ok(RegimeParams {
        regime,
        cap: (cap.ceil() as usize).max(1),
        repetitions: MAX_REPETITIONS,
        assumption_violated: d > root || k > root,
    })
}

/// `lg d`, floored at 1 so that single-copy formulas stay meaningful.
pub fn lg_at_least_one(copies: usize) -> f64 {
    (copies as f64).log2().max(1.0)
}

/// `sqrt(N k lg d / (d min{k, d}))` with `lg d >= 1`.
pub fn upper_bound_formula(size: usize, copies: usize, targets: usize) -> f64 {
    let (n, d, k) = (size as f64, copies as f64, targets as f64);
    (n * k * lg_at_least_one(copies) / (d * k.min(d))).sqrt()
}

/// Parallel-round bound for the case `(k, d)` falls in:
/// `sqrt(N/d)` when `k <= sqrt d`, `sqrt(Nk lg d / (d min{k,d}))` when
/// `sqrt d < k <= d lg d`, and `sqrt(Nk)/d` beyond that.
pub fn regime_envelope(size: usize, copies: usize, targets: usize) -> f64 {
    let (n, d, k) = (size as f64, copies as f64, targets as f64);
    if targets * targets <= copies {
        (n / d).sqrt()
    } else if k <= d * lg_at_least_one(copies) {
        upper_bound_formula(size, copies, targets)
    } else {
        (n * k).sqrt() / d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelConfig {
    pub max_repetitions: usize,
    /// Replaces the regime's per-cell cap.
    pub cap_override: Option<usize>,
    pub fallback: Fallback,
}

impl Default for ParallelConfig {
    fn default() -> Self {
        Self {
            max_repetitions: MAX_REPETITIONS,
            cap_override: None,
            fallback: Fallback::None,
        }
    }
}

/// Seed of `copy` in repetition `repetition`.
pub fn copy_seed(seed: u64, repetition: usize, copy: usize) -> u64 {
    seed::derive(
        seed::derive(seed, repetition as u64),
        stream::COPY_BASE + copy as u64,
    )
}

/// Searches `copies` copies of `db` in lockstep for every item of `targets`.
///
/// Each repetition splits `[N]` at random, gives every copy one cell and runs
/// [`search_cell`] in all cells with the regime's cap (never above the number
/// of items still missing). Items found so far are kept; the loop stops once
/// verification passes or `max_repetitions` is used up.
pub fn parallel_search(
    db: &Database,
    copies: usize,
    targets: &TargetSet,
    config: &ParallelConfig,
    seed: u64,
) -> Result<SearchOutcome> {
    check_partition_args(db.len(), copies)?;
    if config.cap_override == Some(0) {
        return Err(Error::invalid("cap override must be at least 1"));
    }
    let mut outcome = SearchOutcome::empty(targets, copies);

    for repetition in 0..config.max_repetitions {
        let remaining: BTreeSet<u64> = targets
            .iter()
            .filter(|y| !outcome.located.contains_key(y))
            .collect();
        let cap = match config.cap_override {
            Some(cap) => cap,
            None => choose_regime(db.len(), copies, remaining.len())?.cap,
        }
        .min(remaining.len());

        let rep_seed = seed::derive(seed, repetition as u64);
        let partition = random_partition_with(
            db.len(),
            copies,
            &mut seed::rng(seed::derive(rep_seed, stream::PARTITION)),
        )?;
        let cells: Vec<CellSearch> = partition
            .cells()
            .par_iter()
            .enumerate()
            .map(|(copy, cell)| {
                let mut rng = seed::rng(copy_seed(seed, repetition, copy));
                search_cell(db, cell, &remaining, cap, config.fallback, &mut rng)
            })
            .collect::<Result<_>>()?;

        let mut ledger = QueryLedger::new(copies);
        for (copy, cell) in cells.into_iter().enumerate() {
            ledger.record(copy, cell.queries)?;
            for (item, address) in cell.found {
                outcome.located.entry(item).or_insert(address);
            }
        }
        outcome.ledger.absorb(&ledger)?;
        outcome.repetitions.push(ledger);

        if verify_locations(db, &mut outcome) {
            outcome.success = true;
            break;
        }
    }
    Ok(outcome)
}

/// Classical check that every target is claimed and every claim is correct.
/// Charges `ceil(k/d)` verification rounds to the outcome's ledger.
pub fn verify_locations(db: &Database, outcome: &mut SearchOutcome) -> bool {
    let copies = outcome.ledger.copies().max(1);
    outcome
        .ledger
        .record_verification(outcome.targets.len().div_ceil(copies) as u64);
    outcome
        .targets
        .iter()
        .all(|y| outcome.located.contains_key(y))
        && outcome
            .located
            .iter()
            .all(|(&item, &address)| address < db.len() && db.get(address) == item)
}

/// `C(k, t) d^-t`, the chance a fixed cell receives `t` or more of `k` items
/// when each lands in one of `d` cells uniformly. Zero when `t > k`.
pub fn maxload_bound(targets: usize, cap: usize, copies: usize) -> Result<f64> {
    if copies == 0 {
        return Err(Error::invalid("maxload bound needs at least one cell"));
    }
    if cap > targets {
        return Ok(0.0);
    }
    Ok(binomial(targets, cap) * (copies as f64).powi(-(cap as i32)))
}

pub(crate) fn binomial(n: usize, r: usize) -> f64 {
    let r = r.min(n - r);
    (1..=r).fold(1.0, |acc, i| acc * (n - r + i) as f64 / i as f64)
}
