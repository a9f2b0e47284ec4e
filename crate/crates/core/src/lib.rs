//! Exact simulation and analysis of quantum search for `k` items over `d`
//! database copies queried in parallel.
//!
//! * [`qsim`]: dense state vectors, phase-oracle Grover iterations, query ledgers.
//! * [`search`]: known/unknown-count search, iterated multi-item search, the
//!   partitioned parallel search and its load analysis.
//! * [`adversary`]: closed-form lower bound and brute-force adversary graphs.
//! * [`harness`]: seeded experiments and their JSON/CSV reports.

pub mod adversary;
pub mod database;
pub mod error;
pub mod harness;
pub mod qsim;
pub mod search;
pub mod seed;

pub use adversary::{
    ambainis_bound, build_adversary_graph, closed_form_bound, compute_stats, AdversaryGraph,
    AdversaryStats, InstanceFamily,
};
pub use database::{Database, Filler, TargetSet};
pub use error::{Error, Result};
pub use harness::{ExperimentConfig, Format, Report};
pub use qsim::{success_probability, MarkedPredicate, QueryLedger, StateVector};
pub use search::{
    bbht_search_unknown, choose_regime, grover_search_known, maxload_bound, multi_item_search,
    parallel_search, random_partition, verify_locations, Fallback, ParallelConfig, Partition,
    Regime, RegimeParams, SearchOutcome,
};
