//! Seeded experiment drivers behind the command-line tool.
//!
//! Every report is a pure function of its config: trials derive their seeds
//! from the root seed by index, run concurrently, and are collected back in
//! index order, so the serialized output is byte-stable for a fixed seed.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversary::{
    ambainis_bound, build_adversary_graph, closed_form_bound, compute_stats, AdversaryStats,
    InstanceFamily,
};
use crate::database::{Database, Filler, TargetSet, MAX_ADDRESS_BITS};
use crate::error::{Error, Result};
use crate::search::{
    cell_loads, choose_regime, maxload_bound, parallel_search, regime_envelope,
    upper_bound_formula, Fallback, ParallelConfig, RegimeParams,
};
use crate::seed::{self, stream};

/// Version of the report layout, echoed as `spec_version` in JSON output.
pub const SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Address width `n`; the database has `2^n` addresses.
    pub n: u32,
    pub d: usize,
    pub k: usize,
    /// Item width; defaults to `max(n, 1)`.
    pub m: Option<u32>,
    pub trials: usize,
    pub seed: u64,
    /// Replaces the regime's per-cell cap.
    pub t: Option<usize>,
    pub filler: Filler,
    pub fallback: Fallback,
}

impl ExperimentConfig {
    pub fn new(n: u32, d: usize, k: usize, trials: usize, seed: u64) -> Self {
        Self {
            n,
            d,
            k,
            m: None,
            trials,
            seed,
            t: None,
            filler: Filler::Distinct,
            fallback: Fallback::None,
        }
    }

    pub fn size(&self) -> usize {
        1 << self.n
    }

    pub fn item_bits(&self) -> u32 {
        self.m.unwrap_or(self.n.max(1))
    }

    /// Rejects unusable configs; returns warnings for ones outside the
    /// `d, k <= sqrt(N)` range the load analysis assumes.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.n > MAX_ADDRESS_BITS {
            return Err(Error::invalid(format!(
                "n = {} exceeds {MAX_ADDRESS_BITS}",
                self.n
            )));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        let size = self.size();
        if self.d == 0 || self.d > size {
            return Err(Error::invalid(format!(
                "d = {} must lie in 1..={size}",
                self.d
            )));
        }
        if self.k == 0 || self.k > size {
            return Err(Error::invalid(format!(
                "k = {} must lie in 1..={size}",
                self.k
            )));
        }
        if self.t == Some(0) {
            return Err(Error::invalid("t must be at least 1"));
        }
        let m = self.item_bits();
        if m == 0 || m > 63 {
            return Err(Error::invalid(format!("m = {m} must lie in 1..=63")));
        }
        let values = 1u128 << m;
        let needed = match self.filler {
            Filler::Distinct => size as u128,
            Filler::Zero => self.k as u128 + 1,
        };
        if values < needed {
            return Err(Error::invalid(format!(
                "m = {m} leaves {values} item values, {needed} are needed"
            )));
        }
        let root = 1usize << (self.n / 2);
        let mut warnings = Vec::new();
        if self.d > root {
            warnings.push(format!("d = {} exceeds 2^(n/2) = {root}", self.d));
        }
        if self.k > root {
            warnings.push(format!("k = {} exceeds 2^(n/2) = {root}", self.k));
        }
        Ok(warnings)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub success: bool,
    pub parallel_rounds: u64,
    pub per_copy_queries: Vec<u64>,
    pub verification_rounds: u64,
    pub repetitions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub mean_rounds: f64,
    pub median_rounds: f64,
    pub success_rate: f64,
}

impl Aggregates {
    pub fn from_trials(trials: &[TrialRecord]) -> Self {
        let count = trials.len().max(1) as f64;
        let mut rounds: Vec<u64> = trials.iter().map(|t| t.parallel_rounds).collect();
        rounds.sort_unstable();
        let median_rounds = match rounds.len() {
            0 => 0.0,
            len if len % 2 == 1 => rounds[len / 2] as f64,
            len => (rounds[len / 2 - 1] + rounds[len / 2]) as f64 / 2.0,
        };
        Self {
            mean_rounds: rounds.iter().sum::<u64>() as f64 / count,
            median_rounds,
            success_rate: trials.iter().filter(|t| t.success).count() as f64 / count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValues {
    /// `sqrt(N k / (d min{d,k}))`.
    pub closed_form_bound: f64,
    /// `sqrt(N k lg d / (d min{k,d}))`, `lg d >= 1`.
    pub upper_bound: f64,
    /// Per-regime parallel-round expression.
    pub regime_envelope: f64,
}

impl ReferenceValues {
    pub fn new(size: usize, copies: usize, targets: usize) -> Self {
        Self {
            closed_form_bound: closed_form_bound(size, copies, targets),
            upper_bound: upper_bound_formula(size, copies, targets),
            regime_envelope: regime_envelope(size, copies, targets),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub spec_version: String,
    pub command: String,
    pub config: ExperimentConfig,
    pub regime: RegimeParams,
    pub warnings: Vec<String>,
    pub trials: Vec<TrialRecord>,
    pub aggregates: Aggregates,
    pub reference: ReferenceValues,
}

/// Runs `cfg.trials` independent parallel searches on fresh random databases.
pub fn run_search_experiment(cfg: &ExperimentConfig) -> Result<SearchReport> {
    let warnings = cfg.validate()?;
    let size = cfg.size();
    let regime = choose_regime(size, cfg.d, cfg.k)?;
    let parallel = ParallelConfig {
        cap_override: cfg.t,
        fallback: cfg.fallback,
        ..ParallelConfig::default()
    };

    let trials = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let trial_seed = seed::derive(cfg.seed, trial as u64);
            let mut rng = seed::rng(seed::derive(trial_seed, stream::DATABASE));
            let lowest = u64::from(cfg.filler == Filler::Zero);
            let targets = TargetSet::random(cfg.k, cfg.item_bits(), lowest, &mut rng)?;
            let db =
                Database::with_targets(cfg.n, cfg.item_bits(), &targets, cfg.filler, &mut rng)?;
            let outcome = parallel_search(
                &db,
                cfg.d,
                &targets,
                &parallel,
                seed::derive(trial_seed, stream::SEARCH),
            )?;
            Ok(TrialRecord {
                trial,
                success: outcome.success,
                parallel_rounds: outcome.parallel_rounds(),
                per_copy_queries: outcome.ledger.per_copy().to_vec(),
                verification_rounds: outcome.ledger.verification(),
                repetitions: outcome.repetitions.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SearchReport {
        spec_version: SCHEMA_VERSION.into(),
        command: "search".into(),
        config: cfg.clone(),
        regime,
        warnings,
        aggregates: Aggregates::from_trials(&trials),
        reference: ReferenceValues::new(size, cfg.d, cfg.k),
        trials,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxloadConfig {
    pub n: u32,
    pub d: usize,
    pub k: usize,
    pub t: usize,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxloadReport {
    pub spec_version: String,
    pub command: String,
    pub config: MaxloadConfig,
    /// Partitions whose fullest cell holds more than `t` targets.
    pub exceedances: u64,
    pub empirical: f64,
    pub standard_error: f64,
    /// `C(k,t) d^-t`.
    pub bound_per_cell: f64,
    /// `d C(k,t) d^-t`.
    pub union_bound: f64,
    /// `empirical <= union_bound + 3 standard_error`.
    pub within_bound: bool,
    /// Max cell load -> number of partitions.
    pub max_load_histogram: BTreeMap<usize, u64>,
}

/// Monte-Carlo frequency of some cell exceeding `t` targets.
pub fn run_maxload_check(cfg: &MaxloadConfig) -> Result<MaxloadReport> {
    if cfg.n > MAX_ADDRESS_BITS {
        return Err(Error::invalid(format!(
            "n = {} exceeds {MAX_ADDRESS_BITS}",
            cfg.n
        )));
    }
    if cfg.trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    let size = 1usize << cfg.n;
    if cfg.d == 0 || cfg.d > size || cfg.k > size {
        return Err(Error::invalid(format!(
            "need 1 <= d <= {size} and k <= {size}"
        )));
    }
    const CHUNK: usize = 4096;
    let chunks = cfg.trials.div_ceil(CHUNK);
    let histograms = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = seed::rng(seed::derive(cfg.seed, chunk as u64));
            let mut hist = BTreeMap::new();
            for _ in (chunk * CHUNK)..((chunk + 1) * CHUNK).min(cfg.trials) {
                let loads = cell_loads(size, cfg.d, cfg.k, &mut rng)?;
                *hist
                    .entry(loads.into_iter().max().unwrap_or(0))
                    .or_insert(0u64) += 1;
            }
            Ok(hist)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut max_load_histogram = BTreeMap::new();
    for hist in histograms {
        for (load, count) in hist {
            *max_load_histogram.entry(load).or_insert(0) += count;
        }
    }

    let exceedances: u64 = max_load_histogram.range(cfg.t + 1..).map(|(_, c)| c).sum();
    let trials = cfg.trials as f64;
    let empirical = exceedances as f64 / trials;
    let standard_error = (empirical * (1.0 - empirical) / trials).sqrt();
    let bound_per_cell = maxload_bound(cfg.k, cfg.t, cfg.d)?;
    let union_bound = cfg.d as f64 * bound_per_cell;
    Ok(MaxloadReport {
        spec_version: SCHEMA_VERSION.into(),
        command: "maxload".into(),
        config: cfg.clone(),
        exceedances,
        empirical,
        standard_error,
        bound_per_cell,
        union_bound,
        within_bound: empirical <= union_bound + 3.0 * standard_error,
        max_load_histogram,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsCell {
    pub n: u32,
    pub d: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub size: usize,
    pub d: usize,
    pub k: usize,
    pub regime: u8,
    pub t: usize,
    pub measured_mean_rounds: f64,
    pub success_rate: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub regime_envelope: f64,
    pub measured_over_lower: f64,
    pub measured_over_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub spec_version: String,
    pub command: String,
    pub trials: usize,
    pub seed: u64,
    pub rows: Vec<BoundsRow>,
}

/// Measures mean parallel rounds on each `(n, d, k)` cell and sets them
/// against the lower and upper bound formulas. Cell `i` uses seed
/// `derive(seed, i)`.
pub fn run_bound_table(cells: &[BoundsCell], trials: usize, seed: u64) -> Result<BoundsReport> {
    let rows = cells
        .iter()
        .enumerate()
        .map(|(i, cell)| {
            let cfg =
                ExperimentConfig::new(cell.n, cell.d, cell.k, trials, seed::derive(seed, i as u64));
            let report = run_search_experiment(&cfg)?;
            let measured = report.aggregates.mean_rounds;
            let reference = report.reference;
            Ok(BoundsRow {
                size: cfg.size(),
                d: cell.d,
                k: cell.k,
                regime: report.regime.regime.number(),
                t: report.regime.cap,
                measured_mean_rounds: measured,
                success_rate: report.aggregates.success_rate,
                lower_bound: reference.closed_form_bound,
                upper_bound: reference.upper_bound,
                regime_envelope: reference.regime_envelope,
                measured_over_lower: measured / reference.closed_form_bound,
                measured_over_upper: measured / reference.upper_bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundsReport {
        spec_version: SCHEMA_VERSION.into(),
        command: "bounds".into(),
        trials,
        seed,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub claimed: u64,
    pub observed: u64,
    /// `equal` or `at_most`.
    pub relation: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryReport {
    pub spec_version: String,
    pub command: String,
    pub n: u32,
    pub m: u32,
    pub d: usize,
    pub k: usize,
    pub v0_count: usize,
    /// `C(N,k-1) (k-1)!` placements of the present items.
    pub v0_placements: f64,
    /// Choices of the missing item.
    pub v0_missing_choices: usize,
    pub v1_count: usize,
    pub edge_count: usize,
    pub stats: AdversaryStats,
    pub claims: Vec<Claim>,
    pub all_claims_hold: bool,
    pub ambainis_bound: f64,
    pub closed_form_bound: f64,
}

/// Enumerates the adversary graph and checks the four degree/multiplicity
/// claims: `Δ0 = N-k+1`, `Δ1 = k`, `ℓ0 <= d`, `ℓ1 <= min{d,k}`.
pub fn run_adversary_check(n: u32, m: u32, d: usize, k: usize) -> Result<AdversaryReport> {
    let family = InstanceFamily::new(n, m, d, k)?;
    let graph = build_adversary_graph(&family)?;
    let stats = compute_stats(&graph)?;
    let size = family.size() as u64;
    let claim = |name: &str, claimed: u64, observed: u64, exact: bool| Claim {
        name: name.into(),
        claimed,
        observed,
        relation: if exact { "equal" } else { "at_most" }.into(),
        holds: if exact {
            observed == claimed
        } else {
            observed <= claimed
        },
    };
    let claims = vec![
        claim("delta0", size - k as u64 + 1, stats.delta0, true),
        claim("delta1", k as u64, stats.delta1, true),
        claim("ell0", d as u64, stats.ell0, false),
        claim("ell1", d.min(k) as u64, stats.ell1, false),
    ];
    let (v0_placements, v0_missing_choices) = family.v0_count_factors();
    Ok(AdversaryReport {
        spec_version: SCHEMA_VERSION.into(),
        command: "adversary".into(),
        n,
        m,
        d,
        k,
        v0_count: graph.v0_len(),
        v0_placements,
        v0_missing_choices,
        v1_count: graph.v1_len(),
        edge_count: graph.edges().len(),
        stats,
        all_claims_hold: claims.iter().all(|c| c.holds),
        claims,
        ambainis_bound: ambainis_bound(&stats)?,
        closed_form_bound: closed_form_bound(family.size(), d, k),
    })
}

/// Any report the harness produces.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Report {
    Search(SearchReport),
    Maxload(MaxloadReport),
    Bounds(BoundsReport),
    Adversary(AdversaryReport),
}

#[derive(Serialize)]
struct SearchCsvRow {
    n: u32,
    d: usize,
    k: usize,
    trials: usize,
    seed: u64,
    regime: u8,
    t: usize,
    mean_rounds: f64,
    median_rounds: f64,
    success_rate: f64,
    closed_form_bound: f64,
    upper_bound: f64,
    regime_envelope: f64,
}

#[derive(Serialize)]
struct MaxloadCsvRow {
    n: u32,
    d: usize,
    k: usize,
    t: usize,
    trials: usize,
    seed: u64,
    exceedances: u64,
    empirical: f64,
    standard_error: f64,
    bound_per_cell: f64,
    union_bound: f64,
    within_bound: bool,
}

#[derive(Serialize)]
struct AdversaryCsvRow {
    n: u32,
    m: u32,
    d: usize,
    k: usize,
    v0_count: usize,
    v1_count: usize,
    edge_count: usize,
    delta0: u64,
    delta1: u64,
    ell0: u64,
    ell1: u64,
    all_claims_hold: bool,
    ambainis_bound: f64,
    closed_form_bound: f64,
}

impl Report {
    /// JSON carries full per-trial detail; CSV carries aggregates only.
    pub fn write<W: Write>(&self, format: Format, mut out: W) -> Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, self)?;
                out.write_all(b"\n")?;
            }
            Format::Csv => {
                let mut csv = csv::Writer::from_writer(out);
                match self {
                    Report::Search(r) => csv.serialize(SearchCsvRow {
                        n: r.config.n,
                        d: r.config.d,
                        k: r.config.k,
                        trials: r.config.trials,
                        seed: r.config.seed,
                        regime: r.regime.regime.number(),
                        t: r.config.t.unwrap_or(r.regime.cap),
                        mean_rounds: r.aggregates.mean_rounds,
                        median_rounds: r.aggregates.median_rounds,
                        success_rate: r.aggregates.success_rate,
                        closed_form_bound: r.reference.closed_form_bound,
                        upper_bound: r.reference.upper_bound,
                        regime_envelope: r.reference.regime_envelope,
                    })?,
                    Report::Maxload(r) => csv.serialize(MaxloadCsvRow {
                        n: r.config.n,
                        d: r.config.d,
                        k: r.config.k,
                        t: r.config.t,
                        trials: r.config.trials,
                        seed: r.config.seed,
                        exceedances: r.exceedances,
                        empirical: r.empirical,
                        standard_error: r.standard_error,
                        bound_per_cell: r.bound_per_cell,
                        union_bound: r.union_bound,
                        within_bound: r.within_bound,
                    })?,
                    Report::Bounds(r) => {
                        if r.rows.is_empty() {
                            csv.write_record(BOUNDS_COLUMNS)?;
                        }
                        for row in &r.rows {
                            csv.serialize(row)?;
                        }
                    }
                    Report::Adversary(r) => csv.serialize(AdversaryCsvRow {
                        n: r.n,
                        m: r.m,
                        d: r.d,
                        k: r.k,
                        v0_count: r.v0_count,
                        v1_count: r.v1_count,
                        edge_count: r.edge_count,
                        delta0: r.stats.delta0,
                        delta1: r.stats.delta1,
                        ell0: r.stats.ell0,
                        ell1: r.stats.ell1,
                        all_claims_hold: r.all_claims_hold,
                        ambainis_bound: r.ambainis_bound,
                        closed_form_bound: r.closed_form_bound,
                    })?,
                }
                csv.flush()?;
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self, format: Format) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write(format, &mut buf)?;
        Ok(buf)
    }
}

const BOUNDS_COLUMNS: [&str; 12] = [
    "size",
    "d",
    "k",
    "regime",
    "t",
    "measured_mean_rounds",
    "success_rate",
    "lower_bound",
    "upper_bound",
    "regime_envelope",
    "measured_over_lower",
    "measured_over_upper",
];
