//! Dense state-vector simulation of phase-oracle Grover iterations.
//!
//! A search over an address subset `S` runs on a vector of dimension `|S|`;
//! local index `i` stands for the `i`-th address of `S`. The database oracle
//! `|x>|z> -> |x>|z xor f(x)>` is applied in its phase-kickback form, flipping
//! the sign of every address whose item lies in the current target set. Each
//! flip is one oracle query and is charged to a [`QueryLedger`].

use std::collections::BTreeSet;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::database::Database;
use crate::error::{Error, Result};

/// Tolerance on `sum |a_i|^2 = 1`.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Uniform superposition over `dim` basis states.
    pub fn uniform(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension);
        }
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self {
            amplitudes: vec![a; dim],
        })
    }

    /// Wraps raw amplitudes. The vector must be non-empty and normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension);
        }
        let state = Self { amplitudes };
        state.check_normalized()?;
        Ok(state)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Total probability on the addresses the predicate marks.
    pub fn marked_mass(&self, marked: &MarkedPredicate) -> f64 {
        self.amplitudes
            .iter()
            .zip(&marked.mask)
            .filter(|(_, &m)| m)
            .map(|(a, _)| a.norm_sqr())
            .sum()
    }

    fn check_normalized(&self) -> Result<()> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(())
    }

    /// One Grover iteration: oracle phase flip on marked addresses, then
    /// reflection of every amplitude about the mean. Charges one query to
    /// `copy` in `ledger`.
    pub fn grover_iterate(
        &mut self,
        marked: &MarkedPredicate,
        ledger: &mut QueryLedger,
        copy: usize,
    ) -> Result<()> {
        if self.dim() != marked.dim() {
            return Err(Error::DimensionMismatch {
                state: self.dim(),
                predicate: marked.dim(),
            });
        }
        ledger.record(copy, 1)?;

        let mut sum = Complex64::new(0.0, 0.0);
        for (a, &m) in self.amplitudes.iter_mut().zip(&marked.mask) {
            if m {
                *a = -*a;
            }
            sum += *a;
        }
        let twice_mean = sum * (2.0 / self.dim() as f64);
        for a in &mut self.amplitudes {
            *a = twice_mean - *a;
        }
        Ok(())
    }

    /// Samples a basis index with probability `|a_i|^2`.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<usize> {
        self.check_normalized()?;
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                last_nonzero = i;
            }
            acc += p;
            if u < acc {
                return Ok(i);
            }
        }
        // u landed in the rounding slack above the accumulated total.
        Ok(last_nonzero)
    }
}

/// Membership test `marked(i) <=> f(S[i]) in Y`, evaluated over a subdomain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedPredicate {
    subdomain: Vec<usize>,
    mask: Vec<bool>,
}

impl MarkedPredicate {
    pub fn new(db: &Database, subdomain: &[usize], targets: &BTreeSet<u64>) -> Result<Self> {
        if let Some(&bad) = subdomain.iter().find(|&&x| x >= db.len()) {
            return Err(Error::invalid(format!(
                "address {bad} outside database of size {}",
                db.len()
            )));
        }
        let mask = subdomain
            .iter()
            .map(|&x| targets.contains(&db.get(x)))
            .collect();
        Ok(Self {
            subdomain: subdomain.to_vec(),
            mask,
        })
    }

    /// Predicate over `0..mask.len()` with explicit membership flags.
    pub fn from_mask(mask: Vec<bool>) -> Self {
        Self {
            subdomain: (0..mask.len()).collect(),
            mask,
        }
    }

    pub fn dim(&self) -> usize {
        self.mask.len()
    }

    pub fn is_marked(&self, local: usize) -> bool {
        self.mask[local]
    }

    pub fn marked_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// True when nothing in the subdomain is marked.
    pub fn is_empty(&self) -> bool {
        self.marked_count() == 0
    }

    /// Database address behind local index `local`.
    pub fn address(&self, local: usize) -> usize {
        self.subdomain[local]
    }
}

/// Oracle-query counts per database copy, plus classical verification rounds.
///
/// Copies run in lockstep, so the number of parallel rounds is the largest
/// per-copy count. Counts only ever increase.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLedger {
    per_copy: Vec<u64>,
    verification: u64,
}

impl QueryLedger {
    pub fn new(copies: usize) -> Self {
        Self {
            per_copy: vec![0; copies],
            verification: 0,
        }
    }

    pub fn copies(&self) -> usize {
        self.per_copy.len()
    }

    pub fn record(&mut self, copy: usize, queries: u64) -> Result<()> {
        let copies = self.per_copy.len();
        let slot = self.per_copy.get_mut(copy).ok_or_else(|| {
            Error::invalid(format!("copy {copy} out of range for {copies} copies"))
        })?;
        *slot += queries;
        Ok(())
    }

    pub fn record_verification(&mut self, rounds: u64) {
        self.verification += rounds;
    }

    pub fn per_copy(&self) -> &[u64] {
        &self.per_copy
    }

    pub fn verification(&self) -> u64 {
        self.verification
    }

    pub fn parallel_rounds(&self) -> u64 {
        self.per_copy.iter().copied().max().unwrap_or(0)
    }

    pub fn total_queries(&self) -> u64 {
        self.per_copy.iter().sum()
    }

    /// Adds another ledger's counts copy by copy.
    pub fn absorb(&mut self, other: &QueryLedger) -> Result<()> {
        if other.copies() != self.copies() {
            return Err(Error::invalid(format!(
                "cannot merge ledger of {} copies into {}",
                other.copies(),
                self.copies()
            )));
        }
        for (a, b) in self.per_copy.iter_mut().zip(&other.per_copy) {
            *a += b;
        }
        self.verification += other.verification;
        Ok(())
    }
}

/// Closed-form success probability `sin^2((2r+1) theta)` with
/// `sin^2 theta = marked / size`, after `iterations` Grover iterations.
pub fn success_probability(size: usize, marked: usize, iterations: u64) -> Result<f64> {
    if marked == 0 {
        return Err(Error::invalid(
            "success probability is undefined with no marked addresses",
        ));
    }
    if marked > size {
        return Err(Error::invalid(format!(
            "{marked} marked addresses exceed space of {size}"
        )));
    }
    let theta = rotation_angle(size, marked);
    Ok(((2 * iterations + 1) as f64 * theta).sin().powi(2))
}

/// `theta = arcsin(sqrt(marked / size))`.
pub fn rotation_angle(size: usize, marked: usize) -> f64 {
    (marked as f64 / size as f64).sqrt().asin()
}

/// Iteration count maximizing the success probability for a known number of
/// marked addresses, `floor(pi / (4 theta))`.
pub fn optimal_iterations(size: usize, marked: usize) -> u64 {
    let theta = rotation_angle(size, marked);
    (std::f64::consts::FRAC_PI_4 / theta).floor() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    fn one_marked(dim: usize, at: usize) -> MarkedPredicate {
        MarkedPredicate::from_mask((0..dim).map(|i| i == at).collect())
    }

    #[test]
    fn uniform_rejects_zero_dim() {
        assert!(matches!(
            StateVector::uniform(0),
            Err(Error::InvalidDimension)
        ));
    }

    #[test]
    fn uniform_amplitudes() {
        assert_eq!(
            StateVector::uniform(1).unwrap().amplitudes(),
            &[Complex64::new(1.0, 0.0)]
        );
        let s = StateVector::uniform(4).unwrap();
        assert!(s
            .amplitudes()
            .iter()
            .all(|a| *a == Complex64::new(0.5, 0.0)));
        for p in StateVector::uniform(2).unwrap().probabilities() {
            assert!((p - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn four_addresses_one_iteration_is_exact() {
        let mut s = StateVector::uniform(4).unwrap();
        let p = one_marked(4, 2);
        let mut ledger = QueryLedger::new(1);
        s.grover_iterate(&p, &mut ledger, 0).unwrap();
        assert!((s.probabilities()[2] - 1.0).abs() < 1e-12);
        assert_eq!(ledger.per_copy(), &[1]);
    }

    #[test]
    fn empty_mark_set_is_fixed_point() {
        let mut s = StateVector::uniform(8).unwrap();
        let before = s.clone();
        let mut ledger = QueryLedger::new(1);
        s.grover_iterate(&MarkedPredicate::from_mask(vec![false; 8]), &mut ledger, 0)
            .unwrap();
        for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
            assert!((a - b).norm() < 1e-15 || (a + b).norm() < 1e-15);
        }
    }

    #[test]
    fn all_marked_keeps_distribution() {
        let mut s = StateVector::uniform(3).unwrap();
        let before = s.probabilities();
        let mut ledger = QueryLedger::new(1);
        s.grover_iterate(&MarkedPredicate::from_mask(vec![true; 3]), &mut ledger, 0)
            .unwrap();
        for (a, b) in s.probabilities().iter().zip(&before) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected_without_charging() {
        let mut s = StateVector::uniform(4).unwrap();
        let mut ledger = QueryLedger::new(1);
        let err = s.grover_iterate(&one_marked(8, 0), &mut ledger, 0);
        assert!(matches!(
            err,
            Err(Error::DimensionMismatch {
                state: 4,
                predicate: 8
            })
        ));
        assert_eq!(ledger.total_queries(), 0);
    }

    #[test]
    fn measure_basis_states() {
        let mut rng = seed::rng(3);
        let e0 = StateVector::from_amplitudes(
            [1.0, 0.0, 0.0, 0.0]
                .iter()
                .map(|&x| Complex64::new(x, 0.0))
                .collect(),
        )
        .unwrap();
        let e1 =
            StateVector::from_amplitudes(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)])
                .unwrap();
        for _ in 0..1000 {
            assert_eq!(e0.measure(&mut rng).unwrap(), 0);
            assert_eq!(e1.measure(&mut rng).unwrap(), 1);
        }
    }

    #[test]
    fn measure_uniform_two_is_fair() {
        let s = StateVector::uniform(2).unwrap();
        let mut rng = seed::rng(2024);
        let trials = 100_000;
        let zeros = (0..trials)
            .filter(|_| s.measure(&mut rng).unwrap() == 0)
            .count();
        let freq = zeros as f64 / trials as f64;
        assert!((freq - 0.5).abs() <= 0.01, "frequency {freq}");
    }

    #[test]
    fn measure_rejects_unnormalized() {
        let s = StateVector {
            amplitudes: vec![Complex64::new(0.5, 0.0); 2],
        };
        assert!(matches!(
            s.measure(&mut seed::rng(0)),
            Err(Error::NotNormalized { .. })
        ));
        assert!(StateVector::from_amplitudes(vec![Complex64::new(2.0, 0.0)]).is_err());
    }

    #[test]
    fn measurement_is_seed_deterministic() {
        let s = StateVector::uniform(37).unwrap();
        let draw = |seed| {
            let mut rng = seed::rng(seed);
            (0..50)
                .map(|_| s.measure(&mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(5), draw(5));
        assert_ne!(draw(5), draw(6));
    }

    #[test]
    fn closed_form_examples() {
        assert!((success_probability(4, 1, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((success_probability(77, 77, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!(success_probability(8, 0, 1).is_err());
        // sin^2(51 * asin(1/32)), evaluated independently with mpmath.
        let p = success_probability(1024, 1, 25).unwrap();
        assert!((p - 0.999_461_244_744_408).abs() < 1e-12, "{p}");
    }

    #[test]
    fn simulation_matches_closed_form_at_1024() {
        let p = one_marked(1024, 700);
        let mut s = StateVector::uniform(1024).unwrap();
        let mut ledger = QueryLedger::new(1);
        for _ in 0..25 {
            s.grover_iterate(&p, &mut ledger, 0).unwrap();
        }
        let expected = success_probability(1024, 1, 25).unwrap();
        assert!((s.marked_mass(&p) - expected).abs() < 1e-9);
        assert_eq!(ledger.per_copy(), &[25]);
    }

    #[test]
    fn optimal_iterations_small_cases() {
        assert_eq!(optimal_iterations(4, 1), 1);
        assert_eq!(optimal_iterations(9, 9), 0);
        assert_eq!(optimal_iterations(1024, 1), 25);
    }

    #[test]
    fn ledger_rounds_are_max_over_copies() {
        let mut l = QueryLedger::new(3);
        l.record(0, 4).unwrap();
        l.record(2, 9).unwrap();
        l.record(1, 1).unwrap();
        assert_eq!(l.parallel_rounds(), 9);
        assert_eq!(l.total_queries(), 14);
        assert!(l.record(3, 1).is_err());
    }
}
