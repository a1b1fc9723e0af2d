//! Seeded Monte Carlo sampling over F_p^n.
//!
//! Sample `i` is drawn from a ChaCha8 stream keyed by `(seed, p)` with stream
//! number `i`, so every point is a pure function of `(seed, p, i)`. Reports
//! are therefore identical for any worker count or evaluation order.
//!
//! Residues are taken as `next_u64() % p`; for `p < 2^32` the modulo bias is
//! below `2^-32`.

use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dual::rank_in_place;
use crate::ffarith::{ArithError, PrimeField};
use crate::mpoly::{ModSystem, PolySystem};
use crate::par::{fold_range, map_range, Execution};
use crate::stats::{PrimeObservation, StatsError};

/// Default trial cap for [`find_k`].
pub const DEFAULT_CAP: u64 = 100_000_000;

const SEARCH_CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScanError {
    #[error("gave up at p = {p} after {trials} trials with {hits} of {k} hits")]
    GaveUp { p: u64, trials: u64, hits: u64, k: u64 },
    #[error("trial count must be positive")]
    ZeroTrials,
    #[error("target hit count must be positive")]
    ZeroTarget,
    #[error("{0}")]
    Unsupported(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SampleConfig {
    pub p: u64,
    pub trials: u64,
    pub seed: u64,
    /// 1 runs sequentially; any other value uses the thread pool.
    pub workers: usize,
}

impl SampleConfig {
    pub fn new(p: u64, trials: u64, seed: u64) -> Result<Self, ScanError> {
        PrimeField::new(p)?;
        if trials == 0 {
            return Err(ScanError::ZeroTrials);
        }
        Ok(SampleConfig {
            p,
            trials,
            seed,
            workers: 0,
        })
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn execution(&self) -> Execution {
        Execution::from_workers(self.workers)
    }
}

/// Counter-based point generator.
#[derive(Debug, Clone)]
pub struct PointSampler {
    base: ChaCha8Rng,
    p: u64,
    nvars: usize,
}

impl PointSampler {
    pub fn new(seed: u64, p: u64, nvars: usize) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&p.to_le_bytes());
        PointSampler {
            base: ChaCha8Rng::from_seed(key),
            p,
            nvars,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Writes sample `index` into `out` (length `nvars`), coordinates in `[0, p)`.
    pub fn fill(&self, index: u64, out: &mut [u64]) {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        for c in out.iter_mut() {
            *c = rng.next_u64() % self.p;
        }
    }

    pub fn point(&self, index: u64) -> Vec<u64> {
        let mut out = vec![0; self.nvars];
        self.fill(index, &mut out);
        out
    }
}

/// The first `config.trials` sample points in F_p^nvars.
pub fn sample_points(config: &SampleConfig, nvars: usize) -> impl Iterator<Item = Vec<u64>> {
    let sampler = PointSampler::new(config.seed, config.p, nvars);
    (0..config.trials).map(move |i| sampler.point(i))
}

/// A pointwise membership test on A^n over F_p.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MembershipPredicate {
    /// All polynomials of the system vanish.
    Vanishing(PolySystem),
    /// The symmetric `dim × dim` matrix read from the point has rank at most
    /// `max_rank`. Coordinates are the upper triangle `c_ij (i <= j)` row by
    /// row, i.e. the coefficients of the quadratic form `Σ c_ij x_i x_j`;
    /// the matrix is its Hessian (`2c_ii` on the diagonal). Needs odd `p`.
    SymmetricRankAtMost { dim: usize, max_rank: usize },
}

impl MembershipPredicate {
    /// Quadrics in four variables whose form has rank at most `max_rank`
    /// (3: singular quadric, 2: singular along at least a line).
    pub fn quadric_rank_at_most(max_rank: usize) -> Self {
        MembershipPredicate::SymmetricRankAtMost { dim: 4, max_rank }
    }

    pub fn nvars(&self) -> usize {
        match self {
            MembershipPredicate::Vanishing(sys) => sys.nvars(),
            MembershipPredicate::SymmetricRankAtMost { dim, .. } => dim * (dim + 1) / 2,
        }
    }

    pub fn prepare(&self, p: u64) -> Result<PreparedPredicate, ScanError> {
        let field = PrimeField::new(p)?;
        Ok(match self {
            MembershipPredicate::Vanishing(sys) => PreparedPredicate::Vanishing(sys.reduce(field)),
            MembershipPredicate::SymmetricRankAtMost { dim, max_rank } => {
                if p == 2 {
                    return Err(ScanError::Unsupported(
                        "symmetric-rank predicates need an odd prime".into(),
                    ));
                }
                PreparedPredicate::SymmetricRank {
                    field,
                    dim: *dim,
                    max_rank: *max_rank,
                }
            }
        })
    }
}

/// A predicate specialised to one prime.
#[derive(Debug, Clone)]
pub enum PreparedPredicate {
    Vanishing(ModSystem),
    SymmetricRank {
        field: PrimeField,
        dim: usize,
        max_rank: usize,
    },
}

impl PreparedPredicate {
    pub fn contains(&self, point: &[u64]) -> bool {
        match self {
            PreparedPredicate::Vanishing(sys) => sys.vanishes_at(point),
            PreparedPredicate::SymmetricRank { max_rank, .. } => {
                self.symmetric_rank(point).expect("symmetric predicate") <= *max_rank
            }
        }
    }

    /// Rank of the symmetric matrix encoded by `point`.
    pub fn symmetric_rank(&self, point: &[u64]) -> Option<usize> {
        let PreparedPredicate::SymmetricRank { field, dim, .. } = self else {
            return None;
        };
        let d = *dim;
        let mut a = vec![0u64; d * d];
        let mut k = 0;
        for i in 0..d {
            for j in i..d {
                let c = point[k] % field.modulus();
                k += 1;
                if i == j {
                    a[i * d + i] = field.add(c, c);
                } else {
                    a[i * d + j] = c;
                    a[j * d + i] = c;
                }
            }
        }
        Some(rank_in_place(&mut a, d, d, field))
    }
}

/// Which tallies [`run_scan`] collects besides the hit count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScanOptions {
    /// Jacobian rank at every hit (system predicates only).
    pub ranks: bool,
    /// Balanced value of the single polynomial at every sample (hypersurfaces only).
    pub values: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub config: SampleConfig,
    pub hits: u64,
    pub rank_tally: Option<BTreeMap<usize, u64>>,
    pub value_tally: Option<BTreeMap<i64, u64>>,
}

impl ScanReport {
    pub fn gamma_hat(&self) -> f64 {
        self.hits as f64 / self.config.trials as f64
    }
}

#[derive(Default)]
struct Tally {
    hits: u64,
    ranks: BTreeMap<usize, u64>,
    values: BTreeMap<i64, u64>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.hits += other.hits;
        for (k, v) in other.ranks {
            *self.ranks.entry(k).or_default() += v;
        }
        for (k, v) in other.values {
            *self.values.entry(k).or_default() += v;
        }
        self
    }
}

/// Samples `config.trials` points and tallies membership.
pub fn run_scan(
    pred: &MembershipPredicate,
    config: &SampleConfig,
    options: ScanOptions,
) -> Result<ScanReport, ScanError> {
    if config.trials == 0 {
        return Err(ScanError::ZeroTrials);
    }
    let prepared = pred.prepare(config.p)?;
    let system = match &prepared {
        PreparedPredicate::Vanishing(sys) => Some(sys),
        _ => None,
    };
    if options.ranks && system.is_none() {
        return Err(ScanError::Unsupported(
            "rank tallies need a polynomial system".into(),
        ));
    }
    if options.values && system.is_none_or(|s| s.polys().len() != 1) {
        return Err(ScanError::Unsupported(
            "value tallies need a single polynomial".into(),
        ));
    }
    let nvars = pred.nvars();
    let sampler = PointSampler::new(config.seed, config.p, nvars);
    let field = PrimeField::new(config.p)?;

    let tally = fold_range(
        config.execution(),
        0..config.trials,
        Tally::default,
        |mut acc, i| {
            let point = sampler.point(i);
            if options.values {
                let f = &system.expect("checked above").polys()[0];
                let v = field.balanced(f.eval_unchecked(&point));
                *acc.values.entry(v).or_default() += 1;
            }
            if prepared.contains(&point) {
                acc.hits += 1;
                if options.ranks {
                    let j = system.expect("checked above").jacobian_unchecked(&point);
                    *acc.ranks.entry(j.rank()).or_default() += 1;
                }
            }
            acc
        },
        Tally::merge,
    );
    Ok(ScanReport {
        config: *config,
        hits: tally.hits,
        rank_tally: options.ranks.then_some(tally.ranks),
        value_tally: options.values.then_some(tally.values),
    })
}

/// Parameters of a search for `k` hits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchConfig {
    pub p: u64,
    pub k: u64,
    pub seed: u64,
    pub cap: u64,
    pub workers: usize,
}

impl SearchConfig {
    pub fn new(p: u64, k: u64, seed: u64) -> Self {
        SearchConfig {
            p,
            k,
            seed,
            cap: DEFAULT_CAP,
            workers: 0,
        }
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

/// Draws samples until `k` of them satisfy the predicate and returns the
/// number of trials used, counting the `k`-th hit.
pub fn find_k(pred: &MembershipPredicate, config: &SearchConfig) -> Result<u64, ScanError> {
    if config.k == 0 {
        return Err(ScanError::ZeroTarget);
    }
    let prepared = pred.prepare(config.p)?;
    let sampler = PointSampler::new(config.seed, config.p, pred.nvars());
    let exec = Execution::from_workers(config.workers);
    let mut hits = 0u64;
    let mut start = 0u64;
    while start < config.cap {
        let end = (start + SEARCH_CHUNK).min(config.cap);
        let flags = map_range(exec, start..end, |i| prepared.contains(&sampler.point(i)));
        for (offset, hit) in flags.into_iter().enumerate() {
            if hit {
                hits += 1;
                if hits == config.k {
                    return Ok(start + offset as u64 + 1);
                }
            }
        }
        start = end;
    }
    Err(ScanError::GaveUp {
        p: config.p,
        trials: config.cap,
        hits,
        k: config.k,
    })
}

/// One prime's outcome in a survey.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyEntry {
    pub p: u64,
    pub outcome: Result<PrimeObservation, ScanError>,
}

/// Runs [`find_k`] at every prime with the same seed (streams are keyed by
/// the prime as well, so primes do not share samples).
pub fn multi_prime_survey(
    pred: &MembershipPredicate,
    primes: &[u64],
    k: u64,
    seed: u64,
    cap: u64,
    workers: usize,
) -> Result<Vec<SurveyEntry>, ScanError> {
    let mut distinct = primes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(StatsError::InsufficientData(format!(
            "a survey needs at least 2 distinct primes, got {}",
            distinct.len()
        ))
        .into());
    }
    Ok(primes
        .iter()
        .map(|&p| {
            let cfg = SearchConfig {
                p,
                k,
                seed,
                cap,
                workers,
            };
            let outcome = find_k(pred, &cfg).map(|trials| PrimeObservation { p, hits: k, trials });
            SurveyEntry { p, outcome }
        })
        .collect())
}

/// Successful observations of a survey, or the first failure.
pub fn survey_observations(entries: &[SurveyEntry]) -> Result<Vec<PrimeObservation>, ScanError> {
    entries.iter().map(|e| e.outcome.clone()).collect()
}
