//! Reference distributions and estimators for point counts.
//!
//! Probabilities, means and variances are computed as exact rationals and
//! only converted to `f64` at the boundary. All confidence bands use the
//! two-sided 99% normal quantile [`Z_99`].

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

/// Two-sided 99% normal quantile used for every band in this crate.
pub const Z_99: f64 = 2.58;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("k = {k} exceeds the {trials} points of the space")]
    KOutOfRange { k: u64, trials: BigUint },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("regression is degenerate: all x values are equal")]
    DegenerateRegression,
    #[error("trial count must be positive")]
    ZeroTrials,
    #[error("invalid observation at p = {p}: {hits} hits in {trials} trials")]
    InvalidObservation { p: u64, hits: u64, trials: u64 },
}

/// Number of polynomial factors assumed by a [`ZeroCountModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Factors {
    One,
    Two,
}

/// Binomial law of the zero count of a random function F_p^n → F_p, or of
/// the product of two independent ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ZeroCountModel {
    pub p: u64,
    pub n: u32,
    pub factors: Factors,
}

impl ZeroCountModel {
    pub fn new(p: u64, n: u32, factors: Factors) -> Self {
        ZeroCountModel { p, n, factors }
    }

    /// `1/p` for one factor, `(2p-1)/p²` for two.
    pub fn success_probability(&self) -> BigRational {
        let p = BigInt::from(self.p);
        match self.factors {
            Factors::One => BigRational::new(BigInt::one(), p),
            Factors::Two => BigRational::new(BigInt::from(2 * self.p - 1), &p * &p),
        }
    }

    /// `p^n`, the number of points of the space.
    pub fn trials(&self) -> BigUint {
        BigUint::from(self.p).pow(self.n)
    }

    /// Exact mean and variance of the zero count.
    pub fn mean_variance_exact(&self) -> (BigRational, BigRational) {
        let s = self.success_probability();
        let n = BigRational::from_integer(BigInt::from(self.trials()));
        let mean = &n * &s;
        let var = &mean * (BigRational::one() - &s);
        (mean, var)
    }
}

fn binomial(n: &BigUint, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - BigUint::from(i)) / BigUint::from(i + 1);
    }
    acc
}

/// `C(p^n, k) s^k (1-s)^(p^n-k)` exactly.
pub fn zero_count_pmf(model: &ZeroCountModel, k: u64) -> Result<BigRational, StatsError> {
    let trials = model.trials();
    if BigUint::from(k) > trials {
        return Err(StatsError::KOutOfRange { k, trials });
    }
    let rest = (&trials - BigUint::from(k))
        .to_u64()
        .expect("point count fits in u64");
    let s = model.success_probability();
    let q = BigRational::one() - &s;
    let choose = BigRational::from_integer(BigInt::from(binomial(&trials, k)));
    Ok(choose * pow_ratio(&s, k) * pow_ratio(&q, rest))
}

fn pow_ratio(x: &BigRational, e: u64) -> BigRational {
    let numer = num_traits::pow::Pow::pow(x.numer(), e);
    let denom = num_traits::pow::Pow::pow(x.denom(), e);
    BigRational::new(numer, denom)
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("finite rational")
}

/// `(μ, σ)` of the zero count over all `p^n` points.
pub fn model_mean_sigma(model: &ZeroCountModel) -> (f64, f64) {
    let (mean, var) = model.mean_variance_exact();
    (ratio_to_f64(&mean), ratio_to_f64(&var).sqrt())
}

/// Which factor-count hypotheses a zero count is consistent with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorVerdict {
    ConsistentWithOne,
    ConsistentWithTwo,
    Neither,
    Both,
}

impl FactorVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            FactorVerdict::ConsistentWithOne => "consistent-with-1",
            FactorVerdict::ConsistentWithTwo => "consistent-with-2",
            FactorVerdict::Neither => "neither",
            FactorVerdict::Both => "both",
        }
    }
}

/// A point estimate with its 99% half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub halfwidth99: f64,
}

impl Estimate {
    pub fn contains(&self, x: f64) -> bool {
        (x - self.value).abs() <= self.halfwidth99
    }
}

/// 99% band for the hit count among `trials` samples: the model's binomial
/// proportion scaled from `p^n` points to `trials` draws.
pub fn hit_band(model: &ZeroCountModel, trials: u64) -> Estimate {
    let s = ratio_to_f64(&model.success_probability());
    let t = trials as f64;
    Estimate {
        value: t * s,
        halfwidth99: Z_99 * (t * s * (1.0 - s)).sqrt(),
    }
}

/// Tests `hits` against the one-factor and two-factor 99% bands.
pub fn classify_factors(hits: u64, trials: u64, p: u64, n: u32) -> Result<FactorVerdict, StatsError> {
    if trials == 0 {
        return Err(StatsError::ZeroTrials);
    }
    if hits > trials {
        return Err(StatsError::InvalidObservation { p, hits, trials });
    }
    let one = hit_band(&ZeroCountModel::new(p, n, Factors::One), trials).contains(hits as f64);
    let two = hit_band(&ZeroCountModel::new(p, n, Factors::Two), trials).contains(hits as f64);
    Ok(match (one, two) {
        (true, true) => FactorVerdict::Both,
        (true, false) => FactorVerdict::ConsistentWithOne,
        (false, true) => FactorVerdict::ConsistentWithTwo,
        (false, false) => FactorVerdict::Neither,
    })
}

/// Least-squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

pub fn linear_fit(points: &[(f64, f64)]) -> Result<LineFit, StatsError> {
    if points.len() < 2 {
        return Err(StatsError::InsufficientData(format!(
            "regression needs at least 2 points, got {}",
            points.len()
        )));
    }
    let len = points.len() as f64;
    let xbar = points.iter().map(|p| p.0).sum::<f64>() / len;
    let ybar = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = points.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - xbar).powi(2)).sum();
    if sxx == 0.0 {
        return Err(StatsError::DegenerateRegression);
    }
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: ybar - slope * xbar,
    })
}

/// `Σ(x-x̄)(y-ȳ) / Σ(x-x̄)²`.
pub fn regression_slope(points: &[(f64, f64)]) -> Result<f64, StatsError> {
    linear_fit(points).map(|f| f.slope)
}

/// Hits found at one prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeObservation {
    pub p: u64,
    pub hits: u64,
    pub trials: u64,
}

impl PrimeObservation {
    pub fn gamma_hat(&self) -> f64 {
        self.hits as f64 / self.trials as f64
    }

    /// `(log(1/p), log γ̂)`, the log-log plot coordinates.
    pub fn log_point(&self) -> (f64, f64) {
        ((1.0 / self.p as f64).ln(), self.gamma_hat().ln())
    }
}

/// Result of fitting `log γ̂_p = log d - c·log p` across primes.
#[derive(Debug, Clone, PartialEq)]
pub struct CodimFit {
    /// Raw slope `c`.
    pub codim: f64,
    pub codim_rounded: i64,
    /// Number of codimension-`c` components, `exp(intercept)`.
    pub components: Estimate,
    pub points: Vec<(f64, f64)>,
}

/// Codimension and component count from observations at several primes.
///
/// The error on `d` propagates each prime's Poisson band (relative error
/// `2.58/sqrt(hits)` on γ̂) linearly through the intercept.
pub fn estimate_codim_components(obs: &[PrimeObservation]) -> Result<CodimFit, StatsError> {
    let mut primes: Vec<u64> = obs.iter().map(|o| o.p).collect();
    primes.sort_unstable();
    primes.dedup();
    if primes.len() < 2 {
        return Err(StatsError::InsufficientData(format!(
            "need at least 2 distinct primes, got {}",
            primes.len()
        )));
    }
    for o in obs {
        if o.trials == 0 || o.hits > o.trials {
            return Err(StatsError::InvalidObservation {
                p: o.p,
                hits: o.hits,
                trials: o.trials,
            });
        }
        if o.hits == 0 {
            return Err(StatsError::InsufficientData(format!("no hits at p = {}", o.p)));
        }
    }
    let points: Vec<(f64, f64)> = obs.iter().map(PrimeObservation::log_point).collect();
    // x = log(1/p) = -log p, so the slope is c and the intercept is log d.
    let fit = linear_fit(&points)?;
    let len = points.len() as f64;
    let xbar = points.iter().map(|p| p.0).sum::<f64>() / len;
    let sxx: f64 = points.iter().map(|p| (p.0 - xbar).powi(2)).sum();
    let var_log_d: f64 = points
        .iter()
        .zip(obs)
        .map(|(pt, o)| {
            let w = 1.0 / len - xbar * (pt.0 - xbar) / sxx;
            let dy = Z_99 / (o.hits as f64).sqrt();
            (w * dy).powi(2)
        })
        .sum();
    let d = fit.intercept.exp();
    Ok(CodimFit {
        codim: fit.slope,
        codim_rounded: fit.slope.round() as i64,
        components: Estimate {
            value: d,
            halfwidth99: d * var_log_d.sqrt(),
        },
        points,
    })
}

/// Per-rank component estimates `k·p^c/m ± 2.58·sqrt(k)·p^c/m`.
pub fn codim_component_estimate(
    rank_tally: &BTreeMap<usize, u64>,
    p: u64,
    m: u64,
) -> Result<BTreeMap<usize, Estimate>, StatsError> {
    if m == 0 {
        return Err(StatsError::ZeroTrials);
    }
    Ok(rank_tally
        .iter()
        .map(|(&c, &k)| {
            let scale = (p as f64).powi(c as i32) / m as f64;
            let est = Estimate {
                value: k as f64 * scale,
                halfwidth99: Z_99 * (k as f64).sqrt() * scale,
            };
            (c, est)
        })
        .collect())
}
