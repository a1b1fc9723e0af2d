use std::path::Path;

use fieldprobe::ffarith::is_prime;
use fieldprobe::lift::{
    all_points_with, certify_integer_solution, certify_rational_solution, crt_list, integer_residuals,
    modular_roots, newton_lift, recover_rational, ResidueVector,
};
use fieldprobe::par::Execution;
use fieldprobe::scan::{
    multi_prime_survey, run_scan, MembershipPredicate, SampleConfig, ScanError, ScanOptions,
};
use fieldprobe::stats::{classify_factors, codim_component_estimate, estimate_codim_components, Estimate};
use fieldprobe::{BigInt, Fraction, PolySystem};

use crate::report::{
    Candidate, Config, CrtResult, EstimateOut, Failure, Fit, LiftState, NewtonResult, Observation,
    Payload, Recovered, Report, RootLift, ScanResult, Status, SurveyResult, SCHEMA,
};
use crate::sysfile::SystemFile;

/// Failure before a report could be produced.
#[derive(Debug)]
pub enum CliError {
    /// Bad input file or arguments (exit 2).
    Input(String),
    /// Failure while computing (exit 1).
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Runtime(m) => m,
        }
    }
}

pub const EXIT_NO_SOLUTIONS: i32 = 3;

fn check_primes(primes: &[u64]) -> Result<(), CliError> {
    match primes.iter().find(|&&p| !is_prime(p) || p >= 1 << 32) {
        Some(p) => Err(CliError::Input(format!("{p} is not a prime below 2^32"))),
        None => Ok(()),
    }
}

fn estimate_out(e: &Estimate) -> EstimateOut {
    EstimateOut {
        value: e.value,
        halfwidth99: e.halfwidth99,
    }
}

fn ok_status() -> Status {
    Status { code: 0, message: None }
}

pub struct ScanRequest<'a> {
    pub path: &'a Path,
    pub p: u64,
    pub trials: u64,
    pub seed: u64,
    pub ranks: bool,
    pub values: bool,
    pub workers: usize,
}

pub fn scan(req: ScanRequest<'_>, invocation: Vec<String>) -> Result<Report, CliError> {
    let file = SystemFile::read(req.path).map_err(CliError::Input)?;
    check_primes(&[req.p])?;
    if req.trials == 0 {
        return Err(CliError::Input("--trials must be positive".into()));
    }
    let single = file.system.len() == 1;
    if req.values && !single {
        return Err(CliError::Input("--values needs a file with exactly one polynomial".into()));
    }
    let nvars = file.system.nvars();
    let config = SampleConfig::new(req.p, req.trials, req.seed)
        .map_err(|e| CliError::Input(e.to_string()))?
        .with_workers(req.workers);
    let options = ScanOptions {
        ranks: req.ranks,
        values: req.values,
    };
    let pred = MembershipPredicate::Vanishing(file.system);
    let out = run_scan(&pred, &config, options).map_err(|e| CliError::Runtime(e.to_string()))?;

    let verdict = if single {
        let v = classify_factors(out.hits, out.config.trials, req.p, nvars as u32)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        Some(v.as_str().to_string())
    } else {
        None
    };
    let estimates = match &out.rank_tally {
        Some(tally) => Some(
            codim_component_estimate(tally, req.p, req.trials)
                .map_err(|e| CliError::Runtime(e.to_string()))?
                .iter()
                .map(|(&c, e)| (c, estimate_out(e)))
                .collect(),
        ),
        None => None,
    };
    Ok(Report {
        schema: SCHEMA,
        invocation,
        config: Config::Scan {
            system: req.path.display().to_string(),
            vars: file.vars,
            p: req.p,
            trials: req.trials,
            seed: req.seed,
            ranks: req.ranks,
            values: req.values,
        },
        result: Payload::Scan(ScanResult {
            hits: out.hits,
            trials: out.config.trials,
            gamma_hat: out.gamma_hat(),
            verdict,
            rank_tally: out.rank_tally,
            estimates,
            value_tally: out.value_tally,
        }),
        status: ok_status(),
    })
}

/// `quadric-rank-le:<r>` or `always`.
pub fn parse_predicate(spec: &str) -> Result<MembershipPredicate, CliError> {
    if spec == "always" {
        let sys = PolySystem::new(1, Vec::new()).expect("empty system");
        return Ok(MembershipPredicate::Vanishing(sys));
    }
    if let Some(r) = spec.strip_prefix("quadric-rank-le:") {
        let r: usize = r
            .parse()
            .map_err(|_| CliError::Input(format!("bad rank in predicate `{spec}`")))?;
        return Ok(MembershipPredicate::quadric_rank_at_most(r));
    }
    Err(CliError::Input(format!(
        "unknown predicate `{spec}` (expected `quadric-rank-le:<r>` or `always`)"
    )))
}

pub struct SurveyRequest<'a> {
    pub predicate: Option<&'a str>,
    pub system: Option<&'a Path>,
    pub primes: &'a [u64],
    pub k: u64,
    pub seed: u64,
    pub cap: u64,
    pub workers: usize,
}

pub fn survey(req: SurveyRequest<'_>, invocation: Vec<String>) -> Result<Report, CliError> {
    let (label, pred) = match (req.predicate, req.system) {
        (Some(spec), None) => (spec.to_string(), parse_predicate(spec)?),
        (None, Some(path)) => {
            let file = SystemFile::read(path).map_err(CliError::Input)?;
            (format!("system:{}", path.display()), MembershipPredicate::Vanishing(file.system))
        }
        _ => return Err(CliError::Input("give exactly one of --predicate and --system".into())),
    };
    check_primes(req.primes)?;
    if req.k == 0 {
        return Err(CliError::Input("--k must be positive".into()));
    }
    let entries = multi_prime_survey(&pred, req.primes, req.k, req.seed, req.cap, req.workers)
        .map_err(|e| match e {
            ScanError::Stats(_) | ScanError::Unsupported(_) => CliError::Input(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        })?;
    let mut observations = Vec::new();
    let mut found = Vec::new();
    let mut failures = Vec::new();
    for e in entries {
        match e.outcome {
            Ok(o) => {
                let (x, y) = o.log_point();
                observations.push(Observation {
                    p: o.p,
                    hits: o.hits,
                    trials: o.trials,
                    gamma_hat: o.gamma_hat(),
                    log_inv_p: x,
                    log_gamma_hat: y,
                });
                found.push(o);
            }
            Err(err) => failures.push(Failure {
                p: e.p,
                message: err.to_string(),
            }),
        }
    }
    let (fit, status) = match estimate_codim_components(&found) {
        Ok(f) => (
            Some(Fit {
                codim: f.codim,
                codim_rounded: f.codim_rounded,
                components: estimate_out(&f.components),
            }),
            ok_status(),
        ),
        Err(e) => (
            None,
            Status {
                code: 1,
                message: Some(format!("no fit: {e}")),
            },
        ),
    };
    Ok(Report {
        schema: SCHEMA,
        invocation,
        config: Config::Survey {
            predicate: label,
            primes: req.primes.to_vec(),
            k: req.k,
            seed: req.seed,
            cap: req.cap,
        },
        result: Payload::Survey(SurveyResult {
            observations,
            failures,
            fit,
        }),
        status,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum LiftMode {
    Crt,
    Newton,
}

pub struct LiftRequest<'a> {
    pub path: &'a Path,
    pub primes: Vec<u64>,
    pub mode: LiftMode,
    pub steps: usize,
    pub budget: u64,
    pub seed: u64,
    pub workers: usize,
}

fn strings(xs: &[BigInt]) -> Vec<String> {
    xs.iter().map(BigInt::to_string).collect()
}

pub fn lift(req: LiftRequest<'_>, invocation: Vec<String>) -> Result<Report, CliError> {
    let file = SystemFile::read(req.path).map_err(CliError::Input)?;
    check_primes(&req.primes)?;
    if req.primes.is_empty() {
        return Err(CliError::Input("give primes with -p or --primes-up-to".into()));
    }
    let sys = &file.system;
    let (result, status) = match req.mode {
        LiftMode::Crt => lift_crt(sys, &req)?,
        LiftMode::Newton => lift_newton(sys, &req)?,
    };
    Ok(Report {
        schema: SCHEMA,
        invocation,
        config: Config::Lift {
            system: req.path.display().to_string(),
            vars: file.vars.clone(),
            primes: req.primes.clone(),
            mode: match req.mode {
                LiftMode::Crt => "crt".into(),
                LiftMode::Newton => "newton".into(),
            },
            steps: req.steps,
            budget: req.budget,
            seed: req.seed,
        },
        result,
        status,
    })
}

fn no_solutions() -> Status {
    Status {
        code: EXIT_NO_SOLUTIONS,
        message: Some("no modular solutions".into()),
    }
}

fn lift_crt(sys: &PolySystem, req: &LiftRequest<'_>) -> Result<(Payload, Status), CliError> {
    let exec = Execution::from_workers(req.workers);
    let mut per_prime = Vec::new();
    for &p in &req.primes {
        let points = all_points_with(sys, p, req.budget, exec).map_err(|e| CliError::Runtime(e.to_string()))?;
        per_prime.push(crate::report::PrimePoints { p, points });
    }
    let unique: Vec<&crate::report::PrimePoints> = per_prime.iter().filter(|pp| pp.points.len() == 1).collect();
    let mut result = CrtResult {
        per_prime: per_prime.clone(),
        unique_primes: unique.iter().map(|pp| pp.p).collect(),
        primes_without_solutions: per_prime.iter().filter(|pp| pp.points.is_empty()).map(|pp| pp.p).collect(),
        candidate: None,
        integer_residuals: None,
        integer_certified: false,
        rational: None,
        rational_certified: false,
    };
    if per_prime.iter().all(|pp| pp.points.is_empty()) {
        return Ok((Payload::Crt(result), no_solutions()));
    }
    if unique.is_empty() {
        let status = Status {
            code: 0,
            message: Some("no prime has a unique solution; nothing to combine".into()),
        };
        return Ok((Payload::Crt(result), status));
    }

    let mut modulus = BigInt::from(1);
    let mut coords = Vec::new();
    for var in 0..sys.nvars() {
        let entries: Vec<(BigInt, BigInt)> = unique
            .iter()
            .map(|pp| (BigInt::from(pp.p), BigInt::from(pp.points[0][var])))
            .collect();
        let (m, x) = crt_list(&entries).map_err(|e| CliError::Runtime(e.to_string()))?;
        modulus = m;
        coords.push(x);
    }
    let residuals = integer_residuals(&coords, sys).map_err(|e| CliError::Runtime(e.to_string()))?;
    result.integer_certified = certify_integer_solution(&coords, sys);
    result.integer_residuals = Some(strings(&residuals));
    result.candidate = Some(Candidate {
        modulus: modulus.to_string(),
        coords: strings(&coords),
    });

    let recovered: Vec<Option<_>> = coords.iter().map(|x| recover_rational(x, &modulus).ok()).collect();
    if recovered.iter().all(Option::is_some) {
        let fractions: Vec<Fraction> = recovered.iter().flatten().map(|r| r.fraction.clone()).collect();
        result.rational_certified = certify_rational_solution(&fractions, sys);
    }
    result.rational = Some(
        recovered
            .into_iter()
            .map(|r| {
                r.map(|r| Recovered {
                    fraction: r.fraction.to_string(),
                    raw_numerator: r.raw_numerator.to_string(),
                    raw_denominator: r.raw_denominator.to_string(),
                    unique: r.unique,
                })
            })
            .collect(),
    );
    Ok((Payload::Crt(result), ok_status()))
}

fn lift_newton(sys: &PolySystem, req: &LiftRequest<'_>) -> Result<(Payload, Status), CliError> {
    if !sys.is_square() {
        return Err(CliError::Input(format!(
            "newton mode needs as many equations as unknowns, got {} and {}",
            sys.len(),
            sys.nvars()
        )));
    }
    let mut roots = Vec::new();
    for &p in &req.primes {
        let found = modular_roots(sys, p, req.budget).map_err(|e| CliError::Runtime(e.to_string()))?;
        for root in found {
            let mut lift = RootLift {
                p,
                root: root.point.clone(),
                smooth: root.smooth,
                trace: Vec::new(),
                stabilized: false,
                integer_certified: false,
                rational: None,
                rational_certified: false,
            };
            if root.smooth {
                let start = ResidueVector::from_point(&root.point, p).map_err(|e| CliError::Runtime(e.to_string()))?;
                let trace = newton_lift(&start, sys, req.steps).map_err(|e| CliError::Runtime(e.to_string()))?;
                lift.trace = trace
                    .states
                    .iter()
                    .map(|s| LiftState {
                        modulus: s.modulus().to_string(),
                        coords: strings(s.coords()),
                    })
                    .collect();
                lift.stabilized = trace.stabilized();
                let last = trace.last();
                lift.integer_certified = certify_integer_solution(last.coords(), sys);
                let fractions: Option<Vec<Fraction>> = last
                    .coords()
                    .iter()
                    .map(|x| recover_rational(x, last.modulus()).ok().map(|r| r.fraction))
                    .collect();
                if let Some(fr) = fractions {
                    lift.rational_certified = certify_rational_solution(&fr, sys);
                    lift.rational = Some(fr.iter().map(Fraction::to_string).collect());
                }
            }
            roots.push(lift);
        }
    }
    let status = if roots.is_empty() { no_solutions() } else { ok_status() };
    Ok((Payload::Newton(NewtonResult { roots }), status))
}

/// Primes `p <= bound`.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&p| is_prime(p)).collect()
}
