//! Report model and its JSON, CSV and table renderings.
//!
//! Big integers are carried as decimal strings so the JSON stays exact.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    /// Arguments after the program name, as given.
    pub invocation: Vec<String>,
    pub config: Config,
    pub result: Payload,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Config {
    Scan {
        system: String,
        vars: Vec<String>,
        p: u64,
        trials: u64,
        seed: u64,
        ranks: bool,
        values: bool,
    },
    Survey {
        predicate: String,
        primes: Vec<u64>,
        k: u64,
        seed: u64,
        cap: u64,
    },
    Lift {
        system: String,
        vars: Vec<String>,
        primes: Vec<u64>,
        mode: String,
        steps: usize,
        budget: u64,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
/// Externally tagged: integer-keyed tallies do not survive the buffering of
/// an internally tagged enum.
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Scan(ScanResult),
    Survey(SurveyResult),
    Crt(CrtResult),
    Newton(NewtonResult),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Status {
    pub code: i32,
    pub message: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateOut {
    pub value: f64,
    pub halfwidth99: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub hits: u64,
    pub trials: u64,
    pub gamma_hat: f64,
    /// Single-polynomial input only.
    pub verdict: Option<String>,
    pub rank_tally: Option<BTreeMap<usize, u64>>,
    /// Component estimates keyed by codimension.
    pub estimates: Option<BTreeMap<usize, EstimateOut>>,
    pub value_tally: Option<BTreeMap<i64, u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub p: u64,
    pub hits: u64,
    pub trials: u64,
    pub gamma_hat: f64,
    pub log_inv_p: f64,
    pub log_gamma_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub p: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub codim: f64,
    pub codim_rounded: i64,
    pub components: EstimateOut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyResult {
    pub observations: Vec<Observation>,
    pub failures: Vec<Failure>,
    pub fit: Option<Fit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimePoints {
    pub p: u64,
    pub points: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub modulus: String,
    pub coords: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recovered {
    pub fraction: String,
    pub raw_numerator: String,
    pub raw_denominator: String,
    pub unique: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrtResult {
    pub per_prime: Vec<PrimePoints>,
    pub unique_primes: Vec<u64>,
    pub primes_without_solutions: Vec<u64>,
    pub candidate: Option<Candidate>,
    pub integer_residuals: Option<Vec<String>>,
    pub integer_certified: bool,
    /// One entry per coordinate; `None` where reconstruction failed.
    pub rational: Option<Vec<Option<Recovered>>>,
    pub rational_certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftState {
    pub modulus: String,
    pub coords: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootLift {
    pub p: u64,
    pub root: Vec<u64>,
    pub smooth: bool,
    /// Empty for singular roots, which are not lifted.
    pub trace: Vec<LiftState>,
    /// The last two states agree as integers.
    pub stabilized: bool,
    pub integer_certified: bool,
    pub rational: Option<Vec<String>>,
    pub rational_certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonResult {
    pub roots: Vec<RootLift>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
            Format::Table => self.to_table(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut row = |fields: Vec<String>| w.write_record(&fields).expect("in-memory csv");
        match &self.result {
            Payload::Scan(r) => {
                row(vec!["tally".into(), "key".into(), "count".into()]);
                row(vec!["hits".into(), String::new(), r.hits.to_string()]);
                row(vec!["trials".into(), String::new(), r.trials.to_string()]);
                for (rank, n) in r.rank_tally.iter().flatten() {
                    row(vec!["rank".into(), rank.to_string(), n.to_string()]);
                }
                for (v, n) in r.value_tally.iter().flatten() {
                    row(vec!["value".into(), v.to_string(), n.to_string()]);
                }
            }
            Payload::Survey(r) => {
                row(["log_inv_p", "log_gamma_hat", "p", "hits", "trials"].map(String::from).to_vec());
                for o in &r.observations {
                    row(vec![
                        o.log_inv_p.to_string(),
                        o.log_gamma_hat.to_string(),
                        o.p.to_string(),
                        o.hits.to_string(),
                        o.trials.to_string(),
                    ]);
                }
            }
            Payload::Crt(r) => {
                row(vec!["p".into(), "point".into()]);
                for pp in &r.per_prime {
                    for pt in &pp.points {
                        row(vec![pp.p.to_string(), join(pt)]);
                    }
                }
            }
            Payload::Newton(r) => {
                row(["p", "root", "step", "modulus", "coords"].map(String::from).to_vec());
                for lift in &r.roots {
                    for (step, s) in lift.trace.iter().enumerate() {
                        row(vec![
                            lift.p.to_string(),
                            join(&lift.root),
                            step.to_string(),
                            s.modulus.clone(),
                            s.coords.join(" "),
                        ]);
                    }
                }
            }
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8 csv")
    }

    fn to_table(&self) -> String {
        let mut out = String::new();
        let o = &mut out;
        match &self.result {
            Payload::Scan(r) => {
                let _ = writeln!(o, "hits        {} of {}", r.hits, r.trials);
                let _ = writeln!(o, "gamma_hat   {:.6}", r.gamma_hat);
                if let Some(v) = &r.verdict {
                    let _ = writeln!(o, "verdict     {v}");
                }
                if let Some(tally) = &r.rank_tally {
                    let _ = writeln!(o, "\n{:>6} {:>8} {:>12}", "codim", "points", "components");
                    for (c, n) in tally {
                        let e = r.estimates.as_ref().and_then(|m| m.get(c));
                        let est = e.map(|e| format!("{:.2} ± {:.2}", e.value, e.halfwidth99)).unwrap_or_default();
                        let _ = writeln!(o, "{c:>6} {n:>8} {est:>12}");
                    }
                }
                if let Some(tally) = &r.value_tally {
                    let _ = writeln!(o, "\n{:>6} {:>8}", "value", "count");
                    for (v, n) in tally {
                        let _ = writeln!(o, "{v:>6} {n:>8}");
                    }
                }
            }
            Payload::Survey(r) => {
                let _ = writeln!(o, "{:>6} {:>6} {:>12} {:>12}", "p", "hits", "trials", "gamma_hat");
                for ob in &r.observations {
                    let _ = writeln!(o, "{:>6} {:>6} {:>12} {:>12.6e}", ob.p, ob.hits, ob.trials, ob.gamma_hat);
                }
                for f in &r.failures {
                    let _ = writeln!(o, "{:>6} failed: {}", f.p, f.message);
                }
                if let Some(fit) = &r.fit {
                    let _ = writeln!(o, "\ncodim       {:.4} (rounds to {})", fit.codim, fit.codim_rounded);
                    let _ = writeln!(
                        o,
                        "components  {:.4} ± {:.4}",
                        fit.components.value, fit.components.halfwidth99
                    );
                }
            }
            Payload::Crt(r) => {
                for pp in &r.per_prime {
                    let pts: Vec<String> = pp.points.iter().map(|pt| format!("({})", join(pt))).collect();
                    let _ = writeln!(o, "{:>6}  {{{}}}", pp.p, pts.join(", "));
                }
                let _ = writeln!(o, "\nunique at   {:?}", r.unique_primes);
                if !r.primes_without_solutions.is_empty() {
                    let _ = writeln!(o, "no points   {:?}", r.primes_without_solutions);
                }
                if let Some(c) = &r.candidate {
                    let _ = writeln!(o, "candidate   ({}) mod {}", c.coords.join(", "), c.modulus);
                }
                let _ = writeln!(o, "integer     {}", certified(r.integer_certified));
                if let Some(rat) = &r.rational {
                    let fr: Vec<&str> = rat
                        .iter()
                        .map(|x| x.as_ref().map_or("?", |x| x.fraction.as_str()))
                        .collect();
                    let _ = writeln!(o, "rational    ({}) {}", fr.join(", "), certified(r.rational_certified));
                }
            }
            Payload::Newton(r) => {
                for lift in &r.roots {
                    let _ = writeln!(o, "p = {}, root ({})", lift.p, join(&lift.root));
                    if !lift.smooth {
                        let _ = writeln!(o, "  singular, not lifted");
                        continue;
                    }
                    for s in &lift.trace {
                        let _ = writeln!(o, "  ({}) mod {}", s.coords.join(", "), s.modulus);
                    }
                    let _ = writeln!(o, "  stabilized  {}", lift.stabilized);
                    let _ = writeln!(o, "  integer     {}", certified(lift.integer_certified));
                    if let Some(rat) = &lift.rational {
                        let _ = writeln!(o, "  rational    ({}) {}", rat.join(", "), certified(lift.rational_certified));
                    }
                }
            }
        }
        if let Some(msg) = &self.status.message {
            let _ = writeln!(o, "\n{msg}");
        }
        out
    }
}

fn certified(ok: bool) -> &'static str {
    if ok {
        "certified"
    } else {
        "not certified"
    }
}

fn join(pt: &[u64]) -> String {
    pt.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report {
            schema: SCHEMA,
            invocation: vec!["scan".into(), "f.sys".into()],
            config: Config::Scan {
                system: "f.sys".into(),
                vars: vec!["x".into()],
                p: 7,
                trials: 700,
                seed: 3,
                ranks: true,
                values: false,
            },
            result: Payload::Scan(ScanResult {
                hits: 122,
                trials: 700,
                gamma_hat: 122.0 / 700.0,
                verdict: None,
                rank_tally: Some(BTreeMap::from([(1, 106), (2, 14), (0, 2)])),
                estimates: Some(BTreeMap::from([(1, EstimateOut { value: 1.06, halfwidth99: 0.1 / 3.0 })])),
                value_tally: None,
            }),
            status: Status { code: 0, message: None },
        }
    }

    #[test]
    fn json_round_trips() {
        let text = sample().to_json();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sample());
        assert_eq!(back.to_json(), text);
        assert!(text.contains("\"schema\": 1"));
    }

    #[test]
    fn csv_lists_tallies() {
        let csv = sample().render(Format::Csv);
        assert!(csv.starts_with("tally,key,count\nhits,,122\ntrials,,700\nrank,0,2\n"));
    }
}
