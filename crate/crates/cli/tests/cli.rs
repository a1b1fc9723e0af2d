use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fieldprobe::mpoly::{random_dense, Homogeneity};
use fieldprobe::{PolySystem, Polynomial, PrimeField};
use fieldprobe_cli::report::{Payload, Report};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fieldprobe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> (Report, i32) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = run(&full);
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed: Report = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    assert_eq!(parsed.to_json(), text, "json round trip");
    (parsed, out.status.code().unwrap())
}

fn write_system(dir: &Path, name: &str, vars: &[&str], polys: &[Polynomial]) -> PathBuf {
    let names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    let mut text = format!("vars: {}\n", names.join(","));
    for f in polys {
        text.push_str(&f.display(&names).to_string());
        text.push('\n');
    }
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn crt_lift_certifies_integer_solution() {
    let path = data("lift_zz.sys");
    let (r, code) = report(&["lift", path.to_str().unwrap(), "--primes-up-to", "23"]);
    assert_eq!(code, 0);
    let Payload::Crt(crt) = r.result else { panic!("crt payload") };
    assert_eq!(crt.unique_primes, [2, 5, 17, 23]);
    let cand = crt.candidate.unwrap();
    assert_eq!((cand.modulus.as_str(), cand.coords), ("3910", vec!["1234".to_string(), "-774".to_string()]));
    assert!(crt.integer_certified);
    assert_eq!(crt.integer_residuals.unwrap(), ["0", "0"]);
}

#[test]
fn crt_lift_recovers_rational_solution() {
    let path = data("lift_qq.sys");
    let (r, code) = report(&["lift", path.to_str().unwrap(), "--primes-up-to", "41"]);
    assert_eq!(code, 0);
    let Payload::Crt(crt) = r.result else { panic!("crt payload") };
    assert_eq!(crt.primes_without_solutions, [11]);
    assert!(!crt.integer_certified);
    assert!(crt.rational_certified);
    let fractions: Vec<String> = crt.rational.unwrap().into_iter().map(|x| x.unwrap().fraction).collect();
    assert_eq!(fractions, ["123/22", "-77/43"]);
}

#[test]
fn newton_lift_traces_both_roots() {
    let path = data("lift_zz.sys");
    let (r, code) = report(&["lift", path.to_str().unwrap(), "-p", "7", "--mode", "newton", "--steps", "4"]);
    assert_eq!(code, 0);
    let Payload::Newton(n) = r.result else { panic!("newton payload") };
    assert_eq!(n.roots.len(), 2);
    let good = &n.roots[0];
    assert_eq!(good.root, [2, 3]);
    assert!(good.smooth && good.stabilized && good.integer_certified);
    assert_eq!(good.trace.last().unwrap().coords, ["1234", "-774"]);
    let bad = &n.roots[1];
    assert!(!bad.stabilized && !bad.integer_certified && !bad.rational_certified);
    assert_eq!(bad.trace.last().unwrap().coords, ["11082657337694", "-9795607574104"]);
}

#[test]
fn no_modular_solutions_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("none.sys");
    std::fs::write(&path, "vars: x,y\nx - x + 1\n").unwrap();
    let (r, code) = report(&["lift", path.to_str().unwrap(), "--primes-up-to", "7"]);
    assert_eq!(code, 3);
    assert_eq!(r.status.code, 3);
    let out = run(&["lift", path.to_str().unwrap(), "-p", "5", "--mode", "newton"]);
    assert_eq!(out.status.code(), Some(2), "non-square system is an input error");
}

#[test]
fn quadric_surveys_round_to_expected_codimensions() {
    for (pred, codim) in [("quadric-rank-le:3", 1), ("quadric-rank-le:2", 3)] {
        let (r, code) = report(&["survey", "--predicate", pred, "-p", "5", "-p", "7", "-p", "11", "--k", "50", "--seed", "1"]);
        assert_eq!(code, 0);
        let Payload::Survey(s) = r.result else { panic!("survey payload") };
        assert_eq!(s.fit.unwrap().codim_rounded, codim, "{pred}");
    }
}

#[test]
fn always_true_predicate_has_codim_zero() {
    let (r, _) = report(&["survey", "--predicate", "always", "-p", "5", "-p", "7"]);
    let Payload::Survey(s) = r.result else { panic!("survey payload") };
    let fit = s.fit.unwrap();
    assert_eq!(fit.codim_rounded, 0);
    assert!((fit.components.value - 1.0).abs() < 1e-12);
}

#[test]
fn survey_csv_has_plot_columns() {
    let out = run(&["survey", "--predicate", "quadric-rank-le:3", "-p", "5", "-p", "7", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("log_inv_p,log_gamma_hat,p,hits,trials"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[2], "5");
    assert!((row[0].parse::<f64>().unwrap() + 5f64.ln()).abs() < 1e-12);
}

#[test]
fn survey_with_one_prime_is_rejected() {
    let out = run(&["survey", "--predicate", "always", "-p", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn survey_where_every_prime_gives_up_exits_1() {
    let (r, code) = report(&["survey", "--predicate", "quadric-rank-le:0", "-p", "5", "-p", "7", "--cap", "10"]);
    assert_eq!(code, 1);
    let Payload::Survey(s) = r.result else { panic!("survey payload") };
    assert_eq!(s.failures.len(), 2);
}

#[test]
fn tangent_scan_estimates_one_component_per_codimension() {
    let f7 = PrimeField::new(7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut draw = |d| random_dense(d, 6, f7, Homogeneity::Inhomogeneous, &mut rng);
    let (f, g, h) = (draw(2), draw(6), draw(7));
    let sys = PolySystem::new(6, vec![&f * &g, &f * &h]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let vars = ["x1", "x2", "x3", "x4", "x5", "x6"];
    let path = write_system(dir.path(), "fgh.sys", &vars, sys.polys());
    let (r, code) = report(&["scan", path.to_str().unwrap(), "-p", "7", "--trials", "700", "--seed", "1", "--ranks"]);
    assert_eq!(code, 0);
    let Payload::Scan(s) = r.result else { panic!("scan payload") };
    assert!(s.verdict.is_none());
    let est = s.estimates.unwrap();
    for c in [1, 2] {
        let e = est[&c];
        assert!((e.value - 1.0).abs() <= e.halfwidth99, "codim {c}: {e:?}");
    }
}

#[test]
fn random_quartic_looks_irreducible() {
    let f37 = PrimeField::new(37).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = random_dense(4, 4, f37, Homogeneity::Inhomogeneous, &mut rng);
    let dir = tempfile::tempdir().unwrap();
    let path = write_system(dir.path(), "quartic.sys", &["x", "y", "z", "w"], &[f]);
    let (r, _) = report(&["scan", path.to_str().unwrap(), "-p", "37", "--trials", "3700"]);
    let Payload::Scan(s) = r.result else { panic!("scan payload") };
    assert_eq!(s.verdict.as_deref(), Some("consistent-with-1"));
    assert!((s.gamma_hat - 1.0 / 37.0).abs() < 0.01);
}

#[test]
fn reruns_are_byte_identical_and_worker_independent() {
    let path = data("single.sys");
    let args = ["scan", path.to_str().unwrap(), "-p", "7", "--trials", "700", "--values", "--seed", "9", "--format", "json"];
    let a = run(&args).stdout;
    assert_eq!(a, run(&args).stdout);
    let mut seq = args.to_vec();
    seq.extend(["--workers", "1"]);
    let b: Report = serde_json::from_slice(&run(&seq).stdout).unwrap();
    let a: Report = serde_json::from_slice(&a).unwrap();
    assert_eq!(a.result, b.result);
    let Payload::Scan(s) = a.result else { panic!("scan payload") };
    assert_eq!(s.value_tally.unwrap().values().sum::<u64>(), 700);
}

#[test]
fn malformed_file_reports_position_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.sys");
    std::fs::write(&path, "vars: x,y\r\nx^2 + y\r\nx * * y\r\n").unwrap();
    let out = run(&["scan", path.to_str().unwrap(), "-p", "7", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.sys:3:5:"), "{err}");

    let out = run(&["scan", data("single.sys").to_str().unwrap(), "-p", "8", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["scan", "/nonexistent.sys", "-p", "7", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table_output_is_default() {
    let path = data("lift_zz.sys");
    let out = run(&["lift", path.to_str().unwrap(), "-p", "7"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("{(2, 3), (5, 5)}"), "{text}");
}
