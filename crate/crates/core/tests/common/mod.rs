#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use fieldprobe::PolySystem;

fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

/// Reads a `vars:` header followed by one polynomial per line.
pub fn load_system(name: &str) -> PolySystem {
    let text = std::fs::read_to_string(data_path(name)).expect("fixture exists");
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().expect("header line");
    let vars: Vec<String> = header
        .strip_prefix("vars:")
        .expect("vars header")
        .split(',')
        .map(|v| v.trim().to_string())
        .collect();
    let body: Vec<&str> = lines.collect();
    PolySystem::parse(&body, &vars).expect("fixture parses")
}

pub fn seeds() -> BTreeMap<String, u64> {
    let text = std::fs::read_to_string(data_path("seeds.txt")).expect("seed fixture");
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (k, v) = l.split_once('=').expect("key = value");
            (k.trim().to_string(), v.trim().parse().expect("u64 seed"))
        })
        .collect()
}

pub fn big(x: i64) -> fieldprobe::BigInt {
    fieldprobe::BigInt::from(x)
}
