use std::path::PathBuf;
use std::time::Instant;

use mbl_core::suites::{verify, Prepared};
use mbl_core::weights_moments::parse_weight_spec;

fn weights_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../weights")
}

#[test]
fn every_shipped_weight_passes_every_applicable_suite() {
    let mut paths: Vec<_> = std::fs::read_dir(weights_dir()).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    assert_eq!(paths.len(), 8);
    for path in paths {
        let t = Instant::now();
        let spec = parse_weight_spec(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let p = Prepared::new(spec, 8, 12).unwrap();
        let reports = verify(&p, &[], true).unwrap();
        for r in &reports {
            let status = if r.skipped.is_some() { "skipped" } else if r.pass() { "pass" } else { "FAIL" };
            println!("{:?} {:>16} {status} {}", path.file_name().unwrap(), r.suite, r.entries.len());
            assert!(r.skipped.is_some() || r.pass(), "{path:?} {}: {:?} {:?}", r.suite, r.error, r.failures().first());
        }
        println!("{:?} {:?}", path.file_name().unwrap(), t.elapsed());
    }
}
