use std::fs;
use std::sync::Arc;

use ffm_core::field_poly::Fq;
use ffm_core::scan::{cache_path, scan_degree, ScanOptions};
use ffm_core::strategy::Strategies;

fn options(jobs: usize, dir: &std::path::Path) -> ScanOptions {
    let s = Strategies::builtin();
    ScanOptions {
        jobs,
        cache_dir: Some(dir.to_path_buf()),
        irreducibility: s.irreducibility.default_strategy(),
        symbols: Arc::clone(&s.symbols.default_strategy()),
    }
}

#[test]
fn worker_count_does_not_change_records_or_cache_bytes() {
    let ring = Fq::new(5).unwrap();
    let (d1, d3) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let a = scan_degree(&ring, 5, &options(1, d1.path())).unwrap();
    let b = scan_degree(&ring, 5, &options(3, d3.path())).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(
        fs::read(cache_path(d1.path(), 5, 5)).unwrap(),
        fs::read(cache_path(d3.path(), 5, 5)).unwrap()
    );
}

#[test]
fn warm_cache_is_used_and_tampering_is_repaired() {
    let ring = Fq::new(5).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cold = scan_degree(&ring, 3, &options(1, dir.path())).unwrap();
    assert_eq!(cold.provenance.recomputed, 40);
    let warm = scan_degree(&ring, 3, &options(1, dir.path())).unwrap();
    assert_eq!(warm.provenance.cache_hits, 40);
    assert_eq!(warm.provenance.recomputed, 0);
    assert!(!warm.provenance.cache_written);

    let path = cache_path(dir.path(), 5, 3);
    let original = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = original.lines().map(str::to_string).collect();
    // flip one coefficient digit, keeping the old checksum
    let victim = lines.iter().position(|l| !l.starts_with('#')).unwrap();
    lines[victim] = lines[victim].replacen(";1,", ";2,", 1);
    fs::write(&path, lines.join("\n") + "\n").unwrap();

    let repaired = scan_degree(&ring, 3, &options(1, dir.path())).unwrap();
    assert_eq!(repaired.provenance.repaired, 1);
    assert_eq!(repaired.provenance.recomputed, 1);
    assert_eq!(repaired.records, cold.records);
    assert_eq!(fs::read_to_string(&path).unwrap(), original);
}

#[test]
fn garbage_cache_file_is_rebuilt() {
    let ring = Fq::new(5).unwrap();
    let dir = tempfile::tempdir().unwrap();
    fs::write(cache_path(dir.path(), 5, 3), "not a cache\n").unwrap();
    let sc = scan_degree(&ring, 3, &options(1, dir.path())).unwrap();
    assert_eq!(sc.records.len(), 40);
    assert_eq!(sc.provenance.recomputed, 40);
}
