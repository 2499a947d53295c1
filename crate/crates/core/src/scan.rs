//! Materializes `P_n` with every L-polynomial and central value, backed by
//! a checksummed on-disk cache.
//!
//! Cache layout: one file `q{q}_n{n}.cache` per `(q, n)` with a header line
//! and one record per conductor,
//! `P;c_0,…,c_{2g};a_num/a_den;b_num/b_den;checksum`, in enumeration order.
//! The checksum is the first 16 hex digits of SHA-256 over everything before
//! the last `;`.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::characters::{Conductor, QuadraticCharacter};
use crate::error::{Error, Result};
use crate::field_poly::{Fq, MonicPoly};
use crate::lfunction::{
    central_value, functional_equation_defect, l_coefficients, CentralValue, LPolynomial,
};
use crate::qsqrt::QSqrt;
use crate::strategy::{IrreducibilityTest, SymbolBackend};

const CACHE_HEADER: &str = "# ffm L-value cache v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConductorRecord {
    pub conductor: MonicPoly,
    pub l: LPolynomial,
    pub central: CentralValue,
}

/// Where the records of a scan came from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Provenance {
    /// Entries read from the cache with a valid checksum.
    pub cache_hits: usize,
    /// Entries computed in this run.
    pub recomputed: usize,
    /// Cache lines rejected (bad checksum, malformed, inconsistent).
    pub repaired: usize,
    pub cache_written: bool,
}

#[derive(Clone, Debug)]
pub struct Scan {
    pub q: u32,
    pub degree: usize,
    pub records: Vec<ConductorRecord>,
    pub provenance: Provenance,
}

pub struct ScanOptions {
    pub jobs: usize,
    pub cache_dir: Option<PathBuf>,
    pub irreducibility: Arc<dyn IrreducibilityTest>,
    pub symbols: Arc<dyn SymbolBackend>,
}

pub fn compute_record(
    ring: &Fq,
    conductor: MonicPoly,
    symbols: &dyn SymbolBackend,
) -> Result<ConductorRecord> {
    let conductor = Conductor::new(ring, conductor)?;
    let chi = QuadraticCharacter::new(ring, conductor, symbols)?;
    let l = l_coefficients(&chi);
    let central = central_value(&l);
    Ok(ConductorRecord {
        conductor: l.conductor().clone(),
        l,
        central,
    })
}

pub fn cache_path(dir: &Path, q: u32, n: usize) -> PathBuf {
    dir.join(format!("q{q}_n{n}.cache"))
}

fn checksum(payload: &str) -> String {
    let digest = Sha256::digest(payload.as_bytes());
    hex::encode(&digest[..8])
}

fn rational_text(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Serializes one record, checksum included.
pub fn record_line(rec: &ConductorRecord) -> String {
    let coeffs: Vec<String> = rec.l.coeffs().iter().map(|c| c.to_string()).collect();
    let payload = format!(
        "{};{};{};{}",
        rec.conductor.canonical(),
        coeffs.join(","),
        rational_text(rec.central.a()),
        rational_text(rec.central.b())
    );
    let sum = checksum(&payload);
    format!("{payload};{sum}")
}

fn parse_rational(text: &str) -> Option<BigRational> {
    let (n, d) = text.split_once('/')?;
    let d: BigInt = d.parse().ok()?;
    if d == BigInt::from(0) {
        return None;
    }
    Some(BigRational::new(n.parse().ok()?, d))
}

/// Parses and validates one cache line. `None` for anything that fails the
/// checksum, does not parse, or disagrees with itself.
pub fn parse_record_line(ring: &Fq, line: &str) -> Option<ConductorRecord> {
    let (payload, sum) = line.rsplit_once(';')?;
    if checksum(payload) != sum {
        return None;
    }
    let mut fields = payload.split(';');
    let (p, coeffs, a, b) = (
        fields.next()?,
        fields.next()?,
        fields.next()?,
        fields.next()?,
    );
    if fields.next().is_some() {
        return None;
    }
    let conductor = ring.parse_monic(p).ok()?;
    let coeffs: Vec<BigInt> = coeffs
        .split(',')
        .map(|c| c.parse().ok())
        .collect::<Option<_>>()?;
    let l = LPolynomial::from_coeffs(ring.q(), conductor.clone(), coeffs).ok()?;
    let central = QSqrt::new(ring.q(), parse_rational(a)?, parse_rational(b)?);
    if !functional_equation_defect(&l).is_zero() || central != central_value(&l) {
        return None;
    }
    Some(ConductorRecord {
        conductor,
        l,
        central,
    })
}

fn read_cache(ring: &Fq, path: &Path) -> Result<(HashMap<MonicPoly, ConductorRecord>, usize)> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((HashMap::new(), 0)),
        Err(e) => return Err(Error::io(format!("reading {}", path.display()), e)),
    };
    let mut lines = text.lines();
    if lines.next() != Some(CACHE_HEADER) {
        return Err(Error::CacheFormat {
            path: path.to_path_buf(),
            reason: "missing or unknown header".into(),
        });
    }
    let mut good = HashMap::new();
    let mut bad = 0;
    for line in lines.filter(|l| !l.trim().is_empty()) {
        match parse_record_line(ring, line) {
            Some(rec) => {
                good.insert(rec.conductor.clone(), rec);
            }
            None => bad += 1,
        }
    }
    Ok((good, bad))
}

fn render_cache(records: &[ConductorRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 64);
    out.push_str(CACHE_HEADER);
    out.push('\n');
    for rec in records {
        out.push_str(&record_line(rec));
        out.push('\n');
    }
    out
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("cache.tmp");
    fs::write(&tmp, contents).map_err(|e| Error::io(format!("writing {}", tmp.display()), e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(format!("renaming to {}", path.display()), e))
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))
}

/// `P_n` in enumeration order, tested by index range in parallel.
pub fn primes_of_degree(
    ring: &Fq,
    n: usize,
    test: &dyn IrreducibilityTest,
    jobs: usize,
) -> Result<Vec<MonicPoly>> {
    if n == 0 {
        return Err(Error::DegreeTooSmall { min: 1, got: 0 });
    }
    let count = ring.count_monic(n);
    let pool = thread_pool(jobs)?;
    Ok(pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|i| ring.monic_from_index(n, i))
            .filter(|f| test.is_irreducible(ring, f))
            .collect()
    }))
}

/// Scans `P_n`. With a cache directory, valid cached records are reused,
/// missing or corrupt ones are recomputed, and the file is rewritten only
/// when its contents change.
pub fn scan_degree(ring: &Fq, n: usize, opts: &ScanOptions) -> Result<Scan> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "L-value scans need an odd degree >= 3, got {n}"
        )));
    }
    let primes = primes_of_degree(ring, n, opts.irreducibility.as_ref(), opts.jobs)?;
    let path = opts.cache_dir.as_ref().map(|d| cache_path(d, ring.q(), n));
    let (mut cached, mut repaired, mut header_bad) = (HashMap::new(), 0, false);
    if let Some(path) = &path {
        match read_cache(ring, path) {
            Ok((good, bad)) => {
                cached = good;
                repaired = bad;
            }
            Err(Error::CacheFormat { .. }) => header_bad = true,
            Err(e) => return Err(e),
        }
    }
    let pool = thread_pool(opts.jobs)?;
    let computed: Vec<Result<(ConductorRecord, bool)>> = pool.install(|| {
        primes
            .into_par_iter()
            .map(|p| match cached.get(&p) {
                Some(rec) => Ok((rec.clone(), true)),
                None => compute_record(ring, p, opts.symbols.as_ref()).map(|r| (r, false)),
            })
            .collect()
    });
    let mut records = Vec::with_capacity(computed.len());
    let mut provenance = Provenance {
        repaired,
        ..Provenance::default()
    };
    for item in computed {
        let (rec, hit) = item?;
        if hit {
            provenance.cache_hits += 1;
        } else {
            provenance.recomputed += 1;
        }
        records.push(rec);
    }
    if let (Some(path), Some(dir)) = (&path, &opts.cache_dir) {
        let stale = header_bad
            || provenance.recomputed > 0
            || provenance.repaired > 0
            || cached.len() != records.len();
        if stale {
            fs::create_dir_all(dir)
                .map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
            write_atomic(path, &render_cache(&records))?;
            provenance.cache_written = true;
        }
    }
    Ok(Scan {
        q: ring.q(),
        degree: n,
        records,
        provenance,
    })
}

/// Every `stride`-th conductor of `P_n`, a deterministic sample.
pub fn sample_primes(primes: &[MonicPoly], count: usize) -> Vec<MonicPoly> {
    if primes.is_empty() || count == 0 {
        return Vec::new();
    }
    let stride = (primes.len() / count).max(1);
    primes.iter().step_by(stride).take(count).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strategy::Strategies;

    fn opts(s: &Strategies, dir: Option<PathBuf>, jobs: usize) -> ScanOptions {
        ScanOptions {
            jobs,
            cache_dir: dir,
            irreducibility: s.irreducibility.default_strategy(),
            symbols: s.symbols.default_strategy(),
        }
    }

    #[test]
    fn record_line_round_trip() {
        let r = Fq::new(5).unwrap();
        let s = Strategies::builtin();
        let rec = compute_record(
            &r,
            r.monic(&[1, 1, 0, 1]).unwrap(),
            &*s.symbols.default_strategy(),
        )
        .unwrap();
        let line = record_line(&rec);
        assert_eq!(parse_record_line(&r, &line), Some(rec));
        let tampered = line.replacen(";1,", ";2,", 1);
        assert_eq!(parse_record_line(&r, &tampered), None);
    }

    #[test]
    fn warm_cache_skips_work_and_repairs_damage() {
        let r = Fq::new(5).unwrap();
        let s = Strategies::builtin();
        let dir = tempfile::tempdir().unwrap();
        let cold = scan_degree(&r, 3, &opts(&s, Some(dir.path().into()), 2)).unwrap();
        assert_eq!(cold.records.len(), 40);
        assert_eq!(cold.provenance.recomputed, 40);
        assert!(cold.provenance.cache_written);

        let warm = scan_degree(&r, 3, &opts(&s, Some(dir.path().into()), 1)).unwrap();
        assert_eq!(warm.provenance.cache_hits, 40);
        assert_eq!(warm.provenance.recomputed, 0);
        assert!(!warm.provenance.cache_written);
        assert_eq!(warm.records, cold.records);

        let path = cache_path(dir.path(), 5, 3);
        let text = fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        lines[3] = lines[3].replace(';', ":");
        fs::write(&path, lines.join("\n")).unwrap();
        let repaired = scan_degree(&r, 3, &opts(&s, Some(dir.path().into()), 1)).unwrap();
        assert_eq!(repaired.provenance.repaired, 1);
        assert_eq!(repaired.provenance.recomputed, 1);
        assert_eq!(repaired.records, cold.records);
        assert_eq!(fs::read_to_string(&path).unwrap(), text);
    }

    #[test]
    fn rejects_even_degree() {
        let r = Fq::new(5).unwrap();
        let s = Strategies::builtin();
        assert!(scan_degree(&r, 4, &opts(&s, None, 1)).is_err());
    }
}
