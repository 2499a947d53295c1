//! Individual invariant checks. Each returns a [`CheckResult`] with the
//! number of instances examined, the failing ones, and measured values.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::characters::{jacobi_symbol, Conductor, QuadraticCharacter};
use crate::error::Result;
use crate::field_poly::{Fq, MonicPoly};
use crate::lfunction::{afe_value, functional_equation_defect, l_zeros};
use crate::moments::charsum::char_sum_grid;
use crate::moments::divisor::{
    brute_force_tables, d_k_by_enumeration, divisor_sum_series, growth_slope, DEFAULT_BRUTE_BUDGET,
};
use crate::moments::{holder_check, weighted_first_moment, MomentReport, TruncationParams};
use crate::qsqrt::QSqrt;
use crate::scan::{ConductorRecord, Scan};
use crate::strategy::{IrreducibilityTest, SymbolBackend};

/// Failing instances kept verbatim in a report.
pub const MAX_REPORTED_FAILURES: usize = 20;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub instances: u64,
    pub failed: u64,
    pub failures: Vec<String>,
    pub measured: Value,
}

impl CheckResult {
    fn new(name: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            passed: true,
            instances: 0,
            failed: 0,
            failures: Vec::new(),
            measured: Value::Null,
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.passed = false;
            self.failed += 1;
            if self.failures.len() < MAX_REPORTED_FAILURES {
                self.failures.push(describe());
            }
        }
    }

    fn with(mut self, measured: Value) -> Self {
        self.measured = measured;
        self
    }
}

/// `|P_n|` by enumeration against the Möbius count, and the
/// `|π(n) − q^n/n| ≤ 2 q^{n/2}/n` envelope.
pub fn irreducible_counts(
    ring: &Fq,
    max_n: usize,
    test: &dyn IrreducibilityTest,
) -> Result<CheckResult> {
    let mut check = CheckResult::new("irreducible_counts");
    let mut rows = Vec::new();
    let q = ring.q() as f64;
    for n in 1..=max_n {
        let counted = ring
            .enumerate_monic(n)
            .filter(|f| test.is_irreducible(ring, f))
            .count() as u64;
        let exact = ring.count_irreducibles_exact(n)?;
        check.record(BigUint::from(counted) == exact, || {
            format!("n = {n}: enumerated {counted}, formula {exact}")
        });
        let approx = q.powi(n as i32) / n as f64;
        let envelope = (counted as f64 - approx).abs() * n as f64 / q.powf(n as f64 / 2.0);
        rows.push(json!({"n": n, "count": counted, "formula": exact.to_string(), "envelope_constant": envelope}));
    }
    Ok(check.with(json!(rows)))
}

/// Exact functional-equation defect. With `inject_fault`, `c_0` of the first
/// conductor of each degree is shifted by one before checking.
pub fn functional_equation(scans: &[&Scan], inject_fault: bool) -> CheckResult {
    let mut check = CheckResult::new("functional_equation");
    for scan in scans {
        for (i, rec) in scan.records.iter().enumerate() {
            let l = if inject_fault && i == 0 {
                rec.l.perturbed(0, 1)
            } else {
                rec.l.clone()
            };
            let defect = functional_equation_defect(&l);
            check.record(defect.is_zero(), || {
                format!(
                    "P = {} (n = {}): defect {defect}, c = {:?}",
                    rec.conductor.canonical(),
                    scan.degree,
                    l.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>()
                )
            });
        }
    }
    check
}

fn character(
    ring: &Fq,
    rec: &ConductorRecord,
    symbols: &dyn SymbolBackend,
) -> Result<QuadraticCharacter> {
    QuadraticCharacter::new(ring, Conductor::new(ring, rec.conductor.clone())?, symbols)
}

/// The approximate functional equation as an exact identity in `Q(√q)`.
pub fn afe_identity(
    ring: &Fq,
    scans: &[&Scan],
    symbols: &dyn SymbolBackend,
) -> Result<CheckResult> {
    let mut check = CheckResult::new("afe_identity");
    for scan in scans {
        for rec in &scan.records {
            let afe = afe_value(&character(ring, rec, symbols)?);
            check.record(afe == rec.central, || {
                format!(
                    "P = {}: AFE {afe}, central value {}",
                    rec.conductor.canonical(),
                    rec.central
                )
            });
        }
    }
    Ok(check)
}

/// `L(1/2, χ_P) ≥ 0`, exactly. Zeros are counted and reported.
pub fn central_nonnegative(scans: &[&Scan]) -> CheckResult {
    let mut check = CheckResult::new("central_nonnegative");
    let mut zeros = Vec::new();
    for scan in scans {
        for rec in &scan.records {
            let sign = rec.central.signum();
            if sign == Ordering::Equal {
                zeros.push(rec.conductor.canonical());
            }
            check.record(sign != Ordering::Less, || {
                format!(
                    "P = {}: L(1/2) = {}",
                    rec.conductor.canonical(),
                    rec.central
                )
            });
        }
    }
    check.with(json!({"vanishing_central_values": zeros}))
}

/// Zero moduli against `q^{-1/2}`: every conductor of degree
/// `≤ full_max_degree`, an evenly strided sample of `sample` above that.
pub fn rh_defect(
    scans: &[&Scan],
    tol: f64,
    full_max_degree: usize,
    sample: usize,
) -> Result<CheckResult> {
    let mut check = CheckResult::new("rh_defect");
    let mut per_degree = Vec::new();
    for scan in scans {
        let len = scan.records.len();
        let (stride, take) = if scan.degree <= full_max_degree || len <= sample {
            (1, len)
        } else {
            ((len / sample.max(1)).max(1), sample)
        };
        let mut worst: f64 = 0.0;
        let mut examined = 0usize;
        for rec in scan.records.iter().step_by(stride).take(take) {
            let zeros = l_zeros(&rec.l, tol)?;
            worst = worst.max(zeros.moduli_defect);
            examined += 1;
            check.record(zeros.within_tolerance(), || {
                format!(
                    "P = {}: moduli defect {:e} >= {tol:e}",
                    rec.conductor.canonical(),
                    zeros.moduli_defect
                )
            });
        }
        per_degree.push(json!({"n": scan.degree, "examined": examined, "max_defect": worst}));
    }
    Ok(check.with(json!({"tolerance": tol, "degrees": per_degree})))
}

/// `S1^k ≤ (Σ L^k) S2^{k−1}` for every degree, `k` and cutoff.
pub fn holder(scans: &[&Scan], ks: &[u32], xs: &[usize]) -> Result<CheckResult> {
    let mut check = CheckResult::new("holder");
    let mut rows = Vec::new();
    for scan in scans {
        let genus = (scan.degree - 1) / 2;
        for &k in ks {
            for &x in xs {
                let params = TruncationParams::new(k, genus, Some(x))?;
                let report = MomentReport::build(scan, params);
                let h = holder_check(&report)?;
                check.record(h.holds, || {
                    format!(
                        "n = {}, k = {k}, x = {x}: S1^k = {} > rhs = {}",
                        scan.degree, report.holder_lhs, report.holder_rhs
                    )
                });
                rows.push(json!({"n": scan.degree, "k": k, "x": x, "gap": h.gap}));
            }
        }
    }
    Ok(check.with(json!(rows)))
}

/// `d_k` by the multiplicative formula against counting ordered tuples.
pub fn divisor_oracle(ring: &Fq, max_degree: usize, ks: &[u32]) -> CheckResult {
    let mut check = CheckResult::new("d_k_oracle");
    for d in 0..=max_degree {
        for m in ring.enumerate_monic(d) {
            let fac = ring.factor(&m);
            for &k in ks {
                let formula = crate::moments::divisor::d_k_factored(&fac, k);
                let counted = d_k_by_enumeration(ring, &m, k);
                check.record(formula == counted, || {
                    format!(
                        "m = {}, k = {k}: formula {formula}, count {counted}",
                        m.canonical()
                    )
                });
            }
        }
    }
    check
}

/// Power-series divisor sums against brute-force enumeration.
pub fn divisor_cross_oracle(ring: &Fq, ks: &[u32], z_max: usize) -> Result<CheckResult> {
    let mut check = CheckResult::new("divisor_sum_cross_oracle");
    let brute_tables = brute_force_tables(ring, ks, z_max, DEFAULT_BRUTE_BUDGET)?;
    for (&k, brute) in ks.iter().zip(&brute_tables) {
        let series = divisor_sum_series(ring, k, z_max)?;
        for z in 0..=z_max {
            let ok = brute.partial[z] == series.partial[z];
            check.record(ok, || {
                format!(
                    "k = {k}, z = {z}: brute {}, series {}",
                    brute.partial[z], series.partial[z]
                )
            });
        }
    }
    Ok(check)
}

/// Least-squares slope of `ln D(z)` against `ln z` within
/// `±rel_tol · k(k+1)/2`.
pub fn divisor_growth(
    ring: &Fq,
    ks: &[u32],
    window: (usize, usize),
    rel_tol: f64,
) -> Result<CheckResult> {
    let mut check = CheckResult::new("divisor_sum_growth");
    let mut fits = Vec::new();
    for &k in ks {
        let table = divisor_sum_series(ring, k, window.1)?;
        let fit = growth_slope(&table, window.0, window.1)?;
        check.record(fit.relative_error.abs() <= rel_tol, || {
            format!(
                "k = {k}: slope {:.6} vs target {} over z in [{}, {}] (relative error {:+.4})",
                fit.slope, fit.target, fit.z_lo, fit.z_hi, fit.relative_error
            )
        });
        fits.push(fit);
    }
    Ok(check.with(json!({"relative_tolerance": rel_tol, "fits": fits})))
}

/// `(f/g) = (g/f)` for monic coprime `f`, `g` with `deg ≤ max_degree`, and
/// the ladder against the factor-based symbol.
pub fn reciprocity(ring: &Fq, max_degree: usize) -> Result<CheckResult> {
    let mut check = CheckResult::new("reciprocity");
    let polys: Vec<MonicPoly> = (1..=max_degree)
        .flat_map(|d| ring.enumerate_monic(d))
        .collect();
    for f in &polys {
        for g in &polys {
            if !ring.poly_gcd(f, g)?.is_one() {
                continue;
            }
            let fg = jacobi_symbol(ring, f, g)?;
            let gf = jacobi_symbol(ring, g, f)?;
            check.record(fg == gf, || {
                format!(
                    "f = {}, g = {}: ({fg}) vs ({gf})",
                    f.canonical(),
                    g.canonical()
                )
            });
        }
    }
    Ok(check)
}

/// Largest `|Σ_P χ_P(f)| n / (deg f q^{n/2})` over the grid, against an
/// envelope.
pub fn charsum_envelope(
    ring: &Fq,
    max_deg_f: usize,
    degrees: &[usize],
    envelope: f64,
) -> Result<CheckResult> {
    let mut check = CheckResult::new("charsum_envelope");
    let rows = char_sum_grid(ring, max_deg_f, degrees)?;
    let mut worst: Option<(f64, String, usize)> = None;
    for row in &rows {
        check.record(row.ratio.is_finite() && row.ratio <= envelope, || {
            format!(
                "f = {}, n = {}: ratio {}",
                row.f.canonical(),
                row.n,
                row.ratio
            )
        });
        if worst.as_ref().is_none_or(|w| row.ratio > w.0) {
            worst = Some((row.ratio, row.f.canonical(), row.n));
        }
    }
    let measured = match worst {
        Some((ratio, f, n)) => {
            json!({"envelope": envelope, "max_ratio": ratio, "argmax_f": f, "argmax_n": n})
        }
        None => json!({"envelope": envelope}),
    };
    Ok(check.with(measured))
}

/// `Σ_P L(1/2, χ_P)/q^n` positive for every scanned degree, and no farther
/// from 1 at the largest degree than at the smallest. Compared exactly.
pub fn first_moment_trend(scans: &[&Scan]) -> CheckResult {
    let mut check = CheckResult::new("first_moment_trend");
    let mut ratios: Vec<(usize, QSqrt)> = Vec::new();
    for scan in scans {
        let ratio = weighted_first_moment(scan).ratio;
        check.record(ratio.signum() == Ordering::Greater, || {
            format!("n = {}: ratio {ratio} is not positive", scan.degree)
        });
        ratios.push((scan.degree, ratio));
    }
    ratios.sort_by_key(|r| r.0);
    let distance = |r: &QSqrt| {
        let d = r - &QSqrt::one(r.q());
        if d.is_negative() {
            -d
        } else {
            d
        }
    };
    if let (Some(first), Some(last)) = (ratios.first(), ratios.last()) {
        if first.0 != last.0 {
            let (d_first, d_last) = (distance(&first.1), distance(&last.1));
            check.record(d_last.cmp_value(&d_first) != Ordering::Greater, || {
                format!(
                    "|ratio - 1| grows from {:.6} at n = {} to {:.6} at n = {}",
                    d_first.to_f64(),
                    first.0,
                    d_last.to_f64(),
                    last.0
                )
            });
        }
    }
    let measured: Vec<Value> = ratios
        .iter()
        .map(|(n, r)| {
            json!({
                "n": n,
                "ratio": r.to_f64(),
                "ratio_a": r.a().to_string(),
                "ratio_b": r.b().to_string(),
                "distance_to_one": distance(r).to_f64(),
            })
        })
        .collect();
    check.with(json!(measured))
}

/// The bracketing of the square-tuple sum by divisor sums. Asserted: the
/// upper bound with cutoff `kx` and the lower bound with cutoff `x/2`.
/// The lower bound with cutoff `x` is reported, not asserted.
pub fn square_bracket(ring: &Fq, ks: &[u32], xs: &[usize]) -> Result<CheckResult> {
    let mut check = CheckResult::new("square_bracket");
    let mut rows = Vec::new();
    for &k in ks {
        for &x in xs {
            let b = crate::moments::square_bracket(ring, k, x)?;
            let by_m = crate::moments::square_tuple_sum_by_m(ring, k, x);
            check.record(
                b.upper_holds() && b.lower_at_half_x_holds() && by_m == b.middle,
                || {
                    format!(
                        "k = {k}, x = {x}: lower(x/2) {}, middle {}, double count {by_m}, upper {}",
                        b.lower_at_half_x, b.middle, b.upper
                    )
                },
            );
            rows.push(json!({
                "k": k,
                "x": x,
                "lower_at_x": rational_json(&b.lower_at_x),
                "lower_at_half_x": rational_json(&b.lower_at_half_x),
                "middle": rational_json(&b.middle),
                "upper": rational_json(&b.upper),
                "lower_at_x_holds": b.lower_at_x_holds(),
            }));
        }
    }
    Ok(check.with(json!(rows)))
}

/// `Σ_{deg l ≤ b} 1/|l| = b + 1` for the cutoffs `b = floor((g − deg r)/2)`
/// that occur for genus `g ≤ max_genus`.
pub fn reciprocal_norms(ring: &Fq, max_genus: usize) -> CheckResult {
    let mut check = CheckResult::new("reciprocal_norm_sum");
    for g in 0..=max_genus {
        for deg_r in 0..=g {
            let bound = (g - deg_r) / 2;
            let sum = crate::moments::reciprocal_norm_sum(ring, bound);
            let expect = BigRational::from_integer((bound + 1).into());
            check.record(sum == expect, || {
                format!("g = {g}, deg r = {deg_r}: sum {sum}")
            });
        }
    }
    check
}

/// Fraction helper for reports.
pub fn rational_json(x: &BigRational) -> Value {
    json!({"num": x.numer().to_string(), "den": x.denom().to_string(), "float": x.to_f64()})
}
