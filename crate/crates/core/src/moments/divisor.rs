//! The divisor function `d_k` and the square-argument sums
//! `D(z) = Σ_{m ∈ A+_{≤z}} d_k(m²)/|m|`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field_poly::{Factorization, Factorizer, Fq, MonicPoly};
use crate::strategy::DivisorSumMethod;

/// Largest degree the power-series method accepts.
pub const MAX_SERIES_DEGREE: usize = 64;

/// Default enumeration budget for the brute-force sums (`q^{z+1}` items).
pub const DEFAULT_BRUTE_BUDGET: u64 = 2_000_000;

pub fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n.saturating_sub(k));
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `d_k` from a factorization: `Π C(a_i + k − 1, k − 1)`.
pub fn d_k_from_exponents(exponents: impl IntoIterator<Item = u32>, k: u32) -> BigUint {
    if k == 0 {
        return BigUint::zero();
    }
    exponents
        .into_iter()
        .map(|a| binomial((a + k - 1) as u64, (k - 1) as u64))
        .product()
}

pub fn d_k_factored(fac: &Factorization, k: u32) -> BigUint {
    d_k_from_exponents(fac.exponents(), k)
}

impl Fq {
    /// Number of ordered `k`-tuples of monic polynomials with product `m`.
    pub fn d_k(&self, m: &MonicPoly, k: u32) -> BigUint {
        d_k_factored(&self.factor(m), k)
    }
}

/// `d_k(m)` by direct enumeration: choose the first factor among all monic
/// polynomials of degree `≤ deg m` that divide `m`, then recurse.
pub fn d_k_by_enumeration(ring: &Fq, m: &MonicPoly, k: u32) -> BigUint {
    match k {
        0 => return BigUint::zero(),
        1 => return BigUint::one(),
        _ => {}
    }
    let mut total = BigUint::zero();
    for d in 0..=m.degree() {
        for first in ring.enumerate_monic(d) {
            let (quot, rem) = ring.poly_divmod(m, &first).expect("monic divisor");
            if rem.is_zero() {
                let rest = MonicPoly::new(quot).expect("quotient of monics is monic");
                total += d_k_by_enumeration(ring, &rest, k - 1);
            }
        }
    }
    total
}

/// Per-degree terms `t_d = Σ_{deg m = d} d_k(m²)/q^d` and their partial sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorSumTable {
    pub q: u32,
    pub k: u32,
    pub terms: Vec<BigRational>,
    pub partial: Vec<BigRational>,
}

impl DivisorSumTable {
    fn from_terms(q: u32, k: u32, terms: Vec<BigRational>) -> Self {
        let mut partial = Vec::with_capacity(terms.len());
        let mut acc = BigRational::zero();
        for t in &terms {
            acc += t;
            partial.push(acc.clone());
        }
        DivisorSumTable {
            q,
            k,
            terms,
            partial,
        }
    }

    pub fn max_degree(&self) -> usize {
        self.terms.len() - 1
    }

    /// `D(z)`.
    pub fn partial_sum(&self, z: usize) -> &BigRational {
        &self.partial[z]
    }
}

/// `D(z)` by enumerating and factoring every monic `m` of degree `≤ z`.
pub fn divisor_sum_brute(ring: &Fq, z: usize, k: u32) -> Result<BigRational> {
    Ok(brute_force_table(ring, k, z, DEFAULT_BRUTE_BUDGET)?.partial[z].clone())
}

pub fn brute_force_table(ring: &Fq, k: u32, z: usize, budget: u64) -> Result<DivisorSumTable> {
    Ok(brute_force_tables(ring, &[k], z, budget)?.remove(0))
}

/// Brute-force tables for several `k` from a single factorization pass.
pub fn brute_force_tables(
    ring: &Fq,
    ks: &[u32],
    z: usize,
    budget: u64,
) -> Result<Vec<DivisorSumTable>> {
    let needed = (ring.q() as u128).pow(z as u32 + 1);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded {
            what: "brute-force divisor sum",
            needed,
            budget: budget as u128,
        });
    }
    let factorizer = Factorizer::new(*ring, z);
    let q = BigInt::from(ring.q());
    let mut totals = vec![vec![BigUint::zero(); z + 1]; ks.len()];
    for d in 0..=z {
        for m in ring.enumerate_monic(d) {
            let fac = factorizer.factor(&m);
            for (per_degree, &k) in totals.iter_mut().zip(ks) {
                per_degree[d] += d_k_from_exponents(fac.exponents().map(|a| 2 * a), k);
            }
        }
    }
    Ok(ks
        .iter()
        .zip(totals)
        .map(|(&k, per_degree)| {
            let terms = per_degree
                .into_iter()
                .enumerate()
                .map(|(d, t)| BigRational::new(BigInt::from(t), q.pow(d as u32)))
                .collect();
            DivisorSumTable::from_terms(ring.q(), k, terms)
        })
        .collect())
}

type Series = Vec<BigRational>;

/// `log h` for a power series with `h_0 = 1`, truncated to `h.len()` terms.
fn series_log(h: &Series) -> Series {
    let n = h.len();
    let mut out = vec![BigRational::zero(); n];
    for m in 1..n {
        // m h_m = Σ_{j=1}^{m} j L_j h_{m-j}
        let mut acc = BigRational::zero();
        for j in 1..m {
            acc += &out[j] * &h[m - j] * BigRational::from_integer(j.into());
        }
        out[m] = &h[m] - acc / BigRational::from_integer(m.into());
    }
    out
}

/// `exp s` for a power series with `s_0 = 0`.
fn series_exp(s: &Series) -> Series {
    let n = s.len();
    let mut out = vec![BigRational::zero(); n];
    out[0] = BigRational::one();
    for m in 1..n {
        let mut acc = BigRational::zero();
        for j in 1..=m {
            acc += &s[j] * &out[m - j] * BigRational::from_integer(j.into());
        }
        out[m] = acc / BigRational::from_integer(m.into());
    }
    out
}

/// `D(z)` table from the Euler product
/// `Σ_m d_k(m²) u^{deg m} = Π_P h_k(u^{deg P})`,
/// `h_k(v) = Σ_a C(2a + k − 1, k − 1) v^a`, with the number of primes of
/// each degree taken from the exact count.
pub fn divisor_sum_series(ring: &Fq, k: u32, max_degree: usize) -> Result<DivisorSumTable> {
    if max_degree > MAX_SERIES_DEGREE {
        return Err(Error::BudgetExceeded {
            what: "divisor-sum power series degree",
            needed: max_degree as u128,
            budget: MAX_SERIES_DEGREE as u128,
        });
    }
    if k == 0 {
        return Err(Error::Config("divisor sums need k >= 1".into()));
    }
    let len = max_degree + 1;
    let h: Series = (0..len)
        .map(|a| {
            let c = binomial((2 * a as u64) + k as u64 - 1, k as u64 - 1);
            BigRational::from_integer(BigInt::from(c))
        })
        .collect();
    let log_h = series_log(&h);
    let mut log_f = vec![BigRational::zero(); len];
    for j in 1..len {
        let primes = BigRational::from_integer(BigInt::from(ring.count_irreducibles_exact(j)?));
        for a in 1..len {
            if j * a >= len {
                break;
            }
            log_f[j * a] += &primes * &log_h[a];
        }
    }
    let f = series_exp(&log_f);
    let q = BigInt::from(ring.q());
    let mut terms = Vec::with_capacity(len);
    for (d, coeff) in f.into_iter().enumerate() {
        if !coeff.is_integer() {
            return Err(Error::Internal(format!(
                "Euler product coefficient {d} is not an integer: {coeff}"
            )));
        }
        terms.push(coeff / BigRational::from_integer(q.pow(d as u32)));
    }
    Ok(DivisorSumTable::from_terms(ring.q(), k, terms))
}

/// Least-squares fit of `ln D(z)` against `ln z` over an inclusive window.
#[derive(Clone, Debug, Serialize)]
pub struct SlopeFit {
    pub k: u32,
    pub z_lo: usize,
    pub z_hi: usize,
    pub slope: f64,
    pub intercept: f64,
    /// `k(k+1)/2`
    pub target: f64,
    pub relative_error: f64,
}

pub fn growth_slope(table: &DivisorSumTable, z_lo: usize, z_hi: usize) -> Result<SlopeFit> {
    if z_lo == 0 || z_hi <= z_lo || z_hi > table.max_degree() {
        return Err(Error::Config(format!(
            "slope window [{z_lo}, {z_hi}] must satisfy 1 <= lo < hi <= {}",
            table.max_degree()
        )));
    }
    let points: Vec<(f64, f64)> = (z_lo..=z_hi)
        .map(|z| {
            let d = table.partial[z].to_f64().unwrap_or(f64::NAN);
            ((z as f64).ln(), d.ln())
        })
        .collect();
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let target = (table.k * (table.k + 1)) as f64 / 2.0;
    Ok(SlopeFit {
        k: table.k,
        z_lo,
        z_hi,
        slope,
        intercept: my - slope * mx,
        target,
        relative_error: (slope - target) / target,
    })
}

/// Enumerate-and-factor strategy.
#[derive(Clone, Copy, Debug)]
pub struct BruteForceSums {
    pub budget: u64,
}

impl Default for BruteForceSums {
    fn default() -> Self {
        BruteForceSums {
            budget: DEFAULT_BRUTE_BUDGET,
        }
    }
}

impl DivisorSumMethod for BruteForceSums {
    fn name(&self) -> &'static str {
        "brute"
    }

    fn table(&self, ring: &Fq, k: u32, max_degree: usize) -> Result<DivisorSumTable> {
        brute_force_table(ring, k, max_degree, self.budget)
    }
}

/// Euler-product power-series strategy.
#[derive(Clone, Copy, Debug, Default)]
pub struct EulerProductSeries;

impl DivisorSumMethod for EulerProductSeries {
    fn name(&self) -> &'static str {
        "series"
    }

    fn table(&self, ring: &Fq, k: u32, max_degree: usize) -> Result<DivisorSumTable> {
        divisor_sum_series(ring, k, max_degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Fq {
        Fq::new(5).unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn d_k_small_cases() {
        let r = f5();
        for k in 1..=5 {
            assert_eq!(r.d_k(&MonicPoly::one(), k), BigUint::one());
        }
        let q2 = r.monic(&[1, 0, 2, 0, 1]).unwrap(); // (T^2+1)^2, T^2+1 = (T+2)(T+3)
        let fac = r.factor(&q2);
        assert_eq!(fac.factors().len(), 2);
        let t2 = r.monic(&[0, 0, 1]).unwrap();
        assert_eq!(r.d_k(&t2, 2), BigUint::from(3u32));
        assert_eq!(d_k_by_enumeration(&r, &t2, 2), BigUint::from(3u32));
        assert_eq!(r.d_k(&t2, 0), BigUint::zero());
    }

    #[test]
    fn brute_sums_by_hand() {
        let r = f5();
        assert_eq!(divisor_sum_brute(&r, 0, 2).unwrap(), rat(1, 1));
        // 1 + 5·3/5
        assert_eq!(divisor_sum_brute(&r, 1, 2).unwrap(), rat(4, 1));
        // degree 2: 10 irreducible (d_2(Q²) = 3), 10 with two distinct linear
        // factors (d_2 = 9), 5 squares of linears (d_2(L⁴) = 5):
        // (30 + 90 + 25)/25 = 145/25
        assert_eq!(
            divisor_sum_brute(&r, 2, 2).unwrap(),
            rat(4, 1) + rat(145, 25)
        );
    }

    #[test]
    fn series_matches_brute_up_to_degree_six() {
        let r = f5();
        for k in 1..=3 {
            let brute = brute_force_table(&r, k, 6, DEFAULT_BRUTE_BUDGET).unwrap();
            let series = divisor_sum_series(&r, k, 6).unwrap();
            assert_eq!(brute, series, "k = {k}");
        }
    }

    #[test]
    fn table_shape() {
        let t = divisor_sum_series(&f5(), 2, 10).unwrap();
        assert_eq!(t.terms[0], rat(1, 1));
        assert!(t.terms.iter().all(|x| *x > BigRational::zero()));
        assert!(t.partial.windows(2).all(|w| w[0] < w[1]));
        assert!(divisor_sum_series(&f5(), 2, 65).is_err());
        assert!(brute_force_table(&f5(), 2, 20, DEFAULT_BRUTE_BUDGET).is_err());
    }

    #[test]
    fn slope_of_exact_power_law() {
        let terms: Vec<BigRational> = (0..=10)
            .map(|z: i64| rat(z.pow(3) - (z - 1).max(0).pow(3), 1))
            .collect();
        let table = DivisorSumTable::from_terms(5, 2, terms);
        let fit = growth_slope(&table, 2, 10).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-12);
        assert!(growth_slope(&table, 0, 5).is_err());
    }
}
