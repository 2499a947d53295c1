//! The lower-bound machinery for moments of `L(1/2, χ_P)` over `P_n`:
//! the truncated Dirichlet polynomial `A(P)`, the sums `S1`, `S2`, the
//! Hölder chain, and the combinatorial sums behind the main terms.

pub mod charsum;
pub mod divisor;

use std::cmp::Ordering;
use std::collections::HashMap;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::characters::QuadraticCharacter;
use crate::error::{Error, Result};
use crate::field_poly::{Factorizer, Fq, MonicPoly};
use crate::lfunction::partial_central_value;
use crate::qsqrt::{sum_in, QSqrt};
use crate::scan::Scan;

/// Truncation length for `A(P)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncationParams {
    k: u32,
    genus: usize,
    x_nominal: BigRational,
    x_effective: usize,
    x_override: Option<usize>,
}

/// `x = 2(2g)/(15k)`.
pub fn x_nominal(genus: usize, k: u32) -> BigRational {
    BigRational::new(BigInt::from(4 * genus), BigInt::from(15 * k))
}

impl TruncationParams {
    /// `k` must be even and positive. Without an override the cutoff is
    /// `floor(x_nominal)`.
    pub fn new(k: u32, genus: usize, x_override: Option<usize>) -> Result<Self> {
        if k == 0 || k % 2 == 1 {
            return Err(Error::InvalidMomentOrder(k));
        }
        let x_nominal = x_nominal(genus, k);
        let floor = x_nominal
            .floor()
            .to_integer()
            .to_usize()
            .expect("nonnegative cutoff");
        Ok(TruncationParams {
            k,
            genus,
            x_effective: x_override.unwrap_or(floor),
            x_nominal,
            x_override,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn x_nominal(&self) -> &BigRational {
        &self.x_nominal
    }

    pub fn x_effective(&self) -> usize {
        self.x_effective
    }

    pub fn x_override(&self) -> Option<usize> {
        self.x_override
    }
}

/// `A(P) = Σ_{deg n ≤ x} χ_P(n)/√|n|`, summed from character values.
pub fn truncated_char_sum(chi: &QuadraticCharacter, params: &TruncationParams) -> QSqrt {
    let q = chi.ring().q();
    sum_in(
        q,
        (0..=params.x_effective()).map(|d| {
            let s = BigRational::from_integer(chi.degree_sum(d).into());
            QSqrt::inv_sqrt_q_pow(q, d).scale(&s)
        }),
    )
}

/// `A(P)` from stored L-coefficients. Degree sums at or beyond `deg P`
/// run over whole periods and vanish, so clipping at `2g` is exact.
pub fn truncated_from_l(l: &crate::lfunction::LPolynomial, x: usize) -> QSqrt {
    partial_central_value(l, x)
}

/// `S1 = Σ_P L(1/2,χ_P) A(P)^{k−1}` and `S2 = Σ_P A(P)^k`.
pub fn proof_sums(scan: &Scan, params: &TruncationParams) -> (QSqrt, QSqrt) {
    let q = scan.q;
    let k = params.k();
    let mut s1 = QSqrt::zero(q);
    let mut s2 = QSqrt::zero(q);
    for rec in &scan.records {
        let a = truncated_from_l(&rec.l, params.x_effective());
        let a_km1 = a.pow(k - 1);
        s1 += &(&rec.central * &a_km1);
        s2 += &(&a_km1 * &a);
    }
    (s1, s2)
}

/// `Σ_P L(1/2,χ_P)^k` and its average over `P_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentSum {
    pub total: QSqrt,
    pub normalized: QSqrt,
}

pub fn moment_sum(scan: &Scan, k: u32) -> MomentSum {
    let total = sum_in(scan.q, scan.records.iter().map(|r| r.central.pow(k)));
    let count = BigRational::from_integer(scan.records.len().into());
    let normalized = if count.is_zero() {
        QSqrt::zero(scan.q)
    } else {
        total.scale(&count.recip())
    };
    MomentSum { total, normalized }
}

/// `Σ_P (log_q|P|) L(1/2,χ_P)` and its ratio to `|P| log_q|P|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedFirstMoment {
    pub weighted: QSqrt,
    /// `Σ_P L(1/2,χ_P) / q^n`.
    pub ratio: QSqrt,
}

pub fn weighted_first_moment(scan: &Scan) -> WeightedFirstMoment {
    let first = moment_sum(scan, 1).total;
    let n = BigInt::from(scan.degree);
    let qn = BigInt::from(scan.q).pow(scan.degree as u32);
    WeightedFirstMoment {
        weighted: first.scale(&BigRational::from_integer(n)),
        ratio: first.scale(&BigRational::new(BigInt::one(), qn)),
    }
}

/// Result of comparing `S1^k` with `(Σ L^k)·S2^{k−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct HolderCheck {
    pub holds: bool,
    /// `rhs / lhs` as a float; infinite when `lhs = 0`.
    pub gap: f64,
}

#[derive(Clone, Debug)]
pub struct MomentReport {
    pub q: u32,
    pub n: usize,
    pub params: TruncationParams,
    pub conductors: usize,
    pub moment: MomentSum,
    pub s1: QSqrt,
    pub s2: QSqrt,
    pub holder_lhs: QSqrt,
    pub holder_rhs: QSqrt,
    pub weighted_first: WeightedFirstMoment,
    pub wall_time: f64,
    pub cache_hits: usize,
    pub recomputed: usize,
}

impl MomentReport {
    pub fn build(scan: &Scan, params: TruncationParams) -> MomentReport {
        let start = Instant::now();
        let k = params.k();
        let moment = moment_sum(scan, k);
        let (s1, s2) = proof_sums(scan, &params);
        let holder_lhs = s1.pow(k);
        let holder_rhs = &moment.total * &s2.pow(k - 1);
        MomentReport {
            q: scan.q,
            n: scan.degree,
            conductors: scan.records.len(),
            weighted_first: weighted_first_moment(scan),
            moment,
            s1,
            s2,
            holder_lhs,
            holder_rhs,
            params,
            wall_time: start.elapsed().as_secs_f64(),
            cache_hits: scan.provenance.cache_hits,
            recomputed: scan.provenance.recomputed,
        }
    }

    pub fn k(&self) -> u32 {
        self.params.k()
    }
}

/// `S1^k ≤ (Σ L^k)·S2^{k−1}`, compared exactly.
pub fn holder_check(report: &MomentReport) -> Result<HolderCheck> {
    if report.s2.is_zero() && !report.s1.is_zero() {
        return Err(Error::Internal(format!(
            "S2 vanished with S1 = {} (q = {}, n = {}, k = {})",
            report.s1,
            report.q,
            report.n,
            report.k()
        )));
    }
    let holds = report.holder_lhs.cmp_value(&report.holder_rhs) != Ordering::Greater;
    let lhs = report.holder_lhs.to_f64();
    let gap = if lhs == 0.0 {
        f64::INFINITY
    } else {
        report.holder_rhs.to_f64() / lhs
    };
    Ok(HolderCheck { holds, gap })
}

/// Kernel parity vector of every monic `n` with `deg n ≤ x`, as a bit mask
/// over the primes of degree `≤ x`, grouped by degree.
fn kernel_masks(ring: &Fq, x: usize) -> Result<Vec<Vec<u128>>> {
    let mut primes: Vec<MonicPoly> = Vec::new();
    for d in 1..=x {
        primes.extend(ring.enumerate_irreducibles(d)?);
    }
    if primes.len() > 128 {
        return Err(Error::BudgetExceeded {
            what: "primes tracked by the square-tuple mask",
            needed: primes.len() as u128,
            budget: 128,
        });
    }
    let index: HashMap<MonicPoly, usize> = primes
        .into_iter()
        .enumerate()
        .map(|(i, p)| (p, i))
        .collect();
    let factorizer = Factorizer::new(*ring, x);
    Ok((0..=x)
        .map(|d| {
            ring.enumerate_monic(d)
                .map(|n| {
                    factorizer
                        .factor(&n)
                        .factors()
                        .iter()
                        .filter(|(_, e)| e % 2 == 1)
                        .fold(0u128, |m, (p, _)| m | (1u128 << index[p]))
                })
                .collect()
        })
        .collect())
}

/// `Σ 1/√(|n_1|⋯|n_k|)` over `k`-tuples with every `deg n_j ≤ x` and
/// `n_1⋯n_k` a perfect square: the main-term weight of `S2`.
///
/// A dynamic program over (kernel mask, total degree); the product is a
/// square exactly when the masks XOR to zero.
pub fn square_tuple_sum(ring: &Fq, k: u32, x: usize) -> Result<BigRational> {
    let masks = kernel_masks(ring, x)?;
    let mut state: HashMap<(u128, usize), BigUint> = HashMap::from([((0, 0), BigUint::one())]);
    let per_degree: Vec<HashMap<u128, u64>> = masks
        .iter()
        .map(|ms| {
            let mut h = HashMap::new();
            for &m in ms {
                *h.entry(m).or_insert(0) += 1;
            }
            h
        })
        .collect();
    for _ in 0..k {
        let mut next: HashMap<(u128, usize), BigUint> = HashMap::new();
        for ((mask, deg), count) in &state {
            for (d, h) in per_degree.iter().enumerate() {
                for (m, c) in h {
                    *next.entry((mask ^ m, deg + d)).or_default() += count * BigUint::from(*c);
                }
            }
        }
        state = next;
    }
    let q = BigInt::from(ring.q());
    Ok(state
        .into_iter()
        .filter(|((mask, _), _)| *mask == 0)
        .map(|((_, deg), count)| {
            debug_assert!(deg % 2 == 0);
            BigRational::new(BigInt::from(count), q.pow((deg / 2) as u32))
        })
        .sum())
}

/// Ordered `k`-tuples with every `deg n_j ≤ x` and product `target`.
fn bounded_tuples(ring: &Fq, target: &MonicPoly, k: u32, x: usize) -> BigUint {
    if k == 0 {
        return if target.degree() == 0 {
            BigUint::one()
        } else {
            BigUint::zero()
        };
    }
    if target.degree() > k as usize * x {
        return BigUint::zero();
    }
    let mut total = BigUint::zero();
    for d in 0..=x.min(target.degree()) {
        for first in ring.enumerate_monic(d) {
            let (quot, rem) = ring.poly_divmod(target, &first).expect("monic divisor");
            if rem.is_zero() {
                let rest = MonicPoly::new(quot).expect("monic quotient");
                total += bounded_tuples(ring, &rest, k - 1, x);
            }
        }
    }
    total
}

/// The same quantity counted the other way: `Σ_m d'(m)/|m|`, where `d'(m)`
/// is the number of ordered `k`-tuples of degree `≤ x` with product `m²`.
pub fn square_tuple_sum_by_m(ring: &Fq, k: u32, x: usize) -> BigRational {
    let q = BigInt::from(ring.q());
    let mut total = BigRational::zero();
    for d in 0..=(k as usize * x) / 2 {
        for m in ring.enumerate_monic(d) {
            let m2 = ring.monic_mul(&m, &m);
            let count = bounded_tuples(ring, &m2, k, x);
            if !count.is_zero() {
                total += BigRational::new(BigInt::from(count), q.pow(d as u32));
            }
        }
    }
    total
}

/// Both sides of the bracketing of the square-tuple sum by divisor sums,
/// with the computed middle term.
#[derive(Clone, Debug)]
pub struct SquareBracket {
    pub k: u32,
    pub x: usize,
    /// `Σ_{deg m ≤ x} d_k(m²)/|m|`.
    pub lower_at_x: BigRational,
    /// `Σ_{deg m ≤ floor(x/2)} d_k(m²)/|m|`, which every tuple sum dominates.
    pub lower_at_half_x: BigRational,
    pub middle: BigRational,
    /// `Σ_{deg m ≤ kx} d_k(m²)/|m|`.
    pub upper: BigRational,
}

impl SquareBracket {
    pub fn lower_at_x_holds(&self) -> bool {
        self.lower_at_x <= self.middle
    }

    pub fn lower_at_half_x_holds(&self) -> bool {
        self.lower_at_half_x <= self.middle
    }

    pub fn upper_holds(&self) -> bool {
        self.middle <= self.upper
    }
}

pub fn square_bracket(ring: &Fq, k: u32, x: usize) -> Result<SquareBracket> {
    let table = divisor::divisor_sum_series(ring, k, k as usize * x)?;
    Ok(SquareBracket {
        k,
        x,
        lower_at_x: table.partial_sum(x).clone(),
        lower_at_half_x: table.partial_sum(x / 2).clone(),
        middle: square_tuple_sum(ring, k, x)?,
        upper: table.partial_sum(k as usize * x).clone(),
    })
}

/// `Σ_{deg l ≤ bound} 1/|l|`, by enumeration; every degree contributes
/// `q^d / q^d = 1`, so the value is `bound + 1`.
pub fn reciprocal_norm_sum(ring: &Fq, bound: usize) -> BigRational {
    let q = BigInt::from(ring.q());
    (0..=bound)
        .map(|d| {
            let count = ring.enumerate_monic(d).count();
            BigRational::new(BigInt::from(count), q.pow(d as u32))
        })
        .sum()
}
