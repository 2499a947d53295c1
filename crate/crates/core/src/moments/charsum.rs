//! Prime sums `Σ_{P ∈ P_n} χ_P(f)` for a fixed non-square `f`, and the
//! implied constant in `|Σ| ≪ (deg f / n) q^{n/2}`.

use crate::characters::jacobi_symbol;
use crate::error::{Error, Result};
use crate::field_poly::{Fq, MonicPoly};

/// `Σ_P χ_P(f)` over the given primes.
///
/// Each term goes through the reciprocity ladder, which starts by reducing
/// the (large) prime modulo the (small) `f`.
pub fn char_sum_over(ring: &Fq, f: &MonicPoly, primes: &[MonicPoly]) -> i64 {
    primes
        .iter()
        .map(|p| jacobi_symbol(ring, f, p).expect("primes are nonconstant") as i64)
        .sum()
}

/// `|Σ| · n / (deg f · q^{n/2})`.
pub fn ratio_from_sum(ring: &Fq, sum: i64, deg_f: usize, n: usize) -> f64 {
    sum.unsigned_abs() as f64 * n as f64 / (deg_f as f64 * (ring.q() as f64).powf(n as f64 / 2.0))
}

fn require_non_square(ring: &Fq, f: &MonicPoly) -> Result<()> {
    if f.degree() == 0 || ring.is_perfect_square(f) {
        return Err(Error::SquareArgument(f.pretty()));
    }
    Ok(())
}

pub fn char_sum_ratio(ring: &Fq, f: &MonicPoly, n: usize) -> Result<f64> {
    require_non_square(ring, f)?;
    let primes: Vec<MonicPoly> = ring.enumerate_irreducibles(n)?.collect();
    let sum = char_sum_over(ring, f, &primes);
    Ok(ratio_from_sum(ring, sum, f.degree(), n))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharSumRow {
    pub f: MonicPoly,
    pub n: usize,
    pub sum: i64,
    pub ratio: f64,
}

/// Every non-square monic `f` with `1 ≤ deg f ≤ max_deg_f` against every
/// `n` in `degrees`, in enumeration order.
pub fn char_sum_grid(ring: &Fq, max_deg_f: usize, degrees: &[usize]) -> Result<Vec<CharSumRow>> {
    let fs: Vec<MonicPoly> = (1..=max_deg_f)
        .flat_map(|d| ring.enumerate_monic(d))
        .filter(|f| !ring.is_perfect_square(f))
        .collect();
    let mut rows = Vec::with_capacity(fs.len() * degrees.len());
    for &n in degrees {
        let primes: Vec<MonicPoly> = ring.enumerate_irreducibles(n)?.collect();
        for f in &fs {
            let sum = char_sum_over(ring, f, &primes);
            rows.push(CharSumRow {
                f: f.clone(),
                n,
                sum,
                ratio: ratio_from_sum(ring, sum, f.degree(), n),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{euler_symbol, Prime};

    #[test]
    fn squares_rejected() {
        let r = Fq::new(5).unwrap();
        let t2 = r.monic(&[0, 0, 1]).unwrap();
        assert!(matches!(
            char_sum_ratio(&r, &t2, 3),
            Err(Error::SquareArgument(_))
        ));
        assert!(char_sum_ratio(&r, &MonicPoly::one(), 3).is_err());
    }

    #[test]
    fn ladder_matches_euler_on_prime_sums() {
        let r = Fq::new(5).unwrap();
        let primes: Vec<MonicPoly> = r.enumerate_irreducibles(3).unwrap().collect();
        for f in r.enumerate_monic(2) {
            let direct: i64 = primes
                .iter()
                .map(|p| euler_symbol(&r, &f, &Prime::new_unchecked(p.clone())) as i64)
                .sum();
            assert_eq!(char_sum_over(&r, &f, &primes), direct);
        }
    }

    #[test]
    fn grid_skips_squares() {
        let r = Fq::new(5).unwrap();
        let rows = char_sum_grid(&r, 2, &[3]).unwrap();
        // 5 linear + 25 quadratics − 5 squares (T + a)²
        assert_eq!(rows.len(), 25);
        assert!(rows.iter().all(|row| row.ratio.is_finite()));
    }
}
