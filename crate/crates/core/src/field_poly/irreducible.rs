use num_bigint::BigUint;

use super::{Fq, MonicPoly, Poly};
use crate::error::{Error, Result};
use crate::strategy::IrreducibilityTest;

/// Trial division by every monic polynomial of degree `1..=deg f / 2`.
///
/// Exhaustive and slow; the reference the other tests must agree with.
#[derive(Clone, Copy, Debug, Default)]
pub struct TrialDivision;

impl IrreducibilityTest for TrialDivision {
    fn name(&self) -> &'static str {
        "trial-division"
    }

    fn is_irreducible(&self, ring: &Fq, f: &MonicPoly) -> bool {
        let n = f.degree();
        if n <= 1 {
            return n == 1;
        }
        // linear factors are roots
        let has_root = (0..ring.q()).any(|a| eval(ring, f, a) == 0);
        if has_root {
            return false;
        }
        for d in 2..=n / 2 {
            for g in ring.enumerate_monic(d) {
                if ring.divides(&g, f).expect("monic divisor") {
                    return false;
                }
            }
        }
        true
    }
}

/// Rabin's test: `T^{q^n} ≡ T (mod f)` and `gcd(T^{q^{n/p}} − T, f) = 1`
/// for every prime `p | n`.
#[derive(Clone, Copy, Debug, Default)]
pub struct RabinTest;

impl IrreducibilityTest for RabinTest {
    fn name(&self) -> &'static str {
        "rabin"
    }

    fn is_irreducible(&self, ring: &Fq, f: &MonicPoly) -> bool {
        let n = f.degree();
        if n <= 1 {
            return n == 1;
        }
        let q = BigUint::from(ring.q());
        let t = ring.poly_rem(&Poly::t(), f).expect("nonzero modulus");
        // frob[i] = T^{q^i} mod f
        let mut frob = Vec::with_capacity(n + 1);
        frob.push(t.clone());
        for i in 1..=n {
            let next = ring.poly_pow_mod(&frob[i - 1], &q, f).expect("deg f >= 2");
            frob.push(next);
        }
        if frob[n] != t {
            return false;
        }
        prime_divisors(n).into_iter().all(|p| {
            let diff = ring.poly_sub(&frob[n / p], &t);
            ring.poly_gcd(&diff, f).map(|g| g.is_one()).unwrap_or(false)
        })
    }
}

fn eval(ring: &Fq, f: &Poly, x: u32) -> u32 {
    f.coeffs()
        .iter()
        .rev()
        .fold(0, |acc, &c| ring.add(ring.mul(acc, x), c))
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Degrees up to this bound use trial division by default; above it, Rabin.
pub const TRIAL_DIVISION_MAX_DEGREE: usize = 8;

impl Fq {
    /// Membership test for `P_n`.
    pub fn is_irreducible(&self, f: &MonicPoly) -> Result<bool> {
        if f.degree() == 0 {
            return Err(Error::ConstantPolynomial);
        }
        Ok(if f.degree() <= TRIAL_DIVISION_MAX_DEGREE {
            TrialDivision.is_irreducible(self, f)
        } else {
            RabinTest.is_irreducible(self, f)
        })
    }

    /// Same as [`is_irreducible`](Self::is_irreducible) with an explicit test.
    pub fn is_irreducible_with(
        &self,
        f: &MonicPoly,
        test: &dyn IrreducibilityTest,
    ) -> Result<bool> {
        if f.degree() == 0 {
            return Err(Error::ConstantPolynomial);
        }
        Ok(test.is_irreducible(self, f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_cases() {
        let r = Fq::new(5).unwrap();
        for a in 0..5 {
            assert!(r.is_irreducible(&r.monic(&[a, 1]).unwrap()).unwrap());
        }
        assert!(!r.is_irreducible(&r.monic(&[0, 0, 1]).unwrap()).unwrap());
        // T^3+T+1 has no root in F_5: values at 0..4 are 1,3,1,1,4
        let f = r.monic(&[1, 1, 0, 1]).unwrap();
        let values: Vec<u32> = (0..5).map(|x| eval(&r, &f, x)).collect();
        assert_eq!(values, [1, 3, 1, 1, 4]);
        assert!(r.is_irreducible(&f).unwrap());
        assert!(matches!(
            r.is_irreducible(&MonicPoly::one()),
            Err(Error::ConstantPolynomial)
        ));
    }

    #[test]
    fn rabin_agrees_with_trial_division() {
        for q in [5u64, 13] {
            let r = Fq::new(q).unwrap();
            let max = if q == 5 { 6 } else { 3 };
            for n in 1..=max {
                for f in r.enumerate_monic(n) {
                    assert_eq!(
                        TrialDivision.is_irreducible(&r, &f),
                        RabinTest.is_irreducible(&r, &f),
                        "q={q} f={}",
                        f.pretty()
                    );
                }
            }
        }
    }
}
