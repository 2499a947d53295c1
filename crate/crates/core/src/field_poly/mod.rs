//! Arithmetic in `F_q` and in `A = F_q[T]`.
//!
//! [`Fq`] is the ring context: every polynomial operation is a method on it,
//! so polynomials themselves stay plain coefficient vectors.

mod enumerate;
mod factor;
mod irreducible;
mod poly;

pub use enumerate::MonicRange;
pub use factor::{Factorization, Factorizer};
pub use irreducible::{RabinTest, TrialDivision};
pub use poly::{MonicPoly, Poly};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Largest supported field size; keeps coefficient products and short
/// accumulations inside `u64`.
pub const MAX_Q: u32 = 1 << 15;

/// The prime field `F_q` with `q ≡ 1 (mod 4)`, together with polynomial
/// arithmetic over it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fq {
    q: u32,
}

impl Fq {
    pub fn new(q: u64) -> Result<Self> {
        let invalid = |reason| Err(Error::InvalidField { q, reason });
        if q < 5 {
            return invalid("q must be at least 5");
        }
        if q >= MAX_Q as u64 {
            return invalid("q is too large for this library");
        }
        if !is_prime(q) {
            return invalid("q must be prime");
        }
        if q % 4 != 1 {
            return invalid("q must be congruent to 1 mod 4");
        }
        Ok(Fq { q: q as u32 })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    // --- scalars -------------------------------------------------------------

    #[inline]
    pub fn reduce(&self, x: i64) -> u32 {
        x.rem_euclid(self.q as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn pow(&self, mut base: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.q), "zero has no inverse");
        self.pow(a, self.q as u64 - 2)
    }

    /// Legendre symbol of `a` in `F_q`: 0, 1 or -1.
    pub fn legendre(&self, a: u32) -> i8 {
        match self.pow(a % self.q, (self.q as u64 - 1) / 2) {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }

    // --- polynomials ---------------------------------------------------------

    /// Builds a polynomial from arbitrary integers, reducing mod `q`.
    pub fn poly(&self, coeffs: &[i64]) -> Poly {
        Poly::from_reduced(coeffs.iter().map(|&c| self.reduce(c)).collect())
    }

    /// Builds a monic polynomial from arbitrary integers, reducing mod `q`.
    pub fn monic(&self, coeffs: &[i64]) -> Result<MonicPoly> {
        MonicPoly::new(self.poly(coeffs))
    }

    /// Parses the comma form (`1,1,0,1`) or the pretty form (`T^3+T+1`).
    pub fn parse_poly(&self, text: &str) -> Result<Poly> {
        poly::parse_poly(text, self.q)
    }

    pub fn parse_monic(&self, text: &str) -> Result<MonicPoly> {
        let p = self.parse_poly(text)?;
        MonicPoly::new(p).map_err(|_| Error::Parse {
            text: text.to_string(),
            reason: "polynomial is not monic".into(),
        })
    }

    pub fn poly_add(&self, f: &Poly, g: &Poly) -> Poly {
        let n = f.coeffs().len().max(g.coeffs().len());
        let out = (0..n).map(|i| self.add(f.coeff(i), g.coeff(i))).collect();
        Poly::from_reduced(out)
    }

    pub fn poly_sub(&self, f: &Poly, g: &Poly) -> Poly {
        let n = f.coeffs().len().max(g.coeffs().len());
        let out = (0..n).map(|i| self.sub(f.coeff(i), g.coeff(i))).collect();
        Poly::from_reduced(out)
    }

    pub fn poly_scale(&self, f: &Poly, c: u32) -> Poly {
        Poly::from_reduced(f.coeffs().iter().map(|&a| self.mul(a, c)).collect())
    }

    pub fn poly_mul(&self, f: &Poly, g: &Poly) -> Poly {
        if f.is_zero() || g.is_zero() {
            return Poly::zero();
        }
        let (a, b) = (f.coeffs(), g.coeffs());
        let mut acc = vec![0u64; a.len() + b.len() - 1];
        let q = self.q as u64;
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                // each slot receives at most min(len) products < q^2 < 2^30
                acc[i + j] += x as u64 * y as u64;
            }
        }
        Poly::from_reduced(acc.into_iter().map(|c| (c % q) as u32).collect())
    }

    pub fn monic_mul(&self, f: &MonicPoly, g: &MonicPoly) -> MonicPoly {
        MonicPoly::new_unchecked(self.poly_mul(f, g))
    }

    /// `f = quotient·g + remainder` with `deg remainder < deg g`.
    pub fn poly_divmod(&self, f: &Poly, g: &Poly) -> Result<(Poly, Poly)> {
        let dg = g.degree().ok_or(Error::DivisionByZero)?;
        let Some(df) = f.degree() else {
            return Ok((Poly::zero(), Poly::zero()));
        };
        if df < dg {
            return Ok((Poly::zero(), f.clone()));
        }
        let lead_inv = self.inv(g.leading().unwrap_or(1));
        let gc = g.coeffs();
        let mut rem = f.coeffs().to_vec();
        let mut quot = vec![0u32; df - dg + 1];
        for i in (0..=df - dg).rev() {
            let c = self.mul(rem[i + dg], lead_inv);
            quot[i] = c;
            if c == 0 {
                continue;
            }
            for (j, &gj) in gc.iter().enumerate() {
                rem[i + j] = self.sub(rem[i + j], self.mul(c, gj));
            }
        }
        rem.truncate(dg);
        Ok((Poly::from_reduced(quot), Poly::from_reduced(rem)))
    }

    pub fn poly_rem(&self, f: &Poly, g: &Poly) -> Result<Poly> {
        Ok(self.poly_divmod(f, g)?.1)
    }

    /// Whether `g` divides `f`; `g` must be nonzero.
    pub fn divides(&self, g: &Poly, f: &Poly) -> Result<bool> {
        Ok(self.poly_rem(f, g)?.is_zero())
    }

    /// Splits a nonzero polynomial into leading coefficient and monic part.
    pub fn make_monic(&self, f: &Poly) -> Option<(u32, MonicPoly)> {
        let lead = f.leading()?;
        let inv = self.inv(lead);
        Some((lead, MonicPoly::new_unchecked(self.poly_scale(f, inv))))
    }

    /// Monic greatest common divisor via Euclid.
    pub fn poly_gcd(&self, f: &Poly, g: &Poly) -> Result<MonicPoly> {
        if f.is_zero() && g.is_zero() {
            return Err(Error::ZeroGcd);
        }
        let (mut a, mut b) = (f.clone(), g.clone());
        while !b.is_zero() {
            let r = self.poly_rem(&a, &b)?;
            a = b;
            b = r;
        }
        Ok(self.make_monic(&a).expect("nonzero gcd").1)
    }

    pub fn derivative(&self, f: &Poly) -> Poly {
        let out = f
            .coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| self.mul(c, (i as u64 % self.q as u64) as u32))
            .collect();
        Poly::from_reduced(out)
    }

    /// `f^e mod m` by square-and-multiply.
    pub fn poly_pow_mod(&self, f: &Poly, e: &BigUint, m: &Poly) -> Result<Poly> {
        match m.degree() {
            None => return Err(Error::DivisionByZero),
            Some(0) => return Err(Error::ConstantModulus),
            Some(_) => {}
        }
        let base = self.poly_rem(f, m)?;
        let mut acc = Poly::one();
        if e.is_zero() {
            return Ok(acc);
        }
        for i in (0..e.bits()).rev() {
            acc = self.poly_rem(&self.poly_mul(&acc, &acc), m)?;
            if e.bit(i) {
                acc = self.poly_rem(&self.poly_mul(&acc, &base), m)?;
            }
        }
        Ok(acc)
    }

    /// `q^n` as a `u64`, panicking on overflow (enumeration sizes only).
    pub fn count_monic(&self, n: usize) -> u64 {
        (self.q as u64)
            .checked_pow(n as u32)
            .expect("q^n overflows u64")
    }

    /// `q^n` as a big integer.
    pub fn q_pow(&self, n: usize) -> BigUint {
        BigUint::from(self.q).pow(n as u32)
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f5() -> Fq {
        Fq::new(5).unwrap()
    }

    #[test]
    fn field_validation() {
        assert!(Fq::new(5).is_ok());
        assert!(Fq::new(13).is_ok());
        assert!(Fq::new(3).is_err());
        assert!(Fq::new(7).is_err());
        assert!(Fq::new(9).is_err());
        assert!(Fq::new(25).is_err());
    }

    #[test]
    fn divmod_examples() {
        let r = f5();
        // (T^2+1, T) -> (T, 1)
        let (qt, rm) = r.poly_divmod(&r.poly(&[1, 0, 1]), &Poly::t()).unwrap();
        assert_eq!(qt, Poly::t());
        assert_eq!(rm, Poly::one());
        // unit divisor
        let f = r.poly(&[3, 1, 4, 1]);
        let (qt, rm) = r.poly_divmod(&f, &Poly::one()).unwrap();
        assert_eq!((qt, rm.is_zero()), (f, true));
        // T^3+T+1 = T(T^2+2) + (-T+1) = T·(T^2+2) + (4T+1) over F_5
        let (qt, rm) = r
            .poly_divmod(&r.poly(&[1, 1, 0, 1]), &r.poly(&[2, 0, 1]))
            .unwrap();
        assert_eq!(qt, Poly::t());
        assert_eq!(rm, r.poly(&[1, 4]));
        assert!(matches!(
            r.poly_divmod(&f5().poly(&[1]), &Poly::zero()),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn gcd_examples() {
        let r = f5();
        let f = r.poly(&[2, 0, 3]);
        assert_eq!(r.poly_gcd(&f, &f).unwrap().coeffs(), &[4, 0, 1]);
        assert!(r.poly_gcd(&f, &Poly::one()).unwrap().is_one());
        // gcd(T^2-1, T-1) = T+4
        let g = r.poly_gcd(&r.poly(&[-1, 0, 1]), &r.poly(&[-1, 1])).unwrap();
        assert_eq!(g.coeffs(), &[4, 1]);
        assert!(matches!(
            r.poly_gcd(&Poly::zero(), &Poly::zero()),
            Err(Error::ZeroGcd)
        ));
    }

    #[test]
    fn pow_mod_examples() {
        let r = f5();
        let m = r.poly(&[1, 1, 0, 1]);
        let f = r.poly(&[2, 1]);
        assert!(r
            .poly_pow_mod(&f, &BigUint::from(0u32), &m)
            .unwrap()
            .is_one());
        assert_eq!(
            r.poly_pow_mod(&r.poly(&[0, 0, 0, 0, 1]), &BigUint::from(1u32), &m)
                .unwrap(),
            r.poly_rem(&r.poly(&[0, 0, 0, 0, 1]), &m).unwrap()
        );
        // naive repeated multiplication oracle
        let mut naive = Poly::one();
        for _ in 0..62 {
            naive = r.poly_rem(&r.poly_mul(&naive, &f), &m).unwrap();
        }
        assert_eq!(
            r.poly_pow_mod(&f, &BigUint::from(62u32), &m).unwrap(),
            naive
        );
        assert!(matches!(
            r.poly_pow_mod(&f, &BigUint::from(2u32), &Poly::one()),
            Err(Error::ConstantModulus)
        ));
    }

    #[test]
    fn divmod_exhaustive_small_degrees() {
        let r = f5();
        let all: Vec<Poly> = (0..=3)
            .flat_map(|d| (0..r.count_monic(d + 1)).map(move |i| (d, i)))
            .map(|(d, i)| {
                let mut c = Vec::new();
                let mut x = i;
                for _ in 0..=d {
                    c.push((x % 5) as u32);
                    x /= 5;
                }
                Poly::from_reduced(c)
            })
            .collect();
        for f in &all {
            for g in all.iter().filter(|g| !g.is_zero()) {
                let (qt, rm) = r.poly_divmod(f, g).unwrap();
                assert_eq!(r.poly_add(&r.poly_mul(&qt, g), &rm), *f);
                assert!(rm.degree().is_none_or(|d| d < g.degree().unwrap()));
            }
        }
    }

    proptest! {
        #[test]
        fn gcd_divides_both(a in prop::collection::vec(0i64..13, 0..7),
                            b in prop::collection::vec(0i64..13, 1..7)) {
            let r = Fq::new(13).unwrap();
            let (f, g) = (r.poly(&a), r.poly(&b));
            prop_assume!(!(f.is_zero() && g.is_zero()));
            let d = r.poly_gcd(&f, &g).unwrap();
            prop_assert!(r.divides(&d, &f).unwrap());
            prop_assert!(r.divides(&d, &g).unwrap());
        }
    }
}
