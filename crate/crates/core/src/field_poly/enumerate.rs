use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive};

use super::{Fq, MonicPoly, Poly};
use crate::error::{Error, Result};

/// Deterministic stream over the monic polynomials of one degree.
///
/// The `i`-th item has the base-`q` digits of `i` as its non-leading
/// coefficients, constant term fastest. Any index sub-range can be walked
/// independently, which is how scans are partitioned.
#[derive(Clone, Debug)]
pub struct MonicRange {
    ring: Fq,
    degree: usize,
    next: u64,
    end: u64,
}

impl MonicRange {
    pub fn degree(&self) -> usize {
        self.degree
    }
}

impl Iterator for MonicRange {
    type Item = MonicPoly;

    fn next(&mut self) -> Option<MonicPoly> {
        if self.next >= self.end {
            return None;
        }
        let p = self.ring.monic_from_index(self.degree, self.next);
        self.next += 1;
        Some(p)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for MonicRange {}

impl Fq {
    /// All `q^n` monic polynomials of degree `n`, in index order.
    pub fn enumerate_monic(&self, n: usize) -> MonicRange {
        self.monic_range(n, 0, self.count_monic(n))
    }

    /// The monic polynomials of degree `n` with index in `[start, end)`.
    pub fn monic_range(&self, n: usize, start: u64, end: u64) -> MonicRange {
        let end = end.min(self.count_monic(n));
        MonicRange {
            ring: *self,
            degree: n,
            next: start.min(end),
            end,
        }
    }

    /// Monic polynomial of degree `n` at enumeration index `index < q^n`.
    pub fn monic_from_index(&self, n: usize, index: u64) -> MonicPoly {
        let q = self.q as u64;
        let mut coeffs = Vec::with_capacity(n + 1);
        let mut x = index;
        for _ in 0..n {
            coeffs.push((x % q) as u32);
            x /= q;
        }
        debug_assert_eq!(x, 0, "index out of range for degree");
        coeffs.push(1);
        MonicPoly::new_unchecked(Poly::from_reduced(coeffs))
    }

    /// Canonical residue index: the coefficient sequence read as a base-`q`
    /// integer, constant term least significant.
    pub fn residue_index(&self, f: &Poly) -> u64 {
        let q = self.q as u64;
        f.coeffs()
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * q + c as u64)
    }

    /// Inverse of [`residue_index`](Self::residue_index).
    pub fn poly_from_index(&self, mut index: u64) -> Poly {
        let q = self.q as u64;
        let mut coeffs = Vec::new();
        while index > 0 {
            coeffs.push((index % q) as u32);
            index /= q;
        }
        Poly::from_reduced(coeffs)
    }

    /// Monic irreducibles of degree `n` in enumeration order.
    pub fn enumerate_irreducibles(&self, n: usize) -> Result<impl Iterator<Item = MonicPoly> + '_> {
        if n == 0 {
            return Err(Error::DegreeTooSmall { min: 1, got: 0 });
        }
        Ok(self
            .enumerate_monic(n)
            .filter(move |f| self.is_irreducible(f).unwrap_or(false)))
    }

    /// Exact number of monic irreducibles of degree `n`:
    /// `(1/n) Σ_{d|n} μ(d) q^{n/d}`.
    pub fn count_irreducibles_exact(&self, n: usize) -> Result<BigUint> {
        if n == 0 {
            return Err(Error::DegreeTooSmall { min: 1, got: 0 });
        }
        let q = BigInt::from(self.q);
        let mut total = BigInt::from(0);
        for d in (1..=n).filter(|d| n.is_multiple_of(*d)) {
            match mobius(d) {
                0 => {}
                m => total += BigInt::from(m) * q.pow((n / d) as u32),
            }
        }
        let (count, rem) = (total.clone() / BigInt::from(n), total % BigInt::from(n));
        if rem != BigInt::from(0) || count.is_negative() {
            return Err(Error::Internal("necklace count not integral".into()));
        }
        Ok(count.to_biguint().expect("nonnegative"))
    }

    /// `count_irreducibles_exact` as a `u64`, for enumeration-sized degrees.
    pub fn count_irreducibles_u64(&self, n: usize) -> Result<u64> {
        self.count_irreducibles_exact(n)?
            .to_u64()
            .ok_or_else(|| Error::Internal("irreducible count exceeds u64".into()))
    }
}

pub(crate) fn mobius(mut n: usize) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}
