//! `L(s, χ_P)` as a polynomial in `u = q^{-s}`.
//!
//! For `deg P = 2g + 1` the coefficients are the degree-`n` character sums
//! `c_n = Σ_{f ∈ A+_n} χ_P(f)` for `0 ≤ n ≤ 2g`, and they vanish beyond.

mod roots;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::characters::QuadraticCharacter;
use crate::error::{Error, Result};
use crate::field_poly::MonicPoly;
use crate::qsqrt::QSqrt;

/// `L(1/2, χ_P)` as an exact element of `Q(√q)`.
pub type CentralValue = QSqrt;

/// Tolerance used for the zero-modulus check at desk scale.
pub const DEFAULT_RH_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPolynomial {
    q: u32,
    conductor: MonicPoly,
    genus: usize,
    coeffs: Vec<BigInt>,
}

impl LPolynomial {
    /// Wraps externally supplied coefficients (e.g. from a cache file).
    pub fn from_coeffs(q: u32, conductor: MonicPoly, coeffs: Vec<BigInt>) -> Result<Self> {
        let deg = conductor.degree();
        if deg.is_multiple_of(2) {
            return Err(Error::EvenDegree(conductor.pretty()));
        }
        let genus = (deg - 1) / 2;
        if coeffs.len() != 2 * genus + 1 {
            return Err(Error::Internal(format!(
                "L-polynomial for degree {deg} needs {} coefficients, got {}",
                2 * genus + 1,
                coeffs.len()
            )));
        }
        Ok(LPolynomial {
            q,
            conductor,
            genus,
            coeffs,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn conductor(&self) -> &MonicPoly {
        &self.conductor
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// `(c_0, …, c_{2g})`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Returns a copy with `c_n` shifted by `delta` (fault injection).
    pub fn perturbed(&self, n: usize, delta: i64) -> LPolynomial {
        let mut out = self.clone();
        out.coeffs[n] += delta;
        out
    }

    /// Whether `|c_n| ≤ q^n` for every `n`.
    pub fn trivial_bound_holds(&self) -> bool {
        let q = BigInt::from(self.q);
        self.coeffs
            .iter()
            .enumerate()
            .all(|(n, c)| c.abs() <= q.pow(n as u32))
    }

    /// `max_n |c_n| / (C(2g, n) q^{n/2})`; at most 1 under the Weil bound.
    pub fn weil_ratio(&self) -> f64 {
        let two_g = 2 * self.genus;
        let mut binom = 1f64;
        let mut worst: f64 = 0.0;
        for (n, c) in self.coeffs.iter().enumerate() {
            if n > 0 {
                binom = binom * (two_g - n + 1) as f64 / n as f64;
            }
            let bound = binom * (self.q as f64).powf(n as f64 / 2.0);
            worst = worst.max(c.to_f64().unwrap_or(f64::INFINITY).abs() / bound);
        }
        worst
    }
}

/// `c_n = Σ_{f ∈ A+_n} χ_P(f)` for `0 ≤ n ≤ 2g`.
pub fn l_coefficients(chi: &QuadraticCharacter) -> LPolynomial {
    let conductor = chi.conductor();
    let genus = conductor.genus();
    let coeffs = (0..=2 * genus)
        .map(|n| BigInt::from(chi.degree_sum(n)))
        .collect();
    LPolynomial {
        q: chi.ring().q(),
        conductor: conductor.poly().clone(),
        genus,
        coeffs,
    }
}

/// `max_{0≤n≤g} |c_{2g−n} − q^{g−n} c_n|`; zero exactly when the functional
/// equation holds.
pub fn functional_equation_defect(l: &LPolynomial) -> BigUint {
    let g = l.genus;
    let q = BigInt::from(l.q);
    (0..=g)
        .map(|n| {
            let diff = &l.coeffs[2 * g - n] - q.pow((g - n) as u32) * &l.coeffs[n];
            diff.magnitude().clone()
        })
        .max()
        .unwrap_or_default()
}

/// `Σ c_n q^{-n/2}`: even `n` feed the rational part, odd `n` the
/// `q^{-1/2}` part.
pub fn central_value(l: &LPolynomial) -> CentralValue {
    partial_central_value(l, 2 * l.genus)
}

/// `Σ_{n ≤ upto} c_n q^{-n/2}` (`upto` clipped to `2g`).
pub fn partial_central_value(l: &LPolynomial, upto: usize) -> CentralValue {
    let q = BigInt::from(l.q);
    let mut a = BigRational::zero();
    let mut b = BigRational::zero();
    for (n, c) in l.coeffs.iter().enumerate().take(upto.min(2 * l.genus) + 1) {
        let term = BigRational::new(c.clone(), q.pow((n / 2) as u32));
        if n % 2 == 0 {
            a += term;
        } else {
            b += term;
        }
    }
    QSqrt::new(l.q, a, b)
}

/// Right side of the approximate functional equation,
/// `Σ_{deg f ≤ g} χ(f)/√|f| + Σ_{deg f ≤ g−1} χ(f)/√|f|`, summed directly
/// from character values.
pub fn afe_value(chi: &QuadraticCharacter) -> CentralValue {
    let q = chi.ring().q();
    let g = chi.conductor().genus();
    let mut total = QSqrt::zero(q);
    let mut add_range = |upto: Option<usize>| {
        let Some(upto) = upto else { return };
        for d in 0..=upto {
            let s = BigRational::from_integer(chi.degree_sum(d).into());
            total += &QSqrt::inv_sqrt_q_pow(q, d).scale(&s);
        }
    };
    add_range(Some(g));
    // A+_{≤ -1} is empty
    add_range(g.checked_sub(1));
    total
}

/// Numerically computed zeros of the L-polynomial in `u`.
#[derive(Clone, Debug)]
pub struct ZeroSet {
    pub roots: Vec<Complex64>,
    /// `max | |u| − q^{-1/2} |` over the roots.
    pub moduli_defect: f64,
    pub tolerance: f64,
}

impl ZeroSet {
    pub fn within_tolerance(&self) -> bool {
        self.moduli_defect < self.tolerance
    }
}

/// Zeros of `Σ c_n u^n` and their distance from the circle `|u| = q^{-1/2}`.
pub fn l_zeros(l: &LPolynomial, tol: f64) -> Result<ZeroSet> {
    if l.genus == 0 {
        return Err(Error::DegreeTooSmall {
            min: 3,
            got: l.conductor.degree(),
        });
    }
    let roots = roots::integer_poly_roots(&l.coeffs, l.q as f64)?;
    if roots.len() != 2 * l.genus {
        return Err(Error::Internal(format!(
            "expected {} zeros, found {}",
            2 * l.genus,
            roots.len()
        )));
    }
    let target = (l.q as f64).sqrt().recip();
    let moduli_defect = roots
        .iter()
        .map(|r| (r.norm() - target).abs())
        .fold(0.0, f64::max);
    Ok(ZeroSet {
        roots,
        moduli_defect,
        tolerance: tol,
    })
}

/// Evaluates the L-polynomial at a complex `u` (used for spot checks).
pub fn evaluate(l: &LPolynomial, u: Complex64) -> Complex64 {
    l.coeffs.iter().rev().fold(Complex64::zero(), |acc, c| {
        acc * u + Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)
    })
}

impl LPolynomial {
    /// `c_0 = 1`.
    pub fn is_normalized(&self) -> bool {
        self.coeffs.first().is_some_and(|c| c.is_one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{chi_p, Conductor, EulerBackend, SquareTableBackend};
    use crate::field_poly::Fq;

    fn f5() -> Fq {
        Fq::new(5).unwrap()
    }

    fn character(ring: &Fq, p: MonicPoly) -> QuadraticCharacter {
        let c = Conductor::new(ring, p).unwrap();
        QuadraticCharacter::new(ring, c, &SquareTableBackend::default()).unwrap()
    }

    fn ints(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&x| x.into()).collect()
    }

    #[test]
    fn c1_for_t3_t_1_matches_five_term_sum() {
        let r = f5();
        let p = r.monic(&[1, 1, 0, 1]).unwrap();
        let conductor = Conductor::new(&r, p.clone()).unwrap();
        let by_hand: i64 = (0..5)
            .map(|a| chi_p(&r, &r.poly(&[a, 1]), &conductor) as i64)
            .sum();
        let l = l_coefficients(&character(&r, p));
        assert_eq!(l.coeffs()[0], BigInt::one());
        assert_eq!(l.coeffs()[1], BigInt::from(by_hand));
        assert_eq!(l.coeffs()[2], BigInt::from(5));
    }

    #[test]
    fn top_coefficient_is_q_to_the_genus_for_all_cubics() {
        let r = f5();
        for p in r.enumerate_irreducibles(3).unwrap() {
            let l = l_coefficients(&character(&r, p));
            assert_eq!(l.coeffs()[2], BigInt::from(5));
            assert!(l.is_normalized());
            assert!(l.trivial_bound_holds());
            assert!(l.weil_ratio() <= 1.0);
        }
    }

    #[test]
    fn defect_detects_perturbation() {
        let r = f5();
        // at g = 1 the middle coefficient c_1 pairs with itself, so the
        // sensitivity check needs g >= 2
        let cubic = l_coefficients(&character(&r, r.monic(&[1, 1, 0, 1]).unwrap()));
        assert_eq!(functional_equation_defect(&cubic), BigUint::zero());
        assert_eq!(
            functional_equation_defect(&cubic.perturbed(1, 1)),
            BigUint::zero()
        );
        assert!(functional_equation_defect(&cubic.perturbed(0, 1)) > BigUint::zero());
        let quintic = r.enumerate_irreducibles(5).unwrap().next().unwrap();
        let l = l_coefficients(&character(&r, quintic));
        assert_eq!(functional_equation_defect(&l), BigUint::zero());
        assert!(functional_equation_defect(&l.perturbed(1, 1)) > BigUint::zero());
    }

    #[test]
    fn central_value_examples() {
        let p = f5().monic(&[1, 1, 0, 1]).unwrap();
        let l = LPolynomial::from_coeffs(5, p.clone(), ints(&[1, 0, 5])).unwrap();
        let v = central_value(&l);
        assert_eq!(v, QSqrt::from_integer(5, 2));
        for c1 in -4..=4 {
            let l = LPolynomial::from_coeffs(5, p.clone(), ints(&[1, c1, 5])).unwrap();
            let v = central_value(&l);
            let expect = 2.0 + c1 as f64 / 5f64.sqrt();
            assert!((v.to_f64() - expect).abs() < 1e-12);
            assert_eq!(v.b(), &BigRational::from_integer(c1.into()));
        }
    }

    #[test]
    fn zeros_of_explicit_quadratic() {
        let p = f5().monic(&[1, 1, 0, 1]).unwrap();
        let l = LPolynomial::from_coeffs(5, p, ints(&[1, 0, 5])).unwrap();
        let z = l_zeros(&l, DEFAULT_RH_TOLERANCE).unwrap();
        assert_eq!(z.roots.len(), 2);
        assert!(z.within_tolerance());
        for root in &z.roots {
            assert!(evaluate(&l, *root).norm() < 1e-12);
        }
    }

    #[test]
    fn afe_for_linear_conductor_is_one() {
        let r = f5();
        for p in r.enumerate_irreducibles(1).unwrap() {
            let chi = character(&r, p);
            assert_eq!(afe_value(&chi), QSqrt::one(5));
            assert_eq!(central_value(&l_coefficients(&chi)), QSqrt::one(5));
            assert!(l_zeros(&l_coefficients(&chi), 1e-9).is_err());
        }
    }

    #[test]
    fn afe_matches_central_value_with_euler_backend() {
        let r = f5();
        for p in r.enumerate_irreducibles(3).unwrap() {
            let c = Conductor::new(&r, p).unwrap();
            let chi = QuadraticCharacter::new(&r, c, &EulerBackend).unwrap();
            let l = l_coefficients(&chi);
            assert_eq!(afe_value(&chi), central_value(&l));
            assert_ne!(central_value(&l).signum(), std::cmp::Ordering::Less);
        }
    }

    #[test]
    fn rejects_wrong_shapes() {
        let r = f5();
        let even = r.monic(&[2, 0, 1]).unwrap();
        assert!(LPolynomial::from_coeffs(5, even, ints(&[1, 0, 5])).is_err());
        let p = r.monic(&[1, 1, 0, 1]).unwrap();
        assert!(LPolynomial::from_coeffs(5, p, ints(&[1, 0])).is_err());
    }
}
