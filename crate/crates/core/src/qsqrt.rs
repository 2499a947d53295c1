//! Exact arithmetic in `Q(√q)`, in the basis `{1, q^{-1/2}}`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `a + b·q^{-1/2}` with rational `a`, `b`.
///
/// `q` is prime, so `√q` is irrational and the pair `(a, b)` is unique.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QSqrt {
    q: u32,
    a: BigRational,
    b: BigRational,
}

impl QSqrt {
    pub fn new(q: u32, a: BigRational, b: BigRational) -> Self {
        QSqrt { q, a, b }
    }

    pub fn zero(q: u32) -> Self {
        QSqrt::new(q, BigRational::zero(), BigRational::zero())
    }

    pub fn one(q: u32) -> Self {
        Self::from_rational(q, BigRational::one())
    }

    pub fn from_rational(q: u32, a: BigRational) -> Self {
        QSqrt::new(q, a, BigRational::zero())
    }

    pub fn from_integer(q: u32, a: impl Into<BigInt>) -> Self {
        Self::from_rational(q, BigRational::from_integer(a.into()))
    }

    /// `q^{-n/2}`.
    pub fn inv_sqrt_q_pow(q: u32, n: usize) -> Self {
        let den = |e: usize| BigRational::new(BigInt::one(), BigInt::from(q).pow(e as u32));
        if n.is_multiple_of(2) {
            QSqrt::new(q, den(n / 2), BigRational::zero())
        } else {
            QSqrt::new(q, BigRational::zero(), den((n - 1) / 2))
        }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Rational part.
    pub fn a(&self) -> &BigRational {
        &self.a
    }

    /// Coefficient of `q^{-1/2}`.
    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Exact sign of the represented real number.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&BigRational::zero());
        let sb = self.b.cmp(&BigRational::zero());
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // opposite signs: compare |a| with |b|/√q via q·a² against b²
        let lhs = &self.a * &self.a * BigRational::from_integer(self.q.into());
        let rhs = &self.b * &self.b;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    /// Exact comparison of the represented reals.
    pub fn cmp_value(&self, other: &QSqrt) -> Ordering {
        (self - other).signum()
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b / (self.q as f64).sqrt()
    }

    pub fn scale(&self, c: &BigRational) -> QSqrt {
        QSqrt::new(self.q, &self.a * c, &self.b * c)
    }

    /// `self^k` by binomial expansion:
    /// `Σ_j C(k,j) a^{k-j} b^j q^{-j/2}`.
    pub fn pow(&self, k: u32) -> QSqrt {
        let q = BigInt::from(self.q);
        let mut even = BigRational::zero();
        let mut odd = BigRational::zero();
        let mut binom = BigInt::one();
        for j in 0..=k {
            if j > 0 {
                binom = binom * BigInt::from(k - j + 1) / BigInt::from(j);
            }
            let mut term = pow_rational(&self.a, k - j) * pow_rational(&self.b, j);
            term *= BigRational::from_integer(binom.clone());
            let qpow = BigRational::from_integer(q.pow(j / 2));
            if j % 2 == 0 {
                even += term / qpow;
            } else {
                odd += term / qpow;
            }
        }
        QSqrt::new(self.q, even, odd)
    }

    fn check_field(&self, other: &QSqrt) {
        assert_eq!(self.q, other.q, "mixing Q(√q) values with different q");
    }
}

fn pow_rational(x: &BigRational, e: u32) -> BigRational {
    if e == 0 {
        return BigRational::one();
    }
    if x.is_zero() {
        return BigRational::zero();
    }
    BigRational::new_raw(x.numer().pow(e), x.denom().pow(e))
}

impl fmt::Debug for QSqrt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QSqrt({} + {}·{}^(-1/2))", self.a, self.b, self.q)
    }
}

impl fmt::Display for QSqrt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let sign = if self.b.is_negative() { '-' } else { '+' };
        write!(f, "{} {} {}/√{}", self.a, sign, self.b.abs(), self.q)
    }
}

impl<'a> Add<&'a QSqrt> for &'a QSqrt {
    type Output = QSqrt;

    fn add(self, rhs: &QSqrt) -> QSqrt {
        self.check_field(rhs);
        QSqrt::new(self.q, &self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl Add for QSqrt {
    type Output = QSqrt;

    fn add(self, rhs: QSqrt) -> QSqrt {
        &self + &rhs
    }
}

impl AddAssign<&QSqrt> for QSqrt {
    fn add_assign(&mut self, rhs: &QSqrt) {
        self.check_field(rhs);
        self.a += &rhs.a;
        self.b += &rhs.b;
    }
}

impl<'a> Sub<&'a QSqrt> for &'a QSqrt {
    type Output = QSqrt;

    fn sub(self, rhs: &QSqrt) -> QSqrt {
        self.check_field(rhs);
        QSqrt::new(self.q, &self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl Sub for QSqrt {
    type Output = QSqrt;

    fn sub(self, rhs: QSqrt) -> QSqrt {
        &self - &rhs
    }
}

impl<'a> Mul<&'a QSqrt> for &'a QSqrt {
    type Output = QSqrt;

    fn mul(self, rhs: &QSqrt) -> QSqrt {
        self.check_field(rhs);
        let q = BigRational::from_integer(self.q.into());
        let a = &self.a * &rhs.a + &self.b * &rhs.b / q;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        QSqrt::new(self.q, a, b)
    }
}

impl Mul for QSqrt {
    type Output = QSqrt;

    fn mul(self, rhs: QSqrt) -> QSqrt {
        &self * &rhs
    }
}

impl Neg for QSqrt {
    type Output = QSqrt;

    fn neg(self) -> QSqrt {
        QSqrt::new(self.q, -self.a, -self.b)
    }
}

/// Sum in `Q(√q)`; zero for an empty iterator.
pub fn sum_in(q: u32, iter: impl IntoIterator<Item = QSqrt>) -> QSqrt {
    iter.into_iter().fold(QSqrt::zero(q), |mut acc, x| {
        acc += &x;
        acc
    })
}
