use super::{Fq, MonicPoly};
use crate::error::{Error, Result};

/// Complete factorization of a monic polynomial into monic irreducibles,
/// bases in increasing order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(MonicPoly, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(MonicPoly, u32)] {
        &self.factors
    }

    pub fn exponents(&self) -> impl Iterator<Item = u32> + '_ {
        self.factors.iter().map(|(_, e)| *e)
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn multiply(&self, ring: &Fq) -> MonicPoly {
        let mut acc = MonicPoly::one();
        for (base, e) in &self.factors {
            for _ in 0..*e {
                acc = ring.monic_mul(&acc, base);
            }
        }
        acc
    }

    pub fn is_square(&self) -> bool {
        self.exponents().all(|e| e % 2 == 0)
    }

    /// `(r, h)` with `f = r·h²` and `r` squarefree.
    pub fn square_part(&self, ring: &Fq) -> (MonicPoly, MonicPoly) {
        let mut r = MonicPoly::one();
        let mut h = MonicPoly::one();
        for (base, e) in &self.factors {
            if e % 2 == 1 {
                r = ring.monic_mul(&r, base);
            }
            for _ in 0..e / 2 {
                h = ring.monic_mul(&h, base);
            }
        }
        (r, h)
    }
}

/// Trial-division factorizer with a precomputed table of small irreducibles.
///
/// Built once for a maximum input degree and then shared; `factor` takes
/// `&self` so one instance serves many workers.
#[derive(Clone, Debug)]
pub struct Factorizer {
    ring: Fq,
    // irreducibles[d] = monic irreducibles of degree d, d <= max_degree / 2
    irreducibles: Vec<Vec<MonicPoly>>,
}

impl Factorizer {
    pub fn new(ring: Fq, max_degree: usize) -> Self {
        let half = max_degree / 2;
        let mut irreducibles = vec![Vec::new(); half + 1];
        for (d, slot) in irreducibles.iter_mut().enumerate().skip(1) {
            *slot = ring
                .enumerate_irreducibles(d)
                .expect("degree >= 1")
                .collect();
        }
        Factorizer { ring, irreducibles }
    }

    pub fn ring(&self) -> &Fq {
        &self.ring
    }

    pub fn factor(&self, f: &MonicPoly) -> Factorization {
        let ring = &self.ring;
        let mut rest = f.clone();
        let mut factors = Vec::new();
        let mut d = 1;
        while 2 * d <= rest.degree() {
            let extra;
            let bases: &[MonicPoly] = match self.irreducibles.get(d) {
                Some(v) => v,
                None => {
                    extra = ring
                        .enumerate_irreducibles(d)
                        .expect("degree >= 1")
                        .collect::<Vec<_>>();
                    &extra
                }
            };
            for g in bases {
                if 2 * d > rest.degree() {
                    break;
                }
                let mut e = 0;
                loop {
                    let (quot, rem) = ring.poly_divmod(&rest, g).expect("monic divisor");
                    if !rem.is_zero() {
                        break;
                    }
                    rest = MonicPoly::new_unchecked(quot);
                    e += 1;
                }
                if e > 0 {
                    factors.push((g.clone(), e));
                }
            }
            d += 1;
        }
        if rest.degree() > 0 {
            factors.push((rest, 1));
        }
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        Factorization { factors }
    }
}

impl Fq {
    pub fn factor(&self, f: &MonicPoly) -> Factorization {
        Factorizer::new(*self, f.degree()).factor(f)
    }

    /// Factors an arbitrary polynomial after stripping its leading coefficient.
    pub fn factor_poly(&self, f: &super::Poly) -> Result<(u32, Factorization)> {
        let (lead, monic) = self.make_monic(f).ok_or(Error::ZeroPolynomial)?;
        Ok((lead, self.factor(&monic)))
    }

    /// `f = r·h²` with `r` squarefree.
    pub fn square_part_decompose(&self, f: &MonicPoly) -> (MonicPoly, MonicPoly) {
        self.factor(f).square_part(self)
    }

    pub fn is_perfect_square(&self, f: &MonicPoly) -> bool {
        self.factor(f).is_square()
    }
}
