//! The quadratic character `χ_P` attached to a monic irreducible `P`.
//!
//! `χ_P(f)` is evaluated residue-side, as the Euler symbol of `f mod P`.
//! Because `q ≡ 1 (mod 4)`, quadratic reciprocity in `F_q[T]` carries no
//! sign for monic arguments, so this equals the symbol `(P/f)`; the
//! reciprocity tests below check that rather than assume it.

use std::ops::Deref;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::field_poly::{Fq, MonicPoly, Poly};
use crate::strategy::SymbolBackend;

/// Default cap on residue-table size.
pub const DEFAULT_TABLE_BUDGET: u64 = 100_000_000;

/// A monic irreducible polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Prime(MonicPoly);

impl Prime {
    pub fn new(ring: &Fq, p: MonicPoly) -> Result<Self> {
        if p.degree() == 0 || !ring.is_irreducible(&p)? {
            return Err(Error::Reducible(p.pretty()));
        }
        Ok(Prime(p))
    }

    /// For polynomials already known to be irreducible (e.g. from
    /// [`Fq::enumerate_irreducibles`]).
    pub fn new_unchecked(p: MonicPoly) -> Self {
        Prime(p)
    }

    pub fn poly(&self) -> &MonicPoly {
        &self.0
    }
}

impl Deref for Prime {
    type Target = MonicPoly;

    fn deref(&self) -> &MonicPoly {
        &self.0
    }
}

/// A prime of odd degree `2g + 1`: a valid conductor for `χ_P`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Conductor(Prime);

impl Conductor {
    pub fn new(ring: &Fq, p: MonicPoly) -> Result<Self> {
        Self::from_prime(Prime::new(ring, p)?)
    }

    pub fn from_prime(p: Prime) -> Result<Self> {
        if p.degree().is_multiple_of(2) {
            return Err(Error::EvenDegree(p.pretty()));
        }
        Ok(Conductor(p))
    }

    /// `g` with `deg P = 2g + 1`.
    pub fn genus(&self) -> usize {
        (self.degree() - 1) / 2
    }

    pub fn prime(&self) -> &Prime {
        &self.0
    }
}

impl Deref for Conductor {
    type Target = Prime;

    fn deref(&self) -> &Prime {
        &self.0
    }
}

fn sign_of_power(v: &Poly, q: u32) -> i8 {
    match v.coeffs() {
        [1] => 1,
        [c] if *c == q - 1 => -1,
        _ => unreachable!("Euler criterion gave a non-unit; modulus is not irreducible"),
    }
}

/// Euler-criterion symbol: 0 if `P | f`, else `f^{(|P|-1)/2} mod P` as ±1.
pub fn euler_symbol(ring: &Fq, f: &Poly, p: &Prime) -> i8 {
    let r = ring.poly_rem(f, p).expect("prime has degree >= 1");
    if r.is_zero() {
        return 0;
    }
    let e = (ring.q_pow(p.degree()) - 1u32) / 2u32;
    let v = ring.poly_pow_mod(&r, &e, p).expect("prime has degree >= 1");
    sign_of_power(&v, ring.q())
}

/// `χ_P(f)`.
pub fn chi_p(ring: &Fq, f: &Poly, p: &Conductor) -> i8 {
    euler_symbol(ring, f, p)
}

/// Jacobi symbol `(f/g)` for monic nonconstant `g`, by a Euclid-style
/// reciprocity ladder.
pub fn jacobi_symbol(ring: &Fq, f: &Poly, g: &MonicPoly) -> Result<i8> {
    if g.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let mut sign = 1i8;
    let mut top = f.clone();
    let mut modulus: MonicPoly = g.clone();
    loop {
        if modulus.degree() == 0 {
            return Ok(sign);
        }
        let r = ring.poly_rem(&top, &modulus)?;
        let Some((lead, monic)) = ring.make_monic(&r) else {
            return Ok(0);
        };
        // (c/g) = legendre(c)^{deg g} for a constant c
        if modulus.degree() % 2 == 1 && ring.legendre(lead) == -1 {
            sign = -sign;
        }
        // (monic/modulus) = (modulus/monic): no sign since q ≡ 1 mod 4
        top = modulus.into_poly();
        modulus = monic;
    }
}

/// Jacobi symbol by factoring `g` and multiplying Euler symbols.
pub fn jacobi_symbol_factored(ring: &Fq, f: &Poly, g: &MonicPoly) -> Result<i8> {
    if g.degree() == 0 {
        return Err(Error::ConstantPolynomial);
    }
    let mut acc = 1i8;
    for (base, e) in ring.factor(g).factors() {
        let s = euler_symbol(ring, f, &Prime::new_unchecked(base.clone()));
        acc *= s.pow(*e);
    }
    Ok(acc)
}

/// `χ` on every residue modulo a prime, indexed by
/// [`Fq::residue_index`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueTable {
    modulus: MonicPoly,
    q: u32,
    signs: Vec<i8>,
}

impl ResidueTable {
    pub fn from_signs(ring: &Fq, modulus: &Prime, signs: Vec<i8>) -> Result<Self> {
        let size = ring.count_monic(modulus.degree());
        if signs.len() as u64 != size {
            return Err(Error::Internal(format!(
                "residue table has {} entries, expected {size}",
                signs.len()
            )));
        }
        Ok(ResidueTable {
            modulus: modulus.poly().clone(),
            q: ring.q(),
            signs,
        })
    }

    pub fn modulus(&self) -> &MonicPoly {
        &self.modulus
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    #[inline]
    pub fn get(&self, index: u64) -> i8 {
        self.signs[index as usize]
    }

    /// `χ(f)` for any polynomial, reducing mod the modulus first when needed.
    pub fn value(&self, ring: &Fq, f: &Poly) -> i8 {
        let reduced;
        let r = if f.degree().is_none_or(|d| d < self.modulus.degree()) {
            f
        } else {
            reduced = ring.poly_rem(f, &self.modulus).expect("modulus nonzero");
            &reduced
        };
        self.get(ring.residue_index(r))
    }

    /// `Σ_{f ∈ A+_d} χ(f)`.
    ///
    /// For `d < deg P` the monic degree-`d` residues occupy the index block
    /// `[q^d, 2q^d)`, so this is a contiguous slice sum.
    pub fn degree_sum(&self, ring: &Fq, d: usize) -> i64 {
        if d < self.modulus.degree() {
            let lo = (self.q as usize).pow(d as u32);
            return self.signs[lo..2 * lo].iter().map(|&s| s as i64).sum();
        }
        ring.enumerate_monic(d)
            .map(|f| self.value(ring, &f) as i64)
            .sum()
    }

    pub fn count(&self, sign: i8) -> usize {
        self.signs.iter().filter(|&&s| s == sign).count()
    }
}

/// Builds the table by squaring every nonzero residue once (up to sign).
pub fn build_residue_table(ring: &Fq, p: &Prime, budget: u64) -> Result<ResidueTable> {
    let d = p.degree();
    let size = (ring.q() as u128).pow(d as u32);
    if size > budget as u128 {
        return Err(Error::BudgetExceeded {
            what: "residue table",
            needed: size,
            budget: budget as u128,
        });
    }
    let size = size as usize;
    let q = ring.q() as u64;
    // -P_j mod q for the non-leading coefficients
    let neg_p: Vec<u64> = p.coeffs()[..d]
        .iter()
        .map(|&c| (q - c as u64) % q)
        .collect();
    let mut signs = vec![-1i8; size];
    signs[0] = 0;
    let mut digits = vec![0u64; d];
    let mut buf = vec![0u64; 2 * d];
    let half = (q - 1) / 2;
    // r and -r square to the same residue: walk only residues whose leading
    // coefficient lies in 1..=(q-1)/2.
    for e in 0..d {
        let low_count = q.pow(e as u32);
        for lead in 1..=half {
            digits[..e].iter_mut().for_each(|x| *x = 0);
            digits[e] = lead;
            for step in 0..low_count {
                if step > 0 {
                    // odometer over the e low digits
                    let mut i = 0;
                    loop {
                        digits[i] += 1;
                        if digits[i] < q {
                            break;
                        }
                        digits[i] = 0;
                        i += 1;
                    }
                }
                let idx = square_mod_index(&digits[..=e], &neg_p, &mut buf, q);
                signs[idx] = 1;
            }
        }
    }
    ResidueTable::from_signs(ring, p, signs)
}

#[inline]
fn square_mod_index(r: &[u64], neg_p: &[u64], buf: &mut [u64], q: u64) -> usize {
    let d = neg_p.len();
    let len = 2 * r.len() - 1;
    buf[..len].iter_mut().for_each(|x| *x = 0);
    for (i, &a) in r.iter().enumerate() {
        if a == 0 {
            continue;
        }
        buf[2 * i] += a * a;
        let a2 = 2 * a;
        for (j, &b) in r.iter().enumerate().skip(i + 1) {
            buf[i + j] += a2 * b;
        }
    }
    // entries stay below (2d + d)·q² < 2^40 for supported q and degrees
    for k in (d..len).rev() {
        let c = buf[k] % q;
        if c == 0 {
            continue;
        }
        let base = k - d;
        for (j, &np) in neg_p.iter().enumerate() {
            buf[base + j] += c * np;
        }
    }
    let mut idx = 0u64;
    for k in (0..d.min(len)).rev() {
        idx = idx * q + buf[k] % q;
    }
    idx as usize
}

/// Residue table by squaring (the default backend).
#[derive(Clone, Copy, Debug)]
pub struct SquareTableBackend {
    pub budget: u64,
}

impl Default for SquareTableBackend {
    fn default() -> Self {
        SquareTableBackend {
            budget: DEFAULT_TABLE_BUDGET,
        }
    }
}

impl SymbolBackend for SquareTableBackend {
    fn name(&self) -> &'static str {
        "square-table"
    }

    fn residue_table(&self, ring: &Fq, modulus: &Prime) -> Result<ResidueTable> {
        build_residue_table(ring, modulus, self.budget)
    }
}

/// One Euler-criterion exponentiation per residue.
#[derive(Clone, Copy, Debug, Default)]
pub struct EulerBackend;

impl SymbolBackend for EulerBackend {
    fn name(&self) -> &'static str {
        "euler"
    }

    fn residue_table(&self, ring: &Fq, modulus: &Prime) -> Result<ResidueTable> {
        let size = checked_size(ring, modulus)?;
        let e: BigUint = (ring.q_pow(modulus.degree()) - 1u32) / 2u32;
        let signs = (0..size)
            .map(|i| {
                let r = ring.poly_from_index(i);
                if r.is_zero() {
                    return 0;
                }
                let v = ring.poly_pow_mod(&r, &e, modulus).expect("degree >= 1");
                sign_of_power(&v, ring.q())
            })
            .collect();
        ResidueTable::from_signs(ring, modulus, signs)
    }
}

/// One reciprocity-ladder Jacobi evaluation per residue.
#[derive(Clone, Copy, Debug, Default)]
pub struct ReciprocityBackend;

impl SymbolBackend for ReciprocityBackend {
    fn name(&self) -> &'static str {
        "reciprocity"
    }

    fn residue_table(&self, ring: &Fq, modulus: &Prime) -> Result<ResidueTable> {
        let size = checked_size(ring, modulus)?;
        let signs = (0..size)
            .map(|i| jacobi_symbol(ring, &ring.poly_from_index(i), modulus))
            .collect::<Result<Vec<_>>>()?;
        ResidueTable::from_signs(ring, modulus, signs)
    }
}

fn checked_size(ring: &Fq, p: &Prime) -> Result<u64> {
    let size = (ring.q() as u128).pow(p.degree() as u32);
    if size > DEFAULT_TABLE_BUDGET as u128 {
        return Err(Error::BudgetExceeded {
            what: "residue table",
            needed: size,
            budget: DEFAULT_TABLE_BUDGET as u128,
        });
    }
    Ok(size as u64)
}

/// `χ_P` with a prebuilt residue table for bulk evaluation.
#[derive(Clone, Debug)]
pub struct QuadraticCharacter {
    ring: Fq,
    conductor: Conductor,
    table: ResidueTable,
}

impl QuadraticCharacter {
    pub fn new(ring: &Fq, conductor: Conductor, backend: &dyn SymbolBackend) -> Result<Self> {
        let table = backend.residue_table(ring, &conductor)?;
        Ok(QuadraticCharacter {
            ring: *ring,
            conductor,
            table,
        })
    }

    pub fn ring(&self) -> &Fq {
        &self.ring
    }

    pub fn conductor(&self) -> &Conductor {
        &self.conductor
    }

    pub fn table(&self) -> &ResidueTable {
        &self.table
    }

    pub fn value(&self, f: &Poly) -> i8 {
        self.table.value(&self.ring, f)
    }

    /// `Σ_{f ∈ A+_d} χ_P(f)`.
    pub fn degree_sum(&self, d: usize) -> i64 {
        self.table.degree_sum(&self.ring, d)
    }
}
