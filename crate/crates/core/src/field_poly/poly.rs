use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

/// Polynomial over a prime field, coefficients in ascending degree order.
///
/// Coefficients are stored already reduced into `[0, q)`; trailing zeros are
/// trimmed so the zero polynomial is the empty vector. The field size lives in
/// [`Fq`](super::Fq), not in the polynomial.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<u32>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![1] }
    }

    /// `T`
    pub fn t() -> Self {
        Poly { coeffs: vec![0, 1] }
    }

    /// Builds a polynomial from coefficients that are already in `[0, q)`.
    pub fn from_reduced(mut coeffs: Vec<u32>) -> Self {
        trim(&mut coeffs);
        Poly { coeffs }
    }

    pub fn constant(c: u32) -> Self {
        Self::from_reduced(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<u32> {
        self.coeffs.last().copied()
    }

    pub fn into_coeffs(self) -> Vec<u32> {
        self.coeffs
    }

    /// Comma-separated ascending coefficients, `"0"` for zero.
    pub fn canonical(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        join(&self.coeffs)
    }

    /// Human-readable form such as `T^3+2T+1`.
    pub fn pretty(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".to_string();
        }
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coeff = if c == 1 && i > 0 {
                String::new()
            } else {
                c.to_string()
            };
            let term = match i {
                0 => coeff,
                1 => format!("{coeff}T"),
                _ => format!("{coeff}T^{i}"),
            };
            terms.push(term);
        }
        terms.join("+")
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self.pretty())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

/// A monic polynomial, an element of `A+`.
///
/// Ordering is by degree, then by coefficients read from the top down, which
/// is the same order [`Fq::enumerate_monic`](super::Fq::enumerate_monic)
/// produces.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MonicPoly(Poly);

impl MonicPoly {
    pub fn one() -> Self {
        MonicPoly(Poly::one())
    }

    pub fn t() -> Self {
        MonicPoly(Poly::t())
    }

    /// Wraps `p` if its leading coefficient is 1.
    pub fn new(p: Poly) -> Result<Self> {
        match p.leading() {
            Some(1) => Ok(MonicPoly(p)),
            _ => Err(Error::Parse {
                text: p.canonical(),
                reason: "polynomial is not monic".into(),
            }),
        }
    }

    pub(crate) fn new_unchecked(p: Poly) -> Self {
        debug_assert_eq!(p.leading(), Some(1));
        MonicPoly(p)
    }

    pub fn degree(&self) -> usize {
        self.0.coeffs.len() - 1
    }

    pub fn as_poly(&self) -> &Poly {
        &self.0
    }

    pub fn into_poly(self) -> Poly {
        self.0
    }
}

impl Deref for MonicPoly {
    type Target = Poly;

    fn deref(&self) -> &Poly {
        &self.0
    }
}

impl Ord for MonicPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.coeffs.iter().rev().cmp(other.0.coeffs.iter().rev()))
    }
}

impl PartialOrd for MonicPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MonicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonicPoly({})", self.0.pretty())
    }
}

/// Displays the canonical comma form, e.g. `1,1,0,1` for `T^3+T+1`.
impl fmt::Display for MonicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.canonical())
    }
}

fn trim(coeffs: &mut Vec<u32>) {
    while coeffs.last() == Some(&0) {
        coeffs.pop();
    }
}

fn join(coeffs: &[u32]) -> String {
    let mut s = String::with_capacity(coeffs.len() * 2);
    for (i, c) in coeffs.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&c.to_string());
    }
    s
}

/// Parses either the comma form (`1,1,0,1`) or the pretty form (`T^3+T+1`).
///
/// Coefficients must lie in `[0, q)` in the comma form; the pretty form also
/// accepts `-` between terms and reduces mod `q`.
pub(crate) fn parse_poly(text: &str, q: u32) -> Result<Poly> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let err = |reason: &str| Error::Parse {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    if s.is_empty() {
        return Err(err("empty input"));
    }
    if s.contains('T') || s.contains('t') || s.contains('x') {
        return parse_pretty(&s, q).map_err(|r| err(&r));
    }
    let mut coeffs = Vec::new();
    for part in s.split(',') {
        let c: u64 = part
            .parse()
            .map_err(|_| err(&format!("bad coefficient {part:?}")))?;
        if c >= q as u64 {
            return Err(err(&format!("coefficient {c} not in [0, {q})")));
        }
        coeffs.push(c as u32);
    }
    Ok(Poly::from_reduced(coeffs))
}

fn parse_pretty(s: &str, q: u32) -> std::result::Result<Poly, String> {
    let q64 = q as i64;
    let mut acc: Vec<i64> = Vec::new();
    let mut rest = s;
    let mut first = true;
    while !rest.is_empty() {
        let mut sign = 1i64;
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        } else if let Some(r) = rest.strip_prefix('-') {
            rest = r;
            sign = -1;
        } else if !first {
            return Err(format!("expected '+' or '-' before {rest:?}"));
        }
        first = false;
        let end = rest[1.min(rest.len())..]
            .find(['+', '-'])
            .map(|i| i + 1)
            .unwrap_or(rest.len());
        let (term, tail) = rest.split_at(end);
        rest = tail;
        let (coeff, exp) = parse_term(term)?;
        if acc.len() <= exp {
            acc.resize(exp + 1, 0);
        }
        acc[exp] = (acc[exp] + sign * coeff).rem_euclid(q64);
    }
    Ok(Poly::from_reduced(
        acc.into_iter().map(|c| c as u32).collect(),
    ))
}

fn parse_term(term: &str) -> std::result::Result<(i64, usize), String> {
    let var = term.find(['T', 't', 'x']);
    let Some(pos) = var else {
        let c = term.parse().map_err(|_| format!("bad term {term:?}"))?;
        return Ok((c, 0));
    };
    let coeff_str = term[..pos].trim_end_matches('*');
    let coeff = if coeff_str.is_empty() {
        1
    } else {
        coeff_str
            .parse()
            .map_err(|_| format!("bad coefficient in {term:?}"))?
    };
    let after = &term[pos + 1..];
    let exp = if after.is_empty() {
        1
    } else if let Some(e) = after.strip_prefix('^') {
        e.parse().map_err(|_| format!("bad exponent in {term:?}"))?
    } else {
        return Err(format!("unexpected {after:?} in {term:?}"));
    };
    Ok((coeff, exp))
}
