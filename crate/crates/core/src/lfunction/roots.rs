//! Roots of integer polynomials: exact squarefree splitting over `Q`
//! followed by Aberth–Ehrlich iteration on each squarefree factor.
//!
//! Splitting first keeps repeated roots from costing half the working
//! precision.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

type QPoly = Vec<BigRational>;

const MAX_ITERATIONS: usize = 1000;

fn trim(p: &mut QPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn derivative(p: &QPoly) -> QPoly {
    let mut d: QPoly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect();
    trim(&mut d);
    d
}

fn divmod(f: &QPoly, g: &QPoly) -> (QPoly, QPoly) {
    let dg = g.len() - 1;
    if f.len() < g.len() {
        return (Vec::new(), f.clone());
    }
    let lead = g[dg].clone();
    let mut rem = f.clone();
    let mut quot = vec![BigRational::zero(); f.len() - dg];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + dg] / &lead;
        if !c.is_zero() {
            for (j, gj) in g.iter().enumerate() {
                rem[i + j] -= &c * gj;
            }
        }
        quot[i] = c;
    }
    rem.truncate(dg);
    trim(&mut rem);
    trim(&mut quot);
    (quot, rem)
}

fn monic(mut p: QPoly) -> QPoly {
    if let Some(lead) = p.last().cloned() {
        p.iter_mut().for_each(|c| *c /= &lead);
    }
    p
}

fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let (_, r) = divmod(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

fn sub(a: &QPoly, b: &QPoly) -> QPoly {
    let n = a.len().max(b.len());
    let zero = BigRational::zero();
    let mut out: QPoly = (0..n)
        .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
        .collect();
    trim(&mut out);
    out
}

/// Yun's squarefree factorization: `p = lead · Π s_i^i`. Returns the
/// nonconstant `(s_i, i)`.
fn squarefree_factors(p: &QPoly) -> Vec<(QPoly, usize)> {
    let mut out = Vec::new();
    let dp = derivative(p);
    if dp.is_empty() {
        return out;
    }
    let a0 = gcd(p, &dp);
    let mut b = divmod(p, &a0).0;
    let c = divmod(&dp, &a0).0;
    let mut d = sub(&c, &derivative(&b));
    let mut i = 1;
    while b.len() > 1 {
        let a = gcd(&b, &d);
        if a.len() > 1 {
            out.push((a.clone(), i));
        }
        let next_b = divmod(&b, &a).0;
        let next_c = divmod(&d, &a).0;
        d = sub(&next_c, &derivative(&next_b));
        b = next_b;
        i += 1;
    }
    out
}

fn horner(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        dv = dv * z + v;
        v = v * z + c;
    }
    (v, dv)
}

/// All roots of `p` (ascending complex coefficients, nonzero leading term).
fn aberth(p: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = p.len() - 1;
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![-p[0] / p[1]]),
        _ => {}
    }
    let radius = (p[0] / p[n]).norm().powf(1.0 / n as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    for _ in 0..MAX_ITERATIONS {
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let (v, dv) = horner(p, z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let w = v / dv;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = w / (Complex64::new(1.0, 0.0) - w * repulsion);
            z[k] -= step;
            worst = worst.max(step.norm() / z[k].norm().max(1.0));
        }
        if worst < 1e-14 {
            return Ok(polish(p, z));
        }
    }
    Err(Error::RootFinding {
        iterations: MAX_ITERATIONS,
    })
}

fn polish(p: &[Complex64], mut z: Vec<Complex64>) -> Vec<Complex64> {
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (v, dv) = horner(p, *r);
            if dv.norm() == 0.0 {
                break;
            }
            *r -= v / dv;
        }
    }
    z
}

/// Roots in `u` of `Σ c_n u^n`, with multiplicity, computed in the scaled
/// variable `v = u·√scale` so that roots of modulus `scale^{-1/2}` sit on
/// the unit circle.
pub(crate) fn integer_poly_roots(coeffs: &[BigInt], scale: f64) -> Result<Vec<Complex64>> {
    let mut p: QPoly = coeffs
        .iter()
        .cloned()
        .map(BigRational::from_integer)
        .collect();
    trim(&mut p);
    if p.len() <= 1 {
        return Ok(Vec::new());
    }
    let sqrt_scale = scale.sqrt();
    let mut roots = Vec::with_capacity(p.len() - 1);
    for (factor, mult) in squarefree_factors(&p) {
        // coefficient n of the v-polynomial is s_n · scale^{-n/2}
        let scaled: Vec<Complex64> = factor
            .iter()
            .enumerate()
            .map(|(n, c)| {
                let x = c.to_f64().unwrap_or(f64::NAN) / sqrt_scale.powi(n as i32);
                Complex64::new(x, 0.0)
            })
            .collect();
        for v in aberth(&scaled)? {
            let u = v / sqrt_scale;
            roots.extend(std::iter::repeat_n(u, mult));
        }
    }
    if roots.len() != p.len() - 1 {
        return Err(Error::Internal(format!(
            "found {} roots for a degree-{} polynomial",
            roots.len(),
            p.len() - 1
        )));
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn quadratic_on_circle() {
        // 1 + 5u^2: roots ±i/√5
        let roots = integer_poly_roots(&ints(&[1, 0, 5]), 5.0).unwrap();
        assert_eq!(roots.len(), 2);
        for r in roots {
            assert!((r.norm() - 5f64.sqrt().recip()).abs() < 1e-15);
            assert!(r.re.abs() < 1e-15);
        }
    }

    #[test]
    fn repeated_roots_stay_accurate() {
        // (1 + u + 5u^2)^2 = 1 + 2u + 11u^2 + 10u^3 + 25u^4
        let roots = integer_poly_roots(&ints(&[1, 2, 11, 10, 25]), 5.0).unwrap();
        assert_eq!(roots.len(), 4);
        for r in roots {
            assert!((r.norm() - 5f64.sqrt().recip()).abs() < 1e-14, "{r}");
        }
        // (1 - u)^3
        let roots = integer_poly_roots(&ints(&[1, -3, 3, -1]), 1.0).unwrap();
        assert!(roots.iter().all(|r| (r - 1.0).norm() < 1e-14));
    }

    #[test]
    fn squarefree_split_multiplicities() {
        let p: QPoly = ints(&[1, -3, 3, -1])
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        let f = squarefree_factors(&p);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].1, 3);
    }
}
