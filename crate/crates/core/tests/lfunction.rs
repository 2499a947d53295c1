use ffm_core::characters::{Conductor, QuadraticCharacter};
use ffm_core::field_poly::Fq;
use ffm_core::lfunction::{
    afe_value, central_value, functional_equation_defect, l_coefficients, l_zeros, LPolynomial,
};
use ffm_core::strategy::Strategies;
use num_bigint::BigInt;
use num_traits::Zero;

fn corpus(ring: &Fq, n: usize, backend: &str) -> Vec<(QuadraticCharacter, LPolynomial)> {
    let b = Strategies::builtin().symbols.get(backend).unwrap();
    ring.enumerate_irreducibles(n)
        .unwrap()
        .map(|p| {
            let chi = QuadraticCharacter::new(ring, Conductor::new(ring, p).unwrap(), b.as_ref())
                .unwrap();
            let l = l_coefficients(&chi);
            (chi, l)
        })
        .collect()
}

#[test]
fn exact_identities_on_small_corpus() {
    let ring = Fq::new(5).unwrap();
    for n in [3, 5] {
        let g = (n - 1) / 2;
        for (chi, l) in corpus(&ring, n, "square-table") {
            assert_eq!(l.coeffs().len(), 2 * g + 1);
            assert!(l.is_normalized());
            assert_eq!(l.coeffs()[2 * g], BigInt::from(5).pow(g as u32));
            assert!(functional_equation_defect(&l).is_zero());
            assert!(l.trivial_bound_holds());
            let central = central_value(&l);
            assert_eq!(afe_value(&chi), central);
            assert!(!central.is_negative());
            let zeros = l_zeros(&l, 1e-9).unwrap();
            assert!(zeros.within_tolerance(), "defect {}", zeros.moduli_defect);
        }
    }
}

#[test]
fn symbol_backends_give_identical_l_polynomials() {
    let ring = Fq::new(5).unwrap();
    let a = corpus(&ring, 5, "square-table");
    for other in ["euler", "reciprocity"] {
        let b = corpus(&ring, 5, other);
        for ((_, la), (_, lb)) in a.iter().zip(&b) {
            assert_eq!(la, lb);
        }
    }
}

#[test]
fn q13_cubic_conductors() {
    let ring = Fq::new(13).unwrap();
    for (chi, l) in corpus(&ring, 3, "square-table") {
        assert!(functional_equation_defect(&l).is_zero());
        assert_eq!(afe_value(&chi), central_value(&l));
        assert!(l_zeros(&l, 1e-9).unwrap().within_tolerance());
    }
}

#[test]
fn perturbation_breaks_functional_equation_at_genus_two() {
    let ring = Fq::new(5).unwrap();
    for (_, l) in corpus(&ring, 5, "square-table").into_iter().take(20) {
        assert!(!functional_equation_defect(&l.perturbed(1, 1)).is_zero());
        assert!(!functional_equation_defect(&l.perturbed(0, 1)).is_zero());
    }
}

#[test]
fn perturbing_the_middle_coefficient_is_invisible_at_genus_one() {
    let ring = Fq::new(5).unwrap();
    for (_, l) in corpus(&ring, 3, "square-table") {
        assert!(functional_equation_defect(&l.perturbed(1, 1)).is_zero());
    }
}
