use ffm_core::characters::{
    euler_symbol, jacobi_symbol, jacobi_symbol_factored, Conductor, Prime, QuadraticCharacter,
};
use ffm_core::field_poly::{Fq, MonicPoly};
use ffm_core::strategy::Strategies;

fn characters_of_degree(ring: &Fq, n: usize) -> Vec<QuadraticCharacter> {
    let backend = Strategies::builtin().symbols.default_strategy();
    ring.enumerate_irreducibles(n)
        .unwrap()
        .map(|p| {
            let c = Conductor::new(ring, p).unwrap();
            QuadraticCharacter::new(ring, c, backend.as_ref()).unwrap()
        })
        .collect()
}

#[test]
fn multiplicative_on_all_residue_pairs_for_cubic_conductors() {
    let ring = Fq::new(5).unwrap();
    for chi in characters_of_degree(&ring, 3) {
        let p = chi.conductor().prime().poly().as_poly().clone();
        let residues: Vec<_> = (0..125u64).map(|i| ring.poly_from_index(i)).collect();
        for a in &residues {
            for b in &residues {
                let ab = ring.poly_rem(&ring.poly_mul(a, b), &p).unwrap();
                assert_eq!(chi.value(&ab), chi.value(a) * chi.value(b));
            }
        }
    }
}

#[test]
fn periodic_balanced_and_zero_only_on_multiples() {
    let ring = Fq::new(5).unwrap();
    for chi in characters_of_degree(&ring, 3) {
        let p = chi.conductor().prime().poly().as_poly().clone();
        let t = chi.table();
        assert_eq!(t.count(1), 62);
        assert_eq!(t.count(-1), 62);
        assert_eq!(t.count(0), 1);
        for i in 0..125u64 {
            let f = ring.poly_from_index(i);
            let shifted = ring.poly_add(&f, &ring.poly_mul(&p, &ring.poly(&[2, 0, 1])));
            assert_eq!(chi.value(&shifted), chi.value(&f));
        }
        assert_eq!(chi.value(&p), 0);
    }
}

#[test]
fn backends_agree_with_euler_criterion() {
    let s = Strategies::builtin();
    for q in [5u64, 13] {
        let ring = Fq::new(q).unwrap();
        let max_deg = if q == 5 { 3 } else { 2 };
        for n in 1..=max_deg {
            for p in ring.enumerate_irreducibles(n).unwrap() {
                let prime = Prime::new(&ring, p).unwrap();
                let tables: Vec<_> = s
                    .symbols
                    .iter()
                    .map(|(_, b)| b.residue_table(&ring, &prime).unwrap())
                    .collect();
                for i in 0..tables[0].len() as u64 {
                    let f = ring.poly_from_index(i);
                    let e = euler_symbol(&ring, &f, &prime);
                    for t in &tables {
                        assert_eq!(t.get(i), e);
                    }
                }
            }
        }
    }
}

#[test]
fn reciprocity_for_monic_coprime_pairs() {
    for (q, max_deg) in [(5u64, 3usize), (13, 2)] {
        let ring = Fq::new(q).unwrap();
        let polys: Vec<MonicPoly> = (1..=max_deg)
            .flat_map(|d| ring.enumerate_monic(d))
            .collect();
        for f in &polys {
            for g in &polys {
                if ring.poly_gcd(f.as_poly(), g.as_poly()).unwrap().is_one() {
                    assert_eq!(
                        jacobi_symbol(&ring, f.as_poly(), g).unwrap(),
                        jacobi_symbol(&ring, g.as_poly(), f).unwrap()
                    );
                }
            }
        }
    }
}

#[test]
fn jacobi_ladder_matches_factorization() {
    let ring = Fq::new(5).unwrap();
    for g in (1..=4).flat_map(|d| ring.enumerate_monic(d)) {
        for i in (0..3125u64).step_by(7) {
            let f = ring.poly_from_index(i);
            assert_eq!(
                jacobi_symbol(&ring, &f, &g).unwrap(),
                jacobi_symbol_factored(&ring, &f, &g).unwrap()
            );
        }
    }
}

#[test]
fn jacobi_multiplicative_in_modulus() {
    let ring = Fq::new(5).unwrap();
    let gs: Vec<MonicPoly> = (1..=2).flat_map(|d| ring.enumerate_monic(d)).collect();
    for g1 in &gs {
        for g2 in &gs {
            let g = ring.monic_mul(g1, g2);
            for i in 0..625u64 {
                let f = ring.poly_from_index(i);
                let lhs = jacobi_symbol(&ring, &f, &g).unwrap();
                let rhs =
                    jacobi_symbol(&ring, &f, g1).unwrap() * jacobi_symbol(&ring, &f, g2).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn even_degree_conductor_is_rejected() {
    let ring = Fq::new(5).unwrap();
    let p = ring.enumerate_irreducibles(2).unwrap().next().unwrap();
    assert!(Conductor::new(&ring, p).is_err());
}
