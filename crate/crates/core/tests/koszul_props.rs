use ksseq::gring::{fp, Monomial, Ring, RingElement};
use ksseq::koszul::{alpha, differential, hat, psi, sort_sign, wedge, KoszulElement, Subset};
use proptest::prelude::*;

type RawTerm = (u32, u32, [u16; 3], u32);

fn ring() -> impl Strategy<Value = Ring> {
    (prop_oneof![Just(2u32), Just(3), Just(5)], 1usize..=4).prop_map(|(p, n)| Ring::new(p, n).unwrap())
}

fn raw_terms(max: usize) -> impl Strategy<Value = Vec<RawTerm>> {
    prop::collection::vec((0u32..16, 0u32..10, [0u16..4, 0u16..4, 0u16..4], 1u32..5), 1..=max)
}

fn monomial(r: &Ring, a: u32, e: [u16; 3]) -> Monomial {
    let mut x = [0u16; 4];
    for (i, v) in e.iter().enumerate().take(r.vars()) {
        x[i] = *v;
    }
    Monomial::new(a, x)
}

fn coeff(r: &Ring, c: u32) -> u32 {
    let c = c % r.p;
    if c == 0 {
        1
    } else {
        c
    }
}

fn ring_element(r: &Ring, raw: &[RawTerm]) -> RingElement {
    raw.iter().fold(r.zero(), |acc, &(_, a, e, c)| {
        acc.add(&r.term(coeff(r, c), monomial(r, a, e)))
    })
}

fn koszul_element(r: &Ring, raw: &[RawTerm]) -> KoszulElement {
    let mask = (1u32 << r.n) - 1;
    raw.iter().fold(KoszulElement::zero(*r), |acc, &(s, a, e, c)| {
        let term = r.term(coeff(r, c), monomial(r, a, e));
        acc.add(&KoszulElement::basis(*r, Subset(s & mask), term))
    })
}

/// A single bihomogeneous term `c m v̄_S`.
fn word(r: &Ring, t: RawTerm) -> KoszulElement {
    koszul_element(r, &[t])
}

fn sign(p: u32, k: usize) -> u32 {
    fp::sign(p, k)
}

proptest! {
    #[test]
    fn ring_laws(r in ring(), a in raw_terms(4), b in raw_terms(4), c in raw_terms(4)) {
        let (x, y, z) = (ring_element(&r, &a), ring_element(&r, &b), ring_element(&r, &c));
        prop_assert_eq!(x.add(&y), y.add(&x));
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        prop_assert_eq!(x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z)));
        prop_assert!(x.sub(&x).is_zero());
        prop_assert_eq!(x.mul(&r.one()), x.clone());
        prop_assert!(x.mul(&r.zero()).is_zero());
    }

    #[test]
    fn grading_is_additive(r in ring(), a in raw_terms(1), b in raw_terms(1)) {
        let (x, y) = (ring_element(&r, &a), ring_element(&r, &b));
        let xy = x.mul(&y);
        prop_assert_eq!(xy.internal_degree(), Some(x.internal_degree().unwrap() + y.internal_degree().unwrap()));
        prop_assert_eq!(xy.adic_order(), Some(x.adic_order().unwrap() + y.adic_order().unwrap()));
    }

    #[test]
    fn divide_by_u_power_inverts_multiplication(r in ring(), a in raw_terms(4), k in 0u32..6) {
        let x = ring_element(&r, &a);
        prop_assert_eq!(r.u_pow(k).mul(&x).divide_by_u_power(k).unwrap(), x);
    }

    #[test]
    fn decompose_recomposes(r in ring(), a in raw_terms(4), j0 in 2usize..=4) {
        let x = ring_element(&r, &a);
        let in_ideal = (1..j0.min(r.n)).fold(r.zero(), |acc, j| acc.add(&x.mul(&r.u_i(j))));
        let parts = in_ideal.monomial_ideal_decompose(j0).unwrap();
        let back = parts.iter().fold(r.zero(), |acc, (&j, q)| acc.add(&q.mul(&r.u_i(j))));
        prop_assert_eq!(back, in_ideal);
    }

    #[test]
    fn differential_squares_to_zero(r in ring(), a in raw_terms(6)) {
        let x = koszul_element(&r, &a);
        prop_assert!(differential(&differential(&x)).is_zero());
    }

    #[test]
    fn differential_preserves_internal_degree(r in ring(), t in (0u32..16, 0u32..10, [0u16..4, 0u16..4, 0u16..4], 1u32..5)) {
        let x = word(&r, t);
        let dx = differential(&x);
        if let (Some((s, tx)), Some((s2, t2))) = (x.bidegree(), dx.bidegree()) {
            prop_assert_eq!(tx, t2);
            prop_assert_eq!(s, s2 + 1);
        }
    }

    #[test]
    fn leibniz_with_total_degree_sign(
        r in ring(),
        a in (0u32..16, 0u32..6, [0u16..3, 0u16..3, 0u16..3], 1u32..5),
        b in (0u32..16, 0u32..6, [0u16..3, 0u16..3, 0u16..3], 1u32..5),
    ) {
        let (x, y) = (word(&r, a), word(&r, b));
        let d = x.total_degree().unwrap() as usize;
        let lhs = differential(&wedge(&x, &y));
        let rhs = wedge(&differential(&x), &y).add(&wedge(&x, &differential(&y)).scale(sign(r.p, d)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn graded_commutativity(
        r in ring(),
        a in (0u32..16, 0u32..6, [0u16..3, 0u16..3, 0u16..3], 1u32..5),
        b in (0u32..16, 0u32..6, [0u16..3, 0u16..3, 0u16..3], 1u32..5),
    ) {
        let (x, y) = (word(&r, a), word(&r, b));
        let (dx, dy) = (x.total_degree().unwrap() as usize, y.total_degree().unwrap() as usize);
        prop_assert_eq!(wedge(&x, &y), wedge(&y, &x).scale(sign(r.p, dx * dy)));
    }

    #[test]
    fn sort_sign_complement(a in 0u32..256, b in 0u32..256) {
        let (a, b) = (Subset(a & !b), Subset(b & !a));
        prop_assert_eq!(sort_sign(a, b) + sort_sign(b, a), a.len() * b.len());
    }

    #[test]
    fn hat_of_f_has_parity_of_size(r in ring(), mask in 0u32..16) {
        let i = Subset(mask & ((1 << r.n) - 1));
        prop_assume!(i.len() >= 2);
        let f = psi(&r, i).unwrap();
        prop_assert_eq!(hat(&f).unwrap(), f.scale(sign(r.p, i.len())));
        prop_assert!(differential(&f).is_zero());
    }
}

/// `α_I f''_I = ∂ v̄_I`, checked directly for every `I`.
#[test]
fn psi_times_alpha_is_the_boundary_of_the_word() {
    for p in [2, 3, 5] {
        for n in 1..=4 {
            let r = Ring::new(p, n).unwrap();
            for i in Subset::all(n).filter(|s| s.len() >= 2) {
                let f = psi(&r, i).unwrap();
                assert_eq!(
                    f.mul_ring(&alpha(&r, i)),
                    differential(&KoszulElement::word(r, i)),
                    "p={p} n={n} I={i}"
                );
            }
        }
    }
}

#[test]
fn spec_examples_p2_n2() {
    let r = Ring::new(2, 2).unwrap();
    let v1 = KoszulElement::word(r, Subset::from_indices(&[1]));
    let v2 = KoszulElement::word(r, Subset::from_indices(&[2]));
    let v12 = KoszulElement::word(r, Subset::from_indices(&[1, 2]));
    let u1u = r.u_i(1).mul(&r.u_pow(1));
    assert_eq!(differential(&v1), KoszulElement::scalar(u1u.clone()));
    // hand expansion: u_1 u v̄_2 + u^3 v̄_1 over F_2
    let expected = v2.mul_ring(&u1u).add(&v1.mul_ring(&r.u_pow(3)));
    assert_eq!(differential(&v12), expected);
    // psi({1,2}) = u_1 v̄_2 + u^2 v̄_1
    let f = v2.mul_ring(&r.u_i(1)).add(&v1.mul_ring(&r.u_pow(2)));
    assert_eq!(psi(&r, Subset::from_indices(&[1, 2])).unwrap(), f);
}
