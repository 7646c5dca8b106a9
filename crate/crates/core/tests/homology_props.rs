use std::collections::BTreeMap;

use ksseq::gring::{Params, Ring};
use ksseq::homology::{
    differential_matrix, homology_slice, homology_table, homology_table_with, is_boundary,
    reduce_cycle, slice_basis, EngineRegistry,
};
use ksseq::koszul::{differential, psi, KoszulElement, Subset};
use proptest::prelude::*;

/// Dimensions read off `F_p[[u_1]][u, f]/(u_1 u^{p-1}, u^{p^2-1}, u^{p-1} f, f^2)`
/// truncated at `u_1^N`, or `F_p[u]/u^{p-1}` for `n = 1`.
fn closed_form(p: u32, n: usize, adic: u32, t_max: u32) -> BTreeMap<(usize, u32), usize> {
    let mut out = BTreeMap::new();
    let w1 = p - 1;
    if n == 1 {
        for a in 0..w1 {
            if 2 * a <= t_max {
                out.insert((0, 2 * a), 1);
            }
        }
        return out;
    }
    let w2 = p * p - 1;
    for a in 0..w2 {
        let dim = if a < w1 { adic as usize } else { 1 };
        if 2 * a <= t_max {
            out.insert((0, 2 * a), dim);
        }
    }
    for b in 0..w1 {
        let t = 2 * w2 + 2 * b;
        if t <= t_max {
            out.insert((1, t), adic as usize);
        }
    }
    out
}

#[test]
fn tables_match_closed_form_for_low_heights() {
    for p in [2, 3, 5] {
        for n in [1, 2] {
            for adic in 1..=3 {
                let t_max = 2 * (p * p - 1) + 2 * p;
                let pr = Params::new(p, n, adic, t_max).unwrap();
                let got = homology_table(&pr).unwrap().dims();
                assert_eq!(got, closed_form(p, n, adic, t_max), "p={p} n={n} N={adic}");
            }
        }
    }
}

#[test]
fn engine_registry_lists_both() {
    let reg = EngineRegistry::default();
    assert_eq!(reg.names(), vec!["graded", "truncated"]);
    assert!(reg.get("dense").is_err());
    // away from the truncation edge both engines agree
    let pr = Params::new(3, 2, 3, 20).unwrap();
    let (g, _) = homology_table_with(reg.get("graded").unwrap(), &pr).unwrap();
    let (t, _) = homology_table_with(reg.get("truncated").unwrap(), &pr).unwrap();
    assert_eq!(g.dim(1, 16), t.dim(1, 16));
    assert_eq!(g.dim(0, 4), t.dim(0, 4));
}

#[test]
fn boundary_witness_for_u_times_f() {
    let r = Ring::new(2, 2).unwrap();
    let f = psi(&r, Subset::from_indices(&[1, 2])).unwrap();
    let c = f.mul_ring(&r.u_pow(1));
    let b = is_boundary(&c).unwrap();
    assert_eq!(differential(&b), c);
    assert!(is_boundary(&f).is_err());
    let cert = reduce_cycle(&differential(&KoszulElement::word(r, Subset::from_indices(&[1, 2])))).unwrap();
    assert!(cert.verify());
}

fn small_params() -> impl Strategy<Value = (Params, usize, u32)> {
    (prop_oneof![Just(2u32), Just(3)], 1usize..=3, 1u32..=3)
        .prop_flat_map(|(p, n, adic)| {
            let t_max = Params::default_t_max(p, n).unwrap().min(40);
            (Just(Params::new(p, n, adic, t_max).unwrap()), 0..=n, 0..=t_max / 2)
        })
        .prop_map(|(pr, s, h)| (pr, s, 2 * h))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_plus_nullity_is_slice_dim((pr, s, t) in small_params()) {
        prop_assume!(s >= 1);
        let m = differential_matrix(&pr, s, t).unwrap();
        let cols = slice_basis(&pr, s, t).unwrap().len();
        prop_assert_eq!(m.cols(), cols);
        prop_assert_eq!(m.rank() + m.nullspace().len(), cols);
    }

    #[test]
    fn representatives_are_nontrivial_cycles((pr, s, t) in small_params()) {
        let sl = homology_slice(&pr, s, t).unwrap();
        prop_assert_eq!(sl.representatives.len(), sl.dim);
        for c in &sl.representatives {
            prop_assert!(differential(c).is_zero());
            prop_assert!(is_boundary(c).is_err());
            if s >= 1 {
                let cert = reduce_cycle(c).unwrap();
                prop_assert!(cert.verify());
            }
        }
    }
}
