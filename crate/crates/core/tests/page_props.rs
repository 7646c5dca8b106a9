use std::collections::BTreeMap;

use ksseq::gring::{Params, Ring};
use ksseq::koszul::Subset;
use ksseq::page::{
    collapse_report, crossing_candidates, crossing_differential_check, defining_differentials,
    differential_target_scan, e2_table, extension_search, parity_collapse_check,
    splitting_consistency, vbar_generators, xi_generators, GeneratorKind, GeneratorSpec,
    PageOptions, Permanence,
};
use ksseq::presentation::{f_degree, presentation_table_with, relation_generators, RelationSet};
use proptest::prelude::*;

/// Every product of generator powers, enumerated one by one.
fn brute_force(params: &Params, opts: &PageOptions) -> BTreeMap<(usize, u32), usize> {
    let t_max = params.t_max;
    let rels = relation_generators(&params.ring, RelationSet::ALL);
    let tor = presentation_table_with(params, &rels).unwrap();
    let mut cells: Vec<(usize, u32)> = Vec::new();
    for (&(s, t), e) in &tor.cells {
        cells.extend(std::iter::repeat((s, t)).take(e.dim));
    }
    let mut gens: Vec<(usize, u32, bool)> = Vec::new();
    if !opts.tor_over_bp {
        gens.extend(xi_generators(params.p(), t_max).iter().map(|g| (g.s, g.t, true)));
    }
    if opts.include_pbar {
        gens.push((1, 0, false));
    }
    gens.extend(vbar_generators(&params.ring, t_max).iter().map(|g| (g.s, g.t, false)));
    for (gs, gt, poly) in gens {
        let mut next = Vec::new();
        for &(s, t) in &cells {
            let max_k = if poly { (t_max - t) / gt } else { 1 };
            for k in 0..=max_k {
                if t + k * gt <= t_max {
                    next.push((s + k as usize * gs, t + k * gt));
                }
            }
        }
        cells = next;
    }
    let mut out = BTreeMap::new();
    for c in cells {
        *out.entry(c).or_insert(0) += 1;
    }
    out
}

#[test]
fn e2_convolution_matches_enumeration() {
    for (p, n, adic, t_max) in [(2, 2, 2, 30), (3, 2, 1, 40), (2, 3, 2, 40), (5, 1, 1, 60), (2, 4, 1, 40)] {
        let pr = Params::new(p, n, adic, t_max).unwrap();
        for pbar in [true, false] {
            let opts = PageOptions {
                include_pbar: pbar,
                ..PageOptions::for_height(n)
            };
            let page = e2_table(&pr, &opts).unwrap();
            assert_eq!(page.table.dims(), brute_force(&pr, &opts), "p={p} n={n} pbar={pbar}");
        }
    }
}

#[test]
fn tor_over_bp_variant_drops_xi() {
    let pr = Params::new(2, 5, 1, 40).unwrap();
    let opts = PageOptions::for_height(5);
    assert!(opts.tor_over_bp);
    let page = e2_table(&pr, &opts).unwrap();
    assert!(page.generators.iter().all(|g| !g.name.starts_with("xi")));
    assert_eq!(page.table.dims(), brute_force(&pr, &opts));
}

#[test]
fn d2_on_triple_f_hits_odd_degree() {
    for (p, n) in [(2, 3), (3, 3), (2, 4), (3, 4), (5, 4)] {
        let r = Ring::new(p, n).unwrap();
        let pr = Params::new(p, n, 2, Params::default_t_max(p, n).unwrap()).unwrap();
        let page = e2_table(&pr, &PageOptions::for_height(n)).unwrap();
        let i = Subset::from_indices(&[1, 2, 3]);
        let g = GeneratorSpec::new("f_{1,2,3}", GeneratorKind::TorModule, 2, f_degree(&r, i));
        let scan = differential_target_scan(&page, &g, 2);
        assert_eq!(scan.dim, 0);
        assert_eq!(scan.note, "odd internal degree");
    }
}

#[test]
fn no_crossings_for_n4_defining_systems() {
    let r = Ring::new(2, 4).unwrap();
    let pr = Params::new(2, 4, 4, 62).unwrap();
    let page = e2_table(&pr, &PageOptions::for_height(4)).unwrap();
    let i = Subset::from_indices(&[1, 2]);
    let j = Subset::from_indices(&[3, 4]);
    let defining = defining_differentials(&r, i, j);
    assert_eq!(defining.len(), 2);
    assert_eq!(defining[0].label, "u^6*v{1,2}");
    let mut cands = Vec::new();
    for y in &defining {
        cands.extend(crossing_candidates(&page, y.total_degree, y.filtration));
    }
    assert!(cands.iter().all(|c| c.page >= 2));
    assert!(crossing_differential_check(&defining, &cands).unwrap().is_empty());
}

#[test]
fn extension_enumerations() {
    let r = Ring::new(2, 4).unwrap();
    let c = extension_search(&r, 44, 4);
    assert_eq!(c.len(), 1);
    assert_eq!((c[0].s, c[0].k, c[0].f.clone()), (2, 3, vec![1, 2, 4]));
    for p in [2, 3] {
        for n in 2..=5 {
            let r = Ring::new(p, n).unwrap();
            for ij in Subset::of_size(n, 2) {
                let i = ij.least().unwrap();
                let d = 1 + 2 * r.w(i) + f_degree(&r, ij);
                assert!(extension_search(&r, d, 1).is_empty(), "p={p} n={n} {ij}");
            }
        }
    }
    let r5 = Ring::new(2, 5).unwrap();
    let f345 = Subset::from_indices(&[3, 4, 5]);
    let d = 2 + 2 * r5.w(3) + f_degree(&r5, f345);
    assert_eq!(d, 108);
    assert!(extension_search(&r5, d, 2).is_empty());
}

#[test]
fn splitting_series_examples() {
    let rep = splitting_consistency(&Ring::new(2, 1).unwrap(), 8);
    assert_eq!(rep.lhs, vec![1, 0, 1, 0, 1, 0, 2, 1, 2]);
    assert_eq!(rep.lhs, rep.rhs);
    // |tau_2| = |vbar_2| = 17 at p = 3
    let rep = splitting_consistency(&Ring::new(3, 1).unwrap(), 17);
    assert_eq!(rep.lhs[17], 1);
    assert!(rep.pass);
}

#[test]
fn collapse_examples() {
    let report = |p: u32, n: usize| {
        let pr = Params::new(p, n, 4, Params::default_t_max(p, n).unwrap()).unwrap();
        collapse_report(&pr, &PageOptions::for_height(n)).unwrap()
    };
    let r = report(2, 2);
    assert!(r.generators.iter().all(|g| g.status == Permanence::PermanentByDegree));
    let r = report(2, 4);
    for g in &r.generators {
        let want = if g.name == "f_{1,2,3,4}" {
            Permanence::PermanentByMassey
        } else {
            Permanence::PermanentByDegree
        };
        assert_eq!(g.status, want, "{}", g.name);
    }
    assert!(r.extensions.iter().any(|e| e.status == "UNKNOWN" && e.relation == "u^1*f_{1,2,3} = 0"));
    let sq = r.extensions.iter().find(|e| e.relation == "f_{1,2,3}^2 = 0").unwrap();
    assert_eq!(sq.candidates.len(), 1);
    assert!(sq.status.starts_with("HOLDS"));
    let r = report(2, 5);
    let top = r.generators.iter().find(|g| g.name == "f_{1,2,3,4,5}").unwrap();
    assert_eq!(top.status, Permanence::PermanentByMassey);
    let route = top.massey.as_ref().unwrap();
    assert_eq!((route.left.clone(), route.right.clone()), (vec![1, 2], vec![3, 4, 5]));
    assert!(route.prerequisites.iter().all(|(_, c)| c.is_empty()));
}

#[test]
fn injected_odd_generator_breaks_parity() {
    let pr = Params::new(3, 2, 2, 40).unwrap();
    let mut opts = PageOptions::for_height(2);
    assert!(parity_collapse_check(&pr, &opts).unwrap().pass);
    opts.extra.push(GeneratorSpec::new("x", GeneratorKind::Polynomial, 0, 3));
    let rep = parity_collapse_check(&pr, &opts).unwrap();
    assert!(!rep.pass);
    assert_eq!(rep.witness.unwrap().1, 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn e2_internal_degrees_are_even(p in prop_oneof![Just(2u32), Just(3), Just(5)], n in 1usize..=4, h in 0u32..40) {
        let pr = Params::new(p, n, 2, 2 * h).unwrap();
        let page = e2_table(&pr, &PageOptions::for_height(n)).unwrap();
        prop_assert!(page.table.cells.keys().all(|&(_, t)| t % 2 == 0));
    }

    #[test]
    fn splitting_holds(p in prop_oneof![Just(2u32), Just(3), Just(5)], n in 1usize..=4, d in 0u32..80) {
        prop_assert!(splitting_consistency(&Ring::new(p, n).unwrap(), d).pass);
    }
}
