//! The bigraded algebra `A/𝔞`: words `q u^a f_I`, the four relation
//! families, product reduction and slice dimensions.
//!
//! Every product of two or more `f`-generators reduces to at most one
//! `f`-word, so each slice is spanned by single words and relations are
//! taken as `F_p[u_1, ..., u_{n-1}, u]`-multiples of single-word elements.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::gring::{exps_degree, exps_mul, fp, monomials_of_degree, Exps, Monomial, Params, Ring};
use crate::homology::{
    homology_slice, is_boundary, reduce_cycle, BigradedTable, HomologyError, TableEntry,
};
use crate::koszul::{psi, sort_sign, wedge, KoszulElement, Subset};
use crate::linalg::Subspace;

/// `q u^a f_I`; `f = EMPTY` stands for the unit word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    pub f: Subset,
    pub a: u32,
    pub q: Exps,
}

impl Word {
    pub fn s(&self) -> usize {
        self.f.len().saturating_sub(1)
    }

    pub fn t(&self, ring: &Ring) -> u32 {
        2 * self.a + f_degree(ring, self.f)
    }

    pub fn weight(&self) -> u32 {
        exps_degree(&self.q)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = Monomial::new(self.a, self.q).to_string();
        if self.f.is_empty() {
            write!(f, "{m}")
        } else if m == "1" {
            write!(f, "f_{}", self.f)
        } else {
            write!(f, "{m}*f_{}", self.f)
        }
    }
}

/// Internal degree of `f_I`: `2 sum_{i in I \ min I} w(i)`.
pub fn f_degree(ring: &Ring, i: Subset) -> u32 {
    match i.least() {
        Some(m) => i.remove(m).internal_degree(ring),
        None => 0,
    }
}

/// A linear combination of words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationElement {
    ring: Ring,
    terms: BTreeMap<Word, u32>,
}

impl PresentationElement {
    pub fn zero(ring: Ring) -> Self {
        PresentationElement {
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn word(ring: Ring, w: Word, c: u32) -> Self {
        let mut x = Self::zero(ring);
        x.add_word(w, c);
        x
    }

    /// `f_I` itself.
    pub fn f(ring: Ring, i: Subset) -> Self {
        Self::word(
            ring,
            Word {
                f: i,
                a: 0,
                q: [0; 4],
            },
            1,
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, u32)> + '_ {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    fn add_word(&mut self, w: Word, c: u32) {
        let p = self.ring.p;
        let c = c % p;
        if c == 0 {
            return;
        }
        let slot = self.terms.entry(w).or_insert(0);
        *slot = fp::add(p, *slot, c);
        if *slot == 0 {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (w, c) in o.terms() {
            r.add_word(*w, c);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(self.ring.p - 1))
    }

    pub fn scale(&self, c: u32) -> Self {
        let mut r = Self::zero(self.ring);
        for (w, x) in self.terms() {
            r.add_word(*w, fp::mul(self.ring.p, x, c));
        }
        r
    }

    /// Multiply by `u^b q'`.
    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        let mut r = Self::zero(self.ring);
        for (w, c) in self.terms() {
            r.add_word(
                Word {
                    f: w.f,
                    a: w.a + m.a,
                    q: exps_mul(&w.q, &m.e),
                },
                c,
            );
        }
        r
    }

    /// Multiply by `u_i` (`u_n = 1`).
    pub fn times_u_i(&self, i: usize) -> Self {
        self.mul_monomial(&Monomial::one().times_var(i, self.ring.n))
    }

    /// `(s, t, weight)` if homogeneous and nonzero.
    pub fn grading(&self) -> Option<(usize, u32, u32)> {
        let mut out = None;
        for (w, _) in self.terms() {
            let g = (w.s(), w.t(&self.ring), w.weight());
            match out {
                None => out = Some(g),
                Some(o) if o != g => return None,
                _ => {}
            }
        }
        out
    }

    /// Image under `ψ`: `q u^a f''_I`.
    pub fn to_koszul(&self) -> KoszulElement {
        let ring = self.ring;
        let mut out = KoszulElement::zero(ring);
        for (w, c) in self.terms() {
            let coeff = ring.term(c, Monomial::new(w.a, w.q));
            let base = if w.f.is_empty() {
                KoszulElement::scalar(ring.one())
            } else {
                psi(&ring, w.f).expect("f-word on a short subset")
            };
            out = out.add(&base.mul_ring(&coeff));
        }
        out
    }

    /// Product with `f_L`, reduced to single words.
    pub fn times_f(&self, l: Subset) -> Self {
        let mut out = Self::zero(self.ring);
        for (w, c) in self.terms() {
            let m = Monomial::new(w.a, w.q);
            let prod = if w.f.is_empty() {
                Self::f(self.ring, l)
            } else {
                product_reduce(&self.ring, w.f, l)
            };
            out = out.add(&prod.mul_monomial(&m).scale(c));
        }
        out
    }
}

impl fmt::Display for PresentationElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let p = self.ring.p;
        let parts: Vec<String> = self
            .terms()
            .map(|(w, c)| match fp::lift(p, c) {
                1 => w.to_string(),
                -1 => format!("-{w}"),
                k => format!("{k}*{w}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Normal form of `f_I f_J` for `#I, #J >= 2`.
///
/// With `i_0 <= j_0` (ties included) the factor `j_0` is removed from the
/// second word; otherwise graded commutativity swaps the factors first.
pub fn product_reduce(ring: &Ring, i: Subset, j: Subset) -> PresentationElement {
    assert!(i.len() >= 2 && j.len() >= 2, "product_reduce needs f-words");
    let (i0, j0) = (i.least().unwrap(), j.least().unwrap());
    if i0 > j0 {
        let swapped = product_reduce(ring, j, i);
        let sign = (i.len() - 1) * (j.len() - 1);
        return swapped.scale(fp::sign(ring.p, sign));
    }
    let rest = j.remove(j0);
    if i.intersects(rest) {
        return PresentationElement::zero(*ring);
    }
    let sign = fp::sign(ring.p, sort_sign(i, rest));
    PresentationElement::f(*ring, i.union(rest))
        .times_u_i(j0)
        .scale(sign)
}

/// Which relation families enter `𝔞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RelationSet {
    pub u_power: bool,
    pub alpha: bool,
    pub exchange: bool,
    pub product: bool,
}

impl RelationSet {
    pub const ALL: RelationSet = RelationSet {
        u_power: true,
        alpha: true,
        exchange: true,
        product: true,
    };
}

impl Default for RelationSet {
    fn default() -> Self {
        Self::ALL
    }
}

/// One instance of a relation family; `times` is an extra `f_L` factor
/// (`EMPTY` for none).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationFamily {
    /// `u_i u^{w(i)}`.
    UPowerTimesUi { i: usize, times: Subset },
    /// `α_I f_I`.
    AlphaTimesF { i: Subset, times: Subset },
    /// `u_a f_{I ∪ b} - u_b f_{I ∪ a}`, `a < b < min I`.
    Exchange {
        base: Subset,
        a: usize,
        b: usize,
        times: Subset,
    },
    /// Two factors: `f_I f_J = ρ(I, J)`. Three factors: the associator
    /// `ρ(ρ(K, I), J) - ρ(K, ρ(I, J))`.
    Product { factors: Vec<Subset> },
}

impl fmt::Display for RelationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let times = |l: &Subset| {
            if l.is_empty() {
                String::new()
            } else {
                format!(" * f_{l}")
            }
        };
        match self {
            RelationFamily::UPowerTimesUi { i, times: l } => {
                write!(f, "u_{i}*u^w({i}){}", times(l))
            }
            RelationFamily::AlphaTimesF { i, times: l } => write!(f, "alpha_{i}*f_{i}{}", times(l)),
            RelationFamily::Exchange { base, a, b, times: l } => write!(
                f,
                "u_{a}*f_{} - u_{b}*f_{}{}",
                base.insert(*b),
                base.insert(*a),
                times(l)
            ),
            RelationFamily::Product { factors } => {
                let fs: Vec<String> = factors.iter().map(|x| format!("f_{x}")).collect();
                write!(f, "{}", fs.join(" * "))
            }
        }
    }
}

impl RelationFamily {
    pub fn tag(&self) -> &'static str {
        match self {
            RelationFamily::UPowerTimesUi { .. } => "UPowerTimesUi",
            RelationFamily::AlphaTimesF { .. } => "AlphaTimesF",
            RelationFamily::Exchange { .. } => "Exchange",
            RelationFamily::Product { .. } => "Product",
        }
    }

    /// Whether the instance is a generator of `𝔞` as stated (no extra factor).
    pub fn is_base(&self) -> bool {
        match self {
            RelationFamily::UPowerTimesUi { times, .. }
            | RelationFamily::AlphaTimesF { times, .. }
            | RelationFamily::Exchange { times, .. } => times.is_empty(),
            RelationFamily::Product { factors } => factors.len() == 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Relation {
    pub family: RelationFamily,
    /// The single-word element that must vanish in `A/𝔞`. For the two-factor
    /// product relation this is `ρ(I, J)`, the value the product takes.
    pub element: PresentationElement,
}

impl Relation {
    /// Whether `element` is itself a member of `𝔞`.
    pub fn is_linear(&self) -> bool {
        !matches!(&self.family, RelationFamily::Product { factors } if factors.len() == 2)
    }
}

fn f_words(n: usize) -> Vec<Subset> {
    Subset::all(n).filter(|s| s.len() >= 2).collect()
}

/// All relation instances for the given height, in a fixed order.
pub fn relation_generators(ring: &Ring, set: RelationSet) -> Vec<Relation> {
    let n = ring.n;
    let words = f_words(n);
    let mut times_list = vec![Subset::EMPTY];
    times_list.extend(words.iter().copied());
    let mut out = Vec::new();
    let mut push = |family: RelationFamily, element: PresentationElement| {
        out.push(Relation { family, element });
    };

    if set.u_power {
        for i in 1..=n {
            for &l in &times_list {
                let base = if l.is_empty() {
                    PresentationElement::word(
                        *ring,
                        Word {
                            f: Subset::EMPTY,
                            a: 0,
                            q: [0; 4],
                        },
                        1,
                    )
                } else {
                    PresentationElement::f(*ring, l)
                };
                let e = base.mul_monomial(&Monomial::u_pow(ring.w(i))).times_u_i(i);
                push(RelationFamily::UPowerTimesUi { i, times: l }, e);
            }
        }
    }
    if set.alpha {
        for &i in &words {
            let a = PresentationElement::f(*ring, i)
                .mul_monomial(&Monomial::u_pow(ring.w(i.least().unwrap())));
            for &l in &times_list {
                let e = if l.is_empty() { a.clone() } else { a.times_f(l) };
                if l.is_empty() || !e.is_zero() {
                    push(RelationFamily::AlphaTimesF { i, times: l }, e);
                }
            }
        }
    }
    if set.exchange {
        for base in Subset::all(n).filter(|s| !s.is_empty()) {
            let m = base.least().unwrap();
            for b in 1..m {
                for a in 1..b {
                    let e = PresentationElement::f(*ring, base.insert(b))
                        .times_u_i(a)
                        .sub(&PresentationElement::f(*ring, base.insert(a)).times_u_i(b));
                    for &l in &times_list {
                        let el = if l.is_empty() { e.clone() } else { e.times_f(l) };
                        if l.is_empty() || !el.is_zero() {
                            push(
                                RelationFamily::Exchange {
                                    base,
                                    a,
                                    b,
                                    times: l,
                                },
                                el,
                            );
                        }
                    }
                }
            }
        }
    }
    if set.product {
        for &i in &words {
            for &j in &words {
                push(
                    RelationFamily::Product {
                        factors: vec![i, j],
                    },
                    product_reduce(ring, i, j),
                );
            }
        }
        for &k in &words {
            for &i in &words {
                for &j in &words {
                    let left = product_reduce(ring, k, i).times_f(j);
                    let right = PresentationElement::f(*ring, k).times_f_element(
                        &product_reduce(ring, i, j),
                    );
                    let e = left.sub(&right);
                    if !e.is_zero() {
                        push(
                            RelationFamily::Product {
                                factors: vec![k, i, j],
                            },
                            e,
                        );
                    }
                }
            }
        }
    }
    out
}

impl PresentationElement {
    /// `self * x` for a single-word `self = f_K` times an element `x`.
    fn times_f_element(&self, x: &PresentationElement) -> PresentationElement {
        let mut out = PresentationElement::zero(self.ring);
        for (w, c) in x.terms() {
            let m = Monomial::new(w.a, w.q);
            out = out.add(&self.times_f(w.f).mul_monomial(&m).scale(c));
        }
        out
    }
}

/// The spanning words of slice `(s, t)` at weight `d`.
fn slice_words(ring: &Ring, s: usize, t: u32, d: u32) -> Vec<Word> {
    let mut out = Vec::new();
    if t % 2 != 0 {
        return out;
    }
    let sets: Vec<Subset> = if s == 0 {
        vec![Subset::EMPTY]
    } else {
        Subset::of_size(ring.n, s + 1).collect()
    };
    for f in sets {
        let fd = f_degree(ring, f);
        if fd > t {
            continue;
        }
        for q in monomials_of_degree(ring.vars(), d) {
            out.push(Word {
                f,
                a: (t - fd) / 2,
                q,
            });
        }
    }
    out
}

/// Dimension and normal-basis labels of `A/𝔞` in `(s, t)`, summed over
/// weights `< N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationSlice {
    pub s: usize,
    pub t: u32,
    pub dim: usize,
    pub basis: Vec<Word>,
}

pub fn presentation_slice_with(
    params: &Params,
    relations: &[Relation],
    s: usize,
    t: u32,
) -> Result<PresentationSlice, HomologyError> {
    let ring = params.ring;
    if s >= ring.n || t % 2 != 0 {
        return Err(HomologyError::BadBidegree { s, t });
    }
    let mut basis = Vec::new();
    for d in 0..params.adic_precision {
        let words = slice_words(&ring, s, t, d);
        if words.is_empty() {
            continue;
        }
        let index: BTreeMap<Word, usize> =
            words.iter().enumerate().map(|(k, w)| (*w, k)).collect();
        let mut span = Subspace::new(ring.p, words.len());
        for r in relations.iter().filter(|r| r.is_linear()) {
            let Some((rs, rt, rd)) = r.element.grading() else {
                continue;
            };
            if rs != s || rt > t || rd > d {
                continue;
            }
            for q in monomials_of_degree(ring.vars(), d - rd) {
                let m = r.element.mul_monomial(&Monomial::new((t - rt) / 2, q));
                let mut v = vec![0; words.len()];
                for (w, c) in m.terms() {
                    v[index[w]] = c;
                }
                span.add(&v);
            }
        }
        for (k, w) in words.iter().enumerate() {
            let mut v = vec![0; words.len()];
            v[k] = 1;
            if span.add(&v) {
                basis.push(*w);
            }
        }
    }
    Ok(PresentationSlice {
        s,
        t,
        dim: basis.len(),
        basis,
    })
}

pub fn presentation_slice(
    params: &Params,
    s: usize,
    t: u32,
) -> Result<PresentationSlice, HomologyError> {
    let rels = relation_generators(&params.ring, RelationSet::ALL);
    presentation_slice_with(params, &rels, s, t)
}

pub fn presentation_table_with(
    params: &Params,
    relations: &[Relation],
) -> Result<BigradedTable, HomologyError> {
    let s_max = params.n().saturating_sub(1);
    let cells: Vec<(usize, u32)> = (0..=s_max)
        .flat_map(|s| (0..=params.t_max).step_by(2).map(move |t| (s, t)))
        .collect();
    let slices: Vec<PresentationSlice> = cells
        .par_iter()
        .map(|&(s, t)| presentation_slice_with(params, relations, s, t))
        .collect::<Result<_, _>>()?;
    let mut table = BigradedTable::default();
    for sl in slices {
        let basis = sl.basis.iter().map(|w| w.to_string()).collect();
        table.insert(sl.s, sl.t, TableEntry { dim: sl.dim, basis });
    }
    Ok(table)
}

/// One symbolic check: `ψ` of a relation is an exact boundary.
#[derive(Debug, Clone, Serialize)]
pub struct SymbolicCheck {
    pub family: String,
    pub relation: String,
    pub ok: bool,
    pub witness: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct DimCheck {
    pub s: usize,
    pub t: u32,
    pub homology: usize,
    pub presentation: usize,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurjectivityCheck {
    pub s: usize,
    pub t: u32,
    pub representative: String,
    pub expression: String,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PresentationReport {
    pub symbolic: Vec<SymbolicCheck>,
    pub dims: Vec<DimCheck>,
    pub surjectivity: Vec<SurjectivityCheck>,
    /// Slices whose weight window was too small to be trusted.
    pub unstable: Vec<(usize, u32)>,
    pub verdict: bool,
    pub first_counterexample: Option<String>,
    pub notes: Vec<String>,
}

fn symbolic_check(ring: &Ring, r: &Relation) -> SymbolicCheck {
    let image = match &r.family {
        RelationFamily::Product { factors } if factors.len() == 2 => {
            let lhs = wedge(
                &psi(ring, factors[0]).unwrap(),
                &psi(ring, factors[1]).unwrap(),
            );
            lhs.sub(&r.element.to_koszul())
        }
        _ => r.element.to_koszul(),
    };
    let (ok, witness) = match is_boundary(&image) {
        Ok(b) => (true, b.to_json()),
        Err(e) => (false, serde_json::json!(e.to_string())),
    };
    SymbolicCheck {
        family: r.family.tag().to_string(),
        relation: r.family.to_string(),
        ok,
        witness,
    }
}

/// Check the presentation against Koszul homology on the whole window.
pub fn verify_presentation_with(params: &Params, set: RelationSet) -> PresentationReport {
    let ring = params.ring;
    let relations = relation_generators(&ring, set);
    let symbolic: Vec<SymbolicCheck> = relations
        .par_iter()
        .map(|r| symbolic_check(&ring, r))
        .collect();

    let cells: Vec<(usize, u32)> = (0..=ring.n)
        .flat_map(|s| (0..=params.t_max).step_by(2).map(move |t| (s, t)))
        .collect();
    let results: Vec<_> = cells
        .par_iter()
        .map(|&(s, t)| {
            let h = homology_slice(params, s, t).expect("bidegree in window");
            let pdim = if s < ring.n {
                presentation_slice_with(params, &relations, s, t)
                    .expect("bidegree in window")
                    .dim
            } else {
                0
            };
            let surj: Vec<SurjectivityCheck> = h
                .representatives
                .iter()
                .filter(|_| s >= 1)
                .map(|r| match reduce_cycle(r) {
                    Ok(c) => SurjectivityCheck {
                        s,
                        t,
                        representative: r.to_string(),
                        expression: c.label(),
                        ok: !c.reduced.is_empty(),
                    },
                    Err(e) => SurjectivityCheck {
                        s,
                        t,
                        representative: r.to_string(),
                        expression: e.to_string(),
                        ok: false,
                    },
                })
                .collect();
            (s, t, h.dim, pdim, h.window_exhausted, surj)
        })
        .collect();

    let mut dims = Vec::new();
    let mut surjectivity = Vec::new();
    let mut unstable = Vec::new();
    for (s, t, hd, pd, exhausted, surj) in results {
        if exhausted {
            unstable.push((s, t));
        }
        if hd != 0 || pd != 0 {
            dims.push(DimCheck {
                s,
                t,
                homology: hd,
                presentation: pd,
                ok: hd == pd && !exhausted,
            });
        }
        surjectivity.extend(surj);
    }

    let first_counterexample = symbolic
        .iter()
        .find(|c| !c.ok)
        .map(|c| format!("relation {} is not a boundary", c.relation))
        .or_else(|| {
            dims.iter().find(|d| !d.ok).map(|d| {
                format!(
                    "slice ({}, {}): homology {} vs presentation {}",
                    d.s, d.t, d.homology, d.presentation
                )
            })
        })
        .or_else(|| {
            surjectivity
                .iter()
                .find(|c| !c.ok)
                .map(|c| format!("cycle {} not reduced: {}", c.representative, c.expression))
        });
    PresentationReport {
        verdict: first_counterexample.is_none(),
        symbolic,
        dims,
        surjectivity,
        unstable,
        first_counterexample,
        notes: vec!["the relation p (i = 0) vanishes in characteristic p and is dropped".to_string()],
    }
}

pub fn verify_presentation(params: &Params) -> PresentationReport {
    verify_presentation_with(params, RelationSet::ALL)
}
