//! The Koszul complex `K(u_i u^{w(i)} : 1 <= i <= n)` over `S`.
//!
//! Exterior words `v̄_S` are stored with ascending indices; every sign goes
//! through [`sort_sign`].

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gring::{fp, Monomial, Ring, RingElement, RingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KoszulError {
    #[error("element is not homogeneous in total degree")]
    InhomogeneousInput,
    #[error("leading term of the zero element")]
    ZeroElement,
    #[error("psi needs #I >= 2, got {0}")]
    ShortIndexSet(Subset),
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A subset of `{1, ..., n}`; bit `i - 1` holds index `i`.
///
/// `Ord` is integer comparison of the mask, i.e. `S > T` iff the largest
/// element of the symmetric difference lies in `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_indices(idx: &[usize]) -> Subset {
        Subset(idx.iter().fold(0, |m, &i| {
            assert!(i >= 1 && i <= 32, "index {i} out of range");
            m | 1 << (i - 1)
        }))
    }

    pub fn singleton(i: usize) -> Subset {
        Subset(1 << (i - 1))
    }

    /// Every subset of `{1, ..., n}`.
    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        (0u32..1 << n).map(Subset)
    }

    /// Subsets of `{1, ..., n}` with exactly `k` elements, ascending.
    pub fn of_size(n: usize, k: usize) -> impl Iterator<Item = Subset> {
        Self::all(n).filter(move |s| s.len() == k)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i >= 1 && self.0 >> (i - 1) & 1 == 1
    }

    /// Ascending list of elements.
    pub fn indices(self) -> Vec<usize> {
        (1..=32).filter(|&i| self.contains(i)).collect()
    }

    pub fn least(self) -> Option<usize> {
        (!self.is_empty()).then(|| self.0.trailing_zeros() as usize + 1)
    }

    pub fn greatest(self) -> Option<usize> {
        (!self.is_empty()).then(|| 32 - self.0.leading_zeros() as usize)
    }

    pub fn union(self, o: Subset) -> Subset {
        Subset(self.0 | o.0)
    }

    pub fn intersects(self, o: Subset) -> bool {
        self.0 & o.0 != 0
    }

    pub fn insert(self, i: usize) -> Subset {
        Subset(self.0 | 1 << (i - 1))
    }

    pub fn remove(self, i: usize) -> Subset {
        Subset(self.0 & !(1 << (i - 1)))
    }

    /// `2 * sum_{i in S} w(i)`.
    pub fn internal_degree(self, ring: &Ring) -> u32 {
        2 * self.indices().iter().map(|&i| ring.w(i)).sum::<u32>()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.indices().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", s.join(","))
    }
}

/// `m(A, B) = #{(a, b) in A x B : a > b}`.
pub fn sort_sign(a: Subset, b: Subset) -> usize {
    a.indices()
        .iter()
        .map(|&x| (b.0 & ((1u32 << (x - 1)) - 1)).count_ones() as usize)
        .sum()
}

/// A finite sum `sum_S c_S v̄_S` with `c_S` in `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KoszulElement {
    ring: Ring,
    terms: BTreeMap<Subset, RingElement>,
}

impl KoszulElement {
    pub fn zero(ring: Ring) -> Self {
        KoszulElement {
            ring,
            terms: BTreeMap::new(),
        }
    }

    /// `c * v̄_S`.
    pub fn basis(ring: Ring, s: Subset, c: RingElement) -> Self {
        let mut x = Self::zero(ring);
        x.add_term(s, &c);
        x
    }

    /// `v̄_S` with coefficient 1.
    pub fn word(ring: Ring, s: Subset) -> Self {
        Self::basis(ring, s, ring.one())
    }

    pub fn scalar(c: RingElement) -> Self {
        Self::basis(c.ring(), Subset::EMPTY, c)
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (Subset, &RingElement)> + '_ {
        self.terms.iter().map(|(s, c)| (*s, c))
    }

    pub fn coefficient(&self, s: Subset) -> RingElement {
        self.terms.get(&s).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn support(&self) -> Vec<Subset> {
        self.terms.keys().copied().collect()
    }

    pub(crate) fn add_term(&mut self, s: Subset, c: &RingElement) {
        if c.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&s) {
            Some(old) => old.add(c),
            None => c.clone(),
        };
        if !merged.is_zero() {
            self.terms.insert(s, merged);
        }
    }

    pub(crate) fn add_monomial_term(&mut self, s: Subset, m: Monomial, c: u32) {
        let t = self.ring.term(c, m);
        self.add_term(s, &t);
    }

    pub fn add(&self, o: &KoszulElement) -> KoszulElement {
        let mut r = self.clone();
        for (s, c) in o.terms() {
            r.add_term(s, c);
        }
        r
    }

    pub fn sub(&self, o: &KoszulElement) -> KoszulElement {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> KoszulElement {
        self.scale(self.ring.p - 1)
    }

    pub fn scale(&self, c: u32) -> KoszulElement {
        let mut r = Self::zero(self.ring);
        for (s, x) in self.terms() {
            r.add_term(s, &x.scale(c));
        }
        r
    }

    pub fn mul_ring(&self, c: &RingElement) -> KoszulElement {
        let mut r = Self::zero(self.ring);
        for (s, x) in self.terms() {
            r.add_term(s, &x.mul(c));
        }
        r
    }

    /// `(s, t)` if every monomial term sits in one bidegree.
    pub fn bidegree(&self) -> Option<(usize, u32)> {
        let mut out = None;
        for (s, c) in self.terms() {
            for (m, _) in c.terms() {
                let d = (s.len(), m.internal_degree() + s.internal_degree(&self.ring));
                match out {
                    None => out = Some(d),
                    Some(o) if o != d => return None,
                    _ => {}
                }
            }
        }
        out
    }

    /// Total degree `s + t` if homogeneous in it.
    pub fn total_degree(&self) -> Option<u32> {
        let mut out = None;
        for (s, c) in self.terms() {
            for (m, _) in c.terms() {
                let d = s.len() as u32 + m.internal_degree() + s.internal_degree(&self.ring);
                match out {
                    None => out = Some(d),
                    Some(o) if o != d => return None,
                    _ => {}
                }
            }
        }
        out
    }

    pub fn truncate_adic(&self, order: u32) -> KoszulElement {
        let mut r = Self::zero(self.ring);
        for (s, c) in self.terms() {
            r.add_term(s, &c.truncate_adic(order));
        }
        r
    }

    /// List of `[bitmask, terms]` pairs.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms()
                .map(|(s, c)| serde_json::json!([s.0, c.to_json()]))
                .collect(),
        )
    }
}

impl fmt::Display for KoszulElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .rev()
            .map(|(s, c)| {
                if s.is_empty() {
                    format!("({c})")
                } else {
                    let word: String = s.indices().iter().map(|i| i.to_string()).collect();
                    format!("({c})*v{word}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `∂(r v̄_S) = sum_k (-1)^{k-1} r u_{i_k} u^{w(i_k)} v̄_{S \ i_k}`.
pub fn differential(c: &KoszulElement) -> KoszulElement {
    let ring = c.ring;
    let p = ring.p;
    let mut out = KoszulElement::zero(ring);
    for (s, coeff) in c.terms() {
        for (k, i) in s.indices().into_iter().enumerate() {
            let target = s.remove(i);
            let sign = fp::sign(p, k);
            let mut image = ring.zero();
            for (m, x) in coeff.terms() {
                let shifted = Monomial::new(m.a + ring.w(i), m.e).times_var(i, ring.n);
                image.add_term(shifted, fp::mul(p, x, sign));
            }
            out.add_term(target, &image);
        }
    }
    out
}

/// Signed exterior product.
pub fn wedge(x: &KoszulElement, y: &KoszulElement) -> KoszulElement {
    let ring = x.ring;
    let mut out = KoszulElement::zero(ring);
    for (s, a) in x.terms() {
        for (t, b) in y.terms() {
            if s.intersects(t) {
                continue;
            }
            let mut c = a.mul(b);
            if sort_sign(s, t) % 2 == 1 {
                c = c.neg();
            }
            out.add_term(s.union(t), &c);
        }
    }
    out
}

/// `x̂ = (-1)^{|x| + 1} x` with `|x| = s + t`.
pub fn hat(x: &KoszulElement) -> Result<KoszulElement, KoszulError> {
    if x.is_zero() {
        return Ok(x.clone());
    }
    let d = x.total_degree().ok_or(KoszulError::InhomogeneousInput)?;
    Ok(if d % 2 == 0 { x.neg() } else { x.clone() })
}

/// `α_I = u^{w(min I)}`.
pub fn alpha(ring: &Ring, i: Subset) -> RingElement {
    ring.u_pow(ring.w(i.least().expect("alpha of empty set")))
}

/// `f''_I = ∂v̄_I / α_I`.
pub fn psi(ring: &Ring, i: Subset) -> Result<KoszulElement, KoszulError> {
    if i.len() < 2 {
        return Err(KoszulError::ShortIndexSet(i));
    }
    let k = ring.w(i.least().unwrap());
    let d = differential(&KoszulElement::word(*ring, i));
    let mut out = KoszulElement::zero(*ring);
    for (s, c) in d.terms() {
        out.add_term(s, &c.divide_by_u_power(k)?);
    }
    Ok(out)
}

/// `(J, c_J)` for `J = max supp(c)`.
pub fn leading_term(c: &KoszulElement) -> Result<(Subset, RingElement), KoszulError> {
    c.terms
        .iter()
        .next_back()
        .map(|(s, x)| (*s, x.clone()))
        .ok_or(KoszulError::ZeroElement)
}

/// Data of a defining system for `<x, y, z>`: `∂s = x̂ y`, `∂t = ŷ z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefiningSystem {
    pub x: KoszulElement,
    pub y: KoszulElement,
    pub z: KoszulElement,
    pub s: KoszulElement,
    pub t: KoszulElement,
}

impl DefiningSystem {
    /// Both boundary conditions, checked exactly.
    pub fn is_valid(&self) -> Result<bool, KoszulError> {
        let left = differential(&self.s) == wedge(&hat(&self.x)?, &self.y);
        let right = differential(&self.t) == wedge(&hat(&self.y)?, &self.z);
        Ok(left && right)
    }

    /// `ŝ z + x̂ t`.
    pub fn representative(&self) -> Result<KoszulElement, KoszulError> {
        Ok(wedge(&hat(&self.s)?, &self.z).add(&wedge(&hat(&self.x)?, &self.t)))
    }
}

/// A pseudo-random element with up to `max_terms` terms; exponents of `u`
/// stay below `max_u`, those of the `u_i` below 4.
pub fn random_element<R: Rng>(ring: Ring, rng: &mut R, max_terms: usize, max_u: u32) -> KoszulElement {
    let mut out = KoszulElement::zero(ring);
    for _ in 0..rng.gen_range(1..=max_terms) {
        let s = Subset(rng.gen_range(0..1u32 << ring.n));
        let mut e = [0; crate::gring::MAX_VARS];
        for x in e.iter_mut().take(ring.vars()) {
            *x = rng.gen_range(0..4);
        }
        let m = Monomial::new(rng.gen_range(0..max_u), e);
        let c = rng.gen_range(1..ring.p);
        out = out.add(&KoszulElement::basis(ring, s, ring.term(c, m)));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct DSquaredReport {
    pub p: u32,
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub failures: Vec<serde_json::Value>,
}

impl DSquaredReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `∂∂x = 0` on `samples` seeded random elements.
pub fn d_squared_check(ring: Ring, seed: u64, samples: usize) -> DSquaredReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let failures = (0..samples)
        .map(|_| random_element(ring, &mut rng, 6, 12))
        .filter(|x| !differential(&differential(x)).is_zero())
        .map(|x| x.to_json())
        .collect();
    DSquaredReport {
        p: ring.p,
        n: ring.n,
        seed,
        samples,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u32, n: usize) -> Ring {
        Ring::new(p, n).unwrap()
    }

    fn set(i: &[usize]) -> Subset {
        Subset::from_indices(i)
    }

    #[test]
    fn subset_order_is_largest_difference() {
        assert!(set(&[1, 3]) > set(&[1, 2]));
        assert!(set(&[3]) > set(&[1, 2]));
        assert!(set(&[2]) > set(&[1]));
        assert_eq!(set(&[2, 4]).least(), Some(2));
        assert_eq!(set(&[2, 4]).greatest(), Some(4));
        assert_eq!(Subset::of_size(4, 2).count(), 6);
    }

    #[test]
    fn differential_of_generator() {
        let r = ring(2, 2);
        let d = differential(&KoszulElement::word(r, set(&[1])));
        assert_eq!(d, KoszulElement::scalar(&r.u_i(1) * &r.u_pow(1)));
    }

    #[test]
    fn differential_of_pair() {
        let r = ring(2, 2);
        let d = differential(&KoszulElement::word(r, set(&[1, 2])));
        let expect = KoszulElement::basis(r, set(&[2]), &r.u_i(1) * &r.u_pow(1))
            .add(&KoszulElement::basis(r, set(&[1]), r.u_pow(3)));
        assert_eq!(d, expect);

        let r3 = ring(3, 2);
        let d3 = differential(&KoszulElement::word(r3, set(&[1, 2])));
        assert_eq!(d3.coefficient(set(&[1])), r3.u_pow(8).neg());
        assert_eq!(d3.coefficient(set(&[2])), &r3.u_i(1) * &r3.u_pow(2));
    }

    #[test]
    fn differential_squares_to_zero_on_words() {
        let r = ring(3, 3);
        let v = KoszulElement::word(r, set(&[1, 2, 3]));
        assert!(differential(&differential(&v)).is_zero());
    }

    #[test]
    fn wedge_signs() {
        let r = ring(3, 2);
        let v1 = KoszulElement::word(r, set(&[1]));
        let v2 = KoszulElement::word(r, set(&[2]));
        assert_eq!(wedge(&v2, &v1), KoszulElement::word(r, set(&[1, 2])).neg());
        assert!(wedge(&v1, &v1).is_zero());
        let lhs = differential(&wedge(&v1, &v2));
        let rhs = wedge(&differential(&v1), &v2).sub(&wedge(&v1, &differential(&v2)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn sort_sign_complementarity() {
        let (a, b) = (set(&[1, 3]), set(&[2, 4]));
        assert_eq!(sort_sign(a, b), 1);
        assert_eq!(sort_sign(b, a), 3);
        assert_eq!(sort_sign(set(&[2]), set(&[1])), 1);
    }

    #[test]
    fn hat_conventions() {
        let r = ring(3, 2);
        let x = KoszulElement::scalar(r.u_pow(r.w(2)));
        assert_eq!(hat(&x).unwrap(), x.neg());
        let f = psi(&r, set(&[1, 2])).unwrap();
        assert_eq!(hat(&f).unwrap(), f);
        assert_eq!(hat(&hat(&f).unwrap()).unwrap(), f);
        let bad = KoszulElement::scalar(&r.one() + &r.u_pow(1));
        assert_eq!(hat(&bad), Err(KoszulError::InhomogeneousInput));
    }

    #[test]
    fn psi_of_pair_and_triple() {
        let r = ring(2, 2);
        let f = psi(&r, set(&[1, 2])).unwrap();
        let expect = KoszulElement::basis(r, set(&[2]), r.u_i(1))
            .add(&KoszulElement::basis(r, set(&[1]), r.u_pow(2)));
        assert_eq!(f, expect);
        assert_eq!(leading_term(&f).unwrap(), (set(&[2]), r.u_i(1)));

        let r3 = ring(2, 3);
        let g = psi(&r3, set(&[1, 2, 3])).unwrap();
        assert_eq!(g.coefficient(set(&[2, 3])), r3.u_i(1));
        assert_eq!(g.coefficient(set(&[1, 3])), &r3.u_pow(2) * &r3.u_i(2));
        assert_eq!(g.coefficient(set(&[1, 2])), r3.u_pow(6));
        assert!(differential(&g).is_zero());
        assert!(psi(&r3, set(&[2])).is_err());
    }

    #[test]
    fn leading_term_cases() {
        let r = ring(2, 3);
        let x = KoszulElement::word(r, set(&[1, 3])).add(&KoszulElement::word(r, set(&[1, 2])));
        assert_eq!(leading_term(&x).unwrap(), (set(&[1, 3]), r.one()));
        assert_eq!(
            leading_term(&KoszulElement::zero(r)),
            Err(KoszulError::ZeroElement)
        );
    }

    #[test]
    fn json_shape() {
        let r = ring(2, 2);
        let f = psi(&r, set(&[1, 2])).unwrap();
        assert_eq!(
            f.to_json(),
            serde_json::json!([[1, [[1, 2, 0]]], [2, [[1, 0, 1]]]])
        );
    }
}
