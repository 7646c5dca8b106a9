//! Exact sparse arithmetic in `S = F_p[u_1, ..., u_{n-1}][u]`.
//!
//! Internal degrees follow `|u| = 2`, `|u_i| = 0`. The variable `u_n` is the
//! unit: [`Ring::u_i`] returns `1` for `i == n`, so it is never stored.
//! Elements are finitely supported polynomials; power-series behaviour only
//! enters through [`RingElement::truncate_adic`] and adic dimension counts.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported height.
pub const MAX_HEIGHT: usize = 5;
/// Number of `u_i` slots carried by a monomial (`n - 1 <= 4`).
pub const MAX_VARS: usize = MAX_HEIGHT - 1;

/// Exponent vector of a monomial in `u_1, ..., u_{n-1}`.
pub type Exps = [u16; MAX_VARS];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("{element} is not divisible by u^{k}")]
    NotDivisible { element: String, k: u32 },
    #[error("{element} is not in the ideal (u_j : j < {j0})")]
    NotInIdeal { element: String, j0: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("p = {0} is not prime")]
    NotPrime(u32),
    #[error("height n = {0} is outside 1..=5")]
    HeightOutOfRange(usize),
    #[error("adic precision must be at least 1")]
    ZeroPrecision,
    #[error("tMax = {0} must be even")]
    OddTMax(u32),
    #[error("p = {p}, n = {n} overflows the supported degree range")]
    TooLarge { p: u32, n: usize },
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Scalar arithmetic in `F_p` on canonical representatives `0..p`.
pub mod fp {
    #[inline]
    pub fn add(p: u32, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= p {
            s - p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(p: u32, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + p - b
        }
    }

    #[inline]
    pub fn neg(p: u32, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            p - a
        }
    }

    #[inline]
    pub fn mul(p: u32, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % p as u64) as u32
    }

    pub fn pow(p: u32, mut a: u32, mut e: u64) -> u32 {
        let mut r = 1 % p;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(p, r, a);
            }
            a = mul(p, a, a);
            e >>= 1;
        }
        r
    }

    /// Inverse of a nonzero element.
    pub fn inv(p: u32, a: u32) -> u32 {
        assert!(a % p != 0, "zero has no inverse");
        pow(p, a, p as u64 - 2)
    }

    /// `(-1)^k` as an element of `F_p`.
    #[inline]
    pub fn sign(p: u32, k: usize) -> u32 {
        if k % 2 == 0 {
            1 % p
        } else {
            p - 1
        }
    }

    /// Reduce a signed integer.
    pub fn from_i64(p: u32, x: i64) -> u32 {
        x.rem_euclid(p as i64) as u32
    }

    /// Symmetric lift used for printing (`p - 1` prints as `-1`).
    pub fn lift(p: u32, a: u32) -> i64 {
        if p > 2 && a > p / 2 {
            a as i64 - p as i64
        } else {
            a as i64
        }
    }
}

/// The prime and the height; everything needed to do arithmetic in `S`
/// and in the Koszul complex over it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ring {
    pub p: u32,
    pub n: usize,
}

impl Ring {
    pub fn new(p: u32, n: usize) -> Result<Self, ParamError> {
        if !is_prime(p) {
            return Err(ParamError::NotPrime(p));
        }
        if n == 0 || n > MAX_HEIGHT {
            return Err(ParamError::HeightOutOfRange(n));
        }
        // internal degrees of the largest exterior word must fit comfortably
        let top = (p as u64).checked_pow(n as u32 + 1);
        match top {
            Some(v) if v < (1 << 28) => Ok(Ring { p, n }),
            _ => Err(ParamError::TooLarge { p, n }),
        }
    }

    /// `w(i) = p^i - 1`.
    pub fn w(&self, i: usize) -> u32 {
        self.p.pow(i as u32) - 1
    }

    /// Number of power-series variables `u_1, ..., u_{n-1}`.
    pub fn vars(&self) -> usize {
        self.n - 1
    }

    pub fn zero(&self) -> RingElement {
        RingElement {
            ring: *self,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> RingElement {
        self.constant(1)
    }

    pub fn constant(&self, c: i64) -> RingElement {
        self.term(fp::from_i64(self.p, c), Monomial::one())
    }

    pub fn term(&self, coeff: u32, m: Monomial) -> RingElement {
        let mut r = self.zero();
        let c = coeff % self.p;
        if c != 0 {
            r.terms.insert(m, c);
        }
        r
    }

    /// `u^k`.
    pub fn u_pow(&self, k: u32) -> RingElement {
        self.term(1, Monomial::u_pow(k))
    }

    /// `u_i` for `1 <= i <= n`; `u_n = 1`.
    pub fn u_i(&self, i: usize) -> RingElement {
        assert!(i >= 1 && i <= self.n, "u_{i} out of range for n = {}", self.n);
        if i == self.n {
            self.one()
        } else {
            self.term(1, Monomial::var(i))
        }
    }
}

/// `u^a * u_1^{e_1} ... u_{n-1}^{e_{n-1}}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial {
    pub a: u32,
    pub e: Exps,
}

impl Monomial {
    pub const fn one() -> Self {
        Monomial {
            a: 0,
            e: [0; MAX_VARS],
        }
    }

    pub const fn new(a: u32, e: Exps) -> Self {
        Monomial { a, e }
    }

    pub fn u_pow(a: u32) -> Self {
        Monomial { a, e: [0; MAX_VARS] }
    }

    /// The variable `u_i`, `1 <= i <= 4`.
    pub fn var(i: usize) -> Self {
        let mut e = [0; MAX_VARS];
        e[i - 1] = 1;
        Monomial { a: 0, e }
    }

    pub fn internal_degree(&self) -> u32 {
        2 * self.a
    }

    pub fn adic_order(&self) -> u32 {
        self.e.iter().map(|&x| x as u32).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = self.e;
        for (x, y) in e.iter_mut().zip(other.e.iter()) {
            *x += *y;
        }
        Monomial {
            a: self.a + other.a,
            e,
        }
    }

    /// Multiply by `u_i`, treating `u_n` as the unit.
    pub fn times_var(&self, i: usize, n: usize) -> Monomial {
        let mut m = *self;
        if i < n {
            m.e[i - 1] += 1;
        }
        m
    }

    fn key(&self) -> [u32; MAX_VARS + 1] {
        let mut k = [0; MAX_VARS + 1];
        k[0] = self.a;
        for (i, &x) in self.e.iter().enumerate() {
            k[i + 1] = x as u32;
        }
        k
    }
}

impl Ord for Monomial {
    /// Degree reverse lexicographic on `(a, e_1, ..., e_4)`.
    fn cmp(&self, other: &Self) -> Ordering {
        let (x, y) = (self.key(), other.key());
        let dx: u32 = x.iter().sum();
        let dy: u32 = y.iter().sum();
        dx.cmp(&dy).then_with(|| {
            for i in (0..x.len()).rev() {
                if x[i] != y[i] {
                    return y[i].cmp(&x[i]);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &x) in self.e.iter().enumerate() {
            match x {
                0 => {}
                1 => parts.push(format!("u_{}", i + 1)),
                _ => parts.push(format!("u_{}^{}", i + 1, x)),
            }
        }
        match self.a {
            0 => {}
            1 => parts.push("u".to_string()),
            a => parts.push(format!("u^{a}")),
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// A finitely supported element of `S`; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingElement {
    ring: Ring,
    terms: BTreeMap<Monomial, u32>,
}

impl RingElement {
    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, u32)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: u32) {
        let p = self.ring.p;
        let c = c % p;
        if c == 0 {
            return;
        }
        let slot = self.terms.entry(m).or_insert(0);
        *slot = fp::add(p, *slot, c);
        if *slot == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &RingElement) -> RingElement {
        debug_assert_eq!(self.ring, other.ring);
        let mut r = self.clone();
        for (m, c) in other.terms() {
            r.add_term(*m, c);
        }
        r
    }

    pub fn sub(&self, other: &RingElement) -> RingElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RingElement {
        self.scale(self.ring.p - 1)
    }

    pub fn scale(&self, c: u32) -> RingElement {
        let p = self.ring.p;
        let c = c % p;
        let mut r = self.ring.zero();
        if c == 0 {
            return r;
        }
        for (m, x) in self.terms() {
            r.terms.insert(*m, fp::mul(p, x, c));
        }
        r
    }

    pub fn mul(&self, other: &RingElement) -> RingElement {
        debug_assert_eq!(self.ring, other.ring);
        let p = self.ring.p;
        let mut r = self.ring.zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                r.add_term(m1.mul(m2), fp::mul(p, c1, c2));
            }
        }
        r
    }

    pub fn mul_monomial(&self, m: &Monomial) -> RingElement {
        let mut r = self.ring.zero();
        for (m1, c) in self.terms() {
            r.terms.insert(m1.mul(m), c);
        }
        r
    }

    /// The internal degree if the element is homogeneous and nonzero.
    pub fn internal_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Monomial::internal_degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Smallest adic order among the terms.
    pub fn adic_order(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::adic_order).min()
    }

    /// Exact quotient by `u^k`.
    pub fn divide_by_u_power(&self, k: u32) -> Result<RingElement, RingError> {
        let mut r = self.ring.zero();
        for (m, c) in self.terms() {
            if m.a < k {
                return Err(RingError::NotDivisible {
                    element: self.to_string(),
                    k,
                });
            }
            r.terms.insert(Monomial::new(m.a - k, m.e), c);
        }
        Ok(r)
    }

    /// Write `self = sum_{j < j0} s_j u_j`, assigning each monomial to the
    /// smallest `u_j` dividing it.
    pub fn monomial_ideal_decompose(
        &self,
        j0: usize,
    ) -> Result<BTreeMap<usize, RingElement>, RingError> {
        let mut out: BTreeMap<usize, RingElement> = BTreeMap::new();
        for (m, c) in self.terms() {
            let j = (1..j0.min(self.ring.n))
                .find(|&j| m.e[j - 1] > 0)
                .ok_or_else(|| RingError::NotInIdeal {
                    element: self.to_string(),
                    j0,
                })?;
            let mut q = *m;
            q.e[j - 1] -= 1;
            out.entry(j)
                .or_insert_with(|| self.ring.zero())
                .add_term(q, c);
        }
        Ok(out)
    }

    /// Drop every term of adic order `>= order`.
    pub fn truncate_adic(&self, order: u32) -> RingElement {
        let mut r = self.ring.zero();
        for (m, c) in self.terms() {
            if m.adic_order() < order {
                r.terms.insert(*m, c);
            }
        }
        r
    }

    /// Sorted term list `[coeff, a, e_1, ..., e_{n-1}]`.
    pub fn to_json(&self) -> serde_json::Value {
        let vars = self.ring.vars();
        let rows: Vec<Vec<u64>> = self
            .terms()
            .map(|(m, c)| {
                let mut row = vec![c as u64, m.a as u64];
                row.extend(m.e[..vars].iter().map(|&x| x as u64));
                row
            })
            .collect();
        serde_json::json!(rows)
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let p = self.ring.p;
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let c = fp::lift(p, *c);
            let (neg, mag) = (c < 0, c.unsigned_abs());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono = m.to_string();
            match (mag, mono.as_str()) {
                (1, _) => write!(f, "{mono}")?,
                (_, "1") => write!(f, "{mag}")?,
                _ => write!(f, "{mag}*{mono}")?,
            }
        }
        Ok(())
    }
}

impl Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: Self) -> RingElement {
        RingElement::add(self, rhs)
    }
}

impl Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: Self) -> RingElement {
        RingElement::sub(self, rhs)
    }
}

impl Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: Self) -> RingElement {
        RingElement::mul(self, rhs)
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement::neg(self)
    }
}

/// Validated run parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub ring: Ring,
    /// Truncation order in `m = (u_1, ..., u_{n-1})` for dimension counts.
    pub adic_precision: u32,
    pub t_max: u32,
}

impl Params {
    pub fn new(p: u32, n: usize, adic_precision: u32, t_max: u32) -> Result<Self, ParamError> {
        let ring = Ring::new(p, n)?;
        if adic_precision == 0 {
            return Err(ParamError::ZeroPrecision);
        }
        if t_max % 2 != 0 {
            return Err(ParamError::OddTMax(t_max));
        }
        Ok(Params {
            ring,
            adic_precision,
            t_max,
        })
    }

    /// Window large enough for every `f_I` bidegree plus one `u^{w(n)}` shift:
    /// `2 * sum_{i <= n} w(i) + 2 w(n)`.
    pub fn default_t_max(p: u32, n: usize) -> Result<u32, ParamError> {
        let ring = Ring::new(p, n)?;
        let s: u32 = (1..=n).map(|i| ring.w(i)).sum();
        Ok(2 * s + 2 * ring.w(n))
    }

    pub fn p(&self) -> u32 {
        self.ring.p
    }

    pub fn n(&self) -> usize {
        self.ring.n
    }

    pub fn w(&self, i: usize) -> u32 {
        self.ring.w(i)
    }
}

/// All monomials in `vars` variables of total degree `d`, in a fixed order.
pub fn monomials_of_degree(vars: usize, d: u32) -> Vec<Exps> {
    fn rec(vars: usize, idx: usize, left: u32, cur: &mut Exps, out: &mut Vec<Exps>) {
        if idx + 1 == vars {
            cur[idx] = left as u16;
            out.push(*cur);
            cur[idx] = 0;
            return;
        }
        for x in (0..=left).rev() {
            cur[idx] = x as u16;
            rec(vars, idx + 1, left - x, cur, out);
        }
        cur[idx] = 0;
    }
    let mut out = Vec::new();
    if vars == 0 {
        if d == 0 {
            out.push([0; MAX_VARS]);
        }
        return out;
    }
    rec(vars, 0, d, &mut [0; MAX_VARS], &mut out);
    out
}

pub fn exps_degree(e: &Exps) -> u32 {
    e.iter().map(|&x| x as u32).sum()
}

pub fn exps_mul(a: &Exps, b: &Exps) -> Exps {
    let mut r = *a;
    for (x, y) in r.iter_mut().zip(b.iter()) {
        *x += *y;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: u32, n: usize) -> Ring {
        Ring::new(p, n).unwrap()
    }

    #[test]
    fn add_cancels_in_characteristic_two() {
        let s = r(2, 3);
        let x = &s.u_i(1) + &s.u_pow(1);
        let y = &x + &s.u_pow(1);
        assert_eq!(y, s.u_i(1));
        let s3 = r(3, 3);
        let y3 = &(&s3.u_i(1) + &s3.u_pow(1)) + &s3.u_pow(1);
        assert_eq!(y3, &s3.u_i(1) + &s3.u_pow(1).scale(2));
        assert_eq!(&y3 + &s3.zero(), y3);
        assert_eq!(&s3.u_pow(3) + &s3.u_pow(3), s3.u_pow(3).scale(2));
    }

    #[test]
    fn mul_grading() {
        let s = r(3, 2);
        let x = &(&s.u_i(1) + &s.u_pow(1)) * &s.u_pow(2);
        let expect = &(&s.u_i(1) * &s.u_pow(2)) + &s.u_pow(3);
        assert_eq!(x, expect);
        let sq = &s.u_i(1) * &s.u_i(1);
        assert_eq!(sq, s.term(1, Monomial::new(0, [2, 0, 0, 0])));
        let m = &s.u_i(1) * &s.u_pow(3);
        assert_eq!(m.internal_degree(), Some(6));
        assert_eq!(m.adic_order(), Some(1));
    }

    #[test]
    fn u_n_is_the_unit() {
        let s = r(2, 2);
        assert_eq!(s.u_i(2), s.one());
        assert_eq!(Monomial::u_pow(3).times_var(2, 2), Monomial::u_pow(3));
    }

    #[test]
    fn divide_by_u_power_cases() {
        let s = r(2, 3);
        let x = &s.u_pow(3) + &(&s.u_i(1) * &s.u_pow(2));
        assert_eq!(
            x.divide_by_u_power(2).unwrap(),
            &s.u_pow(1) + &s.u_i(1)
        );
        let y = &s.u_pow(s.w(2)) * &s.u_i(2);
        assert_eq!(y.divide_by_u_power(3).unwrap(), s.u_i(2));
        assert!(matches!(
            s.u_i(1).divide_by_u_power(1),
            Err(RingError::NotDivisible { .. })
        ));
    }

    #[test]
    fn ideal_decomposition_cases() {
        let s = r(2, 3);
        let c = &(&s.u_i(1) * &s.u_pow(1)) + &(&s.u_i(2) * &s.u_i(2));
        let d = c.monomial_ideal_decompose(3).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[&1], s.u_pow(1));
        assert_eq!(d[&2], s.u_i(2));

        let s2 = r(2, 2);
        let sq = &s2.u_i(1) * &s2.u_i(1);
        let d = sq.monomial_ideal_decompose(2).unwrap();
        assert_eq!(d[&1], s2.u_i(1));
        assert!(matches!(
            s2.u_pow(2).monomial_ideal_decompose(2),
            Err(RingError::NotInIdeal { .. })
        ));
    }

    #[test]
    fn truncation_cases() {
        let s = r(2, 2);
        let u1 = s.u_i(1);
        let x = &(&s.one() + &u1) + &(&(&u1 * &u1) * &u1);
        assert_eq!(x.truncate_adic(3), &s.one() + &u1);
        assert_eq!(s.u_pow(2).truncate_adic(1), s.u_pow(2));
        let s3 = r(2, 3);
        assert!((&s3.u_i(1) * &s3.u_i(2)).truncate_adic(2).is_zero());
    }

    #[test]
    fn printing_and_json() {
        let s = r(3, 3);
        let x = &(&s.u_i(1) * &s.u_pow(2)) - &s.u_pow(3);
        assert_eq!(x.to_string(), "-u^3 + u_1*u^2");
        assert_eq!(x.to_json(), serde_json::json!([[1, 2, 1, 0], [2, 3, 0, 0]]));
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(4, 2, 3, 10).is_err());
        assert!(Params::new(7, 0, 3, 10).is_err());
        assert!(Params::new(2, 6, 3, 10).is_err());
        assert!(Params::new(2, 2, 0, 10).is_err());
        assert!(Params::new(2, 2, 3, 9).is_err());
        assert_eq!(Params::default_t_max(2, 2).unwrap(), 2 * (1 + 3) + 6);
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(monomials_of_degree(0, 0).len(), 1);
        assert!(monomials_of_degree(0, 2).is_empty());
        assert_eq!(monomials_of_degree(3, 4).len(), 15);
        assert!(monomials_of_degree(2, 3).iter().all(|e| exps_degree(e) == 3));
    }
}
