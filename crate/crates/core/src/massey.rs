//! Triple Massey products `<x, y, z> = { ŝz + x̂t : ∂s = x̂y, ∂t = ŷz }` in
//! the Koszul complex, and the brackets `<f_I, u^{w(min J)}, f_J>`.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::gring::{fp, Ring};
use crate::homology::{
    boundary_generators, class_label, cycle_basis, is_boundary, span, weight_basis,
    weight_components, weight_of, HomologyError,
};
use crate::koszul::{
    differential, hat, psi, sort_sign, wedge, DefiningSystem, KoszulElement, KoszulError, Subset,
};
use crate::linalg::Subspace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MasseyError {
    #[error("entry {0} of the bracket is not a cycle")]
    NotACycle(&'static str),
    #[error("bracket undefined: {0} is not a boundary")]
    BracketUndefined(&'static str),
    #[error("index pair ({i}, {j}) must be disjoint with min J > min I and both of size >= 2")]
    BadIndexPair { i: Subset, j: Subset },
    #[error("outer entries must be homogeneous in bidegree and weight")]
    InhomogeneousEntry,
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Koszul(#[from] KoszulError),
}

/// The subspace `B + x Z + Z z` in one bidegree, weight by weight.
#[derive(Debug, Clone)]
pub struct Indeterminacy {
    pub s: usize,
    pub t: u32,
    /// Bidegrees of the `H` factors in `[x] H` and `H [z]`.
    pub left_factor: Option<(usize, u32)>,
    pub right_factor: Option<(usize, u32)>,
    pieces: BTreeMap<u32, (crate::homology::SliceBasis, Subspace)>,
    /// Labels of classes spanning the indeterminacy modulo boundaries.
    pub basis: Vec<String>,
}

impl Indeterminacy {
    /// Dimension modulo boundaries.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Whether `c` lies in the span (zero counts).
    pub fn contains(&self, c: &KoszulElement) -> bool {
        weight_components(c).into_iter().all(|(w, part)| {
            self.pieces
                .get(&w)
                .and_then(|(b, sp)| b.coords(&part).map(|v| sp.contains(&v)))
                .unwrap_or(false)
        })
    }
}

fn outer_grading(x: &KoszulElement) -> Result<Option<(usize, u32, u32)>, MasseyError> {
    if x.is_zero() {
        return Ok(None);
    }
    let (s, t) = x.bidegree().ok_or(MasseyError::InhomogeneousEntry)?;
    let w = weight_of(x).ok_or(MasseyError::InhomogeneousEntry)?;
    Ok(Some((s, t, w)))
}

/// `B + x Z + Z z` in bidegree `(s, t)` at every weight in `weights`.
pub fn indeterminacy(
    x: &KoszulElement,
    z: &KoszulElement,
    s: usize,
    t: u32,
    weights: &[u32],
) -> Result<Indeterminacy, MasseyError> {
    let ring = x.ring();
    let gx = outer_grading(x)?;
    let gz = outer_grading(z)?;
    let mut pieces = BTreeMap::new();
    let mut labels = Vec::new();
    for &w in weights {
        let basis = weight_basis(&ring, s, t, w);
        let gens = boundary_generators(&ring, s, t, w);
        let mut extra = Vec::new();
        if let Some((sx, tx, wx)) = gx {
            if s >= sx && t >= tx && w >= wx {
                for c in cycle_basis(&ring, s - sx, t - tx, w - wx) {
                    extra.push(wedge(x, &c));
                }
            }
        }
        if let Some((sz, tz, wz)) = gz {
            if s >= sz && t >= tz && w >= wz {
                for c in cycle_basis(&ring, s - sz, t - tz, w - wz) {
                    extra.push(wedge(&c, z));
                }
            }
        }
        let mut sp = span(&basis, &gens);
        for e in &extra {
            if sp.add(&basis.coords(e).expect("product outside its piece")) {
                labels.push(class_label(e));
            }
        }
        pieces.insert(w, (basis, sp));
    }
    let factor = |g: Option<(usize, u32, u32)>| {
        g.and_then(|(a, b, _)| (s >= a && t >= b).then(|| (s - a, t - b)))
    };
    Ok(Indeterminacy {
        s,
        t,
        left_factor: factor(gx),
        right_factor: factor(gz),
        pieces,
        basis: labels,
    })
}

#[derive(Debug, Clone)]
pub struct MasseyResult {
    pub representative: KoszulElement,
    pub defining_system: DefiningSystem,
    pub indeterminacy: Indeterminacy,
}

impl MasseyResult {
    /// Whether `c` is an element of the bracket.
    pub fn contains(&self, c: &KoszulElement) -> bool {
        self.indeterminacy.contains(&c.sub(&self.representative))
    }
}

fn bidegree_sum(parts: &[&KoszulElement]) -> Option<(usize, u32)> {
    let mut s = 1;
    let mut t = 0;
    for x in parts {
        let (a, b) = x.bidegree()?;
        s += a;
        t += b;
    }
    Some((s, t))
}

fn weight_sum(parts: &[&KoszulElement]) -> Option<u32> {
    parts.iter().map(|x| weight_of(x)).sum()
}

/// `<x, y, z>` from boundary witnesses found by linear solves.
pub fn massey_triple(
    x: &KoszulElement,
    y: &KoszulElement,
    z: &KoszulElement,
) -> Result<MasseyResult, MasseyError> {
    for (e, name) in [(x, "x"), (y, "y"), (z, "z")] {
        if !differential(e).is_zero() {
            return Err(MasseyError::NotACycle(name));
        }
    }
    let xy = wedge(&hat(x)?, y);
    let yz = wedge(&hat(y)?, z);
    let s = is_boundary(&xy).map_err(|_| MasseyError::BracketUndefined("x̂y"))?;
    let t = is_boundary(&yz).map_err(|_| MasseyError::BracketUndefined("ŷz"))?;
    let ds = DefiningSystem {
        x: x.clone(),
        y: y.clone(),
        z: z.clone(),
        s,
        t,
    };
    let representative = ds.representative()?;
    let (bs, bt) = representative
        .bidegree()
        .or_else(|| bidegree_sum(&[x, y, z]))
        .unwrap_or((0, 0));
    let mut weights: Vec<u32> = weight_components(&representative).keys().copied().collect();
    if let Some(w) = weight_sum(&[x, y, z]) {
        weights.push(w);
    }
    weights.sort();
    weights.dedup();
    let indeterminacy = indeterminacy(x, z, bs, bt, &weights)?;
    Ok(MasseyResult {
        representative,
        defining_system: ds,
        indeterminacy,
    })
}

fn check_pair(i: Subset, j: Subset) -> Result<(usize, usize), MasseyError> {
    let bad = MasseyError::BadIndexPair { i, j };
    if i.len() < 2 || j.len() < 2 || i.intersects(j) {
        return Err(bad);
    }
    let (i0, j0) = (i.least().unwrap(), j.least().unwrap());
    if j0 <= i0 {
        return Err(bad);
    }
    Ok((i0, j0))
}

/// `x = f''_I`, `y = u^{w(j_0)}`, `z = f''_J`.
pub fn bracket_entries(
    ring: &Ring,
    i: Subset,
    j: Subset,
) -> Result<[KoszulElement; 3], MasseyError> {
    let (_, j0) = check_pair(i, j)?;
    Ok([
        psi(ring, i)?,
        KoszulElement::scalar(ring.u_pow(ring.w(j0))),
        psi(ring, j)?,
    ])
}

/// `s = (-1)^{#I} u^{w(j_0) - w(i_0)} v̄_I`, `t = -v̄_J`.
pub fn defining_system_for_f(
    ring: &Ring,
    i: Subset,
    j: Subset,
) -> Result<DefiningSystem, MasseyError> {
    let (i0, j0) = check_pair(i, j)?;
    let [x, y, z] = bracket_entries(ring, i, j)?;
    let coeff = ring.u_pow(ring.w(j0) - ring.w(i0)).scale(fp::sign(ring.p, i.len()));
    let ds = DefiningSystem {
        x,
        y,
        z,
        s: KoszulElement::basis(*ring, i, coeff),
        t: KoszulElement::word(*ring, j).neg(),
    };
    assert!(ds.is_valid()?, "defining system fails its boundary conditions");
    Ok(ds)
}

/// `(-1)^{#I + m(I, J)}`.
pub fn claimed_sign(i: Subset, j: Subset) -> i32 {
    if (i.len() + sort_sign(i, j)) % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BracketReport {
    pub p: u32,
    pub n: usize,
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub bidegree: (usize, u32),
    /// `(-1)^{#I + m(I, J)}`.
    pub claimed_sign: i32,
    /// `ε` with `ŝz + x̂t = ε f''_{I∪J}` exactly for the explicit system.
    pub explicit_sign: Option<i32>,
    /// Signs `ε` with `ε f_{I∪J}` in the bracket.
    pub contained_signs: Vec<i32>,
    pub indeterminacy_dim: usize,
    pub indeterminacy: Vec<String>,
    pub witness_s: serde_json::Value,
    pub witness_t: serde_json::Value,
    /// Membership of the claimed element.
    pub pass: bool,
}

impl BracketReport {
    /// Some unit multiple `±f_{I∪J}` lies in the bracket.
    pub fn contains_unit_multiple(&self) -> bool {
        !self.contained_signs.is_empty()
    }
}

fn sign_elem(p: u32, e: i32) -> u32 {
    if e > 0 {
        1
    } else {
        p - 1
    }
}

/// Check `(-1)^{#I + m(I, J)} f_{I∪J} ∈ <f_I, u^{w(j_0)}, f_J>`.
pub fn bracket_verify(ring: &Ring, i: Subset, j: Subset) -> Result<BracketReport, MasseyError> {
    let [x, y, z] = bracket_entries(ring, i, j)?;
    let result = massey_triple(&x, &y, &z)?;
    let f = psi(ring, i.union(j))?;
    let explicit = defining_system_for_f(ring, i, j)?.representative()?;
    let explicit_sign = [1, -1]
        .into_iter()
        .find(|&e| explicit == f.scale(sign_elem(ring.p, e)));
    let mut contained_signs: Vec<i32> = [1, -1]
        .into_iter()
        .filter(|&e| result.contains(&f.scale(sign_elem(ring.p, e))))
        .collect();
    contained_signs.dedup_by_key(|e| sign_elem(ring.p, *e));
    if ring.p == 2 {
        contained_signs.retain(|&e| e == 1);
    }
    let claimed = claimed_sign(i, j);
    let pass = result.contains(&f.scale(sign_elem(ring.p, claimed)));
    let bidegree = f.bidegree().expect("f'' is bihomogeneous");
    Ok(BracketReport {
        p: ring.p,
        n: ring.n,
        i: i.indices(),
        j: j.indices(),
        bidegree,
        claimed_sign: claimed,
        explicit_sign,
        contained_signs,
        indeterminacy_dim: result.indeterminacy.dim(),
        indeterminacy: result.indeterminacy.basis.clone(),
        witness_s: result.defining_system.s.to_json(),
        witness_t: result.defining_system.t.to_json(),
        pass,
    })
}

/// Every disjoint pair `I, J ⊆ [n]` with `#I, #J >= 2`, `min J > min I`.
pub fn admissible_pairs(n: usize) -> Vec<(Subset, Subset)> {
    let words: Vec<Subset> = Subset::all(n).filter(|s| s.len() >= 2).collect();
    let mut out = Vec::new();
    for &i in &words {
        for &j in &words {
            if check_pair(i, j).is_ok() {
                out.push((i, j));
            }
        }
    }
    out
}
