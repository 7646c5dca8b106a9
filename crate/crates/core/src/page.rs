//! E₂-page bookkeeping for the Künneth spectral sequence
//! `Tor^{BP_*}(H_*(BP; F_p), e_{n*}) => H_*(e_n; F_p)`.
//!
//! Pages past E₂ are never materialized: all scans run against E₂
//! dimensions, which bound every later page from above.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::gring::{Params, Ring};
use crate::homology::{BigradedTable, HomologyError, TableEntry};
use crate::koszul::Subset;
use crate::massey::{bracket_verify, BracketReport, MasseyError};
use crate::presentation::{f_degree, presentation_table_with, relation_generators, RelationSet};

/// Largest cell whose basis labels are listed.
pub const LABEL_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PageError {
    #[error("page r' = {0} is not a valid comparison differential (need r' >= 2)")]
    InvalidDifferential(u32),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Massey(#[from] MasseyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum GeneratorKind {
    Polynomial,
    Exterior,
    TorModule,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub kind: GeneratorKind,
    pub s: usize,
    pub t: u32,
}

impl GeneratorSpec {
    pub fn new(name: impl Into<String>, kind: GeneratorKind, s: usize, t: u32) -> Self {
        GeneratorSpec {
            name: name.into(),
            kind,
            s,
            t,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.s as u32 + self.t
    }
}

/// Polynomial generators of `H_*(BP; F_p)` up to internal degree `t_max`:
/// `ξ_i²` at `2(2^i - 1)` for `p = 2`, `ξ_i` at `2(p^i - 1)` otherwise.
pub fn xi_generators(p: u32, t_max: u32) -> Vec<GeneratorSpec> {
    let mut out = Vec::new();
    for i in 1.. {
        let t = 2 * (p as u64).pow(i) - 2;
        if t > t_max as u64 || t == 0 {
            break;
        }
        let name = if p == 2 {
            format!("xi_{i}^2")
        } else {
            format!("xi_{i}")
        };
        out.push(GeneratorSpec::new(name, GeneratorKind::Polynomial, 0, t as u32));
    }
    out
}

/// `v̄_{n+k}`, `k >= 1`, in bidegree `(1, 2(p^{n+k} - 1))`, up to `t_max`.
pub fn vbar_generators(ring: &Ring, t_max: u32) -> Vec<GeneratorSpec> {
    let mut out = Vec::new();
    for k in 1.. {
        let t = 2 * ((ring.p as u64).pow((ring.n + k) as u32) - 1);
        if t > t_max as u64 {
            break;
        }
        out.push(GeneratorSpec::new(
            format!("vbar_{}", ring.n + k),
            GeneratorKind::Exterior,
            1,
            t as u32,
        ));
    }
    out
}

/// Generators of `A/𝔞`: `u`, `u_i` (`i < n`) and `f_I`.
pub fn tor_generators(ring: &Ring) -> Vec<GeneratorSpec> {
    let mut out = vec![GeneratorSpec::new("u", GeneratorKind::TorModule, 0, 2)];
    for i in 1..ring.n {
        out.push(GeneratorSpec::new(
            format!("u_{i}"),
            GeneratorKind::TorModule,
            0,
            0,
        ));
    }
    for i in Subset::all(ring.n).filter(|s| s.len() >= 2) {
        out.push(GeneratorSpec::new(
            format!("f_{i}"),
            GeneratorKind::TorModule,
            i.len() - 1,
            f_degree(ring, i),
        ));
    }
    out
}

#[derive(Debug, Clone)]
pub struct PageOptions {
    pub include_pbar: bool,
    /// Drop the `H_*(BP)` factor (the `Tor^{BP_*}(F_p, e_{n*})` variant).
    pub tor_over_bp: bool,
    /// Additional generators convolved into the page.
    pub extra: Vec<GeneratorSpec>,
}

impl PageOptions {
    /// Defaults for height `n`: the `F_p`-coefficient variant at `n = 5`.
    pub fn for_height(n: usize) -> Self {
        PageOptions {
            include_pbar: true,
            tor_over_bp: n >= 5,
            extra: Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PageTable {
    pub r: u32,
    pub t_max: u32,
    pub table: BigradedTable,
    pub generators: Vec<GeneratorSpec>,
}

type Cells = BTreeMap<(usize, u32), (usize, Vec<String>)>;

fn join_label(a: &str, b: &str) -> String {
    match (a, b) {
        ("1", x) | (x, "1") => x.to_string(),
        _ => format!("{a}*{b}"),
    }
}

fn convolve(acc: &Cells, factor: &Cells, t_max: u32) -> Cells {
    let mut out = Cells::new();
    for (&(s1, t1), (d1, l1)) in acc {
        for (&(s2, t2), (d2, l2)) in factor {
            if t1 + t2 > t_max {
                continue;
            }
            let cell = out.entry((s1 + s2, t1 + t2)).or_insert((0, Vec::new()));
            cell.0 += d1 * d2;
            for a in l1 {
                for b in l2 {
                    if cell.1.len() > LABEL_CAP {
                        break;
                    }
                    cell.1.push(join_label(a, b));
                }
            }
        }
    }
    out
}

fn generator_factor(g: &GeneratorSpec, t_max: u32) -> Cells {
    let mut cells = Cells::new();
    cells.insert((0, 0), (1, vec!["1".to_string()]));
    match g.kind {
        GeneratorKind::Exterior | GeneratorKind::TorModule => {
            if g.t <= t_max {
                cells.insert((g.s, g.t), (1, vec![g.name.clone()]));
            }
        }
        GeneratorKind::Polynomial => {
            if g.t == 0 && g.s == 0 {
                return cells;
            }
            let mut k = 1;
            while g.t * k <= t_max {
                let label = if k == 1 {
                    g.name.clone()
                } else {
                    format!("({})^{k}", g.name)
                };
                cells.insert((g.s * k as usize, g.t * k), (1, vec![label]));
                k += 1;
                if g.t == 0 {
                    break;
                }
            }
        }
    }
    cells
}

/// E₂ as the convolution `H_*(BP) ⊗ E(p̄) ⊗ A/𝔞 ⊗ E[v̄_{n+k}]`.
pub fn e2_table(params: &Params, opts: &PageOptions) -> Result<PageTable, PageError> {
    let ring = params.ring;
    let t_max = params.t_max;
    let relations = relation_generators(&ring, RelationSet::ALL);
    let tor = presentation_table_with(params, &relations)?;
    let mut acc: Cells = tor
        .cells
        .iter()
        .map(|(k, e)| {
            let labels = if e.dim <= LABEL_CAP {
                e.basis.clone()
            } else {
                Vec::new()
            };
            (*k, (e.dim, labels))
        })
        .collect();

    let mut generators = Vec::new();
    if !opts.tor_over_bp {
        generators.extend(xi_generators(ring.p, t_max));
    }
    if opts.include_pbar {
        generators.push(GeneratorSpec::new("pbar", GeneratorKind::Exterior, 1, 0));
    }
    generators.extend(vbar_generators(&ring, t_max));
    generators.extend(opts.extra.iter().cloned());
    for g in &generators {
        acc = convolve(&acc, &generator_factor(g, t_max), t_max);
    }
    generators.extend(tor_generators(&ring));

    let mut table = BigradedTable::default();
    for ((s, t), (dim, labels)) in acc {
        let basis = if dim <= LABEL_CAP { labels } else { Vec::new() };
        table.insert(s, t, TableEntry { dim, basis });
    }
    Ok(PageTable {
        r: 2,
        t_max,
        table,
        generators,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TargetScan {
    pub source: (usize, u32),
    pub r: u32,
    /// `None` when the target filtration is negative.
    pub target: Option<(usize, u32)>,
    pub dim: usize,
    pub basis: Vec<String>,
    /// Whether the target lies inside the computed window.
    pub in_window: bool,
    pub note: String,
}

/// The E₂ slice at `(s - r, t + r - 1)`.
pub fn differential_target_scan(page: &PageTable, g: &GeneratorSpec, r: u32) -> TargetScan {
    let source = (g.s, g.t);
    let mk = |target, dim, basis, in_window, note: &str| TargetScan {
        source,
        r,
        target,
        dim,
        basis,
        in_window,
        note: note.to_string(),
    };
    if (r as usize) > g.s {
        return mk(None, 0, Vec::new(), true, "negative filtration");
    }
    let target = (g.s - r as usize, g.t + r - 1);
    if target.1 % 2 == 1 {
        return mk(Some(target), 0, Vec::new(), true, "odd internal degree");
    }
    if target.1 > page.t_max {
        return mk(Some(target), 0, Vec::new(), false, "outside window");
    }
    let entry = page.table.cells.get(&target);
    let dim = entry.map_or(0, |e| e.dim);
    let basis = entry.map_or(Vec::new(), |e| e.basis.clone());
    let note = if dim == 0 {
        "empty"
    } else {
        "requires Massey argument"
    };
    mk(Some(target), dim, basis, true, note)
}

#[derive(Debug, Clone, Serialize)]
pub struct ParityReport {
    pub pass: bool,
    pub populated: usize,
    /// First odd-`t` cell, with its labels.
    pub witness: Option<(usize, u32, Vec<String>)>,
}

/// Every populated E₂ cell has even internal degree, so every `d_2` vanishes.
pub fn parity_collapse_check(params: &Params, opts: &PageOptions) -> Result<ParityReport, PageError> {
    let page = e2_table(params, opts)?;
    let witness = page
        .table
        .cells
        .iter()
        .find(|((_, t), _)| t % 2 == 1)
        .map(|((s, t), e)| (*s, *t, e.basis.clone()));
    Ok(ParityReport {
        pass: witness.is_none(),
        populated: page.table.cells.len(),
        witness,
    })
}

/// A possibly nonzero `d_r` on a class of filtration `a` and total degree `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypotheticalDifferential {
    pub label: String,
    pub filtration: usize,
    pub total_degree: u32,
    pub page: u32,
}

impl fmt::Display for HypotheticalDifferential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "d_{}({}) at filtration {}, total degree {}",
            self.page, self.label, self.filtration, self.total_degree
        )
    }
}

/// Pairs `(y, y')` with equal total degree, `a < a'` and `a + r > a' + r'`.
pub fn crossing_differential_check(
    defining: &[HypotheticalDifferential],
    candidates: &[HypotheticalDifferential],
) -> Result<Vec<(HypotheticalDifferential, HypotheticalDifferential)>, PageError> {
    if let Some(c) = candidates.iter().find(|c| c.page < 2) {
        return Err(PageError::InvalidDifferential(c.page));
    }
    let mut out = Vec::new();
    for y in defining {
        for c in candidates {
            if c.total_degree == y.total_degree
                && y.filtration < c.filtration
                && y.filtration + y.page as usize > c.filtration + c.page as usize
            {
                out.push((y.clone(), c.clone()));
            }
        }
    }
    Ok(out)
}

/// Every E₂ class in total degree `d` and filtration above `above` that
/// could support a nonzero `d_r`, `r >= 2`.
pub fn crossing_candidates(page: &PageTable, d: u32, above: usize) -> Vec<HypotheticalDifferential> {
    let mut out = Vec::new();
    for (&(s, t), e) in &page.table.cells {
        if s <= above || s as u32 + t != d {
            continue;
        }
        for r in 2..=s as u32 {
            let target = (s - r as usize, t + r - 1);
            if page.table.dim(target.0, target.1) > 0 {
                out.push(HypotheticalDifferential {
                    label: format!("E2({s},{t}) [dim {}]", e.dim),
                    filtration: s,
                    total_degree: d,
                    page: r,
                });
            }
        }
    }
    out
}

/// The two defining-system differentials `d_1 s = x̂y`, `d_1 t = ŷz` of
/// `<f_I, u^{w(min J)}, f_J>`.
pub fn defining_differentials(ring: &Ring, i: Subset, j: Subset) -> Vec<HypotheticalDifferential> {
    let (i0, j0) = (i.least().unwrap(), j.least().unwrap());
    let ts = 2 * (ring.w(j0) - ring.w(i0)) + i.internal_degree(ring);
    let tt = j.internal_degree(ring);
    vec![
        HypotheticalDifferential {
            label: format!("u^{}*v{}", ring.w(j0) - ring.w(i0), i),
            filtration: i.len(),
            total_degree: i.len() as u32 + ts,
            page: 1,
        },
        HypotheticalDifferential {
            label: format!("v{j}"),
            filtration: j.len(),
            total_degree: j.len() as u32 + tt,
            page: 1,
        },
    ]
}

/// An E₂ basis family `q u^k f_J` (or `q u^k`) surviving the zero rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtensionCandidate {
    pub s: usize,
    pub t: u32,
    pub k: u32,
    pub f: Vec<usize>,
    /// Indices `j` with `u_j` allowed in `q`.
    pub q_vars: Vec<usize>,
    pub label: String,
    pub note: Option<String>,
}

/// Candidates `q u^k f_J` of `A/𝔞` with `s' < below` and `s' + t' = d`.
///
/// Zero rules: `u^{w(n)} = 0`; `u_j u^{w(j)} = 0` restricts `q`;
/// `u^k f_J` with `k >= w(min J)` is zero on E₂ and is dropped, except when
/// `n ∈ J`, where it is kept and marked as needing `α_J f_J = 0`.
pub fn extension_search(ring: &Ring, d: u32, below: usize) -> Vec<ExtensionCandidate> {
    let n = ring.n;
    let mut out = Vec::new();
    for s in 0..below.min(n) {
        let sets: Vec<Subset> = if s == 0 {
            vec![Subset::EMPTY]
        } else {
            Subset::of_size(n, s + 1).collect()
        };
        for j in sets {
            let base = s as u32 + f_degree(ring, j);
            if d < base || (d - base) % 2 != 0 {
                continue;
            }
            let k = (d - base) / 2;
            if k >= ring.w(n) {
                continue;
            }
            let mut note = None;
            if let Some(j0) = j.least() {
                if k >= ring.w(j0) {
                    if !j.contains(n) {
                        continue;
                    }
                    note = Some(format!("needs alpha_J f_J = 0 for J = {j} (n in J)"));
                }
            }
            let q_vars: Vec<usize> = (1..n).filter(|&i| ring.w(i) > k).collect();
            let mut label = format!("q*u^{k}");
            if !j.is_empty() {
                label.push_str(&format!("*f_{j}"));
            }
            out.push(ExtensionCandidate {
                s,
                t: d - s as u32,
                k,
                f: j.indices(),
                q_vars,
                label,
                note,
            });
        }
    }
    out
}

/// Coefficients of a one-variable Poincaré series.
pub type Series = Vec<u64>;

fn series_mul(a: &Series, b: &Series) -> Series {
    let mut out = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(a.len() - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn polynomial_series(deg: u64, len: usize) -> Series {
    let mut s = vec![0; len];
    let mut k = 0;
    while k < len as u64 {
        s[k as usize] = 1;
        k += deg;
    }
    s
}

fn exterior_series(deg: u64, len: usize) -> Series {
    let mut s = vec![0; len];
    s[0] = 1;
    if (deg as usize) < len {
        s[deg as usize] += 1;
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct SplittingReport {
    pub pass: bool,
    pub degree: u32,
    /// `H_*(BP; F_p) ⊗ E[v̄_{n+1}, ...]` in total degree.
    pub lhs: Series,
    /// `H_*(BP<n>; F_p)`.
    pub rhs: Series,
}

/// Compare the Poincaré series of both sides of the splitting through `d_max`.
pub fn splitting_consistency(ring: &Ring, d_max: u32) -> SplittingReport {
    let len = d_max as usize + 1;
    let p = ring.p as u64;
    let mut lhs = vec![0; len];
    lhs[0] = 1;
    let mut rhs = lhs.clone();
    let mut i = 1u32;
    while p.pow(i) - 1 <= d_max as u64 + 1 {
        let xi = p.pow(i) - 1;
        if ring.p == 2 {
            lhs = series_mul(&lhs, &polynomial_series(2 * xi, len));
            if i as usize <= ring.n + 1 {
                rhs = series_mul(&rhs, &polynomial_series(2 * xi, len));
            } else {
                rhs = series_mul(&rhs, &polynomial_series(xi, len));
            }
        } else {
            lhs = series_mul(&lhs, &polynomial_series(2 * xi, len));
            rhs = series_mul(&rhs, &polynomial_series(2 * xi, len));
            if i as usize > ring.n {
                rhs = series_mul(&rhs, &exterior_series(2 * p.pow(i) - 1, len));
            }
        }
        i += 1;
    }
    for k in 1.. {
        let deg = 1 + 2 * (p.pow((ring.n + k) as u32) - 1);
        if deg > d_max as u64 {
            break;
        }
        lhs = series_mul(&lhs, &exterior_series(deg, len));
    }
    SplittingReport {
        pass: lhs == rhs,
        degree: d_max,
        lhs,
        rhs,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Permanence {
    PermanentByDegree,
    PermanentByMassey,
    Unresolved,
}

#[derive(Debug, Clone, Serialize)]
pub struct MasseyRoute {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub bracket: BracketReport,
    pub crossings: Vec<(HypotheticalDifferential, HypotheticalDifferential)>,
    pub crossing_candidates: usize,
    /// `α f = 0` for both outer entries, by empty extension searches.
    pub prerequisites: Vec<(String, Vec<ExtensionCandidate>)>,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorRow {
    pub name: String,
    pub s: usize,
    pub t: u32,
    pub status: Permanence,
    pub targets: Vec<TargetScan>,
    pub massey: Option<MasseyRoute>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionFact {
    pub relation: String,
    pub status: String,
    pub candidates: Vec<ExtensionCandidate>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CollapseReport {
    pub p: u32,
    pub n: usize,
    pub tor_over_bp: bool,
    pub include_pbar: bool,
    pub generators: Vec<GeneratorRow>,
    pub extensions: Vec<ExtensionFact>,
    pub notes: Vec<String>,
    pub verdict: bool,
}

fn alpha_prerequisite(ring: &Ring, j: Subset) -> (String, Vec<ExtensionCandidate>) {
    let j0 = j.least().unwrap();
    let d = (j.len() - 1) as u32 + 2 * ring.w(j0) + f_degree(ring, j);
    (
        format!("u^{}*f_{} = 0", ring.w(j0), j),
        extension_search(ring, d, j.len() - 1),
    )
}

/// Split `I` for the bracket route: `{i1, i2} | rest`.
fn massey_split(i: Subset) -> (Subset, Subset) {
    let idx = i.indices();
    let left = Subset::from_indices(&idx[..2]);
    let right = Subset::from_indices(&idx[2..]);
    (left, right)
}

fn massey_route(ring: &Ring, page: &PageTable, i: Subset) -> Result<MasseyRoute, PageError> {
    let (left, right) = massey_split(i);
    let bracket = bracket_verify(ring, left, right)?;
    let defining = defining_differentials(ring, left, right);
    let mut candidates = Vec::new();
    for y in &defining {
        candidates.extend(crossing_candidates(page, y.total_degree, y.filtration));
    }
    let crossings = crossing_differential_check(&defining, &candidates)?;
    let prerequisites = vec![alpha_prerequisite(ring, left), {
        // u^{w(min J)} f_J = α_J f_J for the right entry
        alpha_prerequisite(ring, right)
    }];
    let ok = bracket.contains_unit_multiple()
        && crossings.is_empty()
        && prerequisites.iter().all(|(_, c)| c.is_empty());
    Ok(MasseyRoute {
        left: left.indices(),
        right: right.indices(),
        bracket,
        crossings,
        crossing_candidates: candidates.len(),
        prerequisites,
        ok,
    })
}

fn extension_facts(ring: &Ring) -> Vec<ExtensionFact> {
    let n = ring.n;
    let mut facts = vec![ExtensionFact {
        relation: "u_i*u^w(i) = 0, u^w(n) = 0".to_string(),
        status: "HOLDS (filtration 0)".to_string(),
        candidates: Vec::new(),
    }];
    let mut holds: Vec<Subset> = Vec::new();
    for j in Subset::of_size(n, 2) {
        let (rel, cands) = alpha_prerequisite(ring, j);
        let ok = cands.is_empty();
        if ok {
            holds.push(j);
        }
        facts.push(ExtensionFact {
            relation: rel,
            status: if ok { "HOLDS" } else { "CANDIDATES" }.to_string(),
            candidates: cands,
        });
    }
    for size in 3..=n {
        for i in Subset::of_size(n, size).filter(|s| s.contains(n)) {
            let (_, cands) = alpha_prerequisite(ring, i);
            let inductive = cands.iter().all(|c| {
                let j = Subset::from_indices(&c.f);
                c.note.is_some() && j.len() < size && holds.contains(&j)
            });
            let status = if cands.is_empty() {
                "HOLDS".to_string()
            } else if inductive {
                "HOLDS (by induction on #I)".to_string()
            } else {
                "CANDIDATES".to_string()
            };
            if status.starts_with("HOLDS") {
                holds.push(i);
            }
            facts.push(ExtensionFact {
                relation: format!("alpha_{i}*f_{i} = 0"),
                status,
                candidates: cands,
            });
        }
    }
    if n == 4 {
        let f123 = Subset::from_indices(&[1, 2, 3]);
        let d = 2 * (2 + f_degree(ring, f123));
        let cands = extension_search(ring, d, 4);
        let ok = cands.iter().all(|c| {
            c.note.is_some() && holds.contains(&Subset::from_indices(&c.f))
        });
        facts.push(ExtensionFact {
            relation: "f_{1,2,3}^2 = 0".to_string(),
            status: if ok {
                "HOLDS (candidates vanish)"
            } else {
                "CANDIDATES"
            }
            .to_string(),
            candidates: cands,
        });
        facts.push(ExtensionFact {
            relation: format!("u^{}*f_{{1,2,3}} = 0", ring.p - 1),
            status: "UNKNOWN".to_string(),
            candidates: Vec::new(),
        });
    }
    facts
}

/// Permanence of every E₂ generator, plus the extension facts.
pub fn collapse_report(params: &Params, opts: &PageOptions) -> Result<CollapseReport, PageError> {
    let ring = params.ring;
    let page = e2_table(params, opts)?;
    let mut rows = Vec::new();
    for g in &page.generators {
        let fset = g.name.strip_prefix("f_").map(|_| {
            Subset::all(ring.n)
                .find(|s| s.len() >= 2 && format!("f_{s}") == g.name)
                .unwrap()
        });
        let targets: Vec<TargetScan> = (2..=g.s as u32)
            .map(|r| differential_target_scan(&page, g, r))
            .collect();
        let by_degree = targets.iter().all(|t| t.dim == 0 && t.in_window);
        let massey = match fset {
            Some(i) if i.len() >= 4 && (i.len() == 4 || ring.n == 5) => {
                Some(massey_route(&ring, &page, i)?)
            }
            _ => None,
        };
        let status = match &massey {
            Some(m) if m.ok => Permanence::PermanentByMassey,
            _ if by_degree => Permanence::PermanentByDegree,
            _ => Permanence::Unresolved,
        };
        rows.push(GeneratorRow {
            name: g.name.clone(),
            s: g.s,
            t: g.t,
            status,
            targets,
            massey,
        });
    }
    let mut notes = Vec::new();
    if opts.include_pbar {
        notes.push(
            "pbar is carried as a formal exterior generator in bidegree (1,0); an honest p-action \
             on integral coefficients gives no such class at n = 1"
                .to_string(),
        );
        notes.push("pbar is written inside a polynomial bracket at n = 2; it is treated as exterior here".to_string());
    }
    if ring.n > 4 {
        notes.push("n = 5: Tor over BP with F_p coefficients; collapse is not claimed beyond it".to_string());
    }
    let verdict = rows.iter().all(|r| r.status != Permanence::Unresolved);
    Ok(CollapseReport {
        p: ring.p,
        n: ring.n,
        tor_over_bp: opts.tor_over_bp,
        include_pbar: opts.include_pbar,
        generators: rows,
        extensions: extension_facts(&ring),
        notes,
        verdict,
    })
}
