use std::collections::HashMap;
use std::sync::Arc;

use super::class::{structures_category, StructureCategory, TruncatedClass};
use super::{enumerate_embeddings, reduct, RelStructure, StructureError};
use crate::fincat::FinCategory;
use crate::setdiag::{SetDiagram, Solution};
use crate::transfer::product;

/// A configuration `B ← A → C` with no amalgam over the canonical union of
/// `B` and `C` along `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamationFailure {
    pub a: String,
    pub b: String,
    pub c: String,
    pub f: Vec<usize>,
    pub g: Vec<usize>,
    /// `h` is the identity on `B`; `k` places `C` into the union.
    pub k: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamationReport {
    pub configurations: usize,
    pub failure: Option<AmalgamationFailure>,
}

impl AmalgamationReport {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// Places `C` into `B ⊔_A C`: points of `g(A)` go to their `f`-images,
/// the rest follow `B` in order.
fn union_map(b_size: usize, c_size: usize, f: &[usize], g: &[usize]) -> Vec<usize> {
    let mut k = vec![usize::MAX; c_size];
    for (x, &gx) in g.iter().enumerate() {
        k[gx] = f[x];
    }
    for (next, slot) in (b_size..).zip(k.iter_mut().filter(|s| **s == usize::MAX)) {
        *slot = next;
    }
    k
}

/// Checks every `B ←f− A −g→ C` whose union `B ⊔_A C` has at most `bound`
/// points for a member on that union receiving both `B` and `C`. Only the
/// union itself is tried as the amalgam's domain: any `D` in the definition
/// restricts to it.
pub fn has_strong_amalgamation(class: &TruncatedClass, bound: usize) -> AmalgamationReport {
    let bound = bound.min(class.max_size());
    let mut on: HashMap<usize, Vec<RelStructure>> = HashMap::new();
    let mut configurations = 0;
    let members = class.members();
    for (ia, a) in members.iter().enumerate() {
        for (ib, b) in members.iter().enumerate() {
            let fs = enumerate_embeddings(a, b).expect("one signature");
            for (ic, c) in members.iter().enumerate() {
                if c.size() < a.size() || b.size() < a.size() || b.size() + c.size() - a.size() > bound {
                    continue;
                }
                let size = b.size() + c.size() - a.size();
                let gs = enumerate_embeddings(a, c).expect("one signature");
                let candidates = on.entry(size).or_insert_with(|| class.structures_on(size));
                let h: Vec<usize> = (0..b.size()).collect();
                for f in &fs {
                    for g in &gs {
                        configurations += 1;
                        let k = union_map(b.size(), c.size(), f, g);
                        if !candidates.iter().any(|d| b.is_embedding(d, &h) && c.is_embedding(d, &k)) {
                            return AmalgamationReport {
                                configurations,
                                failure: Some(AmalgamationFailure {
                                    a: class.name(ia).to_string(),
                                    b: class.name(ib).to_string(),
                                    c: class.name(ic).to_string(),
                                    f: f.clone(),
                                    g: g.clone(),
                                    k,
                                }),
                            };
                        }
                    }
                }
            }
        }
    }
    AmalgamationReport {
        configurations,
        failure: None,
    }
}

/// A structure on the domain of a surjection `π: D ↠ C` into which every
/// right inverse of `π` embeds `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Superposed {
    pub structure: RelStructure,
    /// Number of right inverses checked to be embeddings.
    pub right_inverses: usize,
}

/// Builds the structure by induction on `|D|`: a bijective `π` transports
/// `C`; otherwise the lexicographically first pair `d₁ < d₂` with
/// `π(d₁) = π(d₂)` is collapsed, the smaller instance is solved, and the
/// first member of the class on `D` receiving it along both sections of
/// the collapse is taken.
pub fn superposition_structure(
    class: &TruncatedClass,
    c: &RelStructure,
    pi: &[usize],
) -> Result<Superposed, StructureError> {
    let mut hit = vec![false; c.size()];
    for &x in pi {
        if x >= c.size() {
            return Err(StructureError::NotSurjective);
        }
        hit[x] = true;
    }
    if hit.contains(&false) {
        return Err(StructureError::NotSurjective);
    }
    let mut cache = HashMap::new();
    let structure = build(class, c, pi, &mut cache)?;

    let fibers: Vec<Vec<usize>> = (0..c.size())
        .map(|x| (0..pi.len()).filter(|&d| pi[d] == x).collect())
        .collect();
    let mut right_inverses = 0;
    let mut choice = vec![0usize; c.size()];
    loop {
        let s: Vec<usize> = choice.iter().enumerate().map(|(x, &i)| fibers[x][i]).collect();
        if !c.is_embedding(&structure, &s) {
            return Err(StructureError::CertificateFailed(s));
        }
        right_inverses += 1;
        let mut pos = c.size();
        loop {
            if pos == 0 {
                return Ok(Superposed {
                    structure,
                    right_inverses,
                });
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < fibers[pos].len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

fn build(
    class: &TruncatedClass,
    c: &RelStructure,
    pi: &[usize],
    cache: &mut HashMap<usize, Vec<RelStructure>>,
) -> Result<RelStructure, StructureError> {
    let n = pi.len();
    let pair = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| pi[i] == pi[j]);
    let Some((d1, d2)) = pair else {
        let s = c.pullback(pi);
        if !class.contains_up_to_iso(&s) {
            return Err(StructureError::NoAmalgam { size: n });
        }
        return Ok(s);
    };
    // D′ = D ∖ {d₂}; s includes D′ back into D, s′ sends d₁ to d₂ instead
    let s: Vec<usize> = (0..n - 1).map(|x| if x < d2 { x } else { x + 1 }).collect();
    let mut s2 = s.clone();
    s2[d1] = d2;
    let q: Vec<usize> = s.iter().map(|&d| pi[d]).collect();
    let smaller = build(class, c, &q, cache)?;
    let candidates = cache.entry(n).or_insert_with(|| class.structures_on(n));
    candidates
        .iter()
        .find(|d| smaller.is_embedding(d, &s) && smaller.is_embedding(d, &s2))
        .cloned()
        .ok_or(StructureError::NoAmalgam { size: n })
}

/// All structures on `{0,…,n-1}`, `n ≤ bound`, whose reducts lie in the
/// two classes, named `e{n}.{k}`.
pub fn free_superposition(
    left: &TruncatedClass,
    right: &TruncatedClass,
    bound: usize,
) -> Result<TruncatedClass, StructureError> {
    let signature = left.signature().union(right.signature())?;
    let mut members = Vec::new();
    let start = if left.has_empty() && right.has_empty() { 0 } else { 1 };
    for n in start..=bound {
        let mut k = 0;
        let rs = right.structures_on(n);
        for a in left.structures_on(n) {
            for b in &rs {
                members.push((format!("e{n}.{k}"), a.merge(b)?));
                k += 1;
            }
        }
    }
    Ok(TruncatedClass::from_trusted(signature, members, bound))
}

/// A diagram on `𝒞 × 𝒟` whose carrier at `(C, D)` lists the structures
/// on `C × D` (point `(c,d)` at position `c·|D| + d`) from the free
/// superposition in which every section of either projection is an
/// embedding. Arrows act by pulling back along `f × g`.
#[derive(Clone, Debug)]
pub struct SuperpositionDiagram {
    pub category: Arc<FinCategory>,
    pub left: StructureCategory,
    pub right: StructureCategory,
    pub diagram: SetDiagram,
    /// The structure behind every carrier element.
    pub elements: Vec<Vec<RelStructure>>,
}

/// Calls `f` on every map `{0..n} → {0..m}`.
fn all_maps(n: usize, m: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if m == 0 {
        return n > 0 || f(&[]);
    }
    let mut t = vec![0; n];
    loop {
        if !f(&t) {
            return false;
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return true;
            }
            pos -= 1;
            t[pos] += 1;
            if t[pos] < m {
                break;
            }
            t[pos] = 0;
        }
    }
}

pub fn superposition_diagram(
    left: &TruncatedClass,
    right: &TruncatedClass,
    bound: usize,
) -> Result<SuperpositionDiagram, StructureError> {
    let needed = bound * bound;
    let available = left.max_size().min(right.max_size());
    if needed > available {
        return Err(StructureError::BoundTooSmall {
            bound,
            needed,
            available,
        });
    }
    left.signature().union(right.signature())?;
    let (lc, rc) = (structures_category(&left.truncate(bound)), structures_category(&right.truncate(bound)));
    let category = Arc::new(product(&lc.category, &rc.category));
    let (nl, nr) = (lc.category.num_objects(), rc.category.num_objects());
    let mut on_left = HashMap::new();
    let mut on_right = HashMap::new();
    let mut elements = Vec::with_capacity(nl * nr);
    let mut index: Vec<HashMap<RelStructure, usize>> = Vec::with_capacity(nl * nr);
    for i in 0..nl {
        for j in 0..nr {
            let (c, d) = (lc.structure(i), rc.structure(j));
            let (m, n) = (c.size(), d.size());
            let ls: Vec<&RelStructure> = on_left
                .entry(m * n)
                .or_insert_with(|| left.structures_on(m * n))
                .iter()
                .filter(|x| all_maps(m, n, |t| c.is_embedding(x, &t.iter().enumerate().map(|(a, &b)| a * n + b).collect::<Vec<_>>())))
                .collect();
            let ls: Vec<RelStructure> = ls.into_iter().cloned().collect();
            let rs: Vec<RelStructure> = on_right
                .entry(m * n)
                .or_insert_with(|| right.structures_on(m * n))
                .iter()
                .filter(|y| all_maps(n, m, |s| d.is_embedding(y, &s.iter().enumerate().map(|(b, &a)| a * n + b).collect::<Vec<_>>())))
                .cloned()
                .collect();
            let mut here = Vec::with_capacity(ls.len() * rs.len());
            for x in &ls {
                for y in &rs {
                    here.push(x.merge(y)?);
                }
            }
            index.push(here.iter().cloned().enumerate().map(|(k, e)| (e, k)).collect());
            elements.push(here);
        }
    }
    let carriers = elements
        .iter()
        .map(|es| es.iter().map(|e| e.to_string()).collect())
        .collect();
    let mut actions = Vec::with_capacity(category.num_arrows());
    for a in lc.category.arrows() {
        for b in rc.category.arrows() {
            let tgt = lc.category.tgt(a) * nr + rc.category.tgt(b);
            let src = lc.category.src(a) * nr + rc.category.src(b);
            let n = rc.structure(rc.category.tgt(b)).size();
            let map: Vec<usize> = lc.maps[a]
                .iter()
                .flat_map(|&x| rc.maps[b].iter().map(move |&y| x * n + y))
                .collect();
            let action = elements[tgt]
                .iter()
                .map(|e| {
                    index[src].get(&e.pullback(&map)).copied().ok_or_else(|| StructureError::NotClosed {
                        member: e.to_string(),
                        subset: map.iter().map(|x| x.to_string()).collect(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            actions.push(action);
        }
    }
    let diagram = SetDiagram::from_parts(&category, carriers, actions)?;
    Ok(SuperpositionDiagram {
        category,
        left: lc,
        right: rc,
        diagram,
        elements,
    })
}

impl SuperpositionDiagram {
    /// Whether the diagonal `e ↦ (e,e)` embeds `e` into the solution's
    /// structure at its pair of reducts; `None` when those reducts are not
    /// objects of the two categories.
    pub fn diagonal_embeds(&self, sol: &Solution, e: &RelStructure) -> Option<bool> {
        let e = e.with_numeric_domain();
        let find = |sc: &StructureCategory| -> Option<usize> {
            let r = reduct(&e, sc.class.signature()).ok()?;
            sc.class.members().iter().position(|m| m.with_numeric_domain() == r)
        };
        let (i, j) = (find(&self.left)?, find(&self.right)?);
        let obj = i * self.right.category.num_objects() + j;
        let g = &self.elements[obj][sol.get(obj)];
        let n = e.size();
        let diagonal: Vec<usize> = (0..n).map(|x| x * n + x).collect();
        Some(e.is_embedding(g, &diagonal))
    }
}
