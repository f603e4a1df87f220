//! Diagrams built from colorings, the two no-solution constructions, and
//! the constructive `M`-solution algorithm driven by chained witnesses.

use std::collections::HashMap;

use super::{copies, find_witness, is_constant, RamseyError};
use crate::fincat::{ArrId, FinCategory, ObjId};
use crate::setdiag::{SetDiagram, Solution};

/// Colorings larger than this are refused by the coloring diagrams.
const MAX_COLORINGS: usize = 1 << 22;

fn coloring_label(chi: &[usize], colors: usize) -> String {
    let parts: Vec<String> = chi.iter().map(|k| k.to_string()).collect();
    if colors <= 10 {
        parts.concat()
    } else {
        parts.join(".")
    }
}

fn all_colorings(len: usize, colors: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..colors).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

/// `C ↦` the colorings of `hom(A,C)` accepted by `keep`, acting by
/// `χ ↦ χ∘f_*`. Labels list the colors in hom-set order.
fn colorings_diagram(
    cat: &FinCategory,
    a: ObjId,
    colors: usize,
    keep: impl Fn(ObjId, &[usize]) -> bool,
) -> Result<SetDiagram, RamseyError> {
    if colors == 0 {
        return Err(RamseyError::InvalidColorCount(0));
    }
    let mut tables: Vec<Vec<Vec<usize>>> = Vec::with_capacity(cat.num_objects());
    for c in cat.objects() {
        let len = cat.hom(a, c).len();
        let total = (colors as f64).powi(len as i32);
        if total > MAX_COLORINGS as f64 {
            return Err(RamseyError::TooLarge(format!(
                "{colors}^{len} (hom({}, {}))",
                cat.object_name(a),
                cat.object_name(c)
            )));
        }
        tables.push(all_colorings(len, colors).into_iter().filter(|chi| keep(c, chi)).collect());
    }
    let index: Vec<HashMap<&[usize], usize>> = tables
        .iter()
        .map(|t| t.iter().enumerate().map(|(i, chi)| (chi.as_slice(), i)).collect())
        .collect();
    let mut actions = Vec::with_capacity(cat.num_arrows());
    for f in cat.arrows() {
        let (x, y) = (cat.src(f), cat.tgt(f));
        // f_*: hom(A,X) → hom(A,Y), as positions
        let push: Vec<usize> = cat
            .hom(a, x)
            .iter()
            .map(|&k| cat.hom_position(cat.compose(f, k).expect("composable")))
            .collect();
        let act = tables[y]
            .iter()
            .map(|chi| {
                let pulled: Vec<usize> = push.iter().map(|&p| chi[p]).collect();
                index[x].get(pulled.as_slice()).copied().ok_or_else(|| {
                    RamseyError::Diagram(crate::setdiag::DiagramError::NotAFunction {
                        arrow: cat.arrow_name(f).to_string(),
                        domain: cat.object_name(y).to_string(),
                        codomain: cat.object_name(x).to_string(),
                        reason: "pulled-back coloring left the carrier".into(),
                    })
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        actions.push(act);
    }
    let carriers = tables
        .iter()
        .map(|t| t.iter().map(|chi| coloring_label(chi, colors)).collect())
        .collect();
    Ok(SetDiagram::from_parts(cat, carriers, actions)?)
}

/// `C ↦` all colorings of `hom(A,C)` with `colors` colors. With `A` a
/// one-point object this is "colorings of points" with restriction maps.
pub fn coloring_diagram(cat: &FinCategory, a: ObjId, colors: usize) -> Result<SetDiagram, RamseyError> {
    colorings_diagram(cat, a, colors, |_, _| true)
}

/// `C ↦` the colorings of `hom(A,C)` that are constant on no copy
/// `h∘hom(A,B)`. A carrier is empty exactly when its object is a Ramsey
/// witness of `(A, B)`; when `D_B` is inhabited the diagram has no solution.
pub fn bad_coloring_diagram(cat: &FinCategory, a: ObjId, b: ObjId, colors: usize) -> Result<SetDiagram, RamseyError> {
    for x in [a, b] {
        super::check_object(cat, x)?;
    }
    let copy_sets: Vec<Vec<Vec<usize>>> = cat.objects().map(|c| copies(cat, a, b, c)).collect();
    colorings_diagram(cat, a, colors, |c, chi| {
        copy_sets[c].iter().all(|copy| !is_constant(chi, copy))
    })
}

/// The diagram `C ↦ {0}` when `hom(A,C) ≠ ∅`, `{1}` when `hom(B,C) ≠ ∅`,
/// `{0,1}` otherwise, with inclusions as actions. It has no solution when
/// `A` and `B` are connected without a common target.
pub fn confluence_counterexample_diagram(cat: &FinCategory, a: ObjId, b: ObjId) -> Result<SetDiagram, RamseyError> {
    for x in [a, b] {
        super::check_object(cat, x)?;
    }
    let name = |x: ObjId| cat.object_name(x).to_string();
    let comp = cat.component_of();
    if comp[a] != comp[b] {
        return Err(RamseyError::NotConnected { a: name(a), b: name(b) });
    }
    if let Some((apex, _)) = cat.common_target(&[a, b]) {
        return Err(RamseyError::ConfluentPair {
            a: name(a),
            b: name(b),
            apex: name(apex),
        });
    }
    let carriers: Vec<Vec<String>> = cat
        .objects()
        .map(|c| {
            if !cat.hom(a, c).is_empty() {
                vec!["0".to_string()]
            } else if !cat.hom(b, c).is_empty() {
                vec!["1".to_string()]
            } else {
                vec!["0".to_string(), "1".to_string()]
            }
        })
        .collect();
    let actions = cat
        .arrows()
        .map(|f| {
            let (x, y) = (cat.src(f), cat.tgt(f));
            carriers[y]
                .iter()
                .map(|e| carriers[x].iter().position(|z| z == e).expect("inclusion"))
                .collect()
        })
        .collect();
    Ok(SetDiagram::from_parts(cat, carriers, actions)?)
}

/// A copy `g∘hom(A,B)` on which `h ↦ D_h(x)` is constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonochromaticCopy {
    pub g: ArrId,
    /// The common value in `D_A`; absent when `hom(A,B)` is empty.
    pub value: Option<usize>,
}

/// Colors `hom(A,C)` by `h ↦ D_h(x)` and returns a `g: B → C` on whose copy
/// that coloring is constant.
pub fn monochromatic_copy(
    cat: &FinCategory,
    diag: &SetDiagram,
    a: ObjId,
    b: ObjId,
    c: ObjId,
    x: usize,
) -> Result<MonochromaticCopy, RamseyError> {
    for o in [a, b, c] {
        super::check_object(cat, o)?;
    }
    let chi: Vec<usize> = cat.hom(a, c).iter().map(|&h| diag.act(h, x)).collect();
    let copy_sets = copies(cat, a, b, c);
    let i = copy_sets
        .iter()
        .position(|copy| is_constant(&chi, copy))
        .ok_or_else(|| RamseyError::NotAWitness {
            b: cat.object_name(b).to_string(),
            c: cat.object_name(c).to_string(),
        })?;
    let g = cat.hom(b, c)[i];
    let value = copy_sets[i].first().map(|&p| chi[p]);
    // D_f(D_g(x)) is the same for every f: A → B
    debug_assert!(cat
        .hom(a, b)
        .iter()
        .all(|&f| Some(diag.act(f, diag.act(g, x))) == value));
    Ok(MonochromaticCopy { g, value })
}

/// Builds an `M`-solution from a common target `C_0` of the endpoints
/// `B_1 … B_n` of `M` and a chain of witnesses `C_i` of
/// `(B_i, C_{i-1}, |D_{B_i}|)` found in `ambient`; then walks back from the
/// first element of `D_{C_n}`, choosing at each step a copy on which the
/// induced coloring is constant. Coordinates off the endpoints take the
/// first element of their carrier.
///
/// Endpoints are tried in declaration order first. If some witness is
/// missing, the remaining orderings are tried, since any order gives a
/// valid construction; `NoWitness` reports the first failure seen.
pub fn iterated_m_solution(ambient: &FinCategory, diag: &SetDiagram, m: &[ArrId]) -> Result<Solution, RamseyError> {
    if let Some(&f) = m.iter().find(|&&f| f >= ambient.num_arrows()) {
        return Err(crate::fincat::CategoryError::UnknownArrow(format!("#{f}")).into());
    }
    if let Some(c) = diag.empty_carriers().first() {
        return Err(RamseyError::EmptyCarrier(ambient.object_name(*c).to_string()));
    }
    let mut endpoints: Vec<ObjId> = Vec::new();
    for &f in m {
        for o in [ambient.src(f), ambient.tgt(f)] {
            if !endpoints.contains(&o) {
                endpoints.push(o);
            }
        }
    }
    endpoints.sort_unstable();
    let mut sol = Solution(vec![0; ambient.num_objects()]);
    if endpoints.is_empty() {
        return Ok(sol);
    }

    let mut memo: HashMap<(ObjId, ObjId, usize), Option<ObjId>> = HashMap::new();
    let mut first_error = None;
    let mut order = endpoints.clone();
    loop {
        match construct(ambient, diag, &order, &mut memo) {
            Ok(values) => {
                for (&o, v) in order.iter().zip(values) {
                    sol.0[o] = v;
                }
                assert!(diag.satisfies(ambient, &sol, m), "constructed tuple violates M");
                return Ok(sol);
            }
            Err(e @ RamseyError::NoWitness { .. }) => {
                first_error.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
        if !next_permutation(&mut order) {
            return Err(first_error.expect("at least one ordering tried"));
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("successor exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Values at `order`'s objects, or the first missing cocone/witness.
fn construct(
    ambient: &FinCategory,
    diag: &SetDiagram,
    order: &[ObjId],
    memo: &mut HashMap<(ObjId, ObjId, usize), Option<ObjId>>,
) -> Result<Vec<usize>, RamseyError> {
    let names = |xs: &[ObjId]| xs.iter().map(|&x| ambient.object_name(x).to_string()).collect();
    let (c0, legs) = ambient
        .common_target(order)
        .ok_or_else(|| RamseyError::NoCocone(names(order)))?;

    // chain[i] = C_i
    let mut chain = vec![c0];
    for &bi in order {
        let prev = *chain.last().expect("nonempty");
        let colors = diag.carrier_size(bi);
        let key = (bi, prev, colors);
        let w = match memo.get(&key) {
            Some(&w) => w,
            None => {
                let w = find_witness(ambient, bi, prev, colors)?;
                memo.insert(key, w);
                w
            }
        };
        let w = w.ok_or_else(|| RamseyError::NoWitness {
            a: ambient.object_name(bi).to_string(),
            b: ambient.object_name(prev).to_string(),
            colors,
        })?;
        chain.push(w);
    }

    // walk back: x_{i-1} = D_{h_i}(x_i), accumulating h = h_n ∘ … ∘ h_i
    let n = order.len();
    let mut x = 0;
    let mut acc = ambient.identity(chain[n]);
    for i in (1..=n).rev() {
        let copy = monochromatic_copy(ambient, diag, order[i - 1], chain[i - 1], chain[i], x)?;
        x = diag.act(copy.g, x);
        acc = ambient.compose(acc, copy.g).expect("composable");
    }
    Ok(legs
        .iter()
        .map(|&g| diag.act(ambient.compose(acc, g).expect("composable"), 0))
        .collect())
}
