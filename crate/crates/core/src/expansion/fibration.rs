use std::sync::Arc;

use super::{ExpansionError, FunctorData};
use crate::corpus;
use crate::fincat::{ArrId, Arrow, CategoryBuilder, FinCategory, ObjId};
use crate::setdiag::SetDiagram;

/// Outcome of the unique-lift check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FibrationCheck {
    Fibration,
    /// A total object `object` and base arrow `arrow` into its image with
    /// zero or several lifts ending at `object`.
    Violation {
        object: ObjId,
        arrow: ArrId,
        lifts: Vec<ArrId>,
    },
}

impl FibrationCheck {
    pub fn holds(&self) -> bool {
        matches!(self, FibrationCheck::Fibration)
    }
}

/// Does every base arrow into `F(E)` have exactly one lift ending at `E`?
pub fn is_discrete_fibration(f: &FunctorData) -> FibrationCheck {
    let (total, base) = (&f.source, &f.target);
    for e in total.objects() {
        for &b in base.in_arrows(f.objects[e]) {
            let lifts: Vec<ArrId> = total.in_arrows(e).iter().copied().filter(|&g| f.arrows[g] == b).collect();
            if lifts.len() != 1 {
                return FibrationCheck::Violation {
                    object: e,
                    arrow: b,
                    lifts,
                };
            }
        }
    }
    FibrationCheck::Fibration
}

/// A surjective discrete fibration `π: 𝓔 → 𝒞` with its fibers and lift
/// table precomputed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    functor: FunctorData,
    fibers: Vec<Vec<ObjId>>,
    fiber_pos: Vec<usize>,
    /// Position of each base arrow among the in-arrows of its target.
    in_pos: Vec<usize>,
    /// `lifts[e][in_pos[f]]` is the lift of `f` ending at `e`.
    lifts: Vec<Vec<ArrId>>,
}

/// Checks surjectivity and unique lifting.
pub fn as_expansion(f: FunctorData) -> Result<Expansion, ExpansionError> {
    let (total, base) = (f.source.clone(), f.target.clone());
    let mut fibers = vec![Vec::new(); base.num_objects()];
    let mut fiber_pos = vec![0; total.num_objects()];
    for e in total.objects() {
        let c = f.objects[e];
        fiber_pos[e] = fibers[c].len();
        fibers[c].push(e);
    }
    if let Some(c) = fibers.iter().position(|v| v.is_empty()) {
        return Err(ExpansionError::NotSurjective(base.object_name(c).to_string()));
    }
    if let FibrationCheck::Violation { object, arrow, lifts } = is_discrete_fibration(&f) {
        return Err(ExpansionError::NotFibration {
            object: total.object_name(object).to_string(),
            arrow: base.arrow_name(arrow).to_string(),
            lifts: lifts.len(),
        });
    }
    let mut in_pos = vec![0; base.num_arrows()];
    for c in base.objects() {
        for (i, &b) in base.in_arrows(c).iter().enumerate() {
            in_pos[b] = i;
        }
    }
    let lifts = total
        .objects()
        .map(|e| {
            let mut row = vec![0; base.in_arrows(f.objects[e]).len()];
            for &g in total.in_arrows(e) {
                row[in_pos[f.arrows[g]]] = g;
            }
            row
        })
        .collect();
    Ok(Expansion {
        functor: f,
        fibers,
        fiber_pos,
        in_pos,
        lifts,
    })
}

impl Expansion {
    pub fn functor(&self) -> &FunctorData {
        &self.functor
    }

    pub fn total(&self) -> &Arc<FinCategory> {
        &self.functor.source
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.functor.target
    }

    /// `π(e)`.
    pub fn project(&self, e: ObjId) -> ObjId {
        self.functor.objects[e]
    }

    pub fn project_arrow(&self, g: ArrId) -> ArrId {
        self.functor.arrows[g]
    }

    /// `π⁻¹(c)` in total-category declaration order.
    pub fn fiber(&self, c: ObjId) -> &[ObjId] {
        &self.fibers[c]
    }

    pub fn fiber_sizes(&self) -> Vec<usize> {
        self.fibers.iter().map(Vec::len).collect()
    }

    pub fn fiber_position(&self, e: ObjId) -> usize {
        self.fiber_pos[e]
    }

    /// The unique arrow ending at `e` over the base arrow `f`, which must end
    /// at `π(e)`.
    pub fn lift(&self, e: ObjId, f: ArrId) -> ArrId {
        assert_eq!(self.base().tgt(f), self.project(e), "base arrow does not end at π(e)");
        self.lifts[e][self.in_pos[f]]
    }

    /// Source of [`Self::lift`].
    pub fn lift_source(&self, e: ObjId, f: ArrId) -> ObjId {
        self.total().src(self.lift(e, f))
    }
}

/// `C ↦ π⁻¹(C)`; `f: C′ → C` sends `E` to the source of its lift.
pub fn expansion_to_diagram(pi: &Expansion) -> SetDiagram {
    let (total, base) = (pi.total(), pi.base());
    let carriers = base
        .objects()
        .map(|c| pi.fiber(c).iter().map(|&e| total.object_name(e).to_string()).collect())
        .collect();
    let actions = base
        .arrows()
        .map(|f| {
            pi.fiber(base.tgt(f))
                .iter()
                .map(|&e| pi.fiber_position(pi.lift_source(e, f)))
                .collect()
        })
        .collect();
    SetDiagram::from_parts(base, carriers, actions).expect("fibration gives a functorial diagram")
}

/// The category of elements: objects `(C,x)` for `x ∈ D_C`, and for each
/// `f: C′ → C` and `x ∈ D_C` an arrow `(f,x): (C′, D_f(x)) → (C, x)`,
/// projected to the base.
pub fn diagram_to_expansion(cat: &Arc<FinCategory>, diag: &SetDiagram) -> Result<Expansion, ExpansionError> {
    if let Some(&c) = diag.empty_carriers().first() {
        return Err(ExpansionError::EmptyCarrier(cat.object_name(c).to_string()));
    }
    let mut obj_id = vec![Vec::new(); cat.num_objects()];
    let mut objects = Vec::new();
    let mut obj_proj = Vec::new();
    for c in cat.objects() {
        for x in 0..diag.carrier_size(c) {
            obj_id[c].push(objects.len());
            objects.push(format!("({},{})", cat.object_name(c), diag.element_name(c, x)));
            obj_proj.push(c);
        }
    }
    let mut arr_id = vec![Vec::new(); cat.num_arrows()];
    let mut arrows = Vec::new();
    let mut arr_proj = Vec::new();
    let mut arr_elem = Vec::new();
    for f in cat.arrows() {
        let (s, t) = (cat.src(f), cat.tgt(f));
        for x in 0..diag.carrier_size(t) {
            arr_id[f].push(arrows.len());
            arrows.push(Arrow {
                name: format!("({},{})", cat.arrow_name(f), diag.element_name(t, x)),
                src: obj_id[s][diag.act(f, x)],
                tgt: obj_id[t][x],
            });
            arr_proj.push(f);
            arr_elem.push(x);
        }
    }
    let identities = cat
        .objects()
        .flat_map(|c| {
            let id = cat.identity(c);
            (0..diag.carrier_size(c)).map(|x| arr_id[id][x]).collect::<Vec<_>>()
        })
        .collect();
    let total = CategoryBuilder::from_parts(objects, arrows, identities, |g, f| {
        let c = cat.compose(arr_proj[g], arr_proj[f])?;
        Some(arr_id[c][arr_elem[g]])
    })?;
    let functor = FunctorData::new(Arc::new(total), cat.clone(), obj_proj, arr_proj)?;
    as_expansion(functor)
}

/// `id: 𝒞 → 𝒞` as an expansion with singleton fibers.
pub fn identity_expansion(cat: &Arc<FinCategory>) -> Expansion {
    as_expansion(FunctorData::identity(cat.clone())).expect("identity is an expansion")
}

/// Two disjoint copies of `cat` folded onto it. Labels of the second copy
/// carry a trailing `'`.
pub fn doubled_expansion(cat: &Arc<FinCategory>) -> Expansion {
    let total = corpus::coproduct(cat, cat, "'");
    let (n, m) = (cat.num_objects(), cat.num_arrows());
    let objects = (0..2 * n).map(|x| x % n).collect();
    let arrows = (0..2 * m).map(|f| f % m).collect();
    let functor = FunctorData::new(Arc::new(total), cat.clone(), objects, arrows).expect("fold is a functor");
    as_expansion(functor).expect("fold is an expansion")
}

/// An object bijection `𝓔_π → 𝓔_ρ` over the base that commutes with lifts,
/// if any. Arrows then correspond through unique lifting.
pub fn expansion_isomorphism(pi: &Expansion, rho: &Expansion) -> Result<Option<Vec<ObjId>>, ExpansionError> {
    if **pi.base() != **rho.base() {
        return Err(ExpansionError::BaseMismatch);
    }
    if pi.fiber_sizes() != rho.fiber_sizes() {
        return Ok(None);
    }
    let n = pi.total().num_objects();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; rho.total().num_objects()];
    Ok(iso_search(pi, rho, 0, &mut map, &mut used).then_some(map))
}

fn iso_search(pi: &Expansion, rho: &Expansion, e: ObjId, map: &mut [ObjId], used: &mut [bool]) -> bool {
    let total = pi.total();
    if e == total.num_objects() {
        return true;
    }
    for &cand in rho.fiber(pi.project(e)) {
        if used[cand] {
            continue;
        }
        map[e] = cand;
        let ok = total.in_arrows(e).iter().all(|&g| {
            let s = map[total.src(g)];
            s == usize::MAX || s == rho.lift_source(cand, pi.project_arrow(g))
        }) && total.out_arrows(e).iter().all(|&g| {
            let t = map[total.tgt(g)];
            t == usize::MAX || rho.lift_source(t, pi.project_arrow(g)) == cand
        });
        if ok {
            used[cand] = true;
            if iso_search(pi, rho, e + 1, map, used) {
                return true;
            }
            used[cand] = false;
        }
        map[e] = usize::MAX;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setdiag::solve;

    #[test]
    fn collapsed_chain_is_not_a_fibration() {
        let chain = Arc::new(corpus::chain(2));
        let point = Arc::new(corpus::point());
        let collapse = FunctorData::new(chain, point, vec![0, 0], vec![0, 0, 0]).unwrap();
        match is_discrete_fibration(&collapse) {
            FibrationCheck::Violation { object, lifts, .. } => {
                assert_eq!(object, 1);
                assert_eq!(lifts.len(), 2);
            }
            FibrationCheck::Fibration => panic!("expected a violation"),
        }
        assert!(matches!(as_expansion(collapse), Err(ExpansionError::NotFibration { lifts: 2, .. })));
    }

    #[test]
    fn identity_and_subcategory() {
        let chain = Arc::new(corpus::chain(3));
        let id = identity_expansion(&chain);
        assert_eq!(id.fiber_sizes(), vec![1, 1, 1]);
        assert!(is_discrete_fibration(id.functor()).holds());
        let d = expansion_to_diagram(&id);
        assert!(chain.objects().all(|c| d.carrier_size(c) == 1));

        let sub = Arc::new(chain.full_subcategory(&[0, 1]).unwrap());
        let incl = FunctorData::new(sub.clone(), chain.clone(), vec![0, 1], sub.arrows().map(|f| chain.arrow_id(sub.arrow_name(f)).unwrap()).collect()).unwrap();
        assert_eq!(as_expansion(incl), Err(ExpansionError::NotSurjective("3".into())));
    }

    #[test]
    fn doubled_expansion_diagram() {
        let chain = Arc::new(corpus::chain(3));
        let dbl = doubled_expansion(&chain);
        assert_eq!(dbl.fiber_sizes(), vec![2, 2, 2]);
        let d = expansion_to_diagram(&dbl);
        for f in chain.arrows() {
            let mut img = d.action(f).to_vec();
            img.sort_unstable();
            assert_eq!(img, vec![0, 1]);
        }
    }

    #[test]
    fn span_expansion_has_four_objects_and_no_solution() {
        let span = Arc::new(corpus::span());
        let d = crate::ramsey::confluence_counterexample_diagram(&span, 0, 1).unwrap();
        let e = diagram_to_expansion(&span, &d).unwrap();
        assert_eq!(e.total().num_objects(), 4);
        assert_eq!(solve(&span, &expansion_to_diagram(&e)), None);
    }

    #[test]
    fn roundtrips_are_isomorphic() {
        let chain = Arc::new(corpus::chain(3));
        let dbl = doubled_expansion(&chain);
        let back = diagram_to_expansion(&chain, &expansion_to_diagram(&dbl)).unwrap();
        assert!(expansion_isomorphism(&dbl, &back).unwrap().is_some());
        assert!(expansion_isomorphism(&dbl, &identity_expansion(&chain)).unwrap().is_none());

        let d = expansion_to_diagram(&back);
        let again = expansion_to_diagram(&diagram_to_expansion(&chain, &d).unwrap());
        assert_eq!(d.carrier(0).len(), again.carrier(0).len());
    }

    #[test]
    fn empty_carrier_rejected() {
        let chain = Arc::new(corpus::chain(2));
        let d = SetDiagram::from_parts(&chain, vec![vec![], vec![]], vec![vec![]; 3]).unwrap();
        assert_eq!(diagram_to_expansion(&chain, &d), Err(ExpansionError::EmptyCarrier("1".into())));
    }
}
