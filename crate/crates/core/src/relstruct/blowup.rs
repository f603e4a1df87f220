use std::collections::HashMap;
use std::sync::Arc;

use super::class::{structures_category, StructureCategory, TruncatedClass};
use super::{reduct, RelStructure, Signature, StructureError};
use crate::expansion::{as_expansion, expansion_isomorphism, Expansion, ExpansionError, FunctorData};
use crate::fincat::{ArrId, Arrow, CategoryBuilder, FinCategory, ObjId};
use crate::transfer::{grothendieck_elts, power, CatValuedFunctor, Elts};

/// `𝒞 ⋊ 𝒟` with its projection to `𝒞`.
#[derive(Clone, Debug)]
pub struct Blowup {
    pub category: Arc<FinCategory>,
    pub projection: FunctorData,
    /// `(C, (D_c)_c)` for every object.
    pub objects: Vec<(ObjId, Vec<ObjId>)>,
}

/// Mixed-radix tuples over `0..base` of length `n`, first coordinate
/// slowest; the same order as the objects of a power category.
fn tuples(base: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t: Vec<usize>| {
                (0..base).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

fn encode(t: &[usize], base: usize) -> usize {
    t.iter().fold(0, |acc, &x| acc * base + x)
}

fn cartesian(choices: &[Vec<ArrId>]) -> Vec<Vec<ArrId>> {
    let mut out = vec![vec![]];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|t: Vec<ArrId>| {
                c.iter().map(move |&x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// Objects `(C, (D_c)_{c∈C})`, arrows `(f, (g_c)_{c∈C})` with `f: C → C′`
/// and `g_c: D_c → D′_{f(c)}`, composed componentwise. Arrow names end
/// in `@target` since components off the image of `f` are free.
pub fn blowup(left: &TruncatedClass, right: &TruncatedClass) -> Blowup {
    let (lc, rc) = (structures_category(left), structures_category(right));
    let (lcat, rcat) = (&lc.category, &rc.category);
    let nr = rcat.num_objects();
    let mut objects = Vec::new();
    let mut obj_index = HashMap::new();
    let mut names = Vec::new();
    for c in lcat.objects() {
        for t in tuples(nr, lc.structure(c).size()) {
            let inner: Vec<&str> = t.iter().map(|&d| rcat.object_name(d)).collect();
            names.push(format!("({},({}))", lcat.object_name(c), inner.join(",")));
            obj_index.insert((c, t.clone()), objects.len());
            objects.push((c, t));
        }
    }
    let mut arrows: Vec<(ArrId, ObjId, Vec<ArrId>)> = Vec::new();
    let mut raw = Vec::new();
    let mut arr_index = HashMap::new();
    for f in lcat.arrows() {
        let (c, c2) = (lcat.src(f), lcat.tgt(f));
        let map = &lc.maps[f];
        for t2 in tuples(nr, lc.structure(c2).size()) {
            let tgt = obj_index[&(c2, t2.clone())];
            for t in tuples(nr, map.len()) {
                let src = obj_index[&(c, t.clone())];
                let choices: Vec<Vec<ArrId>> = (0..map.len()).map(|x| rcat.hom(t[x], t2[map[x]]).to_vec()).collect();
                for gs in cartesian(&choices) {
                    let inner: Vec<&str> = gs.iter().map(|&g| rcat.arrow_name(g)).collect();
                    raw.push(Arrow {
                        name: format!("({},({}))@{}", lcat.arrow_name(f), inner.join(","), names[tgt]),
                        src,
                        tgt,
                    });
                    arr_index.insert((f, src, tgt, gs.clone()), arrows.len());
                    arrows.push((f, src, gs));
                }
            }
        }
    }
    let identities = objects
        .iter()
        .enumerate()
        .map(|(i, (c, t))| arr_index[&(lcat.identity(*c), i, i, t.iter().map(|&d| rcat.identity(d)).collect::<Vec<_>>())])
        .collect();
    let category = CategoryBuilder::from_parts(names, raw.clone(), identities, |g, f| {
        let ((ff, src, gs), (gg, _, hs)) = (&arrows[f], &arrows[g]);
        let tgt = raw[g].tgt;
        let fg = lcat.compose(*gg, *ff)?;
        let map = &lc.maps[*ff];
        let comp = gs
            .iter()
            .enumerate()
            .map(|(x, &gx)| rcat.compose(hs[map[x]], gx))
            .collect::<Option<Vec<_>>>()?;
        arr_index.get(&(fg, *src, tgt, comp)).copied()
    })
    .expect("blowups are categories");
    let category = Arc::new(category);
    let projection = FunctorData::new(
        category.clone(),
        lcat.clone(),
        objects.iter().map(|(c, _)| *c).collect(),
        arrows.iter().map(|(f, _, _)| *f).collect(),
    )
    .expect("projection is a functor");
    Blowup {
        category,
        projection,
        objects,
    }
}

/// The blowup as the category of elements of `C ↦ 𝒟^C`, where an
/// embedding `f` places `D_c` at `f(c)` and pads with the empty structure.
/// `right` must contain the empty structure.
pub fn blowup_as_elts(left: &TruncatedClass, right: &TruncatedClass) -> Result<Elts, StructureError> {
    let empty = right
        .members()
        .iter()
        .position(|m| m.size() == 0)
        .ok_or(StructureError::NotClosed {
            member: "the fiber class".into(),
            subset: vec![],
        })?;
    let (lc, rc) = (structures_category(left), structures_category(right));
    let (lcat, rcat) = (&lc.category, &rc.category);
    let (no, na) = (rcat.num_objects(), rcat.num_arrows());
    let fibers: Vec<Arc<FinCategory>> = lcat
        .objects()
        .map(|c| Arc::new(power(rcat, lc.structure(c).size())))
        .collect();
    let empty_id = rcat.identity(empty);
    let mut transitions = Vec::with_capacity(lcat.num_arrows());
    for f in lcat.arrows() {
        let (c, c2) = (lcat.src(f), lcat.tgt(f));
        let (map, n2) = (&lc.maps[f], lc.structure(c2).size());
        let place = |t: &[usize], pad: usize| {
            let mut out = vec![pad; n2];
            for (x, &v) in t.iter().enumerate() {
                out[map[x]] = v;
            }
            out
        };
        let objects = tuples(no, map.len()).iter().map(|t| encode(&place(t, empty), no)).collect();
        let arrows = tuples(na, map.len()).iter().map(|t| encode(&place(t, empty_id), na)).collect();
        transitions.push(FunctorData::new(fibers[c].clone(), fibers[c2].clone(), objects, arrows)?);
    }
    let s = CatValuedFunctor::new(lcat.clone(), fibers, transitions)?;
    Ok(grothendieck_elts(&s)?)
}

/// The expansion forgetting the symbols of `expanded` outside the
/// signature of `base`: a member goes to the member of `base` with equal
/// reduct, an embedding to the same map.
pub fn concrete_expansion(
    expanded: &TruncatedClass,
    base: &TruncatedClass,
) -> Result<(Expansion, StructureCategory, StructureCategory), StructureError> {
    let (ec, bc) = (structures_category(expanded), structures_category(base));
    let objects = expanded
        .members()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let r = reduct(e, base.signature())?.with_numeric_domain();
            base.members()
                .iter()
                .position(|m| m.with_numeric_domain() == r)
                .ok_or_else(|| StructureError::NotDomainPreserving(expanded.name(i).to_string()))
        })
        .collect::<Result<Vec<ObjId>, _>>()?;
    let arrows = ec
        .category
        .arrows()
        .map(|g| {
            bc.arrow_for(objects[ec.category.src(g)], objects[ec.category.tgt(g)], &ec.maps[g])
                .expect("embeddings restrict to reducts")
        })
        .collect();
    let functor = FunctorData::new(ec.category.clone(), bc.category.clone(), objects, arrows)?;
    Ok((as_expansion(functor)?, ec, bc))
}

/// A relational expansion isomorphic to an abstract one.
#[derive(Clone, Debug)]
pub struct Realization {
    /// One structure per object of the total category, in the signature
    /// of the base extended by a symbol per object.
    pub class: TruncatedClass,
    pub expansion: Expansion,
    /// Object `E` of the abstract total category corresponds to object
    /// `iso[E]` of the realized one.
    pub iso: Vec<ObjId>,
}

/// Adds a symbol for every object `E′` of the total category, of arity
/// the size of `π(E′)`, and interprets it in the structure for `E` as the
/// maps `π(g)` for `g: E′ → E`. The structures with their embeddings,
/// projected to the base, form an expansion checked isomorphic to `pi`.
pub fn relational_realization(pi: &Expansion, base: &StructureCategory) -> Result<Realization, StructureError> {
    if **pi.base() != *base.category {
        return Err(ExpansionError::BaseMismatch.into());
    }
    let total = pi.total();
    let sigma = base.class.signature();
    let tau = Signature::new(total.objects().map(|e| (total.object_name(e).to_string(), base.structure(pi.project(e)).size())))?;
    let signature = sigma.union(&tau)?;
    let members = total
        .objects()
        .map(|e| {
            let under = base.structure(pi.project(e)).with_numeric_domain();
            let mut s = under.merge(&RelStructure::bare(tau.clone(), under.size()))?;
            for e2 in total.objects() {
                for &g in total.hom(e2, e) {
                    s.insert(sigma.len() + e2, base.maps[pi.functor().arrows[g]].clone());
                }
            }
            Ok((total.object_name(e).to_string(), s))
        })
        .collect::<Result<Vec<_>, StructureError>>()?;
    let class = TruncatedClass::from_trusted(signature, members, base.class.max_size());
    let sc = structures_category(&class);
    let objects: Vec<ObjId> = total.objects().map(|e| pi.project(e)).collect();
    let arrows = sc
        .category
        .arrows()
        .map(|g| {
            let (s, t) = (sc.category.src(g), sc.category.tgt(g));
            base.arrow_for(objects[s], objects[t], &sc.maps[g]).expect("embeddings restrict to the base")
        })
        .collect();
    let functor = FunctorData::new(sc.category.clone(), base.category.clone(), objects, arrows)?;
    let expansion = as_expansion(functor)?;
    let iso = expansion_isomorphism(pi, &expansion)?.ok_or_else(|| ExpansionError::NotAFunctor {
        law: "realization",
        detail: "the realized expansion is not isomorphic to the abstract one".into(),
    })?;
    Ok(Realization { class, expansion, iso })
}

#[cfg(test)]
mod tests {
    use super::super::class::{bare_sets, linear_orders};
    use super::*;
    use crate::corpus;
    use crate::expansion::{compute_core, diagram_to_expansion, enumerate_endomorphisms, has_expansion_property, EnumerationOrder};
    use crate::fincat::find_isomorphism;
    use crate::setdiag::gen::random_diagram;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn point_blowup_is_base() {
        let b = blowup(&bare_sets(1), &bare_sets(1));
        assert!(find_isomorphism(&b.category, &corpus::point()).is_some());
        let b = blowup(&linear_orders(3), &bare_sets(1));
        assert!(find_isomorphism(&b.category, &structures_category(&linear_orders(3)).category).is_some());
    }

    #[test]
    fn blowup_matches_elts() {
        let cases = [
            (linear_orders(2), linear_orders(1).with_empty()),
            (bare_sets(2), bare_sets(2).with_empty()),
            (linear_orders(2), linear_orders(2).with_empty()),
        ];
        for (l, r) in cases {
            let direct = blowup(&l, &r);
            let elts = blowup_as_elts(&l, &r).unwrap();
            assert_eq!(direct.category.num_objects(), elts.category.num_objects());
            assert_eq!(direct.category.num_arrows(), elts.category.num_arrows());
            assert!(find_isomorphism(&direct.category, &elts.category).is_some());
        }
        assert!(blowup_as_elts(&linear_orders(2), &linear_orders(1)).is_err());
    }

    #[test]
    fn orders_over_sets() {
        for n in [2, 3] {
            let (pi, _, _) = concrete_expansion(&linear_orders(n).labeled(), &bare_sets(n)).unwrap();
            let expected: Vec<usize> = (1..=n).map(|k| (1..=k).product()).collect();
            assert_eq!(pi.fiber_sizes(), expected);
            if n == 3 {
                assert!(has_expansion_property(&pi).holds());
                assert_eq!(enumerate_endomorphisms(&pi).len(), 2);
                let core = compute_core(&pi, EnumerationOrder::Forward).unwrap();
                assert_eq!(core.objects.len(), pi.total().num_objects());
            }
        }
    }

    #[test]
    fn realizations() {
        let (pi, _, base) = concrete_expansion(&linear_orders(3).labeled(), &bare_sets(3)).unwrap();
        let r = relational_realization(&pi, &base).unwrap();
        assert_eq!(r.class.len(), 9);
        let orders = structures_category(&linear_orders(3));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let d = random_diagram(&orders.category, 3, &mut rng).unwrap();
            let e = diagram_to_expansion(&orders.category, &d).unwrap();
            relational_realization(&e, &orders).unwrap();
        }
    }
}
