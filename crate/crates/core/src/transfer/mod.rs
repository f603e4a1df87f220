//! Constructions that carry solvability from one category to another:
//! products, slices, categories of elements of `Cat`-valued functors, and
//! the transport of solutions along a natural transformation `id ⇒ G∘F`.

use std::collections::HashMap;
use std::sync::Arc;
use thiserror::Error;

use crate::expansion::{ExpansionError, FunctorData};
use crate::fincat::{ArrId, Arrow, CategoryBuilder, CategoryError, FinCategory, ObjId};
use crate::setdiag::{DiagramError, SetDiagram, Solution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransferError {
    #[error("not a functor into Cat: {0}")]
    NotCatValued(String),
    #[error("naturality fails at `{arrow}`")]
    NotNatural { arrow: String },
    #[error("the given tuple is not a solution of the pulled-back diagram")]
    NotASolution,
    #[error(transparent)]
    Functor(#[from] ExpansionError),
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

fn tuple_name<S: AsRef<str>>(parts: &[S]) -> String {
    let inner: Vec<&str> = parts.iter().map(|s| s.as_ref()).collect();
    format!("({})", inner.join(","))
}

/// `C × D` with objects `(a,b)`, arrows `(f,g)` and componentwise
/// composition.
pub fn product(c: &FinCategory, d: &FinCategory) -> FinCategory {
    power_of(&[c, d])
}

/// `cat^n`; `cat^0` is the one-object category `()`.
pub fn power(cat: &FinCategory, n: usize) -> FinCategory {
    let factors = vec![cat; n];
    power_of(&factors)
}

/// Mixed-radix tuples with the first coordinate slowest.
fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &s in sizes {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..s).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

fn encode(t: &[usize], sizes: &[usize]) -> usize {
    t.iter().zip(sizes).fold(0, |acc, (&i, &s)| acc * s + i)
}

fn power_of(factors: &[&FinCategory]) -> FinCategory {
    let osizes: Vec<usize> = factors.iter().map(|c| c.num_objects()).collect();
    let asizes: Vec<usize> = factors.iter().map(|c| c.num_arrows()).collect();
    let objs = tuples(&osizes);
    let arrs = tuples(&asizes);
    let objects = objs
        .iter()
        .map(|t| tuple_name(&t.iter().zip(factors).map(|(&x, c)| c.object_name(x)).collect::<Vec<_>>()))
        .collect();
    let arrows = arrs
        .iter()
        .map(|t| Arrow {
            name: tuple_name(&t.iter().zip(factors).map(|(&f, c)| c.arrow_name(f)).collect::<Vec<_>>()),
            src: encode(&t.iter().zip(factors).map(|(&f, c)| c.src(f)).collect::<Vec<_>>(), &osizes),
            tgt: encode(&t.iter().zip(factors).map(|(&f, c)| c.tgt(f)).collect::<Vec<_>>(), &osizes),
        })
        .collect();
    let identities = objs
        .iter()
        .map(|t| encode(&t.iter().zip(factors).map(|(&x, c)| c.identity(x)).collect::<Vec<_>>(), &asizes))
        .collect();
    CategoryBuilder::from_parts(objects, arrows, identities, |g, f| {
        let parts = arrs[g]
            .iter()
            .zip(&arrs[f])
            .zip(factors)
            .map(|((&gi, &fi), c)| c.compose(gi, fi))
            .collect::<Option<Vec<_>>>()?;
        Some(encode(&parts, &asizes))
    })
    .expect("product of valid categories")
}

/// Projection of a power category onto coordinate `i`, as index maps.
pub fn power_coordinates(cat: &FinCategory, n: usize) -> (Vec<Vec<ObjId>>, Vec<Vec<ArrId>>) {
    (
        tuples(&vec![cat.num_objects(); n]),
        tuples(&vec![cat.num_arrows(); n]),
    )
}

/// A functor `𝓡 → Cat`: a fiber category per base object and a transition
/// functor per base arrow.
#[derive(Clone, Debug)]
pub struct CatValuedFunctor {
    base: Arc<FinCategory>,
    fibers: Vec<Arc<FinCategory>>,
    transitions: Vec<FunctorData>,
}

impl CatValuedFunctor {
    /// Checks typing, identities and `𝓢_(g∘f) = 𝓢_g ∘ 𝓢_f`.
    pub fn new(
        base: Arc<FinCategory>,
        fibers: Vec<Arc<FinCategory>>,
        transitions: Vec<FunctorData>,
    ) -> Result<Self, TransferError> {
        if fibers.len() != base.num_objects() || transitions.len() != base.num_arrows() {
            return Err(TransferError::NotCatValued("sizes differ from the base".into()));
        }
        for f in base.arrows() {
            let t = &transitions[f];
            if *t.source != *fibers[base.src(f)] || *t.target != *fibers[base.tgt(f)] {
                return Err(TransferError::NotCatValued(format!(
                    "transition of `{}` has the wrong endpoints",
                    base.arrow_name(f)
                )));
            }
        }
        for r in base.objects() {
            if transitions[base.identity(r)] != FunctorData::identity(fibers[r].clone()) {
                return Err(TransferError::NotCatValued(format!(
                    "identity of `{}` does not act as the identity",
                    base.object_name(r)
                )));
            }
        }
        for f in base.arrows() {
            for &g in base.out_arrows(base.tgt(f)) {
                let gf = base.compose(g, f).expect("composable");
                let (a, b) = (&transitions[f], &transitions[g]);
                let composite_ok = a.objects.iter().map(|&x| b.objects[x]).eq(transitions[gf].objects.iter().copied())
                    && a.arrows.iter().map(|&x| b.arrows[x]).eq(transitions[gf].arrows.iter().copied());
                if !composite_ok {
                    return Err(TransferError::NotCatValued(format!(
                        "transition of `{}∘{}` is not the composite",
                        base.arrow_name(g),
                        base.arrow_name(f)
                    )));
                }
            }
        }
        Ok(CatValuedFunctor {
            base,
            fibers,
            transitions,
        })
    }

    /// The constant functor at `fiber`.
    pub fn constant(base: Arc<FinCategory>, fiber: Arc<FinCategory>) -> Self {
        let fibers = vec![fiber.clone(); base.num_objects()];
        let transitions = base.arrows().map(|_| FunctorData::identity(fiber.clone())).collect();
        CatValuedFunctor {
            base,
            fibers,
            transitions,
        }
    }

    /// `C ↦ hom(A,C)` as discrete categories, arrows acting by
    /// post-composition.
    pub fn representable(base: Arc<FinCategory>, a: ObjId) -> Self {
        let fibers: Vec<Arc<FinCategory>> = base
            .objects()
            .map(|c| {
                let names: Vec<&str> = base.hom(a, c).iter().map(|&h| base.arrow_name(h)).collect();
                Arc::new(crate::corpus::discrete(&names))
            })
            .collect();
        let transitions = base
            .arrows()
            .map(|f| {
                let (s, t) = (base.src(f), base.tgt(f));
                let objects: Vec<ObjId> = base
                    .hom(a, s)
                    .iter()
                    .map(|&h| base.hom_position(base.compose(f, h).expect("composable")))
                    .collect();
                // discrete fibers: arrow i is the identity of object i
                let arrows = objects.clone();
                FunctorData::new(fibers[s].clone(), fibers[t].clone(), objects, arrows).expect("post-composition")
            })
            .collect();
        CatValuedFunctor {
            base,
            fibers,
            transitions,
        }
    }

    pub fn base(&self) -> &Arc<FinCategory> {
        &self.base
    }

    pub fn fiber(&self, r: ObjId) -> &Arc<FinCategory> {
        &self.fibers[r]
    }

    pub fn transition(&self, f: ArrId) -> &FunctorData {
        &self.transitions[f]
    }
}

/// The category of elements with its projection to the base.
#[derive(Clone, Debug)]
pub struct Elts {
    pub category: Arc<FinCategory>,
    pub projection: FunctorData,
    /// `(R, S)` for every object.
    pub objects: Vec<(ObjId, ObjId)>,
    /// `(f, φ)` for every arrow.
    pub arrows: Vec<(ArrId, ArrId)>,
}

/// Objects `(R,S)` with `S ∈ 𝓢_R`; arrows `(f,φ): (R,S) → (R′,S′)` with
/// `φ: 𝓢_f(S) → S′`; `(g,ψ)∘(f,φ) = (g∘f, ψ∘𝓢_g(φ))`. The result is
/// validated as a category.
pub fn grothendieck_elts(s: &CatValuedFunctor) -> Result<Elts, TransferError> {
    let base = &s.base;
    let mut obj_index: HashMap<(ObjId, ObjId), ObjId> = HashMap::new();
    let mut objects = Vec::new();
    let mut object_names = Vec::new();
    for r in base.objects() {
        for x in s.fibers[r].objects() {
            obj_index.insert((r, x), objects.len());
            objects.push((r, x));
            object_names.push(tuple_name(&[base.object_name(r), s.fibers[r].object_name(x)]));
        }
    }
    let mut arr_index: HashMap<(ArrId, ObjId, ArrId), ArrId> = HashMap::new();
    let mut arrows = Vec::new();
    let mut raw_arrows = Vec::new();
    let mut arrow_src_fiber = Vec::new();
    for f in base.arrows() {
        let (r, r2) = (base.src(f), base.tgt(f));
        let (fib, fib2) = (&s.fibers[r], &s.fibers[r2]);
        let t = &s.transitions[f];
        for x in fib.objects() {
            for &phi in fib2.out_arrows(t.objects[x]) {
                arr_index.insert((f, x, phi), arrows.len());
                arrows.push((f, phi));
                arrow_src_fiber.push(x);
                raw_arrows.push(Arrow {
                    name: tuple_name(&[base.arrow_name(f), fib2.arrow_name(phi)]),
                    src: obj_index[&(r, x)],
                    tgt: obj_index[&(r2, fib2.tgt(phi))],
                });
            }
        }
    }
    // `(f,φ)` omits the source when 𝓢_f is not injective on objects
    let mut seen: HashMap<String, usize> = HashMap::new();
    for a in &raw_arrows {
        *seen.entry(a.name.clone()).or_default() += 1;
    }
    for a in raw_arrows.iter_mut() {
        if seen[&a.name] > 1 {
            a.name = format!("{}@{}", a.name, object_names[a.src]);
        }
    }
    let identities = objects
        .iter()
        .map(|&(r, x)| arr_index[&(base.identity(r), x, s.fibers[r].identity(x))])
        .collect();
    let category = CategoryBuilder::from_parts(object_names, raw_arrows, identities, |g, f| {
        let ((fb, phi), (gb, psi)) = (arrows[f], arrows[g]);
        let gf = base.compose(gb, fb)?;
        let r3 = base.tgt(gb);
        let moved = s.transitions[gb].arrows[phi];
        let comp = s.fibers[r3].compose(psi, moved)?;
        arr_index.get(&(gf, arrow_src_fiber[f], comp)).copied()
    })?;
    let category = Arc::new(category);
    let projection = FunctorData::new(
        category.clone(),
        base.clone(),
        objects.iter().map(|&(r, _)| r).collect(),
        arrows.iter().map(|&(f, _)| f).collect(),
    )?;
    Ok(Elts {
        category,
        projection,
        objects,
        arrows,
    })
}

/// The coslice `A\𝒞` as the category of elements of `C ↦ hom(A,C)`;
/// objects are renamed to the arrows out of `A`.
pub fn slice(cat: &Arc<FinCategory>, a: ObjId) -> Result<(Arc<FinCategory>, FunctorData), TransferError> {
    if a >= cat.num_objects() {
        return Err(CategoryError::UnknownObject(format!("#{a}")).into());
    }
    let elts = grothendieck_elts(&CatValuedFunctor::representable(cat.clone(), a))?;
    let renamed = elts.category.relabel(
        |i, _| {
            let (c, pos) = elts.objects[i];
            cat.arrow_name(cat.hom(a, c)[pos]).to_string()
        },
        |_, n| n.to_string(),
    )?;
    let renamed = Arc::new(renamed);
    let projection = FunctorData::new(
        renamed.clone(),
        cat.clone(),
        elts.projection.objects.clone(),
        elts.projection.arrows.clone(),
    )?;
    Ok((renamed, projection))
}

/// Components `Δ_C: C → G(F(C))` of a transformation `id ⇒ G∘F`.
#[derive(Clone, Debug)]
pub struct NatTransformData {
    pub f: FunctorData,
    pub g: FunctorData,
    pub components: Vec<ArrId>,
}

impl NatTransformData {
    pub fn new(f: FunctorData, g: FunctorData, components: Vec<ArrId>) -> Result<Self, TransferError> {
        let gf = f.then(&g)?;
        let c = &f.source;
        if *g.target != **c || components.len() != c.num_objects() {
            return Err(TransferError::NotCatValued("G∘F is not an endofunctor of the source".into()));
        }
        for x in c.objects() {
            let d = components[x];
            if d >= c.num_arrows() || c.src(d) != x || c.tgt(d) != gf.objects[x] {
                return Err(TransferError::NotNatural {
                    arrow: format!("component at `{}`", c.object_name(x)),
                });
            }
        }
        for u in c.arrows() {
            let (x, y) = (c.src(u), c.tgt(u));
            if c.compose(components[y], u) != c.compose(gf.arrows[u], components[x]) {
                return Err(TransferError::NotNatural {
                    arrow: c.arrow_name(u).to_string(),
                });
            }
        }
        Ok(NatTransformData { f, g, components })
    }
}

/// `D ∘ Gᵒᵖ`: the diagram on the source of `g` with carriers `D_{G(B)}`.
pub fn pullback_diagram(diag: &SetDiagram, g: &FunctorData) -> Result<SetDiagram, TransferError> {
    let (b, c) = (&g.source, &g.target);
    let carriers = b.objects().map(|x| diag.carrier(g.objects[x]).to_vec()).collect();
    let actions = b.arrows().map(|f| diag.action(g.arrows[f]).to_vec()).collect();
    let _ = c;
    Ok(SetDiagram::from_parts(b, carriers, actions)?)
}

/// Given a solution `x` of `D∘Gᵒᵖ`, returns `C ↦ D_{Δ_C}(x_{F(C)})`, which
/// is checked to solve `D`.
pub fn transfer_solution(delta: &NatTransformData, diag: &SetDiagram, sol: &Solution) -> Result<Solution, TransferError> {
    let pulled = pullback_diagram(diag, &delta.g)?;
    if !pulled.is_solution(&delta.g.source, sol) {
        return Err(TransferError::NotASolution);
    }
    let c = &delta.f.source;
    let out = Solution(
        c.objects()
            .map(|x| diag.act(delta.components[x], sol.get(delta.f.objects[x])))
            .collect(),
    );
    if !diag.is_solution(c, &out) {
        return Err(TransferError::NotNatural {
            arrow: "transported tuple fails the diagram".into(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::fincat::find_isomorphism;
    use crate::setdiag::solve;

    #[test]
    fn product_counts() {
        let sq = product(&corpus::chain(2), &corpus::chain(2));
        assert_eq!(sq.num_objects(), 4);
        assert_eq!(sq.num_arrows(), 9);
        assert!(find_isomorphism(&sq, &corpus::square()).is_some());
        let c = corpus::span();
        assert!(find_isomorphism(&product(&corpus::point(), &c), &c).is_some());
        for (_, a) in corpus::standard().into_iter().take(8) {
            for (_, b) in corpus::standard().into_iter().take(6) {
                assert_eq!(product(&a, &b).num_arrows(), a.num_arrows() * b.num_arrows());
            }
        }
        assert_eq!(power(&c, 0).num_objects(), 1);
        assert_eq!(power(&c, 2).num_arrows(), 25);
    }

    #[test]
    fn constant_elts_is_product() {
        let base = Arc::new(corpus::chain(2));
        let fiber = Arc::new(corpus::absorbing_monoid());
        let e = grothendieck_elts(&CatValuedFunctor::constant(base.clone(), fiber.clone())).unwrap();
        assert!(find_isomorphism(&e.category, &product(&base, &fiber)).is_some());
    }

    #[test]
    fn slices() {
        let chain = Arc::new(corpus::chain(3));
        let (s, proj) = slice(&chain, 0).unwrap();
        assert_eq!(s.num_objects(), 3);
        assert_eq!(s.object_names(), ["id_1", "f", "gf"]);
        assert!(find_isomorphism(&s, &corpus::chain(3)).is_some());
        assert_eq!(proj.objects, vec![0, 1, 2]);
        let (top, _) = slice(&chain, 2).unwrap();
        assert_eq!(top.num_objects(), 1);
        for (_, c) in corpus::standard() {
            let c = Arc::new(c);
            for a in c.objects() {
                let (s, _) = slice(&c, a).unwrap();
                assert_eq!(s.num_objects(), c.out_arrows(a).len());
            }
        }
    }

    #[test]
    fn elts_has_opcartesian_lifts() {
        let base = Arc::new(corpus::chain(3));
        let e = grothendieck_elts(&CatValuedFunctor::representable(base.clone(), 0)).unwrap();
        for (i, &(r, x)) in e.objects.iter().enumerate() {
            for &f in base.out_arrows(r) {
                assert!(e.category.out_arrows(i).iter().any(|&a| e.arrows[a].0 == f), "{r} {x} {f}");
            }
        }
    }

    #[test]
    fn cat_valued_validation() {
        let base = Arc::new(corpus::chain(2));
        let z3 = Arc::new(corpus::cyclic_monoid(3));
        let id = FunctorData::identity(z3.clone());
        let t: Vec<FunctorData> = base.arrows().map(|_| id.clone()).collect();
        assert!(CatValuedFunctor::new(base.clone(), vec![z3.clone(); 2], t.clone()).is_ok());
        // an identity of the base acting by inversion
        let inv = FunctorData::new(z3.clone(), z3.clone(), vec![0], vec![0, 2, 1]).unwrap();
        let mut bad = t;
        bad[base.identity(0)] = inv;
        assert!(matches!(
            CatValuedFunctor::new(base, vec![z3; 2], bad),
            Err(TransferError::NotCatValued(_))
        ));
    }

    #[test]
    fn identity_transfer() {
        let chain = Arc::new(corpus::chain(3));
        let id = FunctorData::identity(chain.clone());
        let comps = chain.objects().map(|x| chain.identity(x)).collect();
        let delta = NatTransformData::new(id.clone(), id, comps).unwrap();
        let carriers = chain.objects().map(|_| vec!["a".to_string(), "b".to_string()]).collect();
        let actions = chain.arrows().map(|_| vec![0, 1]).collect();
        let d = SetDiagram::from_parts(&chain, carriers, actions).unwrap();
        let s = Solution(vec![1, 1, 1]);
        assert_eq!(transfer_solution(&delta, &d, &s).unwrap(), s);
        assert_eq!(
            transfer_solution(&delta, &d, &Solution(vec![0, 1, 1])),
            Err(TransferError::NotASolution)
        );
    }

    #[test]
    fn transfer_through_terminal_object() {
        // F: chain → point, G: point ↦ 3, Δ_C the unique arrow C → 3
        let chain = Arc::new(corpus::chain(3));
        let point = Arc::new(corpus::point());
        let f = FunctorData::new(chain.clone(), point.clone(), vec![0; 3], vec![0; 6]).unwrap();
        let g = FunctorData::new(point.clone(), chain.clone(), vec![2], vec![chain.identity(2)]).unwrap();
        let comps = chain.objects().map(|x| chain.hom(x, 2)[0]).collect();
        let delta = NatTransformData::new(f, g.clone(), comps).unwrap();
        let carriers = vec![
            vec!["p".to_string()],
            vec!["q".to_string(), "r".to_string()],
            vec!["s".to_string(), "t".to_string()],
        ];
        // f: 1→2, g: 2→3, gf
        let mut actions = vec![vec![]; chain.num_arrows()];
        for a in chain.arrows() {
            let (x, y) = (chain.src(a), chain.tgt(a));
            actions[a] = match (x, y) {
                (i, j) if i == j => (0..carriers[i].len()).collect(),
                (0, _) => vec![0, 0],
                (1, 2) => vec![1, 0],
                _ => unreachable!(),
            };
        }
        let d = SetDiagram::from_parts(&chain, carriers, actions).unwrap();
        let pulled = pullback_diagram(&d, &g).unwrap();
        let x = solve(&point, &pulled).unwrap();
        let out = transfer_solution(&delta, &d, &x).unwrap();
        assert_eq!(out, Solution(vec![0, 1, 0]));
    }

    #[test]
    fn non_natural_components() {
        let pp = Arc::new(corpus::parallel_pair());
        let point = Arc::new(corpus::point());
        let f = FunctorData::new(pp.clone(), point.clone(), vec![0, 0], vec![0; 4]).unwrap();
        let g = FunctorData::new(point.clone(), pp.clone(), vec![1], vec![pp.identity(1)]).unwrap();
        let p0 = pp.arrow_id("p0").unwrap();
        let comps = vec![p0, pp.identity(1)];
        assert!(matches!(
            NatTransformData::new(f, g, comps),
            Err(TransferError::NotNatural { .. })
        ));
    }
}
