use std::sync::Arc;

use super::fibration::{as_expansion, expansion_to_diagram, Expansion};
use super::{ExpansionError, FunctorData};
use crate::fincat::{ArrId, ObjId};
use crate::setdiag::{enumerate_solutions, solve, SetDiagram, Solution};

fn same_base(pi: &Expansion, rho: &Expansion) -> Result<(), ExpansionError> {
    if **pi.base() == **rho.base() {
        Ok(())
    } else {
        Err(ExpansionError::BaseMismatch)
    }
}

/// The diagram on `𝓔_π` sending `E ↦ ρ⁻¹(π(E))`, where `g: E′ → E` acts by
/// sending `y` to the source of the ρ-lift of `π(g)` at `y`. Its solutions
/// are exactly the object maps of expansion homomorphisms `π → ρ`.
pub fn hom_diagram(pi: &Expansion, rho: &Expansion) -> Result<SetDiagram, ExpansionError> {
    same_base(pi, rho)?;
    let (total, rtotal) = (pi.total(), rho.total());
    let carriers = total
        .objects()
        .map(|e| {
            rho.fiber(pi.project(e))
                .iter()
                .map(|&y| rtotal.object_name(y).to_string())
                .collect()
        })
        .collect();
    let actions = total
        .arrows()
        .map(|g| {
            let f = pi.project_arrow(g);
            rho.fiber(pi.project(total.tgt(g)))
                .iter()
                .map(|&y| rho.fiber_position(rho.lift_source(y, f)))
                .collect()
        })
        .collect();
    Ok(SetDiagram::from_parts(total, carriers, actions)?)
}

/// Completes an object map `𝓔_π → 𝓔_ρ` to a functor by unique lifting and
/// checks `ρ∘α = π`.
pub fn hom_from_object_map(pi: &Expansion, rho: &Expansion, objects: Vec<ObjId>) -> Result<FunctorData, ExpansionError> {
    same_base(pi, rho)?;
    let total = pi.total();
    let arrows: Vec<ArrId> = total
        .arrows()
        .map(|g| rho.lift(objects[total.tgt(g)], pi.project_arrow(g)))
        .collect();
    let alpha = FunctorData::new(total.clone(), rho.total().clone(), objects, arrows)?;
    let composite = alpha.then(rho.functor())?;
    if composite.objects != pi.functor().objects || composite.arrows != pi.functor().arrows {
        return Err(ExpansionError::NotAFunctor {
            law: "commutation with the projections",
            detail: "ρ∘α ≠ π".into(),
        });
    }
    Ok(alpha)
}

fn solution_to_hom(pi: &Expansion, rho: &Expansion, sol: &Solution) -> FunctorData {
    let objects = pi
        .total()
        .objects()
        .map(|e| rho.fiber(pi.project(e))[sol.get(e)])
        .collect();
    hom_from_object_map(pi, rho, objects).expect("solutions of the hom diagram are homomorphisms")
}

/// The first expansion homomorphism `π → ρ`, if any.
pub fn find_expansion_hom(pi: &Expansion, rho: &Expansion) -> Result<Option<FunctorData>, ExpansionError> {
    let d = hom_diagram(pi, rho)?;
    Ok(solve(pi.total(), &d).map(|s| solution_to_hom(pi, rho, &s)))
}

/// All expansion homomorphisms `π → ρ` (at most `cap`), ordered
/// lexicographically by their object maps.
pub fn enumerate_expansion_homs(
    pi: &Expansion,
    rho: &Expansion,
    cap: Option<usize>,
) -> Result<Vec<FunctorData>, ExpansionError> {
    let d = hom_diagram(pi, rho)?;
    Ok(enumerate_solutions(pi.total(), &d, cap)
        .iter()
        .map(|s| solution_to_hom(pi, rho, s))
        .collect())
}

pub fn enumerate_endomorphisms(pi: &Expansion) -> Vec<FunctorData> {
    enumerate_expansion_homs(pi, pi, None).expect("same base")
}

/// A functor `α: 𝒞 → 𝓔` with `π∘α = id`, read off a solution of the
/// fiber diagram.
pub fn section(pi: &Expansion) -> Option<FunctorData> {
    let base = pi.base();
    let sol = solve(base, &expansion_to_diagram(pi))?;
    let objects: Vec<ObjId> = base.objects().map(|c| pi.fiber(c)[sol.get(c)]).collect();
    let arrows = base.arrows().map(|f| pi.lift(objects[base.tgt(f)], f)).collect();
    Some(FunctorData::new(base.clone(), pi.total().clone(), objects, arrows).expect("section is a functor"))
}

/// Per base object `C`, the first `C′` such that every element of `π⁻¹(C)`
/// has an arrow into every element of `π⁻¹(C′)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpReport {
    pub witnesses: Vec<Option<ObjId>>,
}

impl EpReport {
    pub fn holds(&self) -> bool {
        self.witnesses.iter().all(Option::is_some)
    }
}

pub fn has_expansion_property(pi: &Expansion) -> EpReport {
    let (base, total) = (pi.base(), pi.total());
    let witnesses = base
        .objects()
        .map(|c| {
            base.objects().find(|&c2| {
                pi.fiber(c)
                    .iter()
                    .all(|&e| pi.fiber(c2).iter().all(|&e2| !total.hom(e, e2).is_empty()))
            })
        })
        .collect();
    EpReport { witnesses }
}

/// The image of an expansion homomorphism `α: π → ρ` as an expansion over
/// the common base, via the inclusion into `𝓔_ρ` followed by `ρ`.
pub fn corestrict(alpha: &FunctorData, rho: &Expansion) -> Result<Expansion, ExpansionError> {
    let img = alpha.image()?;
    let sub = Arc::new(img.category);
    let incl = FunctorData::new(sub, rho.total().clone(), img.objects, img.arrows)?;
    as_expansion(incl.then(rho.functor())?)
}

/// Which end of the endomorphism list wins ties between images of equal
/// size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnumerationOrder {
    Forward,
    Reverse,
}

#[derive(Clone, Debug)]
pub struct Core {
    pub expansion: Expansion,
    /// Objects of the original total category forming the core.
    pub objects: Vec<ObjId>,
    /// The endomorphism whose image is the core.
    pub collapse: FunctorData,
}

/// Restricts `π` to an image of an endomorphism with the fewest objects;
/// such an image is ⊆-minimal among endomorphism images. Every
/// endomorphism of the result is checked to be bijective.
pub fn compute_core(pi: &Expansion, order: EnumerationOrder) -> Result<Core, ExpansionError> {
    let mut endos = enumerate_endomorphisms(pi);
    if order == EnumerationOrder::Reverse {
        endos.reverse();
    }
    let size = |a: &FunctorData| {
        let mut o = a.objects.clone();
        o.sort_unstable();
        o.dedup();
        o.len()
    };
    let best = endos
        .iter()
        .fold(None::<&FunctorData>, |best, a| match best {
            Some(b) if size(b) <= size(a) => Some(b),
            _ => Some(a),
        })
        .expect("identity is an endomorphism")
        .clone();
    let core = corestrict(&best, pi)?;
    let objects = {
        let mut o = best.objects.clone();
        o.sort_unstable();
        o.dedup();
        o
    };
    for endo in enumerate_endomorphisms(&core) {
        if !endo.is_injective_on_objects() {
            return Err(ExpansionError::NotAFunctor {
                law: "core minimality",
                detail: "the chosen image has a non-bijective endomorphism".into(),
            });
        }
    }
    Ok(Core {
        expansion: core,
        objects,
        collapse: best,
    })
}
