//! Functors between finite categories, discrete fibrations and expansions,
//! their correspondence with set-valued diagrams, expansion homomorphisms,
//! the expansion property and cores.

mod fibration;
mod homs;

use std::sync::Arc;
use thiserror::Error;

use crate::fincat::{ArrId, CategoryError, FinCategory, Inclusion, ObjId};
use crate::setdiag::DiagramError;

pub use fibration::{
    as_expansion, diagram_to_expansion, doubled_expansion, expansion_isomorphism, expansion_to_diagram,
    identity_expansion, is_discrete_fibration, Expansion, FibrationCheck,
};
pub use homs::{
    compute_core, corestrict, enumerate_endomorphisms, enumerate_expansion_homs, find_expansion_hom,
    has_expansion_property, hom_diagram, hom_from_object_map, section, Core, EnumerationOrder, EpReport,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpansionError {
    #[error("not a functor: {law} fails at {detail}")]
    NotAFunctor { law: &'static str, detail: String },
    #[error("fiber over `{0}` is empty")]
    NotSurjective(String),
    #[error("not a discrete fibration: base arrow `{arrow}` into the image of `{object}` has {lifts} lifts")]
    NotFibration {
        object: String,
        arrow: String,
        lifts: usize,
    },
    #[error("carrier of `{0}` is empty")]
    EmptyCarrier(String),
    #[error("expansions live over different base categories")]
    BaseMismatch,
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// A functor given by its object and arrow maps.
#[derive(Clone, Debug)]
pub struct FunctorData {
    pub source: Arc<FinCategory>,
    pub target: Arc<FinCategory>,
    pub objects: Vec<ObjId>,
    pub arrows: Vec<ArrId>,
}

impl PartialEq for FunctorData {
    fn eq(&self, other: &Self) -> bool {
        *self.source == *other.source
            && *self.target == *other.target
            && self.objects == other.objects
            && self.arrows == other.arrows
    }
}

impl Eq for FunctorData {}

impl FunctorData {
    /// Validates sources/targets, identities and composition.
    pub fn new(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        objects: Vec<ObjId>,
        arrows: Vec<ArrId>,
    ) -> Result<Self, ExpansionError> {
        let bad = |law, detail: String| ExpansionError::NotAFunctor { law, detail };
        if objects.len() != source.num_objects() || arrows.len() != source.num_arrows() {
            return Err(bad("totality", "map sizes differ from the source".into()));
        }
        if let Some(x) = objects.iter().position(|&y| y >= target.num_objects()) {
            return Err(bad("totality", format!("object `{}` maps outside the target", source.object_name(x))));
        }
        if let Some(f) = arrows.iter().position(|&g| g >= target.num_arrows()) {
            return Err(bad("totality", format!("arrow `{}` maps outside the target", source.arrow_name(f))));
        }
        for f in source.arrows() {
            let g = arrows[f];
            if target.src(g) != objects[source.src(f)] || target.tgt(g) != objects[source.tgt(f)] {
                return Err(bad(
                    "endpoints",
                    format!("`{}` ↦ `{}`", source.arrow_name(f), target.arrow_name(g)),
                ));
            }
        }
        for x in source.objects() {
            if arrows[source.identity(x)] != target.identity(objects[x]) {
                return Err(bad("identity", format!("object `{}`", source.object_name(x))));
            }
        }
        for f in source.arrows() {
            for &g in source.out_arrows(source.tgt(f)) {
                let gf = source.compose(g, f).expect("composable");
                if target.compose(arrows[g], arrows[f]) != Some(arrows[gf]) {
                    return Err(bad(
                        "composition",
                        format!("`{}` ∘ `{}`", source.arrow_name(g), source.arrow_name(f)),
                    ));
                }
            }
        }
        Ok(FunctorData {
            source,
            target,
            objects,
            arrows,
        })
    }

    /// Builds from name maps; identity arrows may be omitted.
    pub fn from_names(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        objects: &[(String, String)],
        arrows: &[(String, String)],
    ) -> Result<Self, ExpansionError> {
        let mut om = vec![usize::MAX; source.num_objects()];
        for (a, b) in objects {
            om[source.object_id(a)?] = target.object_id(b)?;
        }
        if let Some(x) = om.iter().position(|&y| y == usize::MAX) {
            return Err(ExpansionError::NotAFunctor {
                law: "totality",
                detail: format!("object `{}` has no image", source.object_name(x)),
            });
        }
        let mut am = vec![usize::MAX; source.num_arrows()];
        for (f, g) in arrows {
            am[source.arrow_id(f)?] = target.arrow_id(g)?;
        }
        for f in source.arrows() {
            if am[f] == usize::MAX {
                if source.is_identity(f) {
                    am[f] = target.identity(om[source.src(f)]);
                } else {
                    return Err(ExpansionError::NotAFunctor {
                        law: "totality",
                        detail: format!("arrow `{}` has no image", source.arrow_name(f)),
                    });
                }
            }
        }
        Self::new(source, target, om, am)
    }

    pub fn identity(cat: Arc<FinCategory>) -> Self {
        FunctorData {
            objects: cat.objects().collect(),
            arrows: cat.arrows().collect(),
            source: cat.clone(),
            target: cat,
        }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &FunctorData) -> Result<FunctorData, ExpansionError> {
        if *self.target != *next.source {
            return Err(ExpansionError::NotAFunctor {
                law: "composability",
                detail: "target differs from the next source".into(),
            });
        }
        Ok(FunctorData {
            source: self.source.clone(),
            target: next.target.clone(),
            objects: self.objects.iter().map(|&x| next.objects[x]).collect(),
            arrows: self.arrows.iter().map(|&f| next.arrows[f]).collect(),
        })
    }

    /// The literal image: objects `F(x)` and arrows `F(f)`, as a
    /// subcategory of the target.
    pub fn image(&self) -> Result<Inclusion, ExpansionError> {
        let mut objs = self.objects.clone();
        objs.sort_unstable();
        objs.dedup();
        let mut arrs = self.arrows.clone();
        arrs.sort_unstable();
        arrs.dedup();
        Ok(self.target.subcategory(&objs, &arrs)?)
    }

    pub fn is_injective_on_objects(&self) -> bool {
        let mut seen = vec![false; self.target.num_objects()];
        self.objects.iter().all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    pub fn is_surjective_on_objects(&self) -> bool {
        let mut seen = vec![false; self.target.num_objects()];
        for &y in &self.objects {
            seen[y] = true;
        }
        seen.into_iter().all(|b| b)
    }

    /// `(source name, target name)` pairs for objects and arrows.
    pub fn named_maps(&self) -> (Vec<(String, String)>, Vec<(String, String)>) {
        let objs = self
            .source
            .objects()
            .map(|x| {
                (
                    self.source.object_name(x).to_string(),
                    self.target.object_name(self.objects[x]).to_string(),
                )
            })
            .collect();
        let arrs = self
            .source
            .arrows()
            .map(|f| {
                (
                    self.source.arrow_name(f).to_string(),
                    self.target.arrow_name(self.arrows[f]).to_string(),
                )
            })
            .collect();
        (objs, arrs)
    }
}
