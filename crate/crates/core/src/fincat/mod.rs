//! Finite categories given by an explicit, total composition table.
//!
//! Objects and arrows are addressed by dense indices ([`ObjId`], [`ArrId`]) in
//! declaration order; textual labels are kept for reporting and file I/O.
//! A [`FinCategory`] can only be obtained through validation, so every value
//! of the type satisfies the unit and associativity laws.

mod build;
mod iso;

pub use build::{CategoryBuilder, RawArrow, RawCategory};
pub use iso::find_isomorphism;

use std::collections::HashMap;
use thiserror::Error;

/// Index of an object in declaration order.
pub type ObjId = usize;
/// Index of an arrow in declaration order.
pub type ArrId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub name: String,
    pub src: ObjId,
    pub tgt: ObjId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CategoryError {
    #[error("unknown {kind} `{id}` referenced by {context}")]
    UnknownReference {
        kind: &'static str,
        id: String,
        context: String,
    },
    #[error("duplicate {kind} id `{id}`")]
    Duplicate { kind: &'static str, id: String },
    #[error("object `{object}` has no identity arrow: {reason}")]
    MissingIdentity { object: String, reason: String },
    #[error("composition table has no entry for {g}∘{f}")]
    CompositionNotClosed { f: String, g: String },
    #[error("composition entry {g}∘{f} = {result} is ill-typed")]
    IllTypedComposite { g: String, f: String, result: String },
    #[error("conflicting composition entries for {g}∘{f}")]
    ConflictingComposite { g: String, f: String },
    #[error("unit law fails for identity `{identity}` and arrow `{arrow}`")]
    UnitLawViolated { identity: String, arrow: String },
    #[error("associativity fails: {h}∘({g}∘{f}) ≠ ({h}∘{g})∘{f}")]
    AssociativityViolated { f: String, g: String, h: String },
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("{0}")]
    Invalid(String),
}

/// A validated finite category.
///
/// Composition is stored per arrow `f: A → B` as a row aligned with the
/// out-arrows of `B`, so the table holds exactly the composable pairs.
#[derive(Clone, Debug)]
pub struct FinCategory {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    identities: Vec<ArrId>,
    /// `table[f][out_pos[g]] = g∘f` for every `g` out of `tgt(f)`.
    table: Vec<Vec<ArrId>>,
    out_pos: Vec<usize>,
    homs: Vec<Vec<ArrId>>,
    out: Vec<Vec<ArrId>>,
    inc: Vec<Vec<ArrId>>,
    obj_index: HashMap<String, ObjId>,
    arr_index: HashMap<String, ArrId>,
}

impl PartialEq for FinCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.arrows == other.arrows
            && self.identities == other.identities
            && self.table == other.table
    }
}

impl Eq for FinCategory {}

/// A cocone `A → apex ← B` recorded by the confluence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocone {
    pub a: ObjId,
    pub b: ObjId,
    pub apex: ObjId,
    pub left: ArrId,
    pub right: ArrId,
}

/// Outcome of [`FinCategory::confluence`].
///
/// Either `cocones` covers every connected pair `a < b` (in declaration
/// order) and `counterexample` is `None`, or `cocones` is empty and the first
/// failing pair is reported. Apexes are the first objects, in declaration
/// order, admitting arrows from both members of the pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfluenceReport {
    pub confluent: bool,
    pub cocones: Vec<Cocone>,
    pub counterexample: Option<(ObjId, ObjId)>,
}

impl FinCategory {
    /// Parses and validates a raw description.
    pub fn from_raw(raw: &RawCategory) -> Result<Self, CategoryError> {
        build::from_raw(raw)
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> {
        0..self.objects.len()
    }

    pub fn arrows(&self) -> impl Iterator<Item = ArrId> {
        0..self.arrows.len()
    }

    pub fn object_name(&self, a: ObjId) -> &str {
        &self.objects[a]
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn arrow(&self, f: ArrId) -> &Arrow {
        &self.arrows[f]
    }

    pub fn arrow_name(&self, f: ArrId) -> &str {
        &self.arrows[f].name
    }

    pub fn src(&self, f: ArrId) -> ObjId {
        self.arrows[f].src
    }

    pub fn tgt(&self, f: ArrId) -> ObjId {
        self.arrows[f].tgt
    }

    pub fn object_id(&self, name: &str) -> Result<ObjId, CategoryError> {
        self.obj_index
            .get(name)
            .copied()
            .ok_or_else(|| CategoryError::UnknownObject(name.to_string()))
    }

    pub fn arrow_id(&self, name: &str) -> Result<ArrId, CategoryError> {
        self.arr_index
            .get(name)
            .copied()
            .ok_or_else(|| CategoryError::UnknownArrow(name.to_string()))
    }

    pub fn identity(&self, a: ObjId) -> ArrId {
        self.identities[a]
    }

    pub fn is_identity(&self, f: ArrId) -> bool {
        let a = self.arrows[f].src;
        self.identities[a] == f
    }

    /// `g∘f`, or `None` when `tgt(f) ≠ src(g)`.
    pub fn compose(&self, g: ArrId, f: ArrId) -> Option<ArrId> {
        if self.arrows[f].tgt != self.arrows[g].src {
            return None;
        }
        Some(self.table[f][self.out_pos[g]])
    }

    /// Composes a path given in application order: `path = [f1, f2, ...]`
    /// yields `... ∘ f2 ∘ f1`.
    pub fn compose_path(&self, path: &[ArrId]) -> Option<ArrId> {
        let (&first, rest) = path.split_first()?;
        rest.iter()
            .try_fold(first, |acc, &next| self.compose(next, acc))
    }

    /// Arrows `A → B` in declaration order.
    pub fn hom(&self, a: ObjId, b: ObjId) -> &[ArrId] {
        &self.homs[a * self.objects.len() + b]
    }

    /// Name-based hom-set lookup.
    pub fn hom_named(&self, a: &str, b: &str) -> Result<&[ArrId], CategoryError> {
        let a = self.object_id(a)?;
        let b = self.object_id(b)?;
        Ok(self.hom(a, b))
    }

    /// Arrows with source `a`, in declaration order.
    pub fn out_arrows(&self, a: ObjId) -> &[ArrId] {
        &self.out[a]
    }

    /// Arrows with target `a`, in declaration order.
    pub fn in_arrows(&self, a: ObjId) -> &[ArrId] {
        &self.inc[a]
    }

    /// Position of `f` inside `hom(src f, tgt f)`.
    pub fn hom_position(&self, f: ArrId) -> usize {
        let Arrow { src, tgt, .. } = self.arrows[f];
        self.hom(src, tgt)
            .iter()
            .position(|&x| x == f)
            .expect("arrow belongs to its hom-set")
    }

    /// Blocks of the zigzag-connectivity partition, each sorted, ordered by
    /// their least object.
    pub fn connected_components(&self) -> Vec<Vec<ObjId>> {
        let n = self.objects.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for arrow in &self.arrows {
            let ra = find(&mut parent, arrow.src);
            let rb = find(&mut parent, arrow.tgt);
            if ra != rb {
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[hi] = lo;
            }
        }
        let mut blocks: Vec<Vec<ObjId>> = Vec::new();
        let mut block_of: HashMap<usize, usize> = HashMap::new();
        for x in 0..n {
            let r = find(&mut parent, x);
            let idx = *block_of.entry(r).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[idx].push(x);
        }
        blocks
    }

    /// Component index of every object, matching [`Self::connected_components`].
    pub fn component_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.objects.len()];
        for (i, block) in self.connected_components().iter().enumerate() {
            for &x in block {
                out[x] = i;
            }
        }
        out
    }

    /// First object (declaration order) receiving arrows from every object in
    /// `sources`, with the first arrow from each.
    pub fn common_target(&self, sources: &[ObjId]) -> Option<(ObjId, Vec<ArrId>)> {
        self.objects().find_map(|c| {
            let legs: Option<Vec<ArrId>> = sources
                .iter()
                .map(|&s| self.hom(s, c).first().copied())
                .collect();
            legs.map(|legs| (c, legs))
        })
    }

    pub fn confluence(&self) -> ConfluenceReport {
        let comp = self.component_of();
        let mut cocones = Vec::new();
        for a in self.objects() {
            for b in (a + 1)..self.objects.len() {
                if comp[a] != comp[b] {
                    continue;
                }
                match self.common_target(&[a, b]) {
                    Some((apex, legs)) => cocones.push(Cocone {
                        a,
                        b,
                        apex,
                        left: legs[0],
                        right: legs[1],
                    }),
                    None => {
                        return ConfluenceReport {
                            confluent: false,
                            cocones: Vec::new(),
                            counterexample: Some((a, b)),
                        }
                    }
                }
            }
        }
        ConfluenceReport {
            confluent: true,
            cocones,
            counterexample: None,
        }
    }

    pub fn is_confluent(&self) -> bool {
        self.confluence().confluent
    }

    /// The opposite category: same labels, endpoints swapped, table transposed.
    pub fn opposite(&self) -> FinCategory {
        let arrows = self
            .arrows
            .iter()
            .map(|a| Arrow {
                name: a.name.clone(),
                src: a.tgt,
                tgt: a.src,
            })
            .collect();
        CategoryBuilder::from_parts(
            self.objects.clone(),
            arrows,
            self.identities.clone(),
            |g, f| self.compose(f, g),
        )
        .expect("opposite of a valid category is valid")
    }

    /// Full subcategory on `objs` (kept in the given order).
    pub fn full_subcategory(&self, objs: &[ObjId]) -> Result<FinCategory, CategoryError> {
        let mut arrows = Vec::new();
        for &a in objs {
            for &b in objs {
                arrows.extend_from_slice(self.hom(a, b));
            }
        }
        arrows.sort_unstable();
        Ok(self.subcategory(objs, &arrows)?.category)
    }

    /// Name-based variant of [`Self::full_subcategory`].
    pub fn full_subcategory_named(&self, names: &[&str]) -> Result<FinCategory, CategoryError> {
        let objs = names
            .iter()
            .map(|n| self.object_id(n))
            .collect::<Result<Vec<_>, _>>()?;
        self.full_subcategory(&objs)
    }

    /// Subcategory on the given objects and arrows, validated: arrows must
    /// stay among `objs`, identities must be included and composites closed.
    pub fn subcategory(&self, objs: &[ObjId], arrows: &[ArrId]) -> Result<Inclusion, CategoryError> {
        let mut obj_new = vec![usize::MAX; self.objects.len()];
        for (i, &o) in objs.iter().enumerate() {
            if o >= self.objects.len() {
                return Err(CategoryError::UnknownObject(format!("#{o}")));
            }
            obj_new[o] = i;
        }
        let mut arr_new = vec![usize::MAX; self.arrows.len()];
        let mut new_arrows = Vec::with_capacity(arrows.len());
        for (i, &f) in arrows.iter().enumerate() {
            let a = &self.arrows[f];
            if obj_new[a.src] == usize::MAX || obj_new[a.tgt] == usize::MAX {
                return Err(CategoryError::Invalid(format!(
                    "arrow `{}` leaves the chosen objects",
                    a.name
                )));
            }
            arr_new[f] = i;
            new_arrows.push(Arrow {
                name: a.name.clone(),
                src: obj_new[a.src],
                tgt: obj_new[a.tgt],
            });
        }
        let mut identities = Vec::with_capacity(objs.len());
        for &o in objs {
            let id = arr_new[self.identities[o]];
            if id == usize::MAX {
                return Err(CategoryError::MissingIdentity {
                    object: self.objects[o].clone(),
                    reason: "identity not among the chosen arrows".into(),
                });
            }
            identities.push(id);
        }
        let category = CategoryBuilder::from_parts(
            objs.iter().map(|&o| self.objects[o].clone()).collect(),
            new_arrows,
            identities,
            |g, f| {
                let c = self.compose(arrows[g], arrows[f])?;
                let n = arr_new[c];
                (n != usize::MAX).then_some(n)
            },
        )?;
        Ok(Inclusion {
            category,
            objects: objs.to_vec(),
            arrows: arrows.to_vec(),
        })
    }

    /// Relabels objects and arrows; the structure is unchanged.
    pub fn relabel(
        &self,
        object_name: impl Fn(ObjId, &str) -> String,
        arrow_name: impl Fn(ArrId, &str) -> String,
    ) -> Result<FinCategory, CategoryError> {
        let objects = self
            .objects
            .iter()
            .enumerate()
            .map(|(i, n)| object_name(i, n))
            .collect();
        let arrows = self
            .arrows
            .iter()
            .enumerate()
            .map(|(i, a)| Arrow {
                name: arrow_name(i, &a.name),
                src: a.src,
                tgt: a.tgt,
            })
            .collect();
        CategoryBuilder::from_parts(objects, arrows, self.identities.clone(), |g, f| {
            self.compose(g, f)
        })
    }

    /// Exports the category in raw form (full table, identities listed).
    pub fn to_raw(&self) -> RawCategory {
        let mut compose = Vec::new();
        for f in self.arrows() {
            for &g in self.out_arrows(self.tgt(f)) {
                let c = self.compose(g, f).expect("composable");
                compose.push((
                    self.arrows[g].name.clone(),
                    self.arrows[f].name.clone(),
                    self.arrows[c].name.clone(),
                ));
            }
        }
        RawCategory {
            objects: self.objects.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| RawArrow {
                    id: a.name.clone(),
                    src: self.objects[a.src].clone(),
                    tgt: self.objects[a.tgt].clone(),
                })
                .collect(),
            identities: self
                .objects()
                .map(|o| {
                    (
                        self.objects[o].clone(),
                        self.arrows[self.identities[o]].name.clone(),
                    )
                })
                .collect(),
            compose,
        }
    }
}

/// A subcategory together with the indices of its objects and arrows in the
/// ambient category.
#[derive(Clone, Debug)]
pub struct Inclusion {
    pub category: FinCategory,
    pub objects: Vec<ObjId>,
    pub arrows: Vec<ArrId>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn chain_hom_sets() {
        let c = corpus::chain(3);
        let o1 = c.object_id("1").unwrap();
        let o3 = c.object_id("3").unwrap();
        assert_eq!(c.hom(o1, o3).len(), 1);
        assert!(c.hom(o3, o1).is_empty());
        assert!(matches!(
            c.hom_named("1", "9"),
            Err(CategoryError::UnknownObject(_))
        ));
    }

    #[test]
    fn components() {
        assert_eq!(corpus::span().connected_components().len(), 1);
        assert_eq!(corpus::discrete(&["a", "b"]).connected_components().len(), 2);
        assert_eq!(corpus::chain(3).connected_components(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn confluence_examples() {
        let span = corpus::span();
        let report = span.confluence();
        assert!(!report.confluent);
        let (a, b) = report.counterexample.unwrap();
        let names = (span.object_name(a), span.object_name(b));
        assert_eq!(names, ("A", "B"));
        assert!(report.cocones.is_empty());

        let chain = corpus::chain(3);
        let report = chain.confluence();
        assert!(report.confluent);
        assert_eq!(report.cocones.len(), 3);
        // first hit in declaration order: (1,2) meets at 2, the rest at 3
        let apexes: Vec<_> = report.cocones.iter().map(|c| chain.object_name(c.apex)).collect();
        assert_eq!(apexes, vec!["2", "3", "3"]);
        assert!(corpus::parallel_pair().is_confluent());
        assert!(corpus::point().is_confluent());
        assert!(corpus::discrete(&[]).is_confluent());
    }

    #[test]
    fn opposite_of_chain_and_monoid() {
        let c = corpus::chain(3);
        let op = c.opposite();
        let f = op.arrow_id("f").unwrap();
        assert_eq!(op.object_name(op.src(f)), "2");
        assert_eq!(op.object_name(op.tgt(f)), "1");
        assert_eq!(op.opposite(), c);

        let m = corpus::absorbing_monoid();
        let mop = m.opposite();
        for f in m.arrows() {
            for g in m.arrows() {
                assert_eq!(mop.compose(g, f), m.compose(f, g));
            }
        }
    }

    #[test]
    fn full_subcategories() {
        let c = corpus::chain(3);
        let sub = c.full_subcategory_named(&["1", "3"]).unwrap();
        assert_eq!(sub.num_objects(), 2);
        let mut names: Vec<_> = sub.arrows().map(|f| sub.arrow_name(f).to_string()).collect();
        names.sort();
        assert_eq!(names, vec!["gf", "id_1", "id_3"]);
        let all: Vec<_> = c.objects().collect();
        assert_eq!(c.full_subcategory(&all).unwrap(), c);
        let empty = c.full_subcategory(&[]).unwrap();
        assert_eq!(empty.num_objects(), 0);
        assert_eq!(empty.num_arrows(), 0);
    }

    #[test]
    fn compose_path_applies_in_order() {
        let c = corpus::chain(3);
        let f = c.arrow_id("f").unwrap();
        let g = c.arrow_id("g").unwrap();
        assert_eq!(c.compose_path(&[f, g]), Some(c.arrow_id("gf").unwrap()));
        assert_eq!(c.compose_path(&[g, f]), None);
    }
}
