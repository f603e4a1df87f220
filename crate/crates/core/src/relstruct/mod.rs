//! Finite relational structures and truncated classes of them, viewed as
//! categories of embeddings; strong amalgamation, free superpositions,
//! blowups and quantifier-free definitions of reducts.

mod amalgam;
mod blowup;
mod class;
mod formulas;

use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

use crate::expansion::ExpansionError;
use crate::fincat::CategoryError;
use crate::setdiag::DiagramError;
use crate::transfer::TransferError;

pub use amalgam::{
    free_superposition, has_strong_amalgamation, superposition_diagram, superposition_structure, AmalgamationFailure,
    AmalgamationReport, Superposed, SuperpositionDiagram,
};
pub use blowup::{blowup, blowup_as_elts, concrete_expansion, relational_realization, Blowup, Realization};
pub use class::{
    bare_sets, graphs, linear_orders, matchings, ordered_graphs, structures_category, StructureCategory,
    TruncatedClass,
};
pub use formulas::{define_reduct_formulas, reduct_formulas, Formula, QFFormula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("signatures share the symbols {0:?}")]
    SignatureOverlap(Vec<String>),
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("tuple {tuple:?} of `{symbol}` is invalid: {reason}")]
    BadTuple {
        symbol: String,
        tuple: Vec<usize>,
        reason: String,
    },
    #[error("duplicate domain element `{0}`")]
    DuplicateElement(String),
    #[error("member `{member}` has size {size}, above the bound {max}")]
    TooLarge { member: String, size: usize, max: usize },
    #[error("duplicate member name `{0}`")]
    DuplicateName(String),
    #[error("not closed: the substructure of `{member}` on {subset:?} is not in the class")]
    NotClosed { member: String, subset: Vec<String> },
    #[error("no structure of the class on {size} points amalgamates the two sections")]
    NoAmalgam { size: usize },
    #[error("the map onto the structure is not surjective")]
    NotSurjective,
    #[error("right inverse {0:?} is not an embedding")]
    CertificateFailed(Vec<usize>),
    #[error("bound {bound} needs structures on {needed} points but the class stops at {available}")]
    BoundTooSmall {
        bound: usize,
        needed: usize,
        available: usize,
    },
    #[error("projection of `{0}` changes the domain")]
    NotDomainPreserving(String),
    #[error("formula uses variable x{var} but only {free} are declared")]
    UndeclaredVariable { var: usize, free: usize },
    #[error("formula for `{symbol}` fails on `{member}` at {tuple:?}")]
    FormulaMismatch {
        symbol: String,
        member: String,
        tuple: Vec<usize>,
    },
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// Relation symbols with arities; `ar R` is `{0,…,arity-1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    symbols: Vec<(String, usize)>,
}

impl Signature {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = (S, usize)>) -> Result<Self, StructureError> {
        let symbols: Vec<(String, usize)> = symbols.into_iter().map(|(s, a)| (s.into(), a)).collect();
        for (i, (s, _)) in symbols.iter().enumerate() {
            if symbols[..i].iter().any(|(t, _)| t == s) {
                return Err(StructureError::DuplicateSymbol(s.clone()));
            }
        }
        Ok(Signature { symbols })
    }

    pub fn empty() -> Self {
        Signature::default()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }

    pub fn name(&self, i: usize) -> &str {
        &self.symbols[i].0
    }

    pub fn arity(&self, i: usize) -> usize {
        self.symbols[i].1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|(s, _)| s == name)
    }

    /// Every symbol of `self` occurs in `other` with the same arity.
    pub fn is_subsignature_of(&self, other: &Signature) -> bool {
        self.symbols.iter().all(|s| other.symbols.contains(s))
    }

    pub fn union(&self, other: &Signature) -> Result<Signature, StructureError> {
        let shared: Vec<String> = self
            .symbols
            .iter()
            .filter(|(s, _)| other.index_of(s).is_some())
            .map(|(s, _)| s.clone())
            .collect();
        if !shared.is_empty() {
            return Err(StructureError::SignatureOverlap(shared));
        }
        Ok(Signature {
            symbols: self.symbols.iter().chain(&other.symbols).cloned().collect(),
        })
    }
}

/// A finite structure; domain elements are addressed by position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelStructure {
    signature: Signature,
    domain: Vec<String>,
    relations: Vec<BTreeSet<Vec<usize>>>,
}

fn numeric_domain(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

impl RelStructure {
    pub fn new(
        signature: Signature,
        domain: Vec<String>,
        relations: Vec<BTreeSet<Vec<usize>>>,
    ) -> Result<Self, StructureError> {
        if relations.len() != signature.len() {
            return Err(StructureError::SignatureMismatch(format!(
                "{} relations for {} symbols",
                relations.len(),
                signature.len()
            )));
        }
        for (i, d) in domain.iter().enumerate() {
            if domain[..i].contains(d) {
                return Err(StructureError::DuplicateElement(d.clone()));
            }
        }
        for (r, rel) in relations.iter().enumerate() {
            for t in rel {
                let reason = if t.len() != signature.arity(r) {
                    format!("arity is {}", signature.arity(r))
                } else if t.iter().any(|&x| x >= domain.len()) {
                    "value outside the domain".to_string()
                } else {
                    continue;
                };
                return Err(StructureError::BadTuple {
                    symbol: signature.name(r).to_string(),
                    tuple: t.clone(),
                    reason,
                });
            }
        }
        Ok(RelStructure {
            signature,
            domain,
            relations,
        })
    }

    /// Relations given by symbol name; symbols not mentioned are empty.
    pub fn from_named(
        signature: Signature,
        domain: Vec<String>,
        relations: &[(&str, Vec<Vec<usize>>)],
    ) -> Result<Self, StructureError> {
        let mut rels = vec![BTreeSet::new(); signature.len()];
        for (name, tuples) in relations {
            let r = signature
                .index_of(name)
                .ok_or_else(|| StructureError::UnknownSymbol(name.to_string()))?;
            rels[r].extend(tuples.iter().cloned());
        }
        Self::new(signature, domain, rels)
    }

    /// No relations on `{0,…,n-1}`.
    pub fn bare(signature: Signature, n: usize) -> Self {
        let k = signature.len();
        RelStructure {
            signature,
            domain: numeric_domain(n),
            relations: vec![BTreeSet::new(); k],
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.domain.len()
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn relation(&self, r: usize) -> &BTreeSet<Vec<usize>> {
        &self.relations[r]
    }

    pub fn relations(&self) -> &[BTreeSet<Vec<usize>>] {
        &self.relations
    }

    pub fn holds(&self, r: usize, tuple: &[usize]) -> bool {
        self.relations[r].contains(tuple)
    }

    pub(crate) fn insert(&mut self, r: usize, tuple: Vec<usize>) {
        self.relations[r].insert(tuple);
    }

    /// Same relations, domain relabelled `0,…,n-1`.
    pub fn with_numeric_domain(&self) -> Self {
        RelStructure {
            domain: numeric_domain(self.size()),
            ..self.clone()
        }
    }

    /// The structure on positions `0..map.len()` making `map` an embedding
    /// into `self`; `map` must be injective for that to hold.
    pub fn pullback(&self, map: &[usize]) -> Self {
        let mut inverse: Vec<Option<usize>> = vec![None; self.size()];
        for (i, &m) in map.iter().enumerate() {
            inverse[m].get_or_insert(i);
        }
        let relations = self
            .relations
            .iter()
            .map(|rel| {
                rel.iter()
                    .filter_map(|t| t.iter().map(|&x| inverse[x]).collect::<Option<Vec<_>>>())
                    .collect()
            })
            .collect();
        RelStructure {
            signature: self.signature.clone(),
            domain: numeric_domain(map.len()),
            relations,
        }
    }

    /// The induced substructure on `subset`, keeping element labels.
    pub fn induced(&self, subset: &[usize]) -> Self {
        let mut s = self.pullback(subset);
        s.domain = subset.iter().map(|&i| self.domain[i].clone()).collect();
        s
    }

    /// Transport along a bijection `perm: self → {0..n-1}`.
    pub fn transport(&self, perm: &[usize]) -> Self {
        let relations = self
            .relations
            .iter()
            .map(|rel| rel.iter().map(|t| t.iter().map(|&x| perm[x]).collect()).collect())
            .collect();
        RelStructure {
            signature: self.signature.clone(),
            domain: numeric_domain(self.size()),
            relations,
        }
    }

    pub fn is_embedding(&self, target: &RelStructure, map: &[usize]) -> bool {
        if self.signature != target.signature || map.len() != self.size() {
            return false;
        }
        let mut seen = BTreeSet::new();
        if !map.iter().all(|&m| m < target.size() && seen.insert(m)) {
            return false;
        }
        target.pullback(map).relations == self.relations
    }

    /// The structure on the same domain with both signatures.
    pub fn merge(&self, other: &RelStructure) -> Result<Self, StructureError> {
        if self.size() != other.size() {
            return Err(StructureError::SignatureMismatch("domains differ in size".into()));
        }
        let signature = self.signature.union(&other.signature)?;
        let relations = self.relations.iter().chain(&other.relations).cloned().collect();
        Ok(RelStructure {
            signature,
            domain: self.domain.clone(),
            relations,
        })
    }

    pub fn rename_symbols(&self, rename: impl Fn(&str) -> String) -> Result<Self, StructureError> {
        let signature = Signature::new(self.signature.symbols.iter().map(|(s, a)| (rename(s), *a)))?;
        Ok(RelStructure {
            signature,
            ..self.clone()
        })
    }
}

impl fmt::Display for RelStructure {
    /// `{0,1,2} <:(0,1),(0,2) E:` style.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.domain.join(","))?;
        for (r, rel) in self.relations.iter().enumerate() {
            let tuples: Vec<String> = rel
                .iter()
                .map(|t| format!("({})", t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
                .collect();
            write!(f, " {}:{}", self.signature.name(r), tuples.join(","))?;
        }
        Ok(())
    }
}

/// `σ`-reduct of `e`.
pub fn reduct(e: &RelStructure, sigma: &Signature) -> Result<RelStructure, StructureError> {
    if !sigma.is_subsignature_of(&e.signature) {
        return Err(StructureError::SignatureMismatch("target signature is not contained in the source".into()));
    }
    let relations = sigma
        .symbols
        .iter()
        .map(|(s, _)| e.relations[e.signature.index_of(s).expect("subsignature")].clone())
        .collect();
    Ok(RelStructure {
        signature: sigma.clone(),
        domain: e.domain.clone(),
        relations,
    })
}

/// Calls `visit` on every embedding `a → b` in lexicographic order of the
/// image tuples until it returns `false`. Returns `false` if stopped.
fn for_each_embedding(a: &RelStructure, b: &RelStructure, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    // nullary symbols hold in both or neither
    for r in 0..a.signature.len() {
        if a.signature.arity(r) == 0 && a.relations[r].is_empty() != b.relations[r].is_empty() {
            return true;
        }
    }
    if a.size() > b.size() {
        return true;
    }
    let mut map = Vec::with_capacity(a.size());
    let mut used = vec![false; b.size()];
    extend(a, b, &mut map, &mut used, &mut visit)
}

/// Tuples over `0..=i` of length `k` that mention `i`.
fn tuples_through(i: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    let mut t = vec![0; k];
    loop {
        if t.contains(&i) && !f(&t) {
            return false;
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return true;
            }
            pos -= 1;
            if t[pos] < i {
                t[pos] += 1;
                break;
            }
            t[pos] = 0;
        }
    }
}

fn consistent(a: &RelStructure, b: &RelStructure, map: &[usize]) -> bool {
    let i = map.len() - 1;
    (0..a.signature.len()).all(|r| {
        let k = a.signature.arity(r);
        k == 0
            || tuples_through(i, k, |t| {
                let image: Vec<usize> = t.iter().map(|&x| map[x]).collect();
                a.relations[r].contains(t) == b.relations[r].contains(&image)
            })
    })
}

fn extend(
    a: &RelStructure,
    b: &RelStructure,
    map: &mut Vec<usize>,
    used: &mut [bool],
    visit: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if map.len() == a.size() {
        return visit(map);
    }
    for y in 0..b.size() {
        if used[y] {
            continue;
        }
        map.push(y);
        if consistent(a, b, map) {
            used[y] = true;
            let go_on = extend(a, b, map, used, visit);
            used[y] = false;
            if !go_on {
                map.pop();
                return false;
            }
        }
        map.pop();
    }
    true
}

/// All embeddings `a → b`, lexicographically ordered.
pub fn enumerate_embeddings(a: &RelStructure, b: &RelStructure) -> Result<Vec<Vec<usize>>, StructureError> {
    if a.signature != b.signature {
        return Err(StructureError::SignatureMismatch("embedding between different signatures".into()));
    }
    let mut out = Vec::new();
    for_each_embedding(a, b, |m| {
        out.push(m.to_vec());
        true
    });
    Ok(out)
}

pub fn first_embedding(a: &RelStructure, b: &RelStructure) -> Option<Vec<usize>> {
    if a.signature != b.signature {
        return None;
    }
    let mut found = None;
    for_each_embedding(a, b, |m| {
        found = Some(m.to_vec());
        false
    });
    found
}

/// A bijective embedding, if the two structures are isomorphic.
pub fn find_structure_isomorphism(a: &RelStructure, b: &RelStructure) -> Option<Vec<usize>> {
    if a.size() != b.size() || a.relations.iter().map(BTreeSet::len).ne(b.relations.iter().map(BTreeSet::len)) {
        return None;
    }
    first_embedding(a, b)
}
