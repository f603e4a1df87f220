use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use super::{enumerate_embeddings, find_structure_isomorphism, RelStructure, Signature, StructureError};
use crate::fincat::{ArrId, Arrow, CategoryBuilder, FinCategory, ObjId};

/// An explicit list of named structures with a size bound, closed under
/// induced substructures up to isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedClass {
    signature: Signature,
    members: Vec<RelStructure>,
    names: Vec<String>,
    max_size: usize,
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

impl TruncatedClass {
    /// Validates signatures, sizes, names and closure under nonempty
    /// induced substructures.
    pub fn new(
        signature: Signature,
        members: Vec<(String, RelStructure)>,
        max_size: usize,
    ) -> Result<Self, StructureError> {
        let (names, members): (Vec<String>, Vec<RelStructure>) = members.into_iter().unzip();
        let class = TruncatedClass {
            signature,
            members,
            names,
            max_size,
        };
        class.validate()?;
        Ok(class)
    }

    /// For classes closed by construction; skips the closure check.
    pub(crate) fn from_trusted(signature: Signature, members: Vec<(String, RelStructure)>, max_size: usize) -> Self {
        let (names, members) = members.into_iter().unzip();
        TruncatedClass {
            signature,
            members,
            names,
            max_size,
        }
    }

    pub fn validate(&self) -> Result<(), StructureError> {
        for (i, (name, m)) in self.names.iter().zip(&self.members).enumerate() {
            if self.names[..i].contains(name) {
                return Err(StructureError::DuplicateName(name.clone()));
            }
            if *m.signature() != self.signature {
                return Err(StructureError::SignatureMismatch(format!("member `{name}`")));
            }
            if m.size() > self.max_size {
                return Err(StructureError::TooLarge {
                    member: name.clone(),
                    size: m.size(),
                    max: self.max_size,
                });
            }
        }
        let mut known: HashSet<RelStructure> = HashSet::new();
        for (name, m) in self.names.iter().zip(&self.members) {
            let n = m.size();
            for mask in 1u64..(1u64 << n) - 1 {
                let subset: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                let sub = m.pullback(&subset);
                if known.contains(&sub) {
                    continue;
                }
                if self.find_iso(&sub).is_none() {
                    return Err(StructureError::NotClosed {
                        member: name.clone(),
                        subset: subset.iter().map(|&i| m.domain()[i].clone()).collect(),
                    });
                }
                known.insert(sub);
            }
        }
        Ok(())
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn members(&self) -> &[RelStructure] {
        &self.members
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn has_empty(&self) -> bool {
        self.members.iter().any(|m| m.size() == 0)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The first member isomorphic to `s`, with an isomorphism `s → member`.
    pub fn find_iso(&self, s: &RelStructure) -> Option<(usize, Vec<usize>)> {
        self.members
            .iter()
            .enumerate()
            .find_map(|(i, m)| find_structure_isomorphism(s, m).map(|iso| (i, iso)))
    }

    pub fn contains_up_to_iso(&self, s: &RelStructure) -> bool {
        *s.signature() == self.signature && s.size() <= self.max_size && self.find_iso(s).is_some()
    }

    /// Every structure on `{0,…,n-1}` isomorphic to a member, in member
    /// order and then lexicographic order of the relabelling.
    pub fn structures_on(&self, n: usize) -> Vec<RelStructure> {
        let perms = permutations(n);
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for m in self.members.iter().filter(|m| m.size() == n) {
            for p in &perms {
                let s = m.transport(p);
                if seen.insert(s.clone()) {
                    out.push(s);
                }
            }
        }
        out
    }

    /// All labelled copies on numeric domains; copies of a member `m` are
    /// named `m[p]` after the relabelling `p`, the identity keeping `m`.
    pub fn labeled(&self) -> TruncatedClass {
        let mut seen = HashSet::new();
        let mut members = Vec::new();
        let mut names = Vec::new();
        for (name, m) in self.names.iter().zip(&self.members) {
            for p in permutations(m.size()) {
                let s = m.transport(&p);
                if seen.insert(s.clone()) {
                    let identity = p.iter().enumerate().all(|(i, &x)| i == x);
                    names.push(if identity {
                        name.clone()
                    } else {
                        format!("{name}[{}]", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(""))
                    });
                    members.push(s);
                }
            }
        }
        TruncatedClass {
            signature: self.signature.clone(),
            members,
            names,
            max_size: self.max_size,
        }
    }

    /// First member of each isomorphism type.
    pub fn iso_representatives(&self) -> TruncatedClass {
        let mut keep: Vec<usize> = Vec::new();
        for (i, m) in self.members.iter().enumerate() {
            if !keep.iter().any(|&j| find_structure_isomorphism(m, &self.members[j]).is_some()) {
                keep.push(i);
            }
        }
        self.select(&keep)
    }

    fn select(&self, idx: &[usize]) -> TruncatedClass {
        TruncatedClass {
            signature: self.signature.clone(),
            members: idx.iter().map(|&i| self.members[i].clone()).collect(),
            names: idx.iter().map(|&i| self.names[i].clone()).collect(),
            max_size: self.max_size,
        }
    }

    /// Members with at most `max` elements.
    pub fn truncate(&self, max: usize) -> TruncatedClass {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| self.members[i].size() <= max).collect();
        let mut c = self.select(&idx);
        c.max_size = max.min(self.max_size);
        c
    }

    /// Adds the structure on the empty set, named `∅`, in front.
    pub fn with_empty(&self) -> TruncatedClass {
        if self.has_empty() {
            return self.clone();
        }
        let mut c = self.clone();
        c.members.insert(0, RelStructure::bare(self.signature.clone(), 0));
        c.names.insert(0, "∅".into());
        c
    }

    pub fn rename_symbols(&self, rename: impl Fn(&str) -> String) -> Result<TruncatedClass, StructureError> {
        let members = self
            .members
            .iter()
            .map(|m| m.rename_symbols(&rename))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TruncatedClass {
            signature: Signature::new(self.signature.symbols().iter().map(|(s, a)| (rename(s), *a)))?,
            members,
            names: self.names.clone(),
            max_size: self.max_size,
        })
    }
}

fn order_signature() -> Signature {
    Signature::new([("<", 2)]).expect("one symbol")
}

fn edge_signature() -> Signature {
    Signature::new([("E", 2)]).expect("one symbol")
}

fn chain_relation(order: &[usize]) -> BTreeSet<Vec<usize>> {
    let mut rel = BTreeSet::new();
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            rel.insert(vec![order[i], order[j]]);
        }
    }
    rel
}

/// Finite linear orders `o1,…,o{max}` on `{0,…,n-1}` with the natural `<`.
pub fn linear_orders(max: usize) -> TruncatedClass {
    let sig = order_signature();
    let members = (1..=max)
        .map(|n| {
            let order: Vec<usize> = (0..n).collect();
            let s = RelStructure::new(sig.clone(), super::numeric_domain(n), vec![chain_relation(&order)]);
            (format!("o{n}"), s.expect("valid order"))
        })
        .collect();
    TruncatedClass::new(sig, members, max).expect("orders are closed")
}

/// Sets `I1,…,I{max}` with no relations.
pub fn bare_sets(max: usize) -> TruncatedClass {
    let members = (1..=max)
        .map(|n| (format!("I{n}"), RelStructure::bare(Signature::empty(), n)))
        .collect();
    TruncatedClass::new(Signature::empty(), members, max).expect("sets are closed")
}

fn labeled_graphs(n: usize) -> Vec<BTreeSet<Vec<usize>>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            let mut rel = BTreeSet::new();
            for (k, &(i, j)) in pairs.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    rel.insert(vec![i, j]);
                    rel.insert(vec![j, i]);
                }
            }
            rel
        })
        .collect()
}

/// Iso-representatives among labelled structures, named `{prefix}{n}.{k}`.
fn representatives(sig: &Signature, max: usize, prefix: &str, labeled: impl Fn(usize) -> Vec<RelStructure>) -> TruncatedClass {
    let mut members: Vec<(String, RelStructure)> = Vec::new();
    for n in 1..=max {
        let mut reps: Vec<RelStructure> = Vec::new();
        for s in labeled(n) {
            if !reps.iter().any(|r| find_structure_isomorphism(&s, r).is_some()) {
                reps.push(s);
            }
        }
        members.extend(reps.into_iter().enumerate().map(|(k, s)| (format!("{prefix}{n}.{k}"), s)));
    }
    TruncatedClass::new(sig.clone(), members, max).expect("closed by construction")
}

/// Simple graphs (symmetric irreflexive `E`) up to isomorphism.
pub fn graphs(max: usize) -> TruncatedClass {
    let sig = edge_signature();
    representatives(&sig, max, "g", |n| {
        labeled_graphs(n)
            .into_iter()
            .map(|e| RelStructure::new(sig.clone(), super::numeric_domain(n), vec![e]).expect("graph"))
            .collect()
    })
}

/// Graphs of maximum degree at most one.
pub fn matchings(max: usize) -> TruncatedClass {
    let sig = edge_signature();
    representatives(&sig, max, "m", |n| {
        labeled_graphs(n)
            .into_iter()
            .filter(|e| (0..n).all(|v| e.iter().filter(|t| t[0] == v).count() <= 1))
            .map(|e| RelStructure::new(sig.clone(), super::numeric_domain(n), vec![e]).expect("graph"))
            .collect()
    })
}

/// Graphs with a linear order, symbols `<` and `E`.
pub fn ordered_graphs(max: usize) -> TruncatedClass {
    let sig = Signature::new([("<", 2), ("E", 2)]).expect("two symbols");
    representatives(&sig, max, "og", |n| {
        let mut out = Vec::new();
        for p in permutations(n) {
            for e in labeled_graphs(n) {
                out.push(RelStructure::new(sig.clone(), super::numeric_domain(n), vec![chain_relation(&p), e]).expect("og"));
            }
        }
        out
    })
}

/// A class as a category: members are objects and embeddings are arrows,
/// named `src->tgt:images`.
#[derive(Clone, Debug)]
pub struct StructureCategory {
    pub category: Arc<FinCategory>,
    pub class: TruncatedClass,
    /// The embedding underlying each arrow.
    pub maps: Vec<Vec<usize>>,
    index: HashMap<(ObjId, ObjId, Vec<usize>), ArrId>,
}

impl StructureCategory {
    pub fn arrow_for(&self, src: ObjId, tgt: ObjId, map: &[usize]) -> Option<ArrId> {
        self.index.get(&(src, tgt, map.to_vec())).copied()
    }

    pub fn structure(&self, x: ObjId) -> &RelStructure {
        &self.class.members()[x]
    }
}

fn arrow_name(src: &str, tgt: &str, map: &[usize]) -> String {
    let images: Vec<String> = map.iter().map(|x| x.to_string()).collect();
    format!("{src}->{tgt}:{}", images.join(","))
}

pub fn structures_category(class: &TruncatedClass) -> StructureCategory {
    let n = class.len();
    let mut arrows = Vec::new();
    let mut maps = Vec::new();
    let mut index = HashMap::new();
    for s in 0..n {
        for t in 0..n {
            for m in enumerate_embeddings(&class.members[s], &class.members[t]).expect("same signature") {
                index.insert((s, t, m.clone()), arrows.len());
                arrows.push(Arrow {
                    name: arrow_name(&class.names[s], &class.names[t], &m),
                    src: s,
                    tgt: t,
                });
                maps.push(m);
            }
        }
    }
    let identities = (0..n)
        .map(|s| index[&(s, s, (0..class.members[s].size()).collect::<Vec<_>>())])
        .collect();
    let category = CategoryBuilder::from_parts(class.names.clone(), arrows.clone(), identities, |g, f| {
        let m: Vec<usize> = maps[f].iter().map(|&x| maps[g][x]).collect();
        index.get(&(arrows[f].src, arrows[g].tgt, m)).copied()
    })
    .expect("embeddings form a category");
    StructureCategory {
        category: Arc::new(category),
        class: class.clone(),
        maps,
        index,
    }
}
