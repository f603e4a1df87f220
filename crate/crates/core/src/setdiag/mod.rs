//! Set-valued diagrams `D: Cᵒᵖ → Set` over a [`FinCategory`], their limits
//! (solutions), solutions restricted to an arrow set `M`, and minimal
//! unsatisfiable arrow cores.
//!
//! An arrow `f: A → B` acts contravariantly, `D_f: D_B → D_A`, and a solution
//! picks `x_C ∈ D_C` for every object with `x_A = D_f(x_B)`.

pub mod gen;
mod solver;

use std::collections::HashMap;
use thiserror::Error;

use crate::fincat::{ArrId, CategoryError, FinCategory, ObjId};

pub use solver::Solver;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("no carrier set given for object `{0}`")]
    MissingCarrier(String),
    #[error("no action given for arrow `{0}`")]
    MissingAction(String),
    #[error("action of `{arrow}` is not a function {domain} → {codomain}: {reason}")]
    NotAFunction {
        arrow: String,
        domain: String,
        codomain: String,
        reason: String,
    },
    #[error("functoriality fails: D_{f}∘D_{g} ≠ D_({g}∘{f})")]
    FunctorialityViolated { f: String, g: String },
    #[error("identity `{0}` does not act as the identity")]
    IdentityViolated(String),
    #[error("duplicate element `{element}` in carrier of `{object}`")]
    DuplicateElement { object: String, element: String },
    #[error("diagram does not match its category: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Category(#[from] CategoryError),
}

/// Unvalidated diagram: carriers by object name, and per arrow `f: A → B` a
/// map `element of D_B ↦ element of D_A`. Identity maps may be omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawDiagram {
    pub sets: Vec<(String, Vec<String>)>,
    pub maps: Vec<(String, Vec<(String, String)>)>,
}

/// A validated diagram. Elements are addressed by their index in the
/// carrier; labels are kept for reporting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetDiagram {
    carriers: Vec<Vec<String>>,
    /// `actions[f][y] = D_f(y)` for `y ∈ D_tgt(f)`.
    actions: Vec<Vec<usize>>,
}

/// A tuple `(x_C)` given by element indices, one per object.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Solution(pub Vec<usize>);

impl Solution {
    pub fn get(&self, c: ObjId) -> usize {
        self.0[c]
    }

    /// `(object, element)` label pairs.
    pub fn labelled(&self, cat: &FinCategory, diag: &SetDiagram) -> Vec<(String, String)> {
        cat.objects()
            .map(|c| {
                (
                    cat.object_name(c).to_string(),
                    diag.element_name(c, self.0[c]).to_string(),
                )
            })
            .collect()
    }
}

impl SetDiagram {
    /// Builds and validates a diagram from indexed carriers and actions.
    /// Identity actions are checked, not synthesized.
    pub fn from_parts(
        cat: &FinCategory,
        carriers: Vec<Vec<String>>,
        actions: Vec<Vec<usize>>,
    ) -> Result<Self, DiagramError> {
        if carriers.len() != cat.num_objects() {
            return Err(DiagramError::ShapeMismatch(format!(
                "{} carriers for {} objects",
                carriers.len(),
                cat.num_objects()
            )));
        }
        if actions.len() != cat.num_arrows() {
            return Err(DiagramError::ShapeMismatch(format!(
                "{} actions for {} arrows",
                actions.len(),
                cat.num_arrows()
            )));
        }
        for (c, carrier) in carriers.iter().enumerate() {
            let mut seen = std::collections::HashSet::new();
            for e in carrier {
                if !seen.insert(e) {
                    return Err(DiagramError::DuplicateElement {
                        object: cat.object_name(c).to_string(),
                        element: e.clone(),
                    });
                }
            }
        }
        let diag = SetDiagram { carriers, actions };
        diag.check(cat)?;
        Ok(diag)
    }

    /// Parses a raw description against `cat`; identity actions are
    /// synthesized when absent.
    pub fn from_raw(cat: &FinCategory, raw: &RawDiagram) -> Result<Self, DiagramError> {
        let mut carriers: Vec<Option<Vec<String>>> = vec![None; cat.num_objects()];
        for (o, elems) in &raw.sets {
            let c = cat.object_id(o)?;
            carriers[c] = Some(elems.clone());
        }
        let carriers: Vec<Vec<String>> = carriers
            .into_iter()
            .enumerate()
            .map(|(c, x)| x.ok_or_else(|| DiagramError::MissingCarrier(cat.object_name(c).to_string())))
            .collect::<Result<_, _>>()?;
        let index: Vec<HashMap<&str, usize>> = carriers
            .iter()
            .map(|xs| xs.iter().enumerate().map(|(i, x)| (x.as_str(), i)).collect())
            .collect();

        let mut actions: Vec<Option<Vec<usize>>> = vec![None; cat.num_arrows()];
        for (a, pairs) in &raw.maps {
            let f = cat.arrow_id(a)?;
            let (s, t) = (cat.src(f), cat.tgt(f));
            let mut table = vec![usize::MAX; carriers[t].len()];
            for (from, to) in pairs {
                let bad = |reason: String| DiagramError::NotAFunction {
                    arrow: a.clone(),
                    domain: cat.object_name(t).to_string(),
                    codomain: cat.object_name(s).to_string(),
                    reason,
                };
                let &y = index[t]
                    .get(from.as_str())
                    .ok_or_else(|| bad(format!("`{from}` is not in the domain")))?;
                let &x = index[s]
                    .get(to.as_str())
                    .ok_or_else(|| bad(format!("`{to}` is not in the codomain")))?;
                if table[y] != usize::MAX && table[y] != x {
                    return Err(bad(format!("`{from}` has two images")));
                }
                table[y] = x;
            }
            if let Some(y) = table.iter().position(|&x| x == usize::MAX) {
                return Err(DiagramError::NotAFunction {
                    arrow: a.clone(),
                    domain: cat.object_name(t).to_string(),
                    codomain: cat.object_name(s).to_string(),
                    reason: format!("`{}` has no image", carriers[t][y]),
                });
            }
            actions[f] = Some(table);
        }
        let actions = actions
            .into_iter()
            .enumerate()
            .map(|(f, a)| match a {
                Some(a) => Ok(a),
                None if cat.is_identity(f) => Ok((0..carriers[cat.src(f)].len()).collect()),
                None => Err(DiagramError::MissingAction(cat.arrow_name(f).to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_parts(cat, carriers, actions)
    }

    fn check(&self, cat: &FinCategory) -> Result<(), DiagramError> {
        for f in cat.arrows() {
            let (s, t) = (cat.src(f), cat.tgt(f));
            let act = &self.actions[f];
            if act.len() != self.carriers[t].len() || act.iter().any(|&x| x >= self.carriers[s].len()) {
                return Err(DiagramError::NotAFunction {
                    arrow: cat.arrow_name(f).to_string(),
                    domain: cat.object_name(t).to_string(),
                    codomain: cat.object_name(s).to_string(),
                    reason: "not total or out of range".into(),
                });
            }
        }
        for c in cat.objects() {
            let id = cat.identity(c);
            if self.actions[id].iter().enumerate().any(|(i, &x)| i != x) {
                return Err(DiagramError::IdentityViolated(cat.arrow_name(id).to_string()));
            }
        }
        for f in cat.arrows() {
            for &g in cat.out_arrows(cat.tgt(f)) {
                let gf = cat.compose(g, f).expect("composable");
                let (af, ag, agf) = (&self.actions[f], &self.actions[g], &self.actions[gf]);
                if (0..agf.len()).any(|z| af[ag[z]] != agf[z]) {
                    return Err(DiagramError::FunctorialityViolated {
                        f: cat.arrow_name(f).to_string(),
                        g: cat.arrow_name(g).to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn carrier(&self, c: ObjId) -> &[String] {
        &self.carriers[c]
    }

    pub fn carrier_size(&self, c: ObjId) -> usize {
        self.carriers[c].len()
    }

    pub fn element_name(&self, c: ObjId, x: usize) -> &str {
        &self.carriers[c][x]
    }

    pub fn element_index(&self, c: ObjId, label: &str) -> Option<usize> {
        self.carriers[c].iter().position(|x| x == label)
    }

    /// `D_f(y)` for `y ∈ D_tgt(f)`.
    pub fn act(&self, f: ArrId, y: usize) -> usize {
        self.actions[f][y]
    }

    pub fn action(&self, f: ArrId) -> &[usize] {
        &self.actions[f]
    }

    pub fn empty_carriers(&self) -> Vec<ObjId> {
        (0..self.carriers.len())
            .filter(|&c| self.carriers[c].is_empty())
            .collect()
    }

    /// Non-fatal findings: empty carriers make the limit empty.
    pub fn warnings(&self, cat: &FinCategory) -> Vec<String> {
        self.empty_carriers()
            .into_iter()
            .map(|c| format!("carrier of `{}` is empty", cat.object_name(c)))
            .collect()
    }

    /// True when `sol` satisfies `x_A = D_f(x_B)` for every `f` in `arrows`.
    pub fn satisfies(&self, cat: &FinCategory, sol: &Solution, arrows: &[ArrId]) -> bool {
        sol.0.len() == self.carriers.len()
            && sol.0.iter().enumerate().all(|(c, &x)| x < self.carriers[c].len())
            && arrows
                .iter()
                .all(|&f| sol.0[cat.src(f)] == self.actions[f][sol.0[cat.tgt(f)]])
    }

    /// True when `sol` is a full solution.
    pub fn is_solution(&self, cat: &FinCategory, sol: &Solution) -> bool {
        let all: Vec<ArrId> = cat.arrows().collect();
        self.satisfies(cat, sol, &all)
    }

    /// Restriction to the full subcategory on `objs` (which must be the
    /// object order of `sub`, as produced by [`FinCategory::full_subcategory`]).
    pub fn restrict(&self, cat: &FinCategory, objs: &[ObjId], sub: &FinCategory) -> Result<SetDiagram, DiagramError> {
        let carriers = objs.iter().map(|&o| self.carriers[o].clone()).collect();
        let actions = sub
            .arrows()
            .map(|f| cat.arrow_id(sub.arrow_name(f)).map(|g| self.actions[g].clone()))
            .collect::<Result<Vec<_>, _>>()?;
        SetDiagram::from_parts(sub, carriers, actions)
    }

    /// Exports in raw form, identities included.
    pub fn to_raw(&self, cat: &FinCategory) -> RawDiagram {
        RawDiagram {
            sets: cat
                .objects()
                .map(|c| (cat.object_name(c).to_string(), self.carriers[c].clone()))
                .collect(),
            maps: cat
                .arrows()
                .map(|f| {
                    let (s, t) = (cat.src(f), cat.tgt(f));
                    let pairs = self.actions[f]
                        .iter()
                        .enumerate()
                        .map(|(y, &x)| (self.carriers[t][y].clone(), self.carriers[s][x].clone()))
                        .collect();
                    (cat.arrow_name(f).to_string(), pairs)
                })
                .collect(),
        }
    }
}

/// Some solution, or `None` when the limit is empty.
pub fn solve(cat: &FinCategory, diag: &SetDiagram) -> Option<Solution> {
    Solver::full(cat, diag).solve()
}

/// All solutions (at most `cap`) in lexicographic order of element indices.
pub fn enumerate_solutions(cat: &FinCategory, diag: &SetDiagram, cap: Option<usize>) -> Vec<Solution> {
    Solver::full(cat, diag).enumerate(cap)
}

/// An `M`-solution: compatible with the arrows in `m` only. Objects not
/// touched by `m` take the first element of their carrier.
pub fn solve_restricted(cat: &FinCategory, diag: &SetDiagram, m: &[ArrId]) -> Result<Option<Solution>, DiagramError> {
    Ok(Solver::restricted(cat, diag, m)?.solve())
}

pub fn enumerate_restricted(
    cat: &FinCategory,
    diag: &SetDiagram,
    m: &[ArrId],
    cap: Option<usize>,
) -> Result<Vec<Solution>, DiagramError> {
    Ok(Solver::restricted(cat, diag, m)?.enumerate(cap))
}

/// A ⊆-minimal arrow set `M` with no `M`-solution, found by greedy single
/// deletion in declaration order; `None` when the diagram is solvable.
/// Identity arrows never constrain and are never part of the core.
pub fn minimal_unsat_core(cat: &FinCategory, diag: &SetDiagram) -> Option<Vec<ArrId>> {
    if solve(cat, diag).is_some() {
        return None;
    }
    let mut core: Vec<ArrId> = cat.arrows().filter(|&f| !cat.is_identity(f)).collect();
    let mut i = 0;
    while i < core.len() {
        let mut trial = core.clone();
        trial.remove(i);
        let unsat = Solver::restricted(cat, diag, &trial)
            .expect("arrows of cat")
            .solve()
            .is_none();
        if unsat {
            core = trial;
        } else {
            i += 1;
        }
    }
    Some(core)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn raw(sets: &[(&str, &[&str])], maps: &[(&str, &[(&str, &str)])]) -> RawDiagram {
        RawDiagram {
            sets: sets
                .iter()
                .map(|(o, xs)| (o.to_string(), xs.iter().map(|x| x.to_string()).collect()))
                .collect(),
            maps: maps
                .iter()
                .map(|(a, ps)| {
                    (
                        a.to_string(),
                        ps.iter().map(|(x, y)| (x.to_string(), y.to_string())).collect(),
                    )
                })
                .collect(),
        }
    }

    pub(crate) fn span_diagram() -> (FinCategory, SetDiagram) {
        let cat = corpus::span();
        let d = SetDiagram::from_raw(
            &cat,
            &raw(
                &[("A", &["0"]), ("B", &["1"]), ("D", &["0", "1"])],
                &[("inclA", &[("0", "0")]), ("inclB", &[("1", "1")])],
            ),
        )
        .unwrap();
        (cat, d)
    }

    pub(crate) fn parallel_diagram() -> (FinCategory, SetDiagram) {
        let cat = corpus::parallel_pair();
        let d = SetDiagram::from_raw(
            &cat,
            &raw(
                &[("a", &["0", "1"]), ("b", &["*"])],
                &[("p0", &[("*", "0")]), ("p1", &[("*", "1")])],
            ),
        )
        .unwrap();
        (cat, d)
    }

    #[test]
    fn validation_examples() {
        let (_, d) = parallel_diagram();
        assert_eq!(d.carrier_size(0), 2);

        let chain = corpus::chain(3);
        let bad = raw(
            &[("1", &["0", "1"]), ("2", &["0", "1"]), ("3", &["0", "1"])],
            &[
                ("f", &[("0", "0"), ("1", "1")]),
                ("g", &[("0", "0"), ("1", "1")]),
                ("gf", &[("0", "1"), ("1", "0")]),
            ],
        );
        assert_eq!(
            SetDiagram::from_raw(&chain, &bad),
            Err(DiagramError::FunctorialityViolated {
                f: "f".into(),
                g: "g".into()
            })
        );
        let missing = raw(&[("1", &["0"]), ("2", &["0"])], &[]);
        assert!(matches!(
            SetDiagram::from_raw(&chain, &missing),
            Err(DiagramError::MissingCarrier(o)) if o == "3"
        ));
        let no_action = raw(&[("1", &["0"]), ("2", &["0"]), ("3", &["0"])], &[("f", &[("0", "0")])]);
        assert!(matches!(
            SetDiagram::from_raw(&chain, &no_action),
            Err(DiagramError::MissingAction(_))
        ));
        let partial = raw(
            &[("1", &["0"]), ("2", &["0", "1"]), ("3", &["0"])],
            &[("f", &[("0", "0")]), ("g", &[("0", "0")]), ("gf", &[("0", "0")])],
        );
        assert!(matches!(
            SetDiagram::from_raw(&chain, &partial),
            Err(DiagramError::NotAFunction { .. })
        ));
    }

    #[test]
    fn konig_chain_prefix_of_singletons() {
        let chain = corpus::chain(4);
        let carriers = chain.objects().map(|c| vec![format!("a{}", c + 1)]).collect();
        let actions = chain.arrows().map(|_| vec![0]).collect();
        let d = SetDiagram::from_parts(&chain, carriers, actions).unwrap();
        assert_eq!(solve(&chain, &d), Some(Solution(vec![0; 4])));
        assert_eq!(enumerate_solutions(&chain, &d, None).len(), 1);
    }

    #[test]
    fn span_and_parallel_examples_have_no_solution() {
        let (cat, d) = span_diagram();
        assert_eq!(solve(&cat, &d), None);
        assert!(enumerate_solutions(&cat, &d, None).is_empty());
        let (cat, d) = parallel_diagram();
        assert_eq!(solve(&cat, &d), None);
    }

    #[test]
    fn constant_and_product_counts() {
        let chain = corpus::chain(3);
        let carriers = chain.objects().map(|_| vec!["0".to_string(), "1".to_string()]).collect();
        let actions = chain.arrows().map(|_| vec![0, 1]).collect();
        let d = SetDiagram::from_parts(&chain, carriers, actions).unwrap();
        let sols = enumerate_solutions(&chain, &d, None);
        assert_eq!(sols, vec![Solution(vec![0, 0, 0]), Solution(vec![1, 1, 1])]);

        let disc = corpus::discrete(&["a", "b"]);
        let d = SetDiagram::from_parts(
            &disc,
            vec![vec!["x".into(), "y".into()], vec!["0".into(), "1".into(), "2".into()]],
            vec![vec![0, 1], vec![0, 1, 2]],
        )
        .unwrap();
        assert_eq!(enumerate_solutions(&disc, &d, None).len(), 6);
        assert_eq!(enumerate_solutions(&disc, &d, Some(4)).len(), 4);
    }

    #[test]
    fn restricted_solutions() {
        let (cat, d) = parallel_diagram();
        assert_eq!(solve_restricted(&cat, &d, &[]).unwrap(), Some(Solution(vec![0, 0])));
        let p1 = cat.arrow_id("p1").unwrap();
        let s = solve_restricted(&cat, &d, &[p1]).unwrap().unwrap();
        assert_eq!(s, Solution(vec![1, 0]));
        // oracle: the only p1-compatible tuple among the 2 candidates
        let oracle: Vec<Solution> = (0..2)
            .map(|x| Solution(vec![x, 0]))
            .filter(|s| d.satisfies(&cat, s, &[p1]))
            .collect();
        assert_eq!(oracle, vec![s]);
        let all: Vec<ArrId> = cat.arrows().collect();
        assert_eq!(solve_restricted(&cat, &d, &all).unwrap(), None);
        assert!(solve_restricted(&cat, &d, &[99]).is_err());
    }

    #[test]
    fn unsat_cores() {
        let (cat, d) = parallel_diagram();
        let core = minimal_unsat_core(&cat, &d).unwrap();
        let names: Vec<_> = core.iter().map(|&f| cat.arrow_name(f)).collect();
        assert_eq!(names, vec!["p0", "p1"]);
        for i in 0..core.len() {
            let mut smaller = core.clone();
            smaller.remove(i);
            assert!(solve_restricted(&cat, &d, &smaller).unwrap().is_some());
        }

        let (cat, d) = span_diagram();
        let core = minimal_unsat_core(&cat, &d).unwrap();
        let names: Vec<_> = core.iter().map(|&f| cat.arrow_name(f)).collect();
        assert_eq!(names, vec!["inclA", "inclB"]);
        for i in 0..core.len() {
            let mut smaller = core.clone();
            smaller.remove(i);
            assert!(solve_restricted(&cat, &d, &smaller).unwrap().is_some());
        }

        let chain = corpus::chain(2);
        let d = SetDiagram::from_parts(&chain, vec![vec!["x".into()], vec!["y".into()]], vec![vec![0]; 3]).unwrap();
        assert_eq!(minimal_unsat_core(&chain, &d), None);
    }

    #[test]
    fn empty_carriers_are_flagged() {
        let chain = corpus::chain(2);
        let d = SetDiagram::from_parts(&chain, vec![vec![], vec![]], vec![vec![]; 3]).unwrap();
        assert_eq!(d.warnings(&chain).len(), 2);
        assert_eq!(solve(&chain, &d), None);
        assert_eq!(minimal_unsat_core(&chain, &d), Some(vec![]));
    }

    #[test]
    fn raw_roundtrip() {
        let (cat, d) = span_diagram();
        assert_eq!(SetDiagram::from_raw(&cat, &d.to_raw(&cat)).unwrap(), d);
    }
}
