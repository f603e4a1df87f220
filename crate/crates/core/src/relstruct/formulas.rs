use std::fmt;

use super::class::TruncatedClass;
use super::{reduct, RelStructure, Signature, StructureError};

/// Quantifier-free formulas over variables `x0, x1, …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Atom { symbol: String, args: Vec<usize> },
    Eq(usize, usize),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    fn max_var(&self) -> Option<usize> {
        match self {
            Formula::Atom { args, .. } => args.iter().copied().max(),
            Formula::Eq(a, b) => Some(*a.max(b)),
            Formula::Not(f) => f.max_var(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().filter_map(Formula::max_var).max(),
        }
    }

    fn eval(&self, s: &RelStructure, v: &[usize]) -> Result<bool, StructureError> {
        Ok(match self {
            Formula::Atom { symbol, args } => {
                let r = s
                    .signature()
                    .index_of(symbol)
                    .ok_or_else(|| StructureError::UnknownSymbol(symbol.clone()))?;
                if s.signature().arity(r) != args.len() {
                    return Err(StructureError::BadTuple {
                        symbol: symbol.clone(),
                        tuple: args.clone(),
                        reason: format!("arity is {}", s.signature().arity(r)),
                    });
                }
                let t: Vec<usize> = args.iter().map(|&x| v[x]).collect();
                s.holds(r, &t)
            }
            Formula::Eq(a, b) => v[*a] == v[*b],
            Formula::Not(f) => !f.eval(s, v)?,
            Formula::And(fs) => {
                for f in fs {
                    if !f.eval(s, v)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(fs) => {
                for f in fs {
                    if f.eval(s, v)? {
                        return Ok(true);
                    }
                }
                false
            }
        })
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, fs: &[Formula], op: &str, unit: &str| {
            if fs.is_empty() {
                return write!(f, "{unit}");
            }
            write!(f, "(")?;
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{g}")?;
            }
            write!(f, ")")
        };
        match self {
            Formula::Atom { symbol, args } => {
                let vars: Vec<String> = args.iter().map(|x| format!("x{x}")).collect();
                write!(f, "{symbol}({})", vars.join(","))
            }
            Formula::Eq(a, b) => write!(f, "x{a} = x{b}"),
            Formula::Not(g) => match &**g {
                Formula::Eq(a, b) => write!(f, "x{a} ≠ x{b}"),
                g => write!(f, "¬{g}"),
            },
            Formula::And(fs) => join(f, fs, "∧", "⊤"),
            Formula::Or(fs) => join(f, fs, "∨", "⊥"),
        }
    }
}

/// A formula together with its free variables `x0,…,x{free-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QFFormula {
    free: usize,
    body: Formula,
}

impl QFFormula {
    pub fn new(free: usize, body: Formula) -> Result<Self, StructureError> {
        match body.max_var() {
            Some(var) if var >= free => Err(StructureError::UndeclaredVariable { var, free }),
            _ => Ok(QFFormula { free, body }),
        }
    }

    pub fn free(&self) -> usize {
        self.free
    }

    pub fn body(&self) -> &Formula {
        &self.body
    }

    /// Truth in `s` with `x_i ↦ assignment[i]`.
    pub fn eval(&self, s: &RelStructure, assignment: &[usize]) -> Result<bool, StructureError> {
        if assignment.len() != self.free || assignment.iter().any(|&x| x >= s.size()) {
            return Err(StructureError::BadTuple {
                symbol: "assignment".into(),
                tuple: assignment.to_vec(),
                reason: format!("needs {} values in the domain", self.free),
            });
        }
        self.body.eval(s, assignment)
    }
}

impl fmt::Display for QFFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.body.fmt(f)
    }
}

fn all_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t: Vec<usize>| {
                (0..n).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// The literal description of `e` with element `x` read as variable `iota[x]`.
fn describe(e: &RelStructure, iota: &[usize]) -> Vec<Formula> {
    let sig = e.signature();
    let mut lits = Vec::new();
    for s in 0..sig.len() {
        for t in all_tuples(e.size(), sig.arity(s)) {
            let atom = Formula::Atom {
                symbol: sig.name(s).to_string(),
                args: t.iter().map(|&x| iota[x]).collect(),
            };
            lits.push(if e.holds(s, &t) { atom } else { Formula::Not(Box::new(atom)) });
        }
    }
    lits
}

/// The equality pattern of the tuple `ebar` on variables `x0,…`.
fn equality_pattern(ebar: &[usize]) -> Vec<Formula> {
    let mut lits = Vec::new();
    for x in 0..ebar.len() {
        for y in x + 1..ebar.len() {
            let eq = Formula::Eq(x, y);
            lits.push(if ebar[x] == ebar[y] { eq } else { Formula::Not(Box::new(eq)) });
        }
    }
    lits
}

/// For each symbol `R` of `base_signature`, a formula in the signature of
/// `expanded` defining `R` in the projections: the disjunction, over
/// members `E` and tuples `ē ∈ R^{π(E)}` onto `E`, of the equality pattern
/// of `ē` and the description of `E` with each element read as the first
/// variable `ē` sends to it. `projection[i]` is the image of the `i`-th
/// member. Each formula is checked on every member and tuple.
pub fn define_reduct_formulas(
    expanded: &TruncatedClass,
    base_signature: &Signature,
    projection: &[RelStructure],
) -> Result<Vec<(String, QFFormula)>, StructureError> {
    expanded.validate()?;
    if projection.len() != expanded.len() {
        return Err(StructureError::SignatureMismatch("one projection per member is needed".into()));
    }
    for (i, (e, p)) in expanded.members().iter().zip(projection).enumerate() {
        if p.size() != e.size() {
            return Err(StructureError::NotDomainPreserving(expanded.name(i).to_string()));
        }
        if p.signature() != base_signature {
            return Err(StructureError::SignatureMismatch(format!("projection of `{}`", expanded.name(i))));
        }
    }
    let mut out = Vec::new();
    for r in 0..base_signature.len() {
        let k = base_signature.arity(r);
        let mut disjuncts = Vec::new();
        for (e, p) in expanded.members().iter().zip(projection) {
            for ebar in p.relation(r) {
                let mut iota = vec![usize::MAX; e.size()];
                for (i, &x) in ebar.iter().enumerate().rev() {
                    iota[x] = i;
                }
                if iota.contains(&usize::MAX) {
                    continue;
                }
                let mut lits = equality_pattern(ebar);
                lits.extend(describe(e, &iota));
                disjuncts.push(Formula::And(lits));
            }
        }
        let phi = QFFormula::new(k, Formula::Or(disjuncts))?;
        for (i, (e, p)) in expanded.members().iter().zip(projection).enumerate() {
            for t in all_tuples(e.size(), k) {
                if phi.eval(e, &t)? != p.holds(r, &t) {
                    return Err(StructureError::FormulaMismatch {
                        symbol: base_signature.name(r).to_string(),
                        member: expanded.name(i).to_string(),
                        tuple: t,
                    });
                }
            }
        }
        out.push((base_signature.name(r).to_string(), phi));
    }
    Ok(out)
}

/// [`define_reduct_formulas`] for the projection forgetting the symbols
/// outside `sigma`.
pub fn reduct_formulas(expanded: &TruncatedClass, sigma: &Signature) -> Result<Vec<(String, QFFormula)>, StructureError> {
    let projection = expanded
        .members()
        .iter()
        .map(|e| reduct(e, sigma))
        .collect::<Result<Vec<_>, _>>()?;
    define_reduct_formulas(expanded, sigma, &projection)
}

#[cfg(test)]
mod tests {
    use super::super::class::{linear_orders, ordered_graphs};
    use super::*;

    fn edge_sig() -> Signature {
        Signature::new([("E", 2)]).unwrap()
    }

    #[test]
    fn edge_from_ordered_graphs() {
        let og = ordered_graphs(2);
        let phis = reduct_formulas(&og, &edge_sig()).unwrap();
        assert_eq!(phis.len(), 1);
        let phi = &phis[0].1;
        // exhaustive over labelled ordered graphs with at most two vertices
        let all = og.labeled();
        assert_eq!(all.len(), 5);
        for e in all.members() {
            for t in all_tuples(e.size(), 2) {
                assert_eq!(phi.eval(e, &t).unwrap(), e.holds(1, &t));
            }
        }
    }

    #[test]
    fn order_from_ordered_graphs() {
        let og = ordered_graphs(3);
        let sigma = Signature::new([("<", 2)]).unwrap();
        let phis = reduct_formulas(&og, &sigma).unwrap();
        for e in og.labeled().members() {
            for t in all_tuples(e.size(), 2) {
                assert_eq!(phis[0].1.eval(e, &t).unwrap(), e.holds(0, &t));
            }
        }
    }

    #[test]
    fn empty_signature_and_errors() {
        assert!(reduct_formulas(&linear_orders(3), &Signature::empty()).unwrap().is_empty());
        let og = ordered_graphs(2);
        let shrunk: Vec<RelStructure> = og.members().iter().map(|e| RelStructure::bare(edge_sig(), e.size() - 1)).collect();
        assert!(matches!(
            define_reduct_formulas(&og, &edge_sig(), &shrunk),
            Err(StructureError::NotDomainPreserving(_))
        ));
        assert!(matches!(
            QFFormula::new(1, Formula::Eq(0, 1)),
            Err(StructureError::UndeclaredVariable { var: 1, free: 1 })
        ));
    }

    #[test]
    fn display() {
        let f = QFFormula::new(
            2,
            Formula::Or(vec![Formula::And(vec![
                Formula::Not(Box::new(Formula::Eq(0, 1))),
                Formula::Atom {
                    symbol: "<".into(),
                    args: vec![0, 1],
                },
            ])]),
        )
        .unwrap();
        assert_eq!(f.to_string(), "((x0 ≠ x1 ∧ <(x0,x1)))");
    }
}
