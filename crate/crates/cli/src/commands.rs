use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use konig::expansion::{
    as_expansion, compute_core, enumerate_expansion_homs, find_expansion_hom, has_expansion_property,
    is_discrete_fibration, section, EnumerationOrder, Expansion, FibrationCheck, FunctorData,
};
use konig::fincat::{ArrId, FinCategory, ObjId};
use konig::ramsey::harness::{run_harness, HarnessOptions, ObstructionKind};
use konig::ramsey::{
    bad_coloring_diagram, confluence_counterexample_diagram, find_witness_threaded, is_ramsey_threaded,
    is_ramsey_witness_threaded, Coloring, PairVerdict,
};
use konig::relstruct::{
    blowup, has_strong_amalgamation, reduct, reduct_formulas, superposition_structure, StructureError,
};
use konig::setdiag::{minimal_unsat_core, Solution, Solver};
use konig::transfer::{grothendieck_elts, product, slice};
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::files::{category_json, diagram_json, functor_json, structure_json, Loaded, Loader};
use crate::Command;

/// A verdict: exit code 0 or 1, report fields, and for builder commands
/// the file they produce.
pub struct Outcome {
    pub holds: bool,
    pub body: Map<String, Value>,
    pub artifact: Option<Value>,
}

impl Outcome {
    fn new(holds: bool, body: Value) -> Self {
        let Value::Object(body) = body else {
            unreachable!("reports are objects")
        };
        Outcome {
            holds,
            body,
            artifact: None,
        }
    }

    fn built(body: Value, artifact: Value) -> Self {
        Outcome {
            artifact: Some(artifact),
            ..Outcome::new(true, body)
        }
    }
}

fn shown(p: &Path) -> String {
    p.display().to_string()
}

fn object(cat: &FinCategory, name: &str, file: &Path) -> Result<ObjId, CliError> {
    cat.object_id(name).map_err(|e| CliError::invalid(&shown(file), "/objects", e))
}

fn lib_error(file: &Path, e: impl ToString) -> CliError {
    CliError::invalid(&shown(file), "", e)
}

fn expansion(f: FunctorData, file: &Path) -> Result<Expansion, CliError> {
    as_expansion(f).map_err(|e| lib_error(file, e))
}

fn coloring_json(cat: &FinCategory, c: &Coloring) -> Value {
    let m: BTreeMap<&str, usize> = c.labelled(cat).into_iter().collect();
    json!(m)
}

fn solution_json(cat: &FinCategory, diag: &konig::setdiag::SetDiagram, s: &Solution) -> Value {
    let m: BTreeMap<String, String> = s.labelled(cat, diag).into_iter().collect();
    json!(m)
}

fn object_map(f: &FunctorData) -> Value {
    let m: BTreeMap<String, String> = f.named_maps().0.into_iter().collect();
    json!(m)
}

fn names(cat: &FinCategory, objs: &[ObjId]) -> Vec<String> {
    objs.iter().map(|&x| cat.object_name(x).to_string()).collect()
}

pub fn run(cmd: &Command, threads: usize, loader: &mut Loader) -> Result<Outcome, CliError> {
    Ok(match cmd {
        Command::Validate { file } => {
            let body = match loader.any(file)? {
                Loaded::Category(c) => json!({
                    "kind": "category", "objects": c.num_objects(), "arrows": c.num_arrows(),
                }),
                Loaded::Diagram(c, d) => json!({
                    "kind": "diagram", "objects": c.num_objects(), "warnings": d.warnings(&c),
                }),
                Loaded::Functor(f) => json!({
                    "kind": "functor",
                    "source_objects": f.source.num_objects(),
                    "target_objects": f.target.num_objects(),
                }),
                Loaded::CatValued(s) => {
                    let fibers: BTreeMap<&str, usize> = s
                        .base()
                        .objects()
                        .map(|r| (s.base().object_name(r), s.fiber(r).num_objects()))
                        .collect();
                    json!({ "kind": "catvalued", "fiber_objects": fibers })
                }
                Loaded::StructClass(c) => json!({
                    "kind": "structclass", "members": c.len(), "max_size": c.max_size(),
                }),
            };
            let mut out = Outcome::new(true, body);
            out.body.insert("valid".into(), json!(true));
            out
        }
        Command::Components { file } => {
            let cat = loader.category(file)?;
            let comps: Vec<Vec<String>> = cat.connected_components().iter().map(|c| names(&cat, c)).collect();
            Outcome::new(true, json!({ "components": comps }))
        }
        Command::Confluent { file } => {
            let cat = loader.category(file)?;
            let r = cat.confluence();
            let cocones: Vec<Value> = r
                .cocones
                .iter()
                .map(|c| {
                    json!({
                        "a": cat.object_name(c.a), "b": cat.object_name(c.b), "apex": cat.object_name(c.apex),
                        "left": cat.arrow_name(c.left), "right": cat.arrow_name(c.right),
                    })
                })
                .collect();
            let counter = r.counterexample.map(|(a, b)| json!([cat.object_name(a), cat.object_name(b)]));
            Outcome::new(
                r.confluent,
                json!({ "confluent": r.confluent, "cocones": cocones, "counterexample": counter }),
            )
        }
        Command::Ramsey { file, colors } => {
            let cat = loader.category(file)?;
            let r = is_ramsey_threaded(&cat, *colors, threads).map_err(|e| lib_error(file, e))?;
            let pairs: Vec<Value> = r
                .pairs
                .iter()
                .map(|p| {
                    let witness = match &p.verdict {
                        PairVerdict::Witness(c) => json!(cat.object_name(*c)),
                        PairVerdict::Fails(_) => Value::Null,
                    };
                    json!({ "a": cat.object_name(p.a), "b": cat.object_name(p.b), "witness": witness })
                })
                .collect();
            Outcome::new(
                r.is_ramsey(),
                json!({ "ramsey": r.is_ramsey(), "colors": colors, "pairs": pairs }),
            )
        }
        Command::Witness { file, pair, c, colors } => {
            let cat = loader.category(file)?;
            let (a, b) = (object(&cat, &pair.a, file)?, object(&cat, &pair.b, file)?);
            match c {
                Some(name) => {
                    let c = object(&cat, name, file)?;
                    let check = is_ramsey_witness_threaded(&cat, a, b, c, *colors, threads)
                        .map_err(|e| lib_error(file, e))?;
                    let cert = check.certificate().map(|k| coloring_json(&cat, k));
                    Outcome::new(
                        check.is_witness(),
                        json!({ "candidate": name, "witness": check.is_witness(), "certificate": cert }),
                    )
                }
                None => {
                    let w = find_witness_threaded(&cat, a, b, *colors, threads).map_err(|e| lib_error(file, e))?;
                    Outcome::new(w.is_some(), json!({ "witness": w.map(|c| cat.object_name(c)) }))
                }
            }
        }
        Command::Solve { file, arrows, all, cap } => {
            let (cat, diag) = loader.diagram(file)?;
            let m = match arrows {
                Some(list) => Some(
                    list.iter()
                        .map(|n| cat.arrow_id(n).map_err(|e| CliError::Usage(format!("--arrows: {e}"))))
                        .collect::<Result<Vec<ArrId>, _>>()?,
                ),
                None => None,
            };
            let solver = match &m {
                Some(m) => Solver::restricted(&cat, &diag, m).map_err(|e| lib_error(file, e))?,
                None => Solver::full(&cat, &diag),
            };
            let mut body = Map::new();
            let solvable = if *all {
                let sols = solver.enumerate(*cap);
                let list: Vec<Value> = sols.iter().map(|s| solution_json(&cat, &diag, s)).collect();
                body.insert("count".into(), json!(list.len()));
                body.insert("solutions".into(), json!(list));
                !sols.is_empty()
            } else {
                let sol = solver.solve();
                body.insert("solution".into(), json!(sol.as_ref().map(|s| solution_json(&cat, &diag, s))));
                sol.is_some()
            };
            body.insert("solvable".into(), json!(solvable));
            if let Some(m) = &m {
                let restricted: Vec<&str> = m.iter().map(|&f| cat.arrow_name(f)).collect();
                body.insert("arrows".into(), json!(restricted));
            } else if !solvable {
                let core: Vec<&str> = minimal_unsat_core(&cat, &diag)
                    .unwrap_or_default()
                    .iter()
                    .map(|&f| cat.arrow_name(f))
                    .collect();
                body.insert("unsat_core".into(), json!(core));
            }
            let warnings = diag.warnings(&cat);
            if !warnings.is_empty() {
                body.insert("warnings".into(), json!(warnings));
            }
            Outcome::new(solvable, Value::Object(body))
        }
        Command::BadDiagram { file, pair, colors } => {
            let cat = loader.category(file)?;
            let (a, b) = (object(&cat, &pair.a, file)?, object(&cat, &pair.b, file)?);
            let d = bad_coloring_diagram(&cat, a, b, *colors).map_err(|e| lib_error(file, e))?;
            let solvable = Solver::full(&cat, &d).solve().is_some();
            Outcome::built(
                json!({ "nonempty": d.empty_carriers().is_empty(), "solvable": solvable }),
                diagram_json(&cat, &d),
            )
        }
        Command::ConflDiagram { file, pair } => {
            let cat = loader.category(file)?;
            let (a, b) = (object(&cat, &pair.a, file)?, object(&cat, &pair.b, file)?);
            let d = confluence_counterexample_diagram(&cat, a, b).map_err(|e| lib_error(file, e))?;
            let solvable = Solver::full(&cat, &d).solve().is_some();
            Outcome::built(
                json!({ "nonempty": d.empty_carriers().is_empty(), "solvable": solvable }),
                diagram_json(&cat, &d),
            )
        }
        Command::Fibration { file } => {
            let f = loader.functor(file)?;
            let check = is_discrete_fibration(&f);
            let violation = match &check {
                FibrationCheck::Fibration => Value::Null,
                FibrationCheck::Violation { object, arrow, lifts } => json!({
                    "object": f.source.object_name(*object),
                    "arrow": f.target.arrow_name(*arrow),
                    "lifts": lifts.iter().map(|&g| f.source.arrow_name(g)).collect::<Vec<_>>(),
                }),
            };
            Outcome::new(
                check.holds(),
                json!({ "discrete_fibration": check.holds(), "violation": violation }),
            )
        }
        Command::Section { file } => {
            let e = expansion(loader.functor(file)?, file)?;
            let s = section(&e);
            Outcome::new(s.is_some(), json!({ "section": s.as_ref().map(object_map) }))
        }
        Command::Core { file } => {
            let e = expansion(loader.functor(file)?, file)?;
            let core = compute_core(&e, EnumerationOrder::Forward).map_err(|e| lib_error(file, e))?;
            let base = e.base();
            let sizes: BTreeMap<&str, usize> = base
                .objects()
                .zip(core.expansion.fiber_sizes())
                .map(|(c, n)| (base.object_name(c), n))
                .collect();
            Outcome::built(
                json!({
                    "core_objects": names(e.total(), &core.objects),
                    "fiber_sizes": sizes,
                    "is_own_core": core.objects.len() == e.total().num_objects(),
                }),
                functor_json(core.expansion.functor()),
            )
        }
        Command::Ep { file } => {
            let e = expansion(loader.functor(file)?, file)?;
            let r = has_expansion_property(&e);
            let base = e.base();
            let w: BTreeMap<&str, Option<&str>> = base
                .objects()
                .map(|c| (base.object_name(c), r.witnesses[c].map(|x| base.object_name(x))))
                .collect();
            Outcome::new(r.holds(), json!({ "ep": r.holds(), "witnesses": w }))
        }
        Command::HomExpansion { from, to, all, cap } => {
            let p = expansion(loader.functor(from)?, from)?;
            let r = expansion(loader.functor(to)?, to)?;
            if *all {
                let homs = enumerate_expansion_homs(&p, &r, *cap).map_err(|e| lib_error(to, e))?;
                let list: Vec<Value> = homs.iter().map(object_map).collect();
                Outcome::new(!homs.is_empty(), json!({ "exists": !homs.is_empty(), "count": list.len(), "homs": list }))
            } else {
                let h = find_expansion_hom(&p, &r).map_err(|e| lib_error(to, e))?;
                Outcome::new(h.is_some(), json!({ "exists": h.is_some(), "hom": h.as_ref().map(object_map) }))
            }
        }
        Command::Product { left, right } => {
            let (c, d) = (loader.category(left)?, loader.category(right)?);
            let p = product(&c, &d);
            Outcome::built(
                json!({ "objects": p.num_objects(), "arrows": p.num_arrows() }),
                category_json(&p),
            )
        }
        Command::Slice { file, a } => {
            let cat = loader.category(file)?;
            let x = object(&cat, a, file)?;
            let (s, proj) = slice(&cat, x).map_err(|e| lib_error(file, e))?;
            Outcome::built(
                json!({ "objects": s.num_objects(), "arrows": s.num_arrows() }),
                functor_json(&proj),
            )
        }
        Command::Elts { file } => {
            let s = loader.catvalued(file)?;
            let e = grothendieck_elts(&s).map_err(|e| lib_error(file, e))?;
            Outcome::built(
                json!({ "objects": e.category.num_objects(), "arrows": e.category.num_arrows() }),
                functor_json(&e.projection),
            )
        }
        Command::Blowup { left, right } => {
            let (l, r) = (loader.class(left)?, loader.class(right)?);
            let b = blowup(&l, &r);
            let fibration = is_discrete_fibration(&b.projection).holds();
            Outcome::built(
                json!({
                    "objects": b.category.num_objects(),
                    "arrows": b.category.num_arrows(),
                    "discrete_fibration": fibration,
                }),
                functor_json(&b.projection),
            )
        }
        Command::Superpose { file, member, map } => {
            let class = loader.class(file)?;
            let i = class
                .index_of(member)
                .ok_or_else(|| CliError::invalid(&shown(file), "/structures", format!("no member named `{member}`")))?;
            match superposition_structure(&class, &class.members()[i], map) {
                Ok(sp) => {
                    let named = class.find_iso(&sp.structure).map(|(k, _)| class.name(k));
                    Outcome::new(
                        true,
                        json!({
                            "amalgam": true,
                            "structure": structure_json(&sp.structure),
                            "member": named,
                            "right_inverses": sp.right_inverses,
                        }),
                    )
                }
                Err(e @ StructureError::NoAmalgam { .. }) => {
                    Outcome::new(false, json!({ "amalgam": false, "reason": e.to_string() }))
                }
                Err(e) => return Err(CliError::Usage(format!("--map: {e}"))),
            }
        }
        Command::Amalgamation { file, bound } => {
            let class = loader.class(file)?;
            let r = has_strong_amalgamation(&class, *bound);
            let failure = r.failure.as_ref().map(|f| {
                json!({ "a": f.a, "b": f.b, "c": f.c, "f": f.f, "g": f.g, "merge": f.k })
            });
            Outcome::new(
                r.holds(),
                json!({ "holds": r.holds(), "configurations": r.configurations, "failure": failure }),
            )
        }
        Command::Formulas { expanded, base } => {
            let (e, b) = (loader.class(expanded)?, loader.class(base)?);
            let formulas = reduct_formulas(&e, b.signature()).map_err(|err| lib_error(expanded, err))?;
            let mut in_base = true;
            for s in e.members() {
                let r = reduct(s, b.signature()).map_err(|err| lib_error(expanded, err))?;
                in_base &= b.contains_up_to_iso(&r);
            }
            let out: BTreeMap<&str, Value> = formulas
                .iter()
                .map(|(sym, q)| (sym.as_str(), json!({ "free": q.free(), "formula": q.body().to_string() })))
                .collect();
            Outcome::new(true, json!({ "formulas": out, "reducts_in_base": in_base }))
        }
        Command::Report { file, colors, samples, seed } => {
            let cat: Arc<FinCategory> = loader.category(file)?;
            let opts = HarnessOptions {
                colors: *colors,
                samples: *samples,
                seed: *seed,
                threads,
                ..Default::default()
            };
            let r = run_harness(&cat, &opts).map_err(|e| lib_error(file, e))?;
            let obstruction = r.obstruction.as_ref().map(|o| {
                let kind = match o.kind {
                    ObstructionKind::NotConfluent => "not_confluent",
                    ObstructionKind::NotRamsey => "not_ramsey",
                };
                json!({
                    "kind": kind, "a": cat.object_name(o.a), "b": cat.object_name(o.b),
                    "nonempty": o.nonempty, "solvable": o.solvable,
                })
            });
            let every_diagram_solvable = r.confluent && r.ramsey && r.unsolved.is_none();
            Outcome::new(
                every_diagram_solvable,
                json!({
                    "confluent": r.confluent,
                    "ramsey": r.ramsey,
                    "colors": colors,
                    "exhaustive": r.exhaustive,
                    "sampled": r.sampled,
                    "unsolved": r.unsolved.as_ref().map(|d| diagram_json(&cat, d)),
                    "obstruction": obstruction,
                    "consistent": r.consistent(),
                }),
            )
        }
    })
}
