//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always print.

use std::sync::Arc;
use std::time::{Duration, Instant};

use konig::corpus;
use konig::expansion::{
    as_expansion, compute_core, diagram_to_expansion, doubled_expansion, enumerate_endomorphisms,
    enumerate_expansion_homs, expansion_isomorphism, expansion_to_diagram, has_expansion_property,
    identity_expansion, EnumerationOrder, Expansion,
};
use konig::fincat::{find_isomorphism, ArrId, FinCategory};
use konig::ramsey::harness::{run_harness, HarnessOptions, ObstructionKind};
use konig::ramsey::{coloring_diagram, find_witness, is_ramsey, is_ramsey_witness, iterated_m_solution};
use konig::relstruct::{
    blowup, blowup_as_elts, bare_sets, concrete_expansion, linear_orders, matchings, ordered_graphs,
    reduct_formulas, superposition_structure, Signature, StructureError,
};
use konig::setdiag::gen::{for_each_diagram, random_diagram};
use konig::setdiag::{solve_restricted, SetDiagram};
use konig::transfer::{grothendieck_elts, product, slice, CatValuedFunctor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let detail = f()?;
    let took = start.elapsed();
    ensure(took <= limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(format!("{detail} ({:.2}s)", took.as_secs_f64()))
}

fn ramsey_numbers() -> Outcome {
    timed(Duration::from_secs(10), || {
        let l6 = corpus::linear_orders_category(6);
        let w = find_witness(&l6, 1, 2, 2).map_err(|e| e.to_string())?;
        ensure(w.map(|c| l6.object_name(c)) == Some("o6"), || format!("L6 witness {w:?}"))?;
        let l5 = corpus::linear_orders_category(5);
        let w5 = find_witness(&l5, 1, 2, 2).map_err(|e| e.to_string())?;
        ensure(w5.is_none(), || format!("L5 witness {w5:?}"))?;
        Ok("L6 witness o6, L5 none".into())
    })
}

fn pigeonhole() -> Outcome {
    timed(Duration::from_secs(1), || {
        let l3 = corpus::linear_orders_category(3);
        let w = find_witness(&l3, 0, 1, 2).map_err(|e| e.to_string())?;
        ensure(w == Some(2), || format!("witness {w:?}"))?;
        let check = is_ramsey_witness(&l3, 0, 1, 1, 2).map_err(|e| e.to_string())?;
        let cert = check.certificate().ok_or("o2 accepted as witness")?;
        ensure(cert.assignment == vec![0, 1], || format!("certificate {:?}", cert.assignment))?;
        Ok("witness o3, o2 rejected by coloring [0,1]".into())
    })
}

fn theorem_harness() -> Outcome {
    timed(Duration::from_secs(60), || {
        let opts = HarnessOptions::default();
        let (mut good, mut non_confluent, mut non_ramsey) = (0, 0, 0);
        let members = corpus::standard();
        for (name, cat) in &members {
            let r = run_harness(cat, &opts).map_err(|e| format!("{name}: {e}"))?;
            ensure(r.consistent(), || format!("{name}: inconsistent verdict"))?;
            match &r.obstruction {
                None => {
                    ensure(r.sampled == opts.samples, || format!("{name}: only {} samples", r.sampled))?;
                    ensure(cat.num_arrows() > 6 || r.exhaustive.is_some(), || format!("{name}: not enumerated"))?;
                    good += 1;
                }
                Some(o) => match o.kind {
                    ObstructionKind::NotConfluent => non_confluent += 1,
                    ObstructionKind::NotRamsey => non_ramsey += 1,
                },
            }
        }
        ensure(members.len() >= 10 && good > 0 && non_confluent > 0 && non_ramsey > 0, || {
            format!("corpus coverage {good}/{non_confluent}/{non_ramsey}")
        })?;
        Ok(format!(
            "{} categories: {good} solvable, {non_confluent} non-confluent, {non_ramsey} non-Ramsey",
            members.len()
        ))
    })
}

fn corpus_diagrams(cat: &FinCategory, rng: &mut ChaCha8Rng) -> Vec<SetDiagram> {
    let mut out = Vec::new();
    if cat.num_arrows() <= 6 {
        for_each_diagram(cat, 2, |d| {
            out.push(d.clone());
            out.len() < 200
        });
    }
    for _ in 0..10 {
        out.extend(random_diagram(cat, 3, rng));
    }
    out
}

fn grothendieck() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut count = 0;
    for (name, cat) in corpus::standard() {
        let cat = Arc::new(cat);
        for d in corpus_diagrams(&cat, &mut rng) {
            let e = diagram_to_expansion(&cat, &d).map_err(|e| e.to_string())?;
            let back = expansion_to_diagram(&e);
            let same = cat.objects().all(|c| back.carrier_size(c) == d.carrier_size(c))
                && cat.arrows().all(|f| back.action(f) == d.action(f));
            ensure(same, || format!("{name}: diagram round trip differs"))?;
            let again = diagram_to_expansion(&cat, &back).map_err(|e| e.to_string())?;
            let iso = expansion_isomorphism(&e, &again).map_err(|e| e.to_string())?;
            ensure(iso.is_some(), || format!("{name}: expansion round trip not isomorphic"))?;
            count += 1;
        }
        for e in [identity_expansion(&cat), doubled_expansion(&cat)] {
            let back = diagram_to_expansion(&cat, &expansion_to_diagram(&e)).map_err(|e| e.to_string())?;
            let iso = expansion_isomorphism(&e, &back).map_err(|e| e.to_string())?;
            ensure(iso.is_some(), || format!("{name}: expansion round trip not isomorphic"))?;
            count += 1;
        }
    }
    Ok(format!("{count} round trips"))
}

fn m_solutions() -> Outcome {
    let l6 = corpus::linear_orders_category(6);
    let d = coloring_diagram(&l6, 0, 2).map_err(|e| e.to_string())?;
    let m: Vec<ArrId> = l6.hom(0, 1).to_vec();
    let sol = iterated_m_solution(&l6, &d, &m).map_err(|e| e.to_string())?;
    ensure(d.satisfies(&l6, &sol, &m), || "L6 point colorings: not an M-solution".into())?;
    ensure(solve_restricted(&l6, &d, &m).map_err(|e| e.to_string())?.is_some(), || {
        "restricted solver disagrees".into()
    })?;

    let bases: Vec<FinCategory> = corpus::standard()
        .into_iter()
        .map(|(_, c)| c)
        .chain([corpus::linear_orders_category(5)])
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut agreed, mut attempts) = (0, 0);
    while agreed < 50 && attempts < 5000 {
        attempts += 1;
        let cat = &bases[rng.gen_range(0..bases.len())];
        let Some(diag) = random_diagram(cat, 2, &mut rng) else { continue };
        let arrows: Vec<ArrId> = cat.arrows().filter(|&f| !cat.is_identity(f)).collect();
        if arrows.is_empty() {
            continue;
        }
        let k = rng.gen_range(1..=arrows.len().min(3));
        let mut m: Vec<ArrId> = (0..k).map(|_| arrows[rng.gen_range(0..arrows.len())]).collect();
        m.sort_unstable();
        m.dedup();
        let Ok(sol) = iterated_m_solution(cat, &diag, &m) else { continue };
        ensure(diag.satisfies(cat, &sol, &m), || "random instance: not an M-solution".into())?;
        let oracle = solve_restricted(cat, &diag, &m).map_err(|e| e.to_string())?;
        ensure(oracle.is_some(), || "random instance: restricted solver finds nothing".into())?;
        agreed += 1;
    }
    ensure(agreed == 50, || format!("only {agreed} instances met the preconditions"))?;
    Ok(format!("L6 point colorings and {agreed} random instances"))
}

fn orders_over_sets() -> Result<Expansion, String> {
    concrete_expansion(&linear_orders(3).labeled(), &bare_sets(3))
        .map(|(pi, _, _)| pi)
        .map_err(|e| e.to_string())
}

fn cores() -> Outcome {
    let chain = Arc::new(corpus::chain(3));
    let dbl = doubled_expansion(&chain);
    let core = compute_core(&dbl, EnumerationOrder::Forward).map_err(|e| e.to_string())?;
    ensure(core.expansion.fiber_sizes().iter().all(|&s| s == 1), || "doubled core fibers".into())?;

    let pi = orders_over_sets()?;
    let endos = enumerate_endomorphisms(&pi);
    ensure(endos.len() == 2, || format!("{} endomorphisms", endos.len()))?;
    let total = pi.total();
    let reversal = endos.iter().find(|a| a.objects.iter().enumerate().any(|(i, &j)| i != j)).ok_or("no reversal")?;
    for e in total.objects() {
        let name = total.object_name(e);
        let target = total.object_name(reversal.objects[e]);
        let size = pi.base().object_name(pi.project(e));
        ensure(size.starts_with('I'), || "base naming".into())?;
        // `o3[p]` lists its elements as p[0] < p[1] < p[2]; no suffix means 0 < 1 < 2
        let order = |n: &str| -> Vec<u32> {
            match n.split_once('[') {
                Some((_, p)) => p.trim_end_matches(']').chars().filter_map(|c| c.to_digit(10)).collect(),
                None => (0..n[1..].parse::<u32>().unwrap()).collect(),
            }
        };
        let mut rev = order(name);
        rev.reverse();
        ensure(order(target) == rev, || format!("{name} ↦ {target} is not reversal"))?;
    }
    let own = compute_core(&pi, EnumerationOrder::Forward).map_err(|e| e.to_string())?;
    ensure(own.objects.len() == total.num_objects(), || "L3→I3 is not its own core".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    let mut expansions = vec![dbl, pi];
    for (_, cat) in corpus::standard().into_iter().take(9) {
        let cat = Arc::new(cat);
        for _ in 0..3 {
            if let Some(d) = random_diagram(&cat, 2, &mut rng) {
                expansions.push(diagram_to_expansion(&cat, &d).map_err(|e| e.to_string())?);
            }
        }
    }
    for e in &expansions {
        let fwd = compute_core(e, EnumerationOrder::Forward).map_err(|e| e.to_string())?;
        let rev = compute_core(e, EnumerationOrder::Reverse).map_err(|e| e.to_string())?;
        let iso = expansion_isomorphism(&fwd.expansion, &rev.expansion).map_err(|e| e.to_string())?;
        ensure(iso.is_some(), || "cores differ between enumeration orders".into())?;
        let again = compute_core(&fwd.expansion, EnumerationOrder::Forward).map_err(|e| e.to_string())?;
        ensure(again.objects.len() == fwd.expansion.total().num_objects(), || "core not idempotent".into())?;
        checked += 1;
    }
    Ok(format!("doubled core has singleton fibers, L3→I3 endos {{id, reversal}}, {checked} cores stable"))
}

fn expansion_property() -> Outcome {
    let pi = orders_over_sets()?;
    ensure(has_expansion_property(&pi).holds(), || "L3→I3 lacks EP".into())?;
    let chain = Arc::new(corpus::chain(3));
    let dbl = doubled_expansion(&chain);
    ensure(!has_expansion_property(&dbl).holds(), || "doubled expansion has EP".into())?;

    // doubling an expansion: two copies of its total category over the same base
    let doubled_over = |e: &Expansion| -> Result<Expansion, String> {
        let two = doubled_expansion(e.total());
        as_expansion(two.functor().then(e.functor()).map_err(|x| x.to_string())?).map_err(|x| x.to_string())
    };
    let mut targets = vec![pi.clone()];
    for (_, cat) in corpus::standard() {
        let id = identity_expansion(&Arc::new(cat));
        if has_expansion_property(&id).holds() {
            targets.push(id);
        }
    }
    let mut homs = 0;
    for rho in &targets {
        for src in [rho.clone(), doubled_over(rho)?] {
            for a in enumerate_expansion_homs(&src, rho, Some(64)).map_err(|e| e.to_string())? {
                ensure(a.is_surjective_on_objects(), || "non-surjective hom into an EP expansion".into())?;
                homs += 1;
            }
        }
    }
    Ok(format!("{homs} homs into {} EP expansions, all surjective", targets.len()))
}

fn superposition_lemma() -> Outcome {
    timed(Duration::from_secs(1), || {
        let orders = linear_orders(3);
        let two = orders.members()[1].clone();
        let sp = superposition_structure(&orders, &two, &[0, 0, 1]).map_err(|e| e.to_string())?;
        for s in [[0, 2], [1, 2]] {
            ensure(two.is_embedding(&sp.structure, &s), || format!("section {s:?} is not an embedding"))?;
        }
        ensure(sp.right_inverses == 2, || "right inverses".into())?;
        let m = matchings(3);
        let edge = m.members()[2].clone();
        let r = superposition_structure(&m, &edge, &[0, 0, 1]);
        ensure(matches!(r, Err(StructureError::NoAmalgam { .. })), || format!("matchings gave {r:?}"))?;
        Ok("orders superposed, matchings raise NoAmalgam".into())
    })
}

fn formulas() -> Outcome {
    let og = ordered_graphs(2);
    let edge = Signature::new([("E", 2)]).map_err(|e| e.to_string())?;
    let phis = reduct_formulas(&og, &edge).map_err(|e| e.to_string())?;
    let phi = &phis[0].1;
    let mut checked = 0;
    for e in og.labeled().members() {
        let n = e.size();
        for x in 0..n {
            for y in 0..n {
                let holds = phi.eval(e, &[x, y]).map_err(|e| e.to_string())?;
                ensure(holds == e.holds(1, &[x, y]), || format!("φ_E wrong on {e} at ({x},{y})"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("φ_E matches on {checked} (structure, pair) cases"))
}

fn confluent_ramsey(cat: &FinCategory) -> bool {
    cat.is_confluent() && is_ramsey(cat, 2).map(|r| r.is_ramsey()).unwrap_or(false)
}

fn transfers() -> Outcome {
    let members = corpus::standard();
    for (_, a) in &members {
        for (_, b) in &members {
            if a.num_arrows() * b.num_arrows() > 400 {
                continue;
            }
            let p = product(a, b);
            ensure(
                p.num_arrows() == a.num_arrows() * b.num_arrows() && p.num_objects() == a.num_objects() * b.num_objects(),
                || "product counts".into(),
            )?;
        }
    }
    for (name, c) in &members {
        let c = Arc::new(c.clone());
        for a in c.objects() {
            let (s, _) = slice(&c, a).map_err(|e| e.to_string())?;
            ensure(s.num_objects() == c.out_arrows(a).len(), || format!("{name}: slice objects"))?;
            let elts = grothendieck_elts(&CatValuedFunctor::representable(c.clone(), a)).map_err(|e| e.to_string())?;
            let arrows: usize = c.arrows().map(|f| c.hom(a, c.src(f)).len()).sum();
            ensure(elts.category.num_arrows() == arrows, || format!("{name}: Elts arrows"))?;
        }
    }
    for (l, r) in [
        (linear_orders(2), linear_orders(1).with_empty()),
        (linear_orders(2), linear_orders(2).with_empty()),
        (bare_sets(2), bare_sets(2).with_empty()),
        (bare_sets(1), bare_sets(1).with_empty()),
    ] {
        let direct = blowup(&l, &r);
        let elts = blowup_as_elts(&l, &r).map_err(|e| e.to_string())?;
        ensure(find_isomorphism(&direct.category, &elts.category).is_some(), || "blowup ≇ Elts".into())?;
    }
    let small: Vec<(&str, Arc<FinCategory>)> = members
        .iter()
        .filter(|(_, c)| c.num_arrows() <= 6 && confluent_ramsey(c))
        .map(|(n, c)| (*n, Arc::new(c.clone())))
        .collect();
    let mut combos = 0;
    for (bn, base) in &small {
        for (fname, fiber) in &small {
            let elts = grothendieck_elts(&CatValuedFunctor::constant(base.clone(), fiber.clone())).map_err(|e| e.to_string())?;
            ensure(confluent_ramsey(&elts.category), || format!("Elts over {bn} with fiber {fname}"))?;
            combos += 1;
        }
        for a in base.objects() {
            let (s, _) = slice(base, a).map_err(|e| e.to_string())?;
            ensure(confluent_ramsey(&s), || format!("slice of {bn}"))?;
            combos += 1;
        }
    }
    Ok(format!("counts match; blowups agree; {combos} transfers confluent and Ramsey"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("ramsey number R(3,3) in L6/L5", ramsey_numbers),
        ("pigeonhole in L3", pigeonhole),
        ("solvability iff confluent and Ramsey", theorem_harness),
        ("diagram/expansion correspondence", grothendieck),
        ("iterated-witness M-solutions", m_solutions),
        ("cores", cores),
        ("expansion property and surjectivity", expansion_property),
        ("superposition structures", superposition_lemma),
        ("reduct formulas", formulas),
        ("transfer constructions", transfers),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
