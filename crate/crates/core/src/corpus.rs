//! Small named categories used throughout the test-suite and by the CLI.

use crate::fincat::{ArrId, Arrow, CategoryBuilder, FinCategory, ObjId};
use std::collections::HashMap;

/// The one-object, one-arrow category.
pub fn point() -> FinCategory {
    discrete(&["*"])
}

/// Objects with identities only.
pub fn discrete(names: &[&str]) -> FinCategory {
    let objects: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    let arrows = objects
        .iter()
        .enumerate()
        .map(|(i, o)| Arrow {
            name: format!("id_{o}"),
            src: i,
            tgt: i,
        })
        .collect();
    let ids = (0..objects.len()).collect();
    CategoryBuilder::from_parts(objects, arrows, ids, |g, f| {
        (g == f).then_some(f)
    })
    .expect("discrete category")
}

/// A finite poset as a thin category. `leq(i, j)` must be reflexive and
/// transitive; arrow `i → j` is named by `name(i, j)` (identities `id_<obj>`).
pub fn poset(
    names: &[String],
    leq: impl Fn(usize, usize) -> bool,
    name: impl Fn(usize, usize) -> String,
) -> FinCategory {
    let n = names.len();
    let mut arrows = Vec::new();
    let mut index: HashMap<(usize, usize), ArrId> = HashMap::new();
    let mut ids = vec![0; n];
    for i in 0..n {
        for j in 0..n {
            if leq(i, j) {
                index.insert((i, j), arrows.len());
                if i == j {
                    ids[i] = arrows.len();
                }
                arrows.push(Arrow {
                    name: if i == j {
                        format!("id_{}", names[i])
                    } else {
                        name(i, j)
                    },
                    src: i,
                    tgt: j,
                });
            }
        }
    }
    let ends: Vec<(usize, usize)> = arrows.iter().map(|a| (a.src, a.tgt)).collect();
    CategoryBuilder::from_parts(names.to_vec(), arrows, ids, |g, f| {
        index.get(&(ends[f].0, ends[g].1)).copied()
    })
    .expect("poset category")
}

/// The chain `1 → 2 → … → n`. Covering arrows are named `f, g, h, …` and
/// composites by juxtaposition, so `chain(3)` has `f, g, gf`.
pub fn chain(n: usize) -> FinCategory {
    let letters: Vec<char> = "fghijklmnpqrstuvwxyz".chars().collect();
    assert!(n <= letters.len() + 1, "chain too long");
    let names: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    poset(&names, |i, j| i <= j, |i, j| (i..j).rev().map(|k| letters[k]).collect())
}

/// The span `A ← D → B` with arrows `inclA: D → A`, `inclB: D → B`.
pub fn span() -> FinCategory {
    let names = vec!["A".to_string(), "B".to_string(), "D".to_string()];
    poset(
        &names,
        |i, j| i == j || (i == 2 && j != 2),
        |_, j| if j == 0 { "inclA".into() } else { "inclB".into() },
    )
}

/// The cospan `A → C ← B`.
pub fn cospan() -> FinCategory {
    let names = vec!["A".to_string(), "B".to_string(), "C".to_string()];
    poset(
        &names,
        |i, j| i == j || j == 2,
        |i, _| if i == 0 { "a".into() } else { "b".into() },
    )
}

/// The commutative square `chain(2) × chain(2)` as a poset on `00, 01, 10, 11`.
pub fn square() -> FinCategory {
    let names: Vec<String> = ["00", "01", "10", "11"].iter().map(|s| s.to_string()).collect();
    poset(
        &names,
        |i, j| (i & !j) == 0,
        |i, j| format!("{}<{}", names[i], names[j]),
    )
}

/// Two parallel arrows `p0, p1: a ⇉ b`.
pub fn parallel_pair() -> FinCategory {
    let objects = vec!["a".to_string(), "b".to_string()];
    let arrows = vec![
        Arrow { name: "id_a".into(), src: 0, tgt: 0 },
        Arrow { name: "id_b".into(), src: 1, tgt: 1 },
        Arrow { name: "p0".into(), src: 0, tgt: 1 },
        Arrow { name: "p1".into(), src: 0, tgt: 1 },
    ];
    CategoryBuilder::from_parts(objects, arrows, vec![0, 1], |g, f| {
        if g < 2 {
            Some(f)
        } else if f < 2 {
            Some(g)
        } else {
            None
        }
    })
    .expect("parallel pair")
}

/// A one-object category from a monoid table over `elements`, where
/// element 0 is the unit and `mul(g, f)` is the product `g·f`.
pub fn monoid(elements: &[&str], mul: impl Fn(usize, usize) -> usize) -> FinCategory {
    let arrows = elements
        .iter()
        .map(|e| Arrow {
            name: e.to_string(),
            src: 0,
            tgt: 0,
        })
        .collect();
    CategoryBuilder::from_parts(vec!["*".into()], arrows, vec![0], |g, f| Some(mul(g, f)))
        .expect("monoid table")
}

/// The monoid `{e, z}` with `z` absorbing.
pub fn absorbing_monoid() -> FinCategory {
    monoid(&["e", "z"], |g, f| if g == 0 { f } else if f == 0 { g } else { 1 })
}

/// The cyclic group `Z_n` as a one-object category.
pub fn cyclic_monoid(n: usize) -> FinCategory {
    let names: Vec<String> = (0..n).map(|i| if i == 0 { "e".into() } else { format!("r{i}") }).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    monoid(&refs, |g, f| (g + f) % n)
}

/// Disjoint union; labels of the second summand get `suffix` appended when
/// they clash with the first.
pub fn coproduct(a: &FinCategory, b: &FinCategory, suffix: &str) -> FinCategory {
    let na = a.num_objects();
    let ma = a.num_arrows();
    let clash_o: std::collections::HashSet<&str> = a.object_names().iter().map(|s| s.as_str()).collect();
    let clash_a: std::collections::HashSet<&str> = a.arrows().map(|f| a.arrow_name(f)).collect();
    let rename = |s: &str, clash: &std::collections::HashSet<&str>| {
        if clash.contains(s) {
            format!("{s}{suffix}")
        } else {
            s.to_string()
        }
    };
    let mut objects: Vec<String> = a.object_names().to_vec();
    objects.extend(b.object_names().iter().map(|s| rename(s, &clash_o)));
    let mut arrows: Vec<Arrow> = a.arrows().map(|f| a.arrow(f).clone()).collect();
    arrows.extend(b.arrows().map(|f| {
        let ar = b.arrow(f);
        Arrow {
            name: rename(&ar.name, &clash_a),
            src: ar.src + na,
            tgt: ar.tgt + na,
        }
    }));
    let mut ids: Vec<ArrId> = a.objects().map(|x| a.identity(x)).collect();
    ids.extend(b.objects().map(|x| b.identity(x) + ma));
    CategoryBuilder::from_parts(objects, arrows, ids, |g, f| match (g < ma, f < ma) {
        (true, true) => a.compose(g, f),
        (false, false) => b.compose(g - ma, f - ma).map(|c| c + ma),
        _ => None,
    })
    .expect("coproduct")
}

/// Name of an order-preserving injection `[m] → [n]` in
/// [`linear_orders_category`]: `o<m>-><o<n>>:<images>`.
pub fn injection_name(src: &str, tgt: &str, map: &[usize]) -> String {
    let images: Vec<String> = map.iter().map(|i| i.to_string()).collect();
    format!("{src}->{tgt}:{}", images.join(","))
}

/// The truncated category `L≤n` of linear orders `[1], …, [n]` (objects
/// `o1 … on`) with order-preserving injections, built directly from
/// increasing sequences.
pub fn linear_orders_category(n: usize) -> FinCategory {
    let objects: Vec<String> = (1..=n).map(|i| format!("o{i}")).collect();
    let mut arrows = Vec::new();
    let mut maps: Vec<Vec<usize>> = Vec::new();
    let mut index: HashMap<(ObjId, Vec<usize>), ArrId> = HashMap::new();
    let mut ids = vec![0; n];
    for m in 1..=n {
        for k in m..=n {
            for seq in increasing_sequences(m, k) {
                let id = arrows.len();
                if m == k {
                    ids[m - 1] = id;
                }
                index.insert((k - 1, seq.clone()), id);
                arrows.push(Arrow {
                    name: injection_name(&objects[m - 1], &objects[k - 1], &seq),
                    src: m - 1,
                    tgt: k - 1,
                });
                maps.push(seq);
            }
        }
    }
    let tgts: Vec<ObjId> = arrows.iter().map(|a| a.tgt).collect();
    CategoryBuilder::from_parts(objects, arrows, ids, |g, f| {
        let composed: Vec<usize> = maps[f].iter().map(|&i| maps[g][i]).collect();
        index.get(&(tgts[g], composed)).copied()
    })
    .expect("linear orders")
}

/// Strictly increasing sequences of length `m` in `0..k`, lexicographic.
pub fn increasing_sequences(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(m: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            go(m, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(m, k, 0, &mut Vec::new(), &mut out);
    out
}

/// The named members of the standard corpus.
pub fn standard() -> Vec<(&'static str, FinCategory)> {
    vec![
        ("point", point()),
        ("discrete2", discrete(&["a", "b"])),
        ("chain2", chain(2)),
        ("chain3", chain(3)),
        ("span", span()),
        ("cospan", cospan()),
        ("parallel_pair", parallel_pair()),
        ("square", square()),
        ("absorbing_monoid", absorbing_monoid()),
        ("z2", cyclic_monoid(2)),
        ("chain2+point", coproduct(&chain(2), &point(), "'")),
        ("chain2+absorbing", coproduct(&chain(2), &absorbing_monoid(), "'")),
        ("span+chain2", coproduct(&span(), &chain(2), "'")),
        ("L4", linear_orders_category(4)),
    ]
}
