use std::collections::{HashMap, HashSet};

use super::{ArrId, Arrow, CategoryError, FinCategory, ObjId};

/// Unvalidated arrow record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawArrow {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

/// Unvalidated category description, as read from a file.
///
/// `compose` entries are `(g, f, g∘f)`. Identity arrows may be left out of
/// `arrows` and `identities`; they are synthesized as `id_<object>`, and so
/// are composites with identities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawCategory {
    pub objects: Vec<String>,
    pub arrows: Vec<RawArrow>,
    pub identities: Vec<(String, String)>,
    pub compose: Vec<(String, String, String)>,
}

pub(super) fn from_raw(raw: &RawCategory) -> Result<FinCategory, CategoryError> {
    let mut obj_index = HashMap::new();
    for (i, o) in raw.objects.iter().enumerate() {
        if obj_index.insert(o.clone(), i).is_some() {
            return Err(CategoryError::Duplicate {
                kind: "object",
                id: o.clone(),
            });
        }
    }
    let lookup_obj = |id: &str, context: &str| -> Result<ObjId, CategoryError> {
        obj_index
            .get(id)
            .copied()
            .ok_or_else(|| CategoryError::UnknownReference {
                kind: "object",
                id: id.to_string(),
                context: context.to_string(),
            })
    };

    let mut arrows: Vec<Arrow> = Vec::with_capacity(raw.arrows.len() + raw.objects.len());
    let mut arr_index: HashMap<String, ArrId> = HashMap::new();
    for a in &raw.arrows {
        let ctx = format!("arrow `{}`", a.id);
        let src = lookup_obj(&a.src, &ctx)?;
        let tgt = lookup_obj(&a.tgt, &ctx)?;
        if arr_index.insert(a.id.clone(), arrows.len()).is_some() {
            return Err(CategoryError::Duplicate {
                kind: "arrow",
                id: a.id.clone(),
            });
        }
        arrows.push(Arrow {
            name: a.id.clone(),
            src,
            tgt,
        });
    }

    let mut declared_ids: HashMap<ObjId, String> = HashMap::new();
    for (o, a) in &raw.identities {
        let obj = lookup_obj(o, "identities")?;
        declared_ids.insert(obj, a.clone());
    }

    let mut identities = Vec::with_capacity(raw.objects.len());
    let mut synthesized: HashSet<ArrId> = HashSet::new();
    for (obj, name) in raw.objects.iter().enumerate() {
        let id_name = declared_ids
            .get(&obj)
            .cloned()
            .unwrap_or_else(|| format!("id_{name}"));
        let id = match arr_index.get(&id_name) {
            Some(&f) => {
                if arrows[f].src != obj || arrows[f].tgt != obj {
                    return Err(CategoryError::MissingIdentity {
                        object: name.clone(),
                        reason: format!("`{id_name}` is not an endo-arrow of `{name}`"),
                    });
                }
                f
            }
            None => {
                let f = arrows.len();
                arr_index.insert(id_name.clone(), f);
                arrows.push(Arrow {
                    name: id_name,
                    src: obj,
                    tgt: obj,
                });
                synthesized.insert(f);
                f
            }
        };
        if identities.contains(&id) {
            return Err(CategoryError::MissingIdentity {
                object: name.clone(),
                reason: format!("`{}` is already the identity of another object", arrows[id].name),
            });
        }
        identities.push(id);
    }

    let lookup_arr = |id: &str, context: &str| -> Result<ArrId, CategoryError> {
        arr_index
            .get(id)
            .copied()
            .ok_or_else(|| CategoryError::UnknownReference {
                kind: "arrow",
                id: id.to_string(),
                context: context.to_string(),
            })
    };
    let mut table: HashMap<(ArrId, ArrId), ArrId> = HashMap::new();
    for (g, f, r) in &raw.compose {
        let ctx = format!("composition entry [{g}, {f}, {r}]");
        let gi = lookup_arr(g, &ctx)?;
        let fi = lookup_arr(f, &ctx)?;
        let ri = lookup_arr(r, &ctx)?;
        let (af, ag, ar) = (&arrows[fi], &arrows[gi], &arrows[ri]);
        if af.tgt != ag.src || ar.src != af.src || ar.tgt != ag.tgt {
            return Err(CategoryError::IllTypedComposite {
                g: g.clone(),
                f: f.clone(),
                result: r.clone(),
            });
        }
        if let Some(prev) = table.insert((gi, fi), ri) {
            if prev != ri {
                return Err(CategoryError::ConflictingComposite {
                    g: g.clone(),
                    f: f.clone(),
                });
            }
        }
    }

    let is_id: HashSet<ArrId> = identities.iter().copied().collect();
    CategoryBuilder::from_parts(raw.objects.clone(), arrows, identities, |g, f| {
        table.get(&(g, f)).copied().or_else(|| {
            if is_id.contains(&g) {
                Some(f)
            } else if is_id.contains(&f) {
                Some(g)
            } else {
                None
            }
        })
    })
}

/// Assembles a [`FinCategory`] from indexed parts and a composition
/// function, checking every axiom.
pub struct CategoryBuilder;

impl CategoryBuilder {
    /// `compose(g, f)` is queried once for every composable pair and must
    /// return `g∘f`.
    pub fn from_parts(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        identities: Vec<ArrId>,
        mut compose: impl FnMut(ArrId, ArrId) -> Option<ArrId>,
    ) -> Result<FinCategory, CategoryError> {
        let n = objects.len();
        let mut obj_index = HashMap::with_capacity(n);
        for (i, o) in objects.iter().enumerate() {
            if obj_index.insert(o.clone(), i).is_some() {
                return Err(CategoryError::Duplicate {
                    kind: "object",
                    id: o.clone(),
                });
            }
        }
        let mut arr_index = HashMap::with_capacity(arrows.len());
        for (i, a) in arrows.iter().enumerate() {
            if a.src >= n || a.tgt >= n {
                return Err(CategoryError::UnknownReference {
                    kind: "object",
                    id: format!("#{}", a.src.max(a.tgt)),
                    context: format!("arrow `{}`", a.name),
                });
            }
            if arr_index.insert(a.name.clone(), i).is_some() {
                return Err(CategoryError::Duplicate {
                    kind: "arrow",
                    id: a.name.clone(),
                });
            }
        }
        if identities.len() != n {
            return Err(CategoryError::Invalid(format!(
                "{} identities for {} objects",
                identities.len(),
                n
            )));
        }
        for (o, &id) in identities.iter().enumerate() {
            let ok = id < arrows.len() && arrows[id].src == o && arrows[id].tgt == o;
            if !ok {
                return Err(CategoryError::MissingIdentity {
                    object: objects[o].clone(),
                    reason: "identity is not an endo-arrow of the object".into(),
                });
            }
        }

        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        let mut homs = vec![Vec::new(); n * n];
        let mut out_pos = vec![0; arrows.len()];
        for (i, a) in arrows.iter().enumerate() {
            out_pos[i] = out[a.src].len();
            out[a.src].push(i);
            inc[a.tgt].push(i);
            homs[a.src * n + a.tgt].push(i);
        }

        let mut table = Vec::with_capacity(arrows.len());
        for (f, af) in arrows.iter().enumerate() {
            let mut row = Vec::with_capacity(out[af.tgt].len());
            for &g in &out[af.tgt] {
                let ag = &arrows[g];
                let c = compose(g, f).ok_or_else(|| CategoryError::CompositionNotClosed {
                    f: af.name.clone(),
                    g: ag.name.clone(),
                })?;
                if c >= arrows.len() || arrows[c].src != af.src || arrows[c].tgt != ag.tgt {
                    return Err(CategoryError::IllTypedComposite {
                        g: ag.name.clone(),
                        f: af.name.clone(),
                        result: arrows.get(c).map(|a| a.name.clone()).unwrap_or_default(),
                    });
                }
                row.push(c);
            }
            table.push(row);
        }

        let cat = FinCategory {
            objects,
            arrows,
            identities,
            table,
            out_pos,
            homs,
            out,
            inc,
            obj_index,
            arr_index,
        };
        check_laws(&cat)?;
        Ok(cat)
    }
}

fn check_laws(cat: &FinCategory) -> Result<(), CategoryError> {
    for f in cat.arrows() {
        let id_src = cat.identity(cat.src(f));
        let id_tgt = cat.identity(cat.tgt(f));
        if cat.compose(f, id_src) != Some(f) {
            return Err(CategoryError::UnitLawViolated {
                identity: cat.arrow_name(id_src).to_string(),
                arrow: cat.arrow_name(f).to_string(),
            });
        }
        if cat.compose(id_tgt, f) != Some(f) {
            return Err(CategoryError::UnitLawViolated {
                identity: cat.arrow_name(id_tgt).to_string(),
                arrow: cat.arrow_name(f).to_string(),
            });
        }
    }
    for f in cat.arrows() {
        for &g in cat.out_arrows(cat.tgt(f)) {
            let gf = cat.compose(g, f).expect("table is total");
            for &h in cat.out_arrows(cat.tgt(g)) {
                let hg = cat.compose(h, g).expect("table is total");
                if cat.compose(h, gf) != cat.compose(hg, f) {
                    return Err(CategoryError::AssociativityViolated {
                        f: cat.arrow_name(f).to_string(),
                        g: cat.arrow_name(g).to_string(),
                        h: cat.arrow_name(h).to_string(),
                    });
                }
            }
        }
    }
    Ok(())
}
