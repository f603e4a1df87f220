//! Workspace files: JSON documents tagged with a format version and a kind.
//!
//! Nested categories (the category of a diagram, source and target of a
//! functor, base and fibers of a Cat-valued functor) are either a path,
//! resolved against the directory of the referencing file, or an inline
//! object whose tags are optional.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use konig::expansion::FunctorData;
use konig::fincat::{CategoryError, FinCategory, RawArrow, RawCategory};
use konig::relstruct::{RelStructure, Signature, StructureError, TruncatedClass};
use konig::setdiag::{DiagramError, RawDiagram, SetDiagram};
use konig::transfer::CatValuedFunctor;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const FORMAT_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Category,
    Diagram,
    Functor,
    CatValued,
    StructClass,
}

impl Kind {
    pub fn tag(self) -> &'static str {
        match self {
            Kind::Category => "category",
            Kind::Diagram => "diagram",
            Kind::Functor => "functor",
            Kind::CatValued => "catvalued",
            Kind::StructClass => "structclass",
        }
    }

    fn parse(s: &str) -> Option<Kind> {
        [Kind::Category, Kind::Diagram, Kind::Functor, Kind::CatValued, Kind::StructClass]
            .into_iter()
            .find(|k| k.tag() == s)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrowEntry {
    id: String,
    src: String,
    tgt: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CategoryFile {
    objects: Vec<String>,
    #[serde(default)]
    arrows: Vec<ArrowEntry>,
    #[serde(default)]
    identities: BTreeMap<String, String>,
    #[serde(default)]
    compose: Vec<(String, String, String)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramFile {
    category: Value,
    sets: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    maps: BTreeMap<String, BTreeMap<String, String>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctorFile {
    source: Value,
    target: Value,
    objects: BTreeMap<String, String>,
    #[serde(default)]
    arrows: BTreeMap<String, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Transition {
    objects: BTreeMap<String, String>,
    #[serde(default)]
    arrows: BTreeMap<String, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CatValuedFile {
    base: Value,
    fibers: BTreeMap<String, Value>,
    #[serde(default)]
    transitions: BTreeMap<String, Transition>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StructureEntry {
    name: Option<String>,
    domain: Vec<Value>,
    #[serde(default)]
    relations: BTreeMap<String, Vec<Vec<Value>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StructClassFile {
    signature: BTreeMap<String, usize>,
    structures: Vec<StructureEntry>,
    max_size: Option<usize>,
}

/// A loaded file of any kind, as accepted by `validate`.
pub enum Loaded {
    Category(Arc<FinCategory>),
    Diagram(Arc<FinCategory>, SetDiagram),
    Functor(FunctorData),
    CatValued(CatValuedFunctor),
    StructClass(TruncatedClass),
}

/// Reads files and hashes every byte read, in read order.
#[derive(Default)]
pub struct Loader {
    hasher: Sha256,
}

fn escape(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

fn category_pointer(e: &CategoryError) -> String {
    match e {
        CategoryError::Duplicate { kind: "object", .. } => "/objects".into(),
        CategoryError::Duplicate { .. } => "/arrows".into(),
        CategoryError::UnknownReference { context, .. } if context.starts_with("arrow") => "/arrows".into(),
        CategoryError::UnknownReference { context, .. } if context.contains("identit") => "/identities".into(),
        CategoryError::MissingIdentity { .. } => "/identities".into(),
        CategoryError::UnknownObject(_) => "/objects".into(),
        _ => "/compose".into(),
    }
}

fn diagram_pointer(e: &DiagramError) -> String {
    match e {
        DiagramError::MissingCarrier(o) => format!("/sets/{}", escape(o)),
        DiagramError::DuplicateElement { object, .. } => format!("/sets/{}", escape(object)),
        DiagramError::MissingAction(a) | DiagramError::IdentityViolated(a) => format!("/maps/{}", escape(a)),
        DiagramError::NotAFunction { arrow, .. } => format!("/maps/{}", escape(arrow)),
        DiagramError::Category(_) => "/category".into(),
        _ => "/maps".into(),
    }
}

fn label(v: &Value, path: &str, pointer: &str) -> Result<String, CliError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(CliError::invalid(path, pointer, "domain elements are strings or numbers")),
    }
}

impl Loader {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn input_hash(&self) -> String {
        hex::encode(self.hasher.clone().finalize())
    }

    fn read(&mut self, path: &Path) -> Result<Value, CliError> {
        let shown = path.display().to_string();
        let bytes = std::fs::read(path).map_err(|source| CliError::Io {
            path: shown.clone(),
            source,
        })?;
        self.hasher.update((bytes.len() as u64).to_le_bytes());
        self.hasher.update(&bytes);
        serde_json::from_slice(&bytes).map_err(|source| CliError::Json { path: shown, source })
    }

    /// Strips and checks the `version`/`kind` tags. Tags are mandatory at
    /// the top level of a file and optional on inline objects.
    fn untag(value: Value, path: &str, pointer: &str, expected: Option<Kind>, required: bool) -> Result<(Kind, Value), CliError> {
        let Value::Object(mut obj) = value else {
            return Err(CliError::invalid(path, pointer, "expected a JSON object"));
        };
        match obj.remove("version") {
            Some(v) if v.as_u64() == Some(FORMAT_VERSION) => {}
            Some(v) => {
                return Err(CliError::invalid(path, &format!("{pointer}/version"), format!("unsupported format version {v}")))
            }
            None if required => return Err(CliError::invalid(path, pointer, "missing `version` tag")),
            None => {}
        }
        let kind = match obj.remove("kind") {
            Some(Value::String(s)) => Kind::parse(&s)
                .ok_or_else(|| CliError::invalid(path, &format!("{pointer}/kind"), format!("unknown kind `{s}`")))?,
            Some(_) => return Err(CliError::invalid(path, &format!("{pointer}/kind"), "`kind` must be a string")),
            None if required || expected.is_none() => return Err(CliError::invalid(path, pointer, "missing `kind` tag")),
            None => expected.unwrap(),
        };
        if let Some(e) = expected {
            if e != kind {
                return Err(CliError::invalid(
                    path,
                    &format!("{pointer}/kind"),
                    format!("expected a {} file, found `{}`", e.tag(), kind.tag()),
                ));
            }
        }
        Ok((kind, Value::Object(obj)))
    }

    fn decode<T: for<'de> Deserialize<'de>>(value: Value, path: &str, pointer: &str) -> Result<T, CliError> {
        serde_json::from_value(value).map_err(|e| CliError::invalid(path, pointer, e))
    }

    /// A path or inline category referenced from `path` at `pointer`.
    fn category_ref(&mut self, value: Value, path: &Path, pointer: &str) -> Result<Arc<FinCategory>, CliError> {
        match value {
            Value::String(rel) => {
                let target = path.parent().map(|d| d.join(&rel)).unwrap_or_else(|| PathBuf::from(&rel));
                self.category(&target)
            }
            inline => {
                let shown = path.display().to_string();
                let (_, payload) = Self::untag(inline, &shown, pointer, Some(Kind::Category), false)?;
                Self::category_payload(payload, &shown, pointer)
            }
        }
    }

    fn category_payload(payload: Value, path: &str, pointer: &str) -> Result<Arc<FinCategory>, CliError> {
        let file: CategoryFile = Self::decode(payload, path, pointer)?;
        let raw = RawCategory {
            objects: file.objects,
            arrows: file
                .arrows
                .into_iter()
                .map(|a| RawArrow {
                    id: a.id,
                    src: a.src,
                    tgt: a.tgt,
                })
                .collect(),
            identities: file.identities.into_iter().collect(),
            compose: file.compose,
        };
        FinCategory::from_raw(&raw)
            .map(Arc::new)
            .map_err(|e| CliError::invalid(path, &format!("{pointer}{}", category_pointer(&e)), e))
    }

    pub fn category(&mut self, path: &Path) -> Result<Arc<FinCategory>, CliError> {
        let shown = path.display().to_string();
        let (_, payload) = Self::untag(self.read(path)?, &shown, "", Some(Kind::Category), true)?;
        Self::category_payload(payload, &shown, "")
    }

    fn diagram_payload(&mut self, payload: Value, path: &Path) -> Result<(Arc<FinCategory>, SetDiagram), CliError> {
        let shown = path.display().to_string();
        let file: DiagramFile = Self::decode(payload, &shown, "")?;
        let cat = self.category_ref(file.category, path, "/category")?;
        let raw = RawDiagram {
            sets: file.sets.into_iter().collect(),
            maps: file.maps.into_iter().map(|(a, m)| (a, m.into_iter().collect())).collect(),
        };
        let diag = SetDiagram::from_raw(&cat, &raw).map_err(|e| CliError::invalid(&shown, &diagram_pointer(&e), e))?;
        Ok((cat, diag))
    }

    pub fn diagram(&mut self, path: &Path) -> Result<(Arc<FinCategory>, SetDiagram), CliError> {
        let shown = path.display().to_string();
        let (_, payload) = Self::untag(self.read(path)?, &shown, "", Some(Kind::Diagram), true)?;
        self.diagram_payload(payload, path)
    }

    fn functor_payload(&mut self, payload: Value, path: &Path) -> Result<FunctorData, CliError> {
        let shown = path.display().to_string();
        let file: FunctorFile = Self::decode(payload, &shown, "")?;
        let source = self.category_ref(file.source, path, "/source")?;
        let target = self.category_ref(file.target, path, "/target")?;
        let objects: Vec<_> = file.objects.into_iter().collect();
        let arrows: Vec<_> = file.arrows.into_iter().collect();
        FunctorData::from_names(source, target, &objects, &arrows).map_err(|e| CliError::invalid(&shown, "", e))
    }

    pub fn functor(&mut self, path: &Path) -> Result<FunctorData, CliError> {
        let shown = path.display().to_string();
        let (_, payload) = Self::untag(self.read(path)?, &shown, "", Some(Kind::Functor), true)?;
        self.functor_payload(payload, path)
    }

    fn catvalued_payload(&mut self, payload: Value, path: &Path) -> Result<CatValuedFunctor, CliError> {
        let shown = path.display().to_string();
        let mut file: CatValuedFile = Self::decode(payload, &shown, "")?;
        let base = self.category_ref(file.base, path, "/base")?;
        let mut fibers = Vec::with_capacity(base.num_objects());
        for r in base.objects() {
            let name = base.object_name(r);
            let pointer = format!("/fibers/{}", escape(name));
            let v = file
                .fibers
                .remove(name)
                .ok_or_else(|| CliError::invalid(&shown, "/fibers", format!("no fiber for `{name}`")))?;
            fibers.push(self.category_ref(v, path, &pointer)?);
        }
        if let Some(extra) = file.fibers.keys().next() {
            return Err(CliError::invalid(&shown, "/fibers", format!("unknown object `{extra}`")));
        }
        let mut transitions = Vec::with_capacity(base.num_arrows());
        for f in base.arrows() {
            let name = base.arrow_name(f);
            let (s, t) = (fibers[base.src(f)].clone(), fibers[base.tgt(f)].clone());
            let pointer = format!("/transitions/{}", escape(name));
            let functor = match file.transitions.remove(name) {
                Some(tr) => {
                    let objects: Vec<_> = tr.objects.into_iter().collect();
                    let arrows: Vec<_> = tr.arrows.into_iter().collect();
                    FunctorData::from_names(s, t, &objects, &arrows)
                        .map_err(|e| CliError::invalid(&shown, &pointer, e))?
                }
                None if base.is_identity(f) => FunctorData::identity(s),
                None => return Err(CliError::invalid(&shown, "/transitions", format!("no transition for `{name}`"))),
            };
            transitions.push(functor);
        }
        if let Some(extra) = file.transitions.keys().next() {
            return Err(CliError::invalid(&shown, "/transitions", format!("unknown arrow `{extra}`")));
        }
        CatValuedFunctor::new(base, fibers, transitions).map_err(|e| CliError::invalid(&shown, "/transitions", e))
    }

    pub fn catvalued(&mut self, path: &Path) -> Result<CatValuedFunctor, CliError> {
        let shown = path.display().to_string();
        let (_, payload) = Self::untag(self.read(path)?, &shown, "", Some(Kind::CatValued), true)?;
        self.catvalued_payload(payload, path)
    }

    fn class_payload(payload: Value, path: &str) -> Result<TruncatedClass, CliError> {
        let file: StructClassFile = Self::decode(payload, path, "")?;
        let sig = Signature::new(file.signature).map_err(|e| CliError::invalid(path, "/signature", e))?;
        let mut members = Vec::new();
        for (i, entry) in file.structures.into_iter().enumerate() {
            let pointer = format!("/structures/{i}");
            let domain = entry
                .domain
                .iter()
                .map(|v| label(v, path, &format!("{pointer}/domain")))
                .collect::<Result<Vec<_>, _>>()?;
            let mut rels = vec![BTreeSet::new(); sig.len()];
            for (symbol, tuples) in entry.relations {
                let rp = format!("{pointer}/relations/{}", escape(&symbol));
                let r = sig
                    .index_of(&symbol)
                    .ok_or_else(|| CliError::invalid(path, &rp, StructureError::UnknownSymbol(symbol.clone())))?;
                for t in tuples {
                    let mut tuple = Vec::with_capacity(t.len());
                    for v in &t {
                        let l = label(v, path, &rp)?;
                        let x = domain
                            .iter()
                            .position(|d| *d == l)
                            .ok_or_else(|| CliError::invalid(path, &rp, format!("`{l}` is not in the domain")))?;
                        tuple.push(x);
                    }
                    rels[r].insert(tuple);
                }
            }
            let s = RelStructure::new(sig.clone(), domain, rels).map_err(|e| CliError::invalid(path, &pointer, e))?;
            members.push((entry.name.unwrap_or_else(|| format!("s{i}")), s));
        }
        let max = file
            .max_size
            .unwrap_or_else(|| members.iter().map(|(_, s)| s.size()).max().unwrap_or(0));
        TruncatedClass::new(sig, members, max).map_err(|e| CliError::invalid(path, "/structures", e))
    }

    pub fn class(&mut self, path: &Path) -> Result<TruncatedClass, CliError> {
        let shown = path.display().to_string();
        let (_, payload) = Self::untag(self.read(path)?, &shown, "", Some(Kind::StructClass), true)?;
        Self::class_payload(payload, &shown)
    }

    /// Loads a file of whatever kind its tag names.
    pub fn any(&mut self, path: &Path) -> Result<Loaded, CliError> {
        let shown = path.display().to_string();
        let (kind, payload) = Self::untag(self.read(path)?, &shown, "", None, true)?;
        Ok(match kind {
            Kind::Category => Loaded::Category(Self::category_payload(payload, &shown, "")?),
            Kind::Diagram => {
                let (c, d) = self.diagram_payload(payload, path)?;
                Loaded::Diagram(c, d)
            }
            Kind::Functor => Loaded::Functor(self.functor_payload(payload, path)?),
            Kind::CatValued => Loaded::CatValued(self.catvalued_payload(payload, path)?),
            Kind::StructClass => Loaded::StructClass(Self::class_payload(payload, &shown)?),
        })
    }
}

fn tagged(kind: Kind, payload: Value) -> Value {
    let mut out = Map::new();
    out.insert("version".into(), json!(FORMAT_VERSION));
    out.insert("kind".into(), json!(kind.tag()));
    if let Value::Object(p) = payload {
        out.extend(p);
    }
    Value::Object(out)
}

fn category_payload_json(cat: &FinCategory) -> Value {
    let raw = cat.to_raw();
    let file = CategoryFile {
        objects: raw.objects,
        arrows: raw
            .arrows
            .into_iter()
            .map(|a| ArrowEntry {
                id: a.id,
                src: a.src,
                tgt: a.tgt,
            })
            .collect(),
        identities: raw.identities.into_iter().collect(),
        compose: raw.compose,
    };
    serde_json::to_value(file).expect("serializable")
}

pub fn category_json(cat: &FinCategory) -> Value {
    tagged(Kind::Category, category_payload_json(cat))
}

pub fn diagram_json(cat: &FinCategory, diag: &SetDiagram) -> Value {
    let raw = diag.to_raw(cat);
    let sets: BTreeMap<_, _> = raw.sets.into_iter().collect();
    let maps: BTreeMap<_, BTreeMap<_, _>> = raw
        .maps
        .into_iter()
        .map(|(a, m)| (a, m.into_iter().collect()))
        .collect();
    tagged(
        Kind::Diagram,
        json!({ "category": category_payload_json(cat), "sets": sets, "maps": maps }),
    )
}

pub fn functor_json(f: &FunctorData) -> Value {
    let (objects, arrows) = f.named_maps();
    let objects: BTreeMap<_, _> = objects.into_iter().collect();
    let arrows: BTreeMap<_, _> = arrows.into_iter().collect();
    tagged(
        Kind::Functor,
        json!({
            "source": category_payload_json(&f.source),
            "target": category_payload_json(&f.target),
            "objects": objects,
            "arrows": arrows,
        }),
    )
}

/// A structure in the member format of a structure-class file.
pub fn structure_json(s: &RelStructure) -> Value {
    let sig = s.signature();
    let relations: BTreeMap<&str, Vec<Vec<&str>>> = (0..sig.len())
        .map(|r| {
            let tuples = s
                .relation(r)
                .iter()
                .map(|t| t.iter().map(|&x| s.domain()[x].as_str()).collect())
                .collect();
            (sig.name(r), tuples)
        })
        .collect();
    json!({ "domain": s.domain(), "relations": relations })
}
