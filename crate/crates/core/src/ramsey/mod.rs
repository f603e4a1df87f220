//! Ramsey witnesses: for objects `A, B` and `N` colors, an object `C` such
//! that every coloring of `hom(A,C)` is constant on `g∘hom(A,B)` for some
//! `g: B → C`.

mod diagrams;
pub mod harness;

use thiserror::Error;

use crate::fincat::{ArrId, CategoryError, FinCategory, ObjId};
use crate::setdiag::DiagramError;

pub use diagrams::{
    coloring_diagram,
    bad_coloring_diagram, confluence_counterexample_diagram, iterated_m_solution, monochromatic_copy,
    MonochromaticCopy,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RamseyError {
    #[error(transparent)]
    Category(#[from] CategoryError),
    #[error("color count must be at least 1, got {0}")]
    InvalidColorCount(usize),
    #[error("no g: {b} → {c} makes the induced coloring constant; {c} is not a witness for this diagram")]
    NotAWitness { b: String, c: String },
    #[error("objects {0:?} have no common target")]
    NoCocone(Vec<String>),
    #[error("no Ramsey witness of ({a}, {b}) for {colors} colors in the ambient category")]
    NoWitness { a: String, b: String, colors: usize },
    #[error("`{a}` and `{b}` have the common target `{apex}`")]
    ConfluentPair { a: String, b: String, apex: String },
    #[error("`{a}` and `{b}` lie in different components")]
    NotConnected { a: String, b: String },
    #[error("carrier of `{0}` is empty")]
    EmptyCarrier(String),
    #[error("{0} colorings exceed the enumeration limit")]
    TooLarge(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// A coloring `χ: hom(A,C) → {0,…,N−1}`, indexed like `cat.hom(a, c)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coloring {
    pub a: ObjId,
    pub c: ObjId,
    pub colors: usize,
    pub assignment: Vec<usize>,
}

impl Coloring {
    pub fn color_of(&self, cat: &FinCategory, h: ArrId) -> Option<usize> {
        (cat.src(h) == self.a && cat.tgt(h) == self.c).then(|| self.assignment[cat.hom_position(h)])
    }

    /// `(arrow name, color)` pairs in hom-set order.
    pub fn labelled<'c>(&self, cat: &'c FinCategory) -> Vec<(&'c str, usize)> {
        cat.hom(self.a, self.c)
            .iter()
            .zip(&self.assignment)
            .map(|(&h, &k)| (cat.arrow_name(h), k))
            .collect()
    }
}

/// Outcome of a witness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessCheck {
    Witness,
    /// The lexicographically first coloring with no constant copy.
    Fails(Coloring),
}

impl WitnessCheck {
    pub fn is_witness(&self) -> bool {
        matches!(self, WitnessCheck::Witness)
    }

    pub fn certificate(&self) -> Option<&Coloring> {
        match self {
            WitnessCheck::Witness => None,
            WitnessCheck::Fails(c) => Some(c),
        }
    }
}

/// The copies `g∘hom(A,B)` inside `hom(A,C)`, as position lists, one per
/// `g ∈ hom(B,C)` in declaration order.
pub fn copies(cat: &FinCategory, a: ObjId, b: ObjId, c: ObjId) -> Vec<Vec<usize>> {
    cat.hom(b, c)
        .iter()
        .map(|&g| {
            cat.hom(a, b)
                .iter()
                .map(|&f| {
                    let gf = cat.compose(g, f).expect("composable");
                    cat.hom_position(gf)
                })
                .collect()
        })
        .collect()
}

fn is_constant(chi: &[usize], copy: &[usize]) -> bool {
    copy.windows(2).all(|w| chi[w[0]] == chi[w[1]])
}

/// First `g ∈ hom(B,C)` on whose copy `coloring` is constant.
pub fn find_monochromatic(cat: &FinCategory, b: ObjId, coloring: &Coloring) -> Option<ArrId> {
    let cs = copies(cat, coloring.a, b, coloring.c);
    cs.iter()
        .position(|copy| is_constant(&coloring.assignment, copy))
        .map(|i| cat.hom(b, coloring.c)[i])
}

/// Depth-first search over colorings in lexicographic order, cutting a
/// branch as soon as some copy is fully colored and constant. Cut branches
/// contain no violating coloring, so the first leaf is the
/// lexicographically first violation.
struct ColoringSearch {
    positions: usize,
    colors: usize,
    copies: Vec<Vec<usize>>,
    /// Copies whose largest position is `p`.
    closing: Vec<Vec<usize>>,
}

impl ColoringSearch {
    fn new(positions: usize, colors: usize, copies: Vec<Vec<usize>>) -> Self {
        let mut closing = vec![Vec::new(); positions];
        for (i, copy) in copies.iter().enumerate() {
            if let Some(&p) = copy.iter().max() {
                closing[p].push(i);
            }
        }
        ColoringSearch {
            positions,
            colors,
            copies,
            closing,
        }
    }

    /// Some copy is empty, so every coloring is vacuously constant on it.
    fn vacuous(&self) -> bool {
        self.copies.iter().any(|c| c.is_empty())
    }

    fn closes_constant(&self, chi: &[usize], p: usize) -> bool {
        self.closing[p].iter().any(|&i| is_constant(chi, &self.copies[i]))
    }

    /// First violating coloring extending `prefix`, if any.
    fn first_violation(&self, prefix: &[usize]) -> Option<Vec<usize>> {
        if self.vacuous() {
            return None;
        }
        let mut chi = prefix.to_vec();
        for p in 0..prefix.len() {
            if self.closes_constant(&chi, p) {
                return None;
            }
        }
        chi.resize(self.positions, 0);
        self.dfs(&mut chi, prefix.len()).then_some(chi)
    }

    fn dfs(&self, chi: &mut [usize], p: usize) -> bool {
        if p == self.positions {
            return true;
        }
        for v in 0..self.colors {
            chi[p] = v;
            if !self.closes_constant(chi, p) && self.dfs(chi, p + 1) {
                return true;
            }
        }
        false
    }

    fn prefixes(&self, len: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..self.colors).map(move |v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out
    }

    /// The odometer range is split by fixed prefixes; each worker reports
    /// the first violation in its parts and the earliest part wins.
    fn first_violation_parallel(&self, threads: usize) -> Option<Vec<usize>> {
        if threads <= 1 || self.positions == 0 || self.colors == 1 {
            return self.first_violation(&[]);
        }
        let mut len = 0;
        while len < self.positions && self.colors.pow(len as u32) < threads * 4 {
            len += 1;
        }
        let parts = self.prefixes(len);
        let results: Vec<Option<Vec<usize>>> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    let parts = &parts;
                    s.spawn(move || {
                        (t..parts.len())
                            .step_by(threads)
                            .map(|i| (i, self.first_violation(&parts[i])))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            let mut all = vec![None; parts.len()];
            for h in handles {
                for (i, r) in h.join().expect("worker panicked") {
                    all[i] = r;
                }
            }
            all
        });
        results.into_iter().flatten().next()
    }
}

fn check_object(cat: &FinCategory, x: ObjId) -> Result<(), RamseyError> {
    if x < cat.num_objects() {
        Ok(())
    } else {
        Err(CategoryError::UnknownObject(format!("#{x}")).into())
    }
}

fn check_colors(n: usize) -> Result<(), RamseyError> {
    if n == 0 {
        Err(RamseyError::InvalidColorCount(n))
    } else {
        Ok(())
    }
}

/// Is `c` a Ramsey witness of `(a, b)` for `colors` colors?
pub fn is_ramsey_witness(
    cat: &FinCategory,
    a: ObjId,
    b: ObjId,
    c: ObjId,
    colors: usize,
) -> Result<WitnessCheck, RamseyError> {
    is_ramsey_witness_threaded(cat, a, b, c, colors, 1)
}

/// [`is_ramsey_witness`] with the coloring range split over `threads`
/// workers; the certificate is the same as the sequential one.
pub fn is_ramsey_witness_threaded(
    cat: &FinCategory,
    a: ObjId,
    b: ObjId,
    c: ObjId,
    colors: usize,
    threads: usize,
) -> Result<WitnessCheck, RamseyError> {
    for x in [a, b, c] {
        check_object(cat, x)?;
    }
    check_colors(colors)?;
    let search = ColoringSearch::new(cat.hom(a, c).len(), colors, copies(cat, a, b, c));
    Ok(match search.first_violation_parallel(threads) {
        None => WitnessCheck::Witness,
        Some(assignment) => WitnessCheck::Fails(Coloring {
            a,
            c,
            colors,
            assignment,
        }),
    })
}

/// Candidate witnesses in ascending `|hom(A,C)|`, ties by declaration.
fn candidates(cat: &FinCategory, a: ObjId) -> Vec<ObjId> {
    let mut cs: Vec<ObjId> = cat.objects().collect();
    cs.sort_by_key(|&c| cat.hom(a, c).len());
    cs
}

/// Either a witness or a failure certificate for every object.
pub type WitnessSearch = Result<ObjId, Vec<(ObjId, Coloring)>>;

fn search_witness(
    cat: &FinCategory,
    a: ObjId,
    b: ObjId,
    colors: usize,
    threads: usize,
) -> Result<WitnessSearch, RamseyError> {
    let mut failures = Vec::new();
    for c in candidates(cat, a) {
        match is_ramsey_witness_threaded(cat, a, b, c, colors, threads)? {
            WitnessCheck::Witness => return Ok(Ok(c)),
            WitnessCheck::Fails(chi) => failures.push((c, chi)),
        }
    }
    Ok(Err(failures))
}

/// The first Ramsey witness of `(a, b)` for `colors` colors.
pub fn find_witness(cat: &FinCategory, a: ObjId, b: ObjId, colors: usize) -> Result<Option<ObjId>, RamseyError> {
    find_witness_threaded(cat, a, b, colors, 1)
}

pub fn find_witness_threaded(
    cat: &FinCategory,
    a: ObjId,
    b: ObjId,
    colors: usize,
    threads: usize,
) -> Result<Option<ObjId>, RamseyError> {
    check_object(cat, a)?;
    check_object(cat, b)?;
    Ok(search_witness(cat, a, b, colors, threads)?.ok())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairVerdict {
    Witness(ObjId),
    /// One non-witnessing coloring per object.
    Fails(Vec<(ObjId, Coloring)>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairReport {
    pub a: ObjId,
    pub b: ObjId,
    pub verdict: PairVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamseyReport {
    pub colors: usize,
    pub pairs: Vec<PairReport>,
}

impl RamseyReport {
    pub fn is_ramsey(&self) -> bool {
        self.pairs.iter().all(|p| matches!(p.verdict, PairVerdict::Witness(_)))
    }

    pub fn failing_pairs(&self) -> impl Iterator<Item = &PairReport> {
        self.pairs.iter().filter(|p| matches!(p.verdict, PairVerdict::Fails(_)))
    }
}

/// Witness search for every ordered pair of objects.
pub fn is_ramsey(cat: &FinCategory, colors: usize) -> Result<RamseyReport, RamseyError> {
    is_ramsey_threaded(cat, colors, 1)
}

pub fn is_ramsey_threaded(cat: &FinCategory, colors: usize, threads: usize) -> Result<RamseyReport, RamseyError> {
    check_colors(colors)?;
    let mut pairs = Vec::new();
    for a in cat.objects() {
        for b in cat.objects() {
            let verdict = if cat.hom(a, b).is_empty() {
                PairVerdict::Witness(b)
            } else {
                match search_witness(cat, a, b, colors, threads)? {
                    Ok(c) => PairVerdict::Witness(c),
                    Err(certs) => PairVerdict::Fails(certs),
                }
            };
            pairs.push(PairReport { a, b, verdict });
        }
    }
    Ok(RamseyReport { colors, pairs })
}
