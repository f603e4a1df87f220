//! Generators of diagrams with small nonempty carriers, exhaustive and
//! random. Elements are labelled `"0"`, `"1"`, ….

use rand::seq::SliceRandom;
use rand::Rng;

use super::SetDiagram;
use crate::fincat::{ArrId, FinCategory};

/// All functions `0..dom → 0..cod` as tables, lexicographic.
fn all_functions(dom: usize, cod: usize) -> Vec<Vec<usize>> {
    if cod == 0 {
        return if dom == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    let mut cur = vec![0; dom];
    loop {
        out.push(cur.clone());
        let mut i = dom;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < cod {
                break;
            }
            cur[i] = 0;
        }
    }
}

struct Assigner<'c> {
    cat: &'c FinCategory,
    sizes: Vec<usize>,
    actions: Vec<Option<Vec<usize>>>,
    order: Vec<ArrId>,
}

impl<'c> Assigner<'c> {
    fn new(cat: &'c FinCategory, sizes: Vec<usize>) -> Self {
        let mut actions = vec![None; cat.num_arrows()];
        for c in cat.objects() {
            actions[cat.identity(c)] = Some((0..sizes[c]).collect());
        }
        let order = cat.arrows().filter(|&f| !cat.is_identity(f)).collect();
        Assigner {
            cat,
            sizes,
            actions,
            order,
        }
    }

    fn candidates(&self, f: ArrId) -> Vec<Vec<usize>> {
        all_functions(self.sizes[self.cat.tgt(f)], self.sizes[self.cat.src(f)])
    }

    /// `D_(g∘f) = D_f ∘ D_g` for every fully assigned triple touching `x`.
    fn consistent(&self, x: ArrId) -> bool {
        let cat = self.cat;
        let holds = |f: ArrId, g: ArrId| -> bool {
            let gf = cat.compose(g, f).expect("composable");
            match (&self.actions[f], &self.actions[g], &self.actions[gf]) {
                (Some(af), Some(ag), Some(agf)) => (0..agf.len()).all(|z| af[ag[z]] == agf[z]),
                _ => true,
            }
        };
        if !cat.out_arrows(cat.tgt(x)).iter().all(|&g| holds(x, g)) {
            return false;
        }
        if !cat.in_arrows(cat.src(x)).iter().all(|&f| holds(f, x)) {
            return false;
        }
        // x as a composite g∘f
        for &f in cat.out_arrows(cat.src(x)) {
            for &g in cat.hom(cat.tgt(f), cat.tgt(x)) {
                if cat.compose(g, f) == Some(x) && !holds(f, g) {
                    return false;
                }
            }
        }
        true
    }

    fn finish(&self) -> SetDiagram {
        let carriers = self
            .sizes
            .iter()
            .map(|&n| (0..n).map(|i| i.to_string()).collect())
            .collect();
        let actions = self.actions.iter().map(|a| a.clone().expect("assigned")).collect();
        SetDiagram::from_parts(self.cat, carriers, actions).expect("consistent assignment is functorial")
    }

    fn exhaust(&mut self, i: usize, visit: &mut dyn FnMut(&SetDiagram) -> bool) -> bool {
        if i == self.order.len() {
            return visit(&self.finish());
        }
        let f = self.order[i];
        for cand in self.candidates(f) {
            self.actions[f] = Some(cand);
            if self.consistent(f) && !self.exhaust(i + 1, visit) {
                self.actions[f] = None;
                return false;
            }
        }
        self.actions[f] = None;
        true
    }

    fn random(&mut self, i: usize, rng: &mut impl Rng, budget: &mut usize) -> bool {
        if i == self.order.len() {
            return true;
        }
        let f = self.order[i];
        let mut cands = self.candidates(f);
        cands.shuffle(rng);
        for cand in cands {
            if *budget == 0 {
                break;
            }
            *budget -= 1;
            self.actions[f] = Some(cand);
            if self.consistent(f) && self.random(i + 1, rng, budget) {
                return true;
            }
        }
        self.actions[f] = None;
        false
    }
}

/// Visits every diagram whose carriers have sizes in `1..=max_carrier`,
/// carriers varying slowest. Stops early when `visit` returns `false`;
/// returns whether the enumeration ran to completion.
pub fn for_each_diagram(
    cat: &FinCategory,
    max_carrier: usize,
    mut visit: impl FnMut(&SetDiagram) -> bool,
) -> bool {
    let n = cat.num_objects();
    if max_carrier == 0 {
        return true;
    }
    let mut sizes = vec![1; n];
    loop {
        let mut a = Assigner::new(cat, sizes.clone());
        if !a.exhaust(0, &mut visit) {
            return false;
        }
        let mut i = n;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            sizes[i] += 1;
            if sizes[i] <= max_carrier {
                break;
            }
            sizes[i] = 1;
        }
    }
}

/// A random diagram with carrier sizes drawn from `1..=max_carrier`.
/// Resamples sizes a few times when no functor fits; `None` if every
/// attempt fails within its search budget.
pub fn random_diagram(cat: &FinCategory, max_carrier: usize, rng: &mut impl Rng) -> Option<SetDiagram> {
    assert!(max_carrier >= 1);
    for _ in 0..16 {
        let sizes: Vec<usize> = cat.objects().map(|_| rng.gen_range(1..=max_carrier)).collect();
        let mut a = Assigner::new(cat, sizes);
        let mut budget = 20_000;
        if a.random(0, rng, &mut budget) {
            return Some(a.finish());
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use rand::SeedableRng;

    #[test]
    fn function_tables() {
        assert_eq!(all_functions(2, 3).len(), 9);
        assert_eq!(all_functions(0, 0), vec![Vec::<usize>::new()]);
        assert!(all_functions(1, 0).is_empty());
    }

    #[test]
    fn exhaustive_counts() {
        // chain2 with sizes (a, b): a^b functions D_2 → D_1
        let mut count = 0;
        for_each_diagram(&corpus::chain(2), 2, |_| {
            count += 1;
            true
        });
        assert_eq!(count, 1 + 1 + 2 + 4);

        // Z2 acts by involutions: sizes 1 and 2 give 1 + 2
        let mut count = 0;
        for_each_diagram(&corpus::cyclic_monoid(2), 2, |_| {
            count += 1;
            true
        });
        assert_eq!(count, 3);

        // absorbing monoid: idempotent maps; on 2 points id, two constants
        let mut count = 0;
        for_each_diagram(&corpus::absorbing_monoid(), 2, |_| {
            count += 1;
            true
        });
        assert_eq!(count, 1 + 3);
    }

    #[test]
    fn early_stop() {
        let mut seen = 0;
        let done = for_each_diagram(&corpus::chain(3), 2, |_| {
            seen += 1;
            seen < 5
        });
        assert!(!done);
        assert_eq!(seen, 5);
    }

    #[test]
    fn random_diagrams_validate() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for (_, cat) in corpus::standard() {
            let d = random_diagram(&cat, 3, &mut rng).expect("some functor");
            assert!(d.carrier_size(0) >= 1);
        }
    }
}
