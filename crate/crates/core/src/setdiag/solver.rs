use crate::fincat::{ArrId, FinCategory, ObjId};

use super::{DiagramError, SetDiagram, Solution};

type Domains = Vec<Vec<bool>>;

/// Constraint solver for `x_A = D_f(x_B)` over a chosen set of arrows.
///
/// Each constraint is functional from the `B` side to the `A` side, so
/// support is cheap to maintain: an element of `D_B` survives while its
/// image survives, an element of `D_A` while some preimage survives.
/// Propagation runs to a fixpoint before every branching step.
pub struct Solver<'a> {
    cat: &'a FinCategory,
    diag: &'a SetDiagram,
    constraints: Vec<ArrId>,
    incident: Vec<Vec<usize>>,
    /// Constrained objects by decreasing degree, ties in declaration order.
    branch_order: Vec<ObjId>,
}

impl<'a> Solver<'a> {
    pub fn full(cat: &'a FinCategory, diag: &'a SetDiagram) -> Self {
        let all: Vec<ArrId> = cat.arrows().collect();
        Self::build(cat, diag, &all)
    }

    pub fn restricted(cat: &'a FinCategory, diag: &'a SetDiagram, m: &[ArrId]) -> Result<Self, DiagramError> {
        if let Some(&bad) = m.iter().find(|&&f| f >= cat.num_arrows()) {
            return Err(DiagramError::Category(crate::fincat::CategoryError::UnknownArrow(format!(
                "#{bad}"
            ))));
        }
        Ok(Self::build(cat, diag, m))
    }

    fn build(cat: &'a FinCategory, diag: &'a SetDiagram, m: &[ArrId]) -> Self {
        let mut constraints: Vec<ArrId> = m.iter().copied().filter(|&f| !cat.is_identity(f)).collect();
        constraints.sort_unstable();
        constraints.dedup();
        let mut incident = vec![Vec::new(); cat.num_objects()];
        for (i, &f) in constraints.iter().enumerate() {
            incident[cat.src(f)].push(i);
            if cat.tgt(f) != cat.src(f) {
                incident[cat.tgt(f)].push(i);
            }
        }
        let mut branch_order: Vec<ObjId> = cat.objects().filter(|&c| !incident[c].is_empty()).collect();
        branch_order.sort_by_key(|&c| std::cmp::Reverse(incident[c].len()));
        Solver {
            cat,
            diag,
            constraints,
            incident,
            branch_order,
        }
    }

    fn initial_domains(&self) -> Option<Domains> {
        let mut dom: Domains = self
            .cat
            .objects()
            .map(|c| vec![true; self.diag.carrier_size(c)])
            .collect();
        // endo-arrows force fixed points
        for &f in &self.constraints {
            let a = self.cat.src(f);
            if a == self.cat.tgt(f) {
                for (x, alive) in dom[a].iter_mut().enumerate() {
                    if self.diag.act(f, x) != x {
                        *alive = false;
                    }
                }
            }
        }
        if dom.iter().any(|d| !d.iter().any(|&b| b)) {
            return None;
        }
        let all: Vec<usize> = (0..self.constraints.len()).collect();
        self.propagate(&mut dom, all).then_some(dom)
    }

    fn propagate(&self, dom: &mut Domains, mut queue: Vec<usize>) -> bool {
        let mut queued = vec![false; self.constraints.len()];
        for &q in &queue {
            queued[q] = true;
        }
        while let Some(ci) = queue.pop() {
            queued[ci] = false;
            let f = self.constraints[ci];
            let (a, b) = (self.cat.src(f), self.cat.tgt(f));
            let act = self.diag.action(f);
            let mut changed_b = false;
            for y in 0..act.len() {
                if dom[b][y] && !dom[a][act[y]] {
                    dom[b][y] = false;
                    changed_b = true;
                }
            }
            let mut supported = vec![false; dom[a].len()];
            for y in 0..act.len() {
                if dom[b][y] {
                    supported[act[y]] = true;
                }
            }
            let mut changed_a = false;
            for x in 0..supported.len() {
                if dom[a][x] && !supported[x] {
                    dom[a][x] = false;
                    changed_a = true;
                }
            }
            for (obj, changed) in [(a, changed_a), (b, changed_b)] {
                if !changed {
                    continue;
                }
                if !dom[obj].iter().any(|&v| v) {
                    return false;
                }
                for &other in &self.incident[obj] {
                    if !queued[other] {
                        queued[other] = true;
                        queue.push(other);
                    }
                }
            }
        }
        true
    }

    fn assign(&self, dom: &Domains, c: ObjId, x: usize) -> Option<Domains> {
        let mut next = dom.clone();
        next[c].iter_mut().enumerate().for_each(|(i, v)| *v = i == x);
        let queue = self.incident[c].clone();
        self.propagate(&mut next, queue).then_some(next)
    }

    fn first_alive(d: &[bool]) -> usize {
        d.iter().position(|&v| v).expect("nonempty domain")
    }

    /// Some solution, or `None`.
    pub fn solve(&self) -> Option<Solution> {
        let dom = self.initial_domains()?;
        let dom = self.search(dom)?;
        let sol = Solution(dom.iter().map(|d| Self::first_alive(d)).collect());
        debug_assert!(self.diag.satisfies(self.cat, &sol, &self.constraints));
        Some(sol)
    }

    fn search(&self, dom: Domains) -> Option<Domains> {
        let Some(&c) = self
            .branch_order
            .iter()
            .find(|&&c| dom[c].iter().filter(|&&v| v).count() > 1)
        else {
            return Some(dom);
        };
        for x in 0..dom[c].len() {
            if !dom[c][x] {
                continue;
            }
            if let Some(next) = self.assign(&dom, c, x) {
                if let Some(done) = self.search(next) {
                    return Some(done);
                }
            }
        }
        None
    }

    /// All solutions in lexicographic order of `(x_0, x_1, …)`, stopping
    /// after `cap` when given.
    pub fn enumerate(&self, cap: Option<usize>) -> Vec<Solution> {
        let mut out = Vec::new();
        if cap == Some(0) {
            return out;
        }
        if let Some(dom) = self.initial_domains() {
            self.enumerate_from(dom, 0, &mut Vec::new(), cap, &mut out);
        }
        out
    }

    /// Number of solutions, without materializing them.
    pub fn count(&self) -> usize {
        let Some(dom) = self.initial_domains() else {
            return 0;
        };
        self.count_from(dom, 0)
    }

    fn count_from(&self, dom: Domains, c: ObjId) -> usize {
        if c == dom.len() {
            return 1;
        }
        if self.incident[c].is_empty() {
            let k = dom[c].iter().filter(|&&v| v).count();
            return k * self.count_from(dom, c + 1);
        }
        let mut total = 0;
        for x in 0..dom[c].len() {
            if dom[c][x] {
                if let Some(next) = self.assign(&dom, c, x) {
                    total += self.count_from(next, c + 1);
                }
            }
        }
        total
    }

    fn enumerate_from(
        &self,
        dom: Domains,
        c: ObjId,
        prefix: &mut Vec<usize>,
        cap: Option<usize>,
        out: &mut Vec<Solution>,
    ) -> bool {
        if c == dom.len() {
            out.push(Solution(prefix.clone()));
            return cap.is_some_and(|k| out.len() >= k);
        }
        for x in 0..dom[c].len() {
            if !dom[c][x] {
                continue;
            }
            let next = if self.incident[c].is_empty() {
                Some(dom.clone())
            } else {
                self.assign(&dom, c, x)
            };
            if let Some(next) = next {
                prefix.push(x);
                let stop = self.enumerate_from(next, c + 1, prefix, cap, out);
                prefix.pop();
                if stop {
                    return true;
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::super::gen;
    use super::*;
    use crate::corpus;
    use rand::SeedableRng;

    /// Exhaustive product enumeration, independent of propagation.
    fn brute_force(cat: &FinCategory, diag: &SetDiagram, m: &[ArrId]) -> Vec<Solution> {
        let sizes: Vec<usize> = cat.objects().map(|c| diag.carrier_size(c)).collect();
        if sizes.contains(&0) {
            return vec![];
        }
        let mut out = Vec::new();
        let mut cur = vec![0; sizes.len()];
        loop {
            let s = Solution(cur.clone());
            if m.iter().all(|&f| cur[cat.src(f)] == diag.act(f, cur[cat.tgt(f)])) {
                out.push(s);
            }
            // odometer, last coordinate fastest
            let mut i = sizes.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < sizes[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
    }

    #[test]
    fn agrees_with_brute_force_on_small_bases() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for (name, cat) in corpus::standard() {
            if cat.num_arrows() > 8 {
                continue;
            }
            for _ in 0..20 {
                let Some(d) = gen::random_diagram(&cat, 3, &mut rng) else {
                    continue;
                };
                let all: Vec<ArrId> = cat.arrows().collect();
                let expected = brute_force(&cat, &d, &all);
                assert_eq!(enumerate_solutions_full(&cat, &d), expected, "{name}");
                assert_eq!(Solver::full(&cat, &d).solve().is_some(), !expected.is_empty(), "{name}");
                assert_eq!(Solver::full(&cat, &d).count(), expected.len(), "{name}");
                if let Some(s) = Solver::full(&cat, &d).solve() {
                    assert!(expected.contains(&s));
                }
            }
        }
    }

    fn enumerate_solutions_full(cat: &FinCategory, d: &SetDiagram) -> Vec<Solution> {
        Solver::full(cat, d).enumerate(None)
    }
}
