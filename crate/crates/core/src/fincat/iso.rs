use super::{ArrId, FinCategory, ObjId};

/// Searches for an isomorphism of categories `a ≅ b`, returning the object
/// and arrow bijections. Backtracking over objects (pruned by hom-set sizes)
/// and then over arrows, checking each composable triple as soon as its
/// last member is assigned. Exponential in the worst case; meant for small
/// categories.
pub fn find_isomorphism(a: &FinCategory, b: &FinCategory) -> Option<(Vec<ObjId>, Vec<ArrId>)> {
    if a.num_objects() != b.num_objects() || a.num_arrows() != b.num_arrows() {
        return None;
    }
    let sig = |c: &FinCategory, x: ObjId| {
        let mut outs: Vec<usize> = c.objects().map(|y| c.hom(x, y).len()).collect();
        let mut ins: Vec<usize> = c.objects().map(|y| c.hom(y, x).len()).collect();
        outs.sort_unstable();
        ins.sort_unstable();
        (c.hom(x, x).len(), outs, ins)
    };
    let sig_a: Vec<_> = a.objects().map(|x| sig(a, x)).collect();
    let sig_b: Vec<_> = b.objects().map(|x| sig(b, x)).collect();

    let mut search = Search {
        a,
        b,
        obj: vec![usize::MAX; a.num_objects()],
        obj_used: vec![false; b.num_objects()],
        arr: vec![usize::MAX; a.num_arrows()],
        arr_used: vec![false; b.num_arrows()],
        order: Vec::new(),
    };
    let candidates: Vec<Vec<ObjId>> = sig_a
        .iter()
        .map(|s| b.objects().filter(|&y| &sig_b[y] == s).collect())
        .collect();
    if search.objects(0, &candidates) {
        Some((search.obj, search.arr))
    } else {
        None
    }
}

struct Search<'c> {
    a: &'c FinCategory,
    b: &'c FinCategory,
    obj: Vec<ObjId>,
    obj_used: Vec<bool>,
    arr: Vec<ArrId>,
    arr_used: Vec<bool>,
    order: Vec<ArrId>,
}

impl Search<'_> {
    fn objects(&mut self, x: usize, candidates: &[Vec<ObjId>]) -> bool {
        if x == self.a.num_objects() {
            return self.start_arrows();
        }
        for &y in &candidates[x] {
            if self.obj_used[y] {
                continue;
            }
            let compatible = (0..x).all(|x2| {
                let y2 = self.obj[x2];
                self.a.hom(x, x2).len() == self.b.hom(y, y2).len()
                    && self.a.hom(x2, x).len() == self.b.hom(y2, y).len()
            }) && self.a.hom(x, x).len() == self.b.hom(y, y).len();
            if !compatible {
                continue;
            }
            self.obj[x] = y;
            self.obj_used[y] = true;
            if self.objects(x + 1, candidates) {
                return true;
            }
            self.obj_used[y] = false;
            self.obj[x] = usize::MAX;
        }
        false
    }

    fn start_arrows(&mut self) -> bool {
        self.arr.iter_mut().for_each(|v| *v = usize::MAX);
        self.arr_used.iter_mut().for_each(|v| *v = false);
        for x in self.a.objects() {
            let (ia, ib) = (self.a.identity(x), self.b.identity(self.obj[x]));
            self.arr[ia] = ib;
            self.arr_used[ib] = true;
        }
        self.order = self.a.arrows().filter(|&f| !self.a.is_identity(f)).collect();
        self.arrows(0)
    }

    fn arrows(&mut self, i: usize) -> bool {
        if i == self.order.len() {
            return true;
        }
        let f = self.order[i];
        let (s, t) = (self.obj[self.a.src(f)], self.obj[self.a.tgt(f)]);
        let candidates: Vec<ArrId> = self.b.hom(s, t).to_vec();
        for g in candidates {
            if self.arr_used[g] {
                continue;
            }
            self.arr[f] = g;
            self.arr_used[g] = true;
            if self.consistent(f) && self.arrows(i + 1) {
                return true;
            }
            self.arr_used[g] = false;
            self.arr[f] = usize::MAX;
        }
        false
    }

    fn assigned(&self, f: ArrId) -> Option<ArrId> {
        let v = self.arr[f];
        (v != usize::MAX).then_some(v)
    }

    /// Checks every fully assigned composable triple involving `f`.
    fn consistent(&self, f: ArrId) -> bool {
        let (a, b) = (self.a, self.b);
        let pf = self.arr[f];
        let holds = |x: ArrId, y: ArrId, xy: ArrId| -> bool {
            match (self.assigned(x), self.assigned(y), self.assigned(xy)) {
                (Some(px), Some(py), Some(pxy)) => b.compose(px, py) == Some(pxy),
                _ => true,
            }
        };
        for &g in a.out_arrows(a.tgt(f)) {
            let gf = a.compose(g, f).expect("composable");
            if !holds(g, f, gf) {
                return false;
            }
        }
        for &h in a.in_arrows(a.src(f)) {
            let fh = a.compose(f, h).expect("composable");
            if !holds(f, h, fh) {
                return false;
            }
        }
        for &y in a.out_arrows(a.src(f)) {
            if self.assigned(y).is_none() {
                continue;
            }
            for &x in a.hom(a.tgt(y), a.tgt(f)) {
                if a.compose(x, y) == Some(f) {
                    if let Some(px) = self.assigned(x) {
                        if b.compose(px, self.arr[y]) != Some(pf) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn relabelled_category_is_isomorphic() {
        let c = corpus::linear_orders_category(3);
        let r = c
            .relabel(|i, _| format!("x{i}"), |i, _| format!("a{i}"))
            .unwrap();
        assert!(find_isomorphism(&c, &r).is_some());
    }

    #[test]
    fn non_isomorphic_pairs() {
        assert!(find_isomorphism(&corpus::chain(2), &corpus::parallel_pair()).is_none());
        assert!(find_isomorphism(&corpus::absorbing_monoid(), &corpus::cyclic_monoid(2)).is_none());
        assert!(find_isomorphism(&corpus::span(), &corpus::cospan()).is_none());
    }

    #[test]
    fn opposite_of_span_is_cospan() {
        assert!(find_isomorphism(&corpus::span().opposite(), &corpus::cospan()).is_some());
    }
}
