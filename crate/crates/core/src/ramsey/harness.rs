//! Checks on one category that "every diagram of finite nonempty sets has
//! a solution" agrees with "confluent and Ramsey".

use rand::rngs::StdRng;
use rand::SeedableRng;

use super::{bad_coloring_diagram, confluence_counterexample_diagram, is_ramsey_threaded, RamseyError};
use crate::fincat::{FinCategory, ObjId};
use crate::setdiag::gen::{for_each_diagram, random_diagram};
use crate::setdiag::{solve, SetDiagram};

#[derive(Clone, Debug)]
pub struct HarnessOptions {
    pub colors: usize,
    /// Exhaustive enumeration only runs on bases with at most this many arrows.
    pub exhaustive_max_arrows: usize,
    pub exhaustive_carrier: usize,
    pub samples: usize,
    pub sample_carrier: usize,
    pub seed: u64,
    pub threads: usize,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        HarnessOptions {
            colors: 2,
            exhaustive_max_arrows: 6,
            exhaustive_carrier: 2,
            samples: 200,
            sample_carrier: 3,
            seed: 0,
            threads: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub enum ObstructionKind {
    NotConfluent,
    NotRamsey,
}

/// A diagram built from a failure of confluence or of the Ramsey property.
#[derive(Clone, Debug)]
pub struct Obstruction {
    pub kind: ObstructionKind,
    pub a: ObjId,
    pub b: ObjId,
    pub diagram: SetDiagram,
    pub nonempty: bool,
    pub solvable: bool,
}

#[derive(Clone, Debug)]
pub struct HarnessReport {
    pub confluent: bool,
    pub ramsey: bool,
    /// Diagrams enumerated exhaustively; `None` when the base is too large.
    pub exhaustive: Option<usize>,
    pub sampled: usize,
    /// A diagram without solution on a confluent Ramsey base.
    pub unsolved: Option<SetDiagram>,
    pub obstruction: Option<Obstruction>,
}

impl HarnessReport {
    /// Whether solvability matched the verdict on every diagram tried.
    pub fn consistent(&self) -> bool {
        match &self.obstruction {
            None => self.confluent && self.ramsey && self.unsolved.is_none(),
            Some(o) => o.nonempty && !o.solvable,
        }
    }
}

fn obstruction(cat: &FinCategory, kind: ObstructionKind, a: ObjId, b: ObjId, diagram: SetDiagram) -> Obstruction {
    Obstruction {
        kind,
        a,
        b,
        nonempty: diagram.empty_carriers().is_empty(),
        solvable: solve(cat, &diagram).is_some(),
        diagram,
    }
}

pub fn run_harness(cat: &FinCategory, opts: &HarnessOptions) -> Result<HarnessReport, RamseyError> {
    let conf = cat.confluence();
    let ramsey = is_ramsey_threaded(cat, opts.colors, opts.threads)?;
    let mut report = HarnessReport {
        confluent: conf.confluent,
        ramsey: ramsey.is_ramsey(),
        exhaustive: None,
        sampled: 0,
        unsolved: None,
        obstruction: None,
    };
    if let Some((a, b)) = conf.counterexample {
        let d = confluence_counterexample_diagram(cat, a, b)?;
        report.obstruction = Some(obstruction(cat, ObstructionKind::NotConfluent, a, b, d));
        return Ok(report);
    }
    if let Some(p) = ramsey.failing_pairs().next() {
        let d = bad_coloring_diagram(cat, p.a, p.b, opts.colors)?;
        report.obstruction = Some(obstruction(cat, ObstructionKind::NotRamsey, p.a, p.b, d));
        return Ok(report);
    }
    if cat.num_arrows() <= opts.exhaustive_max_arrows {
        let mut count = 0;
        let mut unsolved = None;
        for_each_diagram(cat, opts.exhaustive_carrier, |d| {
            count += 1;
            if solve(cat, d).is_none() {
                unsolved = Some(d.clone());
                return false;
            }
            true
        });
        report.exhaustive = Some(count);
        if unsolved.is_some() {
            report.unsolved = unsolved;
            return Ok(report);
        }
    }
    let mut rng = StdRng::seed_from_u64(opts.seed);
    for _ in 0..opts.samples {
        let Some(d) = random_diagram(cat, opts.sample_carrier, &mut rng) else {
            continue;
        };
        report.sampled += 1;
        if solve(cat, &d).is_none() {
            report.unsolved = Some(d);
            break;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn verdicts_on_small_categories() {
        let opts = HarnessOptions {
            samples: 20,
            ..Default::default()
        };
        let r = run_harness(&corpus::chain(3), &opts).unwrap();
        assert!(r.confluent && r.ramsey && r.consistent());
        assert!(r.exhaustive.unwrap() > 0);
        let r = run_harness(&corpus::span(), &opts).unwrap();
        assert!(matches!(r.obstruction.as_ref().unwrap().kind, ObstructionKind::NotConfluent));
        assert!(r.consistent());
        let r = run_harness(&corpus::cyclic_monoid(2), &opts).unwrap();
        assert!(r.confluent && !r.ramsey && r.consistent());
    }
}
