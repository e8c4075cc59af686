//! Search for gadget hypergraphs that pass the validator.
//!
//! Each class starts from the combinations its required properties force
//! (the re-entry combinations of the two-input classes, the three
//! choice-point combinations of B12). The search then walks Breaker's
//! regular moves in order; where no threat forces the move yet, it branches
//! over the smallest combinations that would create that threat. Leaves are
//! judged by the validator, and the smallest passing spec wins.

use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{validate_gadget, GadgetLibrary, GadgetReport, GadgetSpec, Variant};
use crate::error::{Error, Result};
use crate::geography::VertexClass;
use crate::hypergraph::{Square, SquareSet, Turn};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SynthesisOptions {
    /// Validator calls allowed per class.
    pub budget: usize,
    /// Shuffles the order in which equally sized candidates are tried.
    pub seed: u64,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            budget: 20_000,
            seed: 0,
        }
    }
}

pub fn synthesize_gadgets(opts: SynthesisOptions) -> Result<GadgetLibrary> {
    let specs = VertexClass::ALL
        .par_iter()
        .map(|&class| synthesize_class(class, opts))
        .collect::<Result<Vec<_>>>()?;
    GadgetLibrary::new(specs)
}

/// A Breaker move of some sequence that must be forced by a threat.
struct ThreatStep {
    maker: SquareSet,
    breaker: SquareSet,
    reply: Square,
    latest: Square,
}

struct Search {
    spec: GadgetSpec,
    seeds: Vec<Vec<SquareSet>>,
    steps: Rc<Vec<ThreatStep>>,
    opening: Option<Square>,
    rng: ChaCha8Rng,
    calls: usize,
    budget: usize,
    best: Option<(usize, usize, Vec<SquareSet>)>,
    last_report: Option<GadgetReport>,
}

fn set<'a>(names: impl IntoIterator<Item = &'a Square>) -> SquareSet {
    names.into_iter().cloned().collect()
}

pub fn synthesize_class(class: VertexClass, opts: SynthesisOptions) -> Result<GadgetSpec> {
    let spec = GadgetSpec::skeleton(class);
    let mut seeds: Vec<Vec<SquareSet>> = Vec::new();
    let mut steps = Vec::new();
    for &variant in Variant::for_class(class) {
        let mut maker = spec.entry_claims(variant);
        let mut breaker = SquareSet::new();
        let seq = &spec.sequences[&variant];
        for (k, step) in seq.iter().enumerate() {
            match step.mover {
                Turn::Maker => {
                    maker.insert(step.square.clone());
                }
                Turn::Breaker => {
                    let choice_point = class == VertexClass::B12 && k == 1;
                    if !choice_point {
                        steps.push(ThreatStep {
                            maker: maker.clone(),
                            breaker: breaker.clone(),
                            reply: step.square.clone(),
                            latest: seq[k - 1].square.clone(),
                        });
                    }
                    breaker.insert(step.square.clone());
                }
            }
        }
        if matches!(class, VertexClass::M21 | VertexClass::B21) {
            let other = spec.port(if variant == Variant::EnterA { 'b' } else { 'a' }).unwrap();
            let out = spec.port('c').unwrap();
            let options = spec
                .interiors
                .iter()
                .filter(|x| match class {
                    VertexClass::M21 => !breaker.contains(x) && !maker.contains(x),
                    _ => breaker.contains(x),
                })
                .map(|x| set([&other.p, &other.q, &out.p, &out.q, x]))
                .collect();
            seeds.push(options);
        }
    }
    if class == VertexClass::B12 {
        for extra in [["p_b", "x2"], ["x2", "x3"], ["x3", "p_c"]] {
            let mut c: SquareSet = ["p_a", "q_a", "x1"].into_iter().map(Square::new).collect();
            c.extend(extra.into_iter().map(Square::new));
            seeds.push(vec![c]);
        }
    }
    let opening = (class == VertexClass::B01).then(|| spec.sequences[&Variant::Only][0].square.clone());
    let mut search = Search {
        spec,
        seeds,
        steps: Rc::new(steps),
        opening,
        rng: ChaCha8Rng::seed_from_u64(opts.seed ^ class as u64),
        calls: 0,
        budget: opts.budget,
        best: None,
        last_report: None,
    };
    search.seed(0, &mut Vec::new());
    match search.best {
        Some((_, _, combos)) => {
            let mut spec = GadgetSpec::skeleton(class);
            spec.combos = combos.into_iter().collect();
            Ok(spec)
        }
        None => {
            let why = search
                .last_report
                .and_then(|r| r.failures().next().map(|f| f.to_string()))
                .unwrap_or_else(|| "no candidate reached validation".into());
            let reason = if search.calls >= search.budget {
                "budget exhausted"
            } else {
                "search space exhausted"
            };
            Err(Error::SynthesisFailure(format!(
                "{class}: {reason} after {} validations; {why}",
                search.calls
            )))
        }
    }
}

impl Search {
    fn seed(&mut self, i: usize, combos: &mut Vec<SquareSet>) {
        if i == self.seeds.len() {
            return self.extend(0, combos);
        }
        for option in self.seeds[i].clone() {
            let fresh = !combos.contains(&option);
            if fresh {
                combos.push(option);
            }
            self.seed(i + 1, combos);
            if fresh {
                combos.pop();
            }
        }
    }

    fn threat_squares(&self, combos: &[SquareSet], step: &ThreatStep) -> SquareSet {
        combos
            .iter()
            .filter(|c| c.is_disjoint(&step.breaker))
            .filter_map(|c| {
                let rest: Vec<&Square> = c.difference(&step.maker).collect();
                (rest.len() == 1).then(|| rest[0].clone())
            })
            .collect()
    }

    fn forced_so_far(&self, combos: &[SquareSet], upto: usize) -> bool {
        self.steps[..upto].iter().all(|s| {
            let t = self.threat_squares(combos, s);
            t.len() == 1 && t.contains(&s.reply)
        })
    }

    fn contains_joint_pair(&self, c: &SquareSet) -> bool {
        self.spec.ports.iter().any(|p| c.contains(&p.p) && c.contains(&p.q))
            || self.opening.as_ref().is_some_and(|o| c.contains(o))
    }

    fn candidates(&mut self, step: &ThreatStep, combos: &[SquareSet]) -> Vec<SquareSet> {
        let pool: Vec<&Square> = step.maker.iter().filter(|s| **s != step.latest).collect();
        let mut by_size: Vec<Vec<SquareSet>> = vec![Vec::new(); 6];
        for mask in 0u32..(1 << pool.len()) {
            let mut c: SquareSet = (0..pool.len())
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| pool[i].clone())
                .collect();
            c.insert(step.latest.clone());
            c.insert(step.reply.clone());
            if c.len() <= 5 && self.contains_joint_pair(&c) && !combos.contains(&c) {
                by_size[c.len()].push(c);
            }
        }
        let mut out = Vec::new();
        for mut group in by_size {
            group.sort();
            group.shuffle(&mut self.rng);
            out.extend(group);
        }
        out
    }

    fn worse_than_best(&self, combos: &[SquareSet]) -> bool {
        let size: usize = combos.iter().map(SquareSet::len).sum();
        self.best
            .as_ref()
            .is_some_and(|(n, s, _)| (combos.len(), size) > (*n, *s))
    }

    fn extend(&mut self, k: usize, combos: &mut Vec<SquareSet>) {
        if self.calls >= self.budget || self.worse_than_best(combos) {
            return;
        }
        if k == self.steps.len() {
            return self.judge(combos);
        }
        let steps = Rc::clone(&self.steps);
        let step = &steps[k];
        if self.threat_squares(combos, step).contains(&step.reply) {
            if self.forced_so_far(combos, k + 1) {
                self.extend(k + 1, combos);
            }
            return;
        }
        let candidates = self.candidates(step, combos);
        for c in candidates {
            combos.push(c);
            if self.forced_so_far(combos, k + 1) {
                self.extend(k + 1, combos);
            }
            combos.pop();
        }
    }

    fn judge(&mut self, combos: &[SquareSet]) {
        let mut spec = self.spec.clone();
        spec.combos = combos.iter().cloned().collect();
        self.calls += 1;
        let report = validate_gadget(&spec);
        if report.passed() {
            let mut sorted: Vec<SquareSet> = spec.combos.iter().cloned().collect();
            sorted.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
            let size = sorted.iter().map(SquareSet::len).sum();
            let key = (sorted.len(), size, sorted);
            if self.best.as_ref().is_none_or(|b| key < *b) {
                self.best = Some(key);
            }
        }
        self.last_report = Some(report);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rediscovers_the_start_gadget() {
        let spec = synthesize_class(VertexClass::B01, SynthesisOptions::default()).unwrap();
        assert_eq!(&spec, GadgetLibrary::builtin().spec(VertexClass::B01));
    }

    #[test]
    fn default_options_reproduce_the_shipped_library() {
        let lib = synthesize_gadgets(SynthesisOptions::default()).unwrap();
        assert_eq!(lib, GadgetLibrary::builtin());
    }

    #[test]
    fn tiny_budget_fails_cleanly() {
        let opts = SynthesisOptions { budget: 0, seed: 0 };
        assert!(matches!(
            synthesize_class(VertexClass::M12, opts),
            Err(Error::SynthesisFailure(_))
        ));
    }
}
