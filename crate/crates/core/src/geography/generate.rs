//! Random generation and exhaustive enumeration of convertible instances.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{validate_hard_form, Digraph, Edge, GgInstance, Side, Vertex};
use crate::error::{Error, Result};

const MAX_ATTEMPTS: usize = 5_000;

fn vertex_name(i: usize) -> String {
    if i == 0 {
        "s".to_string()
    } else {
        format!("v{i}")
    }
}

fn build(n: usize, arcs: &[(usize, usize)]) -> Result<GgInstance> {
    let vertices = (0..n).map(|i| Vertex::new(vertex_name(i))).collect();
    let arcs = arcs
        .iter()
        .map(|&(a, b)| Edge::new(vertex_name(a).as_str(), vertex_name(b).as_str()));
    GgInstance::new(Digraph::new(vertices, arcs)?, Vertex::new("s"))
}

/// A random convertible instance with between 3 and `vertex_budget`
/// vertices, deterministic in `seed`. Vertices are named `s, v1, v2, ...`.
pub fn gen_convertible(vertex_budget: usize, seed: u64) -> Result<GgInstance> {
    if vertex_budget < 3 {
        return Err(Error::GenerationFailure(
            "convertible instances need at least 3 vertices".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(3..=vertex_budget);
    for _ in 0..MAX_ATTEMPTS {
        if let Some(inst) = attempt(n, &mut rng) {
            return Ok(inst);
        }
    }
    Err(Error::GenerationFailure(format!(
        "no convertible instance on {n} vertices after {MAX_ATTEMPTS} attempts"
    )))
}

fn attempt(n: usize, rng: &mut ChaCha8Rng) -> Option<GgInstance> {
    const TYPES: [(usize, usize); 3] = [(1, 1), (1, 2), (2, 1)];
    let mut side = vec![Side::B; n];
    let mut deg = vec![(0usize, 1usize); n];
    for i in 1..n {
        side[i] = if i == 1 || rng.random_bool(0.5) {
            Side::A
        } else {
            Side::B
        };
        deg[i] = TYPES[rng.random_range(0..3)];
    }
    // out-stubs of one side must match in-stubs of the other
    for _ in 0..4 * n {
        let sum = |s: Side, f: fn(&(usize, usize)) -> usize| -> isize {
            (0..n).filter(|&i| side[i] == s).map(|i| f(&deg[i]) as isize).sum()
        };
        let gap_ab = sum(Side::A, |d| d.1) - sum(Side::B, |d| d.0);
        let gap_ba = sum(Side::B, |d| d.1) - sum(Side::A, |d| d.0);
        if gap_ab == 0 && gap_ba == 0 {
            break;
        }
        let (tail, head, gap) = if gap_ab != 0 {
            (Side::A, Side::B, gap_ab)
        } else {
            (Side::B, Side::A, gap_ba)
        };
        // (vertex, new degrees) repairs that shrink |gap| by one
        let mut fixes = Vec::new();
        for i in 1..n {
            let d = deg[i];
            if side[i] == tail {
                if gap > 0 && d == (1, 2) {
                    fixes.push((i, (1, 1)));
                }
                if gap < 0 && d == (1, 1) {
                    fixes.push((i, (1, 2)));
                }
            }
            if side[i] == head {
                if gap > 0 && d == (1, 1) {
                    fixes.push((i, (2, 1)));
                }
                if gap < 0 && d == (2, 1) {
                    fixes.push((i, (1, 1)));
                }
            }
        }
        let &(i, d) = fixes.get(rng.random_range(0..fixes.len().max(1)))?;
        deg[i] = d;
    }
    let mut arcs = BTreeSet::new();
    for (tail, head) in [(Side::A, Side::B), (Side::B, Side::A)] {
        let mut outs: Vec<usize> = (0..n)
            .filter(|&i| side[i] == tail)
            .flat_map(|i| std::iter::repeat_n(i, deg[i].1))
            .collect();
        let ins: Vec<usize> = (0..n)
            .filter(|&i| side[i] == head)
            .flat_map(|i| std::iter::repeat_n(i, deg[i].0))
            .collect();
        if outs.len() != ins.len() {
            return None;
        }
        outs.shuffle(rng);
        for pair in outs.into_iter().zip(ins) {
            if !arcs.insert(pair) {
                return None;
            }
        }
    }
    let arcs: Vec<(usize, usize)> = arcs.into_iter().collect();
    let inst = build(n, &arcs).ok()?;
    super::validate_convertible(&inst, false).is_valid().then_some(inst)
}

struct Enumerator {
    n: usize,
    start_out: usize,
    indeg: Vec<usize>,
    outdeg: Vec<usize>,
    side: Vec<Side>,
    arcs: Vec<(usize, usize)>,
    found: Vec<GgInstance>,
}

impl Enumerator {
    fn max_in(&self, v: usize) -> usize {
        if v == 0 {
            0
        } else {
            2
        }
    }

    fn max_out(&self, v: usize) -> usize {
        if v == 0 {
            self.start_out
        } else {
            2
        }
    }

    fn fits(&self, v: usize, din: usize, dout: usize) -> bool {
        let (i, o) = (self.indeg[v] + din, self.outdeg[v] + dout);
        i <= self.max_in(v) && o <= self.max_out(v) && i + o <= 3
    }

    fn complete(&self, v: usize) -> bool {
        let (i, o) = (self.indeg[v], self.outdeg[v]);
        if v == 0 {
            i == 0 && o == self.start_out
        } else {
            (1..=2).contains(&i) && (1..=2).contains(&o) && i + o <= 3
        }
    }

    // `discovered` vertices are exactly 0..discovered (breadth-first labels)
    fn rec(&mut self, i: usize, j: usize, discovered: usize) {
        if j == self.n {
            if !self.complete(i) {
                return;
            }
            if i + 1 == self.n {
                if let Ok(inst) = build(self.n, &self.arcs) {
                    self.found.push(inst);
                }
                return;
            }
            if i + 1 >= discovered {
                return;
            }
            return self.rec(i + 1, i + 2, discovered);
        }
        self.rec(i, j + 1, discovered);
        let fresh = j >= discovered;
        if fresh && j != discovered {
            return;
        }
        let saved = self.side[j];
        if fresh {
            self.side[j] = match self.side[i] {
                Side::A => Side::B,
                Side::B => Side::A,
            };
        } else if self.side[j] == self.side[i] {
            return;
        }
        let next = if fresh { discovered + 1 } else { discovered };
        for (fwd, back) in [(true, false), (false, true), (true, true)] {
            let (f, b) = (fwd as usize, back as usize);
            if !self.fits(i, b, f) || !self.fits(j, f, b) {
                continue;
            }
            self.outdeg[i] += f;
            self.indeg[j] += f;
            self.outdeg[j] += b;
            self.indeg[i] += b;
            let len = self.arcs.len();
            if fwd {
                self.arcs.push((i, j));
            }
            if back {
                self.arcs.push((j, i));
            }
            self.rec(i, j + 1, next);
            self.arcs.truncate(len);
            self.outdeg[i] -= f;
            self.indeg[j] -= f;
            self.outdeg[j] -= b;
            self.indeg[i] -= b;
        }
        self.side[j] = saved;
    }
}

/// Every labeled instance on `n` vertices whose start has in-degree 0 and
/// out-degree `start_out`, every other vertex has in/out-degree in `{1, 2}`
/// and total degree at most 3, and whose underlying graph is connected and
/// bipartite. Labels follow breadth-first order from the start, which cuts
/// most (not all) isomorphic duplicates.
pub fn enumerate_instances(n: usize, start_out: usize) -> Vec<GgInstance> {
    if n < 2 || !(1..=2).contains(&start_out) {
        return Vec::new();
    }
    let mut e = Enumerator {
        n,
        start_out,
        indeg: vec![0; n],
        outdeg: vec![0; n],
        side: vec![Side::B; n],
        arcs: Vec::new(),
        found: Vec::new(),
    };
    e.rec(0, 1, 1);
    debug_assert!(e.found.iter().all(|i| validate_hard_form(i, false).is_valid()));
    e.found
}

/// Smallest arc list over all relabelings that fix the start.
pub fn canonical_key(inst: &GgInstance) -> Vec<(usize, usize)> {
    let g = inst.graph();
    let others: Vec<&Vertex> = g.vertices().iter().filter(|v| *v != inst.start()).collect();
    let index = |v: &Vertex| others.iter().position(|o| *o == v).map_or(0, |p| p + 1);
    let arcs: Vec<(usize, usize)> = g.arcs().iter().map(|e| (index(&e.from), index(&e.to))).collect();
    let mut perm: Vec<usize> = (0..=others.len()).collect();
    let mut best: Option<Vec<(usize, usize)>> = None;
    permute(&mut perm, 1, &mut |p| {
        let mut key: Vec<(usize, usize)> = arcs.iter().map(|&(a, b)| (p[a], p[b])).collect();
        key.sort_unstable();
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    });
    best.unwrap_or_default()
}

fn permute(p: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k >= p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// [`enumerate_instances`] with isomorphic copies removed.
pub fn enumerate_up_to_iso(n: usize, start_out: usize) -> Vec<GgInstance> {
    let mut seen = HashSet::new();
    enumerate_instances(n, start_out)
        .into_iter()
        .filter(|inst| seen.insert(canonical_key(inst)))
        .collect()
}
