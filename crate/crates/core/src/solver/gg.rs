//! Exhaustive Generalized Geography search.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::geography::{GgInstance, Player, Ruleset, Vertex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GgSolveResult {
    pub winner: Player,
    pub nodes: u64,
    /// Marks from the start vertex under optimal play by both sides.
    pub principal_line: Vec<Vertex>,
}

impl fmt::Display for GgSolveResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line: Vec<&str> = self.principal_line.iter().map(Vertex::name).collect();
        write!(f, "winner={} nodes={} line={}", self.winner, self.nodes, line.join(","))
    }
}

struct Search {
    succ: Vec<Vec<usize>>,
    ruleset: Ruleset,
    memo: HashMap<(u128, usize), bool>,
    nodes: u64,
}

impl Search {
    /// Whether the player about to move from `last` wins.
    fn mover_wins(&mut self, marked: u128, last: usize) -> bool {
        if let Some(&v) = self.memo.get(&(marked, last)) {
            return v;
        }
        self.nodes += 1;
        let mut wins = false;
        for i in 0..self.succ[last].len() {
            let w = self.succ[last][i];
            // a revisit under revised rules loses on the spot, so it is
            // never a winning option and never needs exploring
            if marked & (1 << w) != 0 {
                continue;
            }
            if !self.mover_wins(marked | 1 << w, w) {
                wins = true;
                break;
            }
        }
        self.memo.insert((marked, last), wins);
        wins
    }

    fn best_reply(&mut self, marked: u128, last: usize) -> Option<usize> {
        let open: Vec<usize> = self.succ[last]
            .iter()
            .copied()
            .filter(|w| marked & (1 << w) == 0)
            .collect();
        let winning = open.iter().copied().find(|&w| !self.mover_wins(marked | 1 << w, w));
        match (winning, self.ruleset) {
            (Some(w), _) => Some(w),
            (None, _) if !open.is_empty() => open.first().copied(),
            // forced to revisit: the line ends with the losing mark
            (None, Ruleset::Revised) => self.succ[last].first().copied(),
            (None, Ruleset::Original) => None,
        }
    }
}

/// Solves `inst` exactly. Alice marks the start vertex.
pub fn solve_gg(inst: &GgInstance, ruleset: Ruleset) -> Result<GgSolveResult> {
    let vertices: Vec<&Vertex> = inst.graph().vertices().iter().collect();
    if vertices.len() > 128 {
        return Err(Error::TooLarge(vertices.len()));
    }
    let index: HashMap<&Vertex, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let succ = vertices
        .iter()
        .map(|v| inst.graph().successors(v).map(|w| index[w]).collect())
        .collect();
    let mut search = Search {
        succ,
        ruleset,
        memo: HashMap::new(),
        nodes: 0,
    };
    let s = index[inst.start()];
    let bob_wins = search.mover_wins(1 << s, s);
    let nodes = search.nodes;
    let mut line = vec![s];
    let mut marked: u128 = 1 << s;
    while let Some(w) = search.best_reply(marked, *line.last().unwrap()) {
        line.push(w);
        if marked & (1 << w) != 0 {
            break;
        }
        marked |= 1 << w;
    }
    Ok(GgSolveResult {
        winner: if bob_wins { Player::Bob } else { Player::Alice },
        nodes,
        principal_line: line.into_iter().map(|i| vertices[i].clone()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geography::{gg_loser_on_move, GgState};

    #[test]
    fn path_parity() {
        // s -> a -> b: Alice marks s, Bob a, Alice b, Bob is stuck
        let inst = GgInstance::from_arcs("s", [("s", "a"), ("a", "b")]).unwrap();
        let r = solve_gg(&inst, Ruleset::Original).unwrap();
        assert_eq!(r.winner, Player::Alice);
        let names: Vec<&str> = r.principal_line.iter().map(Vertex::name).collect();
        assert_eq!(names, ["s", "a", "b"]);
    }

    #[test]
    fn revised_line_ends_in_revisit() {
        let inst = GgInstance::from_arcs("s", [("s", "a"), ("a", "b"), ("b", "s")]).unwrap();
        let r = solve_gg(&inst, Ruleset::Revised).unwrap();
        assert_eq!(r.winner, Player::Alice);
        let names: Vec<&str> = r.principal_line.iter().map(Vertex::name).collect();
        assert_eq!(names, ["s", "a", "b", "s"]);
        let st = GgState::with_marks(Ruleset::Revised, &names);
        assert_eq!(gg_loser_on_move(&inst, &st).unwrap(), Player::Bob);
    }
}
