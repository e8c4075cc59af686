//! Exact Maker-Breaker search over bitsets.
//!
//! Nodes are reduced games: the unbroken combinations minus Maker's
//! squares, with supersets dropped because a combination containing another
//! one can never be the first to be completed. Claimed and dead squares
//! disappear from the key, so transpositions that differ only there merge.

use std::collections::HashMap;
use std::fmt;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::hypergraph::{GameSpec, Pairing, Position, Square, SquareSet, Turn};

/// Bounds on a search. `None` means unbounded.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveLimits {
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
}

impl SolveLimits {
    pub fn nodes(n: u64) -> Self {
        SolveLimits {
            max_nodes: Some(n),
            max_seconds: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub limits: SolveLimits,
    /// A pairing Breaker may fall back on: any node whose combinations it
    /// blocks is scored as Breaker's win without further search.
    pub pairing_hint: Option<Pairing>,
    /// Memo entries kept before the shallowest ones are evicted.
    pub memo_capacity: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            limits: SolveLimits::default(),
            pairing_hint: None,
            memo_capacity: 1 << 22,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// A complete pairing of the root game.
    Pairing(Pairing),
    /// Alternating moves from the root ending with Maker owning a combination.
    WinningLine(Vec<Square>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    /// `None` when a limit stopped the search.
    pub winner: Option<Turn>,
    pub nodes: u64,
    pub principal_line: Vec<Square>,
    pub certificate: Option<Certificate>,
}

impl SolveResult {
    pub fn is_conclusive(&self) -> bool {
        self.winner.is_some()
    }
}

impl fmt::Display for SolveResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let winner = self.winner.map_or("inconclusive", Turn::keyword);
        let line: Vec<&str> = self.principal_line.iter().map(Square::name).collect();
        write!(f, "winner={winner} nodes={} line={}", self.nodes, line.join(","))
    }
}

type Mask = u128;

fn bit(i: usize) -> Mask {
    1u128 << i
}

fn bits(mut m: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(i)
    })
}

/// Sorted, deduplicated, superset-free.
fn normalize(mut combos: Vec<Mask>) -> Vec<Mask> {
    combos.sort_unstable_by_key(|c| (c.count_ones(), *c));
    combos.dedup();
    let mut kept: Vec<Mask> = Vec::with_capacity(combos.len());
    for c in combos {
        if !kept.iter().any(|k| k & c == *k) {
            kept.push(c);
        }
    }
    kept.sort_unstable();
    kept
}

fn after_maker(combos: &[Mask], x: usize) -> Vec<Mask> {
    normalize(combos.iter().map(|c| c & !bit(x)).collect())
}

fn after_breaker(combos: &[Mask], y: usize) -> Vec<Mask> {
    combos.iter().copied().filter(|c| c & bit(y) == 0).collect()
}

fn union(combos: &[Mask]) -> Mask {
    combos.iter().fold(0, |a, c| a | c)
}

/// Sum of `2^-|F|`, Erdős–Selfridge potential.
fn potential(combos: &[Mask]) -> f64 {
    combos.iter().map(|c| (-(c.count_ones() as f64)).exp2()).sum()
}

/// Pivots with at least two partners among size-2 combinations, as
/// `(pivot, partners)`.
fn double_threats(combos: &[Mask]) -> Vec<(usize, Mask)> {
    let mut partners = [0 as Mask; 128];
    let mut seen: Mask = 0;
    for c in combos.iter().filter(|c| c.count_ones() == 2) {
        let a = c.trailing_zeros() as usize;
        let b = (127 - c.leading_zeros()) as usize;
        partners[a] |= bit(b);
        partners[b] |= bit(a);
        seen |= *c;
    }
    bits(seen)
        .filter(|&p| partners[p].count_ones() >= 2)
        .map(|p| (p, partners[p]))
        .collect()
}

fn components(combos: &[Mask]) -> Vec<Vec<Mask>> {
    let mut groups: Vec<(Mask, Vec<Mask>)> = Vec::new();
    for &c in combos {
        let mut merged = (c, vec![c]);
        let mut i = 0;
        while i < groups.len() {
            if groups[i].0 & merged.0 != 0 {
                let (m, cs) = groups.swap_remove(i);
                merged.0 |= m;
                merged.1.extend(cs);
            } else {
                i += 1;
            }
        }
        groups.push(merged);
    }
    groups
        .into_iter()
        .map(|(_, mut cs)| {
            cs.sort_unstable();
            cs
        })
        .collect()
}

/// Move order: squares in many short combinations first.
fn ordered_moves(combos: &[Mask]) -> Vec<usize> {
    let mut score = [0f64; 128];
    for c in combos {
        let w = (-(c.count_ones() as f64)).exp2();
        for i in bits(*c) {
            score[i] += w;
        }
    }
    let mut moves: Vec<usize> = bits(union(combos)).collect();
    moves.sort_by(|a, b| score[*b].total_cmp(&score[*a]).then(a.cmp(b)));
    moves
}

struct Aborted;

#[derive(Clone, Copy)]
struct Entry {
    maker_wins: bool,
    live: u32,
}

struct Search<'a> {
    memo: HashMap<(bool, Box<[Mask]>), Entry>,
    capacity: usize,
    nodes: u64,
    limits: SolveLimits,
    deadline: Option<Instant>,
    hint: Option<&'a [Mask]>,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<(), Aborted> {
        self.nodes += 1;
        if self.limits.max_nodes.is_some_and(|n| self.nodes > n) {
            return Err(Aborted);
        }
        if self.nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Aborted);
        }
        Ok(())
    }

    fn hint_blocks(&self, combos: &[Mask]) -> bool {
        self.hint
            .is_some_and(|pairs| combos.iter().all(|c| pairs.iter().any(|p| c & p == *p)))
    }

    fn remember(&mut self, key: (bool, Box<[Mask]>), maker_wins: bool) {
        if self.memo.len() >= self.capacity {
            self.evict();
        }
        let live = union(&key.1).count_ones();
        self.memo.insert(key, Entry { maker_wins, live });
    }

    /// Drops entries for the smallest games until at most half remain.
    fn evict(&mut self) {
        let mut hist = [0usize; 129];
        for e in self.memo.values() {
            hist[e.live as usize] += 1;
        }
        let mut keep = 0;
        let mut threshold = 129;
        while threshold > 0 && keep + hist[threshold - 1] <= self.capacity / 2 {
            threshold -= 1;
            keep += hist[threshold];
        }
        self.memo.retain(|_, e| e.live as usize >= threshold);
    }

    /// Whether Maker wins the reduced game `combos` with the given mover.
    /// `combos` must be normalized.
    fn value(&mut self, combos: &[Mask], maker_to_move: bool) -> Result<bool, Aborted> {
        if combos.first() == Some(&0) {
            return Ok(true);
        }
        if combos.is_empty() {
            return Ok(false);
        }
        self.tick()?;
        let singles = combos.iter().filter(|c| c.count_ones() == 1).fold(0, |a, c| a | c);
        if maker_to_move && singles != 0 {
            return Ok(true);
        }
        if !maker_to_move && singles.count_ones() >= 2 {
            return Ok(true);
        }
        if self.hint_blocks(combos) {
            return Ok(false);
        }
        let es = potential(combos);
        if (maker_to_move && es < 0.5 - 1e-9) || (!maker_to_move && es < 1.0 - 1e-9) {
            return Ok(false);
        }
        let key = (maker_to_move, combos.to_vec().into_boxed_slice());
        if let Some(e) = self.memo.get(&key) {
            return Ok(e.maker_wins);
        }
        let result = self.expand(combos, maker_to_move, singles)?;
        self.remember(key, result);
        Ok(result)
    }

    fn expand(&mut self, combos: &[Mask], maker_to_move: bool, singles: Mask) -> Result<bool, Aborted> {
        if !maker_to_move && singles != 0 {
            let y = singles.trailing_zeros() as usize;
            return self.value(&after_breaker(combos, y), true);
        }
        let parts = components(combos);
        if parts.len() > 1 {
            return self.split(parts, maker_to_move);
        }
        let threats = double_threats(combos);
        if maker_to_move {
            if !threats.is_empty() {
                return Ok(true);
            }
            for x in ordered_moves(combos) {
                if self.value(&after_maker(combos, x), false)? {
                    return Ok(true);
                }
            }
            return Ok(false);
        }
        let mut allowed = union(combos);
        for (pivot, partners) in &threats {
            let stop = bit(*pivot) | if partners.count_ones() == 2 { *partners } else { 0 };
            allowed &= stop;
        }
        for y in ordered_moves(combos) {
            if allowed & bit(y) == 0 {
                continue;
            }
            if !self.value(&after_breaker(combos, y), true)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Disjoint components: Maker to move wins iff some component is a
    /// Maker-first win; Breaker to move loses iff two components are, or the
    /// only one stays a win for Maker even with Breaker moving first there.
    fn split(&mut self, parts: Vec<Vec<Mask>>, maker_to_move: bool) -> Result<bool, Aborted> {
        let mut winning = Vec::new();
        for part in parts {
            if self.value(&part, true)? {
                if maker_to_move {
                    return Ok(true);
                }
                winning.push(part);
                if winning.len() >= 2 {
                    return Ok(true);
                }
            }
        }
        match winning.pop() {
            Some(part) if !maker_to_move => self.value(&part, false),
            _ => Ok(false),
        }
    }
}

/// Square indexing for one game.
struct Indexed {
    names: Vec<Square>,
    index: HashMap<Square, usize>,
}

impl Indexed {
    fn new(squares: &SquareSet) -> Result<Self> {
        if squares.len() > 128 {
            return Err(Error::TooLarge(squares.len()));
        }
        let names: Vec<Square> = squares.iter().cloned().collect();
        let index = names.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(Indexed { names, index })
    }

    fn mask<'a>(&self, set: impl IntoIterator<Item = &'a Square>) -> Mask {
        set.into_iter()
            .fold(0, |m, s| m | self.index.get(s).map_or(0, |&i| bit(i)))
    }
}

pub fn solve_mb(g: &GameSpec, limits: SolveLimits) -> Result<SolveResult> {
    solve_mb_with(
        g,
        &SolveOptions {
            limits,
            ..SolveOptions::default()
        },
    )
}

pub fn solve_mb_with(g: &GameSpec, opts: &SolveOptions) -> Result<SolveResult> {
    solve_position_with(&Position::start(g), opts)
}

/// Solves the game `p` reduces to, with the side to move of `p`.
pub fn solve_position_with(p: &Position, opts: &SolveOptions) -> Result<SolveResult> {
    let ix = Indexed::new(p.hypergraph().squares())?;
    let maker = ix.mask(p.maker_set());
    let breaker = ix.mask(p.breaker_set());
    let combos: Vec<Mask> = p
        .hypergraph()
        .combos()
        .iter()
        .map(|c| ix.mask(c))
        .filter(|c| c & breaker == 0)
        .map(|c| c & !maker)
        .collect();
    let combos = normalize(combos);
    let hint: Option<Vec<Mask>> = opts
        .pairing_hint
        .as_ref()
        .map(|c| c.pairs().map(|(a, b)| ix.mask([a, b])).collect());
    let mut search = Search {
        memo: HashMap::new(),
        capacity: opts.memo_capacity.max(16),
        nodes: 0,
        limits: opts.limits,
        deadline: opts
            .limits
            .max_seconds
            .map(|s| Instant::now() + Duration::from_secs_f64(s.max(0.0))),
        hint: hint.as_deref(),
    };
    let maker_to_move = p.to_move() == Turn::Maker;
    let hint_cutoff = search.hint_blocks(&combos) && combos.first() != Some(&0);
    let Ok(maker_wins) = search.value(&combos, maker_to_move) else {
        return Ok(SolveResult {
            winner: None,
            nodes: search.nodes,
            principal_line: Vec::new(),
            certificate: None,
        });
    };
    let nodes = search.nodes;
    let line = principal_line(&mut search, combos, maker_to_move, maker_wins);
    let principal_line: Vec<Square> = line.iter().map(|&i| ix.names[i].clone()).collect();
    let certificate = if maker_wins {
        Some(Certificate::WinningLine(principal_line.clone()))
    } else if hint_cutoff {
        opts.pairing_hint.clone().map(Certificate::Pairing)
    } else {
        None
    };
    Ok(SolveResult {
        winner: Some(if maker_wins { Turn::Maker } else { Turn::Breaker }),
        nodes,
        principal_line,
        certificate,
    })
}

/// Replays best play from the root. The winner's moves keep the value; the
/// loser follows the move order.
fn principal_line(search: &mut Search, mut combos: Vec<Mask>, mut maker_to_move: bool, maker_wins: bool) -> Vec<usize> {
    search.limits = SolveLimits::default();
    search.deadline = None;
    let mut line = Vec::new();
    loop {
        if combos.is_empty() || combos.first() == Some(&0) {
            return line;
        }
        let singles = combos.iter().filter(|c| c.count_ones() == 1).fold(0, |a, c| a | c);
        let winner_moves = maker_to_move == maker_wins;
        let mut moves = ordered_moves(&combos);
        if singles != 0 {
            let s = singles.trailing_zeros() as usize;
            moves.retain(|&m| m != s);
            moves.insert(0, s);
        }
        let mut chosen = None;
        for &m in &moves {
            let child = if maker_to_move {
                after_maker(&combos, m)
            } else {
                after_breaker(&combos, m)
            };
            let ok = match search.value(&child, !maker_to_move) {
                Ok(v) => v == maker_wins,
                Err(Aborted) => false,
            };
            if ok || !winner_moves {
                chosen = Some((m, child));
                break;
            }
        }
        let Some((m, child)) = chosen else {
            return line;
        };
        line.push(m);
        combos = child;
        maker_to_move = !maker_to_move;
    }
}

/// Checks a Maker certificate: legal alternating moves from `g`'s start
/// that end with Maker owning a combination.
pub fn verify_winning_line(g: &GameSpec, line: &[Square]) -> bool {
    let mut p = Position::start(g);
    for sq in line {
        match p.apply_move(sq) {
            Ok(next) => p = next,
            Err(_) => return false,
        }
    }
    p.maker_has_won()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{squares, Hypergraph};

    fn game(combos: &[&[&str]], to_move: Turn) -> GameSpec {
        GameSpec::new(
            Hypergraph::from_combos(combos.iter().map(|c| squares(c.iter()))).unwrap(),
            to_move,
        )
    }

    #[test]
    fn normalization_drops_supersets() {
        assert_eq!(normalize(vec![0b111, 0b011, 0b011, 0b100]), vec![0b011, 0b100]);
    }

    #[test]
    fn single_square_combo() {
        let r = solve_mb(&game(&[&["a"]], Turn::Maker), SolveLimits::default()).unwrap();
        assert_eq!(r.winner, Some(Turn::Maker));
        assert_eq!(r.principal_line, vec![Square::new("a")]);
        let r = solve_mb(&game(&[&["a"]], Turn::Breaker), SolveLimits::default()).unwrap();
        assert_eq!(r.winner, Some(Turn::Breaker));
    }

    #[test]
    fn double_threat_wins_and_pair_loses() {
        let g = game(&[&["a", "b"], &["a", "c"]], Turn::Maker);
        let r = solve_mb(&g, SolveLimits::default()).unwrap();
        assert_eq!(r.winner, Some(Turn::Maker));
        match r.certificate {
            Some(Certificate::WinningLine(line)) => assert!(verify_winning_line(&g, &line)),
            other => panic!("{other:?}"),
        }
        let g = game(&[&["a", "b"]], Turn::Maker);
        assert_eq!(
            solve_mb(&g, SolveLimits::default()).unwrap().winner,
            Some(Turn::Breaker)
        );
    }

    #[test]
    fn components_combine() {
        // two disjoint Maker-first wins: Breaker to move cannot stop both
        let g = game(&[&["a", "b"], &["a", "c"], &["d", "e"], &["d", "f"]], Turn::Breaker);
        assert_eq!(solve_mb(&g, SolveLimits::default()).unwrap().winner, Some(Turn::Maker));
        let g = game(&[&["a", "b"], &["a", "c"], &["d", "e"]], Turn::Breaker);
        assert_eq!(
            solve_mb(&g, SolveLimits::default()).unwrap().winner,
            Some(Turn::Breaker)
        );
    }

    #[test]
    fn node_limit_is_inconclusive() {
        let mut combos: Vec<Vec<String>> = Vec::new();
        for i in 0..6 {
            combos.push((0..4).map(|j| format!("s{}", (i * 3 + j) % 18)).collect());
        }
        let g = GameSpec::new(
            Hypergraph::from_combos(combos.iter().map(squares)).unwrap(),
            Turn::Maker,
        );
        let r = solve_mb(&g, SolveLimits::nodes(1)).unwrap();
        assert!(r.winner.is_none() || r.nodes <= 1);
    }

    #[test]
    fn too_large() {
        let combos: Vec<SquareSet> = (0..65).map(|i| squares([format!("a{i}"), format!("b{i}")])).collect();
        let g = GameSpec::new(Hypergraph::from_combos(combos).unwrap(), Turn::Maker);
        assert_eq!(solve_mb(&g, SolveLimits::default()), Err(Error::TooLarge(130)));
    }
}
