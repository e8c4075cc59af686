//! The Maker-Breaker game model: squares, hypergraphs, positions and pairings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A square of a Maker-Breaker game, identified by an opaque name.
///
/// Squares are ordered by name; every set of squares in this crate is a
/// `BTreeSet`, so iteration and serialization are sorted.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Square(Arc<str>);

impl Square {
    pub fn new(name: impl AsRef<str>) -> Self {
        Square(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Square {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Square {
    fn from(s: &str) -> Self {
        Square::new(s)
    }
}

pub type SquareSet = BTreeSet<Square>;

/// Builds a square set from anything that names squares.
pub fn squares<I, S>(names: I) -> SquareSet
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    names.into_iter().map(Square::new).collect()
}

/// Whose turn it is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Turn {
    Maker,
    Breaker,
}

impl Turn {
    pub fn other(self) -> Turn {
        match self {
            Turn::Maker => Turn::Breaker,
            Turn::Breaker => Turn::Maker,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Turn::Maker => "maker",
            Turn::Breaker => "breaker",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Turn> {
        match s {
            "maker" | "m" | "M" => Some(Turn::Maker),
            "breaker" | "b" | "B" => Some(Turn::Breaker),
            _ => None,
        }
    }
}

impl fmt::Display for Turn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// A finite hypergraph `(X, F)`: the squares and the winning combinations.
///
/// Combinations are kept as a set, so duplicates collapse. The empty
/// combination only appears in reduced games and means Maker has already won.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Hypergraph {
    squares: SquareSet,
    combos: BTreeSet<SquareSet>,
}

impl Hypergraph {
    /// Checks that every combination is non-empty and lies inside `squares`.
    pub fn new(squares: SquareSet, combos: impl IntoIterator<Item = SquareSet>) -> Result<Self> {
        let combos: BTreeSet<SquareSet> = combos.into_iter().collect();
        for combo in &combos {
            if combo.is_empty() {
                return Err(Error::InvalidArgument("empty winning combination".into()));
            }
            if let Some(sq) = combo.iter().find(|s| !squares.contains(*s)) {
                return Err(Error::InvalidArgument(format!(
                    "combination mentions unknown square {sq}"
                )));
            }
        }
        Ok(Hypergraph { squares, combos })
    }

    /// The hypergraph whose squares are exactly the union of the combinations.
    pub fn from_combos(combos: impl IntoIterator<Item = SquareSet>) -> Result<Self> {
        let combos: Vec<SquareSet> = combos.into_iter().collect();
        let squares = combos.iter().flatten().cloned().collect();
        Hypergraph::new(squares, combos)
    }

    /// Internal constructor that tolerates the empty combination.
    pub(crate) fn from_parts_unchecked(squares: SquareSet, combos: BTreeSet<SquareSet>) -> Self {
        Hypergraph { squares, combos }
    }

    pub fn squares(&self) -> &SquareSet {
        &self.squares
    }

    pub fn combos(&self) -> &BTreeSet<SquareSet> {
        &self.combos
    }

    /// Largest combination size, 0 without combinations.
    pub fn rank(&self) -> usize {
        self.combos.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    pub fn is_uniform(&self, k: usize) -> bool {
        self.combos.iter().all(|c| c.len() == k)
    }

    /// True if some combination is empty (only possible after reduction).
    pub fn has_empty_combo(&self) -> bool {
        self.combos.iter().any(BTreeSet::is_empty)
    }

    /// Splits the hypergraph along the overlap relation of its combinations.
    ///
    /// Squares in no combination become singleton components without
    /// combinations. Components are ordered by their smallest square.
    pub fn connected_components(&self) -> Vec<Hypergraph> {
        let index: BTreeMap<&Square, usize> = self.squares.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut parent: Vec<usize> = (0..self.squares.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for combo in &self.combos {
            let mut it = combo.iter().map(|s| index[s]);
            if let Some(first) = it.next() {
                for other in it {
                    let (a, b) = (find(&mut parent, first), find(&mut parent, other));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: BTreeMap<usize, (SquareSet, BTreeSet<SquareSet>)> = BTreeMap::new();
        for (i, sq) in self.squares.iter().enumerate() {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().0.insert(sq.clone());
        }
        for combo in &self.combos {
            if let Some(first) = combo.iter().next() {
                let root = find(&mut parent, index[first]);
                groups.get_mut(&root).unwrap().1.insert(combo.clone());
            }
        }
        groups
            .into_values()
            .map(|(squares, combos)| Hypergraph { squares, combos })
            .collect()
    }
}

/// A Maker-Breaker game `(X, F, t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GameSpec {
    pub hypergraph: Hypergraph,
    pub to_move: Turn,
}

impl GameSpec {
    pub fn new(hypergraph: Hypergraph, to_move: Turn) -> Self {
        GameSpec { hypergraph, to_move }
    }

    pub fn rank(&self) -> usize {
        self.hypergraph.rank()
    }

    /// Squares `p` with `{p}` a combination: Breaker must claim one of them
    /// or lose on the next move.
    pub fn mate_in_one(&self) -> SquareSet {
        detect_mate_in_one(self)
    }

    pub fn mate_in_two(&self) -> Vec<MateInTwo> {
        detect_mate_in_two(self)
    }
}

/// A position `(X, F, X_M, X_B, t)`.
///
/// The constructor only checks disjointness and membership; the alternation
/// count is checked separately by [`Position::alternation_is_consistent`]
/// because artificial positions are legitimate inputs too.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Position {
    hypergraph: Arc<Hypergraph>,
    maker: SquareSet,
    breaker: SquareSet,
    to_move: Turn,
}

impl Position {
    pub fn new(hypergraph: Arc<Hypergraph>, maker: SquareSet, breaker: SquareSet, to_move: Turn) -> Result<Self> {
        if let Some(sq) = maker.intersection(&breaker).next() {
            return Err(Error::InvalidArgument(format!("square {sq} claimed by both players")));
        }
        if let Some(sq) = maker
            .iter()
            .chain(breaker.iter())
            .find(|s| !hypergraph.squares().contains(*s))
        {
            return Err(Error::InvalidArgument(format!("unknown square {sq}")));
        }
        Ok(Position {
            hypergraph,
            maker,
            breaker,
            to_move,
        })
    }

    /// The opening position of a game: nothing claimed.
    pub fn start(game: &GameSpec) -> Self {
        Position {
            hypergraph: Arc::new(game.hypergraph.clone()),
            maker: SquareSet::new(),
            breaker: SquareSet::new(),
            to_move: game.to_move,
        }
    }

    pub fn hypergraph(&self) -> &Hypergraph {
        &self.hypergraph
    }

    pub fn shared_hypergraph(&self) -> &Arc<Hypergraph> {
        &self.hypergraph
    }

    pub fn maker_set(&self) -> &SquareSet {
        &self.maker
    }

    pub fn breaker_set(&self) -> &SquareSet {
        &self.breaker
    }

    pub fn to_move(&self) -> Turn {
        self.to_move
    }

    pub fn is_claimed(&self, sq: &Square) -> bool {
        self.maker.contains(sq) || self.breaker.contains(sq)
    }

    pub fn is_unclaimed(&self, sq: &Square) -> bool {
        self.hypergraph.squares().contains(sq) && !self.is_claimed(sq)
    }

    /// `|X_M| - |X_B|` is 0 or 1 and matches the side to move, as in play
    /// that started with Maker.
    pub fn alternation_is_consistent(&self) -> bool {
        match self.maker.len().checked_sub(self.breaker.len()) {
            Some(0) => self.to_move == Turn::Maker,
            Some(1) => self.to_move == Turn::Breaker,
            _ => false,
        }
    }

    /// Whether `combo` contains a Breaker square.
    pub fn is_broken(&self, combo: &SquareSet) -> Result<bool> {
        if !self.hypergraph.combos().contains(combo) {
            return Err(Error::InvalidArgument(format!(
                "{} is not a winning combination",
                fmt_set(combo)
            )));
        }
        Ok(!combo.is_disjoint(&self.breaker))
    }

    /// Some combination lies entirely inside Maker's claims.
    pub fn maker_has_won(&self) -> bool {
        self.hypergraph.combos().iter().any(|c| c.is_subset(&self.maker))
    }

    pub fn legal_moves(&self) -> SquareSet {
        self.hypergraph
            .squares()
            .iter()
            .filter(|s| !self.is_claimed(s))
            .cloned()
            .collect()
    }

    /// Claims `sq` for the side to move and passes the turn.
    pub fn apply_move(&self, sq: &Square) -> Result<Position> {
        if !self.hypergraph.squares().contains(sq) {
            return Err(Error::InvalidMove(format!("unknown square {sq}")));
        }
        if self.is_claimed(sq) {
            return Err(Error::InvalidMove(format!("square {sq} is already claimed")));
        }
        let mut next = self.clone();
        match self.to_move {
            Turn::Maker => next.maker.insert(sq.clone()),
            Turn::Breaker => next.breaker.insert(sq.clone()),
        };
        next.to_move = self.to_move.other();
        Ok(next)
    }

    /// The game this position reduces to.
    pub fn reduce(&self) -> GameSpec {
        reduce_position(self)
    }
}

/// `(X \ (X_M ∪ X_B), {F \ X_M : F not broken}, t)`.
///
/// A combination Maker has completed survives as the empty set.
pub fn reduce_position(p: &Position) -> GameSpec {
    let squares = p.legal_moves();
    let combos = p
        .hypergraph
        .combos()
        .iter()
        .filter(|c| c.is_disjoint(&p.breaker))
        .map(|c| c.difference(&p.maker).cloned().collect())
        .collect();
    GameSpec {
        hypergraph: Hypergraph::from_parts_unchecked(squares, combos),
        to_move: p.to_move,
    }
}

pub fn detect_mate_in_one(g: &GameSpec) -> SquareSet {
    g.hypergraph
        .combos()
        .iter()
        .filter(|c| c.len() == 1)
        .flatten()
        .cloned()
        .collect()
}

/// A double threat: combinations `{pivot, q}` and `{pivot, r}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MateInTwo {
    pub pivot: Square,
    pub wings: SquareSet,
}

impl MateInTwo {
    /// The three squares Breaker may claim to stop this threat.
    pub fn stoppers(&self) -> SquareSet {
        let mut s = self.wings.clone();
        s.insert(self.pivot.clone());
        s
    }
}

/// Every `(p, {q, r})` with `{p,q}, {p,r}` combinations and `p, q, r` distinct.
pub fn detect_mate_in_two(g: &GameSpec) -> Vec<MateInTwo> {
    let mut partners: BTreeMap<&Square, Vec<&Square>> = BTreeMap::new();
    for combo in g.hypergraph.combos().iter().filter(|c| c.len() == 2) {
        let mut it = combo.iter();
        let (a, b) = (it.next().unwrap(), it.next().unwrap());
        partners.entry(a).or_default().push(b);
        partners.entry(b).or_default().push(a);
    }
    let mut out = Vec::new();
    for (pivot, ps) in partners {
        for i in 0..ps.len() {
            for j in i + 1..ps.len() {
                out.push(MateInTwo {
                    pivot: pivot.clone(),
                    wings: [ps[i].clone(), ps[j].clone()].into_iter().collect(),
                });
            }
        }
    }
    out.sort();
    out
}

/// A collection of pairwise disjoint two-element square sets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Pairing {
    pairs: BTreeSet<(Square, Square)>,
}

/// Breaker's answer under a pairing strategy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairingReply {
    Partner(Square),
    FreeChoice,
}

impl Pairing {
    pub fn new() -> Self {
        Pairing::default()
    }

    /// Builds a pairing, rejecting overlapping or degenerate pairs.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Square, Square)>,
    {
        let mut p = Pairing::new();
        for (a, b) in pairs {
            p.insert(a, b)?;
        }
        Ok(p)
    }

    /// Adds `{a, b}`. Re-adding an existing pair is a no-op; touching a
    /// square that is already covered by a different pair is an error.
    pub fn insert(&mut self, a: Square, b: Square) -> Result<()> {
        if a == b {
            return Err(Error::InvalidArgument(format!("degenerate pair {{{a}}}")));
        }
        let pair = if a < b { (a, b) } else { (b, a) };
        if self.pairs.contains(&pair) {
            return Ok(());
        }
        for sq in [&pair.0, &pair.1] {
            if let Some(q) = self.partner(sq) {
                return Err(Error::InvalidArgument(format!("square {sq} already paired with {q}")));
            }
        }
        self.pairs.insert(pair);
        Ok(())
    }

    pub fn remove_touching(&mut self, sq: &Square) {
        self.pairs.retain(|(a, b)| a != sq && b != sq);
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Square, &Square)> {
        self.pairs.iter().map(|(a, b)| (a, b))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains_pair(&self, a: &Square, b: &Square) -> bool {
        let key = if a < b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        self.pairs.contains(&key)
    }

    pub fn partner(&self, sq: &Square) -> Option<&Square> {
        self.pairs.iter().find_map(|(a, b)| {
            if a == sq {
                Some(b)
            } else if b == sq {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn covered(&self) -> SquareSet {
        self.pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect()
    }

    pub fn blocks(&self, combo: &SquareSet) -> bool {
        self.pairs.iter().any(|(a, b)| combo.contains(a) && combo.contains(b))
    }

    /// Blocks every combination of `g` and stays inside its squares.
    pub fn is_complete_for(&self, g: &GameSpec) -> bool {
        self.covered().is_subset(g.hypergraph.squares()) && g.hypergraph.combos().iter().all(|c| self.blocks(c))
    }

    /// Breaker's pairing-strategy response to Maker claiming `maker_move`.
    pub fn strategy_reply(&self, maker_move: &Square, claimed: &SquareSet) -> PairingReply {
        match self.partner(maker_move) {
            Some(q) if !claimed.contains(q) => PairingReply::Partner(q.clone()),
            _ => PairingReply::FreeChoice,
        }
    }

    pub fn union(&self, other: &Pairing) -> Result<Pairing> {
        let mut out = self.clone();
        for (a, b) in other.pairs() {
            out.insert(a.clone(), b.clone())?;
        }
        Ok(out)
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(a, b)| format!("{{{a},{b}}}")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

pub fn pairing_blocks(c: &Pairing, combo: &SquareSet) -> bool {
    c.blocks(combo)
}

pub fn is_complete_pairing(c: &Pairing, g: &GameSpec) -> bool {
    c.is_complete_for(g)
}

pub(crate) fn fmt_set(s: &SquareSet) -> String {
    let names: Vec<&str> = s.iter().map(Square::name).collect();
    format!("{{{}}}", names.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Hypergraph {
        Hypergraph::from_combos((1..=n - 2).map(|k| squares([k, k + 1, k + 2].map(|i| i.to_string())))).unwrap()
    }

    fn tic_tac_toe() -> Hypergraph {
        let lines = [
            [1, 2, 3],
            [4, 5, 6],
            [7, 8, 9],
            [1, 4, 7],
            [2, 5, 8],
            [3, 6, 9],
            [1, 5, 9],
            [3, 5, 7],
        ];
        Hypergraph::from_combos(lines.iter().map(|l| squares(l.map(|i| i.to_string())))).unwrap()
    }

    fn s(name: &str) -> Square {
        Square::new(name)
    }

    #[test]
    fn rank_examples() {
        assert_eq!(path(5).rank(), 3);
        assert_eq!(tic_tac_toe().rank(), 3);
        assert_eq!(Hypergraph::default().rank(), 0);
    }

    #[test]
    fn hypergraph_rejects_foreign_squares() {
        let err = Hypergraph::new(squares(["a"]), [squares(["a", "b"])]).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
        assert!(Hypergraph::new(squares(["a"]), [SquareSet::new()]).is_err());
    }

    #[test]
    fn broken_combinations() {
        let g = GameSpec::new(tic_tac_toe(), Turn::Maker);
        let p = Position::start(&g)
            .apply_move(&s("1"))
            .unwrap()
            .apply_move(&s("5"))
            .unwrap();
        assert!(p.is_broken(&squares(["4", "5", "6"])).unwrap());
        assert!(!p.is_broken(&squares(["1", "2", "3"])).unwrap());
        assert!(!Position::start(&g).is_broken(&squares(["1", "2", "3"])).unwrap());
        assert!(p.is_broken(&squares(["1", "2"])).is_err());
    }

    #[test]
    fn tic_tac_toe_reduction() {
        let g = GameSpec::new(tic_tac_toe(), Turn::Maker);
        let p = Position::start(&g);
        let p = ["1", "5", "9"].iter().fold(p, |p, m| p.apply_move(&s(m)).unwrap());
        assert_eq!(p.legal_moves().len(), 6);
        let r = p.reduce();
        assert_eq!(r.to_move, Turn::Breaker);
        let expected: BTreeSet<SquareSet> = [["2", "3"], ["7", "8"], ["4", "7"], ["3", "6"]]
            .iter()
            .map(|c| squares(*c))
            .collect();
        assert_eq!(r.hypergraph.combos(), &expected);
        assert_eq!(r.hypergraph.squares(), &squares(["2", "3", "4", "6", "7", "8"]));
        let threats = r.mate_in_two();
        assert_eq!(
            threats,
            vec![
                MateInTwo {
                    pivot: s("3"),
                    wings: squares(["2", "6"])
                },
                MateInTwo {
                    pivot: s("7"),
                    wings: squares(["4", "8"])
                },
            ]
        );
        assert!(r.mate_in_one().is_empty());
    }

    #[test]
    fn reduction_of_fresh_position_is_identity() {
        let g = GameSpec::new(path(6), Turn::Maker);
        assert_eq!(Position::start(&g).reduce(), g);
    }

    #[test]
    fn completed_combo_survives_as_empty() {
        let g = GameSpec::new(Hypergraph::from_combos([squares(["a"])]).unwrap(), Turn::Maker);
        let p = Position::start(&g).apply_move(&s("a")).unwrap();
        assert!(p.maker_has_won());
        assert!(p.reduce().hypergraph.has_empty_combo());
    }

    #[test]
    fn apply_move_rejects_claimed_square() {
        let g = GameSpec::new(tic_tac_toe(), Turn::Maker);
        let p = Position::start(&g).apply_move(&s("1")).unwrap();
        assert!(matches!(p.apply_move(&s("1")), Err(Error::InvalidMove(_))));
        assert!(matches!(p.apply_move(&s("10")), Err(Error::InvalidMove(_))));
        assert_eq!(Position::start(&g).legal_moves().len(), 9);
    }

    #[test]
    fn mate_detection() {
        let g = GameSpec::new(
            Hypergraph::from_combos([squares(["p"]), squares(["a", "b"])]).unwrap(),
            Turn::Breaker,
        );
        assert_eq!(g.mate_in_one(), squares(["p"]));
        assert!(g.mate_in_two().is_empty());
        let g = GameSpec::new(Hypergraph::from_combos([squares(["a", "b"])]).unwrap(), Turn::Breaker);
        assert!(g.mate_in_one().is_empty());
        let g = GameSpec::new(
            Hypergraph::from_combos([squares(["7", "8"]), squares(["4", "7"])]).unwrap(),
            Turn::Breaker,
        );
        assert_eq!(
            g.mate_in_two(),
            vec![MateInTwo {
                pivot: s("7"),
                wings: squares(["4", "8"])
            }]
        );
    }

    #[test]
    fn pairing_path_family() {
        let c5 = Pairing::from_pairs([(s("1"), s("2")), (s("3"), s("4"))]).unwrap();
        assert!(c5.blocks(&squares(["2", "3", "4"])));
        assert!(!c5.blocks(&squares(["1", "3", "5"])));
        assert!(!Pairing::new().blocks(&squares(["1", "2", "3"])));
        let g = GameSpec::new(path(5), Turn::Maker);
        assert!(c5.is_complete_for(&g));
        assert!(!Pairing::new().is_complete_for(&g));
    }

    #[test]
    fn pairing_rejects_overlap() {
        let mut c = Pairing::new();
        c.insert(s("a"), s("b")).unwrap();
        c.insert(s("b"), s("a")).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c.insert(s("b"), s("c")).is_err());
        assert!(c.insert(s("d"), s("d")).is_err());
    }

    #[test]
    fn pairing_strategy_replies() {
        let c = Pairing::from_pairs([(s("1"), s("2"))]).unwrap();
        assert_eq!(
            c.strategy_reply(&s("1"), &squares(["1"])),
            PairingReply::Partner(s("2"))
        );
        assert_eq!(c.strategy_reply(&s("3"), &squares(["3"])), PairingReply::FreeChoice);
        assert_eq!(
            c.strategy_reply(&s("1"), &squares(["1", "2"])),
            PairingReply::FreeChoice
        );
    }

    #[test]
    fn components() {
        assert_eq!(path(5).connected_components().len(), 1);
        let doubled = Hypergraph::from_combos([
            squares(["a", "b", "c"]),
            squares(["b", "c", "d"]),
            squares(["x", "y", "z"]),
        ])
        .unwrap();
        let comps = doubled.connected_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[1].squares(), &squares(["x", "y", "z"]));
        let isolated = Hypergraph::new(squares(["a", "b", "q"]), [squares(["a", "b"])]).unwrap();
        let comps = isolated.connected_components();
        assert_eq!(comps.len(), 2);
        assert!(comps[1].combos().is_empty());
    }

    #[test]
    fn alternation_validator() {
        let g = GameSpec::new(path(5), Turn::Maker);
        let p = Position::start(&g).apply_move(&s("1")).unwrap();
        assert!(p.alternation_is_consistent());
        let artificial = Position::new(
            Arc::new(path(5)),
            squares(["1", "2", "3"]),
            SquareSet::new(),
            Turn::Maker,
        )
        .unwrap();
        assert!(!artificial.alternation_is_consistent());
    }
}
