//! Regular play in the associated game, the pairings that refute deviations
//! from it, and the sweeps that check both over every line of play.

mod pieces;
mod verify;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gadgets::{GadgetSpec, Variant};
use crate::geography::{Edge, Vertex, VertexClass};
use crate::hypergraph::{Pairing, PairingReply, Position, Square, SquareSet, Turn};
use crate::reduction::AssociatedGame;

pub use pieces::{breaker_reply_to_deviation, puzzle_piece_pairing, union_pairing, PuzzlePiecePairing};
pub use verify::{
    check_invariants, reachable_states, simulate_theorem4, verify_lemma5, verify_lemma8, InvariantReport, Lemma5Report,
    Lemma8Report, Theorem4Outcome,
};

/// One activation of a vertex. `variant` is `None` until the choosing
/// player has picked a line of play.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Activation {
    pub vertex: Vertex,
    pub via: Option<Edge>,
    pub variant: Option<Variant>,
    pub revisit: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FinishReason {
    MakerWonM21,
    BreakerPairingB21,
}

impl fmt::Display for FinishReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FinishReason::MakerWonM21 => "maker-won-M21",
            FinishReason::BreakerPairingB21 => "breaker-pairing-B21",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    Activate {
        vertex: Vertex,
        via: Option<Edge>,
        /// `None` on a second activation.
        variant: Option<Variant>,
    },
    Move {
        n: usize,
        mover: Turn,
        square: Square,
        regular: bool,
    },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Activate { vertex, via, variant } => {
                let via = via.as_ref().map_or("start".to_string(), Edge::to_string);
                let variant = variant.map_or("revisit", Variant::key);
                write!(f, "activate {vertex} via {via} variant {variant}")
            }
            TraceEvent::Move {
                n,
                mover,
                square,
                regular,
            } => {
                let kind = if *regular { "regular" } else { "deviation" };
                write!(f, "move {n} {mover} {square} {kind}")
            }
        }
    }
}

impl FromStr for TraceEvent {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let t: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::InvalidArgument(format!("malformed trace line `{line}`"));
        match t.as_slice() {
            ["activate", v, "via", via, "variant", variant] => {
                let via = match *via {
                    "start" => None,
                    arc => {
                        let (a, b) = arc.split_once("->").ok_or_else(bad)?;
                        Some(Edge::new(a, b))
                    }
                };
                let variant = match *variant {
                    "revisit" => None,
                    key => Some(key.parse()?),
                };
                Ok(TraceEvent::Activate {
                    vertex: Vertex::new(v),
                    via,
                    variant,
                })
            }
            ["move", n, mover, square, kind] => Ok(TraceEvent::Move {
                n: n.parse().map_err(|_| bad())?,
                mover: Turn::from_keyword(mover).ok_or_else(bad)?,
                square: Square::new(square),
                regular: match *kind {
                    "regular" => true,
                    "deviation" => false,
                    _ => return Err(bad()),
                },
            }),
            _ => Err(bad()),
        }
    }
}

/// Regular play in progress.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularPlayState {
    pub position: Position,
    pub active: Option<Vertex>,
    pub history: Vec<Activation>,
    /// Index into the active vertex's sequence.
    pub cursor: usize,
    pub finished: Option<FinishReason>,
    pub trace: Vec<TraceEvent>,
}

impl RegularPlayState {
    /// The fresh game with the start vertex active.
    pub fn new(g: &AssociatedGame) -> Self {
        let s = g.instance.start().clone();
        let mut st = RegularPlayState {
            position: g.start_position(),
            active: None,
            history: Vec::new(),
            cursor: 0,
            finished: None,
            trace: Vec::new(),
        };
        st.activate(g, s, None);
        st
    }

    pub fn current(&self) -> Option<&Activation> {
        self.active.as_ref().and(self.history.last())
    }

    /// Vertices activated before the current activation.
    pub fn previously_active(&self) -> impl Iterator<Item = &Vertex> {
        let n = self.history.len().saturating_sub(1);
        self.history[..n].iter().map(|a| &a.vertex)
    }

    pub fn was_active(&self, v: &Vertex) -> bool {
        self.history.iter().any(|a| a.vertex == *v)
    }

    /// A choice must accompany the next step.
    pub fn needs_choice(&self, g: &AssociatedGame) -> bool {
        self.current()
            .is_some_and(|a| !a.revisit && a.variant.is_none() && self.cursor == 0 && is_choice_class(g, &a.vertex))
    }

    /// Waiting for Maker's winning claim in a re-entered two-input gadget.
    pub fn is_revisit(&self) -> bool {
        self.current().is_some_and(|a| a.revisit)
    }

    fn activate(&mut self, g: &AssociatedGame, v: Vertex, via: Option<Edge>) {
        let class = g.map.class(&v).expect("vertex of the instance");
        let revisit = self.was_active(&v);
        self.cursor = 0;
        let variant = if revisit {
            None
        } else {
            match class {
                VertexClass::M12 | VertexClass::B12 => None,
                VertexClass::N11 | VertexClass::B01 => Some(Variant::Only),
                VertexClass::M21 | VertexClass::B21 => {
                    let role = via.as_ref().and_then(|e| g.map.role_of_arc(&v, e));
                    Some(if role == Some('b') {
                        Variant::EnterB
                    } else {
                        Variant::EnterA
                    })
                }
            }
        };
        if variant.is_some() || revisit {
            self.trace.push(TraceEvent::Activate {
                vertex: v.clone(),
                via: via.clone(),
                variant,
            });
        }
        self.history.push(Activation {
            vertex: v.clone(),
            via,
            variant,
            revisit,
        });
        self.active = Some(v);
        if revisit && class == VertexClass::B21 {
            self.active = None;
            self.finished = Some(FinishReason::BreakerPairingB21);
        }
    }

    fn record(&mut self, mover: Turn, square: Square, regular: bool) -> Result<()> {
        self.position = self.position.apply_move(&square)?;
        let n = self
            .trace
            .iter()
            .filter(|e| matches!(e, TraceEvent::Move { .. }))
            .count()
            + 1;
        self.trace.push(TraceEvent::Move {
            n,
            mover,
            square,
            regular,
        });
        Ok(())
    }

    pub fn trace_text(&self) -> String {
        self.trace.iter().map(|e| format!("{e}\n")).collect()
    }
}

fn is_choice_class(g: &AssociatedGame, v: &Vertex) -> bool {
    matches!(g.map.class(v), Some(VertexClass::M12 | VertexClass::B12))
}

fn gadget<'a>(g: &'a AssociatedGame, v: &Vertex) -> &'a GadgetSpec {
    g.gadget(v).expect("vertex of the instance")
}

fn to_global(g: &AssociatedGame, v: &Vertex, local: &Square) -> Square {
    g.map.global(v, local).expect("local square of the gadget").clone()
}

/// Maker's winning claim on re-entering a two-input gadget: the interior
/// completing the combination that holds both joints of `via` and both
/// output joints.
fn revisit_square(g: &AssociatedGame, v: &Vertex, via: &Edge) -> Result<Square> {
    let spec = gadget(g, v);
    let (p, q) = g.map.joint(via).expect("arc of the instance");
    let out = g.map.arc_of_role(v, 'c').expect("output port");
    let (pc, qc) = g.map.joint(out).expect("arc of the instance");
    let need: SquareSet = [p, q, pc, qc].into_iter().cloned().collect();
    g.map
        .vertex_combos(v)
        .iter()
        .filter(|c| need.is_subset(c) && c.len() == 5)
        .flat_map(|c| c.difference(&need))
        .find(|x| g.map.local(v, x).is_some_and(|l| spec.is_interior(l)))
        .cloned()
        .ok_or_else(|| Error::Protocol(format!("no re-entry combination at {v}")))
}

/// The variant leaving `v` along the arc to `w`.
pub fn variant_towards(g: &AssociatedGame, v: &Vertex, w: &Vertex) -> Result<Variant> {
    match g.map.role_of_arc(v, &Edge::new(v.clone(), w.clone())) {
        Some('b') if is_choice_class(g, v) => Ok(Variant::ChooseB),
        Some('c') if is_choice_class(g, v) => Ok(Variant::ChooseC),
        _ => Err(Error::InvalidArgument(format!("{w} is not a choice of {v}"))),
    }
}

/// The squares Maker would claim next under regular play: two at a
/// two-choice Maker gadget before the choice, otherwise one.
pub fn regular_squares(g: &AssociatedGame, st: &RegularPlayState) -> Result<SquareSet> {
    let act = st.current().ok_or_else(|| Error::Protocol("no active vertex".into()))?;
    let v = &act.vertex;
    if act.revisit {
        let via = act.via.as_ref().expect("re-entry arc");
        return Ok([revisit_square(g, v, via)?].into());
    }
    let spec = gadget(g, v);
    let variants: Vec<Variant> = match act.variant {
        Some(variant) => vec![variant],
        None => spec.sequences.keys().copied().collect(),
    };
    Ok(variants
        .iter()
        .map(|var| to_global(g, v, &spec.sequences[var][st.cursor].square))
        .collect())
}

/// Advances regular play by one move. `choice` must be given exactly when
/// [`RegularPlayState::needs_choice`] holds.
pub fn regular_step(
    g: &AssociatedGame,
    st: &RegularPlayState,
    choice: Option<Variant>,
) -> Result<(Square, RegularPlayState)> {
    if let Some(why) = st.finished {
        return Err(Error::Protocol(format!("regular play is over ({why})")));
    }
    let needs = st.needs_choice(g);
    match (needs, choice) {
        (true, None) => return Err(Error::Protocol("a line of play must be chosen here".into())),
        (false, Some(c)) => return Err(Error::Protocol(format!("no choice expected here, got {c}"))),
        _ => {}
    }
    let mut next = st.clone();
    let act = next.current().expect("active vertex").clone();
    let v = act.vertex.clone();
    if act.revisit {
        let x = revisit_square(g, &v, act.via.as_ref().expect("re-entry arc"))?;
        next.record(Turn::Maker, x.clone(), true)?;
        next.active = None;
        next.finished = Some(FinishReason::MakerWonM21);
        return Ok((x, next));
    }
    let spec = gadget(g, &v);
    let variant = match choice {
        Some(c) => {
            if !spec.sequences.contains_key(&c) {
                return Err(Error::Protocol(format!("{c} is not a line of play at {v}")));
            }
            let last = next.history.last_mut().expect("activation");
            last.variant = Some(c);
            next.trace.push(TraceEvent::Activate {
                vertex: v.clone(),
                via: act.via.clone(),
                variant: Some(c),
            });
            c
        }
        None => act.variant.expect("variant fixed at activation"),
    };
    let seq = &spec.sequences[&variant];
    let step = &seq[next.cursor];
    let square = to_global(g, &v, &step.square);
    if next.position.to_move() != step.mover {
        return Err(Error::Protocol(format!(
            "{} to move, sequence expects {}",
            next.position.to_move(),
            step.mover
        )));
    }
    next.record(step.mover, square.clone(), true)?;
    next.cursor += 1;
    if next.cursor == seq.len() {
        let role = variant.exit_role(spec.class);
        let e = g.map.arc_of_role(&v, role).expect("exit port").clone();
        let w = e.to.clone();
        next.activate(g, w, Some(e));
    }
    Ok((square, next))
}

/// Runs regular play to its end. `choose` is asked at every choice point.
pub fn run_regular(
    g: &AssociatedGame,
    mut choose: impl FnMut(&RegularPlayState) -> Result<Variant>,
) -> Result<RegularPlayState> {
    let mut st = RegularPlayState::new(g);
    while st.finished.is_none() {
        let choice = if st.needs_choice(g) { Some(choose(&st)?) } else { None };
        st = regular_step(g, &st, choice)?.1;
    }
    Ok(st)
}

/// After regular play ends with a re-entered B21 gadget: every arc whose
/// joints are both unclaimed contributes its joint pair.
pub fn lemma3_pairing(g: &AssociatedGame, p: &Position) -> Pairing {
    Pairing::from_pairs(
        g.map
            .joints()
            .filter(|(_, a, b)| p.is_unclaimed(a) && p.is_unclaimed(b))
            .map(|(_, a, b)| (a.clone(), b.clone())),
    )
    .expect("joint squares are distinct")
}

/// Plays `p` out to the end with Breaker answering by `pairing` and Maker
/// picking with `maker`. When Maker's move leaves the partner claimed,
/// Breaker takes the smallest unclaimed square.
pub fn play_out_with_pairing(
    p: &Position,
    pairing: &Pairing,
    mut maker: impl FnMut(&Position) -> Square,
) -> Result<Position> {
    let mut p = p.clone();
    while !p.maker_has_won() && !p.legal_moves().is_empty() {
        let sq = match p.to_move() {
            Turn::Maker => maker(&p),
            Turn::Breaker => {
                let last = p
                    .maker_set()
                    .iter()
                    .find(|s| pairing.partner(s).is_some_and(|q| p.is_unclaimed(q)));
                let claimed: SquareSet = p.maker_set().union(p.breaker_set()).cloned().collect();
                match last.map(|s| pairing.strategy_reply(s, &claimed)) {
                    Some(PairingReply::Partner(q)) => q,
                    _ => p.legal_moves().into_iter().next().expect("unclaimed square"),
                }
            }
        };
        p = p.apply_move(&sq)?;
    }
    Ok(p)
}

/// What a replayed trace amounts to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplayOutcome {
    pub position: Position,
    pub moves: usize,
    /// Number of the first move marked `deviation`.
    pub first_deviation: Option<usize>,
    pub finished: Option<FinishReason>,
}

impl ReplayOutcome {
    /// `Some` once the game is decided: Maker owns a combination, or every
    /// combination is broken.
    pub fn winner(&self) -> Option<Turn> {
        if self.position.maker_has_won() {
            Some(Turn::Maker)
        } else if self.position.reduce().hypergraph.combos().is_empty() {
            Some(Turn::Breaker)
        } else {
            None
        }
    }
}

/// Replays a trace. Everything up to the first deviation must be exactly
/// what regular play produces under the choices named in the `activate`
/// lines; later moves only need to be legal.
pub fn replay_trace(g: &AssociatedGame, src: &str) -> Result<ReplayOutcome> {
    let mut events = Vec::new();
    for (i, line) in src.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let e: TraceEvent = line.parse().map_err(|e: Error| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        events.push((i + 1, e));
    }
    let first_deviation = events.iter().find_map(|(_, e)| match e {
        TraceEvent::Move { n, regular: false, .. } => Some(*n),
        _ => None,
    });
    let mut choices = events.iter().filter_map(|(_, e)| match e {
        TraceEvent::Activate {
            variant: Some(v @ (Variant::ChooseB | Variant::ChooseC)),
            ..
        } => Some(*v),
        _ => None,
    });
    let regular_prefix = events
        .iter()
        .take_while(|(_, e)| !matches!(e, TraceEvent::Move { regular: false, .. }))
        .count();
    let wanted_moves = events[..regular_prefix]
        .iter()
        .filter(|(_, e)| matches!(e, TraceEvent::Move { .. }))
        .count();

    let mut st = RegularPlayState::new(g);
    let mut made = 0;
    while made < wanted_moves && st.finished.is_none() {
        let choice = if st.needs_choice(g) {
            Some(
                choices
                    .next()
                    .ok_or_else(|| Error::Protocol("trace names too few choices".into()))?,
            )
        } else {
            None
        };
        st = regular_step(g, &st, choice)?.1;
        made += 1;
    }
    let engine = &st.trace;
    let mut pos = st.position.clone();
    let mut k = 0;
    for (line, e) in &events {
        if k < engine.len() {
            if *e != engine[k] {
                return Err(Error::Mismatch(format!(
                    "line {line}: expected `{}`, found `{e}`",
                    engine[k]
                )));
            }
            k += 1;
            continue;
        }
        match e {
            TraceEvent::Activate { .. } if first_deviation.is_none() && st.finished.is_none() => {
                return Err(Error::Mismatch(format!("line {line}: unexpected activation")));
            }
            TraceEvent::Activate { .. } => {}
            TraceEvent::Move { n, mover, square, .. } => {
                let expected_n = pos.maker_set().len() + pos.breaker_set().len() + 1;
                if *n != expected_n || *mover != pos.to_move() {
                    return Err(Error::Mismatch(format!(
                        "line {line}: expected move {expected_n} by {}",
                        pos.to_move()
                    )));
                }
                pos = pos
                    .apply_move(square)
                    .map_err(|err| Error::Mismatch(format!("line {line}: {err}")))?;
            }
        }
    }
    let moves = pos.maker_set().len() + pos.breaker_set().len();
    Ok(ReplayOutcome {
        position: pos,
        moves,
        first_deviation,
        finished: st.finished,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::GadgetLibrary;
    use crate::geography::GgInstance;
    use crate::reduction::build_associated_game;

    pub(crate) fn game(arcs: &[(&str, &str)]) -> AssociatedGame {
        let inst = GgInstance::from_arcs("s", arcs.iter().copied()).unwrap();
        build_associated_game(&inst, &GadgetLibrary::builtin()).unwrap()
    }

    #[test]
    fn first_move_claims_the_start_joint() {
        let g = game(&[("s", "v"), ("v", "w"), ("w", "v")]);
        let (sq, _) = regular_step(&g, &RegularPlayState::new(&g), None).unwrap();
        assert_eq!(sq.name(), "s->v#p");
    }

    #[test]
    fn two_cycle_ends_with_maker_completing_the_reentry_combo() {
        let g = game(&[("s", "v"), ("v", "w"), ("w", "v")]);
        let st = run_regular(&g, |_| unreachable!()).unwrap();
        assert_eq!(st.finished, Some(FinishReason::MakerWonM21));
        assert!(st.position.maker_has_won());
        let TraceEvent::Move { square, mover, .. } = st.trace.last().unwrap() else {
            panic!()
        };
        assert_eq!((square.name(), *mover), ("v.x3", Turn::Maker));
    }

    #[test]
    fn b21_reentry_hands_over_to_a_pairing() {
        let g = game(&[("s", "v"), ("v", "w"), ("w", "x"), ("x", "w")]);
        let st = run_regular(&g, |_| unreachable!()).unwrap();
        assert_eq!(st.finished, Some(FinishReason::BreakerPairingB21));
        let c = lemma3_pairing(&g, &st.position);
        assert!(c.is_complete_for(&st.position.reduce()), "{c}");
        let end =
            play_out_with_pairing(&st.position, &c, |p| p.legal_moves().into_iter().next_back().unwrap()).unwrap();
        assert!(!end.maker_has_won());
    }

    #[test]
    fn choices_are_policed() {
        let g = game(&[
            ("s", "v"),
            ("v", "w1"),
            ("v", "w2"),
            ("w1", "x"),
            ("w2", "x"),
            ("x", "w1"),
        ]);
        let mut st = RegularPlayState::new(&g);
        for _ in 0..4 {
            assert!(matches!(
                regular_step(&g, &st, Some(Variant::ChooseB)),
                Err(Error::Protocol(_))
            ));
            st = regular_step(&g, &st, None).unwrap().1;
        }
        assert!(st.needs_choice(&g));
        assert!(matches!(regular_step(&g, &st, None), Err(Error::Protocol(_))));
        assert_eq!(regular_squares(&g, &st).unwrap().len(), 2);
    }

    #[test]
    fn trace_lines_round_trip() {
        let g = game(&[("s", "v"), ("v", "w"), ("w", "v")]);
        let st = run_regular(&g, |_| unreachable!()).unwrap();
        assert_eq!(st.trace[0].to_string(), "activate s via start variant only");
        assert_eq!(st.trace[1].to_string(), "move 1 maker s->v#p regular");
        for e in &st.trace {
            assert_eq!(e.to_string().parse::<TraceEvent>().unwrap(), *e);
        }
        assert!(st.trace_text().contains("activate v via w->v variant revisit"));
    }

    #[test]
    fn replay_accepts_regular_traces_and_tails() {
        let g = game(&[("s", "v"), ("v", "w"), ("w", "v")]);
        let st = run_regular(&g, |_| unreachable!()).unwrap();
        let out = replay_trace(&g, &st.trace_text()).unwrap();
        assert_eq!(out.winner(), Some(Turn::Maker));
        assert_eq!(out.moves, 13);

        let head: String = st.trace_text().lines().take(3).map(|l| format!("{l}\n")).collect();
        let out = replay_trace(
            &g,
            &format!("{head}move 3 maker s.x2 deviation\nmove 4 breaker s->v#q regular\n"),
        )
        .unwrap();
        assert_eq!(out.first_deviation, Some(3));
        assert_eq!(out.moves, 4);

        let wrong = head.replace("s.x1", "s.x2");
        assert!(matches!(replay_trace(&g, &wrong), Err(Error::Mismatch(_))));
        assert!(matches!(
            replay_trace(&g, "move one\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
