//! Sweeps over every line of regular play.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;

use super::{
    breaker_reply_to_deviation, gadget, lemma3_pairing, regular_squares, regular_step, revisit_square, to_global,
    variant_towards, FinishReason, RegularPlayState, TraceEvent,
};
use crate::error::{Error, Result};
use crate::geography::{bipartition_from_start, gg_loser_on_move, GgState, Player, Ruleset, Side, Vertex, VertexClass};
use crate::hypergraph::{detect_mate_in_one, detect_mate_in_two, Position, SquareSet, Turn};
use crate::reduction::AssociatedGame;
use crate::solver::{solve_position_with, SolveLimits, SolveOptions};

/// Every state regular play can reach, over all choices, in depth-first
/// order. Finished states are included.
pub fn reachable_states(g: &AssociatedGame) -> Result<Vec<RegularPlayState>> {
    let mut out = Vec::new();
    let mut stack = vec![RegularPlayState::new(g)];
    while let Some(st) = stack.pop() {
        if st.finished.is_none() {
            if st.needs_choice(g) {
                let v = &st.current().expect("active").vertex;
                for &c in gadget(g, v).sequences.keys().rev() {
                    stack.push(regular_step(g, &st, Some(c))?.1);
                }
            } else {
                stack.push(regular_step(g, &st, None)?.1);
            }
        }
        out.push(st);
    }
    Ok(out)
}

fn position_key(p: &Position) -> (SquareSet, SquareSet) {
    (p.maker_set().clone(), p.breaker_set().clone())
}

/// Distinct positions among `states`, keeping the first state reaching each.
fn distinct<'a>(states: impl Iterator<Item = &'a RegularPlayState>) -> Vec<&'a RegularPlayState> {
    let mut seen = BTreeSet::new();
    states.filter(|s| seen.insert(position_key(&s.position))).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InvariantReport {
    pub violations: Vec<String>,
}

impl InvariantReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// The four invariants of regular play, checked on `st`. The first covers
/// every move in the trace; the others need an active vertex.
pub fn check_invariants(g: &AssociatedGame, st: &RegularPlayState) -> InvariantReport {
    let mut violations = Vec::new();

    let mut current: Option<&Vertex> = None;
    for e in &st.trace {
        match e {
            TraceEvent::Activate { vertex, .. } => current = Some(vertex),
            TraceEvent::Move { n, mover, square, .. } => {
                let Some(v) = current else {
                    violations.push(format!("1: move {n} before any activation"));
                    continue;
                };
                let spec = gadget(g, v);
                let local = g.map.local(v, square);
                let ok = local.is_some_and(|l| match mover {
                    Turn::Maker => spec.is_interior(l) || spec.is_output(l),
                    Turn::Breaker => spec.is_interior(l),
                });
                if !ok {
                    violations.push(format!("1: move {n}: {mover} claims {square}, not allowed at {v}"));
                }
            }
        }
    }

    let Some(v) = st.active.as_ref() else {
        return InvariantReport { violations };
    };
    let p = &st.position;
    let earlier: BTreeSet<&Vertex> = st.previously_active().filter(|u| *u != v).collect();
    for w in g.map.vertices() {
        if st.was_active(w) {
            continue;
        }
        let arc = crate::geography::Edge::new(v.clone(), w.clone());
        let entered = g.map.joint(&arc);
        for sq in g.map.vertex_squares(w) {
            if p.is_unclaimed(&sq) {
                continue;
            }
            let allowed = entered.is_some_and(|(a, b)| (sq == *a || sq == *b) && p.maker_set().contains(&sq));
            if !allowed {
                violations.push(format!("2: {sq} of never-active {w} is claimed"));
            }
        }
    }
    for u in earlier {
        let live = super::pieces::residual(g, u, p);
        if g.map.class(u) != Some(VertexClass::M21) {
            if let Some(f) = live.first() {
                violations.push(format!(
                    "3: {u} keeps live combination {}",
                    crate::hypergraph::fmt_set(f)
                ));
            }
            continue;
        }
        if let Err(why) = check_waiting(g, st, u, &live) {
            violations.push(format!("4: {u}: {why}"));
        }
    }
    InvariantReport { violations }
}

/// A spent two-input Maker gadget must be down to one live combination:
/// the joints of its unused input plus one interior. Joints of that input
/// may already be Maker's when the active vertex is its tail.
fn check_waiting(g: &AssociatedGame, st: &RegularPlayState, u: &Vertex, live: &[SquareSet]) -> Result<(), String> {
    let p = &st.position;
    let entry = st
        .history
        .iter()
        .find(|a| a.vertex == *u)
        .and_then(|a| a.via.clone())
        .ok_or("no entry arc")?;
    let spare = g
        .instance
        .graph()
        .in_edges(u)
        .find(|e| **e != entry)
        .ok_or("one input only")?
        .clone();
    let (pe, qe) = g.map.joint(&spare).expect("arc");
    let [f] = live else {
        return Err(format!("{} live combinations", live.len()));
    };
    let unclaimed: SquareSet = g
        .map
        .vertex_squares(u)
        .into_iter()
        .filter(|s| p.is_unclaimed(s))
        .collect();
    if unclaimed != *f {
        return Err("unclaimed squares differ from the live combination".into());
    }
    let mut full = f.clone();
    for j in [pe, qe] {
        if !p.is_unclaimed(j) {
            if !p.maker_set().contains(j) || st.active.as_ref() != Some(&spare.from) {
                return Err(format!("{j} claimed"));
            }
            full.insert(j.clone());
        }
    }
    let spec = gadget(g, u);
    let interiors = full
        .iter()
        .filter(|s| g.map.local(u, s).is_some_and(|l| spec.is_interior(l)))
        .count();
    if full.len() != 3 || !full.contains(pe) || !full.contains(qe) || interiors != 1 {
        return Err(format!("live combination is {}", crate::hypergraph::fmt_set(&full)));
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lemma5Report {
    pub positions: usize,
    pub choice_points: usize,
    pub deviations_solved: usize,
    pub inconclusive: usize,
    pub failures: Vec<String>,
}

impl Lemma5Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for Lemma5Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })?;
        write!(
            f,
            "positions={} choice_points={} deviations_solved={} inconclusive={}",
            self.positions, self.choice_points, self.deviations_solved, self.inconclusive
        )?;
        for why in &self.failures {
            write!(f, "\n{why}")?;
        }
        Ok(())
    }
}

/// At every position where Breaker is to move under regular play, Maker
/// must threaten exactly the regular square, or, at a Breaker choice, hold
/// threats that only the two choice squares stop. With `exhaustive`, every
/// other Breaker move is also solved and must be Maker's win.
pub fn verify_lemma5(g: &AssociatedGame, exhaustive: Option<SolveLimits>) -> Result<Lemma5Report> {
    let states = reachable_states(g)?;
    let todo = distinct(
        states
            .iter()
            .filter(|s| s.active.is_some() && s.position.to_move() == Turn::Breaker),
    );
    let results: Vec<(bool, usize, usize, Vec<String>)> = todo
        .par_iter()
        .map(|st| forced_reply_at(g, st, exhaustive))
        .collect::<Result<_>>()?;
    let mut report = Lemma5Report {
        positions: todo.len(),
        ..Lemma5Report::default()
    };
    for (choice, solved, inconclusive, failures) in results {
        report.choice_points += usize::from(choice);
        report.deviations_solved += solved;
        report.inconclusive += inconclusive;
        report.failures.extend(failures);
    }
    Ok(report)
}

fn forced_reply_at(
    g: &AssociatedGame,
    st: &RegularPlayState,
    exhaustive: Option<SolveLimits>,
) -> Result<(bool, usize, usize, Vec<String>)> {
    let act = st.current().expect("active");
    let v = &act.vertex;
    let spec = gadget(g, v);
    let at = format!(
        "after move {}",
        st.position.maker_set().len() + st.position.breaker_set().len()
    );
    let mut failures = Vec::new();
    let choice = g.map.class(v) == Some(VertexClass::B12) && st.cursor == 1;
    let regular: SquareSet = if choice {
        spec.sequences.values().map(|s| to_global(g, v, &s[1].square)).collect()
    } else {
        let variant = act.variant.expect("variant");
        [to_global(g, v, &spec.sequences[&variant][st.cursor].square)].into()
    };
    let reduced = st.position.reduce();
    if choice {
        if detect_mate_in_two(&reduced).len() < 2 {
            failures.push(format!("{v} {at}: fewer than two mate-in-two threats at the choice"));
        }
        let stoppers: SquareSet = st
            .position
            .legal_moves()
            .into_iter()
            .filter(|y| {
                let r = st.position.apply_move(y).expect("legal").reduce();
                detect_mate_in_one(&r).is_empty() && detect_mate_in_two(&r).is_empty()
            })
            .collect();
        if stoppers != regular {
            failures.push(format!(
                "{v} {at}: stoppers {} differ from {}",
                crate::hypergraph::fmt_set(&stoppers),
                crate::hypergraph::fmt_set(&regular)
            ));
        }
    } else {
        let mut threats = detect_mate_in_one(&reduced);
        // the last Breaker move before re-entering a spent M21 gadget also
        // faces Maker's winning claim there
        let seq = &spec.sequences[&act.variant.expect("variant")];
        if st.cursor + 1 == seq.len() {
            let exit = g
                .map
                .arc_of_role(v, act.variant.expect("variant").exit_role(spec.class))
                .expect("exit");
            if st.was_active(&exit.to) && g.map.class(&exit.to) == Some(VertexClass::M21) {
                threats.remove(&revisit_square(g, &exit.to, exit)?);
            }
        }
        if threats != regular {
            failures.push(format!(
                "{v} {at}: Maker threatens {} instead of {}",
                crate::hypergraph::fmt_set(&threats),
                crate::hypergraph::fmt_set(&regular)
            ));
        }
    }
    let (mut solved, mut inconclusive) = (0, 0);
    if let Some(limits) = exhaustive {
        let opts = SolveOptions {
            limits,
            ..SolveOptions::default()
        };
        for y in st.position.legal_moves().into_iter().filter(|y| !regular.contains(y)) {
            let r = solve_position_with(&st.position.apply_move(&y)?, &opts)?;
            match r.winner {
                Some(Turn::Maker) => solved += 1,
                Some(Turn::Breaker) => failures.push(format!("{v} {at}: Breaker survives deviating to {y}")),
                None => inconclusive += 1,
            }
        }
    }
    Ok((choice, solved, inconclusive, failures))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lemma8Report {
    pub positions: usize,
    pub deviations: usize,
    pub certified: usize,
    pub failures: Vec<String>,
}

impl Lemma8Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.certified == self.deviations
    }
}

impl fmt::Display for Lemma8Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })?;
        write!(
            f,
            "positions={} deviations={} certified={}",
            self.positions, self.deviations, self.certified
        )?;
        for why in &self.failures {
            write!(f, "\n{why}")?;
        }
        Ok(())
    }
}

/// At every position where Maker is to move under regular play inside a
/// first activation, every non-regular Maker move must be answered by a
/// reply whose certificate is a complete pairing of the resulting game.
pub fn verify_lemma8(g: &AssociatedGame) -> Result<Lemma8Report> {
    let states = reachable_states(g)?;
    let todo = distinct(states.iter().filter(|s| {
        s.active.is_some() && s.finished.is_none() && !s.is_revisit() && s.position.to_move() == Turn::Maker
    }));
    let mut cases = Vec::new();
    for st in &todo {
        let regular = regular_squares(g, st)?;
        for p in st.position.legal_moves().into_iter().filter(|p| !regular.contains(p)) {
            cases.push((*st, p));
        }
    }
    let outcomes: Vec<Option<String>> = cases
        .par_iter()
        .map(|(st, p)| {
            let v = &st.current().expect("active").vertex;
            let at = format!("{v} cursor {} deviation {p}", st.cursor);
            match breaker_reply_to_deviation(g, st, p) {
                Err(e) => Some(format!("{at}: {e}")),
                Ok((q, cert)) => {
                    let after = st.position.apply_move(p).and_then(|x| x.apply_move(&q));
                    match after {
                        Err(e) => Some(format!("{at}: reply {q}: {e}")),
                        Ok(after) if cert.is_complete_for(&after.reduce()) => None,
                        Ok(_) => Some(format!("{at}: reply {q}, pairing {cert} is not complete")),
                    }
                }
            }
        })
        .collect();
    let failures: Vec<String> = outcomes.into_iter().flatten().collect();
    Ok(Lemma8Report {
        positions: todo.len(),
        deviations: cases.len(),
        certified: cases.len() - failures.len(),
        failures,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem4Outcome {
    pub winner: Player,
    pub state: RegularPlayState,
    /// Marks of the Geography play, ending with the revisit.
    pub marks: Vec<Vertex>,
}

/// Runs regular play with the given choices and the revised Geography
/// play they describe side by side, and checks that both end the same way.
/// `alice` names the successor chosen at each two-choice Maker vertex,
/// `bob` at each two-choice Breaker vertex, in order of play.
pub fn simulate_theorem4(g: &AssociatedGame, alice: &[Vertex], bob: &[Vertex]) -> Result<Theorem4Outcome> {
    let (mut ai, mut bi) = (alice.iter(), bob.iter());
    let st = super::run_regular(g, |st| {
        let v = &st.current().expect("active").vertex;
        let (list, who) = match g.map.class(v) {
            Some(VertexClass::M12) => (&mut ai, "Alice"),
            _ => (&mut bi, "Bob"),
        };
        let w = list
            .next()
            .ok_or_else(|| Error::Protocol(format!("{who} has no choice left for {v}")))?;
        variant_towards(g, v, w)
    })?;

    let marks: Vec<Vertex> = st.history.iter().map(|a| a.vertex.clone()).collect();
    let mut gg = GgState::new(Ruleset::Revised);
    for m in &marks {
        gg = gg.play(&g.instance, m)?;
    }
    let gg_winner = gg_loser_on_move(&g.instance, &gg)?.other();
    let mb_winner = match st.finished {
        Some(FinishReason::MakerWonM21) if st.position.maker_has_won() => Player::Alice,
        Some(FinishReason::BreakerPairingB21) => {
            let c = lemma3_pairing(g, &st.position);
            if !c.is_complete_for(&st.position.reduce()) {
                return Err(Error::Mismatch(format!("joint pairing {c} is not complete at the end")));
            }
            Player::Bob
        }
        other => {
            return Err(Error::Mismatch(format!(
                "regular play ended as {other:?} without a win"
            )))
        }
    };
    if gg_winner != mb_winner {
        return Err(Error::Mismatch(format!(
            "Geography winner {gg_winner}, Maker-Breaker winner {mb_winner}"
        )));
    }
    let revisited = marks.last().expect("marks");
    let side = bipartition_from_start(&g.instance)?.side(revisited);
    let by_color = if side == Some(Side::A) {
        Player::Alice
    } else {
        Player::Bob
    };
    if by_color != mb_winner {
        return Err(Error::Mismatch(format!(
            "revisit of {revisited} on side {side:?} but {mb_winner} won"
        )));
    }
    Ok(Theorem4Outcome {
        winner: mb_winner,
        state: st,
        marks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::GadgetLibrary;
    use crate::geography::GgInstance;
    use crate::hypergraph::Square;
    use crate::reduction::build_associated_game;
    use crate::solver::solve_gg;

    fn game(arcs: &[(&str, &str)]) -> AssociatedGame {
        let inst = GgInstance::from_arcs("s", arcs.iter().copied()).unwrap();
        build_associated_game(&inst, &GadgetLibrary::builtin()).unwrap()
    }

    const CHOICE: &[(&str, &str)] = &[
        ("s", "v"),
        ("v", "w1"),
        ("v", "w2"),
        ("w1", "x"),
        ("w2", "x"),
        ("x", "w1"),
    ];

    #[test]
    fn simulation_without_choices() {
        let g = game(&[("s", "v"), ("v", "w"), ("w", "v")]);
        assert_eq!(simulate_theorem4(&g, &[], &[]).unwrap().winner, Player::Alice);
        let g = game(&[("s", "v"), ("v", "w"), ("w", "x"), ("x", "w")]);
        let out = simulate_theorem4(&g, &[], &[]).unwrap();
        assert_eq!(out.winner, Player::Bob);
        let marks: Vec<&str> = out.marks.iter().map(Vertex::name).collect();
        assert_eq!(marks, ["s", "v", "w", "x", "w"]);
    }

    #[test]
    fn simulation_follows_alices_choice() {
        let g = game(CHOICE);
        let w1 = simulate_theorem4(&g, &[Vertex::new("w1")], &[]).unwrap();
        let w2 = simulate_theorem4(&g, &[Vertex::new("w2")], &[]).unwrap();
        assert_eq!((w1.winner, w2.winner), (Player::Bob, Player::Alice));
        assert_eq!(solve_gg(&g.instance, Ruleset::Original).unwrap().winner, Player::Alice);
        assert!(matches!(simulate_theorem4(&g, &[], &[]), Err(Error::Protocol(_))));
    }

    #[test]
    fn invariants_flag_a_breaker_output_claim() {
        let g = game(&[("s", "v"), ("v", "w"), ("w", "v")]);
        let fresh = RegularPlayState::new(&g);
        assert!(check_invariants(&g, &fresh).is_clean());
        let mut st = fresh.clone();
        st.trace.push(TraceEvent::Move {
            n: 1,
            mover: Turn::Breaker,
            square: Square::new("s->v#p"),
            regular: true,
        });
        let r = check_invariants(&g, &st);
        assert!(r.violations.iter().any(|v| v.starts_with("1:")), "{r:?}");
    }

    #[test]
    fn invariants_flag_a_claim_in_a_far_gadget() {
        let g = game(&[("s", "v"), ("v", "w"), ("w", "v")]);
        let mut st = RegularPlayState::new(&g);
        st.position = st.position.apply_move(&Square::new("w.x1")).unwrap();
        let r = check_invariants(&g, &st);
        assert!(r.violations.iter().any(|v| v.starts_with("2:")), "{r:?}");
    }

    #[test]
    fn every_choice_line_is_reached() {
        let g = game(CHOICE);
        let finished = reachable_states(&g)
            .unwrap()
            .into_iter()
            .filter(|s| s.finished.is_some())
            .count();
        assert_eq!(finished, 2);
    }
}
