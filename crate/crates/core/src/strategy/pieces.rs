//! Pairings built gadget by gadget, and Breaker's answer to a Maker
//! deviation from regular play.

use std::collections::BTreeMap;

use super::{gadget, regular_squares, to_global, RegularPlayState};
use crate::error::{Error, Result};
use crate::gadgets::{local_piece_pairing, Direction, Variant};
use crate::geography::{Edge, Vertex, VertexClass};
use crate::hypergraph::{Pairing, Position, Square, SquareSet};
use crate::reduction::AssociatedGame;

/// A pairing of one vertex's restriction `(X_P(v), F_P(v))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuzzlePiecePairing {
    pub vertex: Vertex,
    pub pairing: Pairing,
}

/// `C(v, p)` for a position where `p` is Maker's only square in `v`'s gadget
/// and Breaker has none there.
pub fn puzzle_piece_pairing(g: &AssociatedGame, v: &Vertex, p: &Square, pos: &Position) -> Result<PuzzlePiecePairing> {
    let spec = g
        .gadget(v)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown vertex {v}")))?;
    if *v == *g.instance.start() {
        return Err(Error::InvalidArgument("the start vertex has no puzzle pieces".into()));
    }
    let xs = g.map.vertex_squares(v);
    let maker: SquareSet = xs.intersection(pos.maker_set()).cloned().collect();
    if maker.len() != 1 || !maker.contains(p) || !xs.is_disjoint(pos.breaker_set()) {
        return Err(Error::InvalidArgument(format!(
            "{p} must be the only claimed square of {v}'s gadget"
        )));
    }
    let pairing = global_piece_pairing(g, v, p)?;
    let local = |s: &SquareSet| -> SquareSet { s.iter().filter_map(|x| g.map.local(v, x).cloned()).collect() };
    let lp = pairing_to_local(g, v, &pairing);
    crate::gadgets::check_piece_traits(spec, &local(&maker), &SquareSet::new(), &lp)
        .map_err(|why| Error::InvalidPieces(format!("{v}: {why}")))?;
    Ok(PuzzlePiecePairing {
        vertex: v.clone(),
        pairing,
    })
}

/// Union of per-vertex pieces. A square paired differently by two pieces
/// means some piece broke the traits that keep them compatible.
pub fn union_pairing(pieces: &BTreeMap<Vertex, PuzzlePiecePairing>) -> Result<Pairing> {
    let mut out = Pairing::new();
    for (v, piece) in pieces {
        for (a, b) in piece.pairing.pairs() {
            out.insert(a.clone(), b.clone())
                .map_err(|e| Error::InvalidPieces(format!("piece of {v}: {e}")))?;
        }
    }
    Ok(out)
}

fn pairing_to_global(g: &AssociatedGame, v: &Vertex, c: &Pairing) -> Pairing {
    Pairing::from_pairs(c.pairs().map(|(a, b)| (to_global(g, v, a), to_global(g, v, b))))
        .expect("renaming is injective")
}

fn pairing_to_local(g: &AssociatedGame, v: &Vertex, c: &Pairing) -> Pairing {
    Pairing::from_pairs(c.pairs().map(|(a, b)| {
        (
            g.map.local(v, a).expect("square of the gadget").clone(),
            g.map.local(v, b).expect("square of the gadget").clone(),
        )
    }))
    .expect("renaming is injective")
}

fn global_piece_pairing(g: &AssociatedGame, v: &Vertex, p: &Square) -> Result<Pairing> {
    let local = g
        .map
        .local(v, p)
        .ok_or_else(|| Error::InvalidArgument(format!("{p} is not a square of {v}")))?;
    Ok(pairing_to_global(g, v, &local_piece_pairing(gadget(g, v), local)?))
}

/// Joint pairs of arcs at `v` whose joints are both unclaimed in `pos`.
fn surviving_joint_pairs(g: &AssociatedGame, v: &Vertex, pos: &Position) -> Pairing {
    let spec = gadget(g, v);
    let mut c = Pairing::new();
    for port in &spec.ports {
        let (a, b) = (to_global(g, v, &port.p), to_global(g, v, &port.q));
        if pos.is_unclaimed(&a) && pos.is_unclaimed(&b) {
            c.insert(a, b).expect("joints are distinct");
        }
    }
    c
}

/// Combinations of `v`'s gadget that are still alive, minus Maker's squares.
pub(super) fn residual(g: &AssociatedGame, v: &Vertex, pos: &Position) -> Vec<SquareSet> {
    g.map
        .vertex_combos(v)
        .iter()
        .filter(|c| c.is_disjoint(pos.breaker_set()))
        .map(|c| c.difference(pos.maker_set()).cloned().collect())
        .collect()
}

/// Squares of `v`'s gadget sharing some live combination with `sq`.
fn sharing(g: &AssociatedGame, v: &Vertex, pos: &Position, sq: &Square) -> SquareSet {
    residual(g, v, pos)
        .into_iter()
        .filter(|c| c.contains(sq))
        .flatten()
        .filter(|x| x != sq)
        .collect()
}

fn unclaimed_interiors(g: &AssociatedGame, v: &Vertex, pos: &Position) -> Vec<Square> {
    let spec = gadget(g, v);
    spec.interiors
        .iter()
        .map(|x| to_global(g, v, x))
        .filter(|x| pos.is_unclaimed(x))
        .collect()
}

/// Joints of outgoing arcs of `v` that exactly one claim has touched.
fn half_claimed_outputs(g: &AssociatedGame, v: &Vertex, pos: &Position) -> SquareSet {
    let spec = gadget(g, v);
    let mut out = SquareSet::new();
    for port in spec.ports.iter().filter(|p| p.direction == Direction::Out) {
        let (a, b) = (to_global(g, v, &port.p), to_global(g, v, &port.q));
        if pos.is_unclaimed(&a) != pos.is_unclaimed(&b) {
            out.insert(a);
            out.insert(b);
        }
    }
    out
}

/// Extends `c` so it blocks every live combination of `v`, pairing only
/// unclaimed squares that `c` leaves free and that are not joints of a
/// half-claimed outgoing arc.
fn complete_locally(g: &AssociatedGame, v: &Vertex, pos: &Position, c: Pairing) -> Option<Pairing> {
    let forbidden = half_claimed_outputs(g, v, pos);
    let open: Vec<SquareSet> = residual(g, v, pos).into_iter().filter(|f| !c.blocks(f)).collect();
    fn search(open: &[SquareSet], c: Pairing, forbidden: &SquareSet, pos: &Position) -> Option<Pairing> {
        let Some((f, rest)) = open.split_first() else {
            return Some(c);
        };
        if c.blocks(f) {
            return search(rest, c, forbidden, pos);
        }
        let covered = c.covered();
        let free: Vec<&Square> = f
            .iter()
            .filter(|s| pos.is_unclaimed(s) && !covered.contains(*s) && !forbidden.contains(*s))
            .collect();
        for (i, a) in free.iter().enumerate() {
            for b in &free[i + 1..] {
                let mut next = c.clone();
                next.insert((*a).clone(), (*b).clone()).ok()?;
                if let Some(done) = search(rest, next, forbidden, pos) {
                    return Some(done);
                }
            }
        }
        None
    }
    search(&open, c, &forbidden, pos)
}

fn without_touching(mut c: Pairing, sq: &Square) -> Pairing {
    c.remove_touching(sq);
    c
}

/// The B12 form where Maker claims a joint of the arc Breaker steered away
/// from, once Breaker's choice is known.
struct Subversion {
    /// The arc Breaker chose; its `p` joint is the regular square in the
    /// middle column.
    chosen: Edge,
}

/// Breaker's reply `q` to Maker claiming the non-regular square `p`, and a
/// complete pairing of the resulting position assembled from per-vertex
/// pieces.
pub fn breaker_reply_to_deviation(g: &AssociatedGame, st: &RegularPlayState, p: &Square) -> Result<(Square, Pairing)> {
    let act = st
        .current()
        .ok_or_else(|| Error::Protocol("no active vertex".into()))?
        .clone();
    if st.finished.is_some() || act.revisit {
        return Err(Error::Protocol(
            "deviations are analysed only inside a first activation".into(),
        ));
    }
    let pos = &st.position;
    if pos.to_move() != crate::hypergraph::Turn::Maker {
        return Err(Error::Protocol("it is not Maker's turn".into()));
    }
    if !pos.is_unclaimed(p) {
        return Err(Error::InvalidMove(format!("{p} is already claimed")));
    }
    let regular = regular_squares(g, st)?;
    if regular.contains(p) {
        return Err(Error::NotADeviation(p.to_string()));
    }
    let v = act.vertex.clone();
    let class = g.map.class(&v).expect("vertex of the instance");
    let column = st.cursor / 2;

    let mut subversion = None;
    let q: Square = match (class, act.variant) {
        (VertexClass::M12, None) => {
            // both regular squares are interiors; prefer the one sharing a
            // live combination with p, else the smaller name
            let shares: Vec<&Square> = regular.iter().filter(|r| sharing(g, &v, pos, r).contains(p)).collect();
            match shares.as_slice() {
                [only] => (*only).clone(),
                _ => regular.first().expect("two regular squares").clone(),
            }
        }
        (VertexClass::B12, Some(variant)) if column >= 1 => {
            let unchosen_role = if variant == Variant::ChooseB { 'c' } else { 'b' };
            let unchosen = g.map.arc_of_role(&v, unchosen_role).expect("output port");
            let (pe, qe) = g.map.joint(unchosen).expect("arc");
            if p == pe || p == qe {
                let chosen = g.map.arc_of_role(&v, variant.exit_role(class)).expect("output port");
                subversion = Some(Subversion { chosen: chosen.clone() });
                let both: SquareSet = [pe.clone(), qe.clone()].into();
                unclaimed_interiors(g, &v, pos)
                    .into_iter()
                    .find(|x| {
                        g.map
                            .vertex_combos(&v)
                            .iter()
                            .any(|c| c.contains(x) && both.is_subset(c))
                    })
                    .ok_or_else(|| Error::InvalidPieces(format!("{v}: no interior guards {unchosen}")))?
            } else {
                regular.first().expect("regular square").clone()
            }
        }
        _ => regular.first().expect("regular square").clone(),
    };

    let after = pos.apply_move(p)?.apply_move(&q)?;
    let special = subversion.as_ref().filter(|_| column == 1);
    let special_target = special.map(|s| s.chosen.to.clone());

    let mut pieces = BTreeMap::new();
    for w in g.map.vertices() {
        let c = if *w == v {
            match special {
                Some(s) => {
                    let (pe, _) = g.map.joint(&s.chosen).expect("arc");
                    let xs = unclaimed_interiors(g, &v, &after);
                    let [x] = xs.as_slice() else {
                        return Err(Error::InvalidPieces(format!(
                            "{v}: expected one free interior, found {}",
                            xs.len()
                        )));
                    };
                    Pairing::from_pairs([(pe.clone(), x.clone())])?
                }
                None => active_piece(g, &v, pos, &after, p, &q, &regular, class, act.variant)?,
            }
        } else if special_target.as_ref() == Some(w) {
            let s = special.expect("special case");
            target_piece(g, st, w, &s.chosen, &after)?
        } else {
            other_piece(g, st, &v, w, pos, &after, p, &q, subversion.is_some())?
        };
        pieces.insert(
            w.clone(),
            PuzzlePiecePairing {
                vertex: w.clone(),
                pairing: without_touching(c, &q),
            },
        );
    }
    Ok((q, union_pairing(&pieces)?))
}

/// The active vertex's own piece, outside the special case.
#[allow(clippy::too_many_arguments)]
fn active_piece(
    g: &AssociatedGame,
    v: &Vertex,
    pos: &Position,
    after: &Position,
    p: &Square,
    q: &Square,
    regular: &SquareSet,
    class: VertexClass,
    variant: Option<Variant>,
) -> Result<Pairing> {
    let mut c = surviving_joint_pairs(g, v, after);
    if class == VertexClass::M12 && variant.is_none() {
        // the other regular square q' pairs with the one interior that
        // shares a live combination with q' but not with q
        let q2 = regular.iter().find(|r| *r != q).expect("two regular squares");
        let with_q = sharing(g, v, pos, q);
        let only_q2: Vec<Square> = sharing(g, v, pos, q2)
            .into_iter()
            .filter(|s| !with_q.contains(s) && s != q && s != p)
            .collect();
        let spec = gadget(g, v);
        let x = only_q2
            .iter()
            .find(|s| g.map.local(v, s).is_some_and(|l| spec.is_interior(l)))
            .ok_or_else(|| Error::InvalidPieces(format!("{v}: no interior shares only with {q2}")))?;
        c.insert(x.clone(), q2.clone())?;
    }
    complete_locally(g, v, after, c).ok_or_else(|| Error::InvalidPieces(format!("{v}: no local completion after {p}")))
}

/// Which of the five situations a vertex other than the active one is in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Category {
    SpentBefore,
    WaitingTwoInput,
    Untouched,
    Entered,
}

fn category(g: &AssociatedGame, st: &RegularPlayState, w: &Vertex, pos: &Position) -> Category {
    if st.was_active(w) {
        if g.map.class(w) == Some(VertexClass::M21) {
            Category::WaitingTwoInput
        } else {
            Category::SpentBefore
        }
    } else if g.map.vertex_squares(w).iter().all(|s| pos.is_unclaimed(s)) {
        Category::Untouched
    } else {
        Category::Entered
    }
}

/// The single live combination of a waiting two-input gadget, paired so
/// that it stays blocked.
fn waiting_pair(
    g: &AssociatedGame,
    w: &Vertex,
    pos: &Position,
    after: &Position,
    p: &Square,
    q: &Square,
) -> Result<Pairing> {
    let live = residual(g, w, pos);
    let [r] = live.as_slice() else {
        return Ok(Pairing::new());
    };
    if r.contains(q) {
        return Ok(Pairing::new());
    }
    let rest: Vec<Square> = if r.contains(p) {
        r.iter().filter(|s| *s != p).cloned().collect()
    } else if let Some((a, b)) = g
        .map
        .joints()
        .find(|(_, a, b)| r.contains(*a) && r.contains(*b))
        .map(|(_, a, b)| (a, b))
    {
        vec![a.clone(), b.clone()]
    } else {
        r.iter().cloned().collect()
    };
    match rest.as_slice() {
        [a, b] if after.is_unclaimed(a) && after.is_unclaimed(b) => Ok(Pairing::from_pairs([(a.clone(), b.clone())])?),
        _ => Err(Error::InvalidPieces(format!("{w}: cannot pair the live combination"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn other_piece(
    g: &AssociatedGame,
    st: &RegularPlayState,
    v: &Vertex,
    w: &Vertex,
    pos: &Position,
    after: &Position,
    p: &Square,
    q: &Square,
    subverted: bool,
) -> Result<Pairing> {
    let xs = g.map.vertex_squares(w);
    let spec_w = gadget(g, w);
    match category(g, st, w, pos) {
        Category::SpentBefore => Ok(surviving_joint_pairs(g, w, after)),
        Category::WaitingTwoInput => {
            let mut c = waiting_pair(g, w, pos, after, p, q)?;
            for (a, b) in surviving_joint_pairs(g, w, after).pairs() {
                if !c.contains_pair(a, b) && c.partner(a).is_none() && c.partner(b).is_none() {
                    c.insert(a.clone(), b.clone())?;
                }
            }
            Ok(c)
        }
        Category::Untouched => {
            if xs.contains(p) {
                global_piece_pairing(g, w, p)
            } else {
                Ok(pairing_to_global(g, w, &spec_w.joint_pairing()))
            }
        }
        Category::Entered => {
            // only the arc from the active vertex can have been entered
            let e = Edge::new(v.clone(), w.clone());
            let (pe, qe) = g
                .map
                .joint(&e)
                .ok_or_else(|| Error::InvalidPieces(format!("{w} touched without an arc from {v}")))?;
            let x = if pos.maker_set().contains(pe) { pe } else { qe };
            if subverted {
                global_piece_pairing(g, w, x)
            } else if xs.contains(p) {
                global_piece_pairing(g, w, p)
            } else {
                Ok(pairing_to_global(g, w, &spec_w.joint_pairing()))
            }
        }
    }
}

/// The head of the chosen arc in the special case: its piece leaves the
/// arc's `p` joint to the active vertex.
fn target_piece(g: &AssociatedGame, st: &RegularPlayState, w: &Vertex, e: &Edge, after: &Position) -> Result<Pairing> {
    let (pe, qe) = g.map.joint(e).expect("arc");
    match category(g, st, w, &st.position) {
        Category::SpentBefore => Ok(Pairing::new()),
        Category::WaitingTwoInput => {
            let xs = unclaimed_interiors(g, w, after);
            let [x] = xs.as_slice() else {
                return Err(Error::InvalidPieces(format!("{w}: expected one free interior")));
            };
            Ok(Pairing::from_pairs([(qe.clone(), x.clone())])?)
        }
        Category::Untouched => global_piece_pairing(g, w, pe),
        Category::Entered => Err(Error::InvalidPieces(format!("{w}: entered before Breaker's choice"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::GadgetLibrary;
    use crate::geography::{classify_all, enumerate_up_to_iso, GgInstance};
    use crate::hypergraph::{squares, Turn};
    use crate::reduction::build_associated_game;
    use crate::strategy::regular_step;
    use std::sync::Arc;

    fn game(arcs: &[(&str, &str)]) -> AssociatedGame {
        let inst = GgInstance::from_arcs("s", arcs.iter().copied()).unwrap();
        build_associated_game(&inst, &GadgetLibrary::builtin()).unwrap()
    }

    fn with_maker(g: &AssociatedGame, sq: &str) -> Position {
        let h = Arc::new(g.spec.hypergraph.clone());
        Position::new(h, squares([sq]), SquareSet::new(), Turn::Breaker).unwrap()
    }

    fn pairs(c: &Pairing) -> Vec<String> {
        c.pairs().map(|(a, b)| format!("{a}+{b}")).collect()
    }

    fn advance(g: &AssociatedGame, st: &RegularPlayState, n: usize, choice: Option<Variant>) -> RegularPlayState {
        let mut st = st.clone();
        for _ in 0..n {
            let c = if st.needs_choice(g) { choice } else { None };
            st = regular_step(g, &st, c).unwrap().1;
        }
        st
    }

    #[test]
    fn pieces_by_case() {
        // w is N11 (in v->w, out w->v) and v is M21 (in s->v, w->v, out v->w)
        let g = game(&[("s", "v"), ("v", "w"), ("w", "v")]);
        let w = Vertex::new("w");
        let c = puzzle_piece_pairing(&g, &w, &Square::new("w.x1"), &with_maker(&g, "w.x1")).unwrap();
        assert_eq!(pairs(&c.pairing), ["v->w#p+v->w#q", "w->v#p+w->v#q"]);
        let c = puzzle_piece_pairing(&g, &w, &Square::new("v->w#p"), &with_maker(&g, "v->w#p")).unwrap();
        assert_eq!(pairs(&c.pairing), ["v->w#q+w.x1", "w->v#p+w->v#q"]);
        let v = Vertex::new("v");
        let c = puzzle_piece_pairing(&g, &v, &Square::new("v->w#p"), &with_maker(&g, "v->w#p")).unwrap();
        assert_eq!(pairs(&c.pairing), ["s->v#p+s->v#q", "w->v#p+w->v#q"]);
        assert!(matches!(
            puzzle_piece_pairing(&g, &Vertex::new("s"), &Square::new("s.x1"), &with_maker(&g, "s.x1")),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn union_rejects_conflicting_pieces() {
        let mut pieces = BTreeMap::new();
        for (v, b) in [("u", "y"), ("w", "z")] {
            pieces.insert(
                Vertex::new(v),
                PuzzlePiecePairing {
                    vertex: Vertex::new(v),
                    pairing: Pairing::from_pairs([(Square::new("j"), Square::new(b))]).unwrap(),
                },
            );
        }
        assert!(matches!(union_pairing(&pieces), Err(Error::InvalidPieces(_))));
    }

    #[test]
    fn star_form_answers_with_the_sharing_choice_square() {
        let g = game(&[
            ("s", "v"),
            ("v", "w1"),
            ("v", "w2"),
            ("w1", "x"),
            ("w2", "x"),
            ("x", "w1"),
        ]);
        let st = advance(&g, &RegularPlayState::new(&g), 4, None);
        assert!(st.needs_choice(&g));
        // x3 lives only in a combination with x1
        let (q, cert) = breaker_reply_to_deviation(&g, &st, &Square::new("v.x3")).unwrap();
        assert_eq!(q.name(), "v.x1");
        let after = st
            .position
            .apply_move(&Square::new("v.x3"))
            .unwrap()
            .apply_move(&q)
            .unwrap();
        assert!(cert.is_complete_for(&after.reduce()));
        assert!(matches!(
            breaker_reply_to_deviation(&g, &st, &Square::new("v.x2")),
            Err(Error::NotADeviation(_))
        ));
    }

    #[test]
    fn subverting_breakers_choice() {
        let inst = (3..=7)
            .flat_map(|n| enumerate_up_to_iso(n, 1))
            .find(|i| classify_all(i).unwrap().values().any(|c| *c == VertexClass::B12))
            .expect("a two-choice Breaker vertex");
        let g = build_associated_game(&inst, &GadgetLibrary::builtin()).unwrap();
        let classes = classify_all(&inst).unwrap();
        let b12 = classes.iter().find(|(_, c)| **c == VertexClass::B12).unwrap().0.clone();
        let mut st = RegularPlayState::new(&g);
        while st.current().map(|a| &a.vertex) != Some(&b12) {
            let c = st.needs_choice(&g).then_some(Variant::ChooseB);
            st = regular_step(&g, &st, c).unwrap().1;
        }
        // middle column: Maker has x1, Breaker x3, regular square is p_b
        let st = advance(&g, &st, 2, Some(Variant::ChooseB));
        let local = |s: &str| g.map.global(&b12, &Square::new(s)).unwrap().clone();
        let (q, cert) = breaker_reply_to_deviation(&g, &st, &local("p_c")).unwrap();
        assert_eq!(q, local("x4"));
        assert!(cert.contains_pair(&local("p_b"), &local("x2")));
        let after = st.position.apply_move(&local("p_c")).unwrap().apply_move(&q).unwrap();
        assert!(cert.is_complete_for(&after.reduce()), "{cert}");
    }
}
