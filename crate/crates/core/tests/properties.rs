use std::collections::{BTreeSet, HashMap};

use mbgg::geography::{gen_convertible, normalize_start, Ruleset};
use mbgg::hypergraph::{GameSpec, Hypergraph, Pairing, Position, Square, SquareSet, Turn};
use mbgg::mbh::{parse_mbh, write_mbh};
use mbgg::reduction::uniformize5;
use mbgg::solver::{solve_gg, solve_mb, solve_mb_with, Certificate, SolveLimits, SolveOptions};
use proptest::prelude::*;

const MAX_SQUARES: usize = 12;

/// Minimax with nothing but a transposition table.
fn brute_force(p: &Position) -> Turn {
    fn go(p: &Position, memo: &mut HashMap<(SquareSet, SquareSet), Turn>) -> Turn {
        if p.maker_has_won() {
            return Turn::Maker;
        }
        let key = (p.maker_set().clone(), p.breaker_set().clone());
        if let Some(w) = memo.get(&key) {
            return *w;
        }
        let me = p.to_move();
        let moves = p.legal_moves();
        let w = if moves.is_empty() {
            Turn::Breaker
        } else if moves.iter().any(|m| go(&p.apply_move(m).unwrap(), memo) == me) {
            me
        } else {
            me.other()
        };
        memo.insert(key, w);
        w
    }
    go(p, &mut HashMap::new())
}

fn sq(i: usize) -> Square {
    Square::new(format!("q{i}"))
}

prop_compose! {
    fn small_game()(n in 3..=MAX_SQUARES)
        (combos in prop::collection::vec(prop::collection::btree_set(0..n, 1..=4), 1..8),
         maker_first in any::<bool>(),
         n in Just(n)) -> GameSpec {
        let h = Hypergraph::new(
            (0..n).map(sq).collect(),
            combos.into_iter().map(|c| c.into_iter().map(sq).collect::<SquareSet>()),
        ).unwrap();
        GameSpec::new(h, if maker_first { Turn::Maker } else { Turn::Breaker })
    }
}

prop_compose! {
    /// A game with a few squares already claimed, alternately.
    fn small_position()(g in small_game(), claims in prop::collection::vec(0..MAX_SQUARES, 0..4)) -> Position {
        let mut p = Position::start(&g);
        for c in claims {
            let s = sq(c);
            if p.is_unclaimed(&s) && !p.maker_has_won() {
                p = p.apply_move(&s).unwrap();
            }
        }
        p
    }
}

fn renamed(g: &GameSpec, perm: &[usize]) -> GameSpec {
    let rename = |s: &Square| {
        let i: usize = s.name()[1..].parse().unwrap();
        Square::new(format!("r{}", perm[i]))
    };
    let h = Hypergraph::new(
        g.hypergraph.squares().iter().map(rename).collect(),
        g.hypergraph
            .combos()
            .iter()
            .map(|c| c.iter().map(rename).collect::<SquareSet>()),
    )
    .unwrap();
    GameSpec::new(h, g.to_move)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solver_matches_brute_force(p in small_position()) {
        let r = mbgg::solver::solve_position_with(&p, &SolveOptions::default()).unwrap();
        prop_assert_eq!(r.winner, Some(brute_force(&p)));
    }

    #[test]
    fn maker_lines_replay_to_a_win(g in small_game()) {
        let r = solve_mb(&g, SolveLimits::default()).unwrap();
        if let Some(Certificate::WinningLine(line)) = &r.certificate {
            prop_assert_eq!(r.winner, Some(Turn::Maker));
            prop_assert!(mbgg::solver::verify_winning_line(&g, line));
        }
    }

    #[test]
    fn winner_ignores_square_names(g in small_game(), seed in any::<u64>()) {
        let n = g.hypergraph.squares().len();
        let mut perm: Vec<usize> = (0..n).collect();
        // Deterministic shuffle from the seed.
        let mut x = seed | 1;
        for i in (1..n).rev() {
            x ^= x << 13; x ^= x >> 7; x ^= x << 17;
            perm.swap(i, (x % (i as u64 + 1)) as usize);
        }
        let a = solve_mb(&g, SolveLimits::default()).unwrap().winner;
        let b = solve_mb(&renamed(&g, &perm), SolveLimits::default()).unwrap().winner;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn node_limits_never_flip_the_answer(p in small_position(), cap in 1u64..40) {
        let exact = brute_force(&p);
        let opts = SolveOptions { limits: SolveLimits::nodes(cap), ..SolveOptions::default() };
        let r = mbgg::solver::solve_position_with(&p, &opts).unwrap();
        prop_assert!(r.winner.is_none() || r.winner == Some(exact));
    }

    #[test]
    fn complete_pairings_mean_breaker_wins(g in small_game(), pairs in prop::collection::vec((0..MAX_SQUARES, 0..MAX_SQUARES), 0..6)) {
        let mut c = Pairing::new();
        for (a, b) in pairs {
            let (a, b) = (sq(a), sq(b));
            if a != b && c.partner(&a).is_none() && c.partner(&b).is_none() {
                c.insert(a, b).unwrap();
            }
        }
        if c.is_complete_for(&g) {
            prop_assert_eq!(brute_force(&Position::start(&g)), Turn::Breaker);
            let opts = SolveOptions { pairing_hint: Some(c.clone()), ..SolveOptions::default() };
            let r = solve_mb_with(&g, &opts).unwrap();
            prop_assert_eq!(r.winner, Some(Turn::Breaker));
            if let Some(Certificate::Pairing(cert)) = r.certificate {
                prop_assert!(cert.is_complete_for(&g));
            }
        }
    }

    #[test]
    fn union_of_disjoint_pairings(left in prop::collection::btree_set(0..20usize, 0..10), right in prop::collection::btree_set(20..40usize, 0..10)) {
        let pair_up = |s: &BTreeSet<usize>| {
            let v: Vec<usize> = s.iter().copied().collect();
            Pairing::from_pairs(v.chunks_exact(2).map(|c| (sq(c[0]), sq(c[1])))).unwrap()
        };
        let (a, b) = (pair_up(&left), pair_up(&right));
        let u = a.union(&b).unwrap();
        prop_assert_eq!(u.len(), a.len() + b.len());
        prop_assert_eq!(u.covered(), a.covered().union(&b.covered()).cloned().collect::<SquareSet>());
        for (x, y) in a.pairs().chain(b.pairs()) {
            prop_assert!(u.contains_pair(x, y));
        }
        let first = a.pairs().next().map(|(x, _)| x.clone());
        if let Some(x) = first {
            let clash = Pairing::from_pairs([(x, sq(99))]).unwrap();
            prop_assert!(a.union(&clash).is_err());
        }
    }

    #[test]
    fn padding_to_five_keeps_the_winner(g in small_game()) {
        prop_assume!(g.hypergraph.combos().len() <= 3);
        let u = uniformize5(&g).unwrap();
        prop_assert!(u.hypergraph.is_uniform(5));
        let a = solve_mb(&g, SolveLimits::default()).unwrap().winner;
        let b = solve_mb(&u, SolveLimits::nodes(500_000)).unwrap().winner;
        prop_assert!(b.is_none() || a == b);
    }

    #[test]
    fn mbh_text_round_trips(p in small_position()) {
        prop_assert_eq!(parse_mbh(&write_mbh(&p)).unwrap(), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn revisits_never_change_the_geography_winner(n in 3usize..=12, seed in any::<u64>()) {
        let inst = gen_convertible(n, seed).unwrap();
        let a = solve_gg(&inst, Ruleset::Original).unwrap().winner;
        let b = solve_gg(&inst, Ruleset::Revised).unwrap().winner;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn generated_instances_normalize_to_themselves(n in 3usize..=12, seed in any::<u64>()) {
        // Generated starts already have out-degree 1, so normalizing is the identity.
        let inst = gen_convertible(n, seed).unwrap();
        prop_assert_eq!(normalize_start(&inst).unwrap(), inst);
    }
}
