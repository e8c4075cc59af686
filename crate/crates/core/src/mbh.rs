//! The MBH text format for Maker-Breaker games.
//!
//! ```text
//! turn maker|breaker
//! combo <sq> <sq> ...   # one line per winning combination
//! maker <sq> ...        # optional pre-claimed squares
//! breaker <sq> ...      # optional
//! square <sq> ...       # optional isolated squares
//! ```
//!
//! The square set is every declared or mentioned square. `turn` defaults to
//! `maker` when omitted.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{parse_err, Result};
use crate::hypergraph::{GameSpec, Hypergraph, Pairing, Position, Square, SquareSet, Turn};
use crate::text::tokenized_lines;

pub fn parse_mbh(src: &str) -> Result<Position> {
    let mut turn: Option<Turn> = None;
    let mut declared = SquareSet::new();
    let mut combos = Vec::new();
    let mut maker = SquareSet::new();
    let mut breaker = SquareSet::new();
    for (line, tokens) in tokenized_lines(src) {
        let args = tokens[1..].iter().map(Square::new);
        match tokens[0] {
            "turn" => {
                if turn.is_some() {
                    return Err(parse_err(line, "duplicate turn line"));
                }
                if tokens.len() != 2 {
                    return Err(parse_err(line, "expected `turn maker|breaker`"));
                }
                turn = Some(match tokens[1] {
                    "maker" => Turn::Maker,
                    "breaker" => Turn::Breaker,
                    other => return Err(parse_err(line, format!("unknown turn `{other}`"))),
                });
            }
            "combo" => {
                if tokens.len() < 2 {
                    return Err(parse_err(line, "combo without squares"));
                }
                combos.push(args.collect::<SquareSet>());
            }
            "maker" => maker.extend(args),
            "breaker" => breaker.extend(args),
            "square" => declared.extend(args),
            other => return Err(parse_err(line, format!("unknown keyword `{other}`"))),
        }
    }
    let mut all = declared;
    all.extend(combos.iter().flatten().cloned());
    all.extend(maker.iter().cloned());
    all.extend(breaker.iter().cloned());
    if let Some(sq) = maker.intersection(&breaker).next() {
        return Err(parse_err(0, format!("square {sq} claimed by both players")));
    }
    let h = Hypergraph::new(all, combos)?;
    Position::new(Arc::new(h), maker, breaker, turn.unwrap_or(Turn::Maker))
}

pub fn parse_game(src: &str) -> Result<GameSpec> {
    let p = parse_mbh(src)?;
    Ok(GameSpec::new(p.hypergraph().clone(), p.to_move()))
}

fn write_line(out: &mut String, keyword: &str, set: &SquareSet) {
    out.push_str(keyword);
    for s in set {
        out.push(' ');
        out.push_str(s.name());
    }
    out.push('\n');
}

/// Serializes a position; combos are written smallest-first, then sorted.
pub fn write_mbh(p: &Position) -> String {
    let mut out = String::new();
    writeln!(out, "turn {}", p.to_move()).unwrap();
    let mut combos: Vec<&SquareSet> = p.hypergraph().combos().iter().collect();
    combos.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    for c in combos {
        write_line(&mut out, "combo", c);
    }
    let mentioned: SquareSet = p.hypergraph().combos().iter().flatten().cloned().collect();
    let isolated: SquareSet = p.hypergraph().squares().difference(&mentioned).cloned().collect();
    if !isolated.is_empty() {
        write_line(&mut out, "square", &isolated);
    }
    if !p.maker_set().is_empty() {
        write_line(&mut out, "maker", p.maker_set());
    }
    if !p.breaker_set().is_empty() {
        write_line(&mut out, "breaker", p.breaker_set());
    }
    out
}

pub fn write_game(g: &GameSpec) -> String {
    write_mbh(&Position::start(g))
}

/// Pairings as `pair <a> <b>` lines.
pub fn parse_pairing(src: &str) -> Result<Pairing> {
    let mut c = Pairing::new();
    for (line, tokens) in tokenized_lines(src) {
        match tokens.as_slice() {
            ["pair", a, b] => c
                .insert(Square::new(a), Square::new(b))
                .map_err(|e| parse_err(line, e.to_string()))?,
            _ => return Err(parse_err(line, "expected `pair <a> <b>`")),
        }
    }
    Ok(c)
}

pub fn write_pairing(c: &Pairing) -> String {
    c.pairs().map(|(a, b)| format!("pair {a} {b}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::hypergraph::squares;

    #[test]
    fn parses_claims_and_isolated_squares() {
        let src = "turn breaker\ncombo 1 2 3 # row\ncombo 3 4\nmaker 1\nbreaker 4\nsquare z\n";
        let p = parse_mbh(src).unwrap();
        assert_eq!(p.to_move(), Turn::Breaker);
        assert_eq!(p.hypergraph().squares(), &squares(["1", "2", "3", "4", "z"]));
        assert_eq!(p.maker_set(), &squares(["1"]));
        assert_eq!(parse_mbh(&write_mbh(&p)).unwrap(), p);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_mbh("combo a b\nfoo x\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 2,
                message: "unknown keyword `foo`".into()
            }
        );
        assert!(matches!(parse_mbh("turn sideways"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_mbh("combo\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn default_turn_is_maker() {
        let g = parse_game("combo a").unwrap();
        assert_eq!(g.to_move, Turn::Maker);
    }

    #[test]
    fn pairings_round_trip_and_reject_overlaps() {
        let c = parse_pairing("pair 1 2 # first\npair 3 4\n").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(parse_pairing(&write_pairing(&c)).unwrap(), c);
        assert!(matches!(
            parse_pairing("pair 1 2\npair 2 3\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_pairing("pair 1\n"), Err(Error::Parse { line: 1, .. })));
    }
}
