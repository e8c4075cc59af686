//! The gadget library text format.
//!
//! ```text
//! gadget M12
//! interior x1 x2 x3 x4 x5
//! port in a p_a q_a
//! port out b p_b q_b
//! port out c p_c q_c
//! combo x1 x2 p_a q_a
//! seq choose-b M:x1 B:x2 M:p_b B:x3 M:q_b B:x5
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{Direction, GadgetLibrary, GadgetSpec, PortSlot, Step, Variant};
use crate::error::{parse_err, Error, Result};
use crate::geography::VertexClass;
use crate::hypergraph::{Square, SquareSet};
use crate::text::tokenized_lines;

/// The library shipped in `data/gadgets.lib`.
pub const DEFAULT_LIBRARY_TEXT: &str = include_str!("../../data/gadgets.lib");

pub fn parse_library(src: &str) -> Result<GadgetLibrary> {
    let mut specs: Vec<GadgetSpec> = Vec::new();
    for (line, tokens) in tokenized_lines(src) {
        let at = |e: Error| match e {
            Error::InvalidArgument(m) => parse_err(line, m),
            other => other,
        };
        if tokens[0] == "gadget" {
            if tokens.len() != 2 {
                return Err(parse_err(line, "expected `gadget <class>`"));
            }
            let class = tokens[1].parse::<VertexClass>().map_err(at)?;
            specs.push(GadgetSpec {
                class,
                interiors: Vec::new(),
                ports: Vec::new(),
                combos: BTreeSet::new(),
                sequences: BTreeMap::new(),
            });
            continue;
        }
        let Some(spec) = specs.last_mut() else {
            return Err(parse_err(line, "expected a `gadget` header first"));
        };
        let args = &tokens[1..];
        match tokens[0] {
            "interior" => spec.interiors.extend(args.iter().map(Square::new)),
            "port" => {
                let [dir, role, p, q] = args else {
                    return Err(parse_err(line, "expected `port in|out <role> <p> <q>`"));
                };
                let direction = match *dir {
                    "in" => Direction::In,
                    "out" => Direction::Out,
                    other => return Err(parse_err(line, format!("unknown direction `{other}`"))),
                };
                let mut chars = role.chars();
                let (Some(role), None) = (chars.next(), chars.next()) else {
                    return Err(parse_err(line, format!("port role `{role}` is not one letter")));
                };
                spec.ports.push(PortSlot {
                    role,
                    direction,
                    p: Square::new(p),
                    q: Square::new(q),
                });
            }
            "combo" => {
                if args.is_empty() {
                    return Err(parse_err(line, "combo without squares"));
                }
                spec.combos.insert(args.iter().map(Square::new).collect::<SquareSet>());
            }
            "seq" => {
                let Some((variant, steps)) = args.split_first() else {
                    return Err(parse_err(line, "expected `seq <variant> <steps>`"));
                };
                let variant = variant.parse::<Variant>().map_err(at)?;
                let steps = steps
                    .iter()
                    .map(|s| s.parse::<Step>())
                    .collect::<Result<Vec<_>>>()
                    .map_err(at)?;
                if spec.sequences.insert(variant, steps).is_some() {
                    return Err(parse_err(line, format!("duplicate sequence {variant}")));
                }
            }
            other => return Err(parse_err(line, format!("unknown keyword `{other}`"))),
        }
    }
    GadgetLibrary::new(specs)
}

fn write_spec(out: &mut String, spec: &GadgetSpec) {
    writeln!(out, "gadget {}", spec.class).unwrap();
    let names: Vec<&str> = spec.interiors.iter().map(Square::name).collect();
    writeln!(out, "interior {}", names.join(" ")).unwrap();
    for port in &spec.ports {
        writeln!(
            out,
            "port {} {} {} {}",
            port.direction.keyword(),
            port.role,
            port.p,
            port.q
        )
        .unwrap();
    }
    let mut combos: Vec<&SquareSet> = spec.combos.iter().collect();
    combos.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    for combo in combos {
        let names: Vec<&str> = combo.iter().map(Square::name).collect();
        writeln!(out, "combo {}", names.join(" ")).unwrap();
    }
    for (variant, steps) in &spec.sequences {
        let steps: Vec<String> = steps.iter().map(Step::to_string).collect();
        writeln!(out, "seq {variant} {}", steps.join(" ")).unwrap();
    }
}

pub fn write_library(lib: &GadgetLibrary) -> String {
    let mut out = String::new();
    for (i, spec) in lib.specs().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_spec(&mut out, spec);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_library_round_trips() {
        let lib = GadgetLibrary::builtin();
        assert_eq!(parse_library(&write_library(&lib)).unwrap(), lib);
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            parse_library("combo a b\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_library("gadget Q99\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_library("gadget N11\nport sideways a p q\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_library("gadget N11\nseq only M:p_b X:x1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_library("gadget N11\n"), Err(Error::InvalidLibrary(_))));
    }
}
