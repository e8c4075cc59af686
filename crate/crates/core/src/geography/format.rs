//! The GG text format: one `start <v>` line and one `edge <from> <to>` line
//! per arc. `#` starts a comment.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{Digraph, Edge, GgInstance, Vertex};
use crate::error::{parse_err, Result};
use crate::text::tokenized_lines;

pub fn parse_gg(src: &str) -> Result<GgInstance> {
    let mut start: Option<Vertex> = None;
    let mut arcs: Vec<Edge> = Vec::new();
    let mut last_line = 0;
    for (line, tokens) in tokenized_lines(src) {
        last_line = line;
        match (tokens[0], tokens.len()) {
            ("start", 2) => {
                if start.is_some() {
                    return Err(parse_err(line, "duplicate start line"));
                }
                start = Some(Vertex::new(tokens[1]));
            }
            ("start", _) => return Err(parse_err(line, "expected `start <vertex>`")),
            ("edge", 3) => {
                let e = Edge::new(tokens[1], tokens[2]);
                if e.from == e.to {
                    return Err(parse_err(line, format!("self-loop at {}", e.from)));
                }
                if arcs.contains(&e) {
                    return Err(parse_err(line, format!("duplicate arc {e}")));
                }
                arcs.push(e);
            }
            ("edge", _) => return Err(parse_err(line, "expected `edge <from> <to>`")),
            (other, _) => return Err(parse_err(line, format!("unknown keyword `{other}`"))),
        }
    }
    let start = start.ok_or_else(|| parse_err(last_line.max(1), "missing start line"))?;
    let mut vertices = BTreeSet::from([start.clone()]);
    vertices.extend(arcs.iter().flat_map(|e| [e.from.clone(), e.to.clone()]));
    let graph = Digraph::new(vertices, arcs)?;
    GgInstance::new(graph, start)
}

pub fn write_gg(inst: &GgInstance) -> String {
    let mut out = String::new();
    writeln!(out, "start {}", inst.start()).unwrap();
    for e in inst.graph().arcs() {
        writeln!(out, "edge {} {}", e.from, e.to).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn round_trip() {
        let src = "# a 2-cycle behind a tail\nstart s\nedge s v\nedge v w\nedge w v # back\n";
        let inst = parse_gg(src).unwrap();
        assert_eq!(inst.graph().arcs().len(), 3);
        assert_eq!(parse_gg(&write_gg(&inst)).unwrap(), inst);
    }

    #[test]
    fn errors_carry_lines() {
        assert!(matches!(
            parse_gg("start s\nedge s\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_gg("start s\nstart t\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_gg("edge s v\n"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_gg("start s\nedge s v\nedge s v\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_gg("start s\nedge a b\n"),
            Err(Error::InvalidInstance(_))
        ));
    }
}
