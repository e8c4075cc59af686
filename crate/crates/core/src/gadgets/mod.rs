//! Per-class gadget hypergraphs: the data model, the text format, the
//! validator and the synthesizer that reconstructs them from their required
//! properties.

mod library;
mod synth;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geography::VertexClass;
use crate::hypergraph::{Hypergraph, Pairing, Square, SquareSet, Turn};

pub use library::{parse_library, write_library, DEFAULT_LIBRARY_TEXT};
pub use synth::{synthesize_class, synthesize_gadgets, SynthesisOptions};
pub use validate::{
    check_piece_traits, local_piece_pairing, validate_gadget, validate_library, Check, CheckOutcome, GadgetReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    In,
    Out,
}

impl Direction {
    pub fn keyword(self) -> &'static str {
        match self {
            Direction::In => "in",
            Direction::Out => "out",
        }
    }
}

/// One incident arc of a gadget, seen from inside: its role letter and the
/// local names of its two joint squares.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortSlot {
    pub role: char,
    pub direction: Direction,
    pub p: Square,
    pub q: Square,
}

impl PortSlot {
    fn canonical(role: char, direction: Direction) -> Self {
        PortSlot {
            role,
            direction,
            p: Square::new(format!("p_{role}")),
            q: Square::new(format!("q_{role}")),
        }
    }

    pub fn joints(&self) -> [&Square; 2] {
        [&self.p, &self.q]
    }

    pub fn other_joint(&self, sq: &Square) -> Option<&Square> {
        if *sq == self.p {
            Some(&self.q)
        } else if *sq == self.q {
            Some(&self.p)
        } else {
            None
        }
    }
}

/// Which line of play a gadget's regular sequence follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    Only,
    ChooseB,
    ChooseC,
    EnterA,
    EnterB,
}

impl Variant {
    pub fn key(self) -> &'static str {
        match self {
            Variant::Only => "only",
            Variant::ChooseB => "choose-b",
            Variant::ChooseC => "choose-c",
            Variant::EnterA => "enter-a",
            Variant::EnterB => "enter-b",
        }
    }

    pub fn for_class(class: VertexClass) -> &'static [Variant] {
        match class {
            VertexClass::M12 | VertexClass::B12 => &[Variant::ChooseB, Variant::ChooseC],
            VertexClass::M21 | VertexClass::B21 => &[Variant::EnterA, Variant::EnterB],
            VertexClass::N11 | VertexClass::B01 => &[Variant::Only],
        }
    }

    /// Role of the arc through which the token arrives, if any.
    pub fn entry_role(self, class: VertexClass) -> Option<char> {
        match (class, self) {
            (VertexClass::B01, _) => None,
            (_, Variant::EnterB) => Some('b'),
            _ => Some('a'),
        }
    }

    /// Role of the arc through which the token leaves.
    pub fn exit_role(self, class: VertexClass) -> char {
        match (class, self) {
            (VertexClass::B01, _) => 'a',
            (VertexClass::N11, _) => 'b',
            (_, Variant::ChooseB) => 'b',
            _ => 'c',
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Variant::Only,
            Variant::ChooseB,
            Variant::ChooseC,
            Variant::EnterA,
            Variant::EnterB,
        ]
        .into_iter()
        .find(|v| v.key() == s)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown variant `{s}`")))
    }
}

/// One claim of a regular-play sequence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub mover: Turn,
    pub square: Square,
}

impl Step {
    fn new(mover: Turn, square: &str) -> Self {
        Step {
            mover,
            square: Square::new(square),
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = match self.mover {
            Turn::Maker => 'M',
            Turn::Breaker => 'B',
        };
        write!(f, "{m}:{}", self.square)
    }
}

impl FromStr for Step {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (m, sq) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("step `{s}` is not M:<sq> or B:<sq>")))?;
        let mover = match m {
            "M" => Turn::Maker,
            "B" => Turn::Breaker,
            _ => return Err(Error::InvalidArgument(format!("unknown mover in step `{s}`"))),
        };
        if sq.is_empty() {
            return Err(Error::InvalidArgument(format!("step `{s}` names no square")));
        }
        Ok(Step::new(mover, sq))
    }
}

/// The regular-play sequences in the order they are written in the class
/// table; every sequence starts with Maker and alternates.
pub fn builtin_sequences(class: VertexClass) -> BTreeMap<Variant, Vec<Step>> {
    let seq = |squares: &[&str]| -> Vec<Step> {
        squares
            .iter()
            .enumerate()
            .map(|(i, s)| Step::new(if i % 2 == 0 { Turn::Maker } else { Turn::Breaker }, s))
            .collect()
    };
    let table: &[(Variant, &[&str])] = match class {
        VertexClass::M12 => &[
            (Variant::ChooseB, &["x1", "x2", "p_b", "x3", "q_b", "x5"]),
            (Variant::ChooseC, &["x2", "x1", "p_c", "x4", "q_c", "x5"]),
        ],
        VertexClass::B12 => &[
            (Variant::ChooseB, &["x1", "x3", "p_b", "x2", "q_b", "x4"]),
            (Variant::ChooseC, &["x1", "x2", "p_c", "x3", "q_c", "x4"]),
        ],
        VertexClass::M21 => &[
            (Variant::EnterA, &["p_c", "x1", "q_c", "x2"]),
            (Variant::EnterB, &["q_c", "x1", "p_c", "x3"]),
        ],
        VertexClass::B21 => &[
            (Variant::EnterA, &["p_c", "x1", "q_c", "x2"]),
            (Variant::EnterB, &["q_c", "x1", "p_c", "x2"]),
        ],
        VertexClass::N11 => &[(Variant::Only, &["p_b", "x1", "q_b", "x2"])],
        VertexClass::B01 => &[(Variant::Only, &["p_a", "x1", "q_a", "x2"])],
    };
    table.iter().map(|(v, s)| (*v, seq(s))).collect()
}

pub fn interior_count(class: VertexClass) -> usize {
    match class {
        VertexClass::M12 => 5,
        VertexClass::B12 => 4,
        VertexClass::M21 => 3,
        VertexClass::B21 | VertexClass::N11 | VertexClass::B01 => 2,
    }
}

/// Port roles and directions of a class, in role order.
pub fn port_signature(class: VertexClass) -> Vec<(char, Direction)> {
    use Direction::{In, Out};
    match class {
        VertexClass::M12 | VertexClass::B12 => vec![('a', In), ('b', Out), ('c', Out)],
        VertexClass::M21 | VertexClass::B21 => vec![('a', In), ('b', In), ('c', Out)],
        VertexClass::N11 => vec![('a', In), ('b', Out)],
        VertexClass::B01 => vec![('a', Out)],
    }
}

/// The gadget hypergraph `H(v)` of one vertex class, in local names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetSpec {
    pub class: VertexClass,
    pub interiors: Vec<Square>,
    pub ports: Vec<PortSlot>,
    pub combos: BTreeSet<SquareSet>,
    pub sequences: BTreeMap<Variant, Vec<Step>>,
}

impl GadgetSpec {
    /// Canonical names, the built-in sequences and no combinations.
    pub fn skeleton(class: VertexClass) -> Self {
        GadgetSpec {
            class,
            interiors: (1..=interior_count(class))
                .map(|i| Square::new(format!("x{i}")))
                .collect(),
            ports: port_signature(class)
                .into_iter()
                .map(|(r, d)| PortSlot::canonical(r, d))
                .collect(),
            combos: BTreeSet::new(),
            sequences: builtin_sequences(class),
        }
    }

    pub fn with_combos<I, C, S>(class: VertexClass, combos: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut spec = GadgetSpec::skeleton(class);
        spec.combos = combos
            .into_iter()
            .map(|c| c.into_iter().map(Square::new).collect())
            .collect();
        spec
    }

    /// `X(v)`: interiors and joints.
    pub fn squares(&self) -> SquareSet {
        let mut s: SquareSet = self.interiors.iter().cloned().collect();
        for port in &self.ports {
            s.insert(port.p.clone());
            s.insert(port.q.clone());
        }
        s
    }

    pub fn hypergraph(&self) -> Result<Hypergraph> {
        Hypergraph::new(self.squares(), self.combos.iter().cloned())
    }

    pub fn port(&self, role: char) -> Option<&PortSlot> {
        self.ports.iter().find(|p| p.role == role)
    }

    pub(crate) fn port_of(&self, sq: &Square) -> Option<&PortSlot> {
        self.ports.iter().find(|p| p.p == *sq || p.q == *sq)
    }

    pub fn is_interior(&self, sq: &Square) -> bool {
        self.interiors.contains(sq)
    }

    /// Interior `x_i`, 1-based.
    pub fn interior(&self, i: usize) -> &Square {
        &self.interiors[i - 1]
    }

    pub fn is_output(&self, sq: &Square) -> bool {
        self.port_of(sq).is_some_and(|p| p.direction == Direction::Out)
    }

    pub fn is_input(&self, sq: &Square) -> bool {
        self.port_of(sq).is_some_and(|p| p.direction == Direction::In)
    }

    /// Squares Maker already owns when the sequence of `variant` starts.
    pub fn entry_claims(&self, variant: Variant) -> SquareSet {
        variant
            .entry_role(self.class)
            .and_then(|r| self.port(r))
            .map(|p| [p.p.clone(), p.q.clone()].into_iter().collect())
            .unwrap_or_default()
    }

    pub fn joint_pairing(&self) -> Pairing {
        Pairing::from_pairs(self.ports.iter().map(|p| (p.p.clone(), p.q.clone()))).expect("port joints are distinct")
    }
}

pub fn joint_pairing(spec: &GadgetSpec) -> Pairing {
    spec.joint_pairing()
}

/// One gadget per vertex class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetLibrary {
    specs: BTreeMap<VertexClass, GadgetSpec>,
}

impl GadgetLibrary {
    /// Requires exactly one spec per class.
    pub fn new(specs: impl IntoIterator<Item = GadgetSpec>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for spec in specs {
            let class = spec.class;
            if map.insert(class, spec).is_some() {
                return Err(Error::InvalidLibrary(format!("two gadgets for class {class}")));
            }
        }
        if let Some(missing) = VertexClass::ALL.iter().find(|c| !map.contains_key(c)) {
            return Err(Error::InvalidLibrary(format!("no gadget for class {missing}")));
        }
        Ok(GadgetLibrary { specs: map })
    }

    /// The library shipped with the crate.
    pub fn builtin() -> GadgetLibrary {
        parse_library(DEFAULT_LIBRARY_TEXT).expect("shipped gadget library parses")
    }

    /// Parses a library and rejects it unless every check passes.
    pub fn load_validated(src: &str) -> Result<GadgetLibrary> {
        let lib = parse_library(src)?;
        let report = validate_library(&lib);
        if !report.passed() {
            let first = report.failures().next().map(|f| f.to_string()).unwrap_or_default();
            return Err(Error::InvalidLibrary(first));
        }
        Ok(lib)
    }

    pub fn spec(&self, class: VertexClass) -> &GadgetSpec {
        &self.specs[&class]
    }

    pub fn specs(&self) -> impl Iterator<Item = &GadgetSpec> {
        self.specs.values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequences_quote_the_class_table() {
        let n11 = &builtin_sequences(VertexClass::N11)[&Variant::Only];
        let shown: Vec<String> = n11.iter().map(Step::to_string).collect();
        assert_eq!(shown, ["M:p_b", "B:x1", "M:q_b", "B:x2"]);
        let b01 = &builtin_sequences(VertexClass::B01)[&Variant::Only];
        let shown: Vec<String> = b01.iter().map(Step::to_string).collect();
        assert_eq!(shown, ["M:p_a", "B:x1", "M:q_a", "B:x2"]);
        let b12 = &builtin_sequences(VertexClass::B12)[&Variant::ChooseC];
        let shown: Vec<String> = b12.iter().map(Step::to_string).collect();
        assert_eq!(shown, ["M:x1", "B:x2", "M:p_c", "B:x3", "M:q_c", "B:x4"]);
        let m12 = &builtin_sequences(VertexClass::M12)[&Variant::ChooseB];
        let shown: Vec<String> = m12.iter().map(Step::to_string).collect();
        assert_eq!(shown, ["M:x1", "B:x2", "M:p_b", "B:x3", "M:q_b", "B:x5"]);
    }

    #[test]
    fn joint_pairings_per_class() {
        let pairs = |c| GadgetSpec::skeleton(c).joint_pairing();
        assert_eq!(pairs(VertexClass::N11).to_string(), "{{p_a,q_a},{p_b,q_b}}");
        assert_eq!(pairs(VertexClass::B01).to_string(), "{{p_a,q_a}}");
        assert_eq!(pairs(VertexClass::M12).len(), 3);
        for class in VertexClass::ALL {
            let spec = GadgetSpec::skeleton(class);
            let covered = spec.joint_pairing().covered();
            assert!(spec.interiors.iter().all(|x| !covered.contains(x)));
            assert_eq!(covered.len(), 2 * spec.ports.len());
        }
    }

    #[test]
    fn entry_and_exit_roles() {
        let m21 = GadgetSpec::skeleton(VertexClass::M21);
        assert_eq!(m21.entry_claims(Variant::EnterB).len(), 2);
        assert!(m21.entry_claims(Variant::EnterB).contains(&Square::new("p_b")));
        assert!(GadgetSpec::skeleton(VertexClass::B01)
            .entry_claims(Variant::Only)
            .is_empty());
        assert_eq!(Variant::ChooseC.exit_role(VertexClass::B12), 'c');
        assert_eq!(Variant::EnterA.exit_role(VertexClass::B21), 'c');
        assert_eq!("choose-b".parse::<Variant>().unwrap(), Variant::ChooseB);
        assert!("B:".parse::<Step>().is_err());
    }
}
