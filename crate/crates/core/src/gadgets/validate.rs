//! Gadget checks G1–G6 and the local puzzle-piece constructions they rely on.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::{builtin_sequences, Direction, GadgetLibrary, GadgetSpec, Variant};
use crate::error::{Error, Result};
use crate::geography::VertexClass;
use crate::hypergraph::{fmt_set, GameSpec, Hypergraph, Pairing, Position, Square, SquareSet, Turn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    /// Shape: names, ports, sequences, combos local and of size at most 5.
    G1,
    /// The joint pairing blocks every combination (B01: all but its opening).
    G2,
    /// Sequences obey the claiming rules and leave the expected residue.
    G3,
    /// Breaker's regular moves are forced by threats.
    G4,
    /// Puzzle piece pairings exist for every single Maker claim.
    G5,
    /// The re-entry combinations of the two-input classes.
    G6,
    /// Dropping any joint pair unblocks something. Informational only.
    Minimality,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::G1 => "G1",
            Check::G2 => "G2",
            Check::G3 => "G3",
            Check::G4 => "G4",
            Check::G5 => "G5",
            Check::G6 => "G6",
            Check::Minimality => "minimality",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub class: VertexClass,
    pub check: Check,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match (self.passed, self.check) {
            (true, _) => "ok",
            (false, Check::Minimality) => "note",
            (false, _) => "FAIL",
        };
        write!(f, "{} {} {status}", self.class, self.check)?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GadgetReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl GadgetReport {
    /// Every check except the informational minimality witness passed.
    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.outcomes
            .iter()
            .filter(|o| !o.passed && o.check != Check::Minimality)
    }

    pub fn outcome(&self, class: VertexClass, check: Check) -> Option<&CheckOutcome> {
        self.outcomes.iter().find(|o| o.class == class && o.check == check)
    }
}

impl fmt::Display for GadgetReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })?;
        for o in &self.outcomes {
            writeln!(f, "{o}")?;
        }
        Ok(())
    }
}

type CheckResult = std::result::Result<(), String>;

pub fn validate_library(lib: &GadgetLibrary) -> GadgetReport {
    let mut report = GadgetReport::default();
    for spec in lib.specs() {
        report.outcomes.extend(validate_gadget(spec).outcomes);
    }
    report
}

pub fn validate_gadget(spec: &GadgetSpec) -> GadgetReport {
    let class = spec.class;
    let outcome = |check, r: CheckResult| CheckOutcome {
        class,
        check,
        passed: r.is_ok(),
        detail: r.err().unwrap_or_default(),
    };
    let shape = check_shape(spec);
    let mut outcomes = vec![outcome(Check::G1, shape.clone())];
    let h = match (shape, spec.hypergraph()) {
        (Ok(()), Ok(h)) => Arc::new(h),
        _ => {
            for check in [Check::G2, Check::G3, Check::G4, Check::G5, Check::G6] {
                outcomes.push(outcome(check, Err("not run: G1 failed".into())));
            }
            return GadgetReport { outcomes };
        }
    };
    let local = Local { spec, h };
    outcomes.push(outcome(Check::G2, local.check_joint_pairing()));
    outcomes.push(outcome(Check::G3, local.check_sequences()));
    outcomes.push(outcome(Check::G4, local.check_threats()));
    outcomes.push(outcome(Check::G5, local.check_puzzle_pieces()));
    outcomes.push(outcome(Check::G6, local.check_reentry()));
    if class != VertexClass::B01 {
        outcomes.push(outcome(Check::Minimality, local.check_minimality()));
    }
    GadgetReport { outcomes }
}

fn check_shape(spec: &GadgetSpec) -> CheckResult {
    let skeleton = GadgetSpec::skeleton(spec.class);
    if spec.interiors != skeleton.interiors {
        return Err(format!(
            "interiors {:?}, expected {:?}",
            spec.interiors, skeleton.interiors
        ));
    }
    if spec.ports != skeleton.ports {
        return Err("ports differ from the class signature".into());
    }
    if spec.sequences != builtin_sequences(spec.class) {
        return Err("sequences differ from the regular-play table".into());
    }
    let names = spec.squares();
    for combo in &spec.combos {
        if combo.is_empty() || combo.len() > 5 {
            return Err(format!("combo {} has size {}", fmt_set(combo), combo.len()));
        }
        if !combo.is_subset(&names) {
            return Err(format!("combo {} uses a foreign square", fmt_set(combo)));
        }
    }
    Ok(())
}

/// One run of a regular-play sequence inside a single gadget.
struct Run {
    /// Position before each step.
    before: Vec<Position>,
    last: Position,
}

struct Local<'a> {
    spec: &'a GadgetSpec,
    h: Arc<Hypergraph>,
}

impl Local<'_> {
    fn position(&self, maker: SquareSet, breaker: SquareSet, to_move: Turn) -> Position {
        Position::new(self.h.clone(), maker, breaker, to_move).expect("local squares")
    }

    fn run(&self, variant: Variant) -> std::result::Result<Run, String> {
        let mut pos = self.position(self.spec.entry_claims(variant), SquareSet::new(), Turn::Maker);
        let mut before = Vec::new();
        for step in &self.spec.sequences[&variant] {
            before.push(pos.clone());
            pos = pos.apply_move(&step.square).map_err(|e| format!("{variant}: {e}"))?;
        }
        Ok(Run { before, last: pos })
    }

    fn check_joint_pairing(&self) -> CheckResult {
        let pairing = self.spec.joint_pairing();
        let unblocked: Vec<&SquareSet> = self.h.combos().iter().filter(|c| !pairing.blocks(c)).collect();
        if self.spec.class == VertexClass::B01 {
            let opening = &self.spec.sequences[&Variant::Only][0].square;
            if let Some(c) = unblocked.iter().find(|c| !c.contains(opening)) {
                return Err(format!("{} is unblocked and avoids {opening}", fmt_set(c)));
            }
            return Ok(());
        }
        match unblocked.first() {
            Some(c) => Err(format!("{} is not blocked by the joint pairing", fmt_set(c))),
            None => Ok(()),
        }
    }

    fn check_sequences(&self) -> CheckResult {
        let class = self.spec.class;
        for &variant in Variant::for_class(class) {
            let run = self.run(variant)?;
            let steps = &self.spec.sequences[&variant];
            for (pos, step) in run.before.iter().zip(steps) {
                let sq = &step.square;
                let allowed = match step.mover {
                    Turn::Maker => self.spec.is_interior(sq) || self.spec.is_output(sq),
                    Turn::Breaker => self.spec.is_interior(sq),
                };
                if !allowed {
                    return Err(format!("{variant}: {step} claims a forbidden square"));
                }
                if pos.maker_has_won() {
                    return Err(format!("{variant}: Maker completes a combination before {step}"));
                }
            }
            let exit = self.spec.port(variant.exit_role(class)).expect("exit port");
            let maker_joints: SquareSet = steps
                .iter()
                .filter(|s| s.mover == Turn::Maker && self.spec.port_of(&s.square).is_some())
                .map(|s| s.square.clone())
                .collect();
            let expected: SquareSet = [exit.p.clone(), exit.q.clone()].into_iter().collect();
            if maker_joints != expected {
                return Err(format!(
                    "{variant}: Maker claims joints {}, expected {}",
                    fmt_set(&maker_joints),
                    fmt_set(&expected)
                ));
            }
            if run.last.maker_has_won() {
                return Err(format!("{variant}: Maker completes a combination"));
            }
            let residue = run.last.reduce();
            let combos = residue.hypergraph.combos();
            if class == VertexClass::M21 {
                let other = self.other_input(variant);
                let ok = combos.len() == 1 && {
                    let c = combos.iter().next().unwrap();
                    c.len() == 3
                        && c.contains(&other.p)
                        && c.contains(&other.q)
                        && c.iter().any(|x| self.spec.is_interior(x))
                        && residue.hypergraph.squares() == c
                };
                if !ok {
                    return Err(format!("{variant}: residue is not a single 3-square combination"));
                }
            } else if let Some(c) = combos.iter().next() {
                return Err(format!("{variant}: residual combination {}", fmt_set(c)));
            }
        }
        Ok(())
    }

    fn other_input(&self, variant: Variant) -> &super::PortSlot {
        let role = if variant == Variant::EnterA { 'b' } else { 'a' };
        self.spec.port(role).expect("two-input class")
    }

    fn check_threats(&self) -> CheckResult {
        let class = self.spec.class;
        for &variant in Variant::for_class(class) {
            let run = self.run(variant)?;
            let steps = &self.spec.sequences[&variant];
            for (k, (pos, step)) in run.before.iter().zip(steps).enumerate() {
                if step.mover != Turn::Breaker {
                    continue;
                }
                let game = pos.reduce();
                if class == VertexClass::B12 && k == 1 {
                    self.check_choice_point(pos, &game)
                        .map_err(|e| format!("{variant} step {}: {e}", k + 1))?;
                    continue;
                }
                let blocks = game.mate_in_one();
                let expected: SquareSet = [step.square.clone()].into_iter().collect();
                if blocks != expected {
                    return Err(format!(
                        "{variant} step {}: mate-in-one squares {}, expected {}",
                        k + 1,
                        fmt_set(&blocks),
                        fmt_set(&expected)
                    ));
                }
            }
        }
        Ok(())
    }

    fn check_choice_point(&self, pos: &Position, game: &GameSpec) -> CheckResult {
        let sq = |n: &str| Square::new(n);
        for pair in [["p_b", "x2"], ["x2", "x3"], ["x3", "p_c"]] {
            let c: SquareSet = pair.iter().map(|n| sq(n)).collect();
            if !game.hypergraph.combos().contains(&c) {
                return Err(format!("missing residual combination {}", fmt_set(&c)));
            }
        }
        let stoppers: SquareSet = pos
            .legal_moves()
            .into_iter()
            .filter(|y| {
                let after = pos.apply_move(y).expect("legal").reduce();
                after.mate_in_one().is_empty() && after.mate_in_two().is_empty()
            })
            .collect();
        let expected: SquareSet = [sq("x2"), sq("x3")].into_iter().collect();
        if stoppers != expected {
            return Err(format!(
                "squares stopping both double threats are {}, expected {{x2,x3}}",
                fmt_set(&stoppers)
            ));
        }
        Ok(())
    }

    fn check_puzzle_pieces(&self) -> CheckResult {
        if self.spec.class == VertexClass::B01 {
            return Ok(());
        }
        for p in self.h.squares() {
            let c = local_piece_pairing(self.spec, p).map_err(|e| e.to_string())?;
            let maker: SquareSet = [p.clone()].into_iter().collect();
            check_piece_traits(self.spec, &maker, &SquareSet::new(), &c).map_err(|e| format!("claim {p}: {e}"))?;
        }
        Ok(())
    }

    fn check_reentry(&self) -> CheckResult {
        let class = self.spec.class;
        if !matches!(class, VertexClass::M21 | VertexClass::B21) {
            return Ok(());
        }
        let out = self.spec.port('c').expect("output port");
        for &variant in Variant::for_class(class) {
            let run = self.run(variant)?;
            let other = self.other_input(variant);
            let found = self.spec.interiors.iter().any(|x| {
                let wanted = match class {
                    VertexClass::M21 => run.last.is_unclaimed(x),
                    _ => run.last.breaker_set().contains(x),
                };
                let combo: SquareSet = [&other.p, &other.q, &out.p, &out.q, x].into_iter().cloned().collect();
                wanted && self.h.combos().contains(&combo)
            });
            if !found {
                return Err(format!(
                    "{variant}: no combination {{p_{r},q_{r},p_c,q_c,x}} with x {}",
                    if class == VertexClass::M21 {
                        "left unclaimed"
                    } else {
                        "claimed by Breaker"
                    },
                    r = other.role
                ));
            }
        }
        Ok(())
    }

    fn check_minimality(&self) -> CheckResult {
        let pairing = self.spec.joint_pairing();
        for (a, b) in pairing.pairs() {
            let mut smaller = pairing.clone();
            smaller.remove_touching(a);
            if self.h.combos().iter().all(|c| smaller.blocks(c)) {
                return Err(format!("pair {{{a},{b}}} is not needed"));
            }
        }
        Ok(())
    }
}

/// The local game `(X_P(v), F_P(v))` for given claims inside one gadget.
pub(crate) fn local_restriction(spec: &GadgetSpec, maker: &SquareSet, breaker: &SquareSet) -> Result<GameSpec> {
    let h = Arc::new(spec.hypergraph()?);
    Ok(Position::new(h, maker.clone(), breaker.clone(), Turn::Maker)?.reduce())
}

/// The puzzle piece pairing `C(v, p)` for a single Maker claim `p` inside
/// the gadget, built case by case: interior, input joint, output joint.
pub fn local_piece_pairing(spec: &GadgetSpec, p: &Square) -> Result<Pairing> {
    if spec.class == VertexClass::B01 {
        return Err(Error::InvalidArgument(
            "no puzzle piece construction for the start".into(),
        ));
    }
    let x = |i: usize| spec.interior(i).clone();
    if spec.is_interior(p) {
        return Ok(spec.joint_pairing());
    }
    let port = spec
        .port_of(p)
        .ok_or_else(|| Error::InvalidArgument(format!("{p} is not a square of {}", spec.class)))?;
    let q = port.other_joint(p).expect("joint").clone();
    let mut c = Pairing::from_pairs(
        spec.ports
            .iter()
            .filter(|e| e.role != port.role)
            .map(|e| (e.p.clone(), e.q.clone())),
    )?;
    match (port.direction, spec.class) {
        (Direction::In, VertexClass::M12) => {
            c.insert(q, x(1))?;
            c.insert(x(2), x(4))?;
        }
        (Direction::In, _) => c.insert(q, x(1))?,
        (Direction::Out, VertexClass::B12) => c.insert(x(1), x(4))?,
        (Direction::Out, VertexClass::M12) => {
            let partner = if port.role == 'b' { x(1) } else { x(2) };
            c.insert(partner, x(5))?;
        }
        (Direction::Out, _) => {}
    }
    Ok(c)
}

/// Checks the three puzzle-piece traits of `c` for the gadget with the
/// given local claims: complete on the restriction, keeps every surviving
/// joint pair, and leaves half-claimed outgoing arcs uncovered.
pub fn check_piece_traits(
    spec: &GadgetSpec,
    maker: &SquareSet,
    breaker: &SquareSet,
    c: &Pairing,
) -> std::result::Result<(), String> {
    let game = local_restriction(spec, maker, breaker).map_err(|e| e.to_string())?;
    if !c.covered().is_subset(game.hypergraph.squares()) {
        return Err(format!("{c} covers a claimed square"));
    }
    if let Some(f) = game.hypergraph.combos().iter().find(|f| !c.blocks(f)) {
        return Err(format!("{c} does not block {}", fmt_set(f)));
    }
    let covered = c.covered();
    let claimed: BTreeSet<&Square> = maker.iter().chain(breaker).collect();
    for port in &spec.ports {
        let (p_free, q_free) = (!claimed.contains(&port.p), !claimed.contains(&port.q));
        if p_free && q_free && !c.contains_pair(&port.p, &port.q) {
            return Err(format!("{c} misses the joint pair of {}", port.role));
        }
        let half = !(p_free && q_free);
        if port.direction == Direction::Out && half && (covered.contains(&port.p) || covered.contains(&port.q)) {
            return Err(format!("{c} covers a joint of half-claimed arc {}", port.role));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::squares;

    fn spec(class: VertexClass) -> GadgetSpec {
        GadgetLibrary::builtin().spec(class).clone()
    }

    #[test]
    fn shipped_library_passes() {
        let report = validate_library(&GadgetLibrary::builtin());
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn oversized_combo_fails_shape() {
        let mut s = spec(VertexClass::N11);
        s.combos.insert(squares(["p_a", "q_a", "p_b", "q_b", "x1", "x2"]));
        let report = validate_gadget(&s);
        assert!(!report.outcome(VertexClass::N11, Check::G1).unwrap().passed);
    }

    #[test]
    fn single_big_combo_n11_fails() {
        let s = GadgetSpec::with_combos(VertexClass::N11, [["p_a", "q_a", "x1", "p_b", "q_b"]]);
        let report = validate_gadget(&s);
        let g3 = report.outcome(VertexClass::N11, Check::G3).unwrap().passed;
        let g4 = report.outcome(VertexClass::N11, Check::G4).unwrap().passed;
        assert!(!(g3 && g4));
    }

    #[test]
    fn local_piece_examples() {
        let n11 = spec(VertexClass::N11);
        assert_eq!(
            local_piece_pairing(&n11, &Square::new("x1")).unwrap().to_string(),
            "{{p_a,q_a},{p_b,q_b}}"
        );
        assert_eq!(
            local_piece_pairing(&n11, &Square::new("p_a")).unwrap().to_string(),
            "{{p_b,q_b},{q_a,x1}}"
        );
        let m21 = spec(VertexClass::M21);
        assert_eq!(
            local_piece_pairing(&m21, &Square::new("p_c")).unwrap().to_string(),
            "{{p_a,q_a},{p_b,q_b}}"
        );
        assert!(local_piece_pairing(&spec(VertexClass::B01), &Square::new("x1")).is_err());
    }

    #[test]
    fn traits_reject_covering_a_half_claimed_output() {
        let n11 = spec(VertexClass::N11);
        let bad = Pairing::from_pairs([
            (Square::new("p_a"), Square::new("q_a")),
            (Square::new("q_b"), Square::new("x2")),
        ])
        .unwrap();
        let err = check_piece_traits(&n11, &squares(["p_b"]), &SquareSet::new(), &bad).unwrap_err();
        assert!(err.contains("half-claimed"), "{err}");
    }
}
