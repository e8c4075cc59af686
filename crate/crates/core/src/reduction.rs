//! From a convertible Geography instance to its associated Maker-Breaker
//! game, plus restriction to single gadgets and 5-uniformization.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gadgets::{GadgetLibrary, GadgetSpec};
use crate::geography::{classify_all, validate_convertible, Edge, GgInstance, Vertex, VertexClass};
use crate::hypergraph::{GameSpec, Hypergraph, Pairing, Position, Square, SquareSet, Turn};

/// Where every square of the associated game comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionMap {
    to_global: BTreeMap<(Vertex, Square), Square>,
    to_local: BTreeMap<(Vertex, Square), Square>,
    joints: BTreeMap<Edge, (Square, Square)>,
    owners: BTreeMap<Square, Vec<Vertex>>,
    classes: BTreeMap<Vertex, VertexClass>,
    roles: BTreeMap<Vertex, BTreeMap<char, Edge>>,
    combos: BTreeMap<Vertex, Vec<SquareSet>>,
}

impl ReductionMap {
    pub fn global(&self, v: &Vertex, local: &Square) -> Option<&Square> {
        self.to_global.get(&(v.clone(), local.clone()))
    }

    pub fn local(&self, v: &Vertex, global: &Square) -> Option<&Square> {
        self.to_local.get(&(v.clone(), global.clone()))
    }

    /// `(p_e, q_e)` of an arc.
    pub fn joint(&self, e: &Edge) -> Option<(&Square, &Square)> {
        self.joints.get(e).map(|(p, q)| (p, q))
    }

    pub fn joints(&self) -> impl Iterator<Item = (&Edge, &Square, &Square)> {
        self.joints.iter().map(|(e, (p, q))| (e, p, q))
    }

    /// The arc a joint square belongs to.
    pub fn arc_of(&self, sq: &Square) -> Option<&Edge> {
        self.joints
            .iter()
            .find(|(_, (p, q))| p == sq || q == sq)
            .map(|(e, _)| e)
    }

    /// Vertices whose gadget contains `sq`: one for interiors, two for joints.
    pub fn owners(&self, sq: &Square) -> &[Vertex] {
        self.owners.get(sq).map_or(&[], Vec::as_slice)
    }

    pub fn class(&self, v: &Vertex) -> Option<VertexClass> {
        self.classes.get(v).copied()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Vertex> {
        self.classes.keys()
    }

    /// The arc playing port `role` in `v`'s gadget.
    pub fn arc_of_role(&self, v: &Vertex, role: char) -> Option<&Edge> {
        self.roles.get(v)?.get(&role)
    }

    pub fn role_of_arc(&self, v: &Vertex, e: &Edge) -> Option<char> {
        self.roles.get(v)?.iter().find(|(_, a)| *a == e).map(|(r, _)| *r)
    }

    /// `X(v)` in global names.
    pub fn vertex_squares(&self, v: &Vertex) -> SquareSet {
        self.to_global
            .range((v.clone(), Square::new(""))..)
            .take_while(|((w, _), _)| w == v)
            .map(|(_, g)| g.clone())
            .collect()
    }

    /// `F(v)` in global names.
    pub fn vertex_combos(&self, v: &Vertex) -> &[SquareSet] {
        self.combos.get(v).map_or(&[], Vec::as_slice)
    }

    /// Sidecar text: `joint <from> <to> <p> <q>` and
    /// `interior <vertex> <local> <global>` lines.
    pub fn write(&self) -> String {
        let mut out = String::new();
        for (e, (p, q)) in &self.joints {
            writeln!(out, "joint {} {} {p} {q}", e.from, e.to).unwrap();
        }
        for ((v, local), global) in &self.to_global {
            if self.owners(global).len() == 1 {
                writeln!(out, "interior {v} {local} {global}").unwrap();
            }
        }
        out
    }
}

/// The associated game `(X, F, m)` of an instance.
#[derive(Clone, Debug)]
pub struct AssociatedGame {
    pub spec: GameSpec,
    pub map: ReductionMap,
    pub instance: GgInstance,
    pub library: GadgetLibrary,
    /// Square and combination insertions performed while building.
    pub work: usize,
}

impl AssociatedGame {
    pub fn gadget(&self, v: &Vertex) -> Option<&GadgetSpec> {
        self.map.class(v).map(|c| self.library.spec(c))
    }

    /// `(X_P(v), F_P(v))`.
    pub fn restrict(&self, p: &Position, v: &Vertex) -> Result<GameSpec> {
        restrict(p, v, &self.map)
    }

    pub fn start_position(&self) -> Position {
        Position::start(&self.spec)
    }
}

/// Port roles of each vertex: inputs in arc order take `a`, `b`; outputs
/// follow the class signature.
fn assign_roles(inst: &GgInstance, v: &Vertex, class: VertexClass) -> BTreeMap<char, Edge> {
    let g = inst.graph();
    let ins: Vec<Edge> = g.in_edges(v).cloned().collect();
    let outs: Vec<Edge> = g.out_edges(v).cloned().collect();
    let (in_roles, out_roles): (&[char], &[char]) = match class {
        VertexClass::M12 | VertexClass::B12 => (&['a'], &['b', 'c']),
        VertexClass::M21 | VertexClass::B21 => (&['a', 'b'], &['c']),
        VertexClass::N11 => (&['a'], &['b']),
        VertexClass::B01 => (&[], &['a']),
    };
    in_roles
        .iter()
        .copied()
        .zip(ins)
        .chain(out_roles.iter().copied().zip(outs))
        .collect()
}

pub fn build_associated_game(inst: &GgInstance, lib: &GadgetLibrary) -> Result<AssociatedGame> {
    let report = validate_convertible(inst, false);
    if let Some(v) = report.violations.first() {
        return Err(Error::InvalidInstance(format!("clause {}: {}", v.clause, v.detail)));
    }
    let classes = classify_all(inst)?;
    let mut map = ReductionMap {
        to_global: BTreeMap::new(),
        to_local: BTreeMap::new(),
        joints: BTreeMap::new(),
        owners: BTreeMap::new(),
        classes: classes.clone(),
        roles: BTreeMap::new(),
        combos: BTreeMap::new(),
    };
    let mut squares = SquareSet::new();
    let mut work = 0;
    let fresh = |name: String, squares: &mut SquareSet| -> Result<Square> {
        let sq = Square::new(name);
        if !squares.insert(sq.clone()) {
            return Err(Error::InvalidInstance(format!("square name {sq} is not unique")));
        }
        Ok(sq)
    };
    for e in inst.graph().arcs() {
        let p = fresh(format!("{e}#p"), &mut squares)?;
        let q = fresh(format!("{e}#q"), &mut squares)?;
        map.joints.insert(e.clone(), (p, q));
        work += 2;
    }
    let mut combos = BTreeSet::new();
    for (v, &class) in &classes {
        let spec = lib.spec(class);
        let roles = assign_roles(inst, v, class);
        let mut bind = |local: &Square, global: Square| {
            map.to_local.insert((v.clone(), global.clone()), local.clone());
            map.owners.entry(global.clone()).or_default().push(v.clone());
            map.to_global.insert((v.clone(), local.clone()), global);
        };
        for (i, x) in spec.interiors.iter().enumerate() {
            bind(x, fresh(format!("{v}.x{}", i + 1), &mut squares)?);
            work += 1;
        }
        for port in &spec.ports {
            let arc = roles.get(&port.role).ok_or_else(|| {
                Error::InvalidLibrary(format!("{class} port {} has no matching arc at {v}", port.role))
            })?;
            let (p, q) = map.joints[arc].clone();
            bind(&port.p, p);
            bind(&port.q, q);
            work += 2;
        }
        let mut local_combos = Vec::new();
        for combo in &spec.combos {
            let global: SquareSet = combo
                .iter()
                .map(|s| {
                    map.to_global
                        .get(&(v.clone(), s.clone()))
                        .cloned()
                        .ok_or_else(|| Error::InvalidLibrary(format!("{class} combo uses unknown {s}")))
                })
                .collect::<Result<_>>()?;
            work += global.len();
            combos.insert(global.clone());
            local_combos.push(global);
        }
        map.combos.insert(v.clone(), local_combos);
        map.roles.insert(v.clone(), roles);
    }
    let spec = GameSpec::new(Hypergraph::new(squares, combos)?, Turn::Maker);
    Ok(AssociatedGame {
        spec,
        map,
        instance: inst.clone(),
        library: lib.clone(),
        work,
    })
}

/// `(X_P(v), F_P(v))`: the unclaimed squares of `v`'s gadget and its
/// unbroken combinations minus Maker's squares.
pub fn restrict(p: &Position, v: &Vertex, m: &ReductionMap) -> Result<GameSpec> {
    if m.class(v).is_none() {
        return Err(Error::InvalidArgument(format!("unknown vertex {v}")));
    }
    let squares: SquareSet = m.vertex_squares(v).into_iter().filter(|s| !p.is_claimed(s)).collect();
    let combos = m
        .vertex_combos(v)
        .iter()
        .filter(|c| c.is_disjoint(p.breaker_set()))
        .map(|c| c.difference(p.maker_set()).cloned().collect());
    Ok(GameSpec::new(
        Hypergraph::from_parts_unchecked(squares, combos.collect()),
        p.to_move(),
    ))
}

/// One pair per arc.
pub fn global_joint_pairing(g: &AssociatedGame) -> Pairing {
    Pairing::from_pairs(g.map.joints().map(|(_, p, q)| (p.clone(), q.clone()))).expect("joint squares are distinct")
}

/// Pads every combination to size 5: a combination `F` with `|F| < 5` is
/// replaced by `F ∪ {y}` and `F ∪ {z}` for fresh `y, z`, repeatedly.
/// Combinations are processed smallest first; fresh squares are `u5#<n>`.
pub fn uniformize5(g: &GameSpec) -> Result<GameSpec> {
    let h = &g.hypergraph;
    let mut combos: Vec<&SquareSet> = h.combos().iter().collect();
    if let Some(c) = combos.iter().find(|c| c.is_empty() || c.len() > 5) {
        return Err(Error::InvalidArgument(format!(
            "combination of size {} cannot be padded to 5",
            c.len()
        )));
    }
    combos.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let mut squares = h.squares().clone();
    let mut counter = 0usize;
    let mut fresh = |squares: &mut SquareSet| loop {
        counter += 1;
        let sq = Square::new(format!("u5#{counter}"));
        if squares.insert(sq.clone()) {
            return sq;
        }
    };
    let mut out = BTreeSet::new();
    let mut stack: Vec<SquareSet> = Vec::new();
    for c in combos {
        stack.push(c.clone());
        while let Some(f) = stack.pop() {
            if f.len() == 5 {
                out.insert(f);
                continue;
            }
            let (y, z) = (fresh(&mut squares), fresh(&mut squares));
            let mut fz = f.clone();
            fz.insert(z);
            let mut fy = f;
            fy.insert(y);
            stack.push(fz);
            stack.push(fy);
        }
    }
    Ok(GameSpec::new(Hypergraph::new(squares, out)?, g.to_move))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::squares;

    fn build(arcs: &[(&str, &str)]) -> AssociatedGame {
        let inst = GgInstance::from_arcs("s", arcs.iter().copied()).unwrap();
        build_associated_game(&inst, &GadgetLibrary::builtin()).unwrap()
    }

    #[test]
    fn square_counts() {
        let e1 = build(&[("s", "v"), ("v", "w"), ("w", "v")]);
        assert_eq!(e1.spec.hypergraph.squares().len(), 13);
        let e2 = build(&[("s", "v"), ("v", "w"), ("w", "x"), ("x", "w")]);
        assert_eq!(e2.spec.hypergraph.squares().len(), 16);
        assert_eq!(e1.spec.rank(), 5);
        assert_eq!(e1.spec.to_move, Turn::Maker);
    }

    #[test]
    fn joints_are_shared_by_both_endpoints() {
        let g = build(&[("s", "v"), ("v", "w"), ("w", "v")]);
        for (e, p, q) in g.map.joints() {
            for sq in [p, q] {
                let owners = g.map.owners(sq);
                assert_eq!(owners.len(), 2);
                assert!(owners.contains(&e.from) && owners.contains(&e.to));
            }
        }
        let v = Vertex::new("v");
        assert_eq!(g.map.global(&v, &Square::new("x1")).unwrap().name(), "v.x1");
        assert_eq!(g.map.arc_of_role(&v, 'c').unwrap().to_string(), "v->w");
        assert_eq!(g.map.arc_of_role(&v, 'a').unwrap().to_string(), "s->v");
    }

    #[test]
    fn joint_pairing_blocks_everything_outside_the_start() {
        let g = build(&[("s", "v"), ("v", "w"), ("w", "v")]);
        let c = global_joint_pairing(&g);
        assert_eq!(c.len(), 3);
        let s = Vertex::new("s");
        let start_combos: BTreeSet<&SquareSet> = g.map.vertex_combos(&s).iter().collect();
        for f in g.spec.hypergraph.combos() {
            if !start_combos.contains(f) {
                assert!(c.blocks(f), "{f:?}");
            }
        }
        assert!(start_combos.iter().any(|f| !c.blocks(f)));
    }

    #[test]
    fn restriction_of_a_fresh_game_is_the_gadget() {
        let g = build(&[("s", "v"), ("v", "w"), ("w", "v")]);
        let v = Vertex::new("v");
        let r = g.restrict(&g.start_position(), &v).unwrap();
        assert_eq!(r.hypergraph.squares().len(), 9);
        assert_eq!(r.hypergraph.combos().len(), 4);
        assert!(g.restrict(&g.start_position(), &Vertex::new("nope")).is_err());
    }

    #[test]
    fn non_convertible_instances_are_rejected() {
        let inst = GgInstance::from_arcs("s", [("s", "v"), ("s", "w"), ("v", "w"), ("w", "v")]).unwrap();
        assert!(matches!(
            build_associated_game(&inst, &GadgetLibrary::builtin()),
            Err(Error::InvalidInstance(_))
        ));
    }

    #[test]
    fn uniformize_pads_by_doubling() {
        let g = GameSpec::new(
            Hypergraph::from_combos([squares(["a", "b", "c"])]).unwrap(),
            Turn::Maker,
        );
        let u = uniformize5(&g).unwrap();
        assert_eq!(u.hypergraph.combos().len(), 4);
        assert_eq!(u.hypergraph.squares().len(), 9);
        assert!(u.hypergraph.is_uniform(5));
        let five = GameSpec::new(
            Hypergraph::from_combos([squares(["a", "b", "c", "d", "e"])]).unwrap(),
            Turn::Maker,
        );
        assert_eq!(uniformize5(&five).unwrap(), five);
        let six = GameSpec::new(
            Hypergraph::from_combos([squares(["a", "b", "c", "d", "e", "f"])]).unwrap(),
            Turn::Maker,
        );
        assert!(uniformize5(&six).is_err());
    }
}
