//! Generalized Geography: arenas, the original and revised rules, and the
//! structural checks that make an instance convertible into a
//! Maker-Breaker game.

mod format;
mod generate;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rustworkx_core::petgraph::graph::UnGraph;

use crate::error::{Error, Result};

pub use format::{parse_gg, write_gg};
pub use generate::{canonical_key, enumerate_instances, enumerate_up_to_iso, gen_convertible};

/// A vertex (a "word") of a Geography arena.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex(Arc<str>);

impl Vertex {
    pub fn new(name: impl AsRef<str>) -> Self {
        Vertex(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Vertex {
    fn from(s: &str) -> Self {
        Vertex::new(s)
    }
}

/// A directed arc `from -> to`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: Vertex,
    pub to: Vertex,
}

impl Edge {
    pub fn new(from: impl Into<Vertex>, to: impl Into<Vertex>) -> Self {
        Edge {
            from: from.into(),
            to: to.into(),
        }
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Digraph {
    vertices: BTreeSet<Vertex>,
    arcs: BTreeSet<Edge>,
}

impl Digraph {
    pub fn new(vertices: BTreeSet<Vertex>, arcs: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for e in arcs {
            if e.from == e.to {
                return Err(Error::InvalidInstance(format!("self-loop at {}", e.from)));
            }
            if !vertices.contains(&e.from) || !vertices.contains(&e.to) {
                return Err(Error::InvalidInstance(format!("arc {e} leaves the vertex set")));
            }
            if !set.insert(e.clone()) {
                return Err(Error::InvalidInstance(format!("duplicate arc {e}")));
            }
        }
        Ok(Digraph { vertices, arcs: set })
    }

    pub fn from_arcs(arcs: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let arcs: Vec<Edge> = arcs.into_iter().collect();
        let vertices = arcs.iter().flat_map(|e| [e.from.clone(), e.to.clone()]).collect();
        Digraph::new(vertices, arcs)
    }

    pub fn vertices(&self) -> &BTreeSet<Vertex> {
        &self.vertices
    }

    pub fn arcs(&self) -> &BTreeSet<Edge> {
        &self.arcs
    }

    pub fn contains_arc(&self, from: &Vertex, to: &Vertex) -> bool {
        self.arcs.contains(&Edge {
            from: from.clone(),
            to: to.clone(),
        })
    }

    /// Outgoing arcs of `v`, sorted by head.
    pub fn out_edges<'a>(&'a self, v: &'a Vertex) -> impl Iterator<Item = &'a Edge> + 'a {
        self.arcs.iter().filter(move |e| &e.from == v)
    }

    /// Incoming arcs of `v`, sorted by tail.
    pub fn in_edges<'a>(&'a self, v: &'a Vertex) -> impl Iterator<Item = &'a Edge> + 'a {
        self.arcs.iter().filter(move |e| &e.to == v)
    }

    pub fn successors<'a>(&'a self, v: &'a Vertex) -> impl Iterator<Item = &'a Vertex> + 'a {
        self.out_edges(v).map(|e| &e.to)
    }

    pub fn out_degree(&self, v: &Vertex) -> usize {
        self.out_edges(v).count()
    }

    pub fn in_degree(&self, v: &Vertex) -> usize {
        self.in_edges(v).count()
    }

    pub fn degree(&self, v: &Vertex) -> usize {
        self.in_degree(v) + self.out_degree(v)
    }

    fn undirected_neighbors(&self) -> BTreeMap<&Vertex, Vec<&Vertex>> {
        let mut nb: BTreeMap<&Vertex, Vec<&Vertex>> = self.vertices.iter().map(|v| (v, Vec::new())).collect();
        for e in &self.arcs {
            nb.get_mut(&e.from).unwrap().push(&e.to);
            nb.get_mut(&e.to).unwrap().push(&e.from);
        }
        nb
    }

    pub fn is_weakly_connected(&self) -> bool {
        let Some(first) = self.vertices.iter().next() else {
            return false;
        };
        let nb = self.undirected_neighbors();
        let mut seen = BTreeSet::from([first]);
        let mut queue = VecDeque::from([first]);
        while let Some(v) = queue.pop_front() {
            for w in &nb[v] {
                if seen.insert(*w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == self.vertices.len()
    }

    /// Planarity of the underlying undirected graph.
    pub fn is_planar(&self) -> bool {
        let index: BTreeMap<&Vertex, u32> = self.vertices.iter().enumerate().map(|(i, v)| (v, i as u32)).collect();
        let mut edges = BTreeSet::new();
        for e in &self.arcs {
            let (a, b) = (index[&e.from], index[&e.to]);
            edges.insert((a.min(b), a.max(b)));
        }
        let mut g = UnGraph::<(), ()>::with_capacity(self.vertices.len(), edges.len());
        for _ in 0..self.vertices.len() {
            g.add_node(());
        }
        g.extend_with_edges(edges);
        rustworkx_core::planar::is_planar(&g)
    }
}

/// An instance `(G, s)` of Generalized Geography.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GgInstance {
    graph: Digraph,
    start: Vertex,
}

impl GgInstance {
    /// Requires `start` in the graph and the graph weakly connected.
    pub fn new(graph: Digraph, start: Vertex) -> Result<Self> {
        if !graph.vertices().contains(&start) {
            return Err(Error::InvalidInstance(format!("start {start} is not a vertex")));
        }
        if !graph.is_weakly_connected() {
            return Err(Error::InvalidInstance("graph is not weakly connected".into()));
        }
        Ok(GgInstance { graph, start })
    }

    /// Convenience constructor from `(from, to)` name pairs.
    pub fn from_arcs<'a>(start: &str, arcs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let mut vertices = BTreeSet::from([Vertex::new(start)]);
        let arcs: Vec<Edge> = arcs.into_iter().map(|(a, b)| Edge::new(a, b)).collect();
        vertices.extend(arcs.iter().flat_map(|e| [e.from.clone(), e.to.clone()]));
        GgInstance::new(Digraph::new(vertices, arcs)?, Vertex::new(start))
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn start(&self) -> &Vertex {
        &self.start
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Player {
    Alice,
    Bob,
}

impl Player {
    /// The player who makes the mark with this 0-based index.
    pub fn of_mark(index: usize) -> Player {
        if index.is_multiple_of(2) {
            Player::Alice
        } else {
            Player::Bob
        }
    }

    pub fn other(self) -> Player {
        match self {
            Player::Alice => Player::Bob,
            Player::Bob => Player::Alice,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Alice => "alice",
            Player::Bob => "bob",
        })
    }
}

/// Original rules forbid marking a vertex twice; revised rules allow it but
/// the player who does so loses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ruleset {
    Original,
    Revised,
}

/// A play in progress: the marks so far.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GgState {
    pub marked: Vec<Vertex>,
    pub ruleset: Ruleset,
}

impl GgState {
    pub fn new(ruleset: Ruleset) -> Self {
        GgState {
            marked: Vec::new(),
            ruleset,
        }
    }

    pub fn with_marks(ruleset: Ruleset, marks: &[&str]) -> Self {
        GgState {
            marked: marks.iter().map(Vertex::new).collect(),
            ruleset,
        }
    }

    /// The final mark repeats an earlier one (revised rules only).
    pub fn ended_by_revisit(&self) -> bool {
        match self.marked.split_last() {
            Some((last, rest)) => rest.contains(last),
            None => false,
        }
    }

    fn check(&self, inst: &GgInstance) -> Result<()> {
        let Some(first) = self.marked.first() else {
            return Ok(());
        };
        if first != inst.start() {
            return Err(Error::InvalidArgument(format!("first mark {first} is not the start")));
        }
        for w in self.marked.windows(2) {
            if !inst.graph().contains_arc(&w[0], &w[1]) {
                return Err(Error::InvalidArgument(format!("no arc {}->{}", w[0], w[1])));
            }
        }
        let n = self.marked.len();
        let mut seen = BTreeSet::new();
        for (i, v) in self.marked.iter().enumerate() {
            if !seen.insert(v) {
                let allowed = self.ruleset == Ruleset::Revised && i + 1 == n;
                if !allowed {
                    return Err(Error::InvalidArgument(format!("vertex {v} marked twice")));
                }
            }
        }
        Ok(())
    }

    pub fn to_move(&self) -> Player {
        Player::of_mark(self.marked.len())
    }

    pub fn play(&self, inst: &GgInstance, v: &Vertex) -> Result<GgState> {
        if !legal_moves_gg(inst, self)?.contains(v) {
            return Err(Error::InvalidMove(format!("{v} is not a legal mark")));
        }
        let mut next = self.clone();
        next.marked.push(v.clone());
        Ok(next)
    }
}

/// Legal marks in `st`. Empty once the game is over.
pub fn legal_moves_gg(inst: &GgInstance, st: &GgState) -> Result<BTreeSet<Vertex>> {
    st.check(inst)?;
    let Some(last) = st.marked.last() else {
        return Ok(BTreeSet::from([inst.start().clone()]));
    };
    if st.ended_by_revisit() {
        return Ok(BTreeSet::new());
    }
    let succ = inst.graph().successors(last).cloned();
    Ok(match st.ruleset {
        Ruleset::Original => succ.filter(|w| !st.marked.contains(w)).collect(),
        Ruleset::Revised => succ.collect(),
    })
}

/// The loser of a finished game: the player who revisited, or the player to
/// move who has no legal mark.
pub fn gg_loser_on_move(inst: &GgInstance, st: &GgState) -> Result<Player> {
    st.check(inst)?;
    if st.ruleset == Ruleset::Revised && st.ended_by_revisit() {
        return Ok(Player::of_mark(st.marked.len() - 1));
    }
    if legal_moves_gg(inst, st)?.is_empty() {
        return Ok(st.to_move());
    }
    Err(Error::InvalidArgument("game is not over".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

/// The 2-coloring `V_A ⊔ V_B` with the start vertex in `V_B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    pub side_a: BTreeSet<Vertex>,
    pub side_b: BTreeSet<Vertex>,
}

impl Bipartition {
    pub fn side(&self, v: &Vertex) -> Option<Side> {
        if self.side_a.contains(v) {
            Some(Side::A)
        } else if self.side_b.contains(v) {
            Some(Side::B)
        } else {
            None
        }
    }
}

pub fn bipartition_from_start(inst: &GgInstance) -> Result<Bipartition> {
    two_coloring(inst.graph(), inst.start(), Side::B)
}

/// Colors the component of `anchor` with `anchor` on `anchor_side`.
pub fn two_coloring(g: &Digraph, anchor: &Vertex, anchor_side: Side) -> Result<Bipartition> {
    let nb = g.undirected_neighbors();
    let mut color: BTreeMap<&Vertex, Side> = BTreeMap::from([(anchor, anchor_side)]);
    let mut queue = VecDeque::from([anchor]);
    while let Some(v) = queue.pop_front() {
        let flipped = match color[v] {
            Side::A => Side::B,
            Side::B => Side::A,
        };
        for w in &nb[v] {
            match color.get(w) {
                None => {
                    color.insert(w, flipped);
                    queue.push_back(w);
                }
                Some(c) if *c != flipped => return Err(Error::NotBipartite(format!("odd cycle through {v} and {w}"))),
                _ => {}
            }
        }
    }
    let mut bip = Bipartition {
        side_a: BTreeSet::new(),
        side_b: BTreeSet::new(),
    };
    for (v, c) in color {
        match c {
            Side::A => bip.side_a.insert(v.clone()),
            Side::B => bip.side_b.insert(v.clone()),
        };
    }
    Ok(bip)
}

/// Which structural requirement an instance violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Clause {
    /// Bipartite and weakly connected.
    BipartiteConnected,
    /// `|δ(v)| ≤ 3` everywhere.
    DegreeBound,
    /// Non-start vertices have in- and out-degree in `{1, 2}`.
    InnerDegrees,
    /// The start has in-degree 0 and the required out-degree.
    StartDegrees,
    Planar,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::BipartiteConnected => "1 (bipartite, weakly connected)",
            Clause::DegreeBound => "2 (total degree <= 3)",
            Clause::InnerDegrees => "3 (in/out degree in {1,2})",
            Clause::StartDegrees => "4 (start degrees)",
            Clause::Planar => "planar",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub clause: Clause,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConvertibilityReport {
    pub violations: Vec<Violation>,
}

impl ConvertibilityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violates(&self, clause: Clause) -> bool {
        self.violations.iter().any(|v| v.clause == clause)
    }
}

impl fmt::Display for ConvertibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return writeln!(f, "PASS");
        }
        writeln!(f, "FAIL")?;
        for v in &self.violations {
            writeln!(f, "clause {}: {}", v.clause, v.detail)?;
        }
        Ok(())
    }
}

fn validate(inst: &GgInstance, start_out: &[usize], require_planar: bool) -> ConvertibilityReport {
    let g = inst.graph();
    let s = inst.start();
    let mut violations = Vec::new();
    let mut push = |clause, detail: String| violations.push(Violation { clause, detail });
    if !g.is_weakly_connected() {
        push(Clause::BipartiteConnected, "not weakly connected".into());
    }
    if let Err(e) = bipartition_from_start(inst) {
        push(Clause::BipartiteConnected, e.to_string());
    }
    for v in g.vertices() {
        let (din, dout) = (g.in_degree(v), g.out_degree(v));
        if din + dout > 3 {
            push(Clause::DegreeBound, format!("{v} has {} incident arcs", din + dout));
        }
        if v == s {
            if din != 0 || !start_out.contains(&dout) {
                push(
                    Clause::StartDegrees,
                    format!("start {v} has in-degree {din}, out-degree {dout}"),
                );
            }
        } else if !(1..=2).contains(&din) || !(1..=2).contains(&dout) {
            push(
                Clause::InnerDegrees,
                format!("{v} has in-degree {din}, out-degree {dout}"),
            );
        }
    }
    if require_planar && !g.is_planar() {
        push(Clause::Planar, "underlying graph is not planar".into());
    }
    ConvertibilityReport { violations }
}

/// The structural requirements of a convertible instance: start out-degree
/// exactly 1.
pub fn validate_convertible(inst: &GgInstance, require_planar: bool) -> ConvertibilityReport {
    validate(inst, &[1], require_planar)
}

/// The same requirements, but the start may have out-degree 1 or 2.
pub fn validate_hard_form(inst: &GgInstance, require_planar: bool) -> ConvertibilityReport {
    validate(inst, &[1, 2], require_planar)
}

fn fresh_vertex(g: &Digraph, base: &str) -> Vertex {
    let mut name = base.to_string();
    while g.vertices().contains(&Vertex::new(&name)) {
        name.push('\'');
    }
    Vertex::new(name)
}

/// Replaces a start of out-degree 2 by a forced two-step prefix
/// `s -> x1 -> x2` that fans out to the original successors.
pub fn normalize_start(inst: &GgInstance) -> Result<GgInstance> {
    let g = inst.graph();
    let s = inst.start();
    let succ: Vec<Vertex> = g.successors(s).cloned().collect();
    match succ.len() {
        1 => Ok(inst.clone()),
        2 => {
            let x1 = fresh_vertex(g, "x1");
            let mut vertices = g.vertices().clone();
            vertices.insert(x1.clone());
            let tmp = Digraph::new(vertices.clone(), [])?;
            let x2 = fresh_vertex(&tmp, "x2");
            vertices.insert(x2.clone());
            let mut arcs: Vec<Edge> = g.arcs().iter().filter(|e| &e.from != s).cloned().collect();
            arcs.push(Edge {
                from: s.clone(),
                to: x1.clone(),
            });
            arcs.push(Edge {
                from: x1,
                to: x2.clone(),
            });
            for w in succ {
                arcs.push(Edge {
                    from: x2.clone(),
                    to: w,
                });
            }
            GgInstance::new(Digraph::new(vertices, arcs)?, s.clone())
        }
        d => Err(Error::InvalidArgument(format!(
            "start has out-degree {d}, expected 1 or 2"
        ))),
    }
}

/// The six vertex classes of the reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexClass {
    M12,
    M21,
    B12,
    B21,
    N11,
    B01,
}

impl VertexClass {
    pub const ALL: [VertexClass; 6] = [
        VertexClass::M12,
        VertexClass::M21,
        VertexClass::B12,
        VertexClass::B21,
        VertexClass::N11,
        VertexClass::B01,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VertexClass::M12 => "M12",
            VertexClass::M21 => "M21",
            VertexClass::B12 => "B12",
            VertexClass::B21 => "B21",
            VertexClass::N11 => "N11",
            VertexClass::B01 => "B01",
        }
    }

    /// `(in-degree, out-degree)` of the class.
    pub fn degrees(self) -> (usize, usize) {
        match self {
            VertexClass::M12 | VertexClass::B12 => (1, 2),
            VertexClass::M21 | VertexClass::B21 => (2, 1),
            VertexClass::N11 => (1, 1),
            VertexClass::B01 => (0, 1),
        }
    }
}

impl fmt::Display for VertexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VertexClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VertexClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown vertex class `{s}`")))
    }
}

pub fn classify_vertex(inst: &GgInstance, bip: &Bipartition, v: &Vertex) -> Result<VertexClass> {
    let g = inst.graph();
    let side = bip
        .side(v)
        .ok_or_else(|| Error::InvalidArgument(format!("{v} is not a vertex")))?;
    let degrees = (g.in_degree(v), g.out_degree(v));
    if v == inst.start() {
        return match degrees {
            (0, 1) => Ok(VertexClass::B01),
            (i, o) => Err(Error::InvalidInstance(format!(
                "start {v} has in-degree {i}, out-degree {o}"
            ))),
        };
    }
    match (side, degrees) {
        (_, (1, 1)) => Ok(VertexClass::N11),
        (Side::A, (1, 2)) => Ok(VertexClass::M12),
        (Side::A, (2, 1)) => Ok(VertexClass::M21),
        (Side::B, (1, 2)) => Ok(VertexClass::B12),
        (Side::B, (2, 1)) => Ok(VertexClass::B21),
        (_, (i, o)) => Err(Error::InvalidInstance(format!(
            "{v} has in-degree {i}, out-degree {o}, outside the six classes"
        ))),
    }
}

pub fn classify_all(inst: &GgInstance) -> Result<BTreeMap<Vertex, VertexClass>> {
    let bip = bipartition_from_start(inst)?;
    inst.graph()
        .vertices()
        .iter()
        .map(|v| Ok((v.clone(), classify_vertex(inst, &bip, v)?)))
        .collect()
}
