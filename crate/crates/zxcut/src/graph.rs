use crate::error::Error;
use crate::phase::Phase;
use crate::scalar::ExactScalar;
use std::collections::{BTreeMap, BTreeSet};

/// Vertex identifier. Ids are assigned sequentially and never reused, so a
/// vertex keeps a stable label across rewrites within one run.
pub type V = u32;

#[derive(Copy, Clone, PartialEq, Eq, Debug, Hash)]
pub enum SpiderKind {
    Z,
    X,
}

#[derive(Copy, Clone, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Plain,
    Hadamard,
}

impl EdgeKind {
    /// Composition of two wire segments: Hadamards cancel in pairs.
    pub fn xor(self, other: EdgeKind) -> EdgeKind {
        if (self == EdgeKind::Hadamard) != (other == EdgeKind::Hadamard) {
            EdgeKind::Hadamard
        } else {
            EdgeKind::Plain
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub struct Spider {
    pub kind: SpiderKind,
    pub phase: Phase,
    pub boundary: bool,
}

/// Multigraph edge record between a fixed pair of endpoints.
#[derive(Copy, Clone, PartialEq, Eq, Debug, Default)]
pub struct EdgeCounts {
    pub plain: u32,
    pub hadamard: u32,
}

impl EdgeCounts {
    pub fn total(&self) -> u32 {
        self.plain + self.hadamard
    }

    pub fn get(&self, kind: EdgeKind) -> u32 {
        match kind {
            EdgeKind::Plain => self.plain,
            EdgeKind::Hadamard => self.hadamard,
        }
    }

    fn get_mut(&mut self, kind: EdgeKind) -> &mut u32 {
        match kind {
            EdgeKind::Plain => &mut self.plain,
            EdgeKind::Hadamard => &mut self.hadamard,
        }
    }
}

/// An open ZX-diagram: phased spiders joined by plain or Hadamard wires,
/// an ordered boundary (inputs then outputs) and an exact global scalar.
///
/// Parallel edges and self-loops are allowed; only the rewrite engine
/// normalises them away.
#[derive(Clone, Debug)]
pub struct Diagram {
    spiders: BTreeMap<V, Spider>,
    adj: BTreeMap<V, BTreeMap<V, EdgeCounts>>,
    inputs: Vec<V>,
    outputs: Vec<V>,
    scalar: ExactScalar,
    next_id: V,
    marks: BTreeMap<String, BTreeSet<V>>,
}

impl Default for Diagram {
    fn default() -> Self {
        Diagram::new()
    }
}

impl Diagram {
    pub fn new() -> Diagram {
        Diagram {
            spiders: BTreeMap::new(),
            adj: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            scalar: ExactScalar::one(),
            next_id: 0,
            marks: BTreeMap::new(),
        }
    }

    // ------------------------------------------------------------ vertices

    pub fn add_spider(&mut self, kind: SpiderKind, phase: Phase) -> V {
        self.add_vertex(Spider { kind, phase, boundary: false })
    }

    pub fn add_input(&mut self) -> V {
        let v = self.add_boundary_vertex();
        self.inputs.push(v);
        v
    }

    pub fn add_output(&mut self) -> V {
        let v = self.add_boundary_vertex();
        self.outputs.push(v);
        v
    }

    /// Boundary-flagged vertex not yet listed as an input or output; the
    /// caller is responsible for placing it via `set_inputs`/`set_outputs`.
    pub fn add_boundary_vertex(&mut self) -> V {
        self.add_vertex(Spider { kind: SpiderKind::Z, phase: Phase::ZERO, boundary: true })
    }

    fn add_vertex(&mut self, s: Spider) -> V {
        let v = self.next_id;
        self.next_id += 1;
        self.spiders.insert(v, s);
        self.adj.insert(v, BTreeMap::new());
        v
    }

    /// Remove a vertex together with all incident edges.
    pub fn remove_vertex(&mut self, v: V) {
        if let Some(nbrs) = self.adj.remove(&v) {
            for (n, _) in nbrs {
                if n != v {
                    self.adj.get_mut(&n).map(|m| m.remove(&v));
                }
            }
        }
        self.spiders.remove(&v);
        for set in self.marks.values_mut() {
            set.remove(&v);
        }
        self.inputs.retain(|&x| x != v);
        self.outputs.retain(|&x| x != v);
    }

    pub fn contains(&self, v: V) -> bool {
        self.spiders.contains_key(&v)
    }

    pub fn spider(&self, v: V) -> &Spider {
        &self.spiders[&v]
    }

    pub fn kind(&self, v: V) -> SpiderKind {
        self.spiders[&v].kind
    }

    pub fn set_kind(&mut self, v: V, kind: SpiderKind) {
        self.spiders.get_mut(&v).unwrap().kind = kind;
    }

    pub fn phase(&self, v: V) -> Phase {
        self.spiders[&v].phase
    }

    pub fn set_phase(&mut self, v: V, p: Phase) {
        self.spiders.get_mut(&v).unwrap().phase = p;
    }

    pub fn add_phase(&mut self, v: V, p: Phase) {
        let s = self.spiders.get_mut(&v).unwrap();
        s.phase = s.phase + p;
    }

    pub fn is_boundary(&self, v: V) -> bool {
        self.spiders[&v].boundary
    }

    pub fn vertices(&self) -> impl Iterator<Item = V> + '_ {
        self.spiders.keys().copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.spiders.len()
    }

    // --------------------------------------------------------------- edges

    pub fn add_edge(&mut self, u: V, v: V, kind: EdgeKind) {
        assert!(self.contains(u) && self.contains(v), "edge endpoint missing");
        *self.adj.get_mut(&u).unwrap().entry(v).or_default().get_mut(kind) += 1;
        if u != v {
            *self.adj.get_mut(&v).unwrap().entry(u).or_default().get_mut(kind) += 1;
        }
    }

    /// Remove one edge of the given kind; panics if none is present.
    pub fn remove_edge(&mut self, u: V, v: V, kind: EdgeKind) {
        let e = self.adj.get_mut(&u).unwrap().get_mut(&v).expect("no such edge");
        let c = e.get_mut(kind);
        assert!(*c > 0, "no such edge");
        *c -= 1;
        let empty = e.total() == 0;
        if empty {
            self.adj.get_mut(&u).unwrap().remove(&v);
        }
        if u != v {
            let e = self.adj.get_mut(&v).unwrap().get_mut(&u).unwrap();
            *e.get_mut(kind) -= 1;
            if e.total() == 0 {
                self.adj.get_mut(&v).unwrap().remove(&u);
            }
        }
    }

    pub fn remove_all_edges(&mut self, u: V, v: V) {
        self.adj.get_mut(&u).map(|m| m.remove(&v));
        if u != v {
            self.adj.get_mut(&v).map(|m| m.remove(&u));
        }
    }

    pub fn edge_counts(&self, u: V, v: V) -> EdgeCounts {
        self.adj
            .get(&u)
            .and_then(|m| m.get(&v))
            .copied()
            .unwrap_or_default()
    }

    pub fn connected(&self, u: V, v: V) -> bool {
        self.edge_counts(u, v).total() > 0
    }

    /// Neighbours (excluding self) with their edge multiplicities.
    pub fn neighbors(&self, v: V) -> impl Iterator<Item = (V, EdgeCounts)> + '_ {
        self.adj[&v]
            .iter()
            .filter(move |(n, _)| **n != v)
            .map(|(n, e)| (*n, *e))
    }

    pub fn neighbor_vec(&self, v: V) -> Vec<V> {
        self.neighbors(v).map(|(n, _)| n).collect()
    }

    pub fn self_loops(&self, v: V) -> EdgeCounts {
        self.edge_counts(v, v)
    }

    /// Incident wire ends, counting multiplicity; each self-loop counts 2.
    pub fn degree(&self, v: V) -> u32 {
        let mut d = 0;
        for (n, e) in self.adj[&v].iter() {
            d += e.total() * if *n == v { 2 } else { 1 };
        }
        d
    }

    /// All edges as (min endpoint, max endpoint, kind, multiplicity).
    pub fn edges(&self) -> Vec<(V, V, EdgeKind, u32)> {
        let mut out = Vec::new();
        for (&u, m) in &self.adj {
            for (&v, e) in m {
                if v < u {
                    continue;
                }
                if e.plain > 0 {
                    out.push((u, v, EdgeKind::Plain, e.plain));
                }
                if e.hadamard > 0 {
                    out.push((u, v, EdgeKind::Hadamard, e.hadamard));
                }
            }
        }
        out
    }

    // ------------------------------------------------------------ boundary

    pub fn inputs(&self) -> &[V] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[V] {
        &self.outputs
    }

    /// Inputs then outputs.
    pub fn boundary_order(&self) -> Vec<V> {
        let mut b = self.inputs.clone();
        b.extend_from_slice(&self.outputs);
        b
    }

    pub fn set_inputs(&mut self, inputs: Vec<V>) {
        self.inputs = inputs;
    }

    pub fn set_outputs(&mut self, outputs: Vec<V>) {
        self.outputs = outputs;
    }

    // -------------------------------------------------------------- scalar

    pub fn scalar(&self) -> &ExactScalar {
        &self.scalar
    }

    pub fn scalar_mut(&mut self) -> &mut ExactScalar {
        &mut self.scalar
    }

    // --------------------------------------------------------------- marks

    /// Tag a vertex as part of a named build-time region. Tags are metadata
    /// for inspection; rewrites and decompositions need not preserve them.
    pub fn mark(&mut self, region: &str, v: V) {
        self.marks.entry(region.to_string()).or_default().insert(v);
    }

    pub fn marked(&self, region: &str) -> Option<&BTreeSet<V>> {
        self.marks.get(region)
    }

    pub fn mark_regions(&self) -> impl Iterator<Item = (&str, &BTreeSet<V>)> {
        self.marks.iter().map(|(k, v)| (k.as_str(), v))
    }

    // ------------------------------------------------------------- queries

    /// Number of non-boundary spiders with an odd phase numerator.
    pub fn t_count(&self) -> usize {
        self.spiders
            .values()
            .filter(|s| !s.boundary && s.phase.is_t_like())
            .count()
    }

    /// T-count restricted to the vertices of a named region.
    pub fn t_count_in_region(&self, region: &str) -> usize {
        self.marks
            .get(region)
            .map(|set| {
                set.iter()
                    .filter(|v| {
                        let s = &self.spiders[v];
                        !s.boundary && s.phase.is_t_like()
                    })
                    .count()
            })
            .unwrap_or(0)
    }

    pub fn find_vertex<F: Fn(&Diagram, V) -> bool>(&self, f: F) -> Option<V> {
        self.vertices().find(|&v| f(self, v))
    }

    // -------------------------------------------------------- composition

    /// Import all vertices/edges of `other`, returning the id offset map.
    fn absorb(&mut self, other: &Diagram) -> BTreeMap<V, V> {
        let mut map = BTreeMap::new();
        for (&v, s) in &other.spiders {
            let nv = self.add_vertex(*s);
            map.insert(v, nv);
        }
        for (u, v, kind, mult) in other.edges() {
            for _ in 0..mult {
                self.add_edge(map[&u], map[&v], kind);
            }
        }
        for (region, set) in &other.marks {
            let entry = self.marks.entry(region.clone()).or_default();
            for v in set {
                entry.insert(map[v]);
            }
        }
        self.scalar *= other.scalar;
        map
    }

    /// Side-by-side juxtaposition: boundary order is `self`'s then `other`'s,
    /// scalars multiply, and the tensor is the Kronecker product.
    pub fn tensor_product(&self, other: &Diagram) -> Diagram {
        let mut d = self.clone();
        let map = d.absorb(other);
        for v in &other.inputs {
            d.inputs.push(map[v]);
        }
        for v in &other.outputs {
            d.outputs.push(map[v]);
        }
        d
    }

    /// Sequential composition: `self`'s outputs are joined to `other`'s
    /// inputs by plain wires (`other` acts after `self`).
    pub fn compose(&self, other: &Diagram) -> Result<Diagram, Error> {
        if self.outputs.len() != other.inputs.len() {
            return Err(Error::ArityMismatch {
                outputs: self.outputs.len(),
                inputs: other.inputs.len(),
            });
        }
        let mut d = self.clone();
        let map = d.absorb(other);
        let pairs: Vec<(V, V)> = self
            .outputs
            .iter()
            .zip(other.inputs.iter())
            .map(|(&o, &i)| (o, map[&i]))
            .collect();
        d.outputs = other.outputs.iter().map(|v| map[v]).collect();
        for (o, i) in pairs {
            d.join_wires(o, i);
        }
        Ok(d)
    }

    /// Glue two boundary vertices into a single wire and drop them.
    fn join_wires(&mut self, a: V, b: V) {
        debug_assert!(self.is_boundary(a) && self.is_boundary(b));
        debug_assert_eq!(self.degree(a), 1);
        debug_assert_eq!(self.degree(b), 1);
        let (na, ka) = self.unique_edge(a);
        let (nb, kb) = self.unique_edge(b);
        let kind = ka.xor(kb);
        if na == b {
            // a and b are directly wired to each other: closed loop.
            self.remove_vertex(a);
            self.remove_vertex(b);
            match kind {
                // trace of the identity
                EdgeKind::Plain => self.scalar *= ExactScalar::new(0, [2, 0, 0, 0]),
                // trace of the Hadamard
                EdgeKind::Hadamard => self.scalar = ExactScalar::zero(),
            }
            return;
        }
        self.remove_vertex(a);
        self.remove_vertex(b);
        self.add_edge(na, nb, kind);
    }

    /// The single incident edge of a degree-1 vertex.
    pub fn unique_edge(&self, v: V) -> (V, EdgeKind) {
        let (&n, e) = self.adj[&v].iter().next().expect("degree-1 vertex expected");
        debug_assert_eq!(e.total(), 1);
        let kind = if e.hadamard > 0 { EdgeKind::Hadamard } else { EdgeKind::Plain };
        (n, kind)
    }

    /// Structural sanity: every edge endpoint exists, boundary vertices have
    /// degree 1 and phase 0, boundary lists match flags.
    pub fn validate(&self) -> Result<(), Error> {
        for (&v, m) in &self.adj {
            if !self.spiders.contains_key(&v) {
                return Err(Error::Corrupt(format!("adjacency for missing vertex {v}")));
            }
            for &n in m.keys() {
                if !self.spiders.contains_key(&n) {
                    return Err(Error::Corrupt(format!("edge to missing vertex {n}")));
                }
            }
        }
        let mut listed: BTreeSet<V> = BTreeSet::new();
        for &v in self.inputs.iter().chain(self.outputs.iter()) {
            if !listed.insert(v) {
                return Err(Error::Corrupt(format!("vertex {v} listed twice on boundary")));
            }
        }
        for (&v, s) in &self.spiders {
            if s.boundary {
                if self.degree(v) != 1 {
                    return Err(Error::Corrupt(format!("boundary vertex {v} has degree != 1")));
                }
                if !s.phase.is_zero() {
                    return Err(Error::Corrupt(format!("boundary vertex {v} has a phase")));
                }
                if !listed.contains(&v) {
                    return Err(Error::Corrupt(format!("boundary vertex {v} not in boundary order")));
                }
            } else if listed.contains(&v) {
                return Err(Error::Corrupt(format!("interior vertex {v} in boundary order")));
            }
        }
        Ok(())
    }
}
