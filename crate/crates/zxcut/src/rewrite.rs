use crate::error::Error;
use crate::graph::{Diagram, EdgeKind, SpiderKind, V};
use crate::phase::Phase;
use crate::scalar::ExactScalar;

/// One applied rewrite, with the exact scalar factor it multiplied in.
#[derive(Clone, Debug)]
pub struct RewriteStep {
    pub rule: &'static str,
    pub vertices: Vec<V>,
    pub scalar_adjust: ExactScalar,
}

pub type Trace = Vec<RewriteStep>;

struct Engine<'t> {
    trace: Option<&'t mut Trace>,
    applications: usize,
}

const MAX_APPLICATIONS: usize = 20_000_000;

impl<'t> Engine<'t> {
    fn new(trace: Option<&'t mut Trace>) -> Engine<'t> {
        Engine { trace, applications: 0 }
    }

    fn record(&mut self, rule: &'static str, vertices: Vec<V>, scalar_adjust: ExactScalar) {
        self.applications += 1;
        assert!(
            self.applications < MAX_APPLICATIONS,
            "rewrite engine exceeded application budget; non-terminating rule set?"
        );
        if let Some(t) = self.trace.as_deref_mut() {
            t.push(RewriteStep { rule, vertices, scalar_adjust });
        }
    }

    // ------------------------------------------------------ edge normalise

    /// Normalise self-loops on `v`: plain loops vanish, each Hadamard loop
    /// adds pi to the phase and a factor 1/sqrt(2).
    fn normalize_loops(&mut self, d: &mut Diagram, v: V) {
        let loops = d.self_loops(v);
        if loops.total() == 0 {
            return;
        }
        d.remove_all_edges(v, v);
        if loops.hadamard > 0 {
            for _ in 0..loops.hadamard {
                d.add_phase(v, Phase::PI);
                d.scalar_mut().mul_sqrt2_pow(-1);
            }
            self.record("self-loop", vec![v], {
                let mut s = ExactScalar::one();
                s.mul_sqrt2_pow(-(loops.hadamard as i32));
                s
            });
        } else {
            self.record("self-loop", vec![v], ExactScalar::one());
        }
    }

    /// Normalise the edge bundle between two distinct same-kind spiders:
    /// extra plain edges drop, Hadamard pairs cancel with 1/2 (Hopf), and a
    /// mixed plain+Hadamard pair becomes plain with a pi on the lower id.
    fn normalize_bundle(&mut self, d: &mut Diagram, u: V, v: V) {
        debug_assert_ne!(u, v);
        if d.is_boundary(u) || d.is_boundary(v) {
            return;
        }
        if d.kind(u) != d.kind(v) {
            // different colours: plain pairs cancel with 1/2
            let e = d.edge_counts(u, v);
            let pairs = e.plain / 2;
            if pairs > 0 {
                for _ in 0..pairs {
                    d.remove_edge(u, v, EdgeKind::Plain);
                    d.remove_edge(u, v, EdgeKind::Plain);
                    d.scalar_mut().mul_sqrt2_pow(-2);
                }
                let mut s = ExactScalar::one();
                s.mul_sqrt2_pow(-2 * pairs as i32);
                self.record("hopf", vec![u, v], s);
            }
            return;
        }
        loop {
            let e = d.edge_counts(u, v);
            if e.plain >= 2 {
                // parallel plain edges between same-kind spiders are
                // equivalent to a single one (the extra becomes a plain
                // self-loop after fusion)
                d.remove_edge(u, v, EdgeKind::Plain);
                self.record("parallel-edge", vec![u, v], ExactScalar::one());
            } else if e.hadamard >= 2 {
                d.remove_edge(u, v, EdgeKind::Hadamard);
                d.remove_edge(u, v, EdgeKind::Hadamard);
                d.scalar_mut().mul_sqrt2_pow(-2);
                let mut s = ExactScalar::one();
                s.mul_sqrt2_pow(-2);
                self.record("hopf", vec![u, v], s);
            } else if e.plain == 1 && e.hadamard == 1 {
                // fusing through the plain edge would turn the H edge into a
                // Hadamard self-loop
                d.remove_edge(u, v, EdgeKind::Hadamard);
                d.add_phase(u.min(v), Phase::PI);
                d.scalar_mut().mul_sqrt2_pow(-1);
                let mut s = ExactScalar::one();
                s.mul_sqrt2_pow(-1);
                self.record("self-loop", vec![u, v], s);
            } else {
                break;
            }
        }
    }

    /// Add an edge and immediately renormalise the bundle it lands in.
    fn add_edge_smart(&mut self, d: &mut Diagram, u: V, v: V, kind: EdgeKind) {
        if u == v {
            d.add_edge(u, v, kind);
            self.normalize_loops(d, u);
            return;
        }
        d.add_edge(u, v, kind);
        self.normalize_bundle(d, u, v);
    }

    /// Complementation toggle: adding a Hadamard edge where one already
    /// exists cancels both by the Hopf law, with its 1/2 factor.
    fn toggle_h(&mut self, d: &mut Diagram, u: V, v: V) {
        let e = d.edge_counts(u, v);
        debug_assert!(e.plain == 0 && e.hadamard <= 1);
        if e.hadamard == 1 {
            d.remove_edge(u, v, EdgeKind::Hadamard);
            d.scalar_mut().mul_sqrt2_pow(-2);
        } else {
            d.add_edge(u, v, EdgeKind::Hadamard);
        }
    }

    // ---------------------------------------------------------------- fuse

    /// Merge `v` into `u` through one plain edge (same kind).
    fn fuse_into(&mut self, d: &mut Diagram, u: V, v: V) {
        debug_assert_eq!(d.kind(u), d.kind(v));
        d.remove_edge(u, v, EdgeKind::Plain);
        let pv = d.phase(v);
        d.add_phase(u, pv);
        // move v's remaining edges onto u
        let vloops = d.self_loops(v);
        let nbrs: Vec<(V, crate::graph::EdgeCounts)> = d.neighbors(v).collect();
        d.remove_vertex(v);
        for _ in 0..vloops.plain {
            d.add_edge(u, u, EdgeKind::Plain);
        }
        for _ in 0..vloops.hadamard {
            d.add_edge(u, u, EdgeKind::Hadamard);
        }
        for (n, e) in nbrs {
            let tgt = if n == u { u } else { n };
            for _ in 0..e.plain {
                d.add_edge(u, tgt, EdgeKind::Plain);
            }
            for _ in 0..e.hadamard {
                d.add_edge(u, tgt, EdgeKind::Hadamard);
            }
        }
        self.record("fuse", vec![u, v], ExactScalar::one());
        self.normalize_loops(d, u);
        let nbrs: Vec<V> = d.neighbor_vec(u);
        for n in nbrs {
            if !d.is_boundary(n) && !d.is_boundary(u) {
                self.normalize_bundle(d, u, n);
            }
        }
    }

    fn fuse_pass(&mut self, d: &mut Diagram) -> bool {
        let mut changed = false;
        loop {
            let mut found = None;
            'outer: for u in d.vertices().collect::<Vec<_>>() {
                if !d.contains(u) || d.is_boundary(u) {
                    continue;
                }
                for (n, e) in d.neighbors(u).collect::<Vec<_>>() {
                    if e.plain > 0 && !d.is_boundary(n) && d.kind(n) == d.kind(u) {
                        found = Some((u.min(n), u.max(n)));
                        break 'outer;
                    }
                }
            }
            match found {
                Some((u, v)) => {
                    self.fuse_into(d, u, v);
                    changed = true;
                }
                None => break,
            }
        }
        changed
    }

    // -------------------------------------------------------- colour change

    fn color_change_pass(&mut self, d: &mut Diagram) -> bool {
        let xs: Vec<V> = d
            .vertices()
            .filter(|&v| !d.is_boundary(v) && d.kind(v) == SpiderKind::X)
            .collect();
        if xs.is_empty() {
            return false;
        }
        for v in xs {
            // toggle the kind of every incident edge instance; a self-loop
            // picks up a Hadamard at both ends, so it is unchanged
            let nbrs: Vec<(V, crate::graph::EdgeCounts)> = d.neighbors(v).collect();
            for (n, e) in nbrs {
                d.remove_all_edges(v, n);
                for _ in 0..e.plain {
                    d.add_edge(v, n, EdgeKind::Hadamard);
                }
                for _ in 0..e.hadamard {
                    d.add_edge(v, n, EdgeKind::Plain);
                }
            }
            d.set_kind(v, SpiderKind::Z);
            self.record("colour-change", vec![v], ExactScalar::one());
        }
        true
    }

    // --------------------------------------------------------- small stuff

    /// Fold isolated spiders and isolated spider pairs into the scalar.
    fn absorb_pass(&mut self, d: &mut Diagram) -> bool {
        let mut changed = false;
        loop {
            let mut found = false;
            for v in d.vertices().collect::<Vec<_>>() {
                if !d.contains(v) || d.is_boundary(v) {
                    continue;
                }
                self.normalize_loops(d, v);
                if d.degree(v) == 0 {
                    let s = ExactScalar::one_plus_phase(d.phase(v));
                    *d.scalar_mut() *= s;
                    d.remove_vertex(v);
                    self.record("absorb", vec![v], s);
                    found = true;
                    changed = true;
                }
            }
            // isolated pairs u-v (single H edge, both degree 1, both interior)
            for u in d.vertices().collect::<Vec<_>>() {
                if !d.contains(u) || d.is_boundary(u) || d.degree(u) != 1 {
                    continue;
                }
                let (n, kind) = d.unique_edge(u);
                if n == u || d.is_boundary(n) || d.degree(n) != 1 {
                    continue;
                }
                debug_assert!(d.kind(u) == SpiderKind::Z && d.kind(n) == SpiderKind::Z);
                let (a, b) = (d.phase(u), d.phase(n));
                let s = match kind {
                    EdgeKind::Hadamard => {
                        // sum_{x,y} w^{ax+by} H[x,y]
                        let mut s = ExactScalar::one() + ExactScalar::from_phase(a)
                            + ExactScalar::from_phase(b)
                            + ExactScalar::from_phase(a + b) * ExactScalar::new(0, [-1, 0, 0, 0]);
                        s.mul_sqrt2_pow(-1);
                        s
                    }
                    EdgeKind::Plain => {
                        // same-kind plain pair should have fused already
                        ExactScalar::one() + ExactScalar::from_phase(a + b)
                    }
                };
                *d.scalar_mut() *= s;
                d.remove_vertex(u);
                d.remove_vertex(n);
                self.record("absorb", vec![u, n], s);
                found = true;
                changed = true;
            }
            if !found {
                break;
            }
        }
        changed
    }

    /// Remove phase-free degree-2 spiders, composing their two wires.
    fn id_pass(&mut self, d: &mut Diagram) -> bool {
        let mut changed = false;
        loop {
            let mut found = None;
            for v in d.vertices().collect::<Vec<_>>() {
                if d.is_boundary(v) || !d.phase(v).is_zero() {
                    continue;
                }
                if d.self_loops(v).total() > 0 || d.degree(v) != 2 {
                    continue;
                }
                let nbrs: Vec<(V, crate::graph::EdgeCounts)> = d.neighbors(v).collect();
                if nbrs.len() != 2 {
                    continue; // doubled edge to a single neighbour: Hopf first
                }
                let (n1, e1) = nbrs[0];
                let (n2, e2) = nbrs[1];
                if d.is_boundary(n1) && d.is_boundary(n2) {
                    continue; // keep one spider on a bare wire
                }
                let k1 = if e1.hadamard > 0 { EdgeKind::Hadamard } else { EdgeKind::Plain };
                let k2 = if e2.hadamard > 0 { EdgeKind::Hadamard } else { EdgeKind::Plain };
                found = Some((v, n1, n2, k1.xor(k2)));
                break;
            }
            match found {
                Some((v, n1, n2, kind)) => {
                    d.remove_vertex(v);
                    self.record("identity-removal", vec![v], ExactScalar::one());
                    // reconnect; n1 == n2 gives a self-loop
                    if n1 == n2 {
                        d.add_edge(n1, n2, kind);
                        self.normalize_loops(d, n1);
                    } else if !d.is_boundary(n1) && !d.is_boundary(n2)
                        && d.kind(n1) == d.kind(n2)
                        && kind == EdgeKind::Plain
                    {
                        d.add_edge(n1, n2, EdgeKind::Plain);
                        self.fuse_into(d, n1.min(n2), n1.max(n2));
                    } else {
                        self.add_edge_smart(d, n1, n2, kind);
                    }
                    changed = true;
                }
                None => break,
            }
        }
        changed
    }

    /// Pauli tip copy: a degree-1 Z(c*pi) spider Hadamard-attached to a hub
    /// pins the hub to one branch, removing both.
    fn copy_pass(&mut self, d: &mut Diagram) -> bool {
        let mut changed = false;
        'restart: loop {
            for t in d.vertices().collect::<Vec<_>>() {
                if !d.contains(t) || d.is_boundary(t) || !d.phase(t).is_pauli() {
                    continue;
                }
                if d.degree(t) != 1 || d.self_loops(t).total() > 0 {
                    continue;
                }
                let (h, kind) = d.unique_edge(t);
                if kind != EdgeKind::Hadamard || h == t || d.is_boundary(h) {
                    continue;
                }
                // hub: every other edge must be a single H to an interior Z
                // spider or any single edge to a boundary vertex
                if d.self_loops(h).total() > 0 {
                    continue;
                }
                let mut ok = true;
                let mut internal: Vec<V> = Vec::new();
                let mut boundary: Vec<(V, EdgeKind)> = Vec::new();
                for (n, e) in d.neighbors(h) {
                    if n == t {
                        continue;
                    }
                    if e.total() != 1 {
                        ok = false;
                        break;
                    }
                    if d.is_boundary(n) {
                        let k = if e.hadamard > 0 { EdgeKind::Hadamard } else { EdgeKind::Plain };
                        boundary.push((n, k));
                    } else if e.hadamard == 1 && d.kind(n) == SpiderKind::Z {
                        internal.push(n);
                    } else {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    continue;
                }
                let c = d.phase(t).is_pi();
                let hub_phase = d.phase(h);
                let mut adjust = ExactScalar::one();
                adjust.mul_sqrt2_pow(1); // the tip is sqrt(2)<c|
                if c {
                    adjust.mul_phase(hub_phase);
                }
                let mut count = 0i32;
                for &n in &internal {
                    if c {
                        d.add_phase(n, Phase::PI);
                    }
                    count += 1;
                }
                for &(b, k) in &boundary {
                    let nv = d.add_spider(SpiderKind::Z, if c { Phase::PI } else { Phase::ZERO });
                    d.add_edge(nv, b, k.xor(EdgeKind::Hadamard));
                    count += 1;
                }
                let mut pow = ExactScalar::one();
                pow.mul_sqrt2_pow(-count);
                adjust *= pow;
                *d.scalar_mut() *= adjust;
                d.remove_vertex(t);
                d.remove_vertex(h);
                self.record("copy", vec![t, h], adjust);
                changed = true;
                continue 'restart;
            }
            break;
        }
        changed
    }

    // ------------------------------------------------- local complementation

    /// Check that `v` is interior (not boundary, no boundary neighbours), has
    /// no loops, and every incident edge is a single Hadamard edge to a Z
    /// spider.
    fn graphlike_interior(&self, d: &Diagram, v: V) -> bool {
        if d.is_boundary(v) || d.kind(v) != SpiderKind::Z || d.self_loops(v).total() > 0 {
            return false;
        }
        for (n, e) in d.neighbors(v) {
            if d.is_boundary(n) || d.kind(n) != SpiderKind::Z {
                return false;
            }
            if e.plain != 0 || e.hadamard != 1 {
                return false;
            }
        }
        true
    }

    /// Local complementation at a +-pi/2 interior spider; removes it.
    fn local_complement(&mut self, d: &mut Diagram, v: V) -> Result<(), Error> {
        if !d.contains(v) {
            return Err(Error::BadVertex(v));
        }
        if !d.phase(v).is_proper_clifford() || !self.graphlike_interior(d, v) {
            return Err(Error::Precondition(format!(
                "local complementation needs an interior +-pi/2 spider in graph-like form (vertex {v})"
            )));
        }
        let eps_plus = d.phase(v) == Phase::S;
        let nbrs = d.neighbor_vec(v);
        let k = nbrs.len() as i32;
        d.remove_vertex(v);
        for i in 0..nbrs.len() {
            for j in (i + 1)..nbrs.len() {
                self.toggle_h(d, nbrs[i], nbrs[j]);
            }
        }
        let shift = if eps_plus { Phase::SDG } else { Phase::S };
        for &n in &nbrs {
            d.add_phase(n, shift);
        }
        let mut adjust = ExactScalar::from_phase(if eps_plus { Phase::T } else { Phase::TDG });
        adjust.mul_sqrt2_pow((k - 1) * (k - 2) / 2);
        *d.scalar_mut() *= adjust;
        self.record("local-complement", vec![v], adjust);
        Ok(())
    }

    fn lcomp_pass(&mut self, d: &mut Diagram) -> bool {
        let mut changed = false;
        loop {
            let found = d.vertices().collect::<Vec<_>>().into_iter().find(|&v| {
                d.contains(v)
                    && !d.is_boundary(v)
                    && d.phase(v).is_proper_clifford()
                    && self.graphlike_interior(d, v)
            });
            match found {
                Some(v) => {
                    self.local_complement(d, v).unwrap();
                    changed = true;
                }
                None => break,
            }
        }
        changed
    }

    // ----------------------------------------------------------------- pivot

    /// Pivot about a Hadamard edge between two interior Pauli spiders;
    /// removes both.
    fn pivot(&mut self, d: &mut Diagram, u: V, v: V) -> Result<(), Error> {
        if !d.contains(u) || !d.contains(v) {
            return Err(Error::BadVertex(if d.contains(u) { v } else { u }));
        }
        let e = d.edge_counts(u, v);
        if u == v
            || !d.phase(u).is_pauli()
            || !d.phase(v).is_pauli()
            || e.hadamard != 1
            || e.plain != 0
            || !self.graphlike_interior(d, u)
            || !self.graphlike_interior(d, v)
        {
            return Err(Error::Precondition(format!(
                "pivot needs two interior Pauli spiders joined by a Hadamard edge ({u},{v})"
            )));
        }
        let pa = d.phase(u);
        let pb = d.phase(v);
        let nu: Vec<V> = d.neighbor_vec(u).into_iter().filter(|&n| n != v).collect();
        let nv: Vec<V> = d.neighbor_vec(v).into_iter().filter(|&n| n != u).collect();
        let set_a: Vec<V> = nu.iter().copied().filter(|n| !nv.contains(n)).collect();
        let set_b: Vec<V> = nv.iter().copied().filter(|n| !nu.contains(n)).collect();
        let set_c: Vec<V> = nu.iter().copied().filter(|n| nv.contains(n)).collect();
        d.remove_vertex(u);
        d.remove_vertex(v);
        for &a in &set_a {
            for &b in &set_b {
                self.toggle_h(d, a, b);
            }
        }
        for &a in &set_a {
            for &c in &set_c {
                self.toggle_h(d, a, c);
            }
        }
        for &b in &set_b {
            for &c in &set_c {
                self.toggle_h(d, b, c);
            }
        }
        for &a in &set_a {
            d.add_phase(a, pb);
        }
        for &b in &set_b {
            d.add_phase(b, pa);
        }
        for &c in &set_c {
            d.add_phase(c, pa + pb + Phase::PI);
        }
        let (na, nb, nc) = (set_a.len() as i32, set_b.len() as i32, set_c.len() as i32);
        let mut adjust = ExactScalar::one();
        adjust.mul_sqrt2_pow(na * nb + na * nc + nb * nc - na - nb - 2 * nc + 1);
        if pa.is_pi() && pb.is_pi() {
            adjust *= ExactScalar::new(0, [-1, 0, 0, 0]);
        }
        *d.scalar_mut() *= adjust;
        self.record("pivot", vec![u, v], adjust);
        Ok(())
    }

    fn pivot_pass(&mut self, d: &mut Diagram) -> bool {
        let mut changed = false;
        'restart: loop {
            for u in d.vertices().collect::<Vec<_>>() {
                if !d.contains(u) || d.is_boundary(u) || !d.phase(u).is_pauli() {
                    continue;
                }
                if !self.graphlike_interior(d, u) {
                    continue;
                }
                for (n, e) in d.neighbors(u).collect::<Vec<_>>() {
                    if e.hadamard == 1
                        && d.phase(n).is_pauli()
                        && self.graphlike_interior(d, n)
                        && self.pivot(d, u, n).is_ok()
                    {
                        changed = true;
                        continue 'restart;
                    }
                }
            }
            break;
        }
        changed
    }

    /// Unfuse a spider's phase onto a fresh gadget (hub + tip); exact.
    fn unfuse_gadget(&mut self, d: &mut Diagram, v: V) -> (V, V) {
        let p = d.phase(v);
        d.set_phase(v, Phase::ZERO);
        let hub = d.add_spider(SpiderKind::Z, Phase::ZERO);
        let tip = d.add_spider(SpiderKind::Z, p);
        d.add_edge(v, hub, EdgeKind::Hadamard);
        d.add_edge(hub, tip, EdgeKind::Hadamard);
        self.record("gadget-unfuse", vec![v, hub, tip], ExactScalar::one());
        (hub, tip)
    }

    /// Pivot where the partner carries a non-Pauli phase: unfuse it first.
    fn pivot_gadget_pass(&mut self, d: &mut Diagram) -> bool {
        let mut changed = false;
        'restart: loop {
            for u in d.vertices().collect::<Vec<_>>() {
                if !d.contains(u) || d.is_boundary(u) || !d.phase(u).is_pauli() {
                    continue;
                }
                if !self.graphlike_interior(d, u) {
                    continue;
                }
                // skip gadget hubs: a Pauli spider with a degree-1 tip stays
                if d.neighbors(u).any(|(n, _)| d.degree(n) == 1 && !d.is_boundary(n)) {
                    continue;
                }
                for (n, e) in d.neighbors(u).collect::<Vec<_>>() {
                    if e.hadamard != 1 || d.phase(n).is_pauli() || d.degree(n) <= 1 {
                        continue;
                    }
                    if !self.graphlike_interior(d, n) {
                        continue;
                    }
                    self.unfuse_gadget(d, n);
                    self.pivot(d, u, n).unwrap();
                    changed = true;
                    continue 'restart;
                }
            }
            break;
        }
        changed
    }

    /// Insert an identity buffer so a boundary-adjacent spider becomes
    /// interior, then pivot an interior Pauli partner away through it.
    fn boundary_pivot_pass(&mut self, d: &mut Diagram) -> bool {
        let mut changed = false;
        'restart: loop {
            for u in d.vertices().collect::<Vec<_>>() {
                if !d.contains(u) || d.is_boundary(u) || !d.phase(u).is_pauli() {
                    continue;
                }
                if !self.graphlike_interior(d, u) {
                    continue;
                }
                if d.neighbors(u).any(|(n, _)| d.degree(n) == 1 && !d.is_boundary(n)) {
                    continue;
                }
                for (v, e) in d.neighbors(u).collect::<Vec<_>>() {
                    if e.hadamard != 1 || d.is_boundary(v) {
                        continue;
                    }
                    let boundary_edges: Vec<(V, EdgeKind)> = d
                        .neighbors(v)
                        .filter(|(n, _)| d.is_boundary(*n))
                        .map(|(n, e)| {
                            let k = if e.hadamard > 0 { EdgeKind::Hadamard } else { EdgeKind::Plain };
                            (n, k)
                        })
                        .collect();
                    if boundary_edges.is_empty() {
                        continue;
                    }
                    // remaining neighbours of v must make it pivotable
                    let ok = d.neighbors(v).all(|(n, e)| {
                        d.is_boundary(n)
                            || (e.plain == 0 && e.hadamard == 1 && d.kind(n) == SpiderKind::Z)
                    });
                    if !ok || d.self_loops(v).total() > 0 {
                        continue;
                    }
                    for (b, kind) in boundary_edges {
                        let w = d.add_spider(SpiderKind::Z, Phase::ZERO);
                        d.remove_edge(v, b, kind);
                        d.add_edge(v, w, EdgeKind::Hadamard);
                        d.add_edge(w, b, kind.xor(EdgeKind::Hadamard));
                        self.record("boundary-extract", vec![v, w], ExactScalar::one());
                    }
                    if !d.phase(v).is_pauli() {
                        self.unfuse_gadget(d, v);
                    }
                    self.pivot(d, u, v).unwrap();
                    changed = true;
                    continue 'restart;
                }
            }
            break;
        }
        changed
    }

    // --------------------------------------------------------------- gadgets

    /// Identify a gadget: Pauli hub with exactly one degree-1 tip, returning
    /// (tip, support). Hub pi-phases are normalised onto the tip.
    fn gadget_at(&mut self, d: &mut Diagram, hub: V) -> Option<(V, Vec<V>)> {
        if d.is_boundary(hub) || !d.phase(hub).is_pauli() || d.self_loops(hub).total() > 0 {
            return None;
        }
        let mut tip = None;
        let mut support = Vec::new();
        for (n, e) in d.neighbors(hub) {
            if e.total() != 1 || e.hadamard != 1 {
                return None;
            }
            if !d.is_boundary(n) && d.degree(n) == 1 {
                if tip.is_some() {
                    return None;
                }
                tip = Some(n);
            } else {
                support.push(n);
            }
        }
        let tip = tip?;
        if support.is_empty() {
            return None;
        }
        if d.phase(hub).is_pi() {
            let tp = d.phase(tip);
            d.set_phase(hub, Phase::ZERO);
            d.set_phase(tip, -tp);
            let adjust = ExactScalar::from_phase(tp);
            *d.scalar_mut() *= adjust;
            self.record("gadget-flip", vec![hub, tip], adjust);
        }
        support.sort_unstable();
        Some((tip, support))
    }

    /// Fuse phase gadgets with identical support.
    fn gadget_fuse_pass(&mut self, d: &mut Diagram) -> bool {
        let mut changed = false;
        'restart: loop {
            let mut seen: std::collections::BTreeMap<Vec<V>, (V, V)> = Default::default();
            for hub in d.vertices().collect::<Vec<_>>() {
                if !d.contains(hub) || d.is_boundary(hub) {
                    continue;
                }
                let Some((tip, support)) = self.gadget_at(d, hub) else { continue };
                if let Some(&(hub1, tip1)) = seen.get(&support) {
                    let p2 = d.phase(tip);
                    d.add_phase(tip1, p2);
                    d.remove_vertex(tip);
                    d.remove_vertex(hub);
                    let mut adjust = ExactScalar::one();
                    adjust.mul_sqrt2_pow(-(support.len() as i32 - 1));
                    *d.scalar_mut() *= adjust;
                    self.record("gadget-fuse", vec![hub1, tip1, hub, tip], adjust);
                    changed = true;
                    continue 'restart;
                }
                seen.insert(support, (hub, tip));
            }
            break;
        }
        changed
    }

    // ------------------------------------------------------------ pipelines

    fn to_graph_like(&mut self, d: &mut Diagram) {
        self.color_change_pass(d);
        for v in d.vertices().collect::<Vec<_>>() {
            if d.contains(v) && !d.is_boundary(v) {
                self.normalize_loops(d, v);
            }
        }
        self.fuse_pass(d);
        let verts: Vec<V> = d.vertices().collect();
        for &u in &verts {
            if !d.contains(u) || d.is_boundary(u) {
                continue;
            }
            for (n, _) in d.neighbors(u).collect::<Vec<_>>() {
                if d.contains(u) && d.contains(n) && !d.is_boundary(n) && u < n {
                    self.normalize_bundle(d, u, n);
                }
            }
        }
        // keep a spider on each bare input-output wire
        for i in d.inputs().to_vec() {
            if !d.contains(i) {
                continue;
            }
            let (n, kind) = d.unique_edge(i);
            if d.is_boundary(n) {
                let w = d.add_spider(SpiderKind::Z, Phase::ZERO);
                d.remove_edge(i, n, kind);
                d.add_edge(i, w, kind);
                d.add_edge(w, n, EdgeKind::Plain);
                self.record("boundary-extract", vec![i, w], ExactScalar::one());
            }
        }
        self.absorb_pass(d);
    }

    fn interior_clifford_simp(&mut self, d: &mut Diagram) -> bool {
        let mut any = false;
        loop {
            let mut m = false;
            m |= self.fuse_pass(d);
            m |= self.id_pass(d);
            m |= self.copy_pass(d);
            m |= self.lcomp_pass(d);
            m |= self.pivot_pass(d);
            m |= self.absorb_pass(d);
            if !m {
                break;
            }
            any = true;
        }
        any
    }

    fn clifford_simp(&mut self, d: &mut Diagram) -> bool {
        let mut any = false;
        loop {
            let mut m = self.interior_clifford_simp(d);
            m |= self.boundary_pivot_pass(d);
            if !m {
                break;
            }
            any = true;
        }
        any
    }

    fn full_reduce(&mut self, d: &mut Diagram) {
        self.to_graph_like(d);
        self.interior_clifford_simp(d);
        loop {
            let mut m = self.pivot_gadget_pass(d);
            m |= self.clifford_simp(d);
            m |= self.gadget_fuse_pass(d);
            if m {
                self.interior_clifford_simp(d);
            } else {
                break;
            }
        }
    }
}

// ------------------------------------------------------------------ public

/// Convert to graph-like form: only Z spiders, interior edges all Hadamard,
/// no parallel edges or self-loops; exact tensor preserved.
pub fn to_graph_like(d: &Diagram) -> Diagram {
    let mut out = d.clone();
    Engine::new(None).to_graph_like(&mut out);
    out
}

/// Add an edge and renormalise the bundle it lands in (Hopf pairs cancel,
/// mixed pairs push a pi, self-loops resolve), exactly.
pub fn add_edge_smart(d: &mut Diagram, u: V, v: V, kind: EdgeKind) {
    Engine::new(None).add_edge_smart(d, u, v, kind);
}

/// Fuse two same-kind spiders joined by at least one plain edge.
pub fn fuse_spiders(d: &Diagram, u: V, v: V) -> Result<Diagram, Error> {
    if !d.contains(u) || !d.contains(v) {
        return Err(Error::BadVertex(if d.contains(u) { v } else { u }));
    }
    if d.is_boundary(u) || d.is_boundary(v) || d.kind(u) != d.kind(v) {
        return Err(Error::Precondition("fusion needs two same-colour spiders".into()));
    }
    if d.edge_counts(u, v).plain == 0 {
        return Err(Error::Precondition("fusion needs a plain edge".into()));
    }
    let mut out = d.clone();
    Engine::new(None).fuse_into(&mut out, u, v);
    Ok(out)
}

/// Local complementation at an interior +-pi/2 spider of a graph-like
/// diagram.
pub fn local_complement(d: &Diagram, v: V) -> Result<Diagram, Error> {
    let mut out = d.clone();
    Engine::new(None).local_complement(&mut out, v)?;
    Ok(out)
}

/// Pivot about a Hadamard edge joining two interior Pauli spiders of a
/// graph-like diagram.
pub fn pivot(d: &Diagram, u: V, v: V) -> Result<Diagram, Error> {
    let mut out = d.clone();
    Engine::new(None).pivot(&mut out, u, v)?;
    Ok(out)
}

/// Clifford simplification to a fixpoint of the rule set. Terminates on
/// every input and never increases the T-count.
pub fn full_reduce(d: &Diagram) -> Diagram {
    let mut out = d.clone();
    Engine::new(None).full_reduce(&mut out);
    out
}

/// `full_reduce` that also records every step applied.
pub fn full_reduce_traced(d: &Diagram, trace: &mut Trace) -> Diagram {
    let mut out = d.clone();
    Engine::new(Some(trace)).full_reduce(&mut out);
    out
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use rand::rngs::StdRng;
    use rand::Rng;

    /// Arbitrary small diagram with both colours, loops and parallels.
    pub(crate) fn random_mixed_diagram(rng: &mut StdRng, n: usize, legs: usize) -> Diagram {
        let mut d = Diagram::new();
        let vs: Vec<V> = (0..n)
            .map(|_| {
                let kind = if rng.random_bool(0.5) { SpiderKind::Z } else { SpiderKind::X };
                d.add_spider(kind, Phase::new(rng.random_range(0..8)))
            })
            .collect();
        for i in 0..n {
            for j in i..n {
                if rng.random_bool(if i == j { 0.08 } else { 0.3 }) {
                    let kind = if rng.random_bool(0.5) { EdgeKind::Plain } else { EdgeKind::Hadamard };
                    d.add_edge(vs[i], vs[j], kind);
                    if rng.random_bool(0.15) {
                        d.add_edge(vs[i], vs[j], EdgeKind::Hadamard);
                    }
                }
            }
        }
        for l in 0..legs {
            let o = d.add_output();
            d.add_edge(vs[l % n], o, EdgeKind::Plain);
        }
        d
    }
}
