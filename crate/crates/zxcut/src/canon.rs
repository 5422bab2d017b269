use crate::graph::{Diagram, SpiderKind, V};
use sha2::{Digest, Sha256};

/// Canonical form of a diagram: a byte certificate invariant under internal
/// vertex relabelling. Boundary vertices are pinned by their position in the
/// boundary order, internal vertices are ordered by iterated refinement with
/// backtracking on ties (lexicographically minimal certificate wins).
///
/// Two diagrams have equal certificates iff they are identical up to a
/// relabelling of internal vertex ids.
pub fn structural_certificate(d: &Diagram) -> Vec<u8> {
    let order = canonical_order(d);
    certificate_for(d, &order)
}

/// Digest covering structure, phases, boundary order and the global scalar.
pub fn canonical_hash(d: &Diagram) -> [u8; 32] {
    let mut cert = structural_certificate(d);
    cert.push(0xfe);
    cert.extend_from_slice(&d.scalar().half_power().to_le_bytes());
    for c in d.scalar().coeffs() {
        cert.extend_from_slice(&c.to_le_bytes());
    }
    let mut h = Sha256::new();
    h.update(&cert);
    h.finalize().into()
}

/// Digest of the structural certificate only (no scalar); the dedup key.
pub fn structural_hash(d: &Diagram) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(structural_certificate(d));
    h.finalize().into()
}

fn vertex_static_key(d: &Diagram, v: V, boundary_pos: &std::collections::BTreeMap<V, usize>) -> (u8, usize, u8, u8, u32, u32) {
    let s = d.spider(v);
    let bpos = boundary_pos.get(&v).copied().unwrap_or(usize::MAX);
    let loops = d.self_loops(v);
    (
        s.boundary as u8,
        bpos,
        match s.kind {
            SpiderKind::Z => 0,
            SpiderKind::X => 1,
        },
        s.phase.numerator(),
        loops.plain,
        loops.hadamard,
    )
}

/// Assign ranks: partition refinement until stable. `pre` maps some vertices
/// to forced distinct front classes (individualization).
fn refine(d: &Diagram, verts: &[V], seed: &std::collections::BTreeMap<V, usize>) -> std::collections::BTreeMap<V, usize> {
    use std::collections::BTreeMap;
    let boundary_pos: BTreeMap<V, usize> = d
        .boundary_order()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let mut rank: BTreeMap<V, usize> = BTreeMap::new();
    {
        let mut keys: Vec<(_, V)> = verts
            .iter()
            .map(|&v| (((seed.get(&v).copied()), vertex_static_key(d, v, &boundary_pos)), v))
            .collect();
        keys.sort();
        let mut r = 0usize;
        let mut prev = None;
        for (k, v) in keys {
            if prev.as_ref() != Some(&k) {
                if prev.is_some() {
                    r += 1;
                }
                prev = Some(k);
            }
            rank.insert(v, r);
        }
    }
    loop {
        let mut keys: Vec<((usize, Vec<(usize, u32, u32)>), V)> = Vec::with_capacity(verts.len());
        for &v in verts {
            let mut nb: Vec<(usize, u32, u32)> = d
                .neighbors(v)
                .map(|(n, e)| (rank[&n], e.plain, e.hadamard))
                .collect();
            nb.sort();
            keys.push(((rank[&v], nb), v));
        }
        keys.sort();
        let mut new_rank: BTreeMap<V, usize> = BTreeMap::new();
        let mut r = 0usize;
        let mut prev: Option<&(usize, Vec<(usize, u32, u32)>)> = None;
        for (k, v) in &keys {
            if prev != Some(k) {
                if prev.is_some() {
                    r += 1;
                }
                prev = Some(k);
            }
            new_rank.insert(*v, r);
        }
        if new_rank == rank {
            return rank;
        }
        rank = new_rank;
    }
}

fn canonical_order(d: &Diagram) -> Vec<V> {
    let verts: Vec<V> = d.vertices().collect();
    let mut best: Option<(Vec<u8>, Vec<V>)> = None;
    search(d, &verts, std::collections::BTreeMap::new(), &mut best, 0);
    best.expect("canonical search yields at least one order").1
}

fn search(
    d: &Diagram,
    verts: &[V],
    seed: std::collections::BTreeMap<V, usize>,
    best: &mut Option<(Vec<u8>, Vec<V>)>,
    depth: usize,
) {
    assert!(depth < 64, "canonical search depth blowup");
    let rank = refine(d, verts, &seed);
    // group classes by rank
    let max_rank = rank.values().copied().max().unwrap_or(0);
    let mut classes: Vec<Vec<V>> = vec![Vec::new(); max_rank + 1];
    for (&v, &r) in &rank {
        classes[r].push(v);
    }
    if let Some(cls) = classes.iter().find(|c| c.len() > 1) {
        // individualize each member of the first non-singleton class
        for &v in cls {
            let mut s2 = seed.clone();
            // force v ahead of everything else chosen so far
            let next = s2.values().copied().max().map_or(0, |m| m + 1);
            s2.insert(v, next);
            search(d, verts, s2, best, depth + 1);
        }
        return;
    }
    let mut order: Vec<(usize, V)> = rank.iter().map(|(&v, &r)| (r, v)).collect();
    order.sort();
    let order: Vec<V> = order.into_iter().map(|(_, v)| v).collect();
    let cert = certificate_for(d, &order);
    if best.as_ref().map_or(true, |(b, _)| cert < *b) {
        *best = Some((cert, order));
    }
}

fn certificate_for(d: &Diagram, order: &[V]) -> Vec<u8> {
    let pos: std::collections::BTreeMap<V, u32> = order
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as u32))
        .collect();
    let mut out = Vec::new();
    out.extend_from_slice(&(order.len() as u32).to_le_bytes());
    for &v in order {
        let s = d.spider(v);
        out.push(s.boundary as u8);
        out.push(match s.kind {
            SpiderKind::Z => 0,
            SpiderKind::X => 1,
        });
        out.push(s.phase.numerator());
        let loops = d.self_loops(v);
        out.extend_from_slice(&loops.plain.to_le_bytes());
        out.extend_from_slice(&loops.hadamard.to_le_bytes());
    }
    let mut edges: Vec<(u32, u32, u32, u32)> = Vec::new();
    for (u, v, kind, mult) in d.edges() {
        if u == v {
            continue; // covered above
        }
        let (a, b) = (pos[&u].min(pos[&v]), pos[&u].max(pos[&v]));
        match kind {
            crate::graph::EdgeKind::Plain => edges.push((a, b, mult, 0)),
            crate::graph::EdgeKind::Hadamard => edges.push((a, b, 0, mult)),
        }
    }
    edges.sort();
    // merge plain/h entries for the same pair
    let mut merged: Vec<(u32, u32, u32, u32)> = Vec::new();
    for e in edges {
        if let Some(last) = merged.last_mut() {
            if last.0 == e.0 && last.1 == e.1 {
                last.2 += e.2;
                last.3 += e.3;
                continue;
            }
        }
        merged.push(e);
    }
    out.extend_from_slice(&(merged.len() as u32).to_le_bytes());
    for (a, b, p, h) in merged {
        out.extend_from_slice(&a.to_le_bytes());
        out.extend_from_slice(&b.to_le_bytes());
        out.extend_from_slice(&p.to_le_bytes());
        out.extend_from_slice(&h.to_le_bytes());
    }
    out.extend_from_slice(&(d.inputs().len() as u32).to_le_bytes());
    for v in d.inputs() {
        out.extend_from_slice(&pos[v].to_le_bytes());
    }
    out.extend_from_slice(&(d.outputs().len() as u32).to_le_bytes());
    for v in d.outputs() {
        out.extend_from_slice(&pos[v].to_le_bytes());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Diagram, EdgeKind, SpiderKind};
    use crate::phase::Phase;

    /// Build the same small graph twice with different insertion orders.
    fn sample(flip: bool) -> Diagram {
        let mut d = Diagram::new();
        let o = d.add_output();
        let (a, b);
        if flip {
            // junk vertex to shift ids, removed later
            let junk = d.add_spider(SpiderKind::Z, Phase::PI);
            b = d.add_spider(SpiderKind::Z, Phase::T);
            a = d.add_spider(SpiderKind::Z, Phase::S);
            d.remove_vertex(junk);
        } else {
            a = d.add_spider(SpiderKind::Z, Phase::S);
            b = d.add_spider(SpiderKind::Z, Phase::T);
        }
        d.add_edge(a, b, EdgeKind::Hadamard);
        d.add_edge(a, o, EdgeKind::Plain);
        d
    }

    #[test]
    fn relabelling_invariance() {
        let d1 = sample(false);
        let d2 = sample(true);
        assert_eq!(canonical_hash(&d1), canonical_hash(&d2));
    }

    #[test]
    fn phase_changes_hash() {
        let d1 = sample(false);
        let mut d2 = sample(false);
        let v = d2.vertices().find(|&v| d2.phase(v) == Phase::T).unwrap();
        d2.set_phase(v, Phase::TDG);
        assert_ne!(canonical_hash(&d1), canonical_hash(&d2));
    }

    #[test]
    fn scalar_in_full_hash_but_not_structural() {
        let d1 = sample(false);
        let mut d2 = sample(false);
        d2.scalar_mut().mul_sqrt2_pow(2);
        assert_ne!(canonical_hash(&d1), canonical_hash(&d2));
        assert_eq!(structural_hash(&d1), structural_hash(&d2));
    }

    #[test]
    fn symmetric_graph_canonicalises() {
        // a 4-cycle of identical spiders plus one tagged: forces backtracking
        let mut d = Diagram::new();
        let vs: Vec<_> = (0..4).map(|_| d.add_spider(SpiderKind::Z, Phase::ZERO)).collect();
        for i in 0..4 {
            d.add_edge(vs[i], vs[(i + 1) % 4], EdgeKind::Hadamard);
        }
        let h1 = canonical_hash(&d);
        // same cycle built in rotated order
        let mut d2 = Diagram::new();
        let vs: Vec<_> = (0..4).map(|_| d2.add_spider(SpiderKind::Z, Phase::ZERO)).collect();
        for i in 0..4 {
            d2.add_edge(vs[(i + 1) % 4], vs[(i + 2) % 4], EdgeKind::Hadamard);
        }
        assert_eq!(h1, canonical_hash(&d2));
    }
}
