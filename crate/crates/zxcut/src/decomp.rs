//! Stabiliser decompositions: spider cutting, single-T expansion, the
//! two-T and six-T (BSS) identities, and magic cat states.
//!
//! Every operation returns a [`DecompositionSum`] whose scalar-weighted
//! terms add up to the exact tensor of the input diagram; coefficients
//! live inside each term's global scalar.

use crate::canon::structural_certificate;
use crate::error::Error;
use crate::graph::{Diagram, EdgeKind, SpiderKind, V};
use crate::phase::Phase;
use crate::rewrite::{add_edge_smart, to_graph_like};
use crate::scalar::ExactScalar;

/// Something that happened while producing a sum; kept for reports.
#[derive(Clone, Debug, serde::Serialize)]
pub enum ProvenanceEvent {
    Cut { vertex: V },
    Expansion { spiders_expanded: usize },
    Dedup { before: usize, after: usize },
    Substitution { region: String, terms: usize },
    Replacement { rule: String, terms: usize },
}

/// A list of diagrams whose tensors sum to the tensor of the diagram the
/// sum was derived from. All terms share boundary arity and ordering.
#[derive(Clone, Debug, Default)]
pub struct DecompositionSum {
    pub terms: Vec<Diagram>,
    pub provenance: Vec<ProvenanceEvent>,
}

impl DecompositionSum {
    pub fn single(d: Diagram) -> DecompositionSum {
        DecompositionSum { terms: vec![d], provenance: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn t_counts(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.t_count()).collect()
    }

    /// Clifford terms this sum would expand to under single-T expansion.
    pub fn clifford_terms(&self) -> u64 {
        self.terms.iter().map(|t| 1u64 << t.t_count()).sum()
    }
}

fn require_internal_z(d: &Diagram, v: V) -> Result<(), Error> {
    if !d.contains(v) {
        return Err(Error::BadVertex(v));
    }
    if d.is_boundary(v) {
        return Err(Error::Precondition(format!("vertex {v} is a boundary vertex")));
    }
    if d.kind(v) != SpiderKind::Z {
        return Err(Error::Precondition(format!(
            "vertex {v} is X-coloured; convert to graph-like first"
        )));
    }
    Ok(())
}

/// Resolve self-loops on `v` without touching anything else (plain loops
/// vanish; Hadamard loops add pi and 1/sqrt(2)).
fn clear_loops(d: &mut Diagram, v: V) {
    let loops = d.self_loops(v);
    if loops.total() == 0 {
        return;
    }
    d.remove_all_edges(v, v);
    for _ in 0..loops.hadamard {
        d.add_phase(v, Phase::PI);
        d.scalar_mut().mul_sqrt2_pow(-1);
    }
}

/// Cut a spider: the two branches pin every incident wire to the |0> and
/// |1> computational branches of the spider, with the phase folded into the
/// second branch's scalar. tensor(A) + tensor(B) = tensor(d) exactly.
pub fn cut_spider(d: &Diagram, v: V) -> Result<DecompositionSum, Error> {
    require_internal_z(d, v)?;
    let mut base = d.clone();
    clear_loops(&mut base, v);
    let beta = base.phase(v);
    let incident: Vec<(V, EdgeKind, u32)> = base
        .neighbors(v)
        .flat_map(|(n, e)| {
            [(n, EdgeKind::Plain, e.plain), (n, EdgeKind::Hadamard, e.hadamard)]
        })
        .filter(|(_, _, m)| *m > 0)
        .collect();
    let degree: u32 = incident.iter().map(|(_, _, m)| m).sum();

    let mut branch = |pin: Phase, extra: Option<Phase>| -> Diagram {
        let mut t = base.clone();
        for &(n, kind, mult) in &incident {
            for _ in 0..mult {
                let w = t.add_spider(SpiderKind::X, pin);
                t.add_edge(w, n, kind);
            }
        }
        t.remove_vertex(v);
        t.scalar_mut().mul_sqrt2_pow(-(degree as i32));
        if let Some(p) = extra {
            t.scalar_mut().mul_phase(p);
        }
        t
    };

    let a = branch(Phase::ZERO, None);
    let b = branch(Phase::PI, Some(beta));
    Ok(DecompositionSum {
        terms: vec![a, b],
        provenance: vec![ProvenanceEvent::Cut { vertex: v }],
    })
}

/// Replace every odd-phase spider in every term by its two computational
/// branches; the result is all-Clifford with sum preserved.
pub fn expand_single_t(s: &DecompositionSum) -> DecompositionSum {
    let mut terms = Vec::new();
    let mut expanded = 0;
    for t in &s.terms {
        let mut stack = vec![t.clone()];
        loop {
            let Some(pos) = stack
                .iter()
                .position(|d| d.t_count() > 0)
            else {
                break;
            };
            let d = stack.swap_remove(pos);
            let v = d
                .vertices()
                .find(|&v| !d.is_boundary(v) && d.phase(v).is_t_like())
                .expect("t_count > 0");
            let sum = cut_spider(&d, v).expect("odd spider is cuttable");
            expanded += 1;
            stack.extend(sum.terms);
        }
        terms.extend(stack);
    }
    let mut provenance = s.provenance.clone();
    provenance.push(ProvenanceEvent::Expansion { spiders_expanded: expanded });
    DecompositionSum { terms, provenance }
}

/// Two odd-phase spiders split into an equal-branch and an unequal-branch
/// term, both Clifford in place of the pair.
pub fn decompose_two_t(d: &Diagram, u: V, v: V) -> Result<DecompositionSum, Error> {
    require_internal_z(d, u)?;
    require_internal_z(d, v)?;
    if u == v {
        return Err(Error::Precondition("need two distinct spiders".into()));
    }
    if !d.phase(u).is_t_like() || !d.phase(v).is_t_like() {
        return Err(Error::Precondition("both spiders must carry odd phases".into()));
    }
    let a = d.phase(u);
    let b = d.phase(v);

    // equal branch: values forced equal, phases add
    let mut t1 = d.clone();
    t1.set_phase(u, a + b);
    t1.set_phase(v, Phase::ZERO);
    t1.add_edge(u, v, EdgeKind::Plain);

    // unequal branch: an X(pi) link, with w^b in the scalar
    let mut t2 = d.clone();
    t2.set_phase(u, a - b);
    t2.set_phase(v, Phase::ZERO);
    let m = t2.add_spider(SpiderKind::X, Phase::PI);
    t2.add_edge(u, m, EdgeKind::Plain);
    t2.add_edge(m, v, EdgeKind::Plain);
    t2.scalar_mut().mul_phase(b);

    Ok(DecompositionSum {
        terms: vec![t1, t2],
        provenance: vec![ProvenanceEvent::Replacement { rule: "two-t".into(), terms: 2 }],
    })
}

// ---------------------------------------------------------------------------
// The six-T decomposition: seven stabiliser terms replacing the pi/4 parts
// of six chosen odd spiders.
// ---------------------------------------------------------------------------

fn shift_all(d: &mut Diagram, legs: &[V], by: Phase) {
    for &v in legs {
        d.add_phase(v, by);
    }
}

/// Decompose the pi/4 resources of six odd-phase spiders into seven
/// Clifford terms.
pub fn decompose_bss(d: &Diagram, legs: &[V]) -> Result<DecompositionSum, Error> {
    if legs.len() != 6 {
        return Err(Error::Precondition(format!(
            "the six-T decomposition needs exactly 6 odd spiders, got {}",
            legs.len()
        )));
    }
    for &v in legs {
        require_internal_z(d, v)?;
        if !d.phase(v).is_t_like() {
            return Err(Error::Precondition(format!("vertex {v} has an even phase")));
        }
    }
    let mut terms = Vec::with_capacity(7);

    // branch all-equal-0 and all-equal-1 pair
    {
        let mut t = d.clone();
        *t.scalar_mut() *= ExactScalar::new(4, [-1, 0, 1, 1]);
        shift_all(&mut t, legs, Phase::TDG);
        terms.push(t);
    }
    {
        let mut t = d.clone();
        *t.scalar_mut() *= ExactScalar::new(4, [-1, 0, 1, -1]);
        shift_all(&mut t, legs, Phase::new(3));
        terms.push(t);
    }
    // parity terms: a fresh hub over all six legs
    {
        let mut t = d.clone();
        *t.scalar_mut() *= ExactScalar::new(-2, [0, -1, 0, 0]);
        let w = t.add_spider(SpiderKind::Z, Phase::PI);
        for &v in legs {
            t.add_phase(v, Phase::T);
            add_edge_smart(&mut t, v, w, EdgeKind::Hadamard);
        }
        terms.push(t);
    }
    {
        let mut t = d.clone();
        *t.scalar_mut() *= ExactScalar::new(-2, [-1, 0, -1, 0]);
        let w = t.add_spider(SpiderKind::Z, Phase::ZERO);
        for &v in legs {
            t.add_phase(v, Phase::T);
            add_edge_smart(&mut t, v, w, EdgeKind::Hadamard);
        }
        terms.push(t);
    }
    {
        let mut t = d.clone();
        *t.scalar_mut() *= ExactScalar::new(-2, [1, 0, 0, 0]);
        let w = t.add_spider(SpiderKind::Z, Phase::SDG);
        for &v in legs {
            t.add_phase(v, Phase::TDG);
            add_edge_smart(&mut t, v, w, EdgeKind::Plain);
        }
        terms.push(t);
    }
    // the two pentagon terms
    for perm in [[0usize, 1, 2, 3, 4, 5], [0, 1, 3, 4, 5, 2]] {
        let p: Vec<V> = perm.iter().map(|&i| legs[i]).collect();
        let mut t = d.clone();
        *t.scalar_mut() *= ExactScalar::new(-6, [1, 0, 1, 0]);
        let mut ws = Vec::new();
        for i in 0..5 {
            let w = t.add_spider(SpiderKind::Z, Phase::ZERO);
            ws.push(w);
            add_edge_smart(&mut t, p[i], w, EdgeKind::Hadamard);
            add_edge_smart(&mut t, w, p[5], EdgeKind::Hadamard);
            t.add_phase(p[i], Phase::TDG);
        }
        t.add_phase(p[5], Phase::new(3));
        for (i, j) in [(0, 2), (0, 3), (1, 3), (1, 4), (2, 4)] {
            add_edge_smart(&mut t, ws[i], ws[j], EdgeKind::Hadamard);
        }
        terms.push(t);
    }
    Ok(DecompositionSum {
        terms,
        provenance: vec![ProvenanceEvent::Replacement { rule: "bss".into(), terms: 7 }],
    })
}

/// Decompose five odd spiders into three terms, each keeping one odd spider
/// (the T-measured cat_6 identity).
pub fn decompose_magic5(d: &Diagram, legs: &[V]) -> Result<DecompositionSum, Error> {
    if legs.len() != 5 {
        return Err(Error::Precondition(format!(
            "the five-T decomposition needs exactly 5 odd spiders, got {}",
            legs.len()
        )));
    }
    for &v in legs {
        require_internal_z(d, v)?;
        if !d.phase(v).is_t_like() {
            return Err(Error::Precondition(format!("vertex {v} has an even phase")));
        }
    }
    let mut t0 = d.clone();
    *t0.scalar_mut() *= ExactScalar::new(-2, [1, 0, 0, 0]);
    for &v in legs {
        t0.add_phase(v, Phase::TDG);
        add_edge_smart(&mut t0, v, legs[0], EdgeKind::Plain);
    }
    t0.add_phase(legs[0], Phase::new(5));

    let mut t1 = d.clone();
    *t1.scalar_mut() *= ExactScalar::new(-2, [-1, 0, 1, 0]);
    let p = t1.add_spider(SpiderKind::Z, Phase::ZERO);
    for &v in legs {
        t1.add_phase(v, Phase::TDG);
        add_edge_smart(&mut t1, v, p, EdgeKind::Hadamard);
    }
    let w = t1.add_spider(SpiderKind::Z, Phase::TDG);
    t1.add_edge(w, p, EdgeKind::Hadamard);

    let mut t2 = d.clone();
    *t2.scalar_mut() *= ExactScalar::new(-18, [0, -1, 0, 0]);
    let p = t2.add_spider(SpiderKind::Z, Phase::ZERO);
    let w = t2.add_spider(SpiderKind::Z, Phase::TDG);
    t2.add_edge(p, w, EdgeKind::Hadamard);
    for i in 0..legs.len() {
        t2.add_phase(legs[i], Phase::TDG);
        add_edge_smart(&mut t2, legs[i], p, EdgeKind::Hadamard);
        add_edge_smart(&mut t2, legs[i], w, EdgeKind::Hadamard);
        for j in (i + 1)..legs.len() {
            add_edge_smart(&mut t2, legs[i], legs[j], EdgeKind::Hadamard);
        }
    }

    Ok(DecompositionSum {
        terms: vec![t0, t1, t2],
        provenance: vec![ProvenanceEvent::Replacement { rule: "magic5".into(), terms: 3 }],
    })
}

// ---------------------------------------------------------------------------
// Magic cat states.
// ---------------------------------------------------------------------------

/// The m-legged magic cat state (I + Z^m)|T>^m / sqrt(2) as a diagram: a
/// parity hub over m odd legs.
pub fn build_cat_state(m: usize) -> Result<Diagram, Error> {
    if m == 0 {
        return Err(Error::Precondition("cat states need at least one leg".into()));
    }
    let mut d = Diagram::new();
    let hub = d.add_spider(SpiderKind::X, Phase::ZERO);
    for _ in 0..m {
        let leg = d.add_spider(SpiderKind::Z, Phase::T);
        let out = d.add_output();
        d.add_edge(leg, out, EdgeKind::Plain);
        d.add_edge(leg, hub, EdgeKind::Plain);
    }
    d.scalar_mut().mul_sqrt2_pow(m as i32 - 1);
    Ok(d)
}

/// A located cat pattern in graph-like form.
pub struct CatPattern {
    pub hub: V,
    pub legs: Vec<V>,
}

/// Find the cat pattern: a Pauli hub whose neighbours are all odd-phase Z
/// spiders over single Hadamard edges.
pub fn find_cat(d: &Diagram) -> Option<CatPattern> {
    for hub in d.vertices() {
        if d.is_boundary(hub) || d.kind(hub) != SpiderKind::Z || !d.phase(hub).is_pauli() {
            continue;
        }
        if d.self_loops(hub).total() > 0 {
            continue;
        }
        let mut legs = Vec::new();
        let mut ok = d.degree(hub) > 0;
        for (n, e) in d.neighbors(hub) {
            if e.hadamard != 1
                || e.plain != 0
                || d.is_boundary(n)
                || d.kind(n) != SpiderKind::Z
                || !d.phase(n).is_t_like()
            {
                ok = false;
                break;
            }
            legs.push(n);
        }
        if ok && (3..=6).contains(&legs.len()) {
            return Some(CatPattern { hub, legs });
        }
    }
    None
}

/// Decompose a cat pattern (3 to 6 legs) into 2 or 3 stabiliser terms.
///
/// The input must be graph-like around the pattern; `decompose_cat6` wraps
/// this with normalisation for the 6-leg case.
pub fn decompose_cat_pattern(d: &Diagram, pat: &CatPattern) -> Result<DecompositionSum, Error> {
    let mut g = d.clone();
    let hub = pat.hub;
    let mut legs = pat.legs.clone();
    if legs.len() < 3 || legs.len() > 6 {
        return Err(Error::PatternMismatch(format!("cat with {} legs", legs.len())));
    }
    // normalise a pi hub onto the first leg
    if g.phase(hub).is_pi() {
        g.set_phase(hub, Phase::ZERO);
        let v1 = legs[0];
        let nbrs: Vec<V> = g.neighbor_vec(v1).into_iter().filter(|&x| x != hub).collect();
        for n in nbrs {
            g.add_phase(n, Phase::PI);
        }
        let p = g.phase(v1);
        g.scalar_mut().mul_phase(p);
        g.set_phase(v1, -p);
    }
    // odd numbers of legs get a phase-free padding leg
    if legs.len() == 3 || legs.len() == 5 {
        let w = g.add_spider(SpiderKind::Z, Phase::ZERO);
        let v = g.add_spider(SpiderKind::Z, Phase::ZERO);
        g.add_edge(v, w, EdgeKind::Hadamard);
        g.add_edge(v, hub, EdgeKind::Hadamard);
        legs.push(v);
    }
    let terms = if legs.len() == 6 {
        let mut t0 = g.clone();
        t0.scalar_mut().mul_sqrt2_pow(-2);
        for &v in &legs {
            t0.add_phase(v, Phase::TDG);
            t0.remove_edge(v, hub, EdgeKind::Hadamard);
            t0.add_edge(v, hub, EdgeKind::Plain);
        }
        t0.set_phase(hub, Phase::SDG);

        let mut t1 = g.clone();
        *t1.scalar_mut() *= ExactScalar::new(2, [-1, 0, 1, 0]);
        for &v in &legs {
            t1.add_phase(v, Phase::TDG);
        }

        let mut t2 = g.clone();
        *t2.scalar_mut() *= ExactScalar::new(-14, [0, -1, 0, 0]);
        for i in 0..legs.len() {
            t2.add_phase(legs[i], Phase::TDG);
            for j in (i + 1)..legs.len() {
                add_edge_smart(&mut t2, legs[i], legs[j], EdgeKind::Hadamard);
            }
        }
        vec![t0, t1, t2]
    } else {
        // 4 legs
        let mut t0 = g.clone();
        *t0.scalar_mut() *= ExactScalar::new(0, [0, 0, 1, 0]);
        for &v in &legs {
            t0.add_phase(v, Phase::TDG);
        }
        let mut t1 = g.clone();
        *t1.scalar_mut() *= ExactScalar::new(2, [1, 0, -1, 0]);
        for &v in &legs {
            t1.add_phase(v, Phase::TDG);
            t1.remove_edge(v, hub, EdgeKind::Hadamard);
            t1.add_edge(v, hub, EdgeKind::Plain);
        }
        t1.set_phase(hub, Phase::SDG);
        vec![t0, t1]
    };
    let n = terms.len();
    Ok(DecompositionSum {
        terms,
        provenance: vec![ProvenanceEvent::Replacement { rule: "cat".into(), terms: n }],
    })
}

/// Decompose a 6-legged cat pattern into 3 stabiliser terms.
pub fn decompose_cat6(d: &Diagram) -> Result<DecompositionSum, Error> {
    let g = to_graph_like(d);
    let pat = find_cat(&g).ok_or(Error::PatternMismatch("no cat pattern found".into()))?;
    if pat.legs.len() != 6 {
        return Err(Error::PatternMismatch(format!(
            "expected a 6-legged cat, found {} legs",
            pat.legs.len()
        )));
    }
    decompose_cat_pattern(&g, &pat)
}

/// Measure T on an outward leg of a cat pattern, producing the
/// decomposition of the remaining |T>^(m-1).
pub fn magic_from_cat(d: &Diagram, leg_position: usize) -> Result<DecompositionSum, Error> {
    let g = to_graph_like(d);
    // locate the pattern, tolerating the 2-legged Clifford case
    let sum = if let Some(pat) = find_cat(&g) {
        decompose_cat_pattern(&g, &pat)?
    } else {
        // cat_2 is already a stabiliser diagram
        DecompositionSum::single(g.clone())
    };
    if leg_position >= g.outputs().len() {
        return Err(Error::PatternMismatch(format!("no output leg {leg_position}")));
    }
    let mut out = Vec::new();
    for t in &sum.terms {
        let mut t = t.clone();
        let b = t.outputs()[leg_position];
        let (n, kind) = t.unique_edge(b);
        t.remove_vertex(b);
        let eff = t.add_spider(SpiderKind::Z, Phase::TDG);
        t.add_edge(eff, n, kind);
        t.scalar_mut().mul_sqrt2_pow(-1);
        out.push(crate::rewrite::full_reduce(&t));
    }
    let mut provenance = sum.provenance;
    provenance.push(ProvenanceEvent::Replacement { rule: "t-measure".into(), terms: out.len() });
    Ok(DecompositionSum { terms: out, provenance })
}

// ---------------------------------------------------------------------------
// Dedup.
// ---------------------------------------------------------------------------

/// Merge structurally identical terms by adding their scalars; zero-scalar
/// terms are dropped. Terms are compared by full canonical certificate, so
/// only relabelling-equal diagrams merge. The result is ordered by
/// certificate for determinism.
pub fn dedup_terms(s: &DecompositionSum) -> DecompositionSum {
    let before = s.terms.len();
    let mut groups: std::collections::BTreeMap<Vec<u8>, (Diagram, ExactScalar)> =
        std::collections::BTreeMap::new();
    for t in &s.terms {
        let cert = structural_certificate(t);
        match groups.get_mut(&cert) {
            Some((_, scalar)) => {
                *scalar += *t.scalar();
            }
            None => {
                let scalar = *t.scalar();
                groups.insert(cert, (t.clone(), scalar));
            }
        }
    }
    let mut terms = Vec::new();
    for (_, (mut d, scalar)) in groups {
        if scalar.is_zero() {
            continue;
        }
        *d.scalar_mut() = scalar;
        terms.push(d);
    }
    let after = terms.len();
    let mut provenance = s.provenance.clone();
    provenance.push(ProvenanceEvent::Dedup { before, after });
    DecompositionSum { terms, provenance }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluator::{contract_dense, eval_sum, ContractOpts, DenseState};
    use num_complex::Complex64;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn opts() -> ContractOpts {
        ContractOpts::default()
    }

    fn sum_states(s: &DecompositionSum) -> DenseState {
        let states: Vec<DenseState> = s
            .terms
            .iter()
            .map(|t| contract_dense(t, opts()).unwrap())
            .collect();
        eval_sum(states.iter()).unwrap()
    }

    fn t_states(n: usize) -> Diagram {
        let mut d = Diagram::new();
        for _ in 0..n {
            let s = d.add_spider(SpiderKind::Z, Phase::T);
            let o = d.add_output();
            d.add_edge(s, o, EdgeKind::Plain);
        }
        d
    }

    /// w^{|x|} amplitudes of |T>^n (unnormalised spider convention).
    fn t_oracle(n: usize) -> Vec<Complex64> {
        let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        (0..1usize << n).map(|x| w.powu(x.count_ones())).collect()
    }

    fn assert_close(a: &[Complex64], b: &[Complex64], tol: f64, what: &str) {
        for (i, (x, y)) in a.iter().zip(b.iter()).enumerate() {
            assert!((x - y).norm() < tol, "{what}: entry {i}: {x} vs {y}");
        }
    }

    #[test]
    fn cut_degree_zero_spider() {
        for m in 0..8 {
            let mut d = Diagram::new();
            let v = d.add_spider(SpiderKind::Z, Phase::new(m));
            let s = cut_spider(&d, v).unwrap();
            assert_eq!(s.terms.len(), 2);
            let total = sum_states(&s);
            let expect = ExactScalar::one_plus_phase(Phase::new(m));
            assert_eq!(total.amps()[0], expect);
        }
    }

    #[test]
    fn cut_preserves_sum_on_random_diagrams() {
        let mut rng = StdRng::seed_from_u64(31);
        let mut tried = 0;
        for _ in 0..60 {
            let d = crate::rewrite::test_support::random_mixed_diagram(&mut rng, 8, 4);
            let g = to_graph_like(&d);
            let Some(v) = g.vertices().find(|&v| !g.is_boundary(v)) else { continue };
            let s = match cut_spider(&g, v) {
                Ok(s) => s,
                Err(_) => continue,
            };
            tried += 1;
            let total = sum_states(&s);
            let orig = contract_dense(&g, opts()).unwrap();
            assert_eq!(total, orig, "cut sum differs exactly");
        }
        assert!(tried > 30);
    }

    #[test]
    fn cut_rejects_boundary_and_x() {
        let mut d = Diagram::new();
        let x = d.add_spider(SpiderKind::X, Phase::T);
        let o = d.add_output();
        d.add_edge(x, o, EdgeKind::Plain);
        assert!(cut_spider(&d, o).is_err());
        assert!(cut_spider(&d, x).is_err());
    }

    #[test]
    fn two_t_on_t_pair_matches_oracle() {
        let d = t_states(2);
        let (u, v) = {
            let mut it = d.vertices().filter(|&v| !d.is_boundary(v));
            (it.next().unwrap(), it.next().unwrap())
        };
        let s = decompose_two_t(&d, u, v).unwrap();
        assert_eq!(s.terms.len(), 2);
        assert!(s.terms.iter().all(|t| t.t_count() == 0));
        let total = sum_states(&s);
        assert_close(&total.to_complex(), &t_oracle(2), 1e-12, "two-t");
        // exact: amplitudes are (1, w, w, i)
        let orig = contract_dense(&d, opts()).unwrap();
        assert_eq!(total, orig);
    }

    #[test]
    fn two_t_twice_on_four_ts() {
        let d = t_states(4);
        let vs: Vec<V> = d.vertices().filter(|&v| !d.is_boundary(v)).collect();
        let s1 = decompose_two_t(&d, vs[0], vs[1]).unwrap();
        let mut all = Vec::new();
        for t in &s1.terms {
            let s2 = decompose_two_t(t, vs[2], vs[3]).unwrap();
            all.extend(s2.terms);
        }
        assert_eq!(all.len(), 4);
        let states: Vec<DenseState> = all.iter().map(|t| contract_dense(t, opts()).unwrap()).collect();
        let total = eval_sum(states.iter()).unwrap();
        assert_close(&total.to_complex(), &t_oracle(4), 1e-12, "two-t squared");
    }

    #[test]
    fn bss_seven_terms_match_oracle() {
        let d = t_states(6);
        let legs: Vec<V> = d.vertices().filter(|&v| !d.is_boundary(v)).collect();
        let s = decompose_bss(&d, &legs).unwrap();
        assert_eq!(s.terms.len(), 7);
        assert!(s.terms.iter().all(|t| t.t_count() == 0), "all terms Clifford");
        let total = sum_states(&s);
        assert_close(&total.to_complex(), &t_oracle(6), 1e-10, "bss");
    }

    #[test]
    fn bss_needs_six_legs() {
        let d = t_states(5);
        let legs: Vec<V> = d.vertices().filter(|&v| !d.is_boundary(v)).collect();
        assert!(decompose_bss(&d, &legs).is_err());
    }

    #[test]
    fn cat_state_amplitudes() {
        for m in 1..=6usize {
            let d = build_cat_state(m).unwrap();
            let a = contract_dense(&d, opts()).unwrap().to_complex();
            let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
            let r = 2f64.sqrt();
            for (x, amp) in a.iter().enumerate() {
                let weight = x.count_ones();
                let expect = if weight % 2 == 0 {
                    w.powu(weight) * r
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert!((amp - expect / 2f64.sqrt() * 2f64.sqrt()).norm() < 1e-12,
                    "cat_{m} amplitude {x}");
            }
        }
    }

    #[test]
    fn cat1_collapses_to_zero_ket() {
        let d = build_cat_state(1).unwrap();
        let a = contract_dense(&d, opts()).unwrap().to_complex();
        assert!((a[0].re - 2f64.sqrt()).abs() < 1e-12);
        assert!(a[1].norm() < 1e-12);
    }

    #[test]
    fn cat6_three_terms_sum_exactly() {
        let d = build_cat_state(6).unwrap();
        let s = decompose_cat6(&d).unwrap();
        assert_eq!(s.terms.len(), 3);
        let total = sum_states(&s);
        let orig = contract_dense(&d, opts()).unwrap();
        let f = crate::evaluator::fidelity(&total, &orig).unwrap();
        assert!(f > 1.0 - 1e-12, "fidelity {f}");
        // and exactly
        assert_eq!(total, orig);
    }

    #[test]
    fn cat4_two_terms_sum_exactly() {
        let d = build_cat_state(4).unwrap();
        let g = to_graph_like(&d);
        let pat = find_cat(&g).unwrap();
        let s = decompose_cat_pattern(&g, &pat).unwrap();
        assert_eq!(s.terms.len(), 2);
        assert_eq!(sum_states(&s), contract_dense(&d, opts()).unwrap());
    }

    #[test]
    fn cat_odd_padding_works() {
        for m in [3usize, 5] {
            let d = build_cat_state(m).unwrap();
            let g = to_graph_like(&d);
            let pat = find_cat(&g).unwrap();
            let s = decompose_cat_pattern(&g, &pat).unwrap();
            assert_eq!(sum_states(&s), contract_dense(&d, opts()).unwrap(), "cat_{m}");
        }
    }

    #[test]
    fn magic_from_cat6_gives_t5() {
        let d = build_cat_state(6).unwrap();
        let s = magic_from_cat(&d, 5).unwrap();
        assert_eq!(s.terms.len(), 3, "3 almost-Clifford terms instead of 32");
        for t in &s.terms {
            assert!(t.t_count() <= 1, "single odd spider per term");
        }
        // 6 Clifford terms after single-T expansion
        assert_eq!(s.clifford_terms(), 6);
        let total = sum_states(&s);
        // proportional to |T>^5 with one consistent constant
        let oracle = t_oracle(5);
        let a = total.to_complex();
        let ratio = a[0] / oracle[0];
        for (x, y) in a.iter().zip(oracle.iter()) {
            assert!((x - y * ratio).norm() < 1e-10, "not proportional");
        }
        assert!(ratio.norm() > 1e-6);
    }

    #[test]
    fn magic_from_cat2_collapses_to_t() {
        let d = build_cat_state(2).unwrap();
        let s = magic_from_cat(&d, 1).unwrap();
        assert_eq!(s.terms.len(), 1);
        let total = sum_states(&s);
        let oracle = t_oracle(1);
        let a = total.to_complex();
        let ratio = a[0] / oracle[0];
        assert!((a[1] - oracle[1] * ratio).norm() < 1e-12);
    }

    #[test]
    fn magic5_three_terms_match_oracle() {
        let d = t_states(5);
        let legs: Vec<V> = d.vertices().filter(|&v| !d.is_boundary(v)).collect();
        let s = decompose_magic5(&d, &legs).unwrap();
        assert_eq!(s.terms.len(), 3);
        for t in &s.terms {
            assert_eq!(t.t_count(), 1, "one leftover odd spider per term");
        }
        let total = sum_states(&s);
        assert_close(&total.to_complex(), &t_oracle(5), 1e-10, "magic5");
    }

    #[test]
    fn expansion_counts_and_clifford() {
        let d = t_states(3);
        let s = expand_single_t(&DecompositionSum::single(d.clone()));
        assert_eq!(s.terms.len(), 8);
        assert!(s.terms.iter().all(|t| t.t_count() == 0));
        let total = sum_states(&s);
        assert_eq!(total, contract_dense(&d, opts()).unwrap());
        // Clifford input passes through unchanged
        let c = t_states(0);
        let s = expand_single_t(&DecompositionSum::single(c));
        assert_eq!(s.terms.len(), 1);
    }

    #[test]
    fn dedup_merges_identical_terms() {
        let d = t_states(2);
        let s = DecompositionSum {
            terms: vec![d.clone(), d.clone()],
            provenance: vec![],
        };
        let out = dedup_terms(&s);
        assert_eq!(out.terms.len(), 1);
        // merged scalar is the double
        let merged = contract_dense(&out.terms[0], opts()).unwrap();
        let single = contract_dense(&d, opts()).unwrap();
        let mut doubled = single.clone();
        doubled.add_assign(&single);
        assert_eq!(merged, doubled);
    }

    #[test]
    fn dedup_drops_cancelling_terms() {
        let d = t_states(1);
        let mut neg = d.clone();
        *neg.scalar_mut() *= ExactScalar::new(0, [-1, 0, 0, 0]);
        let s = DecompositionSum { terms: vec![d, neg], provenance: vec![] };
        let out = dedup_terms(&s);
        assert!(out.terms.is_empty());
    }

    #[test]
    fn dedup_keeps_distinct_terms() {
        let a = t_states(1);
        let b = t_states(2);
        // different leg counts would break arity; use same arity, different phase
        let mut c = t_states(1);
        let v = c.vertices().find(|&v| !c.is_boundary(v)).unwrap();
        c.set_phase(v, Phase::new(3));
        let s = DecompositionSum { terms: vec![a.clone(), c], provenance: vec![] };
        assert_eq!(dedup_terms(&s).terms.len(), 2);
        drop(b);
    }
}
