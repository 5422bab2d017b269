use crate::error::Error;
use crate::graph::{Diagram, EdgeKind, SpiderKind, V};
use crate::scalar::ExactScalar;
use num_complex::Complex64;

/// Dense amplitude vector over the boundary bitstrings of a diagram.
///
/// Bit k of an index addresses boundary position k (inputs then outputs),
/// so for a state built from a circuit, bit q is qubit q.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    legs: usize,
    amps: Vec<ExactScalar>,
}

impl DenseState {
    pub fn zero(legs: usize) -> DenseState {
        DenseState { legs, amps: vec![ExactScalar::zero(); 1 << legs] }
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn amps(&self) -> &[ExactScalar] {
        &self.amps
    }

    pub fn from_amps(legs: usize, amps: Vec<ExactScalar>) -> DenseState {
        assert_eq!(amps.len(), 1 << legs);
        DenseState { legs, amps }
    }

    pub fn add_assign(&mut self, other: &DenseState) {
        assert_eq!(self.legs, other.legs, "leg count mismatch");
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.amps.iter().all(|a| a.is_zero())
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.amps.iter().map(|a| a.to_complex()).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.to_complex().norm_sqr()).sum()
    }
}

/// Elementwise sum of term states; scalars are already folded per term.
pub fn eval_sum<'a, I: IntoIterator<Item = &'a DenseState>>(terms: I) -> Option<DenseState> {
    let mut it = terms.into_iter();
    let first = it.next()?;
    let mut acc = first.clone();
    for t in it {
        acc.add_assign(t);
    }
    Some(acc)
}

/// |<a|b>|^2 / (<a|a><b|b>).
pub fn fidelity(a: &DenseState, b: &DenseState) -> Result<f64, Error> {
    if a.legs != b.legs {
        return Err(Error::Precondition(format!(
            "fidelity of states with {} vs {} legs",
            a.legs, b.legs
        )));
    }
    let av = a.to_complex();
    let bv = b.to_complex();
    let na: f64 = av.iter().map(|z| z.norm_sqr()).sum();
    let nb: f64 = bv.iter().map(|z| z.norm_sqr()).sum();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Precondition("fidelity of a zero state".into()));
    }
    let ip: Complex64 = av.iter().zip(&bv).map(|(x, y)| x.conj() * y).sum();
    Ok(ip.norm_sqr() / (na * nb))
}

// ---------------------------------------------------------------------------
// Dense contraction. This is the ground-truth oracle: it never touches the
// rewrite engine and works directly from the spider tensor semantics.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct ContractOpts {
    /// Largest tensor rank the contraction may materialise.
    pub max_rank: usize,
}

impl Default for ContractOpts {
    fn default() -> Self {
        ContractOpts { max_rank: 22 }
    }
}

#[derive(Clone)]
struct Tensor {
    wires: Vec<u32>,
    data: Vec<ExactScalar>,
}

impl Tensor {
    fn rank(&self) -> usize {
        self.wires.len()
    }

    fn scalar(value: ExactScalar) -> Tensor {
        Tensor { wires: vec![], data: vec![value] }
    }

    /// Sum over the diagonal of a wire that appears twice.
    fn trace(&self, wire: u32) -> Tensor {
        let pos: Vec<usize> = self
            .wires
            .iter()
            .enumerate()
            .filter(|(_, w)| **w == wire)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(pos.len(), 2, "trace expects a doubled wire");
        let (p1, p2) = (pos[0], pos[1]);
        let keep: Vec<usize> = (0..self.rank()).filter(|i| *i != p1 && *i != p2).collect();
        let wires: Vec<u32> = keep.iter().map(|&i| self.wires[i]).collect();
        let mut data = vec![ExactScalar::zero(); 1 << wires.len()];
        for (out, slot) in data.iter_mut().enumerate() {
            for b in 0..2usize {
                let mut idx = (b << p1) | (b << p2);
                for (j, &i) in keep.iter().enumerate() {
                    if (out >> j) & 1 == 1 {
                        idx |= 1 << i;
                    }
                }
                *slot += self.data[idx];
            }
        }
        Tensor { wires, data }
    }

    fn has_doubled_wire(&self) -> Option<u32> {
        let mut seen = std::collections::BTreeSet::new();
        for &w in &self.wires {
            if !seen.insert(w) {
                return Some(w);
            }
        }
        None
    }
}

/// Contract two tensors over all of their shared wires.
fn contract_pair(a: &Tensor, b: &Tensor) -> Tensor {
    let shared: Vec<u32> = a
        .wires
        .iter()
        .copied()
        .filter(|w| b.wires.contains(w))
        .collect();
    let a_keep: Vec<usize> = (0..a.rank()).filter(|&i| !shared.contains(&a.wires[i])).collect();
    let b_keep: Vec<usize> = (0..b.rank()).filter(|&i| !shared.contains(&b.wires[i])).collect();
    let a_shared: Vec<usize> = shared
        .iter()
        .map(|w| a.wires.iter().position(|x| x == w).unwrap())
        .collect();
    let b_shared: Vec<usize> = shared
        .iter()
        .map(|w| b.wires.iter().position(|x| x == w).unwrap())
        .collect();
    let mut wires: Vec<u32> = a_keep.iter().map(|&i| a.wires[i]).collect();
    wires.extend(b_keep.iter().map(|&i| b.wires[i]));
    let ra = a_keep.len();
    let mut data = vec![ExactScalar::zero(); 1 << wires.len()];
    for (out, slot) in data.iter_mut().enumerate() {
        let mut acc = ExactScalar::zero();
        for s in 0..(1usize << shared.len()) {
            let mut ia = 0usize;
            for (j, &i) in a_keep.iter().enumerate() {
                if (out >> j) & 1 == 1 {
                    ia |= 1 << i;
                }
            }
            for (j, &i) in a_shared.iter().enumerate() {
                if (s >> j) & 1 == 1 {
                    ia |= 1 << i;
                }
            }
            let va = a.data[ia];
            if va.is_zero() {
                continue;
            }
            let mut ib = 0usize;
            for (j, &i) in b_keep.iter().enumerate() {
                if (out >> (ra + j)) & 1 == 1 {
                    ib |= 1 << i;
                }
            }
            for (j, &i) in b_shared.iter().enumerate() {
                if (s >> j) & 1 == 1 {
                    ib |= 1 << i;
                }
            }
            let vb = b.data[ib];
            if vb.is_zero() {
                continue;
            }
            acc += va * vb;
        }
        *slot = acc;
    }
    Tensor { wires, data }
}

fn z_tensor(rank: usize, phase: crate::phase::Phase, wires: Vec<u32>) -> Tensor {
    let mut data = vec![ExactScalar::zero(); 1 << rank];
    data[0] = ExactScalar::one();
    let last = (1 << rank) - 1;
    data[last] += ExactScalar::from_phase(phase);
    Tensor { wires, data }
}

fn x_tensor(rank: usize, phase: crate::phase::Phase, wires: Vec<u32>) -> Tensor {
    let mut data = vec![ExactScalar::zero(); 1 << rank];
    let ph = ExactScalar::from_phase(phase);
    for (idx, slot) in data.iter_mut().enumerate() {
        let mut e = if idx.count_ones() % 2 == 0 {
            ExactScalar::one() + ph
        } else {
            ExactScalar::one() + ph * ExactScalar::new(0, [-1, 0, 0, 0])
        };
        e.mul_sqrt2_pow(-(rank as i32));
        *slot = e;
    }
    Tensor { wires, data }
}

fn h_tensor(w1: u32, w2: u32) -> Tensor {
    let mut h = ExactScalar::one();
    h.mul_sqrt2_pow(-1);
    let mut neg = ExactScalar::new(0, [-1, 0, 0, 0]);
    neg.mul_sqrt2_pow(-1);
    Tensor { wires: vec![w1, w2], data: vec![h, h, h, neg] }
}

/// Exact dense contraction of a diagram's tensor semantics.
///
/// Independent of the rewrite engine by construction: every spider is
/// expanded to its defining tensor and wires are eliminated greedily.
pub fn contract_dense(d: &Diagram, opts: ContractOpts) -> Result<DenseState, Error> {
    let boundary = d.boundary_order();
    let legs = boundary.len();
    if legs > opts.max_rank {
        return Err(Error::BudgetExceeded { needed: legs, limit: opts.max_rank });
    }

    // Assign wires: one per plain edge instance; Hadamard edges get a pair
    // of wires with an H tensor between them.
    let mut next_wire: u32 = 0;
    let mut vertex_wires: std::collections::BTreeMap<V, Vec<u32>> = std::collections::BTreeMap::new();
    let mut h_tensors: Vec<Tensor> = Vec::new();
    // external wire id per boundary position, fixed after contraction
    for v in d.vertices() {
        vertex_wires.insert(v, Vec::new());
    }
    for (u, v, kind, mult) in d.edges() {
        for _ in 0..mult {
            match kind {
                EdgeKind::Plain => {
                    let w = next_wire;
                    next_wire += 1;
                    vertex_wires.get_mut(&u).unwrap().push(w);
                    vertex_wires.get_mut(&v).unwrap().push(w);
                }
                EdgeKind::Hadamard => {
                    let w1 = next_wire;
                    let w2 = next_wire + 1;
                    next_wire += 2;
                    vertex_wires.get_mut(&u).unwrap().push(w1);
                    vertex_wires.get_mut(&v).unwrap().push(w2);
                    h_tensors.push(h_tensor(w1, w2));
                }
            }
        }
    }

    // boundary vertices pass their single wire through as an external wire
    let mut external: Vec<u32> = Vec::with_capacity(legs);
    for &b in &boundary {
        let ws = &vertex_wires[&b];
        if ws.len() != 1 {
            return Err(Error::Corrupt(format!("boundary vertex {b} has degree {}", ws.len())));
        }
        external.push(ws[0]);
    }

    let mut tensors: Vec<Tensor> = Vec::new();
    for v in d.vertices() {
        if d.is_boundary(v) {
            continue;
        }
        let ws = vertex_wires[&v].clone();
        let rank = ws.len();
        if rank > opts.max_rank {
            return Err(Error::BudgetExceeded { needed: rank, limit: opts.max_rank });
        }
        let t = match d.kind(v) {
            SpiderKind::Z => z_tensor(rank, d.phase(v), ws),
            SpiderKind::X => x_tensor(rank, d.phase(v), ws),
        };
        tensors.push(t);
    }
    tensors.extend(h_tensors);

    // resolve self-loop traces
    let mut i = 0;
    while i < tensors.len() {
        while let Some(w) = tensors[i].has_doubled_wire() {
            tensors[i] = tensors[i].trace(w);
        }
        i += 1;
    }

    let is_external = |w: u32| external.contains(&w);

    // contract greedily: repeatedly merge the pair of tensors sharing at
    // least one internal wire whose result has the smallest rank
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for a in 0..tensors.len() {
            for b in (a + 1)..tensors.len() {
                let shared: usize = tensors[a]
                    .wires
                    .iter()
                    .filter(|w| tensors[b].wires.contains(w))
                    .count();
                if shared == 0 {
                    continue;
                }
                let rank = tensors[a].rank() + tensors[b].rank() - 2 * shared;
                if best.map_or(true, |(_, _, r)| rank < r) {
                    best = Some((a, b, rank));
                }
            }
        }
        let Some((a, b, rank)) = best else { break };
        if rank > opts.max_rank {
            return Err(Error::BudgetExceeded { needed: rank, limit: opts.max_rank });
        }
        let tb = tensors.swap_remove(b);
        let ta = tensors.swap_remove(a);
        let mut t = contract_pair(&ta, &tb);
        while let Some(w) = t.has_doubled_wire() {
            t = t.trace(w);
        }
        tensors.push(t);
    }

    // all remaining shared wires are gone; outer-product the rest
    debug_assert!(tensors
        .iter()
        .all(|t| t.wires.iter().all(|&w| is_external(w))));
    let mut acc = Tensor::scalar(*d.scalar());
    for t in tensors {
        if acc.rank() + t.rank() > opts.max_rank.max(legs) {
            return Err(Error::BudgetExceeded { needed: acc.rank() + t.rank(), limit: opts.max_rank });
        }
        acc = outer(&acc, &t);
    }

    // permute into boundary order
    let mut amps = vec![ExactScalar::zero(); 1 << legs];
    let pos: Vec<usize> = external
        .iter()
        .map(|w| acc.wires.iter().position(|x| x == w).unwrap())
        .collect();
    for (out, slot) in amps.iter_mut().enumerate() {
        let mut idx = 0usize;
        for (k, &p) in pos.iter().enumerate() {
            if (out >> k) & 1 == 1 {
                idx |= 1 << p;
            }
        }
        *slot = acc.data[idx];
    }
    Ok(DenseState { legs, amps })
}

fn outer(a: &Tensor, b: &Tensor) -> Tensor {
    let mut wires = a.wires.clone();
    wires.extend(&b.wires);
    let ra = a.rank();
    let mut data = vec![ExactScalar::zero(); 1 << wires.len()];
    for (out, slot) in data.iter_mut().enumerate() {
        let ia = out & ((1 << ra) - 1);
        let ib = out >> ra;
        *slot = a.data[ia] * b.data[ib];
    }
    Tensor { wires, data }
}

/// Evaluate a Clifford (T-count 0) term: reduce first, then contract the
/// small remainder.
pub fn eval_clifford_term(d: &Diagram, opts: ContractOpts) -> Result<DenseState, Error> {
    if d.t_count() != 0 {
        return Err(Error::Precondition(format!(
            "eval_clifford_term on a diagram with T-count {}",
            d.t_count()
        )));
    }
    let r = crate::rewrite::full_reduce(d);
    contract_dense(&r, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::Phase;

    fn amp(d: &Diagram) -> Vec<Complex64> {
        contract_dense(d, ContractOpts::default()).unwrap().to_complex()
    }

    #[test]
    fn single_t_spider_state() {
        let mut d = Diagram::new();
        let s = d.add_spider(SpiderKind::Z, Phase::T);
        let o = d.add_output();
        d.add_edge(s, o, EdgeKind::Plain);
        let a = amp(&d);
        assert!((a[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        assert!((a[1] - w).norm() < 1e-12);
    }

    #[test]
    fn degree_zero_values() {
        let mut d = Diagram::new();
        d.add_spider(SpiderKind::Z, Phase::ZERO);
        let a = amp(&d);
        assert!((a[0] - Complex64::new(2.0, 0.0)).norm() < 1e-12);

        let mut d = Diagram::new();
        d.add_spider(SpiderKind::Z, Phase::PI);
        let a = amp(&d);
        assert!(a[0].norm() < 1e-12);
    }

    #[test]
    fn hadamard_edge_is_hadamard() {
        // input -H-edge- output == the Hadamard matrix
        let mut d = Diagram::new();
        let i = d.add_input();
        let o = d.add_output();
        d.add_edge(i, o, EdgeKind::Hadamard);
        let a = amp(&d);
        let r = 1.0 / 2f64.sqrt();
        assert!((a[0].re - r).abs() < 1e-12);
        assert!((a[1].re - r).abs() < 1e-12);
        assert!((a[2].re - r).abs() < 1e-12);
        assert!((a[3].re + r).abs() < 1e-12);
    }

    #[test]
    fn x_spider_is_hadamard_conjugate() {
        // 1-leg X(0) = sqrt(2)|0>
        let mut d = Diagram::new();
        let s = d.add_spider(SpiderKind::X, Phase::ZERO);
        let o = d.add_output();
        d.add_edge(s, o, EdgeKind::Plain);
        let a = amp(&d);
        assert!((a[0].re - 2f64.sqrt()).abs() < 1e-12);
        assert!(a[1].norm() < 1e-12);
        // 1-leg X(pi) = sqrt(2)|1>
        let mut d = Diagram::new();
        let s = d.add_spider(SpiderKind::X, Phase::PI);
        let o = d.add_output();
        d.add_edge(s, o, EdgeKind::Plain);
        let a = amp(&d);
        assert!(a[0].norm() < 1e-12);
        assert!((a[1].re - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn self_loop_traces() {
        // Z(0) with a plain self-loop and one leg: same as bare Z(0) state
        let mut d = Diagram::new();
        let s = d.add_spider(SpiderKind::Z, Phase::ZERO);
        let o = d.add_output();
        d.add_edge(s, o, EdgeKind::Plain);
        d.add_edge(s, s, EdgeKind::Plain);
        let a = amp(&d);
        assert!((a[0].re - 1.0).abs() < 1e-12);
        assert!((a[1].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cnot_diagram() {
        // control Z(0) on wire 1, target X(0) on wire 2, plain bridge,
        // with sqrt(2) scalar correction: exact CNOT
        let mut d = Diagram::new();
        let i0 = d.add_input();
        let i1 = d.add_input();
        let c = d.add_spider(SpiderKind::Z, Phase::ZERO);
        let t = d.add_spider(SpiderKind::X, Phase::ZERO);
        let o0 = d.add_output();
        let o1 = d.add_output();
        d.add_edge(i0, c, EdgeKind::Plain);
        d.add_edge(c, o0, EdgeKind::Plain);
        d.add_edge(i1, t, EdgeKind::Plain);
        d.add_edge(t, o1, EdgeKind::Plain);
        d.add_edge(c, t, EdgeKind::Plain);
        d.scalar_mut().mul_sqrt2_pow(1);
        let a = amp(&d);
        // index bits: (i0, i1, o0, o1)
        let get = |i0: usize, i1: usize, o0: usize, o1: usize| {
            a[i0 | (i1 << 1) | (o0 << 2) | (o1 << 3)]
        };
        for c_in in 0..2 {
            for t_in in 0..2 {
                for c_out in 0..2 {
                    for t_out in 0..2 {
                        let expect = if c_out == c_in && t_out == (t_in ^ c_in) { 1.0 } else { 0.0 };
                        assert!(
                            (get(c_in, t_in, c_out, t_out).re - expect).abs() < 1e-12,
                            "cnot entry mismatch"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_product_kronecker() {
        let mut a = Diagram::new();
        let s = a.add_spider(SpiderKind::Z, Phase::T);
        let o = a.add_output();
        a.add_edge(s, o, EdgeKind::Plain);
        let t = a.tensor_product(&a.clone());
        let amps = amp(&t);
        let w = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        let expect = [
            Complex64::new(1.0, 0.0),
            w,
            w,
            w * w,
        ];
        for (x, y) in amps.iter().zip(expect.iter()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn budget_limit_enforced() {
        let mut d = Diagram::new();
        let s = d.add_spider(SpiderKind::Z, Phase::ZERO);
        for _ in 0..5 {
            let o = d.add_output();
            d.add_edge(s, o, EdgeKind::Plain);
        }
        assert!(contract_dense(&d, ContractOpts { max_rank: 3 }).is_err());
    }
}
