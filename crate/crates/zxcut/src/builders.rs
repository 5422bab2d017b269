use crate::circuit::{parse_circuit, circuit_to_diagram, Circuit, Gate};
use crate::error::Error;
use crate::graph::Diagram;

pub const MSC_D3: &str = include_str!("../data/circuits/msc-d3.zxcirc");
pub const MSC_D5: &str = include_str!("../data/circuits/msc-d5.zxcirc");

/// The committed d=3 cultivation circuit: degenerate-style injection with a
/// single T-dagger, then the transversal double check, all post-selected.
pub fn msc_d3_circuit() -> Circuit {
    parse_circuit(MSC_D3).expect("committed msc-d3 circuit parses")
}

/// The committed d=5 cultivation circuit: the d=3 block (tagged `d3`), the
/// growth of the patch to distance 5, and the larger double check.
pub fn msc_d5_circuit() -> Circuit {
    parse_circuit(MSC_D5).expect("committed msc-d5 circuit parses")
}

/// Extract a gate range as a standalone circuit, renumbering the qubits it
/// touches compactly in index order.
fn subcircuit(c: &Circuit, range: std::ops::Range<usize>) -> Circuit {
    let gates = &c.gates[range];
    let mut used: Vec<u32> = gates.iter().flat_map(|g| g.qubits()).collect();
    used.sort_unstable();
    used.dedup();
    let map = |q: u32| used.binary_search(&q).unwrap() as u32;
    let remap = |g: &Gate| -> Gate {
        match *g {
            Gate::H(q) => Gate::H(map(q)),
            Gate::S(q) => Gate::S(map(q)),
            Gate::Sdg(q) => Gate::Sdg(map(q)),
            Gate::T(q) => Gate::T(map(q)),
            Gate::Tdg(q) => Gate::Tdg(map(q)),
            Gate::X(q) => Gate::X(map(q)),
            Gate::Z(q) => Gate::Z(map(q)),
            Gate::Cx(a, b) => Gate::Cx(map(a), map(b)),
            Gate::Cz(a, b) => Gate::Cz(map(a), map(b)),
            Gate::Init0(q) => Gate::Init0(map(q)),
            Gate::InitP(q) => Gate::InitP(map(q)),
            Gate::Mzps(q) => Gate::Mzps(map(q)),
            Gate::Mxps(q) => Gate::Mxps(map(q)),
        }
    };
    Circuit {
        qubits: used.len() as u32,
        gates: gates.iter().map(remap).collect(),
        regions: Vec::new(),
    }
}

fn region_range(c: &Circuit, name: &str) -> Result<std::ops::Range<usize>, Error> {
    c.regions
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, r)| r.clone())
        .ok_or_else(|| Error::Corrupt(format!("circuit has no region '{name}'")))
}

/// Injection sub-circuit of the d=3 cultivation: a single T-dagger feeding
/// the encoder, leaving the 7-legged encoded state.
pub fn build_injection_d3() -> Diagram {
    let c = msc_d3_circuit();
    let r = region_range(&c, "injection").expect("injection region");
    circuit_to_diagram(&subcircuit(&c, r)).expect("injection translates")
}

/// Double-check sub-circuit of the d=3 cultivation: 14 T gates around the
/// two post-selected transversal checks; data legs pass through open.
pub fn build_double_check_d3() -> Diagram {
    let c = msc_d3_circuit();
    let r = region_range(&c, "double-check").expect("double-check region");
    circuit_to_diagram(&subcircuit(&c, r)).expect("double check translates")
}

/// Full d=3 cultivation diagram: 7 open output legs, T-count 15.
pub fn build_msc_d3() -> Diagram {
    circuit_to_diagram(&msc_d3_circuit()).expect("msc-d3 translates")
}

/// Full d=5 cultivation diagram: 19 open output legs, T-count 53, with the
/// embedded d=3 block's vertices tagged.
pub fn build_msc_d5() -> Diagram {
    circuit_to_diagram(&msc_d5_circuit()).expect("msc-d5 translates")
}

/// Everything after the d=3 block of the d=5 circuit, with the 7 data qubits
/// of the block left as open inputs: composing a 7-leg state with this
/// diagram rebuilds the full d=5 state.
pub fn msc_d5_suffix_circuit() -> Circuit {
    let c = msc_d5_circuit();
    let r = region_range(&c, "d3").expect("d3 region");
    subcircuit(&c, r.end..c.gates.len())
}

/// Named circuits understood by the command line: committed builders or a
/// path to a circuit file.
pub fn load_circuit(name: &str) -> Result<Circuit, Error> {
    match name {
        "msc-d3" => Ok(msc_d3_circuit()),
        "msc-d5" => Ok(msc_d5_circuit()),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|_| Error::UnknownCircuit(name.to_string()))?;
            parse_circuit(&text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn injection_has_a_single_t() {
        let d = build_injection_d3();
        assert_eq!(d.t_count(), 1);
        assert_eq!(d.outputs().len(), 7);
        assert_eq!(d.inputs().len(), 0);
    }

    #[test]
    fn double_check_has_fourteen_ts() {
        let d = build_double_check_d3();
        assert_eq!(d.t_count(), 14);
        assert_eq!(d.inputs().len(), 7);
        assert_eq!(d.outputs().len(), 7);
    }

    #[test]
    fn msc_d3_has_fifteen_ts_and_seven_legs() {
        let d = build_msc_d3();
        assert_eq!(d.t_count(), 15);
        assert_eq!(d.outputs().len(), 7);
        assert_eq!(d.inputs().len(), 0);
    }

    #[test]
    fn injection_composed_with_double_check_matches_full() {
        let inj = build_injection_d3();
        let dc = build_double_check_d3();
        let composed = inj.compose(&dc).unwrap();
        assert_eq!(composed.t_count(), 15);
        assert_eq!(composed.outputs().len(), 7);
    }

    #[test]
    fn msc_d5_t_counts() {
        let d = build_msc_d5();
        assert_eq!(d.t_count(), 53);
        assert_eq!(d.outputs().len(), 19);
        // the tagged d=3 block
        assert_eq!(d.t_count_in_region("d3"), 15);
        // the d=5 double check contributes the rest
        assert_eq!(d.t_count_in_region("d5-check"), 38);
    }

    #[test]
    fn d5_check_region_t_count() {
        let c = msc_d5_circuit();
        let r = c.regions.iter().find(|(n, _)| n == "d5-check").unwrap().1.clone();
        let t = c.gates[r].iter().filter(|g| g.is_t_like()).count();
        assert_eq!(t, 38);
    }

    #[test]
    fn suffix_circuit_shape() {
        let s = msc_d5_suffix_circuit();
        let d = circuit_to_diagram(&s).unwrap();
        assert_eq!(d.inputs().len(), 7);
        assert_eq!(d.outputs().len(), 19);
        assert_eq!(d.t_count(), 38);
    }
}
