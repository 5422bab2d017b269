use crate::error::Error;
use crate::graph::{Diagram, EdgeKind, SpiderKind, V};
use crate::phase::Phase;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum Gate {
    H(u32),
    S(u32),
    Sdg(u32),
    T(u32),
    Tdg(u32),
    X(u32),
    Z(u32),
    Cx(u32, u32),
    Cz(u32, u32),
    Init0(u32),
    InitP(u32),
    /// Measure Z, post-selected on +1; removes the qubit from the boundary.
    Mzps(u32),
    /// Measure X, post-selected on +1; removes the qubit from the boundary.
    Mxps(u32),
}

impl Gate {
    pub fn qubits(&self) -> Vec<u32> {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::T(q) | Gate::Tdg(q)
            | Gate::X(q) | Gate::Z(q) | Gate::Init0(q) | Gate::InitP(q)
            | Gate::Mzps(q) | Gate::Mxps(q) => vec![q],
            Gate::Cx(a, b) | Gate::Cz(a, b) => vec![a, b],
        }
    }

    pub fn is_t_like(&self) -> bool {
        matches!(self, Gate::T(_) | Gate::Tdg(_))
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::S(q) => write!(f, "S {q}"),
            Gate::Sdg(q) => write!(f, "SDG {q}"),
            Gate::T(q) => write!(f, "T {q}"),
            Gate::Tdg(q) => write!(f, "TDG {q}"),
            Gate::X(q) => write!(f, "X {q}"),
            Gate::Z(q) => write!(f, "Z {q}"),
            Gate::Cx(a, b) => write!(f, "CX {a} {b}"),
            Gate::Cz(a, b) => write!(f, "CZ {a} {b}"),
            Gate::Init0(q) => write!(f, "INIT0 {q}"),
            Gate::InitP(q) => write!(f, "INITP {q}"),
            Gate::Mzps(q) => write!(f, "MZPS {q}"),
            Gate::Mxps(q) => write!(f, "MXPS {q}"),
        }
    }
}

/// Gate list over named qubits. Qubits never initialised by INIT0/INITP are
/// open inputs of the resulting diagram; qubits not measured out are open
/// outputs, both ordered by qubit index.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Circuit {
    pub qubits: u32,
    pub gates: Vec<Gate>,
    /// Named half-open gate ranges (build-time region tags).
    pub regions: Vec<(String, std::ops::Range<usize>)>,
}

impl Circuit {
    pub fn new(qubits: u32) -> Circuit {
        Circuit { qubits, gates: Vec::new(), regions: Vec::new() }
    }

    pub fn t_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_t_like()).count()
    }

    /// Gates checked against the structural rules: indices in range, no gate
    /// on a measured-out qubit, at most one init per qubit and only as its
    /// first gate.
    pub fn validate(&self) -> Result<(), Error> {
        let mut used = vec![false; self.qubits as usize];
        let mut measured = vec![false; self.qubits as usize];
        for (i, g) in self.gates.iter().enumerate() {
            for q in g.qubits() {
                if q >= self.qubits {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: format!("qubit {q} out of range (qubits {})", self.qubits),
                    });
                }
                if measured[q as usize] {
                    return Err(Error::Parse {
                        line: i + 1,
                        msg: format!("gate on measured-out qubit {q}"),
                    });
                }
            }
            match g {
                Gate::Init0(q) | Gate::InitP(q) => {
                    if used[*q as usize] {
                        return Err(Error::Parse {
                            line: i + 1,
                            msg: format!("INIT on already-used qubit {q}"),
                        });
                    }
                }
                Gate::Mzps(q) | Gate::Mxps(q) => measured[*q as usize] = true,
                _ => {}
            }
            for q in g.qubits() {
                used[q as usize] = true;
            }
        }
        Ok(())
    }

    pub fn print(&self) -> String {
        let mut out = format!("qubits {}\n", self.qubits);
        let mut starts: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
        let mut ends: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
        for (name, range) in &self.regions {
            starts.entry(range.start).or_default().push(name);
            ends.entry(range.end).or_default().push(name);
        }
        for i in 0..=self.gates.len() {
            if let Some(names) = ends.get(&i) {
                for n in names {
                    out.push_str(&format!("#endregion {n}\n"));
                }
            }
            if let Some(names) = starts.get(&i) {
                for n in names {
                    out.push_str(&format!("#region {n}\n"));
                }
            }
            if i < self.gates.len() {
                out.push_str(&format!("{}\n", self.gates[i]));
            }
        }
        out
    }
}

/// Parse the circuit text format: `qubits N` header, one instruction per
/// line, `#` comments. `#region name`/`#endregion name` pragmas attach
/// build-time tags to the enclosed instruction range.
pub fn parse_circuit(text: &str) -> Result<Circuit, Error> {
    let mut circuit: Option<Circuit> = None;
    let mut open_regions: Vec<(String, usize)> = Vec::new();
    let mut regions: Vec<(String, std::ops::Range<usize>)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("#region") {
            let name = rest.trim().to_string();
            if name.is_empty() {
                return Err(Error::Parse { line, msg: "#region needs a name".into() });
            }
            let at = circuit.as_ref().map_or(0, |c| c.gates.len());
            open_regions.push((name, at));
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("#endregion") {
            let name = rest.trim().to_string();
            match open_regions.pop() {
                Some((n, start)) if n == name => {
                    let end = circuit.as_ref().map_or(0, |c| c.gates.len());
                    regions.push((n, start..end));
                }
                _ => {
                    return Err(Error::Parse { line, msg: format!("unmatched #endregion {name}") });
                }
            }
            continue;
        }
        if trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let op = parts.next().unwrap();
        let args: Vec<&str> = parts.collect();
        let parse_q = |s: &str| -> Result<u32, Error> {
            s.parse::<u32>().map_err(|_| Error::Parse { line, msg: format!("bad qubit index '{s}'") })
        };
        let one = |args: &[&str]| -> Result<u32, Error> {
            if args.len() != 1 {
                return Err(Error::Parse { line, msg: format!("{op} expects 1 qubit argument") });
            }
            parse_q(args[0])
        };
        let two = |args: &[&str]| -> Result<(u32, u32), Error> {
            if args.len() != 2 {
                return Err(Error::Parse { line, msg: format!("{op} expects 2 qubit arguments") });
            }
            let a = parse_q(args[0])?;
            let b = parse_q(args[1])?;
            if a == b {
                return Err(Error::Parse { line, msg: format!("{op} with equal qubits") });
            }
            Ok((a, b))
        };
        if op == "qubits" {
            if circuit.is_some() {
                return Err(Error::Parse { line, msg: "duplicate qubits header".into() });
            }
            let n = one(&args)?;
            circuit = Some(Circuit::new(n));
            continue;
        }
        let c = circuit
            .as_mut()
            .ok_or(Error::Parse { line, msg: "instruction before qubits header".into() })?;
        let gate = match op {
            "H" => Gate::H(one(&args)?),
            "S" => Gate::S(one(&args)?),
            "SDG" => Gate::Sdg(one(&args)?),
            "T" => Gate::T(one(&args)?),
            "TDG" => Gate::Tdg(one(&args)?),
            "X" => Gate::X(one(&args)?),
            "Z" => Gate::Z(one(&args)?),
            "CX" => {
                let (a, b) = two(&args)?;
                Gate::Cx(a, b)
            }
            "CZ" => {
                let (a, b) = two(&args)?;
                Gate::Cz(a, b)
            }
            "INIT0" => Gate::Init0(one(&args)?),
            "INITP" => Gate::InitP(one(&args)?),
            "MZPS" => Gate::Mzps(one(&args)?),
            "MXPS" => Gate::Mxps(one(&args)?),
            other => {
                return Err(Error::Parse { line, msg: format!("unknown instruction '{other}'") });
            }
        };
        if let Some(q) = gate.qubits().iter().find(|&&q| q >= c.qubits) {
            return Err(Error::Parse {
                line,
                msg: format!("qubit {q} out of range (qubits {})", c.qubits),
            });
        }
        c.gates.push(gate);
    }
    if let Some((n, _)) = open_regions.pop() {
        return Err(Error::Parse { line: text.lines().count(), msg: format!("unclosed #region {n}") });
    }
    let mut c = circuit.ok_or(Error::Parse { line: 0, msg: "missing qubits header".into() })?;
    regions.sort_by_key(|(n, r)| (r.start, r.end, n.clone()));
    c.regions = regions;
    c.validate()?;
    Ok(c)
}

/// Translate a circuit to an open ZX-diagram. All post-selected measurements
/// plug bare <0|/<+| effects, so the global scalar carries the post-selection
/// amplitude.
pub fn circuit_to_diagram(c: &Circuit) -> Result<Diagram, Error> {
    c.validate()?;
    let n = c.qubits as usize;
    let mut d = Diagram::new();

    // qubits with an INIT gate start closed; everything else is an open input
    let mut has_init = vec![false; n];
    for g in &c.gates {
        if let Gate::Init0(q) | Gate::InitP(q) = g {
            has_init[*q as usize] = true;
        }
    }

    // frontier vertex and accumulated wire kind per qubit
    #[derive(Clone, Copy)]
    enum Front {
        Open(V, EdgeKind),
        Unborn,
        Dead,
    }
    let mut front: Vec<Front> = Vec::with_capacity(n);
    for q in 0..n {
        if has_init[q] {
            front.push(Front::Unborn);
        } else {
            let v = d.add_input();
            front.push(Front::Open(v, EdgeKind::Plain));
        }
    }

    let region_of = |i: usize| -> Option<&str> {
        c.regions
            .iter()
            .find(|(_, r)| r.contains(&i))
            .map(|(n, _)| n.as_str())
    };

    let attach = |d: &mut Diagram,
                      front: &mut Vec<Front>,
                      q: usize,
                      kind: SpiderKind,
                      phase: Phase,
                      mark: Option<&str>|
     -> Result<V, Error> {
        let v = d.add_spider(kind, phase);
        if let Some(region) = mark {
            d.mark(region, v);
        }
        match front[q] {
            Front::Open(prev, acc) => {
                d.add_edge(prev, v, acc);
            }
            Front::Unborn => {
                return Err(Error::Corrupt(format!("gate before INIT on qubit {q}")));
            }
            Front::Dead => {
                return Err(Error::Corrupt(format!("gate on measured qubit {q}")));
            }
        }
        front[q] = Front::Open(v, EdgeKind::Plain);
        Ok(v)
    };

    for (i, g) in c.gates.iter().enumerate() {
        let mark = region_of(i);
        match *g {
            Gate::H(q) => {
                let q = q as usize;
                if let Front::Open(v, acc) = front[q] {
                    front[q] = Front::Open(v, acc.xor(EdgeKind::Hadamard));
                } else {
                    return Err(Error::Corrupt(format!("H before INIT on qubit {q}")));
                }
            }
            Gate::S(q) => {
                attach(&mut d, &mut front, q as usize, SpiderKind::Z, Phase::S, mark)?;
            }
            Gate::Sdg(q) => {
                attach(&mut d, &mut front, q as usize, SpiderKind::Z, Phase::SDG, mark)?;
            }
            Gate::T(q) => {
                attach(&mut d, &mut front, q as usize, SpiderKind::Z, Phase::T, mark)?;
            }
            Gate::Tdg(q) => {
                attach(&mut d, &mut front, q as usize, SpiderKind::Z, Phase::TDG, mark)?;
            }
            Gate::Z(q) => {
                attach(&mut d, &mut front, q as usize, SpiderKind::Z, Phase::PI, mark)?;
            }
            Gate::X(q) => {
                attach(&mut d, &mut front, q as usize, SpiderKind::X, Phase::PI, mark)?;
            }
            Gate::Cx(a, b) => {
                let cv = attach(&mut d, &mut front, a as usize, SpiderKind::Z, Phase::ZERO, mark)?;
                let tv = attach(&mut d, &mut front, b as usize, SpiderKind::X, Phase::ZERO, mark)?;
                d.add_edge(cv, tv, EdgeKind::Plain);
                d.scalar_mut().mul_sqrt2_pow(1);
            }
            Gate::Cz(a, b) => {
                let cv = attach(&mut d, &mut front, a as usize, SpiderKind::Z, Phase::ZERO, mark)?;
                let tv = attach(&mut d, &mut front, b as usize, SpiderKind::Z, Phase::ZERO, mark)?;
                d.add_edge(cv, tv, EdgeKind::Hadamard);
                d.scalar_mut().mul_sqrt2_pow(1);
            }
            Gate::Init0(q) => {
                let q = q as usize;
                let v = d.add_spider(SpiderKind::X, Phase::ZERO);
                if let Some(region) = mark {
                    d.mark(region, v);
                }
                d.scalar_mut().mul_sqrt2_pow(-1);
                front[q] = Front::Open(v, EdgeKind::Plain);
            }
            Gate::InitP(q) => {
                let q = q as usize;
                let v = d.add_spider(SpiderKind::Z, Phase::ZERO);
                if let Some(region) = mark {
                    d.mark(region, v);
                }
                d.scalar_mut().mul_sqrt2_pow(-1);
                front[q] = Front::Open(v, EdgeKind::Plain);
            }
            Gate::Mzps(q) => {
                attach(&mut d, &mut front, q as usize, SpiderKind::X, Phase::ZERO, mark)?;
                d.scalar_mut().mul_sqrt2_pow(-1);
                front[q as usize] = Front::Dead;
            }
            Gate::Mxps(q) => {
                attach(&mut d, &mut front, q as usize, SpiderKind::Z, Phase::ZERO, mark)?;
                d.scalar_mut().mul_sqrt2_pow(-1);
                front[q as usize] = Front::Dead;
            }
        }
    }

    // open outputs in qubit order
    for q in 0..n {
        if let Front::Open(v, acc) = front[q] {
            let o = d.add_output();
            d.add_edge(v, o, acc);
        }
    }
    d.validate()?;
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_single_t() {
        let c = parse_circuit("qubits 1\nT 0\n").unwrap();
        assert_eq!(c.qubits, 1);
        assert_eq!(c.gates, vec![Gate::T(0)]);
        assert_eq!(c.t_count(), 1);
    }

    #[test]
    fn parse_post_selected_parity_check() {
        let c = parse_circuit("qubits 2\nCX 0 1\nMZPS 1\n").unwrap();
        assert_eq!(c.gates, vec![Gate::Cx(0, 1), Gate::Mzps(1)]);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_circuit("qubits 2\nCX 0\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn out_of_range_qubit() {
        assert!(parse_circuit("qubits 1\nT 3\n").is_err());
    }

    #[test]
    fn gate_on_measured_qubit() {
        assert!(parse_circuit("qubits 1\nINITP 0\nMXPS 0\nT 0\n").is_err());
    }

    #[test]
    fn print_parse_roundtrip() {
        let text = "qubits 3\nINITP 0\nT 0\nCX 0 1\nH 2\nCZ 1 2\nMXPS 0\n";
        let c = parse_circuit(text).unwrap();
        let c2 = parse_circuit(&c.print()).unwrap();
        assert_eq!(c, c2);
    }

    #[test]
    fn regions_roundtrip() {
        let text = "qubits 2\n#region blk\nT 0\nT 1\n#endregion blk\nCX 0 1\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.regions, vec![("blk".to_string(), 0..2)]);
        let c2 = parse_circuit(&c.print()).unwrap();
        assert_eq!(c, c2);
    }

    #[test]
    fn diagram_of_t_state() {
        let c = parse_circuit("qubits 1\nINITP 0\nT 0\n").unwrap();
        let d = circuit_to_diagram(&c).unwrap();
        assert_eq!(d.inputs().len(), 0);
        assert_eq!(d.outputs().len(), 1);
        assert_eq!(d.t_count(), 1);
    }
}
