use crate::error::Error;
use crate::graph::{Diagram, EdgeKind, SpiderKind};
use crate::phase::Phase;
use crate::scalar::ExactScalar;
use serde::{Deserialize, Serialize};

pub const DIAGRAM_FORMAT: &str = "zxcut.diagram";
pub const DIAGRAM_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct VertexDto {
    id: u32,
    kind: String,
    phase: u8,
}

#[derive(Serialize, Deserialize)]
struct EdgeDto {
    src: u32,
    dst: u32,
    kind: String,
}

#[derive(Serialize, Deserialize)]
struct ScalarDto {
    k: i32,
    c: [i64; 4],
}

#[derive(Serialize, Deserialize)]
struct DiagramDto {
    format: String,
    version: u32,
    vertices: Vec<VertexDto>,
    edges: Vec<EdgeDto>,
    inputs: Vec<u32>,
    outputs: Vec<u32>,
    scalar: ScalarDto,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    marks: Vec<(String, Vec<u32>)>,
}

pub fn diagram_to_json(d: &Diagram) -> String {
    let mut vertices = Vec::new();
    for v in d.vertices() {
        let s = d.spider(v);
        vertices.push(VertexDto {
            id: v,
            kind: if s.boundary {
                "B".into()
            } else {
                match s.kind {
                    SpiderKind::Z => "Z".into(),
                    SpiderKind::X => "X".into(),
                }
            },
            phase: s.phase.numerator(),
        });
    }
    let mut edges = Vec::new();
    for (u, v, kind, mult) in d.edges() {
        for _ in 0..mult {
            edges.push(EdgeDto {
                src: u,
                dst: v,
                kind: match kind {
                    EdgeKind::Plain => "plain".into(),
                    EdgeKind::Hadamard => "h".into(),
                },
            });
        }
    }
    let dto = DiagramDto {
        format: DIAGRAM_FORMAT.into(),
        version: DIAGRAM_VERSION,
        vertices,
        edges,
        inputs: d.inputs().to_vec(),
        outputs: d.outputs().to_vec(),
        scalar: ScalarDto { k: d.scalar().half_power(), c: d.scalar().coeffs() },
        marks: d
            .mark_regions()
            .map(|(name, set)| (name.to_string(), set.iter().copied().collect()))
            .collect(),
    };
    serde_json::to_string_pretty(&dto).expect("diagram serialisation cannot fail")
}

pub fn diagram_from_json(text: &str) -> Result<Diagram, Error> {
    let dto: DiagramDto = serde_json::from_str(text)?;
    if dto.format != DIAGRAM_FORMAT {
        return Err(Error::Corrupt(format!("unknown diagram format '{}'", dto.format)));
    }
    if dto.version != DIAGRAM_VERSION {
        return Err(Error::Corrupt(format!("unsupported diagram version {}", dto.version)));
    }
    let mut d = Diagram::new();
    let mut map = std::collections::BTreeMap::new();
    let mut sorted = dto.vertices;
    sorted.sort_by_key(|v| v.id);
    for v in &sorted {
        if map.contains_key(&v.id) {
            return Err(Error::Corrupt(format!("duplicate vertex id {}", v.id)));
        }
        let nv = match v.kind.as_str() {
            "Z" => d.add_spider(SpiderKind::Z, Phase::new(v.phase as i64)),
            "X" => d.add_spider(SpiderKind::X, Phase::new(v.phase as i64)),
            "B" => d.add_boundary_vertex(),
            other => return Err(Error::Corrupt(format!("unknown vertex kind '{other}'"))),
        };
        map.insert(v.id, nv);
    }
    for e in &dto.edges {
        let src = *map
            .get(&e.src)
            .ok_or_else(|| Error::Corrupt(format!("edge from unknown vertex {}", e.src)))?;
        let dst = *map
            .get(&e.dst)
            .ok_or_else(|| Error::Corrupt(format!("edge to unknown vertex {}", e.dst)))?;
        let kind = match e.kind.as_str() {
            "plain" => EdgeKind::Plain,
            "h" => EdgeKind::Hadamard,
            other => return Err(Error::Corrupt(format!("unknown edge kind '{other}'"))),
        };
        d.add_edge(src, dst, kind);
    }
    *d.scalar_mut() = ExactScalar::new(dto.scalar.k, dto.scalar.c);
    let resolve = |ids: &[u32]| -> Result<Vec<u32>, Error> {
        ids.iter()
            .map(|i| {
                map.get(i)
                    .copied()
                    .ok_or_else(|| Error::Corrupt(format!("boundary id {i} unknown")))
            })
            .collect()
    };
    d.set_inputs(resolve(&dto.inputs)?);
    d.set_outputs(resolve(&dto.outputs)?);
    for (region, ids) in &dto.marks {
        for m in ids {
            if let Some(&v) = map.get(m) {
                d.mark(region, v);
            }
        }
    }
    d.validate()?;
    Ok(d)
}
