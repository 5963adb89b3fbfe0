//! JSON and CSV documents.
//!
//! Every JSON document carries `"schema": 1`. Percolation curves are written
//! as CSV with the fixed header [`CURVE_HEADER`].

use std::io;

use aklt_core::domain::DomainGraph;
use aklt_core::graph_rules::{HoneycombCheck, MeasurementPattern, Pauli, SimpleGraph};
use aklt_core::lattice::{Boundary, Lattice, LatticeKind};
use aklt_core::percolation::{DeletionMode, PercolationCurve, Threshold};
use aklt_core::stats::Estimate;
use aklt_core::GraphStats;
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

/// Header of the percolation CSV.
pub const CURVE_HEADER: [&str; 8] = [
    "lattice",
    "L",
    "mode",
    "p_delete",
    "p_span",
    "stderr",
    "n_samples",
    "n_trials",
];

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("unsupported schema version {0}")]
    Schema(u32),
    #[error("invalid document: {0}")]
    Invalid(String),
}

fn check_schema(schema: u32) -> Result<(), FormatError> {
    if schema == SCHEMA {
        Ok(())
    } else {
        Err(FormatError::Schema(schema))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeDoc {
    pub schema: u32,
    pub kind: Option<String>,
    #[serde(rename = "L")]
    pub size: u32,
    pub bc: String,
    pub n_vertices: usize,
    pub edges: Vec<[u32; 2]>,
    pub triangles: Vec<[u32; 3]>,
}

impl LatticeDoc {
    pub fn from_lattice(lattice: &Lattice) -> Self {
        LatticeDoc {
            schema: SCHEMA,
            kind: lattice.kind().map(|k| k.name().to_string()),
            size: lattice.size(),
            bc: lattice.boundary().name().to_string(),
            n_vertices: lattice.n_sites(),
            edges: lattice.edges().iter().map(|&(a, b)| [a, b]).collect(),
            triangles: lattice.triangles().to_vec(),
        }
    }

    /// Rebuilds the lattice: generated kinds are regenerated and compared,
    /// anything else is rebuilt from the edge list.
    pub fn to_lattice(&self) -> Result<Lattice, FormatError> {
        check_schema(self.schema)?;
        let edges: Vec<(u32, u32)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        let lattice = match self.kind.as_deref().map(LatticeKind::from_name) {
            Some(Some(kind)) => {
                let bc = Boundary::from_name(&self.bc)
                    .ok_or_else(|| FormatError::Invalid(format!("unknown bc {:?}", self.bc)))?;
                aklt_core::build_lattice(kind, self.size, bc).map_err(|e| FormatError::Invalid(e.to_string()))?
            }
            Some(None) => return Err(FormatError::Invalid("unknown lattice kind".into())),
            None => Lattice::from_edges(self.n_vertices, &edges, &self.triangles)
                .map_err(|e| FormatError::Invalid(e.to_string()))?,
        };
        if lattice.edges() != edges.as_slice() || lattice.n_sites() != self.n_vertices {
            return Err(FormatError::Invalid(
                "edge list does not match the generated lattice".into(),
            ));
        }
        Ok(lattice)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainGraphDoc {
    pub schema: u32,
    pub n_vertices: usize,
    pub edges: Vec<[u32; 2]>,
    pub sizes: Vec<u32>,
}

impl DomainGraphDoc {
    pub fn from_graph(graph: &DomainGraph) -> Self {
        DomainGraphDoc {
            schema: SCHEMA,
            n_vertices: graph.n_vertices(),
            edges: graph.edges().iter().map(|&(a, b)| [a, b]).collect(),
            sizes: graph.sizes(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub schema: u32,
    pub vertices: Vec<u32>,
    pub edges: Vec<[u32; 2]>,
}

impl GraphDoc {
    pub fn from_graph(graph: &SimpleGraph) -> Self {
        GraphDoc {
            schema: SCHEMA,
            vertices: graph.vertices().collect(),
            edges: graph.edges().iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    pub fn to_graph(&self) -> Result<SimpleGraph, FormatError> {
        check_schema(self.schema)?;
        let mut g = SimpleGraph::new();
        for &v in &self.vertices {
            g.add_vertex(v);
        }
        for e in &self.edges {
            if e[0] == e[1] || !g.contains(e[0]) || !g.contains(e[1]) {
                return Err(FormatError::Invalid(format!("bad edge {e:?}")));
            }
            g.add_edge(e[0], e[1]);
        }
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternDoc {
    pub schema: u32,
    /// `[vertex, "X" | "Y" | "Z"]` in application order.
    pub steps: Vec<(u32, String)>,
}

impl PatternDoc {
    pub fn from_pattern(pattern: &MeasurementPattern) -> Self {
        PatternDoc {
            schema: SCHEMA,
            steps: pattern
                .steps()
                .iter()
                .map(|&(v, p)| (v, p.as_char().to_string()))
                .collect(),
        }
    }

    pub fn to_pattern(&self) -> Result<MeasurementPattern, FormatError> {
        check_schema(self.schema)?;
        let steps = self
            .steps
            .iter()
            .map(|(v, s)| {
                let mut chars = s.chars();
                match (chars.next().and_then(Pauli::from_char), chars.next()) {
                    (Some(p), None) => Ok((*v, p)),
                    _ => Err(FormatError::Invalid(format!("bad basis {s:?}"))),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        MeasurementPattern::new(steps).map_err(|e| FormatError::Invalid(e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateDoc {
    pub mean: f64,
    pub stderr: f64,
}

impl From<Estimate> for EstimateDoc {
    fn from(e: Estimate) -> Self {
        EstimateDoc {
            mean: e.mean,
            stderr: e.stderr,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStatsDoc {
    pub avg_degree: EstimateDoc,
    pub avg_domain_size: EstimateDoc,
    pub largest_domain: EstimateDoc,
    pub vertices_per_site: EstimateDoc,
    pub edges_per_site: EstimateDoc,
    pub multi_edges_per_site: EstimateDoc,
    pub isolated_per_site: EstimateDoc,
    pub n_samples: usize,
}

impl From<&GraphStats> for GraphStatsDoc {
    fn from(s: &GraphStats) -> Self {
        GraphStatsDoc {
            avg_degree: s.avg_degree.into(),
            avg_domain_size: s.avg_domain_size.into(),
            largest_domain: s.largest_domain.into(),
            vertices_per_site: s.vertices_per_site.into(),
            edges_per_site: s.edges_per_site.into(),
            multi_edges_per_site: s.multi_edges_per_site.into(),
            isolated_per_site: s.isolated_per_site.into(),
            n_samples: s.n_samples,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeStatsDoc {
    #[serde(rename = "L")]
    pub size: u32,
    pub n_sites: usize,
    pub acceptance_rate: f64,
    /// Largest number of monochromatic triangles seen in any measurement.
    pub max_monochromatic_triangles: usize,
    pub stats: GraphStatsDoc,
}

/// `mean(L) ≈ a + b/L` over the sizes of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationDoc {
    pub quantity: String,
    pub a: f64,
    pub b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsDoc {
    pub schema: u32,
    pub lattice: String,
    pub bc: String,
    /// The edge count is taken after the modulo-2 reduction.
    pub edge_convention: String,
    pub config: serde_json::Value,
    pub sizes: Vec<SizeStatsDoc>,
    pub extrapolation: Vec<ExtrapolationDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub lattice: String,
    #[serde(rename = "L")]
    pub size: u32,
    pub mode: String,
    pub p_delete: f64,
    pub p_span: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub n_trials: usize,
}

pub fn curve_rows(lattice: &str, curve: &PercolationCurve) -> Vec<CurveRow> {
    (0..curve.p_delete.len())
        .map(|i| CurveRow {
            lattice: lattice.to_string(),
            size: curve.size,
            mode: curve.mode.name().to_string(),
            p_delete: curve.p_delete[i],
            p_span: curve.p_span[i],
            stderr: curve.stderr[i],
            n_samples: curve.n_samples,
            n_trials: curve.n_trials,
        })
        .collect()
}

pub fn write_curves<W: io::Write>(out: W, rows: &[CurveRow]) -> Result<(), FormatError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CURVE_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_curves<R: io::Read>(input: R) -> Result<Vec<CurveRow>, FormatError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CURVE_HEADER {
        return Err(FormatError::Invalid(format!("unexpected header {header:?}")));
    }
    Ok(r.deserialize().collect::<Result<Vec<CurveRow>, _>>()?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingDoc {
    #[serde(rename = "L")]
    pub size: u32,
    pub p_delete: Option<f64>,
    pub error: Option<f64>,
    pub span_at_zero: f64,
    pub steepness: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdDoc {
    pub mode: String,
    pub per_size: Vec<CrossingDoc>,
    /// `p*_delete` at the largest size; absent when some curve has no
    /// crossing.
    pub p_delete: Option<f64>,
    pub p_th: Option<f64>,
    pub error: Option<f64>,
    pub note: Option<String>,
}

impl ThresholdDoc {
    pub fn new(mode: DeletionMode, curves: &[PercolationCurve], threshold: Result<Threshold, String>) -> Self {
        let per_size = curves
            .iter()
            .map(|c| {
                let x = c.crossing().ok();
                CrossingDoc {
                    size: c.size,
                    p_delete: x.map(|t| t.0),
                    error: x.map(|t| t.1),
                    span_at_zero: c.span_at_zero,
                    steepness: c.steepness(),
                }
            })
            .collect();
        match threshold {
            Ok(t) => ThresholdDoc {
                mode: mode.name().to_string(),
                per_size,
                p_delete: Some(t.p_delete),
                p_th: Some(t.p_th()),
                error: Some(t.error),
                note: None,
            },
            Err(e) => ThresholdDoc {
                mode: mode.name().to_string(),
                per_size,
                p_delete: None,
                p_th: None,
                error: None,
                note: Some(e),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PercolationDoc {
    pub schema: u32,
    pub lattice: String,
    pub span_rule: String,
    pub config: serde_json::Value,
    pub thresholds: Vec<ThresholdDoc>,
    /// Fraction of sampled graphs that span with nothing deleted, per size.
    pub spanning_fraction: Vec<(u32, f64)>,
    /// Triangle-edge deletion measured on star samples, per size.
    pub triangle_edge_deletion: Vec<(u32, f64)>,
    pub curves: Vec<CurveRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleDoc {
    pub schema: u32,
    pub graph: String,
    pub config: serde_json::Value,
    pub n_sites: usize,
    pub n_states: usize,
    pub n_samples: u64,
    pub tv_distance: f64,
    /// TV distance expected from sampling noise alone for independent
    /// samples.
    pub tv_noise_floor: f64,
    pub local_global_checked: u64,
    pub local_global_mismatches: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoneycombCheckDoc {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub cubic: bool,
    pub connected: bool,
    pub bipartite: bool,
    pub girth: Option<u32>,
    pub hexagons: usize,
    pub shape: Option<(u32, u32)>,
}

impl From<&HoneycombCheck> for HoneycombCheckDoc {
    fn from(c: &HoneycombCheck) -> Self {
        HoneycombCheckDoc {
            n_vertices: c.n_vertices,
            n_edges: c.n_edges,
            cubic: c.cubic,
            connected: c.connected,
            bipartite: c.bipartite,
            girth: c.girth,
            hexagons: c.hexagons,
            shape: c.shape,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReduceDoc {
    pub schema: u32,
    pub lattice: String,
    #[serde(rename = "L")]
    pub size: u32,
    pub config: serde_json::Value,
    pub isomorphic_to_honeycomb: bool,
    pub n_measurements: usize,
    pub lattice_sites: usize,
    pub measured_vertices: usize,
    pub measured_edges: usize,
    pub check: HoneycombCheckDoc,
}

#[cfg(test)]
mod tests {
    use super::*;
    use aklt_core::domain::{build_domain_graph, identify_domains};
    use aklt_core::sampler::{PovmConfig, PovmLabel};

    #[test]
    fn lattice_round_trip() {
        for kind in LatticeKind::ALL {
            let lat = aklt_core::build_lattice(kind, 12, Boundary::Cylinder).unwrap();
            let doc = LatticeDoc::from_lattice(&lat);
            let text = serde_json::to_string(&doc).unwrap();
            let back: LatticeDoc = serde_json::from_str(&text).unwrap();
            assert_eq!(back, doc);
            assert_eq!(back.to_lattice().unwrap().edges(), lat.edges());
        }
    }

    #[test]
    fn tampered_lattice_is_rejected() {
        let lat = aklt_core::build_lattice(LatticeKind::Honeycomb, 4, Boundary::Torus).unwrap();
        let mut doc = LatticeDoc::from_lattice(&lat);
        doc.edges.pop();
        assert!(doc.to_lattice().is_err());
        doc.schema = 2;
        assert!(matches!(doc.to_lattice(), Err(FormatError::Schema(2))));
    }

    #[test]
    fn domain_graph_document() {
        let lat = Lattice::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], &[]).unwrap();
        let cfg = PovmConfig::new(vec![PovmLabel::X, PovmLabel::X, PovmLabel::Y, PovmLabel::Z]);
        let g = build_domain_graph(&lat, &identify_domains(&lat, &cfg));
        let doc = DomainGraphDoc::from_graph(&g);
        let text = serde_json::to_string(&doc).unwrap();
        assert_eq!(
            text,
            r#"{"schema":1,"n_vertices":3,"edges":[[0,1],[0,2],[1,2]],"sizes":[2,1,1]}"#
        );
    }

    #[test]
    fn pattern_and_graph_round_trip() {
        let p = MeasurementPattern::new(vec![(3, Pauli::Z), (1, Pauli::Y), (7, Pauli::X)]).unwrap();
        let doc = PatternDoc::from_pattern(&p);
        let back: PatternDoc = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(back.to_pattern().unwrap(), p);
        let bad = PatternDoc {
            schema: 1,
            steps: vec![(0, "W".into())],
        };
        assert!(bad.to_pattern().is_err());

        let g = SimpleGraph::from_edges(5, &[(0, 1), (1, 4), (2, 3)]);
        let doc = GraphDoc::from_graph(&g);
        let back: GraphDoc = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
        assert_eq!(back.to_graph().unwrap(), g);
    }

    #[test]
    fn curve_csv_round_trip() {
        let rows = vec![CurveRow {
            lattice: "cross".into(),
            size: 48,
            mode: "site".into(),
            p_delete: 0.25,
            p_span: 0.5,
            stderr: 0.01,
            n_samples: 10,
            n_trials: 10,
        }];
        let mut buf = Vec::new();
        write_curves(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("lattice,L,mode,p_delete,p_span,stderr,n_samples,n_trials\n"));
        assert_eq!(read_curves(buf.as_slice()).unwrap(), rows);
    }
}
