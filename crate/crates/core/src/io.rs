//! JSON documents read and written by the command line front-end.
//!
//! Numbers always travel as strings (`"3"`, `"1/2"`, `"0.25"`) so that
//! exact values survive a round trip.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::extgraph::ExtGraph;
use crate::graphkit::{graph_metric_as, DirectedSymGraph, EdgeId, SimpleCycle};
use crate::metric::{validate_metric, FiniteMetricSpace, Molecule};
use crate::scalar::Scalar;
use crate::whitney::{SigmaPair, SignedEdgeBijection};

/// A space or graph document, told apart by its `"kind"` field. Extra
/// fields (such as the `"recipe"` block of constructed spaces) are ignored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InputDoc {
    Metric { points: Vec<String>, d: Vec<Vec<String>> },
    Graph { vertices: Vec<String>, edges: Vec<[String; 2]> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeDoc {
    pub coeffs: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaDoc {
    pub sigma: Vec<SigmaPair>,
}

/// Parses JSON text, keeping serde's line and column in the message.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed JSON: {e}")))
}

/// Reads and parses a JSON file; the path is part of any error message.
pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: malformed JSON: {e}", path.display())))
}

impl InputDoc {
    pub fn is_graph(&self) -> bool {
        matches!(self, InputDoc::Graph { .. })
    }

    /// The graph of a graph document; `None` for metric documents.
    pub fn graph(&self) -> Result<Option<DirectedSymGraph>> {
        match self {
            InputDoc::Graph { vertices, edges } => {
                let edges: Vec<(String, String)> = edges.iter().map(|[a, b]| (a.clone(), b.clone())).collect();
                Ok(Some(DirectedSymGraph::from_labeled(vertices, &edges)?))
            }
            InputDoc::Metric { .. } => Ok(None),
        }
    }

    /// The metric space described by the document; a graph becomes its
    /// shortest-path metric.
    pub fn metric<S: Scalar>(&self) -> Result<FiniteMetricSpace<S>> {
        match self {
            InputDoc::Metric { points, d } => {
                let raw = d
                    .iter()
                    .map(|row| row.iter().map(|s| S::parse(s).map_err(Error::from)).collect::<Result<Vec<S>>>())
                    .collect::<Result<Vec<_>>>()?;
                validate_metric(raw, points.clone())
            }
            InputDoc::Graph { .. } => graph_metric_as(&self.graph()?.expect("graph document")),
        }
    }

    pub fn from_metric<S: Scalar>(m: &FiniteMetricSpace<S>) -> Self {
        InputDoc::Metric {
            points: m.labels().to_vec(),
            d: m.matrix().iter().map(|row| row.iter().map(Scalar::render).collect()).collect(),
        }
    }

    pub fn from_graph(g: &DirectedSymGraph) -> Self {
        InputDoc::Graph {
            vertices: g.labels().to_vec(),
            edges: g.edges().iter().map(|&(a, b)| [g.label(a).to_string(), g.label(b).to_string()]).collect(),
        }
    }
}

impl MoleculeDoc {
    pub fn molecule<S: Scalar>(&self, space: &FiniteMetricSpace<S>) -> Result<Molecule<S>> {
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for (label, c) in &self.coeffs {
            terms.push((label.as_str(), S::parse(c)?));
        }
        Molecule::from_labels(space, terms)
    }

    pub fn from_molecule<S: Scalar>(space: &FiniteMetricSpace<S>, x: &Molecule<S>) -> Self {
        MoleculeDoc { coeffs: x.to_labels(space) }
    }
}

impl SigmaDoc {
    pub fn from_sigma(sigma: &SignedEdgeBijection, g1: &DirectedSymGraph, g2: &DirectedSymGraph) -> Self {
        SigmaDoc { sigma: sigma.to_label_pairs(g1, g2) }
    }

    pub fn sigma(&self, g1: &DirectedSymGraph, g2: &DirectedSymGraph) -> Result<SignedEdgeBijection> {
        SignedEdgeBijection::from_label_pairs(g1, g2, &self.sigma)
    }
}

/// A directed edge as `["a","b"]`.
pub fn edge_json(g: &DirectedSymGraph, e: EdgeId) -> Value {
    let (a, b) = g.edge_labels(e);
    json!([a, b])
}

/// A cycle as its sequence of directed edges.
pub fn cycle_json(g: &DirectedSymGraph, c: &SimpleCycle) -> Value {
    Value::Array(c.edges().iter().map(|&e| edge_json(g, e)).collect())
}

pub fn labels_json(g: &DirectedSymGraph, vs: &[usize]) -> Value {
    Value::Array(vs.iter().map(|&v| json!(g.label(v))).collect())
}

/// Undirected edges with their weights, in edge order.
pub fn ext_graph_json<S: Scalar>(ext: &ExtGraph<S>) -> Value {
    let g = ext.graph();
    let vertices: Vec<&str> = ext.vertices().iter().map(|&v| g.label(v)).collect();
    let edges: Vec<Value> = (0..g.num_edges())
        .map(|k| {
            let e = EdgeId::new(k, false);
            let (a, b) = g.edge_labels(e);
            json!({ "from": a, "to": b, "weight": ext.weight(e).render() })
        })
        .collect();
    json!({ "vertices": vertices, "edges": edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphkit::families;
    use crate::scalar::{rat, Rational};

    #[test]
    fn metric_document_round_trips() {
        let text = r#"{"kind":"metric","points":["a","b","c"],"d":[["0","1","3/2"],["1","0","1"],["3/2","1","0"]]}"#;
        let doc: InputDoc = parse_json(text).unwrap();
        let m: FiniteMetricSpace<Rational> = doc.metric().unwrap();
        assert_eq!(*m.dist(0, 2), rat(3, 2));
        assert_eq!(InputDoc::from_metric(&m), doc);
    }

    #[test]
    fn graph_document_gives_path_metric() {
        let doc = InputDoc::from_graph(&families::path(2));
        let text = serde_json::to_string(&doc).unwrap();
        let back: InputDoc = parse_json(&text).unwrap();
        let m: FiniteMetricSpace<Rational> = back.metric().unwrap();
        assert_eq!(*m.dist(0, 2), rat(2, 1));
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_json::<InputDoc>("{\"kind\": \"metric\",\n  \"points\": [1").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(parse_json::<InputDoc>(r#"{"kind":"tree"}"#).is_err());
    }

    #[test]
    fn molecule_and_sigma_documents() {
        let g = families::cycle(3);
        let m: FiniteMetricSpace<Rational> = graph_metric_as(&g).unwrap();
        let doc: MoleculeDoc = parse_json(r#"{"coeffs":{"0":"1","1":"-1/2","2":"-1/2"}}"#).unwrap();
        let x = doc.molecule(&m).unwrap();
        assert_eq!(MoleculeDoc::from_molecule(&m, &x), doc);
        let bad: MoleculeDoc = parse_json(r#"{"coeffs":{"0":"1"}}"#).unwrap();
        assert!(bad.molecule(&m).is_err());

        let sigma = SignedEdgeBijection::negation(g.num_edges());
        let sd = SigmaDoc::from_sigma(&sigma, &g, &g);
        assert_eq!(sd.sigma(&g, &g).unwrap(), sigma);
    }
}
