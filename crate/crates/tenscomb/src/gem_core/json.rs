use serde::{Deserialize, Serialize};

use super::{ColoredGraph, Edge, GemError, HalfEdge, Vertex};

/// Wire form of a colored graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub d: usize,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub half_edges: Vec<HalfEdge>,
}

impl GraphJson {
    pub fn from_graph(g: &ColoredGraph) -> Self {
        GraphJson { d: g.rank(), vertices: g.vertices(), edges: g.edges(), half_edges: g.half_edges() }
    }

    pub fn into_graph(self) -> Result<ColoredGraph, GemError> {
        ColoredGraph::build(self.d, &self.vertices, &self.edges, &self.half_edges)
    }

    /// Reads the graph as a tensor invariant: slots of color 0 without an
    /// edge are treated as open.
    pub fn into_invariant(self) -> Result<ColoredGraph, GemError> {
        if self.half_edges.is_empty() {
            ColoredGraph::invariant(self.d, &self.vertices, &self.edges)
        } else {
            self.into_graph()
        }
    }
}

pub fn parse_graph(text: &str) -> Result<GraphJson, serde_json::Error> {
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gem_core::elementary_melon;

    #[test]
    fn round_trip() {
        let g = elementary_melon(3);
        let text = serde_json::to_string(&GraphJson::from_graph(&g)).unwrap();
        assert!(text.starts_with(r#"{"d":3,"vertices":[{"id":0,"parity":"w"},{"id":1,"parity":"b"}],"edges":[{"w":0,"b":1,"c":0}"#));
        let back = parse_graph(&text).unwrap().into_graph().unwrap();
        assert_eq!(back, g);
    }
}
