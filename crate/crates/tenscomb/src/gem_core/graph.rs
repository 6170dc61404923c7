use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::GemError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    #[serde(rename = "w")]
    White,
    #[serde(rename = "b")]
    Black,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::White => Parity::Black,
            Parity::Black => Parity::White,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::White => "w",
            Parity::Black => "b",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: usize,
    pub parity: Parity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    #[serde(rename = "w")]
    pub white: usize,
    #[serde(rename = "b")]
    pub black: usize,
    #[serde(rename = "c")]
    pub color: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfEdge {
    #[serde(rename = "v")]
    pub vertex: usize,
    #[serde(rename = "c")]
    pub color: usize,
}

/// A bipartite, properly edge-colored multigraph with colors `0..=d`.
///
/// Vertices are stored in increasing id order; `adj[v * (d + 1) + c]` is the
/// position of the color-`c` neighbour of the vertex at position `v`, or
/// `None` when that slot holds a half-edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    d: usize,
    ids: Vec<usize>,
    parity: Vec<Parity>,
    adj: Vec<Option<usize>>,
}

impl ColoredGraph {
    /// Builds and validates a graph. Slots listed in `half_edges` stay open;
    /// every other (vertex, color) slot must carry exactly one edge.
    pub fn build(
        d: usize,
        vertices: &[Vertex],
        edges: &[Edge],
        half_edges: &[HalfEdge],
    ) -> Result<Self, GemError> {
        if d == 0 {
            return Err(GemError::InvalidRank);
        }
        let mut sorted: Vec<Vertex> = vertices.to_vec();
        sorted.sort_by_key(|v| v.id);
        for w in sorted.windows(2) {
            if w[0].id == w[1].id {
                return Err(GemError::DuplicateVertex(w[0].id));
            }
        }
        let pos: BTreeMap<usize, usize> =
            sorted.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
        let ids: Vec<usize> = sorted.iter().map(|v| v.id).collect();
        let parity: Vec<Parity> = sorted.iter().map(|v| v.parity).collect();
        let k = d + 1;
        let mut adj = vec![None; ids.len() * k];
        let mut open = vec![false; ids.len() * k];

        for e in edges {
            if e.color > d {
                return Err(GemError::ColorOutOfRange { color: e.color, d });
            }
            let w = *pos.get(&e.white).ok_or(GemError::DanglingReference(e.white))?;
            let b = *pos.get(&e.black).ok_or(GemError::DanglingReference(e.black))?;
            if parity[w] != Parity::White || parity[b] != Parity::Black {
                return Err(GemError::NotBipartite { white: e.white, black: e.black, color: e.color });
            }
            for (x, y) in [(w, b), (b, w)] {
                if adj[x * k + e.color].is_some() {
                    return Err(GemError::ColorClash { vertex: ids[x], color: e.color });
                }
                adj[x * k + e.color] = Some(y);
            }
        }
        for h in half_edges {
            if h.color > d {
                return Err(GemError::ColorOutOfRange { color: h.color, d });
            }
            let v = *pos.get(&h.vertex).ok_or(GemError::DanglingReference(h.vertex))?;
            if adj[v * k + h.color].is_some() || open[v * k + h.color] {
                return Err(GemError::ColorClash { vertex: h.vertex, color: h.color });
            }
            open[v * k + h.color] = true;
        }
        for v in 0..ids.len() {
            for c in 0..k {
                if adj[v * k + c].is_none() && !open[v * k + c] {
                    return Err(GemError::NotRegular { vertex: ids[v], color: c });
                }
            }
        }
        let whites = parity.iter().filter(|p| **p == Parity::White).count();
        if half_edges.is_empty() && 2 * whites != ids.len() {
            return Err(GemError::UnbalancedParity { white: whites, black: ids.len() - whites });
        }
        Ok(ColoredGraph { d, ids, parity, adj })
    }

    /// Closed graph from `(white, black, color)` triples; vertices are the
    /// endpoints that occur.
    pub fn from_triples(d: usize, triples: &[(usize, usize, usize)]) -> Result<Self, GemError> {
        let mut verts: BTreeMap<usize, Parity> = BTreeMap::new();
        for &(w, b, _) in triples {
            if verts.insert(w, Parity::White) == Some(Parity::Black)
                || verts.insert(b, Parity::Black) == Some(Parity::White)
            {
                return Err(GemError::NotBipartite { white: w, black: b, color: 0 });
            }
        }
        let vertices: Vec<Vertex> = verts.into_iter().map(|(id, parity)| Vertex { id, parity }).collect();
        let edges: Vec<Edge> = triples.iter().map(|&(w, b, c)| Edge { white: w, black: b, color: c }).collect();
        Self::build(d, &vertices, &edges, &[])
    }

    /// A tensor invariant: colors `1..=d` are edges, color 0 is an open
    /// half-edge at every vertex.
    pub fn invariant(d: usize, vertices: &[Vertex], edges: &[Edge]) -> Result<Self, GemError> {
        if let Some(e) = edges.iter().find(|e| e.color == 0) {
            return Err(GemError::ColorClash { vertex: e.white, color: 0 });
        }
        let halves: Vec<HalfEdge> = vertices.iter().map(|v| HalfEdge { vertex: v.id, color: 0 }).collect();
        Self::build(d, vertices, edges, &halves)
    }

    pub(crate) fn from_parts(d: usize, ids: Vec<usize>, parity: Vec<Parity>, adj: Vec<Option<usize>>) -> Self {
        debug_assert_eq!(adj.len(), ids.len() * (d + 1));
        ColoredGraph { d, ids, parity, adj }
    }

    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn num_colors(&self) -> usize {
        self.d + 1
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn id(&self, v: usize) -> usize {
        self.ids[v]
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn parity(&self, v: usize) -> Parity {
        self.parity[v]
    }

    pub fn position(&self, id: usize) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    /// Color-`c` neighbour of the vertex at position `v`.
    #[inline]
    pub fn neighbor(&self, v: usize, c: usize) -> Option<usize> {
        self.adj[v * (self.d + 1) + c]
    }

    #[inline]
    pub(crate) fn nb(&self, v: usize, c: usize) -> usize {
        self.adj[v * (self.d + 1) + c].expect("closed graph")
    }

    pub(crate) fn adjacency(&self) -> &[Option<usize>] {
        &self.adj
    }

    pub fn is_closed(&self) -> bool {
        self.adj.iter().all(Option::is_some)
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        self.ids.iter().zip(&self.parity).map(|(&id, &parity)| Vertex { id, parity }).collect()
    }

    /// Edges sorted by white id, then color.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for v in 0..self.ids.len() {
            if self.parity[v] != Parity::White {
                continue;
            }
            for c in 0..=self.d {
                if let Some(b) = self.neighbor(v, c) {
                    out.push(Edge { white: self.ids[v], black: self.ids[b], color: c });
                }
            }
        }
        out
    }

    pub fn half_edges(&self) -> Vec<HalfEdge> {
        let mut out = Vec::new();
        for v in 0..self.ids.len() {
            for c in 0..=self.d {
                if self.neighbor(v, c).is_none() {
                    out.push(HalfEdge { vertex: self.ids[v], color: c });
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|a| a.is_some()).count() / 2
    }

    /// Connected components (vertex positions) of the subgraph on `colors`,
    /// ordered by lowest member.
    pub fn components_in(&self, colors: &[usize]) -> Vec<Vec<usize>> {
        let n = self.ids.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![s];
            let mut comp = Vec::new();
            while let Some(x) = stack.pop() {
                comp.push(x);
                for &c in colors {
                    if let Some(y) = self.neighbor(x, c) {
                        if !seen[y] {
                            seen[y] = true;
                            stack.push(y);
                        }
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn all_colors(&self) -> Vec<usize> {
        (0..=self.d).collect()
    }

    pub fn component_count(&self) -> usize {
        self.components_in(&self.all_colors()).len()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// Counts the bicolored cycles of colors `i` and `j`.
    pub fn face_count_pair(&self, i: usize, j: usize) -> usize {
        let n = self.ids.len();
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut x = s;
            loop {
                seen[x] = true;
                let y = self.nb(x, i);
                seen[y] = true;
                x = self.nb(y, j);
                if x == s {
                    break;
                }
            }
        }
        count
    }

    /// Bicolored cycles of colors `i`, `j` as vertex position sequences, each
    /// starting at its lowest position and leaving along color `i`.
    pub fn faces_pair(&self, i: usize, j: usize) -> Vec<Vec<usize>> {
        let n = self.ids.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = s;
            loop {
                seen[x] = true;
                cyc.push(x);
                let y = self.nb(x, i);
                seen[y] = true;
                cyc.push(y);
                x = self.nb(y, j);
                if x == s {
                    break;
                }
            }
            out.push(cyc);
        }
        out
    }

    /// Total number of bicolored faces over all color pairs.
    pub fn face_count(&self) -> usize {
        let mut f = 0;
        for i in 0..=self.d {
            for j in i + 1..=self.d {
                f += self.face_count_pair(i, j);
            }
        }
        f
    }

    /// Restriction to the vertex positions `verts` and colors `colors`,
    /// recolored `colors[k] -> k`. Ids are kept.
    pub fn restrict(&self, verts: &[usize], colors: &[usize]) -> ColoredGraph {
        let k = colors.len();
        let local: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj = vec![None; verts.len() * k];
        for (i, &v) in verts.iter().enumerate() {
            for (nc, &c) in colors.iter().enumerate() {
                adj[i * k + nc] = self.neighbor(v, c).and_then(|y| local.get(&y).copied());
            }
        }
        ColoredGraph {
            d: k - 1,
            ids: verts.iter().map(|&v| self.ids[v]).collect(),
            parity: verts.iter().map(|&v| self.parity[v]).collect(),
            adj,
        }
    }

    /// Disjoint union; the ids of `other` are shifted past the ids of `self`.
    pub fn disjoint_union(&self, other: &ColoredGraph) -> Result<ColoredGraph, GemError> {
        if self.d != other.d {
            return Err(GemError::WrongRank { expected: self.d, got: other.d });
        }
        let shift = self.ids.iter().max().map_or(0, |m| m + 1);
        let off = self.ids.len();
        let mut ids = self.ids.clone();
        ids.extend(other.ids.iter().map(|i| i + shift));
        let mut parity = self.parity.clone();
        parity.extend_from_slice(&other.parity);
        let mut adj = self.adj.clone();
        adj.extend(other.adj.iter().map(|a| a.map(|y| y + off)));
        Ok(ColoredGraph { d: self.d, ids, parity, adj })
    }

    /// Same graph with ids replaced by `0..n` in position order.
    pub fn relabeled(&self) -> ColoredGraph {
        ColoredGraph { d: self.d, ids: (0..self.ids.len()).collect(), parity: self.parity.clone(), adj: self.adj.clone() }
    }

    pub fn require_closed(&self) -> Result<(), GemError> {
        if self.is_closed() {
            Ok(())
        } else {
            Err(GemError::NotClosed)
        }
    }
}

/// The 2-vertex graph with one edge of every color.
pub fn elementary_melon(d: usize) -> ColoredGraph {
    let triples: Vec<(usize, usize, usize)> = (0..=d).map(|c| (0, 1, c)).collect();
    ColoredGraph::from_triples(d, &triples).expect("melon is valid")
}
