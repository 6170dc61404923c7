//! Multi-orientable stranded graphs: strand typing, jackets and degree.
//!
//! Edge `k` has ends `2k` and `2k + 1`. The end at position `p` of a vertex
//! with sign `s` carries sign `s` for even `p` and `-s` for odd `p`. Every end
//! has three ports: `L` and `R` for the corners on either side and `C` for the
//! inner strand, which joins positions 0-2 and 1-3. A `-` end has `L = a`,
//! `R = b`; a `+` end has `L = b`, `R = a`. Edges glue ports of equal type.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoError {
    #[error("edge {edge} joins ends of signs {0} and {1} with twist {twist}", .signs.0, .signs.1)]
    SignClash { edge: usize, signs: (char, char), twist: bool },
    #[error("vertex {vertex} has {degree} edge ends, expected 4")]
    NotFourRegular { vertex: usize, degree: usize },
    #[error("edge end {0} is missing or repeated")]
    BadEnd(usize),
    #[error("{rot} rotations for {vertices} vertices")]
    ShapeMismatch { rot: usize, vertices: usize },
    #[error("independent face counts disagree: {0}")]
    MismatchedRoutes(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Strand {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c")]
    C,
}

impl Strand {
    pub const ALL: [Strand; 3] = [Strand::A, Strand::B, Strand::C];

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoVertex {
    pub id: usize,
    pub sign: Sign,
}

/// JSON form: `{"vertices": [...], "rot": [[end ids] per vertex], "twist": [bool per edge]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoGraphJson {
    pub vertices: Vec<MoVertex>,
    pub rot: Vec<Vec<usize>>,
    pub twist: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoGraph {
    vertices: Vec<MoVertex>,
    rot: Vec<[usize; 4]>,
    twist: Vec<bool>,
    /// end -> (vertex position, slot)
    place: Vec<(usize, usize)>,
}

const SIDE_L: usize = 0;
const SIDE_R: usize = 1;
const SIDE_C: usize = 2;

impl MoGraph {
    pub fn build(vertices: Vec<MoVertex>, rot: Vec<Vec<usize>>, twist: Vec<bool>) -> Result<Self, MoError> {
        if rot.len() != vertices.len() {
            return Err(MoError::ShapeMismatch { rot: rot.len(), vertices: vertices.len() });
        }
        let ends = 2 * twist.len();
        let mut place = vec![(usize::MAX, 0); ends];
        let mut fixed = Vec::with_capacity(rot.len());
        for (v, r) in rot.iter().enumerate() {
            if r.len() != 4 {
                return Err(MoError::NotFourRegular { vertex: vertices[v].id, degree: r.len() });
            }
            for (p, &h) in r.iter().enumerate() {
                if h >= ends || place[h].0 != usize::MAX {
                    return Err(MoError::BadEnd(h));
                }
                place[h] = (v, p);
            }
            fixed.push([r[0], r[1], r[2], r[3]]);
        }
        if let Some(h) = place.iter().position(|p| p.0 == usize::MAX) {
            return Err(MoError::BadEnd(h));
        }
        let g = MoGraph { vertices, rot: fixed, twist, place };
        for e in 0..g.twist.len() {
            let (s0, s1) = (g.end_sign(2 * e), g.end_sign(2 * e + 1));
            let ok = if g.twist[e] { s0 == s1 } else { s0 != s1 };
            if !ok {
                return Err(MoError::SignClash { edge: e, signs: (s0.symbol(), s1.symbol()), twist: g.twist[e] });
            }
        }
        Ok(g)
    }

    pub fn from_json(j: MoGraphJson) -> Result<Self, MoError> {
        Self::build(j.vertices, j.rot, j.twist)
    }

    pub fn to_json(&self) -> MoGraphJson {
        MoGraphJson {
            vertices: self.vertices.clone(),
            rot: self.rot.iter().map(|r| r.to_vec()).collect(),
            twist: self.twist.clone(),
        }
    }

    /// All-plus graph from edge ids per vertex; edge `k` is listed twice and
    /// its first occurrence becomes end `2k`.
    pub fn from_edge_rotations(rot: &[[usize; 4]]) -> Result<Self, MoError> {
        let edges = rot.iter().flatten().max().map_or(0, |m| m + 1);
        let mut seen = vec![0usize; edges];
        let rot_ends: Vec<Vec<usize>> = rot
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&e| {
                        let h = 2 * e + seen[e].min(1);
                        seen[e] += 1;
                        h
                    })
                    .collect()
            })
            .collect();
        let vertices = (0..rot.len()).map(|id| MoVertex { id, sign: Sign::Plus }).collect();
        Self::build(vertices, rot_ends, vec![false; edges])
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.twist.len()
    }

    fn mate(&self, h: usize) -> usize {
        h ^ 1
    }

    fn end_sign(&self, h: usize) -> Sign {
        let (v, p) = self.place[h];
        let s = self.vertices[v].sign;
        if p % 2 == 0 {
            s
        } else {
            s.flip()
        }
    }

    fn port_type(&self, port: usize) -> Strand {
        let (h, side) = (port / 3, port % 3);
        match (side, self.end_sign(h)) {
            (SIDE_C, _) => Strand::C,
            (SIDE_L, Sign::Minus) | (SIDE_R, Sign::Plus) => Strand::A,
            _ => Strand::B,
        }
    }

    fn vertex_links(&self) -> Vec<usize> {
        let mut link = vec![usize::MAX; 6 * self.twist.len()];
        for r in &self.rot {
            for q in 0..4 {
                let (h1, h2) = (r[q], r[(q + 1) % 4]);
                let (x, y) = (3 * h1 + SIDE_R, 3 * h2 + SIDE_L);
                debug_assert_eq!(self.port_type(x), self.port_type(y));
                link[x] = y;
                link[y] = x;
            }
            for (p, q) in [(0, 2), (1, 3)] {
                let (x, y) = (3 * r[p] + SIDE_C, 3 * r[q] + SIDE_C);
                link[x] = y;
                link[y] = x;
            }
        }
        link
    }

    fn edge_link(&self, port: usize) -> usize {
        let t = self.port_type(port);
        let m = self.mate(port / 3);
        (0..3).map(|s| 3 * m + s).find(|&p| self.port_type(p) == t).expect("each end has one port per type")
    }

    /// Faces as cycles of ports, grouped by strand type.
    fn faces(&self) -> Vec<(Strand, Vec<usize>)> {
        let vl = self.vertex_links();
        let n = vl.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for p in 0..n {
            if seen[p] {
                continue;
            }
            let t = self.port_type(p);
            let mut cyc = Vec::new();
            let mut x = p;
            loop {
                seen[x] = true;
                let y = vl[x];
                seen[y] = true;
                cyc.push(x);
                cyc.push(y);
                x = self.edge_link(y);
                debug_assert_eq!(self.port_type(x), t);
                if x == p {
                    break;
                }
            }
            out.push((t, cyc));
        }
        out
    }

    pub fn face_counts(&self) -> [usize; 3] {
        let mut f = [0; 3];
        for (t, _) in self.faces() {
            f[t.index()] += 1;
        }
        f
    }

    pub fn components(&self) -> usize {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in 0..self.twist.len() {
            let (a, b) = (find(&mut parent, self.place[2 * e].0), find(&mut parent, self.place[2 * e + 1].0));
            parent[a] = b;
        }
        (0..n).filter(|&x| find(&mut parent, x) == x).count()
    }

    /// Whether the jacket that drops `excluded` strands is orientable: the
    /// vertices are untwisted coherently along a spanning tree and every edge
    /// is checked for a leftover twist.
    fn jacket_orientable(&self, excluded: Strand) -> bool {
        let kept: Vec<Strand> = Strand::ALL.iter().copied().filter(|&t| t != excluded).collect();
        let rank = |t: Strand| kept.iter().position(|&k| k == t).unwrap();
        let vl = self.vertex_links();
        let mut dir = vec![0i8; 2 * self.twist.len()];
        for r in &self.rot {
            let kept_port = |h: usize, avoid: usize| {
                (0..3).map(|s| 3 * h + s).find(|&p| p != avoid && kept.contains(&self.port_type(p))).unwrap()
            };
            let start = kept_port(r[0], usize::MAX);
            let mut x = start;
            let mut crossings = 0;
            loop {
                let h = x / 3;
                let other = kept_port(h, x);
                dir[h] = if rank(self.port_type(x)) < rank(self.port_type(other)) { 1 } else { -1 };
                x = vl[other];
                crossings += 1;
                if x == start {
                    break;
                }
            }
            assert_eq!(crossings, 4, "kept strands do not form a single cycle around a vertex");
        }
        let n = self.vertices.len();
        let mut adj: Vec<Vec<(usize, i8)>> = vec![Vec::new(); n];
        for e in 0..self.twist.len() {
            let (x, y) = (2 * e, 2 * e + 1);
            let s = -dir[x] * dir[y];
            let (u, v) = (self.place[x].0, self.place[y].0);
            adj[u].push((v, s));
            adj[v].push((u, s));
        }
        let mut eps = vec![0i8; n];
        for v0 in 0..n {
            if eps[v0] != 0 {
                continue;
            }
            eps[v0] = 1;
            let mut stack = vec![v0];
            while let Some(u) = stack.pop() {
                for &(w, s) in &adj[u] {
                    let want = eps[u] * s;
                    if eps[w] == 0 {
                        eps[w] = want;
                        stack.push(w);
                    } else if eps[w] != want {
                        return false;
                    }
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoJacket {
    pub excluded: Strand,
    /// Number of faces of each kept strand type.
    pub faces: BTreeMap<Strand, usize>,
    pub orientable: bool,
    /// Non-orientable genus `2 c - chi`, summed over components.
    pub k: u64,
}

pub fn mo_jackets(g: &MoGraph) -> Vec<MoJacket> {
    let f = g.face_counts();
    let v = g.vertex_count() as i64;
    let e = g.edge_count() as i64;
    let comps = g.components() as i64;
    Strand::ALL
        .iter()
        .map(|&excluded| {
            let faces: BTreeMap<Strand, usize> =
                Strand::ALL.iter().filter(|&&t| t != excluded).map(|&t| (t, f[t.index()])).collect();
            let chi = v - e + faces.values().sum::<usize>() as i64;
            let k = 2 * comps - chi;
            assert!(k >= 0, "negative non-orientable genus");
            let orientable = g.jacket_orientable(excluded);
            if orientable {
                assert!(k % 2 == 0, "orientable jacket with odd k");
            }
            MoJacket { excluded, faces, orientable, k: k as u64 }
        })
        .collect()
}

/// Half the sum of the jacket genera `k`.
pub fn mo_degree(g: &MoGraph) -> BigRational {
    let total: u64 = mo_jackets(g).iter().map(|j| j.k).sum();
    BigRational::new(BigInt::from(total), BigInt::from(2))
}

/// `3 - degree`, after checking `f = 3v/2 + 3 - degree` against the traced faces.
pub fn mo_amplitude_exponent(g: &MoGraph) -> Result<BigRational, MoError> {
    let w = mo_degree(g);
    let f: usize = g.face_counts().iter().sum();
    let v = BigRational::from_integer(BigInt::from(g.vertex_count()));
    let c = BigRational::from_integer(BigInt::from(g.components()));
    let three = BigRational::from_integer(BigInt::from(3));
    let expected = &three * &v / BigRational::from_integer(BigInt::from(2)) + &three * &c - &w;
    if expected != BigRational::from_integer(BigInt::from(f)) {
        return Err(MoError::MismatchedRoutes(format!("traced {f} faces, identity gives {expected}")));
    }
    Ok(three - w)
}

pub fn is_mo_bipartite(g: &MoGraph) -> bool {
    let n = g.vertex_count();
    let mut color = vec![-1i8; n];
    for s in 0..n {
        if color[s] >= 0 {
            continue;
        }
        color[s] = 0;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &h in &g.rot[u] {
                let w = g.place[g.mate(h)].0;
                if color[w] < 0 {
                    color[w] = 1 - color[u];
                    stack.push(w);
                } else if color[w] == color[u] {
                    return false;
                }
            }
        }
    }
    true
}

/// Removes 2-vertex insertions (a pair joined by three edges whose closure
/// has degree zero) until none is left and returns what remains.
pub fn mo_melonic_reduction(g: &MoGraph) -> Result<MoGraph, MoError> {
    let mut cur = g.clone();
    'outer: while cur.vertex_count() > 2 {
        let n = cur.vertex_count();
        for u in 0..n {
            for v in u + 1..n {
                let between: Vec<usize> = cur.rot[u].iter().copied().filter(|&h| cur.place[cur.mate(h)].0 == v).collect();
                if between.len() != 3 {
                    continue;
                }
                let hu = *cur.rot[u].iter().find(|&&h| !between.contains(&h)).unwrap();
                let hv = *cur.rot[v].iter().find(|&&h| cur.place[cur.mate(h)].0 != u).unwrap();
                if cur.place[cur.mate(hu)].0 == u || cur.place[cur.mate(hv)].0 == v {
                    continue;
                }
                if let Some(next) = cur.remove_insertion(u, v, hu, hv)? {
                    cur = next;
                    continue 'outer;
                }
            }
        }
        break;
    }
    Ok(cur)
}

impl MoGraph {
    fn remove_insertion(&self, u: usize, v: usize, hu: usize, hv: usize) -> Result<Option<MoGraph>, MoError> {
        let close_twist = self.end_sign(hu) == self.end_sign(hv);
        // closure: the pair alone with hu glued to hv
        let pair_edges: Vec<usize> = (0..self.twist.len())
            .filter(|&e| {
                let (a, b) = (self.place[2 * e].0, self.place[2 * e + 1].0);
                (a == u || a == v) && (b == u || b == v)
            })
            .collect();
        let mut emap = BTreeMap::new();
        let mut twist = Vec::new();
        for &e in &pair_edges {
            emap.insert(2 * e, 2 * twist.len());
            emap.insert(2 * e + 1, 2 * twist.len() + 1);
            twist.push(self.twist[e]);
        }
        emap.insert(hu, 2 * twist.len());
        emap.insert(hv, 2 * twist.len() + 1);
        twist.push(close_twist);
        let rot = vec![
            self.rot[u].iter().map(|h| emap[h]).collect(),
            self.rot[v].iter().map(|h| emap[h]).collect(),
        ];
        let closure = MoGraph::build(vec![self.vertices[u], self.vertices[v]], rot, twist)?;
        if !mo_degree(&closure).is_zero() {
            return Ok(None);
        }
        let (mu, mv) = (self.mate(hu), self.mate(hv));
        let keep: Vec<usize> = (0..self.vertices.len()).filter(|&x| x != u && x != v).collect();
        let mut new_end = BTreeMap::new();
        let mut twist = Vec::new();
        for e in 0..self.twist.len() {
            let ends = [2 * e, 2 * e + 1];
            if ends.iter().any(|&h| self.place[h].0 == u || self.place[h].0 == v) {
                continue;
            }
            new_end.insert(2 * e, 2 * twist.len());
            new_end.insert(2 * e + 1, 2 * twist.len() + 1);
            twist.push(self.twist[e]);
        }
        new_end.insert(mu, 2 * twist.len());
        new_end.insert(mv, 2 * twist.len() + 1);
        twist.push(self.twist[hu / 2] ^ self.twist[hv / 2] ^ close_twist);
        let rot = keep.iter().map(|&x| self.rot[x].iter().map(|h| new_end[h]).collect()).collect();
        let verts = keep.iter().map(|&x| self.vertices[x]).collect();
        Ok(Some(MoGraph::build(verts, rot, twist)?))
    }
}

/// Degree zero, cross-checked against the insertion reduction.
pub fn is_mo_melonic(g: &MoGraph) -> Result<bool, MoError> {
    let by_degree = mo_degree(g).is_zero();
    let reduced = mo_melonic_reduction(g)?;
    let by_reduction = reduced.vertex_count() == 2 && mo_degree(&reduced).is_zero();
    if by_degree != by_reduction {
        return Err(MoError::MismatchedRoutes(format!("degree says {by_degree}, reduction says {by_reduction}")));
    }
    Ok(by_degree)
}

/// Connected all-plus graphs on `v` vertices: every bijection from the `+`
/// ends (positions 0, 2) to the `-` ends (positions 1, 3).
pub fn enumerate_mo_graphs(v: usize) -> Vec<MoGraph> {
    let plus: Vec<(usize, usize)> = (0..v).flat_map(|x| [(x, 0), (x, 2)]).collect();
    let minus: Vec<(usize, usize)> = (0..v).flat_map(|x| [(x, 1), (x, 3)]).collect();
    let m = plus.len();
    let mut perm: Vec<usize> = (0..m).collect();
    let mut out = Vec::new();
    loop {
        let mut rot = vec![vec![usize::MAX; 4]; v];
        for (k, &(x, p)) in plus.iter().enumerate() {
            rot[x][p] = 2 * k;
            let (y, q) = minus[perm[k]];
            rot[y][q] = 2 * k + 1;
        }
        let verts = (0..v).map(|id| MoVertex { id, sign: Sign::Plus }).collect();
        let g = MoGraph::build(verts, rot, vec![false; m]).expect("valid by construction");
        if g.components() == 1 {
            out.push(g);
        }
        let mut i = m.saturating_sub(1);
        while i > 0 && perm[i - 1] >= perm[i] {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        let mut j = m - 1;
        while perm[j] <= perm[i - 1] {
            j -= 1;
        }
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
    out
}

pub fn double_tadpole() -> MoGraph {
    MoGraph::from_edge_rotations(&[[0, 0, 1, 1]]).expect("fixture")
}

pub fn elementary_melon_mo() -> MoGraph {
    MoGraph::from_edge_rotations(&[[0, 2, 1, 3], [2, 0, 3, 1]]).expect("fixture")
}

pub fn twisted_sunshine() -> MoGraph {
    MoGraph::from_edge_rotations(&[[0, 3, 1, 2], [2, 0, 3, 1]]).expect("fixture")
}

pub fn degree_f64(w: &BigRational) -> f64 {
    w.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half(n: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(2))
    }

    #[test]
    fn fixtures() {
        let t = double_tadpole();
        assert_eq!(mo_degree(&t), half(1));
        assert_eq!(t.face_counts(), [2, 1, 1]);
        assert_eq!(mo_amplitude_exponent(&t).unwrap(), half(5));
        let ks: Vec<u64> = mo_jackets(&t).iter().map(|j| j.k).collect();
        assert_eq!(ks, vec![1, 0, 0]);
        assert!(!is_mo_bipartite(&t));

        let m = elementary_melon_mo();
        assert_eq!(mo_degree(&m), half(0));
        assert_eq!(mo_amplitude_exponent(&m).unwrap(), half(6));
        assert!(is_mo_bipartite(&m));

        let s = twisted_sunshine();
        assert_eq!(mo_degree(&s), half(4));
        let js = mo_jackets(&s);
        assert_eq!(js.iter().map(|j| j.k).collect::<Vec<_>>(), vec![1, 1, 2]);
        assert!(js[2].orientable);
        assert!(!js[0].orientable && !js[1].orientable);
        assert!(is_mo_bipartite(&s));
    }

    #[test]
    fn sign_clash() {
        let verts = vec![MoVertex { id: 0, sign: Sign::Plus }, MoVertex { id: 1, sign: Sign::Plus }];
        // the end at slot 0 of each vertex is '+'
        let rot = vec![vec![0, 2, 4, 6], vec![1, 3, 5, 7]];
        let err = MoGraph::build(verts, rot, vec![false; 4]).unwrap_err();
        assert!(matches!(err, MoError::SignClash { edge: 0, .. }));
    }

    #[test]
    fn not_four_regular() {
        let verts = vec![MoVertex { id: 0, sign: Sign::Plus }];
        let err = MoGraph::build(verts, vec![vec![0, 1]], vec![false]).unwrap_err();
        assert_eq!(err, MoError::NotFourRegular { vertex: 0, degree: 2 });
    }

    #[test]
    fn counts_for_small_sizes() {
        assert_eq!(enumerate_mo_graphs(1).len(), 2);
        assert_eq!(enumerate_mo_graphs(2).len(), 20);
    }

    #[test]
    fn melonic_reduction_agrees() {
        assert!(is_mo_melonic(&elementary_melon_mo()).unwrap());
        assert!(!is_mo_melonic(&twisted_sunshine()).unwrap());
        assert!(!is_mo_melonic(&double_tadpole()).unwrap());
    }
}
