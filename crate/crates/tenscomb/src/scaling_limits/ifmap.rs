use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ScalingError;
use crate::melonic_series::tree_function_scaled;

/// Intermediate-field map: a rotation system over edge ends, where edge `k`
/// owns ends `2k` and `2k + 1`, one color per edge and one cilium.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IfMap {
    rot: Vec<Vec<usize>>,
    colors: Vec<usize>,
    cilium: usize,
    cilium_pos: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IfMapJson {
    pub rot: Vec<Vec<usize>>,
    pub colors: Vec<usize>,
    /// `[vertex, position]`: the cilium sits just before `rot[vertex][position]`.
    pub cilium: [usize; 2],
}

fn end_owner(rot: &[Vec<usize>], ends: usize) -> Vec<usize> {
    let mut owner = vec![usize::MAX; ends];
    for (v, r) in rot.iter().enumerate() {
        for &e in r {
            owner[e] = v;
        }
    }
    owner
}

fn find(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

fn union_find(n: usize, pairs: impl Iterator<Item = (usize, usize)>) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for (a, b) in pairs {
        let (ra, rb) = (find(&mut p, a), find(&mut p, b));
        p[ra] = rb;
    }
    (0..n).map(|x| find(&mut p, x)).collect()
}

/// Faces of the submap keeping only ends accepted by `keep`, one per
/// vertex left without ends, attributed to the vertex each face starts at.
fn submap_faces(rot: &[Vec<usize>], ends: usize, keep: impl Fn(usize) -> bool) -> Vec<(usize, usize)> {
    let owner = end_owner(rot, ends);
    let mut next = vec![usize::MAX; ends];
    let mut out = Vec::new();
    for (v, r) in rot.iter().enumerate() {
        let kept: Vec<usize> = r.iter().copied().filter(|&e| keep(e)).collect();
        if kept.is_empty() {
            out.push((v, 1));
        }
        for (i, &e) in kept.iter().enumerate() {
            next[e] = kept[(i + 1) % kept.len()];
        }
    }
    let mut seen = vec![false; ends];
    for e in 0..ends {
        if next[e] == usize::MAX || seen[e] {
            continue;
        }
        let mut x = e;
        while !seen[x] {
            seen[x] = true;
            x = next[x ^ 1];
        }
        out.push((owner[e], 1));
    }
    out
}

impl IfMap {
    pub fn new(rot: Vec<Vec<usize>>, colors: Vec<usize>, cilium: usize, cilium_pos: usize, d: usize) -> Result<Self, ScalingError> {
        let ends = 2 * colors.len();
        let mut seen = vec![false; ends];
        for r in &rot {
            for &e in r {
                if e >= ends || seen[e] {
                    return Err(ScalingError::InvalidMap(format!("edge end {e} is missing or repeated")));
                }
                seen[e] = true;
            }
        }
        if let Some(e) = seen.iter().position(|s| !s) {
            return Err(ScalingError::InvalidMap(format!("edge end {e} is not placed")));
        }
        if let Some(&c) = colors.iter().find(|&&c| c == 0 || c > d) {
            return Err(ScalingError::InvalidMap(format!("color {c} outside 1..={d}")));
        }
        if cilium >= rot.len() || cilium_pos > rot[cilium].len() {
            return Err(ScalingError::InvalidMap("cilium outside the map".into()));
        }
        let map = IfMap { rot, colors, cilium, cilium_pos };
        if map.component_count() != 1 {
            return Err(ScalingError::InvalidMap("map is not connected".into()));
        }
        Ok(map)
    }

    pub fn from_json(j: &IfMapJson, d: usize) -> Result<Self, ScalingError> {
        IfMap::new(j.rot.clone(), j.colors.clone(), j.cilium[0], j.cilium[1], d)
    }

    pub fn to_json(&self) -> IfMapJson {
        IfMapJson { rot: self.rot.clone(), colors: self.colors.clone(), cilium: [self.cilium, self.cilium_pos] }
    }

    /// A single ciliated vertex.
    pub fn bare() -> Self {
        IfMap { rot: vec![vec![]], colors: vec![], cilium: 0, cilium_pos: 0 }
    }

    pub fn vertex_count(&self) -> usize {
        self.rot.len()
    }

    pub fn edge_count(&self) -> usize {
        self.colors.len()
    }

    pub fn loops(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    pub fn rotation(&self) -> &[Vec<usize>] {
        &self.rot
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn cilium(&self) -> usize {
        self.cilium
    }

    fn component_count(&self) -> usize {
        let owner = end_owner(&self.rot, 2 * self.edge_count());
        let roots = union_find(self.vertex_count(), (0..self.edge_count()).map(|k| (owner[2 * k], owner[2 * k + 1])));
        roots.iter().collect::<BTreeSet<_>>().len()
    }

    /// Faces of the color-`c` submap, isolated vertices counted once.
    pub fn color_faces(&self, c: usize) -> usize {
        submap_faces(&self.rot, 2 * self.edge_count(), |e| self.colors[e / 2] == c).len()
    }

    /// `-1 - (E + 1)(d - 1) + sum_c F(G_c)`.
    pub fn direct_exponent(&self, d: usize) -> i64 {
        let f: usize = (1..=d).map(|c| self.color_faces(c)).sum();
        -1 - (self.edge_count() as i64 + 1) * (d as i64 - 1) + f as i64
    }
}

/// Removes non-ciliated leaves until none remain.
pub fn prune_map(m: &IfMap) -> IfMap {
    let mut rot = m.rot.clone();
    let mut cilium_pos = m.cilium_pos;
    let mut alive = vec![true; rot.len()];
    let mut dead = vec![false; m.edge_count()];
    let ends = 2 * m.edge_count();
    loop {
        let owner = end_owner(&rot, ends);
        let Some(v) = (0..rot.len()).find(|&v| v != m.cilium && alive[v] && rot[v].len() == 1) else {
            break;
        };
        let e = rot[v][0];
        let w = owner[e ^ 1];
        let i = rot[w].iter().position(|&x| x == e ^ 1).expect("mate end");
        rot[w].remove(i);
        if w == m.cilium && i < cilium_pos {
            cilium_pos -= 1;
        }
        rot[v].clear();
        alive[v] = false;
        dead[e / 2] = true;
    }
    let mut vid = vec![usize::MAX; rot.len()];
    let mut n = 0;
    for v in 0..rot.len() {
        if alive[v] {
            vid[v] = n;
            n += 1;
        }
    }
    let mut eid = vec![usize::MAX; m.edge_count()];
    let mut colors = Vec::new();
    for k in 0..m.edge_count() {
        if !dead[k] {
            eid[k] = colors.len();
            colors.push(m.colors[k]);
        }
    }
    let rot: Vec<Vec<usize>> = (0..rot.len())
        .filter(|&v| alive[v])
        .map(|v| rot[v].iter().map(|&e| 2 * eid[e / 2] + (e & 1)).collect())
        .collect();
    let out = IfMap { rot, colors, cilium: vid[m.cilium], cilium_pos };
    debug_assert_eq!(out.loops(), m.loops());
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeLabel {
    Color(usize),
    Multi,
}

impl Serialize for EdgeLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            EdgeLabel::Color(c) => s.serialize_str(&c.to_string()),
            EdgeLabel::Multi => s.serialize_str("m"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReducedEdge {
    pub label: EdgeLabel,
    /// One-particle reducible, i.e. a bridge.
    pub free: bool,
}

/// Pruned map with bivalent chains collapsed into fat edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReducedGraph {
    pub rot: Vec<Vec<usize>>,
    pub edges: Vec<ReducedEdge>,
    pub cilium: usize,
}

impl ReducedGraph {
    pub fn vertex_count(&self) -> usize {
        self.rot.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn loops(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rot[v].len()
    }

    pub fn count(&self, label: EdgeLabel) -> usize {
        self.edges.iter().filter(|e| e.label == label).count()
    }

    pub fn free_count(&self) -> usize {
        self.edges.iter().filter(|e| e.free).count()
    }

    /// `(L, g, E, C)` of the color-`c` subgraph on all vertices.
    pub fn color_data(&self, c: usize) -> (usize, usize, usize, usize) {
        let ends = 2 * self.edge_count();
        let owner = end_owner(&self.rot, ends);
        let mine: Vec<usize> = (0..self.edge_count()).filter(|&k| self.edges[k].label == EdgeLabel::Color(c)).collect();
        let roots = union_find(self.vertex_count(), mine.iter().map(|&k| (owner[2 * k], owner[2 * k + 1])));
        let comps: BTreeSet<usize> = roots.iter().copied().collect();
        let faces = submap_faces(&self.rot, ends, |e| self.edges[e / 2].label == EdgeLabel::Color(c));
        let mut genus = 0;
        for &comp in &comps {
            let v = roots.iter().filter(|&&r| r == comp).count() as i64;
            let e = mine.iter().filter(|&&k| roots[owner[2 * k]] == comp).count() as i64;
            let f = faces.iter().filter(|(w, _)| roots[*w] == comp).count() as i64;
            let chi = v - e + f;
            assert!(chi <= 2 && (2 - chi) % 2 == 0, "non-integral genus in a color submap");
            genus += ((2 - chi) / 2) as usize;
        }
        let loops = mine.len() + comps.len() - self.vertex_count();
        (loops, genus, mine.len(), comps.len())
    }

    /// `-d L + sum_c (2 L_c - 2 g_c)`.
    pub fn n_exponent(&self, d: usize) -> i64 {
        let mut total = -(d as i64) * self.loops() as i64;
        for c in 1..=d {
            let (l, g, _, _) = self.color_data(c);
            total += 2 * l as i64 - 2 * g as i64;
        }
        total
    }

    /// `E = 3L - 1`, every loop monochromatic, colored edges all self-loops.
    pub fn is_cherry(&self, d: usize) -> bool {
        let l = self.loops();
        if l == 0 || self.edge_count() != 3 * l - 1 {
            return false;
        }
        let mut sum_l = 0;
        for c in 1..=d {
            let (lc, _, _, comps) = self.color_data(c);
            if comps != self.vertex_count() {
                return false;
            }
            sum_l += lc;
        }
        sum_l == l
    }
}

/// Collapses chains through bivalent non-ciliated vertices; requires a
/// pruned map.
pub fn reduce_map(m: &IfMap) -> Result<ReducedGraph, ScalingError> {
    let ends = 2 * m.edge_count();
    if (0..m.vertex_count()).any(|v| v != m.cilium && m.rot[v].len() == 1) {
        return Err(ScalingError::InvalidMap("map is not pruned".into()));
    }
    let owner = end_owner(&m.rot, ends);
    let keep: Vec<usize> = (0..m.vertex_count()).filter(|&v| v == m.cilium || m.rot[v].len() != 2).collect();
    let mut kid = vec![usize::MAX; m.vertex_count()];
    for (i, &v) in keep.iter().enumerate() {
        kid[v] = i;
    }
    let mut used = vec![false; ends];
    let mut new_end = vec![usize::MAX; ends];
    let mut chains: Vec<(usize, usize, BTreeSet<usize>)> = Vec::new();
    for &v in &keep {
        for &e in &m.rot[v] {
            if used[e] {
                continue;
            }
            let mut colors = BTreeSet::new();
            let mut x = e;
            let last = loop {
                used[x] = true;
                used[x ^ 1] = true;
                colors.insert(m.colors[x / 2]);
                let y = x ^ 1;
                let u = owner[y];
                if kid[u] != usize::MAX {
                    break y;
                }
                x = *m.rot[u].iter().find(|&&z| z != y).expect("bivalent vertex");
            };
            let k = chains.len();
            new_end[e] = 2 * k;
            new_end[last] = 2 * k + 1;
            chains.push((e, last, colors));
        }
    }
    let rot: Vec<Vec<usize>> = keep.iter().map(|&v| m.rot[v].iter().map(|&e| new_end[e]).collect()).collect();
    let nk = keep.len();
    let pairs: Vec<(usize, usize)> = chains.iter().map(|(a, b, _)| (kid[owner[*a]], kid[owner[*b]])).collect();
    let edges: Vec<ReducedEdge> = chains
        .iter()
        .enumerate()
        .map(|(i, (_, _, cols))| {
            let label = if cols.len() == 1 { EdgeLabel::Color(*cols.iter().next().unwrap()) } else { EdgeLabel::Multi };
            let roots = union_find(nk, pairs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| *p));
            let free = roots.iter().collect::<BTreeSet<_>>().len() > 1;
            ReducedEdge { label, free }
        })
        .collect();
    let g = ReducedGraph { rot, edges, cilium: kid[m.cilium] };
    if g.loops() != m.loops() {
        return Err(ScalingError::MismatchedRoutes("reduction changed the loop number".into()));
    }
    for v in 0..g.vertex_count() {
        if v != g.cilium && g.degree(v) < 3 {
            return Err(ScalingError::MismatchedRoutes(format!("reduced vertex {v} has degree {}", g.degree(v))));
        }
    }
    let l = g.loops();
    if l >= 1 {
        if g.edge_count() > 3 * l - 1 {
            return Err(ScalingError::MismatchedRoutes(format!("E = {} > 3L - 1", g.edge_count())));
        }
        if g.edge_count() == 3 * l - 1 {
            let ok = (0..g.vertex_count()).all(|v| g.degree(v) == if v == g.cilium { 1 } else { 3 });
            if !ok {
                return Err(ScalingError::MismatchedRoutes("E = 3L - 1 without the forced degrees".into()));
            }
        }
    }
    Ok(g)
}

/// Both exponent routes, checked equal: the direct face count on `m` (and
/// on its pruning), and the reduced-graph formula.
pub fn map_n_exponent(m: &IfMap, d: usize) -> Result<i64, ScalingError> {
    let a = m.direct_exponent(d);
    let pruned = prune_map(m);
    let a2 = pruned.direct_exponent(d);
    let b = reduce_map(&pruned)?.n_exponent(d);
    if a != a2 || a != b {
        return Err(ScalingError::MismatchedRoutes(format!("direct {a}, pruned {a2}, reduced {b}")));
    }
    Ok(a)
}

/// Amplitude of a reduced graph at `0 < z < 1/(4d)`. With `group_free`,
/// bridges carry `d z / (1 - d z T^2)` regardless of their label.
pub fn reduced_amplitude(g: &ReducedGraph, d: usize, z: f64, n: f64, group_free: bool) -> Result<f64, ScalingError> {
    let df = d as f64;
    if !(z > 0.0 && z < 1.0 / (4.0 * df)) {
        return Err(ScalingError::OutsideDomain(format!("z = {z} outside (0, 1/(4d))")));
    }
    if !(n > 0.0) {
        return Err(ScalingError::OutsideDomain(format!("N = {n}")));
    }
    let t = tree_function_scaled(d, z)?;
    let t2 = t * t;
    let colored = z / (1.0 - z * t2);
    let multi = df * (df - 1.0) * z * z * t2 / ((1.0 - df * z * t2) * (1.0 - z * t2));
    let free = df * z / (1.0 - df * z * t2);
    let mut amp = n.powi(g.n_exponent(d) as i32) * t.powi(1 + 2 * g.edge_count() as i32);
    for e in &g.edges {
        amp *= match (group_free && e.free, e.label) {
            (true, _) => free,
            (false, EdgeLabel::Color(_)) => colored,
            (false, EdgeLabel::Multi) => multi,
        };
    }
    Ok(amp)
}

/// Random connected map: a spanning tree plus extra edges, shuffled
/// rotations and uniform colors.
pub fn random_map<R: Rng>(rng: &mut R, d: usize, max_vertices: usize, max_edges: usize) -> IfMap {
    let nv = rng.gen_range(1..=max_vertices.max(1));
    let e = rng.gen_range(nv - 1..=max_edges.max(nv - 1));
    let mut pairs: Vec<(usize, usize)> = (1..nv).map(|v| (rng.gen_range(0..v), v)).collect();
    while pairs.len() < e {
        pairs.push((rng.gen_range(0..nv), rng.gen_range(0..nv)));
    }
    let mut rot = vec![Vec::new(); nv];
    for (k, &(a, b)) in pairs.iter().enumerate() {
        rot[a].push(2 * k);
        rot[b].push(2 * k + 1);
    }
    for r in rot.iter_mut() {
        for i in (1..r.len()).rev() {
            let j = rng.gen_range(0..=i);
            r.swap(i, j);
        }
    }
    let colors = (0..pairs.len()).map(|_| rng.gen_range(1..=d)).collect();
    let pos = rng.gen_range(0..=rot[0].len());
    IfMap::new(rot, colors, 0, pos, d).expect("generated map is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Ciliated vertex 0 with one loop of the given colors through bivalent
    /// vertices, plus a pendant tree on vertex 0.
    fn one_loop(colors: &[usize], d: usize) -> IfMap {
        let k = colors.len();
        let mut rot = vec![Vec::new(); k + 2];
        // loop 0 -> 1 -> ... -> k-1 -> 0 via edges 0..k
        for i in 0..k {
            let (a, b) = (i, (i + 1) % k);
            rot[a].push(2 * i);
            rot[b].push(2 * i + 1);
        }
        let mut cols = colors.to_vec();
        // pendant path 0 - k - k+1
        rot[0].push(2 * k);
        rot[k].push(2 * k + 1);
        rot[k].push(2 * k + 2);
        rot[k + 1].push(2 * k + 3);
        cols.extend([1, 2]);
        IfMap::new(rot, cols, 0, 0, d).unwrap()
    }

    #[test]
    fn bare_vertex() {
        for d in 3..=5 {
            let m = IfMap::bare();
            assert_eq!(map_n_exponent(&m, d).unwrap(), 0);
            let r = reduce_map(&prune_map(&m)).unwrap();
            assert_eq!((r.loops(), r.edge_count()), (0, 0));
            let z = 0.04;
            let t = tree_function_scaled(d, z).unwrap();
            assert!((reduced_amplitude(&r, d, z, 10.0, false).unwrap() - t).abs() < 1e-15);
        }
    }

    #[test]
    fn tree_prunes_to_bare_vertex() {
        let rot = vec![vec![0, 2], vec![1, 4], vec![3], vec![5]];
        let m = IfMap::new(rot, vec![1, 2, 3], 0, 1, 3).unwrap();
        let p = prune_map(&m);
        assert_eq!(p, IfMap::bare());
        assert_eq!(prune_map(&p), p);
    }

    #[test]
    fn one_loop_reductions() {
        let d = 3;
        let m = one_loop(&[2, 2, 2, 2], d);
        let p = prune_map(&m);
        assert_eq!(p.vertex_count(), 4);
        assert_eq!(prune_map(&p), p);
        let r = reduce_map(&p).unwrap();
        assert_eq!(r.edges, vec![ReducedEdge { label: EdgeLabel::Color(2), free: false }]);
        assert_eq!(map_n_exponent(&m, d).unwrap(), -(d as i64 - 2));

        let mixed = one_loop(&[1, 2, 1], d);
        let r = reduce_map(&prune_map(&mixed)).unwrap();
        assert_eq!(r.edges[0].label, EdgeLabel::Multi);
        assert_eq!(map_n_exponent(&mixed, d).unwrap(), -(d as i64));
    }

    #[test]
    fn one_loop_amplitudes() {
        let (d, z, n) = (3usize, 0.06, 7.0f64);
        let df = d as f64;
        let t = tree_function_scaled(d, z).unwrap();
        let col = reduce_map(&prune_map(&one_loop(&[3, 3], d))).unwrap();
        let expect = n.powf(-(df - 2.0)) * t.powi(3) * z / (1.0 - z * t * t);
        assert!((reduced_amplitude(&col, d, z, n, false).unwrap() - expect).abs() < 1e-14);
        let multi = reduce_map(&prune_map(&one_loop(&[1, 3], d))).unwrap();
        let expect = n.powf(-df) * t.powi(3) * df * (df - 1.0) * z * z * t * t
            / ((1.0 - df * z * t * t) * (1.0 - z * t * t));
        assert!((reduced_amplitude(&multi, d, z, n, false).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn random_maps_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for d in 3..=5 {
            for _ in 0..200 {
                let m = random_map(&mut rng, d, 8, 20);
                map_n_exponent(&m, d).unwrap();
            }
        }
    }

    #[test]
    fn invalid_maps() {
        assert!(IfMap::new(vec![vec![0], vec![0]], vec![1], 0, 0, 3).is_err());
        assert!(IfMap::new(vec![vec![0, 1]], vec![4], 0, 0, 3).is_err());
        assert!(IfMap::new(vec![vec![], vec![]], vec![], 0, 0, 3).is_err());
    }
}
