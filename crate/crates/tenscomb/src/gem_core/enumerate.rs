use rand::seq::SliceRandom;
use rand::Rng;

use super::graph::{ColoredGraph, Parity};
use super::GemError;

pub const AUTOMORPHISM_LIMIT: usize = 16;

/// BFS code of the component containing `start`: vertices are numbered in
/// discovery order and the code lists, per vertex, its neighbour numbers.
fn bfs_code(g: &ColoredGraph, start: usize) -> Vec<u32> {
    let k = g.num_colors();
    let n = g.vertex_count();
    let mut label = vec![u32::MAX; n];
    let mut order = vec![start];
    label[start] = 0;
    let mut head = 0;
    let mut code = Vec::new();
    while head < order.len() {
        let x = order[head];
        head += 1;
        for c in 0..k {
            match g.neighbor(x, c) {
                Some(y) => {
                    if label[y] == u32::MAX {
                        label[y] = order.len() as u32;
                        order.push(y);
                    }
                    code.push(label[y]);
                }
                None => code.push(u32::MAX),
            }
        }
    }
    code
}

/// Canonical form under parity- and color-preserving relabeling.
pub fn canonical_code(g: &ColoredGraph) -> Vec<u32> {
    let colors = g.all_colors();
    let mut parts: Vec<Vec<u32>> = g
        .components_in(&colors)
        .into_iter()
        .map(|comp| {
            comp.iter()
                .filter(|&&v| g.parity(v) == Parity::White)
                .map(|&v| bfs_code(g, v))
                .min()
                .unwrap_or_else(|| vec![u32::MAX - 1; comp.len()])
        })
        .collect();
    parts.sort();
    let mut out = vec![g.rank() as u32, g.vertex_count() as u32];
    for p in parts {
        out.push(p.len() as u32);
        out.extend(p);
    }
    out
}

pub fn isomorphic(a: &ColoredGraph, b: &ColoredGraph) -> bool {
    canonical_code(a) == canonical_code(b)
}

/// Order of the color- and parity-preserving automorphism group, by
/// backtracking with forced propagation along colored edges.
pub fn automorphism_count(g: &ColoredGraph) -> Result<u64, GemError> {
    let n = g.vertex_count();
    if n > AUTOMORPHISM_LIMIT {
        return Err(GemError::TooLarge { vertices: n, limit: AUTOMORPHISM_LIMIT });
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    Ok(extend(g, &mut map, &mut used))
}

fn propagate(g: &ColoredGraph, map: &mut [usize], used: &mut [bool], v: usize, u: usize, trail: &mut Vec<usize>) -> bool {
    let mut stack = vec![(v, u)];
    while let Some((x, y)) = stack.pop() {
        if map[x] != usize::MAX {
            if map[x] != y {
                return false;
            }
            continue;
        }
        if used[y] || g.parity(x) != g.parity(y) {
            return false;
        }
        map[x] = y;
        used[y] = true;
        trail.push(x);
        for c in 0..g.num_colors() {
            match (g.neighbor(x, c), g.neighbor(y, c)) {
                (Some(a), Some(b)) => stack.push((a, b)),
                (None, None) => {}
                _ => return false,
            }
        }
    }
    true
}

fn extend(g: &ColoredGraph, map: &mut [usize], used: &mut [bool]) -> u64 {
    let Some(v) = map.iter().position(|&m| m == usize::MAX) else {
        return 1;
    };
    let mut total = 0;
    for u in 0..g.vertex_count() {
        if used[u] || g.parity(u) != g.parity(v) {
            continue;
        }
        let mut trail = Vec::new();
        if propagate(g, map, used, v, u, &mut trail) {
            total += extend(g, map, used);
        }
        for x in trail {
            used[map[x]] = false;
            map[x] = usize::MAX;
        }
    }
    total
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    out.push(a.clone());
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out.sort();
    out
}

/// Graph whose color-`c` matching sends white `i` to black `matchings[c][i]`.
/// Whites get ids `0..p`, blacks `p..2p`.
pub fn from_matchings(d: usize, matchings: &[Vec<usize>]) -> ColoredGraph {
    let p = matchings[0].len();
    let k = d + 1;
    let mut adj = vec![None; 2 * p * k];
    for (c, m) in matchings.iter().enumerate() {
        for (i, &j) in m.iter().enumerate() {
            adj[i * k + c] = Some(p + j);
            adj[(p + j) * k + c] = Some(i);
        }
    }
    let parity = (0..2 * p).map(|v| if v < p { Parity::White } else { Parity::Black }).collect();
    ColoredGraph::from_parts(d, (0..2 * p).collect(), parity, adj)
}

/// Every closed graph on `2p` vertices with color 0 fixed to the identity
/// matching (each isomorphism class appears at least once).
pub fn enumerate_closed(d: usize, p: usize) -> Vec<ColoredGraph> {
    let perms = permutations(p);
    let ident: Vec<usize> = (0..p).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; d];
    loop {
        let mut ms = vec![ident.clone()];
        ms.extend(idx.iter().map(|&i| perms[i].clone()));
        out.push(from_matchings(d, &ms));
        let mut pos = 0;
        loop {
            if pos == d {
                return out;
            }
            idx[pos] += 1;
            if idx[pos] < perms.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Connected closed graphs on `2p` vertices, one per isomorphism class.
pub fn enumerate_connected_unique(d: usize, p: usize) -> Vec<ColoredGraph> {
    let mut seen = std::collections::BTreeSet::new();
    enumerate_closed(d, p)
        .into_iter()
        .filter(|g| g.is_connected())
        .filter(|g| seen.insert(canonical_code(g)))
        .collect()
}

/// Uniformly random matchings on `2p` vertices.
pub fn random_closed<R: Rng>(rng: &mut R, d: usize, p: usize) -> ColoredGraph {
    let ms: Vec<Vec<usize>> = (0..=d)
        .map(|_| {
            let mut m: Vec<usize> = (0..p).collect();
            m.shuffle(rng);
            m
        })
        .collect();
    from_matchings(d, &ms)
}
