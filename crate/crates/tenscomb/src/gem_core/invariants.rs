use num_integer::Integer;

use super::graph::ColoredGraph;
use super::GemError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bubble {
    pub colors: Vec<usize>,
    /// Vertex ids, ascending.
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub colors: (usize, usize),
    /// Vertex ids along the cycle.
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Jacket {
    /// Cyclic color order starting at 0, normalized against its reverse.
    pub cycle: Vec<usize>,
    pub faces: Vec<Face>,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub components: usize,
}

pub fn bubbles(g: &ColoredGraph, colors: &[usize]) -> Vec<Bubble> {
    let mut cs: Vec<usize> = colors.iter().copied().filter(|&c| c <= g.rank()).collect();
    cs.sort_unstable();
    cs.dedup();
    g.components_in(&cs)
        .into_iter()
        .map(|comp| Bubble { colors: cs.clone(), vertices: comp.iter().map(|&v| g.id(v)).collect() })
        .collect()
}

fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Cyclic orders of `0..=d` up to reversal, each written from 0 and chosen
/// lexicographically smaller than its reverse.
pub fn jacket_cycles(d: usize) -> Vec<Vec<usize>> {
    let mut rest: Vec<usize> = (1..=d).collect();
    let mut out = Vec::new();
    loop {
        let mut cyc = vec![0];
        cyc.extend_from_slice(&rest);
        let mut rev = vec![0];
        rev.extend(rest.iter().rev());
        if cyc <= rev {
            out.push(cyc);
        }
        if !next_permutation(&mut rest) {
            break;
        }
    }
    out
}

pub(crate) fn cycle_pairs(cycle: &[usize]) -> Vec<(usize, usize)> {
    let n = cycle.len();
    (0..n)
        .map(|q| {
            let (a, b) = (cycle[q], cycle[(q + 1) % n]);
            (a.min(b), a.max(b))
        })
        .collect()
}

pub fn enumerate_jackets(g: &ColoredGraph) -> Result<Vec<Jacket>, GemError> {
    g.require_closed()?;
    if g.rank() < 2 {
        return Err(GemError::WrongRank { expected: 2, got: g.rank() });
    }
    let components = g.component_count();
    Ok(jacket_cycles(g.rank())
        .into_iter()
        .map(|cycle| {
            let mut faces = Vec::new();
            for (i, j) in cycle_pairs(&cycle) {
                for f in g.faces_pair(i, j) {
                    faces.push(Face { colors: (i, j), vertices: f.iter().map(|&v| g.id(v)).collect() });
                }
            }
            Jacket { cycle, faces, vertex_count: g.vertex_count(), edge_count: g.edge_count(), components }
        })
        .collect())
}

/// Genus from the Euler relation, summed over the connected components.
pub fn jacket_genus(j: &Jacket) -> Result<u64, GemError> {
    let twice = 2 * j.components as i64 - j.vertex_count as i64 + j.edge_count as i64 - j.faces.len() as i64;
    if twice < 0 || twice.is_odd() {
        return Err(GemError::NonIntegralGenus {
            vertices: j.vertex_count,
            edges: j.edge_count,
            faces: j.faces.len(),
        });
    }
    Ok((twice / 2) as u64)
}

/// Genus of the single jacket of a 3-colored graph, per component.
pub(crate) fn three_colored_genus(g: &ColoredGraph) -> Result<u64, GemError> {
    debug_assert_eq!(g.rank(), 2);
    let f = g.face_count();
    let twice = 2 * g.component_count() as i64 - g.vertex_count() as i64 + g.edge_count() as i64 - f as i64;
    if twice < 0 || twice.is_odd() {
        return Err(GemError::NonIntegralGenus { vertices: g.vertex_count(), edges: g.edge_count(), faces: f });
    }
    Ok((twice / 2) as u64)
}

/// Sum of the jacket genera.
pub fn gem_degree(g: &ColoredGraph) -> Result<u64, GemError> {
    let mut total = 0;
    for j in enumerate_jackets(g)? {
        total += jacket_genus(&j)?;
    }
    Ok(total)
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Exponent of N in the vacuum amplitude, `d - 2 omega / (d-1)!`. The face
/// count route `F - p d (d-1) / 2` is computed as well and must agree.
pub fn amplitude_exponent(g: &ColoredGraph) -> Result<i64, GemError> {
    g.require_closed()?;
    if !g.is_connected() {
        return Err(GemError::NotConnected);
    }
    let d = g.rank() as i64;
    let omega = gem_degree(g)? as i64;
    let fact = factorial(g.rank() - 1) as i64;
    if (2 * omega) % fact != 0 {
        return Err(GemError::MismatchedRoutes { route_a: format!("{d} - 2*{omega}/{fact}"), route_b: "non-integral".into() });
    }
    let route_a = d - 2 * omega / fact;
    let p = g.vertex_count() as i64 / 2;
    let route_b = g.face_count() as i64 - p * d * (d - 1) / 2;
    if route_a != route_b {
        return Err(GemError::MismatchedRoutes { route_a: route_a.to_string(), route_b: route_b.to_string() });
    }
    Ok(route_a)
}

/// Genera of the bubbles on `colors` (three colors), in bubble order.
pub fn bubble_genera(g: &ColoredGraph, colors: &[usize]) -> Result<Vec<(Bubble, u64)>, GemError> {
    if colors.len() != 3 {
        return Err(GemError::WrongRank { expected: 2, got: colors.len().saturating_sub(1) });
    }
    g.require_closed()?;
    let mut out = Vec::new();
    for comp in g.components_in(colors) {
        let sub = g.restrict(&comp, colors);
        let genus = three_colored_genus(&sub)?;
        out.push((Bubble { colors: colors.to_vec(), vertices: comp.iter().map(|&v| g.id(v)).collect() }, genus));
    }
    Ok(out)
}

/// All 3-bubbles of a rank-3 graph with their genera, color triples in
/// lexicographic order.
pub fn three_bubble_genera(g: &ColoredGraph) -> Result<Vec<(Bubble, u64)>, GemError> {
    if g.rank() != 3 {
        return Err(GemError::WrongRank { expected: 3, got: g.rank() });
    }
    let mut out = Vec::new();
    for skip in (0..4).rev() {
        let colors: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
        out.extend(bubble_genera(g, &colors)?);
    }
    Ok(out)
}

/// A closed rank-3 graph encodes a manifold iff every 3-bubble is planar.
pub fn is_manifold_3d(g: &ColoredGraph) -> Result<bool, GemError> {
    Ok(three_bubble_genera(g)?.iter().all(|(_, genus)| *genus == 0))
}
