use super::graph::{ColoredGraph, Parity};
use super::invariants::gem_degree;
use super::GemError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dipole {
    pub white: usize,
    pub black: usize,
    /// Colors of the edges joining the pair, ascending.
    pub colors: Vec<usize>,
}

fn shared_colors(g: &ColoredGraph, w: usize, b: usize) -> Vec<usize> {
    (0..=g.rank()).filter(|&c| g.neighbor(w, c) == Some(b)).collect()
}

fn separated(g: &ColoredGraph, w: usize, b: usize, colors: &[usize]) -> bool {
    let rest: Vec<usize> = (0..=g.rank()).filter(|c| !colors.contains(c)).collect();
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    seen[w] = true;
    let mut stack = vec![w];
    while let Some(x) = stack.pop() {
        if x == b {
            return false;
        }
        for &c in &rest {
            if let Some(y) = g.neighbor(x, c) {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    true
}

/// Pairs joined by exactly `k` edges whose endpoints sit in different
/// bubbles of the complementary colors.
pub fn find_dipoles(g: &ColoredGraph, k: usize) -> Result<Vec<Dipole>, GemError> {
    g.require_closed()?;
    if k == 0 || k > g.rank() {
        return Err(GemError::InvalidDipole(format!("k = {k} outside 1..={}", g.rank())));
    }
    let mut out = Vec::new();
    for w in 0..g.vertex_count() {
        if g.parity(w) != Parity::White {
            continue;
        }
        let mut partners: Vec<usize> = (0..=g.rank()).map(|c| g.nb(w, c)).collect();
        partners.sort_unstable();
        partners.dedup();
        for b in partners {
            let colors = shared_colors(g, w, b);
            if colors.len() == k && separated(g, w, b, &colors) {
                out.push(Dipole { white: g.id(w), black: g.id(b), colors });
            }
        }
    }
    Ok(out)
}

/// Removes the dipole pair and reconnects the dangling edges color by color.
pub fn contract_dipole(g: &ColoredGraph, dip: &Dipole) -> Result<ColoredGraph, GemError> {
    g.require_closed()?;
    let w = g.position(dip.white).ok_or_else(|| GemError::InvalidDipole(format!("no vertex {}", dip.white)))?;
    let b = g.position(dip.black).ok_or_else(|| GemError::InvalidDipole(format!("no vertex {}", dip.black)))?;
    if g.parity(w) != Parity::White || g.parity(b) != Parity::Black {
        return Err(GemError::InvalidDipole("endpoints have the wrong parity".into()));
    }
    let colors = shared_colors(g, w, b);
    if colors != dip.colors || colors.is_empty() || colors.len() > g.rank() || !separated(g, w, b, &colors) {
        return Err(GemError::InvalidDipole(format!("({}, {}) is not a dipole on {:?}", dip.white, dip.black, dip.colors)));
    }
    let k = g.num_colors();
    let n = g.vertex_count();
    let mut adj: Vec<Option<usize>> = g.adjacency().to_vec();
    for c in 0..k {
        if colors.contains(&c) {
            continue;
        }
        let bw = g.nb(w, c);
        let wb = g.nb(b, c);
        adj[bw * k + c] = Some(wb);
        adj[wb * k + c] = Some(bw);
    }
    let keep: Vec<usize> = (0..n).filter(|&v| v != w && v != b).collect();
    let mut newpos = vec![usize::MAX; n];
    for (i, &v) in keep.iter().enumerate() {
        newpos[v] = i;
    }
    let mut nadj = Vec::with_capacity(keep.len() * k);
    for &v in &keep {
        for c in 0..k {
            nadj.push(adj[v * k + c].map(|y| newpos[y]));
        }
    }
    let ids = keep.iter().map(|&v| g.id(v)).collect();
    let parity = keep.iter().map(|&v| g.parity(v)).collect();
    Ok(ColoredGraph::from_parts(g.rank(), ids, parity, nadj))
}

/// Inserts a dipole on the colors `colors` next to the white vertex `white`:
/// the edges of the other colors at `white` are cut and rerouted through a
/// new white/black pair joined by `colors`.
pub fn create_dipole(g: &ColoredGraph, white: usize, colors: &[usize]) -> Result<ColoredGraph, GemError> {
    g.require_closed()?;
    let w = g.position(white).ok_or(GemError::DanglingReference(white))?;
    if g.parity(w) != Parity::White {
        return Err(GemError::InvalidDipole(format!("vertex {white} is not white")));
    }
    if colors.is_empty() || colors.len() > g.rank() || colors.iter().any(|&c| c > g.rank()) {
        return Err(GemError::InvalidDipole(format!("bad color set {colors:?}")));
    }
    let k = g.num_colors();
    let n = g.vertex_count();
    let next = g.ids().iter().max().map_or(0, |m| m + 1);
    let (nw, nb) = (n, n + 1);
    let mut adj = g.adjacency().to_vec();
    adj.extend(std::iter::repeat_n(None, 2 * k));
    for c in 0..k {
        if colors.contains(&c) {
            adj[nw * k + c] = Some(nb);
            adj[nb * k + c] = Some(nw);
        } else {
            let b = g.nb(w, c);
            adj[w * k + c] = Some(nb);
            adj[nb * k + c] = Some(w);
            adj[nw * k + c] = Some(b);
            adj[b * k + c] = Some(nw);
        }
    }
    let mut ids = g.ids().to_vec();
    ids.extend([next, next + 1]);
    let mut parity: Vec<Parity> = (0..n).map(|v| g.parity(v)).collect();
    parity.extend([Parity::White, Parity::Black]);
    Ok(ColoredGraph::from_parts(g.rank(), ids, parity, adj))
}

/// Greedy d-dipole contraction; returns the final vertex count.
pub fn reduce_by_d_dipoles(g: &ColoredGraph) -> Result<(ColoredGraph, usize), GemError> {
    let mut cur = g.clone();
    let mut steps = 0;
    while cur.vertex_count() > 2 {
        let dips = find_dipoles(&cur, cur.rank())?;
        match dips.first() {
            Some(dip) => {
                cur = contract_dipole(&cur, dip)?;
                steps += 1;
            }
            None => break,
        }
    }
    Ok((cur, steps))
}

/// Degree zero, cross-checked against d-dipole reduction.
pub fn is_melonic(g: &ColoredGraph) -> Result<bool, GemError> {
    g.require_closed()?;
    if !g.is_connected() {
        return Err(GemError::NotConnected);
    }
    let by_degree = gem_degree(g)? == 0;
    let (reduced, _) = reduce_by_d_dipoles(g)?;
    let by_reduction = reduced.vertex_count() == 2;
    if by_degree != by_reduction {
        return Err(GemError::MismatchedRoutes {
            route_a: format!("degree says {by_degree}"),
            route_b: format!("reduction says {by_reduction}"),
        });
    }
    Ok(by_degree)
}
