use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use super::laurent::{int, LaurentPoly};
use super::OracleError;
use crate::gem_core::{ColoredGraph, Edge, Parity, Vertex};
use crate::melonic_series::catalan;

pub const SYMBOLIC_VERTEX_LIMIT: usize = 8;
pub const PERTURBATIVE_ORDER_LIMIT: usize = 4;
const INDEX_SUM_LIMIT: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    /// Covariance `N^(1-d)` per Wick pair.
    #[default]
    Scaled,
    /// Unit covariance.
    Unit,
}

#[derive(Debug, Clone)]
pub struct MomentRequest {
    pub d: usize,
    pub n: Option<u64>,
    pub invariants: Vec<ColoredGraph>,
    pub convention: Convention,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentResult {
    pub poly: LaurentPoly,
    pub value: Option<BigRational>,
    pub index_sum: Option<BigRational>,
}

/// Disjoint union of the invariants, checked to have open color 0 only.
pub fn union_of(d: usize, invariants: &[ColoredGraph]) -> Result<ColoredGraph, OracleError> {
    let mut acc: Option<ColoredGraph> = None;
    for g in invariants {
        if g.rank() != d {
            return Err(OracleError::RankMismatch { expected: d, got: g.rank() });
        }
        for v in 0..g.vertex_count() {
            if g.neighbor(v, 0).is_some() || (1..=d).any(|c| g.neighbor(v, c).is_none()) {
                return Err(OracleError::NotAnInvariant);
            }
        }
        acc = Some(match acc {
            None => g.clone(),
            Some(a) => a.disjoint_union(g)?,
        });
    }
    acc.ok_or(OracleError::NotAnInvariant)
}

fn sides(g: &ColoredGraph) -> (Vec<usize>, Vec<usize>) {
    let whites = (0..g.vertex_count()).filter(|&v| g.parity(v) == Parity::White).collect();
    let blacks = (0..g.vertex_count()).filter(|&v| g.parity(v) == Parity::Black).collect();
    (whites, blacks)
}

/// Visits every closure of `g` by a white/black matching on color 0. The
/// first white vertex's partner is split across threads; the visitor
/// results are merged in partner order.
pub fn fold_pairings<T, F, M>(g: &ColoredGraph, visit: F, merge: M, init: T) -> Result<T, OracleError>
where
    T: Send + Sync + Clone,
    F: Fn(&ColoredGraph, &mut T) + Sync,
    M: Fn(T, T) -> T,
{
    let (whites, blacks) = sides(g);
    if whites.len() != blacks.len() {
        return Err(OracleError::ParityMismatch { white: whites.len(), black: blacks.len() });
    }
    if whites.is_empty() {
        return Ok(init);
    }
    let k = g.num_colors();
    let base: Vec<Option<usize>> = (0..g.vertex_count() * k).map(|i| g.neighbor(i / k, i % k)).collect();
    let ids: Vec<usize> = g.ids().to_vec();
    let parity: Vec<Parity> = (0..g.vertex_count()).map(|v| g.parity(v)).collect();
    let parts: Vec<T> = (0..blacks.len())
        .into_par_iter()
        .map(|first| {
            let mut acc = init.clone();
            let mut adj = base.clone();
            let mut used = vec![false; blacks.len()];
            let (w0, b0) = (whites[0], blacks[first]);
            adj[w0 * k] = Some(b0);
            adj[b0 * k] = Some(w0);
            used[first] = true;
            recurse(1, &whites, &blacks, &mut used, &mut adj, k, &ids, &parity, g.rank(), &visit, &mut acc);
            acc
        })
        .collect();
    Ok(parts.into_iter().fold(init, merge))
}

#[allow(clippy::too_many_arguments)]
fn recurse<T, F>(
    i: usize,
    whites: &[usize],
    blacks: &[usize],
    used: &mut [bool],
    adj: &mut Vec<Option<usize>>,
    k: usize,
    ids: &[usize],
    parity: &[Parity],
    d: usize,
    visit: &F,
    acc: &mut T,
) where
    F: Fn(&ColoredGraph, &mut T),
{
    if i == whites.len() {
        let g = ColoredGraph::from_parts(d, ids.to_vec(), parity.to_vec(), adj.clone());
        visit(&g, acc);
        return;
    }
    let w = whites[i];
    for j in 0..blacks.len() {
        if used[j] {
            continue;
        }
        used[j] = true;
        let b = blacks[j];
        adj[w * k] = Some(b);
        adj[b * k] = Some(w);
        recurse(i + 1, whites, blacks, used, adj, k, ids, parity, d, visit, acc);
        adj[w * k] = None;
        adj[b * k] = None;
        used[j] = false;
    }
}

/// Faces through color 0 in a closed pairing graph.
pub fn zero_faces(g: &ColoredGraph) -> usize {
    (1..=g.rank()).map(|c| g.face_count_pair(0, c)).sum()
}

/// N-exponent of one pairing: `(1-d) pairs + faces through color 0`, or the
/// face count alone with unit covariance.
pub fn pairing_exponent(g: &ColoredGraph, convention: Convention) -> i64 {
    let pairs = (g.vertex_count() / 2) as i64;
    let base = zero_faces(g) as i64;
    match convention {
        Convention::Scaled => base + (1 - g.rank() as i64) * pairs,
        Convention::Unit => base,
    }
}

fn exponent_histogram(g: &ColoredGraph, convention: Convention, connected_only: bool) -> Result<BTreeMap<i64, u64>, OracleError> {
    fold_pairings(
        g,
        |closed, acc: &mut BTreeMap<i64, u64>| {
            if connected_only && !closed.is_connected() {
                return;
            }
            *acc.entry(pairing_exponent(closed, convention)).or_insert(0) += 1;
        },
        |mut a, b| {
            for (e, c) in b {
                *a.entry(e).or_insert(0) += c;
            }
            a
        },
        BTreeMap::new(),
    )
}

fn histogram_poly(h: &BTreeMap<i64, u64>) -> LaurentPoly {
    let mut p = LaurentPoly::zero();
    for (&e, &c) in h {
        p.add_term(e, BigRational::from_integer(BigInt::from(c)));
    }
    p
}

/// Gaussian expectation of the product of invariants, as a Laurent
/// polynomial in N; at a fixed `N <= 3` the direct index sum is compared.
pub fn tensor_gaussian_moment(req: &MomentRequest) -> Result<MomentResult, OracleError> {
    let g = union_of(req.d, &req.invariants)?;
    let (w, b) = sides(&g);
    if w.len() != b.len() {
        return Err(OracleError::ParityMismatch { white: w.len(), black: b.len() });
    }
    if g.vertex_count() > SYMBOLIC_VERTEX_LIMIT {
        return Err(OracleError::TooLarge(format!("{} vertices > {SYMBOLIC_VERTEX_LIMIT}", g.vertex_count())));
    }
    let poly = histogram_poly(&exponent_histogram(&g, req.convention, false)?);
    let (value, index_sum) = match req.n {
        None => (None, None),
        Some(n) => {
            if n == 0 {
                return Err(OracleError::InvalidArgument("N must be positive".into()));
            }
            let value = poly.eval(&int(n as i64));
            let direct = if n <= 3 && fits_index_sum(&g, n) {
                let s = index_sum_moment(&g, n, req.convention)?;
                if s != value {
                    return Err(OracleError::MismatchedRoutes(format!("pairings {value} vs index sum {s}")));
                }
                Some(s)
            } else {
                None
            };
            (Some(value), direct)
        }
    };
    Ok(MomentResult { poly, value, index_sum })
}

fn fits_index_sum(g: &ColoredGraph, n: u64) -> bool {
    let edges = g.edge_count() as u32;
    n.checked_pow(edges).is_some_and(|t| t <= INDEX_SUM_LIMIT)
}

/// Independent route: sum over index values on every invariant edge; each
/// assignment contributes the number of Wick matchings between equal index
/// tuples.
pub fn index_sum_moment(g: &ColoredGraph, n: u64, convention: Convention) -> Result<BigRational, OracleError> {
    if !fits_index_sum(g, n) {
        return Err(OracleError::TooLarge(format!("N^{} index assignments", g.edge_count())));
    }
    let d = g.rank();
    let edges: Vec<Edge> = g.edges();
    let (whites, blacks) = sides(g);
    if whites.len() != blacks.len() {
        return Err(OracleError::ParityMismatch { white: whites.len(), black: blacks.len() });
    }
    // slot[v][c - 1] = edge index carrying color c at v
    let mut slot = vec![vec![0usize; d]; g.vertex_count()];
    for (ei, e) in edges.iter().enumerate() {
        let (w, b) = (g.position(e.white).unwrap(), g.position(e.black).unwrap());
        slot[w][e.color - 1] = ei;
        slot[b][e.color - 1] = ei;
    }
    let fact: Vec<u64> = (0..=whites.len() as u64).scan(1u64, |f, i| {
        if i > 0 {
            *f *= i;
        }
        Some(*f)
    }).collect();
    let m = edges.len();
    let mut idx = vec![0u64; m];
    let mut total: u128 = 0;
    loop {
        let tuple = |v: usize| -> Vec<u64> { slot[v].iter().map(|&e| idx[e]).collect() };
        let mut counts: BTreeMap<Vec<u64>, (u64, u64)> = BTreeMap::new();
        for &w in &whites {
            counts.entry(tuple(w)).or_default().0 += 1;
        }
        for &b in &blacks {
            counts.entry(tuple(b)).or_default().1 += 1;
        }
        if counts.values().all(|(a, b)| a == b) {
            total += counts.values().map(|(a, _)| fact[*a as usize] as u128).product::<u128>();
        }
        let mut pos = 0;
        loop {
            if pos == m {
                let pairs = whites.len() as i64;
                let total = BigRational::from_integer(BigInt::from(total));
                return Ok(match convention {
                    Convention::Scaled => total * super::laurent::pow_i(&int(n as i64), (1 - d as i64) * pairs),
                    Convention::Unit => total,
                });
            }
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// The order-2 invariant: one white and one black joined by colors 1..=d.
pub fn order_two_invariant(d: usize) -> ColoredGraph {
    let vs = [Vertex { id: 0, parity: Parity::White }, Vertex { id: 1, parity: Parity::Black }];
    let es: Vec<Edge> = (1..=d).map(|c| Edge { white: 0, black: 1, color: c }).collect();
    ColoredGraph::invariant(d, &vs, &es).expect("valid invariant")
}

/// Quartic melonic invariant: two pairs sharing every color but `c`, which
/// crosses between the pairs.
pub fn quartic_melonic(d: usize, c: usize) -> ColoredGraph {
    let vs = [
        Vertex { id: 0, parity: Parity::White },
        Vertex { id: 1, parity: Parity::Black },
        Vertex { id: 2, parity: Parity::White },
        Vertex { id: 3, parity: Parity::Black },
    ];
    let mut es = Vec::new();
    for col in 1..=d {
        if col == c {
            es.push(Edge { white: 0, black: 3, color: col });
            es.push(Edge { white: 2, black: 1, color: col });
        } else {
            es.push(Edge { white: 0, black: 1, color: col });
            es.push(Edge { white: 2, black: 3, color: col });
        }
    }
    ColoredGraph::invariant(d, &vs, &es).expect("valid invariant")
}

fn multisets(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, d: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for c in start..=d {
            cur.push(c);
            go(c, d, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, d, k, &mut Vec::new(), &mut out);
    out
}

fn multinomial(ms: &[usize]) -> u64 {
    let mut counts = BTreeMap::new();
    for &c in ms {
        *counts.entry(c).or_insert(0u64) += 1;
    }
    let f = |n: u64| (1..=n).product::<u64>();
    f(ms.len() as u64) / counts.values().map(|&c| f(c)).product::<u64>()
}

/// Coefficients of `lambda^k`, `k <= order`, of `<T.T>/N` under the weight
/// `exp(-N^(d-1) (T.T + lambda sum_c B_c))`, summed over connected pairings.
pub fn perturbative_two_point(d: usize, order: usize) -> Result<Vec<LaurentPoly>, OracleError> {
    if order > PERTURBATIVE_ORDER_LIMIT {
        return Err(OracleError::TooLarge(format!("order {order} > {PERTURBATIVE_ORDER_LIMIT}")));
    }
    let mut out = Vec::with_capacity(order + 1);
    for k in 0..=order {
        let mut coef = LaurentPoly::zero();
        for ms in multisets(d, k) {
            let mut invs = vec![order_two_invariant(d)];
            invs.extend(ms.iter().map(|&c| quartic_melonic(d, c)));
            let g = union_of(d, &invs)?;
            let hist = exponent_histogram(&g, Convention::Scaled, true)?;
            coef = &coef + &histogram_poly(&hist).scale(&int(multinomial(&ms) as i64));
        }
        let fk: i64 = (1..=k as i64).product();
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let poly = coef.shift((d as i64 - 1) * k as i64 - 1).scale(&BigRational::new(BigInt::from(sign), BigInt::from(fk)));
        let expected = leading_coefficient(d, k);
        if poly.max_exp() > Some(0) || poly.coeff(0) != expected {
            return Err(OracleError::MismatchedRoutes(format!(
                "order {k}: leading coefficient {} (max exponent {:?}), expected {expected}",
                poly.coeff(0),
                poly.max_exp()
            )));
        }
        out.push(poly);
    }
    Ok(out)
}

/// `Catalan_k (-2d)^k`.
pub fn leading_coefficient(d: usize, k: usize) -> BigRational {
    let base = BigInt::from(-2 * d as i64);
    BigRational::from_integer(catalan(k as u64) * num_traits::pow(base, k))
}
