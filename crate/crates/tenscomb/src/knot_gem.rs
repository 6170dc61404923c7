//! Colored triangulations of knot and link complements from planar
//! diagram codes.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::gem_core::{bubbles, contract_dipole, Dipole, gem_degree, three_bubble_genera, ColoredGraph, Edge, GemError, Parity, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KnotError {
    #[error("malformed PD code: {0}")]
    MalformedPd(String),
    #[error("diagram is not planar: Euler characteristic {chi} over {components} components")]
    NonPlanar { chi: i64, components: usize },
    #[error("construction check failed: {0}")]
    AlgorithmAssertion(String),
    #[error(transparent)]
    Gem(#[from] GemError),
}

impl KnotError {
    pub fn is_internal(&self) -> bool {
        match self {
            KnotError::AlgorithmAssertion(_) => true,
            KnotError::Gem(e) => e.is_internal(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Dir {
    In,
    Out,
}

impl Dir {
    fn flip(self) -> Dir {
        match self {
            Dir::In => Dir::Out,
            Dir::Out => Dir::In,
        }
    }
}

/// A crossing end: `(crossing, position)`, positions counterclockwise from
/// the incoming under-strand.
type Dart = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnotDiagram {
    crossings: Vec<[i64; 4]>,
    /// Arc label to its two darts.
    arcs: BTreeMap<i64, [Dart; 2]>,
    dir: BTreeMap<Dart, Dir>,
    components: usize,
}

fn find(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

fn dart_index(d: Dart) -> usize {
    4 * d.0 + d.1
}

/// Parses a PD code such as `[[1,4,2,5],[3,6,4,1],[5,2,6,3]]`.
pub fn parse_pd(text: &str) -> Result<KnotDiagram, KnotError> {
    let crossings: Vec<[i64; 4]> =
        serde_json::from_str(text.trim()).map_err(|e| KnotError::MalformedPd(e.to_string()))?;
    KnotDiagram::new(crossings)
}

impl KnotDiagram {
    pub fn new(crossings: Vec<[i64; 4]>) -> Result<Self, KnotError> {
        if crossings.is_empty() {
            return Err(KnotError::MalformedPd("the construction needs at least one crossing".into()));
        }
        let mut ends: BTreeMap<i64, Vec<Dart>> = BTreeMap::new();
        for (ci, c) in crossings.iter().enumerate() {
            for (pos, &l) in c.iter().enumerate() {
                ends.entry(l).or_default().push((ci, pos));
            }
        }
        let mut arcs = BTreeMap::new();
        for (l, e) in ends {
            if e.len() != 2 {
                return Err(KnotError::MalformedPd(format!("arc {l} appears {} times", e.len())));
            }
            arcs.insert(l, [e[0], e[1]]);
        }
        let n = crossings.len();
        let mut diagram = KnotDiagram { crossings, arcs, dir: BTreeMap::new(), components: 0 };
        diagram.check_planar()?;
        diagram.orient()?;
        diagram.components = diagram.count_components();
        debug_assert!(n > 0);
        Ok(diagram)
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn crossings(&self) -> &[[i64; 4]] {
        &self.crossings
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// Link components.
    pub fn components(&self) -> usize {
        self.components
    }

    fn mate(&self, d: Dart) -> Dart {
        let [a, b] = self.arcs[&self.crossings[d.0][d.1]];
        if a == d {
            b
        } else {
            a
        }
    }

    fn check_planar(&self) -> Result<(), KnotError> {
        let n = self.crossings.len();
        let m = 4 * n;
        let mut p: Vec<usize> = (0..m).collect();
        for ci in 0..n {
            for pos in 1..4 {
                let (a, b) = (find(&mut p, 4 * ci), find(&mut p, 4 * ci + pos));
                p[a] = b;
            }
        }
        for [a, b] in self.arcs.values() {
            let (x, y) = (find(&mut p, dart_index(*a)), find(&mut p, dart_index(*b)));
            p[x] = y;
        }
        let components = (0..m).filter(|&x| find(&mut p, x) == x).count();
        // faces are the cycles of "rotate counterclockwise after crossing the arc"
        let mut seen = vec![false; m];
        let mut faces = 0i64;
        for start in 0..m {
            if seen[start] {
                continue;
            }
            faces += 1;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                let (ci, pos) = self.mate((x / 4, x % 4));
                x = 4 * ci + (pos + 1) % 4;
            }
        }
        let chi = n as i64 - 2 * n as i64 + faces;
        if chi != 2 * components as i64 {
            return Err(KnotError::NonPlanar { chi, components });
        }
        Ok(())
    }

    fn set(&mut self, d: Dart, dir: Dir, changed: &mut bool) -> Result<(), KnotError> {
        match self.dir.get(&d) {
            Some(&old) if old != dir => {
                Err(KnotError::MalformedPd(format!("inconsistent strand orientation at crossing {}", d.0)))
            }
            Some(_) => Ok(()),
            None => {
                self.dir.insert(d, dir);
                *changed = true;
                Ok(())
            }
        }
    }

    /// Under-strands enter at position 0; over-strands take the direction
    /// propagated along the arcs, and a component running only over gets
    /// position 1 as its entry.
    fn orient(&mut self) -> Result<(), KnotError> {
        let n = self.crossings.len();
        let mut changed = false;
        for ci in 0..n {
            self.set((ci, 0), Dir::In, &mut changed)?;
            self.set((ci, 2), Dir::Out, &mut changed)?;
        }
        loop {
            changed = true;
            while changed {
                changed = false;
                let arcs: Vec<[Dart; 2]> = self.arcs.values().copied().collect();
                for [a, b] in arcs {
                    for (x, y) in [(a, b), (b, a)] {
                        if let Some(&dx) = self.dir.get(&x) {
                            self.set(y, dx.flip(), &mut changed)?;
                        }
                    }
                }
                for ci in 0..n {
                    for (x, y) in [(1, 3), (3, 1)] {
                        if let Some(&dx) = self.dir.get(&(ci, x)) {
                            self.set((ci, y), dx.flip(), &mut changed)?;
                        }
                    }
                }
            }
            match (0..n).find(|&ci| !self.dir.contains_key(&(ci, 1))) {
                Some(ci) => {
                    self.set((ci, 1), Dir::In, &mut changed)?;
                    self.set((ci, 3), Dir::Out, &mut changed)?;
                }
                None => return Ok(()),
            }
        }
    }

    fn count_components(&self) -> usize {
        let n = self.crossings.len();
        let mut p: Vec<usize> = (0..4 * n).collect();
        for ci in 0..n {
            for (x, y) in [(0, 2), (1, 3)] {
                let (a, b) = (find(&mut p, 4 * ci + x), find(&mut p, 4 * ci + y));
                p[a] = b;
            }
        }
        for [a, b] in self.arcs.values() {
            let (x, y) = (find(&mut p, dart_index(*a)), find(&mut p, dart_index(*b)));
            p[x] = y;
        }
        (0..4 * n).filter(|&x| find(&mut p, x) == x).count()
    }

    fn over_enters_at_one(&self, ci: usize) -> bool {
        self.dir[&(ci, 1)] == Dir::In
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KnotMode {
    /// Color-3 tunnels as double color-3 edges.
    #[default]
    Simplified,
    /// An explicit four-vertex ball per arc.
    Raw,
}

impl std::str::FromStr for KnotMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "simplified" => Ok(KnotMode::Simplified),
            "raw" => Ok(KnotMode::Raw),
            other => Err(format!("unknown mode {other:?}, expected raw or simplified")),
        }
    }
}

const CORNERS: [(&str, Parity, f64, f64); 4] = [
    ("eL", Parity::White, -2.0, 1.0),
    ("eR", Parity::Black, -2.0, -1.0),
    ("xL", Parity::Black, 2.0, 1.0),
    ("xR", Parity::White, 2.0, -1.0),
];

/// Vertex id of a band corner: 8 per crossing, under band first.
fn corner_id(ci: usize, over: bool, corner: usize) -> usize {
    8 * ci + if over { 4 } else { 0 } + corner
}

struct Builder {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl Builder {
    fn vertex(&mut self, id: usize, parity: Parity) {
        self.vertices.push(Vertex { id, parity });
    }

    fn parity(&self, id: usize) -> Parity {
        self.vertices.iter().find(|v| v.id == id).expect("declared vertex").parity
    }

    fn edge(&mut self, a: usize, b: usize, color: usize) {
        let (white, black) = if self.parity(a) == Parity::White { (a, b) } else { (b, a) };
        self.edges.push(Edge { white, black, color });
    }
}

/// The crossing-band construction; `8n` vertices in simplified mode.
pub fn knot_to_gem(diagram: &KnotDiagram, mode: KnotMode) -> Result<ColoredGraph, KnotError> {
    let n = diagram.crossing_count();
    let mut b = Builder { vertices: Vec::new(), edges: Vec::new() };
    for ci in 0..n {
        for over in [false, true] {
            for (k, &(_, parity, _, _)) in CORNERS.iter().enumerate() {
                b.vertex(corner_id(ci, over, k), parity);
            }
        }
    }
    let (el, er, xl, xr) = (0, 1, 2, 3);
    for ci in 0..n {
        let u = |k| corner_id(ci, false, k);
        let o = |k| corner_id(ci, true, k);
        // under band: color 2 along the strand, color 1 across; swapped on the over band
        for (f, along, across) in [(&u as &dyn Fn(usize) -> usize, 2, 1), (&o, 1, 2)] {
            b.edge(f(el), f(xl), along);
            b.edge(f(er), f(xr), along);
            b.edge(f(el), f(er), across);
            b.edge(f(xl), f(xr), across);
        }
        // color 0 from the counterclockwise order of the eight corners
        let over_dir = if diagram.over_enters_at_one(ci) { (0.0, 1.0) } else { (0.0, -1.0) };
        let mut pts: Vec<(f64, bool, usize)> = Vec::new();
        for (over, t) in [(false, (1.0, 0.0)), (true, over_dir)] {
            let nrm = (-t.1, t.0);
            for (k, &(_, _, along, across)) in CORNERS.iter().enumerate() {
                let (x, y) = (along * t.0 + across * nrm.0, along * t.1 + across * nrm.1);
                pts.push((f64::atan2(y, x).rem_euclid(std::f64::consts::TAU), over, k));
            }
        }
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite angle"));
        let m = pts.len();
        for i in 0..m {
            let (a, c) = (pts[i], pts[(i + 1) % m]);
            let same_letter = CORNERS[a.2].0.as_bytes()[0] == CORNERS[c.2].0.as_bytes()[0];
            if a.1 == c.1 && same_letter {
                let next = pts[(i + 2) % m];
                b.edge(corner_id(ci, c.1, c.2), corner_id(ci, next.1, next.2), 0);
            }
        }
    }
    for (arc_index, [p, q]) in diagram.arcs.values().enumerate() {
        let (out, inn) = if diagram.dir[p] == Dir::Out { (*p, *q) } else { (*q, *p) };
        let exit_over = out.1 != 2;
        let entry_over = inn.1 != 0;
        let (x_l, x_r) = (corner_id(out.0, exit_over, xl), corner_id(out.0, exit_over, xr));
        let (e_l, e_r) = (corner_id(inn.0, entry_over, el), corner_id(inn.0, entry_over, er));
        match mode {
            KnotMode::Simplified => {
                b.edge(x_l, e_l, 3);
                b.edge(x_r, e_r, 3);
            }
            KnotMode::Raw => {
                let base = 8 * n + 4 * arc_index;
                let (w1, w2, w3, w4) = (base, base + 1, base + 2, base + 3);
                b.vertex(w1, Parity::White);
                b.vertex(w2, Parity::Black);
                b.vertex(w3, Parity::Black);
                b.vertex(w4, Parity::White);
                b.edge(x_l, w1, 3);
                b.edge(x_r, w2, 3);
                b.edge(e_l, w3, 3);
                b.edge(e_r, w4, 3);
                // contracting the {0, 2} pair w1-w3 recovers the simplified tunnel
                for c in [0, 2] {
                    b.edge(w1, w3, c);
                    b.edge(w4, w2, c);
                }
                b.edge(w1, w2, 1);
                b.edge(w4, w3, 1);
            }
        }
    }
    let g = ColoredGraph::build(3, &b.vertices, &b.edges, &[])
        .map_err(|e| KnotError::AlgorithmAssertion(format!("wiring is not a valid graph: {e}")))?;
    validate(diagram, mode, &g)?;
    Ok(g)
}

fn validate(diagram: &KnotDiagram, mode: KnotMode, g: &ColoredGraph) -> Result<(), KnotError> {
    let n = diagram.crossing_count();
    let expected = match mode {
        KnotMode::Simplified => 8 * n,
        KnotMode::Raw => 16 * n,
    };
    if g.vertex_count() != expected {
        return Err(KnotError::AlgorithmAssertion(format!("{} vertices, expected {expected}", g.vertex_count())));
    }
    if !g.is_connected() {
        return Err(KnotError::AlgorithmAssertion("graph is not connected".into()));
    }
    let genera = three_bubble_genera(g)?;
    let tori = genera.iter().filter(|(_, genus)| *genus == 1).count();
    if tori != diagram.components() || genera.iter().any(|(_, genus)| *genus > 1) {
        return Err(KnotError::AlgorithmAssertion(format!(
            "{tori} genus-1 bubbles for {} components",
            diagram.components()
        )));
    }
    if mode == KnotMode::Simplified && bubbles(g, &[0, 1, 2]).len() != n {
        return Err(KnotError::AlgorithmAssertion("color-3 bubble count differs from n".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BubbleSummary {
    pub colors: Vec<usize>,
    pub vertices: usize,
    pub genus: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KnotReport {
    pub crossings: usize,
    pub components: usize,
    pub mode: KnotMode,
    pub vertices: usize,
    pub omega: u64,
    pub bound: u64,
    /// Bubbles on colors {0, 1, 2}.
    pub color3_bubbles: usize,
    pub nonplanar_bubbles: Vec<BubbleSummary>,
}

/// Degree against `3(n + 1)`.
pub fn knot_degree_bound(diagram: &KnotDiagram, g: &ColoredGraph) -> Result<(u64, u64), KnotError> {
    let omega = gem_degree(g)?;
    let bound = 3 * diagram.crossing_count() as u64 + 3;
    if omega > bound {
        return Err(KnotError::AlgorithmAssertion(format!("degree {omega} exceeds {bound}")));
    }
    Ok((omega, bound))
}

pub fn knot_report(diagram: &KnotDiagram, mode: KnotMode) -> Result<(ColoredGraph, KnotReport), KnotError> {
    let g = knot_to_gem(diagram, mode)?;
    let (omega, bound) = match mode {
        KnotMode::Simplified => knot_degree_bound(diagram, &g)?,
        KnotMode::Raw => (gem_degree(&g)?, 3 * diagram.crossing_count() as u64 + 3),
    };
    let nonplanar_bubbles = three_bubble_genera(&g)?
        .into_iter()
        .filter(|(_, genus)| *genus > 0)
        .map(|(b, genus)| BubbleSummary { colors: b.colors, vertices: b.vertices.len(), genus })
        .collect();
    let report = KnotReport {
        crossings: diagram.crossing_count(),
        components: diagram.components(),
        mode,
        vertices: g.vertex_count(),
        omega,
        bound,
        color3_bubbles: bubbles(&g, &[0, 1, 2]).len(),
        nonplanar_bubbles,
    };
    Ok((g, report))
}

/// Contracts every tunnel ball of a raw-mode graph and compares the result
/// edge by edge with the simplified construction.
pub fn raw_matches_simplified(diagram: &KnotDiagram) -> Result<bool, KnotError> {
    let n = diagram.crossing_count();
    let mut g = knot_to_gem(diagram, KnotMode::Raw)?;
    for arc in 0..diagram.arc_count() {
        let base = 8 * n + 4 * arc;
        g = contract_dipole(&g, &Dipole { white: base, black: base + 2, colors: vec![0, 2] })?;
        g = contract_dipole(&g, &Dipole { white: base + 3, black: base + 1, colors: vec![0, 1, 2] })?;
    }
    let simplified = knot_to_gem(diagram, KnotMode::Simplified)?;
    let key = |g: &ColoredGraph| {
        let mut e: Vec<(usize, usize, usize)> =
            g.edges().into_iter().map(|e| (e.white, e.black, e.color)).collect();
        e.sort_unstable();
        e
    };
    Ok(key(&g) == key(&simplified))
}

pub const TREFOIL: &str = "[[1,4,2,5],[3,6,4,1],[5,2,6,3]]";
pub const FIGURE_EIGHT: &str = "[[4,2,5,1],[8,6,1,5],[6,3,7,4],[2,7,3,8]]";
pub const HOPF: &str = "[[4,1,3,2],[2,3,1,4]]";
pub const KINK: &str = "[[1,2,2,1]]";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gem_core::find_dipoles;

    #[test]
    fn parse_and_count() {
        assert_eq!(parse_pd(TREFOIL).unwrap().crossing_count(), 3);
        assert_eq!(parse_pd(KINK).unwrap().crossing_count(), 1);
        assert!(matches!(parse_pd("[[1,2,3,1]]"), Err(KnotError::MalformedPd(_))));
        assert!(matches!(parse_pd("[]"), Err(KnotError::MalformedPd(_))));
        assert!(matches!(parse_pd("not a code"), Err(KnotError::MalformedPd(_))));
        assert_eq!(parse_pd(HOPF).unwrap().components(), 2);
    }

    #[test]
    fn nonplanar_code_is_rejected() {
        // two crossings whose arcs pair up with the wrong cyclic order
        let err = parse_pd("[[1,2,3,4],[1,3,2,4]]").unwrap_err();
        assert!(matches!(err, KnotError::NonPlanar { .. } | KnotError::MalformedPd(_)), "{err:?}");
    }

    #[test]
    fn trefoil_and_figure_eight() {
        for (code, verts, omega, bound) in [(TREFOIL, 24, 10, 12), (FIGURE_EIGHT, 32, 13, 15)] {
            let d = parse_pd(code).unwrap();
            let (g, r) = knot_report(&d, KnotMode::Simplified).unwrap();
            assert_eq!(g.vertex_count(), verts);
            assert_eq!((r.omega, r.bound), (omega, bound));
            assert_eq!(r.nonplanar_bubbles.len(), 1);
            assert_eq!(r.nonplanar_bubbles[0].colors, vec![1, 2, 3]);
            assert_eq!(r.color3_bubbles, d.crossing_count());
        }
    }

    #[test]
    fn kink_and_hopf() {
        let (g, r) = knot_report(&parse_pd(KINK).unwrap(), KnotMode::Simplified).unwrap();
        assert_eq!((g.vertex_count(), r.omega), (8, 4));
        let (_, r) = knot_report(&parse_pd(HOPF).unwrap(), KnotMode::Simplified).unwrap();
        assert_eq!(r.nonplanar_bubbles.len(), 2);
    }

    #[test]
    fn raw_mode() {
        let d = parse_pd(TREFOIL).unwrap();
        let (g, r) = knot_report(&d, KnotMode::Raw).unwrap();
        assert_eq!(g.vertex_count(), 48);
        assert_eq!(r.nonplanar_bubbles.len(), 1);
        assert_eq!(r.color3_bubbles, 3 * d.crossing_count());
        for code in [TREFOIL, FIGURE_EIGHT, HOPF, KINK] {
            assert!(raw_matches_simplified(&parse_pd(code).unwrap()).unwrap(), "{code}");
        }
    }

    #[test]
    fn torus_survives_one_dipoles() {
        for mode in [KnotMode::Raw, KnotMode::Simplified] {
            for pick in 0..5 {
                let d = parse_pd(FIGURE_EIGHT).unwrap();
                let mut g = knot_to_gem(&d, mode).unwrap();
                let mut steps = 0;
                loop {
                    let dips = find_dipoles(&g, 1).unwrap();
                    if dips.is_empty() {
                        break;
                    }
                    g = contract_dipole(&g, &dips[(pick * 7 + steps) % dips.len()]).unwrap();
                    steps += 1;
                    let tori: Vec<u64> =
                        three_bubble_genera(&g).unwrap().into_iter().map(|(_, genus)| genus).filter(|&x| x > 0).collect();
                    assert_eq!(tori, vec![1], "{mode:?} after {steps} contractions");
                }
                assert!(steps > 0);
            }
        }
    }
}
