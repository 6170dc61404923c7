//! The acceptance suite behind `tenscomb verify`.
//!
//! Every criterion returns a pass flag and a JSON detail object. Details hold
//! no timings, so a fixed seed gives byte-identical reports.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::gaussian_oracle::{
    expansion_closed_form, hermite_basis, hermite_relation_quadrature, index_sum_moment, matrix_gaussian_moment_poly,
    monomial_expansion, order_two_invariant, perturbative_two_point, quartic_melonic, recombine, tensor_gaussian_moment,
    Convention, LaurentPoly, MomentRequest, HERMITE_DEGREE_LIMIT,
};
use crate::gem_core::{
    create_dipole, elementary_melon, enumerate_closed, enumerate_jackets, gem_degree, random_closed, ColoredGraph,
};
use crate::knot_gem::{knot_report, parse_pd, KnotMode, FIGURE_EIGHT, TREFOIL};
use crate::loop_solver::{
    branch_point_values, disc_residual, divergence_slopes, half_tail_by_contour, half_tail_coefficient, omega1_d6,
    SpectralFrame,
};
use crate::melonic_series::{
    catalan, exponent_estimate, fuss_catalan, melonic_critical, rat, series_fixed_point, tree_function_exact,
    FixedPointEquation,
};
use crate::mo_graphs::{
    double_tadpole, elementary_melon_mo, enumerate_mo_graphs, is_mo_bipartite, mo_degree, twisted_sunshine,
};
use crate::report::{float_value, rational_value};
use crate::scaling_limits::{
    cherry_amplitude, cherry_limit, cherry_sum_limit, covariance_operator, double_scaled_two_point, lo_observables,
    map_n_exponent, nnlo_closed_form, nnlo_two_point_d3, prune_map, random_map, reduce_map, rescaled_z, x_critical,
    SaddleContext,
};

pub const CRITERIA: usize = 17;
const TIME_BUDGET: Duration = Duration::from_secs(600);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: Value,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!("criterion {:>2} {:<22} {}", self.id, self.name, if self.passed { "PASS" } else { "FAIL" })
    }
}

pub fn criterion_name(id: usize) -> &'static str {
    match id {
        1 => "fuss-catalan",
        2 => "critical-data",
        3 => "susceptibility",
        4 => "degrees",
        5 => "face-identity",
        6 => "mo-degrees",
        7 => "gaussian-oracle",
        8 => "perturbative-lo",
        9 => "saddle-identities",
        10 => "covariance",
        11 => "double-scaling",
        12 => "map-routes",
        13 => "hermite",
        14 => "loop-equations",
        15 => "nnlo-routes",
        16 => "knots",
        17 => "runtime-determinism",
        _ => "unknown",
    }
}

/// Parses `all` or a comma-separated list of criterion numbers.
pub fn parse_suite(spec: &str) -> Result<Vec<usize>, Error> {
    if spec == "all" {
        return Ok((1..=CRITERIA).collect());
    }
    let mut ids = Vec::new();
    for part in spec.split(',') {
        let id: usize = part
            .trim()
            .parse()
            .map_err(|_| Error::Usage(format!("suite entry {part:?} is neither `all` nor a criterion number")))?;
        if !(1..=CRITERIA).contains(&id) {
            return Err(Error::Usage(format!("criterion {id} outside 1..={CRITERIA}")));
        }
        if !ids.contains(&id) {
            ids.push(id);
        }
    }
    ids.sort_unstable();
    Ok(ids)
}

/// Worker count from `TENSCOMB_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("TENSCOMB_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

pub fn thread_pool() -> Result<rayon::ThreadPool, Error> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Internal(format!("thread pool: {e}")))
}

type Outcome = Result<(bool, Value), String>;

fn guarded(id: usize, f: impl FnOnce() -> Outcome) -> CriterionResult {
    let (passed, detail) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok((p, d))) => (p, d),
        Ok(Err(e)) => (false, json!({"error": e})),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            (false, json!({"panic": msg}))
        }
    };
    CriterionResult { id, name: criterion_name(id), passed, detail }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn run_one(id: usize, seed: u64) -> Outcome {
    match id {
        1 => fuss_catalan_agreement(),
        2 => critical_data(),
        3 => susceptibility(),
        4 => degrees(),
        5 => face_identity(seed),
        6 => mo_degrees(),
        7 => gaussian_oracle(),
        8 => perturbative_lo(),
        9 => saddle_identities(),
        10 => covariance(),
        11 => double_scaling(),
        12 => map_routes(seed),
        13 => hermite(),
        14 => loop_equations(),
        15 => nnlo_routes(),
        16 => knots(),
        _ => Err(format!("no criterion {id}")),
    }
}

pub fn run_criterion(id: usize, seed: u64) -> CriterionResult {
    guarded(id, || run_one(id, seed))
}

/// Runs the selected criteria in parallel; results come back in id order.
/// Criterion 17 times the others and repeats the seeded ones.
pub fn run_suite(ids: &[usize], seed: u64) -> Vec<CriterionResult> {
    let start = Instant::now();
    let work: Vec<usize> = ids.iter().copied().filter(|&i| i != 17).collect();
    let mut out: Vec<CriterionResult> = work.par_iter().map(|&id| run_criterion(id, seed)).collect();
    if ids.contains(&17) {
        let elapsed = start.elapsed();
        out.push(guarded(17, || runtime_determinism(&out, seed, elapsed)));
    }
    out.sort_by_key(|r| r.id);
    out
}

pub fn suite_value(results: &[CriterionResult]) -> Value {
    let failed: Vec<usize> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    json!({
        "passed": failed.is_empty(),
        "failed": failed,
        "criteria": results,
    })
}

fn runtime_determinism(done: &[CriterionResult], seed: u64, elapsed: Duration) -> Outcome {
    // the seeded criteria, run again from scratch
    let mut identical = true;
    for id in [5, 12] {
        let again = run_criterion(id, seed);
        match done.iter().find(|r| r.id == id) {
            Some(first) => identical &= *first == again,
            None => identical &= again == run_criterion(id, seed),
        }
    }
    let in_budget = elapsed < TIME_BUDGET;
    Ok((in_budget && identical, json!({"within_budget": in_budget, "repeat_identical": identical})))
}

// 1
fn fuss_catalan_agreement() -> Outcome {
    let start = Instant::now();
    let mut mismatches = Vec::new();
    for d in 1..=6usize {
        let s = series_fixed_point(&FixedPointEquation::melonic(d), 50).map_err(err)?;
        for p in 0..=50usize {
            if s.coeff(p) != fuss_catalan(d as u64, p as u64) {
                mismatches.push(json!({"d": d, "p": p}));
            }
        }
    }
    let fast = start.elapsed() < Duration::from_secs(5);
    let last: Vec<Value> = (1..=6u64).map(|d| rational_value(&fuss_catalan(d, 50))).collect();
    Ok((mismatches.is_empty() && fast, json!({"mismatches": mismatches, "within_5s": fast, "a_50": last})))
}

// 2
fn critical_data() -> Outcome {
    let mut ok = true;
    let mut rows = Vec::new();
    for d in 1..=6usize {
        let c = melonic_critical(d);
        let di = BigInt::from(d);
        let expect_z = BigRational::new(num_traits::pow(di.clone(), d), num_traits::pow(di.clone() + 1, d + 1));
        let expect_g = BigRational::new(di.clone() + 1, di);
        let fixed = BigRational::one() + &c.z_c * num_traits::pow(c.g_c.clone(), d + 1) == c.g_c;
        ok &= c.z_c == expect_z && c.g_c == expect_g && fixed;
        rows.push(json!({"d": d, "z_c": rational_value(&c.z_c), "g_c": rational_value(&c.g_c), "fixed_point": fixed}));
    }
    Ok((ok, Value::Array(rows)))
}

// 3
fn susceptibility() -> Outcome {
    let s = series_fixed_point(&FixedPointEquation::melonic(3), 400).map_err(err)?;
    let (est, spread) = exponent_estimate(&s, &melonic_critical(3).z_c).map_err(err)?;
    Ok(((est - 0.5).abs() <= 0.05, json!({"estimate": float_value(est), "spread": float_value(spread)})))
}

// 4
fn degrees() -> Outcome {
    let mut ok = true;
    let mut rows = Vec::new();
    for d in 3..=5usize {
        let melon = elementary_melon(d);
        let omega = gem_degree(&melon).map_err(err)?;
        let inserted = create_dipole(&melon, 0, &[0, 1]).map_err(err)?;
        let omega2 = gem_degree(&inserted).map_err(err)?;
        let fact = |n: usize| (1..=n as u64).product::<u64>();
        let expect2 = fact(d - 1) * (d as u64 - 2) / 2;
        let jackets = enumerate_jackets(&melon).map_err(err)?.len() as u64;
        ok &= omega == 0 && omega2 == expect2 && jackets == fact(d) / 2;
        rows.push(json!({"d": d, "melon": omega, "two_dipole": omega2, "expected": expect2, "jackets": jackets}));
    }
    Ok((ok, Value::Array(rows)))
}

/// `(d-1)! (F - d C - p d (d-1)/2) = -2 omega`, with C components.
fn face_identity_holds(g: &ColoredGraph) -> Result<bool, String> {
    let d = g.rank() as i64;
    let p = g.vertex_count() as i64 / 2;
    let f = g.face_count() as i64;
    let omega = gem_degree(g).map_err(err)? as i64;
    let fact: i64 = (1..d).product();
    Ok(fact * (f - d * g.component_count() as i64 - p * d * (d - 1) / 2) == -2 * omega)
}

// 5
fn face_identity(seed: u64) -> Outcome {
    let mut exhaustive = 0usize;
    let mut bad = Vec::new();
    for p in 1..=3 {
        for g in enumerate_closed(3, p) {
            exhaustive += 1;
            if !face_identity_holds(&g)? {
                bad.push(json!({"d": 3, "p": p}));
            }
        }
    }
    let mut rng = seeded(seed, 5);
    let graphs: Vec<ColoredGraph> = (0..200)
        .map(|_| {
            let p = rng.gen_range(1..=6);
            random_closed(&mut rng, 4, p)
        })
        .collect();
    let random_bad = graphs
        .par_iter()
        .map(face_identity_holds)
        .collect::<Result<Vec<bool>, String>>()?
        .iter()
        .filter(|ok| !**ok)
        .count();
    let max_omega = graphs.iter().map(|g| gem_degree(g).unwrap_or(0)).max().unwrap_or(0);
    Ok((
        bad.is_empty() && random_bad == 0,
        json!({"exhaustive_d3": exhaustive, "exhaustive_failures": bad, "random_d4": 200, "random_failures": random_bad, "random_max_degree": max_omega}),
    ))
}

// 6
fn mo_degrees() -> Outcome {
    let half = |n: i64| BigRational::new(BigInt::from(n), BigInt::from(2));
    let fixtures = [
        ("double_tadpole", mo_degree(&double_tadpole()), half(1)),
        ("twisted_sunshine", mo_degree(&twisted_sunshine()), half(4)),
        ("melon", mo_degree(&elementary_melon_mo()), half(0)),
    ];
    let mut ok = fixtures.iter().all(|(_, got, want)| got == want);
    let mut counts = Vec::new();
    for v in 1..=4usize {
        let graphs = enumerate_mo_graphs(v);
        let (faces_bad, parity_bad) = graphs
            .par_iter()
            .map(|g| {
                let w = mo_degree(g);
                let f: usize = g.face_counts().iter().sum();
                let identity = half(3 * v as i64) + BigRational::from_integer(BigInt::from(3)) - &w;
                let faces_bad = usize::from(identity != BigRational::from_integer(BigInt::from(f)));
                let parity_bad = usize::from(!is_mo_bipartite(g) && w < half(1));
                (faces_bad, parity_bad)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        ok &= faces_bad == 0 && parity_bad == 0;
        counts.push(json!({"v": v, "graphs": graphs.len(), "face_failures": faces_bad, "parity_failures": parity_bad}));
    }
    let fx: Vec<Value> = fixtures.iter().map(|(n, got, _)| json!({"graph": n, "degree": rational_value(got)})).collect();
    Ok((ok, json!({"fixtures": fx, "enumeration": counts})))
}

fn poly_of(terms: &[(i64, i64)]) -> LaurentPoly {
    let mut p = LaurentPoly::zero();
    for &(e, c) in terms {
        p.add_term(e, BigRational::from_integer(BigInt::from(c)));
    }
    p
}

// 7
fn gaussian_oracle() -> Outcome {
    let mut ok = true;
    let mut rows = Vec::new();
    for d in 3..=5usize {
        let cases = [
            ("order_two", order_two_invariant(d), poly_of(&[(1, 1)])),
            ("quartic", quartic_melonic(d, 1), poly_of(&[(1, 1), (3 - d as i64, 1)])),
        ];
        for (name, g, expect) in cases {
            let req = MomentRequest { d, n: None, invariants: vec![g.clone()], convention: Convention::Scaled };
            let poly = tensor_gaussian_moment(&req).map_err(err)?.poly;
            let mut sums = Vec::new();
            if d <= 4 {
                for n in 1..=3u64 {
                    let direct = index_sum_moment(&g, n, Convention::Scaled).map_err(err)?;
                    let value = poly.eval(&BigRational::from_integer(BigInt::from(n)));
                    ok &= direct == value;
                    sums.push(rational_value(&direct));
                }
            }
            ok &= poly == expect;
            rows.push(json!({"d": d, "invariant": name, "poly": poly, "index_sums": sums}));
        }
    }
    let tr4 = matrix_gaussian_moment_poly(4).map_err(err)?;
    let mut expect = poly_of(&[(1, 2)]);
    expect.add_term(-1, BigRational::one());
    ok &= tr4 == expect;
    Ok((ok, json!({"tensor": rows, "matrix_tr_m4": tr4})))
}

// 8
fn perturbative_lo() -> Outcome {
    let d = 3usize;
    let coefs = perturbative_two_point(d, 3).map_err(err)?;
    let mut ok = true;
    let mut rows = Vec::new();
    for (k, poly) in coefs.iter().enumerate() {
        let expect = BigRational::from_integer(catalan(k as u64) * num_traits::pow(BigInt::from(-2 * d as i64), k));
        let lead = poly.coeff(0);
        ok &= lead == expect && poly.max_exp().is_none_or(|e| e <= 0);
        rows.push(json!({"k": k, "leading": rational_value(&lead), "full": poly}));
    }
    Ok((ok, Value::Array(rows)))
}

// 9
fn saddle_identities() -> Outcome {
    let d = 3usize;
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let lambda = 10f64.powf(-3.0 + 6.0 * k as f64 / 99.0);
        let ctx = SaddleContext::new(d, lambda).map_err(err)?;
        let g2 = lo_observables(&ctx).g2;
        let r = (g2 - (2.0 - d as f64 * lambda / 4.0 * g2 * g2)).abs() / g2.abs().max(1.0);
        worst = worst.max(r);
    }
    // G2 = 2 T(-d lambda / 2), exact where 1 + 2 d lambda is a square
    let exact = tree_function_exact(&rat(-6, 1)).map_err(err)?.map(|t| t * rat(2, 1));
    let exact_ok = exact == Some(rat(2, 3));
    let float_ok = lo_observables(&SaddleContext::new(3, 4.0).map_err(err)?).g2 == 2.0 / 3.0;
    let small: Vec<f64> = [1e-6, 1e-9, 1e-12]
        .iter()
        .map(|&l| SaddleContext::new(3, l).map(|c| (lo_observables(&c).g2 - 2.0).abs()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let limit_ok = small.windows(2).all(|w| w[1] < w[0]) && small[2] < 1e-10;
    Ok((
        worst < 1e-12 && exact_ok && float_ok && limit_ok,
        json!({
            "grid_points": 100,
            "worst_residual": float_value(worst),
            "g2_3_4": exact.as_ref().map(rational_value),
            "float_g2_3_4_exact": float_ok,
            "small_lambda_gaps": small.iter().map(|&x| float_value(x)).collect::<Vec<_>>(),
        }),
    ))
}

// 10
fn covariance() -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for d in 1..=4usize {
        for n in 1..=4usize {
            for a2 in [-0.1, -1.0, -5.0] {
                let op = covariance_operator(d, n, a2).map_err(err)?;
                worst = worst.max(op.residual);
                let (nf, df) = (n as f64, d as f64);
                let mut expect: Vec<(f64, usize)> = Vec::new();
                for (val, mult) in [(nf * (1.0 - a2), d * n * n - d), (nf, d - 1), (nf * (1.0 - df * a2), 1)] {
                    if mult == 0 {
                        continue;
                    }
                    match expect.iter_mut().find(|(v, _)| (*v - val).abs() < 1e-9) {
                        Some(e) => e.1 += mult,
                        None => expect.push((val, mult)),
                    }
                }
                expect.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
                let got = op.spectrum();
                let same = got.len() == expect.len()
                    && got.iter().zip(&expect).all(|(g, e)| g.1 == e.1 && (g.0 - e.0).abs() < 1e-9 * e.0.abs().max(1.0));
                if op.residual >= 1e-12 || !same {
                    ok = false;
                    bad.push(json!({"d": d, "N": n, "alpha_sq": float_value(a2)}));
                }
            }
        }
    }
    Ok((ok, json!({"cases": 48, "worst_residual": float_value(worst), "failures": bad})))
}

// 11
fn double_scaling() -> Outcome {
    let d = 3usize;
    let n = 1e6;
    let xc = x_critical(d);
    let xs: Vec<f64> = (0..20).map(|i| xc + 0.05 + (1.0 - xc - 0.05) * i as f64 / 19.0).collect();
    let mut worst: f64 = 0.0;
    let mut worst_at = json!(null);
    for l in 1..=4usize {
        for &x in &xs {
            let amp = cherry_amplitude(d, l, rescaled_z(d, x, n), n).map_err(err)?;
            let rel = (n.powf(d as f64 / 2.0 - 1.0) * amp / cherry_limit(d, l, x).map_err(err)? - 1.0).abs();
            if rel > worst {
                worst = rel;
                worst_at = json!({"L": l, "x": float_value(x)});
            }
        }
    }
    let closed = |x: f64| 4.0 * (d as f64).sqrt() * (x.sqrt() - (x - xc).sqrt());
    let mut sum_gap: f64 = 0.0;
    for &x in &xs {
        let s = cherry_sum_limit(d, x, 200).map_err(err)?;
        sum_gap = sum_gap.max((s - closed(x)).abs());
    }
    // square-root branch point: the slope of the closed form blows up like eps^(-1/2)
    let deriv = |x: f64| {
        let h = (x - xc) * 1e-4;
        (closed(x + h) - closed(x - h)) / (2.0 * h)
    };
    let exps: Vec<f64> = [1e-4, 1e-6, 1e-8]
        .windows(2)
        .map(|w| (deriv(xc + w[1]).abs().ln() - deriv(xc + w[0]).abs().ln()) / (w[1].ln() - w[0].ln()))
        .collect();
    let branch = exps.iter().all(|e| (e + 0.5).abs() < 1e-2)
        && double_scaled_two_point(d, xc - 1e-3, n).is_err()
        && double_scaled_two_point(d, xc + 1e-3, n).is_ok();
    let limit_ok = worst <= 0.01;
    Ok((
        limit_ok && sum_gap <= 1e-10 && branch,
        json!({
            "N": float_value(n),
            "worst_relative_gap": float_value(worst),
            "worst_at": worst_at,
            "cherry_sum_gap": float_value(sum_gap),
            "branch_exponents": exps.iter().map(|&e| float_value(e)).collect::<Vec<_>>(),
            "branch_point": branch,
        }),
    ))
}

// 12
fn map_routes(seed: u64) -> Outcome {
    let mut ok = true;
    let mut rows = Vec::new();
    for d in 3..=5usize {
        let mut rng = seeded(seed, 12 + d as u64);
        let (mut agree, mut loops_kept, mut bound_ok, mut max_edges) = (0, 0, 0, 0);
        for _ in 0..100 {
            let m = random_map(&mut rng, d, 8, 20);
            if map_n_exponent(&m, d).is_ok() {
                agree += 1;
            }
            let pruned = prune_map(&m);
            let reduced = reduce_map(&pruned).map_err(err)?;
            let l = m.loops();
            if pruned.loops() == l && reduced.loops() == l {
                loops_kept += 1;
            }
            let e = reduced.edge_count();
            max_edges = max_edges.max(e);
            if (l == 0 && e == 0) || (l > 0 && e < 3 * l) {
                bound_ok += 1;
            }
        }
        ok &= agree == 100 && loops_kept == 100 && bound_ok == 100;
        rows.push(json!({"d": d, "routes_agree": agree, "loops_preserved": loops_kept, "edge_bound": bound_ok, "max_reduced_edges": max_edges}));
    }
    Ok((ok, Value::Array(rows)))
}

// 13
fn hermite() -> Outcome {
    let mut ok = true;
    for n in 0..=HERMITE_DEGREE_LIMIT {
        let c = monomial_expansion(n).map_err(err)?;
        let mut target = vec![BigRational::zero(); n + 1];
        target[n] = BigRational::one();
        ok &= recombine(n, &c).map_err(err)? == target;
        ok &= c.iter().enumerate().all(|(k, ck)| *ck == expansion_closed_form(n, k));
        ok &= hermite_basis(n).map_err(err)?.len() == n + 1;
    }
    let mut quad = Vec::new();
    for p in [1u32, 2] {
        let q = hermite_relation_quadrature(p, 0.5).map_err(err)?;
        ok &= q.discrepancy <= 1e-6;
        quad.push(json!({"p": p, "tensor": float_value(q.lhs.re), "matrix": float_value(q.rhs.re), "gap": float_value(q.discrepancy)}));
    }
    Ok((ok, json!({"max_degree": HERMITE_DEGREE_LIMIT, "quadrature": quad})))
}

// 14
fn loop_equations() -> Outcome {
    let mut disc: f64 = 0.0;
    let mut tail_gap: f64 = 0.0;
    let mut finite = true;
    for a2 in [-0.1, -0.3, -1.0, -3.0] {
        let f = SpectralFrame::from_alpha_sq(a2).map_err(err)?;
        let samples: Vec<Complex64> =
            (0..100).map(|k| Complex64::from_polar(f.a().norm() * (1.2 + 0.05 * k as f64), 0.37 * k as f64)).collect();
        disc = disc.max(disc_residual(&f, &samples).map_err(err)?);
        let al = f.alpha;
        let rederived = 3.0 * al * al * al / ((1.0 - al * al) * (1.0 - 5.0 * al * al));
        let by_contour = half_tail_by_contour(&f, 2.0, 256).map_err(err)?;
        let formula = half_tail_coefficient(&f).map_err(err)?;
        tail_gap = tail_gap.max((by_contour - rederived).norm()).max((formula - rederived).norm());
        for sign in [1.0, -1.0] {
            let (values, limit) = branch_point_values(&f, sign).map_err(err)?;
            finite &= values.iter().all(|v| v.is_finite() && (v - limit).norm() < 1e-3 * limit.norm().max(1.0));
        }
    }
    let f6 = SpectralFrame::from_alpha_sq(-0.2).map_err(err)?;
    let slopes = divergence_slopes(|z| omega1_d6(&f6, z), &[1e-2, 1e-3, 1e-4]).map_err(err)?;
    let slope_ok = slopes.iter().all(|s| (s + 2.0).abs() <= 0.1);
    Ok((
        disc < 1e-12 && tail_gap <= 1e-6 && finite && slope_ok,
        json!({
            "disc_residual": float_value(disc),
            "half_tail_gap": float_value(tail_gap),
            "finite_at_branch_points": finite,
            "d6_slopes": slopes.iter().map(|&s| float_value(s)).collect::<Vec<_>>(),
            "d6_slope_ok": slope_ok,
        }),
    ))
}

// 15
fn nnlo_routes() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_at = 0.0;
    for k in 1..=100 {
        let lambda = k as f64 / 100.0;
        let (a, b) = nnlo_two_point_d3(lambda).map_err(err)?;
        let rel = (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
        if rel > worst {
            worst = rel;
            worst_at = lambda;
        }
    }
    let heads: Vec<f64> = [1e-4, 1e-5, 1e-6]
        .iter()
        .map(|&l| nnlo_closed_form(l).map(|v| v / l))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let head_ok = (heads[2] + 1.8).abs() < 1e-4;
    Ok((
        worst <= 1e-12 && head_ok,
        json!({
            "worst_relative_gap": float_value(worst),
            "worst_lambda": float_value(worst_at),
            "taylor_head": heads.iter().map(|&h| float_value(h)).collect::<Vec<_>>(),
            "taylor_head_ok": head_ok,
        }),
    ))
}

// 16
fn knots() -> Outcome {
    let mut ok = true;
    let mut rows = Vec::new();
    for (name, code, vertices) in [("trefoil", TREFOIL, 24), ("figure_eight", FIGURE_EIGHT, 32)] {
        let diagram = parse_pd(code).map_err(err)?;
        let (_, r) = knot_report(&diagram, KnotMode::Simplified).map_err(err)?;
        let genus_one = r.nonplanar_bubbles.iter().filter(|b| b.genus == 1).count();
        ok &= r.vertices == vertices
            && genus_one == 1
            && r.nonplanar_bubbles.len() == 1
            && r.omega <= 3 * (r.crossings as u64 + 1);
        rows.push(json!({"knot": name, "vertices": r.vertices, "omega": r.omega, "bound": r.bound, "genus_one_bubbles": genus_one}));
    }
    Ok((ok, Value::Array(rows)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_parsing() {
        assert_eq!(parse_suite("all").unwrap().len(), CRITERIA);
        assert_eq!(parse_suite("3,1,3").unwrap(), vec![1, 3]);
        assert!(parse_suite("0").is_err());
        assert!(parse_suite("x").is_err());
    }

    #[test]
    fn panics_become_failures() {
        let r = guarded(1, || panic!("boom"));
        assert!(!r.passed);
        assert_eq!(r.detail["panic"], "boom");
    }
}
