//! Argument handling and dispatch for the `tenscomb` binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::Error;
use crate::gaussian_oracle::{
    expansion_closed_form, hermite_basis, hermite_relation_quadrature, matrix_gaussian_moment_poly, monomial_expansion,
    order_two_invariant, perturbative_two_point, quarter_inverse_is_consistent, quartic_melonic, tensor_gaussian_moment,
    Convention, MomentRequest,
};
use crate::gem_core::json::{parse_graph, GraphJson};
use crate::gem_core::{
    amplitude_exponent, bubbles, elementary_melon, enumerate_jackets, find_dipoles, gem_degree, is_manifold_3d,
    is_melonic, jacket_genus, random_closed, three_bubble_genera, ColoredGraph,
};
use crate::knot_gem::{knot_report, parse_pd, KnotMode};
use crate::loop_solver::{
    branch_point_values, cylinder_coefficient, divergence_slopes, half_tail_by_contour, half_tail_coefficient,
    omega1_d6, omega_half_d3, omega_half_d3_direct, omega_half_d3_simplified, resolvent_half_d3, resolvent_lo,
    disc_equation, SpectralFrame,
};
use crate::melonic_series::{
    exponent_estimate, fuss_catalan, melonic_critical, mo_nlo_gf, nlo_gf, one_pi_relation, series_fixed_point,
    tree_function, tree_function_exact, FixedPointEquation, PowerSeries, MIN_COEFFICIENTS,
};
use crate::mo_graphs::{
    double_tadpole, elementary_melon_mo, enumerate_mo_graphs, is_mo_bipartite, is_mo_melonic, mo_amplitude_exponent,
    mo_degree, mo_jackets, twisted_sunshine, MoGraph, MoGraphJson,
};
use crate::report::{
    complex_value, csv_table, csv_with_manifest, float_value, json_report, rational_string, rational_value,
    series_value, RunManifest,
};
use crate::scaling_limits::{
    cherry_amplitude, cherry_limit, cherry_sum_limit, covariance_operator, double_scaled_two_point, lo_observables,
    map_n_exponent, nnlo_two_point_d3, prune_map, random_map, reduce_map, rescaled_z, saddle_alpha, x_critical,
    IfMap, IfMapJson, SaddleContext,
};
use crate::verify::{parse_suite, run_suite, suite_value, thread_pool};

#[derive(Debug, Parser)]
#[command(name = "tenscomb", version, about = "Colored tensor model combinatorics and evaluators")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Invariants of an edge-colored graph.
    Graph(Flags),
    /// Multi-orientable stranded graphs.
    Mo(Flags),
    /// Exact melonic power series.
    Series(Flags),
    /// Gaussian moments by exhaustive Wick pairing.
    Oracle(Flags),
    /// Saddle point, covariance and double-scaling evaluators.
    Scaling(Flags),
    /// Resolvents of the intermediate-field matrix model.
    Loop(Flags),
    /// Knot-complement triangulations from PD codes.
    Knot(Flags),
    /// The acceptance suite.
    Verify(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
struct Flags {
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long = "N", allow_hyphen_values = true)]
    n: Option<String>,
    #[arg(long = "L")]
    l: Option<usize>,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    what: Option<String>,
    #[arg(long)]
    pd: Option<String>,
    #[arg(long)]
    moment: Option<String>,
    #[arg(long)]
    symbolic: bool,
    #[arg(long)]
    suite: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    at: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(String, String)> {
        let mut v = Vec::new();
        let mut put = |k: &str, val: Option<String>| {
            if let Some(x) = val {
                v.push((k.to_string(), x));
            }
        };
        put("d", self.d.map(|x| x.to_string()));
        put("order", self.order.map(|x| x.to_string()));
        put("lambda", self.lambda.clone());
        put("z", self.z.clone());
        put("x", self.x.clone());
        put("N", self.n.clone());
        put("L", self.l.map(|x| x.to_string()));
        put("in", self.input.as_ref().map(|p| p.display().to_string()));
        put("out", self.out.as_ref().map(|p| p.display().to_string()));
        put("format", Some(if self.format == Format::Csv { "csv" } else { "json" }.to_string()));
        put("mode", self.mode.clone());
        put("what", self.what.clone());
        put("pd", self.pd.clone());
        put("moment", self.moment.clone());
        put("symbolic", self.symbolic.then(|| "true".to_string()));
        put("suite", self.suite.clone());
        put("at", self.at.clone());
        v
    }

    fn what(&self, default: &str) -> String {
        self.what.clone().unwrap_or_else(|| default.to_string())
    }

    fn need_d(&self) -> Result<usize, Error> {
        self.d.ok_or_else(|| Error::Usage("--d is required".into()))
    }

    fn need_order(&self) -> Result<usize, Error> {
        self.order.ok_or_else(|| Error::Usage("--order is required".into()))
    }

    fn real(name: &str, v: &Option<String>) -> Result<Option<Number>, Error> {
        v.as_deref().map(|s| parse_number(s).map_err(|e| Error::Usage(format!("--{name}: {e}")))).transpose()
    }

    fn need_real(name: &str, v: &Option<String>) -> Result<Number, Error> {
        Self::real(name, v)?.ok_or_else(|| Error::Usage(format!("--{name} is required")))
    }
}

/// A parsed numeric flag: its float value and, for decimal or `p/q` input,
/// the exact rational.
#[derive(Debug, Clone, PartialEq)]
pub struct Number {
    pub value: f64,
    pub exact: Option<BigRational>,
}

/// Accepts `p/q`, integers, decimals and exponent notation.
pub fn parse_number(s: &str) -> Result<Number, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let q: BigInt = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        let r = BigRational::new(p, q);
        return Ok(Number { value: r.to_f64().unwrap_or(f64::NAN), exact: Some(r) });
    }
    let value: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if !value.is_finite() {
        return Err(format!("not finite: {s:?}"));
    }
    Ok(Number { value, exact: decimal_rational(s) })
}

fn decimal_rational(s: &str) -> Option<BigRational> {
    let lower = s.to_ascii_lowercase();
    let (mant, exp) = match lower.split_once('e') {
        Some((m, e)) => (m.to_string(), e.parse::<i32>().ok()?),
        None => (lower.clone(), 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m.to_string()),
        None => (false, mant.trim_start_matches('+').to_string()),
    };
    let (int_part, frac) = mant.split_once('.').unwrap_or((&mant, ""));
    let digits = format!("{int_part}{frac}");
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || exp.unsigned_abs() > 400 {
        return None;
    }
    let mut r = BigRational::from_integer(digits.parse().ok()?);
    let scale = exp - frac.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let p = num_traits::pow(ten, scale.unsigned_abs() as usize);
    r = if scale >= 0 { r * p } else { r / p };
    Some(if neg { -r } else { r })
}

/// `re` or `re,im`.
fn parse_complex(s: &str) -> Result<Complex64, Error> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |p: &str| parse_number(p).map(|n| n.value).map_err(|e| Error::Usage(format!("--at: {e}")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(Error::Usage(format!("--at expects `re` or `re,im`, got {s:?}"))),
    }
}

/// What the binary prints and the exit code it returns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

enum Body {
    Json(Value),
    Csv(String),
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn run<I, T>(argv: I) -> Result<Output, Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand) {
                return Ok(Output { stdout: e.to_string(), stderr: String::new(), code: 0 });
            }
            let text = e.to_string();
            return Err(Error::Usage(text.trim_start_matches("error: ").trim_end().to_string()));
        }
    };
    let (name, flags) = match &cli.cmd {
        Command::Graph(f) => ("graph", f),
        Command::Mo(f) => ("mo", f),
        Command::Series(f) => ("series", f),
        Command::Oracle(f) => ("oracle", f),
        Command::Scaling(f) => ("scaling", f),
        Command::Loop(f) => ("loop", f),
        Command::Knot(f) => ("knot", f),
        Command::Verify(f) => ("verify", f),
    };
    if flags.format == Format::Csv && !matches!(name, "series" | "verify") {
        return Err(Error::Usage("--format csv is only available for series tables and verify".into()));
    }
    let manifest = RunManifest { subcommand: name.to_string(), flags: flags.pairs(), seed: flags.seed };
    let mut stderr = String::new();
    let mut code = 0;
    let body = match &cli.cmd {
        Command::Graph(f) => Body::Json(graph_cmd(f)?),
        Command::Mo(f) => Body::Json(mo_cmd(f)?),
        Command::Series(f) => series_cmd(f)?,
        Command::Oracle(f) => Body::Json(oracle_cmd(f)?),
        Command::Scaling(f) => Body::Json(scaling_cmd(f)?),
        Command::Loop(f) => Body::Json(loop_cmd(f)?),
        Command::Knot(f) => Body::Json(knot_cmd(f)?),
        Command::Verify(f) => {
            let ids = parse_suite(f.suite.as_deref().unwrap_or("all"))?;
            let results = thread_pool()?.install(|| run_suite(&ids, f.seed));
            for r in &results {
                stderr.push_str(&r.line());
                stderr.push('\n');
            }
            if results.iter().any(|r| !r.passed) {
                code = crate::ErrorKind::Domain.exit_code();
            }
            match f.format {
                Format::Json => Body::Json(suite_value(&results)),
                Format::Csv => {
                    let rows: Vec<Vec<String>> = results
                        .iter()
                        .map(|r| vec![r.id.to_string(), r.name.to_string(), if r.passed { "pass" } else { "fail" }.into()])
                        .collect();
                    Body::Csv(csv_table(&["criterion", "name", "status"], &rows).map_err(|e| Error::Internal(e.to_string()))?)
                }
            }
        }
    };
    let text = match body {
        Body::Json(v) => json_report(&manifest, v),
        Body::Csv(s) => csv_with_manifest(&manifest, &s),
    };
    match &flags.out {
        Some(path) => {
            std::fs::write(path, &text)?;
            Ok(Output { stdout: String::new(), stderr, code })
        }
        None => Ok(Output { stdout: text, stderr, code }),
    }
}

fn read_input(f: &Flags) -> Result<Option<String>, Error> {
    f.input.as_ref().map(std::fs::read_to_string).transpose().map_err(Error::from)
}

/// A graph file, or a report whose result carries a `graph` field.
fn load_graph_json(text: &str) -> Result<GraphJson, Error> {
    let v: Value = serde_json::from_str(text)?;
    let inner = v.get("result").and_then(|r| r.get("graph")).cloned().unwrap_or(v);
    Ok(parse_graph(&inner.to_string())?)
}

fn graph_source(f: &Flags) -> Result<ColoredGraph, Error> {
    if let Some(text) = read_input(f)? {
        return Ok(load_graph_json(&text)?.into_graph()?);
    }
    match f.mode.as_deref() {
        Some("melon") => Ok(elementary_melon(f.need_d()?)),
        Some("random") => {
            let mut rng = ChaCha8Rng::seed_from_u64(f.seed);
            Ok(random_closed(&mut rng, f.need_d()?, f.order.unwrap_or(4)))
        }
        Some(other) => Err(Error::Usage(format!("unknown graph --mode {other:?}, expected melon or random"))),
        None => Err(Error::Usage("graph needs --in FILE or --mode melon|random".into())),
    }
}

fn graph_cmd(f: &Flags) -> Result<Value, Error> {
    let g = graph_source(f)?;
    Ok(match f.what("summary").as_str() {
        "degree" => json!({"omega": gem_degree(&g)?}),
        "jackets" => {
            let js = enumerate_jackets(&g)?;
            let rows: Vec<Value> = js
                .iter()
                .map(|j| Ok(json!({"cycle": j.cycle, "faces": j.faces.len(), "genus": jacket_genus(j)?})))
                .collect::<Result<_, Error>>()?;
            json!({"count": rows.len(), "jackets": rows})
        }
        "bubbles" => {
            if g.rank() == 3 {
                let rows: Vec<Value> = three_bubble_genera(&g)?
                    .into_iter()
                    .map(|(b, genus)| json!({"colors": b.colors, "vertices": b.vertices, "genus": genus}))
                    .collect();
                json!({"bubbles": rows})
            } else {
                let rows: Vec<Value> = (0..=g.rank())
                    .map(|skip| {
                        let colors: Vec<usize> = (0..=g.rank()).filter(|&c| c != skip).collect();
                        let bs = bubbles(&g, &colors);
                        json!({"colors": colors, "count": bs.len(), "sizes": bs.iter().map(|b| b.vertices.len()).collect::<Vec<_>>()})
                    })
                    .collect();
                json!({"bubbles": rows})
            }
        }
        "exponent" => json!({"exponent": amplitude_exponent(&g)?}),
        "melonic" => json!({"melonic": is_melonic(&g)?}),
        "manifold" => json!({"manifold": is_manifold_3d(&g)?}),
        "dipoles" => {
            let k = f.order.unwrap_or(g.rank());
            let rows: Vec<Value> =
                find_dipoles(&g, k)?.into_iter().map(|d| json!({"w": d.white, "b": d.black, "colors": d.colors})).collect();
            json!({"k": k, "dipoles": rows})
        }
        "graph" => json!({"graph": GraphJson::from_graph(&g)}),
        "summary" => json!({
            "d": g.rank(),
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "faces": g.face_count(),
            "connected": g.is_connected(),
            "omega": gem_degree(&g)?,
        }),
        other => return Err(unknown_what(other, "degree, jackets, bubbles, exponent, melonic, manifold, dipoles, graph, summary")),
    })
}

fn unknown_what(got: &str, allowed: &str) -> Error {
    Error::Usage(format!("unknown --what {got:?}; expected one of {allowed}"))
}

fn mo_source(f: &Flags) -> Result<MoGraph, Error> {
    if let Some(text) = read_input(f)? {
        let j: MoGraphJson = serde_json::from_str(&text)?;
        return Ok(MoGraph::from_json(j)?);
    }
    match f.mode.as_deref() {
        Some("tadpole") => Ok(double_tadpole()),
        Some("melon") => Ok(elementary_melon_mo()),
        Some("sunshine") => Ok(twisted_sunshine()),
        Some(other) => Err(Error::Usage(format!("unknown mo --mode {other:?}, expected tadpole, melon or sunshine"))),
        None => Err(Error::Usage("mo needs --in FILE or --mode tadpole|melon|sunshine".into())),
    }
}

fn mo_cmd(f: &Flags) -> Result<Value, Error> {
    let what = f.what("degree");
    if what == "enumerate" {
        let v = f.need_order()?;
        if v == 0 || v > 4 {
            return Err(Error::Usage("--order (vertex count) must be in 1..=4".into()));
        }
        let graphs = enumerate_mo_graphs(v);
        let mut hist: std::collections::BTreeMap<BigRational, usize> = Default::default();
        for g in &graphs {
            *hist.entry(mo_degree(g)).or_default() += 1;
        }
        let rows: Vec<Value> = hist.iter().map(|(w, n)| json!({"degree": rational_value(w), "count": n})).collect();
        return Ok(json!({"vertices": v, "graphs": graphs.len(), "degrees": rows}));
    }
    let g = mo_source(f)?;
    Ok(match what.as_str() {
        "degree" => json!({"degree": rational_value(&mo_degree(&g))}),
        "jackets" => {
            let rows: Vec<Value> = mo_jackets(&g)
                .iter()
                .map(|j| json!({"excluded": j.excluded, "faces": j.faces.values().collect::<Vec<_>>(), "orientable": j.orientable, "k": j.k}))
                .collect();
            json!({"jackets": rows})
        }
        "exponent" => json!({"exponent": rational_value(&mo_amplitude_exponent(&g)?)}),
        "melonic" => json!({"melonic": is_mo_melonic(&g)?}),
        "bipartite" => json!({"bipartite": is_mo_bipartite(&g)}),
        "graph" => json!({"graph": g.to_json()}),
        other => return Err(unknown_what(other, "degree, jackets, exponent, melonic, bipartite, graph, enumerate")),
    })
}

fn series_table(header: &[&str], columns: &[&PowerSeries]) -> Result<Body, Error> {
    let n = columns.iter().map(|s| s.coeffs().len()).max().unwrap_or(0);
    let rows: Vec<Vec<String>> = (0..n)
        .map(|p| {
            let mut r = vec![p.to_string()];
            r.extend(columns.iter().map(|s| rational_string(&s.coeff(p))));
            r
        })
        .collect();
    csv_table(header, &rows).map(Body::Csv).map_err(|e| Error::Internal(e.to_string()))
}

fn series_cmd(f: &Flags) -> Result<Body, Error> {
    let csv = f.format == Format::Csv;
    let what = f.what("melonic");
    match what.as_str() {
        "melonic" => {
            let (d, order) = (f.need_d()?, f.need_order()?);
            let s = series_fixed_point(&FixedPointEquation::melonic(d), order)?;
            for (p, c) in s.coeffs().iter().enumerate() {
                if *c != fuss_catalan(d as u64, p as u64) {
                    return Err(Error::Internal(format!("fixed point and closed form differ at p = {p}")));
                }
            }
            if csv {
                return series_table(&["p", "coefficient"], &[&s]);
            }
            Ok(Body::Json(json!({"d": d, "order": order, "coefficients": series_value(&s)})))
        }
        "critical" => {
            let d = f.need_d()?;
            let c = melonic_critical(d);
            let mut v = json!({"d": d, "z_c": rational_value(&c.z_c), "g_c": rational_value(&c.g_c)});
            if let Some(order) = f.order.filter(|&o| o >= MIN_COEFFICIENTS) {
                let s = series_fixed_point(&FixedPointEquation::melonic(d), order)?;
                let (est, spread) = exponent_estimate(&s, &c.z_c)?;
                v["exponent"] = json!({"estimate": float_value(est), "spread": float_value(spread)});
            }
            Ok(Body::Json(v))
        }
        "exponent" => {
            let (d, order) = (f.need_d()?, f.need_order()?);
            let s = series_fixed_point(&FixedPointEquation::melonic(d), order)?;
            let (est, spread) = exponent_estimate(&s, &melonic_critical(d).z_c)?;
            Ok(Body::Json(json!({"d": d, "order": order, "estimate": float_value(est), "spread": float_value(spread)})))
        }
        "nlo" => {
            let (d, order) = (f.need_d()?, f.need_order()?);
            let s = nlo_gf(d, order)?;
            if csv {
                return series_table(&["p", "leading", "standard", "variant"], &[&s.leading, &s.standard, &s.variant]);
            }
            Ok(Body::Json(json!({
                "d": d,
                "leading": series_value(&s.leading),
                "standard": series_value(&s.standard),
                "variant": series_value(&s.variant),
                "standard_denominator_at_critical": rational_value(&s.standard_denominator_at_critical),
                "variant_denominator_at_critical": rational_value(&s.variant_denominator_at_critical),
                "g0_minus_two_at_critical": rational_value(&s.g0_minus_two_at_critical),
            })))
        }
        "mo-nlo" => {
            let s = mo_nlo_gf(f.need_order()?)?;
            if csv {
                return series_table(&["p", "leading", "half"], &[&s.leading, &s.half]);
            }
            Ok(Body::Json(json!({
                "leading": series_value(&s.leading),
                "half": series_value(&s.half),
                "lambda_c_squared": rational_value(&s.lambda_c_squared),
                "g_c": rational_value(&s.g_c),
                "denominator_at_critical": rational_value(&s.denominator_at_critical),
            })))
        }
        "one-pi" => {
            let (d, order) = (f.need_d()?, f.need_order()?);
            let g = series_fixed_point(&FixedPointEquation::melonic(d), order)?;
            let sigma = one_pi_relation(&g)?;
            if csv {
                return series_table(&["p", "g", "sigma"], &[&g, &sigma]);
            }
            Ok(Body::Json(json!({"d": d, "g": series_value(&g), "sigma": series_value(&sigma)})))
        }
        "tree" => {
            let z = Flags::need_real("z", &f.z)?;
            let exact = match &z.exact {
                Some(r) => tree_function_exact(r)?,
                None => None,
            };
            Ok(Body::Json(json!({
                "z": f.z,
                "value": float_value(tree_function(z.value)?),
                "exact": exact.as_ref().map(rational_value),
            })))
        }
        other => Err(unknown_what(other, "melonic, critical, exponent, nlo, mo-nlo, one-pi, tree")),
    }
}

fn convention(f: &Flags) -> Result<Convention, Error> {
    match f.mode.as_deref() {
        None | Some("scaled") => Ok(Convention::Scaled),
        Some("unit") => Ok(Convention::Unit),
        Some(other) => Err(Error::Usage(format!("unknown oracle --mode {other:?}, expected scaled or unit"))),
    }
}

/// `order2`, `quartic` or `quartic:c`, comma separated.
fn parse_invariants(d: usize, spec: &str) -> Result<Vec<ColoredGraph>, Error> {
    spec.split(',')
        .map(|item| {
            let item = item.trim();
            match item.split_once(':') {
                None if item == "order2" => Ok(order_two_invariant(d)),
                None if item == "quartic" => Ok(quartic_melonic(d, 1)),
                Some(("quartic", c)) => {
                    let c: usize = c.parse().map_err(|_| Error::Usage(format!("bad color in {item:?}")))?;
                    if c == 0 || c > d {
                        return Err(Error::Usage(format!("color {c} outside 1..={d}")));
                    }
                    Ok(quartic_melonic(d, c))
                }
                _ => Err(Error::Usage(format!("unknown invariant {item:?}; use order2, quartic or quartic:c"))),
            }
        })
        .collect()
}

fn oracle_n(f: &Flags) -> Result<Option<u64>, Error> {
    match Flags::real("N", &f.n)? {
        None => Ok(None),
        Some(n) if n.value >= 1.0 && n.value.fract() == 0.0 && n.value <= u64::MAX as f64 => Ok(Some(n.value as u64)),
        Some(_) => Err(Error::Usage("--N must be a positive integer here".into())),
    }
}

fn oracle_cmd(f: &Flags) -> Result<Value, Error> {
    match f.what("moment").as_str() {
        "moment" => {
            let d = f.need_d()?;
            let mut invariants = match &f.moment {
                Some(spec) => parse_invariants(d, spec)?,
                None => Vec::new(),
            };
            if let Some(text) = read_input(f)? {
                invariants.push(load_graph_json(&text)?.into_invariant()?);
            }
            if invariants.is_empty() {
                return Err(Error::Usage("oracle needs --moment SPEC or --in FILE".into()));
            }
            let n = if f.symbolic { None } else { oracle_n(f)? };
            let req = MomentRequest { d, n, invariants, convention: convention(f)? };
            let r = tensor_gaussian_moment(&req)?;
            let mut v = json!({"poly": r.poly});
            if let Some(val) = &r.value {
                v["value"] = rational_value(val);
            }
            if let Some(s) = &r.index_sum {
                v["index_sum"] = rational_value(s);
            }
            Ok(v)
        }
        "matrix" => {
            let p: u32 = f
                .moment
                .as_deref()
                .ok_or_else(|| Error::Usage("--moment P (the power of M) is required".into()))?
                .parse()
                .map_err(|_| Error::Usage("--moment must be a non-negative integer here".into()))?;
            let poly = matrix_gaussian_moment_poly(p)?;
            let mut v = json!({"poly": poly});
            if let (Some(n), false) = (oracle_n(f)?, f.symbolic) {
                v["value"] = rational_value(&poly.eval(&BigRational::from_integer(BigInt::from(n))));
            }
            Ok(v)
        }
        "hermite" => {
            let n = f.need_order()?;
            let basis = hermite_basis(n)?;
            let expansion = monomial_expansion(n)?;
            let closed: Vec<BigRational> = (0..=n / 2).map(|k| expansion_closed_form(n, k)).collect();
            Ok(json!({
                "n": n,
                "basis": basis.iter().map(rational_value).collect::<Vec<_>>(),
                "expansion": expansion.iter().map(rational_value).collect::<Vec<_>>(),
                "closed_form_agrees": expansion == closed,
                "quarter_inverse_consistent": quarter_inverse_is_consistent(n)?,
            }))
        }
        "perturbative" => {
            let d = f.need_d()?;
            let polys = perturbative_two_point(d, f.need_order()?)?;
            Ok(json!({"d": d, "coefficients": polys}))
        }
        "quadrature" => {
            let p: u32 = f.moment.as_deref().unwrap_or("1").parse().map_err(|_| Error::Usage("--moment P".into()))?;
            let lambda = Flags::real("lambda", &f.lambda)?.map_or(0.5, |n| n.value);
            let q = hermite_relation_quadrature(p, lambda)?;
            Ok(json!({
                "p": p,
                "tensor": complex_value(q.lhs),
                "matrix": complex_value(q.rhs),
                "discrepancy": float_value(q.discrepancy),
                "tensor_alternative_weight": complex_value(q.lhs_alternative),
            }))
        }
        other => Err(unknown_what(other, "moment, matrix, hermite, perturbative, quadrature")),
    }
}

fn map_source(f: &Flags, d: usize) -> Result<IfMap, Error> {
    if let Some(text) = read_input(f)? {
        let j: IfMapJson = serde_json::from_str(&text)?;
        return Ok(IfMap::from_json(&j, d)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(f.seed);
    Ok(random_map(&mut rng, d, f.order.unwrap_or(6), f.order.map_or(12, |o| 2 * o)))
}

fn scaling_cmd(f: &Flags) -> Result<Value, Error> {
    match f.what("saddle").as_str() {
        "saddle" => {
            let d = f.need_d()?;
            let lambda = Flags::need_real("lambda", &f.lambda)?;
            let ctx = SaddleContext::new(d, lambda.value)?;
            let (plus, minus) = saddle_alpha(&ctx);
            let lo = lo_observables(&ctx);
            // G2 = 2 T(-d lambda / 2), exact when the discriminant is a square
            let exact = match &lambda.exact {
                Some(l) => tree_function_exact(&(-l * BigRational::from_integer(BigInt::from(d)) / BigRational::from_integer(BigInt::from(2))))?
                    .map(|t| t * BigRational::from_integer(BigInt::from(2))),
                None => None,
            };
            Ok(json!({
                "alpha_plus": complex_value(plus),
                "alpha_minus": complex_value(minus),
                "alpha_sq": float_value(ctx.alpha_sq()),
                "g2": float_value(lo.g2),
                "g2_exact": exact.as_ref().map(rational_value),
                "g2_from_alpha": complex_value(lo.g2_from_alpha),
                "free_energy_density": float_value(lo.free_energy_density),
                "free_energy_density_from_z": float_value(lo.free_energy_density_from_z),
            }))
        }
        "covariance" => {
            let d = f.need_d()?;
            let n = oracle_n(f)?.ok_or_else(|| Error::Usage("--N is required".into()))? as usize;
            let alpha_sq = match (&f.at, &f.lambda) {
                (Some(a), _) => parse_number(a).map_err(Error::Usage)?.value,
                (None, Some(_)) => SaddleContext::new(d, Flags::need_real("lambda", &f.lambda)?.value)?.alpha_sq(),
                (None, None) => return Err(Error::Usage("give alpha^2 with --at or a coupling with --lambda".into())),
            };
            if d * n * n > 400 {
                return Err(Error::Usage(format!("operator dimension {} too large", d * n * n)));
            }
            let op = covariance_operator(d, n, alpha_sq)?;
            let spectrum: Vec<Value> =
                op.spectrum().iter().map(|(e, m)| json!({"eigenvalue": float_value(*e), "multiplicity": m})).collect();
            Ok(json!({
                "d": d,
                "N": n,
                "alpha_sq": float_value(alpha_sq),
                "residual": float_value(op.residual),
                "variant_residual": float_value(op.variant_residual),
                "numeric_gap": float_value(op.numeric_gap),
                "spectrum": spectrum,
            }))
        }
        "cherry" => {
            let d = f.need_d()?;
            let l = f.l.ok_or_else(|| Error::Usage("--L is required".into()))?;
            let x = Flags::need_real("x", &f.x)?.value;
            let n = Flags::need_real("N", &f.n)?.value;
            let z = rescaled_z(d, x, n);
            let amp = cherry_amplitude(d, l, z, n)?;
            let rescaled = n.powf(d as f64 / 2.0 - 1.0) * amp;
            let limit = cherry_limit(d, l, x)?;
            Ok(json!({
                "z": float_value(z),
                "amplitude": float_value(amp),
                "rescaled": float_value(rescaled),
                "limit": float_value(limit),
                "relative_gap": float_value((rescaled / limit - 1.0).abs()),
            }))
        }
        "double" => {
            let d = f.need_d()?;
            let x = Flags::need_real("x", &f.x)?.value;
            let n = Flags::need_real("N", &f.n)?.value;
            let closed = 4.0 * (d as f64).sqrt() * (x.sqrt() - (x - x_critical(d)).sqrt());
            Ok(json!({
                "x_c": float_value(x_critical(d)),
                "two_point": float_value(double_scaled_two_point(d, x, n)?),
                "cherry_sum": float_value(cherry_sum_limit(d, x, f.l.unwrap_or(200))?),
                "closed_form": float_value(closed),
            }))
        }
        "map" => {
            let d = f.need_d()?;
            let m = map_source(f, d)?;
            let exponent = map_n_exponent(&m, d)?;
            let pruned = prune_map(&m);
            let reduced = reduce_map(&pruned)?;
            Ok(json!({
                "map": m.to_json(),
                "loops": m.loops(),
                "exponent": exponent,
                "pruned_vertices": pruned.vertex_count(),
                "reduced_vertices": reduced.vertex_count(),
                "reduced_edges": reduced.edge_count(),
                "cherry": reduced.is_cherry(d),
            }))
        }
        "nnlo" => {
            let lambda = Flags::need_real("lambda", &f.lambda)?.value;
            let (closed, dict) = nnlo_two_point_d3(lambda)?;
            Ok(json!({
                "closed_form": float_value(closed),
                "dictionary": float_value(dict),
                "relative_gap": float_value((closed - dict).abs() / closed.abs().max(dict.abs()).max(f64::MIN_POSITIVE)),
            }))
        }
        other => Err(unknown_what(other, "saddle, covariance, cherry, double, map, nnlo")),
    }
}

fn frame_for(f: &Flags) -> Result<SpectralFrame, Error> {
    let d = f.d.unwrap_or(3);
    let lambda = Flags::need_real("lambda", &f.lambda)?.value;
    Ok(SpectralFrame::new(SaddleContext::new(d, lambda)?.alpha())?)
}

fn at_or(f: &Flags, default: Complex64) -> Result<Complex64, Error> {
    f.at.as_deref().map_or(Ok(default), parse_complex)
}

fn loop_cmd(f: &Flags) -> Result<Value, Error> {
    let frame = frame_for(f)?;
    let base = json!({"alpha": complex_value(frame.alpha), "cut_endpoint": complex_value(frame.a())});
    let mut v = match f.what("resolvent").as_str() {
        "resolvent" => {
            let x = at_or(f, frame.a() * 2.0)?;
            let (wx, wz) = resolvent_lo(&frame, x)?;
            json!({"x": complex_value(x), "w_x": complex_value(wx), "w_z": complex_value(wz), "disc_residual": float_value(disc_equation(&frame, x, wx))})
        }
        "cylinder" => {
            let d = f.d.unwrap_or(3);
            json!({"d": d, "coefficient": complex_value(cylinder_coefficient(&frame, d))})
        }
        "half" => {
            let z = at_or(f, Complex64::new(2.0, 0.0))?;
            let x = frame.x_of_z(z);
            json!({
                "z": complex_value(z),
                "resolvent_x": complex_value(resolvent_half_d3(&frame, x)?),
                "form_composed": complex_value(omega_half_d3(&frame, z)?),
                "form_simplified": complex_value(omega_half_d3_simplified(&frame, z)),
                "form_direct": complex_value(omega_half_d3_direct(&frame, z)),
            })
        }
        "tail" => json!({
            "contour": complex_value(half_tail_by_contour(&frame, 2.0, 256)?),
            "formula": complex_value(half_tail_coefficient(&frame)?),
        }),
        "branch" => {
            let mut rows = Vec::new();
            for sign in [1.0, -1.0] {
                let (values, limit) = branch_point_values(&frame, sign)?;
                rows.push(json!({"z": float_value(sign), "approach": values.iter().map(|c| complex_value(*c)).collect::<Vec<_>>(), "limit": complex_value(limit)}));
            }
            json!({"branch_points": rows})
        }
        "d6" => {
            let z = at_or(f, Complex64::new(2.0, 0.0))?;
            let slopes = divergence_slopes(|z| omega1_d6(&frame, z), &[1e-2, 1e-3, 1e-4])?;
            json!({"z": complex_value(z), "form": complex_value(omega1_d6(&frame, z)?), "slopes": slopes.iter().map(|s| float_value(*s)).collect::<Vec<_>>()})
        }
        other => return Err(unknown_what(other, "resolvent, cylinder, half, tail, branch, d6")),
    };
    if let (Value::Object(m), Value::Object(b)) = (&mut v, base) {
        for (k, val) in b {
            m.insert(k, val);
        }
    }
    Ok(v)
}

fn knot_cmd(f: &Flags) -> Result<Value, Error> {
    let code = f.pd.as_deref().ok_or_else(|| Error::Usage("--pd CODE is required".into()))?;
    let mode: KnotMode = f.mode.as_deref().unwrap_or("simplified").parse().map_err(Error::Usage)?;
    let diagram = parse_pd(code)?;
    let (g, report) = knot_report(&diagram, mode)?;
    Ok(json!({"report": report, "graph": GraphJson::from_graph(&g)}))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn out(args: &[&str]) -> Output {
        run(std::iter::once("tenscomb").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_number("1/8").unwrap().exact, Some(BigRational::new(1.into(), 8.into())));
        assert_eq!(parse_number("0.25").unwrap().exact, Some(BigRational::new(1.into(), 4.into())));
        assert_eq!(parse_number("1e6").unwrap().value, 1e6);
        assert_eq!(parse_number("-2.5e-1").unwrap().exact, Some(BigRational::new((-1).into(), 4.into())));
        assert!(parse_number("x").is_err());
        assert!(parse_number("1/0").is_err());
    }

    #[test]
    fn series_example() {
        let o = out(&["series", "--d", "3", "--order", "10", "--what", "melonic"]);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        let c = v["result"]["coefficients"].as_array().unwrap();
        assert_eq!(c.len(), 11);
        assert_eq!(c[10], rational_value(&fuss_catalan(3, 10)));
        assert_eq!(v["manifest"]["seed"], 0);
    }

    #[test]
    fn usage_errors() {
        let e = run(["tenscomb", "series", "--bogus"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = run(["tenscomb", "graph", "--format", "csv", "--mode", "melon", "--d", "3"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
