//! The `mop` command line.
//!
//! Every run prints one result plus a metadata block recording the tool
//! version, scalar domain, precision and the normalization conventions in
//! force. Nothing is read from the environment.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use mop_core::apery::{apery_sequence, apery_step, AperySequence};
use mop_core::formats::{
    domain_of, polynomial_from_json, polynomial_to_json, series_from_json, series_to_json, JsonScalar,
};
use mop_core::hermitepade::{
    algebraic_series, figure1_curve, hp_type_i, hp_type_ii, pade, required_terms, AlgebraicCurveSpec, BranchSeed,
};
use mop_core::kernel::{path_independence_check, r1_specialization};
use mop_core::measures::{cauchy_series, measures_from_json, measures_to_json, preset};
use mop_core::mopcore::{is_normal, mixed_solve, nn_recurrence, perfectness_scan, type_i, type_ii, MixedSystemSpec};
use mop_core::numerics::det;
use mop_core::numerics::text::{
    digits_to_bits, format_complex, format_float, format_rational, parse_float, parse_rational,
};
use mop_core::zeros::{fig1_min_terms, fig1_pipeline, to_csv, to_svg, zero_cloud, ZeroCloud, ZeroLabel};
use mop_core::{Complex, Float, LaurentSeries, MeasureSpec, MopError, MultiIndex, Polynomial, Rational, ScalarDomain};
use serde_json::{json, Value};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "mop", version, about = "Multiple orthogonal polynomials and Hermite-Padé approximation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Measure-spec file (one object or an array).
    #[arg(long, conflicts_with = "preset")]
    measures: Option<PathBuf>,
    /// lebesgue, apery-pair, apery-triple or hermite-ext:a1,a2,...:s
    #[arg(long)]
    preset: Option<String>,
    /// Multi-index, e.g. 2 or 1,1
    #[arg(long)]
    index: Option<String>,
    /// exact, real:BITS or complex:BITS
    #[arg(long)]
    domain: Option<String>,
    /// Number of series terms.
    #[arg(long)]
    terms: Option<usize>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// json, csv, svg or text
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Type I vector (A_1, ..., A_r).
    Type1(Common),
    /// Monic type II polynomial.
    Type2(Common),
    /// Mixed-type system from a spec file.
    Mixed {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        spec: PathBuf,
    },
    /// Normality of one index.
    Normal(Common),
    /// Non-normal indices up to a size.
    Perfect {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6)]
        max_size: usize,
    },
    /// Type I Hermite-Padé from series.
    #[command(name = "hp-type1")]
    HpType1 {
        #[command(flatten)]
        common: Common,
        /// Series file (one object or an array).
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// Type II Hermite-Padé from series.
    #[command(name = "hp-type2")]
    HpType2 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// Padé approximant of one series.
    Pade {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        series: Option<PathBuf>,
        #[arg(long)]
        n: usize,
    },
    /// Laurent expansion of an algebraic function branch.
    #[command(name = "series-alg")]
    SeriesAlg {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// Apéry approximants to zeta(3).
    Apery {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 60)]
        digits: u32,
    },
    /// Path independence of the mixed kernel.
    #[command(name = "kernel-check")]
    KernelCheck {
        #[command(flatten)]
        common: Common,
        /// Sample points x:y separated by commas, rationals or decimals.
        #[arg(long)]
        points: Option<String>,
    },
    /// Nearest-neighbour recurrence coefficients.
    Nnrec(Common),
    /// Zeros of a polynomial file, or of the type II polynomial of an index.
    Zeros {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        poly: Option<PathBuf>,
        #[arg(long, default_value = "P")]
        label: String,
    },
    /// Zero clouds of the type I Hermite-Padé polynomials for f1 = w, f2 = w^2.
    Fig1 {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        curve: CurveArgs,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct CurveArgs {
    /// Curve file; the built-in cubic when absent.
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Leading coefficient of the branch as re,im.
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    /// Growth exponent of the branch at infinity.
    #[arg(long, allow_hyphen_values = true)]
    exponent: Option<i64>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Mop(MopError),
}

impl From<MopError> for CliError {
    fn from(e: MopError) -> Self {
        CliError::Mop(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Mop(e.into())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// Result of one subcommand in every format it supports.
struct Report {
    metadata: Value,
    text: String,
    json: Value,
    csv: Option<String>,
    svg: Option<String>,
}

impl Report {
    fn new(metadata: Value, text: String, json: Value) -> Self {
        Report { metadata, text, json, csv: None, svg: None }
    }
}

fn metadata(command: &str, domain: &str, precision: Option<u32>, conventions: &[&str]) -> Value {
    json!({
        "tool": "mop",
        "version": VERSION,
        "command": command,
        "domain": domain,
        "precision": precision,
        "conventions": conventions,
    })
}

fn metadata_lines(meta: &Value) -> String {
    let mut out = format!(
        "# mop {} | command {} | domain {} | precision {}\n",
        meta["version"].as_str().unwrap_or(""),
        meta["command"].as_str().unwrap_or(""),
        meta["domain"].as_str().unwrap_or(""),
        meta["precision"].as_u64().map_or("exact".to_string(), |p| format!("{p} bits")),
    );
    for c in meta["conventions"].as_array().into_iter().flatten() {
        out.push_str(&format!("# {}\n", c.as_str().unwrap_or("")));
    }
    for (k, v) in meta.as_object().into_iter().flatten() {
        if !["tool", "version", "command", "domain", "precision", "conventions"].contains(&k.as_str()) {
            out.push_str(&format!("# {k}: {v}\n"));
        }
    }
    out
}

const TYPE_I_NORMALIZATION: &str = "type I normalization: sum_j int x^(|n|-1) A_j dmu_j = 1";
const TYPE_II_NORMALIZATION: &str = "type II polynomials are monic of degree |n|";
const MASS_NORMALIZED: &str = "hermite-ext moments are divided by m0 = sqrt(pi/s) exp(s a^2/4)";
const POLY_PARTS: &str =
    "polynomial parts at infinity are subtracted before imposing the order conditions and absorbed into B / Q_j";
const MIXED_NORMALIZATION: &str =
    "one-dimensional solutions: integer coefficients with content 1, leading coefficient of the first unknown positive";

/// Scalars the CLI can print and read.
trait CliScalar: JsonScalar {
    fn show(p: &Polynomial<Self>) -> String;
    fn show_scalar(&self) -> String;
}

impl CliScalar for Rational {
    fn show(p: &Polynomial<Self>) -> String {
        p.to_string()
    }
    fn show_scalar(&self) -> String {
        format_rational(self)
    }
}

impl CliScalar for Float {
    fn show(p: &Polynomial<Self>) -> String {
        p.to_string()
    }
    fn show_scalar(&self) -> String {
        format_float(self)
    }
}

impl CliScalar for Complex {
    fn show(p: &Polynomial<Self>) -> String {
        p.to_string()
    }
    fn show_scalar(&self) -> String {
        let [re, im] = format_complex(self);
        format!("({re}, {im})")
    }
}

fn scalars_json<T: JsonScalar>(v: &[T]) -> Value {
    Value::Array(v.iter().map(JsonScalar::to_json).collect())
}

fn measures_of(c: &Common) -> CliResult<Vec<MeasureSpec>> {
    match (&c.measures, &c.preset) {
        (Some(path), None) => Ok(measures_from_json(&std::fs::read_to_string(path)?)?),
        (None, Some(name)) => Ok(preset(name)?),
        (None, None) => usage("one of --measures or --preset is required"),
        (Some(_), Some(_)) => usage("--measures and --preset are exclusive"),
    }
}

fn index_of(c: &Common) -> CliResult<MultiIndex> {
    match &c.index {
        Some(s) => Ok(s.parse()?),
        None => usage("--index is required"),
    }
}

fn domain_of_args(c: &Common, default: &str) -> CliResult<ScalarDomain> {
    Ok(c.domain.as_deref().unwrap_or(default).parse()?)
}

/// Float solves pick their own starting precision and raise it on
/// ill-conditioning; the domain reported is the one actually used.
fn actual_domain(requested: ScalarDomain, used: Option<u32>) -> String {
    match (requested, used) {
        (ScalarDomain::BigReal { .. }, Some(p)) => format!("real:{p}"),
        (ScalarDomain::BigComplex { .. }, Some(p)) => format!("complex:{p}"),
        (d, _) => d.to_string(),
    }
}

fn type2_report<T: CliScalar>(measures: &[MeasureSpec], n: &MultiIndex, domain: ScalarDomain) -> CliResult<Report> {
    let s = type_ii::<T>(measures, n)?;
    let mut conv = vec![TYPE_II_NORMALIZATION];
    if s.mass_normalized {
        conv.push(MASS_NORMALIZED);
    }
    let mut meta = metadata("type2", &actual_domain(domain, s.precision), s.precision, &conv);
    meta["requested_domain"] = json!(domain.to_string());
    let text = format!("P_{n}(x) = {}\n", T::show(&s.poly));
    let body = json!({
        "index": n.to_string(),
        "poly": polynomial_to_json(&s.poly),
        "residuals": scalars_json(&s.residuals),
        "precision": s.precision,
        "mass_normalized": s.mass_normalized,
    });
    Ok(Report::new(meta, text, body))
}

fn type1_report<T: CliScalar>(measures: &[MeasureSpec], n: &MultiIndex, domain: ScalarDomain) -> CliResult<Report> {
    let s = type_i::<T>(measures, n)?;
    let mut conv = vec![TYPE_I_NORMALIZATION];
    if s.mass_normalized {
        conv.push(MASS_NORMALIZED);
    }
    let mut meta = metadata("type1", &actual_domain(domain, s.precision), s.precision, &conv);
    meta["requested_domain"] = json!(domain.to_string());
    let mut text = String::new();
    for (j, a) in s.polys.iter().enumerate() {
        text.push_str(&format!("A_{n},{}(x) = {}\n", j + 1, T::show(a)));
    }
    text.push_str(&format!("normalization = {}\n", s.normalization_value.show_scalar()));
    let body = json!({
        "index": n.to_string(),
        "polys": s.polys.iter().map(polynomial_to_json).collect::<Vec<_>>(),
        "residuals": scalars_json(&s.residuals),
        "normalization_value": s.normalization_value.to_json(),
        "precision": s.precision,
        "mass_normalized": s.mass_normalized,
    });
    Ok(Report::new(meta, text, body))
}

fn by_domain(
    domain: ScalarDomain,
    exact: impl FnOnce() -> CliResult<Report>,
    real: impl FnOnce(u32) -> CliResult<Report>,
    complex: impl FnOnce(u32) -> CliResult<Report>,
) -> CliResult<Report> {
    match domain {
        ScalarDomain::ExactRational => exact(),
        ScalarDomain::BigReal { precision } => real(precision),
        ScalarDomain::BigComplex { precision } => complex(precision),
    }
}

fn cmd_type(c: &Common, kind: u8) -> CliResult<Report> {
    let measures = measures_of(c)?;
    let n = index_of(c)?;
    let d = domain_of_args(c, "exact")?;
    if kind == 1 {
        by_domain(
            d,
            || type1_report::<Rational>(&measures, &n, d),
            |_| type1_report::<Float>(&measures, &n, d),
            |_| type1_report::<Complex>(&measures, &n, d),
        )
    } else {
        by_domain(
            d,
            || type2_report::<Rational>(&measures, &n, d),
            |_| type2_report::<Float>(&measures, &n, d),
            |_| type2_report::<Complex>(&measures, &n, d),
        )
    }
}

fn cmd_mixed(c: &Common, spec: &PathBuf) -> CliResult<Report> {
    let measures = measures_of(c)?;
    let spec = MixedSystemSpec::from_json(&std::fs::read_to_string(spec)?)?;
    let polys = mixed_solve(&spec, &measures)?;
    let meta = metadata("mixed", "exact", None, &[MIXED_NORMALIZATION]);
    let mut text = String::new();
    let mut body = serde_json::Map::new();
    for (u, p) in spec.unknowns.iter().zip(&polys) {
        text.push_str(&format!("{}(x) = {}\n", u.name, p));
        body.insert(u.name.clone(), polynomial_to_json(p));
    }
    Ok(Report::new(meta, text, json!({ "spec": spec.to_json(), "solution": body })))
}

fn cmd_normal(c: &Common) -> CliResult<Report> {
    let measures = measures_of(c)?;
    let n = index_of(c)?;
    let normal = is_normal(&measures, &n)?;
    let sys = mop_core::mopcore::assemble_systems(&measures, &n)?;
    let d = det(&sys.type_ii)?;
    let meta = metadata("normal", "exact", None, &["normal iff det(M_II) != 0, decided exactly"]);
    let text = format!("{n} normal: {normal}\ndet(M_II) = {}\n", format_rational(&d));
    Ok(Report::new(meta, text, json!({ "index": n.to_string(), "normal": normal, "det": format_rational(&d) })))
}

fn cmd_perfect(c: &Common, max_size: usize) -> CliResult<Report> {
    let measures = measures_of(c)?;
    let failures = perfectness_scan(&measures, max_size)?;
    let meta = metadata("perfect", "exact", None, &["every index with 1 <= |n| <= max_size is tested"]);
    let names: Vec<String> = failures.iter().map(ToString::to_string).collect();
    let text = if names.is_empty() {
        format!("no non-normal index with |n| <= {max_size}\n")
    } else {
        format!("non-normal: {}\n", names.join(" "))
    };
    Ok(Report::new(meta, text, json!({ "max_size": max_size, "non_normal": names })))
}

/// Series from a file, or Cauchy transforms of the measures.
fn series_input<T: CliScalar>(
    c: &Common,
    file: Option<&PathBuf>,
    n: &MultiIndex,
    prec: u32,
) -> CliResult<Vec<LaurentSeries<T>>> {
    if let Some(path) = file {
        let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?).map_err(MopError::from)?;
        let docs = match v {
            Value::Array(items) => items,
            single => vec![single],
        };
        return Ok(docs.iter().map(|d| series_from_json::<T>(d, prec)).collect::<Result<_, _>>()?);
    }
    let terms = c.terms.unwrap_or_else(|| required_terms(n));
    let measures = measures_of(c)?;
    Ok(measures
        .iter()
        .map(|m| Ok(cauchy_series(m, terms)?.map(|q| T::from_rational(q, prec))))
        .collect::<Result<_, MopError>>()?)
}

fn series_domain(c: &Common, file: Option<&PathBuf>) -> CliResult<ScalarDomain> {
    let Some(path) = file else { return domain_of_args(c, "exact") };
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?).map_err(MopError::from)?;
    let first = if let Value::Array(items) = &v { items.first().cloned().unwrap_or(Value::Null) } else { v };
    let prec = domain_of_args(c, "exact")?.precision().unwrap_or(256);
    match domain_of(&first) {
        Some("rational") => Ok(ScalarDomain::ExactRational),
        Some("real") => Ok(ScalarDomain::real(prec)?),
        Some("complex") => Ok(ScalarDomain::complex(prec)?),
        other => usage(format!("series file has domain {other:?}")),
    }
}

fn hp1_report<T: CliScalar>(c: &Common, file: Option<&PathBuf>, n: &MultiIndex, d: ScalarDomain) -> CliResult<Report> {
    let series = series_input::<T>(c, file, n, d.precision().unwrap_or(0))?;
    let r = hp_type_i(&series, n)?;
    let meta = metadata("hp-type1", &d.to_string(), d.precision(), &[TYPE_I_NORMALIZATION, POLY_PARTS]);
    let mut text = String::new();
    for (j, a) in r.a.iter().enumerate() {
        text.push_str(&format!("A_{}(x) = {}\n", j + 1, T::show(a)));
    }
    text.push_str(&format!("B(x) = {}\n", T::show(&r.b)));
    text.push_str(&format!(
        "order of contact: {}{}\n",
        r.achieved_order,
        if r.remainder_vanishes { " (lower bound)" } else { "" }
    ));
    let body = json!({
        "index": n.to_string(),
        "A": r.a.iter().map(polynomial_to_json).collect::<Vec<_>>(),
        "B": polynomial_to_json(&r.b),
        "achieved_order": r.achieved_order,
        "remainder_vanishes": r.remainder_vanishes,
        "polynomial_parts_subtracted": r.polynomial_parts_subtracted,
    });
    Ok(Report::new(meta, text, body))
}

fn hp2_report<T: CliScalar>(
    command: &str,
    c: &Common,
    file: Option<&PathBuf>,
    n: &MultiIndex,
    d: ScalarDomain,
) -> CliResult<Report> {
    let series = series_input::<T>(c, file, n, d.precision().unwrap_or(0))?;
    let r = if command == "pade" {
        if series.len() != 1 {
            return usage(format!("pade takes one series, got {}", series.len()));
        }
        pade(&series[0], n.size())?
    } else {
        hp_type_ii(&series, n)?
    };
    let meta = metadata(command, &d.to_string(), d.precision(), &[TYPE_II_NORMALIZATION, POLY_PARTS]);
    let mut text = format!("P(x) = {}\n", T::show(&r.p));
    for (j, q) in r.q.iter().enumerate() {
        text.push_str(&format!(
            "Q_{}(x) = {}    order {}{}\n",
            j + 1,
            T::show(q),
            r.achieved_orders[j],
            if r.remainder_vanishes[j] { " (remainder vanishes)" } else { "" }
        ));
    }
    let body = json!({
        "index": n.to_string(),
        "P": polynomial_to_json(&r.p),
        "Q": r.q.iter().map(polynomial_to_json).collect::<Vec<_>>(),
        "achieved_orders": r.achieved_orders,
        "remainder_vanishes": r.remainder_vanishes,
    });
    Ok(Report::new(meta, text, body))
}

fn cmd_hp(command: &str, c: &Common, file: Option<&PathBuf>, pade_n: Option<usize>) -> CliResult<Report> {
    let n = match pade_n {
        Some(k) => MultiIndex::new(vec![k])?,
        None => index_of(c)?,
    };
    let d = series_domain(c, file)?;
    if command == "hp-type1" {
        by_domain(
            d,
            || hp1_report::<Rational>(c, file, &n, d),
            |_| hp1_report::<Float>(c, file, &n, d),
            |_| hp1_report::<Complex>(c, file, &n, d),
        )
    } else {
        by_domain(
            d,
            || hp2_report::<Rational>(command, c, file, &n, d),
            |_| hp2_report::<Float>(command, c, file, &n, d),
            |_| hp2_report::<Complex>(command, c, file, &n, d),
        )
    }
}

fn curve_of(args: &CurveArgs) -> CliResult<AlgebraicCurveSpec> {
    let mut curve = match &args.curve {
        Some(path) => AlgebraicCurveSpec::from_json(&std::fs::read_to_string(path)?)?,
        None => figure1_curve(),
    };
    if let Some(seed) = &args.seed {
        let Some((re, im)) = seed.split_once(',') else {
            return usage(format!("--seed expects re,im, got {seed:?}"));
        };
        curve.seed.leading = Complex::with_val(64, (parse_float(re, 64)?, parse_float(im, 64)?));
    }
    if let Some(e) = args.exponent {
        curve.seed.exponent = e;
    }
    Ok(curve)
}

fn complex_precision(c: &Common, default: u32) -> CliResult<u32> {
    match c.domain.as_deref() {
        None => Ok(default),
        Some(s) => match s.parse::<ScalarDomain>()? {
            ScalarDomain::BigComplex { precision } => Ok(precision),
            other => usage(format!("this command runs in the complex domain, not {other}")),
        },
    }
}

fn seed_json(seed: &BranchSeed) -> Value {
    json!({ "exponent": seed.exponent, "leading": format_complex(&seed.leading) })
}

fn cmd_series_alg(c: &Common, args: &CurveArgs) -> CliResult<Report> {
    let curve = curve_of(args)?;
    let prec = complex_precision(c, 512)?;
    let terms = c.terms.unwrap_or(32);
    let e = algebraic_series(&curve, terms, prec)?;
    let mut meta = metadata(
        "series-alg",
        &format!("complex:{prec}"),
        Some(prec),
        &["w = z^d u(1/z); u(0) from the dominant balance, then power-series Newton"],
    );
    meta["branch_seed"] = seed_json(&curve.seed);
    let mut text = format!(
        "leading coefficient: {}\nresidual max: {}\npolynomial part: {}\ntail:\n",
        e.leading.show_scalar(),
        e.residual_max.to_string_radix(10, Some(6)),
        Complex::show(&e.series.poly_part)
    );
    for (k, t) in e.series.tail.iter().enumerate() {
        text.push_str(&format!("  z^-{}: {}\n", k + 1, t.show_scalar()));
    }
    let mut body = series_to_json(&e.series);
    body["residual_max"] = json!(format_float(&e.residual_max));
    body["leading"] = e.leading.to_json();
    Ok(Report::new(meta, text, body))
}

fn cmd_apery(n: usize, digits: u32) -> CliResult<Report> {
    if n == 0 {
        return Err(MopError::NoSolution("A_0(1) = 0 forces A_0 = 0".into()).into());
    }
    let prec = digits_to_bits(digits);
    let seq = if n == 1 {
        AperySequence { steps: vec![apery_step(1, prec)?], ratios: Vec::new(), precision: prec }
    } else {
        apery_sequence(n, prec)?
    };
    let mut meta = metadata(
        "apery",
        &format!("real:{prec}"),
        Some(prec),
        &[
            "approximant = -D(1) / (2 B(1))",
            MIXED_NORMALIZATION,
            "zeta(3) reference from MPFR at twice the working precision",
        ],
    );
    meta["digits"] = json!(digits);
    Ok(Report::new(meta, seq.to_text(), seq.to_json()))
}

fn parse_points(s: Option<&str>, prec: u32) -> CliResult<Vec<(Float, Float)>> {
    let s = s.unwrap_or("1/3:1/2,1/5:7/10");
    let num = |t: &str| -> CliResult<Float> {
        if t.contains('.') || t.contains('e') {
            Ok(parse_float(t, prec)?)
        } else {
            Ok(Float::with_val(prec, parse_rational(t)?))
        }
    };
    s.split(',')
        .map(|pair| match pair.split_once(':') {
            Some((x, y)) => Ok((num(x)?, num(y)?)),
            None => usage(format!("--points expects x:y pairs, got {pair:?}")),
        })
        .collect()
}

fn cmd_kernel_check(c: &Common, points: Option<&str>) -> CliResult<Report> {
    let measures = measures_of(c)?;
    let n = index_of(c)?;
    let prec = match domain_of_args(c, "real:128")? {
        ScalarDomain::BigReal { precision } => precision,
        other => return usage(format!("kernel-check evaluates in a real domain, not {other}")),
    };
    let samples = parse_points(points, prec)?;
    let r = path_independence_check(&measures, &n, &samples, prec)?;
    let mut conv = vec![TYPE_I_NORMALIZATION, TYPE_II_NORMALIZATION, "structural check in the basis x^i y^l w_j(y)"];
    if measures.iter().any(MeasureSpec::is_mass_normalized) {
        conv.push(MASS_NORMALIZED);
    }
    let meta = metadata("kernel-check", &format!("real:{prec}"), Some(prec), &conv);
    let independent = r.structural_deviation == 0;
    let mut text = format!(
        "paths: {}\nstructural deviation: {}\nnumeric deviation: {}\npath independent: {independent}\n",
        r.paths,
        format_rational(&r.structural_deviation),
        r.numeric_deviation.to_string_radix(10, Some(6))
    );
    let mut body = json!({
        "index": n.to_string(),
        "paths": r.paths,
        "structural_deviation": format_rational(&r.structural_deviation),
        "numeric_deviation": format_float(&r.numeric_deviation),
        "path_independent": independent,
    });
    if n.r() == 1 {
        let (cd, mop) = r1_specialization(&measures[0], n.size())?;
        text.push_str(&format!("matches classical kernel times weight: {}\n", cd == mop));
        body["matches_classical"] = json!(cd == mop);
    }
    Ok(Report::new(meta, text, body))
}

fn cmd_nnrec(c: &Common) -> CliResult<Report> {
    let measures = measures_of(c)?;
    let n = index_of(c)?;
    let r = nn_recurrence(&measures, &n)?;
    let meta = metadata(
        "nnrec",
        "exact",
        None,
        &["x P_n = P_{n+e_j} + b_{n,j} P_n + sum_i a_{n,i} P_{n-e_i}", TYPE_II_NORMALIZATION],
    );
    let q = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>();
    let text = format!(
        "index {n}\nb = [{}]\na = [{}]\nresidual zero: {}\n",
        q(&r.b).join(", "),
        q(&r.a).join(", "),
        r.is_exact()
    );
    let body = json!({
        "index": n.to_string(),
        "b": q(&r.b),
        "a": q(&r.a),
        "residuals": r.residuals.iter().map(polynomial_to_json).collect::<Vec<_>>(),
        "residual_zero": r.is_exact(),
    });
    Ok(Report::new(meta, text, body))
}

fn clouds_json(clouds: &[ZeroCloud]) -> Value {
    Value::Array(
        clouds
            .iter()
            .map(|c| {
                json!({
                    "label": c.label.to_string(),
                    "index": c.index.to_string(),
                    "points": c.points.iter().map(format_complex).collect::<Vec<_>>(),
                    "residual_max": format_float(&c.residual_max),
                })
            })
            .collect(),
    )
}

fn clouds_text(clouds: &[ZeroCloud]) -> String {
    let mut out = String::new();
    for c in clouds {
        out.push_str(&format!(
            "{}: {} zeros, residual max {}\n",
            c.label,
            c.points.len(),
            c.residual_max.to_string_radix(10, Some(6))
        ));
        for z in &c.points {
            out.push_str(&format!("  {}\n", z.to_string_radix(10, Some(20))));
        }
    }
    out
}

fn cmd_zeros(c: &Common, poly: Option<&PathBuf>, label: &str) -> CliResult<Report> {
    let label: ZeroLabel = label.parse()?;
    let prec =
        c.domain.as_deref().map(str::parse::<ScalarDomain>).transpose()?.and_then(|d| d.precision()).unwrap_or(256);
    let (cloud, source) = match poly {
        Some(path) => {
            let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?).map_err(MopError::from)?;
            let n = match &c.index {
                Some(s) => s.parse()?,
                None => MultiIndex::zero(1),
            };
            let cloud = match domain_of(&v) {
                Some("rational") => zero_cloud(&polynomial_from_json::<Rational>(&v, 0)?, label, &n, prec)?,
                Some("real") => zero_cloud(&polynomial_from_json::<Float>(&v, prec)?, label, &n, prec)?,
                Some("complex") => zero_cloud(&polynomial_from_json::<Complex>(&v, prec)?, label, &n, prec)?,
                other => return usage(format!("polynomial file has domain {other:?}")),
            };
            (cloud, path.display().to_string())
        }
        None => {
            let measures = measures_of(c)?;
            let n = index_of(c)?;
            let p = type_ii::<Rational>(&measures, &n)?.poly;
            (zero_cloud(&p, label, &n, prec)?, format!("type II polynomial of {n}"))
        }
    };
    let mut meta = metadata(
        "zeros",
        &format!("complex:{prec}"),
        Some(prec),
        &["residual_max is max |p(z)/lc(p)| at twice the working precision"],
    );
    meta["source"] = json!(source);
    let clouds = vec![cloud];
    let mut report = Report::new(meta, clouds_text(&clouds), clouds_json(&clouds));
    report.csv = Some(to_csv(&clouds));
    report.svg = Some(to_svg(&clouds));
    Ok(report)
}

fn cmd_fig1(c: &Common, args: &CurveArgs) -> CliResult<Report> {
    let curve = curve_of(args)?;
    let n: MultiIndex = match &c.index {
        Some(s) => s.parse()?,
        None => MultiIndex::new(vec![40, 40])?,
    };
    let terms = c.terms.unwrap_or_else(|| fig1_min_terms(&n));
    let prec = complex_precision(c, 512)?;
    let r = fig1_pipeline(&curve, &n, terms, prec)?;
    let mut meta = metadata("fig1", &format!("complex:{prec}"), Some(prec), &[TYPE_I_NORMALIZATION, POLY_PARTS]);
    meta["branch_seed"] = seed_json(&r.seed);
    meta["leading"] = json!(format_complex(&r.leading));
    meta["index"] = json!(n.to_string());
    meta["terms"] = json!(terms);
    meta["order_of_contact"] = json!(r.order_of_contact);
    meta["series_residual"] = json!(format_float(&r.series_residual));
    let text = format!("index {n}, terms {terms}, order of contact {}\n{}", r.order_of_contact, clouds_text(&r.clouds));
    let mut body = json!({ "order_of_contact": r.order_of_contact, "clouds": clouds_json(&r.clouds) });
    body["remainder_vanishes"] = json!(r.remainder_vanishes);
    let mut report = Report::new(meta, text, body);
    report.csv = Some(to_csv(&r.clouds));
    report.svg = Some(to_svg(&r.clouds));
    Ok(report)
}

fn dispatch(cmd: &Command) -> CliResult<(Report, Common)> {
    let common = |c: &Common| c.clone();
    Ok(match cmd {
        Command::Type1(c) => (cmd_type(c, 1)?, common(c)),
        Command::Type2(c) => (cmd_type(c, 2)?, common(c)),
        Command::Mixed { common: c, spec } => (cmd_mixed(c, spec)?, common(c)),
        Command::Normal(c) => (cmd_normal(c)?, common(c)),
        Command::Perfect { common: c, max_size } => (cmd_perfect(c, *max_size)?, common(c)),
        Command::HpType1 { common: c, series } => (cmd_hp("hp-type1", c, series.as_ref(), None)?, common(c)),
        Command::HpType2 { common: c, series } => (cmd_hp("hp-type2", c, series.as_ref(), None)?, common(c)),
        Command::Pade { common: c, series, n } => (cmd_hp("pade", c, series.as_ref(), Some(*n))?, common(c)),
        Command::SeriesAlg { common: c, curve } => (cmd_series_alg(c, curve)?, common(c)),
        Command::Apery { common: c, n, digits } => (cmd_apery(*n, *digits)?, common(c)),
        Command::KernelCheck { common: c, points } => (cmd_kernel_check(c, points.as_deref())?, common(c)),
        Command::Nnrec(c) => (cmd_nnrec(c)?, common(c)),
        Command::Zeros { common: c, poly, label } => (cmd_zeros(c, poly.as_ref(), label)?, common(c)),
        Command::Fig1 { common: c, curve } => (cmd_fig1(c, curve)?, common(c)),
    })
}

/// Renders the report; the second string is the metadata to print on the
/// error stream when the format has no room for it.
fn render(report: &Report, format: &str) -> CliResult<(String, Option<String>)> {
    match format {
        "text" => Ok((format!("{}{}", metadata_lines(&report.metadata), report.text), None)),
        "json" => {
            let doc = json!({ "metadata": report.metadata, "result": report.json });
            Ok((serde_json::to_string_pretty(&doc).map_err(MopError::from)? + "\n", None))
        }
        "csv" => match &report.csv {
            Some(csv) => Ok((csv.clone(), Some(metadata_lines(&report.metadata)))),
            None => usage("csv output is available for zeros and fig1 only"),
        },
        "svg" => match &report.svg {
            Some(svg) => {
                let meta = serde_json::to_string(&report.metadata).map_err(MopError::from)?.replace("--", "- -");
                Ok((svg.replacen("<style>", &format!("<!-- {meta} -->\n<style>"), 1), None))
            }
            None => usage("svg output is available for zeros and fig1 only"),
        },
        other => usage(format!("unknown format {other:?}; use json, csv, svg or text")),
    }
}

fn exit_code(e: &CliError) -> i32 {
    match e {
        CliError::Usage(_) => 2,
        CliError::Mop(m) if m.is_domain() => 1,
        CliError::Mop(m) if m.is_numeric() => 3,
        CliError::Mop(MopError::Io(_)) => 1,
        CliError::Mop(_) => 2,
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let (report, common) = dispatch(&cli.command)?;
    let (body, side) = render(&report, &common.format)?;
    match &common.out {
        Some(path) => {
            std::fs::write(path, &body)?;
            if let Some(meta) = side {
                let _ = err.write_all(meta.as_bytes());
            }
            let _ = writeln!(out, "wrote {}", path.display());
        }
        None => {
            if let Some(meta) = side {
                let _ = err.write_all(meta.as_bytes());
            }
            out.write_all(body.as_bytes())?;
        }
    }
    Ok(())
}

/// Runs one invocation (`args[0]` is the program name) and returns the exit
/// code: 0 success, 1 domain error, 2 usage error, 3 numeric failure.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let msg = match &e {
                CliError::Usage(m) => format!("usage error: {m}"),
                CliError::Mop(m) => format!("error: {m}"),
            };
            let _ = writeln!(err, "{msg}");
            exit_code(&e)
        }
    }
}

/// Writes a measure list in the file format `--measures` reads.
pub fn measures_file_text(measures: &[MeasureSpec]) -> String {
    measures_to_json(measures).to_string()
}
