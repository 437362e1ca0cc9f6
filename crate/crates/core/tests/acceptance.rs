//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use mop_core::apery::apery_sequence;
use mop_core::hermitepade::{figure1_curve, hp_type_i, hp_type_ii, required_terms};
use mop_core::kernel::path_independence_check;
use mop_core::measures::{cauchy_series, preset};
use mop_core::mopcore::{assemble_systems, nn_recurrence, perfectness_scan, type_i, type_ii};
use mop_core::numerics::text::digits_to_bits;
use mop_core::numerics::{poly_roots, DenseMatrix};
use mop_core::zeros::{fig1_pipeline, parse_csv, to_csv, to_svg, ZeroCloud};
use mop_core::{Complex, Float, MeasureSpec, MultiIndex, Polynomial, Rational};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const PRESETS: [&str; 4] = ["lebesgue", "apery-pair", "apery-triple", "hermite-ext:1,-1:1"];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn within(&mut self, elapsed: Duration, limit_s: u64) {
        self.note(format!("{:.1} s", elapsed.as_secs_f64()));
        self.check(
            elapsed <= Duration::from_secs(limit_s),
            format!("took {:.1} s, limit {limit_s} s", elapsed.as_secs_f64()),
        );
    }
}

fn indices(r: usize, max: usize) -> Vec<MultiIndex> {
    MultiIndex::all_up_to(r, max).into_iter().filter(|n| n.size() > 0).collect()
}

fn measures(name: &str) -> Vec<MeasureSpec> {
    preset(name).unwrap()
}

fn criterion_1() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut count = 0;
    for name in PRESETS {
        let ms = measures(name);
        for n in indices(ms.len(), 6) {
            count += 1;
            match type_ii::<Rational>(&ms, &n) {
                Ok(s) => o.check(s.residuals.iter().all(|v| *v == 0), format!("{name} {n}: type II residual")),
                Err(e) => o.check(false, format!("{name} {n}: type II {e}")),
            }
            match type_i::<Rational>(&ms, &n) {
                Ok(s) => {
                    o.check(s.residuals.iter().all(|v| *v == 0), format!("{name} {n}: type I residual"));
                    o.check(s.normalization_value == 1, format!("{name} {n}: normalization {}", s.normalization_value));
                }
                Err(e) => o.check(false, format!("{name} {n}: type I {e}")),
            }
        }
    }
    o.note(format!("{count} indices"));
    o.within(start.elapsed(), 60);
    o
}

fn random_measure(rng: &mut StdRng) -> MeasureSpec {
    match rng.random_range(0..4) {
        0 => MeasureSpec::LebesgueUnit,
        1 => MeasureSpec::LogWeight { power: rng.random_range(1..=2) },
        2 => MeasureSpec::HermiteExternal {
            a: Rational::from((rng.random_range(-3i64..=3), rng.random_range(1i64..=3))),
            s: Rational::from((rng.random_range(1i64..=4), rng.random_range(1i64..=2))),
        },
        _ => MeasureSpec::MomentTable(
            (0..16).map(|_| Rational::from((rng.random_range(-50i64..=50), rng.random_range(1i64..=20)))).collect(),
        ),
    }
}

fn transpose(m: &DenseMatrix<Rational>) -> Vec<Vec<Rational>> {
    (0..m.cols()).map(|j| (0..m.rows()).map(|i| m.get(i, j).clone()).collect()).collect()
}

fn rows(m: &DenseMatrix<Rational>) -> Vec<Vec<Rational>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).clone()).collect()).collect()
}

fn criterion_2() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(20_240_611);
    for t in 0..50 {
        let r = rng.random_range(1..=3);
        let parts: Vec<usize> = (0..r).map(|_| rng.random_range(0..=3)).collect();
        let n = if parts.iter().sum::<usize>() == 0 { MultiIndex::new(vec![1; r]) } else { MultiIndex::new(parts) }
            .unwrap();
        let ms: Vec<MeasureSpec> = (0..r).map(|_| random_measure(&mut rng)).collect();
        match assemble_systems(&ms, &n) {
            Ok(s) => o.check(rows(&s.type_i) == transpose(&s.type_ii), format!("instance {t}: {n}")),
            Err(e) => o.check(false, format!("instance {t}: {e}")),
        }
    }
    o.note("50 instances");
    o.within(start.elapsed(), 5);
    o
}

/// Monic orthogonal polynomials by Gram-Schmidt on the moments `1/(k+1)`.
fn gram_schmidt_legendre(max: usize) -> Vec<Polynomial<Rational>> {
    let inner = |p: &Polynomial<Rational>, q: &Polynomial<Rational>| -> Rational {
        let mut acc = Rational::new();
        for (i, a) in p.coeffs().iter().enumerate() {
            for (j, b) in q.coeffs().iter().enumerate() {
                acc += Rational::from(a * b) / Rational::from(i + j + 1);
            }
        }
        acc
    };
    let mut basis: Vec<Polynomial<Rational>> = Vec::new();
    for k in 0..=max {
        let mut coeffs = vec![Rational::new(); k + 1];
        coeffs[k] = Rational::from(1);
        let xk = Polynomial::new(coeffs);
        let mut p = xk.clone();
        for q in &basis {
            let c = inner(&xk, q) / inner(q, q);
            p = p.sub(&q.scale(&c));
        }
        basis.push(p);
    }
    basis
}

fn criterion_3() -> Outcome {
    let mut o = Outcome::new();
    let oracle = gram_schmidt_legendre(8);
    let ms = measures("lebesgue");
    let tol = Float::with_val(256, Float::i_exp(1, -100));
    let mut worst = Float::new(256);
    for (k, expected) in oracle.iter().enumerate().skip(1) {
        let p = type_ii::<Rational>(&ms, &MultiIndex::new(vec![k]).unwrap()).unwrap().poly;
        o.check(p == *expected, format!("k={k}: coefficients differ from Gram-Schmidt"));
        let roots = poly_roots(&p, 256).unwrap();
        o.check(roots.points.len() == k, format!("k={k}: {} roots", roots.points.len()));
        let mut reals: Vec<Float> = Vec::new();
        for (z, res) in roots.points.iter().zip(&roots.residuals) {
            o.check(z.imag().clone().abs() < tol, format!("k={k}: non-real root"));
            o.check(*z.real() > 0 && *z.real() < 1, format!("k={k}: root outside (0,1)"));
            o.check(*res < 1e-30, format!("k={k}: residual {}", res.to_f64()));
            if *res > worst {
                worst = res.clone();
            }
            reals.push(z.real().clone());
        }
        reals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        o.check(reals.windows(2).all(|w| Float::with_val(256, &w[1] - &w[0]) > 1e-6), format!("k={k}: repeated root"));
    }
    o.note(format!("max root residual {:.2e}", worst.to_f64()));
    o
}

fn criterion_4() -> Outcome {
    let mut o = Outcome::new();
    let mut count = 0;
    for name in PRESETS {
        let ms = measures(name);
        for n in indices(ms.len(), 6) {
            count += 1;
            let series: Vec<_> = ms.iter().map(|m| cauchy_series(m, required_terms(&n)).unwrap()).collect();
            let t2 = type_ii::<Rational>(&ms, &n).unwrap();
            match hp_type_ii(&series, &n) {
                Ok(h) => o.check(h.p == t2.poly, format!("{name} {n}: type II differs")),
                Err(e) => o.check(false, format!("{name} {n}: hp_type_ii {e}")),
            }
            let t1 = type_i::<Rational>(&ms, &n).unwrap();
            match hp_type_i(&series, &n) {
                Ok(h) => o.check(h.a == t1.polys, format!("{name} {n}: type I differs")),
                Err(e) => o.check(false, format!("{name} {n}: hp_type_i {e}")),
            }
        }
    }
    o.note(format!("{count} indices"));
    o
}

fn at_one(p: &Polynomial<Rational>) -> Rational {
    p.coeffs().iter().fold(Rational::new(), |acc, c| acc + c)
}

fn criterion_5() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let seq = apery_sequence(10, digits_to_bits(60)).unwrap();
    let s1 = &seq.steps[0];
    o.check(s1.approximant == Rational::from((6, 5)), format!("n=1 approximant {}", s1.approximant));
    let e1 = s1.abs_error.to_f64();
    o.check((e1 - 2.06e-3).abs() <= 1e-5, format!("n=1 error {e1:.5e}"));
    for w in seq.steps.windows(2) {
        o.check(w[1].abs_error < w[0].abs_error, format!("error does not decrease at n={}", w[1].n));
    }
    let e10 = seq.steps[9].abs_error.to_f64();
    o.check(e10 < 1e-12, format!("n=10 error {e10:.3e}"));
    for s in &seq.steps {
        o.check(at_one(&s.a) == 0, format!("A_{}(1) != 0", s.n));
        let need = s.n as i64 + 1;
        o.check(s.orders.iter().all(|&k| k >= need), format!("n={}: orders {:?}, need {need}", s.n, s.orders));
    }
    // ratios[i] = error(i+2) / error(i+1)
    for n in 6..=10 {
        let r = seq.ratios[n - 2].to_f64();
        o.check(
            (0.025..=0.035).contains(&r),
            format!("ratio error({n})/error({}) = {r:.4e} outside [0.025, 0.035]", n - 1),
        );
    }
    o.note(format!("error(10) {e10:.3e}"));
    o.within(start.elapsed(), 120);
    o
}

fn criterion_6() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let mut count = 0;
    for name in ["apery-pair", "hermite-ext:1,-1:1"] {
        let ms = measures(name);
        for n in indices(2, 5) {
            count += 1;
            match path_independence_check(&ms, &n, &[], 128) {
                Ok(r) => {
                    o.check(r.structural_deviation == 0, format!("{name} {n}: deviation {}", r.structural_deviation))
                }
                Err(e) => o.check(false, format!("{name} {n}: {e}")),
            }
        }
    }
    o.note(format!("{count} indices"));
    o.within(start.elapsed(), 60);
    o
}

fn criterion_7() -> Outcome {
    let mut o = Outcome::new();
    let leb = measures("lebesgue");
    let r = nn_recurrence(&leb, &MultiIndex::new(vec![1]).unwrap()).unwrap();
    o.check(r.is_exact(), "lebesgue (1): residual");
    o.check(r.b == [Rational::from((1, 2))], format!("lebesgue b = {:?}", r.b));
    o.check(r.a == [Rational::from((1, 12))], format!("lebesgue a = {:?}", r.a));
    for n in indices(1, 6) {
        match nn_recurrence(&leb, &n) {
            Ok(r) => o.check(r.is_exact(), format!("lebesgue {n}: residual")),
            Err(e) => o.check(false, format!("lebesgue {n}: {e}")),
        }
    }
    let pair = measures("apery-pair");
    let mut count = 0;
    for n in indices(2, 6) {
        count += 1;
        match nn_recurrence(&pair, &n) {
            Ok(r) => o.check(r.is_exact(), format!("apery-pair {n}: residual")),
            Err(e) => o.check(false, format!("apery-pair {n}: {e}")),
        }
    }
    o.note(format!("{count} apery-pair indices"));
    o
}

fn svg_valid(svg: &str, clouds: &[ZeroCloud]) -> Result<(), String> {
    let doc = roxmltree::Document::parse(svg).map_err(|e| e.to_string())?;
    let root = doc.root_element();
    if root.tag_name().name() != "svg" {
        return Err("root element is not <svg>".into());
    }
    let circles: Vec<_> = root.children().filter(|n| n.has_tag_name("circle")).collect();
    let total: usize = clouds.iter().map(|c| c.points.len()).sum();
    if circles.len() != total {
        return Err(format!("{} circles for {total} zeros", circles.len()));
    }
    let labels: Vec<String> = clouds.iter().map(|c| c.label.to_string()).collect();
    for c in circles {
        let class = c.attribute("class").unwrap_or("");
        if !labels.iter().any(|l| l == class) {
            return Err(format!("circle with class {class:?}"));
        }
        for a in ["cx", "cy"] {
            let v: f64 = c.attribute(a).and_then(|v| v.parse().ok()).ok_or(format!("bad {a}"))?;
            if !(0.0..=800.0).contains(&v) {
                return Err(format!("{a} = {v} off canvas"));
            }
        }
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let mut o = Outcome::new();
    let start = Instant::now();
    let n = MultiIndex::new(vec![40, 40]).unwrap();
    let r = match fig1_pipeline(&figure1_curve(), &n, 176, 512) {
        Ok(r) => r,
        Err(e) => {
            o.check(false, format!("pipeline: {e}"));
            return o;
        }
    };
    let elapsed = start.elapsed();
    o.check(r.order_of_contact >= 80, format!("order of contact {}", r.order_of_contact));
    o.note(format!("order {}", r.order_of_contact));
    for c in &r.clouds {
        let big: Vec<f64> =
            c.points.iter().map(|z| Float::with_val(64, z.abs_ref()).to_f64()).filter(|&m| m > 10.0).collect();
        o.check(
            big.is_empty(),
            format!(
                "{}: {} zeros with |z| > 10 (max {:.4e})",
                c.label,
                big.len(),
                big.iter().cloned().fold(0.0, f64::max)
            ),
        );
    }
    let csv = to_csv(&r.clouds);
    match parse_csv(&csv, 512) {
        Ok(back) => {
            let orig: Vec<(String, &Complex)> =
                r.clouds.iter().flat_map(|c| c.points.iter().map(move |z| (c.label.to_string(), z))).collect();
            let same = back.len() == orig.len()
                && back.iter().zip(&orig).all(|((l, z), (m, w))| l.to_string() == *m && z == *w);
            o.check(same, "CSV round trip");
        }
        Err(e) => o.check(false, format!("CSV parse: {e}")),
    }
    if let Err(e) = svg_valid(&to_svg(&r.clouds), &r.clouds) {
        o.check(false, format!("SVG: {e}"));
    }
    o.within(elapsed, 600);
    o
}

fn criterion_9() -> Outcome {
    let mut o = Outcome::new();
    for (name, max) in [("lebesgue", 6), ("apery-pair", 5), ("apery-triple", 5)] {
        match perfectness_scan(&measures(name), max) {
            Ok(f) => o.check(f.is_empty(), format!("{name}: {} non-normal indices", f.len())),
            Err(e) => o.check(false, format!("{name}: {e}")),
        }
    }
    let dup = vec![MeasureSpec::LebesgueUnit, MeasureSpec::LebesgueUnit];
    let one_one = MultiIndex::new(vec![1, 1]).unwrap();
    match perfectness_scan(&dup, 3) {
        Ok(f) => o.check(f.contains(&one_one), "duplicated pair: (1,1) not flagged"),
        Err(e) => o.check(false, format!("duplicated pair: {e}")),
    }
    o
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("exactness suite", criterion_1),
        ("transpose identity", criterion_2),
        ("classical reduction", criterion_3),
        ("moment/series duality", criterion_4),
        ("Apery pipeline", criterion_5),
        ("kernel path independence", criterion_6),
        ("nearest-neighbour recurrences", criterion_7),
        ("fig1 smoke at (40,40)", criterion_8),
        ("normality and perfectness", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let status = if o.failures.is_empty() { "PASS" } else { "FAIL" };
        let mut line = format!("criterion {}: {status} {name}", i + 1);
        if !o.notes.is_empty() {
            line.push_str(&format!(" ({})", o.notes.join(", ")));
        }
        println!("{line}");
        for msg in o.failures.iter().take(8) {
            println!("    {msg}");
        }
        if o.failures.len() > 8 {
            println!("    ... {} more", o.failures.len() - 8);
        }
        if !o.failures.is_empty() {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
