//! Checks against independently computed values: quadrature, brute-force
//! moment sums, direct substitution.

use mop_core::apery::apery_step;
use mop_core::hermitepade::{algebraic_series, figure1_curve};
use mop_core::measures::preset;
use mop_core::mopcore::{biortho_table, type_i, type_ii};
use mop_core::numerics::quad::{integrate_real_line, integrate_unit_interval};
use mop_core::series::polynomial_part_of_product;
use mop_core::zeros::{fig1_min_terms, fig1_pipeline};
use mop_core::{Complex, Float, Integer, LaurentSeries, MeasureSpec, MultiIndex, Polynomial, Rational};

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn idx(s: &str) -> MultiIndex {
    s.parse().unwrap()
}

fn quad_moment(m: &MeasureSpec, k: usize, prec: u32) -> Float {
    let integrand = |x: &Float| {
        let mut xk = Float::with_val(prec, 1);
        for _ in 0..k {
            xk *= x;
        }
        xk * m.normalized_weight_value(x, prec).unwrap()
    };
    match m {
        MeasureSpec::HermiteExternal { a, .. } => {
            let centre = Float::with_val(prec, a) / 2u32;
            integrate_real_line(integrand, &centre, prec)
        }
        _ => integrate_unit_interval(integrand, prec),
    }
}

#[test]
fn quadrature_matches_closed_form_moments() {
    let prec = 128;
    let families = [
        MeasureSpec::LebesgueUnit,
        MeasureSpec::log_weight(1).unwrap(),
        MeasureSpec::log_weight(2).unwrap(),
        MeasureSpec::hermite_external(q(1, 1), q(1, 1)).unwrap(),
        MeasureSpec::hermite_external(q(0, 1), q(2, 1)).unwrap(),
        MeasureSpec::hermite_external(q(-1, 2), q(3, 1)).unwrap(),
    ];
    for m in &families {
        for k in 0..=20 {
            let exact = Float::with_val(2 * prec, m.moment(k).unwrap());
            let numeric = quad_moment(m, k, 2 * prec);
            let mut tol = Float::with_val(2 * prec, exact.abs_ref()).max(&Float::with_val(2 * prec, 1));
            tol >>= prec / 2;
            let diff = Float::with_val(2 * prec, &numeric - &exact).abs();
            assert!(diff <= tol, "{m:?} k={k}: quadrature {numeric} vs {exact}");
        }
    }
}

#[test]
fn centred_hermite_odd_moments_vanish() {
    for s in [q(1, 1), q(1, 3), q(5, 2)] {
        let m = MeasureSpec::hermite_external(q(0, 1), s).unwrap();
        for (k, v) in m.moments(30).unwrap().iter().enumerate() {
            if k % 2 == 1 {
                assert_eq!(*v, 0, "k={k}");
            }
        }
    }
}

/// `Σ_j ∫ P_n A_{m,j} dμ_j` by expanding the product against raw moments.
fn brute_biortho(measures: &[MeasureSpec], m: &MultiIndex, n: &MultiIndex) -> Rational {
    let p = type_ii::<Rational>(measures, n).unwrap().poly;
    let a = type_i::<Rational>(measures, m).unwrap().polys;
    let mut total = Rational::new();
    for (aj, mu) in a.iter().zip(measures) {
        for (i, pc) in p.coeffs().iter().enumerate() {
            for (l, ac) in aj.coeffs().iter().enumerate() {
                total += Rational::from(pc * ac) * mu.moment(i + l).unwrap();
            }
        }
    }
    total
}

#[test]
fn biorthogonality_by_brute_force() {
    for name in ["lebesgue", "apery-pair", "hermite-ext:1,-1:1"] {
        let ms = preset(name).unwrap();
        let r = ms.len();
        let all: Vec<MultiIndex> = MultiIndex::all_up_to(r, 4).into_iter().collect();
        for m in all.iter().filter(|m| m.size() > 0) {
            for n in &all {
                let v = biortho_table(&ms, m, n).unwrap();
                assert_eq!(v, brute_biortho(&ms, m, n), "{name} m={m} n={n}");
                if m.dominated_by(n) {
                    assert_eq!(v, 0, "{name} m={m} n={n}");
                }
                if (0..r).any(|j| n.plus(j) == *m) {
                    assert_eq!(v, 1, "{name} m={m} n={n}");
                }
            }
        }
    }
}

fn content(polys: &[&Polynomial<Rational>]) -> Integer {
    let mut g = Integer::new();
    for p in polys {
        for c in p.coeffs() {
            assert_eq!(*c.denom(), 1, "non-integer coefficient {c}");
            g.gcd_mut(c.numer());
        }
    }
    g
}

#[test]
fn apery_forms_are_primitive_integer_vectors() {
    for n in 1..=15 {
        let s = apery_step(n, 128).unwrap();
        assert_eq!(content(&[&s.a, &s.b]), 1, "n={n}");
        assert!(*s.a.leading().unwrap() > 0);
        assert!(s.orders.iter().all(|&o| o > n as i64), "n={n}: {:?}", s.orders);
    }
}

#[test]
fn apery_approximant_is_scale_invariant() {
    let tails: Vec<Vec<Rational>> = preset("apery-triple").unwrap().iter().map(|m| m.moments(20).unwrap()).collect();
    let at_one = |p: &Polynomial<Rational>| p.coeffs().iter().fold(Rational::new(), |acc, c| acc + c);
    for n in 1..=6 {
        let s = apery_step(n, 128).unwrap();
        for lambda in [q(-3, 1), q(7, 5)] {
            let a = s.a.scale(&lambda);
            let b2 = s.b.scale(&lambda).scale(&q(2, 1));
            let d = polynomial_part_of_product(&a, &tails[1]).sub(&polynomial_part_of_product(&b2, &tails[2]));
            let approx = -at_one(&d) / at_one(&b2);
            assert_eq!(approx, s.approximant, "n={n}");
        }
    }
}

#[test]
fn zero_clouds_bound_their_residuals() {
    let n = idx("6,6");
    let r = fig1_pipeline(&figure1_curve(), &n, fig1_min_terms(&n), 256).unwrap();
    assert_eq!(r.clouds.len(), 3);
    for (j, c) in r.clouds.iter().take(2).enumerate() {
        assert!(c.points.len() < n.parts()[j], "deg A_{} exceeds cap", j + 1);
    }
    for c in &r.clouds {
        for z in &c.points {
            assert!(Float::with_val(64, z.abs_ref()).is_finite());
        }
        assert!(c.residual_max < 1e-40, "{}: {}", c.label, c.residual_max);
    }
}

#[test]
fn figure1_series_satisfies_the_cubic() {
    let prec = 256;
    let curve = figure1_curve();
    let e = algebraic_series(&curve, 30, prec).unwrap();
    let w = &e.series;
    let coeff =
        |m: usize| Polynomial::new(curve.coefficients[m].iter().map(|g| g.to_complex(prec)).collect::<Vec<Complex>>());
    let mut g = LaurentSeries::new(coeff(0), vec![Complex::new(prec); w.terms()]);
    let mut power = w.clone();
    for m in 1..curve.coefficients.len() {
        g = g.add(&power.mul_poly(&coeff(m)));
        power = power.mul(w).unwrap();
    }
    let mut tol = Float::with_val(prec, 1);
    tol >>= prec / 2;
    for c in g.poly_part.coeffs().iter().chain(&g.tail) {
        assert!(Float::with_val(prec, c.abs_ref()) < tol, "residual coefficient {c}");
    }
    assert!(g.terms() >= 20);
}
