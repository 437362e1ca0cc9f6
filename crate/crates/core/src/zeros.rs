//! Zero sets of computed polynomials, the fig1 pipeline, and CSV/SVG
//! output.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rug::{Complex, Float};

use crate::error::{MopError, Result};
use crate::hermitepade::{algebraic_series, hp_type_i, AlgebraicCurveSpec, BranchSeed};
use crate::mopcore::MultiIndex;
use crate::numerics::text::{format_float, parse_complex};
use crate::numerics::{poly_roots, Polynomial, Scalar};
use crate::series::LaurentSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ZeroLabel {
    A1,
    A2,
    B,
    P,
}

impl ZeroLabel {
    fn color(self) -> &'static str {
        match self {
            ZeroLabel::A1 => "#1f77b4",
            ZeroLabel::A2 => "#d62728",
            ZeroLabel::B => "#2ca02c",
            ZeroLabel::P => "#9467bd",
        }
    }
}

impl fmt::Display for ZeroLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ZeroLabel::A1 => "A1",
            ZeroLabel::A2 => "A2",
            ZeroLabel::B => "B",
            ZeroLabel::P => "P",
        })
    }
}

impl FromStr for ZeroLabel {
    type Err = MopError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A1" => Ok(ZeroLabel::A1),
            "A2" => Ok(ZeroLabel::A2),
            "B" => Ok(ZeroLabel::B),
            "P" => Ok(ZeroLabel::P),
            _ => Err(MopError::Parse(format!("unknown zero label {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ZeroCloud {
    pub label: ZeroLabel,
    pub points: Vec<Complex>,
    pub index: MultiIndex,
    /// Largest `|p(z)/lc(p)|` over the points, evaluated at twice the
    /// working precision.
    pub residual_max: Float,
    pub precision: u32,
}

/// Zeros of `poly` with a residual report. Constants give an empty cloud.
pub fn zero_cloud<T: Scalar>(
    poly: &Polynomial<T>,
    label: ZeroLabel,
    index: &MultiIndex,
    prec: u32,
) -> Result<ZeroCloud> {
    let degree = poly.degree().ok_or_else(|| MopError::InvalidInput("zero polynomial has no zero set".into()))?;
    if degree == 0 {
        return Ok(ZeroCloud {
            label,
            points: Vec::new(),
            index: index.clone(),
            residual_max: Float::new(prec),
            precision: prec,
        });
    }
    let roots = poly_roots(poly, prec)?;
    let monic = poly.to_complex(2 * prec).monic();
    let mut residual_max = Float::new(prec);
    for z in &roots.points {
        let r = Float::with_val(prec, monic.eval(&Complex::with_val(2 * prec, z)).abs_ref());
        if r > residual_max {
            residual_max = r;
        }
    }
    Ok(ZeroCloud { label, points: roots.points, index: index.clone(), residual_max, precision: prec })
}

#[derive(Debug, Clone)]
pub struct Fig1Result {
    /// `A_{n,1}`, `A_{n,2}` and `B_n`, in that order.
    pub clouds: Vec<ZeroCloud>,
    pub order_of_contact: i64,
    pub remainder_vanishes: bool,
    pub series_residual: Float,
    /// Refined leading coefficient of the expanded branch.
    pub leading: Complex,
    pub seed: BranchSeed,
    pub terms: usize,
    pub precision: u32,
}

/// Minimum series length for index `n`.
pub fn fig1_min_terms(n: &MultiIndex) -> usize {
    2 * n.size() + 16
}

/// Type I Hermite-Padé for `f₁ = w`, `f₂ = w²` on the seeded branch of
/// `curve`, and the zeros of `A_{n,1}`, `A_{n,2}`, `B_n`.
pub fn fig1_pipeline(curve: &AlgebraicCurveSpec, n: &MultiIndex, terms: usize, prec: u32) -> Result<Fig1Result> {
    if n.r() != 2 {
        return Err(MopError::InvalidInput(format!("fig1 needs a two-component index, got {n}")));
    }
    if terms < fig1_min_terms(n) {
        return Err(MopError::InsufficientTerms(format!(
            "{terms} terms; index {n} needs at least {}",
            fig1_min_terms(n)
        )));
    }
    // w² loses one tail term to the linear polynomial part of w
    let expansion = algebraic_series(curve, terms + 1, prec)?;
    let w2 = expansion.series.mul(&expansion.series)?;
    let w: LaurentSeries<Complex> = expansion.series.truncated(terms);
    let hp = hp_type_i(&[w, w2.truncated(terms)], n)?;
    let labels = [ZeroLabel::A1, ZeroLabel::A2];
    let mut clouds: Vec<ZeroCloud> =
        hp.a.iter().zip(labels).map(|(p, l)| zero_cloud(p, l, n, prec)).collect::<Result<_>>()?;
    clouds.push(zero_cloud(&hp.b, ZeroLabel::B, n, prec)?);
    Ok(Fig1Result {
        clouds,
        order_of_contact: hp.achieved_order,
        remainder_vanishes: hp.remainder_vanishes,
        series_residual: expansion.residual_max,
        leading: expansion.leading,
        seed: curve.seed.clone(),
        terms,
        precision: prec,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Svg,
}

pub fn to_csv(clouds: &[ZeroCloud]) -> String {
    let mut out = String::from("label,re,im\n");
    for c in clouds {
        for z in &c.points {
            out.push_str(&format!("{},{},{}\n", c.label, format_float(z.real()), format_float(z.imag())));
        }
    }
    out
}

/// Labelled points from CSV text, parsed at `prec` bits.
pub fn parse_csv(text: &str, prec: u32) -> Result<Vec<(ZeroLabel, Complex)>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("label,re,im") => {}
        other => return Err(MopError::Parse(format!("bad CSV header {other:?}"))),
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let fields: Vec<&str> = l.split(',').collect();
            let [label, re, im] = fields[..] else {
                return Err(MopError::Parse(format!("bad CSV row {l:?}")));
            };
            Ok((label.parse()?, parse_complex(re, im, prec)?))
        })
        .collect()
}

const SVG_SIZE: f64 = 800.0;

pub fn to_svg(clouds: &[ZeroCloud]) -> String {
    let pts: Vec<(ZeroLabel, f64, f64)> = clouds
        .iter()
        .flat_map(|c| c.points.iter().map(move |z| (c.label, z.real().to_f64(), z.imag().to_f64())))
        .collect();
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">\n",
        s = SVG_SIZE
    );
    let mut labels: Vec<ZeroLabel> = clouds.iter().map(|c| c.label).collect();
    labels.sort();
    labels.dedup();
    out.push_str("<style>\n");
    for l in &labels {
        out.push_str(&format!(".{l} {{ fill: {}; stroke: none; }}\n", l.color()));
    }
    out.push_str(".axis { stroke: #999999; stroke-width: 1; }\n</style>\n");
    if !pts.is_empty() {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(_, x, y) in &pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-12);
        let margin = 0.05 * span;
        let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
        let half = span / 2.0 + margin;
        let sx = |x: f64| (x - (cx - half)) / (2.0 * half) * SVG_SIZE;
        let sy = |y: f64| ((cy + half) - y) / (2.0 * half) * SVG_SIZE;
        if (cy - half..=cy + half).contains(&0.0) {
            out.push_str(&format!(
                "<line class=\"axis\" x1=\"0\" y1=\"{0:.3}\" x2=\"{1}\" y2=\"{0:.3}\"/>\n",
                sy(0.0),
                SVG_SIZE
            ));
        }
        if (cx - half..=cx + half).contains(&0.0) {
            out.push_str(&format!(
                "<line class=\"axis\" x1=\"{0:.3}\" y1=\"0\" x2=\"{0:.3}\" y2=\"{1}\"/>\n",
                sx(0.0),
                SVG_SIZE
            ));
        }
        for (l, x, y) in pts {
            out.push_str(&format!("<circle class=\"{l}\" cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\"/>\n", sx(x), sy(y)));
        }
    }
    out.push_str("</svg>\n");
    out
}

pub fn emit(clouds: &[ZeroCloud], format: EmitFormat, path: &Path) -> Result<()> {
    let text = match format {
        EmitFormat::Csv => to_csv(clouds),
        EmitFormat::Svg => to_svg(clouds),
    };
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitepade::figure1_curve;
    use rug::Rational;

    fn idx(s: &str) -> MultiIndex {
        s.parse().unwrap()
    }

    #[test]
    fn legendre_zeros() {
        let p = Polynomial::new(vec![Rational::from((1, 6)), Rational::from(-1), Rational::from(1)]);
        let c = zero_cloud(&p, ZeroLabel::P, &idx("2"), 128).unwrap();
        assert_eq!(c.points.len(), 2);
        assert!((c.points[0].real().to_f64() - 0.21132486540518713).abs() < 1e-15);
        assert!((c.points[1].real().to_f64() - 0.7886751345948129).abs() < 1e-15);
        let half =
            zero_cloud(&Polynomial::new(vec![Rational::from((-1, 2)), Rational::from(1)]), ZeroLabel::P, &idx("1"), 64)
                .unwrap();
        assert_eq!(half.points[0].real().to_f64(), 0.5);
        let empty = zero_cloud(&Polynomial::from_ints(&[3]), ZeroLabel::P, &idx("0"), 64).unwrap();
        assert!(empty.points.is_empty());
    }

    #[test]
    fn small_figure1() {
        let n = idx("5,5");
        let r = fig1_pipeline(&figure1_curve(), &n, fig1_min_terms(&n), 256).unwrap();
        assert_eq!(r.clouds[0].points.len(), 4);
        assert_eq!(r.clouds[1].points.len(), 4);
        assert!(r.order_of_contact >= 10);
        let csv = to_csv(&r.clouds);
        let total: usize = r.clouds.iter().map(|c| c.points.len()).sum();
        assert_eq!(csv.lines().count(), total + 1);
        let back = parse_csv(&csv, 256).unwrap();
        let orig: Vec<&Complex> = r.clouds.iter().flat_map(|c| &c.points).collect();
        assert!(back.iter().zip(orig).all(|((_, a), b)| a == b));
        let svg = to_svg(&r.clouds);
        for class in [".A1 ", ".A2 ", ".B "] {
            assert!(svg.contains(class));
        }
    }

    #[test]
    fn empty_outputs() {
        assert_eq!(to_csv(&[]), "label,re,im\n");
        assert!(to_svg(&[]).contains("</svg>"));
        assert!(!to_svg(&[]).contains("<circle"));
    }
}
