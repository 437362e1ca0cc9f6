//! Simultaneous (Aberth) root iteration in multiprecision complex arithmetic.
//!
//! Starting points sit on a circle of radius `1 + max|a_k|` of the monic
//! normalization, which encloses every root. A root stops moving once `|p(z)|`
//! falls inside the rounding bound of Horner evaluation, so clustered and
//! repeated roots terminate at the accuracy the precision allows.

use rug::float::Constant;
use rug::{Complex, Float};

use crate::error::{MopError, Result};
use crate::numerics::poly::Polynomial;
use crate::numerics::scalar::{check_precision, Scalar};

#[derive(Debug, Clone)]
pub struct RootSet {
    /// Roots sorted by real part, then imaginary part.
    pub points: Vec<Complex>,
    /// `|p(root)|` for the input polynomial, per root.
    pub residuals: Vec<Float>,
    pub precision: u32,
    pub iterations: usize,
}

/// Roots closer than the cluster tolerance, reported as one point with
/// multiplicity.
#[derive(Debug, Clone)]
pub struct RootCluster {
    pub center: Complex,
    pub multiplicity: usize,
}

impl RootSet {
    pub fn max_residual(&self) -> Float {
        self.residuals.iter().fold(Float::new(self.precision), |m, r| if *r > m { r.clone() } else { m })
    }

    /// Groups roots whose pairwise distance is below `2^(-precision/4)`.
    pub fn clusters(&self) -> Vec<RootCluster> {
        let n = self.points.len();
        let mut tol = Float::with_val(self.precision, 1);
        tol >>= self.precision / 4;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while parent[r] != r {
                r = parent[r];
            }
            parent[i] = r;
            r
        }
        for i in 0..n {
            for j in i + 1..n {
                let d = Float::with_val(
                    self.precision,
                    Complex::with_val(self.precision, &self.points[i] - &self.points[j]).abs_ref(),
                );
                if d < tol {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[b] = a;
                }
            }
        }
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        for i in 0..n {
            let r = find(&mut parent, i);
            match groups.iter_mut().find(|(root, _)| *root == r) {
                Some((_, members)) => members.push(i),
                None => groups.push((r, vec![i])),
            }
        }
        groups
            .into_iter()
            .map(|(_, members)| {
                let mut sum = Complex::new(self.precision);
                for &m in &members {
                    sum += &self.points[m];
                }
                sum /= members.len() as u32;
                RootCluster { center: sum, multiplicity: members.len() }
            })
            .collect()
    }

    /// `Π (x − z_i)`.
    pub fn reconstruct_monic(&self) -> Polynomial<Complex> {
        let one = Complex::with_val(self.precision, 1);
        self.points.iter().fold(Polynomial::constant(one.clone()), |acc, z| {
            acc.mul(&Polynomial::new(vec![Complex::with_val(self.precision, -z), one.clone()]))
        })
    }
}

fn horner_with_derivative(c: &[Complex], z: &Complex, prec: u32) -> (Complex, Complex) {
    let mut p = Complex::new(prec);
    let mut dp = Complex::new(prec);
    for a in c.iter().rev() {
        dp *= z;
        dp += &p;
        p *= z;
        p += a;
    }
    (p, dp)
}

fn abs(z: &Complex, prec: u32) -> Float {
    Float::with_val(prec, z.abs_ref())
}

/// All complex roots of `p` (with multiplicity) at `prec` bits.
pub fn poly_roots<T: Scalar>(p: &Polynomial<T>, prec: u32) -> Result<RootSet> {
    check_precision(prec)?;
    let degree = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(MopError::InvalidInput("root finding needs degree >= 1".into())),
    };
    let original = p.to_complex(prec);
    if Scalar::is_zero(original.leading().expect("nonzero polynomial")) {
        return Err(MopError::InvalidInput("leading coefficient is zero".into()));
    }
    let monic = original.monic();
    let c = monic.coeffs();

    let mut radius = Float::with_val(prec, 0);
    for a in &c[..degree] {
        let m = abs(a, prec);
        if m > radius {
            radius = m;
        }
    }
    radius += 1;
    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    let mut z: Vec<Complex> = (0..degree)
        .map(|k| {
            let angle = Float::with_val(prec, &two_pi * k as u32) / degree as u32 + 0.7f64;
            let (s, co) = angle.sin_cos(Float::new(prec));
            Complex::with_val(prec, (co * &radius, s * &radius))
        })
        .collect();

    let mut eps = Float::with_val(prec, 4 * (degree + 1) as u32);
    eps >>= prec;
    let max_iter = 200 + 4 * prec as usize;
    let mut converged = vec![false; degree];
    let mut iterations = 0;
    while iterations < max_iter && converged.iter().any(|c| !c) {
        iterations += 1;
        for i in 0..degree {
            if converged[i] {
                continue;
            }
            let (pz, dpz) = horner_with_derivative(c, &z[i], prec);
            let bound = Float::with_val(prec, monic.abs_eval(&abs(&z[i], prec)) * &eps);
            if abs(&pz, prec) <= bound {
                converged[i] = true;
                continue;
            }
            if Scalar::is_zero(&dpz) {
                // stationary point: nudge off it
                let nudge = Float::with_val(prec, 1) >> (prec / 2);
                z[i] *= Float::with_val(prec, 1 + nudge);
                continue;
            }
            let w = Complex::with_val(prec, &pz / &dpz);
            let mut s = Complex::new(prec);
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    let d = Complex::with_val(prec, &z[i] - zj);
                    if !Scalar::is_zero(&d) {
                        s += d.recip();
                    }
                }
            }
            let denom = Complex::with_val(prec, 1 - Complex::with_val(prec, &w * &s));
            let corr = if Scalar::is_zero(&denom) { w } else { w / denom };
            let small = abs(&corr, prec) <= Float::with_val(prec, abs(&z[i], prec) >> prec);
            z[i] -= corr;
            if !z[i].real().is_finite() || !z[i].imag().is_finite() {
                return Err(MopError::NonConvergence(format!("non-finite iterate after {iterations} steps")));
            }
            if small {
                converged[i] = true;
            }
        }
    }
    if converged.iter().any(|c| !c) {
        return Err(MopError::NonConvergence(format!(
            "{} of {degree} roots unconverged after {max_iter} iterations at {prec} bits",
            converged.iter().filter(|c| !**c).count()
        )));
    }

    // Newton polish, accepted only when it lowers |p|.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (pz, dpz) = horner_with_derivative(c, zi, prec);
            if Scalar::is_zero(&dpz) || Scalar::is_zero(&pz) {
                break;
            }
            let cand = Complex::with_val(prec, &*zi - Complex::with_val(prec, &pz / &dpz));
            let (pc, _) = horner_with_derivative(c, &cand, prec);
            if abs(&pc, prec) < abs(&pz, prec) {
                *zi = cand;
            } else {
                break;
            }
        }
    }

    z.sort_by(|a, b| {
        a.real()
            .partial_cmp(b.real())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.imag().partial_cmp(b.imag()).unwrap_or(std::cmp::Ordering::Equal))
    });
    let residuals = z.iter().map(|zi| abs(&original.eval(zi), prec)).collect();
    Ok(RootSet { points: z, residuals, precision: prec, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    fn close(z: &Complex, re: f64, im: f64, tol: f64) -> bool {
        let d = Complex::with_val(z.prec().0, z - Complex::with_val(64, (re, im)));
        Float::with_val(64, d.abs_ref()) < tol
    }

    #[test]
    fn quadratic_pm_one() {
        let r = poly_roots(&Polynomial::from_ints(&[-1, 0, 1]), 128).unwrap();
        assert!(close(&r.points[0], -1.0, 0.0, 1e-30));
        assert!(close(&r.points[1], 1.0, 0.0, 1e-30));
    }

    #[test]
    fn shifted_legendre_two() {
        let p = Polynomial::new(vec![Rational::from((1, 6)), Rational::from(-1), Rational::from(1)]);
        let r = poly_roots(&p, 256).unwrap();
        let s3 = Float::with_val(256, 3).sqrt();
        let lo = Float::with_val(256, 3 - &s3) / 6u32;
        let hi = Float::with_val(256, 3 + &s3) / 6u32;
        assert!(Float::with_val(256, r.points[0].real() - &lo).abs() < 1e-60);
        assert!(Float::with_val(256, r.points[1].real() - &hi).abs() < 1e-60);
        assert!(r.max_residual() < 1e-60);
    }

    #[test]
    fn triple_root_clusters() {
        let p = Polynomial::from_ints(&[-1, 3, -3, 1]);
        let r = poly_roots(&p, 256).unwrap();
        let cl = r.clusters();
        assert_eq!(cl.len(), 1);
        assert_eq!(cl[0].multiplicity, 3);
        assert!(close(&cl[0].center, 1.0, 0.0, 1e-20));
    }

    #[test]
    fn rejects_constants() {
        assert!(poly_roots(&Polynomial::from_ints(&[3]), 128).is_err());
        assert!(poly_roots(&Polynomial::from_ints(&[1, 1]), 16).is_err());
    }
}
