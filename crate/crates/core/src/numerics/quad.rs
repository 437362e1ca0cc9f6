//! Double-exponential quadrature in multiprecision.
//!
//! Used as an independent check on closed-form moments, never inside the
//! moment systems themselves. `[0, 1]` uses tanh-sinh with the endpoint
//! abscissae computed directly (so `log x` near 0 keeps full relative
//! accuracy); the real line uses sinh-sinh.

use rug::float::Constant;
use rug::Float;

const MAX_LEVEL: u32 = 14;

fn refine(prec: u32, mut level_sum: impl FnMut(&Float, bool) -> Float) -> Float {
    // level 0: h = 1
    let mut h = Float::with_val(prec, 1);
    let mut total = level_sum(&h, false);
    let mut estimate = Float::with_val(prec, &total * &h);
    let mut tol = Float::with_val(prec, 1);
    tol >>= prec.saturating_sub(8);
    for _ in 1..=MAX_LEVEL {
        h /= 2u32;
        total += level_sum(&h, true);
        let next = Float::with_val(prec, &total * &h);
        let diff = Float::with_val(prec, &next - &estimate).abs();
        let scale = Float::with_val(prec, next.abs_ref()).max(&Float::with_val(prec, 1));
        estimate = next;
        if diff <= Float::with_val(prec, &tol * &scale) {
            break;
        }
    }
    estimate
}

/// `∫₀¹ f(x) dx` for `f` smooth in the interior, possibly with integrable
/// endpoint singularities.
pub fn integrate_unit_interval(f: impl Fn(&Float) -> Float, prec: u32) -> Float {
    let half_pi = Float::with_val(prec, Constant::Pi) / 2u32;
    let mut cutoff = Float::with_val(prec, 1);
    cutoff >>= 2 * prec;
    refine(prec, |h, odd_only| {
        let mut sum = Float::new(prec);
        let mut k: u32 = if odd_only { 1 } else { 0 };
        loop {
            let u = Float::with_val(prec, h * k);
            let v = Float::with_val(prec, u.sinh_ref()) * &half_pi;
            let e2v = Float::with_val(prec, 2 * &v).exp();
            // x_small = 1/(1+e^{2v}), x_large = 1 - x_small
            let x_small = Float::with_val(prec, Float::with_val(prec, 1 + &e2v).recip_ref());
            let x_large = Float::with_val(prec, &e2v * &x_small);
            let cosh_v = Float::with_val(prec, v.cosh_ref());
            let w = Float::with_val(prec, u.cosh_ref()) * &half_pi / Float::with_val(prec, cosh_v.square_ref()) / 2u32;
            if w < cutoff || x_small.is_zero() {
                break;
            }
            let term = if k == 0 { f(&x_small) * &w } else { (f(&x_small) + f(&x_large)) * &w };
            sum += term;
            k += if odd_only { 2 } else { 1 };
        }
        sum
    })
}

/// `∫ f(x) dx` over the real line, with abscissae centred at `center`.
pub fn integrate_real_line(f: impl Fn(&Float) -> Float, center: &Float, prec: u32) -> Float {
    let half_pi = Float::with_val(prec, Constant::Pi) / 2u32;
    let mut cutoff = Float::with_val(prec, 1);
    cutoff >>= 2 * prec;
    refine(prec, |h, odd_only| {
        let mut sum = Float::new(prec);
        let mut k: u32 = if odd_only { 1 } else { 0 };
        loop {
            let u = Float::with_val(prec, h * k);
            let v = Float::with_val(prec, u.sinh_ref()) * &half_pi;
            let s = Float::with_val(prec, v.sinh_ref());
            let w = Float::with_val(prec, u.cosh_ref()) * &half_pi * Float::with_val(prec, v.cosh_ref());
            let right = f(&Float::with_val(prec, center + &s));
            let term = if k == 0 {
                Float::with_val(prec, &right * &w)
            } else {
                (right + f(&Float::with_val(prec, center - &s))) * &w
            };
            let small = Float::with_val(prec, term.abs_ref()) < cutoff;
            sum += term;
            if (small && k > 4) || k > 1_000_000 {
                break;
            }
            k += if odd_only { 2 } else { 1 };
        }
        sum
    })
}
