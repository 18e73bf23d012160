//! Adaptive Gauss–Legendre quadrature in extended precision.
//!
//! Moments of the smooth density families need absolute accuracy far below
//! `f64`, and moment orders reach into the thousands, so panels are sized
//! against the oscillation frequency first and refined adaptively after.

use crate::error::{Error, Result};
use crate::precision::{CFloat, CompleteAt, PrecisionContext};
use rug::ops::Pow;
use rug::Float;
use std::collections::HashMap;
use std::sync::{Arc as StdArc, Mutex, OnceLock};

const GL_ORDER: usize = 24;
const MAX_DEPTH: usize = 48;

type NodeTable = StdArc<(Vec<Float>, Vec<Float>)>;

fn node_cache() -> &'static Mutex<HashMap<(usize, u32), NodeTable>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), NodeTable>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss–Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence at the requested precision and cached.
pub fn gl_nodes(order: usize, prec: u32) -> NodeTable {
    if let Some(t) = node_cache().lock().unwrap().get(&(order, prec)) {
        return t.clone();
    }
    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    for i in 0..order {
        // Chebyshev-type initial guess
        let mut x = Float::with_val(prec, -((2 * i + 1) as f64));
        x *= &pi;
        x /= (2 * order) as f64;
        let mut x = -x.cos();
        // Newton on P_order(x)
        for _ in 0..(prec as usize / 8 + 16) {
            let (p, dp) = legendre(order, &x, prec);
            let step = (&p / &dp).at(prec);
            x -= &step;
            if step.clone().abs() < Float::with_val(prec, 2f64).pow(-(prec as i32) + 4) {
                break;
            }
        }
        let (_, dp) = legendre(order, &x, prec);
        let mut w = Float::with_val(prec, 1) - (&x * &x).at(prec);
        w *= dp.clone().square();
        let w = (Float::with_val(prec, 2) / w).at(prec);
        nodes.push(x);
        weights.push(w);
    }
    let t = StdArc::new((nodes, weights));
    node_cache()
        .lock()
        .unwrap()
        .insert((order, prec), t.clone());
    t
}

/// Legendre polynomial value and derivative via the three-term recurrence.
fn legendre(order: usize, x: &Float, prec: u32) -> (Float, Float) {
    let mut p0 = Float::with_val(prec, 1);
    let mut p1 = Float::with_val(prec, x);
    for k in 2..=order {
        let a = (2 * k - 1) as u32;
        let b = (k - 1) as u32;
        let mut p2 = (x * &p1).at(prec);
        p2 *= a;
        p2 -= (&p0 * Float::with_val(prec, b)).at(prec);
        p2 /= k as u32;
        p0 = p1;
        p1 = p2;
    }
    // P'_n = n (x P_n - P_{n-1}) / (x² - 1)
    let n = Float::with_val(prec, order as u32);
    let mut num = (x * &p1).at(prec);
    num -= &p0;
    num *= &n;
    let mut den = (x * x).at(prec);
    den -= 1u32;
    (p1, num / den)
}

fn gl_panel(
    f: &dyn Fn(&Float) -> CFloat,
    a: &Float,
    b: &Float,
    ctx: PrecisionContext,
) -> CFloat {
    let prec = ctx.bits();
    let table = gl_nodes(GL_ORDER, prec);
    let half = ((b - a).at(prec)) >> 1u32;
    let mid = ((a + b).at(prec)) >> 1u32;
    let mut acc = CFloat::zero(prec);
    for (x, w) in table.0.iter().zip(table.1.iter()) {
        let mut t: Float = (&half * x).at(prec);
        t += &mid;
        let v = f(&t).mul_real(w);
        acc.add_assign(&v);
    }
    acc.mul_real(&half)
}

/// ∫_a^b f(θ) dθ for complex-valued f, adaptive bisection with a per-call
/// absolute tolerance. Errors out with the achieved estimate if the depth
/// limit is hit before the tolerance.
pub fn integrate(
    f: &dyn Fn(&Float) -> CFloat,
    a: &Float,
    b: &Float,
    tol: &Float,
    ctx: PrecisionContext,
) -> Result<CFloat> {
    let whole = gl_panel(f, a, b, ctx);
    adaptive(f, a, b, &whole, tol, ctx, 0)
}

fn adaptive(
    f: &dyn Fn(&Float) -> CFloat,
    a: &Float,
    b: &Float,
    whole: &CFloat,
    tol: &Float,
    ctx: PrecisionContext,
    depth: usize,
) -> Result<CFloat> {
    let prec = ctx.bits();
    let mid = ((a + b).at(prec)) >> 1u32;
    let left = gl_panel(f, a, &mid, ctx);
    let right = gl_panel(f, &mid, b, ctx);
    let refined = left.add(&right);
    let err = refined.dist(whole);
    if err <= *tol {
        return Ok(refined);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureTolerance {
            requested: tol.to_f64(),
            achieved: err.to_f64(),
        });
    }
    let half_tol = (tol / Float::with_val(prec, 2)).at(prec);
    let l = adaptive(f, a, &mid, &left, &half_tol, ctx, depth + 1)?;
    let r = adaptive(f, &mid, b, &right, &half_tol, ctx, depth + 1)?;
    Ok(l.add(&r))
}

/// ∫_a^b f(θ) e^{-imθ} dθ. Panels are pre-split to at most ~half an
/// oscillation period before the adaptive stage sees them.
pub fn integrate_oscillatory(
    f: &dyn Fn(&Float) -> Float,
    a: &Float,
    b: &Float,
    m: i64,
    tol: &Float,
    ctx: PrecisionContext,
) -> Result<CFloat> {
    let prec = ctx.bits();
    let g = |theta: &Float| -> CFloat {
        let mut phase = (theta * Float::with_val(prec, -m)).at(prec);
        if m == 0 {
            phase = Float::new(prec);
        }
        ctx.cis(&phase).mul_real(&f(theta))
    };
    let len = (b - a).at(prec);
    let freq = m.unsigned_abs().max(1);
    let mut panels = (len.to_f64() * freq as f64 / 3.0).ceil() as usize;
    panels = panels.clamp(1, 1 << 20);
    let step = (&len / Float::with_val(prec, panels as u64)).at(prec);
    let panel_tol = (tol / Float::with_val(prec, panels as u64)).at(prec);
    let mut acc = CFloat::zero(prec);
    for i in 0..panels {
        let pa = (a + (&step * Float::with_val(prec, i as u64)).at(prec)).at(prec);
        let pb = if i + 1 == panels {
            b.clone()
        } else {
            (a + (&step * Float::with_val(prec, (i + 1) as u64)).at(prec)).at(prec)
        };
        let part = integrate(&g, &pa, &pb, &panel_tol, ctx)?;
        acc.add_assign(&part);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomial_exactly() {
        let ctx = PrecisionContext::new(128);
        let f = |x: &Float| CFloat::from_real(x.clone().square());
        let v = integrate(
            &f,
            &ctx.real(0.0),
            &ctx.real(2.0),
            &ctx.real(1e-35),
            ctx,
        )
        .unwrap();
        assert!((v.re.to_f64() - 8.0 / 3.0).abs() < 1e-30);
    }

    #[test]
    fn oscillatory_character_orthogonality() {
        // ∫_0^{2π} e^{-imθ} dθ = 0 for m ≠ 0
        let ctx = PrecisionContext::new(128);
        let one = |_: &Float| ctx.one();
        let v = integrate_oscillatory(
            &one,
            &ctx.zero(),
            &ctx.two_pi(),
            17,
            &ctx.real(1e-35),
            ctx,
        )
        .unwrap();
        assert!(v.abs().to_f64() < 1e-33);
    }

    #[test]
    fn oscillatory_matches_closed_form() {
        // ∫_0^1 θ e^{-i5θ} dθ, closed form via integration by parts
        let ctx = PrecisionContext::new(128);
        let f = |x: &Float| x.clone();
        let v = integrate_oscillatory(&f, &ctx.zero(), &ctx.one(), 5, &ctx.real(1e-35), ctx)
            .unwrap();
        let m = 5.0f64;
        // ∫ θ e^{-imθ} = [θ e^{-imθ}/(-im)] + e^{-imθ}/m² over [0,1]
        let re = (m.cos() + m * m.sin() - 1.0) / (m * m);
        let im = (m.sin() - m * m.cos()) / (m * m);
        assert!((v.re.to_f64() - re).abs() < 1e-14);
        assert!((v.im.to_f64() - (-im)).abs() < 1e-14);
    }
}
