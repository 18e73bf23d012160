//! Halász polynomials and products.
//!
//! H_d has degree at most d, H(0) = 1, H(1) = 0 and sup norm at most
//! 1 + 2/d on the circle. The classical statement is existence only; here
//! the polynomial is produced by discretized minimax optimization (Lawson's
//! iteratively reweighted least squares with the two linear constraints),
//! the bound is then verified on a dense grid, and failure is loud.

use crate::error::{Error, Result};
use crate::measure::Angle;
use crate::poly::CirclePolynomial;
use crate::precision::PrecisionContext;
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

const VERIFY_GRID: usize = 1 << 14;

fn coeff_cache() -> &'static Mutex<HashMap<usize, Vec<Complex64>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Vec<Complex64>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Solves min sup_grid |H| over degree-≤d polynomials with H(0)=1, H(1)=0
/// by Lawson iteration; each step is an equality-constrained weighted least
/// squares problem solved through its KKT system.
fn minimax_coeffs(d: usize) -> Result<Vec<Complex64>> {
    if let Some(c) = coeff_cache().lock().unwrap().get(&d) {
        return Ok(c.clone());
    }
    let grid = (16 * (d + 1)).next_power_of_two().max(512);
    let thetas: Vec<f64> = (0..grid)
        .map(|g| 2.0 * std::f64::consts::PI * g as f64 / grid as f64)
        .collect();
    let mut planner = rustfft::FftPlanner::new();
    let fft = planner.plan_fft_forward(grid);
    let mut w = vec![1.0f64 / grid as f64; grid];
    let nvars = d + 1;
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    let mut last_sup = f64::INFINITY;
    let mut stall = 0usize;
    for _ in 0..600 {
        // Toeplitz normal matrix from the DFT of the weights
        let mut buf: Vec<Complex64> = w.iter().map(|x| Complex64::new(*x, 0.0)).collect();
        fft.process(&mut buf);
        // N_{jk} = t_{j-k}, t_r = Σ_g w_g e^{-i r θ_g} = DFT(w)[r]
        let t = |r: i64| -> Complex64 {
            let idx = r.rem_euclid(grid as i64) as usize;
            buf[idx]
        };
        // KKT: [N C^H; C 0][h; λ] = [0; b], constraints h_0 = 1, Σ h_j = 0
        let nk = nvars + 2;
        let mut a = vec![vec![Complex64::new(0.0, 0.0); nk]; nk];
        for j in 0..nvars {
            for k in 0..nvars {
                a[j][k] = t(j as i64 - k as i64);
            }
            a[j][j] += Complex64::new(1e-14, 0.0);
        }
        for j in 0..nvars {
            // C row 0: e_0; row 1: all ones
            let c0 = if j == 0 { 1.0 } else { 0.0 };
            a[nvars][j] = Complex64::new(c0, 0.0);
            a[nvars + 1][j] = Complex64::new(1.0, 0.0);
            a[j][nvars] = Complex64::new(c0, 0.0);
            a[j][nvars + 1] = Complex64::new(1.0, 0.0);
        }
        let mut rhs = vec![Complex64::new(0.0, 0.0); nk];
        rhs[nvars] = Complex64::new(1.0, 0.0);
        let sol = crate::linalg::solve_c64(&mut a, &mut rhs)
            .ok_or_else(|| Error::NonConvergence("singular KKT system in minimax fit".into()))?;
        let h = &sol[..nvars];
        // residuals on the grid and Lawson reweighting
        let mut sup = 0.0f64;
        let mut mags = vec![0.0f64; grid];
        for (g, &theta) in thetas.iter().enumerate() {
            let z = Complex64::from_polar(1.0, theta);
            let mut acc = Complex64::new(0.0, 0.0);
            for c in h.iter().rev() {
                acc = acc * z + c;
            }
            let m = acc.norm();
            mags[g] = m;
            if m > sup {
                sup = m;
            }
        }
        if best.as_ref().map_or(true, |(s, _)| sup < *s) {
            best = Some((sup, h.to_vec()));
        }
        if (last_sup - sup).abs() <= 1e-13 * sup {
            stall += 1;
            if stall >= 8 {
                break;
            }
        } else {
            stall = 0;
        }
        last_sup = sup;
        let mut total = 0.0f64;
        for g in 0..grid {
            w[g] = (w[g] * mags[g]).max(1e-280);
            total += w[g];
        }
        for x in w.iter_mut() {
            *x /= total;
        }
    }
    let (_, coeffs) = best.ok_or_else(|| Error::NonConvergence("minimax fit produced nothing".into()))?;
    coeff_cache().lock().unwrap().insert(d, coeffs.clone());
    Ok(coeffs)
}

fn eval_c64(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Degree-≤d polynomial with H(0)=1, H(1)=0 and verified sup ≤ 1 + 2/d on a
/// 2^14 grid (with 1e-6 slack).
pub fn halasz_polynomial(d: usize, ctx: PrecisionContext) -> Result<CirclePolynomial> {
    if d == 0 {
        return Err(Error::Precondition("Halász degree must be >= 1".into()));
    }
    let coeffs = minimax_coeffs(d)?;
    // constraint residuals
    let at_zero = coeffs[0];
    let at_one: Complex64 = coeffs.iter().sum();
    if (at_zero - Complex64::new(1.0, 0.0)).norm() > 1e-10 || at_one.norm() > 1e-10 {
        return Err(Error::BoundViolation {
            what: format!("Halász constraints at d = {d}"),
            achieved: (at_zero - Complex64::new(1.0, 0.0)).norm().max(at_one.norm()),
            target: 1e-10,
        });
    }
    let mut sup = 0.0f64;
    for g in 0..VERIFY_GRID {
        let theta = 2.0 * std::f64::consts::PI * g as f64 / VERIFY_GRID as f64;
        let m = eval_c64(&coeffs, Complex64::from_polar(1.0, theta)).norm();
        if m > sup {
            sup = m;
        }
    }
    let bound = 1.0 + 2.0 / d as f64 + 1e-6;
    if sup > bound {
        return Err(Error::BoundViolation {
            what: format!("Halász sup norm at d = {d}"),
            achieved: sup,
            target: bound,
        });
    }
    Ok(CirclePolynomial::from_c64_coeffs(ctx, &coeffs))
}

/// ∏_j H_d(z·conj(λ_j)) with d = ⌊n/k⌋: degree ≤ n, value 1 at the origin,
/// zero at every λ_j, sup ≤ (1+2/d)^k ≤ e^{4k²/n}. The empty product is the
/// constant 1.
pub fn halasz_product(
    points: &[Angle],
    n: usize,
    ctx: PrecisionContext,
) -> Result<CirclePolynomial> {
    let k = points.len();
    if k == 0 {
        return Ok(CirclePolynomial::one(ctx.bits()));
    }
    if 2 * k > n {
        return Err(Error::Precondition(format!(
            "need k <= n/2, got k = {k}, n = {n}"
        )));
    }
    let d = n / k;
    let h = halasz_polynomial(d, ctx)?;
    let mut prod = CirclePolynomial::one(ctx.bits());
    for p in points {
        let factor = h.compose_rotation(&p.unit(ctx).conj());
        prod = prod.mul(&factor);
    }
    Ok(prod)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::CFloat;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(128)
    }

    #[test]
    fn degree_one_is_one_minus_z() {
        let c = ctx();
        let h = halasz_polynomial(1, c).unwrap();
        assert_eq!(h.degree(), 1);
        assert!((h.coeffs()[0].re.to_f64() - 1.0).abs() < 1e-9);
        assert!((h.coeffs()[1].re.to_f64() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn degree_two_beats_two() {
        let c = ctx();
        let h = halasz_polynomial(2, c).unwrap();
        let sup = h.sup_on_grid(1 << 10, c).to_f64();
        assert!(sup <= 2.0 + 1e-6, "sup = {sup}");
    }

    #[test]
    fn constraints_hold_across_degrees() {
        let c = ctx();
        for d in [1usize, 3, 8, 21] {
            let h = halasz_polynomial(d, c).unwrap();
            let zero = h.eval(&CFloat::zero(c.bits()));
            let one = h.eval(&CFloat::one(c.bits()));
            assert!((zero.re.to_f64() - 1.0).abs() < 1e-10, "d = {d}");
            assert!(one.abs().to_f64() < 1e-10, "d = {d}");
        }
    }

    #[test]
    fn product_vanishes_at_its_points() {
        let c = ctx();
        let pts = vec![Angle::Real(0.12), Angle::Real(0.45), Angle::Real(0.83)];
        let p = halasz_product(&pts, 30, c).unwrap();
        assert!(p.degree() <= 30);
        assert!((p.eval(&CFloat::zero(c.bits())).re.to_f64() - 1.0).abs() < 1e-9);
        for pt in &pts {
            let v = p.eval(&pt.unit(c)).abs().to_f64();
            assert!(v <= 1e-9, "vanishing residual {v:e}");
        }
        // sup bound e^{4k²/n}
        let sup = p.sup_on_grid(1 << 12, c).to_f64();
        let bound = (4.0 * 9.0 / 30.0f64).exp() * (1.0 + 1e-6);
        assert!(sup <= bound);
    }

    #[test]
    fn antipodal_pair_bound() {
        let c = ctx();
        let pts = vec![Angle::turn(0, 2), Angle::turn(1, 2)];
        let p = halasz_product(&pts, 8, c).unwrap();
        let sup = p.sup_on_grid(1 << 12, c).to_f64();
        assert!(sup <= (2.0f64).exp(), "sup = {sup}");
    }

    #[test]
    fn empty_product_is_one() {
        let c = ctx();
        let p = halasz_product(&[], 10, c).unwrap();
        assert_eq!(p.degree(), 0);
        assert!((p.coeffs()[0].re.to_f64() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn oversized_point_set_rejected() {
        let c = ctx();
        let pts: Vec<Angle> = (0..5).map(|j| Angle::turn(j, 5)).collect();
        assert!(halasz_product(&pts, 8, c).is_err());
    }
}
