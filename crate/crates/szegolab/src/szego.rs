//! The Szegő minimum problem: e_n(ρ), the monic extremal polynomial and the
//! recursion coefficients, from moments.
//!
//! The structured path is a Levinson-type sweep on the Hermitian Toeplitz
//! moment matrix; `brute_force_en` solves the same least-squares problem by
//! a dense Hermitian factorization without using the Toeplitz structure and
//! serves as an independent oracle.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CholeskyOutcome};
use crate::measure::{Measure, MomentSequence};
use crate::poly::CirclePolynomial;
use crate::precision::{CFloat, CompleteAt, PrecisionContext};
use rug::Float;

/// Result of the minimum problem at one degree.
#[derive(Clone, Debug)]
pub struct SzegoResult {
    pub n: usize,
    /// e_n(ρ); exactly zero when degenerate.
    pub e: Float,
    /// Monic minimizer of degree n. In the degenerate case this is a (no
    /// longer unique) annihilating polynomial z^{n-k} Φ_k.
    pub extremal: CirclePolynomial,
    /// Szegő recursion coefficients, one per step; all moduli <= 1.
    pub recursion_coeffs: Vec<CFloat>,
    pub degenerate: bool,
    /// Index of the first Levinson residual at or below the positive
    /// definiteness threshold, when degenerate.
    pub first_singular: Option<usize>,
    /// log10(e_0² / e_n²): conditioning proxy for the solve.
    pub condition_estimate: f64,
}

fn default_moment_tol(ctx: PrecisionContext) -> f64 {
    // quadrature tolerance well below the degeneracy threshold 2^{-bits/2}
    2f64.powi(-(ctx.bits() as i32) * 3 / 4)
}

/// Degeneracy threshold: a residual at or below this multiple of e_0² is
/// treated as exact rank deficiency at the configured precision.
fn degeneracy_threshold(e0_sq: &Float, ctx: PrecisionContext) -> Float {
    let prec = ctx.bits();
    let mut t = Float::with_val(prec, 1);
    t >>= ctx.bits() / 2;
    (e0_sq * t).at(prec)
}

/// Gram matrix of {1, t, …, t^n} in L²(ρ): entry (j,k) = c_{k-j}.
pub fn gram_toeplitz(moments: &MomentSequence, n: usize, ctx: PrecisionContext) -> Result<CMatrix> {
    if moments.order() < n {
        return Err(Error::MomentOrder {
            requested: n,
            reason: format!("moment sequence has order {}", moments.order()),
        });
    }
    let mut m = CMatrix::zero(n + 1, ctx.bits());
    for j in 0..=n {
        for k in 0..=n {
            m.set(j, k, moments.at(k as i64 - j as i64));
        }
    }
    Ok(m)
}

/// Levinson sweep producing every prefix result e_0..e_{n_max}.
pub fn en_profile_from_moments(
    moments: &MomentSequence,
    n_max: usize,
    ctx: PrecisionContext,
) -> Result<Vec<SzegoResult>> {
    if moments.order() < n_max {
        return Err(Error::MomentOrder {
            requested: n_max,
            reason: format!("moment sequence has order {}", moments.order()),
        });
    }
    let prec = ctx.bits();
    let e0_sq = moments.mass().clone();
    if !(e0_sq.is_finite() && e0_sq.is_sign_positive() && !e0_sq.is_zero()) {
        return Err(Error::InvalidMeasure("total mass must be positive".into()));
    }
    let threshold = degeneracy_threshold(&e0_sq, ctx);

    let mut results: Vec<SzegoResult> = Vec::with_capacity(n_max + 1);
    let mut phi: Vec<CFloat> = vec![CFloat::one(prec)]; // monic Φ_0 = 1
    let mut energy = e0_sq.clone(); // E_k = e_k²
    let mut coeffs: Vec<CFloat> = Vec::new();
    let mut first_singular: Option<usize> = None;

    let push_result = |results: &mut Vec<SzegoResult>,
                       n: usize,
                       energy: &Float,
                       phi: &[CFloat],
                       coeffs: &[CFloat],
                       first_singular: Option<usize>| {
        let degenerate = first_singular.is_some();
        let e = if degenerate {
            Float::new(prec)
        } else {
            energy.clone().sqrt()
        };
        let extremal = if degenerate {
            // z^{n-k} Φ_k still annihilates within the threshold
            let k = phi.len() - 1;
            let mut c = vec![CFloat::zero(prec); n + 1];
            for (i, v) in phi.iter().enumerate() {
                c[n - k + i] = v.clone();
            }
            CirclePolynomial::monic_from_coeffs(c)
        } else {
            CirclePolynomial::monic_from_coeffs(phi.to_vec())
        };
        let cond = if energy.is_zero() {
            f64::INFINITY
        } else {
            ((e0_sq.clone() / energy.clone()).log10()).to_f64()
        };
        results.push(SzegoResult {
            n,
            e,
            extremal,
            recursion_coeffs: coeffs.to_vec(),
            degenerate,
            first_singular,
            condition_estimate: cond,
        });
    };

    push_result(&mut results, 0, &energy, &phi, &coeffs, None);

    for k in 0..n_max {
        if first_singular.is_none() {
            // delta_k = <zΦ_k, 1> = Σ_i φ_i conj(c_{i+1})
            let mut delta = CFloat::zero(prec);
            for (i, p) in phi.iter().enumerate() {
                delta.mul_add_assign(p, &moments.at(i as i64 + 1).conj());
            }
            let alpha = delta.div_real(&energy); // conj of Verblunsky coefficient
            let next_energy = {
                let mut e = energy.clone();
                e -= (delta.norm_sqr() / &energy).at(prec);
                e
            };
            // Φ_{k+1}(z) = zΦ_k(z) - α·Φ_k*(z); still valid at a degenerate
            // step, where it becomes an annihilating polynomial
            let mut next = vec![CFloat::zero(prec); phi.len() + 1];
            for (i, p) in phi.iter().enumerate() {
                next[i + 1] = p.clone();
            }
            let deg = phi.len() - 1;
            for i in 0..=deg {
                let t = alpha.mul(&phi[deg - i].conj());
                next[i].sub_assign(&t);
            }
            phi = next;
            if next_energy <= threshold {
                first_singular = Some(k + 1);
                energy = Float::new(prec);
            } else {
                energy = next_energy;
            }
            coeffs.push(alpha);
        } else {
            coeffs.push(CFloat::zero(prec));
        }
        push_result(&mut results, k + 1, &energy, &phi, &coeffs, first_singular);
    }
    Ok(results)
}

pub fn en_profile(
    measure: &Measure,
    n_max: usize,
    ctx: PrecisionContext,
) -> Result<Vec<SzegoResult>> {
    let moments = measure.moments(n_max, default_moment_tol(ctx), ctx)?;
    en_profile_from_moments(&moments, n_max, ctx)
}

pub fn szego_en_from_moments(
    moments: &MomentSequence,
    n: usize,
    ctx: PrecisionContext,
) -> Result<SzegoResult> {
    Ok(en_profile_from_moments(moments, n, ctx)?.pop().unwrap())
}

/// e_n(ρ) with the extremal polynomial, by the Levinson sweep.
pub fn szego_en(measure: &Measure, n: usize, ctx: PrecisionContext) -> Result<SzegoResult> {
    let moments = measure.moments(n, default_moment_tol(ctx), ctx)?;
    szego_en_from_moments(&moments, n, ctx)
}

/// Independent oracle: dense Hermitian solve of the normal equations, no
/// Toeplitz structure used. For purely atomic measures the minimum value is
/// evaluated through the exact finite-sum objective.
pub fn brute_force_en(measure: &Measure, n: usize, ctx: PrecisionContext) -> Result<Float> {
    let prec = ctx.bits();
    let moments = measure.moments(n, default_moment_tol(ctx), ctx)?;
    let e0_sq = moments.mass().clone();
    if n == 0 {
        return Ok(e0_sq.sqrt());
    }
    let threshold = degeneracy_threshold(&e0_sq, ctx);
    // normal equations: Σ_{j<n} q_j c_{k-j} = -c_{k-n}, k = 0..n-1
    let mut t = CMatrix::zero(n, prec);
    for j in 0..n {
        for k in 0..n {
            t.set(k, j, moments.at(j as i64 - k as i64).conj());
        }
    }
    // entry (k,j) should be c_{j-k} as coefficient of q_j in row k
    let rhs: Vec<CFloat> = (0..n)
        .map(|k| moments.at(k as i64 - n as i64).neg())
        .collect();
    let mut l = t.clone();
    let scaled_threshold = (&threshold / Float::with_val(prec, n as u64 + 1)).at(prec);
    match linalg::cholesky(&mut l, &scaled_threshold) {
        CholeskyOutcome::SingularAt(_) => return Ok(Float::new(prec)),
        CholeskyOutcome::Done => {}
    }
    let mut coeffs = linalg::cholesky_solve(&l, &rhs);
    coeffs.push(CFloat::one(prec));

    let value = if measure.is_purely_atomic() {
        // exact finite-sum objective Σ a_j |P(λ_j)|²
        let poly = CirclePolynomial::monic_from_coeffs(coeffs);
        let mut s = Float::new(prec);
        for (angle, mass) in measure.atoms() {
            let z = angle.unit(ctx);
            let v = poly.eval(&z);
            s += v.norm_sqr() * ctx.real(mass);
        }
        s
    } else {
        // quadratic form Σ p_j conj(p_k) c_{k-j}
        let mut s = CFloat::zero(prec);
        for (j, pj) in coeffs.iter().enumerate() {
            for (k, pk) in coeffs.iter().enumerate() {
                let t = pj.mul(&pk.conj()).mul(&moments.at(k as i64 - j as i64));
                s.add_assign(&t);
            }
        }
        s.re
    };
    let value = if value < 0 { Float::new(prec) } else { value };
    Ok(value.sqrt())
}

/// Determinant of the size-k Gram matrix (dense LU; test support for the
/// identity e_n² · det T_n = det T_{n+1}).
pub fn gram_determinant(
    moments: &MomentSequence,
    size: usize,
    ctx: PrecisionContext,
) -> Result<Float> {
    if size == 0 {
        return Ok(ctx.one());
    }
    let g = gram_toeplitz(moments, size - 1, ctx)?;
    Ok(linalg::lu_det(&g, ctx).re)
}

/// ∫ |P|² dρ computed through moments: Σ_{j,k} p_j conj(p_k) c_{k-j}.
pub fn integrate_abs2_via_moments(
    poly: &CirclePolynomial,
    moments: &MomentSequence,
) -> Result<Float> {
    let d = poly.degree();
    if moments.order() < d {
        return Err(Error::MomentOrder {
            requested: d,
            reason: "polynomial degree exceeds moment order".into(),
        });
    }
    let prec = poly.coeffs()[0].prec();
    let mut s = CFloat::zero(prec);
    for (j, pj) in poly.coeffs().iter().enumerate() {
        for (k, pk) in poly.coeffs().iter().enumerate() {
            let t = pj.mul(&pk.conj()).mul(&moments.at(k as i64 - j as i64));
            s.add_assign(&t);
        }
    }
    Ok(s.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Angle, Component, PiecewiseDensityComponent, RieszProductComponent};

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(256)
    }

    fn eighth_roots() -> Measure {
        Measure::from_atoms(
            (0..8)
                .map(|j| (Angle::turn(j, 8), 0.125))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn gram_of_lebesgue_is_identity() {
        let c = ctx();
        let m = Measure::lebesgue().moments(2, 1e-50, c).unwrap();
        let g = gram_toeplitz(&m, 2, c).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((g.at(j, k).re.to_f64() - expect).abs() < 1e-45);
            }
        }
    }

    #[test]
    fn gram_of_single_riesz_factor() {
        let c = ctx();
        let r = RieszProductComponent::new(vec![1.0], vec![1]).unwrap();
        let m = crate::measure::riesz_moments(&r, 1, c).unwrap();
        let g = gram_toeplitz(&m, 1, c).unwrap();
        assert!((g.at(0, 1).re.to_f64() - 0.5).abs() < 1e-60);
        assert!((g.at(1, 0).re.to_f64() - 0.5).abs() < 1e-60);
    }

    #[test]
    fn lebesgue_en_all_one() {
        let c = ctx();
        let profile = en_profile(&Measure::lebesgue(), 5, c).unwrap();
        for r in &profile {
            assert!((r.e.to_f64() - 1.0).abs() < 1e-50);
            assert!(!r.degenerate);
            // extremal is z^n
            for (i, coef) in r.extremal.coeffs().iter().enumerate() {
                let expect = if i == r.n { 1.0 } else { 0.0 };
                assert!((coef.re.to_f64() - expect).abs() < 1e-45);
                assert!(coef.im.to_f64().abs() < 1e-45);
            }
        }
    }

    #[test]
    fn eighth_roots_profile_and_degeneracy() {
        let c = ctx();
        let profile = en_profile(&eighth_roots(), 8, c).unwrap();
        for r in profile.iter().take(8) {
            assert!((r.e.to_f64() - 1.0).abs() < 1e-40, "e_{} = {}", r.n, r.e);
            assert!(!r.degenerate);
        }
        let last = &profile[8];
        assert!(last.degenerate);
        assert_eq!(last.first_singular, Some(8));
        assert!(last.e.is_zero());
        // annihilator is z^8 - 1
        let p = &last.extremal;
        assert_eq!(p.degree(), 8);
        assert!((p.coeffs()[0].re.to_f64() + 1.0).abs() < 1e-40);
        assert!((p.coeffs()[8].re.to_f64() - 1.0).abs() < 1e-40);
    }

    #[test]
    fn brute_force_frozen_cases() {
        let c = ctx();
        // atoms ±1 with mass 1/2: minimum at q0 = 0, value 1
        let rho = Measure::from_atoms(vec![(Angle::turn(0, 2), 0.5), (Angle::turn(1, 2), 0.5)])
            .unwrap();
        assert!((brute_force_en(&rho, 1, c).unwrap().to_f64() - 1.0).abs() < 1e-50);
        // single atom: annihilated at degree 1
        let single = Measure::from_atoms(vec![(Angle::turn(0, 1), 1.0)]).unwrap();
        assert!(brute_force_en(&single, 1, c).unwrap().is_zero());
        // Riesz (1+cos θ): e_1² = 3/4
        let riesz = Measure {
            components: vec![(
                1.0,
                Component::Riesz(RieszProductComponent::new(vec![1.0], vec![1]).unwrap()),
            )],
        };
        let e1 = brute_force_en(&riesz, 1, c).unwrap();
        assert!((e1.to_f64() - (0.75f64).sqrt()).abs() < 1e-50);
    }

    #[test]
    fn levinson_matches_brute_force_on_mixture() {
        let c = ctx();
        let mut rho = Measure::from_atoms(vec![
            (Angle::Real(0.11), 0.3),
            (Angle::Real(0.57), 0.2),
            (Angle::turn(2, 7), 0.1),
        ])
        .unwrap();
        rho.push(
            0.4,
            Component::Density(
                PiecewiseDensityComponent::constant_on(Angle::Real(0.1), Angle::Real(0.5), 1.0)
                    .unwrap(),
            ),
        );
        for n in [1usize, 3, 7, 12] {
            let lev = szego_en(&rho, n, c).unwrap();
            let bf = brute_force_en(&rho, n, c).unwrap();
            let diff = (lev.e.clone() - &bf).abs().to_f64();
            assert!(diff < 1e-40, "n = {n}: {diff:e}");
        }
    }

    #[test]
    fn determinant_identity() {
        let c = ctx();
        let rho = Measure {
            components: vec![(
                1.0,
                Component::Riesz(
                    RieszProductComponent::new(vec![0.8, 0.5, 0.3], vec![1, 3, 9]).unwrap(),
                ),
            )],
        };
        let m = rho.moments(12, 1e-60, c).unwrap();
        for n in 0..=10usize {
            let r = szego_en_from_moments(&m, n, c).unwrap();
            let dn = gram_determinant(&m, n, c).unwrap();
            let dn1 = gram_determinant(&m, n + 1, c).unwrap();
            let lhs = r.e.clone().square() * dn;
            assert!((lhs - dn1).abs().to_f64() < 1e-50, "n = {n}");
        }
    }

    #[test]
    fn verblunsky_product_identity() {
        let c = ctx();
        let rho = Measure::from_atoms(vec![
            (Angle::Real(0.03), 0.4),
            (Angle::Real(0.41), 0.25),
            (Angle::Real(0.77), 0.35),
        ])
        .unwrap();
        let r = szego_en(&rho, 2, c).unwrap();
        // e_n² = mass · Π (1 - |α_k|²)
        let mut prod = rho.total_mass(1e-40, c).unwrap();
        for a in &r.recursion_coeffs {
            assert!(a.abs().to_f64() <= 1.0 + 1e-30);
            prod *= c.one() - a.norm_sqr();
        }
        assert!((prod.sqrt() - &r.e).abs().to_f64() < 1e-40);
    }

    #[test]
    fn scaling_and_monotonicity() {
        let c = ctx();
        let rho = Measure::from_atoms(vec![
            (Angle::Real(0.2), 0.6),
            (Angle::Real(0.52), 0.2),
            (Angle::Real(0.9), 0.2),
        ])
        .unwrap();
        let e2 = szego_en(&rho, 2, c).unwrap().e;
        let scaled = szego_en(&rho.scaled(4.0), 2, c).unwrap().e;
        assert!((scaled - (e2.clone() * c.real(2.0))).abs().to_f64() < 1e-50);
        // adding a component can only increase e_n
        let mut bigger = rho.clone();
        bigger.push(
            0.3,
            Component::Density(
                PiecewiseDensityComponent::constant_on(Angle::Real(0.0), Angle::Real(1.0), 1.0)
                    .unwrap(),
            ),
        );
        let e2b = szego_en(&bigger, 2, c).unwrap().e;
        assert!(e2b >= e2);
    }

    #[test]
    fn rotation_leaves_en_unchanged() {
        let c = ctx();
        let mut rho = Measure::from_atoms(vec![
            (Angle::turn(3, 20), 0.5),
            (Angle::turn(31, 50), 0.5),
        ])
        .unwrap();
        rho.push(
            0.2,
            Component::Riesz(RieszProductComponent::new(vec![0.5], vec![4]).unwrap()),
        );
        let rot = rho.rotated(&Angle::turn(23, 100));
        for n in [1usize, 2, 3] {
            let a = szego_en(&rho, n, c).unwrap().e;
            let b = szego_en(&rot, n, c).unwrap().e;
            assert!((a - b).abs().to_f64() < 1e-45, "n = {n}");
        }
    }
}
