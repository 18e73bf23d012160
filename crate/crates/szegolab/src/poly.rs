//! Polynomials on the unit circle: evaluation, root finding, sublevel-set
//! extraction, and the explicit monic constructions used in upper-bound
//! arguments (vanishing-power polynomials, near-minimax polynomials off an
//! arc, Boutroux–Cartan cover checks).

use crate::arcs::{Arc, ArcSet};
use crate::error::{Error, Result};
use crate::measure::Angle;
use crate::precision::{CFloat, CompleteAt, PrecisionContext};
use rug::ops::Pow;
use rug::Float;

/// Polynomial with complex coefficients in extended precision. When built
/// from roots the factored form is kept; evaluation through the factors
/// stays accurate at scales where the expanded coefficients would cancel
/// catastrophically.
#[derive(Clone, Debug)]
pub struct CirclePolynomial {
    coeffs: Vec<CFloat>,
    monic: bool,
    factors: Option<Vec<(CFloat, u32)>>,
}

impl CirclePolynomial {
    pub fn from_coeffs(coeffs: Vec<CFloat>) -> Self {
        assert!(!coeffs.is_empty());
        CirclePolynomial {
            coeffs,
            monic: false,
            factors: None,
        }
    }

    /// Marks the polynomial monic and pins the leading coefficient to 1.
    pub fn monic_from_coeffs(mut coeffs: Vec<CFloat>) -> Self {
        assert!(!coeffs.is_empty());
        let prec = coeffs[0].prec();
        let last = coeffs.len() - 1;
        coeffs[last] = CFloat::one(prec);
        CirclePolynomial {
            coeffs,
            monic: true,
            factors: None,
        }
    }

    pub fn one(prec: u32) -> Self {
        CirclePolynomial {
            coeffs: vec![CFloat::one(prec)],
            monic: true,
            factors: Some(Vec::new()),
        }
    }

    pub fn from_c64_coeffs(ctx: PrecisionContext, coeffs: &[num_complex::Complex64]) -> Self {
        CirclePolynomial::from_coeffs(
            coeffs
                .iter()
                .map(|c| CFloat::from_f64s(ctx.bits(), c.re, c.im))
                .collect(),
        )
    }

    /// Monic polynomial ∏ (z - r)^m, coefficients by convolution, factored
    /// form retained.
    pub fn from_roots(ctx: PrecisionContext, roots: &[(CFloat, u32)]) -> Self {
        let prec = ctx.bits();
        let mut coeffs = vec![CFloat::one(prec)];
        for (root, mult) in roots {
            for _ in 0..*mult {
                let mut next = vec![CFloat::zero(prec); coeffs.len() + 1];
                for (i, c) in coeffs.iter().enumerate() {
                    next[i + 1].add_assign(c);
                    let t = c.mul(root);
                    next[i].sub_assign(&t);
                }
                coeffs = next;
            }
        }
        CirclePolynomial {
            coeffs,
            monic: true,
            factors: Some(roots.to_vec()),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Largest index with a nonzero coefficient (0 for the zero polynomial).
    pub fn effective_degree(&self) -> usize {
        for i in (0..self.coeffs.len()).rev() {
            if !self.coeffs[i].norm_sqr().is_zero() {
                return i;
            }
        }
        0
    }

    pub fn coeffs(&self) -> &[CFloat] {
        &self.coeffs
    }

    pub fn is_monic(&self) -> bool {
        self.monic
    }

    pub fn factors(&self) -> Option<&[(CFloat, u32)]> {
        self.factors.as_deref()
    }

    pub fn eval(&self, z: &CFloat) -> CFloat {
        if let Some(f) = &self.factors {
            let prec = z.prec();
            let mut acc = CFloat::one(prec);
            for (root, mult) in f {
                acc = acc.mul(&z.sub(root).powu(*mult as u64));
            }
            acc
        } else {
            self.eval_horner(z)
        }
    }

    pub fn eval_horner(&self, z: &CFloat) -> CFloat {
        let prec = z.prec();
        let mut acc = CFloat::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z);
            acc.add_assign(c);
        }
        acc
    }

    /// ln |P(e^{iθ})| through the factored form when available; stays finite
    /// and accurate at any scale except exactly at a root.
    pub fn log_abs_at(&self, theta: &Float, ctx: PrecisionContext) -> Float {
        let z = ctx.cis(theta);
        if let Some(f) = &self.factors {
            let prec = ctx.bits();
            let mut acc = Float::new(prec);
            for (root, mult) in f {
                let d = z.sub(root).abs();
                acc += d.ln() * Float::with_val(prec, *mult);
            }
            acc
        } else {
            self.eval(&z).abs().ln()
        }
    }

    pub fn eval_at_angle(&self, theta: &Float, ctx: PrecisionContext) -> CFloat {
        self.eval(&ctx.cis(theta))
    }

    /// Coefficients rounded to f64 complex (for FFT-scale work).
    pub fn to_c64_coeffs(&self) -> Vec<num_complex::Complex64> {
        self.coeffs.iter().map(|c| c.to_c64()).collect()
    }

    /// max |P| over a uniform grid, extended-precision evaluation.
    pub fn sup_on_grid(&self, grid: usize, ctx: PrecisionContext) -> Float {
        let prec = ctx.bits();
        let two_pi = ctx.two_pi();
        let mut best = Float::new(prec);
        for g in 0..grid {
            let theta =
                (&two_pi * Float::with_val(prec, g as u64)).at(prec) / grid as u64;
            let v = self.eval_at_angle(&theta, ctx).abs();
            if v > best {
                best = v;
            }
        }
        best
    }

    /// max |P| over a uniform grid restricted to an arc.
    pub fn sup_on_arc(&self, arc: &Arc, samples: usize, ctx: PrecisionContext) -> Float {
        let prec = ctx.bits();
        let mut best = Float::new(prec);
        best -= 1u32; // allow zero suprema to register
        for g in 0..=samples {
            let frac = g as f64 / samples as f64;
            let theta = (arc.start() + (arc.length() * Float::with_val(prec, frac)).at(prec))
                .at(prec);
            let v = self.eval_at_angle(&theta, ctx).abs();
            if v > best {
                best = v;
            }
        }
        best
    }

    /// P(z·u) — substitution rotating the argument; used for products of
    /// translated factors H(z·conj(λ)).
    pub fn compose_rotation(&self, u: &CFloat) -> CirclePolynomial {
        let prec = u.prec();
        let mut pw = CFloat::one(prec);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c.mul(&pw);
                pw = pw.mul(u);
                v
            })
            .collect();
        CirclePolynomial {
            coeffs,
            monic: false,
            factors: None,
        }
    }

    pub fn mul(&self, other: &CirclePolynomial) -> CirclePolynomial {
        let prec = self.coeffs[0].prec();
        let mut out = vec![CFloat::zero(prec); self.degree() + other.degree() + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j].mul_add_assign(a, b);
            }
        }
        let factors = match (&self.factors, &other.factors) {
            (Some(a), Some(b)) => {
                let mut f = a.clone();
                f.extend(b.iter().cloned());
                Some(f)
            }
            _ => None,
        };
        CirclePolynomial {
            coeffs: out,
            monic: self.monic && other.monic,
            factors,
        }
    }

    /// JSON form: coefficient array with a precision tag, reals as decimal
    /// strings at full precision.
    pub fn to_json_value(&self) -> serde_json::Value {
        let coeffs: Vec<serde_json::Value> = self
            .coeffs
            .iter()
            .map(|c| {
                serde_json::json!([
                    crate::report::decimal_string(&c.re),
                    crate::report::decimal_string(&c.im)
                ])
            })
            .collect();
        serde_json::json!({
            "precision_bits": self.coeffs[0].prec(),
            "monic": self.monic,
            "coefficients": coeffs,
        })
    }
}

/// All roots of the polynomial by the Aberth–Ehrlich simultaneous
/// iteration. Exact zero coefficients at the low end become roots at 0.
pub fn roots(poly: &CirclePolynomial, ctx: PrecisionContext) -> Result<Vec<CFloat>> {
    let prec = ctx.bits();
    let mut coeffs: Vec<CFloat> = poly.coeffs().to_vec();
    while coeffs.len() > 1 && coeffs.last().unwrap().norm_sqr().is_zero() {
        coeffs.pop();
    }
    let mut zeros_at_origin = 0usize;
    while coeffs.len() > 1 && coeffs[0].norm_sqr().is_zero() {
        coeffs.remove(0);
        zeros_at_origin += 1;
    }
    let d = coeffs.len() - 1;
    let mut out = vec![CFloat::zero(prec); zeros_at_origin];
    if d == 0 {
        return Ok(out);
    }
    if d == 1 {
        out.push(coeffs[0].neg().div(&coeffs[1]));
        return Ok(out);
    }
    // derivative
    let deriv: Vec<CFloat> = (1..=d)
        .map(|i| coeffs[i].mul_real(&Float::with_val(prec, i as u64)))
        .collect();
    let eval = |cs: &[CFloat], z: &CFloat| -> CFloat {
        let mut acc = CFloat::zero(prec);
        for c in cs.iter().rev() {
            acc = acc.mul(z);
            acc.add_assign(c);
        }
        acc
    };
    // initial guesses on two rings near the unit circle
    let mut w: Vec<CFloat> = (0..d)
        .map(|j| {
            let r = if j % 2 == 0 { 0.93 } else { 1.08 };
            let ang = 2.0 * std::f64::consts::PI * (j as f64 + 0.3712) / d as f64;
            CFloat::from_f64s(prec, r * ang.cos(), r * ang.sin())
        })
        .collect();
    let tol = {
        let mut t = ctx.one();
        t >>= (3 * ctx.bits()) / 4;
        t
    };
    let max_iter = 600;
    for _ in 0..max_iter {
        let mut done = true;
        for i in 0..d {
            let pv = eval(&coeffs, &w[i]);
            let dv = eval(&deriv, &w[i]);
            if dv.norm_sqr().is_zero() {
                // nudge off a critical point
                w[i] = w[i].add(&CFloat::from_f64s(prec, 1e-8, 2e-8));
                done = false;
                continue;
            }
            let newton = pv.div(&dv);
            let mut s = CFloat::zero(prec);
            for j in 0..d {
                if j != i {
                    let diff = w[i].sub(&w[j]);
                    if diff.norm_sqr().is_zero() {
                        continue;
                    }
                    s.add_assign(&diff.recip());
                }
            }
            let denom = CFloat::one(prec).sub(&newton.mul(&s));
            let step = if denom.norm_sqr().is_zero() {
                newton.clone()
            } else {
                newton.div(&denom)
            };
            let wi_scale = w[i].abs() + ctx.one();
            if step.abs() > (&tol * &wi_scale).at(prec) {
                done = false;
            }
            w[i] = w[i].sub(&step);
        }
        if done {
            out.extend(w);
            return Ok(out);
        }
    }
    Err(Error::NonConvergence(format!(
        "Aberth iteration on degree {d} polynomial"
    )))
}

/// Sublevel set {θ : |P(e^{iθ})| ≤ τ} as a union of closed arcs.
#[derive(Clone, Debug)]
pub struct SublevelSet {
    pub arcs: ArcSet,
    /// τ at or above sup |P|: the whole circle qualified.
    pub full_circle: bool,
    /// τ below min |P|: empty.
    pub empty: bool,
}

/// Extracts the sublevel arcs by locating the unit-circle roots of the
/// degree-2d algebraic polynomial w^d (|P|²(w) - τ²) and classifying the
/// segments between consecutive root angles by a midpoint test. The arc
/// count never exceeds deg P.
pub fn sublevel_arcs(
    poly: &CirclePolynomial,
    tau: &Float,
    ctx: PrecisionContext,
) -> Result<SublevelSet> {
    if !(tau.is_sign_positive() && !tau.is_zero()) {
        return Err(Error::Precondition("tau must be positive".into()));
    }
    let prec = ctx.bits();
    let d = poly.effective_degree();
    let p: Vec<CFloat> = poly.coeffs()[..=d].to_vec();
    let tau_sq = tau.clone().square();
    // Laurent coefficients of |P|²: b_r = Σ_j p_{j+r} conj(p_j)
    let mut s = vec![CFloat::zero(prec); 2 * d + 1];
    for r in 0..=d {
        let mut b = CFloat::zero(prec);
        for j in 0..=(d - r) {
            b.mul_add_assign(&p[j + r], &p[j].conj());
        }
        s[d + r] = b.clone();
        s[d - r] = b.conj();
    }
    s[d].re -= &tau_sq;
    let algebraic = CirclePolynomial::from_coeffs(s);
    let inside = |theta: &Float| -> bool {
        let v = poly.eval_at_angle(theta, ctx).abs();
        v <= *tau
    };
    let all_roots = roots(&algebraic, ctx)?;
    // keep roots on the unit circle
    let radial_tol = {
        let mut t = ctx.one();
        t >>= ctx.bits() / 4;
        t
    };
    let mut angles: Vec<Float> = Vec::new();
    for r in &all_roots {
        let dev = (r.abs() - ctx.one()).abs();
        if dev <= radial_tol {
            let mut a = r.arg();
            if a < 0 {
                a += ctx.two_pi();
            }
            angles.push(a);
        }
    }
    if angles.is_empty() {
        let probe = inside(&ctx.real(0.1234567));
        return Ok(SublevelSet {
            arcs: if probe {
                ArcSet::full_circle(ctx)
            } else {
                ArcSet::empty()
            },
            full_circle: probe,
            empty: !probe,
        });
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let two_pi = ctx.two_pi();
    let k = angles.len();
    // classify each segment between consecutive boundary angles
    let mut seg_inside = vec![false; k];
    for i in 0..k {
        let a = &angles[i];
        let b = if i + 1 < k {
            angles[i + 1].clone()
        } else {
            (&angles[0] + &two_pi).at(prec)
        };
        let mid = ((a + &b).at(prec)) >> 1u32;
        seg_inside[i] = inside(&mid);
    }
    if seg_inside.iter().all(|&x| x) {
        return Ok(SublevelSet {
            arcs: ArcSet::full_circle(ctx),
            full_circle: true,
            empty: false,
        });
    }
    if seg_inside.iter().all(|&x| !x) {
        return Ok(SublevelSet {
            arcs: ArcSet::empty(),
            full_circle: false,
            empty: true,
        });
    }
    // maximal runs of inside segments -> closed arcs
    let mut raw: Vec<Arc> = Vec::new();
    let mut i = 0usize;
    // start at a segment whose predecessor is outside
    while seg_inside[(i + k - 1) % k] {
        i += 1;
    }
    let mut seen = 0usize;
    while seen < k {
        if seg_inside[i % k] {
            let start = angles[i % k].clone();
            let mut j = i;
            while seg_inside[j % k] {
                j += 1;
            }
            let mut end = angles[j % k].clone();
            while end < start {
                end += &two_pi;
            }
            let len = (&end - &start).at(prec);
            raw.push(Arc::new(start, len, ctx));
            seen += j - i;
            i = j;
        } else {
            seen += 1;
            i += 1;
        }
    }
    Ok(SublevelSet {
        arcs: ArcSet::from_arcs(raw, ctx),
        full_circle: false,
        empty: false,
    })
}

/// Verification side of the Boutroux–Cartan covering statement: the set
/// {|P| < ε^deg} must be coverable by at most deg disks with radii summing
/// to at most 2eε. Covers each sublevel arc by the disk centered at its
/// midpoint with radius 2 sin(length/4).
pub struct CartanCover {
    pub cover: Vec<(f64, f64)>, // (center angle, radius)
    pub radii_sum: f64,
    pub pass: bool,
}

pub fn cartan_cover_check(
    poly: &CirclePolynomial,
    epsilon: f64,
    ctx: PrecisionContext,
) -> Result<CartanCover> {
    if !poly.is_monic() {
        return Err(Error::Precondition("Cartan check needs a monic polynomial".into()));
    }
    if epsilon <= 0.0 {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }
    let prec = ctx.bits();
    let n = poly.degree() as u32;
    let tau = ctx.real(epsilon).pow(n);
    let sub = sublevel_arcs(poly, &tau, ctx)?;
    let mut cover = Vec::new();
    let mut radii_sum = 0.0f64;
    for arc in sub.arcs.arcs() {
        let len = arc.length().to_f64();
        let r = 2.0 * (len / 4.0).sin();
        let mid = arc.midpoint().to_f64();
        cover.push((mid, r));
        radii_sum += r;
    }
    let bound = 2.0 * std::f64::consts::E * epsilon;
    let _ = prec;
    Ok(CartanCover {
        cover,
        radii_sum,
        pass: radii_sum <= bound && sub.arcs.count() <= poly.degree(),
    })
}

/// Monic ∏ (z - z_ℓ)^{m_ℓ+1} with exact zeros of order m_ℓ+1 at the given
/// centers. `orders` carries m_ℓ; the zero order is m_ℓ + 1.
pub fn vanishing_power_polynomial(
    centers: &[Angle],
    orders: &[u32],
    ctx: PrecisionContext,
) -> Result<CirclePolynomial> {
    if centers.len() != orders.len() || centers.is_empty() {
        return Err(Error::Precondition(
            "centers and multiplicities must match and be nonempty".into(),
        ));
    }
    let roots: Vec<(CFloat, u32)> = centers
        .iter()
        .zip(orders.iter())
        .map(|(c, m)| (c.unit(ctx), m + 1))
        .collect();
    Ok(CirclePolynomial::from_roots(ctx, &roots))
}

/// Measured data for the off-arc monic construction.
#[derive(Clone, Debug)]
pub struct OffArcReport {
    /// sup of |P| over T ∖ J from a dense grid.
    pub off_sup: f64,
    /// 2 cap(T∖J)^n: the minimax target the construction meets.
    pub target: f64,
    /// sup over J.
    pub on_sup_log: f64,
    /// Remez-type growth budget exponent C·n·m(J) with C = 3.
    pub on_budget_log: f64,
    pub capacity: f64,
}

/// Monic polynomial of degree n that is as small as the capacity of T∖J
/// allows away from the arc J: the Chebyshev polynomial of the complementary
/// arc, transplanted through w = cos θ (pairs of conjugate roots; third-kind
/// transplant supplies the odd degree). Meets sup_{T∖J} |P| = 2 cap(T∖J)^n
/// up to grid slack, and is checked against it loudly.
pub fn small_off_arc_monic(
    n: usize,
    j_arc: &Arc,
    ctx: PrecisionContext,
) -> Result<(CirclePolynomial, OffArcReport)> {
    let l = j_arc.length().to_f64();
    if l >= std::f64::consts::PI {
        return Err(Error::Precondition("arc J must have length < π".into()));
    }
    if n == 0 {
        return Err(Error::Precondition("degree must be >= 1".into()));
    }
    let prec = ctx.bits();
    let center = j_arc.midpoint();
    let u0 = (l / 2.0).cos();
    let s = (1.0 + u0) / 2.0; // = cos²(L/4)
    let m = n / 2;
    let mut root_angles: Vec<f64> = Vec::with_capacity(n);
    if n % 2 == 0 {
        for i in 0..m {
            let x = ((2 * i + 1) as f64 * std::f64::consts::PI / (2 * m) as f64).cos();
            let w = -1.0 + s * (1.0 + x);
            let a = w.clamp(-1.0, 1.0).acos();
            root_angles.push(a);
            root_angles.push(-a);
        }
    } else {
        for i in 0..m {
            let phi = (2 * i + 1) as f64 * std::f64::consts::PI / (2 * m + 1) as f64;
            let w = -1.0 + s * (1.0 + phi.cos());
            let a = w.clamp(-1.0, 1.0).acos();
            root_angles.push(a);
            root_angles.push(-a);
        }
        root_angles.push(std::f64::consts::PI);
    }
    let roots: Vec<(CFloat, u32)> = root_angles
        .iter()
        .map(|a| {
            let theta = (ctx.real(*a) + &center).at(prec);
            (ctx.cis(&theta), 1u32)
        })
        .collect();
    let poly = CirclePolynomial::from_roots(ctx, &roots);

    let cap = (l / 4.0).cos();
    let target = 2.0 * cap.powi(n as i32);
    // complementary arc (where P must be small)
    let comp_start = j_arc.end();
    let comp_len = (ctx.two_pi() - j_arc.length()).at(prec);
    let comp = Arc::new(comp_start, comp_len, ctx);
    let samples = (1 << 12).max(16 * n);
    let off_sup = poly.sup_on_arc(&comp, samples, ctx).to_f64();
    let slack = 1e-6;
    if off_sup > target * (1.0 + slack) {
        return Err(Error::BoundViolation {
            what: format!("off-arc sup of degree-{n} construction"),
            achieved: off_sup,
            target: target * (1.0 + slack),
        });
    }
    // Remez-type growth budget on J, measured relative to the off-arc level
    let mut on_sup_log = f64::NEG_INFINITY;
    for g in 0..=512usize {
        let frac = g as f64 / 512.0;
        let theta = (j_arc.start()
            + (j_arc.length() * Float::with_val(prec, frac)).at(prec))
        .at(prec);
        let v = poly.log_abs_at(&theta, ctx).to_f64();
        if v > on_sup_log {
            on_sup_log = v;
        }
    }
    let on_budget_log = target.ln() + 3.0 * n as f64 * (l / (2.0 * std::f64::consts::PI));
    if on_sup_log > on_budget_log {
        return Err(Error::BoundViolation {
            what: format!("on-arc growth of degree-{n} construction"),
            achieved: on_sup_log,
            target: on_budget_log,
        });
    }
    Ok((
        poly,
        OffArcReport {
            off_sup,
            target,
            on_sup_log,
            on_budget_log,
            capacity: cap,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(192)
    }

    #[test]
    fn from_roots_expands_binomials() {
        let c = ctx();
        // (z-1)²(z+1)² = z⁴ - 2z² + 1
        let p = vanishing_power_polynomial(&[Angle::turn(0, 1), Angle::turn(1, 2)], &[1, 1], c)
            .unwrap();
        assert_eq!(p.degree(), 4);
        assert!(p.is_monic());
        let expect = [1.0, 0.0, -2.0, 0.0, 1.0];
        for (i, e) in expect.iter().enumerate() {
            assert!((p.coeffs()[i].re.to_f64() - e).abs() < 1e-40);
            assert!(p.coeffs()[i].im.to_f64().abs() < 1e-40);
        }
    }

    #[test]
    fn roots_recovers_unit_roots() {
        let c = ctx();
        // z^6 - 1
        let mut coeffs = vec![CFloat::zero(c.bits()); 7];
        coeffs[0] = c.complex(-1.0, 0.0);
        coeffs[6] = CFloat::one(c.bits());
        let p = CirclePolynomial::monic_from_coeffs(coeffs);
        let mut rs = roots(&p, c).unwrap();
        assert_eq!(rs.len(), 6);
        rs.sort_by(|a, b| a.arg().to_f64().partial_cmp(&b.arg().to_f64()).unwrap());
        for r in rs {
            assert!((r.abs().to_f64() - 1.0).abs() < 1e-35);
            let arg6 = r.powu(6);
            assert!(arg6.dist(&CFloat::one(c.bits())).to_f64() < 1e-30);
        }
    }

    #[test]
    fn sublevel_of_z_minus_one() {
        // |e^{iθ} - 1| ≤ 1  ⟺  |θ| ≤ π/3
        let c = ctx();
        let p = vanishing_power_polynomial(&[Angle::turn(0, 1)], &[0], c).unwrap();
        let sub = sublevel_arcs(&p, &c.one(), c).unwrap();
        assert_eq!(sub.arcs.count(), 1);
        let arc = &sub.arcs.arcs()[0];
        let third = 2.0 * std::f64::consts::PI / 3.0;
        assert!((arc.length().to_f64() - third).abs() < 1e-10);
        let mid = arc.midpoint().to_f64();
        let dist_to_zero = mid.min(2.0 * std::f64::consts::PI - mid);
        assert!(dist_to_zero < 1e-10);
    }

    #[test]
    fn sublevel_of_z_squared_minus_one() {
        let c = ctx();
        let p = vanishing_power_polynomial(&[Angle::turn(0, 1), Angle::turn(1, 2)], &[0, 0], c)
            .unwrap();
        let sub = sublevel_arcs(&p, &c.one(), c).unwrap();
        assert_eq!(sub.arcs.count(), 2);
        for arc in sub.arcs.arcs() {
            assert!((arc.length().to_f64() - std::f64::consts::PI / 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sublevel_of_pure_power_is_empty() {
        let c = ctx();
        let mut coeffs = vec![CFloat::zero(c.bits()); 6];
        coeffs[5] = CFloat::one(c.bits());
        let p = CirclePolynomial::monic_from_coeffs(coeffs);
        let sub = sublevel_arcs(&p, &c.real(0.5), c).unwrap();
        assert!(sub.empty);
        let sup = sublevel_arcs(&p, &c.real(1.5), c).unwrap();
        assert!(sup.full_circle);
    }

    #[test]
    fn cartan_cover_for_concentrated_zero() {
        let c = ctx();
        // P = (z-1)^4, ε = 0.1: sublevel arc around 0 with radii sum ≤ 2e·0.1
        let p = vanishing_power_polynomial(&[Angle::turn(0, 1)], &[3], c).unwrap();
        let check = cartan_cover_check(&p, 0.1, c).unwrap();
        assert!(check.pass, "radii sum {}", check.radii_sum);
        assert_eq!(check.cover.len(), 1);
        // |e^{iθ}-1|⁴ < 0.1⁴ ⟺ 2 sin(|θ|/2) < 0.1: radius ≈ 0.1
        assert!((check.radii_sum - 0.1).abs() < 0.01);
    }

    #[test]
    fn cartan_cover_empty_for_power() {
        let c = ctx();
        let mut coeffs = vec![CFloat::zero(c.bits()); 9];
        coeffs[8] = CFloat::one(c.bits());
        let p = CirclePolynomial::monic_from_coeffs(coeffs);
        let check = cartan_cover_check(&p, 0.3, c).unwrap();
        assert!(check.pass);
        assert!(check.cover.is_empty());
    }

    #[test]
    fn vanishing_power_arc_bound() {
        let c = ctx();
        // centers 0, π with zero orders 3 and 3: degree 6
        let p = vanishing_power_polynomial(&[Angle::turn(0, 1), Angle::turn(1, 2)], &[2, 2], c)
            .unwrap();
        assert_eq!(p.degree(), 6);
        let len = (-3.0f64).exp();
        let arc = Arc::centered(&c.zero(), c.real(len), c);
        let sup = p.sup_on_arc(&arc, 4096, c).to_f64();
        let bound = 64.0 * (-9.0f64).exp();
        assert!(sup <= bound, "sup {sup:e} vs bound {bound:e}");
    }

    #[test]
    fn off_arc_monic_even_and_odd() {
        let c = ctx();
        let j = Arc::centered(&c.zero(), c.real(std::f64::consts::PI / 4.0), c);
        for n in [1usize, 2, 7, 16] {
            let (p, report) = small_off_arc_monic(n, &j, c).unwrap();
            assert!(p.is_monic());
            assert_eq!(p.degree(), n);
            assert!(
                report.off_sup <= report.target * (1.0 + 1e-6),
                "n = {n}: {} vs {}",
                report.off_sup,
                report.target
            );
        }
    }

    #[test]
    fn off_arc_degree_one_stays_bounded() {
        let c = ctx();
        let j = Arc::centered(&c.real(1.0), c.real(0.8), c);
        let (p, report) = small_off_arc_monic(1, &j, c).unwrap();
        // z + c with |c| ≤ 1
        assert!(p.coeffs()[0].abs().to_f64() <= 1.0 + 1e-12);
        assert!(report.off_sup <= 2.0);
    }

    #[test]
    fn sublevel_with_tiny_threshold_finds_narrow_arcs() {
        let c = PrecisionContext::new(320);
        // (z-1)(z+1): dips to 0 at ±1; τ = e^{-30} gives two tiny arcs
        let p = vanishing_power_polynomial(&[Angle::turn(0, 1), Angle::turn(1, 2)], &[0, 0], c)
            .unwrap();
        let tau = c.real(-30.0).exp();
        let sub = sublevel_arcs(&p, &tau, c).unwrap();
        assert_eq!(sub.arcs.count(), 2);
        for arc in sub.arcs.arcs() {
            // |P| ≈ 2|sin θ'| near each zero: width ≈ τ
            let w = arc.length().to_f64();
            assert!(w > 0.0 && w < 1e-11, "width {w:e}");
        }
    }
}
