//! Fourier-side constructions: the concentrated trigonometric kernel, the
//! outer function of an arc neighborhood, and their convolution.
//!
//! These run at f64 scale on power-of-two grids (the quantities involved
//! are O(1) and the contracts carry 1e-3 .. 1e-6 tolerances); the resulting
//! polynomial coefficients are lifted into extended precision at the end.

use crate::arcs::ArcSet;
use crate::error::{Error, Result};
use crate::poly::CirclePolynomial;
use crate::precision::PrecisionContext;
use num_complex::Complex64;
use rustfft::FftPlanner;

/// Forward Fourier coefficients ĉ(ℓ) = (1/G) Σ_g f_g e^{-iℓθ_g}; bin ℓ mod G.
fn fourier_coeffs(values: &[Complex64]) -> Vec<Complex64> {
    let g = values.len();
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(g).process(&mut buf);
    for v in buf.iter_mut() {
        *v /= g as f64;
    }
    buf
}

fn inverse_from_coeffs(coeffs: &[Complex64]) -> Vec<Complex64> {
    let g = coeffs.len();
    let mut buf = coeffs.to_vec();
    FftPlanner::new().plan_fft_inverse(g).process(&mut buf);
    buf
}

/// Harmonic conjugate on the grid through the frequency-domain multiplier
/// -i·sgn(ℓ) (Nyquist and constant bins carry multiplier 0).
pub fn harmonic_conjugate(values: &[f64]) -> Vec<f64> {
    let g = values.len();
    let mut c = fourier_coeffs(
        &values
            .iter()
            .map(|v| Complex64::new(*v, 0.0))
            .collect::<Vec<_>>(),
    );
    c[0] = Complex64::new(0.0, 0.0);
    for (l, v) in c.iter_mut().enumerate().skip(1) {
        let signed = if l < g / 2 {
            1.0
        } else if l == g / 2 {
            0.0
        } else {
            -1.0
        };
        *v *= Complex64::new(0.0, -signed);
    }
    inverse_from_coeffs(&c).iter().map(|z| z.re).collect()
}

/// Specification of the concentrated kernel q of degree < n with tail
/// exponent γ ∈ (0,1).
#[derive(Clone, Copy, Debug)]
pub struct KernelSpec {
    pub n: usize,
    pub gamma: f64,
    /// grid used for the verification integrals
    pub grid: usize,
}

/// Trigonometric polynomial q(x) = Σ_{|ℓ|<n} ĝ(ℓ/n) e^{iℓx} with ĝ(0) = 1,
/// plus the measured integral constants.
#[derive(Clone, Debug)]
pub struct ConcentratedKernel {
    pub n: usize,
    pub gamma: f64,
    /// ĝ(ℓ/n) for ℓ = 0..n-1 (even symmetric in ℓ).
    pub coeffs: Vec<f64>,
    /// ∫_{-π}^{π} |q| dx
    pub l1_norm: f64,
    /// max over s of tail(s) / (s^{1-γ} e^{-s^γ})
    pub tail_constant: f64,
    /// tail(s) = ∫_{s/n ≤ |x| ≤ π} |q| dx at integer s = 1..n/2
    pub tails: Vec<f64>,
}

impl ConcentratedKernel {
    /// q̂(ℓ); zero outside |ℓ| < n.
    pub fn coeff(&self, l: i64) -> f64 {
        let a = l.unsigned_abs() as usize;
        if a < self.n {
            self.coeffs[a]
        } else {
            0.0
        }
    }
}

/// Smooth compactly supported bump ĝ on (-1,1) with ĝ(0)=1, built as the
/// box-convolution cascade 1l_{[-1/2,1/2]} * φ_{δ_1} * φ_{δ_2} * … with
/// δ_j ∝ j^{-1/γ}; the transform then decays like e^{-c|x|^γ}.
struct GevreyBump {
    table: Vec<f64>,
    half_width: f64,
}

impl GevreyBump {
    fn build(gamma: f64) -> GevreyBump {
        let size = 1usize << 16;
        let half_width = 1.0f64;
        let dx = 2.0 * half_width / size as f64;
        // indicator of [-1/2, 1/2]
        let mut table = vec![0.0f64; size + 1];
        for (i, v) in table.iter_mut().enumerate() {
            let x = -half_width + i as f64 * dx;
            if x.abs() <= 0.5 {
                *v = 1.0;
            }
        }
        // widths δ_j = c j^{-1/γ} with Σ δ_j = 0.49 (support stays inside (-1,1))
        let s = 1.0 / gamma;
        let zeta: f64 = (1..4000).map(|j| (j as f64).powf(-s)).sum();
        let c = 0.49 / zeta;
        for j in 1..4000 {
            let delta = c * (j as f64).powf(-s);
            if delta < dx {
                break;
            }
            box_blur(&mut table, delta / dx);
        }
        // normalize the center to exactly 1
        let mid = table[size / 2];
        for v in table.iter_mut() {
            *v /= mid;
        }
        GevreyBump { table, half_width }
    }

    /// linear interpolation; the cascade smooths at every scale above the
    /// grid step, so this is accurate to ~(dx/δ_1)².
    fn eval(&self, x: f64) -> f64 {
        if x.abs() >= self.half_width {
            return 0.0;
        }
        let n = self.table.len() - 1;
        let t = (x + self.half_width) / (2.0 * self.half_width) * n as f64;
        let i = (t.floor() as usize).min(n - 1);
        let frac = t - i as f64;
        self.table[i] * (1.0 - frac) + self.table[i + 1] * frac
    }
}

/// Moving average with half-width `w` samples (fractional), via prefix sums
/// with linear end corrections.
fn box_blur(table: &mut [f64], w: f64) {
    let n = table.len();
    let mut prefix = vec![0.0f64; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + table[i];
    }
    let integral = |t: f64| -> f64 {
        // ∫_0^t of the piecewise-constant extension
        let t = t.clamp(0.0, n as f64);
        let i = t.floor() as usize;
        if i >= n {
            return prefix[n];
        }
        prefix[i] + (t - i as f64) * table[i]
    };
    let out: Vec<f64> = (0..n)
        .map(|i| {
            let center = i as f64 + 0.5;
            (integral(center + w) - integral(center - w)) / (2.0 * w)
        })
        .collect();
    table.copy_from_slice(&out);
}

/// Builds the concentrated kernel and verifies its three properties:
/// (A) q̂(0) = 1 exactly, (B) finite L¹ norm (returned), (C) tail integrals
/// decaying consistently with s^{1-γ} e^{-s^γ} — violation is an error
/// naming the offending s.
pub fn concentrated_kernel(spec: &KernelSpec) -> Result<ConcentratedKernel> {
    if spec.n < 4 {
        return Err(Error::Precondition("kernel needs degree bound n >= 4".into()));
    }
    if !(spec.gamma > 0.0 && spec.gamma < 1.0) {
        return Err(Error::Precondition("gamma must lie in (0,1)".into()));
    }
    let bump = GevreyBump::build(spec.gamma);
    let mut coeffs = Vec::with_capacity(spec.n);
    for l in 0..spec.n {
        coeffs.push(bump.eval(l as f64 / spec.n as f64));
    }
    coeffs[0] = 1.0; // ĝ(0) = 1 by normalization; pin exactly

    // values of q on the grid by inverse FFT of the spectrum
    let g = spec.grid.next_power_of_two().max(16 * spec.n);
    let mut spectrum = vec![Complex64::new(0.0, 0.0); g];
    spectrum[0] = Complex64::new(coeffs[0], 0.0);
    for l in 1..spec.n {
        spectrum[l] = Complex64::new(coeffs[l], 0.0);
        spectrum[g - l] = Complex64::new(coeffs[l], 0.0);
    }
    let values = inverse_from_coeffs(&spectrum);
    let dx = 2.0 * std::f64::consts::PI / g as f64;

    let l1_norm: f64 = values.iter().map(|v| v.norm() * dx).sum();
    // tails: grid indices map to x = θ for θ ≤ π, x = θ - 2π beyond
    let smax = spec.n / 2;
    let mut tails = vec![0.0f64; smax + 1];
    for (i, v) in values.iter().enumerate() {
        let theta = i as f64 * dx;
        let x = if theta <= std::f64::consts::PI {
            theta
        } else {
            theta - 2.0 * std::f64::consts::PI
        };
        let a = v.norm() * dx;
        let s_reach = (x.abs() * spec.n as f64).floor() as usize;
        let cap = s_reach.min(smax);
        // |x| ≥ s/n for all s ≤ n|x|
        for t in tails.iter_mut().take(cap + 1) {
            *t += a;
        }
    }
    let model = |s: f64| s.powf(1.0 - spec.gamma) * (-s.powf(spec.gamma)).exp();
    let mut baseline = 0.0f64;
    for s in 1..=4.min(smax) {
        baseline = baseline.max(tails[s] / model(s as f64));
    }
    let mut tail_constant = baseline;
    for s in 1..=smax {
        let r = tails[s] / model(s as f64);
        tail_constant = tail_constant.max(r);
        if r > 20.0 * baseline && tails[s] > 1e-13 {
            return Err(Error::BoundViolation {
                what: format!("kernel tail decay at s = {s}"),
                achieved: r,
                target: 20.0 * baseline,
            });
        }
    }
    Ok(ConcentratedKernel {
        n: spec.n,
        gamma: spec.gamma,
        coeffs,
        l1_norm,
        tail_constant,
        tails,
    })
}

/// Boundary data of the outer function F built from the indicator of the
/// enlarged arc set E_{+ε}.
#[derive(Clone, Debug)]
pub struct OuterFunctionResult {
    pub enlarged: ArcSet,
    /// normalized measure of E_{+ε} as realized on the grid
    pub measure: f64,
    /// boundary samples of F on the uniform grid
    pub values: Vec<Complex64>,
    /// analytic Fourier coefficients F̂(0..N); negative ones are zeroed
    pub coeffs: Vec<Complex64>,
    /// largest |F̂(ℓ)| over ℓ < 0 before zeroing (construction diagnostic)
    pub negative_leakage: f64,
    pub f_zero: Complex64,
}

/// F = exp[-m(E_{+ε})^{-1} (1l + i·conj 1l)]: |F| = e^{-1/m} on E_{+ε} and 1
/// elsewhere, |F(0)| = 1/e, analytic in the disk. The arc measure is taken
/// as the exact grid fraction so that the mean of log|F| is exactly -1.
pub fn outer_function(
    e: &ArcSet,
    epsilon: f64,
    grid: usize,
    ctx: PrecisionContext,
) -> Result<OuterFunctionResult> {
    if e.is_empty() {
        return Err(Error::Precondition("outer function needs a nonempty arc set".into()));
    }
    let grid = grid.next_power_of_two();
    let enlarged = e.enlarged(epsilon, ctx);
    // resolution check: at least 16 samples per arc
    let min_len = enlarged
        .arcs()
        .iter()
        .map(|a| a.length().to_f64())
        .fold(f64::INFINITY, f64::min);
    let step = 2.0 * std::f64::consts::PI / grid as f64;
    if min_len < 16.0 * step {
        return Err(Error::Precondition(format!(
            "grid {grid} too coarse: smallest enlarged arc has {:.1} samples, need 16",
            min_len / step
        )));
    }
    let mut indicator = vec![0.0f64; grid];
    let mut inside = 0usize;
    for (g, v) in indicator.iter_mut().enumerate() {
        let theta = ctx.real(g as f64 * step);
        if enlarged.contains(&theta, ctx) {
            *v = 1.0;
            inside += 1;
        }
    }
    let measure = inside as f64 / grid as f64;
    if measure >= 1.0 {
        return Err(Error::Precondition("m(E_{+ε}) must be < 1".into()));
    }
    let conj = harmonic_conjugate(&indicator);
    let scale = -1.0 / measure;
    let values: Vec<Complex64> = indicator
        .iter()
        .zip(conj.iter())
        .map(|(v, vt)| (Complex64::new(*v * scale, *vt * scale)).exp())
        .collect();
    let mut coeffs = fourier_coeffs(&values);
    let mut negative_leakage = 0.0f64;
    for l in (grid / 2)..grid {
        negative_leakage = negative_leakage.max(coeffs[l].norm());
        coeffs[l] = Complex64::new(0.0, 0.0);
    }
    let f_zero = coeffs[0];
    // property (b): |F(0)| = 1/e up to aliasing
    let target = (-1.0f64).exp();
    if (f_zero.norm() - target).abs() > 1e-3 {
        return Err(Error::BoundViolation {
            what: "outer function |F(0)|".into(),
            achieved: f_zero.norm(),
            target,
        });
    }
    Ok(OuterFunctionResult {
        enlarged,
        measure,
        values,
        coeffs,
        negative_leakage,
        f_zero,
    })
}

/// Diagnostics of the convolution construction P = F * Q.
#[derive(Clone, Debug)]
pub struct ConvolutionReport {
    pub p0_abs: f64,
    pub sup_t: f64,
    pub sup_e: f64,
    /// rigorous internal bound: e^{-1/m}·‖q‖_{L¹(m)} + tail(⌊εn⌋)/2π
    pub sup_e_budget: f64,
    /// shape value e^{-(εn)^γ/2} + e^{-1/(2εk)}
    pub two_exp_shape: f64,
    /// measured constant sup_E / shape
    pub shape_constant: f64,
    pub degree: usize,
    pub kernel_l1: f64,
    pub outer_measure: f64,
}

/// Algebraic polynomial of degree < n suppressed on E: P̂(ℓ) = F̂(ℓ)·q̂(ℓ).
/// |P(0)| = 1/e; sup over T at most ‖F‖_∞·‖Q‖_{L¹(m)}; sup over E measured
/// against both the rigorous split bound and the two-exponential shape.
pub fn suppressed_polynomial(
    e: &ArcSet,
    epsilon: f64,
    n: usize,
    gamma: f64,
    grid: usize,
    ctx: PrecisionContext,
) -> Result<(CirclePolynomial, ConvolutionReport)> {
    if (epsilon * n as f64) < 1.0 {
        return Err(Error::Precondition(format!(
            "need εn >= 1, got ε = {epsilon}, n = {n}"
        )));
    }
    let kernel = concentrated_kernel(&KernelSpec { n, gamma, grid })?;
    let outer = outer_function(e, epsilon, grid, ctx)?;
    let g = outer.values.len();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    for (l, c) in coeffs.iter_mut().enumerate() {
        *c = outer.coeffs[l] * kernel.coeff(l as i64);
    }
    // grid values of P
    let mut spectrum = vec![Complex64::new(0.0, 0.0); g];
    spectrum[..n].copy_from_slice(&coeffs);
    let values = inverse_from_coeffs(&spectrum);
    let mut sup_t = 0.0f64;
    let mut sup_e = 0.0f64;
    let step = 2.0 * std::f64::consts::PI / g as f64;
    for (gi, v) in values.iter().enumerate() {
        let m = v.norm();
        if m > sup_t {
            sup_t = m;
        }
        let theta = ctx.real(gi as f64 * step);
        if e.contains(&theta, ctx) && m > sup_e {
            sup_e = m;
        }
    }
    let p0_abs = coeffs[0].norm();
    if (p0_abs - (-1.0f64).exp()).abs() > 1e-3 {
        return Err(Error::BoundViolation {
            what: "|P(0)|".into(),
            achieved: p0_abs,
            target: (-1.0f64).exp(),
        });
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let s_eff = ((epsilon * n as f64).floor() as usize).min(kernel.tails.len() - 1);
    let sup_e_budget =
        (-1.0 / outer.measure).exp() * kernel.l1_norm / two_pi + kernel.tails[s_eff] / two_pi;
    if sup_e > sup_e_budget * 1.05 + 1e-12 {
        return Err(Error::BoundViolation {
            what: "sup over E of the convolution".into(),
            achieved: sup_e,
            target: sup_e_budget,
        });
    }
    let k = e.count() as f64;
    let two_exp_shape =
        (-0.5 * (epsilon * n as f64).powf(gamma)).exp() + (-0.5 / (epsilon * k)).exp();
    let report = ConvolutionReport {
        p0_abs,
        sup_t,
        sup_e,
        sup_e_budget,
        two_exp_shape,
        shape_constant: sup_e / two_exp_shape,
        degree: n - 1,
        kernel_l1: kernel.l1_norm,
        outer_measure: outer.measure,
    };
    Ok((CirclePolynomial::from_c64_coeffs(ctx, &coeffs), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arcs::Arc;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(96)
    }

    #[test]
    fn conjugate_of_cosine_is_sine() {
        let g = 1 << 10;
        let v: Vec<f64> = (0..g)
            .map(|i| (2.0 * std::f64::consts::PI * i as f64 / g as f64).cos())
            .collect();
        let conj = harmonic_conjugate(&v);
        for i in 0..g {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / g as f64;
            assert!((conj[i] - theta.sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn kernel_properties() {
        let kernel = concentrated_kernel(&KernelSpec {
            n: 64,
            gamma: 0.5,
            grid: 1 << 15,
        })
        .unwrap();
        assert_eq!(kernel.coeff(0), 1.0);
        assert!(kernel.l1_norm.is_finite() && kernel.l1_norm > 0.0);
        // grid stability under refinement
        let fine = concentrated_kernel(&KernelSpec {
            n: 64,
            gamma: 0.5,
            grid: 1 << 16,
        })
        .unwrap();
        assert!((kernel.l1_norm - fine.l1_norm).abs() < 1e-3 * kernel.l1_norm);
        // tails decrease
        assert!(kernel.tails[kernel.n / 2] < kernel.tails[1]);
    }

    #[test]
    fn outer_function_quarter_measure() {
        let c = ctx();
        // single arc; enlarged set should have grid measure ~1/4
        let arc_len = 0.25 * 2.0 * std::f64::consts::PI - 0.2;
        let e = ArcSet::from_arcs(vec![Arc::from_f64(1.0, arc_len, c)], c);
        let out = outer_function(&e, 0.1, 1 << 14, c).unwrap();
        assert!((out.measure - 0.25).abs() < 0.01);
        // |F| = e^{-1/m} on the enlarged set, 1 off it (pointwise by construction)
        let g = out.values.len();
        let step = 2.0 * std::f64::consts::PI / g as f64;
        let depressed = (-1.0 / out.measure).exp();
        for (i, v) in out.values.iter().enumerate().step_by(37) {
            let theta = c.real(i as f64 * step);
            let expect = if out.enlarged.contains(&theta, c) {
                depressed
            } else {
                1.0
            };
            assert!((v.norm() - expect).abs() < 1e-9);
        }
        // |F(0)| = 1/e
        assert!((out.f_zero.norm() - (-1.0f64).exp()).abs() < 1e-3);
        // analytic: negative-frequency leakage is aliasing-level only
        assert!(out.negative_leakage < 1e-2);
    }

    #[test]
    fn outer_function_rejects_empty_and_coarse() {
        let c = ctx();
        assert!(outer_function(&ArcSet::empty(), 0.1, 1 << 12, c).is_err());
        let tiny = ArcSet::from_arcs(vec![Arc::from_f64(0.0, 1e-6, c)], c);
        assert!(outer_function(&tiny, 1e-7, 1 << 10, c).is_err());
    }

    #[test]
    fn convolution_is_small_on_e() {
        let c = ctx();
        let arcs: Vec<Arc> = [0.3f64, 1.7, 2.9, 4.4]
            .iter()
            .map(|t| Arc::from_f64(*t, 1e-4, c))
            .collect();
        let e = ArcSet::from_arcs(arcs, c);
        let n = 128;
        let eps = 0.04;
        let (p, report) = suppressed_polynomial(&e, eps, n, 0.5, 1 << 14, c).unwrap();
        assert!(p.degree() < n);
        assert!((report.p0_abs - (-1.0f64).exp()).abs() < 1e-3);
        assert!(report.sup_e < report.sup_t);
        assert!(report.sup_e <= report.sup_e_budget * 1.05 + 1e-12);
    }
}
