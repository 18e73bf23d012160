//! Logarithmic potential theory on finite unions of closed arcs:
//! equilibrium measures, capacity, a discretization polynomial with a
//! per-run certificate, and certificates for super-exponential decay of
//! e_n(ρ).
//!
//! Two independent routes to the equilibrium measure are kept: a convex
//! grid-energy minimization (primary, robust) and the parametric density
//!
//! ```text
//! φ(θ) = (ν(E)/2π) Π_j |z - e^{iβ_j}| / sqrt(Π_j |z - e^{iα_j}||z - e^{iα'_j}|)
//! ```
//!
//! with one interlacing point β_j per gap, pinned by zero-mean (balance)
//! conditions on the gaps plus the total mass, and validated a posteriori
//! by flatness of the potential. The two routes cross-check each other
//! through the Robin constant.
//!
//! Arc endpoints live in extended precision (certificate arcs have lengths
//! far below f64 resolution), but all quadrature runs in f64 on arc-local
//! coordinates: only logarithms of lengths enter, never raw endpoint
//! differences.

use crate::arcs::{Arc, ArcSet};
use crate::error::{Error, Result};
use crate::measure::{Component, Measure};
use crate::poly::{self, CirclePolynomial};
use crate::precision::{CFloat, CompleteAt, PrecisionContext};
use crate::szego;
use rug::Float;
use serde::Serialize;

// --- geometry in arc-local coordinates ---------------------------------------

/// f64 view of an arc set: pairwise start differences computed once in
/// extended precision, everything afterwards in (arc index, fraction)
/// coordinates.
struct Geometry {
    lengths: Vec<f64>,
    log_lengths: Vec<f64>,
    /// start_a - start_b wrapped to (-π, π]
    start_diff: Vec<Vec<f64>>,
}

fn wrap_angle(mut d: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    while d > std::f64::consts::PI {
        d -= two_pi;
    }
    while d < -std::f64::consts::PI {
        d += two_pi;
    }
    d
}

fn wrapped_diff(a: &Float, b: &Float, ctx: PrecisionContext) -> f64 {
    let prec = ctx.bits();
    let pi = ctx.pi();
    let two_pi = ctx.two_pi();
    let mut d = (a - b).at(prec);
    while d > pi {
        d -= &two_pi;
    }
    while d < -pi.clone() {
        d += &two_pi;
    }
    d.to_f64()
}

/// ln(2 sin(d/2)) - ln(d): smooth curvature correction between chordal
/// and angular distance; ~ -d²/24 for small d.
fn chord_correction(d: f64) -> f64 {
    let d = d.abs();
    if d < 1e-4 {
        -d * d / 24.0
    } else {
        (2.0 * (d / 2.0).sin() / d).ln()
    }
}

/// u(ln|u| - 1): antiderivative of ln|u|; odd.
fn h_log(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * (u.abs().ln() - 1.0)
    }
}

/// u²(2 ln|u| - 3)/4: double antiderivative of ln|u|; even.
fn phi_log(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * u * (2.0 * u.abs().ln() - 3.0) / 4.0
    }
}

fn log_chord_of_angle(d: f64) -> f64 {
    let d = d.abs();
    if d > 1e-8 {
        (2.0 * (d / 2.0).sin().abs()).ln()
    } else if d > 0.0 {
        d.ln()
    } else {
        f64::NEG_INFINITY
    }
}

impl Geometry {
    fn new(set: &ArcSet, ctx: PrecisionContext) -> Geometry {
        let p = set.count();
        let arcs = set.arcs();
        let lengths: Vec<f64> = arcs.iter().map(|a| a.length().to_f64()).collect();
        let log_lengths: Vec<f64> = arcs.iter().map(|a| a.log_length()).collect();
        let mut start_diff = vec![vec![0.0; p]; p];
        for a in 0..p {
            for b in 0..p {
                if a != b {
                    start_diff[a][b] = wrapped_diff(arcs[a].start(), arcs[b].start(), ctx);
                }
            }
        }
        Geometry {
            lengths,
            log_lengths,
            start_diff,
        }
    }

    /// ln |e^{iθ_1} - e^{iθ_2}| for points (arc, fraction).
    fn log_chord(&self, a: usize, x: f64, b: usize, y: f64) -> f64 {
        if a == b {
            let t = (x - y).abs();
            if t == 0.0 {
                return f64::NEG_INFINITY;
            }
            let lt = self.lengths[a] * t;
            if lt > 1e-8 {
                (2.0 * (lt / 2.0).sin()).ln()
            } else {
                // exact in the linearized regime; log-space keeps tiny arcs alive
                self.log_lengths[a] + t.ln()
            }
        } else {
            log_chord_of_angle(self.start_diff[a][b] + self.lengths[a] * x - self.lengths[b] * y)
        }
    }
}

// --- equilibrium measure ------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquilibriumMethod {
    Energy,
    Parametric,
    /// run both and error if the Robin constants disagree
    CrossChecked,
}

/// Density samples along one arc: fractions of the arc and density per
/// radian at the requested normalization.
#[derive(Clone, Debug)]
pub struct ArcSamples {
    pub fracs: Vec<f64>,
    pub density: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct EquilibriumResult {
    pub arcs: ArcSet,
    pub normalization: f64,
    /// Robin constant of the unit equilibrium measure: -log cap(E).
    pub robin: f64,
    pub capacity: f64,
    pub density: Vec<ArcSamples>,
    /// interlacing points as (gap index, fraction within the gap)
    pub betas: Option<Vec<(usize, f64)>>,
    /// discrete cell masses (arc, frac_lo, frac_hi, mass) at the requested
    /// normalization, for the potential evaluator
    pub cells: Vec<(usize, f64, f64, f64)>,
    pub method: EquilibriumMethod,
    /// measured flatness of U^ν over E (max |U - mean| at probe points)
    pub flatness: f64,
}

impl EquilibriumResult {
    /// U^ν(e^{iθ}) = Σ mass · ln|e^{iθ} - cell| for probe points away from
    /// the support (cell-midpoint rule; fine off E, use `potential_local`
    /// on E).
    pub fn potential(&self, theta: &Float, ctx: PrecisionContext) -> f64 {
        let prec = ctx.bits();
        let mut u = 0.0f64;
        for (arc_idx, lo, hi, mass) in &self.cells {
            let a = &self.arcs.arcs()[*arc_idx];
            let mid = 0.5 * (lo + hi);
            let node =
                (a.start() + (a.length() * Float::with_val(prec, mid)).at(prec)).at(prec);
            let d = wrapped_diff(theta, &node, ctx);
            u += mass * log_chord_of_angle(d);
        }
        u
    }

    /// Potential at (arc, fraction); exact cell-averaged logs within the
    /// same arc, robust for arcs below f64 resolution.
    fn potential_local(&self, geom: &Geometry, arc: usize, frac: f64) -> f64 {
        let mut u = 0.0;
        for (b, lo, hi, mass) in &self.cells {
            if *b == arc {
                // mass · average over [lo,hi] of ln(L|x-t|) + curvature
                let width = hi - lo;
                let avg = geom.log_lengths[arc]
                    + (h_log(frac - lo) - h_log(frac - hi)) / width;
                let corr =
                    chord_correction(geom.lengths[arc] * (frac - 0.5 * (lo + hi)).abs());
                u += mass * (avg + corr);
            } else {
                u += mass * geom.log_chord(arc, frac, *b, 0.5 * (lo + hi));
            }
        }
        u
    }
}

const ENERGY_CELLS_PER_ARC: usize = 420;

/// Convex grid-energy route: piecewise-constant cell densities on a
/// cosine-graded mesh, exact self and touching-cell energies, midpoint
/// kernel elsewhere. The equilibrium measure of an arc union charges every
/// cell, so the stationarity conditions reduce to one symmetric solve.
fn equilibrium_energy(
    set: &ArcSet,
    normalization: f64,
    ctx: PrecisionContext,
) -> Result<EquilibriumResult> {
    let p = set.count();
    let geom = Geometry::new(set, ctx);
    let m = ENERGY_CELLS_PER_ARC;
    let mut bounds = Vec::with_capacity(m + 1);
    for i in 0..=m {
        bounds.push(0.5 * (1.0 - (std::f64::consts::PI * i as f64 / m as f64).cos()));
    }
    let centers: Vec<f64> = (0..m).map(|i| 0.5 * (bounds[i] + bounds[i + 1])).collect();
    let widths: Vec<f64> = (0..m).map(|i| bounds[i + 1] - bounds[i]).collect();

    let n_tot = p * m;
    let idx = |a: usize, i: usize| a * m + i;
    let mut k = vec![0.0f64; n_tot * n_tot];
    for a in 0..p {
        let log_la = geom.log_lengths[a];
        let la = geom.lengths[a];
        for i in 0..m {
            for j in 0..=i {
                // exact pair-averaged -ln|s-t| over the two cells (corner
                // combination of the double antiderivative), in fractions;
                // the common arc-length log splits off additively
                let (a1, b1) = (bounds[i], bounds[i + 1]);
                let (a2, b2) = (bounds[j], bounds[j + 1]);
                let combo = phi_log(b1 - a2) + phi_log(a1 - b2)
                    - phi_log(b1 - b2)
                    - phi_log(a1 - a2);
                let mut v = -log_la - combo / (widths[i] * widths[j]);
                v -= chord_correction(la * (centers[i] - centers[j]).abs());
                k[idx(a, i) * n_tot + idx(a, j)] = v;
                k[idx(a, j) * n_tot + idx(a, i)] = v;
            }
        }
        for b in 0..a {
            for i in 0..m {
                for j in 0..m {
                    let v = -geom.log_chord(a, centers[i], b, centers[j]);
                    k[idx(a, i) * n_tot + idx(b, j)] = v;
                    k[idx(b, j) * n_tot + idx(a, i)] = v;
                }
            }
        }
    }
    let mut rhs = vec![1.0f64; n_tot];
    let u = solve_dense_f64(&mut k, &mut rhs, n_tot)
        .ok_or_else(|| Error::NonConvergence("singular energy kernel".into()))?;
    let total: f64 = u.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::NonConvergence(
            "energy minimization produced a nonpositive mass".into(),
        ));
    }
    let robin = 1.0 / total;
    let mut cells = Vec::with_capacity(n_tot);
    let mut density = Vec::with_capacity(p);
    for a in 0..p {
        let mut fr = Vec::with_capacity(m);
        let mut de = Vec::with_capacity(m);
        for i in 0..m {
            let w = normalization * u[idx(a, i)] / total;
            if w < -1e-9 * normalization {
                return Err(Error::NonConvergence(format!(
                    "negative equilibrium cell mass {w:e}"
                )));
            }
            let w = w.max(0.0);
            cells.push((a, bounds[i], bounds[i + 1], w));
            fr.push(centers[i]);
            let log_phi = if w > 0.0 {
                w.ln() - geom.log_lengths[a] - widths[i].ln()
            } else {
                f64::NEG_INFINITY
            };
            de.push(log_phi.exp());
        }
        density.push(ArcSamples {
            fracs: fr,
            density: de,
        });
    }
    let mut result = EquilibriumResult {
        arcs: set.clone(),
        normalization,
        robin,
        capacity: (-robin).exp(),
        density,
        betas: None,
        cells,
        method: EquilibriumMethod::Energy,
        flatness: 0.0,
    };
    result.flatness = measure_flatness(&result, &geom);
    Ok(result)
}

fn measure_flatness(r: &EquilibriumResult, geom: &Geometry) -> f64 {
    let mut vals = Vec::new();
    for a in 0..r.arcs.count() {
        for x in [0.23f64, 0.41, 0.5, 0.66, 0.81] {
            vals.push(r.potential_local(geom, a, x));
        }
    }
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    vals.iter()
        .map(|v| (v - mean).abs())
        .fold(0.0f64, f64::max)
}

/// Dense f64 solve with partial pivoting.
fn solve_dense_f64(a: &mut [f64], b: &mut [f64], n: usize) -> Option<Vec<f64>> {
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let mut piv = col;
        let mut best = a[perm[col] * n + col].abs();
        for r in (col + 1)..n {
            let v = a[perm[r] * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return None;
        }
        perm.swap(col, piv);
        let prow = perm[col];
        let pivot = a[prow * n + col];
        for r in (col + 1)..n {
            let row = perm[r];
            let f = a[row * n + col] / pivot;
            if f != 0.0 {
                for c in (col + 1)..n {
                    a[row * n + c] -= f * a[prow * n + c];
                }
                b[row] -= f * b[prow];
            }
            a[row * n + col] = f;
        }
    }
    let mut x = vec![0.0f64; n];
    for r in (0..n).rev() {
        let row = perm[r];
        let mut s = b[row];
        for c in (r + 1)..n {
            s -= a[row * n + c] * x[c];
        }
        x[r] = s / a[row * n + r];
    }
    Some(x)
}

// --- parametric density -------------------------------------------------------

/// Closed-form density evaluation in arc-local coordinates. Interlacing
/// points are (gap index, fraction); all products are carried as logs.
struct PhiEvaluator {
    arc_count: usize,
    geom: Geometry,
    gap_lengths: Vec<f64>,
    /// start(gap g) - start(gap h) wrapped
    gap_diff: Vec<Vec<f64>>,
    /// start(arc a) - start(gap g) wrapped
    arc_gap_diff: Vec<Vec<f64>>,
    norm: f64,
}

impl PhiEvaluator {
    fn new(set: &ArcSet, gaps: &[Arc], norm: f64, ctx: PrecisionContext) -> PhiEvaluator {
        let geom = Geometry::new(set, ctx);
        let p = set.count();
        let g = gaps.len();
        let mut gap_diff = vec![vec![0.0; g]; g];
        for i in 0..g {
            for j in 0..g {
                if i != j {
                    gap_diff[i][j] = wrapped_diff(gaps[i].start(), gaps[j].start(), ctx);
                }
            }
        }
        let mut arc_gap_diff = vec![vec![0.0; g]; p];
        for (a, arc) in set.arcs().iter().enumerate() {
            for (j, gap) in gaps.iter().enumerate() {
                arc_gap_diff[a][j] = wrapped_diff(arc.start(), gap.start(), ctx);
            }
        }
        PhiEvaluator {
            arc_count: p,
            geom,
            gap_lengths: gaps.iter().map(|x| x.length().to_f64()).collect(),
            gap_diff,
            arc_gap_diff,
            norm,
        }
    }

    /// log φ per radian at (arc a, fraction x).
    fn log_phi(&self, a: usize, x: f64, betas: &[(usize, f64)]) -> f64 {
        let mut log_num = 0.0;
        for (g, y) in betas {
            let d = self.arc_gap_diff[a][*g] + self.geom.lengths[a] * x
                - self.gap_lengths[*g] * y;
            log_num += log_chord_of_angle(wrap_angle(d));
        }
        let mut log_den = 0.0;
        for b in 0..self.arc_count {
            log_den += self.geom.log_chord(a, x, b, 0.0);
            log_den += self.geom.log_chord(a, x, b, 1.0);
        }
        (self.norm / (2.0 * std::f64::consts::PI)).ln() + log_num - 0.5 * log_den
    }

    /// log |ψ| at (gap g, fraction x): the same expression continued into a
    /// gap.
    fn log_psi(&self, g: usize, x: f64, betas: &[(usize, f64)]) -> f64 {
        let mut log_num = 0.0;
        for (h, y) in betas {
            let d = if *h == g {
                self.gap_lengths[g] * (x - y)
            } else {
                self.gap_diff[g][*h] + self.gap_lengths[g] * x - self.gap_lengths[*h] * y
            };
            log_num += log_chord_of_angle(wrap_angle(d));
        }
        let mut log_den = 0.0;
        for b in 0..self.arc_count {
            for e in [0.0f64, 1.0] {
                let d = -self.arc_gap_diff[b][g] - self.geom.lengths[b] * e
                    + self.gap_lengths[g] * x;
                log_den += log_chord_of_angle(wrap_angle(d));
            }
        }
        (self.norm / (2.0 * std::f64::consts::PI)).ln() + log_num - 0.5 * log_den
    }

    /// ∫_arc φ dθ via the cosine substitution removing both endpoint
    /// singularities.
    fn arc_mass(&self, a: usize, betas: &[(usize, f64)]) -> f64 {
        let n = 384;
        let mut s = 0.0;
        for i in 0..n {
            let u = std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
            let x = 0.5 * (1.0 - u.cos());
            let jac = 0.5 * u.sin() * std::f64::consts::PI / n as f64;
            s += self.log_phi(a, x, betas).exp() * jac;
        }
        s * self.geom.lengths[a]
    }

    fn total_mass(&self, betas: &[(usize, f64)]) -> f64 {
        (0..self.arc_count).map(|a| self.arc_mass(a, betas)).sum()
    }

    /// Balance defect on gap g: ∫ of |ψ| before β minus after β; zero at
    /// the equilibrium interlacing point.
    fn gap_balance(&self, g: usize, betas: &[(usize, f64)]) -> f64 {
        let y = betas.iter().find(|(h, _)| *h == g).unwrap().1;
        let n = 256;
        let mut left = 0.0;
        for i in 0..n {
            // [0, y] with a 1/sqrt singularity at 0: x = y t²
            let t = (i as f64 + 0.5) / n as f64;
            let x = y * t * t;
            let jac = 2.0 * y * t / n as f64;
            left += self.log_psi(g, x, betas).exp() * jac;
        }
        let mut right = 0.0;
        for i in 0..n {
            let t = (i as f64 + 0.5) / n as f64;
            let x = 1.0 - (1.0 - y) * t * t;
            let jac = 2.0 * (1.0 - y) * t / n as f64;
            right += self.log_psi(g, x, betas).exp() * jac;
        }
        (left - right) * self.gap_lengths[g]
    }
}

/// One interlacing point per gap from the balance/mass system; gap-midpoint
/// start, damped Newton, β kept strictly inside its gap.
fn solve_betas(phi: &PhiEvaluator, normalization: f64) -> Result<Vec<(usize, f64)>> {
    let p = phi.arc_count;
    let betas_of = |y: &[f64]| -> Vec<(usize, f64)> {
        y.iter().enumerate().map(|(g, v)| (g, *v)).collect()
    };
    if p == 1 {
        // single gap: the balance condition is monotone in β — bisection
        let mut lo = 1e-9;
        let mut hi = 1.0 - 1e-9;
        let bal = |y: f64| phi.gap_balance(0, &[(0usize, y)]);
        let (blo, bhi) = (bal(lo), bal(hi));
        if blo.signum() == bhi.signum() {
            return Err(Error::NonConvergence(
                "single-gap balance has no sign change".into(),
            ));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let b = bal(mid);
            if b.signum() == blo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-14 {
                break;
            }
        }
        let y = 0.5 * (lo + hi);
        let mass = phi.total_mass(&[(0usize, y)]);
        if (mass - normalization).abs() > 2e-4 * normalization {
            return Err(Error::CrossCheck {
                what: "parametric mass at the balanced interlacing point".into(),
                a: mass,
                b: normalization,
                tol: 2e-4 * normalization,
            });
        }
        return Ok(vec![(0, y)]);
    }
    let mut y: Vec<f64> = vec![0.5; p];
    let residual = |y: &[f64]| -> Vec<f64> {
        let betas = betas_of(y);
        let mut r = Vec::with_capacity(p);
        for g in 0..(p - 1) {
            r.push(phi.gap_balance(g, &betas));
        }
        r.push(phi.total_mass(&betas) - normalization);
        r
    };
    let scale = normalization.max(1.0);
    for _ in 0..80 {
        let r = residual(&y);
        let norm_r = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if norm_r <= 1e-10 * scale {
            return Ok(betas_of(&y));
        }
        let h = 1e-7;
        let mut jac = vec![0.0f64; p * p];
        for c in 0..p {
            let mut yh = y.clone();
            yh[c] = (yh[c] + h).min(1.0 - 1e-9);
            let rh = residual(&yh);
            for (row, jrow) in rh.iter().enumerate() {
                jac[row * p + c] = (jrow - r[row]) / (yh[c] - y[c]);
            }
        }
        let mut rhs = r.clone();
        let delta = solve_dense_f64(&mut jac, &mut rhs, p).ok_or_else(|| {
            Error::NonConvergence("singular Jacobian in parametric equilibrium solve".into())
        })?;
        let mut step = 1.0f64;
        for i in 0..p {
            let target = y[i] - delta[i];
            if !(0.0..=1.0).contains(&target) {
                step = step.min(0.45 * y[i].min(1.0 - y[i]) / delta[i].abs().max(1e-300));
            }
        }
        for i in 0..p {
            y[i] = (y[i] - step * delta[i]).clamp(1e-7, 1.0 - 1e-7);
        }
    }
    let r = residual(&y);
    let norm_r = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if norm_r > 1e-7 * scale {
        return Err(Error::NonConvergence(format!(
            "parametric equilibrium Newton stalled at residual {norm_r:e}"
        )));
    }
    Ok(betas_of(&y))
}

fn equilibrium_parametric(
    set: &ArcSet,
    normalization: f64,
    ctx: PrecisionContext,
) -> Result<EquilibriumResult> {
    let p = set.count();
    let gaps = set.gaps(ctx);
    if gaps.len() != p {
        return Err(Error::Precondition(
            "parametric method needs one gap per arc".into(),
        ));
    }
    let phi = PhiEvaluator::new(set, &gaps, normalization, ctx);
    let betas = solve_betas(&phi, normalization)?;
    // discretize φ into cell masses for the potential evaluator, Gauss
    // panels per cosine-graded cell
    let cell_count = 640;
    let mut cells = Vec::with_capacity(p * cell_count);
    let mut density = Vec::with_capacity(p);
    for a in 0..p {
        let mut fr = Vec::with_capacity(cell_count);
        let mut de = Vec::with_capacity(cell_count);
        for i in 0..cell_count {
            let u0 = std::f64::consts::PI * i as f64 / cell_count as f64;
            let u1 = std::f64::consts::PI * (i + 1) as f64 / cell_count as f64;
            let x0 = 0.5 * (1.0 - u0.cos());
            let x1 = 0.5 * (1.0 - u1.cos());
            // 4-point panel in the u parameter
            let mut mass = 0.0;
            for q in 0..4 {
                let u = u0 + (u1 - u0) * (q as f64 + 0.5) / 4.0;
                let x = 0.5 * (1.0 - u.cos());
                let jac = 0.5 * u.sin() * (u1 - u0) / 4.0;
                mass += phi.log_phi(a, x, &betas).exp() * jac;
            }
            mass *= phi.geom.lengths[a];
            cells.push((a, x0, x1, mass));
            let xm = 0.5 * (x0 + x1);
            fr.push(xm);
            de.push(phi.log_phi(a, xm.clamp(1e-12, 1.0 - 1e-12), &betas).exp());
        }
        density.push(ArcSamples {
            fracs: fr,
            density: de,
        });
    }
    let total: f64 = cells.iter().map(|(_, _, _, m)| m).sum();
    for cell in cells.iter_mut() {
        cell.3 *= normalization / total;
    }
    let mut result = EquilibriumResult {
        arcs: set.clone(),
        normalization,
        robin: 0.0,
        capacity: 0.0,
        density,
        betas: Some(betas),
        cells,
        method: EquilibriumMethod::Parametric,
        flatness: 0.0,
    };
    let geom = Geometry::new(set, ctx);
    let mut u_vals = Vec::new();
    for a in 0..p {
        for x in [0.29f64, 0.5, 0.77] {
            u_vals.push(result.potential_local(&geom, a, x));
        }
    }
    let u_mean = u_vals.iter().sum::<f64>() / u_vals.len() as f64;
    result.robin = -u_mean / normalization;
    result.capacity = (-result.robin).exp();
    result.flatness = measure_flatness(&result, &geom);
    Ok(result)
}

/// Equilibrium measure of a union of disjoint closed arcs.
pub fn equilibrium_measure(
    set: &ArcSet,
    normalization: f64,
    method: EquilibriumMethod,
    ctx: PrecisionContext,
) -> Result<EquilibriumResult> {
    if set.is_empty() {
        return Err(Error::Precondition(
            "equilibrium measure of the empty set".into(),
        ));
    }
    if normalization <= 0.0 {
        return Err(Error::Precondition("normalization must be positive".into()));
    }
    if set.is_full_circle(ctx) {
        let cell_count = 512;
        let mut cells = Vec::with_capacity(cell_count);
        let mut fr = Vec::with_capacity(cell_count);
        let mut de = Vec::with_capacity(cell_count);
        for i in 0..cell_count {
            let x0 = i as f64 / cell_count as f64;
            let x1 = (i + 1) as f64 / cell_count as f64;
            cells.push((0usize, x0, x1, normalization / cell_count as f64));
            fr.push(0.5 * (x0 + x1));
            de.push(normalization / (2.0 * std::f64::consts::PI));
        }
        return Ok(EquilibriumResult {
            arcs: set.clone(),
            normalization,
            robin: 0.0,
            capacity: 1.0,
            density: vec![ArcSamples {
                fracs: fr,
                density: de,
            }],
            betas: None,
            cells,
            method,
            flatness: 0.0,
        });
    }
    match method {
        EquilibriumMethod::Energy => equilibrium_energy(set, normalization, ctx),
        EquilibriumMethod::Parametric => equilibrium_parametric(set, normalization, ctx),
        EquilibriumMethod::CrossChecked => {
            let a = equilibrium_energy(set, normalization, ctx)?;
            let b = equilibrium_parametric(set, normalization, ctx)?;
            let tol = 1e-3 * a.robin.abs().max(1.0);
            if (a.robin - b.robin).abs() > tol {
                return Err(Error::CrossCheck {
                    what: "equilibrium Robin constant".into(),
                    a: a.robin,
                    b: b.robin,
                    tol,
                });
            }
            Ok(a)
        }
    }
}

/// Logarithmic capacity of a union of closed arcs (energy route).
pub fn capacity(set: &ArcSet, ctx: PrecisionContext) -> Result<f64> {
    Ok((-robin_constant(set, ctx)?).exp())
}

/// -log cap(E); finite and well scaled when the capacity itself underflows.
pub fn robin_constant(set: &ArcSet, ctx: PrecisionContext) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::Precondition("capacity of the empty set".into()));
    }
    if set.is_full_circle(ctx) {
        return Ok(0.0);
    }
    Ok(equilibrium_energy(set, 1.0, ctx)?.robin)
}

// --- discretization polynomial ------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct DiscretizationCertificate {
    pub n: usize,
    pub arc_count: usize,
    /// number of split arcs Δ_j
    pub pieces: usize,
    pub degree: usize,
    pub degree_bound: usize,
    /// grid max over E of log|P| - U^ν - N·3ln2 (must be ≤ 0)
    pub max_defect: f64,
    /// max over probes of LHS - RHS in
    /// 4∫_Δ φ ln(1/|t-θ|) dt ≤ 3 ln(1/(|θ-γ||θ-γ'|)) + 2
    pub eq3_max_defect: f64,
    pub critical_points: usize,
    pub pass: bool,
    /// effective (C, C1) when n < 14 forces them above (28, 80)
    pub enlarged_constants: Option<(usize, usize)>,
}

/// Splits E along the equilibrium density at normalization n into N arcs
/// Δ_j with ∫_Δ φ ≤ 1/4, φ monotone per piece and every piece shorter than
/// π/8 (N ≤ 14n once n ≥ 14), and returns the monic polynomial
/// P = Π_j (z-e^{iγ_j})(z-e^{iγ'_j}) of degree 2N with the grid-verified
/// certificate log|P| ≤ U^ν + (3 ln 2) N on E.
pub fn discretization_polynomial(
    set: &ArcSet,
    n: usize,
    ctx: PrecisionContext,
) -> Result<(CirclePolynomial, DiscretizationCertificate)> {
    if set.is_empty() || set.is_full_circle(ctx) {
        return Err(Error::Precondition(
            "discretization needs a proper nonempty arc union".into(),
        ));
    }
    let p = set.count();
    if p > n {
        return Err(Error::Precondition(format!("arc count {p} exceeds n = {n}")));
    }
    let prec = ctx.bits();
    let eq = equilibrium_parametric(set, n as f64, ctx)?;
    let geom = Geometry::new(set, ctx);
    let gaps = set.gaps(ctx);
    let phi = PhiEvaluator::new(set, &gaps, n as f64, ctx);
    let betas = eq.betas.clone().unwrap();

    let table = 4096usize;
    let mut critical_total = 0usize;
    let mut all_splits: Vec<Vec<f64>> = Vec::with_capacity(p);
    for a in 0..p {
        // dense tables of log φ and the mass CDF in the cosine parameter
        let mut xs = Vec::with_capacity(table + 1);
        let mut lphi = Vec::with_capacity(table + 1);
        let mut cdf = vec![0.0f64; table + 1];
        for i in 0..=table {
            let u = std::f64::consts::PI * i as f64 / table as f64;
            let x = 0.5 * (1.0 - u.cos());
            xs.push(x);
            lphi.push(phi.log_phi(a, x.clamp(1e-12, 1.0 - 1e-12), &betas));
        }
        let du = std::f64::consts::PI / table as f64;
        for i in 0..table {
            let u = std::f64::consts::PI * (i as f64 + 0.5) / table as f64;
            let x = 0.5 * (1.0 - u.cos());
            let jac = 0.5 * u.sin() * du * geom.lengths[a];
            cdf[i + 1] = cdf[i] + phi.log_phi(a, x, &betas).exp() * jac;
        }
        // critical points of φ: sign changes of the discrete derivative
        let mut crit: Vec<f64> = Vec::new();
        let margin = table / 128;
        let mut last_sign = 0i8;
        for i in margin..(table - margin) {
            let d = lphi[i + 1] - lphi[i];
            let s = if d > 0.0 {
                1i8
            } else if d < 0.0 {
                -1
            } else {
                0
            };
            if s != 0 {
                if last_sign != 0 && s != last_sign {
                    crit.push(xs[i]);
                }
                last_sign = s;
            }
        }
        if crit.len() > 8 * p {
            return Err(Error::NonConvergence(format!(
                "density critical-point count {} exceeds 8p-1",
                crit.len()
            )));
        }
        critical_total += crit.len();
        let mut splits: Vec<f64> = vec![0.0];
        splits.extend(crit.iter().cloned());
        splits.push(1.0);
        // mass splitting to ≤ 1/4 per piece via CDF quantiles
        let cdf_at = |x: f64| -> f64 {
            let u = (1.0 - 2.0 * x).clamp(-1.0, 1.0).acos();
            let tpos = u / std::f64::consts::PI * table as f64;
            let i = (tpos.floor() as usize).min(table - 1);
            let frac = tpos - i as f64;
            cdf[i] * (1.0 - frac) + cdf[i + 1] * frac
        };
        let invert_cdf = |target: f64| -> f64 {
            let mut lo = 0usize;
            let mut hi = table;
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if cdf[mid] < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let span = cdf[hi] - cdf[lo];
            let frac = if span > 0.0 {
                ((target - cdf[lo]) / span).clamp(0.0, 1.0)
            } else {
                0.5
            };
            let u = std::f64::consts::PI * (lo as f64 + frac) / table as f64;
            0.5 * (1.0 - u.cos())
        };
        let mut refined: Vec<f64> = vec![0.0];
        for w in splits.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            let (m0, m1) = (cdf_at(x0), cdf_at(x1));
            let chunks = (((m1 - m0) / 0.2499).ceil() as usize).max(1);
            for c in 1..chunks {
                refined.push(invert_cdf(m0 + (m1 - m0) * c as f64 / chunks as f64));
            }
            refined.push(x1);
        }
        // length splitting: every final piece shorter than π/8
        let max_len_frac = if geom.lengths[a] > std::f64::consts::PI / 8.0 {
            (std::f64::consts::PI / 8.0) / geom.lengths[a] * 0.999
        } else {
            2.0
        };
        let mut final_splits: Vec<f64> = vec![0.0];
        for w in refined.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            if x1 - x0 > max_len_frac {
                let parts = (((x1 - x0) / max_len_frac).ceil() as usize).max(1);
                for c in 1..parts {
                    final_splits.push(x0 + (x1 - x0) * c as f64 / parts as f64);
                }
            }
            final_splits.push(x1);
        }
        final_splits.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
        all_splits.push(final_splits);
    }
    let pieces: usize = all_splits.iter().map(|s| s.len() - 1).sum();
    let degree_bound = 28 * n;
    let enlarged = if n >= 14 && 2 * pieces <= degree_bound {
        None
    } else {
        let c_eff = (2 * pieces).div_ceil(n);
        Some((c_eff, 3 * c_eff))
    };
    if n >= 14 && pieces > 14 * n {
        return Err(Error::BoundViolation {
            what: "split count of the discretization".into(),
            achieved: pieces as f64,
            target: (14 * n) as f64,
        });
    }

    // roots: both endpoints of every Δ_j (interior split points doubled)
    let mut roots: Vec<(CFloat, u32)> = Vec::with_capacity(2 * pieces);
    for (a, splits) in all_splits.iter().enumerate() {
        let arc = &set.arcs()[a];
        for w in splits.windows(2) {
            for x in [w[0], w[1]] {
                let theta =
                    (arc.start() + (arc.length() * Float::with_val(prec, x)).at(prec)).at(prec);
                roots.push((ctx.cis(&theta), 1));
            }
        }
    }
    let polynomial = CirclePolynomial::from_roots(ctx, &roots);
    let degree = polynomial.degree();

    // certificate: log|P| ≤ U^ν + N·3ln2 sampled over E
    let three_ln2 = 3.0 * std::f64::consts::LN_2;
    let slack = pieces as f64 * three_ln2;
    let mut max_defect = f64::NEG_INFINITY;
    for a in 0..p {
        let arc = &set.arcs()[a];
        for i in 0..96 {
            let u = std::f64::consts::PI * (i as f64 + 0.5) / 96.0;
            let x = 0.5 * (1.0 - u.cos());
            let theta =
                (arc.start() + (arc.length() * Float::with_val(prec, x)).at(prec)).at(prec);
            let lp = polynomial.log_abs_at(&theta, ctx).to_f64();
            let upot = eq.potential_local(&geom, a, x);
            let defect = lp - upot - slack;
            if defect > max_defect {
                max_defect = defect;
            }
        }
    }

    // inner inequality (eq:3) at interior probes of each Δ_j
    let mut eq3_max_defect = f64::NEG_INFINITY;
    for (a, splits) in all_splits.iter().enumerate() {
        for w in splits.windows(2) {
            let (x0, x1) = (w[0], w[1]);
            if x1 - x0 < 1e-12 {
                continue;
            }
            for probe in 0..32 {
                let t = (probe as f64 + 0.62) / 32.3;
                let xt = x0 + (x1 - x0) * t;
                let lhs = 4.0 * piece_log_integral(&phi, &betas, &geom, a, x0, x1, xt);
                let log_la = geom.log_lengths[a];
                let rhs =
                    3.0 * (-((xt - x0).ln() + log_la) - ((x1 - xt).ln() + log_la)) + 2.0;
                let defect = lhs - rhs;
                if defect > eq3_max_defect {
                    eq3_max_defect = defect;
                }
            }
        }
    }

    let pass = max_defect <= 1e-6 && eq3_max_defect <= 1e-6;
    let cert = DiscretizationCertificate {
        n,
        arc_count: p,
        pieces,
        degree,
        degree_bound,
        max_defect,
        eq3_max_defect,
        critical_points: critical_total,
        pass,
        enlarged_constants: enlarged,
    };
    if !pass {
        return Err(Error::BoundViolation {
            what: format!(
                "discretization certificate (defect {max_defect:e}, eq3 {eq3_max_defect:e})"
            ),
            achieved: max_defect.max(eq3_max_defect),
            target: 0.0,
        });
    }
    Ok((polynomial, cert))
}

/// ∫_{Δ} φ(t) ln(1/|t-θ|) dt in arc-local coordinates, geometric panels
/// graded into the logarithmic singularity at θ.
fn piece_log_integral(
    phi: &PhiEvaluator,
    betas: &[(usize, f64)],
    geom: &Geometry,
    a: usize,
    x0: f64,
    x1: f64,
    xt: f64,
) -> f64 {
    let la = geom.lengths[a];
    let log_la = geom.log_lengths[a];
    let mut total = 0.0;
    for (lo, hi, sing_at_lo) in [(x0, xt, false), (xt, x1, true)] {
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        let levels = 30;
        for lvl in 0..levels {
            let f1 = 0.5f64.powi(lvl);
            let f0 = if lvl + 1 == levels {
                0.0
            } else {
                0.5f64.powi(lvl + 1)
            };
            // distances measured from the singular end (hi for the left
            // piece, lo for the right piece)
            let (pa, pb) = if sing_at_lo {
                (lo + span * f0, lo + span * f1)
            } else {
                (hi - span * f1, hi - span * f0)
            };
            let nn = 8;
            for i in 0..nn {
                let x = pa + (pb - pa) * (i as f64 + 0.5) / nn as f64;
                let dist = (x - xt).abs().max(1e-290);
                let val = phi.log_phi(a, x.clamp(1e-12, 1.0 - 1e-12), betas).exp()
                    * (-(dist.ln() + log_la));
                total += val * (pb - pa) / nn as f64 * la;
            }
        }
    }
    total
}

// --- decay certificates ---------------------------------------------------------

/// Upper bound for the measure mass outside a set of arcs. Exact for atoms
/// and constant densities; conservative (full component mass) otherwise.
pub fn mass_outside(measure: &Measure, arcs: &ArcSet, ctx: PrecisionContext) -> Result<Float> {
    let prec = ctx.bits();
    let mut outside = Float::new(prec);
    for (w, comp) in &measure.components {
        if *w == 0.0 {
            continue;
        }
        let weight = ctx.real(*w);
        match comp {
            Component::Atomic(at) => {
                for (angle, mass) in &at.atoms {
                    let theta = angle.radians(ctx);
                    if !arcs.contains(&theta, ctx) {
                        outside += weight.clone() * ctx.real(*mass);
                    }
                }
            }
            Component::Density(d) => {
                for piece in &d.pieces {
                    let a0 = piece.start.radians(ctx);
                    let len = piece.length.radians(ctx);
                    match &piece.family {
                        crate::measure::DensityFamily::Const { value } => {
                            let overlap = overlap_length(&a0, &len, arcs, ctx);
                            let mut rest = (len.clone() - overlap).at(prec);
                            if rest < 0 {
                                rest = Float::new(prec);
                            }
                            outside += weight.clone() * ctx.real(*value) * rest / ctx.two_pi();
                        }
                        _ => {
                            let m = crate::measure::PiecewiseDensityComponent {
                                pieces: vec![piece.clone()],
                            }
                            .mass(1e-12, ctx)?;
                            outside += weight.clone() * m;
                        }
                    }
                }
            }
            Component::Riesz(_) => {
                outside += weight.clone();
            }
        }
    }
    Ok(outside)
}

/// Total angular length of the intersection of [a0, a0+len] with the arcs.
fn overlap_length(a0: &Float, len: &Float, arcs: &ArcSet, ctx: PrecisionContext) -> Float {
    let prec = ctx.bits();
    let two_pi = ctx.two_pi();
    let mut total = Float::new(prec);
    let piece_end = (a0 + len).at(prec);
    for arc in arcs.arcs() {
        for k in [-1i32, 0, 1] {
            let shift = (Float::with_val(prec, k) * &two_pi).at(prec);
            let s = (arc.start() + &shift).at(prec);
            let e = (&s + arc.length()).at(prec);
            let lo = if s > *a0 { s.clone() } else { a0.clone() };
            let hi = if e < piece_end { e } else { piece_end.clone() };
            if hi > lo {
                total += hi - lo;
            }
        }
    }
    total
}

fn ser_float<S: serde::Serializer>(x: &Float, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::report::decimal_string(x))
}

#[derive(Clone, Debug, Serialize)]
pub struct MetricACertificate {
    pub n: usize,
    pub omega: f64,
    pub arc_count: usize,
    pub harmonic_sum: f64,
    pub harmonic_bound: f64,
    #[serde(serialize_with = "ser_float")]
    pub residual: Float,
    #[serde(serialize_with = "ser_float")]
    pub residual_bound: Float,
    pub pass_arc_count: bool,
    pub pass_harmonic: bool,
    pub pass_residual: bool,
    pub pass: bool,
    #[serde(skip)]
    pub arcs: ArcSet,
}

/// Forward metric certificate: from e_n ≤ e^{-Ω} (Ω ≥ 16 n ln n) to arcs
/// {|Q| ≤ e^{-Ω/2}} with Σ 1/ln(1/|I_ℓ|) ≤ 8 n ln n / Ω and residual mass
/// at most e^{-Ω}.
pub fn certify_metric_a(
    measure: &Measure,
    n: usize,
    omega: f64,
    ctx: PrecisionContext,
) -> Result<MetricACertificate> {
    if n < 3 {
        return Err(Error::HypothesisNotMet("need n >= 3".into()));
    }
    if omega < 16.0 * n as f64 * (n as f64).ln() {
        return Err(Error::HypothesisNotMet(format!(
            "need Ω ≥ 16 n ln n = {:.3}",
            16.0 * n as f64 * (n as f64).ln()
        )));
    }
    let r = szego::szego_en(measure, n, ctx)?;
    let e_bound = ctx.real(-omega).exp();
    if r.e > e_bound {
        return Err(Error::HypothesisNotMet(format!(
            "e_n = {:e} exceeds e^-Ω = {:e}",
            r.e.to_f64(),
            e_bound.to_f64()
        )));
    }
    let tau = ctx.real(-omega / 2.0).exp();
    let sub = poly::sublevel_arcs(&r.extremal, &tau, ctx)?;
    let arcs = sub.arcs;
    let p = arcs.count();
    let mut harmonic_sum = 0.0f64;
    let mut lengths_ok = true;
    for a in arcs.arcs() {
        let ll = a.log_length();
        if ll >= 0.0 {
            lengths_ok = false;
        } else {
            harmonic_sum += 1.0 / (-ll);
        }
    }
    let harmonic_bound = 8.0 * n as f64 * (n as f64).ln() / omega;
    let residual = mass_outside(measure, &arcs, ctx)?;
    let residual_bound = e_bound;
    let pass_arc_count = p <= n && p > 0;
    let pass_harmonic = lengths_ok && harmonic_sum <= harmonic_bound;
    let pass_residual = residual <= residual_bound;
    Ok(MetricACertificate {
        n,
        omega,
        arc_count: p,
        harmonic_sum,
        harmonic_bound,
        residual,
        residual_bound,
        pass_arc_count,
        pass_harmonic,
        pass_residual,
        pass: pass_arc_count && pass_harmonic && pass_residual,
        arcs,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MetricBCertificate {
    pub n: usize,
    pub omega: f64,
    pub degree: usize,
    /// certified upper bound for e_n² (= ∫|P|² dρ)
    #[serde(serialize_with = "ser_float")]
    pub bound_sq: Float,
    /// 4 e^{-Ω}
    #[serde(serialize_with = "ser_float")]
    pub target_sq: Float,
    pub pass: bool,
}

/// Reverse metric certificate: given arcs carrying all but e^{-Ω} of the
/// mass with Σ 1/ln(1/|I_ℓ|) ≤ n/(2Ω), certifies e_n² ≤ ∫|P|²dρ ≤ 4e^{-Ω}
/// through the vanishing-power polynomial with m_ℓ = ⌊Ω / ln(1/|I_ℓ|)⌋.
pub fn certify_metric_b(
    arcs: &ArcSet,
    measure: &Measure,
    n: usize,
    omega: f64,
    ctx: PrecisionContext,
) -> Result<MetricBCertificate> {
    let p = arcs.count();
    if p == 0 || 2 * p > n {
        return Err(Error::HypothesisNotMet(format!(
            "need 1 ≤ p ≤ n/2, got p = {p}"
        )));
    }
    if omega < 4.0 * n as f64 {
        return Err(Error::HypothesisNotMet("need Ω ≥ 4n".into()));
    }
    let mut harmonic = 0.0f64;
    for a in arcs.arcs() {
        let ll = a.log_length();
        if ll >= 0.0 {
            return Err(Error::HypothesisNotMet("arcs must have length < 1".into()));
        }
        harmonic += 1.0 / (-ll);
    }
    if harmonic > n as f64 / (2.0 * omega) {
        return Err(Error::HypothesisNotMet(format!(
            "harmonic sum {harmonic:e} exceeds n/(2Ω)"
        )));
    }
    let residual = mass_outside(measure, arcs, ctx)?;
    let e_omega = ctx.real(-omega).exp();
    if residual > e_omega {
        return Err(Error::HypothesisNotMet(format!(
            "residual mass {:e} exceeds e^-Ω",
            residual.to_f64()
        )));
    }
    let prec = ctx.bits();
    let roots: Vec<(CFloat, u32)> = arcs
        .arcs()
        .iter()
        .map(|a| {
            let m = (omega / (-a.log_length())).floor() as u32;
            (ctx.cis(&a.midpoint()), m + 1)
        })
        .collect();
    let degree: usize = roots.iter().map(|(_, m)| *m as usize).sum();
    if degree > n {
        return Err(Error::HypothesisNotMet(format!(
            "degree budget exceeded: Σ(m_ℓ+1) = {degree} > n = {n}"
        )));
    }
    let test_poly = CirclePolynomial::from_roots(ctx, &roots);
    let bound_sq = integrate_abs2(&test_poly, measure, ctx)?;
    let target_sq = (ctx.real(4.0) * &e_omega).at(prec);
    let pass = bound_sq <= target_sq;
    Ok(MetricBCertificate {
        n,
        omega,
        degree,
        bound_sq,
        target_sq,
        pass,
    })
}

/// ∫ |P|² dρ by component-wise strategies that dodge coefficient
/// cancellation: factored evaluation at atoms, Parseval for full-circle
/// constant densities, quadrature for other density pieces, exact moments
/// for Riesz components.
pub fn integrate_abs2(
    poly: &CirclePolynomial,
    measure: &Measure,
    ctx: PrecisionContext,
) -> Result<Float> {
    let prec = ctx.bits();
    let two_pi = ctx.two_pi();
    let mut acc = Float::new(prec);
    for (w, comp) in &measure.components {
        if *w == 0.0 {
            continue;
        }
        let weight = ctx.real(*w);
        match comp {
            Component::Atomic(at) => {
                for (angle, mass) in &at.atoms {
                    let v = poly.eval(&angle.unit(ctx));
                    acc += weight.clone() * ctx.real(*mass) * v.norm_sqr();
                }
            }
            Component::Density(d) => {
                for piece in &d.pieces {
                    let full_circle = piece.length.turn_f64() >= 1.0 - 1e-15;
                    if let (crate::measure::DensityFamily::Const { value }, true) =
                        (&piece.family, full_circle)
                    {
                        // Parseval: ∫|P|² dm = Σ |p_k|²
                        let mut s = Float::new(prec);
                        for c in poly.coeffs() {
                            s += c.norm_sqr();
                        }
                        acc += weight.clone() * ctx.real(*value) * s;
                    } else {
                        let fam = piece.family.clone();
                        let pl = poly.clone();
                        let f = move |theta: &Float| {
                            let d = fam.eval(theta, ctx);
                            let v = pl.eval_at_angle(theta, ctx).norm_sqr();
                            CFloat::from_real(d * v)
                        };
                        let a0 = piece.start.radians(ctx);
                        let len = piece.length.radians(ctx);
                        let panels = ((len.to_f64() * (poly.degree() as f64 + 1.0)) as usize)
                            .clamp(8, 4096);
                        let mut piece_acc = Float::new(prec);
                        for i in 0..panels {
                            let pa = (&a0
                                + (&len * Float::with_val(prec, i as f64 / panels as f64))
                                    .at(prec))
                                .at(prec);
                            let pb = (&a0
                                + (&len
                                    * Float::with_val(prec, (i + 1) as f64 / panels as f64))
                                .at(prec))
                                .at(prec);
                            let v = crate::quad::integrate(&f, &pa, &pb, &ctx.real(1e-40), ctx)?;
                            piece_acc += v.re;
                        }
                        acc += weight.clone() * piece_acc / &two_pi;
                    }
                }
            }
            Component::Riesz(r) => {
                let mom = crate::measure::riesz_moments(r, poly.degree(), ctx)?;
                let v = szego::integrate_abs2_via_moments(poly, &mom)?;
                acc += weight.clone() * v;
            }
        }
    }
    Ok(acc)
}

#[derive(Clone, Debug, Serialize)]
pub struct CapacityACertificate {
    pub n: usize,
    pub omega: f64,
    pub arc_count: usize,
    /// -log cap of the extracted arcs
    pub robin: f64,
    /// required: robin ≥ Ω/(2n)
    pub robin_bound: f64,
    #[serde(serialize_with = "ser_float")]
    pub residual: Float,
    #[serde(serialize_with = "ser_float")]
    pub residual_bound: Float,
    pub pass: bool,
    #[serde(skip)]
    pub arcs: ArcSet,
}

/// Forward capacity certificate: sublevel arcs of the extremal polynomial
/// with cap ≤ e^{-Ω/(2n)} and residual mass ≤ e^{-Ω}.
pub fn certify_capacity_a(
    measure: &Measure,
    n: usize,
    omega: f64,
    ctx: PrecisionContext,
) -> Result<CapacityACertificate> {
    if n < 2 {
        return Err(Error::HypothesisNotMet("need n >= 2".into()));
    }
    let r = szego::szego_en(measure, n, ctx)?;
    let e_bound = ctx.real(-omega).exp();
    if r.e > e_bound {
        return Err(Error::HypothesisNotMet(format!(
            "e_n = {:e} exceeds e^-Ω",
            r.e.to_f64()
        )));
    }
    let tau = ctx.real(-omega / 2.0).exp();
    let sub = poly::sublevel_arcs(&r.extremal, &tau, ctx)?;
    let arcs = sub.arcs;
    let p = arcs.count();
    let robin = robin_constant(&arcs, ctx)?;
    let robin_bound = omega / (2.0 * n as f64);
    let residual = mass_outside(measure, &arcs, ctx)?;
    let pass = p <= n && p > 0 && robin >= robin_bound && residual <= e_bound;
    Ok(CapacityACertificate {
        n,
        omega,
        arc_count: p,
        robin,
        robin_bound,
        residual,
        residual_bound: e_bound,
        pass,
        arcs,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CapacityBCertificate {
    pub n: usize,
    pub omega: f64,
    pub degree: usize,
    /// ln of the certified bound for e_{deg}²
    pub log_bound_sq: f64,
    /// -Ω/2 = ln of the target
    pub log_target_sq: f64,
    pub pass: bool,
    pub discretization: DiscretizationCertificate,
}

/// Reverse capacity certificate: builds the discretization polynomial on E
/// and certifies e_{deg P}² ≤ max_E |P|² + max_T |P|² · residual ≤
/// e^{-Ω/2}. Uses (C, C1) = (28, 80) for n ≥ 14, enlarged constants below
/// that (recorded in the certificate).
pub fn certify_capacity_b(
    arcs: &ArcSet,
    measure: &Measure,
    n: usize,
    omega: f64,
    ctx: PrecisionContext,
) -> Result<CapacityBCertificate> {
    let c1 = if n >= 14 { 80.0 } else { 240.0 };
    if omega < c1 * n as f64 {
        return Err(Error::HypothesisNotMet(format!(
            "need Ω ≥ {c1}·n = {}",
            c1 * n as f64
        )));
    }
    let robin = robin_constant(arcs, ctx)?;
    if robin < omega / n as f64 {
        return Err(Error::HypothesisNotMet(format!(
            "cap(E) = e^{{-{robin:.3}}} exceeds e^{{-Ω/n}}"
        )));
    }
    let residual = mass_outside(measure, arcs, ctx)?;
    let e_omega = ctx.real(-omega).exp();
    if residual > e_omega {
        return Err(Error::HypothesisNotMet("residual mass exceeds e^-Ω".into()));
    }
    let (p, cert) = discretization_polynomial(arcs, n, ctx)?;
    let degree = p.degree();
    // envelope from the verified certificate: log|P| ≤ -n·robin + N·3ln2 on E
    let log_max_e = -(n as f64) * robin + cert.pieces as f64 * 3.0 * std::f64::consts::LN_2;
    // |P| ≤ 2^deg everywhere on T
    let log_max_t = degree as f64 * std::f64::consts::LN_2;
    let log_residual = {
        let lr = residual.clone().ln();
        if lr.is_finite() {
            lr.to_f64()
        } else {
            f64::NEG_INFINITY
        }
    };
    let log_bound_sq = log_sum_exp(2.0 * log_max_e, 2.0 * log_max_t + log_residual);
    let log_target_sq = -omega / 2.0;
    let pass = log_bound_sq <= log_target_sq;
    Ok(CapacityBCertificate {
        n,
        omega,
        degree,
        log_bound_sq,
        log_target_sq,
        pass,
        discretization: cert,
    })
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(192)
    }

    /// classical closed form: cap of an arc of angular length ℓ is sin(ℓ/4)
    fn single_arc_oracle(len: f64) -> f64 {
        (len / 4.0).sin()
    }

    #[test]
    fn single_arc_capacity_matches_closed_form() {
        let c = ctx();
        for len in [0.1f64, 0.5, 1.0, std::f64::consts::PI] {
            let set = ArcSet::from_arcs(vec![Arc::from_f64(0.7, len, c)], c);
            let cap = capacity(&set, c).unwrap();
            let oracle = single_arc_oracle(len);
            let rel = (cap - oracle).abs() / oracle;
            assert!(rel < 1e-4, "len {len}: cap {cap} vs {oracle} (rel {rel:e})");
        }
    }

    #[test]
    fn full_circle_capacity_is_one() {
        let c = ctx();
        assert!((capacity(&ArcSet::full_circle(c), c).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn capacity_monotone_under_inclusion() {
        let c = ctx();
        let small = ArcSet::from_arcs(
            vec![Arc::from_f64(0.5, 0.4, c), Arc::from_f64(3.0, 0.3, c)],
            c,
        );
        let big = ArcSet::from_arcs(
            vec![Arc::from_f64(0.4, 0.7, c), Arc::from_f64(2.9, 0.5, c)],
            c,
        );
        assert!(capacity(&small, c).unwrap() <= capacity(&big, c).unwrap() + 1e-9);
    }

    #[test]
    fn methods_cross_check_on_two_arcs() {
        let c = ctx();
        let set = ArcSet::from_arcs(
            vec![Arc::from_f64(0.0, 0.9, c), Arc::from_f64(2.5, 1.2, c)],
            c,
        );
        let r = equilibrium_measure(&set, 1.0, EquilibriumMethod::CrossChecked, c).unwrap();
        assert!(r.capacity > 0.0 && r.capacity < 1.0);
    }

    #[test]
    fn parametric_matches_oracle_on_single_arc() {
        let c = ctx();
        let set = ArcSet::from_arcs(vec![Arc::from_f64(1.3, 1.0, c)], c);
        let r = equilibrium_parametric(&set, 1.0, c).unwrap();
        let oracle = single_arc_oracle(1.0);
        assert!(
            (r.capacity - oracle).abs() < 2e-4 * oracle,
            "cap {} vs {}",
            r.capacity,
            oracle
        );
        // beta sits at the antipode: fraction 1/2 of the single gap
        let betas = r.betas.unwrap();
        assert!((betas[0].1 - 0.5).abs() < 1e-6);
    }

    #[test]
    fn symmetric_two_arcs_give_symmetric_betas() {
        let c = ctx();
        let set = ArcSet::from_arcs(
            vec![Arc::from_f64(0.5, 1.0, c), Arc::from_f64(-1.5, 1.0, c)],
            c,
        );
        let r = equilibrium_parametric(&set, 1.0, c).unwrap();
        for (_, y) in r.betas.unwrap() {
            assert!((y - 0.5).abs() < 1e-5, "beta fraction {y}");
        }
    }

    #[test]
    fn potential_flat_on_e_higher_off_e() {
        let c = ctx();
        let set = ArcSet::from_arcs(
            vec![Arc::from_f64(1.0, 0.8, c), Arc::from_f64(4.0, 0.5, c)],
            c,
        );
        let r = equilibrium_measure(&set, 1.0, EquilibriumMethod::Energy, c).unwrap();
        assert!(
            r.flatness <= 1e-4 * r.robin.abs().max(1.0),
            "flatness {}",
            r.flatness
        );
        // off E the potential is strictly larger
        let geom = Geometry::new(&set, c);
        let mut on_mean = 0.0;
        for a in 0..2 {
            on_mean += r.potential_local(&geom, a, 0.5);
        }
        on_mean /= 2.0;
        for gap in set.gaps(c) {
            for frac in [0.3f64, 0.6] {
                let theta = (gap.start()
                    + (gap.length() * Float::with_val(c.bits(), frac)).at(c.bits()))
                .at(c.bits());
                let off = r.potential(&theta, c);
                assert!(off > on_mean + 1e-6);
            }
        }
    }

    #[test]
    fn rotation_invariance_of_capacity() {
        let c = ctx();
        let set = ArcSet::from_arcs(
            vec![Arc::from_f64(0.3, 0.6, c), Arc::from_f64(2.0, 0.4, c)],
            c,
        );
        let rot = ArcSet::from_arcs(
            vec![
                Arc::from_f64(0.3 + 1.1, 0.6, c),
                Arc::from_f64(2.0 + 1.1, 0.4, c),
            ],
            c,
        );
        let a = capacity(&set, c).unwrap();
        let b = capacity(&rot, c).unwrap();
        assert!((a - b).abs() < 1e-6 * a);
    }

    #[test]
    fn discretization_certificate_on_two_arcs() {
        let c = ctx();
        let set = ArcSet::from_arcs(
            vec![Arc::from_f64(0.2, 0.7, c), Arc::from_f64(3.1, 0.9, c)],
            c,
        );
        let (p, cert) = discretization_polynomial(&set, 14, c).unwrap();
        assert!(cert.pass);
        assert!(cert.degree <= 28 * 14);
        assert_eq!(p.degree(), cert.degree);
        assert!(cert.max_defect <= 0.0);
        assert!(cert.eq3_max_defect <= 0.0);
        assert!(cert.enlarged_constants.is_none());
    }

    #[test]
    fn tiny_arc_capacity_via_logs() {
        let c = PrecisionContext::new(320);
        let len = Float::with_val(320, -60).exp();
        let set = ArcSet::from_arcs(vec![Arc::new(c.real(1.0), len, c)], c);
        let robin = robin_constant(&set, c).unwrap();
        // oracle: -ln sin(ℓ/4) ≈ 60 + ln 4
        let oracle = 60.0 + (4.0f64).ln();
        assert!(
            (robin - oracle).abs() < 1e-3 * oracle,
            "robin {robin} vs {oracle}"
        );
    }

    #[test]
    fn mass_outside_counts_atoms_and_lebesgue() {
        let c = ctx();
        let mut rho = Measure::from_atoms(vec![
            (crate::measure::Angle::Real(0.1), 0.5),
            (crate::measure::Angle::Real(0.5), 0.5),
        ])
        .unwrap();
        rho.push(
            0.25,
            Component::Density(
                crate::measure::PiecewiseDensityComponent::constant_on(
                    crate::measure::Angle::zero(),
                    crate::measure::Angle::Turn(rug::Rational::from(1)),
                    1.0,
                )
                .unwrap(),
            ),
        );
        // arc covering the first atom (angle 0.1 turns = 0.628 rad)
        let arcs = ArcSet::from_arcs(vec![Arc::from_f64(0.6, 0.1, c)], c);
        let out = mass_outside(&rho, &arcs, c).unwrap().to_f64();
        let expected = 0.5 + 0.25 * (2.0 * std::f64::consts::PI - 0.1) / (2.0 * std::f64::consts::PI);
        assert!((out - expected).abs() < 1e-12, "{out} vs {expected}");
    }
}
