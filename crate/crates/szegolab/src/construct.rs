//! Generators for the structured measure families the experiments run on:
//! dyadic limit-invariant atomic measures, monotone-tail measures on roots
//! of unity, the spread-atom pair behind the relative-asymptotics
//! counterexample, the two-scale piecewise-constant pair, and truncated
//! Riesz products.

use crate::error::{Error, Result};
use crate::measure::{
    riesz_moments, Angle, Component, DensityFamily, DensityPiece, Measure,
    PiecewiseDensityComponent, RieszProductComponent,
};
use crate::poly::CirclePolynomial;
use crate::precision::{CFloat, PrecisionContext};
use crate::szego;
use rug::Rational;
use serde::Serialize;

/// Positive weights a_1, a_2, … summing to 1 (within 1e-12), with the tail
/// sums s_k = Σ_{j>k} a_j precomputed.
#[derive(Clone, Debug)]
pub struct TailSequence {
    values: Vec<f64>,
    tails: Vec<f64>,
}

impl TailSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| *v <= 0.0 || !v.is_finite()) {
            return Err(Error::Precondition(
                "tail sequence needs strictly positive entries".into(),
            ));
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition(format!(
                "tail sequence must sum to 1, got {sum}"
            )));
        }
        // s_k = Σ_{j>k} a_j, summed backwards
        let mut tails = vec![0.0f64; values.len() + 1];
        for j in (0..values.len()).rev() {
            tails[j] = tails[j + 1] + values[j];
        }
        Ok(TailSequence { values, tails })
    }

    /// a_j = 2^{-j}, truncated; the missing tail 2^{-len} stays below the
    /// sum tolerance for len ≥ 40.
    pub fn geometric(len: usize) -> Result<Self> {
        Self::new((1..=len).map(|j| 2f64.powi(-(j as i32))).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// a_j, 1-based; zero beyond the stored range.
    pub fn value(&self, j: usize) -> f64 {
        if j >= 1 && j <= self.values.len() {
            self.values[j - 1]
        } else {
            0.0
        }
    }

    /// s_k = Σ_{j>k} a_j over the stored range.
    pub fn tail(&self, k: usize) -> f64 {
        if k >= self.values.len() {
            0.0
        } else {
            self.tails[k]
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }
}

/// ρ = Σ_{k=1..K} a_k ρ_k with ρ_k the uniform probability measure on the
/// primitive 2^{k+1}-th roots of unity (2^k atoms of mass 2^{-k} each);
/// each ρ_k is 2^{-k}-invariant.
pub fn dyadic_root_measure(a: &TailSequence, levels: usize) -> Result<Measure> {
    if levels == 0 || levels > 16 {
        return Err(Error::Precondition(
            "dyadic levels must lie in 1..=16 (atom count grows as 2^{K+1})".into(),
        ));
    }
    let mut atoms = Vec::new();
    for k in 1..=levels {
        let den = 1u64 << (k + 1);
        let mass = a.value(k) / (1u64 << k) as f64;
        if mass == 0.0 {
            continue;
        }
        for j in (1..den).step_by(2) {
            atoms.push((Angle::turn(j as i64, den), mass));
        }
    }
    Measure::from_atoms(atoms)
}

/// The worst-case discrete measure for a monotone weight sequence: mass
/// Σ_j a_{k+j(n+1)} at the k-th (n+1)-th root of unity. Realizes
/// e_n² ≥ (n+1) Σ_{j≥1} a_{j(n+1)}.
pub fn monotone_tail_measure(a: &TailSequence, n: usize) -> Result<Measure> {
    if !a.is_monotone() {
        return Err(Error::Precondition(
            "monotone-tail construction needs a non-increasing sequence".into(),
        ));
    }
    let q = n + 1;
    let mut atoms = Vec::with_capacity(q);
    for k in 1..=q {
        let mut mass = 0.0;
        let mut j = k;
        while j <= a.len() {
            mass += a.value(j);
            j += q;
        }
        if mass > 0.0 {
            atoms.push((Angle::turn(k as i64, q as u64), mass));
        }
    }
    Measure::from_atoms(atoms)
}

/// (n+1) Σ_{j≥1} a_{j(n+1)}: the guaranteed lower bound for e_n² of the
/// monotone-tail measure.
pub fn monotone_tail_lower_bound(a: &TailSequence, n: usize) -> f64 {
    let q = n + 1;
    let mut s = 0.0;
    let mut j = q;
    while j <= a.len() {
        s += a.value(j);
        j += q;
    }
    q as f64 * s
}

// --- spread-atom pair ---------------------------------------------------------

#[derive(Clone, Debug)]
pub struct AntiNevaiSpec {
    /// number of spread levels K
    pub levels: usize,
    /// level weights a_k (first `levels` entries used)
    pub weights: TailSequence,
    /// integrability exponents to verify
    pub p_checks: Vec<u32>,
}

impl AntiNevaiSpec {
    pub fn default_with_levels(levels: usize) -> Result<Self> {
        Ok(AntiNevaiSpec {
            levels,
            weights: TailSequence::geometric(48)?,
            p_checks: vec![1, 2, 4],
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegrabilityCheck {
    pub p: u32,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainCheck {
    pub n: usize,
    pub degree: usize,
    pub e_sq: f64,
    pub tail: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AntiNevaiDiagnostics {
    pub eta: Vec<f64>,
    pub h_caps: Vec<f64>,
    pub sets_disjoint: bool,
    /// ∫_E H₊^p dm ≤ Σ_k A_k^p 2^k η_k
    pub h_integrability: Vec<IntegrabilityCheck>,
    /// ∫ log₊^p(Σ …) dm ≤ Σ_r 2^r η_r ln^p(1/η_r)
    pub log_integrability: Vec<IntegrabilityCheck>,
    /// e_{2^n}(μ₀+ρ̃)² ≥ Σ_{k>n} a_k
    pub chain: Vec<ChainCheck>,
}

#[derive(Clone, Debug)]
pub struct AntiNevaiPair {
    /// μ₀ = e^{-H₊} m with H(θ) = 1/|θ|
    pub mu0: Measure,
    /// ρ̃ = Σ a_k ρ̃_k, each ρ̃_k a 2^{-k}-invariant probability measure
    pub spread: Measure,
    /// μ₀ + ρ̃ = w₀ μ₀; the lower-bound chain runs on this measure
    pub combined: Measure,
    /// E_k intervals (turn bounds) with the weight coefficient a_k/(2^k η_k)
    pub weight_intervals: Vec<(f64, f64, f64)>,
    pub diagnostics: AntiNevaiDiagnostics,
}

impl AntiNevaiPair {
    /// w₀(θ) = 1 + e^{H₊(θ)} Σ_k coef_k 1l_{E_k}(θ); θ in radians.
    pub fn weight_at(&self, theta: f64) -> f64 {
        let turn = (theta / (2.0 * std::f64::consts::PI)).rem_euclid(1.0);
        let mut s = 0.0;
        for (lo, hi, coef) in &self.weight_intervals {
            if turn >= *lo && turn <= *hi {
                s += coef;
            }
        }
        if s == 0.0 {
            return 1.0;
        }
        let dist = turn.min(1.0 - turn) * 2.0 * std::f64::consts::PI;
        1.0 + (1.0 / dist).exp() * s
    }
}

/// Builds the spread pair: each dyadic level's atoms smeared onto tiny
/// intervals E_k (keeping the 2^{-k}-invariance). Placement offset
/// x_k = 2^{-(k+4)} keeps X_k at turn distance ≥ 2^{-(k+2)} from every
/// primitive node, so H₊ = 1/|θ| stays below A_k = 2^k on the rotated
/// copies; widths η_k = 2^{-(k²+2k+5)} make every integrability sum finite
/// with room. Exact dyadic turn arithmetic throughout.
pub fn anti_nevai_pair(spec: &AntiNevaiSpec, ctx: PrecisionContext) -> Result<AntiNevaiPair> {
    let levels = spec.levels;
    if levels == 0 || levels > 10 {
        return Err(Error::Precondition("spread levels must lie in 1..=10".into()));
    }
    struct LevelSet {
        k: usize,
        coef: f64,
        intervals: Vec<(Rational, Rational)>,
    }
    let mut level_sets: Vec<LevelSet> = Vec::with_capacity(levels);
    let mut eta = Vec::with_capacity(levels);
    let mut caps = Vec::with_capacity(levels);
    for k in 1..=levels {
        let e_exp = (k * k + 2 * k + 5) as u32;
        let eta_k = Rational::from(Rational::from(1) >> e_exp);
        let x_k = Rational::from(Rational::from(1) >> (k as u32 + 4));
        let den = 1u64 << (k + 1);
        let mut intervals = Vec::with_capacity(1 << k);
        for j in (1..den).step_by(2) {
            let start = Rational::from((j, den)) + &x_k;
            intervals.push((Rational::from(start), eta_k.clone()));
        }
        let coef = spec.weights.value(k) / ((1u64 << k) as f64 * eta_k.to_f64());
        level_sets.push(LevelSet { k, coef, intervals });
        eta.push(eta_k.to_f64());
        caps.push((1u64 << k) as f64);
    }

    // disjointness of all intervals, exact rational comparison
    let mut all: Vec<(Rational, Rational)> = level_sets
        .iter()
        .flat_map(|l| l.intervals.iter().cloned())
        .collect();
    all.sort_by(|a, b| a.0.cmp(&b.0));
    let mut sets_disjoint = true;
    for w in all.windows(2) {
        if Rational::from(&w[0].0 + &w[0].1) > w[1].0 {
            sets_disjoint = false;
        }
    }

    let mu0_density = PiecewiseDensityComponent::new(vec![DensityPiece {
        start: Angle::zero(),
        length: Angle::Turn(Rational::from(1)),
        family: DensityFamily::ExpNegInvDist {
            center: 0.0,
            scale: 1.0,
            ceiling: f64::INFINITY,
        },
    }])?;
    let mu0 = Measure {
        components: vec![(1.0, Component::Density(mu0_density))],
    };
    let mut spread_components = Vec::with_capacity(levels);
    for l in &level_sets {
        let value = 1.0 / ((1u64 << l.k) as f64 * eta[l.k - 1]);
        let pieces: Vec<DensityPiece> = l
            .intervals
            .iter()
            .map(|(s, len)| DensityPiece {
                start: Angle::Turn(s.clone()),
                length: Angle::Turn(len.clone()),
                family: DensityFamily::Const { value },
            })
            .collect();
        spread_components.push((
            spec.weights.value(l.k),
            Component::Density(PiecewiseDensityComponent::new(pieces)?),
        ));
    }
    let spread = Measure {
        components: spread_components.clone(),
    };
    let mut combined_components = mu0.components.clone();
    combined_components.extend(spread_components);
    let combined = Measure {
        components: combined_components,
    };

    // ∫ H₊^p over a turn interval in closed form: H₊ = 1/(2πd), d = circular
    // distance in turns times 2π; dm = dt in turns
    let h_int = |s: f64, e: f64, p: u32| -> f64 {
        let d = |t: f64| t.min(1.0 - t);
        let (lo, hi) = (d(s).min(d(e)), d(s).max(d(e)));
        let tp = (2.0 * std::f64::consts::PI).powi(p as i32);
        if p == 1 {
            (hi / lo).ln() / tp
        } else {
            let q = 1.0 - p as f64;
            (hi.powf(q) - lo.powf(q)) / q / tp
        }
    };
    let mut h_integrability = Vec::new();
    for &p in &spec.p_checks {
        let mut lhs = 0.0;
        for l in &level_sets {
            for (s, len) in &l.intervals {
                let sf = s.to_f64();
                lhs += h_int(sf, sf + len.to_f64(), p);
            }
        }
        let rhs: f64 = (1..=levels)
            .map(|k| caps[k - 1].powi(p as i32) * (1u64 << k) as f64 * eta[k - 1])
            .sum();
        h_integrability.push(IntegrabilityCheck {
            p,
            lhs,
            rhs,
            pass: lhs <= rhs,
        });
    }
    // the sets are disjoint, so Σ coef·1l is constant per interval
    let mut log_integrability = Vec::new();
    for &p in &spec.p_checks {
        let mut lhs = 0.0;
        for l in &level_sets {
            let v = l.coef.ln().max(0.0).powi(p as i32);
            lhs += v * (1u64 << l.k) as f64 * eta[l.k - 1];
        }
        let rhs: f64 = (1..=levels)
            .map(|r| (1u64 << r) as f64 * eta[r - 1] * (1.0 / eta[r - 1]).ln().powi(p as i32))
            .sum();
        log_integrability.push(IntegrabilityCheck {
            p,
            lhs,
            rhs,
            pass: lhs <= rhs,
        });
    }

    // lower-bound chain e_{2^n}(μ₀+ρ̃)² ≥ Σ_{k>n} a_k for n < K
    let mut chain = Vec::new();
    for n in 1..levels {
        let degree = 1usize << n;
        let r = szego::szego_en(&combined, degree, ctx)?;
        let e_sq = r.e.clone().square().to_f64();
        let tail: f64 = ((n + 1)..=levels).map(|k| spec.weights.value(k)).sum();
        chain.push(ChainCheck {
            n,
            degree,
            e_sq,
            tail,
            pass: e_sq >= tail,
        });
    }

    let weight_intervals: Vec<(f64, f64, f64)> = level_sets
        .iter()
        .flat_map(|l| {
            l.intervals.iter().map(|(s, len)| {
                let sf = s.to_f64();
                (sf, sf + len.to_f64(), l.coef)
            })
        })
        .collect();
    Ok(AntiNevaiPair {
        mu0,
        spread,
        combined,
        weight_intervals,
        diagnostics: AntiNevaiDiagnostics {
            eta,
            h_caps: caps,
            sets_disjoint,
            h_integrability,
            log_integrability,
            chain,
        },
    })
}

// --- two-scale piecewise-constant pair ------------------------------------------

/// Scale schedule and step parameters. The literal doubly-exponential
/// schedule is numerically meaningless past the second level and is
/// rejected; scaled schedules (default N_{k+1} = 4 N_k) exercise the same
/// finite-level mechanisms.
#[derive(Clone, Debug)]
pub struct ProNSpec {
    pub schedule: Vec<u64>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// small constant added to μ' so it stays strictly positive at finite
    /// truncation depth
    pub floor: f64,
}

impl Default for ProNSpec {
    fn default() -> Self {
        ProNSpec {
            schedule: vec![4, 16, 64],
            alphas: vec![0.375, 0.25, 0.1875],
            betas: vec![1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0],
            floor: 1.0 / 1024.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceCheck {
    pub level: usize,
    pub scale: u64,
    pub degree: usize,
    pub e_sq: f64,
    pub alpha_sq: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProNDiagnostics {
    pub mu_min: f64,
    pub mu_max: f64,
    pub w_min: f64,
    pub w_max: f64,
    /// ∫ ln(1/w) dm two ways: closed form Σ α_k ln(α_k/β_k) vs the exact
    /// piecewise sum over the refinement
    pub log_w_closed: f64,
    pub log_w_piecewise: f64,
    pub log_w_agree: bool,
    /// e_s(μ)² ≥ α_k², checked at s = N_k - 1
    pub invariance: Vec<InvarianceCheck>,
    /// e_n(wμ)/e_n(μ) for n = 1..N_max-1; reported, nothing asserted
    pub ratio_profile: Vec<(usize, f64)>,
}

#[derive(Clone, Debug)]
pub struct ProNPair {
    pub mu: Measure,
    pub weighted: Measure,
    /// refinement pieces (turn_lo, turn_hi, μ', w)
    pub pieces: Vec<(f64, f64, f64, f64)>,
    pub diagnostics: ProNDiagnostics,
}

/// μ' = floor + Σ_k h_{α_k,β_k}(frac(N_k θ)), w = Π over active plateaus of
/// β_k/α_k; both piecewise constant on the common refinement.
pub fn pron_pair(spec: &ProNSpec, ctx: PrecisionContext) -> Result<ProNPair> {
    let kx = spec.schedule.len();
    if kx == 0 || kx != spec.alphas.len() || kx != spec.betas.len() {
        return Err(Error::Precondition(
            "schedule, alphas and betas must have equal nonzero lengths".into(),
        ));
    }
    for i in 0..kx {
        if !(spec.betas[i] > 0.0 && spec.betas[i] < spec.alphas[i] && spec.alphas[i] < 0.5) {
            return Err(Error::Precondition(format!(
                "need 0 < β < α < 1/2 at level {i}"
            )));
        }
        if i + 1 < kx && spec.schedule[i + 1] <= spec.schedule[i] {
            return Err(Error::Precondition("schedule must increase".into()));
        }
    }
    if *spec.schedule.last().unwrap() > 1_000_000 {
        return Err(Error::Precondition(
            "schedule too steep to be numerically meaningful; use a scaled schedule".into(),
        ));
    }
    if spec.alphas.iter().sum::<f64>() + spec.floor >= 1.0 {
        return Err(Error::Precondition("Σ α_k + floor must stay below 1".into()));
    }
    if spec.floor <= 0.0 {
        return Err(Error::Precondition("floor must be positive".into()));
    }
    // refinement breakpoints in turns
    let mut breaks: Vec<f64> = vec![0.0, 1.0];
    for (i, nk) in spec.schedule.iter().enumerate() {
        let nk_f = *nk as f64;
        for j in 0..*nk {
            let base = j as f64 / nk_f;
            breaks.push(base);
            breaks.push(base + spec.alphas[i] / nk_f);
            breaks.push(base + 0.5 / nk_f);
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let step = |i: usize, turn: f64| -> (f64, bool) {
        let f = (turn * spec.schedule[i] as f64).fract();
        if f <= spec.alphas[i] {
            (spec.alphas[i], true)
        } else if f <= 0.5 {
            (spec.betas[i], false)
        } else {
            (0.0, false)
        }
    };
    let mut pieces = Vec::with_capacity(breaks.len());
    let (mut mu_min, mut mu_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut w_min, mut w_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut log_w_piecewise = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo < 1e-16 {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let mut mu = spec.floor;
        let mut weight = 1.0;
        for i in 0..kx {
            let (h, active) = step(i, mid);
            mu += h;
            if active {
                weight *= spec.betas[i] / spec.alphas[i];
            }
        }
        mu_min = mu_min.min(mu);
        mu_max = mu_max.max(mu);
        w_min = w_min.min(weight);
        w_max = w_max.max(weight);
        log_w_piecewise += (1.0 / weight).ln() * (hi - lo);
        pieces.push((lo, hi, mu, weight));
    }
    let log_w_closed: f64 = (0..kx)
        .map(|i| spec.alphas[i] * (spec.alphas[i] / spec.betas[i]).ln())
        .sum();
    let log_w_agree = (log_w_piecewise - log_w_closed).abs() <= 1e-10 * log_w_closed.max(1.0);

    let build = |select: &dyn Fn(&(f64, f64, f64, f64)) -> f64| -> Result<Measure> {
        let dps: Vec<DensityPiece> = pieces
            .iter()
            .map(|p| DensityPiece {
                start: Angle::Real(p.0),
                length: Angle::Real(p.1 - p.0),
                family: DensityFamily::Const { value: select(p) },
            })
            .collect();
        Ok(Measure {
            components: vec![(
                1.0,
                Component::Density(PiecewiseDensityComponent::new(dps)?),
            )],
        })
    };
    let mu = build(&|p| p.2)?;
    let weighted = build(&|p| p.2 * p.3)?;

    let n_max = (*spec.schedule.last().unwrap() as usize - 1).max(1);
    let profile_mu = szego::en_profile(&mu, n_max, ctx)?;
    let profile_w = szego::en_profile(&weighted, n_max, ctx)?;
    let mut invariance = Vec::new();
    for (i, nk) in spec.schedule.iter().enumerate() {
        let s = (*nk as usize - 1).min(n_max);
        let e_sq = profile_mu[s].e.clone().square().to_f64();
        let alpha_sq = spec.alphas[i] * spec.alphas[i];
        invariance.push(InvarianceCheck {
            level: i,
            scale: *nk,
            degree: s,
            e_sq,
            alpha_sq,
            pass: e_sq >= alpha_sq * (1.0 - 1e-12),
        });
    }
    let ratio_profile: Vec<(usize, f64)> = (1..=n_max)
        .map(|n| (n, profile_w[n].e.to_f64() / profile_mu[n].e.to_f64()))
        .collect();
    Ok(ProNPair {
        mu,
        weighted,
        pieces,
        diagnostics: ProNDiagnostics {
            mu_min,
            mu_max,
            w_min,
            w_max,
            log_w_closed,
            log_w_piecewise,
            log_w_agree,
            invariance,
            ratio_profile,
        },
    })
}

// --- concentrated instances for the decay certificates ---------------------------

/// Measure with p atoms at the p-th roots of unity carrying all but e^{-Ω}
/// of the mass, plus e^{-Ω} times the normalized Lebesgue measure, together
/// with the p covering arcs of length e^{-2Ω} centered at the atoms. The
/// symmetric placement keeps the L²(m) norm of Π(z - z_ℓ) at 2, which is
/// what makes the reverse metric certificate tight.
pub fn concentrated_arc_instance(
    p: usize,
    omega: f64,
    ctx: PrecisionContext,
) -> Result<(Measure, crate::arcs::ArcSet)> {
    if p == 0 || p > 8 {
        return Err(Error::Precondition("atom count must lie in 1..=8".into()));
    }
    let residual = (-omega).exp();
    if residual <= 0.0 {
        return Err(Error::Precondition(
            "Ω too large for an f64 residual weight".into(),
        ));
    }
    // keep the rounded weight strictly below the exact e^{-Ω} so the
    // instance satisfies its residual hypothesis at any working precision
    let residual = f64::from_bits(residual.to_bits() - 2);
    let atom_mass = (1.0 - residual) / p as f64;
    let atoms: Vec<(Angle, f64)> = (0..p)
        .map(|j| (Angle::turn(j as i64, p as u64), atom_mass))
        .collect();
    let mut measure = Measure::from_atoms(atoms)?;
    measure.push(
        residual,
        Component::Density(PiecewiseDensityComponent::constant_on(
            Angle::zero(),
            Angle::Turn(Rational::from(1)),
            1.0,
        )?),
    );
    let len = ctx.real(-2.0 * omega).exp();
    let arcs: Vec<crate::arcs::Arc> = (0..p)
        .map(|j| {
            let center = Angle::turn(j as i64, p as u64).radians(ctx);
            crate::arcs::Arc::centered(&center, len.clone(), ctx)
        })
        .collect();
    Ok((measure, crate::arcs::ArcSet::from_arcs(arcs, ctx)))
}

/// Dyadic measure with super-exponentially decaying level weights
/// a_k ∝ e^{-4^k}: e_{2^n}² is squeezed between tail sums that decay like
/// e^{-4^{n+1}}, the equivalence harness family.
pub fn superexp_dyadic_family(levels: usize) -> Result<Measure> {
    if levels == 0 || levels > 4 {
        return Err(Error::Precondition(
            "superexp family supports 1..=4 levels (f64 weight range)".into(),
        ));
    }
    let raw: Vec<f64> = (1..=levels).map(|k| (-(4f64.powi(k as i32))).exp()).collect();
    let z: f64 = raw.iter().sum();
    let a = TailSequence::new(raw.iter().map(|v| v / z).collect())?;
    dyadic_root_measure(&a, levels)
}

// --- Riesz products ----------------------------------------------------------------

/// Whether Σ α_j² diverges for the described infinite extension; the
/// truncation itself cannot decide this.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TailClass {
    SquareSummable,
    NotSquareSummable,
}

/// Truncated Riesz product measure with the singular / absolutely
/// continuous classification implied by the supplied tail description.
pub fn riesz_measure(
    alphas: Vec<f64>,
    ells: Vec<u64>,
    tail: TailClass,
) -> Result<(Measure, bool)> {
    let comp = RieszProductComponent::new(alphas, ells)?;
    let singular = tail == TailClass::NotSquareSummable;
    Ok((
        Measure {
            components: vec![(1.0, Component::Riesz(comp))],
        },
        singular,
    ))
}

/// Two-sided bounds for e_{N_n}(ρ)² of a truncated Riesz product:
/// Π ½(1+√(1-α²)) ≤ e² ≤ Π (1-α²/4).
pub fn riesz_en_bounds(alphas: &[f64]) -> (f64, f64) {
    let mut lower = 1.0;
    let mut upper = 1.0;
    for a in alphas {
        lower *= 0.5 * (1.0 + (1.0 - a * a).max(0.0).sqrt());
        upper *= 1.0 - a * a / 4.0;
    }
    (lower, upper)
}

/// Σ ln(½(1+√(1-α²))): closed form of the logarithmic integral of the
/// truncated density (the lower-bound route; at |α| = 1 the factor value
/// ln(1/2) is used directly, the integrand being log-singular).
pub fn riesz_log_integral_closed(alphas: &[f64]) -> f64 {
    alphas
        .iter()
        .map(|a| (0.5 * (1.0 + (1.0 - a * a).max(0.0).sqrt())).ln())
        .sum()
}

/// Monic test polynomial Π_j (z^{ℓ_j} - α_j/2) of degree N_n = Σ ℓ_j.
pub fn riesz_test_polynomial(
    alphas: &[f64],
    ells: &[u64],
    ctx: PrecisionContext,
) -> CirclePolynomial {
    let prec = ctx.bits();
    let mut poly = CirclePolynomial::one(prec);
    for (a, l) in alphas.iter().zip(ells.iter()) {
        let mut coeffs = vec![CFloat::zero(prec); *l as usize + 1];
        coeffs[0] = ctx.complex(-a / 2.0, 0.0);
        coeffs[*l as usize] = CFloat::one(prec);
        let factor = CirclePolynomial::monic_from_coeffs(coeffs);
        poly = poly.mul(&factor);
    }
    poly
}

/// ∫ |Π (z^{ℓ_j} - α_j/2)|² dρ_n through the exact moments; lacunarity
/// collapses it to Π (1 - α_j²/4).
pub fn riesz_test_polynomial_identity(
    alphas: &[f64],
    ells: &[u64],
    ctx: PrecisionContext,
) -> Result<(rug::Float, f64)> {
    let comp = RieszProductComponent::new(alphas.to_vec(), ells.to_vec())?;
    let poly = riesz_test_polynomial(alphas, ells, ctx);
    let mom = riesz_moments(&comp, poly.degree(), ctx)?;
    let value = szego::integrate_abs2_via_moments(&poly, &mom)?;
    let expected = alphas.iter().map(|a| 1.0 - a * a / 4.0).product();
    Ok((value, expected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::invariance_order;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(256)
    }

    #[test]
    fn dyadic_level_one_is_plus_minus_i() {
        let a = TailSequence::geometric(48).unwrap();
        let rho = dyadic_root_measure(&a, 1).unwrap();
        let atoms = rho.atoms();
        assert_eq!(atoms.len(), 2);
        for (angle, mass) in atoms {
            assert!((mass - a.value(1) / 2.0).abs() < 1e-18);
            let t = angle.turn_f64();
            assert!((t - 0.25).abs() < 1e-15 || (t - 0.75).abs() < 1e-15);
        }
    }

    #[test]
    fn dyadic_levels_are_invariant() {
        let c = ctx();
        for k in [1usize, 2, 3] {
            let den = 1u64 << (k + 1);
            let atoms: Vec<(Angle, f64)> = (1..den)
                .step_by(2)
                .map(|j| (Angle::turn(j as i64, den), 1.0 / (1u64 << k) as f64))
                .collect();
            let level = Measure::from_atoms(atoms).unwrap();
            assert!(invariance_order(&level, 1 << k, (1 << (k + 1)) - 1, 1e-40, c).unwrap());
        }
    }

    #[test]
    fn dyadic_sandwich_small_case() {
        let c = ctx();
        let a = TailSequence::geometric(48).unwrap();
        let rho = dyadic_root_measure(&a, 8).unwrap();
        for n in 1..=3usize {
            let r = szego::szego_en(&rho, 1 << n, c).unwrap();
            let e_sq = r.e.clone().square().to_f64();
            let lower: f64 = ((n + 1)..=8).map(|k| a.value(k)).sum();
            let upper: f64 = 4.0 * (n..=8).map(|k| a.value(k)).sum::<f64>();
            assert!(
                lower <= e_sq && e_sq <= upper,
                "n = {n}: {lower} ≤ {e_sq} ≤ {upper}"
            );
        }
    }

    #[test]
    fn monotone_tail_bound_holds() {
        let c = ctx();
        let a = TailSequence::geometric(60).unwrap();
        for n in [1usize, 2, 4] {
            let rho = monotone_tail_measure(&a, n).unwrap();
            let r = szego::szego_en(&rho, n, c).unwrap();
            let e_sq = r.e.clone().square().to_f64();
            let bound = monotone_tail_lower_bound(&a, n);
            assert!(e_sq >= bound, "n = {n}: {e_sq} < {bound}");
            assert!(e_sq >= (n as f64 + 1.0) * a.value(n + 1));
        }
    }

    #[test]
    fn monotone_tail_trivial_degree_zero() {
        let a = TailSequence::geometric(48).unwrap();
        let rho = monotone_tail_measure(&a, 0).unwrap();
        let atoms = rho.atoms();
        assert_eq!(atoms.len(), 1);
        assert!((atoms[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_tail_rejects_increasing() {
        let a = TailSequence::new(vec![0.2, 0.8]).unwrap();
        assert!(monotone_tail_measure(&a, 1).is_err());
    }

    #[test]
    fn anti_nevai_diagnostics_pass() {
        let c = ctx();
        let spec = AntiNevaiSpec::default_with_levels(4).unwrap();
        let pair = anti_nevai_pair(&spec, c).unwrap();
        let d = &pair.diagnostics;
        assert!(d.sets_disjoint);
        for chk in d.h_integrability.iter().chain(d.log_integrability.iter()) {
            assert!(chk.pass, "p = {}: {} vs {}", chk.p, chk.lhs, chk.rhs);
            assert!(chk.rhs.is_finite());
        }
        for chk in &d.chain {
            assert!(chk.pass, "chain n = {}: {} < {}", chk.n, chk.e_sq, chk.tail);
        }
        assert!(pair.weight_at(1.0) >= 1.0);
        let (lo, hi, _) = pair.weight_intervals[0];
        let mid = 0.5 * (lo + hi) * 2.0 * std::f64::consts::PI;
        assert!(pair.weight_at(mid) > 1.0);
    }

    #[test]
    fn pron_mechanisms() {
        let c = ctx();
        let pair = pron_pair(&ProNSpec::default(), c).unwrap();
        let d = &pair.diagnostics;
        assert!(d.mu_min > 0.0 && d.mu_max < 1.0, "{} .. {}", d.mu_min, d.mu_max);
        assert!(d.w_min > 0.0 && d.w_max <= 1.0);
        assert!(d.log_w_agree, "{} vs {}", d.log_w_closed, d.log_w_piecewise);
        for chk in &d.invariance {
            assert!(chk.pass, "level {}: {} < {}", chk.level, chk.e_sq, chk.alpha_sq);
        }
        assert_eq!(d.ratio_profile.len(), 63);
        for (_, ratio) in &d.ratio_profile {
            assert!(ratio.is_finite() && *ratio > 0.0 && *ratio <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn pron_rejects_literal_schedule() {
        let spec = ProNSpec {
            schedule: vec![65536, 4294967296],
            alphas: vec![0.375, 0.25],
            betas: vec![0.01, 0.005],
            floor: 1.0 / 1024.0,
        };
        assert!(pron_pair(&spec, ctx()).is_err());
    }

    #[test]
    fn riesz_sandwich_small() {
        let c = ctx();
        let alphas = vec![1.0, 1.0, 1.0];
        let ells = vec![1u64, 3, 9];
        let (rho, singular) =
            riesz_measure(alphas.clone(), ells.clone(), TailClass::NotSquareSummable).unwrap();
        assert!(singular);
        let nn: u64 = ells.iter().sum();
        let r = szego::szego_en(&rho, nn as usize, c).unwrap();
        let e_sq = r.e.clone().square().to_f64();
        let (lower, upper) = riesz_en_bounds(&alphas);
        assert!(lower <= e_sq && e_sq <= upper, "{lower} ≤ {e_sq} ≤ {upper}");
    }

    #[test]
    fn riesz_test_polynomial_identity_exact() {
        let c = ctx();
        let alphas = vec![0.5, 0.5, 0.5];
        let ells = vec![1u64, 3, 9];
        let (value, expected) = riesz_test_polynomial_identity(&alphas, &ells, c).unwrap();
        assert!((value.to_f64() - expected).abs() < 1e-60);
    }

    #[test]
    fn riesz_log_integral_matches_quadrature() {
        let c = ctx();
        let alphas = vec![0.6, 0.4];
        let ells = vec![1u64, 5];
        let closed = riesz_log_integral_closed(&alphas);
        let comp = RieszProductComponent::new(alphas, ells).unwrap();
        let f = move |theta: &rug::Float| comp.density_at(theta, c).ln();
        let v =
            crate::quad::integrate_oscillatory(&f, &c.zero(), &c.two_pi(), 0, &c.real(1e-30), c)
                .unwrap();
        let quad = (v.re / c.two_pi()).to_f64();
        assert!((closed - quad).abs() < 1e-10, "{closed} vs {quad}");
    }
}
