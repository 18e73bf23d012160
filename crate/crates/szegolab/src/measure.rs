//! Measures on the unit circle and their trigonometric moments.
//!
//! A measure is a weighted mixture of three component kinds: atoms,
//! piecewise densities against normalized arc length, and truncated Riesz
//! products. Moments follow the convention
//!
//! ```text
//! c_m = ∫_T e^{-imθ} dρ(θ),
//! ```
//!
//! so the Gram matrix of {1, t, …, t^n} in L²(ρ) is the Hermitian Toeplitz
//! matrix (c_{k-j}). Angles are kept as exact fractions of 2π wherever a
//! construction provides them (roots of unity); root-of-unity cancellations
//! then survive to working precision.

use crate::error::{Error, Result};
use crate::precision::{CFloat, CompleteAt, PrecisionContext};
use crate::quad;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};

/// An angle stored as a fraction of a full turn: exact rational when the
/// construction provides one, floating otherwise. Normalized to [0, 1).
#[derive(Clone, Debug, PartialEq)]
pub enum Angle {
    Turn(Rational),
    Real(f64),
}

impl Angle {
    pub fn turn(num: i64, den: u64) -> Self {
        Angle::Turn(Rational::from((num, den as i64))).normalized()
    }

    pub fn from_f64_turn(t: f64) -> Self {
        Angle::Real(t.rem_euclid(1.0))
    }

    pub fn from_radians(theta: f64) -> Self {
        Angle::Real((theta / (2.0 * std::f64::consts::PI)).rem_euclid(1.0))
    }

    pub fn zero() -> Self {
        Angle::Turn(Rational::new())
    }

    fn normalized(self) -> Self {
        match self {
            Angle::Turn(mut r) => {
                let f = r.clone().floor();
                r -= f;
                Angle::Turn(r)
            }
            Angle::Real(t) => Angle::Real(t.rem_euclid(1.0)),
        }
    }

    pub fn turn_f64(&self) -> f64 {
        match self {
            Angle::Turn(r) => r.to_f64(),
            Angle::Real(t) => *t,
        }
    }

    pub fn radians(&self, ctx: PrecisionContext) -> Float {
        let prec = ctx.bits();
        match self {
            Angle::Turn(r) => ctx.from_rational(r) * ctx.two_pi(),
            Angle::Real(t) => (Float::with_val(prec, *t) * ctx.two_pi()).at(prec),
        }
    }

    /// e^{iθ} for this angle.
    pub fn unit(&self, ctx: PrecisionContext) -> CFloat {
        match self {
            Angle::Turn(r) => ctx.cis_turn(r),
            Angle::Real(_) => ctx.cis(&self.radians(ctx)),
        }
    }

    /// Adds another angle (rotation); exact when both are rational turns.
    pub fn plus(&self, other: &Angle) -> Angle {
        match (self, other) {
            (Angle::Turn(a), Angle::Turn(b)) => {
                Angle::Turn(rug::Rational::from(a + b)).normalized()
            }
            _ => Angle::Real(self.turn_f64() + other.turn_f64()).normalized(),
        }
    }
}

/// Point masses: (angle, mass), masses strictly positive, angles pairwise
/// distinct after normalization.
#[derive(Clone, Debug)]
pub struct AtomicComponent {
    pub atoms: Vec<(Angle, f64)>,
}

impl AtomicComponent {
    pub fn new(atoms: Vec<(Angle, f64)>) -> Result<Self> {
        if atoms.iter().any(|(_, m)| *m <= 0.0 || !m.is_finite()) {
            return Err(Error::InvalidMeasure(
                "atomic masses must be strictly positive".into(),
            ));
        }
        let mut sorted: Vec<&Angle> = atoms.iter().map(|(a, _)| a).collect();
        sorted.sort_by(|a, b| a.turn_f64().partial_cmp(&b.turn_f64()).unwrap());
        for w in sorted.windows(2) {
            let same = match (w[0], w[1]) {
                (Angle::Turn(a), Angle::Turn(b)) => a == b,
                _ => w[0].turn_f64() == w[1].turn_f64(),
            };
            if same {
                return Err(Error::InvalidMeasure(
                    "atom angles must be pairwise distinct".into(),
                ));
            }
        }
        Ok(AtomicComponent { atoms })
    }

    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|(_, m)| m).sum()
    }

    fn moments(&self, order: usize, ctx: PrecisionContext) -> Vec<CFloat> {
        let prec = ctx.bits();
        let mut c = vec![CFloat::zero(prec); order + 1];
        for (angle, mass) in &self.atoms {
            let mass = ctx.real(*mass);
            let u = angle.unit(ctx).conj(); // e^{-iθ}
            let mut pw = CFloat::one(prec);
            for cm in c.iter_mut() {
                cm.add_assign(&pw.mul_real(&mass));
                pw = pw.mul(&u);
            }
        }
        c
    }
}

/// Density families available for piecewise pieces. Densities are taken
/// against normalized arc length m = dθ/2π.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DensityFamily {
    Const { value: f64 },
    /// exp(-min(scale / d(θ, center), ceiling)), d = circular distance in
    /// radians. Models densities e^{-H} with an inverse-distance spike.
    ExpNegInvDist {
        center: f64,
        scale: f64,
        #[serde(default = "default_ceiling")]
        ceiling: f64,
    },
}

fn default_ceiling() -> f64 {
    f64::INFINITY
}

impl DensityFamily {
    pub(crate) fn eval(&self, theta: &Float, ctx: PrecisionContext) -> Float {
        let prec = ctx.bits();
        match self {
            DensityFamily::Const { value } => ctx.real(*value),
            DensityFamily::ExpNegInvDist {
                center,
                scale,
                ceiling,
            } => {
                let two_pi = ctx.two_pi();
                let mut d = (theta - ctx.real(*center)).at(prec);
                let turns = (&d / &two_pi).at(prec).floor();
                d -= turns * &two_pi;
                // circular distance
                let alt = (&two_pi - &d).at(prec);
                if alt < d {
                    d = alt;
                }
                if d.is_zero() {
                    return ctx.zero();
                }
                let mut h = (ctx.real(*scale) / d).at(prec);
                if ceiling.is_finite() && h > *ceiling {
                    h = ctx.real(*ceiling);
                }
                (-h).exp()
            }
        }
    }

    fn is_const(&self) -> Option<f64> {
        match self {
            DensityFamily::Const { value } => Some(*value),
            _ => None,
        }
    }
}

/// One density piece on [start, start+length) (fractions of 2π).
#[derive(Clone, Debug)]
pub struct DensityPiece {
    pub start: Angle,
    pub length: Angle,
    pub family: DensityFamily,
}

/// Piecewise density; pieces need not cover the circle (density 0 outside)
/// and different components of a measure may overlap.
#[derive(Clone, Debug)]
pub struct PiecewiseDensityComponent {
    pub pieces: Vec<DensityPiece>,
}

impl PiecewiseDensityComponent {
    pub fn new(pieces: Vec<DensityPiece>) -> Result<Self> {
        for p in &pieces {
            if p.length.turn_f64() <= 0.0 || p.length.turn_f64() > 1.0 + 1e-15 {
                return Err(Error::InvalidMeasure(
                    "density piece length must lie in (0, 1] turns".into(),
                ));
            }
            if let DensityFamily::Const { value } = p.family {
                if value < 0.0 {
                    return Err(Error::InvalidMeasure("density must be nonnegative".into()));
                }
            }
        }
        Ok(PiecewiseDensityComponent { pieces })
    }

    pub fn constant_on(start: Angle, length: Angle, value: f64) -> Result<Self> {
        Self::new(vec![DensityPiece {
            start,
            length,
            family: DensityFamily::Const { value },
        }])
    }

    /// Mass = ∫ density dm; exact for constant pieces, quadrature otherwise.
    pub fn mass(&self, tol: f64, ctx: PrecisionContext) -> Result<Float> {
        Ok(self.moments(0, tol, ctx)?[0].re.clone())
    }

    fn moments(&self, order: usize, tol: f64, ctx: PrecisionContext) -> Result<Vec<CFloat>> {
        let prec = ctx.bits();
        let two_pi = ctx.two_pi();
        let mut c = vec![CFloat::zero(prec); order + 1];
        let per_piece_tol = ctx.real(tol / (self.pieces.len().max(1) as f64));
        for piece in &self.pieces {
            let a = piece.start.radians(ctx);
            let len = piece.length.radians(ctx);
            let b = (&a + &len).at(prec);
            if let Some(v) = piece.family.is_const() {
                // (v/2π) ∫_a^b e^{-imθ} dθ in closed form
                let v = ctx.real(v);
                for (m, cm) in c.iter_mut().enumerate() {
                    if m == 0 {
                        let add = (&v * &len).at(prec) / &two_pi;
                        cm.re += add.at(prec);
                    } else {
                        let mf = Float::with_val(prec, m as u64);
                        let pa = (-(&a * &mf).at(prec)).at(prec);
                        let pb = (-(&b * &mf).at(prec)).at(prec);
                        let ea = ctx.cis(&pa);
                        let eb = ctx.cis(&pb);
                        // ∫ = (e^{-ima} - e^{-imb}) / (im);  1/i = -i
                        let diff = ea.sub(&eb);
                        let scale = (&v / (&two_pi * &mf).at(prec)).at(prec);
                        let term = CFloat {
                            re: (&diff.im * &scale).at(prec),
                            im: (-(&diff.re * &scale).at(prec)).at(prec),
                        };
                        cm.add_assign(&term);
                    }
                }
            } else {
                let fam = piece.family.clone();
                let f = move |theta: &Float| fam.eval(theta, ctx);
                for (m, cm) in c.iter_mut().enumerate() {
                    let val =
                        quad::integrate_oscillatory(&f, &a, &b, m as i64, &per_piece_tol, ctx)?;
                    cm.add_assign(&val.div_real(&two_pi));
                }
            }
        }
        Ok(c)
    }

    /// Pointwise density value (sum over pieces covering θ).
    pub fn density_at(&self, theta: &Float, ctx: PrecisionContext) -> Float {
        let prec = ctx.bits();
        let two_pi = ctx.two_pi();
        let mut total = ctx.zero();
        for piece in &self.pieces {
            let a = piece.start.radians(ctx);
            let len = piece.length.radians(ctx);
            let mut d = (theta - &a).at(prec);
            let turns = (&d / &two_pi).at(prec).floor();
            d -= turns * &two_pi;
            if d <= len {
                total += piece.family.eval(theta, ctx);
            }
        }
        total
    }
}

/// Truncated Riesz product ∏_{j=0}^{n} (1 + α_j cos(ℓ_j(θ - 2π·phase))) dm
/// with lacunary frequencies ℓ_{j+1} ≥ 3ℓ_j. Total mass 1.
#[derive(Clone, Debug)]
pub struct RieszProductComponent {
    pub alphas: Vec<f64>,
    pub ells: Vec<u64>,
    pub phase: Angle,
}

impl RieszProductComponent {
    pub fn new(alphas: Vec<f64>, ells: Vec<u64>) -> Result<Self> {
        Self::with_phase(alphas, ells, Angle::zero())
    }

    pub fn with_phase(alphas: Vec<f64>, ells: Vec<u64>, phase: Angle) -> Result<Self> {
        if alphas.len() != ells.len() || alphas.is_empty() {
            return Err(Error::InvalidMeasure(
                "riesz component needs matching nonempty alphas/ells".into(),
            ));
        }
        if alphas.iter().any(|a| !(-1.0..=1.0).contains(a)) {
            return Err(Error::InvalidMeasure("riesz alphas must lie in [-1,1]".into()));
        }
        check_lacunary(&ells)?;
        Ok(RieszProductComponent { alphas, ells, phase })
    }

    pub fn truncation_level(&self) -> usize {
        self.alphas.len() - 1
    }

    /// N_n = Σ ℓ_j: the order up to which truncated and full products agree.
    pub fn max_moment_order(&self) -> u64 {
        self.ells.iter().sum()
    }

    /// Density value at θ (for quadrature cross-checks).
    pub fn density_at(&self, theta: &Float, ctx: PrecisionContext) -> Float {
        let prec = ctx.bits();
        let shift = self.phase.radians(ctx);
        let t = (theta - shift).at(prec);
        let mut prod = ctx.one();
        for (a, l) in self.alphas.iter().zip(self.ells.iter()) {
            let arg = (&t * Float::with_val(prec, *l)).at(prec);
            let mut f = arg.cos();
            f *= ctx.real(*a);
            f += 1u32;
            prod *= f;
        }
        prod
    }
}

fn check_lacunary(ells: &[u64]) -> Result<()> {
    if ells.iter().any(|&l| l == 0) {
        return Err(Error::Precondition("frequencies must be positive".into()));
    }
    for w in ells.windows(2) {
        if w[1] < 3 * w[0] {
            return Err(Error::Precondition(format!(
                "lacunarity violated: {} follows {} (need ratio >= 3)",
                w[1], w[0]
            )));
        }
    }
    Ok(())
}

/// The unique representation m = Σ ε_j ℓ_j with ε ∈ {-1,0,+1}, if one
/// exists; greedy from the largest frequency down. Uniqueness holds because
/// the tail sums satisfy Σ_{i<j} ℓ_i < ℓ_j under the growth condition.
pub fn greedy_signed_representation(m: i64, ells: &[u64]) -> Result<Option<Vec<i8>>> {
    check_lacunary(ells)?;
    let mut eps = vec![0i8; ells.len()];
    let mut rem = m;
    let mut below: Vec<i64> = Vec::with_capacity(ells.len());
    let mut acc = 0i64;
    for &l in ells {
        below.push(acc);
        acc += l as i64;
    }
    for j in (0..ells.len()).rev() {
        if rem.abs() > below[j] {
            let s = if rem > 0 { 1 } else { -1 };
            eps[j] = s as i8;
            rem -= s * ells[j] as i64;
        }
    }
    if rem == 0 {
        Ok(Some(eps))
    } else {
        Ok(None)
    }
}

/// Exact moments of a truncated Riesz product: c_m = ∏_{ε_j≠0} (α_j/2)
/// multiplied by the rotation phase, zero when m has no representation.
pub fn riesz_moments(
    spec: &RieszProductComponent,
    order: usize,
    ctx: PrecisionContext,
) -> Result<MomentSequence> {
    let max_order = spec.max_moment_order();
    if order as u64 > max_order {
        return Err(Error::MomentOrder {
            requested: order,
            reason: format!(
                "truncated Riesz product determines moments only up to {} = sum of frequencies",
                max_order
            ),
        });
    }
    let prec = ctx.bits();
    let mut values = Vec::with_capacity(order + 1);
    let phase_unit = spec.phase.unit(ctx).conj(); // e^{-2πi·phase}
    for m in 0..=order {
        let eps = greedy_signed_representation(m as i64, &spec.ells)?;
        let cm = match eps {
            None => CFloat::zero(prec),
            Some(eps) => {
                let mut v = ctx.one();
                for (j, e) in eps.iter().enumerate() {
                    if *e != 0 {
                        v *= ctx.real(spec.alphas[j] / 2.0);
                    }
                }
                // rotation by φ multiplies c_m by e^{-imφ}
                phase_unit.powu(m as u64).mul_real(&v)
            }
        };
        values.push(cm);
    }
    MomentSequence::new(values)
}

/// One weighted component of a measure.
#[derive(Clone, Debug)]
pub enum Component {
    Atomic(AtomicComponent),
    Density(PiecewiseDensityComponent),
    Riesz(RieszProductComponent),
}

/// A finite mixture Σ weight_i · component_i with nonnegative weights.
#[derive(Clone, Debug, Default)]
pub struct Measure {
    pub components: Vec<(f64, Component)>,
}

impl Measure {
    pub fn new(components: Vec<(f64, Component)>) -> Result<Self> {
        if components.iter().any(|(w, _)| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidMeasure(
                "component weights must be nonnegative".into(),
            ));
        }
        Ok(Measure { components })
    }

    pub fn lebesgue() -> Self {
        Measure {
            components: vec![(
                1.0,
                Component::Density(
                    PiecewiseDensityComponent::constant_on(
                        Angle::zero(),
                        Angle::Turn(Rational::from(1)),
                        1.0,
                    )
                    .unwrap(),
                ),
            )],
        }
    }

    pub fn from_atoms(atoms: Vec<(Angle, f64)>) -> Result<Self> {
        Ok(Measure {
            components: vec![(1.0, Component::Atomic(AtomicComponent::new(atoms)?))],
        })
    }

    pub fn push(&mut self, weight: f64, component: Component) {
        self.components.push((weight, component));
    }

    pub fn is_purely_atomic(&self) -> bool {
        self.components
            .iter()
            .all(|(w, c)| *w == 0.0 || matches!(c, Component::Atomic(_)))
    }

    /// All atoms with their effective masses (weight · mass).
    pub fn atoms(&self) -> Vec<(Angle, f64)> {
        let mut out = Vec::new();
        for (w, c) in &self.components {
            if let Component::Atomic(a) = c {
                for (angle, mass) in &a.atoms {
                    out.push((angle.clone(), w * mass));
                }
            }
        }
        out
    }

    pub fn total_mass(&self, tol: f64, ctx: PrecisionContext) -> Result<Float> {
        Ok(self.moments(0, tol, ctx)?.value(0).re.clone())
    }

    /// Trigonometric moments c_0..c_N. Atomic and Riesz contributions are
    /// exact to working precision; density pieces meet the absolute
    /// tolerance `tol` per moment.
    pub fn moments(&self, order: usize, tol: f64, ctx: PrecisionContext) -> Result<MomentSequence> {
        let prec = ctx.bits();
        let mut acc = vec![CFloat::zero(prec); order + 1];
        for (w, comp) in &self.components {
            if *w == 0.0 {
                continue;
            }
            let weight = ctx.real(*w);
            let part: Vec<CFloat> = match comp {
                Component::Atomic(a) => a.moments(order, ctx),
                Component::Density(d) => d.moments(order, tol, ctx)?,
                Component::Riesz(r) => riesz_moments(r, order, ctx)?.into_values(),
            };
            for (a, p) in acc.iter_mut().zip(part.iter()) {
                a.add_assign(&p.mul_real(&weight));
            }
        }
        MomentSequence::new(acc)
    }

    /// The measure rotated by the given angle.
    pub fn rotated(&self, by: &Angle) -> Measure {
        let components = self
            .components
            .iter()
            .map(|(w, c)| {
                let rc = match c {
                    Component::Atomic(a) => Component::Atomic(AtomicComponent {
                        atoms: a
                            .atoms
                            .iter()
                            .map(|(ang, m)| (ang.plus(by), *m))
                            .collect(),
                    }),
                    Component::Density(d) => Component::Density(PiecewiseDensityComponent {
                        pieces: d
                            .pieces
                            .iter()
                            .map(|p| DensityPiece {
                                start: p.start.plus(by),
                                length: p.length.clone(),
                                family: match &p.family {
                                    DensityFamily::Const { value } => {
                                        DensityFamily::Const { value: *value }
                                    }
                                    DensityFamily::ExpNegInvDist {
                                        center,
                                        scale,
                                        ceiling,
                                    } => DensityFamily::ExpNegInvDist {
                                        center: center
                                            + by.turn_f64() * 2.0 * std::f64::consts::PI,
                                        scale: *scale,
                                        ceiling: *ceiling,
                                    },
                                },
                            })
                            .collect(),
                    }),
                    Component::Riesz(r) => Component::Riesz(RieszProductComponent {
                        alphas: r.alphas.clone(),
                        ells: r.ells.clone(),
                        phase: r.phase.plus(by),
                    }),
                };
                (*w, rc)
            })
            .collect();
        Measure { components }
    }

    /// The measure scaled by a nonnegative constant.
    pub fn scaled(&self, c: f64) -> Measure {
        Measure {
            components: self
                .components
                .iter()
                .map(|(w, comp)| (w * c, comp.clone()))
                .collect(),
        }
    }
}

/// Hermitian moment sequence c_0..c_N; c_{-m} = conj(c_m) implied.
#[derive(Clone, Debug)]
pub struct MomentSequence {
    values: Vec<CFloat>,
}

impl MomentSequence {
    pub fn new(values: Vec<CFloat>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidMeasure("empty moment sequence".into()));
        }
        Ok(MomentSequence { values })
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    /// c_m for any integer m via the Hermitian extension.
    pub fn at(&self, m: i64) -> CFloat {
        if m >= 0 {
            self.values[m as usize].clone()
        } else {
            self.values[(-m) as usize].conj()
        }
    }

    pub fn value(&self, m: usize) -> &CFloat {
        &self.values[m]
    }

    pub fn into_values(self) -> Vec<CFloat> {
        self.values
    }

    pub fn mass(&self) -> &Float {
        &self.values[0].re
    }
}

/// Moment characterization of (1/k)-invariance up to the checked order:
/// every moment of index not divisible by k must vanish to tol·c_0.
pub fn invariance_order(
    measure: &Measure,
    k: u64,
    checked_order: usize,
    tol: f64,
    ctx: PrecisionContext,
) -> Result<bool> {
    if k == 0 {
        return Err(Error::Precondition("k must be >= 1".into()));
    }
    let prec = ctx.bits();
    let mom = measure.moments(checked_order, tol * 0.01, ctx)?;
    let bound = (mom.mass() * Float::with_val(prec, tol)).at(prec);
    for m in 1..=checked_order {
        if m as u64 % k != 0 && mom.value(m).abs() > bound {
            return Ok(false);
        }
    }
    Ok(true)
}

// --- JSON measure-description files ----------------------------------------

/// Angle in a measure file: a number (fraction of 2π) or a string "p/q".
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(untagged)]
pub enum AngleSpec {
    Number(f64),
    Fraction(String),
}

impl AngleSpec {
    pub fn to_angle(&self) -> Result<Angle> {
        match self {
            AngleSpec::Number(t) => Ok(Angle::from_f64_turn(*t)),
            AngleSpec::Fraction(s) => {
                let r: Rational = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::MeasureFile(format!("bad angle fraction {s:?}")))?;
                Ok(Angle::Turn(r).normalized())
            }
        }
    }
}

#[derive(Serialize, Deserialize, Debug)]
pub struct MeasureFile {
    pub components: Vec<ComponentSpec>,
}

#[derive(Serialize, Deserialize, Debug)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComponentSpec {
    Atomic {
        weight: f64,
        atoms: Vec<(AngleSpec, f64)>,
    },
    Density {
        weight: f64,
        pieces: Vec<PieceSpec>,
    },
    Riesz {
        weight: f64,
        alphas: Vec<f64>,
        ells: Vec<u64>,
        #[serde(default)]
        phase: Option<AngleSpec>,
    },
}

#[derive(Serialize, Deserialize, Debug)]
pub struct PieceSpec {
    pub start: AngleSpec,
    pub end: AngleSpec,
    #[serde(flatten)]
    pub family: DensityFamily,
}

/// Parses a measure-description JSON document into a [`Measure`].
pub fn parse_measure_json(text: &str) -> Result<Measure> {
    let file: MeasureFile =
        serde_json::from_str(text).map_err(|e| Error::MeasureFile(e.to_string()))?;
    let mut components = Vec::new();
    for (i, spec) in file.components.iter().enumerate() {
        let tag = |msg: String| Error::MeasureFile(format!("component {i}: {msg}"));
        match spec {
            ComponentSpec::Atomic { weight, atoms } => {
                let atoms = atoms
                    .iter()
                    .map(|(a, m)| Ok((a.to_angle()?, *m)))
                    .collect::<Result<Vec<_>>>()?;
                let comp = AtomicComponent::new(atoms).map_err(|e| tag(e.to_string()))?;
                components.push((*weight, Component::Atomic(comp)));
            }
            ComponentSpec::Density { weight, pieces } => {
                let pieces = pieces
                    .iter()
                    .map(|p| {
                        let start = p.start.to_angle()?;
                        let end = p.end.to_angle()?;
                        let mut len = end.turn_f64() - start.turn_f64();
                        if len <= 0.0 {
                            len += 1.0;
                        }
                        Ok(DensityPiece {
                            start,
                            length: Angle::Real(len),
                            family: p.family.clone(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let comp =
                    PiecewiseDensityComponent::new(pieces).map_err(|e| tag(e.to_string()))?;
                components.push((*weight, Component::Density(comp)));
            }
            ComponentSpec::Riesz {
                weight,
                alphas,
                ells,
                phase,
            } => {
                let phase = match phase {
                    Some(p) => p.to_angle()?,
                    None => Angle::zero(),
                };
                let comp = RieszProductComponent::with_phase(alphas.clone(), ells.clone(), phase)
                    .map_err(|e| tag(e.to_string()))?;
                components.push((*weight, Component::Riesz(comp)));
            }
        }
    }
    if components.iter().any(|(w, _)| *w < 0.0) {
        return Err(Error::MeasureFile("negative component weight".into()));
    }
    Measure::new(components)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(192)
    }

    fn tight(ctx: PrecisionContext) -> f64 {
        2f64.powi(-(ctx.bits() as i32) + 24)
    }

    #[test]
    fn lebesgue_moments_are_orthonormal() {
        let c = ctx();
        let m = Measure::lebesgue().moments(3, 1e-40, c).unwrap();
        assert!((m.value(0).re.to_f64() - 1.0).abs() < tight(c));
        for k in 1..=3 {
            assert!(m.value(k).abs().to_f64() < tight(c));
        }
    }

    #[test]
    fn fourth_roots_moments() {
        let c = ctx();
        let atoms = (0..4)
            .map(|j| (Angle::turn(j, 4), 0.25))
            .collect::<Vec<_>>();
        let rho = Measure::from_atoms(atoms).unwrap();
        let m = rho.moments(4, 1e-40, c).unwrap();
        let expect = [1.0, 0.0, 0.0, 0.0, 1.0];
        for (k, e) in expect.iter().enumerate() {
            assert!(
                (m.value(k).re.to_f64() - e).abs() < tight(c),
                "c_{k} = {:?}",
                m.value(k)
            );
            assert!(m.value(k).im.to_f64().abs() < tight(c));
        }
    }

    #[test]
    fn riesz_single_factor_moment() {
        let c = ctx();
        let r = RieszProductComponent::new(vec![1.0], vec![1]).unwrap();
        let m = riesz_moments(&r, 1, c).unwrap();
        assert!((m.value(0).re.to_f64() - 1.0).abs() < tight(c));
        assert!((m.value(1).re.to_f64() - 0.5).abs() < tight(c));
    }

    /// Exhaustive oracle for signed representations over {-1,0,1}^n.
    fn all_representations(m: i64, ells: &[u64]) -> Vec<Vec<i8>> {
        let n = ells.len();
        let mut out = Vec::new();
        for mask in 0..3u64.pow(n as u32) {
            let mut digits = Vec::with_capacity(n);
            let mut x = mask;
            let mut total = 0i64;
            for &l in ells {
                let d = (x % 3) as i8 - 1;
                x /= 3;
                digits.push(d);
                total += d as i64 * l as i64;
            }
            if total == m {
                out.push(digits);
            }
        }
        out
    }

    #[test]
    fn greedy_matches_exhaustive_oracle() {
        let ells = [1u64, 3, 9];
        for m in -14..=14 {
            let reps = all_representations(m, &ells);
            assert!(reps.len() <= 1, "lacunarity should force uniqueness");
            let greedy = greedy_signed_representation(m, &ells).unwrap();
            match (reps.first(), greedy) {
                (None, None) => {}
                (Some(r), Some(g)) => assert_eq!(*r, g, "m = {m}"),
                (a, b) => panic!("m = {m}: oracle {a:?} vs greedy {b:?}"),
            }
        }
        // frozen cases
        assert_eq!(
            greedy_signed_representation(4, &ells).unwrap(),
            Some(vec![1, 1, 0])
        );
        assert_eq!(
            greedy_signed_representation(2, &ells).unwrap(),
            Some(vec![-1, 1, 0])
        );
        assert_eq!(greedy_signed_representation(14, &ells).unwrap(), None);
    }

    #[test]
    fn greedy_rejects_non_lacunary() {
        assert!(greedy_signed_representation(1, &[2, 5]).is_err());
    }

    #[test]
    fn riesz_two_factor_moment_matches_quadrature() {
        let c = ctx();
        let (a0, a1) = (0.7, -0.4);
        let r = RieszProductComponent::new(vec![a0, a1], vec![1, 3]).unwrap();
        let m = riesz_moments(&r, 4, c).unwrap();
        assert!((m.value(2).re.to_f64() - a0 * a1 / 4.0).abs() < tight(c));
        // quadrature of the explicit density as an independent route
        let dens = r.clone();
        let f = move |theta: &Float| dens.density_at(theta, c);
        for k in 0..=4usize {
            let v = crate::quad::integrate_oscillatory(
                &f,
                &c.zero(),
                &c.two_pi(),
                k as i64,
                &c.real(1e-30),
                c,
            )
            .unwrap()
            .div_real(&c.two_pi());
            assert!(
                v.dist(m.value(k)).to_f64() < 1e-12,
                "moment {k} disagrees with quadrature"
            );
        }
    }

    #[test]
    fn riesz_moment_order_capped() {
        let c = ctx();
        let r = RieszProductComponent::new(vec![1.0, 1.0], vec![1, 3]).unwrap();
        assert!(riesz_moments(&r, 4, c).is_ok());
        assert!(matches!(
            riesz_moments(&r, 5, c),
            Err(Error::MomentOrder { .. })
        ));
    }

    #[test]
    fn invariance_of_eighth_roots() {
        let c = ctx();
        let atoms = (0..8)
            .map(|j| (Angle::turn(j, 8), 0.125))
            .collect::<Vec<_>>();
        let rho = Measure::from_atoms(atoms).unwrap();
        assert!(invariance_order(&rho, 8, 7, 1e-40, c).unwrap());
        // c_8 = 1 and 3 does not divide 8
        assert!(!invariance_order(&rho, 3, 8, 1e-40, c).unwrap());
        assert!(invariance_order(&Measure::lebesgue(), 5, 12, 1e-40, c).unwrap());
    }

    #[test]
    fn moments_are_hermitian_and_bounded_by_mass() {
        let c = ctx();
        let mut rho = Measure::from_atoms(vec![
            (Angle::Real(0.13), 0.4),
            (Angle::turn(1, 3), 0.35),
        ])
        .unwrap();
        rho.push(
            0.5,
            Component::Density(
                PiecewiseDensityComponent::constant_on(
                    Angle::Real(0.2),
                    Angle::Real(0.3),
                    0.8,
                )
                .unwrap(),
            ),
        );
        let m = rho.moments(12, 1e-40, c).unwrap();
        let c0 = m.mass().to_f64();
        assert!(c0 > 0.0);
        for k in 0..=12usize {
            assert!(m.value(k).abs().to_f64() <= c0 * (1.0 + 1e-30));
            let neg = m.at(-(k as i64));
            assert!(neg.dist(&m.value(k).conj()).to_f64() == 0.0);
        }
    }

    #[test]
    fn exp_density_mass_converges_with_tolerance() {
        let c = ctx();
        let piece = PiecewiseDensityComponent::new(vec![DensityPiece {
            start: Angle::Real(0.0),
            length: Angle::Turn(Rational::from(1)),
            family: DensityFamily::ExpNegInvDist {
                center: 0.0,
                scale: 1.0,
                ceiling: f64::INFINITY,
            },
        }])
        .unwrap();
        let coarse = piece.mass(1e-10, c).unwrap();
        let fine = piece.mass(1e-25, c).unwrap();
        assert!((coarse.to_f64() - fine.to_f64()).abs() < 1e-10);
        assert!(fine.to_f64() > 0.3 && fine.to_f64() < 0.6);
    }

    #[test]
    fn rotation_shifts_moment_phases() {
        let c = ctx();
        let r = Measure {
            components: vec![(
                1.0,
                Component::Riesz(RieszProductComponent::new(vec![0.6, 0.3], vec![1, 4]).unwrap()),
            )],
        };
        let phi = Angle::turn(1, 8);
        let rot = r.rotated(&phi);
        let m0 = r.moments(5, 1e-40, c).unwrap();
        let m1 = rot.moments(5, 1e-40, c).unwrap();
        for k in 0..=5usize {
            let shift = phi.unit(c).conj().powu(k as u64);
            let expect = m0.value(k).mul(&shift);
            assert!(m1.value(k).dist(&expect).to_f64() < 1e-45);
        }
    }

    #[test]
    fn parses_measure_file() {
        let text = r#"{
          "components": [
            {"kind": "atomic", "weight": 1.0, "atoms": [["1/4", 0.5], [0.75, 0.5]]},
            {"kind": "density", "weight": 0.25,
             "pieces": [{"start": "0", "end": "1/2", "family": "const", "value": 2.0}]},
            {"kind": "riesz", "weight": 0.5, "alphas": [1.0, 0.5], "ells": [1, 3]}
          ]
        }"#;
        let m = parse_measure_json(text).unwrap();
        assert_eq!(m.components.len(), 3);
        let c = ctx();
        let mass = m.total_mass(1e-30, c).unwrap().to_f64();
        assert!((mass - (1.0 + 0.25 + 0.5)).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_lacunary_file() {
        let text = r#"{"components": [{"kind": "riesz", "weight": 1.0, "alphas": [0.5, 0.5], "ells": [2, 5]}]}"#;
        let err = parse_measure_json(text).unwrap_err();
        assert!(err.to_string().contains("lacunarity"));
    }

    #[test]
    fn rejects_nonpositive_atom_mass() {
        let text = r#"{"components": [{"kind": "atomic", "weight": 1.0, "atoms": [[0.1, 0.0]]}]}"#;
        assert!(parse_measure_json(text).is_err());
    }
}
