//! Closed arcs on the unit circle and disjoint unions of them.
//!
//! Endpoints are kept in extended precision: sublevel sets of extremal
//! polynomials produce arcs whose lengths are far below f64 resolution, and
//! later stages need their logarithms exactly.

use crate::precision::{CompleteAt, PrecisionContext};
use rug::Float;

/// A closed arc {e^{iθ} : start ≤ θ ≤ start + length}, start normalized to
/// [0, 2π), 0 < length ≤ 2π. Length exactly 2π is the full circle.
#[derive(Clone, Debug)]
pub struct Arc {
    start: Float,
    length: Float,
}

impl Arc {
    pub fn new(start: Float, length: Float, ctx: PrecisionContext) -> Self {
        assert!(length.is_sign_positive() && !length.is_zero(), "arc length must be > 0");
        let two_pi = ctx.two_pi();
        let length = if length > two_pi { two_pi.clone() } else { length };
        let prec = ctx.bits();
        let mut start = Float::with_val(prec, &start);
        // reduce start into [0, 2π)
        let turns = (&start / &two_pi).at(prec).floor();
        start -= (&turns * &two_pi).at(prec);
        if start < 0 {
            start += &two_pi;
        }
        if start >= two_pi {
            start = Float::new(prec);
        }
        Arc { start, length }
    }

    pub fn full_circle(ctx: PrecisionContext) -> Self {
        Arc {
            start: ctx.zero(),
            length: ctx.two_pi(),
        }
    }

    pub fn from_f64(start: f64, length: f64, ctx: PrecisionContext) -> Self {
        Arc::new(ctx.real(start), ctx.real(length), ctx)
    }

    /// Arc of the given length centered at `center`.
    pub fn centered(center: &Float, length: Float, ctx: PrecisionContext) -> Self {
        let prec = ctx.bits();
        let half = (&length / Float::with_val(prec, 2)).at(prec);
        let start = (center - half).at(prec);
        Arc::new(start, length, ctx)
    }

    pub fn start(&self) -> &Float {
        &self.start
    }

    pub fn length(&self) -> &Float {
        &self.length
    }

    pub fn end(&self) -> Float {
        (&self.start + &self.length).at(self.start.prec())
    }

    pub fn midpoint(&self) -> Float {
        let prec = self.start.prec();
        let half = (&self.length / Float::with_val(prec, 2)).at(prec);
        (&self.start + half).at(prec)
    }

    /// ln(length); safe for lengths far below f64 range.
    pub fn log_length(&self) -> f64 {
        self.length.clone().ln().to_f64()
    }

    /// Membership of an angle (radians, any branch).
    pub fn contains(&self, theta: &Float, ctx: PrecisionContext) -> bool {
        let prec = ctx.bits();
        let two_pi = ctx.two_pi();
        let mut d = (theta - &self.start).at(prec);
        let turns = (&d / &two_pi).at(prec).floor();
        d -= turns * &two_pi;
        if d < 0 {
            d += &two_pi;
        }
        d <= self.length
    }

    pub fn is_full_circle(&self, ctx: PrecisionContext) -> bool {
        self.length >= ctx.two_pi()
    }
}

/// Disjoint closed arcs sorted by start angle.
#[derive(Clone, Debug, Default)]
pub struct ArcSet {
    arcs: Vec<Arc>,
}

impl ArcSet {
    pub fn empty() -> Self {
        ArcSet { arcs: Vec::new() }
    }

    pub fn full_circle(ctx: PrecisionContext) -> Self {
        ArcSet {
            arcs: vec![Arc::full_circle(ctx)],
        }
    }

    /// Builds a disjoint sorted union from raw arcs, merging overlaps
    /// (including across the 0/2π seam).
    pub fn from_arcs(raw: Vec<Arc>, ctx: PrecisionContext) -> Self {
        if raw.is_empty() {
            return ArcSet::empty();
        }
        let prec = ctx.bits();
        let two_pi = ctx.two_pi();
        let total: Float = raw
            .iter()
            .fold(ctx.zero(), |acc, a| acc + a.length().clone());
        if total >= two_pi {
            // cheap pre-check only; real overlap handling below may still
            // collapse to the full circle
        }
        // unroll to intervals on [0, 4π) so seam-crossing arcs stay contiguous
        let mut iv: Vec<(Float, Float)> = raw
            .iter()
            .map(|a| (a.start.clone(), a.end()))
            .collect();
        iv.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut merged: Vec<(Float, Float)> = Vec::new();
        for (s, e) in iv {
            if let Some(last) = merged.last_mut() {
                if s <= last.1 {
                    if e > last.1 {
                        last.1 = e;
                    }
                    continue;
                }
            }
            merged.push((s, e));
        }
        // wrap: if the last interval reaches past 2π, merge into the head
        if merged.len() > 1 {
            let wraps = merged.last().unwrap().1 >= two_pi;
            if wraps {
                let (ls, le) = merged.pop().unwrap();
                let le_red = (&le - &two_pi).at(prec);
                if le_red >= merged[0].0 {
                    // swallowed the first interval (and possibly more)
                    let mut endpoint = merged[0].1.clone();
                    while merged.len() > 1 && le_red >= merged[1].0 {
                        merged.remove(0);
                        endpoint = merged[0].1.clone();
                    }
                    if le_red > endpoint {
                        // fully covers start region
                        merged[0] = (ls.clone(), le.clone());
                    } else {
                        let new_len = ((&endpoint + &two_pi).at(prec) - &ls).at(prec);
                        if new_len >= two_pi {
                            return ArcSet::full_circle(ctx);
                        }
                        merged.remove(0);
                        merged.push((ls, endpoint + two_pi.clone()));
                    }
                } else {
                    merged.push((ls, le));
                }
            }
        }
        let arcs: Vec<Arc> = merged
            .into_iter()
            .map(|(s, e)| {
                let len = (&e - &s).at(prec);
                Arc::new(s, len, ctx)
            })
            .collect();
        let total: Float = arcs
            .iter()
            .fold(ctx.zero(), |acc, a| acc + a.length().clone());
        if total >= two_pi {
            return ArcSet::full_circle(ctx);
        }
        let mut arcs = arcs;
        arcs.sort_by(|x, y| x.start.partial_cmp(&y.start).unwrap());
        ArcSet { arcs }
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn count(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_full_circle(&self, ctx: PrecisionContext) -> bool {
        self.arcs.len() == 1 && self.arcs[0].is_full_circle(ctx)
    }

    pub fn total_length(&self, ctx: PrecisionContext) -> Float {
        self.arcs
            .iter()
            .fold(ctx.zero(), |acc, a| acc + a.length().clone())
    }

    pub fn contains(&self, theta: &Float, ctx: PrecisionContext) -> bool {
        self.arcs.iter().any(|a| a.contains(theta, ctx))
    }

    /// Enlarges every arc by epsilon on both sides and re-merges.
    pub fn enlarged(&self, epsilon: f64, ctx: PrecisionContext) -> ArcSet {
        let prec = ctx.bits();
        let eps = ctx.real(epsilon);
        let raw = self
            .arcs
            .iter()
            .map(|a| {
                let start = (a.start() - &eps).at(prec);
                let len = (a.length() + (&eps * Float::with_val(prec, 2)).at(prec))
                    .at(prec);
                Arc::new(start, len, ctx)
            })
            .collect();
        ArcSet::from_arcs(raw, ctx)
    }

    /// The complementary arcs (gaps), in the same order convention.
    pub fn gaps(&self, ctx: PrecisionContext) -> Vec<Arc> {
        let prec = ctx.bits();
        let two_pi = ctx.two_pi();
        if self.arcs.is_empty() {
            return vec![Arc::full_circle(ctx)];
        }
        if self.is_full_circle(ctx) {
            return Vec::new();
        }
        let p = self.arcs.len();
        let mut gaps = Vec::with_capacity(p);
        for i in 0..p {
            let e = self.arcs[i].end();
            let next = if i + 1 < p {
                self.arcs[i + 1].start().clone()
            } else {
                (self.arcs[0].start() + &two_pi).at(prec)
            };
            let len = (&next - &e).at(prec);
            if len.is_sign_positive() && !len.is_zero() {
                gaps.push(Arc::new(e, len, ctx));
            }
        }
        gaps
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(96)
    }

    #[test]
    fn merges_overlapping_arcs() {
        let c = ctx();
        let set = ArcSet::from_arcs(
            vec![
                Arc::from_f64(0.0, 1.0, c),
                Arc::from_f64(0.5, 1.0, c),
                Arc::from_f64(3.0, 0.5, c),
            ],
            c,
        );
        assert_eq!(set.count(), 2);
        assert!((set.arcs()[0].length().to_f64() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn merges_across_seam() {
        let c = ctx();
        let set = ArcSet::from_arcs(
            vec![Arc::from_f64(6.0, 0.6, c), Arc::from_f64(0.2, 0.5, c)],
            c,
        );
        // 6.0..6.6 wraps to ~0.317; should swallow 0.2..0.7
        assert_eq!(set.count(), 1);
        let a = &set.arcs()[0];
        assert!((a.start().to_f64() - 6.0).abs() < 1e-12);
        assert!((a.length().to_f64() - (0.7 + 2.0 * std::f64::consts::PI - 6.0)).abs() < 1e-12);
    }

    #[test]
    fn gaps_complement_total_length() {
        let c = ctx();
        let set = ArcSet::from_arcs(
            vec![Arc::from_f64(0.3, 0.4, c), Arc::from_f64(2.0, 1.0, c)],
            c,
        );
        let gaps = set.gaps(c);
        assert_eq!(gaps.len(), 2);
        let total = set.total_length(c).to_f64()
            + gaps.iter().map(|g| g.length().to_f64()).sum::<f64>();
        assert!((total - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn membership_wraps() {
        let c = ctx();
        let a = Arc::from_f64(6.0, 0.6, c); // crosses 2π
        assert!(a.contains(&c.real(0.2), c));
        assert!(a.contains(&c.real(6.1), c));
        assert!(!a.contains(&c.real(1.0), c));
    }
}
