//! Certified tracking of a regular curve `C(x) = 0` in `R^n` by a chain of
//! interval regions.
//!
//! Each tube is a box in a rotated frame whose last axis follows the curve.
//! A passing Krawczyk test over the whole box shows that the curve crosses
//! every level of the tube exactly once. Consecutive tubes share a small
//! certified box around a curve point (a [`Link`]), and tubes that are not
//! neighbours along the chain are disjoint.

mod engine;
mod frame;
mod predict;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rug::{Float, Rational};

use crate::certify::Certificate;
use crate::error::{Error, Result};
use crate::interval::{intersecting_pairs, Interval, IntervalVector, Precision};
use crate::polysys::{CompiledSystem, PolySystem, RotatedSystem};

pub use frame::{unitary_transformation, Frame};
pub use predict::{predict, slope, Predictor, PredictorKind};

/// Tolerances and limits for [`track_curve`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrackParams {
    /// Refinement tolerance for base points.
    pub rho: Rational,
    /// Krawczyk bound required over a whole tube.
    pub tau: Rational,
    /// Initial step length along the tangent.
    pub step: Rational,
    /// Initial certification radius.
    pub radius: Rational,
    pub predictor: PredictorKind,
    /// Starting precision.
    pub precision: Precision,
    pub max_precision: Precision,
    /// Restarts with halved `rho` before giving up.
    pub max_restarts: usize,
    /// Upper bound on tubes built in one attempt.
    pub max_tubes: usize,
}

impl Default for TrackParams {
    fn default() -> Self {
        TrackParams {
            rho: Rational::from((1, 8)),
            tau: Rational::from((7, 8)),
            step: Rational::from((1, 2)),
            radius: Rational::from((1, 10)),
            predictor: PredictorKind::Hermite,
            precision: Precision::MIN,
            max_precision: Precision::MAX,
            max_restarts: 6,
            max_tubes: 200_000,
        }
    }
}

impl TrackParams {
    pub fn validate(&self) -> Result<()> {
        let open_unit = |q: &Rational| *q > 0 && *q < 1;
        if !open_unit(&self.rho) {
            return Err(Error::InvalidParameter(format!("rho = {} outside (0, 1)", self.rho)));
        }
        if !open_unit(&self.tau) {
            return Err(Error::InvalidParameter(format!("tau = {} outside (0, 1)", self.tau)));
        }
        if self.rho > self.tau {
            return Err(Error::InvalidParameter("rho must not exceed tau".into()));
        }
        if self.step < (Rational::from(1) >> 40u32) || self.step > 1 {
            return Err(Error::InvalidParameter(format!("step = {} outside [2^-40, 1]", self.step)));
        }
        if self.radius <= 0 || self.radius > 1 {
            return Err(Error::InvalidParameter(format!("radius = {} outside (0, 1]", self.radius)));
        }
        if self.max_precision < self.precision {
            return Err(Error::InvalidParameter("max precision below starting precision".into()));
        }
        Ok(())
    }
}

/// Axis-aligned box `D` with rational corners.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    lo: Vec<Rational>,
    hi: Vec<Rational>,
}

impl Domain {
    pub fn new(lo: Vec<Rational>, hi: Vec<Rational>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return Err(Error::InvalidRegion);
        }
        Ok(Domain { lo, hi })
    }

    /// `[-s, s]^n`.
    pub fn cube(n: usize, s: impl Into<Rational>) -> Result<Self> {
        let s = s.into();
        Domain::new(vec![Rational::from(-&s); n], vec![s; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[Rational] {
        &self.lo
    }

    pub fn hi(&self) -> &[Rational] {
        &self.hi
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (a, b))| a <= v && v <= b)
    }

    pub fn to_box(&self, prec: Precision) -> IntervalVector {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| Interval::from_rational(a, prec).hull(&Interval::from_rational(b, prec)))
            .collect()
    }

    /// True when no point of `b` lies in the closed box.
    pub fn excludes(&self, b: &IntervalVector) -> bool {
        b.iter().zip(self.lo.iter().zip(&self.hi)).any(|(x, (a, c))| {
            matches!(x.hi().partial_cmp(a), Some(std::cmp::Ordering::Less))
                || matches!(x.lo().partial_cmp(c), Some(std::cmp::Ordering::Greater))
        })
    }
}

/// Position of a tube along the chain, used to match tubes across
/// refinements. A refined tube's key lies inside its ancestor's key.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArcKey {
    pub lo: Rational,
    pub len: Rational,
}

impl ArcKey {
    /// Containment, modulo `period` on closed chains.
    pub fn within(&self, outer: &ArcKey, period: Option<&Rational>) -> bool {
        let mut offset = Rational::from(&self.lo - &outer.lo);
        if let Some(p) = period {
            while offset < 0 {
                offset += p;
            }
            while offset >= *p {
                offset -= p;
            }
        }
        offset >= 0 && Rational::from(&offset + &self.len) <= outer.len
    }

    /// True when the two arcs share more than an endpoint.
    pub fn overlaps(&self, other: &ArcKey, period: Option<&Rational>) -> bool {
        let mut offset = Rational::from(&other.lo - &self.lo);
        match period {
            Some(p) => {
                while offset < 0 {
                    offset += p;
                }
                while offset >= *p {
                    offset -= p;
                }
                offset < self.len || Rational::from(&offset + &other.len) > *p
            }
            None => offset < self.len && Rational::from(&offset + &other.len) > 0,
        }
    }
}

/// A small box around one curve point, certified in the frame of the tube
/// that produced it.
#[derive(Debug, Clone)]
pub struct Link {
    /// Approximation of the curve point.
    pub point: Vec<Float>,
    /// Enclosure in original coordinates.
    pub region: IntervalVector,
}

/// One certified interval region.
#[derive(Debug, Clone)]
pub struct Tube {
    pub frame: Frame,
    /// `(X(span) + r B) x (level + span)` in frame coordinates.
    pub rotated: IntervalVector,
    /// Enclosure of `V * rotated` in original coordinates.
    pub region: IntervalVector,
    /// Krawczyk data over the whole tube, in frame coordinates.
    pub certificate: Certificate,
    pub predictor: Predictor,
    /// Base point in frame coordinates (all `n` of them).
    pub base: Vec<Float>,
    pub step: Float,
    pub backward: Float,
    /// Tolerance of the refinement that produced the base point.
    pub rho: Rational,
    /// The frame's tangent points against the chain order.
    pub reversed: bool,
    pub key: ArcKey,
}

impl Tube {
    pub fn precision(&self) -> Precision {
        self.certificate.center.precision()
    }

    /// Tangent in original coordinates, oriented along the chain.
    pub fn chain_tangent(&self) -> Vec<Float> {
        let t = self.frame.tangent();
        if self.reversed {
            t.into_iter().map(|x| -x).collect()
        } else {
            t
        }
    }

    pub fn rotated_system(&self, base: &Arc<CompiledSystem>) -> Result<RotatedSystem> {
        RotatedSystem::new(base.clone(), &self.frame.u, &self.frame.v)
    }

    /// Re-runs the tube's Krawczyk test.
    pub fn verify(&self, base: &Arc<CompiledSystem>) -> Result<bool> {
        let rot = self.rotated_system(base)?;
        Ok(self.certificate.verify(&rot)?.passed)
    }

    /// True when the link box lies inside this tube (in its frame).
    pub fn contains_link(&self, link: &Link) -> Result<bool> {
        Ok(self.frame.to_frame(&link.region)?.is_subset(&self.rotated))
    }

    /// True when the two tubes certainly do not meet.
    pub fn disjoint_from(&self, other: &Tube) -> Result<bool> {
        if !self.region.intersects(&other.region) {
            return Ok(true);
        }
        for (a, b) in [(self, other), (other, self)] {
            let m = a.frame.v_inv.mul(&b.frame.v)?;
            if !m.mul_vec(&b.rotated)?.intersects(&a.rotated) {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Whether the chain closes on itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Closure {
    /// Both ends leave the domain.
    Open,
    /// The last tube connects back to the first.
    Closed,
}

impl fmt::Display for Closure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Closure::Open => "open",
            Closure::Closed => "closed",
        })
    }
}

/// Counters gathered during tracking.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrackStats {
    /// Predictor passes (accepted tubes plus step halvings) in the
    /// successful attempt.
    pub iterations: usize,
    /// Predictor passes summed over all attempts.
    pub total_iterations: usize,
    /// Step halvings after a failed tube test.
    pub rejected_steps: usize,
    pub krawczyk_tests: usize,
    pub restarts: usize,
    pub escalations: usize,
}

/// Decision after a tube has been added.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StopDecision {
    Continue,
    /// The exit point lies outside the domain.
    ExitedDomain,
    /// The exit point lies on the arc of tube `seam`.
    Closed { seam: usize },
    /// The exit box straddles the boundary of the domain.
    NeedRefine,
}

/// Decides whether tracking stops after the tube whose exit box is `exit`.
/// With `allow_closure`, the first three tubes are candidates for closing the
/// chain if they are more than two steps behind.
pub fn stopping_criterion(
    domain: &Domain,
    tubes: &[Tube],
    exit: &Link,
    allow_closure: bool,
) -> Result<StopDecision> {
    if domain.excludes(&exit.region) {
        return Ok(StopDecision::ExitedDomain);
    }
    if allow_closure && !tubes.is_empty() {
        let last = tubes.len() - 1;
        for seam in 0..3.min(tubes.len()) {
            if last - seam > 2 && tubes[seam].contains_link(exit)? {
                return Ok(StopDecision::Closed { seam });
            }
        }
    }
    let prec = exit.region.precision();
    if exit.region.is_subset(&domain.to_box(prec)) {
        Ok(StopDecision::Continue)
    } else {
        Ok(StopDecision::NeedRefine)
    }
}

/// A certified chain of tubes enclosing one curve component inside a domain.
#[derive(Debug, Clone)]
pub struct TubularNeighborhood {
    system: PolySystem,
    domain: Domain,
    params: TrackParams,
    tubes: Vec<Tube>,
    links: Vec<Link>,
    closure: Closure,
    period: Option<Rational>,
    stats: TrackStats,
    rho: Rational,
    precision: Precision,
    compiled: BTreeMap<u32, Arc<CompiledSystem>>,
}

impl TubularNeighborhood {
    pub fn system(&self) -> &PolySystem {
        &self.system
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn params(&self) -> &TrackParams {
        &self.params
    }

    pub fn tubes(&self) -> &[Tube] {
        &self.tubes
    }

    pub fn len(&self) -> usize {
        self.tubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tubes.is_empty()
    }

    /// `links()[i]` is shared by tube `i-1` and tube `i`. On an open chain
    /// the first and last links are the boxes where the curve leaves the
    /// domain; on a closed chain `links()[0]` joins the last and first tubes.
    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    pub fn is_closed(&self) -> bool {
        self.closure == Closure::Closed
    }

    pub fn stats(&self) -> &TrackStats {
        &self.stats
    }

    /// `rho` of the successful attempt.
    pub fn rho(&self) -> &Rational {
        &self.rho
    }

    /// Precision of the successful attempt.
    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// Key period on closed chains.
    pub fn period(&self) -> Option<&Rational> {
        self.period.as_ref()
    }

    pub fn compiled(&mut self, prec: Precision) -> Arc<CompiledSystem> {
        let system = &self.system;
        self.compiled
            .entry(prec.bits())
            .or_insert_with(|| Arc::new(system.compile(prec)))
            .clone()
    }

    /// Distance along the chain, cyclic when closed.
    pub fn chain_distance(&self, i: usize, j: usize) -> usize {
        let d = i.abs_diff(j);
        match self.closure {
            Closure::Closed => d.min(self.tubes.len() - d),
            Closure::Open => d,
        }
    }

    /// Tubes within chain distance two may overlap.
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.chain_distance(i, j) <= 2
    }

    pub fn contains_point(&self, x: &[Float]) -> bool {
        self.tubes.iter().any(|t| t.region.contains_point(x))
    }

    /// Indices of tubes whose region meets `b`.
    pub fn tubes_meeting(&self, b: &IntervalVector) -> Vec<usize> {
        (0..self.tubes.len())
            .filter(|&i| self.tubes[i].region.intersects(b))
            .collect()
    }

    /// Re-runs the Krawczyk test of every tube.
    pub fn verify_certificates(&mut self) -> Result<bool> {
        for i in 0..self.tubes.len() {
            let base = self.compiled(self.tubes[i].precision());
            if !self.tubes[i].verify(&base)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every link lies in both tubes it joins.
    pub fn check_chain(&self) -> Result<bool> {
        let n = self.tubes.len();
        for (i, link) in self.links.iter().enumerate() {
            let before = match (self.closure, i) {
                (Closure::Closed, 0) => Some(n - 1),
                (_, 0) => None,
                _ => Some(i - 1),
            };
            let after = (i < n).then_some(i);
            for t in before.into_iter().chain(after) {
                if !self.tubes[t].contains_link(link)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// First pair of non-adjacent tubes that may intersect.
    pub fn find_overlap(&self) -> Result<Option<(usize, usize)>> {
        let boxes: Vec<IntervalVector> = self.tubes.iter().map(|t| t.region.clone()).collect();
        for (i, j) in intersecting_pairs(&boxes) {
            if !self.adjacent(i, j) && !self.tubes[i].disjoint_from(&self.tubes[j])? {
                return Ok(Some((i, j)));
            }
        }
        Ok(None)
    }

    /// Re-tracks the tubes `from..=to` (wrapping past the end on a closed
    /// chain when `from > to`) with refinement tolerance `rho`, keeping the
    /// links at both ends. Returns the index range of the new tubes.
    pub fn refine_segment(&mut self, from: usize, to: usize, rho: &Rational) -> Result<std::ops::Range<usize>> {
        engine::refine_segment(self, from, to, rho)
    }
}

/// Algorithm 4: tracks the component of `C = 0` through `start` inside
/// `domain`. Open components are followed in both directions until they
/// leave the domain. Failures of the disjointness checks restart the whole
/// track with halved `rho`; precision failures restart it at twice the
/// precision.
pub fn track_curve(
    system: &PolySystem,
    start: &[Rational],
    domain: &Domain,
    params: &TrackParams,
) -> Result<TubularNeighborhood> {
    params.validate()?;
    let n = system.nvars();
    if system.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n.saturating_sub(1),
            found: system.len(),
        });
    }
    if start.len() != n || domain.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if start.len() != n { start.len() } else { domain.dim() },
        });
    }
    if !domain.contains(start) {
        return Err(Error::InvalidRegion);
    }
    engine::track(system, start, domain, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn defaults_are_valid() {
        let p = TrackParams::default();
        p.validate().unwrap();
        assert_eq!(p.rho, q(1, 8));
        assert_eq!(p.tau, q(7, 8));
        assert_eq!(p.step, q(1, 2));
        assert_eq!(p.radius, q(1, 10));
    }

    #[test]
    fn invalid_params_are_rejected() {
        let mut p = TrackParams::default();
        p.rho = q(9, 8);
        assert!(p.validate().is_err());
        let mut p = TrackParams::default();
        p.step = q(2, 1);
        assert!(p.validate().is_err());
    }

    #[test]
    fn domain_exclusion() {
        let d = Domain::cube(2, 2).unwrap();
        let prec = Precision::MIN;
        let inside = IntervalVector::from_f64s(&[0.0, 1.0], prec);
        let outside = IntervalVector::from_f64s(&[0.0, 2.5], prec);
        assert!(!d.excludes(&inside));
        assert!(d.excludes(&outside));
        assert!(Domain::new(vec![q(1, 1)], vec![q(1, 1)]).is_err());
    }

    #[test]
    fn arc_keys_wrap() {
        let a = ArcKey { lo: q(9, 1), len: q(2, 1) };
        let b = ArcKey { lo: q(1, 2), len: q(1, 1) };
        assert!(a.overlaps(&b, Some(&q(10, 1))));
        assert!(b.overlaps(&a, Some(&q(10, 1))));
        assert!(!a.overlaps(&b, None));
        assert!(!b.overlaps(&ArcKey { lo: q(3, 2), len: q(1, 1) }, None));
        let outer = ArcKey { lo: q(9, 1), len: q(2, 1) };
        let inner = ArcKey { lo: q(1, 2), len: q(1, 4) };
        assert!(!inner.within(&outer, None));
        assert!(inner.within(&outer, Some(&q(10, 1))));
    }

    #[test]
    fn start_outside_domain() {
        let s = PolySystem::parse(&["x^2 + y^2 - 1"], &["x", "y"]).unwrap();
        let d = Domain::cube(2, q(1, 2)).unwrap();
        let err = track_curve(&s, &[q(1, 1), q(0, 1)], &d, &TrackParams::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidRegion));
    }
}
