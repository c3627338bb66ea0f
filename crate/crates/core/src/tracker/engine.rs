use std::ops::Range;
use std::sync::Arc;

use rug::{Float, Rational};

use super::predict::{newton_on_slice, predict};
use super::{
    stopping_criterion, unitary_transformation, ArcKey, Closure, Domain, Frame, Link, StopDecision,
    TrackParams, TrackStats, Tube, TubularNeighborhood,
};
use crate::certify::{initial_certificate, krawczyk_test, refine_solution, slice_inverse, Certificate};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalVector, Precision};
use crate::polysys::{CompiledSystem, PolySystem, RotatedSystem, SlicedSystem};

/// Upper bound on the number of tighter refinements tried before a rotation.
const ROTATION_ATTEMPTS: u32 = 30;
const MIN_STEP_LOG2: i32 = -40;

/// Why an attempt was abandoned.
#[derive(Debug)]
pub(super) enum Abort {
    /// Retry with halved `rho`.
    Restart(String),
    /// Retry at twice the precision.
    Escalate(String),
    Fatal(Error),
}

impl From<Error> for Abort {
    fn from(e: Error) -> Self {
        match e {
            Error::PrecisionNeeded { reason, .. } => Abort::Escalate(reason),
            Error::SingularMidpoint
            | Error::RankDeficient
            | Error::TangentVertical
            | Error::AllMinorsDegenerate
            | Error::DivisionByIntervalContainingZero => Abort::Restart(e.to_string()),
            other => Abort::Fatal(other),
        }
    }
}

type Step<T> = std::result::Result<T, Abort>;

enum Goal<'a> {
    /// Until the curve leaves the domain or, if allowed, closes up.
    Full { allow_closure: bool },
    /// Until a tube contains the given link.
    Reach(&'a Link),
}

enum Ending {
    Exited(Link),
    Closed { seam: usize, link: Link },
    Reached,
}

struct Walk {
    tubes: Vec<Tube>,
    /// `links_in[i]` lies in tube `i` and in the tube before it.
    links_in: Vec<Link>,
    ending: Ending,
}

/// Where the walk currently stands: a refined base point in some frame.
struct State {
    rot: RotatedSystem,
    frame: Frame,
    cert: Certificate,
}

struct Stepper<'a> {
    base: Arc<CompiledSystem>,
    domain: &'a Domain,
    params: &'a TrackParams,
    rho: Rational,
    iterations: usize,
    rejected: usize,
    tests: usize,
}

impl<'a> Stepper<'a> {
    fn new(base: Arc<CompiledSystem>, domain: &'a Domain, params: &'a TrackParams, rho: Rational) -> Self {
        Stepper {
            base,
            domain,
            params,
            rho,
            iterations: 0,
            rejected: 0,
            tests: 0,
        }
    }

    fn bits(&self) -> u32 {
        self.base.precision().bits()
    }

    fn prec(&self) -> Precision {
        self.base.precision()
    }

    fn nvars(&self) -> usize {
        self.base.nvars()
    }

    /// Frame and `rho`-certificate at a point given in original coordinates.
    fn start_state(&mut self, x: &[Float], prefer: Option<&[Float]>) -> Step<State> {
        let (rot, x_hat, frame) = unitary_transformation(&self.base, x, prefer)?;
        let cert0 = initial_certificate(&rot, &x_hat, &self.params.radius, &self.rho)?;
        let cert = refine_solution(&rot, &cert0, &self.rho)?;
        Ok(State { rot, frame, cert })
    }

    /// Tight box around the root of the slice at `level` near `guess`.
    fn certify_link(
        &mut self,
        state_rot: &RotatedSystem,
        frame: &Frame,
        guess: &[Float],
        level: &Float,
        radius: &Rational,
    ) -> Step<Option<Link>> {
        let prec = self.prec();
        let level_iv = Interval::point(level.clone()).with_precision(prec);
        let w = newton_on_slice(state_rot, guess, level, None).unwrap_or_else(|| guess.to_vec());
        let center = IntervalVector::from_points(&w).with_precision(prec);
        let a = match slice_inverse(state_rot, &center, &level_iv) {
            Ok(a) => a,
            Err(Error::SingularMidpoint) => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let sliced = SlicedSystem::new(state_rot, level_iv.clone());
        let half = Rational::from((1, 2));
        for shift in [12u32, 6, 0] {
            let r = Rational::from(radius >> shift);
            self.tests += 1;
            if krawczyk_test(&sliced, &center, &r, &a, &half)?.passed {
                let s = Interval::from_rational(&Rational::from(&r * &half), prec);
                let mut b: IntervalVector = center.iter().map(|c| c + &(&s * &Interval::unit(prec))).collect();
                b.push(level_iv);
                let mut full = w.clone();
                full.push(level.clone());
                let point = frame.to_original(&IntervalVector::from_points(&full))?.midpoint();
                return Ok(Some(Link {
                    point,
                    region: frame.to_original(&b)?,
                }));
            }
        }
        Ok(None)
    }

    /// Builds the tube at the state's base point, shrinking `h` until the
    /// Krawczyk test passes over the whole tube.
    fn build_tube(&mut self, state: &State, link_in: &Link, h: &mut Float, key: ArcKey) -> Step<Tube> {
        let prec = self.prec();
        let bits = self.bits();
        let n = self.nvars();
        let x_hat = state.cert.point();
        let level = x_hat[n - 1].clone();
        let r = state.cert.radius.clone();
        let rho_r = Interval::from_rational(&Rational::from(&r * &self.rho), prec).hi().clone();
        let link_hat = state.frame.to_frame(&link_in.region)?;
        let need = Float::with_val_round(bits, &level - link_hat.last().lo(), rug::float::Round::Up).0;
        let b = if need > rho_r { need } else { rho_r };
        let min_step = Float::with_val(bits, 1) << MIN_STEP_LOG2;
        loop {
            if *h < min_step {
                return Err(Abort::Restart("step size underflow".into()));
            }
            let pred = predict(&state.rot, &x_hat, h, self.params.predictor)?;
            let span = Interval::new(Float::with_val(bits, -&b), h.clone()).expect("b >= 0 < h");
            let slab = &Interval::point(level.clone()).with_precision(prec) + &span;
            let cert = Certificate {
                center: pred.span_box().with_precision(prec),
                slice: slab.clone(),
                radius: r.clone(),
                a: state.cert.a.clone(),
                rho: self.params.tau.clone(),
            };
            self.tests += 1;
            if cert.verify(&state.rot)?.passed {
                let mut rotated = cert.ball();
                rotated.push(slab);
                if !link_hat.is_subset(&rotated) {
                    return Err(Abort::Restart("incoming link outside tube".into()));
                }
                let region = state.frame.to_original(&rotated)?;
                return Ok(Tube {
                    frame: state.frame.clone(),
                    rotated,
                    region,
                    certificate: cert,
                    predictor: pred,
                    base: x_hat,
                    step: h.clone(),
                    backward: b,
                    rho: self.rho.clone(),
                    reversed: false,
                    key,
                });
            }
            self.rejected += 1;
            *h >>= 1;
        }
    }

    /// Builds the next tube and refines its exit point in the current frame.
    /// A step whose exit cannot be refined to `rho` (the curve already leans
    /// too far from the frame's last axis) is halved like a failed tube.
    fn step(&mut self, state: &State, link_in: &Link, h: &mut Float, key: ArcKey) -> Step<(Tube, Certificate, Link)> {
        let prec = self.prec();
        let bits = self.bits();
        loop {
            let tube = self.build_tube(state, link_in, h, key.clone())?;
            let exit_level = Float::with_val(bits, tube.predictor.level() + tube.predictor.step());
            let exit = Certificate {
                center: IntervalVector::from_points(tube.predictor.end()).with_precision(prec),
                slice: Interval::point(exit_level).with_precision(prec),
                radius: tube.certificate.radius.clone(),
                a: tube.certificate.a.clone(),
                rho: self.params.tau.clone(),
            };
            let refined = match refine_solution(&state.rot, &exit, &self.rho) {
                Ok(c) => Some(c),
                Err(Error::PrecisionNeeded { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            // The link sits just inside the top face so that rounding in the
            // change of frame cannot push it out.
            let eta = Float::with_val(bits, &*h - Float::with_val(bits, &*h >> 6));
            let link_level = Float::with_val(bits, tube.predictor.level() + &eta);
            let guess = tube.predictor.eval(&eta);
            let link = self
                .certify_link(&state.rot, &state.frame, &guess, &link_level, &tube.certificate.radius)?
                .filter(|l| tube.contains_link(l).unwrap_or(false));
            if let (Some(refined), Some(link)) = (refined, link) {
                return Ok((tube, refined, link));
            }
            self.rejected += 1;
            *h >>= 1;
        }
    }

    /// Lines 6 to 14 of the stepping loop, starting from the exit point
    /// already refined to `rho`: tighten it until it stays certified after
    /// rotating, then refine it in the new frame.
    fn advance(&mut self, state: &State, refined: Certificate) -> Step<State> {
        let prec = self.prec();
        let n = self.nvars();
        let prefer = state.frame.tangent();
        let mut c = refined;
        for m in 0..ROTATION_ATTEMPTS {
            if m > 0 {
                let tol = Rational::from(&self.rho >> m);
                c = self.tighten(&state.rot, &c, &tol)?;
            }
            let x = state.frame.to_original(&IntervalVector::from_points(&c.point()))?.midpoint();
            let (rot, xt, frame) = unitary_transformation(&self.base, &x, Some(&prefer))?;
            let center = IntervalVector::from_points(&xt[..n - 1]).with_precision(prec);
            let level = Interval::point(xt[n - 1].clone()).with_precision(prec);
            let a = slice_inverse(&rot, &center, &level)?;
            self.tests += 1;
            let sliced = SlicedSystem::new(&rot, level.clone());
            if krawczyk_test(&sliced, &center, &c.radius, &a, &self.rho)?.passed {
                let start = Certificate {
                    center,
                    slice: level,
                    radius: c.radius.clone(),
                    a,
                    rho: self.rho.clone(),
                };
                let cert = refine_solution(&rot, &start, &self.rho)?;
                return Ok(State { rot, frame, cert });
            }
        }
        Err(Abort::Escalate("rotation keeps breaking the certificate".into()))
    }

    /// Refinement of `c` to `tol` on its own level only. A slab around the
    /// level cannot reach a tolerance below the slope of the curve in the
    /// old frame.
    fn tighten(&mut self, rot: &RotatedSystem, c: &Certificate, tol: &Rational) -> Step<Certificate> {
        let prec = self.prec();
        let level = c.slice.mid();
        let level_iv = Interval::point(level.clone()).with_precision(prec);
        let guess = c.center.midpoint();
        let w = newton_on_slice(rot, &guess, &level, None).unwrap_or(guess);
        let center = IntervalVector::from_points(&w).with_precision(prec);
        let a = slice_inverse(rot, &center, &level_iv)?;
        let sliced = SlicedSystem::new(rot, level_iv.clone());
        let floor = Rational::from(1) >> self.bits().saturating_sub(20);
        let mut r = c.radius.clone();
        loop {
            self.tests += 1;
            if krawczyk_test(&sliced, &center, &r, &a, tol)?.passed {
                return Ok(Certificate {
                    center,
                    slice: level_iv,
                    radius: r,
                    a,
                    rho: tol.clone(),
                });
            }
            r >>= 1u32;
            if r < floor {
                return Err(Abort::Escalate(format!("exit point stalled at radius {}", r.to_f64())));
            }
        }
    }

    /// Follows the curve from `start` in the direction closest to `prefer`.
    /// Tubes of `others` (a chain continuing backwards from `start`) are
    /// checked for overlap with the new ones.
    fn walk(
        &mut self,
        start: &[Float],
        start_link: Option<Link>,
        prefer: Option<&[Float]>,
        goal: Goal<'_>,
        others: &[Tube],
    ) -> Step<Walk> {
        let n = self.nvars();
        let bits = self.bits();
        let mut state = self.start_state(start, prefer)?;
        let mut link_in = match start_link {
            Some(l) => l,
            None => {
                let p = state.cert.point();
                self.certify_link(&state.rot, &state.frame, &p[..n - 1], &p[n - 1], &state.cert.radius)?
                    .ok_or_else(|| Abort::Restart("start point could not be certified".into()))?
            }
        };
        let allow_closure = matches!(goal, Goal::Full { allow_closure: true });
        let mut h = Float::with_val(bits, &self.params.step);
        let one = Float::with_val(bits, 1);
        let mut tubes: Vec<Tube> = Vec::new();
        let mut links_in: Vec<Link> = Vec::new();
        loop {
            if tubes.len() >= self.params.max_tubes {
                return Err(Abort::Fatal(Error::StepBudgetExceeded(self.params.max_tubes)));
            }
            self.iterations += 1;
            let k = tubes.len();
            let key = ArcKey {
                lo: Rational::from(k),
                len: Rational::from(1),
            };
            let (tube, refined_exit, exit_link) = self.step(&state, &link_in, &mut h, key)?;
            for (i, old) in tubes.iter().enumerate() {
                if k - i > 2 && !(allow_closure && i <= 2) && !tube.disjoint_from(old)? {
                    return Err(Abort::Restart(format!("tubes {i} and {k} overlap")));
                }
            }
            for (j, other) in others.iter().enumerate() {
                if k + j + 1 > 2 && !tube.disjoint_from(other)? {
                    return Err(Abort::Restart(format!("tube {k} meets tube {j} of the other branch")));
                }
            }
            tubes.push(tube);
            links_in.push(link_in);
            let tube = tubes.last().expect("just pushed");

            if let Goal::Reach(target) = goal {
                if tube.contains_link(target)? {
                    return Ok(Walk {
                        tubes,
                        links_in,
                        ending: Ending::Reached,
                    });
                }
            }

            if let Goal::Full { allow_closure } = goal {
                match stopping_criterion(self.domain, &tubes, &exit_link, allow_closure)? {
                    StopDecision::ExitedDomain => {
                        return Ok(Walk {
                            tubes,
                            links_in,
                            ending: Ending::Exited(exit_link),
                        })
                    }
                    StopDecision::Closed { seam } => {
                        return Ok(Walk {
                            tubes,
                            links_in,
                            ending: Ending::Closed { seam, link: exit_link },
                        })
                    }
                    StopDecision::Continue | StopDecision::NeedRefine => {}
                }
            }

            h = Float::with_val(bits, &h * 5u32) >> 2;
            if h > one {
                h = one.clone();
            }
            state = self.advance(&state, refined_exit)?;
            link_in = exit_link;
        }
    }
}

fn float_point(x: &[Rational], prec: Precision) -> Vec<Float> {
    x.iter().map(|q| Float::with_val(prec.bits(), q)).collect()
}

/// One attempt at fixed `rho` and precision.
fn attempt(
    system: &PolySystem,
    start: &[Rational],
    domain: &Domain,
    params: &TrackParams,
    rho: &Rational,
    prec: Precision,
    stats: &mut TrackStats,
) -> Step<TubularNeighborhood> {
    let base = Arc::new(system.compile(prec));
    let mut stepper = Stepper::new(base.clone(), domain, params, rho.clone());
    let result = run(&mut stepper, &float_point(start, prec));
    stats.total_iterations += stepper.iterations + stepper.rejected;
    stats.rejected_steps += stepper.rejected;
    stats.krawczyk_tests += stepper.tests;
    let (tubes, links, closure) = result?;

    let period = (closure == Closure::Closed).then(|| Rational::from(tubes.len()));
    let mut compiled = std::collections::BTreeMap::new();
    compiled.insert(prec.bits(), base);
    let mut nbhd = TubularNeighborhood {
        system: system.clone(),
        domain: domain.clone(),
        params: params.clone(),
        tubes,
        links,
        closure,
        period,
        stats: TrackStats::default(),
        rho: rho.clone(),
        precision: prec,
        compiled,
    };
    if !nbhd.check_chain()? {
        return Err(Abort::Restart("chain links not contained in their tubes".into()));
    }
    if let Some((i, j)) = nbhd.find_overlap()? {
        return Err(Abort::Restart(format!("tubes {i} and {j} overlap")));
    }
    stats.iterations = stepper.iterations + stepper.rejected;
    nbhd.stats = stats.clone();
    Ok(nbhd)
}

fn run(stepper: &mut Stepper<'_>, start: &[Float]) -> Step<(Vec<Tube>, Vec<Link>, Closure)> {
    let fwd = stepper.walk(start, None, None, Goal::Full { allow_closure: true }, &[])?;
    let Walk {
        tubes: mut ftubes,
        links_in: mut flinks,
        ending,
    } = fwd;
    let exit_f = match ending {
        Ending::Closed { seam, link } => {
            ftubes.drain(..seam);
            flinks.drain(..seam);
            flinks[0] = link;
            for (i, t) in ftubes.iter_mut().enumerate() {
                t.key = ArcKey {
                    lo: Rational::from(i),
                    len: Rational::from(1),
                };
            }
            return Ok((ftubes, flinks, Closure::Closed));
        }
        Ending::Exited(link) => link,
        Ending::Reached => unreachable!("no target in a full walk"),
    };

    let start_link = flinks[0].clone();
    let back: Vec<Float> = ftubes[0].frame.tangent().into_iter().map(|x| -x).collect();
    let bwd = stepper.walk(
        &start_link.point,
        Some(start_link.clone()),
        Some(&back),
        Goal::Full { allow_closure: false },
        &ftubes,
    )?;
    let exit_b = match bwd.ending {
        Ending::Exited(link) => link,
        _ => return Err(Abort::Restart("backward branch did not leave the domain".into())),
    };

    let mut tubes: Vec<Tube> = bwd
        .tubes
        .into_iter()
        .rev()
        .map(|mut t| {
            t.reversed = true;
            t
        })
        .collect();
    tubes.extend(ftubes);
    for (i, t) in tubes.iter_mut().enumerate() {
        t.key = ArcKey {
            lo: Rational::from(i),
            len: Rational::from(1),
        };
    }
    let mut links = vec![exit_b];
    links.extend(bwd.links_in.into_iter().skip(1).rev());
    links.push(start_link);
    links.extend(flinks.into_iter().skip(1));
    links.push(exit_f);
    Ok((tubes, links, Closure::Open))
}

pub(super) fn track(
    system: &PolySystem,
    start: &[Rational],
    domain: &Domain,
    params: &TrackParams,
) -> Result<TubularNeighborhood> {
    let mut rho = params.rho.clone();
    let mut prec = params.precision;
    let mut stats = TrackStats::default();
    loop {
        let out = attempt(system, start, domain, params, &rho, prec, &mut stats);
        match out {
            Ok(n) => return Ok(n),
            Err(Abort::Fatal(e)) => return Err(e),
            Err(Abort::Restart(reason)) => {
                if stats.restarts >= params.max_restarts {
                    return Err(Error::MaxRestarts { rho: rho.to_string(), reason });
                }
                stats.restarts += 1;
                rho >>= 1u32;
            }
            Err(Abort::Escalate(_)) => match prec.escalate().filter(|p| *p <= params.max_precision) {
                Some(p) => {
                    stats.escalations += 1;
                    prec = p;
                }
                None => return Err(Error::PrecisionExhausted { bits: prec.bits() }),
            },
        }
    }
}

pub(super) fn refine_segment(
    nbhd: &mut TubularNeighborhood,
    from: usize,
    to: usize,
    rho: &Rational,
) -> Result<Range<usize>> {
    let len = nbhd.tubes.len();
    let closed = nbhd.closure == Closure::Closed;
    if from >= len || to >= len || (!closed && from > to) || (closed && from > to && from == to + 1) {
        return Err(Error::InvalidParameter(format!("segment {from}..={to} of {len} tubes")));
    }
    if *rho <= 0 || *rho >= 1 {
        return Err(Error::InvalidParameter(format!("rho = {rho} outside (0, 1)")));
    }
    let mut rho = rho.clone();
    let mut prec = nbhd.tubes[from].precision();
    let mut restarts = 0;
    loop {
        let base = nbhd.compiled(prec);
        let outcome = retrack(nbhd, base, from, to, &rho);
        match outcome {
            Ok(Some(range)) => return Ok(range),
            Ok(None) | Err(Abort::Restart(_)) if restarts < nbhd.params.max_restarts => {
                restarts += 1;
                rho >>= 1u32;
            }
            Ok(None) => {
                return Err(Error::MaxRestarts {
                    rho: rho.to_string(),
                    reason: "re-tracked segment overlaps the chain".into(),
                })
            }
            Err(Abort::Restart(reason)) => return Err(Error::MaxRestarts { rho: rho.to_string(), reason }),
            Err(Abort::Escalate(reason)) => match prec.escalate() {
                Some(p) => prec = p,
                None => {
                    return Err(Error::PrecisionNeeded {
                        bits: prec.bits(),
                        reason,
                    })
                }
            },
            Err(Abort::Fatal(e)) => return Err(e),
        }
    }
}

/// Replaces the segment; `None` when the result fails validation, in which
/// case the neighborhood is left unchanged.
fn retrack(
    nbhd: &mut TubularNeighborhood,
    base: Arc<CompiledSystem>,
    from: usize,
    to: usize,
    rho: &Rational,
) -> Step<Option<Range<usize>>> {
    let len = nbhd.tubes.len();
    let start_link = nbhd.links[from].clone();
    let target = nbhd.links[(to + 1) % nbhd.links.len()].clone();
    let prefer = nbhd.tubes[from].chain_tangent();
    let budget = 64 * (len + 1) + 1000;
    let params = TrackParams {
        max_tubes: budget.min(nbhd.params.max_tubes),
        ..nbhd.params.clone()
    };
    let domain = nbhd.domain.clone();
    let mut stepper = Stepper::new(base, &domain, &params, rho.clone());
    let start_point = start_link.point.clone();
    let walk = match stepper.walk(&start_point, Some(start_link), Some(&prefer), Goal::Reach(&target), &[]) {
        Err(Abort::Fatal(Error::StepBudgetExceeded(n))) => {
            return Err(Abort::Fatal(Error::RefinementBudgetExceeded(format!(
                "segment not closed after {n} tubes"
            ))))
        }
        other => other?,
    };

    let old_keys: Vec<&ArcKey> = if from <= to {
        nbhd.tubes[from..=to].iter().map(|t| &t.key).collect()
    } else {
        nbhd.tubes[from..].iter().chain(&nbhd.tubes[..=to]).map(|t| &t.key).collect()
    };
    let total = old_keys.iter().fold(Rational::new(), |acc, k| acc + &k.len);
    let lo0 = old_keys[0].lo.clone();
    let m = walk.tubes.len();
    let piece = &total / Rational::from(m) ;
    let mut new_tubes = walk.tubes;
    for (i, t) in new_tubes.iter_mut().enumerate() {
        let mut lo = &lo0 + (&piece * Rational::from(i)) ;
        if let Some(p) = &nbhd.period {
            while lo >= *p {
                lo -= p;
            }
        }
        t.key = ArcKey { lo, len: piece.clone() };
    }

    let (tubes, links, range) = if from <= to {
        let mut tubes = nbhd.tubes[..from].to_vec();
        tubes.extend(new_tubes);
        tubes.extend_from_slice(&nbhd.tubes[to + 1..]);
        let mut links = nbhd.links[..from].to_vec();
        links.extend(walk.links_in);
        links.extend_from_slice(&nbhd.links[to + 1..]);
        (tubes, links, from..from + m)
    } else {
        let mut tubes = nbhd.tubes[to + 1..from].to_vec();
        let kept = tubes.len();
        tubes.extend(new_tubes);
        let mut links = nbhd.links[to + 1..from].to_vec();
        links.extend(walk.links_in);
        (tubes, links, kept..kept + m)
    };
    debug_assert_eq!(links.len(), tubes.len() + usize::from(nbhd.closure == Closure::Open));

    let old_tubes = std::mem::replace(&mut nbhd.tubes, tubes);
    let old_links = std::mem::replace(&mut nbhd.links, links);
    let valid = nbhd.check_chain()? && nbhd.find_overlap()?.is_none();
    if !valid {
        nbhd.tubes = old_tubes;
        nbhd.links = old_links;
        return Ok(None);
    }
    Ok(Some(range))
}

#[cfg(test)]
mod tests {
    use super::super::track_curve;
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn circle() -> PolySystem {
        PolySystem::parse(&["x^2 + y^2 - 1"], &["x", "y"]).unwrap()
    }

    #[test]
    fn circle_is_closed() {
        let d = Domain::cube(2, 2).unwrap();
        let mut nb = track_curve(&circle(), &[q(3, 5), q(4, 5)], &d, &TrackParams::default()).unwrap();
        assert!(nb.is_closed());
        assert!(nb.len() >= 8, "{}", nb.len());
        assert_eq!(nb.links().len(), nb.len());
        assert!(nb.check_chain().unwrap());
        assert!(nb.find_overlap().unwrap().is_none());
        assert!(nb.verify_certificates().unwrap());
        for k in 0..32 {
            let t = std::f64::consts::TAU * k as f64 / 32.0;
            let p = [Float::with_val(64, t.cos()), Float::with_val(64, t.sin())];
            assert!(nb.contains_point(&p), "angle {t}");
        }
    }

    #[test]
    fn line_is_open_and_leaves_domain() {
        let s = PolySystem::parse(&["x - y"], &["x", "y"]).unwrap();
        let d = Domain::cube(2, 1).unwrap();
        let nb = track_curve(&s, &[q(0, 1), q(0, 1)], &d, &TrackParams::default()).unwrap();
        assert!(!nb.is_closed());
        assert_eq!(nb.links().len(), nb.len() + 1);
        assert!(d.excludes(&nb.links()[0].region));
        assert!(d.excludes(&nb.links()[nb.len()].region));
        assert!(nb.check_chain().unwrap());
    }

    #[test]
    fn refining_a_segment_keeps_the_chain() {
        let d = Domain::cube(2, 2).unwrap();
        let mut nb = track_curve(&circle(), &[q(1, 1), q(0, 1)], &d, &TrackParams::default()).unwrap();
        let before = nb.len();
        let range = nb.refine_segment(1, 2, &q(1, 64)).unwrap();
        assert!(!range.is_empty());
        assert!(nb.check_chain().unwrap());
        assert!(nb.find_overlap().unwrap().is_none());
        assert!(nb.verify_certificates().unwrap());
        assert!(nb.len() + 2 >= before + range.len());
    }
}
