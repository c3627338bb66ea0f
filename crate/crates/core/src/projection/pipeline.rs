use std::collections::{HashMap, HashSet, VecDeque};

use rug::Rational;

use super::check::{chain_half_space, check, positions, refine_keys, Budget, Cache, ChainHalfSpace};
use super::{CheckOutcome, CrossingRectangles, ProjectionMap};
use crate::error::Result;
use crate::interval::{intersecting_pairs, IntervalVector};
use crate::polysys::PolySystem;
use crate::tracker::{track_curve, ArcKey, Closure, Domain, TrackParams, TubularNeighborhood};

/// A certified transverse self-intersection of the projected curve.
#[derive(Debug, Clone)]
pub struct Crossing {
    /// Box containing the crossing point.
    pub enclosure: IntervalVector,
    pub rectangles: CrossingRectangles,
    /// Tubes of each branch meeting its rectangle, in the final neighborhood.
    pub tubes: [Vec<usize>; 2],
    pub arcs: [Vec<ArcKey>; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exclusion {
    /// The arc joining the two tubes satisfies the half-space condition.
    HalfSpace,
    /// After refinement no pieces of the two tubes meet in the plane.
    Disjoint,
}

#[derive(Debug, Clone)]
pub struct ExcludedPair {
    pub keys: [ArcKey; 2],
    pub reason: Exclusion,
}

#[derive(Debug, Clone, Default)]
pub struct CrossingReport {
    pub crossings: Vec<Crossing>,
    pub excluded: Vec<ExcludedPair>,
    /// Pairs sent back to the queue after a failed crossing check.
    pub not_confirmed: usize,
    /// Segments re-tracked while resolving the queue.
    pub refinements: usize,
    /// Pairs of tubes whose projections met before any refinement.
    pub initial_pairs: usize,
}

/// Algorithm 4 followed by [`project_neighborhood`].
pub fn certified_plane_curve(
    system: &PolySystem,
    start: &[Rational],
    domain: &Domain,
    m: &ProjectionMap,
    params: &TrackParams,
) -> Result<(TubularNeighborhood, CrossingReport)> {
    if m.nvars() != system.nvars() {
        return Err(crate::error::Error::DimensionMismatch {
            expected: system.nvars(),
            found: m.nvars(),
        });
    }
    let mut nbhd = track_curve(system, start, domain, params)?;
    let report = project_neighborhood(&mut nbhd, m)?;
    Ok((nbhd, report))
}

type Pair = (ArcKey, ArcKey);

struct Queue<'a> {
    m: &'a ProjectionMap,
    cache: Cache,
    budget: Budget,
    /// Pairs that are never reconsidered, in both orders.
    settled: HashSet<Pair>,
    settled_list: Vec<Pair>,
    confirmed: Vec<Crossing>,
    pending: VecDeque<Pair>,
    keys: HashSet<ArcKey>,
    pos: HashMap<ArcKey, usize>,
}

/// Algorithm 6 on an already tracked neighborhood. Refines `nbhd` in place
/// until every pair of tubes whose projections meet is either excluded or
/// part of a certified crossing.
pub fn project_neighborhood(nbhd: &mut TubularNeighborhood, m: &ProjectionMap) -> Result<CrossingReport> {
    let mut q = Queue {
        m,
        cache: Cache::default(),
        budget: Budget::new(4 * nbhd.len() + 4096),
        settled: HashSet::new(),
        settled_list: Vec::new(),
        confirmed: Vec::new(),
        pending: VecDeque::new(),
        keys: HashSet::new(),
        pos: HashMap::new(),
    };
    let mut report = CrossingReport::default();
    q.rebuild(nbhd)?;
    report.initial_pairs = q.pending.len();
    let period = nbhd.period().cloned();

    while let Some((ka, kb)) = q.pending.pop_front() {
        let (i, j) = (q.pos[&ka], q.pos[&kb]);
        match q.arc_half_space(nbhd, i, j)? {
            ChainHalfSpace::Holds => {
                q.settle(&ka, &kb);
                report.excluded.push(ExcludedPair {
                    keys: [ka, kb],
                    reason: Exclusion::HalfSpace,
                });
                continue;
            }
            ChainHalfSpace::Degenerate(k) => {
                let key = nbhd.tubes()[k].key.clone();
                refine_keys(nbhd, &HashSet::from([key]), &mut q.budget)?;
                q.rebuild(nbhd)?;
                continue;
            }
            ChainHalfSpace::Fails => {}
        }
        match check(nbhd, m, i, j, &mut q.cache, &mut q.budget)? {
            CheckOutcome::Confirmed {
                rectangles,
                enclosure,
                arcs,
            } => {
                q.settle(&ka, &kb);
                let duplicate = q.confirmed.iter().any(|c| {
                    c.rectangles.rectangles.iter().all(|r| r.contains_box(&enclosure))
                        && arcs.iter().flatten().any(|k| {
                            c.arcs.iter().flatten().any(|o| k.overlaps(o, period.as_ref()))
                        })
                });
                if !duplicate {
                    q.confirmed.push(Crossing {
                        enclosure,
                        rectangles,
                        tubes: [Vec::new(), Vec::new()],
                        arcs,
                    });
                    let kept: VecDeque<Pair> = std::mem::take(&mut q.pending)
                        .into_iter()
                        .filter(|(a, b)| !q.inside_last_crossing(nbhd, a, b))
                        .collect();
                    q.pending = kept;
                }
            }
            CheckOutcome::NotConfirmed(_) => {
                report.not_confirmed += 1;
                q.rebuild(nbhd)?;
                let alive = q.pending.iter().chain(q.settled_list.iter()).any(|(a, b)| {
                    (a.overlaps(&ka, period.as_ref()) && b.overlaps(&kb, period.as_ref()))
                        || (a.overlaps(&kb, period.as_ref()) && b.overlaps(&ka, period.as_ref()))
                });
                if !alive {
                    q.settle(&ka, &kb);
                    report.excluded.push(ExcludedPair {
                        keys: [ka, kb],
                        reason: Exclusion::Disjoint,
                    });
                }
            }
        }
    }

    report.refinements = q.budget.refinements;
    for mut c in q.confirmed {
        for k in 0..2 {
            c.tubes[k] = (0..nbhd.len())
                .filter(|&i| c.arcs[k].iter().any(|a| nbhd.tubes()[i].key.overlaps(a, period.as_ref())))
                .collect();
        }
        report.crossings.push(c);
    }
    Ok(report)
}

impl Queue<'_> {
    fn settle(&mut self, a: &ArcKey, b: &ArcKey) {
        self.settled.insert((a.clone(), b.clone()));
        self.settled.insert((b.clone(), a.clone()));
        self.settled_list.push((a.clone(), b.clone()));
    }

    /// Replaces the queue by every pair of tubes whose projections meet and
    /// that is not settled or inside a certified crossing.
    fn rebuild(&mut self, nbhd: &TubularNeighborhood) -> Result<()> {
        let period = nbhd.period().cloned();
        let boxes = (0..nbhd.len())
            .map(|i| self.cache.projection(nbhd, self.m, i))
            .collect::<Result<Vec<_>>>()?;
        let fresh: Vec<bool> = nbhd.tubes().iter().map(|t| !self.keys.contains(&t.key)).collect();
        let mut pairs = Vec::new();
        for (i, j) in intersecting_pairs(&boxes) {
            let (a, b) = (&nbhd.tubes()[i].key, &nbhd.tubes()[j].key);
            if self.settled.contains(&(a.clone(), b.clone())) {
                continue;
            }
            if (fresh[i] || fresh[j])
                && self.settled_list.iter().any(|(x, y)| {
                    (a.within(x, period.as_ref()) && b.within(y, period.as_ref()))
                        || (a.within(y, period.as_ref()) && b.within(x, period.as_ref()))
                })
            {
                continue;
            }
            let inside = self.confirmed.iter().any(|c| inside(&c.rectangles, &boxes[i], &boxes[j]));
            if !inside {
                pairs.push((i, j));
            }
        }
        pairs.sort_by_key(|&(i, j)| (i.min(j), i.max(j)));
        self.pending = pairs
            .into_iter()
            .map(|(i, j)| (nbhd.tubes()[i].key.clone(), nbhd.tubes()[j].key.clone()))
            .collect();
        self.keys = nbhd.tubes().iter().map(|t| t.key.clone()).collect();
        self.pos = positions(nbhd);
        Ok(())
    }

    fn inside_last_crossing(&mut self, nbhd: &TubularNeighborhood, a: &ArcKey, b: &ArcKey) -> bool {
        let c = self.confirmed.last().expect("just pushed");
        let ba = self.cache.projection(nbhd, self.m, self.pos[a]);
        let bb = self.cache.projection(nbhd, self.m, self.pos[b]);
        match (ba, bb) {
            (Ok(ba), Ok(bb)) => inside(&c.rectangles, &ba, &bb),
            _ => false,
        }
    }

    /// Half-space condition on the arc from tube `i` to tube `j`, trying
    /// both ways around a closed chain.
    fn arc_half_space(&mut self, nbhd: &mut TubularNeighborhood, i: usize, j: usize) -> Result<ChainHalfSpace> {
        let (i, j) = (i.min(j), i.max(j));
        let n = nbhd.len();
        let direct = chain_half_space(nbhd, &mut self.cache, self.m, i..=j)?;
        if nbhd.closure() == Closure::Open || !matches!(direct, ChainHalfSpace::Fails) {
            return Ok(direct);
        }
        chain_half_space(nbhd, &mut self.cache, self.m, (j..n).chain(0..=i))
    }
}

/// Both boxes lie in the crossing's rectangles, one in each.
fn inside(c: &CrossingRectangles, a: &IntervalVector, b: &IntervalVector) -> bool {
    let [r1, r2] = &c.rectangles;
    (r1.contains_box(a) && r2.contains_box(b)) || (r2.contains_box(a) && r1.contains_box(b))
}
