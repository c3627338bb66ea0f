use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use rug::{Float, Rational};

use super::geometry::Rectangle;
use super::{half_space_condition, tangent_cone, HalfPlane, ProjectionMap, TangentCone};
use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalVector};
use crate::tracker::{ArcKey, Closure, TubularNeighborhood};

/// Doublings of the rectangle length after the initial `8 r`.
const LENGTH_DOUBLINGS: u32 = 4;
/// Rounds of local refinement before a check gives up.
const SHRINK_ROUNDS: usize = 24;

/// Data of a certified crossing.
#[derive(Debug, Clone)]
pub struct CrossingRectangles {
    /// Center of both rectangles.
    pub p: [Float; 2],
    /// Approximate projected tangents of the two branches.
    pub v: [[Float; 2]; 2],
    /// Half width of both rectangles.
    pub r: Float,
    pub rectangles: [Rectangle; 2],
    /// First and last tube of each chain through its rectangle, at the time
    /// of the check.
    pub chains: [(usize, usize); 2],
}

/// Why a pair was not confirmed. Every rejection refines the tubes involved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    /// A tangent cone contains the zero vector.
    ZeroInCone,
    /// The projected tangents of the two tubes may be parallel.
    ParallelTangents,
    /// The short ends still meet the other rectangle at the longest length.
    RectanglesTooShort,
    /// A chain ends or closes up inside its rectangle.
    ChainEnd,
    /// A chain may leave its rectangle through a long side.
    LateralSide,
    /// A chain fails the half-space condition.
    HalfSpace,
    /// Tangent cones of the two chains may contain parallel vectors.
    ParallelKernels,
    /// Both chains share a tube.
    SharedTubes,
    /// The chains' projections do not meet inside both rectangles.
    NoOverlap,
}

#[derive(Debug, Clone)]
pub enum CheckOutcome {
    /// Exactly one transverse crossing of the two branches lies in the
    /// intersection of the rectangles, inside `enclosure`.
    Confirmed {
        rectangles: CrossingRectangles,
        enclosure: IntervalVector,
        /// Keys of the tubes of each chain that meet its rectangle.
        arcs: [Vec<ArcKey>; 2],
    },
    /// The neighborhood has been refined around the pair.
    NotConfirmed(Rejection),
}

/// Projected boxes and tangent cones. A re-tracked tube always has a smaller
/// `rho` than the tubes it replaces, so key and `rho` identify it.
#[derive(Default)]
pub(crate) struct Cache {
    boxes: HashMap<(ArcKey, Rational), IntervalVector>,
    cones: HashMap<(ArcKey, Rational), Option<TangentCone>>,
}

fn id(nbhd: &TubularNeighborhood, i: usize) -> (ArcKey, Rational) {
    let t = &nbhd.tubes()[i];
    (t.key.clone(), t.rho.clone())
}

impl Cache {
    /// `pi(V Y) ∩ pi(region)` for the tube.
    pub(crate) fn projection(&mut self, nbhd: &TubularNeighborhood, m: &ProjectionMap, i: usize) -> Result<IntervalVector> {
        let tube = &nbhd.tubes()[i];
        let id = id(nbhd, i);
        if let Some(b) = self.boxes.get(&id) {
            return Ok(b.clone());
        }
        let mv = m.matrix(tube.precision()).mul(&tube.frame.v)?;
        let direct = mv.mul_vec(&tube.rotated)?;
        let hull = m.apply(&tube.region)?;
        let b = direct.intersection(&hull).unwrap_or(hull);
        self.boxes.insert(id, b.clone());
        Ok(b)
    }

    /// `None` when the cone contains the zero vector.
    pub(crate) fn cone(&mut self, nbhd: &mut TubularNeighborhood, m: &ProjectionMap, i: usize) -> Result<Option<TangentCone>> {
        let key = id(nbhd, i);
        if let Some(c) = self.cones.get(&key) {
            return Ok(c.clone().map(|c| TangentCone { source: i, ..c }));
        }
        let c = match tangent_cone(nbhd, m, i) {
            Ok(c) => Some(c),
            Err(Error::ZeroInCone | Error::AllMinorsDegenerate) => None,
            Err(e) => return Err(e),
        };
        self.cones.insert(key, c.clone());
        Ok(c)
    }
}

/// Limits on local refinement.
pub(crate) struct Budget {
    pub(crate) refinements: usize,
    limit: usize,
}

impl Budget {
    pub(crate) fn new(limit: usize) -> Self {
        Budget { refinements: 0, limit }
    }
}

/// Position of each tube by key.
pub(crate) fn positions(nbhd: &TubularNeighborhood) -> HashMap<ArcKey, usize> {
    nbhd.tubes().iter().enumerate().map(|(i, t)| (t.key.clone(), i)).collect()
}

/// Re-tracks every tube whose key is in `targets` once, with half its `rho`.
/// Runs of consecutive targets are re-tracked together.
pub(crate) fn refine_keys(nbhd: &mut TubularNeighborhood, targets: &HashSet<ArcKey>, budget: &mut Budget) -> Result<()> {
    // Re-tracked tubes may keep their key but always have a smaller rho.
    let pending: HashMap<ArcKey, Rational> = nbhd
        .tubes()
        .iter()
        .filter(|t| targets.contains(&t.key))
        .map(|t| (t.key.clone(), t.rho.clone()))
        .collect();
    loop {
        let len = nbhd.len();
        let closed = nbhd.closure() == Closure::Closed;
        let hit = |nb: &TubularNeighborhood, i: usize| {
            let t = &nb.tubes()[i];
            pending.get(&t.key) == Some(&t.rho)
        };
        let Some(first) = (0..len).find(|&i| hit(nbhd, i)) else {
            return Ok(());
        };
        let (mut from, mut to, mut count) = (first, first, 1);
        while count < len {
            let next = if to + 1 < len { to + 1 } else if closed { 0 } else { break };
            if !hit(nbhd, next) {
                break;
            }
            to = next;
            count += 1;
        }
        while count < len {
            let prev = if from > 0 { from - 1 } else if closed { len - 1 } else { break };
            if !hit(nbhd, prev) {
                break;
            }
            from = prev;
            count += 1;
        }
        if closed && count == len {
            // A whole loop cannot be re-tracked as one segment.
            to = (from + len / 2 - 1) % len;
        }
        let mut rho = nbhd.tubes()[from].rho.clone();
        let mut k = from;
        loop {
            rho = rho.min(nbhd.tubes()[k].rho.clone());
            if k == to {
                break;
            }
            k = (k + 1) % len;
        }
        rho >>= 1u32;
        let floor = Rational::from(1) >> 60u32;
        if rho < floor {
            return Err(Error::RefinementBudgetExceeded(format!("rho fell below {floor}")));
        }
        budget.refinements += 1;
        if budget.refinements > budget.limit {
            return Err(Error::RefinementBudgetExceeded(format!("{} segment refinements", budget.limit)));
        }
        if nbhd.len() >= nbhd.params().max_tubes {
            return Err(Error::RefinementBudgetExceeded(format!("{} tubes", nbhd.len())));
        }
        nbhd.refine_segment(from, to, &rho)?;
    }
}

/// Algorithm 5 on tubes `i1` and `i2` of `nbhd`, whose projections meet.
/// A rejection refines the neighborhood in place.
pub fn intersection_check(nbhd: &mut TubularNeighborhood, m: &ProjectionMap, i1: usize, i2: usize) -> Result<CheckOutcome> {
    let limit = 64 * (nbhd.len() + 16);
    check(nbhd, m, i1, i2, &mut Cache::default(), &mut Budget::new(limit))
}

struct Ctx<'a> {
    m: &'a ProjectionMap,
    cache: &'a mut Cache,
    budget: &'a mut Budget,
}

impl Ctx<'_> {
    fn proj(&mut self, nbhd: &TubularNeighborhood, i: usize) -> Result<IntervalVector> {
        self.cache.projection(nbhd, self.m, i)
    }

    fn meeting(&mut self, nbhd: &TubularNeighborhood, rects: &[&Rectangle]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for i in 0..nbhd.len() {
            let b = self.proj(nbhd, i)?;
            if rects.iter().any(|r| !r.disjoint_from_box(&b)) {
                out.push(i);
            }
        }
        Ok(out)
    }

    fn refine(&mut self, nbhd: &mut TubularNeighborhood, tubes: &[usize]) -> Result<()> {
        let keys = tubes.iter().map(|&i| nbhd.tubes()[i].key.clone()).collect();
        refine_keys(nbhd, &keys, self.budget)
    }

    fn reject(&mut self, nbhd: &mut TubularNeighborhood, tubes: &[usize], why: Rejection) -> Result<CheckOutcome> {
        self.refine(nbhd, tubes)?;
        Ok(CheckOutcome::NotConfirmed(why))
    }

    fn reject_around(&mut self, nbhd: &mut TubularNeighborhood, rects: [&Rectangle; 2], why: Rejection) -> Result<CheckOutcome> {
        let tubes = self.meeting(nbhd, &rects)?;
        self.reject(nbhd, &tubes, why)
    }
}

pub(crate) fn check(
    nbhd: &mut TubularNeighborhood,
    m: &ProjectionMap,
    i1: usize,
    i2: usize,
    cache: &mut Cache,
    budget: &mut Budget,
) -> Result<CheckOutcome> {
    let mut cx = Ctx { m, cache, budget };
    let keys = [nbhd.tubes()[i1].key.clone(), nbhd.tubes()[i2].key.clone()];
    let b1 = cx.proj(nbhd, i1)?;
    let b2 = cx.proj(nbhd, i2)?;
    let Some(meet) = b1.intersection(&b2) else {
        return Ok(CheckOutcome::NotConfirmed(Rejection::NoOverlap));
    };
    let p: [Float; 2] = [meet[0].mid(), meet[1].mid()];

    let (Some(c1), Some(c2)) = (cx.cache.cone(nbhd, m, i1)?, cx.cache.cone(nbhd, m, i2)?) else {
        return cx.reject(nbhd, &[i1, i2], Rejection::ZeroInCone);
    };
    if c1.may_be_parallel(&c2) {
        return cx.reject(nbhd, &[i1, i2], Rejection::ParallelTangents);
    }
    let v = [direction(nbhd, m, i1)?, direction(nbhd, m, i2)?];
    let r = b1.diameter().max(&b2.diameter());

    let Some(rects) = rectangles(&p, &v, &r) else {
        return cx.reject(nbhd, &[i1, i2], Rejection::RectanglesTooShort);
    };

    // Every tube meeting a rectangle becomes no wider than it.
    let target = r.clone();
    let mut rounds = 0;
    loop {
        let mut big = Vec::new();
        for i in cx.meeting(nbhd, &[&rects[0], &rects[1]])? {
            if cx.proj(nbhd, i)?.diameter() > target {
                big.push(i);
            }
        }
        if big.is_empty() {
            break;
        }
        rounds += 1;
        if rounds > SHRINK_ROUNDS {
            return Err(Error::RefinementBudgetExceeded(format!(
                "tubes near ({}, {}) do not shrink",
                p[0].to_f64(),
                p[1].to_f64()
            )));
        }
        cx.refine(nbhd, &big)?;
    }

    let period = nbhd.period().cloned();
    let mut chains = Vec::with_capacity(2);
    for (k, rect) in rects.iter().enumerate() {
        let mut start = None;
        for (i, t) in nbhd.tubes().iter().enumerate() {
            if t.key.overlaps(&keys[k], period.as_ref()) && !rect.disjoint_from_box(&cx.proj(nbhd, i)?) {
                start = Some(i);
                break;
            }
        }
        let Some(start) = start else {
            return cx.reject_around(nbhd, [&rects[0], &rects[1]], Rejection::ChainEnd);
        };
        match walk(nbhd, &mut cx, start, rect)? {
            Some(chain) => chains.push(chain),
            None => return cx.reject_around(nbhd, [&rects[0], &rects[1]], Rejection::ChainEnd),
        }
    }
    let inner: Vec<Vec<usize>> = chains.iter().map(|c| c[1..c.len() - 1].to_vec()).collect();
    if inner[0].iter().any(|i| inner[1].contains(i)) {
        return cx.reject_around(nbhd, [&rects[0], &rects[1]], Rejection::SharedTubes);
    }

    for k in 0..2 {
        let rect = &rects[k];
        let sides = rect.lateral_sides();
        for &i in &inner[k] {
            let b = cx.proj(nbhd, i)?;
            if sides.iter().any(|s| !rect.edge_misses_box(s, &b)) {
                return cx.reject_around(nbhd, [&rects[0], &rects[1]], Rejection::LateralSide);
            }
        }
        if !leaves_through_both_ends(nbhd, &mut cx, &chains[k], rect)? {
            return cx.reject_around(nbhd, [&rects[0], &rects[1]], Rejection::LateralSide);
        }
    }

    let mut cones: [Vec<TangentCone>; 2] = [Vec::new(), Vec::new()];
    for k in 0..2 {
        for &i in &chains[k] {
            match cx.cache.cone(nbhd, m, i)? {
                Some(c) => cones[k].push(c),
                None => return cx.reject_around(nbhd, [&rects[0], &rects[1]], Rejection::ZeroInCone),
            }
        }
        if !half_space_condition(&cones[k]) {
            return cx.reject_around(nbhd, [&rects[0], &rects[1]], Rejection::HalfSpace);
        }
    }
    let inner_cones: Vec<&[TangentCone]> = cones.iter().map(|c| &c[1..c.len() - 1]).collect();
    for a in inner_cones[0] {
        for b in inner_cones[1] {
            if a.may_be_parallel(b) {
                return cx.reject_around(nbhd, [&rects[0], &rects[1]], Rejection::ParallelKernels);
            }
        }
    }

    let frame = rects[0]
        .bounding_box()
        .intersection(&rects[1].bounding_box())
        .expect("both rectangles contain p");
    let mut enclosure: Option<IntervalVector> = None;
    for &a in &inner[0] {
        let ba = cx.proj(nbhd, a)?;
        for &b in &inner[1] {
            if let Some(x) = ba.intersection(&cx.proj(nbhd, b)?).and_then(|x| x.intersection(&frame)) {
                enclosure = Some(match enclosure {
                    Some(e) => e.hull(&x)?,
                    None => x,
                });
            }
        }
    }
    let Some(enclosure) = enclosure else {
        return cx.reject_around(nbhd, [&rects[0], &rects[1]], Rejection::NoOverlap);
    };
    let arcs = [0, 1].map(|k| inner[k].iter().map(|&i| nbhd.tubes()[i].key.clone()).collect());
    let ends = [0, 1].map(|k| (chains[k][0], *chains[k].last().expect("non-empty")));
    Ok(CheckOutcome::Confirmed {
        rectangles: CrossingRectangles {
            p,
            v,
            r,
            rectangles: rects,
            chains: ends,
        },
        enclosure,
        arcs,
    })
}

/// Unit-length approximation of the projected chain tangent of tube `i`.
fn direction(nbhd: &TubularNeighborhood, m: &ProjectionMap, i: usize) -> Result<[Float; 2]> {
    let t = m.apply_point(&nbhd.tubes()[i].chain_tangent())?.midpoint();
    let prec = t[0].prec();
    let norm = Float::with_val(prec, t[0].clone().hypot(&t[1]));
    Ok([Float::with_val(prec, &t[0] / &norm), Float::with_val(prec, &t[1] / &norm)])
}

/// Rectangles of half width `r` around `p`, lengthened until the short ends
/// of each miss the other rectangle.
fn rectangles(p: &[Float; 2], v: &[[Float; 2]; 2], r: &Float) -> Option<[Rectangle; 2]> {
    let mut half = Float::with_val(r.prec(), r * 4u32);
    for _ in 0..=LENGTH_DOUBLINGS {
        let rects = [0, 1].map(|k| Rectangle {
            center: p.clone(),
            axis: v[k].clone(),
            half_length: half.clone(),
            half_width: r.clone(),
        });
        let clear = (0..2).all(|k| {
            let other = &rects[1 - k];
            rects[k].short_ends().iter().all(|e| rects[k].edge_misses(e, other))
        });
        if clear {
            return Some(rects);
        }
        half *= 2u32;
    }
    None
}

/// Walks the chain both ways from `start` to the first tubes lying outside
/// `rect`. Returns the chain from the backward end to the forward end, or
/// `None` when the chain ends or closes up inside the rectangle.
fn walk(nbhd: &TubularNeighborhood, cx: &mut Ctx<'_>, start: usize, rect: &Rectangle) -> Result<Option<Vec<usize>>> {
    let len = nbhd.len();
    let closed = nbhd.closure() == Closure::Closed;
    let step = |i: usize, forward: bool| -> Option<usize> {
        match (forward, closed) {
            (true, _) if i + 1 < len => Some(i + 1),
            (true, true) => Some(0),
            (false, _) if i > 0 => Some(i - 1),
            (false, true) => Some(len - 1),
            _ => None,
        }
    };
    let mut ends = [start; 2];
    let mut seen = 1;
    for (e, forward) in [(0, false), (1, true)] {
        loop {
            let Some(next) = step(ends[e], forward) else {
                return Ok(None);
            };
            seen += 1;
            if seen > len {
                return Ok(None);
            }
            ends[e] = next;
            if rect.disjoint_from_box(&cx.proj(nbhd, next)?) {
                break;
            }
        }
    }
    let mut chain = vec![ends[0]];
    let mut i = ends[0];
    while i != ends[1] {
        i = step(i, true).expect("walked before");
        chain.push(i);
    }
    Ok(Some(chain))
}

/// The end tubes of the chain lie beyond opposite short ends of `rect`.
fn leaves_through_both_ends(nbhd: &TubularNeighborhood, cx: &mut Ctx<'_>, chain: &[usize], rect: &Rectangle) -> Result<bool> {
    let l = Interval::symmetric(&rect.half_length);
    let mut sides = [0i8; 2];
    for (k, i) in [chain[0], chain[chain.len() - 1]].into_iter().enumerate() {
        let [s, _] = rect.local(&cx.proj(nbhd, i)?);
        sides[k] = match s.certainly_cmp(&l) {
            Some(Ordering::Greater) => 1,
            Some(Ordering::Less) => -1,
            _ => 0,
        };
    }
    Ok(sides[0] != 0 && sides[0] == -sides[1])
}

/// Incremental form of the half-space condition along a chain.
pub(crate) fn chain_half_space(
    nbhd: &mut TubularNeighborhood,
    cache: &mut Cache,
    m: &ProjectionMap,
    path: impl Iterator<Item = usize>,
) -> Result<ChainHalfSpace> {
    let mut acc = HalfPlane::default();
    for i in path {
        match cache.cone(nbhd, m, i)? {
            Some(c) => {
                if !acc.push(&c) {
                    return Ok(ChainHalfSpace::Fails);
                }
            }
            None => return Ok(ChainHalfSpace::Degenerate(i)),
        }
    }
    Ok(ChainHalfSpace::Holds)
}

pub(crate) enum ChainHalfSpace {
    Holds,
    Fails,
    /// The cone of this tube contains zero.
    Degenerate(usize),
}
