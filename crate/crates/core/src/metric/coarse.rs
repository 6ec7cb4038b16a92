//! Empirical coarse-equivalence engine.
//!
//! Two metrics on the same tower are compared through their distortion
//! profiles `φ(r) = max { b(p,q) : a(p,q) ≤ r }` (and the reverse), evaluated
//! level by level on a fixed radius grid. Finite data can only ever give
//! evidence, so the verdict is one of three kinds and carries everything it
//! was based on.

use serde::Serialize;

use super::{MetricTower, Point};
use crate::error::{Error, Result};
use crate::number::Dist;

/// Sampled monotone control function `r ↦ φ(r)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ControlFunction {
    pub samples: Vec<(Dist, Dist)>,
}

impl ControlFunction {
    /// Value at a sampled radius.
    pub fn at(&self, r: Dist) -> Option<Dist> {
        self.samples.iter().find(|(x, _)| *x == r).map(|(_, y)| *y)
    }

    pub fn is_monotone(&self) -> bool {
        self.samples.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1)
    }

    fn values(&self) -> impl Iterator<Item = Dist> + '_ {
        self.samples.iter().map(|(_, y)| *y)
    }
}

/// One compared pair with its value under both metrics.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sample<L> {
    pub pair: (L, L),
    pub a: Dist,
    pub b: Dist,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelSamples<L> {
    pub level: usize,
    pub samples: Vec<Sample<L>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoarseConfig {
    /// Number of trailing levels over which profiles must agree (or grow).
    pub window: usize,
    /// A witness family must end above this value.
    pub growth_threshold: Dist,
}

impl Default for CoarseConfig {
    fn default() -> Self {
        CoarseConfig { window: 3, growth_threshold: Dist::int(16) }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictTag {
    Equivalent,
    NotEquivalent,
    Inconclusive,
}

/// Which metric stays bounded along a witness family.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// `a ≤ C` while `b` grows.
    Forward,
    /// `b ≤ C` while `a` grows.
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessStep<L> {
    pub level: usize,
    pub pair: (L, L),
    pub bounded: Dist,
    pub growing: Dist,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessSequence<L> {
    pub direction: Direction,
    pub bound: Dist,
    pub steps: Vec<WitnessStep<L>>,
}

impl<L> WitnessSequence<L> {
    /// The stated shape: bounded values stay ≤ `bound`, growing values strictly increase.
    pub fn is_well_formed(&self) -> bool {
        !self.steps.is_empty()
            && self.steps.iter().all(|s| s.bounded <= self.bound)
            && self.steps.windows(2).all(|w| w[0].growing < w[1].growing)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistortionTable {
    pub level: usize,
    pub forward: ControlFunction,
    pub backward: ControlFunction,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub forward_grid: Vec<Dist>,
    pub backward_grid: Vec<Dist>,
    pub tables: Vec<DistortionTable>,
    pub forward_stable: bool,
    pub backward_stable: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoarseVerdict<L> {
    pub tag: VerdictTag,
    /// `(forward, backward)` controls at the top compared level.
    pub control: Option<(ControlFunction, ControlFunction)>,
    pub witnesses: Vec<WitnessSequence<L>>,
    pub diagnostics: Diagnostics,
}

impl<L> CoarseVerdict<L> {
    pub fn is_equivalent(&self) -> bool {
        self.tag == VerdictTag::Equivalent
    }
}

/// Profile of `b` against `a` at one level, with the pair realizing each value.
struct Profile<'a, L> {
    control: ControlFunction,
    argmax: Vec<Option<&'a Sample<L>>>,
}

fn profile<'a, L>(samples: &'a [Sample<L>], grid: &[Dist], dir: Direction) -> Profile<'a, L> {
    let key = |s: &Sample<L>| match dir {
        Direction::Forward => (s.a, s.b),
        Direction::Backward => (s.b, s.a),
    };
    let mut order: Vec<&Sample<L>> = samples.iter().collect();
    order.sort_by_key(|s| key(s).0);
    // Running maximum of the controlled value along increasing bounded value.
    let mut running: Vec<(Dist, &Sample<L>)> = Vec::with_capacity(order.len());
    for s in &order {
        let v = key(s).1;
        match running.last() {
            Some(&(m, best)) if m >= v => running.push((m, best)),
            _ => running.push((v, s)),
        }
    }
    let mut control = ControlFunction::default();
    let mut argmax = Vec::with_capacity(grid.len());
    for &r in grid {
        let upto = order.partition_point(|s| key(s).0 <= r);
        if upto == 0 {
            control.samples.push((r, Dist::ZERO));
            argmax.push(None);
        } else {
            let (m, s) = running[upto - 1];
            control.samples.push((r, m.max(Dist::ZERO)));
            argmax.push(Some(s));
        }
    }
    Profile { control, argmax }
}

fn grid_of<L>(samples: &[Sample<L>], dir: Direction) -> Vec<Dist> {
    let mut g: Vec<Dist> = samples
        .iter()
        .map(|s| match dir {
            Direction::Forward => s.a,
            Direction::Backward => s.b,
        })
        .chain(std::iter::once(Dist::ZERO))
        .collect();
    g.sort();
    g.dedup();
    g
}

/// Runs the engine on pre-computed per-level samples (smallest level first).
///
/// The radius grid of each direction is the set of values the bounded metric
/// attains on the first level.
pub fn compare_levels<L: Clone>(levels: &[LevelSamples<L>], config: &CoarseConfig) -> CoarseVerdict<L> {
    let mut diagnostics = Diagnostics::default();
    let Some(first) = levels.first() else {
        diagnostics.notes.push("no levels to compare".into());
        return inconclusive(diagnostics);
    };
    diagnostics.forward_grid = grid_of(&first.samples, Direction::Forward);
    diagnostics.backward_grid = grid_of(&first.samples, Direction::Backward);

    let mut forward = Vec::with_capacity(levels.len());
    let mut backward = Vec::with_capacity(levels.len());
    for lv in levels {
        let f = profile(&lv.samples, &diagnostics.forward_grid, Direction::Forward);
        let b = profile(&lv.samples, &diagnostics.backward_grid, Direction::Backward);
        diagnostics.tables.push(DistortionTable {
            level: lv.level,
            forward: f.control.clone(),
            backward: b.control.clone(),
        });
        forward.push(f);
        backward.push(b);
    }

    let window = config.window.max(1);
    if levels.len() < window {
        diagnostics.notes.push(format!("{} levels available, stability window needs {}", levels.len(), window));
        return inconclusive(diagnostics);
    }
    let tail = levels.len() - window;
    let stable = |profiles: &[Profile<L>]| profiles[tail..].windows(2).all(|w| w[0].control == w[1].control);
    diagnostics.forward_stable = stable(&forward);
    diagnostics.backward_stable = stable(&backward);

    let mut witnesses = Vec::new();
    for (dir, profiles, grid) in [
        (Direction::Forward, &forward, &diagnostics.forward_grid),
        (Direction::Backward, &backward, &diagnostics.backward_grid),
    ] {
        if let Some(w) = find_witness(levels, profiles, grid, tail, dir, config) {
            witnesses.push(w);
        }
    }

    if !witnesses.is_empty() {
        return CoarseVerdict { tag: VerdictTag::NotEquivalent, control: None, witnesses, diagnostics };
    }
    if diagnostics.forward_stable && diagnostics.backward_stable {
        let control = Some((forward.last().unwrap().control.clone(), backward.last().unwrap().control.clone()));
        return CoarseVerdict { tag: VerdictTag::Equivalent, control, witnesses, diagnostics };
    }
    diagnostics.notes.push("profiles neither settled nor grew past the threshold".into());
    inconclusive(diagnostics)
}

fn find_witness<L: Clone>(
    levels: &[LevelSamples<L>],
    profiles: &[Profile<L>],
    grid: &[Dist],
    tail: usize,
    dir: Direction,
    config: &CoarseConfig,
) -> Option<WitnessSequence<L>> {
    for (i, &bound) in grid.iter().enumerate() {
        let run: Vec<_> = profiles[tail..].iter().map(|p| (p.control.samples[i].1, p.argmax[i])).collect();
        let increasing = run.windows(2).all(|w| w[0].0 < w[1].0);
        let last = run.last().unwrap().0;
        if !increasing || last <= config.growth_threshold {
            continue;
        }
        let steps = run
            .iter()
            .zip(&levels[tail..])
            .filter_map(|((v, s), lv)| {
                let s = (*s)?;
                let bounded = match dir {
                    Direction::Forward => s.a,
                    Direction::Backward => s.b,
                };
                Some(WitnessStep { level: lv.level, pair: s.pair.clone(), bounded, growing: *v })
            })
            .collect::<Vec<_>>();
        if steps.len() == run.len() {
            return Some(WitnessSequence { direction: dir, bound, steps });
        }
    }
    None
}

fn inconclusive<L>(diagnostics: Diagnostics) -> CoarseVerdict<L> {
    CoarseVerdict { tag: VerdictTag::Inconclusive, control: None, witnesses: Vec::new(), diagnostics }
}

/// All unordered pairs of distinct points of a level with both distances.
pub fn tower_samples(a: &MetricTower, b: &MetricTower, level: usize) -> Result<LevelSamples<Point>> {
    if !a.same_points(b) {
        return Err(Error::MismatchedPoints);
    }
    let pts = a.level_points(level)?;
    let ta = a.table(level)?;
    let tb = b.table(level)?;
    let mut samples = Vec::with_capacity(pts.len() * pts.len().saturating_sub(1) / 2);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            samples.push(Sample { pair: (pts[i], pts[j]), a: ta.get(i, j), b: tb.get(i, j) });
        }
    }
    Ok(LevelSamples { level, samples })
}

/// `φ(r) = max { b(p,q) : a(p,q) ≤ r }` over one level.
pub fn distortion_profile(a: &MetricTower, b: &MetricTower, level: usize, grid: &[Dist]) -> Result<ControlFunction> {
    let lv = tower_samples(a, b, level)?;
    Ok(profile(&lv.samples, grid, Direction::Forward).control)
}

/// The attained distances of the smallest level, the default radius grid.
pub fn default_grid(tower: &MetricTower) -> Result<Vec<Dist>> {
    let mut g: Vec<Dist> = tower.table(0)?.values().collect();
    g.sort();
    g.dedup();
    Ok(g)
}

pub fn coarse_compare(a: &MetricTower, b: &MetricTower, config: &CoarseConfig) -> Result<CoarseVerdict<Point>> {
    if !a.same_points(b) {
        return Err(Error::MismatchedPoints);
    }
    let levels = (0..a.num_levels()).map(|k| tower_samples(a, b, k)).collect::<Result<Vec<_>>>()?;
    Ok(compare_levels(&levels, config))
}

impl<L> CoarseVerdict<L> {
    /// Largest controlled value in the reported control functions.
    pub fn control_ceiling(&self) -> Option<Dist> {
        let (f, b) = self.control.as_ref()?;
        f.values().chain(b.values()).max()
    }
}
