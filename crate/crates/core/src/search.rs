//! Derivative-free maximization over measurement settings and sharpness
//! factors.
//!
//! The extremal Bell values in this crate are recovered numerically rather
//! than hardcoded: a multi-restart Nelder-Mead simplex climbs the objective,
//! with restart points drawn uniformly over the parameter space (uniform on
//! the sphere for direction blocks, so restarts do not cluster at the poles)
//! and a final polish run from the incumbent. Constrained sharpness vectors
//! are handled by projection: every candidate is pulled back onto the
//! feasible set before evaluation, which is well defined because both
//! feasibility regions of interest are star-shaped about the origin.
//!
//! Everything is deterministic for a fixed seed and budget.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::inequalities;
use crate::pauli::{DensityMatrix, Direction};
use crate::povm::JointPovm2;

/// Objective evaluations allowed per search unless the caller says otherwise.
pub const DEFAULT_BUDGET: usize = 20_000;
/// Restart count unless the caller says otherwise.
pub const DEFAULT_RESTARTS: usize = 16;
/// Seed used by callers that do not thread their own.
pub const DEFAULT_SEED: u64 = 1;

/// Spherical coordinates of a direction parameter: `theta` from the +z axis,
/// `phi` around it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereParam {
    pub theta: f64,
    pub phi: f64,
}

impl SphereParam {
    pub fn direction(self) -> Direction {
        Direction::from_polar(self.theta, self.phi)
    }

    pub fn from_direction(d: Direction) -> Self {
        let (theta, phi) = d.polar();
        Self { theta, phi }
    }
}

/// Reads the direction encoded at `offset` (theta) and `offset + 1` (phi) of
/// a flat parameter vector.
pub fn direction_at(params: &[f64], offset: usize) -> Direction {
    Direction::from_polar(params[offset], params[offset + 1])
}

/// One block of a flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Block {
    /// A free direction: two angles, sampled uniformly over the sphere.
    Sphere,
    /// A single angle, sampled uniformly over a full turn.
    Angle,
    /// A bounded scalar, sampled uniformly.
    Interval { lo: f64, hi: f64 },
}

impl Block {
    fn n_params(self) -> usize {
        match self {
            Block::Sphere => 2,
            Block::Angle | Block::Interval { .. } => 1,
        }
    }

    fn sample_into(self, rng: &mut ChaCha8Rng, out: &mut Vec<f64>) {
        match self {
            Block::Sphere => {
                let z: f64 = rng.gen::<f64>() * 2.0 - 1.0;
                let phi: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                out.push(z.clamp(-1.0, 1.0).acos());
                out.push(phi);
            }
            Block::Angle => out.push(rng.gen::<f64>() * std::f64::consts::TAU),
            Block::Interval { lo, hi } => out.push(lo + rng.gen::<f64>() * (hi - lo)),
        }
    }

    fn steps_into(self, out: &mut Vec<f64>) {
        match self {
            Block::Sphere => {
                out.push(0.4);
                out.push(0.4);
            }
            Block::Angle => out.push(0.4),
            Block::Interval { lo, hi } => out.push(0.25 * (hi - lo)),
        }
    }
}

/// Shape of the parameter vector an objective expects.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpace {
    blocks: Vec<Block>,
}

impl ParamSpace {
    pub fn new(blocks: Vec<Block>) -> Self {
        Self { blocks }
    }

    /// A space of `count` free directions.
    pub fn spheres(count: usize) -> Self {
        Self::new(vec![Block::Sphere; count])
    }

    pub fn n_params(&self) -> usize {
        self.blocks.iter().map(|b| b.n_params()).sum()
    }

    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for b in &self.blocks {
            b.sample_into(rng, &mut out);
        }
        out
    }

    fn steps(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n_params());
        for b in &self.blocks {
            b.steps_into(&mut out);
        }
        out
    }
}

/// Outcome of a maximization run.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// Largest objective value seen across all evaluations.
    pub best_value: f64,
    /// The (projected) parameter vector achieving `best_value`.
    pub best_params: Vec<f64>,
    /// Objective evaluations actually spent.
    pub evaluations: usize,
    /// Whether at least one simplex run collapsed before its budget ran out.
    pub converged: bool,
}

struct Tracker<'a, F, P> {
    objective: &'a F,
    project: &'a P,
    budget: usize,
    evaluations: usize,
    best_value: f64,
    best_params: Vec<f64>,
}

struct Vertex {
    point: Vec<f64>,
    value: f64,
}

impl<F, P> Tracker<'_, F, P>
where
    F: Fn(&[f64]) -> f64,
    P: Fn(&mut [f64]),
{
    fn can_eval(&self, allowance: usize) -> bool {
        self.evaluations < allowance.min(self.budget)
    }

    fn eval(&mut self, mut point: Vec<f64>) -> Result<Vertex> {
        (self.project)(&mut point);
        let value = (self.objective)(&point);
        self.evaluations += 1;
        if !value.is_finite() {
            return Err(Error::NonFiniteObjective(point));
        }
        if value > self.best_value {
            self.best_value = value;
            self.best_params = point.clone();
        }
        Ok(Vertex { point, value })
    }
}

/// Maximizes `objective` over `space`.
///
/// Runs `restarts` independent simplex descents from random starting points,
/// then polishes the incumbent with a tighter simplex; every candidate is
/// evaluated at most `budget` times in total. Identical inputs give
/// identical results.
pub fn maximize<F>(
    objective: F,
    space: &ParamSpace,
    budget: usize,
    restarts: usize,
    seed: u64,
) -> Result<SearchResult>
where
    F: Fn(&[f64]) -> f64,
{
    maximize_projected(objective, |_: &mut [f64]| {}, space, budget, restarts, seed)
}

/// [`maximize`] with a projection applied to every candidate before
/// evaluation. The stored parameters are always the projected ones.
pub fn maximize_projected<F, P>(
    objective: F,
    project: P,
    space: &ParamSpace,
    budget: usize,
    restarts: usize,
    seed: u64,
) -> Result<SearchResult>
where
    F: Fn(&[f64]) -> f64,
    P: Fn(&mut [f64]),
{
    if budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let restarts = restarts.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracker = Tracker {
        objective: &objective,
        project: &project,
        budget,
        evaluations: 0,
        best_value: f64::NEG_INFINITY,
        best_params: Vec::new(),
    };
    let steps = space.steps();
    let explore_cap = budget - budget / 4;
    let per_restart = (explore_cap / restarts).max(2 * (space.n_params() + 1));
    let mut converged = false;
    for _ in 0..restarts {
        if tracker.evaluations >= explore_cap {
            break;
        }
        let allowance = explore_cap.min(tracker.evaluations + per_restart);
        let start = space.sample(&mut rng);
        converged |= nelder_mead(&mut tracker, start, &steps, allowance)?;
    }
    if tracker.evaluations < budget && !tracker.best_params.is_empty() {
        let start = tracker.best_params.clone();
        let fine: Vec<f64> = steps.iter().map(|s| s * 0.05).collect();
        converged |= nelder_mead(&mut tracker, start, &fine, budget)?;
    }
    Ok(SearchResult {
        best_value: tracker.best_value,
        best_params: tracker.best_params,
        evaluations: tracker.evaluations,
        converged,
    })
}

/// One simplex descent (ascent, here) from `start`. Returns whether the
/// simplex collapsed below the spread and diameter thresholds before the
/// evaluation allowance ran out.
fn nelder_mead<F, P>(
    tracker: &mut Tracker<'_, F, P>,
    start: Vec<f64>,
    steps: &[f64],
    allowance: usize,
) -> Result<bool>
where
    F: Fn(&[f64]) -> f64,
    P: Fn(&mut [f64]),
{
    let n = start.len();
    let mut vertices: Vec<Vertex> = Vec::with_capacity(n + 1);
    if !tracker.can_eval(allowance) {
        return Ok(false);
    }
    vertices.push(tracker.eval(start.clone())?);
    for i in 0..n {
        if !tracker.can_eval(allowance) {
            return Ok(false);
        }
        let mut p = start.clone();
        p[i] += steps[i];
        vertices.push(tracker.eval(p)?);
    }

    loop {
        vertices.sort_by(|a, b| b.value.partial_cmp(&a.value).expect("finite values"));
        let spread = vertices[0].value - vertices[n].value;
        let diameter = vertices[1..]
            .iter()
            .map(|v| {
                v.point
                    .iter()
                    .zip(&vertices[0].point)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= 1e-12 && diameter <= 1e-8 {
            return Ok(true);
        }
        if !tracker.can_eval(allowance) {
            return Ok(false);
        }

        let mut centroid = vec![0.0; n];
        for v in &vertices[..n] {
            for (c, x) in centroid.iter_mut().zip(&v.point) {
                *c += x;
            }
        }
        for c in centroid.iter_mut() {
            *c /= n as f64;
        }
        let worst = vertices[n].point.clone();
        let combine = |toward: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + toward * (c - w))
                .collect()
        };

        let reflected = tracker.eval(combine(1.0))?;
        if reflected.value > vertices[0].value {
            if tracker.can_eval(allowance) {
                let expanded = tracker.eval(combine(2.0))?;
                vertices[n] = if expanded.value > reflected.value {
                    expanded
                } else {
                    reflected
                };
            } else {
                vertices[n] = reflected;
            }
            continue;
        }
        if reflected.value > vertices[n - 1].value {
            vertices[n] = reflected;
            continue;
        }
        if !tracker.can_eval(allowance) {
            return Ok(false);
        }
        if reflected.value > vertices[n].value {
            let outside = tracker.eval(combine(0.5))?;
            if outside.value >= reflected.value {
                vertices[n] = outside;
                continue;
            }
        } else {
            let inside = tracker.eval(combine(-0.5))?;
            if inside.value > vertices[n].value {
                vertices[n] = inside;
                continue;
            }
        }

        let best_point = vertices[0].point.clone();
        for v in vertices.iter_mut().skip(1) {
            if !tracker.can_eval(allowance) {
                return Ok(false);
            }
            let p: Vec<f64> = best_point
                .iter()
                .zip(&v.point)
                .map(|(b, x)| 0.5 * (b + x))
                .collect();
            *v = tracker.eval(p)?;
        }
    }
}

/// A Bell expression maximized over its joint-measurement sharpness factors,
/// with the feasibility constraint folded in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointExpression {
    /// Three-party Mermin combination on the GHZ state, joint x/y pairs on
    /// parties 1 and 2; free parameters are the four sharpness factors.
    MerminJoint,
    /// Three-setting Gisin combination on the singlet with the coplanar
    /// joint scheme on party 2; free parameter is the common sharpness.
    Gisin3Joint,
}

/// Constrained maximization of a joint-regime expression. Sharpness
/// parameters outside the feasible set are projected radially back onto its
/// boundary before each evaluation.
pub fn maximize_joint_regime(
    expression: JointExpression,
    budget: usize,
    seed: u64,
) -> Result<SearchResult> {
    match expression {
        JointExpression::MerminJoint => {
            let ghz = DensityMatrix::ghz();
            let space = ParamSpace::new(vec![Block::Interval { lo: 0.0, hi: 1.0 }; 4]);
            maximize_projected(
                move |p: &[f64]| {
                    let povm1 = JointPovm2::build(p[0], Direction::X, p[1], Direction::Y)
                        .expect("projected sharpness pair is feasible");
                    let povm2 = JointPovm2::build(p[2], Direction::X, p[3], Direction::Y)
                        .expect("projected sharpness pair is feasible");
                    inequalities::mermin_joint_value(
                        &ghz,
                        &povm1,
                        &povm2,
                        Direction::X,
                        Direction::Y,
                    )
                    .expect("plan matches the three-qubit state")
                    .value
                },
                |p: &mut [f64]| {
                    project_busch_pair(&mut p[0..2], Direction::X, Direction::Y);
                    project_busch_pair(&mut p[2..4], Direction::X, Direction::Y);
                },
                &space,
                budget,
                DEFAULT_RESTARTS,
                seed,
            )
        }
        JointExpression::Gisin3Joint => {
            let singlet = DensityMatrix::singlet();
            let cap = inequalities::bounds::coplanar_max_sharpness();
            let space = ParamSpace::new(vec![Block::Interval { lo: 0.0, hi: 1.0 }]);
            maximize_projected(
                move |p: &[f64]| {
                    inequalities::gisin3_joint_value(&singlet, p[0])
                        .expect("projected sharpness is feasible")
                        .value
                },
                move |p: &mut [f64]| p[0] = p[0].abs().min(cap),
                &space,
                budget,
                DEFAULT_RESTARTS,
                seed,
            )
        }
    }
}

/// Radial projection of a sharpness pair onto the joint-measurability region
/// for directions `a` and `b`: take magnitudes, then scale both factors back
/// to the boundary whenever the compatibility criterion fails.
pub(crate) fn project_busch_pair(pair: &mut [f64], a: Direction, b: Direction) {
    let alpha = pair[0].abs();
    let beta = pair[1].abs();
    let plus = (a.vec() * alpha + b.vec() * beta).norm();
    let minus = (a.vec() * alpha - b.vec() * beta).norm();
    let sum = plus + minus;
    let scale = if sum > 2.0 { 2.0 / sum } else { 1.0 };
    pair[0] = alpha * scale;
    pair[1] = beta * scale;
}
