//! Joint unsharp measurements of two or three spin components.
//!
//! Sharp measurements of `a . sigma` and `b . sigma` are incompatible unless
//! the directions coincide. Scaling the observables by sharpness factors
//! alpha and beta in [0, 1] restores compatibility once the Busch criterion
//!
//! ```text
//! |alpha a + beta b| + |alpha a - beta b| <= 2
//! ```
//!
//! holds; [`busch_margin`] reports the slack of that inequality. The
//! four-outcome observable built by [`JointPovm2::build`] carries the
//! canonical outcome bias m = (|alpha a + beta b| - |alpha a - beta b|) / 2,
//! the choice that makes all four positivity constraints tight together at
//! the feasibility boundary: every element's smallest eigenvalue equals one
//! eighth of the margin.
//!
//! For three mutually orthogonal directions, alpha^2 + beta^2 + gamma^2 <= 1
//! is sufficient for an eight-outcome joint observable with unbiased
//! outcomes ([`JointPovm3::build`]). The same condition is believed to be
//! necessary for orthogonal axes, but no proof is known to the authors; this
//! module relies only on sufficiency, and nothing here assumes the converse.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::pauli::{spin_combination, Direction, HermitianOp};

/// Slack below zero tolerated when deciding feasibility.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// Slack of the Busch criterion: 2 - |alpha a + beta b| - |alpha a - beta b|.
///
/// Non-negative exactly when the pair admits a joint measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuschMargin {
    pub value: f64,
}

impl BuschMargin {
    pub fn is_feasible(self) -> bool {
        self.value >= -FEASIBILITY_TOL
    }
}

fn check_sharpness(s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::SharpnessOutOfRange(s));
    }
    Ok(s)
}

/// Busch criterion slack for unsharp `alpha a . sigma` and `beta b . sigma`.
pub fn busch_margin(alpha: f64, a: Direction, beta: f64, b: Direction) -> Result<BuschMargin> {
    check_sharpness(alpha)?;
    check_sharpness(beta)?;
    let plus = (a.vec() * alpha + b.vec() * beta).norm();
    let minus = (a.vec() * alpha - b.vec() * beta).norm();
    Ok(BuschMargin {
        value: 2.0 - plus - minus,
    })
}

/// Largest common sharpness for a joint measurement along `a` and `b`:
/// 2 / (|a + b| + |a - b|).
///
/// Equals 1/sqrt(2) for orthogonal directions and 2/(1 + sqrt(3)) for a
/// pair 120 degrees apart.
pub fn max_symmetric_sharpness(a: Direction, b: Direction) -> f64 {
    2.0 / ((a.vec() + b.vec()).norm() + (a.vec() - b.vec()).norm())
}

/// The outcome bias (|alpha a + beta b| - |alpha a - beta b|) / 2 used by the
/// canonical four-outcome construction.
pub fn canonical_bias(alpha: f64, a: Direction, beta: f64, b: Direction) -> f64 {
    let plus = (a.vec() * alpha + b.vec() * beta).norm();
    let minus = (a.vec() * alpha - b.vec() * beta).norm();
    0.5 * (plus - minus)
}

/// The four canonical-bias elements
/// G(k, l) = [(1 + k l m) I + (k alpha a + l beta b) . sigma] / 4
/// in outcome order (+,+), (+,-), (-,+), (-,-).
///
/// No feasibility check: for an infeasible pair the returned operators are
/// simply not all positive, which is occasionally what a caller wants to
/// demonstrate.
pub fn canonical_elements(
    alpha: f64,
    a: Direction,
    beta: f64,
    b: Direction,
) -> [HermitianOp; 4] {
    let m = canonical_bias(alpha, a, beta, b);
    let build = |k: f64, l: f64| {
        let v = a.vec() * (alpha * k) + b.vec() * (beta * l);
        let mat = CMatrix::identity(2)
            .scaled(1.0 + k * l * m)
            .add(&spin_combination(v))
            .expect("2x2 dims")
            .scaled(0.25);
        HermitianOp::new_unchecked(mat)
    };
    [
        build(1.0, 1.0),
        build(1.0, -1.0),
        build(-1.0, 1.0),
        build(-1.0, -1.0),
    ]
}

/// Joint four-outcome measurement of two unsharp spin components.
///
/// Outcomes are pairs (k, l) with k, l in {+1, -1}; summing over l leaves
/// the unsharp observable (I + k alpha a . sigma) / 2 and symmetrically for
/// k, so each marginal reproduces one component scaled by its sharpness.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPovm2 {
    alpha: f64,
    beta: f64,
    a: Direction,
    b: Direction,
    bias: f64,
    elements: [HermitianOp; 4],
}

impl JointPovm2 {
    /// Validates sharpness ranges and the Busch criterion, then assembles
    /// the canonical-bias elements.
    pub fn build(alpha: f64, a: Direction, beta: f64, b: Direction) -> Result<Self> {
        let margin = busch_margin(alpha, a, beta, b)?;
        if !margin.is_feasible() {
            return Err(Error::Infeasible(margin.value));
        }
        Ok(Self {
            alpha,
            beta,
            a,
            b,
            bias: canonical_bias(alpha, a, beta, b),
            elements: canonical_elements(alpha, a, beta, b),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn direction_a(&self) -> Direction {
        self.a
    }

    pub fn direction_b(&self) -> Direction {
        self.b
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn element(&self, k: i32, l: i32) -> &HermitianOp {
        debug_assert!(k.abs() == 1 && l.abs() == 1);
        let idx = (((1 - k) / 2) * 2 + (1 - l) / 2) as usize;
        &self.elements[idx]
    }

    /// Outcomes in a fixed order: (+,+), (+,-), (-,+), (-,-).
    pub fn outcomes(&self) -> impl Iterator<Item = (i32, i32, &HermitianOp)> {
        [(1, 1), (1, -1), (-1, 1), (-1, -1)]
            .into_iter()
            .zip(self.elements.iter())
            .map(|((k, l), e)| (k, l, e))
    }

    /// Sum over the partner outcome: the unsharp observable left for `k`.
    pub fn marginal_a(&self, k: i32) -> HermitianOp {
        self.element(k, 1)
            .add(self.element(k, -1))
            .expect("same dims")
    }

    pub fn marginal_b(&self, l: i32) -> HermitianOp {
        self.element(1, l)
            .add(self.element(-1, l))
            .expect("same dims")
    }
}

/// Sufficient condition for jointly measuring three components along
/// mutually orthogonal axes: alpha^2 + beta^2 + gamma^2 <= 1.
pub fn three_direction_condition(alpha: f64, beta: f64, gamma: f64) -> bool {
    alpha * alpha + beta * beta + gamma * gamma <= 1.0 + FEASIBILITY_TOL
}

/// Joint eight-outcome measurement of three unsharp spin components along
/// mutually orthogonal axes, with unbiased outcomes:
/// G(j, k, l) = [I + (j alpha a + k beta b + l gamma c) . sigma] / 8.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPovm3 {
    factors: [f64; 3],
    directions: [Direction; 3],
    elements: [HermitianOp; 8],
}

impl JointPovm3 {
    pub fn build(factors: [f64; 3], directions: [Direction; 3]) -> Result<Self> {
        for f in factors {
            check_sharpness(f)?;
        }
        let mut worst_dot: f64 = 0.0;
        for i in 0..3 {
            for j in (i + 1)..3 {
                worst_dot = worst_dot.max(directions[i].dot(directions[j]).abs());
            }
        }
        if worst_dot > 1e-10 {
            return Err(Error::NotOrthogonal(worst_dot));
        }
        let [alpha, beta, gamma] = factors;
        if !three_direction_condition(alpha, beta, gamma) {
            return Err(Error::ThreeDirectionCondition(
                alpha * alpha + beta * beta + gamma * gamma,
            ));
        }
        let [a, b, c] = directions;
        let mut elements = Vec::with_capacity(8);
        for (j, k, l) in Self::SIGN_ORDER {
            let v = a.vec() * (alpha * f64::from(j))
                + b.vec() * (beta * f64::from(k))
                + c.vec() * (gamma * f64::from(l));
            let mat = CMatrix::identity(2)
                .add(&spin_combination(v))
                .expect("2x2 dims")
                .scaled(0.125);
            elements.push(HermitianOp::new_unchecked(mat));
        }
        Ok(Self {
            factors,
            directions,
            elements: elements.try_into().expect("eight outcomes"),
        })
    }

    const SIGN_ORDER: [(i32, i32, i32); 8] = [
        (1, 1, 1),
        (1, 1, -1),
        (1, -1, 1),
        (1, -1, -1),
        (-1, 1, 1),
        (-1, 1, -1),
        (-1, -1, 1),
        (-1, -1, -1),
    ];

    pub fn factors(&self) -> [f64; 3] {
        self.factors
    }

    pub fn directions(&self) -> [Direction; 3] {
        self.directions
    }

    pub fn element(&self, j: i32, k: i32, l: i32) -> &HermitianOp {
        debug_assert!(j.abs() == 1 && k.abs() == 1 && l.abs() == 1);
        let idx = (((1 - j) / 2) * 4 + ((1 - k) / 2) * 2 + (1 - l) / 2) as usize;
        &self.elements[idx]
    }

    pub fn outcomes(&self) -> impl Iterator<Item = (i32, i32, i32, &HermitianOp)> {
        Self::SIGN_ORDER
            .into_iter()
            .zip(self.elements.iter())
            .map(|((j, k, l), e)| (j, k, l, e))
    }
}
