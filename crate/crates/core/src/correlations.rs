//! Correlation functions over sharp and joint measurement plans.
//!
//! A measurement plan assigns each party either a sharp direction, a
//! four-outcome joint observable, or an eight-outcome joint observable. Every
//! quantity in this module is computed the same way: enumerate all outcome
//! tuples of the tensor-product measurement, weight each tuple by
//! tr(rho (E_1 x E_2 x ...)), and sum whatever function of the recorded
//! outcomes is being averaged. Nothing is collapsed to an operator shortcut,
//! so the POVM elements themselves are exercised on every call; the operator
//! identities (joint correlations equal sharpness-scaled sharp correlations)
//! are left to the tests as independent cross-checks.
//!
//! A party holding a joint pair along `a` and `b` records two outcome signs
//! per run. When the two directions happen to sum to a unit vector, the
//! products of run data can also be read against that sum direction by
//! adding the two signs, giving a third, inferred outcome in {-2, 0, +2}.
//! That convention keeps the inferred correlation exactly linear: against
//! any partner it equals the sum of the two recorded-sign correlations.
//! Plans expose it as [`OutcomeLabel::Inferred`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::pauli::{
    bloch_observable, expectation, spin_projector, tensor, DensityMatrix, Direction, HermitianOp,
};
use crate::povm::{JointPovm2, JointPovm3};

/// Which recorded value of a party's plan a query refers to.
///
/// `First` is a sharp party's only outcome, or the `a`-direction sign of a
/// joint pair, or the first axis of a joint triple. `Inferred` exists only
/// for joint pairs whose directions sum to a unit vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeLabel {
    First,
    Second,
    Third,
    Inferred,
}

/// One party's measurement in a plan.
#[derive(Debug, Clone)]
pub enum PartyPlan {
    Sharp(Direction),
    Joint2(JointPovm2),
    Joint2WithInferred { povm: JointPovm2, inferred: Direction },
    Joint3(JointPovm3),
}

impl PartyPlan {
    /// Joint pair whose direction sum is read as a third outcome. The sum
    /// must already be a unit vector; no rescaling is applied.
    pub fn joint2_with_inferred(povm: JointPovm2) -> Result<Self> {
        let sum = povm.direction_a().vec() + povm.direction_b().vec();
        let norm = sum.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InferredNotUnit(norm));
        }
        let inferred = Direction::from_vec(sum)?;
        Ok(PartyPlan::Joint2WithInferred { povm, inferred })
    }

    pub fn inferred_direction(&self) -> Option<Direction> {
        match self {
            PartyPlan::Joint2WithInferred { inferred, .. } => Some(*inferred),
            _ => None,
        }
    }

    fn elements(&self) -> Vec<HermitianOp> {
        match self {
            PartyPlan::Sharp(d) => vec![spin_projector(*d, 1), spin_projector(*d, -1)],
            PartyPlan::Joint2(p) | PartyPlan::Joint2WithInferred { povm: p, .. } => {
                p.outcomes().map(|(_, _, e)| e.clone()).collect()
            }
            PartyPlan::Joint3(p) => p.outcomes().map(|(_, _, _, e)| e.clone()).collect(),
        }
    }

    fn supports(&self, label: OutcomeLabel) -> bool {
        use OutcomeLabel::*;
        match self {
            PartyPlan::Sharp(_) => label == First,
            PartyPlan::Joint2(_) => matches!(label, First | Second),
            PartyPlan::Joint2WithInferred { .. } => matches!(label, First | Second | Inferred),
            PartyPlan::Joint3(_) => matches!(label, First | Second | Third),
        }
    }

    /// Recorded value of `label` for the outcome with index `idx`.
    ///
    /// Outcome indices follow the element order of the underlying
    /// observable: sign +1 before -1, leftmost direction slowest.
    fn label_value(&self, idx: usize, label: OutcomeLabel) -> i32 {
        let sign = |bit: usize| 1 - 2 * (bit as i32);
        match self {
            PartyPlan::Sharp(_) => sign(idx),
            PartyPlan::Joint2(_) | PartyPlan::Joint2WithInferred { .. } => match label {
                OutcomeLabel::First => sign(idx >> 1),
                OutcomeLabel::Second => sign(idx & 1),
                OutcomeLabel::Inferred => sign(idx >> 1) + sign(idx & 1),
                OutcomeLabel::Third => unreachable!("validated earlier"),
            },
            PartyPlan::Joint3(_) => match label {
                OutcomeLabel::First => sign(idx >> 2),
                OutcomeLabel::Second => sign((idx >> 1) & 1),
                OutcomeLabel::Third => sign(idx & 1),
                OutcomeLabel::Inferred => unreachable!("validated earlier"),
            },
        }
    }
}

/// Measurement plan for all parties, ordered left to right.
#[derive(Debug, Clone)]
pub struct MeasurementPlan {
    parties: Vec<PartyPlan>,
}

impl MeasurementPlan {
    pub fn new(parties: Vec<PartyPlan>) -> Self {
        Self { parties }
    }

    pub fn n_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn party(&self, i: usize) -> &PartyPlan {
        &self.parties[i]
    }

    fn check_label(&self, party: usize, label: OutcomeLabel) -> Result<()> {
        if party >= self.parties.len() || !self.parties[party].supports(label) {
            return Err(Error::LabelNotInPlan { party, label });
        }
        Ok(())
    }

    /// Visits every outcome tuple with its probability under `rho`, last
    /// party fastest. Probabilities come from walking the outcome tree with
    /// shared Kronecker prefixes; the last factor is contracted against the
    /// state directly instead of being multiplied out.
    fn for_each_outcome<F>(&self, rho: &DensityMatrix, mut visit: F) -> Result<()>
    where
        F: FnMut(&[usize], f64),
    {
        let dim: usize = 1 << self.parties.len();
        if rho.dim() != dim {
            return Err(Error::DimensionMismatch(rho.dim(), dim));
        }
        let elements: Vec<Vec<HermitianOp>> =
            self.parties.iter().map(|p| p.elements()).collect();
        let mut idx = vec![0usize; self.parties.len()];
        enumerate_level(rho.matrix(), &elements, 0, None, &mut idx, &mut visit);
        Ok(())
    }
}

fn enumerate_level<F>(
    rho: &CMatrix,
    elements: &[Vec<HermitianOp>],
    level: usize,
    prefix: Option<&CMatrix>,
    idx: &mut Vec<usize>,
    visit: &mut F,
) where
    F: FnMut(&[usize], f64),
{
    let last = level == elements.len() - 1;
    for (i, e) in elements[level].iter().enumerate() {
        idx[level] = i;
        if last {
            let p = match prefix {
                None => rho
                    .trace_product(e.matrix())
                    .expect("plan and state dims were checked")
                    .re,
                Some(pref) => partial_trace_product(rho, pref, e.matrix()),
            };
            visit(idx, p);
        } else {
            let next = match prefix {
                None => e.matrix().clone(),
                Some(pref) => pref.kron(e.matrix()),
            };
            enumerate_level(rho, elements, level + 1, Some(&next), idx, visit);
        }
    }
}

/// tr(rho (prefix x e)) without forming the Kronecker product.
fn partial_trace_product(rho: &CMatrix, prefix: &CMatrix, e: &CMatrix) -> f64 {
    let d1 = prefix.dim();
    let d2 = e.dim();
    debug_assert_eq!(rho.dim(), d1 * d2);
    let mut acc = Complex64::new(0.0, 0.0);
    for i1 in 0..d1 {
        for j1 in 0..d1 {
            let w = prefix[(j1, i1)];
            let mut inner = Complex64::new(0.0, 0.0);
            for i2 in 0..d2 {
                for j2 in 0..d2 {
                    inner += rho[(i1 * d2 + i2, j1 * d2 + j2)] * e[(j2, i2)];
                }
            }
            acc += w * inner;
        }
    }
    acc.re
}

/// Product expectation of sharp spin observables, one direction per party.
pub fn sharp_correlation(rho: &DensityMatrix, directions: &[Direction]) -> Result<f64> {
    let ops: Vec<HermitianOp> = directions.iter().map(|d| bloch_observable(*d)).collect();
    expectation(rho, &tensor(&ops)?)
}

/// Expectation of the product of one recorded value per party, summed over
/// all outcome tuples of the plan.
pub fn joint_correlation(
    rho: &DensityMatrix,
    plan: &MeasurementPlan,
    selection: &[OutcomeLabel],
) -> Result<f64> {
    Ok(joint_correlations(rho, plan, &[selection])?[0])
}

/// Several correlation selections over one plan, sharing a single pass over
/// the outcome tuples. Bell expressions with a fixed plan but several label
/// choices per term go through here.
pub fn joint_correlations(
    rho: &DensityMatrix,
    plan: &MeasurementPlan,
    selections: &[&[OutcomeLabel]],
) -> Result<Vec<f64>> {
    for selection in selections {
        if selection.len() != plan.n_parties() {
            return Err(Error::SelectionLength {
                got: selection.len(),
                want: plan.n_parties(),
            });
        }
        for (party, label) in selection.iter().enumerate() {
            plan.check_label(party, *label)?;
        }
    }
    let mut accs = vec![0.0; selections.len()];
    plan.for_each_outcome(rho, |idx, p| {
        for (acc, selection) in accs.iter_mut().zip(selections) {
            let value: i32 = idx
                .iter()
                .zip(*selection)
                .enumerate()
                .map(|(party, (i, label))| plan.party(party).label_value(*i, *label))
                .product();
            *acc += f64::from(value) * p;
        }
    })?;
    Ok(accs)
}

/// Probabilities of all outcome tuples, in enumeration order (last party
/// fastest). They are non-negative and sum to one for any valid plan.
pub fn outcome_distribution(rho: &DensityMatrix, plan: &MeasurementPlan) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    plan.for_each_outcome(rho, |_, p| out.push(p))?;
    Ok(out)
}

/// A signed product of recorded values, one factor per (party, label) pair.
#[derive(Debug, Clone)]
pub struct SignedProduct {
    pub sign: i32,
    pub factors: Vec<(usize, OutcomeLabel)>,
}

impl SignedProduct {
    pub fn new(sign: i32, factors: Vec<(usize, OutcomeLabel)>) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Self { sign, factors }
    }

    pub fn plain(factors: Vec<(usize, OutcomeLabel)>) -> Self {
        Self::new(1, factors)
    }

    fn value(&self, plan: &MeasurementPlan, idx: &[usize]) -> i32 {
        self.factors
            .iter()
            .map(|(party, label)| plan.party(*party).label_value(idx[*party], *label))
            .product::<i32>()
            * self.sign
    }
}

/// Probability that all terms of an equality chain take the same value.
///
/// `p(a1 b2 = b1 a2)` is a chain of two products; chains of three express
/// events like `a1 b2 = b1 a2 = a3`. At least two terms are required.
pub fn coincidence_probability(
    rho: &DensityMatrix,
    plan: &MeasurementPlan,
    chain: &[SignedProduct],
) -> Result<f64> {
    if chain.len() < 2 {
        return Err(Error::PredicateTooShort);
    }
    for term in chain {
        for (party, label) in &term.factors {
            plan.check_label(*party, *label)?;
        }
    }
    let mut acc = 0.0;
    plan.for_each_outcome(rho, |idx, p| {
        let first = chain[0].value(plan, idx);
        if chain[1..].iter().all(|t| t.value(plan, idx) == first) {
            acc += p;
        }
    })?;
    Ok(acc)
}

/// Which marginal of a joint pair a variance query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointMarginal {
    A,
    B,
}

/// Variance of one recorded sign of a joint pair on a single-qubit state.
///
/// The outcome is +-1, so this equals 1 - (sharpness * <d . sigma>)^2: joint
/// measurement inflates the variance of an unsharpened component, and even a
/// spin eigenstate keeps variance 1 - alpha^2.
pub fn jm_variance(rho: &DensityMatrix, povm: &JointPovm2, which: JointMarginal) -> Result<f64> {
    let plan = MeasurementPlan::new(vec![PartyPlan::Joint2(povm.clone())]);
    let label = match which {
        JointMarginal::A => OutcomeLabel::First,
        JointMarginal::B => OutcomeLabel::Second,
    };
    let mut mean = 0.0;
    let mut second_moment = 0.0;
    plan.for_each_outcome(rho, |idx, p| {
        let v = f64::from(plan.party(0).label_value(idx[0], label));
        mean += v * p;
        second_moment += v * v * p;
    })?;
    Ok(second_moment - mean * mean)
}

/// Residuals of the sharpness-scaling identity on a two-party state.
#[derive(Debug, Clone, Copy)]
pub struct ScalingResidual {
    /// |E_joint(a, c) - alpha E_sharp(a, c)|
    pub a: f64,
    /// |E_joint(b, c) - beta E_sharp(b, c)|
    pub b: f64,
}

impl ScalingResidual {
    pub fn max(&self) -> f64 {
        self.a.max(self.b)
    }
}

/// Checks that replacing a sharp measurement by one marginal of a joint pair
/// rescales any correlation by exactly that marginal's sharpness. Party 1
/// holds the joint pair, party 2 measures `c` sharply; the identity holds
/// for every state, mixed states included.
pub fn correlation_scaling_residual(
    rho: &DensityMatrix,
    povm: &JointPovm2,
    c: Direction,
) -> Result<ScalingResidual> {
    let plan = MeasurementPlan::new(vec![PartyPlan::Joint2(povm.clone()), PartyPlan::Sharp(c)]);
    let joint_a = joint_correlation(rho, &plan, &[OutcomeLabel::First, OutcomeLabel::First])?;
    let joint_b = joint_correlation(rho, &plan, &[OutcomeLabel::Second, OutcomeLabel::First])?;
    let sharp_a = sharp_correlation(rho, &[povm.direction_a(), c])?;
    let sharp_b = sharp_correlation(rho, &[povm.direction_b(), c])?;
    Ok(ScalingResidual {
        a: (joint_a - povm.alpha() * sharp_a).abs(),
        b: (joint_b - povm.beta() * sharp_b).abs(),
    })
}

/// How much the third party's setting choice moves the probability of the
/// two-party event p(a1 b2 = b1 a2). The event probability is computed by
/// explicit measurement update: for each third-party outcome, condition the
/// state, evaluate the event on the remaining two parties, and recombine.
/// Zero (to rounding) for every state: the choice of a remote setting
/// cannot signal.
pub fn no_signaling_check(
    rho: &DensityMatrix,
    povm1: &JointPovm2,
    povm2: &JointPovm2,
    third_a: Direction,
    third_b: Direction,
) -> Result<f64> {
    let pa = event_probability_given_third(rho, povm1, povm2, third_a)?;
    let pb = event_probability_given_third(rho, povm1, povm2, third_b)?;
    Ok((pa - pb).abs())
}

/// The chain a1 b2 = b1 a2 on the first two parties.
fn matched_products_chain() -> Vec<SignedProduct> {
    vec![
        SignedProduct::plain(vec![(0, OutcomeLabel::First), (1, OutcomeLabel::Second)]),
        SignedProduct::plain(vec![(0, OutcomeLabel::Second), (1, OutcomeLabel::First)]),
    ]
}

fn event_probability_given_third(
    rho: &DensityMatrix,
    povm1: &JointPovm2,
    povm2: &JointPovm2,
    third: Direction,
) -> Result<f64> {
    let two_party = MeasurementPlan::new(vec![
        PartyPlan::Joint2(povm1.clone()),
        PartyPlan::Joint2(povm2.clone()),
    ]);
    let chain = matched_products_chain();
    let mut total = 0.0;
    for sign in [1, -1] {
        if let Some((p, conditional)) = rho.conditioned_on_last(&spin_projector(third, sign))? {
            total += p * coincidence_probability(&conditional, &two_party, &chain)?;
        }
    }
    Ok(total)
}
