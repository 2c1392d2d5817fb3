//! Bell expressions under sharp and joint measurement regimes.
//!
//! Each evaluator returns an [`InequalityReport`] carrying the value, the
//! local realistic bound, the quantum ceiling where one is known, and a
//! violation flag. The sharp evaluators take explicit settings; the joint
//! evaluators replace one or more parties' sharp readouts with outcomes of a
//! joint unsharp measurement, which rescales every correlation by the
//! corresponding sharpness factors and drags the attainable maximum down to
//! (or below) the classical bound. All values are computed by exact
//! enumeration over outcome tuples, so the joint-regime ceilings emerge from
//! the POVM elements rather than from the scaling shortcut.
//!
//! [`presets`] holds the named measurement geometries that attain the
//! extremal values; [`bounds`] holds the bounds themselves as closed forms.

use std::fmt;

use crate::correlations::{
    coincidence_probability, joint_correlation, joint_correlations, sharp_correlation,
    MeasurementPlan, OutcomeLabel, PartyPlan, SignedProduct,
};
use crate::error::Result;
use crate::pauli::{DensityMatrix, Direction};
use crate::povm::{JointPovm2, JointPovm3};
use crate::search;
use crate::TOL_DERIVED;

/// Which Bell expression a report refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpressionName {
    Chsh,
    Mermin,
    MerminJoint,
    GhzHierarchy,
    Gisin3,
    Gisin4,
    Gisin3Joint,
    GisinXyzJoint,
}

impl fmt::Display for ExpressionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExpressionName::Chsh => "chsh",
            ExpressionName::Mermin => "mermin",
            ExpressionName::MerminJoint => "mermin_joint",
            ExpressionName::GhzHierarchy => "ghz_hierarchy",
            ExpressionName::Gisin3 => "gisin3",
            ExpressionName::Gisin4 => "gisin4",
            ExpressionName::Gisin3Joint => "gisin3_joint",
            ExpressionName::GisinXyzJoint => "gisin_xyz_joint",
        })
    }
}

impl std::str::FromStr for ExpressionName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "chsh" => ExpressionName::Chsh,
            "mermin" => ExpressionName::Mermin,
            "mermin_joint" => ExpressionName::MerminJoint,
            "ghz_hierarchy" => ExpressionName::GhzHierarchy,
            "gisin3" => ExpressionName::Gisin3,
            "gisin4" => ExpressionName::Gisin4,
            "gisin3_joint" => ExpressionName::Gisin3Joint,
            "gisin_xyz_joint" => ExpressionName::GisinXyzJoint,
            _ => return Err(format!("unknown expression '{s}'")),
        })
    }
}

/// How many parties replaced their sharp measurement with a joint one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Sharp,
    JointOnOne,
    JointOnTwo,
    JointOnAll,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Sharp => "sharp",
            Regime::JointOnOne => "joint-on-one",
            Regime::JointOnTwo => "joint-on-two",
            Regime::JointOnAll => "joint-on-all",
        })
    }
}

impl std::str::FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "sharp" => Regime::Sharp,
            "joint-on-one" => Regime::JointOnOne,
            "joint-on-two" => Regime::JointOnTwo,
            "joint-on-all" => Regime::JointOnAll,
            _ => return Err(format!("unknown regime '{s}'")),
        })
    }
}

/// Value of one Bell expression against its bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub name: ExpressionName,
    pub value: f64,
    pub classical_bound: f64,
    /// Quantum ceiling of the expression in this regime, when known.
    pub quantum_bound: Option<f64>,
    pub regime: Regime,
    /// Whether `value` exceeds the classical bound beyond rounding.
    pub violated: bool,
}

impl InequalityReport {
    pub fn new(
        name: ExpressionName,
        value: f64,
        classical_bound: f64,
        quantum_bound: Option<f64>,
        regime: Regime,
    ) -> Self {
        Self {
            name,
            value,
            classical_bound,
            quantum_bound,
            regime,
            violated: value > classical_bound + TOL_DERIVED,
        }
    }

    /// value / classical bound; above 1 exactly when violated.
    pub fn violation_ratio(&self) -> f64 {
        self.value / self.classical_bound
    }
}

/// Classical bounds and quantum ceilings as closed forms. Everything here is
/// a function rather than a stored constant so the exact expressions stay
/// visible and no rounded literal can drift.
pub mod bounds {
    /// Local realistic bound of the two-party two-setting combination.
    pub fn chsh_classical() -> f64 {
        2.0
    }

    /// Quantum ceiling of the same combination.
    pub fn tsirelson() -> f64 {
        2.0 * std::f64::consts::SQRT_2
    }

    /// Local realistic bound of the three-party combination.
    pub fn mermin_classical() -> f64 {
        2.0
    }

    /// Algebraic maximum of the three-party combination, attained by the
    /// GHZ state.
    pub fn mermin_quantum() -> f64 {
        4.0
    }

    /// Ceiling of the three-party combination once two parties measure
    /// jointly; coincides with the classical bound.
    pub fn mermin_joint_ceiling() -> f64 {
        2.0
    }

    /// Local realistic bound of the three-setting combination.
    pub fn gisin3_classical() -> f64 {
        5.0
    }

    /// Singlet value of the three-setting combination at the coplanar
    /// geometry.
    pub fn gisin3_quantum() -> f64 {
        6.0
    }

    /// Local realistic bound of the four-setting combination.
    pub fn gisin4_classical() -> f64 {
        6.0
    }

    /// Singlet value of the four-setting combination at the orthogonal-axes
    /// geometry.
    pub fn gisin4_quantum() -> f64 {
        4.0 * 3f64.sqrt()
    }

    /// Largest common sharpness admitting a joint measurement of the
    /// 120-degree coplanar pair.
    pub fn coplanar_max_sharpness() -> f64 {
        2.0 / (1.0 + 3f64.sqrt())
    }

    /// Ceiling of the three-setting combination under the coplanar joint
    /// scheme: six times the largest feasible sharpness.
    pub fn gisin3_joint_ceiling() -> f64 {
        6.0 * coplanar_max_sharpness()
    }

    /// Ceiling of the four-setting combination under the orthogonal-axes
    /// joint scheme.
    pub fn gisin_xyz_joint_ceiling() -> f64 {
        4.0
    }
}

/// Named measurement geometries attaining the extremal values.
pub mod presets {
    use super::Direction;

    /// Two-setting geometry reaching the quantum ceiling on the singlet:
    /// party 1 along x and y, party 2 along the reversed diagonals between
    /// them.
    pub fn chsh_optimal() -> ([Direction; 2], [Direction; 2]) {
        let a2 = Direction::new(-1.0, -1.0, 0.0).expect("nonzero");
        let b2 = Direction::new(-1.0, 1.0, 0.0).expect("nonzero");
        ([Direction::X, Direction::Y], [a2, b2])
    }

    /// x settings and y settings for all three parties.
    pub fn ghz_xy() -> ([Direction; 3], [Direction; 3]) {
        (
            [Direction::X, Direction::X, Direction::X],
            [Direction::Y, Direction::Y, Direction::Y],
        )
    }

    /// Coplanar three-setting geometry: party 2 at 0, 60 and 120 degrees in
    /// the xy plane, party 1 antiparallel to the three surviving combination
    /// vectors. Every term then contributes its full weight on the singlet.
    pub fn gisin_coplanar() -> ([Direction; 3], [Direction; 3]) {
        let a2 = Direction::X;
        let b2 = Direction::new(0.5, 0.75f64.sqrt(), 0.0).expect("nonzero");
        let c2 = Direction::new(-0.5, 0.75f64.sqrt(), 0.0).expect("nonzero");
        let a1 = Direction::from_vec(-(a2.vec() + b2.vec() + c2.vec())).expect("nonzero");
        let b1 = Direction::from_vec(-(a2.vec() + b2.vec() - c2.vec())).expect("nonzero");
        let c1 = Direction::from_vec(-(a2.vec() - b2.vec() - c2.vec())).expect("nonzero");
        ([a1, b1, c1], [a2, b2, c2])
    }

    /// Orthogonal-axes four-setting geometry: party 2 along x, y, z; party 1
    /// antiparallel to the four sign combinations of the axes.
    pub fn gisin_xyz() -> ([Direction; 4], [Direction; 3]) {
        let x = Direction::X.vec();
        let y = Direction::Y.vec();
        let z = Direction::Z.vec();
        let a1 = Direction::from_vec(-(x + y + z)).expect("nonzero");
        let b1 = Direction::from_vec(-((x + y) - z)).expect("nonzero");
        let c1 = Direction::from_vec(-((x - y) - z)).expect("nonzero");
        let d1 = Direction::from_vec(-((x - y) + z)).expect("nonzero");
        ([a1, b1, c1, d1], [Direction::X, Direction::Y, Direction::Z])
    }
}

/// |E(a1,a2) + E(a1,b2) + E(b1,a2) - E(b1,b2)| with sharp settings.
pub fn chsh_value(
    rho: &DensityMatrix,
    a1: Direction,
    b1: Direction,
    a2: Direction,
    b2: Direction,
) -> Result<InequalityReport> {
    let e = |x: Direction, y: Direction| sharp_correlation(rho, &[x, y]);
    let value = (e(a1, a2)? + e(a1, b2)? + e(b1, a2)? - e(b1, b2)?).abs();
    Ok(InequalityReport::new(
        ExpressionName::Chsh,
        value,
        bounds::chsh_classical(),
        Some(bounds::tsirelson()),
        Regime::Sharp,
    ))
}

/// |E(x1,x2,x3) - E(x1,y2,y3) - E(y1,x2,y3) - E(y1,y2,x3)| with sharp
/// settings, one x and one y per party.
pub fn mermin_value(
    rho: &DensityMatrix,
    xs: [Direction; 3],
    ys: [Direction; 3],
) -> Result<InequalityReport> {
    let e = |d: [Direction; 3]| sharp_correlation(rho, &d);
    let value = (e([xs[0], xs[1], xs[2]])?
        - e([xs[0], ys[1], ys[2]])?
        - e([ys[0], xs[1], ys[2]])?
        - e([ys[0], ys[1], xs[2]])?)
    .abs();
    Ok(InequalityReport::new(
        ExpressionName::Mermin,
        value,
        bounds::mermin_classical(),
        Some(bounds::mermin_quantum()),
        Regime::Sharp,
    ))
}

/// The three-party combination with joint pairs on parties 1 and 2 and a
/// sharp third party choosing `third_x` or `third_y` per term.
///
/// On the GHZ state with x/y pairs this equals (alpha1 + beta1)(alpha2 +
/// beta2), so it can reach the classical bound 2 only when every factor is
/// 1/sqrt(2), and never exceed it.
pub fn mermin_joint_value(
    rho: &DensityMatrix,
    povm1: &JointPovm2,
    povm2: &JointPovm2,
    third_x: Direction,
    third_y: Direction,
) -> Result<InequalityReport> {
    use OutcomeLabel::{First, Second};
    let plan_x = MeasurementPlan::new(vec![
        PartyPlan::Joint2(povm1.clone()),
        PartyPlan::Joint2(povm2.clone()),
        PartyPlan::Sharp(third_x),
    ]);
    let plan_y = MeasurementPlan::new(vec![
        PartyPlan::Joint2(povm1.clone()),
        PartyPlan::Joint2(povm2.clone()),
        PartyPlan::Sharp(third_y),
    ]);
    let x_terms = joint_correlations(
        rho,
        &plan_x,
        &[&[First, First, First], &[Second, Second, First]],
    )?;
    let y_terms = joint_correlations(
        rho,
        &plan_y,
        &[&[First, Second, First], &[Second, First, First]],
    )?;
    let value = (x_terms[0] - y_terms[0] - y_terms[1] - x_terms[1]).abs();
    Ok(InequalityReport::new(
        ExpressionName::MerminJoint,
        value,
        bounds::mermin_classical(),
        Some(bounds::mermin_joint_ceiling()),
        Regime::JointOnTwo,
    ))
}

/// Both sides of the probability-form inequalities for a plan with joint
/// pairs on parties 1 and 2.
///
/// The correlation combination splits into two halves, each bounded by a
/// coincidence probability; since the two events partition the outcomes, the
/// two halves together can never exceed 2.
#[derive(Debug, Clone, Copy)]
pub struct MerminTypeCheck {
    /// p(a1 b2 = b1 a2), third party measuring its first setting.
    pub p_same: f64,
    /// p(a1 a2 = -b1 b2), third party measuring its second setting.
    pub p_anti: f64,
    /// |E(a1,b2,a3) + E(b1,a2,a3)| / 2, the bound p_same must dominate.
    pub first_rhs: f64,
    /// |E(a1,a2,b3) - E(b1,b2,b3)| / 2, the bound p_anti must dominate.
    pub second_rhs: f64,
    /// The full combination 2 (first_rhs + second_rhs).
    pub combined: f64,
}

impl MerminTypeCheck {
    /// Both probability bounds and the combined ceiling, within `tol`.
    pub fn holds(&self, tol: f64) -> bool {
        self.p_same + tol >= self.first_rhs
            && self.p_anti + tol >= self.second_rhs
            && self.combined <= 2.0 + tol
    }

    /// |p_same + p_anti - 1|; zero because the two events partition the
    /// outcome tuples.
    pub fn partition_residual(&self) -> f64 {
        (self.p_same + self.p_anti - 1.0).abs()
    }
}

/// Evaluates the probability-form inequalities by exact enumeration.
/// `third_first` appears in the mixed-label terms, `third_second` in the
/// straight-label terms.
pub fn mermin_type_probability_check(
    rho: &DensityMatrix,
    povm1: &JointPovm2,
    povm2: &JointPovm2,
    third_first: Direction,
    third_second: Direction,
) -> Result<MerminTypeCheck> {
    use OutcomeLabel::{First, Second};
    let plan_first = MeasurementPlan::new(vec![
        PartyPlan::Joint2(povm1.clone()),
        PartyPlan::Joint2(povm2.clone()),
        PartyPlan::Sharp(third_first),
    ]);
    let plan_second = MeasurementPlan::new(vec![
        PartyPlan::Joint2(povm1.clone()),
        PartyPlan::Joint2(povm2.clone()),
        PartyPlan::Sharp(third_second),
    ]);

    let same_chain = [
        SignedProduct::plain(vec![(0, First), (1, Second)]),
        SignedProduct::plain(vec![(0, Second), (1, First)]),
    ];
    let p_same = coincidence_probability(rho, &plan_first, &same_chain)?;
    let anti_chain = [
        SignedProduct::plain(vec![(0, First), (1, First)]),
        SignedProduct::new(-1, vec![(0, Second), (1, Second)]),
    ];
    let p_anti = coincidence_probability(rho, &plan_second, &anti_chain)?;

    let mixed = joint_correlations(
        rho,
        &plan_first,
        &[&[First, Second, First], &[Second, First, First]],
    )?;
    let straight = joint_correlations(
        rho,
        &plan_second,
        &[&[First, First, First], &[Second, Second, First]],
    )?;
    let first_rhs = 0.5 * (mixed[0] + mixed[1]).abs();
    let second_rhs = 0.5 * (straight[0] - straight[1]).abs();
    Ok(MerminTypeCheck {
        p_same,
        p_anti,
        first_rhs,
        second_rhs,
        combined: 2.0 * (first_rhs + second_rhs),
    })
}

/// How much of the three-party combination survives as joint measurement
/// replaces sharp readouts, party by party.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HierarchyRegime {
    /// All parties sharp: the algebraic maximum 4.
    Sharp,
    /// One party measures x and y jointly, the others stay sharp with free
    /// settings: the two-party quantum ceiling 2 sqrt(2).
    JointOnOne,
    /// Two parties measure jointly: the classical bound 2.
    JointOnTwo,
}

impl fmt::Display for HierarchyRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HierarchyRegime::Sharp => "sharp",
            HierarchyRegime::JointOnOne => "joint-on-one",
            HierarchyRegime::JointOnTwo => "joint-on-two",
        })
    }
}

impl std::str::FromStr for HierarchyRegime {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "sharp" => HierarchyRegime::Sharp,
            "joint-on-one" => HierarchyRegime::JointOnOne,
            "joint-on-two" => HierarchyRegime::JointOnTwo,
            _ => return Err(format!("unknown hierarchy regime '{s}'")),
        })
    }
}

/// Maximum of the three-party combination on the GHZ state for the given
/// regime. The sharp value is evaluated directly at the x/y settings; the
/// joint regimes are maximized numerically over their free parameters within
/// `budget` evaluations, so the ceilings are recovered rather than assumed.
pub fn ghz_hierarchy(regime: HierarchyRegime, budget: usize, seed: u64) -> Result<f64> {
    match regime {
        HierarchyRegime::Sharp => {
            let (xs, ys) = presets::ghz_xy();
            Ok(mermin_value(&DensityMatrix::ghz(), xs, ys)?.value)
        }
        HierarchyRegime::JointOnTwo => Ok(search::maximize_joint_regime(
            search::JointExpression::MerminJoint,
            budget,
            seed,
        )?
        .best_value),
        HierarchyRegime::JointOnOne => {
            let ghz = DensityMatrix::ghz();
            let space = search::ParamSpace::new(vec![
                search::Block::Interval { lo: 0.0, hi: 1.0 },
                search::Block::Interval { lo: 0.0, hi: 1.0 },
                search::Block::Sphere,
                search::Block::Sphere,
                search::Block::Sphere,
                search::Block::Sphere,
            ]);
            let objective = move |p: &[f64]| {
                let povm = JointPovm2::build(p[0], Direction::X, p[1], Direction::Y)
                    .expect("projected sharpness pair is feasible");
                joint_on_one_combination(
                    &ghz,
                    &povm,
                    search::direction_at(p, 2),
                    search::direction_at(p, 4),
                    search::direction_at(p, 6),
                    search::direction_at(p, 8),
                )
                .expect("plan matches the three-qubit state")
            };
            let result = search::maximize_projected(
                objective,
                |p: &mut [f64]| {
                    search::project_busch_pair(&mut p[0..2], Direction::X, Direction::Y)
                },
                &space,
                budget,
                search::DEFAULT_RESTARTS,
                seed,
            )?;
            Ok(result.best_value)
        }
    }
}

/// The four-term combination with a joint x/y pair on party 1 and sharp,
/// freely chosen settings on parties 2 and 3.
fn joint_on_one_combination(
    rho: &DensityMatrix,
    povm: &JointPovm2,
    x2: Direction,
    y2: Direction,
    x3: Direction,
    y3: Direction,
) -> Result<f64> {
    use OutcomeLabel::First;
    let term = |second: Direction, third: Direction, label: OutcomeLabel| -> Result<f64> {
        let plan = MeasurementPlan::new(vec![
            PartyPlan::Joint2(povm.clone()),
            PartyPlan::Sharp(second),
            PartyPlan::Sharp(third),
        ]);
        joint_correlation(rho, &plan, &[label, First, First])
    };
    Ok((term(x2, x3, OutcomeLabel::First)? - term(y2, y3, OutcomeLabel::First)?
        - term(x2, y3, OutcomeLabel::Second)?
        - term(y2, x3, OutcomeLabel::Second)?)
    .abs())
}

const GISIN3_SIGNS: [[f64; 3]; 3] = [[1.0, 1.0, 1.0], [1.0, 1.0, -1.0], [1.0, -1.0, -1.0]];
const GISIN4_FOURTH_ROW: [f64; 3] = [1.0, -1.0, 1.0];

/// The nine-term three-setting combination: party 1 settings index the rows,
/// party 2 settings the columns, with the sign pattern
/// (+ + +) / (+ + -) / (+ - -).
pub fn gisin3_value(
    rho: &DensityMatrix,
    ones: [Direction; 3],
    twos: [Direction; 3],
) -> Result<InequalityReport> {
    let mut value = 0.0;
    for (row, one) in GISIN3_SIGNS.iter().zip(&ones) {
        for (sign, two) in row.iter().zip(&twos) {
            value += sign * sharp_correlation(rho, &[*one, *two])?;
        }
    }
    Ok(InequalityReport::new(
        ExpressionName::Gisin3,
        value,
        bounds::gisin3_classical(),
        Some(bounds::gisin3_quantum()),
        Regime::Sharp,
    ))
}

/// The twelve-term four-setting combination: the nine-term pattern plus a
/// fourth party-1 row with signs (+ - +).
pub fn gisin4_value(
    rho: &DensityMatrix,
    ones: [Direction; 4],
    twos: [Direction; 3],
) -> Result<InequalityReport> {
    let mut value = gisin3_value(rho, [ones[0], ones[1], ones[2]], twos)?.value;
    for (sign, two) in GISIN4_FOURTH_ROW.iter().zip(&twos) {
        value += sign * sharp_correlation(rho, &[ones[3], *two])?;
    }
    Ok(InequalityReport::new(
        ExpressionName::Gisin4,
        value,
        bounds::gisin4_classical(),
        Some(bounds::gisin4_quantum()),
        Regime::Sharp,
    ))
}

/// The three-setting combination with party 2 measuring the coplanar scheme
/// jointly: one four-outcome observable along the outer pair of directions,
/// with the middle direction read from the outcome sum.
///
/// Every correlation picks up the common sharpness factor, so the value is
/// 6 alpha for the singlet at the canonical geometry, and its ceiling over
/// feasible alpha stays strictly below the classical bound 5.
pub fn gisin3_joint_value(rho: &DensityMatrix, alpha: f64) -> Result<InequalityReport> {
    use OutcomeLabel::{First, Inferred, Second};
    let (ones, twos) = presets::gisin_coplanar();
    let povm = JointPovm2::build(alpha, twos[0], alpha, twos[2])?;
    let party2 = PartyPlan::joint2_with_inferred(povm)?;
    let labels: [OutcomeLabel; 3] = [First, Inferred, Second];
    let mut value = 0.0;
    for (row, one) in GISIN3_SIGNS.iter().zip(&ones) {
        let plan = MeasurementPlan::new(vec![PartyPlan::Sharp(*one), party2.clone()]);
        let selections: [[OutcomeLabel; 2]; 3] =
            [[First, labels[0]], [First, labels[1]], [First, labels[2]]];
        let refs: [&[OutcomeLabel]; 3] =
            [&selections[0], &selections[1], &selections[2]];
        let es = joint_correlations(rho, &plan, &refs)?;
        for (sign, e) in row.iter().zip(&es) {
            value += sign * e;
        }
    }
    Ok(InequalityReport::new(
        ExpressionName::Gisin3Joint,
        value,
        bounds::gisin3_classical(),
        Some(bounds::gisin3_joint_ceiling()),
        Regime::JointOnOne,
    ))
}

/// The four-setting combination on the singlet with party 2 measuring all
/// three orthogonal axes in a single eight-outcome joint observable at common
/// sharpness `alpha`, party 1 at the canonical antiparallel settings.
///
/// Equals 4 sqrt(3) alpha; the feasibility condition caps it at 4, below the
/// classical bound 6.
pub fn gisin_xyz_joint_value(alpha: f64) -> Result<InequalityReport> {
    use OutcomeLabel::{First, Second, Third};
    let singlet = DensityMatrix::singlet();
    let (ones, axes) = presets::gisin_xyz();
    let povm = JointPovm3::build([alpha, alpha, alpha], axes)?;
    let rows: [[f64; 3]; 4] = [
        GISIN3_SIGNS[0],
        GISIN3_SIGNS[1],
        GISIN3_SIGNS[2],
        GISIN4_FOURTH_ROW,
    ];
    let mut value = 0.0;
    for (row, one) in rows.iter().zip(&ones) {
        let plan = MeasurementPlan::new(vec![
            PartyPlan::Sharp(*one),
            PartyPlan::Joint3(povm.clone()),
        ]);
        let selections: [[OutcomeLabel; 2]; 3] =
            [[First, First], [First, Second], [First, Third]];
        let refs: [&[OutcomeLabel]; 3] =
            [&selections[0], &selections[1], &selections[2]];
        let es = joint_correlations(&singlet, &plan, &refs)?;
        for (sign, e) in row.iter().zip(&es) {
            value += sign * e;
        }
    }
    Ok(InequalityReport::new(
        ExpressionName::GisinXyzJoint,
        value,
        bounds::gisin4_classical(),
        Some(bounds::gisin_xyz_joint_ceiling()),
        Regime::JointOnOne,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::povm::max_symmetric_sharpness;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const ROOT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn random_direction(rng: &mut impl Rng) -> Direction {
        let z: f64 = rng.gen::<f64>() * 2.0 - 1.0;
        let phi: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
        let r = (1.0 - z * z).sqrt();
        Direction::new(r * phi.cos(), r * phi.sin(), z).unwrap()
    }

    fn random_feasible_povm(rng: &mut impl Rng) -> JointPovm2 {
        let a = random_direction(rng);
        let b = random_direction(rng);
        let cap = max_symmetric_sharpness(a, b).min(1.0);
        let alpha = rng.gen::<f64>() * cap;
        let beta = rng.gen::<f64>() * cap;
        JointPovm2::build(alpha, a, beta, b).unwrap()
    }

    fn random_product_state(rng: &mut impl Rng) -> DensityMatrix {
        let mut qubit = || {
            let theta: f64 = rng.gen::<f64>() * std::f64::consts::PI;
            let phi: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
            [
                Complex64::new((theta / 2.0).cos(), 0.0),
                Complex64::from_polar((theta / 2.0).sin(), phi),
            ]
        };
        let u = qubit();
        let v = qubit();
        let mut amps = [Complex64::new(0.0, 0.0); 4];
        for i in 0..2 {
            for j in 0..2 {
                amps[i * 2 + j] = u[i] * v[j];
            }
        }
        DensityMatrix::from_amplitudes(&amps).unwrap()
    }

    #[test]
    fn two_setting_preset_reaches_the_quantum_ceiling() {
        let (ones, twos) = presets::chsh_optimal();
        let report = chsh_value(
            &DensityMatrix::singlet(),
            ones[0],
            ones[1],
            twos[0],
            twos[1],
        )
        .unwrap();
        assert!((report.value - bounds::tsirelson()).abs() < 1e-12);
        assert!(report.violated);
        assert!((report.violation_ratio() - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert_eq!(report.regime, Regime::Sharp);
    }

    #[test]
    fn two_setting_value_with_all_directions_equal() {
        let d = Direction::new(0.3, -0.2, 0.93).unwrap();
        let report = chsh_value(&DensityMatrix::singlet(), d, d, d, d).unwrap();
        // three terms at -1 and the subtracted one at -1: |-3 + 1| = 2
        assert!((report.value - 2.0).abs() < 1e-12);
        assert!(!report.violated);
    }

    #[test]
    fn product_states_respect_the_classical_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let rho = random_product_state(&mut rng);
            let report = chsh_value(
                &rho,
                random_direction(&mut rng),
                random_direction(&mut rng),
                random_direction(&mut rng),
                random_direction(&mut rng),
            )
            .unwrap();
            assert!(
                report.value <= bounds::chsh_classical() + 1e-12,
                "product state reached {}",
                report.value
            );
        }
    }

    #[test]
    fn no_state_or_settings_beat_the_quantum_ceiling() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for i in 0..1000 {
            let pure = DensityMatrix::random_pure(2, rng.gen()).unwrap();
            let rho = if i % 3 == 0 {
                let other = DensityMatrix::random_pure(2, rng.gen()).unwrap();
                let w = rng.gen::<f64>();
                DensityMatrix::mixture(&[(w, pure), (1.0 - w, other)]).unwrap()
            } else {
                pure
            };
            let report = chsh_value(
                &rho,
                random_direction(&mut rng),
                random_direction(&mut rng),
                random_direction(&mut rng),
                random_direction(&mut rng),
            )
            .unwrap();
            assert!(report.value <= bounds::tsirelson() + 1e-6);
        }
    }

    #[test]
    fn reversing_a_direction_relabels_without_changing_the_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..30 {
            let rho = DensityMatrix::random_pure(2, rng.gen()).unwrap();
            let (a1, b1) = (random_direction(&mut rng), random_direction(&mut rng));
            let (a2, b2) = (random_direction(&mut rng), random_direction(&mut rng));
            let base = chsh_value(&rho, a1, b1, a2, b2).unwrap().value;
            // reversing b1 while swapping party 2's settings, or reversing
            // b2 while swapping the party-1 roles, rebuilds the same sum
            let flip_b1 = chsh_value(&rho, a1, b1.opposite(), b2, a2).unwrap().value;
            let flip_b2 = chsh_value(&rho, b1, a1, a2, b2.opposite()).unwrap().value;
            assert!((base - flip_b1).abs() < 1e-12);
            assert!((base - flip_b2).abs() < 1e-12);
        }
    }

    #[test]
    fn three_party_combination_peaks_on_ghz() {
        let (xs, ys) = presets::ghz_xy();
        let report = mermin_value(&DensityMatrix::ghz(), xs, ys).unwrap();
        assert!((report.value - 4.0).abs() < 1e-12);
        assert!(report.violated);
        assert_eq!(report.quantum_bound, Some(4.0));
    }

    #[test]
    fn three_party_combination_vanishes_on_the_maximally_mixed_state() {
        let (xs, ys) = presets::ghz_xy();
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        let report = mermin_value(&rho, xs, ys).unwrap();
        assert!(report.value.abs() < 1e-14);
        assert!(!report.violated);
    }

    #[test]
    fn negating_one_y_setting_moves_the_weight_to_the_adjusted_pattern() {
        let ghz = DensityMatrix::ghz();
        let (xs, mut ys) = presets::ghz_xy();
        ys[1] = ys[1].opposite();
        // the fixed sign pattern now cancels term against term
        let report = mermin_value(&ghz, xs, ys).unwrap();
        assert!(report.value.abs() < 1e-12, "got {}", report.value);
        // flipping the signs of the terms containing the negated setting
        // restores the full value
        let e = |d: [Direction; 3]| sharp_correlation(&ghz, &d).unwrap();
        let adjusted = (e([xs[0], xs[1], xs[2]]) + e([xs[0], ys[1], ys[2]])
            - e([ys[0], xs[1], ys[2]])
            + e([ys[0], ys[1], xs[2]]))
        .abs();
        assert!((adjusted - 4.0).abs() < 1e-12);
    }

    #[test]
    fn joint_pairs_on_two_parties_reach_exactly_the_classical_bound() {
        let ghz = DensityMatrix::ghz();
        let povm = JointPovm2::build(ROOT_HALF, Direction::X, ROOT_HALF, Direction::Y).unwrap();
        let report =
            mermin_joint_value(&ghz, &povm, &povm, Direction::X, Direction::Y).unwrap();
        assert!((report.value - 2.0).abs() < 1e-10, "got {}", report.value);
        assert!(!report.violated);
        assert_eq!(report.regime, Regime::JointOnTwo);
    }

    #[test]
    fn joint_combination_far_from_the_boundary() {
        let ghz = DensityMatrix::ghz();
        let povm = JointPovm2::build(0.5, Direction::X, 0.5, Direction::Y).unwrap();
        let report =
            mermin_joint_value(&ghz, &povm, &povm, Direction::X, Direction::Y).unwrap();
        assert!((report.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn joint_combination_matches_the_factor_product_on_a_grid() {
        let ghz = DensityMatrix::ghz();
        for &a1 in &[0.3, 0.5, 0.65] {
            for &b1 in &[0.3, 0.5, 0.65] {
                for &a2 in &[0.3, 0.5, 0.65] {
                    for &b2 in &[0.3, 0.5, 0.65] {
                        let p1 = JointPovm2::build(a1, Direction::X, b1, Direction::Y).unwrap();
                        let p2 = JointPovm2::build(a2, Direction::X, b2, Direction::Y).unwrap();
                        let report =
                            mermin_joint_value(&ghz, &p1, &p2, Direction::X, Direction::Y)
                                .unwrap();
                        let closed = (a1 + b1) * (a2 + b2);
                        assert!(
                            (report.value - closed).abs() < 1e-12,
                            "({a1},{b1},{a2},{b2}): {} vs {closed}",
                            report.value
                        );
                        assert!(report.value <= 2.0 + 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn probability_form_equalities_at_the_symmetric_point() {
        let ghz = DensityMatrix::ghz();
        let povm = JointPovm2::build(ROOT_HALF, Direction::X, ROOT_HALF, Direction::Y).unwrap();
        // the mixed-label terms carry y on the third party, the straight
        // ones x; with that assignment every bound is tight
        let check =
            mermin_type_probability_check(&ghz, &povm, &povm, Direction::Y, Direction::X)
                .unwrap();
        assert!((check.p_same - 0.5).abs() < 1e-12);
        assert!((check.p_anti - 0.5).abs() < 1e-12);
        assert!((check.first_rhs - 0.5).abs() < 1e-12);
        assert!((check.second_rhs - 0.5).abs() < 1e-12);
        assert!((check.combined - 2.0).abs() < 1e-12);
        assert!(check.holds(1e-12));
        assert!(check.partition_residual() < 1e-12);

        // swapping the third-party assignment kills every correlation term
        let swapped =
            mermin_type_probability_check(&ghz, &povm, &povm, Direction::X, Direction::Y)
                .unwrap();
        assert!(swapped.combined.abs() < 1e-12);
        assert!(swapped.holds(1e-12));
    }

    #[test]
    fn probability_form_holds_for_random_states_and_plans() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..30 {
            let rho = DensityMatrix::random_pure(3, rng.gen()).unwrap();
            let povm1 = random_feasible_povm(&mut rng);
            let povm2 = random_feasible_povm(&mut rng);
            let check = mermin_type_probability_check(
                &rho,
                &povm1,
                &povm2,
                random_direction(&mut rng),
                random_direction(&mut rng),
            )
            .unwrap();
            assert!(check.holds(1e-10), "violated: {check:?}");
            assert!(check.partition_residual() < 1e-10);
        }
    }

    #[test]
    fn hierarchy_sharp_level_is_the_algebraic_maximum() {
        let value = ghz_hierarchy(HierarchyRegime::Sharp, 1, 1).unwrap();
        assert!((value - 4.0).abs() < 1e-12);
    }

    #[test]
    fn three_setting_preset_reaches_six() {
        let (ones, twos) = presets::gisin_coplanar();
        let report = gisin3_value(&DensityMatrix::singlet(), ones, twos).unwrap();
        assert!((report.value - 6.0).abs() < 1e-12, "got {}", report.value);
        assert!(report.violated);
        assert!((report.violation_ratio() - 1.2).abs() < 1e-12);
    }

    #[test]
    fn three_setting_combination_vanishes_on_the_maximally_mixed_state() {
        let (ones, twos) = presets::gisin_coplanar();
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        let report = gisin3_value(&rho, ones, twos).unwrap();
        assert!(report.value.abs() < 1e-14);
    }

    #[test]
    fn four_setting_preset_reaches_four_root_three() {
        let (ones, twos) = presets::gisin_xyz();
        let report = gisin4_value(&DensityMatrix::singlet(), ones, twos).unwrap();
        assert!(
            (report.value - bounds::gisin4_quantum()).abs() < 1e-12,
            "got {}",
            report.value
        );
        assert!(report.violated);
        // the four-setting violation ratio is smaller than the three-setting one
        let ratio = report.violation_ratio();
        assert!((ratio - 4.0 * 3f64.sqrt() / 6.0).abs() < 1e-12);
        assert!(ratio < 1.2);
    }

    #[test]
    fn coplanar_directions_silence_the_fourth_row() {
        let (coplanar_ones, twos) = presets::gisin_coplanar();
        let arbitrary_d1 = Direction::new(0.1, -0.7, 0.4).unwrap();
        let ones = [
            coplanar_ones[0],
            coplanar_ones[1],
            coplanar_ones[2],
            arbitrary_d1,
        ];
        // the fourth combination vector vanishes for coplanar settings, so
        // the twelve-term value collapses to the nine-term one
        let report = gisin4_value(&DensityMatrix::singlet(), ones, twos).unwrap();
        assert!((report.value - 6.0).abs() < 1e-12, "got {}", report.value);
        assert!(!report.violated);
    }

    #[test]
    fn coplanar_joint_scheme_scales_linearly_and_peaks_below_five() {
        let singlet = DensityMatrix::singlet();
        let cap = bounds::coplanar_max_sharpness();
        let mut alpha = 0.0;
        while alpha <= cap {
            let report = gisin3_joint_value(&singlet, alpha).unwrap();
            assert!(
                (report.value - 6.0 * alpha).abs() < 1e-12,
                "alpha {alpha}: {} vs {}",
                report.value,
                6.0 * alpha
            );
            assert!(report.value < 5.0);
            assert!(!report.violated);
            alpha += cap / 50.0;
        }
        let at_cap = gisin3_joint_value(&singlet, cap).unwrap();
        assert!((at_cap.value - bounds::gisin3_joint_ceiling()).abs() < 1e-12);
        assert_eq!(at_cap.regime, Regime::JointOnOne);
    }

    #[test]
    fn coplanar_joint_scheme_rejects_infeasible_sharpness() {
        let singlet = DensityMatrix::singlet();
        assert!(matches!(
            gisin3_joint_value(&singlet, 0.8),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            gisin3_joint_value(&singlet, 1.2),
            Err(Error::SharpnessOutOfRange(_))
        ));
        let zero = gisin3_joint_value(&singlet, 0.0).unwrap();
        assert!(zero.value.abs() < 1e-14);
    }

    #[test]
    fn orthogonal_axes_joint_scheme_matches_its_closed_form() {
        let slope = 4.0 * 3f64.sqrt();
        for &alpha in &[0.0, 0.2, 0.35, 0.5, 1.0 / 3f64.sqrt()] {
            let report = gisin_xyz_joint_value(alpha).unwrap();
            assert!(
                (report.value - slope * alpha).abs() < 1e-12,
                "alpha {alpha}: {} vs {}",
                report.value,
                slope * alpha
            );
            assert!(!report.violated);
        }
        let at_cap = gisin_xyz_joint_value(1.0 / 3f64.sqrt()).unwrap();
        assert!((at_cap.value - 4.0).abs() < 1e-10);
        assert!(at_cap.value <= bounds::gisin_xyz_joint_ceiling() + 1e-10);
    }

    #[test]
    fn orthogonal_axes_joint_scheme_rejects_excess_sharpness() {
        assert!(matches!(
            gisin_xyz_joint_value(0.6),
            Err(Error::ThreeDirectionCondition(_))
        ));
    }

    #[test]
    fn violation_flag_tracks_the_classical_bound() {
        let above = InequalityReport::new(ExpressionName::Chsh, 2.1, 2.0, None, Regime::Sharp);
        assert!(above.violated);
        let at = InequalityReport::new(ExpressionName::Chsh, 2.0, 2.0, None, Regime::Sharp);
        assert!(!at.violated);
        let below = InequalityReport::new(ExpressionName::Chsh, 1.9, 2.0, None, Regime::Sharp);
        assert!(!below.violated);
    }

    #[test]
    fn names_and_regimes_round_trip_through_strings() {
        let names = [
            ExpressionName::Chsh,
            ExpressionName::Mermin,
            ExpressionName::MerminJoint,
            ExpressionName::GhzHierarchy,
            ExpressionName::Gisin3,
            ExpressionName::Gisin4,
            ExpressionName::Gisin3Joint,
            ExpressionName::GisinXyzJoint,
        ];
        for name in names {
            let back: ExpressionName = name.to_string().parse().unwrap();
            assert_eq!(back, name);
        }
        let regimes = [
            Regime::Sharp,
            Regime::JointOnOne,
            Regime::JointOnTwo,
            Regime::JointOnAll,
        ];
        for regime in regimes {
            let back: Regime = regime.to_string().parse().unwrap();
            assert_eq!(back, regime);
        }
        assert!("tilted".parse::<ExpressionName>().is_err());
        assert!("joint-on-none".parse::<Regime>().is_err());
    }
}
