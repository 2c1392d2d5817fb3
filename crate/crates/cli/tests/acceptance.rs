//! Acceptance suite: twelve end-to-end checks covering the extremal values,
//! the structural identities, and the CLI contract. Each test prints one
//! `criterion NN PASS/FAIL` line with the measured quantities and runtime
//! (visible with `--nocapture`). The tests share a lock so the runtime
//! limits are measured without interference from parallel test threads.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use bellmeas::correlations::{self, JointMarginal};
use bellmeas::inequalities::{self, bounds, presets, HierarchyRegime};
use bellmeas::pauli::{bloch_observable, min_eigenvalue, DensityMatrix, Direction, HermitianOp};
use bellmeas::povm::{busch_margin, canonical_elements, JointPovm2};
use bellmeas::search::{self, JointExpression};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

static GATE: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(std::sync::PoisonError::into_inner)
}

fn check(n: u32, pass: bool, detail: String) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {n:02} {verdict}: {detail}");
    assert!(pass, "criterion {n:02}: {detail}");
}

fn random_direction(rng: &mut ChaCha8Rng) -> Direction {
    loop {
        let x = rng.gen_range(-1.0..1.0f64);
        let y = rng.gen_range(-1.0..1.0f64);
        let z = rng.gen_range(-1.0..1.0f64);
        let n2 = x * x + y * y + z * z;
        if n2 > 1e-2 && n2 <= 1.0 {
            return Direction::new(x, y, z).expect("nonzero vector");
        }
    }
}

/// A joint pair at random directions and sharpness, scaled back inside the
/// feasible set when the draw lands outside it.
fn random_feasible_pair(rng: &mut ChaCha8Rng) -> JointPovm2 {
    let a = random_direction(rng);
    let b = random_direction(rng);
    let mut alpha = rng.gen_range(0.05..1.0f64);
    let mut beta = rng.gen_range(0.05..1.0f64);
    let plus = (a.vec() * alpha + b.vec() * beta).norm();
    let minus = (a.vec() * alpha - b.vec() * beta).norm();
    let sum = plus + minus;
    if sum > 2.0 {
        let scale = (2.0 / sum) * (1.0 - 1e-9);
        alpha *= scale;
        beta *= scale;
    }
    JointPovm2::build(alpha, a, beta, b).expect("scaled pair is feasible")
}

fn random_pure(n_qubits: usize, seed: u64) -> DensityMatrix {
    DensityMatrix::random_pure(n_qubits, seed).expect("supported qubit count")
}

fn random_mixed(n_qubits: usize, rng: &mut ChaCha8Rng, seed_base: u64) -> DensityMatrix {
    let w = rng.gen_range(0.1..0.9);
    let parts = [
        (w, random_pure(n_qubits, seed_base)),
        (1.0 - w, random_pure(n_qubits, seed_base + 1)),
    ];
    DensityMatrix::mixture(&parts).expect("weights are positive")
}

#[test]
fn criterion_01_sharp_three_party_value() {
    let _g = serial();
    let ghz = DensityMatrix::ghz();
    let (xs, ys) = presets::ghz_xy();
    let t0 = Instant::now();
    let value = inequalities::mermin_value(&ghz, xs, ys)
        .expect("plan fits the state")
        .value;
    let elapsed = t0.elapsed();
    let delta = (value - 4.0).abs();
    let pass = delta < 1e-10 && elapsed < Duration::from_millis(10);
    check(
        1,
        pass,
        format!("mermin(ghz, x, y) = {value:.12}, |delta| = {delta:.2e} ({elapsed:.2?})"),
    );
}

#[test]
fn criterion_02_joint_on_two_ceiling_is_recovered_by_search() {
    let _g = serial();
    let t0 = Instant::now();
    let result = search::maximize_joint_regime(
        JointExpression::MerminJoint,
        search::DEFAULT_BUDGET,
        search::DEFAULT_SEED,
    )
    .expect("search runs");
    let elapsed = t0.elapsed();
    let delta = (result.best_value - 2.0).abs();
    let param_err = result
        .best_params
        .iter()
        .map(|p| (p - FRAC_1_SQRT_2).abs())
        .fold(0.0, f64::max);
    let pass = delta < 1e-8 && param_err < 1e-4 && elapsed < Duration::from_secs(1);
    check(
        2,
        pass,
        format!(
            "max = {:.12}, |delta| = {delta:.2e}, worst factor offset from 1/sqrt(2) = {param_err:.2e} ({elapsed:.2?})",
            result.best_value
        ),
    );
}

#[test]
fn criterion_03_enumeration_matches_the_factor_sum_product() {
    let _g = serial();
    let grid = [0.1, 0.25, 0.4, 0.55, 0.7];
    let ghz = DensityMatrix::ghz();
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for &a1 in &grid {
        for &b1 in &grid {
            let povm1 = JointPovm2::build(a1, Direction::X, b1, Direction::Y)
                .expect("grid point is feasible");
            for &a2 in &grid {
                for &b2 in &grid {
                    let povm2 = JointPovm2::build(a2, Direction::X, b2, Direction::Y)
                        .expect("grid point is feasible");
                    let value = inequalities::mermin_joint_value(
                        &ghz,
                        &povm1,
                        &povm2,
                        Direction::X,
                        Direction::Y,
                    )
                    .expect("plan fits the state")
                    .value;
                    worst = worst.max((value - (a1 + b1) * (a2 + b2)).abs());
                }
            }
        }
    }
    let elapsed = t0.elapsed();
    let pass = worst < 1e-10 && elapsed < Duration::from_secs(5);
    check(
        3,
        pass,
        format!("625 grid points, worst |enumerated - closed form| = {worst:.2e} ({elapsed:.2?})"),
    );
}

#[test]
fn criterion_04_ghz_maximum_degrades_through_the_regimes() {
    let _g = serial();
    let t0 = Instant::now();
    let run = |r| {
        inequalities::ghz_hierarchy(r, search::DEFAULT_BUDGET, search::DEFAULT_SEED)
            .expect("hierarchy evaluates")
    };
    let sharp = run(HierarchyRegime::Sharp);
    let one = run(HierarchyRegime::JointOnOne);
    let two = run(HierarchyRegime::JointOnTwo);
    let elapsed = t0.elapsed();
    let d_sharp = (sharp - 4.0).abs();
    let d_one = (one - 2.0 * SQRT_2).abs();
    let d_two = (two - 2.0).abs();
    let pass = d_sharp < 1e-10 && d_one < 1e-6 && d_two < 1e-6 && elapsed < Duration::from_secs(5);
    check(
        4,
        pass,
        format!(
            "sharp {sharp:.10} / joint-on-one {one:.10} / joint-on-two {two:.10}, deltas {d_sharp:.1e} / {d_one:.1e} / {d_two:.1e} ({elapsed:.2?})"
        ),
    );
}

#[test]
fn criterion_05_sharp_three_and_four_setting_values() {
    let _g = serial();
    let singlet = DensityMatrix::singlet();
    let (g1, g2) = presets::gisin_coplanar();
    let (f1, f2) = presets::gisin_xyz();
    let t0 = Instant::now();
    let three = inequalities::gisin3_value(&singlet, g1, g2).expect("plan fits");
    let four = inequalities::gisin4_value(&singlet, f1, f2).expect("plan fits");
    let elapsed = t0.elapsed();
    let d3 = (three.value - 6.0).abs();
    let d4 = (four.value - 4.0 * 3f64.sqrt()).abs();
    let r3 = three.violation_ratio();
    let r4 = four.violation_ratio();
    let pass = d3 < 1e-10
        && (r3 - 1.2).abs() < 1e-10
        && d4 < 1e-10
        && (r4 - 4.0 * 3f64.sqrt() / 6.0).abs() < 1e-10
        && (r4 - 1.1547).abs() < 1e-4
        && elapsed < Duration::from_millis(10);
    check(
        5,
        pass,
        format!(
            "three-setting {:.12} (ratio {r3:.4}), four-setting {:.12} (ratio {r4:.4}) ({elapsed:.2?})",
            three.value, four.value
        ),
    );
}

#[test]
fn criterion_06_coplanar_joint_ceiling_and_no_violation() {
    let _g = serial();
    let singlet = DensityMatrix::singlet();
    let cap = bounds::coplanar_max_sharpness();
    let t0 = Instant::now();
    let at_cap = inequalities::gisin3_joint_value(&singlet, cap)
        .expect("cap is feasible")
        .value;
    let mut all_below = true;
    let mut sweep_max = f64::NEG_INFINITY;
    let mut k = 0usize;
    loop {
        let alpha = ((k as f64) * 1e-3).min(cap);
        let v = inequalities::gisin3_joint_value(&singlet, alpha)
            .expect("alpha is feasible")
            .value;
        sweep_max = sweep_max.max(v);
        all_below &= v < 5.0;
        if alpha >= cap {
            break;
        }
        k += 1;
    }
    let elapsed = t0.elapsed();
    let target = 12.0 / (1.0 + 3f64.sqrt());
    let delta = (at_cap - target).abs();
    let pass = delta < 1e-10 && all_below && elapsed < Duration::from_secs(1);
    check(
        6,
        pass,
        format!(
            "value at cap = {at_cap:.12}, |delta| = {delta:.2e}, sweep max {sweep_max:.6} stays below 5: {all_below} ({elapsed:.2?})"
        ),
    );
}

#[test]
fn criterion_07_orthogonal_axes_joint_value() {
    let _g = serial();
    let t0 = Instant::now();
    let value = inequalities::gisin_xyz_joint_value(1.0 / 3f64.sqrt())
        .expect("sharpness satisfies the three-direction condition")
        .value;
    let mut worst = 0.0f64;
    for alpha in [0.1, 0.25, 0.4, 0.55, 1.0 / 3f64.sqrt()] {
        let enumerated = inequalities::gisin_xyz_joint_value(alpha)
            .expect("sharpness satisfies the three-direction condition")
            .value;
        worst = worst.max((enumerated - 4.0 * 3f64.sqrt() * alpha).abs());
    }
    let elapsed = t0.elapsed();
    let delta = (value - 4.0).abs();
    let pass = delta < 1e-10 && worst < 1e-10 && elapsed < Duration::from_millis(100);
    check(
        7,
        pass,
        format!(
            "value at 1/sqrt(3) = {value:.12}, |delta| = {delta:.2e}, worst eight-outcome enumeration vs closed form = {worst:.2e} ({elapsed:.2?})"
        ),
    );
}

#[test]
fn criterion_08_correlations_scale_by_the_sharpness_factor() {
    let _g = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(801);
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for k in 0..100u64 {
        let rho = random_pure(2, 9_000 + k);
        let povm = random_feasible_pair(&mut rng);
        let c = random_direction(&mut rng);
        let residual = correlations::correlation_scaling_residual(&rho, &povm, c)
            .expect("two-qubit state fits the plan");
        worst = worst.max(residual.max());
    }
    for k in 0..100u64 {
        let rho = random_mixed(2, &mut rng, 9_300 + 2 * k);
        let povm = random_feasible_pair(&mut rng);
        let c = random_direction(&mut rng);
        let residual = correlations::correlation_scaling_residual(&rho, &povm, c)
            .expect("two-qubit state fits the plan");
        worst = worst.max(residual.max());
    }
    let elapsed = t0.elapsed();
    let pass = worst < 1e-10 && elapsed < Duration::from_secs(5);
    check(
        8,
        pass,
        format!("100 pure + 100 mixed states, worst |E_joint - factor * E_sharp| = {worst:.2e} ({elapsed:.2?})"),
    );
}

fn unsharp_effect(sign: f64, factor: f64, d: Direction) -> HermitianOp {
    HermitianOp::identity(2)
        .add(&bloch_observable(d).scaled(sign * factor))
        .expect("2x2 dims")
        .scaled(0.5)
}

fn entry_deviation(got: &HermitianOp, want: &HermitianOp) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((got.matrix()[(i, j)] - want.matrix()[(i, j)]).norm());
        }
    }
    worst
}

#[test]
fn criterion_09_feasibility_margin_decides_positivity() {
    let _g = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(901);
    let t0 = Instant::now();
    let mut equivalence_ok = true;
    let mut worst_marginal = 0.0f64;
    let mut feasible_points = 0usize;
    for _ in 0..20 {
        let a = random_direction(&mut rng);
        let b = random_direction(&mut rng);
        for i in 1..=10 {
            for j in 1..=10 {
                let alpha = f64::from(i) / 10.0;
                let beta = f64::from(j) / 10.0;
                let margin = busch_margin(alpha, a, beta, b)
                    .expect("directions are unit")
                    .value;
                let elements = canonical_elements(alpha, a, beta, b);
                let psd = elements
                    .iter()
                    .all(|e| min_eigenvalue(e) >= -1e-10);
                if margin >= 0.0 {
                    equivalence_ok &= psd;
                    feasible_points += 1;
                    let povm =
                        JointPovm2::build(alpha, a, beta, b).expect("margin is nonnegative");
                    for sign in [1i32, -1] {
                        let s = f64::from(sign);
                        worst_marginal = worst_marginal.max(entry_deviation(
                            &povm.marginal_a(sign),
                            &unsharp_effect(s, alpha, a),
                        ));
                        worst_marginal = worst_marginal.max(entry_deviation(
                            &povm.marginal_b(sign),
                            &unsharp_effect(s, beta, b),
                        ));
                    }
                } else if margin < -1e-8 {
                    // clear of the PSD tolerance band, so positivity must fail
                    equivalence_ok &= !psd;
                }
            }
        }
    }
    let elapsed = t0.elapsed();
    let pass = equivalence_ok && worst_marginal < 1e-10 && elapsed < Duration::from_secs(10);
    check(
        9,
        pass,
        format!(
            "2000 grid points, margin sign matches positivity: {equivalence_ok}; worst marginal deviation over {feasible_points} feasible points = {worst_marginal:.2e} ({elapsed:.2?})"
        ),
    );
}

#[test]
fn criterion_10_probability_form_inequalities_and_no_signaling() {
    let _g = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let t0 = Instant::now();
    let mut all_hold = true;
    let mut worst_partition = 0.0f64;
    let mut worst_signal = 0.0f64;
    for k in 0..100u64 {
        let rho = if k % 2 == 0 {
            random_pure(3, 10_000 + k)
        } else {
            random_mixed(3, &mut rng, 20_000 + 2 * k)
        };
        let povm1 = random_feasible_pair(&mut rng);
        let povm2 = random_feasible_pair(&mut rng);
        let third_first = random_direction(&mut rng);
        let third_second = random_direction(&mut rng);
        let chk = inequalities::mermin_type_probability_check(
            &rho,
            &povm1,
            &povm2,
            third_first,
            third_second,
        )
        .expect("three-qubit state fits the plan");
        all_hold &= chk.holds(1e-10);
        worst_partition = worst_partition.max(chk.partition_residual());
        let signal =
            correlations::no_signaling_check(&rho, &povm1, &povm2, third_first, third_second)
                .expect("three-qubit state fits the plan");
        worst_signal = worst_signal.max(signal);
    }
    let elapsed = t0.elapsed();
    let pass = all_hold
        && worst_partition < 1e-10
        && worst_signal < 1e-10
        && elapsed < Duration::from_secs(30);
    check(
        10,
        pass,
        format!(
            "100 random states and plans: inequalities hold: {all_hold}, worst |p_same + p_anti - 1| = {worst_partition:.2e}, worst signaling residual = {worst_signal:.2e} ({elapsed:.2?})"
        ),
    );
}

#[test]
fn criterion_11_joint_measurement_inflates_variance() {
    let _g = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(1101);
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for k in 0..100u64 {
        let rho = if k % 2 == 0 {
            random_pure(1, 11_000 + k)
        } else {
            random_mixed(1, &mut rng, 12_000 + 2 * k)
        };
        let povm = random_feasible_pair(&mut rng);
        let mean_a = correlations::sharp_correlation(&rho, &[povm.direction_a()])
            .expect("single-qubit state");
        let var_a = correlations::jm_variance(&rho, &povm, JointMarginal::A)
            .expect("single-qubit state");
        worst = worst.max((var_a - (1.0 - povm.alpha().powi(2) * mean_a * mean_a)).abs());
        let mean_b = correlations::sharp_correlation(&rho, &[povm.direction_b()])
            .expect("single-qubit state");
        let var_b = correlations::jm_variance(&rho, &povm, JointMarginal::B)
            .expect("single-qubit state");
        worst = worst.max((var_b - (1.0 - povm.beta().powi(2) * mean_b * mean_b)).abs());
    }
    let elapsed = t0.elapsed();
    let pass = worst < 1e-10 && elapsed < Duration::from_secs(1);
    check(
        11,
        pass,
        format!("100 random states, worst |variance - (1 - factor^2 mean^2)| = {worst:.2e} ({elapsed:.2?})"),
    );
}

#[test]
fn criterion_12_cli_reproduces_the_collected_values() {
    let _g = serial();
    let t0 = Instant::now();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_bellmeas"))
        .args(["reproduce", "--format", "csv"])
        .output()
        .expect("binary spawns");
    let exit_ok = out.status.code() == Some(0);
    let text = String::from_utf8(out.stdout).expect("stdout is utf-8");
    let sqrt3 = 3f64.sqrt();
    let expected = [
        ("chsh", "sharp", 2.0 * SQRT_2),
        ("mermin", "sharp", 4.0),
        ("mermin_joint", "joint-on-two", 2.0),
        ("ghz_hierarchy", "sharp", 4.0),
        ("ghz_hierarchy", "joint-on-one", 2.0 * SQRT_2),
        ("ghz_hierarchy", "joint-on-two", 2.0),
        ("gisin3", "sharp", 6.0),
        ("gisin4", "sharp", 4.0 * sqrt3),
        ("gisin3_joint", "joint-on-one", 12.0 / (1.0 + sqrt3)),
        ("gisin_xyz_joint", "joint-on-one", 4.0),
    ];
    let mut rows_ok = true;
    let mut mismatches = Vec::new();
    for (scenario, regime, value) in expected {
        let want = format!("{value:.11e}");
        let found = text.lines().skip(1).any(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            fields[0] == scenario && fields[1] == regime && fields[2] == want
        });
        if !found {
            mismatches.push(format!("{scenario}/{regime} != {want}"));
        }
        rows_ok &= found;
    }
    let corrupt = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/corrupt.toml");
    let bad = std::process::Command::new(env!("CARGO_BIN_EXE_bellmeas"))
        .args(["scan", "--config", corrupt.to_str().expect("utf-8 path")])
        .output()
        .expect("binary spawns");
    let corrupt_ok = bad.status.code() == Some(2);
    let elapsed = t0.elapsed();
    let pass = exit_ok && rows_ok && corrupt_ok;
    check(
        12,
        pass,
        format!(
            "reproduce exits 0: {exit_ok}; all 10 rows match at 12 significant digits: {rows_ok}{}; corrupt config exits 2: {corrupt_ok} ({elapsed:.2?})",
            if mismatches.is_empty() {
                String::new()
            } else {
                format!(" [{}]", mismatches.join(", "))
            }
        ),
    );
}
