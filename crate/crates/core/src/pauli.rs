//! Bloch directions, spin observables, and states of up to three qubits.
//!
//! A spin-1/2 observable is a unit vector `a` on the Bloch sphere, realized
//! as the 2x2 operator `a . sigma`. Multi-particle observables are Kronecker
//! products with parties ordered left to right, so party 1 always sits on the
//! slowest index. States are density matrices; the two entangled states used
//! throughout (the singlet and the three-particle GHZ state) are provided as
//! constructors, along with seeded random pure states for property sweeps.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::{TOL_PSD, TOL_STRUCTURAL};

/// Plain 3-vector, used for direction arithmetic before normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl std::ops::Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl std::ops::Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, f: f64) -> Vec3 {
        Vec3::new(self.x * f, self.y * f, self.z * f)
    }
}

/// Unit vector on the Bloch sphere.
///
/// Construction normalizes, so the unit-norm invariant holds to rounding
/// error for every value of this type; only a near-zero input is rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction(Vec3);

impl Direction {
    pub const X: Direction = Direction(Vec3::new(1.0, 0.0, 0.0));
    pub const Y: Direction = Direction(Vec3::new(0.0, 1.0, 0.0));
    pub const Z: Direction = Direction(Vec3::new(0.0, 0.0, 1.0));

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::from_vec(Vec3::new(x, y, z))
    }

    pub fn from_vec(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if n < 1e-12 {
            return Err(Error::ZeroDirection(n));
        }
        Ok(Direction(v * (1.0 / n)))
    }

    /// Polar-angle construction: theta from the +z axis, phi around it.
    pub fn from_polar(theta: f64, phi: f64) -> Self {
        let st = theta.sin();
        Direction(Vec3::new(st * phi.cos(), st * phi.sin(), theta.cos()))
    }

    /// Inverse of [`Direction::from_polar`], with theta in [0, pi] and
    /// phi in (-pi, pi].
    pub fn polar(self) -> (f64, f64) {
        // atan2 keeps theta accurate near the poles, where acos of the
        // z component would amplify rounding in z by 1/sin(theta).
        let theta = self.0.x.hypot(self.0.y).atan2(self.0.z);
        let phi = self.0.y.atan2(self.0.x);
        (theta, phi)
    }

    pub fn vec(self) -> Vec3 {
        self.0
    }

    pub fn dot(self, other: Direction) -> f64 {
        self.0.dot(other.0)
    }

    pub fn opposite(self) -> Direction {
        Direction(-self.0)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// v . sigma for an arbitrary (not necessarily unit) vector v.
pub(crate) fn spin_combination(v: Vec3) -> CMatrix {
    CMatrix::from_rows(
        2,
        &[
            c(v.z, 0.0),
            c(v.x, -v.y),
            c(v.x, v.y),
            c(-v.z, 0.0),
        ],
    )
    .expect("2x2 entry count")
}

/// Hermitian operator. The wrapper validates hermiticity once at the
/// boundary so downstream code can rely on real expectation values.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOp(CMatrix);

impl HermitianOp {
    pub fn new(m: CMatrix) -> Result<Self> {
        let defect = m.hermiticity_defect();
        if defect > TOL_STRUCTURAL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(HermitianOp(m))
    }

    /// For operators Hermitian by construction.
    pub(crate) fn new_unchecked(m: CMatrix) -> Self {
        debug_assert!(m.hermiticity_defect() <= TOL_STRUCTURAL);
        HermitianOp(m)
    }

    pub fn identity(dim: usize) -> Self {
        HermitianOp(CMatrix::identity(dim))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        HermitianOp(self.0.scaled(factor))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(HermitianOp(self.0.add(&other.0)?))
    }
}

/// The observable `d . sigma`, with eigenvalues exactly +-1.
pub fn bloch_observable(d: Direction) -> HermitianOp {
    HermitianOp::new_unchecked(spin_combination(d.vec()))
}

/// Projector onto the `sign` eigenspace of `d . sigma`: (I + sign d.sigma)/2.
pub fn spin_projector(d: Direction, sign: i32) -> HermitianOp {
    debug_assert!(sign == 1 || sign == -1);
    let m = CMatrix::identity(2)
        .add(&spin_combination(d.vec() * f64::from(sign)))
        .expect("2x2 dims")
        .scaled(0.5);
    HermitianOp::new_unchecked(m)
}

/// Kronecker product of the given operators, parties ordered left to right.
pub fn tensor(ops: &[HermitianOp]) -> Result<HermitianOp> {
    let mut iter = ops.iter();
    let first = iter.next().ok_or(Error::EmptyTensor)?;
    let mut acc = first.0.clone();
    for op in iter {
        acc = acc.kron(&op.0);
    }
    Ok(HermitianOp(acc))
}

/// Smallest eigenvalue of a Hermitian operator.
pub fn min_eigenvalue(op: &HermitianOp) -> f64 {
    op.0.eigvals_hermitian()[0]
}

/// tr(rho A), which is real for a Hermitian A; the rounding-level imaginary
/// residue is checked and discarded.
pub fn expectation(rho: &DensityMatrix, op: &HermitianOp) -> Result<f64> {
    if rho.dim() != op.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), op.dim()));
    }
    let t = rho.matrix().trace_product(op.matrix())?;
    debug_assert!(t.im.abs() < 1e-10, "imaginary residue {} in expectation", t.im);
    Ok(t.re)
}

/// Density matrix of 1 to 3 qubits: Hermitian, unit trace, positive
/// semidefinite (eigenvalue floor -1e-10).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    mat: CMatrix,
}

fn qubit_count_for_dim(dim: usize) -> Result<usize> {
    match dim {
        2 => Ok(1),
        4 => Ok(2),
        8 => Ok(3),
        _ => Err(Error::InvalidState(format!(
            "dimension {dim} is not a register of 1 to 3 qubits"
        ))),
    }
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        let n_qubits = qubit_count_for_dim(mat.dim())?;
        let defect = mat.hermiticity_defect();
        if defect > TOL_STRUCTURAL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {defect:.3e})"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TOL_STRUCTURAL || tr.im.abs() > TOL_STRUCTURAL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let floor = mat.eigvals_hermitian()[0];
        if floor < -TOL_PSD {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {floor:.3e}"
            )));
        }
        Ok(Self { n_qubits, mat })
    }

    /// Pure state from amplitudes in the computational (z) basis, ordered
    /// with party 1 on the slowest index. Normalizes the vector.
    pub fn from_amplitudes(amps: &[Complex64]) -> Result<Self> {
        let dim = amps.len();
        let n_qubits = qubit_count_for_dim(dim)?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let mut mat = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                mat[(i, j)] = (amps[i] / norm) * (amps[j] / norm).conj();
            }
        }
        Ok(Self { n_qubits, mat })
    }

    /// (|01> - |10>)/sqrt(2); correlations are E(a, b) = -a.b.
    pub fn singlet() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_amplitudes(&[c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)])
            .expect("singlet amplitudes are valid")
    }

    /// (|000> + |111>)/sqrt(2), the three-particle GHZ state.
    pub fn ghz() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = [c(0.0, 0.0); 8];
        amps[0] = c(s, 0.0);
        amps[7] = c(s, 0.0);
        Self::from_amplitudes(&amps).expect("GHZ amplitudes are valid")
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        if !(1..=3).contains(&n_qubits) {
            return Err(Error::UnsupportedQubitCount(n_qubits));
        }
        let dim = 1 << n_qubits;
        Ok(Self {
            n_qubits,
            mat: CMatrix::identity(dim).scaled(1.0 / dim as f64),
        })
    }

    /// Haar-like random pure state: complex Gaussian amplitudes, normalized.
    /// The same seed always produces the same state.
    pub fn random_pure(n_qubits: usize, seed: u64) -> Result<Self> {
        if !(1..=3).contains(&n_qubits) {
            return Err(Error::UnsupportedQubitCount(n_qubits));
        }
        let dim = 1 << n_qubits;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| c(standard_normal(&mut rng), standard_normal(&mut rng)))
            .collect();
        Self::from_amplitudes(&amps)
    }

    /// Convex mixture of states on the same register. Weights must be
    /// non-negative with a positive sum; they are renormalized.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let dim = first.1.dim();
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || total <= 0.0 {
            return Err(Error::InvalidState("mixture weights must be non-negative".into()));
        }
        let mut acc = CMatrix::zeros(dim);
        for (w, rho) in parts {
            acc = acc.add(&rho.mat.scaled(w / total))?;
        }
        Self::new(acc)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// tr(rho^2), equal to 1 exactly when the state is pure.
    pub fn purity(&self) -> f64 {
        self.mat
            .trace_product(&self.mat)
            .expect("same dims")
            .re
    }

    /// Reduced state of all parties but the last.
    pub fn trace_out_last(&self) -> Result<DensityMatrix> {
        if self.n_qubits < 2 {
            return Err(Error::UnsupportedQubitCount(self.n_qubits));
        }
        let half = self.dim() / 2;
        let mut out = CMatrix::zeros(half);
        for i in 0..half {
            for j in 0..half {
                out[(i, j)] = self.mat[(2 * i, 2 * j)] + self.mat[(2 * i + 1, 2 * j + 1)];
            }
        }
        DensityMatrix::new(out)
    }

    /// Measurement update: project the last party with `projector`, trace it
    /// out, renormalize. Returns the outcome probability and the conditional
    /// state of the remaining parties, or None when the branch has
    /// vanishing probability.
    pub fn conditioned_on_last(
        &self,
        projector: &HermitianOp,
    ) -> Result<Option<(f64, DensityMatrix)>> {
        if self.n_qubits < 2 {
            return Err(Error::UnsupportedQubitCount(self.n_qubits));
        }
        if projector.dim() != 2 {
            return Err(Error::DimensionMismatch(projector.dim(), 2));
        }
        let half = self.dim() / 2;
        let extended = CMatrix::identity(half).kron(projector.matrix());
        let product = self.mat.matmul(&extended)?;
        let mut reduced = CMatrix::zeros(half);
        for i in 0..half {
            for j in 0..half {
                reduced[(i, j)] =
                    product[(2 * i, 2 * j)] + product[(2 * i + 1, 2 * j + 1)];
            }
        }
        let p = reduced.trace().re;
        if p < 1e-14 {
            return Ok(None);
        }
        let state = DensityMatrix::new(reduced.scaled(1.0 / p))?;
        Ok(Some((p, state)))
    }
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; the 1 - u shift keeps the logarithm away from zero.
    let u: f64 = 1.0 - rng.gen::<f64>();
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}
