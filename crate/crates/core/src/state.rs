//! Exact 2x2 complex Hermitian linear algebra: density matrices, Bloch
//! vectors, a closed-form eigensolver, and generic Kraus-map application.
//!
//! Basis convention throughout: index 0 is the excited state |1> and
//! index 1 is the ground state |0>, so that diag(1, 0) is the north pole
//! (0, 0, 1) of the Bloch sphere.

use crate::error::{Error, Result};
use crate::C64;

const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = 1e-12;
const COMPLETENESS_TOL: f64 = 1e-10;
/// sqrt(machine epsilon) scale; below this gap the spectrum is treated
/// as degenerate and eigenvectors are not unique.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// A 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn zero() -> Self {
        Mat2([[C64::ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        Mat2([[C64::ONE, C64::ZERO], [C64::ZERO, C64::ONE]])
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Mat2([[a, C64::ZERO], [C64::ZERO, d]])
    }

    pub fn adjoint(&self) -> Self {
        Mat2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn mul(&self, rhs: &Mat2) -> Self {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn add(&self, rhs: &Mat2) -> Self {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Mat2) -> Self {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] *= s;
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Elementwise max-norm.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Elementwise max-norm of the difference.
    pub fn max_abs_diff(&self, rhs: &Mat2) -> f64 {
        self.sub(rhs).max_abs()
    }
}

/// A qubit density matrix with a Bloch-vector view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    rho: Mat2,
}

impl QubitState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_matrix(rho: Mat2) -> Result<Self> {
        let herm = rho.max_abs_diff(&rho.adjoint());
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidState {
                reason: format!("not Hermitian (residual {herm:.3e})"),
            });
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState {
                reason: format!("trace {tr} != 1"),
            });
        }
        let state = QubitState { rho };
        // Positivity via the Bloch length: both eigenvalues (1 +- L)/2 >= 0.
        if state.bloch_length() > 1.0 + 2.0 * POSITIVITY_TOL {
            return Err(Error::InvalidState {
                reason: format!("negative eigenvalue (L = {})", state.bloch_length()),
            });
        }
        Ok(state)
    }

    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let half = 0.5;
        let rho = Mat2([
            [
                C64::new(half * (1.0 + z), 0.0),
                C64::new(half * x, -half * y),
            ],
            [
                C64::new(half * x, half * y),
                C64::new(half * (1.0 - z), 0.0),
            ],
        ]);
        Self::from_matrix(rho)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.rho
    }

    /// Bloch vector (<sigma_1>, <sigma_2>, <sigma_3>).
    pub fn bloch(&self) -> (f64, f64, f64) {
        let r = &self.rho.0;
        (
            2.0 * r[0][1].re,
            -2.0 * r[0][1].im,
            r[0][0].re - r[1][1].re,
        )
    }

    pub fn bloch_length(&self) -> f64 {
        let (x, y, z) = self.bloch();
        (x * x + y * y + z * z).sqrt()
    }
}

/// Pure state cos(theta0/2)|1> + e^{i phi0} sin(theta0/2)|0> as a
/// density matrix.
pub fn from_angles(theta0: f64, phi0: f64) -> Result<QubitState> {
    if !(0.0..=std::f64::consts::PI).contains(&theta0) {
        return Err(Error::AngleOutOfRange {
            name: "theta0",
            value: theta0,
            range: "[0, pi]",
        });
    }
    if !(0.0..std::f64::consts::TAU).contains(&phi0) {
        return Err(Error::AngleOutOfRange {
            name: "phi0",
            value: phi0,
            range: "[0, 2pi)",
        });
    }
    let c = C64::new((theta0 / 2.0).cos(), 0.0);
    let s = C64::from_polar((theta0 / 2.0).sin(), phi0);
    // psi = (c, s) in the (|1>, |0>) basis; rho = psi psi^dagger.
    let rho = Mat2([[c * c.conj(), c * s.conj()], [s * c.conj(), s * s.conj()]]);
    QubitState::from_matrix(rho)
}

/// An ordered set of Kraus operators satisfying the completeness
/// condition sum_j E_j^dagger E_j = I.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    ops: Vec<Mat2>,
}

impl KrausSet {
    pub fn new(ops: Vec<Mat2>) -> Result<Self> {
        let set = KrausSet { ops };
        let residual = set.completeness_residual();
        if residual > COMPLETENESS_TOL {
            return Err(Error::KrausIncomplete { residual });
        }
        Ok(set)
    }

    pub fn ops(&self) -> &[Mat2] {
        &self.ops
    }

    /// Max-norm of sum_j E_j^dagger E_j - I.
    pub fn completeness_residual(&self) -> f64 {
        let mut sum = Mat2::zero();
        for e in &self.ops {
            sum = sum.add(&e.adjoint().mul(e));
        }
        sum.max_abs_diff(&Mat2::identity())
    }
}

/// Applies sum_j E_j rho E_j^dagger.
pub fn apply_kraus(state: &QubitState, k: &KrausSet) -> Result<QubitState> {
    let mut out = Mat2::zero();
    for e in k.ops() {
        out = out.add(&e.mul(state.matrix()).mul(&e.adjoint()));
    }
    QubitState::from_matrix(out)
}

/// An eigenvalue of a density matrix together with its unit eigenvector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: [C64; 2],
}

/// Closed-form eigendecomposition of a qubit density matrix, ordered
/// descending by eigenvalue.
///
/// Gauge convention: the component on |0> (index 1) is made real and
/// non-negative when its magnitude exceeds 1e-9, otherwise the component
/// on |1> (index 0) is. This keeps sampled eigenvector paths continuous;
/// the Pancharatnam product used for GP is gauge invariant regardless.
pub fn eigensystem(state: &QubitState) -> Result<(EigenPair, EigenPair)> {
    eigensystem_at(state, f64::NAN)
}

/// Same as [`eigensystem`] but records the trajectory time `t` in the
/// degeneracy error.
pub fn eigensystem_at(state: &QubitState, t: f64) -> Result<(EigenPair, EigenPair)> {
    let len = state.bloch_length();
    if len < DEGENERACY_TOL {
        return Err(Error::Degenerate { gap: len, t });
    }
    let lam_plus = 0.5 * (1.0 + len);
    let lam_minus = 0.5 * (1.0 - len);

    let r = &state.matrix().0;
    let a = r[0][0];
    let b = r[0][1];
    let d = r[1][1];
    let lam = C64::new(lam_plus, 0.0);
    // Two algebraically equivalent null vectors of (rho - lambda I); pick
    // the better conditioned one.
    let cand_a = [b, lam - a];
    let cand_b = [lam - d, b.conj()];
    let norm = |v: &[C64; 2]| (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    let v_plus = if norm(&cand_a) >= norm(&cand_b) {
        cand_a
    } else {
        cand_b
    };
    let v_plus = fix_gauge(normalize(v_plus));
    // Orthogonal complement is the lambda_- eigenvector.
    let v_minus = fix_gauge([-v_plus[1].conj(), v_plus[0].conj()]);

    Ok((
        EigenPair {
            value: lam_plus,
            vector: v_plus,
        },
        EigenPair {
            value: lam_minus,
            vector: v_minus,
        },
    ))
}

fn normalize(v: [C64; 2]) -> [C64; 2] {
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

fn fix_gauge(v: [C64; 2]) -> [C64; 2] {
    let anchor = if v[1].norm() > 1e-9 { v[1] } else { v[0] };
    let phase = anchor / anchor.norm();
    [v[0] * phase.conj(), v[1] * phase.conj()]
}
