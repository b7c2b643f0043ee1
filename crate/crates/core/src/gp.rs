//! Geometric phase (GP) of the open qubit, via two independent routes:
//!
//! * a trajectory route: the kinematic mixed-state GP functional
//!   evaluated on a sampled path of density matrices through the
//!   discrete Pancharatnam product of the dominant eigenvector, which
//!   is exactly gauge invariant;
//! * closed-form routes specialized to the dephasing (QND) and
//!   dissipative sectors, which evaluate the arg-form expression
//!   directly from the analytic Bloch solution.
//!
//! Conventions: the path runs over one quasi-cycle t in [0, tau],
//! tau = 2 pi / omega, and angles are reduced to the principal branch
//! (-pi, pi].

use crate::dephasing::DephasingSolution;
use crate::dissipative::{evolve_bloch, SqueezedBathCoeffs};
use crate::dephasing::BathSpec;
use crate::error::{Error, Result};
use crate::state::{eigensystem_at, QubitState};
use crate::C64;
use std::f64::consts::PI;

/// Reduce an angle to the principal branch (-pi, pi].
pub fn principal_angle(phi: f64) -> f64 {
    let mut out = phi.rem_euclid(2.0 * PI);
    if out > PI {
        out -= 2.0 * PI;
    }
    out
}

/// How the endpoint arg term of a closed-form GP was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpMethod {
    /// Discrete Pancharatnam product over a sampled state path.
    Trajectory,
    /// Closed-form arg expression with a well-conditioned endpoint
    /// overlap.
    ArgForm,
    /// Closed-form expanded form: the endpoint overlap vanished, so the
    /// arg term is taken as zero and the GP is carried entirely by the
    /// integral term.
    VanishingOverlap,
}

/// A GP value together with its two additive pieces (both in radians,
/// before the final principal-branch reduction of their difference).
#[derive(Debug, Clone, PartialEq)]
pub struct GpResult {
    /// Principal-branch geometric phase.
    pub gp: f64,
    /// Endpoint term: arg of the (weighted) overlap between the initial
    /// and final eigenvectors.
    pub arg_term: f64,
    /// Accumulated connection term subtracted from the endpoint term.
    pub integral_term: f64,
    /// Magnitude of the endpoint overlap (a conditioning diagnostic).
    pub overlap_abs: f64,
    pub method: GpMethod,
    /// Sampled mixing angle theta_t along the path (radians), with
    /// sin(theta_t/2) the |1> amplitude of the dominant eigenvector.
    pub theta_t: Vec<f64>,
    /// Sampled unwrapped coherence phase chi(t) (closed forms only;
    /// empty for the trajectory route, where chi is gauge-dependent).
    pub chi_t: Vec<f64>,
}

/// Threshold below which the endpoint overlap is treated as vanishing
/// and the arg term is dropped.
pub const OVERLAP_TOL: f64 = 1e-9;

/// A sampled path of states at strictly increasing times.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<QubitState>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<QubitState>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::InvalidTrajectory {
                reason: format!(
                    "{} times vs {} states",
                    times.len(),
                    states.len()
                ),
            });
        }
        if times.len() < 3 {
            return Err(Error::InvalidTrajectory {
                reason: format!("need at least 3 samples, got {}", times.len()),
            });
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidTrajectory {
                reason: "times must be strictly increasing".into(),
            });
        }
        Ok(Trajectory { times, states })
    }

    /// Samples a state-valued function on a uniform grid over
    /// [t0, t1] with `n` intervals (n + 1 samples).
    pub fn sample<F>(t0: f64, t1: f64, n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<QubitState>,
    {
        if n < 2 || !(t1 > t0) {
            return Err(Error::InvalidTrajectory {
                reason: format!("bad sampling grid: n = {n}, span [{t0}, {t1}]"),
            });
        }
        let mut times = Vec::with_capacity(n + 1);
        let mut states = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let t = t0 + (t1 - t0) * k as f64 / n as f64;
            times.push(t);
            states.push(f(t)?);
        }
        Trajectory::new(times, states)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[QubitState] {
        &self.states
    }
}

fn inner(u: &[C64; 2], v: &[C64; 2]) -> C64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

/// GP of a discretely sampled eigenvector path, by the Pancharatnam
/// product:
///
/// GP = arg<v_0|v_N> - sum_k arg<v_k|v_{k+1}>,
///
/// reduced to the principal branch. Every factor is invariant under an
/// independent phase change of each v_k except the endpoints, whose
/// phases cancel between the two terms, so the result is exactly gauge
/// invariant. Fails if any consecutive overlap is numerically zero
/// (path not resolved).
pub fn gp_from_eigenpath(vectors: &[[C64; 2]]) -> Result<GpResult> {
    if vectors.len() < 3 {
        return Err(Error::InvalidTrajectory {
            reason: format!("need at least 3 eigenvectors, got {}", vectors.len()),
        });
    }
    let mut connection = 0.0;
    for (k, pair) in vectors.windows(2).enumerate() {
        let step = inner(&pair[0], &pair[1]);
        if step.norm() < 1e-12 {
            return Err(Error::InvalidTrajectory {
                reason: format!("orthogonal consecutive eigenvectors at step {k}"),
            });
        }
        connection += step.arg();
    }
    let closure = inner(&vectors[0], &vectors[vectors.len() - 1]);
    let (arg_term, method) = if closure.norm() < OVERLAP_TOL {
        (0.0, GpMethod::VanishingOverlap)
    } else {
        (closure.arg(), GpMethod::Trajectory)
    };
    let theta_t = vectors
        .iter()
        .map(|v| 2.0 * v[0].norm().clamp(0.0, 1.0).asin())
        .collect();
    Ok(GpResult {
        gp: principal_angle(arg_term - connection),
        arg_term,
        integral_term: connection,
        overlap_abs: closure.norm(),
        method,
        theta_t,
        chi_t: Vec::new(),
    })
}

/// GP of a sampled density-matrix path. The initial state must be pure
/// (the functional weights the sub-leading eigenvector by
/// sqrt(lambda_-(0)) = 0, so only the dominant eigenvector path
/// contributes); the spectrum must stay non-degenerate along the path.
pub fn gp_from_trajectory(traj: &Trajectory) -> Result<GpResult> {
    let (_, minus0) = eigensystem_at(&traj.states()[0], traj.times()[0])?;
    if minus0.value > 1e-9 {
        return Err(Error::MixedInitialState {
            lambda_minus: minus0.value,
        });
    }
    let mut vectors = Vec::with_capacity(traj.states().len());
    for (state, &t) in traj.states().iter().zip(traj.times()) {
        let (plus, _) = eigensystem_at(state, t)?;
        vectors.push(plus.vector);
    }
    gp_from_eigenpath(&vectors)
}

/// One sample of the dominant-eigenvector path in the closed forms:
/// |Psi_+> = s |1> + e^{i(chi + omega t)} c |0>, with s^2 + c^2 = 1.
struct PathSample {
    /// s = sin(theta_t / 2) = sqrt((eps + A) / (2 eps)).
    s: f64,
    /// c = cos(theta_t / 2).
    c: f64,
    /// Unwrapped coherence phase chi(t) (chi(0) = phi0).
    chi: f64,
}

/// Evaluates the closed-form GP expression on a sampled eigenvector
/// path: arg of the endpoint overlap
///
/// s(0) s(tau) + e^{i(chi(tau) - chi(0) + omega tau)} c(0) c(tau)
///
/// minus the connection integral int (chi' + omega) c^2 dt,
/// discretized by the trapezoid rule in the unwrapped phase.
fn gp_closed_from_path(path: &[PathSample], times: &[f64], omega: f64) -> GpResult {
    let first = &path[0];
    let last = &path[path.len() - 1];
    let span = times[times.len() - 1] - times[0];
    let delta = last.chi - first.chi + omega * span;
    let overlap = C64::new(first.s * last.s, 0.0) + C64::from_polar(first.c * last.c, delta);

    let mut integral = 0.0;
    for (pair, ts) in path.windows(2).zip(times.windows(2)) {
        let dphase = pair[1].chi - pair[0].chi + omega * (ts[1] - ts[0]);
        integral += dphase * 0.5 * (pair[0].c * pair[0].c + pair[1].c * pair[1].c);
    }

    let (arg_term, method) = if overlap.norm() < OVERLAP_TOL {
        (0.0, GpMethod::VanishingOverlap)
    } else {
        (overlap.arg(), GpMethod::ArgForm)
    };
    GpResult {
        gp: principal_angle(arg_term - integral),
        arg_term,
        integral_term: integral,
        overlap_abs: overlap.norm(),
        method,
        theta_t: path.iter().map(|p| 2.0 * p.s.clamp(0.0, 1.0).asin()).collect(),
        chi_t: path.iter().map(|p| p.chi).collect(),
    }
}

/// Path sample from the Bloch data (A, R, chi) of the analytic
/// solutions: eps = sqrt(A^2 + 4 R^2); the degenerate point eps = 0
/// (isolated, measure zero in the integral) is assigned the equal-
/// weight value s^2 = c^2 = 1/2 by continuity of the integral.
fn path_sample(a: f64, r: f64, chi: f64) -> PathSample {
    let eps = (a * a + 4.0 * r * r).sqrt();
    let s2 = if eps < 1e-300 {
        0.5
    } else {
        ((eps + a) / (2.0 * eps)).clamp(0.0, 1.0)
    };
    PathSample {
        s: s2.sqrt(),
        c: (1.0 - s2).sqrt(),
        chi,
    }
}

/// Closed-form GP for the dephasing (QND) sector over one cycle
/// tau = 2 pi / omega, on a uniform grid with `n` intervals. The
/// populations are frozen, so A = cos(theta0) is constant,
/// R(t) = (1/2) sin(theta0) e^{-omega^2 gamma(t)}, and chi = phi0.
pub fn gp_qnd_closed(
    theta0: f64,
    phi0: f64,
    sol: &DephasingSolution,
    n: usize,
) -> Result<GpResult> {
    crate::state::from_angles(theta0, phi0)?;
    if n < 2 {
        return Err(Error::ParameterOutOfRange {
            name: "n",
            value: n as f64,
        });
    }
    let bath = *sol.bath();
    let tau = bath.tau();
    let a = theta0.cos();
    let mut path = Vec::with_capacity(n + 1);
    let mut times = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let t = tau * k as f64 / n as f64;
        let r = 0.5 * theta0.sin() * (-bath.omega * bath.omega * sol.gamma(t)?).exp();
        path.push(path_sample(a, r, phi0));
        times.push(t);
    }
    Ok(gp_closed_from_path(&path, &times, bath.omega))
}

/// Closed-form GP for the dissipative sector over one cycle, on a
/// uniform grid with `n` intervals. chi(t) = -arg B(t) is unwrapped
/// continuously from chi(0) = phi0; on the polar orbits theta0 = 0, pi
/// the coherence vanishes identically and chi is held at phi0.
pub fn gp_dissipative_closed(
    theta0: f64,
    phi0: f64,
    bath: &BathSpec,
    n: usize,
) -> Result<GpResult> {
    crate::state::from_angles(theta0, phi0)?;
    if n < 2 {
        return Err(Error::ParameterOutOfRange {
            name: "n",
            value: n as f64,
        });
    }
    let coeffs = SqueezedBathCoeffs::from_bath(bath)?;
    let tau = bath.tau();
    let z0 = theta0.cos();
    let b0 = C64::from_polar(0.5 * theta0.sin(), -phi0);

    let mut path = Vec::with_capacity(n + 1);
    let mut times = Vec::with_capacity(n + 1);
    let mut chi_prev = phi0;
    for k in 0..=n {
        let t = tau * k as f64 / n as f64;
        let (a, b) = evolve_bloch(t, z0, b0, &coeffs, bath.gamma0);
        let chi = if b.norm() < 1e-300 {
            chi_prev
        } else {
            // Unwrap -arg(b) to the branch nearest the previous sample.
            let raw = -b.arg();
            raw + 2.0 * PI * ((chi_prev - raw) / (2.0 * PI)).round()
        };
        path.push(path_sample(a, b.norm(), chi));
        times.push(t);
        chi_prev = chi;
    }
    Ok(gp_closed_from_path(&path, &times, bath.omega))
}

/// GP of a unitarily evolving mixed state in terms of the Bloch vector
/// length L and the solid angle Omega swept in one cycle:
/// GP = -arctan(L tan(Omega / 2)), on the branch continuously connected
/// to the pure-state limit -Omega/2.
pub fn gp_unitary_mixed(l: f64, omega_solid: f64) -> f64 {
    if l == 0.0 {
        0.0
    } else {
        principal_angle(-f64::atan2(
            l * (0.5 * omega_solid).sin(),
            (0.5 * omega_solid).cos(),
        ))
    }
}
