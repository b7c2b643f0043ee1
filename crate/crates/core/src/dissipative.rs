//! Dissipative sector: squeezed-bath Lindblad equation in the
//! Born-Markov RWA, its closed-form Bloch solution, the squeezed
//! generalized amplitude damping (SGAD) Kraus channel, and fixed-point
//! analysis.
//!
//! The master equation is solved in the interaction picture; the
//! e^{-+ i omega t} factors are applied when assembling the
//! Schroedinger-picture state used for GP.

use crate::dephasing::BathSpec;
use crate::error::{Error, Result};
use crate::state::{from_angles, KrausSet, Mat2, QubitState};
use crate::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bath coefficients entering the master equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedBathCoeffs {
    /// Planck occupation N_th at the system frequency.
    pub n_th: f64,
    /// Effective photon number N = N_th (cosh^2 r + sinh^2 r) + sinh^2 r.
    pub n_eff: f64,
    /// Complex squeeze coefficient M = -(1/2) sinh(2r) e^{i Phi} (2 N_th + 1).
    pub m: C64,
    /// a = sinh(2r)(2 N_th + 1).
    pub a_rate: f64,
}

impl SqueezedBathCoeffs {
    pub fn from_bath(bath: &BathSpec) -> Result<Self> {
        bath.validate()?;
        let n_th = if bath.temperature == 0.0 {
            0.0
        } else {
            1.0 / ((bath.omega / bath.temperature).exp() - 1.0)
        };
        let (ch, sh) = (bath.squeeze_r.cosh(), bath.squeeze_r.sinh());
        let n_eff = n_th * (ch * ch + sh * sh) + sh * sh;
        let sinh2r = (2.0 * bath.squeeze_r).sinh();
        let m = C64::from_polar(0.5 * sinh2r * (2.0 * n_th + 1.0), bath.squeeze_phi) * -1.0;
        Ok(SqueezedBathCoeffs {
            n_th,
            n_eff,
            m,
            a_rate: sinh2r * (2.0 * n_th + 1.0),
        })
    }
}

fn sigma_minus() -> Mat2 {
    // |0><1| : 1 at row 1 (ground), column 0 (excited).
    Mat2([[C64::ZERO, C64::ZERO], [C64::ONE, C64::ZERO]])
}

fn sigma_plus() -> Mat2 {
    Mat2([[C64::ZERO, C64::ONE], [C64::ZERO, C64::ZERO]])
}

/// Standard dissipator D[L](rho) = L rho L^dag - (1/2){L^dag L, rho}.
fn dissipator(l: &Mat2, rho: &Mat2) -> Mat2 {
    let ld = l.adjoint();
    let ldl = ld.mul(l);
    let half = C64::new(0.5, 0.0);
    l.mul(rho)
        .mul(&ld)
        .sub(&ldl.mul(rho).scale(half))
        .sub(&rho.mul(&ldl).scale(half))
}

/// Interaction-picture master-equation right-hand side on a raw matrix
/// (intermediate RK4 stages need not be valid states).
pub fn lindblad_rhs_matrix(rho: &Mat2, coeffs: &SqueezedBathCoeffs, gamma0: f64) -> Mat2 {
    let sm = sigma_minus();
    let sp = sigma_plus();
    let n = coeffs.n_eff;
    let mut out = dissipator(&sm, rho).scale(C64::new(gamma0 * (n + 1.0), 0.0));
    out = out.add(&dissipator(&sp, rho).scale(C64::new(gamma0 * n, 0.0)));
    out = out.sub(&sp.mul(rho).mul(&sp).scale(coeffs.m * gamma0));
    out = out.sub(&sm.mul(rho).mul(&sm).scale(coeffs.m.conj() * gamma0));
    out
}

/// Master-equation right-hand side for a valid state.
pub fn lindblad_rhs(rho: &QubitState, coeffs: &SqueezedBathCoeffs, gamma0: f64) -> Mat2 {
    lindblad_rhs_matrix(rho.matrix(), coeffs, gamma0)
}

/// Residual between the master equation and its manifestly Lindblad
/// form R_1 = sqrt(gamma0 (N_th + 1)/2) R, R_2 = sqrt(gamma0 N_th / 2) R^dag
/// with R = sigma_- cosh r + e^{i Phi} sigma_+ sinh r, maximized over
/// `samples` random states drawn from the given seed.
pub fn lindblad_form_check(bath: &BathSpec, samples: usize, seed: u64) -> Result<f64> {
    let coeffs = SqueezedBathCoeffs::from_bath(bath)?;
    let (ch, sh) = (bath.squeeze_r.cosh(), bath.squeeze_r.sinh());
    let r_op = sigma_minus()
        .scale(C64::new(ch, 0.0))
        .add(&sigma_plus().scale(C64::from_polar(sh, bath.squeeze_phi)));
    let k1 = (bath.gamma0 * (coeffs.n_th + 1.0) / 2.0).sqrt();
    let k2 = (bath.gamma0 * coeffs.n_th / 2.0).sqrt();
    let lindblad_ops = [
        r_op.scale(C64::new(k1, 0.0)),
        r_op.adjoint().scale(C64::new(k2, 0.0)),
    ];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut residual = 0.0f64;
    for _ in 0..samples {
        let state = random_state(&mut rng);
        let rho = state.matrix();
        let mut lhs = Mat2::zero();
        for l in &lindblad_ops {
            let ld = l.adjoint();
            let ldl = ld.mul(l);
            lhs = lhs
                .add(&l.mul(rho).mul(&ld).scale(C64::new(2.0, 0.0)))
                .sub(&ldl.mul(rho))
                .sub(&rho.mul(&ldl));
        }
        let rhs = lindblad_rhs(&state, &coeffs, bath.gamma0);
        residual = residual.max(lhs.max_abs_diff(&rhs));
    }
    Ok(residual)
}

fn random_state(rng: &mut impl Rng) -> QubitState {
    let len = rng.gen_range(0.0..1.0f64);
    let cos_t = rng.gen_range(-1.0..1.0f64);
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    let sin_t = (1.0 - cos_t * cos_t).sqrt();
    QubitState::from_bloch(
        len * sin_t * phi.cos(),
        len * sin_t * phi.sin(),
        len * cos_t,
    )
    .expect("point inside Bloch ball")
}

/// One sample of the closed-form Bloch solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochSample {
    /// A(t) = <sigma_3(t)>.
    pub a: f64,
    /// Interaction-picture coherence B(t) = <sigma_-(t)>.
    pub b: C64,
    /// R(t) = |B(t)|.
    pub r: f64,
    /// chi(t) = -arg B(t), principal value; chi(0) = phi0 and the pole
    /// convention chi = phi0 when B vanishes identically.
    pub chi: f64,
}

/// Interaction-picture evolution of an arbitrary initial pair
/// (z0 = <sigma_3(0)>, b0 = <sigma_-(0)>).
pub fn evolve_bloch(
    t: f64,
    z0: f64,
    b0: C64,
    coeffs: &SqueezedBathCoeffs,
    gamma0: f64,
) -> (f64, C64) {
    let n = coeffs.n_eff;
    let decay = (-gamma0 * (2.0 * n + 1.0) * t).exp();
    let a = decay * z0 - (1.0 - decay) / (2.0 * n + 1.0);
    let h = 0.5 * gamma0 * coeffs.a_rate * t;
    let phi = -coeffs.m / coeffs.m.norm(); // e^{i Phi}; NaN-safe below
    let phase = if coeffs.a_rate == 0.0 { C64::ONE } else { phi };
    let b = decay.sqrt() * (h.cosh() * b0 + h.sinh() * phase * b0.conj());
    (a, b)
}

/// Closed-form Bloch solution from the pure initial state (theta0, phi0):
/// one sample plus the Schroedinger-picture density matrix.
pub fn bloch_solution(
    t: f64,
    theta0: f64,
    phi0: f64,
    bath: &BathSpec,
) -> Result<(BlochSample, QubitState)> {
    from_angles(theta0, phi0)?;
    let coeffs = SqueezedBathCoeffs::from_bath(bath)?;
    let z0 = theta0.cos();
    let b0 = C64::from_polar(0.5 * theta0.sin(), -phi0);
    let (a, b) = evolve_bloch(t, z0, b0, &coeffs, bath.gamma0);
    let chi = if b.norm() < 1e-300 {
        phi0
    } else {
        -b.arg()
    };
    let sample = BlochSample {
        a,
        b,
        r: b.norm(),
        chi,
    };
    Ok((sample, schroedinger_state(t, a, b, bath.omega)?))
}

/// Interaction-picture state for the same sample.
pub fn interaction_state(a: f64, b: C64) -> Result<QubitState> {
    QubitState::from_matrix(Mat2([
        [C64::new(0.5 * (1.0 + a), 0.0), b],
        [b.conj(), C64::new(0.5 * (1.0 - a), 0.0)],
    ]))
}

fn schroedinger_state(t: f64, a: f64, b: C64, omega: f64) -> Result<QubitState> {
    let rot = C64::from_polar(1.0, -omega * t);
    QubitState::from_matrix(Mat2([
        [C64::new(0.5 * (1.0 + a), 0.0), b * rot],
        [b.conj() * rot.conj(), C64::new(0.5 * (1.0 - a), 0.0)],
    ]))
}

/// Time at which <sigma_3(t)> started from theta0 = 0 crosses zero:
/// t_1 = ln(2[N+1]) / (gamma0 [2N+1]).
pub fn sigma3_sign_change_time(bath: &BathSpec) -> Result<f64> {
    let coeffs = SqueezedBathCoeffs::from_bath(bath)?;
    if bath.gamma0 <= 0.0 {
        return Err(Error::ParameterOutOfRange {
            name: "gamma0",
            value: bath.gamma0,
        });
    }
    let n = coeffs.n_eff;
    Ok((2.0 * (n + 1.0)).ln() / (bath.gamma0 * (2.0 * n + 1.0)))
}

/// Asymptotic fixed point diag(1 - q, q) with q = (N+1)/(2N+1).
pub fn asymptotic_state(bath: &BathSpec) -> Result<QubitState> {
    if bath.gamma0 <= 0.0 {
        return Err(Error::ParameterOutOfRange {
            name: "gamma0",
            value: bath.gamma0,
        });
    }
    let coeffs = SqueezedBathCoeffs::from_bath(bath)?;
    let q = (coeffs.n_eff + 1.0) / (2.0 * coeffs.n_eff + 1.0);
    QubitState::from_matrix(Mat2::diag(C64::new(1.0 - q, 0.0), C64::new(q, 0.0)))
}

/// SGAD channel parameters plus diagnostics. The auxiliary reals of the
/// p2 quadratic are exposed as `sgad_a` .. `sgad_d` (renamed to avoid a
/// collision with the Bloch A and B).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgadChannel {
    pub p1: f64,
    pub p2: f64,
    pub alpha: f64,
    pub mu: f64,
    pub nu: f64,
    pub phi: f64,
    pub sgad_a: f64,
    pub sgad_b: f64,
    pub sgad_c: f64,
    pub sgad_d: f64,
    /// Both quadratic roots, (plus branch, minus branch).
    pub p2_roots: (f64, f64),
    /// Max-norm residual of the Kraus map against the closed-form Bloch
    /// solution over a basis of input states.
    pub reproduction_residual: f64,
}

const PARAM_CLAMP_TOL: f64 = 1e-9;

fn clamp_unit(name: &'static str, value: f64, t: f64) -> Result<f64> {
    if value < -PARAM_CLAMP_TOL || value > 1.0 + PARAM_CLAMP_TOL || !value.is_finite() {
        return Err(Error::SgadParameterInvalid { name, value, t });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Builds the four-operator SGAD Kraus set at time `t`, identifying
/// (alpha, mu, nu, p2) so the channel reproduces the interaction-picture
/// Bloch solution. Both quadratic branches for p2 are evaluated; the
/// root whose Kraus set best reproduces the closed form is kept.
pub fn sgad_channel(t: f64, bath: &BathSpec) -> Result<(SgadChannel, KrausSet)> {
    if !(t > 0.0) {
        return Err(Error::ParameterOutOfRange { name: "t", value: t });
    }
    let coeffs = SqueezedBathCoeffs::from_bath(bath)?;
    let n = coeffs.n_eff;
    let gamma0 = bath.gamma0;
    if gamma0 <= 0.0 {
        return Err(Error::ParameterOutOfRange {
            name: "gamma0",
            value: gamma0,
        });
    }
    let k = gamma0 * (2.0 * n + 1.0) * t;
    let h = 0.5 * gamma0 * coeffs.a_rate * t;
    let ek = (-k).exp();

    // Auxiliaries of the p2 quadratic.
    let sgad_a = if coeffs.a_rate == 0.0 {
        0.0
    } else {
        (2.0 * n + 1.0) / (2.0 * n) * h.sinh().powi(2) / (0.5 * k).sinh() * (-0.5 * k).exp()
    };
    let sgad_b = n / (2.0 * n + 1.0) * (1.0 - ek);
    let sgad_c = sgad_a + sgad_b + ek;
    let sgad_d = h.cosh().powi(2) * ek;

    let (aa, bb, cc, dd) = (sgad_a, sgad_b, sgad_c, sgad_d);
    let denom = (aa + bb - cc - 1.0).powi(2) - 4.0 * dd;
    let base = aa * aa * bb + cc * cc + aa * (bb * bb - cc - bb * (1.0 + cc) - dd)
        - (1.0 + bb) * dd
        - cc * (bb + dd - 1.0);
    let discr = dd
        * (bb - aa * bb + (aa - 1.0) * cc + dd)
        * (aa - aa * bb + (bb - 1.0) * cc + dd);
    let root_term = 2.0 * discr.max(0.0).sqrt();
    let mut roots = ((base + root_term) / denom, (base - root_term) / denom);
    if (roots.0 - roots.1).abs() < 1e-6 {
        // Near-double root (exact at r = 0): the discriminant is pure
        // rounding noise and the quadratic vertex is the accurate
        // value, so collapse both branches onto it.
        roots = (base / denom, base / denom);
    } else {
        // Polish each root against the exact scalar constraint
        // sqrt((1-p)(C-p)) + sqrt((p-A)(p-B)) = sqrt(D): the quadratic
        // is a squared form and loses a few digits to cancellation.
        roots.0 = polish_p2_root(roots.0, aa, bb, cc, dd);
        roots.1 = polish_p2_root(roots.1, aa, bb, cc, dd);
    }

    let mut best: Option<(SgadChannel, KrausSet)> = None;
    for &p2 in &[roots.0, roots.1] {
        if !(-PARAM_CLAMP_TOL..=1.0 + PARAM_CLAMP_TOL).contains(&p2) || !p2.is_finite() {
            continue;
        }
        let p2 = p2.clamp(0.0, 1.0);
        let p1 = 1.0 - p2;
        let (mu, nu) = if p2 == 0.0 {
            (0.0, 0.0)
        } else {
            (sgad_a / p2, sgad_b / p2)
        };
        let alpha = if p1 == 0.0 {
            0.0
        } else {
            (1.0 - p2 * (mu + nu) - ek) / p1
        };
        let channel = match build_channel(
            t,
            bath,
            &coeffs,
            SgadChannel {
                p1,
                p2,
                alpha,
                mu,
                nu,
                phi: bath.squeeze_phi,
                sgad_a,
                sgad_b,
                sgad_c,
                sgad_d,
                p2_roots: roots,
                reproduction_residual: f64::NAN,
            },
        ) {
            Ok(pair) => pair,
            Err(_) => continue,
        };
        let better = match &best {
            None => true,
            Some((prev, _)) => channel.0.reproduction_residual < prev.reproduction_residual,
        };
        if better {
            best = Some(channel);
        }
    }

    match best {
        Some((channel, kraus)) if channel.reproduction_residual < 1e-8 => Ok((channel, kraus)),
        Some((channel, _)) => Err(Error::SgadNoValidRoot {
            root_plus: channel.p2_roots.0,
            root_minus: channel.p2_roots.1,
            t,
        }),
        None => Err(Error::SgadNoValidRoot {
            root_plus: roots.0,
            root_minus: roots.1,
            t,
        }),
    }
}

/// Newton refinement of a p2 candidate on the constraint
/// g(p) = sqrt((1-p)(C-p)) + sqrt((p-A)(p-B)) - sqrt(D) = 0,
/// restricted to the domain [max(A,B), min(1,C)] where both radicands
/// are non-negative. Returns the input untouched when it is not a
/// usable starting point.
fn polish_p2_root(p0: f64, a: f64, b: f64, c: f64, d: f64) -> f64 {
    let lo = a.max(b);
    let hi = c.min(1.0);
    if !p0.is_finite() || !(lo <= hi) {
        return p0;
    }
    let sqrt_d = d.max(0.0).sqrt();
    let mut p = p0.clamp(lo, hi);
    for _ in 0..8 {
        let u = ((1.0 - p) * (c - p)).max(0.0).sqrt();
        let v = ((p - a) * (p - b)).max(0.0).sqrt();
        let g = u + v - sqrt_d;
        if g == 0.0 {
            break;
        }
        let du = if u > 0.0 {
            (2.0 * p - 1.0 - c) / (2.0 * u)
        } else {
            0.0
        };
        let dv = if v > 0.0 {
            (2.0 * p - a - b) / (2.0 * v)
        } else {
            0.0
        };
        let slope = du + dv;
        if slope == 0.0 || !slope.is_finite() {
            break;
        }
        let next = (p - g / slope).clamp(lo, hi);
        if (next - p).abs() < 1e-16 {
            p = next;
            break;
        }
        p = next;
    }
    // Keep the polish only if it actually reduced the residual.
    let res = |p: f64| {
        (((1.0 - p) * (c - p)).max(0.0).sqrt() + ((p - a) * (p - b)).max(0.0).sqrt() - sqrt_d)
            .abs()
    };
    if p.is_finite() && res(p) <= res(p0.clamp(lo, hi)) {
        p
    } else {
        p0
    }
}

fn build_channel(
    t: f64,
    bath: &BathSpec,
    coeffs: &SqueezedBathCoeffs,
    mut channel: SgadChannel,
) -> Result<(SgadChannel, KrausSet)> {
    channel.alpha = clamp_unit("alpha", channel.alpha, t)?;
    channel.mu = clamp_unit("mu", channel.mu, t)?;
    channel.nu = clamp_unit("nu", channel.nu, t)?;

    let sp1 = channel.p1.sqrt();
    let sp2 = channel.p2.sqrt();
    let e0 = Mat2::diag(
        C64::new(sp1 * (1.0 - channel.alpha).sqrt(), 0.0),
        C64::new(sp1, 0.0),
    );
    let e1 = Mat2([
        [C64::ZERO, C64::ZERO],
        [C64::new(sp1 * channel.alpha.sqrt(), 0.0), C64::ZERO],
    ]);
    let e2 = Mat2::diag(
        C64::new(sp2 * (1.0 - channel.mu).sqrt(), 0.0),
        C64::new(sp2 * (1.0 - channel.nu).sqrt(), 0.0),
    );
    let e3 = Mat2([
        [C64::ZERO, C64::new(sp2 * channel.nu.sqrt(), 0.0)],
        [
            C64::from_polar(sp2 * channel.mu.sqrt(), -channel.phi),
            C64::ZERO,
        ],
    ]);
    let kraus = KrausSet::new(vec![e0, e1, e2, e3])?;

    // Reproduction residual against the closed form on a spanning basis
    // of initial Bloch data.
    let basis: [(f64, C64); 4] = [
        (1.0, C64::ZERO),
        (-1.0, C64::ZERO),
        (0.0, C64::new(0.5, 0.0)),
        (0.0, C64::new(0.0, 0.5)),
    ];
    let mut residual = 0.0f64;
    for &(z0, b0) in &basis {
        let input = interaction_state(z0, b0)?;
        let out = crate::state::apply_kraus(&input, &kraus)?;
        let (a, b) = evolve_bloch(t, z0, b0, coeffs, bath.gamma0);
        let expect = interaction_state(a, b)?;
        residual = residual.max(out.matrix().max_abs_diff(expect.matrix()));
    }
    channel.reproduction_residual = residual;
    Ok((channel, kraus))
}

/// Affine Bloch map of the generalized amplitude damping channel
/// (the r = 0 reduction of SGAD), in the interaction picture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GadBlochMap {
    /// lambda(t) = 1 - exp(-gamma0 (2 N_th + 1) t).
    pub lambda: f64,
    /// p = (N_th + 1) / (2 N_th + 1).
    pub p: f64,
}

impl GadBlochMap {
    pub fn apply(&self, bloch: (f64, f64, f64)) -> (f64, f64, f64) {
        let scale = (1.0 - self.lambda).sqrt();
        (
            bloch.0 * scale,
            bloch.1 * scale,
            self.lambda * (1.0 - 2.0 * self.p) + bloch.2 * (1.0 - self.lambda),
        )
    }

    /// The t -> infinity contraction target (0, 0, 1 - 2p).
    pub fn fixed_point(&self) -> (f64, f64, f64) {
        (0.0, 0.0, 1.0 - 2.0 * self.p)
    }
}

pub fn gad_bloch_map(t: f64, bath: &BathSpec) -> Result<GadBlochMap> {
    if bath.squeeze_r != 0.0 {
        return Err(Error::ParameterOutOfRange {
            name: "squeeze_r",
            value: bath.squeeze_r,
        });
    }
    let coeffs = SqueezedBathCoeffs::from_bath(bath)?;
    let n_th = coeffs.n_th;
    Ok(GadBlochMap {
        lambda: 1.0 - (-bath.gamma0 * (2.0 * n_th + 1.0) * t).exp(),
        p: (n_th + 1.0) / (2.0 * n_th + 1.0),
    })
}
