//! Purely dephasing (QND) sector: decoherence functions gamma(t) and
//! eta(t) for the squeezed thermal Ohmic bath, the closed-form reduced
//! state, and the equivalent phase damping Kraus channel.

use crate::error::{Error, Result};
use crate::numerics::{integrate_semi_infinite, QuadratureSpec};
use crate::state::{from_angles, KrausSet, Mat2, QubitState};
use crate::C64;
use std::collections::HashMap;
use std::sync::RwLock;

/// Environment parameters shared by both sectors, in units with
/// hbar = k_B = 1.
///
/// The squeeze phase enters the two sectors differently: the QND
/// quadratures use the linear profile Phi(omega) = a * omega (slope
/// `squeeze_a`), while the dissipative master equation uses the constant
/// phase `squeeze_phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    /// System frequency omega.
    pub omega: f64,
    /// Ohmic cutoff omega_c.
    pub omega_c: f64,
    /// Coupling rate gamma_0.
    pub gamma0: f64,
    /// Temperature T >= 0; T = 0 is accepted exactly.
    pub temperature: f64,
    /// Squeeze magnitude r >= 0.
    pub squeeze_r: f64,
    /// Squeeze-phase slope a (QND sector).
    pub squeeze_a: f64,
    /// Constant squeeze phase Phi (dissipative sector).
    pub squeeze_phi: f64,
}

impl Default for BathSpec {
    fn default() -> Self {
        BathSpec {
            omega: 1.0,
            omega_c: 40.0,
            gamma0: 0.0,
            temperature: 0.0,
            squeeze_r: 0.0,
            squeeze_a: 0.0,
            squeeze_phi: 0.0,
        }
    }
}

impl BathSpec {
    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64, bool); 5] = [
            ("omega", self.omega, self.omega > 0.0),
            ("omega_c", self.omega_c, self.omega_c > 0.0),
            ("gamma0", self.gamma0, self.gamma0 >= 0.0),
            ("temperature", self.temperature, self.temperature >= 0.0),
            ("squeeze_r", self.squeeze_r, self.squeeze_r >= 0.0),
        ];
        for (name, value, ok) in checks {
            if !ok || !value.is_finite() {
                return Err(Error::ParameterOutOfRange { name, value });
            }
        }
        Ok(())
    }

    /// One quasi-cycle, tau = 2 pi / omega.
    pub fn tau(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }
}

/// coth(beta omega / 2) with the T = 0 limit taken analytically.
fn thermal_coth(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        1.0
    } else {
        1.0 / (0.5 * omega / temperature).tanh()
    }
}

/// Decoherence quadrature gamma(t) in the continuum (Ohmic) limit:
///
/// gamma(t) = 1/2 int_0^inf dw (gamma0/pi) (1/w) e^{-w/w_c} coth(w/2T)
///            |(e^{iwt} - 1) cosh r + (e^{-iwt} - 1) sinh r e^{i 2 a w}|^2
pub fn gamma_qnd(t: f64, bath: &BathSpec, quad: &QuadratureSpec) -> Result<f64> {
    bath.validate()?;
    if t < 0.0 {
        return Err(Error::ParameterOutOfRange { name: "t", value: t });
    }
    if t == 0.0 || bath.gamma0 == 0.0 {
        return Ok(0.0);
    }
    let (ch, sh) = (bath.squeeze_r.cosh(), bath.squeeze_r.sinh());
    let pref = 0.5 * bath.gamma0 / std::f64::consts::PI;
    let (wc, temp, a) = (bath.omega_c, bath.temperature, bath.squeeze_a);
    integrate_semi_infinite(
        move |w| {
            let plus = C64::from_polar(1.0, w * t) - 1.0;
            let minus = C64::from_polar(1.0, -w * t) - 1.0;
            let amp = plus * ch + minus * sh * C64::from_polar(1.0, 2.0 * a * w);
            pref / w * (-w / wc).exp() * thermal_coth(w, temp) * amp.norm_sqr()
        },
        wc,
        quad,
    )
}

/// Phase quadrature eta(t) in the continuum limit; closed form
/// -(gamma0/pi) arctan(w_c t). For the qubit it drops out of the
/// dynamics (the diagonal energies are symmetric) and is kept for
/// validation only.
pub fn eta_qnd(t: f64, bath: &BathSpec) -> Result<f64> {
    bath.validate()?;
    if t < 0.0 {
        return Err(Error::ParameterOutOfRange { name: "t", value: t });
    }
    Ok(-(bath.gamma0 / std::f64::consts::PI) * (bath.omega_c * t).atan())
}

/// QND/phase-damping channel data for one bath: gamma(t), eta(t),
/// lambda(t) and beta(t), with a memo table of gamma samples shared by
/// concurrent readers.
#[derive(Debug)]
pub struct DephasingSolution {
    bath: BathSpec,
    quad: QuadratureSpec,
    gamma_cache: RwLock<HashMap<u64, f64>>,
}

impl DephasingSolution {
    pub fn new(bath: BathSpec, quad: QuadratureSpec) -> Result<Self> {
        bath.validate()?;
        quad.validate()?;
        Ok(DephasingSolution {
            bath,
            quad,
            gamma_cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn bath(&self) -> &BathSpec {
        &self.bath
    }

    /// Memoized gamma(t).
    pub fn gamma(&self, t: f64) -> Result<f64> {
        let key = t.to_bits();
        if let Some(&v) = self.gamma_cache.read().expect("lock poisoned").get(&key) {
            return Ok(v);
        }
        let v = gamma_qnd(t, &self.bath, &self.quad)?;
        self.gamma_cache
            .write()
            .expect("lock poisoned")
            .insert(key, v);
        Ok(v)
    }

    pub fn eta(&self, t: f64) -> Result<f64> {
        eta_qnd(t, &self.bath)
    }

    /// Channel parameter lambda(t) = 1 - exp(-2 omega^2 gamma(t)).
    pub fn lambda(&self, t: f64) -> Result<f64> {
        Ok(1.0 - (-2.0 * self.bath.omega.powi(2) * self.gamma(t)?).exp())
    }

    /// Free-evolution phase beta(t) = omega t.
    pub fn beta(&self, t: f64) -> f64 {
        self.bath.omega * t
    }
}

/// Closed-form reduced state under QND coupling: populations frozen at
/// their initial values, coherences rotated by omega t and damped by
/// exp(-omega^2 gamma(t)).
pub fn qnd_state(t: f64, theta0: f64, phi0: f64, sol: &DephasingSolution) -> Result<QubitState> {
    from_angles(theta0, phi0)?;
    let omega = sol.bath().omega;
    let damp = (-omega.powi(2) * sol.gamma(t)?).exp();
    let pop1 = (theta0 / 2.0).cos().powi(2);
    let coh = C64::from_polar(0.5 * theta0.sin() * damp, -(omega * t + phi0));
    let rho = Mat2([
        [C64::new(pop1, 0.0), coh],
        [coh.conj(), C64::new(1.0 - pop1, 0.0)],
    ]);
    QubitState::from_matrix(rho)
}

/// Phase damping Kraus pair E0 = diag(1, e^{i beta} sqrt(1 - lambda)),
/// E1 = diag(0, sqrt(lambda)); completeness holds identically.
pub fn phase_damping_kraus(t: f64, sol: &DephasingSolution) -> Result<KrausSet> {
    let lambda = sol.lambda(t)?;
    let beta = sol.beta(t);
    let e0 = Mat2::diag(C64::ONE, C64::from_polar((1.0 - lambda).sqrt(), beta));
    let e1 = Mat2::diag(C64::ZERO, C64::new(lambda.sqrt(), 0.0));
    KrausSet::new(vec![e0, e1])
}
