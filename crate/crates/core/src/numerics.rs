//! Quadrature over semi-infinite frequency integrals and a fixed-step
//! RK4 integrator used as an independent oracle for the master equation.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Tolerances and subdivision budget for the adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::ParameterOutOfRange {
                name: "rel_tol",
                value: self.rel_tol,
            });
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::ParameterOutOfRange {
                name: "abs_tol",
                value: self.abs_tol,
            });
        }
        if self.max_subdivisions < 1 {
            return Err(Error::ParameterOutOfRange {
                name: "max_subdivisions",
                value: self.max_subdivisions as f64,
            });
        }
        Ok(())
    }
}

/// Fixed-step 4th-order Runge-Kutta parameters. Fixed-step because the
/// trajectories here are one smooth quasi-cycle and the sample times
/// must be reproducible for the GP discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSpec {
    pub step: f64,
}

impl Default for OdeSpec {
    fn default() -> Self {
        OdeSpec {
            step: std::f64::consts::TAU / 4096.0,
        }
    }
}

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK dqk15).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss-Kronrod 15 panel: returns (estimate, error estimate).
fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

#[derive(Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss-Kronrod quadrature on a finite interval.
pub fn integrate_finite(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    let (value, error) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut subdivisions = 0usize;

    while total_err > spec.abs_tol.max(spec.rel_tol * total.abs()) {
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                estimate: total,
                residual: total_err,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap is non-empty while error > 0");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval is at floating-point resolution; accept as is.
            heap.push(Segment {
                error: 0.0,
                ..worst
            });
            total_err = heap.iter().map(|s| s.error).sum();
            continue;
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        subdivisions += 1;
    }
    Ok(total)
}

/// Integral of `f` over [0, infinity) for integrands decaying
/// exponentially beyond `scale` (the spectral cutoff omega_c here).
///
/// The half line is mapped to [0, 1) via omega = scale * u / (1 - u) and
/// the image integral is evaluated adaptively; the rule never samples
/// the endpoints, so omega = 0 and omega = infinity are never evaluated.
pub fn integrate_semi_infinite(
    mut f: impl FnMut(f64) -> f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(scale > 0.0) {
        return Err(Error::ParameterOutOfRange {
            name: "scale",
            value: scale,
        });
    }
    integrate_finite(
        move |u| {
            let om = scale * u / (1.0 - u);
            let jac = scale / ((1.0 - u) * (1.0 - u));
            let v = f(om) * jac;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        spec,
    )
}

/// A densely sampled ODE solution at uniform times.
#[derive(Debug, Clone)]
pub struct OdeTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

impl OdeTrajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least y0")
    }
}

/// Fixed-step RK4 over [t0, t1]; the step is rounded down so the span
/// divides evenly and the requested endpoints are hit exactly.
pub fn integrate_ode(
    mut rhs: impl FnMut(f64, &[f64], &mut [f64]),
    y0: &[f64],
    t0: f64,
    t1: f64,
    spec: &OdeSpec,
) -> Result<OdeTrajectory> {
    if !(spec.step > 0.0) {
        return Err(Error::ParameterOutOfRange {
            name: "step",
            value: spec.step,
        });
    }
    let span = t1 - t0;
    let n = ((span / spec.step).ceil() as usize).max(1);
    let h = span / n as f64;
    let dim = y0.len();

    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut y = y0.to_vec();
    times.push(t0);
    states.push(y.clone());

    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];

    for i in 0..n {
        let t = t0 + i as f64 * h;
        rhs(t, &y, &mut k1);
        for j in 0..dim {
            tmp[j] = y[j] + 0.5 * h * k1[j];
        }
        rhs(t + 0.5 * h, &tmp, &mut k2);
        for j in 0..dim {
            tmp[j] = y[j] + 0.5 * h * k2[j];
        }
        rhs(t + 0.5 * h, &tmp, &mut k3);
        for j in 0..dim {
            tmp[j] = y[j] + h * k3[j];
        }
        rhs(t + h, &tmp, &mut k4);
        for j in 0..dim {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteRhs { t: t + h });
        }
        times.push(t0 + (i + 1) as f64 * h);
        states.push(y.clone());
    }
    Ok(OdeTrajectory { times, states })
}
