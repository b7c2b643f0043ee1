//! Mode implementations: GP sweeps, Bloch-spheroid export, and the
//! cross-route verification report. All modes emit RFC-4180-style CSV
//! (header row, '.' decimal, radians unless `--degrees`).

use crate::config::{Axis, Mode, RunConfig, Sector, Sweep};
use qubit_gp::dephasing::{phase_damping_kraus, qnd_state, BathSpec, DephasingSolution};
use qubit_gp::dissipative::{
    bloch_solution, interaction_state, lindblad_form_check, lindblad_rhs_matrix, sgad_channel,
    SqueezedBathCoeffs,
};
use qubit_gp::gp::{gp_dissipative_closed, gp_from_trajectory, gp_qnd_closed, Trajectory};
use qubit_gp::numerics::{integrate_ode, OdeSpec, QuadratureSpec};
use qubit_gp::spheroid::{fibonacci_sphere, qnd_sphere_image, sgad_sphere_image};
use qubit_gp::state::{apply_kraus, from_angles, Mat2};
use qubit_gp::C64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Whole-run failure: either bad configuration semantics (exit 2) or a
/// numerical/runtime failure (exit 3).
pub enum RunError {
    Config(String),
    Numerical(String),
}

impl From<qubit_gp::Error> for RunError {
    fn from(e: qubit_gp::Error) -> Self {
        RunError::Numerical(e.to_string())
    }
}

pub fn run(cfg: &RunConfig) -> Result<(), RunError> {
    let csv = match cfg.mode {
        Mode::GpQnd | Mode::GpDissipative | Mode::Sweep => gp_sweep(cfg)?,
        Mode::BlochSpheroid => bloch_spheroid(cfg)?,
        Mode::Verify => verify(cfg)?,
    };
    match &cfg.out {
        Some(path) => std::fs::write(path, csv).map_err(|e| {
            RunError::Numerical(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

/// Quotes a CSV field if it contains a delimiter, quote, or newline.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

/// One curve of a sweep: base parameters plus an optional family-axis
/// override.
struct Curve {
    label: String,
    family: Option<(Axis, f64)>,
    unitary: bool,
}

struct ParamPoint {
    theta0: f64,
    phi0: f64,
    gamma0: f64,
    temp: f64,
    squeeze_r: f64,
    squeeze_a: f64,
    squeeze_phi: f64,
}

impl ParamPoint {
    fn base(cfg: &RunConfig) -> Self {
        ParamPoint {
            theta0: cfg.theta0,
            phi0: cfg.phi0,
            gamma0: cfg.gamma0,
            temp: cfg.temp,
            squeeze_r: cfg.squeeze_r,
            squeeze_a: cfg.squeeze_a,
            squeeze_phi: cfg.squeeze_phi,
        }
    }

    fn set(&mut self, axis: Axis, value: f64) {
        match axis {
            Axis::Theta0 => self.theta0 = value,
            Axis::Phi0 => self.phi0 = value,
            Axis::Temp => self.temp = value,
            Axis::Gamma0 => self.gamma0 = value,
            Axis::SqueezeR => self.squeeze_r = value,
            Axis::SqueezeA => self.squeeze_a = value,
            Axis::SqueezePhi => self.squeeze_phi = value,
        }
    }

    fn bath(&self, cfg: &RunConfig) -> BathSpec {
        BathSpec {
            omega: cfg.omega,
            omega_c: cfg.omega_c,
            gamma0: self.gamma0,
            temperature: self.temp,
            squeeze_r: self.squeeze_r,
            squeeze_a: self.squeeze_a,
            squeeze_phi: self.squeeze_phi,
        }
    }
}

struct GpRow {
    curve: String,
    sweep_value: f64,
    point: ParamPoint,
    // Ok: (gp, overlap_arg, connection, overlap_abs, l_tau, theta_tau);
    // Err: flag message.
    result: Result<(f64, f64, f64, f64, f64, f64), String>,
}

fn gp_sweep(cfg: &RunConfig) -> Result<String, RunError> {
    let sector = cfg
        .sector
        .ok_or_else(|| RunError::Config("sweep requires a sector".into()))?;
    let sweep = cfg.sweep.unwrap_or(Sweep {
        axis: Axis::Theta0,
        lo: 0.0,
        hi: PI,
        n: 200,
    });
    if let Some(family) = &cfg.family {
        if family.axis == sweep.axis {
            return Err(RunError::Config(format!(
                "sweep and family share the axis '{}'",
                sweep.axis.name()
            )));
        }
    }

    let mut curves: Vec<Curve> = Vec::new();
    if cfg.include_unitary {
        curves.push(Curve {
            label: "unitary".into(),
            family: None,
            unitary: true,
        });
    }
    match &cfg.family {
        Some(family) => {
            for &v in &family.values {
                curves.push(Curve {
                    label: format!("{}={v}", family.axis.name()),
                    family: Some((family.axis, v)),
                    unitary: false,
                });
            }
        }
        None => curves.push(Curve {
            label: "base".into(),
            family: None,
            unitary: false,
        }),
    }

    let values = sweep.values();
    let mut rows: Vec<GpRow> = Vec::new();
    for curve in &curves {
        let mut curve_base = ParamPoint::base(cfg);
        if let Some((axis, v)) = curve.family {
            curve_base.set(axis, v);
        }
        if curve.unitary {
            curve_base.gamma0 = 0.0;
        }

        // For QND curves whose bath does not vary along the sweep,
        // share one gamma(t) cache across all grid points.
        let shared_sol = if sector == Sector::Qnd
            && matches!(sweep.axis, Axis::Theta0 | Axis::Phi0)
        {
            Some(
                DephasingSolution::new(curve_base.bath(cfg), QuadratureSpec::default())
                    .map_err(|e| RunError::Numerical(e.to_string()))?,
            )
        } else {
            None
        };

        let curve_rows: Vec<GpRow> = values
            .par_iter()
            .map(|&v| {
                let mut point = ParamPoint::base(cfg);
                if let Some((axis, fv)) = curve.family {
                    point.set(axis, fv);
                }
                if curve.unitary {
                    point.gamma0 = 0.0;
                }
                point.set(sweep.axis, v);
                let result = eval_gp_point(cfg, sector, &point, shared_sol.as_ref());
                GpRow {
                    curve: curve.label.clone(),
                    sweep_value: v,
                    point,
                    result,
                }
            })
            .collect();
        rows.extend(curve_rows);
    }

    let mut out = String::new();
    out.push_str(
        "sector,curve,sweep_axis,sweep_value,theta0,phi0,omega,omega_c,gamma0,temp,\
         squeeze_r,squeeze_a,squeeze_phi,gp,overlap_arg,connection_integral,overlap_abs,\
         l_tau,theta_tau,flag\n",
    );
    let ang = |v: f64| if cfg.degrees { v.to_degrees() } else { v };
    let sweep_ang = |v: f64| {
        if sweep.axis.is_angle() {
            ang(v)
        } else {
            v
        }
    };
    for row in &rows {
        let p = &row.point;
        let (gp, arg, conn, ovl, l_tau, theta_tau, flag) = match &row.result {
            &Ok((gp, arg, conn, ovl, l_tau, theta_tau)) => {
                (ang(gp), ang(arg), ang(conn), ovl, l_tau, ang(theta_tau), "ok".to_string())
            }
            Err(msg) => (
                f64::NAN,
                f64::NAN,
                f64::NAN,
                f64::NAN,
                f64::NAN,
                f64::NAN,
                msg.clone(),
            ),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            sector,
            csv_field(&row.curve),
            sweep.axis.name(),
            num(sweep_ang(row.sweep_value)),
            num(ang(p.theta0)),
            num(ang(p.phi0)),
            num(cfg.omega),
            num(cfg.omega_c),
            num(p.gamma0),
            num(p.temp),
            num(p.squeeze_r),
            num(p.squeeze_a),
            num(ang(p.squeeze_phi)),
            num(gp),
            num(arg),
            num(conn),
            num(ovl),
            num(l_tau),
            num(theta_tau),
            csv_field(&flag)
        );
    }
    Ok(out)
}

#[allow(clippy::type_complexity)]
fn eval_gp_point(
    cfg: &RunConfig,
    sector: Sector,
    point: &ParamPoint,
    shared_sol: Option<&DephasingSolution>,
) -> Result<(f64, f64, f64, f64, f64, f64), String> {
    let bath = point.bath(cfg);
    let tau = bath.tau();
    let to_diag = |res: qubit_gp::gp::GpResult, l_tau: f64| {
        let theta_tau = res.theta_t.last().copied().unwrap_or(f64::NAN);
        (
            res.gp,
            res.arg_term,
            res.integral_term,
            res.overlap_abs,
            l_tau,
            theta_tau,
        )
    };
    match sector {
        Sector::Qnd => {
            let owned;
            let sol = match shared_sol {
                Some(s) => s,
                None => {
                    owned = DephasingSolution::new(bath, QuadratureSpec::default())
                        .map_err(|e| e.to_string())?;
                    &owned
                }
            };
            let res = gp_qnd_closed(point.theta0, point.phi0, sol, cfg.samples)
                .map_err(|e| e.to_string())?;
            let l_tau = qnd_state(tau, point.theta0, point.phi0, sol)
                .map_err(|e| e.to_string())?
                .bloch_length();
            Ok(to_diag(res, l_tau))
        }
        Sector::Dissipative => {
            let res = gp_dissipative_closed(point.theta0, point.phi0, &bath, cfg.samples)
                .map_err(|e| e.to_string())?;
            let l_tau = bloch_solution(tau, point.theta0, point.phi0, &bath)
                .map_err(|e| e.to_string())?
                .1
                .bloch_length();
            Ok(to_diag(res, l_tau))
        }
    }
}

fn bloch_spheroid(cfg: &RunConfig) -> Result<String, RunError> {
    let sector = cfg.sector.unwrap_or(Sector::Dissipative);
    let bath = ParamPoint::base(cfg).bath(cfg);
    let inputs = fibonacci_sphere(cfg.samples);
    let image = match sector {
        Sector::Qnd => {
            let sol = DephasingSolution::new(bath, QuadratureSpec::default())?;
            qnd_sphere_image(cfg.time, &sol, cfg.samples)?
        }
        Sector::Dissipative => sgad_sphere_image(cfg.time, &bath, cfg.samples)?,
    };
    let mut out = String::from("index,x0,y0,z0,x,y,z\n");
    for (k, (p, q)) in inputs.iter().zip(&image).enumerate() {
        let _ = writeln!(
            out,
            "{k},{},{},{},{},{},{}",
            num(p[0]),
            num(p[1]),
            num(p[2]),
            num(q[0]),
            num(q[1]),
            num(q[2])
        );
    }
    Ok(out)
}

struct VerifyRow {
    check: &'static str,
    label: String,
    residual: f64,
    threshold: f64,
}

fn verify(cfg: &RunConfig) -> Result<String, RunError> {
    let mut rows: Vec<VerifyRow> = Vec::new();
    let (theta0, phi0) = (1.2, 0.4);

    // QND: phase-damping Kraus vs closed-form state.
    for &temperature in &[0.0, 100.0, 300.0] {
        for &r in &[0.0, 0.4] {
            let bath = BathSpec {
                omega: cfg.omega,
                omega_c: cfg.omega_c,
                gamma0: 0.0025,
                temperature,
                squeeze_r: r,
                squeeze_a: cfg.squeeze_a,
                squeeze_phi: 0.0,
            };
            let sol = DephasingSolution::new(bath, QuadratureSpec::default())?;
            let tau = bath.tau();
            let mut residual = 0.0f64;
            for k in 1..=3 {
                let t = tau * k as f64 / 3.0;
                let closed = qnd_state(t, theta0, phi0, &sol)?;
                let kraus = phase_damping_kraus(t, &sol)?;
                let mapped = apply_kraus(&from_angles(theta0, phi0)?, &kraus)?;
                residual = residual.max(closed.matrix().max_abs_diff(mapped.matrix()));
            }
            rows.push(VerifyRow {
                check: "qnd_kraus_vs_closed",
                label: format!("T={temperature} r={r}"),
                residual,
                threshold: 1e-10,
            });
        }
    }

    // Dissipative: closed form vs RK4 vs SGAD Kraus.
    let diss_baths: [(&str, BathSpec); 3] = [
        (
            "squeezed",
            BathSpec {
                gamma0: 0.6,
                temperature: 5.0,
                squeeze_r: 0.4,
                squeeze_phi: 1.5,
                omega: cfg.omega,
                omega_c: cfg.omega_c,
                squeeze_a: 0.0,
            },
        ),
        (
            "gad",
            BathSpec {
                gamma0: 0.3,
                temperature: 5.0,
                squeeze_r: 0.0,
                squeeze_phi: 0.0,
                omega: cfg.omega,
                omega_c: cfg.omega_c,
                squeeze_a: 0.0,
            },
        ),
        (
            "ad",
            BathSpec {
                gamma0: 0.3,
                temperature: 0.0,
                squeeze_r: 0.0,
                squeeze_phi: 0.0,
                omega: cfg.omega,
                omega_c: cfg.omega_c,
                squeeze_a: 0.0,
            },
        ),
    ];
    for (label, bath) in &diss_baths {
        let coeffs = SqueezedBathCoeffs::from_bath(bath)?;
        let gamma0 = bath.gamma0;
        let init = from_angles(theta0, phi0)?;
        let pack = |m: &Mat2| -> Vec<f64> {
            m.0.iter().flatten().flat_map(|z| [z.re, z.im]).collect()
        };
        let unpack = |y: &[f64]| -> Mat2 {
            Mat2([
                [C64::new(y[0], y[1]), C64::new(y[2], y[3])],
                [C64::new(y[4], y[5]), C64::new(y[6], y[7])],
            ])
        };
        let t_end = 0.6;
        let traj = integrate_ode(
            move |_, y, dy| {
                let d = lindblad_rhs_matrix(&unpack(y), &coeffs, gamma0);
                dy.copy_from_slice(&pack(&d));
            },
            &pack(init.matrix()),
            0.0,
            t_end,
            &OdeSpec {
                step: bath.tau() / 4096.0,
            },
        )?;
        let mut rk4_res = 0.0f64;
        let mut kraus_res = 0.0f64;
        for &t in &[0.15, 0.3, 0.6] {
            let (sample, _) = bloch_solution(t, theta0, phi0, bath)?;
            let closed = interaction_state(sample.a, sample.b)?;
            let nearest = traj
                .times
                .iter()
                .zip(&traj.states)
                .min_by(|a, b| (a.0 - t).abs().total_cmp(&(b.0 - t).abs()))
                .unwrap();
            rk4_res = rk4_res.max(unpack(nearest.1).max_abs_diff(closed.matrix()));
            let (_, kraus) = sgad_channel(t, bath)?;
            let z0 = theta0.cos();
            let b0 = C64::from_polar(0.5 * theta0.sin(), -phi0);
            let mapped = apply_kraus(&interaction_state(z0, b0)?, &kraus)?;
            kraus_res = kraus_res.max(mapped.matrix().max_abs_diff(closed.matrix()));
        }
        rows.push(VerifyRow {
            check: "dissipative_rk4_vs_closed",
            label: (*label).into(),
            residual: rk4_res,
            threshold: 1e-6,
        });
        rows.push(VerifyRow {
            check: "dissipative_kraus_vs_closed",
            label: (*label).into(),
            residual: kraus_res,
            threshold: 1e-8,
        });
    }

    // Lindblad-form identity on seeded random states.
    let residual = lindblad_form_check(&diss_baths[0].1, 32, cfg.seed)?;
    rows.push(VerifyRow {
        check: "lindblad_form_identity",
        label: format!("seed={}", cfg.seed),
        residual,
        threshold: 1e-10,
    });

    // Trajectory GP vs closed forms.
    {
        let bath = BathSpec {
            gamma0: 0.0025,
            temperature: 100.0,
            squeeze_r: 0.4,
            squeeze_a: 0.0,
            squeeze_phi: 0.0,
            omega: cfg.omega,
            omega_c: cfg.omega_c,
        };
        let sol = DephasingSolution::new(bath, QuadratureSpec::default())?;
        let tau = bath.tau();
        let closed = gp_qnd_closed(theta0, phi0, &sol, cfg.samples)?.gp;
        let traj = Trajectory::sample(0.0, tau, cfg.samples, |t| {
            qnd_state(t, theta0, phi0, &sol)
        })?;
        let from_traj = gp_from_trajectory(&traj)?.gp;
        rows.push(VerifyRow {
            check: "gp_trajectory_vs_closed",
            label: "qnd".into(),
            residual: (from_traj - closed).abs(),
            threshold: 1e-3,
        });
    }
    {
        let bath = BathSpec {
            gamma0: 0.05,
            temperature: 1.0,
            squeeze_r: 0.4,
            squeeze_phi: 1.2,
            squeeze_a: 0.0,
            omega: cfg.omega,
            omega_c: cfg.omega_c,
        };
        let tau = bath.tau();
        let closed = gp_dissipative_closed(theta0, phi0, &bath, cfg.samples)?.gp;
        let traj = Trajectory::sample(0.0, tau, cfg.samples, |t| {
            Ok(bloch_solution(t, theta0, phi0, &bath)?.1)
        })?;
        let from_traj = gp_from_trajectory(&traj)?.gp;
        rows.push(VerifyRow {
            check: "gp_trajectory_vs_closed",
            label: "dissipative".into(),
            residual: (from_traj - closed).abs(),
            threshold: 1e-3,
        });
    }

    let mut out = String::from("check,point,residual,threshold,pass\n");
    let mut all_pass = true;
    for row in &rows {
        let pass = row.residual < row.threshold;
        all_pass &= pass;
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            row.check,
            csv_field(&row.label),
            num(row.residual),
            num(row.threshold),
            pass
        );
    }
    if !all_pass {
        // Still emit the report before failing the process.
        match &cfg.out {
            Some(path) => {
                let _ = std::fs::write(path, &out);
            }
            None => print!("{out}"),
        }
        return Err(RunError::Numerical(
            "verification residuals exceed thresholds".into(),
        ));
    }
    Ok(out)
}
