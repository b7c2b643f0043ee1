//! Bloch-sphere deformation diagnostics: push a quasi-uniform sample of
//! pure states through a channel and summarize the image cloud as an
//! ellipsoid (center, principal semi-axes, principal directions).
//!
//! Both channels of interest are affine maps of the Bloch vector, so
//! the image of the unit sphere is exactly an ellipsoid; the sample
//! covariance of the image recovers its semi-axes because a uniform
//! sphere has covariance I/3 and an affine map x -> M x + c yields
//! covariance M M^T / 3, whose eigenvalues are (semi-axis)^2 / 3.

use crate::dephasing::DephasingSolution;
use crate::dissipative::sgad_channel;
use crate::dephasing::BathSpec;
use crate::error::{Error, Result};
use crate::state::{apply_kraus, QubitState};

/// Quasi-uniform unit vectors from the Fibonacci (golden-angle) spiral.
pub fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden_angle = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    (0..n)
        .map(|k| {
            // Midpoint offset avoids clustering points at the poles.
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = golden_angle * k as f64;
            [rho * phi.cos(), rho * phi.sin(), z]
        })
        .collect()
}

/// Ellipsoid summary of a point cloud.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpheroidSummary {
    /// Cloud centroid.
    pub center: [f64; 3],
    /// Principal semi-axes, descending.
    pub semi_axes: [f64; 3],
    /// Unit principal directions matching `semi_axes`, rows.
    pub axes: [[f64; 3]; 3],
}

/// Summarizes an image of the (quasi-)uniform unit sphere as an
/// ellipsoid: semi-axes are sqrt(3 lambda_i) of the sample covariance.
pub fn principal_semi_axes(points: &[[f64; 3]]) -> Result<SpheroidSummary> {
    if points.len() < 4 {
        return Err(Error::InvalidTrajectory {
            reason: format!("need at least 4 points for a spheroid fit, got {}", points.len()),
        });
    }
    let n = points.len() as f64;
    let mut center = [0.0; 3];
    for p in points {
        for i in 0..3 {
            center[i] += p[i] / n;
        }
    }
    let mut cov = [[0.0f64; 3]; 3];
    for p in points {
        let d = [p[0] - center[0], p[1] - center[1], p[2] - center[2]];
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] += d[i] * d[j] / n;
            }
        }
    }
    let eigvals = sym3_eigenvalues(&cov);
    let axes = [
        sym3_eigenvector(&cov, eigvals[0]),
        sym3_eigenvector(&cov, eigvals[1]),
        sym3_eigenvector(&cov, eigvals[2]),
    ];
    Ok(SpheroidSummary {
        center,
        semi_axes: [
            (3.0 * eigvals[0].max(0.0)).sqrt(),
            (3.0 * eigvals[1].max(0.0)).sqrt(),
            (3.0 * eigvals[2].max(0.0)).sqrt(),
        ],
        axes,
    })
}

/// Eigenvalues of a symmetric 3x3 matrix in descending order, by the
/// trigonometric closed form (no iteration).
pub fn sym3_eigenvalues(m: &[[f64; 3]; 3]) -> [f64; 3] {
    let p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
    if p1 == 0.0 {
        let mut d = [m[0][0], m[1][1], m[2][2]];
        d.sort_by(|a, b| b.total_cmp(a));
        return d;
    }
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    let p2 = (m[0][0] - q).powi(2) + (m[1][1] - q).powi(2) + (m[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b = |i: usize, j: usize| (m[i][j] - if i == j { q } else { 0.0 }) / p;
    let det_b = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1))
        - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
        + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    let phi = (0.5 * det_b).clamp(-1.0, 1.0).acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let e2 = 3.0 * q - e1 - e3;
    [e1, e2, e3]
}

/// Unit eigenvector of a symmetric 3x3 matrix for a given eigenvalue,
/// via the largest cross product of rows of (M - lambda I). Falls back
/// to a coordinate axis for (near-)isotropic matrices.
fn sym3_eigenvector(m: &[[f64; 3]; 3], lambda: f64) -> [f64; 3] {
    let a = [
        [m[0][0] - lambda, m[0][1], m[0][2]],
        [m[0][1], m[1][1] - lambda, m[1][2]],
        [m[0][2], m[1][2], m[2][2] - lambda],
    ];
    let cross = |u: &[f64; 3], v: &[f64; 3]| {
        [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]
    };
    let candidates = [
        cross(&a[0], &a[1]),
        cross(&a[0], &a[2]),
        cross(&a[1], &a[2]),
    ];
    let norm = |v: &[f64; 3]| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let mut best = candidates[0];
    for c in &candidates[1..] {
        if norm(c) > norm(&best) {
            best = *c;
        }
    }
    let len = norm(&best);
    if len < 1e-12 {
        // Degenerate (spherical) direction: any axis serves.
        return [1.0, 0.0, 0.0];
    }
    [best[0] / len, best[1] / len, best[2] / len]
}

/// Image of `n` Fibonacci-sampled pure states under the phase damping
/// (QND) channel at time `t`.
pub fn qnd_sphere_image(t: f64, sol: &DephasingSolution, n: usize) -> Result<Vec<[f64; 3]>> {
    let kraus = crate::dephasing::phase_damping_kraus(t, sol)?;
    fibonacci_sphere(n)
        .iter()
        .map(|p| {
            let state = QubitState::from_bloch(p[0], p[1], p[2])?;
            let (x, y, z) = apply_kraus(&state, &kraus)?.bloch();
            Ok([x, y, z])
        })
        .collect()
}

/// Image of `n` Fibonacci-sampled pure states under the SGAD channel at
/// time `t` (interaction picture).
pub fn sgad_sphere_image(t: f64, bath: &BathSpec, n: usize) -> Result<Vec<[f64; 3]>> {
    let (_, kraus) = sgad_channel(t, bath)?;
    fibonacci_sphere(n)
        .iter()
        .map(|p| {
            let state = QubitState::from_bloch(p[0], p[1], p[2])?;
            let (x, y, z) = apply_kraus(&state, &kraus)?.bloch();
            Ok([x, y, z])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dephasing::{BathSpec, DephasingSolution};
    use crate::dissipative::gad_bloch_map;
    use crate::numerics::QuadratureSpec;
    use approx::assert_abs_diff_eq;

    const N_SAMPLES: usize = 2048;

    #[test]
    fn fibonacci_sphere_is_quasi_uniform() {
        let points = fibonacci_sphere(N_SAMPLES);
        assert_eq!(points.len(), N_SAMPLES);
        let mut mean = [0.0f64; 3];
        for p in &points {
            let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
            for i in 0..3 {
                mean[i] += p[i] / N_SAMPLES as f64;
            }
        }
        for &m in &mean {
            assert!(m.abs() < 5e-3, "sphere mean component {m}");
        }
        // Identity channel: the fit recovers the unit sphere.
        let summary = principal_semi_axes(&points).unwrap();
        for &s in &summary.semi_axes {
            assert_abs_diff_eq!(s, 1.0, epsilon = 5e-3);
        }
    }

    #[test]
    fn eigenvalues_closed_form_oracle() {
        let d = [[3.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 2.0]];
        assert_eq!(sym3_eigenvalues(&d), [3.0, 2.0, -1.0]);

        // Rotation-conjugated diagonal: spectrum is invariant.
        let (c, s) = (0.6f64.cos(), 0.6f64.sin());
        // R diag(5, 2, 1) R^T with R a rotation about z.
        let m = [
            [5.0 * c * c + 2.0 * s * s, (5.0 - 2.0) * c * s, 0.0],
            [(5.0 - 2.0) * c * s, 5.0 * s * s + 2.0 * c * c, 0.0],
            [0.0, 0.0, 1.0],
        ];
        let eig = sym3_eigenvalues(&m);
        assert_abs_diff_eq!(eig[0], 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[2], 1.0, epsilon = 1e-12);

        // Eigenvector residual check: (M - lambda) v = 0.
        let v = sym3_eigenvector(&m, eig[0]);
        for i in 0..3 {
            let r = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2] - eig[0] * v[i];
            assert!(r.abs() < 1e-10);
        }
    }

    #[test]
    fn qnd_image_is_prolate_about_z() {
        let sol = DephasingSolution::new(
            BathSpec {
                gamma0: 0.2,
                temperature: 100.0,
                ..BathSpec::default()
            },
            QuadratureSpec::default(),
        )
        .unwrap();
        let t = 1.0;
        let shrink = (1.0 - sol.lambda(t).unwrap()).sqrt();
        assert!(shrink < 0.9, "need visible transverse shrinking");
        let summary = principal_semi_axes(&qnd_sphere_image(t, &sol, N_SAMPLES).unwrap()).unwrap();
        // Populations are frozen: the z semi-axis stays 1, the two
        // transverse axes shrink equally -> prolate about z.
        assert_abs_diff_eq!(summary.semi_axes[0], 1.0, epsilon = 5e-3);
        assert_abs_diff_eq!(summary.semi_axes[1], shrink, epsilon = 5e-3);
        assert_abs_diff_eq!(summary.semi_axes[2], shrink, epsilon = 5e-3);
        assert!(summary.semi_axes[0] > summary.semi_axes[1] + 0.05);
        assert!(summary.axes[0][2].abs() > 1.0 - 1e-6, "long axis along z");
        for &c in &summary.center {
            assert!(c.abs() < 5e-3);
        }
    }

    #[test]
    fn gad_image_is_oblate_and_matches_affine_map() {
        let bath = BathSpec {
            gamma0: 0.6,
            temperature: 5.0,
            ..BathSpec::default()
        };
        let t = 0.15;
        let map = gad_bloch_map(t, &bath).unwrap();
        let summary = principal_semi_axes(&sgad_sphere_image(t, &bath, N_SAMPLES).unwrap()).unwrap();
        let transverse = (1.0 - map.lambda).sqrt();
        let axial = 1.0 - map.lambda;
        // Transverse scaling sqrt(1 - lambda) exceeds axial 1 - lambda:
        // an oblate spheroid squashed along z, centered off-origin.
        assert_abs_diff_eq!(summary.semi_axes[0], transverse, epsilon = 5e-3);
        assert_abs_diff_eq!(summary.semi_axes[1], transverse, epsilon = 5e-3);
        assert_abs_diff_eq!(summary.semi_axes[2], axial, epsilon = 5e-3);
        assert!(summary.semi_axes[1] > summary.semi_axes[2] + 0.05);
        assert!(summary.axes[2][2].abs() > 1.0 - 1e-6, "short axis along z");
        assert_abs_diff_eq!(summary.center[0], 0.0, epsilon = 5e-3);
        assert_abs_diff_eq!(summary.center[1], 0.0, epsilon = 5e-3);
        assert_abs_diff_eq!(
            summary.center[2],
            map.lambda * (1.0 - 2.0 * map.p),
            epsilon = 5e-3
        );
    }

    #[test]
    fn squeezing_tilts_the_sgad_image() {
        let bath = BathSpec {
            gamma0: 0.6,
            temperature: 5.0,
            squeeze_r: 0.4,
            squeeze_phi: 1.5,
            ..BathSpec::default()
        };
        let summary =
            principal_semi_axes(&sgad_sphere_image(0.15, &bath, N_SAMPLES).unwrap()).unwrap();
        // Finite Phi rotates the transverse principal directions away
        // from the coordinate axes, and squeezing splits the two
        // transverse semi-axes.
        assert!(summary.semi_axes[0] - summary.semi_axes[1] > 0.05);
        let long = summary.axes[0];
        assert!(long[2].abs() < 0.2, "long axis stays transverse");
        assert!(
            long[0].abs() > 0.05 && long[1].abs() > 0.05,
            "long axis tilted off the coordinate axes: {long:?}"
        );
    }

    #[test]
    fn too_few_points_rejected() {
        assert!(principal_semi_axes(&fibonacci_sphere(3)).is_err());
    }
}
