//! Spin-1/2 in a magnetic field: the reference example for how a pure-gauge
//! potential acquires observable structure under adiabatic projection.
//!
//! H = σ·B (ħ = χ = 1) is diagonalized by the chart
//!
//! ```text
//! U = (1/√(2B)) | √(B+B_z)                √(B-B_z)                |
//!               | (B_x+iB_y)/√(B+B_z)    -(B_x+iB_y)/√(B-B_z)     |
//! ```
//!
//! with eigenvalues ±B. Rejecting the off-diagonal elements of the induced
//! connection leaves the per-level Abelian potentials
//!
//! ```text
//! A± = ( B_y, -B_x, 0 ) / (2B(B ± B_z))
//! ```
//!
//! whose curl is the monopole field ∓B_k/(2B³): sphere flux ∓2π, Chern
//! number ∓1. The chart genuinely excludes a pole per branch; those points
//! raise [`Error::ChartSingularity`] instead of being patched over.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fmath;
use crate::numerics::CMatrix;

/// Chart-regularity margin, relative to |B|.
const CHART_EPS_REL: f64 = 1e-12;

/// A nonzero magnetic field point in parameter space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagneticField {
    pub bx: f64,
    pub by: f64,
    pub bz: f64,
}

impl MagneticField {
    pub fn new(bx: f64, by: f64, bz: f64) -> Result<Self> {
        let f = MagneticField { bx, by, bz };
        let b = f.norm();
        if b <= 0.0 || !b.is_finite() {
            return Err(Error::InvalidParams("magnetic field must be nonzero and finite"));
        }
        Ok(f)
    }

    pub fn norm(&self) -> f64 {
        fmath::sqrt(self.bx * self.bx + self.by * self.by + self.bz * self.bz)
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        MagneticField { bx: self.bx * lambda, by: self.by * lambda, bz: self.bz * lambda }
    }
}

/// Eigenvalue branch of H = σ·B: `Plus` for +B, `Minus` for -B.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// σ·B (ħ = χ = 1).
pub fn hamiltonian(field: &MagneticField) -> CMatrix {
    let r = |x: f64| Complex64::new(x, 0.0);
    CMatrix::from_rows_2([
        [r(field.bz), Complex64::new(field.bx, -field.by)],
        [Complex64::new(field.bx, field.by), r(-field.bz)],
    ])
}

/// The diagonalizing chart of σ·B; U†(σ·B)U = diag(B, -B).
///
/// Singular where B_z → ±B.
pub fn frame(field: &MagneticField) -> Result<CMatrix> {
    let b = field.norm();
    if b - fmath::abs(field.bz) <= CHART_EPS_REL * b {
        return Err(Error::ChartSingularity { b, bz: field.bz });
    }
    let sp = fmath::sqrt(b + field.bz);
    let sm = fmath::sqrt(b - field.bz);
    let w = 1.0 / fmath::sqrt(2.0 * b);
    let bt = Complex64::new(field.bx, field.by);
    let r = |x: f64| Complex64::new(x, 0.0);
    Ok(CMatrix::from_rows_2([
        [r(w * sp), r(w * sm)],
        [bt.scale(w / sp), -bt.scale(w / sm)],
    ]))
}

/// Adiabatic (level-resolved) connection of the chosen branch:
/// (B_y, -B_x, 0) / (2B(B ± B_z)).
pub fn adiabatic_connection(field: &MagneticField, branch: Branch) -> Result<[f64; 3]> {
    let b = field.norm();
    let denom_core = b + branch.sign() * field.bz;
    if denom_core <= CHART_EPS_REL * b {
        return Err(Error::ChartSingularity { b, bz: field.bz });
    }
    let d = 2.0 * b * denom_core;
    Ok([field.by / d, -field.bx / d, 0.0])
}

/// Closed-form curvature tensor F_ij = ∓ε_ijk B_k/(2B³) (upper sign: `Plus`).
pub fn curvature(field: &MagneticField, branch: Branch) -> [[f64; 3]; 3] {
    let b = field.norm();
    let pref = -branch.sign() / (2.0 * b * b * b);
    let bv = [field.bx, field.by, field.bz];
    let mut f = [[0.0; 3]; 3];
    // ε_ijk contractions: F_xy = ∓B_z/2B³, F_yz = ∓B_x/2B³, F_zx = ∓B_y/2B³
    f[0][1] = pref * bv[2];
    f[1][2] = pref * bv[0];
    f[2][0] = pref * bv[1];
    f[1][0] = -f[0][1];
    f[2][1] = -f[1][2];
    f[0][2] = -f[2][0];
    f
}

/// Finite-difference curl of the adiabatic connection,
/// F_ij = ∂A_j/∂m_i − ∂A_i/∂m_j, central differences with a step relative
/// to |B|. The independent cross-check for [`curvature`].
pub fn curvature_fd(field: &MagneticField, branch: Branch, rel_step: f64) -> Result<[[f64; 3]; 3]> {
    let h = rel_step * field.norm();
    let probe = |k: usize, sgn: f64| -> Result<[f64; 3]> {
        let mut f = *field;
        match k {
            0 => f.bx += sgn * h,
            1 => f.by += sgn * h,
            _ => f.bz += sgn * h,
        }
        adiabatic_connection(&f, branch)
    };
    let mut grad = [[0.0; 3]; 3]; // grad[i][j] = dA_j/dm_i
    for (i, row) in grad.iter_mut().enumerate() {
        let ap = probe(i, 1.0)?;
        let am = probe(i, -1.0)?;
        for j in 0..3 {
            row[j] = (ap[j] - am[j]) / (2.0 * h);
        }
    }
    let mut f = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            f[i][j] = grad[i][j] - grad[j][i];
        }
    }
    Ok(f)
}

/// Surface integral of the branch curvature over the sphere |B| = radius,
/// midpoint quadrature on an n_theta × n_phi grid. ∓2π for `Plus`/`Minus`
/// (Chern number ∓1).
pub fn monopole_flux(branch: Branch, radius: f64, n_theta: usize, n_phi: usize) -> f64 {
    let dt = core::f64::consts::PI / n_theta as f64;
    let dp = core::f64::consts::TAU / n_phi as f64;
    let mut flux = 0.0;
    for it in 0..n_theta {
        let theta = (it as f64 + 0.5) * dt;
        let (st, ct) = (fmath::sin(theta), fmath::cos(theta));
        for ip in 0..n_phi {
            let phi = (ip as f64 + 0.5) * dp;
            let n = [st * fmath::cos(phi), st * fmath::sin(phi), ct];
            let field = MagneticField {
                bx: radius * n[0],
                by: radius * n[1],
                bz: radius * n[2],
            };
            let f = curvature(&field, branch);
            // dual vector G_k = ½ ε_kij F_ij
            let g = [f[1][2], f[2][0], f[0][1]];
            let gn = g[0] * n[0] + g[1] * n[1] + g[2] * n[2];
            flux += gn * radius * radius * st * dt * dp;
        }
    }
    flux
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::TAU;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_off_pole(rng: &mut StdRng) -> MagneticField {
        loop {
            let f = MagneticField {
                bx: rng.gen_range(-2.0..2.0),
                by: rng.gen_range(-2.0..2.0),
                bz: rng.gen_range(-2.0..2.0),
            };
            let b = f.norm();
            if b > 0.3 && b - f.bz.abs() > 0.1 * b {
                return f;
            }
        }
    }

    #[test]
    fn frame_on_the_x_axis() {
        let u = frame(&MagneticField::new(1.0, 0.0, 0.0).unwrap()).unwrap();
        let w = 1.0 / 2.0f64.sqrt();
        assert!((u[(0, 0)].re - w).abs() < 1e-15);
        assert!((u[(0, 1)].re - w).abs() < 1e-15);
        assert!((u[(1, 0)].re - w).abs() < 1e-15);
        assert!((u[(1, 1)].re + w).abs() < 1e-15);
    }

    #[test]
    fn frame_rejects_the_pole() {
        match frame(&MagneticField::new(0.0, 0.0, 1.0).unwrap()) {
            Err(Error::ChartSingularity { .. }) => {}
            other => panic!("expected ChartSingularity, got {other:?}"),
        }
        match frame(&MagneticField::new(0.0, 0.0, -1.0).unwrap()) {
            Err(Error::ChartSingularity { .. }) => {}
            other => panic!("expected ChartSingularity, got {other:?}"),
        }
    }

    #[test]
    fn frame_diagonalizes_the_hamiltonian() {
        let mut rng = StdRng::seed_from_u64(37);
        for _ in 0..200 {
            let field = random_off_pole(&mut rng);
            let b = field.norm();
            let u = frame(&field).unwrap();
            let hd = u.adjoint() * hamiltonian(&field) * u;
            assert!((hd[(0, 0)].re - b).abs() <= 1e-10 * b);
            assert!((hd[(1, 1)].re + b).abs() <= 1e-10 * b);
            assert!(hd[(0, 1)].norm() <= 1e-10 * b);
            assert!(hd[(1, 0)].norm() <= 1e-10 * b);
        }
    }

    #[test]
    fn adiabatic_connection_examples() {
        let a = adiabatic_connection(&MagneticField::new(1.0, 0.0, 0.0).unwrap(), Branch::Plus)
            .unwrap();
        assert_eq!(a, [0.0, -0.5, 0.0]);

        let pole_plus =
            adiabatic_connection(&MagneticField::new(0.0, 0.0, 1.0).unwrap(), Branch::Plus)
                .unwrap();
        assert_eq!(pole_plus, [0.0, 0.0, 0.0]);

        assert!(matches!(
            adiabatic_connection(&MagneticField::new(0.0, 0.0, 1.0).unwrap(), Branch::Minus),
            Err(Error::ChartSingularity { .. })
        ));
    }

    #[test]
    fn adiabatic_connection_scales_inversely() {
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..100 {
            let f = random_off_pole(&mut rng);
            let lambda = rng.gen_range(0.5..3.0);
            let a1 = adiabatic_connection(&f, Branch::Plus).unwrap();
            let a2 = adiabatic_connection(&f.scaled(lambda), Branch::Plus).unwrap();
            for k in 0..3 {
                assert!((a2[k] - a1[k] / lambda).abs() < 1e-12 * (1.0 + a1[k].abs()));
            }
        }
    }

    #[test]
    fn curvature_on_the_z_axis_minus_branch() {
        let f = curvature(&MagneticField::new(0.0, 0.0, 1.0).unwrap(), Branch::Minus);
        assert_eq!(f[0][1], 0.5);
        assert_eq!(f[0][2], 0.0);
        assert_eq!(f[1][2], 0.0);
        assert_eq!(f[1][0], -0.5);
    }

    #[test]
    fn curvature_homogeneity_degree_minus_two() {
        let field = MagneticField::new(0.4, -0.8, 0.3).unwrap();
        let f1 = curvature(&field, Branch::Plus);
        let f2 = curvature(&field.scaled(2.0), Branch::Plus);
        for i in 0..3 {
            for j in 0..3 {
                assert!((f2[i][j] - f1[i][j] / 4.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn closed_form_matches_finite_difference_curl() {
        let mut rng = StdRng::seed_from_u64(43);
        for _ in 0..100 {
            let field = random_off_pole(&mut rng);
            for branch in [Branch::Plus, Branch::Minus] {
                let exact = curvature(&field, branch);
                let fd = curvature_fd(&field, branch, 1e-6).unwrap();
                let scale = 1.0 / (2.0 * field.norm().powi(2));
                for i in 0..3 {
                    for j in 0..3 {
                        assert!(
                            (exact[i][j] - fd[i][j]).abs() <= 1e-6 * scale,
                            "F[{i}][{j}]: exact {} vs fd {}",
                            exact[i][j],
                            fd[i][j]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn sphere_flux_is_one_chern_unit() {
        let flux_minus = monopole_flux(Branch::Minus, 1.7, 100, 200);
        assert!((flux_minus - TAU).abs() <= 0.005 * TAU, "flux {flux_minus}");
        let flux_plus = monopole_flux(Branch::Plus, 0.6, 100, 200);
        assert!((flux_plus + TAU).abs() <= 0.005 * TAU, "flux {flux_plus}");
    }
}
