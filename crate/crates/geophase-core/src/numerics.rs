//! Dense 2x2 / 3x3 complex matrix algebra.
//!
//! Everything downstream (frames, connections, Wilson loops, propagators) is
//! built from products and exponentials of matrices of dimension at most 3,
//! so the carrier type is a fixed `[Complex64; 9]` with a runtime dimension
//! tag and no allocation. The Frobenius norm is the canonical residual norm
//! throughout the crate.

use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fmath;

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense square complex matrix of dimension 2 or 3, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMatrix {
    dim: usize,
    entries: [Complex64; 9],
}

impl CMatrix {
    /// Zero matrix of dimension 2 or 3.
    ///
    /// Panics on any other dimension; the crate has no business with them.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 3, "dimension must be 2 or 3, got {dim}");
        CMatrix { dim, entries: [ZERO; 9] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        m
    }

    pub fn from_rows_2(rows: [[Complex64; 2]; 2]) -> Self {
        let mut m = CMatrix::zeros(2);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn from_rows_3(rows: [[Complex64; 3]; 3]) -> Self {
        let mut m = CMatrix::zeros(3);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn diagonal_2(a: Complex64, b: Complex64) -> Self {
        CMatrix::from_rows_2([[a, ZERO], [ZERO, b]])
    }

    pub fn diagonal_3(a: Complex64, b: Complex64, c: Complex64) -> Self {
        CMatrix::from_rows_3([[a, ZERO, ZERO], [ZERO, b, ZERO], [ZERO, ZERO, c]])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = CMatrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        let mut t = ZERO;
        for k in 0..self.dim {
            t += self[(k, k)];
        }
        t
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let mut out = *self;
        for k in 0..self.dim * 3 {
            // row-major stride is 3 regardless of dim; scaling the padding is harmless
            out.entries[k] *= z;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self[(i, j)].norm_sqr();
            }
        }
        fmath::sqrt(s)
    }

    /// ‖M + M†‖_F — zero iff the matrix is anti-Hermitian.
    pub fn anti_hermiticity_residual(&self) -> f64 {
        (*self + self.adjoint()).frobenius_norm()
    }

    /// ‖M − M†‖_F — zero iff the matrix is Hermitian.
    pub fn hermiticity_residual(&self) -> f64 {
        (*self - self.adjoint()).frobenius_norm()
    }

    /// Upper-left 2x2 block.
    pub fn block_2(&self) -> CMatrix {
        let mut out = CMatrix::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] = self[(i, j)];
            }
        }
        out
    }

    /// Matrix-vector product on a length-`dim` amplitude vector.
    pub fn apply(&self, v: &[Complex64]) -> [Complex64; 3] {
        debug_assert_eq!(v.len(), self.dim);
        let mut out = [ZERO; 3];
        for i in 0..self.dim {
            let mut acc = ZERO;
            for j in 0..self.dim {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let z = self[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return false;
                }
            }
        }
        true
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.dim && j < self.dim);
        &self.entries[3 * i + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.dim && j < self.dim);
        &mut self.entries[3 * i + j]
    }
}

impl Add for CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        let mut out = self;
        for k in 0..9 {
            out.entries[k] += rhs.entries[k];
        }
        out
    }
}

impl Sub for CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        let mut out = self;
        for k in 0..9 {
            out.entries[k] -= rhs.entries[k];
        }
        out
    }
}

impl Neg for CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += self[(i, k)] * rhs[(k, j)];
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

/// σ_x.
pub fn pauli_x() -> CMatrix {
    CMatrix::from_rows_2([[ZERO, ONE], [ONE, ZERO]])
}

/// σ_y.
pub fn pauli_y() -> CMatrix {
    CMatrix::from_rows_2([[ZERO, -I], [I, ZERO]])
}

/// σ_z.
pub fn pauli_z() -> CMatrix {
    CMatrix::from_rows_2([[ONE, ZERO], [ZERO, -ONE]])
}

/// Coefficients of a 2x2 matrix in the basis {I, σ_x, σ_y, σ_z}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliCoefficients {
    pub c0: Complex64,
    pub c1: Complex64,
    pub c2: Complex64,
    pub c3: Complex64,
}

impl PauliCoefficients {
    /// c0·I + c1·σ_x + c2·σ_y + c3·σ_z.
    pub fn recompose(&self) -> CMatrix {
        CMatrix::identity(2).scale(self.c0)
            + pauli_x().scale(self.c1)
            + pauli_y().scale(self.c2)
            + pauli_z().scale(self.c3)
    }
}

/// Decompose a 2x2 matrix in the Pauli basis: c_k = tr(σ_k M)/2 with σ_0 = I.
pub fn pauli_decompose(m: &CMatrix) -> Result<PauliCoefficients> {
    if m.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: m.dim() });
    }
    let half = Complex64::new(0.5, 0.0);
    Ok(PauliCoefficients {
        c0: half * m.trace(),
        c1: half * (pauli_x() * *m).trace(),
        c2: half * (pauli_y() * *m).trace(),
        c3: half * (pauli_z() * *m).trace(),
    })
}

/// ‖U†U − I‖_F.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    (u.adjoint() * *u - CMatrix::identity(u.dim())).frobenius_norm()
}

/// Truncation order of the series on the scaled matrix. With the scaled norm
/// at most 1/2 the first dropped term is below 1.6e-14/(order+1)!, far under
/// the 1e-13 accuracy target for ‖M‖ ≤ 10.
const EXP_SERIES_ORDER: usize = 14;
const EXP_SCALE_LIMIT: f64 = 0.5;

/// Matrix exponential by scaling-and-squaring with a fixed-order truncated
/// series on the scaled matrix. Accurate to ~1e-13 for ‖M‖_F ≤ 10.
pub fn matexp(m: &CMatrix) -> CMatrix {
    let norm = m.frobenius_norm();
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > EXP_SCALE_LIMIT {
        scale *= 0.5;
        squarings += 1;
    }
    let scaled = m.scale(Complex64::new(scale, 0.0));

    // Horner-free forward summation: terms fall off fast enough at norm ≤ 1/2
    // that the straight sum is exact to working precision.
    let mut sum = CMatrix::identity(m.dim());
    let mut term = CMatrix::identity(m.dim());
    for k in 1..=EXP_SERIES_ORDER {
        term = term * scaled;
        term = term.scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = sum + term;
        if term.frobenius_norm() < 1e-20 {
            break;
        }
    }

    let mut out = sum;
    for _ in 0..squarings {
        out = out * out;
    }
    out
}

/// Exponential of an anti-Hermitian matrix; the result is unitary by
/// construction (residual ≤ 1e-12).
///
/// Rejects inputs with ‖M + M†‖_F > 1e-10·max(1, ‖M‖_F).
pub fn matexp_skew(m: &CMatrix) -> Result<CMatrix> {
    let residual = m.anti_hermiticity_residual();
    let bound = 1e-10 * fmath::abs(m.frobenius_norm()).max(1.0);
    if residual > bound {
        return Err(Error::NotAntiHermitian { residual, bound });
    }
    Ok(matexp(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Independent oracle: plain order-30 Taylor summation, no scaling.
    /// Adequate for ‖M‖ ≤ 1 (first dropped term ~ 1/31! ≈ 1.2e-34).
    fn taylor_exp_oracle(m: &CMatrix) -> CMatrix {
        let mut sum = CMatrix::identity(m.dim());
        let mut term = CMatrix::identity(m.dim());
        for k in 1..=30 {
            term = term * *m;
            term = term.scale(Complex64::new(1.0 / k as f64, 0.0));
            sum = sum + term;
        }
        sum
    }

    pub(crate) fn random_anti_hermitian(rng: &mut StdRng, dim: usize, scale: f64) -> CMatrix {
        let mut x = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                x[(i, j)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        let m = x - x.adjoint();
        let n = m.frobenius_norm();
        if n == 0.0 {
            m
        } else {
            m.scale(Complex64::new(scale / n, 0.0))
        }
    }

    fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
            }
        }
        worst
    }

    #[test]
    fn exp_of_zero_is_identity() {
        for dim in [2, 3] {
            let e = matexp_skew(&CMatrix::zeros(dim)).unwrap();
            assert_eq!(max_entry_diff(&e, &CMatrix::identity(dim)), 0.0);
        }
    }

    #[test]
    fn exp_of_half_pi_sigma_x() {
        // exp(i (π/2) σ_x) = cos(π/2) I + i sin(π/2) σ_x = i σ_x
        let m = pauli_x().scale(I * Complex64::new(core::f64::consts::FRAC_PI_2, 0.0));
        let e = matexp_skew(&m).unwrap();
        let expected = pauli_x().scale(I);
        assert!(max_entry_diff(&e, &expected) < 1e-14);
    }

    #[test]
    fn exp_matches_taylor_oracle() {
        let mut rng = StdRng::seed_from_u64(0x9e3779b97f4a7c15);
        for _ in 0..200 {
            let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
            let scale = rng.gen_range(0.01..1.0);
            let m = random_anti_hermitian(&mut rng, dim, scale);
            let got = matexp_skew(&m).unwrap();
            let want = taylor_exp_oracle(&m);
            assert!(
                max_entry_diff(&got, &want) < 1e-13,
                "deviation from series oracle: {:.3e}",
                max_entry_diff(&got, &want)
            );
        }
    }

    #[test]
    fn exp_rejects_non_anti_hermitian() {
        let m = CMatrix::from_rows_2([[ONE, ZERO], [ZERO, ONE]]);
        match matexp_skew(&m) {
            Err(Error::NotAntiHermitian { .. }) => {}
            other => panic!("expected NotAntiHermitian, got {other:?}"),
        }
    }

    #[test]
    fn exp_unitary_up_to_norm_ten() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..300 {
            let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
            let scale = rng.gen_range(0.0..10.0);
            let m = random_anti_hermitian(&mut rng, dim, scale);
            let u = matexp_skew(&m).unwrap();
            assert!(unitarity_residual(&u) <= 1e-12);
        }
    }

    #[test]
    fn exp_inverse_property() {
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..100 {
            let scale = rng.gen_range(0.0..10.0);
            let m = random_anti_hermitian(&mut rng, 3, scale);
            let u = matexp_skew(&m).unwrap();
            let v = matexp_skew(&(-m)).unwrap();
            let r = (u * v - CMatrix::identity(3)).frobenius_norm();
            assert!(r <= 1e-12, "inverse residual {r:.3e}");
        }
    }

    #[test]
    fn general_exp_handles_decaying_generator() {
        // exp(diag(-a, -b)) = diag(e^-a, e^-b)
        let m = CMatrix::diagonal_2(Complex64::new(-0.3, 0.0), Complex64::new(-2.0, 0.0));
        let e = matexp(&m);
        assert!((e[(0, 0)].re - (-0.3f64).exp()).abs() < 1e-14);
        assert!((e[(1, 1)].re - (-2.0f64).exp()).abs() < 1e-14);
        assert!(e[(0, 1)].norm() == 0.0 && e[(1, 0)].norm() == 0.0);
    }

    #[test]
    fn pauli_decompose_sigma_y() {
        let c = pauli_decompose(&pauli_y()).unwrap();
        assert_eq!(c.c0, ZERO);
        assert_eq!(c.c1, ZERO);
        assert_eq!(c.c2, ONE);
        assert_eq!(c.c3, ZERO);
    }

    #[test]
    fn pauli_decompose_minus_i_sigma_z() {
        // -i σ_z is A_φ of the large-detuning form at θ = π/2
        let c = pauli_decompose(&pauli_z().scale(-I)).unwrap();
        assert_eq!(c.c3, -I);
        assert_eq!(c.c0, ZERO);
        assert_eq!(c.c1, ZERO);
        assert_eq!(c.c2, ZERO);
    }

    #[test]
    fn pauli_round_trip() {
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..1000 {
            let mut m = CMatrix::zeros(2);
            for i in 0..2 {
                for j in 0..2 {
                    m[(i, j)] =
                        Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
                }
            }
            let back = pauli_decompose(&m).unwrap().recompose();
            assert!(max_entry_diff(&m, &back) < 1e-14);
        }
    }

    #[test]
    fn pauli_rejects_dim_3() {
        match pauli_decompose(&CMatrix::identity(3)) {
            Err(Error::DimensionMismatch { expected: 2, got: 3 }) => {}
            other => panic!("expected DimensionMismatch, got {other:?}"),
        }
    }

    #[test]
    fn unitarity_residual_values() {
        assert_eq!(unitarity_residual(&CMatrix::identity(2)), 0.0);
        // (2I)†(2I) - I = 3I, ‖3I‖_F = 3√2
        let two_i = CMatrix::identity(2).scale(Complex64::new(2.0, 0.0));
        let want = 3.0 * 2.0f64.sqrt();
        assert!((unitarity_residual(&two_i) - want).abs() < 1e-14);
    }
}
