//! Geometry of the driven three-level lambda system.
//!
//! The diagonalizing frame over the drive parameters (θ, φ) with bright/excited
//! mixing angle γ is
//!
//! ```text
//!     | cos θ               -sin θ e^{-iφ}      0      |
//! Γ = | sin θ cos γ e^{iφ}   cos θ cos γ       -sin γ  |
//!     | sin θ sin γ e^{iφ}   cos θ sin γ        cos γ  |
//! ```
//!
//! with tan γ = (√(Δ² + Ω²) − Δ)/Ω. Columns are the dark state (eigenvalue
//! pinned at 0), the near-dark bright combination (E₋), and the far-detuned
//! state (E₊), where E∓ = (Δ ∓ √(Δ² + Ω²))/2. The induced gauge connection is
//! fixed once and for all as A_μ := Γ† ∂_μ Γ (anti-Hermitian), and holonomies
//! are P exp(−∮ A_μ dμ), which keeps every transport unitary.
//!
//! Conventions for the doublet block: with the column order as printed above
//! ("dark first"), the σ_y and σ_z Pauli coefficients of the block come out
//! with the opposite sign relative to the familiar large-detuning closed
//! forms; swapping the two degenerate columns (σ_x conjugation) reproduces
//! those forms exactly. Both orderings are exposed via [`DoubletOrder`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fmath;
use crate::numerics::{pauli_x, CMatrix, I, ZERO};

/// Parameter-space coordinates of the frame.
///
/// Canonical domain: θ ∈ [0, π/2], γ ∈ [0, π/4], φ unrestricted (2π-periodic).
/// The trigonometric formulas are total, so out-of-range values are accepted
/// by evaluation routines (finite-difference probes step slightly outside).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixingAngles {
    pub theta: f64,
    pub phi: f64,
    pub gamma: f64,
}

impl MixingAngles {
    pub fn new(theta: f64, phi: f64, gamma: f64) -> Self {
        MixingAngles { theta, phi, gamma }
    }
}

/// Drive parameters: detuning Δ and effective Rabi frequency Ω (ħ = 1,
/// coupling = 1; all rates in units of Ω unless stated otherwise), plus an
/// optional excited-state linewidth for the non-Hermitian decay option.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LambdaParams {
    pub delta: f64,
    pub omega: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub decay: Option<f64>,
}

impl LambdaParams {
    pub fn new(delta: f64, omega: f64) -> Result<Self> {
        if omega <= 0.0 || !omega.is_finite() {
            return Err(Error::InvalidParams("omega must be positive and finite"));
        }
        if delta < 0.0 || !delta.is_finite() {
            return Err(Error::InvalidParams("delta must be nonnegative and finite"));
        }
        Ok(LambdaParams { delta, omega, decay: None })
    }

    pub fn with_decay(mut self, decay: f64) -> Result<Self> {
        if decay < 0.0 || !decay.is_finite() {
            return Err(Error::InvalidParams("decay must be nonnegative and finite"));
        }
        self.decay = Some(decay);
        Ok(self)
    }

    /// √(Δ² + Ω²), the splitting between the two bright-excited levels and
    /// the fastest frequency of the problem.
    pub fn rabi_splitting(&self) -> f64 {
        fmath::hypot(self.delta, self.omega)
    }
}

/// Bright/excited mixing angle: arctan((√(Δ² + Ω²) − Δ)/Ω), evaluated in the
/// cancellation-free form arctan(Ω / (√(Δ² + Ω²) + Δ)).
///
/// Monotonically decreasing in Δ at fixed Ω; π/4 on resonance; γ ≈ Ω/(2Δ) in
/// the large-detuning limit (so Ω/Δ = 1e-3 gives γ ≈ 5.0e-4).
pub fn gamma_angle(params: &LambdaParams) -> f64 {
    fmath::atan(params.omega / (params.rabi_splitting() + params.delta))
}

/// Eigenvalues (0, E₋, E₊) paired with the frame columns, E∓ = (Δ ∓ √(Δ² + Ω²))/2.
///
/// E₋ is evaluated as −Ω²/(2(√(Δ² + Ω²) + Δ)), the same quantity without the
/// large-Δ cancellation.
pub fn energy_levels(params: &LambdaParams) -> [f64; 3] {
    let r = params.rabi_splitting();
    let e_minus = -params.omega * params.omega / (2.0 * (r + params.delta));
    [0.0, e_minus, (params.delta + r) / 2.0]
}

/// The 3x3 unitary frame at the given angles.
pub fn frame_matrix(angles: &MixingAngles) -> CMatrix {
    let (s, c) = (fmath::sin(angles.theta), fmath::cos(angles.theta));
    let (sg, cg) = (fmath::sin(angles.gamma), fmath::cos(angles.gamma));
    let e = Complex64::new(fmath::cos(angles.phi), fmath::sin(angles.phi));
    let ec = e.conj();
    let r = |x: f64| Complex64::new(x, 0.0);
    CMatrix::from_rows_3([
        [r(c), -r(s) * ec, ZERO],
        [r(s * cg) * e, r(c * cg), -r(sg)],
        [r(s * sg) * e, r(c * sg), r(cg)],
    ])
}

/// Entrywise ∂Γ/∂θ.
pub fn frame_dtheta(angles: &MixingAngles) -> CMatrix {
    let (s, c) = (fmath::sin(angles.theta), fmath::cos(angles.theta));
    let (sg, cg) = (fmath::sin(angles.gamma), fmath::cos(angles.gamma));
    let e = Complex64::new(fmath::cos(angles.phi), fmath::sin(angles.phi));
    let ec = e.conj();
    let r = |x: f64| Complex64::new(x, 0.0);
    CMatrix::from_rows_3([
        [-r(s), -r(c) * ec, ZERO],
        [r(c * cg) * e, -r(s * cg), ZERO],
        [r(c * sg) * e, -r(s * sg), ZERO],
    ])
}

/// Entrywise ∂Γ/∂φ.
pub fn frame_dphi(angles: &MixingAngles) -> CMatrix {
    let s = fmath::sin(angles.theta);
    let (sg, cg) = (fmath::sin(angles.gamma), fmath::cos(angles.gamma));
    let e = Complex64::new(fmath::cos(angles.phi), fmath::sin(angles.phi));
    let ec = e.conj();
    let r = |x: f64| Complex64::new(x, 0.0);
    CMatrix::from_rows_3([
        [ZERO, I * r(s) * ec, ZERO],
        [I * r(s * cg) * e, ZERO, ZERO],
        [I * r(s * sg) * e, ZERO, ZERO],
    ])
}

/// Which frame column carries the dark state in the projected doublet block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DoubletOrder {
    /// Column order as printed in the frame above (the default).
    #[default]
    DarkFirst,
    /// Degenerate pair swapped; maps the block onto the large-detuning
    /// closed forms entrywise.
    DarkSecond,
}

/// The pair (A_θ, A_φ) at one parameter point. Both components are
/// anti-Hermitian; 2x2 for doublet-projected fields, 3x3 for the full frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionSample {
    pub a_theta: CMatrix,
    pub a_phi: CMatrix,
}

impl ConnectionSample {
    pub fn dim(&self) -> usize {
        self.a_theta.dim()
    }
}

/// Full 3x3 connection A_μ = Γ† ∂_μ Γ from the analytic frame derivatives.
///
/// The third row and column vanish identically (the far-detuned column of the
/// frame carries no θ, φ dependence), and the remaining block is independent
/// of γ; both facts are load-bearing for the holonomy results and are pinned
/// by tests rather than assumed here.
pub fn full_connection(angles: &MixingAngles) -> ConnectionSample {
    let gd = frame_matrix(angles).adjoint();
    ConnectionSample {
        a_theta: gd * frame_dtheta(angles),
        a_phi: gd * frame_dphi(angles),
    }
}

/// Doublet-projected connection: the upper-left 2x2 block of the full
/// connection, in the requested column order.
pub fn connection_ordered(angles: &MixingAngles, order: DoubletOrder) -> ConnectionSample {
    let full = full_connection(angles);
    let (mut at, mut ap) = (full.a_theta.block_2(), full.a_phi.block_2());
    if order == DoubletOrder::DarkSecond {
        let sx = pauli_x();
        at = sx * at * sx;
        ap = sx * ap * sx;
    }
    ConnectionSample { a_theta: at, a_phi: ap }
}

/// Doublet-projected connection in the printed column order.
pub fn connection(angles: &MixingAngles) -> ConnectionSample {
    connection_ordered(angles, DoubletOrder::DarkFirst)
}

/// Closed-form large-detuning connection:
///
/// ```text
/// A_θ = i cos φ σ_y + i sin φ σ_x
/// A_φ = -i sin²θ σ_z + i sin θ cos θ cos φ σ_x - i sin θ cos θ sin φ σ_y
/// ```
pub fn large_detuning_connection(theta: f64, phi: f64) -> ConnectionSample {
    let (s, c) = (fmath::sin(theta), fmath::cos(theta));
    let (sp, cp) = (fmath::sin(phi), fmath::cos(phi));
    let r = |x: f64| Complex64::new(x, 0.0);
    let a_theta = CMatrix::from_rows_2([
        [ZERO, I * r(sp) + r(cp)],
        [I * r(sp) - r(cp), ZERO],
    ]);
    // -i s² σ_z + i s c (cos φ σ_x - sin φ σ_y)
    let off = I * r(s * c) * Complex64::new(cp, sp);
    let a_phi = CMatrix::from_rows_2([
        [-I * r(s * s), off],
        [I * r(s * c) * Complex64::new(cp, -sp), I * r(s * s)],
    ]);
    ConnectionSample { a_theta, a_phi }
}

/// A connection field over the (θ, φ) parameter plane.
pub trait ConnectionField {
    fn sample(&self, theta: f64, phi: f64) -> ConnectionSample;
}

impl<F> ConnectionField for F
where
    F: Fn(f64, f64) -> ConnectionSample,
{
    fn sample(&self, theta: f64, phi: f64) -> ConnectionSample {
        self(theta, phi)
    }
}

/// Doublet-projected frame connection (γ-independent).
#[derive(Debug, Clone, Copy, Default)]
pub struct DoubletConnection {
    pub order: DoubletOrder,
}

impl ConnectionField for DoubletConnection {
    fn sample(&self, theta: f64, phi: f64) -> ConnectionSample {
        connection_ordered(&MixingAngles::new(theta, phi, 0.0), self.order)
    }
}

/// The printed large-detuning closed forms.
#[derive(Debug, Clone, Copy, Default)]
pub struct LargeDetuningConnection;

impl ConnectionField for LargeDetuningConnection {
    fn sample(&self, theta: f64, phi: f64) -> ConnectionSample {
        large_detuning_connection(theta, phi)
    }
}

/// Full (unprojected) 3x3 frame connection at fixed γ.
#[derive(Debug, Clone, Copy, Default)]
pub struct FullFrameConnection {
    pub gamma: f64,
}

impl ConnectionField for FullFrameConnection {
    fn sample(&self, theta: f64, phi: f64) -> ConnectionSample {
        full_connection(&MixingAngles::new(theta, phi, self.gamma))
    }
}

/// Diagonal Abelian surrogate: A_θ = 0, A_φ = -i sin²θ σ_z. This is the
/// adiabatic (level-resolved) limit of the doublet connection; its loop
/// integrals reproduce the solid-angle phase ±½Ω(C).
#[derive(Debug, Clone, Copy, Default)]
pub struct AbelianTestField;

impl ConnectionField for AbelianTestField {
    fn sample(&self, theta: f64, _phi: f64) -> ConnectionSample {
        let s = fmath::sin(theta);
        ConnectionSample {
            a_theta: CMatrix::zeros(2),
            a_phi: crate::numerics::pauli_z().scale(-I * Complex64::new(s * s, 0.0)),
        }
    }
}

/// Default finite-difference step for curvature evaluation.
pub const CURVATURE_FD_STEP: f64 = 1e-5;

/// Non-Abelian curvature F_θφ = ∂_θ A_φ − ∂_φ A_θ + [A_θ, A_φ], with the
/// derivatives taken by central differences of the supplied field.
pub fn curvature(field: &impl ConnectionField, theta: f64, phi: f64) -> CMatrix {
    curvature_with_step(field, theta, phi, CURVATURE_FD_STEP)
}

pub fn curvature_with_step(
    field: &impl ConnectionField,
    theta: f64,
    phi: f64,
    step: f64,
) -> CMatrix {
    let half = Complex64::new(0.5 / step, 0.0);
    let tp = field.sample(theta + step, phi);
    let tm = field.sample(theta - step, phi);
    let pp = field.sample(theta, phi + step);
    let pm = field.sample(theta, phi - step);
    let d_theta_a_phi = (tp.a_phi - tm.a_phi).scale(half);
    let d_phi_a_theta = (pp.a_theta - pm.a_theta).scale(half);
    let here = field.sample(theta, phi);
    let commutator = here.a_theta * here.a_phi - here.a_phi * here.a_theta;
    d_theta_a_phi - d_phi_a_theta + commutator
}

/// Spectral reconstruction of the lab-frame Hamiltonian:
/// H = Γ · diag(0, E₋, E₊) · Γ† with γ = γ(Δ, Ω).
///
/// Hermitian by construction; Γ† H Γ is diagonal to machine precision, which
/// ties the dynamics to the same geometry the connection is derived from. At
/// θ = 0 this is the familiar bright/excited two-level block
/// [[0, Ω/2], [Ω/2, Δ]] below the decoupled dark state.
pub fn reconstruct_hamiltonian(params: &LambdaParams, theta: f64, phi: f64) -> CMatrix {
    let angles = MixingAngles::new(theta, phi, gamma_angle(params));
    let g = frame_matrix(&angles);
    let [e0, em, ep] = energy_levels(params);
    let d = CMatrix::diagonal_3(
        Complex64::new(e0, 0.0),
        Complex64::new(em, 0.0),
        Complex64::new(ep, 0.0),
    );
    g * d * g.adjoint()
}
