//! Direct time-dependent Schrödinger evolution along a driven parameter loop:
//! the second, independent route to the loop transport.
//!
//! The propagator is an exponential midpoint rule: each step applies
//! exp(−i H(t_mid) Δt) exactly, so with Hermitian H the evolution is unitary
//! per step by construction and norm drift is a roundoff-level diagnostic,
//! not an integration error. Accuracy is second order in the step through
//! the time-dependence of H.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fmath;
use crate::holonomy::LoopSpec;
use crate::lambda::{
    energy_levels, frame_matrix, gamma_angle, reconstruct_hamiltonian, LambdaParams, MixingAngles,
};
use crate::numerics::{matexp, matexp_skew, CMatrix, ZERO};

/// Largest phase of the fastest eigenfrequency per step the propagator
/// accepts: dt·√(Δ² + Ω²) ≤ 0.2.
pub const MAX_PHASE_PER_STEP: f64 = 0.2;

/// Population threshold above which a run is flagged non-adiabatic.
pub const LEAKAGE_THRESHOLD: f64 = 0.01;

/// A drive realizing a loop spec by uniform traversal over a duration T
/// (units of 1/Ω): t ↦ loop point at s = t/T. Closure of the spec makes the
/// schedule close in time.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSchedule {
    spec: LoopSpec,
    duration: f64,
}

impl LoopSchedule {
    pub fn new(spec: LoopSpec, duration: f64) -> Result<Self> {
        spec.validate()?;
        if duration <= 0.0 || !duration.is_finite() {
            return Err(Error::InvalidParams("schedule duration must be positive and finite"));
        }
        Ok(LoopSchedule { spec, duration })
    }

    pub fn spec(&self) -> &LoopSpec {
        &self.spec
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// (θ(t), φ(t)).
    pub fn angles_at(&self, t: f64) -> (f64, f64) {
        self.spec.point_at(t / self.duration)
    }
}

/// Amplitudes in the fixed atomic basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumState(pub [Complex64; 3]);

impl QuantumState {
    /// Basis state 1: the dark state at the θ = 0 pole, the canonical
    /// initial state for loop drives.
    pub fn dark() -> Self {
        QuantumState([Complex64::new(1.0, 0.0), ZERO, ZERO])
    }

    pub fn basis_state(k: usize) -> Self {
        let mut a = [ZERO; 3];
        a[k] = Complex64::new(1.0, 0.0);
        QuantumState(a)
    }

    pub fn norm(&self) -> f64 {
        fmath::sqrt(self.0.iter().map(|z| z.norm_sqr()).sum())
    }

    /// |amplitude|² per basis state.
    pub fn populations(&self) -> [f64; 3] {
        [self.0[0].norm_sqr(), self.0[1].norm_sqr(), self.0[2].norm_sqr()]
    }
}

/// |amplitude|² per basis state.
pub fn populations(psi: &QuantumState) -> [f64; 3] {
    psi.populations()
}

/// Instantaneous Hamiltonian of the driven system at time t.
///
/// Hermitian when the decay option is absent; with a linewidth Γ_e set, adds
/// −i(Γ_e/2) on the far-detuned-state projector (norm is then lost, never
/// renormalized).
pub fn hamiltonian_at(schedule: &LoopSchedule, params: &LambdaParams, t: f64) -> Result<CMatrix> {
    if !(0.0..=schedule.duration).contains(&t) {
        return Err(Error::InvalidTime { t, duration: schedule.duration });
    }
    let (theta, phi) = schedule.angles_at(t);
    let mut h = reconstruct_hamiltonian(params, theta, phi);
    if let Some(decay) = params.decay {
        let g = frame_matrix(&MixingAngles::new(theta, phi, gamma_angle(params)));
        let mut p3 = CMatrix::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                p3[(i, j)] = g[(i, 2)] * g[(j, 2)].conj();
            }
        }
        h = h + p3.scale(Complex64::new(0.0, -decay / 2.0));
    }
    Ok(h)
}

/// Outcome of a propagation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionResult {
    pub final_state: QuantumState,
    pub populations: [f64; 3],
    /// |‖ψ(T)‖ − 1|; with decay on, the accumulated norm loss.
    pub norm_drift: f64,
    /// Smallest |E₊ − E₋| along the path (constant for this family: √(Δ²+Ω²)).
    pub min_gap: f64,
}

/// Propagate ψ through one traversal of the schedule with per-step unitaries
/// exp(−i H(t_mid) h), h = T/⌈T/dt⌉ ≤ dt.
pub fn evolve(
    schedule: &LoopSchedule,
    params: &LambdaParams,
    psi0: &QuantumState,
    dt: f64,
) -> Result<EvolutionResult> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::InvalidParams("dt must be positive and finite"));
    }
    let fastest = params.rabi_splitting();
    if dt * fastest > MAX_PHASE_PER_STEP {
        return Err(Error::StepTooLarge { step: dt, max: MAX_PHASE_PER_STEP / fastest });
    }
    let norm0 = psi0.norm();
    if fmath::abs(norm0 - 1.0) > 1e-8 {
        return Err(Error::NotNormalized { norm: norm0 });
    }

    let t_total = schedule.duration;
    let steps = fmath::ceil(t_total / dt) as usize;
    let h = t_total / steps as f64;
    let decay_on = params.decay.is_some();

    let mut amps = psi0.0;
    for k in 0..steps {
        let t_mid = (k as f64 + 0.5) * h;
        let ham = hamiltonian_at(schedule, params, t_mid)?;
        let generator = ham.scale(Complex64::new(0.0, -h));
        let step_u = if decay_on { matexp(&generator) } else { matexp_skew(&generator)? };
        amps = step_u.apply(&amps);
    }

    let final_state = QuantumState(amps);
    let [_, em, ep] = energy_levels(params);
    Ok(EvolutionResult {
        populations: final_state.populations(),
        norm_drift: fmath::abs(final_state.norm() - 1.0),
        min_gap: ep - em,
        final_state,
    })
}

/// Population left in the far-detuned frame state |v₃(θ, φ, γ)⟩.
pub fn doublet_leakage(state: &QuantumState, angles: &MixingAngles) -> f64 {
    let g = frame_matrix(angles);
    let mut overlap = ZERO;
    for i in 0..3 {
        overlap += g[(i, 2)].conj() * state.0[i];
    }
    overlap.norm_sqr()
}

/// Adiabaticity diagnostics for a schedule, run from the dark state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticityReport {
    /// Final population outside the dark/near-dark doublet.
    pub leakage: f64,
    /// |E₋|·T, the phase the near-dark level accumulates over the run.
    pub dynamical_phase_bound: f64,
    pub min_gap: f64,
    /// True when leakage exceeds [`LEAKAGE_THRESHOLD`].
    pub non_adiabatic: bool,
}

pub fn adiabaticity_report(
    schedule: &LoopSchedule,
    params: &LambdaParams,
    dt: f64,
) -> Result<AdiabaticityReport> {
    let result = evolve(schedule, params, &QuantumState::dark(), dt)?;
    let (theta, phi) = schedule.angles_at(schedule.duration);
    let angles = MixingAngles::new(theta, phi, gamma_angle(params));
    let leakage = doublet_leakage(&result.final_state, &angles);
    let [_, em, _] = energy_levels(params);
    Ok(AdiabaticityReport {
        leakage,
        dynamical_phase_bound: em.abs() * schedule.duration,
        min_gap: result.min_gap,
        non_adiabatic: leakage > LEAKAGE_THRESHOLD,
    })
}
