//! Closed loops in (θ, φ) parameter space and the path-ordered Wilson loop.
//!
//! The integrator is a midpoint-rule ordered product: each polyline segment
//! contributes exp(−A_θ(mid)Δθ − A_φ(mid)Δφ), composed left-multiplicatively
//! in increasing path parameter (latest segment leftmost), matching the
//! transport equation dW/ds = −A(s)W. Every factor is exactly unitary, so
//! holonomies are unitary regardless of step count; the scheme is globally
//! second order in the step.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fmath;
use crate::lambda::{ConnectionField, ConnectionSample};
use crate::numerics::{matexp_skew, CMatrix};

use core::f64::consts::{FRAC_PI_2, TAU};

/// Largest parameter step (Euclidean, radians) the integrator accepts.
pub const MAX_PARAM_STEP: f64 = 0.1;

/// Step used when subdividing bridge segments between composite parts.
const BRIDGE_STEP: f64 = 0.05;

/// A closed discretized curve in (θ, φ) parameter space.
///
/// Closure is exact up to the φ-period: the last sample must have the same θ
/// bit pattern as the first and a φ offset that is an exact integer multiple
/// of 2π (loops that wind in φ end at 2πk). Generators in this module produce
/// bitwise-closed sample lists.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamLoop {
    samples: Vec<(f64, f64)>,
}

impl ParamLoop {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 8 {
            return Err(Error::InvalidSpec("a loop needs at least 8 samples"));
        }
        let (t0, p0) = samples[0];
        let (t1, p1) = *samples.last().expect("nonempty");
        let winding = (p1 - p0) / TAU;
        let closed = t0 == t1 && (p1 == p0 || winding == winding_round(winding));
        if !closed {
            return Err(Error::NotClosed);
        }
        Ok(ParamLoop { samples })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn num_segments(&self) -> usize {
        self.samples.len() - 1
    }

    /// Largest Euclidean parameter step between consecutive samples.
    pub fn max_step(&self) -> f64 {
        let mut worst = 0.0f64;
        for w in self.samples.windows(2) {
            worst = worst.max(fmath::hypot(w[1].0 - w[0].0, w[1].1 - w[0].1));
        }
        worst
    }

    /// Same geometric path traversed backwards.
    pub fn reversed(&self) -> ParamLoop {
        let mut samples = self.samples.clone();
        samples.reverse();
        ParamLoop { samples }
    }

    /// Polyline with a midpoint inserted in every segment: the same path at
    /// half the step.
    fn refined(&self) -> ParamLoop {
        let mut samples = Vec::with_capacity(2 * self.samples.len() - 1);
        for w in self.samples.windows(2) {
            samples.push(w[0]);
            samples.push((0.5 * (w[0].0 + w[1].0), 0.5 * (w[0].1 + w[1].1)));
        }
        samples.push(*self.samples.last().expect("nonempty"));
        ParamLoop { samples }
    }
}

fn winding_round(x: f64) -> f64 {
    fmath::floor(x + 0.5)
}

/// Families of closed drive loops.
///
/// α and β are the relative amplitude and delay of the generating pulses:
/// the lissajous family runs θ(s) = θ_amp·α·sin²(πs) (closing at the
/// dark-state pole θ = 0 where such sequences begin and end) and
/// φ(s) = φ_amp·sin(2πs + 2πβ + offset).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "snake_case"))]
pub enum LoopSpec {
    Circle {
        theta0: f64,
    },
    Lissajous {
        alpha: f64,
        beta: f64,
        theta_amp: f64,
        phi_amp: f64,
        #[cfg_attr(feature = "serde", serde(default))]
        phase_offset: f64,
    },
    Composite {
        parts: Vec<LoopSpec>,
    },
}

impl LoopSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            LoopSpec::Circle { theta0 } => {
                if !(*theta0 > 0.0 && *theta0 <= FRAC_PI_2) {
                    return Err(Error::InvalidSpec("circle: theta0 must lie in (0, pi/2]"));
                }
            }
            LoopSpec::Lissajous { alpha, beta, theta_amp, phi_amp, phase_offset } => {
                if !(*alpha > 0.0 && *alpha <= 1.0) {
                    return Err(Error::InvalidSpec("lissajous: alpha must lie in (0, 1]"));
                }
                if !(*beta >= 0.0 && *beta <= 1.0) {
                    return Err(Error::InvalidSpec("lissajous: beta must lie in [0, 1]"));
                }
                if !(*theta_amp > 0.0 && *theta_amp <= FRAC_PI_2) {
                    return Err(Error::InvalidSpec("lissajous: theta_amp must lie in (0, pi/2]"));
                }
                if !phi_amp.is_finite() || !phase_offset.is_finite() {
                    return Err(Error::InvalidSpec("lissajous: phi_amp/phase_offset must be finite"));
                }
            }
            LoopSpec::Composite { parts } => {
                if parts.is_empty() {
                    return Err(Error::InvalidSpec("composite: needs at least one part"));
                }
                for p in parts {
                    p.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Evaluate the loop curve at path parameter s ∈ [0, 1].
    ///
    /// Periodic families are evaluated at frac(s), so s = 0 and s = 1 give
    /// bitwise-identical points; circles wind monotonically and end at
    /// exactly 2π. Composite parts split [0, 1] evenly and are traversed in
    /// order (φ may jump between parts; see [`discretize`] for bridging).
    pub fn point_at(&self, s: f64) -> (f64, f64) {
        match self {
            LoopSpec::Circle { theta0 } => (*theta0, TAU * s),
            LoopSpec::Lissajous { alpha, beta, theta_amp, phi_amp, phase_offset } => {
                let sf = fmath::frac(s);
                let st = fmath::sin(core::f64::consts::PI * sf);
                let theta = theta_amp * alpha * st * st;
                let phi = phi_amp * fmath::sin(TAU * sf + TAU * beta + phase_offset);
                (theta, phi)
            }
            LoopSpec::Composite { parts } => {
                let k = parts.len() as f64;
                let u = s * k;
                let j = (fmath::floor(u) as usize).min(parts.len() - 1);
                parts[j].point_at(u - j as f64)
            }
        }
    }
}

/// Discretize a loop spec into an n-segment closed polyline (n+1 samples for
/// the simple families). Composite specs concatenate their parts with n
/// segments each, inserting subdivided straight bridges wherever consecutive
/// parts do not share a base point, and close back to the first sample.
pub fn discretize(spec: &LoopSpec, n: usize) -> Result<ParamLoop> {
    spec.validate()?;
    if n < 8 {
        return Err(Error::InvalidSpec("discretization needs n >= 8"));
    }
    match spec {
        LoopSpec::Composite { parts } => {
            let mut samples: Vec<(f64, f64)> = Vec::new();
            for part in parts {
                let part_samples = discretize(part, n)?;
                append_with_bridge(&mut samples, part_samples.samples());
            }
            let first = samples[0];
            let last = *samples.last().expect("nonempty");
            bridge_to(&mut samples, align_phi(last, first));
            ParamLoop::new(samples)
        }
        _ => {
            let mut samples = Vec::with_capacity(n + 1);
            for k in 0..=n {
                samples.push(spec.point_at(k as f64 / n as f64));
            }
            ParamLoop::new(samples)
        }
    }
}

/// Shift `target`'s φ by the whole number of turns that brings it closest to
/// `at` (ties toward zero turns), so winding accumulated by earlier parts is
/// preserved without introducing spurious extra windings.
fn align_phi(at: (f64, f64), target: (f64, f64)) -> (f64, f64) {
    let nearest = winding_round((at.1 - target.1) / TAU);
    let mut best = 0.0f64;
    let mut best_dist = fmath::abs(at.1 - target.1);
    for turns in [nearest - 1.0, nearest, nearest + 1.0] {
        let dist = fmath::abs(at.1 - (target.1 + TAU * turns));
        if dist < best_dist || (dist == best_dist && fmath::abs(turns) < fmath::abs(best)) {
            best = turns;
            best_dist = dist;
        }
    }
    (target.0, target.1 + TAU * best)
}

fn append_with_bridge(samples: &mut Vec<(f64, f64)>, part: &[(f64, f64)]) {
    if samples.is_empty() {
        samples.extend_from_slice(part);
        return;
    }
    let last = *samples.last().expect("nonempty");
    let first = align_phi(last, part[0]);
    let shift = first.1 - part[0].1;
    if first == last {
        // shared base point: plain concatenation, drop the duplicate
        samples.extend(part.iter().skip(1).map(|&(t, p)| (t, p + shift)));
    } else {
        bridge_to(samples, first);
        samples.extend(part.iter().skip(1).map(|&(t, p)| (t, p + shift)));
    }
}

/// Straight parameter-space segment from the current endpoint to `to`,
/// subdivided below the bridge step. The final sample is exactly `to`.
fn bridge_to(samples: &mut Vec<(f64, f64)>, to: (f64, f64)) {
    let from = *samples.last().expect("nonempty");
    if from == to {
        return;
    }
    let dist = fmath::hypot(to.0 - from.0, to.1 - from.1);
    let m = (dist / BRIDGE_STEP).max(1.0) as usize + 1;
    for j in 1..=m {
        if j == m {
            samples.push(to);
        } else {
            let f = j as f64 / m as f64;
            samples.push((from.0 + f * (to.0 - from.0), from.1 + f * (to.1 - from.1)));
        }
    }
}

/// A path-ordered loop transport: the unitary, the segment count it was
/// computed with, and a step-doubling error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Holonomy {
    pub matrix: CMatrix,
    pub steps: usize,
    pub richardson_error: f64,
}

fn ordered_product(samples: &[(f64, f64)], field: &impl ConnectionField) -> Result<CMatrix> {
    let mut u: Option<CMatrix> = None;
    for w in samples.windows(2) {
        let (t0, p0) = w[0];
        let (t1, p1) = w[1];
        let sample: ConnectionSample = field.sample(0.5 * (t0 + t1), 0.5 * (p0 + p1));
        let m = -(sample.a_theta.scale(Complex64::new(t1 - t0, 0.0))
            + sample.a_phi.scale(Complex64::new(p1 - p0, 0.0)));
        let factor = matexp_skew(&m)?;
        u = Some(match u {
            None => factor,
            Some(acc) => factor * acc,
        });
    }
    Ok(u.expect("loop has at least one segment"))
}

/// Path-ordered Wilson loop U = P exp(−∮ A_μ dμ) over a closed polyline.
///
/// The connection dimension follows the provider (2x2 doublet-projected
/// fields or the full 3x3 frame connection). `richardson_error` is
/// ‖U_n − U_2n‖_F from one step-doubling on the same polyline.
pub fn wilson_loop(param_loop: &ParamLoop, field: &impl ConnectionField) -> Result<Holonomy> {
    let max_step = param_loop.max_step();
    if max_step > MAX_PARAM_STEP {
        return Err(Error::StepTooLarge { step: max_step, max: MAX_PARAM_STEP });
    }
    let coarse = ordered_product(param_loop.samples(), field)?;
    let fine = ordered_product(param_loop.refined().samples(), field)?;
    Ok(Holonomy {
        matrix: coarse,
        steps: param_loop.num_segments(),
        richardson_error: (coarse - fine).frobenius_norm(),
    })
}

/// Unordered loop integral ∮ A_μ dμ by the same midpoint rule (no path
/// ordering). For commuting (diagonal) fields exp(−integral) equals the
/// Wilson loop; the gap between the two is the ordering effect.
pub fn loop_integral(param_loop: &ParamLoop, field: &impl ConnectionField) -> CMatrix {
    let mut acc: Option<CMatrix> = None;
    for w in param_loop.samples().windows(2) {
        let (t0, p0) = w[0];
        let (t1, p1) = w[1];
        let sample = field.sample(0.5 * (t0 + t1), 0.5 * (p0 + p1));
        let m = sample.a_theta.scale(Complex64::new(t1 - t0, 0.0))
            + sample.a_phi.scale(Complex64::new(p1 - p0, 0.0));
        acc = Some(match acc {
            None => m,
            Some(a) => a + m,
        });
    }
    acc.expect("loop has at least one segment")
}

/// ‖U₁U₂ − U₂U₁‖_F; zero iff the holonomies commute.
pub fn loop_commutator_norm(u1: &Holonomy, u2: &Holonomy) -> Result<f64> {
    if u1.matrix.dim() != u2.matrix.dim() {
        return Err(Error::DimensionMismatch { expected: u1.matrix.dim(), got: u2.matrix.dim() });
    }
    let a = u1.matrix;
    let b = u2.matrix;
    Ok((a * b - b * a).frobenius_norm())
}

/// Solid angle enclosed by the circle θ = θ₀: Ω(C) = 2π(1 − cos 2θ₀), so the
/// Abelian loop phase is ½Ω(C) = π(1 − cos 2θ₀).
pub fn solid_angle(theta0: f64) -> f64 {
    TAU * (1.0 - fmath::cos(2.0 * theta0))
}
