//! Direct integration of `i dΨ/dt = H(t) Ψ` along a curve.
//!
//! Time is rescaled to the curve parameter `s = t/T`. The state is kept at
//! unit norm after every accepted step and the discarded magnitude is
//! accumulated in `log_norm`: non-Hermitian evolution over long times easily
//! leaves the range of `f64`.

use rayon::prelude::*;

use crate::curve::CurveSpec;
use crate::error::{Error, Result};
use crate::family::MatrixFamily;
use crate::linalg::{inner, CVector, Eigenframe, C64};
use crate::phase::{dynamical_phase_for, geometric_phase};
use crate::tracking::{track, SpectralPath};

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    /// Unit-norm direction of `Ψ(T)`.
    pub final_state: CVector,
    /// `ln |Ψ(T)|`.
    pub log_norm: f64,
    pub duration: f64,
    pub steps: usize,
    pub rejected: usize,
}

impl EvolutionResult {
    /// `ln <φ|Ψ(T)>`.
    pub fn overlap_ln(&self, frame: &Eigenframe, label: usize) -> C64 {
        inner(frame.left(label), &self.final_state).ln() + self.log_norm
    }

    /// `|<ψ|Ψ>| / (|ψ| |Ψ|)`: weight of the orthogonal projection onto `ψ_label`.
    pub fn fidelity(&self, frame: &Eigenframe, label: usize) -> f64 {
        let psi = frame.right(label);
        inner(psi, &self.final_state).norm() / (psi.norm() * self.final_state.norm())
    }

    /// `Ψ(T)` itself; overflows for large `log_norm`.
    pub fn state(&self) -> CVector {
        &self.final_state * C64::new(self.log_norm.exp(), 0.0)
    }
}

// Dormand–Prince 5(4)
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Solves `dΨ/ds = −i T H(curve(s)) Ψ` for `s ∈ [0, 1]`.
pub fn integrate(
    family: &dyn MatrixFamily,
    curve: &CurveSpec,
    duration: f64,
    psi0: &CVector,
    rel_tol: f64,
) -> Result<EvolutionResult> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::InvalidParams("duration must be positive".into()));
    }
    if !(rel_tol > 1e-14 && rel_tol < 1e-2) {
        return Err(Error::InvalidParams("rel_tol must lie in (1e-14, 1e-2)".into()));
    }
    if psi0.len() != family.dim() {
        return Err(Error::DimensionMismatch { expected: family.dim(), got: psi0.len() });
    }
    let n0 = psi0.norm();
    if !(n0 > 0.0 && n0.is_finite()) {
        return Err(Error::InvalidParams("initial state must be nonzero".into()));
    }
    let mi_t = C64::new(0.0, -duration);
    let rhs = |s: f64, y: &CVector| -> CVector { family.matrix(&curve.map(s)).mul_vec(y) * mi_t };

    let mut y = psi0 / C64::new(n0, 0.0);
    let mut log_norm = n0.ln();
    let mut s = 0.0;
    let h_norm = family.matrix(&curve.map(0.0)).norm();
    let mut h = (0.01 / (1.0 + duration * h_norm)).min(0.01);
    let mut k1 = rhs(0.0, &y);
    let (mut steps, mut rejected) = (0usize, 0usize);
    while s < 1.0 {
        if s + h > 1.0 {
            h = 1.0 - s;
        }
        if h < 1e-15 {
            return Err(Error::StepUnderflow { s });
        }
        let mut k: Vec<CVector> = Vec::with_capacity(7);
        k.push(k1.clone());
        for st in 1..7 {
            let mut yi = y.clone();
            for (j, kj) in k.iter().enumerate() {
                if A[st][j] != 0.0 {
                    yi += kj * C64::new(h * A[st][j], 0.0);
                }
            }
            k.push(rhs(s + C[st] * h, &yi));
        }
        let mut y_new = y.clone();
        let mut err = CVector::zeros(y.len());
        for j in 0..7 {
            if j < 6 && A[6][j] != 0.0 {
                y_new += &k[j] * C64::new(h * A[6][j], 0.0);
            }
            if E[j] != 0.0 {
                err += &k[j] * C64::new(h * E[j], 0.0);
            }
        }
        let scale = rel_tol * y.norm().max(y_new.norm());
        let e = err.norm() / scale;
        if e <= 1.0 {
            s = if s + h >= 1.0 { 1.0 } else { s + h };
            let nrm = y_new.norm();
            if !(nrm > 0.0 && nrm.is_finite()) {
                return Err(Error::StepUnderflow { s });
            }
            log_norm += nrm.ln();
            y = y_new / C64::new(nrm, 0.0);
            k1 = &k[6] / C64::new(nrm, 0.0);
            steps += 1;
            let fac = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            rejected += 1;
            let fac = if e.is_finite() { (0.9 * e.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h *= fac;
        }
    }
    Ok(EvolutionResult { final_state: y, log_norm, duration, steps, rejected })
}

/// Fidelity below which the adiabatic decomposition is refused.
pub const MIN_FIDELITY: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdiabaticPhase {
    pub gamma_exact: C64,
    pub total_phase: C64,
    pub dynamical: C64,
    pub fidelity: f64,
}

/// `γ_exact = −i ln(<φ_n(T)|Ψ(T)>/k) − δ_n(T)` for an evolution started at
/// `k ψ_n(0)`; the 2π winding of the real part is taken from the discrete
/// geometric phase of `path`.
pub fn adiabatic_extract(result: &EvolutionResult, path: &SpectralPath, label: usize, k: C64) -> Result<AdiabaticPhase> {
    let discrete = geometric_phase(path, label)?;
    let end = path.samples().last().expect("nonempty path");
    let end_label = *path.branch(label).last().expect("nonempty");
    let fidelity = result.fidelity(&end.frame, end_label);
    if !(fidelity >= MIN_FIDELITY) {
        return Err(Error::LowFidelity { fidelity });
    }
    let i = C64::new(0.0, 1.0);
    let total = -i * (result.overlap_ln(&end.frame, end_label) - k.ln());
    let dynamical = dynamical_phase_for(path, label, result.duration);
    let mut gamma = total - dynamical;
    let two_pi = 2.0 * std::f64::consts::PI;
    gamma.re += two_pi * ((discrete.raw() - gamma.re) / two_pi).round();
    Ok(AdiabaticPhase { gamma_exact: gamma, total_phase: total, dynamical, fidelity })
}

#[derive(Clone, Debug, PartialEq)]
pub enum RowStatus {
    Ok,
    NonAdiabatic,
    Failed(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub duration: f64,
    pub gamma_exact: Option<C64>,
    pub gamma_discrete: C64,
    /// `|γ_exact − γ_discrete|`.
    pub error: Option<f64>,
    pub fidelity: Option<f64>,
    pub status: RowStatus,
}

/// Evolves `ψ_label(0)` over `curve` for each total duration in `durations`
/// and compares the extracted geometric phase to the discrete holonomy.
pub fn sweep(
    family: &dyn MatrixFamily,
    curve: &CurveSpec,
    label: usize,
    durations: &[f64],
    rel_tol: f64,
    n_samples: usize,
) -> Result<Vec<SweepRow>> {
    if durations.is_empty() {
        return Ok(vec![]);
    }
    let path = track(family, curve, n_samples)?;
    let discrete = geometric_phase(&path, label)?.geometric;
    let psi0 = path.samples()[0].frame.right(label).clone();
    let one = C64::new(1.0, 0.0);
    Ok(durations
        .par_iter()
        .map(|&t| {
            let base = SweepRow {
                duration: t,
                gamma_exact: None,
                gamma_discrete: discrete,
                error: None,
                fidelity: None,
                status: RowStatus::Ok,
            };
            let evo = match integrate(family, curve, t, &psi0, rel_tol) {
                Ok(e) => e,
                Err(e) => return SweepRow { status: RowStatus::Failed(e.to_string()), ..base },
            };
            let end = path.samples().last().expect("nonempty");
            let end_label = *path.branch(label).last().expect("nonempty");
            let fidelity = Some(evo.fidelity(&end.frame, end_label));
            match adiabatic_extract(&evo, &path, label, one) {
                Ok(a) => SweepRow {
                    gamma_exact: Some(a.gamma_exact),
                    error: Some((a.gamma_exact - discrete).norm()),
                    fidelity,
                    ..base
                },
                Err(Error::LowFidelity { .. }) => SweepRow { fidelity, status: RowStatus::NonAdiabatic, ..base },
                Err(e) => SweepRow { fidelity, status: RowStatus::Failed(e.to_string()), ..base },
            }
        })
        .collect())
}
