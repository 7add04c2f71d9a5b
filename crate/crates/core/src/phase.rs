//! Dynamical and geometric phases along tracked branches.
//!
//! The discrete holonomy of a closed branch is `Π_k t_k⁻¹`, where each
//! transport factor `t_k` is built from the biorthogonal overlaps of
//! neighbouring frames. The overlap product telescopes under any per-sample
//! rescaling `ψ → kψ, φ → φ/k*`, so the closed-loop value is gauge invariant.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::curve::{CurveSpec, Orientation};
use crate::error::{Error, Result};
use crate::family::{EpLocus, MatrixFamily};
use crate::linalg::{inner, CVector, ComplexMatrix, C64};
use crate::tracking::{self, track, SpectralPath};

/// How single-step transports are turned into a loop phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum HolonomyScheme {
    /// `t = <φ_k|ψ_{k+1}>`. First order in the step for non-Hermitian frames.
    Plain,
    /// `t = <φ_k|ψ_{k+1}> / sqrt(<φ_k|ψ_{k+1}><φ_{k+1}|ψ_k>)`; even error expansion.
    Symmetric,
    /// Symmetric transport with one Richardson step against the every-other-sample loop.
    #[default]
    Extrapolated,
}

/// Single-step overlaps whose two-way product strays further than this from 1
/// are too coarse to trust.
pub const MAX_STEP_DEVIATION: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseResult {
    pub label: usize,
    pub dynamical: C64,
    /// Complex geometric phase; the real part is the unwrapped value.
    pub geometric: C64,
    pub holonomy_factor: C64,
    pub traversals: usize,
    pub n_samples_used: usize,
}

pub fn wrap_angle(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

impl PhaseResult {
    pub fn raw(&self) -> f64 {
        self.geometric.re
    }
    /// Real part reduced to (−π, π].
    pub fn wrapped(&self) -> f64 {
        wrap_angle(self.geometric.re)
    }
    pub fn winding(&self) -> i64 {
        ((self.raw() - self.wrapped()) / (2.0 * PI)).round() as i64
    }
    pub fn imag(&self) -> f64 {
        self.geometric.im
    }
    /// Geometric phase with its real part reduced mod 2π.
    pub fn geometric_mod_2pi(&self) -> C64 {
        C64::new(self.wrapped(), self.geometric.im)
    }
}

fn trapezoid(t: &[f64], f: &[C64]) -> C64 {
    t.windows(2).zip(f.windows(2)).map(|(tt, ff)| (ff[0] + ff[1]) * (0.5 * (tt[1] - tt[0]))).sum()
}

/// `δ_n = −∫ E_n dt` over the physical duration of the path's curve.
pub fn dynamical_phase(path: &SpectralPath, label: usize) -> C64 {
    dynamical_phase_for(path, label, path.curve().duration())
}

/// `δ_n` for an explicit total duration.
pub fn dynamical_phase_for(path: &SpectralPath, label: usize, duration: f64) -> C64 {
    let ts: Vec<f64> = path.samples().iter().map(|s| s.t).collect();
    -trapezoid(&ts, &path.branch_energies(label)) * duration
}

/// Right/left vectors along the branch; the closing sample reuses the start frame.
fn branch_vectors(path: &SpectralPath, label: usize) -> (Vec<CVector>, Vec<CVector>) {
    let labels = path.branch(label);
    let mut psi: Vec<CVector> =
        labels.iter().zip(path.samples()).map(|(&l, s)| s.frame.right(l).clone()).collect();
    let mut phi: Vec<CVector> =
        labels.iter().zip(path.samples()).map(|(&l, s)| s.frame.left(l).clone()).collect();
    if path.curve().is_closed() {
        let last = psi.len() - 1;
        psi[last] = psi[0].clone();
        phi[last] = phi[0].clone();
    }
    (psi, phi)
}

/// Minimum relative magnitude an anchor component must keep along the whole branch.
const ANCHOR_MIN: f64 = 0.1;

/// Rewrites the branch in a smooth gauge: unit norm and one fixed component
/// real positive when such a component stays well away from zero, otherwise
/// parallel transport with all holonomy in the closing step.
fn canonical_gauge(psi: &mut [CVector], phi: &mut [CVector], closed: bool) {
    let n = psi[0].len();
    let anchor = (0..n).find(|&c| psi.iter().all(|v| v[c].norm() >= ANCHOR_MIN * v.norm()));
    let rescale = |psi: &mut CVector, phi: &mut CVector, g: C64| {
        *psi *= g;
        *phi /= g.conj();
    };
    match anchor {
        Some(c) => {
            for (p, q) in psi.iter_mut().zip(phi.iter_mut()) {
                let g = p[c].conj() / (p[c].norm() * p.norm());
                rescale(p, q, g);
            }
        }
        None => {
            let g0 = C64::new(1.0 / psi[0].norm(), 0.0);
            rescale(&mut psi[0], &mut phi[0], g0);
            let stop = if closed { psi.len() - 1 } else { psi.len() };
            for k in 1..stop {
                let g = C64::new(1.0 / psi[k].norm(), 0.0);
                rescale(&mut psi[k], &mut phi[k], g);
                let t = symmetric_transport(&psi[k - 1], &phi[k - 1], &psi[k], &phi[k]).0;
                let g = if t.norm() > 0.0 { t.conj() / t.norm() } else { C64::new(1.0, 0.0) };
                rescale(&mut psi[k], &mut phi[k], g);
            }
            if closed {
                let last = psi.len() - 1;
                psi[last] = psi[0].clone();
                phi[last] = phi[0].clone();
            }
        }
    }
}

/// `(t, s)` with `s = <φ_a|ψ_b><φ_b|ψ_a>` (gauge invariant) and `t = <φ_a|ψ_b>/sqrt(s)`.
fn symmetric_transport(psi_a: &CVector, phi_a: &CVector, psi_b: &CVector, phi_b: &CVector) -> (C64, C64) {
    let fwd = inner(phi_a, psi_b);
    let s = fwd * inner(phi_b, psi_a);
    (fwd / s.sqrt(), s)
}

fn suggested_samples(n: usize, deviation: f64) -> usize {
    let factor = (deviation / 0.05).sqrt().ceil() as usize;
    (n * factor.max(2)).max(16)
}

/// `Σ ln t_k` over the steps `stride` apart.
fn log_transport_sum(
    psi: &[CVector],
    phi: &[CVector],
    ts: &[f64],
    stride: usize,
    scheme: HolonomyScheme,
    n_used: usize,
) -> Result<C64> {
    let mut sum = C64::new(0.0, 0.0);
    let mut k = 0;
    while k + stride < psi.len() {
        let (a, b) = (k, k + stride);
        let fwd = inner(&phi[a], &psi[b]);
        let s = fwd * inner(&phi[b], &psi[a]);
        let dev = (C64::new(1.0, 0.0) - s).norm();
        if !(dev <= MAX_STEP_DEVIATION) {
            return Err(Error::PrecisionLoss { t: ts[a], suggested_samples: suggested_samples(n_used, dev) });
        }
        let t = match scheme {
            HolonomyScheme::Plain => fwd,
            _ => fwd / s.sqrt(),
        };
        sum += t.ln();
        k += stride;
    }
    Ok(sum)
}

fn check_cyclic(path: &SpectralPath, label: usize) -> Result<()> {
    let sigma = path.monodromy().ok_or(Error::OpenCurve)?;
    if sigma.apply(label) != label {
        return Err(Error::NonCyclicBranch { label, period: sigma.periods()[label] });
    }
    Ok(())
}

pub fn geometric_phase(path: &SpectralPath, label: usize) -> Result<PhaseResult> {
    geometric_phase_with(path, label, HolonomyScheme::default())
}

pub fn geometric_phase_with(path: &SpectralPath, label: usize, scheme: HolonomyScheme) -> Result<PhaseResult> {
    check_cyclic(path, label)?;
    let (mut psi, mut phi) = branch_vectors(path, label);
    canonical_gauge(&mut psi, &mut phi, true);
    let ts: Vec<f64> = path.samples().iter().map(|s| s.t).collect();
    let n_used = path.len() - 1;
    let fine = log_transport_sum(&psi, &phi, &ts, 1, scheme, n_used)?;
    let i = C64::new(0.0, 1.0);
    let gamma = match scheme {
        HolonomyScheme::Extrapolated if path.is_uniform() && n_used % 2 == 0 => {
            match log_transport_sum(&psi, &phi, &ts, 2, HolonomyScheme::Symmetric, n_used) {
                Ok(coarse) => {
                    // both sums carry the same holonomy; keep them on one log branch
                    let shift = 2.0 * PI * ((fine.im - coarse.im) / (2.0 * PI)).round();
                    i * (fine * 4.0 - (coarse + C64::new(0.0, shift))) / 3.0
                }
                Err(_) => i * fine,
            }
        }
        _ => i * fine,
    };
    Ok(PhaseResult {
        label,
        dynamical: dynamical_phase(path, label),
        geometric: gamma,
        holonomy_factor: (i * gamma).exp(),
        traversals: path.curve().traversals(),
        n_samples_used: n_used,
    })
}

/// Running geometric phase `(t, γ(t))` in the canonical gauge (symmetric transport).
/// Open-path values are gauge dependent; only the closed-loop value is physical.
pub fn running_phase(path: &SpectralPath, label: usize) -> Vec<(f64, C64)> {
    let (mut psi, mut phi) = branch_vectors(path, label);
    let closed = path.curve().is_closed() && path.monodromy().is_some_and(|m| m.apply(label) == label);
    canonical_gauge(&mut psi, &mut phi, closed);
    let i = C64::new(0.0, 1.0);
    let mut acc = C64::new(0.0, 0.0);
    let mut out = vec![(path.samples()[0].t, acc)];
    for k in 0..psi.len() - 1 {
        let (t, _) = symmetric_transport(&psi[k], &phi[k], &psi[k + 1], &phi[k + 1]);
        acc += i * t.ln();
        out.push((path.samples()[k + 1].t, acc));
    }
    out
}

/// Raw product `Π <φ_k|ψ_{k+1}>` of the stored frames around a closed branch.
pub fn overlap_product(path: &SpectralPath, label: usize) -> Result<C64> {
    check_cyclic(path, label)?;
    let (psi, phi) = branch_vectors(path, label);
    Ok((0..psi.len() - 1).map(|k| inner(&phi[k], &psi[k + 1])).product())
}

/// Rescales `ψ_j → k ψ_j`, `φ_j → φ_j / k*` at every sample.
pub fn gauge_perturb(path: &SpectralPath, rescalings: &[Vec<C64>]) -> Result<SpectralPath> {
    if rescalings.len() != path.len() {
        return Err(Error::DimensionMismatch { expected: path.len(), got: rescalings.len() });
    }
    let n = path.dim();
    let mut frames = Vec::with_capacity(path.len());
    for (si, (s, ks)) in path.samples().iter().zip(rescalings).enumerate() {
        if ks.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: ks.len() });
        }
        let mut right = Vec::with_capacity(n);
        let mut left = Vec::with_capacity(n);
        for (j, &k) in ks.iter().enumerate() {
            if k == C64::new(0.0, 0.0) || !k.re.is_finite() || !k.im.is_finite() {
                return Err(Error::ZeroGauge { sample: si, label: j });
            }
            right.push(s.frame.right(j) * k);
            left.push(s.frame.left(j) / k.conj());
        }
        frames.push(s.frame.with_vectors(right, left));
    }
    Ok(path.with_frames(frames))
}

/// One branch segment in an explicit local gauge.
#[derive(Clone, Debug)]
pub struct PatchSegment {
    /// Physical times.
    pub times: Vec<f64>,
    pub energies: Vec<C64>,
    pub psi: Vec<CVector>,
    pub phi: Vec<CVector>,
}

impl PatchSegment {
    /// Samples `start..=end` of the branch started at `label`, rescaled by `gauge[k]`.
    pub fn from_path(path: &SpectralPath, label: usize, start: usize, end: usize, gauge: &[C64]) -> Result<Self> {
        if !(start < end && end < path.len()) {
            return Err(Error::InvalidSampling(format!("segment {start}..={end} outside path")));
        }
        if gauge.len() != end - start + 1 {
            return Err(Error::DimensionMismatch { expected: end - start + 1, got: gauge.len() });
        }
        let (psi, phi) = branch_vectors(path, label);
        let energies = path.branch_energies(label);
        let duration = path.curve().duration();
        let mut seg = Self { times: vec![], energies: vec![], psi: vec![], phi: vec![] };
        for (k, &g) in (start..=end).zip(gauge) {
            if g == C64::new(0.0, 0.0) {
                return Err(Error::ZeroGauge { sample: k, label });
            }
            seg.times.push(path.samples()[k].t * duration);
            seg.energies.push(energies[k]);
            seg.psi.push(&psi[k] * g);
            seg.phi.push(&phi[k] / g.conj());
        }
        Ok(seg)
    }

    fn open_product(&self, scheme: HolonomyScheme) -> Result<C64> {
        let ts = self.times.clone();
        let n = self.psi.len();
        let scheme = if scheme == HolonomyScheme::Extrapolated { HolonomyScheme::Symmetric } else { scheme };
        Ok(log_transport_sum(&self.psi, &self.phi, &ts, 1, scheme, n)?.exp())
    }
}

/// Transition `𝒢` with `ψ^prev = 𝒢 ψ^next` at their shared junction point.
pub fn computed_transition(prev: &PatchSegment, next: &PatchSegment) -> C64 {
    inner(&next.phi[0], prev.psi.last().expect("nonempty segment"))
}

pub const JUNCTION_TOL: f64 = 1e-6;

/// Holonomy from segments in independent local gauges joined by transition
/// values: `Π_i e^{iγ(seg_i)} 𝒢_i`, where `transitions[i]` sits at the end of
/// segment `i` (the last one closes the loop onto segment 0).
pub fn multipatch_phase(
    segments: &[PatchSegment],
    transitions: &[C64],
    label: usize,
    scheme: HolonomyScheme,
) -> Result<PhaseResult> {
    let r = segments.len();
    if r == 0 || transitions.len() != r {
        return Err(Error::DimensionMismatch { expected: r, got: transitions.len() });
    }
    let mut factor = C64::new(1.0, 0.0);
    let mut dynamical = C64::new(0.0, 0.0);
    for (i, seg) in segments.iter().enumerate() {
        if seg.psi.len() < 2 {
            return Err(Error::InvalidSampling("segment needs two samples".into()));
        }
        let next = &segments[(i + 1) % r];
        let g = transitions[i];
        let back = inner(seg.phi.last().expect("nonempty"), &next.psi[0]);
        let deviation = (back * g - 1.0).norm();
        if !(deviation <= JUNCTION_TOL) {
            return Err(Error::MismatchedJunction { index: i, deviation });
        }
        factor *= g / seg.open_product(scheme)?;
        dynamical -= trapezoid(&seg.times, &seg.energies);
    }
    let n_used = segments.iter().map(|s| s.psi.len() - 1).sum();
    Ok(PhaseResult {
        label,
        dynamical,
        geometric: -C64::new(0.0, 1.0) * factor.ln(),
        holonomy_factor: factor,
        traversals: 1,
        n_samples_used: n_used,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurvatureMethod {
    ExteriorDerivative,
    SumOverStates,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureSample {
    pub point: Vec<f64>,
    pub label: usize,
    /// Antisymmetric `F_ij`.
    pub components: Vec<Vec<C64>>,
    pub method: CurvatureMethod,
}

impl CurvatureSample {
    /// `F(u, v) = Σ F_ij u_i v_j`.
    pub fn contract(&self, u: &[f64], v: &[f64]) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (i, row) in self.components.iter().enumerate() {
            for (j, f) in row.iter().enumerate() {
                acc += f * (u[i] * v[j]);
            }
        }
        acc
    }
}

/// `1e-4 ×` distance to the nearest known degeneracy (or `1e-4` if unknown).
pub fn default_step(family: &dyn MatrixFamily, point: &[f64]) -> f64 {
    let d = family.ep_locus().distance(point).unwrap_or(1.0);
    1e-4 * if d > 0.0 { d } else { 1.0 }
}

fn offset(point: &[f64], i: usize, h: f64) -> Vec<f64> {
    let mut p = point.to_vec();
    p[i] += h;
    p
}

fn frame_near(family: &dyn MatrixFamily, p: &[f64], energy: C64) -> Result<(C64, CVector, CVector)> {
    let f = tracking::frame_at(family, 0.0, p)?;
    let l = f.nearest_label(energy);
    Ok((f.eigenvalue(l), f.right(l).clone(), f.left(l).clone()))
}

pub fn curvature(
    family: &dyn MatrixFamily,
    point: &[f64],
    label: usize,
    h: Option<f64>,
    method: CurvatureMethod,
) -> Result<CurvatureSample> {
    let d = family.param_dim();
    if point.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: point.len() });
    }
    let h = h.unwrap_or_else(|| default_step(family, point));
    let center = tracking::frame_at(family, 0.0, point).map_err(|e| match e {
        Error::NearEP { gap, .. } => Error::NearEP { t: f64::NAN, gap },
        other => other,
    })?;
    if label >= center.dim() {
        return Err(Error::DimensionMismatch { expected: center.dim(), got: label + 1 });
    }
    let mut comps = vec![vec![C64::new(0.0, 0.0); d]; d];
    match method {
        CurvatureMethod::SumOverStates => {
            let dh: Vec<ComplexMatrix> = (0..d)
                .map(|i| {
                    family.matrix(&offset(point, i, h)).sub(&family.matrix(&offset(point, i, -h))).scale(C64::new(0.5 / h, 0.0))
                })
                .collect();
            let en = center.eigenvalue(label);
            let (psi_n, phi_n) = (center.right(label), center.left(label));
            for i in 0..d {
                for j in i + 1..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for m in (0..center.dim()).filter(|&m| m != label) {
                        let (psi_m, phi_m) = (center.right(m), center.left(m));
                        let ai = inner(phi_n, &dh[i].mul_vec(psi_m));
                        let aj = inner(phi_n, &dh[j].mul_vec(psi_m));
                        let bi = inner(phi_m, &dh[i].mul_vec(psi_n));
                        let bj = inner(phi_m, &dh[j].mul_vec(psi_n));
                        let de = center.eigenvalue(m) - en;
                        acc += (ai * bj - aj * bi) / (de * de);
                    }
                    comps[i][j] = C64::new(0.0, 1.0) * acc;
                    comps[j][i] = -comps[i][j];
                }
            }
        }
        CurvatureMethod::ExteriorDerivative => {
            let en = center.eigenvalue(label);
            let phi0 = center.left(label).clone();
            // local gauge ψ̃ = ψ / <φ_0|ψ>, smooth near the center point
            let tilde = |p: &[f64]| -> Result<(CVector, CVector)> {
                let (_, psi, phi) = frame_near(family, p, en)?;
                let lam = inner(&phi0, &psi);
                Ok((psi / lam, phi * lam.conj()))
            };
            let conn = |p: &[f64], j: usize| -> Result<C64> {
                let (_, phi) = tilde(p)?;
                let (pp, _) = tilde(&offset(p, j, h))?;
                let (pm, _) = tilde(&offset(p, j, -h))?;
                Ok(C64::new(0.0, 1.0) * inner(&phi, &((pp - pm) / C64::new(2.0 * h, 0.0))))
            };
            for i in 0..d {
                for j in i + 1..d {
                    let dij = (conn(&offset(point, i, h), j)? - conn(&offset(point, i, -h), j)?) / (2.0 * h);
                    let dji = (conn(&offset(point, j, h), i)? - conn(&offset(point, j, -h), i)?) / (2.0 * h);
                    comps[i][j] = dij - dji;
                    comps[j][i] = -comps[i][j];
                }
            }
        }
    }
    Ok(CurvatureSample { point: point.to_vec(), label, components: comps, method })
}

/// Quadrature grid for the enclosed disk.
#[derive(Clone, Copy, Debug)]
pub struct StokesGrid {
    pub n_radial: usize,
    pub n_angular: usize,
}

impl Default for StokesGrid {
    fn default() -> Self {
        Self { n_radial: 64, n_angular: 64 }
    }
}

fn encloses_locus(locus: &EpLocus, plane: &crate::curve::Plane) -> bool {
    let d = plane.center.len();
    let coords = |q: &[f64]| -> (f64, f64, f64) {
        let r: Vec<f64> = (0..d).map(|i| q[i] - plane.center[i]).collect();
        let x: f64 = r.iter().zip(&plane.u).map(|(a, b)| a * b).sum();
        let y: f64 = r.iter().zip(&plane.v).map(|(a, b)| a * b).sum();
        let off: f64 = (0..d).map(|i| (r[i] - x * plane.u[i] - y * plane.v[i]).powi(2)).sum::<f64>().sqrt();
        (x, y, off)
    };
    let inside = |x: f64, y: f64| {
        let (a, b) = (plane.a.max(f64::MIN_POSITIVE), plane.b.max(f64::MIN_POSITIVE));
        (x / a).powi(2) + (y / b).powi(2) <= 1.0
    };
    let scale = 1e-9 * (1.0 + plane.a.max(plane.b));
    let pts = locus.sample(4096);
    if pts.iter().any(|q| {
        let (x, y, off) = coords(q);
        off <= scale && inside(x, y)
    }) {
        return true;
    }
    if let (EpLocus::Circle { .. }, 3) = (locus, d) {
        let (u, v) = (&plane.u, &plane.v);
        let nrm = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        let w = |q: &[f64]| (0..3).map(|i| (q[i] - plane.center[i]) * nrm[i]).sum::<f64>();
        for k in 0..pts.len() {
            let (p, q) = (&pts[k], &pts[(k + 1) % pts.len()]);
            let (wp, wq) = (w(p), w(q));
            if wp * wq < 0.0 {
                let s = wp / (wp - wq);
                let x: Vec<f64> = (0..3).map(|i| p[i] + s * (q[i] - p[i])).collect();
                let (cx, cy, _) = coords(&x);
                if inside(cx, cy) {
                    return true;
                }
            }
        }
    }
    false
}

/// Label at `target` continued from `(from, label)` along a straight segment.
fn continue_label(family: &dyn MatrixFamily, from: &[f64], label: usize, target: &[f64], steps: usize) -> Result<usize> {
    let seg = CurveSpec::polyline(vec![from.to_vec(), target.to_vec()], false)?;
    let path = track(family, &seg, steps.max(crate::curve::MIN_SAMPLES))?;
    Ok(*path.branch(label).last().expect("nonempty"))
}

/// `|γ_n(loop) − ∬ F_n|` for a small planar loop, the flux taken over the enclosed
/// ellipse with a midpoint rule on a polar grid.
pub fn stokes_check(
    family: &dyn MatrixFamily,
    small_loop: &CurveSpec,
    label: usize,
    n_samples: usize,
    grid: StokesGrid,
) -> Result<f64> {
    let plane = small_loop
        .plane()
        .ok_or_else(|| Error::InvalidCurve("Stokes check needs a single planar ellipse".into()))?;
    if encloses_locus(&family.ep_locus(), &plane) {
        return Err(Error::NotContractible);
    }
    let path = track(family, small_loop, n_samples)?;
    if !path.monodromy().is_some_and(|m| m.is_identity()) {
        return Err(Error::NotContractible);
    }
    let gamma = geometric_phase(&path, label)?.geometric;
    let flux = disk_flux(family, &plane, &small_loop.map(0.0), label, grid)?;
    let flux = if small_loop.orientation() == Orientation::Negative { -flux } else { flux };
    let diff = gamma - flux;
    Ok(C64::new(wrap_angle(diff.re), diff.im).norm())
}

/// `∬ F_n(u, v) dA` over the ellipse, with `label` defined at `start` on the rim.
pub fn disk_flux(
    family: &dyn MatrixFamily,
    plane: &crate::curve::Plane,
    start: &[f64],
    label: usize,
    grid: StokesGrid,
) -> Result<C64> {
    if plane.a * plane.b == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let (nr, na) = (grid.n_radial, grid.n_angular);
    let center_label = continue_label(family, start, label, &plane.center, 4 * nr)?;
    let center_e = tracking::frame_at(family, 0.0, &plane.center)?.eigenvalue(center_label);
    let point = |rho: f64, th: f64| -> Vec<f64> {
        (0..plane.center.len())
            .map(|i| plane.center[i] + rho * (plane.a * th.cos() * plane.u[i] + plane.b * th.sin() * plane.v[i]))
            .collect()
    };
    let rays: Vec<C64> = (0..na)
        .into_par_iter()
        .map(|j| -> Result<C64> {
            let th = 2.0 * PI * (j as f64 + 0.5) / na as f64;
            let mut energy = center_e;
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..nr {
                let rho = (k as f64 + 0.5) / nr as f64;
                let p = point(rho, th);
                let f = tracking::frame_at(family, 0.0, &p)?;
                let l = f.nearest_label(energy);
                energy = f.eigenvalue(l);
                let c = curvature(family, &p, l, None, CurvatureMethod::SumOverStates)?;
                acc += c.contract(&plane.u, &plane.v) * rho;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let cell = plane.a * plane.b * (1.0 / nr as f64) * (2.0 * PI / na as f64);
    Ok(rays.into_iter().sum::<C64>() * cell)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap() {
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-2.0 * PI)).abs() < 1e-12);
    }
}
