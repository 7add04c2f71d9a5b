//! Closed-form machinery for 2×2 Hamiltonians.
//!
//! `H = (tr H / 2) + [[a, b], [c, −a]]`, eigenvalues `tr/2 ± f` with
//! `f² = a² + bc`. Frames on patch 𝔐¹ use the denominator `f + a`, frames on
//! 𝔐² are obtained from 𝔐¹ by `f → −f` with the branch labels exchanged,
//! and use `a − f`. Transitions are oriented so that `ψ^2 = 𝒢_{21} ψ^1`
//! (equivalently `ψ^1 = 𝒢_{12} ψ^2` with `𝒢_{12} = 1/𝒢_{21}`).

use std::f64::consts::PI;

use crate::curve::{discretize, CurveSpec};
use crate::error::{Error, Result};
use crate::family::{Example, MatrixFamily};
use crate::linalg::{CVector, ComplexMatrix, C64};
use crate::tracking::EP_GUARD_RTOL;

pub use crate::family::example_family;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Patch {
    M1,
    M2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Traceless reduction: `(tr/2, a, b, c)`.
pub fn traceless(h: &ComplexMatrix) -> Result<(C64, C64, C64, C64)> {
    if h.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: h.dim() });
    }
    Ok((h.trace() * 0.5, (h.get(0, 0) - h.get(1, 1)) * 0.5, h.get(0, 1), h.get(1, 0)))
}

const SINGULAR_RTOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLevelPoint {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub f: C64,
    pub patch: Patch,
}

impl TwoLevelPoint {
    pub fn new(a: C64, b: C64, c: C64, f: C64, patch: Patch) -> Result<Self> {
        let scale = (a * a).norm() + (b * c).norm() + (f * f).norm();
        if (f * f - a * a - b * c).norm() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidParams("f is not a square root of a² + bc".into()));
        }
        if f.norm() == 0.0 {
            return Err(Error::DegenerateInput { gap: 0.0, tol: 0.0 });
        }
        Ok(Self { a, b, c, f, patch })
    }

    /// From a 2×2 matrix; `f` is the root closest to `f_hint` (principal root
    /// without a hint) and the patch is the better-conditioned one.
    pub fn from_matrix(h: &ComplexMatrix, f_hint: Option<C64>) -> Result<Self> {
        let (_, a, b, c) = traceless(h)?;
        let r = (a * a + b * c).sqrt();
        let f = match f_hint {
            Some(g) if (g + r).norm() < (g - r).norm() => -r,
            _ => r,
        };
        let patch = if (f + a).norm() >= (a - f).norm() { Patch::M1 } else { Patch::M2 };
        Self::new(a, b, c, f, patch)
    }

    pub fn with_patch(mut self, patch: Patch) -> Self {
        self.patch = patch;
        self
    }

    fn scale(&self) -> f64 {
        self.a.norm() + self.f.norm()
    }

    /// `f + a` on 𝔐¹, `a − f` on 𝔐².
    pub fn denominator(&self) -> C64 {
        match self.patch {
            Patch::M1 => self.f + self.a,
            Patch::M2 => self.a - self.f,
        }
    }

    fn checked_denominator(&self) -> Result<C64> {
        let d = self.denominator();
        if !(d.norm() > SINGULAR_RTOL * self.scale()) {
            return Err(Error::PatchSingular { denominator: d.norm() });
        }
        Ok(d)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PatchFrame2x2 {
    pub psi_plus: CVector,
    pub psi_minus: CVector,
    pub phi_plus: CVector,
    pub phi_minus: CVector,
    pub patch: Patch,
}

impl PatchFrame2x2 {
    pub fn psi(&self, b: Branch) -> &CVector {
        match b {
            Branch::Plus => &self.psi_plus,
            Branch::Minus => &self.psi_minus,
        }
    }
    pub fn phi(&self, b: Branch) -> &CVector {
        match b {
            Branch::Plus => &self.phi_plus,
            Branch::Minus => &self.phi_minus,
        }
    }
}

fn v2(x: C64, y: C64) -> CVector {
    CVector::from_vec(vec![x, y])
}

/// Patch-1 frame for a given `f` (unchecked).
fn m1_frame(a: C64, b: C64, c: C64, f: C64) -> (CVector, CVector, CVector, CVector) {
    let s = f + a;
    let k = C64::new(1.0, 0.0) / (2.0 * f.conj() * s.conj());
    (v2(s, c), v2(-b, s), v2(s.conj(), b.conj()) * k, v2(-c.conj(), s.conj()) * k)
}

pub fn frame_closed_form(p: &TwoLevelPoint) -> Result<PatchFrame2x2> {
    p.checked_denominator()?;
    let (pp, pm, qp, qm) = match p.patch {
        Patch::M1 => m1_frame(p.a, p.b, p.c, p.f),
        Patch::M2 => {
            let (pp, pm, qp, qm) = m1_frame(p.a, p.b, p.c, -p.f);
            (pm, pp, qm, qp)
        }
    };
    Ok(PatchFrame2x2 { psi_plus: pp, psi_minus: pm, phi_plus: qp, phi_minus: qm, patch: p.patch })
}

fn m1_connection(a: C64, b: C64, c: C64, f: C64, da: C64, db: C64, dc: C64, df: C64, branch: Branch) -> C64 {
    let i2f = C64::new(0.0, 1.0) / (2.0 * f);
    match branch {
        Branch::Plus => i2f * (b * dc / (f + a) + df + da),
        Branch::Minus => i2f * (c * db / (f + a) + df + da),
    }
}

/// `A_±` on the point's patch, evaluated on the increment `(da, db, dc, df)`.
pub fn connection_closed_form(p: &TwoLevelPoint, da: C64, db: C64, dc: C64, df: C64, branch: Branch) -> Result<C64> {
    p.checked_denominator()?;
    Ok(match p.patch {
        Patch::M1 => m1_connection(p.a, p.b, p.c, p.f, da, db, dc, df, branch),
        Patch::M2 => {
            let other = match branch {
                Branch::Plus => Branch::Minus,
                Branch::Minus => Branch::Plus,
            };
            m1_connection(p.a, p.b, p.c, -p.f, da, db, dc, -df, other)
        }
    })
}

/// `𝒢^±_{21}` with `ψ^2_± = 𝒢^±_{21} ψ^1_±`; requires the point in 𝔐¹ ∩ 𝔐².
pub fn transition_closed_form(p: &TwoLevelPoint, branch: Branch) -> Result<C64> {
    p.with_patch(Patch::M1).checked_denominator()?;
    p.with_patch(Patch::M2).checked_denominator()?;
    let s = p.f + p.a;
    Ok(match branch {
        Branch::Plus => -p.b / s,
        Branch::Minus => p.c / s,
    })
}

/// Branch of `f = sqrt(a² + bc)` continued along the curve from `f_start`,
/// at the `n_samples + 1` uniform samples.
pub fn continue_f(family: &dyn MatrixFamily, curve: &CurveSpec, f_start: C64, n_samples: usize) -> Result<Vec<C64>> {
    let pts = discretize(curve, n_samples)?;
    let abc = |p: &[f64]| -> Result<(C64, f64)> {
        let h = family.matrix(p);
        let (_, a, b, c) = traceless(&h)?;
        Ok((a * a + b * c, h.norm()))
    };
    let (d0, _) = abc(&pts[0].1)?;
    if (f_start * f_start - d0).norm() > 1e-8 * d0.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidParams("f_start² differs from a² + bc at the start point".into()));
    }
    fn step(
        curve: &CurveSpec,
        abc: &dyn Fn(&[f64]) -> Result<(C64, f64)>,
        f_prev: C64,
        ta: f64,
        tb: f64,
        pb: &[f64],
        depth: usize,
    ) -> Result<C64> {
        let (d, norm) = abc(pb)?;
        let r = d.sqrt();
        if !(2.0 * r.norm() > EP_GUARD_RTOL * norm) {
            return Err(Error::NearEP { t: tb, gap: 2.0 * r.norm() });
        }
        let (near, far) = if (f_prev - r).norm() <= (f_prev + r).norm() { (r, -r) } else { (-r, r) };
        if (f_prev - near).norm() < 0.5 * (f_prev - far).norm() {
            return Ok(near);
        }
        if depth >= crate::tracking::MAX_BISECTION_DEPTH {
            return Err(Error::BranchAmbiguity { t: tb });
        }
        let tm = 0.5 * (ta + tb);
        let pm = curve.map(tm);
        let fm = step(curve, abc, f_prev, ta, tm, &pm, depth + 1)?;
        step(curve, abc, fm, tm, tb, pb, depth + 1)
    }
    let mut out = vec![f_start];
    for w in pts.windows(2) {
        let prev = *out.last().expect("nonempty");
        out.push(step(curve, &abc, prev, w[0].0, w[1].0, &w[1].1, 0)?);
    }
    Ok(out)
}

/// Paper closed forms of the loop phase (mod 2π) around the EP at `z = 0`.
pub fn closed_form_phase(example: Example, branch: Branch) -> Option<C64> {
    match example {
        Example::NonSymB { alpha, beta } => {
            let r = alpha / beta;
            Some(match branch {
                Branch::Plus => -PI * (1.0 - r),
                Branch::Minus => -PI * (1.0 + r),
            })
        }
        Example::NonSymA => Some(C64::new(0.0, 0.0)),
        _ => None,
    }
}

/// Composite Simpson (with a 3/8 tail for odd interval counts) on uniform samples.
fn integrate_uniform(v: &[C64], h: f64) -> C64 {
    let m = v.len() - 1;
    match m {
        0 => C64::new(0.0, 0.0),
        1 => (v[0] + v[1]) * (0.5 * h),
        2 => (v[0] + v[1] * 4.0 + v[2]) * (h / 3.0),
        3 => (v[0] + v[1] * 3.0 + v[2] * 3.0 + v[3]) * (3.0 * h / 8.0),
        _ if m % 2 == 0 => {
            let mut s = v[0] + v[m];
            for (k, x) in v.iter().enumerate().take(m).skip(1) {
                s += x * if k % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * (h / 3.0)
        }
        _ => integrate_uniform(&v[..m - 2], h) + integrate_uniform(&v[m - 3..], h),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormLoop {
    pub holonomy_factor: C64,
    /// `Σ ∫A − i Σ ln 𝒢` (principal logs of the transitions).
    pub geometric: C64,
    /// Number of patch changes along the loop.
    pub patch_switches: usize,
}

/// Loop holonomy of branch `±` from the closed-form connection, switching
/// between 𝔐¹ and 𝔐² where a denominator gets small and inserting the
/// closed-form transition functions at the junctions.
pub fn closed_form_holonomy(
    family: &dyn MatrixFamily,
    curve: &CurveSpec,
    f_start: C64,
    branch: Branch,
    n_samples: usize,
) -> Result<ClosedFormLoop> {
    if !curve.is_closed() {
        return Err(Error::OpenCurve);
    }
    if family.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: family.dim() });
    }
    let n = n_samples;
    let fs = continue_f(family, curve, f_start, n)?;
    if (fs[n] - fs[0]).norm() > 1e-6 * fs[0].norm() {
        return Err(Error::NonCyclicBranch { label: 0, period: 2 });
    }
    let delta = 1e-3 / curve.traversals() as f64;
    let abc_at = |t: f64| -> Result<(C64, C64, C64)> {
        let (_, a, b, c) = traceless(&family.matrix(&curve.map(t)))?;
        Ok((a, b, c))
    };
    let mut points = Vec::with_capacity(n + 1);
    let mut diffs = Vec::with_capacity(n + 1);
    for (k, &f) in fs.iter().enumerate() {
        let t = k as f64 / n as f64;
        let (a, b, c) = abc_at(t)?;
        let (p1, p2, m1, m2) = (abc_at(t + delta)?, abc_at(t + 2.0 * delta)?, abc_at(t - delta)?, abc_at(t - 2.0 * delta)?);
        let d = |x1: C64, x2: C64, y1: C64, y2: C64| (8.0 * (x1 - y1) - (x2 - y2)) / (12.0 * delta);
        let da = d(p1.0, p2.0, m1.0, m2.0);
        let db = d(p1.1, p2.1, m1.1, m2.1);
        let dc = d(p1.2, p2.2, m1.2, m2.2);
        let df = (2.0 * a * da + b * dc + c * db) / (2.0 * f);
        points.push(TwoLevelPoint::new(a, b, c, f, Patch::M1)?);
        diffs.push((da, db, dc, df));
    }
    // patch choice with hysteresis
    let quality = |p: &TwoLevelPoint, patch: Patch| p.with_patch(patch).denominator().norm();
    let other = |q: Patch| if q == Patch::M1 { Patch::M2 } else { Patch::M1 };
    let mut patch = if quality(&points[0], Patch::M1) >= quality(&points[0], Patch::M2) { Patch::M1 } else { Patch::M2 };
    let mut segments: Vec<(Patch, usize, usize)> = vec![(patch, 0, n)];
    for (k, p) in points.iter().enumerate().skip(1) {
        if quality(p, patch) < 0.25 * quality(p, other(patch)) {
            segments.last_mut().expect("nonempty").2 = k;
            patch = other(patch);
            segments.push((patch, k, n));
        }
    }
    let h = 1.0 / n as f64;
    let i = C64::new(0.0, 1.0);
    let mut geometric = C64::new(0.0, 0.0);
    let mut factor = C64::new(1.0, 0.0);
    let single = segments.len() == 1;
    for (s, &(patch, start, end)) in segments.iter().enumerate() {
        let vals: Vec<C64> = (start..=end)
            .map(|k| {
                let (da, db, dc, df) = diffs[k];
                connection_closed_form(&points[k].with_patch(patch), da, db, dc, df, branch)
            })
            .collect::<Result<_>>()?;
        let integral = if single {
            vals[..n].iter().sum::<C64>() * h
        } else {
            integrate_uniform(&vals, h)
        };
        geometric += integral;
        factor *= (i * integral).exp();
        let next = if s + 1 < segments.len() { segments[s + 1].0 } else { segments[0].0 };
        if next != patch {
            let g21 = transition_closed_form(&points[end], branch)?;
            let g = if patch == Patch::M2 { g21 } else { 1.0 / g21 };
            factor *= g;
            geometric += -i * g.ln();
        }
    }
    Ok(ClosedFormLoop { holonomy_factor: factor, geometric, patch_switches: segments.len() - 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn sigma_x_frame() {
        let p = TwoLevelPoint::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), Patch::M1).unwrap();
        let fr = frame_closed_form(&p).unwrap();
        assert_eq!(fr.psi_plus, v2(c(1.0, 0.0), c(1.0, 0.0)));
        assert_eq!(fr.psi_minus, v2(c(-1.0, 0.0), c(1.0, 0.0)));
        assert_eq!(transition_closed_form(&p, Branch::Plus).unwrap(), c(-1.0, 0.0));
        assert_eq!(transition_closed_form(&p, Branch::Minus).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn diagonal_frames_and_singular_patch() {
        let p = TwoLevelPoint::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), Patch::M1).unwrap();
        let fr = frame_closed_form(&p).unwrap();
        assert_eq!(fr.psi_plus, v2(c(2.0, 0.0), c(0.0, 0.0)));
        assert_eq!(fr.psi_minus, v2(c(0.0, 0.0), c(2.0, 0.0)));
        let q = TwoLevelPoint::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), Patch::M1).unwrap();
        assert!(matches!(frame_closed_form(&q), Err(Error::PatchSingular { .. })));
        assert!(matches!(transition_closed_form(&p, Branch::Plus), Err(Error::PatchSingular { .. })));
    }

    #[test]
    fn simpson_exact_on_cubics() {
        for m in 1..9 {
            let h = 1.0 / m as f64;
            let v: Vec<C64> = (0..=m).map(|k| c((k as f64 * h).powi(if m > 2 { 3 } else { 1 }), 0.0)).collect();
            let exact = if m > 2 { 0.25 } else { 0.5 };
            assert!((integrate_uniform(&v, h).re - exact).abs() < 1e-14, "m = {m}");
        }
    }
}
