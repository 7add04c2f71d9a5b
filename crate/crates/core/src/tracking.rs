//! Eigenvalue branch continuation along curves, monodromy and lifts.

use rayon::prelude::*;

use crate::curve::{discretize, CurveSpec};
use crate::error::{Error, Result};
use crate::family::MatrixFamily;
use crate::linalg::{eig_general, Eigenframe, C64};
use crate::perm::{generate_group, Permutation};

/// Samples whose gap falls below `EP_GUARD_RTOL·|H|` are refused.
pub const EP_GUARD_RTOL: f64 = 1e-6;
pub const MAX_BISECTION_DEPTH: usize = 20;

#[derive(Clone, Debug)]
pub struct Sample {
    pub t: f64,
    pub point: Vec<f64>,
    pub frame: Eigenframe,
}

#[derive(Clone, Debug)]
pub struct SpectralPath {
    samples: Vec<Sample>,
    step_matchings: Vec<Permutation>,
    monodromy: Option<Permutation>,
    refinement_depth: usize,
    curve: CurveSpec,
    uniform: bool,
    min_relative_gap: f64,
}

impl SpectralPath {
    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }
    pub fn len(&self) -> usize {
        self.samples.len()
    }
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
    pub fn step_matchings(&self) -> &[Permutation] {
        &self.step_matchings
    }
    pub fn monodromy(&self) -> Option<&Permutation> {
        self.monodromy.as_ref()
    }
    pub fn refinement_depth(&self) -> usize {
        self.refinement_depth
    }
    pub fn curve(&self) -> &CurveSpec {
        &self.curve
    }
    /// True when no bisection samples were inserted (all steps equal).
    pub fn is_uniform(&self) -> bool {
        self.uniform
    }
    /// Smallest `gap / |H|` over the samples.
    pub fn min_relative_gap(&self) -> f64 {
        self.min_relative_gap
    }
    pub fn dim(&self) -> usize {
        self.samples[0].frame.dim()
    }

    /// Label of the branch started at `label`, at every sample.
    pub fn branch(&self, label: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.samples.len());
        let mut l = label;
        out.push(l);
        for m in &self.step_matchings {
            l = m.apply(l);
            out.push(l);
        }
        out
    }

    /// Eigenvalue along the branch started at `label`.
    pub fn branch_energies(&self, label: usize) -> Vec<C64> {
        self.branch(label).iter().zip(&self.samples).map(|(&l, s)| s.frame.eigenvalue(l)).collect()
    }

    pub(crate) fn with_frames(&self, frames: Vec<Eigenframe>) -> Self {
        let mut out = self.clone();
        for (s, f) in out.samples.iter_mut().zip(frames) {
            s.frame = f;
        }
        out
    }
}

struct StepMatch {
    perm: Permutation,
    ambiguous: bool,
}

fn cost(a: &[C64], b: &[C64], images: &[usize]) -> f64 {
    images.iter().enumerate().map(|(j, &i)| (a[j] - b[i]).norm()).sum()
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Minimal-cost assignment (Hungarian method, O(n³)); `images[row] = col`.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = f64::INFINITY;
    let (mut u, mut v) = (vec![0.0; n + 1], vec![0.0; n + 1]);
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut images = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            images[p[j] - 1] = j - 1;
        }
    }
    images
}

/// Best and second-best assignment costs.
fn assignment(a: &[C64], b: &[C64]) -> (Vec<usize>, f64, f64) {
    let n = a.len();
    if n == 1 {
        return (vec![0], (a[0] - b[0]).norm(), f64::INFINITY);
    }
    if n <= 5 {
        let mut best = (Vec::new(), f64::INFINITY);
        let mut second = f64::INFINITY;
        for p in all_permutations(n) {
            let c = cost(a, b, &p);
            if c < best.1 {
                second = best.1;
                best = (p, c);
            } else if c < second {
                second = c;
            }
        }
        return (best.0, best.1, second);
    }
    let m: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect();
    let best = hungarian(&m);
    let best_cost = cost(a, b, &best);
    // second best differs from the optimum in at least one edge
    let mut second = f64::INFINITY;
    for (row, &col) in best.iter().enumerate() {
        let mut m2 = m.clone();
        m2[row][col] = 1e300;
        let alt = hungarian(&m2);
        second = second.min(cost(a, b, &alt));
    }
    (best, best_cost, second)
}

fn match_step(fa: &Eigenframe, fb: &Eigenframe) -> StepMatch {
    let (images, best, second) = assignment(fa.eigenvalues(), fb.eigenvalues());
    let max_disp = images
        .iter()
        .enumerate()
        .map(|(j, &i)| (fa.eigenvalue(j) - fb.eigenvalue(i)).norm())
        .fold(0.0, f64::max);
    let gap = fa.gap().min(fb.gap());
    let ambiguous = !(second >= 2.0 * best) || (fa.dim() > 1 && max_disp >= 0.5 * gap);
    StepMatch { perm: Permutation::from_images(images).expect("assignment is a bijection"), ambiguous }
}

pub(crate) fn frame_at(family: &dyn MatrixFamily, t: f64, point: &[f64]) -> Result<Eigenframe> {
    let h = family.matrix(point);
    let guard = EP_GUARD_RTOL * h.norm();
    let frame = eig_general(&h).map_err(|e| match e {
        Error::DegenerateInput { gap, .. } => Error::NearEP { t, gap },
        Error::SelfOrthogonal { .. } => Error::NearEP { t, gap: 0.0 },
        other => other,
    })?;
    if h.dim() > 1 && !(frame.gap() > guard) {
        return Err(Error::NearEP { t, gap: frame.gap() });
    }
    Ok(frame)
}

fn relative_gap(family: &dyn MatrixFamily, s: &Sample) -> f64 {
    let norm = family.matrix(&s.point).norm();
    if s.frame.dim() < 2 || norm == 0.0 {
        f64::INFINITY
    } else {
        s.frame.gap() / norm
    }
}

#[allow(clippy::too_many_arguments)]
fn refine(
    family: &dyn MatrixFamily,
    curve: &CurveSpec,
    a: &Sample,
    b: &Sample,
    depth: usize,
    out_samples: &mut Vec<Sample>,
    out_perms: &mut Vec<Permutation>,
    max_depth: &mut usize,
) -> Result<()> {
    let m = match_step(&a.frame, &b.frame);
    if !m.ambiguous {
        out_perms.push(m.perm);
        out_samples.push(b.clone());
        return Ok(());
    }
    if depth >= MAX_BISECTION_DEPTH {
        return Err(Error::AmbiguousMatching { t: 0.5 * (a.t + b.t) });
    }
    *max_depth = (*max_depth).max(depth + 1);
    let t = 0.5 * (a.t + b.t);
    let point = curve.map(t);
    let mid = Sample { t, frame: frame_at(family, t, &point)?, point };
    refine(family, curve, a, &mid, depth + 1, out_samples, out_perms, max_depth)?;
    refine(family, curve, &mid, b, depth + 1, out_samples, out_perms, max_depth)
}

/// Tracks all eigenvalue branches along `curve` with `n_samples` uniform steps
/// (plus bisection where a step is ambiguous).
pub fn track(family: &dyn MatrixFamily, curve: &CurveSpec, n_samples: usize) -> Result<SpectralPath> {
    if curve.dim() != family.param_dim() {
        return Err(Error::DimensionMismatch { expected: family.param_dim(), got: curve.dim() });
    }
    let pts = discretize(curve, n_samples)?;
    let mut frames: Vec<Result<Eigenframe>> =
        pts.par_iter().map(|(t, p)| frame_at(family, *t, p)).collect();
    if curve.is_closed() {
        // the endpoint is the start point: reuse its frame verbatim
        let first = frames[0].clone();
        *frames.last_mut().expect("nonempty") = first;
    }
    let base: Vec<Sample> = pts
        .into_iter()
        .zip(frames)
        .map(|((t, point), f)| f.map(|frame| Sample { t, point, frame }))
        .collect::<Result<_>>()?;

    let mut samples = vec![base[0].clone()];
    let mut perms = Vec::with_capacity(base.len());
    let mut depth = 0;
    for w in base.windows(2) {
        refine(family, curve, &w[0], &w[1], 0, &mut samples, &mut perms, &mut depth)?;
    }
    let monodromy = if curve.is_closed() {
        let n = samples[0].frame.dim();
        Some(perms.iter().fold(Permutation::identity(n), |acc, p| acc.then(p)))
    } else {
        None
    };
    let min_relative_gap = samples.iter().map(|s| relative_gap(family, s)).fold(f64::INFINITY, f64::min);
    log::debug!(
        "tracked {} samples (depth {depth}), min relative gap {min_relative_gap:.3e}",
        samples.len()
    );
    Ok(SpectralPath {
        uniform: depth == 0,
        samples,
        step_matchings: perms,
        monodromy,
        refinement_depth: depth,
        curve: curve.clone(),
        min_relative_gap,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monodromy {
    pub sigma: Permutation,
    pub cycles: Vec<Vec<usize>>,
    pub periods: Vec<usize>,
}

impl Monodromy {
    pub fn new(sigma: Permutation) -> Self {
        Self { cycles: sigma.cycles(), periods: sigma.periods(), sigma }
    }
}

pub fn monodromy_of(path: &SpectralPath) -> Result<Monodromy> {
    path.monodromy().cloned().map(Monodromy::new).ok_or(Error::OpenCurve)
}

/// The loop traversed `periods[label]` times, after which the branch closes.
pub fn lift_closed(curve: &CurveSpec, label: usize, monodromy: &Monodromy) -> Result<CurveSpec> {
    let k = *monodromy
        .periods
        .get(label)
        .ok_or(Error::DimensionMismatch { expected: monodromy.periods.len(), got: label + 1 })?;
    curve.clone().repeated(k)
}

#[derive(Clone, Debug)]
pub struct MonodromyGroup {
    pub generators: Vec<Permutation>,
    pub elements: Vec<Permutation>,
}

impl MonodromyGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// Subgroup of 𝔖_N generated by the monodromies of loops sharing a base point.
pub fn monodromy_group(family: &dyn MatrixFamily, loops: &[CurveSpec], n_samples: usize) -> Result<MonodromyGroup> {
    let n = family.dim();
    if let Some(first) = loops.first() {
        let base = first.map(0.0);
        for l in loops {
            if !l.is_closed() {
                return Err(Error::OpenCurve);
            }
            let p = l.map(0.0);
            let scale = 1.0 + base.iter().map(|x| x.abs()).fold(0.0, f64::max);
            if p.len() != base.len() || crate::family::dist(&p, &base) > 1e-9 * scale {
                return Err(Error::NoSharedBasePoint);
            }
        }
    }
    let generators: Vec<Permutation> = loops
        .par_iter()
        .map(|l| track(family, l, n_samples).and_then(|p| monodromy_of(&p)).map(|m| m.sigma))
        .collect::<Result<_>>()?;
    let elements = generate_group(n, &generators).into_iter().collect();
    Ok(MonodromyGroup { generators, elements })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hungarian_matches_exhaustive() {
        let m = vec![
            vec![4.0, 1.0, 3.0, 2.0, 7.0, 1.5],
            vec![2.0, 0.0, 5.0, 1.0, 3.0, 2.5],
            vec![3.0, 2.0, 2.0, 4.0, 1.0, 6.0],
            vec![1.0, 5.0, 3.0, 2.0, 2.0, 2.0],
            vec![2.0, 4.0, 1.0, 3.0, 5.0, 0.5],
            vec![6.0, 3.0, 2.0, 1.0, 4.0, 3.0],
        ];
        let h = hungarian(&m);
        let hc: f64 = h.iter().enumerate().map(|(i, &j)| m[i][j]).sum();
        let best = all_permutations(6)
            .into_iter()
            .map(|p| p.iter().enumerate().map(|(i, &j)| m[i][j]).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        assert!((hc - best).abs() < 1e-12);
    }
}
