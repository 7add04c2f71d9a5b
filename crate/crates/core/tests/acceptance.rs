//! Acceptance suite: one PASS/FAIL line per criterion. Tolerances are pinned
//! below; criteria listed in `KNOWN_RED` are reported but do not fail the run.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::*;
use holonomy::analytic2x2::{closed_form_holonomy, closed_form_phase, continue_f, frame_closed_form, transition_closed_form};
use holonomy::analytic2x2::{Branch, Patch, TwoLevelPoint};
use holonomy::evolve::{integrate, sweep, RowStatus};
use holonomy::linalg::eig_general;
use holonomy::phase::{
    computed_transition, curvature, gauge_perturb, geometric_phase_with, multipatch_phase, stokes_check, CurvatureMethod,
    PatchSegment, StokesGrid,
};
use holonomy::tracking::{monodromy_group, monodromy_of};
use holonomy::{geometric_phase, track, CurveSpec, Example, HolonomyScheme, MatrixFamily, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criterion 11a does not hold for this family: see the README section on
/// the adiabatic limit. It is still run and reported.
const KNOWN_RED: &[&str] = &["11a"];

const TOL_CLOSED_FORM: f64 = 1e-6;
const MAX_CASE_TIME: Duration = Duration::from_secs(1);
const TOL_ZERO_PLUS: f64 = 1e-8;
const TOL_ZERO_MINUS: f64 = 1e-6;
const TOL_SIGN: f64 = 1e-6;
const TOL_HOMOTOPY: f64 = 1e-6;
const TOL_HALF_FLIP: f64 = 1e-8;
const TOL_E3_SIGN: f64 = 1e-4;
const TOL_UNIMODULAR: f64 = 1e-8;
const TOL_CAP: f64 = 1e-4;
const TOL_GAUGE: f64 = 1e-9;
const TOL_MULTIPATCH: f64 = 1e-8;
const TOL_CURVATURE: f64 = 1e-6;
const TOL_STOKES: f64 = 1e-4;
const TOL_ADIABATIC: f64 = 1e-2;
const SWAP_LOW: f64 = 0.5;
const SWAP_HIGH: f64 = 0.9;
const MAX_SUITE_TIME: Duration = Duration::from_secs(300);

/// Sign of the lifted double-loop holonomy factor, per family and branch
/// (`Re E > 0`, `Re E < 0` at the start of the radius-1 loop), fixed from 2¹⁴-sample discrete and
/// closed-form runs that agree to 1e-9.
const GOLDEN_SIGNS: [(&str, [f64; 2]); 2] = [("SymA", [-1.0, -1.0]), ("SymB", [-1.0, -1.0])];

struct Verdict {
    id: &'static str,
    pass: bool,
}

fn report(id: &'static str, title: &str, pass: bool, detail: String) -> Verdict {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] {id:>3} {title}: {detail}");
    Verdict { id, pass }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm()
}

fn c1_closed_form() -> Verdict {
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for (alpha, beta) in [(c(1.0, 0.0), c(2.0, 0.0)), (c(1.0, 1.0), c(2.0, 0.0)), (c(3.0, 0.0), c(1.0, 2.0))] {
        let start = Instant::now();
        let f = nonsym_b(alpha, beta);
        let curve = unit_circle();
        let path = track(&f, &curve, 2048).unwrap();
        for (branch, e) in [(Branch::Plus, beta), (Branch::Minus, -beta)] {
            let label = label_near(&f, &curve, e);
            let g = geometric_phase(&path, label).unwrap();
            let want = closed_form_phase(Example::NonSymB { alpha, beta }, branch).unwrap();
            worst = worst.max(angle_dist(g.geometric, want));
        }
        slowest = slowest.max(start.elapsed());
    }
    report(
        "1",
        "NonSymB closed-form phase",
        worst < TOL_CLOSED_FORM && slowest < MAX_CASE_TIME,
        format!("max |γ − (−π(1∓α/β))| = {worst:.2e}, slowest case {slowest:.2?}"),
    )
}

fn c2_zero_phase() -> Verdict {
    let f = fam(Example::NonSymA);
    let curve = unit_circle();
    let path = track(&f, &curve, 2048).unwrap();
    let plus = geometric_phase(&path, label_near(&f, &curve, c(1.0, 0.0))).unwrap();
    let minus = geometric_phase(&path, label_near(&f, &curve, c(-1.0, 0.0))).unwrap();
    let e_plus = plus.geometric.norm();
    let e_minus = angle_dist(minus.geometric, c(0.0, 0.0));
    let raw_ok = (minus.raw() + 2.0 * PI).abs() < TOL_ZERO_MINUS && minus.winding() == -1;
    report(
        "2",
        "NonSymA zero phase",
        e_plus < TOL_ZERO_PLUS && e_minus < TOL_ZERO_MINUS && raw_ok,
        format!("|γ+| = {e_plus:.2e}, |γ− mod 2π| = {e_minus:.2e}, raw γ− = {:.9}, winding {}", minus.raw(), minus.winding()),
    )
}

/// Circle around `centre` with a smooth random radial wobble of relative size ≤ `eps`.
fn wobbly_circle(centre: (f64, f64), radius: f64, eps: f64, rng: &mut ChaCha8Rng) -> CurveSpec {
    let coef: Vec<(f64, f64)> = (0..3).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    CurveSpec::custom(2, true, move |s| {
        let th = 2.0 * PI * s;
        let w: f64 = coef.iter().enumerate().map(|(k, (a, b))| a * ((k + 1) as f64 * th).cos() + b * ((k + 1) as f64 * th).sin()).sum();
        let r = radius * (1.0 + eps / 6.0 * w);
        vec![centre.0 + r * th.cos(), centre.1 + r * th.sin()]
    })
    .unwrap()
}

fn c3_topological() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_golden = 0.0f64;
    let mut worst = 0.0f64;
    for (name, kind, centre, radii) in [
        ("SymA", Example::SymA, (0.0, 0.0), [0.5, 1.0, 2.0]),
        // the second EP of SymB sits at distance 2 from the centre
        ("SymB", Example::SymB, (0.0, 1.0), [0.5, 1.0, 1.5]),
    ] {
        let f = fam(kind);
        let signs = GOLDEN_SIGNS.iter().find(|(n, _)| *n == name).unwrap().1;
        let base = CurveSpec::complex_circle(centre, 1.0).unwrap();
        let e0 = eig_general(&f.matrix(&base.map(0.0))).unwrap();
        for (l, &s) in signs.iter().enumerate() {
            let label = (0..2).find(|&j| (e0.eigenvalue(j).re > 0.0) == (l == 0)).unwrap();
            let energy = e0.eigenvalue(label);
            let sign = C64::new(s, 0.0);
            // golden: 2¹⁴ samples over the lift, discrete and closed form
            let path = lifted_path(&f, &base, label, 1 << 13);
            let disc = geometric_phase(&path, label).unwrap().holonomy_factor;
            let cf = closed_form_holonomy(&f, path.curve(), energy, Branch::Plus, 1 << 14).unwrap().holonomy_factor;
            worst_golden = worst_golden.max((disc - sign).norm()).max((cf - sign).norm());
            let mut curves: Vec<CurveSpec> = radii.iter().map(|&r| CurveSpec::complex_circle(centre, r).unwrap()).collect();
            curves.extend((0..4).map(|_| wobbly_circle(centre, 1.0, 0.3, &mut rng)));
            for curve in curves {
                let e = eig_general(&f.matrix(&curve.map(0.0))).unwrap();
                // continue the golden branch to the new start point by its sign of f
                let lab = e.nearest_label(energy * (e.eigenvalue(0).norm() / energy.norm()));
                let p = lifted_path(&f, &curve, lab, 2048);
                worst = worst.max((geometric_phase(&p, lab).unwrap().holonomy_factor - sign).norm());
            }
        }
    }
    report(
        "3",
        "symmetric families: topological ±1",
        worst_golden < TOL_SIGN && worst < TOL_SIGN,
        format!("golden −1/−1 for SymA and SymB (deviation {worst_golden:.2e}); radii and perturbations {worst:.2e}"),
    )
}

fn c4_non_topological() -> Verdict {
    let f = nonsym_b(c(1.0, 0.0), c(2.0, 0.0));
    let shapes = [
        unit_circle(),
        CurveSpec::ellipse(vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], 1.5, 0.7).unwrap(),
        CurveSpec::complex_circle((0.3, -0.2), 1.0).unwrap(),
    ];
    let phases = |f: &dyn MatrixFamily, curve: &CurveSpec, beta: f64| -> [C64; 2] {
        let path = track(f, curve, 2048).unwrap();
        let z0 = curve.map(0.0);
        let e = c(z0[0], z0[1]) * beta;
        [e, -e].map(|e| geometric_phase(&path, label_near(f, curve, e)).unwrap().geometric)
    };
    let reference = phases(&f, &shapes[0], 2.0);
    let spread = shapes[1..]
        .iter()
        .flat_map(|s| {
            let p = phases(&f, s, 2.0);
            [angle_dist(p[0], reference[0]), angle_dist(p[1], reference[1])]
        })
        .fold(0.0, f64::max);
    let g3 = phases(&nonsym_b(c(1.0, 0.0), c(3.0, 0.0)), &shapes[0], 3.0);
    let delta = g3[0] - reference[0];
    let delta = c(holonomy::phase::wrap_angle(delta.re), delta.im);
    let err = (delta - c(-PI / 6.0, 0.0)).norm();
    report(
        "4",
        "NonSymB: shape invariance, family dependence",
        spread < TOL_HOMOTOPY && err < TOL_HOMOTOPY,
        format!("shape spread {spread:.2e}; Δγ+(β: 2→3) = {:.9} (|Δγ+ + π/6| = {err:.2e})", delta.re),
    )
}

fn c5_monodromy() -> Verdict {
    let h1 = fam(Example::SquareRoot);
    let p1 = monodromy_of(&track(&h1, &unit_circle(), 256).unwrap()).unwrap();
    let g1 = monodromy_group(&h1, &[unit_circle()], 256).unwrap();
    let h2 = fam(Example::Block3);
    let r2 = CurveSpec::complex_circle((0.0, 0.0), 2.0).unwrap();
    let flat = CurveSpec::ellipse(vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], 2.0, 0.5).unwrap();
    let p2 = monodromy_of(&track(&h2, &r2, 256).unwrap()).unwrap();
    let g2 = monodromy_group(&h2, &[r2, flat], 256).unwrap();
    let (s1, s2) = (p1.sigma.to_string(), p2.sigma.to_string());
    let pass = s1 == "(1 2)"
        && s2 == "(1)(2 3)"
        && p1.periods == [2, 2]
        && p2.periods == [1, 2, 2]
        && g1.order() == 2
        && g2.order() == 2;
    report(
        "5",
        "monodromy of H1 and H2block",
        pass,
        format!(
            "σ = {s1} periods {:?} |𝔥| = {}; σ = {s2} periods {:?} |𝔥| = {}",
            p1.periods,
            g1.order(),
            p2.periods,
            g2.order()
        ),
    )
}

fn c6_three_param() -> Verdict {
    let gamma = 2.0;
    let f = fam(Example::ThreeParamSlice { gamma });
    let eps = gamma / 4.0;
    let loops = [
        ("C+", CurveSpec::ellipse(vec![gamma / 2.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], eps, eps).unwrap()),
        ("C−", CurveSpec::ellipse(vec![-gamma / 2.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], eps, eps).unwrap()),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (name, curve) in loops {
        let path = track(&f, &curve, 1024).unwrap();
        let sigma = monodromy_of(&path).unwrap().sigma;
        let e0 = path.samples()[0].frame.eigenvalue(0);
        let fs = continue_f(&f, &curve, e0, 1024).unwrap();
        let flip = (fs[1024] + fs[0]).norm() / fs[0].norm();
        let mut worst = 0.0f64;
        let mut signs = Vec::new();
        for label in 0..2 {
            let h = geometric_phase(&lifted_path(&f, &curve, label, 1024), label).unwrap().holonomy_factor;
            let s = if h.re >= 0.0 { 1.0 } else { -1.0 };
            worst = worst.max((h - s).norm());
            signs.push(s);
        }
        pass &= sigma.to_string() == "(1 2)" && flip < TOL_HALF_FLIP && worst < TOL_E3_SIGN;
        details.push(format!("{name}: σ = {sigma}, |f(T)+f(0)|/|f| = {flip:.1e}, factors {signs:?} (±{worst:.1e})"));
    }
    report("6", "ThreeParam slice loops C±", pass, details.join("; "))
}

/// `∬ F(∂θ, ∂φ) dθ dφ` over the polar cap `θ < θ0` of the unit sphere.
fn cap_flux(f: &dyn MatrixFamily, theta0: f64, n_theta: usize, n_phi: usize) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n_theta {
        let th = theta0 * (i as f64 + 0.5) / n_theta as f64;
        for j in 0..n_phi {
            let ph = 2.0 * PI * (j as f64 + 0.5) / n_phi as f64;
            let p = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
            let e = eig_general(&f.matrix(&p)).unwrap();
            let label = e.nearest_label(c(1.0, 0.0));
            let fs = curvature(f, &p, label, None, CurvatureMethod::SumOverStates).unwrap();
            let d_th = [th.cos() * ph.cos(), th.cos() * ph.sin(), -th.sin()];
            let d_ph = [-th.sin() * ph.sin(), th.sin() * ph.cos(), 0.0];
            acc += fs.contract(&d_th, &d_ph);
        }
    }
    acc * (theta0 / n_theta as f64) * (2.0 * PI / n_phi as f64)
}

fn c7_hermitian() -> Verdict {
    let f = fam(Example::SpinHalf);
    let mut pass = true;
    let mut details = Vec::new();
    for theta0 in [PI / 6.0, PI / 3.0] {
        let curve = CurveSpec::cone(theta0).unwrap();
        let path = track(&f, &curve, 2048).unwrap();
        let label = label_near(&f, &curve, c(1.0, 0.0));
        let g = geometric_phase(&path, label).unwrap();
        let unimod = (g.holonomy_factor.norm() - 1.0).abs();
        let flux = cap_flux(&f, theta0, 64, 128);
        let err = angle_dist(g.geometric, flux);
        pass &= unimod < TOL_UNIMODULAR && err < TOL_CAP;
        details.push(format!("θ0 = {theta0:.4}: ||h|−1| = {unimod:.1e}, γ = {:.8}, cap ∬F = {:.8} (Δ {err:.1e})", g.raw(), flux.re));
    }
    report("7", "spin-½ cone: unimodular, Stokes over cap", pass, details.join("; "))
}

fn random_gauge(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(rng.gen_range(-1.5f64..1.5).exp(), rng.gen_range(-PI..PI))
}

fn c8_gauge() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for (_, f, curve) in builtin_loops() {
        for label in 0..f.dim() {
            let path = lifted_path(&f, &curve, label, 256);
            let h0 = geometric_phase(&path, label).unwrap().holonomy_factor;
            for _ in 0..100 {
                let ks: Vec<Vec<C64>> = (0..path.len()).map(|_| (0..f.dim()).map(|_| random_gauge(&mut rng)).collect()).collect();
                let h = geometric_phase(&gauge_perturb(&path, &ks).unwrap(), label).unwrap().holonomy_factor;
                worst = worst.max(rel(h, h0));
            }
        }
    }
    report("8", "gauge invariance (100 gauges per loop and label)", worst < TOL_GAUGE, format!("max relative change {worst:.2e}"))
}

/// Segments of the branch between `cuts`, each in its own random gauge.
fn random_segments(path: &holonomy::SpectralPath, label: usize, cuts: &[usize], rng: &mut ChaCha8Rng) -> Vec<PatchSegment> {
    cuts.windows(2)
        .map(|w| {
            let gauge: Vec<C64> = (w[0]..=w[1]).map(|_| random_gauge(rng)).collect();
            PatchSegment::from_path(path, label, w[0], w[1], &gauge).unwrap()
        })
        .collect()
}

fn transitions(segs: &[PatchSegment]) -> Vec<C64> {
    (0..segs.len()).map(|i| computed_transition(&segs[i], &segs[(i + 1) % segs.len()])).collect()
}

/// SymA double loop at |z| = 1 in closed-form frames, switching between the
/// patches where a denominator gets small; returns (multipatch, single patch, switches).
fn closed_form_multipatch() -> (C64, C64, usize) {
    let f = fam(Example::SymA);
    let curve = unit_circle();
    let label = label_near(&f, &curve, c(2.0, 0.0));
    let path = lifted_path(&f, &curve, label, 512);
    assert!(path.is_uniform());
    let n = path.len() - 1;
    let fs = continue_f(&f, path.curve(), c(2.0, 0.0), n).unwrap();
    let duration = path.curve().duration();
    let points: Vec<TwoLevelPoint> = path
        .samples()
        .iter()
        .zip(&fs)
        .map(|(s, &fv)| TwoLevelPoint::from_matrix(&f.matrix(&s.point), Some(fv)).unwrap())
        .collect();
    let mut runs: Vec<(Patch, usize, usize)> = Vec::new();
    for (k, p) in points.iter().enumerate() {
        let patch = p.patch;
        match runs.last_mut() {
            Some(r) if r.0 == patch => r.2 = k,
            Some(r) => {
                r.2 = k;
                runs.push((patch, k, k));
            }
            None => runs.push((patch, 0, 0)),
        }
    }
    let mut segs = Vec::new();
    for &(patch, a, b) in &runs {
        let mut seg = PatchSegment { times: vec![], energies: vec![], psi: vec![], phi: vec![] };
        for k in a..=b {
            let fr = frame_closed_form(&points[k].with_patch(patch)).unwrap();
            seg.times.push(path.samples()[k].t * duration);
            seg.energies.push(fs[k]);
            seg.psi.push(fr.psi(Branch::Plus).clone());
            seg.phi.push(fr.phi(Branch::Plus).clone());
        }
        segs.push(seg);
    }
    // closing junction: the last run ends on the start point
    let gs: Vec<C64> = (0..runs.len())
        .map(|i| {
            let (this, next) = (runs[i].0, runs[(i + 1) % runs.len()].0);
            if this == next {
                return c(1.0, 0.0);
            }
            let g21 = transition_closed_form(&points[runs[i].2], Branch::Plus).unwrap();
            if this == Patch::M2 {
                g21
            } else {
                1.0 / g21
            }
        })
        .collect();
    let multi = multipatch_phase(&segs, &gs, label, HolonomyScheme::Symmetric).unwrap().holonomy_factor;
    let single = geometric_phase_with(&path, label, HolonomyScheme::Symmetric).unwrap().holonomy_factor;
    (multi, single, runs.len() - 1)
}

fn c9_multipatch() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for (_, f, curve) in builtin_loops() {
        for label in 0..f.dim() {
            let path = lifted_path(&f, &curve, label, 256);
            let single = geometric_phase_with(&path, label, HolonomyScheme::Symmetric).unwrap().holonomy_factor;
            let n = path.len() - 1;
            for r in [2usize, 3, 5] {
                let mut cuts: Vec<usize> = rand::seq::index::sample(&mut rng, n - 1, r - 1).into_iter().map(|k| k + 1).collect();
                cuts.push(0);
                cuts.push(n);
                cuts.sort_unstable();
                let segs = random_segments(&path, label, &cuts, &mut rng);
                let multi = multipatch_phase(&segs, &transitions(&segs), label, HolonomyScheme::Symmetric).unwrap();
                worst = worst.max(rel(multi.holonomy_factor, single));
            }
        }
    }
    let (multi, single, switches) = closed_form_multipatch();
    let cf = rel(multi, single);
    report(
        "9",
        "multi-patch holonomy",
        worst < TOL_MULTIPATCH && cf < TOL_MULTIPATCH && switches >= 2,
        format!("random splits r ∈ {{2,3,5}}: {worst:.2e}; SymA over 𝔐¹/𝔐² ({switches} switches, closed-form transitions): {cf:.2e}"),
    )
}

fn c10_curvature() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let f = nonsym_b(c(1.0, 0.0), c(2.0, 0.0));
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (rho, th): (f64, f64) = (rng.gen_range(0.3..2.0), rng.gen_range(-PI..PI));
        let p = [rho * th.cos(), rho * th.sin()];
        for label in 0..2 {
            let a = curvature(&f, &p, label, None, CurvatureMethod::ExteriorDerivative).unwrap();
            let b = curvature(&f, &p, label, None, CurvatureMethod::SumOverStates).unwrap();
            worst = worst.max((a.components[0][1] - b.components[0][1]).norm());
        }
    }
    let grid = StokesGrid::default();
    let small = [
        (nonsym_b(c(1.0, 0.0), c(2.0, 0.0)), CurveSpec::complex_circle((1.0, 0.0), 0.1).unwrap()),
        (fam(Example::SpinHalf), CurveSpec::circle(vec![0.0, 0.0, 1.0], 0.1).unwrap()),
        (fam(Example::ThreeParam { gamma: 2.0 }), CurveSpec::circle(vec![0.0, 0.0, 0.5], 0.1).unwrap()),
        (fam(Example::SymB), CurveSpec::complex_circle((0.5, 0.0), 0.1).unwrap()),
    ];
    let stokes = small
        .iter()
        .flat_map(|(f, curve)| (0..2).map(move |l| stokes_check(f, curve, l, 512, grid).unwrap()))
        .fold(0.0, f64::max);
    report(
        "10",
        "curvature cross-check and Stokes",
        worst < TOL_CURVATURE && stokes < TOL_STOKES,
        format!("max |F_ED − F_SOS| over 20 points = {worst:.2e}; max Stokes residual = {stokes:.2e}"),
    )
}

fn c11a_sweep() -> Verdict {
    let f = nonsym_b(c(1.0, 0.0), c(2.0, 0.0));
    let curve = unit_circle();
    let label = label_near(&f, &curve, c(2.0, 0.0));
    let rows = sweep(&f, &curve, label, &[1e2, 1e3, 1e4], 1e-10, 2048).unwrap();
    let errors: Vec<Option<f64>> = rows.iter().map(|r| r.error).collect();
    let decreasing = errors.windows(2).all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if b < a));
    let last_ok = errors.last().copied().flatten().is_some_and(|e| e < TOL_ADIABATIC);
    let detail = rows
        .iter()
        .map(|r| {
            let status = match &r.status {
                RowStatus::Ok => "ok".to_string(),
                RowStatus::NonAdiabatic => "non-adiabatic".to_string(),
                RowStatus::Failed(e) => format!("failed: {e}"),
            };
            let err = r.error.map_or("-".into(), |e| format!("{e:.2e}"));
            let fid = r.fidelity.map_or("-".into(), |x| format!("{x:.3}"));
            format!("T={:.0e}: error {err}, fidelity {fid} ({status})", r.duration)
        })
        .collect::<Vec<_>>()
        .join("; ");
    report("11a", "NonSymB adiabatic limit", decreasing && last_ok, detail)
}

fn c11b_swap() -> Verdict {
    let f = fam(Example::SquareRoot);
    let curve = unit_circle();
    let path = track(&f, &curve, 512).unwrap();
    let label = label_near(&f, &curve, c(1.0, 0.0));
    let swapped = path.monodromy().unwrap().apply(label);
    let frame = &path.samples()[0].frame;
    let evo = integrate(&f, &curve, 1e3, frame.right(label), 1e-10).unwrap();
    let (stay, swap) = (evo.fidelity(frame, label), evo.fidelity(frame, swapped));
    report(
        "11b",
        "H1 single traversal swaps branches",
        stay < SWAP_LOW && swap > SWAP_HIGH,
        format!("T = 1e3 from E = +1: fidelity to start {stay:.2e}, to swapped {swap:.7}"),
    )
}

fn main() {
    let start = Instant::now();
    let checks: [fn() -> Verdict; 12] = [
        c1_closed_form,
        c2_zero_phase,
        c3_topological,
        c4_non_topological,
        c5_monodromy,
        c6_three_param,
        c7_hermitian,
        c8_gauge,
        c9_multipatch,
        c10_curvature,
        c11a_sweep,
        c11b_swap,
    ];
    let mut verdicts: Vec<Verdict> = checks.iter().map(|f| f()).collect();
    let elapsed = start.elapsed();
    verdicts.push(report("11c", "suite runtime", elapsed < MAX_SUITE_TIME, format!("{elapsed:.1?}")));
    let unexpected: Vec<&str> = verdicts.iter().filter(|v| !v.pass && !KNOWN_RED.contains(&v.id)).map(|v| v.id).collect();
    let red: Vec<&str> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect();
    println!("acceptance: {} of {} criteria pass; failing: {red:?}", verdicts.len() - red.len(), verdicts.len());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
