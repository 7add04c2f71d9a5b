#![allow(dead_code)]

use holonomy::tracking::{lift_closed, monodromy_of};
use holonomy::{example_family, track, CurveSpec, Example, ExampleFamily, MatrixFamily, SpectralPath, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn fam(kind: Example) -> ExampleFamily {
    example_family(kind).expect("valid example")
}

pub fn nonsym_b(alpha: C64, beta: C64) -> ExampleFamily {
    fam(Example::NonSymB { alpha, beta })
}

pub fn unit_circle() -> CurveSpec {
    CurveSpec::complex_circle((0.0, 0.0), 1.0).unwrap()
}

/// Label whose eigenvalue at the curve's start is closest to `e`.
pub fn label_near(family: &dyn MatrixFamily, curve: &CurveSpec, e: C64) -> usize {
    let h = family.matrix(&curve.map(0.0));
    holonomy::linalg::eig_general(&h).unwrap().nearest_label(e)
}

/// Tracks the curve, lifts it for `label` and tracks the lift.
pub fn lifted_path(family: &dyn MatrixFamily, curve: &CurveSpec, label: usize, n_per_traversal: usize) -> SpectralPath {
    let base = track(family, curve, n_per_traversal).unwrap();
    let m = monodromy_of(&base).unwrap();
    let lifted = lift_closed(curve, label, &m).unwrap();
    track(family, &lifted, n_per_traversal * lifted.traversals()).unwrap()
}

/// Complex distance with the real parts compared mod 2π.
pub fn angle_dist(a: C64, b: C64) -> f64 {
    let d = a - b;
    c(holonomy::phase::wrap_angle(d.re), d.im).norm()
}

/// One loop per built-in family, each avoiding the family's degeneracies.
pub fn builtin_loops() -> Vec<(&'static str, ExampleFamily, CurveSpec)> {
    let slice = CurveSpec::circle(vec![1.0, 0.0], 0.5).unwrap();
    let ring = CurveSpec::ellipse(vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0], 0.5, 0.5).unwrap();
    vec![
        ("H1", fam(Example::SquareRoot), unit_circle()),
        ("H2block", fam(Example::Block3), CurveSpec::complex_circle((0.0, 0.0), 2.0).unwrap()),
        ("SymA", fam(Example::SymA), unit_circle()),
        ("SymB", fam(Example::SymB), CurveSpec::complex_circle((0.0, 1.0), 1.0).unwrap()),
        ("NonSymA", fam(Example::NonSymA), unit_circle()),
        ("NonSymB", nonsym_b(c(1.0, 0.0), c(2.0, 0.0)), unit_circle()),
        ("ThreeParam", fam(Example::ThreeParam { gamma: 2.0 }), ring),
        ("ThreeParamSlice", fam(Example::ThreeParamSlice { gamma: 2.0 }), slice),
        ("SpinHalf", fam(Example::SpinHalf), CurveSpec::cone(std::f64::consts::FRAC_PI_3).unwrap()),
    ]
}
