//! Parameter-dependent Hamiltonians `R ↦ H[R]`.
//!
//! Families of one complex variable take the point `[Re z, Im z]`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

/// Known degeneracy locus of a family, used for distance estimates and
/// contractibility checks.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum EpLocus {
    #[default]
    Unknown,
    Points(Vec<Vec<f64>>),
    /// Circle `center + r (cos θ u + sin θ v)`.
    Circle { center: Vec<f64>, u: Vec<f64>, v: Vec<f64>, radius: f64 },
}

impl EpLocus {
    /// Distance from `p` to the locus, `None` if unknown.
    pub fn distance(&self, p: &[f64]) -> Option<f64> {
        match self {
            EpLocus::Unknown => None,
            EpLocus::Points(pts) => pts.iter().map(|q| dist(p, q)).min_by(f64::total_cmp),
            EpLocus::Circle { .. } => {
                let pts = self.sample(720);
                pts.iter().map(|q| dist(p, q)).min_by(f64::total_cmp)
            }
        }
    }

    /// Finite point sample of the locus.
    pub fn sample(&self, n: usize) -> Vec<Vec<f64>> {
        match self {
            EpLocus::Unknown => vec![],
            EpLocus::Points(pts) => pts.clone(),
            EpLocus::Circle { center, u, v, radius } => (0..n)
                .map(|k| {
                    let th = 2.0 * PI * k as f64 / n as f64;
                    (0..center.len())
                        .map(|i| center[i] + radius * (th.cos() * u[i] + th.sin() * v[i]))
                        .collect()
                })
                .collect(),
        }
    }
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub trait MatrixFamily: Send + Sync {
    /// Matrix dimension N.
    fn dim(&self) -> usize;
    /// Number of real parameter coordinates d.
    fn param_dim(&self) -> usize;
    fn matrix(&self, point: &[f64]) -> ComplexMatrix;
    fn ep_locus(&self) -> EpLocus {
        EpLocus::Unknown
    }
    fn name(&self) -> String {
        "custom".into()
    }
}

impl<F: MatrixFamily + ?Sized> MatrixFamily for Arc<F> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn param_dim(&self) -> usize {
        (**self).param_dim()
    }
    fn matrix(&self, point: &[f64]) -> ComplexMatrix {
        (**self).matrix(point)
    }
    fn ep_locus(&self) -> EpLocus {
        (**self).ep_locus()
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

impl<F: MatrixFamily + ?Sized> MatrixFamily for Box<F> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn param_dim(&self) -> usize {
        (**self).param_dim()
    }
    fn matrix(&self, point: &[f64]) -> ComplexMatrix {
        (**self).matrix(point)
    }
    fn ep_locus(&self) -> EpLocus {
        (**self).ep_locus()
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

type MatrixFn = dyn Fn(&[f64]) -> ComplexMatrix + Send + Sync;

/// Family given by a closure.
#[derive(Clone)]
pub struct FnFamily {
    dim: usize,
    param_dim: usize,
    f: Arc<MatrixFn>,
    locus: EpLocus,
    name: String,
}

impl FnFamily {
    pub fn new(dim: usize, param_dim: usize, f: impl Fn(&[f64]) -> ComplexMatrix + Send + Sync + 'static) -> Self {
        Self { dim, param_dim, f: Arc::new(f), locus: EpLocus::Unknown, name: "custom".into() }
    }

    pub fn with_locus(mut self, locus: EpLocus) -> Self {
        self.locus = locus;
        self
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn constant(h: ComplexMatrix, param_dim: usize) -> Self {
        let dim = h.dim();
        Self::new(dim, param_dim, move |_| h.clone()).named("constant")
    }
}

impl MatrixFamily for FnFamily {
    fn dim(&self) -> usize {
        self.dim
    }
    fn param_dim(&self) -> usize {
        self.param_dim
    }
    fn matrix(&self, point: &[f64]) -> ComplexMatrix {
        (self.f)(point)
    }
    fn ep_locus(&self) -> EpLocus {
        self.locus.clone()
    }
    fn name(&self) -> String {
        self.name.clone()
    }
}

pub const MAX_POLY_DEGREE: usize = 16;

/// One monomial `coeff · Π x_i^{powers[i]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: C64,
    pub powers: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PolyEntry {
    /// Coefficients `c_0, c_1, …` of a polynomial in `z = x_0 + i x_1`.
    InZ(Vec<C64>),
    /// Sum of monomials in the real coordinates.
    Monomials(Vec<Monomial>),
}

impl PolyEntry {
    fn degree(&self) -> usize {
        match self {
            PolyEntry::InZ(c) => c.len().saturating_sub(1),
            PolyEntry::Monomials(ms) => {
                ms.iter().map(|m| m.powers.iter().sum::<u32>() as usize).max().unwrap_or(0)
            }
        }
    }

    fn eval(&self, p: &[f64]) -> C64 {
        match self {
            PolyEntry::InZ(c) => {
                let z = C64::new(p[0], p[1]);
                c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &ck| acc * z + ck)
            }
            PolyEntry::Monomials(ms) => ms
                .iter()
                .map(|m| m.coeff * m.powers.iter().zip(p).map(|(&k, &x)| x.powi(k as i32)).product::<f64>())
                .sum(),
        }
    }
}

/// Matrix whose entries are polynomials in the parameter coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialFamily {
    dim: usize,
    param_dim: usize,
    entries: Vec<Vec<PolyEntry>>,
}

impl PolynomialFamily {
    pub fn new(param_dim: usize, entries: Vec<Vec<PolyEntry>>) -> Result<Self> {
        let dim = entries.len();
        if dim == 0 || param_dim == 0 {
            return Err(Error::InvalidParams("empty polynomial family".into()));
        }
        for row in &entries {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            for e in row {
                if e.degree() > MAX_POLY_DEGREE {
                    return Err(Error::InvalidParams(format!("polynomial degree exceeds {MAX_POLY_DEGREE}")));
                }
                match e {
                    PolyEntry::InZ(_) if param_dim != 2 => {
                        return Err(Error::InvalidParams("polynomials in z need a 2-dimensional parameter space".into()))
                    }
                    PolyEntry::Monomials(ms) => {
                        if ms.iter().any(|m| m.powers.len() != param_dim) {
                            return Err(Error::InvalidParams("monomial arity differs from parameter dimension".into()));
                        }
                    }
                    _ => {}
                }
            }
        }
        Ok(Self { dim, param_dim, entries })
    }
}

impl MatrixFamily for PolynomialFamily {
    fn dim(&self) -> usize {
        self.dim
    }
    fn param_dim(&self) -> usize {
        self.param_dim
    }
    fn matrix(&self, point: &[f64]) -> ComplexMatrix {
        let entries = self.entries.iter().flat_map(|row| row.iter().map(|e| e.eval(point))).collect();
        ComplexMatrix::new(self.dim, entries).expect("validated dimensions")
    }
    fn name(&self) -> String {
        "polynomial".into()
    }
}

/// The example families.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Example {
    /// `[[0, 1], [z, 0]]`.
    SquareRoot,
    /// `diag(z, [[0, 1], [z, 0]])`.
    Block3,
    /// `[[1+z, i(1−z)], [i(1−z), −(1+z)]]`.
    SymA,
    /// `[[1+z, 1−z], [1−z, −(1+z)]]`.
    SymB,
    /// `[[z, 1], [0, −z]]`.
    NonSymA,
    /// `[[αz, 1], [(β²−α²)z², −αz]]`.
    NonSymB { alpha: C64, beta: C64 },
    /// `(R − iΓ/2 e_3)·σ` over `(R1, R2, R3)`.
    ThreeParam { gamma: f64 },
    /// `ThreeParam` restricted to `R2 = 0`, over `(R1, R3)`.
    ThreeParamSlice { gamma: f64 },
    /// Hermitian `R·σ`.
    SpinHalf,
}

impl Example {
    pub fn name(&self) -> &'static str {
        match self {
            Example::SquareRoot => "H1",
            Example::Block3 => "H2block",
            Example::SymA => "SymA",
            Example::SymB => "SymB",
            Example::NonSymA => "NonSymA",
            Example::NonSymB { .. } => "NonSymB",
            Example::ThreeParam { .. } => "ThreeParam",
            Example::ThreeParamSlice { .. } => "ThreeParamSlice",
            Example::SpinHalf => "SpinHalf",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExampleFamily {
    kind: Example,
}

pub fn example_family(kind: Example) -> Result<ExampleFamily> {
    match kind {
        Example::NonSymB { alpha, beta } => {
            if !(beta.norm() > 0.0) || !alpha.re.is_finite() || !alpha.im.is_finite() || !beta.re.is_finite() {
                return Err(Error::InvalidParams("NonSymB needs finite alpha and nonzero beta".into()));
            }
        }
        Example::ThreeParam { gamma } | Example::ThreeParamSlice { gamma } => {
            if !(gamma != 0.0 && gamma.is_finite()) {
                return Err(Error::InvalidParams("ThreeParam needs a finite nonzero Gamma".into()));
            }
        }
        _ => {}
    }
    Ok(ExampleFamily { kind })
}

impl ExampleFamily {
    pub fn kind(&self) -> Example {
        self.kind
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn m2(a: C64, b: C64, cc: C64, d: C64) -> ComplexMatrix {
    ComplexMatrix::new(2, vec![a, b, cc, d]).expect("2x2")
}

impl MatrixFamily for ExampleFamily {
    fn dim(&self) -> usize {
        match self.kind {
            Example::Block3 => 3,
            _ => 2,
        }
    }

    fn param_dim(&self) -> usize {
        match self.kind {
            Example::ThreeParam { .. } | Example::SpinHalf => 3,
            _ => 2,
        }
    }

    fn matrix(&self, p: &[f64]) -> ComplexMatrix {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let i = c(0.0, 1.0);
        let z = || c(p[0], p[1]);
        match self.kind {
            Example::SquareRoot => m2(zero, one, z(), zero),
            Example::Block3 => {
                let z = z();
                ComplexMatrix::new(3, vec![z, zero, zero, zero, zero, one, zero, z, zero]).expect("3x3")
            }
            Example::SymA => {
                let z = z();
                m2(one + z, i * (one - z), i * (one - z), -(one + z))
            }
            Example::SymB => {
                let z = z();
                m2(one + z, one - z, one - z, -(one + z))
            }
            Example::NonSymA => {
                let z = z();
                m2(z, one, zero, -z)
            }
            Example::NonSymB { alpha, beta } => {
                let z = z();
                m2(alpha * z, one, (beta * beta - alpha * alpha) * z * z, -alpha * z)
            }
            Example::ThreeParam { gamma } => three_param(p[0], p[1], p[2], gamma),
            Example::ThreeParamSlice { gamma } => three_param(p[0], 0.0, p[1], gamma),
            Example::SpinHalf => m2(c(p[2], 0.0), c(p[0], -p[1]), c(p[0], p[1]), c(-p[2], 0.0)),
        }
    }

    fn ep_locus(&self) -> EpLocus {
        let origin = || EpLocus::Points(vec![vec![0.0, 0.0]]);
        match self.kind {
            Example::SquareRoot | Example::SymA | Example::NonSymA | Example::NonSymB { .. } => origin(),
            // z = 1 is a diabolic crossing of E_1 = z with E_2 = √z.
            Example::Block3 => EpLocus::Points(vec![vec![0.0, 0.0], vec![1.0, 0.0]]),
            Example::SymB => EpLocus::Points(vec![vec![0.0, 1.0], vec![0.0, -1.0]]),
            Example::ThreeParam { gamma } => EpLocus::Circle {
                center: vec![0.0; 3],
                u: vec![1.0, 0.0, 0.0],
                v: vec![0.0, 1.0, 0.0],
                radius: gamma.abs() / 2.0,
            },
            Example::ThreeParamSlice { gamma } => {
                EpLocus::Points(vec![vec![gamma / 2.0, 0.0], vec![-gamma / 2.0, 0.0]])
            }
            Example::SpinHalf => EpLocus::Points(vec![vec![0.0; 3]]),
        }
    }

    fn name(&self) -> String {
        self.kind.name().into()
    }
}

fn three_param(r1: f64, r2: f64, r3: f64, gamma: f64) -> ComplexMatrix {
    let d = c(r3, -gamma / 2.0);
    m2(d, c(r1, -r2), c(r1, r2), -d)
}
