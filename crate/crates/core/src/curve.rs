//! Parameterized curves `t ∈ [0, 1] ↦ R(t)` in parameter space.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
}

type PointFn = dyn Fn(f64) -> Vec<f64> + Send + Sync;

#[derive(Clone)]
enum Shape {
    Ellipse { center: Vec<f64>, u: Vec<f64>, v: Vec<f64>, a: f64, b: f64 },
    Polyline(Vec<Vec<f64>>),
    Polynomial(Vec<Vec<f64>>),
    Custom(Arc<PointFn>),
}

/// Planar ellipse data `center + a cos(2πs) u + b sin(2πs) v`.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    pub center: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub a: f64,
    pub b: f64,
}

#[derive(Clone)]
pub struct CurveSpec {
    dim: usize,
    shape: Shape,
    closed: bool,
    orientation: Orientation,
    base_period: f64,
    traversals: usize,
    shift: f64,
}

impl fmt::Debug for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurveSpec")
            .field("dim", &self.dim)
            .field("closed", &self.closed)
            .field("orientation", &self.orientation)
            .field("base_period", &self.base_period)
            .field("traversals", &self.traversals)
            .finish()
    }
}

fn unit(v: &[f64]) -> Result<Vec<f64>> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidCurve("plane vectors must be nonzero".into()));
    }
    Ok(v.iter().map(|x| x / n).collect())
}

impl CurveSpec {
    fn build(dim: usize, shape: Shape, closed: bool) -> Self {
        Self { dim, shape, closed, orientation: Orientation::Positive, base_period: 1.0, traversals: 1, shift: 0.0 }
    }

    /// Circle of the given radius in the plane of the first two coordinates.
    pub fn circle(center: Vec<f64>, radius: f64) -> Result<Self> {
        let d = center.len();
        if d < 2 {
            return Err(Error::InvalidCurve("circle needs at least two coordinates".into()));
        }
        let mut u = vec![0.0; d];
        let mut v = vec![0.0; d];
        u[0] = 1.0;
        v[1] = 1.0;
        Self::ellipse(center, u, v, radius, radius)
    }

    /// Ellipse with semi-axes `a` along `u` and `b` along `v` (orthonormalized).
    pub fn ellipse(center: Vec<f64>, u: Vec<f64>, v: Vec<f64>, a: f64, b: f64) -> Result<Self> {
        let d = center.len();
        if u.len() != d || v.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: u.len().min(v.len()) });
        }
        if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidCurve("semi-axes must be finite and nonnegative".into()));
        }
        let u = unit(&u)?;
        let dot: f64 = u.iter().zip(&v).map(|(x, y)| x * y).sum();
        let v: Vec<f64> = v.iter().zip(&u).map(|(y, x)| y - dot * x).collect();
        let v = unit(&v).map_err(|_| Error::InvalidCurve("plane vectors are parallel".into()))?;
        Ok(Self::build(d, Shape::Ellipse { center, u, v, a, b }, true))
    }

    /// Circle `z = z0 + r e^{2πit}` in a one-complex-variable parameter space.
    pub fn complex_circle(z0: (f64, f64), radius: f64) -> Result<Self> {
        Self::circle(vec![z0.0, z0.1], radius)
    }

    /// Loop at polar angle `theta0` on the unit sphere around the `R3` axis.
    pub fn cone(theta0: f64) -> Result<Self> {
        Self::ellipse(
            vec![0.0, 0.0, theta0.cos()],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            theta0.sin(),
            theta0.sin(),
        )
    }

    pub fn polyline(points: Vec<Vec<f64>>, closed: bool) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidCurve("polyline needs at least two points".into()));
        }
        let d = points[0].len();
        if d == 0 || points.iter().any(|p| p.len() != d) {
            return Err(Error::InvalidCurve("polyline points must share one positive dimension".into()));
        }
        Ok(Self::build(d, Shape::Polyline(points), closed))
    }

    /// `x_i(t) = Σ_m coeffs[i][m] t^m`. A closed polynomial curve must satisfy `x(0) = x(1)`.
    pub fn polynomial(coeffs: Vec<Vec<f64>>, closed: bool) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| c.is_empty()) {
            return Err(Error::InvalidCurve("polynomial curve needs coefficients".into()));
        }
        let curve = Self::build(coeffs.len(), Shape::Polynomial(coeffs), closed);
        if closed {
            check_closed(&curve.raw(0.0), &curve.raw(1.0))?;
        }
        Ok(curve)
    }

    pub fn custom(dim: usize, closed: bool, f: impl Fn(f64) -> Vec<f64> + Send + Sync + 'static) -> Result<Self> {
        let curve = Self::build(dim, Shape::Custom(Arc::new(f)), closed);
        let p0 = curve.raw(0.0);
        if p0.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: p0.len() });
        }
        if closed {
            check_closed(&p0, &curve.raw(1.0))?;
        }
        Ok(curve)
    }

    fn raw(&self, s: f64) -> Vec<f64> {
        match &self.shape {
            Shape::Ellipse { center, u, v, a, b } => {
                let (sn, cs) = (2.0 * PI * s).sin_cos();
                (0..self.dim).map(|i| center[i] + a * cs * u[i] + b * sn * v[i]).collect()
            }
            Shape::Polyline(pts) => {
                let m = if self.closed { pts.len() } else { pts.len() - 1 };
                let x = s * m as f64;
                let k = (x.floor() as usize).min(m - 1);
                let w = x - k as f64;
                let p = &pts[k];
                let q = &pts[(k + 1) % pts.len()];
                p.iter().zip(q).map(|(a, b)| a + w * (b - a)).collect()
            }
            Shape::Polynomial(cs) => {
                cs.iter().map(|c| c.iter().rev().fold(0.0, |acc, &ck| acc * s + ck)).collect()
            }
            Shape::Custom(f) => f(s),
        }
    }

    /// Point at curve parameter `t ∈ [0, 1]`. Closed curves evaluate at a
    /// reduced parameter so that `map(1) == map(0)` bit for bit.
    pub fn map(&self, t: f64) -> Vec<f64> {
        if !self.closed {
            let s = match self.orientation {
                Orientation::Positive => t,
                Orientation::Negative => 1.0 - t,
            };
            return self.raw(s);
        }
        let mut s = (self.traversals as f64 * t).rem_euclid(1.0);
        if self.orientation == Orientation::Negative {
            s = (-s).rem_euclid(1.0);
        }
        s = (s + self.shift).rem_euclid(1.0);
        if s == 1.0 {
            s = 0.0;
        }
        self.raw(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn is_closed(&self) -> bool {
        self.closed
    }
    pub fn orientation(&self) -> Orientation {
        self.orientation
    }
    pub fn base_period(&self) -> f64 {
        self.base_period
    }
    pub fn traversals(&self) -> usize {
        self.traversals
    }
    /// Physical duration of the whole curve, `base_period × traversals`.
    pub fn duration(&self) -> f64 {
        self.base_period * self.traversals as f64
    }

    pub fn with_period(mut self, period: f64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidCurve("period must be positive".into()));
        }
        self.base_period = period;
        Ok(self)
    }

    pub fn reversed(mut self) -> Self {
        self.orientation = match self.orientation {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        };
        self
    }

    /// The curve traversed `k` more times (multiplies the current traversal count).
    pub fn repeated(mut self, k: usize) -> Result<Self> {
        if !self.closed {
            return Err(Error::OpenCurve);
        }
        if k == 0 {
            return Err(Error::InvalidCurve("traversal count must be positive".into()));
        }
        self.traversals *= k;
        Ok(self)
    }

    /// Same loop with its start point moved by `dt` in units of one traversal.
    pub fn shifted(mut self, dt: f64) -> Result<Self> {
        if !self.closed {
            return Err(Error::OpenCurve);
        }
        self.shift = (self.shift + dt).rem_euclid(1.0);
        Ok(self)
    }

    /// Ellipse data when the curve is an untransformed planar ellipse.
    pub fn plane(&self) -> Option<Plane> {
        match &self.shape {
            Shape::Ellipse { center, u, v, a, b } if self.traversals == 1 => {
                Some(Plane { center: center.clone(), u: u.clone(), v: v.clone(), a: *a, b: *b })
            }
            _ => None,
        }
    }
}

fn check_closed(p0: &[f64], p1: &[f64]) -> Result<()> {
    let scale = 1.0 + p0.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let gap = p0.iter().zip(p1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if p0.len() != p1.len() || gap > 1e-12 * scale {
        return Err(Error::InvalidCurve(format!("closed curve has map(0) != map(1) (gap {gap:.3e})")));
    }
    Ok(())
}

pub const MIN_SAMPLES: usize = 8;

/// `n + 1` samples `t_k = k/n`; closed curves reuse the start point at `t = 1`.
pub fn discretize(curve: &CurveSpec, n_samples: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidSampling(format!("need at least {MIN_SAMPLES} samples, got {n_samples}")));
    }
    let mut out: Vec<(f64, Vec<f64>)> = (0..n_samples)
        .map(|k| {
            let t = k as f64 / n_samples as f64;
            (t, curve.map(t))
        })
        .collect();
    let end = if curve.is_closed() { out[0].1.clone() } else { curve.map(1.0) };
    out.push((1.0, end));
    Ok(out)
}
