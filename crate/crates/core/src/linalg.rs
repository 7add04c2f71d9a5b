//! Dense complex eigensystems for small matrices.
//!
//! Right eigenvectors come from the Schur form of `H`, left eigenvectors from
//! the Schur form of `H†`; the two sets are paired by eigenvalue conjugation
//! and then biorthonormalized.

use nalgebra::DMatrix;
pub use nalgebra::DVector;
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CVector = DVector<C64>;

/// Relative gap below which two eigenvalues count as degenerate.
pub const DEGENERACY_RTOL: f64 = 1e-8;
/// Threshold on the eigenvector defect separating diabolic from exceptional points.
pub const DEFECT_TOL: f64 = 1e-6;
/// `|<phi|psi>|` relative to `|phi||psi|` below this is treated as self-orthogonal.
pub const SELF_ORTHO_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    m: DMatrix<C64>,
}

impl ComplexMatrix {
    /// Builds an `n×n` matrix from row-major entries.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParams("matrix dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: entries.len() });
        }
        Ok(Self { m: DMatrix::from_row_slice(dim, dim, &entries) })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
            entries.extend_from_slice(row);
        }
        Self::new(n, entries)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> =
            rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() == 0 || m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        Ok(Self { m })
    }

    pub fn diag(values: &[C64]) -> Self {
        assert!(!values.is_empty());
        Self { m: DMatrix::from_diagonal(&CVector::from_column_slice(values)) }
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0);
        Self { m: DMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn adjoint(&self) -> Self {
        Self { m: self.m.adjoint() }
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    pub fn mul_vec(&self, v: &CVector) -> CVector {
        &self.m * v
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.m - self.m.adjoint()).norm() <= tol * self.m.norm().max(1.0)
    }

    /// `U H U†`.
    pub fn conjugate_by(&self, u: &DMatrix<C64>) -> Self {
        Self { m: u * &self.m * u.adjoint() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { m: &self.m * s }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { m: &self.m + &other.m }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { m: &self.m - &other.m }
    }
}

/// `<a|b>` with the conjugate on the left.
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.dotc(b)
}

/// Eigenvalues plus biorthonormal right/left eigenvectors at one point.
#[derive(Clone, Debug)]
pub struct Eigenframe {
    eigenvalues: Vec<C64>,
    right: Vec<CVector>,
    left: Vec<CVector>,
    residual: f64,
    gap: f64,
}

impl Eigenframe {
    /// Assembles a frame from biorthonormal data; residual and gap are recomputed.
    pub fn from_parts(
        h: &ComplexMatrix,
        eigenvalues: Vec<C64>,
        right: Vec<CVector>,
        left: Vec<CVector>,
    ) -> Self {
        let residual = residual_of(h, &eigenvalues, &right, &left);
        let gap = min_gap(&eigenvalues);
        Self { eigenvalues, right, left, residual, gap }
    }

    pub(crate) fn with_vectors(&self, right: Vec<CVector>, left: Vec<CVector>) -> Self {
        Self { eigenvalues: self.eigenvalues.clone(), right, left, residual: self.residual, gap: self.gap }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }
    pub fn eigenvalue(&self, j: usize) -> C64 {
        self.eigenvalues[j]
    }
    pub fn right(&self, j: usize) -> &CVector {
        &self.right[j]
    }
    pub fn left(&self, j: usize) -> &CVector {
        &self.left[j]
    }
    pub fn right_vectors(&self) -> &[CVector] {
        &self.right
    }
    pub fn left_vectors(&self) -> &[CVector] {
        &self.left
    }
    pub fn residual(&self) -> f64 {
        self.residual
    }
    pub fn gap(&self) -> f64 {
        self.gap
    }

    /// Largest deviation of `<phi_j|psi_k>` from the identity.
    pub fn biorthonormality_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                let target = if j == k { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                worst = worst.max((inner(&self.left[j], &self.right[k]) - target).norm());
            }
        }
        worst
    }

    /// Index of the eigenvalue closest to `e`.
    pub fn nearest_label(&self, e: C64) -> usize {
        let mut best = 0;
        for j in 1..self.dim() {
            if (self.eigenvalues[j] - e).norm() < (self.eigenvalues[best] - e).norm() {
                best = j;
            }
        }
        best
    }
}

fn residual_of(h: &ComplexMatrix, e: &[C64], right: &[CVector], left: &[CVector]) -> f64 {
    let ha = h.adjoint();
    let mut r: f64 = 0.0;
    for j in 0..e.len() {
        let rn = right[j].norm().max(f64::MIN_POSITIVE);
        let ln = left[j].norm().max(f64::MIN_POSITIVE);
        r = r.max((h.mul_vec(&right[j]) - &right[j] * e[j]).norm() / rn);
        r = r.max((ha.mul_vec(&left[j]) - &left[j] * e[j].conj()).norm() / ln);
    }
    r
}

pub fn min_gap(e: &[C64]) -> f64 {
    let mut g = f64::INFINITY;
    for j in 0..e.len() {
        for k in j + 1..e.len() {
            g = g.min((e[j] - e[k]).norm());
        }
    }
    g
}

/// Index of the first component whose magnitude is (up to roundoff) maximal.
pub(crate) fn dominant_index(v: &CVector) -> usize {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    v.iter().position(|z| z.norm() >= max * (1.0 - 1e-9)).unwrap_or(0)
}

/// Unit norm, largest component real positive.
fn fix_right_gauge(v: &CVector) -> CVector {
    let n = v.norm();
    let pivot = v[dominant_index(v)];
    let phase = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { C64::new(1.0, 0.0) };
    v * (phase / n)
}

/// Rescales right vectors to the standard gauge and rebuilds the left vectors
/// as the exact dual basis, so that `<phi_j|psi_k> = delta_jk`.
pub fn biorthonormalize(right: &[CVector], left: &[CVector]) -> Result<(Vec<CVector>, Vec<CVector>)> {
    let n = right.len();
    if left.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: left.len() });
    }
    let len = right.first().map_or(0, |v| v.len());
    for v in right.iter().chain(left.iter()) {
        if v.len() != len {
            return Err(Error::DimensionMismatch { expected: len, got: v.len() });
        }
    }
    let psi: Vec<CVector> = right.iter().map(fix_right_gauge).collect();
    let mut s = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            s[(j, k)] = inner(&left[j], &psi[k]);
        }
        let scale = left[j].norm() * psi[j].norm();
        let overlap = s[(j, j)].norm();
        if !(overlap > SELF_ORTHO_TOL * scale) {
            return Err(Error::SelfOrthogonal { index: j, overlap: overlap / scale.max(f64::MIN_POSITIVE) });
        }
    }
    // Phi' = Phi S^{-dagger}  =>  Phi'^dagger Psi = S^{-1} Phi^dagger Psi = 1.
    let s_inv_adj = s
        .clone()
        .lu()
        .try_inverse()
        .ok_or(Error::SelfOrthogonal { index: 0, overlap: 0.0 })?
        .adjoint();
    let mut phi_mat = DMatrix::<C64>::zeros(len, n);
    for (j, l) in left.iter().enumerate() {
        phi_mat.set_column(j, l);
    }
    let phi_new = phi_mat * s_inv_adj;
    let phi = (0..n).map(|j| phi_new.column(j).into_owned()).collect();
    Ok((psi, phi))
}

fn schur(m: &DMatrix<C64>) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let n = m.nrows();
    if n == 1 {
        return Ok((DMatrix::identity(1, 1), m.clone()));
    }
    let s = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 10_000).ok_or(Error::NoConvergence)?;
    let (q, t) = s.unpack();
    let scale = m.norm().max(f64::MIN_POSITIVE);
    for j in 0..n {
        for i in j + 1..n {
            if t[(i, j)].norm() > 1e-10 * scale {
                return Err(Error::NoConvergence);
            }
        }
    }
    Ok((q, t))
}

/// Eigenvectors of an upper-triangular `t` by back substitution, mapped back by `q`.
fn triangular_eigenvectors(q: &DMatrix<C64>, t: &DMatrix<C64>) -> Vec<CVector> {
    let n = t.nrows();
    let floor = f64::EPSILON * t.norm().max(f64::MIN_POSITIVE);
    (0..n)
        .map(|k| {
            let lambda = t[(k, k)];
            let mut y = CVector::zeros(n);
            y[k] = C64::new(1.0, 0.0);
            for i in (0..k).rev() {
                let mut acc = C64::new(0.0, 0.0);
                for l in i + 1..=k {
                    acc += t[(i, l)] * y[l];
                }
                let mut d = t[(i, i)] - lambda;
                if d.norm() < floor {
                    d = C64::new(floor, 0.0);
                }
                y[i] = -acc / d;
            }
            q * y
        })
        .collect()
}

/// Ordering key: position of the dominant component, then Re E, then Im E.
fn label_order(e: &[C64], right: &[CVector]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..e.len()).collect();
    idx.sort_by(|&a, &b| {
        dominant_index(&right[a])
            .cmp(&dominant_index(&right[b]))
            .then(e[a].re.total_cmp(&e[b].re))
            .then(e[a].im.total_cmp(&e[b].im))
    });
    idx
}

fn finish_frame(h: &ComplexMatrix, e: Vec<C64>, right: Vec<CVector>, left: Vec<CVector>) -> Result<Eigenframe> {
    let (psi, phi) = biorthonormalize(&right, &left)?;
    let order = label_order(&e, &psi);
    let e: Vec<C64> = order.iter().map(|&j| e[j]).collect();
    let psi: Vec<CVector> = order.iter().map(|&j| psi[j].clone()).collect();
    let phi: Vec<CVector> = order.iter().map(|&j| phi[j].clone()).collect();
    Ok(Eigenframe::from_parts(h, e, psi, phi))
}

pub fn degeneracy_tol(h: &ComplexMatrix) -> f64 {
    DEGENERACY_RTOL * h.norm()
}

/// General dense eigensystem with biorthonormal left vectors.
pub fn eig_general(h: &ComplexMatrix) -> Result<Eigenframe> {
    let n = h.dim();
    let tol = degeneracy_tol(h);
    let (q, t) = schur(h.as_dmatrix())?;
    let e: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
    let gap = min_gap(&e);
    if n > 1 && !(gap > tol) {
        return Err(Error::DegenerateInput { gap, tol });
    }
    let right = triangular_eigenvectors(&q, &t);

    let (ql, tl) = schur(&h.as_dmatrix().adjoint())?;
    let left_raw = triangular_eigenvectors(&ql, &tl);
    let mut left = Vec::with_capacity(n);
    let mut used = vec![false; n];
    for ej in &e {
        let target = ej.conj();
        let k = (0..n)
            .filter(|&k| !used[k])
            .min_by(|&a, &b| (tl[(a, a)] - target).norm().total_cmp(&(tl[(b, b)] - target).norm()))
            .ok_or(Error::NoConvergence)?;
        if (tl[(k, k)] - target).norm() > 0.5 * gap.min(f64::MAX) && n > 1 {
            return Err(Error::NoConvergence);
        }
        used[k] = true;
        left.push(left_raw[k].clone());
    }
    finish_frame(h, e, right, left)
}

/// Closed-form 2×2 eigensystem, using whichever patch formula is better conditioned.
pub fn eig_2x2(h: &ComplexMatrix) -> Result<Eigenframe> {
    if h.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: h.dim() });
    }
    let half_tr = h.trace() * 0.5;
    let a = (h.get(0, 0) - h.get(1, 1)) * 0.5;
    let b = h.get(0, 1);
    let c = h.get(1, 0);
    let f = (a * a + b * c).sqrt();
    let tol = degeneracy_tol(h);
    if !(2.0 * f.norm() > tol) {
        return Err(Error::DegenerateInput { gap: 2.0 * f.norm(), tol });
    }
    let v = |x: C64, y: C64| CVector::from_vec(vec![x, y]);
    let (psi_p, psi_m, phi_p, phi_m) = if (f + a).norm() >= (f - a).norm() {
        let s = f + a;
        (v(s, c), v(-b, s), v(s.conj(), b.conj()), v(-c.conj(), s.conj()))
    } else {
        let s = a - f;
        (v(-b, s), v(s, c), v(-c.conj(), s.conj()), v(s.conj(), b.conj()))
    };
    finish_frame(h, vec![half_tr + f, half_tr - f], vec![psi_p, psi_m], vec![phi_p, phi_m])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegeneracyKind {
    Nondegenerate,
    Diabolic,
    Exceptional,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegeneracyClass {
    pub kind: DegeneracyKind,
    pub gap: f64,
    pub eigenvector_defect: f64,
}

/// Eigenvalues only (Schur diagonal).
pub fn eigenvalues(h: &ComplexMatrix) -> Result<Vec<C64>> {
    let (_, t) = schur(h.as_dmatrix())?;
    Ok((0..h.dim()).map(|k| t[(k, k)]).collect())
}

/// Classifies the point as nondegenerate, diabolic or exceptional.
///
/// Eigenvalues closer than `tol` are clustered. For a cluster of size m around
/// λ̄ the defect is the m-th smallest singular value of `H − λ̄` relative to
/// `|H|`: zero when the cluster has m independent eigenvectors, order one at
/// a Jordan block.
pub fn classify_degeneracy(h: &ComplexMatrix, tol: f64) -> DegeneracyClass {
    let n = h.dim();
    let e = match eigenvalues(h) {
        Ok(e) => e,
        Err(_) => {
            return DegeneracyClass { kind: DegeneracyKind::Exceptional, gap: 0.0, eigenvector_defect: 1.0 }
        }
    };
    let gap = if n > 1 { min_gap(&e) } else { f64::INFINITY };
    if gap > tol {
        return DegeneracyClass { kind: DegeneracyKind::Nondegenerate, gap, eigenvector_defect: 0.0 };
    }
    // single-linkage clusters
    let mut cluster: Vec<usize> = (0..n).collect();
    for j in 0..n {
        for k in 0..n {
            if (e[j] - e[k]).norm() <= tol {
                let (from, to) = (cluster[k], cluster[j]);
                if from != to {
                    for c in cluster.iter_mut() {
                        if *c == from {
                            *c = to;
                        }
                    }
                }
            }
        }
    }
    let scale = h.norm().max(f64::MIN_POSITIVE);
    let mut defect: f64 = 0.0;
    let mut ids = cluster.clone();
    ids.sort_unstable();
    ids.dedup();
    for id in ids {
        let members: Vec<usize> = (0..n).filter(|&j| cluster[j] == id).collect();
        let m = members.len();
        if m < 2 {
            continue;
        }
        let mean = members.iter().map(|&j| e[j]).sum::<C64>() / m as f64;
        let shifted = h.as_dmatrix() - DMatrix::<C64>::identity(n, n) * mean;
        let mut sv: Vec<f64> = shifted.singular_values().iter().copied().collect();
        sv.sort_by(f64::total_cmp);
        defect = defect.max((sv[m - 1] / scale).min(1.0));
    }
    let kind = if defect > DEFECT_TOL { DegeneracyKind::Exceptional } else { DegeneracyKind::Diabolic };
    DegeneracyClass { kind, gap, eigenvector_defect: defect }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diag_three() {
        let h = ComplexMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let f = eig_general(&h).unwrap();
        for j in 0..3 {
            assert!((f.eigenvalue(j) - c(j as f64 + 1.0, 0.0)).norm() < 1e-14);
            assert!((f.right(j)[j] - c(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn eig_2x2_examples() {
        let f = eig_2x2(&ComplexMatrix::diag(&[c(1.0, 0.0), c(-1.0, 0.0)])).unwrap();
        assert_eq!(f.eigenvalues(), &[c(1.0, 0.0), c(-1.0, 0.0)]);
        let h = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![4.0, 0.0]]).unwrap();
        let f = eig_2x2(&h).unwrap();
        assert!((f.eigenvalue(0) + 2.0).norm() < 1e-14 && (f.eigenvalue(1) - 2.0).norm() < 1e-14);
        let jordan = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(eig_2x2(&jordan), Err(Error::DegenerateInput { .. })));
        assert!(matches!(eig_general(&jordan), Err(Error::DegenerateInput { .. })));
    }

    #[test]
    fn biorthonormalize_scalar_pairing() {
        let psi = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let phi = CVector::from_vec(vec![c(2.0, 0.0), c(1.0, 0.0)]);
        let (r, l) = biorthonormalize(&[psi], &[phi]).unwrap();
        assert!((inner(&l[0], &r[0]) - 1.0).norm() < 1e-15);
        assert!((l[0][0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((l[0][1] - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn self_orthogonal_rejected() {
        let psi = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let phi = CVector::from_vec(vec![c(1e-14, 0.0), c(1.0, 0.0)]);
        assert!(matches!(biorthonormalize(&[psi], &[phi]), Err(Error::SelfOrthogonal { .. })));
    }

    #[test]
    fn classify_examples() {
        let tol = 1e-8;
        let k = |rows: &[Vec<f64>]| classify_degeneracy(&ComplexMatrix::from_real_rows(rows).unwrap(), tol).kind;
        assert_eq!(k(&[vec![1.0, 0.0], vec![0.0, 1.0]]), DegeneracyKind::Diabolic);
        assert_eq!(k(&[vec![0.0, 1.0], vec![0.0, 0.0]]), DegeneracyKind::Exceptional);
        assert_eq!(k(&[vec![1.0, 0.0], vec![0.0, 2.0]]), DegeneracyKind::Nondegenerate);
    }
}
