//! Dense complex linear algebra helpers shared by every module.
//!
//! Everything here works on `DMatrix<Complex64>`. Norms are operator 2-norms
//! (largest singular value) unless a name says otherwise. SVDs and Hermitian
//! eigenvalues go through faer: nalgebra's complex SVD loses accuracy on
//! rank-deficient input.

use faer::Side;
use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Lifts a real number into the complex field.
#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Builds a complex matrix from real row slices. Mostly a test convenience.
pub fn real_matrix(rows: &[&[f64]]) -> CMat {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(nrows, ncols, |i, j| re(rows[i][j]))
}

/// Builds a complex column vector from real entries.
pub fn real_vector(entries: &[f64]) -> CVec {
    DVector::from_iterator(entries.len(), entries.iter().map(|&x| re(x)))
}

/// `diag(+1 × p, −1 × q)` as a complex matrix.
pub fn signature_matrix(p: usize, q: usize) -> CMat {
    DMatrix::from_fn(p + q, p + q, |i, j| {
        if i != j {
            C64::new(0.0, 0.0)
        } else if i < p {
            re(1.0)
        } else {
            re(-1.0)
        }
    })
}

fn to_faer(m: &CMat) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Full SVD `m = U·diag(s)·Vᴴ` with `U`, `V` square and `s` descending.
pub fn svd(m: &CMat) -> (CMat, Vec<f64>, CMat) {
    let f = to_faer(m).svd().expect("SVD converged");
    let s = f.S().column_vector().iter().map(|z| z.re).collect();
    (from_faer(f.U()), s, from_faer(f.V()))
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("SVD converged")
}

/// Operator 2-norm. Zero for empty matrices.
pub fn norm2(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Smallest singular value of a square matrix.
pub fn min_singular_value(m: &CMat) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Relative residual `‖a − b‖ / max(scale, tiny)`.
pub fn rel_diff(a: &CMat, b: &CMat, scale: f64) -> f64 {
    norm2(&(a - b)) / scale.max(f64::MIN_POSITIVE)
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * re(0.5)
}

/// `‖m − mᴴ‖ / max(‖m‖, tiny)`.
pub fn hermitian_defect(m: &CMat) -> f64 {
    rel_diff(m, &m.adjoint(), norm2(m))
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    to_faer(&hermitian_part(m))
        .self_adjoint_eigenvalues(Side::Lower)
        .expect("Hermitian eigensolver converged")
}

/// `(min, max)` eigenvalue of the Hermitian part of `m`: the closure of its
/// numerical range when `m` is Hermitian.
pub fn hermitian_extremes(m: &CMat) -> (f64, f64) {
    let ev = hermitian_eigenvalues(m);
    (ev[0], ev[ev.len() - 1])
}

/// Orthonormal basis of the column space. Singular values at or below
/// `rel_tol · σ_max` are treated as zero.
pub fn column_space(m: &CMat, rel_tol: f64) -> CMat {
    let n = m.nrows();
    if m.ncols() == 0 || n == 0 {
        return CMat::zeros(n, 0);
    }
    let (u, s, _) = svd(m);
    let keep = s.iter().filter(|&&x| s[0] > 0.0 && x > rel_tol * s[0]).count();
    u.columns(0, keep).into_owned()
}

/// Numerical rank with relative cutoff.
pub fn rank(m: &CMat, rel_tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&smax) if smax > 0.0 => s.iter().filter(|&&x| x > rel_tol * smax).count(),
        _ => 0,
    }
}

/// Orthonormal basis of the null space `{x : m x = 0}` (columns of size
/// `m.ncols()`).
pub fn null_space(m: &CMat, rel_tol: f64) -> CMat {
    let n = m.ncols();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    // The trailing right singular vectors span the null space.
    let r = rank(m, rel_tol);
    let (_, _, v) = svd(m);
    v.columns(r, n - r).into_owned()
}

/// Sine of the largest principal angle between the column spaces of two
/// orthonormal bases. Returns 1 when the dimensions differ.
pub fn max_principal_angle_sin(a: &CMat, b: &CMat) -> f64 {
    if a.ncols() != b.ncols() || a.nrows() != b.nrows() {
        return 1.0;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    // ‖(I − aaᴴ) b‖ for orthonormal a, b of equal dimension.
    let resid = b - a * (a.adjoint() * b);
    norm2(&resid).min(1.0)
}

/// Whether two arbitrary bases span the same subspace (largest principal
/// angle below `angle_tol`).
pub fn same_span(a: &CMat, b: &CMat, rank_tol: f64, angle_tol: f64) -> bool {
    let qa = column_space(a, rank_tol);
    let qb = column_space(b, rank_tol);
    qa.ncols() == qb.ncols() && max_principal_angle_sin(&qa, &qb) <= angle_tol
}

/// Rotates each column so that its first entry of largest modulus is real
/// and positive. Fixes the otherwise arbitrary phases returned by SVDs.
pub fn normalize_column_phases(m: &mut CMat) {
    for mut col in m.column_iter_mut() {
        let mut best = C64::new(0.0, 0.0);
        for z in col.iter() {
            if z.norm() > best.norm() * (1.0 + 1e-12) {
                best = *z;
            }
        }
        if best.norm() > 0.0 {
            let phase = best.conj() / best.norm();
            col *= phase;
        }
    }
}

pub fn hstack(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.nrows(), b.nrows(), "hstack: row counts differ");
    let mut out = CMat::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((0, a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    out
}

/// Assembles `[[a, b], [c, d]]`.
pub fn block2(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
    let (p, q) = (a.nrows(), d.nrows());
    let mut out = CMat::zeros(p + q, p + q);
    out.view_mut((0, 0), (p, p)).copy_from(a);
    out.view_mut((0, p), (p, q)).copy_from(b);
    out.view_mut((p, 0), (q, p)).copy_from(c);
    out.view_mut((p, p), (q, q)).copy_from(d);
    out
}

/// Splits a square matrix into its `p`/`q` blocks `(tl, tr, bl, br)`.
pub fn split_blocks(m: &CMat, p: usize) -> (CMat, CMat, CMat, CMat) {
    let n = m.nrows();
    let q = n - p;
    (
        m.view((0, 0), (p, p)).into_owned(),
        m.view((0, p), (p, q)).into_owned(),
        m.view((p, 0), (q, p)).into_owned(),
        m.view((p, p), (q, q)).into_owned(),
    )
}

pub fn inverse(m: &CMat) -> Option<CMat> {
    m.clone().try_inverse()
}

/// Complex Schur form `m = z t zᴴ` with `t` upper triangular.
pub fn complex_schur(m: &CMat) -> Option<(CMat, CMat)> {
    Schur::try_new(m.clone(), f64::EPSILON, 10_000).map(|s| s.unpack())
}

/// Eigenvalues from the complex Schur form, in no particular order.
pub fn eigenvalues(m: &CMat) -> Option<Vec<C64>> {
    let (_, t) = complex_schur(m)?;
    Some((0..t.nrows()).map(|i| t[(i, i)]).collect())
}
