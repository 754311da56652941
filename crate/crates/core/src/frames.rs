//! Vector families in a Krein space and the J-frame test.

use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};
use crate::krein::{
    classify_subspace, orthonormalize_definite, KreinSpace, Sign, Subspace, SubspaceClass,
};
use crate::linalg::{self, hermitian_eigenvalues, rank, CMat, CVec};
use crate::tol::Tolerances;

/// An ordered family `f₁ … f_N` with its sign partition.
///
/// Vectors keep the caller's order. The synthesis matrix uses the sign-sorted
/// order (all of `I₊` first); `permutation()[k]` is the caller index of column `k`.
#[derive(Debug, Clone)]
pub struct Frame {
    space: KreinSpace,
    vectors: Vec<CVec>,
    self_products: Vec<f64>,
    permutation: Vec<usize>,
    n_plus: usize,
    synthesis: CMat,
    ell2: KreinSpace,
}

impl Frame {
    /// Builds a frame; `i ∈ I₊` iff the computed `[fᵢ, fᵢ] ≥ 0`.
    pub fn new(space: &KreinSpace, vectors: Vec<CVec>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(KreinError::EmptyFamily);
        }
        let n = space.dim();
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != n {
                return Err(KreinError::DimensionMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
            if v.iter().all(|z| *z == linalg::re(0.0)) {
                return Err(KreinError::ZeroVector { index });
            }
        }
        let self_products: Vec<f64> = vectors
            .iter()
            .map(|v| space.inner_unchecked(v, v).re)
            .collect();
        let mut permutation: Vec<usize> = (0..vectors.len()).filter(|&i| self_products[i] >= 0.0).collect();
        let n_plus = permutation.len();
        permutation.extend((0..vectors.len()).filter(|&i| self_products[i] < 0.0));
        let synthesis = CMat::from_fn(n, vectors.len(), |r, c| vectors[permutation[c]][r]);
        let ell2 = KreinSpace::new(n_plus, vectors.len() - n_plus)?;
        Ok(Self {
            space: space.clone(),
            vectors,
            self_products,
            permutation,
            n_plus,
            synthesis,
            ell2,
        })
    }

    /// Frame whose vectors are the columns of `m`, in column order.
    pub fn from_columns(space: &KreinSpace, m: &CMat) -> Result<Self> {
        let vectors = m.column_iter().map(|c| c.into_owned()).collect();
        Self::new(space, vectors)
    }

    pub fn space(&self) -> &KreinSpace {
        &self.space
    }

    /// Vectors in caller order.
    pub fn vectors(&self) -> &[CVec] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `[fᵢ, fᵢ]` in caller order.
    pub fn self_products(&self) -> &[f64] {
        &self.self_products
    }

    pub fn sign(&self, index: usize) -> Sign {
        if self.self_products[index] >= 0.0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// Caller indices of `I₊` and `I₋`, each ascending.
    pub fn partition(&self) -> (Vec<usize>, Vec<usize>) {
        (
            self.permutation[..self.n_plus].to_vec(),
            self.permutation[self.n_plus..].to_vec(),
        )
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    pub fn n_minus(&self) -> usize {
        self.len() - self.n_plus
    }

    /// `T` with sign-sorted columns.
    pub fn synthesis(&self) -> &CMat {
        &self.synthesis
    }

    pub fn t_plus(&self) -> CMat {
        self.synthesis.columns(0, self.n_plus).into_owned()
    }

    pub fn t_minus(&self) -> CMat {
        self.synthesis.columns(self.n_plus, self.n_minus()).into_owned()
    }

    /// `ℓ₂(N)` with `diag(+1 × |I₊|, −1 × |I₋|)`.
    pub fn ell2(&self) -> &KreinSpace {
        &self.ell2
    }

    /// Applies `op` to every vector, keeping caller order.
    pub fn map(&self, op: &CMat) -> Result<Frame> {
        Frame::new(&self.space, self.vectors.iter().map(|v| op * v).collect())
    }

    /// Puts sign-sorted columns (e.g. a transformed synthesis matrix) back in
    /// caller order.
    pub fn unpermute(&self, sorted: &CMat) -> CMat {
        let mut out = sorted.clone();
        for (k, &i) in self.permutation.iter().enumerate() {
            out.set_column(i, &sorted.column(k));
        }
        out
    }
}

/// Outcome of [`is_jframe`]; failures are recorded, not raised.
#[derive(Debug, Clone)]
pub struct JFrameReport {
    pub is_jframe: bool,
    pub class_plus: Option<SubspaceClass>,
    pub class_minus: Option<SubspaceClass>,
    pub m_plus: Option<Subspace>,
    pub m_minus: Option<Subspace>,
    /// `M₊ ∔ M₋ = H`.
    pub direct_sum_ok: bool,
    /// Independent characterization: the family spans `H`, `M±` are
    /// non-degenerate and finite positive bounds exist on both halves.
    pub bounds_route_ok: bool,
    pub failure_reason: Option<String>,
}

pub const PLUS_FAILURE: &str = "R(T₊) not maximal uniformly positive";
pub const MINUS_FAILURE: &str = "R(T₋) not maximal uniformly negative";

pub fn is_jframe(frame: &Frame, tol: &Tolerances) -> JFrameReport {
    let space = frame.space();
    let span = |m: CMat| Subspace::span(space, &m, tol).ok().flatten();
    let m_plus = span(frame.t_plus());
    let m_minus = span(frame.t_minus());
    let class_plus = m_plus.as_ref().map(|m| classify_subspace(m, tol));
    let class_minus = m_minus.as_ref().map(|m| classify_subspace(m, tol));

    let mut reasons = Vec::new();
    if space.p() == 0 || space.q() == 0 {
        reasons.push("signature must have p ≥ 1 and q ≥ 1".to_string());
    }
    if !class_plus.is_some_and(|c| c.is_maximal_uniformly(Sign::Plus)) {
        reasons.push(PLUS_FAILURE.to_string());
    }
    if !class_minus.is_some_and(|c| c.is_maximal_uniformly(Sign::Minus)) {
        reasons.push(MINUS_FAILURE.to_string());
    }
    let direct_sum_ok = match (&m_plus, &m_minus) {
        (Some(a), Some(b)) => {
            a.dim() + b.dim() == space.dim()
                && rank(&linalg::hstack(a.basis(), b.basis()), tol.rank) == space.dim()
        }
        _ => false,
    };
    let bounds_route_ok = bounds_route(frame, m_plus.as_ref(), m_minus.as_ref(), tol);
    JFrameReport {
        is_jframe: reasons.is_empty(),
        class_plus,
        class_minus,
        m_plus,
        m_minus,
        direct_sum_ok,
        bounds_route_ok,
        failure_reason: (!reasons.is_empty()).then(|| reasons.join("; ")),
    }
}

fn bounds_route(frame: &Frame, m_plus: Option<&Subspace>, m_minus: Option<&Subspace>, tol: &Tolerances) -> bool {
    let (Some(mp), Some(mm)) = (m_plus, m_minus) else {
        return false;
    };
    if rank(frame.synthesis(), tol.rank) != frame.space().dim() {
        return false;
    }
    let side_ok = |m: &Subspace, t: &CMat, sign: Sign| {
        // On a Hilbert-orthonormal basis b of M: the family bound reads
        // α · (±bᴴJb) ≤ XᴴX ≤ β · (±bᴴJb) with X = tᴴ J b.
        let b = m.orthonormal_basis();
        let g = m.space().gram(&b) * linalg::re(sign.value());
        let gev = hermitian_eigenvalues(&g);
        if gev[0] <= tol.pd {
            return false;
        }
        let x = t.adjoint() * m.space().symmetry() * &b;
        let xx = x.adjoint() * &x;
        // Generalized eigenvalues of (XᴴX, ±G) via G^{-1/2} XᴴX G^{-1/2}.
        let Some(chol) = nalgebra::Cholesky::new(linalg::hermitian_part(&g)) else {
            return false;
        };
        let l = chol.l();
        let Some(li) = linalg::inverse(&l) else {
            return false;
        };
        let ev = hermitian_eigenvalues(&(&li * xx * li.adjoint()));
        ev[0] > tol.pd && ev[ev.len() - 1].is_finite()
    };
    side_ok(mp, &frame.t_plus(), Sign::Plus) && side_ok(mm, &frame.t_minus(), Sign::Minus)
}

/// Hilbert frame bounds: extreme eigenvalues of `TTᴴ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HilbertBounds {
    pub alpha: f64,
    pub beta: f64,
    pub spanning: bool,
}

pub fn hilbert_frame_bounds(vectors: &[CVec], n: usize, tol: &Tolerances) -> Result<HilbertBounds> {
    if vectors.is_empty() {
        return Err(KreinError::EmptyFamily);
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != n) {
        return Err(KreinError::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    let t = CMat::from_fn(n, vectors.len(), |r, c| vectors[c][r]);
    let spanning = rank(&t, tol.rank) == n;
    let ev = hermitian_eigenvalues(&(&t * t.adjoint()));
    Ok(HilbertBounds {
        alpha: if spanning { ev[0] } else { 0.0 },
        beta: ev[ev.len() - 1],
        spanning,
    })
}

/// Optimal `(α, β)` with `α (±[f,f]) ≤ Σ_{i∈I±} |[f, fᵢ]|² ≤ β (±[f,f])` on `M±`,
/// computed directly from the vectors.
pub fn frame_bounds_on_definite_subspace(frame: &Frame, side: Sign, tol: &Tolerances) -> Result<(f64, f64)> {
    let report = is_jframe(frame, tol);
    if !report.is_jframe {
        return Err(KreinError::NotJFrame(report.failure_reason.unwrap_or_default()));
    }
    let (m, t) = match side {
        Sign::Plus => (report.m_plus.expect("J-frame has M₊"), frame.t_plus()),
        Sign::Minus => (report.m_minus.expect("J-frame has M₋"), frame.t_minus()),
    };
    // ±[Bc, Bc] = ‖c‖², so the quotient is the Rayleigh quotient of XᴴX.
    let b = orthonormalize_definite(&m, side, tol)?;
    let x = t.adjoint() * frame.space().symmetry() * b;
    let ev = hermitian_eigenvalues(&(x.adjoint() * x));
    Ok((ev[0], ev[ev.len() - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_vector;

    pub(crate) fn re1() -> Frame {
        let h = KreinSpace::new(1, 1).unwrap();
        Frame::new(&h, vec![real_vector(&[1.0, 0.0]), real_vector(&[1.0, 2.0])]).unwrap()
    }

    #[test]
    fn build_examples() {
        let f = re1();
        assert_eq!(f.partition(), (vec![0], vec![1]));
        assert_eq!(f.synthesis(), &linalg::real_matrix(&[&[1.0, 1.0], &[0.0, 2.0]]));
        assert_eq!(f.self_products(), &[1.0, -3.0]);

        let h = KreinSpace::new(1, 1).unwrap();
        let c = Frame::new(&h, vec![real_vector(&[1.0, 0.0]), real_vector(&[0.0, 1.0])]).unwrap();
        assert_eq!(c.synthesis(), &CMat::identity(2, 2));

        let n = Frame::new(&h, vec![real_vector(&[1.0, 1.0])]).unwrap();
        assert_eq!(n.partition(), (vec![0], vec![]));
    }

    #[test]
    fn synthesis_is_sign_sorted() {
        let h = KreinSpace::new(1, 1).unwrap();
        let f = Frame::new(
            &h,
            vec![real_vector(&[0.0, 1.0]), real_vector(&[1.0, 0.0]), real_vector(&[0.5, 2.0])],
        )
        .unwrap();
        assert_eq!(f.permutation(), &[1, 0, 2]);
        assert_eq!((f.ell2().p(), f.ell2().q()), (1, 2));
        assert_eq!(f.unpermute(f.synthesis()).column(0), f.vectors()[0]);
    }

    #[test]
    fn build_rejects_bad_input() {
        let h = KreinSpace::new(1, 1).unwrap();
        assert!(matches!(Frame::new(&h, vec![]), Err(KreinError::EmptyFamily)));
        assert!(matches!(
            Frame::new(&h, vec![real_vector(&[1.0])]),
            Err(KreinError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            Frame::new(&h, vec![real_vector(&[1.0, 0.0]), real_vector(&[0.0, 0.0])]),
            Err(KreinError::ZeroVector { index: 1 })
        ));
    }

    #[test]
    fn jframe_examples() {
        let tol = Tolerances::default();
        let r = is_jframe(&re1(), &tol);
        assert!(r.is_jframe && r.direct_sum_ok && r.bounds_route_ok);

        let h = KreinSpace::new(1, 1).unwrap();
        let f = Frame::new(&h, vec![real_vector(&[1.0, 0.0]), real_vector(&[1.0, 1.0])]).unwrap();
        let r = is_jframe(&f, &tol);
        assert!(!r.is_jframe && !r.bounds_route_ok);
        assert!(r.m_minus.is_none());
        assert!(r.failure_reason.unwrap().contains(MINUS_FAILURE));

        let h3 = KreinSpace::new(2, 1).unwrap();
        let f = Frame::new(
            &h3,
            vec![
                real_vector(&[1.0, 0.0, 0.0]),
                real_vector(&[0.0, 1.0, 0.0]),
                real_vector(&[1.0, 2.0, 0.0]),
            ],
        )
        .unwrap();
        let r = is_jframe(&f, &tol);
        assert!(!r.is_jframe);
        assert_eq!(r.failure_reason.as_deref(), Some(MINUS_FAILURE));
    }

    #[test]
    fn positive_vectors_spanning_indefinite_space_fail() {
        // Both vectors positive but their span is all of ℂ², which is indefinite.
        let tol = Tolerances::default();
        let h = KreinSpace::new(1, 1).unwrap();
        let f = Frame::new(
            &h,
            vec![real_vector(&[1.0, 0.0]), real_vector(&[1.0, 0.5]), real_vector(&[0.0, 1.0])],
        )
        .unwrap();
        let r = is_jframe(&f, &tol);
        assert!(!r.is_jframe);
        assert_eq!(r.failure_reason.as_deref(), Some(PLUS_FAILURE));
        assert!(!r.bounds_route_ok);
    }

    #[test]
    fn hilbert_bounds_examples() {
        let tol = Tolerances::default();
        let e = [real_vector(&[1.0, 0.0]), real_vector(&[0.0, 1.0])];
        let b = hilbert_frame_bounds(&e, 2, &tol).unwrap();
        assert!((b.alpha - 1.0).abs() < 1e-14 && (b.beta - 1.0).abs() < 1e-14);

        let b = hilbert_frame_bounds(re1().vectors(), 2, &tol).unwrap();
        let s5 = 5f64.sqrt();
        assert!((b.alpha - (3.0 - s5)).abs() < 1e-13);
        assert!((b.beta - (3.0 + s5)).abs() < 1e-13);

        let dup: Vec<_> = e.iter().chain(e.iter()).cloned().collect();
        let b = hilbert_frame_bounds(&dup, 2, &tol).unwrap();
        assert!((b.alpha - 2.0).abs() < 1e-14 && (b.beta - 2.0).abs() < 1e-14);

        let b = hilbert_frame_bounds(&[real_vector(&[1.0, 1.0])], 2, &tol).unwrap();
        assert!(!b.spanning && b.alpha == 0.0);
    }

    #[test]
    fn definite_bounds_examples() {
        let tol = Tolerances::default();
        let (a, b) = frame_bounds_on_definite_subspace(&re1(), Sign::Minus, &tol).unwrap();
        assert!((a - 3.0).abs() < 1e-13 && (b - 3.0).abs() < 1e-13);
        let (a, b) = frame_bounds_on_definite_subspace(&re1(), Sign::Plus, &tol).unwrap();
        assert!((a - 1.0).abs() < 1e-13 && (b - 1.0).abs() < 1e-13);
    }
}
