//! Finite-dimensional Krein spaces.
//!
//! The indefinite product is `[x, y] = yᴴ J x`: linear in the first slot,
//! conjugate-linear in the second. `J` is always the canonical
//! `diag(+1 × p, −1 × q)`; other Hermitian involutions are diagonalized once by
//! [`KreinSpace::from_symmetry`], which hands back the coordinate change.

use nalgebra::{Cholesky, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};
use crate::linalg::{
    self, column_space, hermitian_eigenvalues, min_singular_value, norm2, null_space, re,
    singular_values, CMat, CVec, C64,
};
use crate::tol::Tolerances;

/// Sign of a definite half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// `ℂⁿ` with the indefinite product induced by `diag(+1 × p, −1 × q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KreinSpace {
    p: usize,
    q: usize,
    j: CMat,
}

impl KreinSpace {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p + q == 0 {
            return Err(KreinError::InvalidSymmetry("dimension must be positive".into()));
        }
        Ok(Self {
            p,
            q,
            j: linalg::signature_matrix(p, q),
        })
    }

    /// The Hilbert space `ℂⁿ` (`J = I`).
    pub fn hilbert(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    /// Accepts an arbitrary Hermitian involution and diagonalizes it.
    ///
    /// Returns the canonical space together with a unitary `V` such that
    /// `j = V · diag(I_p, −I_q) · Vᴴ`; a vector `x` in the original coordinates
    /// has canonical coordinates `Vᴴ x`.
    pub fn from_symmetry(j: &CMat) -> Result<(Self, CMat)> {
        let n = j.nrows();
        if n == 0 || j.ncols() != n {
            return Err(KreinError::InvalidSymmetry("symmetry must be square and non-empty".into()));
        }
        let scale = norm2(j).max(1.0);
        if norm2(&(j - j.adjoint())) > 1e-12 * scale {
            return Err(KreinError::InvalidSymmetry("not Hermitian".into()));
        }
        if norm2(&(j * j - CMat::identity(n, n))) > 1e-12 * scale {
            return Err(KreinError::InvalidSymmetry("J² ≠ I".into()));
        }
        let eig = SymmetricEigen::new(linalg::hermitian_part(j));
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let p = order.iter().filter(|&&i| eig.eigenvalues[i] > 0.0).count();
        for &i in &order {
            let lam = eig.eigenvalues[i];
            if (lam.abs() - 1.0).abs() > 1e-10 {
                return Err(KreinError::InvalidSymmetry(format!("eigenvalue {lam} is not ±1")));
            }
        }
        let v = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok((Self::new(p, n - p)?, v))
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// The fundamental symmetry `J`.
    pub fn symmetry(&self) -> &CMat {
        &self.j
    }

    /// `[x, y] = yᴴ J x`.
    pub fn inner(&self, x: &CVec, y: &CVec) -> Result<C64> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        Ok(self.inner_unchecked(x, y))
    }

    pub(crate) fn inner_unchecked(&self, x: &CVec, y: &CVec) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.dim() {
            let s = if i < self.p { 1.0 } else { -1.0 };
            acc += y[i].conj() * x[i] * s;
        }
        acc
    }

    /// `basisᴴ J basis`.
    pub fn gram(&self, basis: &CMat) -> CMat {
        basis.adjoint() * &self.j * basis
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(KreinError::DimensionMismatch {
                expected: self.dim(),
                found: len,
            });
        }
        Ok(())
    }
}

/// `[x, y]` in `space`.
pub fn indefinite_inner(x: &CVec, y: &CVec, space: &KreinSpace) -> Result<C64> {
    space.inner(x, y)
}

/// Krein adjoint `T⁺ = J_source Tᴴ J_target` of `T: source → target`, so that
/// `[Tx, y]_target = [x, T⁺y]_source`.
pub fn krein_adjoint(t: &CMat, source: &KreinSpace, target: &KreinSpace) -> Result<CMat> {
    if t.ncols() != source.dim() {
        return Err(KreinError::DimensionMismatch {
            expected: source.dim(),
            found: t.ncols(),
        });
    }
    if t.nrows() != target.dim() {
        return Err(KreinError::DimensionMismatch {
            expected: target.dim(),
            found: t.nrows(),
        });
    }
    Ok(source.symmetry() * t.adjoint() * target.symmetry())
}

/// A subspace given by a full-column-rank basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    space: KreinSpace,
    basis: CMat,
    gram: CMat,
}

impl Subspace {
    /// Wraps a basis, rejecting rank-deficient input.
    pub fn new(space: &KreinSpace, basis: CMat, tol: &Tolerances) -> Result<Self> {
        if basis.nrows() != space.dim() {
            return Err(KreinError::DimensionMismatch {
                expected: space.dim(),
                found: basis.nrows(),
            });
        }
        if basis.ncols() == 0 {
            return Err(KreinError::RankDeficient { ratio: 0.0 });
        }
        let s = singular_values(&basis);
        let smax = s[0];
        let smin = if basis.ncols() > basis.nrows() { 0.0 } else { s[s.len() - 1] };
        let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
        if ratio <= tol.rank {
            return Err(KreinError::RankDeficient { ratio });
        }
        let gram = space.gram(&basis);
        Ok(Self {
            space: space.clone(),
            basis,
            gram,
        })
    }

    /// Span of arbitrary (possibly dependent) columns; `None` for `{0}`.
    pub fn span(space: &KreinSpace, columns: &CMat, tol: &Tolerances) -> Result<Option<Self>> {
        if columns.nrows() != space.dim() {
            return Err(KreinError::DimensionMismatch {
                expected: space.dim(),
                found: columns.nrows(),
            });
        }
        let q = column_space(columns, tol.rank);
        if q.ncols() == 0 {
            return Ok(None);
        }
        Self::new(space, q, tol).map(Some)
    }

    pub fn space(&self) -> &KreinSpace {
        &self.space
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    /// Gram matrix `basisᴴ J basis`.
    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Hilbert-orthonormal basis of the same subspace.
    pub fn orthonormal_basis(&self) -> CMat {
        column_space(&self.basis, 0.0)
    }

    /// Subspace equality by largest principal angle.
    pub fn same_as(&self, other: &Subspace, tol: &Tolerances) -> bool {
        self.dim() == other.dim()
            && linalg::max_principal_angle_sin(&self.orthonormal_basis(), &other.orthonormal_basis())
                <= tol.angle
    }

    /// Sine of the largest principal angle to `other` (1 when dimensions differ).
    pub fn angle_to(&self, other: &Subspace) -> f64 {
        linalg::max_principal_angle_sin(&self.orthonormal_basis(), &other.orthonormal_basis())
    }
}

/// Sign character of a subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DefiniteTag {
    UniformlyPositive,
    UniformlyNegative,
    NonNegative,
    NonPositive,
    Neutral,
    Indefinite,
    Degenerate,
}

/// Result of [`classify_subspace`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubspaceClass {
    pub tag: DefiniteTag,
    pub maximal: bool,
    /// The Gram matrix is singular up to tolerance.
    pub degenerate: bool,
    /// Extreme eigenvalues of the form compressed to an orthonormal basis,
    /// i.e. the extremes of `[x, x]` over unit vectors `x` of the subspace.
    pub min_form: f64,
    pub max_form: f64,
}

impl SubspaceClass {
    pub fn is_maximal_uniformly(&self, sign: Sign) -> bool {
        self.maximal
            && self.tag
                == match sign {
                    Sign::Plus => DefiniteTag::UniformlyPositive,
                    Sign::Minus => DefiniteTag::UniformlyNegative,
                }
    }

    pub fn is_uniformly(&self, sign: Sign) -> bool {
        self.tag
            == match sign {
                Sign::Plus => DefiniteTag::UniformlyPositive,
                Sign::Minus => DefiniteTag::UniformlyNegative,
            }
    }
}

/// Classifies a subspace by the eigenvalues of its indefinite form restricted
/// to a Hilbert-orthonormal basis (scale-free, thresholded by `tol.pd`).
pub fn classify_subspace(m: &Subspace, tol: &Tolerances) -> SubspaceClass {
    let q = m.orthonormal_basis();
    let ev = hermitian_eigenvalues(&m.space.gram(&q));
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    let t = tol.pd;
    let has_zero = ev.iter().any(|x| x.abs() <= t);
    let k = m.dim();
    let (p, qd) = (m.space.p(), m.space.q());
    let tag = if lo > t {
        DefiniteTag::UniformlyPositive
    } else if hi < -t {
        DefiniteTag::UniformlyNegative
    } else if lo >= -t && hi <= t {
        DefiniteTag::Neutral
    } else if lo >= -t {
        DefiniteTag::NonNegative
    } else if hi <= t {
        DefiniteTag::NonPositive
    } else if has_zero {
        DefiniteTag::Degenerate
    } else {
        DefiniteTag::Indefinite
    };
    let maximal = match tag {
        DefiniteTag::UniformlyPositive | DefiniteTag::NonNegative => k == p,
        DefiniteTag::UniformlyNegative | DefiniteTag::NonPositive => k == qd,
        DefiniteTag::Neutral => k == p.min(qd),
        DefiniteTag::Indefinite | DefiniteTag::Degenerate => false,
    };
    SubspaceClass {
        tag,
        maximal,
        degenerate: has_zero,
        min_form: lo,
        max_form: hi,
    }
}

/// `M^[⊥] = {x : [x, m] = 0 ∀ m ∈ M}`; `None` stands for `{0}`.
pub fn orthogonal_companion(m: &Subspace, tol: &Tolerances) -> Result<Option<Subspace>> {
    let q = m.orthonormal_basis();
    let rows = q.adjoint() * m.space.symmetry();
    let ns = null_space(&rows, tol.rank);
    if ns.ncols() == 0 {
        return Ok(None);
    }
    Subspace::new(&m.space, ns, tol).map(Some)
}

/// Basis of `M` with `[bᵢ, bⱼ] = sign · δᵢⱼ`, via a Cholesky factor of the
/// definite Gram matrix.
pub fn orthonormalize_definite(m: &Subspace, sign: Sign, tol: &Tolerances) -> Result<CMat> {
    if !classify_subspace(m, tol).is_uniformly(sign) {
        return Err(KreinError::NotDefinite);
    }
    let g = linalg::hermitian_part(&(m.gram() * re(sign.value())));
    let chol = Cholesky::new(g).ok_or(KreinError::NotDefinite)?;
    // G = L Lᴴ  ⇒  (B L⁻ᴴ)ᴴ J (B L⁻ᴴ) = sign · I.
    let l = chol.l();
    let lh = l.adjoint();
    let bt = m.basis().adjoint();
    let x = lh
        .adjoint()
        .solve_lower_triangular(&bt)
        .ok_or(KreinError::NotDefinite)?;
    let mut b = x.adjoint();
    linalg::normalize_column_phases(&mut b);
    Ok(b)
}

/// A fundamental decomposition `H = H₊ [∔] H₋` with `[·,·]`-orthonormal
/// bases of both halves.
#[derive(Debug, Clone)]
pub struct FundamentalDecomposition {
    plus: Subspace,
    minus: Subspace,
    onb_plus: CMat,
    onb_minus: CMat,
    frame: CMat,
    frame_inv: CMat,
    induced_symmetry: CMat,
}

impl FundamentalDecomposition {
    /// `(M^[⊥], M)` for a maximal uniformly negative `M`.
    pub fn from_negative(m_minus: &Subspace, tol: &Tolerances) -> Result<Self> {
        let class = classify_subspace(m_minus, tol);
        if !class.is_maximal_uniformly(Sign::Minus) {
            return Err(KreinError::NotMaximalDefinite(format!(
                "expected maximal uniformly negative, found {:?} (maximal = {})",
                class.tag, class.maximal
            )));
        }
        let plus = orthogonal_companion(m_minus, tol)?;
        Self::assemble(plus, Some(m_minus.clone()), m_minus.space(), tol)
    }

    /// `(M, M^[⊥])` for a maximal uniformly positive `M`.
    pub fn from_positive(m_plus: &Subspace, tol: &Tolerances) -> Result<Self> {
        let class = classify_subspace(m_plus, tol);
        if !class.is_maximal_uniformly(Sign::Plus) {
            return Err(KreinError::NotMaximalDefinite(format!(
                "expected maximal uniformly positive, found {:?} (maximal = {})",
                class.tag, class.maximal
            )));
        }
        let minus = orthogonal_companion(m_plus, tol)?;
        Self::assemble(Some(m_plus.clone()), minus, m_plus.space(), tol)
    }

    /// The canonical decomposition (coordinate axes).
    pub fn canonical(space: &KreinSpace, tol: &Tolerances) -> Result<Self> {
        let n = space.dim();
        let id = CMat::identity(n, n);
        let plus = (space.p() > 0)
            .then(|| Subspace::new(space, id.columns(0, space.p()).into_owned(), tol))
            .transpose()?;
        let minus = (space.q() > 0)
            .then(|| Subspace::new(space, id.columns(space.p(), space.q()).into_owned(), tol))
            .transpose()?;
        Self::assemble(plus, minus, space, tol)
    }

    fn assemble(
        plus: Option<Subspace>,
        minus: Option<Subspace>,
        space: &KreinSpace,
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = space.dim();
        let (plus, minus) = match (plus, minus) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(KreinError::NotMaximalDefinite(
                    "both halves of a fundamental decomposition must be non-trivial".into(),
                ))
            }
        };
        if !classify_subspace(&plus, tol).is_maximal_uniformly(Sign::Plus) {
            return Err(KreinError::NotMaximalDefinite("positive half".into()));
        }
        if !classify_subspace(&minus, tol).is_maximal_uniformly(Sign::Minus) {
            return Err(KreinError::NotMaximalDefinite("negative half".into()));
        }
        let onb_plus = orthonormalize_definite(&plus, Sign::Plus, tol)?;
        let onb_minus = orthonormalize_definite(&minus, Sign::Minus, tol)?;
        let frame = linalg::hstack(&onb_plus, &onb_minus);
        // Eᴴ J E = diag(I, −I)  ⇒  E⁻¹ = diag(I, −I) Eᴴ J.
        let js = linalg::signature_matrix(space.p(), space.q());
        let frame_inv = &js * frame.adjoint() * space.symmetry();
        let induced_symmetry = &frame * &js * &frame_inv;
        if norm2(&(&frame_inv * &frame - CMat::identity(n, n))) > 1e-8 {
            return Err(KreinError::RepresentationInconsistent {
                what: "fundamental decomposition basis is not [·,·]-orthonormal".into(),
                residual: norm2(&(&frame_inv * &frame - CMat::identity(n, n))),
            });
        }
        Ok(Self {
            plus,
            minus,
            onb_plus,
            onb_minus,
            frame,
            frame_inv,
            induced_symmetry,
        })
    }

    pub fn plus(&self) -> &Subspace {
        &self.plus
    }

    pub fn minus(&self) -> &Subspace {
        &self.minus
    }

    pub fn onb_plus(&self) -> &CMat {
        &self.onb_plus
    }

    pub fn onb_minus(&self) -> &CMat {
        &self.onb_minus
    }

    /// `J′ = E₊ − E₋`.
    pub fn induced_symmetry(&self) -> &CMat {
        &self.induced_symmetry
    }

    pub fn p(&self) -> usize {
        self.onb_plus.ncols()
    }

    pub fn q(&self) -> usize {
        self.onb_minus.ncols()
    }

    /// `[onb_plus | onb_minus]`.
    pub fn basis(&self) -> &CMat {
        &self.frame
    }

    pub fn basis_inverse(&self) -> &CMat {
        &self.frame_inv
    }

    /// Matrix of an operator in decomposition coordinates: `E⁻¹ S E`.
    ///
    /// Minus-side coordinates are read with the flipped product `−[·,·]`, so
    /// Krein self-adjoint operators become `[[A, B], [−Bᴴ, D]]` with `A`, `D`
    /// Hermitian.
    pub fn to_coords(&self, op: &CMat) -> CMat {
        &self.frame_inv * op * &self.frame
    }

    /// Inverse of [`Self::to_coords`].
    pub fn from_coords(&self, block: &CMat) -> CMat {
        &self.frame * block * &self.frame_inv
    }

    /// Coordinates of a vector or a set of columns.
    pub fn coords_of(&self, x: &CMat) -> CMat {
        &self.frame_inv * x
    }
}

/// Contraction whose graph over one half of a decomposition is a given
/// maximal uniformly definite subspace.
#[derive(Debug, Clone)]
pub struct AngularOperator {
    /// `p × q` for a graph over the negative half, `q × p` over the positive half.
    pub matrix: CMat,
    pub norm: f64,
    /// The half the graph is taken over.
    pub over: Sign,
}

impl AngularOperator {
    /// Basis `{Kx + x}` of the graph in ambient coordinates.
    pub fn graph_basis(&self, decomp: &FundamentalDecomposition) -> CMat {
        match self.over {
            Sign::Minus => &self.onb_image(decomp.onb_plus()) + decomp.onb_minus(),
            Sign::Plus => decomp.onb_plus() + &self.onb_image(decomp.onb_minus()),
        }
    }

    fn onb_image(&self, target_onb: &CMat) -> CMat {
        target_onb * &self.matrix
    }
}

/// Angular operator of `l` with respect to `decomp`.
///
/// A uniformly negative `l` is a graph over `decomp.minus()`; a uniformly
/// positive one is a graph over `decomp.plus()`.
pub fn angular_operator(
    l: &Subspace,
    decomp: &FundamentalDecomposition,
    tol: &Tolerances,
) -> Result<AngularOperator> {
    let class = classify_subspace(l, tol);
    let over = if class.is_maximal_uniformly(Sign::Minus) {
        Sign::Minus
    } else if class.is_maximal_uniformly(Sign::Plus) {
        Sign::Plus
    } else {
        return Err(KreinError::NotMaximalDefinite(format!(
            "angular operator needs a maximal uniformly definite subspace, found {:?}",
            class.tag
        )));
    };
    let c = decomp.coords_of(l.basis());
    let p = decomp.p();
    let cp = c.rows(0, p).into_owned();
    let cm = c.rows(p, c.nrows() - p).into_owned();
    let (dominant, other) = match over {
        Sign::Minus => (cm, cp),
        Sign::Plus => (cp, cm),
    };
    let s = singular_values(&dominant);
    if s.is_empty() || s[s.len() - 1] <= tol.rank * s[0] {
        return Err(KreinError::NotGraph);
    }
    let inv = linalg::inverse(&dominant).ok_or(KreinError::NotGraph)?;
    let matrix = other * inv;
    let norm = norm2(&matrix);
    if norm >= 1.0 - tol.contract {
        return Err(KreinError::ContractViolation { norm });
    }
    Ok(AngularOperator { matrix, norm, over })
}

/// Projection with the given range along the given kernel (`None` for `{0}`).
pub fn oblique_projection(
    range: &Subspace,
    kernel: Option<&Subspace>,
    tol: &Tolerances,
) -> Result<CMat> {
    let n = range.space().dim();
    let kernel_basis = kernel.map_or_else(|| CMat::zeros(n, 0), |k| k.basis().clone());
    oblique_projection_from_bases(range.basis(), &kernel_basis, tol)
}

/// [`oblique_projection`] on raw bases.
pub fn oblique_projection_from_bases(range: &CMat, kernel: &CMat, tol: &Tolerances) -> Result<CMat> {
    let n = range.nrows();
    if kernel.nrows() != n {
        return Err(KreinError::DimensionMismatch {
            expected: n,
            found: kernel.nrows(),
        });
    }
    let k = range.ncols();
    if k + kernel.ncols() != n {
        return Err(KreinError::NotComplementary);
    }
    let stacked = linalg::hstack(range, kernel);
    let s = singular_values(&stacked);
    if s.is_empty() || s[s.len() - 1] <= tol.rank * s[0] {
        return Err(KreinError::NotComplementary);
    }
    let inv = linalg::inverse(&stacked).ok_or(KreinError::NotComplementary)?;
    let mut sel = CMat::zeros(n, n);
    for i in 0..k {
        sel[(i, i)] = re(1.0);
    }
    Ok(&stacked * sel * inv)
}

/// Whether `M ∔ M^[⊥] = H`, i.e. the Gram matrix is non-singular.
pub fn is_regular(m: &Subspace, tol: &Tolerances) -> bool {
    !classify_subspace(m, tol).degenerate
}

/// The `[·,·]`-self-adjoint projection onto a regular subspace:
/// `B (Bᴴ J B)⁻¹ Bᴴ J`.
pub fn selfadjoint_projection(m: &Subspace, tol: &Tolerances) -> Result<CMat> {
    let q = m.orthonormal_basis();
    let g = m.space().gram(&q);
    if min_singular_value(&g) <= tol.pd {
        return Err(KreinError::NonRegularKernel);
    }
    let ginv = linalg::inverse(&g).ok_or(KreinError::NonRegularKernel)?;
    Ok(&q * ginv * q.adjoint() * m.space().symmetry())
}
