//! The J-frame operator `S = TT⁺`, its block representations and bounds.
//!
//! Block matrices live in the coordinates of a [`FundamentalDecomposition`]:
//! `[·,·]`-orthonormal columns on the positive half and columns of indefinite
//! norm −1 on the negative half. In those coordinates a Krein self-adjoint
//! operator is `[[A, B], [−Bᴴ, D]]` with `A`, `D` Hermitian.
//!
//! Worked numbers for the frame `f₁ = (1, 0)`, `f₂ = (1, 2)` in `diag(1, −1)`:
//! `S = [[0, 2], [−2, 4]]`; over `(M₋^[⊥], M₋)` the blocks are `A = 4/3`,
//! `−AK = 2/3`, `KᴴA = −2/3`, `D = 8/3`, so `K = −1/2`.

use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};
use crate::frames::{frame_bounds_on_definite_subspace, is_jframe, Frame};
use crate::krein::{
    angular_operator, classify_subspace, krein_adjoint, oblique_projection, orthogonal_companion,
    FundamentalDecomposition, KreinSpace, Sign, Subspace,
};
use crate::linalg::{
    self, block2, hermitian_defect, hermitian_extremes, hermitian_part, inverse, norm2, split_blocks, CMat,
};
use crate::tol::{require, Check, Tolerances};

/// `S`, `S±` and `Q` for a J-frame.
#[derive(Debug, Clone)]
pub struct JFrameOperatorBundle {
    pub s: CMat,
    pub s_plus: CMat,
    pub s_minus: CMat,
    /// Projection onto `M₊` along `M₋`.
    pub q: CMat,
    pub m_plus: Subspace,
    pub m_minus: Subspace,
    pub frame: Frame,
    pub checks: Vec<Check>,
}

impl JFrameOperatorBundle {
    pub fn space(&self) -> &KreinSpace {
        self.frame.space()
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.s)
    }

    pub fn inverse(&self) -> Result<CMat> {
        inverse(&self.s).ok_or(KreinError::SingularOperator)
    }
}

pub fn jframe_operator(frame: &Frame, tol: &Tolerances) -> Result<JFrameOperatorBundle> {
    let report = is_jframe(frame, tol);
    if !report.is_jframe {
        return Err(KreinError::NotJFrame(report.failure_reason.unwrap_or_default()));
    }
    let (m_plus, m_minus) = (report.m_plus.expect("J-frame"), report.m_minus.expect("J-frame"));
    let space = frame.space();
    let j = space.symmetry();
    let t = frame.synthesis();
    let s = t * krein_adjoint(t, frame.ell2(), space)?;

    // S± f = Σ_{i∈I±} [f, fᵢ] fᵢ, i.e. Σ fᵢ fᵢᴴ J.
    let n = space.dim();
    let (mut s_plus, mut s_minus) = (CMat::zeros(n, n), CMat::zeros(n, n));
    for (i, f) in frame.vectors().iter().enumerate() {
        let term = f * (f.adjoint() * j);
        match frame.sign(i) {
            Sign::Plus => s_plus += term,
            Sign::Minus => s_minus += term,
        }
    }
    let q = oblique_projection(&m_plus, Some(&m_minus), tol)?;

    let ns = norm2(&s);
    let id = CMat::identity(n, n);
    let pos = |m: &CMat| hermitian_extremes(&(j * m)).0 / ns.max(1.0);
    let qp = krein_adjoint(&q, space, space)?;
    let checks = vec![
        Check::at_most("S = S₊ − S₋", norm2(&(&s - (&s_plus - &s_minus))) / ns, 1e-12),
        Check::at_most("QS = S₊", norm2(&(&q * &s - &s_plus)) / ns, 1e-12),
        Check::at_most("SQ⁺ = S₊", norm2(&(&s * &qp - &s_plus)) / ns, 1e-12),
        Check::at_most("(I − Q)S = −S₋", norm2(&((&id - &q) * &s + &s_minus)) / ns, 1e-12),
        Check::at_most("JS Hermitian", hermitian_defect(&(j * &s)), 1e-12),
        Check::at_least("[S₊f, f] ≥ 0", pos(&s_plus), -1e-10),
        Check::at_least("[S₋f, f] ≥ 0", pos(&s_minus), -1e-10),
    ];
    require(&checks)?;
    Ok(JFrameOperatorBundle {
        s,
        s_plus,
        s_minus,
        q,
        m_plus,
        m_minus,
        frame: frame.clone(),
        checks,
    })
}

/// `S = [[A, −AK], [KᴴA, D]]` over `(M₋^[⊥], M₋)`.
#[derive(Debug, Clone)]
pub struct BlockRepCork {
    pub decomp: FundamentalDecomposition,
    pub a: CMat,
    pub k: CMat,
    pub d: CMat,
    /// `D + KᴴAK`.
    pub d_plus_kak: CMat,
    pub checks: Vec<Check>,
}

impl BlockRepCork {
    pub fn p(&self) -> usize {
        self.a.nrows()
    }

    pub fn assemble(&self) -> CMat {
        let ak = &self.a * &self.k;
        block2(&self.a, &(-&ak), &ak.adjoint(), &self.d)
    }
}

/// `S = [[A′, LD′], [−D′Lᴴ, D′]]` over `(M₊, M₊^[⊥])`.
#[derive(Debug, Clone)]
pub struct BlockRepEdinburgh {
    pub decomp: FundamentalDecomposition,
    pub a_prime: CMat,
    pub l: CMat,
    pub d_prime: CMat,
    /// `A′ + LD′Lᴴ`.
    pub a_plus_ldl: CMat,
    pub checks: Vec<Check>,
}

impl BlockRepEdinburgh {
    pub fn p(&self) -> usize {
        self.a_prime.nrows()
    }

    pub fn assemble(&self) -> CMat {
        let ld = &self.l * &self.d_prime;
        block2(&self.a_prime, &ld, &(-ld.adjoint()), &self.d_prime)
    }
}

fn min_eig(m: &CMat) -> f64 {
    hermitian_extremes(m).0
}

pub fn block_rep_cork(bundle: &JFrameOperatorBundle, tol: &Tolerances) -> Result<BlockRepCork> {
    let decomp = FundamentalDecomposition::from_negative(&bundle.m_minus, tol)?;
    let p = decomp.p();
    let q = decomp.q();
    let b = decomp.to_coords(&bundle.s);
    let (tl, tr, bl, br) = split_blocks(&b, p);
    let a = hermitian_part(&tl);
    let k = -a.clone().lu().solve(&tr).ok_or(KreinError::SingularOperator)?;
    let d = hermitian_part(&br);
    let d_plus_kak = hermitian_part(&(&d + k.adjoint() * &a * &k));

    let m_plus_comp = orthogonal_companion(&bundle.m_plus, tol)?
        .ok_or_else(|| KreinError::NotMaximalDefinite("M₊^[⊥] is trivial".into()))?;
    let angular = angular_operator(&m_plus_comp, &decomp, tol)?;
    let k_gap = norm2(&(&angular.matrix - &k));
    if k_gap > 1e-8 {
        return Err(KreinError::RepresentationInconsistent {
            what: "K from blocks vs angular operator of M₊^[⊥]".into(),
            residual: k_gap,
        });
    }

    let ns = bundle.norm();
    let rep = BlockRepCork {
        a,
        k,
        d,
        d_plus_kak,
        checks: Vec::new(),
        decomp,
    };
    let id_p = CMat::identity(p, p);
    let id_q = CMat::identity(q, q);
    let zp_q = CMat::zeros(p, q);
    let zq_p = CMat::zeros(q, p);
    let lower = block2(&id_p, &zp_q, &rep.k.adjoint(), &id_q);
    let upper = block2(&id_p, &(-&rep.k), &zq_p, &id_q);
    let diag = block2(&rep.a, &zp_q, &zq_p, &rep.d_plus_kak);
    let q_block = block2(&id_p, &zp_q, &rep.k.adjoint(), &CMat::zeros(q, q));
    let checks = vec![
        Check::at_most("Cork: A Hermitian", norm2(&(&tl - tl.adjoint())) / ns, 1e-10),
        Check::at_most("Cork: D Hermitian", norm2(&(&br - br.adjoint())) / ns, 1e-10),
        Check::at_most("Cork: lower-left = KᴴA", norm2(&(&bl - rep.k.adjoint() * &rep.a)) / ns, 1e-10),
        Check::at_most("Cork: reassembly", norm2(&(rep.decomp.from_coords(&rep.assemble()) - &bundle.s)) / ns, 1e-10),
        Check::at_most("Cork: factorization", norm2(&(lower * diag * upper - &b)) / ns, 1e-12),
        Check::at_most("Cork: Q = [[I,0],[Kᴴ,0]]", norm2(&(rep.decomp.from_coords(&q_block) - &bundle.q)) / norm2(&bundle.q), 1e-10),
        Check::at_least("Cork: min eig A", min_eig(&rep.a), tol.pd * ns.max(1.0)),
        Check::at_least("Cork: min eig D + KᴴAK", min_eig(&rep.d_plus_kak), tol.pd * ns.max(1.0)),
        Check::at_most("Cork: ‖K‖", norm2(&rep.k), 1.0 - tol.contract),
    ];
    require(&checks)?;
    Ok(BlockRepCork { checks, ..rep })
}

pub fn block_rep_edinburgh(bundle: &JFrameOperatorBundle, tol: &Tolerances) -> Result<BlockRepEdinburgh> {
    let decomp = FundamentalDecomposition::from_positive(&bundle.m_plus, tol)?;
    let p = decomp.p();
    let b = decomp.to_coords(&bundle.s);
    let (tl, tr, bl, br) = split_blocks(&b, p);
    let a_prime = hermitian_part(&tl);
    let d_prime = hermitian_part(&br);
    // L = tr·D′⁻¹ through a solve with D′ = D′ᴴ.
    let l = d_prime
        .clone()
        .lu()
        .solve(&tr.adjoint())
        .ok_or(KreinError::SingularOperator)?
        .adjoint();
    let a_plus_ldl = hermitian_part(&(&a_prime + &l * &d_prime * l.adjoint()));

    let angular = angular_operator(&bundle.m_minus, &decomp, tol)?;
    let l_gap = norm2(&(&angular.matrix - &l));
    if l_gap > 1e-8 {
        return Err(KreinError::RepresentationInconsistent {
            what: "L from blocks vs angular operator of M₋".into(),
            residual: l_gap,
        });
    }

    let ns = bundle.norm();
    let rep = BlockRepEdinburgh {
        a_prime,
        l,
        d_prime,
        a_plus_ldl,
        checks: Vec::new(),
        decomp,
    };
    let checks = vec![
        Check::at_most("Edinburgh: A′ Hermitian", norm2(&(&tl - tl.adjoint())) / ns, 1e-10),
        Check::at_most("Edinburgh: D′ Hermitian", norm2(&(&br - br.adjoint())) / ns, 1e-10),
        Check::at_most("Edinburgh: lower-left = −D′Lᴴ", norm2(&(&bl + &rep.d_prime * rep.l.adjoint())) / ns, 1e-10),
        Check::at_most("Edinburgh: reassembly", norm2(&(rep.decomp.from_coords(&rep.assemble()) - &bundle.s)) / ns, 1e-10),
        Check::at_least("Edinburgh: min eig D′", min_eig(&rep.d_prime), tol.pd * ns.max(1.0)),
        Check::at_least("Edinburgh: min eig A′ + LD′Lᴴ", min_eig(&rep.a_plus_ldl), tol.pd * ns.max(1.0)),
        Check::at_most("Edinburgh: ‖L‖", norm2(&rep.l), 1.0 - tol.contract),
    ];
    require(&checks)?;
    Ok(BlockRepEdinburgh { checks, ..rep })
}

/// Compares the four block forms of `S₊` and `S₋` with the bundle.
pub fn s_pm_block_reps(rep_c: &BlockRepCork, rep_e: &BlockRepEdinburgh, bundle: &JFrameOperatorBundle) -> Vec<Check> {
    let ns = bundle.norm();
    let (a, k) = (&rep_c.a, &rep_c.k);
    let (p, q) = (a.nrows(), rep_c.d.nrows());
    let ak = a * k;
    let kak = k.adjoint() * &ak;
    let zp = CMat::zeros(p, p);
    let zpq = CMat::zeros(p, q);
    let zqp = CMat::zeros(q, p);
    let zq = CMat::zeros(q, q);
    let cork_plus = block2(a, &(-&ak), &ak.adjoint(), &(-&kak));
    let cork_minus = block2(&zp, &zpq, &zqp, &(-&rep_c.d_plus_kak));

    let (l, dp) = (&rep_e.l, &rep_e.d_prime);
    let ld = l * dp;
    let ldl = &ld * l.adjoint();
    let edin_plus = block2(&rep_e.a_plus_ldl, &zpq, &zqp, &zq);
    let edin_minus = block2(&ldl, &(-&ld), &ld.adjoint(), &(-dp));

    let gap = |coords: &CMat, decomp: &FundamentalDecomposition, target: &CMat| {
        norm2(&(decomp.from_coords(coords) - target)) / ns
    };
    vec![
        Check::at_most("S₊ Cork form", gap(&cork_plus, &rep_c.decomp, &bundle.s_plus), 1e-10),
        Check::at_most("S₋ Cork form", gap(&cork_minus, &rep_c.decomp, &bundle.s_minus), 1e-10),
        Check::at_most("S₊ Edinburgh form", gap(&edin_plus, &rep_e.decomp, &bundle.s_plus), 1e-10),
        Check::at_most("S₋ Edinburgh form", gap(&edin_minus, &rep_e.decomp, &bundle.s_minus), 1e-10),
    ]
}

/// Both block forms of `S⁻¹`.
#[derive(Debug, Clone)]
pub struct InverseReps {
    /// `(D + KᴴAK)⁻¹`
    pub z: CMat,
    /// `(A′ + LD′Lᴴ)⁻¹`
    pub y: CMat,
    /// `[[A⁻¹ − KZKᴴ, KZ], [−ZKᴴ, Z]]` in Cork coordinates.
    pub cork_block: CMat,
    /// `[[Y, −YL], [LᴴY, D′⁻¹ − LᴴYL]]` in Edinburgh coordinates.
    pub edinburgh_block: CMat,
    pub sinv_from_cork: CMat,
    pub sinv_from_edinburgh: CMat,
    pub checks: Vec<Check>,
}

pub fn inverse_block_reps(
    rep_c: &BlockRepCork,
    rep_e: &BlockRepEdinburgh,
    bundle: &JFrameOperatorBundle,
) -> Result<InverseReps> {
    let inv = |m: &CMat| inverse(m).ok_or(KreinError::SingularOperator);
    let s_inv = bundle.inverse()?;
    let ni = norm2(&s_inv);

    let k = &rep_c.k;
    let a_inv = inv(&rep_c.a)?;
    let z = inv(&rep_c.d_plus_kak)?;
    let kz = k * &z;
    let cork_block = block2(&(&a_inv - &kz * k.adjoint()), &kz, &(-kz.adjoint()), &z);

    let l = &rep_e.l;
    let d_inv = inv(&rep_e.d_prime)?;
    let y = inv(&rep_e.a_plus_ldl)?;
    let yl = &y * l;
    let edinburgh_block = block2(&y, &(-&yl), &yl.adjoint(), &(&d_inv - l.adjoint() * &yl));

    let sinv_from_cork = rep_c.decomp.from_coords(&cork_block);
    let sinv_from_edinburgh = rep_e.decomp.from_coords(&edinburgh_block);

    // S⁻¹ read in Cork coordinates has Edinburgh shape with D″ = Z, L″ = K,
    // and in Edinburgh coordinates Cork shape with A″ = Y, K″ = L.
    let p = rep_c.p();
    let (c_tl, c_tr, _, c_br) = split_blocks(&rep_c.decomp.to_coords(&s_inv), p);
    let l2 = &c_tr * inv(&c_br)?;
    let (e_tl, e_tr, _, e_br) = split_blocks(&rep_e.decomp.to_coords(&s_inv), rep_e.p());
    let k2 = -(inv(&e_tl)? * &e_tr);
    let dual_d = &e_br + k2.adjoint() * &e_tl * &k2;

    let checks = vec![
        Check::at_most("S⁻¹ Cork form", norm2(&(&sinv_from_cork - &s_inv)) / ni, 1e-9),
        Check::at_most("S⁻¹ Edinburgh form", norm2(&(&sinv_from_edinburgh - &s_inv)) / ni, 1e-9),
        Check::at_most("S⁻¹ over Cork: D″ = Z", norm2(&(&c_br - &z)) / ni, 1e-9),
        Check::at_most("S⁻¹ over Cork: L″ = K", norm2(&(&l2 - k)), 1e-9),
        Check::at_most(
            "S⁻¹ over Cork: A″ + L″D″L″ᴴ = A⁻¹",
            norm2(&(&c_tl + &l2 * &c_br * l2.adjoint() - &a_inv)) / ni,
            1e-9,
        ),
        Check::at_most("S⁻¹ over Edinburgh: A″ = Y", norm2(&(&e_tl - &y)) / ni, 1e-9),
        Check::at_most("S⁻¹ over Edinburgh: K″ = L", norm2(&(&k2 - l)), 1e-9),
        Check::at_most("S⁻¹ over Edinburgh: D″ + K″ᴴA″K″ = D′⁻¹", norm2(&(&dual_d - &d_inv)) / ni, 1e-9),
    ];
    Ok(InverseReps {
        z,
        y,
        cork_block,
        edinburgh_block,
        sinv_from_cork,
        sinv_from_edinburgh,
        checks,
    })
}

/// J-frame bounds `(α±, β±)` and dual bounds `(γ±, δ±)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JFrameBounds {
    pub alpha_plus: f64,
    pub beta_plus: f64,
    pub alpha_minus: f64,
    pub beta_minus: f64,
    pub gamma_plus: f64,
    pub delta_plus: f64,
    pub gamma_minus: f64,
    pub delta_minus: f64,
}

impl JFrameBounds {
    /// Bounds from the numerical ranges of the block entries.
    pub fn from_reps(rep_c: &BlockRepCork, rep_e: &BlockRepEdinburgh) -> Result<Self> {
        let (alpha_minus, beta_minus) = hermitian_extremes(&rep_c.d_plus_kak);
        let (alpha_plus, beta_plus) = hermitian_extremes(&rep_e.a_plus_ldl);
        let a_inv = inverse(&rep_c.a).ok_or(KreinError::SingularOperator)?;
        let d_inv = inverse(&rep_e.d_prime).ok_or(KreinError::SingularOperator)?;
        let (gamma_plus, delta_plus) = hermitian_extremes(&a_inv);
        let (gamma_minus, delta_minus) = hermitian_extremes(&d_inv);
        Ok(Self {
            alpha_plus,
            beta_plus,
            alpha_minus,
            beta_minus,
            gamma_plus,
            delta_plus,
            gamma_minus,
            delta_minus,
        })
    }

    pub fn as_array(&self) -> [f64; 8] {
        [
            self.alpha_plus,
            self.beta_plus,
            self.alpha_minus,
            self.beta_minus,
            self.gamma_plus,
            self.delta_plus,
            self.gamma_minus,
            self.delta_minus,
        ]
    }
}

/// Largest relative gap between the block-entry bounds and the bounds
/// measured directly on the frame vectors (primal) and on the canonical dual
/// frame (dual).
pub fn bounds_oracle_error(bounds: &JFrameBounds, frame: &Frame, dual: &Frame, tol: &Tolerances) -> Result<f64> {
    let (ap, bp) = frame_bounds_on_definite_subspace(frame, Sign::Plus, tol)?;
    let (am, bm) = frame_bounds_on_definite_subspace(frame, Sign::Minus, tol)?;
    let (gp, dp) = frame_bounds_on_definite_subspace(dual, Sign::Plus, tol)?;
    let (gm, dm) = frame_bounds_on_definite_subspace(dual, Sign::Minus, tol)?;
    let oracle = [ap, bp, am, bm, gp, dp, gm, dm];
    Ok(bounds
        .as_array()
        .iter()
        .zip(oracle)
        .map(|(&x, o)| (x - o).abs() / o.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max))
}

/// Bounds from the block reps, cross-checked against the direct oracle.
pub fn jframe_bounds(
    rep_c: &BlockRepCork,
    rep_e: &BlockRepEdinburgh,
    bundle: &JFrameOperatorBundle,
    tol: &Tolerances,
) -> Result<JFrameBounds> {
    let bounds = JFrameBounds::from_reps(rep_c, rep_e)?;
    let frame = &bundle.frame;
    let names = ["α₊", "β₊", "α₋", "β₋"];
    let (ap, bp) = frame_bounds_on_definite_subspace(frame, Sign::Plus, tol)?;
    let (am, bm) = frame_bounds_on_definite_subspace(frame, Sign::Minus, tol)?;
    for ((name, &x), o) in names.iter().zip(bounds.as_array().iter()).zip([ap, bp, am, bm]) {
        if (x - o).abs() > 1e-8 * o.abs() {
            return Err(KreinError::OracleMismatch {
                what: (*name).to_string(),
                implementation: x,
                oracle: o,
            });
        }
    }
    Ok(bounds)
}

/// The canonical dual `{S⁻¹fᵢ}` together with the evidence that it behaves as
/// the theory says.
#[derive(Debug, Clone)]
pub struct DualFrame {
    pub frame: Frame,
    pub signs_preserved: bool,
    /// `‖S′ − S⁻¹‖ / ‖S⁻¹‖` with `S′` the J-frame operator of the dual.
    pub operator_residual: f64,
    /// Largest principal-angle sine in `span{S⁻¹fᵢ : i ∈ I±} = M∓^[⊥]`.
    pub span_angle: f64,
    pub checks: Vec<Check>,
}

pub fn dual_frame(bundle: &JFrameOperatorBundle, tol: &Tolerances) -> Result<DualFrame> {
    let frame = &bundle.frame;
    let s_inv = bundle.inverse()?;
    let dual = frame.map(&s_inv)?;
    let signs_preserved = (0..frame.len()).all(|i| dual.sign(i) == frame.sign(i));
    let dual_bundle = jframe_operator(&dual, tol)?;
    let operator_residual = norm2(&(&dual_bundle.s - &s_inv)) / norm2(&s_inv);

    let comp = |m: &Subspace| {
        orthogonal_companion(m, tol)?.ok_or_else(|| KreinError::NotMaximalDefinite("trivial companion".into()))
    };
    let span_angle = dual_bundle
        .m_plus
        .angle_to(&comp(&bundle.m_minus)?)
        .max(dual_bundle.m_minus.angle_to(&comp(&bundle.m_plus)?));
    let checks = vec![
        Check::at_most("dual: sign changes", if signs_preserved { 0.0 } else { 1.0 }, 0.0),
        Check::at_most("dual: S′ = S⁻¹", operator_residual, 1e-10),
        Check::at_most("dual: span{S⁻¹fᵢ : I±} = M∓^[⊥]", span_angle, tol.angle),
    ];
    require(&checks)?;
    Ok(DualFrame {
        frame: dual,
        signs_preserved,
        operator_residual,
        span_angle,
        checks,
    })
}

/// Per-condition outcome of [`verify_operator_conditions`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorConditions {
    /// `S(L₊)` is maximal uniformly positive.
    pub image_maximal_positive: bool,
    /// `[Sf, f] ≥ 0` on `L₊`.
    pub nonnegative_on_l_plus: bool,
    /// `[Sg, g] ≤ 0` on `S(L₊)^[⊥]`.
    pub nonpositive_on_companion: bool,
    pub min_form_on_l_plus: f64,
    pub max_form_on_companion: f64,
}

impl OperatorConditions {
    pub fn all(&self) -> bool {
        self.image_maximal_positive && self.nonnegative_on_l_plus && self.nonpositive_on_companion
    }
}

/// Checks the three conditions certifying that `S` is a J-frame operator,
/// given a candidate maximal uniformly positive `L₊`.
pub fn verify_operator_conditions(s: &CMat, l_plus: &Subspace, tol: &Tolerances) -> Result<OperatorConditions> {
    let space = l_plus.space();
    let n = space.dim();
    if s.nrows() != n || s.ncols() != n {
        return Err(KreinError::DimensionMismatch {
            expected: n,
            found: s.nrows(),
        });
    }
    let ns = norm2(s);
    if ns == 0.0 || linalg::min_singular_value(s) <= tol.rank * ns {
        return Err(KreinError::SingularOperator);
    }
    let j = space.symmetry();
    if hermitian_defect(&(j * s)) > 1e-10 {
        return Err(KreinError::TheoremViolation {
            what: "JS is not Hermitian".into(),
            residual: hermitian_defect(&(j * s)),
            tolerance: 1e-10,
        });
    }
    if !classify_subspace(l_plus, tol).is_maximal_uniformly(Sign::Plus) {
        return Err(KreinError::NotMaximalDefinite("L₊ must be maximal uniformly positive".into()));
    }
    let image = Subspace::new(space, s * l_plus.basis(), tol)?;
    let image_maximal_positive = classify_subspace(&image, tol).is_maximal_uniformly(Sign::Plus);

    let b = l_plus.orthonormal_basis();
    let min_form = hermitian_extremes(&(b.adjoint() * j * s * &b)).0;
    let max_form = match orthogonal_companion(&image, tol)? {
        Some(c) => {
            let g = c.orthonormal_basis();
            hermitian_extremes(&(g.adjoint() * j * s * &g)).1
        }
        None => 0.0,
    };
    let slack = tol.pd * ns.max(1.0);
    Ok(OperatorConditions {
        image_maximal_positive,
        nonnegative_on_l_plus: min_form >= -slack,
        nonpositive_on_companion: max_form <= slack,
        min_form_on_l_plus: min_form,
        max_form_on_companion: max_form,
    })
}
