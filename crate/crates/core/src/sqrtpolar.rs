//! Principal square root of `S`, Krein polar decomposition of synthesis
//! operators and synthesis of frames from a prescribed operator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};
use crate::frames::Frame;
use crate::jframe::JFrameOperatorBundle;
use crate::krein::{is_regular, krein_adjoint, selfadjoint_projection, KreinSpace, Sign, Subspace};
use crate::linalg::{complex_schur, hermitian_defect, norm2, re, CMat, C64};
use crate::spectral::SpectrumData;
use crate::tol::{Check, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SqrtMethod {
    Triangular,
    Contour,
}

#[derive(Debug, Clone)]
pub struct SqrtResult {
    pub p: CMat,
    pub method: SqrtMethod,
    /// `‖P² − S‖ / ‖S‖`
    pub residual: f64,
    /// Every eigenvalue of `P` has `|arg| < π/4`.
    pub sector_ok: bool,
    /// `‖JP − (JP)ᴴ‖ / ‖P‖`
    pub krein_selfadjoint_residual: f64,
}

impl SqrtResult {
    fn new(s: &CMat, p: CMat, method: SqrtMethod, eig_p: &[C64], space: &KreinSpace) -> Self {
        let residual = norm2(&(&p * &p - s)) / norm2(s);
        let sector_ok = eig_p
            .iter()
            .all(|z| z.re > 0.0 && z.im.abs() < z.re);
        let krein_selfadjoint_residual = hermitian_defect(&(space.symmetry() * &p));
        Self {
            p,
            method,
            residual,
            sector_ok,
            krein_selfadjoint_residual,
        }
    }

    pub fn checks(&self) -> Vec<Check> {
        let tag = match self.method {
            SqrtMethod::Triangular => "triangular",
            SqrtMethod::Contour => "contour",
        };
        vec![
            Check::at_most(format!("sqrt ({tag}): ‖P² − S‖/‖S‖"), self.residual, 1e-9),
            Check::at_most(
                format!("sqrt ({tag}): σ(P) outside |arg| < π/4"),
                if self.sector_ok { 0.0 } else { 1.0 },
                0.0,
            ),
            Check::at_most(
                format!("sqrt ({tag}): ‖JP − (JP)ᴴ‖/‖P‖"),
                self.krein_selfadjoint_residual,
                1e-9,
            ),
        ]
    }
}

/// Principal square root through a complex Schur form `S = QTQᴴ`: the
/// diagonal gets principal roots, the strict upper triangle follows from
/// `R² = T` solved one superdiagonal at a time.
pub fn principal_sqrt_triangular(s: &CMat, space: &KreinSpace) -> Result<SqrtResult> {
    let n = s.nrows();
    if n != space.dim() || s.ncols() != n {
        return Err(KreinError::DimensionMismatch {
            expected: space.dim(),
            found: s.nrows(),
        });
    }
    let (q, t) = complex_schur(s).ok_or(KreinError::EigenSolver)?;
    for i in 0..n {
        if t[(i, i)].re <= 0.0 {
            return Err(KreinError::SpectrumNotInRightHalfPlane {
                re: t[(i, i)].re,
                im: t[(i, i)].im,
            });
        }
    }
    let mut r = CMat::zeros(n, n);
    for i in 0..n {
        r[(i, i)] = t[(i, i)].sqrt();
    }
    for j in 1..n {
        for i in (0..j).rev() {
            let denom = r[(i, i)] + r[(j, j)];
            if denom.norm() <= 1e-14 * (1.0 + r[(i, i)].norm() + r[(j, j)].norm()) {
                return Err(KreinError::RecurrenceBreakdown(denom.norm()));
            }
            let mut acc = t[(i, j)];
            for k in i + 1..j {
                acc -= r[(i, k)] * r[(k, j)];
            }
            r[(i, j)] = acc / denom;
        }
    }
    let eig_p: Vec<C64> = (0..n).map(|i| r[(i, i)]).collect();
    let p = &q * r * q.adjoint();
    Ok(SqrtResult::new(s, p, SqrtMethod::Triangular, &eig_p, space))
}

/// Circle `c + r·e^{iθ}` sampled at `nodes` equispaced angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub center: f64,
    pub radius: f64,
    pub nodes: usize,
}

/// Trapezoidal rule for `(1/2πi) ∮ z^{1/2} (z − S)⁻¹ dz` on a circle.
pub fn riesz_dunford_sqrt(s: &CMat, spec: &ContourSpec, sigma: &SpectrumData, space: &KreinSpace) -> Result<SqrtResult> {
    let n = s.nrows();
    if spec.nodes < 16 {
        return Err(KreinError::InvalidContour(format!("{} nodes (need ≥ 16)", spec.nodes)));
    }
    if !(spec.radius > 0.0) || spec.center - spec.radius <= 0.0 {
        return Err(KreinError::InvalidContour(format!(
            "circle c = {}, r = {} leaves the open right half-plane",
            spec.center, spec.radius
        )));
    }
    let c = re(spec.center);
    let mut closest = f64::INFINITY;
    for &z in &sigma.eigenvalues {
        let d = spec.radius - (z - c).norm();
        if d <= 0.0 {
            return Err(KreinError::ContourDoesNotEnclose { re: z.re, im: z.im });
        }
        closest = closest.min(d);
    }
    if closest < 1e-3 * spec.radius {
        return Err(KreinError::ContourTooClose {
            distance: closest,
            limit: 1e-3 * spec.radius,
        });
    }
    let mut acc = CMat::zeros(n, n);
    let id = CMat::identity(n, n);
    for k in 0..spec.nodes {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / spec.nodes as f64;
        let w = C64::from_polar(spec.radius, theta);
        let z = c + w;
        let res = (&id * z - s).lu().try_inverse().ok_or(KreinError::SingularOperator)?;
        acc += res * (z.sqrt() * w);
    }
    let p = acc / re(spec.nodes as f64);
    let eig_p: Vec<C64> = sigma.eigenvalues.iter().map(|z| z.sqrt()).collect();
    Ok(SqrtResult::new(s, p, SqrtMethod::Contour, &eig_p, space))
}

/// A circle around the spectrum: centered at `(min Re λ + max |λ|)/2`,
/// radius balancing the eigenvalue margin against the distance to the branch
/// point, with `c − r ≥ ½ min Re λ`. Fails when no circle keeps every
/// eigenvalue at least 10% of `r` inside.
pub fn default_contour(sigma: &SpectrumData) -> Result<ContourSpec> {
    let m = sigma.real_part_min;
    if !(m > 0.0) {
        let z = sigma
            .eigenvalues
            .iter()
            .copied()
            .min_by(|a, b| a.re.total_cmp(&b.re))
            .unwrap_or_default();
        return Err(KreinError::SpectrumNotInRightHalfPlane { re: z.re, im: z.im });
    }
    let big = sigma.max_modulus();
    let c = 0.5 * (m + big);
    let rho = sigma
        .eigenvalues
        .iter()
        .map(|z| (z - re(c)).norm())
        .fold(0.0, f64::max);
    let r_hi = c - 0.5 * m;
    let r = (rho / 0.75).max((rho * c).sqrt()).max(0.5 * c).min(r_hi);
    if rho > 0.9 * r * (1.0 + 1e-12) {
        return Err(KreinError::CannotEnclose(format!(
            "spectrum spread {rho:.3e} around c = {c:.3e} needs r ≥ {:.3e}, but c − r ≥ {:.3e} caps r at {r_hi:.3e}",
            rho / 0.9,
            0.5 * m
        )));
    }
    Ok(ContourSpec {
        center: c,
        radius: r,
        nodes: 64,
    })
}

#[derive(Debug, Clone)]
pub struct PolarResult {
    pub sqrt: SqrtResult,
    /// `P⁻¹T`, columns in the frame's sign-sorted order.
    pub u: CMat,
    /// `‖UU⁺ − I‖`
    pub coisometry_residual: f64,
    /// `‖PU − T‖ / ‖T‖`
    pub reassembly_residual: f64,
    /// `N(T)^[⊥]` in `ℓ₂` with the partition-induced product.
    pub initial_space: Subspace,
    /// Self-adjoint projection onto the initial space.
    pub initial_projection: CMat,
    /// `‖U⁺U − E‖`
    pub initial_projection_residual: f64,
}

impl PolarResult {
    pub fn checks(&self) -> Vec<Check> {
        let mut out = self.sqrt.checks();
        out.push(Check::at_most("polar: ‖UU⁺ − I‖", self.coisometry_residual, 1e-10));
        out.push(Check::at_most("polar: ‖PU − T‖/‖T‖", self.reassembly_residual, 1e-10));
        out.push(Check::at_most("polar: ‖U⁺U − E‖", self.initial_projection_residual, 1e-9));
        out
    }
}

/// `T = S^{1/2} U` with `U` a Krein co-isometry.
pub fn polar_decompose(bundle: &JFrameOperatorBundle, tol: &Tolerances) -> Result<PolarResult> {
    let frame = &bundle.frame;
    let space = frame.space();
    let ell2 = frame.ell2();
    let t = frame.synthesis();
    let sqrt = principal_sqrt_triangular(&bundle.s, space)?;
    let u = sqrt.p.clone().lu().solve(t).ok_or(KreinError::SingularOperator)?;
    let up = krein_adjoint(&u, ell2, space)?;
    let n = space.dim();
    let coisometry_residual = norm2(&(&u * &up - CMat::identity(n, n)));
    let reassembly_residual = norm2(&(&sqrt.p * &u - t)) / norm2(t);

    let tp = krein_adjoint(t, ell2, space)?;
    let initial_space = Subspace::span(ell2, &tp, tol)?.ok_or(KreinError::NonRegularKernel)?;
    if !is_regular(&initial_space, tol) {
        return Err(KreinError::NonRegularKernel);
    }
    let initial_projection = selfadjoint_projection(&initial_space, tol)?;
    let initial_projection_residual = norm2(&(&up * &u - &initial_projection));
    Ok(PolarResult {
        sqrt,
        u,
        coisometry_residual,
        reassembly_residual,
        initial_space,
        initial_projection,
        initial_projection_residual,
    })
}

/// The partial isometry `W = U₁⁺U₂` with `T₂ = T₁W`.
#[derive(Debug, Clone)]
pub struct FrameConnection {
    /// `N₂ × N₁`-shaped map from `ℓ₂(N₂)` to `ℓ₂(N₁)` (rows follow frame 1's
    /// sign-sorted order, columns frame 2's).
    pub w: CMat,
    pub checks: Vec<Check>,
}

pub fn connect_two_frames(b1: &JFrameOperatorBundle, b2: &JFrameOperatorBundle, tol: &Tolerances) -> Result<FrameConnection> {
    let ns = b1.norm();
    let gap = norm2(&(&b1.s - &b2.s)) / ns;
    if gap > 1e-10 {
        return Err(KreinError::OperatorMismatch { residual: gap });
    }
    let space = b1.space();
    let (l1, l2) = (b1.frame.ell2(), b2.frame.ell2());
    let p1 = polar_decompose(b1, tol)?;
    let p2 = polar_decompose(b2, tol)?;
    let w = krein_adjoint(&p1.u, l1, space)? * &p2.u;
    let wp = krein_adjoint(&w, l2, l1)?;
    let t1 = b1.frame.synthesis();
    let t2 = b2.frame.synthesis();
    let checks = vec![
        Check::at_most("connect: ‖T₁W − T₂‖/‖T₂‖", norm2(&(t1 * &w - t2)) / norm2(t2), 1e-10),
        Check::at_most("connect: ‖WW⁺ − E₁‖", norm2(&(&w * &wp - &p1.initial_projection)), 1e-9),
        Check::at_most("connect: ‖W⁺W − E₂‖", norm2(&(&wp * &w - &p2.initial_projection)), 1e-9),
        Check::at_most("connect: ‖WW⁺W − W‖", norm2(&(&w * &wp * &w - &w)), 1e-10),
    ];
    Ok(FrameConnection { w, checks })
}

/// `exp(G)` for a J-skew-Hermitian generator (`(JG)ᴴ = −JG`), checked to be
/// J-unitary.
pub fn j_unitary_from_generator(space: &KreinSpace, g: &CMat) -> Result<CMat> {
    let n = space.dim();
    let jg = space.symmetry() * g;
    let skew = norm2(&(&jg + jg.adjoint()));
    if skew > 1e-12 * norm2(g).max(1.0) {
        return Err(KreinError::InvalidConfig(format!("generator is not J-skew-Hermitian ({skew:.3e})")));
    }
    let v = g.clone().exp();
    let vp = krein_adjoint(&v, space, space)?;
    let defect = norm2(&(&vp * &v - CMat::identity(n, n)));
    if defect > 1e-10 * norm2(&v).max(1.0) {
        return Err(KreinError::TheoremViolation {
            what: "V⁺V = I".into(),
            residual: defect,
            tolerance: 1e-10,
        });
    }
    Ok(v)
}

fn random_generator(space: &KreinSpace, rng: &mut ChaCha8Rng) -> CMat {
    let n = space.dim();
    let normal = Normal::new(0.0, 0.5).expect("valid normal");
    // X skew-Hermitian with Gaussian entries; G = JX is J-skew-Hermitian.
    let mut x = CMat::zeros(n, n);
    for i in 0..n {
        x[(i, i)] = C64::new(0.0, normal.sample(rng));
        for j in i + 1..n {
            let z = C64::new(normal.sample(rng), normal.sample(rng));
            x[(i, j)] = z;
            x[(j, i)] = -z.conj();
        }
    }
    space.symmetry() * x
}

/// Random J-unitary `exp(JX)` with `X` skew-Hermitian, entries of scale ½.
pub fn random_j_unitary(space: &KreinSpace, seed: u64) -> Result<CMat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    j_unitary_from_generator(space, &random_generator(space, &mut rng))
}

/// Diagnostics for a synthesized family whose realized signs disagree with
/// the prescribed `ℓ₂` partition.
#[derive(Debug, Clone)]
pub struct PartitionMismatch {
    pub frame: Frame,
    /// Column indices whose sign differs from the prescription.
    pub mismatched: Vec<usize>,
    /// Whether the family is a J-frame under its own (realized) partition.
    /// A neutral column can match the prescribed sign and still leave
    /// `R(T₊)` short of uniformly positive.
    pub is_jframe: bool,
    /// `‖TT⁺ − S‖ / ‖S‖` under the prescribed partition.
    pub operator_residual: f64,
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    pub frame: Frame,
    /// `‖TT⁺ − S‖ / ‖S‖`
    pub operator_residual: f64,
}

/// Builds a frame with J-frame operator `S` from a Krein co-isometry
/// `U = W_H V₀⁺ W_ℓ`, where `V₀` embeds the canonical axes into `ℓ₂` and the
/// `W` are random J-unitaries (identity when `seed` is `None`).
pub fn synthesize_from_operator(
    s: &CMat,
    space: &KreinSpace,
    n_plus: usize,
    n_minus: usize,
    seed: Option<u64>,
    tol: &Tolerances,
) -> Result<Synthesis> {
    let (p, q) = (space.p(), space.q());
    if n_plus < p || n_minus < q {
        return Err(KreinError::InvalidConfig(format!(
            "frame sizes ({n_plus}, {n_minus}) must be at least the signature ({p}, {q})"
        )));
    }
    let n = space.dim();
    if s.nrows() != n || s.ncols() != n {
        return Err(KreinError::DimensionMismatch {
            expected: n,
            found: s.nrows(),
        });
    }
    let ell2 = KreinSpace::new(n_plus, n_minus)?;
    let big_n = n_plus + n_minus;
    let mut v0 = CMat::zeros(big_n, n);
    for i in 0..p {
        v0[(i, i)] = re(1.0);
    }
    for j in 0..q {
        v0[(n_plus + j, p + j)] = re(1.0);
    }
    let mut u = krein_adjoint(&v0, space, &ell2)?;
    if let Some(seed) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let wh = j_unitary_from_generator(space, &random_generator(space, &mut rng))?;
        let wl = j_unitary_from_generator(&ell2, &random_generator(&ell2, &mut rng))?;
        u = wh * u * wl;
    }
    let root = principal_sqrt_triangular(s, space)?;
    let t = &root.p * u;
    let operator_residual = norm2(&(&t * krein_adjoint(&t, &ell2, space)? - s)) / norm2(s);
    if operator_residual > 1e-9 {
        return Err(KreinError::TheoremViolation {
            what: "TT⁺ = S".into(),
            residual: operator_residual,
            tolerance: 1e-9,
        });
    }
    let frame = Frame::from_columns(space, &t)?;
    let mismatched: Vec<usize> = (0..big_n)
        .filter(|&i| {
            let prescribed = if i < n_plus { Sign::Plus } else { Sign::Minus };
            frame.sign(i) != prescribed
        })
        .collect();
    let report = crate::frames::is_jframe(&frame, tol);
    if !mismatched.is_empty() || !report.is_jframe {
        return Err(KreinError::SignPartitionMismatch(Box::new(PartitionMismatch {
            frame,
            mismatched,
            is_jframe: report.is_jframe,
            operator_residual,
        })));
    }
    Ok(Synthesis {
        frame,
        operator_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jframe::jframe_operator;
    use crate::linalg::{real_matrix, real_vector};
    use crate::spectral::spectrum;

    fn re1_s() -> CMat {
        real_matrix(&[&[0.0, 2.0], &[-2.0, 4.0]])
    }

    fn re1_root() -> CMat {
        real_matrix(&[&[0.5, 0.5], &[-0.5, 1.5]]) * re(2f64.sqrt())
    }

    fn h11() -> KreinSpace {
        KreinSpace::new(1, 1).unwrap()
    }

    #[test]
    fn triangular_examples() {
        let r = principal_sqrt_triangular(&re1_s(), &h11()).unwrap();
        assert!(norm2(&(&r.p - re1_root())) < 1e-12);
        assert!(r.sector_ok && r.residual < 1e-15 && r.krein_selfadjoint_residual < 1e-14);

        let id = principal_sqrt_triangular(&CMat::identity(3, 3), &KreinSpace::new(2, 1).unwrap()).unwrap();
        assert!(norm2(&(&id.p - CMat::identity(3, 3))) < 1e-15);

        let hil = KreinSpace::hilbert(2).unwrap();
        let d = principal_sqrt_triangular(&real_matrix(&[&[4.0, 0.0], &[0.0, 9.0]]), &hil).unwrap();
        assert!(norm2(&(&d.p - real_matrix(&[&[2.0, 0.0], &[0.0, 3.0]]))) < 1e-14);
    }

    #[test]
    fn triangular_rejects_left_half_plane() {
        let hil = KreinSpace::hilbert(2).unwrap();
        let s = real_matrix(&[&[-1.0, 0.0], &[0.0, 2.0]]);
        assert!(matches!(
            principal_sqrt_triangular(&s, &hil),
            Err(KreinError::SpectrumNotInRightHalfPlane { .. })
        ));
    }

    #[test]
    fn contour_re1_and_convergence() {
        let tol = Tolerances::default();
        let s = re1_s();
        let sigma = spectrum(&s, &tol).unwrap();
        let err = |nodes| {
            let spec = ContourSpec {
                center: 2.0,
                radius: 1.5,
                nodes,
            };
            let r = riesz_dunford_sqrt(&s, &spec, &sigma, &h11()).unwrap();
            norm2(&(&r.p - re1_root())) / norm2(&re1_root())
        };
        let (e16, e32, e64) = (err(16), err(32), err(64));
        assert!(e64 <= 1e-8, "{e64:e}");
        assert!(e16 > e32 && e32 > e64, "{e16:e} {e32:e} {e64:e}");
    }

    #[test]
    fn contour_identity() {
        let tol = Tolerances::default();
        let id = CMat::identity(2, 2);
        let sigma = spectrum(&id, &tol).unwrap();
        let spec = ContourSpec {
            center: 1.0,
            radius: 0.5,
            nodes: 64,
        };
        let r = riesz_dunford_sqrt(&id, &spec, &sigma, &h11()).unwrap();
        assert!(norm2(&(&r.p - &id)) < 1e-14);
    }

    #[test]
    fn contour_rejects_bad_circles() {
        let tol = Tolerances::default();
        let s = re1_s();
        let sigma = spectrum(&s, &tol).unwrap();
        let bad = |c, r, nodes| riesz_dunford_sqrt(&s, &ContourSpec { center: c, radius: r, nodes }, &sigma, &h11());
        assert!(matches!(bad(2.0, 1.5, 8), Err(KreinError::InvalidContour(_))));
        assert!(matches!(bad(1.0, 1.5, 32), Err(KreinError::InvalidContour(_))));
        assert!(matches!(bad(3.0, 0.5, 32), Err(KreinError::ContourDoesNotEnclose { .. })));
        assert!(matches!(bad(2.5, 0.5004, 32), Err(KreinError::ContourTooClose { .. })));
    }

    fn sigma_of(values: &[f64]) -> SpectrumData {
        let n = values.len();
        let d = CMat::from_fn(n, n, |i, j| if i == j { re(values[i]) } else { re(0.0) });
        spectrum(&d, &Tolerances::default()).unwrap()
    }

    #[test]
    fn default_contour_examples() {
        let c = default_contour(&sigma_of(&[2.0, 2.0])).unwrap();
        assert!(c.center - c.radius >= 1.0 && (2.0 - c.center).abs() <= 0.75 * c.radius);
        let c = default_contour(&sigma_of(&[1.0])).unwrap();
        assert_eq!((c.center, c.radius), (1.0, 0.5));
        let c = default_contour(&sigma_of(&[1.0, 10.0])).unwrap();
        assert_eq!(c.center, 5.5);
        assert!(c.center - c.radius > 0.0);
        assert!(default_contour(&sigma_of(&[1.0, 100.0])).is_err());
        assert!(default_contour(&sigma_of(&[-1.0, 2.0])).is_err());
    }

    #[test]
    fn polar_re1() {
        let tol = Tolerances::default();
        let h = h11();
        let f = Frame::new(&h, vec![real_vector(&[1.0, 0.0]), real_vector(&[1.0, 2.0])]).unwrap();
        let b = jframe_operator(&f, &tol).unwrap();
        let pr = polar_decompose(&b, &tol).unwrap();
        let u = real_matrix(&[&[0.75, 0.25], &[0.25, 0.75]]) * re(2f64.sqrt());
        assert!(norm2(&(&pr.u - u)) < 1e-12);
        assert!(pr.coisometry_residual < 1e-14);
        let up = krein_adjoint(&pr.u, f.ell2(), &h).unwrap();
        assert!(norm2(&(up * &pr.u - CMat::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn polar_canonical() {
        let tol = Tolerances::default();
        let h = h11();
        let f = Frame::from_columns(&h, &CMat::identity(2, 2)).unwrap();
        let pr = polar_decompose(&jframe_operator(&f, &tol).unwrap(), &tol).unwrap();
        assert!(norm2(&(&pr.u - CMat::identity(2, 2))) < 1e-15);
    }

    #[test]
    fn connect_re1_with_itself_and_rotated() {
        let tol = Tolerances::default();
        let h = h11();
        let f = Frame::new(&h, vec![real_vector(&[1.0, 0.0]), real_vector(&[1.0, 2.0])]).unwrap();
        let b = jframe_operator(&f, &tol).unwrap();
        let c = connect_two_frames(&b, &b, &tol).unwrap();
        assert!(norm2(&(&c.w - CMat::identity(2, 2))) < 1e-13);

        let t = 0.3f64;
        let v = real_matrix(&[&[t.cosh(), t.sinh()], &[t.sinh(), t.cosh()]]);
        let f2 = Frame::from_columns(&h, &(f.synthesis() * &v)).unwrap();
        let b2 = jframe_operator(&f2, &tol).unwrap();
        let c = connect_two_frames(&b, &b2, &tol).unwrap();
        assert!(norm2(&(&c.w - v)) < 1e-12);
        assert!(c.checks.iter().all(|c| c.pass), "{:?}", c.checks);
    }

    #[test]
    fn hyperbolic_rotation() {
        let h = h11();
        let t = 0.7f64;
        let g = real_matrix(&[&[0.0, t], &[t, 0.0]]);
        let v = j_unitary_from_generator(&h, &g).unwrap();
        let expect = real_matrix(&[&[t.cosh(), t.sinh()], &[t.sinh(), t.cosh()]]);
        assert!(norm2(&(&v - expect)) < 1e-14);
        let zero = j_unitary_from_generator(&h, &CMat::zeros(2, 2)).unwrap();
        assert_eq!(zero, CMat::identity(2, 2));
        let inv = j_unitary_from_generator(&h, &(-g)).unwrap();
        assert!(norm2(&(v * inv - CMat::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn random_j_unitary_is_deterministic() {
        let h = KreinSpace::new(2, 2).unwrap();
        let a = random_j_unitary(&h, 11).unwrap();
        let b = random_j_unitary(&h, 11).unwrap();
        assert_eq!(a, b);
        let ap = krein_adjoint(&a, &h, &h).unwrap();
        assert!(norm2(&(ap * &a - CMat::identity(4, 4))) < 1e-10);
    }

    #[test]
    fn synthesize_identity_and_re1() {
        let tol = Tolerances::default();
        let h = h11();
        let syn = synthesize_from_operator(&CMat::identity(2, 2), &h, 1, 1, None, &tol).unwrap();
        assert_eq!(syn.frame.synthesis(), &CMat::identity(2, 2));

        // T = S^{1/2} has a neutral first column: [Pe₁, Pe₁] = [Se₁, e₁] = 0.
        match synthesize_from_operator(&re1_s(), &h, 1, 1, None, &tol) {
            Err(KreinError::SignPartitionMismatch(m)) => {
                assert!(!m.is_jframe && m.operator_residual < 1e-12)
            }
            other => panic!("{other:?}"),
        }
        let syn = (0..20)
            .find_map(|seed| synthesize_from_operator(&re1_s(), &h, 1, 1, Some(seed), &tol).ok())
            .unwrap();
        let b = jframe_operator(&syn.frame, &tol).unwrap();
        assert!(norm2(&(&b.s - re1_s())) < 1e-9 * 4.0);

        // Redundant sizes: TT⁺ = S holds whether or not the realized signs
        // reproduce the prescribed partition.
        for seed in 0..20 {
            match synthesize_from_operator(&re1_s(), &h, 3, 1, Some(seed), &tol) {
                Ok(syn) => assert!(syn.operator_residual < 1e-9),
                Err(KreinError::SignPartitionMismatch(m)) => {
                    assert_eq!(m.frame.len(), 4);
                    assert!(m.operator_residual < 1e-9);
                }
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn synthesize_rejects_small_sizes() {
        let tol = Tolerances::default();
        let r = synthesize_from_operator(&re1_s(), &h11(), 0, 1, None, &tol);
        assert!(matches!(r, Err(KreinError::InvalidConfig(_))));
    }
}
