//! Seeded random J-frames with controlled geometry, and the reconstruction
//! oracle used by the property suite.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};
use crate::frames::{is_jframe, Frame};
use crate::jframe::JFrameOperatorBundle;
use crate::krein::{AngularOperator, FundamentalDecomposition, KreinSpace, Sign, Subspace};
use crate::linalg::{hstack, norm2, svd, CMat, CVec, C64};
use crate::tol::Tolerances;

const MAX_ATTEMPTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub p: usize,
    pub q: usize,
    pub n_plus: usize,
    pub n_minus: usize,
    /// Norm of both angular operators.
    pub angular_norm_cap: f64,
    /// Largest admissible condition number of a coefficient matrix.
    pub conditioning_cap: f64,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(p: usize, q: usize, n_plus: usize, n_minus: usize, seed: u64) -> Self {
        Self {
            p,
            q,
            n_plus,
            n_minus,
            angular_norm_cap: 0.5,
            conditioning_cap: 1e3,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(KreinError::InvalidConfig(m));
        if self.p == 0 || self.q == 0 {
            return bad("p and q must be at least 1".into());
        }
        if self.n_plus < self.p || self.n_minus < self.q {
            return bad(format!(
                "frame sizes ({}, {}) must be at least (p, q) = ({}, {})",
                self.n_plus, self.n_minus, self.p, self.q
            ));
        }
        if !(0.0..=0.95).contains(&self.angular_norm_cap) {
            return bad(format!("angular_norm_cap {} outside [0, 0.95]", self.angular_norm_cap));
        }
        if !(1.0..=1e6).contains(&self.conditioning_cap) {
            return bad(format!("conditioning_cap {} outside [1, 1e6]", self.conditioning_cap));
        }
        Ok(())
    }
}

fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

fn contraction(rows: usize, cols: usize, norm: f64, rng: &mut ChaCha8Rng) -> CMat {
    let g = gaussian(rows, cols, rng);
    if norm == 0.0 {
        return CMat::zeros(rows, cols);
    }
    let n = norm2(&g);
    g * C64::new(norm / n, 0.0)
}

/// Haar-distributed `n × n` unitary.
pub fn haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMat {
    svd(&gaussian(n, n, rng)).0
}

/// `U·diag(s)·Vᴴ` with Haar-distributed singular vectors and singular values
/// log-uniform in `[cap^{-1/2}, cap^{1/2}]`, so the block-diagonal coefficient
/// matrix of both sides has condition number at most `cap`.
fn coefficients(rows: usize, cols: usize, cap: f64, rng: &mut ChaCha8Rng) -> CMat {
    let (u, _, v) = svd(&gaussian(rows, cols, rng));
    let half = 0.5 * cap.ln();
    let s = CMat::from_fn(rows, rows, |i, j| {
        if i == j {
            C64::new((half * (2.0 * rng.random::<f64>() - 1.0)).exp(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    u * s * v.columns(0, rows).adjoint()
}

/// Draws a J-frame: `M₋` is the graph of a contraction over the canonical
/// negative axes, `M₊` the graph of an independent contraction over
/// `M₋^[⊥]`, and the vectors are random surjective combinations of
/// orthonormal bases of both, shuffled.
pub fn random_jframe(cfg: &GenConfig) -> Result<Frame> {
    cfg.validate()?;
    let tol = Tolerances::default();
    let space = KreinSpace::new(cfg.p, cfg.q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..MAX_ATTEMPTS {
        if let Some(frame) = attempt(cfg, &space, &mut rng, &tol)? {
            return Ok(frame);
        }
    }
    Err(KreinError::GenerationExhausted { attempts: MAX_ATTEMPTS })
}

fn attempt(cfg: &GenConfig, space: &KreinSpace, rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<Option<Frame>> {
    let (p, q) = (cfg.p, cfg.q);
    let canonical = FundamentalDecomposition::canonical(space, tol)?;
    let g_minus = AngularOperator {
        matrix: contraction(p, q, cfg.angular_norm_cap, rng),
        norm: cfg.angular_norm_cap,
        over: Sign::Minus,
    };
    let m_minus = Subspace::new(space, g_minus.graph_basis(&canonical), tol)?;
    let decomp = FundamentalDecomposition::from_negative(&m_minus, tol)?;
    let g_plus = AngularOperator {
        matrix: contraction(q, p, cfg.angular_norm_cap, rng),
        norm: cfg.angular_norm_cap,
        over: Sign::Plus,
    };
    let m_plus = Subspace::new(space, g_plus.graph_basis(&decomp), tol)?;

    let c_plus = coefficients(p, cfg.n_plus, cfg.conditioning_cap, rng);
    let c_minus = coefficients(q, cfg.n_minus, cfg.conditioning_cap, rng);
    let vectors = hstack(
        &(m_plus.orthonormal_basis() * c_plus),
        &(m_minus.orthonormal_basis() * c_minus),
    );
    let mut columns: Vec<CVec> = vectors.column_iter().map(|c| c.into_owned()).collect();
    columns.shuffle(rng);
    let frame = Frame::new(space, columns)?;
    if frame.n_plus() != cfg.n_plus || !is_jframe(&frame, tol).is_jframe {
        return Ok(None);
    }
    Ok(Some(frame))
}

/// Worst relative residual of the reconstruction formulas
/// `f = Σ σᵢ[f, S⁻¹fᵢ]fᵢ` and `f = Σ σᵢ[f, fᵢ]S⁻¹fᵢ` over random `f`.
pub fn reconstruction_residual(frame: &Frame, bundle: &JFrameOperatorBundle, trials: usize, seed: u64) -> Result<f64> {
    let space = frame.space();
    let j = space.symmetry();
    let s_inv = bundle.inverse()?;
    // Columns σᵢ fᵢ and σᵢ S⁻¹fᵢ; [f, g] = gᴴJf.
    let signed = CMat::from_fn(space.dim(), frame.len(), |r, c| {
        frame.vectors()[c][r] * frame.sign(c).value()
    });
    let fv = CMat::from_fn(space.dim(), frame.len(), |r, c| frame.vectors()[c][r]);
    let dual = &s_inv * &fv;
    let first = &signed * (dual.adjoint() * j);
    let second = (&s_inv * &signed) * (fv.adjoint() * j);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let f = gaussian(space.dim(), 1, &mut rng);
        let nf = f.norm();
        for recon in [&first * &f, &second * &f] {
            worst = worst.max((&f - recon).norm() / nf);
        }
    }
    Ok(worst)
}
