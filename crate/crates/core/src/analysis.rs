//! Full analysis of a frame: every quantity of the theory, each verdict next
//! to the tolerance it was held against.

use serde::{Deserialize, Serialize};

use crate::error::KreinError;
use crate::frames::{is_jframe, Frame};
use crate::genkit::reconstruction_residual;
use crate::io::{matrix_rows, Pair, SpaceSpec};
use crate::jframe::{
    block_rep_cork, block_rep_edinburgh, bounds_oracle_error, dual_frame, inverse_block_reps, jframe_bounds,
    jframe_operator, s_pm_block_reps, verify_operator_conditions, JFrameBounds,
};
use crate::krein::{orthogonal_companion, Subspace};
use crate::linalg::{norm2, CMat};
use crate::spectral::{
    check_membership, enclosure_cork, enclosure_edinburgh, enclosure_from_bounds, enclosure_strip, spectrum,
    EnclosureRegion, Membership, MembershipReport,
};
use crate::sqrtpolar::{default_contour, polar_decompose, riesz_dunford_sqrt, ContourSpec};
use crate::tol::{Check, Tolerances};

pub type Matrix = Vec<Vec<Pair>>;

/// How the analysis ended; maps onto the CLI exit codes 0, 2 and 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Pass,
    NotJFrame,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    /// `[fᵢ, fᵢ]` in input order.
    pub self_products: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Operators {
    pub s: Matrix,
    pub s_plus: Matrix,
    pub s_minus: Matrix,
    pub q: Matrix,
    pub s_inverse: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorkEntries {
    pub a: Matrix,
    pub k: Matrix,
    pub d: Matrix,
    pub d_plus_kak: Matrix,
    pub k_norm: f64,
    /// `(D + KᴴAK)⁻¹`
    pub z: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdinburghEntries {
    pub a_prime: Matrix,
    pub l: Matrix,
    pub d_prime: Matrix,
    pub a_plus_ldl: Matrix,
    pub l_norm: f64,
    /// `(A′ + LD′Lᴴ)⁻¹`
    pub y: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Pair>,
    pub is_real: Vec<bool>,
    pub real_part_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub region: EnclosureRegion,
    pub membership: MembershipReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourReport {
    pub center: f64,
    pub radius: f64,
    /// `(N, ‖P_N − P‖/‖P‖)` against the triangular root.
    pub errors: Vec<(usize, f64)>,
    /// `‖P_64² − S‖/‖S‖`
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqrtReport {
    pub p: Matrix,
    /// `‖P² − S‖/‖S‖` for the triangular root.
    pub residual: f64,
    pub sector_ok: bool,
    pub contour: Option<ContourReport>,
    /// Why no contour root was computed.
    pub contour_unavailable: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarReport {
    /// Columns in input order.
    pub u: Matrix,
    pub coisometry_residual: f64,
    pub reassembly_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualReport {
    pub signs_preserved: bool,
    pub operator_residual: f64,
    pub span_angle: f64,
    pub bounds_oracle_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub space: SpaceSpec,
    pub partition: Partition,
    pub is_jframe: bool,
    pub reasons: Vec<String>,
    pub operators: Option<Operators>,
    pub cork: Option<CorkEntries>,
    pub edinburgh: Option<EdinburghEntries>,
    pub bounds: Option<JFrameBounds>,
    pub spectrum: Option<SpectrumReport>,
    pub enclosures: Vec<Enclosure>,
    pub sqrt: Option<SqrtReport>,
    pub polar: Option<PolarReport>,
    pub dual: Option<DualReport>,
    pub reconstruction_residual: Option<f64>,
    /// Theorem checks; any failure is an implementation alarm.
    pub checks: Vec<Check>,
    /// Accuracy diagnostics that depend on conditioning (quadrature,
    /// reconstruction); reported, never fatal.
    pub advisories: Vec<Check>,
    /// Set when a stage aborted with an error.
    pub error: Option<String>,
    pub tolerances: Tolerances,
    pub outcome: Outcome,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn failing_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn rows(m: &CMat) -> Matrix {
    matrix_rows(m)
}

const RECONSTRUCTION_TRIALS: usize = 50;
const RECONSTRUCTION_SEED: u64 = 0x5eed;

pub fn analyze(frame: &Frame, tol: &Tolerances) -> AnalysisReport {
    let space = frame.space();
    let (plus, minus) = frame.partition();
    let jr = is_jframe(frame, tol);
    let mut report = AnalysisReport {
        space: SpaceSpec {
            p: space.p(),
            q: space.q(),
        },
        partition: Partition {
            plus,
            minus,
            self_products: frame.self_products().to_vec(),
        },
        is_jframe: jr.is_jframe,
        reasons: jr
            .failure_reason
            .as_deref()
            .map(|r| r.split("; ").map(str::to_string).collect())
            .unwrap_or_default(),
        operators: None,
        cork: None,
        edinburgh: None,
        bounds: None,
        spectrum: None,
        enclosures: Vec::new(),
        sqrt: None,
        polar: None,
        dual: None,
        reconstruction_residual: None,
        checks: Vec::new(),
        advisories: Vec::new(),
        error: None,
        tolerances: *tol,
        outcome: Outcome::Pass,
    };
    if !jr.is_jframe {
        report.outcome = Outcome::NotJFrame;
        return report;
    }
    report.checks.push(Check::at_most(
        "is_jframe agrees with the frame-bound characterization",
        if jr.bounds_route_ok && jr.direct_sum_ok { 0.0 } else { 1.0 },
        0.0,
    ));
    if let Err(e) = run_stages(frame, tol, &mut report) {
        report.checks.push(Check::at_most(format!("stage aborted: {e}"), 1.0, 0.0));
        report.error = Some(e.to_string());
    }
    if report.checks.iter().any(|c| !c.pass) {
        report.outcome = Outcome::Violation;
    }
    report
}

fn run_stages(frame: &Frame, tol: &Tolerances, report: &mut AnalysisReport) -> crate::Result<()> {
    let bundle = jframe_operator(frame, tol)?;
    report.checks.extend(bundle.checks.iter().cloned());
    let s_inv = bundle.inverse()?;
    report.operators = Some(Operators {
        s: rows(&bundle.s),
        s_plus: rows(&bundle.s_plus),
        s_minus: rows(&bundle.s_minus),
        q: rows(&bundle.q),
        s_inverse: rows(&s_inv),
    });

    let l_plus = orthogonal_companion(&bundle.m_minus, tol)?
        .ok_or_else(|| KreinError::NotMaximalDefinite("M₋^[⊥] is trivial".into()))?;
    let conditions = verify_operator_conditions(&bundle.s, &l_plus, tol)?;
    report.checks.push(Check::at_most(
        "S satisfies the J-frame operator conditions on M₋^[⊥]",
        if conditions.all() { 0.0 } else { 1.0 },
        0.0,
    ));
    let m_plus_comp = orthogonal_companion(&bundle.m_plus, tol)?
        .ok_or_else(|| KreinError::NotMaximalDefinite("M₊^[⊥] is trivial".into()))?;
    for (name, source, target) in [
        ("S(M₋^[⊥]) = M₊", &l_plus, &bundle.m_plus),
        ("S(M₊^[⊥]) = M₋", &m_plus_comp, &bundle.m_minus),
    ] {
        let image = Subspace::new(frame.space(), &bundle.s * source.basis(), tol)?;
        report.checks.push(Check::at_most(name, image.angle_to(target), tol.angle));
    }

    let cork = block_rep_cork(&bundle, tol)?;
    let edin = block_rep_edinburgh(&bundle, tol)?;
    report.checks.extend(cork.checks.iter().cloned());
    report.checks.extend(edin.checks.iter().cloned());
    report.checks.extend(s_pm_block_reps(&cork, &edin, &bundle));
    let inv = inverse_block_reps(&cork, &edin, &bundle)?;
    report.checks.extend(inv.checks.iter().cloned());
    report.cork = Some(CorkEntries {
        a: rows(&cork.a),
        k: rows(&cork.k),
        d: rows(&cork.d),
        d_plus_kak: rows(&cork.d_plus_kak),
        k_norm: norm2(&cork.k),
        z: rows(&inv.z),
    });
    report.edinburgh = Some(EdinburghEntries {
        a_prime: rows(&edin.a_prime),
        l: rows(&edin.l),
        d_prime: rows(&edin.d_prime),
        a_plus_ldl: rows(&edin.a_plus_ldl),
        l_norm: norm2(&edin.l),
        y: rows(&inv.y),
    });

    let bounds = jframe_bounds(&cork, &edin, &bundle, tol)?;
    report.bounds = Some(bounds);
    let dual = dual_frame(&bundle, tol)?;
    report.checks.extend(dual.checks.iter().cloned());
    let oracle = bounds_oracle_error(&bounds, frame, &dual.frame, tol)?;
    report.checks.push(Check::at_most("bounds: block entries vs frame-bound oracle", oracle, 1e-8));
    report.dual = Some(DualReport {
        signs_preserved: dual.signs_preserved,
        operator_residual: dual.operator_residual,
        span_angle: dual.span_angle,
        bounds_oracle_error: oracle,
    });

    let sigma = spectrum(&bundle.s, tol)?;
    report.spectrum = Some(SpectrumReport {
        eigenvalues: sigma.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
        is_real: sigma.is_real.clone(),
        real_part_min: sigma.real_part_min,
    });
    report.checks.push(Check::at_least("min Re λ > 0", sigma.real_part_min, f64::MIN_POSITIVE));
    for region in [
        enclosure_cork(&cork),
        enclosure_edinburgh(&edin),
        enclosure_strip(&cork, &edin),
        enclosure_from_bounds(&bounds),
    ] {
        let membership = check_membership(&sigma, &region, tol);
        let outside = membership.entries.iter().filter(|e| e.status == Membership::Outside).count();
        report.checks.push(Check::at_most(
            format!("σ(S) ⊂ {:?} region (eigenvalues outside)", region.source),
            outside as f64,
            0.0,
        ));
        report.enclosures.push(Enclosure { region, membership });
    }

    let polar = polar_decompose(&bundle, tol)?;
    report.checks.extend(polar.checks());
    let tri = &polar.sqrt;
    let p_norm = norm2(&tri.p);
    let mut sqrt = SqrtReport {
        p: rows(&tri.p),
        residual: tri.residual,
        sector_ok: tri.sector_ok,
        contour: None,
        contour_unavailable: None,
    };
    match default_contour(&sigma) {
        Ok(spec) => {
            let mut errors = Vec::new();
            let mut residual = f64::MAX;
            for nodes in [16, 32, 64] {
                let c = riesz_dunford_sqrt(&bundle.s, &ContourSpec { nodes, ..spec }, &sigma, frame.space())?;
                errors.push((nodes, norm2(&(&c.p - &tri.p)) / p_norm));
                residual = c.residual;
            }
            let decreasing = errors.windows(2).all(|w| w[1].1 < w[0].1);
            report.advisories.push(Check::at_most("contour (N = 64) vs triangular root, relative", errors[2].1, 1e-8));
            report.advisories.push(Check::at_most(
                "contour error strictly decreasing over N = 16, 32, 64",
                if decreasing { 0.0 } else { 1.0 },
                0.0,
            ));
            sqrt.contour = Some(ContourReport {
                center: spec.center,
                radius: spec.radius,
                errors,
                residual,
            });
        }
        Err(e @ KreinError::CannotEnclose(_)) => sqrt.contour_unavailable = Some(e.to_string()),
        Err(e) => return Err(e),
    }
    report.sqrt = Some(sqrt);
    report.polar = Some(PolarReport {
        u: rows(&frame.unpermute(&polar.u)),
        coisometry_residual: polar.coisometry_residual,
        reassembly_residual: polar.reassembly_residual,
    });

    let recon = reconstruction_residual(frame, &bundle, RECONSTRUCTION_TRIALS, RECONSTRUCTION_SEED)?;
    report.reconstruction_residual = Some(recon);
    report.advisories.push(Check::at_most("reconstruction formula, relative residual", recon, 1e-8));
    Ok(())
}
