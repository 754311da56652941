//! Spectrum of `S`, Schur complements and the enclosure regions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{KreinError, Result};
use crate::jframe::{BlockRepCork, BlockRepEdinburgh, JFrameBounds};
use crate::linalg::{eigenvalues, hermitian_eigenvalues, hermitian_extremes, inverse, norm2, re, CMat, C64};
use crate::tol::Tolerances;

/// Eigenvalues of `S` with multiplicity, sorted by real then imaginary part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumData {
    pub eigenvalues: Vec<C64>,
    pub real_part_min: f64,
    pub is_real: Vec<bool>,
    /// `max_λ min_μ |conj(λ) − μ|` over the computed spectrum.
    pub conjugate_gap: f64,
}

impl SpectrumData {
    pub fn max_modulus(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Smallest distance from `z` to the spectrum.
    pub fn distance(&self, z: C64) -> f64 {
        self.eigenvalues.iter().map(|l| (l - z).norm()).fold(f64::INFINITY, f64::min)
    }
}

pub fn spectrum(s: &CMat, tol: &Tolerances) -> Result<SpectrumData> {
    if s.nrows() != s.ncols() || s.nrows() == 0 {
        return Err(KreinError::DimensionMismatch {
            expected: s.nrows(),
            found: s.ncols(),
        });
    }
    let mut eigenvalues = eigenvalues(s).ok_or(KreinError::EigenSolver)?;
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let is_real = eigenvalues
        .iter()
        .map(|z| z.im.abs() <= tol.real * (1.0 + z.norm()))
        .collect();
    let real_part_min = eigenvalues.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let conjugate_gap = eigenvalues
        .iter()
        .map(|l| {
            eigenvalues
                .iter()
                .map(|m| (l.conj() - m).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    Ok(SpectrumData {
        eigenvalues,
        real_part_min,
        is_real,
        conjugate_gap,
    })
}

fn resolvent_gap(h: &CMat, lambda: C64) -> f64 {
    hermitian_eigenvalues(h)
        .iter()
        .map(|&e| (re(e) - lambda).norm())
        .fold(f64::INFINITY, f64::min)
}

/// `S₂(λ) = D − λ + KᴴA(A − λ)⁻¹AK`.
pub fn schur_complement_2(rep: &BlockRepCork, lambda: C64) -> Result<CMat> {
    let p = rep.a.nrows();
    let q = rep.d.nrows();
    if resolvent_gap(&rep.a, lambda) <= 1e-12 * (1.0 + lambda.norm()) {
        return Err(KreinError::LambdaInBlockSpectrum {
            re: lambda.re,
            im: lambda.im,
        });
    }
    let shifted = &rep.a - CMat::identity(p, p) * lambda;
    let res = inverse(&shifted).ok_or(KreinError::LambdaInBlockSpectrum {
        re: lambda.re,
        im: lambda.im,
    })?;
    let ak = &rep.a * &rep.k;
    Ok(&rep.d - CMat::identity(q, q) * lambda + ak.adjoint() * res * ak)
}

/// `S₁(λ) = A′ − λ + LD′(D′ − λ)⁻¹D′Lᴴ`.
pub fn schur_complement_1(rep: &BlockRepEdinburgh, lambda: C64) -> Result<CMat> {
    let p = rep.a_prime.nrows();
    let q = rep.d_prime.nrows();
    if resolvent_gap(&rep.d_prime, lambda) <= 1e-12 * (1.0 + lambda.norm()) {
        return Err(KreinError::LambdaInBlockSpectrum {
            re: lambda.re,
            im: lambda.im,
        });
    }
    let shifted = &rep.d_prime - CMat::identity(q, q) * lambda;
    let res = inverse(&shifted).ok_or(KreinError::LambdaInBlockSpectrum {
        re: lambda.re,
        im: lambda.im,
    })?;
    let ld = &rep.l * &rep.d_prime;
    Ok(&rep.a_prime - CMat::identity(p, p) * lambda + &ld * res * ld.adjoint())
}

/// Which result a region comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionSource {
    /// Numerical ranges of the `(M₋^[⊥], M₋)` blocks.
    Cork,
    /// Numerical ranges of the `(M₊, M₊^[⊥])` blocks.
    Edinburgh,
    /// The eight J-frame bounds.
    Bounds,
    /// `|Im λ| ≤ ‖AK‖` and `|Im λ| ≤ ‖LD′‖`.
    ImaginaryStrip,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: f64,
    pub radius: f64,
    pub open: bool,
}

/// A conjunction of primitive sets. The non-real part of the spectrum must
/// lie in every disk, the half-plane and the strip; the real part in the
/// interval. Absent constraints are vacuous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnclosureRegion {
    pub source: RegionSource,
    pub disks: Vec<Disk>,
    pub halfplane_re_gt: Option<f64>,
    pub real_interval: Option<(f64, f64)>,
    pub imag_abs_le: Option<f64>,
    pub params: BTreeMap<String, f64>,
}

fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub fn enclosure_cork(rep: &BlockRepCork) -> EnclosureRegion {
    let (a_lo, a_hi) = hermitian_extremes(&rep.a);
    let (d_lo, d_hi) = hermitian_extremes(&rep.d);
    let (b_lo, b_hi) = hermitian_extremes(&rep.d_plus_kak);
    EnclosureRegion {
        source: RegionSource::Cork,
        disks: vec![Disk {
            center: a_hi,
            radius: a_hi,
            open: true,
        }],
        halfplane_re_gt: Some(b_lo / 2.0),
        real_interval: Some((a_lo.min(b_lo), a_hi.max(d_hi))),
        imag_abs_le: None,
        params: params(&[
            ("a-", a_lo),
            ("a+", a_hi),
            ("d-", d_lo),
            ("d+", d_hi),
            ("b-", b_lo),
            ("b+", b_hi),
        ]),
    }
}

pub fn enclosure_edinburgh(rep: &BlockRepEdinburgh) -> EnclosureRegion {
    let (a_lo, a_hi) = hermitian_extremes(&rep.a_prime);
    let (d_lo, d_hi) = hermitian_extremes(&rep.d_prime);
    let (b_lo, b_hi) = hermitian_extremes(&rep.a_plus_ldl);
    EnclosureRegion {
        source: RegionSource::Edinburgh,
        disks: vec![Disk {
            center: d_hi,
            radius: d_hi,
            open: true,
        }],
        halfplane_re_gt: Some(b_lo / 2.0),
        real_interval: Some((d_lo.min(b_lo), a_hi.max(d_hi))),
        imag_abs_le: None,
        params: params(&[
            ("a'-", a_lo),
            ("a'+", a_hi),
            ("d'-", d_lo),
            ("d'+", d_hi),
            ("b'-", b_lo),
            ("b'+", b_hi),
        ]),
    }
}

/// Strip `|Im λ| ≤ min(‖AK‖, ‖LD′‖)` for the non-real spectrum.
pub fn enclosure_strip(rep_c: &BlockRepCork, rep_e: &BlockRepEdinburgh) -> EnclosureRegion {
    let ak = norm2(&(&rep_c.a * &rep_c.k));
    let ld = norm2(&(&rep_e.l * &rep_e.d_prime));
    EnclosureRegion {
        source: RegionSource::ImaginaryStrip,
        disks: Vec::new(),
        halfplane_re_gt: None,
        real_interval: None,
        imag_abs_le: Some(ak.min(ld)),
        params: params(&[("‖AK‖", ak), ("‖LD'‖", ld)]),
    }
}

pub fn enclosure_from_bounds(b: &JFrameBounds) -> EnclosureRegion {
    let eps_lo = (1.0 / b.delta_plus)
        .min(b.alpha_minus)
        .max((1.0 / b.delta_minus).min(b.alpha_plus));
    let eps_hi = (1.0 / b.gamma_plus)
        .max(b.beta_minus)
        .min((1.0 / b.gamma_minus).max(b.beta_plus));
    let alpha = b.alpha_plus.max(b.alpha_minus);
    let gamma = b.gamma_plus.max(b.gamma_minus);
    EnclosureRegion {
        source: RegionSource::Bounds,
        disks: vec![Disk {
            center: 1.0 / gamma,
            radius: 1.0 / gamma,
            open: true,
        }],
        halfplane_re_gt: Some(alpha / 2.0),
        real_interval: Some((eps_lo, eps_hi)),
        imag_abs_le: None,
        params: params(&[
            ("ε-", eps_lo),
            ("ε+", eps_hi),
            ("α", alpha),
            ("γ", gamma),
            ("α+", b.alpha_plus),
            ("α-", b.alpha_minus),
            ("γ+", b.gamma_plus),
            ("γ-", b.gamma_minus),
        ]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Membership {
    Inside,
    BoundaryContact,
    Outside,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipEntry {
    pub lambda: C64,
    pub real: bool,
    pub status: Membership,
    /// Smallest signed distance to the boundary of any active constraint
    /// (positive inside).
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub source: RegionSource,
    pub entries: Vec<MembershipEntry>,
    /// No eigenvalue is outside (boundary contact is tolerated).
    pub contained: bool,
}

fn classify_margin(margin: f64, slack: f64, open: bool) -> Membership {
    if margin > slack || (!open && margin >= 0.0) {
        Membership::Inside
    } else if margin >= -slack {
        Membership::BoundaryContact
    } else {
        Membership::Outside
    }
}

/// Per-eigenvalue containment with slack `encl · (1 + |λ|)`.
pub fn check_membership(spec: &SpectrumData, region: &EnclosureRegion, tol: &Tolerances) -> MembershipReport {
    let entries: Vec<MembershipEntry> = spec
        .eigenvalues
        .iter()
        .zip(&spec.is_real)
        .map(|(&lambda, &real)| {
            let slack = tol.encl * (1.0 + lambda.norm());
            // (margin, open) per active constraint
            let mut margins: Vec<(f64, bool)> = Vec::new();
            if real {
                if let Some((lo, hi)) = region.real_interval {
                    margins.push(((lambda.re - lo).min(hi - lambda.re), false));
                }
            } else {
                for d in &region.disks {
                    margins.push((d.radius - (lambda - re(d.center)).norm(), d.open));
                }
                if let Some(h) = region.halfplane_re_gt {
                    margins.push((lambda.re - h, true));
                }
                if let Some(s) = region.imag_abs_le {
                    margins.push((s - lambda.im.abs(), false));
                }
            }
            let status = margins
                .iter()
                .map(|&(m, open)| classify_margin(m, slack, open))
                .max()
                .unwrap_or(Membership::Inside);
            let margin = margins.iter().map(|m| m.0).fold(f64::INFINITY, f64::min);
            MembershipEntry {
                lambda,
                real,
                status,
                margin: if margin.is_finite() { margin } else { f64::MAX },
            }
        })
        .collect();
    let contained = entries.iter().all(|e| e.status != Membership::Outside);
    MembershipReport {
        source: region.source,
        entries,
        contained,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::Frame;
    use crate::jframe::{block_rep_cork, block_rep_edinburgh, jframe_bounds, jframe_operator};
    use crate::krein::KreinSpace;
    use crate::linalg::{min_singular_value, real_matrix, real_vector};

    struct Re1 {
        spec: SpectrumData,
        cork: BlockRepCork,
        edin: BlockRepEdinburgh,
        bounds: JFrameBounds,
    }

    fn re1() -> Re1 {
        let tol = Tolerances::default();
        let h = KreinSpace::new(1, 1).unwrap();
        let f = Frame::new(&h, vec![real_vector(&[1.0, 0.0]), real_vector(&[1.0, 2.0])]).unwrap();
        let b = jframe_operator(&f, &tol).unwrap();
        let cork = block_rep_cork(&b, &tol).unwrap();
        let edin = block_rep_edinburgh(&b, &tol).unwrap();
        let bounds = jframe_bounds(&cork, &edin, &b, &tol).unwrap();
        Re1 {
            spec: spectrum(&b.s, &tol).unwrap(),
            cork,
            edin,
            bounds,
        }
    }

    #[test]
    fn spectrum_examples() {
        let tol = Tolerances::default();
        let r = re1();
        assert_eq!(r.spec.eigenvalues.len(), 2);
        for z in &r.spec.eigenvalues {
            assert!((z - re(2.0)).norm() < 1e-12);
        }
        assert!(r.spec.is_real.iter().all(|&b| b));
        let s = spectrum(&CMat::identity(3, 3), &tol).unwrap();
        assert!(s.eigenvalues.iter().all(|z| (z - re(1.0)).norm() < 1e-15));
        let s = spectrum(&real_matrix(&[&[3.0, 0.0], &[0.0, 1.0]]), &tol).unwrap();
        assert!((s.eigenvalues[0] - re(1.0)).norm() < 1e-15);
        assert!((s.eigenvalues[1] - re(3.0)).norm() < 1e-15);
    }

    #[test]
    fn complex_pair_is_conjugate_symmetric() {
        let tol = Tolerances::default();
        let s = spectrum(&real_matrix(&[&[1.0, 2.0], &[-2.0, 1.0]]), &tol).unwrap();
        assert!(s.is_real.iter().all(|&b| !b));
        assert!(s.conjugate_gap < 1e-14);
        assert!((s.eigenvalues[0] - C64::new(1.0, -2.0)).norm() < 1e-14);
    }

    #[test]
    fn schur_complement_2_examples() {
        let r = re1();
        let s0 = schur_complement_2(&r.cork, re(0.0)).unwrap();
        assert!((s0[(0, 0)] - re(3.0)).norm() < 1e-14);
        let s2 = schur_complement_2(&r.cork, re(2.0)).unwrap();
        assert!(s2[(0, 0)].norm() < 1e-14);
        assert!(schur_complement_2(&r.cork, re(4.0 / 3.0)).is_err());
    }

    #[test]
    fn schur_complement_1_examples() {
        let r = re1();
        let s2 = schur_complement_1(&r.edin, re(2.0)).unwrap();
        assert!(s2[(0, 0)].norm() < 1e-14);
        let s0 = schur_complement_1(&r.edin, re(0.0)).unwrap();
        assert!((s0[(0, 0)] - re(1.0)).norm() < 1e-14);
        assert!(min_singular_value(&schur_complement_1(&r.edin, C64::new(1.0, 1.0)).unwrap()) > 0.1);
    }

    #[test]
    fn cork_region_re1() {
        let r = re1();
        let reg = enclosure_cork(&r.cork);
        let (lo, hi) = reg.real_interval.unwrap();
        assert!((lo - 4.0 / 3.0).abs() < 1e-14 && (hi - 8.0 / 3.0).abs() < 1e-14);
        assert!(check_membership(&r.spec, &reg, &Tolerances::default()).contained);
    }

    #[test]
    fn edinburgh_region_re1() {
        let r = re1();
        let reg = enclosure_edinburgh(&r.edin);
        let (lo, hi) = reg.real_interval.unwrap();
        assert!((lo - 1.0).abs() < 1e-14 && (hi - 4.0).abs() < 1e-14);
        let cork = enclosure_cork(&r.cork).real_interval.unwrap();
        assert!((lo.max(cork.0) - 4.0 / 3.0).abs() < 1e-14);
        assert!((hi.min(cork.1) - 8.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn bounds_region_re1() {
        let r = re1();
        let reg = enclosure_from_bounds(&r.bounds);
        let (lo, hi) = reg.real_interval.unwrap();
        assert!((lo - 4.0 / 3.0).abs() < 1e-14 && (hi - 3.0).abs() < 1e-14);
        assert!((reg.disks[0].center - 4.0 / 3.0).abs() < 1e-14);
        assert!((reg.halfplane_re_gt.unwrap() - 1.5).abs() < 1e-14);
        assert!(check_membership(&r.spec, &reg, &Tolerances::default()).contained);
    }

    #[test]
    fn all_ones_bounds() {
        let b = JFrameBounds {
            alpha_plus: 1.0,
            beta_plus: 1.0,
            alpha_minus: 1.0,
            beta_minus: 1.0,
            gamma_plus: 1.0,
            delta_plus: 1.0,
            gamma_minus: 1.0,
            delta_minus: 1.0,
        };
        let reg = enclosure_from_bounds(&b);
        assert_eq!(reg.real_interval, Some((1.0, 1.0)));
        assert_eq!(reg.disks[0].center, 1.0);
        assert_eq!(reg.halfplane_re_gt, Some(0.5));
    }

    #[test]
    fn membership_examples() {
        let tol = Tolerances::default();
        let reg = EnclosureRegion {
            source: RegionSource::Bounds,
            disks: vec![],
            halfplane_re_gt: None,
            real_interval: Some((1.0, 1.0)),
            imag_abs_le: None,
            params: BTreeMap::new(),
        };
        let one = spectrum(&CMat::identity(1, 1), &tol).unwrap();
        let rep = check_membership(&one, &reg, &tol);
        assert!(rep.contained);
        let reg2 = EnclosureRegion {
            real_interval: Some((4.0 / 3.0, 3.0)),
            ..reg
        };
        let half = spectrum(&real_matrix(&[&[0.5]]), &tol).unwrap();
        let rep = check_membership(&half, &reg2, &tol);
        assert!(!rep.contained);
        assert_eq!(rep.entries[0].status, Membership::Outside);
    }

    #[test]
    fn open_disk_boundary_is_contact() {
        let tol = Tolerances::default();
        // Eigenvalues 1 ± i lie on the circle |z − 1| = 1.
        let spec = spectrum(&real_matrix(&[&[1.0, 1.0], &[-1.0, 1.0]]), &tol).unwrap();
        let reg = EnclosureRegion {
            source: RegionSource::Bounds,
            disks: vec![Disk {
                center: 1.0,
                radius: 1.0,
                open: true,
            }],
            halfplane_re_gt: None,
            real_interval: None,
            imag_abs_le: None,
            params: BTreeMap::new(),
        };
        let rep = check_membership(&spec, &reg, &tol);
        assert!(rep.contained);
        assert!(rep.entries.iter().all(|e| e.status == Membership::BoundaryContact));
    }
}
