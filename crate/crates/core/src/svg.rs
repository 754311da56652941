//! Self-contained SVG of the spectral enclosure: the disks, the half-plane
//! thresholds, the shaded non-real region, the real bar `[ε₋, ε₊]` and the
//! eigenvalues.

use std::fmt::Write;

use crate::frames::Frame;
use crate::jframe::{block_rep_cork, block_rep_edinburgh, jframe_bounds, jframe_operator};
use crate::spectral::{
    enclosure_cork, enclosure_edinburgh, enclosure_from_bounds, enclosure_strip, spectrum, EnclosureRegion,
    RegionSource, SpectrumData,
};
use crate::tol::Tolerances;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 0.10;

/// Maps the complex plane onto the viewport with a common scale on both axes.
struct View {
    scale: f64,
    x0: f64,
    y0: f64,
}

impl View {
    fn fit(re_lo: f64, re_hi: f64, im_hi: f64) -> Self {
        let (w, h) = ((re_hi - re_lo).max(1e-12), (2.0 * im_hi).max(1e-12));
        let (w, h) = (w * (1.0 + 2.0 * MARGIN), h * (1.0 + 2.0 * MARGIN));
        let scale = (WIDTH / w).min(HEIGHT / h);
        let mid = 0.5 * (re_lo + re_hi);
        Self {
            scale,
            x0: 0.5 * WIDTH - mid * scale,
            y0: 0.5 * HEIGHT,
        }
    }

    fn x(&self, re: f64) -> f64 {
        self.x0 + re * self.scale
    }

    fn y(&self, im: f64) -> f64 {
        self.y0 - im * self.scale
    }

    fn len(&self, d: f64) -> f64 {
        d * self.scale
    }
}

fn region(regions: &[EnclosureRegion], source: RegionSource) -> Option<&EnclosureRegion> {
    regions.iter().find(|r| r.source == source)
}

fn param(r: Option<&EnclosureRegion>, key: &str) -> Option<f64> {
    r.and_then(|r| r.params.get(key).copied())
}

/// Spectrum of `S` and its four enclosure regions.
pub fn enclosure_data(frame: &Frame, tol: &Tolerances) -> crate::Result<(SpectrumData, Vec<EnclosureRegion>)> {
    let b = jframe_operator(frame, tol)?;
    let c = block_rep_cork(&b, tol)?;
    let e = block_rep_edinburgh(&b, tol)?;
    let bounds = jframe_bounds(&c, &e, &b, tol)?;
    let sigma = spectrum(&b.s, tol)?;
    let regions = vec![
        enclosure_cork(&c),
        enclosure_edinburgh(&e),
        enclosure_strip(&c, &e),
        enclosure_from_bounds(&bounds),
    ];
    Ok((sigma, regions))
}

pub fn enclosure_svg(sigma: &SpectrumData, regions: &[EnclosureRegion]) -> String {
    let eigenvalues = &sigma.eigenvalues;
    let bounds = region(regions, RegionSource::Bounds);
    let cork = region(regions, RegionSource::Cork);
    let strip = region(regions, RegionSource::ImaginaryStrip).and_then(|r| r.imag_abs_le);
    let disks: Vec<(f64, f64, &str)> = [(bounds, "γ⁻¹"), (cork, "a₊")]
        .iter()
        .filter_map(|(r, label)| r.and_then(|r| r.disks.first()).map(|d| (d.center, d.radius, *label)))
        .collect();
    let alpha_half = param(bounds, "α").map(|a| a / 2.0);
    let bar = bounds.and_then(|r| r.real_interval);

    let mut re_lo: f64 = 0.0;
    let mut re_hi: f64 = 1.0;
    let mut im_hi: f64 = 0.5;
    for &(c, r, _) in &disks {
        re_lo = re_lo.min(c - r);
        re_hi = re_hi.max(c + r);
        im_hi = im_hi.max(r);
    }
    if let Some((lo, hi)) = bar {
        re_lo = re_lo.min(lo);
        re_hi = re_hi.max(hi);
    }
    for z in eigenvalues {
        re_lo = re_lo.min(z.re);
        re_hi = re_hi.max(z.re);
        im_hi = im_hi.max(z.im.abs());
    }
    let v = View::fit(re_lo, re_hi, im_hi);
    let (top, bottom) = (v.y(im_hi * (1.0 + MARGIN)), v.y(-im_hi * (1.0 + MARGIN)));

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##);

    // Non-real enclosure: intersection of both disks, right of α/2, inside the strip.
    let _ = writeln!(s, "<defs>");
    for (k, &(c, r, _)) in disks.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<clipPath id="lens-{k}"><circle cx="{:.3}" cy="{:.3}" r="{:.3}"/></clipPath>"#,
            v.x(c),
            v.y(0.0),
            v.len(r)
        );
    }
    let _ = writeln!(s, "</defs>");
    if !disks.is_empty() {
        let x_left = v.x(alpha_half.unwrap_or(re_lo));
        let (y_top, y_bot) = match strip {
            Some(h) => (v.y(h), v.y(-h)),
            None => (top, bottom),
        };
        let mut shade = format!(
            r##"<rect class="lens" x="{x_left:.3}" y="{y_top:.3}" width="{:.3}" height="{:.3}" fill="#9ecae1" fill-opacity="0.5"/>"##,
            (WIDTH - x_left).max(0.0),
            (y_bot - y_top).max(0.0)
        );
        for k in 0..disks.len() {
            shade = format!(r#"<g clip-path="url(#lens-{k})">{shade}</g>"#);
        }
        let _ = writeln!(s, "{shade}");
    }

    // Axes.
    let _ = writeln!(
        s,
        r##"<line x1="0" y1="{0:.3}" x2="{WIDTH}" y2="{0:.3}" stroke="#444444" stroke-width="1"/>"##,
        v.y(0.0)
    );
    let _ = writeln!(
        s,
        r##"<line x1="{0:.3}" y1="0" x2="{0:.3}" y2="{HEIGHT}" stroke="#444444" stroke-width="1"/>"##,
        v.x(0.0)
    );

    for &(c, r, label) in &disks {
        let _ = writeln!(
            s,
            r##"<circle class="disk" cx="{:.3}" cy="{:.3}" r="{:.3}" fill="none" stroke="#1f4e79" stroke-width="1.5" stroke-dasharray="6 4"/>"##,
            v.x(c),
            v.y(0.0),
            v.len(r)
        );
        let _ = writeln!(
            s,
            r##"<text x="{:.3}" y="{:.3}" font-family="serif" font-size="16" fill="#1f4e79" text-anchor="middle">{label}</text>"##,
            v.x(c),
            v.y(0.0) + 20.0
        );
    }

    let thresholds = [
        (alpha_half, "α/2", "#b22222"),
        (param(bounds, "α-").map(|a| a / 2.0), "α₋/2", "#7f7f7f"),
        (param(bounds, "α+").map(|a| a / 2.0), "α₊/2", "#7f7f7f"),
    ];
    for (k, (x, label, colour)) in thresholds.iter().enumerate() {
        if let Some(x) = x {
            let _ = writeln!(
                s,
                r#"<line class="threshold" x1="{0:.3}" y1="{top:.3}" x2="{0:.3}" y2="{bottom:.3}" stroke="{colour}" stroke-width="1" stroke-dasharray="4 4"/>"#,
                v.x(*x)
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.3}" y="{:.3}" font-family="serif" font-size="14" fill="{colour}" text-anchor="middle">{label}</text>"#,
                v.x(*x),
                top - 4.0 + 16.0 * k as f64
            );
        }
    }

    if let Some((lo, hi)) = bar {
        let _ = writeln!(
            s,
            r##"<rect class="real-bar" data-lo="{lo}" data-hi="{hi}" x="{:.3}" y="{:.3}" width="{:.3}" height="6" fill="#2ca02c"/>"##,
            v.x(lo),
            v.y(0.0) - 3.0,
            v.len(hi - lo)
        );
        for (x, label) in [(lo, "ε₋"), (hi, "ε₊")] {
            let _ = writeln!(
                s,
                r##"<text x="{:.3}" y="{:.3}" font-family="serif" font-size="14" fill="#2ca02c" text-anchor="middle">{label}</text>"##,
                v.x(x),
                v.y(0.0) - 8.0
            );
        }
    }

    for (z, &real) in eigenvalues.iter().zip(&sigma.is_real) {
        let kind = if real { "real" } else { "nonreal" };
        let _ = writeln!(
            s,
            r##"<circle class="eigenvalue {kind}" data-re="{}" data-im="{}" cx="{:.3}" cy="{:.3}" r="4" fill="#000000"/>"##,
            z.re,
            z.im,
            v.x(z.re),
            v.y(z.im)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genkit::{random_jframe, GenConfig};
    use crate::krein::KreinSpace;
    use crate::linalg::real_vector;

    fn regions(frame: &Frame) -> (SpectrumData, Vec<EnclosureRegion>) {
        enclosure_data(frame, &Tolerances::default()).unwrap()
    }

    #[test]
    fn re1_figure() {
        let h = KreinSpace::new(1, 1).unwrap();
        let f = Frame::new(&h, vec![real_vector(&[1.0, 0.0]), real_vector(&[1.0, 2.0])]).unwrap();
        let (eigs, regs) = regions(&f);
        let svg = enclosure_svg(&eigs, &regs);
        assert!(svg.starts_with("<svg") && svg.contains(r#"width="800""#) && svg.contains(r#"height="600""#));
        assert!(svg.contains("γ⁻¹") && svg.contains("α/2") && svg.contains("α₋/2") && svg.contains("α₊/2"));
        assert_eq!(svg.matches("stroke-dasharray").count(), 2 + 3);
        let bar = svg.lines().find(|l| l.contains("real-bar")).unwrap();
        let attr = |name: &str| -> f64 {
            let start = bar.find(&format!("{name}=\"")).unwrap() + name.len() + 2;
            bar[start..].split('"').next().unwrap().parse().unwrap()
        };
        assert!((attr("data-lo") - 4.0 / 3.0).abs() < 1e-12 && (attr("data-hi") - 3.0).abs() < 1e-12);
        assert_eq!(svg.matches(r#"class="eigenvalue real""#).count(), 2);
        assert_eq!(svg.matches("nonreal").count(), 0);
        assert!(!svg.contains("<script"));
    }

    #[test]
    fn complex_pair_inside_lens() {
        let (sigma, regs) = (0..50)
            .map(|seed| {
                let cfg = GenConfig {
                    angular_norm_cap: 0.9,
                    ..GenConfig::new(2, 2, 2, 2, seed)
                };
                regions(&random_jframe(&cfg).unwrap())
            })
            .find(|(sigma, _)| sigma.is_real.iter().any(|r| !r))
            .unwrap();
        let svg = enclosure_svg(&sigma, &regs);
        assert_eq!(svg.matches("eigenvalue nonreal").count(), sigma.is_real.iter().filter(|r| !**r).count());
        assert!(svg.contains(r#"clip-path="url(#lens-0)""#));
    }
}
