//! Leading-order laws: rate functions, capacity asymptotes, free-constant
//! differences, gradient predictions, blow-up matrices and effective moduli.

use std::f64::consts::PI;

use crate::auxiliary::VectorAuxField;
use crate::error::{CoreError, Result};
use crate::geometry::InclusionPairGeometry;
use crate::model::{GradientMatrix, LameParams, rigid_count};
use crate::quad::q_closed_form;

/// Profile integral used inside the formulas. The closed form is exact; the
/// quadrature in [`crate::quad::q_integral`] cross-checks it.
fn q(d: usize, m: u32, tilde: bool) -> Result<f64> {
    q_closed_form(d, m, tilde)
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 0.5 { Ok(()) } else { Err(CoreError::EpsOutOfRange(eps)) }
}

/// Rate functions for one `(d, m, kappa, eps)`. Entries not defined for the
/// given `(d, m)` are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFunctions {
    pub rho_d: f64,
    pub rho_md: Option<f64>,
    pub e: Option<f64>,
    pub f: Option<f64>,
}

pub fn rate(d: usize, m: u32, kappa: f64, eps: f64) -> Result<RateFunctions> {
    check_eps(eps)?;
    let log = eps.ln().abs();
    let mf = m as f64;
    match d {
        2 => {
            let rho_md = match m {
                3 => Some(1.0 / log),
                4 => Some(eps.powf(0.25)),
                m if m >= 5 => Some(0.0),
                _ => None,
            };
            let e = match m {
                3 => Some(1.5 * kappa / log),
                m if m >= 4 => Some(kappa.powf(3.0 / mf) * eps.powf(1.0 - 3.0 / mf) / q(2, m, true)?),
                _ => None,
            };
            Ok(RateFunctions { rho_d: eps.sqrt(), rho_md, e, f: None })
        }
        3 => {
            let rho_md = match m {
                4 => Some(1.0 / log),
                5..=7 => Some(eps.powf(1.0 - 4.0 / mf)),
                m if m >= 8 => Some(0.0),
                _ => None,
            };
            let f = match m {
                4 => Some(2.0 * kappa / (PI * log)),
                m if m >= 5 => Some(kappa.powf(4.0 / mf) * eps.powf(1.0 - 4.0 / mf) / (PI * q(3, m, true)?)),
                _ => None,
            };
            Ok(RateFunctions { rho_d: 1.0 / log, rho_md, e: None, f })
        }
        _ => Err(CoreError::UnsupportedDimension(d)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Growth {
    /// `coefficient * eps^exponent`.
    Power { exponent: f64 },
    /// `coefficient * |log eps|`.
    Log,
}

/// Leading term of `a_11^{alpha alpha}`; `unknown_constant` marks laws with
/// an additive `O(1)` term that only a fit can supply.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityAsymptote {
    pub alpha: usize,
    pub coefficient: f64,
    pub growth: Growth,
    pub unknown_constant: bool,
    pub eps: f64,
}

impl CapacityAsymptote {
    pub fn value_at(&self, eps: f64) -> f64 {
        match self.growth {
            Growth::Power { exponent } => self.coefficient * eps.powf(exponent),
            Growth::Log => self.coefficient * eps.ln().abs(),
        }
    }

    pub fn value(&self) -> f64 {
        self.value_at(self.eps)
    }
}

pub fn a11_leading(p: &LameParams, g: &InclusionPairGeometry, alpha: usize) -> Result<CapacityAsymptote> {
    let d = g.d();
    if p.d() != d {
        return Err(CoreError::DimensionMismatch { expected: d, got: p.d() });
    }
    check_eps(g.eps())?;
    let m = g.m();
    let mf = m as f64;
    let k = g.kappa();
    let (mu, lm) = (p.mu(), p.longitudinal());
    let uncovered = || CoreError::Uncovered { d, m, alpha };
    let power = |coefficient: f64, exponent: f64, unknown: bool| CapacityAsymptote {
        alpha,
        coefficient,
        growth: Growth::Power { exponent },
        unknown_constant: unknown,
        eps: g.eps(),
    };
    let log = |coefficient: f64| CapacityAsymptote {
        alpha,
        coefficient,
        growth: Growth::Log,
        unknown_constant: true,
        eps: g.eps(),
    };
    let modulus = |a: usize| if a == d { lm } else { mu };
    match (d, m, alpha) {
        (2, 2, 1 | 2) => Ok(power(PI * modulus(alpha) / k.sqrt(), -0.5, false)),
        (2, _, 1 | 2) => Ok(power(modulus(alpha) * q(2, m, false)? / k.powf(1.0 / mf), -(1.0 - 1.0 / mf), true)),
        (2, 3, 3) => Ok(log(2.0 * lm / (3.0 * k))),
        (2, m, 3) if m >= 4 => Ok(power(lm * q(2, m, true)? / k.powf(3.0 / mf), -(1.0 - 3.0 / mf), true)),
        (3, 2, 1..=3) => Ok(log(PI * modulus(alpha) / k)),
        (3, _, 1..=3) => Ok(power(PI * modulus(alpha) * q(3, m, false)? / k.powf(2.0 / mf), -(1.0 - 2.0 / mf), true)),
        (3, 4, 4) => Ok(log(PI * mu / (2.0 * k))),
        (3, m, 4) if m >= 5 => Ok(power(PI * mu * q(3, m, true)? / k.powf(4.0 / mf), -(1.0 - 4.0 / mf), true)),
        (3, 4, 5 | 6) => Ok(log(PI * lm / (4.0 * k))),
        (3, m, 5 | 6) if m >= 5 => {
            Ok(power(PI * lm * q(3, m, true)? / (2.0 * k.powf(4.0 / mf)), -(1.0 - 4.0 / mf), true))
        }
        _ => Err(uncovered()),
    }
}

/// Boundary functionals `b_1^{*beta}[phi]`, one per rigid motion.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowUpFactorVector {
    d: usize,
    values: Vec<f64>,
}

impl BlowUpFactorVector {
    pub fn new(d: usize, values: Vec<f64>) -> Result<Self> {
        if d != 2 && d != 3 {
            return Err(CoreError::UnsupportedDimension(d));
        }
        if values.len() != rigid_count(d) {
            return Err(CoreError::DimensionMismatch { expected: rigid_count(d), got: values.len() });
        }
        Ok(Self { d, values })
    }

    pub fn zeros(d: usize) -> Self {
        Self { d, values: vec![0.0; rigid_count(d)] }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// 1-based access.
    pub fn get(&self, beta: usize) -> f64 {
        self.values[beta - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { d: self.d, values: self.values.iter().map(|v| v * s).collect() }
    }
}

/// Leading `C_1^alpha - C_2^alpha = b_1^{*alpha} / a_11^{alpha alpha}` for every
/// `alpha` whose capacity blows up; `None` where the capacity stays bounded.
pub fn c_diff_leading(p: &LameParams, g: &InclusionPairGeometry, bstar: &BlowUpFactorVector) -> Result<Vec<Option<f64>>> {
    if bstar.d() != g.d() {
        return Err(CoreError::DimensionMismatch { expected: g.d(), got: bstar.d() });
    }
    (1..=rigid_count(g.d()))
        .map(|alpha| match a11_leading(p, g, alpha) {
            Ok(a) => Ok(Some(bstar.get(alpha) / a.value())),
            Err(CoreError::Uncovered { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

/// Multiplier of `b_1^{*alpha} grad u_1^alpha` exactly as printed in the
/// gradient theorems for each `(d, m)` case.
pub fn theorem_coefficient(p: &LameParams, g: &InclusionPairGeometry, alpha: usize) -> Result<f64> {
    let (d, m, k, eps) = (g.d(), g.m(), g.kappa(), g.eps());
    check_eps(eps)?;
    let mf = m as f64;
    let (mu, lm) = (p.mu(), p.longitudinal());
    let modulus = if alpha == d { lm } else { mu };
    let log = eps.ln().abs();
    let uncovered = CoreError::Uncovered { d, m, alpha };
    match (d, m, alpha) {
        (2, 2, 1 | 2) => Ok(k.sqrt() * eps.sqrt() / PI / modulus),
        (2, _, 1 | 2) => Ok(k.powf(1.0 / mf) * eps.powf(1.0 - 1.0 / mf) / q(2, m, false)? / modulus),
        (2, m, 3) if m >= 3 => Ok(rate(2, m, k, eps)?.e.ok_or(uncovered)? / lm),
        (3, 2, 1..=3) => Ok(k / (PI * log) / modulus),
        (3, 3, 1..=3) => Ok(k.powf(2.0 / 3.0) / PI * eps.powf(1.0 / 3.0) / q(3, 3, false)? / modulus),
        (3, _, 1..=3) => Ok(k.powf(2.0 / mf) * eps.powf(1.0 - 2.0 / mf) / (PI * q(3, m, false)?) / modulus),
        (3, m, 4) if m >= 4 => Ok(rate(3, m, k, eps)?.f.ok_or(uncovered)? / mu),
        (3, m, 5 | 6) if m >= 4 => Ok(rate(3, m, k, eps)?.f.ok_or(uncovered)? / lm),
        _ => Err(uncovered),
    }
}

/// Leading gradient `sum_alpha (C_1^alpha - C_2^alpha) grad u_1^alpha(x)` on `Omega_R`.
pub fn grad_u_asymptotic(
    p: &LameParams,
    g: &InclusionPairGeometry,
    bstar: &BlowUpFactorVector,
    x: &[f64],
) -> Result<GradientMatrix> {
    let d = g.d();
    let r = g.chart_half_width();
    if !(x.len() == d && x[..d - 1].iter().map(|v| v * v).sum::<f64>().sqrt() <= r) {
        return Err(CoreError::OutsideNarrowRegion);
    }
    let diffs = c_diff_leading(p, g, bstar)?;
    let mut out = GradientMatrix::zeros(d);
    for (i, c) in diffs.iter().enumerate() {
        if let Some(c) = c {
            let field = VectorAuxField::new(*p, g.clone(), i + 1)?;
            out = out.add(&field.gradient(x)?.scale(*c));
        }
    }
    Ok(out)
}

/// Single-column matrix packaging the translational blow-up factors.
pub fn blowup_matrix(p: &LameParams, d: usize, bstar: &BlowUpFactorVector) -> Result<GradientMatrix> {
    if bstar.d() != d {
        return Err(CoreError::DimensionMismatch { expected: d, got: bstar.d() });
    }
    let mut b = GradientMatrix::zeros(d);
    for alpha in 1..=d {
        let modulus = if alpha == d { p.longitudinal() } else { p.mu() };
        b.set(alpha - 1, d - 1, bstar.get(alpha) / modulus);
    }
    Ok(b)
}

/// Leading effective shear and extensional moduli of a periodic array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveModuli {
    pub mu_star: f64,
    pub e_star: f64,
    pub young: f64,
    pub l1: f64,
    pub l2: f64,
}

pub fn effective_moduli(p: &LameParams, m: u32, l1: f64, l2: f64, kappa: f64, eps: f64) -> Result<EffectiveModuli> {
    if m < 2 || !(l1 > 0.0 && l2 > 0.0 && kappa > 0.0) {
        return Err(CoreError::InvalidParameter("need m >= 2 and positive cell and kappa".into()));
    }
    check_eps(eps)?;
    let mf = m as f64;
    let scale = (l2 / l1) * q(2, m, false)? / (kappa.powf(1.0 / mf) * eps.powf(1.0 - 1.0 / mf));
    let young = p.young();
    Ok(EffectiveModuli { mu_star: p.mu() * scale, e_star: young * scale, young, l1, l2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Outer;

    fn geom(d: usize, m: u32, kappa: f64, eps: f64) -> InclusionPairGeometry {
        InclusionPairGeometry::model(d, m, kappa, eps, 0.5, Outer::Disk { radius: 3.0 }).unwrap()
    }

    #[test]
    fn rate_examples() {
        assert!((rate(2, 2, 1.0, 0.04).unwrap().rho_d - 0.2).abs() < 1e-15);
        let e = rate(2, 3, 1.0, 1e-3).unwrap().e.unwrap();
        assert!((e - 0.217_147_240_951_625_5).abs() < 1e-12);
        assert_eq!(rate(2, 5, 1.0, 0.01).unwrap().rho_md, Some(0.0));
        assert_eq!(rate(3, 9, 1.0, 0.01).unwrap().rho_md, Some(0.0));
        assert!(rate(2, 2, 1.0, 0.6).is_err());
    }

    #[test]
    fn capacity_examples() {
        let p = LameParams::new(1.0, 1.0, 2).unwrap();
        let a = a11_leading(&p, &geom(2, 2, 1.0, 1e-4), 1).unwrap();
        assert!((a.value() - 100.0 * PI).abs() < 1e-10);
        let a2 = a11_leading(&p, &geom(2, 2, 1.0, 1e-4), 2).unwrap();
        assert!((a2.value() / a.value() - 3.0).abs() < 1e-14);
        let a3 = a11_leading(&p, &geom(2, 4, 2.0, 0.01), 3).unwrap();
        let expect = 3.0 * q_closed_form(2, 4, true).unwrap() / (2f64.powf(0.75) * 0.01f64.powf(0.25));
        assert!((a3.value() - expect).abs() < 1e-12 * expect);
        assert!(a11_leading(&p, &geom(2, 2, 1.0, 0.01), 3).is_err());
    }

    #[test]
    fn c_diff_examples() {
        let p = LameParams::new(1.0, 1.0, 2).unwrap();
        let b = BlowUpFactorVector::new(2, vec![PI, 0.0, 0.0]).unwrap();
        let c = c_diff_leading(&p, &geom(2, 2, 1.0, 0.01), &b).unwrap();
        assert!((c[0].unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(c[2], None);
        let z = c_diff_leading(&p, &geom(2, 2, 1.0, 0.01), &BlowUpFactorVector::zeros(2)).unwrap();
        assert!(z.iter().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn blowup_matrix_example() {
        let p = LameParams::new(1.0, 1.0, 2).unwrap();
        let b = BlowUpFactorVector::new(2, vec![2.0, 3.0, 7.0]).unwrap();
        let m = blowup_matrix(&p, 2, &b).unwrap();
        assert_eq!(m.rows()[0][..2], [0.0, 2.0]);
        assert_eq!(m.rows()[1][..2], [0.0, 1.0]);
    }

    #[test]
    fn moduli_examples() {
        let p = LameParams::new(1.0, 1.0, 2).unwrap();
        let e = effective_moduli(&p, 2, 1.0, 1.0, 1.0, 0.01).unwrap();
        assert!((e.mu_star - 10.0 * PI).abs() < 1e-12);
        assert!((e.young - 2.5).abs() < 1e-15);
        assert!((e.e_star - 25.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn gradient_prediction_on_axis() {
        let p = LameParams::new(1.0, 1.0, 2).unwrap();
        let g = geom(2, 2, 1.0, 0.01);
        let b = BlowUpFactorVector::new(2, vec![1.0, 0.0, 0.0]).unwrap();
        let gr = grad_u_asymptotic(&p, &g, &b, &[0.0, 0.001]).unwrap();
        assert!((gr.get(0, 1) - 1.0 / (PI * 0.1)).abs() < 1e-12);
        let g4 = g.with_eps(0.0025).unwrap();
        let gr4 = grad_u_asymptotic(&p, &g4, &b, &[0.0, 0.0]).unwrap();
        assert!((gr4.get(0, 1) / gr.get(0, 1) - 2.0).abs() < 1e-12);
    }
}
