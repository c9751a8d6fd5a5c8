//! Angular integrals for 3D gaps with two different convexity coefficients
//! along the two tangential axes.

use std::f64::consts::{FRAC_PI_4, PI};

use statrs::function::gamma::gamma;

use crate::error::{CoreError, Result};

/// Angular weights and their integrals over a full turn. Absolute values of
/// `sin` and `cos` are used so the fractional powers stay real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnisotropyIntegrals {
    pub m: u32,
    pub kappa: f64,
    pub kappa_prime: f64,
    pub g: f64,
    pub g_tilde: f64,
}

fn weight_sc(m: u32, s: f64, c: f64) -> f64 {
    let e = 2.0 / m as f64;
    let (s, c) = (s.abs(), c.abs());
    if s == 0.0 || c == 0.0 {
        // Singular for m > 2, but integrably so; the quadrature never lands here.
        return if m == 2 { 1.0 } else { 0.0 };
    }
    s.powf(e - 1.0) * c.powf(e + 1.0) + c.powf(e - 1.0) * s.powf(e + 1.0)
}

fn tilde_sc(m: u32, kappa: f64, kappa_prime: f64, s: f64, c: f64) -> f64 {
    let e = 2.0 / m as f64;
    (c * c / kappa).powf(e) + (s * s / kappa_prime).powf(e)
}

fn weight(m: u32, theta: f64) -> f64 {
    weight_sc(m, theta.sin(), theta.cos())
}

fn tilde_weight(m: u32, kappa: f64, kappa_prime: f64, theta: f64) -> f64 {
    tilde_sc(m, kappa, kappa_prime, theta.sin(), theta.cos())
}

impl AnisotropyIntegrals {
    pub fn weight(&self, theta: f64) -> f64 {
        weight(self.m, theta)
    }

    pub fn tilde_weight(&self, theta: f64) -> f64 {
        tilde_weight(self.m, self.kappa, self.kappa_prime, theta)
    }

    /// Replacement for `kappa` in the quadratic-profile law.
    pub fn quadratic_kappa(&self) -> f64 {
        (self.kappa * self.kappa_prime).sqrt()
    }

    /// Replacement for `kappa^{2/3}/pi` in the cubic-profile law, as printed.
    pub fn cubic_coefficient(&self) -> f64 {
        3.0 * (self.kappa * self.kappa_prime).cbrt() / (2.0 * self.g)
    }

    /// Replacements for `kappa^{2/m}/pi` and `kappa^{4/m}/pi` when `m >= 4`.
    pub fn higher_coefficients(&self) -> (f64, f64) {
        let mf = self.m as f64;
        let kk = self.kappa * self.kappa_prime;
        (mf * kk.powf(1.0 / mf) / self.g, mf * kk.powf(2.0 / mf) / self.g_tilde)
    }
}

/// Both integrands only see `|sin|` and `cos^2`, so a full turn is four
/// first quadrants. Each half of the quadrant is integrated after the
/// substitution `theta = t^p` measured from its axis, with `p = m/2`, which
/// removes the `theta^(2/m - 1)` endpoint singularity. The integrand receives
/// `(sin, cos)` computed from the small offset to avoid cancellation near
/// `pi/2`.
fn full_turn(m: u32, f: impl Fn(f64, f64) -> f64) -> f64 {
    let p = (m as f64 / 2.0).max(1.0);
    let top = FRAC_PI_4.powf(1.0 / p);
    let jac = |t: f64| p * t.powf(p - 1.0);
    let lo = |t: f64| {
        let th = t.powf(p);
        f(th.sin(), th.cos()) * jac(t)
    };
    let hi = |t: f64| {
        let off = t.powf(p);
        f(off.cos(), off.sin()) * jac(t)
    };
    let a = quadrature::double_exponential::integrate(lo, 0.0, top, 1e-14).integral;
    let b = quadrature::double_exponential::integrate(hi, 0.0, top, 1e-14).integral;
    4.0 * (a + b)
}

pub fn anisotropy(m: u32, kappa: f64, kappa_prime: f64) -> Result<AnisotropyIntegrals> {
    if m < 2 {
        return Err(CoreError::InvalidParameter(format!("convexity order {m} < 2")));
    }
    if !(kappa > 0.0 && kappa_prime > 0.0) {
        return Err(CoreError::InvalidParameter("kappa and kappa_prime must be positive".into()));
    }
    let g = full_turn(m, |s, c| weight_sc(m, s, c));
    let g_tilde = full_turn(m, |s, c| weight_sc(m, s, c) * tilde_sc(m, kappa, kappa_prime, s, c));
    Ok(AnisotropyIntegrals { m, kappa, kappa_prime, g, g_tilde })
}

/// Gamma-function form of the full-turn integral of the angular weight.
pub fn g_closed_form(m: u32) -> f64 {
    let s = 1.0 / m as f64;
    4.0 * gamma(s) * gamma(1.0 + s) / gamma(1.0 + 2.0 * s)
}

/// Area of the unit ball `|s|^m + |t|^m <= 1`; the angular integral equals
/// `m` times this, which matches `m pi` only for `m = 2`.
pub fn lm_ball_area(m: u32) -> f64 {
    let s = 1.0 / m as f64;
    4.0 * gamma(1.0 + s).powi(2) / gamma(1.0 + 2.0 * s)
}

/// Ratio of the angular integral to the isotropic value `m pi`.
pub fn isotropic_mismatch(m: u32) -> f64 {
    g_closed_form(m) / (m as f64 * PI)
}
