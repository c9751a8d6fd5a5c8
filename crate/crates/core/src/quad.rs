//! Profile integrals `Q_{d,m} = 2 int_0^inf t^(d-2)/(1+t^m)` and the tilde
//! variant with `t^d`.

use crate::error::{CoreError, Result};

fn power(d: usize, tilde: bool) -> u32 {
    if tilde { d as u32 } else { d as u32 - 2 }
}

pub fn converges(d: usize, m: u32, tilde: bool) -> bool {
    d >= 2 && m > power(d, tilde) + 1
}

/// Adaptive tanh-sinh quadrature on `[0,1]` plus the tail mapped by `t = 1/s`.
pub fn q_integral(d: usize, m: u32, tilde: bool) -> Result<f64> {
    if !converges(d, m, tilde) {
        return Err(CoreError::Divergent { d, m, tilde });
    }
    let k = power(d, tilde) as i32;
    let mi = m as i32;
    let head = |t: f64| t.powi(k) / (1.0 + t.powi(mi));
    // int_1^inf t^k/(1+t^m) dt = int_0^1 s^(m-k-2)/(1+s^m) ds
    let tail = |s: f64| s.powi(mi - k - 2) / (1.0 + s.powi(mi));
    let a = quadrature::double_exponential::integrate(head, 0.0, 1.0, 1e-14);
    let b = quadrature::double_exponential::integrate(tail, 0.0, 1.0, 1e-14);
    Ok(2.0 * (a.integral + b.integral))
}

/// Beta-function closed form `2 pi / (m sin(s pi / m))` with `s = d-1` or `d+1`.
pub fn q_closed_form(d: usize, m: u32, tilde: bool) -> Result<f64> {
    if !converges(d, m, tilde) {
        return Err(CoreError::Divergent { d, m, tilde });
    }
    let s = if tilde { d as f64 + 1.0 } else { d as f64 - 1.0 };
    let mf = m as f64;
    Ok(2.0 * std::f64::consts::PI / (mf * (s * std::f64::consts::PI / mf).sin()))
}
