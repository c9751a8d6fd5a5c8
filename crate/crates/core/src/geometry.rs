//! Inclusion-pair geometry near the contact point: surface charts, the gap
//! profile and samplers for the narrow region.

use crate::error::{CoreError, Result};

/// Outer boundary of the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outer {
    Disk { radius: f64 },
    /// Rectangle `(-half_width, half_width) x (-half_height, half_height)`.
    Rect { half_width: f64, half_height: f64 },
}

impl Outer {
    pub fn size(&self) -> f64 {
        match *self {
            Outer::Disk { radius } => radius,
            Outer::Rect { half_width, half_height } => half_width.max(half_height),
        }
    }
}

/// Closed inclusion `|x/r|^m + |y/r|^m <= 1` (a disk when `m = 2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superellipse {
    pub r: f64,
    pub m: u32,
}

impl Superellipse {
    /// Polar radius at angle `theta` about the center.
    pub fn radius_at(&self, theta: f64) -> f64 {
        let m = self.m as f64;
        let s = theta.cos().abs().powf(m) + theta.sin().abs().powf(m);
        self.r / s.powf(1.0 / m)
    }

    /// Level function, below 1 inside.
    pub fn level(&self, dx: f64, dy: f64) -> f64 {
        let m = self.m as f64;
        (dx.abs() / self.r).powf(m) + (dy.abs() / self.r).powf(m)
    }

    /// Tip coefficient `k` in `h(x) = k |x|^m + ...` of the graph near the pole.
    pub fn tip_coefficient(&self) -> f64 {
        1.0 / (self.m as f64 * self.r.powi(self.m as i32 - 1))
    }
}

/// Magnitude of a surface chart as a function of `x'`; the upper surface is
/// `+chart`, the lower surface `-chart`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Chart {
    /// `coef |x'|^m`, the model profile with remainders set to zero.
    Power { coef: f64, m: u32 },
    /// Exact graph `r - (r^m - |x|^m)^(1/m)` of a superellipse pole (2D only).
    Superellipse { r: f64, m: u32 },
}

/// Value and derivatives up to third order of a function of `x'`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub v: f64,
    pub g: [f64; 2],
    pub h: [[f64; 2]; 2],
    pub t: [[[f64; 2]; 2]; 2],
}

impl Jet {
    pub fn scale(&self, a: f64) -> Jet {
        let mut out = *self;
        out.v *= a;
        for i in 0..2 {
            out.g[i] *= a;
            for j in 0..2 {
                out.h[i][j] *= a;
                for k in 0..2 {
                    out.t[i][j][k] *= a;
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut out = *self;
        out.v += o.v;
        for i in 0..2 {
            out.g[i] += o.g[i];
            for j in 0..2 {
                out.h[i][j] += o.h[i][j];
                for k in 0..2 {
                    out.t[i][j][k] += o.t[i][j][k];
                }
            }
        }
        out
    }
}

impl Chart {
    /// Jet at `xp` (length `d - 1`).
    pub fn jet(&self, xp: &[f64]) -> Jet {
        match (*self, xp.len()) {
            (Chart::Power { coef, m }, 1) => power_jet_1d(coef, m, xp[0]),
            (Chart::Power { coef, m }, _) => power_jet_radial(coef, m, xp),
            (Chart::Superellipse { r, m }, _) => superellipse_jet_1d(r, m, xp[0]),
        }
    }

    pub fn value(&self, xp: &[f64]) -> f64 {
        self.jet(xp).v
    }
}

fn power_jet_1d(c: f64, m: u32, x: f64) -> Jet {
    let mf = m as f64;
    let a = x.abs();
    let mut j = Jet { v: c * a.powi(m as i32), ..Jet::default() };
    // |x|^(m-2) x, (m-1)|x|^(m-2), (m-1)(m-2)|x|^(m-4) x
    j.g[0] = c * mf * a.powi(m as i32 - 2) * x;
    j.h[0][0] = c * mf * (mf - 1.0) * a.powi(m as i32 - 2);
    j.t[0][0][0] = if m == 2 || (m < 4 && a == 0.0) {
        0.0
    } else {
        c * mf * (mf - 1.0) * (mf - 2.0) * a.powi(m as i32 - 4) * x
    };
    j
}

fn power_jet_radial(c: f64, m: u32, xp: &[f64]) -> Jet {
    let mf = m as f64;
    let rho = (xp[0] * xp[0] + xp[1] * xp[1]).sqrt();
    // d_i G = A x_i, d_ij G = A delta_ij + B x_i x_j,
    // d_ijk G = B (delta_ij x_k + delta_ik x_j + delta_jk x_i) + C x_i x_j x_k
    let a = c * mf * rho.powi(m as i32 - 2);
    let b = if m == 2 || (m < 4 && rho == 0.0) {
        0.0
    } else {
        c * mf * (mf - 2.0) * rho.powi(m as i32 - 4)
    };
    let cc = if m == 2 || m == 4 || (m < 6 && rho == 0.0) {
        0.0
    } else {
        c * mf * (mf - 2.0) * (mf - 4.0) * rho.powi(m as i32 - 6)
    };
    let mut j = Jet { v: c * rho.powi(m as i32), ..Jet::default() };
    let dl = |i: usize, k: usize| if i == k { 1.0 } else { 0.0 };
    for i in 0..2 {
        j.g[i] = a * xp[i];
        for k in 0..2 {
            j.h[i][k] = a * dl(i, k) + b * xp[i] * xp[k];
            for l in 0..2 {
                j.t[i][k][l] = b * (dl(i, k) * xp[l] + dl(i, l) * xp[k] + dl(k, l) * xp[i])
                    + cc * xp[i] * xp[k] * xp[l];
            }
        }
    }
    j
}

fn superellipse_jet_1d(r: f64, m: u32, x: f64) -> Jet {
    let mf = m as f64;
    let ax = x.abs();
    let p = ax.powi(m as i32);
    let s = r.powi(m as i32) - p;
    let q = 1.0 / mf - 1.0;
    // a = |x|^(m-2) x and its derivatives
    let a0 = ax.powi(m as i32 - 2) * x;
    let a1 = (mf - 1.0) * ax.powi(m as i32 - 2);
    let a2 = if m == 2 || (m < 4 && ax == 0.0) {
        0.0
    } else {
        (mf - 1.0) * (mf - 2.0) * ax.powi(m as i32 - 4) * x
    };
    // s' = -m a, s'' = -m a'
    let s1 = -mf * a0;
    let s2 = -mf * a1;
    let b0 = s.powf(q);
    let b1 = q * s.powf(q - 1.0) * s1;
    let b2 = q * (q - 1.0) * s.powf(q - 2.0) * s1 * s1 + q * s.powf(q - 1.0) * s2;
    let mut j = Jet { v: r - s.powf(1.0 / mf), ..Jet::default() };
    j.g[0] = b0 * a0;
    j.h[0][0] = b1 * a0 + b0 * a1;
    j.t[0][0][0] = b2 * a0 + 2.0 * b1 * a1 + b0 * a2;
    j
}

/// Pair of inclusions separated by `eps` along the last axis, described near
/// the closest points by surface charts.
#[derive(Debug, Clone, PartialEq)]
pub struct InclusionPairGeometry {
    d: usize,
    m: u32,
    kappa: f64,
    kappa_prime: Option<f64>,
    eps: f64,
    chart_half_width: f64,
    gamma: f64,
    outer: Outer,
    upper: Chart,
    lower: Chart,
    shapes: Option<[Superellipse; 2]>,
}

/// Relative convexity `kappa = k1 + k2` of two disks, `k_i = 1/(2 r_i)`.
pub fn pair_kappa(r1: f64, r2: f64) -> f64 {
    0.5 / r1 + 0.5 / r2
}

impl InclusionPairGeometry {
    /// Model profiles `h_1 = -h_2 = (kappa/2)|x'|^m`.
    pub fn model(d: usize, m: u32, kappa: f64, eps: f64, chart_half_width: f64, outer: Outer) -> Result<Self> {
        let chart = Chart::Power { coef: 0.5 * kappa, m };
        let g = Self {
            d,
            m,
            kappa,
            kappa_prime: None,
            eps,
            chart_half_width,
            gamma: 0.5,
            outer,
            upper: chart,
            lower: chart,
            shapes: None,
        };
        g.validate()?;
        Ok(g)
    }

    /// Two disks of radii `r1` (upper) and `r2` (lower) in an outer disk.
    pub fn disks_to_model(r1: f64, r2: f64, eps: f64, outer_radius: f64) -> Result<Self> {
        if !(r1 > 0.0 && r2 > 0.0) || !r1.is_finite() || !r2.is_finite() {
            return Err(CoreError::InvalidGeometry(format!("radii must be positive and finite: {r1}, {r2}")));
        }
        let rmax = r1.max(r2);
        let clearance = 0.1 * rmax;
        if outer_radius < 2.0 * rmax + 0.5 * eps + clearance {
            return Err(CoreError::InvalidGeometry(format!(
                "disks of radius {rmax} do not fit in an outer disk of radius {outer_radius}"
            )));
        }
        let g = Self {
            d: 2,
            m: 2,
            kappa: pair_kappa(r1, r2),
            kappa_prime: None,
            eps,
            chart_half_width: 0.5 * r1.min(r2),
            gamma: 1.0 - 1e-9,
            outer: Outer::Disk { radius: outer_radius },
            upper: Chart::Superellipse { r: r1, m: 2 },
            lower: Chart::Superellipse { r: r2, m: 2 },
            shapes: Some([Superellipse { r: r1, m: 2 }, Superellipse { r: r2, m: 2 }]),
        };
        g.validate()?;
        Ok(g)
    }

    /// Two congruent superellipses `|x|^m + |y|^m = r^m` stacked along `x_2`.
    pub fn superellipses(r: f64, m: u32, eps: f64, outer: Outer) -> Result<Self> {
        if m < 2 {
            return Err(CoreError::InvalidGeometry(format!("convexity order {m} < 2")));
        }
        let shape = Superellipse { r, m };
        let g = Self {
            d: 2,
            m,
            kappa: 2.0 * shape.tip_coefficient(),
            kappa_prime: None,
            eps,
            chart_half_width: 0.5 * r,
            gamma: 0.5,
            outer,
            upper: Chart::Superellipse { r, m },
            lower: Chart::Superellipse { r, m },
            shapes: Some([shape, shape]),
        };
        g.validate()?;
        if let Outer::Disk { radius } = outer {
            let reach = r * 2f64.powf(0.5 - 1.0 / m as f64) + r + 0.5 * eps;
            if radius < reach * 1.05 {
                return Err(CoreError::InvalidGeometry("inclusions do not fit in the outer disk".into()));
            }
        }
        Ok(g)
    }

    /// Period cell whose horizontal sides pass through the inclusion centers.
    pub fn period_cell(r: f64, m: u32, eps: f64, half_width: f64) -> Result<Self> {
        if half_width <= r {
            return Err(CoreError::InvalidGeometry("cell narrower than the inclusion".into()));
        }
        Self::superellipses(r, m, eps, Outer::Rect { half_width, half_height: r + 0.5 * eps })
    }

    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        let mut g = self.clone();
        g.eps = eps;
        if let Outer::Rect { half_width, .. } = g.outer {
            if let Some([s, _]) = g.shapes {
                g.outer = Outer::Rect { half_width, half_height: s.r + 0.5 * eps };
            }
        }
        g.validate()?;
        Ok(g)
    }

    pub fn with_chart_half_width(&self, r: f64) -> Result<Self> {
        let mut g = self.clone();
        g.chart_half_width = r;
        g.validate()?;
        Ok(g)
    }

    pub fn with_kappa_prime(&self, kappa_prime: f64) -> Result<Self> {
        if !(kappa_prime > 0.0) {
            return Err(CoreError::InvalidGeometry("kappa' must be positive".into()));
        }
        let mut g = self.clone();
        g.kappa_prime = Some(kappa_prime);
        Ok(g)
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(CoreError::InvalidGeometry(format!("gamma {gamma} outside (0, 1)")));
        }
        let mut g = self.clone();
        g.gamma = gamma;
        Ok(g)
    }

    /// Same `kappa`, `m`, `eps` with the remainder terms dropped.
    pub fn to_model(&self) -> Self {
        let chart = Chart::Power { coef: 0.5 * self.kappa, m: self.m };
        let mut g = self.clone();
        g.upper = chart;
        g.lower = chart;
        g
    }

    fn validate(&self) -> Result<()> {
        if self.d != 2 && self.d != 3 {
            return Err(CoreError::UnsupportedDimension(self.d));
        }
        if self.m < 2 {
            return Err(CoreError::InvalidGeometry(format!("convexity order {} < 2", self.m)));
        }
        if !(self.kappa > 0.0) {
            return Err(CoreError::InvalidGeometry("kappa must be positive".into()));
        }
        if !(self.eps > 0.0) {
            return Err(CoreError::InvalidGeometry("eps must be positive".into()));
        }
        if !(self.eps < self.chart_half_width && self.chart_half_width < self.outer.size()) {
            return Err(CoreError::InvalidGeometry(format!(
                "need eps < R < outer size, got eps = {}, R = {}, outer = {}",
                self.eps,
                self.chart_half_width,
                self.outer.size()
            )));
        }
        if self.d == 3 && matches!(self.upper, Chart::Superellipse { .. }) {
            return Err(CoreError::InvalidGeometry("exact superellipse charts are 2D only".into()));
        }
        if let Some(shapes) = self.shapes {
            for s in shapes {
                if 2.0 * self.chart_half_width > s.r {
                    return Err(CoreError::InvalidGeometry("chart wider than the inclusion".into()));
                }
            }
        }
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.d
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn kappa_prime(&self) -> Option<f64> {
        self.kappa_prime
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn chart_half_width(&self) -> f64 {
        self.chart_half_width
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn outer(&self) -> Outer {
        self.outer
    }
    pub fn shapes(&self) -> Option<[Superellipse; 2]> {
        self.shapes
    }

    /// Centers of the upper and lower inclusion (2D shaped geometries).
    pub fn centers(&self) -> Option<[[f64; 2]; 2]> {
        self.shapes.map(|[a, b]| [[0.0, a.r + 0.5 * self.eps], [0.0, -b.r - 0.5 * self.eps]])
    }

    fn radius(&self, xp: &[f64]) -> f64 {
        xp.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn check_chart(&self, xp: &[f64], limit: f64) -> Result<()> {
        if xp.len() != self.d - 1 {
            return Err(CoreError::DimensionMismatch { expected: self.d - 1, got: xp.len() });
        }
        let rho = self.radius(xp);
        if !(rho <= limit) {
            return Err(CoreError::OutOfChart(rho));
        }
        Ok(())
    }

    /// Jet of `h_1` (i = 1) or `h_2` (i = 2), unchecked.
    pub fn surface_jet(&self, i: usize, xp: &[f64]) -> Jet {
        if i == 1 { self.upper.jet(xp) } else { self.lower.jet(xp).scale(-1.0) }
    }

    /// `h_i(x')`: positive for the upper surface, negative for the lower one.
    pub fn surface_chart(&self, i: usize, xp: &[f64]) -> Result<f64> {
        if i != 1 && i != 2 {
            return Err(CoreError::InvalidIndex { alpha: i, d: 2 });
        }
        self.check_chart(xp, 2.0 * self.chart_half_width)?;
        Ok(self.surface_jet(i, xp).v)
    }

    /// Jet of the gap profile `delta = eps + h_1 - h_2`, unchecked.
    pub fn gap_jet(&self, xp: &[f64]) -> Jet {
        let mut j = self.surface_jet(1, xp).add(&self.surface_jet(2, xp).scale(-1.0));
        j.v += self.eps;
        j
    }

    pub fn gap(&self, xp: &[f64]) -> Result<f64> {
        self.check_chart(xp, 2.0 * self.chart_half_width)?;
        Ok(self.gap_jet(xp).v)
    }

    /// Lower and upper surface heights `(-eps/2 + h_2, eps/2 + h_1)`.
    pub fn surfaces(&self, xp: &[f64]) -> (f64, f64) {
        (-0.5 * self.eps + self.surface_jet(2, xp).v, 0.5 * self.eps + self.surface_jet(1, xp).v)
    }

    /// Membership in the narrow region of half-width `r`.
    pub fn in_narrow_region(&self, x: &[f64], r: f64) -> bool {
        if x.len() != self.d {
            return false;
        }
        let xp = &x[..self.d - 1];
        if self.radius(xp) >= r {
            return false;
        }
        let (lo, hi) = self.surfaces(xp);
        let xd = x[self.d - 1];
        lo < xd && xd < hi
    }

    /// Deterministic points in the narrow region of half-width `R`: the
    /// segment `x' = 0`, the ridge `|x'| ~ eps^(1/m)` and a spread over `|x'| <= R`.
    pub fn narrow_region_samples(&self, n: usize) -> Vec<Vec<f64>> {
        let n = n.max(1);
        if n == 1 {
            let (lo, hi) = self.surfaces(&vec![0.0; self.d - 1]);
            let mut p = vec![0.0; self.d];
            p[self.d - 1] = 0.5 * (lo + hi);
            return vec![p];
        }
        let r = self.chart_half_width;
        let ridge = self.eps.powf(1.0 / self.m as f64);
        let n_axis = (n / 5).max(1);
        let n_ridge = (n / 4).max(1);
        let n_spread = n.saturating_sub(n_axis + n_ridge);
        let mut out = Vec::with_capacity(n);
        let golden = 0.618_033_988_749_894_9_f64;
        let push = |rho: f64, angle: f64, t: f64, out: &mut Vec<Vec<f64>>| {
            let xp: Vec<f64> = if self.d == 2 {
                vec![rho * angle.cos().signum()]
            } else {
                vec![rho * angle.cos(), rho * angle.sin()]
            };
            let (lo, hi) = self.surfaces(&xp);
            let mut p = xp;
            p.push(lo + t * (hi - lo));
            out.push(p);
        };
        for k in 0..n_axis {
            let t = (k as f64 + 0.5) / n_axis as f64;
            push(0.0, 0.0, t, &mut out);
        }
        for k in 0..n_ridge {
            let s = (k as f64 + 0.5) / n_ridge as f64;
            let rho = (0.5 * ridge * 4f64.powf(s)).min(0.999 * r);
            let t = ((k as f64 + 1.0) * golden).fract().clamp(0.05, 0.95);
            push(rho, std::f64::consts::PI * (k as f64 * golden).fract() * 2.0, t, &mut out);
        }
        for k in 0..n_spread {
            let s = (k as f64 + 0.5) / n_spread as f64;
            let rho = 0.999 * r * s;
            let t = ((k as f64 + 1.0) * golden * golden).fract().clamp(0.05, 0.95);
            push(rho, std::f64::consts::PI * 2.0 * ((k as f64) * golden).fract(), t, &mut out);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model2(m: u32, kappa: f64, eps: f64) -> InclusionPairGeometry {
        InclusionPairGeometry::model(2, m, kappa, eps, 0.5, Outer::Disk { radius: 3.0 }).unwrap()
    }

    #[test]
    fn chart_examples() {
        let g = model2(2, 1.0, 0.01);
        assert!((g.surface_chart(1, &[0.1]).unwrap() - 0.005).abs() < 1e-15);
        assert!((g.surface_chart(2, &[0.1]).unwrap() + 0.005).abs() < 1e-15);
        assert_eq!(g.surface_chart(1, &[0.0]).unwrap(), 0.0);
        assert!(g.surface_chart(1, &[1.01]).is_err());
    }

    #[test]
    fn gap_examples() {
        let g = model2(2, 1.0, 0.01);
        assert!((g.gap(&[0.1]).unwrap() - 0.02).abs() < 1e-15);
        assert_eq!(g.gap(&[0.0]).unwrap(), 0.01);
        let g4 = model2(4, 2.0, 1e-12);
        assert!((g4.gap(&[0.5]).unwrap() - 0.125).abs() < 1e-11);
    }

    #[test]
    fn disk_kappa() {
        let g = InclusionPairGeometry::disks_to_model(1.0, 1.0, 0.01, 3.0).unwrap();
        assert_eq!(g.kappa(), 1.0);
        let g = InclusionPairGeometry::disks_to_model(2.0, 2.0, 0.01, 6.0).unwrap();
        assert_eq!(g.kappa(), 0.5);
        assert!((pair_kappa(1e12, 1.0) - 0.5).abs() < 1e-12);
        assert!(InclusionPairGeometry::disks_to_model(1.0, 1.0, 0.01, 2.0).is_err());
    }

    #[test]
    fn superellipse_kappa() {
        let g = InclusionPairGeometry::superellipses(1.0, 4, 0.01, Outer::Disk { radius: 3.0 }).unwrap();
        assert_eq!(g.kappa(), 0.5);
        let x = 0.05;
        let exact = g.gap(&[x]).unwrap();
        let model = g.to_model().gap(&[x]).unwrap();
        assert!((exact - model).abs() < x.powi(8));
    }

    #[test]
    fn single_sample_is_origin() {
        let g = model2(2, 1.0, 0.01);
        assert_eq!(g.narrow_region_samples(1), vec![vec![0.0, 0.0]]);
    }

    #[test]
    fn rect_cell_tracks_eps() {
        let g = InclusionPairGeometry::period_cell(1.0, 2, 0.02, 1.5).unwrap();
        let g2 = g.with_eps(0.01).unwrap();
        assert_eq!(g2.outer(), Outer::Rect { half_width: 1.5, half_height: 1.005 });
    }
}
