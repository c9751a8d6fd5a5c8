//! The scalar keel `u_bar`, the bridge polynomial and the corrected vector
//! auxiliary fields, all with closed-form first and second derivatives.

use crate::error::{CoreError, Result};
use crate::geometry::{InclusionPairGeometry, Jet};
use crate::model::{GradientMatrix, LameParams, RigidMotion};

/// Value, gradient and Hessian of a scalar function of `x`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScalarJet {
    pub v: f64,
    pub g: [f64; 3],
    pub h: [[f64; 3]; 3],
}

/// Value, gradient `g[k][i] = d_i u^k` and Hessian `h[k][i][j]` of a vector field.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FieldJet {
    pub v: [f64; 3],
    pub g: [[f64; 3]; 3],
    pub h: [[[f64; 3]; 3]; 3],
}

/// `f(t) = (t - 1/2)^2 / 2 - 1/8` and `f'(t)`; `f'' = 1`.
pub fn bridge(t: f64) -> (f64, f64) {
    (0.5 * (t - 0.5) * (t - 0.5) - 0.125, t - 0.5)
}

/// `u_bar = (x_d + eps/2 - h_2(x')) / delta(x')`, rising from 0 on the lower
/// surface to 1 on the upper one.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarKeel {
    geom: InclusionPairGeometry,
}

impl ScalarKeel {
    pub fn new(geom: InclusionPairGeometry) -> Self {
        Self { geom }
    }

    pub fn geometry(&self) -> &InclusionPairGeometry {
        &self.geom
    }

    fn check(&self, x: &[f64], half_width: f64) -> Result<()> {
        let d = self.geom.d();
        if x.len() != d {
            return Err(CoreError::DimensionMismatch { expected: d, got: x.len() });
        }
        let xp = &x[..d - 1];
        let rho = xp.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(rho <= half_width) {
            return Err(CoreError::OutsideNarrowRegion);
        }
        let (lo, hi) = self.geom.surfaces(xp);
        let tol = 1e-12 * (hi - lo).max(1e-300) + 1e-15;
        let xd = x[d - 1];
        if xd < lo - tol || xd > hi + tol {
            return Err(CoreError::OutsideNarrowRegion);
        }
        Ok(())
    }

    /// Jets of `u_bar` and `delta` at `x` without membership checks.
    pub fn jet_unchecked(&self, x: &[f64]) -> (ScalarJet, Jet) {
        let d = self.geom.d();
        let n = d - 1;
        let xp = &x[..n];
        let delta = self.geom.gap_jet(xp);
        let h2 = self.geom.surface_jet(2, xp);
        let num = x[d - 1] + 0.5 * self.geom.eps() - h2.v;
        let mut dn = [0.0; 3];
        let mut ddn = [[0.0; 3]; 3];
        let mut dd = [0.0; 3];
        let mut ddd = [[0.0; 3]; 3];
        for a in 0..n {
            dn[a] = -h2.g[a];
            dd[a] = delta.g[a];
            for b in 0..n {
                ddn[a][b] = -h2.h[a][b];
                ddd[a][b] = delta.h[a][b];
            }
        }
        dn[d - 1] = 1.0;
        let u = num / delta.v;
        let mut j = ScalarJet { v: u, ..ScalarJet::default() };
        for i in 0..d {
            j.g[i] = (dn[i] - u * dd[i]) / delta.v;
        }
        for i in 0..d {
            for k in 0..d {
                j.h[i][k] = (ddn[i][k] - j.g[i] * dd[k] - j.g[k] * dd[i] - u * ddd[i][k]) / delta.v;
            }
        }
        (j, delta)
    }

    /// Value and gradient on the region of half-width `2R`.
    pub fn eval(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check(x, 2.0 * self.geom.chart_half_width())?;
        let (j, _) = self.jet_unchecked(x);
        Ok((j.v, j.g[..self.geom.d()].to_vec()))
    }
}

/// Corrected auxiliary field `u_bar psi_alpha + corrector`, or its mirror
/// `psi_alpha - (u_bar psi_alpha + corrector)` for the lower inclusion.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorAuxField {
    keel: ScalarKeel,
    params: LameParams,
    motion: RigidMotion,
    /// (component, coefficient, transverse index `a`): adds `c f(u_bar) d_a delta`.
    corrector: Vec<(usize, f64, usize)>,
    mirror: bool,
}

impl VectorAuxField {
    pub fn new(params: LameParams, geom: InclusionPairGeometry, alpha: usize) -> Result<Self> {
        let d = geom.d();
        if params.d() != d {
            return Err(CoreError::DimensionMismatch { expected: d, got: params.d() });
        }
        let motion = RigidMotion::new(d, alpha)?;
        let (l, mu) = (params.lambda(), params.mu());
        let c_long = (l + mu) / (l + 2.0 * mu);
        let c_shear = (l + mu) / mu;
        let corrector = match (d, alpha) {
            (2, 1) => vec![(1, c_long, 0)],
            (2, 2) => vec![(0, c_shear, 0)],
            (3, 1) => vec![(2, c_long, 0)],
            (3, 2) => vec![(2, c_long, 1)],
            (3, 3) => vec![(0, c_shear, 0), (1, c_shear, 1)],
            _ => Vec::new(),
        };
        Ok(Self { keel: ScalarKeel::new(geom), params, motion, corrector, mirror: false })
    }

    /// Lower-inclusion family: equals `psi_alpha` on the lower surface and 0 on the upper.
    pub fn mirrored(mut self) -> Self {
        self.mirror = !self.mirror;
        self
    }

    pub fn alpha(&self) -> usize {
        self.motion.alpha()
    }

    pub fn geometry(&self) -> &InclusionPairGeometry {
        self.keel.geometry()
    }

    fn parts_unchecked(&self, x: &[f64]) -> (FieldJet, FieldJet) {
        let d = self.geometry().d();
        let (u, delta) = self.keel.jet_unchecked(x);
        let psi = self.motion.eval(x);
        let mut keel = FieldJet::default();
        for k in 0..d {
            keel.v[k] = u.v * psi[k];
            for i in 0..d {
                keel.g[k][i] = u.g[i] * psi[k] + u.v * self.motion.skew_entry(k, i);
                for j in 0..d {
                    keel.h[k][i][j] = u.h[i][j] * psi[k]
                        + u.g[i] * self.motion.skew_entry(k, j)
                        + u.g[j] * self.motion.skew_entry(k, i);
                }
            }
        }
        let mut corr = FieldJet::default();
        let (f, fp) = bridge(u.v);
        let n = d - 1;
        for &(k, c, a) in &self.corrector {
            // F = f(u) D with D = d_a delta (independent of x_d)
            let dval = delta.g[a];
            let mut dg = [0.0; 3];
            let mut dh = [[0.0; 3]; 3];
            for b in 0..n {
                dg[b] = delta.h[a][b];
                for e in 0..n {
                    dh[b][e] = delta.t[a][b][e];
                }
            }
            corr.v[k] += c * f * dval;
            for i in 0..d {
                corr.g[k][i] += c * (fp * u.g[i] * dval + f * dg[i]);
                for j in 0..d {
                    corr.h[k][i][j] += c
                        * (u.g[i] * u.g[j] * dval
                            + fp * u.h[i][j] * dval
                            + fp * u.g[i] * dg[j]
                            + fp * u.g[j] * dg[i]
                            + f * dh[i][j]);
                }
            }
        }
        (keel, corr)
    }

    /// Full jet without membership checks.
    pub fn jet_unchecked(&self, x: &[f64]) -> FieldJet {
        let d = self.geometry().d();
        let (keel, corr) = self.parts_unchecked(x);
        let mut out = FieldJet::default();
        for k in 0..d {
            out.v[k] = keel.v[k] + corr.v[k];
            for i in 0..d {
                out.g[k][i] = keel.g[k][i] + corr.g[k][i];
                for j in 0..d {
                    out.h[k][i][j] = keel.h[k][i][j] + corr.h[k][i][j];
                }
            }
        }
        if self.mirror {
            let psi = self.motion.eval(x);
            for k in 0..d {
                out.v[k] = psi[k] - out.v[k];
                for i in 0..d {
                    out.g[k][i] = self.motion.skew_entry(k, i) - out.g[k][i];
                    for j in 0..d {
                        out.h[k][i][j] = -out.h[k][i][j];
                    }
                }
            }
        }
        out
    }

    /// Value and gradient on the region of half-width `2R`.
    pub fn eval(&self, x: &[f64]) -> Result<([f64; 3], GradientMatrix)> {
        self.keel.check(x, 2.0 * self.geometry().chart_half_width())?;
        let j = self.jet_unchecked(x);
        Ok((j.v, GradientMatrix::from_rows(self.geometry().d(), j.g)))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<GradientMatrix> {
        Ok(self.eval(x)?.1)
    }

    /// Jet of the corrector part alone (zero for `alpha > d`).
    pub fn corrector_jet(&self, x: &[f64]) -> FieldJet {
        self.parts_unchecked(x).1
    }

    /// `L u = mu Lap u + (lambda + mu) grad div u` on the region of half-width `R`.
    pub fn lame_residual(&self, x: &[f64]) -> Result<[f64; 3]> {
        self.keel.check(x, self.geometry().chart_half_width())?;
        Ok(lame_operator(&self.params, &self.jet_unchecked(x)))
    }
}

/// Applies the Lamé operator to a field jet.
pub fn lame_operator(p: &LameParams, j: &FieldJet) -> [f64; 3] {
    let d = p.d();
    let (l, mu) = (p.lambda(), p.mu());
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate().take(d) {
        let lap: f64 = (0..d).map(|k| j.h[i][k][k]).sum();
        let graddiv: f64 = (0..d).map(|k| j.h[k][i][k]).sum();
        *o = mu * lap + (l + mu) * graddiv;
    }
    out
}

/// The two terms that cancel for `alpha = 1`: `(lambda+mu) d_{1,d} u_bar` and
/// `(lambda + 2mu) d_{d,d}` of the corrector's last component.
pub fn cancellation_terms(p: &LameParams, geom: &InclusionPairGeometry, x: &[f64]) -> Result<(f64, f64)> {
    let field = VectorAuxField::new(*p, geom.clone(), 1)?;
    field.keel.check(x, 2.0 * geom.chart_half_width())?;
    let d = geom.d();
    let (keel, corr) = field.parts_unchecked(x);
    let a = (p.lambda() + p.mu()) * keel.h[0][0][d - 1];
    let b = p.longitudinal() * corr.h[d - 1][d - 1][d - 1];
    Ok((a, b))
}

/// `int_{Omega_R} |grad corrector|^2`, by tanh-sinh in `x_1` and exact
/// Gauss-Legendre across the gap (2D only).
pub fn corrector_energy(field: &VectorAuxField) -> Result<f64> {
    let g = field.geometry();
    if g.d() != 2 {
        return Err(CoreError::UnsupportedDimension(g.d()));
    }
    let r = g.chart_half_width();
    let nodes = [
        (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
        (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
        (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
        (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    ];
    let inner = |x1: f64| {
        let (lo, hi) = g.surfaces(&[x1]);
        let h = hi - lo;
        nodes
            .iter()
            .map(|&(t, w)| {
                let x2 = lo + 0.5 * (t + 1.0) * h;
                let c = field.corrector_jet(&[x1, x2]);
                let s: f64 = c.g[..2].iter().flat_map(|row| row[..2].iter()).map(|v| v * v).sum();
                0.5 * w * h * s
            })
            .sum::<f64>()
    };
    // split at the ridge where the integrand varies fastest
    let ridge = g.eps().powf(1.0 / g.m() as f64).min(0.5 * r);
    let mut total = 0.0;
    for (a, b) in [(0.0, ridge), (ridge, r)] {
        total += quadrature::double_exponential::integrate(inner, a, b, 1e-12).integral;
    }
    Ok(2.0 * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Outer;

    fn setup(m: u32, eps: f64) -> (LameParams, InclusionPairGeometry) {
        let p = LameParams::new(1.0, 1.0, 2).unwrap();
        let g = InclusionPairGeometry::model(2, m, 1.0, eps, 0.5, Outer::Disk { radius: 3.0 }).unwrap();
        (p, g)
    }

    #[test]
    fn bridge_values() {
        assert_eq!(bridge(0.0).0, 0.0);
        assert_eq!(bridge(1.0).0, 0.0);
        assert_eq!(bridge(0.5), (-0.125, 0.0));
    }

    #[test]
    fn keel_examples() {
        let (_, g) = setup(2, 0.1);
        let k = ScalarKeel::new(g.clone());
        let (lo, hi) = g.surfaces(&[0.2]);
        assert!((k.eval(&[0.2, hi]).unwrap().0 - 1.0).abs() < 1e-14);
        assert!((k.eval(&[0.2, 0.5 * (lo + hi)]).unwrap().0 - 0.5).abs() < 1e-14);
        assert!((k.eval(&[0.0, 0.0]).unwrap().1[1] - 10.0).abs() < 1e-12);
        assert!(k.eval(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn aux_boundary_values() {
        let (p, g) = setup(2, 0.01);
        let f1 = VectorAuxField::new(p, g.clone(), 1).unwrap();
        let (lo, hi) = g.surfaces(&[0.3]);
        let (v, _) = f1.eval(&[0.3, hi]).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-12 && v[1].abs() < 1e-12);
        let f3 = VectorAuxField::new(p, g.clone(), 3).unwrap();
        let (v, _) = f3.eval(&[0.3, lo]).unwrap();
        assert!(v[0].abs() < 1e-12 && v[1].abs() < 1e-12);
        let gr = f1.gradient(&[0.0, 0.0]).unwrap();
        assert!((gr.get(0, 1) - 100.0).abs() < 1e-10);
        assert!(VectorAuxField::new(p, g, 4).is_err());
    }

    #[test]
    fn mirror_swaps_boundary_values() {
        let (p, g) = setup(2, 0.01);
        let f = VectorAuxField::new(p, g.clone(), 2).unwrap().mirrored();
        let (lo, hi) = g.surfaces(&[0.2]);
        let (v, _) = f.eval(&[0.2, lo]).unwrap();
        assert!(v[0].abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12);
        let (v, _) = f.eval(&[0.2, hi]).unwrap();
        assert!(v[0].abs() < 1e-12 && v[1].abs() < 1e-12);
    }

    #[test]
    fn second_residual_component_is_pure_shear_term() {
        let (p, g) = setup(2, 0.01);
        let f = VectorAuxField::new(p, g.clone(), 1).unwrap();
        let x = [0.17, 0.003];
        let res = f.lame_residual(&x).unwrap();
        let c = f.corrector_jet(&x);
        assert!((res[1] - p.mu() * c.h[1][0][0]).abs() <= 1e-12 * res[1].abs().max(1.0));
    }
}
