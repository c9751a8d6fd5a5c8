//! Isotropic Lamé material, gradient matrices and the rigid displacement basis.

use crate::error::{CoreError, Result};

/// Lamé constants together with the spatial dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LameParams {
    lambda: f64,
    mu: f64,
    d: usize,
}

impl LameParams {
    /// Rejects parameters violating `mu > 0` and `d*lambda + 2*mu > 0`.
    pub fn new(lambda: f64, mu: f64, d: usize) -> Result<Self> {
        if d != 2 && d != 3 {
            return Err(CoreError::UnsupportedDimension(d));
        }
        let combo = d as f64 * lambda + 2.0 * mu;
        if !(mu > 0.0) || !(combo > 0.0) || !lambda.is_finite() || !mu.is_finite() {
            return Err(CoreError::NotElliptic { mu, combo });
        }
        Ok(Self { lambda, mu, d })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `lambda + 2 mu`, the longitudinal modulus.
    pub fn longitudinal(&self) -> f64 {
        self.lambda + 2.0 * self.mu
    }

    /// Young-type combination `mu (3 lambda + 2 mu) / (lambda + mu)`.
    pub fn young(&self) -> f64 {
        self.mu * (3.0 * self.lambda + 2.0 * self.mu) / (self.lambda + self.mu)
    }

    /// Same material in another dimension.
    pub fn with_dim(&self, d: usize) -> Result<Self> {
        Self::new(self.lambda, self.mu, d)
    }
}

/// Matrix of partial derivatives, entry `(i, j)` holding `d u^i / d x_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientMatrix {
    d: usize,
    m: [[f64; 3]; 3],
}

impl GradientMatrix {
    pub fn zeros(d: usize) -> Self {
        Self { d, m: [[0.0; 3]; 3] }
    }

    /// Builds from rows; only the leading `d x d` block is used.
    pub fn from_rows(d: usize, rows: [[f64; 3]; 3]) -> Self {
        let mut m = [[0.0; 3]; 3];
        for i in 0..d {
            m[i][..d].copy_from_slice(&rows[i][..d]);
        }
        Self { d, m }
    }

    pub fn from_2x2(rows: [[f64; 2]; 2]) -> Self {
        let mut g = Self::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                g.m[i][j] = rows[i][j];
            }
        }
        g
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.d && j < self.d);
        self.m[i][j] = v;
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        self.m
    }

    pub fn divergence(&self) -> f64 {
        (0..self.d).map(|i| self.m[i][i]).sum()
    }

    /// Symmetric part `(G + G^T) / 2`.
    pub fn strain(&self) -> Self {
        let mut s = Self::zeros(self.d);
        for i in 0..self.d {
            for j in 0..self.d {
                s.m[i][j] = 0.5 * (self.m[i][j] + self.m[j][i]);
            }
        }
        s
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.d);
        for i in 0..self.d {
            for j in 0..self.d {
                t.m[i][j] = self.m[j][i];
            }
        }
        t
    }

    pub fn scale(&self, a: f64) -> Self {
        let mut s = *self;
        for row in s.m.iter_mut() {
            for v in row.iter_mut() {
                *v *= a;
            }
        }
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.d, other.d);
        let mut s = *self;
        for i in 0..3 {
            for j in 0..3 {
                s.m[i][j] += other.m[i][j];
            }
        }
        s
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn frobenius(&self) -> f64 {
        self.m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }
}

/// One element of the rigid displacement basis, `x -> constant + skew * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    alpha: usize,
    d: usize,
    constant: [f64; 3],
    skew: [[f64; 3]; 3],
}

impl RigidMotion {
    /// `alpha` is 1-based: translations `e_1..e_d` first, then `x_j e_k - x_k e_j` for `j < k`.
    pub fn new(d: usize, alpha: usize) -> Result<Self> {
        if d != 2 && d != 3 {
            return Err(CoreError::UnsupportedDimension(d));
        }
        let count = d * (d + 1) / 2;
        if alpha == 0 || alpha > count {
            return Err(CoreError::InvalidIndex { alpha, d });
        }
        let mut constant = [0.0; 3];
        let mut skew = [[0.0; 3]; 3];
        if alpha <= d {
            constant[alpha - 1] = 1.0;
        } else {
            let (j, k) = rotation_pair(d, alpha);
            // component k gets +x_j, component j gets -x_k
            skew[k][j] = 1.0;
            skew[j][k] = -1.0;
        }
        Ok(Self { alpha, d, constant, skew })
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn eval(&self, x: &[f64]) -> [f64; 3] {
        let mut out = self.constant;
        for (i, o) in out.iter_mut().enumerate().take(self.d) {
            for j in 0..self.d {
                *o += self.skew[i][j] * x[j];
            }
        }
        out
    }

    /// Entry `(k, j)` of the (constant) gradient.
    pub fn skew_entry(&self, k: usize, j: usize) -> f64 {
        self.skew[k][j]
    }

    pub fn gradient(&self) -> GradientMatrix {
        GradientMatrix::from_rows(self.d, self.skew)
    }
}

/// Zero-based `(j, k)` with `j < k` for rotation index `alpha > d`.
fn rotation_pair(d: usize, alpha: usize) -> (usize, usize) {
    let mut idx = d;
    for j in 0..d {
        for k in (j + 1)..d {
            idx += 1;
            if idx == alpha {
                return (j, k);
            }
        }
    }
    unreachable!("alpha checked by caller")
}

pub fn rigid_count(d: usize) -> usize {
    d * (d + 1) / 2
}

pub fn rigid_basis(d: usize) -> Result<Vec<RigidMotion>> {
    if d != 2 && d != 3 {
        return Err(CoreError::UnsupportedDimension(d));
    }
    (1..=rigid_count(d)).map(|a| RigidMotion::new(d, a)).collect()
}

/// Bilinear elastic energy density `(C e(u), e(v))`, written out componentwise.
pub fn energy_density(p: &LameParams, gu: &GradientMatrix, gv: &GradientMatrix) -> Result<f64> {
    check_dim(p.d, gu.d)?;
    check_dim(p.d, gv.d)?;
    let (l, mu) = (p.lambda, p.mu);
    let u = |i: usize, j: usize| gu.m[i][j];
    let v = |i: usize, j: usize| gv.m[i][j];
    let val = if p.d == 2 {
        l * (u(0, 0) + u(1, 1)) * (v(0, 0) + v(1, 1))
            + mu * (2.0 * u(0, 0) * v(0, 0)
                + (u(0, 1) + u(1, 0)) * (v(0, 1) + v(1, 0))
                + 2.0 * u(1, 1) * v(1, 1))
    } else {
        let du = u(0, 0) + u(1, 1) + u(2, 2);
        let dv = v(0, 0) + v(1, 1) + v(2, 2);
        l * du * dv
            + mu * (2.0 * (u(0, 0) * v(0, 0) + u(1, 1) * v(1, 1) + u(2, 2) * v(2, 2))
                + (u(0, 1) + u(1, 0)) * (v(0, 1) + v(1, 0))
                + (u(0, 2) + u(2, 0)) * (v(0, 2) + v(2, 0))
                + (u(1, 2) + u(2, 1)) * (v(1, 2) + v(2, 1)))
    };
    Ok(val)
}

/// Conormal derivative `lambda (div u) n + mu (grad u + grad u^T) n`.
pub fn traction_form(p: &LameParams, gu: &GradientMatrix, n: &[f64]) -> Result<[f64; 3]> {
    check_dim(p.d, gu.d)?;
    check_dim(p.d, n.len())?;
    let len = n.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (len - 1.0).abs() > 1e-12 {
        return Err(CoreError::NonUnitNormal(len));
    }
    let div = gu.divergence();
    let mut t = [0.0; 3];
    for i in 0..p.d {
        let mut s = p.lambda * div * n[i];
        for j in 0..p.d {
            s += p.mu * (gu.m[i][j] + gu.m[j][i]) * n[j];
        }
        t[i] = s;
    }
    Ok(t)
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(CoreError::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_order_2d() {
        let b = rigid_basis(2).unwrap();
        let x = [0.3, -0.7];
        assert_eq!(b[0].eval(&x)[..2], [1.0, 0.0]);
        assert_eq!(b[1].eval(&x)[..2], [0.0, 1.0]);
        assert_eq!(b[2].eval(&x)[..2], [0.7, 0.3]);
        assert_eq!(b[2].gradient().strain().max_abs(), 0.0);
    }

    #[test]
    fn basis_order_3d() {
        let b = rigid_basis(3).unwrap();
        assert_eq!(b.len(), 6);
        let x = [1.0, 2.0, 3.0];
        // x1 e2 - x2 e1, x1 e3 - x3 e1, x2 e3 - x3 e2
        assert_eq!(b[3].eval(&x), [-2.0, 1.0, 0.0]);
        assert_eq!(b[4].eval(&x), [-3.0, 0.0, 1.0]);
        assert_eq!(b[5].eval(&x), [0.0, -3.0, 2.0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(rigid_basis(4).is_err());
        assert!(LameParams::new(1.0, 0.0, 2).is_err());
        assert!(LameParams::new(-1.5, 1.0, 2).is_err());
        assert!(LameParams::new(-0.9, 1.0, 2).is_ok());
        assert!(RigidMotion::new(2, 4).is_err());
    }

    #[test]
    fn energy_examples() {
        let p = LameParams::new(1.0, 1.0, 2).unwrap();
        let shear = GradientMatrix::from_2x2([[0.0, 1.0], [0.0, 0.0]]);
        assert_eq!(energy_density(&p, &shear, &shear).unwrap(), 1.0);
        let stretch = GradientMatrix::from_2x2([[0.0, 0.0], [0.0, 1.0]]);
        assert_eq!(energy_density(&p, &stretch, &stretch).unwrap(), 3.0);
        let g3 = GradientMatrix::zeros(3);
        assert!(energy_density(&p, &g3, &g3).is_err());
    }

    #[test]
    fn traction_examples() {
        let p = LameParams::new(1.0, 1.0, 2).unwrap();
        let id = GradientMatrix::from_2x2([[1.0, 0.0], [0.0, 1.0]]);
        let t = traction_form(&p, &id, &[0.0, 1.0]).unwrap();
        assert_eq!(&t[..2], &[0.0, 4.0]);
        assert!(traction_form(&p, &id, &[0.0, 1.1]).is_err());
        let rot = rigid_basis(2).unwrap()[2].gradient();
        let t = traction_form(&p, &rot, &[0.6, 0.8]).unwrap();
        assert_eq!(&t[..2], &[0.0, 0.0]);
    }
}
