use gapstress_core::auxiliary::lame_operator;
use gapstress_core::{
    InclusionPairGeometry, LameParams, Outer, RigidMotion, ScalarKeel, VectorAuxField, cancellation_terms,
    corrector_energy,
};
use proptest::prelude::*;

fn model(d: usize, m: u32, kappa: f64, eps: f64) -> InclusionPairGeometry {
    InclusionPairGeometry::model(d, m, kappa, eps, 0.5, Outer::Disk { radius: 3.0 }).unwrap()
}

/// Point at height fraction `t` across the gap above `xp`.
fn point(g: &InclusionPairGeometry, xp: &[f64], t: f64) -> Vec<f64> {
    let (lo, hi) = g.surfaces(xp);
    let mut x = xp.to_vec();
    x.push(lo + t * (hi - lo));
    x
}

fn setting() -> impl Strategy<Value = (LameParams, InclusionPairGeometry, Vec<f64>)> {
    (2usize..=3, 2u32..7, 0.2f64..3.0, -3.0f64..0.5, 0.1f64..4.0, 0.1f64..4.0).prop_flat_map(
        |(d, m, kappa, log_eps, l, mu)| {
            let p = LameParams::new(l, mu, d).unwrap();
            let g = model(d, m, kappa, 0.02 * 10f64.powf(log_eps).min(1.0));
            (Just(p), Just(g), prop::collection::vec(-0.35f64..0.35, d - 1), 0.0f64..1.0)
                .prop_map(|(p, g, xp, t)| {
                    let x = point(&g, &xp, t);
                    (p, g, x)
                })
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn bad_terms_cancel((p, g, x) in setting()) {
        let (a, b) = cancellation_terms(&p, &g, &x).unwrap();
        prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(b.abs()), "a={a} b={b}");
    }

    #[test]
    fn boundary_values_are_exact((p, g, x) in setting(), alpha_seed in 0usize..6) {
        let d = g.d();
        let alpha = 1 + alpha_seed % (d * (d + 1) / 2);
        let xp = &x[..d - 1];
        let f = VectorAuxField::new(p, g.clone(), alpha).unwrap();
        let psi = RigidMotion::new(d, alpha).unwrap();
        let up = point(&g, xp, 1.0);
        let down = point(&g, xp, 0.0);
        let (vu, _) = f.eval(&up).unwrap();
        let (vd, _) = f.eval(&down).unwrap();
        let target = psi.eval(&up);
        for k in 0..d {
            prop_assert!((vu[k] - target[k]).abs() <= 1e-12);
            prop_assert!(vd[k].abs() <= 1e-12);
        }
        let c_up = f.corrector_jet(&up);
        prop_assert!(c_up.v.iter().all(|v| v.abs() <= 1e-12));
        if alpha > d {
            prop_assert!(f.corrector_jet(&x).v.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn vertical_keel_slope_is_inverse_gap((_p, g, x) in setting()) {
        let d = g.d();
        let k = ScalarKeel::new(g.clone());
        let (u, grad) = k.eval(&x).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&u));
        let delta = g.gap(&x[..d - 1]).unwrap();
        prop_assert!((grad[d - 1] * delta - 1.0).abs() < 1e-12);
    }
}

fn fd_errors(f: &VectorAuxField, x: &[f64], h: f64) -> (f64, f64) {
    let d = x.len();
    let jet = f.jet_unchecked(x);
    let mut eg: f64 = 0.0;
    let mut eh: f64 = 0.0;
    for i in 0..d {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        let (jp, jm) = (f.jet_unchecked(&xp), f.jet_unchecked(&xm));
        for k in 0..d {
            eg = eg.max(((jp.v[k] - jm.v[k]) / (2.0 * h) - jet.g[k][i]).abs());
            for j in 0..d {
                eh = eh.max(((jp.g[k][j] - jm.g[k][j]) / (2.0 * h) - jet.h[k][j][i]).abs());
            }
        }
    }
    (eg, eh)
}

#[test]
fn derivatives_match_central_differences_at_second_order() {
    for (d, m, alpha) in [(2, 2, 1), (2, 3, 2), (2, 4, 3), (3, 2, 3), (3, 4, 1), (3, 5, 5)] {
        let p = LameParams::new(1.3, 0.7, d).unwrap();
        let g = model(d, m, 1.1, 0.05);
        let xp: Vec<f64> = if d == 2 { vec![0.21] } else { vec![0.17, -0.12] };
        let x = point(&g, &xp, 0.37);
        let f = VectorAuxField::new(p, g, alpha).unwrap();
        let hs = [4e-3, 2e-3, 1e-3];
        let errs: Vec<(f64, f64)> = hs.iter().map(|&h| fd_errors(&f, &x, h)).collect();
        for w in errs.windows(2) {
            let og = (w[0].0 / w[1].0).log2();
            let oh = (w[0].1 / w[1].1).log2();
            assert!(og >= 1.9, "d={d} m={m} alpha={alpha} gradient order {og}");
            assert!(oh >= 1.9, "d={d} m={m} alpha={alpha} hessian order {oh}");
        }
    }
}

#[test]
fn second_component_residual_is_shear_only_for_quadratic_profiles() {
    let p = LameParams::new(1.0, 1.0, 2).unwrap();
    let g = model(2, 2, 1.0, 0.01);
    let f = VectorAuxField::new(p, g.clone(), 1).unwrap();
    for (x1, t) in [(0.0, 0.3), (0.1, 0.5), (0.33, 0.9)] {
        let x = point(&g, &[x1], t);
        let res = f.lame_residual(&x).unwrap();
        let c = f.corrector_jet(&x);
        let delta = g.gap(&[x1]).unwrap();
        assert!((res[1] - p.mu() * c.h[1][0][0]).abs() <= 1e-12 / (delta * delta));
    }
}

#[test]
fn residual_times_gap_stays_bounded_under_refinement() {
    let p = LameParams::new(1.0, 1.0, 2).unwrap();
    for (m, alpha) in [(2, 1), (2, 2), (3, 1), (4, 3)] {
        let mut vals = Vec::new();
        for k in 0..6 {
            let eps = 2e-3 / 2f64.powi(k);
            let g = model(2, m, 1.0, eps);
            let f = VectorAuxField::new(p, g.clone(), alpha).unwrap();
            let x = point(&g, &[0.25], 0.3);
            let res = f.lame_residual(&x).unwrap();
            let delta = g.gap(&[0.25]).unwrap();
            vals.push(res[0].hypot(res[1]) * delta);
        }
        let base = vals[0].max(1e-12);
        assert!(vals.iter().all(|v| *v <= 2.0 * base), "m={m} alpha={alpha} {vals:?}");
    }
}

#[test]
fn nearly_flat_plates_have_no_residual() {
    let p = LameParams::new(1.0, 1.0, 2).unwrap();
    let g = model(2, 2, 1e-14, 0.01);
    for alpha in 1..=2 {
        let f = VectorAuxField::new(p, g.clone(), alpha).unwrap();
        let x = point(&g, &[0.3], 0.4);
        let res = f.lame_residual(&x).unwrap();
        assert!(res[0].abs() + res[1].abs() < 1e-9, "{res:?}");
    }
}

#[test]
fn corrector_energy_stays_bounded() {
    let p = LameParams::new(1.0, 1.0, 2).unwrap();
    for alpha in 1..=2 {
        let energies: Vec<f64> = [1e-2, 5e-3, 2.5e-3, 1.25e-3, 1e-3]
            .iter()
            .map(|&eps| corrector_energy(&VectorAuxField::new(p, model(2, 2, 1.0, eps), alpha).unwrap()).unwrap())
            .collect();
        assert!(energies.iter().all(|e| e.is_finite() && *e <= 2.0 * energies[0]), "{energies:?}");
    }
}

#[test]
fn parallel_plate_operator_is_zero_on_linear_fields() {
    let p = LameParams::new(1.0, 2.0, 2).unwrap();
    let mut j = gapstress_core::auxiliary::FieldJet::default();
    j.g[0][1] = 3.0;
    assert_eq!(lame_operator(&p, &j), [0.0, 0.0, 0.0]);
}
