use std::f64::consts::PI;

use gapstress_core::anisotropy::{g_closed_form, isotropic_mismatch};
use gapstress_core::{
    BlowUpFactorVector, Growth, InclusionPairGeometry, LameParams, Outer, a11_leading, anisotropy, blowup_matrix,
    c_diff_leading, effective_moduli, grad_u_asymptotic, q_closed_form, q_integral, rate, theorem_coefficient,
};
use proptest::prelude::*;
use statrs::function::beta::beta;

fn model(d: usize, m: u32, kappa: f64, eps: f64) -> InclusionPairGeometry {
    InclusionPairGeometry::model(d, m, kappa, eps, 0.5, Outer::Disk { radius: 3.0 }).unwrap()
}

#[test]
fn quadrature_matches_closed_form_everywhere() {
    for d in 2..=3 {
        for m in 2..=12 {
            for tilde in [false, true] {
                match (q_integral(d, m, tilde), q_closed_form(d, m, tilde)) {
                    (Ok(a), Ok(b)) => assert!((a - b).abs() <= 1e-9, "d={d} m={m} tilde={tilde}: {a} vs {b}"),
                    (Err(_), Err(_)) => {}
                    other => panic!("convergence disagreement at d={d} m={m}: {other:?}"),
                }
            }
        }
    }
}

#[test]
fn tilde_integral_reduces_to_arctan() {
    // s = t^4 turns 2 int t^3/(1+t^8) into (1/2) int 1/(1+s^2)
    assert!((q_integral(3, 8, true).unwrap() - PI / 4.0).abs() < 1e-12);
    assert!((q_integral(2, 4, false).unwrap() - 2.221_441_469_079_183).abs() < 1e-12);
}

#[test]
fn capacity_examples() {
    let p = LameParams::new(1.0, 1.0, 2).unwrap();
    let a = a11_leading(&p, &model(2, 2, 1.0, 1e-4), 1).unwrap();
    assert!((a.value() - 314.159_265_358_979_3).abs() < 1e-9);
    assert!(!a.unknown_constant);
    let q = a11_leading(&p, &model(2, 3, 1.0, 1e-3), 3).unwrap();
    assert_eq!(q.growth, Growth::Log);
    assert!((q.value() - 2.0 * 3.0 / 3.0 * 1e-3f64.ln().abs()).abs() < 1e-12);
    let p3 = LameParams::new(1.0, 2.0, 3).unwrap();
    let a3 = a11_leading(&p3, &model(3, 2, 0.5, 1e-3), 3).unwrap();
    assert!((a3.value() - PI * 5.0 / 0.5 * 1e-3f64.ln().abs()).abs() < 1e-9);
    assert!(a11_leading(&p3, &model(3, 3, 0.5, 1e-3), 4).is_err());
}

#[test]
fn theorem_gradient_prediction_scales_with_inverse_root_eps() {
    let p = LameParams::new(1.0, 1.0, 2).unwrap();
    let b = BlowUpFactorVector::new(2, vec![0.7, 0.0, 0.0]).unwrap();
    let g = model(2, 2, 1.0, 0.01);
    let e01 = grad_u_asymptotic(&p, &g, &b, &[0.0, 0.0]).unwrap().get(0, 1);
    assert!((e01 - 0.7 / (PI * 0.1)).abs() < 1e-12);
    let zero = grad_u_asymptotic(&p, &g, &BlowUpFactorVector::zeros(2), &[0.0, 0.0]).unwrap();
    assert_eq!(zero.max_abs(), 0.0);
    assert!(grad_u_asymptotic(&p, &g, &b, &[0.6, 0.0]).is_err());
}

#[test]
fn anisotropic_weights_integrate_to_beta_values() {
    for m in [2u32, 3, 4, 5, 7] {
        for (k, kp) in [(1.0, 1.0), (0.5, 2.0), (3.0, 0.7)] {
            let a = anisotropy(m, k, kp).unwrap();
            let e = 1.0 / m as f64;
            let first = 0.5 * (beta(e, 3.0 * e + 1.0) + beta(e + 1.0, 3.0 * e));
            let oracle = 4.0 * (k.powf(-2.0 * e) * first + kp.powf(-2.0 * e) * first);
            assert!((a.g_tilde - oracle).abs() < 1e-9, "m={m}: {} vs {oracle}", a.g_tilde);
            assert!((a.g - g_closed_form(m)).abs() < 1e-9);
        }
    }
}

#[test]
fn isotropic_reduction_is_exact_only_for_quadratic_profiles() {
    assert!((isotropic_mismatch(2) - 1.0).abs() < 1e-14);
    for m in 3..9 {
        assert!(isotropic_mismatch(m) > 1.05, "m={m}");
    }
    let a = anisotropy(2, 1.7, 1.7).unwrap();
    assert!((a.higher_coefficients().0 - 1.7 / PI).abs() < 1e-10);
}

#[test]
fn printed_rotation_coefficients_are_half_the_capacity_inverse() {
    let p = LameParams::new(1.0, 1.0, 3).unwrap();
    for m in [4u32, 5, 7] {
        let g = model(3, m, 1.2, 1e-3);
        for alpha in 5..=6 {
            let printed = theorem_coefficient(&p, &g, alpha).unwrap();
            let inverse = 1.0 / a11_leading(&p, &g, alpha).unwrap().value();
            assert!((printed / inverse - 0.5).abs() < 1e-12);
        }
    }
}

fn covered() -> impl Strategy<Value = (usize, u32, usize)> {
    prop_oneof![
        (Just(2usize), 2u32..10, 1usize..=2),
        (Just(2usize), 3u32..10, Just(3usize)),
        (Just(3usize), 2u32..10, 1usize..=3),
        (Just(3usize), 4u32..10, Just(4usize)),
    ]
}

proptest! {
    #[test]
    fn theorem_coefficients_agree_with_capacity_inverse(
        (d, m, alpha) in covered(),
        kappa in 0.1f64..5.0,
        log_eps in -8.0f64..-1.0,
        l in 0.1f64..5.0,
        mu in 0.1f64..5.0,
    ) {
        let p = LameParams::new(l, mu, d).unwrap();
        let g = model(d, m, kappa, 10f64.powf(log_eps) * 0.4);
        let mut b = vec![0.0; d * (d + 1) / 2];
        b[alpha - 1] = 1.0;
        let c = c_diff_leading(&p, &g, &BlowUpFactorVector::new(d, b).unwrap()).unwrap();
        let t = theorem_coefficient(&p, &g, alpha).unwrap();
        let c = c[alpha - 1].unwrap();
        prop_assert!((t - c).abs() <= 1e-12 * c.abs(), "{t} vs {c}");
    }

    #[test]
    fn rates_decrease_with_eps(d in 2usize..=3, m in 2u32..10, kappa in 0.1f64..5.0, a in 1e-6f64..0.49, s in 0.05f64..0.95) {
        let small = a * s;
        let (r0, r1) = (rate(d, m, kappa, small).unwrap(), rate(d, m, kappa, a).unwrap());
        prop_assert!(r0.rho_d < r1.rho_d);
        let pairs = [(r0.rho_md, r1.rho_md), (r0.e, r1.e), (r0.f, r1.f)];
        for (x, y) in pairs {
            if let (Some(x), Some(y)) = (x, y) {
                prop_assert!(x >= 0.0 && y >= 0.0);
                if y > 0.0 {
                    prop_assert!(x < y);
                }
            }
        }
    }

    #[test]
    fn blowup_matrix_is_linear(d in 2usize..=3, s in -5.0f64..5.0, vals in prop::collection::vec(-3.0f64..3.0, 6)) {
        let p = LameParams::new(1.5, 0.8, d).unwrap();
        let b = BlowUpFactorVector::new(d, vals[..d * (d + 1) / 2].to_vec()).unwrap();
        let m = blowup_matrix(&p, d, &b).unwrap();
        let ms = blowup_matrix(&p, d, &b.scale(s)).unwrap();
        prop_assert!(ms.sub(&m.scale(s)).max_abs() <= 1e-14 * (1.0 + m.max_abs()));
        for i in 0..d {
            for j in 0..d - 1 {
                prop_assert_eq!(m.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn prediction_on_axis_is_dominated_by_last_column(
        d in 2usize..=3,
        m in 2u32..7,
        xd in -0.4f64..0.4,
        trans in prop::collection::vec(0.5f64..3.0, 3),
        signs in prop::collection::vec(any::<bool>(), 3),
        rot in prop::collection::vec(-3.0f64..3.0, 3),
    ) {
        let eps = 1e-4;
        let p = LameParams::new(1.0, 1.0, d).unwrap();
        let g = model(d, m, 1.0, eps);
        let mut vals: Vec<f64> = (0..d).map(|i| if signs[i] { trans[i] } else { -trans[i] }).collect();
        vals.extend_from_slice(&rot[..d * (d - 1) / 2]);
        let b = BlowUpFactorVector::new(d, vals).unwrap();
        let mut x = vec![0.0; d];
        x[d - 1] = xd * eps;
        let gr = grad_u_asymptotic(&p, &g, &b, &x).unwrap();
        let last = (0..d).map(|i| gr.get(i, d - 1).abs()).fold(0.0, f64::max);
        // the other columns only carry O(1) corrector and rotation terms
        for i in 0..d {
            for j in 0..d - 1 {
                prop_assert!(gr.get(i, j).abs() <= 0.05 * last, "({i},{j}) = {} vs {last}", gr.get(i, j));
            }
        }
    }

    #[test]
    fn moduli_follow_capacity_structure(mu in 0.1f64..4.0, l in 0.1f64..4.0, m in 2u32..8, eps in 1e-4f64..0.1) {
        let p = LameParams::new(l, mu, 2).unwrap();
        let e = effective_moduli(&p, m, 1.3, 0.9, 1.0, eps).unwrap();
        let a = a11_leading(&p, &model(2, m, 1.0, eps), 1).unwrap().value();
        prop_assert!((e.mu_star - a * 0.9 / 1.3).abs() <= 1e-12 * a);
        prop_assert!((e.e_star / e.mu_star - p.young() / mu).abs() <= 1e-12 * e.e_star / e.mu_star);
    }

    #[test]
    fn anisotropic_tilde_integral_is_symmetric(m in 2u32..9, k in 0.2f64..5.0, kp in 0.2f64..5.0) {
        let a = anisotropy(m, k, kp).unwrap();
        let b = anisotropy(m, kp, k).unwrap();
        prop_assert!((a.g_tilde - b.g_tilde).abs() <= 1e-10 * a.g_tilde);
        prop_assert!(a.g > 0.0 && a.g_tilde > 0.0);
    }
}
