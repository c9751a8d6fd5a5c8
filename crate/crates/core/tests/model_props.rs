use gapstress_core::{GradientMatrix, LameParams, energy_density, rigid_basis, traction_form};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = LameParams> {
    (2usize..=3, 0.1f64..5.0, -0.5f64..5.0).prop_map(|(d, mu, l)| LameParams::new(l.max(-0.6 * mu), mu, d).unwrap())
}

fn gradient(d: usize) -> impl Strategy<Value = GradientMatrix> {
    prop::array::uniform9(-3.0f64..3.0).prop_map(move |a| {
        GradientMatrix::from_rows(d, [[a[0], a[1], a[2]], [a[3], a[4], a[5]], [a[6], a[7], a[8]]])
    })
}

fn case() -> impl Strategy<Value = (LameParams, GradientMatrix, GradientMatrix, GradientMatrix, f64, f64)> {
    params().prop_flat_map(|p| {
        let d = p.d();
        (Just(p), gradient(d), gradient(d), gradient(d), -2.0f64..2.0, -2.0f64..2.0)
    })
}

proptest! {
    #[test]
    fn energy_is_symmetric_and_bilinear((p, a, b, c, s, t) in case()) {
        let ab = energy_density(&p, &a, &b).unwrap();
        let ba = energy_density(&p, &b, &a).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab.abs()));
        let lhs = energy_density(&p, &a.scale(s).add(&b.scale(t)), &c).unwrap();
        let rhs = s * energy_density(&p, &a, &c).unwrap() + t * energy_density(&p, &b, &c).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn energy_is_nonnegative_on_strains((p, a, _, _, _, _) in case()) {
        let e = energy_density(&p, &a, &a).unwrap();
        prop_assert!(e >= -1e-12);
        let skew = a.sub(&a.strain());
        prop_assert!(energy_density(&p, &skew, &skew).unwrap().abs() <= 1e-12);
        prop_assert!(energy_density(&p, &skew, &a).unwrap().abs() <= 1e-11);
    }

    #[test]
    fn rigid_motions_carry_no_energy((p, a, _, _, _, _) in case()) {
        for psi in rigid_basis(p.d()).unwrap() {
            let g = psi.gradient();
            prop_assert_eq!(g.strain().max_abs(), 0.0);
            prop_assert!(energy_density(&p, &g, &a).unwrap().abs() <= 1e-12);
        }
    }

    #[test]
    fn strain_trace_is_divergence((p, a, _, _, _, _) in case()) {
        let e = a.strain();
        let tr: f64 = (0..p.d()).map(|i| e.get(i, i)).sum();
        prop_assert!((tr - a.divergence()).abs() < 1e-12);
    }

    #[test]
    fn traction_is_linear((p, a, _, _, s, _) in case(), angle in 0.0f64..6.3) {
        let n = [angle.cos(), angle.sin(), 0.0];
        let t1 = traction_form(&p, &a.scale(s), &n[..p.d()]).unwrap();
        let t0 = traction_form(&p, &a, &n[..p.d()]).unwrap();
        for i in 0..p.d() {
            prop_assert!((t1[i] - s * t0[i]).abs() < 1e-10 * (1.0 + t1[i].abs()));
        }
    }
}

#[test]
fn ellipticity_boundary_is_rejected() {
    assert!(LameParams::new(-1.0, 1.0, 2).is_err());
    assert!(LameParams::new(-0.99, 1.0, 2).is_ok());
    assert!(LameParams::new(-2.0 / 3.0, 1.0, 3).is_err());
    assert!(LameParams::new(1.0, 0.0, 2).is_err());
    assert!(LameParams::new(1.0, 1.0, 4).is_err());
}

#[test]
fn rotation_traction_vanishes() {
    let p = LameParams::new(2.0, 0.5, 3).unwrap();
    for psi in rigid_basis(3).unwrap() {
        let t = traction_form(&p, &psi.gradient(), &[0.0, 0.6, 0.8]).unwrap();
        assert!(t.iter().all(|v| v.abs() < 1e-15));
    }
    assert!(traction_form(&p, &GradientMatrix::zeros(3), &[0.0, 0.6, 0.81]).is_err());
}
