use gapstress_core::{InclusionPairGeometry, Outer};
use proptest::prelude::*;

fn model(d: usize, m: u32, kappa: f64, eps: f64) -> InclusionPairGeometry {
    InclusionPairGeometry::model(d, m, kappa, eps, 0.5, Outer::Disk { radius: 3.0 }).unwrap()
}

#[test]
fn chart_examples() {
    let g = model(2, 2, 1.0, 0.01);
    assert!((g.surface_chart(1, &[0.1]).unwrap() - 0.005).abs() < 1e-15);
    assert!((g.surface_chart(2, &[0.1]).unwrap() + 0.005).abs() < 1e-15);
    assert_eq!(g.surface_chart(1, &[0.0]).unwrap(), 0.0);
    assert!((g.gap(&[0.1]).unwrap() - 0.02).abs() < 1e-15);
    assert!(g.gap(&[1.2]).is_err());
    let g4 = model(2, 4, 2.0, 1e-12);
    assert!((g4.gap(&[0.5]).unwrap() - 0.125).abs() < 1e-11);
}

#[test]
fn disk_mapping_examples() {
    let g = InclusionPairGeometry::disks_to_model(1.0, 1.0, 0.05, 3.0).unwrap();
    assert_eq!((g.m(), g.kappa()), (2, 1.0));
    let g = InclusionPairGeometry::disks_to_model(2.0, 2.0, 0.05, 6.0).unwrap();
    assert!((g.kappa() - 0.5).abs() < 1e-15);
    let g = InclusionPairGeometry::disks_to_model(1e9, 1.0, 0.05, 3e9).unwrap();
    assert!((g.kappa() - 0.5).abs() < 1e-8);
    assert!(InclusionPairGeometry::disks_to_model(1.0, 1.0, 0.05, 2.0).is_err());
}

#[test]
fn disk_chart_deviates_from_model_at_fourth_order() {
    for r in [0.5, 1.0, 2.0] {
        let g = InclusionPairGeometry::disks_to_model(r, r, 0.01, 5.0 * r).unwrap();
        let model = g.to_model();
        let big_r = g.chart_half_width();
        let dev = (0..=200)
            .map(|k| {
                let x = big_r * k as f64 / 200.0;
                (g.surface_chart(1, &[x]).unwrap() - model.surface_chart(1, &[x]).unwrap()).abs()
            })
            .fold(0.0, f64::max);
        // circle minus parabola is x^4/(8 r^3) + ...
        assert!(dev <= 0.2 * big_r.powi(4) / r.powi(3), "r={r} dev={dev}");
    }
}

#[test]
fn samples_cover_axis_and_ridge() {
    for (d, m) in [(2, 2), (2, 4), (3, 2), (3, 5)] {
        let g = model(d, m, 1.3, 0.004);
        let single = g.narrow_region_samples(1);
        assert!(single[0].iter().all(|v| v.abs() < 1e-15));
        for n in [2, 10, 57] {
            let pts = g.narrow_region_samples(n);
            assert_eq!(pts.len(), n);
            let ridge = g.eps().powf(1.0 / m as f64);
            let mut on_ridge = 0;
            let mut on_axis = 0;
            for p in &pts {
                assert!(g.in_narrow_region(p, g.chart_half_width() * (1.0 + 1e-12)), "{p:?}");
                let rho = p[..d - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
                if rho >= 0.5 * ridge && rho <= 2.0 * ridge {
                    on_ridge += 1;
                }
                if rho == 0.0 {
                    on_axis += 1;
                }
            }
            assert!(on_ridge >= (n / 10).max(1), "n={n} ridge={on_ridge}");
            assert!(on_axis >= 1);
        }
    }
}

#[test]
fn period_cell_tracks_eps() {
    let g = InclusionPairGeometry::period_cell(1.0, 2, 0.02, 1.5).unwrap();
    assert_eq!(g.outer(), Outer::Rect { half_width: 1.5, half_height: 1.01 });
    let h = g.with_eps(0.01).unwrap();
    assert_eq!(h.outer(), Outer::Rect { half_width: 1.5, half_height: 1.005 });
}

proptest! {
    #[test]
    fn gap_excess_is_homogeneous(m in 2u32..8, kappa in 0.1f64..4.0, x in 0.0f64..0.5, s in 0.5f64..2.0) {
        let eps = 0.01;
        let g = model(2, m, kappa, eps);
        let scaled = model(2, m, kappa * s.powi(m as i32), eps).with_chart_half_width(0.5 * s.max(1.0)).unwrap();
        let a = g.gap(&[x]).unwrap() - eps;
        let b = scaled.gap(&[x / s]).unwrap() - eps;
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1e-300) + 1e-16);
    }

    #[test]
    fn gap_grows_away_from_contact(m in 2u32..8, kappa in 0.1f64..4.0, x in 0.001f64..0.5, y in 0.0f64..1.0) {
        let g = model(3, m, kappa, 0.02);
        let inner = [x * y * 0.6, x * y * 0.8];
        let outer = [x * 0.6, x * 0.8];
        prop_assert!(g.gap(&outer).unwrap() >= g.gap(&inner).unwrap());
        prop_assert!(g.gap(&inner).unwrap() >= g.eps());
    }
}
