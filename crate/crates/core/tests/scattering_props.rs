use std::f64::consts::PI;

use ist_core::lattice::{self, PotentialWindow};
use ist_core::scattering::{self, ColumnKind};
use ist_core::spectral::{self, CaseConfig, CaseId};
use ist_core::C64;
use proptest::prelude::*;

/// Background plus a localized Gaussian bump.
fn perturbed() -> impl Strategy<Value = PotentialWindow> {
    (0u8..4, 0.3f64..0.8, -PI..PI, 0.0f64..0.1, -4.0f64..4.0, 1.0f64..3.0, -PI..PI).prop_map(
        |(i, q0, th, amp, center, width, phase)| {
            let c = CaseConfig::new(CaseId::from_index(i + 1).unwrap(), q0, th).unwrap();
            let bg = lattice::background_field(&c, 0.0, 16).unwrap();
            PotentialWindow::from_fn(c, 0.0, 16, |n| {
                let x = (n as f64 - center) / width;
                bg.q_at(n) + C64::from_polar(amp * (-x * x).exp(), phase)
            })
            .unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn wronskian_and_site_independence(w in perturbed(), angle in 0.2f64..2.9) {
        let zeta = C64::from_polar(1.0 + 1e-6, angle);
        let sites: Vec<i64> = vec![-16, -7, 0, 5, 16];
        let cs = scattering::scattering_coefficients_at(&w, zeta, &sites).unwrap();
        for c in &cs {
            prop_assert!((c.wronskian_ratio - 1.0).norm() < 1e-8);
            prop_assert!((c.t11 - cs[0].t11).norm() < 1e-8 * cs[0].t11.norm().max(1.0));
            prop_assert!((c.t22 - cs[0].t22).norm() < 1e-8 * cs[0].t22.norm().max(1.0));
        }
        let theta = lattice::theta_products(&w).unwrap();
        prop_assert!((cs[0].det_t() - theta.theta_minus_inf).norm() < 1e-7 * theta.theta_minus_inf.norm().max(1.0));
    }

    #[test]
    fn jost_columns_solve_recursion(w in perturbed(), m in 0.3f64..3.0, a in -PI..PI) {
        let zeta = C64::from_polar(m, a);
        prop_assume!(w.cfg.singular_points().iter().all(|p| (zeta - p).norm() > 1e-2));
        prop_assume!((zeta + zeta.inv() - 2.0 * w.cfg.r).norm() > 1e-2);
        let p = spectral::point_from_zeta(&w.cfg, zeta).unwrap();
        for kind in [ColumnKind::M, ColumnKind::Mbar, ColumnKind::N, ColumnKind::Nbar] {
            let col = scattering::jost(&w, &p, kind).unwrap();
            prop_assert!(scattering::recursion_residual(&w, &col) < 1e-9, "{:?}", kind);
        }
    }

    #[test]
    fn symmetries_hold(w in perturbed()) {
        let samples = scattering::continuum_samples(6, 1e-6);
        let s = scattering::check_symmetries(&w, &samples).unwrap();
        prop_assert!(s.max() < 1e-8, "{:?}", s);
    }
}

#[test]
fn asymptotics_of_backgrounds() {
    for (id, q0) in [(CaseId::I, 0.6), (CaseId::II, 0.8), (CaseId::III, 0.6), (CaseId::IV, 0.6)] {
        let c = CaseConfig::new(id, q0, 0.2).unwrap();
        let w = lattice::background_field(&c, 0.0, 20).unwrap();
        let rep = scattering::asymptotic_checks(&w).unwrap();
        assert!(rep.max() < 1e-3, "{id:?}: {rep:?}");
    }
}
