use std::f64::consts::PI;

use ist_core::spectral::{self, CaseConfig, CaseId, RegionTag};
use ist_core::C64;
use proptest::prelude::*;

fn case_strategy() -> impl Strategy<Value = CaseConfig> {
    (0u8..4, 0.05f64..0.95, -PI..PI).prop_map(|(i, q0, th)| {
        let id = CaseId::from_index(i + 1).unwrap();
        let q0 = if id.is_unit_circle_case() { q0 } else { q0 * 2.0 };
        CaseConfig::new(id, q0, th).unwrap()
    })
}

fn zeta_strategy() -> impl Strategy<Value = C64> {
    (0.05f64..5.0, -PI..PI).prop_map(|(m, a)| C64::from_polar(m, a))
}

fn far_from_singular(cfg: &CaseConfig, z: C64) -> bool {
    cfg.singular_points().iter().all(|p| (z - p).norm() > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn uniformization_identities(cfg in case_strategy(), zeta in zeta_strategy()) {
        prop_assume!(far_from_singular(&cfg, zeta));
        let p = spectral::point_from_zeta(&cfg, zeta).unwrap();
        let r = cfg.r;
        let lhs = (p.lambda + p.lambda.inv()) * r;
        let rhs = p.z + p.z.inv();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
        prop_assert!((p.lambda_sq() - spectral::lambda_sq(&cfg, zeta)).norm() <= 1e-10 * p.lambda_sq().norm().max(1.0));
    }

    #[test]
    fn involution_inverts_lambda(cfg in case_strategy(), zeta in zeta_strategy()) {
        prop_assume!(far_from_singular(&cfg, zeta));
        let zb = spectral::zeta_bar(&cfg, zeta).unwrap();
        prop_assume!(far_from_singular(&cfg, zb));
        let back = spectral::zeta_bar(&cfg, zb).unwrap();
        prop_assert!((back - zeta).norm() <= 1e-9 * zeta.norm().max(1.0));
        let prod = spectral::lambda_sq(&cfg, zeta) * spectral::lambda_sq(&cfg, zb);
        prop_assert!((prod - 1.0).norm() < 1e-8);
    }

    #[test]
    fn gamma_forms_agree(cfg in case_strategy(), zeta in zeta_strategy()) {
        prop_assume!(far_from_singular(&cfg, zeta));
        let p = spectral::point_from_zeta(&cfg, zeta).unwrap();
        let g = spectral::gamma(&cfg, zeta).unwrap();
        let gz = spectral::gamma_z(&cfg, &p);
        prop_assert!((g - gz).norm() <= 1e-9 * g.norm().max(1.0));
    }

    #[test]
    fn involution_swaps_regions(cfg in case_strategy(), zeta in zeta_strategy()) {
        prop_assume!(far_from_singular(&cfg, zeta));
        let zb = spectral::zeta_bar(&cfg, zeta).unwrap();
        let (a, b) = (spectral::classify(&cfg, zeta), spectral::classify(&cfg, zb));
        prop_assume!(a != RegionTag::Continuum && b != RegionTag::Continuum);
        prop_assert_ne!(a, b);
    }
}

#[test]
fn lambda_power_branch_switch_is_continuous() {
    let l2 = C64::new(0.7, 0.4);
    for n in [39i64, 40, 41, -41, -40] {
        let direct = l2.powi(n as i32);
        let v = spectral::lambda_pow2n(l2, n);
        assert!((v - direct).norm() <= 1e-12 * direct.norm());
    }
}

#[test]
fn background_invariants() {
    for id in [CaseId::I, CaseId::II, CaseId::III, CaseId::IV] {
        let c = CaseConfig::new(id, 0.6, 0.25).unwrap();
        let prod = c.q_plus(0.8) * c.r_plus(0.8);
        let expect = if id.is_unit_circle_case() { 0.36 } else { -0.36 };
        assert!((prod - expect).norm() < 1e-14, "{id:?}: {prod}");
        let pyth = if id.is_unit_circle_case() { c.r * c.r + 0.36 } else { c.r * c.r - 0.36 };
        assert!((pyth - 1.0).abs() < 1e-14);
    }
    assert!(CaseConfig::new(CaseId::I, 1.0, 0.0).is_err());
    assert!(CaseConfig::new(CaseId::II, 1.5, 0.0).is_ok());
}
