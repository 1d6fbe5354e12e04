//! Case parameterization and the uniformized spectral plane.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{IstError, Result};
use crate::C64;

/// Guard radius around the poles and branch points of the uniformization maps.
pub const SINGULAR_GUARD: f64 = 1e-10;
/// Half-width of the band around the continuous spectrum classified as `Continuum`.
pub const REGION_TOL: f64 = 1e-9;

/// The four (σ, Δθ) combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseId {
    /// σ = +1, Δθ = 0
    I,
    /// σ = +1, Δθ = π
    II,
    /// σ = −1, Δθ = 0
    III,
    /// σ = −1, Δθ = π
    IV,
}

impl CaseId {
    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(CaseId::I),
            2 => Some(CaseId::II),
            3 => Some(CaseId::III),
            4 => Some(CaseId::IV),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            CaseId::I => 1,
            CaseId::II => 2,
            CaseId::III => 3,
            CaseId::IV => 4,
        }
    }

    pub fn sigma(self) -> i32 {
        match self {
            CaseId::I | CaseId::II => 1,
            CaseId::III | CaseId::IV => -1,
        }
    }

    pub fn delta_theta(self) -> f64 {
        match self {
            CaseId::I | CaseId::III => 0.0,
            CaseId::II | CaseId::IV => PI,
        }
    }

    /// Cases I and IV have q₊r₊ = q0² (unit-circle branch points).
    pub fn is_unit_circle_case(self) -> bool {
        matches!(self, CaseId::I | CaseId::IV)
    }
}

/// One of the four cases with its boundary amplitude, phase and derived constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseConfig {
    pub case_id: CaseId,
    pub sigma: i32,
    pub delta_theta: f64,
    pub q0: f64,
    pub theta_minus: f64,
    pub theta_plus: f64,
    pub r: f64,
    /// q0²·cos Δθ
    pub delta: f64,
}

impl CaseConfig {
    pub fn new(case_id: CaseId, q0: f64, theta_minus: f64) -> Result<Self> {
        if !(q0.is_finite() && q0 > 0.0) {
            return Err(IstError::Domain(format!("q0 must be positive, got {q0}")));
        }
        if case_id.is_unit_circle_case() && q0 >= 1.0 {
            return Err(IstError::Domain(format!(
                "case {:?} requires 0 < q0 < 1, got {q0}",
                case_id
            )));
        }
        if !theta_minus.is_finite() {
            return Err(IstError::Domain("theta_minus must be finite".into()));
        }
        let sigma = case_id.sigma();
        let delta_theta = case_id.delta_theta();
        let r = if case_id.is_unit_circle_case() {
            (1.0 - q0 * q0).sqrt()
        } else {
            (1.0 + q0 * q0).sqrt()
        };
        Ok(CaseConfig {
            case_id,
            sigma,
            delta_theta,
            q0,
            theta_minus,
            theta_plus: theta_minus + delta_theta,
            r,
            delta: q0 * q0 * delta_theta.cos().round(),
        })
    }

    /// Rate of the background phase: ϑ±(t) = θ± + rate·t.
    pub fn phase_rate(&self) -> f64 {
        2.0 * self.sigma as f64 * self.delta
    }

    pub fn q_plus(&self, t: f64) -> C64 {
        C64::from_polar(self.q0, self.theta_plus + self.phase_rate() * t)
    }

    pub fn q_minus(&self, t: f64) -> C64 {
        C64::from_polar(self.q0, self.theta_minus + self.phase_rate() * t)
    }

    /// r₊ = σ q₋*
    pub fn r_plus(&self, t: f64) -> C64 {
        self.q_minus(t).conj() * self.sigma as f64
    }

    /// r₋ = σ q₊*
    pub fn r_minus(&self, t: f64) -> C64 {
        self.q_plus(t).conj() * self.sigma as f64
    }

    /// Far-field value of 1 − q_k r_k, i.e. 1 ∓ q0² = r².
    pub fn theta_denominator(&self) -> f64 {
        self.r * self.r
    }

    /// ζ-plane images of the branch points.
    pub fn branch_points(&self) -> [C64; 2] {
        let (r, q0) = (self.r, self.q0);
        if self.case_id.is_unit_circle_case() {
            [C64::new(r, q0), C64::new(r, -q0)]
        } else {
            [C64::new(r - q0, 0.0), C64::new(r + q0, 0.0)]
        }
    }

    /// Poles of the uniformization maps together with the branch points.
    pub fn singular_points(&self) -> [C64; 5] {
        let [b0, b1] = self.branch_points();
        [C64::new(0.0, 0.0), C64::new(self.r, 0.0), C64::new(1.0 / self.r, 0.0), b0, b1]
    }

    /// Sign of the second scattering symmetry t11(ζ) = ± t22*(ζ̄*).
    pub fn conjugate_symmetry_sign(&self) -> f64 {
        match self.case_id {
            CaseId::I | CaseId::III => 1.0,
            CaseId::II | CaseId::IV => -1.0,
        }
    }
}

/// A consistent (ζ, z, λ) triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub zeta: C64,
    pub z: C64,
    pub lambda: C64,
}

impl SpectralPoint {
    /// λ² = ζ(ζ−r)/(ζr−1), which is single-valued in ζ.
    pub fn lambda_sq(&self) -> C64 {
        self.lambda * self.lambda
    }
}

/// Region of the ζ-plane relative to the continuous spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionTag {
    DPlus,
    DMinus,
    Continuum,
}

fn near_singular(cfg: &CaseConfig, zeta: C64) -> bool {
    cfg.singular_points()
        .iter()
        .any(|p| (zeta - p).norm() < SINGULAR_GUARD)
}

/// Uniformization: z = principal √((ζ−r)/(ζ(ζr−1))), λ = ζz.
pub fn point_from_zeta(cfg: &CaseConfig, zeta: C64) -> Result<SpectralPoint> {
    if !zeta.is_finite() || near_singular(cfg, zeta) {
        return Err(IstError::SingularPoint(zeta));
    }
    let r = cfg.r;
    let z = ((zeta - r) / (zeta * (zeta * r - 1.0))).sqrt();
    Ok(SpectralPoint { zeta, z, lambda: zeta * z })
}

/// λ² as a rational function of ζ (no branch choice involved).
pub fn lambda_sq(cfg: &CaseConfig, zeta: C64) -> C64 {
    zeta * (zeta - cfg.r) / (zeta * cfg.r - 1.0)
}

/// The involution ζ̄ = (rζ−1)/(ζ−r).
pub fn zeta_bar(cfg: &CaseConfig, zeta: C64) -> Result<C64> {
    if (zeta - cfg.r).norm() < SINGULAR_GUARD {
        return Err(IstError::SingularPoint(zeta));
    }
    Ok((zeta * cfg.r - 1.0) / (zeta - cfg.r))
}

pub fn classify(cfg: &CaseConfig, zeta: C64) -> RegionTag {
    let s = if cfg.case_id.is_unit_circle_case() {
        zeta.norm() - 1.0
    } else {
        (zeta.norm() - 1.0) * ((zeta - cfg.r).norm() - cfg.q0)
    };
    if s < -REGION_TOL {
        RegionTag::DPlus
    } else if s > REGION_TOL {
        RegionTag::DMinus
    } else {
        RegionTag::Continuum
    }
}

/// γ(ζ) = r²(ζ−2/r+1/ζ)(ζ−2r+1/ζ)/((ζ−r)(1/ζ−r)).
pub fn gamma(cfg: &CaseConfig, zeta: C64) -> Result<C64> {
    let r = cfg.r;
    let guard = [C64::new(0.0, 0.0), C64::new(r, 0.0), C64::new(1.0 / r, 0.0)];
    if guard.iter().any(|p| (zeta - p).norm() < SINGULAR_GUARD) {
        return Err(IstError::SingularPoint(zeta));
    }
    let inv = zeta.inv();
    Ok(r * r * (zeta - 2.0 / r + inv) * (zeta - 2.0 * r + inv) / ((zeta - r) * (inv - r)))
}

/// γ = r(λ−1/λ)(z−1/z), the z-form.
pub fn gamma_z(cfg: &CaseConfig, p: &SpectralPoint) -> C64 {
    cfg.r * (p.lambda - p.lambda.inv()) * (p.z - p.z.inv())
}

/// λ(ζ)^(2n) = (λ²)^n, switching to exp/log for long windows.
pub fn lambda_pow2n(lambda_sq: C64, n: i64) -> C64 {
    if n.abs() <= 40 {
        lambda_sq.powi(n as i32)
    } else {
        (lambda_sq.ln() * n as f64).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn case1() -> CaseConfig {
        CaseConfig::new(CaseId::I, 2.0 / 3.0, 0.0).unwrap()
    }

    #[test]
    fn make_case_examples() {
        let c = case1();
        assert_relative_eq!(c.r, 5f64.sqrt() / 3.0, epsilon = 1e-15);
        let c2 = CaseConfig::new(CaseId::II, 1.0, 0.0).unwrap();
        assert_relative_eq!(c2.r, 2f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(c2.theta_plus, PI, epsilon = 1e-15);
        assert!(matches!(
            CaseConfig::new(CaseId::I, 1.2, 0.0),
            Err(IstError::Domain(_))
        ));
        assert!(CaseConfig::new(CaseId::III, 1.2, 0.0).is_ok());
    }

    #[test]
    fn boundary_product_sign() {
        for (id, sign) in [(CaseId::I, 1.0), (CaseId::II, -1.0), (CaseId::III, -1.0), (CaseId::IV, 1.0)] {
            let c = CaseConfig::new(id, 0.5, 0.3).unwrap();
            let p = c.q_plus(0.7) * c.r_plus(0.7);
            assert!((p - sign * 0.25).norm() < 1e-15, "{id:?}: {p}");
        }
    }

    #[test]
    fn branch_point_maps_to_conjugate() {
        let c = case1();
        let z0 = C64::new(c.r, c.q0);
        let zeta = z0 * (1.0 + 1e-9);
        let p = point_from_zeta(&c, zeta).unwrap();
        // z² → 1/ζ₀² = ζ₀*² on the unit circle
        assert!((p.z * p.z - z0.conj() * z0.conj()).norm() < 1e-7);
        assert!(matches!(point_from_zeta(&c, z0), Err(IstError::SingularPoint(_))));
    }

    #[test]
    fn unit_zeta_gives_unit_lambda() {
        let p = point_from_zeta(&case1(), C64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(p.lambda.norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn zeta_bar_examples() {
        let c = case1();
        assert_relative_eq!(zeta_bar(&c, C64::new(0.0, 0.0)).unwrap().re, 1.0 / c.r, epsilon = 1e-15);
        let z0 = C64::new(c.r, c.q0);
        assert!((zeta_bar(&c, z0).unwrap() - z0).norm() < 1e-14);
        assert!(zeta_bar(&c, C64::new(c.r, 0.0)).is_err());
    }

    #[test]
    fn classify_examples() {
        let c = case1();
        assert_eq!(classify(&c, C64::new(0.5, 0.0)), RegionTag::DPlus);
        assert_eq!(classify(&c, C64::new(2.0, 0.0)), RegionTag::DMinus);
        assert_eq!(classify(&c, C64::from_polar(1.0, PI / 3.0)), RegionTag::Continuum);
        let c2 = CaseConfig::new(CaseId::II, 2.0 / 3.0, 0.0).unwrap();
        assert_eq!(classify(&c2, C64::new(c2.r, 0.0)), RegionTag::DPlus);
    }

    #[test]
    fn gamma_examples() {
        let c = case1();
        let g1 = gamma(&c, C64::new(1.0, 0.0)).unwrap();
        assert!((g1 - C64::new(-4.0 * c.r, 0.0)).norm() < 1e-14);
        let z0 = C64::new(c.r, c.q0);
        assert!(gamma(&c, z0).unwrap().norm() < 1e-14);
        let zeta = C64::new(0.3, 1.7);
        let a = gamma(&c, zeta).unwrap();
        let b = gamma(&c, zeta.inv()).unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn lambda_power_paths_agree() {
        let l2 = C64::new(0.3, 0.9);
        for n in [-41i64, 41, 55, -60] {
            let a = lambda_pow2n(l2, n);
            let b = l2.powi(n as i32);
            assert!((a - b).norm() < 1e-12 * b.norm(), "n={n}");
        }
    }
}
