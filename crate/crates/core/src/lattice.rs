//! Truncated lattice fields and the quantities built directly from them.

use serde::{Deserialize, Serialize};

use crate::error::{IstError, Result};
use crate::spectral::CaseConfig;
use crate::C64;

/// Factor magnitude `|1 − q_k r_k|` below which Θ-products are declared singular.
pub const PRODUCT_GUARD: f64 = 1e-12;

/// Field `q_n(t)` on `n ∈ [−N, N]`; outside the window it is the exact background.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialWindow {
    pub cfg: CaseConfig,
    pub half_width: usize,
    pub t: f64,
    q: Vec<C64>,
}

impl PotentialWindow {
    /// Builds a window from `2N+1` samples ordered from `n = −N` upward.
    pub fn new(cfg: CaseConfig, t: f64, q: Vec<C64>) -> Result<Self> {
        if q.len() < 3 || q.len() % 2 == 0 {
            return Err(IstError::Domain(format!(
                "window needs an odd number (>= 3) of samples, got {}",
                q.len()
            )));
        }
        if q.iter().any(|v| !v.is_finite()) {
            return Err(IstError::Domain("window contains non-finite samples".into()));
        }
        let half_width = (q.len() - 1) / 2;
        Ok(PotentialWindow { cfg, half_width, t, q })
    }

    /// Samples `f(n)` for every `n ∈ [−N, N]`.
    pub fn from_fn(cfg: CaseConfig, t: f64, n_half: usize, mut f: impl FnMut(i64) -> C64) -> Result<Self> {
        let n = n_half as i64;
        Self::new(cfg, t, (-n..=n).map(&mut f).collect())
    }

    pub fn n(&self) -> i64 {
        self.half_width as i64
    }

    pub fn samples(&self) -> &[C64] {
        &self.q
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        let n = self.n();
        -n..=n
    }

    pub fn q_at(&self, n: i64) -> C64 {
        let big = self.n();
        if n < -big {
            self.cfg.q_minus(self.t)
        } else if n > big {
            self.cfg.q_plus(self.t)
        } else {
            self.q[(n + big) as usize]
        }
    }

    /// The nonlocal partner `r_n = σ q*_{−n}`.
    pub fn r_at(&self, n: i64) -> C64 {
        self.q_at(-n).conj() * self.cfg.sigma as f64
    }
}

/// Pure background at time `t`; for Δθ = π the phase step sits at `n = 0`.
pub fn background_field(cfg: &CaseConfig, t: f64, n_half: usize) -> Result<PotentialWindow> {
    if n_half == 0 {
        return Err(IstError::Domain("window half-width must be >= 1".into()));
    }
    let (qm, qp) = (cfg.q_minus(t), cfg.q_plus(t));
    PotentialWindow::from_fn(*cfg, t, n_half, |n| if n < 0 { qm } else { qp })
}

pub fn partner(window: &PotentialWindow, n: i64) -> C64 {
    window.r_at(n)
}

/// Θ_n = Π_{k=n}^{N} (1 − q_k r_k)/r² for `n ∈ [−N, N+1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaProduct {
    pub n_half: usize,
    pub theta_n: Vec<C64>,
    pub theta_minus_inf: C64,
}

impl ThetaProduct {
    pub fn at(&self, n: i64) -> C64 {
        let big = self.n_half as i64;
        if n > big {
            C64::new(1.0, 0.0)
        } else {
            self.theta_n[(n.max(-big) + big) as usize]
        }
    }
}

pub fn theta_products(window: &PotentialWindow) -> Result<ThetaProduct> {
    let big = window.n();
    let d = window.cfg.theta_denominator();
    let mut out = vec![C64::new(0.0, 0.0); window.q.len() + 1];
    let mut acc = C64::new(1.0, 0.0);
    out[2 * big as usize + 1] = acc;
    for n in (-big..=big).rev() {
        let f = C64::new(1.0, 0.0) - window.q_at(n) * window.r_at(n);
        if f.norm() < PRODUCT_GUARD {
            return Err(IstError::SingularProduct(n));
        }
        acc *= f / d;
        out[(n + big) as usize] = acc;
    }
    Ok(ThetaProduct { n_half: window.half_width, theta_n: out, theta_minus_inf: acc })
}

/// dq_n/dt implied by the lattice equation, given neighbours and the mirrored site.
#[inline]
pub fn al_rhs_local(sigma: f64, qm1: C64, q0: C64, qp1: C64, q_mirror: C64) -> C64 {
    let lap = qp1 - q0 * 2.0 + qm1;
    let nl = q0 * q_mirror.conj() * sigma * (qp1 + qm1);
    -C64::i() * (lap - nl)
}

pub fn al_rhs(window: &PotentialWindow, n: i64) -> C64 {
    al_rhs_local(
        window.cfg.sigma as f64,
        window.q_at(n - 1),
        window.q_at(n),
        window.q_at(n + 1),
        window.q_at(-n),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::CaseId;

    fn cfg(id: CaseId) -> CaseConfig {
        CaseConfig::new(id, 2.0 / 3.0, 0.0).unwrap()
    }

    #[test]
    fn background_examples() {
        let w = background_field(&cfg(CaseId::I), 0.0, 10).unwrap();
        assert!(w.samples().iter().all(|q| (q - C64::new(2.0 / 3.0, 0.0)).norm() < 1e-15));
        let c = cfg(CaseId::I);
        let w1 = background_field(&c, 1.0, 3).unwrap();
        let arg = w1.q_at(0).arg();
        assert!((arg - 2.0 * c.q0 * c.q0).abs() < 1e-14);
        let w4 = background_field(&cfg(CaseId::IV), 0.0, 3).unwrap();
        assert!((w4.q_at(-1) - C64::new(2.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!((w4.q_at(0) + C64::new(2.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!(background_field(&c, 0.0, 0).is_err());
    }

    #[test]
    fn partner_examples() {
        let c = CaseConfig::new(CaseId::I, 0.5, 0.4).unwrap();
        let w = background_field(&c, 0.0, 6).unwrap();
        assert!((partner(&w, 2) - C64::from_polar(0.5, -0.4)).norm() < 1e-15);
        let c3 = CaseConfig::new(CaseId::III, 0.5, 0.4).unwrap();
        let w3 = background_field(&c3, 0.0, 6).unwrap();
        assert!((partner(&w3, 2) + C64::from_polar(0.5, -0.4)).norm() < 1e-15);
        let w5 = PotentialWindow::from_fn(c, 0.0, 6, |n| if n == 5 { C64::new(1.0, 2.0) } else { C64::new(0.5, 0.0) }).unwrap();
        assert_eq!(partner(&w5, -5), C64::new(1.0, -2.0));
    }

    #[test]
    fn theta_on_background_is_one() {
        for id in [CaseId::I, CaseId::III] {
            let w = background_field(&cfg(id), 0.3, 8).unwrap();
            let th = theta_products(&w).unwrap();
            for v in &th.theta_n {
                assert!((v - 1.0).norm() < 1e-14, "{id:?}");
            }
        }
    }

    #[test]
    fn theta_on_step_background() {
        // n = 0 is its own mirror, so q_0 r_0 = σ|q_0|² instead of ∓q0² there
        for id in [CaseId::II, CaseId::IV] {
            let c = cfg(id);
            let w = background_field(&c, 0.3, 8).unwrap();
            let th = theta_products(&w).unwrap();
            let step = (1.0 - c.sigma as f64 * c.q0 * c.q0) / c.theta_denominator();
            for n in -8..=9i64 {
                let expect = if n <= 0 { step } else { 1.0 };
                assert!((th.at(n) - expect).norm() < 1e-14, "{id:?} n={n}");
            }
        }
    }

    #[test]
    fn theta_matches_naive_product() {
        let c = cfg(CaseId::II);
        let w = PotentialWindow::from_fn(c, 0.0, 5, |n| C64::new(0.3 + 0.05 * n as f64, 0.1 * (n as f64).sin())).unwrap();
        let th = theta_products(&w).unwrap();
        for n in -5..=5i64 {
            let mut p = C64::new(1.0, 0.0);
            for k in n..=5 {
                p *= (C64::new(1.0, 0.0) - w.q_at(k) * w.r_at(k)) / c.theta_denominator();
            }
            assert!((th.at(n) - p).norm() < 1e-13);
        }
        assert_eq!(th.at(6), C64::new(1.0, 0.0));
    }

    #[test]
    fn singular_factor_detected() {
        let c = cfg(CaseId::I);
        let w = PotentialWindow::from_fn(c, 0.0, 3, |n| if n == 0 { C64::new(1.0, 0.0) } else { C64::new(2.0 / 3.0, 0.0) }).unwrap();
        assert_eq!(theta_products(&w), Err(IstError::SingularProduct(0)));
    }

    #[test]
    fn rhs_on_background_rotates_phase() {
        for id in [CaseId::I, CaseId::II, CaseId::III, CaseId::IV] {
            let c = CaseConfig::new(id, 0.6, 0.2).unwrap();
            let w = background_field(&c, 0.0, 6).unwrap();
            for n in -6..=6i64 {
                if id.delta_theta() != 0.0 && n.abs() <= 1 {
                    continue;
                }
                let expect = C64::i() * c.phase_rate() * w.q_at(n);
                assert!((al_rhs(&w, n) - expect).norm() < 1e-14, "{id:?} n={n}");
            }
        }
    }

    #[test]
    fn rhs_zero_field() {
        let c = CaseConfig::new(CaseId::II, 1.0, 0.0).unwrap();
        let z = C64::new(0.0, 0.0);
        assert_eq!(al_rhs_local(c.sigma as f64, z, z, z, z), z);
    }
}
