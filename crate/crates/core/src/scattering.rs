//! Direct scattering: modified Jost columns by lattice recursion, scattering
//! coefficients through Wronskians, and the checks built on them.

use serde::{Deserialize, Serialize};

use crate::error::{IstError, Result};
use crate::ist::EigenSet;
use crate::lattice::{theta_products, PotentialWindow, ThetaProduct};
use crate::spectral::{self, CaseConfig, SpectralPoint};
use crate::C64;

/// Renormalize a column whenever its norm leaves `[1/RESCALE, RESCALE]`.
const RESCALE: f64 = 1e50;
/// Threshold for `|ζ + 1/ζ − 2r|` (the Wronskian normalization).
pub const BRANCH_GUARD: f64 = 1e-10;
/// Coefficients smaller than this are treated as zeros when dividing.
pub const DIVISION_GUARD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnKind {
    M,
    Mbar,
    N,
    Nbar,
}

type Vec2 = [C64; 2];

/// A modified Jost column on `n ∈ [−N, N+1]`, stored as raw values with
/// accumulated log-magnitudes: true value = `raw · exp(log_scale)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenfunctionColumn {
    pub kind: ColumnKind,
    pub point: SpectralPoint,
    pub n_half: usize,
    pub values: Vec<Vec2>,
    pub log_scale: Vec<f64>,
}

impl EigenfunctionColumn {
    fn index(&self, n: i64) -> usize {
        let big = self.n_half as i64;
        assert!((-big..=big + 1).contains(&n), "site {n} outside column range");
        (n + big) as usize
    }

    pub fn raw(&self, n: i64) -> (Vec2, f64) {
        let i = self.index(n);
        (self.values[i], self.log_scale[i])
    }

    /// De-scaled value at site `n`.
    pub fn value(&self, n: i64) -> Vec2 {
        let (v, s) = self.raw(n);
        let f = s.exp();
        [v[0] * f, v[1] * f]
    }
}

/// Transfer matrix of the recursion shared by M (forward) and N̄ (backward).
fn transfer_a(cfg: &CaseConfig, w: &PotentialWindow, zeta: C64, n: i64) -> [[C64; 2]; 2] {
    let r = cfg.r;
    let k = (zeta * r - 1.0) / (zeta - r);
    [
        [zeta.inv() / r, k / zeta * w.q_at(n) / r],
        [w.r_at(n) / r, k / r],
    ]
}

/// Transfer matrix of the recursion shared by M̄ (forward) and N (backward).
fn transfer_b(cfg: &CaseConfig, w: &PotentialWindow, zeta: C64, n: i64) -> [[C64; 2]; 2] {
    let r = cfg.r;
    let k = (zeta - r) / (zeta * r - 1.0);
    [
        [k / r, w.q_at(n) / r],
        [zeta * k * w.r_at(n) / r, zeta / r],
    ]
}

fn mul(a: &[[C64; 2]; 2], x: &Vec2) -> Vec2 {
    [a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]]
}

fn solve2(a: &[[C64; 2]; 2], y: &Vec2) -> Vec2 {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [
        (a[1][1] * y[0] - a[0][1] * y[1]) / det,
        (a[0][0] * y[1] - a[1][0] * y[0]) / det,
    ]
}

fn norm2(v: &Vec2) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

fn finite(v: &Vec2) -> bool {
    v[0].is_finite() && v[1].is_finite()
}

/// Integrates one column through the window, starting from its boundary value.
pub fn jost(window: &PotentialWindow, point: &SpectralPoint, kind: ColumnKind) -> Result<EigenfunctionColumn> {
    let cfg = &window.cfg;
    let zeta = point.zeta;
    let r = cfg.r;
    let t = window.t;
    let big = window.n();
    let len = 2 * window.half_width + 2;
    let mut values = vec![[C64::new(0.0, 0.0); 2]; len];
    let mut log_scale = vec![0.0; len];

    let forward = matches!(kind, ColumnKind::M | ColumnKind::Mbar);
    let start = match kind {
        ColumnKind::M => [cfg.q_minus(t), zeta - r],
        ColumnKind::Mbar => [C64::new(r, 0.0) - zeta.inv(), -cfg.r_minus(t)],
        ColumnKind::Nbar => [cfg.q_plus(t), zeta - r],
        ColumnKind::N => [C64::new(r, 0.0) - zeta.inv(), -cfg.r_plus(t)],
    };
    let uses_a = matches!(kind, ColumnKind::M | ColumnKind::Nbar);

    let mut cur = start;
    let mut scale = 0.0;
    let mut store = |n: i64, v: Vec2, s: f64| {
        let i = (n + big) as usize;
        values[i] = v;
        log_scale[i] = s;
    };
    let sites: Box<dyn Iterator<Item = i64>> = if forward {
        store(-big, cur, scale);
        Box::new(-big..=big)
    } else {
        store(big + 1, cur, scale);
        Box::new((-big..=big).rev())
    };
    for n in sites {
        let a = if uses_a {
            transfer_a(cfg, window, zeta, n)
        } else {
            transfer_b(cfg, window, zeta, n)
        };
        if a.iter().flatten().any(|v| !v.is_finite()) {
            return Err(IstError::SingularTransfer { site: n, zeta });
        }
        cur = if forward { mul(&a, &cur) } else { solve2(&a, &cur) };
        if !finite(&cur) {
            return Err(IstError::SingularTransfer { site: n, zeta });
        }
        let m = norm2(&cur);
        if m > RESCALE || (m < 1.0 / RESCALE && m > 0.0) {
            cur = [cur[0] / m, cur[1] / m];
            scale += m.ln();
        }
        store(if forward { n + 1 } else { n }, cur, scale);
    }
    Ok(EigenfunctionColumn { kind, point: *point, n_half: window.half_width, values, log_scale })
}

/// Largest relative defect of the defining recursion along a computed column.
pub fn recursion_residual(window: &PotentialWindow, col: &EigenfunctionColumn) -> f64 {
    let cfg = &window.cfg;
    let zeta = col.point.zeta;
    let uses_a = matches!(col.kind, ColumnKind::M | ColumnKind::Nbar);
    let mut worst = 0.0f64;
    for n in window.sites() {
        let a = if uses_a {
            transfer_a(cfg, window, zeta, n)
        } else {
            transfer_b(cfg, window, zeta, n)
        };
        // compare in the scale of site n+1 to avoid overflow
        let (x, sx) = col.raw(n);
        let (y, sy) = col.raw(n + 1);
        let f = (sx - sy).exp();
        let ax = mul(&a, &x);
        let d = [ax[0] * f - y[0], ax[1] * f - y[1]];
        worst = worst.max(norm2(&d) / norm2(&y).max(f64::MIN_POSITIVE));
    }
    worst
}

/// De-scaled 2×2 determinant of two columns at site `n`.
pub fn wronskian(a: &EigenfunctionColumn, b: &EigenfunctionColumn, n: i64) -> C64 {
    let (x, sx) = a.raw(n);
    let (y, sy) = b.raw(n);
    (x[0] * y[1] - x[1] * y[0]) * (sx + sy).exp()
}

/// Scattering data at one ζ. `t21_tilde = λ t21` and `t12_tilde = t12/λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringCoefficients {
    pub zeta: C64,
    pub lambda: C64,
    pub t11: C64,
    pub t22: C64,
    pub t21_tilde: C64,
    pub t12_tilde: C64,
    /// det(N, N̄)·Θ_n / (r(ζ+1/ζ−2r)); identically 1.
    pub wronskian_ratio: C64,
}

impl ScatteringCoefficients {
    pub fn t21(&self) -> C64 {
        self.t21_tilde / self.lambda
    }

    pub fn t12(&self) -> C64 {
        self.t12_tilde * self.lambda
    }

    pub fn det_t(&self) -> C64 {
        self.t11 * self.t22 - self.t21_tilde * self.t12_tilde
    }
}

/// All four columns at one spectral point.
#[derive(Debug, Clone)]
pub struct JostSet {
    pub m: EigenfunctionColumn,
    pub mbar: EigenfunctionColumn,
    pub n: EigenfunctionColumn,
    pub nbar: EigenfunctionColumn,
}

pub fn jost_set(window: &PotentialWindow, point: &SpectralPoint) -> Result<JostSet> {
    Ok(JostSet {
        m: jost(window, point, ColumnKind::M)?,
        mbar: jost(window, point, ColumnKind::Mbar)?,
        n: jost(window, point, ColumnKind::N)?,
        nbar: jost(window, point, ColumnKind::Nbar)?,
    })
}

fn wronskian_norm(cfg: &CaseConfig, zeta: C64) -> Result<C64> {
    let s = zeta + zeta.inv() - 2.0 * cfg.r;
    if s.norm() < BRANCH_GUARD {
        return Err(IstError::NearBranchPoint(zeta));
    }
    Ok(s * cfg.r)
}

/// Determinant formulas evaluated at site `n` from precomputed columns.
pub fn coefficients_from_columns(
    cfg: &CaseConfig,
    cols: &JostSet,
    theta: &ThetaProduct,
    n: i64,
) -> Result<ScatteringCoefficients> {
    let p = cols.m.point;
    let d = wronskian_norm(cfg, p.zeta)?;
    let th = theta.at(n);
    let l2n = spectral::lambda_pow2n(spectral::lambda_sq(cfg, p.zeta), n);
    Ok(ScatteringCoefficients {
        zeta: p.zeta,
        lambda: p.lambda,
        t11: -th * wronskian(&cols.m, &cols.n, n) / d,
        t22: th * wronskian(&cols.mbar, &cols.nbar, n) / d,
        t21_tilde: th * l2n * wronskian(&cols.m, &cols.nbar, n) / d,
        t12_tilde: -th / l2n * wronskian(&cols.mbar, &cols.n, n) / d,
        wronskian_ratio: wronskian(&cols.n, &cols.nbar, n) * th / d,
    })
}

/// Scattering coefficients at ζ, evaluated at site `n = 0`.
pub fn scattering_coefficients(window: &PotentialWindow, zeta: C64) -> Result<ScatteringCoefficients> {
    scattering_coefficients_at(window, zeta, &[0]).map(|mut v| v.remove(0))
}

/// Same as [`scattering_coefficients`] but at each of the given sites.
pub fn scattering_coefficients_at(
    window: &PotentialWindow,
    zeta: C64,
    sites: &[i64],
) -> Result<Vec<ScatteringCoefficients>> {
    let cfg = &window.cfg;
    wronskian_norm(cfg, zeta)?;
    let p = spectral::point_from_zeta(cfg, zeta)?;
    let theta = theta_products(window)?;
    let cols = jost_set(window, &p)?;
    sites
        .iter()
        .map(|&n| coefficients_from_columns(cfg, &cols, &theta, n))
        .collect()
}

/// ρ = t̃21/t11 and ρ̄ = t̃12/t22.
pub fn reflection(window: &PotentialWindow, zeta: C64) -> Result<(C64, C64)> {
    reflection_from(&scattering_coefficients(window, zeta)?)
}

pub fn reflection_from(c: &ScatteringCoefficients) -> Result<(C64, C64)> {
    if c.t11.norm() < DIVISION_GUARD || c.t22.norm() < DIVISION_GUARD {
        return Err(IstError::DivisionNearZero(c.zeta));
    }
    Ok((c.t21_tilde / c.t11, c.t12_tilde / c.t22))
}

/// Maximum residuals of the two scattering symmetries over a sample set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryResiduals {
    /// |t11(ζ) − (q₊/q₋) t22(ζ̄)|; the phase ratio is −1 across a Δθ = π step.
    pub first_diagonal: f64,
    /// |t21(ζ) + (q₊/r₋) t12(ζ̄)|
    pub first_off_diagonal: f64,
    /// |t11(ζ) ∓ t22*(ζ̄*)|
    pub second: f64,
    /// The case sign used in `second`.
    pub second_sign: f64,
    pub samples: usize,
}

impl SymmetryResiduals {
    pub fn max(&self) -> f64 {
        self.first_diagonal.max(self.first_off_diagonal).max(self.second)
    }
}

/// Samples should sit just outside the continuum on the t11 side
/// (|ζ| slightly above 1 in cases I/IV) so that every column is evaluated
/// where it is analytic.
pub fn check_symmetries(window: &PotentialWindow, samples: &[C64]) -> Result<SymmetryResiduals> {
    let cfg = &window.cfg;
    let t = window.t;
    let ratio = cfg.q_plus(t) / cfg.r_minus(t);
    let step = cfg.q_plus(t) / cfg.q_minus(t);
    let sign = cfg.conjugate_symmetry_sign();
    let mut out = SymmetryResiduals {
        first_diagonal: 0.0,
        first_off_diagonal: 0.0,
        second: 0.0,
        second_sign: sign,
        samples: samples.len(),
    };
    for &zeta in samples {
        let zb = spectral::zeta_bar(cfg, zeta)?;
        let a = scattering_coefficients(window, zeta)?;
        let b = scattering_coefficients(window, zb)?;
        let c = scattering_coefficients(window, zb.conj())?;
        out.first_diagonal = out.first_diagonal.max((a.t11 - step * b.t22).norm());
        out.first_off_diagonal = out.first_off_diagonal.max((a.t21() + ratio * b.t12()).norm());
        out.second = out.second.max((a.t11 - sign * c.t22.conj()).norm());
    }
    Ok(out)
}

/// Reflectionless trace formulas: (t11 prediction, t22 prediction).
pub fn trace_formula(cfg: &CaseConfig, eigen: &EigenSet, zeta: C64) -> (C64, C64) {
    let _ = cfg;
    let mut t11 = C64::new(1.0, 0.0);
    let mut t22 = eigen.theta_minus_inf_constraint();
    for e in &eigen.entries {
        t11 *= (zeta - e.zeta) / (zeta - e.zeta_bar);
        t22 *= (zeta - e.zeta_bar) / (zeta - e.zeta);
    }
    (t11, t22)
}

/// Deviations of the computed columns and coefficients from their leading asymptotics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    /// max_n |M⁽¹⁾_n(ζ) − q_{n−1}| at ζ = 1e4
    pub m_first_large: f64,
    /// max_n |M⁽²⁾_n(ζ)/ζ − 1| at ζ = 1e4
    pub m_second_large: f64,
    /// max_n |Θ_n N̄_n(ζ) − (q_n, −r)| at ζ = 1e−4
    pub nbar_small: f64,
    /// |t11(1e4) − 1|
    pub t11_large: f64,
    /// |t22(1e−4) − 1|
    pub t22_small: f64,
    /// |t11(ζ → 1/r) − s| and |t22(ζ → r) − s| with s = ±1 by case.
    pub t11_at_inv_r: f64,
    pub t22_at_r: f64,
    pub expected_sign: f64,
}

impl AsymptoticReport {
    pub fn max(&self) -> f64 {
        [
            self.m_first_large,
            self.m_second_large,
            self.nbar_small,
            self.t11_large,
            self.t22_small,
            self.t11_at_inv_r,
            self.t22_at_r,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn asymptotic_checks(window: &PotentialWindow) -> Result<AsymptoticReport> {
    let cfg = &window.cfg;
    let r = cfg.r;
    let theta = theta_products(window)?;
    let large = C64::new(1e4, 0.0);
    let small = C64::new(1e-4, 0.0);
    let pl = spectral::point_from_zeta(cfg, large)?;
    let ps = spectral::point_from_zeta(cfg, small)?;
    let m = jost(window, &pl, ColumnKind::M)?;
    let nb = jost(window, &ps, ColumnKind::Nbar)?;
    let mut m1 = 0.0f64;
    let mut m2 = 0.0f64;
    let mut nbs = 0.0f64;
    for n in window.sites() {
        let v = m.value(n);
        m1 = m1.max((v[0] - window.q_at(n - 1)).norm());
        m2 = m2.max((v[1] / large - 1.0).norm());
        let u = nb.value(n);
        let th = theta.at(n);
        nbs = nbs.max((u[0] * th - window.q_at(n)).norm() + (u[1] * th + r).norm());
    }
    let sign = cfg.conjugate_symmetry_sign();
    let off = C64::new(0.0, 1e-6);
    let t_large = scattering_coefficients(window, large)?;
    let t_small = scattering_coefficients(window, small)?;
    let t_inv_r = scattering_coefficients(window, C64::new(1.0 / r, 0.0) + off)?;
    let t_r = scattering_coefficients(window, C64::new(r, 0.0) + off)?;
    Ok(AsymptoticReport {
        m_first_large: m1,
        m_second_large: m2,
        nbar_small: nbs,
        t11_large: (t_large.t11 - 1.0).norm(),
        t22_small: (t_small.t22 - 1.0).norm(),
        t11_at_inv_r: (t_inv_r.t11 - sign).norm(),
        t22_at_r: (t_r.t22 - sign).norm(),
        expected_sign: sign,
    })
}

/// One ζ-sample of a [`ScatteringReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringRecord {
    pub zeta: C64,
    pub t11: C64,
    pub t22: C64,
    pub t21_tilde: C64,
    pub t12_tilde: C64,
    pub rho: Option<C64>,
    pub rho_bar: Option<C64>,
    pub det_t: C64,
    pub wronskian_ratio: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringReport {
    pub records: Vec<ScatteringRecord>,
    pub symmetry: SymmetryResiduals,
    /// Max |t22(ζ) − trace prediction| over the D₊ samples, when eigenvalues are known.
    pub trace_residual: Option<f64>,
    /// Max |det T − Θ₋N| over the samples.
    pub det_t_residual: f64,
    /// Max |Wronskian ratio − 1| over the samples.
    pub wronskian_residual: f64,
    pub theta_minus_inf: C64,
}

/// Full direct-scattering report. `continuum_samples` are t11-side points near
/// the continuum; `trace_samples` are D₊ points used for the trace formula.
pub fn scattering_report(
    window: &PotentialWindow,
    continuum_samples: &[C64],
    eigen: Option<&EigenSet>,
    trace_samples: &[C64],
) -> Result<ScatteringReport> {
    let theta = theta_products(window)?;
    let mut records = Vec::with_capacity(continuum_samples.len());
    let mut det_res = 0.0f64;
    let mut wr_res = 0.0f64;
    for &zeta in continuum_samples {
        let c = scattering_coefficients(window, zeta)?;
        let (rho, rho_bar) = match reflection_from(&c) {
            Ok((a, b)) => (Some(a), Some(b)),
            Err(_) => (None, None),
        };
        det_res = det_res.max((c.det_t() - theta.theta_minus_inf).norm());
        wr_res = wr_res.max((c.wronskian_ratio - 1.0).norm());
        records.push(ScatteringRecord {
            zeta,
            t11: c.t11,
            t22: c.t22,
            t21_tilde: c.t21_tilde,
            t12_tilde: c.t12_tilde,
            rho,
            rho_bar,
            det_t: c.det_t(),
            wronskian_ratio: c.wronskian_ratio,
        });
    }
    let symmetry = check_symmetries(window, continuum_samples)?;
    let trace_residual = match eigen {
        Some(e) if !trace_samples.is_empty() => {
            let mut worst = 0.0f64;
            for &zeta in trace_samples {
                let c = scattering_coefficients(window, zeta)?;
                let (_, pred) = trace_formula(&window.cfg, e, zeta);
                worst = worst.max((c.t22 - pred).norm());
            }
            Some(worst)
        }
        _ => None,
    };
    Ok(ScatteringReport {
        records,
        symmetry,
        trace_residual,
        det_t_residual: det_res,
        wronskian_residual: wr_res,
        theta_minus_inf: theta.theta_minus_inf,
    })
}

/// `count` points at radius `1 + eps` (t11 side for cases I/IV), avoiding the real axis.
pub fn continuum_samples(count: usize, eps: f64) -> Vec<C64> {
    (0..count)
        .map(|k| {
            let a = std::f64::consts::PI * (2.0 * k as f64 + 0.5) / count as f64 + 0.1;
            C64::from_polar(1.0 + eps, a)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::background_field;
    use crate::spectral::CaseId;

    fn case(id: CaseId) -> CaseConfig {
        CaseConfig::new(id, 2.0 / 3.0, 0.2).unwrap()
    }

    #[test]
    fn background_column_is_stationary() {
        let c = case(CaseId::I);
        let w = background_field(&c, 0.0, 10).unwrap();
        let p = spectral::point_from_zeta(&c, C64::from_polar(1.0 + 1e-6, 0.7)).unwrap();
        let m = jost(&w, &p, ColumnKind::M).unwrap();
        let start = m.value(-10);
        for n in -10..=11 {
            let v = m.value(n);
            assert!((v[0] - start[0]).norm() + (v[1] - start[1]).norm() < 1e-10);
        }
        let nn = jost(&w, &p, ColumnKind::N).unwrap();
        let b = nn.value(11);
        assert!((b[0] - (c.r - p.zeta.inv())).norm() < 1e-15);
        assert!((b[1] + c.r_plus(0.0)).norm() < 1e-15);
    }

    #[test]
    fn background_wronskian() {
        let c = case(CaseId::I);
        let w = background_field(&c, 0.0, 8).unwrap();
        let zeta = C64::from_polar(1.0 + 1e-6, 1.1);
        let p = spectral::point_from_zeta(&c, zeta).unwrap();
        let n = jost(&w, &p, ColumnKind::N).unwrap();
        let nb = jost(&w, &p, ColumnKind::Nbar).unwrap();
        let d = c.r * (zeta + zeta.inv() - 2.0 * c.r);
        for site in [-8, 0, 5] {
            assert!((wronskian(&n, &nb, site) - d).norm() < 1e-12);
        }
        assert_eq!(wronskian(&n, &n, 0), C64::new(0.0, 0.0));
    }

    #[test]
    fn background_identity_cases_1_and_3() {
        for id in [CaseId::I, CaseId::III] {
            let c = case(id);
            let w = background_field(&c, 0.4, 12).unwrap();
            for zeta in continuum_samples(6, 1e-6) {
                let s = scattering_coefficients(&w, zeta).unwrap();
                assert!((s.t11 - 1.0).norm() < 1e-12, "{id:?}");
                assert!((s.t22 - 1.0).norm() < 1e-12);
                assert!(s.t21_tilde.norm() < 1e-12 && s.t12_tilde.norm() < 1e-12);
                let (rho, rhob) = reflection_from(&s).unwrap();
                assert!(rho.norm() < 1e-12 && rhob.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn near_branch_point_rejected() {
        let c = case(CaseId::I);
        let w = background_field(&c, 0.0, 4).unwrap();
        let z0 = C64::new(c.r, c.q0);
        assert!(matches!(
            scattering_coefficients(&w, z0 * (1.0 + 1e-12)),
            Err(IstError::NearBranchPoint(_)) | Err(IstError::SingularPoint(_))
        ));
    }

    #[test]
    fn recursion_residual_small_off_continuum() {
        let c = case(CaseId::II);
        let w = PotentialWindow::from_fn(c, 0.0, 20, |n| {
            c.q_plus(0.0) * if n < 0 { -1.0 } else { 1.0 } + C64::new(0.02, -0.01) * (-(n as f64).powi(2) / 8.0).exp()
        })
        .unwrap();
        for zeta in [C64::new(30.0, 5.0), C64::new(0.02, 0.01), C64::new(1.3, 0.4)] {
            let p = spectral::point_from_zeta(&c, zeta).unwrap();
            for kind in [ColumnKind::M, ColumnKind::Mbar, ColumnKind::N, ColumnKind::Nbar] {
                let col = jost(&w, &p, kind).unwrap();
                assert!(recursion_residual(&w, &col) < 1e-10, "{kind:?} at {zeta}");
            }
        }
    }

    #[test]
    fn asymptotics_on_background_case_2() {
        // q0 = 1 would make 1 − q_0 r_0 vanish at the step site
        let c = CaseConfig::new(CaseId::II, 0.8, 0.0).unwrap();
        let w = background_field(&c, 0.0, 10).unwrap();
        let rep = asymptotic_checks(&w).unwrap();
        assert_eq!(rep.expected_sign, -1.0);
        assert!(rep.t22_at_r < 1e-3, "{rep:?}");
        assert!(rep.max() < 1e-3, "{rep:?}");
    }
}
