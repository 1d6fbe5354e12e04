//! Inverse problem in the reflectionless limit: admissible discrete
//! eigenvalues, norming constants, the algebraic system and reconstruction.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{IstError, Result};
use crate::spectral::{self, CaseConfig, CaseId, RegionTag};
use crate::C64;

/// [`relative_det`] below which the reflectionless system is declared singular.
pub const SINGULAR_REL_DET: f64 = 1e-13;
/// Site used for the n → −∞ limit of Θ_n.
pub const N_LARGE: i64 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenFamily {
    /// Member of a complex quartet {ζ, ζ*, ζ̄, ζ̄*}.
    Quartet,
    /// Real pair {ζ̂, ζ̄̂}.
    RealPair,
}

/// One zero ζ of t11 in D₋ together with its partner zero ζ̄ of t22 in D₊.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub zeta: C64,
    pub zeta_bar: C64,
    pub family: EigenFamily,
}

/// All J zeros of t11 (conjugate quartet members listed separately).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSet {
    pub case_id: CaseId,
    pub entries: Vec<EigenPair>,
}

/// Values of the three reflectionless asymptotic constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintValues {
    /// lim_{ζ→1/r} t11
    pub at_inv_r: C64,
    /// lim_{ζ→0} t22
    pub at_zero: C64,
    /// lim_{ζ→r} t22
    pub at_r: C64,
    /// Value all three must take (+1 for cases I/III, −1 for II/IV; `at_zero` always 1).
    pub target: f64,
}

impl ConstraintValues {
    pub fn violation(&self) -> f64 {
        (self.at_inv_r - self.target).norm()
            + (self.at_zero - 1.0).norm()
            + (self.at_r - self.target).norm()
    }
}

impl EigenSet {
    pub fn empty(case_id: CaseId) -> Self {
        EigenSet { case_id, entries: Vec::new() }
    }

    pub fn j(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Θ₋∞ implied by the ζ → 0 constraint: Π ζ_j/ζ̄_j.
    pub fn theta_minus_inf_constraint(&self) -> C64 {
        self.entries
            .iter()
            .fold(C64::new(1.0, 0.0), |acc, e| acc * e.zeta / e.zeta_bar)
    }

    pub fn constraints(&self, cfg: &CaseConfig, theta_minus_inf: C64) -> ConstraintValues {
        let r = cfg.r;
        let mut a = C64::new(1.0, 0.0);
        let mut b = theta_minus_inf;
        let mut c = theta_minus_inf;
        for e in &self.entries {
            a *= (1.0 / r - e.zeta) / (1.0 / r - e.zeta_bar);
            b *= e.zeta_bar / e.zeta;
            c *= (r - e.zeta_bar) / (r - e.zeta);
        }
        ConstraintValues { at_inv_r: a, at_zero: b, at_r: c, target: cfg.conjugate_symmetry_sign() }
    }

    fn check_regions(&self, cfg: &CaseConfig) -> Result<()> {
        for e in &self.entries {
            let rz = spectral::classify(cfg, e.zeta);
            let rb = spectral::classify(cfg, e.zeta_bar);
            if rz != RegionTag::DMinus || rb != RegionTag::DPlus {
                return Err(IstError::Inadmissible(format!(
                    "eigenvalue {} ({rz:?}) / {} ({rb:?}) not in D-/D+",
                    e.zeta, e.zeta_bar
                )));
            }
        }
        Ok(())
    }
}

fn require_case(cfg: &CaseConfig, id: CaseId) -> Result<()> {
    if cfg.case_id != id {
        return Err(IstError::Domain(format!("expected case {:?}, got {:?}", id, cfg.case_id)));
    }
    Ok(())
}

/// Case I: one quartet parameterized by η₁ on the circle |ζ − 1/r| = q0/r.
pub fn eigenvalues_case1(cfg: &CaseConfig, eta1: f64) -> Result<EigenSet> {
    require_case(cfg, CaseId::I)?;
    let (r, q0) = (cfg.r, cfg.q0);
    let off = (eta1 - PI + PI).rem_euclid(2.0 * PI) - PI;
    let bound = (r / q0).atan();
    if !(off.abs() < bound) {
        return Err(IstError::Inadmissible(format!(
            "inadmissible eta1 = {eta1}: |pi - eta1| = {} must be < arctan(r/q0) = {bound}",
            off.abs()
        )));
    }
    let zb1 = (C64::from_polar(q0, eta1) + 1.0) / r;
    let z1 = C64::new(r, 0.0) / (C64::from_polar(q0, -eta1) + 1.0);
    let img = spectral::zeta_bar(cfg, z1)?;
    if (img - zb1).norm() > 1e-12 * zb1.norm().max(1.0) {
        return Err(IstError::Inadmissible(format!(
            "zeta_bar(zeta_1) = {img} does not reproduce zeta_bar_1 = {zb1}"
        )));
    }
    let set = EigenSet {
        case_id: CaseId::I,
        entries: vec![
            EigenPair { zeta: z1, zeta_bar: zb1, family: EigenFamily::Quartet },
            EigenPair { zeta: z1.conj(), zeta_bar: zb1.conj(), family: EigenFamily::Quartet },
        ],
    };
    set.check_regions(cfg)?;
    Ok(set)
}

/// Case II admits no discrete eigenvalues.
pub fn eigenvalues_case2(cfg: &CaseConfig, j: usize) -> Result<EigenSet> {
    require_case(cfg, CaseId::II)?;
    if j > 2 {
        return Err(IstError::Domain(format!("J = {j} is outside the analysed range 0..=2")));
    }
    Ok(EigenSet::empty(CaseId::II))
}

/// Case III: two real pairs {ζ̂₁, ζ̄̂₁}, {1/ζ̄̂₁, ·} built from a real ζ̂₁ ∈ D₋.
pub fn eigenvalues_case3(cfg: &CaseConfig, zeta_hat_1: f64) -> Result<EigenSet> {
    require_case(cfg, CaseId::III)?;
    let z1 = C64::new(zeta_hat_1, 0.0);
    for bp in cfg.branch_points() {
        if (z1 - bp).norm() < 1e-9 {
            return Err(IstError::Inadmissible(format!("zeta_hat_1 = {zeta_hat_1} is a branch point")));
        }
    }
    match spectral::classify(cfg, z1) {
        RegionTag::DMinus => {}
        RegionTag::Continuum => {
            return Err(IstError::Inadmissible(format!(
                "zeta_hat_1 = {zeta_hat_1} lies on the continuous spectrum"
            )))
        }
        RegionTag::DPlus => {
            return Err(IstError::Inadmissible(format!("zeta_hat_1 = {zeta_hat_1} is not in D-")))
        }
    }
    let zb1 = spectral::zeta_bar(cfg, z1)?;
    let z2 = zb1.inv();
    let zb2 = spectral::zeta_bar(cfg, z2)?;
    let set = EigenSet {
        case_id: CaseId::III,
        entries: vec![
            EigenPair { zeta: z1, zeta_bar: zb1, family: EigenFamily::RealPair },
            EigenPair { zeta: z2, zeta_bar: zb2, family: EigenFamily::RealPair },
        ],
    };
    set.check_regions(cfg)?;
    let v = set.constraints(cfg, set.theta_minus_inf_constraint());
    if v.violation() > 1e-8 {
        return Err(IstError::Inadmissible(format!(
            "asymptotic constraints violated by {:e}",
            v.violation()
        )));
    }
    Ok(set)
}

/// Case IV: the single real pair ζ̄₁ = (1−q0)/r.
pub fn eigenvalues_case4(cfg: &CaseConfig, j: usize) -> Result<EigenSet> {
    require_case(cfg, CaseId::IV)?;
    if j != 1 {
        return Err(IstError::Inadmissible(format!(
            "case IV admits only J = 1 (requested J = {j})"
        )));
    }
    let zb1 = C64::new((1.0 - cfg.q0) / cfg.r, 0.0);
    let z1 = C64::new(cfg.r / (1.0 - cfg.q0), 0.0);
    let set = EigenSet {
        case_id: CaseId::IV,
        entries: vec![EigenPair { zeta: z1, zeta_bar: zb1, family: EigenFamily::RealPair }],
    };
    set.check_regions(cfg)?;
    Ok(set)
}

/// Which form of the norming constants to use.
///
/// `Reduced` is the choice for which the reconstructed field satisfies the
/// nonlocal reduction and therefore the lattice equation; `Printed` keeps the
/// alternative λ-powers (λ⁻¹ on C̄₂ in case I, λ⁻⁵ in case IV), which break
/// the reduction and are retained for comparison only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormingConvention {
    #[default]
    Reduced,
    Printed,
}

/// C̄_j(0) for each entry of an [`EigenSet`]; the C_j follow by symmetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormingData {
    pub cbar0: Vec<C64>,
    pub convention: NormingConvention,
}

impl NormingData {
    /// All norming constants zero: reconstructs the bare background.
    pub fn zeros(j: usize) -> Self {
        NormingData { cbar0: vec![C64::new(0.0, 0.0); j], convention: NormingConvention::Reduced }
    }

    pub fn cbar_at(&self, cfg: &CaseConfig, set: &EigenSet, t: f64) -> Result<Vec<C64>> {
        self.cbar0
            .iter()
            .zip(&set.entries)
            .map(|(c, e)| Ok(c * time_factors(cfg, e.zeta_bar, t)?.1))
            .collect()
    }

    /// C_j(t) = −q₊(t)²/(ζ̄_j − r)² · C̄_j(t).
    pub fn c_at(&self, cfg: &CaseConfig, set: &EigenSet, t: f64) -> Result<Vec<C64>> {
        let qp = cfg.q_plus(t);
        Ok(self
            .cbar_at(cfg, set, t)?
            .into_iter()
            .zip(&set.entries)
            .map(|(cb, e)| -qp * qp / ((e.zeta_bar - cfg.r) * (e.zeta_bar - cfg.r)) * cb)
            .collect())
    }
}

/// (c_factor, cbar_factor) = (e^{i(2σδ + γ(ζ))t}, e^{−i(2σδ + γ(ζ))t}).
pub fn time_factors(cfg: &CaseConfig, zeta: C64, t: f64) -> Result<(C64, C64)> {
    let g = spectral::gamma(cfg, zeta)?;
    let w = (g + cfg.phase_rate()) * t;
    Ok(((C64::i() * w).exp(), (-C64::i() * w).exp()))
}

fn lambda_at(cfg: &CaseConfig, zeta: C64) -> Result<C64> {
    Ok(spectral::point_from_zeta(cfg, zeta)?.lambda)
}

/// Case I norming constants for the quartet returned by [`eigenvalues_case1`].
pub fn norming_case1(
    cfg: &CaseConfig,
    set: &EigenSet,
    kappa1: f64,
    thbar1: f64,
    thbar2: f64,
    convention: NormingConvention,
) -> Result<NormingData> {
    require_case(cfg, CaseId::I)?;
    if set.j() != 2 {
        return Err(IstError::Domain("case I norming constants need one quartet (J = 2)".into()));
    }
    if !(kappa1.is_finite() && kappa1 != 0.0) {
        return Err(IstError::Domain(format!("kappa1 must be finite and nonzero, got {kappa1}")));
    }
    let (z1, zb1) = (set.entries[0].zeta, set.entries[0].zeta_bar);
    if zb1.im.abs() < 1e-12 {
        return Err(IstError::DegenerateEigenvalues(format!(
            "zeta_bar_1 = {zb1} is real, so zeta_bar_1 and its conjugate coincide"
        )));
    }
    let lam = lambda_at(cfg, zb1)?;
    let p1 = (zb1 - z1) * (zb1 - z1.conj()) / (zb1 - zb1.conj());
    let p2 = (zb1.conj() - z1) * (zb1.conj() - z1.conj()) / (zb1.conj() - zb1);
    let e1 = C64::from_polar(1.0, thbar1);
    let e2 = C64::from_polar(1.0, thbar2);
    let cbar0 = match convention {
        NormingConvention::Reduced => {
            let d = (thbar1 - thbar2 + PI).rem_euclid(2.0 * PI) - PI;
            if d.abs() > 1e-12 {
                return Err(IstError::Inadmissible(format!(
                    "thbar1 = {thbar1} and thbar2 = {thbar2} must agree mod 2pi for the reduced convention"
                )));
            }
            vec![kappa1 * lam.powi(3) * p1 * e1, -lam.powi(-3) / kappa1 * p2 * e2]
        }
        NormingConvention::Printed => {
            vec![kappa1 * lam.powi(3) * p1 * e1, lam.inv() / kappa1 * p2 * e2]
        }
    };
    Ok(NormingData { cbar0, convention })
}

/// Case IV norming constant for the pair returned by [`eigenvalues_case4`].
pub fn norming_case4(
    cfg: &CaseConfig,
    set: &EigenSet,
    thbar1: f64,
    convention: NormingConvention,
) -> Result<NormingData> {
    require_case(cfg, CaseId::IV)?;
    if set.j() != 1 {
        return Err(IstError::Domain("case IV norming constant needs J = 1".into()));
    }
    let e = set.entries[0];
    let lam = lambda_at(cfg, e.zeta_bar)?;
    let power = match convention {
        NormingConvention::Reduced => -1,
        NormingConvention::Printed => -5,
    };
    Ok(NormingData {
        cbar0: vec![lam.powi(power) * (e.zeta_bar - e.zeta) * C64::from_polar(1.0, thbar1)],
        convention,
    })
}

/// The (4J+1)-dimensional system B X = Y at one (n, t).
///
/// Unknowns: N⁽¹⁾(ζ_j), N⁽²⁾(ζ_j), N̄⁽¹⁾(ζ̄_j), N̄⁽²⁾(ζ̄_j), 1/Θ_n.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionlessSystem {
    pub j: usize,
    pub n: i64,
    pub t: f64,
    pub b: DMatrix<C64>,
    pub y: DVector<C64>,
    /// C_j(t) λ(ζ_j)^{−2n} / (ζ_j(ζ_j − r)), reused by the reconstruction.
    pub r3: Vec<C64>,
    /// C̄_j(t) λ(ζ̄_j)^{2n} / (ζ̄_j − 1/r), reused for r_n.
    pub rbar3: Vec<C64>,
    pub q_plus: C64,
    pub r_plus: C64,
}

impl ReflectionlessSystem {
    pub fn dim(&self) -> usize {
        4 * self.j + 1
    }
}

pub fn build_system(
    cfg: &CaseConfig,
    set: &EigenSet,
    norming: &NormingData,
    n: i64,
    t: f64,
) -> Result<ReflectionlessSystem> {
    let j = set.j();
    if norming.cbar0.len() != j {
        return Err(IstError::Domain(format!(
            "{} norming constants supplied for J = {j}",
            norming.cbar0.len()
        )));
    }
    let r = cfg.r;
    let dim = 4 * j + 1;
    let qp = cfg.q_plus(t);
    let rp = cfg.r_plus(t);
    let cb = norming.cbar_at(cfg, set, t)?;
    let c = norming.c_at(cfg, set, t)?;
    let zs: Vec<C64> = set.entries.iter().map(|e| e.zeta).collect();
    let zbs: Vec<C64> = set.entries.iter().map(|e| e.zeta_bar).collect();
    let lz: Vec<C64> = zs
        .iter()
        .map(|&z| spectral::lambda_pow2n(spectral::lambda_sq(cfg, z), -n))
        .collect();
    let lzb: Vec<C64> = zbs
        .iter()
        .map(|&z| spectral::lambda_pow2n(spectral::lambda_sq(cfg, z), n))
        .collect();

    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let mut b = DMatrix::from_element(dim, dim, zero);
    let mut y = DVector::from_element(dim, zero);
    for i in 0..j {
        b[(i, i)] = one;
        y[i] = C64::new(r, 0.0) - zs[i].inv();
        b[(j + i, j + i)] = one;
        b[(j + i, 4 * j)] = rp;
        b[(2 * j + i, 2 * j + i)] = one;
        b[(2 * j + i, 4 * j)] = -qp;
        b[(3 * j + i, 3 * j + i)] = one;
        y[3 * j + i] = zbs[i] - r;
        for k in 0..j {
            let rk = -(zs[i] - 1.0 / r) * cb[k] * lzb[k] / ((zbs[k] - 1.0 / r) * (zs[i] - zbs[k]));
            b[(i, 2 * j + k)] = rk;
            b[(j + i, 3 * j + k)] = rk;
            let rbk = -(zbs[i] - r) * c[k] * lz[k] / ((zs[k] - r) * (zbs[i] - zs[k]));
            b[(2 * j + i, k)] = rbk;
            b[(3 * j + i, j + k)] = rbk;
        }
    }
    b[(4 * j, 4 * j)] = one;
    y[4 * j] = one;
    let r3: Vec<C64> = (0..j).map(|k| c[k] * lz[k] / (zs[k] * (zs[k] - r))).collect();
    for k in 0..j {
        b[(4 * j, j + k)] = r3[k];
    }
    let rbar3 = (0..j).map(|k| cb[k] * lzb[k] / (zbs[k] - 1.0 / r)).collect();
    if b.iter().any(|v| !v.is_finite()) {
        return Err(IstError::SingularSolution { n, t, rel_det: f64::NAN });
    }
    Ok(ReflectionlessSystem { j, n, t, b, y, r3, rbar3, q_plus: qp, r_plus: rp })
}

/// Solution of the system together with its Hadamard-normalized determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSolution {
    pub x: DVector<C64>,
    pub rel_det: f64,
}

fn column_scaled(b: &DMatrix<C64>) -> (DMatrix<C64>, Vec<f64>) {
    let norms: Vec<f64> = b
        .column_iter()
        .map(|c| {
            let n = c.norm();
            if n > 0.0 && n.is_finite() {
                n
            } else {
                1.0
            }
        })
        .collect();
    let mut scaled = b.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col /= C64::new(norms[j], 0.0);
    }
    (scaled, norms)
}

fn hadamard_ratio(b: &DMatrix<C64>) -> f64 {
    let det = b.clone().lu().determinant().norm();
    let rows: f64 = b.row_iter().map(|row| row.norm()).product();
    if rows == 0.0 {
        0.0
    } else {
        det / rows
    }
}

/// |det B̃| / Π‖row_i(B̃)‖ where B̃ is B with unit-norm columns: 1 for
/// orthogonal rows, 0 for singular B, and insensitive to the λ^{±2n} growth
/// of individual columns.
pub fn relative_det(b: &DMatrix<C64>) -> f64 {
    hadamard_ratio(&column_scaled(b).0)
}

impl ReflectionlessSystem {
    pub fn solve(&self) -> Result<SystemSolution> {
        let (scaled, norms) = column_scaled(&self.b);
        let rel_det = hadamard_ratio(&scaled);
        let singular = || IstError::SingularSolution { n: self.n, t: self.t, rel_det };
        if !(rel_det >= SINGULAR_REL_DET) {
            return Err(singular());
        }
        let mut x = scaled.lu().solve(&self.y).ok_or_else(singular)?;
        for (v, s) in x.iter_mut().zip(&norms) {
            *v /= *s;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(singular());
        }
        Ok(SystemSolution { x, rel_det })
    }
}

/// Field value and by-products at one lattice site and time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub q: C64,
    /// r_n from the second-component equations (should equal σ q*_{−n}).
    pub r: C64,
    pub theta: C64,
    pub rel_det: f64,
}

pub fn reconstruct_full(
    cfg: &CaseConfig,
    set: &EigenSet,
    norming: &NormingData,
    n: i64,
    t: f64,
) -> Result<Reconstruction> {
    let sys = build_system(cfg, set, norming, n, t)?;
    let sol = sys.solve()?;
    let j = sys.j;
    let theta = sol.x[4 * j].inv();
    let mut sum_q = C64::new(0.0, 0.0);
    let mut sum_r = C64::new(0.0, 0.0);
    for k in 0..j {
        sum_q += cfg.r * sys.r3[k] * sol.x[k];
        sum_r += sys.rbar3[k] * sol.x[3 * j + k];
    }
    let q = sys.q_plus + theta * sum_q;
    let r = sys.r_plus - theta * sum_r;
    if !q.is_finite() || !theta.is_finite() {
        return Err(IstError::SingularSolution { n, t, rel_det: sol.rel_det });
    }
    Ok(Reconstruction { q, r, theta, rel_det: sol.rel_det })
}

/// q_n(t) = q₊(t) + Θ_n Σ r C_j λ(ζ_j)^{−2n}/(ζ_j(ζ_j − r)) N⁽¹⁾(ζ_j).
pub fn reconstruct(cfg: &CaseConfig, set: &EigenSet, norming: &NormingData, n: i64, t: f64) -> Result<C64> {
    reconstruct_full(cfg, set, norming, n, t).map(|r| r.q)
}

struct Case4Parts {
    qp: C64,
    rp: C64,
    cb: C64,
    r3: C64,
    lam: C64,
    lam2n: C64,
    v2: C64,
    zb: C64,
}

fn case4_parts(cfg: &CaseConfig, set: &EigenSet, norming: &NormingData, n: i64, t: f64) -> Result<Case4Parts> {
    require_case(cfg, CaseId::IV)?;
    if set.j() != 1 || norming.cbar0.len() != 1 {
        return Err(IstError::Domain("closed form needs exactly one eigenvalue pair".into()));
    }
    let r = cfg.r;
    let e = set.entries[0];
    let (z, zb) = (e.zeta, e.zeta_bar);
    let qp = cfg.q_plus(t);
    let rp = cfg.r_plus(t);
    let cb = norming.cbar_at(cfg, set, t)?[0];
    let c = norming.c_at(cfg, set, t)?[0];
    let lam = lambda_at(cfg, zb)?;
    let lam2n = spectral::lambda_pow2n(lam * lam, n);
    let lz = spectral::lambda_pow2n(spectral::lambda_sq(cfg, z), -n);
    let r3 = c * lz / (z * (z - r));
    let v = qp * cb / (zb * zb - 2.0 * r * zb + 1.0) * lam2n * lam;
    Ok(Case4Parts { qp, rp, cb, r3, lam, lam2n, v2: v * v, zb })
}

fn guard(v: C64, n: i64, t: f64) -> Result<C64> {
    if v.norm() < SINGULAR_REL_DET {
        return Err(IstError::SingularSolution { n, t, rel_det: v.norm() });
    }
    Ok(v)
}

/// Closed-form case-IV first-order soliton (the form that agrees with the
/// 5×5 system; see [`soliton_closed_form_case4_as_printed`] for the other).
pub fn soliton_closed_form_case4(cfg: &CaseConfig, set: &EigenSet, norming: &NormingData, n: i64, t: f64) -> Result<C64> {
    let p = case4_parts(cfg, set, norming, n, t)?;
    let r = cfg.r;
    let l2 = p.lam * p.lam;
    let d1 = guard(p.v2 - 1.0, n, t)?;
    let d2 = guard(p.v2 * l2 - 1.0, n, t)?;
    let rz = r * p.zb - 1.0;
    let first = r * p.zb * (p.v2 + p.r3 * p.rp - 1.0) * p.lam2n / (rz * rz * d2) * p.qp * p.cb;
    let second = (l2 - 1.0) / (p.zb / r - 1.0) * p.v2;
    Ok(p.qp * (1.0 + (first - second) / d1))
}

/// The same closed form with the ratio (v²λ²−1)/(v²+R₃r₊−1) in place of its
/// reciprocal. It does not agree with the linear system; kept for comparison.
pub fn soliton_closed_form_case4_as_printed(
    cfg: &CaseConfig,
    set: &EigenSet,
    norming: &NormingData,
    n: i64,
    t: f64,
) -> Result<C64> {
    let p = case4_parts(cfg, set, norming, n, t)?;
    let r = cfg.r;
    let l2 = p.lam * p.lam;
    let d1 = guard(p.v2 - 1.0, n, t)?;
    let d2 = guard(p.v2 + p.r3 * p.rp - 1.0, n, t)?;
    let rz = r * p.zb - 1.0;
    let first = r * p.zb * (p.v2 * l2 - 1.0) * p.lam2n / (rz * rz * d2) * p.qp * p.cb;
    let second = (l2 - 1.0) / (p.zb / r - 1.0) * p.v2;
    Ok(p.qp * (1.0 + (first - second) / d1))
}

/// Θ₋∞ from the solved system at n = −N_LARGE (t = 0), falling back to
/// shallower sites if the deep system is numerically singular.
pub fn theta_minus_inf_from_system(cfg: &CaseConfig, set: &EigenSet, norming: &NormingData) -> Result<C64> {
    if set.is_empty() {
        return Ok(C64::new(1.0, 0.0));
    }
    let mut last = None;
    for n in [-N_LARGE, -120, -80, -60] {
        match reconstruct_full(cfg, set, norming, n, 0.0) {
            Ok(rec) => return Ok(rec.theta),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Result of searching a (n, t) region for zeros of det B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularityScan {
    pub flagged: bool,
    pub min_rel_det: f64,
    pub at_n: i64,
    pub at_t: f64,
    /// Largest |q| seen at any non-singular sample.
    pub max_abs_q: f64,
}

fn rel_det_at(cfg: &CaseConfig, set: &EigenSet, norming: &NormingData, n: i64, t: f64) -> f64 {
    build_system(cfg, set, norming, n, t)
        .map(|s| relative_det(&s.b))
        .unwrap_or(0.0)
}

/// Samples det B on a t-grid for every n, then refines each local minimum
/// by golden-section search. Flags when the relative determinant drops below
/// [`SINGULAR_REL_DET`] or |q| exceeds [`crate::BLOWUP_THRESHOLD`].
pub fn scan_singularities(
    cfg: &CaseConfig,
    set: &EigenSet,
    norming: &NormingData,
    n_range: (i64, i64),
    t_range: (f64, f64),
    samples: usize,
) -> SingularityScan {
    let samples = samples.max(3);
    let mut out = SingularityScan { flagged: false, min_rel_det: f64::INFINITY, at_n: n_range.0, at_t: t_range.0, max_abs_q: 0.0 };
    let h = (t_range.1 - t_range.0) / (samples - 1) as f64;
    for n in n_range.0..=n_range.1 {
        let ts: Vec<f64> = (0..samples).map(|i| t_range.0 + h * i as f64).collect();
        let vals: Vec<f64> = ts.iter().map(|&t| rel_det_at(cfg, set, norming, n, t)).collect();
        for i in 0..samples {
            let left = if i == 0 { f64::INFINITY } else { vals[i - 1] };
            let right = if i + 1 == samples { f64::INFINITY } else { vals[i + 1] };
            if !(vals[i] <= left && vals[i] <= right) {
                continue;
            }
            let a = ts[i] - if i == 0 { 0.0 } else { h };
            let b = ts[i] + if i + 1 == samples { 0.0 } else { h };
            let (tm, vm) = golden_min(|t| rel_det_at(cfg, set, norming, n, t), a, b, vals[i], ts[i]);
            if vm < out.min_rel_det {
                out.min_rel_det = vm;
                out.at_n = n;
                out.at_t = tm;
            }
            if let Ok(q) = reconstruct(cfg, set, norming, n, tm) {
                out.max_abs_q = out.max_abs_q.max(q.norm());
            }
        }
    }
    out.flagged = out.min_rel_det < SINGULAR_REL_DET || out.max_abs_q > crate::BLOWUP_THRESHOLD;
    out
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, f0: f64, t0: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut best_t, mut best_v) = (t0, f0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        for (t, v) in [(c, fc), (d, fd)] {
            if v < best_v {
                best_t = t;
                best_v = v;
            }
        }
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    (best_t, best_v)
}

/// Case II: numeric search for eigenvalue sets satisfying the three
/// reflectionless asymptotic constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub candidates: usize,
    /// Smallest violation found on the raw grid.
    pub grid_min_violation: f64,
    pub grid_argmin: Vec<C64>,
    /// Smallest violation after local refinement of the best grid points.
    pub refined_min_violation: f64,
    pub refined_witness: Vec<C64>,
    /// Θ₋∞ implied by the witness.
    pub witness_theta_minus_inf: C64,
}

/// Violation of the constraints for the zeros `zs` (each in D₋), or `None`
/// if a zero (or its image) leaves its region or touches a singular point.
pub fn constraint_violation(cfg: &CaseConfig, zs: &[C64]) -> Option<f64> {
    let mut entries = Vec::with_capacity(zs.len());
    for &z in zs {
        if spectral::classify(cfg, z) != RegionTag::DMinus
            || cfg.singular_points().iter().any(|p| (z - p).norm() < 1e-6)
        {
            return None;
        }
        let zb = spectral::zeta_bar(cfg, z).ok()?;
        if spectral::classify(cfg, zb) != RegionTag::DPlus || zb.norm() < 1e-9 {
            return None;
        }
        let family = if z.im == 0.0 { EigenFamily::RealPair } else { EigenFamily::Quartet };
        entries.push(EigenPair { zeta: z, zeta_bar: zb, family });
    }
    let set = EigenSet { case_id: cfg.case_id, entries };
    let v = set.constraints(cfg, set.theta_minus_inf_constraint()).violation();
    v.is_finite().then_some(v)
}

#[derive(Clone, Copy)]
enum Family {
    OneReal,
    TwoReal,
    Quartet,
}

fn family_zeros(f: Family, p: &[f64]) -> Vec<C64> {
    match f {
        Family::OneReal => vec![C64::new(p[0], 0.0)],
        Family::TwoReal => vec![C64::new(p[0], 0.0), C64::new(p[1], 0.0)],
        Family::Quartet => {
            let z = C64::new(p[0], p[1]);
            vec![z, z.conj()]
        }
    }
}

fn compass(cfg: &CaseConfig, f: Family, start: &[f64], mut step: f64) -> (Vec<f64>, f64) {
    let eval = |p: &[f64]| constraint_violation(cfg, &family_zeros(f, p)).unwrap_or(f64::INFINITY);
    let mut p = start.to_vec();
    let mut best = eval(&p);
    while step > 1e-15 && best > 0.0 {
        let mut improved = false;
        for i in 0..p.len() {
            for s in [step, -step] {
                let mut c = p.clone();
                c[i] += s;
                let v = eval(&c);
                if v < best {
                    best = v;
                    p = c;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (p, best)
}

/// Grid scan of J ∈ {1, 2} eigenvalue configurations (one real zero, two real
/// zeros, one complex quartet) followed by compass-search refinement.
pub fn feasibility_scan_case2(cfg: &CaseConfig, grid: usize) -> Result<FeasibilityReport> {
    require_case(cfg, CaseId::II)?;
    let grid = grid.max(4);
    let extent = 3.0 * (cfg.r + cfg.q0);
    let axis: Vec<f64> = (0..grid)
        .map(|i| -extent + 2.0 * extent * (i as f64 + 0.5) / grid as f64)
        .collect();
    let mut scored: Vec<(f64, Family, Vec<f64>)> = Vec::new();
    let mut candidates = 0usize;
    let mut push = |f: Family, p: Vec<f64>| {
        candidates += 1;
        if let Some(v) = constraint_violation(cfg, &family_zeros(f, &p)) {
            scored.push((v, f, p));
        }
    };
    for &x in &axis {
        push(Family::OneReal, vec![x]);
    }
    for (i, &x) in axis.iter().enumerate() {
        for &y in &axis[i + 1..] {
            push(Family::TwoReal, vec![x, y]);
        }
    }
    for &x in &axis {
        for &y in axis.iter().filter(|&&y| y > 0.0) {
            push(Family::Quartet, vec![x, y]);
        }
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (grid_min, grid_arg) = scored
        .first()
        .map(|(v, f, p)| (*v, family_zeros(*f, p)))
        .unwrap_or((f64::INFINITY, Vec::new()));

    let mut refined = (grid_min, grid_arg.clone());
    let step = 2.0 * extent / grid as f64;
    for fam in [Family::OneReal, Family::TwoReal, Family::Quartet] {
        let starts: Vec<&Vec<f64>> = scored
            .iter()
            .filter(|(_, f, _)| std::mem::discriminant(f) == std::mem::discriminant(&fam))
            .take(5)
            .map(|(_, _, p)| p)
            .collect();
        for s in starts {
            let (p, v) = compass(cfg, fam, s, step);
            if v < refined.0 {
                refined = (v, family_zeros(fam, &p));
            }
        }
    }
    let theta = refined
        .1
        .iter()
        .filter_map(|&z| spectral::zeta_bar(cfg, z).ok().map(|zb| z / zb))
        .fold(C64::new(1.0, 0.0), |a, b| a * b);
    Ok(FeasibilityReport {
        candidates,
        grid_min_violation: grid_min,
        grid_argmin: grid_arg,
        refined_min_violation: refined.0,
        refined_witness: refined.1,
        witness_theta_minus_inf: theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case1_j2(theta: f64) -> (CaseConfig, EigenSet, NormingData) {
        let c = CaseConfig::new(CaseId::I, 2.0 / 3.0, theta).unwrap();
        let s = eigenvalues_case1(&c, PI + PI / 7.0).unwrap();
        let nd = norming_case1(&c, &s, 1.0, 0.0, 0.0, NormingConvention::Reduced).unwrap();
        (c, s, nd)
    }

    #[test]
    fn case1_eigenvalue_examples() {
        let c = CaseConfig::new(CaseId::I, 2.0 / 3.0, 0.0).unwrap();
        let s = eigenvalues_case1(&c, PI).unwrap();
        assert!((s.entries[0].zeta_bar - C64::new(1.0 / 5f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!(matches!(eigenvalues_case1(&c, PI / 2.0), Err(IstError::Inadmissible(_))));
        let (c, s, _) = case1_j2(0.0);
        let expect = (C64::new(1.0, 0.0) - C64::from_polar(c.q0, PI / 7.0)) / c.r;
        assert!((s.entries[0].zeta_bar - expect).norm() < 1e-14);
        for e in &s.entries {
            assert!(((e.zeta_bar - 1.0 / c.r).norm() - c.q0 / c.r).abs() < 1e-14);
        }
    }

    #[test]
    fn case1_constraint_identity() {
        let (c, s, _) = case1_j2(0.0);
        let v = s.constraints(&c, s.theta_minus_inf_constraint());
        assert!((v.at_inv_r - 1.0).norm() < 1e-12);
        assert!((v.at_r - 1.0).norm() < 1e-12, "{v:?}");
    }

    #[test]
    fn case3_eigenvalue_examples() {
        let c = CaseConfig::new(CaseId::III, 1.0, 0.0).unwrap();
        let s = eigenvalues_case3(&c, 3.0).unwrap();
        let r = 2f64.sqrt();
        let zb = (3.0 * r - 1.0) / (3.0 - r);
        assert!((s.entries[0].zeta_bar.re - zb).abs() < 1e-14);
        assert!((s.entries[1].zeta.re - 1.0 / zb).abs() < 1e-14);
        assert!(matches!(eigenvalues_case3(&c, r + 1.0), Err(IstError::Inadmissible(_))));
        assert!(matches!(eigenvalues_case3(&c, r - 1.0 + 1e-12), Err(IstError::Inadmissible(_))));
    }

    #[test]
    fn case4_eigenvalue_examples() {
        let c = CaseConfig::new(CaseId::IV, 2.0 / 3.0, 0.0).unwrap();
        let s = eigenvalues_case4(&c, 1).unwrap();
        assert!((s.entries[0].zeta_bar.re - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert!((spectral::zeta_bar(&c, s.entries[0].zeta).unwrap() - s.entries[0].zeta_bar).norm() < 1e-14);
        assert!(eigenvalues_case4(&c, 2).is_err());
    }

    #[test]
    fn case2_is_empty() {
        let c = CaseConfig::new(CaseId::II, 1.0, 0.0).unwrap();
        for j in 0..=2 {
            assert!(eigenvalues_case2(&c, j).unwrap().is_empty());
        }
    }

    #[test]
    fn zero_norming_gives_background() {
        let (c, s, _) = case1_j2(0.3);
        let nd = NormingData::zeros(2);
        for n in [-3, 0, 4] {
            let rec = reconstruct_full(&c, &s, &nd, n, 0.7).unwrap();
            assert!((rec.q - c.q_plus(0.7)).norm() < 1e-15);
            assert!((rec.theta - 1.0).norm() < 1e-15);
        }
    }

    #[test]
    fn norming_symmetry_holds() {
        let (c, s, nd) = case1_j2(0.0);
        for t in [0.0, 1.3] {
            let cb = nd.cbar_at(&c, &s, t).unwrap();
            let cc = nd.c_at(&c, &s, t).unwrap();
            for k in 0..2 {
                let zb = s.entries[k].zeta_bar;
                let qp = c.q_plus(t);
                assert!((cc[k] + qp * qp / ((zb - c.r) * (zb - c.r)) * cb[k]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn norming_time_dependence() {
        let (c, s, nd) = case1_j2(0.0);
        let a = nd.cbar_at(&c, &s, 0.0).unwrap()[0];
        let b = nd.cbar_at(&c, &s, 1.0).unwrap()[0];
        let g = spectral::gamma(&c, s.entries[0].zeta_bar).unwrap();
        assert!((b / a - (-C64::i() * (2.0 * c.q0 * c.q0 + g)).exp()).norm() < 1e-13);
        let (f, fb) = time_factors(&c, C64::new(0.3, 0.2), 0.0).unwrap();
        assert_eq!((f, fb), (C64::new(1.0, 0.0), C64::new(1.0, 0.0)));
    }

    #[test]
    fn reduced_convention_requires_equal_phases() {
        let c = CaseConfig::new(CaseId::I, 2.0 / 3.0, 0.0).unwrap();
        let s = eigenvalues_case1(&c, PI + PI / 7.0).unwrap();
        assert!(matches!(
            norming_case1(&c, &s, 1.0, 0.0, 0.5, NormingConvention::Reduced),
            Err(IstError::Inadmissible(_))
        ));
        assert!(norming_case1(&c, &s, 1.0, 0.0, 0.5, NormingConvention::Printed).is_ok());
        assert!(norming_case1(&c, &s, 0.0, 0.0, 0.0, NormingConvention::Printed).is_err());
        let real = eigenvalues_case1(&c, PI).unwrap();
        assert!(matches!(
            norming_case1(&c, &real, 1.0, 0.0, 0.0, NormingConvention::Reduced),
            Err(IstError::DegenerateEigenvalues(_))
        ));
    }

    #[test]
    fn case4_norming_phase() {
        let c = CaseConfig::new(CaseId::IV, 2.0 / 3.0, 0.0).unwrap();
        let s = eigenvalues_case4(&c, 1).unwrap();
        for conv in [NormingConvention::Reduced, NormingConvention::Printed] {
            let nd = norming_case4(&c, &s, PI / 3.0, conv).unwrap();
            let arg = nd.cbar0[0].arg();
            let d = (arg - PI / 3.0).rem_euclid(PI);
            assert!(d < 1e-12 || (PI - d) < 1e-12, "{conv:?}: {arg}");
        }
    }

    #[test]
    fn reduction_holds_for_reduced_case1() {
        let (c, s, nd) = case1_j2(0.0);
        for n in [-4, 0, 3] {
            let rec = reconstruct_full(&c, &s, &nd, n, 0.5).unwrap();
            let mirror = reconstruct(&c, &s, &nd, -n, 0.5).unwrap();
            assert!((rec.r - mirror.conj()).norm() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn theta_minus_inf_matches_constraint() {
        let (c, s, nd) = case1_j2(0.0);
        let th = theta_minus_inf_from_system(&c, &s, &nd).unwrap();
        assert!((th - s.theta_minus_inf_constraint()).norm() < 1e-8, "{th}");
        assert!((th - 5.2203194605836).norm() < 1e-9);
    }

    #[test]
    fn golden_finds_v_minimum() {
        let (t, v) = golden_min(|t| (t - 0.123456789).abs(), 0.0, 1.0, 1.0, 0.0);
        assert!((t - 0.123456789).abs() < 1e-13 && v < 1e-13);
    }
}
