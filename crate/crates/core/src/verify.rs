//! Independent checks: lattice-equation residuals of analytic solutions and a
//! direct RK4 integration of the lattice ODE.

use serde::{Deserialize, Serialize};

use crate::error::{IstError, Result};
use crate::lattice::{al_rhs_local, PotentialWindow};
use crate::spectral::CaseConfig;
use crate::{BLOWUP_THRESHOLD, C64};

/// Default finite-difference step for q̇.
pub const DEFAULT_H: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_abs_residual: f64,
    pub argmax_n: i64,
    pub argmax_t: f64,
    /// (n, t, residual) for every evaluated cell.
    pub residuals: Vec<(i64, f64, f64)>,
    pub h: f64,
    pub order: u32,
}

/// Pointwise residual |i q̇_n − Δq_n + σ q_n q*_{−n}(q_{n+1} + q_{n−1})| with q̇
/// from the fourth-order central difference over t ± h, t ± 2h.
pub fn equation_residual<F>(eval: F, cfg: &CaseConfig, n_range: (i64, i64), times: &[f64], h: f64) -> Result<ResidualReport>
where
    F: Fn(i64, f64) -> Result<C64>,
{
    if !(h > 0.0) {
        return Err(IstError::Domain(format!("finite-difference step must be positive, got {h}")));
    }
    let sigma = cfg.sigma as f64;
    let mut rep = ResidualReport {
        max_abs_residual: 0.0,
        argmax_n: n_range.0,
        argmax_t: times.first().copied().unwrap_or(0.0),
        residuals: Vec::new(),
        h,
        order: 4,
    };
    for &t in times {
        for n in n_range.0..=n_range.1 {
            let qd = (-eval(n, t + 2.0 * h)? + eval(n, t + h)? * 8.0 - eval(n, t - h)? * 8.0
                + eval(n, t - 2.0 * h)?)
                / (12.0 * h);
            let q = eval(n, t)?;
            let qp1 = eval(n + 1, t)?;
            let qm1 = eval(n - 1, t)?;
            let qm = eval(-n, t)?;
            let res = (C64::i() * qd - (qp1 - q * 2.0 + qm1) + q * qm.conj() * sigma * (qp1 + qm1)).norm();
            rep.residuals.push((n, t, res));
            if !(res <= rep.max_abs_residual) {
                rep.max_abs_residual = res;
                rep.argmax_n = n;
                rep.argmax_t = t;
            }
        }
    }
    Ok(rep)
}

/// Snapshots of an RK4 run; boundary sites |n| ∈ {N, N−1} are pinned to the
/// analytic background.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub snapshots: Vec<PotentialWindow>,
    pub dt: f64,
    pub boundary: &'static str,
}

fn pin(cfg: &CaseConfig, q: &mut [C64], big: i64, t: f64) {
    let (qm, qp) = (cfg.q_minus(t), cfg.q_plus(t));
    for n in [big, big - 1] {
        q[(big - n) as usize] = qm;
        q[(big + n) as usize] = qp;
    }
}

fn rhs(cfg: &CaseConfig, q: &[C64], big: i64, out: &mut [C64]) {
    let sigma = cfg.sigma as f64;
    let at = |n: i64| q[(n + big) as usize];
    for n in -big..=big {
        out[(n + big) as usize] = if n.abs() >= big - 1 {
            C64::new(0.0, 0.0)
        } else {
            al_rhs_local(sigma, at(n - 1), at(n), at(n + 1), at(-n))
        };
    }
}

/// Classical RK4 on the window from `initial.t` to `initial.t + t_end`
/// (negative `dt` integrates backwards).
pub fn simulate(initial: &PotentialWindow, t_end: f64, dt: f64) -> Result<Trajectory> {
    if !(dt.is_finite() && dt != 0.0 && t_end.is_finite()) || (t_end != 0.0 && t_end.signum() != dt.signum()) {
        return Err(IstError::Domain(format!("invalid time stepping: t_end = {t_end}, dt = {dt}")));
    }
    let big = initial.n();
    if big < 3 {
        return Err(IstError::Domain("simulation needs a window half-width of at least 3".into()));
    }
    let cfg = initial.cfg;
    let steps = (t_end / dt).round() as usize;
    let len = initial.samples().len();
    let t0 = initial.t;
    let mut q = initial.samples().to_vec();
    pin(&cfg, &mut q, big, t0);
    let mut times = vec![t0];
    let mut snaps = vec![PotentialWindow::new(cfg, t0, q.clone())?];
    let (mut k1, mut k2, mut k3, mut k4) = (vec![C64::default(); len], vec![C64::default(); len], vec![C64::default(); len], vec![C64::default(); len]);
    let mut tmp = vec![C64::default(); len];
    for step in 1..=steps {
        let t = t0 + dt * (step - 1) as f64;
        rhs(&cfg, &q, big, &mut k1);
        for i in 0..len {
            tmp[i] = q[i] + k1[i] * (dt / 2.0);
        }
        pin(&cfg, &mut tmp, big, t + dt / 2.0);
        rhs(&cfg, &tmp, big, &mut k2);
        for i in 0..len {
            tmp[i] = q[i] + k2[i] * (dt / 2.0);
        }
        pin(&cfg, &mut tmp, big, t + dt / 2.0);
        rhs(&cfg, &tmp, big, &mut k3);
        for i in 0..len {
            tmp[i] = q[i] + k3[i] * dt;
        }
        pin(&cfg, &mut tmp, big, t + dt);
        rhs(&cfg, &tmp, big, &mut k4);
        for i in 0..len {
            q[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
        let tn = t0 + dt * step as f64;
        pin(&cfg, &mut q, big, tn);
        let max_abs = q.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !(max_abs <= BLOWUP_THRESHOLD) {
            return Err(IstError::BlowupDetected { step, t: tn, max_abs });
        }
        times.push(tn);
        snaps.push(PotentialWindow::new(cfg, tn, q.clone())?);
    }
    Ok(Trajectory { times, snapshots: snaps, dt, boundary: "pinned |n| in {N, N-1}" })
}

/// Max over all snapshots and sites of |simulated − analytic|.
pub fn compare<F>(traj: &Trajectory, eval: F) -> Result<f64>
where
    F: Fn(i64, f64) -> Result<C64>,
{
    if traj.times.len() != traj.snapshots.len() {
        return Err(IstError::GridMismatch(format!(
            "{} times vs {} snapshots",
            traj.times.len(),
            traj.snapshots.len()
        )));
    }
    let mut worst = 0.0f64;
    for (w, &t) in traj.snapshots.iter().zip(&traj.times) {
        for n in w.sites() {
            worst = worst.max((w.q_at(n) - eval(n, t)?).norm());
        }
    }
    Ok(worst)
}

/// Max deviation between two trajectories sampled on the same grid.
pub fn compare_trajectories(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    if a.times.len() != b.times.len() || a.snapshots.first().map(|w| w.n()) != b.snapshots.first().map(|w| w.n()) {
        return Err(IstError::GridMismatch("trajectories have different grids".into()));
    }
    let mut worst = 0.0f64;
    for ((wa, wb), (ta, tb)) in a.snapshots.iter().zip(&b.snapshots).zip(a.times.iter().zip(&b.times)) {
        if (ta - tb).abs() > 1e-12 {
            return Err(IstError::GridMismatch(format!("time {ta} vs {tb}")));
        }
        for n in wa.sites() {
            worst = worst.max((wa.q_at(n) - wb.q_at(n)).norm());
        }
    }
    Ok(worst)
}
