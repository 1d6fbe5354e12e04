//! Run configuration. Every key is optional except `case` and `q0`; unknown
//! keys are rejected before anything is computed.

use std::path::{Path, PathBuf};

use ist_core::ist::{self, NormingConvention};
use ist_core::{CaseConfig, CaseId, EigenSet, IstError, NormingData};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
}

impl TimeGrid {
    /// `steps` evenly spaced times from t0 to t1 inclusive.
    pub fn times(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.t0],
            s => (0..s).map(|i| self.t0 + (self.t1 - self.t0) * i as f64 / (s - 1) as f64).collect(),
        }
    }
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid { t0: 0.0, t1: 0.0, steps: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub residual: f64,
    pub scattering: f64,
    pub compare: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { residual: 1e-6, scattering: 1e-5, compare: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: u8,
    pub q0: f64,
    #[serde(default, alias = "theta")]
    pub theta_minus: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_hat_1: Option<f64>,
    /// Number of eigenvalue pairs; `0` requests the pure background.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(default = "one")]
    pub kappa1: f64,
    #[serde(default)]
    pub thbar1: f64,
    #[serde(default)]
    pub thbar2: f64,
    #[serde(default)]
    pub convention: NormingConvention,
    /// Half-width N of the lattice window used for scattering and evolution.
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_n_range")]
    pub n_range: (i64, i64),
    #[serde(default)]
    pub t_grid: TimeGrid,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "one")]
    pub t_end: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Field file (the `soliton` CSV format, one time slice) used by `scatter`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_csv: Option<PathBuf>,
    #[serde(default = "default_samples")]
    pub zeta_samples: usize,
}

fn one() -> f64 {
    1.0
}
fn default_window() -> usize {
    60
}
fn default_n_range() -> (i64, i64) {
    (-30, 30)
}
fn default_dt() -> f64 {
    0.01
}
fn default_samples() -> usize {
    20
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config; a relative `field_csv` is resolved against the config's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        if let Some(p) = cfg.field_csv.as_mut() {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if CaseId::from_index(self.case).is_none() {
            return bad(format!("case must be 1..=4, got {}", self.case));
        }
        let finite = [
            ("q0", self.q0),
            ("theta_minus", self.theta_minus),
            ("kappa1", self.kappa1),
            ("thbar1", self.thbar1),
            ("thbar2", self.thbar2),
            ("dt", self.dt),
            ("t_end", self.t_end),
            ("t_grid.t0", self.t_grid.t0),
            ("t_grid.t1", self.t_grid.t1),
        ];
        for (k, v) in finite {
            if !v.is_finite() {
                return bad(format!("{k} must be finite"));
            }
        }
        if self.window < 3 {
            return bad(format!("window must be >= 3, got {}", self.window));
        }
        if self.n_range.0 > self.n_range.1 {
            return bad(format!("n_range is empty: {:?}", self.n_range));
        }
        if self.t_grid.steps == 0 {
            return bad("t_grid.steps must be >= 1".into());
        }
        let tol = &self.tolerances;
        if [tol.residual, tol.scattering, tol.compare].iter().any(|v| !(*v >= 0.0)) {
            return bad("tolerances must be non-negative".into());
        }
        if self.zeta_samples == 0 {
            return bad("zeta_samples must be >= 1".into());
        }
        self.case_config()?;
        Ok(())
    }

    pub fn case_id(&self) -> CaseId {
        CaseId::from_index(self.case).expect("validated")
    }

    pub fn case_config(&self) -> Result<CaseConfig, CliError> {
        let id = CaseId::from_index(self.case).ok_or_else(|| CliError::Config(format!("bad case {}", self.case)))?;
        CaseConfig::new(id, self.q0, self.theta_minus).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Discrete spectrum requested by the config (empty for J = 0 and case II).
    pub fn eigen_set(&self, cfg: &CaseConfig) -> Result<EigenSet, CliError> {
        let id = cfg.case_id;
        if self.j == Some(0) {
            return Ok(EigenSet::empty(id));
        }
        let need = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| CliError::Config(format!("case {} needs `{name}` (or j = 0 for the background)", self.case)))
        };
        let set = match id {
            CaseId::I => {
                if let Some(j) = self.j.filter(|&j| j != 2) {
                    return Err(CliError::Inadmissible(format!("case I is parameterized by one quartet (J = 2), got J = {j}")));
                }
                ist::eigenvalues_case1(cfg, need("eta1", self.eta1)?)
            }
            CaseId::II => ist::eigenvalues_case2(cfg, self.j.unwrap_or(1)),
            CaseId::III => ist::eigenvalues_case3(cfg, need("zeta_hat_1", self.zeta_hat_1)?),
            CaseId::IV => ist::eigenvalues_case4(cfg, self.j.unwrap_or(1)),
        };
        set.map_err(CliError::from)
    }

    /// Norming constants for a nonempty spectrum. Case III has none: its
    /// pairs are fixed by the constraints but no residue formula is available.
    pub fn norming(&self, cfg: &CaseConfig, set: &EigenSet) -> Result<NormingData, CliError> {
        if set.is_empty() {
            return Ok(NormingData::zeros(0));
        }
        match cfg.case_id {
            CaseId::I => ist::norming_case1(cfg, set, self.kappa1, self.thbar1, self.thbar2, self.convention),
            CaseId::IV => ist::norming_case4(cfg, set, self.thbar1, self.convention),
            other => Err(IstError::Inadmissible(format!("no norming constants are available for case {other:?}"))),
        }
        .map_err(CliError::from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = RunConfig::from_json(r#"{"case": 4, "q0": 0.5}"#).unwrap();
        assert_eq!(c.window, 60);
        assert_eq!(c.n_range, (-30, 30));
        assert_eq!(c.convention, NormingConvention::Reduced);
        assert_eq!(c.t_grid.times(), vec![0.0]);
    }

    #[test]
    fn theta_alias_and_unknown_keys() {
        let c = RunConfig::from_json(r#"{"case": 1, "q0": 0.5, "theta": 1.5}"#).unwrap();
        assert_eq!(c.theta_minus, 1.5);
        assert!(matches!(RunConfig::from_json(r#"{"case": 1, "q0": 0.5, "bogus": 1}"#), Err(CliError::Config(_))));
        assert!(matches!(
            RunConfig::from_json(r#"{"case": 1, "q0": 0.5, "tolerances": {"residual": 1, "extra": 2}}"#),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn invalid_values_rejected() {
        for text in [
            r#"{"case": 5, "q0": 0.5}"#,
            r#"{"case": 1, "q0": 1.5}"#,
            r#"{"case": 1, "q0": 0.5, "window": 1}"#,
            r#"{"case": 1, "q0": 0.5, "n_range": [3, -3]}"#,
            r#"{"case": 1, "q0": 0.5, "t_grid": {"t0": 0, "t1": 1, "steps": 0}}"#,
        ] {
            assert!(matches!(RunConfig::from_json(text), Err(CliError::Config(_))), "{text}");
        }
    }

    #[test]
    fn round_trip() {
        let text = r#"{"case": 1, "q0": 0.6666666666666666, "theta": 0.1, "eta1": 3.5,
            "t_grid": {"t0": -1, "t1": 1, "steps": 5}, "tolerances": {"residual": 1e-7}}"#;
        let a = RunConfig::from_json(text).unwrap();
        let b = RunConfig::from_json(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.tolerances.scattering, 1e-5);
    }

    #[test]
    fn time_grid() {
        let g = TimeGrid { t0: 0.0, t1: 1.0, steps: 5 };
        assert_eq!(g.times(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
