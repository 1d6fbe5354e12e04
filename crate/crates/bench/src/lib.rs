//! Shared fixtures for the criterion benches.

use std::f64::consts::PI;

use ist_core::ist::{self, NormingConvention};
use ist_core::{CaseConfig, CaseId, EigenSet, NormingData, PotentialWindow};

/// The case-I second-order soliton at q0 = 2/3, η₁ = π + π/7, κ₁ = 1.
pub fn case1_soliton() -> (CaseConfig, EigenSet, NormingData) {
    let c = CaseConfig::new(CaseId::I, 2.0 / 3.0, 0.0).expect("valid case");
    let s = ist::eigenvalues_case1(&c, PI + PI / 7.0).expect("admissible");
    let nd = ist::norming_case1(&c, &s, 1.0, 0.0, 0.0, NormingConvention::Reduced).expect("norming");
    (c, s, nd)
}

pub fn case1_window(n_half: usize) -> PotentialWindow {
    let (c, s, nd) = case1_soliton();
    PotentialWindow::from_fn(c, 0.0, n_half, |n| ist::reconstruct(&c, &s, &nd, n, 0.0).expect("regular"))
        .expect("window")
}
