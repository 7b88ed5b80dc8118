//! Cut entropy, negativity, and the closed-form marginal spectra of
//! W-class states.

use serde::Serialize;

use crate::catalog::WClassParams;
use crate::error::{Error, Result};
use crate::register::{
    partial_transpose, schmidt_spectrum, trace_norm, Bipartition, DensityMatrix, StateVector,
};

/// Values in `(−NEGATIVITY_CLAMP, 0)` are reported as zero.
pub const NEGATIVITY_CLAMP: f64 = 1e-12;

/// Shannon entropy in bits of the `{1/3, 2/3}` distribution: the entropy of
/// the W state across any single-qubit cut.
pub fn w_threshold_bits() -> f64 {
    binary_entropy(1.0 / 3.0)
}

/// Shannon entropy in bits, with `0·log 0 = 0`.
pub fn shannon_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

pub fn binary_entropy(p: f64) -> f64 {
    shannon_bits(&[p, 1.0 - p])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutEntropyResult {
    pub cut: Bipartition,
    pub entropy_bits: f64,
}

pub fn cut_entropy(state: &StateVector, cut: &Bipartition) -> Result<CutEntropyResult> {
    let spectrum = schmidt_spectrum(state, cut)?;
    Ok(CutEntropyResult {
        cut: cut.clone(),
        entropy_bits: shannon_bits(&spectrum),
    })
}

/// `‖ρ^{T_B}‖₁ − 1`.
pub fn negativity(dm: &DensityMatrix, cut: &Bipartition) -> Result<f64> {
    let value = trace_norm(&partial_transpose(dm, cut)?) - 1.0;
    if value < 0.0 && value > -NEGATIVITY_CLAMP {
        Ok(0.0)
    } else {
        Ok(value)
    }
}

/// Negativity of a pure state from its Schmidt coefficients, `(Σ √λ)² − 1`.
pub fn pure_state_negativity(state: &StateVector, cut: &Bipartition) -> Result<f64> {
    let root_sum: f64 = schmidt_spectrum(state, cut)?.iter().map(|l| l.sqrt()).sum();
    Ok((root_sum * root_sum - 1.0).max(0.0))
}

/// Single-qubit cut of a three-qubit register: cut `k` isolates qubit `k`
/// (one-based).
pub fn single_qubit_cut(cut_index: u8) -> Result<Bipartition> {
    if !(1..=3).contains(&cut_index) {
        return Err(Error::BadCut(format!(
            "cut index {cut_index} outside 1..=3"
        )));
    }
    Bipartition::new(3, &[(cut_index - 1) as usize])
}

/// Marginal eigenvalues `(λ−, λ+)` of a W-class state across cut
/// `cut_index`, from `λ± = (1 ± √((1−2x)² + 4xd))/2`.
///
/// Qubit 1 is excited only by the `|100⟩` term, so cut 1 uses `x = c`;
/// likewise cut 2 uses `b` and cut 3 uses `a`.
pub fn wclass_cut_spectrum(params: WClassParams, cut_index: u8) -> Result<(f64, f64)> {
    let x = match cut_index {
        1 => params.c(),
        2 => params.b(),
        3 => params.a(),
        _ => {
            return Err(Error::BadCut(format!(
                "cut index {cut_index} outside 1..=3"
            )))
        }
    };
    let d = params.d();
    let root = ((1.0 - 2.0 * x).powi(2) + 4.0 * x * d).sqrt();
    let minus = ((1.0 - root) / 2.0).max(0.0);
    let plus = ((1.0 + root) / 2.0).min(1.0);
    Ok((minus, plus))
}

/// Entropy in bits across each of the three single-qubit cuts.
pub fn wclass_cut_entropies(params: WClassParams) -> [f64; 3] {
    std::array::from_fn(|k| {
        let (lo, hi) = wclass_cut_spectrum(params, k as u8 + 1).expect("cut index in range");
        shannon_bits(&[lo, hi])
    })
}

/// The cut with least entanglement; ties go to the lowest index.
pub fn wclass_min_cut_entropy(params: WClassParams) -> (u8, f64) {
    let entropies = wclass_cut_entropies(params);
    let mut best = (1u8, entropies[0]);
    for (k, &e) in entropies.iter().enumerate().skip(1) {
        if e < best.1 {
            best = (k as u8 + 1, e);
        }
    }
    best
}
