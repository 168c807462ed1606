//! Discrete Choquet integral.
//!
//! For an instance `h` and measure `g`, sort the sources by descending
//! confidence (ties broken by ascending source index) and let `A_k` be the
//! set of the top `k` sources. Then
//!
//! ```text
//! C_g(h) = Σ_k (h_(k) − h_(k+1)) · g(A_k),   h_(S+1) = 0
//! ```
//!
//! The sort order depends only on the instance, so [`SortedChain`] caches it
//! and a dataset can be integrated against many measures cheaply.

use thiserror::Error;

use crate::measure::{BinaryFuzzyMeasure, FuzzyMeasure};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChoquetError {
    #[error("instance has {found} confidences but the measure covers {expected} sources")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("confidence {value} for source {source_index} lies outside [0, 1]")]
    OutOfRange { source_index: usize, value: f64 },
}

/// Rejects instances of the wrong length or with values outside `[0, 1]`.
/// Values are never clamped.
pub fn check_instance(h: &[f64], source_count: usize) -> Result<(), ChoquetError> {
    if h.len() != source_count {
        return Err(ChoquetError::DimensionMismatch {
            expected: source_count,
            found: h.len(),
        });
    }
    match h.iter().position(|v| !(0.0..=1.0).contains(v)) {
        Some(source_index) => Err(ChoquetError::OutOfRange {
            source_index,
            value: h[source_index],
        }),
        None => Ok(()),
    }
}

/// An instance in descending order together with the nested coalition masks
/// `A_1 ⊂ A_2 ⊂ … ⊂ A_S`.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedChain {
    sorted: Vec<f64>,
    chain: Vec<u32>,
}

impl SortedChain {
    /// Callers are expected to have run [`check_instance`].
    pub fn new(h: &[f64]) -> Self {
        let mut order: Vec<usize> = (0..h.len()).collect();
        // Stable sort keeps ascending index order among equal confidences.
        order.sort_by(|&a, &b| h[b].total_cmp(&h[a]));
        let mut mask = 0u32;
        let chain = order
            .iter()
            .map(|&i| {
                mask |= 1 << i;
                mask
            })
            .collect();
        let sorted = order.iter().map(|&i| h[i]).collect();
        Self { sorted, chain }
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn chain(&self) -> &[u32] {
        &self.chain
    }

    #[inline]
    pub fn integrate<M: FuzzyMeasure + ?Sized>(&self, g: &M) -> f64 {
        g.integrate_chain(&self.sorted, &self.chain)
    }
}

/// Choquet integral of `h` with respect to `g`. The result lies in
/// `[min(h), max(h)]` for any valid measure.
pub fn choquet_integral<M: FuzzyMeasure + ?Sized>(h: &[f64], g: &M) -> Result<f64, ChoquetError> {
    check_instance(h, g.source_count())?;
    Ok(SortedChain::new(h).integrate(g))
}

/// Max over winning coalitions of the min confidence inside the coalition.
/// For binary measures this equals the Choquet integral; it scans all 2^S
/// subsets and shares no code with [`choquet_integral`].
pub fn choquet_maxmin(h: &[f64], g: &BinaryFuzzyMeasure) -> Result<f64, ChoquetError> {
    let s = g.source_count();
    check_instance(h, s)?;
    let mut best = 0.0f64;
    for mask in 1usize..1 << s {
        if !g.get(mask) {
            continue;
        }
        let inner = (0..s)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| h[i])
            .fold(f64::INFINITY, f64::min);
        best = best.max(inner);
    }
    Ok(best)
}
