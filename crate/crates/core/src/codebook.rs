//! Phase sets, DFT beam codebooks and the switched-stage decomposition of
//! a B-bit phase shifter.
//!
//! A B-bit shifter realizes the uniform grid `Θ = {2π·n/2^B}` by cascading
//! B binary stages; stage k contributes either 0 or `2π·2^(k−1)/2^B`, so
//! the subset sums of the stage phases enumerate the grid exactly. The DFT
//! codebook instead fixes whole beams: codeword m applies phase
//! `2π·(j−1)·m/M` at antenna j, which needs only `⌈log₂ M⌉` bits' worth of
//! hardware and M measurements to sweep all spatial directions.

use std::f64::consts::TAU;

use crate::combiner::{PhaseConfig, Resolution};
use crate::{invalid, Result};

/// Largest bit count for which grids are materialized; 2^20 phases is far
/// beyond any feasible exploration budget already.
pub const MAX_GRID_BITS: u32 = 20;

/// An ordered set of realizable phase shifts in [0, 2π).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSet {
    values: Vec<f64>,
}

impl PhaseSet {
    fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("phase set", "values must be finite"));
        }
        for pair in values.windows(2) {
            if pair[0] >= pair[1] {
                return Err(invalid("phase set", "values must be strictly increasing"));
            }
        }
        if let (Some(first), Some(last)) = (values.first(), values.last()) {
            if *first < 0.0 || *last >= TAU {
                return Err(invalid("phase set", "values must lie in [0, 2π)"));
            }
        }
        Ok(PhaseSet { values })
    }

    /// The phases, ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Cardinality |Θ|.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// True for the empty set (never produced by the constructors here).
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The 2^B-point uniform grid `{2π·n/2^B : n = 0, …, 2^B−1}`.
pub fn uniform_grid(bits: u32) -> Result<PhaseSet> {
    if bits == 0 {
        return Err(invalid("bits", "grid needs at least one bit"));
    }
    if bits > MAX_GRID_BITS {
        return Err(invalid(
            "bits",
            format!("grids above {MAX_GRID_BITS} bits are not materialized"),
        ));
    }
    let size = 1usize << bits;
    let values = (0..size).map(|n| TAU * n as f64 / size as f64).collect();
    PhaseSet::new(values)
}

/// Number of shifter bits needed to address M beams: `⌈log₂ M⌉`.
pub fn ceil_log2(m: usize) -> u32 {
    if m <= 1 {
        0
    } else {
        usize::BITS - (m - 1).leading_zeros()
    }
}

/// The M DFT beam codewords for an M-antenna array.
///
/// Codeword m (m = 0, …, M−1) applies phase `2π·(j−1)·m/M` at antenna j;
/// the reference antenna always sits at phase 0 (the DFT matrix row it
/// would need is the all-ones one). Codewords are stored exactly and
/// tagged with the charged resolution `⌈log₂ M⌉`: for non-power-of-two M
/// the phases do not all fall on a binary grid and are not re-quantized.
pub fn dft_codebook(num_antennas: usize) -> Result<Vec<PhaseConfig>> {
    if num_antennas == 0 {
        return Err(invalid("num_antennas", "must be >= 1"));
    }
    let m = num_antennas;
    let resolution = Resolution::Bits(ceil_log2(m));
    (0..m)
        .map(|codeword| {
            let phases = (0..m)
                .map(|j| TAU * ((j * codeword) % m) as f64 / m as f64)
                .collect();
            PhaseConfig::new(phases, resolution)
        })
        .collect()
}

/// The B switched stages of a binary phase shifter sized for M beams.
#[derive(Debug, Clone, PartialEq)]
pub struct StageDecomposition {
    /// Per-stage phase pair (bit off, bit on); stage k turns on
    /// `2π·2^(k−1)/2^B`.
    pub stages: Vec<(f64, f64)>,
}

impl StageDecomposition {
    /// Number of stages B.
    pub fn num_stages(&self) -> usize {
        self.stages.len()
    }

    /// All 2^B sums of one phase per stage, ascending.
    pub fn realizable_phases(&self) -> Vec<f64> {
        let b = self.stages.len();
        let mut sums = Vec::with_capacity(1 << b);
        for selector in 0u64..(1 << b) {
            let mut total = 0.0;
            for (k, stage) in self.stages.iter().enumerate() {
                total += if selector >> k & 1 == 1 { stage.1 } else { stage.0 };
            }
            sums.push(total);
        }
        sums.sort_by(f64::total_cmp);
        sums
    }
}

/// Binary-weighted stage decomposition with `B = ⌈log₂ M⌉` stages.
///
/// The subset sums of the stage phases realize exactly the 2^B-point
/// uniform grid, which covers the M DFT codeword phases whenever M is a
/// power of two (and a uniformly finer set otherwise).
pub fn binary_stage_decomposition(num_antennas: usize) -> Result<StageDecomposition> {
    if num_antennas < 2 {
        return Err(invalid("num_antennas", "stage decomposition needs M >= 2"));
    }
    let bits = ceil_log2(num_antennas);
    let size = 1u64 << bits;
    let stages = (0..bits)
        .map(|k| (0.0, TAU * (1u64 << k) as f64 / size as f64))
        .collect();
    Ok(StageDecomposition { stages })
}
