//! The RF combining circuit: phase configurations, insertion losses and the
//! harvested DC power they produce.
//!
//! Antenna 0 is the *reference* branch: it carries no phase shifter, so its
//! phase is pinned to zero and it never suffers shifter insertion loss. All
//! other branches pass through a B-bit switched phase shifter whose per-bit
//! insertion loss `δ0` compounds to `δ0^B`. The shifted branches feed a
//! passive M-way combiner (fixed 1/√M amplitude factor, regardless of how
//! many branches are actually connected) and then a rectifier with linear
//! efficiency `η`.
//!
//! Harvested power uses expected-power semantics: the transmitted waveforms
//! are zero-mean, unit-power and uncorrelated across transmitters, so the
//! expected rectifier input power is the sum over sources of the squared
//! magnitude of the combined channel — cross-source terms vanish. Measuring
//! windows are assumed long enough for that average to be what the energy
//! meter reports.

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::channel::ChannelMatrix;
use crate::{invalid, Result, SimError};

/// Phase-shifter resolution: a number of bits, or ideal continuous phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Resolution {
    /// B-bit shifter realizing the 2^B-point uniform grid.
    Bits(u32),
    /// Unquantized phases (genie benchmark only).
    Continuous,
}

impl Resolution {
    /// The bit count, or `None` for continuous resolution.
    pub fn bits(&self) -> Option<u32> {
        match self {
            Resolution::Bits(b) => Some(*b),
            Resolution::Continuous => None,
        }
    }
}

/// A combiner setting: per-antenna phases, which branches are connected,
/// and the shifter resolution being charged for it.
///
/// `resolution` records the hardware resolution the configuration is billed
/// at (insertion loss and static power), not a grid-membership promise:
/// DFT codewords for non-power-of-two array sizes are stored exactly even
/// though they fall off the binary grid of the charged bit count.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig {
    /// Per-antenna phases in [0, 2π); entry 0 is always 0 (reference).
    pub phases: Vec<f64>,
    /// Which branches are switched into the combiner; entry 0 always true.
    pub connected: Vec<bool>,
    /// Charged shifter resolution.
    pub resolution: Resolution,
}

impl PhaseConfig {
    /// Builds a fully-connected configuration after validating the phases.
    pub fn new(phases: Vec<f64>, resolution: Resolution) -> Result<Self> {
        let connected = vec![true; phases.len()];
        PhaseConfig::with_connection(phases, connected, resolution)
    }

    /// Builds a configuration with an explicit connection mask.
    pub fn with_connection(
        phases: Vec<f64>,
        connected: Vec<bool>,
        resolution: Resolution,
    ) -> Result<Self> {
        if phases.is_empty() {
            return Err(invalid("phases", "need at least the reference antenna"));
        }
        if phases.len() != connected.len() {
            return Err(SimError::DimensionMismatch {
                what: "connection mask",
                expected: phases.len(),
                found: connected.len(),
            });
        }
        if phases[0] != 0.0 {
            return Err(invalid("phases", "reference antenna phase must be 0"));
        }
        if !connected[0] {
            return Err(invalid("connected", "reference antenna is hardwired"));
        }
        for &phase in &phases {
            if !phase.is_finite() || !(0.0..TAU).contains(&phase) {
                return Err(invalid("phases", format!("phase {phase} outside [0, 2π)")));
            }
        }
        Ok(PhaseConfig {
            phases,
            connected,
            resolution,
        })
    }

    /// All-zero phases, fully connected.
    pub fn zeros(num_antennas: usize, resolution: Resolution) -> Self {
        PhaseConfig {
            phases: vec![0.0; num_antennas],
            connected: vec![true; num_antennas],
            resolution,
        }
    }

    /// Number of antenna branches.
    pub fn num_antennas(&self) -> usize {
        self.phases.len()
    }
}

/// Wraps an arbitrary finite angle into [0, 2π), guarding the boundary
/// case where rounding in `rem_euclid` lands exactly on 2π.
pub fn wrap_phase(angle: f64) -> f64 {
    let wrapped = angle.rem_euclid(TAU);
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Per-branch amplitude gains of the combining network, in (0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct LossProfile {
    delta: Vec<f64>,
}

impl LossProfile {
    /// Lossless branches (genie and rigid benchmarks).
    pub fn ideal(num_antennas: usize) -> Self {
        LossProfile {
            delta: vec![1.0; num_antennas],
        }
    }

    /// Power gain of each branch.
    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    /// Number of branches.
    pub fn num_antennas(&self) -> usize {
        self.delta.len()
    }
}

/// Branch gains of a B-bit shifter bank: `[1, δ0^B, …, δ0^B]`, or all-ones
/// when `ideal` is set. The reference branch has no shifter and no loss.
pub fn insertion_loss_vector(
    num_antennas: usize,
    bits: u32,
    delta0: f64,
    ideal: bool,
) -> Result<LossProfile> {
    if num_antennas == 0 {
        return Err(invalid("num_antennas", "must be >= 1"));
    }
    if !(delta0 > 0.0 && delta0 <= 1.0) {
        return Err(invalid("delta0", format!("must be in (0, 1], got {delta0}")));
    }
    if bits == 0 && !ideal {
        return Err(invalid("bits", "shifter needs at least one bit"));
    }
    let mut delta = vec![1.0; num_antennas];
    if !ideal {
        let per_branch = delta0.powi(bits as i32);
        for d in delta.iter_mut().skip(1) {
            *d = per_branch;
        }
    }
    Ok(LossProfile { delta })
}

/// Expected DC power at the rectifier output, in watts.
///
/// Evaluates `(η/M) · Σ_i |Σ_{j connected} √δ_j · e^{iθ_j} · H[i,j]|²`.
/// The 1/M combiner normalization is a property of the passive M-way
/// hardware and is *not* rescaled when branches are disconnected.
pub fn harvested_power(
    h: &ChannelMatrix,
    config: &PhaseConfig,
    loss: &LossProfile,
    eta: f64,
) -> Result<f64> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid("eta", format!("must be in (0, 1], got {eta}")));
    }
    let m = h.num_antennas();
    if config.num_antennas() != m {
        return Err(SimError::DimensionMismatch {
            what: "phase configuration",
            expected: m,
            found: config.num_antennas(),
        });
    }
    if loss.num_antennas() != m {
        return Err(SimError::DimensionMismatch {
            what: "loss profile",
            expected: m,
            found: loss.num_antennas(),
        });
    }
    Ok(harvested_power_unchecked(h, config, loss, eta))
}

/// [`harvested_power`] without the per-call validation; used inside the
/// scheme loops after dimensions have been checked once.
pub(crate) fn harvested_power_unchecked(
    h: &ChannelMatrix,
    config: &PhaseConfig,
    loss: &LossProfile,
    eta: f64,
) -> f64 {
    let m = h.num_antennas();
    let weights: Vec<Complex64> = (0..m)
        .map(|j| {
            if config.connected[j] {
                loss.delta()[j].sqrt() * Complex64::cis(config.phases[j])
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    combined_power(h, &weights, eta)
}

/// Expected DC power for precomputed complex branch weights.
pub(crate) fn combined_power(h: &ChannelMatrix, weights: &[Complex64], eta: f64) -> f64 {
    let m = h.num_antennas();
    let mut total = 0.0;
    for i in 0..h.num_sources() {
        let row = h.row(i);
        let mut combined = Complex64::new(0.0, 0.0);
        for j in 0..m {
            combined += weights[j] * row[j];
        }
        total += combined.norm_sqr();
    }
    eta * total / m as f64
}

/// Rectangular energy integration: `power × duration` joules.
pub fn energy_over(power: f64, duration: f64) -> Result<f64> {
    if !duration.is_finite() || duration < 0.0 {
        return Err(invalid("duration", format!("must be >= 0, got {duration}")));
    }
    Ok(power * duration)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn matrix(rows: &[Vec<Complex64>], m: usize) -> ChannelMatrix {
        ChannelMatrix::from_rows(m, rows).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, s: usize, m: usize) -> ChannelMatrix {
        let rows: Vec<Vec<Complex64>> = (0..s)
            .map(|_| {
                (0..m)
                    .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect()
            })
            .collect();
        matrix(&rows, m)
    }

    #[test]
    fn insertion_loss_reference_values() {
        let delta0 = 10f64.powf(-0.05); // −0.5 dB per bit
        let profile = insertion_loss_vector(4, 2, delta0, false).unwrap();
        assert_eq!(profile.delta()[0], 1.0);
        for j in 1..4 {
            assert!((profile.delta()[j] - 0.7943282347242815).abs() < 1e-15);
        }
        let ideal = insertion_loss_vector(4, 2, delta0, true).unwrap();
        assert_eq!(ideal.delta(), &[1.0; 4]);
        assert_eq!(insertion_loss_vector(1, 3, delta0, false).unwrap().delta(), &[1.0]);

        assert!(insertion_loss_vector(4, 2, 1.5, false).is_err());
        assert!(insertion_loss_vector(4, 2, 0.0, false).is_err());
        assert!(insertion_loss_vector(4, 0, delta0, false).is_err());
    }

    #[test]
    fn harvested_power_hand_examples() {
        let eta = 0.5;
        let h = matrix(&[vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]], 2);
        let lossless = LossProfile::ideal(2);

        let destructive = PhaseConfig::new(vec![0.0, PI], Resolution::Bits(1)).unwrap();
        let p = harvested_power(&h, &destructive, &lossless, eta).unwrap();
        assert!(p.abs() < 1e-30, "perfect cancellation, got {p}");

        let aligned = PhaseConfig::new(vec![0.0, 0.0], Resolution::Bits(1)).unwrap();
        let p = harvested_power(&h, &aligned, &lossless, eta).unwrap();
        assert!((p - 1.0).abs() < 1e-15, "0.5·(1/2)·|2|² = 1, got {p}");

        let empty = ChannelMatrix::empty(2);
        assert_eq!(harvested_power(&empty, &aligned, &lossless, eta).unwrap(), 0.0);
    }

    #[test]
    fn global_phase_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let h = random_matrix(&mut rng, 4, 3);
            let loss = insertion_loss_vector(3, 2, 0.9, false).unwrap();
            let phases = vec![0.0, rng.random_range(0.0..TAU), rng.random_range(0.0..TAU)];
            let base = PhaseConfig::new(phases.clone(), Resolution::Continuous).unwrap();
            let p0 = harvested_power(&h, &base, &loss, 0.5).unwrap();

            // A common offset on all connected branches is a rotation of the
            // combined sum: measured power cannot change. The reference
            // constraint forces the offset through wrap_phase bookkeeping,
            // so compare against a direct weighted evaluation instead.
            let offset = rng.random_range(0.0..TAU);
            let weights: Vec<Complex64> = phases
                .iter()
                .zip(loss.delta())
                .map(|(&ph, &d)| d.sqrt() * Complex64::cis(ph + offset))
                .collect();
            let p1 = combined_power(&h, &weights, 0.5);
            assert!((p0 - p1).abs() <= 1e-12 * p0.max(1e-300));
        }
    }

    #[test]
    fn upper_bound_and_single_source_attainment() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let m = rng.random_range(1..=5);
            let s = rng.random_range(1..=4);
            let h = random_matrix(&mut rng, s, m);
            let loss = insertion_loss_vector(m, 1, 0.891, false).unwrap();
            let mut phases = vec![0.0];
            for _ in 1..m {
                phases.push(rng.random_range(0.0..TAU));
            }
            let config = PhaseConfig::new(phases, Resolution::Continuous).unwrap();
            let p = harvested_power(&h, &config, &loss, 0.5).unwrap();

            let mut bound = 0.0;
            for i in 0..s {
                let row_sum: f64 = h
                    .row(i)
                    .iter()
                    .zip(loss.delta())
                    .map(|(hij, d)| d.sqrt() * hij.norm())
                    .sum();
                bound += row_sum * row_sum;
            }
            bound *= 0.5 / m as f64;
            assert!(p <= bound * (1.0 + 1e-12));

            // Single source: aligning every branch to cancel the channel
            // phases attains the bound.
            if s == 1 {
                let aligned: Vec<f64> = h
                    .row(0)
                    .iter()
                    .enumerate()
                    .map(|(j, hij)| if j == 0 { 0.0 } else { wrap_phase(h.row(0)[0].arg() - hij.arg()) })
                    .collect();
                let config = PhaseConfig::new(aligned, Resolution::Continuous).unwrap();
                let best = harvested_power(&h, &config, &loss, 0.5).unwrap();
                assert!((best - bound).abs() <= 1e-9 * bound.max(1e-300));
            }
        }
    }

    #[test]
    fn loss_scaling_on_aligned_single_source() {
        // With one source and phase-aligned branches the combined amplitude
        // is Σ √δ_j |h_j|, strictly increasing in each δ_j: more insertion
        // loss can only hurt once phases are chosen to add constructively.
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let m = rng.random_range(2..=5);
            let h = random_matrix(&mut rng, 1, m);
            let aligned: Vec<f64> = h
                .row(0)
                .iter()
                .enumerate()
                .map(|(j, hij)| if j == 0 { 0.0 } else { wrap_phase(h.row(0)[0].arg() - hij.arg()) })
                .collect();
            let config = PhaseConfig::new(aligned, Resolution::Continuous).unwrap();
            let lossy = insertion_loss_vector(m, 3, 0.891, false).unwrap();
            let lighter = insertion_loss_vector(m, 1, 0.891, false).unwrap();
            let ideal = LossProfile::ideal(m);
            let p_lossy = harvested_power(&h, &config, &lossy, 0.5).unwrap();
            let p_lighter = harvested_power(&h, &config, &lighter, 0.5).unwrap();
            let p_ideal = harvested_power(&h, &config, &ideal, 0.5).unwrap();
            assert!(p_lossy <= p_lighter * (1.0 + 1e-12));
            assert!(p_lighter <= p_ideal * (1.0 + 1e-12));
        }
    }

    #[test]
    fn disconnection_reduces_to_reference_branch() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_matrix(&mut rng, 5, 4);
        let config = PhaseConfig::with_connection(
            vec![0.0, 1.0, 2.0, 3.0],
            vec![true, false, false, false],
            Resolution::Continuous,
        )
        .unwrap();
        let p = harvested_power(&h, &config, &LossProfile::ideal(4), 0.5).unwrap();
        let expected: f64 =
            0.5 / 4.0 * (0..5).map(|i| h.row(i)[0].norm_sqr()).sum::<f64>();
        assert!((p - expected).abs() < 1e-15 * expected.max(1.0));
    }

    #[test]
    fn config_validation_rules() {
        assert!(PhaseConfig::new(vec![], Resolution::Bits(1)).is_err());
        assert!(PhaseConfig::new(vec![0.1, 0.0], Resolution::Bits(1)).is_err());
        assert!(PhaseConfig::new(vec![0.0, TAU], Resolution::Bits(1)).is_err());
        assert!(PhaseConfig::new(vec![0.0, -0.1], Resolution::Bits(1)).is_err());
        assert!(PhaseConfig::with_connection(
            vec![0.0, 0.5],
            vec![false, true],
            Resolution::Bits(1)
        )
        .is_err());
        assert!(PhaseConfig::with_connection(vec![0.0], vec![true, true], Resolution::Bits(1)).is_err());

        let h = ChannelMatrix::from_rows(
            3,
            &[vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ]],
        )
        .unwrap();
        let config = PhaseConfig::zeros(2, Resolution::Bits(1));
        assert!(harvested_power(&h, &config, &LossProfile::ideal(3), 0.5).is_err());
        let config = PhaseConfig::zeros(3, Resolution::Bits(1));
        assert!(harvested_power(&h, &config, &LossProfile::ideal(2), 0.5).is_err());
        assert!(harvested_power(&h, &config, &LossProfile::ideal(3), 0.0).is_err());
    }

    #[test]
    fn wrap_phase_stays_in_range() {
        assert_eq!(wrap_phase(0.0), 0.0);
        assert_eq!(wrap_phase(TAU), 0.0);
        assert!((wrap_phase(-0.5) - (TAU - 0.5)).abs() < 1e-15);
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        // A negative angle within one ulp of zero must not round up to 2π.
        let tiny = -1e-18;
        let w = wrap_phase(tiny);
        assert!((0.0..TAU).contains(&w));
    }

    #[test]
    fn energy_over_is_rectangular() {
        assert_eq!(energy_over(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(energy_over(2.0, 0.5).unwrap(), 1.0);
        let p = 3.7e-8;
        let whole = energy_over(p, 0.9).unwrap();
        let split = energy_over(p, 0.4).unwrap() + energy_over(p, 0.5).unwrap();
        assert!((whole - split).abs() < 1e-22);
        assert!(energy_over(1.0, -0.1).is_err());
    }
}
