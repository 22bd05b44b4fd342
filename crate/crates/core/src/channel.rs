//! Propagation model: path loss, Rician fading and the array response.
//!
//! Every transmitter–harvester link is narrowband and quasi-static: one
//! complex channel vector `h ∈ ℂ^M` is drawn per transmitter per trial and
//! held constant over the harvesting interval. The model is the classical
//! uncorrelated Rician one,
//!
//! ```text
//! h = sqrt(p·β(d) / (1 + κ(d))) · ( sqrt(κ(d))·a(α) + w ),
//! ```
//!
//! where `p` is the transmit power, `β(d)` the distance-dependent path
//! gain, `κ(d)` the Rician factor, `a(α)` the steering vector of a
//! half-wavelength uniform linear array toward bearing `α`, and `w` a
//! vector of independent standard circularly-symmetric complex Gaussians.
//! Power is normalized so that `E[|h_j|²] = p·β(d)` at every antenna.
//!
//! Numbers follow the reference scenario: log-distance path loss with
//! exponent 2.7 and a 40 dB fixed loss (distances clamped below 1 m), and a
//! Rician factor decaying linearly in dB from 14 dB at 1 m to −4 dB at
//! 10 m. The dB-linear decay law is a modeling choice pinned only by those
//! two endpoints; see [`RicianLaw`] to substitute different endpoints.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::geometry::{Deployment, TransmitterSite};
use crate::{ensure_positive, invalid, Result, SimError};

/// Log-distance path gain (linear) at `distance` meters.
///
/// Implements `10^-4 · max(distance, 1)^-2.7`: a 40 dB non-distance
/// dependent loss and exponent 2.7, with the close-in region clamped at
/// 1 m so the gain never exceeds the fixed loss.
pub fn pathloss(distance: f64) -> f64 {
    1.0e-4 * distance.max(1.0).powf(-2.7)
}

/// Distance law of the Rician factor, linear in dB.
///
/// `factor(d) = 10^((intercept_db + slope_db_per_m · d) / 10)`. The default
/// law `(16 − 2d)/10` reproduces 14 dB at 1 m and −4 dB at 10 m and
/// extrapolates by the same line elsewhere (always positive, never floored).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianLaw {
    /// dB value of the law at distance 0.
    pub intercept_db: f64,
    /// dB change per meter (negative for decay).
    pub slope_db_per_m: f64,
}

impl Default for RicianLaw {
    fn default() -> Self {
        RicianLaw {
            intercept_db: 16.0,
            slope_db_per_m: -2.0,
        }
    }
}

impl RicianLaw {
    /// Builds the unique dB-linear law through two endpoint measurements,
    /// `kappa_1m_db` at 1 m and `kappa_10m_db` at 10 m.
    pub fn from_endpoints_db(kappa_1m_db: f64, kappa_10m_db: f64) -> Self {
        let slope = (kappa_10m_db - kappa_1m_db) / 9.0;
        RicianLaw {
            intercept_db: kappa_1m_db - slope,
            slope_db_per_m: slope,
        }
    }

    /// Linear Rician factor at `distance` meters.
    pub fn factor(&self, distance: f64) -> f64 {
        10f64.powf((self.intercept_db + self.slope_db_per_m * distance) / 10.0)
    }
}

/// Linear Rician factor under the default distance law.
pub fn rician_factor(distance: f64) -> f64 {
    RicianLaw::default().factor(distance)
}

/// Steering vector of a half-wavelength ULA toward `bearing`.
///
/// Entry `j` (0-based) is `exp(−i·j·π·sin(bearing))`; all entries have unit
/// modulus and the first entry is always 1.
pub fn steering_vector(bearing: f64, num_antennas: usize) -> Vec<Complex64> {
    let step = -PI * bearing.sin();
    (0..num_antennas)
        .map(|j| Complex64::cis(j as f64 * step))
        .collect()
}

/// Per-source channel vectors stacked into an S × M matrix (row-major).
///
/// Entries carry units of √W: `|entry|²` is received power in watts, with
/// transmit power and path loss already folded in.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    entries: Vec<Complex64>,
    num_sources: usize,
    num_antennas: usize,
}

impl ChannelMatrix {
    /// Builds a matrix from explicit rows (mainly for tests and synthetic
    /// scenarios). All rows must have length `num_antennas` and finite
    /// entries.
    pub fn from_rows(num_antennas: usize, rows: &[Vec<Complex64>]) -> Result<Self> {
        if num_antennas == 0 {
            return Err(invalid("num_antennas", "must be >= 1"));
        }
        let mut entries = Vec::with_capacity(rows.len() * num_antennas);
        for row in rows {
            if row.len() != num_antennas {
                return Err(SimError::DimensionMismatch {
                    what: "channel row length",
                    expected: num_antennas,
                    found: row.len(),
                });
            }
            for h in row {
                if !h.re.is_finite() || !h.im.is_finite() {
                    return Err(invalid("channel entry", "must be finite"));
                }
                entries.push(*h);
            }
        }
        Ok(ChannelMatrix {
            entries,
            num_sources: rows.len(),
            num_antennas,
        })
    }

    /// Matrix with no sources (zero rows).
    pub fn empty(num_antennas: usize) -> Self {
        ChannelMatrix {
            entries: Vec::new(),
            num_sources: 0,
            num_antennas,
        }
    }

    /// Number of transmitter rows S.
    pub fn num_sources(&self) -> usize {
        self.num_sources
    }

    /// Number of antenna columns M.
    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    /// Channel of source `i` across the array.
    pub fn row(&self, i: usize) -> &[Complex64] {
        let start = i * self.num_antennas;
        &self.entries[start..start + self.num_antennas]
    }
}

fn site_scales(site: &TransmitterSite, tx_power: f64, law: &RicianLaw) -> (f64, f64) {
    let beta = pathloss(site.distance);
    let kappa = law.factor(site.distance);
    (tx_power * beta, kappa)
}

/// Draws one Rician channel vector for `site` under the given factor law.
pub fn draw_channel_with<R: Rng + ?Sized>(
    site: &TransmitterSite,
    num_antennas: usize,
    tx_power: f64,
    law: &RicianLaw,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    ensure_positive("tx_power", tx_power)?;
    let (mean_power, kappa) = site_scales(site, tx_power, law);
    let scale = (mean_power / (1.0 + kappa)).sqrt();
    let los_gain = kappa.sqrt();
    let steering = steering_vector(site.bearing, num_antennas);
    Ok(steering
        .into_iter()
        .map(|a| {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            let scatter = Complex64::new(x, y) * FRAC_1_SQRT_2;
            scale * (los_gain * a + scatter)
        })
        .collect())
}

/// Draws one Rician channel vector under the default factor law.
pub fn draw_channel<R: Rng + ?Sized>(
    site: &TransmitterSite,
    num_antennas: usize,
    tx_power: f64,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    draw_channel_with(site, num_antennas, tx_power, &RicianLaw::default(), rng)
}

/// Pure line-of-sight channel, the κ → ∞ limit of [`draw_channel`]:
/// exactly `sqrt(p·β)·a(α)`, no scattered component.
pub fn los_channel(site: &TransmitterSite, num_antennas: usize, tx_power: f64) -> Result<Vec<Complex64>> {
    ensure_positive("tx_power", tx_power)?;
    let amp = (tx_power * pathloss(site.distance)).sqrt();
    Ok(steering_vector(site.bearing, num_antennas)
        .into_iter()
        .map(|a| amp * a)
        .collect())
}

/// Stacks one independent [`draw_channel_with`] row per deployment site.
pub fn draw_channel_matrix_with<R: Rng + ?Sized>(
    deployment: &Deployment,
    num_antennas: usize,
    tx_power: f64,
    law: &RicianLaw,
    rng: &mut R,
) -> Result<ChannelMatrix> {
    if num_antennas == 0 {
        return Err(invalid("num_antennas", "must be >= 1"));
    }
    let mut entries = Vec::with_capacity(deployment.num_sites() * num_antennas);
    for site in &deployment.sites {
        entries.extend(draw_channel_with(site, num_antennas, tx_power, law, rng)?);
    }
    Ok(ChannelMatrix {
        entries,
        num_sources: deployment.num_sites(),
        num_antennas,
    })
}

/// Stacks one row per site under the default Rician law.
pub fn draw_channel_matrix<R: Rng + ?Sized>(
    deployment: &Deployment,
    num_antennas: usize,
    tx_power: f64,
    rng: &mut R,
) -> Result<ChannelMatrix> {
    draw_channel_matrix_with(deployment, num_antennas, tx_power, &RicianLaw::default(), rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::draw_deployment;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn site(distance: f64, bearing: f64) -> TransmitterSite {
        TransmitterSite { distance, bearing }
    }

    #[test]
    fn pathloss_matches_reference_points() {
        assert_eq!(pathloss(1.0), 1.0e-4);
        assert_eq!(pathloss(0.5), 1.0e-4); // clamped below 1 m
        assert_eq!(pathloss(0.0), 1.0e-4);
        let expected = 1.9952623149688795e-7; // 10^-4 · 10^-2.7
        assert!((pathloss(10.0) - expected).abs() / expected < 1e-12);
        assert!(pathloss(100.0) < pathloss(10.0));
    }

    #[test]
    fn rician_factor_hits_both_endpoints() {
        let k1 = rician_factor(1.0);
        let k10 = rician_factor(10.0);
        assert!((10.0 * k1.log10() - 14.0).abs() < 1e-12, "κ(1 m) must be 14 dB");
        assert!((10.0 * k10.log10() + 4.0).abs() < 1e-12, "κ(10 m) must be −4 dB");
        assert!((k1 - 25.118864315095795).abs() < 1e-12);
        assert!((k10 - 0.3981071705534972).abs() < 1e-15);
        // 0 dB crossing of the law 16 − 2d sits at 8 m.
        assert!((rician_factor(8.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rician_law_from_endpoints_reproduces_default() {
        let law = RicianLaw::from_endpoints_db(14.0, -4.0);
        assert_eq!(law, RicianLaw::default());
        let steep = RicianLaw::from_endpoints_db(20.0, 2.0);
        assert!((10.0 * steep.factor(1.0).log10() - 20.0).abs() < 1e-12);
        assert!((10.0 * steep.factor(10.0).log10() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn steering_vector_basics() {
        let broadside = steering_vector(0.0, 5);
        for a in &broadside {
            assert_eq!(*a, Complex64::new(1.0, 0.0));
        }
        let endfire = steering_vector(PI / 2.0, 2);
        assert_eq!(endfire[0], Complex64::new(1.0, 0.0));
        assert!((endfire[1].re + 1.0).abs() < 1e-12);
        assert!(endfire[1].im.abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let bearing = rng.random_range(-PI / 2.0..PI / 2.0);
            for a in steering_vector(bearing, 9) {
                assert!((a.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn channel_second_moment_matches_mean_power() {
        // E[|h_j|²] must equal p·β(d); checked via sample mean and its own
        // standard error over 10⁵ draws.
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let p = 0.1;
        for d in [1.0, 5.0, 10.0] {
            let s = site(d, 0.4);
            let expected = p * pathloss(d);
            let n = 100_000usize;
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..n {
                let h = draw_channel(&s, 1, p, &mut rng).unwrap();
                let pow = h[0].norm_sqr();
                sum += pow;
                sum_sq += pow * pow;
            }
            let mean = sum / n as f64;
            let var = (sum_sq / n as f64 - mean * mean).max(0.0);
            let se = (var / n as f64).sqrt();
            assert!(
                (mean - expected).abs() < 3.0 * se,
                "d={d}: mean |h|² = {mean}, expected {expected}, se {se}"
            );
        }
        // At d=1, p=0.1 the level itself is 10⁻⁵ W within 1%.
        let s = site(1.0, 0.0);
        let mut sum = 0.0;
        for _ in 0..100_000 {
            sum += draw_channel(&s, 1, 0.1, &mut rng).unwrap()[0].norm_sqr();
        }
        let mean = sum / 1e5;
        assert!((mean - 1.0e-5).abs() / 1.0e-5 < 0.01);
    }

    #[test]
    fn los_power_fraction_tracks_rician_factor() {
        // |E[h_j]|² / E[|h_j|²] → κ/(1+κ).
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in [1.0, 5.0, 10.0] {
            let s = site(d, -0.7);
            let kappa = rician_factor(d);
            let expected = kappa / (1.0 + kappa);
            let n = 200_000usize;
            let mut mean_vec = Complex64::new(0.0, 0.0);
            let mut mean_pow = 0.0;
            for _ in 0..n {
                let h = draw_channel(&s, 2, 0.1, &mut rng).unwrap();
                mean_vec += h[1];
                mean_pow += h[1].norm_sqr();
            }
            mean_vec /= n as f64;
            mean_pow /= n as f64;
            let frac = mean_vec.norm_sqr() / mean_pow;
            assert!(
                (frac - expected).abs() / expected < 0.02,
                "d={d}: LOS fraction {frac} vs κ/(1+κ) = {expected}"
            );
        }
    }

    #[test]
    fn los_limit_is_scaled_steering_vector() {
        let s = site(3.0, 0.9);
        let h = los_channel(&s, 4, 0.1).unwrap();
        let amp = (0.1 * pathloss(3.0)).sqrt();
        let a = steering_vector(0.9, 4);
        for j in 0..4 {
            assert_eq!(h[j], amp * a[j]);
        }
    }

    #[test]
    fn matrix_stacks_one_row_per_site() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let dep = Deployment {
            sites: vec![site(2.0, 0.1), site(5.0, -0.2), site(9.0, 1.0)],
            density: 1.0e-3,
            region_radius: 100.0,
        };
        let h = draw_channel_matrix(&dep, 4, 0.1, &mut rng).unwrap();
        assert_eq!(h.num_sources(), 3);
        assert_eq!(h.num_antennas(), 4);
        for i in 0..3 {
            assert_eq!(h.row(i).len(), 4);
        }

        let empty = draw_channel_matrix(
            &Deployment {
                sites: vec![],
                density: 0.0,
                region_radius: 100.0,
            },
            4,
            0.1,
            &mut rng,
        )
        .unwrap();
        assert_eq!(empty.num_sources(), 0);
        assert_eq!(empty.num_antennas(), 4);
    }

    #[test]
    fn fixed_seed_gives_identical_matrices() {
        let mut geo = ChaCha8Rng::seed_from_u64(77);
        let dep = draw_deployment(1.0e-3, 100.0, &mut geo).unwrap();
        let a = draw_channel_matrix(&dep, 3, 0.1, &mut ChaCha8Rng::seed_from_u64(78)).unwrap();
        let b = draw_channel_matrix(&dep, 3, 0.1, &mut ChaCha8Rng::seed_from_u64(78)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn from_rows_validates_shape() {
        let rows = vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
            vec![Complex64::new(0.5, 0.5)],
        ];
        assert!(ChannelMatrix::from_rows(2, &rows).is_err());
        assert!(ChannelMatrix::from_rows(0, &[]).is_err());
        let ok = ChannelMatrix::from_rows(2, &rows[..1]).unwrap();
        assert_eq!(ok.num_sources(), 1);
    }
}
