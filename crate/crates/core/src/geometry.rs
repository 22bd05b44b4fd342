//! Random transmitter deployments.
//!
//! Ambient transmitters are scattered around the harvesting device (placed
//! at the origin) following a homogeneous Poisson point process on a disk:
//! the number of sites is Poisson with mean `density·π·R²` and positions are
//! independent and uniform over the disk. The process is truncated at a
//! configurable `region_radius` (default 100 m): with the `d^-2.7` path loss
//! used by the channel model, sources beyond 100 m contribute a negligible
//! fraction of the received power, so the truncation does not bias results
//! at the studied densities.
//!
//! Each site is reduced to the two quantities the receive array can resolve:
//! distance and bearing. A uniform linear array cannot distinguish front
//! from back, so bearings are folded into [−π/2, π/2] in a way that
//! preserves `sin(bearing)` — the only function of the angle that enters the
//! steering vector.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::{ensure_positive, invalid, Result};

/// A single ambient transmitter as seen from the harvester.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmitterSite {
    /// Distance from the device in meters, in (0, region_radius].
    pub distance: f64,
    /// Angle of arrival relative to array boresight, in [−π/2, π/2].
    pub bearing: f64,
}

/// One realization of the transmitter field.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    /// Sites sorted by ascending distance.
    pub sites: Vec<TransmitterSite>,
    /// Density of the generating process in transmitters per m².
    pub density: f64,
    /// Radius of the generation disk in meters.
    pub region_radius: f64,
}

impl Deployment {
    /// Number of realized transmitter sites.
    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    /// True when no transmitter was realized.
    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

/// Folds an angle onto the front half-plane of the array.
///
/// Returns the unique angle in [−π/2, π/2] with the same sine, so the
/// steering vector of the folded bearing equals that of the original one.
fn fold_bearing(angle: f64) -> f64 {
    angle.sin().asin()
}

/// Draws one Poisson deployment on the disk of radius `region_radius`.
///
/// The site count is Poisson with mean `density·π·region_radius²`; radii
/// follow the uniform-on-disk law `P(d ≤ x) = (x/R)²` and bearings are
/// uniform before folding. Sites are returned sorted by ascending distance
/// so that downstream iteration order is reproducible.
pub fn draw_deployment<R: Rng + ?Sized>(
    density: f64,
    region_radius: f64,
    rng: &mut R,
) -> Result<Deployment> {
    if !density.is_finite() || density < 0.0 {
        return Err(invalid(
            "density",
            format!("must be finite and >= 0, got {density}"),
        ));
    }
    ensure_positive("region_radius", region_radius)?;

    let mean = density * PI * region_radius * region_radius;
    let count = if mean > 0.0 {
        let law = Poisson::new(mean).expect("mean is finite and positive");
        law.sample(rng) as usize
    } else {
        0
    };

    let mut sites = Vec::with_capacity(count);
    for _ in 0..count {
        // 1 - U maps the [0, 1) output onto (0, 1], keeping distances > 0.
        let u = 1.0 - rng.random::<f64>();
        let distance = region_radius * u.sqrt();
        let angle = rng.random_range(-PI..PI);
        sites.push(TransmitterSite {
            distance,
            bearing: fold_bearing(angle),
        });
    }
    sites.sort_by(|a, b| a.distance.total_cmp(&b.distance));

    Ok(Deployment {
        sites,
        density,
        region_radius,
    })
}
