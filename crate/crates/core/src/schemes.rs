//! The five combining schemes and their energy ledgers.
//!
//! Every scheme receives one channel realization and the simulation
//! parameters, explores some number `N` of candidate phase configurations
//! (measuring each for `Δt` seconds on the energy meter), adopts the best
//! candidate for the remaining `T − N·Δt` seconds, and accounts for what
//! the exploration cost:
//!
//! * absolute energy `E_abs = Σ_n P(θ⁽ⁿ⁾)·Δt + P(θ*)·(T − N·Δt)`,
//! * static shifter consumption `E_phase = (M−1)·B·P0·T` (plus a switching
//!   term for sequential testing),
//! * metering consumption `E_meter = N·Δt·P_meter`,
//! * net energy `E_net = E_abs − E_phase − E_meter`.
//!
//! A scheme whose exploration budget does not fit the interval
//! (`N·Δt > T`) is *infeasible*: it reports its measurement count and an
//! empty ledger. The genie-aided and rigid benchmarks never explore, never
//! pay, and use lossless branches.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelMatrix;
use crate::codebook::{ceil_log2, dft_codebook, uniform_grid, PhaseSet, MAX_GRID_BITS};
use crate::combiner::{
    harvested_power_unchecked, insertion_loss_vector, wrap_phase, LossProfile, PhaseConfig,
    Resolution,
};
use crate::{ensure_non_negative, ensure_positive, invalid, Result, SimError};

/// Physical, circuit and protocol constants of one simulation scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    /// Harvesting interval T = t₂ − t₁ in seconds.
    pub duration: f64,
    /// Measurement window as a fraction of T (Δt = dt_fraction·T).
    pub dt_fraction: f64,
    /// Static power of one shifter bit, watts (P0).
    pub shifter_power: f64,
    /// Power drawn by the energy meter while measuring, watts.
    pub meter_power: f64,
    /// Power of one engaged antenna switch during exploration, watts.
    pub switch_power: f64,
    /// Per-bit insertion loss of the phase shifter, linear power gain.
    pub delta0: f64,
    /// Rectifier efficiency η in (0, 1].
    pub eta: f64,
    /// Transmit power of every ambient source, watts.
    pub tx_power: f64,
    /// Number of receive antennas M.
    pub antennas: usize,
    /// Phase shifter resolution B in bits.
    pub bits: u32,
}

impl Default for SimParams {
    /// Reference scenario: T = 1 s, Δt = 0.5%·T, P0 = 10 nW,
    /// P_meter = 80 nW, P_switch = P0, δ0 = −0.5 dB, η = 0.5, p = 0.1 W,
    /// M = 4, B = 2.
    fn default() -> Self {
        SimParams {
            duration: 1.0,
            dt_fraction: 0.005,
            shifter_power: 1.0e-8,
            meter_power: 8.0e-8,
            switch_power: 1.0e-8,
            delta0: 10f64.powf(-0.05),
            eta: 0.5,
            tx_power: 0.1,
            antennas: 4,
            bits: 2,
        }
    }
}

impl SimParams {
    /// Measurement window Δt in seconds.
    pub fn dt(&self) -> f64 {
        self.dt_fraction * self.duration
    }

    /// Validates every field range.
    pub fn validate(&self) -> Result<()> {
        ensure_positive("duration", self.duration)?;
        if !(self.dt_fraction > 0.0 && self.dt_fraction < 1.0) {
            return Err(invalid(
                "dt_fraction",
                format!("must be in (0, 1), got {}", self.dt_fraction),
            ));
        }
        ensure_non_negative("shifter_power", self.shifter_power)?;
        ensure_non_negative("meter_power", self.meter_power)?;
        ensure_non_negative("switch_power", self.switch_power)?;
        if !(self.delta0 > 0.0 && self.delta0 <= 1.0) {
            return Err(invalid(
                "delta0",
                format!("must be in (0, 1], got {}", self.delta0),
            ));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(invalid("eta", format!("must be in (0, 1], got {}", self.eta)));
        }
        ensure_positive("tx_power", self.tx_power)?;
        if self.antennas == 0 {
            return Err(invalid("antennas", "must be >= 1"));
        }
        if self.bits == 0 || self.bits > MAX_GRID_BITS {
            return Err(invalid(
                "bits",
                format!("must be in 1..={MAX_GRID_BITS}, got {}", self.bits),
            ));
        }
        Ok(())
    }
}

/// The available combining schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Brute force: exhaustive search over the whole phase grid.
    BruteForce,
    /// Sequential testing: antennas configured one at a time.
    Sequential,
    /// DFT beam codebook sweep.
    Codebook,
    /// Genie with perfect channel knowledge, quantized to the B-bit grid.
    GenieQuantized,
    /// Genie with perfect channel knowledge and continuous phases.
    GenieContinuous,
    /// Rigid combiner hardwired to [0, π, 0, π, …].
    Rigid,
}

impl Scheme {
    /// Short lowercase token used in CSV output and configuration files.
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::BruteForce => "bf",
            Scheme::Sequential => "st",
            Scheme::Codebook => "cb",
            Scheme::GenieQuantized => "ga",
            Scheme::GenieContinuous => "ga_inf",
            Scheme::Rigid => "rc",
        }
    }

    /// Parses a scheme token (the inverse of [`Scheme::label`]).
    pub fn parse(token: &str) -> Option<Scheme> {
        match token {
            "bf" => Some(Scheme::BruteForce),
            "st" => Some(Scheme::Sequential),
            "cb" => Some(Scheme::Codebook),
            "ga" => Some(Scheme::GenieQuantized),
            "ga_inf" => Some(Scheme::GenieContinuous),
            "rc" => Some(Scheme::Rigid),
            _ => None,
        }
    }

    /// All schemes, in the canonical reporting order.
    pub fn all() -> [Scheme; 6] {
        [
            Scheme::GenieContinuous,
            Scheme::GenieQuantized,
            Scheme::Sequential,
            Scheme::Codebook,
            Scheme::BruteForce,
            Scheme::Rigid,
        ]
    }
}

/// The four energy totals of one scheme run, in joules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyLedger {
    /// Absolute harvested energy over [t₁, t₂].
    pub e_abs: f64,
    /// Static shifter consumption plus (ST only) switching consumption.
    pub e_phase: f64,
    /// Energy-meter consumption during the N measurement windows.
    pub e_meter: f64,
    /// Net harvested energy: `e_abs − e_phase − e_meter`, exactly.
    pub e_net: f64,
}

/// Outcome of one scheme on one channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeResult {
    pub scheme: Scheme,
    /// Charged shifter resolution (`Bits(0)` for the shifterless rigid
    /// combiner); `None` only in aggregated rows where no resolution was
    /// feasible at all.
    pub resolution: Option<Resolution>,
    /// Number of measurement windows N the scheme requires.
    pub measurements: u64,
    /// Energy totals; `None` when the exploration budget is infeasible.
    pub ledger: Option<EnergyLedger>,
    /// Adopted configuration; `None` when infeasible.
    pub final_config: Option<PhaseConfig>,
}

impl SchemeResult {
    /// Whether the scheme fit its exploration into the interval.
    pub fn feasible(&self) -> bool {
        self.ledger.is_some()
    }
}

/// Relative slack on the feasibility boundary `N·Δt ≤ T`, so that budgets
/// which are exactly equal to T in exact arithmetic (e.g. 200 × 0.005·T)
/// are not rejected for a one-ulp rounding excess.
const FEASIBILITY_SLACK: f64 = 1e-12;

fn budget_fits(n_windows: f64, dt: f64, duration: f64) -> bool {
    n_windows * dt <= duration * (1.0 + FEASIBILITY_SLACK)
}

fn check_dims(h: &ChannelMatrix, params: &SimParams) -> Result<()> {
    if h.num_antennas() != params.antennas {
        return Err(SimError::DimensionMismatch {
            what: "channel antennas",
            expected: params.antennas,
            found: h.num_antennas(),
        });
    }
    Ok(())
}

/// Static shifter consumption over the interval: `(M−1)·B·P0·T`.
fn e_phase_static(params: &SimParams, bits: u32) -> f64 {
    (params.antennas as f64 - 1.0) * bits as f64 * params.shifter_power * params.duration
}

fn infeasible_result(scheme: Scheme, bits: u32, measurements: u64) -> SchemeResult {
    SchemeResult {
        scheme,
        resolution: Some(Resolution::Bits(bits)),
        measurements,
        ledger: None,
        final_config: None,
    }
}

/// Fills an [`EnergyLedger`] from the measured interval powers, the power
/// of the adopted configuration and the shifter consumption.
///
/// `E_abs = Σ_n powers[n]·Δt + final_power·(T − N·Δt)` and
/// `E_meter = N·Δt·P_meter`; the net energy is the exact difference
/// `E_abs − e_phase − E_meter`. Fails when `N·Δt` exceeds the interval.
pub fn exploration_ledger(
    powers: &[f64],
    final_power: f64,
    params: &SimParams,
    e_phase: f64,
) -> Result<EnergyLedger> {
    ensure_non_negative("e_phase", e_phase)?;
    if !final_power.is_finite() || final_power < 0.0 {
        return Err(invalid("final_power", "must be finite and >= 0"));
    }
    let dt = params.dt();
    let n = powers.len() as f64;
    if !budget_fits(n, dt, params.duration) {
        return Err(invalid(
            "powers",
            format!("{} measurement windows do not fit the interval", powers.len()),
        ));
    }
    let mut explored = 0.0;
    for &p in powers {
        if !p.is_finite() || p < 0.0 {
            return Err(invalid("powers", "measured powers must be finite and >= 0"));
        }
        explored += p * dt;
    }
    let remainder = (params.duration - n * dt).max(0.0);
    let e_abs = explored + final_power * remainder;
    let e_meter = n * dt * params.meter_power;
    let e_net = e_abs - e_phase - e_meter;
    Ok(EnergyLedger {
        e_abs,
        e_phase,
        e_meter,
        e_net,
    })
}

/// Visits every grid configuration of the M−1 non-reference antennas in
/// lexicographic order (antenna 1 is the most significant digit, the last
/// antenna cycles fastest). `config` must arrive fully connected with all
/// phases zero; it is restored to the visited state on each call.
fn for_each_grid_config(
    grid: &PhaseSet,
    config: &mut PhaseConfig,
    mut visit: impl FnMut(&PhaseConfig),
) {
    let m = config.num_antennas();
    let mut digits = vec![0usize; m - 1];
    loop {
        for (k, &d) in digits.iter().enumerate() {
            config.phases[k + 1] = grid.values()[d];
        }
        visit(config);

        // Odometer increment, least significant digit last.
        let mut k = digits.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < grid.len() {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// Brute force: measures every one of the `|Θ|^(M−1)` grid configurations
/// for Δt, then adopts the best. Optimal on the grid, but the exploration
/// budget explodes with M and B.
pub fn run_brute_force(h: &ChannelMatrix, params: &SimParams) -> Result<SchemeResult> {
    params.validate()?;
    check_dims(h, params)?;
    let m = params.antennas;
    let grid_size = 1u64 << params.bits;
    let n_exact = grid_size.checked_pow(m as u32 - 1);
    let n_windows = (grid_size as f64).powi(m as i32 - 1);
    if !budget_fits(n_windows, params.dt(), params.duration) {
        return Ok(infeasible_result(
            Scheme::BruteForce,
            params.bits,
            n_exact.unwrap_or(u64::MAX),
        ));
    }
    let n = n_exact.expect("feasible measurement counts fit in u64");

    let grid = uniform_grid(params.bits)?;
    let loss = insertion_loss_vector(m, params.bits, params.delta0, false)?;
    let mut powers = Vec::with_capacity(n as usize);
    let mut best_power = f64::NEG_INFINITY;
    let mut best_phases = vec![0.0; m];
    let mut probe = PhaseConfig::zeros(m, Resolution::Bits(params.bits));
    for_each_grid_config(&grid, &mut probe, |config| {
        let power = harvested_power_unchecked(h, config, &loss, params.eta);
        powers.push(power);
        if power > best_power {
            best_power = power;
            best_phases.copy_from_slice(&config.phases);
        }
    });

    let final_config = PhaseConfig::new(best_phases, Resolution::Bits(params.bits))?;
    let ledger = exploration_ledger(&powers, best_power, params, e_phase_static(params, params.bits))?;
    Ok(SchemeResult {
        scheme: Scheme::BruteForce,
        resolution: Some(Resolution::Bits(params.bits)),
        measurements: n,
        ledger: Some(ledger),
        final_config: Some(final_config),
    })
}

/// Sequential testing: antennas join the combiner one at a time; each new
/// antenna tries all `|Θ|` phases while the already-configured ones keep
/// theirs, the rest stay disconnected. `N = (M−1)·|Θ|` measurements, plus
/// a switching-energy surcharge for the connect/disconnect hardware.
pub fn run_sequential(h: &ChannelMatrix, params: &SimParams) -> Result<SchemeResult> {
    params.validate()?;
    check_dims(h, params)?;
    let m = params.antennas;
    let grid_size = 1u64 << params.bits;
    let n = (m as u64 - 1) * grid_size;
    if !budget_fits(n as f64, params.dt(), params.duration) {
        return Ok(infeasible_result(Scheme::Sequential, params.bits, n));
    }

    let grid = uniform_grid(params.bits)?;
    let loss = insertion_loss_vector(m, params.bits, params.delta0, false)?;
    let mut powers = Vec::with_capacity(n as usize);
    let mut config = PhaseConfig::with_connection(
        vec![0.0; m],
        std::iter::once(true).chain(std::iter::repeat(false)).take(m).collect(),
        Resolution::Bits(params.bits),
    )?;
    for j in 1..m {
        config.connected[j] = true;
        let mut stage_best = f64::NEG_INFINITY;
        let mut stage_phase = 0.0;
        for &theta in grid.values() {
            config.phases[j] = theta;
            let power = harvested_power_unchecked(h, &config, &loss, params.eta);
            powers.push(power);
            if power > stage_best {
                stage_best = power;
                stage_phase = theta;
            }
        }
        config.phases[j] = stage_phase;
    }

    let final_power = harvested_power_unchecked(h, &config, &loss, params.eta);
    let switching = (m * (m - 1) / 2) as f64 * params.dt() * grid_size as f64 * params.switch_power;
    let e_phase = e_phase_static(params, params.bits) + switching;
    let ledger = exploration_ledger(&powers, final_power, params, e_phase)?;
    Ok(SchemeResult {
        scheme: Scheme::Sequential,
        resolution: Some(Resolution::Bits(params.bits)),
        measurements: n,
        ledger: Some(ledger),
        final_config: Some(config),
    })
}

/// Codebook: sweeps the M DFT beams in index order and adopts the best.
/// Charged at `B = ⌈log₂ M⌉` bits of shifter hardware.
pub fn run_codebook(h: &ChannelMatrix, params: &SimParams) -> Result<SchemeResult> {
    params.validate()?;
    check_dims(h, params)?;
    let m = params.antennas;
    let n = m as u64;
    let bits_used = ceil_log2(m);
    if !budget_fits(n as f64, params.dt(), params.duration) {
        return Ok(infeasible_result(Scheme::Codebook, bits_used, n));
    }

    let loss = if bits_used == 0 {
        LossProfile::ideal(m)
    } else {
        insertion_loss_vector(m, bits_used, params.delta0, false)?
    };
    let codebook = dft_codebook(m)?;
    let mut powers = Vec::with_capacity(m);
    let mut best_power = f64::NEG_INFINITY;
    let mut best_index = 0;
    for (index, codeword) in codebook.iter().enumerate() {
        let power = harvested_power_unchecked(h, codeword, &loss, params.eta);
        powers.push(power);
        if power > best_power {
            best_power = power;
            best_index = index;
        }
    }

    let ledger = exploration_ledger(&powers, best_power, params, e_phase_static(params, bits_used))?;
    Ok(SchemeResult {
        scheme: Scheme::Codebook,
        resolution: Some(Resolution::Bits(bits_used)),
        measurements: n,
        ledger: Some(ledger),
        final_config: Some(codebook[best_index].clone()),
    })
}

/// Seed of the internal generator behind the genie's random restarts;
/// fixed so that `run_genie` is a pure function of its arguments.
const GENIE_RESTART_SEED: u64 = 0x9e3779b97f4a7c15;

/// Exhaustive-search cap for the quantized genie; beyond this many grid
/// configurations it falls back to grid-restricted coordinate ascent.
const GENIE_EXHAUSTIVE_CAP: f64 = 1e6;

/// Genie-aided benchmark: adopts the best configuration at zero cost, with
/// perfect channel knowledge and lossless branches (pass `lossy = true` to
/// charge insertion losses to a quantized genie; the continuous genie is
/// always lossless, since an infinite-bit loss would be degenerate).
///
/// Quantized resolution searches the full grid exhaustively up to 10⁶
/// configurations and uses grid-restricted cyclic coordinate ascent with 8
/// random restarts beyond that. Continuous resolution runs cyclic
/// coordinate ascent with the closed-form per-antenna update
/// `θ_j ← −arg(Σ_i c_{i,j}* · H[i,j])` (where `c_{i,j}` is source i's
/// combined signal over all other antennas), iterated to a relative power
/// change below 10⁻¹⁰, best of 8 restarts.
pub fn run_genie(
    h: &ChannelMatrix,
    params: &SimParams,
    resolution: Resolution,
    lossy: bool,
) -> Result<SchemeResult> {
    params.validate()?;
    check_dims(h, params)?;
    let m = params.antennas;
    let loss = match (lossy, resolution) {
        (true, Resolution::Bits(b)) if b >= 1 => insertion_loss_vector(m, b, params.delta0, false)?,
        _ => LossProfile::ideal(m),
    };

    let final_config = match resolution {
        Resolution::Bits(b) => {
            if b == 0 || b > MAX_GRID_BITS {
                return Err(invalid("resolution", format!("genie grid needs 1..={MAX_GRID_BITS} bits")));
            }
            let grid = uniform_grid(b)?;
            let configs = (grid.len() as f64).powi(m as i32 - 1);
            if configs <= GENIE_EXHAUSTIVE_CAP {
                genie_grid_exhaustive(h, &grid, &loss, params.eta, b)
            } else {
                genie_grid_ascent(h, &grid, &loss, params.eta, b)
            }
        }
        Resolution::Continuous => genie_continuous(h, &loss, params.eta),
    };

    let final_power = harvested_power_unchecked(h, &final_config, &loss, params.eta);
    let ledger = exploration_ledger(&[], final_power, params, 0.0)?;
    let scheme = match resolution {
        Resolution::Bits(_) => Scheme::GenieQuantized,
        Resolution::Continuous => Scheme::GenieContinuous,
    };
    Ok(SchemeResult {
        scheme,
        resolution: Some(resolution),
        measurements: 0,
        ledger: Some(ledger),
        final_config: Some(final_config),
    })
}

fn genie_grid_exhaustive(
    h: &ChannelMatrix,
    grid: &PhaseSet,
    loss: &LossProfile,
    eta: f64,
    bits: u32,
) -> PhaseConfig {
    let m = h.num_antennas();
    let mut best_power = f64::NEG_INFINITY;
    let mut best_phases = vec![0.0; m];
    let mut probe = PhaseConfig::zeros(m, Resolution::Bits(bits));
    for_each_grid_config(grid, &mut probe, |config| {
        let power = harvested_power_unchecked(h, config, loss, eta);
        if power > best_power {
            best_power = power;
            best_phases.copy_from_slice(&config.phases);
        }
    });
    PhaseConfig {
        phases: best_phases,
        connected: vec![true; m],
        resolution: Resolution::Bits(bits),
    }
}

/// Running per-source combined sums for fast coordinate updates.
struct CombinedState {
    weights: Vec<Complex64>,
    combined: Vec<Complex64>,
}

impl CombinedState {
    fn new(h: &ChannelMatrix, deltas: &[f64], phases: &[f64]) -> Self {
        let m = h.num_antennas();
        let weights: Vec<Complex64> = (0..m)
            .map(|j| deltas[j].sqrt() * Complex64::cis(phases[j]))
            .collect();
        let combined = (0..h.num_sources())
            .map(|i| {
                let row = h.row(i);
                (0..m).map(|j| weights[j] * row[j]).sum()
            })
            .collect();
        CombinedState { weights, combined }
    }

    fn power(&self, eta: f64, m: usize) -> f64 {
        eta * self.combined.iter().map(|z| z.norm_sqr()).sum::<f64>() / m as f64
    }

    /// Removes antenna `j`'s contribution from every per-source sum.
    fn detach(&mut self, h: &ChannelMatrix, j: usize) {
        for (i, z) in self.combined.iter_mut().enumerate() {
            *z -= self.weights[j] * h.row(i)[j];
        }
    }

    /// Reattaches antenna `j` with a new weight.
    fn attach(&mut self, h: &ChannelMatrix, j: usize, weight: Complex64) {
        self.weights[j] = weight;
        for (i, z) in self.combined.iter_mut().enumerate() {
            *z += weight * h.row(i)[j];
        }
    }
}

fn genie_continuous(h: &ChannelMatrix, loss: &LossProfile, eta: f64) -> PhaseConfig {
    let m = h.num_antennas();
    let mut rng = ChaCha8Rng::seed_from_u64(GENIE_RESTART_SEED);
    let mut best_power = f64::NEG_INFINITY;
    let mut best_phases = vec![0.0; m];

    for restart in 0..8 {
        let mut phases = vec![0.0; m];
        if restart > 0 {
            for phase in phases.iter_mut().skip(1) {
                *phase = rng.random_range(0.0..std::f64::consts::TAU);
            }
        }
        let mut state = CombinedState::new(h, loss.delta(), &phases);
        let mut power = state.power(eta, m);
        for _sweep in 0..10_000 {
            // `j` indexes phases, the loss profile, and the channel column in
            // lockstep; a plain range keeps that coupling obvious.
            #[allow(clippy::needless_range_loop)]
            for j in 1..m {
                state.detach(h, j);
                let gradient: Complex64 = state
                    .combined
                    .iter()
                    .enumerate()
                    .map(|(i, z)| z.conj() * h.row(i)[j])
                    .sum();
                if gradient.norm_sqr() > 0.0 {
                    phases[j] = wrap_phase(-gradient.arg());
                }
                let weight = loss.delta()[j].sqrt() * Complex64::cis(phases[j]);
                state.attach(h, j, weight);
            }
            let new_power = state.power(eta, m);
            let gain = new_power - power;
            power = new_power;
            if gain <= 1e-10 * power.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        if power > best_power {
            best_power = power;
            best_phases = phases;
        }
    }

    PhaseConfig {
        phases: best_phases,
        connected: vec![true; m],
        resolution: Resolution::Continuous,
    }
}

fn genie_grid_ascent(
    h: &ChannelMatrix,
    grid: &PhaseSet,
    loss: &LossProfile,
    eta: f64,
    bits: u32,
) -> PhaseConfig {
    let m = h.num_antennas();
    let mut rng = ChaCha8Rng::seed_from_u64(GENIE_RESTART_SEED);
    let mut best_power = f64::NEG_INFINITY;
    let mut best_phases = vec![0.0; m];

    for _restart in 0..8 {
        let mut phases = vec![0.0; m];
        for phase in phases.iter_mut().skip(1) {
            *phase = grid.values()[rng.random_range(0..grid.len())];
        }
        let mut state = CombinedState::new(h, loss.delta(), &phases);
        for _sweep in 0..200 {
            let mut changed = false;
            #[allow(clippy::needless_range_loop)]
            for j in 1..m {
                state.detach(h, j);
                let amp = loss.delta()[j].sqrt();
                let mut local_best = f64::NEG_INFINITY;
                let mut local_phase = phases[j];
                for &theta in grid.values() {
                    let weight = amp * Complex64::cis(theta);
                    let trial: f64 = state
                        .combined
                        .iter()
                        .enumerate()
                        .map(|(i, z)| (z + weight * h.row(i)[j]).norm_sqr())
                        .sum();
                    if trial > local_best {
                        local_best = trial;
                        local_phase = theta;
                    }
                }
                if local_phase != phases[j] {
                    changed = true;
                    phases[j] = local_phase;
                }
                state.attach(h, j, amp * Complex64::cis(phases[j]));
            }
            if !changed {
                break;
            }
        }
        let power = state.power(eta, m);
        if power > best_power {
            best_power = power;
            best_phases = phases.clone();
        }
    }

    PhaseConfig {
        phases: best_phases,
        connected: vec![true; m],
        resolution: Resolution::Bits(bits),
    }
}

/// Rigid benchmark: hardwired phases [0, π, 0, π, …], fully passive —
/// lossless, zero measurements, zero consumption.
pub fn run_rigid(h: &ChannelMatrix, params: &SimParams) -> Result<SchemeResult> {
    params.validate()?;
    check_dims(h, params)?;
    let m = params.antennas;
    let phases = (0..m)
        .map(|j| if j % 2 == 0 { 0.0 } else { std::f64::consts::PI })
        .collect();
    let config = PhaseConfig {
        phases,
        connected: vec![true; m],
        resolution: Resolution::Bits(0),
    };
    let power = harvested_power_unchecked(h, &config, &LossProfile::ideal(m), params.eta);
    let ledger = exploration_ledger(&[], power, params, 0.0)?;
    Ok(SchemeResult {
        scheme: Scheme::Rigid,
        resolution: Some(Resolution::Bits(0)),
        measurements: 0,
        ledger: Some(ledger),
        final_config: Some(config),
    })
}

/// Dispatches a scheme by tag. `ga_lossy` selects whether the quantized
/// genie is charged insertion losses.
pub fn run_scheme(
    scheme: Scheme,
    h: &ChannelMatrix,
    params: &SimParams,
    ga_lossy: bool,
) -> Result<SchemeResult> {
    match scheme {
        Scheme::BruteForce => run_brute_force(h, params),
        Scheme::Sequential => run_sequential(h, params),
        Scheme::Codebook => run_codebook(h, params),
        Scheme::GenieQuantized => run_genie(h, params, Resolution::Bits(params.bits), ga_lossy),
        Scheme::GenieContinuous => run_genie(h, params, Resolution::Continuous, false),
        Scheme::Rigid => run_rigid(h, params),
    }
}
