//! Flat key=value run configuration.
//!
//! The format is deliberately dumb: one `key = value` pair per line, `#`
//! comments, blank lines ignored, every key optional (defaults reproduce
//! the reference scenario), unknown or repeated keys rejected with the
//! line number. dB-valued inputs (`delta0_db`, the Rician endpoints) are
//! converted to linear quantities only at the simulation boundary, so the
//! stored configuration round-trips exactly through [`emit_config`] /
//! [`parse_config`].

use std::fmt;
use std::path::Path;

use crate::channel::RicianLaw;
use crate::montecarlo::{SweepSpec, TrialSetup};
use crate::schemes::{Scheme, SimParams};

/// Configuration-loading failure.
#[derive(Debug)]
pub enum ConfigError {
    /// The file could not be read.
    Io(std::io::Error),
    /// The contents are malformed or out of range; `line` is 1-based and
    /// 0 for whole-file (cross-key) violations.
    Parse { line: usize, message: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(e) => write!(f, "config read failed: {e}"),
            ConfigError::Parse { line: 0, message } => write!(f, "config: {message}"),
            ConfigError::Parse { line, message } => write!(f, "config line {line}: {message}"),
        }
    }
}

impl std::error::Error for ConfigError {}

fn parse_err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Parse {
        line,
        message: message.into(),
    }
}

/// Every tunable of the simulator, as written in the file (dB stays dB).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Harvesting interval T in seconds.
    pub duration_s: f64,
    /// Measurement window as a fraction of T.
    pub dt_fraction: f64,
    /// Static shifter power per bit, watts.
    pub shifter_power_w: f64,
    /// Meter power during measurements, watts.
    pub meter_power_w: f64,
    /// Per-switch power during sequential testing, watts.
    pub switch_power_w: f64,
    /// Per-bit insertion loss in dB (≤ 0).
    pub delta0_db: f64,
    /// Rectifier efficiency in (0, 1].
    pub eta: f64,
    /// Transmit power of each source, watts.
    pub tx_power_w: f64,
    /// Antenna count M.
    pub antennas: usize,
    /// Shifter resolution B in bits.
    pub bits: u32,
    /// Transmitter density λ in m⁻² (fixed value for `single` and the
    /// antenna sweep).
    pub density_per_m2: f64,
    /// Deployment disk radius, meters.
    pub region_radius_m: f64,
    /// Rician factor at 1 m, dB.
    pub kappa_1m_db: f64,
    /// Rician factor at 10 m, dB.
    pub kappa_10m_db: f64,
    /// Charge insertion losses to the quantized genie.
    pub ga_lossy: bool,
    /// Trials per sweep point.
    pub trials: usize,
    /// Ensemble master seed.
    pub master_seed: u64,
    /// Schemes to run, in reporting order.
    pub schemes: Vec<Scheme>,
    /// Candidate resolutions for the antenna sweep's B selection.
    pub b_candidates: Vec<u32>,
    /// Density sweep grid: log-spaced from `lambda_min` to `lambda_max`.
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_points: usize,
    /// Antenna sweep range (inclusive).
    pub antennas_min: usize,
    pub antennas_max: usize,
    /// Output path; empty means "stdout only" for `single` and the default
    /// file name for the sweeps.
    pub out: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            duration_s: 1.0,
            dt_fraction: 0.005,
            shifter_power_w: 1.0e-8,
            meter_power_w: 8.0e-8,
            switch_power_w: 1.0e-8,
            delta0_db: -0.5,
            eta: 0.5,
            tx_power_w: 0.1,
            antennas: 4,
            bits: 2,
            density_per_m2: 1.5848931924611134e-3,
            region_radius_m: 100.0,
            kappa_1m_db: 14.0,
            kappa_10m_db: -4.0,
            ga_lossy: false,
            trials: 2000,
            master_seed: 1,
            schemes: Scheme::all().to_vec(),
            b_candidates: vec![1, 2, 3, 4],
            lambda_min: 1.0e-5,
            lambda_max: 1.0e-2,
            lambda_points: 13,
            antennas_min: 2,
            antennas_max: 8,
            out: String::new(),
        }
    }
}

impl RunConfig {
    /// Simulation parameters with dB quantities converted to linear.
    pub fn sim_params(&self) -> SimParams {
        SimParams {
            duration: self.duration_s,
            dt_fraction: self.dt_fraction,
            shifter_power: self.shifter_power_w,
            meter_power: self.meter_power_w,
            switch_power: self.switch_power_w,
            delta0: 10f64.powf(self.delta0_db / 10.0),
            eta: self.eta,
            tx_power: self.tx_power_w,
            antennas: self.antennas,
            bits: self.bits,
        }
    }

    /// Scenario for trials at the configured fixed density.
    pub fn trial_setup(&self) -> TrialSetup {
        TrialSetup {
            params: self.sim_params(),
            density: self.density_per_m2,
            region_radius: self.region_radius_m,
            rician: RicianLaw::from_endpoints_db(self.kappa_1m_db, self.kappa_10m_db),
            ga_lossy: self.ga_lossy,
        }
    }

    /// Ensemble specification shared by both sweeps.
    pub fn sweep_spec(&self) -> SweepSpec {
        SweepSpec {
            setup: self.trial_setup(),
            schemes: self.schemes.clone(),
            b_candidates: self.b_candidates.clone(),
            trials: self.trials,
            master_seed: self.master_seed,
        }
    }

    /// Log-spaced density grid from `lambda_min` to `lambda_max` with
    /// `lambda_points` points; both endpoints are hit exactly.
    pub fn lambda_grid(&self) -> Vec<f64> {
        if self.lambda_points == 1 {
            return vec![self.lambda_min];
        }
        let lo = self.lambda_min.log10();
        let hi = self.lambda_max.log10();
        let steps = (self.lambda_points - 1) as f64;
        (0..self.lambda_points)
            .map(|i| {
                if i == 0 {
                    self.lambda_min
                } else if i == self.lambda_points - 1 {
                    self.lambda_max
                } else {
                    10f64.powf(lo + (hi - lo) * i as f64 / steps)
                }
            })
            .collect()
    }

    /// Antenna counts of the antenna sweep.
    pub fn antenna_values(&self) -> Vec<usize> {
        (self.antennas_min..=self.antennas_max).collect()
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let whole = |message: String| parse_err(0, message);
        self.sim_params()
            .validate()
            .map_err(|e| whole(e.to_string()))?;
        if !self.density_per_m2.is_finite() || self.density_per_m2 < 0.0 {
            return Err(whole("density_per_m2 must be >= 0".into()));
        }
        if !self.region_radius_m.is_finite() || self.region_radius_m <= 0.0 {
            return Err(whole("region_radius_m must be > 0".into()));
        }
        if !self.kappa_1m_db.is_finite() || !self.kappa_10m_db.is_finite() {
            return Err(whole("Rician endpoints must be finite dB values".into()));
        }
        if self.trials == 0 {
            return Err(whole("trials must be >= 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(whole("schemes must name at least one scheme".into()));
        }
        if self.b_candidates.is_empty() || self.b_candidates.iter().any(|&b| b == 0 || b > 20) {
            return Err(whole("b_candidates must be bit counts in 1..=20".into()));
        }
        if !(self.lambda_min > 0.0 && self.lambda_max >= self.lambda_min) {
            return Err(whole("need 0 < lambda_min <= lambda_max".into()));
        }
        if self.lambda_points == 0 {
            return Err(whole("lambda_points must be >= 1".into()));
        }
        if self.antennas_min == 0 || self.antennas_max < self.antennas_min {
            return Err(whole("need 1 <= antennas_min <= antennas_max".into()));
        }
        Ok(())
    }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| parse_err(line, format!("{key}: `{value}` is not a finite number")))
}

fn parse_int<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse::<T>()
        .map_err(|_| parse_err(line, format!("{key}: `{value}` is not a valid integer")))
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(parse_err(line, format!("{key}: expected `true` or `false`, got `{value}`"))),
    }
}

fn parse_schemes(line: usize, value: &str) -> Result<Vec<Scheme>, ConfigError> {
    value
        .split(',')
        .map(str::trim)
        .map(|token| {
            Scheme::parse(token).ok_or_else(|| {
                parse_err(
                    line,
                    format!("schemes: unknown scheme `{token}` (expected bf, st, cb, ga, ga_inf, rc)"),
                )
            })
        })
        .collect()
}

fn parse_bits_list(line: usize, value: &str) -> Result<Vec<u32>, ConfigError> {
    value
        .split(',')
        .map(str::trim)
        .map(|token| parse_int::<u32>(line, "b_candidates", token))
        .collect()
}

/// Parses configuration text; omitted keys keep their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut config = RunConfig::default();
    let mut seen: Vec<&str> = Vec::new();

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected `key = value`, got `{content}`")))?;
        let key = key.trim();
        let value = value.trim();
        if seen.contains(&key) {
            return Err(parse_err(line, format!("duplicate key `{key}`")));
        }

        match key {
            "duration_s" => config.duration_s = parse_f64(line, key, value)?,
            "dt_fraction" => {
                let v = parse_f64(line, key, value)?;
                if !(v > 0.0 && v < 1.0) {
                    return Err(parse_err(line, format!("dt_fraction must be in (0, 1), got {v}")));
                }
                config.dt_fraction = v;
            }
            "shifter_power_w" => config.shifter_power_w = parse_f64(line, key, value)?,
            "meter_power_w" => config.meter_power_w = parse_f64(line, key, value)?,
            "switch_power_w" => config.switch_power_w = parse_f64(line, key, value)?,
            "delta0_db" => {
                let v = parse_f64(line, key, value)?;
                if v > 0.0 {
                    return Err(parse_err(line, format!("delta0_db is a loss, must be <= 0 dB, got {v}")));
                }
                config.delta0_db = v;
            }
            "eta" => {
                let v = parse_f64(line, key, value)?;
                if !(v > 0.0 && v <= 1.0) {
                    return Err(parse_err(line, format!("eta must be in (0, 1], got {v}")));
                }
                config.eta = v;
            }
            "tx_power_w" => config.tx_power_w = parse_f64(line, key, value)?,
            "antennas" => config.antennas = parse_int(line, key, value)?,
            "bits" => config.bits = parse_int(line, key, value)?,
            "density_per_m2" => config.density_per_m2 = parse_f64(line, key, value)?,
            "region_radius_m" => config.region_radius_m = parse_f64(line, key, value)?,
            "kappa_1m_db" => config.kappa_1m_db = parse_f64(line, key, value)?,
            "kappa_10m_db" => config.kappa_10m_db = parse_f64(line, key, value)?,
            "ga_lossy" => config.ga_lossy = parse_bool(line, key, value)?,
            "trials" => config.trials = parse_int(line, key, value)?,
            "master_seed" => config.master_seed = parse_int(line, key, value)?,
            "schemes" => config.schemes = parse_schemes(line, value)?,
            "b_candidates" => config.b_candidates = parse_bits_list(line, value)?,
            "lambda_min" => config.lambda_min = parse_f64(line, key, value)?,
            "lambda_max" => config.lambda_max = parse_f64(line, key, value)?,
            "lambda_points" => config.lambda_points = parse_int(line, key, value)?,
            "antennas_min" => config.antennas_min = parse_int(line, key, value)?,
            "antennas_max" => config.antennas_max = parse_int(line, key, value)?,
            "out" => config.out = value.to_string(),
            _ => return Err(parse_err(line, format!("unknown key `{key}`"))),
        }
        seen.push(key);
    }

    config.validate()?;
    Ok(config)
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(ConfigError::Io)?;
    parse_config(&text)
}

/// Emits a configuration as text that parses back to the same value.
pub fn emit_config(config: &RunConfig) -> String {
    let schemes = config
        .schemes
        .iter()
        .map(|s| s.label())
        .collect::<Vec<_>>()
        .join(",");
    let b_candidates = config
        .b_candidates
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(",");
    format!(
        "# rfharvest run configuration\n\
         duration_s = {}\n\
         dt_fraction = {}\n\
         shifter_power_w = {}\n\
         meter_power_w = {}\n\
         switch_power_w = {}\n\
         delta0_db = {}\n\
         eta = {}\n\
         tx_power_w = {}\n\
         antennas = {}\n\
         bits = {}\n\
         density_per_m2 = {}\n\
         region_radius_m = {}\n\
         kappa_1m_db = {}\n\
         kappa_10m_db = {}\n\
         ga_lossy = {}\n\
         trials = {}\n\
         master_seed = {}\n\
         schemes = {}\n\
         b_candidates = {}\n\
         lambda_min = {}\n\
         lambda_max = {}\n\
         lambda_points = {}\n\
         antennas_min = {}\n\
         antennas_max = {}\n\
         out = {}\n",
        config.duration_s,
        config.dt_fraction,
        config.shifter_power_w,
        config.meter_power_w,
        config.switch_power_w,
        config.delta0_db,
        config.eta,
        config.tx_power_w,
        config.antennas,
        config.bits,
        config.density_per_m2,
        config.region_radius_m,
        config.kappa_1m_db,
        config.kappa_10m_db,
        config.ga_lossy,
        config.trials,
        config.master_seed,
        schemes,
        b_candidates,
        config.lambda_min,
        config.lambda_max,
        config.lambda_points,
        config.antennas_min,
        config.antennas_max,
        config.out,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_reference_defaults() {
        let config = parse_config("").unwrap();
        assert_eq!(config, RunConfig::default());
        let params = config.sim_params();
        assert_eq!(params.duration, 1.0);
        assert_eq!(params.dt_fraction, 0.005);
        assert_eq!(params.shifter_power, 1.0e-8);
        assert_eq!(params.meter_power, 8.0e-8);
        assert_eq!(params.eta, 0.5);
        assert_eq!(params.tx_power, 0.1);
        assert!((params.delta0 - 0.8912509381337456).abs() < 1e-15);
    }

    #[test]
    fn comments_blank_lines_and_overrides() {
        let text = "# scenario\n\n  antennas = 6 \nbits=3\nschemes = st, rc\nout = custom.csv\n";
        let config = parse_config(text).unwrap();
        assert_eq!(config.antennas, 6);
        assert_eq!(config.bits, 3);
        assert_eq!(config.schemes, vec![Scheme::Sequential, Scheme::Rigid]);
        assert_eq!(config.out, "custom.csv");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_config("antennas = 4\nwat = 1\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, .. }), "{err}");
        let err = parse_config("dt_fraction = 1.5\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, .. }), "{err}");
        let err = parse_config("\n\neta = nope\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 3, .. }), "{err}");
        let err = parse_config("bits = 2\nbits = 3\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, .. }), "{err}");
        let err = parse_config("just some words\n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, .. }), "{err}");
        let err = parse_config("schemes = st, xx\n").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("xx"), "{text}");
    }

    #[test]
    fn cross_key_violations_are_caught() {
        assert!(parse_config("lambda_min = 1e-2\nlambda_max = 1e-5\n").is_err());
        assert!(parse_config("antennas_min = 5\nantennas_max = 2\n").is_err());
        assert!(parse_config("trials = 0\n").is_err());
        assert!(parse_config("b_candidates = 1,0\n").is_err());
    }

    #[test]
    fn config_round_trips_exactly() {
        let mut config = RunConfig::default();
        let text = emit_config(&config);
        assert_eq!(parse_config(&text).unwrap(), config);

        config.density_per_m2 = 3.2e-4;
        config.delta0_db = -0.75;
        config.schemes = vec![Scheme::BruteForce, Scheme::GenieContinuous];
        config.b_candidates = vec![2, 4];
        config.master_seed = u64::MAX;
        config.out = "x/y.csv".into();
        let text = emit_config(&config);
        assert_eq!(parse_config(&text).unwrap(), config);
    }

    #[test]
    fn db_conversion_happens_at_the_boundary() {
        let config = parse_config("delta0_db = -0.5\nkappa_1m_db = 14\nkappa_10m_db = -4\n").unwrap();
        let params = config.sim_params();
        assert!((params.delta0 - 10f64.powf(-0.05)).abs() < 1e-15);
        let setup = config.trial_setup();
        assert!((setup.rician.factor(1.0) - 25.118864315095795).abs() < 1e-12);
        assert!((setup.rician.factor(10.0) - 0.3981071705534972).abs() < 1e-15);
    }

    #[test]
    fn lambda_grid_is_log_spaced_with_exact_endpoints() {
        let config = parse_config("lambda_min = 1e-5\nlambda_max = 1e-2\nlambda_points = 4\n").unwrap();
        let grid = config.lambda_grid();
        assert_eq!(grid.len(), 4);
        assert_eq!(grid[0], 1e-5);
        assert_eq!(grid[3], 1e-2);
        assert!((grid[1] - 1e-4).abs() / 1e-4 < 1e-12);
        assert!((grid[2] - 1e-3).abs() / 1e-3 < 1e-12);

        let single = parse_config("lambda_points = 1\n").unwrap();
        assert_eq!(single.lambda_grid(), vec![1e-5]);
    }

    #[test]
    fn antenna_values_are_inclusive() {
        let config = parse_config("antennas_min = 2\nantennas_max = 5\n").unwrap();
        assert_eq!(config.antenna_values(), vec![2, 3, 4, 5]);
    }
}
