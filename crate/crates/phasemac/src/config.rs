//! Plain-text `key=value` configuration and the merged experiment config.
//!
//! Precedence, lowest to highest: built-in defaults, config file, CLI flags.
//! Energy-model keys pass straight through to `EnergyParams::apply_kv`.

use std::collections::BTreeMap;
use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use phasemac_core::energy::EnergyParams;
use phasemac_core::gro::SaturationMode;
use phasemac_core::pmac::PmacConfig;
use thiserror::Error;

/// Environment variable naming the default data root (MNIST files etc.).
pub const DATA_ROOT_ENV: &str = "PHASEMAC_DATA";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected 'key = value', got '{text}'")]
    BadLine {
        path: PathBuf,
        line: usize,
        text: String,
    },
    #[error("key '{key}': cannot parse '{value}' as {wanted}")]
    BadValue {
        key: String,
        value: String,
        wanted: &'static str,
    },
    #[error("bit width '{0}' must be 'float' or an integer in [2, 8]")]
    BadBits(String),
    #[error("batch size {0} must be >= 1")]
    BadBatch(u32),
    #[error("energy parameter: {0}")]
    Energy(String),
}

/// Ordered key=value map ('#' starts a comment, blank lines skipped).
#[derive(Debug, Clone, Default)]
pub struct KvConfig {
    map: BTreeMap<String, String>,
}

impl KvConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::BadLine {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    text: raw.to_string(),
                });
            };
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { map })
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.map.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| ConfigError::BadValue {
                key: key.to_string(),
                value: v.clone(),
                wanted: "a float",
            }),
        }
    }

    pub fn get_u64(&self, key: &str, default: u64) -> Result<u64, ConfigError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| ConfigError::BadValue {
                key: key.to_string(),
                value: v.clone(),
                wanted: "an integer",
            }),
        }
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        Ok(self.get_u64(key, default as u64)? as usize)
    }

    pub fn get_bool(&self, key: &str, default: bool) -> Result<bool, ConfigError> {
        match self.map.get(key).map(|s| s.as_str()) {
            None => Ok(default),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some("false") | Some("0") | Some("no") => Ok(false),
            Some(v) => Err(ConfigError::BadValue {
                key: key.to_string(),
                value: v.to_string(),
                wanted: "a boolean",
            }),
        }
    }

    /// Comma-separated float list.
    pub fn get_f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        match self.map.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|t| {
                    t.trim().parse().map_err(|_| ConfigError::BadValue {
                        key: key.to_string(),
                        value: t.to_string(),
                        wanted: "a float",
                    })
                })
                .collect(),
        }
    }

    /// Comma-separated usize list.
    pub fn get_usize_list(&self, key: &str, default: &[usize]) -> Result<Vec<usize>, ConfigError> {
        match self.map.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|t| {
                    t.trim().parse().map_err(|_| ConfigError::BadValue {
                        key: key.to_string(),
                        value: t.to_string(),
                        wanted: "an integer",
                    })
                })
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// Inference resolution: a fixed bit width or the float reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitsSpec {
    Float,
    Fixed(u8),
}

impl BitsSpec {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("float") || t == "32" || t.eq_ignore_ascii_case("f32") {
            return Ok(BitsSpec::Float);
        }
        match t.parse::<u8>() {
            Ok(b) if (2..=8).contains(&b) => Ok(BitsSpec::Fixed(b)),
            _ => Err(ConfigError::BadBits(s.to_string())),
        }
    }

    pub fn label(&self) -> String {
        match self {
            BitsSpec::Float => "float".to_string(),
            BitsSpec::Fixed(b) => b.to_string(),
        }
    }
}

/// Everything a command needs, already merged and validated.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub bits: Vec<BitsSpec>,
    pub batches: Vec<u32>,
    pub out_dir: PathBuf,
    pub data_root: PathBuf,
    pub full: bool,
    pub kv: KvConfig,
    pub energy: EnergyParams,
    pub pmac: PmacConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            bits: vec![
                BitsSpec::Fixed(8),
                BitsSpec::Fixed(6),
                BitsSpec::Fixed(4),
                BitsSpec::Fixed(2),
            ],
            batches: vec![1, 2, 4, 8, 16, 32, 64, 128],
            out_dir: PathBuf::from("out"),
            data_root: PathBuf::from("."),
            full: false,
            kv: KvConfig::default(),
            energy: EnergyParams::default(),
            pmac: PmacConfig::default(),
        }
    }
}

/// CLI-side overrides handed to the builder.
#[derive(Debug, Clone, Default)]
pub struct CliOverrides {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub bits: Option<Vec<String>>,
    pub batch: Option<Vec<u32>>,
    pub out: Option<PathBuf>,
    pub full: bool,
}

impl ExperimentConfig {
    pub fn build(cli: &CliOverrides) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        if let Ok(root) = env::var(DATA_ROOT_ENV) {
            cfg.data_root = PathBuf::from(root);
        }
        if let Some(path) = &cli.config {
            cfg.kv = KvConfig::from_file(path)?;
        }

        // File-level keys.
        cfg.seed = cfg.kv.get_u64("seed", cfg.seed)?;
        if let Some(v) = cfg.kv.get("out_dir") {
            cfg.out_dir = PathBuf::from(v);
        }
        if let Some(v) = cfg.kv.get("data_root") {
            cfg.data_root = PathBuf::from(v);
        }
        if let Some(v) = cfg.kv.get("bits") {
            cfg.bits = v
                .split(',')
                .map(BitsSpec::parse)
                .collect::<Result<_, _>>()?;
        }
        if let Some(v) = cfg.kv.get("batches") {
            cfg.batches = v
                .split(',')
                .map(|t| {
                    t.trim().parse::<u32>().map_err(|_| ConfigError::BadValue {
                        key: "batches".to_string(),
                        value: t.to_string(),
                        wanted: "an integer",
                    })
                })
                .collect::<Result<_, _>>()?;
        }
        let counter_bits =
            cfg.kv
                .get_u64("counter_bits", cfg.pmac.counter_bits as u64)? as u32;
        let num_stages = cfg.kv.get_u64("num_stages", cfg.pmac.num_stages as u64)? as u32;
        cfg.pmac = PmacConfig {
            counter_bits,
            num_stages,
            mode: SaturationMode::Strict,
        };
        for (k, v) in cfg.kv.clone().iter() {
            cfg.energy
                .apply_kv(k, v)
                .map_err(|e| ConfigError::Energy(e.to_string()))?;
        }

        // CLI flags win.
        if let Some(seed) = cli.seed {
            cfg.seed = seed;
        }
        if let Some(bits) = &cli.bits {
            cfg.bits = bits
                .iter()
                .map(|s| BitsSpec::parse(s))
                .collect::<Result<_, _>>()?;
        }
        if let Some(batch) = &cli.batch {
            cfg.batches = batch.clone();
        }
        if let Some(out) = &cli.out {
            cfg.out_dir = out.clone();
        }
        cfg.full = cli.full || cfg.kv.get_bool("full", false)?;

        for &b in &cfg.batches {
            if b < 1 {
                return Err(ConfigError::BadBatch(b));
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_spacing() {
        let text = "# header\nseed = 7\n\nnoise_sigma=0.25  # inline\n";
        let kv = KvConfig::parse(text, Path::new("test.cfg")).unwrap();
        assert_eq!(kv.get_u64("seed", 0).unwrap(), 7);
        assert_eq!(kv.get_f64("noise_sigma", 0.0).unwrap(), 0.25);
        assert_eq!(kv.get_f64("missing", 1.5).unwrap(), 1.5);
    }

    #[test]
    fn rejects_garbage_lines() {
        let err = KvConfig::parse("not a kv line\n", Path::new("t.cfg")).unwrap_err();
        assert!(matches!(err, ConfigError::BadLine { line: 1, .. }));
    }

    #[test]
    fn bits_spec_parsing() {
        assert_eq!(BitsSpec::parse("float").unwrap(), BitsSpec::Float);
        assert_eq!(BitsSpec::parse("8").unwrap(), BitsSpec::Fixed(8));
        assert_eq!(BitsSpec::parse(" 2 ").unwrap(), BitsSpec::Fixed(2));
        assert!(BitsSpec::parse("1").is_err());
        assert!(BitsSpec::parse("9").is_err());
        assert!(BitsSpec::parse("x").is_err());
    }

    #[test]
    fn cli_overrides_beat_file_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "seed=5\nbits=8,4\ne_inv=3.5\ncounter_bits=24\n").unwrap();
        let cli = CliOverrides {
            config: Some(path),
            seed: Some(9),
            bits: None,
            batch: Some(vec![1, 2]),
            out: None,
            full: false,
        };
        let cfg = ExperimentConfig::build(&cli).unwrap();
        assert_eq!(cfg.seed, 9); // CLI wins
        assert_eq!(cfg.bits, vec![BitsSpec::Fixed(8), BitsSpec::Fixed(4)]);
        assert_eq!(cfg.batches, vec![1, 2]);
        assert_eq!(cfg.energy.e_inv, 3.5);
        assert_eq!(cfg.pmac.counter_bits, 24);
    }

    #[test]
    fn batch_zero_rejected() {
        let cli = CliOverrides {
            batch: Some(vec![0]),
            ..CliOverrides::default()
        };
        assert!(matches!(
            ExperimentConfig::build(&cli),
            Err(ConfigError::BadBatch(0))
        ));
    }
}
