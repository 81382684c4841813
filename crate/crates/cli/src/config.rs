//! Experiment configuration: a TOML file overlaid with command-line flags.
//!
//! Every sweep CSV embeds the resolved configuration as `# key = value`
//! comment lines, so any output file can be regenerated byte-for-byte from
//! its own header.

use anyhow::{anyhow, bail, Context, Result};
use polartri::channel::ChannelSpec;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Default Monte Carlo sample count per reliability table.
pub const DEFAULT_SAMPLES: u64 = 100_000;
/// Default decoding trials per simulated point.
pub const DEFAULT_TRIALS: u64 = 10_000;
/// Largest erasure-channel exponent covered by the default runtime budget.
pub const BEC_MAX_N: usize = 20;
/// Largest dephasing-channel exponent covered by the default runtime budget.
pub const BSC_MAX_N: usize = 16;

/// How the number of punctured (output) qubits is chosen from the dual
/// dimension of each code.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KRule {
    /// `k = max(1, ⌊fraction · dual_dim⌋)`.
    Fraction(f64),
    /// A fixed `k` regardless of code size.
    Fixed(usize),
}

impl KRule {
    pub fn apply(&self, dual_dim: usize) -> usize {
        match *self {
            KRule::Fraction(f) => ((dual_dim as f64 * f).floor() as usize).max(1),
            KRule::Fixed(k) => k,
        }
    }

    pub fn parse(text: &str) -> Result<KRule> {
        if let Some(rest) = text.strip_prefix("fraction:") {
            let f: f64 = rest.parse().context("k-rule fraction")?;
            if !(0.0..=1.0).contains(&f) {
                bail!("k-rule fraction must lie in [0, 1], got {f}");
            }
            Ok(KRule::Fraction(f))
        } else if let Some(rest) = text.strip_prefix("fixed:") {
            Ok(KRule::Fixed(rest.parse().context("k-rule count")?))
        } else {
            bail!("k-rule must be 'fraction:F' or 'fixed:K', got '{text}'")
        }
    }
}

impl std::fmt::Display for KRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KRule::Fraction(v) => write!(f, "fraction:{v}"),
            KRule::Fixed(k) => write!(f, "fixed:{k}"),
        }
    }
}

/// Resolved experiment description shared by all sweep subcommands.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExperimentConfig {
    /// Channel family: "bec" or "bsc".
    pub channel: String,
    /// Physical noise rates, one sweep curve per entry.
    pub ps: Vec<f64>,
    pub n_min: usize,
    pub n_max: usize,
    /// Monte Carlo samples per reliability table (dephasing only).
    pub samples: u64,
    pub seed: u64,
    /// Extra preparation noise folded into the effective channel.
    pub q: f64,
    /// Decoding trials per simulated point.
    pub trials: u64,
    /// Puncture-count rule, serialized as `fraction:F` or `fixed:K`.
    pub k_rule: String,
    /// Output directory for CSV, fit, and gnuplot files.
    pub out: PathBuf,
    /// Reliability-table cache directory; `None` defers to
    /// `POLAR_CACHE_DIR` and then to `polar-cache` in the working dir.
    pub cache: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            channel: "bec".into(),
            ps: vec![0.01, 0.02, 0.05],
            n_min: 10,
            n_max: BEC_MAX_N,
            samples: DEFAULT_SAMPLES,
            seed: 7,
            q: 0.0,
            trials: DEFAULT_TRIALS,
            k_rule: "fraction:0.01".into(),
            out: PathBuf::from("out"),
            cache: None,
        }
    }
}

/// Flag-level overrides; every field is optional and wins over the file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct ConfigOverrides {
    /// TOML configuration file, or a previously emitted CSV whose embedded
    /// header is replayed.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Channel family: bec or bsc.
    #[arg(long)]
    pub channel: Option<String>,
    /// Noise rate; repeat the flag for several curves.
    #[arg(long = "p")]
    pub ps: Vec<f64>,
    /// Smallest polarization exponent in the sweep (block length 2^n).
    #[arg(long)]
    pub n_min: Option<usize>,
    /// Largest polarization exponent in the sweep.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Monte Carlo samples per reliability table.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Base seed for table estimation and decoding trials.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Preparation error rate folded into the effective channel.
    #[arg(long)]
    pub q: Option<f64>,
    /// Decoding trials per simulated point.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Puncture-count rule: fraction:F or fixed:K.
    #[arg(long)]
    pub k_rule: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Reliability-table cache directory.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

impl ExperimentConfig {
    /// File defaults (when given) overlaid with flag overrides, validated.
    pub fn resolve(flags: &ConfigOverrides) -> Result<ExperimentConfig> {
        let mut cfg = match &flags.config {
            Some(path) if path.extension().is_some_and(|e| e == "csv") => {
                parse_embedded(path)?.1
            }
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                parse_toml(&text)?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(c) = &flags.channel {
            cfg.channel = c.clone();
            // A channel switch invalidates the erasure-oriented defaults.
            if flags.config.is_none() && c == "bsc" && flags.ps.is_empty() {
                cfg.ps = vec![0.001, 0.002, 0.005];
            }
            if flags.config.is_none() && c == "bsc" {
                cfg.n_min = flags.n_min.unwrap_or(8);
                cfg.n_max = flags.n_max.unwrap_or(BSC_MAX_N);
            }
        }
        if !flags.ps.is_empty() {
            cfg.ps = flags.ps.clone();
        }
        if let Some(v) = flags.n_min {
            cfg.n_min = v;
        }
        if let Some(v) = flags.n_max {
            cfg.n_max = v;
        }
        if let Some(v) = flags.samples {
            cfg.samples = v;
        }
        if let Some(v) = flags.seed {
            cfg.seed = v;
        }
        if let Some(v) = flags.q {
            cfg.q = v;
        }
        if let Some(v) = flags.trials {
            cfg.trials = v;
        }
        if let Some(v) = &flags.k_rule {
            cfg.k_rule = v.clone();
        }
        if let Some(v) = &flags.out {
            cfg.out = v.clone();
        }
        if let Some(v) = &flags.cache {
            cfg.cache = Some(v.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let max_n = match self.channel.as_str() {
            "bec" => BEC_MAX_N,
            "bsc" => BSC_MAX_N,
            other => bail!("channel must be 'bec' or 'bsc', got '{other}'"),
        };
        if self.ps.is_empty() {
            bail!("at least one noise rate is required");
        }
        for &p in &self.ps {
            self.channel_spec(p)?;
        }
        if self.n_min == 0 || self.n_min > self.n_max {
            bail!("invalid exponent range {}..={}", self.n_min, self.n_max);
        }
        if self.n_max > max_n {
            bail!(
                "n_max {} exceeds the default {} budget of {max_n}",
                self.n_max,
                self.channel
            );
        }
        if self.channel == "bsc" && self.samples == 0 {
            bail!("dephasing tables need at least one sample");
        }
        if !(0.0..=1.0).contains(&self.q) {
            bail!("q must lie in [0, 1], got {}", self.q);
        }
        KRule::parse(&self.k_rule)?;
        Ok(())
    }

    pub fn channel_spec(&self, p: f64) -> Result<ChannelSpec> {
        let spec = match self.channel.as_str() {
            "bec" => ChannelSpec::bec(p),
            "bsc" => ChannelSpec::bsc(p),
            other => bail!("channel must be 'bec' or 'bsc', got '{other}'"),
        };
        spec.map_err(|e| anyhow!("noise rate {p} invalid for {}: {e}", self.channel))
    }

    pub fn k_rule(&self) -> KRule {
        KRule::parse(&self.k_rule).expect("validated k rule")
    }

    /// The `# key = value` comment block embedded at the top of every CSV.
    pub fn embedded_header(&self, cmd: &str) -> String {
        let mut s = String::new();
        s.push_str(&format!("# cmd = \"{cmd}\"\n"));
        let toml = toml::to_string(self).expect("config serializes");
        for line in toml.lines() {
            s.push_str("# ");
            s.push_str(line);
            s.push('\n');
        }
        s
    }
}

fn parse_toml(text: &str) -> Result<ExperimentConfig> {
    // Missing keys fall back to defaults; unknown keys are rejected.
    let table: toml::Table = text.parse().context("parsing config TOML")?;
    let mut base = toml::Table::try_from(ExperimentConfig::default())?;
    for (k, v) in table {
        if !base.contains_key(&k) && k != "cache" {
            bail!("unknown config key '{k}'");
        }
        base.insert(k, v);
    }
    Ok(base.try_into()?)
}

/// Reads back a config embedded in a CSV by `embedded_header`. Returns the
/// command name and the configuration. Digest comment lines are ignored.
pub fn parse_embedded(path: &Path) -> Result<(String, ExperimentConfig)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut cmd = None;
    let mut toml_text = String::new();
    for line in text.lines() {
        let Some(body) = line.strip_prefix("# ") else { break };
        if let Some(rest) = body.strip_prefix("cmd = ") {
            cmd = Some(rest.trim_matches('"').to_string());
        } else if !body.starts_with("digest:") {
            toml_text.push_str(body);
            toml_text.push('\n');
        }
    }
    let cfg = parse_toml(&toml_text)?;
    cfg.validate()?;
    Ok((cmd.ok_or_else(|| anyhow!("no cmd line in {}", path.display()))?, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip_through_header() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        let header = cfg.embedded_header("sweep-dim");
        let dir = std::env::temp_dir().join("polartri-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("head.csv");
        std::fs::write(&path, format!("{header}p,n\n")).unwrap();
        let (cmd, parsed) = parse_embedded(&path).unwrap();
        assert_eq!(cmd, "sweep-dim");
        assert_eq!(parsed, cfg);
    }

    #[test]
    fn k_rules_apply() {
        assert_eq!(KRule::parse("fraction:0.01").unwrap().apply(250), 2);
        assert_eq!(KRule::parse("fraction:0.01").unwrap().apply(5), 1);
        assert_eq!(KRule::parse("fixed:3").unwrap().apply(5), 3);
        assert!(KRule::parse("half").is_err());
        assert!(KRule::parse("fraction:1.5").is_err());
    }

    #[test]
    fn validation_rejects_out_of_budget_ranges() {
        let mut cfg = ExperimentConfig::default();
        cfg.n_max = 21;
        assert!(cfg.validate().is_err());
        cfg.n_max = 20;
        cfg.validate().unwrap();
        cfg.channel = "bsc".into();
        cfg.ps = vec![0.001];
        cfg.n_max = 17;
        assert!(cfg.validate().is_err());
        cfg.n_max = 16;
        cfg.validate().unwrap();
        cfg.ps = vec![0.7];
        assert!(cfg.validate().is_err());
    }
}
