//! Flag definitions and validation into a [`CommandSpec`].

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use bb84_core::analysis::linspace;
use bb84_core::montecarlo::SimConfig;
use bb84_core::oracle::MAX_ENUMERATED_EVES;
use bb84_core::{AttackChain, ChannelNoise, QRule};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::UsageError;

#[derive(Debug, Parser)]
#[command(
    name = "bb84",
    version,
    about = "BB84 under depolarizing noise and sequential intercept-resend attacks; every subcommand prints CSV"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Args)]
struct Common {
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// JSON object whose keys are flag names; explicit flags win.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum QRuleArg {
    Uniform,
}

#[derive(Debug, Args)]
struct NoiseLocation {
    /// Noise-location probabilities q_1..q_{N+1}.
    #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "q_rule")]
    q: Option<Vec<f64>>,
    /// Derive q from a rule instead of listing it (default: uniform).
    #[arg(long, value_enum)]
    q_rule: Option<QRuleArg>,
}

impl NoiseLocation {
    fn rule(&self) -> QRule {
        match &self.q {
            Some(qs) => QRule::Explicit(qs.clone()),
            None => QRule::Uniform,
        }
    }
}

#[derive(Debug, Args)]
struct PGrid {
    #[arg(long, default_value_t = 0.0)]
    p_min: f64,
    #[arg(long, default_value_t = 0.2)]
    p_max: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 200)]
    p_steps: usize,
}

impl PGrid {
    fn points(&self) -> Result<Vec<f64>, UsageError> {
        grid("p", self.p_min, self.p_max, self.p_steps)
    }
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Every information quantity and the verdict at one parameter point.
    Assess {
        #[arg(long)]
        p: f64,
        /// Interception probabilities ω_1..ω_N (omit for no eavesdropper).
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        omega: Option<Vec<f64>>,
        #[command(flatten)]
        noise: NoiseLocation,
        #[command(flatten)]
        common: Common,
    },
    /// QBER threshold against p for N eavesdroppers with a common ω.
    QberCurve {
        #[arg(long, default_value_t = 1)]
        n_eves: usize,
        #[command(flatten)]
        grid: PGrid,
        #[command(flatten)]
        noise: NoiseLocation,
        #[command(flatten)]
        common: Common,
    },
    /// Lost information against p for one eavesdropper and several q_1.
    LostInfo {
        #[arg(long)]
        omega: f64,
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "0,0.25,0.5,0.75,1")]
        q1: Vec<f64>,
        #[command(flatten)]
        grid: PGrid,
        #[command(flatten)]
        common: Common,
    },
    /// Secured/unsecured boundary ω*(p) for N eavesdroppers with a common ω.
    Phase2d {
        #[arg(long, default_value_t = 1)]
        n_eves: usize,
        #[command(flatten)]
        grid: PGrid,
        #[command(flatten)]
        noise: NoiseLocation,
        #[command(flatten)]
        common: Common,
    },
    /// Boundary ω_3*(ω_1, ω_2) for three eavesdroppers at fixed p.
    Phase3d {
        #[arg(long)]
        p: f64,
        /// Grid points per axis over [0, 1].
        #[arg(long, default_value_t = 50)]
        omega_steps: usize,
        #[command(flatten)]
        noise: NoiseLocation,
        #[command(flatten)]
        common: Common,
    },
    /// Photon-level Monte Carlo compared against the closed forms.
    Simulate {
        #[arg(long, default_value_t = 1_000_000)]
        photons: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        p: f64,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        omega: Option<Vec<f64>>,
        #[command(flatten)]
        noise: NoiseLocation,
        /// Worker threads (default: all cores). Output does not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized cross-check of product forms against literal enumerations.
    Verify {
        #[arg(long, default_value_t = 3)]
        n_eves: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Noise level above which no key is secured, even without eavesdroppers.
    CriticalP {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Stdout,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Assess {
        channel: ChannelNoise,
        chain: AttackChain,
    },
    QberCurve {
        p_grid: Vec<f64>,
        n_eves: usize,
        q_rule: QRule,
    },
    LostInfo {
        p_grid: Vec<f64>,
        omega: f64,
        q1_values: Vec<f64>,
    },
    Phase2d {
        p_grid: Vec<f64>,
        n_eves: usize,
        q_rule: QRule,
    },
    Phase3d {
        omega_grid: Vec<f64>,
        p: f64,
        qs: Vec<f64>,
    },
    Simulate {
        config: SimConfig,
        channel: ChannelNoise,
        chain: AttackChain,
        threads: Option<usize>,
    },
    Verify {
        n_eves: usize,
        trials: usize,
        seed: u64,
    },
    CriticalP,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandSpec {
    pub command: Command,
    pub output: Output,
}

/// What `parse_args` produced: a runnable command, or text (help, version)
/// the caller should print before exiting successfully.
#[derive(Debug, Clone, PartialEq)]
pub enum Parsed {
    Run(CommandSpec),
    Info(String),
}

/// Parses and validates a full argv (program name first).
pub fn parse_args<I, S>(argv: I) -> Result<Parsed, UsageError>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let argv = splice_config(argv)?;
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => return Ok(Parsed::Info(e.render().to_string())),
        Err(e) => return Err(UsageError::from_clap(&e)),
    };
    validate(cli.command).map(Parsed::Run)
}

/// Inserts `--key value` tokens for every config entry whose flag is not
/// already on the command line, directly after the subcommand name.
fn splice_config(argv: Vec<String>) -> Result<Vec<String>, UsageError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| UsageError::new(format!("cannot read config {}: {e}", path.display())))?;
    let doc: BTreeMap<String, Value> = serde_json::from_str(&text).map_err(|e| {
        UsageError::new(format!(
            "config {} is not a JSON object: {e}",
            path.display()
        ))
    })?;

    let given: Vec<&str> = argv
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split_once('=').map_or(a, |(k, _)| k))
        .collect();
    let excluded = |key: &str| {
        given.contains(&key)
            || (key == "q" && given.contains(&"q-rule"))
            || (key == "q-rule" && given.contains(&"q"))
            || key == "config"
    };

    let mut injected = Vec::new();
    for (key, value) in &doc {
        if excluded(key) {
            continue;
        }
        let rendered = match value {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.clone(),
            Value::Array(items) => items
                .iter()
                .map(|v| match v {
                    Value::Number(n) => Ok(n.to_string()),
                    Value::String(s) => Ok(s.clone()),
                    other => Err(UsageError::new(format!(
                        "config key `{key}`: unsupported list item {other}"
                    ))),
                })
                .collect::<Result<Vec<_>, _>>()?
                .join(","),
            other => {
                return Err(UsageError::new(format!(
                    "config key `{key}`: unsupported value {other}"
                )))
            }
        };
        injected.push(format!("--{key}"));
        injected.push(rendered);
    }

    // Program name and subcommand come first; config tokens go right after.
    let split = argv.len().min(2);
    let mut out = argv[..split].to_vec();
    out.extend(injected);
    out.extend_from_slice(&argv[split..]);
    Ok(out)
}

fn config_path(argv: &[String]) -> Option<PathBuf> {
    let mut iter = argv.iter();
    while let Some(arg) = iter.next() {
        if let Some(path) = arg.strip_prefix("--config=") {
            return Some(PathBuf::from(path));
        }
        if arg == "--config" {
            return iter.next().map(PathBuf::from);
        }
    }
    None
}

fn grid(name: &str, min: f64, max: f64, steps: usize) -> Result<Vec<f64>, UsageError> {
    for (label, v) in [("min", min), ("max", max)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(UsageError::new(format!(
                "{name}-{label} = {v} outside [0, 1]"
            )));
        }
    }
    if steps == 0 {
        return Err(UsageError::new(format!("{name}-steps must be at least 1")));
    }
    if steps > 1 && min >= max {
        return Err(UsageError::new(format!(
            "{name}-min must be below {name}-max for more than one step"
        )));
    }
    Ok(linspace(min, max, steps))
}

fn channel(p: f64) -> Result<ChannelNoise, UsageError> {
    ChannelNoise::new(p).map_err(UsageError::from)
}

fn chain(omegas: Option<Vec<f64>>, noise: &NoiseLocation) -> Result<AttackChain, UsageError> {
    let omegas = omegas.unwrap_or_default();
    let qs = noise.rule().qs(omegas.len())?;
    Ok(AttackChain::new(omegas, qs)?)
}

fn check_rule(n_eves: usize, noise: &NoiseLocation) -> Result<QRule, UsageError> {
    if n_eves == 0 {
        return Err(UsageError::new("n-eves must be at least 1"));
    }
    let rule = noise.rule();
    AttackChain::new(vec![0.0; n_eves], rule.qs(n_eves)?)?;
    Ok(rule)
}

fn output(common: Common) -> Output {
    common.out.map_or(Output::Stdout, Output::File)
}

fn validate(sub: Sub) -> Result<CommandSpec, UsageError> {
    let (command, common) = match sub {
        Sub::Assess {
            p,
            omega,
            noise,
            common,
        } => (
            Command::Assess {
                channel: channel(p)?,
                chain: chain(omega, &noise)?,
            },
            common,
        ),
        Sub::QberCurve {
            n_eves,
            grid,
            noise,
            common,
        } => (
            Command::QberCurve {
                p_grid: grid.points()?,
                q_rule: check_rule(n_eves, &noise)?,
                n_eves,
            },
            common,
        ),
        Sub::LostInfo {
            omega,
            q1,
            grid,
            common,
        } => {
            for &q in &q1 {
                AttackChain::new(vec![omega], vec![q, 1.0 - q])?;
            }
            (
                Command::LostInfo {
                    p_grid: grid.points()?,
                    omega,
                    q1_values: q1,
                },
                common,
            )
        }
        Sub::Phase2d {
            n_eves,
            grid,
            noise,
            common,
        } => (
            Command::Phase2d {
                p_grid: grid.points()?,
                q_rule: check_rule(n_eves, &noise)?,
                n_eves,
            },
            common,
        ),
        Sub::Phase3d {
            p,
            omega_steps,
            noise,
            common,
        } => {
            channel(p)?;
            let qs = noise.rule().qs(3)?;
            AttackChain::new(vec![0.0; 3], qs.clone())?;
            (
                Command::Phase3d {
                    omega_grid: grid("omega", 0.0, 1.0, omega_steps)?,
                    p,
                    qs,
                },
                common,
            )
        }
        Sub::Simulate {
            photons,
            seed,
            p,
            omega,
            noise,
            threads,
            common,
        } => {
            if photons == 0 {
                return Err(UsageError::new("photons must be at least 1"));
            }
            if threads == Some(0) {
                return Err(UsageError::new("threads must be at least 1"));
            }
            (
                Command::Simulate {
                    config: SimConfig {
                        n_photons: photons,
                        seed,
                    },
                    channel: channel(p)?,
                    chain: chain(omega, &noise)?,
                    threads,
                },
                common,
            )
        }
        Sub::Verify {
            n_eves,
            trials,
            seed,
            common,
        } => {
            if n_eves == 0 || n_eves > MAX_ENUMERATED_EVES {
                return Err(UsageError::new(format!(
                    "n-eves must be in 1..={MAX_ENUMERATED_EVES}"
                )));
            }
            if trials == 0 {
                return Err(UsageError::new("trials must be at least 1"));
            }
            (
                Command::Verify {
                    n_eves,
                    trials,
                    seed,
                },
                common,
            )
        }
        Sub::CriticalP { common } => (Command::CriticalP, common),
    };
    Ok(CommandSpec {
        command,
        output: output(common),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(line: &str) -> Result<CommandSpec, UsageError> {
        match parse_args(std::iter::once("bb84").chain(line.split_whitespace()))? {
            Parsed::Run(spec) => Ok(spec),
            Parsed::Info(text) => panic!("unexpected info output: {text}"),
        }
    }

    #[test]
    fn assess_with_two_eves() {
        let spec = parse("assess --p 0.05 --omega 0.3,0.5 --q 0.25,0.25,0.5").unwrap();
        let Command::Assess { channel, chain } = spec.command else {
            panic!("wrong command")
        };
        assert_eq!(channel.p(), 0.05);
        assert_eq!(chain.omegas(), &[0.3, 0.5]);
        assert_eq!(chain.qs(), &[0.25, 0.25, 0.5]);
        assert_eq!(spec.output, Output::Stdout);
    }

    #[test]
    fn assess_without_eves_is_noise_only() {
        let spec = parse("assess --p 0.2").unwrap();
        let Command::Assess { chain, .. } = spec.command else {
            panic!("wrong command")
        };
        assert_eq!(chain, AttackChain::no_attack());
    }

    #[test]
    fn rejects_out_of_range_p() {
        let err = parse("assess --p 1.5 --omega 0.3 --q 0.5,0.5").unwrap_err();
        assert!(err.to_string().contains("p = 1.5"), "{err}");
        assert!(!err.to_string().contains('\n'));
    }

    #[test]
    fn rejects_q_arity_and_sum() {
        assert!(parse("assess --p 0.1 --omega 0.3,0.5 --q 0.5,0.5").is_err());
        assert!(parse("assess --p 0.1 --omega 0.3 --q 0.5,0.6").is_err());
        assert!(parse("phase3d --p 0.05 --q 0.5,0.5").is_err());
    }

    #[test]
    fn qber_curve_uniform_rule() {
        let spec =
            parse("qber-curve --n-eves 2 --p-min 0 --p-max 0.24 --p-steps 100 --q-rule uniform")
                .unwrap();
        let Command::QberCurve {
            p_grid,
            n_eves,
            q_rule,
        } = spec.command
        else {
            panic!("wrong command")
        };
        assert_eq!(n_eves, 2);
        assert_eq!(p_grid.len(), 100);
        assert_eq!(p_grid[99], 0.24);
        assert_eq!(q_rule.qs(2).unwrap(), vec![1.0 / 3.0; 3]);
    }

    #[test]
    fn q_and_rule_are_exclusive() {
        assert!(parse("phase2d --q 0.5,0.5 --q-rule uniform").is_err());
    }

    #[test]
    fn unknown_flags_rejected() {
        assert!(parse("critical-p --bogus 1").is_err());
        assert!(parse("frobnicate").is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(parse("phase2d --p-min 0.3 --p-max 0.1").is_err());
        assert!(parse("phase2d --p-steps 0").is_err());
        assert!(parse("phase2d --p-max 1.2").is_err());
        assert!(parse("phase2d --p-min 0.1 --p-max 0.1 --p-steps 1").is_ok());
        assert!(parse("phase2d --n-eves 0").is_err());
        assert!(parse("verify --n-eves 21").is_err());
        assert!(parse("simulate --p 0.1 --photons 0").is_err());
    }

    #[test]
    fn config_file_with_flag_override() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fig.json");
        fs::write(
            &path,
            r#"{"n-eves": 2, "p-max": 0.15, "p-steps": 16, "q": [0.2, 0.3, 0.5]}"#,
        )
        .unwrap();
        let line = format!(
            "phase2d --config {} --p-steps 4 --q-rule uniform",
            path.display()
        );
        let Command::Phase2d {
            p_grid,
            n_eves,
            q_rule,
        } = parse(&line).unwrap().command
        else {
            panic!("wrong command")
        };
        assert_eq!(n_eves, 2);
        assert_eq!(p_grid, linspace(0.0, 0.15, 4));
        assert_eq!(q_rule, QRule::Uniform);

        let line = format!("phase2d --config={}", path.display());
        let Command::Phase2d { q_rule, .. } = parse(&line).unwrap().command else {
            panic!("wrong command")
        };
        assert_eq!(q_rule, QRule::Explicit(vec![0.2, 0.3, 0.5]));
    }

    #[test]
    fn bad_config_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        fs::write(&path, "[1, 2]").unwrap();
        assert!(parse(&format!("critical-p --config {}", path.display())).is_err());
        assert!(parse("critical-p --config /nonexistent/file.json").is_err());
    }

    #[test]
    fn help_is_info() {
        let parsed = parse_args(["bb84", "--help"]).unwrap();
        assert!(matches!(parsed, Parsed::Info(text) if text.contains("phase3d")));
    }
}
