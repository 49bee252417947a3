//! Experiment configuration: defaults, then a TOML file, then flags.
//!
//! Every key of the file mirrors a flag (`power_grid` ↔ `--powers`,
//! `matrix` ↔ `--matrix`, `output` ↔ `--out`, …). Unknown keys are rejected
//! and bad values are reported with the line they came from.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gifc_core::lattice::SRange;
use gifc_core::sumset::suite::{Lemma, COORD_BOUND};
use serde::Deserialize;
use toml::Spanned;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    LatticeSim,
    SumsetVerify,
    Multilevel,
    Bounds,
    Sweep,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::LatticeSim,
        Command::SumsetVerify,
        Command::Multilevel,
        Command::Bounds,
        Command::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::LatticeSim => "lattice-sim",
            Command::SumsetVerify => "sumset-verify",
            Command::Multilevel => "multilevel",
            Command::Bounds => "bounds",
            Command::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("format must be csv or json, got {s:?}")),
        }
    }
}

pub fn parse_s_range(s: &str) -> Result<SRange, String> {
    if s == "auto" {
        return Ok(SRange::Auto);
    }
    s.parse()
        .map(SRange::Fixed)
        .map_err(|_| format!("s-range must be `auto` or a non-negative integer, got {s:?}"))
}

fn s_range_text(r: SRange) -> String {
    match r {
        SRange::Auto => "auto".into(),
        SRange::Fixed(n) => n.to_string(),
    }
}

/// Parses `i,j,k` (1-based user indices).
pub fn parse_triple(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("triple must be three comma-separated user indices, got {s:?}"))?;
    <[usize; 3]>::try_from(parts)
        .map_err(|_| format!("triple must be three comma-separated user indices, got {s:?}"))
}

/// Parses a comma-separated list of powers such as `1e6,1e9,1e12`.
pub fn parse_powers(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("invalid power {t:?}")))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub matrix_path: Option<PathBuf>,
    pub seed: u64,
    pub power_grid: Vec<f64>,
    pub epsilon: f64,
    pub trials: u64,
    /// `None` writes to standard output.
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub s_range: SRange,
    pub noise_variance: f64,
    pub lemma: Option<Lemma>,
    pub max_card: usize,
    pub levels: u32,
    /// `None` is the built-in scheme.
    pub scheme_path: Option<PathBuf>,
    pub exhaustive: bool,
    /// 1-based user indices.
    pub triple: Option<[usize; 3]>,
    /// Also search alphabets with bases up to this value.
    pub search_max_base: Option<i64>,
}

impl ExperimentConfig {
    pub fn defaults(command: Command) -> Self {
        Self {
            command,
            matrix_path: None,
            seed: 0,
            power_grid: vec![1e6, 1e9, 1e12],
            epsilon: 0.2,
            trials: 10_000,
            output_path: None,
            format: Format::Csv,
            s_range: SRange::Auto,
            noise_variance: 1.0,
            lemma: None,
            max_card: 40,
            levels: 1,
            scheme_path: None,
            exhaustive: false,
            triple: None,
            search_max_base: None,
        }
    }

    /// The configuration as a config file that parses back to `self`.
    pub fn to_toml(&self) -> String {
        use toml::Value;
        let mut t = toml::Table::new();
        let path = |p: &PathBuf| Value::String(p.display().to_string());
        t.insert("command".into(), Value::String(self.command.name().into()));
        if let Some(p) = &self.matrix_path {
            t.insert("matrix".into(), path(p));
        }
        t.insert("seed".into(), Value::Integer(self.seed as i64));
        t.insert(
            "power_grid".into(),
            Value::Array(self.power_grid.iter().map(|&p| Value::Float(p)).collect()),
        );
        t.insert("epsilon".into(), Value::Float(self.epsilon));
        t.insert("trials".into(), Value::Integer(self.trials as i64));
        if let Some(p) = &self.output_path {
            t.insert("output".into(), path(p));
        }
        t.insert("format".into(), Value::String(self.format.name().into()));
        t.insert("s_range".into(), Value::String(s_range_text(self.s_range)));
        t.insert("noise_variance".into(), Value::Float(self.noise_variance));
        if let Some(l) = self.lemma {
            t.insert("lemma".into(), Value::String(l.name().into()));
        }
        t.insert("max_card".into(), Value::Integer(self.max_card as i64));
        t.insert("levels".into(), Value::Integer(self.levels.into()));
        t.insert(
            "scheme".into(),
            self.scheme_path.as_ref().map_or(Value::String("default".into()), path),
        );
        let check = if self.exhaustive { "exhaustive" } else { "none" };
        t.insert("check".into(), Value::String(check.into()));
        if let Some(tr) = self.triple {
            t.insert(
                "triple".into(),
                Value::Array(tr.iter().map(|&i| Value::Integer(i as i64)).collect()),
            );
        }
        if let Some(b) = self.search_max_base {
            t.insert("search_max_base".into(), Value::Integer(b));
        }
        toml::to_string(&t).expect("plain table serializes")
    }
}

/// Values given as flags; `None` falls through to the file or the default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub matrix: Option<PathBuf>,
    pub seed: Option<u64>,
    pub powers: Option<Vec<f64>>,
    pub epsilon: Option<f64>,
    pub trials: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub s_range: Option<SRange>,
    pub noise_variance: Option<f64>,
    pub lemma: Option<Lemma>,
    pub max_card: Option<usize>,
    pub levels: Option<u32>,
    /// `"default"` or a path.
    pub scheme: Option<String>,
    pub exhaustive: Option<bool>,
    pub triple: Option<[usize; 3]>,
    pub search_max_base: Option<i64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<Spanned<String>>,
    matrix: Option<Spanned<String>>,
    seed: Option<Spanned<u64>>,
    power_grid: Option<Spanned<Vec<f64>>>,
    epsilon: Option<Spanned<f64>>,
    trials: Option<Spanned<u64>>,
    output: Option<Spanned<String>>,
    format: Option<Spanned<String>>,
    s_range: Option<Spanned<String>>,
    noise_variance: Option<Spanned<f64>>,
    lemma: Option<Spanned<String>>,
    max_card: Option<Spanned<u64>>,
    levels: Option<Spanned<u64>>,
    scheme: Option<Spanned<String>>,
    check: Option<Spanned<String>>,
    triple: Option<Spanned<Vec<u64>>>,
    search_max_base: Option<Spanned<i64>>,
}

/// Where a value came from, for error messages.
#[derive(Debug, Clone, Copy)]
enum Origin {
    Default,
    Line(usize),
    Flag(&'static str),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Default => write!(f, "default"),
            Origin::Line(l) => write!(f, "config line {l}"),
            Origin::Flag(name) => write!(f, "{name}"),
        }
    }
}

struct Merger<'a> {
    text: &'a str,
}

impl Merger<'_> {
    fn line(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())].matches('\n').count() + 1
    }

    /// Flag, else file, else default; file values go through `convert`.
    fn pick<F, T>(
        &self,
        flag: (&'static str, Option<T>),
        file: Option<Spanned<F>>,
        default: T,
        convert: impl Fn(F) -> Result<T, String>,
    ) -> Result<(T, Origin), CliError> {
        if let Some(v) = flag.1 {
            return Ok((v, Origin::Flag(flag.0)));
        }
        match file {
            Some(s) => {
                let line = self.line(s.span().start);
                convert(s.into_inner())
                    .map(|v| (v, Origin::Line(line)))
                    .map_err(|m| CliError::Usage(format!("config line {line}: {m}")))
            }
            None => Ok((default, Origin::Default)),
        }
    }
}

fn ok<T>(v: T) -> Result<T, String> {
    Ok(v)
}

fn bad(origin: Origin, message: String) -> CliError {
    CliError::Usage(format!("{message} ({origin})"))
}

/// Builds the configuration for `command` from an optional config file's
/// text and the flags.
pub fn parse_config(
    command: Command,
    file_text: Option<&str>,
    flags: &Overrides,
) -> Result<ExperimentConfig, CliError> {
    parse_config_in(command, file_text, None, flags)
}

/// As [`parse_config`]; relative paths read from the file are taken
/// relative to `file_dir`.
pub fn parse_config_in(
    command: Command,
    file_text: Option<&str>,
    file_dir: Option<&Path>,
    flags: &Overrides,
) -> Result<ExperimentConfig, CliError> {
    let text = file_text.unwrap_or("");
    let file: FileConfig = toml::from_str(text)
        .map_err(|e| CliError::Usage(format!("config file: {}", e.to_string().trim_end())))?;
    let m = Merger { text };
    let d = ExperimentConfig::defaults(command);

    if let Some(c) = file.command {
        let line = m.line(c.span().start);
        let named: Command = c.get_ref().parse().map_err(|e| CliError::Usage(format!("config line {line}: {e}")))?;
        if named != command {
            return Err(CliError::Usage(format!(
                "config line {line}: command = {named} conflicts with the `{command}` subcommand"
            )));
        }
    }

    let anchor = |s: &str| match file_dir {
        Some(dir) if Path::new(s).is_relative() => dir.join(s),
        _ => PathBuf::from(s),
    };
    let path = |s: String| Ok(Some(anchor(&s)));
    let (matrix_path, _) = m.pick(("--matrix", flags.matrix.clone().map(Some)), file.matrix, None, path)?;
    let (seed, _) = m.pick(("--seed", flags.seed), file.seed, d.seed, ok)?;
    let (power_grid, grid_origin) = m.pick(("--powers", flags.powers.clone()), file.power_grid, d.power_grid, ok)?;
    let (epsilon, eps_origin) = m.pick(("--epsilon", flags.epsilon), file.epsilon, d.epsilon, ok)?;
    let (trials, trials_origin) = m.pick(("--trials", flags.trials), file.trials, d.trials, ok)?;
    let (output_path, _) = m.pick(("--out", flags.out.clone().map(Some)), file.output, None, path)?;
    let (format, _) = m.pick(("--format", flags.format), file.format, d.format, |s| s.parse())?;
    let (s_range, _) = m.pick(("--s-range", flags.s_range), file.s_range, d.s_range, |s| parse_s_range(&s))?;
    let (noise_variance, noise_origin) =
        m.pick(("--noise-variance", flags.noise_variance), file.noise_variance, d.noise_variance, ok)?;
    let (lemma, _) = m.pick(("--lemma", flags.lemma.map(Some)), file.lemma, None, |s| {
        s.parse::<Lemma>().map(Some).map_err(|e| e.to_string())
    })?;
    let (max_card, card_origin) = m.pick(("--max-card", flags.max_card), file.max_card, d.max_card, |v| {
        usize::try_from(v).map_err(|_| format!("max_card out of range: {v}"))
    })?;
    let (levels, levels_origin) = m.pick(("--levels", flags.levels), file.levels, d.levels, |v| {
        u32::try_from(v).map_err(|_| format!("levels out of range: {v}"))
    })?;
    let (scheme, scheme_origin) =
        m.pick(("--scheme", flags.scheme.clone()), file.scheme, "default".to_string(), ok)?;
    let (exhaustive, _) = m.pick(("--check", flags.exhaustive), file.check, d.exhaustive, |s| match s.as_str() {
        "exhaustive" => Ok(true),
        "none" => Ok(false),
        _ => Err(format!("check must be `exhaustive` or `none`, got {s:?}")),
    })?;
    let (triple, triple_origin) = m.pick(("--triple", flags.triple.map(Some)), file.triple, None, |v| {
        let v: Vec<usize> = v.into_iter().map(|x| x as usize).collect();
        <[usize; 3]>::try_from(v)
            .map(Some)
            .map_err(|_| "triple must list three user indices".to_string())
    })?;
    let (search_max_base, search_origin) =
        m.pick(("--search-max-base", flags.search_max_base.map(Some)), file.search_max_base, None, |v| Ok(Some(v)))?;

    let cfg = ExperimentConfig {
        command,
        matrix_path,
        seed,
        power_grid,
        epsilon,
        trials,
        output_path,
        format,
        s_range,
        noise_variance,
        lemma,
        max_card,
        levels,
        scheme_path: match scheme_origin {
            _ if scheme == "default" => None,
            Origin::Line(_) => Some(anchor(&scheme)),
            _ => Some(PathBuf::from(scheme)),
        },
        exhaustive,
        triple,
        search_max_base,
    };

    let need_matrix = || {
        if cfg.matrix_path.is_none() {
            Err(CliError::Usage(format!("{command} requires --matrix <file> (or `matrix` in the config file)")))
        } else {
            Ok(())
        }
    };
    match command {
        Command::LatticeSim | Command::Sweep => {
            need_matrix()?;
            if !(cfg.epsilon > 0.0 && cfg.epsilon < 0.25) {
                return Err(bad(eps_origin, format!("epsilon must lie in (0, 1/4), got {}", cfg.epsilon)));
            }
            check_grid(&cfg.power_grid).map_err(|e| bad(grid_origin, format!("invalid grid: {e}")))?;
            if cfg.trials == 0 {
                return Err(bad(trials_origin, "trials must be at least 1".into()));
            }
            if !(cfg.noise_variance >= 0.0 && cfg.noise_variance.is_finite()) {
                return Err(bad(noise_origin, format!("noise variance must be non-negative, got {}", cfg.noise_variance)));
            }
        }
        Command::Bounds => {
            need_matrix()?;
            if let Some(t) = cfg.triple {
                if t.contains(&0) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                    return Err(bad(triple_origin, format!("triple needs three distinct 1-based users, got {t:?}")));
                }
            }
        }
        Command::SumsetVerify => {
            if cfg.lemma.is_none() {
                return Err(CliError::Usage(
                    "sumset verify requires --lemma {cover|plunnecke|setsum|exg|bsg}".into(),
                ));
            }
            if cfg.trials == 0 {
                return Err(bad(trials_origin, "trials must be at least 1".into()));
            }
            let span = (2 * COORD_BOUND + 1) as usize;
            if cfg.max_card == 0 || cfg.max_card > span {
                return Err(bad(card_origin, format!("max-card must lie in 1..={span}, got {}", cfg.max_card)));
            }
        }
        Command::Multilevel => {
            if cfg.levels == 0 {
                return Err(bad(levels_origin, "levels must be at least 1".into()));
            }
            if let Some(b) = cfg.search_max_base {
                if !(2..=16).contains(&b) {
                    return Err(bad(search_origin, format!("search base must lie in 2..=16, got {b}")));
                }
            }
        }
    }
    Ok(cfg)
}

fn check_grid(grid: &[f64]) -> Result<(), String> {
    if grid.is_empty() {
        return Err("empty power grid".into());
    }
    if let Some(p) = grid.iter().find(|p| !(p.is_finite() && **p > 1.0)) {
        return Err(format!("powers must be finite and exceed 1, got {p}"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err("powers must be strictly increasing".into());
    }
    Ok(())
}
