//! Run configuration: a line-oriented `key = value` file with `[section]`
//! headers, overridden by `key=value` command-line tokens and flags.
//!
//! ```text
//! # comments start with '#'
//! [run]
//! workers = 4
//! out = results
//!
//! [transport]
//! R1 = 40
//! R2 = 2
//! a = 10
//! eps = 2
//! ```
//!
//! Keys are case-insensitive. Sections other than `[run]` are named after
//! subcommands; every key in every section is checked, so a typo fails even in
//! a section the current run does not use.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subcommand {
    Geometry,
    BoundStates,
    Transport,
    Experiment,
    Verify,
}

impl Subcommand {
    pub const ALL: [Subcommand; 5] =
        [Subcommand::Geometry, Subcommand::BoundStates, Subcommand::Transport, Subcommand::Experiment, Subcommand::Verify];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Geometry => "geometry",
            Subcommand::BoundStates => "bound-states",
            Subcommand::Transport => "transport",
            Subcommand::Experiment => "experiment",
            Subcommand::Verify => "verify",
        }
    }
}

/// Where a value came from, for error messages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Line { file: PathBuf, line: usize },
    Flag(String),
    Default,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line { file, line } => write!(f, "{}:{line}", file.display()),
            Origin::Flag(token) => write!(f, "argument '{token}'"),
            Origin::Default => f.write_str("default"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{origin}: unknown key '{key}' for {section}")]
    UnknownKey { origin: Origin, key: String, section: String },
    #[error("{origin}: unknown section [{section}]")]
    UnknownSection { origin: Origin, section: String },
    #[error("{origin}: '{key}' expects {expected}, got '{value}'")]
    TypeMismatch { origin: Origin, key: String, expected: &'static str, value: String },
    #[error("missing required key '{key}' for {command} (pass {key}=... or set it under [{command}])")]
    MissingKey { key: String, command: &'static str },
    #[error("{origin}: {message}")]
    Malformed { origin: Origin, message: String },
    #[error("{origin}: {message}")]
    Invalid { origin: Origin, message: String },
    #[error("reading {path}: {message}")]
    Read { path: PathBuf, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// Finite number > 0.
    Positive,
    /// Any finite number.
    Real,
    /// Integer ≥ 0.
    Count,
    /// Any integer.
    Integer,
    Text,
    Bool,
}

impl Kind {
    fn expected(self) -> &'static str {
        match self {
            Kind::Positive => "a positive number",
            Kind::Real => "a number",
            Kind::Count => "a non-negative integer",
            Kind::Integer => "an integer",
            Kind::Text => "text",
            Kind::Bool => "true or false",
        }
    }

    fn check(self, raw: &str) -> Result<Value, ()> {
        match self {
            Kind::Positive | Kind::Real => {
                let v = f64::from_str(raw).map_err(|_| ())?;
                let ok = v.is_finite() && (self == Kind::Real || v > 0.0);
                ok.then_some(Value::Number(v)).ok_or(())
            }
            Kind::Count => usize::from_str(raw).map(Value::Count).map_err(|_| ()),
            Kind::Integer => i64::from_str(raw).map(Value::Integer).map_err(|_| ()),
            Kind::Text => (!raw.is_empty()).then(|| Value::Text(raw.to_string())).ok_or(()),
            Kind::Bool => match raw.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => Ok(Value::Bool(true)),
                "false" | "no" | "0" => Ok(Value::Bool(false)),
                _ => Err(()),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Number(f64),
    Count(usize),
    Integer(i64),
    Text(String),
    Bool(bool),
}

pub struct KeySpec {
    pub name: &'static str,
    pub kind: Kind,
    pub help: &'static str,
}

const fn key(name: &'static str, kind: Kind, help: &'static str) -> KeySpec {
    KeySpec { name, kind, help }
}

const RUN_KEYS: &[KeySpec] = &[
    key("out", Kind::Text, "output directory"),
    key("workers", Kind::Count, "worker threads (0 = all cores)"),
    key("dimensionless", Kind::Bool, "report energies in units of hbar^2/(2m rho^2)"),
];

const GEOMETRY_KEYS: &[KeySpec] = &[
    key("shape", Kind::Text, "cone | cylinder | junction"),
    key("rho", Kind::Positive, "cone: narrow-end radius [nm]"),
    key("lambda", Kind::Positive, "cone: slope tan(beta)"),
    key("radius", Kind::Positive, "cylinder: radius [nm]"),
    key("r1", Kind::Positive, "junction: incoming radius [nm]"),
    key("r2", Kind::Positive, "junction: outgoing radius [nm]"),
    key("a", Kind::Positive, "junction: half length [nm]"),
    key("eps", Kind::Positive, "junction: smooth-transition length [nm]"),
    key("z", Kind::Real, "single axial position [nm]"),
    key("zmin", Kind::Real, "first axial position [nm]"),
    key("zmax", Kind::Real, "last axial position [nm]"),
    key("points", Kind::Count, "number of positions"),
    key("mass", Kind::Positive, "effective mass m/m_e"),
];

const BOUND_KEYS: &[KeySpec] = &[
    key("rho", Kind::Positive, "narrow-end radius [nm]"),
    key("lambda", Kind::Positive, "slope tan(beta)"),
    key("zmax", Kind::Positive, "height [nm]"),
    key("eta", Kind::Integer, "azimuthal quantum number"),
    key("count", Kind::Count, "number of levels"),
    key("mass", Kind::Positive, "effective mass m/m_e"),
    key("points", Kind::Count, "eigenfunction grid points"),
];

const TRANSPORT_KEYS: &[KeySpec] = &[
    key("r1", Kind::Positive, "incoming radius [nm]"),
    key("r2", Kind::Positive, "outgoing radius [nm]"),
    key("a", Kind::Positive, "half length [nm]"),
    key("eps", Kind::Positive, "smooth-transition length [nm]"),
    key("energy", Kind::Positive, "single injection energy E_l [meV]"),
    key("emin", Kind::Positive, "first E_l of the sweep [meV]"),
    key("emax", Kind::Positive, "last E_l of the sweep [meV]"),
    key("points", Kind::Count, "sweep points"),
    key("n", Kind::Count, "transverse mode"),
    key("mass", Kind::Positive, "effective mass m/m_e"),
    key("grid", Kind::Count, "interior grid points"),
    key("gp", Kind::Bool, "include the geometric potential"),
];

const EXPERIMENT_KEYS: &[KeySpec] = &[
    key("id", Kind::Text, "experiment id or 'all'"),
    key("grid", Kind::Count, "transport grid points"),
    key("spec", Kind::Text, "JSON sweep specification replacing the default grid"),
];

const VERIFY_KEYS: &[KeySpec] = &[
    key("grid", Kind::Count, "transport grid points"),
    key("hbar2_over_2me", Kind::Positive, "hbar^2/(2 m_e) [meV nm^2]"),
    key("seed", Kind::Count, "seed for the random junction draws"),
    key("only", Kind::Text, "comma-separated check names"),
];

pub fn keys_for(cmd: Subcommand) -> &'static [KeySpec] {
    match cmd {
        Subcommand::Geometry => GEOMETRY_KEYS,
        Subcommand::BoundStates => BOUND_KEYS,
        Subcommand::Transport => TRANSPORT_KEYS,
        Subcommand::Experiment => EXPERIMENT_KEYS,
        Subcommand::Verify => VERIFY_KEYS,
    }
}

/// Global flags given on the command line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Flags {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub dimensionless: bool,
}

/// Validated configuration for one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Subcommand,
    pub params: BTreeMap<String, (Value, Origin)>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub dimensionless: bool,
}

impl RunConfig {
    fn get(&self, key: &str) -> Option<&(Value, Origin)> {
        self.params.get(key)
    }

    pub fn origin(&self, key: &str) -> Origin {
        self.get(key).map(|v| v.1.clone()).unwrap_or(Origin::Default)
    }

    pub fn has(&self, key: &str) -> bool {
        self.params.contains_key(key)
    }

    pub fn number(&self, key: &str) -> Option<f64> {
        match self.get(key) {
            Some((Value::Number(v), _)) => Some(*v),
            _ => None,
        }
    }

    pub fn number_or(&self, key: &str, default: f64) -> f64 {
        self.number(key).unwrap_or(default)
    }

    pub fn require_number(&self, key: &str) -> Result<f64, ConfigError> {
        self.number(key).ok_or_else(|| ConfigError::MissingKey { key: key.into(), command: self.command.name() })
    }

    pub fn count(&self, key: &str) -> Option<usize> {
        match self.get(key) {
            Some((Value::Count(v), _)) => Some(*v),
            _ => None,
        }
    }

    pub fn integer(&self, key: &str) -> Option<i64> {
        match self.get(key) {
            Some((Value::Integer(v), _)) => Some(*v),
            _ => None,
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        match self.get(key) {
            Some((Value::Text(v), _)) => Some(v),
            _ => None,
        }
    }

    pub fn require_text(&self, key: &str) -> Result<&str, ConfigError> {
        self.text(key).ok_or_else(|| ConfigError::MissingKey { key: key.into(), command: self.command.name() })
    }

    pub fn flag(&self, key: &str) -> Option<bool> {
        match self.get(key) {
            Some((Value::Bool(v), _)) => Some(*v),
            _ => None,
        }
    }
}

fn typed(keys: &[KeySpec], section: &str, key: &str, raw: &str, origin: Origin) -> Result<Value, ConfigError> {
    let spec = keys.iter().find(|k| k.name == key).ok_or_else(|| ConfigError::UnknownKey {
        origin: origin.clone(),
        key: key.into(),
        section: section.into(),
    })?;
    spec.kind.check(raw).map_err(|_| ConfigError::TypeMismatch {
        origin,
        key: key.into(),
        expected: spec.kind.expected(),
        value: raw.into(),
    })
}

type Sections = BTreeMap<String, Vec<(String, String, Origin)>>;

/// Splits a config file into sections of `(key, value, origin)` entries.
/// Entries before any header belong to `[run]`.
pub fn parse_file_text(path: &Path, text: &str) -> Result<Sections, ConfigError> {
    let mut sections: Sections = BTreeMap::new();
    let mut current = "run".to_string();
    for (i, raw) in text.lines().enumerate() {
        let origin = Origin::Line { file: path.to_path_buf(), line: i + 1 };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::Malformed { origin: origin.clone(), message: "unterminated section header".into() })?
                .trim()
                .to_ascii_lowercase();
            if name != "run" && !Subcommand::ALL.iter().any(|c| c.name() == name) {
                return Err(ConfigError::UnknownSection { origin, section: name });
            }
            current = name;
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::Malformed { origin: origin.clone(), message: format!("expected key = value, got '{line}'") })?;
        let (k, v) = (k.trim().to_ascii_lowercase(), v.trim().trim_matches('"').to_string());
        if k.is_empty() {
            return Err(ConfigError::Malformed { origin, message: "empty key".into() });
        }
        sections.entry(current.clone()).or_default().push((k, v, origin));
    }
    Ok(sections)
}

/// Merges the config file (if any), `key=value` tokens and flags into a
/// validated [`RunConfig`]. Later sources win: file, then tokens, then flags.
pub fn parse_config(command: Subcommand, tokens: &[String], flags: &Flags) -> Result<RunConfig, ConfigError> {
    let file_sections = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError::Read { path: path.clone(), message: e.to_string() })?;
            parse_file_text(path, &text)?
        }
        None => Sections::new(),
    };
    parse_config_sections(command, &file_sections, tokens, flags)
}

pub fn parse_config_sections(
    command: Subcommand,
    file_sections: &Sections,
    tokens: &[String],
    flags: &Flags,
) -> Result<RunConfig, ConfigError> {
    let mut run: BTreeMap<String, (Value, Origin)> = BTreeMap::new();
    let mut params: BTreeMap<String, (Value, Origin)> = BTreeMap::new();
    for (section, entries) in file_sections {
        let (keys, target) = if section == "run" {
            (RUN_KEYS, Some(&mut run))
        } else {
            let cmd = Subcommand::ALL.into_iter().find(|c| c.name() == section).expect("checked when parsed");
            (keys_for(cmd), (cmd == command).then_some(&mut params))
        };
        let mut target = target;
        for (k, v, origin) in entries {
            let value = typed(keys, section, k, v, origin.clone())?;
            if let Some(t) = target.as_deref_mut() {
                t.insert(k.clone(), (value, origin.clone()));
            }
        }
    }
    for token in tokens {
        let origin = Origin::Flag(token.clone());
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| ConfigError::Malformed { origin: origin.clone(), message: "expected key=value".into() })?;
        let k = k.trim().to_ascii_lowercase();
        let value = typed(keys_for(command), command.name(), &k, v.trim(), origin.clone())?;
        params.insert(k, (value, origin));
    }

    let out = flags.out.clone().or_else(|| match run.get("out") {
        Some((Value::Text(t), _)) => Some(PathBuf::from(t)),
        _ => None,
    });
    let workers = flags.workers.or_else(|| match run.get("workers") {
        Some((Value::Count(n), _)) => Some(*n),
        _ => None,
    });
    let dimensionless = flags.dimensionless || matches!(run.get("dimensionless"), Some((Value::Bool(true), _)));
    Ok(RunConfig { command, params, out, workers, dimensionless })
}

/// Worker count from the flag/config, else the `REVSURF_WORKERS` variable.
pub fn resolve_workers(cfg: &RunConfig, env: Option<&str>) -> Result<Option<usize>, ConfigError> {
    if cfg.workers.is_some() {
        return Ok(cfg.workers);
    }
    match env {
        None => Ok(None),
        Some(v) => usize::from_str(v.trim()).map(Some).map_err(|_| ConfigError::TypeMismatch {
            origin: Origin::Flag(format!("REVSURF_WORKERS={v}")),
            key: "REVSURF_WORKERS".into(),
            expected: Kind::Count.expected(),
            value: v.into(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tokens(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn tokens_become_typed_params() {
        let cfg = parse_config(Subcommand::BoundStates, &tokens("rho=1 lambda=1 zmax=1.5 eta=0 count=3"), &Flags::default())
            .unwrap();
        assert_eq!(cfg.number("rho"), Some(1.0));
        assert_eq!(cfg.number("zmax"), Some(1.5));
        assert_eq!(cfg.integer("eta"), Some(0));
        assert_eq!(cfg.count("count"), Some(3));
    }

    #[test]
    fn keys_are_case_insensitive() {
        let cfg = parse_config(Subcommand::Transport, &tokens("R1=40 R2=2 a=10 eps=2 Emin=0.1"), &Flags::default()).unwrap();
        assert_eq!(cfg.number("r1"), Some(40.0));
        assert_eq!(cfg.number("emin"), Some(0.1));
    }

    #[test]
    fn unknown_key_and_bad_type_name_the_token() {
        let e = parse_config(Subcommand::BoundStates, &tokens("rh=1"), &Flags::default()).unwrap_err();
        assert_eq!(e.to_string(), "argument 'rh=1': unknown key 'rh' for bound-states");
        let e = parse_config(Subcommand::BoundStates, &tokens("rho=abc"), &Flags::default()).unwrap_err();
        assert!(matches!(e, ConfigError::TypeMismatch { .. }));
        assert!(e.to_string().contains("argument 'rho=abc'"));
        let e = parse_config(Subcommand::BoundStates, &tokens("count=-1"), &Flags::default()).unwrap_err();
        assert!(matches!(e, ConfigError::TypeMismatch { .. }));
        let e = parse_config(Subcommand::BoundStates, &tokens("rho"), &Flags::default()).unwrap_err();
        assert!(matches!(e, ConfigError::Malformed { .. }));
    }

    #[test]
    fn file_errors_carry_line_numbers() {
        let p = Path::new("run.cfg");
        let s = parse_file_text(p, "[bound-states]\nrho = 1\n\nlamda = 2\n").unwrap();
        let e = parse_config_sections(Subcommand::BoundStates, &s, &[], &Flags::default()).unwrap_err();
        assert_eq!(e.to_string(), "run.cfg:4: unknown key 'lamda' for bound-states");

        let e = parse_file_text(p, "# header\n[plot]\n").unwrap_err();
        assert_eq!(e.to_string(), "run.cfg:2: unknown section [plot]");
        let e = parse_file_text(p, "rho 1\n").unwrap_err();
        assert!(e.to_string().starts_with("run.cfg:1:"));

        // typos in sections the run does not use still fail
        let s = parse_file_text(p, "[transport]\nr3 = 1\n").unwrap();
        assert!(parse_config_sections(Subcommand::BoundStates, &s, &[], &Flags::default()).is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let p = Path::new("run.cfg");
        let s = parse_file_text(p, "out = from_file\nworkers = 2\n[bound-states]\nrho = 1 # nm\nlambda = 1\n").unwrap();
        let flags = Flags { out: Some("from_flag".into()), ..Default::default() };
        let cfg = parse_config_sections(Subcommand::BoundStates, &s, &tokens("rho=3"), &flags).unwrap();
        assert_eq!(cfg.number("rho"), Some(3.0));
        assert_eq!(cfg.number("lambda"), Some(1.0));
        assert_eq!(cfg.origin("lambda"), Origin::Line { file: p.into(), line: 5 });
        assert_eq!(cfg.out, Some(PathBuf::from("from_flag")));
        assert_eq!(cfg.workers, Some(2));
    }

    #[test]
    fn workers_fall_back_to_environment() {
        let cfg = parse_config(Subcommand::Verify, &[], &Flags::default()).unwrap();
        assert_eq!(resolve_workers(&cfg, Some("3")).unwrap(), Some(3));
        assert_eq!(resolve_workers(&cfg, None).unwrap(), None);
        assert!(resolve_workers(&cfg, Some("many")).is_err());
        let cfg = parse_config(Subcommand::Verify, &[], &Flags { workers: Some(5), ..Default::default() }).unwrap();
        assert_eq!(resolve_workers(&cfg, Some("3")).unwrap(), Some(5));
    }

    #[test]
    fn missing_key_is_reported() {
        let cfg = parse_config(Subcommand::BoundStates, &tokens("rho=1"), &Flags::default()).unwrap();
        let e = cfg.require_number("lambda").unwrap_err();
        assert!(e.to_string().contains("missing required key 'lambda' for bound-states"));
    }
}
