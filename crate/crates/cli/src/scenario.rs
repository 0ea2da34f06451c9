//! Scenario, game and spectrum files.

use std::fmt;
use std::path::Path;

use egtq::{EnergySpectrum, IntegratorConfig, Method, MixedStrategy, PayoffMatrix};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    Vector,
    Lax,
    QuantumSelfConsistent,
    EntropySeries,
    Equilibria,
}

impl Analysis {
    pub fn name(self) -> &'static str {
        match self {
            Analysis::Vector => "vector",
            Analysis::Lax => "lax",
            Analysis::QuantumSelfConsistent => "quantum-self-consistent",
            Analysis::EntropySeries => "entropy-series",
            Analysis::Equilibria => "equilibria",
        }
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodName {
    Euler,
    Rk4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    pub method: MethodName,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "yes")]
    pub renormalize: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: String,
    pub format: Format,
}

/// Bounds on recorded drift; a run that exceeds one exits with status 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub simplex: f64,
    pub trace: f64,
    pub idempotency: f64,
    pub hermiticity: f64,
    pub purity: f64,
    /// Largest allowed gap between the matrix or quantum populations and
    /// the vector trajectory.
    pub discrepancy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            simplex: 1e-6,
            trace: 1e-8,
            idempotency: 1e-6,
            hermiticity: 1e-12,
            purity: 1e-10,
            discrepancy: 1e-5,
        }
    }
}

fn default_hbar() -> f64 {
    1.0
}

/// The on-disk scenario document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub game: Vec<Vec<f64>>,
    pub initial: Vec<f64>,
    pub integrator: IntegratorSpec,
    pub analyses: Vec<Analysis>,
    pub output: OutputSpec,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub file: ScenarioFile,
    pub game: PayoffMatrix,
    pub initial: MixedStrategy,
    pub integrator: IntegratorConfig,
    /// Requested analyses, deduplicated, in canonical order.
    pub analyses: Vec<Analysis>,
}

pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "<root>".to_string() } else { path };
        CliError::schema(path, e.into_inner())
    })
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::schema(path.display(), e))
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        Self::from_file(parse_json(text)?)
    }

    pub fn from_file(file: ScenarioFile) -> Result<Self, CliError> {
        let game = payoff_from_rows(&file.game, "game")?;
        let initial = MixedStrategy::new(file.initial.clone()).map_err(|e| CliError::schema("initial", e))?;
        if initial.len() != game.dim() {
            return Err(CliError::schema(
                "initial",
                format!("{} weights for a {}-strategy game", initial.len(), game.dim()),
            ));
        }
        let spec = &file.integrator;
        let method = match spec.method {
            MethodName::Euler => Method::Euler,
            MethodName::Rk4 => Method::Rk4,
        };
        for (field, v) in [("integrator.dt", spec.dt), ("integrator.t_end", spec.t_end)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::schema(field, format!("{v} must be a positive number")));
            }
        }
        let integrator = IntegratorConfig::new(method, spec.dt, spec.t_end)
            .map_err(|e| CliError::schema("integrator", e))?
            .with_renormalize(spec.renormalize);
        if !(file.hbar.is_finite() && file.hbar > 0.0) {
            return Err(CliError::schema("hbar", format!("{} must be a positive number", file.hbar)));
        }
        let tol = &file.tolerances;
        for (field, v) in [
            ("tolerances.simplex", tol.simplex),
            ("tolerances.trace", tol.trace),
            ("tolerances.idempotency", tol.idempotency),
            ("tolerances.hermiticity", tol.hermiticity),
            ("tolerances.purity", tol.purity),
            ("tolerances.discrepancy", tol.discrepancy),
        ] {
            if !(v >= 0.0) {
                return Err(CliError::schema(field, format!("{v} must be non-negative")));
            }
        }
        if file.analyses.is_empty() {
            return Err(CliError::schema("analyses", "at least one analysis is required"));
        }
        if file.output.dir.is_empty() {
            return Err(CliError::schema("output.dir", "must not be empty"));
        }
        let mut analyses = file.analyses.clone();
        analyses.sort();
        analyses.dedup();
        Ok(Self {
            file,
            game,
            initial,
            integrator,
            analyses,
        })
    }
}

pub fn payoff_from_rows(rows: &[Vec<f64>], field: &str) -> Result<PayoffMatrix, CliError> {
    if let Some(i) = rows.iter().position(|r| r.len() != rows.len()) {
        return Err(CliError::schema(
            format!("{field}[{i}]"),
            format!("row has {} entries, the matrix has {} rows", rows[i].len(), rows.len()),
        ));
    }
    PayoffMatrix::from_rows(rows).map_err(|e| CliError::schema(field, e))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub payoff: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumFile {
    pub levels: Vec<f64>,
}

pub fn load_game(path: &Path) -> Result<PayoffMatrix, CliError> {
    let file: GameFile = parse_json(&read_file(path)?)?;
    payoff_from_rows(&file.payoff, "payoff")
}

pub fn load_spectrum(path: &Path) -> Result<EnergySpectrum, CliError> {
    let file: SpectrumFile = parse_json(&read_file(path)?)?;
    EnergySpectrum::new(file.levels).map_err(|e| CliError::schema("levels", e))
}

/// Template printed by `--dump-config` when no scenario is given.
pub fn example() -> ScenarioFile {
    ScenarioFile {
        game: vec![vec![-1.0, 2.0], vec![0.0, 1.0]],
        initial: vec![0.9, 0.1],
        integrator: IntegratorSpec {
            method: MethodName::Rk4,
            dt: 1e-3,
            t_end: 10.0,
            renormalize: true,
        },
        analyses: vec![
            Analysis::Vector,
            Analysis::Lax,
            Analysis::QuantumSelfConsistent,
            Analysis::EntropySeries,
            Analysis::Equilibria,
        ],
        output: OutputSpec {
            dir: "out".into(),
            format: Format::Csv,
        },
        hbar: 1.0,
        tolerances: Tolerances::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(initial: &str) -> String {
        format!(
            r#"{{"game": [[0, 0], [0, 0]], "initial": {initial},
                "integrator": {{"method": "rk4", "dt": 0.01, "t_end": 1}},
                "analyses": ["vector"], "output": {{"dir": "o", "format": "csv"}}}}"#
        )
    }

    #[test]
    fn defaults_are_filled() {
        let s = Scenario::parse(&text("[0.5, 0.5]")).unwrap();
        assert!(s.file.integrator.renormalize);
        assert_eq!(s.file.hbar, 1.0);
        assert_eq!(s.file.tolerances, Tolerances::default());
    }

    #[test]
    fn bad_initial_names_the_field() {
        let err = Scenario::parse(&text("[0.5, 0.4]")).unwrap_err();
        assert_eq!(err.code, 2);
        assert!(err.message.contains("`initial`"), "{}", err.message);
        let err = Scenario::parse(&text("[1.0]")).unwrap_err();
        assert!(err.message.contains("`initial`"), "{}", err.message);
    }

    #[test]
    fn unknown_fields_and_analyses_are_rejected() {
        let err = Scenario::parse(&text("[0.5, 0.5]").replace("\"vector\"", "\"vector\", \"plots\"")).unwrap_err();
        assert!(err.message.contains("`analyses[1]`"), "{}", err.message);
        let err = Scenario::parse(&text("[0.5, 0.5]").replace("\"t_end\"", "\"tend\"")).unwrap_err();
        assert!(err.message.contains("`integrator.tend`"), "{}", err.message);
    }

    #[test]
    fn ragged_game_is_rejected() {
        let err = Scenario::parse(&text("[0.5, 0.5]").replace("[[0, 0], [0, 0]]", "[[0, 0], [0]]")).unwrap_err();
        assert!(err.message.contains("`game[1]`"), "{}", err.message);
    }

    #[test]
    fn example_round_trips() {
        let json = serde_json::to_string_pretty(&example()).unwrap();
        let back: ScenarioFile = parse_json(&json).unwrap();
        assert_eq!(back, example());
    }
}
