//! `certify` and `maxent`.

use std::fmt::Write as _;

use egtq::{
    certify_ess, certify_nash, solve_beta, thermo_state, verify_identities, EnergySpectrum,
    Error, IdentityOutcome, MixedStrategy, PayoffMatrix, Verdict, WitnessKind,
};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::error::{exit, CliError};
use crate::output::{fmt_f64, json_f64};

/// Strategies typed on the command line carry about seven significant
/// digits, so the command tolerates deviations of that order.
pub const CERTIFY_TOL: f64 = 1e-6;

pub fn parse_strategy(text: &str, n: usize) -> Result<MixedStrategy, CliError> {
    let weights = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::schema("strategy", format!("{text:?} is not a comma-separated list of reals: {e}")))?;
    if weights.len() != n {
        return Err(CliError::schema("strategy", format!("{} weights for a {n}-strategy game", weights.len())));
    }
    MixedStrategy::new(weights).map_err(|e| CliError::schema("strategy", e))
}

fn witness_kind(kind: WitnessKind) -> &'static str {
    match kind {
        WitnessKind::BetterReply => "better-reply",
        WitnessKind::Tie => "tie",
        WitnessKind::Invader => "invader",
    }
}

#[derive(Serialize)]
struct WitnessJson {
    strategy: usize,
    kind: &'static str,
    margin: Box<RawValue>,
}

#[derive(Serialize)]
struct CertifyJson {
    verdict: &'static str,
    nash_verdict: &'static str,
    worst_deviation: Box<RawValue>,
    tol: Box<RawValue>,
    witnesses: Vec<WitnessJson>,
}

/// Returns the report text and the exit status.
pub fn certify(game: &PayoffMatrix, strategy: &str, tol: f64, json: bool) -> Result<(String, u8), CliError> {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(CliError::schema("tol", format!("{tol} must be a non-negative number")));
    }
    let p = parse_strategy(strategy, game.dim())?;
    let nash = certify_nash(&p, game, tol).map_err(|e| CliError::schema("strategy", e))?;
    let ess = certify_ess(&p, game, tol).map_err(|e| CliError::schema("strategy", e))?;
    let report = if ess.verdict == Verdict::Ess { &ess } else { &nash };
    let code = if report.verdict.is_equilibrium() { exit::OK } else { exit::REJECTED };

    let text = if json {
        let doc = CertifyJson {
            verdict: report.verdict.as_str(),
            nash_verdict: nash.verdict.as_str(),
            worst_deviation: json_f64(report.worst_deviation),
            tol: json_f64(tol),
            witnesses: report
                .witnesses
                .iter()
                .map(|w| WitnessJson {
                    strategy: w.strategy + 1,
                    kind: witness_kind(w.kind),
                    margin: json_f64(w.margin),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).unwrap() + "\n"
    } else {
        let mut out = String::new();
        let _ = writeln!(out, "verdict: {}", report.verdict);
        let _ = writeln!(out, "nash_verdict: {}", nash.verdict);
        let _ = writeln!(out, "worst_deviation: {}", fmt_f64(report.worst_deviation));
        let _ = writeln!(out, "tol: {}", fmt_f64(tol));
        for w in &report.witnesses {
            let _ = writeln!(out, "witness: strategy {} {} margin {}", w.strategy + 1, witness_kind(w.kind), fmt_f64(w.margin));
        }
        out
    };
    Ok((text, code))
}

pub enum Temperature {
    Beta(f64),
    TargetEnergy(f64),
}

fn maxent_error(e: Error) -> CliError {
    match e {
        Error::Infeasible { .. } | Error::Degenerate { .. } => CliError {
            code: exit::INFEASIBLE,
            message: e.to_string(),
        },
        Error::NonFinite { .. } => CliError::numerical("maxent", e),
        other => CliError::schema("levels", other),
    }
}

#[derive(Serialize)]
struct IdentityJson {
    identity: &'static str,
    analytic: Option<Box<RawValue>>,
    finite_difference: Option<Box<RawValue>>,
    relative_error: Option<Box<RawValue>>,
    note: Option<&'static str>,
}

#[derive(Serialize)]
struct MaxentJson {
    beta: Box<RawValue>,
    tau: Box<RawValue>,
    partition: Box<RawValue>,
    log_partition: Box<RawValue>,
    mean_energy: Box<RawValue>,
    entropy: Box<RawValue>,
    energy_variance: Box<RawValue>,
    gibbs: Vec<Box<RawValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    identities: Option<Vec<IdentityJson>>,
}

pub fn maxent(spectrum: &EnergySpectrum, temp: Temperature, verify: Option<f64>, json: bool) -> Result<String, CliError> {
    let beta = match temp {
        Temperature::Beta(b) if b.is_finite() => b,
        Temperature::Beta(b) => return Err(CliError::schema("beta", format!("{b} is not finite"))),
        Temperature::TargetEnergy(u) => solve_beta(spectrum, u).map_err(maxent_error)?,
    };
    let state = thermo_state(spectrum, beta).map_err(maxent_error)?;
    let report = match verify {
        Some(h) => Some(verify_identities(spectrum, beta, h).map_err(|e| CliError::schema("h", e))?),
        None => None,
    };

    if json {
        let identities = report.map(|r| {
            r.checks
                .iter()
                .map(|c| match &c.outcome {
                    IdentityOutcome::Checked { analytic, finite_difference, relative_error } => IdentityJson {
                        identity: c.identity.label(),
                        analytic: Some(json_f64(*analytic)),
                        finite_difference: Some(json_f64(*finite_difference)),
                        relative_error: Some(json_f64(*relative_error)),
                        note: None,
                    },
                    IdentityOutcome::Undefined(why) => IdentityJson {
                        identity: c.identity.label(),
                        analytic: None,
                        finite_difference: None,
                        relative_error: None,
                        note: Some(why),
                    },
                })
                .collect()
        });
        let doc = MaxentJson {
            beta: json_f64(state.beta),
            tau: json_f64(state.tau),
            partition: json_f64(state.partition),
            log_partition: json_f64(state.log_partition),
            mean_energy: json_f64(state.mean_energy),
            entropy: json_f64(state.entropy),
            energy_variance: json_f64(state.energy_variance),
            gibbs: state.populations.iter().map(|&p| json_f64(p)).collect(),
            identities,
        };
        return Ok(serde_json::to_string_pretty(&doc).unwrap() + "\n");
    }

    let mut out = String::new();
    for (name, v) in [
        ("beta", state.beta),
        ("tau", state.tau),
        ("partition", state.partition),
        ("log_partition", state.log_partition),
        ("mean_energy", state.mean_energy),
        ("entropy", state.entropy),
        ("energy_variance", state.energy_variance),
    ] {
        let _ = writeln!(out, "{name}: {}", fmt_f64(v));
    }
    let gibbs: Vec<String> = state.populations.iter().map(|&p| fmt_f64(p)).collect();
    let _ = writeln!(out, "gibbs: {}", gibbs.join(","));
    if let Some(r) = report {
        let _ = writeln!(out, "identities (h = {}):", fmt_f64(r.h));
        for c in &r.checks {
            match &c.outcome {
                IdentityOutcome::Checked { analytic, finite_difference, relative_error } => {
                    let _ = writeln!(
                        out,
                        "  {}: analytic {} fd {} relative_error {}",
                        c.identity.label(),
                        fmt_f64(*analytic),
                        fmt_f64(*finite_difference),
                        fmt_f64(*relative_error)
                    );
                }
                IdentityOutcome::Undefined(why) => {
                    let _ = writeln!(out, "  {}: {why}", c.identity.label());
                }
            }
        }
    }
    Ok(out)
}
