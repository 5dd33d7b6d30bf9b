use std::path::PathBuf;

use oscillint_core::criteria::{
    default_lambda_grid, lambda_feasibility_from_basis, nonoscillation_check, oscillation_check, wong_check,
    Outcome, Verdict,
};
use oscillint_core::numerics::{integrate_ode, Watch};
use oscillint_core::oracle::{empirical_classification, export_traces, simulate_ensemble, EmpiricalOutcome};
use oscillint_core::riccati::{comparison_certificate, comparison_validate, solve_riccati};
use oscillint_core::transform::{riccati_of_system, AlphaBasis, SystemSpec};
use serde_json::{json, Value};

use crate::config::ProblemConfig;
use crate::error::{CliError, Result};
use crate::report::{GridInfo, Provenance, Report};

pub const EXIT_RAN: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_OSCILLATORY: i32 = 10;
pub const EXIT_NON_OSCILLATORY: i32 = 20;
pub const EXIT_INCONCLUSIVE: i32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Non-oscillation check, then oscillation check, plus an oracle cross-check.
    Analyze,
    /// Ensemble simulation only.
    Oracle,
    /// Riccati solve with escape report.
    Riccati,
    /// First-order system of a second-order equation.
    Reduce,
    /// Forcing-window criterion for undamped equations.
    Wong,
    /// Comparison certificate and direct validation.
    Compare,
    /// λ-feasibility landscape.
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Oracle => "oracle",
            Command::Riccati => "riccati",
            Command::Reduce => "reduce",
            Command::Wong => "wong",
            Command::Compare => "compare",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub dump_traces: Option<PathBuf>,
}

pub fn exit_code(verdict: Option<&Verdict>) -> i32 {
    match verdict.map(|v| v.outcome) {
        None => EXIT_RAN,
        Some(Outcome::Oscillatory) => EXIT_OSCILLATORY,
        Some(Outcome::NonOscillatory) => EXIT_NON_OSCILLATORY,
        Some(Outcome::Inconclusive) => EXIT_INCONCLUSIVE,
    }
}

#[derive(Default)]
struct Findings {
    verdict: Option<Verdict>,
    empirical: Option<oscillint_core::oracle::EmpiricalVerdict>,
    certificates: Option<oscillint_core::riccati::CertificateReport>,
    details: Value,
}

/// Runs `command` on a validated configuration.
pub fn run(command: Command, config: &ProblemConfig, opts: &RunOptions) -> Result<Report> {
    let findings = match command {
        Command::Analyze => analyze(config, opts)?,
        Command::Oracle => oracle(config, opts)?,
        Command::Riccati => riccati(config)?,
        Command::Reduce => reduce(config)?,
        Command::Wong => wong(config)?,
        Command::Compare => compare(config)?,
        Command::Sweep => sweep(config)?,
    };
    let grid = config.grid()?;
    Ok(Report {
        command: command.name().to_string(),
        exit_code: exit_code(findings.verdict.as_ref()),
        verdict: findings.verdict,
        empirical: findings.empirical,
        certificates: findings.certificates,
        details: findings.details,
        provenance: Provenance {
            tool: "oscillint",
            version: env!("CARGO_PKG_VERSION"),
            config: config.clone(),
            grid: GridInfo {
                t0: config.t0,
                horizon: config.horizon,
                cells_per_unit: config.grid_nodes,
                nodes: grid.len(),
            },
        },
    })
}

fn simulate(
    sys: &SystemSpec,
    config: &ProblemConfig,
    opts: &RunOptions,
) -> Result<(oscillint_core::oracle::EmpiricalVerdict, Value)> {
    let ens = config.ensemble()?;
    let trajs = simulate_ensemble(sys, &ens, &config.tolerances)?;
    let empirical = empirical_classification(&trajs, config.ensemble.final_window_fraction);
    let mut traces = Vec::new();
    if let Some(dir) = &opts.dump_traces {
        traces = export_traces(&trajs, dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
    }
    let info = json!({
        "members": ens.initial_conditions,
        "seed": ens.seed,
        "traces": traces,
    });
    Ok((empirical, info))
}

fn analyze(config: &ProblemConfig, opts: &RunOptions) -> Result<Findings> {
    let sys = config.system_spec()?;
    let grid = config.grid()?;
    let copts = config.criteria_options();
    let nonosc = nonoscillation_check(&sys, &grid, &copts)?;
    let osc = if nonosc.outcome == Outcome::NonOscillatory {
        None
    } else {
        Some(oscillation_check(
            &sys,
            config.span(),
            config.scan.values.as_deref(),
            config.lambda.values.as_deref(),
            &copts,
        )?)
    };
    let verdict = osc.clone().unwrap_or_else(|| nonosc.clone());
    let (empirical, ensemble) = simulate(&sys, config, opts)?;
    let disagrees = matches!(
        (verdict.outcome, empirical.outcome),
        (Outcome::NonOscillatory, EmpiricalOutcome::OscillatoryObserved)
            | (Outcome::Oscillatory, EmpiricalOutcome::NonoscillatoryObserved)
    );
    Ok(Findings {
        details: json!({
            "nonoscillation": nonosc,
            "oscillation": osc,
            "cross_check": {
                "agrees": !disagrees,
                "note": if disagrees {
                    "oracle observation contradicts the criteria verdict; inspect manually"
                } else {
                    "oracle observation is consistent with the criteria verdict"
                },
            },
            "ensemble": ensemble,
        }),
        verdict: Some(verdict),
        empirical: Some(empirical),
        certificates: None,
    })
}

fn oracle(config: &ProblemConfig, opts: &RunOptions) -> Result<Findings> {
    let sys = config.system_spec()?;
    let (empirical, ensemble) = simulate(&sys, config, opts)?;
    Ok(Findings {
        empirical: Some(empirical),
        details: json!({ "ensemble": ensemble }),
        ..Findings::default()
    })
}

fn riccati(config: &ProblemConfig) -> Result<Findings> {
    let y0 = config.riccati_start();
    let span = config.span();
    if let Some(prob) = config.riccati_problem()? {
        let sol = solve_riccati(&prob, y0, &config.tolerances)?;
        return Ok(Findings {
            details: json!({
                "y0": y0,
                "escape_time": sol.escape_time,
                "end": sol.end(),
                "final_value": sol.trajectory.last_state()[0],
            }),
            ..Findings::default()
        });
    }
    // y = ψ/φ of the homogeneous system; its escapes are the zeros of φ
    let sys = config.system_spec()?.homogeneous();
    let prob = riccati_of_system(&sys, None, span)?;
    let sol = solve_riccati(&prob, y0, &config.tolerances)?;
    let direct = integrate_ode(
        |t, y, dy| sys.derivative(t, y, dy),
        &[1.0, y0],
        span,
        &config.tolerances.without_escape(),
        &[Watch::zeros(0)],
    )?;
    let first_zero = direct.crossings(0).first().copied();
    let mismatch = match (sol.escape_time, first_zero) {
        (Some(e), Some(z)) => Some((e - z).abs()),
        _ => None,
    };
    Ok(Findings {
        details: json!({
            "y0": y0,
            "escape_time": sol.escape_time,
            "end": sol.end(),
            "final_value": sol.trajectory.last_state()[0],
            "first_phi_zero": first_zero,
            "escape_zero_mismatch": mismatch,
            "note": "Riccati equation of the homogeneous system; forcing is ignored",
        }),
        ..Findings::default()
    })
}

fn reduce(config: &ProblemConfig) -> Result<Findings> {
    if config.equation.is_none() {
        return Err(CliError::Invalid("reduce needs an `equation`".into()));
    }
    let sys = config.system_spec()?;
    Ok(Findings {
        details: json!({
            "system": {
                "p": sys.p.to_string(),
                "q": sys.q.to_string(),
                "r": sys.r.to_string(),
                "s": sys.s.to_string(),
                "f": sys.f.to_string(),
                "g": sys.g.to_string(),
            }
        }),
        ..Findings::default()
    })
}

fn wong(config: &ProblemConfig) -> Result<Findings> {
    let Some(eq) = config.equation_spec()? else {
        return Err(CliError::Invalid("wong needs an `equation`".into()));
    };
    let family = config.test_function()?;
    let verdict = wong_check(&eq, config.span(), family.as_ref(), &config.criteria_options())?;
    Ok(Findings {
        verdict: Some(verdict),
        details: json!({ "test_function": config.test_function.as_deref().unwrap_or("sin(3.141592653589793*t)") }),
        ..Findings::default()
    })
}

fn compare(config: &ProblemConfig) -> Result<Findings> {
    let Some(inst) = config.comparison_instance()? else {
        return Err(CliError::Invalid("compare needs a `comparison` section".into()));
    };
    let certificate = comparison_certificate(&inst, config.squared_variant)?;
    let validation = comparison_validate(&inst)?;
    Ok(Findings {
        details: json!({ "validation": validation }),
        certificates: Some(certificate),
        ..Findings::default()
    })
}

fn sweep(config: &ProblemConfig) -> Result<Findings> {
    let sys = config.system_spec()?;
    let grid = config.grid()?;
    let basis = AlphaBasis::new(&sys, &grid)?;
    let copts = config.criteria_options();
    let lambdas = config
        .lambda
        .values
        .clone()
        .unwrap_or_else(|| default_lambda_grid(&basis, &copts));
    let interval = lambda_feasibility_from_basis(&basis);
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let points: Vec<Value> = lambdas
        .iter()
        .map(|&lambda| {
            let alpha = basis.alpha_values(lambda);
            let g_lambda = basis.g_lambda_values(&alpha);
            json!({
                "lambda": lambda,
                "alpha_min": min(&alpha),
                "g_lambda_min": min(&g_lambda),
                "feasible": interval.is_some_and(|i| i.contains(lambda)),
            })
        })
        .collect();
    Ok(Findings {
        details: json!({ "interval": interval, "points": points }),
        ..Findings::default()
    })
}
