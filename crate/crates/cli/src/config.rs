use std::fs;
use std::path::Path;

use oscillint_core::criteria::CriteriaOptions;
use oscillint_core::expr::Expr;
use oscillint_core::numerics::{Grid, Tolerances};
use oscillint_core::oracle::{Ensemble, DEFAULT_SEED, DEFAULT_SIZE};
use oscillint_core::riccati::ComparisonInstance;
use oscillint_core::transform::{reduce_equation, RiccatiProblem, ScalarFn, SecondOrderSpec, SystemSpec};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const MIN_GRID_NODES: usize = 64;

/// Coefficients of `φ' = pφ + qψ + f`, `ψ' = rφ + sψ + g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemText {
    pub p: String,
    pub q: String,
    pub r: String,
    pub s: String,
    #[serde(default = "zero_text")]
    pub f: String,
    #[serde(default = "zero_text")]
    pub g: String,
}

/// Coefficients of `(a φ')' + b φ' + c φ = d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationText {
    pub a: String,
    #[serde(default = "zero_text")]
    pub b: String,
    pub c: String,
    #[serde(default = "zero_text")]
    pub d: String,
}

/// `y' + f y² + g y + h = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiccatiText {
    pub f: String,
    pub g: String,
    pub h: String,
}

/// Standalone Riccati problem, or the start value used with a system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiccatiSection {
    #[serde(default)]
    pub f: Option<String>,
    #[serde(default)]
    pub g: Option<String>,
    #[serde(default)]
    pub h: Option<String>,
    #[serde(default)]
    pub y0: f64,
}

impl RiccatiSection {
    fn equation(&self) -> Option<RiccatiText> {
        match (&self.f, &self.g, &self.h) {
            (Some(f), Some(g), Some(h)) => Some(RiccatiText {
                f: f.clone(),
                g: g.clone(),
                h: h.clone(),
            }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonSection {
    pub first: RiccatiText,
    pub second: RiccatiText,
    pub y2_start: f64,
    /// Constant `η₁ = η₂ = max(y2_start, 0) + eta_offset` unless given.
    #[serde(default = "default_eta_offset")]
    pub eta_offset: f64,
    #[serde(default)]
    pub eta1: Option<String>,
    #[serde(default)]
    pub eta2: Option<String>,
    #[serde(default)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LambdaOptions {
    pub points: usize,
    pub span: Option<f64>,
    /// Explicit λ values; replaces the generated grid.
    pub values: Option<Vec<f64>>,
}

impl Default for LambdaOptions {
    fn default() -> Self {
        let d = CriteriaOptions::default();
        LambdaOptions {
            points: d.lambda_points,
            span: None,
            values: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanOptions {
    pub points: usize,
    /// Explicit scan points; replaces the generated ones.
    pub values: Option<Vec<f64>>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            points: CriteriaOptions::default().scan_points,
            values: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleOptions {
    pub size: usize,
    pub seed: u64,
    pub final_window_fraction: f64,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        EnsembleOptions {
            size: DEFAULT_SIZE,
            seed: DEFAULT_SEED,
            final_window_fraction: 0.5,
        }
    }
}

/// Problem description read from a JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default)]
    pub system: Option<SystemText>,
    #[serde(default)]
    pub equation: Option<EquationText>,
    #[serde(default)]
    pub t0: f64,
    pub horizon: f64,
    /// Working grid cells per unit of time.
    #[serde(default = "default_grid_nodes")]
    pub grid_nodes: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub lambda: LambdaOptions,
    #[serde(default)]
    pub scan: ScanOptions,
    #[serde(default)]
    pub periodic: Option<f64>,
    #[serde(default)]
    pub ensemble: EnsembleOptions,
    /// Test function on `[0, 1]` for the Wong check.
    #[serde(default)]
    pub test_function: Option<String>,
    #[serde(default)]
    pub riccati: Option<RiccatiSection>,
    #[serde(default)]
    pub comparison: Option<ComparisonSection>,
    #[serde(default)]
    pub squared_variant: bool,
}

fn zero_text() -> String {
    "0".into()
}

fn default_eta_offset() -> f64 {
    1.0
}

fn default_grid_nodes() -> usize {
    CriteriaOptions::default().nodes_per_unit
}

fn parse_field(path: &str, text: &str) -> Result<Expr> {
    Expr::parse(text).map_err(|source| CliError::Field {
        path: path.to_string(),
        source,
    })
}

fn parse_riccati(path: &str, r: &RiccatiText, span: (f64, f64)) -> Result<RiccatiProblem> {
    let f = parse_field(&format!("{path}.f"), &r.f)?;
    let g = parse_field(&format!("{path}.g"), &r.g)?;
    let h = parse_field(&format!("{path}.h"), &r.h)?;
    Ok(RiccatiProblem::new(f.into(), g.into(), h.into(), span)?)
}

/// Reads, parses and validates a configuration file.
pub fn load_config(path: &Path) -> Result<ProblemConfig> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let config: ProblemConfig = serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    config.validate()?;
    Ok(config)
}

impl ProblemConfig {
    /// Structural checks plus eager parsing of every expression.
    pub fn validate(&self) -> Result<()> {
        let standalone = self.riccati.as_ref().is_some_and(|r| r.equation().is_some()) || self.comparison.is_some();
        match (&self.system, &self.equation) {
            (Some(_), Some(_)) => return Err(CliError::Invalid("exactly one of `system` and `equation` may be given".into())),
            (None, None) if !standalone => {
                return Err(CliError::Invalid("one of `system` and `equation` is required".into()))
            }
            _ => {}
        }
        if !(self.t0.is_finite() && self.horizon.is_finite() && self.horizon > self.t0) {
            return Err(CliError::Invalid(format!(
                "horizon must exceed t0, got t0 = {} and horizon = {}",
                self.t0, self.horizon
            )));
        }
        if self.grid_nodes < MIN_GRID_NODES {
            return Err(CliError::Invalid(format!(
                "grid_nodes must be at least {MIN_GRID_NODES}, got {}",
                self.grid_nodes
            )));
        }
        if let Some(p) = self.periodic {
            if !(p > 0.0 && p.is_finite()) {
                return Err(CliError::Invalid(format!("periodic must be positive, got {p}")));
            }
        }
        if !(0.0..=1.0).contains(&self.ensemble.final_window_fraction) || self.ensemble.size < 2 {
            return Err(CliError::Invalid(
                "ensemble needs size >= 2 and final_window_fraction in [0, 1]".into(),
            ));
        }
        self.tolerances.validate()?;
        self.system_text_spec()?;
        self.equation_spec()?;
        if let Some(u) = &self.test_function {
            parse_field("test_function", u)?;
        }
        if let Some(r) = &self.riccati {
            let given = [&r.f, &r.g, &r.h].iter().filter(|x| x.is_some()).count();
            if given != 0 && given != 3 {
                return Err(CliError::Invalid("riccati needs all of f, g and h, or none".into()));
            }
        }
        self.riccati_problem()?;
        self.comparison_instance()?;
        Ok(())
    }

    pub fn span(&self) -> (f64, f64) {
        (self.t0, self.horizon)
    }

    pub fn criteria_options(&self) -> CriteriaOptions {
        CriteriaOptions {
            tolerances: self.tolerances,
            nodes_per_unit: self.grid_nodes,
            lambda_points: self.lambda.points,
            lambda_span: self.lambda.span,
            scan_points: self.scan.points,
            periodic: self.periodic,
            ..CriteriaOptions::default()
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Ok(self.criteria_options().grid(self.t0, self.horizon)?)
    }

    pub fn ensemble(&self) -> Result<Ensemble> {
        Ok(Ensemble::seeded(self.span(), self.ensemble.seed, self.ensemble.size)?)
    }

    fn system_text_spec(&self) -> Result<Option<SystemSpec>> {
        let Some(s) = &self.system else { return Ok(None) };
        let field = |name: &str, text: &str| parse_field(&format!("system.{name}"), text);
        Ok(Some(SystemSpec::new(
            field("p", &s.p)?,
            field("q", &s.q)?,
            field("r", &s.r)?,
            field("s", &s.s)?,
            field("f", &s.f)?,
            field("g", &s.g)?,
            self.t0,
        )))
    }

    pub fn equation_spec(&self) -> Result<Option<SecondOrderSpec>> {
        let Some(e) = &self.equation else { return Ok(None) };
        let field = |name: &str, text: &str| parse_field(&format!("equation.{name}"), text);
        Ok(Some(SecondOrderSpec::new(
            field("a", &e.a)?,
            field("b", &e.b)?,
            field("c", &e.c)?,
            field("d", &e.d)?,
            self.t0,
        )))
    }

    /// The configured system, reducing an equation when needed.
    pub fn system_spec(&self) -> Result<SystemSpec> {
        if let Some(sys) = self.system_text_spec()? {
            return Ok(sys);
        }
        match self.equation_spec()? {
            Some(eq) => Ok(reduce_equation(&eq, &self.grid()?)?),
            None => Err(CliError::Invalid("this command needs `system` or `equation`".into())),
        }
    }

    pub fn test_function(&self) -> Result<Option<Expr>> {
        self.test_function
            .as_deref()
            .map(|u| parse_field("test_function", u))
            .transpose()
    }

    /// The standalone Riccati problem, if configured.
    pub fn riccati_problem(&self) -> Result<Option<RiccatiProblem>> {
        match self.riccati.as_ref().and_then(RiccatiSection::equation) {
            Some(r) => Ok(Some(parse_riccati("riccati", &r, self.span())?)),
            None => Ok(None),
        }
    }

    pub fn riccati_start(&self) -> f64 {
        self.riccati.as_ref().map_or(0.0, |r| r.y0)
    }

    pub fn comparison_instance(&self) -> Result<Option<ComparisonInstance>> {
        let Some(c) = &self.comparison else { return Ok(None) };
        let span = self.span();
        let p1 = parse_riccati("comparison.first", &c.first, span)?;
        let p2 = parse_riccati("comparison.second", &c.second, span)?;
        let mut inst = ComparisonInstance::new(p1, p2, c.y2_start, c.eta_offset);
        inst.tolerances = self.tolerances;
        let default_eta = c.y2_start.max(0.0) + c.eta_offset;
        let eta = |path: &str, text: &Option<String>| -> Result<ScalarFn> {
            match text {
                Some(t) => {
                    let e = parse_field(path, t)?;
                    let slope = e.derivative().ok();
                    Ok(ScalarFn::Expr { value: e, slope })
                }
                None => Ok(ScalarFn::constant(default_eta)),
            }
        };
        if c.eta1.is_some() || c.eta2.is_some() {
            inst = inst.with_etas(eta("comparison.eta1", &c.eta1)?, eta("comparison.eta2", &c.eta2)?);
        }
        if let Some(g) = c.gamma {
            inst = inst.with_gamma(g);
        }
        Ok(Some(inst))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_json(text: &str) -> Result<ProblemConfig> {
        let c: ProblemConfig = serde_json::from_str(text).unwrap();
        c.validate().map(|_| c)
    }

    #[test]
    fn equation_config_is_valid() {
        let c = from_json(r#"{"equation": {"a": "1", "b": "0", "c": "1", "d": "sin(t)"}, "horizon": 50}"#).unwrap();
        assert_eq!(c.grid_nodes, 2048);
        let sys = c.system_spec().unwrap();
        assert_eq!(sys.g.to_string(), "sin(t)");
    }

    #[test]
    fn both_inputs_are_rejected() {
        let text = r#"{"equation": {"a": "1", "c": "1"}, "system": {"p": "0", "q": "1", "r": "-1", "s": "0"}, "horizon": 5}"#;
        assert!(matches!(from_json(text), Err(CliError::Invalid(_))));
    }

    #[test]
    fn negative_q_loads() {
        assert!(from_json(r#"{"system": {"p": "0", "q": "-1", "r": "1", "s": "0"}, "horizon": 5}"#).is_ok());
    }

    #[test]
    fn field_errors_name_the_path() {
        let err = from_json(r#"{"system": {"p": "0", "q": "1 +", "r": "1", "s": "0"}, "horizon": 5}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("system.q:"), "{msg}");
        assert!(msg.contains("offset"), "{msg}");
    }

    #[test]
    fn structural_invariants() {
        let sys = r#""system": {"p": "0", "q": "1", "r": "-1", "s": "0"}"#;
        assert!(from_json(&format!("{{{sys}, \"horizon\": 0}}")).is_err());
        assert!(from_json(&format!("{{{sys}, \"horizon\": 5, \"grid_nodes\": 10}}")).is_err());
        assert!(from_json(r#"{"horizon": 5}"#).is_err());
        let ric = r#"{"riccati": {"f": "1", "g": "0", "h": "1"}, "horizon": 3}"#;
        assert!(from_json(ric).unwrap().riccati_problem().unwrap().is_some());
    }
}
